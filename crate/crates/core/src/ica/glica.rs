use crate::error::Result;
use crate::gf::{Basis, FieldMatrix};
use crate::ica::{EntropyTable, LinearICAResult, TableOptions};
use crate::pmf::JointPMF;

/// Greedy linear ICA: scan the entropy table in ascending order and keep
/// every row that is independent of the rows kept so far, until rank d.
pub fn glica(p: &JointPMF) -> Result<LinearICAResult> {
    glica_with(p, TableOptions::default())
}

pub fn glica_with(p: &JointPMF, opts: TableOptions) -> Result<LinearICAResult> {
    let table = EntropyTable::build_with(p, opts)?;
    let mut result = glica_on_table(&table);
    result.lower_bound = Some(if opts.dedup_scalar_multiples {
        EntropyTable::build_with(
            p,
            TableOptions {
                dedup_scalar_multiples: false,
                ..opts
            },
        )?
        .lower_bound()
    } else {
        table.lower_bound()
    });
    Ok(result)
}

/// Runs the greedy scan on a prebuilt table. The result carries no bound.
pub fn glica_on_table(table: &EntropyTable) -> LinearICAResult {
    let d = table.dim();
    let mut basis = Basis::new(table.field(), d);
    let mut component_entropies = Vec::with_capacity(d);
    let mut rows_examined = 0;
    for (i, row) in table.row_indices().enumerate() {
        if basis.is_full() {
            break;
        }
        if basis.try_extend_index(row) {
            component_entropies.push(table.entropy(i));
            rows_examined = i + 1;
        }
    }
    debug_assert!(basis.is_full(), "nonzero rows span the whole space");
    let w = FieldMatrix::from_rows(table.field(), basis.rows()).expect("rows share length d");
    LinearICAResult {
        w,
        objective: component_entropies.iter().sum(),
        component_entropies,
        rows_examined,
        lower_bound: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use crate::pmf::transform_pmf;

    #[test]
    fn glica_examples() {
        let f = PrimeField::BINARY;
        let p = JointPMF::new(f, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let r = glica(&p).unwrap();
        assert_eq!(r.w.as_slice(), &[1, 1, 0, 1]);
        assert!((r.objective - 1.852242).abs() < 1e-6);
        assert!((r.objective - r.lower_bound.unwrap()).abs() < 1e-12);
        assert_eq!(r.rows_examined, 2);

        let atom = JointPMF::point_mass(f, 4, 9).unwrap();
        let r = glica(&atom).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.w.rank(), 4);
        // Tie-break order 0001, 0010, 0011 (dependent), 0100, ...
        assert_eq!(r.rows_examined, 8);
        assert!(r.w.invert().unwrap().mul(&r.w).unwrap().is_identity());
    }

    #[test]
    fn objective_is_the_marginal_sum_of_the_transformed_pmf() {
        let f = PrimeField::new(3).unwrap();
        let probs: Vec<f64> = (1..=27).map(|k| (k * k % 11 + 1) as f64).collect();
        let total: f64 = probs.iter().sum();
        let p = JointPMF::new(f, 3, probs.iter().map(|x| x / total).collect()).unwrap();
        let r = glica(&p).unwrap();
        let y = transform_pmf(&p, &r.w).unwrap();
        assert!((y.component_entropies().iter().sum::<f64>() - r.objective).abs() < 1e-9);
        assert!((y.entropy() - p.entropy()).abs() < 1e-9);

        let dedup = glica_with(
            &p,
            TableOptions {
                dedup_scalar_multiples: true,
                ..TableOptions::default()
            },
        )
        .unwrap();
        assert!((dedup.objective - r.objective).abs() < 1e-12);
        assert_eq!(dedup.lower_bound, r.lower_bound);
    }
}
