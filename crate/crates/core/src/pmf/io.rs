//! Text interchange formats.
//!
//! Sample file: a `q d n` header line, then n lines of d symbols.
//! PMF file: a `q d` header line, then the q^d probabilities in index order
//! (whitespace separated, any line breaks).

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::gf::{parse_numbers, Elem, PrimeField};
use crate::pmf::{Capacity, JointPMF, SampleSet};

impl SampleSet {
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.field().order(), self.dim(), self.n());
        for row in self.rows() {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    s.push(' ');
                }
                write!(s, "{v}").expect("writing to a String");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty sample file".into()))?;
        let [q, d, n] = parse_numbers(header)?[..] else {
            return Err(Error::Format(format!(
                "expected header `q d n`, got `{header}`"
            )));
        };
        let field = PrimeField::new(u32::try_from(q).map_err(|_| Error::NotPrime(u32::MAX))?)?;
        let (d, n) = (d as usize, n as usize);
        let mut data = Vec::with_capacity(n.saturating_mul(d).min(1 << 28));
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("expected {n} rows, found {i}")))?;
            let row = parse_numbers(line)?;
            if row.len() != d {
                return Err(Error::Format(format!(
                    "row {i} has {} symbols, expected {d}",
                    row.len()
                )));
            }
            for v in row {
                if v >= field.order() as u64 {
                    return Err(Error::Format(format!(
                        "symbol {v} outside {field} in row {i}"
                    )));
                }
                data.push(v as Elem);
            }
        }
        if lines.next().is_some() {
            return Err(Error::Format(format!("more than the declared {n} rows")));
        }
        SampleSet::new(field, d, data)
    }
}

impl JointPMF {
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.field().order(), self.dim());
        for p in self.probs() {
            writeln!(s, "{p:e}").expect("writing to a String");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut header = || -> Result<u64> {
            let t = tokens
                .next()
                .ok_or_else(|| Error::Format("missing `q d` header".into()))?;
            t.parse()
                .map_err(|_| Error::Format(format!("`{t}` is not a non-negative integer")))
        };
        let q = header()?;
        let d = header()? as usize;
        let field = PrimeField::new(u32::try_from(q).map_err(|_| Error::NotPrime(u32::MAX))?)?;
        let cells = Capacity::default().cells(field, d)?;
        let probs = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Format(format!("`{t}` is not a probability")))
            })
            .collect::<Result<Vec<_>>>()?;
        if probs.len() != cells {
            return Err(Error::Format(format!(
                "expected {cells} probabilities, found {}",
                probs.len()
            )));
        }
        JointPMF::new(field, d, probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_file_round_trip() {
        let f = PrimeField::new(3).unwrap();
        let s = SampleSet::from_rows(f, 2, &[vec![0, 2], vec![1, 1]]).unwrap();
        let text = s.to_text();
        assert_eq!(text, "3 2 2\n0 2\n1 1\n");
        assert_eq!(SampleSet::from_text(&text).unwrap(), s);
    }

    #[test]
    fn sample_file_errors() {
        assert!(SampleSet::from_text("").is_err());
        assert!(SampleSet::from_text("2 2 2\n0 1\n").is_err());
        assert!(SampleSet::from_text("2 2 1\n0 2\n").is_err());
        assert!(SampleSet::from_text("2 2 1\n0 1 1\n").is_err());
        assert!(SampleSet::from_text("4 1 1\n0\n").is_err());
        assert!(SampleSet::from_text("2 1 1\n0\n1\n").is_err());
    }

    #[test]
    fn pmf_file_round_trip() {
        let p = JointPMF::new(PrimeField::BINARY, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        assert_eq!(JointPMF::from_text(&p.to_text()).unwrap(), p);
        assert!(JointPMF::from_text("2 2\n0.5 0.5\n").is_err());
        assert!(JointPMF::from_text("2 1\n0.5 0.6\n").is_err());
    }
}
