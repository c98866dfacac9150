//! Reproducible experiment drivers.
//!
//! Each experiment takes a typed parameter struct and returns flat
//! [`ResultRow`]s. [`run`] builds those structs from a string key-value map,
//! which is what the command line passes through. Every random quantity is
//! drawn from a stream derived from `(seed, point, trial)`, so rows are
//! identical across runs and thread counts apart from the runtime column.

mod params;
mod reference;
mod runs;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub use params::Params;
pub use reference::{
    expected_joint_entropy, marginal_sum_beta_form, marginal_sum_shifted_form,
    ORDER_PERMUTATION_TC_LIMIT,
};
pub(crate) use runs::{mixed_sources, recovery_trial, simplex_draw, source_reference};
pub use runs::{
    run_average_case, run_beta_binomial, run_bound_statistics, run_compression, run_gfq,
    run_linear_vs_nonlinear, run_recover_sources, run_zipf, AverageCaseParams, BlockSearch,
    BoundStatisticsParams, CompressionParams, GfqParams, LinearVsNonlinearParams,
    RecoverSourcesParams, RepresentationParams, Shape,
};

/// Registered experiment names.
pub const EXPERIMENTS: [&str; 8] = [
    "recover-sources",
    "zipf",
    "beta-binomial",
    "gfq",
    "linear-vs-nonlinear",
    "average-case",
    "compression",
    "bound-statistics",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputTarget {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub output: Option<OutputTarget>,
}

/// One measured value at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    /// Parameter point, e.g. `d=8` or `d=6,q=5`.
    pub point: String,
    pub metric: String,
    pub value: f64,
    /// Wall-clock seconds spent producing the value, 0 for derived values.
    pub runtime_s: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub experiment: String,
    pub seed: u64,
    pub version: String,
    /// Every parameter, defaults included.
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub meta: Meta,
    pub rows: Vec<ResultRow>,
}

impl ExperimentOutput {
    /// Rows for one metric, in point order.
    pub fn metric(&self, name: &str) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.metric == name).collect()
    }

    /// Value of `metric` at `point`.
    pub fn value(&self, point: &str, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.point == point && r.metric == metric)
            .map(|r| r.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rows hold only finite numbers and strings")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(w);
        for row in &self.rows {
            writer.serialize(row).map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// JSON writes one file; CSV writes the rows plus a `<path>.meta.json`
    /// sidecar holding the metadata.
    pub fn write(&self, target: &OutputTarget) -> Result<()> {
        match target.format {
            Format::Json => std::fs::write(&target.path, self.to_json())?,
            Format::Csv => {
                self.write_csv(std::fs::File::create(&target.path)?)?;
                let meta =
                    serde_json::to_string_pretty(&self.meta).expect("metadata is plain data");
                std::fs::write(sidecar_path(&target.path), meta)?;
            }
        }
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Validates the parameters of `spec`, runs it and writes the output if a
/// target is given.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let mut params = Params::new(&spec.params);
    let rows = match spec.name.as_str() {
        "recover-sources" => run_recover_sources(&RecoverSourcesParams::from_params(&mut params)?)?,
        "zipf" => run_zipf(&RepresentationParams::zipf_from(&mut params)?)?,
        "beta-binomial" => {
            run_beta_binomial(&RepresentationParams::beta_binomial_from(&mut params)?)?
        }
        "gfq" => run_gfq(&GfqParams::from_params(&mut params)?)?,
        "linear-vs-nonlinear" => {
            run_linear_vs_nonlinear(&LinearVsNonlinearParams::from_params(&mut params)?)?
        }
        "average-case" => run_average_case(&AverageCaseParams::from_params(&mut params)?)?,
        "compression" => run_compression(&CompressionParams::from_params(&mut params)?)?,
        "bound-statistics" => {
            run_bound_statistics(&BoundStatisticsParams::from_params(&mut params)?)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown experiment {other:?}; expected one of {}",
                EXPERIMENTS.join(", ")
            )))
        }
    };
    let resolved = params.finish()?;
    let seed = resolved
        .get("seed")
        .and_then(|s| s.parse().ok())
        .expect("every experiment resolves a seed");
    let output = ExperimentOutput {
        meta: Meta {
            experiment: spec.name.clone(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            params: resolved,
        },
        rows,
    };
    if let Some(target) = &spec.output {
        output.write(target)?;
    }
    Ok(output)
}
