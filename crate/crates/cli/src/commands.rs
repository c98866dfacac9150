use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use fica::coding::{self, CompressedBlob, DictionaryCost, Mode, RateReport};
use fica::experiments::{self, ExperimentSpec, OutputTarget};
use fica::ica::{self, BloGLICAConfig, EntropyTable, LinearICAResult};
use fica::pmf::{self, Draws};
use fica::rng::seeded;
use fica::{FieldMatrix, JointPMF, PrimeField, SampleSet};
use serde::Serialize;
use serde_json::json;

use crate::input::{read_bytes, read_samples, read_source, write_output, Source};
use crate::{BlockArgs, Cli, CodecMode, Command, Format, GenSource};

pub fn run(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed.unwrap_or(0);
    let out = Output {
        format: cli.format,
        path: cli.out.as_deref(),
    };
    match cli.command {
        Command::Bound(args) => bound(&read_source(args.path())?.pmf()?, out)?,
        Command::Glica {
            input,
            mixing_matrix,
        } => {
            let p = read_source(input.path())?.pmf()?;
            let r = ica::glica(&p)?;
            write_matrix(mixing_matrix.as_deref(), &r.w)?;
            out.report(&AlgorithmReport::new("glica", &p, &r, None))?;
        }
        Command::Bloglica {
            input,
            blocks,
            mixing_matrix,
        } => {
            let source = read_source(input.path())?;
            let cfg = block_config(blocks, seed);
            let (r, joint) = match &source {
                Source::Samples(s) => (ica::bloglica_samples(s, cfg)?, None),
                Source::Pmf(p) => (ica::bloglica(p, cfg)?, Some(p.entropy())),
            };
            write_matrix(mixing_matrix.as_deref(), &r.result.w)?;
            let (field, d) = (r.result.w.field(), r.result.w.nrows());
            let mut report = AlgorithmReport::from_parts("bloglica", field, d, joint, &r.result);
            report.trace = Some(r.trace);
            out.report(&report)?;
        }
        Command::Orderperm(args) => {
            let p = read_source(args.path())?.pmf()?;
            let r = ica::order_permutation(&p);
            let scalars = vec![
                ("objective".to_string(), r.objective),
                ("total_correlation".to_string(), r.total_correlation),
                ("joint_entropy".to_string(), p.entropy()),
            ];
            let value = json!({
                "algorithm": "order-permutation",
                "q": p.field().order(),
                "d": p.dim(),
                "objective": r.objective,
                "total_correlation": r.total_correlation,
                "joint_entropy": p.entropy(),
                "assignment": r.assignment,
            });
            out.emit(&value, &scalars)?;
        }
        Command::Gen { source } => {
            let samples = generate(source, seed)?;
            write_output(out.path, samples.to_text().as_bytes())?;
        }
        Command::Compress {
            input,
            mode,
            blocks,
        } => {
            let Some(path) = out.path else {
                bail!(fica::Error::Config(
                    "compress writes binary data and needs --out".into()
                ));
            };
            let s = read_samples(input.path())?;
            let blob = coding::compress(&s, codec_mode(mode, blocks, seed))?;
            std::fs::write(path, blob.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            let report = blob.rate_report(mode_name(mode))?;
            eprintln!(
                "{} bytes, {:.4} bits/symbol",
                blob.len(),
                report.bits_per_symbol
            );
        }
        Command::Decompress { input } => {
            let blob = CompressedBlob::from_bytes(read_bytes(input.path())?);
            let s = coding::decompress(&blob)?;
            write_output(out.path, s.to_text().as_bytes())?;
        }
        Command::RateReport {
            input,
            blocks,
            realistic_dictionary,
            all,
        } => {
            let s = read_samples(input.path())?;
            out.rate_reports(&rate_reports(&s, blocks, seed, realistic_dictionary, all)?)?;
        }
        Command::Experiment {
            name,
            d,
            q,
            n,
            blocks,
            params,
        } => {
            let mut map: BTreeMap<String, String> = params.into_iter().collect();
            for (key, value) in [("d", d), ("q", q), ("n", n), ("blocks", blocks)] {
                if let Some(v) = value {
                    map.insert(key.into(), v);
                }
            }
            if let Some(s) = cli.seed {
                map.insert("seed".into(), s.to_string());
            }
            let format = match out.format {
                Format::Csv => experiments::Format::Csv,
                Format::Json => experiments::Format::Json,
            };
            let spec = ExperimentSpec {
                name,
                params: map,
                output: out.path.map(|p| OutputTarget {
                    path: p.to_path_buf(),
                    format,
                }),
            };
            let result = experiments::run(&spec)?;
            if out.path.is_none() {
                match out.format {
                    Format::Json => println!("{}", result.to_json()),
                    Format::Csv => result.write_csv(std::io::stdout().lock())?,
                }
            }
        }
        Command::Verify { criterion } => return verify(&criterion, seed, out),
    }
    Ok(ExitCode::SUCCESS)
}

struct Output<'a> {
    format: Format,
    path: Option<&'a Path>,
}

impl Output<'_> {
    /// JSON prints `value`; CSV prints `metric,value` lines.
    fn emit(&self, value: &serde_json::Value, scalars: &[(String, f64)]) -> Result<()> {
        let text = match self.format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(value)?),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["metric", "value"])?;
                for (k, v) in scalars {
                    w.write_record([k.as_str(), &v.to_string()])?;
                }
                String::from_utf8(w.into_inner()?)?
            }
        };
        write_output(self.path, text.as_bytes())
    }

    fn report(&self, r: &AlgorithmReport) -> Result<()> {
        self.emit(&serde_json::to_value(r)?, &r.scalars())
    }

    fn rate_reports(&self, reports: &[RateReport]) -> Result<()> {
        let text = match self.format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(reports)?),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in reports {
                    w.serialize(r)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
        };
        write_output(self.path, text.as_bytes())
    }
}

#[derive(Serialize)]
struct AlgorithmReport {
    algorithm: &'static str,
    q: u32,
    d: usize,
    objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    joint_entropy: Option<f64>,
    rows_examined: usize,
    component_entropies: Vec<f64>,
    w: Vec<Vec<u16>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<f64>>,
}

impl AlgorithmReport {
    fn new(
        algorithm: &'static str,
        p: &JointPMF,
        r: &LinearICAResult,
        trace: Option<Vec<f64>>,
    ) -> Self {
        let mut out = Self::from_parts(algorithm, p.field(), p.dim(), Some(p.entropy()), r);
        out.trace = trace;
        out
    }

    fn from_parts(
        algorithm: &'static str,
        field: PrimeField,
        d: usize,
        joint_entropy: Option<f64>,
        r: &LinearICAResult,
    ) -> Self {
        AlgorithmReport {
            algorithm,
            q: field.order(),
            d,
            objective: r.objective,
            lower_bound: r.lower_bound,
            joint_entropy,
            rows_examined: r.rows_examined,
            component_entropies: r.component_entropies.clone(),
            w: r.w.rows().map(<[u16]>::to_vec).collect(),
            trace: None,
        }
    }

    fn scalars(&self) -> Vec<(String, f64)> {
        let mut out = vec![("objective".to_string(), self.objective)];
        if let Some(b) = self.lower_bound {
            out.push(("lower_bound".into(), b));
        }
        if let Some(h) = self.joint_entropy {
            out.push(("joint_entropy".into(), h));
        }
        out.push(("rows_examined".into(), self.rows_examined as f64));
        if let Some(t) = &self.trace {
            out.push(("iterations".into(), (t.len() - 1) as f64));
        }
        for (j, h) in self.component_entropies.iter().enumerate() {
            out.push((format!("entropy_{j}"), *h));
        }
        out
    }
}

fn bound(p: &JointPMF, out: Output<'_>) -> Result<()> {
    let table = EntropyTable::build(p)?;
    let bound = table.lower_bound();
    let smallest: Vec<f64> = table.entropies().iter().take(p.dim()).copied().collect();
    let value = json!({
        "q": p.field().order(),
        "d": p.dim(),
        "lower_bound": bound,
        "joint_entropy": p.entropy(),
        "smallest_entropies": smallest,
    });
    let scalars = vec![
        ("lower_bound".to_string(), bound),
        ("joint_entropy".to_string(), p.entropy()),
    ];
    out.emit(&value, &scalars)
}

fn write_matrix(path: Option<&Path>, w: &FieldMatrix) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, w.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn block_config(args: BlockArgs, seed: u64) -> BloGLICAConfig {
    BloGLICAConfig {
        blocks: args.blocks,
        max_iter: args.max_iter,
        epsilon: args.epsilon,
        seed,
    }
}

fn codec_mode(mode: CodecMode, blocks: BlockArgs, seed: u64) -> Mode {
    match mode {
        CodecMode::None => Mode::None,
        CodecMode::Glica => Mode::Glica,
        CodecMode::Bloglica => Mode::BloGlica(block_config(blocks, seed)),
    }
}

fn mode_name(mode: CodecMode) -> &'static str {
    match mode {
        CodecMode::None => "codec-identity",
        CodecMode::Glica => "codec-glica",
        CodecMode::Bloglica => "codec-bloglica",
    }
}

fn rate_reports(
    s: &SampleSet,
    blocks: BlockArgs,
    seed: u64,
    realistic: bool,
    all: bool,
) -> Result<Vec<RateReport>> {
    let cost = if realistic {
        DictionaryCost::Canonical
    } else {
        DictionaryCost::Words
    };
    let mut reports = vec![
        coding::huffman_dictionary_rate(s, cost),
        coding::marginal_rate_no_transform(s),
    ];
    let modes: &[CodecMode] = if all {
        &[CodecMode::None, CodecMode::Glica, CodecMode::Bloglica]
    } else {
        &[CodecMode::Glica]
    };
    for &mode in modes {
        // GLICA needs the full joint table; skip it when that is too large
        // and keep the other schemes.
        match coding::compress(s, codec_mode(mode, blocks, seed)) {
            Ok(blob) => reports.push(blob.rate_report(mode_name(mode))?),
            Err(fica::Error::Capacity(msg)) if mode == CodecMode::Glica => {
                eprintln!("skipping {}: {msg}", mode_name(mode));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(reports)
}

fn random_map(draws: &Draws, field: PrimeField, d: usize, seed: u64) -> Result<SampleSet> {
    let mut rng = seeded(seed.wrapping_add(1));
    let assignment = pmf::random_assignment(draws.pmf.len(), &mut rng);
    Ok(draws.to_samples(field, d, &assignment)?)
}

fn symbol_count(field: PrimeField, d: usize) -> Result<usize> {
    Ok(fica::Capacity::default().cells(field, d)?)
}

fn generate(source: GenSource, seed: u64) -> Result<SampleSet> {
    let mut rng = seeded(seed);
    match source {
        GenSource::Zipf { q, d, n, s } => {
            let field = PrimeField::new(q)?;
            let draws = pmf::sample_zipf(symbol_count(field, d)?, s, n, &mut rng)?;
            random_map(&draws, field, d, seed)
        }
        GenSource::Betabin { d, n, a, b } => {
            let field = PrimeField::BINARY;
            let draws = pmf::sample_beta_binomial(symbol_count(field, d)?, a, b, n, &mut rng)?;
            random_map(&draws, field, d, seed)
        }
        GenSource::Bernoulli {
            d,
            n,
            p,
            mix,
            mixing_matrix,
        } => {
            let params = bernoulli_params(&p, d)?;
            let sources = pmf::sample_bernoulli_product(&params, n, &mut rng)?;
            if !mix && mixing_matrix.is_none() {
                return Ok(sources);
            }
            let b = FieldMatrix::random_nontrivial_invertible(d, PrimeField::BINARY, &mut rng)?;
            write_matrix(mixing_matrix.as_deref(), &b)?;
            Ok(sources.transform(&b)?)
        }
    }
}

fn bernoulli_params(text: &str, d: usize) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| fica::Error::Config(format!("{t:?} is not a probability")))
        })
        .collect::<std::result::Result<Vec<f64>, _>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; d]),
        k if k == d => Ok(values),
        k => bail!(fica::Error::Config(format!(
            "--p has {k} values, expected 1 or {d}"
        ))),
    }
}

fn verify(ids: &[u8], seed: u64, out: Output<'_>) -> Result<ExitCode> {
    let criteria: Vec<&fica::verify::Criterion> = if ids.is_empty() {
        fica::verify::CRITERIA.iter().collect()
    } else {
        ids.iter()
            .map(|&id| {
                fica::verify::criterion(id)
                    .ok_or_else(|| fica::Error::Config(format!("no criterion {id}")))
            })
            .collect::<std::result::Result<_, _>>()?
    };
    let mut outcomes = Vec::with_capacity(criteria.len());
    for c in criteria {
        let outcome = c.run(seed);
        if out.format == Format::Csv {
            println!("{outcome}");
        }
        outcomes.push(outcome);
    }
    if out.format == Format::Json {
        write_output(
            out.path,
            format!("{}\n", serde_json::to_string_pretty(&outcomes)?).as_bytes(),
        )?;
    }
    Ok(if outcomes.iter().all(|o| o.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
