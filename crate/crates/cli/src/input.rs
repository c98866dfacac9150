use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use fica::pmf::empirical_pmf;
use fica::{JointPMF, SampleSet};

/// Contents of an input file: raw samples or an explicit pmf.
pub enum Source {
    Samples(SampleSet),
    Pmf(JointPMF),
}

impl Source {
    pub fn pmf(&self) -> Result<JointPMF> {
        Ok(match self {
            Source::Samples(s) => empirical_pmf(s)?,
            Source::Pmf(p) => p.clone(),
        })
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .context("reading standard input")?;
        Ok(buf)
    } else {
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_bytes(path)?)
        .with_context(|| format!("{} is not UTF-8 text", path.display()))
}

/// Sample files start with a three-number header, pmf files with two.
pub fn read_source(path: &Path) -> Result<Source> {
    let text = read_text(path)?;
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .with_context(|| format!("{} is empty", path.display()))?;
    match header.split_whitespace().count() {
        3 => Ok(Source::Samples(SampleSet::from_text(&text)?)),
        2 => Ok(Source::Pmf(JointPMF::from_text(&text)?)),
        k => bail!(
            "{}: header has {k} fields, expected `q d n` or `q d`",
            path.display()
        ),
    }
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    match read_source(path)? {
        Source::Samples(s) => Ok(s),
        Source::Pmf(_) => bail!(
            "{} is a pmf file; this command needs samples",
            path.display()
        ),
    }
}

/// Writes to `path`, or to standard output when there is none.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}
