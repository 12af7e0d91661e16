//! JSON file formats for distributions and distinguishers.
//!
//! * dense: `{"n": 3, "probs": [...]}`, index `x` in natural binary order
//! * joint: `{"n": 1, "m": 1, "probs": [...]}`, row-major over `(x, z)` with `z` fastest
//! * sparse: `{"n": 64, "support": [[point, mass], ...]}`
//! * distinguisher: `{"n": 3, "values": [...]}` with every value in `[0, 1]`
//!
//! Masses are written with 17 significant digits, so reading a written file gives
//! back the same bits.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use pseudoentropy::dist::{MAX_BITS, MAX_SPARSE_BITS};
use pseudoentropy::oracle::RealDistinguisher;
use pseudoentropy::{Distribution, JointDistribution, SparseDistribution};
use serde::Deserialize;

/// A malformed input file, located down to the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub file: PathBuf,
    /// Path of the field inside the document, `.` for the whole document.
    pub field: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: field `{}`: {}", self.file.display(), self.field, self.message)
    }
}

impl std::error::Error for InputError {}

/// Any distribution file.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionFile {
    Dense(Distribution),
    Sparse(SparseDistribution),
    Joint(JointDistribution),
}

impl DistributionFile {
    pub fn kind(&self) -> &'static str {
        match self {
            DistributionFile::Dense(_) => "dense",
            DistributionFile::Sparse(_) => "sparse",
            DistributionFile::Joint(_) => "joint",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    n: u32,
    m: Option<u32>,
    probs: Option<Vec<f64>>,
    support: Option<Vec<(u64, f64)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistinguisher {
    n: u32,
    values: Vec<f64>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, file: &Path) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| InputError {
        file: file.to_path_buf(),
        field: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    de.end().map_err(|e| InputError { file: file.to_path_buf(), field: ".".into(), message: e.to_string() })?;
    Ok(value)
}

fn check_masses(masses: impl Iterator<Item = f64>, field: &str, fail: &impl Fn(String, String) -> InputError) -> Result<(), InputError> {
    for (i, p) in masses.enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(fail(format!("{field}[{i}]"), format!("mass must be finite and non-negative, got {p}")));
        }
    }
    Ok(())
}

/// Parses a distribution document; `file` only labels errors.
pub fn parse_distribution(text: &str, file: &Path) -> Result<DistributionFile, InputError> {
    let raw: RawDistribution = parse(text, file)?;
    let fail = |field: String, message: String| InputError { file: file.to_path_buf(), field, message };
    match (raw.m, raw.probs, raw.support) {
        (_, Some(_), Some(_)) => Err(fail(".".into(), "give either `probs` or `support`, not both".into())),
        (_, None, None) => Err(fail(".".into(), "missing field `probs` (or `support` for sparse files)".into())),
        (Some(_), None, Some(_)) => Err(fail("m".into(), "joint files take `probs`, not `support`".into())),
        (None, None, Some(support)) => {
            if raw.n == 0 || raw.n > MAX_SPARSE_BITS {
                return Err(fail("n".into(), format!("bit-width {} outside 1..={MAX_SPARSE_BITS}", raw.n)));
            }
            for (i, &(point, mass)) in support.iter().enumerate() {
                if raw.n < 64 && point >> raw.n != 0 {
                    return Err(fail(format!("support[{i}][0]"), format!("point {point} does not fit in {} bits", raw.n)));
                }
                check_masses(std::iter::once(mass), &format!("support[{i}]"), &|_, m| fail(format!("support[{i}][1]"), m))?;
            }
            SparseDistribution::new(raw.n, support).map(DistributionFile::Sparse).map_err(|e| fail("support".into(), e.to_string()))
        }
        (m, Some(probs), None) => {
            let m_bits = m.unwrap_or(0);
            let total = raw.n.checked_add(m_bits).filter(|&t| t <= MAX_BITS);
            let Some(total) = total else {
                let field = if raw.n > MAX_BITS || m.is_none() { "n" } else { "m" };
                return Err(fail(field.into(), format!("n + m must be at most {MAX_BITS} for dense files")));
            };
            if raw.n == 0 {
                return Err(fail("n".into(), "bit-width must be positive".into()));
            }
            if probs.len() != 1usize << total {
                return Err(fail("probs".into(), format!("expected 2^{total} = {} masses, got {}", 1usize << total, probs.len())));
            }
            check_masses(probs.iter().copied(), "probs", &fail)?;
            let built = match m {
                Some(m) => JointDistribution::new(raw.n, m, probs).map(DistributionFile::Joint),
                None => Distribution::new(raw.n, probs).map(DistributionFile::Dense),
            };
            built.map_err(|e| fail("probs".into(), e.to_string()))
        }
    }
}

/// Parses a distinguisher document.
pub fn parse_distinguisher(text: &str, file: &Path) -> Result<RealDistinguisher, InputError> {
    let raw: RawDistinguisher = parse(text, file)?;
    let fail = |field: String, message: String| InputError { file: file.to_path_buf(), field, message };
    if raw.n == 0 || raw.n > MAX_BITS {
        return Err(fail("n".into(), format!("bit-width {} outside 1..={MAX_BITS}", raw.n)));
    }
    if raw.values.len() != 1usize << raw.n {
        return Err(fail("values".into(), format!("expected 2^{} = {} values, got {}", raw.n, 1usize << raw.n, raw.values.len())));
    }
    for (i, v) in raw.values.iter().enumerate() {
        if !(0.0..=1.0).contains(v) {
            return Err(fail(format!("values[{i}]"), format!("value must lie in [0, 1], got {v}")));
        }
    }
    RealDistinguisher::new(raw.n, raw.values).map_err(|e| fail("values".into(), e.to_string()))
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError { file: path.to_path_buf(), field: ".".into(), message: e.to_string() })
}

pub fn read_distribution(path: &Path) -> Result<DistributionFile, InputError> {
    parse_distribution(&read(path)?, path)
}

pub fn read_distinguisher(path: &Path) -> Result<RealDistinguisher, InputError> {
    parse_distinguisher(&read(path)?, path)
}

/// 17 significant digits in JSON-compatible scientific notation.
fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

fn list(out: &mut String, values: impl Iterator<Item = String>) {
    out.push('[');
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&v);
    }
    out.push(']');
}

pub fn format_distribution(file: &DistributionFile) -> String {
    let mut out = String::new();
    match file {
        DistributionFile::Dense(x) => {
            write!(out, "{{\"n\": {}, \"probs\": ", x.bits()).unwrap();
            list(&mut out, x.probs().iter().map(|&p| exact(p)));
        }
        DistributionFile::Joint(xz) => {
            write!(out, "{{\"n\": {}, \"m\": {}, \"probs\": ", xz.x_bits(), xz.z_bits()).unwrap();
            list(&mut out, xz.probs().iter().map(|&p| exact(p)));
        }
        DistributionFile::Sparse(x) => {
            write!(out, "{{\"n\": {}, \"support\": ", x.bits()).unwrap();
            list(&mut out, x.entries().iter().map(|&(point, mass)| format!("[{point}, {}]", exact(mass))));
        }
    }
    out.push_str("}\n");
    out
}

pub fn format_distinguisher(d: &RealDistinguisher) -> String {
    let mut out = format!("{{\"n\": {}, \"values\": ", d.bits());
    list(&mut out, d.values().iter().map(|&v| exact(v)));
    out.push_str("}\n");
    out
}

pub fn write_distribution(path: &Path, file: &DistributionFile) -> std::io::Result<()> {
    std::fs::write(path, format_distribution(file))
}

/// Support size of any file, for reporting.
pub fn support_len(file: &DistributionFile) -> usize {
    match file {
        DistributionFile::Dense(x) => x.probs().iter().filter(|&&p| p > 0.0).count(),
        DistributionFile::Sparse(x) => x.entries().len(),
        DistributionFile::Joint(xz) => xz.probs().iter().filter(|&&p| p > 0.0).count(),
    }
}

/// Bit-width of the `X` part.
pub fn x_bits(file: &DistributionFile) -> u32 {
    match file {
        DistributionFile::Dense(x) => x.bits(),
        DistributionFile::Sparse(x) => x.bits(),
        DistributionFile::Joint(xz) => xz.x_bits(),
    }
}
