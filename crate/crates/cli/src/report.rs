//! Report envelopes and byte emission. Floats are written in shortest
//! round-trip form, so every value keeps full double precision.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use uncstates_core::C64;

use crate::args::Format;

/// Header written at the top of every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Seed of the ChaCha8 streams behind randomized suites.
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Meta { tool: "uncstates", version: env!("CARGO_PKG_VERSION"), command, seed }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

/// What a command produced and whether its checks passed.
pub struct Outcome {
    pub bytes: Vec<u8>,
    /// Set when a check failed; the bytes are still written.
    pub failure: Option<String>,
}

impl Outcome {
    pub fn ok(bytes: Vec<u8>) -> Self {
        Outcome { bytes, failure: None }
    }

    pub fn checked(bytes: Vec<u8>, verified: bool, failure: impl FnOnce() -> String) -> Self {
        Outcome { bytes, failure: (!verified).then(failure) }
    }
}

pub fn json<T: Serialize>(meta: &Meta, body: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&Envelope { meta, body }).context("serializing report")?;
    out.push(b'\n');
    Ok(out)
}

pub fn csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).context("serializing CSV row")?;
    }
    w.into_inner().context("flushing CSV")
}

/// Chooses the output format: an explicit flag must be supported, a
/// configured one is used only where it applies.
pub fn pick_format(
    flag: Option<Format>,
    configured: Option<Format>,
    default: Format,
    allowed: &[Format],
) -> Result<Format> {
    if let Some(f) = flag {
        if !allowed.contains(&f) {
            let names: Vec<String> = allowed.iter().map(Format::to_string).collect();
            bail!("format {f} is not available here (supported: {})", names.join(", "));
        }
        return Ok(f);
    }
    Ok(configured.filter(|f| allowed.contains(f)).unwrap_or(default))
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file.
pub fn json_arg(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return serde_json::from_str(t).context("parsing inline JSON");
    }
    read_json(Path::new(arg))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse<T: for<'de> Deserialize<'de>>(value: Value, what: &str) -> Result<T> {
    serde_json::from_value(value).with_context(|| format!("invalid {what}"))
}

/// A complex number given as `x` or `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> C64 {
        match z {
            Cx::Real(x) => C64::new(x, 0.0),
            Cx::Pair([re, im]) => C64::new(re, im),
        }
    }
}

/// `re,im` or `re`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().with_context(|| format!("not a number: {p:?}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => bail!("expected re,im, got {s:?}"),
    }
}

pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}
