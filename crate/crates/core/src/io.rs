//! State interchange format.
//!
//! ```json
//! {"dims":[2,3],"matrix":[[[1.0e0,0.0e0], ...], ...],"meta":{"family":"tura","params":{"N":3},"tau":1.0e-9}}
//! ```
//!
//! The writer is canonical: every real is printed with 17 significant digits
//! and the layout is fixed, so writing a parsed canonical file reproduces it
//! byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bipartite::BipartiteState;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};

/// Provenance attached to a state file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl Meta {
    pub fn new(family: &str, params: Value, tau: f64) -> Self {
        Self {
            family: Some(family.to_string()),
            params: Some(params),
            tau: Some(tau),
        }
    }
}

/// A state together with its metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub state: BipartiteState,
    pub meta: Option<Meta>,
}

#[derive(Deserialize)]
struct RawFile {
    dims: [usize; 2],
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    meta: Option<Meta>,
}

/// Parses and validates (shape, finiteness, Hermiticity).
pub fn parse_state(text: &str) -> Result<StateFile> {
    let raw: RawFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("state file: {e}")))?;
    let [m, n] = raw.dims;
    let d = m * n;
    if raw.matrix.len() != d || raw.matrix.iter().any(|row| row.len() != d) {
        return Err(Error::Format(format!(
            "dims [{m}, {n}] require a {d}x{d} matrix"
        )));
    }
    let data: Vec<C64> = raw
        .matrix
        .iter()
        .flat_map(|row| row.iter().map(|&[re, im]| C64::new(re, im)))
        .collect();
    let matrix = ComplexMatrix::from_vec(d, d, data)?;
    let state = BipartiteState::new(m, n, matrix)?;
    Ok(StateFile {
        state,
        meta: raw.meta,
    })
}

fn push_real(out: &mut String, x: f64) {
    // `{:e}` never prints a bare integer, so the text stays a JSON float.
    let _ = write!(out, "{x:.16e}");
}

/// Canonical text form.
pub fn write_state(state: &BipartiteState, meta: Option<&Meta>) -> Result<String> {
    let d = state.dim();
    let m = state.matrix();
    let mut out = String::with_capacity(d * d * 52 + 64);
    let _ = writeln!(out, "{{\"dims\":[{},{}],\"matrix\":[", state.dim_a(), state.dim_b());
    for i in 0..d {
        out.push_str("  [");
        for j in 0..d {
            if j > 0 {
                out.push(',');
            }
            out.push('[');
            push_real(&mut out, m[(i, j)].re);
            out.push(',');
            push_real(&mut out, m[(i, j)].im);
            out.push(']');
        }
        out.push(']');
        if i + 1 < d {
            out.push(',');
        }
        out.push('\n');
    }
    out.push(']');
    if let Some(meta) = meta {
        out.push_str(",\"meta\":{");
        let mut first = true;
        let mut sep = |out: &mut String| {
            if !first {
                out.push(',');
            }
            first = false;
        };
        if let Some(f) = &meta.family {
            sep(&mut out);
            let _ = write!(out, "\"family\":{}", serde_json::to_string(f)?);
        }
        if let Some(p) = &meta.params {
            sep(&mut out);
            let _ = write!(out, "\"params\":{}", serde_json::to_string(p)?);
        }
        if let Some(t) = meta.tau {
            sep(&mut out);
            out.push_str("\"tau\":");
            push_real(&mut out, t);
        }
        out.push('}');
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn read_state_file(path: &Path) -> Result<StateFile> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn write_state_file(path: &Path, state: &BipartiteState, meta: Option<&Meta>) -> Result<()> {
    std::fs::write(path, write_state(state, meta)?)?;
    Ok(())
}

/// Serde adapter: complex vectors as `[[re, im], ...]`.
pub mod complex_vec {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}
