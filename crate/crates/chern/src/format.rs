//! Text format for curvature tensors.
//!
//! ```json
//! {
//!   "n": 2,
//!   "r": 2,
//!   "ckl": true,
//!   "entries": [
//!     [1, 1, 1, 1, 2.0, 0.0],
//!     [1, 2, 2, 1, 1.0, 0.0]
//!   ]
//! }
//! ```
//!
//! Records are `[i, j, alpha, beta, re, im]` with 1-based indices. Unlisted
//! components are zero, and a record whose Hermitian partner
//! `(j, i, beta, alpha)` is absent also sets the partner to the conjugate.
//! The writer emits only the lexicographically smaller index of each
//! partner pair, so files written here always round-trip bit for bit.

use std::fmt::Write as _;

use chern_core::{Complex64, CurvatureTensor};
use serde::Deserialize;

use crate::Error;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    n: usize,
    r: usize,
    #[serde(default)]
    ckl: bool,
    entries: Vec<Record>,
}

#[derive(Deserialize)]
struct Record(usize, usize, usize, usize, f64, f64);

const FIELDS: [&str; 4] = ["i", "j", "alpha", "beta"];

fn entry_error(index: usize, field: &'static str, message: String) -> Error {
    Error::Entry {
        index: index + 1,
        field,
        message,
    }
}

/// Parses and validates a tensor file.
pub fn parse_tensor(text: &str) -> Result<CurvatureTensor, Error> {
    let raw: RawFile = serde_json::from_str(text).map_err(Error::Syntax)?;
    if raw.n == 0 || raw.r == 0 {
        return Err(Error::Invalid(chern_core::Error::Shape(format!(
            "dimensions must be positive, got n={}, r={}",
            raw.n, raw.r
        ))));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut entries = vec![zero; raw.n * raw.n * raw.r * raw.r];
    let mut listed = vec![false; entries.len()];
    let index = |i: usize, j: usize, a: usize, b: usize| ((i * raw.n + j) * raw.r + a) * raw.r + b;
    let mut zero_based = Vec::with_capacity(raw.entries.len());
    for (e, rec) in raw.entries.iter().enumerate() {
        let idx = [rec.0, rec.1, rec.2, rec.3];
        for (slot, (&v, field)) in idx.iter().zip(FIELDS).enumerate() {
            let hi = if slot < 2 { raw.n } else { raw.r };
            if v == 0 || v > hi {
                return Err(entry_error(e, field, format!("index {v} outside 1..={hi}")));
            }
        }
        if !rec.4.is_finite() {
            return Err(entry_error(e, "re", format!("non-finite value {}", rec.4)));
        }
        if !rec.5.is_finite() {
            return Err(entry_error(e, "im", format!("non-finite value {}", rec.5)));
        }
        let (i, j, a, b) = (rec.0 - 1, rec.1 - 1, rec.2 - 1, rec.3 - 1);
        let at = index(i, j, a, b);
        if listed[at] {
            return Err(entry_error(e, "i", format!("duplicate component ({}, {}, {}, {})", rec.0, rec.1, rec.2, rec.3)));
        }
        listed[at] = true;
        entries[at] = Complex64::new(rec.4, rec.5);
        zero_based.push((i, j, a, b));
    }
    for &(i, j, a, b) in &zero_based {
        let partner = index(j, i, b, a);
        if !listed[partner] {
            entries[partner] = entries[index(i, j, a, b)].conj();
        }
    }
    CurvatureTensor::new(raw.n, raw.r, entries, raw.ckl).map_err(Error::Invalid)
}

/// Reads a tensor file from disk.
pub fn read_tensor(path: &std::path::Path) -> Result<CurvatureTensor, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_tensor(&text).map_err(|e| e.in_file(path))
}

fn number(x: f64) -> String {
    // serde_json prints the shortest representation that parses back exactly.
    serde_json::to_string(&x).expect("finite float")
}

/// Canonical text form: nonzero components, smaller index of each partner
/// pair, lexicographic order.
pub fn write_tensor(t: &CurvatureTensor) -> String {
    let (n, r) = (t.n(), t.r());
    let mut out = String::new();
    let _ = write!(out, "{{\n  \"n\": {n},\n  \"r\": {r},\n  \"ckl\": {},\n  \"entries\": [", t.ckl());
    let mut records = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for a in 0..r {
                for b in 0..r {
                    if (i, j, a, b) > (j, i, b, a) {
                        continue;
                    }
                    let z = t.get(i, j, a, b);
                    if z == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    records.push(format!(
                        "    [{}, {}, {}, {}, {}, {}]",
                        i + 1,
                        j + 1,
                        a + 1,
                        b + 1,
                        number(z.re),
                        number(z.im)
                    ));
                }
            }
        }
    }
    if records.is_empty() {
        out.push_str("]\n}\n");
    } else {
        out.push('\n');
        out.push_str(&records.join(",\n"));
        out.push_str("\n  ]\n}\n");
    }
    out
}
