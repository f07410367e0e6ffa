//! Text exchange format for QUBOs:
//! `{"n": N, "offset": c, "linear": [[i, v], ...], "quadratic": [[i, j, v], ...]}`
//! with `i < j`, zero-based. Solvers answer with `{"bits": [...], "energy": v}`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::qubo::QuboProblem;

/// Streams `qubo` in the exchange format. Low-rank couplings are written out
/// as explicit pairs.
pub fn write_exchange<W: Write>(qubo: &QuboProblem, out: W) -> io::Result<()> {
    let mut w = io::BufWriter::with_capacity(1 << 16, out);
    write!(w, "{{\"n\":{},\"offset\":", qubo.n_qubits())?;
    number(&mut w, qubo.offset())?;
    w.write_all(b",\"linear\":[")?;
    for (i, &v) in qubo.linear().iter().enumerate() {
        if i > 0 {
            w.write_all(b",")?;
        }
        write!(w, "[{i},")?;
        number(&mut w, v)?;
        w.write_all(b"]")?;
    }
    w.write_all(b"],\"quadratic\":[")?;
    for (k, (i, j, v)) in qubo.quadratic_terms().enumerate() {
        if k > 0 {
            w.write_all(b",")?;
        }
        write!(w, "[{i},{j},")?;
        number(&mut w, v)?;
        w.write_all(b"]")?;
    }
    w.write_all(b"]}\n")?;
    w.flush()
}

fn number<W: Write>(w: &mut W, v: f64) -> io::Result<()> {
    serde_json::to_writer(&mut *w, &v).map_err(io::Error::other)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExchangeFile {
    n: usize,
    offset: f64,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
}

/// Parses exchange text back into an explicit QUBO.
pub fn read_exchange(text: &str) -> Result<QuboProblem, SolverError> {
    let f: ExchangeFile =
        serde_json::from_str(text).map_err(|e| SolverError::MalformedExchange(e.to_string()))?;
    let mut linear = vec![0.0; f.n];
    for (i, v) in f.linear {
        *linear
            .get_mut(i)
            .ok_or_else(|| SolverError::MalformedExchange(format!("linear index {i} >= n = {}", f.n)))? += v;
    }
    QuboProblem::from_terms(f.n, f.offset, linear, f.quadratic)
        .map_err(|e| SolverError::MalformedExchange(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeResponse {
    pub bits: Vec<u8>,
    pub energy: f64,
}

/// Response body for a solved QUBO.
pub fn exchange_response(bits: &[u8], energy: f64) -> String {
    serde_json::to_string(&ExchangeResponse {
        bits: bits.to_vec(),
        energy,
    })
    .expect("response serializes")
}
