use std::io;
use std::time::{Duration, Instant};

use super::{write_exchange, ExchangeResponse, SolveOutcome};
use crate::error::SolverError;
use crate::qubo::{BitAssignment, QuboProblem};

/// Posts the QUBO in exchange format to `endpoint` and reads back one
/// sample. The returned energy is ignored in favour of a local evaluation.
pub fn solve_remote(qubo: &QuboProblem, endpoint: &str, timeout: Duration) -> Result<SolveOutcome, SolverError> {
    let mut body = Vec::new();
    write_exchange(qubo, &mut body)?;
    let start = Instant::now();
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let response = agent
        .post(endpoint)
        .set("Content-Type", "application/json")
        .send_bytes(&body)
        .map_err(|e| transport_error(endpoint, timeout, e))?;
    let text = response.into_string().map_err(|e| {
        if e.kind() == io::ErrorKind::TimedOut || e.kind() == io::ErrorKind::WouldBlock {
            SolverError::Timeout(timeout)
        } else {
            SolverError::Network {
                endpoint: endpoint.to_string(),
                message: e.to_string(),
            }
        }
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    let parsed: ExchangeResponse =
        serde_json::from_str(&text).map_err(|e| SolverError::MalformedResponse(e.to_string()))?;
    if parsed.bits.len() != qubo.n_qubits() {
        return Err(SolverError::MalformedResponse(format!(
            "expected {} bits, got {}",
            qubo.n_qubits(),
            parsed.bits.len()
        )));
    }
    if let Some(b) = parsed.bits.iter().find(|&&b| b > 1) {
        return Err(SolverError::MalformedResponse(format!("bit value {b} is not 0 or 1")));
    }
    let bits = BitAssignment(parsed.bits);
    let energy = qubo.evaluate(&bits);
    Ok(SolveOutcome {
        bits,
        energy,
        samples: 1,
        search_time_s: elapsed,
    })
}

fn transport_error(endpoint: &str, timeout: Duration, e: ureq::Error) -> SolverError {
    match e {
        ureq::Error::Status(code, r) => SolverError::Network {
            endpoint: endpoint.to_string(),
            message: format!("HTTP {code} {}", r.status_text()),
        },
        ureq::Error::Transport(t) => {
            let timed_out = std::error::Error::source(&t)
                .and_then(|s| s.downcast_ref::<io::Error>())
                .is_some_and(|io| matches!(io.kind(), io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock));
            if timed_out {
                SolverError::Timeout(timeout)
            } else {
                SolverError::Network {
                    endpoint: endpoint.to_string(),
                    message: t.to_string(),
                }
            }
        }
    }
}
