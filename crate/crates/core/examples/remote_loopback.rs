//! Runs the six-member truss through the remote solver. A small HTTP server
//! on a loopback port plays the part of the sampling service: it reads the
//! exchange JSON, solves it exhaustively and answers with bits and energy.
//!
//!     cargo run --release --example remote_loopback

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::time::Duration;

use anneal_topo::model::build_benchmark;
use anneal_topo::solvers::{exchange_response, read_exchange, solve_exhaustive};
use anneal_topo::{run_annealing_optimization, RunConfig, SolverChoice};

fn serve(listener: TcpListener) {
    for stream in listener.incoming() {
        let Ok(mut stream) = stream else { continue };
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut len = 0;
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                break;
            }
            if let Some((k, v)) = line.split_once(':') {
                if k.eq_ignore_ascii_case("content-length") {
                    len = v.trim().parse().unwrap_or(0);
                }
            }
        }
        let mut body = vec![0; len];
        if reader.read_exact(&mut body).is_err() {
            continue;
        }
        let (status, reply) = match read_exchange(&String::from_utf8_lossy(&body)).and_then(|q| solve_exhaustive(&q)) {
            Ok(best) => ("200 OK", exchange_response(&best.bits, best.energy)),
            Err(e) => ("400 Bad Request", format!("{{\"error\": \"{e}\"}}")),
        };
        let _ = write!(
            stream,
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
            reply.len()
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let endpoint = format!("http://{}/solve", listener.local_addr()?);
    std::thread::spawn(move || serve(listener));
    println!("sampler listening at {endpoint}");

    let problem = build_benchmark("truss6")?;
    let base = RunConfig::for_benchmark("truss6").unwrap();
    let remote = run_annealing_optimization(
        &problem,
        &base.clone().with_solver(SolverChoice::Remote { endpoint, timeout: Duration::from_secs(10) }),
    )?;
    let local = run_annealing_optimization(&problem, &base.exhaustive())?;

    println!("remote:     {} iterations, compliance {:.6e}", remote.iterations, remote.final_objective);
    println!("exhaustive: {} iterations, compliance {:.6e}", local.iterations, local.final_objective);
    println!("same design: {}", remote.final_state.rho == local.final_state.rho);
    Ok(())
}
