//! Run bundles: convergence log, timing log, summary, topology snapshots.
//!
//! `convergence.csv` holds only values that are reproducible from the seed;
//! wall-clock timings go to `timing.csv`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::driver::{IterationRecord, RunResult};
use crate::model::{Geometry, GridMesh, Problem, TrussModel};

pub const CONVERGENCE_HEADER: &str = "iter,objective,volume_ratio,energy,n_cap,n_floor";
pub const TIMING_HEADER: &str = "iter,solver_time_s,fem_time_s";

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn convergence_csv(history: &[IterationRecord]) -> String {
    let mut s = String::from(CONVERGENCE_HEADER);
    s.push('\n');
    for r in history {
        let energy = r.energy.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.iteration,
            fmt_f64(r.objective),
            fmt_f64(r.volume_ratio),
            energy,
            r.n_cap,
            r.n_floor
        );
    }
    s
}

pub fn timing_csv(history: &[IterationRecord]) -> String {
    let mut s = String::from(TIMING_HEADER);
    s.push('\n');
    for r in history {
        let _ = writeln!(s, "{},{},{}", r.iteration, fmt_f64(r.solver_time_s), fmt_f64(r.fem_time_s));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub method: String,
    pub solver: String,
    pub n_elements: usize,
    pub n_qubits: Option<usize>,
    pub v_target: f64,
    pub final_objective: f64,
    pub final_volume_ratio: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tfs_s: f64,
    pub seed: Option<u64>,
}

impl RunSummary {
    pub fn new(problem_name: &str, problem: &Problem, result: &RunResult, v_target: f64, seed: Option<u64>) -> Self {
        Self {
            problem: problem_name.to_string(),
            method: result.method.clone(),
            solver: result.solver.clone(),
            n_elements: problem.n_elements(),
            n_qubits: result.n_qubits,
            v_target,
            final_objective: result.final_objective,
            final_volume_ratio: result.final_volume_ratio,
            iterations: result.iterations,
            converged: result.converged,
            tfs_s: result.tfs_s,
            seed,
        }
    }
}

/// Iterations whose design is written: all of them for small problems,
/// otherwise every 5th plus the last.
pub fn snapshot_iterations(n_elements: usize, iterations: usize) -> Vec<usize> {
    if n_elements <= 100 {
        return (1..=iterations).collect();
    }
    let mut v: Vec<usize> = (5..=iterations).step_by(5).collect();
    if iterations > 0 && v.last() != Some(&iterations) {
        v.push(iterations);
    }
    v
}

/// Legacy ASCII VTK unstructured grid of the active cells with cell scalar `rho`.
pub fn vtk_string(mesh: &GridMesh, rho: &[f64]) -> String {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\nrho\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let n_nodes = mesh.n_nodes();
    let _ = writeln!(s, "POINTS {n_nodes} double");
    for n in 0..n_nodes {
        let c = mesh.node_coords(n);
        let _ = writeln!(s, "{} {} {}", fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(c[2]));
    }
    let cells = mesh.active_cells();
    let per = if mesh.dim == 2 { 4 } else { 8 };
    let _ = writeln!(s, "CELLS {} {}", cells.len(), cells.len() * (per + 1));
    for &c in &cells {
        s.push_str(&per.to_string());
        for n in mesh.cell_nodes(c) {
            let _ = write!(s, " {n}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    let t = if mesh.dim == 2 { "9" } else { "12" };
    for _ in &cells {
        s.push_str(t);
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_DATA {}\nSCALARS rho double 1\nLOOKUP_TABLE default", cells.len());
    for &r in rho {
        s.push_str(&fmt_f64(r));
        s.push('\n');
    }
    s
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Reads the `rho` cell scalars back from [`vtk_string`] output.
pub fn read_vtk_rho(text: &str) -> io::Result<Vec<f64>> {
    let mut lines = text.lines();
    let count = loop {
        let line = lines.next().ok_or_else(|| invalid("missing CELL_DATA section"))?;
        if let Some(rest) = line.strip_prefix("CELL_DATA ") {
            break rest.trim().parse::<usize>().map_err(|e| invalid(e.to_string()))?;
        }
    };
    let header = lines.next().unwrap_or_default();
    if !header.starts_with("SCALARS rho") {
        return Err(invalid(format!("expected `SCALARS rho`, found `{header}`")));
    }
    lines.next();
    let values: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .take(count)
        .map(|t| t.parse::<f64>().map_err(|e| invalid(e.to_string())))
        .collect::<io::Result<_>>()?;
    if values.len() != count {
        return Err(invalid(format!("expected {count} rho values, found {}", values.len())));
    }
    Ok(values)
}

/// Whitespace-separated `member node_a node_b rho` lines.
pub fn truss_string(truss: &TrussModel, rho: &[f64]) -> String {
    let mut s = String::from("# member node_a node_b rho\n");
    for (m, (member, r)) in truss.members.iter().zip(rho).enumerate() {
        let _ = writeln!(s, "{m} {} {} {}", member.nodes[0], member.nodes[1], fmt_f64(*r));
    }
    s
}

pub fn read_truss_rho(text: &str) -> io::Result<Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let t = l.split_whitespace().nth(3).ok_or_else(|| invalid(format!("short line `{l}`")))?;
            t.parse::<f64>().map_err(|e| invalid(e.to_string()))
        })
        .collect()
}

pub fn topology_extension(problem: &Problem) -> &'static str {
    match problem.geometry {
        Geometry::Truss(_) => "txt",
        Geometry::Grid(_) => "vtk",
    }
}

pub fn topology_string(problem: &Problem, rho: &[f64]) -> String {
    match &problem.geometry {
        Geometry::Truss(t) => truss_string(t, rho),
        Geometry::Grid(g) => vtk_string(g, rho),
    }
}

/// Reads a topology file written by [`write_bundle`].
pub fn read_topology(path: impl AsRef<Path>) -> io::Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "vtk") {
        read_vtk_rho(&text)
    } else {
        read_truss_rho(&text)
    }
}

/// Writes `convergence.csv`, `timing.csv`, `summary.json` and the topology
/// snapshots under `topology/`. Returns the snapshot paths.
pub fn write_bundle(dir: &Path, problem: &Problem, result: &RunResult, summary: &RunSummary) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("topology"))?;
    fs::write(dir.join("convergence.csv"), convergence_csv(&result.history))?;
    fs::write(dir.join("timing.csv"), timing_csv(&result.history))?;
    let json = serde_json::to_string_pretty(summary).map_err(io::Error::other)?;
    fs::write(dir.join("summary.json"), json + "\n")?;

    let ext = topology_extension(problem);
    let mut written = Vec::new();
    for it in snapshot_iterations(problem.n_elements(), result.designs.len()) {
        let path = dir.join("topology").join(format!("iter_{it:04}.{ext}"));
        fs::write(&path, topology_string(problem, &result.designs[it - 1]))?;
        written.push(path);
    }
    let path = dir.join("topology").join(format!("final.{ext}"));
    fs::write(&path, topology_string(problem, &result.final_state.rho))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0, 0.35, 1e-6, 3.8281e-11, 123456.789, 1e300, -2.5e-7, 0.1 + 0.2] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn cadence() {
        assert_eq!(snapshot_iterations(6, 3), vec![1, 2, 3]);
        assert_eq!(snapshot_iterations(3200, 12), vec![5, 10, 12]);
        assert_eq!(snapshot_iterations(3200, 10), vec![5, 10]);
        assert!(snapshot_iterations(3200, 0).is_empty());
    }

    #[test]
    fn vtk_round_trip() {
        let mut mesh = GridMesh::new_2d([3, 2], [1.0, 0.5]);
        mesh.active[4] = false;
        let rho = [0.1, 1e-6, 1.0, 0.333_333_333_333_333_3, 0.75];
        let text = vtk_string(&mesh, &rho);
        assert!(text.contains("CELLS 5 25"));
        assert_eq!(read_vtk_rho(&text).unwrap(), rho);
    }

    #[test]
    fn truss_round_trip() {
        let t = TrussModel::lattice(2, 2, 0.5);
        let rho = [1.0, 1e-6, 0.35, 0.385, 0.1, 1.0];
        assert_eq!(read_truss_rho(&truss_string(&t, &rho)).unwrap(), rho);
    }
}
