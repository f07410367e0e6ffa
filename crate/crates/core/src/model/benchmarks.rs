//! Canned benchmark problems.
//!
//! Truss layouts are ground structures on a unit lattice (member lengths 1 m
//! and √2 m, A⁰ = 0.5 m²). Continuum domains are structured grids. Geometry,
//! supports and load points follow the standard layouts of these examples;
//! load magnitudes are chosen per benchmark (see [`BenchmarkParameters`]).

use super::{
    Geometry, GridMesh, LoadCase, MaterialParams, PointLoad, Problem, ProblemKind, Supports,
    TrussModel,
};
use crate::error::ModelError;

pub const BENCHMARKS: [&str; 7] = [
    "truss6",
    "truss21",
    "truss29",
    "coat_hanger",
    "cantilever_80x40",
    "cube_20",
    "lshape_40x40x5",
];

const STEEL_E: f64 = 2e11;
const STEEL_NU: f64 = 0.3;
const BAR_AREA: f64 = 0.5;

/// Reference run parameters for a benchmark, plus the load magnitude used
/// by the canned problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkParameters {
    pub rho0: f64,
    pub theta_e: f64,
    pub theta_s: f64,
    pub lambda: f64,
    /// Total applied force, N.
    pub load: f64,
}

pub fn benchmark_parameters(name: &str) -> Option<BenchmarkParameters> {
    let p = |rho0, theta_e, lambda, load| BenchmarkParameters {
        rho0,
        theta_e,
        theta_s: 0.02,
        lambda,
        load,
    };
    Some(match name {
        "truss6" => p(0.35, 1.1, 5.0, 3.5e4),
        "truss21" => p(0.5, 1.1, 5.0, 5.0e4),
        "truss29" => p(0.4, 1.1, 5.0, 4.0e4),
        "coat_hanger" => p(0.6, 1.05, 500.0, 2.0e6),
        "cantilever_80x40" => p(0.6, 1.1, 8.0e3, 3.0e6),
        "cube_20" => p(0.25, 1.1, 1.0e3, 5.0e6),
        "lshape_40x40x5" => p(0.5, 1.1, 1.0e5, 1.5e7),
        _ => return None,
    })
}

/// Builds a canned benchmark. The volume target of every benchmark equals
/// its initial design ratio ρ₀, so the optimizer keeps the starting volume.
pub fn build_benchmark(name: &str) -> Result<Problem, ModelError> {
    let params =
        benchmark_parameters(name).ok_or_else(|| ModelError::UnknownBenchmark(name.to_string()))?;
    let material = MaterialParams::new(STEEL_E, STEEL_NU);
    let load = params.load;
    let problem = match name {
        // 2×2 lattice: left nodes pinned, load at the free bottom corner.
        "truss6" => lattice_truss(name, 2, 2, &[0, 2], &[(1, [0.0, -load])], params.rho0),
        // 5×2 lattice, simply supported bottom chord, load at mid-span.
        "truss21" => {
            let mut p = lattice_truss(name, 5, 2, &[0], &[(2, [0.0, -load])], params.rho0);
            p.supports.fixed_dofs.insert((4, 1));
            p
        }
        // 4×3 lattice: left column clamped, load at mid-height of the free edge.
        "truss29" => lattice_truss(name, 4, 3, &[0, 4, 8], &[(7, [0.0, -load])], params.rho0),
        // Hanger hook at the middle of the top edge, loads hanging off the bottom corners.
        "coat_hanger" => {
            let mesh = GridMesh::new_2d([10, 5], [1.0, 1.0]);
            let mut supports = Supports::default();
            for i in 4..=6 {
                supports.fix_node(mesh.node_index(i, 5, 0), 2);
            }
            let loads = vec![
                point(mesh.node_index(0, 0, 0), [0.0, -load / 2.0, 0.0]),
                point(mesh.node_index(10, 0, 0), [0.0, -load / 2.0, 0.0]),
            ];
            continuum(name, ProblemKind::PlaneStrain, mesh, material, supports, loads, params.rho0)
        }
        // Left edge clamped, downward tip load at mid-height of the right edge.
        "cantilever_80x40" => {
            let mesh = GridMesh::new_2d([80, 40], [1.0, 1.0]);
            let mut supports = Supports::default();
            for j in 0..=40 {
                supports.fix_node(mesh.node_index(0, j, 0), 2);
            }
            let loads = vec![point(mesh.node_index(80, 20, 0), [0.0, -load, 0.0])];
            continuum(name, ProblemKind::PlaneStrain, mesh, material, supports, loads, params.rho0)
        }
        // 10 m cube, bottom face clamped, upward pull at the centre of the top face.
        "cube_20" => {
            let mesh = GridMesh::new_3d([20, 20, 20], [0.5, 0.5, 0.5]);
            let mut supports = Supports::default();
            for j in 0..=20 {
                for i in 0..=20 {
                    supports.fix_node(mesh.node_index(i, j, 0), 3);
                }
            }
            let loads = vec![point(mesh.node_index(10, 10, 20), [0.0, 0.0, load])];
            continuum(name, ProblemKind::Solid, mesh, material, supports, loads, params.rho0)
        }
        // L-bracket in the x-z plane (80 m × 80 m, 10 m thick along y) with the
        // upper-right quadrant removed; clamped at z = 80, downward line load
        // along the edge x = 80, z = 40.
        "lshape_40x40x5" => {
            let mut mesh = GridMesh::new_3d([40, 5, 40], [2.0, 2.0, 2.0]);
            for k in 20..40 {
                for j in 0..5 {
                    for i in 20..40 {
                        let c = mesh.cell_index(i, j, k);
                        mesh.active[c] = false;
                    }
                }
            }
            let mut supports = Supports::default();
            for j in 0..=5 {
                for i in 0..=20 {
                    supports.fix_node(mesh.node_index(i, j, 40), 3);
                }
            }
            // trapezoidal split of the line load over the 6 edge nodes
            let per_segment = load / 5.0;
            let loads = (0..=5)
                .map(|j| {
                    let w = if j == 0 || j == 5 { 0.5 } else { 1.0 };
                    point(mesh.node_index(40, j, 20), [0.0, 0.0, -w * per_segment])
                })
                .collect();
            continuum(name, ProblemKind::Solid, mesh, material, supports, loads, params.rho0)
        }
        _ => unreachable!("parameters exist for every benchmark"),
    };
    problem.validated()
}

fn point(node: usize, force: [f64; 3]) -> PointLoad {
    PointLoad { node, force }
}

fn lattice_truss(
    name: &str,
    cols: usize,
    rows: usize,
    pinned: &[usize],
    loads: &[(usize, [f64; 2])],
    v_target: f64,
) -> Problem {
    let truss = TrussModel::lattice(cols, rows, BAR_AREA);
    let mut supports = Supports::default();
    for &n in pinned {
        supports.fix_node(n, 2);
    }
    Problem {
        name: Some(name.to_string()),
        kind: ProblemKind::Truss,
        geometry: Geometry::Truss(truss),
        material: MaterialParams::new(STEEL_E, STEEL_NU),
        loads: LoadCase {
            point_loads: loads
                .iter()
                .map(|&(node, f)| point(node, [f[0], f[1], 0.0]))
                .collect(),
        },
        supports,
        v_target,
    }
}

fn continuum(
    name: &str,
    kind: ProblemKind,
    mesh: GridMesh,
    material: MaterialParams,
    supports: Supports,
    point_loads: Vec<PointLoad>,
    v_target: f64,
) -> Problem {
    Problem {
        name: Some(name.to_string()),
        kind,
        geometry: Geometry::Grid(mesh),
        material,
        loads: LoadCase { point_loads },
        supports,
        v_target,
    }
}
