//! JSON problem files.
//!
//! ```json
//! {
//!   "kind": "truss",
//!   "material": {"E": 2e11, "nu": 0.3},
//!   "truss": {"nodes": [[0, 0], [1, 0]], "members": [[0, 1, 0.5]]},
//!   "supports": [[0, 0], [0, 1], [1, 1]],
//!   "loads": [[1, [1000, 0]]],
//!   "v_target": 1.0
//! }
//! ```
//!
//! Grid problems replace `truss` by
//! `"grid": {"counts": [nx, ny(, nz)], "size": [sx, sy(, sz)], "inactive": [[i, j(, k)], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    Geometry, GridMesh, LoadCase, MaterialParams, Member, PointLoad, Problem, ProblemKind,
    Supports, TrussModel, Violation,
};
use crate::error::ModelError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    kind: KindTag,
    material: MaterialFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truss: Option<TrussFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<GridFile>,
    supports: Vec<(usize, usize)>,
    loads: Vec<(usize, Vec<f64>)>,
    v_target: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Truss,
    PlaneStrain,
    Solid,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    #[serde(rename = "E")]
    youngs_modulus: f64,
    nu: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrussFile {
    nodes: Vec<Vec<f64>>,
    members: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    counts: Vec<usize>,
    size: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    inactive: Vec<Vec<usize>>,
}

/// Reads and validates a problem file.
pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_with_context(&text, &path.display().to_string())
}

/// Parses and validates problem JSON text.
pub fn parse_problem(text: &str) -> Result<Problem, ModelError> {
    parse_with_context(text, "problem")
}

fn parse_with_context(text: &str, context: &str) -> Result<Problem, ModelError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        context: context.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_file(file)?.validated()
}

fn from_file(file: ProblemFile) -> Result<Problem, ModelError> {
    let mut violations = Vec::new();
    let kind = match file.kind {
        KindTag::Truss => ProblemKind::Truss,
        KindTag::PlaneStrain => ProblemKind::PlaneStrain,
        KindTag::Solid => ProblemKind::Solid,
    };
    let geometry = match (file.truss, file.grid) {
        (Some(t), None) => {
            let dim = t.nodes.first().map_or(2, |n| n.len());
            let mut nodes = Vec::with_capacity(t.nodes.len());
            for (i, n) in t.nodes.iter().enumerate() {
                if n.len() != dim || !(2..=3).contains(&n.len()) {
                    violations.push(Violation::Schema(format!(
                        "truss.nodes[{i}]: expected {dim} coordinates (2 or 3), got {}",
                        n.len()
                    )));
                    continue;
                }
                nodes.push([n[0], n[1], n.get(2).copied().unwrap_or(0.0)]);
            }
            let members = t
                .members
                .iter()
                .map(|&(a, b, area)| Member { nodes: [a, b], area })
                .collect();
            Geometry::Truss(TrussModel {
                dim,
                nodes,
                members,
            })
        }
        (None, Some(g)) => {
            let dim = g.counts.len();
            if !(2..=3).contains(&dim) || g.size.len() != dim {
                return Err(ModelError::Invalid(vec![Violation::Schema(format!(
                    "grid.counts and grid.size must both have 2 or 3 entries (got {} and {})",
                    g.counts.len(),
                    g.size.len()
                ))]));
            }
            let mut mesh = if dim == 2 {
                GridMesh::new_2d([g.counts[0], g.counts[1]], [g.size[0], g.size[1]])
            } else {
                GridMesh::new_3d(
                    [g.counts[0], g.counts[1], g.counts[2]],
                    [g.size[0], g.size[1], g.size[2]],
                )
            };
            for (n, cell) in g.inactive.iter().enumerate() {
                let in_range = cell.len() == dim
                    && cell.iter().zip(mesh.counts.iter()).all(|(&c, &m)| c < m);
                if !in_range {
                    violations.push(Violation::Schema(format!(
                        "grid.inactive[{n}]: {cell:?} is not a cell index of the grid"
                    )));
                    continue;
                }
                let idx = mesh.cell_index(cell[0], cell[1], cell.get(2).copied().unwrap_or(0));
                mesh.active[idx] = false;
            }
            Geometry::Grid(mesh)
        }
        (Some(_), Some(_)) => {
            return Err(ModelError::Invalid(vec![Violation::Schema(
                "both `truss` and `grid` given; exactly one is required".into(),
            )]))
        }
        (None, None) => {
            return Err(ModelError::Invalid(vec![Violation::Schema(
                "missing geometry: one of `truss` or `grid` is required".into(),
            )]))
        }
    };
    let dim = match &geometry {
        Geometry::Truss(t) => t.dim,
        Geometry::Grid(g) => g.dim,
    };

    let mut supports = Supports::default();
    for &(node, axis) in &file.supports {
        supports.fixed_dofs.insert((node, axis));
    }
    let mut loads = LoadCase::default();
    for (i, (node, f)) in file.loads.iter().enumerate() {
        if f.len() != dim {
            violations.push(Violation::Schema(format!(
                "loads[{i}]: force has {} components, expected {dim}",
                f.len()
            )));
            continue;
        }
        let mut force = [0.0; 3];
        force[..dim].copy_from_slice(f);
        loads.point_loads.push(PointLoad { node: *node, force });
    }
    if !violations.is_empty() {
        return Err(ModelError::Invalid(violations));
    }
    Ok(Problem {
        name: file.name,
        kind,
        geometry,
        material: MaterialParams::new(file.material.youngs_modulus, file.material.nu),
        loads,
        supports,
        v_target: file.v_target,
    })
}

fn to_file(p: &Problem) -> ProblemFile {
    let dim = p.dim();
    let (truss, grid) = match &p.geometry {
        Geometry::Truss(t) => (
            Some(TrussFile {
                nodes: t.nodes.iter().map(|n| n[..t.dim].to_vec()).collect(),
                members: t
                    .members
                    .iter()
                    .map(|m| (m.nodes[0], m.nodes[1], m.area))
                    .collect(),
            }),
            None,
        ),
        Geometry::Grid(g) => {
            let d = g.dim;
            let inactive = (0..g.n_cells())
                .filter(|&c| !g.active[c])
                .map(|c| g.cell_ijk(c)[..d].to_vec())
                .collect();
            (
                None,
                Some(GridFile {
                    counts: g.counts[..d].to_vec(),
                    size: g.element_size[..d].to_vec(),
                    inactive,
                }),
            )
        }
    };
    ProblemFile {
        name: p.name.clone(),
        kind: match p.kind {
            ProblemKind::Truss => KindTag::Truss,
            ProblemKind::PlaneStrain => KindTag::PlaneStrain,
            ProblemKind::Solid => KindTag::Solid,
        },
        material: MaterialFile {
            youngs_modulus: p.material.youngs_modulus,
            nu: p.material.poisson_ratio,
        },
        truss,
        grid,
        supports: p.supports.fixed_dofs.iter().copied().collect(),
        loads: p
            .loads
            .point_loads
            .iter()
            .map(|l| (l.node, l.force[..dim].to_vec()))
            .collect(),
        v_target: p.v_target,
    }
}

pub fn problem_to_string(problem: &Problem) -> String {
    serde_json::to_string_pretty(&to_file(problem)).expect("problem serializes")
}

pub fn save_problem(problem: &Problem, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, problem_to_string(problem) + "\n")
}
