use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;

use super::{Geometry, Problem, ProblemKind};

/// A single violated problem invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveModulus(f64),
    PoissonOutOfRange(f64),
    KindMismatch { kind: ProblemKind, geometry: &'static str },
    BadDimension(usize),
    UnknownNode { context: &'static str, node: usize },
    ZeroLengthMember(usize),
    NonPositiveArea(usize),
    DuplicateMember { first: usize, second: usize },
    BadGridCounts,
    NonPositiveElementSize,
    ActiveMaskLength { expected: usize, got: usize },
    NoActiveCells,
    InactiveNode { context: &'static str, node: usize },
    BadAxis { node: usize, axis: usize },
    LoadOnFixedDof { node: usize, axis: usize },
    NonFiniteLoad(usize),
    NoSupports,
    RigidBodyModes { missing: usize },
    VTargetOutOfRange(f64),
    Schema(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NonPositiveModulus(e) => write!(f, "youngs_modulus > 0 violated (E = {e})"),
            PoissonOutOfRange(nu) => write!(f, "0 <= poisson_ratio < 0.5 violated (nu = {nu})"),
            KindMismatch { kind, geometry } => {
                write!(f, "kind `{}` does not match {geometry} geometry", kind.as_str())
            }
            BadDimension(d) => write!(f, "dimension must be 2 or 3, got {d}"),
            UnknownNode { context, node } => write!(f, "unknown node {node} in {context}"),
            ZeroLengthMember(m) => write!(f, "member {m}: L_e > 0 violated"),
            NonPositiveArea(m) => write!(f, "member {m}: initial area must be positive"),
            DuplicateMember { first, second } => {
                write!(f, "duplicate member: {second} repeats member {first}")
            }
            BadGridCounts => write!(f, "grid counts >= 1 per axis violated"),
            NonPositiveElementSize => write!(f, "grid element size must be positive"),
            ActiveMaskLength { expected, got } => {
                write!(f, "active mask has {got} entries, grid has {expected} cells")
            }
            NoActiveCells => write!(f, "at least one active cell required"),
            InactiveNode { context, node } => {
                write!(f, "{context} on node {node}, which touches no active cell")
            }
            BadAxis { node, axis } => write!(f, "support on node {node} uses invalid axis {axis}"),
            LoadOnFixedDof { node, axis } => {
                write!(f, "load on node {node} acts along fixed axis {axis}")
            }
            NonFiniteLoad(node) => write!(f, "load on node {node} is not finite"),
            NoSupports => write!(f, "supports must be nonempty"),
            RigidBodyModes { missing } => write!(
                f,
                "supports leave {missing} rigid-body modes unrestrained"
            ),
            VTargetOutOfRange(v) => write!(f, "0 < v_target <= 1 violated (v_target = {v})"),
            Schema(msg) => write!(f, "{msg}"),
        }
    }
}

pub(super) fn validate(p: &Problem) -> Vec<Violation> {
    let mut out = Vec::new();
    let mat = p.material;
    if !(mat.youngs_modulus > 0.0 && mat.youngs_modulus.is_finite()) {
        out.push(Violation::NonPositiveModulus(mat.youngs_modulus));
    }
    if !(0.0..0.5).contains(&mat.poisson_ratio) {
        out.push(Violation::PoissonOutOfRange(mat.poisson_ratio));
    }
    if !(p.v_target > 0.0 && p.v_target <= 1.0) {
        out.push(Violation::VTargetOutOfRange(p.v_target));
    }

    let dim = p.dim();
    if dim != 2 && dim != 3 {
        out.push(Violation::BadDimension(dim));
        return out;
    }

    let geometry_ok = match &p.geometry {
        Geometry::Truss(t) => {
            if p.kind != ProblemKind::Truss {
                out.push(Violation::KindMismatch {
                    kind: p.kind,
                    geometry: "truss",
                });
            }
            let before = out.len();
            let mut seen = HashSet::new();
            let mut first_of = std::collections::HashMap::new();
            for (m, member) in t.members.iter().enumerate() {
                let [a, b] = member.nodes;
                let mut ok = true;
                for n in [a, b] {
                    if n >= t.nodes.len() {
                        out.push(Violation::UnknownNode {
                            context: "member",
                            node: n,
                        });
                        ok = false;
                    }
                }
                if !(member.area > 0.0 && member.area.is_finite()) {
                    out.push(Violation::NonPositiveArea(m));
                }
                if ok {
                    if t.member_length(m) <= 0.0 {
                        out.push(Violation::ZeroLengthMember(m));
                    }
                    let key = (a.min(b), a.max(b));
                    if !seen.insert(key) {
                        out.push(Violation::DuplicateMember {
                            first: first_of[&key],
                            second: m,
                        });
                    } else {
                        first_of.insert(key, m);
                    }
                }
            }
            if t.members.is_empty() {
                out.push(Violation::Schema("truss has no members".into()));
            }
            out.len() == before
        }
        Geometry::Grid(g) => {
            let expected_kind = if g.dim == 2 {
                ProblemKind::PlaneStrain
            } else {
                ProblemKind::Solid
            };
            if p.kind != expected_kind {
                out.push(Violation::KindMismatch {
                    kind: p.kind,
                    geometry: if g.dim == 2 { "2D grid" } else { "3D grid" },
                });
            }
            let before = out.len();
            if g.counts.contains(&0) || (g.dim == 2 && g.counts[2] != 1) {
                out.push(Violation::BadGridCounts);
            }
            if g.element_size.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
                out.push(Violation::NonPositiveElementSize);
            }
            if g.active.len() != g.n_cells() {
                out.push(Violation::ActiveMaskLength {
                    expected: g.n_cells(),
                    got: g.active.len(),
                });
            } else if !g.active.iter().any(|&a| a) {
                out.push(Violation::NoActiveCells);
            }
            out.len() == before
        }
    };
    if !geometry_ok {
        return out;
    }

    let n_nodes = p.n_nodes();
    let used = p.used_nodes();

    if p.supports.fixed_dofs.is_empty() {
        out.push(Violation::NoSupports);
    }
    let mut supports_ok = true;
    for &(node, axis) in &p.supports.fixed_dofs {
        if node >= n_nodes {
            out.push(Violation::UnknownNode {
                context: "supports",
                node,
            });
            supports_ok = false;
        } else if !used[node] {
            out.push(Violation::InactiveNode {
                context: "support",
                node,
            });
        }
        if axis >= dim {
            out.push(Violation::BadAxis { node, axis });
            supports_ok = false;
        }
    }

    for load in &p.loads.point_loads {
        if load.node >= n_nodes {
            out.push(Violation::UnknownNode {
                context: "loads",
                node: load.node,
            });
            continue;
        }
        if !used[load.node] {
            out.push(Violation::InactiveNode {
                context: "load",
                node: load.node,
            });
        }
        if load.force.iter().any(|f| !f.is_finite()) {
            out.push(Violation::NonFiniteLoad(load.node));
        }
        for axis in 0..3 {
            if load.force[axis] != 0.0
                && (axis >= dim || p.supports.fixed_dofs.contains(&(load.node, axis)))
            {
                out.push(Violation::LoadOnFixedDof {
                    node: load.node,
                    axis,
                });
            }
        }
    }

    if supports_ok && !p.supports.fixed_dofs.is_empty() {
        let missing = unrestrained_rigid_modes(p, dim);
        if missing > 0 {
            out.push(Violation::RigidBodyModes { missing });
        }
    } else if p.supports.fixed_dofs.is_empty() {
        out.push(Violation::RigidBodyModes {
            missing: if dim == 2 { 3 } else { 6 },
        });
    }
    out
}

/// Number of rigid-body modes of the whole node set that the fixed dofs do
/// not restrain, from the rank of the rigid-mode basis sampled at the fixed dofs.
fn unrestrained_rigid_modes(p: &Problem, dim: usize) -> usize {
    let used = p.used_nodes();
    let mut centroid = [0.0; 3];
    let mut count = 0.0f64;
    for (n, &u) in used.iter().enumerate() {
        if u {
            let c = p.node_coords(n);
            for a in 0..3 {
                centroid[a] += c[a];
            }
            count += 1.0;
        }
    }
    for c in &mut centroid {
        *c /= count.max(1.0);
    }
    let n_modes = if dim == 2 { 3 } else { 6 };
    let rows = p.supports.fixed_dofs.len();
    let mut basis = DMatrix::<f64>::zeros(rows, n_modes);
    for (r, &(node, axis)) in p.supports.fixed_dofs.iter().enumerate() {
        let c = p.node_coords(node);
        let (x, y, z) = (c[0] - centroid[0], c[1] - centroid[1], c[2] - centroid[2]);
        // translations
        basis[(r, axis)] = 1.0;
        // rotations: rz = (-y, x, 0), rx = (0, -z, y), ry = (z, 0, -x)
        if dim == 2 {
            basis[(r, 2)] = [-y, x][axis];
        } else {
            basis[(r, 3)] = [0.0, -z, y][axis];
            basis[(r, 4)] = [z, 0.0, -x][axis];
            basis[(r, 5)] = [-y, x, 0.0][axis];
        }
    }
    let sv = basis.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-9 * smax.max(1e-300)).count();
    n_modes - rank.min(n_modes)
}
