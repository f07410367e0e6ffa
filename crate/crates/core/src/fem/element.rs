//! Element kernels: isotropic elasticity matrices, the two-node bar, and
//! isoparametric bilinear quads / trilinear hexes with 2-point Gauss
//! quadrature per axis.

use nalgebra::{DMatrix, Matrix2, Matrix3};

use crate::model::{MaterialParams, ProblemKind};

const GAUSS_2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Plane-strain (3×3, Voigt order xx, yy, xy) or 3D (6×6, order xx, yy, zz,
/// xy, yz, zx) isotropic elasticity matrix. Engineering shear strains.
pub fn elasticity_matrix(material: MaterialParams, kind: ProblemKind) -> DMatrix<f64> {
    let e = material.youngs_modulus;
    let nu = material.poisson_ratio;
    let scale = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
    match kind {
        ProblemKind::PlaneStrain => {
            let mut c = DMatrix::zeros(3, 3);
            c[(0, 0)] = scale * (1.0 - nu);
            c[(1, 1)] = scale * (1.0 - nu);
            c[(0, 1)] = scale * nu;
            c[(1, 0)] = scale * nu;
            c[(2, 2)] = scale * (1.0 - 2.0 * nu) / 2.0;
            c
        }
        ProblemKind::Solid | ProblemKind::Truss => {
            let mut c = DMatrix::zeros(6, 6);
            for i in 0..3 {
                for j in 0..3 {
                    c[(i, j)] = if i == j { scale * (1.0 - nu) } else { scale * nu };
                }
                c[(i + 3, i + 3)] = e / (2.0 * (1.0 + nu));
            }
            c
        }
    }
}

/// Bar stiffness `E·A/L · [ccᵀ −ccᵀ; −ccᵀ ccᵀ]` with direction cosines `c`.
pub fn bar_stiffness(a: [f64; 3], b: [f64; 3], dim: usize, youngs_modulus: f64, area: f64) -> DMatrix<f64> {
    let d: Vec<f64> = (0..dim).map(|i| b[i] - a[i]).collect();
    let length = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k = youngs_modulus * area / length;
    let c: Vec<f64> = d.iter().map(|x| x / length).collect();
    let n = 2 * dim;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..dim {
        for j in 0..dim {
            let v = k * c[i] * c[j];
            m[(i, j)] = v;
            m[(i + dim, j + dim)] = v;
            m[(i, j + dim)] = -v;
            m[(i + dim, j)] = -v;
        }
    }
    m
}

/// Shape-function gradients with respect to (ξ, η) for the 4-node quad.
fn quad_dn(xi: f64, eta: f64) -> [[f64; 4]; 2] {
    [
        [-(1.0 - eta), 1.0 - eta, 1.0 + eta, -(1.0 + eta)].map(|v| v / 4.0),
        [-(1.0 - xi), -(1.0 + xi), 1.0 + xi, 1.0 - xi].map(|v| v / 4.0),
    ]
}

/// Plane-strain quad stiffness (unit thickness) for arbitrary corner
/// coordinates given counter-clockwise.
pub fn quad4_stiffness(coords: &[[f64; 2]; 4], c: &DMatrix<f64>) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(8, 8);
    let mut b = DMatrix::zeros(3, 8);
    for &xi in &GAUSS_2 {
        for &eta in &GAUSS_2 {
            let dn = quad_dn(xi, eta);
            let mut jac = Matrix2::<f64>::zeros();
            for a in 0..4 {
                for r in 0..2 {
                    for s in 0..2 {
                        jac[(r, s)] += dn[r][a] * coords[a][s];
                    }
                }
            }
            let det = jac.determinant();
            let inv = jac.try_inverse().expect("degenerate quad element");
            b.fill(0.0);
            for a in 0..4 {
                let dx = inv[(0, 0)] * dn[0][a] + inv[(0, 1)] * dn[1][a];
                let dy = inv[(1, 0)] * dn[0][a] + inv[(1, 1)] * dn[1][a];
                b[(0, 2 * a)] = dx;
                b[(1, 2 * a + 1)] = dy;
                b[(2, 2 * a)] = dy;
                b[(2, 2 * a + 1)] = dx;
            }
            k += b.transpose() * c * &b * det;
        }
    }
    symmetrize(k)
}

const HEX_SIGNS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Hex stiffness for arbitrary corner coordinates (bottom face
/// counter-clockwise, then top face).
pub fn hex8_stiffness(coords: &[[f64; 3]; 8], c: &DMatrix<f64>) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(24, 24);
    let mut b = DMatrix::zeros(6, 24);
    for &xi in &GAUSS_2 {
        for &eta in &GAUSS_2 {
            for &zeta in &GAUSS_2 {
                let p = [xi, eta, zeta];
                let mut dn = [[0.0; 8]; 3];
                for (a, s) in HEX_SIGNS.iter().enumerate() {
                    let f = [1.0 + s[0] * p[0], 1.0 + s[1] * p[1], 1.0 + s[2] * p[2]];
                    dn[0][a] = s[0] * f[1] * f[2] / 8.0;
                    dn[1][a] = s[1] * f[0] * f[2] / 8.0;
                    dn[2][a] = s[2] * f[0] * f[1] / 8.0;
                }
                let mut jac = Matrix3::<f64>::zeros();
                for a in 0..8 {
                    for r in 0..3 {
                        for s in 0..3 {
                            jac[(r, s)] += dn[r][a] * coords[a][s];
                        }
                    }
                }
                let det = jac.determinant();
                let inv = jac.try_inverse().expect("degenerate hex element");
                b.fill(0.0);
                for a in 0..8 {
                    let g: [f64; 3] = std::array::from_fn(|r| {
                        inv[(r, 0)] * dn[0][a] + inv[(r, 1)] * dn[1][a] + inv[(r, 2)] * dn[2][a]
                    });
                    let col = 3 * a;
                    b[(0, col)] = g[0];
                    b[(1, col + 1)] = g[1];
                    b[(2, col + 2)] = g[2];
                    b[(3, col)] = g[1];
                    b[(3, col + 1)] = g[0];
                    b[(4, col + 1)] = g[2];
                    b[(4, col + 2)] = g[1];
                    b[(5, col)] = g[2];
                    b[(5, col + 2)] = g[0];
                }
                k += b.transpose() * c * &b * det;
            }
        }
    }
    symmetrize(k)
}

fn symmetrize(k: DMatrix<f64>) -> DMatrix<f64> {
    (&k + k.transpose()) * 0.5
}
