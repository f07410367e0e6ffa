use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::{MatMut, Side};

use super::GlobalSystem;
use crate::error::FemError;

/// Largest reduced system solved by sparse Cholesky; larger systems use
/// Jacobi-preconditioned conjugate gradients.
pub const DIRECT_SOLVE_LIMIT: usize = 50_000;

const CG_TOL: f64 = 1e-10;
const REFINE_STEPS: usize = 3;

/// Solves `K_eff·U = F` and returns the full-length displacement vector,
/// with zeros at the fixed dofs.
pub fn solve_displacements(system: &GlobalSystem) -> Result<Vec<f64>, FemError> {
    let reduced = solve_reduced(system)?;
    Ok(system.expand(&reduced))
}

/// Reduced solution over the free dofs only.
pub fn solve_reduced(system: &GlobalSystem) -> Result<Vec<f64>, FemError> {
    let n = system.n_free();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= DIRECT_SOLVE_LIMIT {
        direct(system)
    } else {
        pcg(system, None)
    }
}

fn direct(system: &GlobalSystem) -> Result<Vec<f64>, FemError> {
    let n = system.n_free();
    let k = system.stiffness.as_ref();
    let cache = system.cached_symbolic();
    let symbolic = match cache.get() {
        Some(s) => s.clone(),
        None => {
            let s = SymbolicLlt::try_new(k.symbolic(), Side::Upper)
                .map_err(|e| FemError::Backend(format!("{e:?}")))?;
            cache.get_or_init(|| s).clone()
        }
    };
    let llt = Llt::try_new_with_symbolic(symbolic, k, Side::Upper).map_err(|e| match e {
        faer::sparse::linalg::LltError::Numeric(faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index }) => {
            FemError::NotPositiveDefinite { pivot: index }
        }
        other => FemError::Backend(format!("{other:?}")),
    })?;
    let mut x = system.load.clone();
    llt.solve_in_place(MatMut::from_column_major_slice_mut(&mut x, n, 1));

    let f_norm = norm(&system.load);
    for _ in 0..REFINE_STEPS {
        let kx = system.apply(&x);
        let mut r: Vec<f64> = system.load.iter().zip(&kx).map(|(f, k)| f - k).collect();
        if norm(&r) <= 1e-14 * f_norm {
            break;
        }
        llt.solve_in_place(MatMut::from_column_major_slice_mut(&mut r, n, 1));
        for (xi, ri) in x.iter_mut().zip(&r) {
            *xi += ri;
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(FemError::Backend("non-finite displacement".into()));
    }
    Ok(x)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG to relative residual `1e-10`.
pub(crate) fn pcg(system: &GlobalSystem, max_iter: Option<usize>) -> Result<Vec<f64>, FemError> {
    let n = system.n_free();
    let k = system.stiffness.as_ref();
    let mut diag = vec![0.0; n];
    for col in 0..n {
        for (&row, &v) in k.row_idx_of_col_raw(col).iter().zip(k.val_of_col(col)) {
            if row == col {
                diag[col] = v;
            }
        }
    }
    if let Some(p) = diag.iter().position(|&d| d <= 0.0) {
        return Err(FemError::NotPositiveDefinite { pivot: p });
    }
    let b = &system.load;
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let limit = max_iter.unwrap_or(10 * n + 100);
    let mut res = 1.0;
    for it in 0..limit {
        let q = system.apply(&p);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(FemError::NotPositiveDefinite { pivot: it });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res = norm(&r) / b_norm;
        if res <= CG_TOL {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(FemError::NoConvergence {
        iterations: limit,
        residual: res,
    })
}
