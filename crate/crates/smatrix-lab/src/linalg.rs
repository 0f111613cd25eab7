//! Dense complex linear algebra helpers shared by the operator modules.
//!
//! Everything is built on LAPACK through `ndarray-linalg`: singular value
//! decompositions for operator norms and polar factors, `zgeev` for general
//! eigendecompositions, `zheev` for Hermitian ones.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("LAPACK call failed: {0}")]
    Backend(String),
    #[error("matrix is numerically singular (smallest singular value {min_sv:.3e})")]
    Singular { min_sv: f64 },
    #[error("eigendecomposition residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    BadResidual { residual: f64, tol: f64 },
}

pub fn identity(n: usize) -> CMat {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

pub fn adjoint(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

pub fn hermitize(m: &CMat) -> CMat {
    let at = adjoint(m);
    (m + &at).mapv(|z| 0.5 * z)
}

/// Largest singular value.
pub fn opnorm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let (_, s, _) = m.svd(false, false).expect("SVD of a finite matrix");
    s.to_vec()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest |entry| off the diagonal.
pub fn offdiag_max(m: &CMat) -> f64 {
    let mut best = 0.0f64;
    for ((i, j), z) in m.indexed_iter() {
        if i != j {
            best = best.max(z.norm());
        }
    }
    best
}

pub fn is_numerically_diagonal(m: &CMat, tol: f64) -> bool {
    offdiag_max(m) <= tol
}

/// `|| m* m - I ||` in operator norm.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let gram = adjoint(m).dot(m) - identity(n);
    opnorm(&gram)
}

/// Unitary polar factor (all singular values replaced by one). Fails when
/// the smallest singular value drops below `min_sv_tol`.
pub fn polar_unitary(m: &CMat, min_sv_tol: f64) -> Result<CMat, LinalgError> {
    let (u, s, vt) = m
        .svd(true, true)
        .map_err(|e| LinalgError::Backend(e.to_string()))?;
    let min_sv = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_sv < min_sv_tol {
        return Err(LinalgError::Singular { min_sv });
    }
    let u = u.expect("requested U");
    let vt = vt.expect("requested V^T");
    Ok(u.dot(&vt))
}

pub fn inverse(m: &CMat) -> Result<CMat, LinalgError> {
    m.inv().map_err(|e| LinalgError::Backend(e.to_string()))
}

/// Hermitian eigendecomposition (ascending eigenvalues, orthonormal columns).
///
/// The LAPACK wrapper hands row-major storage to a column-major routine,
/// which amounts to decomposing the transpose; for Hermitian input that
/// conjugates the eigenvectors. The residual check below picks whichever
/// convention actually satisfies `M w = mu w`.
pub fn hermitian_eig(m: &CMat) -> Result<(Vec<f64>, CMat), LinalgError> {
    let (vals, vecs) = m
        .eigh(UPLO::Lower)
        .map_err(|e| LinalgError::Backend(e.to_string()))?;
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let residual = |w: &CMat| -> f64 {
        let mw = m.dot(w);
        let mut worst = 0.0f64;
        for j in 0..vals.len() {
            let mut acc = 0.0f64;
            for r in 0..m.nrows() {
                acc += (mw[[r, j]] - Complex64::new(vals[j], 0.0) * w[[r, j]]).norm_sqr();
            }
            worst = worst.max(acc.sqrt());
        }
        worst
    };
    let tol = 1e-10 * scale.max(1.0) * (m.nrows() as f64).sqrt();
    let direct = residual(&vecs);
    if direct <= tol {
        return Ok((vals.to_vec(), vecs));
    }
    let conj = vecs.mapv(|z| z.conj());
    let conj_res = residual(&conj);
    if conj_res <= tol {
        return Ok((vals.to_vec(), conj));
    }
    Err(LinalgError::BadResidual {
        residual: direct.min(conj_res),
        tol,
    })
}

/// Eigendecomposition of a unitary (more generally normal) matrix with
/// orthonormal eigenvectors.
///
/// `zgeev` eigenvectors of a normal matrix are individually accurate but
/// only approximately orthogonal; a final symmetric orthogonalization
/// (polar factor of the eigenvector matrix) restores exact unitarity while
/// moving each column by at most the original orthogonality defect. The
/// per-pair residual `||U v - lambda v||` is verified afterwards.
pub fn eig_unitary(m: &CMat, residual_tol: f64) -> Result<(Vec<Complex64>, CMat), LinalgError> {
    let n = m.nrows();
    // Exactly diagonal input: the eigenpairs are immediate and exact.
    if offdiag_max(m) == 0.0 {
        let vals: Vec<Complex64> = (0..n).map(|i| m[[i, i]]).collect();
        return Ok((vals, identity(n)));
    }
    let (_vals, vecs) = m
        .eig()
        .map_err(|e| LinalgError::Backend(e.to_string()))?;
    let vecs = polar_unitary(&vecs, 1e-6)?;
    // Rayleigh quotients on the orthonormalized columns.
    let mv = m.dot(&vecs);
    let mut vals = Vec::with_capacity(n);
    let mut worst = 0.0f64;
    for j in 0..n {
        let col = vecs.column(j);
        let mcol = mv.column(j);
        let lambda: Complex64 = col.iter().zip(mcol.iter()).map(|(v, w)| v.conj() * w).sum();
        let mut res = 0.0f64;
        for i in 0..n {
            res += (mcol[i] - lambda * col[i]).norm_sqr();
        }
        worst = worst.max(res.sqrt());
        vals.push(lambda);
    }
    if worst > residual_tol {
        return Err(LinalgError::BadResidual {
            residual: worst,
            tol: residual_tol,
        });
    }
    Ok((vals, vecs))
}

/// Standard normal via Box-Muller.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Haar-ish random unitary: polar factor of a complex Ginibre sample.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = Array2::from_shape_fn((n, n), |_| Complex64::new(gaussian(rng), gaussian(rng)));
    polar_unitary(&g, 1e-12).expect("Ginibre samples are almost surely nonsingular")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn polar_recovers_unitary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(8, &mut rng);
        assert!(unitarity_defect(&u) <= 1e-12);
        let w = polar_unitary(&u, 1e-10).unwrap();
        assert!(opnorm(&(&w - &u)) <= 1e-12);
    }

    #[test]
    fn eig_unitary_residuals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(24, &mut rng);
        let (vals, vecs) = eig_unitary(&u, 1e-9).unwrap();
        assert!(unitarity_defect(&vecs) <= 1e-12);
        for v in &vals {
            assert!((v.norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn hermitian_eig_satisfies_eigen_equation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = Array2::from_shape_fn((12, 12), |_| {
            Complex64::new(gaussian(&mut rng), gaussian(&mut rng))
        });
        let h = hermitize(&g);
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        let hv = h.dot(&vecs);
        for j in 0..12 {
            for r in 0..12 {
                let expect = Complex64::new(vals[j], 0.0) * vecs[[r, j]];
                assert!((hv[[r, j]] - expect).norm() <= 1e-10);
            }
        }
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn trace_norm_of_projector() {
        let mut p = Array2::zeros((4, 4));
        p[[1, 1]] = Complex64::new(1.0, 0.0);
        assert!((trace_norm(&p) - 1.0).abs() <= 1e-14);
        assert!((opnorm(&p) - 1.0).abs() <= 1e-14);
    }
}
