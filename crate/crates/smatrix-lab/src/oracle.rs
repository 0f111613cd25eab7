//! Independent reference computations for the test suite.
//!
//! These deliberately share no algorithmic path with the main
//! implementation: Romberg extrapolation on a sinh-compactified axis
//! instead of adaptive Gauss-Kronrod on a tan-compactified one, direct
//! O(N K^2) summation instead of FFT quantization, and scalar formulas
//! for the Cayley transform.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::circleop::{Provenance, SymbolGrid, TruncatedOperator};
use crate::potentials::{eval_potential, Potential};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("Romberg did not converge: estimate {estimate:.3e} after {levels} levels")]
    NonConvergence { estimate: f64, levels: usize },
    #[error("direct quantization limited to mode cutoffs <= {max}, got {got}")]
    CutoffTooLarge { max: usize, got: usize },
    #[error("scalar Cayley transform has a pole at phases congruent to 0 (mod 2 pi)")]
    CayleyPole,
    #[error("potential evaluation failed: {0}")]
    Potential(#[from] crate::potentials::PotentialError),
}

/// Which reference scheme produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleScheme {
    RombergQuadrature,
    DirectSummationQuantize,
    ScalarFormula,
}

/// A reference value with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub value: f64,
    pub scheme: OracleScheme,
    pub error_estimate: f64,
}

/// Romberg value of the scattering phase: the full-line integral of
/// `V(x + t xi) - V(t xi)` after the substitution `t = sinh(s)`, truncated
/// at `|t| = 1e12` with the tail folded into the error estimate.
pub fn romberg_phase(
    p: &Potential,
    x: &[f64],
    xi: &[f64],
    levels: usize,
) -> Result<OracleResult, OracleError> {
    assert!(levels <= 20, "Romberg levels capped at 20");
    let d = x.len();
    let t_max = 1e12f64;
    let s_max = t_max.asinh();

    let mut shifted = vec![0.0; d];
    let mut free = vec![0.0; d];
    let mut integrand = |s: f64| -> Result<f64, OracleError> {
        let t = s.sinh();
        let cosh = s.cosh();
        for i in 0..d {
            free[i] = t * xi[i];
            shifted[i] = x[i] + free[i];
        }
        Ok((eval_potential(p, &shifted)? - eval_potential(p, &free)?) * cosh)
    };

    // Composite trapezoid rows with Richardson extrapolation.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut h = 2.0 * s_max;
    let mut trap = 0.5 * h * (integrand(-s_max)? + integrand(s_max)?);
    rows.push(vec![trap]);
    let mut estimate = f64::INFINITY;
    for level in 1..levels {
        let n_new = 1usize << (level - 1);
        h *= 0.5;
        let mut sum_new = 0.0;
        for i in 0..n_new {
            let s = -s_max + (2 * i + 1) as f64 * h;
            sum_new += integrand(s)?;
        }
        trap = 0.5 * trap + h * sum_new;
        let prev = rows.last().expect("at least one row");
        let mut row = vec![trap];
        let mut pow4 = 1.0;
        for k in 0..prev.len() {
            pow4 *= 4.0;
            let extrap = (pow4 * row[k] - prev[k]) / (pow4 - 1.0);
            row.push(extrap);
        }
        estimate = (row[row.len() - 1] - prev[prev.len() - 1]).abs();
        rows.push(row);
        if estimate < 1e-12 && level >= 6 {
            break;
        }
    }

    let last = rows.last().expect("rows nonempty");
    let value = last[last.len() - 1];
    // Tail of the truncated improper integral: the integrand decays like
    // c / t^2, so the remainder is about t_max * |integrand diff(t_max)|.
    for i in 0..d {
        free[i] = t_max * xi[i];
        shifted[i] = x[i] + free[i];
    }
    let tail = 2.0
        * t_max
        * (eval_potential(p, &shifted)? - eval_potential(p, &free)?).abs();
    let error_estimate = estimate + tail;
    if !estimate.is_finite() || estimate > 1e-5 {
        return Err(OracleError::NonConvergence {
            estimate,
            levels: rows.len(),
        });
    }
    Ok(OracleResult {
        value,
        scheme: OracleScheme::RombergQuadrature,
        error_estimate,
    })
}

/// Direct-summation quantization: every matrix element by explicit
/// evaluation of the Fourier sum, no fast transform. Cost guard at
/// `mode_cutoff <= 64`.
pub fn direct_quantize(grid: &SymbolGrid) -> Result<TruncatedOperator, OracleError> {
    let k_cut = grid.mode_cutoff();
    if k_cut > 64 {
        return Err(OracleError::CutoffTooLarge {
            max: 64,
            got: k_cut,
        });
    }
    let dim = 2 * k_cut + 1;
    let n = grid.n_theta();
    let mut matrix: Array2<Complex64> = Array2::zeros((dim, dim));
    for col in 0..dim {
        let k = col as i64 - k_cut as i64;
        for row in 0..dim {
            let j = row as i64 - k_cut as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                let theta = std::f64::consts::TAU * m as f64 / n as f64;
                let kernel = Complex64::from_polar(1.0, -((j - k) as f64) * theta);
                acc += grid.values()[[m, col]] * kernel;
            }
            matrix[[row, col]] = acc / n as f64;
        }
    }
    Ok(TruncatedOperator::new(matrix, Provenance::RawQuantization))
}

/// Scalar Cayley transform `H = i (u + 1)/(u - 1)` for `u = e^{i phi}`,
/// which reduces to `cot(phi / 2)`.
pub fn scalar_cayley(phi: f64) -> Result<f64, OracleError> {
    let half = 0.5 * phi;
    if half.sin().abs() < 1e-12 {
        return Err(OracleError::CayleyPole);
    }
    Ok(half.cos() / half.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleop::{min_theta_samples, quantize};
    use crate::linalg;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;

    #[test]
    fn romberg_zero_potential() {
        let p = Potential::zero(2);
        let r = romberg_phase(&p, &[1.0, 0.0], &[0.0, 1.0], 16).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn romberg_dipole_closed_form() {
        let p = Potential::dipole(1.0);
        let r = romberg_phase(&p, &[-1.0, 0.0], &[0.0, 1.0], 18).unwrap();
        let expected = -std::f64::consts::PI / 2f64.sqrt();
        assert!(
            (r.value - expected).abs() <= 1e-7,
            "value {} vs {}",
            r.value,
            expected
        );
    }

    #[test]
    fn romberg_radial_log() {
        let p = Potential::radial_power_log(1.0);
        let r = romberg_phase(&p, &[0.0, 3.0], &[1.0, 0.0], 18).unwrap();
        assert!((r.value - 10f64.ln()).abs() <= 1e-7, "value {}", r.value);
    }

    #[test]
    fn direct_quantize_trivial_symbols() {
        let k = 5;
        let g = SymbolGrid::from_symbol_fn(
            |_, _| Complex64::new(1.0, 0.0),
            k,
            min_theta_samples(k),
        )
        .unwrap();
        let op = direct_quantize(&g).unwrap();
        assert!(linalg::opnorm(&(op.matrix() - &linalg::identity(2 * k + 1))) <= 1e-13);

        let g = SymbolGrid::from_symbol_fn(
            |theta, _| Complex64::from_polar(1.0, theta),
            k,
            min_theta_samples(k),
        )
        .unwrap();
        let op = direct_quantize(&g).unwrap();
        for row in 0..op.dim() {
            for col in 0..op.dim() {
                let expected = if row == col + 1 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(op.matrix()[[row, col]].re, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn direct_and_fast_quantization_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..10 {
            let k = 4 + (trial % 3) * 6; // 4, 10, 16
            let n = min_theta_samples(k);
            // random smooth symbol: a few low angular harmonics with
            // k-dependent unimodular factors
            let harmonics: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| {
                    (
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.5..2.0),
                    )
                })
                .collect();
            let g = SymbolGrid::from_symbol_fn(
                |theta, kk| {
                    let mut z = Complex64::new(0.2, 0.0);
                    for (h, (a, b, w)) in harmonics.iter().enumerate() {
                        let phase = (h as f64 + 1.0) * theta;
                        z += Complex64::new(*a, *b)
                            * Complex64::from_polar(1.0, phase)
                            * Complex64::from_polar(1.0, w * kk / (1.0 + kk * kk).sqrt());
                    }
                    z
                },
                k,
                n,
            )
            .unwrap();
            let fast = quantize(&g);
            let direct = direct_quantize(&g).unwrap();
            let diff = fast.matrix() - direct.matrix();
            assert!(
                linalg::max_abs(&diff) <= 1e-12,
                "K = {k}: max deviation {}",
                linalg::max_abs(&diff)
            );
        }
    }

    #[test]
    fn direct_quantize_cost_guard() {
        let k = 65;
        let g = SymbolGrid::from_symbol_fn(
            |_, _| Complex64::new(1.0, 0.0),
            k,
            min_theta_samples(k),
        )
        .unwrap();
        assert!(matches!(
            direct_quantize(&g),
            Err(OracleError::CutoffTooLarge { .. })
        ));
    }

    #[test]
    fn scalar_cayley_values() {
        assert_abs_diff_eq!(
            scalar_cayley(std::f64::consts::FRAC_PI_2).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(scalar_cayley(std::f64::consts::PI).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            scalar_cayley(std::f64::consts::FRAC_PI_3).unwrap(),
            3f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(matches!(scalar_cayley(0.0), Err(OracleError::CayleyPole)));
    }
}
