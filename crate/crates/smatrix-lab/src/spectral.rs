//! Eigenphase analysis of truncated unitary operators: arc coverage of the
//! essential spectrum, circular gap statistics, quasimode (Weyl sequence)
//! residuals, commutator positivity, and the trace-class comparison bridge.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circleop::{
    resolvent_identity_check, OperatorError, TruncatedOperator,
};
use crate::fourier::FourierSeries;
use crate::linalg::{self, CMat};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("operator error: {0}")]
    Operator(#[from] OperatorError),
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(
        "no root of the phase condition at or beyond radius {min_radius} below the mode \
         cutoff {mode_cutoff} (phase reaches {achieved:.6}, target {target:.6})"
    )]
    RootNotFound {
        min_radius: f64,
        mode_cutoff: usize,
        achieved: f64,
        target: f64,
    },
    #[error(
        "cutoff support half-width {support:.6} must stay {margin:.3} away from the arc \
         endpoint {endpoint:.6}"
    )]
    CutoffOverlapsEndpoints {
        support: f64,
        endpoint: f64,
        margin: f64,
    },
    #[error("need at least {needed} eigenphases, got {got}")]
    TooFewPhases { needed: usize, got: usize },
}

/// Aggregate spectral summary of one truncated operator.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub mode_cutoff: usize,
    /// Sorted into `(-pi, pi]`; always exactly `2 K + 1` entries.
    pub eigenphases: Vec<f64>,
    pub arc: Option<ArcCoverage>,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub mourre_lower_bound: Option<f64>,
    pub quasimode_residuals: Option<Vec<QuasimodeSample>>,
}

impl SpectrumReport {
    /// Eigenphases plus gap statistics; arc/Mourre/quasimode sections are
    /// attached by the callers that compute them.
    pub fn from_operator(u: &TruncatedOperator) -> Result<Self, SpectralError> {
        let eig = eigendecompose(u)?;
        let gaps = gap_statistics(&eig.phases)?;
        Ok(SpectrumReport {
            mode_cutoff: u.mode_cutoff(),
            eigenphases: eig.phases,
            arc: None,
            max_gap: gaps.max_gap,
            mean_gap: gaps.mean_gap,
            mourre_lower_bound: None,
            quasimode_residuals: None,
        })
    }
}

/// Eigenphases (sorted into `(-pi, pi]`) with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    /// Column `j` is the eigenvector for `phases[j]`.
    pub vectors: CMat,
    /// Largest per-pair residual `||U v - e^{i phi} v||`.
    pub max_residual: f64,
    /// Largest deviation of eigenvalue moduli from one.
    pub max_modulus_deviation: f64,
}

fn wrap_phase(phi: f64) -> f64 {
    // into (-pi, pi]
    let mut p = phi.rem_euclid(std::f64::consts::TAU);
    if p > std::f64::consts::PI {
        p -= std::f64::consts::TAU;
    }
    p
}

/// Eigendecompose a unitary truncated operator. The result is sorted by
/// phase; failure is surfaced, never silent.
pub fn eigendecompose(u: &TruncatedOperator) -> Result<UnitaryEigen, SpectralError> {
    u.require_unitary(1e-10)?;
    let (vals, vecs) = linalg::eig_unitary(u.matrix(), 1e-9)?;
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    let phases_raw: Vec<f64> = vals.iter().map(|v| v.arg()).collect();
    order.sort_by(|&a, &b| {
        phases_raw[a]
            .partial_cmp(&phases_raw[b])
            .expect("phases are finite")
    });
    let mut vectors: CMat = Array2::zeros((n, n));
    let mut phases = Vec::with_capacity(n);
    let mut max_modulus_deviation = 0.0f64;
    for (slot, &j) in order.iter().enumerate() {
        phases.push(phases_raw[j]);
        max_modulus_deviation = max_modulus_deviation.max((vals[j].norm() - 1.0).abs());
        for r in 0..n {
            vectors[[r, slot]] = vecs[[r, j]];
        }
    }
    // residuals against the sorted pairs
    let mv = u.matrix().dot(&vectors);
    let mut max_residual = 0.0f64;
    for j in 0..n {
        let lambda = Complex64::from_polar(1.0, phases[j]);
        let mut acc = 0.0f64;
        for r in 0..n {
            acc += (mv[[r, j]] - lambda * vectors[[r, j]]).norm_sqr();
        }
        max_residual = max_residual.max(acc.sqrt());
    }
    Ok(UnitaryEigen {
        phases,
        vectors,
        max_residual,
        max_modulus_deviation,
    })
}

/// Arc-coverage statistics against the arc `|tau| <= tau_max` with
/// `tau_max = |a| pi (2 lambda)^{-1/2}` (clamped to the whole circle).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArcCoverage {
    pub tau_max: f64,
    pub epsilon: f64,
    pub inside_fraction: f64,
    pub outlier_count: usize,
    /// Number of phases within `epsilon` of either arc endpoint.
    pub boundary_accumulation: usize,
}

pub fn arc_coverage(phases: &[f64], a: f64, lambda: f64, epsilon: f64) -> ArcCoverage {
    assert!(lambda > 0.0, "energy must be positive");
    let tau_raw = a.abs() * std::f64::consts::PI / (2.0 * lambda).sqrt();
    let tau_max = tau_raw.min(std::f64::consts::PI);
    let mut inside = 0usize;
    let mut boundary = 0usize;
    for &p in phases {
        if p.abs() <= tau_max + epsilon {
            inside += 1;
        }
        if (p.abs() - tau_max).abs() <= epsilon {
            boundary += 1;
        }
    }
    ArcCoverage {
        tau_max,
        epsilon,
        inside_fraction: inside as f64 / phases.len().max(1) as f64,
        outlier_count: phases.len() - inside,
        boundary_accumulation: boundary,
    }
}

/// Circular gap statistics of a set of phases.
#[derive(Debug, Clone, Serialize)]
pub struct GapStats {
    pub max_gap: f64,
    pub mean_gap: f64,
    /// Counts of gap / mean_gap in 16 uniform bins over [0, 4), plus one
    /// overflow bin.
    pub histogram: Vec<usize>,
}

pub fn gap_statistics(phases: &[f64]) -> Result<GapStats, SpectralError> {
    if phases.is_empty() {
        return Err(SpectralError::TooFewPhases { needed: 1, got: 0 });
    }
    if phases.len() == 1 {
        return Ok(GapStats {
            max_gap: std::f64::consts::TAU,
            mean_gap: std::f64::consts::TAU,
            histogram: vec![0; 17],
        });
    }
    let mut sorted: Vec<f64> = phases.iter().map(|&p| wrap_phase(p)).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
    let n = sorted.len();
    let mut gaps = Vec::with_capacity(n);
    for i in 1..n {
        gaps.push(sorted[i] - sorted[i - 1]);
    }
    gaps.push(std::f64::consts::TAU - (sorted[n - 1] - sorted[0]));
    let max_gap = gaps.iter().cloned().fold(0.0, f64::max);
    let mean_gap = std::f64::consts::TAU / n as f64;
    let mut histogram = vec![0usize; 17];
    for g in &gaps {
        let ratio = g / mean_gap;
        let bin = if ratio >= 4.0 {
            16
        } else {
            (ratio / 0.25) as usize
        };
        histogram[bin.min(16)] += 1;
    }
    Ok(GapStats {
        max_gap,
        mean_gap,
        histogram,
    })
}

/// Root selection policy for quasimode centers: take the first crossing of
/// the phase condition at or beyond each requested radius, optionally
/// skipping ahead a fixed number of 2 pi branches.
#[derive(Debug, Clone, Copy, Default)]
pub struct RootSelector {
    pub branch_offset: i64,
}

/// One quasimode trial.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuasimodeSample {
    pub n: f64,
    pub omega_root: f64,
    pub mode_center: i64,
    pub residual: f64,
}

/// Weyl-sequence test against the target eigenvalue `e^{-i theta0}`.
///
/// `psi_of_omega` must be the radial phase profile (continuous, increasing
/// for the log-growing families). For each requested radius `N` the first
/// `omega >= N` with `(2 lambda)^{-1/2} psi(omega) = theta0 (mod 2 pi)` is
/// located by bracketing and bisection; the trial state is a Fourier-side
/// Gaussian packet centered at `round(omega)` with standard deviation
/// `omega^{1/2}`, and the residual is `|<phi, U phi> - e^{-i theta0}|`.
pub fn quasimode_test<F: Fn(f64) -> f64>(
    u: &TruncatedOperator,
    psi_of_omega: F,
    lambda: f64,
    theta0: f64,
    selector: RootSelector,
    ns: &[f64],
) -> Result<Vec<QuasimodeSample>, SpectralError> {
    let beta = 1.0 / (2.0 * lambda).sqrt();
    let k_cut = u.mode_cutoff();
    let scaled = |omega: f64| beta * psi_of_omega(omega);
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let start = scaled(n);
        // Constant-phase potentials (e.g. V = 0) satisfy the condition
        // identically when theta0 matches; use the left endpoint then.
        let omega_root = if (start - theta0).rem_euclid(std::f64::consts::TAU) < 1e-12
            || (scaled(k_cut as f64) - start).abs() < 1e-14
        {
            let mismatch = (start - theta0).rem_euclid(std::f64::consts::TAU);
            let mismatch = mismatch.min(std::f64::consts::TAU - mismatch);
            if mismatch > 1e-12 {
                return Err(SpectralError::RootNotFound {
                    min_radius: n,
                    mode_cutoff: k_cut,
                    achieved: scaled(k_cut as f64),
                    target: theta0,
                });
            }
            n
        } else {
            let m = ((start - theta0) / std::f64::consts::TAU).ceil() as i64 + selector.branch_offset;
            let level = theta0 + std::f64::consts::TAU * m as f64;
            let end = scaled(k_cut as f64);
            if end < level {
                return Err(SpectralError::RootNotFound {
                    min_radius: n,
                    mode_cutoff: k_cut,
                    achieved: end,
                    target: level,
                });
            }
            let (mut lo, mut hi) = (n, k_cut as f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if scaled(mid) < level {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };

        let mode_center = omega_root.round() as i64;
        let sigma2 = omega_root.abs().max(1.0);
        let dim = u.dim();
        let mut packet: Array1<Complex64> = Array1::zeros(dim);
        for idx in 0..dim {
            let k = idx as i64 - k_cut as i64;
            let d = (k - mode_center) as f64;
            packet[idx] = Complex64::new((-d * d / (2.0 * sigma2)).exp(), 0.0);
        }
        let norm = packet.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let packet = packet.mapv(|z| z / norm);
        let image = u.matrix().dot(&packet);
        let inner: Complex64 = packet
            .iter()
            .zip(image.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let residual = (inner - Complex64::from_polar(1.0, -theta0)).norm();
        out.push(QuasimodeSample {
            n,
            omega_root,
            mode_center,
            residual,
        });
    }
    Ok(out)
}

/// The simplified positive lower bound of the commutator symbol:
/// `sin^2(theta)/<omega>^2 + cos^2(theta) omega^2/<omega>^2`.
pub fn poisson_bracket_bound(theta: f64, omega: f64) -> f64 {
    let j2 = 1.0 + omega * omega;
    let (s, c) = theta.sin_cos();
    s * s / j2 + c * c * omega * omega / j2
}

/// The same bracket `-{cos(theta) <omega>, sin(theta) omega / <omega>}`
/// evaluated from raw partial derivatives (position-first convention
/// `{f, g} = d_theta f d_omega g - d_omega f d_theta g`), with no
/// trigonometric simplification.
pub fn poisson_bracket_direct(theta: f64, omega: f64) -> f64 {
    let jap = (1.0 + omega * omega).sqrt();
    let (s, c) = theta.sin_cos();
    let f_theta = -s * jap;
    let f_omega = c * omega / jap;
    let g_theta = c * omega / jap;
    let g_omega = s * (1.0 / (jap * jap * jap));
    -(f_theta * g_omega - f_omega * g_theta)
}

/// Configuration of the commutator positivity check.
#[derive(Debug, Clone)]
pub struct MourreConfig {
    /// Arc on which the smooth cutoff equals one.
    pub arc_half_width: f64,
    /// Extra flat margin added before mollification.
    pub inner_margin: f64,
    /// Mollifier width.
    pub sigma: f64,
    /// Number of Fourier coefficients for the cutoff.
    pub kmax: usize,
    /// Endpoint phase `|a| pi (2 lambda)^{-1/2}` the cutoff must avoid.
    pub tau_max: f64,
    /// Minimum clearance between the cutoff's numerical support and the
    /// endpoints.
    pub endpoint_margin: f64,
    /// Cutoff values below this level are treated as numerically zero.
    pub rank_threshold: f64,
}

impl MourreConfig {
    pub fn new(arc_half_width: f64, tau_max: f64) -> Self {
        MourreConfig {
            arc_half_width,
            inner_margin: 0.3,
            sigma: 0.05,
            kmax: 128,
            tau_max,
            endpoint_margin: 0.05,
            rank_threshold: 1e-8,
        }
    }

    /// Half-width beyond which the cutoff is numerically zero.
    pub fn support_half_width(&self) -> f64 {
        FourierSeries::mollified_support(
            self.arc_half_width,
            self.inner_margin,
            self.sigma,
            self.rank_threshold,
        )
    }

    pub fn cutoff_series(&self) -> FourierSeries {
        FourierSeries::mollified_indicator(
            self.arc_half_width,
            self.inner_margin,
            self.sigma,
            self.kmax,
        )
    }

    /// Positive constant in the compressed lower bound: `tau_max` times the
    /// worst-case large-omega value of the bracket bound over the cutoff
    /// support.
    pub fn lower_constant(&self) -> f64 {
        let s_max = (self.support_half_width() / self.tau_max).min(1.0);
        let eps2 = 1.0 - s_max * s_max;
        self.tau_max * eps2
    }
}

/// Result of the commutator positivity check.
#[derive(Debug, Clone, Serialize)]
pub struct MourreReport {
    pub c_lower: f64,
    pub compressed_dim: usize,
    pub lowest_compressed_eigenvalue: f64,
    /// Number of compressed eigenvalues below `c_lower / 2`.
    pub below_half_c: usize,
    /// Total shortfall of those eigenvalues, a proxy for the size of the
    /// compact correction.
    pub compact_correction_norm_proxy: f64,
}

/// Central section of the self-adjoint commutator form `U* Q U - Q`.
///
/// The input operators should live at a cutoff at least `target + pad`
/// with a pad exceeding twice the symbol bandwidth: the rows of the
/// product near the truncation boundary are wrong by order `<K>`, and the
/// pad pushes that pollution outside the block that is kept.
pub fn commutator_core(
    u: &TruncatedOperator,
    q: &TruncatedOperator,
    target_cutoff: usize,
) -> TruncatedOperator {
    assert!(u.mode_cutoff() >= target_cutoff);
    assert_eq!(u.mode_cutoff(), q.mode_cutoff());
    let ustar = linalg::adjoint(u.matrix());
    let core = ustar.dot(&q.matrix().dot(u.matrix())) - q.matrix();
    let full = TruncatedOperator::new(linalg::hermitize(&core), crate::circleop::Provenance::Derived);
    full.central_section(target_cutoff)
}

/// Positivity of the compressed commutator form `U* [Q, U]` on the range
/// of the smooth spectral cutoff.
///
/// The cutoff enters through the selection of eigenvectors of `U` whose
/// cutoff value clears the rank threshold; on that subspace the sandwich
/// `f(U) U^* [Q, U] f(U) >= c f(U)^2 + compact` reduces to the compressed
/// self-adjoint matrix `U* Q U - Q` being bounded below by `c` up to a
/// correction of bounded rank. `core` must be the commutator form at the
/// same cutoff as `u`, preferably computed at a padded cutoff through
/// [`commutator_core`].
pub fn mourre_positivity(
    u: &TruncatedOperator,
    core: &TruncatedOperator,
    config: &MourreConfig,
) -> Result<MourreReport, SpectralError> {
    assert_eq!(u.mode_cutoff(), core.mode_cutoff());
    let support = config.support_half_width();
    if support + config.endpoint_margin > config.tau_max && config.tau_max < std::f64::consts::PI {
        return Err(SpectralError::CutoffOverlapsEndpoints {
            support,
            endpoint: config.tau_max,
            margin: config.endpoint_margin,
        });
    }
    let eig = eigendecompose(u)?;
    let cutoff = config.cutoff_series();
    let f_values: Vec<f64> = eig.phases.iter().map(|&p| cutoff.eval(p).re).collect();
    let selected: Vec<usize> = (0..f_values.len())
        .filter(|&j| f_values[j] >= config.rank_threshold)
        .collect();

    let c_lower = config.lower_constant();
    if selected.is_empty() {
        return Ok(MourreReport {
            c_lower,
            compressed_dim: 0,
            lowest_compressed_eigenvalue: 0.0,
            below_half_c: 0,
            compact_correction_norm_proxy: 0.0,
        });
    }

    let n = u.dim();
    let m = selected.len();
    let mut basis: CMat = Array2::zeros((n, m));
    for (slot, &j) in selected.iter().enumerate() {
        for r in 0..n {
            basis[[r, slot]] = eig.vectors[[r, j]];
        }
    }
    let compressed = linalg::adjoint(&basis).dot(&core.matrix().dot(&basis));
    let (mu, _) = linalg::hermitian_eig(&linalg::hermitize(&compressed))?;
    let lowest = mu.first().copied().unwrap_or(0.0);
    let below: Vec<f64> = mu.iter().cloned().filter(|&v| v < c_lower / 2.0).collect();
    Ok(MourreReport {
        c_lower,
        compressed_dim: m,
        lowest_compressed_eigenvalue: lowest,
        below_half_c: below.len(),
        compact_correction_norm_proxy: below.iter().map(|v| c_lower / 2.0 - v).sum(),
    })
}

/// Trace-class comparison bridge: the trace norm of the difference and the
/// Cayley resolvent-identity residual. Finite sections cannot distinguish
/// absolutely continuous spectrum, so this validates the algebra only.
#[derive(Debug, Clone, Serialize)]
pub struct AcEquivalenceReport {
    pub trace_norm_difference: f64,
    pub resolvent_identity_residual: f64,
    pub note: &'static str,
}

pub fn ac_equivalence_check(
    u1: &TruncatedOperator,
    u2: &TruncatedOperator,
) -> Result<AcEquivalenceReport, SpectralError> {
    let diff = u1.matrix() - u2.matrix();
    let trace_norm_difference = linalg::trace_norm(&diff);
    let resolvent_identity_residual = resolvent_identity_check(u1, u2)?;
    Ok(AcEquivalenceReport {
        trace_norm_difference,
        resolvent_identity_residual,
        note: "finite sections always differ by trace class; this validates the \
               Cayley transport algebra, not the spectral conclusion",
    })
}

/// Exploratory probe of the weighted resolvent `||<Q>^-1 (U - r e^{i phi})^-1 <Q>^-1||`
/// as `r` approaches the unit circle. No acceptance contract is attached.
pub fn weighted_resolvent_probe(
    u: &TruncatedOperator,
    q: &TruncatedOperator,
    phis: &[f64],
    radii: &[f64],
) -> Result<Vec<(f64, f64, f64)>, SpectralError> {
    let (qvals, qvecs) = linalg::hermitian_eig(q.matrix())?;
    let n = u.dim();
    let mut weight: CMat = Array2::zeros((n, n));
    for (j, &qv) in qvals.iter().enumerate() {
        let w = 1.0 / (1.0 + qv * qv).sqrt();
        let col = qvecs.column(j);
        for r in 0..n {
            for c in 0..n {
                weight[[r, c]] += Complex64::new(w, 0.0) * col[r] * col[c].conj();
            }
        }
    }
    let mut out = Vec::new();
    for &phi in phis {
        for &r in radii {
            let z = Complex64::from_polar(r, phi);
            let shifted = u.matrix() - &linalg::identity(n).mapv(|e| e * z);
            let inv = linalg::inverse(&shifted)?;
            let sandwiched = weight.dot(&inv.dot(&weight));
            out.push((phi, r, linalg::opnorm(&sandwiched)));
        }
    }
    Ok(out)
}

/// Hermitian-symmetrized quantization of the conjugate symbol
/// `q(theta, omega) = sgn(a) cos(theta) <omega>`.
pub fn conjugate_operator(sign_a: f64, mode_cutoff: usize) -> TruncatedOperator {
    use crate::circleop::{min_theta_samples, quantize, Provenance, SymbolGrid};
    let s = sign_a.signum();
    let grid = SymbolGrid::from_symbol_fn(
        |theta, omega| Complex64::new(s * theta.cos() * (1.0 + omega * omega).sqrt(), 0.0),
        mode_cutoff,
        min_theta_samples(mode_cutoff),
    )
    .expect("valid grid");
    let raw = quantize(&grid);
    let herm = linalg::hermitize(raw.matrix());
    TruncatedOperator::new(herm, Provenance::Derived)
}

/// Verify Weyl pairing of the truncated scattering data against the
/// closed-form eigenphases of the rotationally symmetric family.
pub fn radial_closed_form_phases(strength: f64, lambda: f64, mode_cutoff: usize) -> Vec<f64> {
    let beta = 1.0 / (2.0 * lambda).sqrt();
    (-(mode_cutoff as i64)..=mode_cutoff as i64)
        .map(|k| wrap_phase(-beta * strength * (1.0 + (k * k) as f64).ln()))
        .collect()
}
