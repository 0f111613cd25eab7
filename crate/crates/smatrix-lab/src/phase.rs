//! Scattering phase functions and the principal symbol they generate.
//!
//! The central object is the accumulated phase of a free trajectory offset
//! by `x` relative to the unshifted one,
//!
//! ```text
//! psi(x, xi) = integral over t of V(x + t xi) - V(t xi),
//! ```
//!
//! evaluated for unit `xi` and (in the coordinate chart on the circle)
//! `x` perpendicular to `xi`. The integrand is always formed as a pointwise
//! difference before integrating: each term separately only has a
//! logarithmically divergent antiderivative. The improper integral is
//! compactified by `t = tan(u)` and handled by the adaptive Gauss-Kronrod
//! engine in [`crate::quad`].

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::potentials::{eval_potential, Potential, PotentialError};
use crate::quad::{self, QuadError, QuadSpec};

/// Quadrature controls exposed on the configuration surface.
pub type QuadratureSpec = QuadSpec;

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error("quadrature failure: {0}")]
    Quadrature(#[from] QuadError),
    #[error("potential failure: {0}")]
    Potential(#[from] PotentialError),
    #[error("xi must be a unit vector (|xi| = {norm})")]
    NotUnitDirection { norm: f64 },
    #[error("closed form not available for family {family}")]
    UnsupportedFamily { family: &'static str },
    #[error("energy must be positive, got {lambda}")]
    NonPositiveEnergy { lambda: f64 },
    #[error("input dimensions disagree: |x| = {x_len}, |xi| = {xi_len}")]
    DimensionMismatch { x_len: usize, xi_len: usize },
}

/// How a phase value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseMethod {
    ClosedForm,
    Quadrature,
}

/// A phase value with its accuracy metadata.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseResult {
    pub value: f64,
    /// Estimated absolute error; exactly zero for closed forms.
    pub abs_error_estimate: f64,
    pub method: PhaseMethod,
    /// Effective half-width of the t-window covered by quadrature nodes
    /// (infinite-precision closed forms report infinity).
    pub truncation_t: f64,
}

impl PhaseResult {
    pub fn closed_form(value: f64) -> Self {
        PhaseResult {
            value,
            abs_error_estimate: 0.0,
            method: PhaseMethod::ClosedForm,
            truncation_t: f64::INFINITY,
        }
    }
}

/// Point of the cotangent bundle of the circle in the chart
/// `xi = (cos theta, sin theta)`, `x = (-omega sin theta, omega cos theta)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CirclePoint {
    pub theta: f64,
    pub omega: f64,
}

impl CirclePoint {
    pub fn new(theta: f64, omega: f64) -> Self {
        CirclePoint { theta, omega }
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    /// The cotangent vector; orthogonal to `direction` by construction.
    pub fn cotangent(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [-self.omega * s, self.omega * c]
    }
}

type VelocityField = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Free dispersion relation, through its group velocity `v(xi)`.
#[derive(Clone)]
pub enum Dispersion {
    /// `p0(xi) = |xi|^2 / 2`, so `v(xi) = xi`.
    SchrodingerHalfLaplacian,
    /// User-supplied velocity field.
    Custom(std::sync::Arc<VelocityField>),
}

impl std::fmt::Debug for Dispersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dispersion::SchrodingerHalfLaplacian => write!(f, "SchrodingerHalfLaplacian"),
            Dispersion::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Dispersion {
    pub fn velocity(&self, xi: &[f64]) -> Vec<f64> {
        match self {
            Dispersion::SchrodingerHalfLaplacian => xi.to_vec(),
            Dispersion::Custom(v) => v(xi),
        }
    }
}

fn check_inputs(x: &[f64], xi: &[f64]) -> Result<(), PhaseError> {
    if x.len() != xi.len() {
        return Err(PhaseError::DimensionMismatch {
            x_len: x.len(),
            xi_len: xi.len(),
        });
    }
    let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(PhaseError::NotUnitDirection { norm: n });
    }
    Ok(())
}

/// Difference integrand `V(x + t v) - V(t v)` as a closure over `t`.
fn difference_integrand<'a>(
    p: &'a Potential,
    x: &'a [f64],
    v: &'a [f64],
) -> impl FnMut(f64) -> f64 + 'a {
    let d = x.len();
    let mut shifted = vec![0.0; d];
    let mut free = vec![0.0; d];
    move |t: f64| {
        for i in 0..d {
            free[i] = t * v[i];
            shifted[i] = x[i] + free[i];
        }
        let a = eval_potential(p, &shifted).unwrap_or(f64::NAN);
        let b = eval_potential(p, &free).unwrap_or(f64::NAN);
        a - b
    }
}

/// Phase over the whole line: `psi(x, xi) = int (V(x + t xi) - V(t xi)) dt`.
pub fn phase_full_line(
    p: &Potential,
    x: &[f64],
    xi: &[f64],
    spec: &QuadratureSpec,
) -> Result<PhaseResult, PhaseError> {
    check_inputs(x, xi)?;
    if x.iter().all(|&v| v == 0.0) {
        return Ok(PhaseResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            method: PhaseMethod::Quadrature,
            truncation_t: f64::INFINITY,
        });
    }
    let res = quad::integrate_real_line(difference_integrand(p, x, xi), spec)?;
    Ok(PhaseResult {
        value: res.value,
        abs_error_estimate: res.abs_error,
        method: PhaseMethod::Quadrature,
        truncation_t: res.max_abscissa,
    })
}

/// Outgoing (`sign = +1`) or incoming (`sign = -1`) half-line phase
/// `psi_pm(x, xi) = int_0^(pm inf) (V(x + t v(xi)) - V(t v(xi))) dt`.
pub fn phase_half_line(
    p: &Potential,
    x: &[f64],
    xi: &[f64],
    sign: i32,
    disp: &Dispersion,
    spec: &QuadratureSpec,
) -> Result<PhaseResult, PhaseError> {
    check_inputs(x, xi)?;
    let v = disp.velocity(xi);
    if x.iter().all(|&c| c == 0.0) {
        return Ok(PhaseResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            method: PhaseMethod::Quadrature,
            truncation_t: f64::INFINITY,
        });
    }
    let res = quad::integrate_half_line(difference_integrand(p, x, &v), sign, spec)?;
    Ok(PhaseResult {
        value: res.value,
        abs_error_estimate: res.abs_error,
        method: PhaseMethod::Quadrature,
        truncation_t: res.max_abscissa,
    })
}

/// Exact phase for the families that admit one:
///
/// * `Dipole(a)`: `psi = -a pi sin(theta) omega / <omega>`;
/// * `RadialPowerLog(c)`: `psi = c log(1 + omega^2)`.
pub fn phase_closed_form(p: &Potential, pt: CirclePoint) -> Result<PhaseResult, PhaseError> {
    match p {
        Potential::Dipole { amplitude } => {
            let jap = (1.0 + pt.omega * pt.omega).sqrt();
            Ok(PhaseResult::closed_form(
                -amplitude * std::f64::consts::PI * pt.theta.sin() * pt.omega / jap,
            ))
        }
        Potential::RadialPowerLog { strength } => Ok(PhaseResult::closed_form(
            strength * (1.0 + pt.omega * pt.omega).ln(),
        )),
        other => Err(PhaseError::UnsupportedFamily {
            family: other.family_name(),
        }),
    }
}

/// Whether [`phase_closed_form`] supports this family.
pub fn has_closed_form(p: &Potential) -> bool {
    matches!(
        p,
        Potential::Dipole { .. } | Potential::RadialPowerLog { .. }
    )
}

/// Principal symbol value at energy `lambda` for a phase value `psi`:
/// `s0 = exp(-i (2 lambda)^(-1/2) psi)`. Unimodular by construction.
pub fn principal_symbol(lambda: f64, psi: f64) -> Result<Complex64, PhaseError> {
    if lambda <= 0.0 {
        return Err(PhaseError::NonPositiveEnergy { lambda });
    }
    Ok(Complex64::from_polar(1.0, -psi / (2.0 * lambda).sqrt()))
}

/// The energy scaling factor `(2 lambda)^(-1/2)` applied to phases.
pub fn energy_scale(lambda: f64) -> Result<f64, PhaseError> {
    if lambda <= 0.0 {
        return Err(PhaseError::NonPositiveEnergy { lambda });
    }
    Ok(1.0 / (2.0 * lambda).sqrt())
}

/// Residual of the eikonal relation `v(xi) . grad_x psi_pm + V(x) = 0`,
/// with the gradient taken by central differences of the half-line phase
/// (step `1e-5 max(1, |x|)`).
///
/// [`phase_half_line`] integrates both half lines with the standard
/// orientation so that the two halves sum to the full-line phase; the
/// incoming relation therefore reads `v . grad psi_minus - V(x) = 0`, and
/// the residual is formed as `|v . grad psi_pm + sign * V(x)|`.
pub fn eikonal_residual(
    p: &Potential,
    x: &[f64],
    xi: &[f64],
    sign: i32,
    disp: &Dispersion,
    spec: &QuadratureSpec,
) -> Result<f64, PhaseError> {
    check_inputs(x, xi)?;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = 1e-5 * r.max(1.0);
    let v = disp.velocity(xi);
    let mut dot = 0.0;
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let plus = phase_half_line(p, &xp, xi, sign, disp, spec)?.value;
        xp[i] = x[i] - h;
        let minus = phase_half_line(p, &xp, xi, sign, disp, spec)?.value;
        xp[i] = x[i];
        dot += v[i] * (plus - minus) / (2.0 * h);
    }
    Ok((dot + sign.signum() as f64 * eval_potential(p, x)?).abs())
}

/// Log-growth diagnostics of `psi` along rays.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    /// One row per direction: psi sampled at the given radii.
    pub psi_values: Vec<Vec<f64>>,
    /// Least-squares slope of psi against log r, per direction.
    pub slopes: Vec<f64>,
    pub min_slope: f64,
    pub mean_slope: f64,
    /// Largest absolute fit residual across all directions.
    pub max_fit_residual: f64,
    pub sup_abs_psi: f64,
}

impl GrowthReport {
    /// True when every directional slope clears `lower_bound` minus 10% slack.
    pub fn slope_at_least(&self, lower_bound: f64) -> bool {
        self.min_slope >= lower_bound - 0.1 * lower_bound.abs()
    }
}

/// Sample `psi(r)` on rays `x = r (-sin theta, cos theta)`, `xi =
/// (cos theta, sin theta)` and fit `A log r + B` per direction.
pub fn phase_growth_check(
    p: &Potential,
    radii: &[f64],
    directions: &[f64],
    spec: &QuadratureSpec,
) -> Result<GrowthReport, PhaseError> {
    assert!(radii.len() >= 2, "need at least two radii for a slope");
    let mut psi_values = Vec::with_capacity(directions.len());
    let mut slopes = Vec::with_capacity(directions.len());
    let mut max_fit_residual = 0.0f64;
    let mut sup_abs_psi = 0.0f64;

    for &theta in directions {
        let mut row = Vec::with_capacity(radii.len());
        for &r in radii {
            let pt = CirclePoint::new(theta, r);
            let value = if has_closed_form(p) {
                phase_closed_form(p, pt)?.value
            } else {
                phase_full_line(p, &pt.cotangent(), &pt.direction(), spec)?.value
            };
            sup_abs_psi = sup_abs_psi.max(value.abs());
            row.push(value);
        }
        let (slope, intercept) = fit_line(
            &radii.iter().map(|r| r.ln()).collect::<Vec<_>>(),
            &row,
        );
        for (r, v) in radii.iter().zip(row.iter()) {
            max_fit_residual = max_fit_residual.max((v - (slope * r.ln() + intercept)).abs());
        }
        slopes.push(slope);
        psi_values.push(row);
    }

    let min_slope = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean_slope = slopes.iter().sum::<f64>() / slopes.len() as f64;
    Ok(GrowthReport {
        radii: radii.to_vec(),
        psi_values,
        slopes,
        min_slope,
        mean_slope,
        max_fit_residual,
        sup_abs_psi,
    })
}

fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// One entry of the reference-integral suite.
#[derive(Debug, Clone, Serialize)]
pub struct KnownIntegral {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub abs_error_estimate: f64,
}

/// Evaluate the module's quadrature against integrals with elementary
/// values:
///
/// * `int_0^inf (a^2 + t^2)^(-3/2) dt = a^-2`
/// * `int_0^inf t (a^2 + t^2)^(-3/2) dt = a^-1`
/// * `int_R (b^2 + t^2)^(-2) dt = pi / (2 b^3)`
pub fn known_integrals_suite(spec: &QuadratureSpec) -> Result<Vec<KnownIntegral>, PhaseError> {
    let params = [0.5, 1.0, 2.0, 5.0];
    let mut out = Vec::new();
    for &a in &params {
        let r = quad::integrate_half_line(|t| (a * a + t * t).powf(-1.5), 1, spec)?;
        out.push(KnownIntegral {
            name: format!("int_0^inf (a^2+t^2)^-3/2, a={a}"),
            computed: r.value,
            expected: a.powi(-2),
            abs_error_estimate: r.abs_error,
        });
        let r = quad::integrate_half_line(|t| t * (a * a + t * t).powf(-1.5), 1, spec)?;
        out.push(KnownIntegral {
            name: format!("int_0^inf t (a^2+t^2)^-3/2, a={a}"),
            computed: r.value,
            expected: a.recip(),
            abs_error_estimate: r.abs_error,
        });
        let r = quad::integrate_real_line(|t| (a * a + t * t).powi(-2), spec)?;
        out.push(KnownIntegral {
            name: format!("int_R (b^2+t^2)^-2, b={a}"),
            computed: r.value,
            expected: std::f64::consts::PI / (2.0 * a.powi(3)),
            abs_error_estimate: r.abs_error,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn zero_offset_gives_zero_phase() {
        let p = Potential::dipole(1.0);
        let r = phase_full_line(&p, &[0.0, 0.0], &[1.0, 0.0], &spec()).unwrap();
        assert_eq!(r.value, 0.0);
        for sign in [-1, 1] {
            let r = phase_half_line(
                &p,
                &[0.0, 0.0],
                &[1.0, 0.0],
                sign,
                &Dispersion::SchrodingerHalfLaplacian,
                &spec(),
            )
            .unwrap();
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn radial_log_closed_form_at_r3() {
        // ln(1 + 9) = ln 10
        let p = Potential::radial_power_log(1.0);
        let pt = CirclePoint::new(0.3, 3.0);
        let cf = phase_closed_form(&p, pt).unwrap();
        assert_abs_diff_eq!(cf.value, 10f64.ln(), epsilon = 1e-14);
        let q = phase_full_line(&p, &pt.cotangent(), &pt.direction(), &spec()).unwrap();
        assert_abs_diff_eq!(q.value, 10f64.ln(), epsilon = 1e-9);
        assert!(q.abs_error_estimate <= spec().tol);
    }

    #[test]
    fn dipole_quadrature_matches_closed_form_value() {
        let p = Potential::dipole(1.0);
        let pt = CirclePoint::new(std::f64::consts::FRAC_PI_2, 1.0);
        let x = pt.cotangent();
        assert_abs_diff_eq!(x[0], -1.0, epsilon = 1e-15);
        let q = phase_full_line(&p, &x, &pt.direction(), &spec()).unwrap();
        let expected = -std::f64::consts::PI / 2f64.sqrt();
        assert_abs_diff_eq!(q.value, expected, epsilon = 1e-8);
        let cf = phase_closed_form(&p, pt).unwrap();
        assert_abs_diff_eq!(cf.value, expected, epsilon = 1e-14);
        assert_eq!(cf.abs_error_estimate, 0.0);
    }

    #[test]
    fn dipole_closed_form_examples() {
        let p = Potential::dipole(1.0);
        for omega in [-3.0, 0.5, 7.0] {
            let cf = phase_closed_form(&p, CirclePoint::new(0.0, omega)).unwrap();
            assert_eq!(cf.value, 0.0);
        }
        let p2 = Potential::dipole(2.0);
        let cf = phase_closed_form(&p2, CirclePoint::new(std::f64::consts::FRAC_PI_4, 2.0)).unwrap();
        // -2 pi sin(pi/4) * 2/sqrt(5); confirmed against quadrature below
        let expected = -2.0 * std::f64::consts::PI * (0.5f64.sqrt()) * (2.0 / 5f64.sqrt());
        assert_abs_diff_eq!(cf.value, expected, epsilon = 1e-12);
        let pt = CirclePoint::new(std::f64::consts::FRAC_PI_4, 2.0);
        let q = phase_full_line(&p2, &pt.cotangent(), &pt.direction(), &spec()).unwrap();
        assert_abs_diff_eq!(q.value, expected, epsilon = 1e-8);
    }

    #[test]
    fn closed_form_rejects_other_families() {
        let p = Potential::angular_over_r(
            crate::potentials::TrigPoly::new(2.0, vec![0.5], vec![]),
            5.0,
        );
        assert!(matches!(
            phase_closed_form(&p, CirclePoint::new(0.0, 1.0)),
            Err(PhaseError::UnsupportedFamily { .. })
        ));
    }

    #[test]
    fn quadrature_matches_closed_form_randomly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for p in [
            Potential::dipole(0.7),
            Potential::radial_power_log(1.2),
        ] {
            for _ in 0..25 {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let omega = rng.gen_range(-50.0..50.0);
                let pt = CirclePoint::new(theta, omega);
                let cf = phase_closed_form(&p, pt).unwrap();
                let q = phase_full_line(&p, &pt.cotangent(), &pt.direction(), &spec()).unwrap();
                assert_abs_diff_eq!(q.value, cf.value, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn dipole_phase_oddness_on_quadrature_path() {
        let p = Potential::dipole(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let omega = rng.gen_range(0.1..30.0);
            let psi = |th: f64, om: f64| {
                let pt = CirclePoint::new(th, om);
                phase_full_line(&p, &pt.cotangent(), &pt.direction(), &spec())
                    .unwrap()
                    .value
            };
            let base = psi(theta, omega);
            assert_abs_diff_eq!(psi(-theta, omega), -base, epsilon = 1e-8);
            assert_abs_diff_eq!(psi(theta, -omega), -base, epsilon = 1e-8);
        }
    }

    #[test]
    fn half_line_symmetry_and_additivity() {
        let p = Potential::dipole(1.0);
        let disp = Dispersion::SchrodingerHalfLaplacian;
        // x = (-1, 0), xi = (0, 1): V(x + t xi) is even in t, so the two
        // half-line phases agree and are each half the full-line value.
        let x = [-1.0, 0.0];
        let xi = [0.0, 1.0];
        let plus = phase_half_line(&p, &x, &xi, 1, &disp, &spec()).unwrap();
        let minus = phase_half_line(&p, &x, &xi, -1, &disp, &spec()).unwrap();
        let expected_half = -std::f64::consts::PI / (2.0 * 2f64.sqrt());
        assert_abs_diff_eq!(plus.value, expected_half, epsilon = 1e-8);
        assert_abs_diff_eq!(minus.value, expected_half, epsilon = 1e-8);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [
            Potential::dipole(0.5),
            Potential::radial_power_log(1.0),
            Potential::angular_over_r(
                crate::potentials::TrigPoly::new(2.0, vec![0.5], vec![]),
                5.0,
            ),
        ] {
            for _ in 0..15 {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let omega = rng.gen_range(-20.0..20.0);
                let pt = CirclePoint::new(theta, omega);
                let x = pt.cotangent();
                let xi = pt.direction();
                let full = phase_full_line(&p, &x, &xi, &spec()).unwrap();
                let plus = phase_half_line(&p, &x, &xi, 1, &disp, &spec()).unwrap();
                let minus = phase_half_line(&p, &x, &xi, -1, &disp, &spec()).unwrap();
                let tol = 2.0 * (full.abs_error_estimate
                    + plus.abs_error_estimate
                    + minus.abs_error_estimate)
                    + 1e-12;
                assert!(
                    (plus.value + minus.value - full.value).abs() <= tol,
                    "additivity violated for {}",
                    p.family_name()
                );
            }
        }
    }

    #[test]
    fn principal_symbol_values() {
        assert_eq!(
            principal_symbol(0.37, 0.0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let z = principal_symbol(0.5, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(z.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        let z = principal_symbol(2.0, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, -1.0, epsilon = 1e-15);
        assert!(matches!(
            principal_symbol(0.0, 1.0),
            Err(PhaseError::NonPositiveEnergy { .. })
        ));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn principal_symbol_is_unimodular(lambda in 1e-3f64..1e3, psi in -1e4f64..1e4) {
                let z = principal_symbol(lambda, psi).unwrap();
                prop_assert!((z.norm() - 1.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn eikonal_residual_small_for_builtins() {
        let disp = Dispersion::SchrodingerHalfLaplacian;
        let tight = QuadratureSpec::with_tol(1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let p = Potential::dipole(1.0);
        for _ in 0..20 {
            let r = rng.gen_range(1.0..50.0);
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = [r * ang.cos(), r * ang.sin()];
            let dir = rng.gen_range(0.0..std::f64::consts::TAU);
            let xi = [dir.cos(), dir.sin()];
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let res = eikonal_residual(&p, &x, &xi, sign, &disp, &tight).unwrap();
            assert!(res <= 1e-5, "residual {res} at x={x:?}");
        }
        let p = Potential::radial_power_log(1.0);
        let res = eikonal_residual(&p, &[5.0, 0.0], &[0.0, 1.0], 1, &disp, &tight).unwrap();
        assert!(res <= 1e-5);

        let zero = Potential::zero(2);
        let res = eikonal_residual(&zero, &[2.0, 1.0], &[1.0, 0.0], 1, &disp, &tight).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn growth_slopes() {
        let radii: Vec<f64> = (0..12).map(|i| 10f64.powf(1.0 + 2.0 * i as f64 / 11.0)).collect();
        let dirs = [0.0, 1.0, 2.5];

        let p = Potential::radial_power_log(1.0);
        let rep = phase_growth_check(&p, &radii, &dirs, &spec()).unwrap();
        for s in &rep.slopes {
            assert_abs_diff_eq!(*s, 2.0, epsilon = 0.05);
        }
        assert!(rep.slope_at_least(2.0));

        let p = Potential::angular_over_r(
            crate::potentials::TrigPoly::new(2.0, vec![0.5], vec![]),
            5.0,
        );
        let rep = phase_growth_check(&p, &radii, &dirs, &spec()).unwrap();
        // lower bound 2 (c1 - c2) = 2 (1.5 - 0.5)
        assert!(rep.slope_at_least(2.0), "slopes {:?}", rep.slopes);

        let p = Potential::dipole(1.0);
        let rep = phase_growth_check(&p, &radii, &dirs, &spec()).unwrap();
        assert!(rep.sup_abs_psi <= std::f64::consts::PI + 0.1);
        assert!(rep.slopes.iter().all(|s| s.abs() < 0.1));
    }

    #[test]
    fn phase_derivatives_respect_decay_envelopes() {
        // The transverse-derivative bound is |d psi / d omega| <= C / <omega>.
        // The log-growing family saturates it: d/d omega of c log(1 + omega^2)
        // is 2 c omega / (1 + omega^2) ~ 2 c / omega, so omega * d psi stays
        // within a constant. The dipole phase is bounded and decays faster;
        // it must stay below the same envelope.
        let dpsi = |p: &Potential, omega: f64| {
            let h = 1e-5 * omega.max(1.0);
            let at = |om: f64| {
                let pt = CirclePoint::new(std::f64::consts::FRAC_PI_4, om);
                phase_full_line(p, &pt.cotangent(), &pt.direction(), &spec())
                    .unwrap()
                    .value
            };
            (at(omega + h) - at(omega - h)) / (2.0 * h)
        };

        let radial = Potential::radial_power_log(1.0);
        let base = dpsi(&radial, 10.0) * 10.0;
        for omega in [100.0, 1000.0] {
            let scaled = dpsi(&radial, omega) * omega;
            assert!(
                scaled / base <= 3.0 && scaled / base >= 1.0 / 3.0,
                "omega {omega}: scaled {scaled} vs base {base}"
            );
        }

        let dipole = Potential::dipole(1.0);
        let envelope = dpsi(&dipole, 10.0).abs() * 10.0;
        for omega in [100.0, 1000.0] {
            let scaled = dpsi(&dipole, omega).abs() * omega;
            assert!(
                scaled <= 3.0 * envelope.max(std::f64::consts::PI),
                "omega {omega}: dipole derivative {scaled} escapes the 1/omega envelope"
            );
        }

        // direction derivative: |d psi / d theta| stays below a fixed
        // multiple of <log <omega>> (it is bounded outright for the dipole)
        for omega in [10.0, 100.0, 1000.0] {
            let h = 1e-6;
            let at = |th: f64| {
                let pt = CirclePoint::new(th, omega);
                phase_closed_form(&dipole, pt).unwrap().value
            };
            let dtheta = (at(0.3 + h) - at(0.3 - h)) / (2.0 * h);
            let log_weight = (1.0 + (1.0f64 + omega * omega).sqrt().ln().powi(2)).sqrt();
            assert!(
                dtheta.abs() <= std::f64::consts::PI * log_weight,
                "omega {omega}: theta-derivative {dtheta}"
            );
        }
    }

    #[test]
    fn known_integrals_reproduce_reference_values() {
        let suite = known_integrals_suite(&spec()).unwrap();
        assert_eq!(suite.len(), 12);
        for item in &suite {
            let rel = (item.computed - item.expected).abs() / item.expected.abs();
            assert!(rel <= 1e-9, "{}: rel err {rel}", item.name);
        }
    }

    #[test]
    fn circle_point_orthogonality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let pt = CirclePoint::new(
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(-1e3..1e3),
            );
            let x = pt.cotangent();
            let xi = pt.direction();
            let dot = x[0] * xi[0] + x[1] * xi[1];
            assert!(dot.abs() <= 1e-14 * (1.0 + pt.omega.abs()));
        }
    }

    #[test]
    fn rejects_non_unit_direction() {
        let p = Potential::dipole(1.0);
        assert!(matches!(
            phase_full_line(&p, &[1.0, 0.0], &[0.0, 1.1], &spec()),
            Err(PhaseError::NotUnitDirection { .. })
        ));
    }
}
