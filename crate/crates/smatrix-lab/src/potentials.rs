//! Long-range potential families, their gradients, and numerical checks of
//! the decay hypotheses they are required to satisfy.
//!
//! The built-in families (with `<x> = (1 + |x|^2)^(1/2)`):
//!
//! * `RadialPowerLog`: `V(x) = -c / <x>`, rotationally symmetric and smooth.
//! * `Dipole` (d = 2): `V(x) = a x_1 / <x>^2`.
//! * `AngularOverR` (d = 2): `V(x) = -f(theta) / r` outside radius `R`,
//!   smoothly patched to zero inside `R/2`, with `f` a trigonometric
//!   polynomial.
//!
//! All evaluators are pure functions of their inputs.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("point has dimension {got}, potential expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires x != 0")]
    DegenerateInput,
    #[error("custom potential evaluation failed: {0}")]
    EvalFailed(String),
}

type CustomEval = dyn Fn(&[f64]) -> f64 + Send + Sync;
type CustomGradient = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// User-supplied potential, evaluated through closures. The gradient falls
/// back to central finite differences when no closed form is provided.
#[derive(Clone)]
pub struct CustomPotential {
    pub name: String,
    pub dimension: usize,
    pub value: Arc<CustomEval>,
    pub gradient: Option<Arc<CustomGradient>>,
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPotential")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .finish()
    }
}

/// Trigonometric polynomial `f(theta) = c0 + sum_j (a_j cos(j theta) + b_j sin(j theta))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    pub constant: f64,
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn new(constant: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Self {
        TrigPoly {
            constant,
            cos_coeffs,
            sin_coeffs,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.constant;
        for (j, &a) in self.cos_coeffs.iter().enumerate() {
            v += a * ((j + 1) as f64 * theta).cos();
        }
        for (j, &b) in self.sin_coeffs.iter().enumerate() {
            v += b * ((j + 1) as f64 * theta).sin();
        }
        v
    }

    pub fn deriv(&self, theta: f64) -> f64 {
        let mut v = 0.0;
        for (j, &a) in self.cos_coeffs.iter().enumerate() {
            let n = (j + 1) as f64;
            v -= a * n * (n * theta).sin();
        }
        for (j, &b) in self.sin_coeffs.iter().enumerate() {
            let n = (j + 1) as f64;
            v += b * n * (n * theta).cos();
        }
        v
    }

    /// Minimum over the circle, by dense sampling refined with golden-section
    /// polish. Good to ~1e-12 for the low-degree polynomials used here.
    pub fn min_on_circle(&self) -> f64 {
        minimize_periodic(|t| self.eval(t))
    }

    /// Maximum of |f'| over the circle.
    pub fn max_abs_deriv(&self) -> f64 {
        -minimize_periodic(|t| -self.deriv(t).abs())
    }
}

fn minimize_periodic<F: Fn(f64) -> f64>(f: F) -> f64 {
    let n = 4096;
    let mut best_t = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let (mut a, mut b) = (best_t - h, best_t + h);
    for _ in 0..200 {
        let m1 = a + (b - a) * (1.0 - 0.618_033_988_749_894_8);
        let m2 = a + (b - a) * 0.618_033_988_749_894_8;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    f(0.5 * (a + b)).min(best)
}

/// A potential on R^d from one of the built-in long-range families, or a
/// custom evaluator.
#[derive(Debug, Clone)]
pub enum Potential {
    /// `V(x) = -c / <x>`.
    RadialPowerLog { strength: f64 },
    /// `V(x) = a x_1 / <x>^2` in d = 2.
    Dipole { amplitude: f64 },
    /// `V(x) = -f(theta) w(r) / r` in d = 2, where `w` is a smoothstep that
    /// vanishes identically for `r <= R/2` and equals one for `r >= R`.
    AngularOverR { f: TrigPoly, patch_radius: f64 },
    Custom(CustomPotential),
}

impl Potential {
    pub fn radial_power_log(strength: f64) -> Self {
        Potential::RadialPowerLog { strength }
    }

    pub fn dipole(amplitude: f64) -> Self {
        Potential::Dipole { amplitude }
    }

    pub fn angular_over_r(f: TrigPoly, patch_radius: f64) -> Self {
        Potential::AngularOverR { f, patch_radius }
    }

    pub fn zero(dimension: usize) -> Self {
        Potential::Custom(CustomPotential {
            name: "zero".to_string(),
            dimension,
            value: Arc::new(|_| 0.0),
            gradient: Some(Arc::new(|x: &[f64]| vec![0.0; x.len()])),
        })
    }

    /// Fixed dimension for the planar families; `None` when any dimension
    /// is accepted.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Potential::RadialPowerLog { .. } => None,
            Potential::Dipole { .. } | Potential::AngularOverR { .. } => Some(2),
            Potential::Custom(c) => Some(c.dimension),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Potential::RadialPowerLog { .. } => "radial-power-log",
            Potential::Dipole { .. } => "dipole",
            Potential::AngularOverR { .. } => "angular-over-r",
            Potential::Custom(_) => "custom",
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), PotentialError> {
        if let Some(d) = self.dimension() {
            if x.len() != d {
                return Err(PotentialError::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        Ok(())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn jap(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// C-infinity step: 0 for u <= 0, 1 for u >= 1.
fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

fn smoothstep_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        let da = a / (u * u);
        let db = -b / ((1.0 - u) * (1.0 - u));
        (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
    }
}

/// Radial patch profile `w(r)`: 0 on `[0, R/2]`, 1 on `[R, inf)`.
fn patch(r: f64, patch_radius: f64) -> f64 {
    smoothstep((2.0 * r - patch_radius) / patch_radius)
}

fn patch_deriv(r: f64, patch_radius: f64) -> f64 {
    smoothstep_deriv((2.0 * r - patch_radius) / patch_radius) * 2.0 / patch_radius
}

/// Evaluate `V(x)`. Exact closed form for the built-in families.
pub fn eval_potential(p: &Potential, x: &[f64]) -> Result<f64, PotentialError> {
    p.check_dim(x)?;
    match p {
        Potential::RadialPowerLog { strength } => Ok(-strength / jap(x)),
        Potential::Dipole { amplitude } => {
            let j2 = 1.0 + x[0] * x[0] + x[1] * x[1];
            Ok(amplitude * x[0] / j2)
        }
        Potential::AngularOverR { f, patch_radius } => {
            let r = norm(x);
            let w = patch(r, *patch_radius);
            if w == 0.0 {
                return Ok(0.0);
            }
            let theta = x[1].atan2(x[0]);
            Ok(-f.eval(theta) * w / r)
        }
        Potential::Custom(c) => {
            let v = (c.value)(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(PotentialError::EvalFailed(format!(
                    "non-finite value at {x:?}"
                )))
            }
        }
    }
}

/// Central finite-difference gradient with per-coordinate step
/// `h = 1e-5 * max(1, |x|)`.
fn fd_gradient(
    p: &Potential,
    x: &[f64],
    h_scale: f64,
) -> Result<Vec<f64>, PotentialError> {
    let h = h_scale * norm(x).max(1.0);
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let vp = eval_potential(p, &xp)?;
        xp[i] = x[i] - h;
        let vm = eval_potential(p, &xp)?;
        xp[i] = x[i];
        g[i] = (vp - vm) / (2.0 * h);
    }
    Ok(g)
}

/// Gradient of `V` at `x`; analytic for the built-in families.
pub fn eval_gradient(p: &Potential, x: &[f64]) -> Result<Vec<f64>, PotentialError> {
    p.check_dim(x)?;
    match p {
        Potential::RadialPowerLog { strength } => {
            let j = jap(x);
            let j3 = j * j * j;
            Ok(x.iter().map(|&v| strength * v / j3).collect())
        }
        Potential::Dipole { amplitude } => {
            let j2 = 1.0 + x[0] * x[0] + x[1] * x[1];
            let j4 = j2 * j2;
            let scale = 2.0 * amplitude * x[0] / j4;
            Ok(vec![amplitude / j2 - scale * x[0], -scale * x[1]])
        }
        Potential::AngularOverR { f, patch_radius } => {
            let r = norm(x);
            if r == 0.0 {
                return Ok(vec![0.0, 0.0]);
            }
            let w = patch(r, *patch_radius);
            let dw = patch_deriv(r, *patch_radius);
            if w == 0.0 && dw == 0.0 {
                return Ok(vec![0.0, 0.0]);
            }
            let theta = x[1].atan2(x[0]);
            let fv = f.eval(theta);
            let fd = f.deriv(theta);
            // V = -f(theta) g(r) with g = w(r)/r
            let dg = (dw * r - w) / (r * r);
            let dr_v = -fv * dg;
            let dtheta_v = -fd * w / r;
            let (ct, st) = (theta.cos(), theta.sin());
            Ok(vec![
                dr_v * ct - dtheta_v * st / r,
                dr_v * st + dtheta_v * ct / r,
            ])
        }
        Potential::Custom(c) => match &c.gradient {
            Some(g) => Ok(g(x)),
            None => fd_gradient(p, x, 1e-5),
        },
    }
}

/// Radial/transverse split of the gradient at `x != 0`:
/// `radial = x_hat . grad V`, `transverse = (E - x_hat x_hat^T) grad V`.
pub fn radial_decompose(p: &Potential, x: &[f64]) -> Result<(f64, Vec<f64>), PotentialError> {
    let r = norm(x);
    if r == 0.0 {
        return Err(PotentialError::DegenerateInput);
    }
    let grad = eval_gradient(p, x)?;
    let radial = grad
        .iter()
        .zip(x.iter())
        .map(|(g, xi)| g * xi / r)
        .sum::<f64>();
    let transverse = grad
        .iter()
        .zip(x.iter())
        .map(|(g, xi)| g - radial * xi / r)
        .collect();
    Ok((radial, transverse))
}

/// Sample grid in polar form: radii times angles (d = 2 checks).
#[derive(Debug, Clone)]
pub struct RadialAngularGrid {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
}

impl RadialAngularGrid {
    /// Log-spaced radii from `r_min` to `r_max`, uniform angles.
    pub fn log_spaced(n_radii: usize, n_angles: usize, r_min: f64, r_max: f64) -> Self {
        let radii = (0..n_radii)
            .map(|i| {
                let t = i as f64 / (n_radii - 1).max(1) as f64;
                r_min * (r_max / r_min).powf(t)
            })
            .collect();
        let angles = (0..n_angles)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n_angles as f64)
            .collect();
        RadialAngularGrid { radii, angles }
    }
}

impl Default for RadialAngularGrid {
    fn default() -> Self {
        RadialAngularGrid::log_spaced(64, 64, 1.0, 1e3)
    }
}

/// Per-order decay constants and the transverse/radial bound estimates.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub max_order_checked: usize,
    /// `constants[k]` is the estimated sup of `|d^alpha V| <x>^(1+|alpha|)`
    /// over all multi-indices with `|alpha| = k`.
    pub constants: Vec<f64>,
    pub decay_holds: Vec<bool>,
    pub no_ac_constants: Option<NoAcConstants>,
    pub no_ac_holds: Option<bool>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoAcConstants {
    pub c1_est: f64,
    pub c2_est: f64,
    pub r_used: f64,
}

/// 1D central-difference stencil (offsets, coefficients) for `d^k/dx^k`.
fn stencil(order: usize) -> (Vec<i32>, Vec<f64>) {
    match order {
        0 => (vec![0], vec![1.0]),
        1 => (vec![-1, 1], vec![-0.5, 0.5]),
        2 => (vec![-1, 0, 1], vec![1.0, -2.0, 1.0]),
        3 => (vec![-2, -1, 1, 2], vec![-0.5, 1.0, -1.0, 0.5]),
        _ => panic!("finite differences supported up to order 3"),
    }
}

fn fd_partial(
    p: &Potential,
    x: &[f64],
    ox: usize,
    oy: usize,
    h: f64,
) -> Result<f64, PotentialError> {
    let (off_x, c_x) = stencil(ox);
    let (off_y, c_y) = stencil(oy);
    let mut acc = 0.0;
    let mut pt = [0.0f64; 2];
    for (dx, cx) in off_x.iter().zip(c_x.iter()) {
        for (dy, cy) in off_y.iter().zip(c_y.iter()) {
            pt[0] = x[0] + *dx as f64 * h;
            pt[1] = x[1] + *dy as f64 * h;
            acc += cx * cy * eval_potential(p, &pt)?;
        }
    }
    Ok(acc / h.powi((ox + oy) as i32))
}

/// Scan `sup |d^alpha V| <x>^(1+|alpha|)` over the grid for every
/// multi-index of total order up to `max_order` (capped at 3: higher-order
/// finite differences are dominated by rounding noise). `decay_holds` is
/// true when the weighted sup has plateaued before the outer radius.
pub fn verify_decay_assumption(
    p: &Potential,
    max_order: usize,
    grid: &RadialAngularGrid,
) -> Result<AssumptionReport, PotentialError> {
    assert!(max_order <= 3, "finite-difference orders are capped at 3");
    let eps = f64::EPSILON;
    let mut constants = vec![0.0f64; max_order + 1];
    let mut decay_holds = vec![false; max_order + 1];

    for order in 0..=max_order {
        // max over angles, per radius, of the weighted derivative size
        let mut per_radius = vec![0.0f64; grid.radii.len()];
        let h_base = eps.powf(1.0 / (order as f64 + 2.0));
        for (ri, &r) in grid.radii.iter().enumerate() {
            let h = h_base * r.max(1.0);
            let mut m = 0.0f64;
            for &ang in &grid.angles {
                let x = [r * ang.cos(), r * ang.sin()];
                let weight = jap(&x).powi(1 + order as i32);
                for ox in 0..=order {
                    let oy = order - ox;
                    let d = fd_partial(p, &x, ox, oy, h)?;
                    m = m.max(d.abs() * weight);
                }
            }
            per_radius[ri] = m;
        }
        let sup = per_radius.iter().cloned().fold(0.0f64, f64::max);
        constants[order] = sup;
        let n = per_radius.len();
        let plateaued = if n >= 2 && sup > 0.0 {
            let last = per_radius[n - 1];
            let prev = per_radius[n - 2];
            (last - prev) / sup <= 0.01
        } else {
            true
        };
        decay_holds[order] = plateaued;
    }

    Ok(AssumptionReport {
        max_order_checked: max_order,
        constants,
        decay_holds,
        no_ac_constants: None,
        no_ac_holds: None,
    })
}

/// Estimate `c1 = inf |dV/dr| |x|^2` and `c2 = sup |dV/dr_perp| |x|^2`
/// over the part of the grid with `|x| >= R`; the report holds when
/// `c1 > c2`.
pub fn verify_no_ac_condition(
    p: &Potential,
    r_min: f64,
    grid: &RadialAngularGrid,
) -> Result<AssumptionReport, PotentialError> {
    assert!(r_min > 0.0);
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for &r in grid.radii.iter().filter(|&&r| r >= r_min) {
        for &ang in &grid.angles {
            let x = [r * ang.cos(), r * ang.sin()];
            let (radial, transverse) = radial_decompose(p, &x)?;
            let t_norm = norm(&transverse);
            let r2 = r * r;
            c1 = c1.min(radial.abs() * r2);
            c2 = c2.max(t_norm * r2);
        }
    }
    if !c1.is_finite() {
        c1 = 0.0;
    }
    Ok(AssumptionReport {
        max_order_checked: 0,
        constants: vec![],
        decay_holds: vec![],
        no_ac_constants: Some(NoAcConstants {
            c1_est: c1,
            c2_est: c2,
            r_used: r_min,
        }),
        no_ac_holds: Some(c1 > c2),
    })
}
