//! Adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! The engine is a 7/15-point Gauss-Kronrod pair with global adaptive
//! bisection: the segment with the largest error estimate is split until
//! the summed estimate falls below the requested absolute tolerance.
//! Improper integrals are handled by the callers through a change of
//! variables that compactifies the line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Abscissae of the 15-point Kronrod rule (positive half, descending).
/// Odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Weights of the embedded 7-point Gauss rule (nodes `XGK[1]`, `XGK[3]`,
/// `XGK[5]`, center).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerance and refinement budget for one adaptive integration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Absolute tolerance on the summed error estimate.
    pub tol: f64,
    /// Maximum number of bisections applied to any single segment.
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            tol: 1e-10,
            max_depth: 30,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(tol: f64) -> Self {
        QuadSpec {
            tol,
            ..QuadSpec::default()
        }
    }
}

/// Value and error estimate of one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    /// Number of integrand evaluations spent.
    pub evaluations: usize,
    /// Largest |abscissa| at which the integrand was evaluated.
    pub max_abscissa: f64,
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error(
        "quadrature did not converge: estimate {abs_error:.3e} exceeds tol {tol:.3e} \
         (value so far {value:.12e})"
    )]
    NonConvergence {
        value: f64,
        abs_error: f64,
        tol: f64,
    },
    #[error("integrand returned a non-finite value near {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod panel with the QUADPACK-style error rescaling.
fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut fv = [0.0f64; 15];
    let f_center = f(center);
    fv[7] = f_center;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }

    let mut res_kronrod = WGK[7] * f_center;
    let mut res_gauss = WG[3] * f_center;
    let mut res_abs = res_kronrod.abs();
    for j in 0..7 {
        let fsum = fv[j] + fv[14 - j];
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (fv[j].abs() + fv[14 - j].abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    (value, err, res_abs)
}

/// Integrate `f` over `[a, b]` to the absolute tolerance in `spec`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult, QuadError> {
    let mut evaluations = 0usize;
    let mut max_abscissa = 0.0f64;
    let mut panel = |f: &mut F, lo: f64, hi: f64| -> Result<(f64, f64), QuadError> {
        let mut bad = None;
        let (v, e, _) = kronrod_panel(
            &mut |x: f64| {
                let y = f(x);
                if !y.is_finite() && bad.is_none() {
                    bad = Some(x);
                }
                y
            },
            lo,
            hi,
        );
        evaluations += 15;
        max_abscissa = max_abscissa.max(lo.abs()).max(hi.abs());
        match bad {
            Some(x) => Err(QuadError::NonFiniteIntegrand { abscissa: x }),
            None => Ok((v, e)),
        }
    };

    let (v0, e0) = panel(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        error: e0,
        depth: 0,
    });
    let mut total_value = v0;
    let mut total_error = e0;

    const MAX_SEGMENTS: usize = 200_000;
    while total_error > spec.tol {
        let worst = heap.pop().expect("heap holds at least one segment");
        if worst.depth >= spec.max_depth || heap.len() + 1 >= MAX_SEGMENTS {
            return Err(QuadError::NonConvergence {
                value: total_value,
                abs_error: total_error,
                tol: spec.tol,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (vl, el) = panel(&mut f, worst.a, mid)?;
        let (vr, er) = panel(&mut f, mid, worst.b)?;
        total_value += vl + vr - worst.value;
        total_error += el + er - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: vl,
            error: el,
            depth: worst.depth + 1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: vr,
            error: er,
            depth: worst.depth + 1,
        });
    }

    // Re-sum from the final partition for a tighter rounding profile.
    let value = heap.iter().map(|s| s.value).sum();
    Ok(QuadResult {
        value,
        abs_error: total_error,
        evaluations,
        max_abscissa,
    })
}

/// Integrate `f` over the whole real line through the substitution
/// `t = tan(u)`, which maps `(-pi/2, pi/2)` onto the line. The integrand
/// must decay at least like `t^-2` for the compactified integrand to stay
/// bounded.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    spec: &QuadSpec,
) -> Result<QuadResult, QuadError> {
    let g = move |u: f64| {
        let t = u.tan();
        let sec2 = 1.0 + t * t;
        f(t) * sec2
    };
    let mut res = integrate(g, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, spec)?;
    res.max_abscissa = res.max_abscissa.min(std::f64::consts::FRAC_PI_2).tan();
    Ok(res)
}

/// Integrate `f` over the half line `[0, +inf)` (`sign = +1`) or
/// `(-inf, 0]` (`sign = -1`) through `t = tan(u)`.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    sign: i32,
    spec: &QuadSpec,
) -> Result<QuadResult, QuadError> {
    let g = move |u: f64| {
        let t = u.tan();
        let sec2 = 1.0 + t * t;
        f(t) * sec2
    };
    let (a, b) = if sign >= 0 {
        (0.0, std::f64::consts::FRAC_PI_2)
    } else {
        (-std::f64::consts::FRAC_PI_2, 0.0)
    };
    let mut res = integrate(g, a, b, spec)?;
    res.max_abscissa = res.max_abscissa.min(std::f64::consts::FRAC_PI_2).tan();
    Ok(res)
}
