//! Finite Fourier series on the circle, used as the coefficient format for
//! functions applied to unitary operators.

use num_complex::Complex64;

/// Coefficients `f_hat[k]` for `|k| <= kmax`, representing
/// `f(e^{i phi}) = sum_k f_hat[k] e^{i k phi}`.
#[derive(Debug, Clone)]
pub struct FourierSeries {
    kmax: usize,
    /// Index layout: `coeffs[k + kmax]` holds `f_hat[k]`.
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn new(kmax: usize) -> Self {
        FourierSeries {
            kmax,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * kmax + 1],
        }
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.kmax {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.kmax as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i64, value: Complex64) {
        assert!(k.unsigned_abs() as usize <= self.kmax, "coefficient index out of range");
        self.coeffs[(k + self.kmax as i64) as usize] = value;
    }

    /// The monomial `f(z) = z^k`.
    pub fn monomial(k: i64) -> Self {
        let mut s = FourierSeries::new(k.unsigned_abs() as usize);
        s.set_coeff(k, Complex64::new(1.0, 0.0));
        s
    }

    /// `f(z) = Re z = (z + z^-1)/2`.
    pub fn real_part() -> Self {
        let mut s = FourierSeries::new(1);
        s.set_coeff(1, Complex64::new(0.5, 0.0));
        s.set_coeff(-1, Complex64::new(0.5, 0.0));
        s
    }

    /// Coefficients of a smoothed indicator of the arc `|phi| <= flat + margin`,
    /// mollified by a wrapped Gaussian of width `sigma`. The result is 1 up
    /// to `~1e-9` on `|phi| <= flat` (for `margin >= 6 sigma`) and decays
    /// below `1e-8` beyond `flat + margin + 6.1 sigma`.
    pub fn mollified_indicator(flat: f64, margin: f64, sigma: f64, kmax: usize) -> Self {
        let edge = flat + margin;
        let mut s = FourierSeries::new(kmax);
        s.set_coeff(0, Complex64::new(edge / std::f64::consts::PI, 0.0));
        for k in 1..=kmax as i64 {
            let kf = k as f64;
            let damp = (-0.5 * sigma * sigma * kf * kf).exp();
            let c = (kf * edge).sin() / (std::f64::consts::PI * kf) * damp;
            s.set_coeff(k, Complex64::new(c, 0.0));
            s.set_coeff(-k, Complex64::new(c, 0.0));
        }
        s
    }

    /// Half-width of the arc outside which the mollified indicator built by
    /// [`FourierSeries::mollified_indicator`] stays below `floor`.
    pub fn mollified_support(flat: f64, margin: f64, sigma: f64, floor: f64) -> f64 {
        flat + margin + sigma * (2.0 * (1.0 / floor).ln()).sqrt()
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -(self.kmax as i64)..=(self.kmax as i64) {
            acc += self.coeff(k) * Complex64::from_polar(1.0, k as f64 * phi);
        }
        acc
    }

    /// Evaluate at a point of the unit circle.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.eval(z.arg())
    }

    /// True when the function is real-valued on the circle
    /// (`f_hat[-k] = conj(f_hat[k])`).
    pub fn is_real_valued(&self, tol: f64) -> bool {
        (0..=self.kmax as i64)
            .all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// Coefficients of the pointwise product `f * g` (series convolution).
    pub fn convolve(&self, other: &FourierSeries) -> FourierSeries {
        let kmax = self.kmax + other.kmax;
        let mut out = FourierSeries::new(kmax);
        for k in -(self.kmax as i64)..=(self.kmax as i64) {
            let a = self.coeff(k);
            if a.norm() == 0.0 {
                continue;
            }
            for l in -(other.kmax as i64)..=(other.kmax as i64) {
                let b = other.coeff(l);
                if b.norm() == 0.0 {
                    continue;
                }
                let idx = k + l;
                let cur = out.coeff(idx);
                out.set_coeff(idx, cur + a * b);
            }
        }
        out
    }

    /// Sum of |coefficients| (an upper bound for `sup |f|`).
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}
