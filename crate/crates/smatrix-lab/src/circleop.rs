//! Quantization of symbols on the cotangent bundle of the circle into
//! truncated matrices on Fourier modes, and the operator algebra used on
//! top of it: unitarization, functional calculus, approximate logarithm,
//! and the Cayley transform.
//!
//! Convention: a symbol sample `a(theta, k)` acts on a Fourier coefficient
//! vector by sending the mode `e^{i k theta}` to the expansion of
//! `a(theta, k) e^{i k theta}`, i.e.
//!
//! ```text
//! M[j, k] = (1/N) sum_m a(theta_m, k) e^{-i (j - k) theta_m}.
//! ```
//!
//! Symbols independent of `theta` therefore quantize to exactly diagonal
//! matrices, and symbols independent of `k` to Toeplitz matrices of their
//! Fourier coefficients.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use ndarray::{s, Array2};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::FourierSeries;
use crate::linalg::{self, CMat, LinalgError};
use crate::phase::{energy_scale, PhaseError};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("invalid symbol grid: {0}")]
    InvalidGrid(String),
    #[error("phase evaluation failed while sampling: {0}")]
    Phase(#[from] PhaseError),
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("operator is not unitary (defect {defect:.3e} > {tol:.3e})")]
    NotUnitary { defect: f64, tol: f64 },
    #[error("finite section is numerically singular (smallest singular value {min_sv:.3e})")]
    SingularSection { min_sv: f64 },
    #[error("eigenvalue at distance {distance:.3e} from the branch cut at angle {cut:.6}")]
    BranchCutCollision { cut: f64, distance: f64 },
    #[error("1 is an eigenvalue of the operator within {distance:.3e}")]
    EigenvalueAtOne { distance: f64 },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed operator file: {0}")]
    Parse(String),
}

/// Smallest power of two accommodating alias-free extraction of matrix
/// elements for modes `|k| <= mode_cutoff`.
pub fn min_theta_samples(mode_cutoff: usize) -> usize {
    (4 * mode_cutoff + 4).next_power_of_two()
}

/// Symbol samples `a(theta_j, k)` on the uniform angular grid
/// `theta_j = 2 pi j / n_theta` and the integer lattice `k in [-K, K]`.
#[derive(Debug, Clone)]
pub struct SymbolGrid {
    mode_cutoff: usize,
    /// Shape `[n_theta, 2K + 1]`; column `k + K` holds samples for mode `k`.
    values: Array2<Complex64>,
}

impl SymbolGrid {
    pub fn new(mode_cutoff: usize, values: Array2<Complex64>) -> Result<Self, OperatorError> {
        let n_theta = values.nrows();
        if mode_cutoff == 0 {
            return Err(OperatorError::InvalidGrid("mode cutoff must be >= 1".into()));
        }
        if values.ncols() != 2 * mode_cutoff + 1 {
            return Err(OperatorError::InvalidGrid(format!(
                "expected {} mode columns, got {}",
                2 * mode_cutoff + 1,
                values.ncols()
            )));
        }
        if n_theta < 4 * mode_cutoff + 4 || !n_theta.is_power_of_two() {
            return Err(OperatorError::InvalidGrid(format!(
                "n_theta = {n_theta} must be a power of two >= {}",
                4 * mode_cutoff + 4
            )));
        }
        Ok(SymbolGrid {
            mode_cutoff,
            values,
        })
    }

    /// Sample the principal symbol `exp(-i (2 lambda)^{-1/2} psi(theta, omega))`
    /// from a phase evaluator, at integer `omega = k`.
    pub fn sample<F>(
        phase_fn: F,
        lambda: f64,
        mode_cutoff: usize,
        n_theta: usize,
    ) -> Result<Self, OperatorError>
    where
        F: Fn(f64, f64) -> Result<f64, PhaseError>,
    {
        let beta = energy_scale(lambda)?;
        let cols = 2 * mode_cutoff + 1;
        let mut values = Array2::zeros((n_theta, cols));
        for c in 0..cols {
            let k = c as i64 - mode_cutoff as i64;
            for j in 0..n_theta {
                let theta = std::f64::consts::TAU * j as f64 / n_theta as f64;
                let psi = phase_fn(theta, k as f64)?;
                values[[j, c]] = Complex64::from_polar(1.0, -beta * psi);
            }
        }
        SymbolGrid::new(mode_cutoff, values)
    }

    /// Sample an arbitrary (not necessarily unimodular) symbol.
    pub fn from_symbol_fn<F>(
        symbol: F,
        mode_cutoff: usize,
        n_theta: usize,
    ) -> Result<Self, OperatorError>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let cols = 2 * mode_cutoff + 1;
        let mut values = Array2::zeros((n_theta, cols));
        for c in 0..cols {
            let k = c as i64 - mode_cutoff as i64;
            for j in 0..n_theta {
                let theta = std::f64::consts::TAU * j as f64 / n_theta as f64;
                values[[j, c]] = symbol(theta, k as f64);
            }
        }
        SymbolGrid::new(mode_cutoff, values)
    }

    pub fn mode_cutoff(&self) -> usize {
        self.mode_cutoff
    }

    pub fn n_theta(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn theta(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.n_theta() as f64
    }

    /// Pointwise transform of the samples (e.g. composing with a function
    /// of the unit circle).
    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> SymbolGrid {
        SymbolGrid {
            mode_cutoff: self.mode_cutoff,
            values: self.values.mapv(f),
        }
    }

    /// Largest deviation of |a| from one; zero for symbols of unitary type.
    pub fn max_modulus_deviation(&self) -> f64 {
        self.values
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Provenance of a truncated operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    RawQuantization,
    Unitarized,
    Derived,
}

/// Dense matrix acting on the Fourier modes `|k| <= mode_cutoff`.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    mode_cutoff: usize,
    matrix: CMat,
    unitarity_defect: f64,
    /// Defect of the raw quantization this operator was unitarized from.
    raw_defect: Option<f64>,
    provenance: Provenance,
}

impl TruncatedOperator {
    pub fn new(matrix: CMat, provenance: Provenance) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operator must be square");
        assert!(matrix.nrows() % 2 == 1, "dimension must be 2K + 1");
        let mode_cutoff = (matrix.nrows() - 1) / 2;
        let unitarity_defect = linalg::unitarity_defect(&matrix);
        TruncatedOperator {
            mode_cutoff,
            matrix,
            unitarity_defect,
            raw_defect: None,
            provenance,
        }
    }

    pub fn identity(mode_cutoff: usize) -> Self {
        TruncatedOperator::new(linalg::identity(2 * mode_cutoff + 1), Provenance::Derived)
    }

    /// Diagonal operator from unimodular phases indexed by `k + K`.
    pub fn from_diagonal_phases(phases: &[f64]) -> Self {
        let n = phases.len();
        assert!(n % 2 == 1);
        let mut m: CMat = Array2::zeros((n, n));
        for (i, &p) in phases.iter().enumerate() {
            m[[i, i]] = Complex64::from_polar(1.0, p);
        }
        TruncatedOperator::new(m, Provenance::Derived)
    }

    pub fn mode_cutoff(&self) -> usize {
        self.mode_cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    pub fn raw_defect(&self) -> Option<f64> {
        self.raw_defect
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Row/column index of mode `k`.
    pub fn mode_index(&self, k: i64) -> usize {
        (k + self.mode_cutoff as i64) as usize
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect <= tol
    }

    pub fn require_unitary(&self, tol: f64) -> Result<(), OperatorError> {
        if self.is_unitary(tol) {
            Ok(())
        } else {
            Err(OperatorError::NotUnitary {
                defect: self.unitarity_defect,
                tol,
            })
        }
    }

    /// The block of matrix entries with both mode indices `|k| <= K/2`,
    /// which is insulated from the truncation boundary.
    pub fn interior_block(&self) -> CMat {
        let k = self.mode_cutoff;
        let lo = self.mode_index(-((k / 2) as i64));
        let hi = self.mode_index((k / 2) as i64);
        self.matrix.slice(s![lo..=hi, lo..=hi]).to_owned()
    }

    /// The matrix with every entry outside the mode annulus
    /// `lo <= |k| <= hi` (in both indices) zeroed.
    pub fn annulus_masked(&self, lo: usize, hi: usize) -> CMat {
        let k = self.mode_cutoff as i64;
        let mut m = self.matrix.clone();
        for ((i, j), z) in m.indexed_iter_mut() {
            let ki = (i as i64 - k).unsigned_abs() as usize;
            let kj = (j as i64 - k).unsigned_abs() as usize;
            if ki < lo || ki > hi || kj < lo || kj > hi {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        m
    }

    /// Central `|k| <= target` block as an operator at the smaller cutoff.
    pub fn central_section(&self, target: usize) -> TruncatedOperator {
        assert!(target <= self.mode_cutoff);
        let lo = self.mode_index(-(target as i64));
        let hi = self.mode_index(target as i64);
        TruncatedOperator::new(
            self.matrix.slice(s![lo..=hi, lo..=hi]).to_owned(),
            Provenance::Derived,
        )
    }

    pub fn adjoint(&self) -> TruncatedOperator {
        TruncatedOperator::new(linalg::adjoint(&self.matrix), Provenance::Derived)
    }
}

/// Quantize a symbol grid into a truncated operator.
///
/// Columns whose samples are all bit-identical (theta-independent symbols)
/// are written as exactly diagonal; other columns go through a forward FFT
/// over the angular grid.
pub fn quantize(grid: &SymbolGrid) -> TruncatedOperator {
    let k_cut = grid.mode_cutoff();
    let dim = 2 * k_cut + 1;
    let n = grid.n_theta();
    let mut matrix: CMat = Array2::zeros((dim, dim));

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> = vec![Complex64::new(0.0, 0.0); n];

    for col in 0..dim {
        let column = grid.values().column(col);
        let first = column[0];
        if column.iter().all(|&z| z == first) {
            matrix[[col, col]] = first;
            continue;
        }
        for (j, z) in column.iter().enumerate() {
            buf[j] = *z;
        }
        fft.process(&mut buf);
        let k = col as i64 - k_cut as i64;
        for row in 0..dim {
            let j = row as i64 - k_cut as i64;
            let p = (j - k).rem_euclid(n as i64) as usize;
            matrix[[row, col]] = buf[p] / n as f64;
        }
    }

    TruncatedOperator {
        mode_cutoff: k_cut,
        unitarity_defect: linalg::unitarity_defect(&matrix),
        matrix,
        raw_defect: None,
        provenance: Provenance::RawQuantization,
    }
}

/// Replace the finite section by its unitary polar factor (the nearest
/// unitary matrix). Exactly diagonal inputs with unimodular entries are
/// fixed points.
pub fn unitarize(op: &TruncatedOperator) -> Result<TruncatedOperator, OperatorError> {
    let raw_defect = op.unitarity_defect;
    if linalg::offdiag_max(&op.matrix) == 0.0 {
        let mut m = op.matrix.clone();
        let mut min_sv = f64::INFINITY;
        for i in 0..m.nrows() {
            let d = m[[i, i]];
            min_sv = min_sv.min(d.norm());
            if d.norm() < 1e-10 {
                return Err(OperatorError::SingularSection { min_sv: d.norm() });
            }
            m[[i, i]] = d / d.norm();
        }
        let mut out = TruncatedOperator::new(m, Provenance::Unitarized);
        out.raw_defect = Some(raw_defect);
        return Ok(out);
    }
    let w = linalg::polar_unitary(&op.matrix, 1e-10).map_err(|e| match e {
        LinalgError::Singular { min_sv } => OperatorError::SingularSection { min_sv },
        other => OperatorError::Linalg(other),
    })?;
    let mut out = TruncatedOperator::new(w, Provenance::Unitarized);
    out.raw_defect = Some(raw_defect);
    Ok(out)
}

/// `f(U) = sum_k f_hat[k] U^k` for a unitary `U` (negative powers through
/// the adjoint).
pub fn functional_calculus(
    u: &TruncatedOperator,
    f: &FourierSeries,
) -> Result<TruncatedOperator, OperatorError> {
    u.require_unitary(1e-8)?;
    let n = u.dim();
    let mut acc: CMat = linalg::identity(n).mapv(|z| z * f.coeff(0));
    let ustar = linalg::adjoint(&u.matrix);
    let mut pos = linalg::identity(n);
    let mut neg = linalg::identity(n);
    for k in 1..=f.kmax() as i64 {
        pos = pos.dot(&u.matrix);
        neg = neg.dot(&ustar);
        let cp = f.coeff(k);
        if cp.norm() > 0.0 {
            acc = acc + pos.mapv(|z| z * cp);
        }
        let cm = f.coeff(-k);
        if cm.norm() > 0.0 {
            acc = acc + neg.mapv(|z| z * cm);
        }
    }
    Ok(TruncatedOperator::new(acc, Provenance::Derived))
}

/// Operator-norm discrepancy between `f(U)` computed by functional
/// calculus and the quantization of the composed symbol `f o a`,
/// measured on the mode annulus `K/4 <= |k| <= K/2`.
///
/// The annulus keeps the comparison away from the truncation boundary
/// (where the finite section is wrong) and away from the smallest modes
/// (where the subprincipal part of the composition is order one and does
/// not shrink with the cutoff). On the annulus the remainder decays like
/// the inverse mode index, so the discrepancy falls as `K` grows.
pub fn principal_symbol_check(
    fu: &TruncatedOperator,
    grid: &SymbolGrid,
    f: &FourierSeries,
) -> f64 {
    let composed = grid.map(|z| f.eval_at(z));
    let rhs = quantize(&composed);
    let diff = TruncatedOperator::new(fu.matrix() - rhs.matrix(), Provenance::Derived);
    let k = diff.mode_cutoff();
    linalg::opnorm(&diff.annulus_masked(k / 4, k / 2))
}

/// Hermitian matrix `Psi` with `exp(i Psi) = U`, eigenphases taken in
/// `(branch_center - pi, branch_center + pi]`.
pub fn approximate_log(
    u: &TruncatedOperator,
    branch_center: f64,
) -> Result<TruncatedOperator, OperatorError> {
    u.require_unitary(1e-8)?;
    let (vals, vecs) = linalg::eig_unitary(&u.matrix, 1e-9)?;
    let cut = branch_center + std::f64::consts::PI;
    let mut phases = Vec::with_capacity(vals.len());
    for v in &vals {
        // angle relative to the branch center, wrapped to (-pi, pi]
        let rel = (v * Complex64::from_polar(1.0, -branch_center)).arg();
        let distance = (rel.abs() - std::f64::consts::PI).abs();
        if distance < 1e-8 {
            return Err(OperatorError::BranchCutCollision { cut, distance });
        }
        phases.push(branch_center + rel);
    }
    let n = vals.len();
    let mut psi: CMat = Array2::zeros((n, n));
    for (j, &phase) in phases.iter().enumerate() {
        let col = vecs.column(j);
        let p = Complex64::new(phase, 0.0);
        for r in 0..n {
            for c in 0..n {
                psi[[r, c]] += p * col[r] * col[c].conj();
            }
        }
    }
    let psi = linalg::hermitize(&psi);
    Ok(TruncatedOperator::new(psi, Provenance::Derived))
}

/// `exp(i H)` for Hermitian `H`, by eigendecomposition.
pub fn exp_i(h: &TruncatedOperator) -> Result<TruncatedOperator, OperatorError> {
    let (vals, vecs) = linalg::hermitian_eig(&h.matrix)?;
    let n = vals.len();
    let mut m: CMat = Array2::zeros((n, n));
    for (j, &angle) in vals.iter().enumerate() {
        let col = vecs.column(j);
        let e = Complex64::from_polar(1.0, angle);
        for r in 0..n {
            for c in 0..n {
                m[[r, c]] += e * col[r] * col[c].conj();
            }
        }
    }
    Ok(TruncatedOperator::new(m, Provenance::Derived))
}

/// Distance from 1 to the spectrum of `U` (smallest singular value of
/// `U - I`, exact for unitary input).
pub fn distance_from_one(u: &TruncatedOperator) -> f64 {
    let m = &u.matrix - &linalg::identity(u.dim());
    singular_min(&m)
}

fn singular_min(m: &CMat) -> f64 {
    linalg::singular_values(m)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Cayley transform `H = i (U + 1)(U - 1)^{-1}`, Hermitian for unitary `U`
/// whose spectrum avoids 1.
pub fn cayley(u: &TruncatedOperator) -> Result<TruncatedOperator, OperatorError> {
    u.require_unitary(1e-8)?;
    let dist = distance_from_one(u);
    if dist < 1e-10 {
        return Err(OperatorError::EigenvalueAtOne { distance: dist });
    }
    let n = u.dim();
    let eye = linalg::identity(n);
    let num = &u.matrix + &eye;
    let den = &u.matrix - &eye;
    let inv = linalg::inverse(&den)?;
    let h = num.dot(&inv).mapv(|z| z * Complex64::new(0.0, 1.0));
    Ok(TruncatedOperator::new(
        linalg::hermitize(&h),
        Provenance::Derived,
    ))
}

/// Inverse Cayley transform `U = 1 + 2i (H - i)^{-1}`.
pub fn cayley_inverse(h: &TruncatedOperator) -> Result<TruncatedOperator, OperatorError> {
    let n = h.dim();
    let eye = linalg::identity(n);
    let shifted = &h.matrix - &eye.mapv(|z| z * Complex64::new(0.0, 1.0));
    let inv = linalg::inverse(&shifted)?;
    let u = &eye + &inv.mapv(|z| z * Complex64::new(0.0, 2.0));
    Ok(TruncatedOperator::new(u, Provenance::Derived))
}

/// Residual of the resolvent identity that transports trace-class
/// differences through the Cayley transform:
/// `(H1 - i)^{-1} - (H2 - i)^{-1} = (1/2i)(U1 - U2)`.
pub fn resolvent_identity_check(
    u1: &TruncatedOperator,
    u2: &TruncatedOperator,
) -> Result<f64, OperatorError> {
    let h1 = cayley(u1)?;
    let h2 = cayley(u2)?;
    let n = u1.dim();
    let ieye = linalg::identity(n).mapv(|z| z * Complex64::new(0.0, 1.0));
    let r1 = linalg::inverse(&(&h1.matrix - &ieye))?;
    let r2 = linalg::inverse(&(&h2.matrix - &ieye))?;
    let rhs = (&u1.matrix - &u2.matrix).mapv(|z| z / Complex64::new(0.0, 2.0));
    let diff = &r1 - &r2 - &rhs;
    Ok(linalg::opnorm(&diff))
}

/// Multiply the operator by the scalar phase `e^{i theta}`, shifting every
/// eigenphase by `theta`.
pub fn rotate_spectrum(u: &TruncatedOperator, theta: f64) -> TruncatedOperator {
    let z = Complex64::from_polar(1.0, theta);
    let mut out = TruncatedOperator {
        mode_cutoff: u.mode_cutoff,
        matrix: u.matrix.mapv(|w| w * z),
        unitarity_defect: u.unitarity_defect,
        raw_defect: u.raw_defect,
        provenance: Provenance::Derived,
    };
    // |e^{i theta}| = 1, so the defect is unchanged up to rounding.
    out.unitarity_defect = u.unitarity_defect;
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct OperatorHeader {
    format: String,
    mode_cutoff: usize,
    provenance: Provenance,
    unitarity_defect: f64,
    raw_defect: Option<f64>,
}

impl TruncatedOperator {
    /// Write the operator as a JSON header plus a CSV of real/imaginary
    /// parts (`row,col,re,im`, full precision). Both files are created
    /// atomically via a rename.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(), OperatorError> {
        std::fs::create_dir_all(dir)?;
        let header = OperatorHeader {
            format: "re-im-csv-v1".to_string(),
            mode_cutoff: self.mode_cutoff,
            provenance: self.provenance,
            unitarity_defect: self.unitarity_defect,
            raw_defect: self.raw_defect,
        };
        let tmp_json = dir.join(format!(".{stem}.json.tmp"));
        std::fs::write(
            &tmp_json,
            serde_json::to_string_pretty(&header).expect("header serializes"),
        )?;
        let tmp_csv = dir.join(format!(".{stem}.csv.tmp"));
        {
            let mut w = BufWriter::new(std::fs::File::create(&tmp_csv)?);
            writeln!(w, "row,col,re,im")?;
            for ((i, j), z) in self.matrix.indexed_iter() {
                writeln!(w, "{},{},{},{}", i, j, z.re, z.im)?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp_json, dir.join(format!("{stem}.json")))?;
        std::fs::rename(&tmp_csv, dir.join(format!("{stem}.csv")))?;
        Ok(())
    }

    pub fn load(dir: &Path, stem: &str) -> Result<Self, OperatorError> {
        let header: OperatorHeader =
            serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)
                .map_err(|e| OperatorError::Parse(e.to_string()))?;
        if header.format != "re-im-csv-v1" {
            return Err(OperatorError::Parse(format!(
                "unknown format {}",
                header.format
            )));
        }
        let dim = 2 * header.mode_cutoff + 1;
        let mut matrix: CMat = Array2::zeros((dim, dim));
        let file = std::fs::File::open(dir.join(format!("{stem}.csv")))?;
        let reader = std::io::BufReader::new(file);
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                if line.trim() != "row,col,re,im" {
                    return Err(OperatorError::Parse("bad CSV header".into()));
                }
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| {
                parts
                    .next()
                    .ok_or_else(|| OperatorError::Parse(format!("missing {what} on line {lineno}")))
            };
            let i: usize = next("row")?
                .parse()
                .map_err(|e| OperatorError::Parse(format!("row: {e}")))?;
            let j: usize = next("col")?
                .parse()
                .map_err(|e| OperatorError::Parse(format!("col: {e}")))?;
            let re: f64 = next("re")?
                .parse()
                .map_err(|e| OperatorError::Parse(format!("re: {e}")))?;
            let im: f64 = next("im")?
                .parse()
                .map_err(|e| OperatorError::Parse(format!("im: {e}")))?;
            if i >= dim || j >= dim {
                return Err(OperatorError::Parse(format!(
                    "index ({i},{j}) out of range for dim {dim}"
                )));
            }
            matrix[[i, j]] = Complex64::new(re, im);
        }
        let mut op = TruncatedOperator::new(matrix, header.provenance);
        op.raw_defect = header.raw_defect;
        Ok(op)
    }
}
