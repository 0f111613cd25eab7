//! From a potential to a truncated unitary operator: sample the principal
//! symbol on the chart grid, quantize to Fourier modes, and replace the
//! finite section by its unitary polar factor.
//!
//! ```bash
//! cargo run --release --example build_smatrix
//! ```

use smatrix_lab::circleop::{min_theta_samples, quantize, unitarize, SymbolGrid};
use smatrix_lab::linalg;
use smatrix_lab::phase::{phase_closed_form, CirclePoint};
use smatrix_lab::potentials::Potential;

fn build(p: &Potential, lambda: f64, k: usize) {
    let grid = SymbolGrid::sample(
        |theta, omega| phase_closed_form(p, CirclePoint::new(theta, omega)).map(|r| r.value),
        lambda,
        k,
        min_theta_samples(k),
    )
    .unwrap();
    println!(
        "== {} at lambda = {lambda}, K = {k} (theta samples: {})",
        p.family_name(),
        grid.n_theta()
    );
    println!(
        "  symbol modulus deviation: {:.2e}",
        grid.max_modulus_deviation()
    );
    let raw = quantize(&grid);
    println!(
        "  raw section: unitarity defect = {:.4}, off-diagonal mass = {:.3e}",
        raw.unitarity_defect(),
        linalg::offdiag_max(raw.matrix())
    );
    let unit = unitarize(&raw).unwrap();
    println!(
        "  unitarized: defect = {:.3e} (recorded raw defect {:.4})",
        unit.unitarity_defect(),
        unit.raw_defect().unwrap()
    );
    println!();
}

fn main() {
    // theta-independent symbol: the section is exactly diagonal and the
    // polar step is the identity
    build(&Potential::radial_power_log(1.0), 0.5, 64);
    // dipole symbol: genuinely non-diagonal, the finite section needs the
    // polar correction near the mode boundary
    build(&Potential::dipole(1.0), 0.5, 64);
    build(&Potential::dipole(0.5), 0.5, 128);
}
