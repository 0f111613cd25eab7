//! Weyl-sequence residuals: Gaussian packets centered where the phase
//! condition holds nearly satisfy the eigenvalue equation, and the
//! residual decays as the packet moves outward.
//!
//! ```bash
//! cargo run --release --example quasimode_sweep
//! ```

use smatrix_lab::circleop::{min_theta_samples, quantize, unitarize, SymbolGrid};
use smatrix_lab::phase::{phase_closed_form, CirclePoint};
use smatrix_lab::potentials::Potential;
use smatrix_lab::spectral::{quasimode_test, RootSelector};

fn main() {
    let c = 2.5;
    let lambda = 0.5;
    let theta0 = 1.0;
    let k = 512usize;
    let p = Potential::radial_power_log(c);
    let grid = SymbolGrid::sample(
        |theta, omega| phase_closed_form(&p, CirclePoint::new(theta, omega)).map(|r| r.value),
        lambda,
        k,
        min_theta_samples(k),
    )
    .unwrap();
    let u = unitarize(&quantize(&grid)).unwrap();

    println!("target eigenvalue e^(-i {theta0}), strength {c}, K = {k}\n");
    println!(
        "{:>8} {:>12} {:>8} {:>14}",
        "radius", "omega root", "center", "residual"
    );
    let samples = quasimode_test(
        &u,
        |omega| c * (1.0 + omega * omega).ln(),
        lambda,
        theta0,
        RootSelector::default(),
        &[8.0, 16.0, 32.0, 64.0, 128.0],
    )
    .unwrap();
    for s in &samples {
        println!(
            "{:>8} {:>12.4} {:>8} {:>14.6e}",
            s.n, s.omega_root, s.mode_center, s.residual
        );
    }
    let decreasing = samples.windows(2).all(|w| w[1].residual <= w[0].residual);
    println!("\nresiduals non-increasing outward: {decreasing}");

    // the same test against V = 0 is exact for the trivial target
    let id = smatrix_lab::circleop::TruncatedOperator::identity(32);
    let trivial = quasimode_test(&id, |_| 0.0, lambda, 0.0, RootSelector::default(), &[4.0])
        .unwrap();
    println!(
        "zero potential, theta0 = 0: residual = {:.2e} (exact eigenvector)",
        trivial[0].residual
    );
}
