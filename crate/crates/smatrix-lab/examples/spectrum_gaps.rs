//! Dense filling of the unit circle by eigenphases of the rotationally
//! symmetric scattering operator: the largest circular gap shrinks as the
//! mode cutoff grows, the finite-section shadow of dense pure point
//! spectrum.
//!
//! ```bash
//! cargo run --release --example spectrum_gaps
//! ```

use smatrix_lab::circleop::{min_theta_samples, quantize, unitarize, SymbolGrid};
use smatrix_lab::phase::{phase_closed_form, CirclePoint};
use smatrix_lab::potentials::Potential;
use smatrix_lab::spectral::{eigendecompose, gap_statistics, radial_closed_form_phases};

fn main() {
    let lambda = 0.5;
    let p = Potential::radial_power_log(1.0);
    println!("eigenphases are -(2 lambda)^(-1/2) log(1 + k^2) mod 2 pi\n");
    println!("{:>6} {:>12} {:>12} {:>16}", "K", "max gap", "mean gap", "vs closed form");

    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for k in [64usize, 128, 256, 512] {
        let grid = SymbolGrid::sample(
            |theta, omega| phase_closed_form(&p, CirclePoint::new(theta, omega)).map(|r| r.value),
            lambda,
            k,
            min_theta_samples(k),
        )
        .unwrap();
        let u = unitarize(&quantize(&grid)).unwrap();
        let eig = eigendecompose(&u).unwrap();
        let gaps = gap_statistics(&eig.phases).unwrap();

        let mut expected = radial_closed_form_phases(1.0, lambda, k);
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let worst = eig
            .phases
            .iter()
            .zip(expected.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);

        println!(
            "{k:>6} {:>12.6} {:>12.6} {worst:>16.3e}",
            gaps.max_gap, gaps.mean_gap
        );
        monotone &= gaps.max_gap < prev;
        prev = gaps.max_gap;
    }

    println!("\nmax gap strictly decreasing across doublings: {monotone}");
    if !monotone {
        std::process::exit(1);
    }
}
