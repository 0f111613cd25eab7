//! Scattering phases three ways: closed form, adaptive quadrature, and
//! the Romberg reference, tabulated over a small chart grid.
//!
//! ```bash
//! cargo run --release --example phase_table
//! ```

use smatrix_lab::oracle::romberg_phase;
use smatrix_lab::phase::{
    phase_closed_form, phase_full_line, phase_half_line, principal_symbol, CirclePoint,
    Dispersion, QuadratureSpec,
};
use smatrix_lab::potentials::Potential;

fn main() {
    let spec = QuadratureSpec::default();
    let disp = Dispersion::SchrodingerHalfLaplacian;
    let mut failures = 0;

    println!("dipole a = 1, lambda = 1/2");
    println!(
        "{:>6} {:>8} {:>14} {:>14} {:>14} {:>10}",
        "theta", "omega", "closed", "quadrature", "romberg", "|s0|"
    );
    let p = Potential::dipole(1.0);
    for &theta in &[
        0.0,
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_2,
        2.5,
    ] {
        for &omega in &[-3.0, 1.0, 10.0] {
            let pt = CirclePoint::new(theta, omega);
            let closed = phase_closed_form(&p, pt).unwrap().value;
            let x = pt.cotangent();
            let xi = pt.direction();
            let quad = phase_full_line(&p, &x, &xi, &spec).unwrap();
            let romberg = romberg_phase(&p, &x, &xi, 18).unwrap();
            let s0 = principal_symbol(0.5, quad.value).unwrap();
            println!(
                "{theta:>6.3} {omega:>8.2} {closed:>14.9} {:>14.9} {:>14.9} {:>10.7}",
                quad.value,
                romberg.value,
                s0.norm()
            );
            if (closed - quad.value).abs() > 1e-8 {
                failures += 1;
            }
        }
    }

    println!("\nhalf-line split at x = (-1, 0), xi = (0, 1):");
    let x = [-1.0, 0.0];
    let xi = [0.0, 1.0];
    let plus = phase_half_line(&p, &x, &xi, 1, &disp, &spec).unwrap();
    let minus = phase_half_line(&p, &x, &xi, -1, &disp, &spec).unwrap();
    let full = phase_full_line(&p, &x, &xi, &spec).unwrap();
    println!(
        "  psi+ = {:.9}, psi- = {:.9}, sum = {:.9}, full = {:.9}",
        plus.value,
        minus.value,
        plus.value + minus.value,
        full.value
    );
    if (plus.value + minus.value - full.value).abs() > 1e-9 {
        failures += 1;
    }

    println!("\nrotationally symmetric family, c = 1: psi = log(1 + omega^2)");
    let p = Potential::radial_power_log(1.0);
    for &omega in &[1.0, 3.0, 100.0] {
        let pt = CirclePoint::new(0.3, omega);
        let closed = phase_closed_form(&p, pt).unwrap().value;
        let quad = phase_full_line(&p, &pt.cotangent(), &pt.direction(), &spec).unwrap();
        println!(
            "  omega = {omega:>6.1}: closed = {closed:.9}, quadrature = {:.9}",
            quad.value
        );
        if (closed - quad.value).abs() > 1e-8 {
            failures += 1;
        }
    }

    if failures == 0 {
        println!("\nall phase routes agree");
    } else {
        println!("\n{failures} disagreements");
        std::process::exit(1);
    }
}
