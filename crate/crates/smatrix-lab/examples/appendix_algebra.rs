//! The operator-algebra toolkit on truncated unitaries: functional
//! calculus against the composed symbol, the exact matrix logarithm, the
//! Cayley transform with its resolvent identity, and the trace-norm
//! bridge between comparable operators.
//!
//! ```bash
//! cargo run --release --example appendix_algebra
//! ```

use rand::SeedableRng;
use smatrix_lab::circleop::{
    approximate_log, cayley, cayley_inverse, distance_from_one, exp_i, functional_calculus,
    min_theta_samples, principal_symbol_check, quantize, resolvent_identity_check,
    rotate_spectrum, unitarize, Provenance, SymbolGrid, TruncatedOperator,
};
use smatrix_lab::fourier::FourierSeries;
use smatrix_lab::linalg;
use smatrix_lab::oracle::scalar_cayley;
use smatrix_lab::phase::{phase_closed_form, CirclePoint};
use smatrix_lab::potentials::Potential;
use smatrix_lab::spectral::ac_equivalence_check;

fn spread_from_one(u: TruncatedOperator) -> TruncatedOperator {
    let mut best = rotate_spectrum(&u, 0.0);
    let mut best_dist = distance_from_one(&best);
    for i in 1..32 {
        let cand = rotate_spectrum(&u, std::f64::consts::TAU * i as f64 / 32.0);
        let d = distance_from_one(&cand);
        if d > best_dist {
            best_dist = d;
            best = cand;
        }
    }
    best
}

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);

    println!("== functional calculus");
    let p = Potential::dipole(1.0);
    let f = FourierSeries::monomial(2);
    for k in [32usize, 64] {
        let grid = SymbolGrid::sample(
            |theta, omega| phase_closed_form(&p, CirclePoint::new(theta, omega)).map(|r| r.value),
            0.5,
            k,
            min_theta_samples(k),
        )
        .unwrap();
        let u = unitarize(&quantize(&grid)).unwrap();
        let fu = functional_calculus(&u, &f).unwrap();
        println!(
            "  f(z) = z^2 at K = {k}: annulus discrepancy vs Op(f o s0) = {:.4e}",
            principal_symbol_check(&fu, &grid, &f)
        );
    }

    println!("\n== logarithm of a unitary");
    let u = spread_from_one(TruncatedOperator::new(
        linalg::random_unitary(33, &mut rng),
        Provenance::Derived,
    ));
    let psi = approximate_log(&u, 0.0).unwrap();
    let back = exp_i(&psi).unwrap();
    println!(
        "  random 33x33: Hermitian defect {:.2e}, exp(i Psi) round trip {:.2e}",
        linalg::max_abs(&(psi.matrix() - &linalg::adjoint(psi.matrix()))),
        linalg::opnorm(&(back.matrix() - u.matrix()))
    );

    println!("\n== Cayley transform");
    println!(
        "  scalar check: phi = pi/2 -> {}, phi = pi -> {}",
        scalar_cayley(std::f64::consts::FRAC_PI_2).unwrap(),
        scalar_cayley(std::f64::consts::PI).unwrap()
    );
    let h = cayley(&u).unwrap();
    let round = cayley_inverse(&h).unwrap();
    println!(
        "  matrix round trip: {:.2e}",
        linalg::opnorm(&(round.matrix() - u.matrix()))
    );

    println!("\n== resolvent identity and trace-norm bridge");
    let u2 = spread_from_one(TruncatedOperator::new(
        linalg::random_unitary(33, &mut rng),
        Provenance::Derived,
    ));
    println!(
        "  (H1 - i)^-1 - (H2 - i)^-1 = (U1 - U2) / 2i up to {:.2e}",
        resolvent_identity_check(&u, &u2).unwrap()
    );
    let rep = ac_equivalence_check(&u, &u2).unwrap();
    println!(
        "  trace-norm difference {:.4}, identity residual {:.2e}",
        rep.trace_norm_difference, rep.resolvent_identity_residual
    );
    println!("  note: {}", rep.note);
}
