//! Numerical laboratory for long-range scattering phases on the plane and
//! the spectral behavior of the resulting truncated unitary operators on
//! Fourier modes of the circle.
//!
//! The pipeline, end to end:
//!
//! 1. [`potentials`] defines the long-range families and verifies their
//!    decay hypotheses numerically.
//! 2. [`phase`] computes the scattering phase `psi(x, xi)` (adaptive
//!    quadrature or closed form) and the unimodular principal symbol
//!    `exp(-i (2 lambda)^{-1/2} psi)`.
//! 3. [`circleop`] samples the symbol on a theta-grid times the integer
//!    mode lattice, quantizes it to a dense matrix on modes `|k| <= K`,
//!    unitarizes the finite section, and provides the operator algebra
//!    (functional calculus, approximate logarithm, Cayley transform).
//! 4. [`spectral`] analyzes eigenphases: arc coverage, circular gap
//!    statistics, quasimode residuals, and commutator positivity.
//! 5. [`oracle`] supplies independent reference computations (Romberg,
//!    direct summation, scalar formulas) for the test suite.
//! 6. [`cli`] runs named experiments from flat key-value configs and
//!    writes machine-readable reports; the `smatrix-lab` binary is a thin
//!    wrapper around it.
//!
//! Every module is pure computation over immutable inputs; concurrency is
//! safe but not required anywhere.

pub mod circleop;
pub mod cli;
pub mod fourier;
pub mod linalg;
pub mod oracle;
pub mod phase;
pub mod potentials;
pub mod quad;
pub mod spectral;

pub use circleop::{
    approximate_log, cayley, cayley_inverse, functional_calculus, principal_symbol_check,
    quantize, resolvent_identity_check, rotate_spectrum, unitarize, Provenance, SymbolGrid,
    TruncatedOperator,
};
pub use fourier::FourierSeries;
pub use phase::{
    eikonal_residual, phase_closed_form, phase_full_line, phase_growth_check, phase_half_line,
    principal_symbol, CirclePoint, Dispersion, PhaseMethod, PhaseResult, QuadratureSpec,
};
pub use potentials::{
    eval_gradient, eval_potential, radial_decompose, verify_decay_assumption,
    verify_no_ac_condition, AssumptionReport, Potential, RadialAngularGrid, TrigPoly,
};
pub use spectral::{
    ac_equivalence_check, arc_coverage, eigendecompose, gap_statistics, mourre_positivity,
    quasimode_test, ArcCoverage, GapStats, MourreConfig, MourreReport, QuasimodeSample,
    RootSelector, SpectrumReport,
};
