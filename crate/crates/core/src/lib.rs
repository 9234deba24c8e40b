//! Exact and numeric machinery for correlation functions of the rank-1
//! Heisenberg vertex algebra, at genus zero and on Schottky-uniformized
//! genus-g surfaces.
//!
//! The crate is organized in layers:
//!
//! * [`exact`]: arbitrary-precision rationals, sparse multivariate
//!   polynomials and rational functions, Laurent expansion / formal
//!   residues, and truncated multi-parameter power series.
//! * [`fock`]: the bosonic Fock space, vertex-operator modes, the Virasoro
//!   action, invariant pairings and dual bases, coordinate changes.
//! * [`genus0`]: exact n-point correlation functions, reduction kernels,
//!   Zhu-style reduction, Ward identities, Mobius covariance, coboundaries.
//! * [`schottky`]: Schottky groups, word enumeration, Poincare sums for the
//!   Bers quasiform, quasi-periodicity extraction.
//! * [`sewing`]: moment matrices of the sewing expansion, Neumann series,
//!   the sewed quasiform and its holomorphic-form coefficients.
//! * [`genusg`]: genus-g partition and n-point functions as truncated
//!   rho-series, residues, Mobius and Ward checks, genus-g reduction.
//! * [`verify`]: named verification suites shared by the CLI and the
//!   acceptance tests.

pub mod error;
pub mod exact;
pub mod fock;
pub mod genus0;
pub mod genusg;
pub mod schottky;
pub mod sewing;
pub mod verify;

pub use error::{Error, Result};
pub use exact::poly::{Poly, Var};
pub use exact::rational::Rational;
pub use exact::ratfunc::RationalFunction;
pub use exact::series::LaurentSeries;
pub use exact::trunc::TruncatedSeries;
pub use fock::{BasisState, FockVector};
pub use genus0::{CorrelationForm, Correlator, Insertion, MobiusMatrix, ReductionKernel};
pub use genusg::{zhu_reduce_g, GenusContext, GenusGFunction, PsiSource, ZhuReport, ZhuSample};
pub use schottky::{
    group_words, psi_poincare, schottky_generator, theta_extract, word_count, BersKernel,
    GroupWord, Handle, MobiusMap, PsiValue, SchottkyConfig,
};
pub use sewing::{ExactSewing, SewingParams, SewingSystem};
pub use verify::{run_suite, run_suite_seeded, Report, SUITE_NAMES};
