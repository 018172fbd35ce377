//! Riesz-like bases on truncated rigged Hilbert space models.
//!
//! A rigged Hilbert space `D[t] ⊂ H ⊂ D×[t×]` is modelled by weighted
//! sequence spaces ([`triplet`]). Families of vectors and their biorthogonal
//! duals live in [`sequence`]; bases built from a continuous injective
//! operator and their strictness diagnostics in [`riesz`]; concrete function
//! space examples in [`function_spaces`]; the pseudo-Hermitian Hamiltonian
//! application in [`pseudo_hermitian`]; configuration, I/O and JSON reports
//! in [`config`], [`io`], [`report`] and [`runner`].

// negated float comparisons are used so that NaN falls on the failing side
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod function_spaces;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod par;
pub mod pseudo_hermitian;
pub mod report;
pub mod riesz;
pub mod runner;
pub mod sequence;
pub mod trend;
pub mod triplet;
pub mod verdict;

pub use config::{Command, ExampleName, Format, RunConfig};
pub use error::{Error, Result};
pub use operator::LinearMap;
pub use report::{DiagnosticsReport, Section};
pub use riesz::{make_riesz_like, RieszLikeBasis};
pub use runner::{execute, run};
pub use sequence::{ProbeOptions, SequenceFamily};
pub use triplet::{graph_norm_triplet, pairing, CoefVector, Space, WeightedTriplet};
pub use verdict::Verdict;
