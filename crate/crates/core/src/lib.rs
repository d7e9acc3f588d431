//! Multiparameter braid matrices on `C^N ⊗ C^N` and their numerical verification.
//!
//! The braid matrix is a spectral sum over rank-1 projectors,
//! `R̂(θ) = Σ_k c(m_k, θ) P_k`, with `c = e^{mθ}` (nonunitary, real parameters) or
//! `c = e^{imθ}` (unitary). The crate builds the projector families, the parameter sets with
//! their bar symmetry, `R̂(θ)` along several independent routes, the generator `X` with
//! `R̂(θ) = e^{θX}`, and a single-parameter reference family `I + zM`. The [`verify`] module
//! checks the braid relation and the algebraic identities around it; [`entangle`] looks at
//! what unitary members do to product states.
//!
//! ```
//! use std::collections::BTreeMap;
//! use braidmat::braid::{BraidFamily, Mode, ParamKey, ParameterSet};
//! use braidmat::projector::Sign;
//! use braidmat::verify::{check_braid, BRAID_TOL};
//!
//! let free = BTreeMap::from([
//!     (ParamKey::new(1, 1, Sign::Plus), 1.0),
//!     (ParamKey::new(1, 1, Sign::Minus), -1.0),
//! ]);
//! let family = BraidFamily::new(ParameterSet::new(2, Mode::Unitary, &free).unwrap()).unwrap();
//! assert!(check_braid(&family, 0.3, -0.8, BRAID_TOL).passed);
//! ```

pub mod braid;
pub mod config;
pub mod entangle;
pub mod linalg;
pub mod projector;
pub mod sampling;
pub mod verify;

pub use braid::{BraidFamily, Generator, Mode, ParamKey, ParameterSet, ReferenceFamily};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use projector::{FamilyKind, ProjectorFamily, ProjectorKey, Sign};
pub use verify::{CheckResult, Suite, VerificationReport};
