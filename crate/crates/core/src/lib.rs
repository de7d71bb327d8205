//! Computational companion to decorrelation estimates for translates of the
//! torus of lattices `Λ_B` under the diagonal flow `a(t)`.
//!
//! The crate is organized by capability:
//!
//! * [`lattice`]: flow parameters, unimodular lattices, admissible index
//!   sets, LLL reduction, lattice-point enumeration and the block shapes of
//!   the intermediate groups `G_I`.
//! * [`weights`]: the weight calculus `α_ij(t) = t_i + t_j` and an exact
//!   rational linear program certifying the weight-separation constant.
//! * [`testfns`]: bump functions, Siegel transforms, characters and
//!   trigonometric polynomials on the torus, the Wiener norm and the
//!   `sin²(x)/x²` kernel.
//! * [`montecarlo`]: deterministic parallel estimators for the correlation
//!   integrals, decay sweeps, circle and affine mean decorrelation.
//! * [`caseplan`]: the recursive case classifier for separated tuples.
//! * [`experiment`]: TOML experiment configs and CSV/JSON/SVG reports used by
//!   the `diagflow` binary.
//!
//! Runnable walkthroughs of every capability live in `examples/`.

pub mod caseplan;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod montecarlo;
pub mod testfns;
pub mod weights;

pub use error::{Error, Result};
