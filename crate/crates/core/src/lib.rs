//! Eisenstein series for the Fricke groups of level 5 and 7.
//!
//! - [`core_series`]: exact q-expansions over the rationals, eta products,
//!   cusp forms and basis checks.
//! - [`evaluator`]: high-precision evaluation by q-series and by lattice sums,
//!   and the real-valued arc functions.
//! - [`domain_geometry`]: boundary arcs, corners, angle bookkeeping and the
//!   fundamental-domain test.
//! - [`zero_locator`]: sign-change scanning, bisection and the valence budget.
//! - [`certifier`]: remainder bounds, the head/tail certificate algorithm,
//!   the catalog of lemma items and interval triples, and the case classifier.

pub mod certifier;
pub mod core_series;
pub mod domain_geometry;
pub mod error;
pub mod evaluator;
pub mod real;
pub mod zero_locator;

pub use error::{Error, Result};
