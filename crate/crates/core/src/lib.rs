//! Formfactors, exact finite-chain correlators and momentum distributions of
//! the periodic XX spin chain at half filling.
//!
//! Every quantity is available through at least two independent routes, and
//! the [`oracle`] module realizes the many-body states explicitly for short
//! chains so that signs and phases can be pinned down.

pub mod acceptance;
pub mod correlator;
pub mod error;
pub mod formfactor;
pub mod lattice;
pub mod linalg;
pub mod momentum;
pub mod oracle;
pub mod special;

pub use error::{Result, XxError};
