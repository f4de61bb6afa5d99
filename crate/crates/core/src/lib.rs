//! Exact toric computations for minimal log discrepancies of generalized
//! pairs over a base, and the hyperplane search that produces
//! complements-style certificates.

pub mod error;
pub mod generate;
pub mod hyperplane;
pub mod instance;
pub mod lattice;
pub mod linalg;
pub mod num;
pub mod polyhedral;
pub mod toric;

pub use error::{Error, Result};
pub use lattice::{IntMatrix, LatticeHom, Sublattice};
pub use num::{Int, IntVector, Rat, RatVector};
pub use polyhedral::{Halfspace, Interval, OriginPosition, RatCone, RatPolyhedron, SupportSet};
pub use hyperplane::{
    find_hyperplane, gamma, verify_certificate, HyperplaneCertificate, LevelRecord, Verification,
};
pub use toric::{
    box_square, is_glc, lct_pullback, log_discrepancy, mld_over_fiber, BoxData, Fan, GPair,
    GeneralTerm, Mld, ToricContraction,
};
