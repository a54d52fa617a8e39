//! Exact computations with differential graded Lie algebras and
//! L-infinity algebras over the rationals.

pub mod cli;
pub mod dgl;
pub mod error;
pub mod free_lie;
pub mod graded;
pub mod linalg;
pub mod linf;
pub mod polysolve;
pub mod quillen_ss;
pub mod samples;
pub mod scalar;
pub mod sullivan;
pub mod whitehead;

pub use error::{Error, Result};
pub use graded::{Degree, LinComb};
pub use scalar::{Poly, Q};
