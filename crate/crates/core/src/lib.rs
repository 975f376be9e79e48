//! Newton polygons of Artin–Schreier L-functions over F_q via Dwork traces.

pub mod arith;
pub mod dwork;
pub mod error;
pub mod finite_field;
pub mod oracle;
pub mod padic;
pub mod polygon;
pub mod scan;
pub mod splitting;
pub mod valuation;

pub use error::{Error, Result};
pub use finite_field::{FieldCtx, FqElem, PolyFq};
pub use polygon::NewtonPolygon;
pub use valuation::Valuation;
