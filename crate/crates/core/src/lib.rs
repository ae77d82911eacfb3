//! Generalized Deuber sets over `Z^d`: shapes and their configurations,
//! the Rado columns condition and its reduction to shapes, Hales-Jewett
//! lines, the HJ lift, finite IP-sets and certificate-producing coloring
//! search.

pub mod catalog;
pub mod error;
pub mod hj;
pub mod hypergraph;
pub mod ip;
pub mod json;
pub mod lift;
pub mod linalg;
pub mod poly;
pub mod rado;
pub mod search;
pub mod shape;

pub use error::{Error, Result};
pub use hj::{VariableWord, Word};
pub use ip::FiniteIP;
pub use lift::{full_lift, lift, FullLift, LiftPlan};
pub use linalg::{IntMatrix, Rat, RatMatrix};
pub use poly::{PolyMap, Polynomial};
pub use rado::{ColumnsCertificate, GenColumnsCertificate, Reduction};
pub use search::{Certificate, Coloring, Domain, ENGINE_VERSION};
pub use shape::{ConfigSet, Concordance, Pattern, Point, SeedVector, Shape};
