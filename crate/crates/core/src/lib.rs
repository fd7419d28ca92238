//! Aitken-accelerated restricted additive Schwarz preconditioners.

pub mod aitken;
pub mod analysis;
pub mod aras;
pub mod counters;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod partition;
pub mod preconditioner;
pub mod problems;
pub mod schwarz;

pub use aitken::{BasisOrigin, CoarseInterfaceSpace};
pub use aras::{build_aras, ArasPreconditioner, ArasVariant};
pub use error::{Error, Result};
pub use krylov::{gcr, gmres, Method, SolveReport};
pub use linalg::{DenseMatrix, SparseMatrix};
pub use partition::OverlapPartition;
pub use preconditioner::Preconditioner;
pub use schwarz::{build_ras, richardson_run, RasPreconditioner, SchwarzMode};
