//! Dense and banded complex linear algebra kernels.

mod chol;
mod eigen;
mod lu;

pub use chol::pivoted_cholesky;
pub use eigen::{eig, schur, Eigen, Schur};
pub use lu::{BandedLu, BandedMatrix};
