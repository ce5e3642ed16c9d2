//! Exact rational linear algebra and bounded cochain complexes.

pub mod complex;
pub mod echelon;
pub mod scalar;
pub mod sparse;

pub use complex::{
    cokernel_homology, cone, degreewise_quotient, image_homology, kernel_homology, tensor_total, BasisLabel,
    ChainComplex, ChainMap, ComplexJson, Homology,
};
pub use echelon::{nullspace, rank_of_rows, Echelon, Subspace};
pub use scalar::Scalar;
pub use sparse::{MatrixJson, SparseMatrix, SparseVec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("shape mismatch in {context}: {left:?} vs {right:?}")]
    ShapeMismatch { context: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("differential at degree {degree} has shape {found:?}, expected {expected:?}")]
    ShapeAtDegree { degree: i64, expected: (usize, usize), found: (usize, usize) },
    #[error("expected {expected} differentials, found {found}")]
    DifferentialCount { expected: usize, found: usize },
    #[error("degree {0} outside the complex")]
    DegreeOutOfRange(i64),
    #[error("chain map is not injective in degree {degree}")]
    NotInjective { degree: i64 },
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
}
