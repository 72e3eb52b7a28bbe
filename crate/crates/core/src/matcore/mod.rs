//! Complex linear algebra and quantum-state primitives.

pub mod eigen;
pub mod matrix;
pub mod state;

pub use eigen::{eigh, eigvalsh, HermitianEigen};
pub use matrix::{inner, kron_vec, norm2, CMat, C64, ONE, ZERO};
pub use state::{
    fro_norm, hermitian_eigs, maximally_entangled, op_norm, partial_trace, partial_trace_raw,
    spectral_norm, von_neumann_entropy, DensityMatrix, PureState, Spectrum, TraceOut,
};
