//! Dense-matrix checks for small networks.

mod matrix;
mod ops;
mod verify;

pub use matrix::{CMatrix, JACOBI_MAX_SWEEPS, JACOBI_TOL};
pub use ops::{
    build_operator, ipen_state, isotropic_edge, phi, phi_perp, product_state, projector, swap,
    sym_projector, DenseOperator, Slot, TwirlMode,
};
pub use verify::{
    bipartite_negativity, max_schmidt_weight, triangle_sigma_check, verify_fully_decomposable,
    verify_ipen_decomposition, CutMargin, DecompositionReport, IpenDecompositionReport,
    TriangleSigmaReport, PSD_TOL,
};
