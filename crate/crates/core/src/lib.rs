//! Dense Liouville-space tools for finite-dimensional open quantum systems.
//!
//! Density matrices and operators are mapped to superkets by row-major
//! vectorization with conjugated column labels, `|a><b| -> |a> (x) |b>*`.
//! Every superoperator in the crate (Liouvillians, propagators, channels)
//! acts on that layout, so the triple-product identity reads
//! `vec(A B C) = (A (x) C^T) vec(B)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`qm`]: operators, density matrices, measurements, `expm`, `kron`.
//! - [`vectorization`]: superkets, superoperators and the bra-flipper map.
//! - [`generators`]: unitary and Lindblad Liouvillians.
//! - [`spectral`]: eigen/Jordan analysis, propagation, steady states,
//!   Heisenberg and interaction pictures.
//! - [`kraus`]: Choi reshuffling and operator-sum representations.
//! - [`tls`]: the two-level quantum-optical master equation in closed form.
//! - [`io`]: model documents and trajectory tables.
//!
//! `hbar = 1` throughout; Hamiltonians are angular frequencies.

pub mod error;
pub mod generators;
pub mod io;
pub mod kraus;
pub(crate) mod linalg;
pub mod qm;
pub mod random;
pub mod regression;
pub mod spectral;
pub mod tls;
pub mod vectorization;

pub use error::{Error, Result};
pub use generators::{
    lindblad_liouvillian, unitary_liouvillian, GeneratorKind, Jump, LindbladModel, Liouvillian,
};
pub use kraus::{
    apply_kraus, channel_superop, channels_equal, choi_reshuffle, completeness_defect, kraus_from_superop,
    ChoiMatrix, KrausSet,
};
pub use qm::{
    expectation, expm, hs_inner, kron, measure_prob, nonselective_update, purity, CMatrix, DensityMatrix,
    MeasurementSet, Operator, C64,
};
pub use spectral::{
    analyze, dyson_propagator, heisenberg_superket, propagate, propagate_expm_oracle, stability_report,
    steady_state, AnalyzeOptions, DysonOutcome, Expansion, SpectralClass, SpectralSystem, StabilityReport,
    Trajectory,
};
pub use tls::TlsParams;
pub use vectorization::{
    mho, mho_inv, super_acomm, super_comm, superket_basis, triple_superop, vectorize_product, SuperKet,
    SuperOp,
};
