//! Exact diagonalization of a spin-½ XY molecule coupled to a single
//! one-photon cavity mode through a Jaynes-Cummings term.
//!
//! The photon is treated as an extra pseudo-spin on site 0, so the model is
//! an `N + 1` site flip-flop chain whose total magnetization is conserved.
//! Spectra are computed sector by sector and swept over the coupling angle
//! `phi` with `G = cos(phi)`, `J = sin(phi)`.

pub mod basis;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod parallel;
pub mod sectors;
pub mod sweep;

pub use basis::{encode, BasisState, HalfInt, QuantumNumbers, Spin, MAX_SITES};
pub use eigensolve::{
    degeneracy_summary, eigvals_symmetric, full_spectrum, DegeneracySummary, DenseMatrix, Level,
    Spectrum, DEFAULT_DEGENERACY_TOLERANCE,
};
pub use error::{Error, Result};
pub use geometry::{build_coupling_map, distance_profile, Bond, CouplingMap, Topology};
pub use hamiltonian::{
    build_jc_generator, build_photon_explicit, build_xy_generator, GeneratorPair, SparseSymmetric,
};
pub use sectors::{decompose, extract_block, verify_commutation, Sector, SectorBlocks};
pub use sweep::{
    find_max, sector_sweep, sweep, symmetry_report, MaxReport, PhiGrid, SweepMeta, SweepResult,
    SymmetryReport, Verdict,
};
