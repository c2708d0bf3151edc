//! Total-Lagrangian finite elements on structured hexahedral meshes.

pub mod backend;
pub mod benchmarks;
pub mod element;
pub mod mesh;
pub mod skyline;
pub mod solver;

pub use backend::{FreezeRule, GaussPointState, KnnBackend, LagprBackend, MaterialBackend, OracleBackend, UpdateKind};
pub use benchmarks::{apply_benchmark, benchmark_with_divisions, Problem};
pub use element::{element_residual_and_tangent, ElementGeometry, GaussRecord, MaterialResponse};
pub use mesh::{make_cube_mesh, HexMesh};
pub use solver::{solve_modified_nr, BcSet, IterationRecord, NrConfig, SolveOutcome, SolveStatus};
