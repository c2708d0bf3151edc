//! Local approximate Gaussian process surrogates for hyperelastic
//! constitutive laws, and a total-Lagrangian finite-element driver that
//! consumes them.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod fem;
pub mod gpr;
pub mod lagpr;
pub mod linalg;
pub mod mech;
pub mod metrics;
pub mod neighbors;
pub mod optim;
pub mod sampling;

pub use dataset::{build_training_set, load_csv, save_csv, Sample, TrainingSet};
pub use error::{Error, Result};
pub use fem::{
    apply_benchmark, solve_modified_nr, KnnBackend, LagprBackend, NrConfig, OracleBackend, Problem, SolveOutcome,
    SolveStatus,
};
pub use gpr::{Theta, ThetaSet, ThetaSharing};
pub use lagpr::{LagprConfig, LagprModel, ThetaPolicy};
pub use mech::{HyperelasticLaw, Oracle, TangentVoigt, VoigtStrain, VoigtStress};
pub use sampling::{hypercube_layers, lhs_sample};
