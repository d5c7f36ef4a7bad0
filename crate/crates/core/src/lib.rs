//! Exact recovery of linear and ReLU regression parameters from labels
//! corrupted by Massart noise.

// `!(x > 0.0)` is used on purpose so that NaN takes the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dataset;
pub mod harness;
pub mod isotropy;
pub mod l1solver;
pub mod linalg;
pub mod linear;
pub mod noise;
pub mod relu;
pub mod rng;

pub use dataset::{DatasetError, LabeledDataset};
pub use harness::{exact_recovery_bench, BenchConfig, BenchReport, HarnessError, Method};
pub use isotropy::{radial_isotropize, HeavySubspace, Isotropy, IsotropyError, RadialTransform};
pub use l1solver::{l0_fit_bruteforce, l1_fit_linear, snap_to_rational, L1Error, Model, RationalVector};
pub use linalg::{LinalgError, OrthonormalBasis, SymPsdMatrix};
pub use linear::{recover_linear, recover_linear_simple, RecoveryConfig, RecoveryError, RecoveryReport};
pub use noise::{corrupt_massart, CorruptionRecord, CorruptionStrategy, MassartSpec, NoiseError};
pub use relu::{
    ellipsoid_recover_relu, gd_relu_transformed, sep_oracle, EllipsoidConfig, GdMode, ReluError, SepResult,
};
