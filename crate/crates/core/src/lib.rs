//! Exact verification of finite semihypergroups: convolution tensors,
//! measures, invariant means and the linear programs that decide them.

pub mod amenability;
pub mod builders;
pub mod cli;
pub mod format;
pub mod lp;
pub mod measure;
pub mod pointset;
pub mod rational;
pub mod report;
pub mod sampling;
pub mod structure;

pub use amenability::{find_tlim, minimize_defect, verify_amenability_equivalence, verify_sub_equivalence};
pub use measure::{ProbabilityMeasure, SignedMeasure};
pub use pointset::PointSet;
pub use rational::Rational;
pub use structure::{ConvolutionTensor, FiniteSemihypergroup, HypergroupStructure};
