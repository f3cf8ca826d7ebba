//! Conditional-independence testing and PC-stable causal discovery for data
//! with heteroskedastic noise.
//!
//! The partial-correlation test residualizes each variable on the conditioning
//! set. Variables declared heteroskedastic (through [`ExpertKnowledge`]) are
//! fitted by weighted least squares with inverse-variance weights estimated from
//! windowed squared residuals, and their standardized residuals enter the
//! correlation.
//!
//! ```
//! use hetcd::{run_ci_test, simulate_bivariate, BivariateModel, CiTestSpec};
//!
//! let model = BivariateModel { c: 0.0, ..BivariateModel::default() };
//! let sim = simulate_bivariate(&model, 300, 1).unwrap();
//! let r = run_ci_test(&sim.data, "X", "Y", &["Z"], &CiTestSpec::ols(0.05), None).unwrap();
//! assert!((0.0..=1.0).contains(&r.p_value));
//! ```

pub mod bench;
pub mod citest;
pub mod commands;
pub mod data;
pub mod error;
pub mod graph;
pub mod knowledge;
pub mod metrics;
pub mod pc;
pub mod regression;
pub mod scm;
pub mod stats;
pub mod variance;

pub use citest::{run_ci_test, CiTest, CiTestResult, CiTestSpec, NoiseScales, ParCorr, Variant, WeightMode};
pub use data::Dataset;
pub use error::{Error, Result};
pub use graph::{cpdag_of, random_dag, Cpdag, Dag, EdgeMark};
pub use knowledge::{ExpertKnowledge, HeteroSpec};
pub use metrics::{adjacency_scores, edgemark_scores, AdjacencyScores, EdgemarkScores};
pub use pc::{pc_stable, DSeparationOracle, PcConfig, PcOutput};
pub use regression::{ols_fit, standardized_residuals, wls_fit, DesignMatrix, FitResult};
pub use scm::{simulate, simulate_bivariate, BivariateModel, Driver, NoiseScaling, ScmSpec, Shape, SimOutput};
pub use variance::{estimate_variance, estimate_weights, Window};
