//! Monte Carlo risk experiments, the oracle suite and experiment configs.

mod montecarlo;
mod oracle;
mod risk;
mod spec;

pub use montecarlo::{empirical_mgf, replicate, MeanEstimate};
pub use oracle::{run_oracle_suite, OracleRow, OracleTable};
pub use risk::{run_risk, RiskReport, RungReport};
pub use spec::{EstimatorSpec, ExperimentSpec, Rung, Source, TargetKind};
