//! Configuration-model laboratory.
//!
//! Samples uniform multigraphs with a prescribed degree sequence, takes a
//! census of their components, evaluates the limiting connectivity laws in
//! the critical window (`n1 ~ rho1 sqrt(n)`, `n2 ~ p2 n`), and checks those
//! laws exactly on tiny sequences and by Monte Carlo on large ones.

pub mod census;
pub mod cli;
pub mod degseq;
pub mod error;
pub mod generator;
pub mod montecarlo;
pub mod oracle;
pub mod stats;
pub mod theory;

pub use census::{component_census, ComponentCensus, Statistic};
pub use degseq::{build_sequence, DegreeSequence, LimitParams, WindowParams};
pub use error::{Error, Result};
pub use generator::{sample, Multigraph, Seed};
pub use montecarlo::{run_experiment, EstimateReport, ExperimentConfig, SequenceSource};
