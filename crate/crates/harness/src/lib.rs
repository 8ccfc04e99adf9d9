//! Self-play experiments, tail-game extraction, convergence scans and the
//! tables behind the `ebw` command line.

pub mod error;
pub mod experiment;
pub mod record;
pub mod scan;
pub mod spec;
pub mod suites;
pub mod tables;

pub use error::{HarnessError, Result};
pub use experiment::{run_self_play, Agent, AgentPolicy, BeliefModel, Experiment, World};
pub use record::{RecordHeader, StepRecord, TrajectoryRecord, TRAJECTORY_SCHEMA};
pub use scan::{
    convergence_scan, multi_seed_scan, tail_extract, ConvergenceReport, FirstTime, MultiSeedReport, SeedOutcome,
    TailGame,
};
pub use spec::{AgentKind, BudgetSpec, ExperimentSpec, Injection, OutputFormat, OutputSpec, Tolerances};
pub use suites::{pd_suite, see_not_ee_suite, Check, Concept, SuiteReport, VerifyRequest, VERIFY_SCHEMA};
pub use tables::{dogmatic_table, scenario_table, ScenarioTable};
