//! Finite-horizon values, embedded best responses and k-step planner agents.

pub mod agents;
pub mod error;
pub mod export;
pub mod task;
pub mod value;

pub use agents::{
    approx_agent_step, best_response, embedded_best_response, k_step_action, Decision, KStepPolicy,
};
pub use error::{PlanningError, Result};
pub use export::{q_table_csv, QTABLE_SCHEMA};
pub use task::{DiscountedTask, PlanBudget, ValueEstimate};
pub use value::{
    argmax_lowest, k_step_q, k_step_q_values, optimal_q_values, policy_value, q_value, Continuation,
};
