//! Goal alignment: from a human's plan in their belief model, infer which
//! fluents of the resulting state they might want, ask about them in order
//! of value, and plan in the robot's model.

mod belief;
mod brute;
mod instance;
mod oracle;
mod session;

pub use belief::{
    analyze, approx_value_in, approx_value_out, build_queue, fluent_probability, probability_from_delta, query_value,
    unachievable_fluents, AnalysisError, BeliefState,
};
pub use brute::{brute_force_value, BruteForce, BruteForceError, Direction, DEFAULT_BRUTE_FORCE_BOUND};
pub use instance::{all_hidden_goals, expected_state, HaglInstance, HiddenGoal, InstanceError};
pub use oracle::{
    make_simulated_oracle, parse_answer_script, parse_yes_no, AnswerCache, Oracle, OracleError, ScriptedAnswer,
    ScriptedOracle, SimulatedOracle,
};
pub use session::{
    run_elicitation, ExitReason, QueryRecord, SessionError, SessionErrorKind, SessionOutcome, SessionVerdict, Termination,
};
