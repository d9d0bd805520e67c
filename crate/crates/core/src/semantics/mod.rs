//! Forcing for constant-domain Kripke models: finite models with an exact
//! evaluator and an exhaustive enumerator, and the two infinite models over
//! quasi-partition worlds with certificate checks.

mod enumerate;
mod eval;
mod finite;
mod symbolic;

pub use enumerate::{
    enumerate_models, implicit_definability_suite, models_t, p_minus_q_worlds, DefinabilityReport,
    DefinabilityViolation,
};
pub use eval::{forces, forcing_set, ArenaTable, Compiled, EvalError};
pub use finite::{parse_model, FiniteCDModel, Frame, ModelError, MAX_DOM, MAX_WORLDS};
pub use symbolic::{
    cert_lsat, e2_witness, sample_successors, AtomExtensions, Certificate, Fact, SemanticsError, Side,
    SymbolicModel,
};
