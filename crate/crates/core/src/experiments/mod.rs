//! Reproducible numerical experiments: refinement studies, long-time
//! dynamics and randomized checks of the continuity estimates.

pub mod config;
pub mod convergence;
pub mod dynamics;
pub mod gausson;
pub mod lemmas;
pub mod output;

pub use convergence::{converge_space, converge_space_time, converge_time, fit_slope, ConvergenceTable, StudySetup};
pub use gausson::{Gausson, TwoGausson, TwoGaussonCase};
pub use dynamics::{dynamics_2d_tanh, dynamics_two_gausson, DynamicsConfig, DynamicsOutput};
pub use lemmas::{verify_lemmas, LemmaReport};
