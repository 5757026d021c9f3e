//! Linguistic reward design in linear bandits, computed by exact enumeration.
//!
//! A speaker who knows the true reward weights picks an instruction or a
//! feature-value description for a listener who will then act in a sequence of
//! i.i.d. states. Literal listeners apply utterance semantics directly;
//! pragmatic listeners invert the speaker to infer the weights and, when it is
//! unknown, the speaker's horizon.
//!
//! Module map:
//! - [`bandit`]: actions, states, weights, the hypothesis grid
//! - [`language`]: utterances and their denotations
//! - [`literal`]: the literal listener
//! - [`speaker`]: horizon-weighted utterance choice with cached responses
//! - [`pragmatics`]: fixed-horizon and joint-horizon reward inference
//! - [`harness`]: deterministic sweeps and CSV/JSON output

pub mod bandit;
pub mod error;
pub mod exec;
pub mod harness;
pub mod language;
pub mod literal;
pub mod pragmatics;
pub mod softmax;
pub mod speaker;

pub use bandit::{reward, Action, Environment, EnvironmentConfig, FeatureVector, RewardWeights, State};
pub use error::{HarnessError, ModelError};
pub use exec::Execution;
pub use language::{Utterance, UtteranceKind, UtteranceSet};
pub use literal::{Belief, ListenerConfig, LiteralListener, Policy};
pub use pragmatics::{HorizonPrior, JointPosterior, PragmaticListener};
pub use speaker::{ResponseCache, Speaker, SpeakerConfig};
