//! Utterance space and truth-conditional semantics.
//!
//! Instructions denote a single action. Descriptions assert the exact reward
//! of one feature and are true of a weight vector iff that coordinate matches.
//! False descriptions are still valid utterances.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bandit::{Action, Environment, RewardWeights};
use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Utterance {
    Instruction { action: usize },
    Description { feature: usize, value: i32 },
}

impl Utterance {
    pub fn is_description(&self) -> bool {
        matches!(self, Utterance::Description { .. })
    }

    pub fn is_instruction(&self) -> bool {
        matches!(self, Utterance::Instruction { .. })
    }

    pub fn validate(&self, env: &Environment) -> Result<(), ModelError> {
        match *self {
            Utterance::Instruction { action } if action >= env.actions().len() => Err(
                ModelError::InvalidUtterance(format!("unknown action {action}")),
            ),
            Utterance::Description { feature, .. } if feature >= env.k() => Err(
                ModelError::InvalidUtterance(format!("unknown feature {feature}")),
            ),
            Utterance::Description { value, .. } if !env.value_set().contains(&value) => {
                Err(ModelError::InvalidUtterance(format!(
                    "value {value} outside {:?}",
                    env.value_set()
                )))
            }
            _ => Ok(()),
        }
    }

    /// Display form for reports, e.g. `blue is -2` or `pick a3 (blue spots)`.
    pub fn label(&self, env: &Environment) -> String {
        match *self {
            Utterance::Instruction { action } => format!("pick {}", env.action_label(action)),
            Utterance::Description { feature, value } => {
                format!("{} is {value:+}", env.feature_names()[feature])
            }
        }
    }
}

/// Compact comma-free token used inside CSV cells:
/// `instruction:3` or `description:1:-2`.
impl fmt::Display for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Utterance::Instruction { action } => write!(f, "instruction:{action}"),
            Utterance::Description { feature, value } => {
                write!(f, "description:{feature}:{value}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtteranceKind {
    InstructionsOnly,
    DescriptionsOnly,
    Both,
}

impl UtteranceKind {
    pub const ALL: [UtteranceKind; 3] = [
        UtteranceKind::InstructionsOnly,
        UtteranceKind::DescriptionsOnly,
        UtteranceKind::Both,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            UtteranceKind::InstructionsOnly => "instructions_only",
            UtteranceKind::DescriptionsOnly => "descriptions_only",
            UtteranceKind::Both => "both",
        }
    }
}

impl fmt::Display for UtteranceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtteranceSet {
    kind: UtteranceKind,
    utterances: Vec<Utterance>,
}

impl UtteranceSet {
    /// Instructions by action id, then descriptions by (feature, value).
    pub fn enumerate(env: &Environment, kind: UtteranceKind) -> Self {
        let mut utterances = Vec::new();
        if kind != UtteranceKind::DescriptionsOnly {
            utterances.extend(
                env.actions()
                    .iter()
                    .map(|a| Utterance::Instruction { action: a.id }),
            );
        }
        if kind != UtteranceKind::InstructionsOnly {
            for feature in 0..env.k() {
                utterances.extend(
                    env.value_set()
                        .iter()
                        .map(|&value| Utterance::Description { feature, value }),
                );
            }
        }
        UtteranceSet { kind, utterances }
    }

    pub fn kind(&self) -> UtteranceKind {
        self.kind
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn index_of(&self, u: &Utterance) -> Option<usize> {
        self.utterances.iter().position(|x| x == u)
    }
}

pub fn instruction_denotation(action_id: usize, action: &Action) -> bool {
    action_id == action.id
}

pub fn description_consistent(feature: usize, value: i32, w: &RewardWeights) -> bool {
    w.0.get(feature) == Some(&value)
}
