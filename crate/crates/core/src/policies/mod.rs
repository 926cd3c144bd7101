//! Online offloading policies.
//!
//! Every policy sees a round's confidence bin, returns a [`Decision`], and
//! is then updated with whatever its information structure allows: the LCB
//! family and the trivial baselines get [`Feedback`] (nothing on accept),
//! while the Hedge baseline is also told the offloading cost every round
//! (or, optionally, the whole round).

mod baseline;
mod config;
mod hedge;
mod lcb;

pub use baseline::{AlwaysAccept, AlwaysOffload, OptimalPolicy};
pub use config::{CostMode, PolicyConfig, PolicyKind, Rate};
pub use hedge::{HedgeFeedback, HedgePolicy, HedgeState};
pub use lcb::{
    lcb_gamma, lcb_phi, lcb_phi_lite, prefix_max_lcbs, LcbPolicy, LcbState, LcbVariant,
};

use crate::environment::{realize_feedback, Feedback, Round};
use crate::model::Decision;

/// Which observation a policy is entitled to after each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackModel {
    /// Correctness and cost only when offloading.
    Partial,
    /// Cost every round; correctness only when offloading.
    CostRevealed,
    /// Both would-be values every round.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation<'a> {
    Partial(Feedback),
    CostRevealed { cost: f64, feedback: Feedback },
    Full(&'a Round),
}

impl<'a> Observation<'a> {
    /// What a policy with feedback `model` learns after deciding `decision`.
    pub fn for_model(model: FeedbackModel, round: &'a Round, decision: Decision) -> Self {
        match model {
            FeedbackModel::Partial => Observation::Partial(realize_feedback(round, decision)),
            FeedbackModel::CostRevealed => Observation::CostRevealed {
                cost: round.cost,
                feedback: realize_feedback(round, decision),
            },
            FeedbackModel::Full => Observation::Full(round),
        }
    }
}

pub trait Policy: Send {
    /// Label used in reports.
    fn name(&self) -> &str;

    fn feedback_model(&self) -> FeedbackModel {
        FeedbackModel::Partial
    }

    fn decide(&mut self, bin: usize) -> Decision;

    fn update(&mut self, bin: usize, decision: Decision, observation: Observation<'_>);

    fn box_clone(&self) -> Box<dyn Policy>;
}

impl Clone for Box<dyn Policy> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}
