//! Step rewards: ego progress terms plus the rulebook's weighted violation
//! penalties.
//!
//! The total reward of one agent step is `r_ego + r_rulebook`, where
//!
//! * `r_ego` rewards finishing the route (a large bonus when the goal is
//!   crossed inside the lateral tolerance, a small one when crossed at all)
//!   and charges a per-meter penalty while the speed sits outside the
//!   permitted band, and
//! * `r_rulebook` sums the damped rule penalties over the step's state
//!   trace, weighting length-proportional rules by the distance traveled.
//!
//! Whether the exception damping applies is judged once per step, from the
//! state the step started in.

use std::collections::BTreeMap;

use crate::rulebook::{rulebook_reward, Rulebook, RulebookError};
use crate::world::atoms::rulebook_active;
use crate::world::env::{StepEvents, StepOutcome, WorldParams};
use crate::world::scenario::Scenario;

/// Permitted speed band in km/h, boundaries included.
pub const SPEED_BAND_KMH: (f64, f64) = (10.0, 50.0);
/// Bonus for crossing the goal arc length outside the lateral tolerance.
pub const FINISH_PARTIAL: f64 = 10.0;
/// Bonus for crossing the goal arc length inside the lateral tolerance.
pub const FINISH_FULL: f64 = 60.0;

/// One step's reward, split into its additive terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardBreakdown {
    pub r_ego: f64,
    pub r_rulebook: f64,
    pub r_total: f64,
    /// Named additive terms: `r_finish`, `r_speed_l`, and one `rule:<id>`
    /// entry per rulebook rule. They sum to `r_total`.
    pub components: BTreeMap<String, f64>,
}

/// Finish bonus encoded by the step's terminal events.
pub fn finish_bonus(events: &StepEvents) -> f64 {
    if events.reached_both {
        FINISH_FULL
    } else if events.reached_s_target {
        FINISH_PARTIAL
    } else {
        0.0
    }
}

/// −1 when `speed` (m/s) falls outside the permitted band, else 0. Applied
/// per meter traveled, judged on the speed the step ends with.
pub fn speed_penalty(speed: f64) -> f64 {
    let kmh = speed * 3.6;
    if kmh < SPEED_BAND_KMH.0 || kmh > SPEED_BAND_KMH.1 {
        -1.0
    } else {
        0.0
    }
}

/// Score one step: set the rulebook's exception state from the step's start,
/// then combine the ego terms with the weighted rule penalties.
pub fn total_reward(
    outcome: &StepOutcome,
    scenario: &Scenario,
    rulebook: &mut Rulebook,
    params: &WorldParams,
) -> Result<RewardBreakdown, RulebookError> {
    rulebook.set_active(rulebook_active(
        &outcome.start,
        scenario,
        params.activation_ahead,
        params.activation_behind,
    ));

    let r_finish = finish_bonus(&outcome.events);
    let r_speed_l = speed_penalty(outcome.state.speed) * outcome.traveled;
    let r_ego = r_finish + r_speed_l;

    let weights: BTreeMap<String, f64> = rulebook
        .rules()
        .iter()
        .map(|rule| {
            let weight = if rule.per_length { outcome.traveled } else { 1.0 };
            (rule.id.clone(), weight)
        })
        .collect();
    let rb = rulebook_reward(rulebook, &outcome.trace, &weights)?;

    let mut components = BTreeMap::new();
    components.insert("r_finish".to_string(), r_finish);
    components.insert("r_speed_l".to_string(), r_speed_l);
    for (id, contribution) in &rb.per_rule {
        components.insert(format!("rule:{id}"), contribution.contribution);
    }
    Ok(RewardBreakdown {
        r_ego,
        r_rulebook: rb.total,
        r_total: r_ego + rb.total,
        components,
    })
}
