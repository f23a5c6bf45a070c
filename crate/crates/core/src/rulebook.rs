//! Prioritized rule hierarchy and its reward contribution.
//!
//! A rulebook is a finite set of rule realizations — temporal-logic formulas
//! with a priority level, a scale, and a per-step weight policy — plus one
//! damping coefficient per level. Level 1 is the highest priority. When the
//! rulebook is *active* (an exception situation such as a blocked lane), a
//! rule's effective weight is scaled by the product of the coefficients of
//! all levels from 1 down to its own, so lower-priority rules are relaxed.
//! When inactive, every coefficient is treated as 1 and the full penalties
//! apply.
//!
//! The reward of a step is the sum over rules of
//! `cumulative_coefficient · penalty · scale · weight`, where the penalty is
//! −1 if the step's trace violates the rule formula and 0 otherwise, and the
//! weight is supplied by the caller (1 for collision-style rules, the
//! traveled length for lane-keeping-style rules). The total is accumulated
//! per level so that relaxing a level rescales that level's subtotal by
//! exactly one multiplication — active and inactive totals then differ by a
//! bit-exact factor when only one level is violated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{self, EvalError, Formula, ParseError, TraceState};

/// One rule: a named temporal-logic formula with hierarchy metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRealization {
    /// Unique name, also the key for weights and reported contributions.
    pub id: String,
    pub formula: Formula,
    /// Priority level; 1 is the highest priority.
    pub level: usize,
    /// Scale factor applied to the penalty.
    pub scale: f64,
    /// Whether the caller should weight this rule by the length traveled
    /// during the step (true for lane-keeping-style rules) or by 1
    /// (collision-style rules).
    pub per_length: bool,
}

/// Declarative form of a rule, as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub id: String,
    /// Formula text, e.g. `"G(no_collision)"`.
    pub formula: String,
    pub level: usize,
    pub scale: f64,
    #[serde(default)]
    pub per_length: bool,
}

/// A validated rule hierarchy with per-level damping coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Rulebook {
    rules: Vec<RuleRealization>,
    /// Damping coefficient for level `i + 1` (levels are contiguous from 1).
    level_coefficients: Vec<f64>,
    /// Whether the exception situation is currently in effect.
    active: bool,
    /// Whether this rulebook is allowed to activate at all. Ablations that
    /// keep every coefficient at 1 permanently set this to false.
    situation_aware: bool,
}

#[derive(Debug, Error)]
pub enum RulebookError {
    #[error("rulebook needs at least one rule")]
    EmptyRules,
    #[error("duplicate rule id {0:?}")]
    DuplicateRuleId(String),
    #[error("rule {id:?} has level {level}, but levels must be contiguous from 1 (highest used: {max_level})")]
    NonContiguousLevels {
        id: String,
        level: usize,
        max_level: usize,
    },
    #[error("no coefficient for level {0}")]
    MissingCoefficient(usize),
    #[error("coefficient given for level {level}, but no rule uses it")]
    UnusedCoefficient { level: usize },
    #[error("coefficient for level {level} is {value}, outside [0, 1]")]
    CoefficientOutOfRange { level: usize, value: f64 },
    #[error("rule {id:?} has non-positive scale {scale}")]
    NonPositiveScale { id: String, scale: f64 },
    #[error("rule {id:?}: {source}")]
    BadFormula {
        id: String,
        #[source]
        source: ParseError,
    },
    #[error("unknown rule id {0:?}")]
    UnknownRule(String),
    #[error("no weight supplied for rule {0:?}")]
    MissingWeight(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unsupported rulebook config version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("rulebook config: {0}")]
    Config(#[from] toml::de::Error),
}

/// Reward decomposition for one step: the total plus per-rule bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RulebookReward {
    pub total: f64,
    pub per_rule: BTreeMap<String, RuleContribution>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleContribution {
    /// Raw violation signal: −1 (violated) or 0 (satisfied).
    pub penalty: f64,
    /// Cumulative damping coefficient applied to this rule.
    pub coefficient: f64,
    /// coefficient · penalty · scale · weight.
    pub contribution: f64,
}

/// Build and validate a rulebook from rule specs and per-level coefficients.
///
/// Requirements: at least one rule; unique ids; formulas parse; scales
/// positive; the used levels form a contiguous range starting at 1; exactly
/// those levels carry a coefficient, each in [0, 1]. The book starts
/// inactive and situation-aware.
pub fn build_rulebook(
    specs: &[RuleSpec],
    coefficients: &BTreeMap<usize, f64>,
) -> Result<Rulebook, RulebookError> {
    if specs.is_empty() {
        return Err(RulebookError::EmptyRules);
    }
    let mut rules = Vec::with_capacity(specs.len());
    for spec in specs {
        if rules.iter().any(|r: &RuleRealization| r.id == spec.id) {
            return Err(RulebookError::DuplicateRuleId(spec.id.clone()));
        }
        if spec.scale <= 0.0 {
            return Err(RulebookError::NonPositiveScale {
                id: spec.id.clone(),
                scale: spec.scale,
            });
        }
        let formula =
            ltl::parse_formula(&spec.formula).map_err(|source| RulebookError::BadFormula {
                id: spec.id.clone(),
                source,
            })?;
        rules.push(RuleRealization {
            id: spec.id.clone(),
            formula,
            level: spec.level,
            scale: spec.scale,
            per_length: spec.per_length,
        });
    }

    let max_level = rules.iter().map(|r| r.level).max().expect("non-empty");
    for rule in &rules {
        if rule.level == 0 {
            return Err(RulebookError::NonContiguousLevels {
                id: rule.id.clone(),
                level: 0,
                max_level,
            });
        }
    }
    for level in 1..=max_level {
        if !rules.iter().any(|r| r.level == level) {
            // Some rule sits above this hole; report it for a usable message.
            let offender = rules
                .iter()
                .find(|r| r.level > level)
                .expect("a level above the hole exists");
            return Err(RulebookError::NonContiguousLevels {
                id: offender.id.clone(),
                level: offender.level,
                max_level,
            });
        }
        if !coefficients.contains_key(&level) {
            return Err(RulebookError::MissingCoefficient(level));
        }
    }
    for (&level, &value) in coefficients {
        if level == 0 || level > max_level {
            return Err(RulebookError::UnusedCoefficient { level });
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(RulebookError::CoefficientOutOfRange { level, value });
        }
    }

    let level_coefficients = (1..=max_level).map(|l| coefficients[&l]).collect();
    Ok(Rulebook {
        rules,
        level_coefficients,
        active: false,
        situation_aware: true,
    })
}

impl Rulebook {
    pub fn rules(&self) -> &[RuleRealization] {
        &self.rules
    }

    /// Number of hierarchy levels (levels are contiguous from 1).
    pub fn max_level(&self) -> usize {
        self.level_coefficients.len()
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    /// Flip the exception situation on or off. Ignored (kept off) when the
    /// book is not situation-aware.
    pub fn set_active(&mut self, active: bool) {
        self.active = active && self.situation_aware;
    }

    pub fn situation_aware(&self) -> bool {
        self.situation_aware
    }

    /// Permanently allow or forbid activation; turning awareness off also
    /// deactivates immediately.
    pub fn set_situation_aware(&mut self, aware: bool) {
        self.situation_aware = aware;
        if !aware {
            self.active = false;
        }
    }

    fn rule_by_id(&self, id: &str) -> Result<&RuleRealization, RulebookError> {
        self.rules
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| RulebookError::UnknownRule(id.to_string()))
    }

    /// Effective damping for a whole level: the product of the coefficients
    /// of levels 1..=level when active, 1 otherwise.
    fn level_damping(&self, level: usize) -> f64 {
        if !self.active {
            return 1.0;
        }
        self.level_coefficients[..level].iter().product()
    }
}

/// Cumulative damping coefficient of one rule: the product of the level
/// coefficients from the top of the hierarchy down to the rule's own level
/// when the book is active; exactly 1 when inactive.
pub fn cumulative_coefficient(rb: &Rulebook, rule_id: &str) -> Result<f64, RulebookError> {
    let rule = rb.rule_by_id(rule_id)?;
    Ok(rb.level_damping(rule.level))
}

/// Score a step trace against every rule and sum the weighted contributions.
///
/// `weights` must contain an entry per rule id (the caller decides whether a
/// rule is weighted by traveled length or by 1). The total is accumulated
/// level by level — each level's raw subtotal is computed first and then
/// scaled once by its damping coefficient — so activation rescales a level
/// bit-exactly.
pub fn rulebook_reward(
    rb: &Rulebook,
    trace: &[TraceState],
    weights: &BTreeMap<String, f64>,
) -> Result<RulebookReward, RulebookError> {
    let mut per_rule = BTreeMap::new();
    let mut raw_level_totals = vec![0.0_f64; rb.max_level()];
    for rule in &rb.rules {
        let weight = *weights
            .get(&rule.id)
            .ok_or_else(|| RulebookError::MissingWeight(rule.id.clone()))?;
        let penalty = ltl::rule_penalty(&rule.formula, trace)?;
        let coefficient = rb.level_damping(rule.level);
        let raw = penalty * rule.scale * weight;
        raw_level_totals[rule.level - 1] += raw;
        per_rule.insert(
            rule.id.clone(),
            RuleContribution {
                penalty,
                coefficient,
                contribution: coefficient * raw,
            },
        );
    }
    let mut total = 0.0;
    for (i, raw) in raw_level_totals.iter().enumerate() {
        total += rb.level_damping(i + 1) * raw;
    }
    Ok(RulebookReward { total, per_rule })
}

// ---------------------------------------------------------------------------
// Shipped configuration
// ---------------------------------------------------------------------------

/// On-disk rulebook description (structured text, versioned).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulebookConfig {
    pub version: u32,
    #[serde(rename = "rule")]
    pub rules: Vec<RuleSpec>,
    /// Damping coefficient for level `i + 1`.
    pub coefficients: Vec<f64>,
}

pub const RULEBOOK_CONFIG_VERSION: u32 = 1;

impl RulebookConfig {
    pub fn build(&self) -> Result<Rulebook, RulebookError> {
        if self.version != RULEBOOK_CONFIG_VERSION {
            return Err(RulebookError::UnsupportedVersion {
                found: self.version,
                expected: RULEBOOK_CONFIG_VERSION,
            });
        }
        let coefficients: BTreeMap<usize, f64> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1, c))
            .collect();
        build_rulebook(&self.rules, &coefficients)
    }
}

/// Parse a rulebook from its config-file text.
pub fn rulebook_from_toml(text: &str) -> Result<Rulebook, RulebookError> {
    let config: RulebookConfig = toml::from_str(text)?;
    config.build()
}

/// The standard two-level driving hierarchy: collision avoidance on top
/// (scale 10, weight 1 per step), lane keeping and road keeping below
/// (scale 1, weighted by traveled length), with the lower level damped to
/// 0.1 while an exception situation is active.
pub fn standard_config() -> RulebookConfig {
    RulebookConfig {
        version: RULEBOOK_CONFIG_VERSION,
        rules: vec![
            RuleSpec {
                id: "no_collision".to_string(),
                formula: "G(no_collision)".to_string(),
                level: 1,
                scale: 10.0,
                per_length: false,
            },
            RuleSpec {
                id: "in_lane".to_string(),
                formula: "G(in_lane)".to_string(),
                level: 2,
                scale: 1.0,
                per_length: true,
            },
            RuleSpec {
                id: "no_out_road".to_string(),
                formula: "G(no_out_road)".to_string(),
                level: 2,
                scale: 1.0,
                per_length: true,
            },
        ],
        coefficients: vec![1.0, 0.1],
    }
}

/// The standard hierarchy, ready to use.
pub fn standard_rulebook() -> Rulebook {
    standard_config()
        .build()
        .expect("built-in rulebook must validate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeff_map(values: &[f64]) -> BTreeMap<usize, f64> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i + 1, v))
            .collect()
    }

    fn spec(id: &str, formula: &str, level: usize, scale: f64, per_length: bool) -> RuleSpec {
        RuleSpec {
            id: id.to_string(),
            formula: formula.to_string(),
            level,
            scale,
            per_length,
        }
    }

    /// Trace over the three standard atoms from per-state triples
    /// (no_collision, in_lane, no_out_road).
    fn trace(states: &[(bool, bool, bool)]) -> Vec<TraceState> {
        states
            .iter()
            .map(|&(c, l, r)| {
                [
                    ("no_collision".to_string(), c),
                    ("in_lane".to_string(), l),
                    ("no_out_road".to_string(), r),
                ]
                .into_iter()
                .collect()
            })
            .collect()
    }

    fn standard_weights(l: f64) -> BTreeMap<String, f64> {
        [
            ("no_collision".to_string(), 1.0),
            ("in_lane".to_string(), l),
            ("no_out_road".to_string(), l),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn standard_rulebook_validates() {
        let rb = standard_rulebook();
        assert_eq!(rb.rules().len(), 3);
        assert_eq!(rb.max_level(), 2);
        assert!(!rb.is_active(), "books start inactive");
        assert!(rb.situation_aware());
    }

    #[test]
    fn build_rejects_invalid_specs() {
        let ok = |specs: &[RuleSpec], coeffs: &[f64]| build_rulebook(specs, &coeff_map(coeffs));
        assert!(matches!(ok(&[], &[]), Err(RulebookError::EmptyRules)));

        let dup = [
            spec("a", "G x", 1, 1.0, false),
            spec("a", "G y", 1, 1.0, false),
        ];
        assert!(matches!(
            ok(&dup, &[1.0]),
            Err(RulebookError::DuplicateRuleId(_))
        ));

        let gap = [
            spec("a", "G x", 1, 1.0, false),
            spec("b", "G y", 3, 1.0, false),
        ];
        assert!(matches!(
            ok(&gap, &[1.0, 0.5, 0.2]),
            Err(RulebookError::NonContiguousLevels { level: 3, .. })
        ));

        let one = [spec("a", "G x", 1, 1.0, false)];
        assert!(matches!(
            ok(&one, &[]),
            Err(RulebookError::MissingCoefficient(1))
        ));
        assert!(matches!(
            ok(&one, &[1.0, 0.5]),
            Err(RulebookError::UnusedCoefficient { level: 2 })
        ));
        assert!(matches!(
            ok(&one, &[1.5]),
            Err(RulebookError::CoefficientOutOfRange { .. })
        ));

        let bad_scale = [spec("a", "G x", 1, 0.0, false)];
        assert!(matches!(
            ok(&bad_scale, &[1.0]),
            Err(RulebookError::NonPositiveScale { .. })
        ));

        let bad_formula = [spec("a", "G (", 1, 1.0, false)];
        assert!(matches!(
            ok(&bad_formula, &[1.0]),
            Err(RulebookError::BadFormula { .. })
        ));
    }

    #[test]
    fn cumulative_coefficients_follow_the_hierarchy() {
        let mut rb = standard_rulebook();
        // Inactive: everything is 1.
        assert_eq!(cumulative_coefficient(&rb, "no_collision").unwrap(), 1.0);
        assert_eq!(cumulative_coefficient(&rb, "in_lane").unwrap(), 1.0);
        rb.set_active(true);
        assert_eq!(cumulative_coefficient(&rb, "no_collision").unwrap(), 1.0);
        assert_eq!(cumulative_coefficient(&rb, "in_lane").unwrap(), 0.1);
        assert_eq!(cumulative_coefficient(&rb, "no_out_road").unwrap(), 0.1);
        assert!(matches!(
            cumulative_coefficient(&rb, "nope"),
            Err(RulebookError::UnknownRule(_))
        ));
    }

    #[test]
    fn awareness_gate_forces_inactive() {
        let mut rb = standard_rulebook();
        rb.set_situation_aware(false);
        rb.set_active(true);
        assert!(!rb.is_active(), "unaware books never activate");
        assert_eq!(cumulative_coefficient(&rb, "in_lane").unwrap(), 1.0);
    }

    #[test]
    fn reward_matches_hand_computed_contributions() {
        let mut rb = standard_rulebook();
        // One state out of lane (but on the road), no collision.
        let t = trace(&[(true, true, true), (true, false, true)]);
        let weights = standard_weights(2.0);

        rb.set_active(true);
        let active = rulebook_reward(&rb, &t, &weights).unwrap();
        // in_lane: 0.1 · (−1) · 1.0 · 2.0 = −0.2; everything else satisfied.
        assert_eq!(active.per_rule["in_lane"].contribution, -0.2);
        assert_eq!(active.per_rule["no_collision"].contribution, 0.0);
        assert_eq!(active.per_rule["no_out_road"].contribution, -0.0);
        assert!((active.total - (-0.2)).abs() < 1e-15);

        rb.set_active(false);
        let inactive = rulebook_reward(&rb, &t, &weights).unwrap();
        assert_eq!(inactive.per_rule["in_lane"].coefficient, 1.0);
        assert!((inactive.total - (-2.0)).abs() < 1e-15);
    }

    #[test]
    fn satisfied_traces_cost_nothing() {
        let mut rb = standard_rulebook();
        rb.set_active(true);
        let t = trace(&[(true, true, true); 5]);
        let reward = rulebook_reward(&rb, &t, &standard_weights(2.4)).unwrap();
        assert_eq!(reward.total, 0.0);
    }

    #[test]
    fn missing_weight_is_an_error() {
        let rb = standard_rulebook();
        let t = trace(&[(true, true, true)]);
        let mut weights = standard_weights(1.0);
        weights.remove("no_out_road");
        assert!(matches!(
            rulebook_reward(&rb, &t, &weights),
            Err(RulebookError::MissingWeight(id)) if id == "no_out_road"
        ));
    }

    #[test]
    fn active_total_is_bitwise_one_tenth_for_lower_level_violations() {
        // When only level-2 rules are violated, activating the book must
        // rescale the total by the level-2 damping (0.1) bit-exactly — the
        // property the level-grouped accumulation exists to guarantee.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut rb = standard_rulebook();
        for _ in 0..1000 {
            let states: Vec<(bool, bool, bool)> = (0..rng.gen_range(1..8))
                .map(|_| (true, rng.gen::<bool>(), rng.gen::<bool>()))
                .collect();
            let t = trace(&states);
            let weights = standard_weights(rng.gen_range(0.0..30.0));
            rb.set_active(true);
            let active = rulebook_reward(&rb, &t, &weights).unwrap();
            rb.set_active(false);
            let inactive = rulebook_reward(&rb, &t, &weights).unwrap();
            assert_eq!(
                active.total,
                0.1 * inactive.total,
                "active total must be exactly one tenth of inactive"
            );
        }
    }

    #[test]
    fn generic_reward_equals_hand_coded_expansion() {
        // The generic machinery must reproduce the direct formula
        //   ρ1·p_col·c_col + ρ1ρ2·p_lane·l·c_lane + ρ1ρ2·p_road·l·c_road
        // for the standard book over random traces, weights, and activity.
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let mut rb = standard_rulebook();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let states: Vec<(bool, bool, bool)> = (0..rng.gen_range(1..10))
                .map(|_| (rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let t = trace(&states);
            let l = rng.gen_range(0.0..30.0);
            let active = rng.gen::<bool>();
            rb.set_active(active);
            let got = rulebook_reward(&rb, &t, &standard_weights(l)).unwrap();

            let p = |idx: usize| {
                if states.iter().all(|s| match idx {
                    0 => s.0,
                    1 => s.1,
                    _ => s.2,
                }) {
                    0.0
                } else {
                    -1.0
                }
            };
            let (rho1, rho2) = if active { (1.0, 0.1) } else { (1.0, 1.0) };
            let expected =
                rho1 * p(0) * 10.0 + rho1 * rho2 * p(1) * l * 1.0 + rho1 * rho2 * p(2) * l * 1.0;
            worst = worst.max((got.total - expected).abs());
        }
        assert!(
            worst < 1e-12,
            "generic vs hand-coded totals diverge: max |diff| = {worst:e}"
        );
    }

    #[test]
    fn total_re_sums_from_contributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut rb = standard_rulebook();
        rb.set_active(true);
        for _ in 0..200 {
            let states: Vec<(bool, bool, bool)> = (0..rng.gen_range(1..6))
                .map(|_| (rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let reward =
                rulebook_reward(&rb, &trace(&states), &standard_weights(rng.gen_range(0.0..10.0)))
                    .unwrap();
            let sum: f64 = reward.per_rule.values().map(|c| c.contribution).sum();
            assert!(
                (reward.total - sum).abs() < 1e-12,
                "total {} vs contribution sum {}",
                reward.total,
                sum
            );
        }
    }

    #[test]
    fn flat_coefficients_reduce_to_a_weighted_sum() {
        let specs = [
            spec("top", "G a", 1, 3.0, false),
            spec("mid", "G b", 2, 2.0, true),
            spec("low", "G c", 3, 5.0, true),
        ];
        let mut rb = build_rulebook(&specs, &coeff_map(&[1.0, 1.0, 1.0])).unwrap();
        rb.set_active(true);
        let t: Vec<TraceState> = vec![[
            ("a".to_string(), false),
            ("b".to_string(), true),
            ("c".to_string(), false),
        ]
        .into_iter()
        .collect()];
        let weights: BTreeMap<String, f64> = [
            ("top".to_string(), 1.0),
            ("mid".to_string(), 4.0),
            ("low".to_string(), 2.0),
        ]
        .into_iter()
        .collect();
        let reward = rulebook_reward(&rb, &t, &weights).unwrap();
        // All coefficients 1: plain sum −3 + 0 + −10.
        assert!((reward.total - (-13.0)).abs() < 1e-12);
    }

    #[test]
    fn stronger_damping_above_strictly_shrinks_contributions() {
        let specs = [
            spec("top", "G a", 1, 1.0, false),
            spec("x", "G b", 2, 1.0, false),
        ];
        let weights: BTreeMap<String, f64> =
            [("top".to_string(), 1.0), ("x".to_string(), 3.0)].into_iter().collect();
        let t: Vec<TraceState> =
            vec![[("a".to_string(), true), ("b".to_string(), false)]
                .into_iter()
                .collect()];

        let mut mild = build_rulebook(&specs, &coeff_map(&[1.0, 0.8])).unwrap();
        mild.set_active(true);
        let mut harsh = build_rulebook(&specs, &coeff_map(&[0.5, 0.8])).unwrap();
        harsh.set_active(true);

        let mild_c = rulebook_reward(&mild, &t, &weights).unwrap().per_rule["x"].contribution;
        let harsh_c = rulebook_reward(&harsh, &t, &weights).unwrap().per_rule["x"].contribution;
        assert!(
            harsh_c.abs() < mild_c.abs(),
            "damping a level above must shrink the contribution: {harsh_c} vs {mild_c}"
        );
    }

    #[test]
    fn totals_never_exceed_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rb = standard_rulebook();
        for _ in 0..300 {
            rb.set_active(rng.gen());
            let states: Vec<(bool, bool, bool)> = (0..rng.gen_range(1..6))
                .map(|_| (rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let reward =
                rulebook_reward(&rb, &trace(&states), &standard_weights(rng.gen_range(0.0..20.0)))
                    .unwrap();
            assert!(reward.total <= 0.0);
        }
    }

    #[test]
    fn five_rule_three_level_hierarchy_works() {
        // A richer hierarchy than the shipped one: two merged mid-priority
        // rules and two low-priority comfort rules.
        let specs = [
            spec("no_collision", "G nc", 1, 10.0, false),
            spec("keep_lane", "G kl", 2, 1.0, true),
            spec("keep_road", "G kr", 2, 1.0, true),
            spec("signal", "G sig", 3, 0.5, false),
            spec("smooth", "G sm", 3, 0.2, true),
        ];
        let mut rb = build_rulebook(&specs, &coeff_map(&[1.0, 0.1, 0.5])).unwrap();
        rb.set_active(true);
        assert_eq!(cumulative_coefficient(&rb, "no_collision").unwrap(), 1.0);
        assert_eq!(cumulative_coefficient(&rb, "keep_road").unwrap(), 0.1);
        // Level 3: 1.0 · 0.1 · 0.5.
        assert!((cumulative_coefficient(&rb, "smooth").unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn config_round_trips_and_matches_builtin() {
        let config = standard_config();
        let text = toml::to_string_pretty(&config).unwrap();
        let reparsed: RulebookConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, reparsed);
        assert_eq!(reparsed.build().unwrap(), standard_rulebook());
    }

    #[test]
    fn config_version_is_enforced() {
        let mut config = standard_config();
        config.version = 99;
        assert!(matches!(
            config.build(),
            Err(RulebookError::UnsupportedVersion { found: 99, .. })
        ));
    }

    #[test]
    fn shipped_rulebook_file_matches_builtin() {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/rulebook.toml"
        );
        let text = std::fs::read_to_string(path)
            .unwrap_or_else(|e| panic!("shipped rulebook config missing at {path}: {e}"));
        let rb = rulebook_from_toml(&text).unwrap();
        assert_eq!(rb, standard_rulebook());
    }
}
