//! Parameters and strategy types of the exam game.
//!
//! [`GameParams`] carries every scalar of the model. Two validation levels
//! exist: [`GameParams::validate`] enforces the open intervals used for
//! ingestion, while [`GameParams::validate_limits`] admits the closure of
//! those intervals so limiting cases (p = 0, β = 1, c = 0, ...) can still be
//! evaluated by the solvers.

use core::fmt;

use crate::error::{GameError, Result};

/// All model scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(deny_unknown_fields))]
pub struct GameParams {
    /// Ability of student A, in (0, 1].
    pub theta_a: f64,
    /// Ability of student B, in (0, 1].
    pub theta_b: f64,
    /// Maximum grade (grade points), > 0.
    pub g: f64,
    /// Fraction of the exam answerable without preparation, in (0, 1).
    pub alpha: f64,
    /// Fraction of the exam completed before a swap, in (0, 1).
    pub beta: f64,
    /// Difficulty factor for completing a foreign script, in (0, 1).
    pub gamma: f64,
    /// Detection probability under the swap regime, in (0, 1).
    pub p: f64,
    /// Detection probability under the traditional regime, in (0, 1).
    pub p0: f64,
    /// Share of the copied score a caught copier keeps under traditional punishment, in [0, 1).
    pub tau: f64,
    /// Base effort cost (grade points), > 0.
    pub c: f64,
    /// Welfare weight on the institutional objective, >= 0.
    #[cfg_attr(feature = "serde", serde(default))]
    pub lambda: f64,
}

/// Names of the [`GameParams`] fields, used for sweeps and error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    ThetaA,
    ThetaB,
    G,
    Alpha,
    Beta,
    Gamma,
    P,
    P0,
    Tau,
    C,
    Lambda,
}

impl Field {
    pub const ALL: [Field; 11] = [
        Field::ThetaA,
        Field::ThetaB,
        Field::G,
        Field::Alpha,
        Field::Beta,
        Field::Gamma,
        Field::P,
        Field::P0,
        Field::Tau,
        Field::C,
        Field::Lambda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::ThetaA => "theta_a",
            Field::ThetaB => "theta_b",
            Field::G => "g",
            Field::Alpha => "alpha",
            Field::Beta => "beta",
            Field::Gamma => "gamma",
            Field::P => "p",
            Field::P0 => "p0",
            Field::Tau => "tau",
            Field::C => "c",
            Field::Lambda => "lambda",
        }
    }

    pub fn from_name(name: &str) -> Option<Field> {
        Field::ALL.iter().copied().find(|f| f.name() == name)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy)]
enum Interval {
    /// (0, 1]
    AbilityOpenLow,
    /// (0, 1)
    Open01,
    /// [0, 1)
    HalfOpen01,
    /// (0, inf)
    Positive,
    /// [0, inf)
    NonNegative,
}

impl Interval {
    fn strict(self, v: f64) -> bool {
        match self {
            Interval::AbilityOpenLow => v > 0.0 && v <= 1.0,
            Interval::Open01 => v > 0.0 && v < 1.0,
            Interval::HalfOpen01 => (0.0..1.0).contains(&v),
            Interval::Positive => v > 0.0 && v.is_finite(),
            Interval::NonNegative => v >= 0.0 && v.is_finite(),
        }
    }

    fn closure(self, v: f64) -> bool {
        match self {
            // effort cost c/θ must stay finite, so θ = 0 is never admitted
            Interval::AbilityOpenLow => v > 0.0 && v <= 1.0,
            Interval::Open01 | Interval::HalfOpen01 => (0.0..=1.0).contains(&v),
            Interval::Positive => v > 0.0 && v.is_finite(),
            Interval::NonNegative => v >= 0.0 && v.is_finite(),
        }
    }

    fn describe(self, strict: bool) -> &'static str {
        match (self, strict) {
            (Interval::AbilityOpenLow, _) => "(0, 1]",
            (Interval::Open01, true) => "(0, 1)",
            (Interval::HalfOpen01, true) => "[0, 1)",
            (Interval::Open01 | Interval::HalfOpen01, false) => "[0, 1]",
            (Interval::Positive, true) => "(0, inf)",
            (Interval::Positive, false) | (Interval::NonNegative, _) => "[0, inf)",
        }
    }
}

impl GameParams {
    /// Returns the value of one field.
    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::ThetaA => self.theta_a,
            Field::ThetaB => self.theta_b,
            Field::G => self.g,
            Field::Alpha => self.alpha,
            Field::Beta => self.beta,
            Field::Gamma => self.gamma,
            Field::P => self.p,
            Field::P0 => self.p0,
            Field::Tau => self.tau,
            Field::C => self.c,
            Field::Lambda => self.lambda,
        }
    }

    /// Returns a copy with one field replaced. No validation is performed.
    pub fn with(mut self, field: Field, value: f64) -> Self {
        let slot = match field {
            Field::ThetaA => &mut self.theta_a,
            Field::ThetaB => &mut self.theta_b,
            Field::G => &mut self.g,
            Field::Alpha => &mut self.alpha,
            Field::Beta => &mut self.beta,
            Field::Gamma => &mut self.gamma,
            Field::P => &mut self.p,
            Field::P0 => &mut self.p0,
            Field::Tau => &mut self.tau,
            Field::C => &mut self.c,
            Field::Lambda => &mut self.lambda,
        };
        *slot = value;
        self
    }

    /// Copy with the two players' abilities exchanged.
    pub fn swap_players(self) -> Self {
        GameParams { theta_a: self.theta_b, theta_b: self.theta_a, ..self }
    }

    pub fn is_symmetric(&self) -> bool {
        self.theta_a == self.theta_b
    }

    /// The common ability when θ_A = θ_B.
    pub fn symmetric_theta(&self) -> Result<f64> {
        if self.is_symmetric() {
            Ok(self.theta_a)
        } else {
            Err(GameError::Asymmetry { theta_a: self.theta_a, theta_b: self.theta_b })
        }
    }

    fn interval(field: Field) -> Interval {
        match field {
            Field::ThetaA | Field::ThetaB => Interval::AbilityOpenLow,
            Field::Alpha | Field::Beta | Field::Gamma | Field::P | Field::P0 => Interval::Open01,
            Field::Tau => Interval::HalfOpen01,
            Field::G | Field::C => Interval::Positive,
            Field::Lambda => Interval::NonNegative,
        }
    }

    /// Checks every field against its open interval and returns the params unchanged.
    pub fn validate(self) -> Result<Self> {
        self.check(true)
    }

    /// Like [`validate`](Self::validate) but admits interval end points
    /// (θ > 0 is still required). `g` must stay strictly positive; `c` may be 0.
    pub fn validate_limits(self) -> Result<Self> {
        self.check(false)
    }

    fn check(self, strict: bool) -> Result<Self> {
        for field in Field::ALL {
            let value = self.get(field);
            let mut interval = Self::interval(field);
            if !strict && field == Field::C {
                interval = Interval::NonNegative;
            }
            let ok = if strict { interval.strict(value) } else { interval.closure(value) };
            if !ok {
                return Err(GameError::Domain { field, value, bound: interval.describe(strict) });
            }
        }
        Ok(self)
    }
}

/// Preparation choice. `Prepare` sorts before `NotPrepare`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PrepStrategy {
    Prepare,
    NotPrepare,
}

impl PrepStrategy {
    pub const BOTH: [PrepStrategy; 2] = [PrepStrategy::Prepare, PrepStrategy::NotPrepare];

    pub fn other(self) -> Self {
        match self {
            PrepStrategy::Prepare => PrepStrategy::NotPrepare,
            PrepStrategy::NotPrepare => PrepStrategy::Prepare,
        }
    }

    pub fn is_prepared(self) -> bool {
        self == PrepStrategy::Prepare
    }

    pub fn label(self) -> &'static str {
        match self {
            PrepStrategy::Prepare => "P",
            PrepStrategy::NotPrepare => "NP",
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            PrepStrategy::Prepare => 0,
            PrepStrategy::NotPrepare => 1,
        }
    }
}

/// When a student attempts to copy during the exam.
///
/// The default reproduces the base rule: an unprepared student copies from a
/// prepared one, prepared students never copy, and two unprepared students do
/// not bother copying from each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct BehaviorPolicy {
    pub copy_if_other_prepared: bool,
    pub prepared_copies: bool,
    pub copy_in_npnp: bool,
}

impl Default for BehaviorPolicy {
    fn default() -> Self {
        BehaviorPolicy { copy_if_other_prepared: true, prepared_copies: false, copy_in_npnp: false }
    }
}

impl BehaviorPolicy {
    /// Whether a student with preparation `own` copies from one with `other`.
    pub fn attempts_copy(&self, own: PrepStrategy, other: PrepStrategy) -> bool {
        match (own, other) {
            (PrepStrategy::Prepare, _) => self.prepared_copies,
            (PrepStrategy::NotPrepare, PrepStrategy::Prepare) => self.copy_if_other_prepared,
            (PrepStrategy::NotPrepare, PrepStrategy::NotPrepare) => self.copy_in_npnp,
        }
    }
}

/// One of the two students.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Player {
    A,
    B,
}

impl Player {
    pub fn label(self) -> &'static str {
        match self {
            Player::A => "A",
            Player::B => "B",
        }
    }
}

/// Punishment regime applied when copying is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Regime {
    /// Scripts are exchanged; detection probability `p`.
    Swap,
    /// The copier alone is punished, keeping `tau` of the copied score; detection probability `p0`.
    Traditional,
}

impl Regime {
    pub const BOTH: [Regime; 2] = [Regime::Swap, Regime::Traditional];

    pub fn detection_probability(self, params: &GameParams) -> f64 {
        match self {
            Regime::Swap => params.p,
            Regime::Traditional => params.p0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Swap => "swap",
            Regime::Traditional => "traditional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategyProfile {
    pub s_a: PrepStrategy,
    pub s_b: PrepStrategy,
    pub behavior: BehaviorPolicy,
}

impl StrategyProfile {
    pub fn new(s_a: PrepStrategy, s_b: PrepStrategy) -> Self {
        StrategyProfile { s_a, s_b, behavior: BehaviorPolicy::default() }
    }
}

/// Preparation effort cost `c / theta`.
pub fn effort_cost(theta: f64, c: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(GameError::Domain { field: Field::ThetaA, value: theta, bound: "(0, 1]" });
    }
    Ok(c / theta)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::GameParams;

    /// Symmetric mid-range parameters shared by many unit tests.
    pub fn base() -> GameParams {
        GameParams {
            theta_a: 1.0,
            theta_b: 1.0,
            g: 100.0,
            alpha: 0.4,
            beta: 0.5,
            gamma: 0.6,
            p: 0.5,
            p0: 0.5,
            tau: 0.5,
            c: 10.0,
            lambda: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fixtures::base;

    #[test]
    fn mid_range_params_pass_through() {
        let p = base();
        assert_eq!(p.validate(), Ok(p));
    }

    #[test]
    fn zero_ability_is_rejected() {
        let err = base().with(Field::ThetaA, 0.0).validate().unwrap_err();
        assert!(matches!(err, GameError::Domain { field: Field::ThetaA, .. }));
        let err = base().with(Field::ThetaA, 0.0).validate_limits().unwrap_err();
        assert!(matches!(err, GameError::Domain { field: Field::ThetaA, .. }));
    }

    #[test]
    fn open_interval_boundaries_are_rejected() {
        let err = base().with(Field::P, 1.0).validate().unwrap_err();
        assert!(matches!(err, GameError::Domain { field: Field::P, .. }));
        assert!(base().with(Field::Beta, 0.0).validate().is_err());
        assert!(base().with(Field::Tau, 1.0).validate().is_err());
        assert!(base().with(Field::Tau, 0.0).validate().is_ok());
        assert!(base().with(Field::C, 0.0).validate().is_err());
        assert!(base().with(Field::Lambda, -1.0).validate().is_err());
        assert!(base().with(Field::G, f64::NAN).validate().is_err());
        assert!(base().with(Field::Alpha, f64::NAN).validate_limits().is_err());
    }

    #[test]
    fn limits_admit_closed_endpoints() {
        assert!(base().with(Field::P, 1.0).validate_limits().is_ok());
        assert!(base().with(Field::P, 0.0).validate_limits().is_ok());
        assert!(base().with(Field::C, 0.0).validate_limits().is_ok());
        assert!(base().with(Field::Gamma, 1.0).validate_limits().is_ok());
        assert!(base().with(Field::Gamma, 1.5).validate_limits().is_err());
        assert!(base().with(Field::G, 0.0).validate_limits().is_err());
    }

    #[test]
    fn domain_error_names_field() {
        let msg = alloc::format!("{}", base().with(Field::P, 1.0).validate().unwrap_err());
        assert!(msg.contains("p = 1"), "{msg}");
    }

    #[test]
    fn effort_cost_examples() {
        assert_eq!(effort_cost(1.0, 2.0), Ok(2.0));
        assert_eq!(effort_cost(0.5, 2.0), Ok(4.0));
        assert_eq!(effort_cost(0.25, 1.0), Ok(4.0));
        assert!(effort_cost(0.0, 1.0).is_err());
        assert!(effort_cost(-0.1, 1.0).is_err());
    }

    #[test]
    fn field_names_round_trip() {
        for f in Field::ALL {
            assert_eq!(Field::from_name(f.name()), Some(f));
            assert_eq!(base().with(f, 0.25).get(f), 0.25);
        }
        assert_eq!(Field::from_name("delta"), None);
    }

    #[test]
    fn default_behavior_is_base_rule() {
        use PrepStrategy::*;
        let b = BehaviorPolicy::default();
        assert!(b.attempts_copy(NotPrepare, Prepare));
        assert!(!b.attempts_copy(Prepare, NotPrepare));
        assert!(!b.attempts_copy(Prepare, Prepare));
        assert!(!b.attempts_copy(NotPrepare, NotPrepare));
        assert!(Prepare < NotPrepare);
    }
}
