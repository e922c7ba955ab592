//! Equilibria of the preparation game, detection thresholds and the
//! closed-form conditions checked against the matrix model.
//!
//! The matrix is the ground truth for every equilibrium answer. Closed-form
//! thresholds and conditions are evaluated verbatim and reported next to the
//! matrix verdicts; disagreements become consistency notes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{GameError, Result};
use crate::matrix::{build_matrix, PayoffMatrix, Profile};
use crate::model::{BehaviorPolicy, Field, GameParams};
use crate::payoffs::{coordinated_scores, eu_copier_swap, eu_copier_traditional, CoordinatedScores};

/// Prefix of every note reporting a disagreement between a stated closed
/// form and the matrix model.
pub const INCONSISTENCY_PREFIX: &str = "PAPER-INCONSISTENCY:";

/// Denominators below this magnitude are treated as zero.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Number of grid points used to verify single crossing before bisection.
pub const THRESHOLD_GRID: usize = 1024;

/// Bisection tolerance on the detection probability.
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Largest admissible indifference residual (grade points) of a mixed equilibrium.
pub const MIXED_RESIDUAL_TOL: f64 = 1e-9;

/// Relative width, in units of `g`, of the band treated as a knife edge.
pub const KNIFE_EDGE_REL: f64 = 1e-9;

/// Pure profiles where neither student gains strictly by deviating.
/// Ties count as equilibrium. Returned in [`Profile::ALL`] order.
pub fn pure_nash(m: &PayoffMatrix) -> Vec<Profile> {
    Profile::ALL
        .iter()
        .copied()
        .filter(|&p| {
            let here = m.cell(p);
            let dev_a = m.cell(Profile::new(p.a.other(), p.b)).a;
            let dev_b = m.cell(Profile::new(p.a, p.b.other())).b;
            here.a >= dev_a && here.b >= dev_b
        })
        .collect()
}

/// Interior mixed equilibrium: probabilities with which each student prepares.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MixedEquilibrium {
    pub q_a: f64,
    pub q_b: f64,
}

/// Expected payoff of Prepare minus NotPrepare for each player at a mix.
/// Both are zero at a mixed equilibrium.
pub fn indifference_residuals(m: &PayoffMatrix, mix: &MixedEquilibrium) -> (f64, f64) {
    let c = |p: Profile| m.cell(p);
    let res_a =
        mix.q_b * (c(Profile::PP).a - c(Profile::NPP).a) + (1.0 - mix.q_b) * (c(Profile::PNP).a - c(Profile::NPNP).a);
    let res_b =
        mix.q_a * (c(Profile::PP).b - c(Profile::PNP).b) + (1.0 - mix.q_a) * (c(Profile::NPP).b - c(Profile::NPNP).b);
    (res_a, res_b)
}

/// Solves the two indifference equations. Returns `None` unless both
/// probabilities are strictly inside (0, 1) and the residuals vanish to
/// [`MIXED_RESIDUAL_TOL`].
pub fn mixed_nash_2x2(m: &PayoffMatrix) -> Option<MixedEquilibrium> {
    let c = |p: Profile| m.cell(p);
    // A's gain from preparing when B prepares / does not.
    let a_vs_p = c(Profile::PP).a - c(Profile::NPP).a;
    let a_vs_np = c(Profile::PNP).a - c(Profile::NPNP).a;
    let b_vs_p = c(Profile::PP).b - c(Profile::PNP).b;
    let b_vs_np = c(Profile::NPP).b - c(Profile::NPNP).b;

    let solve = |gain_vs_p: f64, gain_vs_np: f64| {
        let denom = gain_vs_np - gain_vs_p;
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        let q = gain_vs_np / denom;
        (q > 0.0 && q < 1.0).then_some(q)
    };

    let q_b = solve(a_vs_p, a_vs_np)?;
    let q_a = solve(b_vs_p, b_vs_np)?;
    let mix = MixedEquilibrium { q_a, q_b };
    let (ra, rb) = indifference_residuals(m, &mix);
    (ra.abs() <= MIXED_RESIDUAL_TOL && rb.abs() <= MIXED_RESIDUAL_TOL).then_some(mix)
}

/// Denominator factor `1 − βα − (1 − β)γ` of the closed-form uniqueness threshold.
fn eq15_factor(params: &GameParams) -> f64 {
    1.0 - params.beta * params.alpha - (1.0 - params.beta) * params.gamma
}

/// Loss factor `1 − β − (1 − β)γ` of a detected copier relative to undetected copying.
fn swap_loss_factor(params: &GameParams) -> f64 {
    1.0 - params.beta - (1.0 - params.beta) * params.gamma
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Eq15Threshold {
    pub value: f64,
    /// Whether the value lies in (0, 1); it is returned either way.
    pub in_unit_interval: bool,
}

/// Published uniqueness threshold
/// `[c/θ − θg(1 − α)] / [θg(1 − βα − (1 − β)γ)]`, evaluated as written.
pub fn threshold_p_eq15(params: &GameParams) -> Result<Eq15Threshold> {
    let theta = params.symmetric_theta()?;
    let factor = eq15_factor(params);
    if factor.abs() < SINGULAR_EPS {
        return Err(GameError::Singular { quantity: "p_bar_eq15", denominator: factor });
    }
    let tg = theta * params.g;
    let value = (params.c / theta - tg * (1.0 - params.alpha)) / (tg * factor);
    Ok(Eq15Threshold { value, in_unit_interval: value > 0.0 && value < 1.0 })
}

/// Unilateral-deviation threshold for (P,P): the `p` solving
/// `θg − c/θ = (1 − p)θg + p[β + (1 − β)γ]θg`, i.e. `c / (θ²g[1 − β − (1 − β)γ])`.
pub fn threshold_p_deviation(params: &GameParams) -> Result<f64> {
    let theta = params.symmetric_theta()?;
    let factor = swap_loss_factor(params);
    if factor <= SINGULAR_EPS {
        return Err(GameError::Singular { quantity: "p_bar_dev", denominator: factor });
    }
    Ok(params.c / (theta * theta * params.g * factor))
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NumericThresholds {
    /// Smallest `p` at which Prepare is a best response to Prepare for both students.
    pub p_pp_br: Option<f64>,
    /// Smallest `p` at which (P,P) is the only pure equilibrium.
    pub p_unique: Option<f64>,
    pub annotations: Vec<String>,
}

fn grid_point(k: usize) -> f64 {
    k as f64 / (THRESHOLD_GRID - 1) as f64
}

/// Bisects a predicate that is false at `lo` and true at `hi`; returns the
/// smallest point known to satisfy it.
fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, mut pred: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Worst (smallest) gain from staying with Prepare at (P,P) across both students.
fn pp_gap(params: &GameParams, behavior: &BehaviorPolicy, p: f64) -> Result<f64> {
    let m = build_matrix(&params.with(Field::P, p), behavior)?;
    let pp = m.cell(Profile::PP);
    let gap_a = pp.a - m.cell(Profile::NPP).a;
    let gap_b = pp.b - m.cell(Profile::PNP).b;
    Ok(gap_a.min(gap_b))
}

fn pp_unique(params: &GameParams, behavior: &BehaviorPolicy, p: f64) -> Result<bool> {
    let m = build_matrix(&params.with(Field::P, p), behavior)?;
    Ok(pure_nash(&m) == [Profile::PP])
}

/// Locates the detection thresholds by bisection on the matrix model, with
/// every parameter except `p` held fixed.
pub fn threshold_p_numeric(params: &GameParams, behavior: &BehaviorPolicy) -> Result<NumericThresholds> {
    let mut out = NumericThresholds::default();
    // Tighter than THRESHOLD_TOL so the reported point is well inside the tolerance.
    let tol = THRESHOLD_TOL * 1e-3;

    let br: Vec<bool> = (0..THRESHOLD_GRID)
        .map(|k| pp_gap(params, behavior, grid_point(k)).map(|gap| gap >= 0.0))
        .collect::<Result<_>>()?;
    let crossings = br.windows(2).filter(|w| w[0] != w[1]).count();
    if crossings > 1 {
        return Err(GameError::NonMonotone { crossings });
    }
    out.p_pp_br = match br.iter().position(|&b| b) {
        None => {
            out.annotations.push(String::from("Prepare is never a best response to Prepare for p in [0, 1]"));
            None
        }
        Some(0) => {
            if crossings == 1 {
                out.annotations.push(String::from("Prepare stops being a best response to Prepare as p rises"));
            }
            Some(0.0)
        }
        Some(k) => {
            Some(bisect(grid_point(k - 1), grid_point(k), tol, |p| pp_gap(params, behavior, p).map(|gap| gap >= 0.0))?)
        }
    };

    let unique: Vec<bool> =
        (0..THRESHOLD_GRID).map(|k| pp_unique(params, behavior, grid_point(k))).collect::<Result<_>>()?;
    out.p_unique = match unique.iter().position(|&u| u) {
        None => {
            out.annotations.push(String::from("(P,P) is never the unique pure equilibrium for p in [0, 1]"));
            None
        }
        Some(k) => {
            if let Some(lost) = unique[k..].iter().position(|&u| !u) {
                out.annotations.push(format!(
                    "(P,P) stops being the unique pure equilibrium again near p = {}",
                    grid_point(k + lost)
                ));
            }
            if k == 0 {
                Some(0.0)
            } else {
                Some(bisect(grid_point(k - 1), grid_point(k), tol, |p| pp_unique(params, behavior, p))?)
            }
        }
    };
    Ok(out)
}

/// Strict inequality verdict with both sides reported.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn greater(lhs: f64, rhs: f64) -> Self {
        Inequality { lhs, rhs, holds: lhs > rhs }
    }

    fn less(lhs: f64, rhs: f64) -> Self {
        Inequality { lhs, rhs, holds: lhs < rhs }
    }

    fn is_knife_edge(&self, scale: f64) -> bool {
        (self.lhs - self.rhs).abs() < KNIFE_EDGE_REL * scale
    }
}

/// Swap-versus-traditional deterrence condition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prop1Check {
    /// `p[1 − β − (1 − β)γ] > p0(1 − τ)`.
    pub condition: Inequality,
    /// `EU_copier(swap) < EU_copier(traditional)` from the payoff formulas.
    pub model: Inequality,
    pub model_agrees: bool,
}

pub fn check_prop1(params: &GameParams) -> Prop1Check {
    let condition = Inequality::greater(params.p * swap_loss_factor(params), params.p0 * (1.0 - params.tau));
    let model = Inequality::less(eu_copier_swap(params), eu_copier_traditional(params));
    Prop1Check { condition, model, model_agrees: condition.holds == model.holds }
}

/// Mutual non-preparation condition, evaluated per student with own ability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prop2Check {
    /// `θ_i g(1 − α) < c/θ_i + p θ_i g[1 − βα − (1 − β)γ]` for i = A, B.
    pub player_a: Inequality,
    pub player_b: Inequality,
    pub condition_holds: bool,
    /// (NP,NP) is a pure equilibrium of the default-behavior swap matrix.
    pub model_holds: bool,
    pub knife_edge: bool,
    /// `None` on knife edges, where the strict/weak distinction decides the verdict.
    pub model_agrees: Option<bool>,
}

pub fn check_prop2(params: &GameParams) -> Result<Prop2Check> {
    let side = |theta: f64| {
        let tg = theta * params.g;
        Inequality::less(tg * (1.0 - params.alpha), params.c / theta + params.p * tg * eq15_factor(params))
    };
    let player_a = side(params.theta_a);
    let player_b = side(params.theta_b);
    let condition_holds = player_a.holds && player_b.holds;
    let m = build_matrix(params, &BehaviorPolicy::default())?;
    let model_holds = pure_nash(&m).contains(&Profile::NPNP);
    let knife_edge = player_a.is_knife_edge(params.g) || player_b.is_knife_edge(params.g);
    Ok(Prop2Check {
        player_a,
        player_b,
        condition_holds,
        model_holds,
        knife_edge,
        model_agrees: (!knife_edge).then_some(condition_holds == model_holds),
    })
}

/// Coordinated partial preparation versus full individual preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prop3Check {
    /// `p·0.5g(θ_i + θ_j) + (1 − p)θ_max g > θ_i g − c/θ_i` for i = A.
    pub player_a: Inequality,
    pub player_b: Inequality,
    pub scores: CoordinatedScores,
}

pub fn check_prop3(params: &GameParams) -> Prop3Check {
    let scores = coordinated_scores(params);
    let side = |theta_i: f64, theta_j: f64| {
        let g = params.g;
        let lhs = params.p * 0.5 * g * (theta_i + theta_j) + (1.0 - params.p) * theta_i.max(theta_j) * g;
        Inequality::greater(lhs, theta_i * g - params.c / theta_i)
    };
    Prop3Check {
        player_a: side(params.theta_a, params.theta_b),
        player_b: side(params.theta_b, params.theta_a),
        scores,
    }
}

/// Published uniqueness claim `p > p̄` next to the matrix answer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Theorem1Check {
    /// `p > p_bar_eq15`; `None` when the threshold is undefined.
    pub condition_holds: Option<bool>,
    /// (P,P) is the only pure equilibrium of the matrix.
    pub model_unique_pp: bool,
    pub model_agrees: Option<bool>,
}

/// Equilibrium structure for asymmetric abilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum HeteroClass {
    MutualPrepUnique,
    SeparatingOnly,
    Coexisting,
    NoPrepUnique,
    Other,
}

impl HeteroClass {
    pub fn name(self) -> &'static str {
        match self {
            HeteroClass::MutualPrepUnique => "MutualPrepUnique",
            HeteroClass::SeparatingOnly => "SeparatingOnly",
            HeteroClass::Coexisting => "Coexisting",
            HeteroClass::NoPrepUnique => "NoPrepUnique",
            HeteroClass::Other => "Other",
        }
    }
}

/// Classifies a pure-equilibrium set. Universal indifference (all four
/// profiles) carries no structure and is `Other`.
pub fn classify_equilibria(ne: &[Profile]) -> HeteroClass {
    if ne == [Profile::PP] {
        return HeteroClass::MutualPrepUnique;
    }
    if ne == [Profile::NPNP] {
        return HeteroClass::NoPrepUnique;
    }
    if ne.is_empty() || ne.len() == Profile::ALL.len() {
        return HeteroClass::Other;
    }
    let separating = ne.iter().filter(|p| p.preparers() == 1).count();
    match (separating, ne.len() - separating) {
        (s, 0) if s > 0 => HeteroClass::SeparatingOnly,
        (s, pooling) if s > 0 && pooling > 0 => HeteroClass::Coexisting,
        _ => HeteroClass::Other,
    }
}

/// Classifies the default-behavior swap game. Abilities are ordered so that
/// θ_A ≥ θ_B before building the matrix.
pub fn classify_hetero(params: &GameParams) -> Result<HeteroClass> {
    let ordered = if params.theta_a >= params.theta_b { *params } else { params.swap_players() };
    let m = build_matrix(&ordered, &BehaviorPolicy::default())?;
    Ok(classify_equilibria(&pure_nash(&m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatioThresholds {
    /// Smallest ratio θ_A/θ_B at which the class leaves `MutualPrepUnique`.
    pub rho_lo: Option<f64>,
    /// Smallest ratio at which `SeparatingOnly` begins.
    pub rho_hi: Option<f64>,
}

/// Refinement tolerance of [`find_ratio_thresholds`].
pub const RATIO_TOL: f64 = 1e-6;

/// Scans ratios `θ_A/θ_B` from 1 up to `1/θ_B` (θ_A ≤ 1) on `grid_points`
/// evenly spaced values and refines each transition by bisection.
pub fn find_ratio_thresholds(params: &GameParams, theta_b_fixed: f64, grid_points: usize) -> Result<RatioThresholds> {
    let base = params.with(Field::ThetaB, theta_b_fixed).validate_limits()?;
    let max_ratio = 1.0 / theta_b_fixed;
    let mut out = RatioThresholds::default();
    if grid_points < 2 || max_ratio <= 1.0 {
        return Ok(out);
    }
    let ratio_at = |k: usize| 1.0 + (max_ratio - 1.0) * k as f64 / (grid_points - 1) as f64;
    let class_at = |r: f64| classify_hetero(&base.with(Field::ThetaA, (r * theta_b_fixed).min(1.0)));

    let classes: Vec<HeteroClass> = (0..grid_points).map(|k| class_at(ratio_at(k))).collect::<Result<_>>()?;

    if classes[0] == HeteroClass::MutualPrepUnique {
        if let Some(k) = classes.iter().position(|&c| c != HeteroClass::MutualPrepUnique) {
            out.rho_lo = Some(bisect(ratio_at(k - 1), ratio_at(k), RATIO_TOL, |r| {
                class_at(r).map(|c| c != HeteroClass::MutualPrepUnique)
            })?);
        }
    }
    if let Some(k) = classes.iter().position(|&c| c == HeteroClass::SeparatingOnly) {
        if k > 0 {
            out.rho_hi = Some(bisect(ratio_at(k - 1), ratio_at(k), RATIO_TOL, |r| {
                class_at(r).map(|c| c == HeteroClass::SeparatingOnly)
            })?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdReport {
    pub p_bar_eq15: Option<f64>,
    pub p_bar_eq15_in_unit_interval: Option<bool>,
    pub p_bar_deviation: Option<f64>,
    pub p_bar_numeric: Option<f64>,
    pub p_unique_numeric: Option<f64>,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropVerdicts {
    pub prop1: Prop1Check,
    pub prop2: Prop2Check,
    pub prop3: Prop3Check,
    pub theorem1: Theorem1Check,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumReport {
    pub pure_ne: Vec<Profile>,
    pub mixed_ne: Option<MixedEquilibrium>,
    pub thresholds: ThresholdReport,
    pub prop_verdicts: PropVerdicts,
    pub hetero_class: HeteroClass,
    pub consistency_notes: Vec<String>,
}

/// Thresholds computed three ways. Errors from individual routes are
/// recorded as annotations.
pub fn thresholds(params: &GameParams, behavior: &BehaviorPolicy) -> ThresholdReport {
    let mut out = ThresholdReport::default();
    match threshold_p_eq15(params) {
        Ok(t) => {
            out.p_bar_eq15 = Some(t.value);
            out.p_bar_eq15_in_unit_interval = Some(t.in_unit_interval);
            if !t.in_unit_interval {
                out.annotations.push(format!("p_bar_eq15 = {} lies outside (0, 1)", t.value));
            }
        }
        Err(e) => out.annotations.push(format!("p_bar_eq15: {}", e)),
    }
    match threshold_p_deviation(params) {
        Ok(v) => out.p_bar_deviation = Some(v),
        Err(e) => out.annotations.push(format!("p_bar_dev: {}", e)),
    }
    match threshold_p_numeric(params, behavior) {
        Ok(n) => {
            out.p_bar_numeric = n.p_pp_br;
            out.p_unique_numeric = n.p_unique;
            out.annotations.extend(n.annotations);
        }
        Err(e) => out.annotations.push(format!("p_bar_numeric: {}", e)),
    }
    out
}

/// Full analysis of one parameter set. Equilibria come from the matrix only.
pub fn solve(params: &GameParams, behavior: &BehaviorPolicy) -> Result<EquilibriumReport> {
    let params = params.validate_limits()?;
    let m = build_matrix(&params, behavior)?;
    let pure_ne = pure_nash(&m);
    let mixed_ne = mixed_nash_2x2(&m);
    let thresholds = thresholds(&params, behavior);
    let hetero_class = classify_hetero(&params)?;

    let prop1 = check_prop1(&params);
    let prop2 = check_prop2(&params)?;
    let prop3 = check_prop3(&params);
    let model_unique_pp = pure_ne == [Profile::PP];
    let condition_holds = thresholds.p_bar_eq15.map(|t| params.p > t);
    let theorem1 =
        Theorem1Check { condition_holds, model_unique_pp, model_agrees: condition_holds.map(|c| c == model_unique_pp) };

    let mut notes = Vec::new();
    if let (Some(eq15), Some(dev)) = (thresholds.p_bar_eq15, thresholds.p_bar_deviation) {
        if (eq15 - dev).abs() > THRESHOLD_TOL {
            notes.push(format!(
                "{} closed-form uniqueness threshold p_bar_eq15 = {} differs from the (P,P) deviation threshold p_bar_dev = {}",
                INCONSISTENCY_PREFIX, eq15, dev
            ));
        }
    }
    if theorem1.model_agrees == Some(false) {
        notes.push(format!(
            "{} p > p_bar_eq15 is {} but (P,P) being the unique pure equilibrium of the matrix is {}",
            INCONSISTENCY_PREFIX,
            condition_holds.unwrap_or(false),
            model_unique_pp
        ));
    }
    if !prop1.model_agrees {
        notes.push(format!(
            "{} deterrence condition verdict {} disagrees with direct copier payoff comparison {}",
            INCONSISTENCY_PREFIX, prop1.condition.holds, prop1.model.holds
        ));
    }
    if prop2.model_agrees == Some(false) {
        notes.push(format!(
            "{} mutual non-preparation condition verdict {} disagrees with (NP,NP) equilibrium membership {}",
            INCONSISTENCY_PREFIX, prop2.condition_holds, prop2.model_holds
        ));
    }

    Ok(EquilibriumReport {
        pure_ne,
        mixed_ne,
        thresholds,
        prop_verdicts: PropVerdicts { prop1, prop2, prop3, theorem1 },
        hetero_class,
        consistency_notes: notes,
    })
}
