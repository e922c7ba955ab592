//! Scores, realized payoffs and the closed-form expected utilities.
//!
//! Functions here take parameters as given and do not validate; callers that
//! ingest external data go through [`GameParams::validate`] first.

use crate::model::{GameParams, PrepStrategy};

/// Which branch of the realized-payoff rule applies to a student.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    NoCopy,
    CopyUndetected,
    CopyDetectedSwapped,
}

/// Raw exam score: θ·g if prepared, θ·g·α otherwise.
pub fn raw_score(theta: f64, s: PrepStrategy, g: f64, alpha: f64) -> f64 {
    match s {
        PrepStrategy::Prepare => theta * g,
        PrepStrategy::NotPrepare => theta * g * alpha,
    }
}

/// Score of an undetected copier: the better of the two scripts.
pub fn copy_result(r_own: f64, r_other: f64) -> f64 {
    r_own.max(r_other)
}

/// Score of student `i` after a swap: β of the other script plus the
/// foreign-script completion `(1 − β)·θ_i·g·γ`.
pub fn swap_payoff(r_j: f64, theta_i: f64, params: &GameParams) -> f64 {
    params.beta * r_j + (1.0 - params.beta) * theta_i * params.g * params.gamma
}

/// Realized utility of student `i` under an outcome branch, net of `cost`.
pub fn realized_utility(outcome: Outcome, r_i: f64, r_j: f64, theta_i: f64, cost: f64, params: &GameParams) -> f64 {
    match outcome {
        Outcome::NoCopy => r_i - cost,
        Outcome::CopyUndetected => copy_result(r_i, r_j) - cost,
        Outcome::CopyDetectedSwapped => swap_payoff(r_j, theta_i, params) - cost,
    }
}

/// Expected score of B copying from a prepared A under traditional punishment:
/// `(1 − p0)·θ_A·g + p0·τ·θ_A·g`. With τ = 0 this is the zero-retention case.
pub fn eu_copier_traditional(params: &GameParams) -> f64 {
    let copied = params.theta_a * params.g;
    (1.0 - params.p0) * copied + params.p0 * params.tau * copied
}

/// Zero-retention traditional punishment, `(1 − p0)·θ_A·g`.
pub fn eu_copier_traditional_zero(params: &GameParams) -> f64 {
    (1.0 - params.p0) * params.theta_a * params.g
}

/// Expected score of B copying from a prepared A under the swap regime.
pub fn eu_copier_swap(params: &GameParams) -> f64 {
    let GameParams { theta_a, theta_b, g, beta, gamma, p, .. } = *params;
    (1.0 - p) * theta_a * g + p * (beta * theta_a * g + (1.0 - beta) * theta_b * g * gamma)
}

/// Expected utility of the prepared victim A when B copies, swap regime.
pub fn eu_victim_swap(params: &GameParams) -> f64 {
    let GameParams { theta_a, theta_b, g, alpha, beta, gamma, p, c, .. } = *params;
    (1.0 - p) * theta_a * g + p * (beta * theta_b * g * alpha + (1.0 - beta) * theta_a * g * gamma) - c / theta_a
}

/// Both students unprepared. Without a swap each keeps θ_i·g·α; after a swap
/// each gets `β·θ_j·g·α + (1 − β)·θ_i·g·γ`. Returns `(A, B)`.
pub fn eu_npnp(params: &GameParams, swapped: bool) -> (f64, f64) {
    let GameParams { theta_a, theta_b, g, alpha, beta, gamma, .. } = *params;
    if swapped {
        let for_player = |own: f64, other: f64| beta * other * g * alpha + (1.0 - beta) * own * g * gamma;
        (for_player(theta_a, theta_b), for_player(theta_b, theta_a))
    } else {
        (theta_a * g * alpha, theta_b * g * alpha)
    }
}

/// Scores under a two-part curriculum split.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoordinatedScores {
    /// Each student prepares one half alone: θ_i·g·(0.5 + 0.5·α).
    pub individual_a: f64,
    pub individual_b: f64,
    /// Successful mutual copying: max(θ_A, θ_B)·g.
    pub copied: f64,
    /// Swapped complementary scripts: 0.5·g·(θ_A + θ_B).
    pub swapped: f64,
}

pub fn coordinated_scores(params: &GameParams) -> CoordinatedScores {
    let GameParams { theta_a, theta_b, g, alpha, .. } = *params;
    CoordinatedScores {
        individual_a: theta_a * g * (0.5 + 0.5 * alpha),
        individual_b: theta_b * g * (0.5 + 0.5 * alpha),
        copied: theta_a.max(theta_b) * g,
        swapped: 0.5 * g * (theta_a + theta_b),
    }
}
