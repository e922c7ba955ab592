//! Seeded Monte Carlo simulation of the exam timeline.
//!
//! Each trial realizes one exam: abilities are given, the profile fixes
//! preparation, the behaviour rule decides who copies, a single detection
//! event is drawn if anyone copied, and payoffs follow the realized branch.
//! The simulator never touches the closed-form expected utilities, so it can
//! serve as an independent check on them.
//!
//! Randomness comes from [`CounterRng`]: the draw for trial `t` is a pure
//! function of `(seed, t)`, so trials can be evaluated in any order or in
//! parallel. Trials are grouped into fixed chunks of [`TRIAL_CHUNK`]; chunk
//! moments are merged strictly in chunk order, which makes the statistics
//! bit-identical however the chunks were scheduled.

use alloc::vec::Vec;

use crate::error::{GameError, Result};
use crate::matrix::{build_matrix_in, Profile};
use crate::model::{BehaviorPolicy, GameParams, Player, Regime, StrategyProfile};
use crate::payoffs::{raw_score, realized_utility, Outcome};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_MUL: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 output function.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: `word(counter, stream)` is the SplitMix64
/// finalizer applied to the keyed counter, then re-mixed with the stream id.
/// Not suitable for cryptographic use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { key: mix64(seed ^ GOLDEN) }
    }

    pub fn word(&self, counter: u64, stream: u64) -> u64 {
        mix64(mix64(self.key ^ counter.wrapping_mul(GOLDEN)) ^ stream.wrapping_mul(STREAM_MUL))
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn unit(&self, counter: u64, stream: u64) -> f64 {
        (self.word(counter, stream) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Trials per chunk. Fixed so that chunk boundaries never depend on the thread count.
pub const TRIAL_CHUNK: u64 = 4096;

/// Differences below this fraction of `max(1, |closed form|)` are treated
/// as floating-point round-off when scoring agreement.
pub const ROUNDOFF_FLOOR_REL: f64 = 1e-9;

/// Audit rows with `|z|` above this are flagged.
pub const AUDIT_FLAG_Z: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: GameParams,
    pub profile: StrategyProfile,
    pub regime: Regime,
    pub n: u64,
    pub seed: u64,
}

/// Running mean and sum of squared deviations (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean; infinite with fewer than two samples.
    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let var = (self.m2 / (self.count - 1) as f64).max(0.0);
        libm::sqrt(var / self.count as f64)
    }
}

/// Per-player moments of one chunk (or of a merged run).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimAccumulator {
    pub a: Moments,
    pub b: Moments,
}

impl SimAccumulator {
    pub fn merge(&mut self, other: &SimAccumulator) {
        self.a.merge(&other.a);
        self.b.merge(&other.b);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimStats {
    pub mean_a: f64,
    pub mean_b: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub n: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn check(&self) -> Result<()> {
        self.params.validate_limits()?;
        if self.n == 0 {
            return Err(GameError::Spec(alloc::string::String::from("sample count n must be >= 1")));
        }
        Ok(())
    }
}

/// Realized payoffs `(A, B)` of one exam.
pub fn trial_payoffs(cfg: &SimConfig, rng: &CounterRng, trial: u64) -> (f64, f64) {
    let params = &cfg.params;
    let StrategyProfile { s_a, s_b, behavior } = cfg.profile;
    let r_a = raw_score(params.theta_a, s_a, params.g, params.alpha);
    let r_b = raw_score(params.theta_b, s_b, params.g, params.alpha);
    let cost_a = if s_a.is_prepared() { params.c / params.theta_a } else { 0.0 };
    let cost_b = if s_b.is_prepared() { params.c / params.theta_b } else { 0.0 };
    let copy_a = behavior.attempts_copy(s_a, s_b);
    let copy_b = behavior.attempts_copy(s_b, s_a);

    if !copy_a && !copy_b {
        return (r_a - cost_a, r_b - cost_b);
    }

    let detected = rng.unit(trial, 0) < cfg.regime.detection_probability(params);
    let realize = |copies: bool, r_own: f64, r_other: f64, theta_own: f64, cost: f64, source_prepared: bool| {
        match (detected, cfg.regime) {
            (false, _) => {
                // an unprepared script has nothing worth copying
                let outcome = if copies && source_prepared { Outcome::CopyUndetected } else { Outcome::NoCopy };
                realized_utility(outcome, r_own, r_other, theta_own, cost, params)
            }
            (true, Regime::Swap) => {
                realized_utility(Outcome::CopyDetectedSwapped, r_own, r_other, theta_own, cost, params)
            }
            (true, Regime::Traditional) if copies => params.tau * r_other - cost,
            (true, Regime::Traditional) => realized_utility(Outcome::NoCopy, r_own, r_other, theta_own, cost, params),
        }
    };
    (
        realize(copy_a, r_a, r_b, params.theta_a, cost_a, s_b.is_prepared()),
        realize(copy_b, r_b, r_a, params.theta_b, cost_b, s_a.is_prepared()),
    )
}

/// Number of chunks covering `n` trials.
pub fn chunk_count(n: u64) -> u64 {
    n.div_ceil(TRIAL_CHUNK)
}

/// Moments of the trials in chunk `index`.
pub fn simulate_chunk(cfg: &SimConfig, index: u64) -> SimAccumulator {
    let rng = CounterRng::new(cfg.seed);
    let start = index * TRIAL_CHUNK;
    let end = (start + TRIAL_CHUNK).min(cfg.n);
    let mut acc = SimAccumulator::default();
    for trial in start..end {
        let (a, b) = trial_payoffs(cfg, &rng, trial);
        acc.a.push(a);
        acc.b.push(b);
    }
    acc
}

/// Folds chunk accumulators, given in chunk order, into statistics.
pub fn finish<'a, I>(cfg: &SimConfig, chunks: I) -> SimStats
where
    I: IntoIterator<Item = &'a SimAccumulator>,
{
    let mut total = SimAccumulator::default();
    for chunk in chunks {
        total.merge(chunk);
    }
    SimStats {
        mean_a: total.a.mean(),
        mean_b: total.b.mean(),
        se_a: total.a.standard_error(),
        se_b: total.b.standard_error(),
        n: total.a.count(),
        seed: cfg.seed,
    }
}

pub fn simulate(cfg: &SimConfig) -> Result<SimStats> {
    cfg.check()?;
    let chunks: Vec<SimAccumulator> = (0..chunk_count(cfg.n)).map(|k| simulate_chunk(cfg, k)).collect();
    Ok(finish(cfg, &chunks))
}

/// z-score of a Monte Carlo mean against a closed form. Differences within
/// the round-off floor score 0; otherwise a zero standard error gives ±∞.
pub fn z_score(closed_form: f64, mc_mean: f64, se: f64) -> f64 {
    let diff = mc_mean - closed_form;
    if diff.abs() <= ROUNDOFF_FLOOR_REL * closed_form.abs().max(1.0) {
        0.0
    } else {
        diff / se
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditRow {
    pub profile: Profile,
    pub regime: Regime,
    pub player: Player,
    pub closed_form: f64,
    pub mc_mean: f64,
    pub se: f64,
    pub z: f64,
    pub flagged: bool,
}

/// The `(profile, regime)` pairs of an audit, in output order.
pub fn audit_cells() -> impl Iterator<Item = (Profile, Regime)> {
    Profile::ALL.into_iter().flat_map(|p| Regime::BOTH.into_iter().map(move |r| (p, r)))
}

/// Simulation config for one audit cell. Every cell uses the same seed.
pub fn audit_config(
    params: &GameParams,
    behavior: &BehaviorPolicy,
    profile: Profile,
    regime: Regime,
    n: u64,
    seed: u64,
) -> SimConfig {
    SimConfig {
        params: *params,
        profile: StrategyProfile { s_a: profile.a, s_b: profile.b, behavior: *behavior },
        regime,
        n,
        seed,
    }
}

/// Audit rows for both players of one cell, given the cell's statistics.
pub fn audit_rows(
    params: &GameParams,
    behavior: &BehaviorPolicy,
    profile: Profile,
    regime: Regime,
    stats: &SimStats,
) -> Result<[AuditRow; 2]> {
    let cell = build_matrix_in(params, behavior, regime)?.cell(profile);
    let row = |player, closed_form: f64, mc_mean: f64, se: f64| {
        let z = z_score(closed_form, mc_mean, se);
        AuditRow { profile, regime, player, closed_form, mc_mean, se, z, flagged: !(z.abs() <= AUDIT_FLAG_Z) }
    };
    Ok([row(Player::A, cell.a, stats.mean_a, stats.se_a), row(Player::B, cell.b, stats.mean_b, stats.se_b)])
}

/// Simulates all four profiles under both regimes and compares each
/// player's mean against the matrix cell.
pub fn simulate_cell_audit(params: &GameParams, behavior: &BehaviorPolicy, n: u64, seed: u64) -> Result<Vec<AuditRow>> {
    let mut rows = Vec::with_capacity(16);
    for (profile, regime) in audit_cells() {
        let stats = simulate(&audit_config(params, behavior, profile, regime, n, seed))?;
        rows.extend(audit_rows(params, behavior, profile, regime, &stats)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_matrix;
    use crate::model::fixtures::base;
    use crate::model::{Field, PrepStrategy};
    use crate::payoffs::{eu_copier_swap, eu_victim_swap};

    fn config(params: GameParams, profile: Profile, regime: Regime, n: u64, seed: u64) -> SimConfig {
        audit_config(&params, &BehaviorPolicy::default(), profile, regime, n, seed)
    }

    #[test]
    fn rng_is_counter_addressed() {
        let rng = CounterRng::new(7);
        assert_eq!(rng.word(3, 0), CounterRng::new(7).word(3, 0));
        assert_ne!(rng.word(3, 0), rng.word(4, 0));
        assert_ne!(rng.word(3, 0), rng.word(3, 1));
        assert_ne!(rng.word(3, 0), CounterRng::new(8).word(3, 0));
        let mean = (0..100_000).map(|t| rng.unit(t, 0)).sum::<f64>() / 100_000.0;
        assert!((mean - 0.5).abs() < 0.005);
        assert!((0..10_000).all(|t| (0.0..1.0).contains(&rng.unit(t, 0))));
    }

    #[test]
    fn prepared_pair_has_zero_variance() {
        let p = base().with(Field::ThetaB, 0.8);
        let s = simulate(&config(p, Profile::PP, Regime::Swap, 1000, 99)).unwrap();
        assert_eq!(s.mean_a, 100.0 - 10.0);
        assert_eq!(s.mean_b, 80.0 - 10.0 / 0.8);
        assert_eq!(s.se_a, 0.0);
        assert_eq!(s.se_b, 0.0);
    }

    #[test]
    fn certain_detection_has_zero_variance() {
        let p = base().with(Field::ThetaB, 0.5).with(Field::P, 1.0);
        let s = simulate(&config(p, Profile::PNP, Regime::Swap, 1000, 3)).unwrap();
        assert_eq!(s.se_a, 0.0);
        assert_eq!(s.se_b, 0.0);
        assert!((s.mean_a - eu_victim_swap(&p)).abs() < 1e-12);
        assert!((s.mean_b - eu_copier_swap(&p)).abs() < 1e-12);
        assert!((s.mean_a - 30.0).abs() < 1e-12 && (s.mean_b - 65.0).abs() < 1e-12);
    }

    #[test]
    fn mean_matches_matrix_cell_at_large_n() {
        let p = base();
        let cell = build_matrix(&p, &BehaviorPolicy::default()).unwrap().cell(Profile::PNP);
        let s = simulate(&config(p, Profile::PNP, Regime::Swap, 1_000_000, 11)).unwrap();
        assert!((s.mean_a - cell.a).abs() <= 3.0 * s.se_a, "{} vs {}", s.mean_a, cell.a);
        assert!((s.mean_b - cell.b).abs() <= 3.0 * s.se_b, "{} vs {}", s.mean_b, cell.b);
        assert_eq!(s.n, 1_000_000);
    }

    #[test]
    fn chunk_merge_matches_single_pass() {
        let cfg = config(base(), Profile::NPP, Regime::Traditional, 3 * TRIAL_CHUNK + 17, 5);
        let rng = CounterRng::new(cfg.seed);
        let mut single = Moments::default();
        for t in 0..cfg.n {
            single.push(trial_payoffs(&cfg, &rng, t).1);
        }
        let s = simulate(&cfg).unwrap();
        assert!((s.mean_b - single.mean()).abs() < 1e-12);
        assert!((s.se_b - single.standard_error()).abs() < 1e-12);
    }

    #[test]
    fn simulate_is_deterministic() {
        let cfg = config(base(), Profile::PNP, Regime::Swap, 50_000, 42);
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let other = SimConfig { seed: 43, ..cfg };
        assert_ne!(simulate(&cfg).unwrap(), simulate(&other).unwrap());
    }

    #[test]
    fn reversed_chunk_evaluation_is_bit_identical() {
        let cfg = config(base(), Profile::PNP, Regime::Swap, 20 * TRIAL_CHUNK + 5, 1);
        let mut chunks: Vec<(u64, SimAccumulator)> =
            (0..chunk_count(cfg.n)).rev().map(|k| (k, simulate_chunk(&cfg, k))).collect();
        chunks.sort_by_key(|(k, _)| *k);
        let accs: Vec<SimAccumulator> = chunks.into_iter().map(|(_, a)| a).collect();
        assert_eq!(finish(&cfg, &accs), simulate(&cfg).unwrap());
    }

    #[test]
    fn single_sample_reports_infinite_error() {
        let s = simulate(&config(base(), Profile::PNP, Regime::Swap, 1, 0)).unwrap();
        assert_eq!(s.n, 1);
        assert!(s.se_a.is_infinite());
        let rows = simulate_cell_audit(&base(), &BehaviorPolicy::default(), 1, 0).unwrap();
        assert_eq!(rows.len(), 16);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(simulate(&config(base(), Profile::PP, Regime::Swap, 0, 0)).is_err());
        let bad = base().with(Field::ThetaA, 0.0);
        assert!(simulate(&config(bad, Profile::PP, Regime::Swap, 10, 0)).is_err());
    }

    #[test]
    fn audit_of_example_parameters_is_clean() {
        let rows = simulate_cell_audit(&base(), &BehaviorPolicy::default(), 100_000, 2024).unwrap();
        assert_eq!(rows.len(), 16);
        for r in &rows {
            assert!(!r.flagged, "{r:?}");
        }
        let again = simulate_cell_audit(&base(), &BehaviorPolicy::default(), 100_000, 2024).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn traditional_victim_is_untouched() {
        let p = base().with(Field::P0, 0.9);
        let s = simulate(&config(p, Profile::PNP, Regime::Traditional, 10_000, 8)).unwrap();
        assert_eq!(s.mean_a, 90.0);
        assert_eq!(s.se_a, 0.0);
    }

    #[test]
    fn copy_in_npnp_draws_detection() {
        let behavior = BehaviorPolicy { copy_in_npnp: true, ..Default::default() };
        let p = base().with(Field::ThetaB, 0.8);
        let cfg = SimConfig {
            params: p,
            profile: StrategyProfile { s_a: PrepStrategy::NotPrepare, s_b: PrepStrategy::NotPrepare, behavior },
            regime: Regime::Swap,
            n: 200_000,
            seed: 77,
        };
        let s = simulate(&cfg).unwrap();
        let cell = build_matrix(&p, &behavior).unwrap().cell(Profile::NPNP);
        assert!(s.se_a > 0.0);
        assert!((s.mean_a - cell.a).abs() <= 3.0 * s.se_a);
        assert!((s.mean_b - cell.b).abs() <= 3.0 * s.se_b);
    }

    #[test]
    fn z_score_round_off_floor() {
        assert_eq!(z_score(90.0, 90.0 + 1e-13, 0.0), 0.0);
        assert!(z_score(90.0, 91.0, 0.0).is_infinite());
        assert_eq!(z_score(90.0, 91.0, 0.5), 2.0);
    }
}
