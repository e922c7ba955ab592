//! Deterministic random draws of parameters and payoff matrices.

use scriptswap_core::mcsim::CounterRng;
use scriptswap_core::{BehaviorPolicy, Cell, GameParams, PayoffMatrix};

/// Draws parameter sets from θ ∈ [0.2, 1], g ∈ [50, 150],
/// α, β, γ, p, p0 ∈ [0.05, 0.95], τ ∈ [0, 0.9], c ∈ [1, 100], λ = 0.
/// Draw `k` depends only on the seed and `k`.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    rng: CounterRng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: CounterRng::new(seed) }
    }

    fn uniform(&self, k: u64, stream: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.unit(k, stream)
    }

    pub fn params(&self, k: u64) -> GameParams {
        let mid = |s| self.uniform(k, s, 0.05, 0.95);
        GameParams {
            theta_a: 1.0 - self.uniform(k, 0, 0.0, 0.8),
            theta_b: 1.0 - self.uniform(k, 1, 0.0, 0.8),
            g: self.uniform(k, 2, 50.0, 150.0),
            alpha: mid(3),
            beta: mid(4),
            gamma: mid(5),
            p: mid(6),
            p0: mid(7),
            tau: self.uniform(k, 8, 0.0, 0.9),
            c: self.uniform(k, 9, 1.0, 100.0),
            lambda: 0.0,
        }
    }

    /// As [`Sampler::params`] with θ_B set to θ_A.
    pub fn symmetric(&self, k: u64) -> GameParams {
        let p = self.params(k);
        GameParams { theta_b: p.theta_a, ..p }
    }

    /// Matrix with every payoff uniform on [−100, 100].
    pub fn matrix(&self, k: u64) -> PayoffMatrix {
        let x = |s| self.uniform(k, s, -100.0, 100.0);
        PayoffMatrix::from_cells([
            Cell::new(x(0), x(1)),
            Cell::new(x(2), x(3)),
            Cell::new(x(4), x(5)),
            Cell::new(x(6), x(7)),
        ])
    }

    /// Independent seed for a sub-task.
    pub fn seed(&self, k: u64, stream: u64) -> u64 {
        self.rng.word(k, stream)
    }
}

/// The eight copying-rule variants, indexed by the low three bits of `k`.
pub fn behavior_variant(k: u64) -> BehaviorPolicy {
    BehaviorPolicy { copy_if_other_prepared: k & 1 == 0, prepared_copies: k & 2 != 0, copy_in_npnp: k & 4 != 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_valid_and_reproducible() {
        let s = Sampler::new(3);
        for k in 0..500 {
            let p = s.params(k);
            assert!(p.validate().is_ok(), "{:?}", p);
            assert!(p.theta_a > 0.2 && p.theta_a <= 1.0);
            assert_eq!(p, Sampler::new(3).params(k));
        }
        assert_ne!(s.params(0), Sampler::new(4).params(0));
        assert!(s.symmetric(9).is_symmetric());
        assert_eq!(behavior_variant(0), BehaviorPolicy::default());
    }
}
