//! Social welfare `W = U_A + U_B + λ·I` and the swap-versus-traditional
//! welfare comparison.

use crate::matrix::{PayoffMatrix, Profile};

/// Institutional objective `I` evaluated on a profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum IntegrityMetric {
    /// Fraction of students who prepare.
    #[default]
    PrepRate,
    /// Fraction of students neither copying nor copied from.
    HonestRate,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WelfareSpec {
    pub lambda: f64,
    pub metric: IntegrityMetric,
}

/// Value of the integrity metric for `profile` in `m`.
pub fn integrity(m: &PayoffMatrix, profile: Profile, metric: IntegrityMetric) -> f64 {
    match metric {
        IntegrityMetric::PrepRate => profile.preparers() as f64 / 2.0,
        IntegrityMetric::HonestRate => {
            let behavior = m.behavior();
            let copy_a = behavior.attempts_copy(profile.a, profile.b);
            let copy_b = behavior.attempts_copy(profile.b, profile.a);
            // a copier and the student copied from are both implicated
            let honest = |own_copies: bool, other_copies: bool| !(own_copies || other_copies);
            (f64::from(u8::from(honest(copy_a, copy_b))) + f64::from(u8::from(honest(copy_b, copy_a)))) / 2.0
        }
        IntegrityMetric::Constant(v) => v,
    }
}

pub fn welfare(m: &PayoffMatrix, profile: Profile, spec: &WelfareSpec) -> f64 {
    let cell = m.cell(profile);
    cell.a + cell.b + spec.lambda * integrity(m, profile, spec.metric)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prop4Check {
    /// `p_first · [W_first(P,P) − W_first(NP,NP)]`.
    pub lhs: f64,
    /// `p_second · [W_second(P,P) − W_second(NP,NP)]`.
    pub rhs: f64,
    pub condition_holds: bool,
    /// Whether the two (NP,NP) welfare values coincide.
    pub npnp_coincide: bool,
}

/// Compares the welfare gain of mutual preparation, scaled by each regime's
/// detection probability. Matrices without parameters use probability 1.
pub fn check_prop4(swap_m: &PayoffMatrix, trad_m: &PayoffMatrix, spec: &WelfareSpec) -> Prop4Check {
    let side = |m: &PayoffMatrix| {
        let prob = m.detection_probability().unwrap_or(1.0);
        let npnp = welfare(m, Profile::NPNP, spec);
        (prob * (welfare(m, Profile::PP, spec) - npnp), npnp)
    };
    let (lhs, npnp_swap) = side(swap_m);
    let (rhs, npnp_trad) = side(trad_m);
    Prop4Check { lhs, rhs, condition_holds: lhs > rhs, npnp_coincide: npnp_swap == npnp_trad }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_matrix, build_matrix_in, Cell};
    use crate::model::fixtures::base;
    use crate::model::{BehaviorPolicy, Field, Regime};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn zero_weight_is_plain_sum() {
        let m = build_matrix(&base(), &BehaviorPolicy::default()).unwrap();
        let spec = WelfareSpec { lambda: 0.0, metric: IntegrityMetric::PrepRate };
        assert!(close(welfare(&m, Profile::PNP, &spec), 65.0 + 90.0));
    }

    #[test]
    fn prep_rate_weighting() {
        let m = build_matrix(&base(), &BehaviorPolicy::default()).unwrap();
        let spec = WelfareSpec { lambda: 10.0, metric: IntegrityMetric::PrepRate };
        assert!(close(welfare(&m, Profile::PP, &spec), 180.0 + 10.0));
        assert!(close(welfare(&m, Profile::NPNP, &spec), 80.0));
        assert!(close(welfare(&m, Profile::PNP, &spec), 155.0 + 5.0));
    }

    #[test]
    fn honest_rate_follows_copying() {
        let m = build_matrix(&base(), &BehaviorPolicy::default()).unwrap();
        assert_eq!(integrity(&m, Profile::PP, IntegrityMetric::HonestRate), 1.0);
        assert_eq!(integrity(&m, Profile::PNP, IntegrityMetric::HonestRate), 0.0);
        assert_eq!(integrity(&m, Profile::NPNP, IntegrityMetric::HonestRate), 1.0);
        let copying = BehaviorPolicy { copy_in_npnp: true, ..Default::default() };
        let m = build_matrix(&base(), &copying).unwrap();
        assert_eq!(integrity(&m, Profile::NPNP, IntegrityMetric::HonestRate), 0.0);
        assert_eq!(integrity(&m, Profile::NPNP, IntegrityMetric::Constant(0.3)), 0.3);
    }

    #[test]
    fn identical_regimes_do_not_satisfy_strict_condition() {
        let m = build_matrix(&base(), &BehaviorPolicy::default()).unwrap();
        let c = check_prop4(&m, &m, &WelfareSpec::default());
        assert_eq!(c.lhs, c.rhs);
        assert!(!c.condition_holds);
        assert!(c.npnp_coincide);
    }

    #[test]
    fn higher_detection_with_equal_gaps_wins() {
        let cells = [Cell::new(90.0, 90.0), Cell::new(65.0, 90.0), Cell::new(90.0, 65.0), Cell::new(40.0, 40.0)];
        let plain = PayoffMatrix::from_cells(cells);
        let swap = build_matrix(&base().with(Field::P, 0.7), &BehaviorPolicy::default()).unwrap();
        let trad =
            build_matrix_in(&base().with(Field::P0, 0.4), &BehaviorPolicy::default(), Regime::Traditional).unwrap();
        let c = check_prop4(&swap, &trad, &WelfareSpec::default());
        // default behaviour: no copying at (P,P) or (NP,NP), so the gaps are equal
        assert!(close(c.lhs, 0.7 * 100.0) && close(c.rhs, 0.4 * 100.0));
        assert!(c.condition_holds);
        assert!(close(check_prop4(&plain, &plain, &WelfareSpec::default()).lhs, 100.0));
    }

    #[test]
    fn worked_comparison_from_both_matrices() {
        // τ = 0.5, p0 = p = 0.5, λ = 0: W(P,P) = 180 and W(NP,NP) = 80 under both regimes.
        let params = base();
        let swap = build_matrix(&params, &BehaviorPolicy::default()).unwrap();
        let trad = build_matrix_in(&params, &BehaviorPolicy::default(), Regime::Traditional).unwrap();
        let c = check_prop4(&swap, &trad, &WelfareSpec::default());
        assert!(close(c.lhs, 50.0));
        assert!(close(c.rhs, 50.0));
        assert!(!c.condition_holds);
    }

    #[test]
    fn regime_order_flips_verdict() {
        let params = base().with(Field::P, 0.6).with(Field::P0, 0.3);
        let copying = BehaviorPolicy { copy_in_npnp: true, ..Default::default() };
        let swap = build_matrix(&params, &copying).unwrap();
        let trad = build_matrix_in(&params, &copying, Regime::Traditional).unwrap();
        let spec = WelfareSpec { lambda: 5.0, metric: IntegrityMetric::HonestRate };
        let fwd = check_prop4(&swap, &trad, &spec);
        let rev = check_prop4(&trad, &swap, &spec);
        assert_eq!(fwd.lhs, rev.rhs);
        assert_ne!(fwd.condition_holds, rev.condition_holds);
    }
}
