use proptest::prelude::*;

use scriptswap_core::equilibrium::{
    check_prop1, check_prop2, classify_hetero, indifference_residuals, mixed_nash_2x2, pure_nash,
    threshold_p_deviation, threshold_p_eq15, threshold_p_numeric, HeteroClass, MIXED_RESIDUAL_TOL,
};
use scriptswap_core::payoffs::{
    coordinated_scores, eu_copier_swap, eu_copier_traditional, eu_npnp, eu_victim_swap, swap_payoff,
};
use scriptswap_core::statics::{dpbar_dbeta, dpbar_dc, finite_diff};
use scriptswap_core::welfare::{check_prop4, welfare, IntegrityMetric, WelfareSpec};
use scriptswap_core::{
    build_matrix, build_matrix_in, effort_cost, symmetric_payoffs, BehaviorPolicy, Cell, Field, GameParams,
    PayoffMatrix, Profile, Regime,
};

fn unit() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

prop_compose! {
    fn params()(
        theta_a in 0.2f64..=1.0,
        theta_b in 0.2f64..=1.0,
        g in 50.0f64..150.0,
        alpha in unit(),
        beta in unit(),
        gamma in unit(),
        p in unit(),
        p0 in unit(),
        tau in 0.0f64..0.9,
        c in 1.0f64..100.0,
        lambda in 0.0f64..20.0,
    ) -> GameParams {
        GameParams { theta_a, theta_b, g, alpha, beta, gamma, p, p0, tau, c, lambda }
    }
}

prop_compose! {
    fn symmetric_params()(base in params()) -> GameParams {
        GameParams { theta_b: base.theta_a, ..base }
    }
}

fn behavior() -> impl Strategy<Value = BehaviorPolicy> {
    (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(a, b, c)| BehaviorPolicy {
        copy_if_other_prepared: a,
        prepared_copies: b,
        copy_in_npnp: c,
    })
}

fn cells() -> impl Strategy<Value = [Cell; 4]> {
    prop::array::uniform4((-100.0f64..100.0, -100.0f64..100.0).prop_map(|(a, b)| Cell::new(a, b)))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn validate_is_idempotent(p in params()) {
        let once = p.validate().unwrap();
        prop_assert_eq!(once.validate().unwrap(), once);
    }

    #[test]
    fn effort_cost_inverts_ability(theta in 1e-3f64..=1.0, c in 1e-3f64..1e3) {
        let cost = effort_cost(theta, c).unwrap();
        prop_assert!(((cost * theta - c) / c).abs() <= 1e-12);
    }

    #[test]
    fn expected_utilities_grow_with_grade_and_target_ability(p in params(), dg in 0.0f64..50.0, dt in 0.0f64..0.5) {
        let g_up = p.with(Field::G, p.g + dg);
        let t_up = p.with(Field::ThetaA, (p.theta_a + dt).min(1.0));
        for f in [eu_copier_swap, eu_victim_swap, eu_copier_traditional] {
            prop_assert!(f(&g_up) >= f(&p) - 1e-9);
            prop_assert!(f(&t_up) >= f(&p) - 1e-9);
        }
        for swapped in [false, true] {
            let (a, b) = eu_npnp(&p, swapped);
            let (ag, bg) = eu_npnp(&g_up, swapped);
            let (at, bt) = eu_npnp(&t_up, swapped);
            prop_assert!(ag >= a - 1e-9 && bg >= b - 1e-9);
            prop_assert!(at >= a - 1e-9 && bt >= b - 1e-9);
        }
    }

    #[test]
    fn swap_never_pays_less_than_zero_retention(p in params()) {
        let zero = p.with(Field::Tau, 0.0).with(Field::P0, p.p);
        prop_assert!(eu_copier_swap(&p) >= eu_copier_traditional(&zero) - 1e-9);
    }

    #[test]
    fn swap_payoff_has_slope_beta(p in params(), r in 0.0f64..150.0, dr in 0.1f64..50.0, theta in 0.2f64..1.0) {
        let slope = (swap_payoff(r + dr, theta, &p) - swap_payoff(r, theta, &p)) / dr;
        prop_assert!((slope - p.beta).abs() <= 1e-9);
    }

    #[test]
    fn coordinated_swap_is_label_symmetric(p in params()) {
        prop_assert_eq!(coordinated_scores(&p).swapped, coordinated_scores(&p.swap_players()).swapped);
    }

    #[test]
    fn exchanging_abilities_transposes_matrix(p in params(), b in behavior(), regime in prop_oneof![Just(Regime::Swap), Just(Regime::Traditional)]) {
        let m = build_matrix_in(&p, &b, regime).unwrap();
        let swapped = build_matrix_in(&p.swap_players(), &b, regime).unwrap();
        let t = m.transposed();
        for profile in Profile::ALL {
            prop_assert_eq!(swapped.cell(profile), t.cell(profile));
        }
    }

    #[test]
    fn symmetric_closed_forms_equal_matrix(p in symmetric_params()) {
        let s = symmetric_payoffs(&p).unwrap();
        let m = build_matrix(&p, &BehaviorPolicy::default()).unwrap();
        let pnp = m.cell(Profile::PNP);
        let npp = m.cell(Profile::NPP);
        prop_assert!(close(s.pi_pp, m.cell(Profile::PP).a, 1e-12) && close(s.pi_pp, m.cell(Profile::PP).b, 1e-12));
        prop_assert!(close(s.pi_a_pnp, pnp.a, 1e-12) && close(s.pi_a_pnp, npp.b, 1e-12));
        prop_assert!(close(s.pi_b_pnp, pnp.b, 1e-12) && close(s.pi_b_pnp, npp.a, 1e-12));
        prop_assert!(close(s.pi_npnp, m.cell(Profile::NPNP).a, 1e-12) && close(s.pi_npnp, m.cell(Profile::NPNP).b, 1e-12));
    }

    #[test]
    fn symmetric_threshold_routes_agree(p in symmetric_params()) {
        let dev = threshold_p_deviation(&p).unwrap();
        let numeric = threshold_p_numeric(&p, &BehaviorPolicy::default()).unwrap();
        match numeric.p_pp_br {
            Some(x) => prop_assert!((x - dev).abs() <= 1e-6, "{} vs {}", x, dev),
            None => prop_assert!(dev > 1.0),
        }
    }

    #[test]
    fn prop1_condition_matches_payoffs_when_symmetric(p in symmetric_params()) {
        let p = p.with(Field::P0, p.p);
        let c = check_prop1(&p);
        let scale = p.theta_a * p.g;
        prop_assume!((c.condition.lhs - c.condition.rhs).abs() > 1e-9);
        prop_assume!((c.model.lhs - c.model.rhs).abs() > 1e-9 * scale);
        prop_assert!(c.model_agrees);
    }

    #[test]
    fn equal_abilities_separate_in_mirrored_pairs(p in symmetric_params()) {
        let ne = pure_nash(&build_matrix(&p, &BehaviorPolicy::default()).unwrap());
        prop_assert_eq!(ne.contains(&Profile::PNP), ne.contains(&Profile::NPP));
    }

    #[test]
    fn derivative_closed_forms_match_finite_differences(p in symmetric_params()) {
        let eq15 = |q: &GameParams| threshold_p_eq15(q).map(|t| t.value);
        let dc = dpbar_dc(&p).unwrap();
        prop_assert!(close(finite_diff(eq15, Field::C, &p, None).unwrap(), dc, 1e-6));
        let db = dpbar_dbeta(&p).unwrap();
        prop_assume!(db.abs() > 1e-12);
        let fd = finite_diff(eq15, Field::Beta, &p, None).unwrap();
        prop_assert!(((fd - db) / db).abs() <= 1e-6, "fd {} analytic {}", fd, db);
    }

    #[test]
    fn welfare_is_affine_in_lambda(p in params(), b in behavior(), dl in 0.0f64..10.0) {
        let m = build_matrix(&p, &b).unwrap();
        for metric in [IntegrityMetric::PrepRate, IntegrityMetric::HonestRate, IntegrityMetric::Constant(0.4)] {
            let lo = WelfareSpec { lambda: p.lambda, metric };
            let hi = WelfareSpec { lambda: p.lambda + dl, metric };
            for profile in Profile::ALL {
                let i = scriptswap_core::welfare::integrity(&m, profile, metric);
                prop_assert!((welfare(&m, profile, &hi) - welfare(&m, profile, &lo) - dl * i).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn welfare_comparison_is_antisymmetric(p in params(), b in behavior()) {
        let swap = build_matrix(&p, &b).unwrap();
        let trad = build_matrix_in(&p, &b, Regime::Traditional).unwrap();
        let spec = WelfareSpec { lambda: p.lambda, metric: IntegrityMetric::HonestRate };
        let fwd = check_prop4(&swap, &trad, &spec);
        let rev = check_prop4(&trad, &swap, &spec);
        prop_assert_eq!(fwd.lhs, rev.rhs);
        if fwd.lhs != fwd.rhs {
            prop_assert_ne!(fwd.condition_holds, rev.condition_holds);
        }
    }

    #[test]
    fn emitted_mixed_equilibria_are_indifferent(c in cells()) {
        let m = PayoffMatrix::from_cells(c);
        if let Some(mix) = mixed_nash_2x2(&m) {
            prop_assert!(mix.q_a > 0.0 && mix.q_a < 1.0 && mix.q_b > 0.0 && mix.q_b < 1.0);
            let (ra, rb) = indifference_residuals(&m, &mix);
            prop_assert!(ra.abs() <= MIXED_RESIDUAL_TOL && rb.abs() <= MIXED_RESIDUAL_TOL);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reported_equilibria_survive_exhaustive_deviation(p in params(), b in behavior()) {
        let m = build_matrix(&p, &b).unwrap();
        let ne = pure_nash(&m);
        for profile in Profile::ALL {
            let here = m.cell(profile);
            let a_gains = m.cell(Profile::new(profile.a.other(), profile.b)).a > here.a;
            let b_gains = m.cell(Profile::new(profile.a, profile.b.other())).b > here.b;
            prop_assert_eq!(ne.contains(&profile), !a_gains && !b_gains);
        }
    }

    #[test]
    fn mutual_non_preparation_condition_matches_matrix(p in symmetric_params()) {
        let check = check_prop2(&p).unwrap();
        prop_assume!(!check.knife_edge);
        prop_assert_eq!(check.model_agrees, Some(true));
    }
}

#[test]
fn equal_abilities_can_anti_coordinate() {
    // copying beats mutual preparation and being copied beats mutual idleness
    let p = GameParams {
        theta_a: 0.78,
        theta_b: 0.78,
        g: 124.0,
        alpha: 0.05,
        beta: 0.05,
        gamma: 0.05,
        p: 0.05,
        p0: 0.05,
        tau: 0.0,
        c: 30.0,
        lambda: 0.0,
    };
    let ne = pure_nash(&build_matrix(&p, &BehaviorPolicy::default()).unwrap());
    assert_eq!(ne, vec![Profile::PNP, Profile::NPP]);
    assert_eq!(classify_hetero(&p).unwrap(), HeteroClass::SeparatingOnly);
}
