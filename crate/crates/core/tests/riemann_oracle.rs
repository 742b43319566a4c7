use approx::assert_relative_eq;
use proptest::prelude::*;
use rdflow::eos::EosModel;
use rdflow::multiphase::PhasePair;
use rdflow::riemann::*;

const GAS: EosModel = EosModel::perfect_gas(1.4);

fn sod() -> RiemannProblem {
    RiemannProblem::new(
        GAS,
        Primitive::new(1.0, 0.0, 1.0),
        Primitive::new(0.125, 0.0, 0.1),
        0.5,
    )
}

fn epoxy_spinel() -> MixtureRiemannProblem {
    let side = |p| MixturePrimitive {
        alpha1: 0.5954,
        rho1: 1185.0,
        rho2: 3622.0,
        u: 0.0,
        p,
    };
    MixtureRiemannProblem {
        pair: PhasePair {
            phase1: EosModel::stiffened_gas(2.43, 5.3e9),
            phase2: EosModel::stiffened_gas(1.62, 141e9),
        },
        left: side(2e11),
        right: side(1e5),
        x_d: 0.6,
    }
}

#[test]
fn sod_star_state() {
    let fan = solve_perfect_gas(&sod()).unwrap();
    assert_relative_eq!(fan.p_star, 0.30313, max_relative = 2e-5);
    assert_relative_eq!(fan.u_star, 0.92745, max_relative = 2e-5);
    assert!(fan.residuals.hugoniot <= 1e-9);
    assert_eq!(fan.left_wave().kind, WaveKind::Rarefaction);
    assert_eq!(fan.right_wave().kind, WaveKind::Shock);
}

#[test]
fn sod_samples_are_self_similar_and_ordered() {
    let fan = solve_perfect_gas(&sod()).unwrap();
    for xi in [-2.0, -1.0, -0.3, 0.5, 1.2, 1.9] {
        let a = fan.sample(0.5 + xi * 0.1, 0.1).unwrap();
        let b = fan.sample(0.5 + xi * 0.25, 0.25).unwrap();
        assert_relative_eq!(a.rho, b.rho, max_relative = 1e-14);
        assert_relative_eq!(a.p, b.p, max_relative = 1e-14);
    }
    // the fan joins its edge states continuously
    let head = fan.left_wave().head;
    let tail = fan.left_wave().tail;
    let inside = fan.sample_xi(head + 1e-12).unwrap();
    assert_relative_eq!(inside.p, 1.0, max_relative = 1e-9);
    let inside = fan.sample_xi(tail - 1e-12).unwrap();
    assert_relative_eq!(inside.p, fan.p_star, max_relative = 1e-9);
}

#[test]
fn identical_states_give_a_trivial_fan() {
    let s = Primitive::new(1.3, 0.0, 2.0);
    for fan in [
        solve_perfect_gas(&RiemannProblem::new(GAS, s, s, 0.0)).unwrap(),
        solve_mie_gruneisen(&RiemannProblem::new(GAS, s, s, 0.0)).unwrap(),
    ] {
        assert_relative_eq!(fan.p_star, 2.0, max_relative = 1e-14);
        assert!(fan.u_star.abs() < 1e-14);
        let (l, r) = fan.star_states().unwrap();
        assert_relative_eq!(l.rho, 1.3, max_relative = 1e-12);
        assert_relative_eq!(r.rho, 1.3, max_relative = 1e-12);
    }
}

#[test]
fn contact_data_give_zero_strength_waves() {
    let eos = EosModel::cochran_chan_reference();
    let p = RiemannProblem::new(
        eos,
        Primitive::new(1134.0, 1000.0, 20e9),
        Primitive::new(500.0, 1000.0, 20e9),
        0.5,
    );
    let fan = solve_mie_gruneisen(&p).unwrap();
    assert_relative_eq!(fan.p_star, 20e9, max_relative = 1e-12);
    assert_relative_eq!(fan.u_star, 1000.0, max_relative = 1e-12);
    let (l, r) = fan.star_states().unwrap();
    assert_relative_eq!(l.rho, 1134.0, max_relative = 1e-10);
    assert_relative_eq!(r.rho, 500.0, max_relative = 1e-10);
}

#[test]
fn vacuum_is_reported() {
    let p = RiemannProblem::new(
        GAS,
        Primitive::new(1.0, -20.0, 1.0),
        Primitive::new(1.0, 20.0, 1.0),
        0.5,
    );
    let err = solve_perfect_gas(&p).unwrap_err();
    assert!(err.to_string().contains("vacuum"), "{err}");
}

#[test]
fn zero_stiffness_reduces_to_perfect_gas() {
    let mut p = sod();
    p.left_eos = EosModel::stiffened_gas(1.4, 0.0);
    p.right_eos = EosModel::stiffened_gas(1.4, 0.0);
    let a = solve_stiffened_gas(&p).unwrap();
    let b = solve_perfect_gas(&sod()).unwrap();
    assert_eq!(a.p_star, b.p_star);
    assert_eq!(a.u_star, b.u_star);
}

#[test]
fn two_material_stiffened_problem_satisfies_jump_conditions() {
    let p = RiemannProblem {
        left: Primitive::new(1185.0, 0.0, 2e11),
        right: Primitive::new(3622.0, 0.0, 1e5),
        left_eos: EosModel::stiffened_gas(2.43, 5.3e9),
        right_eos: EosModel::stiffened_gas(1.62, 141e9),
        x_d: 0.5,
    };
    let a = solve_stiffened_gas(&p).unwrap();
    let b = solve_mie_gruneisen(&p).unwrap();
    assert!(a.residuals.hugoniot <= 1e-9 && b.residuals.hugoniot <= 1e-9);
    assert_relative_eq!(a.p_star, b.p_star, max_relative = 1e-8);
    assert_relative_eq!(a.u_star, b.u_star, max_relative = 1e-8);
}

#[test]
fn strong_shock_tube_fixture() {
    let p = RiemannProblem::new(
        GAS,
        Primitive::new(100.0, 0.0, 1e9),
        Primitive::new(1.0, 0.0, 1e5),
        0.5,
    );
    let fan = solve_perfect_gas(&p).unwrap();
    assert_relative_eq!(fan.p_star, 5.073231327292e7, max_relative = 1e-10);
    assert_relative_eq!(fan.u_star, 6.488188936501e3, max_relative = 1e-10);
    let numeric = solve_mie_gruneisen(&p).unwrap();
    assert_relative_eq!(numeric.p_star, fan.p_star, max_relative = 1e-8);
}

#[test]
fn cochran_chan_riemann_fixture() {
    let p = RiemannProblem::new(
        EosModel::cochran_chan_reference(),
        Primitive::new(1134.0, 0.0, 2e10),
        Primitive::new(120.0, 0.0, 2e5),
        0.5,
    );
    let fan = solve_mie_gruneisen(&p).unwrap();
    assert_relative_eq!(fan.p_star, 3.100438223463e9, max_relative = 1e-9);
    assert_relative_eq!(fan.u_star, 3.987546364505e3, max_relative = 1e-9);
    assert!(fan.residuals.hugoniot <= 1e-8 && fan.residuals.invariants <= 1e-8);
    assert_eq!(fan.left_wave().kind, WaveKind::Rarefaction);
    assert_eq!(fan.right_wave().kind, WaveKind::Shock);
}

#[test]
fn epoxy_spinel_fixture() {
    let fan = solve_mixture(&epoxy_spinel()).unwrap();
    assert_relative_eq!(fan.p_star, 8.815061070562e10, max_relative = 1e-9);
    assert_relative_eq!(fan.u_star, 4.147378611712e3, max_relative = 1e-9);
    assert!(fan.residuals.hugoniot <= 1e-7 && fan.residuals.invariants <= 1e-7);
    let (l, r) = fan.star_states().unwrap();
    // mass fractions do not change through the waves
    assert_relative_eq!(
        l.y1.unwrap(),
        epoxy_spinel().left.y1(),
        max_relative = 1e-14
    );
    assert_relative_eq!(
        r.y1.unwrap(),
        epoxy_spinel().right.y1(),
        max_relative = 1e-14
    );
}

#[test]
fn mixture_contact_is_trivial() {
    let mut p = epoxy_spinel();
    p.left.p = 1e9;
    p.right.p = 1e9;
    p.right.alpha1 = 0.2;
    p.left.u = 50.0;
    p.right.u = 50.0;
    let fan = solve_mixture(&p).unwrap();
    assert_relative_eq!(fan.p_star, 1e9, max_relative = 1e-12);
    assert_relative_eq!(fan.u_star, 50.0, max_relative = 1e-12);
}

#[test]
fn nearly_pure_mixture_matches_single_phase() {
    let eos1 = EosModel::cochran_chan_reference();
    let pair = PhasePair {
        phase1: eos1,
        phase2: EosModel::stiffened_gas(1.62, 141e9),
    };
    let alpha = 1.0 - 1e-9;
    let side = |rho1, p| MixturePrimitive {
        alpha1: alpha,
        rho1,
        rho2: 3622.0,
        u: 0.0,
        p,
    };
    let mixture = solve_mixture(&MixtureRiemannProblem {
        pair,
        left: side(1134.0, 2e10),
        right: side(120.0, 2e5),
        x_d: 0.5,
    })
    .unwrap();
    let single = solve_mie_gruneisen(&RiemannProblem::new(
        eos1,
        Primitive::new(1134.0, 0.0, 2e10),
        Primitive::new(120.0, 0.0, 2e5),
        0.5,
    ))
    .unwrap();
    assert_relative_eq!(mixture.p_star, single.p_star, max_relative = 1e-6);
    assert_relative_eq!(mixture.u_star, single.u_star, max_relative = 1e-6);
}

fn random_gas_problem() -> impl Strategy<Value = (f64, [f64; 6])> {
    (
        1.1f64..3.0,
        [
            0.1f64..10.0,
            -2.0f64..2.0,
            0.1f64..10.0,
            0.1f64..10.0,
            -2.0f64..2.0,
            0.1f64..10.0,
        ],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn numeric_wave_curves_agree_with_closed_form((gamma, v) in random_gas_problem()) {
        let eos = EosModel::perfect_gas(gamma);
        let p = RiemannProblem::new(eos, Primitive::new(v[0], v[1], v[2]), Primitive::new(v[3], v[4], v[5]), 0.0);
        if let Ok(exact) = solve_perfect_gas(&p) {
            let numeric = solve_mie_gruneisen(&p).unwrap();
            prop_assert!((numeric.p_star - exact.p_star).abs() <= 1e-8 * exact.p_star);
            let scale = exact.u_star.abs().max(1e-8 * (v[1].abs() + v[4].abs() + 1.0));
            prop_assert!((numeric.u_star - exact.u_star).abs() <= 1e-8 * scale.max(1.0));
            prop_assert!(exact.residuals.hugoniot <= 1e-8 && exact.residuals.invariants <= 1e-8);
        }
    }
}
