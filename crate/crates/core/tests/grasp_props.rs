mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::planar::PlanarPads;
use tandemgrip_core::grasp::{
    self, build_contacts_with, check_witness, max_resistible_pull, predict_strength_with,
    ActuationMode, ContactLayout, GraspModelParams, GraspScenario, PullType, WITNESS_TOL,
};
use tandemgrip_core::nalgebra::{Rotation3, Vector3};

fn two_opposed_pads(mu: f64, cap: f64, r: f64) -> PlanarPads {
    PlanarPads {
        radius: r,
        angles: vec![0.0, std::f64::consts::PI],
        mu: vec![mu; 2],
        cap: vec![cap; 2],
        pull_angle: 0.0,
        point: Default::default(),
    }
}

#[test]
fn opposed_pads_match_closed_form() {
    for &(mu, cap, r) in &[
        (0.5, 10.0, 37.5),
        (1.0, 18.0, 20.0),
        (0.2, 3.0, 50.0),
        (0.9, 7.0, 5.0),
    ] {
        for k in 0..=18 {
            let phi = (k as f64 * 5.0).to_radians();
            let mut inst = two_opposed_pads(mu, cap, r);
            inst.pull_angle = phi;
            let (ux, uy) = (phi.cos(), phi.sin());
            let friction = 2.0 * mu * cap / (uy + 2.0 * mu * ux);
            let expected = if ux > 1e-12 {
                (cap / ux).min(friction)
            } else {
                friction
            };
            let set = inst.contact_set(8);
            let (u, a) = inst.load_3d();
            let res = max_resistible_pull(&set, &u, &a).unwrap();
            assert!(
                (res.alpha - expected).abs() <= 1e-6 * expected.max(1.0),
                "mu {mu} cap {cap} phi {k}: {} vs {expected}",
                res.alpha
            );
        }
    }
}

#[test]
fn single_pad_pushed_along_its_normal() {
    // Pull opposite the pad normal, through the contact point.
    let inst = PlanarPads {
        radius: 10.0,
        angles: vec![0.0],
        mu: vec![0.4],
        cap: vec![6.5],
        pull_angle: 0.0,
        point: tandemgrip_core::nalgebra::Vector2::new(10.0, 0.0),
    };
    let set = inst.contact_set(8);
    let (u, a) = inst.load_3d();
    let res = max_resistible_pull(&set, &u, &a).unwrap();
    assert!((res.alpha - 6.5).abs() < 1e-9);
}

#[test]
fn random_planar_instances_within_sampled_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut resisted = 0;
    for i in 0..100 {
        let inst = PlanarPads::random_three(&mut rng);
        let set = inst.contact_set(8);
        let (u, a) = inst.load_3d();
        let lp = max_resistible_pull(&set, &u, &a).unwrap().alpha;
        let lower = inst.lower_bound(2000);
        let upper = inst.upper_bound(4000);
        let tol = 1e-6 * (1.0 + lp);
        assert!(
            lp >= lower - tol,
            "instance {i}: lp {lp} < feasible {lower}"
        );
        assert!(
            lp <= upper * 1.02 + tol,
            "instance {i}: lp {lp} > upper {upper}"
        );
        assert!(
            lp <= lower * 1.02 + 1e-6,
            "instance {i}: lp {lp} vs sampled {lower}"
        );
        resisted += usize::from(lp > 1e-6);
    }
    // Most random instances must resist something for the check to bite.
    assert!(resisted >= 50, "only {resisted} instances resist a pull");
}

fn scenario_strategy() -> impl Strategy<Value = GraspScenario> {
    (
        0usize..3,
        0.0..30.0f64,
        0.0..90.0f64,
        any::<bool>(),
        25.0..50.0f64,
    )
        .prop_map(|(m, offset, angle, rot, radius)| GraspScenario {
            fruit_radius: radius,
            fruit_offset: offset.min(radius * 0.8),
            pull_angle: angle,
            pull_type: if rot {
                PullType::Rotational
            } else {
                PullType::Axial
            },
            mode: ActuationMode::ALL[m],
        })
}

fn model_strategy() -> impl Strategy<Value = GraspModelParams> {
    (1.0..30.0f64, 0.1..1.5f64, 0.5..10.0f64, 0.05..1.0f64).prop_map(|(p, mu, s, k)| {
        GraspModelParams {
            pad_force: p,
            mu_pad: mu,
            suction_axial: s,
            shear_fraction: k,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn witness_satisfies_constraints(s in scenario_strategy(), m in model_strategy()) {
        let layout = ContactLayout::default();
        let set = build_contacts_with(&s, &m, &layout).unwrap();
        let (u, a) = s.load();
        let res = max_resistible_pull(&set, &u, &a).unwrap();
        prop_assert!(res.alpha >= 0.0 && res.alpha.is_finite());
        prop_assert!(check_witness(&set, &u, &a, &res) <= WITNESS_TOL);
    }

    #[test]
    fn dual_dominates_single_modes(s in scenario_strategy(), m in model_strategy()) {
        let layout = ContactLayout::default();
        let p = |mode| predict_strength_with(&s.with_mode(mode), &m, &layout).unwrap();
        let dual = p(ActuationMode::Dual);
        let best = p(ActuationMode::Suction).max(p(ActuationMode::Fingers));
        prop_assert!(dual >= best - 1e-6 * (1.0 + best), "dual {} < {}", dual, best);
    }

    #[test]
    fn raising_capacity_never_lowers_strength(
        s in scenario_strategy(),
        m in model_strategy(),
        which in 0usize..4,
        factor in 1.0..2.0f64,
    ) {
        let layout = ContactLayout::default();
        let mut v = m.to_vec();
        v[which] *= factor;
        let mut bigger = GraspModelParams::from_slice(&v);
        bigger.shear_fraction = bigger.shear_fraction.min(1.0);
        let before = predict_strength_with(&s, &m, &layout).unwrap();
        let after = predict_strength_with(&s, &bigger, &layout).unwrap();
        prop_assert!(after >= before - 1e-6 * (1.0 + before), "{} -> {}", before, after);
    }

    #[test]
    fn threefold_symmetry(s in scenario_strategy(), m in model_strategy(), turns in 1u32..3) {
        let layout = ContactLayout::default();
        let set = build_contacts_with(&s, &m, &layout).unwrap();
        prop_assume!(!set.contacts.is_empty());
        let (u, a) = s.load();
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), turns as f64 * 120f64.to_radians());
        let base = max_resistible_pull(&set, &u, &a).unwrap().alpha;
        let turned = max_resistible_pull(&set, &(rot * u), &(rot * a)).unwrap().alpha;
        prop_assert!((base - turned).abs() <= 1e-6 * base.max(1.0), "{} vs {}", base, turned);
    }
}

#[test]
fn empty_and_invalid_inputs() {
    let set = grasp::ContactSet {
        fruit_radius: 10.0,
        contacts: vec![],
    };
    assert!(max_resistible_pull(&set, &Vector3::z(), &Vector3::zeros()).is_err());
    let s = GraspScenario::new(ActuationMode::Dual);
    let set =
        build_contacts_with(&s, &GraspModelParams::DEFAULT, &ContactLayout::default()).unwrap();
    assert!(max_resistible_pull(&set, &Vector3::zeros(), &Vector3::zeros()).is_err());
}
