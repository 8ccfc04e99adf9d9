mod common;

use std::sync::Arc;

use common::*;
use ebw_core::{q, Alphabet, Environment, FnEnvironment, FnPolicy, History, Policy, Rational, Signature, Universe};
use ebw_equilibria::*;
use ebw_planning::{DiscountedTask, PlanBudget};
use proptest::prelude::*;

fn zero() -> Rational {
    q(0, 1)
}

#[test]
fn see_counterexample_passes_see_with_zero_slack() {
    let g = see_game();
    let profile = g.pure_profile(&[0, 0]).unwrap();
    let v = check_see_one_shot(&g, &profile, &see_beliefs(), &zero()).unwrap();
    assert!(v.pass, "{:?}", v);
    assert_eq!(v.tolerances.planning_slack.as_deref(), Some("0"));
    assert_eq!(v.tolerances.delta.as_deref(), Some("0"));
}

#[test]
fn see_counterexample_with_contradicted_beliefs_fails() {
    let g = see_game();
    let profile = g.pure_profile(&[0, 0]).unwrap();
    let mut beliefs = see_beliefs();
    beliefs[0][0] = point(3, 1);
    let v = check_see_one_shot(&g, &profile, &beliefs, &zero()).unwrap();
    assert!(v.witnesses.iter().any(|w| matches!(w, Witness::Belief { player: 0, .. })));
}

fn full_support_joint(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i64..30, n).prop_map(|w| {
        let t: i64 = w.iter().sum();
        w.into_iter().map(|x| q(x, t)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn see_counterexample_fails_ee_for_full_support_completions(joint in full_support_joint(9)) {
        let g = see_game();
        let profile = g.pure_profile(&[0, 0]).unwrap();
        let full = DependencyDistribution::from_joint(&g, joint, |_, _| unreachable!()).unwrap();
        let dep = DependencyDistribution::from_joint(
            &g,
            ebw_core::policy::point_mass(9, 0),
            |i, a| full.completion(i, a).to_vec(),
        )
        .unwrap();
        prop_assert!(!check_ee_one_shot(&g, &profile, &dep, &zero()).unwrap().pass);
    }
}

#[test]
fn pd_cooperation_is_an_ee_under_the_limit_completion() {
    let g = pd();
    let dep = ParametricJoint::new(
        &g,
        vec![
            (vec![1, 1], Polynomial(vec![q(1, 1), q(-1, 1)])),
            (vec![0, 0], Polynomial(vec![q(0, 1), q(1, 1)])),
        ],
    )
    .unwrap()
    .limit(&g)
    .unwrap();
    let v = check_ee_one_shot(&g, &g.pure_profile(&[1, 1]).unwrap(), &dep, &zero()).unwrap();
    assert!(v.pass, "{:?}", v);
}

#[test]
fn pd_defection_is_an_ee_under_the_decoupled_completion() {
    let g = pd();
    let p = g.pure_profile(&[0, 0]).unwrap();
    let dep = DependencyDistribution::product(&g, &p).unwrap();
    assert!(check_ee_one_shot(&g, &p, &dep, &zero()).unwrap().pass);
    let c = g.pure_profile(&[1, 1]).unwrap();
    let dep = DependencyDistribution::product(&g, &c).unwrap();
    let v = check_ee_one_shot(&g, &c, &dep, &zero()).unwrap();
    assert!(!v.pass);
    // Normalized gap: (3 − 2) / 3.
    match &v.witnesses[0] {
        Witness::Deviation { gap, deviation, .. } => {
            assert_eq!(gap, "1/3");
            assert_eq!(deviation, "D");
        }
        other => panic!("{:?}", other),
    }
}

fn strategy() -> impl Strategy<Value = Vec<Rational>> {
    prop_oneof![
        Just(vec![q(1, 1), q(0, 1)]),
        Just(vec![q(0, 1), q(1, 1)]),
        (1i64..4).prop_map(|k| vec![q(k, 4), q(4 - k, 4)]),
    ]
}

fn game_2x2() -> impl Strategy<Value = NormalFormGame<Rational>> {
    prop::collection::vec(-3i64..4, 8).prop_map(|p| {
        NormalFormGame::bimatrix(
            &["x", "y"],
            &["x", "y"],
            vec![
                vec![(r(p[0]), r(p[1])), (r(p[2]), r(p[3]))],
                vec![(r(p[4]), r(p[5])), (r(p[6]), r(p[7]))],
            ],
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nash_profiles_are_ee_and_ee_is_see(g in game_2x2(), s1 in strategy(), s2 in strategy()) {
        let profile = vec![s1, s2];
        let nash = check_nash(&g, &profile, &zero()).unwrap();
        let dep = DependencyDistribution::product(&g, &profile).unwrap();
        let ee = check_ee_one_shot(&g, &profile, &dep, &zero()).unwrap();
        if nash.pass {
            prop_assert!(ee.pass, "{:?}", ee);
        }
        if ee.pass {
            let players = ee_players_one_shot(&g, &profile, &dep).unwrap();
            let see_players: Vec<_> = players.iter().map(|p| p.as_see_player().unwrap()).collect();
            let see = check_see(&see_players, &OneShot::<Rational>::budget(), &CheckOptions::exact()).unwrap();
            prop_assert!(see.pass, "{:?}", see);
        }
    }
}

#[test]
fn decoupled_see_coincides_with_subjective_nash() {
    let grid = [q(0, 1), q(1, 2), q(1, 1)];
    let strategies: Vec<Vec<Rational>> = grid.iter().map(|p| vec![q(1, 1) - p.clone(), p.clone()]).collect();
    let mut checked = 0;
    let mut passes = 0;
    for code in 0..256u32 {
        let bit = |k: u32| r(((code >> k) & 1) as i64);
        let g = NormalFormGame::bimatrix(
            &["x", "y"],
            &["x", "y"],
            vec![
                vec![(bit(0), bit(1)), (bit(2), bit(3))],
                vec![(bit(4), bit(5)), (bit(6), bit(7))],
            ],
        )
        .unwrap();
        for s1 in &strategies {
            for s2 in &strategies {
                let profile = vec![s1.clone(), s2.clone()];
                for b1 in &strategies {
                    for b2 in &strategies {
                        let xi = vec![b1.clone(), b2.clone()];
                        let sne = check_subjective_nash(&g, &profile, &xi, &zero()).unwrap();
                        let rows = vec![vec![b1.clone(), b1.clone()], vec![b2.clone(), b2.clone()]];
                        let see = check_see_one_shot(&g, &profile, &rows, &zero()).unwrap();
                        assert_eq!(sne.pass, see.pass, "game {} profile {:?} beliefs {:?}", code, profile, xi);
                        checked += 1;
                        passes += see.pass as usize;
                    }
                }
            }
        }
    }
    assert_eq!(checked, 256 * 81);
    assert!(passes > 0);
}

fn binary_sig(depth: usize) -> Signature {
    Signature::new(
        Alphabet::actions(&["a0", "a1"]).unwrap(),
        Alphabet::percepts(&["lo:0", "hi:1"]).unwrap(),
        depth,
    )
    .unwrap()
}

fn constant_universe(depth: usize, percept: usize) -> Arc<dyn Universe<Rational>> {
    let sig = binary_sig(depth);
    let pi: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::deterministic(sig.clone(), |_| 0));
    let nu: Arc<dyn Environment<Rational>> = Arc::new(FnEnvironment::deterministic(sig, move |_, _| percept));
    Arc::new(ebw_core::interact(pi, nu).unwrap().with_factor_completion())
}

fn task() -> DiscountedTask<Rational> {
    DiscountedTask::from_percepts(q(1, 2), &binary_sig(1).percepts).unwrap()
}

#[test]
fn disjoint_ground_truth_fails_on_beliefs() {
    let sig = binary_sig(3);
    let policy: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::deterministic(sig, |_| 0));
    let player = EmbeddedPlayer {
        policy,
        model: constant_universe(3, 0),
        truth: constant_universe(3, 1),
        task: task(),
        at: History::empty(),
    };
    let budget = PlanBudget::horizon(3).unwrap();
    let v = check_epsilon_see(&[player], &q(1, 20), &budget, &CheckOptions::default()).unwrap();
    let beliefs: Vec<_> = v.witnesses.iter().filter(|w| matches!(w, Witness::Belief { .. })).collect();
    assert_eq!(beliefs.len(), 1);
    match beliefs[0] {
        Witness::Belief { distance, .. } => assert_eq!(distance, "1"),
        _ => unreachable!(),
    }
}

#[test]
fn matching_model_passes_epsilon_see_and_see() {
    let sig = binary_sig(3);
    let policy: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::deterministic(sig, |_| 0));
    let player = EmbeddedPlayer {
        policy,
        model: constant_universe(3, 1),
        truth: constant_universe(3, 1),
        task: task(),
        at: History::empty(),
    };
    let budget = PlanBudget::horizon(3).unwrap();
    assert!(check_epsilon_see(&[player.clone()], &zero(), &budget, &CheckOptions::default()).unwrap().pass);
    assert!(check_see(&[player], &budget, &CheckOptions::exact()).unwrap().pass);
}

/// Percept hi with probability p after a1 and lo after a0, at every step.
fn biased_universe(depth: usize, p: Rational, policy: Arc<dyn Policy<Rational>>) -> Arc<dyn Universe<Rational>> {
    let sig = binary_sig(depth);
    let nu: Arc<dyn Environment<Rational>> = Arc::new(FnEnvironment::new(sig, move |_, a| {
        if a == 1 {
            vec![q(1, 1) - p.clone(), p.clone()]
        } else {
            vec![q(1, 1), q(0, 1)]
        }
    }));
    Arc::new(ebw_core::interact(policy, nu).unwrap().with_factor_completion())
}

#[test]
fn corrupted_mixture_fails_scee_with_a_message_witness() {
    let sig = binary_sig(3);
    let policy: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::deterministic(sig, |_| 1));
    let truth = biased_universe(3, q(3, 4), policy.clone());
    let h0 = History::from_turns(vec![(1, 0)]);
    let h1 = History::from_turns(vec![(1, 1)]);
    let device = HistoryDevice::new(vec![(vec![h0], q(1, 4)), (vec![h1], q(3, 4))]).unwrap();
    let budget = PlanBudget::horizon(2).unwrap();
    let good = EmbeddedPlayer {
        policy: policy.clone(),
        model: truth.clone(),
        truth: truth.clone(),
        task: task(),
        at: History::empty(),
    };
    assert!(check_eps_scee(&[good], &device, &q(1, 20), &budget, &CheckOptions::default()).unwrap().pass);
    let corrupted = EmbeddedPlayer {
        policy,
        model: biased_universe(3, q(1, 4), truth_policy()),
        truth,
        task: task(),
        at: History::empty(),
    };
    let v = check_eps_scee(&[corrupted], &device, &q(1, 20), &budget, &CheckOptions::default()).unwrap();
    assert!(!v.pass);
    let w = v.witnesses.iter().find(|w| matches!(w, Witness::Belief { .. })).unwrap();
    match w {
        Witness::Belief { context, .. } => assert!(context == "a1/lo:0" || context == "a1/hi:1", "{}", context),
        _ => unreachable!(),
    }
}

fn truth_policy() -> Arc<dyn Policy<Rational>> {
    Arc::new(FnPolicy::deterministic(binary_sig(3), |_| 1))
}

#[test]
fn delta_slack_admits_near_best_responses() {
    // a1 is worth (1/2)(1/2 + 1/4) = 3/8 and a0 nothing; the planner's own
    // slack at H = 2 is 1/4, so δ must cover the remaining 1/8.
    let sig = binary_sig(2);
    let lazy: Arc<dyn Policy<Rational>> = Arc::new(FnPolicy::deterministic(sig, |_| 0));
    let model = biased_universe(2, q(1, 2), lazy.clone());
    let device = HistoryDevice::new(vec![(vec![History::empty()], q(1, 1))]).unwrap();
    let player = EmbeddedPlayer {
        policy: lazy,
        model: model.clone(),
        truth: model,
        task: task(),
        at: History::empty(),
    };
    let budget = PlanBudget::horizon(2).unwrap();
    let opts = CheckOptions::default();
    assert!(!check_eps_scee(&[player.clone()], &device, &zero(), &budget, &opts).unwrap().pass);
    assert!(check_eps_delta_scee(&[player.clone()], &device, &zero(), &q(1, 8), &budget, &opts).unwrap().pass);
    assert!(!check_eps_delta_scee(&[player], &device, &zero(), &q(1, 16), &budget, &opts).unwrap().pass);
}

#[test]
fn device_needs_a_distribution() {
    assert!(HistoryDevice::<Rational>::new(vec![(vec![History::empty()], q(1, 2))]).is_err());
    assert!(HistoryDevice::<Rational>::new(vec![]).is_err());
}
