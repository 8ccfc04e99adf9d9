use ebw_core::{q, History, Rational};
use ebw_scenarios::*;
use proptest::prelude::*;

fn history(m: &MuRk<Rational>, actions: &[usize]) -> History {
    let mut h = History::empty();
    for &a in actions {
        let e = m.percept(&h, a);
        h.push(a, e);
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exactly_one_percept_has_mass_one(
        k in 1usize..4,
        actions in prop::collection::vec(0usize..2, 0..7),
        a in 0usize..2,
    ) {
        let m = MuRk::new(q(1, 5), k, 8).unwrap();
        let h = history(&m, &actions);
        let d = m.environment().dist(&h, a).unwrap();
        prop_assert_eq!(d.iter().filter(|x| **x == q(1, 1)).count(), 1);
        prop_assert_eq!(d.iter().filter(|x| **x == q(0, 1)).count(), d.len() - 1);
        prop_assert_eq!(d[m.percept(&h, a)].clone(), q(1, 1));
    }

    #[test]
    fn perturbation_stays_within_eta(
        actions in prop::collection::vec(0usize..2, 0..5),
        a in 0usize..2,
        eta in 1i64..100,
    ) {
        let m = MuRk::new(q(1, 5), 2, 6).unwrap();
        let eta = q(eta, 100);
        let h = history(&m, &actions);
        let base = m.environment().dist(&h, a).unwrap();
        let pert = m.perturbed(&eta).unwrap().dist(&h, a).unwrap();
        let tv: Rational = base.iter().zip(&pert).map(|(x, y)| if x > y { x - y } else { y - x }).sum::<Rational>() / q(2, 1);
        prop_assert!(tv <= eta);
        prop_assert!(pert.iter().all(|x| *x > q(0, 1)));
    }
}

#[test]
fn streaks_of_downs_pay_once_longer_than_k() {
    let m = MuRk::new(q(1, 5), 3, 8).unwrap();
    let h = history(&m, &[DOWN, DOWN, DOWN]);
    assert_eq!(m.percept(&h, DOWN), ONE);
    assert_eq!(m.percept(&h, UP), ZERO);
    let h = history(&m, &[DOWN, DOWN]);
    assert_eq!(m.percept(&h, DOWN), ZERO);
    let h = history(&m, &[DOWN, DOWN, DOWN, UP, DOWN, DOWN, DOWN]);
    assert_eq!(m.percept(&h, DOWN), ONE);
}

#[test]
fn reward_labels_carry_r() {
    let m = MuRk::<Rational>::new(q(1, 5), 2, 3).unwrap();
    let labels = m.signature().percepts.labels();
    assert_eq!(labels[ZERO], "o:0");
    assert_eq!(labels[SAFE], "o:1/5");
    assert_eq!(labels[ONE], "o:1");
}

#[test]
fn self_model_is_complete_off_policy() {
    let m = MuRk::<Rational>::new(q(1, 5), 2, 4).unwrap();
    let u = m.self_model(m.pi_up(), m.environment()).unwrap();
    let h = history(&m, &[DOWN]);
    let d = ebw_core::Universe::percept_dist(&u, &h, DOWN).unwrap();
    assert_eq!(d[ZERO], q(1, 1));
}

#[test]
fn params_parse_from_toml_and_json() {
    let p: ScenarioParams = toml::from_str("id = \"mu-rk\"\nr = \"1/4\"\nk = 3\ngamma = 0.5\n").unwrap();
    assert_eq!(p.id, ScenarioId::MuRk);
    assert_eq!(p.r::<Rational>().unwrap(), q(1, 4));
    assert_eq!(p.gamma::<Rational>().unwrap(), q(1, 2));
    assert_eq!(p.k(), 3);
    p.validate().unwrap();
    let j: ScenarioParams = serde_json::from_str(r#"{"id":"twin-pd","alpha":"0.4"}"#).unwrap();
    assert_eq!(j.alpha::<Rational>().unwrap(), q(2, 5));
    assert!(serde_json::from_str::<ScenarioParams>(r#"{"id":"twin-pd","beta":1}"#).is_err());
    assert!(serde_json::from_str::<ScenarioParams>(r#"{"id":"nope"}"#).is_err());
    let back: ScenarioParams = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
    assert_eq!(back, j);
}
