mod common;

use std::sync::Arc;

use common::*;
use ebw_bayes::{
    belief_trajectory, closed_form_posterior, predict, trajectory_to_jsonl, update_on_action, update_on_percept,
    BayesError, BeliefState, CompletionMode, HypothesisClass, MixtureUniverse, Prior,
};
use ebw_core::{
    conditional_action, conditional_percept, q, CoreError, FnEnvironment, FnPolicy, History, Rational, Universe,
};
use proptest::prelude::*;

fn always_a0_and_uniform() -> HypothesisClass<Rational> {
    let det = universe(
        Arc::new(FnPolicy::deterministic(sig(3), |_| 0)),
        Arc::new(FnEnvironment::uniform(sig(3))),
    );
    let unif = universe(Arc::new(FnPolicy::uniform(sig(3))), Arc::new(FnEnvironment::uniform(sig(3))));
    HypothesisClass::new(vec![("det".into(), det), ("unif".into(), unif)]).unwrap()
}

#[test]
fn singleton_posterior_stays_one() {
    let u = universe(bern_policy(3, q(1, 3)), bern_env(3, q(1, 2), q(1, 5)));
    let class = HypothesisClass::new(vec![("u".into(), u)]).unwrap();
    let b = BeliefState::from_prior(&Prior::uniform(1));
    let b = update_on_action(&class, &b, 1).unwrap();
    assert_eq!(b.weights(), &[q(1, 1)]);
    let b = update_on_percept(&class, &b, 0).unwrap();
    assert_eq!(b.weights(), &[q(1, 1)]);
}

#[test]
fn action_evidence_shifts_posterior() {
    let class = always_a0_and_uniform();
    let b = BeliefState::from_prior(&Prior::uniform(2));
    assert_eq!(predict(&class, &b).unwrap(), vec![q(3, 4), q(1, 4)]);
    let b = update_on_action(&class, &b, 0).unwrap();
    assert_eq!(b.weights(), &[q(2, 3), q(1, 3)]);
}

#[test]
fn agreeing_environments_leave_posterior_unchanged() {
    let pi = bern_policy(2, q(1, 2));
    let e0 = Arc::new(FnEnvironment::<Rational>::deterministic(sig(2), |_, _| 0));
    let e0_too = Arc::new(FnEnvironment::<Rational>::deterministic(sig(2), |_, a| if a < 2 { 0 } else { 1 }));
    let class = HypothesisClass::new(vec![
        ("x".into(), universe(pi.clone(), e0)),
        ("y".into(), universe(pi, e0_too)),
    ])
    .unwrap();
    let b = BeliefState::from_prior(&Prior::new(vec![q(1, 4), q(3, 4)]).unwrap());
    let b = update_on_action(&class, &b, 1).unwrap();
    let b = update_on_percept(&class, &b, 0).unwrap();
    assert_eq!(b.weights(), &[q(1, 4), q(3, 4)]);
}

#[test]
fn excluded_environment_collapses_posterior() {
    let pi = bern_policy(2, q(1, 2));
    let class = HypothesisClass::new(vec![
        ("says-e0".into(), universe(pi.clone(), Arc::new(FnEnvironment::deterministic(sig(2), |_, _| 0)))),
        ("says-e1".into(), universe(pi, Arc::new(FnEnvironment::deterministic(sig(2), |_, _| 1)))),
    ])
    .unwrap();
    let b = BeliefState::from_prior(&Prior::uniform(2));
    let b = update_on_action(&class, &b, 0).unwrap();
    assert_eq!(predict(&class, &b).unwrap(), vec![q(1, 2), q(1, 2)]);
    let b = update_on_percept(&class, &b, 0).unwrap();
    assert_eq!(b.weights(), &[q(1, 1), q(0, 1)]);
    // The excluded member is retained with weight zero.
    assert_eq!(b.weights().len(), 2);
    // Both members predict actions uniformly, but e1 is now impossible.
    let b = update_on_action(&class, &b, 1).unwrap();
    assert!(matches!(
        update_on_percept(&class, &b, 1),
        Err(BayesError::ZeroPredictiveMass { .. })
    ));
}

#[test]
fn mixture_predictions_match_belief_predictions() {
    let class = always_a0_and_uniform();
    let rho = MixtureUniverse::new(class.clone(), Prior::uniform(2)).unwrap();
    assert_eq!(conditional_action(&rho, &History::empty()).unwrap(), vec![q(3, 4), q(1, 4)]);
    let h = History::from_turns(vec![(0, 1)]);
    // After a0: (2/3, 1/3); percepts uniform in both, so posterior unchanged.
    assert_eq!(rho.posterior(&h).unwrap(), vec![q(2, 3), q(1, 3)]);
    assert_eq!(conditional_action(&rho, &h).unwrap(), vec![q(5, 6), q(1, 6)]);
    assert_eq!(conditional_percept(&rho, &h, 1).unwrap(), vec![q(1, 2), q(1, 2)]);
}

#[test]
fn two_universe_mixture_percept_conditional() {
    // λ0 = (π: a0 w.p. 1−ε, ν: e0 w.p. 1−ε), λ1 = (ε, ε), ε = 1/4, uniform prior.
    let eps = q(1, 4);
    let one = q(1, 1);
    let l0 = universe(bern_policy(1, one.clone() - eps.clone()), bern_env(1, one.clone() - eps.clone(), one.clone() - eps.clone()));
    let l1 = universe(bern_policy(1, eps.clone()), bern_env(1, eps.clone(), eps.clone()));
    // Joint masses enumerated directly.
    let a0e0 = q(1, 2) * (one.clone() - eps.clone()).pow_r(2) + q(1, 2) * eps.clone().pow_r(2);
    let a0e1 = eps.clone() * (one.clone() - eps.clone());
    let oracle = a0e0.clone() / (a0e0 + a0e1);
    assert_eq!(oracle, q(5, 8));
    let rho = MixtureUniverse::new(
        HypothesisClass::new(vec![("l0".into(), l0), ("l1".into(), l1)]).unwrap(),
        Prior::uniform(2),
    )
    .unwrap();
    assert_eq!(conditional_percept(&rho, &History::empty(), 0).unwrap()[0], oracle);
}

trait PowR {
    fn pow_r(self, n: usize) -> Rational;
}

impl PowR for Rational {
    fn pow_r(self, n: usize) -> Rational {
        ebw_core::Scalar::pow(&self, n)
    }
}

#[test]
fn zero_mass_prefix_strict_tremble_and_explicit_completion() {
    let det = |a: usize| {
        universe(
            Arc::new(FnPolicy::deterministic(sig(3), move |_| a)),
            Arc::new(FnEnvironment::deterministic(sig(3), |_, _| 0)),
        )
    };
    let class = HypothesisClass::new(vec![("a0".into(), det(0))]).unwrap();
    let off = History::from_turns(vec![(1, 0)]);

    let strict = MixtureUniverse::new(class.clone(), Prior::uniform(1)).unwrap();
    assert!(matches!(
        conditional_action(&strict, &off),
        Err(CoreError::UndefinedConditional { .. })
    ));
    assert!(matches!(
        conditional_percept(&strict, &History::empty(), 1),
        Err(CoreError::UndefinedConditional { .. })
    ));

    let completion: Arc<dyn Universe<Rational>> = Arc::new(
        ebw_core::interact(
            Arc::new(FnPolicy::uniform(sig(3))),
            Arc::new(FnEnvironment::uniform(sig(3))),
        )
        .unwrap(),
    );
    let explicit = MixtureUniverse::new(class.clone(), Prior::uniform(1))
        .unwrap()
        .with_completion(CompletionMode::Universe(completion))
        .unwrap();
    assert_eq!(conditional_action(&explicit, &off).unwrap(), vec![q(1, 2), q(1, 2)]);

    // The strict members have no completion, so trembling through them still fails;
    // with factor-completed members the carried posterior answers.
    let completed = ebw_core::interact(
        Arc::new(FnPolicy::deterministic(sig(3), |_| 0)),
        Arc::new(FnEnvironment::deterministic(sig(3), |_, _| 0)),
    )
    .unwrap()
    .with_factor_completion();
    let tremble = MixtureUniverse::new(
        HypothesisClass::new(vec![("a0".into(), Arc::new(completed) as Arc<dyn Universe<Rational>>)]).unwrap(),
        Prior::uniform(1),
    )
    .unwrap()
    .with_completion(CompletionMode::Tremble)
    .unwrap();
    assert_eq!(conditional_percept(&tremble, &History::empty(), 1).unwrap(), vec![q(1, 1), q(0, 1)]);
    assert_eq!(conditional_action(&tremble, &off).unwrap(), vec![q(1, 1), q(0, 1)]);
}

#[test]
fn semiprior_posteriors_normalize() {
    let class = always_a0_and_uniform();
    let prior = Prior::new(vec![q(1, 8), q(1, 8)]).unwrap();
    assert!(!prior.is_normalized());
    let rho = MixtureUniverse::new(class, prior).unwrap();
    assert_eq!(rho.mass(&History::empty()).unwrap(), q(1, 4));
    assert_eq!(rho.posterior(&History::empty()).unwrap(), vec![q(1, 2), q(1, 2)]);
    assert_eq!(conditional_action(&rho, &History::empty()).unwrap(), vec![q(3, 4), q(1, 4)]);
}

#[test]
fn invalid_priors_rejected() {
    assert!(Prior::<Rational>::new(vec![q(0, 1), q(1, 2)]).is_err());
    assert!(Prior::<Rational>::new(vec![q(3, 4), q(1, 2)]).is_err());
    assert!(MixtureUniverse::new(always_a0_and_uniform(), Prior::uniform(3)).is_err());
}

#[test]
fn trajectory_export_has_header_and_one_line_per_symbol() {
    let class = always_a0_and_uniform();
    let h = History::from_turns(vec![(0, 1), (0, 0)]);
    let recs = belief_trajectory(&class, &Prior::uniform(2), &h).unwrap();
    assert_eq!(recs.len(), 5);
    assert_eq!(recs[1].weights, vec!["2/3", "1/3"]);
    assert_eq!(recs[3].weights, vec!["4/5", "1/5"]);
    assert_eq!(recs[3].token, "a0");
    let text = trajectory_to_jsonl(class.labels(), &recs);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].contains("ebw-beliefs/1"));
    assert!(lines[2].contains("\"token\":\"a0\""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sequential_updates_match_closed_form(
        pws in prop::collection::vec(prop::collection::vec(0u8..4, 2 * n_histories(3)), 3),
        ews in prop::collection::vec(prop::collection::vec(0u8..4, 4 * n_histories(3)), 3),
        prior_w in prop::collection::vec(1i64..5, 3),
        path in prop::collection::vec((0usize..2, 0usize..2), 3),
    ) {
        let members: Vec<(String, Arc<dyn Universe<Rational>>)> = (0..3)
            .map(|i| (format!("u{}", i), universe(table_policy(3, &pws[i]), table_env(3, &ews[i]))))
            .collect();
        let class = HypothesisClass::new(members).unwrap();
        let total: i64 = prior_w.iter().sum::<i64>() + 1;
        let prior = Prior::new(prior_w.iter().map(|&w| q(w, total)).collect()).unwrap();
        let mut b = BeliefState::from_prior(&prior);
        let mut h = History::empty();
        for (a, e) in path {
            match update_on_action(&class, &b, a).and_then(|b| update_on_percept(&class, &b, e)) {
                Ok(next) => {
                    b = next;
                    h.push(a, e);
                    let closed = closed_form_posterior(&class, &prior, &h).unwrap().unwrap();
                    prop_assert_eq!(b.weights(), &closed[..]);
                }
                Err(BayesError::ZeroPredictiveMass { .. }) => {
                    prop_assert!(closed_form_posterior(&class, &prior, &h.extended(a, e)).unwrap().is_none());
                    break;
                }
                Err(other) => panic!("{other}"),
            }
        }
    }
}
