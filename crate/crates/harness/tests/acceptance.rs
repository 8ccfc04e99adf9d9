//! The twelve acceptance criteria. Each criterion returns a digest of what it
//! measured; the determinism criterion reruns all of them and compares.

use std::collections::HashMap;
use std::sync::Arc;

use ebw_bayes::{
    avg_loss_gap, neg_log_weight, prediction_loss, CompletionMode, HypothesisClass, LogValue, MixtureEnvironment,
    MixtureUniverse, PairClass, Prior,
};
use ebw_core::{
    conditional_action, conditional_percept, interact, q, Alphabet, Environment, History, PerceptPart, Policy,
    Rational, Scalar, Signature, TableEnvironment, TablePolicy, Universe,
};
use ebw_harness::{
    convergence_scan, dogmatic_table, pd_suite, run_self_play, see_not_ee_suite, AgentKind, BudgetSpec, Experiment,
    ExperimentSpec, FirstTime, Injection, TrajectoryRecord,
};
use ebw_planning::{
    best_response, embedded_best_response, k_step_q_values, policy_value, DiscountedTask, KStepPolicy, PlanBudget,
};
use ebw_scenarios::{q_gap_formula, Num, ScenarioId, ScenarioParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn report(n: usize, outcome: &Outcome) -> bool {
    match outcome {
        Ok(_) => println!("criterion {}: pass", n),
        Err(e) => println!("criterion {}: fail ({})", n, e),
    }
    outcome.is_ok()
}

// ---------------------------------------------------------------- twin PD

fn twin_spec(id: ScenarioId, alpha: &str) -> ExperimentSpec {
    let mut p = ScenarioParams::new(id);
    p.alpha = Some(Num::new(alpha).unwrap());
    p.class_k = Some(2);
    p.gamma = Some(Num::new("0").unwrap());
    let mut s = ExperimentSpec::new(p);
    s.rounds = 20;
    s.exact = true;
    s
}

/// Share of the switch points {0, 1, 2, never} consistent with the agent's
/// own past actions, where switch point s defects before round s + 1.
fn m_oracle(own: &[String]) -> Rational {
    let consistent = [Some(0usize), Some(1), Some(2), None]
        .iter()
        .filter(|s| {
            own.iter().enumerate().all(|(t, a)| {
                let cooperates = matches!(s, Some(s) if t >= *s);
                (a == "C") == cooperates
            })
        })
        .count();
    q(consistent as i64, 4)
}

fn criterion_1() -> Outcome {
    let mut digest = String::new();
    // m_k = share of the four switch points still defecting after k rounds.
    let t = ok(ebw_scenarios::twin_pd::<Rational>(2, q(1, 1), 20))?;
    let p = &t.priors[0];
    let expected = [q(1, 1), q(3, 4), q(1, 2), q(1, 4)];
    for (k, m) in expected.iter().enumerate() {
        let got = ok(ebw_scenarios::m_defect(&t.game, p.policies(), p.tilde_w(), k))?;
        ensure(&got == m, || format!("m_{} = {} not {}", k, got, m))?;
        let own: Vec<String> = vec!["D".to_string(); k];
        ensure(&m_oracle(&own) == m, || format!("oracle m_{}", k))?;
    }
    for (alpha, actions) in [
        ("2/5", format!("DD{}", "C".repeat(18))),
        ("3/20", "D".repeat(20)),
        ("11/20", "C".repeat(20)),
    ] {
        let r = ok(run_self_play::<Rational>(&twin_spec(ScenarioId::TwinPd, alpha)))?;
        let a: Rational = ok(Rational::parse_token(alpha))?;
        for i in 0..2 {
            ensure(r.actions_of(i).concat() == actions, || format!("α = {} agent {}: {}", alpha, i, r.actions_of(i).concat()))?;
        }
        for (t, step) in r.steps.iter().enumerate() {
            let own: Vec<String> = r.steps[..t].iter().map(|s| s.actions[0].clone()).collect();
            let m = m_oracle(&own);
            for i in 0..2 {
                let qd: Rational = ok(Rational::parse_token(&step.q_values[i][0]))?;
                let qc: Rational = ok(Rational::parse_token(&step.q_values[i][1]))?;
                // Q values are normalized by the payoff range 3.
                let gap = (qc - qd) * q(3, 1);
                let formula = (a.clone() - (q(1, 1) - a.clone()) * m.clone()) / (a.clone() + (q(1, 1) - a.clone()) * m.clone());
                ensure(gap == formula, || format!("α = {} round {}: gap {} vs {}", alpha, t + 1, gap, formula))?;
                ensure(gap == q_gap_formula(&a, &m), || "library formula".into())?;
            }
        }
        digest.push_str(&r.to_jsonl());
    }
    Ok(digest)
}

fn criterion_2() -> Outcome {
    let mut digest = String::new();
    for alpha in ["2/5", "3/20", "11/20"] {
        let twin = ok(run_self_play::<Rational>(&twin_spec(ScenarioId::TwinPd, alpha)))?;
        let copy = ok(run_self_play::<Rational>(&twin_spec(ScenarioId::CopyPd, alpha)))?;
        ensure(copy.header.agents == ["decoupled-br", "decoupled-br"], || "copy agents".into())?;
        for i in 0..2 {
            ensure(twin.actions_of(i) == copy.actions_of(i), || format!("α = {} agent {}", alpha, i))?;
        }
        digest.push_str(&copy.to_jsonl());
    }
    Ok(digest)
}

// ---------------------------------------------------------------- μ_{R,k}

fn mu_spec(agent: AgentKind, budget: BudgetSpec, eta: Option<&str>) -> ExperimentSpec {
    let mut p = ScenarioParams::new(ScenarioId::MuRk);
    p.gamma = Some(Num::new("1/2").unwrap());
    p.r = Some(Num::new("1/5").unwrap());
    p.k = Some(2);
    p.eps = eta.map(|e| Num::new(e).unwrap());
    let mut s = ExperimentSpec::new(p);
    s.rounds = 30;
    s.agents = vec![agent];
    s.budget = budget;
    s
}

fn rewards(r: &TrajectoryRecord) -> Vec<f64> {
    r.steps
        .iter()
        .map(|s| s.percepts[0].trim_start_matches("o:").parse::<f64>().unwrap())
        .collect()
}

/// (1−γ) Σ_i γ^i r_{from+i} over the recorded rewards.
fn tail_value(rs: &[f64], from: usize, gamma: f64) -> f64 {
    rs[from..].iter().enumerate().map(|(i, r)| (1.0 - gamma) * gamma.powi(i as i32) * r).sum()
}

fn criterion_3() -> Outcome {
    let tol = BudgetSpec {
        horizon: None,
        plan_tol: Some(1e-6),
    };
    let ks = ok(run_self_play::<f64>(&mu_spec(AgentKind::KStep { k: 2 }, tol.clone(), None)))?;
    let br = ok(run_self_play::<f64>(&mu_spec(AgentKind::EmbeddedBr, tol.clone(), None)))?;
    ensure(ks.actions_of(0).iter().all(|a| a == "up"), || format!("k-step {:?}", ks.actions_of(0)))?;
    ensure(br.actions_of(0).iter().all(|a| a == "down"), || format!("embedded-br {:?}", br.actions_of(0)))?;
    let f = |s: &str| s.parse::<f64>().unwrap();
    let first = &ks.steps[0];
    let slack = f(&first.error_bound[0]);
    ensure(slack <= 1e-6, || format!("γ^H = {}", slack))?;
    ensure((f(&first.q_values[0][0]) - 0.2).abs() <= slack, || format!("Q²(up) = {}", first.q_values[0][0]))?;
    ensure(f(&first.q_values[0][1]).abs() <= slack, || format!("Q²(down) = {}", first.q_values[0][1]))?;
    let b = &br.steps[0];
    let gap = f(&b.q_values[0][1]) - f(&b.q_values[0][0]);
    ensure((gap - 0.025).abs() <= 2e-6, || format!("Q*(down) − Q*(up) = {}", gap))?;
    let vk = tail_value(&rewards(&ks), 10, 0.5);
    let vb = tail_value(&rewards(&br), 10, 0.5);
    ensure((vk - 0.2).abs() <= 1e-3, || format!("k-step tail {}", vk))?;
    ensure(vb >= 0.99, || format!("optimal tail {}", vb))?;
    let ks_eta = ok(run_self_play::<f64>(&mu_spec(AgentKind::KStep { k: 2 }, tol.clone(), Some("1/1000"))))?;
    let br_eta = ok(run_self_play::<f64>(&mu_spec(AgentKind::EmbeddedBr, tol, Some("1/1000"))))?;
    ensure(ks_eta.actions_of(0) == ks.actions_of(0), || "perturbed k-step".into())?;
    ensure(br_eta.actions_of(0) == br.actions_of(0), || "perturbed embedded-br".into())?;
    Ok([ks, br, ks_eta, br_eta].iter().map(|r| r.to_jsonl()).collect())
}

// ---------------------------------------------------------------- random classes

fn sig(depth: usize) -> Signature {
    Signature::new(Alphabet::actions(&["a0", "a1"]).unwrap(), Alphabet::percepts(&["e0", "e1"]).unwrap(), depth).unwrap()
}

/// A fully supported probability row with small integer weights.
fn row(rng: &mut ChaCha20Rng) -> Vec<Rational> {
    let a: i64 = rng.gen_range(1..=4);
    let b: i64 = rng.gen_range(1..=4);
    vec![q(a, a + b), q(b, a + b)]
}

fn random_policy(rng: &mut ChaCha20Rng, depth: usize) -> Arc<dyn Policy<Rational>> {
    let rows: HashMap<History, Vec<Rational>> =
        History::all_up_to(depth - 1, 2, 2).into_iter().map(|h| (h, row(rng))).collect();
    Arc::new(TablePolicy::new(sig(depth), rows, true).unwrap())
}

fn random_env(rng: &mut ChaCha20Rng, depth: usize) -> Arc<dyn Environment<Rational>> {
    let mut rows = HashMap::new();
    for h in History::all_up_to(depth - 1, 2, 2) {
        for a in 0..2 {
            rows.insert((h.clone(), a), row(rng));
        }
    }
    Arc::new(TableEnvironment::new(sig(depth), rows, true).unwrap())
}

fn random_universe(rng: &mut ChaCha20Rng, depth: usize) -> Arc<dyn Universe<Rational>> {
    let pi = random_policy(rng, depth);
    let nu = random_env(rng, depth);
    Arc::new(interact(pi, nu).unwrap())
}

fn random_weights(rng: &mut ChaCha20Rng, n: usize, extra: i64) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum::<i64>() + extra;
    raw.iter().map(|&w| q(w, total)).collect()
}

fn max(xs: &[Rational]) -> Rational {
    xs.iter().cloned().fold(xs[0].clone(), Rational::max_of)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut digest = String::new();
    for case in 0..200 {
        let depth = rng.gen_range(2..=4usize);
        let n = rng.gen_range(1..=3usize);
        let members = (0..n).map(|i| (format!("u{}", i), random_universe(&mut rng, depth))).collect();
        let prior = random_weights(&mut rng, n, 0);
        let rho: Arc<dyn Universe<Rational>> =
            Arc::new(ok(MixtureUniverse::new(ok(HypothesisClass::new(members))?, ok(Prior::new(prior))?))?);
        let gamma = if rng.gen_bool(0.5) { q(3, 10) } else { q(7, 10) };
        let rewards = vec![q(rng.gen_range(0..=4), 4), q(rng.gen_range(0..=4), 4)];
        let task = ok(DiscountedTask::new(gamma.clone(), rewards))?;
        let budget = ok(PlanBudget::horizon(depth))?.clamped_to_depth();
        let slack = (0..depth).fold(q(1, 1), |acc, _| acc * gamma.clone());
        let two = slack.clone() * q(2, 1);
        let h = History::empty();
        let qs: Vec<Vec<Rational>> = (1..=4)
            .map(|k| Ok(ok(k_step_q_values(rho.as_ref(), &h, k, &task, &budget))?.into_iter().map(|v| v.value).collect()))
            .collect::<Result<_, String>>()?;
        for k in 0..3 {
            for a in 0..2 {
                ensure(qs[k][a] <= qs[k + 1][a].clone() + two.clone(), || {
                    format!("case {}: Q^{}({}) = {} > Q^{} + 2γ^H", case, k + 1, a, qs[k][a], k + 2)
                })?;
            }
        }
        let v_rho = ok(policy_value(rho.as_ref(), &h, &task, &budget))?.value;
        for k in 1..=3 {
            let pi = Arc::new(ok(KStepPolicy::new(rho.clone(), k, task.clone(), budget))?);
            let rho_pi = ok(interact(pi, Arc::new(PerceptPart(rho.clone()))))?;
            let v_pi = ok(policy_value(&rho_pi, &h, &task, &budget))?.value;
            let best = max(&qs[k - 1]);
            ensure(v_pi >= best.clone() - two.clone(), || format!("case {} k {}: V_ρπ = {} < max Q^k − 2γ^H", case, k, v_pi))?;
            ensure(best.clone() - two.clone() >= v_rho.clone() - slack.clone() * q(4, 1), || {
                format!("case {} k {}: max Q^k − 2γ^H < V_ρ − 4γ^H", case, k)
            })?;
            digest.push_str(&format!("{},{},{};", case, v_pi, best));
        }
    }
    Ok(digest)
}

/// Σ_h λ(h) ln(λ(h) / ρ̄(h)) over histories of length n, ρ̄ = ρ/ρ(ε).
fn kl_oracle(lambda: &dyn Universe<Rational>, rho: &dyn Universe<Rational>, n: usize) -> Result<LogValue, String> {
    let r0 = ok(rho.mass(&History::empty()))?;
    let mut kl = LogValue::zero::<Rational>();
    for h in History::all_of_length(n, 2, 2) {
        let l = ok(lambda.mass(&h))?;
        if !l.is_positive() {
            continue;
        }
        let r = ok(rho.mass(&h))? / r0.clone();
        kl.add_term(&l, &(l.clone() / r));
    }
    Ok(kl)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut digest = String::new();
    for case in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let size = rng.gen_range(1..=5usize);
        let members: Vec<(String, Arc<dyn Universe<Rational>>)> =
            (0..size).map(|i| (format!("u{}", i), random_universe(&mut rng, n))).collect();
        let semi = rng.gen_range(0..=2i64);
        let weights = random_weights(&mut rng, size, semi);
        let rho = ok(MixtureUniverse::new(ok(HypothesisClass::new(members.clone()))?, ok(Prior::new(weights.clone()))?))?;
        for (i, (_, lambda)) in members.iter().enumerate() {
            let r = ok(prediction_loss(&rho, lambda.as_ref(), n))?;
            ensure(r.loss.exact.is_some(), || "exact ledger".into())?;
            ensure(r.loss.at_most(&neg_log_weight(&weights[i]), 0.0), || {
                format!("case {} member {}: L_n = {} > −ln w", case, i, r.loss.approx)
            })?;
            let oracle = kl_oracle(lambda.as_ref(), &rho, n)?;
            ensure(r.loss.equals(&oracle, 0.0), || format!("case {} member {}: L_n ≠ KL", case, i))?;
            ensure(r.kl.equals(&oracle, 0.0), || format!("case {} member {}: reported KL", case, i))?;
            digest.push_str(&format!("{:.12};", r.loss.approx));
        }
    }
    Ok(digest)
}

fn random_pair_class(
    rng: &mut ChaCha20Rng,
    depth: usize,
    np: usize,
    ne: usize,
    weights: Vec<Vec<Rational>>,
) -> Result<(PairClass<Rational>, Vec<Arc<dyn Policy<Rational>>>, Vec<Arc<dyn Environment<Rational>>>), String> {
    let pols: Vec<Arc<dyn Policy<Rational>>> = (0..np).map(|_| random_policy(rng, depth)).collect();
    let envs: Vec<Arc<dyn Environment<Rational>>> = (0..ne).map(|_| random_env(rng, depth)).collect();
    let class = ok(PairClass::new(
        pols.iter().enumerate().map(|(i, p)| (format!("p{}", i), p.clone())).collect(),
        envs.iter().enumerate().map(|(j, e)| (format!("n{}", j), e.clone())).collect(),
        weights,
    ))?;
    Ok((class, pols, envs))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut digest = String::new();
    for case in 0..50 {
        let n = rng.gen_range(1..=3usize);
        let np = rng.gen_range(1..=3usize);
        let ne = rng.gen_range(1..=3usize);
        let mut raw: Vec<Vec<i64>> = (0..np).map(|_| (0..ne).map(|_| rng.gen_range(0..=3)).collect()).collect();
        if raw.iter().flatten().all(|&w| w == 0) {
            raw[0][0] = 1;
        }
        let total: i64 = raw.iter().flatten().sum();
        let weights: Vec<Vec<Rational>> = raw.iter().map(|r| r.iter().map(|&w| q(w, total)).collect()).collect();
        let (class, pols, envs) = random_pair_class(&mut rng, n, np, ne, weights.clone())?;
        let r = ok(avg_loss_gap(&class, n))?;
        // ρ(h) = Σ w_ij λ_ij(h); ρ_d uses the product of the weight marginals.
        let wp: Vec<Rational> = weights.iter().map(|r| r.iter().cloned().sum()).collect();
        let we: Vec<Rational> = (0..ne).map(|j| weights.iter().map(|r| r[j].clone()).sum()).collect();
        let mut kl = LogValue::zero::<Rational>();
        for h in History::all_of_length(n, 2, 2) {
            let mut rho = q(0, 1);
            let mut rho_d = q(0, 1);
            for i in 0..np {
                for j in 0..ne {
                    let m = ok(ok(interact(pols[i].clone(), envs[j].clone()))?.mass(&h))?;
                    rho = rho + weights[i][j].clone() * m.clone();
                    rho_d = rho_d + wp[i].clone() * we[j].clone() * m;
                }
            }
            if rho.is_positive() {
                kl.add_term(&rho, &(rho.clone() / rho_d));
            }
        }
        ensure(r.gap.equals(&kl, 0.0), || format!("case {}: gap {} vs {}", case, r.gap.approx, kl.approx))?;
        ensure(r.kl.equals(&kl, 0.0), || format!("case {}: reported KL", case))?;
        let sign = r.gap.exact_sign().expect("exact").map_err(|e| e.to_string())?;
        ensure(sign != std::cmp::Ordering::Less, || format!("case {}: negative gap", case))?;
        digest.push_str(&format!("{:.12};", r.gap.approx));
    }
    Ok(digest)
}

/// Product of a member's own factors along h.
fn policy_mass(pi: &dyn Policy<Rational>, h: &History) -> Result<Rational, String> {
    let mut m = q(1, 1);
    let mut prefix = History::empty();
    for &(a, e) in h.turns() {
        m = m * ok(pi.dist(&prefix))?[a].clone();
        prefix.push(a, e);
    }
    Ok(m)
}

fn env_mass(nu: &dyn Environment<Rational>, h: &History) -> Result<Rational, String> {
    let mut m = q(1, 1);
    let mut prefix = History::empty();
    for &(a, e) in h.turns() {
        m = m * ok(nu.dist(&prefix, a))?[e].clone();
        prefix.push(a, e);
    }
    Ok(m)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut digest = String::new();
    const DEPTH: usize = 4;
    for case in 0..12 {
        let np = rng.gen_range(1..=3usize);
        let ne = rng.gen_range(1..=3usize);
        let wp = random_weights(&mut rng, np, 0);
        let we = random_weights(&mut rng, ne, 0);
        let weights = wp.iter().map(|a| we.iter().map(|b| a.clone() * b.clone()).collect()).collect();
        let (class, pols, envs) = random_pair_class(&mut rng, DEPTH, np, ne, weights)?;
        ensure(class.is_decoupled(), || format!("case {}: product prior not decoupled", case))?;
        let rho = ok(class.coupled_mixture(CompletionMode::Strict))?;
        for h in History::all_up_to(DEPTH - 1, 2, 2) {
            // ζ(a | h) ∝ Σ_i w_i π_i(h) π_i(a | h); ξ(e | h, a) likewise over environments.
            let pm: Vec<Rational> = pols.iter().map(|p| policy_mass(p.as_ref(), &h)).collect::<Result<_, _>>()?;
            let em: Vec<Rational> = envs.iter().map(|e| env_mass(e.as_ref(), &h)).collect::<Result<_, _>>()?;
            let zn: Rational = (0..np).map(|i| wp[i].clone() * pm[i].clone()).sum();
            let zeta: Vec<Rational> = (0..2)
                .map(|a| {
                    Ok((0..np)
                        .map(|i| Ok(wp[i].clone() * pm[i].clone() * ok(pols[i].dist(&h))?[a].clone()))
                        .collect::<Result<Vec<_>, String>>()?
                        .into_iter()
                        .sum::<Rational>()
                        / zn.clone())
                })
                .collect::<Result<_, String>>()?;
            ensure(ok(conditional_action(&rho, &h))? == zeta, || format!("case {}: action conditional at {}", case, h))?;
            let xn: Rational = (0..ne).map(|j| we[j].clone() * em[j].clone()).sum();
            for a in 0..2 {
                let xi: Vec<Rational> = (0..2)
                    .map(|e| {
                        Ok((0..ne)
                            .map(|j| Ok(we[j].clone() * em[j].clone() * ok(envs[j].dist(&h, a))?[e].clone()))
                            .collect::<Result<Vec<_>, String>>()?
                            .into_iter()
                            .sum::<Rational>()
                            / xn.clone())
                    })
                    .collect::<Result<_, String>>()?;
                ensure(ok(conditional_percept(&rho, &h, a))? == xi, || format!("case {}: percept conditional at {}", case, h))?;
            }
        }
        // Embedded planning on ρ and decoupled planning on ξ choose alike.
        let rho: Arc<dyn Universe<Rational>> = Arc::new(rho);
        let xi = ok(MixtureEnvironment::new(
            envs.iter().enumerate().map(|(j, e)| (format!("n{}", j), e.clone())).collect(),
            we.clone(),
        ))?;
        let task = ok(DiscountedTask::new(q(1, 2), vec![q(rng.gen_range(0..=4), 4), q(rng.gen_range(0..=4), 4)]))?;
        let budget = ok(PlanBudget::horizon(DEPTH))?.clamped_to_depth();
        for h in History::all_up_to(2, 2, 2) {
            let e = ok(embedded_best_response(rho.clone(), &h, &task, &budget))?;
            let d = ok(best_response(&xi, &h, &task, &budget))?;
            ensure(e.action == d.action && e.q_values == d.q_values, || format!("case {}: decisions differ at {}", case, h))?;
            digest.push(if e.action == 0 { '0' } else { '1' });
        }
    }
    Ok(digest)
}

// ---------------------------------------------------------------- one-shot games

fn criterion_8() -> Outcome {
    let s = ok(see_not_ee_suite())?;
    ensure(s.pass(), || "suite expectations".into())?;
    let see = &s.checks[0].verdict;
    ensure(see.concept == "see" && see.pass, || "SEE at zero slack".into())?;
    ensure(see.tolerances.delta.as_deref() == Some("0"), || "nonzero slack".into())?;
    let inf = s.infeasibility.as_ref().expect("infeasibility report");
    let floors: Vec<&str> = inf.floors.iter().map(|f| f.eta.as_str()).collect();
    ensure(floors == ["1/100", "1/1000", "1/10000"], || format!("floors {:?}", floors))?;
    ensure(inf.infeasible_at_all_floors(), || "a floor is feasible".into())?;
    let mut expected = vec!["B,A", "C,A", "A,B", "A,C", "B,B", "C,C", "C,B", "B,C"];
    expected.sort();
    for check in &inf.symbolic {
        let mut got: Vec<&str> = check.forced_zero.iter().map(String::as_str).collect();
        got.sort();
        ensure(got == expected, || format!("forced zeros {:?} at slack {}", got, check.slack))?;
    }
    Ok(serde_json::to_string(&s).unwrap())
}

fn criterion_9() -> Outcome {
    let s = ok(pd_suite())?;
    let by_name = |n: &str| s.checks.iter().find(|c| c.name == n).map(|c| &c.verdict).expect("named check");
    let nash_cc = by_name("nash(C,C)");
    ensure(!nash_cc.pass, || "mutual cooperation passed Nash".into())?;
    let gaps: Vec<String> = nash_cc
        .witnesses
        .iter()
        .filter_map(|w| match w {
            ebw_equilibria::Witness::Deviation { gap, deviation, .. } if deviation == "D" => Some(gap.clone()),
            _ => None,
        })
        .collect();
    ensure(gaps == ["1", "1"], || format!("witness gaps {:?}", gaps))?;
    for name in ["ee(C,C) with limit completion", "cee from dependency(C,C)", "nash(D,D)", "ee(D,D) decoupled"] {
        ensure(by_name(name).pass, || format!("{} failed", name))?;
    }
    Ok(serde_json::to_string(&s).unwrap())
}

fn criterion_10() -> Outcome {
    let mut p = ScenarioParams::new(ScenarioId::Dogmatic);
    p.depth = Some(3);
    p.gamma = Some(Num::new("9/10").unwrap());
    p.eps = Some(Num::new("1/1000").unwrap());
    p.seeds = Some((0..20).collect());
    let spec = ExperimentSpec::new(p);
    let (text, verdicts) = ok(dogmatic_table::<Rational>(&spec))?;
    ensure(verdicts.len() == 20, || "twenty pairs".into())?;
    let gamma_h = q(729, 1000);
    let five_eps = q(5, 1000);
    for (seed, v) in verdicts.iter().enumerate() {
        ensure(v.pass, || format!("seed {} failed", seed))?;
        let slack: Rational = ok(Rational::parse_token(v.tolerances.planning_slack.as_deref().unwrap_or("")))?;
        let allowance: Rational = ok(Rational::parse_token(v.tolerances.delta.as_deref().unwrap_or("")))?;
        ensure(slack.clone() + allowance.clone() <= gamma_h.clone() + five_eps.clone(), || {
            format!("seed {}: slack {} + {}", seed, slack, allowance)
        })?;
    }
    Ok(text)
}

// ---------------------------------------------------------------- convergence

fn criterion_11() -> Outcome {
    let s = twin_spec(ScenarioId::TwinPd, "2/5");
    let exp = ok(Experiment::<Rational>::build(&s))?;
    let r = ok(exp.run())?;
    let report = ok(convergence_scan(&exp, &r, &q(1, 20), 3))?;
    let t = report.t_eps.step().ok_or("T(0.05) not reached")?;
    ensure(t <= r.len(), || "T beyond the run".into())?;
    let see = report.verdicts_at_t.iter().find(|v| v.concept == "epsilon-see").ok_or("no ε-SEE verdict")?;
    ensure(see.pass, || format!("tail ε-SEE failed at {}", t))?;
    let mut bad = s.clone();
    bad.inject = Some(Injection::AlternatingCoPlayer);
    let exp_bad = ok(Experiment::<Rational>::build(&bad))?;
    let r_bad = ok(exp_bad.run())?;
    let report_bad = ok(convergence_scan(&exp_bad, &r_bad, &q(1, 20), 3))?;
    ensure(report_bad.t_eps == FirstTime::NotReached, || format!("injected run reached at {}", report_bad.t_eps))?;
    ensure(report_bad.to_json().contains("\"not reached\""), || "report wording".into())?;
    Ok(report.to_json() + &report_bad.to_json())
}

const CRITERIA: [fn() -> Outcome; 11] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8,
    criterion_9, criterion_10, criterion_11,
];

fn check(n: usize) {
    let outcome = CRITERIA[n - 1]();
    assert!(report(n, &outcome), "criterion {}: {:?}", n, outcome.err());
}

#[test]
fn criterion_01_twin_pd_onset() {
    check(1);
}

#[test]
fn criterion_02_copy_mixture_equivalence() {
    check(2);
}

#[test]
fn criterion_03_mu_rk_divergence() {
    check(3);
}

#[test]
fn criterion_04_planning_properties() {
    check(4);
}

#[test]
fn criterion_05_solomonoff_bound() {
    check(5);
}

#[test]
fn criterion_06_loss_gap_identity() {
    check(6);
}

#[test]
fn criterion_07_decoupled_prior_equivalence() {
    check(7);
}

#[test]
fn criterion_08_see_not_ee() {
    check(8);
}

#[test]
fn criterion_09_pd_equilibrium_algebra() {
    check(9);
}

#[test]
fn criterion_10_dogmatic_trap() {
    check(10);
}

#[test]
fn criterion_11_convergence_scan() {
    check(11);
}

#[test]
fn criterion_12_determinism() {
    let mut failures = Vec::new();
    for (i, f) in CRITERIA.iter().enumerate() {
        match (f(), f()) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => failures.push(format!("criterion {} differs between runs", i + 1)),
            _ => failures.push(format!("criterion {} errored", i + 1)),
        }
    }
    let outcome: Outcome = if failures.is_empty() { Ok(String::new()) } else { Err(failures.join("; ")) };
    assert!(report(12, &outcome), "{:?}", outcome.err());
}
