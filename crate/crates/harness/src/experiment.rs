//! The agent loop: act, observe, update beliefs, with ground truth given by
//! the co-players' actual policies or the scenario's environment.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ebw_bayes::{CompletionMode, HypothesisClass, MixtureEnvironment, MixtureUniverse, Prior};
use ebw_core::{
    interact, policy::point_mass, total_variation_k, Alphabet, BlendPolicy, CoreError, Environment, FnPolicy,
    History, Policy, Scalar, Signature, TableEnvironment, TablePolicy, Universe,
};
use ebw_planning::{
    approx_agent_step, best_response, embedded_best_response, k_step_action, Decision, DiscountedTask, PlanBudget,
    PlanningError,
};
use ebw_scenarios::{dogmatic_mixture, twin_pd, MuRk, RepeatedGame, ScenarioId, COOPERATE, DEFECT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{config, HarnessError, Result};
use crate::record::{RecordHeader, StepRecord, TrajectoryRecord, TRAJECTORY_SCHEMA};
use crate::spec::{AgentKind, ExperimentSpec, Injection};

/// An agent's belief model.
#[derive(Clone)]
pub enum BeliefModel<P: Scalar> {
    /// A mixture universe over policy-environment pairs.
    Universe(Arc<MixtureUniverse<P>>),
    /// A decoupled environment mixture ξ.
    Environment(Arc<MixtureEnvironment<P>>),
}

/// A planning agent; decisions are cached per personal history.
pub struct Agent<P: Scalar> {
    kind: AgentKind,
    model: BeliefModel<P>,
    task: DiscountedTask<P>,
    budget: PlanBudget,
    sig: Signature,
    cache: Mutex<HashMap<History, Decision<P>>>,
}

fn planning_to_core(e: PlanningError) -> CoreError {
    match e {
        PlanningError::Core(c) => c,
        other => CoreError::InvalidDistribution(other.to_string()),
    }
}

impl<P: Scalar> Agent<P> {
    pub fn new(kind: AgentKind, model: BeliefModel<P>, task: DiscountedTask<P>, budget: PlanBudget) -> Result<Self> {
        let sig = match &model {
            BeliefModel::Universe(u) => u.signature().clone(),
            BeliefModel::Environment(e) => e.signature().clone(),
        };
        match (&kind, &model) {
            (AgentKind::DecoupledBr, BeliefModel::Universe(_)) => {
                return Err(config("decoupled-br agents need an environment mixture"))
            }
            (AgentKind::KStep { .. } | AgentKind::Approx { .. }, BeliefModel::Environment(_)) => {
                return Err(config("k-step and approx agents need a mixture universe"))
            }
            _ => {}
        }
        Ok(Agent {
            kind,
            model,
            task,
            budget,
            sig,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn kind(&self) -> &AgentKind {
        &self.kind
    }

    pub fn model(&self) -> &BeliefModel<P> {
        &self.model
    }

    pub fn task(&self) -> &DiscountedTask<P> {
        &self.task
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn decide(&self, h: &History) -> std::result::Result<Decision<P>, PlanningError> {
        if let Some(d) = self.cache.lock().expect("cache poisoned").get(h) {
            return Ok(d.clone());
        }
        let t = h.len() + 1;
        let d = match (&self.kind, &self.model) {
            (AgentKind::EmbeddedBr, BeliefModel::Universe(u)) => {
                embedded_best_response(u.clone(), h, &self.task, &self.budget)?
            }
            (AgentKind::EmbeddedBr | AgentKind::DecoupledBr, BeliefModel::Environment(e)) => {
                best_response(e.as_ref(), h, &self.task, &self.budget)?
            }
            (AgentKind::KStep { k }, BeliefModel::Universe(u)) => {
                k_step_action(u.as_ref(), h, *k, &self.task, &self.budget)?
            }
            (AgentKind::Approx { .. }, BeliefModel::Universe(u)) => {
                let (k, eps) = self
                    .kind
                    .schedule::<P>(t)
                    .map_err(|e| PlanningError::InvalidBudget(e.to_string()))?;
                approx_agent_step(u.as_ref(), h, k, &eps, &self.task, &self.budget)?
            }
            _ => return Err(PlanningError::InvalidBudget("agent kind does not match its model".into())),
        };
        self.cache.lock().expect("cache poisoned").insert(h.clone(), d.clone());
        Ok(d)
    }

    /// Posterior weights of the mixture members after `h`.
    pub fn posterior(&self, h: &History) -> Result<Vec<P>> {
        match &self.model {
            BeliefModel::Universe(u) => Ok(u.posterior(h)?),
            BeliefModel::Environment(e) => Ok(e
                .posterior(h)?
                .map(|w| w.as_ref().clone())
                .unwrap_or_else(|| vec![P::zero(); e.labels().len()])),
        }
    }

    pub fn posterior_labels(&self) -> Vec<String> {
        match &self.model {
            BeliefModel::Universe(u) => u.class().labels().to_vec(),
            BeliefModel::Environment(e) => e.labels().to_vec(),
        }
    }
}

/// The agent as the deterministic policy it implements.
pub struct AgentPolicy<P: Scalar>(pub Arc<Agent<P>>);

impl<P: Scalar> Policy<P> for AgentPolicy<P> {
    fn signature(&self) -> &Signature {
        &self.0.sig
    }

    fn dist(&self, h: &History) -> ebw_core::Result<Vec<P>> {
        let d = self.0.decide(h).map_err(planning_to_core)?;
        Ok(point_mass(self.0.sig.n_actions(), d.action))
    }
}

/// How percepts are generated.
#[derive(Clone)]
pub enum World<P: Scalar> {
    /// Two players of a repeated game, each the other's co-player unless a
    /// fixed co-player is injected.
    Repeated {
        game: RepeatedGame<P>,
        co_player: Option<Vec<Arc<dyn Policy<P>>>>,
    },
    /// One agent in an environment.
    Single { env: Arc<dyn Environment<P>> },
}

/// A built experiment: agents, their subjective models and the ground truth.
pub struct Experiment<P: Scalar> {
    spec: ExperimentSpec,
    agents: Vec<Arc<Agent<P>>>,
    policies: Vec<Arc<dyn Policy<P>>>,
    truths: Vec<Arc<dyn Universe<P>>>,
    models: Vec<Arc<dyn Universe<P>>>,
    world: World<P>,
    budget: PlanBudget,
}

fn alternating<P: Scalar>(sig: Signature) -> Arc<dyn Policy<P>> {
    Arc::new(FnPolicy::deterministic(sig, |h| if h.len() % 2 == 0 { COOPERATE } else { DEFECT }))
}

fn one_member_mixture<P: Scalar>(label: &str, u: Arc<dyn Universe<P>>) -> Result<Arc<MixtureUniverse<P>>> {
    let class = HypothesisClass::new(vec![(label.to_string(), u)])?;
    Ok(Arc::new(
        MixtureUniverse::new(class, Prior::new(vec![P::one()])?)?.with_completion(CompletionMode::Tremble)?,
    ))
}

/// Random deterministic π and fully supported μ drawn from the seed.
pub fn random_pair<P: Scalar>(sig: &Signature, seed: u64) -> Result<(Arc<dyn Policy<P>>, Arc<dyn Environment<P>>)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let na = sig.n_actions();
    let ne = sig.n_percepts();
    let mut prows = HashMap::new();
    let mut erows = HashMap::new();
    for h in History::all_up_to(sig.depth - 1, na, ne) {
        prows.insert(h.clone(), point_mass(na, rng.gen_range(0..na)));
        for a in 0..na {
            let w: Vec<i64> = (0..ne).map(|_| rng.gen_range(1..=4)).collect();
            let t: i64 = w.iter().sum();
            erows.insert((h.clone(), a), w.into_iter().map(|x| P::from_ratio(x, t)).collect());
        }
    }
    Ok((
        Arc::new(TablePolicy::new(sig.clone(), prows, true)?),
        Arc::new(TableEnvironment::new(sig.clone(), erows, true)?),
    ))
}

/// Signature of the dogmatic scenario at the given depth.
pub fn dogmatic_signature(depth: usize) -> Result<Signature> {
    Ok(Signature::new(
        Alphabet::actions(&["a", "b"])?,
        Alphabet::percepts(&["o:0", "o:1/2", "o:1"])?,
        depth,
    )?)
}

/// Index drawn from `dist` with the uniform `u`; point masses ignore `u`.
pub fn sample_index<P: Scalar>(dist: &[P], u: f64) -> usize {
    if let Some(i) = dist.iter().position(|p| *p == P::one()) {
        return i;
    }
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in dist.iter().enumerate() {
        if !p.is_positive() {
            continue;
        }
        acc += p.to_f64();
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

impl<P: Scalar> Experiment<P> {
    pub fn build(spec: &ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let params = &spec.scenario;
        let budget = spec.plan_budget()?;
        let gamma: P = params.gamma()?;
        let kinds = spec.agent_kinds();
        let mut agents = Vec::new();
        let world;
        match spec.id() {
            ScenarioId::TwinPd | ScenarioId::CopyPd => {
                let t = twin_pd::<P>(params.class_k(), params.alpha()?, spec.rounds)?;
                for (i, kind) in kinds.iter().enumerate() {
                    let prior = &t.priors[i];
                    let model = match kind {
                        AgentKind::DecoupledBr => BeliefModel::Environment(Arc::new(prior.copy_mixture()?)),
                        _ => BeliefModel::Universe(Arc::new(prior.mixture()?)),
                    };
                    let task = DiscountedTask::from_percepts(gamma.clone(), &t.game.signature(i).percepts)?;
                    agents.push(Arc::new(Agent::new(kind.clone(), model, task, budget)?));
                }
                let co_player = spec.inject.map(|Injection::AlternatingCoPlayer| {
                    (0..2).map(|i| alternating::<P>(t.game.signature(1 - i).clone())).collect()
                });
                world = World::Repeated { game: t.game, co_player };
            }
            ScenarioId::MuRk => {
                let horizon = budget.steps(gamma.to_f64());
                let m = MuRk::<P>::new(params.r()?, params.k(), spec.rounds + horizon)?;
                let eta: P = params.eps()?;
                let (pi, env) = if eta.is_positive() {
                    let uniform: Arc<dyn Policy<P>> = Arc::new(FnPolicy::uniform(m.signature().clone()));
                    let pi: Arc<dyn Policy<P>> = Arc::new(BlendPolicy::new(vec![
                        (P::one() - eta.clone(), m.pi_up()),
                        (eta.clone(), uniform),
                    ])?);
                    (pi, m.perturbed(&eta)?)
                } else {
                    (m.pi_up(), m.environment())
                };
                let model = one_member_mixture("up-self-model", Arc::new(m.self_model(pi, env)?))?;
                let task = DiscountedTask::from_percepts(gamma, &m.signature().percepts)?;
                agents.push(Arc::new(Agent::new(kinds[0].clone(), BeliefModel::Universe(model), task, budget)?));
                world = World::Single { env: m.environment() };
            }
            ScenarioId::Dogmatic => {
                if spec.rounds > params.depth() {
                    return Err(config(format!("rounds {} exceed the scenario depth {}", spec.rounds, params.depth())));
                }
                let sig = dogmatic_signature(params.depth())?;
                let task = DiscountedTask::from_percepts(gamma, &sig.percepts)?;
                let (pi, mu) = random_pair::<P>(&sig, spec.seed)?;
                let model = Arc::new(dogmatic_mixture(pi, mu.clone(), &task, &params.eps()?)?);
                agents.push(Arc::new(Agent::new(kinds[0].clone(), BeliefModel::Universe(model), task, budget)?));
                world = World::Single { env: mu };
            }
            ScenarioId::Pd | ScenarioId::SeeNotEe => unreachable!("rejected by validate"),
        }
        let policies: Vec<Arc<dyn Policy<P>>> =
            agents.iter().map(|a| Arc::new(AgentPolicy(a.clone())) as Arc<dyn Policy<P>>).collect();
        let mut truths: Vec<Arc<dyn Universe<P>>> = Vec::new();
        let mut models: Vec<Arc<dyn Universe<P>>> = Vec::new();
        for (i, agent) in agents.iter().enumerate() {
            let env: Arc<dyn Environment<P>> = match &world {
                World::Repeated { game, co_player } => {
                    let co = match co_player {
                        Some(c) => c[i].clone(),
                        None => policies[1 - i].clone(),
                    };
                    Arc::new(game.opponent_environment(i, co)?)
                }
                World::Single { env } => env.clone(),
            };
            truths.push(Arc::new(interact(policies[i].clone(), env)?.with_factor_completion()));
            models.push(match agent.model() {
                BeliefModel::Universe(u) => u.clone(),
                BeliefModel::Environment(e) => {
                    Arc::new(interact(policies[i].clone(), e.clone())?.with_factor_completion())
                }
            });
        }
        Ok(Experiment {
            spec: spec.clone(),
            agents,
            policies,
            truths,
            models,
            world,
            budget,
        })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn agents(&self) -> &[Arc<Agent<P>>] {
        &self.agents
    }

    /// The agents' policies π^i.
    pub fn policies(&self) -> &[Arc<dyn Policy<P>>] {
        &self.policies
    }

    /// Ground truths (μ^i)^{π^i}.
    pub fn truths(&self) -> &[Arc<dyn Universe<P>>] {
        &self.truths
    }

    /// Subjective universes ρ^i; decoupled agents pair ξ with their policy.
    pub fn models(&self) -> &[Arc<dyn Universe<P>>] {
        &self.models
    }

    pub fn world(&self) -> &World<P> {
        &self.world
    }

    pub fn budget(&self) -> &PlanBudget {
        &self.budget
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    /// D_k(ρ^i, truth | h), with k capped at the remaining depth.
    pub fn belief_distance(&self, i: usize, h: &History, k_scan: usize) -> Result<P> {
        let room = self.models[i].signature().depth.saturating_sub(h.len());
        let k = k_scan.min(room);
        if k == 0 {
            return Ok(P::zero());
        }
        Ok(total_variation_k(self.models[i].as_ref(), self.truths[i].as_ref(), h, k)?)
    }

    fn decide(&self, i: usize, h: &History, step: usize) -> Result<Decision<P>> {
        self.agents[i].decide(h).map_err(|e| match e {
            PlanningError::Core(CoreError::UndefinedConditional { history, action }) => {
                HarnessError::ZeroPredictiveMass {
                    step,
                    detail: format!("agent {} at {} (action {:?})", i, history, action),
                }
            }
            other => other.into(),
        })
    }

    /// Runs the agent loop for the configured number of rounds.
    pub fn run(&self) -> Result<TrajectoryRecord> {
        let n = self.n_agents();
        let mut rng = ChaCha20Rng::seed_from_u64(self.spec.seed);
        let mut hs = vec![History::empty(); n];
        let mut steps = Vec::new();
        for t in 1..=self.spec.rounds {
            let mut decisions = Vec::new();
            let mut posteriors = Vec::new();
            let mut dks = Vec::new();
            for i in 0..n {
                posteriors.push(self.agents[i].posterior(&hs[i])?.iter().map(|w| w.token()).collect());
                dks.push(self.belief_distance(i, &hs[i], self.spec.k_scan)?.token());
                decisions.push(self.decide(i, &hs[i], t)?);
            }
            let uniforms: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let actions: Vec<usize> = decisions.iter().map(|d| d.action).collect();
            let percepts: Vec<usize> = match &self.world {
                World::Repeated { game, co_player } => (0..2)
                    .map(|i| {
                        let co = match co_player {
                            Some(c) => {
                                let mirrored = game.mirror(i, &hs[i]);
                                sample_index(&c[i].dist(&mirrored)?, uniforms[i])
                            }
                            None => actions[1 - i],
                        };
                        Ok(game.percept(i, actions[i], co))
                    })
                    .collect::<Result<Vec<_>>>()?,
                World::Single { env } => vec![sample_index(&env.dist(&hs[0], actions[0])?, uniforms[0])],
            };
            let sigs: Vec<&Signature> = self.agents.iter().map(|a| a.signature()).collect();
            steps.push(StepRecord {
                t,
                actions: (0..n).map(|i| sigs[i].actions.label(actions[i]).to_string()).collect(),
                percepts: (0..n).map(|i| sigs[i].percepts.label(percepts[i]).to_string()).collect(),
                chosen_q: decisions.iter().map(|d| d.chosen_q().token()).collect(),
                q_values: decisions.iter().map(|d| d.q_values.iter().map(|x| x.token()).collect()).collect(),
                error_bound: decisions.iter().map(|d| d.error_bound.token()).collect(),
                posteriors,
                d_k: dks,
                uniforms,
            });
            for i in 0..n {
                hs[i].push(actions[i], percepts[i]);
            }
        }
        Ok(TrajectoryRecord {
            header: RecordHeader {
                schema: TRAJECTORY_SCHEMA.to_string(),
                scenario: self.spec.id().to_string(),
                backend: P::BACKEND.to_string(),
                seed: self.spec.seed,
                rounds: self.spec.rounds,
                k_scan: self.spec.k_scan,
                agents: self.agents.iter().map(|a| a.kind().label()).collect(),
                posterior_labels: self.agents.iter().map(|a| a.posterior_labels()).collect(),
            },
            steps,
            turns: hs.iter().map(|h| h.turns().to_vec()).collect(),
        })
    }

    /// Personal histories h_{<t} of every agent, rebuilt from the record.
    pub fn histories_before(&self, record: &TrajectoryRecord, t: usize) -> Result<Vec<History>> {
        if t == 0 || t > record.len() + 1 {
            return Err(HarnessError::IndexBounds { t, len: record.len() });
        }
        (0..self.n_agents())
            .map(|i| {
                let sig = self.agents[i].signature();
                let turns = record.steps[..t - 1]
                    .iter()
                    .map(|s| Ok((sig.actions.index_of(&s.actions[i])?, sig.percepts.index_of(&s.percepts[i])?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(History::from_turns(turns))
            })
            .collect()
    }
}

/// Builds and runs `spec`.
pub fn run_self_play<P: Scalar>(spec: &ExperimentSpec) -> Result<TrajectoryRecord> {
    Experiment::<P>::build(spec)?.run()
}
