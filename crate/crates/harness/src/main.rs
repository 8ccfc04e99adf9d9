use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ebw_core::{Rational, Scalar};
use ebw_harness::{
    convergence_scan, multi_seed_scan, pd_suite, scenario_table, see_not_ee_suite, Experiment, ExperimentSpec,
    HarnessError, OutputFormat, SuiteReport, VerifyRequest,
};
use ebw_scenarios::{Num, ScenarioId, ScenarioParams};

#[derive(Parser)]
#[command(name = "ebw", version, about = "Embedded Bayesian agents: experiments and equilibrium checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a self-play experiment and write its trajectory record.
    Run(Common),
    /// Check an equilibrium: a serialized request, or a built-in suite.
    Verify(VerifyArgs),
    /// Run an experiment and report its convergence scan.
    Scan(ScanArgs),
    /// Emit a scenario's serialized tables.
    Scenario(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment document (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario id: twin-pd, copy-pd, mu-rk, dogmatic, see-not-ee, pd.
    #[arg(long)]
    scenario: Option<String>,
    /// Twin weight α of the twin and copy PD priors.
    #[arg(long)]
    alpha: Option<String>,
    /// Discount factor γ.
    #[arg(long)]
    gamma: Option<String>,
    /// Planning depth k of the μ_{R,k} scenario and k-step agents.
    #[arg(long)]
    k: Option<usize>,
    /// Number of rounds.
    #[arg(long)]
    steps: Option<usize>,
    /// Planning horizon H.
    #[arg(long, conflicts_with = "plan_tol")]
    horizon: Option<usize>,
    /// Planning tolerance; the horizon is the smallest H with γ^H ≤ tol.
    #[arg(long)]
    plan_tol: Option<f64>,
    /// Belief-closeness threshold ε of scans and verdicts.
    #[arg(long)]
    eps: Option<String>,
    /// Best-response slack δ of tail equilibrium checks.
    #[arg(long)]
    delta: Option<String>,
    /// Seed of the run's random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Rational arithmetic instead of f64.
    #[arg(long)]
    exact: bool,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Serialized verification request (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScanArgs {
    /// Scan every seed of the spec's seed list and report the pass rate.
    #[arg(long)]
    multi_seed: bool,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(String),
    Verdict,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn num(s: &str) -> Result<Num, Failure> {
    Num::new(s).map_err(|e| usage(e.to_string()))
}

impl Common {
    fn spec(&self) -> Result<ExperimentSpec, Failure> {
        let mut spec = match (&self.config, &self.scenario) {
            (Some(path), _) => ExperimentSpec::load(path)?,
            (None, Some(id)) => {
                let id: ScenarioId = id.parse().map_err(|e: ebw_scenarios::ScenarioError| usage(e.to_string()))?;
                ExperimentSpec::new(ScenarioParams::new(id))
            }
            (None, None) => return Err(usage("give --config or --scenario")),
        };
        if let (Some(_), Some(id)) = (&self.config, &self.scenario) {
            spec.scenario.id = id.parse().map_err(|e: ebw_scenarios::ScenarioError| usage(e.to_string()))?;
        }
        if let Some(a) = &self.alpha {
            spec.scenario.alpha = Some(num(a)?);
        }
        if let Some(g) = &self.gamma {
            spec.scenario.gamma = Some(num(g)?);
        }
        if let Some(k) = self.k {
            spec.scenario.k = Some(k);
        }
        if let Some(s) = self.steps {
            spec.rounds = s;
        }
        if let Some(h) = self.horizon {
            spec.budget.horizon = Some(h);
            spec.budget.plan_tol = None;
        }
        if let Some(e) = self.plan_tol {
            spec.budget.plan_tol = Some(e);
            spec.budget.horizon = None;
        }
        if let Some(e) = &self.eps {
            spec.tolerances.eps = num(e)?;
        }
        if let Some(d) = &self.delta {
            spec.tolerances.delta = num(d)?;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if self.exact {
            spec.exact = true;
        }
        if let Some(f) = self.format {
            spec.output.format = f;
        }
        if let Some(o) = &self.out {
            spec.output.path = Some(o.clone());
        }
        Ok(spec)
    }
}

fn emit(spec: &ExperimentSpec, text: &str) -> Result<(), Failure> {
    match &spec.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn verdict_exit(pass: bool) -> Result<(), Failure> {
    if pass {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn run<P: Scalar>(spec: &ExperimentSpec) -> Result<(), Failure> {
    let record = Experiment::<P>::build(spec)?.run()?;
    emit(spec, &record.render(spec.output.format)?)
}

fn scan<P: Scalar>(spec: &ExperimentSpec, multi: bool) -> Result<(), Failure> {
    if multi {
        let report = multi_seed_scan::<P>(spec)?;
        emit(spec, &(serde_json::to_string(&report).expect("reports serialize") + "\n"))?;
        return verdict_exit(report.passed == report.runs.len());
    }
    let exp = Experiment::<P>::build(spec)?;
    let record = exp.run()?;
    let eps: P = spec.tolerances.eps.value().map_err(HarnessError::from)?;
    let report = convergence_scan(&exp, &record, &eps, spec.k_scan)?;
    let text = match spec.output.format {
        OutputFormat::Jsonl => report.to_json() + "\n",
        OutputFormat::Csv => {
            let mut s = format!(
                "# {} scenario={} seed={} eps={} k_scan={} t_eps={}\nt,{}\n",
                report.schema,
                report.scenario,
                report.seed,
                report.eps,
                report.k_scan,
                report.t_eps,
                (0..exp.n_agents()).map(|i| format!("d_k_{}", i)).collect::<Vec<_>>().join(",")
            );
            for (t, row) in report.d_k.iter().enumerate() {
                s.push_str(&format!("{},{}\n", t + 1, row.join(",")));
            }
            s
        }
    };
    emit(spec, &text)?;
    verdict_exit(report.pass())
}

fn scenario<P: Scalar>(spec: &ExperimentSpec) -> Result<(), Failure> {
    let table = scenario_table::<P>(spec)?;
    emit(spec, &table.text)?;
    verdict_exit(table.pass)
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let c = &args.common;
    let exact = c.exact;
    let write = |text: String| -> Result<(), Failure> {
        match &c.out {
            Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {}", p.display(), e))),
            None => {
                print!("{}", text);
                Ok(())
            }
        }
    };
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {}", path.display(), e)))?;
        let req = VerifyRequest::from_json(&text)?;
        let eps = c.eps.as_deref();
        let v = if exact { req.run::<Rational>(eps)? } else { req.run::<f64>(eps)? };
        write(v.to_json() + "\n")?;
        return verdict_exit(v.pass);
    }
    let report: SuiteReport = match c.scenario.as_deref() {
        Some("pd") => pd_suite()?,
        Some("see-not-ee") => see_not_ee_suite()?,
        Some(other) => return Err(usage(format!("no built-in suite for {:?}; give --input", other))),
        None => return Err(usage("give --input or --scenario pd|see-not-ee")),
    };
    write(serde_json::to_string(&report).expect("reports serialize") + "\n")?;
    verdict_exit(report.pass())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(c) => {
            let spec = c.spec()?;
            if spec.exact { run::<Rational>(&spec) } else { run::<f64>(&spec) }
        }
        Command::Scan(a) => {
            let spec = a.common.spec()?;
            if spec.exact {
                scan::<Rational>(&spec, a.multi_seed)
            } else {
                scan::<f64>(&spec, a.multi_seed)
            }
        }
        Command::Scenario(c) => {
            let spec = c.spec()?;
            if spec.exact {
                scenario::<Rational>(&spec)
            } else {
                scenario::<f64>(&spec)
            }
        }
        Command::Verify(a) => verify(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
