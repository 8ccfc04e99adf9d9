//! Trajectory records and their JSONL / CSV serializations.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::spec::OutputFormat;

pub const TRAJECTORY_SCHEMA: &str = "ebw-trajectory/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub schema: String,
    pub scenario: String,
    pub backend: String,
    pub seed: u64,
    pub rounds: usize,
    pub k_scan: usize,
    pub agents: Vec<String>,
    /// Per agent, the labels of the posterior weight vector.
    pub posterior_labels: Vec<Vec<String>>,
}

/// One step of the agent loop; beliefs and D_k are taken at h_{<t}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub actions: Vec<String>,
    pub percepts: Vec<String>,
    pub chosen_q: Vec<String>,
    pub q_values: Vec<Vec<String>>,
    pub error_bound: Vec<String>,
    pub posteriors: Vec<Vec<String>>,
    pub d_k: Vec<String>,
    /// Uniform draws consumed by the percept samplers, one per agent.
    pub uniforms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub header: RecordHeader,
    pub steps: Vec<StepRecord>,
    /// Action and percept indices per agent and step, for replay.
    #[serde(skip)]
    pub turns: Vec<Vec<(usize, usize)>>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Action labels of agent i over the run.
    pub fn actions_of(&self, i: usize) -> Vec<String> {
        self.steps.iter().map(|s| s.actions[i].clone()).collect()
    }

    /// Header line, then one JSON object per step.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("headers serialize");
        out.push('\n');
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("steps serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: RecordHeader = serde_json::from_str(lines.next().ok_or_else(|| parse("empty record"))?)
            .map_err(|e| parse(e.to_string()))?;
        if header.schema != TRAJECTORY_SCHEMA {
            return Err(parse(format!("unknown schema {:?}", header.schema)));
        }
        let steps = lines
            .map(|l| serde_json::from_str(l).map_err(|e| parse(e.to_string())))
            .collect::<Result<Vec<StepRecord>>>()?;
        Ok(TrajectoryRecord {
            header,
            steps,
            turns: Vec::new(),
        })
    }

    /// A `# schema` line, then one CSV row per (step, agent).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "t", "agent", "action", "percept", "chosen_q", "q_values", "error_bound", "posterior", "d_k", "uniform",
        ])
        .map_err(|e| parse(e.to_string()))?;
        for s in &self.steps {
            for i in 0..s.actions.len() {
                w.write_record([
                    s.t.to_string(),
                    i.to_string(),
                    s.actions[i].clone(),
                    s.percepts[i].clone(),
                    s.chosen_q[i].clone(),
                    s.q_values[i].join(";"),
                    s.error_bound[i].clone(),
                    s.posteriors[i].join(";"),
                    s.d_k[i].clone(),
                    s.uniforms[i].to_string(),
                ])
                .map_err(|e| parse(e.to_string()))?;
            }
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| parse(e.to_string()))?)
            .map_err(|e| parse(e.to_string()))?;
        Ok(format!(
            "# {} scenario={} backend={} seed={}\n{}",
            TRAJECTORY_SCHEMA, self.header.scenario, self.header.backend, self.header.seed, body
        ))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Jsonl => Ok(self.to_jsonl()),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

fn parse(msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse(msg.into())
}
