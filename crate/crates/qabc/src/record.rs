//! Per-run output documents: the JSON run record and `convergence.csv`.
//!
//! JSON has no infinities, so fitness values are written as numbers when
//! finite and as the strings `"inf"` / `"-inf"` otherwise.

use qabc_core::{DecisionVector, ObjectiveConfig, OptimizationResult, QabcParams};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) mod lossless_f64 {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else {
            Repr::Text(v.to_string())
        }
    }

    fn from_repr<E: de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(E::custom(format!("expected a number, \"inf\" or \"-inf\", got {s:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| to_repr(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub params: QabcParams,
    pub seed: u64,
    pub objective: ObjectiveConfig,
    pub task_count: usize,
    #[serde(with = "lossless_f64::vec")]
    pub convergence: Vec<f64>,
    pub best_decision: DecisionVector,
    #[serde(with = "lossless_f64")]
    pub best_fitness_s: f64,
    #[serde(with = "lossless_f64")]
    pub total_latency_s: f64,
    pub deadline_misses: usize,
    /// Best plan is within every capacity budget and reachable.
    pub feasible: bool,
    pub evaluations: u64,
}

impl RunRecord {
    pub fn new(
        params: &QabcParams,
        objective: &ObjectiveConfig,
        result: &OptimizationResult,
        report: &qabc_core::FitnessReport,
    ) -> Self {
        RunRecord {
            params: params.clone(),
            seed: params.seed,
            objective: objective.clone(),
            task_count: result.best_decision.len(),
            convergence: result.convergence.clone(),
            best_decision: result.best_decision.clone(),
            best_fitness_s: result.best_fitness_s,
            total_latency_s: report.total_latency_s,
            deadline_misses: report.deadline_misses,
            feasible: qabc_core::is_feasible(report),
            evaluations: result.evaluations,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("run record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub iteration: usize,
    pub best_fitness_s: f64,
}

/// `iteration,best_fitness_s` with 1-based iterations.
pub fn convergence_csv(convergence: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "best_fitness_s"])?;
    for (i, f) in convergence.iter().enumerate() {
        w.write_record([(i + 1).to_string(), f.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn parse_convergence_csv(text: &str) -> Result<Vec<ConvergenceRow>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qabc_core::{evaluate, generate_scenario, run_qabc, GenerationParams};

    #[test]
    fn record_and_csv_reparse() {
        let s = generate_scenario(&GenerationParams::with_counts(3, 2, 2), 4).unwrap();
        let params = QabcParams { n_pop: 6, n_iter: 5, seed: 2, ..QabcParams::default() };
        let cfg = ObjectiveConfig::default();
        let r = run_qabc(&s, &cfg, &params).unwrap();
        let rep = evaluate(&s, &r.best_decision, &cfg).unwrap();
        let rec = RunRecord::new(&params, &cfg, &r, &rep);
        assert_eq!(RunRecord::from_json(&rec.to_json()).unwrap(), rec);

        let rows = parse_convergence_csv(&convergence_csv(&r.convergence).unwrap()).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows.iter().map(|r| r.best_fitness_s).collect::<Vec<_>>(), r.convergence);
    }

    #[test]
    fn infinite_fitness_survives_json_and_csv() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct W {
            #[serde(with = "lossless_f64")]
            x: f64,
            #[serde(with = "lossless_f64::vec")]
            v: Vec<f64>,
        }
        let w = W { x: f64::INFINITY, v: vec![1.5, f64::INFINITY, f64::NEG_INFINITY] };
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"{"x":"inf","v":[1.5,"inf","-inf"]}"#);
        assert_eq!(serde_json::from_str::<W>(&text).unwrap(), w);

        let rows = parse_convergence_csv(&convergence_csv(&[f64::INFINITY, 2.0]).unwrap()).unwrap();
        assert!(rows[0].best_fitness_s.is_infinite());
    }
}
