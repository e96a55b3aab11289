use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{ModelConfig, Scenario};
use super::stats;
use crate::engine::{LogMode, MetricSample, Model, RunResult, World};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Replication {
    pub replication: u32,
    pub seed: u64,
    pub ticks_run: u64,
    /// Final metrics.
    pub summary: BTreeMap<String, f64>,
    pub series: Vec<MetricSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchResult {
    pub scenario: String,
    pub model: String,
    pub replications: Vec<Replication>,
}

impl BatchResult {
    /// Final value of `metric` in every replication, in replication order.
    pub fn final_metric(&self, metric: &str) -> Result<Vec<f64>> {
        self.replications
            .iter()
            .map(|r| {
                r.summary
                    .get(metric)
                    .copied()
                    .ok_or_else(|| Error::Config(format!("metric `{metric}` not reported by {}", self.model)))
            })
            .collect()
    }

    pub fn metric_names(&self) -> Vec<&str> {
        self.replications
            .first()
            .map(|r| r.summary.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }
}

/// Seed of replication `r` of a batch with base seed `seed`.
pub fn replication_seed(seed: u64, r: u32) -> u64 {
    seed.wrapping_add(r as u64)
}

/// Runs `model` for up to `ticks` ticks and hands back the finished world.
pub fn run_model<M: Model>(model: M, seed: u64, ticks: u64, interval: u64, mode: LogMode) -> (RunResult, World<M>) {
    let mut world = World::new(model, seed, mode);
    let result = world.run(ticks, interval);
    (result, world)
}

/// One run of a scenario's model under `seed`.
pub fn run_once(scenario: &Scenario, seed: u64, mode: LogMode) -> Result<RunResult> {
    let (t, i) = (scenario.ticks, scenario.metric_interval);
    Ok(match &scenario.model {
        ModelConfig::AntForaging(c) => run_model(c.build(seed)?, seed, t, i, mode).0,
        ModelConfig::Retail(c) => run_model(c.build()?, seed, t, i, mode).0,
        ModelConfig::TeamComms(c) => run_model(c.build(seed)?, seed, t, i, mode).0,
    })
}

/// Runs every replication, in parallel, seeding replication `r` with
/// `seed + r`. Results come back in replication order.
pub fn run_batch(scenario: &Scenario) -> Result<BatchResult> {
    scenario.validate()?;
    let replications = (0..scenario.replications)
        .into_par_iter()
        .map(|r| {
            let seed = replication_seed(scenario.seed, r);
            let run = run_once(scenario, seed, LogMode::CountsOnly)?;
            Ok(Replication {
                replication: r,
                seed,
                ticks_run: run.ticks_run(),
                summary: run.summary,
                series: run.series,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchResult {
        scenario: scenario.name.clone(),
        model: scenario.model.name().to_string(),
        replications,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricCheck {
    pub metric: String,
    pub simulated_mean: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub scenario: String,
    pub metrics: Vec<MetricCheck>,
    pub pass: bool,
}

/// Parses a reference document: an object mapping metric names to
/// `{"value": .., "tolerance": ..}`.
pub fn load_reference(document: &str) -> Result<BTreeMap<String, Reference>> {
    let refs: BTreeMap<String, Reference> =
        serde_json::from_str(document).map_err(|e| Error::Config(format!("invalid reference: {e}")))?;
    for (k, r) in &refs {
        crate::error::check_non_negative(&format!("{k}.tolerance"), r.tolerance)?;
    }
    Ok(refs)
}

/// Checks the batch mean of each referenced metric against its reference
/// value: a metric passes when `|mean - value| <= tolerance`.
pub fn validate_baseline(batch: &BatchResult, reference: &BTreeMap<String, Reference>) -> Result<ValidationReport> {
    let mut metrics = Vec::new();
    for (name, r) in reference {
        let mean = stats::mean(&batch.final_metric(name)?);
        let deviation = (mean - r.value).abs();
        metrics.push(MetricCheck {
            metric: name.clone(),
            simulated_mean: mean,
            reference: r.value,
            tolerance: r.tolerance,
            deviation,
            pass: deviation <= r.tolerance,
        });
    }
    Ok(ValidationReport {
        scenario: batch.scenario.clone(),
        pass: metrics.iter().all(|m| m.pass),
        metrics,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub metric: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_diff: f64,
    pub welch_t: f64,
    pub degrees_of_freedom: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_a: usize,
    pub n_b: usize,
}

impl Comparison {
    /// One-line human summary.
    pub fn summary_line(&self) -> String {
        format!(
            "{}: mean diff {:.6} (a {:.6}, b {:.6}), 95% CI [{:.6}, {:.6}], t = {:.4}, df = {:.2}, n = {}/{}",
            self.metric,
            self.mean_diff,
            self.mean_a,
            self.mean_b,
            self.ci95_low,
            self.ci95_high,
            self.welch_t,
            self.degrees_of_freedom,
            self.n_a,
            self.n_b
        )
    }
}

/// Welch comparison of two samples of `metric` (difference is `a - b`).
pub fn compare_samples(metric: &str, a: &[f64], b: &[f64]) -> Result<Comparison> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientReplications {
            n_a: a.len(),
            n_b: b.len(),
        });
    }
    let w = stats::welch(a, b);
    let (lo, hi) = w.confidence_interval(0.95);
    Ok(Comparison {
        metric: metric.to_string(),
        mean_a: w.mean_a,
        mean_b: w.mean_b,
        mean_diff: w.mean_diff,
        welch_t: w.t,
        degrees_of_freedom: w.df,
        ci95_low: lo,
        ci95_high: hi,
        n_a: a.len(),
        n_b: b.len(),
    })
}

/// Welch comparison of the final value of `metric` between two batches.
pub fn compare(a: &BatchResult, b: &BatchResult, metric: &str) -> Result<Comparison> {
    compare_samples(metric, &a.final_metric(metric)?, &b.final_metric(metric)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::load_scenario;

    fn retail(reps: u32) -> Scenario {
        load_scenario(&format!(
            r#"{{"model": "retail", "seed": 5, "ticks": 300, "replications": {reps}, "metric_interval": 50,
                "staff": [{{"department": 0, "skill": 0.5, "attitude": 0.5}}]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn single_replication_matches_a_direct_run() {
        let s = retail(1);
        let b = run_batch(&s).unwrap();
        let direct = run_once(&s, 5, LogMode::Full).unwrap();
        assert_eq!(b.replications.len(), 1);
        assert_eq!(b.replications[0].summary, direct.summary);
        assert_eq!(b.replications[0].series, direct.series);
    }

    #[test]
    fn replications_are_seeded_in_order() {
        let s = retail(6);
        let b = run_batch(&s).unwrap();
        assert_eq!(b.replications.len(), 6);
        for (r, rep) in b.replications.iter().enumerate() {
            assert_eq!(rep.replication, r as u32);
            assert_eq!(rep.seed, 5 + r as u64);
            assert_eq!(rep.summary, run_once(&s, 5 + r as u64, LogMode::CountsOnly).unwrap().summary);
        }
        assert_eq!(run_batch(&s).unwrap(), b);
    }

    #[test]
    fn compare_identity_and_oracle() {
        let b = run_batch(&retail(5)).unwrap();
        for m in b.metric_names() {
            let c = compare(&b, &b, m).unwrap();
            assert_eq!((c.mean_diff, c.welch_t), (0.0, 0.0));
        }
        let c = compare_samples("x", &[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert_eq!(c.mean_diff, -1.0);
        assert!((c.welch_t + 1.2247).abs() < 1e-4);
        assert!(c.ci95_low <= c.mean_diff && c.mean_diff <= c.ci95_high);
        assert_eq!(
            compare_samples("x", &[1.0], &[1.0, 2.0]),
            Err(Error::InsufficientReplications { n_a: 1, n_b: 2 })
        );
    }

    #[test]
    fn validation_rules() {
        let b = run_batch(&retail(4)).unwrap();
        let mean = stats::mean(&b.final_metric("customers_entered").unwrap());
        let exact = BTreeMap::from([("customers_entered".to_string(), Reference { value: mean, tolerance: 0.0 })]);
        let r = validate_baseline(&b, &exact).unwrap();
        assert!(r.pass);
        assert_eq!(r.metrics[0].deviation, 0.0);
        let off = BTreeMap::from([("customers_entered".to_string(), Reference { value: mean + 0.5, tolerance: 0.0 })]);
        assert!(!validate_baseline(&b, &off).unwrap().pass);
        let unknown = BTreeMap::from([("happiness".to_string(), Reference { value: 1.0, tolerance: 1.0 })]);
        assert!(matches!(validate_baseline(&b, &unknown), Err(Error::Config(_))));
        assert!(load_reference(r#"{"conversions": {"value": 3, "tolerance": -1}}"#).is_err());
        assert!(load_reference(r#"{"conversions": {"value": 3, "tol": 1}}"#).is_err());
    }
}
