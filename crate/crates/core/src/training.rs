//! Optimises shared angles so paired sentences produce the same meaning state.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compiler::Circuit;
use crate::simulator::{fidelity, simulate};
use crate::{Error, Result};

pub use crate::params::ParameterStore;

/// Stop once the loss is this small.
pub const CONVERGED_LOSS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentencePair {
    pub label: String,
    pub a: Circuit,
    pub b: Circuit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTask {
    pub pairs: Vec<SentencePair>,
}

impl PairTask {
    pub fn new(pairs: Vec<SentencePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Training("no sentence pairs".into()));
        }
        for p in &pairs {
            if p.a.open_qubits.len() != p.b.open_qubits.len() {
                return Err(Error::OpenWireMismatch(p.a.open_qubits.len(), p.b.open_qubits.len()));
            }
        }
        Ok(Self { pairs })
    }

    /// Every angle name used by any circuit, sorted.
    pub fn params(&self) -> Vec<String> {
        let names: BTreeSet<&String> = self.pairs.iter().flat_map(|p| p.a.params.iter().chain(&p.b.params)).collect();
        names.into_iter().cloned().collect()
    }
}

/// Mean over pairs of `1 − fidelity`.
pub fn pair_loss(task: &PairTask, store: &ParameterStore) -> Result<f64> {
    let mut total = 0.0;
    for p in &task.pairs {
        let (a, b) = (simulate(&p.a, store)?, simulate(&p.b, store)?);
        let f = fidelity(&a, &b).map_err(|e| match e {
            Error::ZeroVector(_) => Error::ZeroVector(Some(format!("pair `{}`", p.label))),
            e => e,
        })?;
        total += 1.0 - f;
    }
    Ok(total / task.pairs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    pub a: f64,
    pub c: f64,
    /// Stability offset in the step-size decay `a / (k + 1 + A)^alpha`.
    pub big_a: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self { a: 0.1, c: 0.1, big_a: 0.0, alpha: 0.602, gamma: 0.101 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub learning_rate: f64,
    pub step: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { learning_rate: 0.5, step: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Spsa(SpsaConfig),
    FiniteDifference(FdConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub evaluations: usize,
    pub loss: f64,
    pub best_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub store: ParameterStore,
    pub best_loss: f64,
    pub evaluations: usize,
    pub trace: Vec<TraceEntry>,
}

struct Run<'a> {
    task: &'a PairTask,
    budget: usize,
    evaluations: usize,
    iteration: usize,
    best: ParameterStore,
    best_loss: f64,
    trace: Vec<TraceEntry>,
}

impl Run<'_> {
    fn eval(&mut self, store: &ParameterStore) -> Result<f64> {
        let loss = pair_loss(self.task, store)?;
        self.evaluations += 1;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { iteration: self.iteration, loss });
        }
        if loss < self.best_loss {
            self.best_loss = loss;
            self.best = store.clone();
        }
        Ok(loss)
    }

    fn record(&mut self, loss: f64) {
        self.trace.push(TraceEntry {
            iteration: self.iteration,
            evaluations: self.evaluations,
            loss,
            best_loss: self.best_loss,
        });
    }

    fn done(&self) -> bool {
        self.best_loss <= CONVERGED_LOSS
    }
}

/// Central-difference gradient over the non-frozen names.
pub fn fd_gradient(task: &PairTask, store: &ParameterStore, names: &[String], step: f64) -> Result<Vec<f64>> {
    names
        .iter()
        .map(|n| {
            let x = store.get(n)?;
            let plus = pair_loss(task, &store.clone().with(n.clone(), x + step))?;
            let minus = pair_loss(task, &store.clone().with(n.clone(), x - step))?;
            Ok((plus - minus) / (2.0 * step))
        })
        .collect()
}

/// Minimises [`pair_loss`] within `budget` loss evaluations and returns the
/// best store seen. Frozen names are never changed.
pub fn optimize(task: &PairTask, store: &ParameterStore, method: Method, budget: usize, seed: u64) -> Result<TrainResult> {
    if budget == 0 {
        return Err(Error::Training("budget must allow at least one evaluation".into()));
    }
    let names: Vec<String> = task.params().into_iter().filter(|n| !store.is_frozen(n)).collect();
    for n in task.params() {
        store.get(&n)?;
    }
    let mut run = Run {
        task,
        budget,
        evaluations: 0,
        iteration: 0,
        best: store.clone(),
        best_loss: f64::INFINITY,
        trace: vec![],
    };
    let initial = run.eval(store)?;
    run.record(initial);
    let mut current = store.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    match method {
        Method::Spsa(cfg) => {
            while !run.done() && run.evaluations + 2 <= run.budget && !names.is_empty() {
                let k = run.iteration as f64;
                let ak = cfg.a / (k + 1.0 + cfg.big_a).powf(cfg.alpha);
                let ck = cfg.c / (k + 1.0).powf(cfg.gamma);
                let delta: Vec<f64> = names.iter().map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
                let shifted = |sign: f64| {
                    let mut s = current.clone();
                    for (n, d) in names.iter().zip(&delta) {
                        s.set(n.clone(), current.values[n] + sign * ck * d);
                    }
                    s
                };
                let (plus, minus) = (shifted(1.0), shifted(-1.0));
                let lp = run.eval(&plus)?;
                let lm = run.eval(&minus)?;
                let g = (lp - lm) / (2.0 * ck);
                for (n, d) in names.iter().zip(&delta) {
                    let v = current.values[n] - ak * g * d;
                    current.set(n.clone(), v);
                }
                run.iteration += 1;
                run.record(lp.min(lm));
            }
        }
        Method::FiniteDifference(cfg) => {
            let cost = 2 * names.len() + 1;
            while !run.done() && run.evaluations + cost <= run.budget && !names.is_empty() {
                let grad = fd_gradient(task, &current, &names, cfg.step)?;
                run.evaluations += 2 * names.len();
                for (n, g) in names.iter().zip(grad) {
                    let v = current.values[n] - cfg.learning_rate * g;
                    current.set(n.clone(), v);
                }
                run.iteration += 1;
                let loss = run.eval(&current.clone())?;
                run.record(loss);
            }
        }
    }
    Ok(TrainResult { store: run.best, best_loss: run.best_loss, evaluations: run.evaluations, trace: run.trace })
}
