//! Continuous-time SIS epidemics by exact stochastic simulation.
//!
//! Every node carries one event rate: `δ` if infected, the summed rates of
//! its infected neighbours if susceptible. Rates live in a binary sum tree;
//! each event samples a node proportionally to its rate and advances time by
//! an exponential with the total rate.
//!
//! Run `i` draws from ChaCha8 seeded with `seed` on stream `i`, so each run
//! is reproducible on its own and independent of how runs are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rates::TransmissionMatrix;
use crate::residual::Residual;
use crate::spectral::{spectral_radius, PowerOptions};

#[derive(Debug, Clone, Serialize)]
pub struct SisOutcome {
    pub runs: usize,
    /// Sorted ascending.
    pub extinction_times: Vec<f64>,
    pub censored: usize,
    pub horizon: f64,
}

impl SisOutcome {
    /// Every run's time, with censored runs counted at the horizon; sorted.
    pub fn times_with_censoring(&self) -> Vec<f64> {
        let mut t = self.extinction_times.clone();
        t.extend(std::iter::repeat_n(self.horizon, self.censored));
        t
    }

    /// Median with censored runs counted at the horizon.
    pub fn median(&self) -> f64 {
        let t = self.times_with_censoring();
        if t.is_empty() {
            return f64::NAN;
        }
        let m = t.len() / 2;
        if t.len() % 2 == 1 {
            t[m]
        } else {
            0.5 * (t[m - 1] + t[m])
        }
    }

    /// Mean with censored runs counted at the horizon (a lower bound on the
    /// true mean when anything was censored).
    pub fn mean(&self) -> f64 {
        let t = self.times_with_censoring();
        t.iter().sum::<f64>() / t.len() as f64
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.runs as f64
    }
}

/// ρ(B) for the rate matrix `B = (β_ij)`.
pub fn transmission_radius(graph: &Graph, rates: &TransmissionMatrix) -> Result<f64> {
    let r = Residual::weighted(graph, rates);
    Ok(spectral_radius(&r, &PowerOptions::default(), None)?.lambda1)
}

/// Uniform rates: infection `β` per infected neighbour, recovery `δ`.
pub fn sis_simulate(
    graph: &Graph,
    beta: f64,
    delta: f64,
    initial_infected: &[usize],
    horizon: f64,
    runs: usize,
    seed: u64,
) -> Result<SisOutcome> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Invalid(format!("infection rate must be nonnegative, got {beta}")));
    }
    simulate(graph, &vec![beta; graph.edge_count()], delta, initial_infected, horizon, runs, seed)
}

pub fn sis_simulate_nonuniform(
    graph: &Graph,
    rates: &TransmissionMatrix,
    initial_infected: &[usize],
    horizon: f64,
    runs: usize,
    seed: u64,
) -> Result<SisOutcome> {
    simulate(graph, rates.rates(), rates.recovery(), initial_infected, horizon, runs, seed)
}

fn simulate(
    graph: &Graph,
    beta: &[f64],
    delta: f64,
    initial: &[usize],
    horizon: f64,
    runs: usize,
    seed: u64,
) -> Result<SisOutcome> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Invalid(format!("recovery rate must be positive, got {delta}")));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Invalid(format!("horizon must be positive, got {horizon}")));
    }
    if initial.is_empty() {
        return Err(Error::Invalid("no initially infected nodes".into()));
    }
    if let Some(&v) = initial.iter().find(|&&v| v >= graph.node_count()) {
        return Err(Error::UnknownNode(v));
    }
    let threads = std::thread::available_parallelism().map_or(1, |p| p.get()).min(runs.max(1));
    let results: Vec<Option<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t..runs)
                        .step_by(threads)
                        .map(|run| (run, one_run(graph, beta, delta, initial, horizon, seed, run as u64)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut all = vec![None; runs];
        for h in handles {
            for (run, r) in h.join().expect("simulation thread panicked") {
                all[run] = r;
            }
        }
        all
    });
    let mut extinction_times: Vec<f64> = results.iter().flatten().copied().collect();
    extinction_times.sort_by(f64::total_cmp);
    Ok(SisOutcome {
        runs,
        censored: runs - extinction_times.len(),
        extinction_times,
        horizon,
    })
}

/// Binary sum tree over node rates. Parents are always recomputed from their
/// children, so no rounding drift accumulates.
struct RateTree {
    size: usize,
    sums: Vec<f64>,
}

impl RateTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two();
        RateTree {
            size,
            sums: vec![0.0; 2 * size],
        }
    }

    fn set(&mut self, v: usize, rate: f64) {
        let mut i = v + self.size;
        self.sums[i] = rate;
        while i > 1 {
            i /= 2;
            self.sums[i] = self.sums[2 * i] + self.sums[2 * i + 1];
        }
    }

    fn total(&self) -> f64 {
        self.sums[1]
    }

    /// Node whose cumulative rate interval contains `x ∈ [0, total)`.
    fn find(&self, mut x: f64) -> usize {
        let mut i = 1;
        while i < self.size {
            let left = self.sums[2 * i];
            if x < left || self.sums[2 * i + 1] == 0.0 {
                i *= 2;
            } else {
                x -= left;
                i = 2 * i + 1;
            }
        }
        i - self.size
    }
}

/// Extinction time, or `None` if still infected at the horizon.
fn one_run(graph: &Graph, beta: &[f64], delta: f64, initial: &[usize], horizon: f64, seed: u64, run: u64) -> Option<f64> {
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);

    let mut infected = vec![false; n];
    let mut count = vec![0u32; n];
    let mut pressure = vec![0.0; n];
    let mut tree = RateTree::new(n);
    let mut alive = 0usize;
    for &v in initial {
        if !infected[v] {
            infected[v] = true;
            alive += 1;
        }
    }
    for v in 0..n {
        if infected[v] {
            for (w, id) in graph.incident(v) {
                count[w] += 1;
                pressure[w] += beta[id];
            }
        }
    }
    for v in 0..n {
        tree.set(v, if infected[v] { delta } else { pressure[v] });
    }

    let mut t = 0.0;
    while alive > 0 {
        let total = tree.total();
        let dt: f64 = Exp1.sample(&mut rng);
        t += dt / total;
        if t > horizon {
            return None;
        }
        let v = tree.find(rng.random::<f64>() * total);
        let sign = if infected[v] { -1.0 } else { 1.0 };
        infected[v] = !infected[v];
        if infected[v] {
            alive += 1;
            tree.set(v, delta);
        } else {
            alive -= 1;
            tree.set(v, pressure[v]);
        }
        for (w, id) in graph.incident(v) {
            if sign > 0.0 {
                count[w] += 1;
                pressure[w] += beta[id];
            } else {
                count[w] -= 1;
                pressure[w] = if count[w] == 0 { 0.0 } else { pressure[w] - beta[id] };
            }
            if !infected[w] {
                tree.set(w, pressure[w]);
            }
        }
    }
    Some(t)
}
