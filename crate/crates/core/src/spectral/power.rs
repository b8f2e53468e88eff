use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::residual::{components, Adjacency};

/// Leading eigenpair of a symmetric nonnegative matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub lambda1: f64,
    /// Unit 2-norm, entrywise nonnegative.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    /// `‖Ax − λx‖∞` at the returned pair.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tolerance: f64,
    /// `None` means `max(10 n ln n, 1000)`.
    pub max_iters: Option<usize>,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tolerance: 1e-9,
            max_iters: None,
            seed: 0,
        }
    }
}

impl PowerOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        PowerOptions {
            tolerance,
            ..Self::default()
        }
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iters.unwrap_or_else(|| {
            let n = n.max(2) as f64;
            ((10.0 * n * n.ln()).ceil() as usize).max(1000)
        })
    }
}

/// λ₁ of an unweighted graph. Edgeless graphs (including the empty one) give 0.
pub fn power_iteration(graph: &Graph, tolerance: f64, max_iters: Option<usize>, seed: u64) -> Result<SpectralReport> {
    if graph.node_count() == 0 {
        return Err(Error::Invalid("power iteration needs at least one node".into()));
    }
    spectral_radius(
        graph,
        &PowerOptions {
            tolerance,
            max_iters,
            seed,
        },
        None,
    )
}

/// Leading eigenpair of any [`Adjacency`] operator, optionally warm-started.
///
/// A warm start may carry (numerically) no mass on some component, which then
/// never shows up in the iteration. Such components are certified afterwards,
/// either by a cheap upper bound on their spectral radius or by solving them
/// on their own.
pub fn spectral_radius<A: Adjacency>(a: &A, opts: &PowerOptions, warm: Option<&[f64]>) -> Result<SpectralReport> {
    let n = a.order();
    if n == 0 {
        return Ok(SpectralReport {
            lambda1: 0.0,
            eigenvector: Vec::new(),
            iterations: 0,
            residual: 0.0,
        });
    }
    if (0..n).all(|v| a.row_sum(v) == 0.0) {
        let x = 1.0 / (n as f64).sqrt();
        return Ok(SpectralReport {
            lambda1: 0.0,
            eigenvector: vec![x; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let start: Vec<f64> = match warm {
        Some(w) if w.len() == n && w.iter().any(|&x| x > 0.0) => w.iter().map(|&x| x.max(0.0)).collect(),
        _ => vec![1.0; n],
    };
    let mut report = iterate(a, start, opts)?;
    if warm.is_some() {
        certify(a, opts, &mut report)?;
    }
    Ok(report)
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn residual_inf(x: &[f64], y: &[f64], lambda: f64) -> f64 {
    x.iter().zip(y).map(|(xi, yi)| (yi - lambda * xi).abs()).fold(0.0, f64::max)
}

// Shifted power iteration on A + σI with σ = λ/4, which separates λ₁ from −λ₁
// on bipartite components while costing little on the λ₂ ratio.
fn iterate<A: Adjacency>(a: &A, mut x: Vec<f64>, opts: &PowerOptions) -> Result<SpectralReport> {
    let n = a.order();
    let cap = opts.iteration_cap(n);
    let window = 500;
    let mut rng: Option<ChaCha8Rng> = None;
    let mut restarts = 0;

    normalize(&mut x);
    let mut y = vec![0.0; n];
    a.apply(&x, &mut y);
    let mut lambda = dot(&x, &y);
    let mut res = residual_inf(&x, &y, lambda);
    let mut best = (res, lambda);
    let mut best_at = 0;

    for it in 1..=cap {
        if res <= opts.tolerance {
            return Ok(SpectralReport {
                lambda1: lambda,
                eigenvector: x,
                iterations: it - 1,
                residual: res,
            });
        }
        let sigma = 0.25 * lambda.max(0.0);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi + sigma * *xi;
        }
        if it % RITZ_EVERY == 0 {
            // Slow convergence usually means a near-tie between the top two
            // eigenvalues; a small Krylov solve separates them directly.
            x = ritz(a, &x);
            best_at = it;
        } else if it - best_at > window && restarts < 3 {
            // No progress for a while: perturb with a seeded positive vector.
            let r = rng.get_or_insert_with(|| ChaCha8Rng::seed_from_u64(opts.seed));
            let scale = x.iter().cloned().fold(0.0, f64::max);
            x.iter_mut().for_each(|v| *v += scale * r.random::<f64>());
            restarts += 1;
            best_at = it;
            log::debug!("power iteration stalled at residual {res:e}; restart {restarts}");
        }
        normalize(&mut x);
        a.apply(&x, &mut y);
        lambda = dot(&x, &y);
        res = residual_inf(&x, &y, lambda);
        if res < 0.5 * best.0 {
            best = (res, lambda);
            best_at = it;
        }
    }
    if res <= opts.tolerance {
        return Ok(SpectralReport {
            lambda1: lambda,
            eigenvector: x,
            iterations: cap,
            residual: res,
        });
    }
    Err(Error::NotConverged {
        estimate: lambda,
        residual: res,
        iterations: cap,
        step: None,
    })
}

const RITZ_EVERY: usize = 200;
const RITZ_DIM: usize = 16;

/// Top Ritz vector of `a` on the Krylov space spanned from `x`.
fn ritz<A: Adjacency>(a: &A, x: &[f64]) -> Vec<f64> {
    let n = a.order();
    let p = RITZ_DIM.min(n);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut aq: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut v = x.to_vec();
    normalize(&mut v);
    loop {
        let mut w = vec![0.0; n];
        a.apply(&v, &mut w);
        q.push(v);
        aq.push(w.clone());
        if q.len() == p {
            break;
        }
        let before = normalize(&mut w.clone());
        for _ in 0..2 {
            for b in &q {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        if normalize(&mut w) <= 1e-10 * before {
            break;
        }
        v = w;
    }
    let d = q.len();
    let mut h = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let hij = 0.5 * (dot(&q[i], &aq[j]) + dot(&q[j], &aq[i]));
            h[i][j] = hij;
            h[j][i] = hij;
        }
    }
    let (vals, vecs) = jacobi(h);
    let top = (0..d).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty basis");
    let mut out = vec![0.0; n];
    for (i, b) in q.iter().enumerate() {
        let c = vecs[i][top];
        out.iter_mut().zip(b).for_each(|(o, bi)| *o += c * bi);
    }
    if out.iter().sum::<f64>() < 0.0 {
        out.iter_mut().for_each(|o| *o = -*o);
    }
    normalize(&mut out);
    out
}

/// Cyclic Jacobi eigensolver for a small dense symmetric matrix. Returns the
/// eigenvalues and the eigenvectors as columns.
fn jacobi(mut h: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = h.len();
    let mut v: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale: f64 = h.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 {
        let off: f64 = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| h[i][j] * h[i][j]).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..d {
            for r in p + 1..d {
                if h[p][r] == 0.0 {
                    continue;
                }
                let theta = (h[r][r] - h[p][p]) / (2.0 * h[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (hkp, hkr) = (h[k][p], h[k][r]);
                    h[k][p] = c * hkp - s * hkr;
                    h[k][r] = s * hkp + c * hkr;
                }
                for k in 0..d {
                    let (hpk, hrk) = (h[p][k], h[r][k]);
                    h[p][k] = c * hpk - s * hrk;
                    h[r][k] = s * hpk + c * hrk;
                }
                for row in v.iter_mut() {
                    let (vp, vr) = (row[p], row[r]);
                    row[p] = c * vp - s * vr;
                    row[r] = s * vp + c * vr;
                }
            }
        }
    }
    ((0..d).map(|i| h[i][i]).collect(), v)
}

fn certify<A: Adjacency>(a: &A, opts: &PowerOptions, report: &mut SpectralReport) -> Result<()> {
    let n = a.order();
    let (comp, count) = components(a);
    if count == 1 {
        return Ok(());
    }
    let mut mass = vec![0.0; count];
    let mut bound = vec![0.0f64; count];
    for v in 0..n {
        mass[comp[v]] += report.eigenvector[v] * report.eigenvector[v];
        bound[comp[v]] = bound[comp[v]].max(a.row_sum(v));
    }
    let lambda = report.lambda1;
    let suspect: Vec<bool> = (0..count).map(|c| mass[c] < 1e-2 && bound[c] > lambda).collect();
    if !suspect.iter().any(|&s| s) {
        return Ok(());
    }
    let start: Vec<f64> = (0..n).map(|v| if suspect[comp[v]] { 1.0 } else { 0.0 }).collect();
    let other = iterate(a, start, opts)?;
    if other.lambda1 > lambda {
        *report = other;
    }
    Ok(())
}
