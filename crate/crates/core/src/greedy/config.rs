use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::PowerOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WalkLength {
    /// Smallest even `k ≥ ln n / ln(1 + ε/3)`, at least 2, capped.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Backend {
    /// `DpLazy` when `m ≤ 4n` or `n > 4096`, else `Matrix`.
    Auto,
    /// Recompute every walk count after every removal.
    Matrix,
    /// Recompute only what the lazy priority queue asks for.
    DpLazy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopRule {
    /// Stop once `trace(Ãᵏ) < n`.
    RootedTrace,
    /// Stop once λ₁ of the residual graph is below the threshold.
    LambdaDirect,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyConfig {
    pub threshold: f64,
    pub epsilon: f64,
    pub walk_length: WalkLength,
    pub k_cap: usize,
    pub backend: Backend,
    pub stop_rule: StopRule,
    /// Scale `s` of `Ã = A/s`; defaults to the threshold.
    pub scale: Option<f64>,
    /// Give up after this many removals.
    pub max_removals: Option<usize>,
    /// Power-iteration settings for the recorded λ₁ trajectory.
    #[serde(skip)]
    pub power: PowerOptions,
}

impl GreedyConfig {
    pub fn new(threshold: f64) -> Self {
        GreedyConfig {
            threshold,
            epsilon: 0.05,
            walk_length: WalkLength::Auto,
            k_cap: 64,
            backend: Backend::Auto,
            stop_rule: StopRule::RootedTrace,
            scale: None,
            max_removals: None,
            power: PowerOptions::default(),
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.walk_length = WalkLength::Fixed(k);
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_stop_rule(mut self, stop_rule: StopRule) -> Self {
        self.stop_rule = stop_rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::Invalid(format!("threshold must be positive, got {}", self.threshold)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if let WalkLength::Fixed(k) = self.walk_length {
            if k < 2 || k % 2 != 0 {
                return Err(Error::Invalid(format!("walk length must be even and at least 2, got {k}")));
            }
        }
        if let Some(s) = self.scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Invalid(format!("scale must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Walk length for a graph on `n` nodes.
    pub fn walk_length_for(&self, n: usize) -> usize {
        match self.walk_length {
            WalkLength::Fixed(k) => k,
            WalkLength::Auto => auto_walk_length(n, self.epsilon, self.k_cap),
        }
    }

    pub(crate) fn lazy(&self, n: usize, m: usize) -> bool {
        match self.backend {
            Backend::Matrix => false,
            Backend::DpLazy => true,
            Backend::Auto => m <= 4 * n || n > 4096,
        }
    }
}

pub fn auto_walk_length(n: usize, epsilon: f64, cap: usize) -> usize {
    let raw = (n.max(1) as f64).ln() / (1.0 + epsilon / 3.0).ln();
    let mut k = raw.ceil().max(2.0) as usize;
    if k % 2 == 1 {
        k += 1;
    }
    let cap = cap.max(2) & !1;
    k.min(cap)
}
