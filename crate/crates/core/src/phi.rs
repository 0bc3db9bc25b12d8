//! Window weightings phi on (V_E)^(mu+alpha) and the two selection
//! strategies: the max-entropic probability heuristic and derivative-free
//! log-space optimization of the lower-bound objective.

use crate::bounds::strips::StripMatrix;
use crate::error::{CapError, Result};
use crate::spectral::perron_vector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Code of a window under most-significant-letter-first base-|V_E| packing.
pub fn window_code(w: &[u32], base: usize) -> usize {
    let mut code = 0usize;
    for &x in w {
        code = code * base + x as usize;
    }
    code
}

/// Nonnegative weights on windows in (V_E)^(mu+alpha); absent windows weigh 0.
#[derive(Debug, Clone)]
pub struct PhiTable {
    pub mu: usize,
    pub alpha: usize,
    pub ve_names: Vec<String>,
    weights: BTreeMap<Vec<u32>, f64>,
}

impl PhiTable {
    pub fn new(
        mu: usize,
        alpha: usize,
        ve_names: Vec<String>,
        weights: BTreeMap<Vec<u32>, f64>,
    ) -> Result<Self> {
        let win = mu + alpha;
        let base = ve_names.len() as u32;
        let mut any_positive = false;
        for (w, &x) in &weights {
            if w.len() != win {
                return Err(CapError::InvalidParams(format!(
                    "phi window length {} != mu+alpha = {win}",
                    w.len()
                )));
            }
            if w.iter().any(|&v| v >= base) {
                return Err(CapError::InvalidParams(
                    "phi window letter out of range".into(),
                ));
            }
            if !x.is_finite() || x < 0.0 {
                return Err(CapError::InvalidParams(format!("phi weight {x} invalid")));
            }
            any_positive |= x > 0.0;
        }
        if !any_positive {
            return Err(CapError::InvalidParams(
                "phi must have at least one positive weight".into(),
            ));
        }
        Ok(Self {
            mu,
            alpha,
            ve_names,
            weights,
        })
    }

    /// The constant-1 weighting (the original unweighted method).
    pub fn ones(mu: usize, alpha: usize, ve_names: Vec<String>) -> Self {
        let win = mu + alpha;
        let base = ve_names.len();
        let mut weights = BTreeMap::new();
        let total = base.pow(win as u32);
        for code in 0..total {
            let mut w = vec![0u32; win];
            let mut c = code;
            for i in (0..win).rev() {
                w[i] = (c % base) as u32;
                c /= base;
            }
            weights.insert(w, 1.0);
        }
        Self {
            mu,
            alpha,
            ve_names,
            weights,
        }
    }

    pub fn get(&self, w: &[u32]) -> f64 {
        self.weights.get(w).copied().unwrap_or(0.0)
    }

    pub fn windows(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.weights.iter().map(|(w, &x)| (w, x))
    }

    /// Dense table indexed by `window_code`.
    pub fn dense(&self) -> Vec<f64> {
        let base = self.ve_names.len();
        let mut out = vec![0.0; base.pow((self.mu + self.alpha) as u32)];
        for (w, &x) in &self.weights {
            out[window_code(w, base)] = x;
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let weights = self
            .weights
            .iter()
            .map(|(w, &x)| (w.clone(), c * x))
            .collect();
        Self::new(self.mu, self.alpha, self.ve_names.clone(), weights)
    }

    /// Windows with positive weight, in lexicographic order.
    pub fn support(&self) -> Vec<Vec<u32>> {
        self.weights
            .iter()
            .filter(|(_, &x)| x > 0.0)
            .map(|(w, _)| w.clone())
            .collect()
    }

    /// Line format: `window <v_1> ... <v_k> weight <float>` per entry.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (w, &x) in &self.weights {
            s.push_str("window");
            for &v in w {
                s.push(' ');
                s.push_str(&self.ve_names[v as usize]);
            }
            s.push_str(&format!(" weight {x:.17e}\n"));
        }
        s
    }

    pub fn from_text(mu: usize, alpha: usize, ve_names: Vec<String>, text: &str) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let win = mu + alpha;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != win + 3 || toks[0] != "window" || toks[win + 1] != "weight" {
                return Err(CapError::Parse(format!(
                    "line {}: want `window <{win} letters> weight <float>`",
                    ln + 1
                )));
            }
            let mut w = Vec::with_capacity(win);
            for t in &toks[1..=win] {
                let idx = ve_names.iter().position(|n| n == t).ok_or_else(|| {
                    CapError::Parse(format!("line {}: unknown letter {t}", ln + 1))
                })?;
                w.push(idx as u32);
            }
            let x: f64 = toks[win + 2]
                .parse()
                .map_err(|_| CapError::Parse(format!("line {}: bad weight", ln + 1)))?;
            weights.insert(w, x);
        }
        Self::new(mu, alpha, ve_names, weights)
    }
}

/// Parameters of the max-entropic heuristic; omega = 2*delta + mu + alpha.
#[derive(Debug, Clone, Copy)]
pub struct MaxEntropicParams {
    pub delta: usize,
    pub mu: usize,
    pub alpha: usize,
}

impl MaxEntropicParams {
    pub fn omega(&self) -> usize {
        2 * self.delta + self.mu + self.alpha
    }
}

/// phi(u) = sqrt of the conditional probability, under the max-entropic
/// measure on the height-omega strip, of the last alpha window letters
/// given the first mu, read at rows delta..delta+mu+alpha of the strip.
/// Pr(column state) is the squared Perron-vector entry; conditioning events
/// of probability zero give phi = 0.
pub fn max_entropic_phi(h_omega: &StripMatrix, params: MaxEntropicParams) -> Result<PhiTable> {
    let omega = params.omega();
    let win = params.mu + params.alpha;
    for t in &h_omega.states {
        if t.len() != omega {
            return Err(CapError::DimensionMismatch(format!(
                "H_omega states have length {}, want omega = {omega}",
                t.len()
            )));
        }
    }
    let r = perron_vector(&h_omega.matrix, 1e-13)?;
    let mut joint: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (i, t) in h_omega.states.iter().enumerate() {
        let w = t[params.delta..params.delta + win].to_vec();
        *joint.entry(w).or_insert(0.0) += r[i] * r[i];
    }
    let mut prefix: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (w, &p) in &joint {
        *prefix.entry(w[..params.mu].to_vec()).or_insert(0.0) += p;
    }
    let mut weights = BTreeMap::new();
    for (w, &p) in &joint {
        let denom = prefix[&w[..params.mu].to_vec()];
        if denom > 0.0 && p > 0.0 {
            weights.insert(w.clone(), (p / denom).sqrt());
        }
    }
    PhiTable::new(params.mu, params.alpha, h_omega.ve_names.clone(), weights)
}

/// Total probability mass of the reconstructed joint (diagnostic; should be
/// 1 up to the eigenvector tolerance).
pub fn max_entropic_mass(h_omega: &StripMatrix) -> Result<f64> {
    let r = perron_vector(&h_omega.matrix, 1e-13)?;
    Ok(r.iter().map(|x| x * x).sum())
}

/// Derivative-free maximization of `objective` over phi in log space with
/// the anchor window pinned at weight 1: coordinate search with shrinking
/// steps, seeded restarts after convergence. Evaluation failures count as
/// -inf; the incumbent is always a valid table.
pub fn optimize_phi(
    objective: &mut dyn FnMut(&PhiTable) -> Result<f64>,
    init: &PhiTable,
    budget: usize,
    seed: u64,
) -> Result<(PhiTable, Vec<f64>)> {
    if budget == 0 {
        return Err(CapError::InvalidParams(
            "optimizer budget must be >= 1".into(),
        ));
    }
    let support = init.support();
    if support.is_empty() {
        return Err(CapError::InvalidParams(
            "initial phi has empty support".into(),
        ));
    }
    let anchor = 0usize; // lexicographically least positive window
    let base_weight = init.get(&support[anchor]);
    let mut psi: Vec<f64> = support
        .iter()
        .map(|w| (init.get(w) / base_weight).ln())
        .collect();

    let make = |psi: &[f64]| -> Result<PhiTable> {
        let weights: BTreeMap<Vec<u32>, f64> = support
            .iter()
            .zip(psi)
            .map(|(w, &p)| (w.clone(), p.exp()))
            .collect();
        PhiTable::new(init.mu, init.alpha, init.ve_names.clone(), weights)
    };

    let mut evals = 0usize;
    let mut eval = |psi: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        match make(psi).and_then(|phi| objective(&phi)) {
            Ok(v) if v.is_finite() => v,
            _ => f64::NEG_INFINITY,
        }
    };

    let mut best_psi = psi.clone();
    let mut best = eval(&psi, &mut evals);
    let mut trace = vec![best];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut step = 0.5f64;
    while evals < budget {
        let mut improved = false;
        'sweep: for i in 0..psi.len() {
            if i == anchor {
                continue;
            }
            for dir in [1.0, -1.0] {
                if evals >= budget {
                    break 'sweep;
                }
                let mut trial = psi.clone();
                trial[i] += dir * step;
                let v = eval(&trial, &mut evals);
                if v > best + 1e-13 {
                    best = v;
                    psi = trial.clone();
                    best_psi = trial;
                    improved = true;
                }
                trace.push(best);
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-7 {
                if evals >= budget {
                    break;
                }
                // restart around the incumbent
                psi = best_psi
                    .iter()
                    .map(|&p| p + rng.random_range(-0.5..0.5))
                    .collect();
                psi[anchor] = 0.0;
                let v = eval(&psi, &mut evals);
                if v > best + 1e-13 {
                    best = v;
                    best_psi = psi.clone();
                }
                trace.push(best);
                step = 0.25;
            }
        }
    }
    Ok((make(&best_psi)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_code_msb_first() {
        assert_eq!(window_code(&[1, 0], 2), 2);
        assert_eq!(window_code(&[0, 1], 2), 1);
        assert_eq!(window_code(&[3, 2, 1], 4), 3 * 16 + 2 * 4 + 1);
    }

    #[test]
    fn ones_table_dense() {
        let t = PhiTable::ones(1, 1, vec!["a".into(), "b".into()]);
        assert_eq!(t.dense(), vec![1.0; 4]);
    }

    #[test]
    fn text_round_trip() {
        let mut w = BTreeMap::new();
        w.insert(vec![0, 1], 0.25);
        w.insert(vec![1, 1], 1.5);
        let t = PhiTable::new(1, 1, vec!["x".into(), "y".into()], w).unwrap();
        let text = t.to_text();
        let t2 = PhiTable::from_text(1, 1, t.ve_names.clone(), &text).unwrap();
        assert_eq!(t.dense(), t2.dense());
    }

    #[test]
    fn rejects_all_zero() {
        let mut w = BTreeMap::new();
        w.insert(vec![0u32], 0.0);
        assert!(PhiTable::new(0, 1, vec!["x".into()], w).is_err());
    }

    #[test]
    fn optimizer_budget_one_returns_init() {
        let init = PhiTable::ones(0, 1, vec!["a".into(), "b".into()]);
        let mut calls = 0usize;
        let mut obj = |phi: &PhiTable| -> Result<f64> {
            calls += 1;
            Ok(-((phi.get(&[0]) - 2.0).powi(2)))
        };
        let (out, trace) = optimize_phi(&mut obj, &init, 1, 7).unwrap();
        assert_eq!(calls, 1);
        assert_eq!(trace.len(), 1);
        assert_eq!(out.dense(), init.dense());
    }

    #[test]
    fn optimizer_improves_simple_objective() {
        let init = PhiTable::ones(0, 1, vec!["a".into(), "b".into()]);
        // maximize ratio phi(b)/phi(a) capped smoothly; optimum pushes psi_b up
        let mut obj = |phi: &PhiTable| -> Result<f64> {
            let r = phi.get(&[1]) / phi.get(&[0]);
            Ok(-(r.ln() - 1.25).powi(2))
        };
        let (out, trace) = optimize_phi(&mut obj, &init, 200, 3).unwrap();
        let r = out.get(&[1]) / out.get(&[0]);
        assert!((r.ln() - 1.25).abs() < 1e-3, "got ratio {r}");
        // best-so-far trace is nondecreasing
        for pair in trace.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
    }
}
