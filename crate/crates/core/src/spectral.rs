//! Certified Perron eigenvalue computation on sparse nonnegative matrices.
//!
//! The certificate is a Collatz–Wielandt bracket: for an irreducible
//! nonnegative matrix A and a strictly positive vector x,
//! `min_i (Ax)_i/x_i <= lambda(A) <= max_i (Ax)_i/x_i`.
//!
//! Power iteration is run on (A + I), which is primitive on every
//! nontrivial strongly connected block, so the bracket converges even for
//! periodic matrices. Reducible matrices are split into blocks first and
//! the block maxima are combined.

use crate::error::{CapError, Result};
use serde::Serialize;

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_ITER_CAP: usize = 1_000_000;

/// Sparse nonnegative square matrix in CSR form with canonical ordering.
///
/// Duplicate (row, col) contributions are summed at construction, explicit
/// zeros are dropped, and columns within a row are sorted, so equal inputs
/// produce byte-identical matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseNonnegMatrix {
    n: usize,
    indptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    labels: Vec<String>,
}

impl SparseNonnegMatrix {
    /// Build from (row, col, weight) triplets; duplicates are summed.
    pub fn from_triplets(
        n: usize,
        labels: Vec<String>,
        mut triplets: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        let labels = if labels.is_empty() {
            (0..n).map(|i| format!("v{i}")).collect()
        } else {
            labels
        };
        if labels.len() != n {
            return Err(CapError::DimensionMismatch(format!(
                "{} labels for dimension {n}",
                labels.len()
            )));
        }
        for &(r, c, w) in &triplets {
            if r as usize >= n || c as usize >= n {
                return Err(CapError::DimensionMismatch(format!(
                    "entry ({r},{c}) outside {n}x{n}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(CapError::InvalidParams(format!(
                    "matrix weight {w} at ({r},{c}) is not finite and nonnegative"
                )));
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut it = triplets.into_iter().peekable();
        for row in 0..n as u32 {
            while let Some(&(r, c, _)) = it.peek() {
                if r != row {
                    break;
                }
                let mut sum = 0.0;
                while let Some(&(r2, c2, w2)) = it.peek() {
                    if r2 == row && c2 == c {
                        sum += w2;
                        it.next();
                    } else {
                        break;
                    }
                }
                if sum > 0.0 {
                    cols.push(c);
                    vals.push(sum);
                }
            }
            indptr[row as usize + 1] = cols.len();
        }
        Ok(Self {
            n,
            indptr,
            cols,
            vals,
            labels,
        })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CapError::DimensionMismatch(
                    "dense matrix not square".into(),
                ));
            }
            for (j, &w) in row.iter().enumerate() {
                if w != 0.0 {
                    triplets.push((i as u32, j as u32, w));
                }
            }
        }
        Self::from_triplets(n, Vec::new(), triplets)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        self.cols[lo..hi]
            .iter()
            .zip(&self.vals[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or(0.0)
    }

    /// y = A x, accumulated in fixed row order.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if (self.entry(j, i) - v).abs() > 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Row sums, i.e. A applied to the all-ones vector.
    pub fn row_sums(&self) -> Vec<f64> {
        let ones = vec![1.0; self.n];
        let mut out = vec![0.0; self.n];
        self.matvec(&ones, &mut out);
        out
    }
}

/// Certified bracket around the Perron eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct EigenCertificate {
    pub lambda_hat: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit before reaching the requested
    /// width; the bracket is still valid, just wide.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
}

impl EigenCertificate {
    fn zero() -> Self {
        EigenCertificate {
            lambda_hat: 0.0,
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
            vector: None,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn log2_lower(&self) -> f64 {
        self.lower.log2()
    }

    pub fn log2_upper(&self) -> f64 {
        self.upper.log2()
    }
}

/// Strongly connected components of the support digraph, in a canonical
/// order (sorted by smallest member index). Iterative Tarjan.
pub fn strongly_connected_components(a: &SparseNonnegMatrix) -> Vec<Vec<usize>> {
    scc_of_adjacency(a.n, |v| a.row(v).map(|(c, _)| c))
}

pub(crate) fn scc_of_adjacency<'a, I, F>(n: usize, succ: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> I + 'a,
    I: Iterator<Item = usize>,
{
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    // call stack entries: (vertex, successor iterator state)
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let succs: Vec<usize> = succ(start).collect();
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        call.push((start, succs, 0));
        while let Some((v, succs, mut i)) = call.pop() {
            let mut recursed = false;
            while i < succs.len() {
                let w = succs[i];
                i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let wsuccs: Vec<usize> = succ(w).collect();
                    call.push((v, succs, i));
                    call.push((w, wsuccs, 0));
                    recursed = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if recursed {
                continue;
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
            if let Some(&mut (p, _, _)) = call.last_mut() {
                low[p] = low[p].min(low[v]);
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

struct Block {
    members: Vec<usize>,
    // CSR restricted to members, reindexed 0..k
    indptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

fn extract_block(a: &SparseNonnegMatrix, members: &[usize]) -> Block {
    let mut pos = std::collections::HashMap::with_capacity(members.len());
    for (i, &m) in members.iter().enumerate() {
        pos.insert(m, i as u32);
    }
    let mut indptr = vec![0usize];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for &m in members {
        for (c, v) in a.row(m) {
            if let Some(&j) = pos.get(&c) {
                cols.push(j);
                vals.push(v);
            }
        }
        indptr.push(cols.len());
    }
    Block {
        members: members.to_vec(),
        indptr,
        cols,
        vals,
    }
}

impl Block {
    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.members.len() {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    fn has_edge(&self) -> bool {
        !self.cols.is_empty()
    }
}

/// Power iteration with Collatz–Wielandt bracketing on one irreducible block.
/// Returns (lower, upper, iterations, converged, unit vector).
fn certify_block(
    block: &Block,
    rel_tol: f64,
    iter_cap: usize,
) -> (f64, f64, usize, bool, Vec<f64>) {
    let k = block.members.len();
    if k == 1 {
        // 1x1 irreducible block: exact.
        let lam = if block.has_edge() { block.vals[0] } else { 0.0 };
        return (lam, lam, 0, true, vec![1.0]);
    }
    let mut x = vec![1.0 / (k as f64).sqrt(); k];
    let mut ax = vec![0.0; k];
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut iters = 0usize;
    let mut converged = false;
    while iters < iter_cap {
        block.matvec(&x, &mut ax);
        let mut cur_lo = f64::INFINITY;
        let mut cur_hi = 0.0f64;
        for i in 0..k {
            let r = ax[i] / x[i];
            cur_lo = cur_lo.min(r);
            cur_hi = cur_hi.max(r);
        }
        // Brackets from successive positive iterates are all valid, so the
        // running intersection is too.
        lo = lo.max(cur_lo);
        hi = hi.min(cur_hi);
        iters += 1;
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        // next iterate of (A + I)
        let mut norm = 0.0;
        for i in 0..k {
            ax[i] += x[i];
            norm += ax[i] * ax[i];
        }
        norm = norm.sqrt();
        for i in 0..k {
            x[i] = ax[i] / norm;
        }
    }
    // a hair of slack for directed-rounding honesty of the f64 ratios
    let safety = 1e-14;
    let lo_s = lo - lo.abs() * safety;
    let hi_s = hi + hi.abs() * safety;
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut x {
        *v /= norm;
    }
    (lo_s, hi_s, iters, converged, x)
}

/// Certified Perron eigenvalue of a sparse nonnegative matrix.
pub fn perron(a: &SparseNonnegMatrix, rel_tol: f64) -> EigenCertificate {
    perron_with(a, rel_tol, DEFAULT_ITER_CAP)
}

pub fn perron_with(a: &SparseNonnegMatrix, rel_tol: f64, iter_cap: usize) -> EigenCertificate {
    if a.n == 0 {
        return EigenCertificate::zero();
    }
    let comps = strongly_connected_components(a);
    let mut best = EigenCertificate::zero();
    let mut total_iters = 0usize;
    let mut all_converged = true;
    for comp in &comps {
        let block = extract_block(a, comp);
        if !block.has_edge() {
            continue; // trivial component, lambda = 0
        }
        let (lo, hi, iters, conv, _) = certify_block(&block, rel_tol, iter_cap);
        total_iters += iters;
        all_converged &= conv;
        // lambda(A) = max over blocks, so block maxima combine the brackets
        best.lower = best.lower.max(lo);
        best.upper = best.upper.max(hi);
    }
    best.lambda_hat = 0.5 * (best.lower + best.upper);
    best.iterations = total_iters;
    best.converged = all_converged;
    best
}

/// L2-normalized nonnegative Perron vector. For reducible matrices this is
/// the eigenvector of the dominant block (first such block in canonical
/// order on ties), embedded with zeros elsewhere.
pub fn perron_vector(a: &SparseNonnegMatrix, rel_tol: f64) -> Result<Vec<f64>> {
    if a.n == 0 {
        return Err(CapError::NoPerronVector);
    }
    let comps = strongly_connected_components(a);
    let mut blocks: Vec<(Block, f64, Vec<f64>)> = Vec::new();
    for comp in &comps {
        let block = extract_block(a, comp);
        if !block.has_edge() {
            continue;
        }
        let (lo, hi, _, _, vec) = certify_block(&block, rel_tol, DEFAULT_ITER_CAP);
        blocks.push((block, 0.5 * (lo + hi), vec));
    }
    let dominant = blocks
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| {
            x.1.partial_cmp(&y.1).unwrap().then(j.cmp(i)) // first block wins ties
        })
        .map(|(i, _)| i);
    let Some(di) = dominant else {
        return Err(CapError::NoPerronVector);
    };
    let (block, lam, bvec) = &blocks[di];
    if *lam <= 0.0 {
        return Err(CapError::NoPerronVector);
    }
    let mut out = vec![0.0; a.n];
    for (i, &m) in block.members.iter().enumerate() {
        out[m] = bvec[i].max(0.0);
    }
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut out {
        *v /= norm;
    }
    Ok(out)
}

/// x^T A^n x via n sparse matvecs in fixed order.
pub fn quadratic_form_power(a: &SparseNonnegMatrix, x: &[f64], n: usize) -> Result<f64> {
    if x.len() != a.n {
        return Err(CapError::DimensionMismatch(format!(
            "vector length {} vs matrix dimension {}",
            x.len(),
            a.n
        )));
    }
    let mut cur = x.to_vec();
    let mut next = vec![0.0; a.n];
    for _ in 0..n {
        a.matvec(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(x.iter().zip(&cur).map(|(a, b)| a * b).sum())
}
