//! Bound computations: strip transfer matrices, the weighted auxiliary
//! graph, the generalized lower bound in its edge- and vertex-strip
//! variants, and the strip / difference-quotient / finite-count upper
//! bounds.

pub mod igraph;
pub mod strips;

use crate::constraint::{edge_constraint, Constraint1D, Presentation2D, StripDirection};
use crate::error::{CapError, Result};
use crate::graph::find_edge_reversing_matching;
use crate::oracle;
use crate::phi::{max_entropic_phi, MaxEntropicParams, PhiTable};
use crate::report::{BoundReport, Certificate, ReportParams};
use crate::spectral::{perron, EigenCertificate, SparseNonnegMatrix};
use igraph::{igraph_matrix, igraph_template, IGraphInfo, IGraphTemplate};
use strips::{
    edge_boundaries, h_strip_edge, h_strip_graph, h_strip_vertex, vstrip_product, vstrip_vertex,
    EdgeForm, StripMatrix, VStrip, VertexForm,
};

/// How the bound machinery reads a 2D constraint's strips.
#[derive(Debug, Clone)]
pub enum BoundRoute {
    /// S = T (x) X(G_E); horizontal strips are symmetric edge constraints.
    Edge(EdgeForm),
    /// Horizontal strips are symmetric vertex constraints; bounds go
    /// through the `[1x2]` recoding.
    Vertex(VertexForm),
}

/// A 2D constraint prepared for bound computation: the counting
/// presentation, optional axial components, and the strip route (absent for
/// constraints that only support counting).
#[derive(Debug, Clone)]
pub struct Constraint2D {
    pub name: String,
    pub original: Presentation2D,
    /// (columns, rows) when S is an axial product of 1D constraints
    pub axial: Option<(Constraint1D, Constraint1D)>,
    pub route: Option<BoundRoute>,
}

impl Constraint2D {
    pub fn route(&self) -> Result<&BoundRoute> {
        self.route.as_ref().ok_or_else(|| {
            CapError::SymmetryGate(format!(
                "{} has no symmetric strip route; only counting is available",
                self.name
            ))
        })
    }

    pub fn ve_names(&self) -> Result<Vec<String>> {
        Ok(match self.route()? {
            BoundRoute::Edge(f) => f.edge_graph.vertices().to_vec(),
            BoundRoute::Vertex(f) => f.alphabet.clone(),
        })
    }

    /// Horizontal strip transfer matrix H_m (trimmed to touched states).
    pub fn h_strip(&self, m: usize) -> Result<StripMatrix> {
        match self.route()? {
            BoundRoute::Edge(f) => h_strip_edge(f, m),
            BoundRoute::Vertex(f) => h_strip_vertex(f, m),
        }
    }

    /// Deterministic presentation of the width-n vertical strip, with row
    /// boundary letters for the auxiliary graph.
    pub fn v_strip(&self, n: usize) -> Result<VStrip> {
        match self.route()? {
            BoundRoute::Edge(f) => {
                let rows = edge_constraint(&f.edge_graph);
                let bounds = edge_boundaries(&f.edge_graph);
                vstrip_product(&f.transverse, &rows, n, Some(&bounds))
            }
            BoundRoute::Vertex(f) => vstrip_vertex(f, n),
        }
    }

    /// Widths (larger, smaller) entering the difference quotient for given
    /// p, q; the vertex route works on the recoded constraint, hence +1.
    pub fn quotient_widths(&self, p: usize, q: usize) -> Result<(usize, usize)> {
        Ok(match self.route()? {
            BoundRoute::Edge(_) => (2 * q + p, 2 * q),
            BoundRoute::Vertex(_) => (p + 2 * q + 1, 2 * q + 1),
        })
    }

    pub fn method_label(&self, ones: bool) -> &'static str {
        if ones {
            return "cw-baseline";
        }
        match self.route {
            Some(BoundRoute::Edge(_)) => "thm1-lower",
            _ => "vertex-lower",
        }
    }

    /// The strips-are-symmetric soundness gate: an edge-reversing matching
    /// must exist on the height-1..=3 strip graphs. The built-in presets
    /// keep this symmetry at every height (componentwise matchings survive
    /// the strip filtering); the machine check covers small heights.
    pub fn symmetry_gate(&self) -> Result<()> {
        for m in 1..=3 {
            let sm = self.h_strip(m)?;
            let g = h_strip_graph(&sm);
            if find_edge_reversing_matching(&g, false).is_none() {
                return Err(CapError::SymmetryGate(format!(
                    "height-{m} horizontal strip of {} has no edge-reversing matching",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Strip transfer matrix in either direction. Horizontal strips are the
    /// edge-constrained H_m; vertical strips return the adjacency of the
    /// trimmed deterministic strip presentation.
    pub fn strip_transfer(&self, m: usize, dir: StripDirection) -> Result<SparseNonnegMatrix> {
        match dir {
            StripDirection::Horizontal => Ok(self.h_strip(m)?.matrix),
            StripDirection::Vertical => Ok(self.v_strip(m)?.adjacency()),
        }
    }

    /// Max-entropic phi for this constraint's strips.
    pub fn max_entropic(&self, params: MaxEntropicParams) -> Result<PhiTable> {
        let h = self.h_strip(params.omega())?;
        max_entropic_phi(&h, params)
    }

    pub fn ones_phi(&self, mu: usize, alpha: usize) -> Result<PhiTable> {
        Ok(PhiTable::ones(mu, alpha, self.ve_names()?))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LowerParams {
    pub mu: usize,
    pub alpha: usize,
    pub p: usize,
    pub q: usize,
    /// recorded in reports when phi came from the max-entropic heuristic
    pub delta: Option<usize>,
}

fn cert_out(width: usize, c: &EigenCertificate) -> Certificate {
    Certificate {
        n: width,
        lambda: c.lambda_hat,
        lo: c.lower,
        hi: c.upper,
        iters: c.iterations,
    }
}

/// The generalized lower bound: (log lambda(A_{n1,phi}) - log lambda(
/// A_{n0,phi})) / (p * alpha) with certificate ends paired so the reported
/// value is a true lower bound.
pub fn lower_bound(
    c: &Constraint2D,
    lp: LowerParams,
    phi: &PhiTable,
    rel_tol: f64,
) -> Result<BoundReport> {
    let start = std::time::Instant::now();
    if lp.p < 1 || lp.q < 1 {
        return Err(CapError::InvalidParams(
            "lower bound needs p, q >= 1".into(),
        ));
    }
    if phi.mu != lp.mu || phi.alpha != lp.alpha {
        return Err(CapError::InvalidParams(format!(
            "phi is on (V_E)^{}+{} but mu={}, alpha={}",
            phi.mu, phi.alpha, lp.mu, lp.alpha
        )));
    }
    c.symmetry_gate()?;
    let (n1, n0) = c.quotient_widths(lp.p, lp.q)?;
    let (vs1, vs0) = rayon::join(|| c.v_strip(n1), || c.v_strip(n0));
    let (vs1, vs0) = (vs1?, vs0?);
    let ve = c.ve_names()?.len();
    let dense = phi.dense();
    let (r1, r0) = rayon::join(
        || igraph_matrix(&vs1, lp.mu, lp.alpha, ve, &dense),
        || igraph_matrix(&vs0, lp.mu, lp.alpha, ve, &dense),
    );
    let (_i1, a1) = r1?;
    let (_i0, a0) = r0?;
    let (c1, c0) = rayon::join(|| perron(&a1, rel_tol), || perron(&a0, rel_tol));
    if c0.upper <= 0.0 || c1.upper <= 0.0 {
        return Err(CapError::PhiAnnihilatesStrip);
    }
    let denom = (lp.p * lp.alpha) as f64;
    let bound = (c1.lower.log2() - c0.upper.log2()) / denom;
    let ones = phi_is_ones(phi);
    Ok(BoundReport {
        constraint: c.name.clone(),
        method: c.method_label(ones).to_string(),
        params: ReportParams {
            mu: Some(lp.mu),
            alpha: Some(lp.alpha),
            p: Some(lp.p),
            q: Some(lp.q),
            delta: lp.delta,
            widths: vec![n1, n0],
        },
        bound,
        certificates: vec![cert_out(n1, &c1), cert_out(n0, &c0)],
        runtime_ms: start.elapsed().as_millis(),
    })
}

fn phi_is_ones(phi: &PhiTable) -> bool {
    let total = phi.ve_names.len().pow((phi.mu + phi.alpha) as u32);
    phi.dense().iter().filter(|&&x| x == 1.0).count() == total
}

/// Templates for both widths, for repeated evaluation under varying phi.
pub struct LowerObjective {
    pub t1: IGraphTemplate,
    pub t0: IGraphTemplate,
    pub p: usize,
    pub alpha: usize,
}

impl LowerObjective {
    pub fn build(c: &Constraint2D, lp: LowerParams) -> Result<Self> {
        c.symmetry_gate()?;
        let (n1, n0) = c.quotient_widths(lp.p, lp.q)?;
        let (vs1, vs0) = rayon::join(|| c.v_strip(n1), || c.v_strip(n0));
        let (vs1, vs0) = (vs1?, vs0?);
        let ve = c.ve_names()?.len();
        let (t1, t0) = rayon::join(
            || igraph_template(&vs1, lp.mu, lp.alpha, ve),
            || igraph_template(&vs0, lp.mu, lp.alpha, ve),
        );
        Ok(Self {
            t1: t1?,
            t0: t0?,
            p: lp.p,
            alpha: lp.alpha,
        })
    }

    /// Midpoint objective value; search accuracy, not the certified bound.
    pub fn value(&self, phi: &PhiTable, rel_tol: f64) -> Result<f64> {
        let dense = phi.dense();
        let (a1, a0) = rayon::join(
            || self.t1.instantiate(&dense),
            || self.t0.instantiate(&dense),
        );
        let (a1, a0) = (a1?, a0?);
        let (c1, c0) = rayon::join(|| perron(&a1, rel_tol), || perron(&a0, rel_tol));
        if c0.lambda_hat <= 0.0 || c1.lambda_hat <= 0.0 {
            return Err(CapError::PhiAnnihilatesStrip);
        }
        Ok((c1.lambda_hat.log2() - c0.lambda_hat.log2()) / (self.p * self.alpha) as f64)
    }
}

/// Maximize the lower bound over phi starting from `init`; returns the best
/// table, its certified report, and the best-so-far trace.
pub fn optimize_lower_bound(
    c: &Constraint2D,
    lp: LowerParams,
    init: &PhiTable,
    budget: usize,
    seed: u64,
) -> Result<(PhiTable, BoundReport, Vec<f64>)> {
    // cap(S) > -inf precondition, checked at 2x2
    let n22 = oracle::count_arrays_2d(&c.original, 2, 2)?;
    if n22.count == num_bigint::BigUint::ZERO {
        return Err(CapError::InvalidParams(format!(
            "{} has no 2x2 arrays; capacity is -inf",
            c.name
        )));
    }
    let objective = LowerObjective::build(c, lp)?;
    let mut f = |phi: &PhiTable| objective.value(phi, 1e-10);
    let (best, trace) = crate::phi::optimize_phi(&mut f, init, budget, seed)?;
    let report = lower_bound(c, lp, &best, 1e-12)?;
    Ok((best, report, trace))
}

/// cap(V_n(S)) / n as an upper bound on cap(S). Prefers the original axial
/// components (tighter than the lifted alphabet when a lift is in play).
pub fn strip_upper_bound(c: &Constraint2D, n: usize, rel_tol: f64) -> Result<BoundReport> {
    let start = std::time::Instant::now();
    if n < 1 {
        return Err(CapError::InvalidParams(
            "strip upper bound needs n >= 1".into(),
        ));
    }
    let adj = match (&c.axial, &c.route) {
        (Some((cols, rows)), _) => vstrip_product(cols, rows, n, None)?.adjacency(),
        (None, Some(BoundRoute::Vertex(f))) => vstrip_vertex(f, n)?.adjacency(),
        _ => c.v_strip(n)?.adjacency(),
    };
    let cert = perron(&adj, rel_tol);
    let bound = cert.upper.log2() / n as f64;
    Ok(BoundReport {
        constraint: c.name.clone(),
        method: "strip-upper".into(),
        params: ReportParams {
            widths: vec![n],
            ..Default::default()
        },
        bound,
        certificates: vec![cert_out(n, &cert)],
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// The difference-quotient upper bound on symmetric strips:
/// (log lambda(H_{2k+2p}) - log lambda(H_{2k})) / (2p). Refuses when the
/// symmetry gate fails; the strip matrices themselves must be symmetric.
pub fn cw_upper_bound(c: &Constraint2D, k: usize, p: usize, rel_tol: f64) -> Result<BoundReport> {
    let start = std::time::Instant::now();
    if k < 1 || p < 1 {
        return Err(CapError::InvalidParams(
            "cw upper bound needs k, p >= 1".into(),
        ));
    }
    c.symmetry_gate()?;
    let (m1, m0) = (2 * k + 2 * p, 2 * k);
    let (h1, h0) = rayon::join(|| c.h_strip(m1), || c.h_strip(m0));
    let (h1, h0) = (h1?, h0?);
    for (m, h) in [(m1, &h1), (m0, &h0)] {
        if !h.matrix.is_symmetric() {
            return Err(CapError::SymmetryGate(format!(
                "H_{m} of {} is not a symmetric matrix",
                c.name
            )));
        }
    }
    let (c1, c0) = rayon::join(
        || perron(&h1.matrix, rel_tol),
        || perron(&h0.matrix, rel_tol),
    );
    let bound = (c1.upper.log2() - c0.lower.log2()) / (2.0 * p as f64);
    Ok(BoundReport {
        constraint: c.name.clone(),
        method: "cw-upper".into(),
        params: ReportParams {
            p: Some(p),
            q: Some(k),
            widths: vec![m1, m0],
            ..Default::default()
        },
        bound,
        certificates: vec![cert_out(m1, &c1), cert_out(m0, &c0)],
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// log2 |S_{m x n}| / (m n), an upper bound by subadditivity.
pub fn finite_count_upper(c: &Constraint2D, m: usize, n: usize) -> Result<BoundReport> {
    let start = std::time::Instant::now();
    let count = oracle::count_arrays_2d(&c.original, m, n)?;
    let bound = count.log2_per_cell();
    Ok(BoundReport {
        constraint: c.name.clone(),
        method: "finite-upper".into(),
        params: ReportParams {
            widths: vec![m, n],
            ..Default::default()
        },
        bound,
        certificates: Vec::new(),
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// z^phi vector on the states of a height-(mu + k*alpha) strip: the product
/// of phi over the k successive windows of each state tuple.
pub fn z_phi_vector(h: &StripMatrix, phi: &PhiTable) -> Result<Vec<f64>> {
    let m = h
        .states
        .first()
        .map(|t| t.len())
        .ok_or_else(|| CapError::InvalidParams("empty strip".into()))?;
    let win = phi.mu + phi.alpha;
    if m < win || (m - phi.mu) % phi.alpha != 0 {
        return Err(CapError::InvalidParams(format!(
            "strip height {m} is not mu + k*alpha for mu={}, alpha={}",
            phi.mu, phi.alpha
        )));
    }
    let k = (m - phi.mu) / phi.alpha;
    Ok(h.states
        .iter()
        .map(|t| {
            (0..k)
                .map(|i| phi.get(&t[i * phi.alpha..i * phi.alpha + win]))
                .product()
        })
        .collect())
}

pub use igraph::{IGraphInfo as IGraph, IGraphTemplate as Template};

/// Spec-facing auxiliary-graph construction from a deterministic strip
/// presentation whose labels are rows over the edges of `g_e`.
pub fn build_igraph_from_graphs(
    g_n: &crate::graph::DeterministicGraph,
    g_e: &crate::graph::LabeledMultigraph,
    mu: usize,
    alpha: usize,
    phi: &PhiTable,
) -> Result<(IGraphInfo, SparseNonnegMatrix)> {
    let vs = vstrip_from_labeled(g_n, g_e)?;
    igraph_matrix(&vs, mu, alpha, g_e.vertex_count(), &phi.dense())
}

/// Compile a deterministic labeled graph into strip form: rows are parsed
/// from the tuple labels; each entry must be an edge id of `g_e`.
pub fn vstrip_from_labeled(
    g_n: &crate::graph::DeterministicGraph,
    g_e: &crate::graph::LabeledMultigraph,
) -> Result<VStrip> {
    let g = g_n.graph();
    let edge_of: std::collections::HashMap<&str, (u32, u32)> = g_e
        .edges()
        .iter()
        .map(|e| (e.id.as_str(), (e.src as u32, e.dst as u32)))
        .collect();
    let mut width = None;
    let mut row_first = Vec::new();
    let mut row_last = Vec::new();
    for label in g.alphabet() {
        let parts = split_row_label(label, &edge_of);
        let parts = parts.ok_or_else(|| {
            CapError::Construction(format!(
                "label {label} contains an entry that is not an edge of the strip graph"
            ))
        })?;
        if let Some(w) = width {
            if w != parts.len() {
                return Err(CapError::Construction("row labels of mixed width".into()));
            }
        } else {
            width = Some(parts.len());
        }
        row_first.push(edge_of[parts.first().unwrap().as_str()].0);
        row_last.push(edge_of[parts.last().unwrap().as_str()].1);
    }
    let mut trans: Vec<Vec<(u32, u32)>> = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        trans[e.src].push((e.label as u32, e.dst as u32));
    }
    for t in &mut trans {
        t.sort_unstable();
    }
    Ok(VStrip {
        width: width.unwrap_or(0),
        row_first,
        row_last,
        trans,
        row_count: g.alphabet().len(),
    })
}

/// Split a row label into edge ids: either the whole label is one edge id,
/// or it is a parenthesized comma-tuple whose entries may themselves carry
/// balanced parentheses.
fn split_row_label(
    label: &str,
    edge_of: &std::collections::HashMap<&str, (u32, u32)>,
) -> Option<Vec<String>> {
    if edge_of.contains_key(label) {
        return Some(vec![label.to_string()]);
    }
    let inner = label.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.checked_sub(1)?;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    if parts.iter().all(|p| edge_of.contains_key(p.as_str())) {
        Some(parts)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::strips::{h_strip_graph, EdgeForm, VertexForm};
    use super::*;
    use crate::constraint::{hard_square_blocks, recode_1x2, rll, strip, StripDirection};
    use crate::phi::MaxEntropicParams;
    use crate::presets::constraint_2d;

    #[test]
    fn hard_square_h1_transfer_is_golden() {
        let hs = constraint_2d("hard-square").unwrap();
        let h1 = hs.strip_transfer(1, StripDirection::Horizontal).unwrap();
        assert_eq!(h1.dim(), 2);
        let cert = perron(&h1, 1e-13);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((cert.lambda_hat - phi).abs() < 1e-11);
    }

    #[test]
    fn full_shift_h1_single_state_weight_two() {
        // unconstrained binary full shift as an edge form: one vertex, two loops
        let g = crate::constraint::full_shift(&["0", "1"])
            .presentation()
            .clone();
        let form = EdgeForm {
            transverse: crate::constraint::lift(&crate::constraint::full_shift(&["0", "1"]), &g)
                .unwrap(),
            edge_graph: g,
        };
        let h1 = super::strips::h_strip_edge(&form, 1).unwrap();
        assert_eq!(h1.matrix.dim(), 1);
        assert_eq!(h1.matrix.entry(0, 0), 2.0);
    }

    #[test]
    fn nak_recoded_h_strips_symmetric() {
        let nak = constraint_2d("nak").unwrap();
        for m in 1..=4 {
            let h = nak.h_strip(m).unwrap();
            assert!(h.matrix.is_symmetric(), "H_{m} not symmetric");
        }
    }

    #[test]
    fn igraph_with_ones_is_strip_adjacency() {
        let c = constraint_2d("chg3x2").unwrap();
        let vs = c.v_strip(3).unwrap();
        let ones = c.ones_phi(0, 1).unwrap();
        let (_, a) = igraph::igraph_matrix(&vs, 0, 1, 4, &ones.dense()).unwrap();
        let adj = vs.adjacency();
        assert_eq!(a.dim(), adj.dim());
        let (ca, cb) = (perron(&a, 1e-12), perron(&adj, 1e-12));
        assert!((ca.lambda_hat - cb.lambda_hat).abs() < 1e-9);
    }

    #[test]
    fn phi_scaling_leaves_bound_unchanged() {
        let c = constraint_2d("chg3x2").unwrap();
        let lp = LowerParams {
            mu: 0,
            alpha: 1,
            p: 1,
            q: 1,
            delta: Some(0),
        };
        let phi = c
            .max_entropic(MaxEntropicParams {
                delta: 0,
                mu: 0,
                alpha: 1,
            })
            .unwrap();
        let base = lower_bound(&c, lp, &phi, 1e-13).unwrap().bound;
        for scale in [0.5, 3.0] {
            let scaled = phi.scaled(scale).unwrap();
            let b = lower_bound(&c, lp, &scaled, 1e-13).unwrap().bound;
            assert!(
                (b - base).abs() < 1e-12,
                "scaling by {scale} moved the bound by {}",
                (b - base).abs()
            );
        }
    }

    #[test]
    fn cw_baseline_independent_of_mu_alpha() {
        let c = constraint_2d("chg3x2").unwrap();
        let mut values = Vec::new();
        for (mu, alpha) in [(0, 1), (1, 1), (0, 2), (1, 2)] {
            let lp = LowerParams {
                mu,
                alpha,
                p: 1,
                q: 1,
                delta: None,
            };
            let phi = c.ones_phi(mu, alpha).unwrap();
            values.push(lower_bound(&c, lp, &phi, 1e-13).unwrap().bound);
        }
        for v in &values[1..] {
            assert!((v - values[0]).abs() < 1e-10, "{values:?}");
        }
        // equals the difference of strip capacities directly
        let v3 = c.v_strip(3).unwrap().adjacency();
        let v2 = c.v_strip(2).unwrap().adjacency();
        let direct = perron(&v3, 1e-13).lambda_hat.log2() - perron(&v2, 1e-13).lambda_hat.log2();
        assert!((values[0] - direct).abs() < 1e-10);
    }

    #[test]
    fn vertex_route_matches_edge_route_on_recoded_hard_square() {
        // the recoded hard-square is V_1 (x) H_1 of itself with H_1 an edge
        // constraint; running the generalized bound there must agree with
        // the vertex-strip route at the same p, q
        let hs = constraint_2d("hard-square").unwrap();
        let golden = rll(1, None).unwrap();
        let form = VertexForm::new(
            vec!["0".into(), "1".into()],
            hard_square_blocks(),
            golden.clone(),
            golden,
        );
        let recoded = recode_1x2(&hs.original).unwrap();
        let transverse = strip(&recoded, 1, StripDirection::Vertical).unwrap();
        let edge_c2 = Constraint2D {
            name: "hard-square-recoded".into(),
            original: recoded,
            axial: None,
            route: Some(BoundRoute::Edge(EdgeForm {
                transverse,
                edge_graph: form.h1_graph(),
            })),
        };
        for (mu, alpha, p, q) in [(0usize, 1usize, 1usize, 1usize), (1, 1, 1, 2)] {
            let lp = LowerParams {
                mu,
                alpha,
                p,
                q,
                delta: None,
            };
            let via_vertex = lower_bound(&hs, lp, &hs.ones_phi(mu, alpha).unwrap(), 1e-13)
                .unwrap()
                .bound;
            let via_edge = lower_bound(&edge_c2, lp, &edge_c2.ones_phi(mu, alpha).unwrap(), 1e-13)
                .unwrap()
                .bound;
            assert!(
                (via_vertex - via_edge).abs() < 1e-9,
                "mu={mu} alpha={alpha} p={p} q={q}: {via_vertex} vs {via_edge}"
            );
            // and with the max-entropic weighting
            let me = MaxEntropicParams {
                delta: 1,
                mu,
                alpha,
            };
            let pv = hs.max_entropic(me).unwrap();
            let pe = edge_c2.max_entropic(me).unwrap();
            let bv = lower_bound(
                &hs,
                LowerParams {
                    delta: Some(1),
                    ..lp
                },
                &pv,
                1e-13,
            )
            .unwrap()
            .bound;
            let be = lower_bound(
                &edge_c2,
                LowerParams {
                    delta: Some(1),
                    ..lp
                },
                &pe,
                1e-13,
            )
            .unwrap()
            .bound;
            assert!((bv - be).abs() < 1e-9, "maxent: {bv} vs {be}");
        }
    }

    #[test]
    fn zero_psi_objective_equals_baseline() {
        // e^0 = 1, so the optimizer's objective at psi = 0 is the
        // unweighted difference quotient
        let c = constraint_2d("chg3x2").unwrap();
        let lp = LowerParams {
            mu: 0,
            alpha: 1,
            p: 1,
            q: 1,
            delta: None,
        };
        let obj = LowerObjective::build(&c, lp).unwrap();
        let ones = c.ones_phi(0, 1).unwrap();
        let at_zero = obj.value(&ones, 1e-12).unwrap();
        let baseline = lower_bound(&c, lp, &ones, 1e-12).unwrap().bound;
        assert!((at_zero - baseline).abs() < 1e-9);
    }

    #[test]
    fn symmetry_gate_rejects_odd_axial() {
        let c = constraint_2d("axial:odd,odd").unwrap();
        assert!(matches!(
            lower_bound(
                &c,
                LowerParams {
                    mu: 0,
                    alpha: 1,
                    p: 1,
                    q: 1,
                    delta: None
                },
                &crate::phi::PhiTable::ones(0, 1, vec!["A".into(), "B".into()]),
                1e-12
            ),
            Err(CapError::SymmetryGate(_))
        ));
    }

    #[test]
    fn annihilating_phi_is_an_error() {
        let c = constraint_2d("chg3x2").unwrap();
        // positive weight only on a window that no strip ever produces is
        // impossible to state directly (weights must be positive somewhere),
        // so starve it: weight on a single self-paired vertex window that the
        // charge graph cannot repeat forever
        let mut weights = std::collections::BTreeMap::new();
        weights.insert(vec![0u32], 1.0); // only windows at charge state c0
        let phi = crate::phi::PhiTable::new(0, 1, c.ve_names().unwrap(), weights).unwrap();
        let r = lower_bound(
            &c,
            LowerParams {
                mu: 0,
                alpha: 1,
                p: 1,
                q: 1,
                delta: None,
            },
            &phi,
            1e-12,
        );
        assert!(matches!(r, Err(CapError::PhiAnnihilatesStrip)), "{r:?}");
    }

    #[test]
    fn igraph_counts_reproducible() {
        let c = constraint_2d("even2").unwrap();
        let vs = c.v_strip(4).unwrap();
        let phi = c.ones_phi(1, 1).unwrap();
        let (i1, a1) = igraph::igraph_matrix(&vs, 1, 1, 2, &phi.dense()).unwrap();
        let (i2, a2) = igraph::igraph_matrix(&vs, 1, 1, 2, &phi.dense()).unwrap();
        assert_eq!(i1.vertex_count, i2.vertex_count);
        assert_eq!(i1.edge_count, i2.edge_count);
        assert_eq!(a1, a2);
    }

    #[test]
    fn strip_graph_matching_exists_for_lifts() {
        // symmetric horizontal edge-constrained strips for lifted charge
        // products and for lifts into the EVEN graph
        let c3 = crate::constraint::chg(3).unwrap();
        let c2 = crate::constraint::chg(2).unwrap();
        let even = crate::constraint::even();
        let odd = crate::constraint::odd();
        let cases = vec![
            EdgeForm {
                transverse: crate::constraint::lift(&c2, c3.presentation()).unwrap(),
                edge_graph: c3.presentation().clone(),
            },
            EdgeForm {
                transverse: crate::constraint::lift(&odd, even.presentation()).unwrap(),
                edge_graph: even.presentation().clone(),
            },
        ];
        for form in &cases {
            for m in 1..=3 {
                let sm = super::strips::h_strip_edge(form, m).unwrap();
                let g = h_strip_graph(&sm);
                assert!(
                    find_edge_reversing_matching(&g, false).is_some(),
                    "no matching at height {m}"
                );
            }
        }
    }

    #[test]
    fn build_igraph_from_labeled_graph() {
        // a deterministic graph whose labels are single edges of G_E:
        // with mu=0, alpha=1 and phi = 1, A(I, W_phi) is the adjacency
        // matrix of g_n itself
        let even = crate::constraint::even();
        let g_e = even.presentation().clone();
        let xg = crate::constraint::edge_constraint(&g_e);
        let det = xg.deterministic().clone();
        let (info, a) = build_igraph_from_graphs(
            &det,
            &g_e,
            0,
            1,
            &crate::phi::PhiTable::ones(0, 1, g_e.vertices().to_vec()),
        )
        .unwrap();
        assert_eq!(info.vertex_count, det.graph().vertex_count());
        let adj = det.graph().adjacency();
        assert_eq!(a.dim(), adj.dim());
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert_eq!(a.entry(i, j), adj.entry(i, j), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn bad_row_label_is_a_construction_error() {
        let even = crate::constraint::even();
        let g_e = even.presentation().clone();
        let bogus = crate::graph::LabeledMultigraph::new(
            vec!["s".into()],
            vec!["zzz".into()],
            vec![("e".into(), "s".into(), "s".into(), "zzz".into())],
        )
        .unwrap();
        let det = crate::graph::DeterministicGraph::check(bogus).unwrap();
        let r = vstrip_from_labeled(&det, &g_e);
        assert!(matches!(r, Err(CapError::Construction(_))));
    }
}
