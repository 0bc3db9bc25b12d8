//! Strip presentations backing the bound computations: horizontal strip
//! transfer matrices H_m and deterministic presentations of the vertical
//! strips V_n, for the two supported strip forms.
//!
//! Edge form: S = T (x) X(G_E); horizontal strips are edge constraints on
//! subgraphs of G_E^(x m). Vertex form: horizontal strips are vertex
//! constraints described by an allowed 2x2 block set; after `[1x2]` recoding
//! the same graphs carry the edge-constrained reading.

use crate::constraint::Constraint1D;
use crate::error::{guard, CapError, Result};
use crate::graph::LabeledMultigraph;
use crate::spectral::SparseNonnegMatrix;
use std::collections::HashMap;

/// Edge-strip form S = T (x) X(G_E): transverse 1D constraint on columns,
/// edge constraint on rows.
#[derive(Debug, Clone)]
pub struct EdgeForm {
    pub transverse: Constraint1D,
    pub edge_graph: LabeledMultigraph,
}

/// Vertex-strip form: strips in both directions are vertex constraints,
/// described by the allowed 2x2 windows plus the single-row and
/// single-column 1D constraints.
#[derive(Debug, Clone)]
pub struct VertexForm {
    pub alphabet: Vec<String>,
    pub blocks: Vec<[u8; 4]>, // (e00, e01, e10, e11) over alphabet indices
    pub row1: Constraint1D,
    pub col1: Constraint1D,
}

impl VertexForm {
    pub fn new(
        alphabet: Vec<String>,
        blocks: Vec<[u8; 4]>,
        row1: Constraint1D,
        col1: Constraint1D,
    ) -> Self {
        Self {
            alphabet,
            blocks,
            row1,
            col1,
        }
    }

    fn block_set(&self) -> Vec<bool> {
        let k = self.alphabet.len();
        let mut set = vec![false; k * k * k * k];
        for b in &self.blocks {
            let code =
                ((b[0] as usize * k + b[1] as usize) * k + b[2] as usize) * k + b[3] as usize;
            set[code] = true;
        }
        set
    }

    /// Transposed form: blocks transposed, row/column constraints swapped.
    pub fn transposed(&self) -> Self {
        Self {
            alphabet: self.alphabet.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| [b[0], b[2], b[1], b[3]])
                .collect(),
            row1: self.col1.clone(),
            col1: self.row1.clone(),
        }
    }

    /// The graph G_E defining the height-1 horizontal strip as a vertex
    /// constraint: vertices are the symbols, one edge a->b per admissible
    /// horizontal pair.
    pub fn h1_graph(&self) -> LabeledMultigraph {
        let mut edges = Vec::new();
        for (i, a) in self.alphabet.iter().enumerate() {
            for (j, b) in self.alphabet.iter().enumerate() {
                if self.row1.membership(&[a.as_str(), b.as_str()]) {
                    let id = format!("({a},{b})");
                    edges.push((id.clone(), a.clone(), b.clone(), id));
                }
                let _ = (i, j);
            }
        }
        let alphabet: Vec<String> = edges.iter().map(|e| e.0.clone()).collect();
        LabeledMultigraph::new(self.alphabet.clone(), alphabet, edges)
            .expect("h1 graph construction")
    }
}

/// Words of exact length n of a 1D constraint, as label-index sequences in
/// canonical lexicographic order, enumerated with deterministic-subset
/// pruning.
pub fn words_of_length(c: &Constraint1D, n: usize) -> Result<Vec<Vec<u32>>> {
    let det = c.deterministic();
    let g = det.graph();
    let ns = g.vertex_count();
    if ns > 64 {
        return Err(CapError::SizeGuard {
            what: "deterministic automaton states for word enumeration".into(),
            required: ns as u128,
            limit: 64,
        });
    }
    let nl = g.alphabet().len();
    let mut step = vec![vec![0u64; ns]; nl];
    for e in g.edges() {
        step[e.label][e.src] |= 1 << e.dst;
    }
    let full: u64 = if ns == 64 { u64::MAX } else { (1 << ns) - 1 };
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut word: Vec<u32> = Vec::new();
    fn dfs(
        step: &[Vec<u64>],
        nl: usize,
        n: usize,
        mask: u64,
        word: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        budget: &mut u128,
    ) -> Result<()> {
        if word.len() == n {
            *budget += 1;
            guard("strip rows", *budget)?;
            out.push(word.clone());
            return Ok(());
        }
        for l in 0..nl {
            let mut next = 0u64;
            let mut bits = mask;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= step[l][b];
            }
            if next != 0 {
                word.push(l as u32);
                dfs(step, nl, n, next, word, out, budget)?;
                word.pop();
            }
        }
        Ok(())
    }
    let mut budget = 0u128;
    dfs(&step, nl, n, full, &mut word, &mut out, &mut budget)?;
    Ok(out)
}

/// Horizontal strip transfer data: trimmed-to-touched states (tuples over
/// V_E) with the weighted adjacency (multiplicities summed).
#[derive(Debug, Clone)]
pub struct StripMatrix {
    pub matrix: SparseNonnegMatrix,
    pub states: Vec<Vec<u32>>,
    pub ve_names: Vec<String>,
}

/// H_m for the edge form: m-tuples of G_E edges whose column word satisfies
/// the transverse constraint; states are the touched sigma/tau tuples.
pub fn h_strip_edge(form: &EdgeForm, m: usize) -> Result<StripMatrix> {
    let g = &form.edge_graph;
    let det = form.transverse.deterministic();
    let dg = det.graph();
    let ns = dg.vertex_count();
    if ns > 64 {
        return Err(CapError::SizeGuard {
            what: "transverse automaton states".into(),
            required: ns as u128,
            limit: 64,
        });
    }
    // map edge index -> det label
    let mut edge_label = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let l = dg.label_index(&e.id).ok_or_else(|| {
            CapError::AlphabetMismatch(format!("edge {} missing from transverse alphabet", e.id))
        })?;
        edge_label.push(l);
    }
    let nl = dg.alphabet().len();
    let mut step = vec![vec![0u64; ns]; nl];
    for e in dg.edges() {
        step[e.label][e.src] |= 1 << e.dst;
    }
    let full: u64 = if ns == 64 { u64::MAX } else { (1 << ns) - 1 };

    let mut states: Vec<Vec<u32>> = Vec::new();
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut entries: Vec<(u32, u32, f64)> = Vec::new();
    let mut sig: Vec<u32> = Vec::new();
    let mut tau: Vec<u32> = Vec::new();

    struct Ctx<'a> {
        g: &'a LabeledMultigraph,
        edge_label: &'a [usize],
        step: &'a [Vec<u64>],
        m: usize,
    }
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        ctx: &Ctx,
        mask: u64,
        depth: usize,
        sig: &mut Vec<u32>,
        tau: &mut Vec<u32>,
        states: &mut Vec<Vec<u32>>,
        index: &mut HashMap<Vec<u32>, u32>,
        entries: &mut Vec<(u32, u32, f64)>,
        budget: &mut u128,
    ) -> Result<()> {
        if depth == ctx.m {
            *budget += 1;
            guard("strip edges", *budget)?;
            let si = intern(states, index, sig);
            let ti = intern(states, index, tau);
            entries.push((si, ti, 1.0));
            return Ok(());
        }
        for (k, e) in ctx.g.edges().iter().enumerate() {
            let mut next = 0u64;
            let mut bits = mask;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= ctx.step[ctx.edge_label[k]][b];
            }
            if next == 0 {
                continue;
            }
            sig.push(e.src as u32);
            tau.push(e.dst as u32);
            dfs(
                ctx,
                next,
                depth + 1,
                sig,
                tau,
                states,
                index,
                entries,
                budget,
            )?;
            sig.pop();
            tau.pop();
        }
        Ok(())
    }
    fn intern(states: &mut Vec<Vec<u32>>, index: &mut HashMap<Vec<u32>, u32>, t: &[u32]) -> u32 {
        if let Some(&i) = index.get(t) {
            return i;
        }
        let i = states.len() as u32;
        states.push(t.to_vec());
        index.insert(t.to_vec(), i);
        i
    }
    let ctx = Ctx {
        g,
        edge_label: &edge_label,
        step: &step,
        m,
    };
    let mut budget = 0u128;
    dfs(
        &ctx,
        full,
        0,
        &mut sig,
        &mut tau,
        &mut states,
        &mut index,
        &mut entries,
        &mut budget,
    )?;
    finish_strip(states, entries, g.vertices().to_vec())
}

/// H_m for the vertex form: valid columns with window-compatible adjacency.
/// This is both the defining graph of the vertex constraint H_m(S) and the
/// strip transfer matrix of the `[1x2]`-recoded constraint.
pub fn h_strip_vertex(form: &VertexForm, m: usize) -> Result<StripMatrix> {
    let cols = words_of_length(&form.col1, m)?;
    let k = form.alphabet.len();
    let set = form.block_set();
    let compat = |u: &[u32], v: &[u32]| -> bool {
        if m == 1 {
            return form
                .row1
                .membership_indices_named(&form.alphabet, &[u[0] as usize, v[0] as usize]);
        }
        for i in 0..m - 1 {
            let code = ((u[i] as usize * k + v[i] as usize) * k + u[i + 1] as usize) * k
                + v[i + 1] as usize;
            if !set[code] {
                return false;
            }
        }
        true
    };
    let mut entries = Vec::new();
    for (i, u) in cols.iter().enumerate() {
        for (j, v) in cols.iter().enumerate() {
            if compat(u, v) {
                entries.push((i as u32, j as u32, 1.0));
            }
        }
        guard("strip edges", entries.len() as u128)?;
    }
    finish_strip(cols, entries, form.alphabet.clone())
}

fn finish_strip(
    states: Vec<Vec<u32>>,
    entries: Vec<(u32, u32, f64)>,
    ve_names: Vec<String>,
) -> Result<StripMatrix> {
    // keep only touched states, in canonical (sorted tuple) order
    let mut touched = vec![false; states.len()];
    for &(s, t, _) in &entries {
        touched[s as usize] = true;
        touched[t as usize] = true;
    }
    let mut order: Vec<usize> = (0..states.len()).filter(|&i| touched[i]).collect();
    order.sort_by(|&a, &b| states[a].cmp(&states[b]));
    let mut remap = vec![u32::MAX; states.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new as u32;
    }
    let kept: Vec<Vec<u32>> = order.iter().map(|&i| states[i].clone()).collect();
    let labels: Vec<String> = kept
        .iter()
        .map(|t| {
            t.iter()
                .map(|&v| ve_names[v as usize].as_str())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let triplets: Vec<(u32, u32, f64)> = entries
        .into_iter()
        .map(|(s, t, w)| (remap[s as usize], remap[t as usize], w))
        .collect();
    let matrix = SparseNonnegMatrix::from_triplets(kept.len(), labels, triplets)?;
    Ok(StripMatrix {
        matrix,
        states: kept,
        ve_names,
    })
}

/// Deterministic presentation of a vertical strip V_n, with transitions
/// labeled by row ids. `row_first`/`row_last` carry the boundary letters
/// (V_E indices) used by the auxiliary-graph construction; they are empty
/// for strips built only for capacity values.
#[derive(Debug, Clone)]
pub struct VStrip {
    pub width: usize,
    pub row_first: Vec<u32>,
    pub row_last: Vec<u32>,
    pub trans: Vec<Vec<(u32, u32)>>,
    pub row_count: usize,
}

impl VStrip {
    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn adjacency(&self) -> SparseNonnegMatrix {
        let n = self.trans.len();
        let triplets: Vec<(u32, u32, f64)> = self
            .trans
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&(_, d)| (s as u32, d, 1.0)))
            .collect();
        SparseNonnegMatrix::from_triplets(n, Vec::new(), triplets).expect("vstrip adjacency")
    }

    /// Iteratively drop states with no incoming or no outgoing transitions.
    pub fn trim(&self) -> VStrip {
        let n = self.trans.len();
        let mut alive = vec![true; n];
        loop {
            let mut indeg = vec![0usize; n];
            let mut outdeg = vec![0usize; n];
            for (s, ts) in self.trans.iter().enumerate() {
                if !alive[s] {
                    continue;
                }
                for &(_, d) in ts {
                    if alive[d as usize] {
                        outdeg[s] += 1;
                        indeg[d as usize] += 1;
                    }
                }
            }
            let mut changed = false;
            for v in 0..n {
                if alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![u32::MAX; n];
        let mut next = 0u32;
        for v in 0..n {
            if alive[v] {
                remap[v] = next;
                next += 1;
            }
        }
        let trans: Vec<Vec<(u32, u32)>> = (0..n)
            .filter(|&v| alive[v])
            .map(|v| {
                self.trans[v]
                    .iter()
                    .filter(|&&(_, d)| alive[d as usize])
                    .map(|&(r, d)| (r, remap[d as usize]))
                    .collect()
            })
            .collect();
        VStrip {
            width: self.width,
            row_first: self.row_first.clone(),
            row_last: self.row_last.clone(),
            trans,
            row_count: self.row_count,
        }
    }
}

/// Deterministic presentation of V_n for column constraint `columns` and
/// row language `rows` over a shared alphabet: the n-fold tensor of the
/// deterministic column automaton, filtered to the valid rows. States are
/// n-tuples of column-automaton states (packed into a u64 code); the tensor
/// of a deterministic automaton is deterministic, so no subset construction
/// is needed — and the subset construction would explode here.
///
/// `boundary`: per row-alphabet label, the (sigma, tau) boundary letters in
/// V_E (edge form), or None when boundaries are not needed.
pub fn vstrip_product(
    columns: &Constraint1D,
    rows: &Constraint1D,
    n: usize,
    boundary: Option<&[(u32, u32)]>,
) -> Result<VStrip> {
    let det = columns.deterministic();
    let dg = det.graph();
    let ns = dg.vertex_count();
    let total = (ns as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    guard("vstrip tensor states", total)?;
    let total = total as usize;
    let row_words = words_of_length(rows, n)?;
    guard("vstrip rows", row_words.len() as u128)?;
    // map row label -> column det label
    let rg = rows.presentation();
    let relabel: Vec<Option<usize>> = rg.alphabet().iter().map(|l| dg.label_index(l)).collect();
    let nl = dg.alphabet().len();
    // deterministic step table: state x label -> state (or dead)
    const DEAD: u32 = u32::MAX;
    let mut delta = vec![DEAD; ns * nl];
    for e in dg.edges() {
        delta[e.src * nl + e.label] = e.dst as u32;
    }
    // rows as column-automaton label sequences, plus boundary letters
    let mut row_labels: Vec<Vec<u16>> = Vec::with_capacity(row_words.len());
    let mut row_first = Vec::new();
    let mut row_last = Vec::new();
    for w in &row_words {
        let mut seq = Vec::with_capacity(n);
        for &l in w {
            let Some(dl) = relabel[l as usize] else {
                return Err(CapError::AlphabetMismatch(format!(
                    "row symbol {} missing from column alphabet",
                    rg.label_name(l as usize)
                )));
            };
            seq.push(dl as u16);
        }
        if let Some(b) = boundary {
            row_first.push(b[w[0] as usize].0);
            row_last.push(b[w[n - 1] as usize].1);
        }
        row_labels.push(seq);
    }

    // decode tuple states on the fly from their packed code
    let mut pow = vec![1usize; n + 1];
    for i in 1..=n {
        pow[i] = pow[i - 1] * ns;
    }
    let mut trans: Vec<Vec<(u32, u32)>> = Vec::with_capacity(total);
    let mut tuple = vec![0u32; n];
    for code in 0..total {
        let mut c = code;
        for j in (0..n).rev() {
            tuple[j] = (c % ns) as u32;
            c /= ns;
        }
        let mut out = Vec::new();
        'rows: for (r, seq) in row_labels.iter().enumerate() {
            let mut dst_code = 0usize;
            for j in 0..n {
                let d = delta[tuple[j] as usize * nl + seq[j] as usize];
                if d == DEAD {
                    continue 'rows;
                }
                dst_code = dst_code * ns + d as usize;
            }
            out.push((r as u32, dst_code as u32));
        }
        trans.push(out);
    }
    Ok(VStrip {
        width: n,
        row_first,
        row_last,
        trans,
        row_count: row_labels.len(),
    }
    .trim())
}

/// Deterministic presentation of V_n for the vertex form: states are the
/// valid width-n rows with label-equals-target transitions, labels recoded
/// to boundary letters. The recoded row length is n-1 entries but only the
/// boundary letters (first and last symbol of the original row) enter the
/// auxiliary-graph construction.
pub fn vstrip_vertex(form: &VertexForm, n: usize) -> Result<VStrip> {
    let rows = words_of_length(&form.row1, n)?;
    let k = form.alphabet.len();
    let set = form.block_set();
    let compat = |u: &[u32], v: &[u32]| -> bool {
        if n == 1 {
            return form
                .col1
                .membership_indices_named(&form.alphabet, &[u[0] as usize, v[0] as usize]);
        }
        for j in 0..n - 1 {
            let code = ((u[j] as usize * k + u[j + 1] as usize) * k + v[j] as usize) * k
                + v[j + 1] as usize;
            if !set[code] {
                return false;
            }
        }
        true
    };
    let row_first: Vec<u32> = rows.iter().map(|r| r[0]).collect();
    let row_last: Vec<u32> = rows.iter().map(|r| r[n - 1]).collect();
    let mut trans: Vec<Vec<(u32, u32)>> = vec![Vec::new(); rows.len()];
    let mut total = 0u128;
    for (u, ru) in rows.iter().enumerate() {
        for (v, rv) in rows.iter().enumerate() {
            if compat(ru, rv) {
                // label-equals-target: the row symbol is the target row
                trans[u].push((v as u32, v as u32));
                total += 1;
            }
        }
        guard("vstrip transitions", total)?;
    }
    Ok(VStrip {
        width: n,
        row_first,
        row_last,
        trans,
        row_count: rows.len(),
    }
    .trim())
}

/// Strip graph as a labeled multigraph (used by the symmetry gate, which
/// checks for an edge-reversing matching on small strips).
pub fn h_strip_graph(sm: &StripMatrix) -> LabeledMultigraph {
    let labels = sm.matrix.labels();
    let mut edges = Vec::new();
    for i in 0..sm.matrix.dim() {
        for (j, w) in sm.matrix.row(i) {
            let mult = w.round() as usize;
            for t in 0..mult {
                let id = format!("{}=>{}#{}", labels[i], labels[j], t);
                edges.push((id.clone(), labels[i].clone(), labels[j].clone(), id));
            }
        }
    }
    let alphabet: Vec<String> = edges.iter().map(|e| e.0.clone()).collect();
    LabeledMultigraph::new(labels.to_vec(), alphabet, edges).expect("strip graph")
}

/// Collect boundary data (sigma, tau as V_E indices) per edge of G_E, in
/// the canonical order of the edge-id alphabet used by `words_of_length`
/// on the edge constraint.
pub fn edge_boundaries(g: &LabeledMultigraph) -> Vec<(u32, u32)> {
    let mut ids: Vec<(String, u32, u32)> = g
        .edges()
        .iter()
        .map(|e| (e.id.clone(), e.src as u32, e.dst as u32))
        .collect();
    ids.sort();
    ids.into_iter().map(|(_, s, t)| (s, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{chg, edge_constraint, even, lift, rll};
    use crate::spectral::perron;

    #[test]
    fn hard_square_h1_is_golden_transfer() {
        let r = rll(1, None).unwrap();
        let form = VertexForm::new(
            vec!["0".into(), "1".into()],
            crate::constraint::hard_square_blocks(),
            r.clone(),
            r,
        );
        let h1 = h_strip_vertex(&form, 1).unwrap();
        assert_eq!(h1.matrix.dim(), 2);
        assert_eq!(h1.matrix.entry(0, 0), 1.0);
        assert_eq!(h1.matrix.entry(0, 1), 1.0);
        assert_eq!(h1.matrix.entry(1, 0), 1.0);
        assert_eq!(h1.matrix.entry(1, 1), 0.0);
        let cert = perron(&h1.matrix, 1e-13);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((cert.lambda_hat - phi).abs() < 1e-11);
    }

    #[test]
    fn even_lift_h_strip_small() {
        let e = even();
        let lifted = lift(&e, e.presentation()).unwrap();
        let form = EdgeForm {
            transverse: lifted,
            edge_graph: e.presentation().clone(),
        };
        // H_1: single letters of the lift are unrestricted, so H_1 = even graph
        let h1 = h_strip_edge(&form, 1).unwrap();
        assert_eq!(h1.matrix.dim(), 2);
        let cert = perron(&h1.matrix, 1e-13);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((cert.lambda_hat - phi).abs() < 1e-11);
        // H_m symmetric for small m
        for m in 1..=3 {
            let hm = h_strip_edge(&form, m).unwrap();
            assert!(hm.matrix.is_symmetric(), "H_{m} not symmetric");
        }
    }

    #[test]
    fn chg3_lift_vstrip_widths() {
        let c = chg(3).unwrap();
        let lifted = lift(&c, c.presentation()).unwrap();
        let rows = edge_constraint(c.presentation());
        let bounds = edge_boundaries(c.presentation());
        let vs = vstrip_product(&lifted, &rows, 2, Some(&bounds)).unwrap();
        assert!(vs.state_count() > 0);
        // every transition row has boundary data
        assert_eq!(vs.row_first.len(), vs.row_count);
    }

    #[test]
    fn hard_square_h2_has_three_states() {
        let r = rll(1, None).unwrap();
        let form = VertexForm::new(
            vec!["0".into(), "1".into()],
            crate::constraint::hard_square_blocks(),
            r.clone(),
            r,
        );
        let h2 = h_strip_vertex(&form, 2).unwrap();
        assert_eq!(h2.matrix.dim(), 3);
        let names: Vec<&str> = h2.matrix.labels().iter().map(|s| s.as_str()).collect();
        assert_eq!(names, vec!["0,0", "0,1", "1,0"]);
    }

    #[test]
    fn words_of_length_golden_mean() {
        let r = rll(1, None).unwrap();
        let w3 = words_of_length(&r, 3).unwrap();
        assert_eq!(w3.len(), 5);
        let w4 = words_of_length(&r, 4).unwrap();
        assert_eq!(w4.len(), 8);
    }
}
