//! Directed labeled multigraphs and the transformations the rest of the
//! library builds on: subset-construction determinization, tensor powers,
//! essential trimming, edge-reversing matchings, and structural reports.
//!
//! Vertices, edges and alphabet are kept in canonical (sorted) order so that
//! every derived matrix and report is byte-identical across runs.

use crate::error::{guard, CapError, Result};
use crate::spectral::{scc_of_adjacency, SparseNonnegMatrix};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

/// Directed multigraph with edge labels drawn from a finite alphabet.
/// Parallel edges are permitted; edge ids are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMultigraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    alphabet: Vec<String>,
    vindex: HashMap<String, usize>,
}

impl LabeledMultigraph {
    /// Build a graph from names. Vertices, alphabet and edges are sorted into
    /// canonical order; every edge endpoint and label must be declared.
    pub fn new(
        vertices: Vec<String>,
        alphabet: Vec<String>,
        edges: Vec<(String, String, String, String)>, // (id, src, dst, label)
    ) -> Result<Self> {
        let mut vs: Vec<String> = vertices;
        vs.sort();
        vs.dedup();
        let mut al: Vec<String> = alphabet;
        al.sort();
        al.dedup();
        let vindex: HashMap<String, usize> =
            vs.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let aindex: HashMap<&str, usize> = al
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), i))
            .collect();
        let mut es = Vec::with_capacity(edges.len());
        let mut seen_ids = BTreeSet::new();
        for (id, src, dst, label) in edges {
            let &s = vindex.get(&src).ok_or_else(|| {
                CapError::InvalidGraph(format!("edge {id}: unknown vertex {src}"))
            })?;
            let &d = vindex.get(&dst).ok_or_else(|| {
                CapError::InvalidGraph(format!("edge {id}: unknown vertex {dst}"))
            })?;
            let &l = aindex.get(label.as_str()).ok_or_else(|| {
                CapError::InvalidGraph(format!("edge {id}: label {label} not in alphabet"))
            })?;
            if !seen_ids.insert(id.clone()) {
                return Err(CapError::InvalidGraph(format!("duplicate edge id {id}")));
            }
            es.push(Edge {
                id,
                src: s,
                dst: d,
                label: l,
            });
        }
        es.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Self {
            vertices: vs,
            edges: es,
            alphabet: al,
            vindex,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn label_name(&self, i: usize) -> &str {
        &self.alphabet[i]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vindex.get(name).copied()
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.alphabet
            .binary_search_by(|a| a.as_str().cmp(name))
            .ok()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Out-edges of each vertex, edge indices in canonical order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (k, e) in self.edges.iter().enumerate() {
            out[e.src].push(k);
        }
        out
    }

    pub fn in_degree(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            d[e.dst] += 1;
        }
        d
    }

    pub fn out_degree(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            d[e.src] += 1;
        }
        d
    }

    /// Adjacency matrix with multiplicity, rows/cols in vertex order.
    pub fn adjacency(&self) -> SparseNonnegMatrix {
        let triplets: Vec<(u32, u32, f64)> = self
            .edges
            .iter()
            .map(|e| (e.src as u32, e.dst as u32, 1.0))
            .collect();
        SparseNonnegMatrix::from_triplets(self.vertices.len(), self.vertices.clone(), triplets)
            .expect("adjacency construction cannot fail")
    }

    /// True when no two distinct edges share (src, label).
    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !seen.insert((e.src, e.label)) {
                return false;
            }
        }
        true
    }

    /// All words of length <= max_len generated by paths (from any vertex),
    /// as label-index sequences, in (length, lexicographic) order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        let out = self.out_edges();
        let mut words: BTreeSet<Vec<usize>> = BTreeSet::new();
        if !self.vertices.is_empty() {
            words.insert(Vec::new());
        }
        // frontier: set of (vertex) reachable generating each word; BFS on words
        let mut frontier: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
        frontier.insert(Vec::new(), (0..self.vertices.len()).collect());
        for _ in 0..max_len {
            let mut next: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
            for (w, starts) in &frontier {
                for &v in starts {
                    for &k in &out[v] {
                        let e = &self.edges[k];
                        let mut w2 = w.clone();
                        w2.push(e.label);
                        next.entry(w2).or_default().insert(e.dst);
                    }
                }
            }
            for w in next.keys() {
                words.insert(w.clone());
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let mut v: Vec<Vec<usize>> = words.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter()
            .map(|&l| self.alphabet[l].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A graph together with a determinism certificate.
#[derive(Debug, Clone)]
pub struct DeterministicGraph {
    graph: LabeledMultigraph,
}

impl DeterministicGraph {
    pub fn check(graph: LabeledMultigraph) -> Result<Self> {
        if graph.is_deterministic() {
            Ok(Self { graph })
        } else {
            Err(CapError::InvalidGraph(
                "two edges share (source, label)".into(),
            ))
        }
    }

    pub fn graph(&self) -> &LabeledMultigraph {
        &self.graph
    }

    pub fn into_graph(self) -> LabeledMultigraph {
        self.graph
    }

    /// Transition table: state -> label -> next state.
    pub fn transitions(&self) -> Vec<BTreeMap<usize, usize>> {
        let mut t = vec![BTreeMap::new(); self.graph.vertex_count()];
        for e in self.graph.edges() {
            t[e.src].insert(e.label, e.dst);
        }
        t
    }
}

/// Subset construction seeded from every singleton vertex set. The output
/// generates exactly the same word set as the input; an already-deterministic
/// graph comes back isomorphic to itself (parallel same-label edges collapse).
pub fn determinize(g: &LabeledMultigraph) -> Result<DeterministicGraph> {
    if g.is_empty() {
        return Err(CapError::InvalidGraph("determinize of empty graph".into()));
    }
    let out = g.out_edges();
    let mut states: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    let mut queue: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.vertex_count() {
        let s = vec![v];
        if !states.contains_key(&s) {
            states.insert(s.clone(), order.len());
            order.push(s.clone());
            queue.push(s);
        }
    }
    let mut trans: Vec<(Vec<usize>, usize, Vec<usize>)> = Vec::new();
    while let Some(s) = queue.pop() {
        let mut by_label: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &v in &s {
            for &k in &out[v] {
                let e = &g.edges()[k];
                by_label.entry(e.label).or_default().insert(e.dst);
            }
        }
        for (label, dsts) in by_label {
            let t: Vec<usize> = dsts.into_iter().collect();
            if !states.contains_key(&t) {
                states.insert(t.clone(), order.len());
                order.push(t.clone());
                queue.push(t.clone());
            }
            trans.push((s.clone(), label, t));
        }
        guard("determinize states", (states.len() + trans.len()) as u128)?;
    }
    let name = |s: &Vec<usize>| -> String {
        let mut n = String::from("{");
        for (i, &v) in s.iter().enumerate() {
            if i > 0 {
                n.push(',');
            }
            n.push_str(g.vertex_name(v));
        }
        n.push('}');
        n
    };
    let vertices: Vec<String> = order.iter().map(name).collect();
    let edges: Vec<(String, String, String, String)> = trans
        .iter()
        .map(|(s, l, t)| {
            let sid = name(s);
            (
                format!("{sid}.{}", g.label_name(*l)),
                sid.clone(),
                name(t),
                g.label_name(*l).to_string(),
            )
        })
        .collect();
    let graph = LabeledMultigraph::new(vertices, g.alphabet().to_vec(), edges)?;
    DeterministicGraph::check(graph)
}

/// m-th tensor power: vertices V^m, edges E^m with componentwise endpoints
/// and tuple labels.
pub fn tensor_power(g: &LabeledMultigraph, m: usize) -> Result<LabeledMultigraph> {
    if m == 0 {
        return Err(CapError::InvalidParams("tensor power needs m >= 1".into()));
    }
    let nv = (g.vertex_count() as u128).checked_pow(m as u32);
    let ne = (g.edge_count() as u128).checked_pow(m as u32);
    match (nv, ne) {
        (Some(nv), Some(ne)) => {
            guard("tensor power vertices", nv)?;
            guard("tensor power edges", ne)?;
        }
        _ => {
            return Err(CapError::SizeGuard {
                what: "tensor power".into(),
                required: u128::MAX,
                limit: crate::error::edge_limit(),
            })
        }
    }
    let mut vertices = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    tuple_walk(g.vertex_count(), m, &mut stack, &mut |tuple| {
        vertices.push(tuple_name(tuple, |i| g.vertex_name(i)));
    });
    let mut labels = BTreeSet::new();
    let mut edges = Vec::new();
    let mut estack: Vec<usize> = Vec::new();
    tuple_walk(g.edge_count(), m, &mut estack, &mut |tuple| {
        let id = tuple_name(tuple, |i| g.edges()[i].id.as_str());
        let src = tuple_name(tuple, |i| g.vertex_name(g.edges()[i].src));
        let dst = tuple_name(tuple, |i| g.vertex_name(g.edges()[i].dst));
        let label = tuple_name(tuple, |i| g.label_name(g.edges()[i].label));
        labels.insert(label.clone());
        edges.push((id, src, dst, label));
    });
    LabeledMultigraph::new(vertices, labels.into_iter().collect(), edges)
}

fn tuple_walk(base: usize, m: usize, stack: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if stack.len() == m {
        f(stack);
        return;
    }
    for i in 0..base {
        stack.push(i);
        tuple_walk(base, m, stack, f);
        stack.pop();
    }
}

pub(crate) fn tuple_name<'a>(tuple: &[usize], part: impl Fn(usize) -> &'a str) -> String {
    if tuple.len() == 1 {
        return part(tuple[0]).to_string();
    }
    let mut s = String::from("(");
    for (i, &t) in tuple.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(part(t));
    }
    s.push(')');
    s
}

/// Iteratively delete vertices with zero in-degree or zero out-degree.
/// Preserves the Perron eigenvalue of the adjacency matrix.
pub fn trim_essential(g: &LabeledMultigraph) -> LabeledMultigraph {
    let mut alive_v = vec![true; g.vertex_count()];
    let mut alive_e = vec![true; g.edge_count()];
    loop {
        let mut indeg = vec![0usize; g.vertex_count()];
        let mut outdeg = vec![0usize; g.vertex_count()];
        for (k, e) in g.edges().iter().enumerate() {
            if alive_e[k] {
                outdeg[e.src] += 1;
                indeg[e.dst] += 1;
            }
        }
        let mut changed = false;
        for v in 0..g.vertex_count() {
            if alive_v[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                alive_v[v] = false;
                changed = true;
            }
        }
        for (k, e) in g.edges().iter().enumerate() {
            if alive_e[k] && (!alive_v[e.src] || !alive_v[e.dst]) {
                alive_e[k] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let vertices: Vec<String> = (0..g.vertex_count())
        .filter(|&v| alive_v[v])
        .map(|v| g.vertex_name(v).to_string())
        .collect();
    let edges: Vec<(String, String, String, String)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(k, _)| alive_e[*k])
        .map(|(_, e)| {
            (
                e.id.clone(),
                g.vertex_name(e.src).to_string(),
                g.vertex_name(e.dst).to_string(),
                g.label_name(e.label).to_string(),
            )
        })
        .collect();
    LabeledMultigraph::new(vertices, g.alphabet().to_vec(), edges)
        .expect("trim of valid graph is valid")
}

/// Involution on edge ids that reverses endpoints (and, optionally,
/// preserves labels).
#[derive(Debug, Clone)]
pub struct EdgeReversingMatching {
    /// `partner[k]` = partner edge index of edge k
    pub partner: Vec<usize>,
    pub label_preserving: bool,
}

impl EdgeReversingMatching {
    pub fn validate(&self, g: &LabeledMultigraph) -> bool {
        if self.partner.len() != g.edge_count() {
            return false;
        }
        for (k, &p) in self.partner.iter().enumerate() {
            if p >= g.edge_count() || self.partner[p] != k {
                return false;
            }
            let e = &g.edges()[k];
            let r = &g.edges()[p];
            if (e.src, e.dst) != (r.dst, r.src) {
                return false;
            }
            if self.label_preserving && e.label != r.label {
                return false;
            }
        }
        true
    }
}

/// Find an edge-reversing matching if one exists.
///
/// Decided per (unordered vertex pair [, label]) bucket: the number of u->v
/// edges must equal the number of v->u edges. Loops satisfy the reversal
/// condition on their own, so loop buckets always match (pairing loops
/// arbitrarily, one self-matched if odd).
pub fn find_edge_reversing_matching(
    g: &LabeledMultigraph,
    label_preserving: bool,
) -> Option<EdgeReversingMatching> {
    let mut buckets: BTreeMap<(usize, usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (k, e) in g.edges().iter().enumerate() {
        let (a, b) = (e.src.min(e.dst), e.src.max(e.dst));
        let l = if label_preserving {
            e.label
        } else {
            usize::MAX
        };
        let entry = buckets.entry((a, b, l)).or_default();
        if e.src <= e.dst {
            entry.0.push(k);
        } else {
            entry.1.push(k);
        }
    }
    let mut partner = vec![usize::MAX; g.edge_count()];
    for ((a, b, _), (fwd, bwd)) in buckets {
        if a == b {
            // loops: pair in canonical order, odd one self-matches
            let mut i = 0;
            while i + 1 < fwd.len() {
                partner[fwd[i]] = fwd[i + 1];
                partner[fwd[i + 1]] = fwd[i];
                i += 2;
            }
            if i < fwd.len() {
                partner[fwd[i]] = fwd[i];
            }
        } else {
            if fwd.len() != bwd.len() {
                return None;
            }
            for (x, y) in fwd.iter().zip(bwd.iter()) {
                partner[*x] = *y;
                partner[*y] = *x;
            }
        }
    }
    let m = EdgeReversingMatching {
        partner,
        label_preserving,
    };
    debug_assert!(m.validate(g));
    Some(m)
}

/// Strongly connected components, irreducibility, period and primitivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    /// components as sorted vertex-index lists, canonical order
    pub sccs: Vec<Vec<usize>>,
    pub irreducible: bool,
    pub primitive: bool,
    /// gcd of all cycle lengths; 0 when the graph has no cycle
    pub period: usize,
}

pub fn structure_report(g: &LabeledMultigraph) -> StructureReport {
    let out = g.out_edges();
    let n = g.vertex_count();
    let sccs = scc_of_adjacency(n, |v| out[v].iter().map(|&k| g.edges()[k].dst));
    let mut comp_of = vec![usize::MAX; n];
    for (c, comp) in sccs.iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    let mut isolated = vec![true; n];
    for e in g.edges() {
        isolated[e.src] = false;
        isolated[e.dst] = false;
    }
    // period per SCC via BFS level differences, combined by gcd
    let mut period = 0usize;
    let mut nontrivial = 0usize;
    for (c, comp) in sccs.iter().enumerate() {
        let has_edge = comp
            .iter()
            .any(|&v| out[v].iter().any(|&k| comp_of[g.edges()[k].dst] == c));
        if !has_edge {
            continue;
        }
        nontrivial += 1;
        let mut level: BTreeMap<usize, i64> = BTreeMap::new();
        let root = comp[0];
        level.insert(root, 0);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);
        let mut g_scc = 0i64;
        while let Some(v) = queue.pop_front() {
            let lv = level[&v];
            for &k in &out[v] {
                let w = g.edges()[k].dst;
                if comp_of[w] != c {
                    continue;
                }
                if let Some(&lw) = level.get(&w) {
                    g_scc = gcd_i64(g_scc, (lv + 1 - lw).abs());
                } else {
                    level.insert(w, lv + 1);
                    queue.push_back(w);
                }
            }
        }
        period = gcd_i64(period as i64, g_scc) as usize;
    }
    let non_isolated_comps = sccs
        .iter()
        .filter(|comp| comp.iter().any(|&v| !isolated[v]))
        .count();
    let irreducible = nontrivial > 0
        && non_isolated_comps == 1
        && sccs
            .iter()
            .filter(|comp| comp.iter().any(|&v| !isolated[v]))
            .all(|comp| comp.iter().all(|&v| !isolated[v]));
    StructureReport {
        sccs,
        irreducible,
        primitive: irreducible && period == 1,
        period,
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Line-oriented UTF-8 graph text format.
///
/// ```text
/// # comment
/// alphabet 0 1
/// vertex A
/// vertex B
/// edge e0 A B 0
/// ```
pub fn to_text(g: &LabeledMultigraph) -> String {
    let mut s = String::new();
    s.push_str("alphabet");
    for a in g.alphabet() {
        let _ = write!(s, " {a}");
    }
    s.push('\n');
    for v in g.vertices() {
        let _ = writeln!(s, "vertex {v}");
    }
    for e in g.edges() {
        let _ = writeln!(
            s,
            "edge {} {} {} {}",
            e.id,
            g.vertex_name(e.src),
            g.vertex_name(e.dst),
            g.label_name(e.label)
        );
    }
    s
}

pub fn from_text(text: &str) -> Result<LabeledMultigraph> {
    let mut alphabet = Vec::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("alphabet") => alphabet.extend(tok.map(str::to_string)),
            Some("vertex") => {
                let v = tok
                    .next()
                    .ok_or_else(|| CapError::Parse(format!("line {}: vertex needs id", ln + 1)))?;
                vertices.push(v.to_string());
            }
            Some("edge") => {
                let parts: Vec<&str> = tok.collect();
                if parts.len() != 4 {
                    return Err(CapError::Parse(format!(
                        "line {}: edge needs <id> <src> <dst> <label>",
                        ln + 1
                    )));
                }
                edges.push((
                    parts[0].to_string(),
                    parts[1].to_string(),
                    parts[2].to_string(),
                    parts[3].to_string(),
                ));
            }
            Some(other) => {
                return Err(CapError::Parse(format!(
                    "line {}: unknown directive {other}",
                    ln + 1
                )))
            }
            None => {}
        }
    }
    LabeledMultigraph::new(vertices, alphabet, edges)
}
