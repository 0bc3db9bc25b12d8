//! 1D and 2D constrained systems: built-in presentations, axial products,
//! strips, higher-block recoding, lifting through a lossless presentation,
//! and word membership.

use crate::error::{guard, CapError, Result};
use crate::graph::{
    determinize, tensor_power, trim_essential, tuple_name, DeterministicGraph, LabeledMultigraph,
};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// A 1-dimensional constrained system given by a presentation, with a
/// lazily-built deterministic presentation used for membership tests.
#[derive(Debug, Clone)]
pub struct Constraint1D {
    pub name: String,
    presentation: LabeledMultigraph,
    det: OnceLock<DeterministicGraph>,
}

impl Constraint1D {
    pub fn new(name: impl Into<String>, presentation: LabeledMultigraph) -> Self {
        Self {
            name: name.into(),
            presentation,
            det: OnceLock::new(),
        }
    }

    pub fn presentation(&self) -> &LabeledMultigraph {
        &self.presentation
    }

    pub fn alphabet(&self) -> &[String] {
        self.presentation.alphabet()
    }

    /// Deterministic presentation (subset construction, cached).
    pub fn deterministic(&self) -> &DeterministicGraph {
        self.det.get_or_init(|| {
            determinize(&self.presentation).expect("determinize of nonempty presentation")
        })
    }

    /// True iff some path in the presentation generates the word.
    /// Symbols outside the alphabet make the word a non-member.
    pub fn membership(&self, word: &[&str]) -> bool {
        if self.presentation.is_empty() {
            return false;
        }
        let det = self.deterministic();
        let g = det.graph();
        let mut labels = Vec::with_capacity(word.len());
        for w in word {
            match g.label_index(w) {
                Some(l) => labels.push(l),
                None => return false,
            }
        }
        self.membership_indices(&labels)
    }

    /// Membership where the word is given as indices into this constraint's
    /// deterministic presentation alphabet.
    pub fn membership_indices(&self, word: &[usize]) -> bool {
        let det = self.deterministic();
        let trans = det.transitions();
        let mut subset: Vec<usize> = (0..det.graph().vertex_count()).collect();
        for &l in word {
            let mut next = BTreeSet::new();
            for &s in &subset {
                if let Some(&t) = trans[s].get(&l) {
                    next.insert(t);
                }
            }
            if next.is_empty() {
                return false;
            }
            subset = next.into_iter().collect();
        }
        true
    }

    /// Membership of a word given as indices into an external symbol table.
    pub fn membership_indices_named(&self, names: &[String], word: &[usize]) -> bool {
        let tokens: Vec<&str> = word.iter().map(|&i| names[i].as_str()).collect();
        self.membership(&tokens)
    }

    /// All words of length <= max_len, in (length, lex) order, as label names.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<String>> {
        self.presentation
            .words_up_to(max_len)
            .into_iter()
            .map(|w| {
                w.into_iter()
                    .map(|l| self.presentation.label_name(l).to_string())
                    .collect()
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// built-in 1D constraints (Fig. 1 presentations)
// ---------------------------------------------------------------------------

/// EVEN: binary words with an even number of 0s between consecutive 1s.
pub fn even() -> Constraint1D {
    let g = LabeledMultigraph::new(
        vec!["A".into(), "B".into()],
        vec!["0".into(), "1".into()],
        vec![
            ("A-0>B".into(), "A".into(), "B".into(), "0".into()),
            ("B-0>A".into(), "B".into(), "A".into(), "0".into()),
            ("A-1>A".into(), "A".into(), "A".into(), "1".into()),
        ],
    )
    .unwrap();
    Constraint1D::new("even", g)
}

/// ODD: binary words with an odd number of 0s between consecutive 1s.
pub fn odd() -> Constraint1D {
    let g = LabeledMultigraph::new(
        vec!["A".into(), "B".into()],
        vec!["0".into(), "1".into()],
        vec![
            ("A-0>B".into(), "A".into(), "B".into(), "0".into()),
            ("B-0>A".into(), "B".into(), "A".into(), "0".into()),
            ("B-1>A".into(), "B".into(), "A".into(), "1".into()),
        ],
    )
    .unwrap();
    Constraint1D::new("odd", g)
}

/// CHG(b): words over {+1,-1} whose every interval sum stays in [-b, b].
pub fn chg(b: usize) -> Result<Constraint1D> {
    if b < 1 {
        return Err(CapError::InvalidParams("chg needs b >= 1".into()));
    }
    let width = b.to_string().len();
    let name = |i: usize| format!("c{:0w$}", i, w = width);
    let vertices: Vec<String> = (0..=b).map(name).collect();
    let mut edges = Vec::new();
    for i in 0..b {
        edges.push((
            format!("{}+", name(i)),
            name(i),
            name(i + 1),
            "+1".to_string(),
        ));
        edges.push((
            format!("{}-", name(i + 1)),
            name(i + 1),
            name(i),
            "-1".to_string(),
        ));
    }
    let g = LabeledMultigraph::new(vertices, vec!["+1".into(), "-1".into()], edges)?;
    Ok(Constraint1D::new(format!("chg:{b}"), g))
}

/// RLL(d, k): binary words with >= d zeros between consecutive 1s and every
/// run of zeros of length <= k. `k = None` means unbounded.
pub fn rll(d: usize, k: Option<usize>) -> Result<Constraint1D> {
    let last = match k {
        Some(k) if d > k => {
            return Err(CapError::InvalidParams(format!(
                "rll needs d <= k, got {d} > {k}"
            )))
        }
        Some(k) => k,
        None => d,
    };
    let width = last.max(1).to_string().len();
    let name = |i: usize| format!("r{:0w$}", i, w = width);
    let vertices: Vec<String> = (0..=last).map(name).collect();
    let mut edges = Vec::new();
    for i in 0..last {
        edges.push((
            format!("{}z", name(i)),
            name(i),
            name(i + 1),
            "0".to_string(),
        ));
    }
    if k.is_none() {
        edges.push((
            format!("{}z", name(last)),
            name(last),
            name(last),
            "0".to_string(),
        ));
    }
    for i in d..=last {
        edges.push((format!("{}o", name(i)), name(i), name(0), "1".to_string()));
    }
    let g = LabeledMultigraph::new(vertices, vec!["0".into(), "1".into()], edges)?;
    let kname = k.map(|k| k.to_string()).unwrap_or_else(|| "inf".into());
    Ok(Constraint1D::new(format!("rll:{d}:{kname}"), g))
}

/// Full shift over an explicit alphabet: one vertex, one loop per symbol.
pub fn full_shift(alphabet: &[&str]) -> Constraint1D {
    let edges = alphabet
        .iter()
        .map(|a| {
            (
                format!("l{a}"),
                "v".to_string(),
                "v".to_string(),
                a.to_string(),
            )
        })
        .collect();
    let g = LabeledMultigraph::new(
        vec!["v".into()],
        alphabet.iter().map(|a| a.to_string()).collect(),
        edges,
    )
    .unwrap();
    Constraint1D::new("full", g)
}

/// Edge constraint X(G): words are edge sequences forming paths in G;
/// presentation is G with identity labeling (label = edge id).
pub fn edge_constraint(g: &LabeledMultigraph) -> Constraint1D {
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                g.vertex_name(e.src).to_string(),
                g.vertex_name(e.dst).to_string(),
                e.id.clone(),
            )
        })
        .collect();
    let alphabet = g.edges().iter().map(|e| e.id.clone()).collect();
    let graph =
        LabeledMultigraph::new(g.vertices().to_vec(), alphabet, edges).expect("identity relabel");
    Constraint1D::new("edge-constraint", graph)
}

/// Lift of a 1D constraint T through a lossless presentation of S: the
/// constraint over the edges of `s_pres` whose label words lie in T.
/// Losslessness of `s_pres` is a documented precondition, not checked.
pub fn lift(t: &Constraint1D, s_pres: &LabeledMultigraph) -> Result<Constraint1D> {
    let ta: BTreeSet<&str> = t.alphabet().iter().map(|s| s.as_str()).collect();
    let sa: BTreeSet<&str> = s_pres.alphabet().iter().map(|s| s.as_str()).collect();
    if ta != sa {
        return Err(CapError::AlphabetMismatch(format!(
            "lift: constraint alphabet {ta:?} vs presentation labels {sa:?}"
        )));
    }
    let tg = t.presentation();
    let mut edges = Vec::new();
    for et in tg.edges() {
        for es in s_pres.edges() {
            if tg.label_name(et.label) == s_pres.label_name(es.label) {
                edges.push((
                    format!("({},{})", et.id, es.id),
                    tg.vertex_name(et.src).to_string(),
                    tg.vertex_name(et.dst).to_string(),
                    es.id.clone(),
                ));
            }
        }
    }
    let alphabet = s_pres.edges().iter().map(|e| e.id.clone()).collect();
    let g = LabeledMultigraph::new(tg.vertices().to_vec(), alphabet, edges)?;
    Ok(Constraint1D::new(format!("lift({})", t.name), g))
}

// ---------------------------------------------------------------------------
// 2D presentations
// ---------------------------------------------------------------------------

/// Two labeled graphs over one edge set and one labeling; direction 1
/// (the `vertical` graph) constrains columns, direction 2 rows.
#[derive(Debug, Clone)]
pub struct Presentation2D {
    vertical: LabeledMultigraph,
    horizontal: LabeledMultigraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripDirection {
    Horizontal,
    Vertical,
}

impl Presentation2D {
    pub fn new(vertical: LabeledMultigraph, horizontal: LabeledMultigraph) -> Result<Self> {
        if vertical.edge_count() != horizontal.edge_count() {
            return Err(CapError::InvalidGraph(
                "2D presentation graphs must share one edge set".into(),
            ));
        }
        for (ev, eh) in vertical.edges().iter().zip(horizontal.edges()) {
            if ev.id != eh.id || vertical.label_name(ev.label) != horizontal.label_name(eh.label) {
                return Err(CapError::InvalidGraph(format!(
                    "2D presentation edge mismatch at {} / {}",
                    ev.id, eh.id
                )));
            }
        }
        Ok(Self {
            vertical,
            horizontal,
        })
    }

    pub fn vertical(&self) -> &LabeledMultigraph {
        &self.vertical
    }

    pub fn horizontal(&self) -> &LabeledMultigraph {
        &self.horizontal
    }

    pub fn alphabet(&self) -> &[String] {
        self.vertical.alphabet()
    }

    pub fn edge_count(&self) -> usize {
        self.vertical.edge_count()
    }
}

/// Swap the roles of the two graphs: |S_{m x n}| = |tr(S)_{n x m}|.
pub fn transpose_2d(s: &Presentation2D) -> Presentation2D {
    Presentation2D {
        vertical: s.horizontal.clone(),
        horizontal: s.vertical.clone(),
    }
}

/// Axial product presentation of two 1D constraints over one alphabet:
/// edges are label-agreeing pairs, endpoints inherited per direction.
pub fn axial_2d(columns: &Constraint1D, rows: &Constraint1D) -> Result<Presentation2D> {
    let ca: BTreeSet<&str> = columns.alphabet().iter().map(|s| s.as_str()).collect();
    let ra: BTreeSet<&str> = rows.alphabet().iter().map(|s| s.as_str()).collect();
    if ca != ra {
        return Err(CapError::AlphabetMismatch(format!(
            "axial: {ca:?} vs {ra:?}"
        )));
    }
    let g1 = columns.presentation();
    let g2 = rows.presentation();
    let mut v_edges = Vec::new();
    let mut h_edges = Vec::new();
    for e1 in g1.edges() {
        for e2 in g2.edges() {
            let l1 = g1.label_name(e1.label);
            if l1 != g2.label_name(e2.label) {
                continue;
            }
            let id = format!("({},{})", e1.id, e2.id);
            v_edges.push((
                id.clone(),
                g1.vertex_name(e1.src).to_string(),
                g1.vertex_name(e1.dst).to_string(),
                l1.to_string(),
            ));
            h_edges.push((
                id,
                g2.vertex_name(e2.src).to_string(),
                g2.vertex_name(e2.dst).to_string(),
                l1.to_string(),
            ));
        }
    }
    let alphabet: Vec<String> = columns.alphabet().to_vec();
    let vertical = LabeledMultigraph::new(g1.vertices().to_vec(), alphabet.clone(), v_edges)?;
    let horizontal = LabeledMultigraph::new(g2.vertices().to_vec(), alphabet, h_edges)?;
    Presentation2D::new(vertical, horizontal)
}

/// Either a plain 1D constraint (D = 1) or a 2D presentation (D = 2).
/// Counting for D >= 3 goes through the isotropic oracle instead.
pub enum AxialPresentation {
    OneD(Constraint1D),
    TwoD(Presentation2D),
}

pub fn axial_presentation(cs: &[Constraint1D]) -> Result<AxialPresentation> {
    match cs {
        [] => Err(CapError::InvalidParams("axial of zero constraints".into())),
        [c] => Ok(AxialPresentation::OneD(c.clone())),
        [a, b] => Ok(AxialPresentation::TwoD(axial_2d(a, b)?)),
        _ => Err(CapError::InvalidParams(
            "axial presentations support D <= 2; use isotropic counting for higher D".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Fig. 2 presentations: NAK and RWIM over 2x2 binary blocks
// ---------------------------------------------------------------------------

fn block_presentation(blocks: &[[u8; 4]]) -> Presentation2D {
    let bit = |b: u8| if b == 0 { "0" } else { "1" };
    let mut v_edges = Vec::new();
    let mut h_edges = Vec::new();
    let mut v_vertices = BTreeSet::new();
    let mut h_vertices = BTreeSet::new();
    for &[e00, e01, e10, e11] in blocks {
        let id = format!("m{e00}{e01}{e10}{e11}");
        let label = bit(e11).to_string();
        let v_src = format!("{e00}{e01}");
        let v_dst = format!("{e10}{e11}");
        let h_src = format!("{e00}{e10}");
        let h_dst = format!("{e01}{e11}");
        v_vertices.insert(v_src.clone());
        v_vertices.insert(v_dst.clone());
        h_vertices.insert(h_src.clone());
        h_vertices.insert(h_dst.clone());
        v_edges.push((id.clone(), v_src, v_dst, label.clone()));
        h_edges.push((id, h_src, h_dst, label));
    }
    let alphabet = vec!["0".to_string(), "1".to_string()];
    let vertical =
        LabeledMultigraph::new(v_vertices.into_iter().collect(), alphabet.clone(), v_edges)
            .unwrap();
    let horizontal =
        LabeledMultigraph::new(h_vertices.into_iter().collect(), alphabet, h_edges).unwrap();
    Presentation2D::new(vertical, horizontal).unwrap()
}

/// All 2x2 binary blocks admissible for NAK: at most one 1.
pub fn nak_blocks() -> Vec<[u8; 4]> {
    let mut out = vec![[0, 0, 0, 0]];
    for i in 0..4 {
        let mut b = [0u8; 4];
        b[i] = 1;
        out.push(b);
    }
    out
}

/// Blocks for RWIM: NAK blocks plus the two vertical-pair blocks.
pub fn rwim_blocks() -> Vec<[u8; 4]> {
    let mut out = nak_blocks();
    out.push([1, 0, 1, 0]);
    out.push([0, 1, 0, 1]);
    out
}

/// Blocks for the hard-square constraint: no two orthogonally adjacent 1s.
pub fn hard_square_blocks() -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for v in 0u8..16 {
        let b = [v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1];
        let horiz = (b[0] & b[1]) | (b[2] & b[3]);
        let vert = (b[0] & b[2]) | (b[1] & b[3]);
        if horiz == 0 && vert == 0 {
            out.push(b);
        }
    }
    out
}

pub fn nak() -> Presentation2D {
    block_presentation(&nak_blocks())
}

pub fn rwim() -> Presentation2D {
    block_presentation(&rwim_blocks())
}

pub fn builtin_2d(name: &str) -> Result<Presentation2D> {
    match name {
        "nak" => Ok(nak()),
        "rwim" => Ok(rwim()),
        "rwim-t" => Ok(transpose_2d(&rwim())),
        "hard-square" | "hard_square" => {
            let g = rll(1, None)?;
            axial_2d(&g, &g)
        }
        "even2" => axial_2d(&even(), &even()),
        "chg2-2d" | "chg2x2" => {
            let c = chg(2)?;
            axial_2d(&c, &c)
        }
        "chg3-2d" | "chg3x2" => {
            let c = chg(3)?;
            axial_2d(&c, &c)
        }
        other => Err(CapError::InvalidParams(format!(
            "unknown 2D preset {other}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// [1x2]-higher block recoding
// ---------------------------------------------------------------------------

/// The `[1x2]`-higher block recoding of a 2D presentation: new edges are
/// horizontal 2-paths (e0 e1), labeled by the symbol pair; the counting
/// identity |S_{m x n}| = |S'_{m x (n-1)}| holds. General [s x t] recodings
/// exist but only `[1x2]` is needed to turn vertex-constrained strips into
/// edge-constrained ones, so only `[1x2]` is built.
pub fn recode_1x2(s: &Presentation2D) -> Result<Presentation2D> {
    let gv = s.vertical();
    let gh = s.horizontal();
    guard(
        "recode_1x2 edges",
        (gh.edge_count() as u128) * (gh.edge_count() as u128),
    )?;
    let mut v_edges = Vec::new();
    let mut h_edges = Vec::new();
    let mut v_vertices = BTreeSet::new();
    let mut h_vertices = BTreeSet::new();
    let mut labels = BTreeSet::new();
    let out = gh.out_edges();
    for e0 in gh.edges() {
        for &k1 in &out[e0.dst] {
            let e1 = &gh.edges()[k1];
            let id = format!("({},{})", e0.id, e1.id);
            let label = format!("({},{})", gh.label_name(e0.label), gh.label_name(e1.label));
            let gv_e0 = gv
                .edges()
                .iter()
                .find(|e| e.id == e0.id)
                .expect("shared edge set");
            let gv_e1 = gv
                .edges()
                .iter()
                .find(|e| e.id == e1.id)
                .expect("shared edge set");
            let v_src = format!(
                "({},{})",
                gv.vertex_name(gv_e0.src),
                gv.vertex_name(gv_e1.src)
            );
            let v_dst = format!(
                "({},{})",
                gv.vertex_name(gv_e0.dst),
                gv.vertex_name(gv_e1.dst)
            );
            v_vertices.insert(v_src.clone());
            v_vertices.insert(v_dst.clone());
            h_vertices.insert(e0.id.clone());
            h_vertices.insert(e1.id.clone());
            labels.insert(label.clone());
            v_edges.push((id.clone(), v_src, v_dst, label.clone()));
            h_edges.push((id, e0.id.clone(), e1.id.clone(), label));
        }
    }
    let alphabet: Vec<String> = labels.into_iter().collect();
    let vertical =
        LabeledMultigraph::new(v_vertices.into_iter().collect(), alphabet.clone(), v_edges)?;
    let horizontal = LabeledMultigraph::new(h_vertices.into_iter().collect(), alphabet, h_edges)?;
    Presentation2D::new(vertical, horizontal)
}

// ---------------------------------------------------------------------------
// strips
// ---------------------------------------------------------------------------

/// Horizontal (height-m) or vertical (width-m) strip of a general 2D
/// presentation, read through its edge constraints: strip edges are
/// m-tuples of presentation edges forming a path in the
/// transverse-direction graph, relabeled entrywise.
pub fn strip(s: &Presentation2D, m: usize, dir: StripDirection) -> Result<Constraint1D> {
    if m == 0 {
        return Err(CapError::InvalidParams("strip needs m >= 1".into()));
    }
    let (path_graph, other_graph) = match dir {
        StripDirection::Horizontal => (s.vertical(), s.horizontal()),
        StripDirection::Vertical => (s.horizontal(), s.vertical()),
    };
    let out = path_graph.out_edges();
    let mut tuple: Vec<usize> = Vec::with_capacity(m);
    let mut edges: Vec<(String, String, String, String)> = Vec::new();
    let mut vertices: BTreeSet<String> = BTreeSet::new();
    let mut labels: BTreeSet<String> = BTreeSet::new();
    let mut emitted: u128 = 0;

    fn dfs(
        path_graph: &LabeledMultigraph,
        other_graph: &LabeledMultigraph,
        out: &[Vec<usize>],
        m: usize,
        tuple: &mut Vec<usize>,
        edges: &mut Vec<(String, String, String, String)>,
        vertices: &mut BTreeSet<String>,
        labels: &mut BTreeSet<String>,
        emitted: &mut u128,
    ) -> Result<()> {
        if tuple.len() == m {
            *emitted += 1;
            guard("strip edges", *emitted)?;
            let id = tuple_name(tuple, |i| path_graph.edges()[i].id.as_str());
            let src = tuple_name(tuple, |i| {
                other_graph.vertex_name(other_graph.edges()[i].src)
            });
            let dst = tuple_name(tuple, |i| {
                other_graph.vertex_name(other_graph.edges()[i].dst)
            });
            let label = tuple_name(tuple, |i| {
                path_graph.label_name(path_graph.edges()[i].label)
            });
            vertices.insert(src.clone());
            vertices.insert(dst.clone());
            labels.insert(label.clone());
            edges.push((id, src, dst, label));
            return Ok(());
        }
        let candidates: Vec<usize> = match tuple.last() {
            None => (0..path_graph.edge_count()).collect(),
            Some(&prev) => out[path_graph.edges()[prev].dst].clone(),
        };
        for k in candidates {
            tuple.push(k);
            dfs(
                path_graph,
                other_graph,
                out,
                m,
                tuple,
                edges,
                vertices,
                labels,
                emitted,
            )?;
            tuple.pop();
        }
        Ok(())
    }

    dfs(
        path_graph,
        other_graph,
        &out,
        m,
        &mut tuple,
        &mut edges,
        &mut vertices,
        &mut labels,
        &mut emitted,
    )?;
    let g = LabeledMultigraph::new(
        vertices.into_iter().collect(),
        labels.into_iter().collect(),
        edges,
    )?;
    let dir_tag = match dir {
        StripDirection::Horizontal => "H",
        StripDirection::Vertical => "V",
    };
    Ok(Constraint1D::new(
        format!("{dir_tag}{m}"),
        trim_essential(&g),
    ))
}

/// Strip of an axial product through tensor-filtering: symbols are m-tuples
/// following `along`'s presentation componentwise, restricted to tuples whose
/// label word satisfies `transverse`.
pub fn strip_axial(
    transverse: &Constraint1D,
    along: &Constraint1D,
    m: usize,
) -> Result<Constraint1D> {
    if m == 0 {
        return Err(CapError::InvalidParams("strip needs m >= 1".into()));
    }
    let ta: BTreeSet<&str> = transverse.alphabet().iter().map(|s| s.as_str()).collect();
    let aa: BTreeSet<&str> = along.alphabet().iter().map(|s| s.as_str()).collect();
    if ta != aa {
        return Err(CapError::AlphabetMismatch(format!(
            "strip_axial: {ta:?} vs {aa:?}"
        )));
    }
    let g = along.presentation();
    let det = transverse.deterministic();
    let dg = det.graph();
    let trans = det.transitions();
    // label index in `along` -> label index in the deterministic transverse graph
    let relabel: Vec<Option<usize>> = g.alphabet().iter().map(|l| dg.label_index(l)).collect();
    let all_states: Vec<usize> = (0..dg.vertex_count()).collect();

    let mut tuple: Vec<usize> = Vec::with_capacity(m);
    let mut edges = Vec::new();
    let mut vertices = BTreeSet::new();
    let mut labels = BTreeSet::new();
    let mut emitted: u128 = 0;

    struct Ctx<'a> {
        g: &'a LabeledMultigraph,
        trans: &'a [BTreeMap<usize, usize>],
        relabel: &'a [Option<usize>],
        m: usize,
    }
    fn dfs(
        ctx: &Ctx,
        subset: &[usize],
        tuple: &mut Vec<usize>,
        edges: &mut Vec<(String, String, String, String)>,
        vertices: &mut BTreeSet<String>,
        labels: &mut BTreeSet<String>,
        emitted: &mut u128,
    ) -> Result<()> {
        if tuple.len() == ctx.m {
            *emitted += 1;
            guard("strip edges", *emitted)?;
            let id = tuple_name(tuple, |i| ctx.g.edges()[i].id.as_str());
            let src = tuple_name(tuple, |i| ctx.g.vertex_name(ctx.g.edges()[i].src));
            let dst = tuple_name(tuple, |i| ctx.g.vertex_name(ctx.g.edges()[i].dst));
            let label = tuple_name(tuple, |i| ctx.g.label_name(ctx.g.edges()[i].label));
            vertices.insert(src.clone());
            vertices.insert(dst.clone());
            labels.insert(label.clone());
            edges.push((id, src, dst, label));
            return Ok(());
        }
        for (k, e) in ctx.g.edges().iter().enumerate() {
            let Some(dl) = ctx.relabel[e.label] else {
                continue;
            };
            let mut next = BTreeSet::new();
            for &s in subset {
                if let Some(&t) = ctx.trans[s].get(&dl) {
                    next.insert(t);
                }
            }
            if next.is_empty() {
                continue;
            }
            let next: Vec<usize> = next.into_iter().collect();
            tuple.push(k);
            dfs(ctx, &next, tuple, edges, vertices, labels, emitted)?;
            tuple.pop();
        }
        Ok(())
    }

    let ctx = Ctx {
        g,
        trans: &trans,
        relabel: &relabel,
        m,
    };
    dfs(
        &ctx,
        &all_states,
        &mut tuple,
        &mut edges,
        &mut vertices,
        &mut labels,
        &mut emitted,
    )?;
    let graph = LabeledMultigraph::new(
        vertices.into_iter().collect(),
        labels.into_iter().collect(),
        edges,
    )?;
    Ok(Constraint1D::new(
        format!("strip{m}({}⊗{})", transverse.name, along.name),
        trim_essential(&graph),
    ))
}

/// m-fold tensor power of a 1D constraint's presentation (unfiltered strips
/// of the full shift in the transverse direction).
pub fn tensor_constraint(c: &Constraint1D, m: usize) -> Result<Constraint1D> {
    Ok(Constraint1D::new(
        format!("{}^x{m}", c.name),
        tensor_power(c.presentation(), m)?,
    ))
}
