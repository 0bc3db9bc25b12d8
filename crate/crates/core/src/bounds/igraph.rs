//! The weighted auxiliary graph I(mu, alpha, n, G_n, G_E).
//!
//! Vertices are (f, v, l) with f, l in (V_E)^mu and v a state of the
//! deterministic strip presentation; one edge per path of length alpha out
//! of v, weighted by phi(window_f) * phi(window_l) where the windows extend
//! f and l with the boundary letters of the alpha rows generated along the
//! path. Only vertices whose windows are consistent with some generated
//! array are kept (mu-step history seeding), which leaves the Perron value
//! untouched: every cycle vertex has a real history.

use super::strips::VStrip;
use crate::error::{guard, CapError, Result};
use crate::phi::window_code;
use crate::spectral::SparseNonnegMatrix;
use std::collections::{BTreeMap, BTreeSet, HashMap};

type VertexKey = (Vec<u32>, u32, Vec<u32>);

/// Construction summary: canonical vertex list plus the number of
/// alpha-paths enumerated (the edge count of the auxiliary graph).
#[derive(Debug, Clone)]
pub struct IGraphInfo {
    pub mu: usize,
    pub alpha: usize,
    pub vertex_count: usize,
    pub edge_count: u64,
}

struct Builder<'a> {
    vs: &'a VStrip,
    mu: usize,
    alpha: usize,
    ve_count: usize,
    verts: Vec<VertexKey>,
    index: HashMap<VertexKey, u32>,
    edge_count: u64,
}

impl<'a> Builder<'a> {
    fn new(vs: &'a VStrip, mu: usize, alpha: usize, ve_count: usize) -> Result<Self> {
        if alpha == 0 {
            return Err(CapError::InvalidParams("alpha must be >= 1".into()));
        }
        if vs.row_first.len() != vs.row_count {
            return Err(CapError::Construction(
                "strip presentation lacks boundary letters".into(),
            ));
        }
        let mut b = Builder {
            vs,
            mu,
            alpha,
            ve_count,
            verts: Vec::new(),
            index: HashMap::new(),
            edge_count: 0,
        };
        b.seed()?;
        Ok(b)
    }

    /// All (f, v, l) arising as boundary windows of mu-row histories.
    fn seed(&mut self) -> Result<()> {
        let mut layer: BTreeSet<VertexKey> = (0..self.vs.state_count() as u32)
            .map(|s| (Vec::new(), s, Vec::new()))
            .collect();
        for _ in 0..self.mu {
            let mut next = BTreeSet::new();
            for (f, s, l) in &layer {
                for &(r, d) in &self.vs.trans[*s as usize] {
                    let mut f2 = f.clone();
                    f2.push(self.vs.row_first[r as usize]);
                    let mut l2 = l.clone();
                    l2.push(self.vs.row_last[r as usize]);
                    next.insert((f2, d, l2));
                }
            }
            guard("igraph seeds", next.len() as u128)?;
            layer = next;
        }
        for key in layer {
            self.intern(key);
        }
        Ok(())
    }

    fn intern(&mut self, key: VertexKey) -> u32 {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.verts.len() as u32;
        self.index.insert(key.clone(), i);
        self.verts.push(key);
        i
    }

    fn vertex_names(&self) -> Vec<String> {
        self.verts
            .iter()
            .map(|(f, s, l)| {
                let fmt = |w: &[u32]| {
                    w.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(".")
                };
                format!("[{}|s{}|{}]", fmt(f), s, fmt(l))
            })
            .collect()
    }
}

/// Weighted A(I, W_phi) for a fixed dense phi table (indexed by window
/// code, base |V_E|, most significant letter first). Zero-weight edges are
/// dropped; they cannot carry the Perron value.
pub fn igraph_matrix(
    vs: &VStrip,
    mu: usize,
    alpha: usize,
    ve_count: usize,
    phi_dense: &[f64],
) -> Result<(IGraphInfo, SparseNonnegMatrix)> {
    let win = mu + alpha;
    let expect = (ve_count as u128).pow(win as u32);
    if phi_dense.len() as u128 != expect {
        return Err(CapError::DimensionMismatch(format!(
            "phi table has {} entries, want {expect}",
            phi_dense.len()
        )));
    }
    let mut b = Builder::new(vs, mu, alpha, ve_count)?;
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
    let mut head = 0usize;
    let mut fbuf: Vec<u32> = Vec::with_capacity(win);
    let mut lbuf: Vec<u32> = Vec::with_capacity(win);
    while head < b.verts.len() {
        let (f, s, l) = b.verts[head].clone();
        fbuf.clear();
        fbuf.extend_from_slice(&f);
        lbuf.clear();
        lbuf.extend_from_slice(&l);
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        walk_weighted(&mut b, s, alpha, &mut fbuf, &mut lbuf, phi_dense, &mut acc)?;
        for (dst, w) in acc {
            triplets.push((head as u32, dst, w));
        }
        guard("igraph matrix entries", (triplets.len() / 16 + 1) as u128)?;
        head += 1;
    }
    let names = b.vertex_names();
    let dim = b.verts.len();
    let info = IGraphInfo {
        mu,
        alpha,
        vertex_count: dim,
        edge_count: b.edge_count,
    };
    let matrix = SparseNonnegMatrix::from_triplets(dim, names, triplets)?;
    Ok((info, matrix))
}

fn walk_weighted(
    b: &mut Builder,
    state: u32,
    remaining: usize,
    fbuf: &mut Vec<u32>,
    lbuf: &mut Vec<u32>,
    phi_dense: &[f64],
    acc: &mut BTreeMap<u32, f64>,
) -> Result<()> {
    if remaining == 0 {
        b.edge_count += 1;
        let w = phi_dense[window_code(fbuf, b.ve_count)] * phi_dense[window_code(lbuf, b.ve_count)];
        if w > 0.0 {
            let key = (fbuf[b.alpha..].to_vec(), state, lbuf[b.alpha..].to_vec());
            let dst = b.intern(key);
            *acc.entry(dst).or_insert(0.0) += w;
        }
        return Ok(());
    }
    let n_out = b.vs.trans[state as usize].len();
    for i in 0..n_out {
        let (r, d) = b.vs.trans[state as usize][i];
        fbuf.push(b.vs.row_first[r as usize]);
        lbuf.push(b.vs.row_last[r as usize]);
        walk_weighted(b, d, remaining - 1, fbuf, lbuf, phi_dense, acc)?;
        fbuf.pop();
        lbuf.pop();
    }
    Ok(())
}

/// Structural template: per (src, dst, f-window, l-window) path counts,
/// reusable across phi tables during optimization.
#[derive(Debug, Clone)]
pub struct IGraphTemplate {
    pub info: IGraphInfo,
    pub ve_count: usize,
    names: Vec<String>,
    entries: Vec<(u32, u32, u32, u32, f64)>, // src, dst, fcode, lcode, multiplicity
}

impl IGraphTemplate {
    pub fn instantiate(&self, phi_dense: &[f64]) -> Result<SparseNonnegMatrix> {
        let triplets: Vec<(u32, u32, f64)> = self
            .entries
            .iter()
            .filter_map(|&(s, d, fc, lc, mult)| {
                let w = phi_dense[fc as usize] * phi_dense[lc as usize] * mult;
                if w > 0.0 {
                    Some((s, d, w))
                } else {
                    None
                }
            })
            .collect();
        SparseNonnegMatrix::from_triplets(self.info.vertex_count, self.names.clone(), triplets)
    }
}

/// Build the phi-independent template. All alpha-path targets are kept,
/// regardless of any particular phi's zeros.
pub fn igraph_template(
    vs: &VStrip,
    mu: usize,
    alpha: usize,
    ve_count: usize,
) -> Result<IGraphTemplate> {
    let mut b = Builder::new(vs, mu, alpha, ve_count)?;
    let mut entries: Vec<(u32, u32, u32, u32, f64)> = Vec::new();
    let mut head = 0usize;
    let win = mu + alpha;
    let mut fbuf: Vec<u32> = Vec::with_capacity(win);
    let mut lbuf: Vec<u32> = Vec::with_capacity(win);
    while head < b.verts.len() {
        let (f, s, l) = b.verts[head].clone();
        fbuf.clear();
        fbuf.extend_from_slice(&f);
        lbuf.clear();
        lbuf.extend_from_slice(&l);
        let mut acc: BTreeMap<(u32, u32, u32), f64> = BTreeMap::new();
        walk_template(&mut b, s, alpha, &mut fbuf, &mut lbuf, &mut acc)?;
        for ((dst, fc, lc), mult) in acc {
            entries.push((head as u32, dst, fc, lc, mult));
        }
        guard("igraph template entries", (entries.len() / 16 + 1) as u128)?;
        head += 1;
    }
    let names = b.vertex_names();
    let info = IGraphInfo {
        mu,
        alpha,
        vertex_count: b.verts.len(),
        edge_count: b.edge_count,
    };
    Ok(IGraphTemplate {
        info,
        ve_count,
        names,
        entries,
    })
}

fn walk_template(
    b: &mut Builder,
    state: u32,
    remaining: usize,
    fbuf: &mut Vec<u32>,
    lbuf: &mut Vec<u32>,
    acc: &mut BTreeMap<(u32, u32, u32), f64>,
) -> Result<()> {
    if remaining == 0 {
        b.edge_count += 1;
        let fc = window_code(fbuf, b.ve_count) as u32;
        let lc = window_code(lbuf, b.ve_count) as u32;
        let key = (fbuf[b.alpha..].to_vec(), state, lbuf[b.alpha..].to_vec());
        let dst = b.intern(key);
        *acc.entry((dst, fc, lc)).or_insert(0.0) += 1.0;
        return Ok(());
    }
    let n_out = b.vs.trans[state as usize].len();
    for i in 0..n_out {
        let (r, d) = b.vs.trans[state as usize][i];
        fbuf.push(b.vs.row_first[r as usize]);
        lbuf.push(b.vs.row_last[r as usize]);
        walk_template(b, d, remaining - 1, fbuf, lbuf, acc)?;
        fbuf.pop();
        lbuf.pop();
    }
    Ok(())
}
