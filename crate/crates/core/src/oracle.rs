//! Ground truth by brute force: exact array counts for 2D presentations and
//! D-dimensional isotropic products, the two exact capacity formulas, and
//! the CHG(2) phase test.

use crate::constraint::{Constraint1D, Presentation2D};
use crate::error::{guard, CapError, Result};
use num_bigint::BigUint;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Exact count of arrays of a given shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayCount {
    pub dims: Vec<usize>,
    pub count: BigUint,
}

impl ArrayCount {
    /// log2(count) / cells, the finite-size upper bound of the subadditivity
    /// inequality. Exact zero count maps to -inf.
    pub fn log2_per_cell(&self) -> f64 {
        let cells: usize = self.dims.iter().product();
        if self.count == BigUint::ZERO {
            return f64::NEG_INFINITY;
        }
        big_log2(&self.count) / cells as f64
    }
}

pub fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.try_into().ok().map(|v: u64| v).unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 53;
    let top: u64 = (x >> shift).try_into().unwrap();
    (top as f64).log2() + shift as f64
}

/// Exact number of m x n label arrays generated by a 2D presentation.
///
/// Enumeration is by label columns, left to right, carrying the set of
/// viable edge-column frontiers; distinct label arrays are counted once
/// even when several edge arrays generate them.
pub fn count_arrays_2d(s: &Presentation2D, m: usize, n: usize) -> Result<ArrayCount> {
    if m == 0 || n == 0 {
        return Ok(ArrayCount {
            dims: vec![m, n],
            count: BigUint::from(1u32),
        });
    }
    let g1 = s.vertical();
    let g2 = s.horizontal();
    let sigma_len = s.alphabet().len() as u128;
    guard("oracle label columns", sigma_len.pow(m.min(30) as u32))?;

    // enumerate all vertical paths of length m (edge columns)
    let out1 = g1.out_edges();
    let mut columns: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = Vec::new(); // labels, sig2, tau2
    let mut stack = Vec::new();
    fn walk(
        g1: &crate::graph::LabeledMultigraph,
        out1: &[Vec<usize>],
        m: usize,
        stack: &mut Vec<usize>,
        sink: &mut dyn FnMut(&[usize]),
    ) {
        if stack.len() == m {
            sink(stack);
            return;
        }
        let cands: Vec<usize> = match stack.last() {
            None => (0..g1.edge_count()).collect(),
            Some(&k) => out1[g1.edges()[k].dst].clone(),
        };
        for k in cands {
            stack.push(k);
            walk(g1, out1, m, stack, sink);
            stack.pop();
        }
    }
    {
        let mut sink = |tuple: &[usize]| {
            let labels = tuple.iter().map(|&k| g1.edges()[k].label).collect();
            let sig2 = tuple.iter().map(|&k| g2.edges()[k].src).collect();
            let tau2 = tuple.iter().map(|&k| g2.edges()[k].dst).collect();
            columns.push((labels, sig2, tau2));
        };
        walk(g1, &out1, m, &mut stack, &mut sink);
    }
    guard("oracle edge columns", columns.len() as u128)?;

    // intern boundary tuples, group columns by label word
    let mut tuple_ids: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
    let intern = |t: &Vec<usize>, ids: &mut BTreeMap<Vec<usize>, u32>| -> u32 {
        if let Some(&i) = ids.get(t) {
            i
        } else {
            let i = ids.len() as u32;
            ids.insert(t.clone(), i);
            i
        }
    };
    let mut by_label: BTreeMap<Vec<usize>, Vec<(u32, u32)>> = BTreeMap::new();
    for (labels, sig2, tau2) in &columns {
        let si = intern(sig2, &mut tuple_ids);
        let ti = intern(tau2, &mut tuple_ids);
        by_label.entry(labels.clone()).or_default().push((si, ti));
    }
    let labelled: Vec<&Vec<(u32, u32)>> = by_label.values().collect();

    fn descend(labelled: &[&Vec<(u32, u32)>], frontier: &[u32], remaining: usize) -> BigUint {
        if remaining == 0 {
            return BigUint::from(1u32);
        }
        let mut total = BigUint::ZERO;
        for cols in labelled {
            let mut next: Vec<u32> = cols
                .iter()
                .filter(|(s, _)| frontier.binary_search(s).is_ok())
                .map(|&(_, t)| t)
                .collect();
            next.sort_unstable();
            next.dedup();
            if !next.is_empty() {
                total += descend(labelled, &next, remaining - 1);
            }
        }
        total
    }

    // first column unconstrained on the left; fan out in parallel
    let count: BigUint = labelled
        .par_iter()
        .map(|cols| {
            let mut first: Vec<u32> = cols.iter().map(|&(_, t)| t).collect();
            first.sort_unstable();
            first.dedup();
            descend(&labelled, &first, n - 1)
        })
        .reduce(|| BigUint::ZERO, |a, b| a + b);

    Ok(ArrayCount {
        dims: vec![m, n],
        count,
    })
}

/// Exact count of arrays over per-axis 1D constraints: every row in
/// direction i must satisfy `cs[i]`. All constraints must share an alphabet.
pub fn count_arrays_nd(cs: &[Constraint1D], dims: &[usize]) -> Result<ArrayCount> {
    if cs.len() != dims.len() || cs.is_empty() {
        return Err(CapError::InvalidParams(
            "count_arrays_nd needs one constraint per dimension".into(),
        ));
    }
    let alphabet: Vec<String> = cs[0].alphabet().to_vec();
    for c in cs {
        if c.alphabet() != alphabet.as_slice() {
            return Err(CapError::AlphabetMismatch(
                "count_arrays_nd constraints must share one alphabet".into(),
            ));
        }
    }
    let cells: usize = dims.iter().product();
    if dims.iter().any(|&d| d == 0) {
        return Ok(ArrayCount {
            dims: dims.to_vec(),
            count: BigUint::from(1u32),
        });
    }

    // per-axis deterministic transition tables as bitmask steppers
    struct Axis {
        table: Vec<Vec<u64>>, // label -> state -> successor mask
        full: u64,
    }
    let mut axes = Vec::new();
    for c in cs {
        let det = c.deterministic();
        let g = det.graph();
        let ns = g.vertex_count();
        if ns > 64 {
            return Err(CapError::SizeGuard {
                what: "deterministic automaton for masked counting".into(),
                required: ns as u128,
                limit: 64,
            });
        }
        let mut table = vec![vec![0u64; ns]; alphabet.len()];
        for e in g.edges() {
            let l = alphabet
                .iter()
                .position(|a| a == g.label_name(e.label))
                .expect("shared alphabet");
            table[l][e.src] |= 1u64 << e.dst;
        }
        axes.push(Axis {
            table,
            full: if ns == 64 { u64::MAX } else { (1u64 << ns) - 1 },
        });
    }

    // precompute, for every flat cell index and axis, the id of the axis
    // line through that cell
    let d = dims.len();
    let mut cell_lines: Vec<Vec<usize>> = vec![vec![0; d]; cells];
    {
        let mut idx = vec![0usize; d];
        for lines in cell_lines.iter_mut() {
            for ax in 0..d {
                let mut id = 0;
                for (j, &x) in idx.iter().enumerate() {
                    if j != ax {
                        id = id * dims[j] + x;
                    }
                }
                lines[ax] = id;
            }
            for pos in (0..d).rev() {
                idx[pos] += 1;
                if idx[pos] < dims[pos] {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    fn rec(
        axes: &[Axis],
        cell_lines: &[Vec<usize>],
        nsym: usize,
        flat: usize,
        masks: &mut [Vec<u64>],
        visits: &mut u128,
    ) -> Result<BigUint> {
        *visits += 1;
        if *visits % 65536 == 0 {
            guard("oracle search nodes", *visits / 64)?;
        }
        if flat == cell_lines.len() {
            return Ok(BigUint::from(1u32));
        }
        let d = axes.len();
        let mut total = BigUint::ZERO;
        for s in 0..nsym {
            let mut saved: Vec<u64> = Vec::with_capacity(d);
            let mut dead = false;
            for ax in 0..d {
                let lid = cell_lines[flat][ax];
                let old = masks[ax][lid];
                let mut new = 0u64;
                let mut bits = old;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    new |= axes[ax].table[s][b];
                }
                saved.push(old);
                masks[ax][lid] = new;
                if new == 0 {
                    dead = true;
                    break;
                }
            }
            if !dead {
                let sub = rec(axes, cell_lines, nsym, flat + 1, masks, visits);
                for (ax, old) in saved.into_iter().enumerate() {
                    masks[ax][cell_lines[flat][ax]] = old;
                }
                total += sub?;
            } else {
                for (ax, old) in saved.into_iter().enumerate() {
                    masks[ax][cell_lines[flat][ax]] = old;
                }
            }
        }
        Ok(total)
    }

    let mut masks: Vec<Vec<u64>> = (0..d)
        .map(|i| vec![axes[i].full; cells / dims[i]])
        .collect();
    let mut visits = 0u128;
    let count = rec(
        &axes,
        &cell_lines,
        alphabet.len(),
        0,
        &mut masks,
        &mut visits,
    )?;
    Ok(ArrayCount {
        dims: dims.to_vec(),
        count,
    })
}

/// Count of n x ... x n isotropic arrays whose every axis-row satisfies c.
pub fn count_arrays_isotropic(c: &Constraint1D, d: usize, n: usize) -> Result<ArrayCount> {
    let cs = vec![c.clone(); d];
    let dims = vec![n; d];
    count_arrays_nd(&cs, &dims)
}

/// Exact rational capacity values proved for two constraint families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

pub fn exact_capacity(family: &str, d: u32) -> Result<Rational> {
    if d < 1 {
        return Err(CapError::InvalidParams(
            "exact capacity needs D >= 1".into(),
        ));
    }
    match family {
        "chg2" => Ok(Rational {
            num: 1,
            den: 1u64
                .checked_shl(d)
                .ok_or_else(|| CapError::InvalidParams("D too large".into()))?,
        }),
        "odd" => Ok(Rational { num: 1, den: 2 }),
        other => Err(CapError::InvalidParams(format!(
            "unknown exact family {other}"
        ))),
    }
}

/// Phase structure of a word over {+1, -1}: phase 0 holds when
/// a_i = -a_{i+1} at every even i <= n-2, phase 1 analogously at odd i.
/// A word satisfies CHG(2) iff at least one phase holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chg2Phases {
    pub phase0: bool,
    pub phase1: bool,
}

impl Chg2Phases {
    pub fn any(&self) -> bool {
        self.phase0 || self.phase1
    }
}

pub fn chg2_phases(word: &[i8]) -> Chg2Phases {
    let n = word.len();
    let holds = |parity: usize| -> bool {
        (parity..n.saturating_sub(1))
            .step_by(2)
            .all(|i| word[i] == -word[i + 1])
    };
    Chg2Phases {
        phase0: holds(0),
        phase1: holds(1),
    }
}

/// All words of length <= max_len of a 1D constraint, lexicographic within
/// each length, shortest first.
pub fn enumerate_words(c: &Constraint1D, max_len: usize) -> Result<Vec<Vec<String>>> {
    let nsym = c.alphabet().len().max(1) as u128;
    guard(
        "enumerate words",
        nsym.saturating_pow(max_len.min(40) as u32),
    )?;
    Ok(c.words_up_to(max_len))
}
