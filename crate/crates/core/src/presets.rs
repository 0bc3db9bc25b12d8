//! Built-in constraints by CLI token, wired to their bound routes.
//!
//! Tokens: `even`, `odd`, `chg:<b>`, `rll:<d>:<k|inf>` for 1D;
//! `nak`, `rwim`, `rwim-t`, `hard-square`, `even2`, `chg<b>x2`,
//! `axial:<c1>,<c2>` for 2D.

use crate::bounds::strips::{EdgeForm, VertexForm};
use crate::bounds::{BoundRoute, Constraint2D};
use crate::constraint::{
    self, axial_2d, chg, even, full_shift, lift, odd, rll, transpose_2d, Constraint1D,
};
use crate::error::{CapError, Result};
use crate::graph::find_edge_reversing_matching;

pub fn constraint_1d(token: &str) -> Result<Constraint1D> {
    if token == "even" {
        return Ok(even());
    }
    if token == "odd" {
        return Ok(odd());
    }
    if let Some(b) = token.strip_prefix("chg:") {
        let b: usize = b
            .parse()
            .map_err(|_| CapError::InvalidParams(format!("bad chg parameter in {token}")))?;
        return chg(b);
    }
    if let Some(rest) = token.strip_prefix("rll:") {
        let mut it = rest.split(':');
        let d: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CapError::InvalidParams(format!("bad rll d in {token}")))?;
        let k = match it.next() {
            None => return Err(CapError::InvalidParams("rll needs rll:<d>:<k|inf>".into())),
            Some("inf") => None,
            Some(s) => Some(
                s.parse()
                    .map_err(|_| CapError::InvalidParams(format!("bad rll k in {token}")))?,
            ),
        };
        return rll(d, k);
    }
    Err(CapError::InvalidParams(format!(
        "unknown 1D constraint {token}"
    )))
}

fn golden_mean() -> Constraint1D {
    rll(1, None).expect("rll(1, inf)")
}

fn binary_full() -> Constraint1D {
    full_shift(&["0", "1"])
}

fn nak_form() -> VertexForm {
    VertexForm::new(
        vec!["0".into(), "1".into()],
        constraint::nak_blocks(),
        golden_mean(),
        golden_mean(),
    )
}

fn rwim_form() -> VertexForm {
    VertexForm::new(
        vec!["0".into(), "1".into()],
        constraint::rwim_blocks(),
        golden_mean(),
        binary_full(),
    )
}

fn hard_square_form() -> VertexForm {
    VertexForm::new(
        vec!["0".into(), "1".into()],
        constraint::hard_square_blocks(),
        golden_mean(),
        golden_mean(),
    )
}

/// Edge route for an axial product columns (x) rows, through the lift of
/// the column constraint along the row presentation.
///
/// With `label_preserving`, the row presentation must be symmetric as a
/// labeled graph, which makes the lifted product have symmetric strips for
/// every column constraint. The chg presets instead use the plain matching
/// of the charge graph (+1 edges paired with the opposite -1 edges), whose
/// relabeling negates words; charge constraints are closed under negation,
/// so the symmetric-strips hypothesis still holds. Either way the strip
/// symmetry is machine-checked again at small heights before any bound.
fn lift_route(
    columns: &Constraint1D,
    rows: &Constraint1D,
    label_preserving: bool,
) -> Result<EdgeForm> {
    let g_s = rows.presentation();
    if find_edge_reversing_matching(g_s, label_preserving).is_none() {
        return Err(CapError::SymmetryGate(format!(
            "presentation of {} has no {}edge-reversing matching; \
             the lift route does not apply",
            rows.name,
            if label_preserving {
                "label-preserving "
            } else {
                ""
            }
        )));
    }
    Ok(EdgeForm {
        transverse: lift(columns, g_s)?,
        edge_graph: g_s.clone(),
    })
}

pub fn constraint_2d(token: &str) -> Result<Constraint2D> {
    match token {
        "nak" => Ok(Constraint2D {
            name: "nak".into(),
            original: constraint::nak(),
            axial: None,
            route: Some(BoundRoute::Vertex(nak_form())),
        }),
        "rwim" => Ok(Constraint2D {
            name: "rwim".into(),
            original: constraint::rwim(),
            axial: None,
            route: Some(BoundRoute::Vertex(rwim_form())),
        }),
        "rwim-t" => Ok(Constraint2D {
            name: "rwim-t".into(),
            original: transpose_2d(&constraint::rwim()),
            axial: None,
            route: Some(BoundRoute::Vertex(rwim_form().transposed())),
        }),
        "hard-square" | "hard_square" => {
            let g = golden_mean();
            Ok(Constraint2D {
                name: "hard-square".into(),
                original: axial_2d(&g, &g)?,
                axial: Some((g.clone(), g)),
                route: Some(BoundRoute::Vertex(hard_square_form())),
            })
        }
        "even2" => {
            let e = even();
            Ok(Constraint2D {
                name: "even2".into(),
                original: axial_2d(&e, &e)?,
                route: Some(BoundRoute::Edge(lift_route(&e, &e, true)?)),
                axial: Some((e.clone(), e)),
            })
        }
        _ => {
            if let Some(b) = token.strip_prefix("chg").and_then(|s| s.strip_suffix("x2")) {
                let b: usize = b
                    .parse()
                    .map_err(|_| CapError::InvalidParams(format!("bad chg power token {token}")))?;
                let c = chg(b)?;
                return Ok(Constraint2D {
                    name: format!("chg{b}x2"),
                    original: axial_2d(&c, &c)?,
                    route: Some(BoundRoute::Edge(lift_route(&c, &c, false)?)),
                    axial: Some((c.clone(), c)),
                });
            }
            if let Some(rest) = token.strip_prefix("axial:") {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| CapError::InvalidParams("axial needs axial:<c1>,<c2>".into()))?;
                let cols = constraint_1d(a)?;
                let rows = constraint_1d(b)?;
                let route = lift_route(&cols, &rows, true).ok().map(BoundRoute::Edge);
                return Ok(Constraint2D {
                    name: format!("axial:{a},{b}"),
                    original: axial_2d(&cols, &rows)?,
                    axial: Some((cols, rows)),
                    route,
                });
            }
            Err(CapError::InvalidParams(format!(
                "unknown 2D constraint {token}"
            )))
        }
    }
}

pub const PRESET_2D_TOKENS: &[&str] = &[
    "nak",
    "rwim",
    "rwim-t",
    "hard-square",
    "even2",
    "chg2x2",
    "chg3x2",
];
