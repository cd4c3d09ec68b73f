//! Bifurcation sweep over `(chi, l)` that keeps going past degenerate modes.

use anyhow::Result;
use necrobifurc::bifurcation::{bifurcation_point, BifurcationTerms};
use necrobifurc::export::{Cell, Table};
use necrobifurc::nondim::ModelParams;
use necrobifurc::steady_state::build_steady_state;
use necrobifurc::Error;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub chi: f64,
    pub l: u32,
    pub p_l: f64,
    pub l1: f64,
    pub l2: f64,
    pub terms: Option<BifurcationTerms>,
    pub degenerate: bool,
    /// `P_l` strictly increasing over the `l >= 2` rows of this `chi`.
    pub monotone: bool,
}

pub fn strictly_increasing(values: impl IntoIterator<Item = f64>) -> bool {
    let mut prev: Option<f64> = None;
    for v in values {
        if let Some(p) = prev {
            if !(v > p) {
                return false;
            }
        }
        prev = Some(v);
    }
    true
}

/// Rows sorted by `(chi, l)`; chemotaxis values run in parallel.
pub fn sweep(p: &ModelParams, chis: &[f64], range: (u32, u32)) -> Result<Vec<SweepRow>> {
    let per_chi = chis
        .par_iter()
        .map(|&chi| -> Result<Vec<SweepRow>> {
            let params = ModelParams { chi, ..*p };
            params.validate()?;
            let s = build_steady_state(&params)?;
            let mut rows = Vec::new();
            for l in range.0..=range.1 {
                let row = match bifurcation_point(&s, l) {
                    Ok(b) => SweepRow {
                        chi,
                        l,
                        p_l: b.p_l,
                        l1: b.l1,
                        l2: b.l2,
                        terms: Some(b.terms),
                        degenerate: false,
                        monotone: false,
                    },
                    Err(Error::DegenerateDenominator { l1, l2, .. }) => SweepRow {
                        chi,
                        l,
                        p_l: f64::NAN,
                        l1,
                        l2,
                        terms: None,
                        degenerate: true,
                        monotone: false,
                    },
                    Err(e) => return Err(e.into()),
                };
                rows.push(row);
            }
            let monotone = strictly_increasing(rows.iter().filter(|r| r.l >= 2).map(|r| r.p_l));
            rows.iter_mut().for_each(|r| r.monotone = monotone);
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<SweepRow> = per_chi.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.chi.total_cmp(&b.chi).then(a.l.cmp(&b.l)));
    Ok(rows)
}

pub fn table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&[
        "l",
        "chi",
        "P_l",
        "L1",
        "L2",
        "necrosis_I",
        "necrosis_II",
        "surface_tension",
        "chemotaxis_term",
        "monotone_flag",
        "status",
    ]);
    for r in rows {
        let term = |f: fn(&BifurcationTerms) -> f64| -> Cell {
            r.terms.as_ref().map_or(f64::NAN, f).into()
        };
        t.push(vec![
            r.l.into(),
            r.chi.into(),
            r.p_l.into(),
            r.l1.into(),
            r.l2.into(),
            term(|t| t.necrosis_i),
            term(|t| t.necrosis_ii),
            term(|t| t.surface_tension),
            term(|t| t.chemotaxis),
            Cell::Bool(r.monotone),
            if r.degenerate {
                "degenerate_denominator"
            } else {
                "ok"
            }
            .into(),
        ]);
    }
    t
}
