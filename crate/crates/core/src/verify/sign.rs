use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::series::{self, eta_mixed_partial, IntervalExitQuery, SeriesParams};

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignCell {
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub value: f64,
}

/// Values of `∂_u ∂_v P_0[η_(−u,v) > t]` on a product grid. Exploratory:
/// the scan reports what it sees and asserts nothing beyond the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignScan {
    /// Cells in `u`-major, then `v`, then `t` order.
    pub cells: Vec<SignCell>,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    pub min: SignCell,
}

impl SignScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,t,mixed_partial,sign\n");
        for c in &self.cells {
            let sign = match c.value.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => "+",
                Some(std::cmp::Ordering::Less) => "-",
                _ => "0",
            };
            let _ = writeln!(out, "{},{},{},{},{sign}", c.u, c.v, c.t, c.value);
        }
        out
    }

    pub fn summary_text(&self) -> String {
        format!(
            "sign scan over {} cells: {} positive, {} negative, {} zero; minimum {:e} at (u={}, v={}, t={})\n",
            self.cells.len(),
            self.positive,
            self.negative,
            self.zero,
            self.min.value,
            self.min.u,
            self.min.v,
            self.min.t
        )
    }
}

fn positive_grid(name: &str, g: &[f64]) -> Result<()> {
    if g.is_empty() || g.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return domain(format!("{name} grid must be nonempty with positive finite entries"));
    }
    Ok(())
}

/// Evaluates the mixed partial on `u_grid × v_grid × t_grid`.
pub fn sign_scan(u_grid: &[f64], v_grid: &[f64], t_grid: &[f64], p: &SeriesParams) -> Result<SignScan> {
    positive_grid("u", u_grid)?;
    positive_grid("v", v_grid)?;
    positive_grid("t", t_grid)?;
    let (nv, nt) = (v_grid.len(), t_grid.len());
    let cells: Vec<SignCell> = (0..u_grid.len() * nv * nt)
        .into_par_iter()
        .map(|idx| {
            let (u, v, t) = (u_grid[idx / (nv * nt)], v_grid[(idx / nt) % nv], t_grid[idx % nt]);
            Ok(SignCell { u, v, t, value: eta_mixed_partial(&IntervalExitQuery::new(u, v, t)?, p)? })
        })
        .collect::<Result<_>>()?;
    let positive = cells.iter().filter(|c| c.value > 0.0).count();
    let negative = cells.iter().filter(|c| c.value < 0.0).count();
    let min = *cells.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("grids are nonempty");
    Ok(SignScan { positive, negative, zero: cells.len() - positive - negative, min, cells })
}

/// Largest decrease of `u ↦ P_0[η_(−u,u) > t]` between consecutive points
/// of the increasing `u_grid`, over all `t`. Zero means the symmetric
/// survival is nondecreasing on the grid.
pub fn diagonal_monotonicity(u_grid: &[f64], t_grid: &[f64], p: &SeriesParams) -> Result<f64> {
    positive_grid("u", u_grid)?;
    if u_grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("u grid must be strictly increasing");
    }
    if t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return domain("times must be finite and nonnegative");
    }
    let drops: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let values: Vec<f64> = u_grid.iter().map(|&u| series::survival(u, u, t, p)).collect::<Result<_>>()?;
            Ok(values.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(drops.into_iter().fold(0.0, f64::max))
}
