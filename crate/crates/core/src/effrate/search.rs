//! One-dimensional grid search over the strong-user power share.

use rayon::prelude::*;

use super::{sum_er_noma, EvalStrategy, NomaSystem};
use crate::{Error, Result};

/// Target weak-user rate (bits per channel use) that fixes the admissible
/// range `a_s < 2^-r_target`.
pub const DEFAULT_R_TARGET: f64 = 2.0;

/// Best grid point and the full sweep it was chosen from.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerChoice {
    pub a_s: f64,
    pub sum_rate: f64,
    pub sweep: Vec<(f64, f64)>,
}

/// Maximizes the NOMA sum effective rate over `grid`, keeping every other
/// parameter of `template`. Ties go to the smaller `a_s`.
pub fn power_search(template: &NomaSystem, grid: &[f64], r_target: f64) -> Result<PowerChoice> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let upper = (-r_target).exp2();
    if let Some(bad) = grid.iter().find(|&&a| !(a > 0.0 && a < upper)) {
        return Err(Error::InvalidParameter(format!(
            "power share {bad} outside the admissible range (0, {upper})"
        )));
    }
    let sweep = grid
        .par_iter()
        .map(|&a_s| {
            Ok((
                a_s,
                sum_er_noma(&template.with_a_s(a_s)?, EvalStrategy::Quadrature)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let &(a_s, sum_rate) = sweep
        .iter()
        .reduce(|best, cand| {
            let better = cand.1 > best.1 || (cand.1 == best.1 && cand.0 < best.0);
            if better {
                cand
            } else {
                best
            }
        })
        .expect("grid is not empty");
    Ok(PowerChoice {
        a_s,
        sum_rate,
        sweep,
    })
}
