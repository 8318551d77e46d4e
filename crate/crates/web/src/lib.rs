//! Browser bindings: rate curves, delay-bound curves and the power search.
//!
//! Every function takes plain numbers so the page needs no glue beyond the
//! generated module. Curves come back as a [`Curve`] with one x column and
//! named y columns.

use noma_effrate::effrate::{er_noma, er_oma, ergodic_rate, power_search};
use noma_effrate::snc::{dvp_curve as bound_curve, SncConfig};
use noma_effrate::{
    db_to_linear, AlphaMuChannel, ChannelPair, DelayQos, EvalStrategy, NomaSystem, User,
};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Curve {
    x: Vec<f64>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

#[wasm_bindgen]
impl Curve {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn names(&self) -> Vec<String> {
        self.names.clone()
    }

    /// Column `i`, aligned with [`Curve::x`].
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.columns.get(i).cloned().unwrap_or_default()
    }
}

fn js(e: noma_effrate::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `omega_w2` is Ω_w² with Ω_s = 1.
fn system(
    alpha: u32,
    mu: u32,
    omega_w2: f64,
    a_s: f64,
    rho_db: f64,
    theta: f64,
) -> Result<NomaSystem, JsError> {
    let pair = ChannelPair::new(
        AlphaMuChannel::new(alpha, mu, 1.0).map_err(js)?,
        AlphaMuChannel::new(alpha, mu, omega_w2.sqrt()).map_err(js)?,
    )
    .map_err(js)?;
    NomaSystem::new(
        pair,
        a_s,
        db_to_linear(rho_db),
        DelayQos::with_theta(theta).map_err(js)?,
    )
    .map_err(js)
}

fn db_grid(rho_min: f64, rho_max: f64, step: f64) -> Result<Vec<f64>, JsError> {
    if !(step > 0.0) || rho_max < rho_min {
        return Err(JsError::new("SNR range needs step > 0 and max >= min"));
    }
    let n = ((rho_max - rho_min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| rho_min + k as f64 * step).collect())
}

/// NOMA and OMA sum effective rates against SNR in dB.
#[wasm_bindgen]
pub fn rate_curve(
    alpha: u32,
    mu: u32,
    omega_w2: f64,
    a_s: f64,
    theta: f64,
    rho_min: f64,
    rho_max: f64,
    step: f64,
) -> Result<Curve, JsError> {
    let x = db_grid(rho_min, rho_max, step)?;
    let mut columns = vec![Vec::with_capacity(x.len()); 4];
    for &rho_db in &x {
        let sys = system(alpha, mu, omega_w2, a_s, rho_db, theta)?;
        let rate = |u, oma: bool| {
            let r = if oma {
                er_oma(&sys, u, EvalStrategy::Quadrature)
            } else {
                er_noma(&sys, u, EvalStrategy::Quadrature)
            };
            r.map(|r| r.value).map_err(js)
        };
        let (s, w) = (rate(User::Strong, false)?, rate(User::Weak, false)?);
        columns[0].push(s);
        columns[1].push(w);
        columns[2].push(s + w);
        columns[3].push(rate(User::Strong, true)? + rate(User::Weak, true)?);
    }
    Ok(Curve {
        x,
        names: ["strong", "weak", "NOMA sum", "OMA sum"]
            .map(String::from)
            .to_vec(),
        columns,
    })
}

/// Delay-violation bound for both users against delay in slots, with
/// arrivals at `load` times each user's mean service.
#[wasm_bindgen]
pub fn delay_bound_curve(
    alpha: u32,
    mu: u32,
    omega_w2: f64,
    a_s: f64,
    rho_db: f64,
    symbols_per_slot: u32,
    load: f64,
    max_delay: u32,
) -> Result<Curve, JsError> {
    if !(load > 0.0) {
        return Err(JsError::new("load must be positive"));
    }
    let sys = system(alpha, mu, omega_w2, a_s, rho_db, 1.0)?;
    let x: Vec<f64> = (0..=max_delay).map(f64::from).collect();
    let mut columns = Vec::new();
    for user in User::BOTH {
        let mean = ergodic_rate(&sys, user, EvalStrategy::Quadrature)
            .map_err(js)?
            .value;
        let lambda = load * symbols_per_slot as f64 * mean;
        let cfg = SncConfig::new(sys, symbols_per_slot, lambda).map_err(js)?;
        columns.push(
            bound_curve(&cfg, user, &x)
                .map_err(js)?
                .iter()
                .map(|b| b.bound)
                .collect(),
        );
    }
    Ok(Curve {
        x,
        names: ["strong", "weak"].map(String::from).to_vec(),
        columns,
    })
}

/// Sum effective rate over `a_s = 0.01, ..., 0.24`; the page marks the
/// maximum.
#[wasm_bindgen]
pub fn power_sweep(
    alpha: u32,
    mu: u32,
    omega_w2: f64,
    theta: f64,
    rho_db: f64,
) -> Result<Curve, JsError> {
    let grid: Vec<f64> = (1..=24).map(|k| k as f64 / 100.0).collect();
    let sys = system(alpha, mu, omega_w2, grid[0], rho_db, theta)?;
    let choice = power_search(&sys, &grid, noma_effrate::effrate::DEFAULT_R_TARGET).map_err(js)?;
    let (x, sums) = choice.sweep.into_iter().unzip();
    Ok(Curve {
        x,
        names: vec!["sum".into()],
        columns: vec![sums],
    })
}
