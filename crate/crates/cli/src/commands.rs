//! The four sweeps. Each expands the config into an ordered list of grid
//! points, evaluates them on the current rayon pool and collects rows in
//! grid order, so the worker count never changes the output.

use noma_effrate::effrate::{
    er_high_snr, er_low_snr, er_noma, er_oma, ergodic_rate, min_energy_per_bit, power_search,
    wideband_slope,
};
use noma_effrate::sim::{queue_dvp, SimPlan};
use noma_effrate::snc::{dvp_curve, SncConfig};
use noma_effrate::{
    db_to_linear, AlphaMuChannel, ChannelPair, DelayQos, Error, EvalStrategy, NomaSystem, User,
};
use rayon::prelude::*;

use crate::config::{Arrivals, SweepConfig};
use crate::error::{CliError, Context};
use crate::output::{Cell, ChartSpec, Table};

/// Flag values that override the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub lambda_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    alpha: u32,
    mu: u32,
    omega_w: f64,
    a_s: f64,
    theta: f64,
    rho_db: f64,
}

impl Point {
    fn describe(&self) -> String {
        format!(
            "alpha={} mu={} omega_w={} a_s={} theta={} rho_db={}",
            self.alpha, self.mu, self.omega_w, self.a_s, self.theta, self.rho_db
        )
    }

    fn system(&self, cfg: &SweepConfig) -> Result<NomaSystem, CliError> {
        let build = || -> noma_effrate::Result<NomaSystem> {
            let strong = AlphaMuChannel::new(self.alpha, self.mu, cfg.channel.omega_s)?;
            let weak = AlphaMuChannel::new(self.alpha, self.mu, self.omega_w)?;
            NomaSystem::new(
                ChannelPair::new(strong, weak)?,
                self.a_s,
                db_to_linear(self.rho_db),
                DelayQos::new(self.theta, cfg.system.tb)?,
            )
        };
        build().context(|| self.describe())
    }
}

fn grid(cfg: &SweepConfig, a_s: &[f64], thetas: &[f64]) -> Vec<Point> {
    let mut points = Vec::new();
    for alpha in cfg.channel.alpha.to_vec() {
        for mu in cfg.channel.mu.to_vec() {
            for omega_w in cfg.channel.omega_w.to_vec() {
                for &a_s in a_s {
                    for &theta in thetas {
                        for rho_db in cfg.rho_db() {
                            points.push(Point {
                                alpha,
                                mu,
                                omega_w,
                                a_s,
                                theta,
                                rho_db,
                            });
                        }
                    }
                }
            }
        }
    }
    points
}

fn required_a_s(cfg: &SweepConfig) -> Result<Vec<f64>, CliError> {
    cfg.system
        .a_s
        .as_ref()
        .map(|a| a.to_vec())
        .ok_or_else(|| CliError::Field {
            field: "system.a_s".into(),
            message: "is required for this command".into(),
        })
}

fn strategy_name(s: EvalStrategy) -> &'static str {
    match s {
        EvalStrategy::Quadrature => "quadrature",
        EvalStrategy::ClosedForm => "closed-form",
    }
}

fn user_name(u: User) -> &'static str {
    match u {
        User::Strong => "strong",
        User::Weak => "weak",
    }
}

fn collect_rows<T, F>(items: Vec<T>, f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    T: Send,
    F: Fn(T) -> Result<Vec<Vec<Cell>>, CliError> + Sync + Send,
{
    let chunks: Vec<Vec<Vec<Cell>>> = items.into_par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn er_sweep(cfg: &SweepConfig) -> Result<Table, CliError> {
    let strategy: EvalStrategy = cfg.system.strategy.into();
    let points = grid(cfg, &required_a_s(cfg)?, &cfg.system.theta);
    let mut table = Table::new(vec![
        "alpha",
        "mu",
        "omega_w",
        "a_s",
        "theta",
        "rho_db",
        "R_s",
        "R_w",
        "R_sum",
        "R_sum_oma",
        "gap",
        "strategy",
        "err",
    ]);
    table.rows = collect_rows(points, |p| {
        let sys = p.system(cfg)?;
        let ctx = || p.describe();
        let rs = er_noma(&sys, User::Strong, strategy).context(ctx)?;
        let rw = er_noma(&sys, User::Weak, strategy).context(ctx)?;
        let os = er_oma(&sys, User::Strong, strategy).context(ctx)?;
        let ow = er_oma(&sys, User::Weak, strategy).context(ctx)?;
        let sum = rs.value + rw.value;
        let oma = os.value + ow.value;
        Ok(vec![vec![
            p.alpha.into(),
            p.mu.into(),
            p.omega_w.into(),
            p.a_s.into(),
            p.theta.into(),
            p.rho_db.into(),
            rs.value.into(),
            rw.value.into(),
            sum.into(),
            oma.into(),
            (sum - oma).into(),
            strategy_name(strategy).into(),
            (rs.error + rw.error + os.error + ow.error).into(),
        ]])
    })?;
    Ok(table)
}

pub fn er_chart() -> ChartSpec {
    ChartSpec {
        title: "Sum effective rate",
        x: "rho_db",
        ys: vec!["R_sum", "R_sum_oma"],
        group: vec!["alpha", "mu", "omega_w", "a_s", "theta"],
        log_y: false,
    }
}

pub fn dvp(cfg: &SweepConfig, overrides: Overrides) -> Result<Table, CliError> {
    let snc = cfg.snc()?;
    let arrivals = cfg.arrivals()?;
    let scale = overrides.lambda_scale.unwrap_or(1.0);
    let seed = overrides.seed.unwrap_or(cfg.sim.seed);
    let plan = if cfg.sim.slots > 0 {
        Some(SimPlan::new(seed, cfg.sim.slots, cfg.sim.batches).context(|| "sim".into())?)
    } else {
        None
    };
    let users: Vec<User> = snc.users.iter().map(|&u| u.into()).collect();
    let values = match &arrivals {
        Arrivals::BitsPerSlot(v) | Arrivals::Load(v) => v.clone(),
    };
    let mut jobs = Vec::new();
    for p in grid(cfg, &required_a_s(cfg)?, &cfg.system.theta[..1]) {
        for &value in &values {
            for &user in &users {
                jobs.push((p, value, user));
            }
        }
    }
    let delays: Vec<f64> = (0..=snc.max_delay).map(f64::from).collect();
    let mut table = Table::new(vec![
        "alpha",
        "mu",
        "omega_w",
        "a_s",
        "rho_db",
        "lambda",
        "user",
        "vartheta",
        "bound",
        "minimizer_s",
        "feasible",
        "empirical_p",
        "ci_low",
        "ci_high",
    ]);
    table.rows = collect_rows(jobs, |(p, value, user)| {
        let sys = p.system(cfg)?;
        let ctx = || format!("{} user={}", p.describe(), user_name(user));
        let lambda = scale
            * match arrivals {
                Arrivals::BitsPerSlot(_) => value,
                Arrivals::Load(_) => {
                    let mean = ergodic_rate(&sys, user, EvalStrategy::Quadrature)
                        .context(ctx)?
                        .value;
                    value * snc.n as f64 * mean
                }
            };
        let snc_cfg = SncConfig::with_search(sys, snc.n, lambda, snc.search()).context(ctx)?;
        let bounds = dvp_curve(&snc_cfg, user, &delays).context(ctx)?;
        let empirical = match &plan {
            Some(plan) => Some(queue_dvp(&snc_cfg, user, plan, snc.max_delay).context(ctx)?),
            None => None,
        };
        Ok(bounds
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let e = empirical.as_ref().map(|c| c.points[i]);
                vec![
                    p.alpha.into(),
                    p.mu.into(),
                    p.omega_w.into(),
                    p.a_s.into(),
                    p.rho_db.into(),
                    lambda.into(),
                    user_name(user).into(),
                    (i as u32).into(),
                    b.bound.into(),
                    b.minimizer_s.into(),
                    b.feasible.into(),
                    e.map(|e| e.probability).into(),
                    e.map(|e| e.lower).into(),
                    e.map(|e| e.upper).into(),
                ]
            })
            .collect())
    })?;
    Ok(table)
}

pub fn dvp_chart() -> ChartSpec {
    ChartSpec {
        title: "Delay violation probability",
        x: "vartheta",
        ys: vec!["bound", "empirical_p"],
        group: vec!["alpha", "mu", "rho_db", "lambda", "user"],
        log_y: true,
    }
}

fn optional(
    r: noma_effrate::Result<f64>,
    ctx: impl FnOnce() -> String,
) -> Result<Option<f64>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::ValidityViolation { .. } | Error::Degenerate(_)) => Ok(None),
        Err(source) => Err(CliError::Model {
            context: ctx(),
            source,
        }),
    }
}

pub fn approx(cfg: &SweepConfig) -> Result<Table, CliError> {
    let strategy: EvalStrategy = cfg.system.strategy.into();
    let points = grid(cfg, &required_a_s(cfg)?, &cfg.system.theta);
    let mut table = Table::new(vec![
        "alpha",
        "mu",
        "omega_w",
        "a_s",
        "theta",
        "rho_db",
        "exact_sum",
        "high_snr_sum",
        "low_snr_sum",
        "ergodic_sum",
        "rate_loss",
        "ebn0_min_s",
        "ebn0_min_w",
        "slope_s",
        "slope_w",
    ]);
    table.rows = collect_rows(points, |p| {
        let sys = p.system(cfg)?;
        let ctx = || p.describe();
        let both = |f: &dyn Fn(User) -> noma_effrate::Result<f64>| -> noma_effrate::Result<f64> {
            Ok(f(User::Strong)? + f(User::Weak)?)
        };
        let exact = both(&|u| er_noma(&sys, u, strategy).map(|r| r.value)).context(ctx)?;
        let ergodic = both(&|u| ergodic_rate(&sys, u, strategy).map(|r| r.value)).context(ctx)?;
        let high = optional(both(&|u| er_high_snr(&sys, u).map(|r| r.value)), ctx)?;
        let low = both(&|u| er_low_snr(&sys, u).map(|r| r.value)).context(ctx)?;
        Ok(vec![vec![
            p.alpha.into(),
            p.mu.into(),
            p.omega_w.into(),
            p.a_s.into(),
            p.theta.into(),
            p.rho_db.into(),
            exact.into(),
            high.into(),
            low.into(),
            ergodic.into(),
            (ergodic - exact).into(),
            optional(min_energy_per_bit(&sys, User::Strong), ctx)?.into(),
            optional(min_energy_per_bit(&sys, User::Weak), ctx)?.into(),
            optional(wideband_slope(&sys, User::Strong), ctx)?.into(),
            optional(wideband_slope(&sys, User::Weak), ctx)?.into(),
        ]])
    })?;
    Ok(table)
}

pub fn approx_chart() -> ChartSpec {
    ChartSpec {
        title: "Sum effective rate and approximations",
        x: "rho_db",
        ys: vec!["exact_sum", "high_snr_sum", "low_snr_sum", "ergodic_sum"],
        group: vec!["alpha", "mu", "theta"],
        log_y: false,
    }
}

/// Power grid used when the config gives none: 0.01, 0.02, ..., 0.24.
pub fn default_power_grid() -> Vec<f64> {
    (1..=24).map(|k| k as f64 / 100.0).collect()
}

pub fn power(cfg: &SweepConfig) -> Result<Table, CliError> {
    let power_grid = cfg
        .system
        .a_s
        .as_ref()
        .map_or_else(default_power_grid, |a| a.to_vec());
    let points = grid(cfg, &power_grid[..1], &cfg.system.theta);
    let mut table = Table::new(vec![
        "alpha",
        "mu",
        "omega_w",
        "theta",
        "rho_db",
        "best_a_s",
        "best_sum_er",
    ]);
    table.rows = collect_rows(points, |p| {
        let sys = p.system(cfg)?;
        let best = power_search(&sys, &power_grid, cfg.system.r_target).context(|| p.describe())?;
        Ok(vec![vec![
            p.alpha.into(),
            p.mu.into(),
            p.omega_w.into(),
            p.theta.into(),
            p.rho_db.into(),
            best.a_s.into(),
            best.sum_rate.into(),
        ]])
    })?;
    Ok(table)
}

pub fn power_chart() -> ChartSpec {
    ChartSpec {
        title: "Best sum effective rate over the power grid",
        x: "rho_db",
        ys: vec!["best_sum_er"],
        group: vec!["alpha", "mu", "omega_w", "theta"],
        log_y: false,
    }
}
