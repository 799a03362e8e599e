//! Subcommand implementations. Each command produces a [`Report`] — a header
//! plus formatted rows — that renders as CSV (17 significant digits, `.`
//! decimal separator) or as human-readable blocks, and carries its exit
//! status: 0 success, 1 config error, 2 precondition/window failure,
//! 3 inequality violation.

use rayon::prelude::*;

use rrc::candle::{first_conjugate, integrate_jacobi, Boundary};
use rrc::comparison::{check_conditions_model, theorem_window};
use rrc::curvature::{classify_kappa, is_ric_class};
use rrc::extremal::{extremal_solve, phase_uniqueness_check};

use crate::config::{ManifoldSpec, RunConfig, SweepCommand};

/// Margin below which a comparison inequality counts as violated (exit 3).
pub const VIOLATION_TOL: f64 = 1e-7;

/// Tabular command output plus exit status.
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub exit: u8,
}

/// Command failure with its exit status.
pub enum Failure {
    /// Invalid configuration (exit 1).
    Config(anyhow::Error),
    /// Precondition or window failure at run time (exit 2), or a config-
    /// shaped library error (exit 1).
    Run(rrc::Error),
}

impl Failure {
    pub fn exit(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Run(e) => match e {
                rrc::Error::InvalidParams(_)
                | rrc::Error::DimensionMismatch(_)
                | rrc::Error::GridMismatch(_)
                | rrc::Error::StepCountTooSmall(_) => 1,
                _ => 2,
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Config(e) => format!("{e:#}"),
            Failure::Run(e) => e.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        // Class parameter and manifold construction failures surface as
        // rrc errors wrapped by config loading; unwrap for exit-code fidelity.
        match e.downcast::<rrc::Error>() {
            Ok(lib) => Failure::Run(lib),
            Err(other) => Failure::Config(other),
        }
    }
}

impl From<rrc::Error> for Failure {
    fn from(e: rrc::Error) -> Self {
        Failure::Run(e)
    }
}

/// Formats a float with 17 significant digits (round-trip exact).
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Radius-grid node `k` of `grid_points` snapped to an integration node.
fn node_index(k: usize, grid_points: usize, steps: usize) -> usize {
    (((k * steps) as f64 / grid_points as f64).round() as usize).clamp(1, steps)
}

fn manifold_n(config: &RunConfig) -> usize {
    match &config.manifold {
        ManifoldSpec::Constant { n, .. }
        | ManifoldSpec::RankOne { n, .. }
        | ManifoldSpec::RandomClass { n, .. } => *n,
    }
}

pub fn run(command: SweepCommand, config: &RunConfig) -> Result<Report, Failure> {
    match command {
        SweepCommand::Classify => classify(config),
        SweepCommand::Candle => candle(config),
        SweepCommand::Compare => compare(config),
        SweepCommand::Extremal => extremal(config),
    }
}

/// `classify`: √Ric(ρ, u), the classification boundary κ*, and the class
/// margin for the configured (ρ, κ). Exit 2 when the hypothesis `K ≤ ρ`
/// fails (√Ric is then undefined and reported as NaN).
pub fn classify(config: &RunConfig) -> Result<Report, Failure> {
    let model = config.model()?;
    let params = config.params()?;
    let check = is_ric_class(&model, &params)?;
    let (root_ricci, kappa_star) = if check.sectional_ok {
        (
            model.root_ricci_inf(params.rho())?,
            classify_kappa(&model, params.rho())?,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(Report {
        header: vec![
            "n",
            "rho",
            "kappa",
            "root_ricci_inf",
            "kappa_star",
            "margin",
            "sectional_ok",
            "holds",
        ],
        rows: vec![vec![
            model.n().to_string(),
            fmt(params.rho()),
            fmt(params.kappa()),
            fmt(root_ricci),
            fmt(kappa_star),
            fmt(check.margin),
            check.sectional_ok.to_string(),
            check.holds.to_string(),
        ]],
        exit: if check.sectional_ok { 0 } else { 2 },
    })
}

/// `candle`: plot data `(r, s, log_deriv, first_conjugate)` on the radius
/// grid. Rows stop at the first conjugate point, which is reported in every
/// emitted row and sets exit status 2.
pub fn candle(config: &RunConfig) -> Result<Report, Failure> {
    let model = config.model()?;
    let profile = model.profile(config.r)?;
    let sol = integrate_jacobi(&profile, config.r, config.steps, Boundary::InitialVelocity)?;
    let conjugate = first_conjugate(&sol);
    let dets = sol.det_trace();
    let d0 = sol.yp()[0].determinant();

    let mut rows = Vec::new();
    let mut last_idx = 0;
    for k in 1..=config.grid_points {
        let idx = node_index(k, config.grid_points, config.steps);
        if idx == last_idx {
            continue;
        }
        last_idx = idx;
        let t = sol.grid()[idx];
        if conjugate.is_some_and(|tc| t >= tc - 1e-12) {
            break;
        }
        let Some(log_deriv) = sol.log_deriv_at(idx) else {
            break;
        };
        rows.push(vec![
            fmt(t),
            fmt(dets[idx] / d0),
            fmt(log_deriv),
            fmt_opt(conjugate),
        ]);
    }
    Ok(Report {
        header: vec!["r", "s", "log_deriv", "first_conjugate"],
        rows,
        exit: if conjugate.is_some() { 2 } else { 0 },
    })
}

/// `compare`: one row per comparison condition (LCD, Candle, Ball) against
/// the κ model at the configured ℓ. Radii beyond the comparison window
/// `π/(2√ρ)` are truncated with a leading warning row. Exit 3 when any
/// applicable margin falls below −[`VIOLATION_TOL`].
pub fn compare(config: &RunConfig) -> Result<Report, Failure> {
    let params = config.params()?;
    let model = config.model()?;
    let window = theorem_window(params.rho());
    let truncated = config.r > window;
    let ell = config.r.min(window);

    let reports = check_conditions_model(
        &model,
        params.kappa(),
        ell,
        config.steps,
        config.grid_points,
    )?;

    let mut rows = Vec::new();
    if truncated {
        rows.push(vec![
            "window_truncated".to_string(),
            fmt(params.kappa()),
            fmt(ell),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    let mut exit = 0;
    for report in &reports {
        if report.applicable && report.worst_margin < -VIOLATION_TOL {
            exit = 3;
        }
        rows.push(vec![
            report.condition.to_string(),
            fmt(report.kappa),
            fmt(report.ell),
            report.holds.to_string(),
            fmt(report.worst_margin),
            fmt(report.worst_r),
            report.applicable.to_string(),
        ]);
    }
    Ok(Report {
        header: vec![
            "condition",
            "kappa",
            "ell",
            "holds",
            "worst_margin",
            "worst_r",
            "applicable",
        ],
        rows,
        exit,
    })
}

/// `extremal`: the extremal solve summary row, plus the phase-diagram
/// uniqueness verdict for the scalar reduction (blank when the strict phase
/// window excludes the configured radius).
pub fn extremal(config: &RunConfig) -> Result<Report, Failure> {
    let params = config.params()?;
    let n = manifold_n(config);
    let res = extremal_solve(params.rho(), params.kappa(), n, config.r, config.steps)?;
    let beta = (n as f64 - 1.0) * params.kappa();
    let phase_unique = phase_uniqueness_check(params.rho(), beta, config.r, 20)
        .map(|b| b.to_string())
        .unwrap_or_default();
    Ok(Report {
        header: vec![
            "rho",
            "kappa",
            "n",
            "r",
            "min_log_deriv",
            "model_value",
            "gap",
            "isotropy_defect",
            "iterations",
            "phase_unique",
        ],
        rows: vec![vec![
            fmt(params.rho()),
            fmt(params.kappa()),
            n.to_string(),
            fmt(config.r),
            fmt(res.min_log_deriv),
            fmt(res.model_value),
            fmt(res.gap),
            fmt(res.isotropy_defect),
            res.iterations.to_string(),
            phase_unique,
        ]],
        exit: 0,
    })
}

/// `sweep`: fans the configured command out across `seed_count` consecutive
/// seeds in parallel and gathers rows in seed order (bit-identical output
/// regardless of scheduling). The exit status is the most severe across runs.
pub fn sweep(config: &RunConfig) -> Result<Report, Failure> {
    let spec = config
        .sweep
        .ok_or_else(|| anyhow::anyhow!("sweep requires the `sweep` config field"))?;
    if spec.seed_count == 0 {
        return Err(anyhow::anyhow!("sweep.seed_count must be ≥ 1").into());
    }

    let runs: Vec<(u64, Result<Report, Failure>)> = (0..spec.seed_count as u64)
        .into_par_iter()
        .map(|offset| {
            let mut sub = config.clone();
            sub.seed = config.seed + offset;
            (sub.seed, run(spec.command, &sub))
        })
        .collect();

    let mut header = vec!["seed"];
    let mut rows = Vec::new();
    let mut exit = 0;
    for (seed, outcome) in runs {
        let report = outcome?;
        if header.len() == 1 {
            header.extend(&report.header);
        }
        exit = exit.max(report.exit);
        for mut row in report.rows {
            row.insert(0, seed.to_string());
            rows.push(row);
        }
    }
    Ok(Report { header, rows, exit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [2.504498618904389, -16.0 / 9.0, 1e-300, 0.1 + 0.2] {
            let s = fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt(f64::NAN), "NaN");
    }

    #[test]
    fn node_snapping_covers_range() {
        assert_eq!(node_index(1, 256, 2048), 8);
        assert_eq!(node_index(256, 256, 2048), 2048);
        assert_eq!(node_index(1, 512, 256), 1);
    }
}
