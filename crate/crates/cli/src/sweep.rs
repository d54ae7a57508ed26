use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use accelphase::{fmt_num, phase_difference, phase_first_order, phase_quadrature, AtomBathParams};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, FieldError, Result};
use crate::output::write_atomic;

pub const SWEEP_COLUMNS: [&str; 6] = [
    "theta",
    "abar",
    "gamma_quadrature",
    "gamma_first_order",
    "delta_a_exact",
    "delta_a_first_order",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub abar: f64,
    pub gamma_quadrature: f64,
    pub gamma_first_order: f64,
    pub delta_a_exact: f64,
    pub delta_a_first_order: f64,
}

impl SweepRow {
    pub fn fields(&self) -> [f64; 6] {
        [
            self.theta,
            self.abar,
            self.gamma_quadrature,
            self.gamma_first_order,
            self.delta_a_exact,
            self.delta_a_first_order,
        ]
    }
}

/// `n` evenly spaced polar angles covering `[0, π]` inclusive.
pub fn theta_grid(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { PI } else { PI * i as f64 / last })
        .collect()
}

fn row(gamma_ratio: f64, omega_shift: f64, theta: f64, abar: f64) -> Result<SweepRow> {
    let params = AtomBathParams::new(gamma_ratio, abar, theta)?.with_omega_shift(omega_shift)?;
    let d = phase_difference(&params)?;
    let r = SweepRow {
        theta,
        abar,
        gamma_quadrature: phase_quadrature(&params, 1)?.gamma,
        gamma_first_order: phase_first_order(&params)?.gamma,
        delta_a_exact: d.exact,
        delta_a_first_order: d.first_order,
    };
    if r.fields().iter().all(|x| x.is_finite()) {
        Ok(r)
    } else {
        Err(CliError::Validation(vec![FieldError {
            field: "grid".into(),
            reason: format!("non-finite result at theta = {theta}, abar = {abar}"),
        }]))
    }
}

/// Evaluates the grid in parallel; rows come back θ-major, ā-minor.
pub fn sweep_rows(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let thetas = theta_grid(cfg.theta_points);
    let abars = cfg.sweep_abars();
    let points: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| abars.iter().map(move |&a| (t, a)))
        .collect();
    // Indexed collect keeps input order whatever the completion order.
    points
        .par_iter()
        .map(|&(t, a)| row(cfg.gamma_ratio, cfg.omega_shift, t, a))
        .collect()
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "{}", SWEEP_COLUMNS.join(","))?;
        for r in rows {
            let line: Vec<String> = r.fields().iter().map(|&x| fmt_num(x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    })
}

/// Emits a gnuplot script drawing `|δ_a|` against θ for each ā, and
/// against ā at the θ nearest π/2.
pub fn write_plot_script(csv: &Path, script: &Path, thetas: usize, abars: &[f64]) -> Result<()> {
    let data = csv.display().to_string().replace('\'', "''");
    let image = script
        .with_extension("png")
        .display()
        .to_string()
        .replace('\'', "''");
    let na = abars.len();
    let mid = theta_grid(thetas)
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - PI / 2.0).abs().total_cmp(&(b.1 - PI / 2.0).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    write_atomic(script, |w| {
        writeln!(w, "# gnuplot -p {}", script.display())?;
        writeln!(w, "set datafile separator ','")?;
        writeln!(w, "set terminal pngcairo size 1200,500")?;
        writeln!(w, "set output '{image}'")?;
        writeln!(w, "set multiplot layout 1,2")?;
        writeln!(w, "set xlabel 'theta (rad)'")?;
        writeln!(w, "set ylabel '|delta_a| (rad)'")?;
        write!(w, "plot")?;
        for (j, a) in abars.iter().enumerate() {
            let sep = if j + 1 == na { "\n" } else { ", \\\n    " };
            write!(
                w,
                " '{data}' skip 1 every {na}::{j} using 1:(abs($6)) with linespoints title 'first order, abar={a}', \
                 '{data}' skip 1 every {na}::{j} using 1:(abs($5)) with points title 'exact, abar={a}'{sep}"
            )?;
        }
        writeln!(w, "set xlabel 'abar'")?;
        let (first, last) = (mid * na, mid * na + na - 1);
        writeln!(
            w,
            "plot '{data}' skip 1 every ::{first}::{last} using 2:(abs($6)) with linespoints title 'first order', \\\n    \
             '{data}' skip 1 every ::{first}::{last} using 2:(abs($5)) with points title 'exact'"
        )?;
        writeln!(w, "unset multiplot")
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub path: PathBuf,
    pub plot: Option<PathBuf>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// θ of the largest `|δ_a|` (first order) for each swept ā.
    pub fn argmax_theta(&self) -> Vec<(f64, f64)> {
        let mut abars: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !abars.contains(&r.abar) {
                abars.push(r.abar);
            }
        }
        abars
            .into_iter()
            .map(|a| {
                let best = self
                    .rows
                    .iter()
                    .filter(|r| r.abar == a)
                    .max_by(|x, y| {
                        x.delta_a_first_order
                            .abs()
                            .total_cmp(&y.delta_a_first_order.abs())
                    })
                    .expect("non-empty");
                (a, best.theta)
            })
            .collect()
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wrote {} rows to {}",
            self.rows.len(),
            self.path.display()
        )?;
        if let Some(p) = &self.plot {
            write!(f, "\nplot script {}", p.display())?;
        }
        for (a, t) in self.argmax_theta() {
            write!(f, "\nabar = {a}: max |delta_a| at theta = {t:.6}")?;
        }
        Ok(())
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepReport> {
    let rows = sweep_rows(cfg)?;
    let path = cfg.out.clone().expect("validated");
    write_sweep_csv(&rows, &path)?;
    if let Some(script) = &cfg.plot {
        write_plot_script(&path, script, cfg.theta_points, &cfg.sweep_abars())?;
    }
    Ok(SweepReport {
        path,
        plot: cfg.plot.clone(),
        rows,
    })
}
