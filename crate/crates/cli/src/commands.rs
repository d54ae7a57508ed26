use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use accelphase::bath::lab_time;
use accelphase::dynamics::{CSV_COLUMNS, CSV_CONVENTION};
use accelphase::phase::{first_order_reliable, FIRST_ORDER_GAMMA_LIMIT, QUADRATURE_TOL};
use accelphase::{
    fmt_num, integrate_lindblad, kossakowski, phase_closed_form, phase_difference,
    phase_first_order, phase_kinematic, phase_quadrature, Method, Trajectory,
};

use crate::config::{AbarSource, RunConfig};
use crate::error::Result;
use crate::output::write_atomic;

pub const RK4_COLUMNS: [&str; 3] = ["rk4_rho_ee", "rk4_re_coh", "rk4_im_coh"];

fn describe_abar(cfg: &RunConfig, abar: f64) -> String {
    match cfg.abar_source {
        AbarSource::Direct => format!("abar = {abar}"),
        AbarSource::Si { omega0, accel } => {
            format!("abar = {abar:.6} (from omega0 = {omega0:e} rad/s, accel = {accel:e} m/s^2)")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveReport {
    pub path: PathBuf,
    pub rows: usize,
    /// Largest element-wise RK4 deviation, with `--oracle`.
    pub max_deviation: Option<f64>,
}

impl fmt::Display for EvolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wrote {} rows to {}", self.rows, self.path.display())?;
        if let Some(d) = self.max_deviation {
            write!(f, "\nmax |rho_rk4 - rho_exact| = {d:e}")?;
        }
        Ok(())
    }
}

/// Samples the exact density matrix over `periods` quasi-cycles and writes
/// the trajectory CSV, optionally beside an RK4 solution.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<EvolveReport> {
    let params = cfg.params()?;
    let coeffs = kossakowski(&params);
    let horizon = cfg.periods as f64 * coeffs.period();
    let exact = Trajectory::closed_form(params.theta, &coeffs, horizon, cfg.steps)?;
    let rk4 = if cfg.oracle {
        Some(integrate_lindblad(
            params.theta,
            &coeffs,
            horizon,
            cfg.steps,
        )?)
    } else {
        None
    };
    let max_deviation = rk4.as_ref().map(|r| {
        exact
            .samples
            .iter()
            .zip(&r.samples)
            .map(|(e, n)| e.state.max_abs_diff(&n.state))
            .fold(0.0, f64::max)
    });

    let path = cfg.out.clone().expect("validated");
    write_atomic(&path, |w: &mut dyn Write| {
        writeln!(w, "{CSV_CONVENTION}")?;
        let mut header = CSV_COLUMNS.join(",");
        if rk4.is_some() {
            header.push(',');
            header.push_str(&RK4_COLUMNS.join(","));
        }
        writeln!(w, "{header}")?;
        for (k, s) in exact.samples.iter().enumerate() {
            let mut line = Trajectory::csv_fields(s).join(",");
            if let Some(r) = &rk4 {
                let st = &r.samples[k].state;
                for x in [st.rho_ee, st.coh.re, st.coh.im] {
                    line.push(',');
                    line.push_str(&fmt_num(x));
                }
            }
            writeln!(w, "{line}")?;
        }
        if let Some(d) = max_deviation {
            writeln!(w, "# max_deviation = {}", fmt_num(d))?;
        }
        Ok(())
    })?;
    Ok(EvolveReport {
        path,
        rows: exact.len(),
        max_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLine {
    pub method: Method,
    pub gamma: f64,
    /// Expected accuracy of this route.
    pub tolerance: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub abar_line: String,
    pub theta: f64,
    pub gamma_ratio: f64,
    pub periods: u32,
    /// `−π(1 − cos θ)` per quasi-cycle.
    pub unitary_reference: f64,
    pub lines: Vec<PhaseLine>,
    pub warnings: Vec<String>,
}

impl PhaseReport {
    pub fn gamma(&self, method: Method) -> Option<f64> {
        self.lines
            .iter()
            .find(|l| l.method == method)
            .map(|l| l.gamma)
    }
}

impl fmt::Display for PhaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}, theta = {}, gamma_ratio = {:e}, periods = {}",
            self.abar_line, self.theta, self.gamma_ratio, self.periods
        )?;
        for l in &self.lines {
            write!(
                f,
                "{:<12} {:>24}  (+/- {:.1e})",
                l.method.name(),
                fmt_num(l.gamma),
                l.tolerance
            )?;
            if let Some(n) = &l.note {
                write!(f, "  {n}")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{:<12} {:>24}",
            "unitary",
            fmt_num(self.unitary_reference)
        )?;
        for w in &self.warnings {
            write!(f, "\nwarning: {w}")?;
        }
        Ok(())
    }
}

/// Geometric phase over `periods` quasi-cycles by each requested method.
pub fn cmd_phase(cfg: &RunConfig) -> Result<PhaseReport> {
    let params = cfg.params()?;
    let coeffs = kossakowski(&params);
    let methods: Vec<Method> = match cfg.method {
        Some(m) => vec![m],
        None => Method::ALL.to_vec(),
    };
    let n = cfg.periods;
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for m in methods {
        let line = match m {
            Method::Quadrature => PhaseLine {
                method: m,
                gamma: phase_quadrature(&params, n)?.gamma,
                tolerance: QUADRATURE_TOL * n as f64,
                note: None,
            },
            Method::ClosedForm => {
                let r = phase_closed_form(&params, n)?;
                PhaseLine {
                    method: m,
                    gamma: r.gamma,
                    tolerance: 1e-9,
                    note: r.fallback.then(|| "(quadrature fallback)".to_string()),
                }
            }
            Method::FirstOrder => {
                if n != 1 {
                    warnings.push("first_order covers a single quasi-cycle; skipped".into());
                    continue;
                }
                if !first_order_reliable(&params) {
                    warnings.push(format!(
                        "gamma_ratio {:e} exceeds {:e}; first_order is outside its range",
                        params.gamma_ratio, FIRST_ORDER_GAMMA_LIMIT
                    ));
                }
                // Second-order remainder scale of the expansion.
                let x = 4.0 * coeffs.a * coeffs.period();
                PhaseLine {
                    method: m,
                    gamma: phase_first_order(&params)?.gamma,
                    tolerance: (x * x).max(f64::EPSILON),
                    note: None,
                }
            }
            Method::Kinematic => {
                let samples = cfg.samples * n as usize;
                let traj = Trajectory::closed_form(
                    params.theta,
                    &coeffs,
                    n as f64 * coeffs.period(),
                    samples,
                )?;
                let step = coeffs.period() / cfg.samples as f64;
                PhaseLine {
                    method: m,
                    gamma: phase_kinematic(&traj)?.gamma,
                    tolerance: (step * step).max(1e-12) * n as f64,
                    note: None,
                }
            }
        };
        lines.push(line);
    }
    let reference = -PI * (1.0 - params.sin_cos_theta().1) * n as f64;
    Ok(PhaseReport {
        abar_line: describe_abar(cfg, params.abar),
        theta: params.theta,
        gamma_ratio: params.gamma_ratio,
        periods: n,
        unitary_reference: reference,
        lines,
        warnings,
    })
}

/// Writes a phase report as `method,gamma,tolerance` CSV.
pub fn write_phase_csv(report: &PhaseReport, path: &std::path::Path) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "method,gamma,tolerance")?;
        for l in &report.lines {
            writeln!(
                w,
                "{},{},{}",
                l.method.name(),
                fmt_num(l.gamma),
                fmt_num(l.tolerance)
            )?;
        }
        writeln!(w, "unitary,{},0", fmt_num(report.unitary_reference))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub abar_line: String,
    pub abar: f64,
    pub theta: f64,
    pub first_order: f64,
    pub exact: f64,
    /// Proper duration of one quasi-cycle, in units of `1/ω₀`.
    pub cycle: f64,
    /// Laboratory duration of that cycle, in units of `1/ω₀`.
    pub lab_cycle: f64,
    /// The same in seconds, when `ω₀` is known.
    pub lab_cycle_seconds: Option<f64>,
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}, theta = {}", self.abar_line, self.theta)?;
        writeln!(f, "delta_a first_order = {}", fmt_num(self.first_order))?;
        writeln!(f, "delta_a exact       = {}", fmt_num(self.exact))?;
        write!(
            f,
            "lab time per cycle  = {} / omega0 (proper {})",
            fmt_num(self.lab_cycle),
            fmt_num(self.cycle)
        )?;
        if let Some(s) = self.lab_cycle_seconds {
            write!(f, "\nlab time per cycle  = {s:.6} s")?;
        }
        Ok(())
    }
}

/// Accelerated-minus-inertial phase for one quasi-cycle, with the lab-frame
/// duration of that cycle.
pub fn cmd_diff(cfg: &RunConfig) -> Result<DiffReport> {
    let params = cfg.params()?;
    let d = phase_difference(&params)?;
    let cycle = kossakowski(&params).period();
    let lab = lab_time(cycle, params.abar);
    Ok(DiffReport {
        abar_line: describe_abar(cfg, params.abar),
        abar: params.abar,
        theta: params.theta,
        first_order: d.first_order,
        exact: d.exact,
        cycle,
        lab_cycle: lab,
        lab_cycle_seconds: cfg.omega0.map(|w| lab / w),
    })
}
