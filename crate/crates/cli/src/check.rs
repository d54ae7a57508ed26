//! The oracle suite behind `accelphase check`.
//!
//! Each check reports the worst discrepancy over its grid against a fixed
//! tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use accelphase::bath::{numerical_spectral_density, unruh_kms_ratio};
use accelphase::phase::{closed_form_with, quadrature_with};
use accelphase::{
    integrate_lindblad, kossakowski, phase_first_order, phase_kinematic, rho_closed_form,
    spectral_density, AtomBathParams, Trajectory,
};

use crate::config::RunConfig;
use crate::error::Result;

pub const GRID_THETA: [f64; 5] = [0.2, 0.8, PI / 2.0, 2.2, 2.9];
pub const GRID_ABAR: [f64; 5] = [0.0, 0.5, 1.0, 4.0, 10.0];
pub const KMS_LAMBDA: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
pub const KMS_ABAR: [f64; 4] = [0.5, 1.0, 4.0, 10.0];

pub const RK4_STEPS: usize = 10_000;
pub const KINEMATIC_SAMPLES: usize = 100_000;
pub const FT_EPS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| !l.passed()).count()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(
                f,
                "[{}] {:<28} worst {:.3e} < {:.1e}  {}",
                if l.passed() { "PASS" } else { "FAIL" },
                l.name,
                l.worst,
                l.tolerance,
                l.detail
            )?;
        }
        write!(
            f,
            "{} of {} checks passed in {:.2} s",
            self.lines.len() - self.failures(),
            self.lines.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

fn grid(quick: bool) -> Vec<(f64, f64)> {
    let (thetas, abars): (&[f64], &[f64]) = if quick {
        (&[0.8, PI / 2.0], &[0.0, 4.0])
    } else {
        (&GRID_THETA, &GRID_ABAR)
    };
    thetas
        .iter()
        .flat_map(|&t| abars.iter().map(move |&a| (t, a)))
        .collect()
}

struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: String::new(),
        }
    }

    fn update(&mut self, v: f64, theta: f64, abar: f64) {
        // NaN must register as a failure.
        if v.is_nan() || v > self.value {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
            self.at = format!("at theta = {theta:.4}, abar = {abar}");
        }
    }
}

pub fn cmd_check(cfg: &RunConfig) -> Result<CheckReport> {
    let start = Instant::now();
    let g = cfg.gamma_ratio;
    let points = grid(cfg.quick);
    let mut lines = Vec::new();

    let mut kms = Worst::new();
    for &l in &KMS_LAMBDA {
        for &a in &KMS_ABAR {
            let err = (unruh_kms_ratio(l, a)? - (-2.0 * PI * l / a).exp()).abs();
            kms.update(err, l, a);
        }
    }
    lines.push(CheckLine {
        name: "kms_detailed_balance",
        worst: kms.value,
        tolerance: 1e-12,
        detail: String::new(),
    });

    let mut rk4 = Worst::new();
    let mut quad_closed = Worst::new();
    let mut kin_quad = Worst::new();
    let mut first = Worst::new();
    for &(theta, abar) in &points {
        let params = AtomBathParams::new(g, abar, theta)?;
        let coeffs = kossakowski(&params);
        let period = coeffs.period();

        let exact = rho_closed_form(period, theta, &coeffs);
        let traj = integrate_lindblad(theta, &coeffs.perturbed(cfg.perturb), period, RK4_STEPS)?;
        let end = traj.last().expect("non-empty").state;
        rk4.update(end.max_abs_diff(&exact), theta, abar);

        let q = quadrature_with(theta, &coeffs, 1)?;
        let (c, _) = closed_form_with(theta, &coeffs, 1)?;
        quad_closed.update((q - c).abs(), theta, abar);

        let sampled = Trajectory::closed_form(theta, &coeffs, period, KINEMATIC_SAMPLES)?;
        kin_quad.update((phase_kinematic(&sampled)?.gamma - q).abs(), theta, abar);

        // Measured in units of the second-order remainder (4AT)², floored
        // where that drops below the quadrature noise.
        let x = 4.0 * coeffs.a * period;
        let bound = (x * x).max(1e-9);
        first.update(
            (phase_first_order(&params)?.gamma - q).abs() / bound,
            theta,
            abar,
        );
    }
    let perturbed = if cfg.perturb != 0.0 {
        format!("A perturbed by {:e} ", cfg.perturb)
    } else {
        String::new()
    };
    lines.push(CheckLine {
        name: "rk4_vs_closed_form",
        worst: rk4.value,
        tolerance: 1e-10,
        detail: format!("{perturbed}{}", rk4.at),
    });
    lines.push(CheckLine {
        name: "quadrature_vs_closed_form",
        worst: quad_closed.value,
        tolerance: 1e-9,
        detail: quad_closed.at,
    });
    lines.push(CheckLine {
        name: "kinematic_vs_quadrature",
        worst: kin_quad.value,
        tolerance: 1e-6,
        detail: kin_quad.at,
    });
    lines.push(CheckLine {
        name: "first_order_vs_quadrature",
        worst: first.value,
        tolerance: 1.0,
        detail: format!("ratio to max((4AT)^2, 1e-9) {}", first.at),
    });

    let mut ft = Worst::new();
    let ft_points: &[(f64, f64)] = if cfg.quick {
        &[(1.0, 2.0)]
    } else {
        &[(1.0, 2.0), (-1.0, 2.0), (0.5, 4.0)]
    };
    for &(l, a) in ft_points {
        let numeric = numerical_spectral_density(l, a, FT_EPS, 40.0 / a)?;
        let analytic = spectral_density(l, a)?;
        ft.update(((numeric - analytic) / analytic).abs(), l, a);
    }
    lines.push(CheckLine {
        name: "fourier_vs_spectral_density",
        worst: ft.value,
        tolerance: 1e-2,
        detail: format!("relative, eps = {FT_EPS:e}"),
    });

    Ok(CheckReport {
        lines,
        elapsed: start.elapsed(),
    })
}
