//! Reduced dynamics of the two-level atom.
//!
//! States are stored as `(rho_ee, coh)` with `coh = ⟨+|ρ|−⟩`, so trace and
//! Hermiticity hold structurally. Bloch components follow
//! `ρ = ½(1 + r·σ)`: `r1 = 2 Re coh`, `r2 = −2 Im coh`, `r3 = 2 rho_ee − 1`.

use std::io::{self, Write};
use std::ops::{Add, Mul};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::bath::{sin_cos_polar, KossakowskiCoeffs};
use crate::error::{Error, Result};
use crate::fmt_num;

/// Slack allowed on `rho_ee (1 − rho_ee) ≥ |coh|²` during integration.
pub const POSITIVITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityMatrix {
    /// Excited-state population ⟨+|ρ|+⟩.
    pub rho_ee: f64,
    /// Off-diagonal element ⟨+|ρ|−⟩.
    pub coh: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3).sqrt()
    }
}

impl DensityMatrix {
    /// `cos(θ/2)|+⟩ + sin(θ/2)|−⟩`.
    pub fn pure(theta: f64) -> Self {
        let (s, c) = sin_cos_polar(theta);
        Self {
            rho_ee: 0.5 * (1.0 + c),
            coh: Complex64::new(0.5 * s, 0.0),
        }
    }

    pub fn rho_gg(&self) -> f64 {
        1.0 - self.rho_ee
    }

    /// `Tr ρ² = 1 − 2 det ρ`.
    pub fn purity(&self) -> f64 {
        1.0 - 2.0 * (self.rho_ee * self.rho_gg() - self.coh.norm_sqr())
    }

    /// `|coh|² − rho_ee (1 − rho_ee)`; positive means ρ is not positive semidefinite.
    pub fn positivity_excess(&self) -> f64 {
        self.coh.norm_sqr() - self.rho_ee * self.rho_gg()
    }

    pub fn to_bloch(&self) -> BlochVector {
        BlochVector {
            r1: 2.0 * self.coh.re,
            r2: -2.0 * self.coh.im,
            r3: 2.0 * self.rho_ee - 1.0,
        }
    }

    pub fn from_bloch(r: &BlochVector) -> Self {
        Self {
            rho_ee: 0.5 * (1.0 + r.r3),
            coh: Complex64::new(0.5 * r.r1, -0.5 * r.r2),
        }
    }

    /// Full matrix in the `(|+⟩, |−⟩)` basis.
    pub fn to_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(self.rho_ee, 0.0),
            self.coh,
            self.coh.conj(),
            Complex64::new(self.rho_gg(), 0.0),
        )
    }

    /// Reads `rho_ee` and `coh` back from a matrix; the lower triangle and
    /// the ground population are ignored.
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Self {
        Self {
            rho_ee: m[(0, 0)].re,
            coh: m[(0, 1)],
        }
    }

    /// Largest absolute element-wise difference of the two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.coh - other.coh;
        (self.rho_ee - other.rho_ee)
            .abs()
            .max(d.re.abs())
            .max(d.im.abs())
    }
}

// Linear-space operations, used for RK4 stages and derivatives.
impl Add for DensityMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            rho_ee: self.rho_ee + o.rho_ee,
            coh: self.coh + o.coh,
        }
    }
}

impl Mul<f64> for DensityMatrix {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            rho_ee: self.rho_ee * k,
            coh: self.coh * k,
        }
    }
}

/// Exact solution of the master equation from the pure initial state
/// `cos(θ/2)|+⟩ + sin(θ/2)|−⟩`.
pub fn rho_closed_form(tau_bar: f64, theta: f64, coeffs: &KossakowskiCoeffs) -> DensityMatrix {
    let (s, c) = sin_cos_polar(theta);
    let cos2_half = 0.5 * (1.0 + c);
    let rotation = Complex64::from_polar(1.0, -coeffs.omega * tau_bar);
    if coeffs.unitary {
        return DensityMatrix {
            rho_ee: cos2_half,
            coh: rotation * (0.5 * s),
        };
    }
    let (a, b) = (coeffs.a, coeffs.b);
    let decay = (-4.0 * a * tau_bar).exp();
    let relaxed = -(-4.0 * a * tau_bar).exp_m1();
    let rho_ee = decay * cos2_half + (a - b) / (2.0 * a) * relaxed;
    let damping = (-2.0 * (2.0 * a + coeffs.c) * tau_bar).exp();
    DensityMatrix {
        rho_ee,
        coh: rotation * (0.5 * s * damping),
    }
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

fn levi_civita_3(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Generator of the Kossakowski–Lindblad equation on a full 2×2 matrix,
/// `−i[H_eff, ρ] + ½ Σ a_ij (2σ_j ρ σ_i − σ_i σ_j ρ − ρ σ_i σ_j)` with
/// `H_eff = (Ω/2) σ₃` and `a_ij = A δ_ij − i B ε_ij3 + C δ_i3 δ_j3`.
pub fn lindblad_generator(
    rho: &Matrix2<Complex64>,
    coeffs: &KossakowskiCoeffs,
) -> Matrix2<Complex64> {
    let sigma = pauli();
    let rho = *rho;
    let h = sigma[2] * Complex64::new(0.5 * coeffs.omega, 0.0);
    let mut d = (h * rho - rho * h) * Complex64::new(0.0, -1.0);
    for i in 0..3 {
        for j in 0..3 {
            let mut a_ij = Complex64::new(0.0, -coeffs.b * levi_civita_3(i, j));
            if i == j {
                a_ij += coeffs.a;
            }
            if i == 2 && j == 2 {
                a_ij += coeffs.c;
            }
            if a_ij == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ss = sigma[i] * sigma[j];
            let term = sigma[j] * rho * sigma[i] * Complex64::new(2.0, 0.0) - ss * rho - rho * ss;
            d += term * (a_ij * 0.5);
        }
    }
    d
}

/// Time derivative of `state` under [`lindblad_generator`].
///
/// Assembled from full matrices, independently of [`rho_closed_form`].
pub fn lindblad_rhs(state: &DensityMatrix, coeffs: &KossakowskiCoeffs) -> DensityMatrix {
    DensityMatrix::from_matrix(&lindblad_generator(&state.to_matrix(), coeffs))
}

/// Uniformly sampled evolution `τ̄ ↦ ρ(τ̄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub tau_bar: f64,
    pub state: DensityMatrix,
}

pub const CSV_COLUMNS: [&str; 7] = ["tau_bar", "rho_ee", "re_coh", "im_coh", "r1", "r2", "r3"];

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Samples `rho_closed_form` on `steps + 1` uniform points of `[0, tau_end]`.
    pub fn closed_form(
        theta: f64,
        coeffs: &KossakowskiCoeffs,
        tau_end: f64,
        steps: usize,
    ) -> Result<Self> {
        check_grid(tau_end, steps, 1)?;
        let step = tau_end / steps as f64;
        let samples = (0..=steps)
            .map(|k| {
                let tau_bar = k as f64 * step;
                Sample {
                    tau_bar,
                    state: rho_closed_form(tau_bar, theta, coeffs),
                }
            })
            .collect();
        Ok(Self { samples, step })
    }

    /// CSV fields of one sample, in [`CSV_COLUMNS`] order.
    pub fn csv_fields(sample: &Sample) -> [String; 7] {
        let s = &sample.state;
        let r = s.to_bloch();
        [
            fmt_num(sample.tau_bar),
            fmt_num(s.rho_ee),
            fmt_num(s.coh.re),
            fmt_num(s.coh.im),
            fmt_num(r.r1),
            fmt_num(r.r2),
            fmt_num(r.r3),
        ]
    }

    /// Writes the trajectory as CSV. A leading `#` line records the Bloch
    /// sign convention, then the mandatory header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", CSV_CONVENTION)?;
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        for s in &self.samples {
            writeln!(out, "{}", Self::csv_fields(s).join(","))?;
        }
        Ok(())
    }
}

pub const CSV_CONVENTION: &str =
    "# coh = <+|rho|->; r1 = 2*Re(coh), r2 = -2*Im(coh), r3 = 2*rho_ee - 1";

fn check_grid(tau_end: f64, steps: usize, min_steps: usize) -> Result<()> {
    if !(tau_end > 0.0 && tau_end.is_finite()) {
        return Err(Error::InvalidParams {
            field: "tau_end",
            reason: format!("must be finite and > 0, got {tau_end}"),
        });
    }
    if steps < min_steps {
        return Err(Error::InvalidParams {
            field: "steps",
            reason: format!("must be >= {min_steps}, got {steps}"),
        });
    }
    Ok(())
}

/// Classical fixed-step RK4 integration of [`lindblad_rhs`] from the pure
/// initial state. Keep `h ≤ 2π / (50 Ω̄)`.
pub fn integrate_lindblad(
    theta: f64,
    coeffs: &KossakowskiCoeffs,
    tau_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_grid(tau_end, steps, 100)?;
    let h = tau_end / steps as f64;
    let mut state = DensityMatrix::pure(theta);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(Sample {
        tau_bar: 0.0,
        state,
    });
    for k in 1..=steps {
        let k1 = lindblad_rhs(&state, coeffs);
        let k2 = lindblad_rhs(&(state + k1 * (0.5 * h)), coeffs);
        let k3 = lindblad_rhs(&(state + k2 * (0.5 * h)), coeffs);
        let k4 = lindblad_rhs(&(state + k3 * h), coeffs);
        state = state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let tau_bar = k as f64 * h;
        let excess = state.positivity_excess();
        if excess > POSITIVITY_SLACK {
            return Err(Error::Positivity { tau_bar, excess });
        }
        samples.push(Sample { tau_bar, state });
    }
    Ok(Trajectory { samples, step: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{kossakowski, AtomBathParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn coeffs(g: f64, abar: f64) -> KossakowskiCoeffs {
        kossakowski(&AtomBathParams::new(g, abar, 0.0).unwrap())
    }

    #[test]
    fn initial_state_is_pure() {
        for &theta in &[0.0, 0.4, PI / 2.0, 2.5, PI] {
            let rho = rho_closed_form(0.0, theta, &coeffs(1e-3, 2.0));
            assert_abs_diff_eq!(rho.rho_ee, (theta / 2.0).cos().powi(2), epsilon = 1e-15);
            assert_abs_diff_eq!(rho.coh.re, 0.5 * theta.sin(), epsilon = 1e-15);
            assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn long_time_limits() {
        let k = coeffs(1e-6, 4.0);
        let rho = rho_closed_form(1e8, PI / 2.0, &k);
        // (1 - tanh(π/4)) / 2
        assert_abs_diff_eq!(rho.rho_ee, 0.172_102_898_683_663_78, epsilon = 1e-13);
        assert!(rho.coh.norm() < 1e-100);
        assert_abs_diff_eq!(rho.to_bloch().r3, -k.r, epsilon = 1e-13);

        let rho = rho_closed_form(1e9, 0.3, &coeffs(1e-6, 0.0));
        assert!(rho.rho_ee.abs() < 1e-100);
    }

    #[test]
    fn rhs_fixed_point_and_decay() {
        // Maximally mixed state with B = 0 does not move its populations.
        let k = KossakowskiCoeffs {
            a: 0.2,
            b: 0.0,
            c: -0.2,
            r: 0.0,
            omega: 1.0,
            unitary: false,
        };
        let mixed = DensityMatrix {
            rho_ee: 0.5,
            coh: Complex64::new(0.0, 0.0),
        };
        let d = lindblad_rhs(&mixed, &k);
        assert_abs_diff_eq!(d.rho_ee, 0.0, epsilon = 1e-16);

        // Inertial branch: A = B = γ₀/4 so the excited population decays at γ₀.
        let g = 1e-3;
        let k = coeffs(g, 0.0);
        for &p in &[1.0, 0.7, 0.25] {
            let state = DensityMatrix {
                rho_ee: p,
                coh: Complex64::new(0.0, 0.0),
            };
            assert_abs_diff_eq!(lindblad_rhs(&state, &k).rho_ee, -g * p, epsilon = 1e-18);
        }
    }

    #[test]
    fn rhs_matches_finite_difference_of_closed_form() {
        for &(g, abar, theta, tau) in &[
            (1e-2, 4.0, 0.7, 3.1),
            (1e-3, 0.0, 2.2, 10.0),
            (5e-2, 1.0, 1.3, 0.5),
            (0.0, 2.0, 0.9, 4.0),
        ] {
            let k = coeffs(g, abar);
            let h = 1e-4;
            let fd = (rho_closed_form(tau + h, theta, &k)
                + rho_closed_form(tau - h, theta, &k) * -1.0)
                * (0.5 / h);
            let exact = lindblad_rhs(&rho_closed_form(tau, theta, &k), &k);
            assert!(fd.max_abs_diff(&exact) < 1e-8, "{:?}", (g, abar, theta));
        }
    }

    #[test]
    fn rk4_matches_closed_form() {
        let k = coeffs(1e-6, 4.0);
        let traj = integrate_lindblad(PI / 2.0, &k, 2.0 * PI, 10_000).unwrap();
        assert_eq!(traj.len(), 10_001);
        let end = traj.last().unwrap();
        let exact = rho_closed_form(end.tau_bar, PI / 2.0, &k);
        assert!(end.state.max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn rk4_long_time_reaches_stationary_state() {
        let k = coeffs(0.05, 4.0);
        let traj = integrate_lindblad(PI / 2.0, &k, 200.0, 20_000).unwrap();
        let end = traj.last().unwrap().state;
        assert_abs_diff_eq!(end.to_bloch().r3, -k.r, epsilon = 1e-6);
        assert!(end.coh.norm() < 1e-6);
    }

    #[test]
    fn rk4_unitary_preserves_populations_and_radius() {
        let k = KossakowskiCoeffs::unitary(1.0);
        let traj = integrate_lindblad(1.1, &k, 4.0 * PI, 2_000).unwrap();
        let first = traj.samples[0].state;
        for s in &traj.samples {
            assert_abs_diff_eq!(s.state.rho_ee, first.rho_ee, epsilon = 1e-15);
            assert_abs_diff_eq!(s.state.coh.norm(), first.coh.norm(), epsilon = 1e-10);
        }
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let k = coeffs(0.02, 2.0);
        let err = |steps| {
            let t = integrate_lindblad(1.0, &k, 2.0 * PI, steps).unwrap();
            let e = t.last().unwrap();
            e.state.max_abs_diff(&rho_closed_form(e.tau_bar, 1.0, &k))
        };
        let (e1, e2) = (err(100), err(200));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rk4_rejects_bad_grids_and_flags_positivity() {
        let k = coeffs(1e-3, 1.0);
        assert!(integrate_lindblad(1.0, &k, 1.0, 99).is_err());
        assert!(integrate_lindblad(1.0, &k, 0.0, 1000).is_err());
        // Wildly unstable step on a fast decay.
        let fast = coeffs(4.0, 1.0);
        let err = integrate_lindblad(PI / 2.0, &fast, 1000.0, 100).unwrap_err();
        assert!(matches!(err, Error::Positivity { .. }));
    }

    #[test]
    fn bloch_examples() {
        let up = DensityMatrix::pure(0.0);
        let r = up.to_bloch();
        assert_eq!((r.r1, r.r2, r.r3), (0.0, 0.0, 1.0));
        assert_eq!(DensityMatrix::from_bloch(&r), up);
        let r = DensityMatrix::pure(PI / 2.0).to_bloch();
        assert_abs_diff_eq!(r.r1, 1.0, epsilon = 1e-15);
        assert_eq!(r.r2, 0.0);
        assert_abs_diff_eq!(r.r3, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory::closed_form(PI / 2.0, &coeffs(1e-6, 0.0), 2.0 * PI, 4).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "tau_bar,rho_ee,re_coh,im_coh,r1,r2,r3");
        assert_eq!(lines.len(), 2 + 5);
        assert!(lines[2].starts_with("0.0000000000000000e0,5.0000000000000000e-1,"));
    }
}
