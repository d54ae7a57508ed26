//! Mixed-state geometric phase of the open two-level atom.
//!
//! Four independent routes are provided:
//!
//! * [`phase_quadrature`]: adaptive quadrature of `−Ω̄ ∫ cos²(θ_τ/2) dτ̄`;
//! * [`phase_closed_form`]: the antiderivative `F(φ)` evaluated per quasi-cycle;
//! * [`phase_first_order`]: the expansion to first order in `γ₀/ω₀`;
//! * [`phase_kinematic`]: a discretised parallel-transport (Pancharatnam)
//!   evaluation on any sampled [`Trajectory`], without reference to the
//!   closed-form eigenvectors.
//!
//! One quasi-cycle lasts `T̄ = 2π / Ω̄`. Phases are accumulated continuously
//! and never wrapped to `(−π, π]`.

use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::bath::{kossakowski, planck_factor, sin_cos_polar, AtomBathParams, KossakowskiCoeffs};
use crate::dynamics::{DensityMatrix, Trajectory};
use crate::error::{Error, Result};
use crate::quad;

/// Absolute tolerance of [`phase_quadrature`], in radians.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Below this eigenvalue gap the eigenframe is treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// `|Q|` below which the closed form falls back to quadrature.
pub const Q_MIN: f64 = 1e-8;
/// Beyond this `γ₀/ω₀` the first-order expansion should not be trusted.
pub const FIRST_ORDER_GAMMA_LIMIT: f64 = 1e-2;
/// Neighbouring eigenvectors with a smaller overlap signal undersampling.
pub const MIN_NEIGHBOUR_OVERLAP: f64 = 0.5;

// The e^{+4Aτ}-factored integrand overflows past this exponent.
const FACTORED_EXPONENT_LIMIT: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    ClosedForm,
    FirstOrder,
    Kinematic,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Quadrature,
        Method::ClosedForm,
        Method::FirstOrder,
        Method::Kinematic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::FirstOrder => "first_order",
            Method::Kinematic => "kinematic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    /// Accumulated geometric phase in radians.
    pub gamma: f64,
    pub method: Method,
    /// Evolution time `T̄` covered.
    pub horizon: f64,
    /// Inputs, when the phase was computed from parameters rather than a
    /// bare trajectory.
    pub params: Option<AtomBathParams>,
    /// Set when the closed form was not applicable and quadrature was used.
    pub fallback: bool,
}

/// Eigen-decomposition of `ρ(τ̄)` in the closed-form parametrisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenFrame {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Mixing angle of `|φ₊⟩ = sin(θ_τ/2)|+⟩ + cos(θ_τ/2) e^{iΩτ}|−⟩`, in `[0, π]`.
    pub theta_tau: f64,
}

/// Bloch `ρ₃` and the squared transverse length at `tau_bar`.
fn bloch_z_and_perp2(tau_bar: f64, theta: f64, coeffs: &KossakowskiCoeffs) -> (f64, f64) {
    let (s, c) = sin_cos_polar(theta);
    if coeffs.unitary {
        return (c, s * s);
    }
    let x = 4.0 * coeffs.a * tau_bar;
    let decay = (-x).exp();
    let rho3 = decay * c + coeffs.b / coeffs.a * (-x).exp_m1();
    let perp2 = (-4.0 * (2.0 * coeffs.a + coeffs.c) * tau_bar).exp() * s * s;
    (rho3, perp2)
}

pub fn eigenframe(tau_bar: f64, theta: f64, coeffs: &KossakowskiCoeffs) -> Result<EigenFrame> {
    let (rho3, perp2) = bloch_z_and_perp2(tau_bar, theta, coeffs);
    let eta = rho3.hypot(perp2.sqrt()).min(1.0);
    if eta < DEGENERACY_GAP {
        return Err(Error::Degenerate { tau_bar, gap: eta });
    }
    // tan(θ_τ/2) = sqrt((η + ρ₃)/(η − ρ₃)); the smaller of the two is formed
    // as perp²/(larger) to avoid cancellation.
    let (plus, minus) = if rho3 >= 0.0 {
        let p = eta + rho3;
        (p, perp2 / p)
    } else {
        let m = eta - rho3;
        (perp2 / m, m)
    };
    Ok(EigenFrame {
        lambda_plus: 0.5 * (1.0 + eta),
        lambda_minus: (0.5 * (1.0 - eta)).max(0.0),
        theta_tau: 2.0 * plus.sqrt().atan2(minus.sqrt()),
    })
}

/// `cos²(θ_τ/2)` in the e^{+4Aτ}-factored form
/// `½(1 − (R − R e^{4Aτ} + cos θ) / sqrt(e^{4Aτ} sin²θ + (R − R e^{4Aτ} + cos θ)²))`.
pub fn phase_integrand(tau_bar: f64, theta: f64, coeffs: &KossakowskiCoeffs) -> Result<f64> {
    let (s, c) = sin_cos_polar(theta);
    let x = if coeffs.unitary {
        0.0
    } else {
        4.0 * coeffs.a * tau_bar
    };
    let (num, den, eta) = if x <= FACTORED_EXPONENT_LIMIT {
        let r = if coeffs.unitary {
            0.0
        } else {
            coeffs.b / coeffs.a
        };
        let grow = x.exp();
        let num = c - r * x.exp_m1();
        let den = ((0.5 * x).exp() * s).hypot(num);
        (num, den, den / grow)
    } else {
        let (rho3, perp2) = bloch_z_and_perp2(tau_bar, theta, coeffs);
        let eta = rho3.hypot(perp2.sqrt());
        (rho3, eta, eta)
    };
    if eta < DEGENERACY_GAP {
        return Err(Error::Degenerate { tau_bar, gap: eta });
    }
    Ok(0.5 * (1.0 - num / den))
}

/// `−Ω̄ ∫₀^{T̄} cos²(θ_τ/2) dτ̄` over `periods` quasi-cycles, integrated one
/// cycle at a time.
pub fn phase_quadrature(params: &AtomBathParams, periods: u32) -> Result<PhaseResult> {
    params.validate()?;
    let coeffs = kossakowski(params);
    let gamma = quadrature_with(params.theta, &coeffs, periods)?;
    Ok(PhaseResult {
        gamma,
        method: Method::Quadrature,
        horizon: periods as f64 * coeffs.period(),
        params: Some(*params),
        fallback: false,
    })
}

/// Quadrature route for arbitrary (possibly perturbed) coefficients.
pub fn quadrature_with(theta: f64, coeffs: &KossakowskiCoeffs, periods: u32) -> Result<f64> {
    let period = coeffs.period();
    let failure = Cell::new(None);
    let f = |t: f64| match phase_integrand(t, theta, coeffs) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let tol = QUADRATURE_TOL / coeffs.omega / periods.max(1) as f64;
    let mut total = 0.0;
    for k in 0..periods {
        let a = k as f64 * period;
        let r = quad::integrate(f, a, a + period, tol, 2_000)?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        total += r.value;
    }
    Ok(-coeffs.omega * total)
}

/// Antiderivative `F(φ)` of `−cos²(θ_φ/2)`, evaluated as differences so that
/// the `1/(8A)` prefactor does not amplify rounding.
struct ClosedForm {
    four_a: f64,
    r: f64,
    q: f64,
    k: f64,
    arg1_0: f64,
    arg2_0: f64,
}

impl ClosedForm {
    fn new(theta: f64, coeffs: &KossakowskiCoeffs) -> Option<Self> {
        if coeffs.unitary || !(coeffs.a > 0.0) {
            return None;
        }
        let (_, c) = sin_cos_polar(theta);
        let r = coeffs.b / coeffs.a;
        let q = r + c;
        if !(r > 0.0) || q.abs() < Q_MIN {
            return None;
        }
        let one_minus_c = 2.0 * (0.5 * theta).sin().powi(2);
        Some(Self {
            four_a: 4.0 * coeffs.a,
            r,
            q,
            k: 1.0 - q * q - r * r,
            // ((1+R)² − Q²) / 2R and (1+|Q|)² − R², i.e. both logs at φ = 0.
            arg1_0: one_minus_c * (1.0 + 2.0 * r + c) / (2.0 * r),
            arg2_0: (1.0 + q.abs() - r) * (1.0 + q.abs() + r),
        })
    }

    /// Increments of the two log arguments between 0 and `phi`.
    fn deltas(&self, phi: f64) -> (f64, f64) {
        let em = (self.four_a * phi).exp_m1();
        let e = 1.0 + em;
        let inv_em = (-self.four_a * phi).exp_m1();
        let s2_minus_1 = em * (self.r * self.r * (e + 1.0) + self.k);
        let s_minus_1 = s2_minus_1 / ((1.0 + s2_minus_1).sqrt() + 1.0);
        let d1 = self.r * em + s_minus_1;
        let d2 = 2.0 * self.q * self.q * inv_em + 2.0 * self.q.abs() * (s_minus_1 / e + inv_em);
        (d1, d2)
    }

    /// `F(b) − F(a)`, or `None` if a logarithm leaves its domain.
    fn increment(&self, a: f64, b: f64) -> Option<f64> {
        let (d1a, d2a) = self.deltas(a);
        let (d1b, d2b) = self.deltas(b);
        let (base1, base2) = (self.arg1_0 + d1a, self.arg2_0 + d2a);
        if !(base1 > 0.0 && base2 > 0.0 && self.arg1_0 + d1b > 0.0 && self.arg2_0 + d2b > 0.0) {
            return None;
        }
        let l1 = ((d1b - d1a) / base1).ln_1p();
        let l2 = ((d2b - d2a) / base2).ln_1p();
        let v = -0.5 * (b - a) - (l1 + self.q.signum() * l2) / (2.0 * self.four_a);
        v.is_finite().then_some(v)
    }
}

/// Closed-form phase `Ω̄ Σ_k [F(τ̄_{k+1}) − F(τ̄_k)]` over quasi-cycle
/// boundaries. Falls back to quadrature (flagged in the result) for the
/// unitary branch, `|Q| < Q_MIN`, or any log-domain violation.
pub fn phase_closed_form(params: &AtomBathParams, periods: u32) -> Result<PhaseResult> {
    params.validate()?;
    let coeffs = kossakowski(params);
    let (gamma, fallback) = closed_form_with(params.theta, &coeffs, periods)?;
    Ok(PhaseResult {
        gamma,
        method: Method::ClosedForm,
        horizon: periods as f64 * coeffs.period(),
        params: Some(*params),
        fallback,
    })
}

/// Closed-form route for arbitrary coefficients; the flag reports a
/// quadrature fallback.
pub fn closed_form_with(
    theta: f64,
    coeffs: &KossakowskiCoeffs,
    periods: u32,
) -> Result<(f64, bool)> {
    let period = coeffs.period();
    let closed = ClosedForm::new(theta, coeffs).and_then(|cf| {
        if cf.four_a * period * periods as f64 > FACTORED_EXPONENT_LIMIT {
            return None;
        }
        (0..periods).try_fold(0.0, |acc, k| {
            let a = k as f64 * period;
            cf.increment(a, a + period).map(|d| acc + d)
        })
    });
    match closed {
        Some(sum) => Ok((coeffs.omega * sum, false)),
        None => Ok((quadrature_with(theta, coeffs, periods)?, true)),
    }
}

/// First-order expansion for a single quasi-cycle,
/// `−π(1−cos θ) − π² (γ₀/2ω₀) sin²θ (1+ā²) (2 + cos θ + P cos θ)` with the
/// Planck factor `P = 2/(e^{2π/ā} − 1)` (zero for the inertial atom).
///
/// The Lamb shift enters only at second order and is ignored here.
pub fn phase_first_order(params: &AtomBathParams) -> Result<PhaseResult> {
    params.validate()?;
    let (s, c) = params.sin_cos_theta();
    let abar2 = params.abar * params.abar;
    let correction = PI
        * PI
        * 0.5
        * params.gamma_ratio
        * s
        * s
        * (1.0 + abar2)
        * (2.0 + c + planck_factor(params.abar) * c);
    Ok(PhaseResult {
        gamma: -PI * (1.0 - c) - correction,
        method: Method::FirstOrder,
        horizon: 2.0 * PI,
        params: Some(*params),
        fallback: false,
    })
}

/// Whether `gamma_ratio` is small enough for [`phase_first_order`].
pub fn first_order_reliable(params: &AtomBathParams) -> bool {
    params.gamma_ratio <= FIRST_ORDER_GAMMA_LIMIT
}

/// Accelerated-minus-inertial phase after one quasi-cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDifference {
    /// `−π²(γ₀/2ω₀)[ā²(2+cos θ) + (1+ā²) P cos θ] sin²θ`.
    pub first_order: f64,
    /// `phase_quadrature(ā) − phase_quadrature(0)`.
    pub exact: f64,
}

pub fn phase_difference(params: &AtomBathParams) -> Result<PhaseDifference> {
    params.validate()?;
    let (s, c) = params.sin_cos_theta();
    let abar2 = params.abar * params.abar;
    let first_order = -PI
        * PI
        * 0.5
        * params.gamma_ratio
        * (abar2 * (2.0 + c) + (1.0 + abar2) * planck_factor(params.abar) * c)
        * s
        * s
        + 0.0; // turns −0 at the poles into +0
    let inertial = AtomBathParams {
        abar: 0.0,
        ..*params
    };
    let exact = phase_quadrature(params, 1)?.gamma - phase_quadrature(&inertial, 1)?.gamma;
    Ok(PhaseDifference { first_order, exact })
}

/// Eigenvector of the larger eigenvalue, gauge-fixed so its `|+⟩` amplitude
/// is real and non-negative. Returns `(vector, eigenvalue gap)`.
fn top_eigenvector(state: &DensityMatrix) -> ([Complex64; 2], f64) {
    let a = state.rho_ee;
    let d = state.rho_gg();
    let b = state.coh;
    let half_diff = 0.5 * (a - d);
    let radius = half_diff.hypot(b.norm());
    let lambda = 0.5 * (a + d) + radius;
    // Solve (ρ − λ)v = 0 from whichever row is better conditioned.
    let (v1, v2) = if a >= d {
        (Complex64::new(lambda - d, 0.0), b.conj())
    } else {
        (b, Complex64::new(lambda - a, 0.0))
    };
    let norm = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
    let (mut v1, mut v2) = (v1 / norm, v2 / norm);
    let m1 = v1.norm();
    let gauge = if m1 > 1e-300 {
        v1.conj() / m1
    } else {
        // Pinned to |−⟩: only the overall phase is left, fix it to 1.
        let m2 = v2.norm();
        v2.conj() / m2
    };
    v1 *= gauge;
    v2 *= gauge;
    ([v1, v2], 2.0 * radius)
}

fn inner(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// Kinematic mixed-state phase of a sampled trajectory,
/// `arg⟨φ₊(0)|φ₊(T)⟩ − Σ_k arg⟨φ₊(τ_k)|φ₊(τ_{k+1})⟩`.
///
/// Only the `λ₊` branch contributes because the initial state is pure.
/// Each sample is diagonalised directly; converges to the exact phase at
/// second order in the step.
pub fn phase_kinematic(traj: &Trajectory) -> Result<PhaseResult> {
    let first = traj.samples.first().ok_or(Error::InvalidParams {
        field: "trajectory",
        reason: "no samples".into(),
    })?;
    let (start, gap0) = top_eigenvector(&first.state);
    if (1.0 - gap0) / 2.0 > 1e-9 {
        return Err(Error::InvalidParams {
            field: "trajectory",
            reason: format!(
                "initial state is not pure (lambda_minus = {:e})",
                (1.0 - gap0) / 2.0
            ),
        });
    }
    let mut prev = start;
    let mut connection = 0.0;
    for (k, pair) in traj.samples.windows(2).enumerate() {
        let (next, gap) = top_eigenvector(&pair[1].state);
        if gap < DEGENERACY_GAP {
            return Err(Error::Degenerate {
                tau_bar: pair[1].tau_bar,
                gap,
            });
        }
        let overlap = inner(&prev, &next);
        if overlap.norm() < MIN_NEIGHBOUR_OVERLAP {
            return Err(Error::Undersampled {
                index: k,
                next: k + 1,
                overlap: overlap.norm(),
            });
        }
        connection += overlap.arg();
        prev = next;
    }
    let closure = inner(&start, &prev).arg();
    let horizon = traj.last().map_or(0.0, |s| s.tau_bar) - first.tau_bar;
    Ok(PhaseResult {
        gamma: closure - connection,
        method: Method::Kinematic,
        horizon,
        params: None,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_lindblad, Trajectory};
    use approx::assert_abs_diff_eq;

    fn params(g: f64, abar: f64, theta: f64) -> AtomBathParams {
        AtomBathParams::new(g, abar, theta).unwrap()
    }

    // 50-digit references for θ = π/2, ā = 4, γ₀/ω₀ = 1e-6.
    const GAMMA_Q_PI2_A4: f64 = -3.141_760_436_864_226;
    const GAMMA_Q_PI2_A0: f64 = -3.141_602_523_194_194_2;
    const GAMMA_Q_PI2_A4_TWO_PERIODS: f64 = -6.283_856_440_272_687;

    #[test]
    fn eigenframe_at_start_is_initial_state() {
        let p = params(1e-6, 4.0, PI / 3.0);
        let f = eigenframe(0.0, p.theta, &kossakowski(&p)).unwrap();
        assert_abs_diff_eq!(f.lambda_plus, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.lambda_minus, 0.0, epsilon = 1e-15);
        // |φ₊⟩ = sin(θ_τ/2)|+⟩ + cos(θ_τ/2)|−⟩ must equal cos(θ/2)|+⟩ + sin(θ/2)|−⟩.
        assert_abs_diff_eq!(f.theta_tau, PI - PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!((f.theta_tau / 2.0).sin(), (PI / 6.0).cos(), epsilon = 1e-15);
    }

    #[test]
    fn eigenframe_reference_point() {
        let p = params(1e-6, 4.0, PI / 2.0);
        let f = eigenframe(PI, p.theta, &kossakowski(&p)).unwrap();
        assert_abs_diff_eq!(f.lambda_plus, 0.999_979_641_434_346_4, epsilon = 1e-15);
        assert_abs_diff_eq!(f.theta_tau, 1.570_742_919_719_821_6, epsilon = 1e-13);
        assert_abs_diff_eq!(
            (f.theta_tau / 2.0).cos().powi(2),
            0.500_026_703_537_524_8,
            epsilon = 1e-13
        );
    }

    #[test]
    fn eigenframe_poles_and_degeneracy() {
        let k = kossakowski(&params(1e-6, 4.0, 0.0));
        let f = eigenframe(1.0, 0.0, &k).unwrap();
        assert_eq!(f.theta_tau, PI);
        assert_eq!(phase_integrand(1.0, 0.0, &k).unwrap(), 0.0);
        let f = eigenframe(1.0, PI, &k).unwrap();
        assert_eq!(f.theta_tau, 0.0);
        assert_eq!(phase_integrand(1.0, PI, &k).unwrap(), 1.0);

        // θ = 0 in the inertial limit: ρ₃ crosses zero at e^{−4Aτ} = 1/2.
        let k = kossakowski(&params(1e-2, 0.0, 0.0));
        let t = 2f64.ln() / (4.0 * k.a);
        assert!(matches!(
            eigenframe(t, 0.0, &k),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            phase_integrand(t, 0.0, &k),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn integrand_unitary_is_constant() {
        let k = KossakowskiCoeffs::unitary(1.0);
        for &theta in &[0.3, 1.2, 2.7] {
            for &t in &[0.0, 1.0, 100.0] {
                // θ_τ = π − θ throughout, so cos²(θ_τ/2) = sin²(θ/2).
                let v = phase_integrand(t, theta, &k).unwrap();
                assert_abs_diff_eq!(v, (theta / 2.0).sin().powi(2), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn integrand_large_exponent_switches_form() {
        let k = kossakowski(&params(0.1, 1.0, 1.0));
        let t = 600.0 / (4.0 * k.a);
        let f = eigenframe(t, 1.0, &k).unwrap();
        let v = phase_integrand(t, 1.0, &k).unwrap();
        assert_abs_diff_eq!(v, (f.theta_tau / 2.0).cos().powi(2), epsilon = 1e-12);
        let below = phase_integrand(499.0 / (4.0 * k.a), 1.0, &k).unwrap();
        assert!(below.is_finite());
    }

    #[test]
    fn quadrature_examples() {
        let r = phase_quadrature(&params(0.0, 1.0, 2.0 * PI / 3.0), 1).unwrap();
        assert_abs_diff_eq!(r.gamma, -1.5 * PI, epsilon = 1e-12);
        assert_eq!(r.method, Method::Quadrature);
        assert_abs_diff_eq!(r.horizon, 2.0 * PI);

        let r = phase_quadrature(&params(1e-6, 4.0, PI / 2.0), 1).unwrap();
        assert_abs_diff_eq!(r.gamma, GAMMA_Q_PI2_A4, epsilon = 1e-12);
        let r = phase_quadrature(&params(1e-6, 0.0, PI / 2.0), 1).unwrap();
        assert_abs_diff_eq!(r.gamma, GAMMA_Q_PI2_A0, epsilon = 1e-12);
        let r = phase_quadrature(&params(1e-6, 4.0, PI / 2.0), 2).unwrap();
        assert_abs_diff_eq!(r.gamma, GAMMA_Q_PI2_A4_TWO_PERIODS, epsilon = 2e-12);

        let r = phase_quadrature(&params(1e-6, 4.0, 0.0), 1).unwrap();
        assert!(r.gamma.abs() < 1e-8);
    }

    #[test]
    fn quadrature_respects_omega_shift() {
        let p = params(0.0, 0.0, PI / 2.0).with_omega_shift(0.25).unwrap();
        let r = phase_quadrature(&p, 1).unwrap();
        assert_abs_diff_eq!(r.gamma, -PI, epsilon = 1e-12);
        assert_abs_diff_eq!(r.horizon, 2.0 * PI / 1.25, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let p = params(1e-6, 4.0, PI / 2.0);
        let cf = phase_closed_form(&p, 1).unwrap();
        assert!(!cf.fallback);
        assert_abs_diff_eq!(cf.gamma, GAMMA_Q_PI2_A4, epsilon = 1e-10);
        let q = phase_quadrature(&p, 1).unwrap();
        assert_abs_diff_eq!(cf.gamma, q.gamma, epsilon = 1e-9);

        let cf = phase_closed_form(&p, 2).unwrap();
        assert_abs_diff_eq!(cf.gamma, GAMMA_Q_PI2_A4_TWO_PERIODS, epsilon = 1e-10);

        assert_eq!(phase_closed_form(&p, 0).unwrap().gamma, 0.0);

        let p = params(1e-6, 0.0, PI / 2.0);
        let cf = phase_closed_form(&p, 1).unwrap();
        assert!(!cf.fallback);
        assert_abs_diff_eq!(cf.gamma, GAMMA_Q_PI2_A0, epsilon = 1e-9);
    }

    #[test]
    fn closed_form_fallbacks() {
        // Unitary branch.
        let r = phase_closed_form(&params(0.0, 1.0, 1.0), 1).unwrap();
        assert!(r.fallback);
        assert_abs_diff_eq!(r.gamma, -PI * (1.0 - 1f64.cos()), epsilon = 1e-12);
        // θ = 0 puts the first logarithm at zero.
        let r = phase_closed_form(&params(1e-6, 4.0, 0.0), 1).unwrap();
        assert!(r.fallback);
        // Q = R + cos θ = 0.
        let k = kossakowski(&params(1e-6, 4.0, 0.0));
        let theta = (-k.r).acos();
        let r = phase_closed_form(&params(1e-6, 4.0, theta), 1).unwrap();
        assert!(r.fallback);
        let q = phase_quadrature(&params(1e-6, 4.0, theta), 1).unwrap();
        assert_eq!(r.gamma, q.gamma);
    }

    #[test]
    fn first_order_examples() {
        for &abar in &[0.0, 1.0, 4.0] {
            assert_eq!(
                phase_first_order(&params(1e-6, abar, 0.0)).unwrap().gamma,
                0.0
            );
            assert_eq!(
                phase_first_order(&params(1e-6, abar, PI)).unwrap().gamma,
                -2.0 * PI
            );
        }
        let r = phase_first_order(&params(1e-6, 0.0, PI / 2.0)).unwrap();
        assert_abs_diff_eq!(r.gamma, -PI - PI * PI * 1e-6, epsilon = 1e-15);
        assert_abs_diff_eq!(r.gamma, -3.141_602_523_194_194_3, epsilon = 1e-15);
        let q = phase_quadrature(&params(1e-6, 0.0, PI / 2.0), 1).unwrap();
        assert_abs_diff_eq!(r.gamma, q.gamma, epsilon = 1e-9);

        let p = params(1e-6, 4.0, PI / 2.0);
        let q = phase_quadrature(&p, 1).unwrap();
        assert_abs_diff_eq!(
            phase_first_order(&p).unwrap().gamma,
            q.gamma,
            epsilon = 1e-9
        );
        assert!(!first_order_reliable(&params(0.1, 1.0, 1.0)));
    }

    #[test]
    fn difference_examples() {
        let d = phase_difference(&params(1e-6, 4.0, PI / 2.0)).unwrap();
        assert_abs_diff_eq!(d.first_order, -16.0 * PI * PI * 1e-6, epsilon = 1e-18);
        assert_abs_diff_eq!(d.first_order, -1.579_136_704_174_297_4e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(d.exact, d.first_order, epsilon = 1e-11);
        for &theta in &[0.0, PI] {
            let d = phase_difference(&params(1e-6, 4.0, theta)).unwrap();
            assert_eq!(d.first_order, 0.0);
            assert_eq!(d.exact, 0.0);
        }
        let mags: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&a| {
                phase_difference(&params(1e-6, a, PI / 2.0))
                    .unwrap()
                    .first_order
                    .abs()
            })
            .collect();
        assert!(mags.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn kinematic_unitary_equator() {
        let k = KossakowskiCoeffs::unitary(1.0);
        let traj = Trajectory::closed_form(PI / 2.0, &k, 2.0 * PI, 10_000).unwrap();
        let r = phase_kinematic(&traj).unwrap();
        assert_abs_diff_eq!(r.gamma, -PI, epsilon = 1e-6);
        assert_eq!(r.method, Method::Kinematic);
    }

    #[test]
    fn kinematic_rk4_matches_quadrature() {
        let p = params(1e-6, 4.0, PI / 2.0);
        let k = kossakowski(&p);
        let traj = integrate_lindblad(p.theta, &k, 2.0 * PI, 100_000).unwrap();
        let r = phase_kinematic(&traj).unwrap();
        let q = phase_quadrature(&p, 1).unwrap();
        assert_abs_diff_eq!(r.gamma, q.gamma, epsilon = 1e-6);
    }

    #[test]
    fn kinematic_second_order_convergence() {
        let p = params(1e-3, 2.0, 0.8);
        let k = kossakowski(&p);
        let q = phase_quadrature(&p, 1).unwrap().gamma;
        let err = |n| {
            let traj = Trajectory::closed_form(p.theta, &k, 2.0 * PI, n).unwrap();
            (phase_kinematic(&traj).unwrap().gamma - q).abs()
        };
        let ratio = err(2_000) / err(4_000);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn kinematic_errors() {
        let k = KossakowskiCoeffs::unitary(1.0);
        let coarse = Trajectory::closed_form(PI / 2.0, &k, 2.0 * PI, 2).unwrap();
        assert!(matches!(
            phase_kinematic(&coarse),
            Err(Error::Undersampled { .. })
        ));

        let k = kossakowski(&params(1e-2, 0.0, 0.0));
        let t = 2f64.ln() / (4.0 * k.a);
        // Land a sample exactly on the maximally mixed point.
        let traj = Trajectory::closed_form(0.0, &k, t, 1_000).unwrap();
        assert!(matches!(
            phase_kinematic(&traj),
            Err(Error::Degenerate { .. })
        ));
    }
}
