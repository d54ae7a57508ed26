//! Vacuum electromagnetic bath seen along a uniformly accelerated worldline.
//!
//! Everything is expressed in natural units of the bare transition frequency
//! ω₀: proper time as `tau_bar = ω₀ τ`, rates in units of ω₀, the acceleration
//! as `abar = a / (c ω₀)`, and the spectral density in units of the inertial
//! spontaneous emission rate γ₀.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// Speed of light in m/s, used only for SI conversions.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Dimensionless physical inputs of the atom + bath problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomBathParams {
    /// γ₀ / ω₀. Zero selects the isolated (unitary) branch.
    pub gamma_ratio: f64,
    /// a / (c ω₀).
    pub abar: f64,
    /// Initial Bloch polar angle in `[0, π]`.
    pub theta: f64,
    /// Optional level shift δΩ / ω₀; the effective spacing is `1 + omega_shift`.
    pub omega_shift: f64,
}

impl AtomBathParams {
    pub fn new(gamma_ratio: f64, abar: f64, theta: f64) -> Result<Self> {
        let p = Self {
            gamma_ratio,
            abar,
            theta,
            omega_shift: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_omega_shift(mut self, shift: f64) -> Result<Self> {
        self.omega_shift = shift;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_ratio.is_finite() && self.gamma_ratio >= 0.0) {
            return Err(Error::InvalidParams {
                field: "gamma_ratio",
                reason: format!("must be finite and >= 0, got {}", self.gamma_ratio),
            });
        }
        if !(self.abar.is_finite() && self.abar >= 0.0) {
            return Err(Error::InvalidParams {
                field: "abar",
                reason: format!("must be finite and >= 0, got {}", self.abar),
            });
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParams {
                field: "theta",
                reason: format!("must lie in [0, pi], got {}", self.theta),
            });
        }
        if !(self.omega_shift.is_finite() && self.omega_shift > -1.0) {
            return Err(Error::InvalidParams {
                field: "omega_shift",
                reason: format!("must be finite and > -1, got {}", self.omega_shift),
            });
        }
        Ok(())
    }

    /// `(sin θ, cos θ)` with the interval endpoints snapped to exact values,
    /// so that θ = π gives a true ground state rather than `sin(π) ≈ 1.2e-16`.
    pub fn sin_cos_theta(&self) -> (f64, f64) {
        sin_cos_polar(self.theta)
    }
}

pub(crate) fn sin_cos_polar(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        (0.0, 1.0)
    } else if theta == PI {
        (0.0, -1.0)
    } else {
        theta.sin_cos()
    }
}

/// Rates of the Kossakowski matrix `a_ij = A δ_ij − i B ε_ij3 + C δ_i3 δ_j3`
/// and the effective level spacing, all in units of ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KossakowskiCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// B / A; equals `tanh(π / abar)` (1 in the inertial limit).
    pub r: f64,
    pub omega: f64,
    /// Set when γ₀ = 0: all rates vanish and the evolution is unitary.
    pub unitary: bool,
}

impl KossakowskiCoeffs {
    /// Coefficients of an isolated atom with level spacing `omega`.
    pub fn unitary(omega: f64) -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            r: 1.0,
            omega,
            unitary: true,
        }
    }

    /// Returns a copy with `delta` added to `A` (and `C = -A` kept).
    ///
    /// Used for fault injection in the oracle suite.
    pub fn perturbed(mut self, delta: f64) -> Self {
        self.a += delta;
        self.c = -self.a;
        if self.a > 0.0 {
            self.r = self.b / self.a;
            self.unitary = false;
        }
        self
    }

    /// Quasi-cycle length `2π / Ω̄`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// `coth(x)` for `x > 0`, written as `1 + 2 / expm1(2x)` so large arguments
/// saturate at 1 and small ones keep full precision.
pub fn coth_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    1.0 + 2.0 / (2.0 * x).exp_m1()
}

/// `1 + coth(x)` without cancellation for either sign of `x`.
fn one_plus_coth(x: f64) -> f64 {
    if x > 0.0 {
        2.0 + 2.0 / (2.0 * x).exp_m1()
    } else {
        // 1 + coth(x) = 2 e^{2x} / (e^{2x} - 1), both factors negative-safe.
        let em = (2.0 * x).exp_m1();
        2.0 * (2.0 * x).exp() / em
    }
}

/// Planck factor `2 / (exp(2π / abar) − 1)`; zero in the inertial limit.
pub fn planck_factor(abar: f64) -> f64 {
    if abar == 0.0 {
        0.0
    } else {
        2.0 / (2.0 * PI / abar).exp_m1()
    }
}

/// Fourier transform of the field correlation function along the
/// accelerated worldline, in units of γ₀:
/// `Ĝ(λ̄) = ½ λ̄³ (1 + ā²/λ̄²) (1 + coth(π λ̄ / ā))`.
pub fn spectral_density(lambda_bar: f64, abar: f64) -> Result<f64> {
    if !(abar > 0.0 && abar.is_finite()) {
        return Err(Error::Domain {
            what: "abar",
            value: abar,
        });
    }
    if lambda_bar == 0.0 || !lambda_bar.is_finite() {
        return Err(Error::Domain {
            what: "lambda_bar",
            value: lambda_bar,
        });
    }
    let x = PI * lambda_bar / abar;
    Ok(0.5 * lambda_bar * (lambda_bar * lambda_bar + abar * abar) * one_plus_coth(x))
}

/// The `abar → 0⁺` limit of [`spectral_density`]: `λ̄³` for positive
/// frequencies, zero otherwise.
pub fn inertial_limit(lambda_bar: f64) -> f64 {
    if lambda_bar > 0.0 {
        lambda_bar.powi(3)
    } else {
        0.0
    }
}

/// Kossakowski coefficients from the closed forms
/// `A = (γ₀/4)(1+ā²)coth(π/ā)`, `B = (γ₀/4)(1+ā²)`, `C = −A`.
pub fn kossakowski(params: &AtomBathParams) -> KossakowskiCoeffs {
    let omega = 1.0 + params.omega_shift;
    let abar = params.abar;
    let coth = if abar == 0.0 {
        1.0
    } else {
        coth_pos(PI / abar)
    };
    if params.gamma_ratio == 0.0 {
        return KossakowskiCoeffs {
            r: 1.0 / coth,
            ..KossakowskiCoeffs::unitary(omega)
        };
    }
    let b = 0.25 * params.gamma_ratio * (1.0 + abar * abar);
    let a = b * coth;
    KossakowskiCoeffs {
        a,
        b,
        c: -a,
        r: b / a,
        omega,
        unitary: false,
    }
}

/// Kossakowski coefficients assembled from the spectral density at `±ω₀`:
/// `A = ¼[G(ω₀) + G(−ω₀)]`, `B = ¼[G(ω₀) − G(−ω₀)]`.
pub fn kossakowski_from_spectrum(params: &AtomBathParams) -> KossakowskiCoeffs {
    let omega = 1.0 + params.omega_shift;
    let (up, down) = if params.abar == 0.0 {
        (inertial_limit(1.0), inertial_limit(-1.0))
    } else {
        (
            spectral_density(1.0, params.abar).expect("abar > 0"),
            spectral_density(-1.0, params.abar).expect("abar > 0"),
        )
    };
    if params.gamma_ratio == 0.0 {
        return KossakowskiCoeffs {
            r: (up - down) / (up + down),
            ..KossakowskiCoeffs::unitary(omega)
        };
    }
    let a = 0.25 * params.gamma_ratio * (up + down);
    let b = 0.25 * params.gamma_ratio * (up - down);
    KossakowskiCoeffs {
        a,
        b,
        c: -a,
        r: b / a,
        omega,
        unitary: false,
    }
}

/// Detailed-balance ratio `Ĝ(−λ̄) / Ĝ(λ̄)`; equals `exp(−2πλ̄/ā)`.
pub fn unruh_kms_ratio(lambda_bar: f64, abar: f64) -> Result<f64> {
    if !(lambda_bar > 0.0) {
        return Err(Error::Domain {
            what: "lambda_bar",
            value: lambda_bar,
        });
    }
    Ok(spectral_density(-lambda_bar, abar)? / spectral_density(lambda_bar, abar)?)
}

/// A point on the worldline. Coordinates are in units of `c²/a`
/// (time coordinate given as `c t`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub ct: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Hyperbolic worldline `ct = sinh(ā τ̄)`, `x = cosh(ā τ̄)` in units of `c²/a`.
pub fn rindler_trajectory(tau_bar: f64, abar: f64) -> Result<SpacetimePoint> {
    if !(abar > 0.0 && abar.is_finite()) {
        return Err(Error::Domain {
            what: "abar",
            value: abar,
        });
    }
    let rapidity = abar * tau_bar;
    Ok(SpacetimePoint {
        ct: rapidity.sinh(),
        x: rapidity.cosh(),
        y: 0.0,
        z: 0.0,
    })
}

/// Laboratory coordinate time elapsed during proper time `tau_bar`, in
/// units of `1/ω₀`. Reduces to `tau_bar` for an inertial atom.
pub fn lab_time(tau_bar: f64, abar: f64) -> f64 {
    if abar == 0.0 {
        tau_bar
    } else {
        (abar * tau_bar).sinh() / abar
    }
}

/// Normalisation that makes the transform of [`correlation_function`]
/// reproduce [`spectral_density`] exactly.
const CORRELATION_NORM: f64 = 3.0 / (16.0 * PI);

/// Regulated Wightman function along the worldline,
/// `(3/16π) ā⁴ / sinh⁴[(ā/2)(Δτ̄ − iε)]`, in units of γ₀.
pub fn correlation_function(dtau_bar: f64, abar: f64, eps: f64) -> Result<Complex64> {
    if !(abar > 0.0) {
        return Err(Error::Domain {
            what: "abar",
            value: abar,
        });
    }
    if !(eps > 0.0) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
        });
    }
    let u = Complex64::new(dtau_bar, -eps) * (0.5 * abar);
    // sinh⁴ is even in u.
    let w = if u.re < 0.0 { -u } else { u };
    let inv_sinh4 = if w.re > 1.0 {
        let e = (-w).exp();
        let denom = Complex64::new(1.0, 0.0) - e * e;
        let inv = e * 2.0 / denom;
        (inv * inv) * (inv * inv)
    } else {
        let s = w.sinh();
        let s2 = s * s;
        (s2 * s2).inv()
    };
    Ok(inv_sinh4 * (CORRELATION_NORM * abar.powi(4)))
}

/// Windowed numerical Fourier transform `∫_{−W}^{W} e^{iλ̄Δτ̄} G⁺(Δτ̄) dΔτ̄`.
///
/// Uses `G⁺(−Δτ̄) = G⁺(Δτ̄)*`, so the transform is real and only the half
/// line is integrated. The regulator multiplies the exact transform by
/// `exp(−λ̄ ε)`.
pub fn numerical_spectral_density(
    lambda_bar: f64,
    abar: f64,
    eps: f64,
    window: f64,
) -> Result<f64> {
    correlation_function(0.0, abar, eps)?;
    if !(window > 0.0) {
        return Err(Error::Domain {
            what: "window",
            value: window,
        });
    }
    let integrand = |t: f64| {
        let g = correlation_function(t, abar, eps).expect("validated above");
        (Complex64::new(0.0, lambda_bar * t).exp() * g).re
    };
    // Geometric breakpoints resolve the ~1/ε⁴ peak at the origin.
    let mut points = vec![0.0];
    let mut p = eps;
    while p < window {
        points.push(p);
        p *= 4.0;
    }
    points.push(window);
    // Pieces near the origin are O(1/ε³) and cancel, so the attainable
    // absolute accuracy scales with that size.
    let tol = 1e-9_f64.max(1e-13 / (eps * eps * eps));
    let half = quad::integrate_with_breaks(integrand, &points, tol, 50_000)?;
    Ok(2.0 * half.value)
}
