//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below the requested absolute tolerance.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    // Floor at the rounding level of the segment so bisection terminates.
    let floor = 50.0 * f64::EPSILON * value.abs();
    Segment {
        a,
        b,
        value,
        error: error.max(floor),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// `max_intervals` bounds the number of live subintervals; exceeding it
/// without meeting `tol` yields [`Error::Quadrature`] carrying the achieved
/// estimate.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breaks(f, &[a, b], tol, max_intervals)
}

/// Like [`integrate`], with the domain pre-split at the sorted `points`
/// (which must include both endpoints).
pub fn integrate_with_breaks<F>(
    f: F,
    points: &[f64],
    tol: f64,
    max_intervals: usize,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if points.len() < 2 {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let mut heap: BinaryHeap<Segment> = points
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();

    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= tol {
            return Ok(Integral {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= max_intervals {
            return Err(Error::Quadrature {
                estimate: error,
                tolerance: tol,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in f64.
            return Err(Error::Quadrature {
                estimate: error,
                tolerance: tol,
            });
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(7) - 3.0 * x * x + 1.0, -1.0, 2.0, 1e-11, 10).unwrap();
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0) + 3.0;
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-12);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let r = integrate(|x| (10.0 * x).sin().powi(2), 0.0, PI, 1e-12, 1000).unwrap();
        assert_abs_diff_eq!(r.value, PI / 2.0, epsilon = 1e-12);

        // Lorentzian of width 1e-4 centred inside the interval.
        let w = 1e-4;
        let r = integrate(|x| w / (x * x + w * w), -1.0, 1.0, 1e-10, 5000).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 * (1.0 / w).atan(), epsilon = 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let err = integrate(|x| 1.0 / x.abs().sqrt(), -1.0, 1.0, 1e-14, 8).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
