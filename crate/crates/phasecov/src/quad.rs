//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 15-point Kronrod rule with its embedded 7-point Gauss rule estimates the
//! integral and its error on each subinterval. The subinterval with the
//! largest error estimate is bisected until the summed error drops below the
//! requested absolute tolerance. Integrands return `Result`, so guards (for
//! example divergence checks) propagate out of the recursion.

use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Kronrod abscissae for the 7-15 pair, positive half (plus the center).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

/// Gauss weights for the embedded 7-point rule.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod weights for the 15-point rule.
#[allow(clippy::excessive_precision)]
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

/// Maximum bisection depth for any one subinterval.
pub const MAX_DEPTH: u32 = 60;

/// Total-subdivision budget across the whole interval.
const MAX_SPLITS: usize = 50_000;

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// One 15-point Kronrod panel on `[a, b]`; error from the Gauss/Kronrod gap.
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center)?;
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    Ok((value, error))
}

/// Integrates `f` over `[a, b]` to the given absolute tolerance, bisecting at
/// most [`MAX_DEPTH`] times per subinterval before reporting the offending
/// subinterval.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_depth(f, a, b, abs_tol, MAX_DEPTH)
}

/// [`integrate`] with an explicit subdivision depth cap.
pub fn integrate_depth<F>(f: F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }

    let mut evaluations = 15usize;
    let (value, error) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    });
    let mut total_value = value;
    let mut total_error = error;

    let mut splits = 0usize;
    while total_error > abs_tol {
        let worst = heap.pop().expect("heap holds at least one segment");
        splits += 1;
        if worst.depth >= max_depth || splits > MAX_SPLITS {
            return Err(Error::QuadratureNonConvergence {
                a: worst.a,
                b: worst.b,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept what we have.
            return Err(Error::QuadratureNonConvergence {
                a: worst.a,
                b: worst.b,
            });
        }
        let (lv, le) = gk15(&f, worst.a, mid)?;
        let (rv, re) = gk15(&f, mid, worst.b)?;
        evaluations += 30;
        total_value += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
            depth: worst.depth + 1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
            depth: worst.depth + 1,
        });
    }

    Ok(QuadResult {
        value: total_value,
        abs_error: total_error,
        evaluations,
    })
}

/// The 15 Kronrod nodes and weights scaled to `[a, b]`, for fixed composite
/// panels where the integrand is sampled once and reused.
pub fn gk15_nodes(a: f64, b: f64) -> [(f64, f64); 15] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 15];
    out[0] = (center, WGK[7] * half);
    let mut idx = 1;
    for j in 0..7 {
        let dx = half * XGK[j];
        out[idx] = (center - dx, WGK[j] * half);
        out[idx + 1] = (center + dx, WGK[j] * half);
        idx += 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Result<f64> {
        move |x| Ok(f(x))
    }

    #[test]
    fn fixed_nodes_integrate_polynomials() {
        // A single K15 panel is exact for polynomials of degree <= 22.
        let nodes = gk15_nodes(-1.0, 3.0);
        let value: f64 = nodes.iter().map(|&(x, w)| w * x.powi(7)).sum();
        let exact = (3f64.powi(8) - (-1f64).powi(8)) / 8.0;
        assert!((value - exact).abs() < 1e-10);
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(ok(|x| x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(ok(f64::exp), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^10 sin(50x) dx = (1 - cos 500)/50
        let r = integrate(ok(|x| (50.0 * x).sin()), 0.0, 10.0, 1e-11).unwrap();
        let exact = (1.0 - (500f64).cos()) / 50.0;
        assert!((r.value - exact).abs() < 1e-10);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2; nodes never touch the endpoint.
        let r = integrate(ok(|x| 1.0 / x.sqrt()), 0.0, 1.0, 1e-8).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn growing_exponential_under_map_integral_conditions() {
        // The kind of integrand the map integral G(t) produces.
        let r = integrate(ok(|x: f64| x.exp() * 0.5), 0.0, 8.0, 1e-10).unwrap();
        assert!((r.value - 0.5 * (8f64.exp() - 1.0)).abs() < 1e-8);
    }

    #[test]
    fn non_integrable_pole_reports_subinterval() {
        let err = integrate(ok(|x| 1.0 / x), 0.0, 1.0, 1e-10).unwrap_err();
        match err {
            Error::QuadratureNonConvergence { a, b } => {
                assert!(a >= 0.0 && b <= 1.0);
                assert!(b < 1e-3, "offender should hug the pole, got [{a}, {b}]");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn integrand_errors_propagate() {
        let err = integrate(
            |x| {
                if x > 0.5 {
                    Err(Error::DivergentIntegrand { t: x })
                } else {
                    Ok(x)
                }
            },
            0.0,
            1.0,
            1e-10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DivergentIntegrand { .. }));
    }

    #[test]
    fn zero_length_interval() {
        let r = integrate(ok(|_| 1.0), 2.0, 2.0, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
