//! The phase-covariant map: noise-model catalog, accumulated map integrals,
//! exact state evolution and the instantaneous generator.
//!
//! The master equation is
//!
//! ```text
//! dρ/dt = -i ω/2 [σ_z, ρ] + γ₁/2 L₁(ρ) + γ₂/2 L₂(ρ) + γ₃/2 L₃(ρ)
//! ```
//!
//! with `L₁(ρ) = σ₊ρσ₋ - ½{σ₋σ₊, ρ}`, `L₂(ρ) = σ₋ρσ₊ - ½{σ₊σ₋, ρ}` and
//! `L₃(ρ) = σ_z ρ σ_z - ρ`. Its solution acts on the state through four
//! accumulated integrals,
//!
//! ```text
//! Γ(t)  = ∫₀ᵗ (γ₁+γ₂)/2,   G(t) = ∫₀ᵗ e^Γ γ₂/2,
//! Ω(t)  = ∫₀ᵗ 2ω,           Γ̃(t) = ∫₀ᵗ γ₃,
//! p₁(t) = e^{-Γ}[G + p₁(0)],  α(t) = α(0) e^{iΩ - Γ/2 - Γ̃}.
//! ```
//!
//! Every cataloged model has a scalar decoherence function whose logarithm
//! yields these integrals in closed form, which keeps the evolution finite
//! straight through the zeros of the decoherence function where the
//! instantaneous rates blow up. Direct rate evaluation is only needed for the
//! generator and is guarded near those poles.

use num_complex::Complex64;

use crate::quad;
use crate::state::{HermitianMatrix2, QubitState};
use crate::{Error, Result};

/// Absolute tolerance for the map integrals when computed by quadrature.
pub const MAP_INTEGRAL_TOL: f64 = 1e-10;
/// Absolute tolerance for the spectral (dephasing) integrals.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Spectral integrals are cut off at this multiple of the cutoff frequency;
/// the integrand is below 1e-16 of its peak there for Ohmic powers s ≤ 6.
pub const SPECTRAL_CUTOFF_FACTOR: f64 = 40.0;

/// One noise model of the phase-covariant family.
///
/// Rate roles: `Nmad` supplies the emission rate γ₂; `Rtn`, `Oun` and `Moun`
/// supply the dephasing rate γ₃; `Gad` supplies constant γ₁ and γ₂;
/// `Phenomenological` and `Eternal` supply all three.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    /// Non-Markovian amplitude damping: coupling `kappa`, spectral width `l`.
    /// Non-Markovian for `l < 2κ`.
    Nmad { kappa: f64, l: f64 },
    /// Random telegraph noise dephasing: coupling `alpha`, bandwidth `eta`.
    /// Non-Markovian for `(2α/η)² > 1`.
    Rtn { alpha: f64, eta: f64 },
    /// Ornstein–Uhlenbeck dephasing: inverse relaxation time `p`, noise
    /// bandwidth `m`. CP divisible but carries memory.
    Oun { p: f64, m: f64 },
    /// Markovian limit of Ornstein–Uhlenbeck dephasing: constant γ₃ = p/2.
    Moun { p: f64 },
    /// Finite-temperature phenomenological model with decay rates derived
    /// from `c(t)` and a spectral-integral dephasing rate.
    Phenomenological {
        /// Dimensionless system–environment coupling, > 0.
        r: f64,
        /// Temperature in energy units (k_B = 1); 0 is allowed.
        temperature: f64,
        /// Bohr frequency entering the thermal occupation.
        nu0: f64,
        /// Ohmic power of the spectral density, ≥ 1.
        s: f64,
        /// Dimensionless spectral-density prefactor.
        upsilon: f64,
        /// Cutoff frequency of the spectral density.
        omega_c: f64,
        /// Initial value c(0).
        c0: f64,
    },
    /// Eternally CP-indivisible family: γ₁ = 2ν(1+b), γ₂ = 2ν(1-b) and a
    /// dephasing rate that stays negative for all t > 0 when |b| < 1.
    Eternal { b: f64, nu: f64 },
    /// Generalized amplitude damping: constant gain γ₁ and loss γ₂.
    Gad { gain: f64, loss: f64 },
}

/// A phase-covariant channel: one or more rate sources plus a constant
/// precession frequency ω (zero by default).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    members: Vec<ChannelKind>,
    omega: f64,
}

/// Instantaneous rates of the master equation at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub omega: f64,
}

/// The four accumulated integrals of the map at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapIntegrals {
    /// Γ(t), the accumulated (γ₁+γ₂)/2.
    pub gamma: f64,
    /// G(t), the accumulated e^Γ γ₂/2.
    pub g: f64,
    /// Ω(t), the accumulated 2ω.
    pub omega: f64,
    /// Γ̃(t), the accumulated γ₃ (real part through decoherence-function
    /// zeros, where the raw integral acquires an imaginary offset).
    pub gamma_tilde: f64,
}

/// Markovianity label following each model's stated regime condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Regime {
    Markovian,
    NonMarkovianCpDivisible,
    NonMarkovianCpIndivisible,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Markovian => write!(f, "Markovian"),
            Regime::NonMarkovianCpDivisible => write!(f, "non-Markovian-CP-divisible"),
            Regime::NonMarkovianCpIndivisible => write!(f, "non-Markovian-CP-indivisible"),
        }
    }
}

/// Smooth time-local form of the map: `p₁(t) = pump + damp · p₁(0)` and
/// `α(t) = α(0) · coh · e^{iΩ}`, together with time derivatives. These stay
/// finite through rate poles, unlike the raw integrals.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MapFactors {
    pub damp: f64,
    pub pump: f64,
    pub coh: f64,
    pub ddamp: f64,
    pub dpump: f64,
    pub dcoh: f64,
}

const IDENTITY_FACTORS: MapFactors = MapFactors {
    damp: 1.0,
    pump: 0.0,
    coh: 1.0,
    ddamp: 0.0,
    dpump: 0.0,
    dcoh: 0.0,
};

// ---------------------------------------------------------------------------
// Complex-safe hyperbolic helpers
// ---------------------------------------------------------------------------

/// Relative imaginary residue allowed when a complex evaluation is known to
/// be real.
const IM_TOL: f64 = 1e-12;

/// `e^{-d·x} (cosh(√s x) + c · sinh(√s x)/√s)` for real `s` of either sign.
///
/// For s ≥ 0 the exponentials are combined before evaluation so nothing
/// overflows (the catalog always has √s ≤ d). For s < 0 the square root is
/// imaginary and the evaluation runs through complex arithmetic; the result
/// is real and is taken as the real part after checking the residue.
fn damped_mix(s: f64, c: f64, d: f64, x: f64) -> f64 {
    let w = s * x * x;
    if w.abs() < 1e-8 {
        // Series in w: cosh(√s x) = 1 + w/2 + w²/24, sinh(√s x)/√s = x(1 + w/6 + w²/120).
        let cs = 1.0 + w / 2.0 + w * w / 24.0;
        let shc = x * (1.0 + w / 6.0 + w * w / 120.0);
        return (-d * x).exp() * (cs + c * shc);
    }
    if s > 0.0 {
        let z = s.sqrt();
        0.5 * ((1.0 + c / z) * ((z - d) * x).exp() + (1.0 - c / z) * ((-z - d) * x).exp())
    } else {
        let z = Complex64::new(s, 0.0).sqrt();
        let zx = z * x;
        let value = (zx.cosh() + c * zx.sinh() / z) * (-d * x).exp();
        debug_assert!(value.im.abs() <= IM_TOL * (1.0 + value.re.abs()));
        value.re
    }
}

/// `e^{-d·x} sinh(√s x)/√s` under the same conventions as [`damped_mix`].
fn damped_sinhc(s: f64, d: f64, x: f64) -> f64 {
    let w = s * x * x;
    if w.abs() < 1e-8 {
        return (-d * x).exp() * x * (1.0 + w / 6.0 + w * w / 120.0);
    }
    if s > 0.0 {
        let z = s.sqrt();
        (((z - d) * x).exp() - ((-z - d) * x).exp()) / (2.0 * z)
    } else {
        let z = Complex64::new(s, 0.0).sqrt();
        let value = (z * x).sinh() / z * (-d * x).exp();
        debug_assert!(value.im.abs() <= IM_TOL * (1.0 + value.re.abs()));
        value.re
    }
}

/// coth(u) for u > 0, stable for both tiny and huge arguments.
fn coth(u: f64) -> f64 {
    1.0 + 2.0 / (2.0 * u).exp_m1()
}

/// Rejects a rate evaluation when `t` sits within 1e-9 of a zero of the
/// decoherence function (Newton estimate |Λ/Λ'|).
fn pole_guard(value: f64, derivative: f64, t: f64) -> Result<()> {
    if value == 0.0 {
        return Err(Error::SingularRate { t });
    }
    if derivative != 0.0 && (value / derivative).abs() < 1e-9 {
        return Err(Error::SingularRate { t });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Member-level evaluation
// ---------------------------------------------------------------------------

impl ChannelKind {
    /// Which of (γ₁, γ₂, γ₃) this member supplies.
    fn sources(&self) -> (bool, bool, bool) {
        match self {
            ChannelKind::Nmad { .. } => (false, true, false),
            ChannelKind::Rtn { .. } | ChannelKind::Oun { .. } | ChannelKind::Moun { .. } => {
                (false, false, true)
            }
            ChannelKind::Phenomenological { .. } | ChannelKind::Eternal { .. } => {
                (true, true, true)
            }
            ChannelKind::Gad { .. } => (true, true, false),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidChannel(msg));
        match *self {
            ChannelKind::Nmad { kappa, l } => {
                if kappa < 0.0 || l < 0.0 || !kappa.is_finite() || !l.is_finite() {
                    return bad(format!("nmad requires kappa, l >= 0 (got {kappa}, {l})"));
                }
            }
            ChannelKind::Rtn { alpha, eta } => {
                if alpha < 0.0 || eta < 0.0 || !alpha.is_finite() || !eta.is_finite() {
                    return bad(format!("rtn requires alpha, eta >= 0 (got {alpha}, {eta})"));
                }
            }
            ChannelKind::Oun { p, m } => {
                if p < 0.0 || m < 0.0 || !p.is_finite() || !m.is_finite() {
                    return bad(format!("oun requires p, m >= 0 (got {p}, {m})"));
                }
            }
            ChannelKind::Moun { p } => {
                if p < 0.0 || !p.is_finite() {
                    return bad(format!("moun requires p >= 0 (got {p})"));
                }
            }
            ChannelKind::Phenomenological {
                r,
                temperature,
                nu0,
                s,
                upsilon,
                omega_c,
                c0,
            } => {
                if !(r > 0.0) {
                    return bad(format!("phenomenological coupling R must be > 0 (got {r})"));
                }
                if temperature < 0.0 {
                    return bad(format!("temperature must be >= 0 (got {temperature})"));
                }
                if !(nu0 > 0.0) {
                    return bad(format!("Bohr frequency nu0 must be > 0 (got {nu0})"));
                }
                if s < 1.0 {
                    return bad(format!("Ohmic power s must be >= 1 (got {s})"));
                }
                if upsilon < 0.0 {
                    return bad(format!("upsilon must be >= 0 (got {upsilon})"));
                }
                if !(omega_c > 0.0) {
                    return bad(format!("cutoff omega_c must be > 0 (got {omega_c})"));
                }
                if !(c0 > 0.0) {
                    return bad(format!("c(0) must be > 0 (got {c0})"));
                }
            }
            ChannelKind::Eternal { b, nu } => {
                // |b| = 1 is the boundary member with γ₃ ≡ 0 and is accepted.
                if !(b.abs() <= 1.0) || nu < 0.0 || !nu.is_finite() {
                    return bad(format!("eternal requires |b| <= 1 and nu >= 0 (got {b}, {nu})"));
                }
            }
            ChannelKind::Gad { gain, loss } => {
                if gain < 0.0 || loss < 0.0 || !gain.is_finite() || !loss.is_finite() {
                    return bad(format!("gad requires gain, loss >= 0 (got {gain}, {loss})"));
                }
            }
        }
        Ok(())
    }

    /// Thermal occupation for the phenomenological model.
    fn mean_occupation(temperature: f64, nu0: f64) -> f64 {
        if temperature > 0.0 {
            1.0 / (nu0 / temperature).exp_m1()
        } else {
            0.0
        }
    }

    fn rates(&self, t: f64) -> Result<(f64, f64, f64)> {
        match *self {
            ChannelKind::Nmad { kappa, l } => {
                let s = l * l - 2.0 * kappa * l;
                let lam = damped_mix(s, l, l, 0.5 * t);
                let dlam = -kappa * l * damped_sinhc(s, l, 0.5 * t);
                if dlam == 0.0 {
                    return Ok((0.0, 0.0, 0.0));
                }
                pole_guard(lam, dlam, t)?;
                Ok((0.0, -4.0 * dlam / lam, 0.0))
            }
            ChannelKind::Rtn { alpha, eta } => {
                let s = eta * eta - 4.0 * alpha * alpha;
                let lam = damped_mix(s, eta, eta, t);
                let dlam = -4.0 * alpha * alpha * damped_sinhc(s, eta, t);
                if dlam == 0.0 {
                    return Ok((0.0, 0.0, 0.0));
                }
                pole_guard(lam, dlam, t)?;
                Ok((0.0, 0.0, -dlam / lam))
            }
            ChannelKind::Oun { p, m } => Ok((0.0, 0.0, 0.5 * p * (1.0 - (-m * t).exp()))),
            ChannelKind::Moun { p } => Ok((0.0, 0.0, 0.5 * p)),
            ChannelKind::Phenomenological {
                r,
                temperature,
                nu0,
                s,
                upsilon,
                omega_c,
                ..
            } => {
                let sc = 1.0 - 2.0 * r;
                let cfun = damped_mix(sc, 1.0, 1.0, 0.5 * t);
                let dcfun = -r * damped_sinhc(sc, 1.0, 0.5 * t);
                if dcfun != 0.0 {
                    pole_guard(cfun, dcfun, t)?;
                }
                let f = -2.0 * dcfun / cfun;
                let n = Self::mean_occupation(temperature, nu0);
                let g3 = phenomenological_gamma3(t, temperature, s, upsilon, omega_c)?;
                Ok((2.0 * n * f, 2.0 * (n + 1.0) * f, g3))
            }
            ChannelKind::Eternal { b, nu } => {
                let e2 = (-2.0 * nu * t).exp();
                // sinh/X₂ with numerator and denominator both scaled by e^{-2νt}.
                let denom = (1.0 + b * b) * e2 + 0.5 * (1.0 - b * b) * (1.0 + e2 * e2);
                let g3 = -nu * (1.0 - b * b) * 0.5 * (1.0 - e2 * e2) / denom;
                Ok((2.0 * nu * (1.0 + b), 2.0 * nu * (1.0 - b), g3))
            }
            ChannelKind::Gad { gain, loss } => Ok((gain, loss, 0.0)),
        }
    }

    fn factors(&self, t: f64) -> Result<MapFactors> {
        match *self {
            ChannelKind::Nmad { kappa, l } => {
                let s = l * l - 2.0 * kappa * l;
                let lam = damped_mix(s, l, l, 0.5 * t);
                let dlam = -kappa * l * damped_sinhc(s, l, 0.5 * t);
                Ok(MapFactors {
                    damp: lam * lam,
                    pump: 1.0 - lam * lam,
                    coh: lam,
                    ddamp: 2.0 * lam * dlam,
                    dpump: -2.0 * lam * dlam,
                    dcoh: dlam,
                })
            }
            ChannelKind::Rtn { alpha, eta } => {
                let s = eta * eta - 4.0 * alpha * alpha;
                let lam = damped_mix(s, eta, eta, t);
                let dlam = -4.0 * alpha * alpha * damped_sinhc(s, eta, t);
                Ok(MapFactors {
                    coh: lam,
                    dcoh: dlam,
                    ..IDENTITY_FACTORS
                })
            }
            ChannelKind::Oun { p, m } => {
                let (gt, g3) = if m > 0.0 {
                    (
                        0.5 * p * (t + (-m * t).exp_m1() / m),
                        0.5 * p * (1.0 - (-m * t).exp()),
                    )
                } else {
                    (0.0, 0.0)
                };
                let coh = (-gt).exp();
                Ok(MapFactors {
                    coh,
                    dcoh: -g3 * coh,
                    ..IDENTITY_FACTORS
                })
            }
            ChannelKind::Moun { p } => {
                let coh = (-0.5 * p * t).exp();
                Ok(MapFactors {
                    coh,
                    dcoh: -0.5 * p * coh,
                    ..IDENTITY_FACTORS
                })
            }
            ChannelKind::Phenomenological {
                r,
                temperature,
                nu0,
                s,
                upsilon,
                omega_c,
                c0,
            } => {
                let sc = 1.0 - 2.0 * r;
                let cfun = damped_mix(sc, 1.0, 1.0, 0.5 * t);
                let dcfun = -r * damped_sinhc(sc, 1.0, 0.5 * t);
                let n = Self::mean_occupation(temperature, nu0);
                let w = cfun * cfun;
                let dw = 2.0 * cfun * dcfun;
                let exponent = 2.0 * n + 1.0;
                let damp = w.powf(exponent);
                let d_damp = exponent * w.powf(exponent - 1.0) * dw;
                let pump_scale = (n + 1.0) / (2.0 * n + 1.0);
                // Coherence damping from γ₁/γ₂, sign-exact at T = 0 where the
                // model is an amplitude-damping channel with decoherence
                // function c(t)/c(0).
                let (coh12, dcoh12) = if n == 0.0 {
                    (cfun, dcfun)
                } else {
                    let half = 0.5 * exponent;
                    (w.powf(half), half * w.powf(half - 1.0) * dw)
                };
                let gt = phenomenological_gamma_tilde(t, temperature, s, upsilon, omega_c)?;
                let g3 = phenomenological_gamma3(t, temperature, s, upsilon, omega_c)?;
                let deph = (-gt).exp();
                let _ = c0; // c0 cancels from every map factor
                Ok(MapFactors {
                    damp,
                    pump: pump_scale * (1.0 - damp),
                    coh: coh12 * deph,
                    ddamp: d_damp,
                    dpump: -pump_scale * d_damp,
                    dcoh: (dcoh12 - coh12 * g3) * deph,
                })
            }
            ChannelKind::Eternal { b, nu } => {
                let e2 = (-2.0 * nu * t).exp();
                let damp = e2;
                let pump = 0.5 * (1.0 - b) * (1.0 - e2);
                // coh² = e^{-2νt} X₂/2 written in decaying exponentials only.
                let coh =
                    ((1.0 + b * b) * 0.5 * e2 + 0.25 * (1.0 - b * b) * (1.0 + e2 * e2)).sqrt();
                let denom = (1.0 + b * b) * e2 + 0.5 * (1.0 - b * b) * (1.0 + e2 * e2);
                let g3 = -nu * (1.0 - b * b) * 0.5 * (1.0 - e2 * e2) / denom;
                Ok(MapFactors {
                    damp,
                    pump,
                    coh,
                    ddamp: -2.0 * nu * e2,
                    dpump: nu * (1.0 - b) * e2,
                    dcoh: coh * (-nu - g3),
                })
            }
            ChannelKind::Gad { gain, loss } => {
                let total = gain + loss;
                let damp = (-0.5 * total * t).exp();
                let pump = if total > 0.0 {
                    loss / total * (1.0 - damp)
                } else {
                    0.0
                };
                let coh = (-0.25 * total * t).exp();
                Ok(MapFactors {
                    damp,
                    pump,
                    coh,
                    ddamp: -0.5 * total * damp,
                    dpump: 0.5 * loss * damp,
                    dcoh: -0.25 * total * coh,
                })
            }
        }
    }

    /// Scalar decoherence function, when the member defines one.
    fn decoherence(&self, t: f64) -> Result<f64> {
        match *self {
            ChannelKind::Nmad { kappa, l } => {
                Ok(damped_mix(l * l - 2.0 * kappa * l, l, l, 0.5 * t))
            }
            ChannelKind::Rtn { alpha, eta } => {
                Ok(damped_mix(eta * eta - 4.0 * alpha * alpha, eta, eta, t))
            }
            ChannelKind::Oun { p, m } => {
                if m > 0.0 {
                    Ok((-(0.5 * p) * (t + (-m * t).exp_m1() / m)).exp())
                } else {
                    Ok(1.0)
                }
            }
            ChannelKind::Moun { p } => Ok((-0.5 * p * t).exp()),
            ChannelKind::Phenomenological { r, c0, .. } => {
                Ok(c0 * damped_mix(1.0 - 2.0 * r, 1.0, 1.0, 0.5 * t))
            }
            _ => Err(Error::NoDecoherenceFunction),
        }
    }

    fn regime(&self) -> Regime {
        match *self {
            ChannelKind::Nmad { kappa, l } => {
                if l < 2.0 * kappa {
                    Regime::NonMarkovianCpIndivisible
                } else {
                    Regime::Markovian
                }
            }
            ChannelKind::Rtn { alpha, eta } => {
                if eta == 0.0 && alpha > 0.0 {
                    return Regime::NonMarkovianCpIndivisible;
                }
                if eta > 0.0 && (2.0 * alpha / eta).powi(2) > 1.0 {
                    Regime::NonMarkovianCpIndivisible
                } else {
                    Regime::Markovian
                }
            }
            ChannelKind::Oun { p, m } => {
                if p > 0.0 && m > 0.0 {
                    Regime::NonMarkovianCpDivisible
                } else {
                    Regime::Markovian
                }
            }
            ChannelKind::Moun { .. } | ChannelKind::Gad { .. } => Regime::Markovian,
            ChannelKind::Phenomenological {
                r,
                temperature,
                s,
                upsilon,
                omega_c,
                ..
            } => {
                if r > 0.5 {
                    return Regime::NonMarkovianCpIndivisible;
                }
                // The decay rates stay positive for R <= 1/2; scan the
                // dephasing rate for sign changes instead, since the critical
                // Ohmic power is only known through its limits (2 at T = 0,
                // 3 at high temperature).
                if upsilon > 0.0 {
                    let probes = 48;
                    for i in 1..=probes {
                        let t = 10.0 / omega_c * i as f64 / probes as f64;
                        let g3 = phenomenological_gamma3(t, temperature, s, upsilon, omega_c)
                            .unwrap_or(0.0);
                        if g3 < -1e-12 * upsilon * omega_c {
                            return Regime::NonMarkovianCpIndivisible;
                        }
                    }
                }
                Regime::Markovian
            }
            ChannelKind::Eternal { b, nu } => {
                if b.abs() < 1.0 && nu > 0.0 {
                    Regime::NonMarkovianCpIndivisible
                } else {
                    Regime::Markovian
                }
            }
        }
    }
}

/// Dephasing rate of the phenomenological model,
/// `γ₃(t) = 2 ∫ dω J(ω) coth(ω/T) sin(ωt)` with spectral density
/// `J(ω) = υ ω^s e^{-ω/ω_c} / ω_c^s` and k_B = 1; at T = 0 the coth factor
/// is 1. Quadrature runs over `(0, 40 ω_c]` to [`SPECTRAL_TOL`].
pub fn phenomenological_gamma3(
    t: f64,
    temperature: f64,
    s: f64,
    upsilon: f64,
    omega_c: f64,
) -> Result<f64> {
    if s < 1.0 || !(omega_c > 0.0) || upsilon < 0.0 || temperature < 0.0 || t < 0.0 {
        return Err(Error::InvalidParams(format!(
            "spectral integral needs s >= 1, omega_c > 0, upsilon >= 0, T >= 0, t >= 0 \
             (got s = {s}, omega_c = {omega_c}, upsilon = {upsilon}, T = {temperature}, t = {t})"
        )));
    }
    if t == 0.0 || upsilon == 0.0 {
        return Ok(0.0);
    }
    let result = quad::integrate(
        |w| {
            if w <= 0.0 {
                return Ok(0.0);
            }
            let j = upsilon * (w / omega_c).powf(s) * (-w / omega_c).exp();
            let thermal = if temperature > 0.0 {
                coth(w / temperature)
            } else {
                1.0
            };
            Ok(j * thermal * (w * t).sin())
        },
        0.0,
        SPECTRAL_CUTOFF_FACTOR * omega_c,
        SPECTRAL_TOL,
    )?;
    Ok(2.0 * result.value)
}

/// Accumulated dephasing `Γ̃(t) = ∫₀ᵗ γ₃` for the phenomenological model,
/// with the time integral folded into the spectral integral:
/// `Γ̃(t) = 2 ∫ dω J(ω) coth(ω/T) (1 - cos ωt)/ω`.
pub fn phenomenological_gamma_tilde(
    t: f64,
    temperature: f64,
    s: f64,
    upsilon: f64,
    omega_c: f64,
) -> Result<f64> {
    if t == 0.0 || upsilon == 0.0 {
        return Ok(0.0);
    }
    let result = quad::integrate(
        |w| {
            if w <= 0.0 {
                return Ok(0.0);
            }
            let j = upsilon * (w / omega_c).powf(s) * (-w / omega_c).exp();
            let thermal = if temperature > 0.0 {
                coth(w / temperature)
            } else {
                1.0
            };
            let half = (0.5 * w * t).sin();
            Ok(j * thermal * 2.0 * half * half / w)
        },
        0.0,
        SPECTRAL_CUTOFF_FACTOR * omega_c,
        SPECTRAL_TOL,
    )?;
    Ok(2.0 * result.value)
}

impl ChannelSpec {
    /// Channel with all rates zero (the identity map).
    pub fn identity() -> Self {
        Self {
            members: Vec::new(),
            omega: 0.0,
        }
    }

    pub fn nmad(kappa: f64, l: f64) -> Result<Self> {
        Self::composite(vec![ChannelKind::Nmad { kappa, l }])
    }

    pub fn rtn(alpha: f64, eta: f64) -> Result<Self> {
        Self::composite(vec![ChannelKind::Rtn { alpha, eta }])
    }

    pub fn oun(p: f64, m: f64) -> Result<Self> {
        Self::composite(vec![ChannelKind::Oun { p, m }])
    }

    pub fn moun(p: f64) -> Result<Self> {
        Self::composite(vec![ChannelKind::Moun { p }])
    }

    #[allow(clippy::too_many_arguments)]
    pub fn phenomenological(
        r: f64,
        temperature: f64,
        nu0: f64,
        s: f64,
        upsilon: f64,
        omega_c: f64,
        c0: f64,
    ) -> Result<Self> {
        Self::composite(vec![ChannelKind::Phenomenological {
            r,
            temperature,
            nu0,
            s,
            upsilon,
            omega_c,
            c0,
        }])
    }

    pub fn eternal(b: f64, nu: f64) -> Result<Self> {
        Self::composite(vec![ChannelKind::Eternal { b, nu }])
    }

    pub fn gad(gain: f64, loss: f64) -> Result<Self> {
        Self::composite(vec![ChannelKind::Gad { gain, loss }])
    }

    /// Combines members whose rates are summed per role; each of γ₁, γ₂, γ₃
    /// may be sourced by at most one member.
    pub fn composite(members: Vec<ChannelKind>) -> Result<Self> {
        let mut claimed = (false, false, false);
        for member in &members {
            member.validate()?;
            let (s1, s2, s3) = member.sources();
            if (claimed.0 && s1) || (claimed.1 && s2) || (claimed.2 && s3) {
                return Err(Error::InvalidChannel(
                    "composite channels may source each rate from at most one member".into(),
                ));
            }
            claimed = (claimed.0 || s1, claimed.1 || s2, claimed.2 || s3);
        }
        Ok(Self {
            members,
            omega: 0.0,
        })
    }

    /// Sets the constant precession frequency ω.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn members(&self) -> &[ChannelKind] {
        &self.members
    }

    /// Instantaneous rates (γ₁, γ₂, γ₃, ω) at time `t`. Errors within 1e-9 of
    /// a decoherence-function zero, where a rate diverges.
    pub fn rates_at(&self, t: f64) -> Result<Rates> {
        let mut rates = Rates {
            g1: 0.0,
            g2: 0.0,
            g3: 0.0,
            omega: self.omega,
        };
        for member in &self.members {
            let (g1, g2, g3) = member.rates(t)?;
            rates.g1 += g1;
            rates.g2 += g2;
            rates.g3 += g3;
        }
        Ok(rates)
    }

    pub(crate) fn factors(&self, t: f64) -> Result<MapFactors> {
        let mut acc = IDENTITY_FACTORS;
        for member in &self.members {
            let f = member.factors(t)?;
            // Population damping and coherence factors multiply (the
            // accumulated integrals add); pumping is supplied by the single
            // member that sources γ₂.
            acc = MapFactors {
                damp: acc.damp * f.damp,
                pump: acc.pump + f.pump,
                coh: acc.coh * f.coh,
                ddamp: acc.ddamp * f.damp + acc.damp * f.ddamp,
                dpump: acc.dpump + f.dpump,
                dcoh: acc.dcoh * f.coh + acc.coh * f.dcoh,
            };
        }
        Ok(acc)
    }

    /// The four accumulated integrals at time `t`, from the closed per-model
    /// forms (decoherence-function logarithms; quadrature only inside the
    /// spectral dephasing of the phenomenological model).
    pub fn map_integrals(&self, t: f64) -> Result<MapIntegrals> {
        let f = self.factors(t)?;
        let gamma = -f.damp.ln();
        Ok(MapIntegrals {
            gamma,
            g: f.pump / f.damp,
            omega: 2.0 * self.omega * t,
            gamma_tilde: -f.coh.abs().ln() - 0.5 * gamma,
        })
    }

    /// Map integrals by direct adaptive quadrature of the rates, used to
    /// cross-check the closed forms away from rate poles.
    #[allow(dead_code)]
    pub(crate) fn map_integrals_quad(&self, t: f64) -> Result<MapIntegrals> {
        let gamma = quad::integrate(
            |tau| self.rates_at(tau).map(|r| 0.5 * (r.g1 + r.g2)),
            0.0,
            t,
            MAP_INTEGRAL_TOL,
        )?
        .value;
        let g = quad::integrate(
            |tau| {
                let r = self.rates_at(tau)?;
                let f = self.factors(tau)?;
                Ok(0.5 * r.g2 / f.damp)
            },
            0.0,
            t,
            MAP_INTEGRAL_TOL,
        )?
        .value;
        let gamma_tilde = quad::integrate(
            |tau| self.rates_at(tau).map(|r| r.g3),
            0.0,
            t,
            MAP_INTEGRAL_TOL,
        )?
        .value;
        Ok(MapIntegrals {
            gamma,
            g,
            omega: 2.0 * self.omega * t,
            gamma_tilde,
        })
    }

    /// Applies the map to `s0`: `p₁(t) = e^{-Γ}[G + p₁(0)]`,
    /// `α(t) = α(0) e^{iΩ - Γ/2 - Γ̃}`, evaluated through the pole-free
    /// factor form.
    pub fn evolve(&self, s0: &QubitState, t: f64) -> Result<QubitState> {
        let f = self.factors(t)?;
        let p1 = f.pump + f.damp * s0.p1();
        let phase = Complex64::from_polar(1.0, 2.0 * self.omega * t);
        QubitState::new(p1, s0.alpha() * f.coh * phase)
    }

    /// Time derivative of the trajectory through `s0`, `dρ_t/dt`, evaluated
    /// from the factor derivatives. Finite at rate poles, where the raw
    /// generator is not.
    pub fn evolve_derivative(&self, s0: &QubitState, t: f64) -> Result<HermitianMatrix2> {
        let f = self.factors(t)?;
        let dp1 = f.dpump + f.ddamp * s0.p1();
        let phase = Complex64::from_polar(1.0, 2.0 * self.omega * t);
        let dalpha =
            s0.alpha() * (Complex64::new(f.dcoh, 0.0) + Complex64::new(0.0, 2.0 * self.omega) * f.coh) * phase;
        Ok(HermitianMatrix2::from_parts(-dp1, dp1, dalpha))
    }

    /// Right-hand side of the master equation applied to `s` at time `t`.
    /// Requires finite rates at `t`.
    pub fn generator_apply(&self, s: &QubitState, t: f64) -> Result<HermitianMatrix2> {
        let r = self.rates_at(t)?;
        Ok(generator_from_rates(&r, s))
    }

    /// Scalar decoherence function of a single-member channel.
    pub fn decoherence_function(&self, t: f64) -> Result<f64> {
        match self.members.as_slice() {
            [member] => member.decoherence(t),
            _ => Err(Error::NoDecoherenceFunction),
        }
    }

    /// Markovianity label per the stated regime condition of each member; a
    /// composite inherits the strongest label among its members.
    pub fn regime(&self) -> Regime {
        self.members
            .iter()
            .map(ChannelKind::regime)
            .max()
            .unwrap_or(Regime::Markovian)
    }

    /// First zero of a member decoherence function in `(0, horizon]`, if any.
    /// Rates diverge there, so rate-based integrals must reject such spans.
    pub(crate) fn first_rate_pole(&self, horizon: f64) -> Option<f64> {
        let mut first: Option<f64> = None;
        for member in &self.members {
            let probe: Box<dyn Fn(f64) -> f64> = match *member {
                ChannelKind::Nmad { kappa, l } => {
                    Box::new(move |t| damped_mix(l * l - 2.0 * kappa * l, l, l, 0.5 * t))
                }
                ChannelKind::Rtn { alpha, eta } => {
                    Box::new(move |t| damped_mix(eta * eta - 4.0 * alpha * alpha, eta, eta, t))
                }
                ChannelKind::Phenomenological { r, .. } => {
                    Box::new(move |t| damped_mix(1.0 - 2.0 * r, 1.0, 1.0, 0.5 * t))
                }
                _ => continue,
            };
            let steps = 2048;
            let mut prev = probe(0.0);
            for i in 1..=steps {
                let t = horizon * i as f64 / steps as f64;
                let value = probe(t);
                if value == 0.0 || value.signum() != prev.signum() {
                    // Bisect for a tight location.
                    let (mut lo, mut hi) = (horizon * (i - 1) as f64 / steps as f64, t);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if probe(mid).signum() == prev.signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let zero = 0.5 * (lo + hi);
                    first = Some(first.map_or(zero, |f: f64| f.min(zero)));
                    break;
                }
                prev = value;
            }
        }
        first
    }
}

/// Master-equation right-hand side for explicit rates.
pub(crate) fn generator_from_rates(r: &Rates, s: &QubitState) -> HermitianMatrix2 {
    let dp1 = 0.5 * r.g2 * (1.0 - s.p1()) - 0.5 * r.g1 * s.p1();
    let decay = -0.25 * (r.g1 + r.g2) - r.g3;
    let dalpha = s.alpha() * Complex64::new(decay, r.omega);
    HermitianMatrix2::from_parts(-dp1, dp1, dalpha)
}
