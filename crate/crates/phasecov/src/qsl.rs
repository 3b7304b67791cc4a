//! Geometric quantum-speed-limit times.
//!
//! For a pure initial state the bound is
//!
//! ```text
//! τ_QSL = max{ 1/Λᵒᵖ, 1/Λᵗʳ, 1/Λʰˢ } · sin²[B],
//! Λ^{op,tr,hs} = (1/τ) ∫₀^τ ||L(ρ_t)|| dt,
//! ```
//!
//! with `B = arccos √⟨ψ₀|ρ_τ|ψ₀⟩`. The von Neumann trace inequality orders
//! the norms as op ≤ hs ≤ tr, so the max is always attained by the
//! operator-norm term; the max is nevertheless computed explicitly and the
//! two are asserted to agree, which guards the norm implementation.
//!
//! For mixed initial states the bound runs between `ρ_τ` and `ρ_{τ+τ_d}`
//! along one trajectory, uses the super-fidelity Bures angle
//! `B = arccos F(ρ_τ, ρ_{τ+τ_d})`, and augments the generator norm by the
//! purity factor `1 + √((1 - tr ρ_τ²)/(1 - tr ρ_t²))`.
//!
//! The generator along a trajectory is evaluated from the map-factor
//! derivatives, which stay bounded through the decoherence-function zeros
//! where the instantaneous rates diverge.

use num_complex::Complex64;

use crate::channels::ChannelSpec;
use crate::quad;
use crate::state::{bures_angle_mixed, bures_angle_pure, QubitState};
use crate::{Error, Result};

/// Absolute tolerance for the norm functionals.
pub const QSL_QUAD_TOL: f64 = 1e-8;
/// Integrand values beyond this guard are treated as divergent.
const INTEGRAND_GUARD: f64 = 1e12;
/// Below this time-averaged speed the trajectory is considered frozen.
const STATIONARY_EPS: f64 = 1e-30;
/// Purity complements below this are treated as exactly pure.
const PURITY_EPS: f64 = 1e-14;

/// Bures angle, time-averaged norms, and the resulting speed-limit time.
#[derive(Debug, Clone, Copy)]
pub struct QslResult {
    /// Bures angle between the reference and final states.
    pub bures: f64,
    /// Time-averaged operator norm of the generator.
    pub lambda_op: f64,
    /// Time-averaged Hilbert–Schmidt norm.
    pub lambda_hs: f64,
    /// Time-averaged trace norm.
    pub lambda_tr: f64,
    /// The speed-limit time; 0 with `stationary` set when nothing moves.
    pub tau_qsl: f64,
    /// Driving time the bound refers to.
    pub tau_drive: f64,
    /// Set when the trajectory does not move and the bound degenerates,
    /// in place of a division by zero.
    pub stationary: bool,
}

/// Time-averaged operator, Hilbert–Schmidt and trace norms of the generator
/// along the trajectory through `s0`.
pub fn lambda_functionals(c: &ChannelSpec, s0: &QubitState, tau: f64) -> Result<(f64, f64, f64)> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParams(format!(
            "averaging window must be positive (got {tau})"
        )));
    }
    let norm_at = |t: f64| -> Result<crate::state::MatrixNorms> {
        let n = c.evolve_derivative(s0, t)?.norms();
        if n.tr > INTEGRAND_GUARD {
            return Err(Error::DivergentIntegrand { t });
        }
        Ok(n)
    };
    let op = quad::integrate(|t| norm_at(t).map(|n| n.op), 0.0, tau, QSL_QUAD_TOL)?.value;
    let hs = quad::integrate(|t| norm_at(t).map(|n| n.hs), 0.0, tau, QSL_QUAD_TOL)?.value;
    let tr = quad::integrate(|t| norm_at(t).map(|n| n.tr), 0.0, tau, QSL_QUAD_TOL)?.value;
    Ok((op / tau, hs / tau, tr / tau))
}

fn finish_geometric(bures: f64, op: f64, hs: f64, tr: f64, tau_drive: f64) -> QslResult {
    let sin2 = bures.sin().powi(2);
    if op <= STATIONARY_EPS {
        return QslResult {
            bures,
            lambda_op: op,
            lambda_hs: hs,
            lambda_tr: tr,
            tau_qsl: 0.0,
            tau_drive,
            stationary: true,
        };
    }
    // The tightest bound: the largest of the three inverse norms, which the
    // norm ordering pins to the operator-norm term (meaningful only above
    // the quadrature noise floor).
    let max_inverse = (1.0 / op).max(1.0 / hs).max(1.0 / tr);
    debug_assert!(op <= QSL_QUAD_TOL || (max_inverse - 1.0 / op).abs() <= 1e-12 * max_inverse);
    QslResult {
        bures,
        lambda_op: op,
        lambda_hs: hs,
        lambda_tr: tr,
        tau_qsl: sin2 * max_inverse,
        tau_drive,
        stationary: false,
    }
}

/// Speed-limit time for a pure initial state over the window `[0, τ]`.
pub fn qsl_time_pure(c: &ChannelSpec, s0: &QubitState, tau: f64) -> Result<QslResult> {
    if !s0.is_pure(1e-9) {
        return Err(Error::NotPure {
            purity: s0.purity(),
        });
    }
    let rho_tau = c.evolve(s0, tau)?;
    let bures = bures_angle_pure(s0, &rho_tau)?;
    let (op, hs, tr) = lambda_functionals(c, s0, tau)?;
    Ok(finish_geometric(bures, op, hs, tr, tau))
}

/// Speed-limit time between `ρ_τ` and `ρ_{τ+τ_d}` for an initial state of
/// any purity.
///
/// `s_tau` is the trajectory state at time `τ`; the trajectory is continued
/// by inverting the map at `τ` (the map factors are strictly invertible away
/// from decoherence zeros) and evolving the recovered time-zero state.
pub fn qsl_time_mixed(
    c: &ChannelSpec,
    s_tau: &QubitState,
    tau: f64,
    tau_d: f64,
) -> Result<QslResult> {
    if tau < 0.0 || !(tau_d > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need tau >= 0 and tau_d > 0 (got {tau}, {tau_d})"
        )));
    }
    let s0 = invert_to_initial(c, s_tau, tau)?;
    let end = c.evolve(&s0, tau + tau_d)?;
    let bures = bures_angle_mixed(s_tau, &end);

    let purity_tau = s_tau.purity();
    let pure_reference = 1.0 - purity_tau < PURITY_EPS;

    let weighted_norm = |t: f64| -> Result<crate::state::MatrixNorms> {
        let n = c.evolve_derivative(&s0, t)?.norms();
        if n.tr > INTEGRAND_GUARD {
            return Err(Error::DivergentIntegrand { t });
        }
        let factor = if pure_reference {
            // Limiting value of the purity factor for a pure reference.
            1.0
        } else {
            let complement = 1.0 - c.evolve(&s0, t)?.purity();
            if complement < PURITY_EPS {
                return Err(Error::PuritySingularity { t });
            }
            1.0 + ((1.0 - purity_tau) / complement).sqrt()
        };
        Ok(crate::state::MatrixNorms {
            op: n.op * factor,
            hs: n.hs * factor,
            tr: n.tr * factor,
        })
    };
    let upper = tau + tau_d;
    let op = quad::integrate(|t| weighted_norm(t).map(|n| n.op), tau, upper, QSL_QUAD_TOL)?.value
        / tau_d;
    let hs = quad::integrate(|t| weighted_norm(t).map(|n| n.hs), tau, upper, QSL_QUAD_TOL)?.value
        / tau_d;
    let tr = quad::integrate(|t| weighted_norm(t).map(|n| n.tr), tau, upper, QSL_QUAD_TOL)?.value
        / tau_d;
    Ok(finish_geometric(bures, op, hs, tr, tau_d))
}

/// Upper bound on the rate of change of accessible information, per unit
/// change of the Holevo quantity: `1/τ_QSL`. Errors when the speed-limit
/// time vanishes and the bound is unbounded.
pub fn holevo_rate_bound(qsl: &QslResult) -> Result<f64> {
    if qsl.tau_qsl > 0.0 {
        Ok(1.0 / qsl.tau_qsl)
    } else {
        Err(Error::InfiniteBound)
    }
}

/// Recovers the time-zero state whose trajectory passes through `s_tau` at
/// time `tau`.
fn invert_to_initial(c: &ChannelSpec, s_tau: &QubitState, tau: f64) -> Result<QubitState> {
    if tau == 0.0 {
        return Ok(*s_tau);
    }
    let f = c.factors(tau)?;
    if f.damp < 1e-300 {
        return Err(Error::InvalidParams(format!(
            "map is no longer invertible at tau = {tau}"
        )));
    }
    let p1 = (s_tau.p1() - f.pump) / f.damp;
    let alpha = if f.coh.abs() < 1e-300 {
        Complex64::new(0.0, 0.0)
    } else {
        s_tau.alpha() / (f.coh * Complex64::from_polar(1.0, 2.0 * c.omega() * tau))
    };
    QubitState::new(p1, alpha)
}
