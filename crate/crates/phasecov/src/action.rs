//! Action quantum speed limit for generalized amplitude damping.
//!
//! The channel traverses a control path `q(t)` with `q(0) = 0` and
//! `q(τ) = q_f < 1`, and the action to minimize is
//!
//! ```text
//! a = ∫₀^τ dt q̇² ( sin²2θ / (16(1-q)) + (sin²θ - η)² ),
//! ```
//!
//! with `η = ½(1 + tanh β)`, `β = ½ ln(γ/Γ)`. The exact optimum over paths
//! with pinned endpoints follows from the Cauchy–Schwarz inequality:
//! `a_min = (∫₀^{q_f} √f(q) dq)² / τ`, attained when `q̇ √f(q)` is constant
//! (the first integral of the Euler–Lagrange equation). The speed-limit time
//! is `τ^a = (sin²[B(ρ₀, ρ_τ)])² / a`.
//!
//! The minimizer is a monotone gradient descent: paths are reparametrized by
//! log-increments, which keeps every iterate pinned, nondecreasing and
//! strictly below 1, the discrete gradient of the trapezoid action is exact,
//! and an Armijo backtracking line search guarantees a nonincreasing action
//! trace.

use crate::state::{bures_angle_pure, QubitState};
use crate::{Error, Result};

/// Paths shorter than this many segments make the finite-difference speed
/// too coarse.
pub const MIN_SEGMENTS: usize = 64;
/// Guard against the integrand's 1/(1-q) singularity.
const SINGULARITY_EPS: f64 = 1e-9;
/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Backtracking factor of the line search.
const BACKTRACK: f64 = 0.5;

/// Monotone control path on a uniform time grid over `[0, τ]`, with
/// `q(0) = 0`, `q(τ) = q_f` and `0 ≤ q < 1` pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath {
    tau: f64,
    q: Vec<f64>,
}

impl ControlPath {
    /// Validates and wraps explicit path values (N+1 of them).
    pub fn from_values(tau: f64, q: Vec<f64>) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidPath(format!(
                "driving time must be positive (got {tau})"
            )));
        }
        if q.len() < MIN_SEGMENTS + 1 {
            return Err(Error::InvalidPath(format!(
                "need at least {} grid segments (got {})",
                MIN_SEGMENTS,
                q.len().saturating_sub(1)
            )));
        }
        if q[0].abs() > 1e-12 {
            return Err(Error::InvalidPath(format!(
                "path must start at 0 (got {})",
                q[0]
            )));
        }
        let q_f = *q.last().expect("nonempty");
        if !(q_f > 0.0 && q_f < 1.0) {
            return Err(Error::InvalidPath(format!(
                "endpoint must satisfy 0 < q_f < 1 (got {q_f})"
            )));
        }
        for pair in q.windows(2) {
            if pair[1] < pair[0] - 1e-12 {
                return Err(Error::InvalidPath(format!(
                    "path must be nondecreasing ({} -> {})",
                    pair[0], pair[1]
                )));
            }
        }
        if q.iter().any(|&v| !(0.0..1.0).contains(&v.max(0.0))) {
            return Err(Error::InvalidPath("path values must lie in [0, 1)".into()));
        }
        Ok(Self { tau, q })
    }

    /// The straight line `q(t) = q_f t/τ` on `n` segments.
    pub fn linear(tau: f64, q_f: f64, n: usize) -> Result<Self> {
        let q = (0..=n).map(|i| q_f * i as f64 / n as f64).collect();
        Self::from_values(tau, q)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn q_f(&self) -> f64 {
        *self.q.last().expect("nonempty")
    }

    /// Number of grid segments N.
    pub fn segments(&self) -> usize {
        self.q.len() - 1
    }

    /// Grid spacing τ/N.
    pub fn spacing(&self) -> f64 {
        self.tau / self.segments() as f64
    }

    /// Grid times 0, h, ..., τ.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.q.len()).map(|i| i as f64 * h).collect()
    }
}

/// Parameters of the action functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionParams {
    /// Initial-state angle θ in `|ψ⟩ = cos θ|0⟩ + sin θ|1⟩`.
    pub theta: f64,
    /// Gain rate γ₁ = γ.
    pub gain: f64,
    /// Loss rate γ₂ = Γ.
    pub loss: f64,
    /// η = ½(1 + tanh β) = γ/(γ+Γ).
    pub eta: f64,
    /// β = ½ ln(γ/Γ).
    pub beta: f64,
    /// Driving time τ.
    pub tau: f64,
    /// Path endpoint, 0 < q_f < 1.
    pub q_f: f64,
}

impl ActionParams {
    pub fn new(theta: f64, gain: f64, loss: f64, tau: f64, q_f: f64) -> Result<Self> {
        if !(gain > 0.0 && loss > 0.0) {
            return Err(Error::InvalidParams(format!(
                "gain and loss rates must be positive (got {gain}, {loss})"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParams(format!(
                "driving time must be positive (got {tau})"
            )));
        }
        if !(q_f > 0.0 && q_f < 1.0) {
            return Err(Error::InvalidParams(format!(
                "endpoint must satisfy 0 < q_f < 1 (got {q_f})"
            )));
        }
        let beta = 0.5 * (gain / loss).ln();
        let eta = 0.5 * (1.0 + beta.tanh());
        Ok(Self {
            theta,
            gain,
            loss,
            eta,
            beta,
            tau,
            q_f,
        })
    }

    /// Control Lagrangian density `f(q)` with `a = ∫ q̇² f(q) dt`.
    fn density(&self) -> Density {
        let s2 = (2.0 * self.theta).sin();
        let d = self.theta.sin().powi(2) - self.eta;
        Density {
            osc: s2 * s2 / 16.0,
            flat: d * d,
        }
    }

    fn check_path(&self, path: &ControlPath) -> Result<()> {
        if (path.tau() - self.tau).abs() > 1e-12 * self.tau.max(1.0) {
            return Err(Error::InvalidPath(format!(
                "path time {} does not match parameter time {}",
                path.tau(),
                self.tau
            )));
        }
        if (path.q_f() - self.q_f).abs() > 1e-9 {
            return Err(Error::InvalidPath(format!(
                "path endpoint {} does not match parameter endpoint {}",
                path.q_f(),
                self.q_f
            )));
        }
        Ok(())
    }
}

/// `f(q) = osc/(1-q) + flat`.
#[derive(Debug, Clone, Copy)]
struct Density {
    osc: f64,
    flat: f64,
}

impl Density {
    fn value(&self, q: f64) -> f64 {
        self.osc / (1.0 - q) + self.flat
    }

    fn derivative(&self, q: f64) -> f64 {
        self.osc / ((1.0 - q) * (1.0 - q))
    }
}

/// Trapezoid-rule action of a path: midpoint finite-difference speeds,
/// trapezoid averages of the density. Second-order accurate in the grid
/// spacing.
pub fn action_functional(path: &ControlPath, p: &ActionParams) -> Result<f64> {
    p.check_path(path)?;
    let density = p.density();
    let h = path.spacing();
    let q = path.values();
    let mut action = 0.0;
    for i in 0..path.segments() {
        if 1.0 - q[i + 1] < SINGULARITY_EPS {
            return Err(Error::InvalidPath(format!(
                "1 - q fell below {SINGULARITY_EPS} at node {}",
                i + 1
            )));
        }
        let speed = (q[i + 1] - q[i]) / h;
        action += h * speed * speed * 0.5 * (density.value(q[i]) + density.value(q[i + 1]));
    }
    Ok(action)
}

/// Exact optimum of the action over pinned-endpoint paths,
/// `a_min = (∫₀^{q_f} √f(q) dq)²/τ`: the Cauchy–Schwarz bound, saturated by
/// constant-arc-speed paths.
pub fn cauchy_schwarz_bound(p: &ActionParams) -> f64 {
    let density = p.density();
    let arc = crate::quad::integrate(
        |q| Ok(density.value(q).sqrt()),
        0.0,
        p.q_f,
        1e-10,
    )
    .expect("the arc-length integrand is smooth on [0, q_f]")
    .value;
    arc * arc / p.tau
}

/// Outcome of the descent: optimized path, the action after every accepted
/// step (nonincreasing, starting from the initial action), convergence flag
/// and the number of accepted iterations.
#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub path: ControlPath,
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Gradient descent on the discretized action.
///
/// The path is represented by log-increments `u`, mapped through a
/// normalized cumulative sum, so every iterate keeps its endpoints pinned,
/// stays nondecreasing and never reaches 1. The gradient of the trapezoid
/// action is computed analytically and chained through the
/// reparametrization; backtracking keeps the trace monotone. Line-search
/// step underflow is treated as convergence.
pub fn optimize_path(
    p: &ActionParams,
    init: &ControlPath,
    steps: usize,
    rate: f64,
) -> Result<OptimizeReport> {
    p.check_path(init)?;
    if steps == 0 {
        return Err(Error::InvalidParams("need at least one step".into()));
    }
    if !(rate > 0.0) {
        return Err(Error::InvalidParams(format!(
            "descent rate must be positive (got {rate})"
        )));
    }

    let n = init.segments();
    let h = init.spacing();
    let density = p.density();
    let q_f = p.q_f;

    // Log-increment coordinates of the initial path.
    let floor = 1e-12 * q_f;
    let mut u: Vec<f64> = init
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]).max(floor).ln())
        .collect();

    let assemble = |u: &[f64]| -> Vec<f64> {
        let u_max = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = u.iter().map(|&v| (v - u_max).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut q = Vec::with_capacity(n + 1);
        q.push(0.0);
        let mut prefix = 0.0;
        for &wi in &w[..n - 1] {
            prefix += wi;
            q.push(q_f * prefix / total);
        }
        q.push(q_f);
        q
    };

    let action_of = |q: &[f64]| -> f64 {
        let mut a = 0.0;
        for i in 0..n {
            let speed = (q[i + 1] - q[i]) / h;
            a += h * speed * speed * 0.5 * (density.value(q[i]) + density.value(q[i + 1]));
        }
        a
    };

    // Exact gradient of the trapezoid action in u-space.
    let gradient = |u: &[f64], q: &[f64]| -> Vec<f64> {
        let mut grad_q = vec![0.0; n + 1];
        for i in 0..n {
            let delta = q[i + 1] - q[i];
            let mean_f = 0.5 * (density.value(q[i]) + density.value(q[i + 1]));
            let speed_term = 2.0 * delta / h * mean_f;
            grad_q[i] -= speed_term;
            grad_q[i + 1] += speed_term;
            let curvature = 0.5 * delta * delta / h;
            grad_q[i] += curvature * density.derivative(q[i]);
            grad_q[i + 1] += curvature * density.derivative(q[i + 1]);
        }

        let u_max = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = u.iter().map(|&v| (v - u_max).exp()).collect();
        let total: f64 = w.iter().sum();
        // prefix_k = Σ_{i<k} w_i for interior nodes k = 1..n-1;
        // D = Σ_k grad_q[k] prefix_k, suffix_j = Σ_{k>j} grad_q[k].
        let mut dot_prefix = 0.0;
        let mut prefix = 0.0;
        for k in 1..n {
            prefix += w[k - 1];
            dot_prefix += grad_q[k] * prefix;
        }
        let mut grad_u = vec![0.0; n];
        let mut suffix = 0.0;
        for j in (0..n).rev() {
            // suffix over interior nodes k with k > j
            grad_u[j] = q_f * w[j] / total * (suffix - dot_prefix / total);
            if j >= 1 && j < n {
                suffix += grad_q[j];
            }
        }
        grad_u
    };

    let mut q = assemble(&u);
    let mut action = action_of(&q);
    let mut trace = vec![action];
    let mut step = rate;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..steps {
        let grad = gradient(&u, &q);
        let grad_norm2: f64 = grad.iter().map(|g| g * g).sum();
        let grad_inf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_inf < 1e-14 {
            converged = true;
            break;
        }

        let mut accepted = false;
        loop {
            if step * grad_inf < 1e-16 {
                break;
            }
            let candidate_u: Vec<f64> =
                u.iter().zip(&grad).map(|(&ui, &g)| ui - step * g).collect();
            let candidate_q = assemble(&candidate_u);
            let candidate_action = action_of(&candidate_q);
            if candidate_action <= action - ARMIJO_C * step * grad_norm2 {
                u = candidate_u;
                q = candidate_q;
                action = candidate_action;
                trace.push(action);
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= BACKTRACK;
        }
        if !accepted {
            // The line search can no longer decrease the action.
            converged = true;
            break;
        }
        iterations += 1;
    }

    let path = ControlPath::from_values(p.tau, q)?;
    Ok(OptimizeReport {
        path,
        trace,
        converged,
        iterations,
    })
}

/// Relative spread of the Euler–Lagrange first integral `q̇ √f(q)` across
/// interior grid segments (the boundary segments carry the discretization's
/// endpoint error and are excluded). Zero for a perfectly converged path.
pub fn first_integral_spread(path: &ControlPath, p: &ActionParams) -> Result<f64> {
    p.check_path(path)?;
    let density = p.density();
    let h = path.spacing();
    let q = path.values();
    let n = path.segments();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 1..n - 1 {
        let mid = 0.5 * (q[i] + q[i + 1]);
        let value = (q[i + 1] - q[i]) / h * density.value(mid).sqrt();
        lo = lo.min(value);
        hi = hi.max(value);
        sum += value;
        count += 1;
    }
    let mean = sum / count as f64;
    if mean == 0.0 {
        return Ok(0.0);
    }
    Ok((hi - lo) / mean)
}

/// Action speed-limit time `τ^a = (sin²[B(ρ₀, ρ_τ)])² / a` for the given
/// path and trajectory endpoints. `rho_tau` is the channel state at time τ.
pub fn action_qsl_time(
    p: &ActionParams,
    path: &ControlPath,
    rho0: &QubitState,
    rho_tau: &QubitState,
) -> Result<f64> {
    let action = action_functional(path, p)?;
    if action <= 1e-30 {
        return Err(Error::ZeroAction);
    }
    let bures = bures_angle_pure(rho0, rho_tau)?;
    let sin2 = bures.sin().powi(2);
    Ok(sin2 * sin2 / action)
}
