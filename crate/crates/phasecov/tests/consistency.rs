//! Cross-module checks: the action bound against the geometric bound on the
//! same trajectory, and qualitative series behavior for combined channels.

use std::f64::consts::FRAC_PI_4;

use phasecov::action::{action_qsl_time, optimize_path, ActionParams, ControlPath};
use phasecov::channels::{ChannelKind, ChannelSpec};
use phasecov::qsl::qsl_time_pure;
use phasecov::state::QubitState;

/// The damping coordinate of a generalized-amplitude-damping trajectory is
/// `q(t) = 1 - e^{-(γ+Γ)t/2}`; matching the path endpoint to the physical
/// trajectory makes the two speed limits comparable.
fn physical_endpoint(gain: f64, loss: f64, tau: f64) -> f64 {
    1.0 - (-0.5 * (gain + loss) * tau).exp()
}

#[test]
fn optimized_action_bound_saturates_geometric_bound() {
    // Balanced rates: the control density matches the physical trajectory
    // speed exactly, so after optimization τ^a/τ = (τ_QSL/τ)².
    let (gain, loss, tau) = (1.0, 1.0, 1.0);
    let theta_half = FRAC_PI_4; // |ψ⟩ = cos θ|0⟩ + sin θ|1⟩
    let q_f = physical_endpoint(gain, loss, tau);
    let p = ActionParams::new(theta_half, gain, loss, tau, q_f).unwrap();

    let init = ControlPath::linear(tau, q_f, 256).unwrap();
    let out = optimize_path(&p, &init, 1000, 0.5).unwrap();

    let channel = ChannelSpec::gad(gain, loss).unwrap();
    let rho0 = QubitState::from_theta(2.0 * theta_half);
    let rho_tau = channel.evolve(&rho0, tau).unwrap();

    let action_ratio = action_qsl_time(&p, &out.path, &rho0, &rho_tau).unwrap() / tau;
    let geometric = qsl_time_pure(&channel, &rho0, tau).unwrap();
    let geometric_sq = (geometric.tau_qsl / tau).powi(2);

    assert!(
        (action_ratio - geometric_sq).abs() <= 0.01 * geometric_sq,
        "action ratio {action_ratio} vs squared geometric ratio {geometric_sq}"
    );
}

#[test]
fn action_bound_stays_below_geometric_bound() {
    // For balanced rates the inequality holds at any initial angle, with
    // equality only after full optimization.
    let (gain, loss, tau) = (1.0, 1.0, 1.0);
    for theta_half in [0.3, 0.5, FRAC_PI_4, 1.1] {
        let q_f = physical_endpoint(gain, loss, tau);
        let p = ActionParams::new(theta_half, gain, loss, tau, q_f).unwrap();
        let init = ControlPath::linear(tau, q_f, 128).unwrap();
        let out = optimize_path(&p, &init, 1000, 0.5).unwrap();

        let channel = ChannelSpec::gad(gain, loss).unwrap();
        let rho0 = QubitState::from_theta(2.0 * theta_half);
        let rho_tau = channel.evolve(&rho0, tau).unwrap();

        let unoptimized = action_qsl_time(&p, &init, &rho0, &rho_tau).unwrap() / tau;
        let optimized = action_qsl_time(&p, &out.path, &rho0, &rho_tau).unwrap() / tau;
        let geometric = qsl_time_pure(&channel, &rho0, tau).unwrap();
        let geometric_sq = (geometric.tau_qsl / tau).powi(2);

        assert!(unoptimized <= optimized + 1e-12);
        assert!(
            optimized <= geometric_sq * (1.0 + 1e-6),
            "theta = {theta_half}: optimized {optimized} above geometric {geometric_sq}"
        );
    }
}

#[test]
fn combined_damping_and_telegraph_noise_wiggles() {
    // Deep in the non-Markovian telegraph regime (bandwidth well below the
    // coupling) the coherence revivals survive long enough to make the
    // speed-limit series oscillate; count sign changes of the discrete
    // derivative.
    let c = ChannelSpec::composite(vec![
        ChannelKind::Nmad { kappa: 1.0, l: 0.1 },
        ChannelKind::Rtn {
            alpha: 1.0,
            eta: 0.1,
        },
    ])
    .unwrap();
    let s0 = QubitState::from_theta(std::f64::consts::FRAC_PI_2);
    let series: Vec<f64> = (1..=120)
        .map(|i| {
            let tau = 12.0 * i as f64 / 120.0;
            qsl_time_pure(&c, &s0, tau).unwrap().tau_qsl
        })
        .collect();
    let mut sign_changes = 0;
    let mut prev_slope = 0.0f64;
    for w in series.windows(2) {
        let slope = w[1] - w[0];
        if slope * prev_slope < 0.0 {
            sign_changes += 1;
        }
        if slope != 0.0 {
            prev_slope = slope;
        }
    }
    assert!(
        sign_changes >= 3,
        "expected at least 3 slope sign changes, found {sign_changes}"
    );
}

#[test]
fn eternal_tradeoff_limit_matches_one_minus_b_squared() {
    for b in [0.3, 0.5, 0.7] {
        let c = ChannelSpec::eternal(b, 1.0).unwrap();
        let plus = QubitState::from_theta(std::f64::consts::FRAC_PI_2);
        let late = c.evolve(&plus, 12.0).unwrap();
        assert!(
            (late.tradeoff_mcl() - (1.0 - b * b)).abs() < 1e-6,
            "b = {b}"
        );
    }
}
