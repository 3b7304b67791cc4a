//! Built-in figure presets. Each preset reproduces one published data series
//! as CSV; axis ranges the captions leave open are chosen here and noted in
//! the README. Presets accept a small set of overrides (grid bounds and
//! points, `channel.kind=none` to zero every rate, `seed`).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use phasecov::action::{
    action_functional, cauchy_schwarz_bound, optimize_path, ActionParams, ControlPath,
};
use phasecov::channels::{ChannelKind, ChannelSpec};
use phasecov::nonmarkov::sss_zeta_seeded;
use phasecov::qsl::{qsl_time_mixed, qsl_time_pure};
use phasecov::state::{bures_angle_pure, BlochVector, QubitState};

use crate::config::{CliError, CliResult};
use crate::sweep::{par_map_ordered, Table, Value};

pub const FIGURE_IDS: [&str; 15] = [
    "1a", "1b", "1c", "2a", "2b", "2c", "3a", "3b", "3c", "4a", "4b", "4c", "5a", "5b", "6",
];

/// Per-figure knobs that may be overridden from the command line.
#[derive(Debug, Clone)]
pub struct FigureRequest {
    pub id: String,
    pub seed: u64,
    pub jobs: usize,
    pub points: Option<usize>,
    pub overrides: Vec<String>,
}

struct Knobs {
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    zero_channels: bool,
    seed: u64,
}

impl Knobs {
    fn from_request(req: &FigureRequest) -> CliResult<Self> {
        let mut knobs = Knobs {
            start: None,
            stop: None,
            points: req.points,
            zero_channels: false,
            seed: req.seed,
        };
        for item in &req.overrides {
            let Some((key, value)) = item.split_once('=') else {
                return Err(CliError::Config(format!(
                    "override `{item}`: expected key=value"
                )));
            };
            match key.trim() {
                "grid.start" => knobs.start = Some(parse_f64(key, value)?),
                "grid.stop" => knobs.stop = Some(parse_f64(key, value)?),
                "grid.points" => {
                    knobs.points = Some(value.trim().parse().map_err(|_| {
                        CliError::Config(format!("override grid.points: `{value}` not an integer"))
                    })?)
                }
                "seed" => {
                    knobs.seed = value.trim().parse().map_err(|_| {
                        CliError::Config(format!("override seed: `{value}` not an integer"))
                    })?
                }
                "channel.kind" => {
                    if value.trim() == "none" {
                        knobs.zero_channels = true;
                    } else {
                        return Err(CliError::Config(format!(
                            "figure presets only accept channel.kind=none (got `{value}`)"
                        )));
                    }
                }
                other => {
                    return Err(CliError::Config(format!(
                        "unknown figure override `{other}`"
                    )))
                }
            }
        }
        Ok(knobs)
    }

    fn grid(&self, start: f64, stop: f64, points: usize) -> Vec<f64> {
        let start = self.start.unwrap_or(start);
        let stop = self.stop.unwrap_or(stop);
        let points = self.points.unwrap_or(points).max(2);
        (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect()
    }

    fn channel(&self, members: Vec<ChannelKind>) -> CliResult<ChannelSpec> {
        if self.zero_channels {
            return Ok(ChannelSpec::identity());
        }
        ChannelSpec::composite(members).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn parse_f64(key: &str, value: &str) -> CliResult<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("override {key}: `{value}` is not a number")))
}

fn plus_state() -> QubitState {
    QubitState::from_theta(FRAC_PI_2)
}

fn inverse(tau_qsl: f64) -> f64 {
    if tau_qsl > 0.0 {
        1.0 / tau_qsl
    } else {
        f64::INFINITY
    }
}

pub fn validate_figure_id(id: &str) -> CliResult<()> {
    if FIGURE_IDS.contains(&id) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "unknown figure id `{id}` (valid: {})",
            FIGURE_IDS.join(", ")
        )))
    }
}

/// Runs one figure preset and returns its table.
pub fn run_figure(req: &FigureRequest) -> CliResult<Table> {
    let knobs = Knobs::from_request(req)?;
    match req.id.as_str() {
        "1a" | "1c" | "2a" | "2c" => damping_plus_dephasing(&req.id, &knobs, req.jobs),
        "1b" | "2b" => damping_plus_dephasing_zeta(&req.id, &knobs, req.jobs),
        "3a" | "3b" | "3c" => thermal_model(&req.id, &knobs, req.jobs),
        "4a" | "4b" => eternal_state_sweep(&req.id, &knobs, req.jobs),
        "4c" => eternal_tradeoff(&knobs, req.jobs),
        "5a" | "5b" => eternal_mixed(&req.id, &knobs, req.jobs),
        "6" => action_trace(&knobs),
        other => Err(CliError::Config(format!(
            "unknown figure id `{other}` (valid: {})",
            FIGURE_IDS.join(", ")
        ))),
    }
}

/// Dephasing partner of the amplitude-damping channel for figures 1 and 2:
/// strongly coupled vs Markovian telegraph noise, or Ornstein–Uhlenbeck vs
/// its Markovian limit.
fn partners(id: &str, kappa: f64) -> (ChannelKind, ChannelKind) {
    if id.starts_with('1') {
        (
            ChannelKind::Rtn {
                alpha: kappa,
                eta: kappa,
            },
            ChannelKind::Rtn {
                alpha: 0.1 * kappa,
                eta: kappa,
            },
        )
    } else {
        (
            ChannelKind::Oun {
                p: 0.1 * kappa,
                m: kappa,
            },
            ChannelKind::Moun { p: 0.1 },
        )
    }
}

fn partner_labels(id: &str) -> (&'static str, &'static str) {
    if id.starts_with('1') {
        ("nmrtn", "mrtn")
    } else {
        ("oun", "moun")
    }
}

fn damping_plus_dephasing(id: &str, knobs: &Knobs, jobs: usize) -> CliResult<Table> {
    let grid = knobs.grid(0.05, 3.0, 60);
    let tau = 1.0;
    let (label_a, label_b) = partner_labels(id);
    let with_mcl = id.ends_with('c');

    let rows = par_map_ordered(grid.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let kappa = grid[i];
        let (deph_a, deph_b) = partners(id, kappa);
        let nmad = ChannelKind::Nmad {
            kappa,
            l: 0.1 * kappa,
        };
        let ch_a = knobs.channel(vec![nmad, deph_a])?;
        let ch_b = knobs.channel(vec![nmad, deph_b])?;
        let qa = qsl_time_pure(&ch_a, &plus_state(), tau)?;
        let qb = qsl_time_pure(&ch_b, &plus_state(), tau)?;
        let mut row = vec![Value::Num(kappa * tau)];
        if with_mcl {
            let state = ch_a.evolve(&plus_state(), tau)?;
            row.push(Value::Num(state.tradeoff_mcl()));
        }
        row.push(Value::Num(qa.tau_qsl));
        row.push(Value::Num(qb.tau_qsl));
        Ok(row)
    });

    let mut table = if with_mcl {
        Table::new(&[
            "kappa_tau",
            "m_cl",
            &format!("tau_qsl_{label_a}"),
            &format!("tau_qsl_{label_b}"),
        ])
    } else {
        Table::new(&[
            "kappa_tau",
            &format!("tau_qsl_{label_a}"),
            &format!("tau_qsl_{label_b}"),
        ])
    };
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn damping_plus_dephasing_zeta(id: &str, knobs: &Knobs, jobs: usize) -> CliResult<Table> {
    // The strongly coupled telegraph channel develops a rate pole at
    // t ≈ 1.21/κ, so the figure-1 sweep stays below κτ ≈ 1.1 where the
    // horizon Τ = τ = 1 is pole-free.
    let (default_stop, default_points) = if id.starts_with('1') {
        (1.1, 40)
    } else {
        (3.0, 40)
    };
    let grid = knobs.grid(0.05, default_stop, default_points);
    let tau = 1.0;
    let (label_a, label_b) = partner_labels(id);
    let seed = knobs.seed;

    let rows = par_map_ordered(grid.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let kappa = grid[i];
        let (deph_a, deph_b) = partners(id, kappa);
        let nmad = ChannelKind::Nmad {
            kappa,
            l: 0.1 * kappa,
        };
        let mut row = vec![Value::Num(kappa * tau)];
        for deph in [deph_a, deph_b] {
            let ch = knobs.channel(vec![nmad, deph])?;
            let zeta = sss_zeta_seeded(&ch, tau, seed)?.zeta;
            let q = qsl_time_pure(&ch, &plus_state(), tau)?;
            row.push(Value::Num(zeta));
            row.push(Value::Num(q.tau_qsl));
            row.push(Value::Num(inverse(q.tau_qsl)));
        }
        Ok(row)
    });

    let mut table = Table::new(&[
        "kappa_tau",
        &format!("zeta_{label_a}"),
        &format!("tau_qsl_{label_a}"),
        &format!("inv_tau_qsl_{label_a}"),
        &format!("zeta_{label_b}"),
        &format!("tau_qsl_{label_b}"),
        &format!("inv_tau_qsl_{label_b}"),
    ]);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn thermal_model(id: &str, knobs: &Knobs, jobs: usize) -> CliResult<Table> {
    let grid = knobs.grid(0.05, 2.0, 40);
    let tau = 1.0;
    let temperatures = [0.0, 0.5];
    let with_zeta = id.ends_with('b');
    let with_mcl = id.ends_with('c');
    let seed = knobs.seed;

    let rows = par_map_ordered(grid.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let r = grid[i];
        let mut row = vec![Value::Num(r)];
        for temperature in temperatures {
            let ch = knobs.channel(vec![ChannelKind::Phenomenological {
                r,
                temperature,
                nu0: 1.0,
                s: 4.0,
                upsilon: 1.0,
                omega_c: 1.0,
                c0: 1.0,
            }])?;
            if with_zeta {
                row.push(Value::Num(sss_zeta_seeded(&ch, tau, seed)?.zeta));
            }
            if with_mcl {
                let state = ch.evolve(&plus_state(), tau)?;
                row.push(Value::Num(state.tradeoff_mcl()));
            }
            let q = qsl_time_pure(&ch, &plus_state(), tau)?;
            row.push(Value::Num(q.tau_qsl));
        }
        Ok(row)
    });

    let mut header: Vec<String> = vec!["R".into()];
    for label in ["t0", "t05"] {
        if with_zeta {
            header.push(format!("zeta_{label}"));
        }
        if with_mcl {
            header.push(format!("m_cl_{label}"));
        }
        header.push(format!("tau_qsl_{label}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header_refs);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn eternal_state_sweep(id: &str, knobs: &Knobs, jobs: usize) -> CliResult<Table> {
    let grid = knobs.grid(0.05, 3.0, 60);
    let splits: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let with_inverse = id.ends_with('b');

    let rows = par_map_ordered(grid.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let tau = grid[i];
        let ch = knobs.channel(vec![ChannelKind::Eternal { b: 0.5, nu: 1.0 }])?;
        let mut row = vec![Value::Num(tau)];
        for &r in &splits {
            let s0 = QubitState::from_r(r).map_err(CliError::from)?;
            let q = qsl_time_pure(&ch, &s0, tau)?;
            row.push(Value::Num(if with_inverse {
                inverse(q.tau_qsl)
            } else {
                q.tau_qsl / tau
            }));
        }
        Ok(row)
    });

    let prefix = if with_inverse {
        "inv_tau_qsl_r"
    } else {
        "qsl_ratio_r"
    };
    let mut header: Vec<String> = vec!["tau".into()];
    for &r in &splits {
        header.push(format!("{prefix}{r:.1}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header_refs);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn eternal_tradeoff(knobs: &Knobs, jobs: usize) -> CliResult<Table> {
    let grid = knobs.grid(0.05, 10.0, 100);
    let rows = par_map_ordered(grid.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let tau = grid[i];
        let ch = knobs.channel(vec![ChannelKind::Eternal { b: 0.5, nu: 1.0 }])?;
        let state = ch.evolve(&plus_state(), tau)?;
        let q = qsl_time_pure(&ch, &plus_state(), tau)?;
        Ok(vec![
            Value::Num(tau),
            Value::Num(state.tradeoff_mcl()),
            Value::Num(q.tau_qsl),
        ])
    });
    let mut table = Table::new(&["tau", "m_cl", "tau_qsl"]);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn eternal_mixed(id: &str, knobs: &Knobs, jobs: usize) -> CliResult<Table> {
    let with_zeta = id.ends_with('b');
    let grid = if with_zeta {
        knobs.grid(0.05, 3.0, 40)
    } else {
        knobs.grid(0.0, 3.0, 40)
    };
    let tau_d = 2.0;
    let seed = knobs.seed;

    let rows = par_map_ordered(grid.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let tau = grid[i];
        let ch = knobs.channel(vec![ChannelKind::Eternal { b: 0.5, nu: 1.0 }])?;
        let bloch = BlochVector::new(0.2, 0.2, 0.2).map_err(CliError::from)?;
        let rho0 = QubitState::from_bloch(bloch).map_err(CliError::from)?;
        let s_tau = ch.evolve(&rho0, tau)?;
        let q = qsl_time_mixed(&ch, &s_tau, tau, tau_d)?;
        let mut row = vec![Value::Num(tau)];
        if with_zeta {
            row.push(Value::Num(sss_zeta_seeded(&ch, tau, seed)?.zeta));
        }
        row.push(Value::Num(q.tau_qsl));
        Ok(row)
    });

    let mut table = if with_zeta {
        Table::new(&["tau", "zeta", "tau_qsl"])
    } else {
        Table::new(&["tau", "tau_qsl"])
    };
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn action_trace(knobs: &Knobs) -> CliResult<Table> {
    // Balanced rates and an endpoint matching the physical damping
    // coordinate q(τ) = 1 - e^{-(γ+Γ)τ/2}, so the optimized action ratio
    // saturates against the squared geometric ratio.
    let (gain, loss, tau) = (1.0f64, 1.0f64, 1.0f64);
    let theta = FRAC_PI_4;
    let q_f = 1.0 - (-0.5 * (gain + loss) * tau).exp();
    let segments = knobs.points.unwrap_or(256).max(phasecov::action::MIN_SEGMENTS);

    let p = ActionParams::new(theta, gain, loss, tau, q_f).map_err(CliError::from)?;
    let init = ControlPath::linear(tau, q_f, segments).map_err(CliError::from)?;
    let report = optimize_path(&p, &init, 500, 0.5).map_err(CliError::from)?;
    let bound = cauchy_schwarz_bound(&p);

    let channel = if knobs.zero_channels {
        ChannelSpec::identity()
    } else {
        ChannelSpec::gad(gain, loss).map_err(CliError::from)?
    };
    let rho0 = QubitState::from_theta(2.0 * theta);
    let rho_tau = channel.evolve(&rho0, tau)?;
    let bures = bures_angle_pure(&rho0, &rho_tau).map_err(CliError::from)?;
    let sin4 = bures.sin().powi(4);
    let geometric = qsl_time_pure(&channel, &rho0, tau)?;
    let geometric_sq = (geometric.tau_qsl / tau).powi(2);

    let _ = action_functional(&report.path, &p)?;

    let mut table = Table::new(&[
        "iteration",
        "action",
        "cs_bound",
        "action_qsl_ratio",
        "geometric_ratio_sq",
    ]);
    for (i, &action) in report.trace.iter().enumerate() {
        let ratio = if action > 0.0 {
            sin4 / action / tau
        } else {
            f64::INFINITY
        };
        table.push(vec![
            Value::Int(i as u64),
            Value::Num(action),
            Value::Num(bound),
            Value::Num(ratio),
            Value::Num(geometric_sq),
        ]);
    }
    Ok(table)
}
