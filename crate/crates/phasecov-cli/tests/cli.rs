//! End-to-end tests of the binary: figure presets, scenario sweeps,
//! determinism, overrides and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_phasecov")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(binary())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phasecov-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Self {
        let text = std::fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let header = lines
            .next()
            .unwrap()
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Self { header, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header));
        self.rows
            .iter()
            .map(|r| {
                let cell = &r[idx];
                match cell.as_str() {
                    "inf" => f64::INFINITY,
                    "-inf" => f64::NEG_INFINITY,
                    _ => cell.parse().unwrap(),
                }
            })
            .collect()
    }
}

#[test]
fn tradeoff_figure_settles_at_three_quarters() {
    let dir = temp_dir("fig4c");
    let out = run(&["figure", "4c", "--out", "fig.csv", "--jobs", "2"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("fig.csv"));
    let m_cl = csv.column("m_cl");
    assert!((m_cl.last().unwrap() - 0.75).abs() < 1e-6);
}

#[test]
fn zeroed_channels_freeze_the_bound() {
    let dir = temp_dir("zero");
    let out = run(
        &[
            "figure",
            "1a",
            "--override",
            "channel.kind=none",
            "--out",
            "fig.csv",
        ],
        &dir,
    );
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("fig.csv"));
    for name in ["tau_qsl_nmrtn", "tau_qsl_mrtn"] {
        assert!(csv.column(name).iter().all(|&v| v == 0.0));
    }
}

#[test]
fn action_figure_saturates_the_bound() {
    let dir = temp_dir("fig6");
    let out = run(&["figure", "6", "--out", "fig.csv"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("fig.csv"));
    let action = csv.column("action");
    let bound = csv.column("cs_bound");
    let last = action.last().unwrap();
    assert!((last - bound[0]).abs() <= 0.005 * bound[0]);
    // The trace never increases.
    for w in action.windows(2) {
        assert!(w[1] <= w[0] + 1e-15);
    }
    // Optimization drives the action ratio onto the squared geometric one.
    let ratio = csv.column("action_qsl_ratio");
    let geom = csv.column("geometric_ratio_sq");
    assert!((ratio.last().unwrap() - geom[0]).abs() <= 0.01 * geom[0]);
}

#[test]
fn identical_seed_gives_byte_identical_output() {
    let dir = temp_dir("determinism");
    for name in ["a.csv", "b.csv"] {
        let out = run(
            &["figure", "5b", "--seed", "7", "--points", "8", "--out", name],
            &dir,
        );
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn identity_scenario_repeats_the_state_row() {
    let dir = temp_dir("identity");
    std::fs::write(
        dir.join("id.conf"),
        "channel.kind = none\nstate.theta = 0.9\ngrid.start = 0.0\ngrid.stop = 5.0\ngrid.points = 2\n",
    )
    .unwrap();
    let out = run(&["run", "id.conf", "--out", "id.csv"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("id.csv"));
    assert_eq!(csv.rows.len(), 2);
    // All state columns identical between the two rows.
    for name in ["p1", "alpha_abs", "purity", "c_l1", "m_l", "m_cl", "tau_qsl"] {
        let col = csv.column(name);
        assert_eq!(col[0], col[1], "column {name}");
    }
}

#[test]
fn eternal_scenario_tradeoff_limit() {
    let dir = temp_dir("eternal");
    std::fs::write(
        dir.join("et.conf"),
        "channel.kind = eternal\nchannel.b = 0.5\nchannel.nu = 1.0\nstate.theta = 1.5707963267948966\ngrid.start = 0.0\ngrid.stop = 10.0\ngrid.points = 30\n",
    )
    .unwrap();
    let out = run(&["run", "et.conf", "--out", "et.csv", "--jobs", "4"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("et.csv"));
    let m_cl = csv.column("m_cl");
    assert!((m_cl.last().unwrap() - 0.75).abs() < 1e-6);
    // Trade-off stays within its bound along the whole sweep.
    assert!(m_cl.iter().all(|&v| v <= 1.0 + 1e-12));
}

#[test]
fn strongly_non_markovian_dephasing_wiggles() {
    let dir = temp_dir("wiggle");
    std::fs::write(
        dir.join("w.conf"),
        "channel.kind = nmad+rtn\nnmad.kappa = 1.0\nnmad.l = 0.1\nrtn.alpha = 1.0\nrtn.eta = 0.1\nstate.theta = 1.5707963267948966\ngrid.start = 0.1\ngrid.stop = 12.0\ngrid.points = 120\n",
    )
    .unwrap();
    let out = run(&["run", "w.conf", "--out", "w.csv", "--jobs", "4"], &dir);
    assert!(out.status.success(), "{out:?}");
    let series = Csv::read(&dir.join("w.csv")).column("tau_qsl");
    let mut flips = 0;
    let mut prev = 0.0f64;
    for w in series.windows(2) {
        let slope = w[1] - w[0];
        if slope * prev < 0.0 {
            flips += 1;
        }
        if slope != 0.0 {
            prev = slope;
        }
    }
    assert!(flips >= 3, "expected at least 3 wiggles, got {flips}");
}

#[test]
fn zeta_sweep_matches_closed_form() {
    let dir = temp_dir("zeta");
    std::fs::write(
        dir.join("z.conf"),
        "channel.kind = eternal\nchannel.b = 0.5\nchannel.nu = 1.0\ngrid.start = 0.5\ngrid.stop = 2.0\ngrid.points = 4\n",
    )
    .unwrap();
    let out = run(&["zeta", "z.conf", "--out", "z.csv"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("z.csv"));
    let horizons = csv.column("horizon");
    let zetas = csv.column("zeta");
    for (t, z) in horizons.iter().zip(&zetas) {
        let closed = ((1.25 + 0.75 * (2.0 * t).cosh()) / 2.0).ln() / t;
        assert!((z - closed).abs() < 1e-4, "T={t}: {z} vs {closed}");
    }
    assert!(csv.column("converged").iter().all(|&c| c == 1.0));
}

#[test]
fn action_subcommand_converges() {
    let dir = temp_dir("action");
    std::fs::write(
        dir.join("a.conf"),
        "action.theta = 0.7853981633974483\naction.gain = 1.0\naction.loss = 1.0\naction.tau = 1.0\naction.qf = 0.75\naction.segments = 256\n",
    )
    .unwrap();
    let out = run(&["action", "a.conf", "--out", "a.csv"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = Csv::read(&dir.join("a.csv"));
    let action = csv.column("action");
    let bound = csv.column("cs_bound")[0];
    assert!((bound - 0.0625).abs() < 1e-10);
    assert!((action.last().unwrap() - bound).abs() <= 0.005 * bound);

    // The path snapshot sits next to the trace, pinned at its endpoints.
    let snapshot = Csv::read(&dir.join("a_path.csv"));
    let q_opt = snapshot.column("q_opt");
    assert_eq!(q_opt.len(), 257);
    assert_eq!(q_opt[0], 0.0);
    assert!((q_opt.last().unwrap() - 0.75).abs() < 1e-12);
    for w in q_opt.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
}

#[test]
fn dry_run_round_trips_the_config() {
    let dir = temp_dir("roundtrip");
    let original = "channel.kind = nmad+oun\nnmad.kappa = 1.0\nnmad.l = 0.1\noun.p = 0.1\noun.m = 1.0\nstate.bloch_x = 0.2\nstate.bloch_y = 0.2\nstate.bloch_z = 0.2\ngrid.start = 0.0\ngrid.stop = 2.0\ngrid.points = 5\n";
    std::fs::write(dir.join("s.conf"), original).unwrap();
    let first = run(&["run", "s.conf", "--dry-run"], &dir);
    assert!(first.status.success(), "{first:?}");
    let canonical = String::from_utf8(first.stdout).unwrap();
    std::fs::write(dir.join("canon.conf"), &canonical).unwrap();
    let second = run(&["run", "canon.conf", "--dry-run"], &dir);
    assert!(second.status.success(), "{second:?}");
    assert_eq!(canonical, String::from_utf8(second.stdout).unwrap());
}

#[test]
fn config_errors_exit_with_code_one() {
    let dir = temp_dir("exitcodes");
    std::fs::write(dir.join("bad.conf"), "channel.kind = eternal\nwhat\n").unwrap();
    let out = run(&["run", "bad.conf"], &dir);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["figure", "9z"], &dir);
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(
        dir.join("unknown.conf"),
        "channel.kind = eternal\nchannel.b = 0.5\nchannel.nu = 1\nstate.theta = 1\ngrid.start = 0\ngrid.stop = 1\ngrid.points = 2\nmystery.key = 3\n",
    )
    .unwrap();
    let out = run(&["run", dir.join("unknown.conf").to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_code_two() {
    let dir = temp_dir("numeric");
    // Telegraph dephasing has a rate pole near t = 1.21 for these
    // parameters, so a memory horizon beyond it must fail numerically.
    std::fs::write(
        dir.join("pole.conf"),
        "channel.kind = rtn\nchannel.alpha = 1.0\nchannel.eta = 1.0\ngrid.start = 0.5\ngrid.stop = 3.0\ngrid.points = 4\n",
    )
    .unwrap();
    let out = run(&["zeta", "pole.conf", "--out", "p.csv"], &dir);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
