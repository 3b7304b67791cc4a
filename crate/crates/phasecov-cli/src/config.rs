//! Flat key = value configuration files, one scenario per file.
//!
//! Keys use dotted sections (`channel.kind`, `state.theta`, `grid.points`).
//! Lines starting with `#` and blank lines are skipped. Parse errors carry
//! the offending line or key.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use phasecov::channels::{ChannelKind, ChannelSpec};

/// CLI failure modes; `Config` maps to exit code 1, `Numeric` to 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<phasecov::Error> for CliError {
    fn from(e: phasecov::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Parsed key-value file with line numbers for diagnostics.
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return config_err(format!("line {line_no}: expected `key = value`"));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return config_err(format!("line {line_no}: empty key"));
            }
            if let Some((first, _)) = entries.insert(key.clone(), (line_no, value)) {
                return config_err(format!(
                    "line {line_no}: duplicate key `{key}` (first set on line {first})"
                ));
            }
        }
        Ok(Self { entries })
    }

    /// Applies `key=value` override strings on top of the file contents.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> CliResult<()> {
        for item in overrides {
            let Some((key, value)) = item.split_once('=') else {
                return config_err(format!("override `{item}`: expected key=value"));
            };
            self.entries
                .insert(key.trim().to_string(), (0, value.trim().to_string()));
        }
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn take_f64(&mut self, key: &str) -> CliResult<Option<f64>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<f64>().map(Some).map_err(|_| {
                CliError::Config(format!("line {line}: field `{key}`: `{v}` is not a number"))
            }),
        }
    }

    fn need_f64(&mut self, key: &str) -> CliResult<f64> {
        self.take_f64(key)?
            .ok_or_else(|| CliError::Config(format!("missing required field `{key}`")))
    }

    fn take_usize(&mut self, key: &str) -> CliResult<Option<usize>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<usize>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "line {line}: field `{key}`: `{v}` is not a non-negative integer"
                ))
            }),
        }
    }

    fn take_u64(&mut self, key: &str) -> CliResult<Option<u64>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<u64>().map(Some).map_err(|_| {
                CliError::Config(format!("line {line}: field `{key}`: `{v}` is not an integer"))
            }),
        }
    }

    fn take_bool(&mut self, key: &str) -> CliResult<Option<bool>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => match v.as_str() {
                "true" | "yes" | "1" => Ok(Some(true)),
                "false" | "no" | "0" => Ok(Some(false)),
                _ => config_err(format!("line {line}: field `{key}`: `{v}` is not a boolean")),
            },
        }
    }

    fn finish(self) -> CliResult<()> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return config_err(format!("line {line}: unknown key `{key}`"));
        }
        Ok(())
    }
}

/// Initial-state specification: exactly one of angle, excitation split or
/// Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Theta(f64),
    Excitation(f64),
    Bloch(f64, f64, f64),
}

impl StateSpec {
    pub fn build(&self) -> CliResult<phasecov::state::QubitState> {
        use phasecov::state::{BlochVector, QubitState};
        match *self {
            StateSpec::Theta(theta) => Ok(QubitState::from_theta(theta)),
            StateSpec::Excitation(r) => {
                QubitState::from_r(r).map_err(|e| CliError::Config(e.to_string()))
            }
            StateSpec::Bloch(x, y, z) => {
                let v = BlochVector::new(x, y, z).map_err(|e| CliError::Config(e.to_string()))?;
                QubitState::from_bloch(v).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

/// Uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.stop > self.start) {
            return config_err(format!(
                "grid must be strictly increasing (start {}, stop {})",
                self.start, self.stop
            ));
        }
        if self.points < 2 {
            return config_err(format!("grid needs at least 2 points (got {})", self.points));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| {
                self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64
            })
            .collect()
    }
}

/// A sweep over one channel, one initial state and a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: ChannelSpec,
    pub state: StateSpec,
    pub grid: Grid,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub zeta: bool,
}

/// Action-optimizer run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionConfig {
    pub theta: f64,
    pub gain: f64,
    pub loss: f64,
    pub tau: f64,
    pub q_f: f64,
    pub segments: usize,
    pub steps: usize,
    pub rate: f64,
    pub output: Option<PathBuf>,
}

/// Self-similarity sweep configuration: the grid runs over horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaConfig {
    pub channel: ChannelSpec,
    pub grid: Grid,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
}

fn parse_member(raw: &mut RawConfig, kind: &str, prefix: &str) -> CliResult<ChannelKind> {
    let need = |raw: &mut RawConfig, field: &str| raw.need_f64(&format!("{prefix}.{field}"));
    let kind = match kind {
        "nmad" => ChannelKind::Nmad {
            kappa: need(raw, "kappa")?,
            l: need(raw, "l")?,
        },
        "rtn" => ChannelKind::Rtn {
            alpha: need(raw, "alpha")?,
            eta: need(raw, "eta")?,
        },
        "oun" => ChannelKind::Oun {
            p: need(raw, "p")?,
            m: need(raw, "m")?,
        },
        "moun" => ChannelKind::Moun { p: need(raw, "p")? },
        "phenomenological" => ChannelKind::Phenomenological {
            r: need(raw, "r")?,
            temperature: raw.take_f64(&format!("{prefix}.temperature"))?.unwrap_or(0.0),
            nu0: raw.take_f64(&format!("{prefix}.nu0"))?.unwrap_or(1.0),
            s: need(raw, "s")?,
            upsilon: need(raw, "upsilon")?,
            omega_c: need(raw, "omega_c")?,
            c0: raw.take_f64(&format!("{prefix}.c0"))?.unwrap_or(1.0),
        },
        "eternal" => ChannelKind::Eternal {
            b: need(raw, "b")?,
            nu: need(raw, "nu")?,
        },
        "gad" => ChannelKind::Gad {
            gain: need(raw, "gain")?,
            loss: need(raw, "loss")?,
        },
        other => return config_err(format!("unknown channel kind `{other}`")),
    };
    Ok(kind)
}

/// Builds a channel from `channel.kind` plus its parameter keys. Composite
/// channels list member kinds joined by `+`, with member parameters
/// namespaced by kind (`nmad.kappa`, `rtn.alpha`, ...).
pub fn parse_channel(raw: &mut RawConfig) -> CliResult<ChannelSpec> {
    let Some(kind) = raw.take("channel.kind") else {
        return config_err("missing required field `channel.kind`");
    };
    let omega = raw.take_f64("channel.omega")?.unwrap_or(0.0);
    let spec = if kind == "none" {
        ChannelSpec::identity()
    } else if kind.contains('+') {
        let mut members = Vec::new();
        for member in kind.split('+') {
            members.push(parse_member(raw, member.trim(), member.trim())?);
        }
        ChannelSpec::composite(members).map_err(|e| CliError::Config(e.to_string()))?
    } else {
        let member = parse_member(raw, kind.as_str(), "channel")?;
        ChannelSpec::composite(vec![member]).map_err(|e| CliError::Config(e.to_string()))?
    };
    Ok(spec.with_omega(omega))
}

fn parse_state(raw: &mut RawConfig) -> CliResult<StateSpec> {
    let theta = raw.take_f64("state.theta")?;
    let r = raw.take_f64("state.r")?;
    let bx = raw.take_f64("state.bloch_x")?;
    let by = raw.take_f64("state.bloch_y")?;
    let bz = raw.take_f64("state.bloch_z")?;
    match (theta, r, bx.or(by).or(bz)) {
        (Some(t), None, None) => Ok(StateSpec::Theta(t)),
        (None, Some(r), None) => Ok(StateSpec::Excitation(r)),
        (None, None, Some(_)) => Ok(StateSpec::Bloch(
            bx.unwrap_or(0.0),
            by.unwrap_or(0.0),
            bz.unwrap_or(0.0),
        )),
        (None, None, None) => config_err(
            "missing initial state: set state.theta, state.r or state.bloch_{x,y,z}",
        ),
        _ => config_err("set exactly one of state.theta, state.r or state.bloch_{x,y,z}"),
    }
}

fn parse_grid(raw: &mut RawConfig) -> CliResult<Grid> {
    let grid = Grid {
        start: raw.need_f64("grid.start")?,
        stop: raw.need_f64("grid.stop")?,
        points: raw
            .take_usize("grid.points")?
            .ok_or_else(|| CliError::Config("missing required field `grid.points`".into()))?,
    };
    grid.validate()?;
    Ok(grid)
}

impl Scenario {
    pub fn from_config(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut raw = RawConfig::parse(text)?;
        raw.apply_overrides(overrides)?;
        let channel = parse_channel(&mut raw)?;
        let state = parse_state(&mut raw)?;
        let grid = parse_grid(&mut raw)?;
        let output = raw.take("output").map(PathBuf::from);
        let jobs = raw.take_usize("jobs")?;
        let seed = raw.take_u64("seed")?.unwrap_or(0);
        let zeta = raw.take_bool("compute.zeta")?.unwrap_or(false);
        raw.finish()?;
        Ok(Self {
            channel,
            state,
            grid,
            output,
            jobs,
            seed,
            zeta,
        })
    }

    /// Canonical config text; parsing it back yields an equal scenario.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let members = self.channel.members();
        if members.is_empty() {
            out.push_str("channel.kind = none\n");
        } else {
            let kinds: Vec<&str> = members.iter().map(member_kind_name).collect();
            let _ = writeln!(out, "channel.kind = {}", kinds.join("+"));
            let composite = members.len() > 1;
            for member in members {
                let prefix = if composite {
                    member_kind_name(member)
                } else {
                    "channel"
                };
                write_member_params(&mut out, prefix, member);
            }
        }
        if self.channel.omega() != 0.0 {
            let _ = writeln!(out, "channel.omega = {}", fmt_full(self.channel.omega()));
        }
        match self.state {
            StateSpec::Theta(t) => {
                let _ = writeln!(out, "state.theta = {}", fmt_full(t));
            }
            StateSpec::Excitation(r) => {
                let _ = writeln!(out, "state.r = {}", fmt_full(r));
            }
            StateSpec::Bloch(x, y, z) => {
                let _ = writeln!(out, "state.bloch_x = {}", fmt_full(x));
                let _ = writeln!(out, "state.bloch_y = {}", fmt_full(y));
                let _ = writeln!(out, "state.bloch_z = {}", fmt_full(z));
            }
        }
        let _ = writeln!(out, "grid.start = {}", fmt_full(self.grid.start));
        let _ = writeln!(out, "grid.stop = {}", fmt_full(self.grid.stop));
        let _ = writeln!(out, "grid.points = {}", self.grid.points);
        if let Some(path) = &self.output {
            let _ = writeln!(out, "output = {}", path.display());
        }
        if let Some(jobs) = self.jobs {
            let _ = writeln!(out, "jobs = {jobs}");
        }
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "compute.zeta = {}", self.zeta);
        out
    }
}

impl ActionConfig {
    pub fn from_config(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut raw = RawConfig::parse(text)?;
        raw.apply_overrides(overrides)?;
        let config = Self {
            theta: raw.need_f64("action.theta")?,
            gain: raw.need_f64("action.gain")?,
            loss: raw.need_f64("action.loss")?,
            tau: raw.take_f64("action.tau")?.unwrap_or(1.0),
            q_f: raw.take_f64("action.qf")?.unwrap_or(0.75),
            segments: raw.take_usize("action.segments")?.unwrap_or(256),
            steps: raw.take_usize("action.steps")?.unwrap_or(500),
            rate: raw.take_f64("action.rate")?.unwrap_or(0.5),
            output: raw.take("output").map(PathBuf::from),
        };
        raw.finish()?;
        Ok(config)
    }
}

impl ZetaConfig {
    pub fn from_config(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut raw = RawConfig::parse(text)?;
        raw.apply_overrides(overrides)?;
        let channel = parse_channel(&mut raw)?;
        let grid = parse_grid(&mut raw)?;
        let seed = raw.take_u64("seed")?.unwrap_or(0);
        let jobs = raw.take_usize("jobs")?;
        let output = raw.take("output").map(PathBuf::from);
        raw.finish()?;
        if grid.start <= 0.0 {
            return config_err("zeta horizons must be positive (grid.start > 0)");
        }
        Ok(Self {
            channel,
            grid,
            seed,
            jobs,
            output,
        })
    }
}

fn member_kind_name(member: &ChannelKind) -> &'static str {
    match member {
        ChannelKind::Nmad { .. } => "nmad",
        ChannelKind::Rtn { .. } => "rtn",
        ChannelKind::Oun { .. } => "oun",
        ChannelKind::Moun { .. } => "moun",
        ChannelKind::Phenomenological { .. } => "phenomenological",
        ChannelKind::Eternal { .. } => "eternal",
        ChannelKind::Gad { .. } => "gad",
    }
}

fn write_member_params(out: &mut String, prefix: &str, member: &ChannelKind) {
    match *member {
        ChannelKind::Nmad { kappa, l } => {
            let _ = writeln!(out, "{prefix}.kappa = {}", fmt_full(kappa));
            let _ = writeln!(out, "{prefix}.l = {}", fmt_full(l));
        }
        ChannelKind::Rtn { alpha, eta } => {
            let _ = writeln!(out, "{prefix}.alpha = {}", fmt_full(alpha));
            let _ = writeln!(out, "{prefix}.eta = {}", fmt_full(eta));
        }
        ChannelKind::Oun { p, m } => {
            let _ = writeln!(out, "{prefix}.p = {}", fmt_full(p));
            let _ = writeln!(out, "{prefix}.m = {}", fmt_full(m));
        }
        ChannelKind::Moun { p } => {
            let _ = writeln!(out, "{prefix}.p = {}", fmt_full(p));
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
            let _ = writeln!(out, "{prefix}.r = {}", fmt_full(r));
            let _ = writeln!(out, "{prefix}.temperature = {}", fmt_full(temperature));
            let _ = writeln!(out, "{prefix}.nu0 = {}", fmt_full(nu0));
            let _ = writeln!(out, "{prefix}.s = {}", fmt_full(s));
            let _ = writeln!(out, "{prefix}.upsilon = {}", fmt_full(upsilon));
            let _ = writeln!(out, "{prefix}.omega_c = {}", fmt_full(omega_c));
            let _ = writeln!(out, "{prefix}.c0 = {}", fmt_full(c0));
        }
        ChannelKind::Eternal { b, nu } => {
            let _ = writeln!(out, "{prefix}.b = {}", fmt_full(b));
            let _ = writeln!(out, "{prefix}.nu = {}", fmt_full(nu));
        }
        ChannelKind::Gad { gain, loss } => {
            let _ = writeln!(out, "{prefix}.gain = {}", fmt_full(gain));
            let _ = writeln!(out, "{prefix}.loss = {}", fmt_full(loss));
        }
    }
}

/// Round-trip exact float formatting for config emission.
fn fmt_full(x: f64) -> String {
    let short = format!("{x}");
    if short.parse::<f64>() == Ok(x) {
        short
    } else {
        format!("{x:e}")
    }
}
