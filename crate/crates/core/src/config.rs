//! Line-oriented run configuration: `section.key = value`, `#` comments.
//!
//! Every known key has a default (or is required for some command), so the
//! fully resolved configuration can be echoed into the run manifest. The
//! command is taken from `command = …` (or `run.command`), or inferred from
//! the sections that appear.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::counterexample::CounterexampleParams;
use crate::dyadic::NormFamily;
use crate::error::{Result, ZkbError};
use crate::grid::{GridSpec, DEFAULT_DEALIAS};
use crate::lab::{EnsembleConfig, Spectrum};
use crate::solver::{Mode, Scheme, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Norm,
    Verify,
    Counterexample,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Norm => "norm",
            Command::Verify => "verify",
            Command::Counterexample => "counterexample",
        }
    }
}

impl FromStr for Command {
    type Err = ZkbError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "solve" => Command::Solve,
            "norm" => Command::Norm,
            "verify" => Command::Verify,
            "counterexample" => Command::Counterexample,
            _ => return Err(ZkbError::param(format!("unknown command `{s}`"))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Known keys and their defaults; `None` marks keys without a default.
const KEYS: &[(&str, Option<&str>)] = &[
    ("run.seed", Some("0")),
    ("run.output_dir", Some("zkb-out")),
    ("run.threads", Some("0")),
    ("grid.nx", Some("64")),
    ("grid.ny", None),
    ("grid.lx", Some("64pi")),
    ("grid.ly", None),
    ("grid.dealias", None),
    ("solver.dt", None),
    ("solver.t_end", None),
    ("solver.mode", Some("zkb_symmetric")),
    ("solver.scheme", Some("etdrk4")),
    ("solver.snapshot_stride", Some("0")),
    ("solver.nonlinear", Some("true")),
    ("solver.sobolev_s", Some("1")),
    ("init.profile", Some("gaussian")),
    ("init.amplitude", Some("1")),
    ("init.width", Some("4")),
    ("init.x0", Some("0")),
    ("init.y0", Some("0")),
    ("init.file", Some("")),
    ("norm.family", Some("hs")),
    ("norm.s", Some("0")),
    ("norm.b", Some("0.5")),
    ("norm.window", Some("4")),
    ("norm.nt", Some("256")),
    ("lab.estimate", Some("linear")),
    ("lab.count", Some("100")),
    ("lab.spectrum", Some("gaussian_decay")),
    ("lab.s", Some("0")),
    ("lab.b", Some("0.5")),
    ("lab.delta", Some("0.05")),
    ("lab.epsilon", Some("0.05")),
    ("lab.shells", Some("0,1,2,3,4,5,6")),
    ("lab.atoms", Some("12")),
    ("lab.l_floor", Some("-2")),
    ("lab.dissipation_sign", Some("1")),
    ("lab.p", Some("5")),
    ("lab.q", Some("5")),
    ("lab.k", Some("9")),
    ("lab.n1", Some("5")),
    ("lab.n2", Some("2")),
    ("lab.l1", Some("3")),
    ("lab.l2", Some("3")),
    ("lab.k_sweep", Some("8,9,10,11")),
    ("lab.widths", Some("0.5,0.25,0.125")),
    ("counterexample.s", Some("0")),
    ("counterexample.nmin", Some("4")),
    ("counterexample.nmax", Some("8")),
    ("counterexample.quad", Some("64")),
    ("counterexample.t", Some("1")),
    ("counterexample.ablation", Some("false")),
];

/// Keys that may be written without a section.
const BARE: &[&str] = &["command", "seed", "output_dir", "threads"];

/// Where a value came from; line `0` means default or command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Every known key, resolved.
    pub values: BTreeMap<String, Setting>,
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

fn config_err(line: usize, msg: impl Into<String>) -> ZkbError {
    ZkbError::Config { line, msg: msg.into() }
}

/// Splits the text into entries, rejecting malformed lines, unknown and
/// duplicate keys.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected `section.key = value`, got `{content}`")))?;
        let key = normalize_key(k.trim()).ok_or_else(|| config_err(line, format!("unknown key `{}`", k.trim())))?;
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(config_err(
                line,
                format!("duplicate key `{key}` (first set on line {})", prev.line),
            ));
        }
        out.push(Entry {
            line,
            key,
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

fn normalize_key(k: &str) -> Option<String> {
    if k == "command" || k == "run.command" {
        return Some("command".into());
    }
    if BARE.contains(&k) {
        return Some(format!("run.{k}"));
    }
    KEYS.iter().any(|(name, _)| *name == k).then(|| k.to_string())
}

/// Parses a complete configuration; the command must be given or inferable.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::from_entries(parse_entries(text)?, None)
}

fn infer_command(entries: &[Entry]) -> Option<Command> {
    let has = |s: &str| entries.iter().any(|e| e.key.starts_with(s));
    if has("solver.") {
        Some(Command::Solve)
    } else if has("lab.") {
        Some(Command::Verify)
    } else if has("counterexample.") {
        Some(Command::Counterexample)
    } else if has("norm.") {
        Some(Command::Norm)
    } else {
        None
    }
}

impl RunConfig {
    /// Resolves entries against the defaults. `command` (from the command
    /// line) must agree with a `command` entry if both are present.
    pub fn from_entries(entries: Vec<Entry>, command: Option<Command>) -> Result<Self> {
        let given = entries.iter().find(|e| e.key == "command");
        let command = match (given, command) {
            (Some(e), Some(c)) => {
                let g: Command = e
                    .value
                    .parse()
                    .map_err(|err: ZkbError| config_err(e.line, err.to_string()))?;
                if g != c {
                    return Err(config_err(
                        e.line,
                        format!("config is for `{g}` but `{c}` was requested"),
                    ));
                }
                c
            }
            (Some(e), None) => e
                .value
                .parse()
                .map_err(|err: ZkbError| config_err(e.line, err.to_string()))?,
            (None, Some(c)) => c,
            (None, None) => infer_command(&entries).ok_or_else(|| config_err(0, "missing command"))?,
        };
        let mut values: BTreeMap<String, Setting> = BTreeMap::new();
        for (k, d) in KEYS {
            if let Some(d) = d {
                values.insert(
                    k.to_string(),
                    Setting {
                        value: d.to_string(),
                        line: 0,
                    },
                );
            }
        }
        for e in entries.into_iter().filter(|e| e.key != "command") {
            values.insert(
                e.key,
                Setting {
                    value: e.value,
                    line: e.line,
                },
            );
        }
        // dependent defaults
        for (k, from) in [("grid.ny", "grid.nx"), ("grid.ly", "grid.lx")] {
            if !values.contains_key(k) {
                let v = values[from].clone();
                values.insert(
                    k.into(),
                    Setting {
                        value: v.value,
                        line: 0,
                    },
                );
            }
        }
        values.entry("grid.dealias".into()).or_insert(Setting {
            value: format!("{DEFAULT_DEALIAS:?}"),
            line: 0,
        });
        let cfg = RunConfig { command, values };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides (or adds) a value, e.g. from a command-line flag.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = normalize_key(key).ok_or_else(|| ZkbError::param(format!("unknown key `{key}`")))?;
        self.values.insert(
            key,
            Setting {
                value: value.into(),
                line: 0,
            },
        );
        self.validate()
    }

    fn setting(&self, key: &str) -> Result<&Setting> {
        self.values
            .get(key)
            .ok_or_else(|| config_err(0, format!("missing required key `{key}` for `{}`", self.command)))
    }

    fn typed<T: FromStr>(&self, key: &str, what: &str) -> Result<T> {
        let s = self.setting(key)?;
        s.value
            .parse()
            .map_err(|_| config_err(s.line, format!("`{key}` expects {what}, got `{}`", s.value)))
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        Ok(&self.setting(key)?.value)
    }

    /// Reals, also accepting a `pi` suffix (`64pi`, `0.5*pi`).
    pub fn f64(&self, key: &str) -> Result<f64> {
        let s = self.setting(key)?;
        parse_real(&s.value).ok_or_else(|| config_err(s.line, format!("`{key}` expects a number, got `{}`", s.value)))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.typed(key, "a non-negative integer")
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.typed(key, "a non-negative integer")
    }

    pub fn i32(&self, key: &str) -> Result<i32> {
        self.typed(key, "an integer")
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        self.typed(key, "`true` or `false`")
    }

    pub fn i32_list(&self, key: &str) -> Result<Vec<i32>> {
        let s = self.setting(key)?;
        s.value
            .split(',')
            .map(|x| x.trim().parse::<i32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| config_err(s.line, format!("`{key}` expects a comma-separated list of integers")))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let s = self.setting(key)?;
        s.value
            .split(',')
            .map(|x| parse_real(x.trim()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| config_err(s.line, format!("`{key}` expects a comma-separated list of numbers")))
    }

    fn line_of(&self, key: &str) -> usize {
        self.values.get(key).map_or(0, |s| s.line)
    }

    /// A constraint violation on `key`, reported at its line.
    fn constraint(&self, key: &str, msg: &str) -> ZkbError {
        let v = self.values.get(key).map_or("", |s| s.value.as_str());
        config_err(self.line_of(key), format!("`{key} = {v}`: {msg}"))
    }

    pub fn seed(&self) -> Result<u64> {
        self.u64("run.seed")
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let (nx, ny) = (self.usize("grid.nx")?, self.usize("grid.ny")?);
        let (lx, ly) = (self.f64("grid.lx")?, self.f64("grid.ly")?);
        let dealias = self.f64("grid.dealias")?;
        GridSpec::with_dealias(nx, ny, lx, ly, dealias).map_err(|e| {
            let key = if !(nx >= 16 && nx.is_power_of_two()) {
                "grid.nx"
            } else if !(ny >= 16 && ny.is_power_of_two()) {
                "grid.ny"
            } else if !(lx > 0.0) {
                "grid.lx"
            } else if !(ly > 0.0) {
                "grid.ly"
            } else {
                "grid.dealias"
            };
            self.constraint(key, &e.to_string())
        })
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        let grid = self.grid()?;
        let dt = self.f64("solver.dt")?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(self.constraint("solver.dt", "must be a positive number"));
        }
        let t_end = self.f64("solver.t_end")?;
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(self.constraint("solver.t_end", "must be a non-negative number"));
        }
        let mode: Mode = self
            .str("solver.mode")?
            .parse()
            .map_err(|e: ZkbError| self.constraint("solver.mode", &e.to_string()))?;
        let mut cfg = SolverConfig::new(grid, dt, t_end, mode);
        cfg.scheme = self
            .str("solver.scheme")?
            .parse::<Scheme>()
            .map_err(|e| self.constraint("solver.scheme", &e.to_string()))?;
        if t_end < dt {
            return Err(self.constraint("solver.t_end", "must be >= solver.dt"));
        }
        // 0 keeps only the initial and final frames
        let stride = self.usize("solver.snapshot_stride")?;
        cfg.snapshot_stride = if stride == 0 { cfg.steps() } else { stride };
        cfg.nonlinear = self.bool("solver.nonlinear")?;
        cfg.sobolev_s = self.f64_list("solver.sobolev_s")?;
        cfg.validate()
            .map_err(|e| self.constraint("solver.dt", &e.to_string()))?;
        Ok(cfg)
    }

    pub fn norm_family(&self) -> Result<NormFamily> {
        self.str("norm.family")?
            .parse()
            .map_err(|e: ZkbError| self.constraint("norm.family", &e.to_string()))
    }

    pub fn ensemble(&self) -> Result<EnsembleConfig> {
        let spectrum: Spectrum = self
            .str("lab.spectrum")?
            .parse()
            .map_err(|e: ZkbError| self.constraint("lab.spectrum", &e.to_string()))?;
        let cfg = EnsembleConfig {
            count: self.usize("lab.count")?,
            seed: self.seed()?,
            spectrum,
            s: self.f64("lab.s")?,
            b: self.f64("lab.b")?,
            delta: self.f64("lab.delta")?,
            epsilon: self.f64("lab.epsilon")?,
            shells: self.i32_list("lab.shells")?,
            atoms: self.usize("lab.atoms")?,
            l_floor: self.i32("lab.l_floor")?,
            dissipation_sign: self.f64("lab.dissipation_sign")?,
        };
        if cfg.count == 0 {
            return Err(self.constraint("lab.count", "must be >= 1"));
        }
        if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
            return Err(self.constraint("lab.delta", "must lie in (0, 1)"));
        }
        if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0 - cfg.delta) {
            return Err(self.constraint("lab.epsilon", "must lie in (0, 1 - delta)"));
        }
        if cfg.atoms == 0 {
            return Err(self.constraint("lab.atoms", "must be >= 1"));
        }
        if cfg.dissipation_sign.abs() != 1.0 {
            return Err(self.constraint("lab.dissipation_sign", "must be 1 or -1"));
        }
        Ok(cfg)
    }

    pub fn estimate(&self) -> Result<String> {
        let e = self.str("lab.estimate")?;
        match e {
            "linear" | "duhamel" | "bilinear" | "strichartz" | "bilinear-strichartz" => Ok(e.to_string()),
            _ => Err(self.constraint(
                "lab.estimate",
                "must be one of linear, duhamel, bilinear, strichartz, bilinear-strichartz",
            )),
        }
    }

    /// `(s, nmin, nmax, quad, T)` of the counterexample sweep.
    pub fn counterexample(&self) -> Result<(f64, i32, i32, usize, f64)> {
        let s = self.f64("counterexample.s")?;
        let (nmin, nmax) = (self.i32("counterexample.nmin")?, self.i32("counterexample.nmax")?);
        let quad = self.usize("counterexample.quad")?;
        let t = self.f64("counterexample.t")?;
        if nmin < 4 {
            return Err(self.constraint("counterexample.nmin", "must be >= 4 (N >= 2^4)"));
        }
        if nmax < nmin {
            return Err(self.constraint("counterexample.nmax", "must be >= counterexample.nmin"));
        }
        if quad < 32 {
            return Err(self.constraint("counterexample.quad", "must be >= 32"));
        }
        if !(t > 0.0) {
            return Err(self.constraint("counterexample.t", "must be positive"));
        }
        CounterexampleParams {
            n: 2f64.powi(nmin),
            s,
            t,
            quad,
        }
        .validate()?;
        Ok((s, nmin, nmax, quad, t))
    }

    /// Checks types and constraints of everything the command uses.
    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        self.usize("run.threads")?;
        match self.command {
            Command::Solve => {
                self.solver()?;
                self.init_checks()?;
            }
            Command::Norm => {
                self.grid()?;
                self.norm_family()?;
                self.f64("norm.s")?;
                self.f64("norm.b")?;
                if !(self.f64("norm.window")? > 0.0) {
                    return Err(self.constraint("norm.window", "must be positive"));
                }
                let nt = self.usize("norm.nt")?;
                if nt < 4 || !nt.is_power_of_two() {
                    return Err(self.constraint("norm.nt", "must be a power of two >= 4"));
                }
                self.init_checks()?;
            }
            Command::Verify => {
                self.estimate()?;
                self.ensemble()?;
                self.f64("lab.p")?;
                self.f64("lab.q")?;
                for k in ["lab.k", "lab.n1", "lab.n2", "lab.l1", "lab.l2"] {
                    self.i32(k)?;
                }
                self.i32_list("lab.k_sweep")?;
                self.f64_list("lab.widths")?;
            }
            Command::Counterexample => {
                self.counterexample()?;
                self.bool("counterexample.ablation")?;
            }
        }
        Ok(())
    }

    fn init_checks(&self) -> Result<()> {
        match self.str("init.profile")? {
            "gaussian" | "zero" | "random" | "cos" => {}
            _ => return Err(self.constraint("init.profile", "must be one of gaussian, zero, random, cos")),
        }
        self.f64("init.amplitude")?;
        if !(self.f64("init.width")? > 0.0) {
            return Err(self.constraint("init.width", "must be positive"));
        }
        self.f64("init.x0")?;
        self.f64("init.y0")?;
        Ok(())
    }

    /// `key = value` lines of the resolved configuration.
    pub fn resolved(&self) -> String {
        let mut out = format!("command = {}\n", self.command);
        for (k, s) in &self.values {
            out.push_str(&format!("{k} = {}\n", s.value));
        }
        out
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        if head.is_empty() {
            return Some(PI);
        }
        return head.parse::<f64>().ok().map(|x| x * PI);
    }
    s.parse::<f64>().ok()
}
