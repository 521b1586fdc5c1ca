//! The `zkb` command line: argument parsing, dispatch and run artifacts.
//!
//! Exit codes: `0` success, `2` an estimate was flagged, `1` any error.
//! All artifacts go under the output directory; CSV numbers use `{:.16e}`
//! (17 significant digits), so identical configurations give byte-identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{sync_channel, SyncSender};
use std::thread;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_entries, Command, Entry, RunConfig};
use crate::counterexample::{build_data, iterate_norm, slope_fit, CounterexampleParams, Interaction, Propagation};
use crate::dyadic::{chi, norm, NormFamily, NormInput, NormSpec};
use crate::error::{Result, ZkbError};
use crate::exec;
use crate::grid::GridSpec;
use crate::lab::{self, RatioReport};
use crate::propagators::apply_w;
use crate::snapshot;
use crate::solver::{dissipation_residual, solve_with};
use crate::spacetime::SpaceTimeField;
use crate::spectral::{sample_physical, to_physical_complex, to_spectral, SpectralField};

/// Exit status of a completed run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "zkb", version, about = "ZKB solver, norm toolkit and estimate lab")]
pub struct Cli {
    /// Directory for all artifacts (overrides `run.output_dir`).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Seed for every random draw (overrides `run.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// `section.key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Integrate an equation from initial data.
    Solve {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Evaluate a norm of a field (snapshot or generated profile).
    Norm {
        #[command(flatten)]
        config: ConfigArg,
        /// Snapshot file to measure.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
    },
    /// Run a bounded-ratio experiment for one estimate.
    Verify {
        #[command(flatten)]
        config: ConfigArg,
        /// linear | duhamel | bilinear | strichartz | bilinear-strichartz
        #[arg(long)]
        estimate: Option<String>,
    },
    /// Second Picard iterate on slab data and its growth exponent.
    Counterexample {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        /// Smallest exponent, `N = 2^nmin`.
        #[arg(long)]
        nmin: Option<i32>,
        #[arg(long)]
        nmax: Option<i32>,
        #[arg(long)]
        quad: Option<usize>,
    },
}

/// Result of [`run`]: whether an estimate was flagged, and the summary lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub flagged: bool,
    pub summary: Vec<String>,
    pub artifacts: Vec<String>,
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_entry() -> i32 {
    main_with(std::env::args_os())
}

pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match config_from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match run(&cfg) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            if out.flagged {
                EXIT_FLAG
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {} failed: {e}", cfg.command);
            EXIT_ERROR
        }
    }
}

fn override_entry(key: &str, value: String) -> Entry {
    Entry {
        line: 0,
        key: key.to_string(),
        value,
    }
}

/// Config file entries with command-line overrides applied on top.
pub fn config_from_cli(cli: &Cli) -> Result<RunConfig> {
    let (command, file) = match &cli.command {
        Cmd::Solve { config } => (Command::Solve, &config.config),
        Cmd::Norm { config, .. } => (Command::Norm, &config.config),
        Cmd::Verify { config, .. } => (Command::Verify, &config.config),
        Cmd::Counterexample { config, .. } => (Command::Counterexample, &config.config),
    };
    let mut entries = match file {
        Some(p) => parse_entries(&fs::read_to_string(p)?)?,
        None => Vec::new(),
    };
    let mut over: Vec<Entry> = Vec::new();
    if let Some(d) = &cli.output_dir {
        over.push(override_entry("run.output_dir", d.display().to_string()));
    }
    if let Some(s) = cli.seed {
        over.push(override_entry("run.seed", s.to_string()));
    }
    if let Some(t) = cli.threads {
        over.push(override_entry("run.threads", t.to_string()));
    }
    match &cli.command {
        Cmd::Norm { input, family, s, .. } => {
            if let Some(p) = input {
                over.push(override_entry("init.file", p.display().to_string()));
            }
            if let Some(f) = family {
                over.push(override_entry("norm.family", f.clone()));
            }
            if let Some(s) = s {
                over.push(override_entry("norm.s", s.to_string()));
            }
        }
        Cmd::Verify { estimate: Some(e), .. } => over.push(override_entry("lab.estimate", e.clone())),
        Cmd::Counterexample {
            s, nmin, nmax, quad, ..
        } => {
            if let Some(s) = s {
                over.push(override_entry("counterexample.s", s.to_string()));
            }
            if let Some(n) = nmin {
                over.push(override_entry("counterexample.nmin", n.to_string()));
            }
            if let Some(n) = nmax {
                over.push(override_entry("counterexample.nmax", n.to_string()));
            }
            if let Some(q) = quad {
                over.push(override_entry("counterexample.quad", q.to_string()));
            }
        }
        _ => {}
    }
    for o in over {
        entries.retain(|e| e.key != o.key);
        entries.push(o);
    }
    RunConfig::from_entries(entries, Some(command))
}

/// Formats a CSV number.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Artifact files are written by a dedicated thread fed through a bounded
/// channel, so the numerical work never waits on the disk for long.
struct Writer {
    tx: Option<SyncSender<(PathBuf, Vec<u8>)>>,
    handle: Option<thread::JoinHandle<Result<()>>>,
    root: PathBuf,
    written: Vec<String>,
}

impl Writer {
    fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        let (tx, rx) = sync_channel::<(PathBuf, Vec<u8>)>(4);
        let handle = thread::spawn(move || -> Result<()> {
            for (path, bytes) in rx {
                if let Some(dir) = path.parent() {
                    fs::create_dir_all(dir)?;
                }
                fs::write(&path, bytes)?;
            }
            Ok(())
        });
        Ok(Writer {
            tx: Some(tx),
            handle: Some(handle),
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn send(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        self.written.push(name.to_string());
        let tx = self.tx.as_ref().expect("writer open");
        tx.send((self.root.join(name), bytes))
            .map_err(|_| ZkbError::Io(std::io::Error::other("artifact writer stopped")))
    }

    fn finish(mut self) -> Result<Vec<String>> {
        drop(self.tx.take());
        match self.handle.take().expect("writer thread").join() {
            Ok(r) => r?,
            Err(_) => return Err(ZkbError::Io(std::io::Error::other("artifact writer panicked"))),
        }
        Ok(std::mem::take(&mut self.written))
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    exec::init_threads(cfg.usize("run.threads")?)?;
    let root = PathBuf::from(cfg.str("run.output_dir")?);
    let mut writer = Writer::new(&root)?;
    let result = match cfg.command {
        Command::Solve => run_solve(cfg, &mut writer),
        Command::Norm => run_norm(cfg, &mut writer),
        Command::Verify => run_verify(cfg, &mut writer),
        Command::Counterexample => run_counterexample(cfg, &mut writer),
    };
    let (flagged, summary) = match result {
        Ok(x) => x,
        Err(e) => {
            let _ = writer.finish();
            return Err(e);
        }
    };
    if !summary.is_empty() {
        writer.send("summary.txt", (summary.join("\n") + "\n").into_bytes())?;
    }
    let mut artifacts = writer.finish()?;
    artifacts.push("manifest.txt".into());
    fs::write(root.join("manifest.txt"), manifest(cfg, &artifacts))?;
    Ok(Outcome {
        flagged,
        summary,
        artifacts,
    })
}

fn manifest(cfg: &RunConfig, artifacts: &[String]) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "# zkb run manifest");
    let _ = writeln!(m, "zkb_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "snapshot_format = {}", snapshot::VERSION);
    let _ = writeln!(m, "parallel_feature = {}", cfg!(feature = "parallel"));
    let _ = writeln!(m, "\n# resolved configuration");
    m.push_str(&cfg.resolved());
    let _ = writeln!(m, "\n# artifacts");
    for a in artifacts {
        let _ = writeln!(m, "{a}");
    }
    m
}

/// Initial data from `init.*` on `grid`.
pub fn initial_field(cfg: &RunConfig, grid: &GridSpec) -> Result<SpectralField> {
    let file = cfg.str("init.file")?;
    if !file.is_empty() {
        let f = snapshot::read(Path::new(file))?;
        if f.grid().nx != grid.nx || f.grid().ny != grid.ny || !f.grid().same_box(grid) {
            return Err(ZkbError::InvalidGrid(format!(
                "snapshot `{file}` does not match the configured grid"
            )));
        }
        return SpectralField::from_coeffs(*grid, f.into_coeffs());
    }
    let amp = cfg.f64("init.amplitude")?;
    let w = cfg.f64("init.width")?;
    let (x0, y0) = (cfg.f64("init.x0")?, cfg.f64("init.y0")?);
    let (lx, ly) = (grid.lx, grid.ly);
    match cfg.str("init.profile")? {
        "zero" => Ok(SpectralField::zeros(*grid)),
        "gaussian" => {
            let v = sample_physical(grid, |x, y| {
                amp * (-((x - x0).powi(2) + (y - y0).powi(2)) / (2.0 * w * w)).exp()
            });
            to_spectral(grid, (grid.nx, grid.ny), &v)
        }
        "cos" => {
            let v = sample_physical(grid, |x, y| {
                amp * (2.0 * std::f64::consts::PI * x / lx).cos() * (2.0 * std::f64::consts::PI * y / ly).cos()
            });
            to_spectral(grid, (grid.nx, grid.ny), &v)
        }
        "random" => {
            // uniform random coefficients under the envelope e^{−w²|ζ|²/2},
            // made real and scaled so that max |u| = amplitude
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed()?);
            let mut f = SpectralField::from_fn(*grid, |xi, eta| {
                Complex64::new((-0.5 * w * w * (xi * xi + eta * eta)).exp(), 0.0)
            });
            for c in f.coeffs_mut() {
                let re: f64 = rng.random::<f64>() - 0.5;
                let im: f64 = rng.random::<f64>() - 0.5;
                *c *= Complex64::new(re, im);
            }
            f.symmetrize_hermitian();
            let f = f.dealias();
            let peak = to_physical_complex(&f).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            Ok(if peak > 0.0 { f.scale(amp / peak) } else { f })
        }
        other => Err(ZkbError::param(format!("unknown init.profile `{other}`"))),
    }
}

fn run_solve(cfg: &RunConfig, w: &mut Writer) -> Result<(bool, Vec<String>)> {
    let scfg = cfg.solver()?;
    let v0 = initial_field(cfg, &scfg.grid)?;
    let mut frames: Vec<(usize, f64, String)> = Vec::new();
    let mut send_err: Option<ZkbError> = None;
    let traj = solve_with(&v0, &scfg, |step, t, v| {
        let name = format!("snapshots/frame_{step:08}.zkbf");
        if let Err(e) = w.send(&name, snapshot::encode(v)) {
            send_err.get_or_insert(e);
        }
        frames.push((step, t, name));
    });
    let traj = match traj {
        Ok(t) => t,
        Err(ZkbError::BlowUp { step, t, last_frame }) => {
            w.send("blowup.zkbf", snapshot::encode(&last_frame))?;
            return Err(ZkbError::BlowUp { step, t, last_frame });
        }
        Err(e) => return Err(e),
    };
    if let Some(e) = send_err {
        return Err(e);
    }
    let res = dissipation_residual(&traj);
    let s = &traj.series;
    let mut header = String::from("t,l2");
    for x in &scfg.sobolev_s {
        let _ = write!(header, ",hs_{x}");
    }
    header.push_str(",dissipation_residual");
    let rows = (0..s.t.len()).map(|i| {
        let mut r = vec![num(s.t[i]), num(s.l2[i])];
        r.extend(s.hs.iter().map(|col| num(col[i])));
        r.push(num(res[i]));
        r
    });
    w.send("series.csv", csv(&header, rows))?;
    w.send(
        "frames.csv",
        csv(
            "step,t,file",
            frames.iter().map(|(n, t, f)| vec![n.to_string(), num(*t), f.clone()]),
        ),
    )?;
    let summary = vec![format!(
        "SOLVE mode={} scheme={} steps={} l2_final={} max_l2_increase={}",
        scfg.mode.name(),
        scfg.scheme.name(),
        scfg.steps(),
        num(*s.l2.last().unwrap_or(&0.0)),
        num(traj.max_l2_increase().max(0.0))
    )];
    Ok((false, summary))
}

fn run_norm(cfg: &RunConfig, w: &mut Writer) -> Result<(bool, Vec<String>)> {
    let grid = cfg.grid()?;
    let u0 = initial_field(cfg, &grid)?;
    let family = cfg.norm_family()?;
    let spec = NormSpec::new(family, cfg.f64("norm.s")?).with_b(cfg.f64("norm.b")?);
    let value = match family {
        NormFamily::Xsb1 | NormFamily::Xtsb1 => {
            // ψ(t) W(t) u0 on a symmetric window
            let win = cfg.f64("norm.window")?;
            let nt = cfg.usize("norm.nt")?;
            let f = SpaceTimeField::from_fn(grid, -win, win, nt, |t| apply_w(&u0, t).scale(chi(t)))?;
            let blocks = crate::dyadic::breakdown(&f);
            w.send(
                "breakdown.csv",
                csv(
                    "N,M,L,block_l2",
                    blocks.iter().map(|b| vec![num(b.0), num(b.1), num(b.2), num(b.3)]),
                ),
            )?;
            norm(NormInput::SpaceTime(&f), spec)?
        }
        _ => norm(NormInput::Field(&u0), spec)?,
    };
    w.send(
        "norm.csv",
        csv(
            "family,s,b,value",
            [vec![format!("{family:?}"), num(spec.s), num(spec.b), num(value)]],
        ),
    )?;
    Ok((
        false,
        vec![format!(
            "NORM {family:?} s={} b={} value={}",
            spec.s,
            spec.b,
            num(value)
        )],
    ))
}

fn report_csv(r: &RatioReport) -> Vec<u8> {
    csv(
        "sample,shell,ratio",
        r.ratios
            .iter()
            .zip(&r.shells)
            .enumerate()
            .map(|(i, (x, e))| vec![i.to_string(), e.to_string(), num(*x)]),
    )
}

fn run_verify(cfg: &RunConfig, w: &mut Writer) -> Result<(bool, Vec<String>)> {
    let ens = cfg.ensemble()?;
    let estimate = cfg.estimate()?;
    let mut summary = Vec::new();
    let mut flagged = false;
    let mut emit = |r: &RatioReport, file: &str, w: &mut Writer| -> Result<()> {
        w.send(file, report_csv(r))?;
        flagged |= !r.passes();
        summary.push(r.summary_line());
        Ok(())
    };
    match estimate.as_str() {
        "linear" => emit(&lab::check_linear_estimate(&ens)?, "report.csv", w)?,
        "duhamel" => emit(&lab::check_duhamel_estimate(&ens)?, "report.csv", w)?,
        "bilinear" => emit(&lab::check_bilinear_estimate(&ens)?, "report.csv", w)?,
        "strichartz" => {
            let (p, q) = (cfg.f64("lab.p")?, cfg.f64("lab.q")?);
            emit(&lab::check_strichartz(&ens, p, q)?, "report.csv", w)?;
            if p == 5.0 && q == 5.0 {
                let sweep = lab::airy_rescaling_sweep(&cfg.f64_list("lab.widths")?)?;
                w.send(
                    "rescaling.csv",
                    csv(
                        "width,ratio",
                        sweep
                            .widths
                            .iter()
                            .zip(&sweep.ratios)
                            .map(|(a, b)| vec![num(*a), num(*b)]),
                    ),
                )?;
                let ok = sweep.passes();
                flagged |= !ok;
                summary.push(format!(
                    "RESCALING spread={} {}",
                    num(sweep.spread),
                    if ok { "PASS" } else { "FLAG" }
                ));
            }
        }
        "bilinear-strichartz" => {
            let k = |key: &str| cfg.i32(key);
            let (n1, n2, l1, l2) = (k("lab.n1")?, k("lab.n2")?, k("lab.l1")?, k("lab.l2")?);
            let r = lab::check_bilinear_strichartz(&ens, k("lab.k")?, n1, n2, l1, l2)?;
            emit(&r.report, "report.csv", w)?;
            emit(&r.high_low, "high_low.csv", w)?;
            let sweep = lab::k_sweep(&ens, &cfg.i32_list("lab.k_sweep")?, n1, n2, l1, l2)?;
            let mut rows = Vec::new();
            for (i, kk) in sweep.ks.iter().enumerate() {
                let step = if i == 0 { f64::NAN } else { sweep.steps[i - 1] };
                rows.push(vec![kk.to_string(), num(sweep.measured[i]), num(step)]);
            }
            w.send("ksweep.csv", csv("k,measured,step_factor", rows))?;
            let ok = sweep.passes();
            flagged |= !ok;
            summary.push(format!("KSWEEP {}", if ok { "PASS" } else { "FLAG" }));
        }
        _ => unreachable!("validated estimate"),
    }
    Ok((flagged, summary))
}

fn run_counterexample(cfg: &RunConfig, w: &mut Writer) -> Result<(bool, Vec<String>)> {
    let (s, nmin, nmax, quad, t) = cfg.counterexample()?;
    let ns: Vec<f64> = (nmin..=nmax).map(|e| 2f64.powi(e)).collect();
    let mut summary = Vec::new();
    if ns.len() >= 4 {
        let fit = slope_fit(s, &ns, quad, t)?;
        w.send(
            "counterexample.csv",
            csv(
                "N,norm_u0,iterate_norm,t_max",
                fit.points
                    .iter()
                    .map(|p| vec![num(p.n), num(p.norm_u0), num(p.iterate.value), num(p.iterate.t_max)]),
            ),
        )?;
        summary.push(format!(
            "SLOPE s={s} slope={} expected={}",
            num(fit.slope),
            num(fit.expected())
        ));
    } else {
        // too few points for a fit: report the values only
        let mut rows = Vec::new();
        for &n in &ns {
            let p = CounterexampleParams { n, s, t, quad };
            let d = build_data(p)?;
            let r = iterate_norm(p, Interaction::Mixed, Propagation::Free)?;
            rows.push(vec![num(n), num(d.norm_u0), num(r.value), num(r.t_max)]);
        }
        w.send("counterexample.csv", csv("N,norm_u0,iterate_norm,t_max", rows))?;
        summary.push(format!("SLOPE s={s} skipped: fewer than 4 values of N"));
    }
    if cfg.bool("counterexample.ablation")? {
        let p = CounterexampleParams { n: ns[0], s, t, quad };
        let mut rows = Vec::new();
        for (name, inter, prop) in [
            ("mixed_free", Interaction::Mixed, Propagation::Free),
            ("self_a_free", Interaction::SelfA, Propagation::Free),
            ("mixed_dissipative", Interaction::Mixed, Propagation::Dissipative),
        ] {
            let r = iterate_norm(p, inter, prop)?;
            rows.push(vec![name.to_string(), num(r.value), num(r.t_max)]);
        }
        w.send("ablation.csv", csv("variant,iterate_norm,t_max", rows))?;
    }
    Ok((false, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        let mut v = vec!["zkb"];
        v.extend_from_slice(args);
        main_with(v)
    }

    #[test]
    fn solve_on_zero_data_writes_zero_series() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("z.cfg");
        fs::write(
            &cfg,
            "grid.nx = 16\nsolver.dt = 0.01\nsolver.t_end = 0.05\ninit.profile = zero\nsolver.snapshot_stride = 2\n",
        )
        .unwrap();
        let out = dir.path().join("out");
        let code = run_args(&[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let series = fs::read_to_string(out.join("series.csv")).unwrap();
        let mut lines = series.lines();
        assert_eq!(lines.next().unwrap(), "t,l2,hs_1,dissipation_residual");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 6);
        for r in rows {
            let cols: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
            assert!(cols[1..].iter().all(|x| *x == 0.0), "{r}");
        }
        let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
        assert!(manifest.contains("solver.dt = 0.01") && manifest.contains("grid.ny = 16"));
        assert!(manifest.contains("series.csv"));
        let frames = fs::read_to_string(out.join("frames.csv")).unwrap();
        assert_eq!(frames.lines().count(), 1 + 4); // steps 0, 2, 4, 5
        assert!(out.join("snapshots/frame_00000005.zkbf").exists());
    }

    #[test]
    fn counterexample_with_inverted_range_fails() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let code = run_args(&[
            "counterexample",
            "--nmin",
            "6",
            "--nmax",
            "5",
            "--output-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_ERROR);
    }

    #[test]
    fn wrong_dissipation_sign_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bug.cfg");
        fs::write(&cfg, "lab.count = 14\nlab.dissipation_sign = -1\n").unwrap();
        let out = dir.path().join("out");
        let code = run_args(&[
            "verify",
            "--estimate",
            "linear",
            "--config",
            cfg.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_FLAG);
        let s = fs::read_to_string(out.join("summary.txt")).unwrap();
        assert!(
            s.starts_with("ESTIMATE linear") && s.trim_end().ends_with("FLAG"),
            "{s}"
        );
    }

    #[test]
    fn bad_arguments_are_errors() {
        assert_eq!(run_args(&["solve"]), EXIT_ERROR); // no dt / t_end
        assert_eq!(run_args(&["frobnicate"]), EXIT_ERROR);
        assert_eq!(run_args(&["--help"]), EXIT_OK);
    }
}
