//! Configuration-driven command-line front end.
//!
//! Exit codes: `0` success, `1` output failure, `2` invalid configuration or
//! input file, `3` numerical failure.

use crate::asymptotics::{band_from_perturbation, band_report, semicircle_min, write_band_csv, BandModel, BandRow};
use crate::error::Error;
use crate::format::{pair, sha256_hex, Header};
use crate::inverse::{reconstruct_m, write_comparison_csv, ComparisonRow, InverseConfig, MReconstruction};
use crate::jost::{write_batch_csv, JostEvaluator};
use crate::kernel::{Kernel, KernelConfig, Perturbation, PerturbationSpec};
use crate::numeric::C64;
use crate::potential::{BasePotential, BasePotentialSpec};
use crate::roots::{locate, LocateConfig, Rect, ZeroSet, ZeroSetFile};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "resonance", version, about = "Jost functions, resonances and M-function reconstruction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Multiplies the kernel and fit tolerances.
    #[arg(long, global = true)]
    pub tol_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel, zero set and M samples.
    Forward,
    /// Reconstruct M from a zero-set file.
    Inverse {
        /// Zero-set JSON; defaults to `zero_set` in the configuration, then
        /// `zeros.json` in the output directory.
        #[arg(long)]
        zeros: Option<PathBuf>,
    },
    /// Forward, inverse and comparison in one run.
    Roundtrip,
    /// Resonance band and safe semicircles.
    Band,
    /// Check the configuration without computing.
    Validate,
}

/// A spec given inline or as a path relative to the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(String),
    Inline(T),
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for Source<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(p) => Ok(Source::Path(p)),
            v => T::deserialize(v).map(Source::Inline).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelParams {
    pub h: f64,
    pub tol: f64,
    pub max_terms: usize,
    /// Combine `h` and `h/2` by Richardson extrapolation.
    pub extrapolate: bool,
    /// Write `kernel.csv` with every `export_stride`-th node.
    pub export_stride: Option<usize>,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            h: 0.0025,
            tol: 1e-12,
            max_terms: 400,
            extrapolate: true,
            export_stride: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchParams {
    /// `[re_min, re_max, im_min, im_max]`.
    pub rect: [f64; 4],
    /// Box diameter below which Newton refinement starts.
    pub tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            rect: [-20.0, 20.0, -6.0, 2.0],
            tol: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandParams {
    /// Smallest `|Re z|` in the band report; defaults to `10π/R`.
    pub min_re: Option<f64>,
    /// Safe semicircle indices checked, inclusive.
    pub safe_indices: [u32; 2],
    pub samples: usize,
}

impl Default for BandParams {
    fn default() -> Self {
        BandParams {
            min_re: None,
            safe_indices: [15, 25],
            samples: 400,
        }
    }
}

fn default_samples() -> Vec<[f64; 2]> {
    (0..20).map(|k| [0.0, 0.5 + 4.5 * k as f64 / 19.0]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base: Source<BasePotentialSpec>,
    #[serde(default)]
    pub perturbation: Option<Source<PerturbationSpec>>,
    #[serde(default)]
    pub kernel: KernelParams,
    #[serde(default)]
    pub search: SearchParams,
    #[serde(default)]
    pub inverse: InverseConfig,
    /// Zero-set file read by `inverse`.
    #[serde(default)]
    pub zero_set: Option<String>,
    /// Points where M is sampled and compared.
    #[serde(default = "default_samples")]
    pub samples: Vec<[f64; 2]>,
    #[serde(default)]
    pub band: BandParams,
    #[serde(default)]
    pub output_dir: Option<String>,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e)
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Line of the JSON key path `keys` in `text`, 1-based; each key is searched
/// after the line of the previous one. Falls back to the last line found.
fn key_line(text: &str, keys: &[&str]) -> usize {
    let lines: Vec<&str> = text.lines().collect();
    let mut at = 0;
    for key in keys {
        let quoted = format!("\"{key}\"");
        match lines[at..].iter().position(|l| l.contains(&quoted)) {
            Some(i) => at += i,
            None => break,
        }
    }
    at + 1
}

fn anchored(path: &Path, text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    let keys: Vec<&str> = key.split('.').collect();
    CliError::Validation(format!("{}:{}: {key}: {msg}", path.display(), key_line(text, &keys)))
}

fn parse_json<T: DeserializeOwned>(path: &Path) -> CliResult<(T, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}:1: cannot read: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(v) => Ok((v, text)),
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.rfind(" at line ").map_or(msg.as_str(), |i| &msg[..i]).to_string();
            Err(CliError::Validation(format!(
                "{}:{}:{}: {msg}",
                path.display(),
                e.line(),
                e.column()
            )))
        }
    }
}

/// A validated configuration with every referenced file loaded.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub path: PathBuf,
    pub base: BasePotential,
    pub perturbation: Option<Perturbation>,
    pub header: Header,
    pub out_dir: PathBuf,
}

fn resolve<T: DeserializeOwned + Clone>(
    src: &Source<T>,
    dir: &Path,
    cfg_path: &Path,
    cfg_text: &str,
    key: &str,
) -> CliResult<(T, PathBuf, String)> {
    match src {
        Source::Inline(v) => Ok((v.clone(), cfg_path.to_path_buf(), cfg_text.to_string())),
        Source::Path(p) => {
            let full = dir.join(p);
            if !full.is_file() {
                return Err(anchored(cfg_path, cfg_text, key, format!("file {} does not exist", full.display())));
            }
            let (v, text) = parse_json(&full)?;
            Ok((v, full, text))
        }
    }
}

impl Experiment {
    pub fn load(path: &Path, out: Option<&Path>, tol_scale: Option<f64>) -> CliResult<Experiment> {
        let (mut config, text): (ExperimentConfig, String) = parse_json(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let bad = |key: &str, msg: String| anchored(path, &text, key, msg);

        let (base_spec, base_path, base_text) = resolve(&config.base, dir, path, &text, "base")?;
        let base = base_spec
            .build()
            .map_err(|e| anchored(&base_path, &base_text, "base", e))?;
        config.base = Source::Inline(base_spec);

        let perturbation = match &config.perturbation {
            None => None,
            Some(src) => {
                let (spec, ppath, ptext) = resolve(src, dir, path, &text, "perturbation")?;
                let pert = spec
                    .build()
                    .map_err(|e| anchored(&ppath, &ptext, "perturbation", e))?;
                config.perturbation = Some(Source::Inline(spec));
                Some(pert)
            }
        };

        if let Some(s) = tol_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::Validation(format!("--tol-scale: must be positive, got {s}")));
            }
            config.kernel.tol *= s;
            config.inverse.fit_tol *= s;
        }
        let k = &config.kernel;
        if !(k.h.is_finite() && k.h > 0.0) {
            return Err(bad("kernel.h", format!("must be positive, got {}", k.h)));
        }
        if !(k.tol.is_finite() && k.tol > 0.0) {
            return Err(bad("kernel.tol", format!("must be positive, got {}", k.tol)));
        }
        if k.max_terms == 0 {
            return Err(bad("kernel.max_terms", "must be positive".into()));
        }
        if let Some(p) = &perturbation {
            let ratio = p.radius() / k.h;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio {
                return Err(bad("kernel.h", format!("must divide R = {}, got {}", p.radius(), k.h)));
            }
        }
        let [re0, re1, im0, im1] = config.search.rect;
        if !(re0 < re1 && im0 < im1 && config.search.rect.iter().all(|v| v.is_finite())) {
            return Err(bad("search.rect", "must be [re_min, re_max, im_min, im_max] with min < max".into()));
        }
        if (re0.abs().min(re1.abs()) < crate::roots::ORIGIN_NOTCH && im0 <= 0.0 && im1 >= 0.0)
            || (im0.abs().min(im1.abs()) < crate::roots::ORIGIN_NOTCH && re0 <= 0.0 && re1 >= 0.0)
        {
            log::info!("search rectangle edge passes near the origin; it will be notched");
        }
        if !(config.search.tol.is_finite() && config.search.tol > 0.0) {
            return Err(bad("search.tol", format!("must be positive, got {}", config.search.tol)));
        }
        let inv = &config.inverse;
        if !(inv.fit_window[0] > 0.0 && inv.fit_window[1] > inv.fit_window[0]) {
            return Err(bad("inverse.fit_window", format!("must satisfy 0 < lo < hi, got {:?}", inv.fit_window)));
        }
        if inv.fit_points == 0 || inv.cauchy_nodes == 0 {
            return Err(bad("inverse.fit_points", "fit_points and cauchy_nodes must be positive".into()));
        }
        if !(inv.fit_tol > 0.0) {
            return Err(bad("inverse.fit_tol", "must be positive".into()));
        }
        if config.samples.iter().any(|s| !(s[0].is_finite() && s[1].is_finite())) {
            return Err(bad("samples", "entries must be finite [re, im] pairs".into()));
        }
        if config.band.safe_indices[0] > config.band.safe_indices[1] || config.band.samples == 0 {
            return Err(bad("band", "safe_indices must be ordered and samples positive".into()));
        }

        let canonical = serde_json::to_vec(&config).expect("configuration serializes");
        let header = Header::new(sha256_hex(&canonical));
        let out_dir = match (out, &config.output_dir) {
            (Some(o), _) => o.to_path_buf(),
            (None, Some(o)) => PathBuf::from(o),
            (None, None) => PathBuf::from("out"),
        };
        Ok(Experiment {
            config,
            path: path.to_path_buf(),
            base,
            perturbation,
            header,
            out_dir,
        })
    }

    fn require_perturbation(&self) -> CliResult<&Perturbation> {
        self.perturbation.as_ref().ok_or_else(|| {
            CliError::Validation(format!(
                "{}:1: perturbation: required by this command",
                self.path.display()
            ))
        })
    }

    fn kernel_config(&self) -> KernelConfig {
        KernelConfig {
            step: self.config.kernel.h,
            tol: self.config.kernel.tol,
            max_terms: self.config.kernel.max_terms,
            ..Default::default()
        }
    }

    pub fn evaluator(&self) -> CliResult<JostEvaluator> {
        let pert = self.require_perturbation()?;
        let cfg = self.kernel_config();
        let kernel = if self.config.kernel.extrapolate {
            Kernel::build_extrapolated(&self.base, pert, &cfg)?
        } else {
            Kernel::build(&self.base, pert, &cfg)?
        };
        Ok(JostEvaluator::new(self.base.clone(), pert.clone(), kernel)?)
    }

    pub fn rect(&self) -> Rect {
        let [a, b, c, d] = self.config.search.rect;
        Rect::new(a, b, c, d)
    }

    pub fn locate_config(&self) -> LocateConfig {
        LocateConfig {
            coarse_tol: self.config.search.tol,
            ..Default::default()
        }
    }

    pub fn samples(&self) -> Vec<C64> {
        self.config.samples.iter().map(|&[a, b]| C64::new(a, b)).collect()
    }

    fn create(&self, name: &str) -> CliResult<BufWriter<File>> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Output(format!("{}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        log::info!("writing {}", path.display());
        Ok(BufWriter::new(f))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
struct TermRecord {
    index: usize,
    sup_norm: f64,
    max_bound_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
struct KernelReport {
    header: Header,
    h: f64,
    extrapolated: bool,
    nodes_per_side: usize,
    terms_used: usize,
    tail_bound: f64,
    m_estimate: f64,
    l1_norm: f64,
    integral_equation_residual: f64,
    max_bound_ratio: f64,
    terms: Vec<TermRecord>,
}

fn kernel_report(exp: &Experiment, ev: &JostEvaluator) -> KernelReport {
    let k = ev.kernel();
    let terms: Vec<TermRecord> = k
        .diagnostics()
        .iter()
        .map(|d| TermRecord {
            index: d.index,
            sup_norm: d.sup_norm,
            max_bound_ratio: d.max_bound_ratio,
        })
        .collect();
    KernelReport {
        header: exp.header.clone(),
        h: k.step(),
        extrapolated: k.is_extrapolated(),
        nodes_per_side: k.n() + 1,
        terms_used: k.terms_used(),
        tail_bound: k.tail_bound(),
        m_estimate: k.m_estimate(),
        l1_norm: k.l1_norm(),
        integral_equation_residual: k.integral_equation_residual(ev.base(), ev.perturbation()),
        max_bound_ratio: terms.iter().map(|t| t.max_bound_ratio).fold(0.0, f64::max),
        terms,
    }
}

/// Forward stage: kernel diagnostics, zero set and M samples.
pub fn cmd_forward(exp: &Experiment) -> CliResult<(JostEvaluator, ZeroSet)> {
    let ev = exp.evaluator()?;
    exp.write_json("kernel.json", &kernel_report(exp, &ev))?;
    if let Some(stride) = exp.config.kernel.export_stride {
        let mut w = exp.create("kernel.csv")?;
        ev.kernel().write_csv(&mut w, &exp.header.csv_lines(), stride)?;
        w.flush()?;
    }
    let f = |z: C64| ev.jost_kernel(z);
    let zeros = locate(&f, &exp.rect(), &exp.locate_config())?;
    log::info!("located {} zeros", zeros.len());
    exp.write_json("zeros.json", &zeros.to_file(Some(exp.header.clone())))?;
    let ev = ev.with_known_zeros(zeros.points());
    let rows = ev.batch(&exp.samples());
    let mut w = exp.create("m_samples.csv")?;
    write_batch_csv(&mut w, &exp.header.csv_lines(), &rows)?;
    w.flush()?;
    Ok((ev, zeros))
}

fn read_zero_set(path: &Path) -> CliResult<ZeroSet> {
    let (file, text): (ZeroSetFile, String) = parse_json(path)?;
    file.into_set().map_err(|e| anchored(path, &text, "zeros", e))
}

/// Inverse stage; compares with `reference` at the sample points when given.
pub fn cmd_inverse(
    exp: &Experiment,
    zeros: &ZeroSet,
    reference: Option<&JostEvaluator>,
) -> CliResult<(MReconstruction, Option<f64>)> {
    let w = exp.base.wronskian_poly()?;
    let rec = reconstruct_m(zeros, exp.base.genus(), &w, &exp.config.inverse)?;
    let points = exp.samples();
    let report = rec.report(Some(exp.header.clone()), &points)?;
    exp.write_json("reconstruction.json", &report)?;
    let max_err = match reference {
        None => None,
        Some(ev) => {
            let rows = points
                .iter()
                .map(|&z| {
                    Ok(ComparisonRow {
                        z,
                        m_rec: rec.eval(z)?,
                        m_fwd: ev.m_direct(z)?,
                    })
                })
                .collect::<crate::Result<Vec<_>>>()?;
            let mut out = exp.create("m_comparison.csv")?;
            write_comparison_csv(&mut out, &exp.header.csv_lines(), &rows)?;
            out.flush()?;
            Some(rows.iter().map(|r| r.rel_err()).fold(0.0, f64::max))
        }
    };
    Ok((rec, max_err))
}

#[derive(Debug, Clone, Serialize)]
struct SafeCircle {
    n: u32,
    radius: f64,
    min_ratio: f64,
    ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandSummary {
    header: Header,
    nu: u32,
    c1: [f64; 2],
    radius: f64,
    tau: f64,
    half_width: f64,
    min_re: f64,
    resonances: usize,
    in_band: usize,
    max_abs_deviation: f64,
    safe_circles: Vec<SafeCircle>,
}

/// Band report for the resonances of `zeros`.
pub fn cmd_band(exp: &Experiment, ev: &JostEvaluator, zeros: &ZeroSet) -> CliResult<(BandModel, Vec<BandRow>)> {
    let pert = exp.require_perturbation()?;
    let model = band_from_perturbation(&exp.base, pert)?;
    let min_re = exp
        .config
        .band
        .min_re
        .unwrap_or(10.0 * std::f64::consts::PI / pert.radius());
    let rows = band_report(&zeros.points(), &model, min_re);
    let mut w = exp.create("band.csv")?;
    write_band_csv(&mut w, &exp.header.csv_lines(), &rows)?;
    w.flush()?;
    let f = |z: C64| ev.jost_kernel(z);
    let [n0, n1] = exp.config.band.safe_indices;
    let genus = exp.base.genus();
    let safe_circles = (n0..=n1)
        .map(|n| {
            let radius = model.safe_radius(n);
            let min_ratio = semicircle_min(&f, genus, radius, exp.config.band.samples);
            SafeCircle {
                n,
                radius,
                min_ratio,
                ok: min_ratio >= 1.0 / 3.0,
            }
        })
        .collect();
    let summary = BandSummary {
        header: exp.header.clone(),
        nu: model.nu,
        c1: pair(model.c1),
        radius: model.radius,
        tau: model.tau,
        half_width: model.half_width(),
        min_re,
        resonances: rows.len(),
        in_band: rows.iter().filter(|r| r.in_band).count(),
        max_abs_deviation: rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max),
        safe_circles,
    };
    exp.write_json("band.json", &summary)?;
    Ok((model, rows))
}

#[derive(Debug, Clone, Serialize)]
struct RoundtripSummary {
    header: Header,
    zeros: usize,
    retained: usize,
    synthetic: usize,
    sample_points: usize,
    max_rel_err: f64,
    band_resonances: Option<usize>,
    band_in_band: Option<usize>,
}

fn cmd_roundtrip(exp: &Experiment) -> CliResult<()> {
    let (ev, zeros) = cmd_forward(exp)?;
    let (rec, err) = cmd_inverse(exp, &zeros, Some(&ev))?;
    let band = match cmd_band(exp, &ev, &zeros) {
        Ok((_, rows)) => Some(rows),
        Err(CliError::Numerical(Error::ZeroContactDerivative { .. })) => {
            log::warn!("no band model for this perturbation; band report skipped");
            None
        }
        Err(e) => return Err(e),
    };
    let summary = RoundtripSummary {
        header: exp.header.clone(),
        zeros: zeros.len(),
        retained: rec.retained(),
        synthetic: rec.synthetic(),
        sample_points: exp.config.samples.len(),
        max_rel_err: err.unwrap_or(0.0),
        band_resonances: band.as_ref().map(|r| r.len()),
        band_in_band: band.as_ref().map(|r| r.iter().filter(|x| x.in_band).count()),
    };
    exp.write_json("summary.json", &summary)?;
    println!("max relative M error {:.3e} over {} points", summary.max_rel_err, summary.sample_points);
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Validation("--config: required".into()))?;
    let exp = Experiment::load(path, cli.out.as_deref(), cli.tol_scale)?;
    match &cli.command {
        Command::Validate => {
            println!("{}: ok (config-sha256 {})", path.display(), exp.header.config_sha256);
            Ok(())
        }
        Command::Forward => cmd_forward(&exp).map(|_| ()),
        Command::Inverse { zeros } => {
            let zpath = match (zeros, &exp.config.zero_set) {
                (Some(z), _) => z.clone(),
                (None, Some(z)) => path.parent().unwrap_or(Path::new(".")).join(z),
                (None, None) => exp.out_dir.join("zeros.json"),
            };
            let set = read_zero_set(&zpath)?;
            let reference = match exp.perturbation {
                Some(_) => Some(exp.evaluator()?.with_known_zeros(set.points())),
                None => None,
            };
            let (_, err) = cmd_inverse(&exp, &set, reference.as_ref())?;
            if let Some(e) = err {
                println!("max relative M error {e:.3e}");
            }
            Ok(())
        }
        Command::Roundtrip => cmd_roundtrip(&exp),
        Command::Band => {
            let (ev, zeros) = cmd_forward(&exp)?;
            cmd_band(&exp, &ev, &zeros).map(|_| ())
        }
    }
}

/// Runs the command line given by `args` and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("RESONANCE_LOG", "warn")).try_init();
    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("--threads: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_entry() -> i32 {
    run(std::env::args_os())
}
