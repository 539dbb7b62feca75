//! The `trimqc` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 resource-limit refusal,
//! 3 solver non-convergence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::eigen::{self, EigenConfig, Spectrum, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::format::{fmt_sig, round_sig};
use crate::hamiltonian::{CouplingParams, HamiltonianOp};
use crate::lattice::Lattice;
use crate::mqc::mqc;
use crate::sweep::{self, preset, write_manifest, write_sweep, Manifest, RunOptions, SweepSpec};
use crate::thermal::gibbs;

#[derive(Debug, Parser)]
#[command(name = "trimqc", version, about = "Multipartite correlation in the anisotropic triangular Ising model")]
struct Cli {
    /// JSON file with default flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "TRIMQC_THREADS")]
    threads: Option<usize>,
    /// Seed for Krylov start vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Default, Args)]
struct ModelArgs {
    /// Lattice side; the patch has L(L+1)/2 sites.
    #[arg(long = "L")]
    side: Option<usize>,
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Transverse field.
    #[arg(long = "h", allow_negative_numbers = true)]
    h: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the lattice as JSON.
    Lattice {
        #[arg(long = "L")]
        side: Option<usize>,
    },
    /// Energies as CSV (index, energy).
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Keep only the k lowest levels (Krylov solver).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write eigenvectors as CSV.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Gibbs weights as CSV (index, energy, weight).
    Thermal {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "T")]
        temperature: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monogamy residual around one site, as JSON.
    Mqc {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        center: Option<usize>,
        #[arg(long = "T")]
        temperature: Option<f64>,
        #[arg(long)]
        allow_expensive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a preset or a JSON sweep spec; writes CSV and manifest files.
    Sweep {
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Points per linear axis (presets only).
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        allow_expensive: bool,
    },
}

/// Values a `--config` file may supply.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "L")]
    side: Option<usize>,
    #[serde(rename = "J")]
    j: Option<f64>,
    omega: Option<f64>,
    eta: Option<f64>,
    h: Option<f64>,
    #[serde(rename = "T")]
    temperature: Option<f64>,
    k: Option<usize>,
    center: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    #[serde(default)]
    allow_expensive: bool,
    preset: Option<String>,
    spec: Option<PathBuf>,
    resolution: Option<usize>,
}

struct Context<'a> {
    args: &'a [String],
    config: ConfigFile,
    seed: u64,
    threads: Option<usize>,
}

impl Context<'_> {
    fn params(&self, model: &ModelArgs) -> Result<(Lattice, CouplingParams)> {
        let side = self.side(model.side)?;
        let j = model
            .j
            .or(self.config.j)
            .ok_or_else(|| Error::invalid("missing --J"))?;
        let params = CouplingParams {
            j,
            omega: model.omega.or(self.config.omega).unwrap_or(1.0),
            eta: model.eta.or(self.config.eta).unwrap_or(1.0),
            h: model.h.or(self.config.h).unwrap_or(1.0),
        };
        params.validate()?;
        Ok((Lattice::new(side)?, params))
    }

    fn side(&self, flag: Option<usize>) -> Result<usize> {
        flag.or(self.config.side).ok_or_else(|| Error::invalid("missing --L"))
    }

    fn eigen(&self) -> EigenConfig {
        EigenConfig::default().with_seed(self.seed)
    }

    fn manifest(&self, output: &Path, elapsed_s: f64) -> Manifest {
        Manifest {
            preset: None,
            spec: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            started: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            elapsed_s,
            invocation: self.args.to_vec(),
            output: output.display().to_string(),
        }
    }

    /// Writes to `path` (plus a manifest) or to stdout.
    fn emit(&self, path: Option<&Path>, body: &str, out: &mut dyn Write, elapsed_s: f64) -> Result<()> {
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(p, body)?;
                write_manifest(&manifest_path(p), &self.manifest(p, elapsed_s))?;
            }
            None => out.write_all(body.as_bytes())?,
        }
        Ok(())
    }
}

fn manifest_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::invalid(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn spectrum_for(op: &HamiltonianOp, k: Option<usize>, config: &EigenConfig) -> Result<Spectrum> {
    match k {
        Some(k) => eigen::low_spectrum_with(op, k, config),
        None => eigen::full_spectrum_with(op, config),
    }
}

fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf8"))
}

#[derive(Serialize)]
struct MqcJson {
    #[serde(rename = "L")]
    side: usize,
    #[serde(rename = "J")]
    j: f64,
    omega: f64,
    eta: f64,
    h: f64,
    #[serde(rename = "T")]
    temperature: f64,
    #[serde(flatten)]
    result: crate::mqc::MqcResult,
    truncation_weight: f64,
}

fn execute(cli: Cli, args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    let ctx = Context {
        args,
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        threads: cli.threads.or(config.threads),
        config,
    };
    let clock = std::time::Instant::now();
    match cli.command {
        Command::Lattice { side } => {
            let lattice = Lattice::new(ctx.side(side)?)?;
            writeln!(out, "{}", lattice.to_json())?;
        }
        Command::Spectrum { model, k, out: path, vectors } => {
            let (lattice, params) = ctx.params(&model)?;
            let op = HamiltonianOp::new(&lattice, params)?;
            let spec = spectrum_for(&op, k.or(ctx.config.k), &ctx.eigen())?;
            let rows = spec.energies().iter().enumerate().map(|(i, e)| vec![i.to_string(), fmt_sig(*e)]);
            let body = csv_table(&["index", "energy"], rows)?;
            let path = path.or_else(|| ctx.config.out.clone());
            ctx.emit(path.as_deref(), &body, out, clock.elapsed().as_secs_f64())?;
            if let Some(vpath) = vectors {
                let mut header = vec!["basis".to_string()];
                header.extend((0..spec.len()).map(|k| format!("v{k}")));
                let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
                let v = spec.vectors();
                let rows = (0..v.nrows()).map(|b| {
                    std::iter::once(b.to_string()).chain((0..v.ncols()).map(|k| fmt_sig(v[(b, k)]))).collect()
                });
                let body = csv_table(&header_refs, rows)?;
                ctx.emit(Some(&vpath), &body, out, clock.elapsed().as_secs_f64())?;
            }
        }
        Command::Thermal { model, temperature, k, out: path } => {
            let (lattice, params) = ctx.params(&model)?;
            let t = temperature.or(ctx.config.temperature).unwrap_or(0.0);
            let op = HamiltonianOp::new(&lattice, params)?;
            let spec = spectrum_for(&op, k.or(ctx.config.k), &ctx.eigen())?;
            let th = gibbs(&spec, t)?;
            let rows = th
                .energies()
                .iter()
                .zip(th.weights())
                .enumerate()
                .map(|(i, (e, w))| vec![i.to_string(), fmt_sig(*e), fmt_sig(*w)]);
            let body = csv_table(&["index", "energy", "weight"], rows)?;
            writeln!(err, "truncation_weight {}", fmt_sig(th.truncation_weight()))?;
            let path = path.or_else(|| ctx.config.out.clone());
            ctx.emit(path.as_deref(), &body, out, clock.elapsed().as_secs_f64())?;
        }
        Command::Mqc { model, center, temperature, allow_expensive, out: path } => {
            let (lattice, params) = ctx.params(&model)?;
            let center = center.or(ctx.config.center).unwrap_or(2);
            lattice.check_site(center)?;
            let t = temperature.or(ctx.config.temperature).unwrap_or(0.0);
            let opts = RunOptions {
                threads: ctx.threads,
                allow_expensive: allow_expensive || ctx.config.allow_expensive,
                eigen: ctx.eigen(),
            };
            let prepared = sweep::prepare_point(&lattice, params, t, 1, &opts)?;
            let mut result = mqc(&prepared.state, center)?;
            result.one_vs_rest = round_sig(result.one_vs_rest);
            result.radicand = round_sig(result.radicand);
            result.t_n = round_sig(result.t_n);
            result.pairwise.values_mut().for_each(|v| *v = round_sig(*v));
            let json = MqcJson {
                side: lattice.side(),
                j: params.j,
                omega: params.omega,
                eta: params.eta,
                h: params.h,
                temperature: t,
                result,
                truncation_weight: round_sig(prepared.truncation_weight),
            };
            let body = serde_json::to_string_pretty(&json)? + "\n";
            let path = path.or_else(|| ctx.config.out.clone());
            ctx.emit(path.as_deref(), &body, out, clock.elapsed().as_secs_f64())?;
        }
        Command::Sweep { preset: name, spec, out: dir, resolution, allow_expensive } => {
            let dir = dir
                .or_else(|| ctx.config.out.clone())
                .ok_or_else(|| Error::invalid("sweep needs --out <dir>"))?;
            let opts = RunOptions {
                threads: ctx.threads,
                allow_expensive: allow_expensive || ctx.config.allow_expensive,
                eigen: ctx.eigen(),
            };
            let name = name.or_else(|| ctx.config.preset.clone());
            let spec_path = spec.or_else(|| ctx.config.spec.clone());
            let resolution = resolution.or(ctx.config.resolution);
            let jobs = match (name.as_deref(), spec_path) {
                (Some(name), None) => {
                    let mut p = preset(name)?;
                    if let Some(n) = resolution {
                        if n < 2 {
                            return Err(Error::invalid("--resolution must be >= 2"));
                        }
                        p = p.with_resolution(n);
                    }
                    p.jobs.into_iter().map(|j| (j.label, j.spec)).collect::<Vec<_>>()
                }
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| Error::invalid(format!("cannot read spec {}: {e}", path.display())))?;
                    let spec: SweepSpec = serde_json::from_str(&text)
                        .map_err(|e| Error::invalid(format!("bad spec {}: {e}", path.display())))?;
                    let label = path.file_stem().map_or("sweep".into(), |s| s.to_string_lossy().into_owned());
                    vec![(label, spec)]
                }
                (Some(_), Some(_)) => return Err(Error::invalid("use either --preset or --spec, not both")),
                (None, None) => return Err(Error::invalid("sweep needs --preset or --spec")),
            };
            // validate every job before computing anything
            for (_, spec) in &jobs {
                spec.validate()?;
                let n_sites = spec.side * (spec.side + 1) / 2;
                if spec.needs_thermal() && n_sites > sweep::THERMAL_DENSE_SITES && !opts.allow_expensive {
                    return Err(Error::ResourceLimit(format!(
                        "thermal sweep on {n_sites} sites refused; pass --allow-expensive"
                    )));
                }
            }
            for (label, spec) in &jobs {
                let result = sweep::run_sweep(spec, &opts)?;
                let (csv_path, _) = write_sweep(&dir, label, &result, name.as_deref(), args)?;
                let failed = result.records.iter().filter(|r| r.error.is_some()).count();
                writeln!(err, "wrote {} ({} points, {failed} failed)", csv_path.display(), result.records.len())?;
            }
        }
    }
    Ok(())
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli, args, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
