//! Command-line front end. Every subcommand writes plot-ready CSV or JSON,
//! byte-identical for identical inputs.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bands::{bloch_point, d_vector, momentum_from_energy, winding_number};
use crate::error::{Error, Result};
use crate::params::{Band, Coupling, ParamFile, System};
use crate::spectral::{
    classify_regime, extract_features, lamb_shift, poles, sweep_contour, sweep_spectrum,
};
use crate::validation::{run_validation, DEFAULT_SEED};
use crate::{fmt_sci, linspace, round_sig};

#[derive(Debug, Parser)]
#[command(
    name = "ssh-lambda",
    version,
    about = "Single-photon scattering through an SSH waveguide with a driven Lambda emitter"
)]
pub struct Cli {
    /// JSON parameter file; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Write output here (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandArg {
    Upper,
    Lower,
}

/// Parameter overrides, accepted before or after the subcommand.
#[derive(Debug, Args)]
pub struct Overrides {
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    pub j: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_rabi: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta_c: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_e: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Coupling configuration: A, B or AB.
    #[arg(long, global = true)]
    pub config: Option<Coupling>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x1: Option<i64>,
    /// Probed band.
    #[arg(long, global = true, value_enum, default_value = "upper")]
    pub band: BandArg,
}

#[derive(Debug, Args)]
pub struct DkGrid {
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    pub dk_min: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub dk_max: f64,
    #[arg(long, default_value_t = 401)]
    pub dk_steps: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion and d-vector over the Brillouin zone.
    Bands {
        #[arg(long, default_value_t = 201)]
        k_steps: usize,
    },
    /// Winding number and Zak phase.
    Winding {
        #[arg(long, default_value_t = 1024)]
        samples: usize,
    },
    /// Transmission spectrum versus detuning.
    Spectrum {
        #[command(flatten)]
        grid: DkGrid,
    },
    /// Transmission over detuning and Rabi frequency.
    Contour {
        #[command(flatten)]
        grid: DkGrid,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        om_min: f64,
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        om_max: f64,
        #[arg(long, default_value_t = 41)]
        om_steps: usize,
    },
    /// Poles, regime label and Lamb shift at control-field resonance.
    Poles {
        /// Photon energy that fixes k; defaults to omega_e.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
    },
    /// Dips and peaks of a transmission spectrum.
    Features {
        #[command(flatten)]
        grid: DkGrid,
    },
    /// Cross-check closed forms against the lattice oracles.
    Validate {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Parses `argv` and runs it. Returns the process exit code: 0 on success,
/// 1 when validation tolerances are breached, 2 on usage or other errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs a parsed command. `Ok(false)` means it ran but a tolerance failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    let system = load_system(cli)?;
    let band = match cli.overrides.band {
        BandArg::Upper => Band::Upper,
        BandArg::Lower => Band::Lower,
    };
    let mut ok = true;
    let body = match &cli.command {
        Command::Bands { k_steps } => bands(&system, *k_steps, cli.format)?,
        Command::Winding { samples } => winding(&system, *samples, cli.format)?,
        Command::Spectrum { grid } => spectrum(&system, grid, band, cli.format)?,
        Command::Contour {
            grid,
            om_min,
            om_max,
            om_steps,
        } => {
            let om = axis("om", *om_min, *om_max, *om_steps)?;
            contour(&system, grid, &om, band, cli.format)?
        }
        Command::Poles { omega } => pole_report(&system, *omega, band, cli.format)?,
        Command::Features { grid } => features(&system, grid, band, cli.format)?,
        Command::Validate { seed } => {
            if cli.format == Some(Format::Csv) {
                return Err(Error::InvalidArgument("validate emits JSON only".into()));
            }
            let report = run_validation(*seed)?;
            ok = report.passed;
            let value = serde_json::to_value(&report).expect("report serializes");
            to_json(value)
        }
    };
    emit(cli.out.as_deref(), &body)?;
    Ok(ok)
}

fn load_system(cli: &Cli) -> Result<System> {
    let mut file = ParamFile::default();
    if let Some(path) = &cli.params {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        file = serde_json::from_str(&text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    let o = &cli.overrides;
    let flags = ParamFile {
        j: o.j,
        delta: o.delta,
        omega_e: o.omega_e,
        delta_c: o.delta_c,
        omega_rabi: o.omega_rabi,
        g: o.g,
        alpha: o.alpha,
        config: o.config,
        x1: o.x1,
    };
    // An alpha flag on its own should pick the variant even if the file
    // named one.
    let mut merged = file.merge(&flags);
    if o.alpha.is_some() && o.config.is_none() {
        merged.config = None;
    }
    merged.to_system()
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn axis(name: &str, lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "--{name}-steps must be at least 2, got {steps}"
        )));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "--{name}-min ({lo}) must be below --{name}-max ({hi})"
        )));
    }
    Ok(linspace(lo, hi, steps))
}

/// Writes to stdout, or to `path` through a temp file and rename.
fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(body.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| io_error(Path::new("<stdout>"), e));
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, body).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_error(path, e)
    })
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Pretty JSON with every float rounded to 12 significant digits.
fn to_json(value: Value) -> String {
    fn round(v: Value) -> Value {
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
                serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
            }
            Value::Array(a) => Value::Array(a.into_iter().map(round).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round(v))).collect()),
            other => other,
        }
    }
    let mut s = serde_json::to_string_pretty(&round(value)).expect("json serializes");
    s.push('\n');
    s
}

fn render(format: Format, header: &[&str], rows: Vec<Vec<f64>>) -> String {
    match format {
        Format::Csv => csv(
            header,
            rows.into_iter().map(|r| r.into_iter().map(fmt_sci).collect()),
        ),
        Format::Json => to_json(Value::Array(
            rows.into_iter()
                .map(|r| {
                    Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(h, x)| (h.to_string(), json!(x)))
                            .collect(),
                    )
                })
                .collect(),
        )),
    }
}

fn bands(system: &System, k_steps: usize, format: Option<Format>) -> Result<String> {
    let ks = axis("k", -std::f64::consts::PI, std::f64::consts::PI, k_steps)?;
    let rows = ks
        .iter()
        .map(|&k| {
            let p = bloch_point(k, &system.waveguide);
            let d = d_vector(k, &system.waveguide);
            vec![k, p.omega, -p.omega, d.dx, d.dy]
        })
        .collect();
    Ok(render(
        format.unwrap_or(Format::Csv),
        &["k", "omega_upper", "omega_lower", "dx", "dy"],
        rows,
    ))
}

fn winding(system: &System, samples: usize, format: Option<Format>) -> Result<String> {
    let nu = winding_number(&system.waveguide, samples)?;
    let zak = nu as f64 * std::f64::consts::PI;
    let delta = system.waveguide.delta;
    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => to_json(json!({ "delta": delta, "nu": nu, "zak_phase": zak })),
        Format::Csv => csv(
            &["delta", "nu", "zak_phase"],
            [vec![fmt_sci(delta), nu.to_string(), fmt_sci(zak)]],
        ),
    })
}

fn spectrum(system: &System, grid: &DkGrid, band: Band, format: Option<Format>) -> Result<String> {
    let dk = axis("dk", grid.dk_min, grid.dk_max, grid.dk_steps)?;
    let spec = sweep_spectrum(system, &dk, band)?;
    let rows = spec
        .records
        .iter()
        .map(|r| vec![r.delta_k, r.trans, r.refl, r.t.0, r.t.1])
        .collect();
    Ok(render(
        format.unwrap_or(Format::Csv),
        &["delta_k", "T", "R", "re_t", "im_t"],
        rows,
    ))
}

fn contour(
    system: &System,
    grid: &DkGrid,
    om: &[f64],
    band: Band,
    format: Option<Format>,
) -> Result<String> {
    let dk = axis("dk", grid.dk_min, grid.dk_max, grid.dk_steps)?;
    if om[0] < 0.0 {
        return Err(Error::InvalidArgument("--om-min must be non-negative".into()));
    }
    let c = sweep_contour(system, &dk, om, band)?;
    let rows = c
        .records
        .iter()
        .map(|r| vec![r.delta_k, r.omega_rabi, r.trans])
        .collect();
    Ok(render(
        format.unwrap_or(Format::Csv),
        &["delta_k", "omega_rabi", "T"],
        rows,
    ))
}

const REGIME_NOTE: &str =
    "heuristic cutoffs on ratio: < 0.25 lorentzian, 0.25..=4 eit, > 4 ats";

fn pole_report(
    system: &System,
    omega: Option<f64>,
    band: Band,
    format: Option<Format>,
) -> Result<String> {
    let omega = omega.unwrap_or(system.emitter.omega_e);
    let k = momentum_from_energy(omega, &system.waveguide, band)?;
    let p = poles(system, k, band)?;
    let regime = classify_regime(system, k, band);
    let shift = lamb_shift(system);
    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => to_json(json!({
            "pole_plus": [p.pole_plus.re, p.pole_plus.im],
            "pole_minus": [p.pole_minus.re, p.pole_minus.im],
            "regime": regime.label.name(),
            "ratio": regime.ratio,
            "lamb_shift": shift,
            "note": REGIME_NOTE,
        })),
        Format::Csv => csv(
            &[
                "re_pole_plus",
                "im_pole_plus",
                "re_pole_minus",
                "im_pole_minus",
                "regime",
                "ratio",
                "lamb_shift",
            ],
            [vec![
                fmt_sci(p.pole_plus.re),
                fmt_sci(p.pole_plus.im),
                fmt_sci(p.pole_minus.re),
                fmt_sci(p.pole_minus.im),
                regime.label.name().to_string(),
                fmt_sci(regime.ratio),
                fmt_sci(shift),
            ]],
        ),
    })
}

fn features(system: &System, grid: &DkGrid, band: Band, format: Option<Format>) -> Result<String> {
    let dk = axis("dk", grid.dk_min, grid.dk_max, grid.dk_steps)?;
    let spec = sweep_spectrum(system, &dk, band)?;
    let x: Vec<f64> = spec.records.iter().map(|r| r.delta_k).collect();
    let y: Vec<f64> = spec.records.iter().map(|r| r.trans).collect();
    let feats = extract_features(&x, &y)?;
    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => to_json(serde_json::to_value(&feats).expect("features serialize")),
        Format::Csv => {
            let mut s = String::from("kind,position,depth,fwhm,asymmetry\n");
            for f in &feats {
                let kind = serde_json::to_value(f.kind).expect("kind serializes");
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    kind.as_str().unwrap_or_default(),
                    fmt_sci(f.position),
                    fmt_sci(f.depth),
                    fmt_sci(f.fwhm),
                    fmt_sci(f.asymmetry)
                );
            }
            s
        }
    })
}
