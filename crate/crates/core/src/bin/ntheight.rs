use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ntheight::elliptic::{CoordSpec, CurveSpec, PointSpec};
use ntheight::experiments::{self as ex, ExperimentConfig, Format, ReportMeta, Tabular};
use ntheight::splitting::TowerSpec;
use ntheight::{Error, Result};

#[derive(Parser)]
#[command(name = "ntheight", version, about = "Canonical heights, splitting densities and auxiliary sections")]
struct Cli {
    /// Experiment config (JSON, "schema": 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; reports go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working precision in bits; height tolerance defaults to 2^-bits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Splitting ratios N_q(K_i)/[K_i:Q] along a tower.
    Psi {
        /// Tower JSON (levels and witnesses).
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(long)]
        q: Vec<u64>,
    },
    /// Prime ideals above p in Z[x]/(f).
    Factor {
        /// Coefficients, constant term first, e.g. "1,0,1".
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Canonical heights of points.
    Height {
        /// Rational curve "a,b" for y² = x³ + ax + b.
        #[arg(long)]
        curve: Option<String>,
        /// Point "x,y" or "O"; repeatable.
        #[arg(long)]
        point: Vec<String>,
    },
    /// Small points by naive height, with certified canonical heights.
    Search {
        #[arg(long)]
        curve: Option<String>,
    },
    /// Auxiliary sections.
    Aux {
        #[command(subcommand)]
        cmd: AuxCmd,
    },
    /// Minimum height along a tower against ψ_p log p / p².
    Bound,
    /// φ_X against the primed sums over places of norm at most X.
    Multiplace,
    /// Size of the small residually trivial set against L².
    ZeroCount,
}

#[derive(Subcommand)]
enum AuxCmd {
    /// Solve for a section and save it.
    Build,
    /// Check the valuation drop at points reducing to the identity.
    VerifyDrop {
        /// Saved section JSON.
        #[arg(long)]
        aux: Option<PathBuf>,
        #[arg(long)]
        point: Vec<String>,
        #[arg(long)]
        p: Option<u64>,
    },
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Config(format!("cannot parse integer list {s:?}"))))
        .collect()
}

fn parse_curve(s: &str) -> Result<CurveSpec> {
    match parse_ints(s)?.as_slice() {
        [a, b] => Ok(CurveSpec { field: vec![0, 1], a: CoordSpec::Int(*a), b: CoordSpec::Int(*b) }),
        _ => Err(Error::Config(format!("--curve expects \"a,b\", got {s:?}"))),
    }
}

fn parse_point(s: &str) -> Result<PointSpec> {
    if s.trim() == "O" {
        return Ok(PointSpec::Infinity("O".into()));
    }
    match s.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
        [x, y] => Ok(PointSpec::Affine([CoordSpec::Str(x.to_string()), CoordSpec::Str(y.to_string())])),
        _ => Err(Error::Config(format!("--point expects \"x,y\" or \"O\", got {s:?}"))),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config(format!("{}: field `{}`: {}", path.display(), e.path(), e.inner())))
}

fn emit<T: Tabular>(cli: &Cli, cfg: &ExperimentConfig, command: &str, stem: &str, body: &T) -> Result<()> {
    let meta = ReportMeta::new(command, cfg);
    let format: Format = cli.format.parse()?;
    match &cli.out {
        Some(dir) => {
            for p in ex::write_report(dir, stem, &meta, body, format)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => match format {
            Format::Json => print!("{}", ex::to_json(&meta, body)),
            Format::Csv => print!("{}", body.table().to_csv()),
        },
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.precision {
        cfg.precision = Some(b);
    }
    match &cli.cmd {
        Cmd::Psi { tower, q } => {
            if let Some(t) = tower {
                cfg.tower = Some(read_json::<TowerSpec>(t)?);
                cfg.tower_build = None;
            }
            if !q.is_empty() {
                cfg.q = q.clone();
            }
        }
        Cmd::Factor { poly, p } => {
            if let Some(f) = poly {
                cfg.poly = Some(parse_ints(f)?);
            }
            cfg.p = p.or(cfg.p);
        }
        Cmd::Height { curve, point } => {
            if let Some(c) = curve {
                cfg.curve = Some(parse_curve(c)?);
            }
            if !point.is_empty() {
                cfg.points = point.iter().map(|s| parse_point(s)).collect::<Result<_>>()?;
            }
        }
        Cmd::Search { curve } => {
            if let Some(c) = curve {
                cfg.curve = Some(parse_curve(c)?);
            }
        }
        Cmd::Aux { cmd: AuxCmd::VerifyDrop { aux, point, p } } => {
            if let Some(a) = aux {
                cfg.aux_file = Some(a.display().to_string());
            }
            if !point.is_empty() {
                cfg.points = point.iter().map(|s| parse_point(s)).collect::<Result<_>>()?;
            }
            cfg.p = p.or(cfg.p);
        }
        _ => {}
    }
    cfg.validate()?;

    match &cli.cmd {
        Cmd::Psi { .. } => emit(cli, &cfg, "psi", "psi", &ex::run_psi_report(&cfg)?),
        Cmd::Factor { .. } => emit(cli, &cfg, "factor", "factor", &ex::run_factor(&cfg)?),
        Cmd::Height { .. } => emit(cli, &cfg, "height", "height", &ex::run_height(&cfg)?),
        Cmd::Search { .. } => emit(cli, &cfg, "search", "search", &ex::run_search(&cfg)?),
        Cmd::Aux { cmd: AuxCmd::Build } => {
            let f = ex::section_from_config(&cfg)?;
            match &cli.out {
                // The section file itself is what `verify-drop --aux` reads.
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
                    let path = dir.join("aux_section.json");
                    let text = serde_json::to_string_pretty(&f).expect("section serializes") + "\n";
                    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    eprintln!("wrote {}", path.display());
                    emit(cli, &cfg, "aux build", "aux_build", &f)
                }
                None => emit(cli, &cfg, "aux build", "aux_build", &f),
            }
        }
        Cmd::Aux { cmd: AuxCmd::VerifyDrop { .. } } => {
            let r = ex::run_verify_drop(&cfg)?;
            emit(cli, &cfg, "aux verify-drop", "verify_drop", &r)?;
            if let Some(c) = r.checks.iter().find(|c| !c.report.holds) {
                eprintln!("warning: drop inequality fails at {}", ex::point_cell(&c.point));
            }
            Ok(())
        }
        Cmd::Bound => {
            let r = ex::run_bound_experiment(&cfg)?;
            emit(cli, &cfg, "bound", "bound", &r)?;
            match r.first_error() {
                Some(e) => {
                    eprintln!("error at a tower level (partial report kept): {}", e.message);
                    Err(match e.exit_code {
                        3 => Error::PrecisionExhausted(e.message.clone()),
                        4 => Error::CapExceeded(e.message.clone()),
                        2 => Error::Config(e.message.clone()),
                        _ => Error::Precondition(e.message.clone()),
                    })
                }
                None => Ok(()),
            }
        }
        Cmd::Multiplace => emit(cli, &cfg, "multiplace", "multiplace", &ex::run_multiplace_experiment(&cfg)?),
        Cmd::ZeroCount => {
            let r = ex::run_zero_count(&cfg)?;
            emit(cli, &cfg, "zero-count", "zero_count", &r)?;
            if r.violation {
                eprintln!("WARNING: #S * Tf = {} exceeds L^2 = {} (with C2 = 1)", r.lhs, r.rhs);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
