//! Command-line front end: planet-definition ingestion, subcommand dispatch,
//! precision flags, and CSV/JSON report emission.
//!
//! Every subcommand writes `<experiment>.csv` (the full table) and
//! `<experiment>.json` (a summary sidecar) into `--out`, prints the summary
//! on stdout, and exits 0 on success, 1 on a usage or input error, and 2 on
//! a numerical failure.  The same argv against the same files produces
//! byte-identical CSV.  The environment variable `TOOL_THREADS` caps the
//! number of worker threads.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use gravipade::experiments::{
    error_scan, extrapolation_benchmark, pole_portrait_with_tols, precision_sweep, ratio_test,
    roughened_profile, series_for, Cell, ExperimentReport, PORTRAIT_PAIR_TOL,
};
use gravipade::mp::{parse_rational, rational_to_string, MpReal, PrecisionCtx};
use gravipade::pade::{build_pade, pade_eval_axis, weight_colatitude, DEFAULT_RESIDUE_TOL};
use gravipade::planet::{brillouin_radius, ShapeProfile};
use gravipade::singularity::{singularity_set, SingularityClass, SingularitySet};
use gravipade::Error;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reserves status 2 for usage problems; here 2 means a
            // numerical failure, so usage errors map to 1.  Help and
            // version requests are successes.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_thread_pool();
    match cli.command.run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(failure_code(&e))
        }
    }
}

/// Cap rayon's worker count from `TOOL_THREADS` when it is set to a
/// positive integer.
fn init_thread_pool() {
    if let Some(n) = std::env::var("TOOL_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Exit status for a library error: everything that amounts to bad input
/// (files, flag values, impossible requests) is a usage error (1); what the
/// numerics could not deliver is a numerical failure (2).
fn failure_code(err: &Error) -> u8 {
    match err {
        Error::PlanetFile { .. }
        | Error::NumberFormat { .. }
        | Error::UnsupportedProfile { .. }
        | Error::RippleTooLarge { .. }
        | Error::SeriesTooShort { .. }
        | Error::NegativeProfile { .. }
        | Error::ProfileTooSimple { .. }
        | Error::DegenerateDiscriminant
        | Error::NoConvergenceLimitingRoots { .. }
        | Error::PointNotExterior { .. } => 1,
        _ => 2,
    }
}

#[derive(Parser)]
#[command(
    name = "gravipade",
    version,
    about = "Gravity coefficients of axisymmetric planets and their Padé \
             continuation below the Brillouin sphere",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every planet-driven subcommand.
#[derive(Args)]
struct PlanetOpts {
    /// Planet definition file (JSON).
    #[arg(long, value_name = "FILE")]
    planet: PathBuf,

    /// Working precision in decimal digits (at least 16).
    #[arg(long, value_name = "D", default_value_t = 60,
          value_parser = clap::value_parser!(u32).range(16..))]
    digits: u32,

    /// Directory for the CSV table and the JSON summary.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

impl PlanetOpts {
    fn load(&self) -> gravipade::Result<(ShapeProfile, PrecisionCtx)> {
        let profile = ShapeProfile::from_json_file(&self.planet)?;
        Ok((profile, PrecisionCtx::new(self.digits)))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exterior-potential expansion coefficients A_0..A_n.
    Coeffs {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Highest coefficient index.
        #[arg(long, value_name = "N", default_value_t = 100)]
        n: usize,
    },

    /// Poles of the [N,N] approximant against the exact singularities.
    Poles {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Approximant order N (uses coefficients A_0..A_2N).
        #[arg(long = "N", value_name = "N", default_value_t = 100,
              value_parser = clap::value_parser!(usize))]
        order: usize,

        /// Off-axis ray colatitude in radians (default: the symmetry axis).
        #[arg(long, value_name = "RAD")]
        theta: Option<f64>,

        /// Froissart pairing threshold, relative to the convergence radius.
        #[arg(long, value_name = "TOL", default_value_t = PORTRAIT_PAIR_TOL)]
        pair_tol: f64,

        /// Froissart residue threshold, relative to the median residue.
        #[arg(long, value_name = "TOL", default_value_t = DEFAULT_RESIDUE_TOL)]
        residue_tol: f64,
    },

    /// Exact singularity set: discriminant roots, classes, and radii.
    Discriminant {
        #[command(flatten)]
        opts: PlanetOpts,
    },

    /// Evaluate the Padé continuation of the potential at axis points.
    Continue {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Series truncation degree (default 200).
        #[arg(long, value_name = "T")]
        terms: Option<usize>,

        /// Approximant order N (default: terms/2).
        #[arg(long = "N", value_name = "N",
              value_parser = clap::value_parser!(usize))]
        order: Option<usize>,

        /// Evaluation ray colatitude in radians (default: the symmetry axis).
        #[arg(long, value_name = "RAD")]
        theta: Option<f64>,

        /// Evaluation point Z (repeatable).
        #[arg(long = "at", value_name = "Z", required = true)]
        at: Vec<f64>,
    },

    /// Relative error of series vs Padé on an axis grid around the
    /// Brillouin radius.
    ErrorScan {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Series truncation degree.
        #[arg(long, value_name = "T", default_value_t = 500)]
        terms: usize,

        /// Lower grid endpoint.
        #[arg(long, value_name = "Z", default_value_t = 0.88)]
        z_min: f64,

        /// Upper grid endpoint.
        #[arg(long, value_name = "Z", default_value_t = 1.6)]
        z_max: f64,

        /// Number of grid points.
        #[arg(long, value_name = "K", default_value_t = 30,
              value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        points: usize,
    },

    /// Pole portrait of the colatitude-weighted series along a ray.
    ThetaPortrait {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Approximant order N.
        #[arg(long = "N", value_name = "N", default_value_t = 50,
              value_parser = clap::value_parser!(usize))]
        order: usize,

        /// Ray colatitude in radians.
        #[arg(long, value_name = "RAD")]
        theta: f64,

        /// Froissart pairing threshold, relative to the convergence radius.
        #[arg(long, value_name = "TOL", default_value_t = PORTRAIT_PAIR_TOL)]
        pair_tol: f64,

        /// Froissart residue threshold, relative to the median residue.
        #[arg(long, value_name = "TOL", default_value_t = DEFAULT_RESIDUE_TOL)]
        residue_tol: f64,
    },

    /// Pole-portrait degradation when the coefficients are rounded.
    PrecisionSweep {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Number of series coefficients to build from.
        #[arg(long, value_name = "T", default_value_t = 50)]
        terms: usize,

        /// Rounding precisions in decimal digits, comma-separated.
        #[arg(long, value_name = "D,D,...", value_delimiter = ',',
              default_values_t = vec![10u32, 11, 12, 13])]
        round_digits: Vec<u32>,
    },

    /// Series vs [N,N] extrapolation accuracy for (1+x²)^(3/2) at a low
    /// and a high working precision.
    BenchExtrapolation {
        /// Working precision of the high-precision build (at least 16).
        #[arg(long, value_name = "D", default_value_t = 1000,
              value_parser = clap::value_parser!(u32).range(16..))]
        digits: u32,

        /// Working precision of the low-precision build (at least 16).
        #[arg(long, value_name = "D", default_value_t = 16,
              value_parser = clap::value_parser!(u32).range(16..))]
        low_digits: u32,

        /// Series truncation degree (default 1500).
        #[arg(long, value_name = "T")]
        terms: Option<usize>,

        /// Approximant order N (default: terms/2).
        #[arg(long = "N", value_name = "N",
              value_parser = clap::value_parser!(usize))]
        order: Option<usize>,

        /// Largest evaluation point x.
        #[arg(long, value_name = "X", default_value_t = 10.0)]
        x_max: f64,

        /// Number of grid points from 0 to x-max.
        #[arg(long, value_name = "K", default_value_t = 41,
              value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(2..))]
        points: usize,

        /// Directory for the CSV table and the JSON summary.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },

    /// Normalized coefficient ratios n²·A_2n/|Z₀|^2n — flat iff |Z₀| is the
    /// convergence radius.
    RatioTest {
        #[command(flatten)]
        opts: PlanetOpts,

        /// Highest coefficient index scanned (ratios use 2n ≤ terms).
        #[arg(long, value_name = "T", default_value_t = 400)]
        terms: usize,

        /// Scale factor applied to |Z₀| before normalizing.
        #[arg(long, value_name = "S", default_value_t = 1.0)]
        scale: f64,
    },

    /// Write a planet file with rough Chebyshev topography and report how
    /// its singularities move.
    Roughen {
        /// Polynomial degree of the smooth base profile (even, ≥ 2).
        #[arg(long, value_name = "K", default_value_t = 10)]
        base_order: usize,

        /// Polynomial degree of the added ripple (even, ≥ 2).
        #[arg(long, value_name = "K", default_value_t = 16)]
        ripple_order: usize,

        /// Ripple amplitude as an exact rational, e.g. "1/50".
        #[arg(long, value_name = "Q", default_value = "1/50")]
        ripple_amp: String,

        /// Working precision for the singularity summary (at least 16).
        #[arg(long, value_name = "D", default_value_t = 60,
              value_parser = clap::value_parser!(u32).range(16..))]
        digits: u32,

        /// Directory for the planet file and the reports.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
}

impl Command {
    fn run(self) -> gravipade::Result<()> {
        match self {
            Command::Coeffs { opts, n } => cmd_coeffs(&opts, n),
            Command::Poles {
                opts,
                order,
                theta,
                pair_tol,
                residue_tol,
            } => cmd_portrait(&opts, order, theta, pair_tol, residue_tol, None),
            Command::Discriminant { opts } => cmd_discriminant(&opts),
            Command::Continue {
                opts,
                terms,
                order,
                theta,
                at,
            } => cmd_continue(&opts, terms, order, theta, &at),
            Command::ErrorScan {
                opts,
                terms,
                z_min,
                z_max,
                points,
            } => cmd_error_scan(&opts, terms, z_min, z_max, points),
            Command::ThetaPortrait {
                opts,
                order,
                theta,
                pair_tol,
                residue_tol,
            } => cmd_portrait(
                &opts,
                order,
                Some(theta),
                pair_tol,
                residue_tol,
                Some("theta_portrait"),
            ),
            Command::PrecisionSweep {
                opts,
                terms,
                round_digits,
            } => cmd_precision_sweep(&opts, terms, &round_digits),
            Command::BenchExtrapolation {
                digits,
                low_digits,
                terms,
                order,
                x_max,
                points,
                out,
            } => cmd_bench(digits, low_digits, terms, order, x_max, points, &out),
            Command::RatioTest { opts, terms, scale } => cmd_ratio_test(&opts, terms, scale),
            Command::Roughen {
                base_order,
                ripple_order,
                ripple_amp,
                digits,
                out,
            } => cmd_roughen(base_order, ripple_order, &ripple_amp, digits, &out),
        }
    }
}

/// Reject non-finite flag values up front; they would silently poison the
/// arithmetic as NaN.
fn finite(field: &str, v: f64) -> gravipade::Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumberFormat {
            field: field.into(),
            text: v.to_string(),
            reason: "must be finite".into(),
        })
    }
}

/// The CliConfig invariant `terms ≥ 2N + 1`, checked only when the user
/// supplied both flags (a defaulted value cannot contradict an explicit one).
fn check_terms_order(terms: Option<usize>, order: Option<usize>) -> gravipade::Result<()> {
    if let (Some(t), Some(n)) = (terms, order) {
        if t < 2 * n + 1 {
            return Err(Error::SeriesTooShort {
                have: t,
                n,
                need: 2 * n + 1,
            });
        }
    }
    Ok(())
}

/// `points` values from `lo` to `hi` inclusive, computed in f64 so the grid
/// is bit-reproducible across precisions.
fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| lo + step * k as f64).collect()
}

/// Write the report pair and echo the summary, notes, and file paths.
fn emit(report: &ExperimentReport, dir: &Path) -> gravipade::Result<()> {
    let (csv, json) = report.write_to_dir(dir)?;
    println!("wrote {}", csv.display());
    println!("wrote {}", json.display());
    let sig = report.digits as usize;
    for (key, value) in &report.summary {
        println!("{key} = {}", value.render(sig));
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    Ok(())
}

fn cmd_coeffs(opts: &PlanetOpts, n: usize) -> gravipade::Result<()> {
    let (profile, ctx) = opts.load()?;
    let series = series_for(&profile, n, &ctx)?;
    let rows = (0..=series.n_max())
        .map(|k| vec![Cell::Int(k as i64), Cell::Real(series.coeff(k).clone())])
        .collect();
    let report = ExperimentReport {
        experiment: "coeffs".into(),
        params: vec![
            ("planet".into(), profile.to_json().to_string()),
            ("digits".into(), ctx.digits().to_string()),
            ("n".into(), n.to_string()),
        ],
        columns: vec!["n".into(), "A_n".into()],
        rows,
        summary: vec![
            ("n_max".into(), Cell::Int(series.n_max() as i64)),
            ("A_0".into(), Cell::Real(series.coeff(0).clone())),
            (
                "brillouin_radius".into(),
                Cell::Real(brillouin_radius(&profile, &ctx)),
            ),
        ],
        notes: vec![],
        digits: ctx.digits(),
    };
    emit(&report, &opts.out)
}

fn cmd_portrait(
    opts: &PlanetOpts,
    order: usize,
    theta: Option<f64>,
    pair_tol: f64,
    residue_tol: f64,
    rename: Option<&str>,
) -> gravipade::Result<()> {
    if order < 1 {
        return Err(Error::SeriesTooShort {
            have: 0,
            n: 1,
            need: 3,
        });
    }
    finite("--pair-tol", pair_tol)?;
    finite("--residue-tol", residue_tol)?;
    let (profile, ctx) = opts.load()?;
    let theta_mp = match theta {
        Some(t) => Some(MpReal::from_f64(finite("--theta", t)?, &ctx)),
        None => None,
    };
    let mut report = pole_portrait_with_tols(
        &profile,
        order,
        theta_mp.as_ref(),
        pair_tol,
        residue_tol,
        &ctx,
    )?;
    if let Some(name) = rename {
        report.experiment = name.into();
    }
    emit(&report, &opts.out)
}

/// Classified-root rows shared by `discriminant` and `roughen`.
fn singularity_rows(sing: &SingularitySet) -> Vec<Vec<Cell>> {
    sing.roots
        .iter()
        .map(|r| {
            vec![
                Cell::Real(r.z0.re.clone()),
                Cell::Real(r.z0.im.clone()),
                Cell::Real(r.rotated.re.clone()),
                Cell::Real(r.rotated.im.clone()),
                Cell::Text(r.class.name().into()),
            ]
        })
        .collect()
}

/// Radii and per-class counts shared by `discriminant` and `roughen`.
fn singularity_summary(sing: &SingularitySet, brillouin: MpReal) -> Vec<(String, Cell)> {
    let count = |class: SingularityClass| {
        Cell::Int(sing.roots.iter().filter(|r| r.class == class).count() as i64)
    };
    vec![
        ("brillouin_radius".into(), Cell::Real(brillouin)),
        (
            "convergence_radius".into(),
            Cell::Real(sing.convergence_radius.clone()),
        ),
        ("interior_count".into(), count(SingularityClass::Interior)),
        ("boundary_count".into(), count(SingularityClass::Boundary)),
        ("exterior_count".into(), count(SingularityClass::Exterior)),
        ("terminating".into(), Cell::Int(sing.terminating as i64)),
    ]
}

const SINGULARITY_COLUMNS: [&str; 5] = ["re", "im", "rotated_re", "rotated_im", "class"];

fn cmd_discriminant(opts: &PlanetOpts) -> gravipade::Result<()> {
    let (profile, ctx) = opts.load()?;
    let sing = singularity_set(&profile, &ctx)?;
    let report = ExperimentReport {
        experiment: "discriminant".into(),
        params: vec![
            ("planet".into(), profile.to_json().to_string()),
            ("digits".into(), ctx.digits().to_string()),
        ],
        columns: SINGULARITY_COLUMNS.iter().map(|&c| c.into()).collect(),
        rows: singularity_rows(&sing),
        summary: singularity_summary(&sing, brillouin_radius(&profile, &ctx)),
        notes: vec![],
        digits: ctx.digits(),
    };
    emit(&report, &opts.out)
}

fn cmd_continue(
    opts: &PlanetOpts,
    terms_flag: Option<usize>,
    order_flag: Option<usize>,
    theta: Option<f64>,
    at: &[f64],
) -> gravipade::Result<()> {
    check_terms_order(terms_flag, order_flag)?;
    let terms = terms_flag.unwrap_or(200);
    let n = order_flag.unwrap_or(terms / 2);
    if n < 1 {
        return Err(Error::SeriesTooShort {
            have: terms + 1,
            n: 1,
            need: 3,
        });
    }
    let (profile, ctx) = opts.load()?;
    let series = series_for(&profile, terms, &ctx)?;
    let series = match theta {
        Some(t) => weight_colatitude(&series, &MpReal::from_f64(finite("--theta", t)?, &ctx)),
        None => series,
    };
    let pade = build_pade(&series, n)?;
    let sing = singularity_set(&profile, &ctx)?;

    let mut rows = Vec::with_capacity(at.len());
    for &z in at {
        let zr = MpReal::from_f64(finite("--at", z)?, &ctx);
        let value = pade_eval_axis(&pade, &zr)?;
        let below = !sing.terminating && zr < sing.convergence_radius;
        rows.push(vec![
            Cell::Real(zr),
            Cell::Real(value),
            Cell::Int(below as i64),
        ]);
    }

    let report = ExperimentReport {
        experiment: "continue".into(),
        params: vec![
            ("planet".into(), profile.to_json().to_string()),
            ("digits".into(), ctx.digits().to_string()),
            ("terms".into(), terms.to_string()),
            ("N".into(), n.to_string()),
            (
                "theta".into(),
                theta.map_or_else(|| "0".into(), |t| format!("{t:e}")),
            ),
        ],
        columns: vec!["Z".into(), "phi".into(), "below_series_radius".into()],
        rows,
        summary: vec![
            (
                "effective_order".into(),
                Cell::Int(pade.effective_order() as i64),
            ),
            ("certificate".into(), Cell::Real(pade.certificate().clone())),
            (
                "brillouin_radius".into(),
                Cell::Real(brillouin_radius(&profile, &ctx)),
            ),
            (
                "convergence_radius".into(),
                Cell::Real(sing.convergence_radius.clone()),
            ),
        ],
        notes: vec![],
        digits: ctx.digits(),
    };
    emit(&report, &opts.out)
}

fn cmd_error_scan(
    opts: &PlanetOpts,
    terms: usize,
    z_min: f64,
    z_max: f64,
    points: usize,
) -> gravipade::Result<()> {
    finite("--z-min", z_min)?;
    finite("--z-max", z_max)?;
    if points > 1 && z_max <= z_min {
        return Err(Error::NumberFormat {
            field: "--z-max".into(),
            text: z_max.to_string(),
            reason: format!("must exceed --z-min ({z_min})"),
        });
    }
    let (profile, ctx) = opts.load()?;
    let grid: Vec<MpReal> = linspace(z_min, z_max, points)
        .into_iter()
        .map(|z| MpReal::from_f64(z, &ctx))
        .collect();
    let report = error_scan(&profile, terms, &grid, &ctx)?;
    emit(&report, &opts.out)
}

fn cmd_precision_sweep(
    opts: &PlanetOpts,
    terms: usize,
    round_digits: &[u32],
) -> gravipade::Result<()> {
    let (profile, ctx) = opts.load()?;
    let report = precision_sweep(&profile, terms, round_digits, &ctx)?;
    emit(&report, &opts.out)
}

fn cmd_bench(
    digits: u32,
    low_digits: u32,
    terms_flag: Option<usize>,
    order_flag: Option<usize>,
    x_max: f64,
    points: usize,
    out: &Path,
) -> gravipade::Result<()> {
    finite("--x-max", x_max)?;
    check_terms_order(terms_flag, order_flag)?;
    let terms = terms_flag.unwrap_or(1500);
    let n = order_flag.unwrap_or(terms / 2);
    if n < 1 {
        return Err(Error::SeriesTooShort {
            have: terms + 1,
            n: 1,
            need: 3,
        });
    }
    let mut digits_list = vec![low_digits, digits];
    digits_list.sort_unstable();
    digits_list.dedup();
    let grid = linspace(0.0, x_max, points);
    let report = extrapolation_benchmark(terms, n, &digits_list, &grid)?;
    emit(&report, out)
}

fn cmd_ratio_test(opts: &PlanetOpts, terms: usize, scale: f64) -> gravipade::Result<()> {
    finite("--scale", scale)?;
    if scale <= 0.0 {
        return Err(Error::NumberFormat {
            field: "--scale".into(),
            text: scale.to_string(),
            reason: "must be positive".into(),
        });
    }
    let (profile, ctx) = opts.load()?;
    let report = ratio_test(&profile, terms, scale, &ctx)?;
    emit(&report, &opts.out)
}

fn cmd_roughen(
    base_order: usize,
    ripple_order: usize,
    ripple_amp: &str,
    digits: u32,
    out: &Path,
) -> gravipade::Result<()> {
    let amp = parse_rational(ripple_amp).ok_or_else(|| Error::NumberFormat {
        field: "--ripple-amp".into(),
        text: ripple_amp.into(),
        reason: "expected an integer, a fraction a/b, or a decimal".into(),
    })?;
    let profile = roughened_profile(base_order, ripple_order, &amp)?;
    let ctx = PrecisionCtx::new(digits);
    let sing = singularity_set(&profile, &ctx)?;
    let brillouin = brillouin_radius(&profile, &ctx);

    std::fs::create_dir_all(out)?;
    let planet_path = out.join("roughened_planet.json");
    let mut text = serde_json::to_string_pretty(&profile.to_json())
        .expect("serializing a JSON value cannot fail");
    text.push('\n');
    std::fs::write(&planet_path, text)?;
    println!("wrote {}", planet_path.display());

    let mut summary = singularity_summary(&sing, brillouin.clone());
    summary.push((
        "radius_gap".into(),
        Cell::Real(&brillouin - &sing.convergence_radius),
    ));
    let report = ExperimentReport {
        experiment: "roughen".into(),
        params: vec![
            ("base_order".into(), base_order.to_string()),
            ("ripple_order".into(), ripple_order.to_string()),
            ("ripple_amp".into(), rational_to_string(&amp)),
            ("digits".into(), digits.to_string()),
        ],
        columns: SINGULARITY_COLUMNS.iter().map(|&c| c.into()).collect(),
        rows: singularity_rows(&sing),
        summary,
        notes: vec![format!("planet file: {}", planet_path.display())],
        digits,
    };
    emit(&report, out)
}
