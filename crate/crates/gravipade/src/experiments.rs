//! Scripted reproductions of the numerical experiments: pole portraits,
//! downward-continuation error scans, coefficient-precision sweeps, the
//! power-series extrapolation benchmark, coefficient ratio tests, and the
//! roughened-topography profile generator.
//!
//! Every experiment returns an [`ExperimentReport`] — a fixed-schema table
//! plus a scalar summary — that can be written as a CSV (data) and a JSON
//! sidecar (parameters and summary).  Reports are deterministic for a given
//! parameter set: parallel loops collect into index order before any
//! floating-point accumulation, so reruns are byte-identical.

use std::path::{Path, PathBuf};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Error;
use crate::harmonics::potential_partial_sum;
use crate::mp::{round_series_to_digits, MpReal, PrecisionCtx, Rational};
use crate::pade::{
    build_pade, build_pade_from_coeffs, classify_poles, weight_colatitude, PadeApproximant,
    Pole, DEFAULT_RESIDUE_TOL,
};
use crate::planet::{
    brillouin_radius, potential_axis_exact, she_closed_form, she_exact_symbolic, ShapeProfile,
    SheSeries,
};
use crate::poly::{chebyshev_poly, Poly};
use crate::singularity::{singularity_set, SingularityClass};
use crate::Result;

/// One table entry; numeric cells render at the report's precision.
#[derive(Clone, Debug)]
pub enum Cell {
    Real(MpReal),
    Int(i64),
    Text(String),
}

impl Cell {
    /// The cell as CSV text: reals in scientific notation at `sig`
    /// significant figures, everything else verbatim.
    pub fn render(&self, sig: usize) -> String {
        match self {
            Cell::Real(v) => v.to_sci_string(sig),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    /// The numeric payload, if this is a real-valued cell.
    pub fn as_real(&self) -> Option<&MpReal> {
        match self {
            Cell::Real(v) => Some(v),
            _ => None,
        }
    }

    /// The integer payload, if this is an integer cell.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Cell::Int(v) => Some(*v),
            _ => None,
        }
    }
}

/// Tabular outcome of one experiment run.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    /// Experiment name; also the output file stem.
    pub experiment: String,
    /// Lossless echo of the configuration that produced the rows.
    pub params: Vec<(String, String)>,
    /// CSV column names (header row).
    pub columns: Vec<String>,
    /// Data rows; every row has one cell per column.
    pub rows: Vec<Vec<Cell>>,
    /// Key scalar outcomes.
    pub summary: Vec<(String, Cell)>,
    /// Free-form remarks (skipped grid points and similar).
    pub notes: Vec<String>,
    /// Significant figures used when rendering numeric cells.
    pub digits: u32,
}

impl ExperimentReport {
    /// The full data table as CSV text, header row first.
    pub fn to_csv(&self) -> String {
        let sig = self.digits as usize;
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let line: Vec<String> = row.iter().map(|c| c.render(sig)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parameters, summary, and notes as a JSON document.
    pub fn summary_json(&self) -> Value {
        let sig = self.digits as usize;
        let params: serde_json::Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let summary: serde_json::Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.render(sig))))
            .collect();
        json!({
            "experiment": self.experiment,
            "params": params,
            "summary": summary,
            "notes": self.notes,
        })
    }

    /// Write `<experiment>.csv` and `<experiment>.json` under `dir`,
    /// creating the directory if needed; returns both paths.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.experiment));
        let json_path = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&csv_path, self.to_csv())?;
        let mut doc = serde_json::to_string_pretty(&self.summary_json())
            .expect("report JSON serialization cannot fail");
        doc.push('\n');
        std::fs::write(&json_path, doc)?;
        Ok((csv_path, json_path))
    }

    /// Look up a summary entry by key.
    pub fn summary_cell(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Look up a real-valued summary entry by key.
    pub fn summary_real(&self, key: &str) -> Option<&MpReal> {
        self.summary_cell(key).and_then(Cell::as_real)
    }
}

/// Coefficients for `profile` from the best exact generator available:
/// the closed form where one exists, otherwise exact symbolic integration.
pub fn series_for(profile: &ShapeProfile, n_max: usize, ctx: &PrecisionCtx) -> Result<SheSeries> {
    match she_closed_form(profile, n_max, ctx) {
        Err(Error::UnsupportedProfile { .. }) => she_exact_symbolic(profile, n_max, ctx),
        other => other,
    }
}

/// Sample the surface curve in the rotated frame: `(±s(z), z)` for `z`
/// sweeping the support.  Points with `s(z) = 0` appear once.
pub fn boundary_samples(
    profile: &ShapeProfile,
    count: usize,
    ctx: &PrecisionCtx,
) -> Vec<(MpReal, MpReal)> {
    let (z_min, z_max) = profile.z_span(ctx);
    let step = &(&z_max - &z_min) / &MpReal::from_i64(count as i64, ctx);
    let mut out = Vec::with_capacity(2 * (count + 1));
    for j in 0..=count {
        let z = &z_min + &(&step * &MpReal::from_i64(j as i64, ctx));
        let s2 = profile.s2_at(&z, ctx);
        if s2 <= MpReal::zero_ctx(ctx) {
            out.push((MpReal::zero_ctx(ctx), z));
            continue;
        }
        let s = s2.sqrt();
        out.push((s.clone(), z.clone()));
        out.push((-&s, z));
    }
    out
}

/// Pole–zero pairing scale for portraits, much tighter than the
/// general-purpose [`crate::pade::DEFAULT_PAIR_TOL`]: near a branch point the
/// approximant's *genuine* poles interlace with numerator zeros at spacings
/// that shrink quadratically with order, and at N = 100 they pass within
/// 10⁻³·|Z₀| of each other.  True Froissart doublets sit at the noise floor,
/// orders of magnitude closer, so 10⁻⁶ separates the two populations.
pub const PORTRAIT_PAIR_TOL: f64 = 1e-6;

fn portrait_pair_tol(ctx: &PrecisionCtx) -> MpReal {
    MpReal::from_f64(PORTRAIT_PAIR_TOL, ctx)
}

fn default_residue_tol(ctx: &PrecisionCtx) -> MpReal {
    MpReal::from_f64(DEFAULT_RESIDUE_TOL, ctx)
}

/// `log10 x` for `x > 0`, else the report floor `−(digits + 10)` — used for
/// error columns where an exact zero means "below working precision".
fn log10_or_floor(x: &MpReal, ctx: &PrecisionCtx) -> MpReal {
    if x.is_zero() || x < &MpReal::zero_ctx(ctx) {
        return MpReal::from_i64(-(ctx.digits() as i64 + 10), ctx);
    }
    &x.ln() / &MpReal::from_i64(10, ctx).ln()
}

fn profile_params(profile: &ShapeProfile, ctx: &PrecisionCtx) -> Vec<(String, String)> {
    vec![
        ("planet".into(), profile.to_json().to_string()),
        ("digits".into(), ctx.digits().to_string()),
    ]
}

/// Rotated-frame positions and residue magnitudes of the approximant's
/// poles, the discriminant roots with their classification, a sampled
/// surface curve, and both radii — the complete data behind one pole
/// portrait.  `theta` re-weights the series for an off-axis ray portrait.
pub fn pole_portrait(
    profile: &ShapeProfile,
    n: usize,
    theta: Option<&MpReal>,
    ctx: &PrecisionCtx,
) -> Result<ExperimentReport> {
    pole_portrait_with_tols(profile, n, theta, PORTRAIT_PAIR_TOL, DEFAULT_RESIDUE_TOL, ctx)
}

/// [`pole_portrait`] with explicit Froissart thresholds (both relative:
/// pairing to `|Z₀|`, residue to the median residue magnitude).
pub fn pole_portrait_with_tols(
    profile: &ShapeProfile,
    n: usize,
    theta: Option<&MpReal>,
    pair_tol: f64,
    residue_tol: f64,
    ctx: &PrecisionCtx,
) -> Result<ExperimentReport> {
    let series = series_for(profile, 2 * n, ctx)?;
    let series = match theta {
        Some(t) => weight_colatitude(&series, t),
        None => series,
    };
    let pade = build_pade(&series, n)?;
    let poles = classify_poles(
        &pade,
        ctx,
        &MpReal::from_f64(pair_tol, ctx),
        &MpReal::from_f64(residue_tol, ctx),
    )?;
    let sing = singularity_set(profile, ctx)?;
    let brillouin = brillouin_radius(profile, ctx);

    let mut sorted: Vec<&Pole> = poles.poles.iter().collect();
    sorted.sort_by(|a, b| {
        a.rotated
            .re
            .partial_cmp(&b.rotated.re)
            .unwrap()
            .then(a.rotated.im.partial_cmp(&b.rotated.im).unwrap())
    });

    let mut rows = Vec::new();
    for p in &sorted {
        rows.push(vec![
            Cell::Text("pole".into()),
            Cell::Real(p.rotated.re.clone()),
            Cell::Real(p.rotated.im.clone()),
            Cell::Real(p.residue.abs()),
            Cell::Text(if p.spurious { "spurious" } else { "genuine" }.into()),
        ]);
    }
    for r in &sing.roots {
        rows.push(vec![
            Cell::Text("discriminant".into()),
            Cell::Real(r.rotated.re.clone()),
            Cell::Real(r.rotated.im.clone()),
            Cell::Text(String::new()),
            Cell::Text(r.class.name().into()),
        ]);
    }
    for (x, z) in boundary_samples(profile, 128, ctx) {
        rows.push(vec![
            Cell::Text("boundary".into()),
            Cell::Real(x),
            Cell::Real(z),
            Cell::Text(String::new()),
            Cell::Text(String::new()),
        ]);
    }

    // Largest distance from a convergence-limiting discriminant root to its
    // nearest genuine pole: the portrait-quality figure of merit.
    let mut max_interior_gap = MpReal::zero_ctx(ctx);
    let mut matched = 0usize;
    for root in sing.limiting() {
        let mut best: Option<MpReal> = None;
        for p in poles.genuine() {
            let d = (&p.z0 - &root.z0).abs();
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
        if let Some(d) = best {
            matched += 1;
            if d > max_interior_gap {
                max_interior_gap = d;
            }
        }
    }

    let mut params = profile_params(profile, ctx);
    params.push(("N".into(), n.to_string()));
    params.push((
        "theta".into(),
        theta.map_or_else(|| "0".into(), |t| t.to_sci_string(ctx.digits() as usize)),
    ));
    params.push(("pair_tol".into(), format!("{pair_tol:e}")));
    params.push(("residue_tol".into(), format!("{residue_tol:e}")));

    let genuine_count = poles.genuine().count() as i64;
    let spurious_count = poles.spurious().count() as i64;
    let mut summary = vec![
        ("brillouin_radius".into(), Cell::Real(brillouin)),
        (
            "convergence_radius".into(),
            Cell::Real(sing.convergence_radius.clone()),
        ),
        (
            "effective_order".into(),
            Cell::Int(pade.effective_order() as i64),
        ),
        ("certificate".into(), Cell::Real(pade.certificate().clone())),
        ("genuine_count".into(), Cell::Int(genuine_count)),
        ("spurious_count".into(), Cell::Int(spurious_count)),
    ];
    if matched > 0 {
        summary.push(("max_interior_gap".into(), Cell::Real(max_interior_gap)));
    }

    Ok(ExperimentReport {
        experiment: "pole_portrait".into(),
        params,
        columns: ["kind", "re", "im", "abs_residue", "label"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        summary,
        notes: Vec::new(),
        digits: ctx.digits(),
    })
}

/// Relative error of the truncated series and of its diagonal approximant
/// against the exact axis potential, on a grid of axis positions.  Grid
/// points at or below the surface are skipped with a note.
pub fn error_scan(
    profile: &ShapeProfile,
    n_terms: usize,
    z_grid: &[MpReal],
    ctx: &PrecisionCtx,
) -> Result<ExperimentReport> {
    let series = series_for(profile, n_terms, ctx)?;
    let pade = build_pade(&series, n_terms / 2)?;
    let brillouin = brillouin_radius(profile, ctx);
    let sing = singularity_set(profile, ctx)?;
    let theta0 = MpReal::zero_ctx(ctx);

    enum Sample {
        Row(MpReal, MpReal, MpReal),
        Skip(String),
    }

    let samples: Vec<Sample> = z_grid
        .par_iter()
        .map(|z| {
            let oracle = match potential_axis_exact(profile, z, ctx) {
                Ok(v) => v,
                Err(Error::PointNotExterior { .. }) => {
                    return Sample::Skip(format!(
                        "Z = {} is not exterior on the axis; row skipped",
                        z.to_sci_string(8)
                    ));
                }
                Err(e) => return Sample::Skip(format!("oracle failed at Z = {}: {e}", z.to_sci_string(8))),
            };
            let she = potential_partial_sum(&series, z, &theta0, n_terms);
            let she_err = (&(&she - &oracle) / &oracle).abs();
            let pade_err = match crate::pade::pade_eval_axis(&pade, z) {
                Ok(v) => (&(&v - &oracle) / &oracle).abs(),
                Err(_) => {
                    return Sample::Skip(format!(
                        "approximant pole at Z = {}; row skipped",
                        z.to_sci_string(8)
                    ));
                }
            };
            Sample::Row(
                z.clone(),
                log10_or_floor(&she_err, ctx),
                log10_or_floor(&pade_err, ctx),
            )
        })
        .collect();

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut min_margin: Option<MpReal> = None;
    for s in samples {
        match s {
            Sample::Row(z, she_log, pade_log) => {
                if z < brillouin {
                    let margin = &she_log - &pade_log;
                    if min_margin.as_ref().is_none_or(|m| &margin < m) {
                        min_margin = Some(margin);
                    }
                }
                rows.push(vec![
                    Cell::Real(z),
                    Cell::Real(she_log),
                    Cell::Real(pade_log),
                ]);
            }
            Sample::Skip(note) => notes.push(note),
        }
    }

    let mut params = profile_params(profile, ctx);
    params.push(("terms".into(), n_terms.to_string()));
    params.push(("grid_points".into(), z_grid.len().to_string()));

    let mut summary = vec![
        ("brillouin_radius".into(), Cell::Real(brillouin)),
        (
            "convergence_radius".into(),
            Cell::Real(sing.convergence_radius.clone()),
        ),
        (
            "effective_order".into(),
            Cell::Int(pade.effective_order() as i64),
        ),
        ("certificate".into(), Cell::Real(pade.certificate().clone())),
    ];
    if let Some(m) = min_margin {
        summary.push(("min_margin_decades_below_brillouin".into(), Cell::Real(m)));
    }

    Ok(ExperimentReport {
        experiment: "error_scan".into(),
        params,
        columns: ["Z", "log10_rel_err_series", "log10_rel_err_pade"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        summary,
        notes,
        digits: ctx.digits(),
    })
}

/// Rebuild the approximant from coefficients rounded to each precision in
/// `digits_list` (at unchanged working precision) and report how the pole
/// portrait degrades: spurious-pole counts and the largest drift of any
/// genuine pole from the full-precision reference.
pub fn precision_sweep(
    profile: &ShapeProfile,
    n_coeffs: usize,
    digits_list: &[u32],
    ctx: &PrecisionCtx,
) -> Result<ExperimentReport> {
    let series = series_for(profile, n_coeffs, ctx)?;
    let n = n_coeffs / 2;
    let pair_tol = portrait_pair_tol(ctx);
    let residue_tol = default_residue_tol(ctx);

    let reference = build_pade(&series, n)?;
    let ref_poles = classify_poles(&reference, ctx, &pair_tol, &residue_tol)?;
    let ref_genuine: Vec<&Pole> = ref_poles.genuine().collect();

    let mut rows = Vec::new();
    let mut summary = vec![(
        "reference_genuine_count".into(),
        Cell::Int(ref_genuine.len() as i64),
    )];

    for &d in digits_list {
        // At or above the working precision there is nothing to truncate:
        // the sweep entry is the reference build itself.
        let rounded = if d >= ctx.digits() {
            series.coeffs.clone()
        } else {
            round_series_to_digits(&series.coeffs, d)
        };
        let pade = build_pade_from_coeffs(&rounded, n, ctx)?;
        let poles = classify_poles(&pade, ctx, &pair_tol, &residue_tol)?;

        let mut sorted: Vec<&Pole> = poles.poles.iter().collect();
        sorted.sort_by(|a, b| {
            a.rotated
                .re
                .partial_cmp(&b.rotated.re)
                .unwrap()
                .then(a.rotated.im.partial_cmp(&b.rotated.im).unwrap())
        });
        for p in &sorted {
            rows.push(vec![
                Cell::Int(d as i64),
                Cell::Real(p.rotated.re.clone()),
                Cell::Real(p.rotated.im.clone()),
                Cell::Real(p.residue.abs()),
                Cell::Text(if p.spurious { "spurious" } else { "genuine" }.into()),
            ]);
        }

        let mut max_dev = MpReal::zero_ctx(ctx);
        for p in poles.genuine() {
            let mut best: Option<MpReal> = None;
            for r in &ref_genuine {
                let dist = (&p.z0 - &r.z0).abs();
                if best.as_ref().is_none_or(|b| &dist < b) {
                    best = Some(dist);
                }
            }
            if let Some(dist) = best {
                if dist > max_dev {
                    max_dev = dist;
                }
            }
        }
        summary.push((
            format!("spurious_count_{d}d"),
            Cell::Int(poles.spurious().count() as i64),
        ));
        summary.push((format!("max_genuine_deviation_{d}d"), Cell::Real(max_dev)));
    }

    let mut params = profile_params(profile, ctx);
    params.push(("coefficients".into(), n_coeffs.to_string()));
    params.push((
        "rounded_digits".into(),
        digits_list
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    ));

    Ok(ExperimentReport {
        experiment: "precision_sweep".into(),
        params,
        columns: ["rounded_digits", "re", "im", "abs_residue", "label"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        summary,
        notes: Vec::new(),
        digits: ctx.digits(),
    })
}

/// Exact Taylor coefficients of `(1+u)^{3/2}` via the binomial recurrence
/// `c_k = c_{k−1}·(5−2k)/(2k)`; the benchmark series in `z` has `A_{2k} = c_k`.
fn binomial_three_halves(half_terms: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(half_terms + 1);
    let mut c = Rational::one();
    out.push(c.clone());
    for k in 1..=half_terms {
        let k_i = k as i64;
        c = c * Rational::new((5 - 2 * k_i).into(), (2 * k_i).into());
        out.push(c.clone());
    }
    out
}

/// Benchmark series-vs-approximant extrapolation of `f(z) = (1+z²)^{3/2}`
/// beyond the unit disk of convergence, with the approximant built once per
/// working precision in `digits_list`.  Rows report `log10` absolute errors
/// on `x_grid`; the truncated series is evaluated at the highest precision.
pub fn extrapolation_benchmark(
    terms: usize,
    n: usize,
    digits_list: &[u32],
    x_grid: &[f64],
) -> Result<ExperimentReport> {
    let top_digits = digits_list.iter().copied().max().unwrap_or(60).max(60);
    let eval_ctx = PrecisionCtx::new(top_digits);
    let half_terms = terms / 2;
    let exact = binomial_three_halves(half_terms);

    struct Build {
        digits: u32,
        pade: PadeApproximant,
        ctx: PrecisionCtx,
    }

    let mut builds = Vec::with_capacity(digits_list.len());
    for &d in digits_list {
        let ctx = PrecisionCtx::new(d);
        let mut coeffs = Vec::with_capacity(terms + 1);
        for (k, c) in exact.iter().enumerate() {
            coeffs.push(MpReal::from_rational(c, &ctx));
            if 2 * k + 1 <= terms {
                coeffs.push(MpReal::zero_ctx(&ctx));
            }
        }
        coeffs.truncate(terms + 1);
        let pade = build_pade_from_coeffs(&coeffs, n, &ctx)?;
        builds.push(Build { digits: d, pade, ctx });
    }

    let rows: Vec<Vec<Cell>> = x_grid
        .par_iter()
        .map(|&x| {
            let xm = MpReal::from_f64(x, &eval_ctx);
            let u = &MpReal::from_i64(1, &eval_ctx) + &(&xm * &xm);
            let truth = u.sqrt().powi(3);

            // Truncated series, summed at the highest precision: its failure
            // outside |x| ≤ 1 is mathematical, not a rounding artifact.
            let x2 = &xm * &xm;
            let mut term_pow = MpReal::from_i64(1, &eval_ctx);
            let mut series_val = MpReal::zero_ctx(&eval_ctx);
            for c in &exact {
                series_val = &series_val + &(&MpReal::from_rational(c, &eval_ctx) * &term_pow);
                term_pow = &term_pow * &x2;
            }
            let series_err = (&series_val - &truth).abs();

            let mut row = vec![
                Cell::Real(xm.clone()),
                Cell::Real(log10_or_floor(&series_err, &eval_ctx)),
            ];
            for b in &builds {
                let xb = MpReal::from_f64(x, &b.ctx);
                // The approximant's numerator and denominator are
                // polynomials in the expansion variable, so evaluating their
                // ratio directly gives f(x) (no 1/Z prefactor here).
                let num = b.pade.numerator().eval(&xb);
                let den = b.pade.denominator().eval(&xb);
                let truth_b = {
                    let ub = &MpReal::from_i64(1, &b.ctx) + &(&xb * &xb);
                    ub.sqrt().powi(3)
                };
                let err = if den.is_zero() {
                    MpReal::from_i64(1, &b.ctx) // pole exactly on the grid point
                } else {
                    (&(&num / &den) - &truth_b).abs()
                };
                row.push(Cell::Real(log10_or_floor(&err, &b.ctx)));
            }
            row
        })
        .collect();

    let mut columns = vec!["x".to_string(), "log10_abs_err_series".to_string()];
    let mut summary = vec![("terms".into(), Cell::Int(terms as i64))];
    for b in &builds {
        columns.push(format!("log10_abs_err_pade_{}d", b.digits));
        summary.push((
            format!("effective_order_{}d", b.digits),
            Cell::Int(b.pade.effective_order() as i64),
        ));
        summary.push((
            format!("certificate_{}d", b.digits),
            Cell::Real(b.pade.certificate().clone()),
        ));
    }

    let params = vec![
        ("terms".into(), terms.to_string()),
        ("N".into(), n.to_string()),
        (
            "digits".into(),
            digits_list
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
        (
            "x_grid".into(),
            x_grid
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(" "),
        ),
    ];

    Ok(ExperimentReport {
        experiment: "extrapolation_benchmark".into(),
        params,
        columns,
        rows,
        summary,
        notes: Vec::new(),
        digits: top_digits,
    })
}

/// The normalized coefficient ratio `n²·A_{2n}/|Z₀|^{2n}`, whose boundedness
/// away from 0 and ∞ confirms `|Z₀|` as the true convergence radius.
/// `radius_scale` multiplies `|Z₀|` (1.0 for the exact test; ±10% produces
/// runaway geometric growth or decay).
pub fn ratio_test(
    profile: &ShapeProfile,
    n_max: usize,
    radius_scale: f64,
    ctx: &PrecisionCtx,
) -> Result<ExperimentReport> {
    let series = series_for(profile, n_max, ctx)?;
    let sing = singularity_set(profile, ctx)?;
    let mut z0_mod: Option<MpReal> = None;
    for r in &sing.roots {
        if r.class == SingularityClass::Interior {
            let m = r.z0.abs();
            if z0_mod.as_ref().is_none_or(|b| &m > b) {
                z0_mod = Some(m);
            }
        }
    }
    let Some(z0_mod) = z0_mod else {
        return Err(Error::NoConvergenceLimitingRoots {
            reason: "the ratio test needs an interior discriminant root to normalize against"
                .into(),
        });
    };
    let scaled = &z0_mod * &MpReal::from_f64(radius_scale, ctx);
    let scaled2 = &scaled * &scaled;

    let n_top = n_max / 2;
    let mut rows = Vec::with_capacity(n_top);
    let mut pow = scaled2.clone(); // |Z₀|^{2n} for n = 1
    let mut window: Vec<(f64, f64)> = Vec::new(); // (n, log10 |ratio|) over the last half
    let n_half = n_top / 2;
    let mut env_max: Option<MpReal> = None;
    let mut env_min: Option<MpReal> = None;
    let mut notes = Vec::new();

    for nn in 1..=n_top {
        let n2 = MpReal::from_i64((nn * nn) as i64, ctx);
        let ratio = &(&n2 * &series.coeffs[2 * nn]) / &pow;
        pow = &pow * &scaled2;
        let mag = ratio.abs();
        if nn >= n_half {
            if mag.is_zero() {
                notes.push(format!("A_{} is exactly zero; excluded from envelope", 2 * nn));
            } else {
                if env_max.as_ref().is_none_or(|b| &mag > b) {
                    env_max = Some(mag.clone());
                }
                if env_min.as_ref().is_none_or(|b| &mag < b) {
                    env_min = Some(mag.clone());
                }
                window.push((nn as f64, log10_or_floor(&mag, ctx).to_f64()));
            }
        }
        rows.push(vec![Cell::Int(nn as i64), Cell::Real(ratio)]);
    }

    // Least-squares slope of log10|ratio| over the window, reported as the
    // predicted growth factor across it: ≈ 1 when |Z₀| is right, geometric
    // otherwise.  Regression averages out the bounded oscillation.
    let trend = if window.len() >= 2 {
        let len = window.len() as f64;
        let mean_n = window.iter().map(|(a, _)| a).sum::<f64>() / len;
        let mean_y = window.iter().map(|(_, b)| b).sum::<f64>() / len;
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in &window {
            num += (a - mean_n) * (b - mean_y);
            den += (a - mean_n) * (a - mean_n);
        }
        let slope = num / den;
        10f64.powf(slope * (n_top as f64 - n_half as f64))
    } else {
        1.0
    };

    let mut params = profile_params(profile, ctx);
    params.push(("n_max".into(), n_max.to_string()));
    params.push(("radius_scale".into(), format!("{radius_scale}")));

    let mut summary = vec![
        ("z0_modulus".into(), Cell::Real(z0_mod)),
        ("scaled_modulus".into(), Cell::Real(scaled)),
        (
            "trend_factor".into(),
            Cell::Real(MpReal::from_f64(trend, ctx)),
        ),
    ];
    if let (Some(mx), Some(mn)) = (env_max, env_min) {
        summary.push(("envelope_max".into(), Cell::Real(mx)));
        summary.push(("envelope_min".into(), Cell::Real(mn)));
    }

    Ok(ExperimentReport {
        experiment: "ratio_test".into(),
        params,
        columns: ["n", "ratio"].iter().map(|s| s.to_string()).collect(),
        rows,
        summary,
        notes,
        digits: ctx.digits(),
    })
}

/// A smooth base planet with rough topography bolted on: the base is
/// `(1−z²)·(1 + Σ_{k even ≤ base_order} t_k·T_k(z))` with `t_k = (−1)^{k/2+1}/k²`,
/// and the ripple adds `ripple_amp·T_{ripple_order}(z)` inside the bracket.
/// All coefficients are exact rationals, so the profile is deterministic.
pub fn roughened_profile(
    base_order: usize,
    ripple_order: usize,
    ripple_amp: &Rational,
) -> Result<ShapeProfile> {
    if base_order < 2 || base_order % 2 != 0 {
        return Err(Error::UnsupportedProfile {
            kind: format!("roughened base order must be even and ≥ 2, got {base_order}"),
        });
    }
    if ripple_order < 2 || ripple_order % 2 != 0 {
        return Err(Error::UnsupportedProfile {
            kind: format!(
                "ripple order must be even and ≥ 2 to preserve fore-aft symmetry, got {ripple_order}"
            ),
        });
    }

    let mut bracket = Poly::new(vec![Rational::one()]);
    let mut l1 = Rational::zero();
    for k in (2..=base_order).step_by(2) {
        let sign: i64 = if (k / 2) % 2 == 1 { 1 } else { -1 };
        let t_k = Rational::new(sign.into(), ((k * k) as i64).into());
        l1 = l1 + t_k.abs();
        bracket = bracket.add(&chebyshev_poly(k).scale(&t_k));
    }
    bracket = bracket.add(&chebyshev_poly(ripple_order).scale(ripple_amp));

    // |T_k| ≤ 1 on [−1, 1], so the bracket is bounded below by
    // 1 − Σ|t_k| − |amp|; requiring that bound positive keeps s² > 0 on the
    // open support for any ripple order.
    let margin = Rational::one() - l1 - ripple_amp.abs();
    if margin <= Rational::zero() {
        return Err(Error::RippleTooLarge {
            amp: ripple_amp.to_string(),
            min_s2: margin.to_string(),
        });
    }

    let bump = Poly::new(vec![
        Rational::one(),
        Rational::zero(),
        -Rational::one(),
    ]);
    ShapeProfile::poly_profile(
        bump.mul(&bracket),
        Rational::from_integer((-1).into()),
        Rational::from_integer(1.into()),
    )
}
