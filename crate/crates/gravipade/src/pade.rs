//! Diagonal Padé approximants to exterior potential expansions.
//!
//! The axis potential of a bounded body has a large-`Z` expansion
//! `Φ(Z) = (1/Z)·Σ_n A_n w^n` with `w = 1/Z`.  This module turns a truncated
//! coefficient list `A_0..A_T` into the `[N,N]` rational approximant
//!
//! ```text
//! Z·Φ(Z) ≈ Q(w)/R(w),   deg Q ≤ N,  deg R ≤ N,  R(0) = 1,
//! ```
//!
//! whose Taylor expansion matches the input through order `2N`.  Unlike the
//! partial sums themselves, the rational form continues the potential below
//! the series' convergence radius, and the roots of `R` approximate the
//! complex singularities that set that radius.
//!
//! Construction solves the classical linear system for the denominator by
//! dense, fully pivoted elimination.  The system is notoriously
//! ill-conditioned, and for degenerate inputs (a series that is already a
//! rational function of lower type, e.g. a point mass) it is genuinely
//! singular: rank deficiency is handled by reducing the order by one and
//! retrying rather than by regularizing, because the degenerate case *is* a
//! lower-order rational.  Every successful build stores a certificate: the
//! measured residual of re-expanding `Q/R` against the input coefficients,
//! which honest callers can use as an accuracy floor.

use std::cmp::Ordering;

use crate::error::Error;
use crate::mp::{MpComplex, MpReal, PrecisionCtx};
use crate::planet::SheSeries;
use crate::poly::{find_roots_real, legendre_ladder, Poly};
use crate::Result;

/// Default relative pole–zero pairing distance for Froissart filtering.
pub const DEFAULT_PAIR_TOL: f64 = 1e-3;
/// Default residue cutoff, relative to the median residue magnitude.
pub const DEFAULT_RESIDUE_TOL: f64 = 1e-8;

/// An `[N,N]` rational approximant `Q(w)/R(w)` in `w = 1/Z` to the series
/// `Z·Φ(Z) = Σ A_n w^n`, with `R(0) = 1`.
#[derive(Clone, Debug)]
pub struct PadeApproximant {
    /// Requested order.
    n: usize,
    /// Order actually built (smaller than `n` when the solve was
    /// rank-deficient and the order was walked down).
    effective_n: usize,
    /// `Q`, degree ≤ `effective_n`.
    numerator: Poly<MpReal>,
    /// `R`, degree ≤ `effective_n`, constant term exactly 1.
    denominator: Poly<MpReal>,
    /// Measured re-expansion residual: max over `m ≤ 2·effective_n` of
    /// `|t_m − A_m|` scaled by the largest input coefficient, where `t` is
    /// the Taylor expansion of `Q/R`.  Includes a factor-2 safety margin so
    /// that an independent re-expansion stays below it.
    certificate: MpReal,
    /// Working precision of the build.
    ctx: PrecisionCtx,
}

impl PadeApproximant {
    /// The order that was asked for.
    pub fn requested_order(&self) -> usize {
        self.n
    }

    /// The order that was actually solvable; poles and matching statements
    /// refer to this order.
    pub fn effective_order(&self) -> usize {
        self.effective_n
    }

    /// Numerator polynomial `Q(w)`.
    pub fn numerator(&self) -> &Poly<MpReal> {
        &self.numerator
    }

    /// Denominator polynomial `R(w)`, normalized to `R(0) = 1`.
    pub fn denominator(&self) -> &Poly<MpReal> {
        &self.denominator
    }

    /// Re-expansion residual bound measured at build time (relative to the
    /// largest input coefficient).
    pub fn certificate(&self) -> &MpReal {
        &self.certificate
    }

    /// Working precision of the build.
    pub fn ctx(&self) -> &PrecisionCtx {
        &self.ctx
    }
}

/// Build the `[N,N]` approximant to the series' coefficients at the series'
/// own working precision.
pub fn build_pade(series: &SheSeries, n: usize) -> Result<PadeApproximant> {
    build_pade_from_coeffs(&series.coeffs, n, &series.ctx)
}

/// Build the `[N,N]` approximant to an explicit coefficient list
/// `A_0, A_1, …` (at least `2N+1` entries).
///
/// The denominator coefficients `C_1..C_N` (with `C_0 = 1`) solve
/// `Σ_{j=0}^{N} C_j·A_{m−j} = 0` for `m = N+1..2N` by fully pivoted dense
/// elimination.  A pivot smaller than `rel_tol` times the largest pivot seen
/// marks the system numerically rank-deficient; the order is then reduced by
/// one and the solve retried, down to the first order that succeeds.  If no
/// order `≥ 1` is solvable the series is a rational function of type `[k,0]`
/// (constant denominator) and there is nothing to fit.
pub fn build_pade_from_coeffs(
    coeffs: &[MpReal],
    n: usize,
    ctx: &PrecisionCtx,
) -> Result<PadeApproximant> {
    if n == 0 || coeffs.len() < 2 * n + 1 {
        return Err(Error::SeriesTooShort {
            have: coeffs.len(),
            n,
            need: 2 * n + 1,
        });
    }
    let a: Vec<MpReal> = coeffs.iter().map(|c| c.widen(ctx.bits())).collect();
    let rel_tol = ctx.rel_tol();

    let mut order = n;
    let c = loop {
        if order == 0 {
            return Err(Error::RationalDegenerate);
        }
        match solve_denominator(&a, order, &rel_tol, ctx) {
            Some(c) => break c,
            None => order -= 1,
        }
    };

    // Numerator by convolution: B_m = Σ_{j ≤ m} C_j·A_{m−j}, m = 0..order.
    let mut b = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut sum = MpReal::zero_ctx(ctx);
        for (j, cj) in c.iter().enumerate().take(m + 1) {
            sum = &sum + &(cj * &a[m - j]);
        }
        b.push(sum);
    }

    let numerator = Poly::new(b);
    let denominator = Poly::new(c);
    let certificate = reexpansion_residual(&numerator, &denominator, &a, order, ctx);

    Ok(PadeApproximant {
        n,
        effective_n: order,
        numerator,
        denominator,
        certificate,
        ctx: ctx.clone(),
    })
}

/// Solve the order-`m` denominator system, or report rank deficiency.
///
/// Returns the full coefficient vector `[1, C_1, …, C_m]` on success.  The
/// elimination aborts as soon as the best remaining pivot falls below
/// `rel_tol · max-pivot`, so a failed attempt costs only the steps up to the
/// deficiency — walking the order down through a degenerate stretch is cheap.
fn solve_denominator(
    a: &[MpReal],
    m: usize,
    rel_tol: &MpReal,
    ctx: &PrecisionCtx,
) -> Option<Vec<MpReal>> {
    // Row r (r = 0..m) is the moment equation of order m+1+r:
    //   Σ_{c} M[r][c]·C_{c+1} = −A_{m+1+r},  M[r][c] = A_{m+r−c}.
    let mut mat: Vec<Vec<MpReal>> = (0..m)
        .map(|r| (0..m).map(|c| a[m + r - c].clone()).collect())
        .collect();
    let mut rhs: Vec<MpReal> = (0..m).map(|r| -&a[m + 1 + r]).collect();
    // Column permutation: col_of[k] = original unknown index sitting in slot k.
    let mut col_of: Vec<usize> = (0..m).collect();
    let mut max_pivot: Option<MpReal> = None;

    for k in 0..m {
        // Full pivot scan over the trailing block.
        let (mut pr, mut pc) = (k, k);
        for r in k..m {
            for c in k..m {
                if mat[r][c].abs_cmp(&mat[pr][pc]) == Ordering::Greater {
                    (pr, pc) = (r, c);
                }
            }
        }
        let pivot_mag = mat[pr][pc].abs();
        let deficient = match &max_pivot {
            None => pivot_mag.is_zero(),
            Some(mp) => pivot_mag < rel_tol * mp,
        };
        if deficient {
            return None;
        }
        if max_pivot.as_ref().map_or(true, |mp| &pivot_mag > mp) {
            max_pivot = Some(pivot_mag);
        }

        mat.swap(k, pr);
        if pc != k {
            for row in mat.iter_mut() {
                row.swap(k, pc);
            }
            col_of.swap(k, pc);
        }
        rhs.swap(k, pr);

        let (head, tail) = mat.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let rhs_k = rhs[k].clone();
        for (i, row) in tail.iter_mut().enumerate() {
            if row[k].is_zero() {
                continue;
            }
            let factor = &row[k] / &pivot_row[k];
            for c in k + 1..m {
                row[c] = &row[c] - &(&factor * &pivot_row[c]);
            }
            rhs[k + 1 + i] = &rhs[k + 1 + i] - &(&factor * &rhs_k);
        }
    }

    // Back-substitution in permuted order, then undo the column permutation.
    let mut x = vec![MpReal::zero(); m];
    for k in (0..m).rev() {
        let mut sum = rhs[k].clone();
        for c in k + 1..m {
            sum = &sum - &(&mat[k][c] * &x[c]);
        }
        x[k] = &sum / &mat[k][k];
    }
    let mut c_full = vec![MpReal::zero(); m + 1];
    c_full[0] = MpReal::from_i64(1, ctx);
    for k in 0..m {
        c_full[col_of[k] + 1] = x[k].clone();
    }
    Some(c_full)
}

/// Measured matched-order residual: re-expand `Q/R` through order
/// `2·effective_n` and compare against the inputs, scaled by the largest
/// input magnitude.  Doubled so the stored value is a usable upper bound.
fn reexpansion_residual(
    q: &Poly<MpReal>,
    r: &Poly<MpReal>,
    a: &[MpReal],
    order: usize,
    ctx: &PrecisionCtx,
) -> MpReal {
    let t = taylor_of_ratio(q, r, 2 * order);
    let mut scale = MpReal::zero_ctx(ctx);
    for am in a.iter().take(2 * order + 1) {
        let mag = am.abs();
        if mag > scale {
            scale = mag;
        }
    }
    let mut worst = MpReal::zero_ctx(ctx);
    for (m, tm) in t.iter().enumerate() {
        let dev = (tm - &a[m]).abs();
        if dev > worst {
            worst = dev;
        }
    }
    let two = MpReal::from_i64(2, ctx);
    &(&worst * &two) / &scale
}

/// Taylor coefficients `t_0..t_order` of `Q(w)/R(w)` (requires `R(0) ≠ 0`).
fn taylor_of_ratio(q: &Poly<MpReal>, r: &Poly<MpReal>, order: usize) -> Vec<MpReal> {
    let r0 = r.coeff(0);
    let r_deg = r.degree().unwrap_or(0);
    let mut t: Vec<MpReal> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut sum = q.coeff(m);
        for j in 1..=m.min(r_deg) {
            sum = &sum - &(&r.coeff(j) * &t[m - j]);
        }
        t.push(&sum / &r0);
    }
    t
}

/// Evaluate `Φ(Z) = (1/Z)·Q(1/Z)/R(1/Z)` at a complex point.
///
/// A denominator magnitude below `rel_tol` times its evaluation scale means
/// the point sits numerically on a pole; the error reports the nearest one.
pub fn pade_eval(p: &PadeApproximant, z: &MpComplex) -> Result<MpComplex> {
    let w = z.recip();
    let rv = eval_real_poly_complex(&p.denominator, &w);
    let qv = eval_real_poly_complex(&p.numerator, &w);
    let scale = eval_magnitude_scale(&p.denominator, &w.abs());
    if rv.abs() <= &p.ctx.rel_tol() * &scale {
        return Err(on_pole_error(p, z));
    }
    Ok(&(&qv / &rv) * &w)
}

/// Evaluate on the positive real axis (`Z` real), staying in real arithmetic.
pub fn pade_eval_axis(p: &PadeApproximant, z: &MpReal) -> Result<MpReal> {
    let w = z.recip();
    let rv = p.denominator.eval(&w);
    let qv = p.numerator.eval(&w);
    let scale = eval_magnitude_scale(&p.denominator, &w.abs());
    if rv.abs() <= &p.ctx.rel_tol() * &scale {
        return Err(on_pole_error(p, &MpComplex::from_real(z.clone())));
    }
    Ok(&(&qv / &rv) * &w)
}

/// Evaluate a real-coefficient polynomial at a complex argument.
fn eval_real_poly_complex(p: &Poly<MpReal>, w: &MpComplex) -> MpComplex {
    let mut acc = MpComplex::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * w) + &MpComplex::from_real(c.clone());
    }
    acc
}

/// Horner-style magnitude scale `Σ |r_j|·|w|^j`, the natural yardstick for
/// deciding that `R(w)` has cancelled to noise.
fn eval_magnitude_scale(p: &Poly<MpReal>, w_mag: &MpReal) -> MpReal {
    let mut acc = MpReal::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * w_mag) + &c.abs();
    }
    acc
}

/// Build the pole-identity error for an evaluation that landed on a root of
/// the denominator.  Root finding only happens on this (rare) failure path.
fn on_pole_error(p: &PadeApproximant, z: &MpComplex) -> Error {
    let pole = match pade_poles(p, &p.ctx) {
        Ok(ps) if !ps.poles.is_empty() => {
            let mut best: Option<(MpReal, MpComplex)> = None;
            for pole in &ps.poles {
                let d = (&pole.z0 - z).abs();
                if best.as_ref().map_or(true, |(bd, _)| &d < bd) {
                    best = Some((d, pole.z0.clone()));
                }
            }
            fmt_complex(&best.unwrap().1)
        }
        _ => "(pole location unavailable)".to_string(),
    };
    Error::EvaluationAtPole {
        point: fmt_complex(z),
        pole,
    }
}

/// Short display form for diagnostics.
fn fmt_complex(z: &MpComplex) -> String {
    format!(
        "{} + {}i",
        z.re.to_sci_string(8),
        z.im.to_sci_string(8)
    )
}

/// One denominator root, reported in the physical coordinates.
#[derive(Clone, Debug)]
pub struct Pole {
    /// Pole position in the `Z` plane (`Z₀ = 1/w₀` for a root `w₀` of `R`).
    pub z0: MpComplex,
    /// Residue of `Z·Φ(Z)` at `Z₀`, i.e. `−Z₀²·Q(w₀)/R′(w₀)`.
    pub residue: MpComplex,
    /// `i·Z₀`: the pole after the quarter-turn that puts the body's symmetry
    /// axis along the real direction, the frame in which the surface curve
    /// `x² = s²(z)` is usually drawn.
    pub rotated: MpComplex,
    /// Marked by [`filter_froissart`]; `false` until a filter has run.
    pub spurious: bool,
}

/// The poles of an approximant.
#[derive(Clone, Debug, Default)]
pub struct PoleSet {
    /// All poles, in the deterministic order produced by the root finder.
    pub poles: Vec<Pole>,
}

impl PoleSet {
    /// Poles that survived filtering (all of them if no filter has run).
    pub fn genuine(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| !p.spurious)
    }

    /// Poles marked spurious by the filter.
    pub fn spurious(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| p.spurious)
    }
}

/// Locate all poles: roots `w_k` of `R`, mapped to `Z₀ = 1/w_k`, with
/// residues and rotated coordinates.  No spuriousness judgement is made here.
pub fn pade_poles(p: &PadeApproximant, ctx: &PrecisionCtx) -> Result<PoleSet> {
    let dr = p.denominator.derivative();
    let roots = find_roots_real(&p.denominator, ctx)?;
    let mut poles = Vec::with_capacity(roots.len());
    for w0 in &roots {
        // R(0) = 1 exactly, so no root sits at w = 0; guard anyway.
        if w0.is_zero() {
            continue;
        }
        let z0 = w0.recip();
        let qv = eval_real_poly_complex(&p.numerator, w0);
        let rpv = eval_real_poly_complex(&dr, w0);
        let residue = -&(&(&z0 * &z0) * &(&qv / &rpv));
        poles.push(Pole {
            rotated: z0.mul_i(),
            residue,
            z0,
            spurious: false,
        });
    }
    Ok(PoleSet { poles })
}

/// Zeros of the approximant in `Z` coordinates (`1/w` for each root `w` of
/// `Q`); zeros at infinity (roots at `w = 0`) are dropped.
pub fn pade_zeros(p: &PadeApproximant, ctx: &PrecisionCtx) -> Result<Vec<MpComplex>> {
    if p.numerator.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let roots = find_roots_real(&p.numerator, ctx)?;
    Ok(roots
        .iter()
        .filter(|w| !w.is_zero())
        .map(|w| w.recip())
        .collect())
}

/// Mark Froissart doublets: a pole is spurious when a numerator zero sits
/// within `pair_tol·|Z₀|` of it (a pole–zero pair that cancels to numerical
/// noise) or when its residue magnitude is below `residue_tol` times the
/// median residue magnitude (too weak to be a feature of the function).
///
/// `zeros` must be the approximant's zeros in `Z` coordinates, as produced
/// by [`pade_zeros`].
pub fn filter_froissart(
    ps: &PoleSet,
    zeros: &[MpComplex],
    pair_tol: &MpReal,
    residue_tol: &MpReal,
) -> PoleSet {
    let mut mags: Vec<MpReal> = ps.poles.iter().map(|p| p.residue.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let median = if mags.is_empty() {
        MpReal::zero()
    } else {
        mags[mags.len() / 2].clone()
    };
    let residue_floor = residue_tol * &median;

    let poles = ps
        .poles
        .iter()
        .map(|p| {
            let pair_dist = pair_tol * &p.z0.abs();
            let paired = zeros.iter().any(|z| (z - &p.z0).abs() <= pair_dist);
            let weak = p.residue.abs() < residue_floor;
            Pole {
                spurious: paired || weak,
                ..p.clone()
            }
        })
        .collect();
    PoleSet { poles }
}

/// Poles with Froissart filtering applied in one step.
pub fn classify_poles(
    p: &PadeApproximant,
    ctx: &PrecisionCtx,
    pair_tol: &MpReal,
    residue_tol: &MpReal,
) -> Result<PoleSet> {
    let ps = pade_poles(p, ctx)?;
    let zeros = pade_zeros(p, ctx)?;
    Ok(filter_froissart(&ps, &zeros, pair_tol, residue_tol))
}

/// Re-weight a series for evaluation along the ray at colatitude `θ`:
/// `A_n ↦ A_n·P_n(cos θ)`.  The potential along that ray has the same
/// `1/Z` expansion form as the axis series, so the weighted coefficients
/// feed directly into [`build_pade`].
pub fn weight_colatitude(series: &SheSeries, theta: &MpReal) -> SheSeries {
    let x = theta.cos();
    let pn = legendre_ladder(series.n_max(), &x);
    let coeffs = series
        .coeffs
        .iter()
        .zip(pn.iter())
        .map(|(a, p)| a * p)
        .collect();
    SheSeries {
        coeffs,
        provenance: series.provenance,
        ctx: series.ctx.clone(),
        profile: series.profile.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{close_rel, Rational};
    use crate::planet::{potential_spheroid_closed, she_closed_form, ExactScalar, ShapeProfile};

    fn ctx(digits: u32) -> PrecisionCtx {
        PrecisionCtx::new(digits)
    }

    fn r(num: i64, den: i64, cx: &PrecisionCtx) -> MpReal {
        MpReal::from_rational(&Rational::new(num.into(), den.into()), cx)
    }

    /// The five printed Taylor coefficients of (1−√(1−z))/z build a [2,2]
    /// approximant that reproduces all of them on re-expansion.
    #[test]
    fn branch_point_example_matches_all_five_coefficients() {
        let cx = ctx(40);
        let a = vec![
            r(1, 2, &cx),
            r(1, 8, &cx),
            r(1, 16, &cx),
            r(5, 128, &cx),
            r(7, 256, &cx),
        ];
        let p = build_pade_from_coeffs(&a, 2, &cx).unwrap();
        assert_eq!(p.effective_order(), 2);
        let t = taylor_of_ratio(p.numerator(), p.denominator(), 4);
        let tol = &cx.rel_tol() * &MpReal::from_i64(100, &cx);
        for (tm, am) in t.iter().zip(a.iter()) {
            assert!((tm - am).abs() <= &tol * &am.abs());
        }
        assert!(p.certificate() < &MpReal::from_f64(1e-30, &cx));
    }

    /// A pure geometric series c·rⁿ is a [1,1] rational; the build recovers
    /// the pole at Z₀ = r exactly and the residue c·r.
    #[test]
    fn geometric_series_is_exact_at_order_one() {
        let cx = ctx(60);
        let c = r(3, 1, &cx);
        let rr = r(2, 5, &cx);
        let mut a = Vec::new();
        let mut term = c.clone();
        for _ in 0..9 {
            a.push(term.clone());
            term = &term * &rr;
        }
        let p = build_pade_from_coeffs(&a, 1, &cx).unwrap();
        assert_eq!(p.effective_order(), 1);
        let ps = pade_poles(&p, &cx).unwrap();
        assert_eq!(ps.poles.len(), 1);
        let tol = &cx.rel_tol() * &MpReal::from_i64(100, &cx);
        let z0 = &ps.poles[0].z0;
        assert!((&z0.re - &rr).abs() <= tol);
        assert!(z0.im.abs() <= tol);
        // residue of Z·Φ = c·Z/(Z−r) at Z = r is c·r
        let want = &c * &rr;
        assert!((&ps.poles[0].residue.re - &want).abs() <= &tol * &want.abs());
    }

    /// Requesting a higher order on the geometric series walks down through
    /// the rank-deficient stretch and still lands on the exact [1,1] form.
    #[test]
    fn geometric_series_reduces_from_higher_order() {
        let cx = ctx(60);
        let rr = r(-3, 7, &cx);
        let mut a = Vec::new();
        let mut term = r(1, 1, &cx);
        for _ in 0..13 {
            a.push(term.clone());
            term = &term * &rr;
        }
        let p = build_pade_from_coeffs(&a, 6, &cx).unwrap();
        assert_eq!(p.requested_order(), 6);
        assert_eq!(p.effective_order(), 1);
        let ps = pade_poles(&p, &cx).unwrap();
        let tol = &cx.rel_tol() * &MpReal::from_i64(100, &cx);
        assert!((&ps.poles[0].z0.re - &rr).abs() <= tol);
    }

    /// An even geometric series (poles at ±r) is a [0,2] rational: the
    /// odd-order system is rank-deficient, the even order is exact.
    #[test]
    fn even_series_reduces_to_even_order() {
        let cx = ctx(60);
        let rr = r(5, 8, &cx);
        let r2 = &rr * &rr;
        let mut a = Vec::new();
        let mut term = r(1, 1, &cx);
        for k in 0..13 {
            if k % 2 == 0 {
                a.push(term.clone());
                term = &term * &r2;
            } else {
                a.push(MpReal::zero_ctx(&cx));
            }
        }
        let p = build_pade_from_coeffs(&a, 3, &cx).unwrap();
        assert_eq!(p.effective_order(), 2);
        let ps = pade_poles(&p, &cx).unwrap();
        assert_eq!(ps.poles.len(), 2);
        let tol = &cx.rel_tol() * &MpReal::from_i64(100, &cx);
        for pole in &ps.poles {
            assert!((pole.z0.abs() - rr.clone()).abs() <= tol);
            assert!(pole.z0.im.abs() <= tol);
        }
    }

    /// A sign-alternating even series must keep its full even order: the
    /// pivot scan has to rank magnitudes correctly when entries are negative
    /// or exactly zero (regression for a miscounted rank collapse).
    #[test]
    fn alternating_even_series_keeps_even_order() {
        let cx = ctx(60);
        // (1 + w²)^{3/2} = 1 + (3/2)w² + (3/8)w⁴ − (1/16)w⁶ + (3/128)w⁸ − …
        let ratios: [(i64, i64); 9] = [
            (1, 1),
            (0, 1),
            (3, 2),
            (0, 1),
            (3, 8),
            (0, 1),
            (-1, 16),
            (0, 1),
            (3, 128),
        ];
        let a: Vec<MpReal> = ratios.iter().map(|&(n, d)| r(n, d, &cx)).collect();
        let p = build_pade_from_coeffs(&a, 4, &cx).unwrap();
        assert_eq!(p.effective_order(), 4);
        assert!(p.certificate().to_f64() < 1e-40);
    }

    /// A one-term series (point mass) admits no [N,N] approximant with
    /// N ≥ 1: the build must walk all the way down and report degeneracy.
    #[test]
    fn point_mass_series_is_rational_degenerate() {
        let cx = ctx(30);
        let mut a = vec![MpReal::zero_ctx(&cx); 11];
        a[0] = r(-1, 1, &cx);
        match build_pade_from_coeffs(&a, 5, &cx) {
            Err(Error::RationalDegenerate) => {}
            other => panic!("expected RationalDegenerate, got {other:?}"),
        }
    }

    #[test]
    fn short_series_is_rejected() {
        let cx = ctx(30);
        let a = vec![r(1, 1, &cx); 6];
        match build_pade_from_coeffs(&a, 3, &cx) {
            Err(Error::SeriesTooShort { have: 6, n: 3, need: 7 }) => {}
            other => panic!("expected SeriesTooShort, got {other:?}"),
        }
    }

    /// Z·Φ(Z) → A₀ as Z → ∞ (monopole limit), and evaluation exactly on a
    /// pole is refused with the pole's identity.
    #[test]
    fn eval_monopole_limit_and_pole_rejection() {
        let cx = ctx(50);
        let c = r(-7, 2, &cx);
        let rr = r(1, 3, &cx);
        let mut a = Vec::new();
        let mut term = c.clone();
        for _ in 0..9 {
            a.push(term.clone());
            term = &term * &rr;
        }
        let p = build_pade_from_coeffs(&a, 1, &cx).unwrap();
        let big = r(1_000_000_000, 1, &cx);
        let val = pade_eval_axis(&p, &big).unwrap();
        let tol = MpReal::from_f64(1e-8, &cx);
        assert!((&(&val * &big) - &c).abs() <= &tol * &c.abs());

        match pade_eval_axis(&p, &rr) {
            Err(Error::EvaluationAtPole { .. }) => {}
            other => panic!("expected EvaluationAtPole, got {other:?}"),
        }
    }

    /// Spheroid check against the independent closed form: the [40,40]
    /// approximant of the 100-term series evaluated at Z = 3 matches the
    /// exact exterior potential far beyond the series' own truncation error.
    #[test]
    fn spheroid_pade_matches_closed_potential() {
        let cx = ctx(60);
        let profile = ShapeProfile::spheroid(
            ExactScalar::from_ratio(3, 2),
            ExactScalar::from_int(1),
        )
        .unwrap();
        let series = she_closed_form(&profile, 100, &cx).unwrap();
        let p = build_pade(&series, 40).unwrap();
        assert_eq!(p.effective_order(), 40);
        let z = MpComplex::from_real(r(3, 1, &cx));
        let approx = pade_eval(&p, &z).unwrap();
        let exact = potential_spheroid_closed(
            &ExactScalar::from_ratio(3, 2),
            &ExactScalar::from_int(1),
            &z,
            &cx,
        )
        .unwrap();
        let err = (&approx - &exact).abs();
        let tol = &cx.rel_tol() * &MpReal::from_i64(1000, &cx);
        assert!(
            err <= &tol * &exact.abs(),
            "pade vs closed form at Z=3: err {err:?}"
        );
    }

    /// Spheroid poles lie on the imaginary Z axis, i.e. the rotated poles
    /// i·Z₀ are real and confined to the focal segment (−c, c), c² = a²−b².
    #[test]
    fn spheroid_poles_sit_on_focal_segment() {
        let cx = ctx(60);
        let profile = ShapeProfile::spheroid(
            ExactScalar::from_ratio(3, 2),
            ExactScalar::from_int(1),
        )
        .unwrap();
        let series = she_closed_form(&profile, 80, &cx).unwrap();
        let p = build_pade(&series, 30).unwrap();
        let ps = pade_poles(&p, &cx).unwrap();
        assert_eq!(ps.poles.len(), 30);
        let c = r(5, 4, &cx).sqrt();
        let slack = MpReal::from_f64(1e-6, &cx);
        for pole in &ps.poles {
            assert!(pole.z0.re.abs() <= slack, "pole off the imaginary axis");
            assert!(pole.rotated.im.abs() <= slack);
            assert!(pole.rotated.re.abs() < &c + &slack, "outside focal segment");
        }
    }

    /// Pole accumulation toward the focal endpoints: the worst gap between
    /// the segment tips ±c and the nearest pole shrinks as N grows.
    #[test]
    fn spheroid_pole_accumulation_tightens_with_order() {
        let cx = ctx(100);
        let profile = ShapeProfile::spheroid(
            ExactScalar::from_ratio(3, 2),
            ExactScalar::from_int(1),
        )
        .unwrap();
        let series = she_closed_form(&profile, 210, &cx).unwrap();
        let c = r(5, 4, &cx).sqrt();
        let mut gaps = Vec::new();
        for n in [25usize, 50, 100] {
            let p = build_pade(&series, n).unwrap();
            let ps = pade_poles(&p, &cx).unwrap();
            let mut worst = MpReal::zero_ctx(&cx);
            for tip in [c.clone(), -&c] {
                let mut best: Option<MpReal> = None;
                for pole in &ps.poles {
                    let d = (&pole.rotated.re - &tip).abs();
                    if best.as_ref().map_or(true, |b| &d < b) {
                        best = Some(d);
                    }
                }
                let gap = best.unwrap();
                if gap > worst {
                    worst = gap;
                }
            }
            gaps.push(worst);
        }
        // Monotone within a factor of 2 across the three orders.
        let two = MpReal::from_i64(2, &cx);
        assert!(gaps[1] <= &gaps[0] * &two, "N=50 gap not within 2x of N=25");
        assert!(gaps[2] <= &gaps[1] * &two, "N=100 gap not within 2x of N=50");
        assert!(gaps[2] < gaps[0], "no net tightening from N=25 to N=100");
    }

    /// Real input coefficients give a pole set closed under conjugation.
    #[test]
    fn poles_close_under_conjugation() {
        let cx = ctx(60);
        // Series of (2 + w)/(1 − w + w²/2): complex conjugate pole pair.
        let q = Poly::new(vec![r(2, 1, &cx), r(1, 1, &cx)]);
        let den = Poly::new(vec![r(1, 1, &cx), r(-1, 1, &cx), r(1, 2, &cx)]);
        let a = taylor_of_ratio(&q, &den, 12);
        let p = build_pade_from_coeffs(&a, 2, &cx).unwrap();
        let ps = pade_poles(&p, &cx).unwrap();
        assert_eq!(ps.poles.len(), 2);
        let tol = &cx.rel_tol() * &MpReal::from_i64(100, &cx);
        let conj = ps.poles[0].z0.conj();
        assert!((&conj - &ps.poles[1].z0).abs() <= &tol * &conj.abs());
    }

    /// Hand-built doublet: a pole paired with a nearby zero is marked
    /// spurious, an isolated pole with ordinary residue is not.
    #[test]
    fn froissart_doublet_is_flagged() {
        let cx = ctx(40);
        let mk = |re: f64| MpComplex::from_real(MpReal::from_f64(re, &cx));
        let pole = |re: f64, res: f64| Pole {
            z0: mk(re),
            residue: mk(res),
            rotated: mk(re).mul_i(),
            spurious: false,
        };
        let ps = PoleSet {
            poles: vec![pole(1.0001, 1e-14), pole(0.4, 2.0), pole(0.9, 1.5)],
        };
        let zeros = vec![mk(1.0002)];
        let pair_tol = MpReal::from_f64(DEFAULT_PAIR_TOL, &cx);
        let residue_tol = MpReal::from_f64(DEFAULT_RESIDUE_TOL, &cx);
        let filtered = filter_froissart(&ps, &zeros, &pair_tol, &residue_tol);
        assert!(filtered.poles[0].spurious, "doublet not flagged");
        assert!(!filtered.poles[1].spurious);
        assert!(!filtered.poles[2].spurious);
        assert_eq!(filtered.genuine().count(), 2);
    }

    /// Weak-residue arm of the filter: a pole whose residue is far below the
    /// median is spurious even without a paired zero.
    #[test]
    fn froissart_weak_residue_is_flagged() {
        let cx = ctx(40);
        let mk = |re: f64| MpComplex::from_real(MpReal::from_f64(re, &cx));
        let pole = |re: f64, res: f64| Pole {
            z0: mk(re),
            residue: mk(res),
            rotated: mk(re).mul_i(),
            spurious: false,
        };
        let ps = PoleSet {
            poles: vec![pole(0.3, 1.0), pole(0.5, 2.0), pole(0.7, 1e-20)],
        };
        let pair_tol = MpReal::from_f64(DEFAULT_PAIR_TOL, &cx);
        let residue_tol = MpReal::from_f64(DEFAULT_RESIDUE_TOL, &cx);
        let filtered = filter_froissart(&ps, &[], &pair_tol, &residue_tol);
        assert!(filtered.poles[2].spurious);
        assert_eq!(filtered.genuine().count(), 2);
    }

    /// θ = 0 leaves every coefficient unchanged (P_n(1) = 1); θ = π/2 scales
    /// A_{2n} by P_{2n}(0) = (−1)ⁿ(2n−1)!!/(2n)!!.
    #[test]
    fn colatitude_weights_match_legendre_values() {
        let cx = ctx(50);
        let profile = ShapeProfile::spheroid(
            ExactScalar::from_ratio(3, 2),
            ExactScalar::from_int(1),
        )
        .unwrap();
        let series = she_closed_form(&profile, 8, &cx).unwrap();
        let tol = &cx.rel_tol() * &MpReal::from_i64(100, &cx);

        let floor = MpReal::from_f64(1e-40, &cx);
        let same = weight_colatitude(&series, &MpReal::zero_ctx(&cx));
        for (a, b) in series.coeffs.iter().zip(same.coeffs.iter()) {
            assert!(close_rel(b, a, &tol, &floor));
        }

        let half_pi = &MpReal::pi(&cx) / &MpReal::from_i64(2, &cx);
        let equator = weight_colatitude(&series, &half_pi);
        // P_0(0)=1, P_2(0)=−1/2, P_4(0)=3/8, P_6(0)=−5/16, P_8(0)=35/128
        let p2n0 = [
            r(1, 1, &cx),
            r(-1, 2, &cx),
            r(3, 8, &cx),
            r(-5, 16, &cx),
            r(35, 128, &cx),
        ];
        for (k, w) in p2n0.iter().enumerate() {
            let want = &series.coeffs[2 * k] * w;
            let got = &equator.coeffs[2 * k];
            assert!(close_rel(got, &want, &tol, &floor));
        }
    }
}
