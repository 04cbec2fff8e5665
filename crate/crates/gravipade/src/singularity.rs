//! Analytic location and classification of the potential's complex
//! singularities.
//!
//! The on-axis exterior potential of a body with meridian profile
//! `x² = s²(z)` is an integral of `√p(z)` with `p(z) = (Z − z)² + s²(z)`.
//! Moving the observation point `Z` into the complex plane, the integral
//! stays analytic until `p` acquires a double root — equivalently, until the
//! `z`-discriminant of `p` vanishes.  For polynomial `s²` that discriminant
//! is itself a polynomial in `Z`, so the candidate singularities are exactly
//! its roots, computable to any precision.  A body whose profile terminates
//! with positive thickness (a flat cylinder face) contributes additional
//! candidates at the rim, `Z₀ = z_end ∓ i·s(z_end)`, where the integration
//! endpoint itself collides with a branch point of `√p`.
//!
//! Only singularities on the potential's first Riemann sheet limit the
//! convergence of the exterior series.  After the quarter-turn `i·Z₀` each
//! candidate lands in the meridian plane, and a point-against-curve test
//! decides the sheet: inside the surface curve (or on it) the singularity is
//! real and sets the convergence radius; outside, it belongs to a hidden
//! sheet and leaves no trace in the coefficients.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::mp::{MpComplex, MpReal, PrecisionCtx, Rational};
use crate::planet::{brillouin_radius, ShapeProfile};
use crate::poly::{
    discriminant_in_z, double_root_criterion_poly, find_roots, Poly,
};
use crate::Result;

/// Position of a rotated singularity relative to the surface curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityClass {
    /// Strictly inside the body: limits the series' convergence.
    Interior,
    /// Off the first sheet: invisible to the exterior expansion.
    Exterior,
    /// On the surface curve within tolerance (e.g. cylinder rim corners).
    Boundary,
}

impl SingularityClass {
    /// Lower-case label for reports.
    pub fn name(self) -> &'static str {
        match self {
            SingularityClass::Interior => "interior",
            SingularityClass::Exterior => "exterior",
            SingularityClass::Boundary => "boundary",
        }
    }
}

/// One candidate singularity with its classification.
#[derive(Clone, Debug)]
pub struct ClassifiedRoot {
    /// Location in the observation plane.
    pub z0: MpComplex,
    /// `i·Z₀`, the same point in the meridian plane of the body.
    pub rotated: MpComplex,
    /// First-sheet judgement.
    pub class: SingularityClass,
}

/// Every candidate singularity of a profile, classified, with the radii
/// they imply.
#[derive(Clone, Debug)]
pub struct SingularitySet {
    /// Candidates in deterministic order (by real, then imaginary part).
    pub roots: Vec<ClassifiedRoot>,
    /// Largest `|Z₀|` among Interior/Boundary roots — the convergence
    /// radius of the exterior series (0 for a terminating series).
    pub convergence_radius: MpReal,
    /// Radius of the smallest origin-centered sphere containing the body.
    pub brillouin: MpReal,
    /// True when the series terminates (the centered sphere): there are no
    /// finite first-sheet singularities at all, rather than a radius of 0
    /// being meaningful geometrically.
    pub terminating: bool,
}

impl SingularitySet {
    /// Roots that limit convergence (Interior or Boundary).
    pub fn limiting(&self) -> impl Iterator<Item = &ClassifiedRoot> {
        self.roots
            .iter()
            .filter(|r| r.class != SingularityClass::Exterior)
    }
}

/// Roots `Z₀` of the `z`-discriminant of `(Z − z)² + s²(z)` at context
/// precision, sorted by real then imaginary part.
///
/// The centered sphere makes `p` linear in `z` (no double root possible for
/// any `Z`) and surfaces as [`Error::ProfileTooSimple`]; a profile that
/// collapses `p` to a perfect square for every `Z` is rejected as
/// [`Error::DegenerateDiscriminant`].
pub fn discriminant_roots(
    profile: &ShapeProfile,
    ctx: &PrecisionCtx,
) -> Result<Vec<MpComplex>> {
    let p = double_root_criterion_poly(&profile.s2_poly());
    let disc = discriminant_in_z(&p)?;
    if disc.is_zero() {
        return Err(Error::DegenerateDiscriminant);
    }
    if disc.degree() == Some(0) {
        // Nonvanishing constant: no double root for any Z (cylinder).
        return Ok(Vec::new());
    }
    let disc_mp = disc.map(|c| MpComplex::from_real(MpReal::from_rational(c, ctx)));
    find_roots(&disc_mp, ctx)
}

/// Classification tolerance used when none is supplied: `10⁻⁶` of the
/// Brillouin radius — a length small against every feature of the body.
pub fn default_classify_tol(profile: &ShapeProfile, ctx: &PrecisionCtx) -> MpReal {
    &MpReal::from_f64(1e-6, ctx) * &brillouin_radius(profile, ctx)
}

/// Place a rotated point `x + i·y` relative to the surface curve
/// `x² = s²(y)`.
///
/// Boundary wins within `tol` of the curve (measured as
/// `|x² − s²(y)| / |∇(x² − s²(y))|`, a first-order distance estimate), so
/// that on-curve singularities like the cylinder corners cannot be flipped
/// to Interior or Exterior by rounding.  Interior requires strictly
/// `z_min < y < z_max` and `x² < s²(y)`; everything else is Exterior.
pub fn classify(
    rotated: &MpComplex,
    profile: &ShapeProfile,
    tol: &MpReal,
    ctx: &PrecisionCtx,
) -> SingularityClass {
    let x = &rotated.re;
    let y = &rotated.im;
    let (z_min, z_max) = profile.z_span(ctx);
    let s2 = profile.s2_poly();
    let s2_y = Poly::<MpReal>::eval_rational_poly(&s2, y);
    let f = &(x * x) - &s2_y;

    let ds2_y = Poly::<MpReal>::eval_rational_poly(&s2.derivative(), y);
    let grad = &(&x.abs() * &MpReal::from_i64(2, ctx)) + &ds2_y.abs();
    // The tol summand keeps the band nonempty even at a degenerate gradient.
    let band = tol * &(&grad + tol);

    let y_in_band = *y >= &z_min - tol && *y <= &z_max + tol;
    if f.abs() <= band && y_in_band {
        return SingularityClass::Boundary;
    }
    if *y > z_min && *y < z_max && f.is_negative() {
        return SingularityClass::Interior;
    }
    SingularityClass::Exterior
}

/// Assemble the full singularity picture of a profile: discriminant roots,
/// rim corners where the profile ends with positive thickness, first-sheet
/// classification of each, and the implied convergence radius.
pub fn singularity_set(profile: &ShapeProfile, ctx: &PrecisionCtx) -> Result<SingularitySet> {
    singularity_set_with_tol(profile, ctx, None)
}

/// [`singularity_set`] with an explicit classification tolerance.
pub fn singularity_set_with_tol(
    profile: &ShapeProfile,
    ctx: &PrecisionCtx,
    tol: Option<&MpReal>,
) -> Result<SingularitySet> {
    let brillouin = brillouin_radius(profile, ctx);
    let tol = match tol {
        Some(t) => t.clone(),
        None => &MpReal::from_f64(1e-6, ctx) * &brillouin,
    };

    let (mut candidates, terminating) = match discriminant_roots(profile, ctx) {
        Ok(roots) => (roots, false),
        // p linear in z: no double-root mechanism at all.  For the centered
        // sphere that is the terminating series; anything else (an
        // off-center sphere) genuinely escapes this analysis.
        Err(Error::ProfileTooSimple { degree }) => {
            if is_centered_sphere(profile) {
                (Vec::new(), true)
            } else {
                return Err(Error::ProfileTooSimple { degree });
            }
        }
        Err(e) => return Err(e),
    };

    // Rim corners: endpoints where the profile still has positive thickness.
    let (z_min, z_max) = profile.z_span(ctx);
    let thickness_floor = &tol * &tol;
    for z_e in [&z_min, &z_max] {
        let s2_e = profile.s2_at(z_e, ctx);
        if s2_e <= thickness_floor {
            continue;
        }
        let s_e = s2_e.sqrt();
        for corner in [
            MpComplex::new(z_e.clone(), -&s_e),
            MpComplex::new(z_e.clone(), s_e.clone()),
        ] {
            let duplicate = candidates.iter().any(|r| (r - &corner).abs() <= tol);
            if !duplicate {
                candidates.push(corner);
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });

    let roots: Vec<ClassifiedRoot> = candidates
        .into_iter()
        .map(|z0| {
            let rotated = z0.mul_i();
            let class = classify(&rotated, profile, &tol, ctx);
            ClassifiedRoot { z0, rotated, class }
        })
        .collect();

    let mut convergence_radius = MpReal::zero_ctx(ctx);
    let mut any_limiting = false;
    for r in &roots {
        if r.class != SingularityClass::Exterior {
            any_limiting = true;
            let m = r.z0.abs();
            if m > convergence_radius {
                convergence_radius = m;
            }
        }
    }
    if !any_limiting && !terminating {
        return Err(Error::NoConvergenceLimitingRoots {
            reason: "every candidate singularity classifies Exterior".into(),
        });
    }

    Ok(SingularitySet {
        roots,
        convergence_radius,
        brillouin,
        terminating,
    })
}

/// `s² = c − z²` exactly: the one shape whose expansion terminates.
fn is_centered_sphere(profile: &ShapeProfile) -> bool {
    let s2 = profile.s2_poly();
    s2.degree() == Some(2)
        && s2.coeff(1) == Rational::zero()
        && s2.coeff(2) == -Rational::one()
}

/// Convergence radius of the exterior series implied by the singularity
/// set: the largest `|Z₀|` among first-sheet roots, or 0 for a terminating
/// series (see [`SingularitySet::terminating`]).
pub fn convergence_radius(sing: &SingularitySet) -> MpReal {
    sing.convergence_radius.clone()
}

/// Verify that a double-root location `z₀` satisfies the closed singularity
/// condition: `s′(z₀) = ±i` (to `rel_tol·10³`) with the induced
/// `Z₀ = z₀ + s(z₀)·s′(z₀)` matching one of the discriminant roots.
///
/// `s` is the principal square root of the polynomial `s²`, so `z₀` may not
/// sit on a zero of `s²` (a branch point of `s` itself).
pub fn combined_condition_check(
    profile: &ShapeProfile,
    z0: &MpComplex,
    ctx: &PrecisionCtx,
) -> Result<bool> {
    let s2 = profile.s2_poly();
    let u = Poly::<MpComplex>::eval_rational_poly(&s2, z0);

    // Magnitude yardstick for the branch-point guard: Σ |c_k|·|z₀|^k.
    let z_mag = z0.abs();
    let mut scale = MpReal::zero_ctx(ctx);
    for c in s2.coeffs().iter().rev() {
        scale = &(&scale * &z_mag) + &MpReal::from_rational(c, ctx).abs();
    }
    let tol = &ctx.rel_tol() * &MpReal::from_i64(1000, ctx);
    if u.abs() <= &tol * &scale {
        return Err(Error::ProfileBranchPoint {
            z0: format!(
                "{} + {}i",
                z0.re.to_sci_string(8),
                z0.im.to_sci_string(8)
            ),
        });
    }

    let s = u.sqrt();
    let ds2 = Poly::<MpComplex>::eval_rational_poly(&s2.derivative(), z0);
    let two = MpComplex::from_real(MpReal::from_i64(2, ctx));
    let s_prime = &ds2 / &(&two * &s);

    let i_unit = MpComplex::i(ctx);
    let plus = (&s_prime - &i_unit).abs() <= tol;
    let minus = (&s_prime + &i_unit).abs() <= tol;
    if !plus && !minus {
        return Ok(false);
    }

    let z_cap = z0 + &(&s * &s_prime);
    let roots = discriminant_roots(profile, ctx)?;
    let match_tol = &tol * &(&MpReal::from_i64(1, ctx) + &z_cap.abs());
    Ok(roots.iter().any(|r| (r - &z_cap).abs() <= match_tol))
}

/// The double-root location `z₀` behind a discriminant root: the root of
/// `∂p/∂z` at `Z = Z₀` where `p` itself is (numerically) smallest.
pub fn double_root_for(
    profile: &ShapeProfile,
    z0_sing: &MpComplex,
    ctx: &PrecisionCtx,
) -> Result<MpComplex> {
    let s2 = profile.s2_poly();
    // p(z) = s²(z) + (Z₀ − z)² as a complex polynomial in z.
    let mut coeffs: Vec<MpComplex> = s2
        .coeffs()
        .iter()
        .map(|c| MpComplex::from_real(MpReal::from_rational(c, ctx)))
        .collect();
    while coeffs.len() < 3 {
        coeffs.push(MpComplex::zero());
    }
    coeffs[0] = &coeffs[0] + &(z0_sing * z0_sing);
    coeffs[1] = &coeffs[1] - &(&MpComplex::from_real(MpReal::from_i64(2, ctx)) * z0_sing);
    coeffs[2] = &coeffs[2] + &MpComplex::from_real(MpReal::from_i64(1, ctx));
    let p = Poly::new(coeffs);
    let dp = p.derivative();
    let roots = find_roots(&dp, ctx)?;

    let mut best: Option<(MpReal, MpComplex)> = None;
    for r in roots {
        let v = p.eval(&r).abs();
        if best.as_ref().map_or(true, |(bv, _)| &v < bv) {
            best = Some((v, r));
        }
    }
    best.map(|(_, r)| r).ok_or(Error::ProfileTooSimple {
        degree: p.degree().unwrap_or(0),
    })
}
