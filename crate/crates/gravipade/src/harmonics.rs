//! Full axisymmetric potential `Φ(r, θ)` assembled from an axis series.
//!
//! For an axisymmetric body the on-axis coefficients determine the potential
//! everywhere outside the Brillouin sphere:
//!
//! ```text
//! Φ(r, θ) = Σ_n A_n·P_n(cos θ) / r^{n+1},
//! ```
//!
//! so promoting the axis series to a colatitude θ is exactly a reweighting
//! of coefficients by Legendre values ([`crate::pade::weight_colatitude`]).
//! This module evaluates honest partial sums only — no acceleration — so it
//! can serve as the baseline the rational continuation is measured against.

use crate::mp::{MpReal, PrecisionCtx};
use crate::planet::SheSeries;
use crate::poly::legendre_ladder;
use crate::singularity::singularity_set;
use crate::Result;

/// A series bundled with the convergence radius its singularities imply,
/// ready for evaluation at arbitrary `(r, θ)`.
#[derive(Clone, Debug)]
pub struct PotentialField {
    series: SheSeries,
    convergence_radius: MpReal,
    terminating: bool,
}

/// One evaluation of the partial sum.
#[derive(Clone, Debug)]
pub struct PotentialSample {
    /// Value of the partial sum `Σ_{n ≤ n_terms} A_n·P_n(cos θ)/r^{n+1}`.
    pub value: MpReal,
    /// True when `r` is below the series' convergence radius: the partial
    /// sum carries no accuracy guarantee there (it typically diverges).
    pub below_convergence_radius: bool,
}

impl PotentialField {
    /// Bundle a series with its profile's convergence radius (computed once
    /// from the singularity analysis).
    pub fn new(series: SheSeries, ctx: &PrecisionCtx) -> Result<Self> {
        let set = singularity_set(&series.profile, ctx)?;
        Ok(Self {
            series,
            convergence_radius: set.convergence_radius,
            terminating: set.terminating,
        })
    }

    /// The wrapped series.
    pub fn series(&self) -> &SheSeries {
        &self.series
    }

    /// Radius below which partial sums lose their guarantee (0 for a
    /// terminating series, which converges everywhere outside the body).
    pub fn convergence_radius(&self) -> &MpReal {
        &self.convergence_radius
    }

    /// Partial sum at radius `r`, colatitude `theta`, through degree
    /// `n_terms` (capped at the series length).
    pub fn potential(&self, r: &MpReal, theta: &MpReal, n_terms: usize) -> PotentialSample {
        let value = potential_partial_sum(&self.series, r, theta, n_terms);
        let below = !self.terminating && *r < self.convergence_radius;
        PotentialSample {
            value,
            below_convergence_radius: below,
        }
    }
}

/// The raw partial sum `Σ_{n ≤ n_terms} A_n·P_n(cos θ)/r^{n+1}`, with no
/// convergence bookkeeping.
pub fn potential_partial_sum(
    series: &SheSeries,
    r: &MpReal,
    theta: &MpReal,
    n_terms: usize,
) -> MpReal {
    let n_top = n_terms.min(series.n_max());
    let x = theta.cos();
    let pn = legendre_ladder(n_top, &x);
    let inv_r = r.recip();
    let mut inv_pow = inv_r.clone(); // r^{-(n+1)} for n = 0
    let mut sum = MpReal::zero_ctx(&series.ctx);
    for n in 0..=n_top {
        let term = &(&series.coeffs[n] * &pn[n]) * &inv_pow;
        sum = &sum + &term;
        inv_pow = &inv_pow * &inv_r;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pade::{build_pade, pade_eval_axis, weight_colatitude};
    use crate::planet::{she_closed_form, ExactScalar, ShapeProfile};

    fn ctx(digits: u32) -> PrecisionCtx {
        PrecisionCtx::new(digits)
    }

    /// At θ = 0 every Legendre factor is exactly 1, so the general
    /// evaluation reproduces the plain axis sum bit for bit.
    #[test]
    fn axis_evaluation_is_plain_sum() {
        let cx = ctx(50);
        let profile =
            ShapeProfile::spheroid(ExactScalar::from_ratio(3, 2), ExactScalar::from_int(1))
                .unwrap();
        let series = she_closed_form(&profile, 30, &cx).unwrap();
        let r = MpReal::from_f64(2.5, &cx);

        let general = potential_partial_sum(&series, &r, &MpReal::zero_ctx(&cx), 30);
        let inv_r = r.recip();
        let mut inv_pow = inv_r.clone();
        let mut plain = MpReal::zero_ctx(&cx);
        for n in 0..=30 {
            plain = &plain + &(&series.coeffs[n] * &inv_pow);
            inv_pow = &inv_pow * &inv_r;
        }
        let tol = &cx.rel_tol() * &plain.abs();
        assert!((&general - &plain).abs() <= tol);
    }

    /// Shell theorem: the sphere's potential is −GM/r at every colatitude.
    #[test]
    fn sphere_is_isotropic() {
        let cx = ctx(50);
        let profile =
            ShapeProfile::spheroid(ExactScalar::from_int(1), ExactScalar::from_int(1)).unwrap();
        let series = she_closed_form(&profile, 20, &cx).unwrap();
        let gm = -&series.coeffs[0];
        let field = PotentialField::new(series, &cx).unwrap();
        let r = MpReal::from_f64(2.0, &cx);
        let want = -&(&gm / &r);
        let tol = &cx.rel_tol() * &want.abs();
        for t in [0.0, 1.0, 2.5] {
            let sample = field.potential(&r, &MpReal::from_f64(t, &cx), 20);
            assert!((&sample.value - &want).abs() <= tol);
            assert!(!sample.below_convergence_radius);
        }
    }

    /// θ-promotion consistency: evaluating at colatitude θ equals
    /// evaluating the θ-weighted series on the axis, exactly.
    #[test]
    fn promotion_matches_weighted_axis_series() {
        let cx = ctx(60);
        let profile = ShapeProfile::cylinder(
            ExactScalar::from_ratio(1, 2),
            ExactScalar::parse("sqrt(3)").unwrap(),
        )
        .unwrap();
        let series = she_closed_form(&profile, 80, &cx).unwrap();
        let theta = &MpReal::pi(&cx) / &MpReal::from_i64(3, &cx);
        let r = MpReal::from_f64(1.2, &cx);

        let direct = potential_partial_sum(&series, &r, &theta, 80);
        let weighted = weight_colatitude(&series, &theta);
        let promoted = potential_partial_sum(&weighted, &r, &MpReal::zero_ctx(&cx), 80);
        assert!((&direct - &promoted).is_zero(), "promotion not exact");
    }

    /// Cross-validation against the rational continuation: at r = 1.5,
    /// θ = π/3 (outside the Brillouin sphere) the 200-term partial sum and
    /// the [100,100] approximant of the weighted series agree to 10⁻¹⁰.
    #[test]
    fn cylinder_partial_sum_matches_weighted_pade() {
        let cx = ctx(60);
        let profile = ShapeProfile::cylinder(
            ExactScalar::from_ratio(1, 2),
            ExactScalar::parse("sqrt(3)").unwrap(),
        )
        .unwrap();
        let series = she_closed_form(&profile, 200, &cx).unwrap();
        let theta = &MpReal::pi(&cx) / &MpReal::from_i64(3, &cx);
        let r = MpReal::from_f64(1.5, &cx);

        let direct = potential_partial_sum(&series, &r, &theta, 200);
        let weighted = weight_colatitude(&series, &theta);
        let pade = build_pade(&weighted, 100).unwrap();
        let continued = pade_eval_axis(&pade, &r).unwrap();
        let tol = &MpReal::from_f64(1e-10, &cx) * &direct.abs();
        assert!(
            (&direct - &continued).abs() <= tol,
            "partial sum and Padé disagree"
        );
    }

    /// The warning flag trips exactly when r drops below the convergence
    /// radius (≈ 0.8903 for the smoothed cylinder).
    #[test]
    fn below_radius_flag() {
        let cx = ctx(50);
        let profile = ShapeProfile::poly_profile(
            crate::poly::Poly::new(vec![
                crate::mp::Rational::new(1.into(), 1.into()),
                crate::mp::Rational::new(0.into(), 1.into()),
                crate::mp::Rational::new(0.into(), 1.into()),
                crate::mp::Rational::new(0.into(), 1.into()),
                crate::mp::Rational::new((-1).into(), 1.into()),
            ]),
            crate::mp::Rational::new((-1).into(), 1.into()),
            crate::mp::Rational::new(1.into(), 1.into()),
        )
        .unwrap();
        let series = crate::planet::she_exact_symbolic(&profile, 20, &cx).unwrap();
        let field = PotentialField::new(series, &cx).unwrap();
        let theta = MpReal::zero_ctx(&cx);
        assert!(
            field
                .potential(&MpReal::from_f64(0.85, &cx), &theta, 20)
                .below_convergence_radius
        );
        assert!(
            !field
                .potential(&MpReal::from_f64(2.0, &cx), &theta, 20)
                .below_convergence_radius
        );
    }
}
