//! Polynomial algebra over exact rationals and extended-precision scalars:
//! evaluation, derivatives, resultants/discriminants, simultaneous root
//! finding, and the classical orthogonal-polynomial recurrences.
//!
//! The discriminant path is fully exact: the Sylvester matrix of
//! `p(z) = (Z − z)² + s²(z)` and `∂p/∂z` has entries that are polynomials in
//! `Z` with rational coefficients, and its determinant is computed by
//! fraction-free (Bareiss) elimination — every division along the way is exact
//! in the polynomial ring, so no floating point touches the discriminant.
//!
//! Root finding is Aberth–Ehrlich simultaneous iteration: all roots are
//! refined together from perturbed-circle starting points, with synchronous
//! (Jacobi-style) updates so results do not depend on sweep scheduling.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::mp::{MpComplex, MpReal, PrecisionCtx, Rational};
use crate::Result;

/// Coefficient ring operations needed by [`Poly`].
pub trait Coeff: Clone {
    /// Additive identity.
    fn zero() -> Self;
    /// Exact zero test.
    fn is_zero(&self) -> bool;
    /// Sum.
    fn add_ref(&self, o: &Self) -> Self;
    /// Difference.
    fn sub_ref(&self, o: &Self) -> Self;
    /// Product.
    fn mul_ref(&self, o: &Self) -> Self;
    /// Negation.
    fn neg_ref(&self) -> Self;
    /// Product with a small natural number (derivative weights).
    fn mul_usize(&self, k: usize) -> Self;
}

/// Division support for coefficient fields (and exact rings where the caller
/// guarantees divisibility, as in Bareiss elimination).
pub trait CoeffDiv: Coeff {
    /// Quotient; must be exact for ring types.
    fn div_ref(&self, o: &Self) -> Self;
}

/// Scalars that can absorb rational constants at their own precision.
pub trait Scalar: CoeffDiv {
    /// The rational `q` converted "like `self`" (same working precision).
    fn rational_like(&self, q: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        <Rational as Zero>::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_usize(&self, k: usize) -> Self {
        self * Rational::from_integer(k.into())
    }
}

impl CoeffDiv for Rational {
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for Rational {
    fn rational_like(&self, q: &Rational) -> Self {
        q.clone()
    }
}

impl Coeff for MpReal {
    fn zero() -> Self {
        MpReal::zero()
    }
    fn is_zero(&self) -> bool {
        MpReal::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_usize(&self, k: usize) -> Self {
        self * MpReal::from_i64(k as i64, &PrecisionCtx::new(16)).widen(self.bits())
    }
}

impl CoeffDiv for MpReal {
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for MpReal {
    fn rational_like(&self, q: &Rational) -> Self {
        MpReal::from_rational_bits(q, self.bits())
    }
}

impl Coeff for MpComplex {
    fn zero() -> Self {
        MpComplex::zero()
    }
    fn is_zero(&self) -> bool {
        MpComplex::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_usize(&self, k: usize) -> Self {
        MpComplex::new(self.re.mul_usize(k), self.im.mul_usize(k))
    }
}

impl CoeffDiv for MpComplex {
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for MpComplex {
    fn rational_like(&self, q: &Rational) -> Self {
        MpComplex::from_real(self.re.rational_like(q))
    }
}

/// Dense univariate polynomial, coefficients from degree 0 upward, trailing
/// zeros trimmed (the zero polynomial stores no coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C: Coeff> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Poly<C> {
    /// Build from low-to-high coefficients; trailing zeros are trimmed.
    pub fn new(coeffs: Vec<C>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero_poly() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// Constant polynomial (zero constant gives the zero polynomial).
    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True iff this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    /// All stored coefficients, low to high.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Leading coefficient (`None` for the zero polynomial).
    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero_poly();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c.mul_usize(i + 1))
                .collect(),
        )
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add_ref(&o.coeff(k)));
        }
        Self::new(out)
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).sub_ref(&o.coeff(k)));
        }
        Self::new(out)
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero_poly();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Self::new(out)
    }

    /// Product with a scalar.
    pub fn scale(&self, s: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul_ref(s)).collect())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.neg_ref()).collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero_poly();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Map coefficients into another ring.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<C: CoeffDiv> Poly<C> {
    /// Long division, returning `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = vec![C::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let f = rem.leading().unwrap().div_ref(&lead);
            let k = rd - dd;
            // rem -= f·x^k·d
            let mut coeffs = rem.coeffs;
            for (j, c) in d.coeffs.iter().enumerate() {
                coeffs[k + j] = coeffs[k + j].sub_ref(&f.mul_ref(c));
            }
            // The leading term cancels by construction.
            coeffs.truncate(rd);
            rem = Self::new(coeffs);
            quo[k] = f;
        }
        (Self::new(quo), rem)
    }

    /// Exact quotient; panics if the division leaves a remainder (used only
    /// where divisibility is guaranteed, e.g. Bareiss pivots).
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division in exact context");
        q
    }
}

impl<C: Scalar> Poly<C> {
    /// Evaluate a rational-coefficient polynomial shape at a scalar point.
    pub fn eval_rational_poly(p: &Poly<Rational>, x: &C) -> C {
        let mut acc = C::zero();
        for c in p.coeffs().iter().rev() {
            acc = acc.mul_ref(x).add_ref(&x.rational_like(c));
        }
        acc
    }
}

/// Polynomial in `z` whose coefficients are polynomials in `Z` over the
/// rationals — the shape of `p(z) = (Z − z)² + s²(z)`.
pub type BiPoly = Poly<Poly<Rational>>;

impl Coeff for Poly<Rational> {
    fn zero() -> Self {
        Poly::zero_poly()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn mul_usize(&self, k: usize) -> Self {
        self.scale(&Rational::from_integer(k.into()))
    }
}

impl CoeffDiv for Poly<Rational> {
    fn div_ref(&self, o: &Self) -> Self {
        self.div_exact(o)
    }
}

/// Build `p(z) = (Z − z)² + s²(z)` as a polynomial in `z` with
/// `Poly<Rational>`-in-`Z` coefficients.
pub fn double_root_criterion_poly(s2: &Poly<Rational>) -> BiPoly {
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    // (Z − z)² = Z² − 2Z·z + z²
    let mut coeffs: Vec<Poly<Rational>> = vec![
        Poly::monomial(one.clone(), 2),       // z⁰: Z²
        Poly::monomial(-&two, 1),             // z¹: −2Z
        Poly::constant(one),                  // z²: 1
    ];
    for (k, c) in s2.coeffs().iter().enumerate() {
        if k >= coeffs.len() {
            coeffs.push(Poly::zero_poly());
        }
        coeffs[k] = coeffs[k].add(&Poly::constant(c.clone()));
    }
    Poly::new(coeffs)
}

/// Determinant by fraction-free (Bareiss) elimination; all divisions are
/// exact in the coefficient ring. Row swaps only (a nonzero pivot in the
/// current column always exists unless the determinant is zero).
fn bareiss_determinant<C: CoeffDiv>(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    if n == 0 {
        return C::zero();
    }
    let mut sign_flip = false;
    let mut prev: Option<C> = None;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return C::zero();
            };
            m.swap(k, swap);
            sign_flip = !sign_flip;
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t = pivot
                    .mul_ref(&m[i][j])
                    .sub_ref(&m[i][k].mul_ref(&m[k][j]));
                m[i][j] = match &prev {
                    Some(p) => t.div_ref(p),
                    None => t,
                };
            }
            m[i][k] = C::zero();
        }
        prev = Some(pivot);
    }
    let det = m[n - 1][n - 1].clone();
    if sign_flip {
        det.neg_ref()
    } else {
        det
    }
}

/// Resultant of two polynomials via the Sylvester matrix and Bareiss
/// elimination.
pub fn resultant<C: CoeffDiv>(p: &Poly<C>, q: &Poly<C>) -> C {
    let m = p.degree().expect("resultant of zero polynomial");
    let n = q.degree().expect("resultant of zero polynomial");
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // n rows of p's coefficients, then m rows of q's, each shifted right.
    for r in 0..n {
        let mut row = vec![C::zero(); size];
        for j in 0..=m {
            row[r + j] = p.coeff(m - j);
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![C::zero(); size];
        for j in 0..=n {
            row[r + j] = q.coeff(n - j);
        }
        rows.push(row);
    }
    bareiss_determinant(rows)
}

/// Discriminant of `p(z)` (a [`BiPoly`]) as an exact polynomial in `Z`:
/// `Res_z(p, ∂p/∂z) / lc_z(p)`, sign as produced by the Sylvester
/// determinant. The roots are the `Z` at which `p` has a double `z`-root.
pub fn discriminant_in_z(p: &BiPoly) -> Result<Poly<Rational>> {
    let deg = p.degree().unwrap_or(0);
    if deg < 2 {
        return Err(Error::ProfileTooSimple { degree: deg });
    }
    let dp = p.derivative();
    let res = resultant(p, &dp);
    // The z-leading coefficient of (Z−z)² + s²(z) never involves Z.
    let lc = p.leading().unwrap();
    debug_assert!(lc.degree() == Some(0), "z-leading coefficient must be constant in Z");
    let lc_c = lc.coeff(0);
    Ok(res.scale(&(Rational::from_integer(1.into()) / lc_c)))
}

/// Deterministic root sort: by real part, then imaginary part.
pub fn sort_roots(roots: &mut [MpComplex]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// All complex roots of `p`, with multiplicity, by Aberth–Ehrlich
/// simultaneous iteration.
///
/// Starting points sit on circles whose radii come from the Newton polygon
/// of the coefficients (one circle per magnitude class), perturbed by a
/// fixed-seed 10⁻³ relative jitter, so runs are exactly
/// reproducible. Each returned root satisfies
/// `|p(root)| ≤ rel_tol · scale(p, root)` where `scale` is the Horner
/// magnitude sum. Stagnation clusters (multiple roots, Froissart doublets)
/// are reported as-is, without deflation.
pub fn find_roots(p: &Poly<MpComplex>, ctx: &PrecisionCtx) -> Result<Vec<MpComplex>> {
    let Some(deg) = p.degree() else {
        return Ok(Vec::new());
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    // Make monic.
    let lead = p.leading().unwrap().clone();
    let mut coeffs: Vec<MpComplex> = p.coeffs().iter().map(|c| c / &lead).collect();
    // Exact zero roots: strip x | p.
    let mut roots = Vec::new();
    while coeffs.first().is_some_and(|c| c.is_zero()) && coeffs.len() > 1 {
        roots.push(MpComplex::zero());
        coeffs.remove(0);
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        sort_roots(&mut roots);
        return Ok(roots);
    }
    let poly = Poly::new(coeffs);
    if n == 1 {
        let r = (&poly.coeff(0) / &poly.coeff(1)).neg_ref();
        roots.push(r);
        sort_roots(&mut roots);
        return Ok(roots);
    }

    let iterates = aberth(&poly, n, ctx)?;
    roots.extend(iterates);
    sort_roots(&mut roots);
    Ok(roots)
}

/// Convenience wrapper for real-coefficient polynomials.
pub fn find_roots_real(p: &Poly<MpReal>, ctx: &PrecisionCtx) -> Result<Vec<MpComplex>> {
    find_roots(&p.map(|c| MpComplex::from_real(c.clone())), ctx)
}

const MAX_SWEEPS: usize = 200;

/// Upper convex hull of the points `(k, log2|c_k|)` (zero coefficients
/// skipped), left to right.  Consecutive hull vertices define the Newton
/// polygon segments whose slopes estimate root magnitudes.
fn upper_hull(coeff_log2: &[Option<f64>], n: usize) -> Vec<(usize, f64)> {
    let pts: Vec<(usize, f64)> = (0..=n)
        .filter_map(|k| coeff_log2[k].map(|l| (k, l)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(pts.len());
    for &(k, l) in &pts {
        while hull.len() >= 2 {
            let (k1, l1) = hull[hull.len() - 2];
            let (k2, l2) = hull[hull.len() - 1];
            let cross = (k2 - k1) as f64 * (l - l1) - (l2 - l1) * (k - k1) as f64;
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, l));
    }
    hull
}

fn aberth(poly: &Poly<MpComplex>, n: usize, ctx: &PrecisionCtx) -> Result<Vec<MpComplex>> {
    let bits = ctx.bits();
    let dpoly = poly.derivative();
    // log2 of coefficient moduli for starting radii and residual scales.
    let coeff_log2: Vec<Option<f64>> =
        poly.coeffs().iter().map(|c| c.log2_magnitude()).collect();

    // Starting guesses à la Bini: the upper convex hull of (k, log|c_k|)
    // partitions the roots into magnitude classes; each hull segment from
    // (k₁,l₁) to (k₂,l₂) contributes k₂−k₁ roots of modulus roughly
    // (|c_{k₁}|/|c_{k₂}|)^{1/(k₂−k₁)}.  Starting every iterate at its class
    // radius avoids the slow one-root-per-sweep peeling that a single
    // enclosing circle suffers when magnitudes span decades.
    let hull = upper_hull(&coeff_log2, n);
    let mut radius = f64::MIN; // largest class radius; reused as nudge scale
    let mut ring: Vec<(f64, usize)> = Vec::new(); // (log2 radius, count)
    for pair in hull.windows(2) {
        let (k1, l1) = pair[0];
        let (k2, l2) = pair[1];
        let log2_r = ((l1 - l2) / (k2 - k1) as f64).clamp(-500.0, 500.0);
        ring.push((log2_r, k2 - k1));
        radius = radius.max(2f64.powf(log2_r));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6176_6970_6164);
    let mut z: Vec<MpComplex> = Vec::with_capacity(n);
    for (seg, &(log2_r, count)) in ring.iter().enumerate() {
        let r = 2f64.powf(log2_r);
        for j in 0..count {
            let jit_r: f64 = 1.0 + 1e-3 * (rng.gen::<f64>() - 0.5);
            let jit_a: f64 = 1e-3 * (rng.gen::<f64>() - 0.5);
            let angle = 2.0 * std::f64::consts::PI * (j as f64 + 0.37) / count as f64
                + 0.61 * seg as f64
                + jit_a;
            z.push(MpComplex::new(
                MpReal::from_f64(r * jit_r * angle.cos(), ctx),
                MpReal::from_f64(r * jit_r * angle.sin(), ctx),
            ));
        }
    }
    debug_assert_eq!(z.len(), n);
    while z.len() < n {
        // Unreachable for well-formed input (c₀ ≠ 0 after zero-root
        // stripping); keep the iterate count honest regardless.
        let jit: f64 = 1.0 + 1e-3 * (rng.gen::<f64>() - 0.5);
        z.push(MpComplex::new(
            MpReal::from_f64(radius * jit, ctx),
            MpReal::from_f64(radius * jit * 0.5, ctx),
        ));
    }

    let log2_rel_tol =
        (ctx.guard() as f64 - ctx.digits() as f64) * std::f64::consts::LOG2_10;
    let log2_stall = -(bits as f64) + 6.0;
    let mut converged = vec![false; n];
    let mut last_worst = f64::MAX;

    for sweep in 0..MAX_SWEEPS {
        let snapshot = &z;
        let conv = &converged;
        let updates: Vec<(usize, Option<MpComplex>, bool, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let zi = &snapshot[i];
                let (pv, scale_log2) = horner_with_scale(poly, &coeff_log2, zi);
                let resid_log2 = pv
                    .log2_magnitude()
                    .map(|l| l - scale_log2)
                    .unwrap_or(f64::MIN);
                let ok = resid_log2 <= log2_rel_tol;
                if conv[i] {
                    return (i, None, ok, resid_log2);
                }
                let dv = dpoly.eval(zi);
                if dv.is_zero() {
                    // Sitting on a critical point: nudge deterministically.
                    let eps = MpReal::from_f64(1e-3 * radius.max(1e-300), ctx);
                    return (
                        i,
                        Some(MpComplex::new(&zi.re + &eps, zi.im.clone())),
                        false,
                        resid_log2,
                    );
                }
                let newton = &pv / &dv;
                let mut s = MpComplex::zero();
                for (j, zj) in snapshot.iter().enumerate() {
                    if j != i {
                        s = &s + &(zi - zj).recip();
                    }
                }
                let one = MpComplex::from_real(MpReal::from_i64(1, ctx));
                let denom = &one - &(&newton * &s);
                let step = if denom.is_zero() { newton.clone() } else { &newton / &denom };
                let moved = zi - &step;
                // Relative step size for stagnation detection.
                let step_log2 = step
                    .log2_magnitude()
                    .and_then(|s| moved.log2_magnitude().map(|m| s - m))
                    .unwrap_or(f64::MIN);
                (i, Some(moved), ok, step_log2.max(resid_log2))
            })
            .collect();

        let mut all_ok = true;
        let mut worst = f64::MIN;
        for (i, newz, ok, metric) in updates {
            if ok {
                converged[i] = true;
            } else {
                all_ok = false;
                if let Some(nz) = newz {
                    z[i] = nz;
                }
            }
            worst = worst.max(metric);
        }
        if std::env::var_os("GRAVIPADE_ABERTH_TRACE").is_some() {
            eprintln!(
                "aberth sweep {sweep}: worst 10^{:.1}, converged {}/{n}",
                worst * std::f64::consts::LOG10_2,
                converged.iter().filter(|c| **c).count(),
            );
        }
        if all_ok {
            return Ok(z);
        }
        // Stagnation: every step is at rounding level, or nothing improved
        // across two consecutive sweeps at sub-tolerance scale.
        if worst <= log2_stall {
            break;
        }
        if sweep > 20 && worst >= last_worst && worst <= log2_rel_tol + 8.0 {
            break;
        }
        last_worst = worst;
    }

    // Final residual audit: accept stagnated clusters only if every iterate
    // meets the residual contract.
    let mut worst_resid = f64::MIN;
    let mut all_ok = true;
    for zi in z.iter() {
        let (pv, scale_log2) = horner_with_scale(poly, &coeff_log2, zi);
        let r = pv
            .log2_magnitude()
            .map(|l| l - scale_log2)
            .unwrap_or(f64::MIN);
        worst_resid = worst_resid.max(r);
        if r > log2_rel_tol {
            all_ok = false;
        }
    }
    if all_ok {
        return Ok(z);
    }
    Err(Error::RootsDidNotConverge {
        sweeps: MAX_SWEEPS,
        worst_residual: format!("10^{:.1}", worst_resid * std::f64::consts::LOG10_2),
        degree: poly.degree().unwrap_or(0),
    })
}

/// Horner evaluation together with the log2 of the magnitude-sum scale
/// `Σ |c_k|·|z|^k` (bounded within a factor of degree+1, in log space).
fn horner_with_scale(
    poly: &Poly<MpComplex>,
    coeff_log2: &[Option<f64>],
    z: &MpComplex,
) -> (MpComplex, f64) {
    let v = poly.eval(z);
    let zlog = z.log2_magnitude().unwrap_or(f64::MIN / 4.0);
    let n = coeff_log2.len();
    let mut scale = f64::MIN;
    for (k, cl) in coeff_log2.iter().enumerate() {
        if let Some(l) = cl {
            scale = scale.max(l + zlog * k as f64);
        }
    }
    (v, scale + (n as f64).log2())
}

/// Gegenbauer (ultraspherical) ladder `C_0^{(ν)}(x) … C_kmax^{(ν)}(x)` via the
/// three-term recurrence `k·C_k = 2(k+ν−1)·x·C_{k−1} − (k+2ν−2)·C_{k−2}`.
pub fn gegenbauer_ladder<T: Scalar>(kmax: usize, nu: &Rational, x: &T) -> Vec<T> {
    let one = x.rational_like(&Rational::from_integer(1.into()));
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(one);
    if kmax == 0 {
        return out;
    }
    // C₁ = 2νx
    let two_nu = x.rational_like(&(nu * Rational::from_integer(2.into())));
    out.push(two_nu.mul_ref(x));
    for k in 2..=kmax {
        let kq = Rational::from_integer(k.into());
        let a = x.rational_like(&((&kq + nu - Rational::from_integer(1.into())) * Rational::from_integer(2.into())));
        let b = x.rational_like(&(&kq + nu * Rational::from_integer(2.into()) - Rational::from_integer(2.into())));
        let kk = x.rational_like(&kq);
        let t = a.mul_ref(x).mul_ref(&out[k - 1]).sub_ref(&b.mul_ref(&out[k - 2]));
        out.push(t.div_ref(&kk));
    }
    out
}

/// Single Gegenbauer value `C_k^{(ν)}(x)`.
pub fn gegenbauer<T: Scalar>(k: usize, nu: &Rational, x: &T) -> T {
    gegenbauer_ladder(k, nu, x).pop().unwrap()
}

/// Gegenbauer polynomials `C_0^{(ν)} … C_kmax^{(ν)}` with exact rational
/// coefficients (the expansion kernels of the coefficient integrals).
pub fn gegenbauer_poly_ladder(kmax: usize, nu: &Rational) -> Vec<Poly<Rational>> {
    let x = Poly::monomial(Rational::from_integer(1.into()), 1);
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(Poly::constant(Rational::from_integer(1.into())));
    if kmax == 0 {
        return out;
    }
    out.push(x.scale(&(nu * Rational::from_integer(2.into()))));
    for m in 2..=kmax {
        let mq = Rational::from_integer(m.into());
        let a = (&mq + nu - Rational::from_integer(1.into())) * Rational::from_integer(2.into());
        let b = &mq + nu * Rational::from_integer(2.into()) - Rational::from_integer(2.into());
        let next = x
            .mul(&out[m - 1])
            .scale(&(a / &mq))
            .sub(&out[m - 2].scale(&(b / &mq)));
        out.push(next);
    }
    out
}

/// Gegenbauer polynomial `C_k^{(ν)}` with exact rational coefficients.
pub fn gegenbauer_poly(k: usize, nu: &Rational) -> Poly<Rational> {
    gegenbauer_poly_ladder(k, nu).pop().unwrap()
}

/// Legendre ladder `P_0(x) … P_nmax(x)` via the Bonnet recurrence.
pub fn legendre_ladder(nmax: usize, x: &MpReal) -> Vec<MpReal> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(MpReal::from_i64(1, &PrecisionCtx::new(16)).widen(x.bits()));
    if nmax == 0 {
        return out;
    }
    out.push(x.clone());
    for n in 1..nmax {
        let a = x.rational_like(&Rational::new((2 * n as i64 + 1).into(), (n as i64 + 1).into()));
        let b = x.rational_like(&Rational::new((n as i64).into(), (n as i64 + 1).into()));
        let next = (a * (x * &out[n])) - (b * &out[n - 1]);
        out.push(next);
    }
    out
}

/// Legendre polynomial value `P_n(x)`.
pub fn legendre(n: usize, x: &MpReal) -> MpReal {
    legendre_ladder(n, x).pop().unwrap()
}

/// Gauss–Legendre nodes and weights on [−1, 1] at context precision.
///
/// Nodes are the roots of `P_n`, refined by Newton iteration from the
/// classical cosine estimates; weights are `2/((1−x²)·P'_n(x)²)`. Exact for
/// polynomial integrands of degree ≤ 2n−1.
pub fn gauss_legendre(n: usize, ctx: &PrecisionCtx) -> Vec<(MpReal, MpReal)> {
    assert!(n >= 1);
    let bits = ctx.bits();
    let one = MpReal::from_i64(1, ctx);
    let two = MpReal::from_i64(2, ctx);
    (0..n)
        .into_par_iter()
        .map(|i| {
            // Tricomi-style initial guess, accurate to ~1e-3.
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = MpReal::from_f64(guess, ctx);
            let nq = MpReal::from_i64(n as i64, ctx);
            for _ in 0..60 {
                let ladder = legendre_ladder(n, &x);
                let p = &ladder[n];
                let pm1 = &ladder[n - 1];
                // P'_n = n(x·P_n − P_{n−1})/(x² − 1)
                let x2m1 = &(&x * &x) - &one;
                let dp = &(&nq * &(&(&x * p) - pm1)) / &x2m1;
                let step = p / &dp;
                x = &x - &step;
                let done = match (step.log2_magnitude(), x.log2_magnitude()) {
                    (None, _) => true,
                    (Some(s), Some(m)) => s - m <= -(bits as f64) + 4.0,
                    (Some(s), None) => s <= -(bits as f64) + 4.0,
                };
                if done {
                    break;
                }
            }
            // Final derivative at the converged node for the weight.
            let ladder = legendre_ladder(n, &x);
            let x2m1 = &(&x * &x) - &one;
            let dp = &(&nq * &(&(&x * &ladder[n]) - &ladder[n - 1])) / &x2m1;
            let w = &two / &(&(-&x2m1) * &(&dp * &dp));
            (x, w)
        })
        .collect()
}

/// Chebyshev polynomial of the first kind, exact coefficients (building block
/// for the roughened synthetic planets).
pub fn chebyshev_poly(k: usize) -> Poly<Rational> {
    let one = Rational::from_integer(1.into());
    let x = Poly::monomial(one.clone(), 1);
    let mut t_prev = Poly::constant(one);
    if k == 0 {
        return t_prev;
    }
    let mut t = x.clone();
    for _ in 2..=k {
        let next = x.mul(&t).mul_usize(2).sub(&t_prev);
        t_prev = t;
        t = next;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn rp(coeffs: &[i64]) -> Poly<Rational> {
        Poly::new(coeffs.iter().map(|&c| qi(c)).collect())
    }

    #[test]
    fn eval_horner_basic() {
        let c = PrecisionCtx::new(30);
        let p = Poly::new(vec![
            MpReal::from_i64(1, &c),
            MpReal::zero_ctx(&c),
            MpReal::from_i64(1, &c),
        ]);
        let v = p.eval(&MpReal::from_i64(2, &c));
        assert_eq!(v, MpReal::from_i64(5, &c));
        let z: Poly<MpReal> = Poly::zero_poly();
        assert!(z.eval(&MpReal::from_i64(7, &c)).is_zero());
    }

    #[test]
    fn derivative_rules() {
        let p = rp(&[0, 0, 0, 1]); // z³
        assert_eq!(p.derivative(), rp(&[0, 0, 3]));
        assert_eq!(rp(&[5]).derivative(), Poly::zero_poly());
    }

    /// ∂/∂z[(Z−z)² + 1 − z⁴] = −2(Z−z) − 4z³, checked coefficientwise.
    #[test]
    fn bipoly_derivative_matches_hand_expansion() {
        let s2 = rp(&[1, 0, 0, 0, -1]); // 1 − z⁴
        let p = double_root_criterion_poly(&s2);
        let dp = p.derivative();
        // Expected: z⁰ → −2Z, z¹ → 2, z³ → −4.
        assert_eq!(dp.coeff(0), Poly::monomial(qi(-2), 1));
        assert_eq!(dp.coeff(1), Poly::constant(qi(2)));
        assert_eq!(dp.coeff(2), Poly::zero_poly());
        assert_eq!(dp.coeff(3), Poly::constant(qi(-4)));
    }

    #[test]
    fn poly_long_division_exact() {
        // (z² − 1) = (z − 1)(z + 1)
        let p = rp(&[-1, 0, 1]);
        let d = rp(&[-1, 1]);
        assert_eq!(p.div_exact(&d), rp(&[1, 1]));
    }

    /// The three printed discriminants, exact integer coefficients.
    #[test]
    fn discriminant_reproduces_quartic_profiles() {
        // s² = 1 − z⁴ → −16(16Z⁶ + 47Z⁴ + 28Z² + 25)
        let d = discriminant_in_z(&double_root_criterion_poly(&rp(&[1, 0, 0, 0, -1]))).unwrap();
        assert_eq!(
            d,
            rp(&[-400, 0, -448, 0, -752, 0, -256])
        );
        // s² = 4 + 3z² − z⁴ → −16(16Z⁶ + 203Z⁴ + 1408Z² + 4096)
        let d = discriminant_in_z(&double_root_criterion_poly(&rp(&[4, 0, 3, 0, -1]))).unwrap();
        assert_eq!(
            d,
            rp(&[-65536, 0, -22528, 0, -3248, 0, -256])
        );
        // s² = 25 + 24z² − z⁴ → −16(16Z⁶ + 5327Z⁴ + 632500Z² + 13140625)
        let d = discriminant_in_z(&double_root_criterion_poly(&rp(&[25, 0, 24, 0, -1]))).unwrap();
        assert_eq!(
            d,
            rp(&[-210250000, 0, -10120000, 0, -85232, 0, -256])
        );
    }

    /// Spheroid a=3/2, b=1: discriminant proportional to Z² + (a² − b²).
    #[test]
    fn discriminant_spheroid_is_shifted_square() {
        // s² = a²(1 − z²/b²) = 9/4 − 9/4·z²
        let s2 = Poly::new(vec![q(9, 4), qi(0), q(-9, 4)]);
        let d = discriminant_in_z(&double_root_criterion_poly(&s2)).unwrap();
        // Expect c·(Z² + 5/4) for some nonzero rational c.
        assert_eq!(d.degree(), Some(2));
        let c = d.coeff(2);
        assert!(!Coeff::is_zero(&c));
        assert_eq!(d.coeff(1), qi(0));
        assert_eq!(d.coeff(0) / &c, q(5, 4));
    }

    #[test]
    fn discriminant_rejects_linear_p() {
        // Sphere: s² = 1 − z² makes p(z) linear in z.
        let err = discriminant_in_z(&double_root_criterion_poly(&rp(&[1, 0, -1]))).unwrap_err();
        assert!(matches!(err, Error::ProfileTooSimple { degree: 1 }));
    }

    #[test]
    fn find_roots_of_z2_plus_1() {
        let ctx = PrecisionCtx::new(40);
        let p = Poly::new(vec![
            MpComplex::from_real(MpReal::from_i64(1, &ctx)),
            MpComplex::zero(),
            MpComplex::from_real(MpReal::from_i64(1, &ctx)),
        ]);
        let roots = find_roots(&p, &ctx).unwrap();
        assert_eq!(roots.len(), 2);
        // Residual contract ⇒ root error within a small multiple of rel_tol.
        let tol = &ctx.rel_tol() * &MpReal::from_i64(100, &ctx);
        for sign in [-1i64, 1] {
            let target = MpComplex::new(MpReal::zero_ctx(&ctx), MpReal::from_i64(sign, &ctx));
            let best = roots
                .iter()
                .map(|r| (r - &target).abs())
                .min_by(|a, b| a.partial_cmp(b).unwrap())
                .unwrap();
            assert!(best <= tol, "no root near {sign}i");
        }
    }

    fn to_mp(p: &Poly<Rational>, ctx: &PrecisionCtx) -> Poly<MpComplex> {
        p.map(|c| MpComplex::from_real(MpReal::from_rational(c, ctx)))
    }

    /// Printed values: roots of 16Z⁶+47Z⁴+28Z²+25, times i, to 4 digits.
    #[test]
    fn sextic_roots_match_printed_values() {
        let ctx = PrecisionCtx::new(60);
        let p = to_mp(&rp(&[25, 0, 28, 0, 47, 0, 16]), &ctx);
        let roots = find_roots(&p, &ctx).unwrap();
        assert_eq!(roots.len(), 6);
        let rotated: Vec<(f64, f64)> = roots
            .iter()
            .map(|r| {
                let m = r.mul_i();
                (m.re.to_f64(), m.im.to_f64())
            })
            .collect();
        let expect = [
            (1.577, 0.0),
            (-1.577, 0.0),
            (0.7135, 0.5325),
            (0.7135, -0.5325),
            (-0.7135, 0.5325),
            (-0.7135, -0.5325),
        ];
        for (ex, ey) in expect {
            let best = rotated
                .iter()
                .map(|(x, y)| (x - ex).abs() + (y - ey).abs())
                .fold(f64::MAX, f64::min);
            assert!(best < 1e-3, "no root near ({ex}, {ey}): best {best}");
        }
    }

    /// Printed values: second peanut, 6 significant digits.
    #[test]
    fn peanut_roots_match_printed_values() {
        let ctx = PrecisionCtx::new(60);
        let p = to_mp(&rp(&[13140625, 0, 632500, 0, 5327, 0, 16]), &ctx);
        let roots = find_roots(&p, &ctx).unwrap();
        let expect = [
            (5.10293, 0.0),
            (-5.10293, 0.0),
            (12.8655, 3.47457),
            (12.8655, -3.47457),
            (-12.8655, 3.47457),
            (-12.8655, -3.47457),
        ];
        for (ex, ey) in expect {
            let best = roots
                .iter()
                .map(|r| {
                    let m = r.mul_i();
                    ((m.re.to_f64() - ex).powi(2) + (m.im.to_f64() - ey).powi(2)).sqrt()
                })
                .fold(f64::MAX, f64::min);
            // 6 significant digits on magnitudes ~5–13.
            assert!(best < 5e-4 * ex.abs().max(1.0), "no root near ({ex}, {ey})");
        }
    }

    #[test]
    fn value_near_printed_root_is_small() {
        let ctx = PrecisionCtx::new(40);
        let p = rp(&[25, 0, 28, 0, 47, 0, 16]);
        let z = MpComplex::new(
            MpReal::zero_ctx(&ctx),
            MpReal::from_f64(1.577, &ctx),
        );
        // p(i·1.577): the printed root is i·Z₀ = 1.577, i.e. Z₀ = −1.577i.
        // |p′| ≈ 290 near the root, and 1.577 carries 4 digits, so |p| ≲ 0.15.
        let v = Poly::<MpComplex>::eval_rational_poly(&p, &z);
        assert!(v.abs().to_f64() < 0.5);
    }

    #[test]
    fn repeated_roots_are_reported_with_multiplicity() {
        let ctx = PrecisionCtx::new(40);
        // (z − 1)²(z + 2): double root at 1.
        let p = to_mp(&rp(&[2, -3, 0, 1]), &ctx);
        let roots = find_roots(&p, &ctx).unwrap();
        assert_eq!(roots.len(), 3);
        let near_one = roots
            .iter()
            .filter(|r| (r.re.to_f64() - 1.0).abs() < 1e-10 && r.im.to_f64().abs() < 1e-10)
            .count();
        assert_eq!(near_one, 2);
    }

    #[test]
    fn gegenbauer_base_cases() {
        let ctx = PrecisionCtx::new(30);
        let x = MpReal::from_f64(0.3, &ctx);
        let nu32 = q(3, 2);
        let l = gegenbauer_ladder(1, &nu32, &x);
        assert_eq!(l[0], MpReal::from_i64(1, &ctx));
        assert_eq!(l[1], &x * &MpReal::from_i64(3, &ctx));
        // Any ν, rational x path.
        let any_nu = q(-1, 2);
        assert_eq!(gegenbauer(0, &any_nu, &q(7, 3)), qi(1));
    }

    /// Oracle: √(1−2xt+t²) = Σ C_k^{(−1/2)}(x) t^k — expand the generating
    /// function with exact binomial series and compare the t⁴ coefficient.
    #[test]
    fn gegenbauer_matches_generating_function() {
        let x = q(2, 7);
        let nu = q(-1, 2);
        // (1+u)^{1/2} = Σ binom(1/2, j) u^j with u = t² − 2xt.
        let u = Poly::new(vec![qi(0), -(&x * qi(2)), qi(1)]);
        let mut series = Poly::constant(qi(1));
        let mut binom = qi(1);
        let mut upow = Poly::constant(qi(1));
        for j in 1..=4usize {
            // binom(1/2, j) = binom(1/2, j−1)·(1/2 − (j−1))/j
            binom = binom * (q(1, 2) - qi(j as i64 - 1)) / qi(j as i64);
            upow = upow.mul(&u);
            series = series.add(&upow.scale(&binom));
        }
        let expect_c4 = series.coeff(4);
        assert_eq!(gegenbauer(4, &nu, &x), expect_c4);
        // And the polynomial table agrees with point evaluation.
        let table = gegenbauer_poly(4, &nu);
        assert_eq!(table.eval(&x), expect_c4);
    }

    #[test]
    fn legendre_values() {
        let ctx = PrecisionCtx::new(40);
        let one = MpReal::from_i64(1, &ctx);
        let ladder = legendre_ladder(50, &one);
        for (n, v) in ladder.iter().enumerate() {
            // The recurrence factors are non-dyadic, so allow rounding noise.
            assert!((v - &one).abs() <= ctx.rel_tol(), "P_{n}(1) must be 1");
        }
        let zero = MpReal::zero_ctx(&ctx);
        let p2 = legendre(2, &zero);
        assert_eq!(p2, MpReal::from_f64(-0.5, &ctx));
    }

    /// Cross-recurrence oracle: C_n^{(1/2)} = P_n.
    #[test]
    fn legendre_is_gegenbauer_half() {
        let ctx = PrecisionCtx::new(50);
        let half = q(1, 2);
        let tol = ctx.rel_tol();
        for xv in [-0.9, -0.3, 0.4, 0.8] {
            let x = MpReal::from_f64(xv, &ctx);
            let g = gegenbauer_ladder(30, &half, &x);
            let l = legendre_ladder(30, &x);
            for n in 0..=30 {
                assert!((&g[n] - &l[n]).abs() <= tol, "n={n} x={xv}");
            }
        }
    }

    #[test]
    fn chebyshev_table() {
        // T₄ = 8x⁴ − 8x² + 1
        assert_eq!(chebyshev_poly(4), rp(&[1, 0, -8, 0, 8]));
    }

    /// Exactness on degree ≤ 2n−1: ∫ x³⁸ dx over [−1,1] = 2/39 with n = 20.
    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let ctx = PrecisionCtx::new(50);
        let nodes = gauss_legendre(20, &ctx);
        let mut total = MpReal::zero_ctx(&ctx);
        let mut weight_sum = MpReal::zero_ctx(&ctx);
        for (x, w) in &nodes {
            total = &total + &(w * &x.powi(38));
            weight_sum = &weight_sum + w;
        }
        let expect = MpReal::from_rational(&q(2, 39), &ctx);
        assert!((&total - &expect).abs() <= &ctx.rel_tol() * &expect.abs());
        let two = MpReal::from_i64(2, &ctx);
        assert!((&weight_sum - &two).abs() <= ctx.rel_tol());
    }

    /// Even input polynomial → roots closed under negation.
    #[test]
    fn even_poly_roots_close_under_negation() {
        let ctx = PrecisionCtx::new(40);
        let p = to_mp(&rp(&[3, 0, -7, 0, 1, 0, 2]), &ctx);
        let roots = find_roots(&p, &ctx).unwrap();
        for r in &roots {
            let neg = -r;
            let best = roots
                .iter()
                .map(|s| (s - &neg).abs().to_f64())
                .fold(f64::MAX, f64::min);
            assert!(best < 1e-25, "negation partner missing for {r}");
        }
    }
}
