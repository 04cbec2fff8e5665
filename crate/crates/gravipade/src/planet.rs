//! Axisymmetric constant-density planet models and their exterior potential
//! expansions.
//!
//! A body is described by the squared half-width `s²(z)` of its surface of
//! revolution over `z ∈ [z_min, z_max]`. On the positive z-axis the exterior
//! potential expands as `Φ(Z) = Σ A_n/Z^{n+1}`, and the coefficients have the
//! integral representation
//!
//! ```text
//! A_n = −2πGρ ∫ C_{n+2}^{(−1/2)}(z/√u) · u^{(n+2)/2} dz,   u = z² + s²(z),
//! ```
//!
//! which this module evaluates by three independent routes: closed forms for
//! the spheroid and cylinder, exact rational integration for polynomial
//! profiles, and Gauss–Legendre quadrature for everything. The agreement of
//! the routes is the correctness backbone of the whole crate.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::mp::{
    parse_rational, rational_to_string, MpComplex, MpReal, PrecisionCtx, Rational,
};
use crate::poly::{
    find_roots_real, gauss_legendre, gegenbauer_ladder, gegenbauer_poly_ladder, Poly,
};
use crate::Result;

/// Exact scalar for shape dimensions: a rational number or `√k` for a
/// non-negative integer `k` (the only irrational the planet format accepts).
#[derive(Clone, Debug, PartialEq)]
pub enum ExactScalar {
    /// An exact fraction.
    Rational(Rational),
    /// `√k` for integer `k ≥ 0`.
    Sqrt(u64),
}

impl ExactScalar {
    /// Parse `"a/b"`, integer/decimal text, or the literal token `"sqrt(k)"`.
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let k: u64 = inner.trim().parse().ok()?;
            return Some(Self::Sqrt(k));
        }
        parse_rational(t).map(Self::Rational)
    }

    /// Integer shorthand.
    pub fn from_int(v: i64) -> Self {
        Self::Rational(Rational::from_integer(BigInt::from(v)))
    }

    /// Rational shorthand.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::Rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The exact square (always rational).
    pub fn squared(&self) -> Rational {
        match self {
            Self::Rational(q) => q * q,
            Self::Sqrt(k) => Rational::from_integer(BigInt::from(*k)),
        }
    }

    /// Value at context precision.
    pub fn to_mp(&self, ctx: &PrecisionCtx) -> MpReal {
        match self {
            Self::Rational(q) => MpReal::from_rational(q, ctx),
            Self::Sqrt(k) => MpReal::from_i64(*k as i64, ctx).sqrt(),
        }
    }

    /// True iff the value is strictly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            Self::Rational(q) => q.is_positive(),
            Self::Sqrt(k) => *k > 0,
        }
    }

    /// The format's text form (`"a/b"`, `"a"`, or `"sqrt(k)"`).
    pub fn to_text(&self) -> String {
        match self {
            Self::Rational(q) => rational_to_string(q),
            Self::Sqrt(k) => format!("sqrt({k})"),
        }
    }
}

/// Surface geometry of a body of revolution.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeKind {
    /// Ellipse of revolution with equatorial semi-axis `a` and polar
    /// semi-axis `b`: `s²(z) = a²(1 − z²/b²)` on `[−b, b]`.
    Spheroid {
        /// Equatorial semi-axis.
        a: ExactScalar,
        /// Polar semi-axis.
        b: ExactScalar,
    },
    /// Circular cylinder of radius `a` and length `L`: `s²(z) = a²` on
    /// `[−L/2, L/2]`.
    Cylinder {
        /// Radius.
        a: ExactScalar,
        /// Length.
        l: ExactScalar,
    },
    /// Arbitrary polynomial `s²(z)` with exact rational coefficients.
    PolyProfile {
        /// Squared half-width, low-to-high coefficients.
        s2: Poly<Rational>,
        /// Lower support bound.
        z_min: Rational,
        /// Upper support bound.
        z_max: Rational,
    },
}

/// A constant-density axisymmetric planet.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeProfile {
    /// Surface geometry.
    pub kind: ShapeKind,
    /// Mass density (default 1).
    pub rho: ExactScalar,
    /// Gravitational constant (default 1).
    pub g: ExactScalar,
}

/// Number of interior sample points for the polynomial positivity check.
const POSITIVITY_SAMPLES: u32 = 10_000;

impl ShapeProfile {
    fn with_kind(kind: ShapeKind) -> Self {
        Self {
            kind,
            rho: ExactScalar::from_int(1),
            g: ExactScalar::from_int(1),
        }
    }

    /// Spheroid with semi-axes `a` (equatorial) and `b` (polar).
    pub fn spheroid(a: ExactScalar, b: ExactScalar) -> Result<Self> {
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::NegativeProfile {
                z: "semi-axis".into(),
                value: "non-positive".into(),
            });
        }
        Ok(Self::with_kind(ShapeKind::Spheroid { a, b }))
    }

    /// Cylinder with radius `a` and length `l`.
    pub fn cylinder(a: ExactScalar, l: ExactScalar) -> Result<Self> {
        if !a.is_positive() || !l.is_positive() {
            return Err(Error::NegativeProfile {
                z: "dimension".into(),
                value: "non-positive".into(),
            });
        }
        Ok(Self::with_kind(ShapeKind::Cylinder { a, l }))
    }

    /// Polynomial profile; checks `s² ≥ 0` on a dense grid plus endpoints.
    pub fn poly_profile(s2: Poly<Rational>, z_min: Rational, z_max: Rational) -> Result<Self> {
        if z_min >= z_max {
            return Err(Error::NegativeProfile {
                z: "[z_min, z_max]".into(),
                value: "empty interval".into(),
            });
        }
        let span = &z_max - &z_min;
        for i in 0..=POSITIVITY_SAMPLES {
            let z = &z_min + &span * Rational::new(i.into(), POSITIVITY_SAMPLES.into());
            let v = s2.eval(&z);
            if v.is_negative() {
                return Err(Error::NegativeProfile {
                    z: rational_to_string(&z),
                    value: rational_to_string(&v),
                });
            }
        }
        Ok(Self::with_kind(ShapeKind::PolyProfile { s2, z_min, z_max }))
    }

    /// Same shape with a different density.
    pub fn with_density(mut self, rho: ExactScalar) -> Self {
        self.rho = rho;
        self
    }

    /// Same shape with a different gravitational constant.
    pub fn with_g(mut self, g: ExactScalar) -> Self {
        self.g = g;
        self
    }

    /// Kind name for diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            ShapeKind::Spheroid { .. } => "spheroid",
            ShapeKind::Cylinder { .. } => "cylinder",
            ShapeKind::PolyProfile { .. } => "polyprofile",
        }
    }

    /// `s²(z)` as an exact rational polynomial (possible for every kind:
    /// squared dimensions are rational even when the dimensions are `√k`).
    pub fn s2_poly(&self) -> Poly<Rational> {
        match &self.kind {
            ShapeKind::Spheroid { a, b } => {
                let a2 = a.squared();
                let ratio = &a2 / b.squared();
                Poly::new(vec![a2, Rational::zero(), -ratio])
            }
            ShapeKind::Cylinder { a, .. } => Poly::constant(a.squared()),
            ShapeKind::PolyProfile { s2, .. } => s2.clone(),
        }
    }

    /// Support bounds as exact rationals, when they are rational.
    pub fn z_span_rational(&self) -> Option<(Rational, Rational)> {
        match &self.kind {
            ShapeKind::Spheroid {
                b: ExactScalar::Rational(b),
                ..
            } => Some((-b, b.clone())),
            ShapeKind::Cylinder {
                l: ExactScalar::Rational(l),
                ..
            } => {
                let half = l / Rational::from_integer(2.into());
                Some((-&half, half))
            }
            ShapeKind::PolyProfile { z_min, z_max, .. } => Some((z_min.clone(), z_max.clone())),
            _ => None,
        }
    }

    /// Support bounds at context precision.
    pub fn z_span(&self, ctx: &PrecisionCtx) -> (MpReal, MpReal) {
        match &self.kind {
            ShapeKind::Spheroid { b, .. } => {
                let bv = b.to_mp(ctx);
                (-&bv, bv)
            }
            ShapeKind::Cylinder { l, .. } => {
                let half = &l.to_mp(ctx) / &MpReal::from_i64(2, ctx);
                (-&half, half)
            }
            ShapeKind::PolyProfile { z_min, z_max, .. } => (
                MpReal::from_rational(z_min, ctx),
                MpReal::from_rational(z_max, ctx),
            ),
        }
    }

    /// `s²(z)` at context precision.
    pub fn s2_at(&self, z: &MpReal, ctx: &PrecisionCtx) -> MpReal {
        let _ = ctx;
        Poly::<MpReal>::eval_rational_poly(&self.s2_poly(), z)
    }

    /// `G·ρ` at context precision.
    pub fn g_rho(&self, ctx: &PrecisionCtx) -> MpReal {
        &self.g.to_mp(ctx) * &self.rho.to_mp(ctx)
    }

    /// Parse a planet-definition JSON document.
    pub fn from_json_str(text: &str, path: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::PlanetFile {
            path: path.into(),
            detail: format!("invalid JSON: {e}"),
        })?;
        let obj = doc.as_object().ok_or_else(|| Error::PlanetFile {
            path: path.into(),
            detail: "top level must be an object".into(),
        })?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::PlanetFile {
                path: path.into(),
                detail: "missing string field `kind`".into(),
            })?;
        let mut profile = match kind {
            "spheroid" => Self::spheroid(
                field_scalar(obj, "a", path)?,
                field_scalar(obj, "b", path)?,
            )?,
            "cylinder" => Self::cylinder(
                field_scalar(obj, "a", path)?,
                field_scalar(obj, "L", path)?,
            )?,
            "polyprofile" => {
                let arr = obj
                    .get("s2")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::PlanetFile {
                        path: path.into(),
                        detail: "missing array field `s2`".into(),
                    })?;
                let mut coeffs = Vec::with_capacity(arr.len());
                for (i, v) in arr.iter().enumerate() {
                    let text = value_text(v).ok_or_else(|| Error::PlanetFile {
                        path: path.into(),
                        detail: format!("s2[{i}] must be a number string"),
                    })?;
                    let q = parse_rational(&text).ok_or_else(|| Error::NumberFormat {
                        field: format!("s2[{i}]"),
                        text,
                        reason: "expected fraction or decimal".into(),
                    })?;
                    coeffs.push(q);
                }
                let z_min = field_rational(obj, "z_min", path)?;
                let z_max = field_rational(obj, "z_max", path)?;
                Self::poly_profile(Poly::new(coeffs), z_min, z_max)?
            }
            other => {
                return Err(Error::PlanetFile {
                    path: path.into(),
                    detail: format!("unknown kind {other:?} (expected spheroid, cylinder, or polyprofile)"),
                })
            }
        };
        if obj.contains_key("rho") {
            profile = profile.with_density(field_scalar(obj, "rho", path)?);
        }
        if obj.contains_key("G") {
            profile = profile.with_g(field_scalar(obj, "G", path)?);
        }
        Ok(profile)
    }

    /// Read and parse a planet-definition file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::PlanetFile {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    /// The planet-definition document for this profile.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        match &self.kind {
            ShapeKind::Spheroid { a, b } => {
                obj.insert("kind".into(), json!("spheroid"));
                obj.insert("a".into(), json!(a.to_text()));
                obj.insert("b".into(), json!(b.to_text()));
            }
            ShapeKind::Cylinder { a, l } => {
                obj.insert("kind".into(), json!("cylinder"));
                obj.insert("a".into(), json!(a.to_text()));
                obj.insert("L".into(), json!(l.to_text()));
            }
            ShapeKind::PolyProfile { s2, z_min, z_max } => {
                obj.insert("kind".into(), json!("polyprofile"));
                let coeffs: Vec<String> = if s2.is_zero() {
                    vec!["0".into()]
                } else {
                    s2.coeffs().iter().map(rational_to_string).collect()
                };
                obj.insert("s2".into(), json!(coeffs));
                obj.insert("z_min".into(), json!(rational_to_string(z_min)));
                obj.insert("z_max".into(), json!(rational_to_string(z_max)));
            }
        }
        obj.insert("rho".into(), json!(self.rho.to_text()));
        obj.insert("G".into(), json!(self.g.to_text()));
        Value::Object(obj)
    }
}

fn value_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn field_text(obj: &Map<String, Value>, field: &str, path: &str) -> Result<String> {
    let v = obj.get(field).ok_or_else(|| Error::PlanetFile {
        path: path.into(),
        detail: format!("missing field `{field}`"),
    })?;
    value_text(v).ok_or_else(|| Error::PlanetFile {
        path: path.into(),
        detail: format!("field `{field}` must be a number string"),
    })
}

fn field_scalar(obj: &Map<String, Value>, field: &str, path: &str) -> Result<ExactScalar> {
    let text = field_text(obj, field, path)?;
    ExactScalar::parse(&text).ok_or_else(|| Error::NumberFormat {
        field: field.into(),
        text,
        reason: "expected fraction, decimal, or sqrt(k)".into(),
    })
}

fn field_rational(obj: &Map<String, Value>, field: &str, path: &str) -> Result<Rational> {
    let text = field_text(obj, field, path)?;
    parse_rational(&text).ok_or_else(|| Error::NumberFormat {
        field: field.into(),
        text,
        reason: "expected fraction or decimal".into(),
    })
}

/// How a coefficient series was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form expression (spheroid or cylinder).
    ClosedForm,
    /// Exact rational integration of the polynomial profile.
    ExactSymbolic,
    /// Gauss–Legendre quadrature.
    Quadrature,
}

impl Provenance {
    /// Stable lowercase name for report parameter echoes.
    pub fn name(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::ExactSymbolic => "exact_symbolic",
            Self::Quadrature => "quadrature",
        }
    }
}

/// On-axis exterior expansion coefficients `A_0 … A_{n_max}` of a profile.
#[derive(Clone, Debug)]
pub struct SheSeries {
    /// Coefficients, index n from 0.
    pub coeffs: Vec<MpReal>,
    /// Computation path that produced them.
    pub provenance: Provenance,
    /// Working precision.
    pub ctx: PrecisionCtx,
    /// The body they expand.
    pub profile: ShapeProfile,
}

impl SheSeries {
    /// Largest coefficient index.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `A_n`.
    pub fn coeff(&self, n: usize) -> &MpReal {
        &self.coeffs[n]
    }
}

/// Total mass `ρ·π·∫ s²(z) dz`.
pub fn mass(profile: &ShapeProfile, ctx: &PrecisionCtx) -> MpReal {
    let pi = MpReal::pi(ctx);
    let rho = profile.rho.to_mp(ctx);
    match &profile.kind {
        // (4/3)π a² b
        ShapeKind::Spheroid { a, b } => {
            let four_thirds = MpReal::from_rational(&Rational::new(4.into(), 3.into()), ctx);
            &(&(&four_thirds * &pi) * &MpReal::from_rational(&a.squared(), ctx)) * &(&b.to_mp(ctx) * &rho)
        }
        // π a² L
        ShapeKind::Cylinder { a, l } => {
            &(&pi * &MpReal::from_rational(&a.squared(), ctx)) * &(&l.to_mp(ctx) * &rho)
        }
        ShapeKind::PolyProfile { s2, z_min, z_max } => {
            let integral = integrate_rational_poly(s2, z_min, z_max);
            &(&pi * &MpReal::from_rational(&integral, ctx)) * &rho
        }
    }
}

/// Exact `∫ p(z) dz` over `[lo, hi]`.
fn integrate_rational_poly(p: &Poly<Rational>, lo: &Rational, hi: &Rational) -> Rational {
    let mut total = Rational::zero();
    let mut hi_pow = hi.clone();
    let mut lo_pow = lo.clone();
    for (k, c) in p.coeffs().iter().enumerate() {
        if !<Rational as Zero>::is_zero(c) {
            let d = Rational::from_integer((k as i64 + 1).into());
            total = total + c * (&hi_pow - &lo_pow) / d;
        }
        hi_pow = &hi_pow * hi;
        lo_pow = &lo_pow * lo;
    }
    total
}

/// Closed-form coefficients for the spheroid and cylinder.
///
/// Spheroid: `A_{2m} = −3GM·(−1)^m (a²−b²)^m / ((2m+1)(2m+3))`.
/// Cylinder: `A_{2m} = −GM·a^{2m}·(4a/L)·(1+t²)^{m+1/2} · C_{2m+1}^{(3/2)}(x)
/// / ((2m+1)(2m+2)(2m+3))` with `t = L/(2a)`, `x = t/√(1+t²)`.
/// Odd coefficients are exactly zero by symmetry.
pub fn she_closed_form(profile: &ShapeProfile, n_max: usize, ctx: &PrecisionCtx) -> Result<SheSeries> {
    let gm = &profile.g.to_mp(ctx) * &mass(profile, ctx);
    let coeffs = match &profile.kind {
        ShapeKind::Spheroid { a, b } => {
            let c2 = a.squared() - b.squared();
            let mut out = Vec::with_capacity(n_max + 1);
            let mut c2_pow = Rational::from_integer(1.into());
            for n in 0..=n_max {
                if n % 2 == 1 {
                    out.push(MpReal::zero_ctx(ctx));
                    continue;
                }
                let m = (n / 2) as i64;
                let sign = if m % 2 == 0 { 3 } else { -3 };
                let factor = Rational::new(
                    BigInt::from(-sign),
                    BigInt::from((2 * m + 1) * (2 * m + 3)),
                ) * &c2_pow;
                out.push(&gm * &MpReal::from_rational(&factor, ctx));
                c2_pow = &c2_pow * &c2;
            }
            out
        }
        ShapeKind::Cylinder { a, l } => {
            let av = a.to_mp(ctx);
            let lv = l.to_mp(ctx);
            let two = MpReal::from_i64(2, ctx);
            let t = &lv / &(&two * &av);
            let one_t2 = &MpReal::from_i64(1, ctx) + &(&t * &t);
            let x = &t / &one_t2.sqrt();
            let nu = Rational::new(3.into(), 2.into());
            let geg = gegenbauer_ladder(n_max + 2, &nu, &x);
            let four_a_over_l = &(&MpReal::from_i64(4, ctx) * &av) / &lv;
            let a2 = &av * &av;
            let sqrt_one_t2 = one_t2.sqrt();
            let mut out = Vec::with_capacity(n_max + 1);
            let mut a_pow = MpReal::from_i64(1, ctx); // a^{2m}
            let mut t2_pow = sqrt_one_t2.clone(); // (1+t²)^{m+1/2}
            for n in 0..=n_max {
                if n % 2 == 1 {
                    out.push(MpReal::zero_ctx(ctx));
                    continue;
                }
                let m = (n / 2) as i64;
                let denom = MpReal::from_i64((2 * m + 1) * (2 * m + 2) * (2 * m + 3), ctx);
                let v = &(&(&(&(-&gm) * &a_pow) * &four_a_over_l) * &t2_pow) * &(&geg[n + 1] / &denom);
                out.push(v);
                a_pow = &a_pow * &a2;
                t2_pow = &t2_pow * &one_t2;
            }
            out
        }
        ShapeKind::PolyProfile { .. } => {
            return Err(Error::UnsupportedProfile {
                kind: "polyprofile has no closed-form coefficients".into(),
            })
        }
    };
    Ok(SheSeries {
        coeffs,
        provenance: Provenance::ClosedForm,
        ctx: *ctx,
        profile: profile.clone(),
    })
}

/// Exact-symbolic coefficients for profiles with polynomial `s²` and rational
/// support bounds.
///
/// The integrand `C_{n+2}^{(−1/2)}(z/√u)·u^{(n+2)/2}` expands into integer
/// powers of `z` and `u = z² + s²(z)` because Gegenbauer polynomials have the
/// parity of their index, so every exponent `(n+2−j)/2` is an integer. The
/// result is a polynomial in `z`, integrated term by term in exact rational
/// arithmetic; only the final prefactor `−2πGρ` rounds.
pub fn she_exact_symbolic(
    profile: &ShapeProfile,
    n_max: usize,
    ctx: &PrecisionCtx,
) -> Result<SheSeries> {
    let Some((z_min, z_max)) = profile.z_span_rational() else {
        return Err(Error::UnsupportedProfile {
            kind: format!(
                "{} with irrational support bounds cannot be integrated exactly",
                profile.kind_name()
            ),
        });
    };
    let s2 = profile.s2_poly();
    // u(z) = z² + s²(z)
    let u = s2.add(&Poly::monomial(Rational::from_integer(1.into()), 2));
    let kmax = n_max + 2;
    let nu = Rational::new((-1).into(), 2.into());
    let geg = gegenbauer_poly_ladder(kmax, &nu);
    // Powers of u up to kmax/2.
    let mmax = kmax / 2;
    let mut upow: Vec<Poly<Rational>> = Vec::with_capacity(mmax + 1);
    upow.push(Poly::constant(Rational::from_integer(1.into())));
    for _ in 1..=mmax {
        upow.push(upow.last().unwrap().mul(&u));
    }
    // Endpoint power caches for term-by-term integration.
    let max_deg = u.degree().unwrap_or(0) * mmax + kmax + 2;
    let mut hi_pows = Vec::with_capacity(max_deg + 2);
    let mut lo_pows = Vec::with_capacity(max_deg + 2);
    hi_pows.push(Rational::from_integer(1.into()));
    lo_pows.push(Rational::from_integer(1.into()));
    for _ in 0..=max_deg + 1 {
        hi_pows.push(hi_pows.last().unwrap() * &z_max);
        lo_pows.push(lo_pows.last().unwrap() * &z_min);
    }
    let integrate_z_pow_u_pow = |j: usize, m: usize| -> Rational {
        let mut total = Rational::zero();
        for (k, c) in upow[m].coeffs().iter().enumerate() {
            if !<Rational as Zero>::is_zero(c) {
                let d = j + k + 1;
                total = total
                    + c * (&hi_pows[d] - &lo_pows[d]) / Rational::from_integer((d as i64).into());
            }
        }
        total
    };
    let prefactor = -&(&(&MpReal::from_i64(2, ctx) * &MpReal::pi(ctx)) * &profile.g_rho(ctx));
    let coeffs: Vec<MpReal> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let k = n + 2;
            let mut total = Rational::zero();
            for (j, c) in geg[k].coeffs().iter().enumerate() {
                if !<Rational as Zero>::is_zero(c) {
                    let m = (k - j) / 2;
                    total = total + c * integrate_z_pow_u_pow(j, m);
                }
            }
            &prefactor * &MpReal::from_rational(&total, ctx)
        })
        .collect();
    Ok(SheSeries {
        coeffs,
        provenance: Provenance::ExactSymbolic,
        ctx: *ctx,
        profile: profile.clone(),
    })
}

const MAX_DOUBLINGS: usize = 6;

/// Quadrature coefficients for any profile.
///
/// One Gauss–Legendre pass evaluates all coefficients simultaneously (the
/// Gegenbauer ladder at each node covers every order); node count starts at
/// `4·(n_max + digits)` and doubles until the largest relative change is
/// below `rel_tol·10`.
pub fn she_quadrature(profile: &ShapeProfile, n_max: usize, ctx: &PrecisionCtx) -> Result<SheSeries> {
    let (z_min, z_max) = profile.z_span(ctx);
    let s2 = profile.s2_poly();
    let nu = Rational::new(3.into(), 2.into());
    let _ = nu;
    let prefactor = -&(&(&MpReal::from_i64(2, ctx) * &MpReal::pi(ctx)) * &profile.g_rho(ctx));
    let half_span = &(&z_max - &z_min) / &MpReal::from_i64(2, ctx);
    let mid = &(&z_max + &z_min) / &MpReal::from_i64(2, ctx);
    let eval_at_nodes = |n_nodes: usize| -> Vec<MpReal> {
        let nodes = gauss_legendre(n_nodes, ctx);
        let partials: Vec<Vec<MpReal>> = nodes
            .par_iter()
            .map(|(xi, wi)| {
                let z = &mid + &(&half_span * xi);
                let u = Poly::<MpReal>::eval_rational_poly(&s2, &z) + &(&z * &z);
                let r = u.sqrt(); // √u ≥ 0 on the support
                let x = &z / &r;
                let nu = Rational::new((-1).into(), 2.into());
                let geg = gegenbauer_ladder(n_max + 2, &nu, &x);
                let mut r_pow = &r * &r; // r^{n+2} starting at n = 0
                let mut out = Vec::with_capacity(n_max + 1);
                for n in 0..=n_max {
                    out.push(&(wi * &geg[n + 2]) * &r_pow);
                    r_pow = &r_pow * &r;
                }
                out
            })
            .collect();
        let mut sums = vec![MpReal::zero_ctx(ctx); n_max + 1];
        for row in partials {
            for (s, v) in sums.iter_mut().zip(row) {
                *s = &*s + &v;
            }
        }
        sums.into_iter()
            .map(|s| &(&s * &half_span) * &prefactor)
            .collect()
    };
    let tol = &ctx.rel_tol() * &MpReal::from_i64(10, ctx);
    let mut n_nodes = 4 * (n_max + ctx.digits() as usize);
    let mut current = eval_at_nodes(n_nodes);
    for _ in 0..MAX_DOUBLINGS {
        n_nodes *= 2;
        let refined = eval_at_nodes(n_nodes);
        let mut worst = MpReal::zero_ctx(ctx);
        // Scale changes by the largest coefficient magnitude: individual
        // coefficients may be exact zeros (odd parity).
        let mut scale = MpReal::zero_ctx(ctx);
        for v in &refined {
            let a = v.abs();
            if a > scale {
                scale = a;
            }
        }
        for (a, b) in current.iter().zip(&refined) {
            let d = (a - b).abs();
            if d > worst {
                worst = d;
            }
        }
        let converged = worst <= &tol * &scale;
        current = refined;
        if converged {
            return Ok(SheSeries {
                coeffs: current,
                provenance: Provenance::Quadrature,
                ctx: *ctx,
                profile: profile.clone(),
            });
        }
    }
    Err(Error::QuadratureDidNotConverge {
        last_change: "above tolerance".into(),
        doublings: MAX_DOUBLINGS,
    })
}

/// Radius of the Brillouin sphere: `max √(z² + s²(z))` over the support,
/// located through the exact critical points of the polynomial `z² + s²(z)`.
pub fn brillouin_radius(profile: &ShapeProfile, ctx: &PrecisionCtx) -> MpReal {
    let u = profile
        .s2_poly()
        .add(&Poly::monomial(Rational::from_integer(1.into()), 2));
    let (z_min, z_max) = profile.z_span(ctx);
    let mut best = MpReal::zero_ctx(ctx);
    let mut consider = |z: &MpReal| {
        let v = Poly::<MpReal>::eval_rational_poly(&u, z);
        if v > best {
            best = v;
        }
    };
    consider(&z_min);
    consider(&z_max);
    let du = u.derivative().map(|c| MpReal::from_rational(c, ctx));
    if du.degree().is_some() {
        if let Ok(roots) = find_roots_real(&du, ctx) {
            let imag_tol = &ctx.rel_tol() * &MpReal::from_i64(1000, ctx);
            for r in roots {
                if r.im.abs() <= imag_tol && r.re >= z_min && r.re <= z_max {
                    consider(&r.re.clone());
                }
            }
        }
    }
    best.sqrt()
}

/// Exact on-axis exterior potential by adaptive quadrature:
/// `Φ(Z) = −2πGρ ∫ (√((Z−z)² + s²(z)) − (Z−z)) dz`.
///
/// Valid for observation points above the body on the positive z-axis —
/// including below the Brillouin radius, which is what makes this the ground
/// truth for downward-continuation error scans.
pub fn potential_axis_exact(profile: &ShapeProfile, z_obs: &MpReal, ctx: &PrecisionCtx) -> Result<MpReal> {
    let (z_min, z_max) = profile.z_span(ctx);
    if z_obs <= &z_max {
        return Err(Error::PointNotExterior {
            z: z_obs.to_sci_string(8),
            min_z: z_max.to_sci_string(8),
        });
    }
    let s2 = profile.s2_poly();
    let prefactor = -&(&(&MpReal::from_i64(2, ctx) * &MpReal::pi(ctx)) * &profile.g_rho(ctx));
    let half_span = &(&z_max - &z_min) / &MpReal::from_i64(2, ctx);
    let mid = &(&z_max + &z_min) / &MpReal::from_i64(2, ctx);
    let eval = |n_nodes: usize| -> MpReal {
        let nodes = gauss_legendre(n_nodes, ctx);
        // Collect per-node terms, then sum in node order: a parallel reduce
        // would round in a scheduling-dependent order and break run-to-run
        // reproducibility of the low bits.
        let terms: Vec<MpReal> = nodes
            .par_iter()
            .map(|(xi, wi)| {
                let z = &mid + &(&half_span * xi);
                let dz = z_obs - &z;
                let u = Poly::<MpReal>::eval_rational_poly(&s2, &z) + &(&dz * &dz);
                wi * &(&u.sqrt() - &dz)
            })
            .collect();
        let mut total = MpReal::zero_ctx(ctx);
        for t in terms {
            total = &total + &t;
        }
        &(&total * &half_span) * &prefactor
    };
    let tol = &ctx.rel_tol() * &MpReal::from_i64(100, ctx);
    let mut n_nodes = 4 * ctx.digits() as usize + 32;
    let mut current = eval(n_nodes);
    let mut last_change = String::new();
    for _ in 0..MAX_DOUBLINGS {
        n_nodes *= 2;
        let refined = eval(n_nodes);
        let change = (&current - &refined).abs();
        let ok = change <= &tol * &refined.abs();
        last_change = change.to_sci_string(3);
        current = refined;
        if ok {
            return Ok(current);
        }
    }
    Err(Error::QuadratureDidNotConverge {
        last_change,
        doublings: MAX_DOUBLINGS,
    })
}

/// Closed-form spheroid potential on the z-axis (principal branch, `G = ρ = 1`):
///
/// ```text
/// Φ(Z) = (3GM)/(2Z) · [ Z²/c² + i·Z·(Z² + c²)/(2c³) · log((Z+ic)/(Z−ic)) ]
/// ```
///
/// with `c = √(a²−b²)`; real for real `Z > 0` and asymptotically `−GM/Z`.
pub fn potential_spheroid_closed(
    a: &ExactScalar,
    b: &ExactScalar,
    z: &MpComplex,
    ctx: &PrecisionCtx,
) -> Result<MpComplex> {
    let c2q = a.squared() - b.squared();
    let c2 = MpComplex::from_real(MpReal::from_rational(&c2q, ctx));
    let c = c2.sqrt();
    let ic = c.mul_i();
    let num = z + &ic;
    let den = z - &ic;
    if den.is_zero() || num.is_zero() {
        return Err(Error::BranchPoint {
            z: format!("{z}"),
        });
    }
    let profile = ShapeProfile::spheroid(a.clone(), b.clone())?;
    let gm = mass(&profile, ctx);
    let z2 = z * z;
    let first = &z2 / &c2;
    let c3 = &c2 * &c;
    let two = MpComplex::from_real(MpReal::from_i64(2, ctx));
    let log_term = (&num / &den).ln();
    let second = &(&(&z.mul_i() * &(&z2 + &c2)) / &(&two * &c3)) * &log_term;
    let bracket = &first + &second;
    let three_half = MpComplex::from_real(MpReal::from_rational(
        &Rational::new(3.into(), 2.into()),
        ctx,
    ));
    let gm_c = MpComplex::from_real(gm);
    Ok(&(&(&three_half * &gm_c) / z) * &bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::close_rel;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn rp(coeffs: &[i64]) -> Poly<Rational> {
        Poly::new(coeffs.iter().map(|&c| qi(c)).collect())
    }

    fn lozenge() -> ShapeProfile {
        ShapeProfile::poly_profile(rp(&[1, 0, 0, 0, -1]), qi(-1), qi(1)).unwrap()
    }

    fn sheroid_32() -> ShapeProfile {
        ShapeProfile::spheroid(ExactScalar::from_ratio(3, 2), ExactScalar::from_int(1)).unwrap()
    }

    fn cylinder_paper() -> ShapeProfile {
        ShapeProfile::cylinder(ExactScalar::from_ratio(1, 2), ExactScalar::Sqrt(3)).unwrap()
    }

    #[test]
    fn mass_examples() {
        let ctx = PrecisionCtx::new(40);
        let pi = MpReal::pi(&ctx);
        // Unit sphere: 4π/3.
        let sphere = ShapeProfile::spheroid(ExactScalar::from_int(1), ExactScalar::from_int(1)).unwrap();
        let expect = &(&pi * &MpReal::from_i64(4, &ctx)) / &MpReal::from_i64(3, &ctx);
        assert!(close_rel(&mass(&sphere, &ctx), &expect, &ctx.rel_tol(), &ctx.rel_tol()));
        // Cylinder (1/2, √3): π/4·√3.
        let expectc = &(&pi * &MpReal::from_rational(&q(1, 4), &ctx)) * &MpReal::from_i64(3, &ctx).sqrt();
        assert!(close_rel(&mass(&cylinder_paper(), &ctx), &expectc, &ctx.rel_tol(), &ctx.rel_tol()));
        // s² = 1−z⁴ on [−1,1]: π(2 − 2/5) = 8π/5.
        let expectl = &pi * &MpReal::from_rational(&q(8, 5), &ctx);
        assert!(close_rel(&mass(&lozenge(), &ctx), &expectl, &ctx.rel_tol(), &ctx.rel_tol()));
    }

    #[test]
    fn spheroid_closed_form_values() {
        let ctx = PrecisionCtx::new(40);
        let s = she_closed_form(&sheroid_32(), 4, &ctx).unwrap();
        let gm = mass(&sheroid_32(), &ctx);
        // A₀ = −GM.
        assert!(close_rel(s.coeff(0), &-&gm, &ctx.rel_tol(), &ctx.rel_tol()));
        // A₂ = GM(a²−b²)/5 = GM/4 for a=3/2, b=1 (a²−b² = 5/4).
        let expect = &gm / &MpReal::from_i64(4, &ctx);
        assert!(close_rel(s.coeff(2), &expect, &ctx.rel_tol(), &ctx.rel_tol()));
        assert!(s.coeff(1).is_zero());
        assert!(s.coeff(3).is_zero());
    }

    #[test]
    fn cylinder_closed_form_monopole() {
        let ctx = PrecisionCtx::new(40);
        let s = she_closed_form(&cylinder_paper(), 2, &ctx).unwrap();
        let gm = mass(&cylinder_paper(), &ctx);
        // A₀ = −GM after C₁^{(3/2)}(x) = 3x simplification.
        assert!(close_rel(s.coeff(0), &-&gm, &ctx.rel_tol(), &ctx.rel_tol()));
    }

    #[test]
    fn symbolic_sphere_terminates() {
        let ctx = PrecisionCtx::new(30);
        let sphere = ShapeProfile::poly_profile(rp(&[1, 0, -1]), qi(-1), qi(1)).unwrap();
        let s = she_exact_symbolic(&sphere, 6, &ctx).unwrap();
        let gm = mass(&sphere, &ctx);
        assert!(close_rel(s.coeff(0), &-&gm, &ctx.rel_tol(), &ctx.rel_tol()));
        for n in 1..=6 {
            assert!(s.coeff(n).is_zero(), "A_{n} must vanish exactly for the sphere");
        }
    }

    #[test]
    fn symbolic_matches_closed_form_spheroid() {
        let ctx = PrecisionCtx::new(60);
        // Spheroid (3/2, 1) as an explicit polynomial profile.
        let as_poly =
            ShapeProfile::poly_profile(Poly::new(vec![q(9, 4), qi(0), q(-9, 4)]), qi(-1), qi(1))
                .unwrap();
        let sym = she_exact_symbolic(&as_poly, 40, &ctx).unwrap();
        let closed = she_closed_form(&sheroid_32(), 40, &ctx).unwrap();
        let tol = &ctx.rel_tol() * &MpReal::from_i64(10, &ctx);
        let floor = (&sym.coeff(0).abs() * &ctx.rel_tol()).abs();
        for n in 0..=40 {
            assert!(
                close_rel(sym.coeff(n), closed.coeff(n), &tol, &floor),
                "A_{n} disagrees: {} vs {}",
                sym.coeff(n),
                closed.coeff(n)
            );
        }
    }

    #[test]
    fn lozenge_monopole_matches_mass() {
        let ctx = PrecisionCtx::new(40);
        let s = she_exact_symbolic(&lozenge(), 2, &ctx).unwrap();
        let gm = mass(&lozenge(), &ctx);
        assert!(close_rel(s.coeff(0), &-&gm, &ctx.rel_tol(), &ctx.rel_tol()));
    }

    #[test]
    fn quadrature_matches_symbolic_lozenge() {
        let ctx = PrecisionCtx::new(30);
        let sym = she_exact_symbolic(&lozenge(), 20, &ctx).unwrap();
        let quad = she_quadrature(&lozenge(), 20, &ctx).unwrap();
        let tol = &ctx.rel_tol() * &MpReal::from_i64(1000, &ctx);
        let floor = &sym.coeff(0).abs() * &tol;
        for n in 0..=20 {
            assert!(
                close_rel(sym.coeff(n), quad.coeff(n), &tol, &floor),
                "A_{n}: {} vs {}",
                sym.coeff(n),
                quad.coeff(n)
            );
        }
    }

    #[test]
    fn quadrature_matches_closed_form_cylinder() {
        let ctx = PrecisionCtx::new(30);
        let closed = she_closed_form(&cylinder_paper(), 24, &ctx).unwrap();
        let quad = she_quadrature(&cylinder_paper(), 24, &ctx).unwrap();
        let tol = &ctx.rel_tol() * &MpReal::from_i64(1000, &ctx);
        let floor = &closed.coeff(0).abs() * &tol;
        for n in 0..=24 {
            assert!(
                close_rel(closed.coeff(n), quad.coeff(n), &tol, &floor),
                "A_{n}: {} vs {}",
                closed.coeff(n),
                quad.coeff(n)
            );
        }
    }

    #[test]
    fn brillouin_examples() {
        let ctx = PrecisionCtx::new(40);
        // Cylinder (1/2, √3) → exactly 1.
        let one = MpReal::from_i64(1, &ctx);
        let r = brillouin_radius(&cylinder_paper(), &ctx);
        assert!((&r - &one).abs() <= ctx.rel_tol());
        // Sphere radius a → a.
        let sphere = ShapeProfile::spheroid(ExactScalar::from_int(1), ExactScalar::from_int(1)).unwrap();
        assert!((&brillouin_radius(&sphere, &ctx) - &one).abs() <= ctx.rel_tol());
        // Lozenge: max of z²+1−z⁴ at z² = 1/2 → √(5)/2.
        let expect = &MpReal::from_i64(5, &ctx).sqrt() / &MpReal::from_i64(2, &ctx);
        assert!((&brillouin_radius(&lozenge(), &ctx) - &expect).abs() <= ctx.rel_tol());
        // Spheroid (3/2, 1) → max(a, b) = 3/2.
        let expect_s = MpReal::from_rational(&q(3, 2), &ctx);
        assert!((&brillouin_radius(&sheroid_32(), &ctx) - &expect_s).abs() <= ctx.rel_tol());
    }

    #[test]
    fn axis_potential_sphere_is_newtonian() {
        let ctx = PrecisionCtx::new(40);
        let sphere = ShapeProfile::poly_profile(rp(&[1, 0, -1]), qi(-1), qi(1)).unwrap();
        let z = MpReal::from_i64(2, &ctx);
        let phi = potential_axis_exact(&sphere, &z, &ctx).unwrap();
        let gm = mass(&sphere, &ctx);
        let expect = -&(&gm / &z);
        assert!(close_rel(&phi, &expect, &(&ctx.rel_tol() * &MpReal::from_i64(100, &ctx)), &ctx.rel_tol()));
    }

    #[test]
    fn axis_potential_rejects_interior_point() {
        let ctx = PrecisionCtx::new(30);
        let err = potential_axis_exact(&lozenge(), &MpReal::from_f64(0.5, &ctx), &ctx).unwrap_err();
        assert!(matches!(err, Error::PointNotExterior { .. }));
    }

    /// Cylinder oracle: ∫√((Z−z)²+a²)dz has the elementary antiderivative
    /// F(u) = (u√(u²+a²) + a²·asinh(u/a))/2 at u = Z−z.
    #[test]
    fn axis_potential_cylinder_matches_antiderivative() {
        let ctx = PrecisionCtx::new(50);
        let profile = cylinder_paper();
        let z = MpReal::from_f64(0.9, &ctx);
        let phi = potential_axis_exact(&profile, &z, &ctx).unwrap();
        let a = MpReal::from_rational(&q(1, 2), &ctx);
        let h = &MpReal::from_i64(3, &ctx).sqrt() / &MpReal::from_i64(2, &ctx);
        let two = MpReal::from_i64(2, &ctx);
        let f = |u: &MpReal| -> MpReal {
            let r = (&(u * u) + &(&a * &a)).sqrt();
            &(&(u * &r) + &(&(&a * &a) * &(u / &a).asinh())) / &two
        };
        // ∫_{-h}^{h} √((Z−z)²+a²) dz = F(Z+h) − F(Z−h); ∫ (Z−z) dz = 2hZ.
        let exact = -&(&(&MpReal::pi(&ctx) * &two)
            * &(&(&f(&(&z + &h)) - &f(&(&z - &h))) - &(&(&two * &h) * &z)));
        assert!(close_rel(&phi, &exact, &(&ctx.rel_tol() * &MpReal::from_i64(100, &ctx)), &ctx.rel_tol()));
    }

    #[test]
    fn spheroid_closed_potential_monopole_and_series() {
        let ctx = PrecisionCtx::new(60);
        let a = ExactScalar::from_ratio(3, 2);
        let b = ExactScalar::from_int(1);
        // Monopole limit: Z·Φ → −GM at Z = 10⁶.
        let big = MpComplex::from_real(MpReal::from_i64(1_000_000, &ctx));
        let phi = potential_spheroid_closed(&a, &b, &big, &ctx).unwrap();
        let gm = mass(&sheroid_32(), &ctx);
        let lim = &phi * &big;
        assert!(close_rel(&lim.re, &-&gm, &MpReal::from_f64(1e-10, &ctx), &ctx.rel_tol()));
        // Z = 3: matches the 200-term series sum.
        let z3 = MpComplex::from_real(MpReal::from_i64(3, &ctx));
        let phi3 = potential_spheroid_closed(&a, &b, &z3, &ctx).unwrap();
        assert!(phi3.im.abs() <= &ctx.rel_tol() * &phi3.re.abs());
        let series = she_closed_form(&sheroid_32(), 200, &ctx).unwrap();
        let three = MpReal::from_i64(3, &ctx);
        let mut sum = MpReal::zero_ctx(&ctx);
        let mut zpow = three.recip();
        for c in &series.coeffs {
            sum = &sum + &(c * &zpow);
            zpow = &zpow / &three;
        }
        assert!((&phi3.re - &sum).abs() <= &MpReal::from_f64(1e-30, &ctx) * &sum.abs());
    }

    #[test]
    fn spheroid_potential_real_on_real_axis() {
        let ctx = PrecisionCtx::new(40);
        let a = ExactScalar::from_int(2);
        let b = ExactScalar::from_int(1);
        let z = MpComplex::from_real(MpReal::from_i64(2, &ctx));
        let phi = potential_spheroid_closed(&a, &b, &z, &ctx).unwrap();
        assert!(phi.im.abs() <= &ctx.rel_tol() * &phi.re.abs());
    }

    #[test]
    fn axis_potential_spheroid_matches_closed_form() {
        let ctx = PrecisionCtx::new(40);
        let profile = sheroid_32();
        let z = MpReal::from_i64(3, &ctx);
        let quad = potential_axis_exact(&profile, &z, &ctx).unwrap();
        let closed = potential_spheroid_closed(
            &ExactScalar::from_ratio(3, 2),
            &ExactScalar::from_int(1),
            &MpComplex::from_real(z),
            &ctx,
        )
        .unwrap();
        assert!(close_rel(&quad, &closed.re, &(&ctx.rel_tol() * &MpReal::from_i64(100, &ctx)), &ctx.rel_tol()));
    }

    #[test]
    fn positivity_check_rejects_bad_profile() {
        // s² = z² − 1/2 is negative at the center.
        let err = ShapeProfile::poly_profile(
            Poly::new(vec![q(-1, 2), qi(0), qi(1)]),
            qi(-1),
            qi(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeProfile { .. }));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind": "polyprofile", "s2": ["1", "0", "0", "0", "-1"],
                       "z_min": "-1", "z_max": "1", "rho": "1", "G": "1"}"#;
        let p = ShapeProfile::from_json_str(text, "inline").unwrap();
        assert_eq!(p, lozenge());
        let back = p.to_json().to_string();
        let p2 = ShapeProfile::from_json_str(&back, "round-trip").unwrap();
        assert_eq!(p2, p);
        // Cylinder with sqrt token.
        let text = r#"{"kind": "cylinder", "a": "1/2", "L": "sqrt(3)"}"#;
        let c = ShapeProfile::from_json_str(text, "inline").unwrap();
        assert_eq!(c, cylinder_paper());
        let back = c.to_json().to_string();
        assert_eq!(ShapeProfile::from_json_str(&back, "rt").unwrap(), c);
    }

    #[test]
    fn json_field_diagnostics() {
        let err = ShapeProfile::from_json_str(r#"{"kind": "cylinder", "a": "1/2"}"#, "f.json")
            .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("f.json") && msg.contains('L'), "got: {msg}");
        let err = ShapeProfile::from_json_str(
            r#"{"kind": "cylinder", "a": "1/2", "L": "sqrt(x)"}"#,
            "f.json",
        )
        .unwrap_err();
        assert!(matches!(err, Error::NumberFormat { .. }));
    }
}
