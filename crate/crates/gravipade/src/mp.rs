//! Arbitrary-precision real and complex scalars with an explicit precision
//! context.
//!
//! Precision is always decimal-digit denominated and carried by an explicit
//! [`PrecisionCtx`] — never by ambient global state — because several
//! experiments sweep the working precision and must run side by side. Every
//! value remembers the binary precision it was created with; binary operations
//! round to the wider of their operands, so mixing a low-precision constant
//! into a high-precision computation never silently truncates the result.
//!
//! [`Rational`] (exact, unbounded) is the coefficient type for everything that
//! must stay exact: profile polynomials, discriminants, and the symbolic
//! coefficient integrals.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = 3.321928094887362;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(
        Consts::new().expect("constants cache allocation"),
    );
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision: decimal digits plus guard digits.
///
/// `rel_tol = 10^(guard − digits)` is the crate-wide relative comparison
/// tolerance at this context. The guard digits absorb rounding accumulated in
/// the dense O(N³) Padé solves without hiding genuine ill-conditioning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionCtx {
    digits: u32,
    guard: u32,
}

impl PrecisionCtx {
    /// Context with the default guard of 10 digits. `digits` must be ≥ 16.
    pub fn new(digits: u32) -> Self {
        Self::with_guard(digits, 10)
    }

    /// Context with an explicit guard digit count.
    pub fn with_guard(digits: u32, guard: u32) -> Self {
        assert!(digits >= 16, "precision below 16 digits is not supported");
        Self { digits, guard }
    }

    /// Decimal digits of working precision (excluding guard digits).
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Guard digits appended to the working precision.
    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Binary mantissa precision used for values of this context.
    pub fn bits(&self) -> usize {
        (((self.digits + self.guard) as f64) * LOG2_10).ceil() as usize + 8
    }

    /// Relative tolerance `10^(guard − digits)`.
    pub fn rel_tol(&self) -> MpReal {
        MpReal::pow10(self.guard as i64 - self.digits as i64, self.bits())
    }

    /// Context with `extra` more working digits (same guard).
    pub fn more_digits(&self, extra: u32) -> Self {
        Self::with_guard(self.digits + extra, self.guard)
    }
}

/// Real number at an explicit binary precision.
///
/// Arithmetic between operands of different precision rounds to the wider
/// precision; all operations are deterministic for fixed inputs.
#[derive(Clone, Debug)]
pub struct MpReal {
    v: BigFloat,
    bits: usize,
}

impl MpReal {
    fn wrap(v: BigFloat, bits: usize) -> Self {
        Self { v, bits }
    }

    /// Zero at minimal precision; widens on contact with any real operand.
    pub fn zero() -> Self {
        Self::wrap(BigFloat::new(64), 64)
    }

    /// Zero carrying the context's precision.
    pub fn zero_ctx(ctx: &PrecisionCtx) -> Self {
        Self::wrap(BigFloat::new(ctx.bits()), ctx.bits())
    }

    /// Integer constant at context precision.
    pub fn from_i64(v: i64, ctx: &PrecisionCtx) -> Self {
        Self::wrap(BigFloat::from_i64(v, ctx.bits()), ctx.bits())
    }

    /// `f64` constant at context precision (exact: every f64 is representable).
    pub fn from_f64(v: f64, ctx: &PrecisionCtx) -> Self {
        Self::wrap(BigFloat::from_f64(v, ctx.bits()), ctx.bits())
    }

    /// Exact rational rounded to context precision.
    pub fn from_rational(q: &Rational, ctx: &PrecisionCtx) -> Self {
        Self::from_bigint_ratio(q.numer(), q.denom(), ctx.bits())
    }

    /// Exact rational rounded to an explicit binary precision (for matching
    /// the precision of an existing value rather than a context).
    pub fn from_rational_bits(q: &Rational, bits: usize) -> Self {
        Self::from_bigint_ratio(q.numer(), q.denom(), bits)
    }

    fn from_bigint_ratio(num: &BigInt, den: &BigInt, bits: usize) -> Self {
        // A few extra bits so the one division does not eat into the target
        // precision.
        let work = bits + 16;
        let n = Self::from_bigint(num, work);
        let d = Self::from_bigint(den, work);
        Self::wrap(n.v.div(&d.v, bits, RM), bits)
    }

    fn from_bigint(i: &BigInt, bits: usize) -> Self {
        let (sign, words) = i.to_u64_digits();
        if words.is_empty() {
            return Self::wrap(BigFloat::new(bits), bits);
        }
        // Value = 0.mantissa × 2^(64·len); astro-float normalizes internally.
        let s = if sign == num_bigint::Sign::Minus {
            Sign::Neg
        } else {
            Sign::Pos
        };
        let e = (words.len() * 64) as astro_float::Exponent;
        let mut v = BigFloat::from_words(&words, s, e);
        v.set_precision(bits.max(words.len() * 64), RM)
            .expect("widening precision cannot fail");
        let mut out = v;
        if out.mantissa_max_bit_len() != Some(bits) {
            out.set_precision(bits, RM).expect("rounding to target bits");
        }
        Self::wrap(out, bits)
    }

    /// Parse a decimal string (integer, decimal point, optional exponent)
    /// at context precision.
    pub fn parse(s: &str, ctx: &PrecisionCtx) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, ctx.bits(), RM, cc));
        if v.is_nan() {
            return None;
        }
        Some(Self::wrap(v, ctx.bits()))
    }

    /// `10^e` at the given binary precision.
    fn pow10(e: i64, bits: usize) -> Self {
        let ten = BigFloat::from_i64(10, bits);
        if e >= 0 {
            Self::wrap(ten.powi(e as usize, bits, RM), bits)
        } else {
            let p = ten.powi((-e) as usize, bits + 8, RM);
            Self::wrap(BigFloat::from_i64(1, bits).div(&p, bits, RM), bits)
        }
    }

    /// π at context precision.
    pub fn pi(ctx: &PrecisionCtx) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(ctx.bits(), RM)), ctx.bits())
    }

    /// Binary precision this value carries.
    pub fn bits(&self) -> usize {
        self.bits
    }

    fn join(&self, other: &Self) -> usize {
        self.bits.max(other.bits)
    }

    /// True iff the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    /// True iff the value is strictly negative.
    pub fn is_negative(&self) -> bool {
        self.v.is_negative()
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.bits)
    }

    /// Compare magnitudes.  Implemented by sign analysis over the ordinary
    /// ordering — the backing library's own `abs_cmp` compares *signed*
    /// values whenever a negative operand is involved, so it cannot be used.
    pub fn abs_cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (false, false) => {}
        }
        match (self.is_negative(), other.is_negative()) {
            (false, false) => self.partial_cmp(other).unwrap_or(Ordering::Equal),
            (true, true) => other.partial_cmp(self).unwrap_or(Ordering::Equal),
            (true, false) => (-self).partial_cmp(other).unwrap_or(Ordering::Equal),
            (false, true) => self.partial_cmp(&-other).unwrap_or(Ordering::Equal),
        }
    }

    /// Square root (NaN for negative input; callers guard the sign).
    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.bits, RM), self.bits)
    }

    /// Integer power.
    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.bits, RM), self.bits)
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.bits, RM), self.bits)
    }

    /// Natural logarithm (positive input).
    pub fn ln(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.ln(self.bits, RM, cc)), self.bits)
    }

    /// Exponential.
    pub fn exp(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.exp(self.bits, RM, cc)), self.bits)
    }

    /// Sine.
    pub fn sin(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.sin(self.bits, RM, cc)), self.bits)
    }

    /// Cosine.
    pub fn cos(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.cos(self.bits, RM, cc)), self.bits)
    }

    /// Inverse tangent.
    pub fn atan(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.atan(self.bits, RM, cc)), self.bits)
    }

    /// Inverse hyperbolic sine.
    pub fn asinh(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.asinh(self.bits, RM, cc)), self.bits)
    }

    /// Two-argument arctangent, principal value in (−π, π].
    pub fn atan2(y: &Self, x: &Self) -> Self {
        let bits = y.join(x);
        let pi = Self::wrap(with_consts(|cc| cc.pi(bits, RM)), bits);
        if x.is_zero() && y.is_zero() {
            return Self::wrap(BigFloat::new(bits), bits);
        }
        if x.is_zero() {
            let half = &pi / &Self::from_i64(2, &PrecisionCtx::new(16)).widen(bits);
            return if y.is_negative() { -&half } else { half };
        }
        let base = (y / x).atan();
        if !x.is_negative() {
            base
        } else if y.is_negative() {
            &base - &pi
        } else {
            &base + &pi
        }
    }

    /// Same value carried at (at least) `bits` precision.
    pub fn widen(&self, bits: usize) -> Self {
        if bits <= self.bits {
            return self.clone();
        }
        let mut v = self.v.clone();
        v.set_precision(bits, RM).expect("widening precision");
        Self::wrap(v, bits)
    }

    /// Closest `f64` (diagnostics and coarse geometry only).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let Some((words, _len, sign, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        // Value = 0.mantissa × 2^e, words least-significant first.
        let top = *words.last().unwrap() as f64 / 2f64.powi(64);
        let mag = if words.len() >= 2 {
            top + words[words.len() - 2] as f64 / 2f64.powi(128)
        } else {
            top
        };
        let m = mag * 2f64.powi((e as i32).clamp(-1000, 1000));
        if sign == Sign::Neg {
            -m
        } else {
            m
        }
    }

    /// Decimal order of magnitude, `floor(log10 |x|)`; `None` for zero.
    pub fn log10_floor(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let (_, digits, e) = self.to_decimal_parts()?;
        let _ = digits;
        Some(e as i64 - 1)
    }

    /// `log2 |x|` as an `f64` estimate (magnitude bookkeeping that must not
    /// overflow); `None` for zero.
    pub fn log2_magnitude(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let (words, _, _, e, _) = self.v.as_raw_parts()?;
        let top = *words.last()? as f64 / 2f64.powi(64);
        Some(e as f64 + top.log2())
    }

    /// (sign, significant decimal digits most-significant first, exponent) with
    /// value = 0.digits × 10^exponent.
    fn to_decimal_parts(&self) -> Option<(bool, Vec<u8>, i64)> {
        if self.is_zero() {
            return Some((false, vec![0], 0));
        }
        let (s, m, e) = with_consts(|cc| self.v.convert_to_radix(Radix::Dec, RoundingMode::None, cc))
            .ok()?;
        Some((s == Sign::Neg, m, e as i64))
    }

    /// Scientific-notation string with exactly `sig` significant digits.
    pub fn to_sci_string(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return format!("0.{}e+00", "0".repeat(sig.saturating_sub(1)));
        }
        let (neg, mut digits, mut e10) = self
            .to_decimal_parts()
            .expect("finite value has decimal digits");
        // Strip leading zeros the converter may emit.
        while digits.len() > 1 && digits[0] == 0 {
            digits.remove(0);
            e10 -= 1;
        }
        if round_decimal_digits(&mut digits, sig) {
            e10 += 1;
        }
        digits.truncate(sig);
        while digits.len() < sig {
            digits.push(0);
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push((b'0' + digits[0]) as char);
        if sig > 1 {
            out.push('.');
            for &d in &digits[1..] {
                out.push((b'0' + d) as char);
            }
        }
        let ee = e10 - 1;
        out.push('e');
        if ee < 0 {
            out.push_str(&format!("-{:02}", -ee));
        } else {
            out.push_str(&format!("+{:02}", ee));
        }
        out
    }

    /// Round to `d` significant decimal digits.
    ///
    /// Values whose binary precision already encodes at most `d` decimal
    /// digits are returned unchanged, so that rounding at (or beyond) the
    /// working precision is the identity.
    pub fn round_to_digits(&self, d: u32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let representable = (self.bits as f64 / LOG2_10).ceil() as u32 + 1;
        if d >= representable {
            return self.clone();
        }
        let (neg, mut digits, mut e10) = self
            .to_decimal_parts()
            .expect("finite value has decimal digits");
        while digits.len() > 1 && digits[0] == 0 {
            digits.remove(0);
            e10 -= 1;
        }
        if round_decimal_digits(&mut digits, d as usize) {
            e10 += 1;
        }
        digits.truncate(d as usize);
        let sign = if neg { Sign::Neg } else { Sign::Pos };
        let v = with_consts(|cc| {
            BigFloat::convert_from_radix(
                sign,
                &digits,
                e10 as astro_float::Exponent,
                Radix::Dec,
                self.bits,
                RM,
                cc,
            )
        });
        Self::wrap(v, self.bits)
    }
}

/// Round a big-endian decimal digit vector to `keep` digits, half away from
/// zero. Returns true when a carry rippled past the top digit (exponent + 1).
fn round_decimal_digits(digits: &mut Vec<u8>, keep: usize) -> bool {
    if digits.len() <= keep {
        return false;
    }
    let round_up = digits[keep] >= 5;
    digits.truncate(keep);
    if !round_up {
        return false;
    }
    for d in digits.iter_mut().rev() {
        if *d == 9 {
            *d = 0;
        } else {
            *d += 1;
            return false;
        }
    }
    digits.insert(0, 1);
    digits.truncate(keep);
    true
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(17))
    }
}

impl PartialEq for MpReal {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for MpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|s| s.cmp(&0))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl $trait<&MpReal> for &MpReal {
            type Output = MpReal;
            fn $method(self, rhs: &MpReal) -> MpReal {
                let bits = self.join(rhs);
                MpReal::wrap(self.v.$op(&rhs.v, bits, RM), bits)
            }
        }
        impl $trait<MpReal> for MpReal {
            type Output = MpReal;
            fn $method(self, rhs: MpReal) -> MpReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MpReal> for MpReal {
            type Output = MpReal;
            fn $method(self, rhs: &MpReal) -> MpReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<MpReal> for &MpReal {
            type Output = MpReal;
            fn $method(self, rhs: MpReal) -> MpReal {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for &MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal::wrap(BigFloat::neg(&self.v), self.bits)
    }
}

impl Neg for MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        -&self
    }
}

/// Complex number over [`MpReal`].
#[derive(Clone, Debug, PartialEq)]
pub struct MpComplex {
    /// Real part.
    pub re: MpReal,
    /// Imaginary part.
    pub im: MpReal,
}

impl MpComplex {
    /// Construct from parts.
    pub fn new(re: MpReal, im: MpReal) -> Self {
        Self { re, im }
    }

    /// Purely real value.
    pub fn from_real(re: MpReal) -> Self {
        let z = MpReal::zero();
        Self { re, im: z }
    }

    /// Zero.
    pub fn zero() -> Self {
        Self::new(MpReal::zero(), MpReal::zero())
    }

    /// Imaginary unit at context precision.
    pub fn i(ctx: &PrecisionCtx) -> Self {
        Self::new(MpReal::zero_ctx(ctx), MpReal::from_i64(1, ctx))
    }

    /// True iff both parts are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// Modulus.
    pub fn abs(&self) -> MpReal {
        (&(&self.re * &self.re) + &(&self.im * &self.im)).sqrt()
    }

    /// Squared modulus.
    pub fn abs_sq(&self) -> MpReal {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    /// Multiplication by `i` (the rotation used for singularity geometry).
    pub fn mul_i(&self) -> Self {
        Self::new(-&self.im, self.re.clone())
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Self {
        let d = self.abs_sq();
        Self::new(&self.re / &d, -&(&self.im / &d))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.im.is_zero() {
            if self.re.is_negative() {
                return Self::new(MpReal::zero(), self.re.abs().sqrt());
            }
            return Self::new(self.re.sqrt(), MpReal::zero());
        }
        let r = self.abs();
        let u = (&(&r + &self.re.abs()) / &MpReal::from_f64(2.0, &PrecisionCtx::new(16)).widen(r.bits())).sqrt();
        let v = &self.im.abs() / &(&u + &u);
        if !self.re.is_negative() {
            if self.im.is_negative() {
                Self::new(u, -&v)
            } else {
                Self::new(u, v)
            }
        } else if self.im.is_negative() {
            Self::new(v, -&u)
        } else {
            Self::new(v, u)
        }
    }

    /// Principal natural logarithm.
    pub fn ln(&self) -> Self {
        let two = MpReal::from_f64(2.0, &PrecisionCtx::new(16));
        Self::new(&self.abs_sq().ln() / &two, MpReal::atan2(&self.im, &self.re))
    }

    /// Closest `(f64, f64)` pair (diagnostics only).
    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// `log2 |z|` as an `f64` estimate; `None` for zero.
    pub fn log2_magnitude(&self) -> Option<f64> {
        let a = self.re.log2_magnitude();
        let b = self.im.log2_magnitude();
        match (a, b) {
            (None, None) => None,
            (Some(x), None) => Some(x),
            (None, Some(y)) => Some(y),
            (Some(x), Some(y)) => {
                let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
                // |z|² = 2^(2hi) + 2^(2lo); half the log of the sum.
                Some(hi + 0.5 * (1.0 + 2f64.powf(2.0 * (lo - hi))).log2())
            }
        }
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, self.im.abs())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add<&MpComplex> for &MpComplex {
    type Output = MpComplex;
    fn add(self, rhs: &MpComplex) -> MpComplex {
        MpComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&MpComplex> for &MpComplex {
    type Output = MpComplex;
    fn sub(self, rhs: &MpComplex) -> MpComplex {
        MpComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&MpComplex> for &MpComplex {
    type Output = MpComplex;
    fn mul(self, rhs: &MpComplex) -> MpComplex {
        MpComplex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl Div<&MpComplex> for &MpComplex {
    type Output = MpComplex;
    fn div(self, rhs: &MpComplex) -> MpComplex {
        let d = rhs.abs_sq();
        MpComplex::new(
            &(&(&self.re * &rhs.re) + &(&self.im * &rhs.im)) / &d,
            &(&(&self.im * &rhs.re) - &(&self.re * &rhs.im)) / &d,
        )
    }
}

impl Neg for &MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex::new(-&self.re, -&self.im)
    }
}

/// Round every element of a series to `d` significant decimal digits
/// (the coefficient-truncation experiment).
pub fn round_series_to_digits(coeffs: &[MpReal], d: u32) -> Vec<MpReal> {
    coeffs.iter().map(|c| c.round_to_digits(d)).collect()
}

/// Parse an exact rational from `"a/b"`, integer, or decimal text.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let digits: String = format!("{}{}", int_part.trim_start_matches('-'), frac_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: BigInt = digits.parse().ok()?;
        let num = if t.starts_with('-') { -num } else { num };
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Some(Rational::new(num, den));
    }
    let num: BigInt = t.parse().ok()?;
    Some(Rational::from_integer(num))
}

/// Format a rational compactly (`"a/b"` or `"a"`).
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().to_i64() == Some(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `|a − b| ≤ tol · max(|a|, |b|, floor)` — relative closeness with an
/// absolute floor for values near zero.
pub fn close_rel(a: &MpReal, b: &MpReal, tol: &MpReal, floor: &MpReal) -> bool {
    let diff = (a - b).abs();
    let mut scale = a.abs();
    let babs = b.abs();
    if babs > scale {
        scale = babs;
    }
    if *floor > scale {
        scale = floor.clone();
    }
    diff <= &scale * tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ctx(d: u32) -> PrecisionCtx {
        PrecisionCtx::new(d)
    }

    #[test]
    fn dyadic_rational_is_exact() {
        let c = ctx(30);
        let half = MpReal::from_rational(&Rational::new(1.into(), 2.into()), &c);
        assert_eq!(half, MpReal::from_f64(0.5, &c));
    }

    #[test]
    fn one_third_rounds_to_context() {
        let c = ctx(20);
        let third = MpReal::from_rational(&Rational::new(1.into(), 3.into()), &c);
        assert_eq!(third.to_sci_string(20), "3.3333333333333333333e-01");
    }

    /// Long-division oracle: 25/7 digit by digit with integer arithmetic.
    #[test]
    fn from_rational_matches_long_division() {
        let c = ctx(50);
        let q = MpReal::from_rational(&Rational::new(25.into(), 7.into()), &c);
        let mut rem = BigInt::from(25u32);
        let seven = BigInt::from(7u32);
        let mut digits = Vec::new();
        // 25/7 = 3.571...; first digit is the integer part (single digit here).
        for _ in 0..51 {
            digits.push((&rem / &seven).to_string());
            rem = (&rem % &seven) * 10;
        }
        // Round the 51-digit expansion to 50 digits.
        let mut ds: Vec<u8> = digits.iter().map(|s| s.parse().unwrap()).collect();
        let carried = round_decimal_digits(&mut ds, 50);
        assert!(!carried);
        let expect: String = format!(
            "{}.{}e+00",
            ds[0],
            ds[1..].iter().map(|d| d.to_string()).collect::<String>()
        );
        assert_eq!(q.to_sci_string(50), expect);
    }

    /// Magnitude ordering must ignore sign and rank zero below everything —
    /// the full-pivoting scan depends on it.
    #[test]
    fn abs_cmp_ignores_sign() {
        use std::cmp::Ordering::*;
        let ctx = PrecisionCtx::new(40);
        let mk = |v: f64| MpReal::from_f64(v, &ctx);
        let cases = [
            (0.0, -0.25, Less),
            (-0.25, 0.0, Greater),
            (0.0, 0.25, Less),
            (0.0, 0.0, Equal),
            (-2.0, 1.0, Greater),
            (1.0, -2.0, Less),
            (-0.25, -0.5, Less),
            (-0.5, -0.25, Greater),
            (0.25, -0.25, Equal),
        ];
        for (a, b, want) in cases {
            assert_eq!(mk(a).abs_cmp(&mk(b)), want, "abs_cmp({a}, {b})");
        }
    }

    #[test]
    fn round_to_digits_pi() {
        let c = ctx(40);
        let pi = MpReal::pi(&c);
        assert_eq!(pi.round_to_digits(5).to_sci_string(6), "3.14160e+00");
    }

    #[test]
    fn round_to_digits_exact_value_unchanged() {
        let c = ctx(30);
        let v = MpReal::from_f64(-1.0, &c);
        assert_eq!(v.round_to_digits(10), v);
    }

    #[test]
    fn round_at_working_precision_is_identity() {
        let c = ctx(30);
        let third = MpReal::from_rational(&Rational::new(1.into(), 3.into()), &c);
        // bits(30+10 digits) encodes ~41 digits; rounding at 60 must not touch it.
        assert_eq!(third.round_to_digits(60), third);
    }

    /// Independent string-rounding oracle for a physically meaningful value.
    #[test]
    fn round_to_digits_matches_string_rounding() {
        let c = ctx(60);
        // x = 2/3·10^−4-ish irrational mix: use sqrt(2)/3 for a non-terminating
        // decimal.
        let x = &MpReal::from_i64(2, &c).sqrt() / &MpReal::from_i64(3, &c);
        let full = x.to_sci_string(30);
        let rounded = x.round_to_digits(12);
        // String-round the 30-digit form to 12 digits.
        let (mant, exp) = full.split_once('e').unwrap();
        let digits: Vec<u8> = mant
            .bytes()
            .filter(|b| b.is_ascii_digit())
            .map(|b| b - b'0')
            .collect();
        let mut ds = digits.clone();
        let carried = round_decimal_digits(&mut ds, 12);
        assert!(!carried);
        let expect = format!(
            "{}.{}e{}",
            ds[0],
            ds[1..12].iter().map(|d| d.to_string()).collect::<String>(),
            exp
        );
        assert_eq!(rounded.to_sci_string(12), expect);
    }

    #[test]
    fn reciprocal_roundtrip_within_rel_tol() {
        let c = ctx(60);
        let x = MpReal::from_f64(1.7320508075688772, &c);
        let r = &(&x * &x.recip()) - &MpReal::from_i64(1, &c);
        assert!(r.abs() <= c.rel_tol());
    }

    #[test]
    fn sci_string_carry_propagates() {
        let c = ctx(30);
        let v = MpReal::parse("9.9999999", &c).unwrap();
        assert_eq!(v.to_sci_string(3), "1.00e+01");
    }

    #[test]
    fn sci_string_zero_and_negative() {
        let c = ctx(20);
        assert_eq!(MpReal::zero_ctx(&c).to_sci_string(4), "0.000e+00");
        let v = MpReal::from_f64(-0.015625, &c);
        assert_eq!(v.to_sci_string(4), "-1.563e-02");
    }

    #[test]
    fn atan2_quadrants() {
        let c = ctx(40);
        let one = MpReal::from_i64(1, &c);
        let pi = MpReal::pi(&c);
        let q2 = MpReal::atan2(&one, &-&one); // 3π/4
        let expect = &(&pi * &MpReal::from_i64(3, &c)) / &MpReal::from_i64(4, &c);
        assert!((&q2 - &expect).abs() <= c.rel_tol());
        let q3 = MpReal::atan2(&-&one, &-&one); // −3π/4
        assert!((&q3 + &expect).abs() <= c.rel_tol());
    }

    #[test]
    fn complex_sqrt_squares_back() {
        let c = ctx(50);
        for (re, im) in [(3.0, 4.0), (-3.0, 4.0), (3.0, -4.0), (-3.0, -4.0), (-9.0, 0.0)] {
            let z = MpComplex::new(MpReal::from_f64(re, &c), MpReal::from_f64(im, &c));
            let s = z.sqrt();
            let back = &s * &s;
            assert!((&back.re - &z.re).abs() <= &c.rel_tol() * &MpReal::from_i64(10, &c));
            assert!((&back.im - &z.im).abs() <= &c.rel_tol() * &MpReal::from_i64(10, &c));
            // Principal branch: non-negative real part.
            assert!(!s.re.is_negative() || s.re.is_zero());
        }
    }

    #[test]
    fn complex_ln_of_i() {
        let c = ctx(40);
        let i = MpComplex::i(&c);
        let l = i.ln();
        let half_pi = &MpReal::pi(&c) / &MpReal::from_i64(2, &c);
        assert!(l.re.abs() <= c.rel_tol());
        assert!((&l.im - &half_pi).abs() <= c.rel_tol());
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(
            parse_rational("1/2"),
            Some(Rational::new(1.into(), 2.into()))
        );
        assert_eq!(
            parse_rational("-0.25"),
            Some(Rational::new((-1).into(), 4.into()))
        );
        assert_eq!(parse_rational("42"), Some(Rational::from_integer(42.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn widening_mixed_precision_keeps_wide_result() {
        let narrow = PrecisionCtx::new(16);
        let wide = PrecisionCtx::new(100);
        let a = MpReal::from_i64(1, &narrow);
        let b = MpReal::from_rational(&Rational::new(1.into(), 3.into()), &wide);
        let s = &a + &b;
        assert_eq!(s.bits(), wide.bits());
    }
}
