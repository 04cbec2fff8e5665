//! Gravitational potential of axisymmetric constant-density planets: exact
//! spherical-harmonic-expansion (SHE) coefficients, analytic location of the
//! complex singularities that bound the expansion's convergence, and Padé
//! analytic continuation of the potential below the Brillouin sphere.
//!
//! The exterior potential of an axisymmetric body with boundary profile
//! `(±s(z), z)`, `z ∈ [z_min, z_max]`, restricted to the symmetry axis, has a
//! `1/Z` expansion `Φ(Z) = Σ Aₙ/Zⁿ⁺¹` whose coefficients are elementary
//! integrals of powers of `z² + s²(z)` against Gegenbauer polynomials. The
//! series converges outside the Brillouin sphere (the smallest origin-centered
//! sphere containing the body) and generically diverges on part of the region
//! between that sphere and the surface. Two independent tools recover the
//! potential there:
//!
//! * the complex singularities `Z₀` of `Φ` are the zeros of the discriminant
//!   of `p(z) = (Z − z)² + s²(z)` — computable exactly when `s²` is a
//!   polynomial with rational coefficients ([`poly::discriminant_in_z`]);
//! * `[N, N]` Padé approximants to the truncated series locate the same
//!   singularities numerically as denominator poles and evaluate the potential
//!   accurately well below the Brillouin radius ([`pade`]).
//!
//! Everything is computed in explicit-precision arithmetic ([`mp`]) so that
//! precision itself can be treated as an experimental parameter.

pub mod error;
pub mod experiments;
pub mod harmonics;
pub mod mp;
pub mod pade;
pub mod planet;
pub mod poly;
pub mod singularity;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
