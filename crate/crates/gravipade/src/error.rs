//! Error type shared by all modules.

use thiserror::Error;

/// Failures surfaced by the numerical and exact-arithmetic layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A polynomial root search did not reach the residual target.
    #[error(
        "root finding did not converge after {sweeps} sweeps \
         (worst residual {worst_residual}, degree {degree})"
    )]
    RootsDidNotConverge {
        /// Number of Aberth sweeps performed.
        sweeps: usize,
        /// Largest relative residual among the final iterates.
        worst_residual: String,
        /// Degree of the polynomial being solved.
        degree: usize,
    },

    /// The Padé linear system stayed rank-deficient all the way down to N = 0.
    #[error("series is rational-degenerate: no [N,N] approximant with N >= 1 exists")]
    RationalDegenerate,

    /// Too few series coefficients for the requested approximant order.
    #[error("series has {have} coefficients but [{n},{n}] needs {need}")]
    SeriesTooShort {
        /// Coefficients available.
        have: usize,
        /// Requested order.
        n: usize,
        /// Coefficients required (2N + 1).
        need: usize,
    },

    /// Evaluation of a Padé approximant at (or numerically on top of) a pole.
    #[error("evaluation point {point} lies on a denominator zero near {pole}")]
    EvaluationAtPole {
        /// The requested evaluation point.
        point: String,
        /// The offending pole location.
        pole: String,
    },

    /// The discriminant criterion needs `p(z)` of degree at least 2 in `z`.
    #[error("profile too simple for discriminant criterion: p(z) has degree {degree} in z")]
    ProfileTooSimple {
        /// Degree of `p(z) = (Z−z)² + s²(z)` in `z`.
        degree: usize,
    },

    /// A quadrature did not stabilize under node doubling.
    #[error("quadrature did not converge: last change {last_change} after {doublings} doublings")]
    QuadratureDidNotConverge {
        /// Relative change between the final two node counts.
        last_change: String,
        /// Number of node doublings attempted.
        doublings: usize,
    },

    /// Observation point inside or on the body where an exterior formula is invalid.
    #[error("observation point Z = {z} is not outside the planet (requires Z > {min_z})")]
    PointNotExterior {
        /// The offending coordinate.
        z: String,
        /// Smallest admissible coordinate.
        min_z: String,
    },

    /// Closed-form evaluation exactly at a branch point.
    #[error("Z = {z} is a branch point of the closed-form potential")]
    BranchPoint {
        /// The branch point hit.
        z: String,
    },

    /// A profile whose `s²(z)` goes negative inside its support.
    #[error("s²(z) is negative near z = {z} (s² = {value}); not a valid body")]
    NegativeProfile {
        /// Sample location of the violation.
        z: String,
        /// Sampled value there.
        value: String,
    },

    /// Operation requires a profile kind it does not support.
    #[error("operation does not support this profile kind: {kind}")]
    UnsupportedProfile {
        /// Human-readable kind name.
        kind: String,
    },

    /// The singularity set has no interior or boundary roots to take a radius from.
    #[error("no interior or boundary singularities: {reason}")]
    NoConvergenceLimitingRoots {
        /// Why none exist (e.g. terminating series).
        reason: String,
    },

    /// The discriminant of `(Z−z)² + s²(z)` vanishes for every `Z`.
    #[error("discriminant vanishes identically; the profile admits no singularity analysis")]
    DegenerateDiscriminant,

    /// `combined_condition_check` queried at a zero of `s²` (branch point of `s`).
    #[error("z0 = {z0} is a zero of s²(z); s itself has a branch point there")]
    ProfileBranchPoint {
        /// The query point.
        z0: String,
    },

    /// Planet-definition file could not be parsed.
    #[error("planet file {path}: {detail}")]
    PlanetFile {
        /// File path as given.
        path: String,
        /// Field-level diagnostic.
        detail: String,
    },

    /// A numeric string in a planet definition is malformed.
    #[error("field `{field}`: cannot parse {text:?} ({reason})")]
    NumberFormat {
        /// JSON field name.
        field: String,
        /// Offending text.
        text: String,
        /// What went wrong.
        reason: String,
    },

    /// Requested roughening amplitude destroys positivity of the profile.
    #[error("ripple amplitude {amp} violates s² ≥ 0 (minimum sampled s² = {min_s2}); reduce it")]
    RippleTooLarge {
        /// Amplitude requested.
        amp: String,
        /// Most negative sampled value.
        min_s2: String,
    },

    /// I/O while writing reports.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
