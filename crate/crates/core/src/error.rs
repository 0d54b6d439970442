use thiserror::Error;

/// Errors shared by the model, rate, and scan layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A system parameter failed its range check at construction.
    #[error("parameter {name} = {value} outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A derived channel statistic left its admissible range. This signals
    /// an operating point where the closed-form model stops being valid,
    /// and is reported rather than clamped away.
    #[error("derived {name} = {value:e} outside [{lo}, {hi}]")]
    DerivedOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Wraps a failure with the operating point that produced it.
    #[error("at L = {l_km} km, mu = {mu}: {source}")]
    AtOperatingPoint {
        l_km: f64,
        mu: f64,
        #[source]
        source: Box<Error>,
    },

    /// Binary entropy argument outside [0, 1].
    #[error("binary entropy argument {value} outside [0, 1]")]
    EntropyDomain { value: f64 },

    /// lambda3 outside the interval allowed by the two error-rate constraints.
    #[error("lambda3 = {lambda3} infeasible, must lie in [{lo}, {hi}]")]
    InfeasibleLambda3 { lambda3: f64, lo: f64, hi: f64 },

    /// A sweep, tolerance, or block-size range that cannot be iterated.
    #[error("invalid range: {what}")]
    InvalidRange { what: &'static str },

    /// A threshold search was asked to start where the rate is already
    /// non-positive.
    #[error("rate is not positive at {at}; nothing to bisect")]
    NoPositiveRate { at: &'static str },

    /// The rate never changed sign inside the search bracket.
    #[error("no zero crossing found below {limit}")]
    NoSignChange { limit: f64 },

    /// Exhaustive block enumeration rejected an oversized block.
    #[error("block size {b} exceeds the enumeration limit of {max}")]
    BlockTooLarge { b: u32, max: u32 },
}

impl Error {
    /// Attaches the operating point to an error bubbling out of a
    /// channel derivation.
    pub(crate) fn at_point(self, l_km: f64, mu: f64) -> Error {
        Error::AtOperatingPoint {
            l_km,
            mu,
            source: Box::new(self),
        }
    }
}
