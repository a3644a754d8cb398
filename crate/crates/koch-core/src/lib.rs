//! Generalized von Koch functions at desk scale: exact construction of every
//! finite generation, certified pointwise evaluation of the limit, the
//! associated self-similar measure, and its multifractal spectrum with the
//! phase transition at lambda = 1/3.
//!
//! Module map:
//! - [`exactnum`]: exact rationals for the x-axis, signed log-domain
//!   magnitudes for slopes.
//! - [`dynamics`]: the interval map, digits, symbolic points, and the orbit
//!   walk down the generation intervals.
//! - [`curve`]: subdivision, polylines, certified evaluation, pointwise
//!   exponents.
//! - [`measure`]: the weight system, moment scaling function, Legendre
//!   transform, dimension formulas, interval masses.
//! - [`estimators`]: grid moment sums, coarse-grained histograms, and
//!   Monte-Carlo digit statistics cross-checking the analytic results.

pub mod curve;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod exactnum;
pub mod measure;

pub use curve::{
    apply_omega, build_polyline, build_polyline_with_cap, evaluate, generation_value,
    generation_values, holder_frequency, holder_slope_estimate, ideal_slope_sequence,
    slope_sequence, walk_breakpoints, EvalResult, HolderValidity, Polyline, Segment,
    DEFAULT_GENERATION_CAP,
};
pub use dynamics::{
    classify, classify_rational, digit_of, interval_of, interval_of_digits, orbit_digits, step,
    to_symbolic, Digit, OrbitState, PointClass, SymbolicPoint, DEFAULT_ORBIT_DEPTH,
};
pub use error::{Error, ErrorClass, Result};
pub use exactnum::{Rational, SignedLog};
pub use estimators::{
    monte_carlo_typical, spectrum_histogram, tau_empirical, tau_empirical_many,
    triadic_cell_masses, FreqStat, HistogramBin, HistogramSpectrum, McReport, LEVEL_CAP,
};
pub use measure::{
    frequency_set_dimension, gamma_residual, infinite_derivative_dimension, legendre,
    local_dimension, mass_of_interval, mass_of_state, moran_dimension, optimal_frequencies,
    spectrum, spectrum_validity, tau, tau_prime, FrequencyVector, ModelParams, SpectrumSample,
    SpectrumValidity, CONTRACTION_RATIOS,
};

/// The parameter of the original construction, sqrt(3)/6.
pub const CLASSIC_LAMBDA: f64 = 0.28867513459481287;
