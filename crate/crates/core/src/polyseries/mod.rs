//! Polynomials positive on `(0, R]` and the nonnegative series that certify it.

mod poly;
mod roots;
mod series;

pub use poly::{
    count_real_roots, count_roots_in, certify_positive_on, divide_by_one_minus_s, sign_changes_at, sturm_sequence,
    IntPolynomial, Polynomial, Positivity,
};
pub use roots::{factor_real, reconstruction_residual, FactorSummary, FactorizedPoly, LinearFactor, QuadraticFactor};
pub use series::{
    lemma_series, limit_denominator, minimal_n, multiply_series, rationalize, round_rational, series_for_linear,
    series_for_quadratic, simplest_in_interval, FactorSeries, LemmaConstruction, LemmaSettings, NonnegSeries,
    QuadraticSeries, Rounding, SeriesGenerator, MAX_N, MAX_TRUNCATION,
};
