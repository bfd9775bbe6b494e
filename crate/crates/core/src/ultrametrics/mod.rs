//! Word metric, relative infinitesimals, scale-invariant valuations, valued
//! norms and measures, and valuated exponents.

mod exponents;
mod valuation;
mod words;

pub use exponents::{
    endpoint_exponent, growth_of_measure_demo, renormalised_valuation, renormalised_valuation_ln,
    valuated_exponent_estimate, valued_measure_estimate, ExponentFit,
};
pub use valuation::{
    inversion, relative_infinitesimal, sequence_norm_companion, sequence_norm_limit, valuation, valued_neighbours,
    valued_norm_triadic, InfinitesimalContext, ScaleSchedule, SequenceNorm, SequenceNormOptions, TraceRow,
    ValuationEstimate,
};
pub use words::{natural_ultrametric, word_encode, WordRep};
