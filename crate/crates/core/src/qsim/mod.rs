//! Exact simulation of Fourier sampling over finite groups.

mod distribution;
mod oracle;
mod state;

pub use distribution::{
    fourier_sampling_distribution, fourier_sampling_distribution_general,
    fourier_sampling_distribution_pair, fourier_sampling_distribution_pair_general,
    fourier_sampling_distribution_with, outcome_json, sample, FourierMethod, Outcome, OutcomeSpace,
    SamplingDistribution, NORMALIZATION_TOL, SUPPORT_TOL,
};
pub use oracle::{FunctionOracle, PairOracle};
pub use state::{
    coset_state_prediction, pair_defect, pair_defect_exact, qft_coset_state, qft_matrix,
    state_defect, state_defect_exact, superposition_distance_sq, ProbFunction,
};
