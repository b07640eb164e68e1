//! The winners-take-all pool, its Poisson-picking specialization, and
//! payoff tensors keyed by count vector.

mod lattice;
mod mc;
mod partition;
mod tensor;

pub use lattice::{count_vectors, CountLattice};
pub use mc::{check_samples, mc_payoff_tensor, McTally, MAX_MC_PROCESSES, MIN_SAMPLES};
pub use partition::{
    all_ordered_partitions, induced_outcome_distribution, OrderedPartition, OutcomeDistribution,
    MAX_INDUCED_PROCESSES,
};
pub use tensor::{
    exact_payoff_tensor, exact_poisson_tensor, expected_payoff, realized_payoffs, winner_share,
    PayoffTensor, PureProfile, WinTable, DEFAULT_MAX_ENTRIES, MAX_TABLE_PROCESSES,
};
