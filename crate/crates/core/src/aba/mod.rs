//! Algebraic Bethe ansatz for the spin-1/2 XXX chain: monodromy entries,
//! the twisted transfer matrix, Bethe vectors and their singular limit.

mod monodromy;
mod operator;
mod vectors;

pub use monodromy::{
    apply_entry, apply_transfer, hamiltonian_from_transfer, monodromy_entry, monodromy_entry_capped, sweep,
    transfer_matrix, Amplitude, Entry,
};
pub use operator::{
    magnons_of, pauli, permutation, total_spin, Axis, OperatorLabel, OperatorMatrix, StateVector, Storage,
    DEFAULT_SIZE_CAP, DENSE_LIMIT, DENSE_SITES,
};
pub use vectors::{
    bethe_vector, bethe_vector_unchecked, singular_limit_vector, transfer_eigenvalue, transfer_eigenvalue_check,
    TransferCheck, TransferPoint,
};
