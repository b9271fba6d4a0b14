//! Anisotropic Littlewood-Paley decomposition `Δ_{k,j} = Δ_k^h Δ_j^v` and the
//! Besov / Chemin-Lerner norm calculus built on the mixed `L^p_h(L²_v)` norm.

pub mod cutoff;
mod norms;
mod partition;

pub use cutoff::{chi, phi};
pub use norms::{
    besov_norm, besov_norm_of, block_norm_groups, block_norms, block_norms_physical, chemin_lerner_from_blocks, chemin_lerner_norm,
    lifted_besov_norm, mixed_norm, mixed_norm_of, BesovSpec, BlockNorms,
};
pub use partition::{apply_separable, DyadicPartition, Direction};
