//! Lattice and flow algebra: `Λ_B`, the diagonal flow `a(t)`, parameter
//! norms, admissible sets, reduction, duality and block shapes of `G_I`.

mod blocks;
mod flow;
mod index_set;
mod lattice;
pub mod reduce;

pub use blocks::{group_blocks, BlockPattern, Cell};
pub use flow::{
    delta_spread, flow_matrix, restrict_param, restricted_extrema, Extremum, FlowParam, RestrictedParam,
    BALANCE_TOL,
};
pub use index_set::{all_admissible, AdmissibleSet, IndexSet};
pub use lattice::{
    apply_flow, dual_lattice, lattice_from_matrix, shortest_vector_length, TorusPoint, UnimodularLattice,
    UNIMODULAR_TOL,
};
pub use reduce::Reduction;

/// `reduce_basis`: the LLL-reduced basis of `lattice`.
pub fn reduce_basis(lattice: &UnimodularLattice) -> crate::Result<nalgebra::DMatrix<f64>> {
    Ok(lattice.reduction()?.basis().clone())
}
