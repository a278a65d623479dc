//! Kesten–McKay and semicircle analytics, the `P_inf` series, classical
//! eigenvalue locations and the regular-tree Green's function.

mod kesten_mckay;
mod quantiles;
mod series;
mod tree;

use thiserror::Error;

pub use kesten_mckay::{
    m_d, m_d_prime, m_d_second, m_sc, m_sc_prime, m_sc_second, rho_d, stieltjes_by_quadrature, KestenMcKay,
};
pub use quantiles::{
    classical_locations, edge_constant, edge_scale, rigidity_envelope, upper_tail, ClassicalLocations,
};
pub use series::{
    p_inf, p_inf_adaptive, p_inf_closed_form, p_inf_evaluate, p_inf_terms_decreasing, series_ratio, PSeries,
    KMAX_CAP,
};
pub use tree::{tree_green_closed_form, tree_green_oracle, TruncatedTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitLawError {
    #[error("series truncated at kmax = {kmax} still has a term of size {last_term:e}")]
    TruncationNotConverged { kmax: usize, last_term: f64 },
    #[error("tree depth {depth} is too small for distance {dist} (need depth >= dist + 3)")]
    DepthTooSmall { depth: usize, dist: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
