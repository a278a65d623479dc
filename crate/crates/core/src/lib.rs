//! Spectral laboratory for random regular graphs.
//!
//! The crate samples uniform simple `d`-regular graphs, evaluates projected
//! Green's functions and Stieltjes transforms of the normalized adjacency
//! matrix `H = A / sqrt(d - 1)`, and compares the extreme eigenvalues with
//! the Kesten–McKay law, its free convolution with the semicircle law, and
//! the Tracy–Widom distributions.
//!
//! Module map:
//!
//! * [`graph`]: regular graphs, switchings, forest embedding counts, samplers.
//! * [`spectral`]: normalized matrix, Green's function, Lanczos extremes.
//! * [`limit_laws`]: Kesten–McKay / semicircle analytics, classical locations,
//!   regular-tree resolvent.
//! * [`free_conv`]: free convolution of Kesten–McKay with the semicircle.
//! * [`dbm`]: constrained GOE and the interpolating matrix `H(t)`.
//! * [`tracy_widom`]: Hastings–McLeod tables for `F1`/`F2`, quantiles, KS.
//! * [`experiments`]: seeded parallel Monte Carlo campaigns.

pub mod dbm;
pub mod experiments;
pub mod free_conv;
pub mod graph;
pub mod limit_laws;
pub mod quad;
pub mod registry;
pub mod rng;
pub mod spectral;
pub mod tracy_widom;

pub use num_complex::Complex64;
