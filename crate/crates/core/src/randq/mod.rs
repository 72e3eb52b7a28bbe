//! Reproducible sampling: counter-based streams, Haar unitaries, uniform
//! states, random embeddings, the overlap decomposition and the induced
//! eigenvalue measure.

mod induced;
mod rng;
mod samplers;

pub use induced::{mu_cdf_numeric, mu_log_density, MuCdf, MIN_GRID};
pub use rng::RngStream;
pub use samplers::{
    haar_columns, haar_unitary, overlap_decompose, overlap_tail, random_bipartite_state,
    random_isometry, random_pure_state, OVERLAP_DEGENERACY,
};
