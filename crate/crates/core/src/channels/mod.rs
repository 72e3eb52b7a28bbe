//! Embeddings, conjugate channel pairs and output-space geometry.

mod geometry;
mod pair;

pub use geometry::{
    ball_radius, distance_to_mixed, in_ball, in_tube, tube_distance, tube_radius,
    typicality_estimate, TubeSpec, BALL_CONSTANT, TUBE_CONSTANT, TUBE_MAX_ITERS, TUBE_TOL,
};
pub use pair::{ChannelPair, Isometry, Side, ISOMETRY_TOL};
