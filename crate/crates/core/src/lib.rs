//! Numerical laboratory for the entanglement of random subspaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`matcore`]: small dense complex matrices, a cyclic Jacobi eigensolver
//!   for Hermitian matrices, pure and mixed states, partial traces and
//!   entropies.
//! - [`randq`]: reproducible counter-based random streams, Haar unitaries,
//!   uniform pure states, random isometries and the induced eigenvalue law.
//! - [`channels`]: conjugate channel pairs built from an isometry, Kraus
//!   operators, the output-space tube and ball.
//! - [`bounds`]: every closed-form scalar bound (m_d, h_d, h_0, the HLW
//!   bound, the product-channel bound, the additivity-violation chain).
//! - [`experiments`]: Monte Carlo campaigns and multistart minimisation of
//!   output entropy.
//!
//! All entropies are in nats.

pub mod bounds;
pub mod channels;
pub mod error;
pub mod experiments;
pub mod matcore;
pub mod randq;

pub use error::{Error, Result};
