//! Exact many-body backend for the periodic transverse-field Ising chain.

pub mod correlations;
pub mod hamiltonian;
pub mod krylov;
pub mod lanczos;
pub mod observable;
pub mod state;

pub use correlations::{two_point_functions, TwoPointFunctions};
pub use hamiltonian::{IsingChain, MAX_SITES};
pub use krylov::{evolve, Propagator};
pub use lanczos::{ground_state, GroundState, GroundStateOptions};
pub use observable::{magnetization_observable, DiagonalObservable, ALPHA_CRITICAL, ALPHA_GAUSSIAN};
pub use state::{haar_random_state, StateVector};
