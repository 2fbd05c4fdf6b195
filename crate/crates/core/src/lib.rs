//! Weak monitoring of macroscopic fluctuations in quantum Ising chains.
//!
//! The chain `H = sum_j X_j + J sum_j Z_j Z_{j+1}` is simulated exactly
//! ([`spin`]), its rescaled magnetization `q = sum_j Z_j / L^alpha` is measured
//! weakly and repeatedly ([`measurement`]), and the outcome statistics are
//! compared with an exactly solvable Gaussian ancilla model ([`gaussian`]).
//! [`experiments`] runs the comparisons and [`cli`] is the `fluctmon` tool.
//!
//! Runnable examples, one per capability:
//!
//! | example | shows |
//! |---|---|
//! | `ground_state` | Lanczos ground state and gap |
//! | `time_evolution` | Krylov propagation against exact diagonalization |
//! | `correlations` | Keldysh and response functions of `q` |
//! | `covariance_blocks` | ancilla covariance and predicted outcome covariance |
//! | `entropies` | Renyi and von Neumann entropies, canonical transform |
//! | `rates` | entropy-growth and purification rates from spectra |
//! | `weak_measurement` | outcome law and Kraus update of one measurement |
//! | `trajectories` | direct and branch-engine measurement records |
//! | `monitor` | two-time monitoring of a ground state |
//! | `gamma_sweep` | backreaction versus measurement strength |
//! | `haar_average` | backreaction averaged over random states |
//! | `critical_chain` | bimodal outcome marginals at the critical point |
//! | `multi_time_covariance` | three-event covariance against the Gaussian law |
//! | `wick_check` | connected four-point ratio of ground states |
//! | `outputs` | configuration layering and CSV tables |
//!
//! ```text
//! cargo run --release --example monitor -- 16 8000
//! ```

pub mod cli;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod linalg;
pub mod measurement;
pub mod rng;
pub mod spin;
