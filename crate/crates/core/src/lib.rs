pub mod charge;
pub mod devices;
pub mod error;
pub mod fitting;
pub mod harmonics;
pub mod linalg;
pub mod multimode;
pub mod observables;
mod parallel;
pub mod potential;
pub mod spectrum;
pub mod squid;
pub mod units;

pub use charge::{banded_hamiltonian, hamiltonian_matrix, ChargeBasisSpec};
pub use error::{Error, ErrorClass, Result};
pub use linalg::{eigensolve, EigenSystem};
pub use potential::{HarmonicPotential, HarmonicTerm};
pub use spectrum::{transition_spectrum, Spectrum, TransitionRow};
pub use squid::{build_squid_potential, SquidParams};
