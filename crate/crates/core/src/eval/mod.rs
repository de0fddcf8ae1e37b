//! Time-domain simulation, sampled `H_inf` errors, a balanced truncation
//! baseline and dense small-`n` Floquet oracles.

pub mod bt;
pub mod hinf;
pub mod input;
pub mod oracle;
pub mod radau;
pub mod sim;

pub use bt::{balanced_truncation, BtResult};
pub use hinf::{sampled_hinf_error, sampled_hinf_norm, FrequencyGrid, HinfResult};
pub use input::InputSignal;
pub use oracle::{dense_floquet_oracle, OracleReport};
pub use sim::{relative_error, simulate_fom_example, simulate_rom, uniform_grid, RelativeError, SimResult};
