//! Forward engine: the wave-trace invariants `I(d) + I(-d)` and `J(d) + J(-d)`.
//!
//! Two independent routes are provided. The raw route integrates the defining
//! expressions over the cell. The directional route reduces each sum to a
//! one-dimensional integral along the dual ray through the change of
//! variables `y = s + A^1_delta(s)`.
//!
//! With `d = k d0` and `s = delta.x`, the raw phase is
//! `a0.d - 2 pi k (s + A^1_delta(s))`, which fixes the sign of the linear term.

pub mod cov;
pub mod directional;
pub mod raw;
pub mod table;

pub use cov::{ChangeOfVariables, DEFAULT_COV_POINTS};
pub use directional::{i_directional, j1_directional, j2_fourier, line_amplitude_modes, AmplitudeSum};
pub use raw::{b_term, i_raw, j_raw, m0_phase, raw_phase, v_line, RawJ};
pub use table::{build_invariant_table, InvariantEntry, InvariantTable, SpotCheck, TableConfig, COSINE_FLOOR};
