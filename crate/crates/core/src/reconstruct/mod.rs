//! Inverse engine.
//!
//! Field route: each `I` sum divided by its cosine is a cosine
//! coefficient of `s'(y)`, whose mean is 1 because `s(y) - y` is periodic.
//! From `s'` follows `A^1_delta` and hence the ray of `B`. The `J` sums minus
//! the amplitude part computed from the recovered `B` give the ray of `V`.
//!
//! Gauge route: with `B` known, the `k = 1` sums on two basis
//! directions give `cos(a0.d1)` and `cos(a0.d2)`, which fix every other
//! cosine up to the relative orientation of the two angles.

pub mod cosines;
pub mod fields;
pub mod gauge;
pub mod roundtrip;

pub use cosines::{chebyshev, CosineData};
pub use fields::{
    assemble_field, recover_b, recover_directional_field, recover_fields, recover_sprime, recover_v,
    recover_v_ray, DirectionDiagnostics, RecoveredFields, RecoveryConfig, SprimeSeries,
};
pub use gauge::{recover_gauge_class, GaugeClass};
pub use roundtrip::{default_kmax, roundtrip, FieldError, ReconstructionReport, RoundtripConfig};
