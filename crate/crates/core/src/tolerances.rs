//! Numerical tolerances shared across the crate.
//!
//! Absolute thresholds are scaled by `max(1, |input|)` at the call site
//! where the magnitude of the inputs matters.

/// Base absolute tolerance for root solving and frame checks.
pub const ROOT_TOL: f64 = 1e-12;

/// Default band around the manifolds `det F = 1` and `|F v_i| = 1`.
pub const MANIFOLD_TOL: f64 = 1e-9;

/// Slack allowed below the domain floor of the starred `h` variants.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Minimum `|a⊥·b|` accepted by the frame identity.
pub const FRAME_TOL: f64 = 1e-12;

/// Unit-length slack for slip vectors and frame inputs.
pub const UNIT_TOL: f64 = 1e-12;

/// Membership tolerance when evaluating energies of simulated gradient fields.
pub const FIELD_MEMBERSHIP_TOL: f64 = 1e-6;

/// Gap below which two required laminate roots count as coincident.
pub const TANGENCY_TOL: f64 = 1e-9;

/// Default number of lamination directions scanned by the oracle.
pub const ORACLE_N_DIRS: usize = 720;

/// Final bracket width of the golden-section refinement, in radians.
pub const ORACLE_REFINE_WIDTH: f64 = 1e-8;
