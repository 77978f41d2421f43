//! Numerical tolerances shared by the solvers and their checks.

/// Closed-form identities evaluated in double precision.
pub const IDENTITY: f64 = 1e-9;

/// First-order-condition residual accepted at an analytic interior equilibrium.
pub const FOC: f64 = 1e-8;

/// Price-stage FOC residual required before a two-stage solution is reported
/// as converged.
pub const INNER_FOC: f64 = 1e-9;

/// Location-stage FOC residual required for convergence.
pub const OUTER_FOC: f64 = 1e-7;

/// Successive-iterate change that stops the damped price iteration.
pub const PRICE_STEP: f64 = 1e-11;

/// Damping weight on the previous price iterate.
pub const PRICE_DAMPING: f64 = 0.5;

/// Relative finite-difference step for the location-stage FOC (times L).
pub const LOCATION_FD_STEP: f64 = 1e-6;

/// Resolution of the scan that brackets location-stage FOC roots.
pub const LOCATION_SCAN_POINTS: usize = 1024;
