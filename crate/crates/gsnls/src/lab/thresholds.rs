//! Pass/fail thresholds shared by the experiment summaries and the
//! acceptance suite. Experiments must mirror these exactly; nothing passes
//! on a privately relaxed tolerance.

/// Max relative mass drift of the splitting scheme, over all paths and times.
pub const MASS_DRIFT_MAX: f64 = 1e-10;

/// Drift-cancellation residual bound, relative to ||f||_H^2.
pub const DRIFT_CANCELLATION_MAX: f64 = 1e-11;

/// Partition-of-unity residual |sum_m rho_m(t) - 1| on log-spaced points.
pub const PARTITION_RESIDUAL_MAX: f64 = 1e-12;

/// Slack above 1 allowed for the L^2 and E_A contraction probes.
pub const CONTRACTION_SLACK: f64 = 1e-10;

/// Idempotence / selfadjointness residual bound for the projectors.
pub const PROJECTOR_RESIDUAL_MAX: f64 = 1e-12;

/// Sharp-projector L^p lower bounds must grow at least this factor per level.
pub const SHARP_GROWTH_MIN: f64 = 1.02;

/// Smooth-projector L^p lower bounds stay within this total spread.
pub const SMOOTH_SPREAD_MAX: f64 = 1.5;

/// Window for the Euler-Maruyama mean-mass-drift ratio under dt halving.
pub const ITO_RATIO_RANGE: (f64, f64) = (1.6, 2.6);

/// Monte-Carlo slack: the ratio may miss the window by this many stderrs.
pub const ITO_RATIO_SIGMA: f64 = 3.0;

/// Max/min spread of the q = 1 sup-energy moments across levels.
pub const MOMENT_SPREAD_MAX: f64 = 2.0;

/// Fraction of coupled paths whose level gaps must decrease strictly.
pub const GAP_DECREASING_PATH_FRACTION: f64 = 0.9;

/// Relative change allowed between the 1e3- and 1e4-trial ratio scans.
pub const GN_STABILITY_MAX_CHANGE: f64 = 0.10;

/// Energy-drift shrink factors under dt halving for the two split orderings.
pub const ENERGY_ORDER_LIE: (f64, f64) = (1.6, 2.6);
pub const ENERGY_ORDER_STRANG: (f64, f64) = (3.2, 4.8);
