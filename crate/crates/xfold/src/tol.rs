//! Float-mode tolerances, in one place so tests and docs agree on them.
//! Exact-rational code paths never consult these.

/// Slack entries in float mode may round to tiny negatives; anything at or
/// above `-CLAMP_REL * max_entry` is clamped to zero, anything below fails.
pub const CLAMP_REL: f64 = 1e-9;

/// Default relative residual threshold for factorization verification:
/// pass iff `|S - TU|_max <= VERIFY_REL * |S|_max`.
pub const VERIFY_REL: f64 = 1e-9;

/// `|axis_normal . x| <= ON_AXIS` counts as "on the axis": no reflection.
pub const ON_AXIS: f64 = 1e-12;

/// Axis normals must be unit length to within this.
pub const UNIT_NORM: f64 = 1e-12;

/// Folding must land on the terminal vertex/facet to within this (absolute,
/// on circumradius-1 polygons).
pub const FOLD_TERMINAL: f64 = 1e-9;

/// Per-step telescoping identity residual bound.
pub const TELESCOPE_STEP: f64 = 1e-10;

/// Residual bound for the fully telescoped slack value.
pub const TELESCOPE_TOTAL: f64 = 1e-9;

/// Reflections preserve norms to within this relative error.
pub const NORM_PRESERVE_REL: f64 = 1e-12;

/// Strict-convexity test: consecutive edge cross products must exceed
/// `CONVEXITY_REL * |e1| * |e2|`.
pub const CONVEXITY_REL: f64 = 1e-12;

/// A regular polygon's vertex barycenter must be within this of the origin.
pub const BARYCENTER_ABS: f64 = 1e-12;

/// Float simplex: reduced costs and pivot entries below this count as zero.
pub const LP_PIVOT: f64 = 1e-9;

/// Float simplex: a point is feasible if every constraint holds to within
/// this absolute slack.
pub const LP_FEAS: f64 = 1e-8;

/// Projection checks in float mode: per-facet LP optimum must equal the
/// facet offset to within this relative tolerance.
pub const PROJECTION_REL: f64 = 1e-7;

/// Normalization in float mode preserves the product `TU` entrywise to
/// within this relative tolerance.
pub const NORMALIZE_PRODUCT_REL: f64 = 1e-12;

/// Relative slack granted to the normalized-pair bound
/// `max{|T|, |U|} <= sqrt(|TU|)` in float mode.
pub const NORM_BOUND_REL: f64 = 1e-9;

/// Numerical rank: singular values (pivot magnitudes) below
/// `RANK_REL * sigma_max` are treated as zero.
pub const RANK_REL: f64 = 1e-9;
