//! Compact extended formulations for polygons and permutahedra.
//!
//! The library constructs small nonnegative factorizations `S = T U` of
//! polytope slack matrices by folding: a sequence of conditional reflections
//! that maps every vertex (and every facet normal) of the polytope onto a
//! single terminal one.  Each factorization yields an extended formulation
//! `Q = {(x, y) : A x + T y = b, y >= 0}` whose projection is the original
//! polytope and whose facet count is the factorization rank.
//!
//! Two scalar modes run through everything: exact arbitrary-precision
//! rationals and IEEE `f64`.  A value's mode is carried by its type, so
//! mixed-mode arithmetic is rejected at compile time.
//!
//! Modules:
//! - [`scalar`], [`mat`]: the scalar abstraction and dense matrices;
//! - [`polygon`], [`permutahedron`]: vertex/H-representation constructions;
//! - [`slack`]: slack matrices, factorizations, normalization, the
//!   `max{|T|, |U|} <= sqrt(|TU|)` bound for normalized pairs;
//! - [`polygon_fold`]: reflection axes and the rank-`2*ceil(log2 n)` regular
//!   polygon factorization;
//! - [`network`], [`perm_fold`]: sorting networks and the permutahedron
//!   factorization of rank twice the network size;
//! - [`lp`]: a dense bounded-variable simplex solver (exact or float);
//! - [`extension`]: building `Q`, lifting vertices, projection checks;
//! - [`rounding`]: integer-coefficient rounding of an extension and exact
//!   recovery of the lattice points of the projected polytope;
//! - [`bounds`]: face-count and linear-rank lower bounds on factorization
//!   rank;
//! - [`io`]: deterministic JSON/CSV serialization.

pub mod bounds;
pub mod error;
pub mod extension;
pub mod io;
pub mod lp;
pub mod mat;
pub mod network;
pub mod perm_fold;
pub mod permutahedron;
pub mod polygon;
pub mod polygon_fold;
pub mod rounding;
pub mod scalar;
pub mod slack;
pub mod tol;

pub use bounds::{
    bounds_report, face_count_lower_bound, float_rank, linear_rank_lower_bound, rational_rank,
    BoundsReport,
};
pub use error::Error;
pub use extension::{build_extension, check_projection_inclusion, lift_vertex, ExtendedSystem, ProjectionReport};
pub use mat::Mat;
pub use network::{batcher_network, comparator_conditional_reflect, ComparatorNetwork};
pub use perm_fold::build_permutahedron_factorization;
pub use permutahedron::{permutahedron_hrep, permutahedron_vertices, Permutahedron};
pub use polygon::{
    make_grid_parabola_polygon, make_regular_ngon, polygon_to_hrep, GridSelector, LinearSystemH,
    PointVec, PolygonV,
};
pub use polygon_fold::{
    build_polygon_factorization, build_polygon_factors, conditional_reflect,
    facet_folding_sequence, folding_axes, polygon_folding_factors, telescoping_slack_check,
    vertex_folding_sequence, FoldAxis, FoldRole, FoldingSequence, TelescopeReport, TelescopeStep,
};
pub use rounding::{
    build_rounded_system, check_coefficient_bounds, compute_delta, membership_test,
    parabola_delta, round_system, select_max_volume_rows, verify_recovery, RecoveryReport,
    RoundedSystem,
};
pub use scalar::{Rat, Scalar, ScalarMode};
pub use slack::{
    check_factor_norm_bound, normalize_pair, slack_matrix, verify_factorization,
    verify_factorization_streaming, NonnegFactorization, SlackMatrix, VerifyReport,
    VerifySampling,
};

/// `ceil(log2 n)` for `n >= 1`; the folding axis count of an `n`-gon.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1, "ceil_log2 needs n >= 1");
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u32
    }
}
