//! Shared fixtures for the pipeline benchmarks.

use xfold::{
    make_grid_parabola_polygon, polygon_to_hrep, slack_matrix, GridSelector, LinearSystemH,
    NonnegFactorization, PolygonV, Rat, SlackMatrix,
};

/// Grid abscissas {1, ..., n-1, 2n}: spans the whole grid, the worst
/// bounding box for recovery enumeration.
pub fn spanning_subset(n: usize) -> Vec<u64> {
    (1..n as u64).chain([2 * n as u64]).collect()
}

/// Parabola-grid polygon with its facet system, slack matrix, and trivial
/// factorization, ready for rounding benchmarks.
pub fn gridgon_fixture(
    n: usize,
) -> (PolygonV<Rat>, LinearSystemH<Rat>, SlackMatrix<Rat>, NonnegFactorization<Rat>) {
    let poly = make_grid_parabola_polygon(n, &GridSelector::Subset(spanning_subset(n)))
        .expect("valid gridgon");
    let h = polygon_to_hrep(&poly).expect("hrep");
    let s = slack_matrix(&h, poly.vertices()).expect("slack");
    let f = NonnegFactorization::trivial_from_slack(&s);
    (poly, h, s, f)
}
