//! The `n`-permutahedron: the convex hull of all permutations of
//! `(1, 2, ..., n)`.  It has `n!` vertices and `2^n - 2` facets, one per
//! proper non-empty subset `S` of `[n]`, reading `sum_{j in S} x_j <= g(|S|)`
//! where `g(s)` is the largest possible sum of `s` distinct values.
//!
//! Everything here is exact-rational with integer data.

use itertools::Itertools;
use num::{One, Zero};

use crate::error::Error;
use crate::mat::Mat;
use crate::polygon::{LinearSystemH, PointVec};
use crate::scalar::{Rat, Scalar};

/// Enumeration cap: 8! = 40320 vertices and 254 facets is the largest
/// instance the dense-matrix paths are sized for.
pub const ENUM_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutahedron {
    n: usize,
}

impl Permutahedron {
    pub fn new(n: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("permutahedron needs n >= 2, got {n}")));
        }
        Ok(Permutahedron { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> u64 {
        (1..=self.n as u64).product()
    }

    pub fn facet_count(&self) -> usize {
        (1usize << self.n) - 2
    }

    /// `g(s)`: the maximum of `sum_{j in S} x_j` over the polytope for
    /// `|S| = s`, i.e. the sum of the `s` largest of `1..n`.
    pub fn g(&self, s: usize) -> u64 {
        assert!(s >= 1 && s < self.n, "g defined for proper non-empty subsets");
        let n = self.n as u64;
        let s = s as u64;
        (n * (n + 1) - (n - s) * (n - s + 1)) / 2
    }

    /// Proper non-empty subsets of `[n]` as ascending 1-based element lists,
    /// ordered by size then lexicographically — the facet row order used
    /// everywhere.
    pub fn facet_subsets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.facet_count());
        for s in 1..self.n {
            for c in (1..=self.n).combinations(s) {
                out.push(c);
            }
        }
        out
    }
}

fn check_cap(k: &Permutahedron) -> Result<(), Error> {
    if k.n() > ENUM_CAP {
        return Err(Error::TooLarge(format!(
            "permutahedron enumeration capped at n = {ENUM_CAP}, got {}",
            k.n()
        )));
    }
    Ok(())
}

/// All `n!` vertices exactly once, in lexicographic order, with exact integer
/// coordinates.
pub fn permutahedron_vertices(
    k: &Permutahedron,
) -> Result<impl Iterator<Item = PointVec<Rat>>, Error> {
    check_cap(k)?;
    let n = k.n();
    Ok((1..=n as i64)
        .permutations(n)
        .map(|p| PointVec::new(p.into_iter().map(Rat::from_int).collect())))
}

/// The `2^n - 2` facet inequalities: row for subset `S` is the 0/1 indicator
/// of `S` with right-hand side `g(|S|)`, subsets ordered by size then lex.
pub fn permutahedron_hrep(k: &Permutahedron) -> Result<LinearSystemH<Rat>, Error> {
    check_cap(k)?;
    let n = k.n();
    let mut rows = Vec::with_capacity(k.facet_count());
    let mut b = Vec::with_capacity(k.facet_count());
    for sub in k.facet_subsets() {
        let mut row = vec![Rat::zero(); n];
        for &j in &sub {
            row[j - 1] = Rat::one();
        }
        b.push(Rat::from_int(k.g(sub.len()) as i64));
        rows.push(row);
    }
    LinearSystemH::new(Mat::from_rows(rows)?, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(v: &PointVec<Rat>) -> Vec<i64> {
        v.coords()
            .iter()
            .map(|c| {
                assert!(c.is_integer());
                i64::try_from(c.to_integer()).unwrap()
            })
            .collect()
    }

    #[test]
    fn small_counts_and_g_values() {
        let k3 = Permutahedron::new(3).unwrap();
        assert_eq!(k3.vertex_count(), 6);
        assert_eq!(k3.facet_count(), 6);
        assert_eq!(k3.g(1), 3);
        assert_eq!(k3.g(2), 5);
        let k8 = Permutahedron::new(8).unwrap();
        assert_eq!(k8.vertex_count(), 40320);
        assert_eq!(k8.facet_count(), 254);
        assert!(Permutahedron::new(1).is_err());
    }

    #[test]
    fn vertices_are_lexicographic() {
        let k = Permutahedron::new(3).unwrap();
        let vs: Vec<Vec<i64>> = permutahedron_vertices(&k).unwrap().map(|v| coords(&v)).collect();
        assert_eq!(
            vs,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1],
            ]
        );
        let k2 = Permutahedron::new(2).unwrap();
        let vs2: Vec<Vec<i64>> = permutahedron_vertices(&k2).unwrap().map(|v| coords(&v)).collect();
        assert_eq!(vs2, vec![vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn hrep_rows_follow_subset_order() {
        let k = Permutahedron::new(3).unwrap();
        let h = permutahedron_hrep(&k).unwrap();
        assert_eq!(h.m(), 6);
        // {1}: x1 <= 3.
        assert_eq!(h.a().row(0), &[Rat::from_int(1), Rat::zero(), Rat::zero()]);
        assert_eq!(h.b()[0], Rat::from_int(3));
        // {1,2}: x1 + x2 <= 5 sits right after the three singletons.
        assert_eq!(h.a().row(3), &[Rat::from_int(1), Rat::from_int(1), Rat::zero()]);
        assert_eq!(h.b()[3], Rat::from_int(5));

        let k4 = Permutahedron::new(4).unwrap();
        assert_eq!(permutahedron_hrep(&k4).unwrap().m(), 14);
    }

    #[test]
    fn vertex_facet_slacks_nonnegative_with_exact_tightness() {
        // Slack of vertex v against subset S is g(|S|) - sum_{j in S} v_j,
        // zero exactly when the |S| largest values sit on S.
        for n in 2..=4usize {
            let k = Permutahedron::new(n).unwrap();
            let h = permutahedron_hrep(&k).unwrap();
            let subs = k.facet_subsets();
            let verts: Vec<PointVec<Rat>> = permutahedron_vertices(&k).unwrap().collect();
            assert_eq!(verts.len() as u64, k.vertex_count());
            for v in &verts {
                let c = coords(v);
                let mut sum: i64 = c.iter().sum();
                assert_eq!(sum as u64, (n * (n + 1) / 2) as u64);
                for (i, sub) in subs.iter().enumerate() {
                    let s = sub.len();
                    sum = sub.iter().map(|&j| c[j - 1]).sum();
                    let slack = k.g(s) as i64 - sum;
                    assert!(slack >= 0);
                    let top_on_s = sub.iter().all(|&j| c[j - 1] > (n - s) as i64);
                    assert_eq!(slack == 0, top_on_s);
                    assert_eq!(h.slack_at(i, v), Rat::from_int(slack));
                }
            }
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let k = Permutahedron::new(9).unwrap();
        assert!(matches!(permutahedron_vertices(&k).map(|_| ()), Err(Error::TooLarge(_))));
        assert!(matches!(permutahedron_hrep(&k), Err(Error::TooLarge(_))));
    }
}
