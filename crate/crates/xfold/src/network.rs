//! Comparator sorting networks.
//!
//! A comparator `(j, k)` with `j < k` sends `min` to position `j` and `max`
//! to position `k`.  The network supplies the reflection sequence for the
//! permutahedron factorization: applying comparator `(j, k)` to a point is
//! the conditional reflection across the hyperplane `x_j = x_k`, with the
//! closed halfspace `x_j <= x_k` playing the "no reflection" side.

use crate::error::Error;
use crate::polygon::PointVec;
use crate::scalar::Scalar;

/// A fixed sequence of comparators on `n` wires, 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparatorNetwork {
    n: usize,
    comparators: Vec<(usize, usize)>,
}

impl ComparatorNetwork {
    /// Validates index ranges and — for `n <= 16`, where it is exhaustive —
    /// the 0-1 principle: a network sorts all inputs iff it sorts all `2^n`
    /// zero-one inputs.
    pub fn new(n: usize, comparators: Vec<(usize, usize)>) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("network needs n >= 2, got {n}")));
        }
        for &(j, k) in &comparators {
            if !(1 <= j && j < k && k <= n) {
                return Err(Error::InvalidInput(format!(
                    "comparator ({j}, {k}) out of range for n = {n}"
                )));
            }
        }
        let net = ComparatorNetwork { n, comparators };
        if n <= 16 && !net.sorts_all_01() {
            return Err(Error::InvalidInput(format!(
                "comparator list does not sort all 0-1 inputs on {n} wires"
            )));
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.comparators.len()
    }

    pub fn comparators(&self) -> &[(usize, usize)] {
        &self.comparators
    }

    /// Runs the network in place on anything ordered.
    pub fn apply<T: PartialOrd>(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.n, "input width mismatch");
        for &(j, k) in &self.comparators {
            if x[j - 1] > x[k - 1] {
                x.swap(j - 1, k - 1);
            }
        }
    }

    fn sorts_all_01(&self) -> bool {
        let n = self.n;
        let mut buf = vec![0u8; n];
        for word in 0..(1u32 << n) {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = ((word >> i) & 1) as u8;
            }
            self.apply(&mut buf);
            if buf.windows(2).any(|w| w[0] > w[1]) {
                return false;
            }
        }
        true
    }
}

/// Batcher's odd-even mergesort network: `O(n log^2 n)` comparators,
/// constructive and small at every `n` (unlike the asymptotically smaller
/// `O(n log n)` constructions, whose constants are astronomical).
pub fn batcher_network(n: usize) -> Result<ComparatorNetwork, Error> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("network needs n >= 2, got {n}")));
    }
    let mut comparators = Vec::new();
    let mut p = 1;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < n {
                for i in 0..(n - j - k).min(k) {
                    // Only merge wires that belong to the same 2p-block.
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        comparators.push((i + j + 1, i + j + k + 1));
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
    ComparatorNetwork::new(n, comparators)
}

/// Conditional reflection across `x_j = x_k` with the closed halfspace
/// `x_j <= x_k` as the keep side: swaps the two coordinates iff `x_j > x_k`
/// (ties stay put).  The flag is `true` when no swap happened.
pub fn comparator_conditional_reflect<S: Scalar>(
    x: &PointVec<S>,
    c: (usize, usize),
) -> (PointVec<S>, bool) {
    let (j, k) = c;
    assert!(1 <= j && j < k && k <= x.dim(), "comparator out of range");
    let xj = &x.coords()[j - 1];
    let xk = &x.coords()[k - 1];
    if xj.cmp_total(xk) == std::cmp::Ordering::Greater {
        let mut y = x.clone();
        y.coords_mut().swap(j - 1, k - 1);
        (y, false)
    } else {
        (x.clone(), true)
    }
}
