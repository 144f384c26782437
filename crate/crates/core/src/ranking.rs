//! Ordering and voting rules shared by the grid search and the oracle.
//!
//! Both sides must agree on which of several equidistant points make the
//! cut, otherwise an exact comparison between them fails on ties rather
//! than on real differences. The rule is:
//!
//! 1. smaller integer pixel distance first (squared distance for L2),
//! 2. then the pixel in row-major order (`row`, then `col`),
//! 3. then the within-pixel tie-break: the point index when it is known,
//!    otherwise the class id.
//!
//! Votes are decided by neighbour multiplicity; ties go to the lowest class id.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::raster::PixelCoord;

/// Sort key for one neighbour candidate on the pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeighborRank {
    pub distance_key: u64,
    pub row: usize,
    pub col: usize,
    pub tiebreak: usize,
}

impl NeighborRank {
    pub fn new(distance_key: u64, pixel: PixelCoord, tiebreak: usize) -> Self {
        Self {
            distance_key,
            row: pixel.row,
            col: pixel.col,
            tiebreak,
        }
    }
}

/// `f64` with a total order, for sorting world-space distances.
#[derive(Debug, Clone, Copy)]
pub struct TotalF64(pub f64);

impl PartialEq for TotalF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Returns the `k` smallest items in ascending order.
///
/// Keeps a bounded max-heap, so memory stays at `k` regardless of how many
/// items are fed in.
pub fn k_smallest<K: Ord>(items: impl IntoIterator<Item = K>, k: usize) -> Vec<K> {
    if k == 0 {
        return Vec::new();
    }
    let mut heap: BinaryHeap<K> = BinaryHeap::with_capacity(k + 1);
    for item in items {
        if heap.len() < k {
            heap.push(item);
        } else if let Some(mut top) = heap.peek_mut() {
            if item < *top {
                *top = item;
            }
        }
    }
    heap.into_sorted_vec()
}

/// Index of the largest vote; ties go to the lowest index.
///
/// Returns 0 for an empty slice.
pub fn majority_vote(votes: &[usize]) -> usize {
    let mut best = 0;
    for (class, &count) in votes.iter().enumerate() {
        if count > votes[best] {
            best = class;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_tie_goes_to_lowest_class() {
        assert_eq!(majority_vote(&[1, 0, 1]), 0);
        assert_eq!(majority_vote(&[0, 2, 2]), 1);
        assert_eq!(majority_vote(&[0, 0, 3]), 2);
        assert_eq!(majority_vote(&[]), 0);
    }

    #[test]
    fn k_smallest_matches_full_sort() {
        let items = vec![9, 3, 7, 1, 3, 8, 0, 5];
        let mut sorted = items.clone();
        sorted.sort();
        for k in 0..=items.len() + 2 {
            let expected: Vec<_> = sorted.iter().copied().take(k).collect();
            assert_eq!(k_smallest(items.clone(), k), expected);
        }
    }

    #[test]
    fn rank_orders_distance_then_row_major_then_tiebreak() {
        let a = NeighborRank::new(4, PixelCoord::new(9, 0), 5);
        let b = NeighborRank::new(4, PixelCoord::new(0, 1), 0);
        let c = NeighborRank::new(4, PixelCoord::new(0, 1), 1);
        let d = NeighborRank::new(5, PixelCoord::new(0, 0), 0);
        let mut v = vec![d, c, b, a];
        v.sort();
        assert_eq!(v, vec![a, b, c, d]);
    }

    #[test]
    fn total_f64_orders_like_floats() {
        let mut v = [TotalF64(2.5), TotalF64(-1.0), TotalF64(0.0)];
        v.sort();
        assert_eq!(
            v.iter().map(|t| t.0).collect::<Vec<_>>(),
            vec![-1.0, 0.0, 2.5]
        );
    }
}
