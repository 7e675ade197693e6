//! Weak dominance counting in the standard orthant.
//!
//! For points `y_1..y_m` in `R^n`, `count[i] = #{ j : y_j >= y_i componentwise }`
//! (every point counts itself). This is the kernel behind empirical oriented
//! orthant probabilities once the sample has been rotated.
//!
//! Three strategies are used depending on the shape of the input:
//!
//! * `n == 2`: sweep in decreasing first coordinate with a Fenwick tree over
//!   second-coordinate ranks, `O(m log m)`.
//! * small `m`: per-dimension prefix bitsets, intersected per point,
//!   `O(n m^2 / 64)` time and `(n - 1) m^2 / 8` bytes.
//! * otherwise: sorted sweep on the first coordinate with a pruned scan.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Upper bound on the bitset working set, in bits.
const BITSET_BUDGET_BITS: usize = 1 << 31;

/// Reference `O(m^2 n)` count on already-rotated points.
pub fn dominance_counts_naive(points: &[f64], n: usize) -> Vec<usize> {
    let m = points.len() / n;
    (0..m)
        .map(|i| {
            let yi = &points[i * n..(i + 1) * n];
            points
                .chunks_exact(n)
                .filter(|yj| yj.iter().zip(yi).all(|(a, b)| a >= b))
                .count()
        })
        .collect()
}

/// Dominance counts for a row-major `m x n` buffer.
pub fn dominance_counts(points: &[f64], n: usize) -> Vec<usize> {
    assert!(n > 0 && points.len().is_multiple_of(n));
    let m = points.len() / n;
    match (m, n) {
        (0, _) => Vec::new(),
        (_, 1) => counts_1d(points),
        (_, 2) => counts_2d(points),
        _ if (n - 1).saturating_mul(m).saturating_mul(m) <= BITSET_BUDGET_BITS => {
            counts_bitset(points, n)
        }
        _ => counts_sweep(points, n),
    }
}

/// Indices sorted by descending value of coordinate `d`.
fn order_desc(points: &[f64], n: usize, d: usize) -> Vec<usize> {
    let m = points.len() / n;
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| points[b * n + d].total_cmp(&points[a * n + d]));
    idx
}

/// Splits a descending order into runs of equal values (by `==`, so that
/// `-0.0` and `0.0` tie exactly as `>=` treats them).
fn tie_groups(points: &[f64], n: usize, d: usize, order: &[usize]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let v = points[order[start] * n + d];
        let mut end = start + 1;
        while end < order.len() && points[order[end] * n + d] == v {
            end += 1;
        }
        groups.push((start, end));
        start = end;
    }
    groups
}

fn counts_1d(points: &[f64]) -> Vec<usize> {
    let order = order_desc(points, 1, 0);
    let mut counts = vec![0; points.len()];
    for (start, end) in tie_groups(points, 1, 0, &order) {
        for &i in &order[start..end] {
            counts[i] = end;
        }
    }
    counts
}

struct Fenwick(Vec<usize>);

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick(vec![0; len + 1])
    }

    fn add(&mut self, pos: usize) {
        let mut i = pos + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted positions `< pos`.
    fn prefix(&self, pos: usize) -> usize {
        let mut i = pos;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

fn counts_2d(points: &[f64]) -> Vec<usize> {
    let m = points.len() / 2;
    // dense ranks of the second coordinate, ascending, ties share a rank
    let mut by_y: Vec<usize> = (0..m).collect();
    by_y.sort_by(|&a, &b| points[a * 2 + 1].total_cmp(&points[b * 2 + 1]));
    let mut rank = vec![0usize; m];
    let mut r = 0;
    for k in 0..m {
        if k > 0 && points[by_y[k] * 2 + 1] != points[by_y[k - 1] * 2 + 1] {
            r += 1;
        }
        rank[by_y[k]] = r;
    }

    let order = order_desc(points, 2, 0);
    let mut tree = Fenwick::new(r + 1);
    let mut inserted = 0;
    let mut counts = vec![0; m];
    for (start, end) in tie_groups(points, 2, 0, &order) {
        for &i in &order[start..end] {
            tree.add(rank[i]);
        }
        inserted += end - start;
        for &i in &order[start..end] {
            counts[i] = inserted - tree.prefix(rank[i]);
        }
    }
    counts
}

/// For each dimension, the set `{ j : y_jd >= y_id }` is a prefix of the
/// descending order; one bitset per tie group is enough.
struct PrefixSets {
    words: usize,
    /// `sets[g * words..(g + 1) * words]` is the prefix bitset of group `g`.
    sets: Vec<u64>,
    group_of: Vec<usize>,
}

impl PrefixSets {
    fn build(points: &[f64], n: usize, d: usize) -> Self {
        let m = points.len() / n;
        let words = m.div_ceil(64);
        let order = order_desc(points, n, d);
        let groups = tie_groups(points, n, d, &order);
        let mut sets = Vec::with_capacity(groups.len() * words);
        let mut running = vec![0u64; words];
        let mut group_of = vec![0; m];
        for (g, &(start, end)) in groups.iter().enumerate() {
            for &j in &order[start..end] {
                running[j / 64] |= 1 << (j % 64);
                group_of[j] = g;
            }
            sets.extend_from_slice(&running);
        }
        PrefixSets {
            words,
            sets,
            group_of,
        }
    }

    #[inline]
    fn set_for(&self, i: usize) -> &[u64] {
        let g = self.group_of[i];
        &self.sets[g * self.words..(g + 1) * self.words]
    }
}

fn counts_bitset(points: &[f64], n: usize) -> Vec<usize> {
    let m = points.len() / n;
    let dims: Vec<PrefixSets> = (0..n).map(|d| PrefixSets::build(points, n, d)).collect();
    let count_one = |i: usize| -> usize {
        let first = dims[0].set_for(i);
        (0..dims[0].words)
            .map(|w| {
                dims[1..]
                    .iter()
                    .fold(first[w], |acc, p| acc & p.set_for(i)[w])
                    .count_ones() as usize
            })
            .sum()
    };
    #[cfg(feature = "parallel")]
    {
        (0..m).into_par_iter().map(count_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..m).map(count_one).collect()
    }
}

fn counts_sweep(points: &[f64], n: usize) -> Vec<usize> {
    let m = points.len() / n;
    let order = order_desc(points, n, 0);
    let groups = tie_groups(points, n, 0, &order);
    let mut end_of = vec![0; m];
    for &(start, end) in &groups {
        for &i in &order[start..end] {
            end_of[i] = end;
        }
    }
    let count_one = |i: usize| -> usize {
        let yi = &points[i * n..(i + 1) * n];
        order[..end_of[i]]
            .iter()
            .filter(|&&j| {
                let yj = &points[j * n..(j + 1) * n];
                yj[1..].iter().zip(&yi[1..]).all(|(a, b)| a >= b)
            })
            .count()
    };
    #[cfg(feature = "parallel")]
    {
        (0..m).into_par_iter().map(count_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..m).map(count_one).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diagonal_chain() {
        let pts = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0];
        assert_eq!(dominance_counts(&pts, 2), vec![3, 2, 1]);
        assert_eq!(counts_bitset(&pts, 2), vec![3, 2, 1]);
        assert_eq!(counts_sweep(&pts, 2), vec![3, 2, 1]);
    }

    #[test]
    fn incomparable_pair() {
        let pts = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(dominance_counts(&pts, 2), vec![1, 1]);
    }

    #[test]
    fn duplicates_dominate_each_other() {
        let pts = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 0.0, 0.0, 0.0];
        let naive = dominance_counts_naive(&pts, 3);
        assert_eq!(naive, vec![2, 2, 3]);
        assert_eq!(dominance_counts(&pts, 3), naive);
        assert_eq!(counts_sweep(&pts, 3), naive);
    }

    #[test]
    fn signed_zero_ties() {
        let pts = [0.0, -0.0, -0.0, 0.0];
        assert_eq!(dominance_counts(&pts, 2), vec![2, 2]);
        assert_eq!(counts_bitset(&pts, 2), vec![2, 2]);
    }

    fn lattice_points(max_n: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
        (1..=max_n, 1usize..80).prop_flat_map(|(n, m)| {
            (
                Just(n),
                proptest::collection::vec((-3i32..4).prop_map(f64::from), n * m),
            )
        })
    }

    proptest! {
        #[test]
        fn all_strategies_match_naive_on_tied_lattices((n, pts) in lattice_points(5)) {
            let naive = dominance_counts_naive(&pts, n);
            prop_assert_eq!(&dominance_counts(&pts, n), &naive);
            prop_assert_eq!(&counts_bitset(&pts, n), &naive);
            prop_assert_eq!(&counts_sweep(&pts, n), &naive);
        }
    }
}
