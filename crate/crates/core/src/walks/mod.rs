//! Exact combinatorics engine for walks on the complete graph.
//!
//! A `k`-walk is a length-`k` walk on `K_n` with no self-loop steps. The
//! engine enumerates walks and `r`-tuples of walks exhaustively at desk
//! scale, computes exact moments of the graph noise, and verifies the
//! counting bounds and structure claims that the larger Monte Carlo
//! studies rely on.
//!
//! Everything here is an oracle: correctness first, with explicit
//! enumeration guards instead of silent truncation.

mod enumerate;
mod moments;
mod pattern;

pub use enumerate::{
    count_closed, count_nt, enumerate_walks, exact_eak, check_akij_growth, for_each_walk,
    ClosedCountRecord, CountRecord, EnumGuard, GrowthRecord, WalkMode,
};
pub use moments::{
    mc_delta_moments, moment_decomposition, nstar_census, rho_terms, theta_hi_proxy,
    theta_hi_proxy_enumerated, lemma15_proxy_bound, CellStats, McMomentRecord, MomentGuard,
    MomentTable, NstarReport,
};
pub use pattern::{exact_eak_block, BlockEak};

use crate::{Error, Result};

/// A directed `k`-walk stored by its vertex tuple `(i_1, ..., i_{k+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    vertices: Vec<u32>,
}

impl Walk {
    pub fn new(vertices: Vec<u32>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Domain("a walk needs at least one step".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("self-loop step in walk".into()));
        }
        Ok(Walk { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Number of steps `k`.
    pub fn num_steps(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn start(&self) -> u32 {
        self.vertices[0]
    }

    /// Final vertex of the walk.
    pub fn endpoint(&self) -> u32 {
        *self.vertices.last().unwrap()
    }

    /// Directed steps in order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// The set `[w]` of unique undirected edges, sorted.
    pub fn unique_edges(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = self
            .directed_edges()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// The set `<w>` of distinct vertices, sorted.
    pub fn vertex_set(&self) -> Vec<u32> {
        let mut vs = self.vertices.clone();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Whether `G(w)` is a tree (no cycle). A walk graph is connected, so
    /// this is exactly `|[w]| == |<w>| - 1`.
    pub fn is_tree(&self) -> bool {
        self.unique_edges().len() + 1 == self.vertex_set().len()
    }
}

/// An ordered `r`-tuple of `k`-walks sharing a common root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkSequence {
    walks: Vec<Walk>,
}

impl WalkSequence {
    pub fn new(walks: Vec<Walk>) -> Result<Self> {
        if walks.is_empty() {
            return Err(Error::Domain("empty walk sequence".into()));
        }
        let root = walks[0].start();
        if walks.iter().any(|w| w.start() != root) {
            return Err(Error::Domain("walks must share a common root".into()));
        }
        let k = walks[0].len();
        if walks.iter().any(|w| w.len() != k) {
            return Err(Error::Domain("walks must have equal length".into()));
        }
        Ok(WalkSequence { walks })
    }

    pub fn walks(&self) -> &[Walk] {
        &self.walks
    }

    pub fn r(&self) -> usize {
        self.walks.len()
    }

    pub fn k(&self) -> usize {
        self.walks[0].len()
    }

    pub fn root(&self) -> u32 {
        self.walks[0].start()
    }

    /// Unique undirected edges of the union graph, sorted.
    pub fn unique_edges(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = self
            .walks
            .iter()
            .flat_map(|w| w.unique_edges())
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Distinct vertices of the union graph, sorted.
    pub fn vertex_set(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.walks.iter().flat_map(|w| w.vertices.clone()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Partition of `[r]` by transitive closure of pairwise edge sharing.
    pub fn gamma(&self) -> GammaPartition {
        let r = self.r();
        let edge_sets: Vec<Vec<(u32, u32)>> = self.walks.iter().map(|w| w.unique_edges()).collect();
        let mut parent: Vec<usize> = (0..r).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for s in 0..r {
            for s2 in (s + 1)..r {
                if sorted_intersects(&edge_sets[s], &edge_sets[s2]) {
                    let a = find(&mut parent, s);
                    let b = find(&mut parent, s2);
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for s in 0..r {
            let root = find(&mut parent, s);
            groups.entry(root).or_default().push(s);
        }
        // components ordered by smallest element: BTreeMap keys are the
        // canonical representatives, which are the minima
        let components: Vec<Vec<usize>> = groups.into_values().collect();
        let overlapping = components.iter().all(|c| c.len() >= 2);
        GammaPartition { components, overlapping }
    }
}

fn sorted_intersects(a: &[(u32, u32)], b: &[(u32, u32)]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Edge-overlap partition of a walk sequence, components ordered by their
/// smallest element. `overlapping` means every component has size >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPartition {
    pub components: Vec<Vec<usize>>,
    pub overlapping: bool,
}

impl GammaPartition {
    /// Canonical matching form `(min, max)` per component; only meaningful
    /// when every component is a pair.
    pub fn as_matching(&self) -> Option<Vec<(usize, usize)>> {
        if self.components.iter().any(|c| c.len() != 2) {
            return None;
        }
        Some(self.components.iter().map(|c| (c[0], c[1])).collect())
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact Catalan number `C_t`.
pub fn catalan(t: u64) -> u128 {
    binomial(2 * t, t) / (t as u128 + 1)
}

/// Exact Stirling number of the second kind `S(m, t)`.
pub fn stirling2(m: u64, t: u64) -> u128 {
    if t > m {
        return 0;
    }
    if m == 0 {
        return 1; // S(0, 0)
    }
    if t == 0 {
        return 0;
    }
    let mut prev = vec![0u128; t as usize + 1];
    prev[0] = 1;
    for _i in 1..=m {
        let mut cur = vec![0u128; t as usize + 1];
        for j in 1..=(t as usize) {
            cur[j] = prev[j - 1] + prev[j] * j as u128;
        }
        prev = cur;
        prev[0] = 0;
    }
    prev[t as usize]
}

pub fn factorial(t: u64) -> u128 {
    (1..=t as u128).product()
}

/// Double factorial `(r-1)!!` counting perfect matchings on `[r]`.
pub fn double_factorial_odd(r_minus_1: u64) -> u128 {
    let mut acc: u128 = 1;
    let mut v = r_minus_1 as i64;
    while v > 1 {
        acc *= v as u128;
        v -= 2;
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-m+1)` as a float (count of ordered
/// distinct tuples).
pub fn falling_factorial(n: f64, m: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..m {
        acc *= n - i as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_edge_and_vertex_sets() {
        // figure-style walk: 5 -> 1 -> 2 -> 1 -> 3 -> 4 -> 3 -> 1 -> 5
        // (0-based: 4 -> 0 -> 1 -> 0 -> 2 -> 3 -> 2 -> 0 -> 4)
        let w = Walk::new(vec![4, 0, 1, 0, 2, 3, 2, 0, 4]).unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(w.unique_edges(), vec![(0, 1), (0, 2), (0, 4), (2, 3)]);
        assert_eq!(w.vertex_set(), vec![0, 1, 2, 3, 4]);
        assert_eq!(w.endpoint(), 4);
        assert!(w.is_tree());
    }

    #[test]
    fn walk_with_cycle_is_not_tree() {
        // 5 -> 1 -> 3 -> 1 -> 5 -> 3 -> 5 (0-based: 4,0,2,0,4,2,4)
        let w = Walk::new(vec![4, 0, 2, 0, 4, 2, 4]).unwrap();
        assert_eq!(w.unique_edges().len(), 3);
        assert_eq!(w.vertex_set().len(), 3);
        assert!(!w.is_tree());
    }

    #[test]
    fn walk_rejects_self_loop_steps() {
        assert!(Walk::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn gamma_partition_of_three_matched_pairs() {
        // the r = 6, k = 3 sequence from the worked example (1-based in the
        // source, 0-based here)
        let seq = WalkSequence::new(vec![
            Walk::new(vec![0, 1, 2, 4]).unwrap(),
            Walk::new(vec![0, 1, 3, 5]).unwrap(),
            Walk::new(vec![0, 6, 8, 10]).unwrap(),
            Walk::new(vec![0, 6, 7, 9]).unwrap(),
            Walk::new(vec![0, 11, 12, 14]).unwrap(),
            Walk::new(vec![0, 11, 13, 15]).unwrap(),
        ])
        .unwrap();
        let gamma = seq.gamma();
        assert!(gamma.overlapping);
        assert_eq!(gamma.components, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        // core-star endpoints j(Gamma_q) = (1, 6, 11) in 0-based labels
        let firsts: Vec<u32> = gamma
            .components
            .iter()
            .map(|c| seq.walks()[c[0]].vertices()[1])
            .collect();
        assert_eq!(firsts, vec![1, 6, 11]);
        assert_eq!(seq.unique_edges().len(), 15);
        assert_eq!(seq.vertex_set().len(), 16);
    }

    #[test]
    fn gamma_partition_disjoint_and_identical() {
        let disjoint = WalkSequence::new(vec![
            Walk::new(vec![0, 1, 2]).unwrap(),
            Walk::new(vec![0, 3, 4]).unwrap(),
        ])
        .unwrap();
        let g = disjoint.gamma();
        assert_eq!(g.components, vec![vec![0], vec![1]]);
        assert!(!g.overlapping);

        let same = WalkSequence::new(vec![
            Walk::new(vec![0, 1, 2]).unwrap(),
            Walk::new(vec![0, 1, 2]).unwrap(),
            Walk::new(vec![0, 1, 2]).unwrap(),
        ])
        .unwrap();
        let g = same.gamma();
        assert_eq!(g.components, vec![vec![0, 1, 2]]);
        assert!(g.overlapping);
    }

    #[test]
    fn combinatorial_numbers() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(1), 1);
        assert_eq!(catalan(2), 2);
        assert_eq!(catalan(3), 5);
        assert_eq!(stirling2(0, 0), 1);
        assert_eq!(stirling2(3, 2), 3);
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(5, 3), 25);
        assert_eq!(double_factorial_odd(1), 1);
        assert_eq!(double_factorial_odd(3), 3);
        assert_eq!(double_factorial_odd(5), 15);
        assert_eq!(factorial(5), 120);
    }
}
