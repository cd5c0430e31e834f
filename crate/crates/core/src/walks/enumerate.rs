//! Exhaustive walk enumeration and the exact counting operations built on
//! top of it.

use rayon::prelude::*;
use std::collections::BTreeMap;

use super::{binomial, catalan, factorial, stirling2, Walk};
use crate::csbm::{LabelAssignment, ModelSpec};
use crate::{Error, Result};

/// Which walks to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkMode {
    /// Walks from `i` to `j`, `i != j`.
    Between(u32, u32),
    /// Closed walks from `i` back to `i`.
    Closed(u32),
    /// All walks starting at `i`.
    Rooted(u32),
}

impl WalkMode {
    fn root(&self) -> u32 {
        match *self {
            WalkMode::Between(i, _) | WalkMode::Closed(i) | WalkMode::Rooted(i) => i,
        }
    }

    fn forced_endpoint(&self) -> Option<u32> {
        match *self {
            WalkMode::Between(_, j) => Some(j),
            WalkMode::Closed(i) => Some(i),
            WalkMode::Rooted(_) => None,
        }
    }
}

/// Incremental view of the walk being enumerated. `unique_edges` is in
/// first-traversal order, not sorted.
pub struct WalkView<'a> {
    pub vertices: &'a [u32],
    pub unique_edges: &'a [(u32, u32)],
    pub distinct_vertices: usize,
}

/// Depth-first enumeration in lexicographic vertex order, visiting each
/// walk exactly once. `O(k)` state; no walk materialization.
pub fn for_each_walk(n: usize, k: usize, mode: WalkMode, mut f: impl FnMut(&WalkView)) {
    assert!(n >= 2 && k >= 1, "need n >= 2 and k >= 1");
    let root = mode.root();
    assert!((root as usize) < n, "root out of range");
    if let WalkMode::Between(i, j) = mode {
        assert!(i != j, "between-mode endpoints must differ");
    }

    let mut vertices: Vec<u32> = vec![root];
    // parallel stacks: unique edges in insertion order, multiplicity per
    // edge, and per-vertex visit counts for the distinct-vertex tally
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(k);
    let mut edge_mult: Vec<u32> = Vec::with_capacity(k);
    let mut vertex_count: Vec<u32> = vec![0; n];
    vertex_count[root as usize] = 1;
    let mut distinct = 1usize;

    struct Frame {
        new_edge: bool,
        new_vertex: bool,
    }
    let mut frames: Vec<Frame> = Vec::with_capacity(k);

    // explicit DFS over the choice at each depth
    let mut choice: Vec<u32> = vec![0; k + 1];
    let mut depth = 1usize;
    'outer: loop {
        // find the next valid vertex at this depth, starting at choice[depth]
        let prev = vertices[depth - 1];
        let mut v = choice[depth];
        let valid = loop {
            if v as usize >= n {
                break None;
            }
            if v == prev {
                v += 1;
                continue;
            }
            if depth == k {
                if let Some(j) = mode.forced_endpoint() {
                    if v < j {
                        v = j;
                        continue;
                    }
                    if v > j {
                        break None;
                    }
                }
            }
            break Some(v);
        };
        match valid {
            Some(v) => {
                // push the step
                let e = (prev.min(v), prev.max(v));
                let new_edge = match edges.iter().rposition(|&x| x == e) {
                    Some(idx) => {
                        edge_mult[idx] += 1;
                        false
                    }
                    None => {
                        edges.push(e);
                        edge_mult.push(1);
                        true
                    }
                };
                let new_vertex = vertex_count[v as usize] == 0;
                vertex_count[v as usize] += 1;
                if new_vertex {
                    distinct += 1;
                }
                frames.push(Frame { new_edge, new_vertex });
                vertices.push(v);
                choice[depth] = v + 1;
                if depth == k {
                    f(&WalkView {
                        vertices: &vertices,
                        unique_edges: &edges,
                        distinct_vertices: distinct,
                    });
                    // pop immediately
                    pop_step(&mut vertices, &mut edges, &mut edge_mult, &mut vertex_count, &mut distinct, &mut frames);
                } else {
                    depth += 1;
                    choice[depth] = 0;
                }
            }
            None => {
                // exhausted this depth; backtrack
                if depth == 1 {
                    break 'outer;
                }
                depth -= 1;
                pop_step(&mut vertices, &mut edges, &mut edge_mult, &mut vertex_count, &mut distinct, &mut frames);
            }
        }
    }

    fn pop_step(
        vertices: &mut Vec<u32>,
        edges: &mut Vec<(u32, u32)>,
        edge_mult: &mut Vec<u32>,
        vertex_count: &mut [u32],
        distinct: &mut usize,
        frames: &mut Vec<Frame>,
    ) {
        let v = vertices.pop().unwrap();
        let frame = frames.pop().unwrap();
        vertex_count[v as usize] -= 1;
        if frame.new_vertex {
            *distinct -= 1;
        }
        if frame.new_edge {
            edges.pop();
            edge_mult.pop();
        } else {
            let prev = *vertices.last().unwrap();
            let e = (prev.min(v), prev.max(v));
            let idx = edges.iter().rposition(|&x| x == e).unwrap();
            edge_mult[idx] -= 1;
            debug_assert!(edge_mult[idx] > 0);
        }
    }
}

/// Iterator form of the enumeration, for callers that want a stream of
/// owned walks.
pub fn enumerate_walks(n: usize, k: usize, mode: WalkMode) -> impl Iterator<Item = Walk> {
    // The visitor is the fast path; the iterator buffers one DFS layer at a
    // time would complicate things for no gain at oracle scale, so collect
    // lazily by chunking on the first step.
    let root = mode.root();
    let first_steps: Vec<u32> = (0..n as u32).filter(|&v| v != root).collect();
    first_steps.into_iter().flat_map(move |first| {
        let mut out: Vec<Walk> = Vec::new();
        if k == 1 {
            let ok = match mode.forced_endpoint() {
                Some(j) => first == j,
                None => true,
            };
            if ok {
                out.push(Walk::new(vec![root, first]).unwrap());
            }
        } else {
            let sub_mode = match mode {
                WalkMode::Between(_, j) => {
                    if first == j && k == 1 {
                        unreachable!()
                    } else {
                        WalkMode::Between(first, j)
                    }
                }
                WalkMode::Closed(i) => WalkMode::Between(first, i),
                WalkMode::Rooted(_) => WalkMode::Rooted(first),
            };
            // guard against Between with equal endpoints: those are closed
            let sub_mode = match sub_mode {
                WalkMode::Between(a, b) if a == b => WalkMode::Closed(a),
                other => other,
            };
            for_each_walk(n, k - 1, sub_mode, |view| {
                let mut vs = Vec::with_capacity(k + 1);
                vs.push(root);
                vs.extend_from_slice(view.vertices);
                out.push(Walk::new(vs).unwrap());
            });
        }
        out.into_iter()
    })
}

/// Enumeration guard for the brute-force expected-power oracle.
#[derive(Debug, Clone, Copy)]
pub struct EnumGuard {
    pub max_n: usize,
    pub max_k: usize,
    pub max_steps: u128,
}

impl Default for EnumGuard {
    fn default() -> Self {
        EnumGuard { max_n: 60, max_k: 4, max_steps: 100_000_000 }
    }
}

impl EnumGuard {
    pub fn admit_walks(&self, n: usize, k: usize) -> Result<()> {
        if n > self.max_n || k > self.max_k {
            return Err(Error::GuardExceeded(format!(
                "walk oracle guard: n = {n} (max {}), k = {k} (max {})",
                self.max_n, self.max_k
            )));
        }
        let steps = ((n - 1) as u128).pow(k as u32) * n as u128;
        if steps > self.max_steps {
            return Err(Error::GuardExceeded(format!(
                "walk oracle guard: ~{steps} enumeration steps exceed {}",
                self.max_steps
            )));
        }
        Ok(())
    }
}

/// Exact count with its closed-form ceiling.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CountRecord {
    pub count: u64,
    pub bound: u128,
    pub holds: bool,
}

/// Exact `|N_t(i, j)|` for `i != j`, with the ceiling
/// `binom(n-2, t-1) t^{k-1}`.
pub fn count_nt(n: usize, k: usize, i: u32, j: u32, t: usize) -> Result<CountRecord> {
    if i == j {
        return Err(Error::Domain("count_nt needs distinct endpoints".into()));
    }
    if t == 0 || t > k {
        return Err(Error::Domain(format!("t = {t} outside 1..=k")));
    }
    let mut count = 0u64;
    for_each_walk(n, k, WalkMode::Between(i, j), |view| {
        if view.unique_edges.len() == t {
            count += 1;
        }
    });
    let bound = binomial(n as u64 - 2, t as u64 - 1) * (t as u128).pow(k as u32 - 1);
    Ok(CountRecord { count, bound, holds: (count as u128) <= bound })
}

/// Exact closed-walk counts at `(k, t)` split into looped (`G(w)` has a
/// cycle) and loopless (`G(w)` a tree) classes, with all three ceilings.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClosedCountRecord {
    pub looped: u64,
    pub loopless: u64,
    pub looped_bound: u128,
    /// `C_t binom(n-1, t) t! S(k/2, t)`; only for even `k`.
    pub loopless_bound: Option<u128>,
    /// Whether the loopless bound is attained exactly (guaranteed at
    /// `k = 2t`).
    pub loopless_equality: Option<bool>,
    /// `(2 e^2 n)^t t^{k/2 - t - 1}` evaluated as a float.
    pub crude_bound: f64,
    pub holds: bool,
}

/// Count closed `k`-walks at `i` with `t` unique edges.
pub fn count_closed(n: usize, k: usize, i: u32, t: usize) -> Result<ClosedCountRecord> {
    if k < 2 {
        return Err(Error::Domain("closed walks need k >= 2".into()));
    }
    if t == 0 || t > k {
        return Err(Error::Domain(format!("t = {t} outside 1..=k")));
    }
    let mut looped = 0u64;
    let mut loopless = 0u64;
    for_each_walk(n, k, WalkMode::Closed(i), |view| {
        if view.unique_edges.len() == t {
            // tree <=> edges = vertices - 1 (the walk graph is connected)
            if view.unique_edges.len() + 1 == view.distinct_vertices {
                loopless += 1;
            } else {
                looped += 1;
            }
        }
    });
    if k % 2 == 1 && loopless > 0 {
        return Err(Error::InternalConsistency(format!(
            "odd k = {k} produced {loopless} loopless closed walks"
        )));
    }
    let looped_bound = binomial(n as u64 - 1, t as u64 - 1) * (t as u128).pow(k as u32 - 1);
    let (loopless_bound, loopless_equality) = if k % 2 == 0 && t <= k / 2 {
        let bound = catalan(t as u64)
            * binomial(n as u64 - 1, t as u64)
            * factorial(t as u64)
            * stirling2(k as u64 / 2, t as u64);
        (Some(bound), Some(loopless as u128 == bound))
    } else {
        (None, None)
    };
    let crude_bound = (2.0 * std::f64::consts::E.powi(2) * n as f64).powi(t as i32)
        * (t as f64).powf(k as f64 / 2.0 - t as f64 - 1.0);
    let mut holds = (looped as u128) <= looped_bound;
    if let Some(b) = loopless_bound {
        holds &= (loopless as u128) <= b;
        holds &= (loopless as f64) <= crude_bound * (1.0 + 1e-12);
    } else {
        holds &= loopless == 0 || k % 2 == 0;
    }
    if k == 2 * t {
        if let Some(eq) = loopless_equality {
            holds &= eq;
        }
    }
    Ok(ClosedCountRecord {
        looped,
        loopless,
        looped_bound,
        loopless_bound,
        loopless_equality,
        crude_bound,
        holds,
    })
}

/// Exact `E[A^k]` by brute-force enumeration: entry `(i, j)` sums
/// `prod_{e in [w]} p_e` over all `k`-walks from `i` to `j`.
///
/// Rows are enumerated independently in parallel; each row's accumulation
/// order is the DFS order, so results are reproducible.
pub fn exact_eak(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    k: usize,
    guard: &EnumGuard,
) -> Result<nalgebra::DMatrix<f64>> {
    let n = spec.n;
    guard.admit_walks(n, k)?;
    let rows: Vec<Vec<f64>> = (0..n as u32)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0f64; n];
            // probability product maintained as a stack to stay exact
            // (no division; zero-probability edges prune the subtree)
            let mut prod_stack: Vec<f64> = Vec::with_capacity(k + 1);
            prod_stack.push(1.0);
            let mut last_edges = 0usize;
            for_each_walk(n, k, WalkMode::Rooted(i), |view| {
                // synchronize the product stack with the current prefix
                let depth = view.vertices.len() - 1;
                prod_stack.truncate(depth);
                while prod_stack.len() < depth + 1 {
                    let t = prod_stack.len(); // next step index
                    let u = view.vertices[t - 1] as usize;
                    let v = view.vertices[t] as usize;
                    let e = (u.min(v) as u32, u.max(v) as u32);
                    // new edge iff it appears exactly once among the first t steps
                    let seen_before = view.vertices[..t]
                        .windows(2)
                        .any(|w| (w[0].min(w[1]), w[0].max(w[1])) == e);
                    let p = if seen_before {
                        1.0
                    } else {
                        spec.b[(labels.y[u] as usize, labels.y[v] as usize)]
                    };
                    let top = *prod_stack.last().unwrap();
                    prod_stack.push(top * p);
                }
                last_edges = view.unique_edges.len();
                row[view.vertices[depth] as usize] += prod_stack[depth];
            });
            row
        })
        .collect();
    let mut out = nalgebra::DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Entrywise and row-aggregate ceilings on `E[A^k]` from the exact oracle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthRecord {
    /// Whether `nu_n >= k e^{2(k-1)}` (the bound's precondition).
    pub applicable: bool,
    pub max_offdiag: f64,
    pub offdiag_bound: f64,
    pub max_diag: f64,
    pub diag_bound: f64,
    pub max_row_aggregate: f64,
    pub row_aggregate_bound: f64,
    pub min_margin: f64,
    pub holds: bool,
}

/// Check `E[A^k]_{ij} <= 2 p_max nu^{k-1} + 2 nu^{k/2} [i = j, k even]`
/// entrywise and the row-aggregate ceiling `4 nu^{k-1/2}`.
pub fn check_akij_growth(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    k: usize,
    guard: &EnumGuard,
) -> Result<GrowthRecord> {
    let eak = exact_eak(spec, labels, k, guard)?;
    let n = spec.n;
    let nu = spec.nu_n();
    let p_max = spec.p_max();
    let applicable = nu >= k as f64 * std::f64::consts::E.powi(2 * (k as i32 - 1));
    let offdiag_bound = 2.0 * p_max * nu.powi(k as i32 - 1);
    let diag_extra = if k % 2 == 0 { 2.0 * nu.powf(k as f64 / 2.0) } else { 0.0 };
    let diag_bound = offdiag_bound + diag_extra;
    let mut max_offdiag = 0.0f64;
    let mut max_diag = 0.0f64;
    let mut max_row = 0.0f64;
    for i in 0..n {
        let mut sq = 0.0;
        for j in 0..n {
            let v = eak[(i, j)];
            sq += v * v;
            if i == j {
                max_diag = max_diag.max(v);
            } else {
                max_offdiag = max_offdiag.max(v);
            }
        }
        max_row = max_row.max(sq.sqrt());
    }
    let row_bound = 4.0 * nu.powf(k as f64 - 0.5);
    let min_margin = (offdiag_bound - max_offdiag)
        .min(diag_bound - max_diag)
        .min(row_bound - max_row);
    Ok(GrowthRecord {
        applicable,
        max_offdiag,
        offdiag_bound,
        max_diag,
        diag_bound,
        max_row_aggregate: max_row,
        row_aggregate_bound: row_bound,
        min_margin,
        holds: min_margin >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csbm::assign_labels;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn rooted_enumeration_counts() {
        // n = 3, k = 1 rooted at node 1 (0-based 0): two walks
        let walks: Vec<Walk> = enumerate_walks(3, 1, WalkMode::Rooted(0)).collect();
        assert_eq!(walks.len(), 2);
        // n = 4, k = 3 rooted: (n-1)^k = 27
        let count = enumerate_walks(4, 3, WalkMode::Rooted(0)).count();
        assert_eq!(count, 27);
    }

    #[test]
    fn enumeration_is_lexicographic_and_unique() {
        let walks: Vec<Vec<u32>> = enumerate_walks(4, 2, WalkMode::Rooted(1))
            .map(|w| w.vertices().to_vec())
            .collect();
        let mut sorted = walks.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(walks, sorted, "lexicographic order, no duplicates");
        assert_eq!(walks.len(), 9);
    }

    #[test]
    fn enumeration_contains_figure_walk() {
        // 5 -> 1 -> 2 -> 1 -> 3 -> 4 -> 3 -> 1 -> 5 with t = 4
        // (0-based: 4 0 1 0 2 3 2 0 4)
        let target = vec![4u32, 0, 1, 0, 2, 3, 2, 0, 4];
        let mut found = false;
        for_each_walk(5, 8, WalkMode::Closed(4), |view| {
            if view.vertices == target.as_slice() {
                assert_eq!(view.unique_edges.len(), 4);
                found = true;
            }
        });
        assert!(found);
    }

    #[test]
    fn figure_walk_w2_is_looped() {
        // 5 -> 1 -> 3 -> 1 -> 5 -> 3 -> 5 (k = 6, t = 3): cycle, not a tree
        let mut classified_looped = false;
        for_each_walk(5, 6, WalkMode::Closed(4), |view| {
            if view.vertices == [4u32, 0, 2, 0, 4, 2, 4] {
                classified_looped = view.unique_edges.len() + 1 != view.distinct_vertices;
            }
        });
        assert!(classified_looped);
    }

    #[test]
    fn count_nt_base_cases() {
        // k = 1, t = 1: the single edge walk, bound 1
        let rec = count_nt(5, 1, 0, 1, 1).unwrap();
        assert_eq!(rec.count, 1);
        assert_eq!(rec.bound, 1);
        // n = 6, k = 2, t = 2: i -> l -> j over l not in {i, j}
        let rec = count_nt(6, 2, 0, 1, 2).unwrap();
        assert_eq!(rec.count, 4);
        assert_eq!(rec.bound, 8);
        assert!(rec.holds);
        // n = 6, k = 3, t = 3 stays under binom(4,2) * 9 = 54
        let rec = count_nt(6, 3, 0, 1, 3).unwrap();
        assert!(rec.count as u128 <= 54);
        assert_eq!(rec.bound, 54);
    }

    #[test]
    fn count_closed_backtrack_walks() {
        // k = 2, t = 1: the n-1 backtrack walks, equality in the formula
        let rec = count_closed(7, 2, 0, 1).unwrap();
        assert_eq!(rec.loopless, 6);
        assert_eq!(rec.looped, 0);
        assert_eq!(rec.loopless_bound, Some(6));
        assert_eq!(rec.loopless_equality, Some(true));
        assert!(rec.holds);
    }

    #[test]
    fn count_closed_k4_t2_equality() {
        // k = 2t: the loopless class attains the formula exactly
        let rec = count_closed(7, 4, 0, 2).unwrap();
        let expect = catalan(2) * binomial(6, 2) * factorial(2) * stirling2(2, 2);
        assert_eq!(expect, 4 * binomial(6, 2));
        assert_eq!(rec.loopless as u128, expect);
        assert_eq!(rec.loopless_equality, Some(true));
    }

    #[test]
    fn count_closed_odd_k_has_no_trees() {
        for t in 1..=3 {
            let rec = count_closed(6, 3, 0, t).unwrap();
            assert_eq!(rec.loopless, 0, "t = {t}");
        }
    }

    #[test]
    fn exact_eak_small_cases() {
        let spec = ModelSpec {
            n: 5,
            d: 1,
            l: 2,
            b: array![[0.3, 0.3], [0.3, 0.3]],
            pi: array![0.6, 0.4],
            mu: array![[1.0, -1.0]],
            sigma: 0.0,
            k: 2,
        };
        let labels = assign_labels(&spec).unwrap();
        let guard = EnumGuard::default();
        // k = 1 reproduces E[A]
        let e1 = exact_eak(&spec, &labels, 1, &guard).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 0.0 } else { 0.3 };
                assert_abs_diff_eq!(e1[(i, j)], want, epsilon = 1e-15);
            }
        }
        // k = 2, i != j: sum over l not in {i,j} of p^2 = 3 p^2
        let e2 = exact_eak(&spec, &labels, 2, &guard).unwrap();
        assert_abs_diff_eq!(e2[(0, 1)], 3.0 * 0.09, epsilon = 1e-14);
        // k = 2 diagonal: expected degree
        assert_abs_diff_eq!(e2[(0, 0)], 4.0 * 0.3, epsilon = 1e-14);
    }

    #[test]
    fn exact_eak_guard_rejects_large_inputs() {
        let spec = ModelSpec {
            n: 61,
            d: 1,
            l: 1,
            b: array![[0.1]],
            pi: array![1.0],
            mu: array![[1.0]],
            sigma: 0.0,
            k: 2,
        };
        let labels = assign_labels(&spec).unwrap();
        assert!(matches!(
            exact_eak(&spec, &labels, 2, &EnumGuard::default()),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn akij_growth_bounds_hold() {
        let spec = ModelSpec {
            n: 50,
            d: 1,
            l: 2,
            b: array![[0.4, 0.3], [0.3, 0.4]],
            pi: array![0.5, 0.5],
            mu: array![[1.0, -1.0]],
            sigma: 0.0,
            k: 2,
        };
        let labels = assign_labels(&spec).unwrap();
        let rec = check_akij_growth(&spec, &labels, 2, &EnumGuard::default()).unwrap();
        assert!(rec.applicable); // nu = 20 >= 2e^2
        assert!(rec.holds, "min margin {}", rec.min_margin);
        // even-k diagonal equals expected degree here, far under the bound
        assert!(rec.max_diag <= spec.nu_n());
    }
}
