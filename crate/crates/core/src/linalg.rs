//! Sparse and blocked linear algebra.
//!
//! Adjacency powers are never materialized: `A^k` acts on `n x d` panels or
//! single vectors. Operator norms come from power iteration on the squared
//! operator (monotone from below), except where a block structure gives an
//! exact `L x L` reduction.

use nalgebra::DMatrix;
use ndarray::Array2;
use rayon::prelude::*;

use crate::csbm::{ExpectedAdjacency, LabelAssignment, ModelSpec, SparseGraph};
use crate::rng::{RngFactory, StreamPurpose};
use crate::{csbm, Error, Result};

/// Result of an iterative operator-norm computation.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OpNormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Symmetric linear operator on `R^n`.
pub trait SymOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

impl SymOp for SparseGraph {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n() {
            let mut acc = 0.0;
            for &j in self.neighbors(i) {
                acc += x[j as usize];
            }
            out[i] = acc;
        }
    }
}

/// `E[A]` as an operator.
pub struct EaOp<'a>(pub &'a ExpectedAdjacency);

impl SymOp for EaOp<'_> {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.0.apply(x, out);
    }
}

/// `E[A]^k - P^k` as an operator.
pub struct PowerDiffOp<'a> {
    pub ea: &'a ExpectedAdjacency,
    pub k: usize,
}

impl SymOp for PowerDiffOp<'_> {
    fn dim(&self) -> usize {
        self.ea.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut a = x.to_vec();
        self.ea.pow_apply(&mut a, self.k);
        let mut p = x.to_vec();
        self.ea.pow_apply_p(&mut p, self.k);
        for ((o, a), p) in out.iter_mut().zip(&a).zip(&p) {
            *o = a - p;
        }
    }
}

/// `A^k - E[A]^k` as an operator.
pub struct CenteredPowerOp<'a> {
    pub graph: &'a SparseGraph,
    pub ea: &'a ExpectedAdjacency,
    pub k: usize,
}

impl SymOp for CenteredPowerOp<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut a = x.to_vec();
        let mut buf = vec![0.0; x.len()];
        for _ in 0..self.k {
            self.graph.apply(&a, &mut buf);
            std::mem::swap(&mut a, &mut buf);
        }
        let mut e = x.to_vec();
        self.ea.pow_apply(&mut e, self.k);
        for ((o, a), e) in out.iter_mut().zip(&a).zip(&e) {
            *o = a - e;
        }
    }
}

/// Dense symmetric matrix as an operator.
pub struct DenseSymOp<'a>(pub &'a DMatrix<f64>);

impl SymOp for DenseSymOp<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.0.nrows();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.0[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    }
}

/// Scalar multiple of another operator.
pub struct ScaledOp<'a, O: SymOp> {
    pub inner: &'a O,
    pub scale: f64,
}

impl<O: SymOp> SymOp for ScaledOp<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.inner.apply(x, out);
        for o in out.iter_mut() {
            *o *= self.scale;
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn start_vector(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| 0.5 + (splitmix64(i as u64) % 1024) as f64 / 1024.0)
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

pub const OPNORM_TOL: f64 = 1e-8;
pub const OPNORM_MAX_ITER: usize = 10_000;

/// Largest absolute eigenvalue of a symmetric operator by power iteration
/// on `H^2`. The estimate increases monotonically, so the residual is a
/// one-sided relative error.
pub fn opnorm_sym<O: SymOp + ?Sized>(op: &O, tol: f64, max_iter: usize) -> OpNormEstimate {
    let n = op.dim();
    if n == 0 {
        return OpNormEstimate { value: 0.0, iterations: 0, residual: 0.0, converged: true };
    }
    let mut v = start_vector(n);
    let mut w = vec![0.0; n];
    let mut estimate = 0.0f64;
    for it in 1..=max_iter {
        op.apply(&v, &mut w);
        let norm1 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm1 == 0.0 {
            return OpNormEstimate { value: 0.0, iterations: it, residual: 0.0, converged: true };
        }
        for x in &mut w {
            *x /= norm1;
        }
        op.apply(&w, &mut v);
        let norm2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm2 == 0.0 {
            return OpNormEstimate { value: norm1, iterations: it, residual: 0.0, converged: true };
        }
        for x in &mut v {
            *x /= norm2;
        }
        let new_estimate = (norm1 * norm2).sqrt();
        let residual = (new_estimate - estimate).abs() / new_estimate.max(f64::MIN_POSITIVE);
        estimate = new_estimate.max(estimate);
        if residual <= tol {
            return OpNormEstimate { value: estimate, iterations: it, residual, converged: true };
        }
    }
    OpNormEstimate {
        value: estimate,
        iterations: max_iter,
        residual: f64::NAN,
        converged: false,
    }
}

/// Operator norm (largest singular value) of a dense matrix.
pub fn opnorm_dense(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Exact `|P|` via the reduced `L x L` matrix.
pub fn opnorm_p_exact(ea: &ExpectedAdjacency) -> f64 {
    let reduced = ea.reduced_p();
    reduced
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Exact `|E[A]|`. On class-constant vectors `E[A]` acts through the
/// symmetrized `L x L` matrix `N^{1/2} B N^{1/2} - diag(B_ll)`; on the
/// orthogonal complement it is `-diag(B_{y_i y_i})`.
pub fn opnorm_ea_exact(spec: &ModelSpec, labels: &LabelAssignment) -> f64 {
    let l = spec.l;
    let mut reduced = DMatrix::zeros(l, l);
    for a in 0..l {
        for c in 0..l {
            reduced[(a, c)] = (labels.counts[a] as f64).sqrt()
                * spec.b[(a, c)]
                * (labels.counts[c] as f64).sqrt();
        }
        reduced[(a, a)] -= spec.b[(a, a)];
    }
    let block_part = reduced
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let diag_part = (0..l)
        .filter(|&c| labels.counts[c] > 1)
        .fold(0.0f64, |acc, c| acc.max(spec.b[(c, c)]));
    block_part.max(diag_part)
}

/// `phi = A^k X` by `k` sparse-times-dense products; `k = 0` returns `X`.
pub fn aggregate_power(graph: &SparseGraph, x: &Array2<f64>, k: usize) -> Result<Array2<f64>> {
    let (n, d) = x.dim();
    if n != graph.n() {
        return Err(Error::DimensionMismatch(format!(
            "X has {n} rows, graph has {} nodes",
            graph.n()
        )));
    }
    let mut cur = x.to_owned();
    if k == 0 {
        return Ok(cur);
    }
    let mut next = Array2::zeros((n, d));
    for _ in 0..k {
        spmm(graph, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// `out = A * x` row-parallel; summation order within a row is the CSR
/// neighbor order, so results do not depend on the thread count.
fn spmm(graph: &SparseGraph, x: &Array2<f64>, out: &mut Array2<f64>) {
    let d = x.ncols();
    let xs = x.as_slice().expect("standard layout");
    let os = out.as_slice_mut().expect("standard layout");
    os.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
        row.fill(0.0);
        for &j in graph.neighbors(i) {
            let src = &xs[j as usize * d..(j as usize + 1) * d];
            for (r, s) in row.iter_mut().zip(src) {
                *r += s;
            }
        }
    });
}

/// Row `i` of `A^k` via `k` matvecs on the basis vector.
pub fn adjacency_power_row(graph: &SparseGraph, k: usize, i: usize) -> Vec<f64> {
    let n = graph.n();
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    let mut buf = vec![0.0; n];
    for _ in 0..k {
        graph.apply(&v, &mut buf);
        std::mem::swap(&mut v, &mut buf);
    }
    v
}

/// Row `i` of `E[A]^k` via the block operator.
pub fn expected_power_row(ea: &ExpectedAdjacency, k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; ea.n()];
    v[i] = 1.0;
    ea.pow_apply(&mut v, k);
    v
}

/// Record of a single two-sided inequality check.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct InequalityRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl InequalityRecord {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        InequalityRecord { lhs, rhs, margin: rhs - lhs, holds: lhs <= rhs }
    }
}

/// Both matrix-monomial deviation bounds evaluated on a concrete pair.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MonomialDeviationRecord {
    pub lhs: f64,
    pub split_form: InequalityRecord,
    pub max_form: InequalityRecord,
}

/// Check `|U^k - V^k|` against its two closed-form bounds.
pub fn check_monomial_deviation(
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    k: usize,
) -> Result<MonomialDeviationRecord> {
    if u.nrows() != u.ncols() || u.shape() != v.shape() {
        return Err(Error::DimensionMismatch("U, V must be square and same shape".into()));
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let uk = matrix_power(u, k);
    let vk = matrix_power(v, k);
    let lhs = opnorm_dense(&(uk - vk));
    let diff = opnorm_dense(&(u - v));
    let norm_u = opnorm_dense(u);
    let norm_v = opnorm_dense(v);
    let kf = k as f64;
    let rhs_split =
        kf * 2f64.powi(k as i32 - 2) * diff * (diff.powi(k as i32 - 1) + norm_v.powi(k as i32 - 1));
    let rhs_max = kf * diff * norm_u.max(norm_v).powi(k as i32 - 1);
    Ok(MonomialDeviationRecord {
        lhs,
        split_form: InequalityRecord::new(lhs, rhs_split),
        max_form: InequalityRecord::new(lhs, rhs_max),
    })
}

pub fn matrix_power(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Deterministic check `|E[A]^k - P^k| <= k nu_n^k / n`.
pub fn check_eak_pk(spec: &ModelSpec, labels: &LabelAssignment, k: usize) -> InequalityRecord {
    let ea = ExpectedAdjacency::new(spec, labels);
    let op = PowerDiffOp { ea: &ea, k };
    let lhs = opnorm_sym(&op, OPNORM_TOL, OPNORM_MAX_ITER).value;
    let bound = k as f64 * spec.nu_n().powi(k as i32) / spec.n as f64;
    InequalityRecord::new(lhs, bound)
}

/// The depth-dependent constant in the spectral concentration bound.
pub fn c_k_constant(k: usize, big_c: f64, small_c: f64, c_nu_prime: f64) -> f64 {
    let kf = k as f64;
    kf * 2f64.powi(k as i32) * (big_c + ((small_c / c_nu_prime) * (kf + 1.0)).sqrt()).powi(k as i32)
}

/// Monte Carlo summary of `E |A^k - E[A]^k|`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConcentrationRecord {
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `C_k nu^{k-1/2}` with the configured universal constants.
    pub bound: f64,
    /// `mean / nu^{k-1/2}`; boundedness of this ratio in `n` is the
    /// meaningful check, not the constant itself.
    pub ratio: f64,
    pub per_trial: Vec<f64>,
}

/// Estimate `E |A^k - E[A]^k|` over independent graph draws.
///
/// `opnorm_tol` trades solver effort against the Monte Carlo error, which
/// dominates well before `1e-8`.
#[allow(clippy::too_many_arguments)]
pub fn mc_ak_concentration(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    k: usize,
    trials: usize,
    master_seed: u64,
    big_c: f64,
    small_c: f64,
    c_nu_prime: f64,
    opnorm_tol: f64,
) -> ConcentrationRecord {
    let ea = ExpectedAdjacency::new(spec, labels);
    let factory = RngFactory::new(master_seed);
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = factory.stream(StreamPurpose::Graph, t as u64);
            let graph = csbm::sample_graph(spec, labels, &mut rng);
            let op = CenteredPowerOp { graph: &graph, ea: &ea, k };
            opnorm_sym(&op, opnorm_tol, OPNORM_MAX_ITER).value
        })
        .collect();
    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let var = per_trial.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (trials.saturating_sub(1).max(1)) as f64;
    let std_error = (var / trials as f64).sqrt();
    let nu = spec.nu_n();
    let rate = nu.powf(k as f64 - 0.5);
    ConcentrationRecord {
        trials,
        mean,
        std_error,
        bound: c_k_constant(k, big_c, small_c, c_nu_prime) * rate,
        ratio: mean / rate,
        per_trial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csbm::{assign_labels, sample_graph_seeded, AssumptionConfig};
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;

    fn two_class(n: usize, p: f64, q: f64, k: usize) -> (ModelSpec, LabelAssignment) {
        let spec = ModelSpec {
            n,
            d: 1,
            l: 2,
            b: array![[p, q], [q, p]],
            pi: array![0.5, 0.5],
            mu: array![[1.0, -1.0]],
            sigma: 1.0,
            k,
        };
        let labels = assign_labels(&spec).unwrap();
        (spec, labels)
    }

    #[test]
    fn aggregate_power_k0_is_identity() {
        let (spec, labels) = two_class(10, 0.5, 0.2, 1);
        let g = sample_graph_seeded(&spec, &labels, 1, 0);
        let x = Array2::from_shape_fn((10, 3), |(i, j)| (i * 3 + j) as f64);
        let y = aggregate_power(&g, &x, 0).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn aggregate_power_triangle() {
        // complete graph on 3 nodes, X = I: A X = J - I
        let g = SparseGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let x = Array2::eye(3);
        let y = aggregate_power(&g, &x, 1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.0 } else { 1.0 };
                assert_eq!(y[(i, j)], want);
            }
        }
    }

    #[test]
    fn aggregate_power_matches_dense_oracle() {
        let (spec, labels) = two_class(50, 0.4, 0.2, 1);
        let g = sample_graph_seeded(&spec, &labels, 2, 0);
        let mut rng = RngFactory::new(5).stream(StreamPurpose::Scratch, 0);
        let x = Array2::from_shape_fn((50, 4), |_| rng.random::<f64>() - 0.5);
        let fast = aggregate_power(&g, &x, 3).unwrap();
        // dense oracle
        let a = DMatrix::from_fn(50, 50, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
        let xd = DMatrix::from_fn(50, 4, |i, j| x[(i, j)]);
        let dense = &a * &a * &a * xd;
        for i in 0..50 {
            for j in 0..4 {
                assert_abs_diff_eq!(fast[(i, j)], dense[(i, j)], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn aggregate_power_composes() {
        let (spec, labels) = two_class(40, 0.3, 0.1, 1);
        let g = sample_graph_seeded(&spec, &labels, 3, 0);
        let mut rng = RngFactory::new(6).stream(StreamPurpose::Scratch, 0);
        let x = Array2::from_shape_fn((40, 2), |_| rng.random::<f64>());
        let once = aggregate_power(&g, &x, 5).unwrap();
        let twice = aggregate_power(&g, &aggregate_power(&g, &x, 2).unwrap(), 3).unwrap();
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn power_rows_count_common_neighbors() {
        let (spec, labels) = two_class(30, 0.5, 0.3, 1);
        let g = sample_graph_seeded(&spec, &labels, 4, 0);
        for i in [0usize, 7, 29] {
            let row = adjacency_power_row(&g, 2, i);
            // diagonal of A^2 is the degree
            assert_abs_diff_eq!(row[i], g.degree(i) as f64);
            for j in 0..30 {
                if i == j {
                    continue;
                }
                let common = g
                    .neighbors(i)
                    .iter()
                    .filter(|&&v| g.has_edge(v as usize, j))
                    .count();
                assert_abs_diff_eq!(row[j], common as f64);
            }
        }
    }

    #[test]
    fn expected_power_row_erdos_renyi() {
        let (spec, labels) = two_class(12, 0.25, 0.25, 1);
        let ea = ExpectedAdjacency::new(&spec, &labels);
        let row = expected_power_row(&ea, 1, 3);
        for (j, &v) in row.iter().enumerate() {
            let want = if j == 3 { 0.0 } else { 0.25 };
            assert_abs_diff_eq!(v, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn opnorm_identity() {
        let id = DMatrix::identity(6, 6);
        let est = opnorm_sym(&DenseSymOp(&id), 1e-10, 100);
        assert!(est.converged);
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(opnorm_dense(&id), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn opnorm_p_reduction_matches_dense_eigensolver() {
        let spec = ModelSpec {
            n: 100,
            d: 1,
            l: 2,
            b: array![[0.3, 0.1], [0.1, 0.2]],
            pi: array![0.5, 0.5],
            mu: array![[1.0, -1.0]],
            sigma: 1.0,
            k: 1,
        };
        let labels = assign_labels(&spec).unwrap();
        let ea = ExpectedAdjacency::new(&spec, &labels);
        let exact = opnorm_p_exact(&ea);
        let dense = ea.to_dense_p();
        let oracle = dense
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        assert_abs_diff_eq!(exact, oracle, epsilon = 1e-9);
    }

    #[test]
    fn opnorm_ea_reduction_matches_dense() {
        for (p, q, n) in [(0.3, 0.1, 60), (0.9, 0.05, 41), (0.2, 0.2, 30)] {
            let (spec, labels) = two_class(n, p, q, 1);
            let exact = opnorm_ea_exact(&spec, &labels);
            let ea = ExpectedAdjacency::new(&spec, &labels);
            let oracle = ea
                .to_dense()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(0.0f64, |a, &v| a.max(v.abs()));
            assert_abs_diff_eq!(exact, oracle, epsilon = 1e-9);
            // |E[A]| <= n p_max = nu_n
            assert!(exact <= spec.nu_n() + 1e-9);
        }
    }

    #[test]
    fn opnorm_scale_consistency() {
        let (spec, labels) = two_class(50, 0.4, 0.1, 1);
        let g = sample_graph_seeded(&spec, &labels, 9, 0);
        let base = opnorm_sym(&g, 1e-10, 10_000).value;
        for c in [2.0, 1.0 / 3.0] {
            let scaled = ScaledOp { inner: &g, scale: c };
            let v = opnorm_sym(&scaled, 1e-10, 10_000).value;
            assert_abs_diff_eq!(v, c.abs() * base, epsilon = 1e-6 * base);
        }
    }

    #[test]
    fn monomial_deviation_equal_inputs() {
        let m = DMatrix::from_fn(8, 8, |i, j| ((i + 2 * j) % 5) as f64 / 5.0);
        let sym = (&m + m.transpose()) * 0.5;
        let rec = check_monomial_deviation(&sym, &sym, 3).unwrap();
        assert!(rec.lhs < 1e-12);
        assert!(rec.split_form.holds && rec.max_form.holds);
    }

    #[test]
    fn monomial_deviation_scalar_case() {
        // U = 2I, V = I, k = 2: LHS 3, max-form RHS 4
        let u = DMatrix::identity(4, 4) * 2.0;
        let v = DMatrix::identity(4, 4);
        let rec = check_monomial_deviation(&u, &v, 2).unwrap();
        assert_abs_diff_eq!(rec.lhs, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rec.max_form.rhs, 4.0, epsilon = 1e-12);
        assert!(rec.max_form.holds);
    }

    #[test]
    fn monomial_deviation_random_pairs() {
        let mut rng = RngFactory::new(11).stream(StreamPurpose::Scratch, 0);
        for trial in 0..100 {
            let k = 2 + trial % 3;
            let u = DMatrix::from_fn(20, 20, |_, _| rng.random::<f64>() - 0.5);
            let v = DMatrix::from_fn(20, 20, |_, _| rng.random::<f64>() - 0.5);
            let rec = check_monomial_deviation(&u, &v, k).unwrap();
            assert!(rec.split_form.holds, "split form failed at trial {trial}");
            assert!(rec.max_form.holds, "max form failed at trial {trial}");
        }
    }

    #[test]
    fn eak_pk_bound_k1_is_diagonal() {
        let (spec, labels) = two_class(40, 0.5, 0.2, 1);
        let rec = check_eak_pk(&spec, &labels, 1);
        // E[A] - P = -diag(P): norm p_max, bound nu/n = p_max
        assert_abs_diff_eq!(rec.lhs, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(rec.rhs, 0.5, epsilon = 1e-12);
        assert!(rec.lhs <= rec.rhs + 1e-7);
    }

    #[test]
    fn eak_pk_bound_holds_at_depth() {
        let (spec, labels) = two_class(200, 0.1, 0.05, 3);
        let rec = check_eak_pk(&spec, &labels, 3);
        assert!(rec.holds);
        assert_abs_diff_eq!(rec.rhs, ((3 * 20 * 20 * 20 * 20) as f64) / 200.0 * 0.05, epsilon = 1e-9);
        // bound = 3 * 20^3 / 200 = 120
        assert_abs_diff_eq!(rec.rhs, 120.0, epsilon = 1e-9);
    }

    #[test]
    fn eak_pk_block_matches_dense() {
        let (spec, labels) = two_class(60, 0.3, 0.3, 2);
        let rec = check_eak_pk(&spec, &labels, 2);
        let ea = ExpectedAdjacency::new(&spec, &labels);
        let dense_diff = matrix_power(&ea.to_dense(), 2) - matrix_power(&ea.to_dense_p(), 2);
        let oracle = opnorm_dense(&dense_diff);
        assert_abs_diff_eq!(rec.lhs, oracle, epsilon = 1e-7 * oracle.max(1.0));
    }

    #[test]
    fn concentration_deterministic_edges() {
        // p = 1 everywhere: A is deterministic, only diag(P) separates
        // A^k from E[A]^k
        let (spec, labels) = two_class(30, 1.0, 1.0, 2);
        let rec = mc_ak_concentration(&spec, &labels, 2, 3, 13, 3.0, 1.0, 1.0, 1e-8);
        let nu = spec.nu_n();
        assert!(rec.ratio < 0.2, "ratio {} too large", rec.ratio);
        assert!(rec.mean < 3.0 * nu, "mean {} implausible", rec.mean);
        assert!(check_assumptions(&spec, &labels, &AssumptionConfig::default()).c_xi == 0.0);
    }

    #[test]
    fn concentration_k1_classical_rate() {
        let (spec, labels) = two_class(400, 0.1, 0.1, 1);
        let rec = mc_ak_concentration(&spec, &labels, 1, 10, 29, 3.0, 1.0, 1.0, 1e-6);
        // |A - E[A]| should be a small multiple of sqrt(nu) = sqrt(40)
        assert!(rec.ratio > 0.5 && rec.ratio < 10.0, "ratio {}", rec.ratio);
        assert!(rec.mean <= rec.bound, "mean {} above bound {}", rec.mean, rec.bound);
    }

    use crate::csbm::check_assumptions;
}
