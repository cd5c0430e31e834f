//! The contextual stochastic block model: parameters, deterministic label
//! assignment, graph and feature samplers, and assumption checking with
//! explicit constants.
//!
//! A model is `(n, d, L, B, pi, mu, sigma, k)`: `n` nodes split into `L`
//! classes with proportions `pi`, symmetric connectivity matrix `B`
//! driving Bernoulli edges, cluster centers `mu` (one `d`-column per class)
//! driving features `x_i = mu_{y_i} + noise`, and aggregation depth `k`.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng::{RngFactory, StreamPurpose};
use crate::{Error, Result};

/// Full parameter set of a CSBM instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub n: usize,
    pub d: usize,
    pub l: usize,
    /// Symmetric `L x L` connectivity matrix, entries in `[0, 1]`.
    pub b: Array2<f64>,
    /// Class proportions, positive, summing to one.
    pub pi: Array1<f64>,
    /// Cluster centers, `d x L` (column `l` is the center of class `l`).
    pub mu: Array2<f64>,
    /// Sub-Gaussian noise parameter.
    pub sigma: f64,
    /// Aggregation depth.
    pub k: usize,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidModel("n and d must be positive".into()));
        }
        if self.l < 1 {
            return Err(Error::InvalidModel("L must be at least 1".into()));
        }
        if self.b.dim() != (self.l, self.l) {
            return Err(Error::InvalidModel(format!(
                "B must be {l}x{l}, got {:?}",
                self.b.dim(),
                l = self.l
            )));
        }
        if self.mu.dim() != (self.d, self.l) {
            return Err(Error::InvalidModel(format!(
                "mu must be {}x{}, got {:?}",
                self.d,
                self.l,
                self.mu.dim()
            )));
        }
        if self.pi.len() != self.l {
            return Err(Error::InvalidModel("pi length must equal L".into()));
        }
        for ((i, j), &v) in self.b.indexed_iter() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidModel(format!("B[{i}][{j}] = {v} outside [0,1]")));
            }
            if (v - self.b[(j, i)]).abs() > 1e-15 {
                return Err(Error::InvalidModel("B must be symmetric".into()));
            }
        }
        let total: f64 = self.pi.sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("pi sums to {total}, expected 1")));
        }
        if self.pi.iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidModel("every pi entry must be positive".into()));
        }
        if self.sigma < 0.0 {
            return Err(Error::InvalidModel("sigma must be nonnegative".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidModel("k must be positive".into()));
        }
        let nu = self.nu_n();
        if !(nu > 0.0 && nu <= self.n as f64) {
            return Err(Error::InvalidModel(format!("nu_n = {nu} outside (0, n]")));
        }
        Ok(())
    }

    /// Largest edge probability `max B`.
    pub fn p_max(&self) -> f64 {
        self.b.iter().cloned().fold(0.0, f64::max)
    }

    /// Sparsity parameter `nu_n = n * p_max`.
    pub fn nu_n(&self) -> f64 {
        self.n as f64 * self.p_max()
    }

    /// Largest absolute entry of `mu`.
    pub fn mu_max(&self) -> f64 {
        self.mu.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// Sup-norm of row `m` of `mu`.
    pub fn mu_row_inf(&self, m: usize) -> f64 {
        self.mu.row(m).iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(&SpecFile::from(self)).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: SpecFile =
            toml::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        file.into_spec()
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(&SpecFile::from(self))
            .map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: SpecFile =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        file.into_spec()
    }
}

/// On-disk form: `B` row-major, `mu` column-major (a list of cluster
/// centers). Unknown keys are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    n: usize,
    d: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    pi: Vec<f64>,
    mu: Vec<Vec<f64>>,
    sigma: f64,
    k: usize,
}

impl From<&ModelSpec> for SpecFile {
    fn from(s: &ModelSpec) -> Self {
        SpecFile {
            n: s.n,
            d: s.d,
            l: s.l,
            b: (0..s.l).map(|i| s.b.row(i).to_vec()).collect(),
            pi: s.pi.to_vec(),
            mu: (0..s.l).map(|j| s.mu.column(j).to_vec()).collect(),
            sigma: s.sigma,
            k: s.k,
        }
    }
}

impl SpecFile {
    fn into_spec(self) -> Result<ModelSpec> {
        let bad = |msg: &str| Error::Serialization(msg.to_string());
        if self.b.len() != self.l || self.b.iter().any(|r| r.len() != self.l) {
            return Err(bad("B must be an LxL array of rows"));
        }
        if self.mu.len() != self.l || self.mu.iter().any(|c| c.len() != self.d) {
            return Err(bad("mu must be L columns of length d"));
        }
        let mut b = Array2::zeros((self.l, self.l));
        for (i, row) in self.b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                b[(i, j)] = v;
            }
        }
        let mut mu = Array2::zeros((self.d, self.l));
        for (j, col) in self.mu.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                mu[(i, j)] = v;
            }
        }
        let spec = ModelSpec {
            n: self.n,
            d: self.d,
            l: self.l,
            b,
            pi: Array1::from(self.pi),
            mu,
            sigma: self.sigma,
            k: self.k,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Deterministic class memberships: class `l` occupies the contiguous index
/// block `offsets[l]..offsets[l+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    pub y: Vec<u16>,
    pub counts: Vec<usize>,
    pub offsets: Vec<usize>,
}

impl LabelAssignment {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    /// Realized class proportions `|C_l| / n`.
    pub fn proportions(&self) -> Array1<f64> {
        let n = self.n() as f64;
        Array1::from_iter(self.counts.iter().map(|&c| c as f64 / n))
    }

    pub fn class_range(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    /// Membership matrix `Z` as a dense array (test-scale helper).
    pub fn membership_matrix(&self) -> Array2<f64> {
        let mut z = Array2::zeros((self.n(), self.num_classes()));
        for (i, &c) in self.y.iter().enumerate() {
            z[(i, c as usize)] = 1.0;
        }
        z
    }
}

/// Block label assignment by largest-remainder rounding of `pi * n`,
/// ties broken toward the lower class index.
pub fn assign_labels(spec: &ModelSpec) -> Result<LabelAssignment> {
    spec.validate()?;
    let n = spec.n;
    let l = spec.l;
    let mut counts: Vec<usize> = Vec::with_capacity(l);
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(l);
    let mut assigned = 0usize;
    for (c, &p) in spec.pi.iter().enumerate() {
        let exact = p * n as f64;
        let floor = exact.floor() as usize;
        counts.push(floor);
        remainders.push((c, exact - floor as f64));
        assigned += floor;
    }
    // Distribute the residual seats by largest remainder, lower index first.
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for i in 0..(n - assigned) {
        counts[remainders[i % l].0] += 1;
    }
    if let Some(c) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster(c));
    }
    let mut offsets = Vec::with_capacity(l + 1);
    offsets.push(0);
    for &c in &counts {
        offsets.push(offsets.last().unwrap() + c);
    }
    let mut y = Vec::with_capacity(n);
    for (c, &count) in counts.iter().enumerate() {
        y.extend(std::iter::repeat_n(c as u16, count));
    }
    Ok(LabelAssignment { y, counts, offsets })
}

/// Symmetric binary adjacency with zero diagonal, CSR layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl SparseGraph {
    /// Build from unordered edges; duplicates and self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidModel(format!("self-loop at {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::DimensionMismatch(format!("edge ({u},{v}) out of range")));
            }
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for &d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut adj = vec![0u32; offsets[n]];
        let mut cursor = offsets.clone();
        for &(u, v) in edges {
            adj[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            adj[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        let mut g = SparseGraph { n, offsets, adj };
        g.sort_and_check()?;
        Ok(g)
    }

    fn sort_and_check(&mut self) -> Result<()> {
        for i in 0..self.n {
            let range = self.offsets[i]..self.offsets[i + 1];
            self.adj[range.clone()].sort_unstable();
            if self.adj[range].windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidModel(format!("duplicate edge at node {i}")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Undirected edges, each once, `i < j`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| (i as u32) < j)
                .map(move |&j| (i as u32, j))
        })
    }

    /// Edge-list text: one `i j` pair per line, 0-indexed, `i < j`.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn from_edge_list_text(n: usize, text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<u32> {
                tok.ok_or_else(|| Error::Serialization(format!("line {}: missing field", lineno + 1)))?
                    .parse()
                    .map_err(|e| Error::Serialization(format!("line {}: {e}", lineno + 1)))
            };
            edges.push((parse(it.next())?, parse(it.next())?));
        }
        Self::from_edges(n, &edges)
    }
}

/// Expected adjacency in block form: `E[A] = P - diag(P)` with
/// `P = Z B Z^T`. Matrix-vector products cost `O(n + L^2)`.
#[derive(Debug, Clone)]
pub struct ExpectedAdjacency {
    b: Array2<f64>,
    y: Vec<u16>,
    counts: Vec<usize>,
}

impl ExpectedAdjacency {
    pub fn new(spec: &ModelSpec, labels: &LabelAssignment) -> Self {
        ExpectedAdjacency {
            b: spec.b.clone(),
            y: labels.y.clone(),
            counts: labels.counts.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    /// `E[A]_{ij}`: `B_{y_i y_j}` off the diagonal, zero on it.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.b[(self.y[i] as usize, self.y[j] as usize)]
        }
    }

    /// `P_{ij} = B_{y_i y_j}` including the diagonal.
    pub fn p_entry(&self, i: usize, j: usize) -> f64 {
        self.b[(self.y[i] as usize, self.y[j] as usize)]
    }

    /// `y = P x` via class sums.
    pub fn apply_p(&self, x: &[f64], out: &mut [f64]) {
        let l = self.num_classes();
        let mut sums = vec![0.0f64; l];
        for (i, &v) in x.iter().enumerate() {
            sums[self.y[i] as usize] += v;
        }
        let mut t = vec![0.0f64; l];
        for a in 0..l {
            let mut acc = 0.0;
            for c in 0..l {
                acc += self.b[(a, c)] * sums[c];
            }
            t[a] = acc;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = t[self.y[i] as usize];
        }
    }

    /// `y = E[A] x = P x - diag(P) x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.apply_p(x, out);
        for (i, o) in out.iter_mut().enumerate() {
            let c = self.y[i] as usize;
            *o -= self.b[(c, c)] * x[i];
        }
    }

    /// `E[A]^k x`, in place.
    pub fn pow_apply(&self, x: &mut Vec<f64>, k: usize) {
        let mut buf = vec![0.0; x.len()];
        for _ in 0..k {
            self.apply(x, &mut buf);
            std::mem::swap(x, &mut buf);
        }
    }

    /// `P^k x`, in place.
    pub fn pow_apply_p(&self, x: &mut Vec<f64>, k: usize) {
        let mut buf = vec![0.0; x.len()];
        for _ in 0..k {
            self.apply_p(x, &mut buf);
            std::mem::swap(x, &mut buf);
        }
    }

    /// Reduced symmetric `L x L` form of `P`: `diag(sqrt n_l) B diag(sqrt n_l)`.
    pub fn reduced_p(&self) -> nalgebra::DMatrix<f64> {
        let l = self.num_classes();
        let mut m = nalgebra::DMatrix::zeros(l, l);
        for a in 0..l {
            for c in 0..l {
                m[(a, c)] =
                    (self.counts[a] as f64).sqrt() * self.b[(a, c)] * (self.counts[c] as f64).sqrt();
            }
        }
        m
    }

    /// Dense `E[A]` (test-scale helper).
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Dense `P` (test-scale helper).
    pub fn to_dense_p(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.p_entry(i, j))
    }
}

/// Expected adjacency of a valid `(spec, labels)` pair.
pub fn expected_adjacency(spec: &ModelSpec, labels: &LabelAssignment) -> Result<ExpectedAdjacency> {
    spec.validate()?;
    if labels.n() != spec.n || labels.num_classes() != spec.l {
        return Err(Error::DimensionMismatch("labels inconsistent with spec".into()));
    }
    Ok(ExpectedAdjacency::new(spec, labels))
}

/// Sample `A` with `A_{ij} ~ Bern(B_{y_i y_j})` independently over `i < j`.
///
/// Row-by-row geometric skip sampling over the contiguous class blocks, so
/// the cost is proportional to the number of realized edges.
pub fn sample_graph(spec: &ModelSpec, labels: &LabelAssignment, rng: &mut impl Rng) -> SparseGraph {
    let n = spec.n;
    let l = spec.l;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..n {
        let yi = labels.y[i] as usize;
        for c in 0..l {
            let lo = labels.offsets[c].max(i + 1);
            let hi = labels.offsets[c + 1];
            if lo >= hi {
                continue;
            }
            let p = spec.b[(yi, c)];
            if p <= 0.0 {
                continue;
            }
            if p >= 1.0 {
                for j in lo..hi {
                    edges.push((i as u32, j as u32));
                }
                continue;
            }
            let log1mp = (-p).ln_1p();
            let mut j = lo;
            loop {
                // geometric number of failures before the next edge
                let u: f64 = 1.0 - rng.random::<f64>();
                let skip = (u.ln() / log1mp).floor() as usize;
                j = j.saturating_add(skip);
                if j >= hi {
                    break;
                }
                edges.push((i as u32, j as u32));
                j += 1;
            }
        }
    }
    SparseGraph::from_edges(n, &edges).expect("sampler produces valid edges")
}

/// Convenience wrapper keyed by `(master seed, trial)`.
pub fn sample_graph_seeded(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    master_seed: u64,
    trial: u64,
) -> SparseGraph {
    let mut rng = RngFactory::new(master_seed).stream(StreamPurpose::Graph, trial);
    sample_graph(spec, labels, &mut rng)
}

/// Distribution of the feature noise. Gaussian is the canonical choice;
/// the other two are sub-Gaussian alternatives for robustness tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    Gaussian,
    Rademacher,
    Uniform,
}

impl NoiseKind {
    /// One draw with the given scale; all three kinds have variance `sigma^2`.
    pub fn sample(self, sigma: f64, rng: &mut impl Rng) -> f64 {
        match self {
            NoiseKind::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            NoiseKind::Rademacher => {
                if rng.random::<bool>() {
                    sigma
                } else {
                    -sigma
                }
            }
            NoiseKind::Uniform => {
                let half_width = sigma * 3.0f64.sqrt();
                (rng.random::<f64>() * 2.0 - 1.0) * half_width
            }
        }
    }

    /// Exact raw moment `E[(mu + noise)^a]`.
    pub fn raw_moment(self, mu: f64, sigma: f64, a: usize) -> f64 {
        if a == 0 {
            return 1.0;
        }
        if sigma == 0.0 {
            return mu.powi(a as i32);
        }
        match self {
            NoiseKind::Gaussian => {
                // m_a = mu m_{a-1} + (a-1) sigma^2 m_{a-2}
                let mut prev = 1.0;
                let mut cur = mu;
                for j in 2..=a {
                    let next = mu * cur + (j - 1) as f64 * sigma * sigma * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            }
            NoiseKind::Rademacher => {
                0.5 * ((mu + sigma).powi(a as i32) + (mu - sigma).powi(a as i32))
            }
            NoiseKind::Uniform => {
                let c = sigma * 3.0f64.sqrt();
                ((mu + c).powi(a as i32 + 1) - (mu - c).powi(a as i32 + 1))
                    / (2.0 * c * (a as f64 + 1.0))
            }
        }
    }
}

/// Sample `X` with `X_{i.} = mu_{y_i} + eps_i`, entries of `eps` i.i.d.
pub fn sample_features(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    noise: NoiseKind,
    rng: &mut impl Rng,
) -> Array2<f64> {
    let mut x = Array2::zeros((spec.n, spec.d));
    for i in 0..spec.n {
        let c = labels.y[i] as usize;
        for m in 0..spec.d {
            x[(i, m)] = spec.mu[(m, c)] + noise.sample(spec.sigma, rng);
        }
    }
    x
}

/// Convenience wrapper keyed by `(master seed, trial)`, Gaussian noise.
pub fn sample_features_seeded(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    master_seed: u64,
    trial: u64,
) -> Array2<f64> {
    let mut rng = RngFactory::new(master_seed).stream(StreamPurpose::Features, trial);
    sample_features(spec, labels, NoiseKind::Gaussian, &mut rng)
}

/// Constants entering the model assumptions. Never inferred silently; the
/// defaults below are the documented ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AssumptionConfig {
    pub c_b: f64,
    pub big_c_b: f64,
    /// `delta = inf` forces `I_l = [L]` (the common setting).
    pub delta: f64,
    pub c_nu: f64,
    pub c_pi: f64,
    pub big_c_pi: f64,
    pub big_c_mu: f64,
}

impl Default for AssumptionConfig {
    fn default() -> Self {
        AssumptionConfig {
            c_b: 0.5,
            big_c_b: 1.0,
            delta: f64::INFINITY,
            c_nu: 0.1,
            c_pi: 0.5,
            big_c_pi: 1.5,
            big_c_mu: 2.0,
        }
    }
}

/// One assumption's verdict with its binding margin (negative = violated).
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck {
    pub name: &'static str,
    pub satisfied: bool,
    pub margin: f64,
    pub detail: String,
}

/// Verdicts for all five assumptions plus the derived separation factor.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
    /// Per-row index sets `I_l` of classes connected at the full rate.
    pub i_sets: Vec<Vec<usize>>,
    /// Separation factor: min pairwise distance of normalized aggregated
    /// population vectors over `sqrt(d)`, clamped to 1.
    pub c_xi: f64,
    pub config: AssumptionConfig,
}

impl AssumptionReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn check(&self, idx: usize) -> &AssumptionCheck {
        &self.checks[idx]
    }
}

/// Growth-normalized `k`-aggregated population vectors
/// `xi_bar_l = mu (Pi n B / nu_n)^k e_l`, one column per class.
/// Uses realized proportions when labels are given.
pub fn xi_bar(spec: &ModelSpec, labels: &LabelAssignment, k: usize) -> Array2<f64> {
    let l = spec.l;
    let nu = spec.nu_n();
    let pi = labels.proportions();
    // t = Pi * nB / nu
    let mut t = Array2::zeros((l, l));
    for a in 0..l {
        for c in 0..l {
            t[(a, c)] = pi[a] * spec.n as f64 * spec.b[(a, c)] / nu;
        }
    }
    let mut result = spec.mu.clone();
    for _ in 0..k {
        result = result.dot(&t);
    }
    result
}

/// Separation factor `c_xi` of the normalized population vectors, clamped
/// to 1. Zero when two classes collapse after `k` smoothings.
pub fn separation_factor(spec: &ModelSpec, labels: &LabelAssignment, k: usize) -> f64 {
    let xb = xi_bar(spec, labels, k);
    let mut min_dist = f64::INFINITY;
    for a in 0..spec.l {
        for c in (a + 1)..spec.l {
            let diff = &xb.column(a) - &xb.column(c);
            let dist = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            min_dist = min_dist.min(dist);
        }
    }
    if !min_dist.is_finite() {
        return 0.0; // single class: no pair to separate
    }
    (min_dist / (spec.d as f64).sqrt()).min(1.0)
}

/// Evaluate assumptions (A1)-(A5) against the given constants.
pub fn check_assumptions(
    spec: &ModelSpec,
    labels: &LabelAssignment,
    cfg: &AssumptionConfig,
) -> AssumptionReport {
    let n = spec.n as f64;
    let l = spec.l;
    let nu = spec.nu_n();

    // (A1) connectivity scale split by I_l
    let mut i_sets: Vec<Vec<usize>> = Vec::with_capacity(l);
    let mut a1_margin = f64::INFINITY;
    let mut a1_ok = true;
    for a in 0..l {
        let mut i_set = Vec::new();
        for c in 0..l {
            let scaled = n * spec.b[(a, c)];
            let in_set = if cfg.delta.is_finite() {
                scaled >= cfg.c_b * nu
            } else {
                true // I_l = [L] by convention when delta = inf
            };
            if in_set {
                i_set.push(c);
                a1_margin = a1_margin.min((scaled - cfg.c_b * nu) / nu);
                if scaled < cfg.c_b * nu {
                    a1_ok = false;
                }
            } else {
                let cap = cfg.big_c_b * nu.powf(1.0 - cfg.delta);
                a1_margin = a1_margin.min((cap - scaled) / nu);
                if scaled > cap {
                    a1_ok = false;
                }
            }
        }
        if i_set.is_empty() {
            a1_ok = false;
        }
        i_sets.push(i_set);
    }

    // (A2) sparsity cap
    let a2_margin = ((1.0 - cfg.c_nu) * n - nu) / n;
    let a2_ok = a2_margin >= 0.0;

    // (A3) balanced proportions
    let pi = labels.proportions();
    let min_lpi = pi.iter().map(|&p| l as f64 * p).fold(f64::INFINITY, f64::min);
    let pi_norm = pi.iter().map(|p| p * p).sum::<f64>().sqrt();
    let a3_lower = min_lpi - cfg.c_pi;
    let a3_upper = cfg.big_c_pi - (l as f64).sqrt() * pi_norm;
    let a3_margin = a3_lower.min(a3_upper);
    let a3_ok = a3_margin >= 0.0;

    // (A4) operator norm of mu
    let mu_mat = nalgebra::DMatrix::from_fn(spec.d, l, |i, j| spec.mu[(i, j)]);
    let mu_op = mu_mat.svd(false, false).singular_values.max();
    let a4_margin = (cfg.big_c_mu * (spec.d as f64).sqrt() - mu_op) / (spec.d as f64).sqrt();
    let a4_ok = a4_margin >= 0.0;

    // (A5) separation of aggregated population vectors
    let c_xi = separation_factor(spec, labels, spec.k);
    let a5_ok = c_xi > 0.0;

    let checks = vec![
        AssumptionCheck {
            name: "A1",
            satisfied: a1_ok,
            margin: a1_margin,
            detail: format!("row rate split with c_B={}, C_B={}, delta={}", cfg.c_b, cfg.big_c_b, cfg.delta),
        },
        AssumptionCheck {
            name: "A2",
            satisfied: a2_ok,
            margin: a2_margin,
            detail: format!("nu_n={nu} vs (1-c_nu)n with c_nu={}", cfg.c_nu),
        },
        AssumptionCheck {
            name: "A3",
            satisfied: a3_ok,
            margin: a3_margin,
            detail: format!("min L*pi={min_lpi}, sqrt(L)|pi|={:.6}", (l as f64).sqrt() * pi_norm),
        },
        AssumptionCheck {
            name: "A4",
            satisfied: a4_ok,
            margin: a4_margin,
            detail: format!("|mu|_op={mu_op:.6} vs C_mu*sqrt(d)={}", cfg.big_c_mu * (spec.d as f64).sqrt()),
        },
        AssumptionCheck {
            name: "A5",
            satisfied: a5_ok,
            margin: c_xi,
            detail: format!("c_xi={c_xi}"),
        },
    ];

    AssumptionReport { checks, i_sets, c_xi, config: *cfg }
}
