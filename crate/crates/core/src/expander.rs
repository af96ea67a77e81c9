//! Regular undirected graphs, their normalized adjacency spectra and
//! stationary random walks.
//!
//! Adjacency entries count edge multiplicity. A self-loop at `v` contributes
//! `A[v][v]` to the degree of `v`, so the walk stays put with probability
//! `A[v][v]/d`. Both self-loops and multi-edges arise from the permutation
//! model used by [`gen_random_regular`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::{symmetric_eigen, RMat};
use crate::rng::{self, Rng};

/// Largest vertex count accepted; the adjacency is stored densely.
pub const MAX_VERTICES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    degree: usize,
    adjacency: Vec<u32>,
    // Neighbor of each edge slot, `degree` slots per vertex.
    slots: Vec<usize>,
}

impl RegularGraph {
    /// Builds a graph from a row-major `n × n` multiplicity matrix.
    pub fn from_adjacency(n: usize, adjacency: Vec<u32>) -> Result<Self> {
        if n < 2 {
            return arg_err(format!("a graph needs at least 2 vertices, got {n}"));
        }
        if n > MAX_VERTICES {
            return Err(Error::Capacity(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
        }
        if adjacency.len() != n * n {
            return arg_err(format!("adjacency has {} entries, expected {}", adjacency.len(), n * n));
        }
        for u in 0..n {
            for v in (u + 1)..n {
                if adjacency[u * n + v] != adjacency[v * n + u] {
                    return arg_err(format!("adjacency is not symmetric at ({u}, {v})"));
                }
            }
        }
        let row_sum = |u: usize| adjacency[u * n..(u + 1) * n].iter().map(|&m| m as usize).sum::<usize>();
        let degree = row_sum(0);
        if degree == 0 {
            return arg_err("degree must be positive");
        }
        if let Some(u) = (1..n).find(|&u| row_sum(u) != degree) {
            return arg_err(format!("vertex {u} has degree {} but vertex 0 has {degree}", row_sum(u)));
        }
        let mut slots = Vec::with_capacity(n * degree);
        for u in 0..n {
            for v in 0..n {
                slots.extend(std::iter::repeat_n(v, adjacency[u * n + v] as usize));
            }
        }
        Ok(Self { n, degree, adjacency, slots })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Multiplicity of the edge `{u, v}`.
    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.adjacency[u * self.n + v]
    }

    /// Neighbors of `u`, one entry per edge slot.
    pub fn neighbor_slots(&self, u: usize) -> &[usize] {
        &self.slots[u * self.degree..(u + 1) * self.degree]
    }

    /// Transition matrix `A/d`.
    pub fn normalized_adjacency(&self) -> RMat {
        let d = self.degree as f64;
        RMat::from_fn(self.n, self.n, |u, v| f64::from(self.multiplicity(u, v)) / d)
    }

    /// Spectral expansion `λ = max_{i≥2} |μᵢ|` over the eigenvalues of the
    /// normalized adjacency, the contraction factor on vectors orthogonal to
    /// the all-ones vector. Bipartite or disconnected graphs give `λ = 1`.
    pub fn spectral_expansion(&self) -> Result<f64> {
        let (mu, _) = symmetric_eigen(&self.normalized_adjacency())?;
        if (mu[0] - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("top eigenvalue {} of a regular graph is not 1", mu[0])));
        }
        let lambda = mu[1].abs().max(mu[mu.len() - 1].abs());
        Ok(lambda.min(1.0))
    }

    /// Checks `‖Ax‖ ≤ λ‖x‖` on `trials` random Gaussian vectors projected
    /// onto the complement of the all-ones vector.
    pub fn expansion_certificate(&self, trials: usize, rng: &mut Rng) -> Result<ExpansionCertificate> {
        let lambda = self.spectral_expansion()?;
        let a = self.normalized_adjacency();
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let mut x = nalgebra::DVector::<f64>::from_fn(self.n, |_, _| rng.sample(rand_distr::StandardNormal));
            let mean = x.mean();
            x.add_scalar_mut(-mean);
            let norm = x.norm();
            if norm > 0.0 {
                worst = worst.max((&a * &x).norm() / norm);
            }
        }
        Ok(ExpansionCertificate {
            lambda,
            worst_ratio: worst,
            trials,
            holds: worst <= lambda + 1e-9,
        })
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.degree);
        for u in 0..self.n {
            for v in u..self.n {
                let m = self.multiplicity(u, v);
                if m > 0 {
                    let _ = writeln!(out, "{u} {v} {m}");
                }
            }
        }
        out
    }

    /// Parses the edge-list format: a header `n d`, then `u v m` lines
    /// (0-indexed, multiplicity `m`). A line `v v m` adds `m` to the degree
    /// of `v`. Blank lines and `#` comments are skipped.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Config(format!("edge list line {line}: {msg}"));
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::Config("edge list is empty".into()))?;
        let nums = parse_fields(header).map_err(|m| bad(hl, m))?;
        let [n, d] = nums[..] else {
            return Err(bad(hl, format!("header needs `n d`, got {header:?}")));
        };
        let (n, d) = (n as usize, d as usize);
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(bad(hl, format!("vertex count {n} out of range")));
        }
        let mut adjacency = vec![0u32; n * n];
        for (ln, line) in lines {
            let nums = parse_fields(line).map_err(|m| bad(ln, m))?;
            let [u, v, m] = nums[..] else {
                return Err(bad(ln, format!("expected `u v m`, got {line:?}")));
            };
            let (u, v) = (u as usize, v as usize);
            if u >= n || v >= n {
                return Err(bad(ln, format!("vertex out of range 0..{n}")));
            }
            let m = u32::try_from(m).map_err(|_| bad(ln, "multiplicity too large".into()))?;
            adjacency[u * n + v] += m;
            if u != v {
                adjacency[v * n + u] += m;
            }
        }
        let g = Self::from_adjacency(n, adjacency).map_err(|e| Error::Config(format!("edge list: {e}")))?;
        if g.degree != d {
            return Err(Error::Config(format!("edge list header says degree {d}, edges give {}", g.degree)));
        }
        Ok(g)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_edge_list(&text)
    }
}

fn parse_fields(line: &str) -> std::result::Result<Vec<u64>, String> {
    line.split_whitespace()
        .map(|f| f.parse::<u64>().map_err(|_| format!("not a nonnegative integer: {f:?}")))
        .collect()
}

/// Outcome of the randomized check of `‖Ax‖ ≤ λ‖x‖` on `𝟏⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCertificate {
    pub lambda: f64,
    pub worst_ratio: f64,
    pub trials: usize,
    pub holds: bool,
}

/// `K_n` without self-loops.
pub fn gen_complete(n: usize) -> Result<RegularGraph> {
    if n < 2 {
        return arg_err(format!("complete graph needs n ≥ 2, got {n}"));
    }
    let adjacency = (0..n * n).map(|i| u32::from(i / n != i % n)).collect();
    RegularGraph::from_adjacency(n, adjacency)
}

/// The cycle `C_n`, `n ≥ 3`.
pub fn gen_cycle(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return arg_err(format!("cycle needs n ≥ 3, got {n}"));
    }
    let mut adjacency = vec![0u32; n * n];
    for u in 0..n {
        let v = (u + 1) % n;
        adjacency[u * n + v] = 1;
        adjacency[v * n + u] = 1;
    }
    RegularGraph::from_adjacency(n, adjacency)
}

/// The hypercube `Q_dim` on `2^dim` vertices.
pub fn gen_hypercube(dim: usize) -> Result<RegularGraph> {
    if dim == 0 || (1usize << dim.min(63)) > MAX_VERTICES {
        return arg_err(format!("hypercube dimension {dim} out of range"));
    }
    let n = 1usize << dim;
    let mut adjacency = vec![0u32; n * n];
    for u in 0..n {
        for b in 0..dim {
            adjacency[u * n + (u ^ (1 << b))] = 1;
        }
    }
    RegularGraph::from_adjacency(n, adjacency)
}

/// Random `d`-regular multigraph: `⌊d/2⌋` uniform permutations `π` each add
/// `P_π + P_πᵀ`, and for odd `d` a uniform perfect matching adds one more
/// edge per vertex. Fixed points of `π` become self-loops of weight 2 and
/// repeated pairs become multi-edges. Deterministic in `seed`.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    if n < 2 || d == 0 {
        return arg_err(format!("random regular graph needs n ≥ 2 and d ≥ 1, got n={n}, d={d}"));
    }
    if !(n * d).is_multiple_of(2) {
        return arg_err(format!("n·d must be even, got n={n}, d={d}"));
    }
    if n > MAX_VERTICES {
        return Err(Error::Capacity(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
    }
    let mut rng = rng::seeded(seed);
    let mut adjacency = vec![0u32; n * n];
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..d / 2 {
        perm.shuffle(&mut rng);
        for (u, &v) in perm.iter().enumerate() {
            adjacency[u * n + v] += 1;
            adjacency[v * n + u] += 1;
        }
    }
    if d % 2 == 1 {
        perm.shuffle(&mut rng);
        for pair in perm.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            adjacency[u * n + v] += 1;
            adjacency[v * n + u] += 1;
        }
    }
    RegularGraph::from_adjacency(n, adjacency)
}

/// Graph description as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Complete { n: usize },
    Cycle { n: usize },
    Hypercube { dim: usize },
    /// Without an explicit seed one is derived from the master seed.
    RandomRegular { n: usize, degree: usize, seed: Option<u64> },
    EdgeList { path: PathBuf },
}

impl GraphSpec {
    pub fn build(&self, master_seed: u64) -> Result<RegularGraph> {
        match self {
            GraphSpec::Complete { n } => gen_complete(*n),
            GraphSpec::Cycle { n } => gen_cycle(*n),
            GraphSpec::Hypercube { dim } => gen_hypercube(*dim),
            GraphSpec::RandomRegular { n, degree, seed } => {
                gen_random_regular(*n, *degree, seed.unwrap_or_else(|| rng::derive_seed(master_seed, "graph")))
            }
            GraphSpec::EdgeList { path } => RegularGraph::read_edge_list(path),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GraphSpec::Complete { n } => format!("K{n}"),
            GraphSpec::Cycle { n } => format!("C{n}"),
            GraphSpec::Hypercube { dim } => format!("Q{dim}"),
            GraphSpec::RandomRegular { n, degree, .. } => format!("RR({n},{degree})"),
            GraphSpec::EdgeList { path } => path.display().to_string(),
        }
    }
}

/// A stationary walk `v₁, …, v_κ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSample {
    pub vertices: Vec<usize>,
    pub seed: u64,
    pub kappa: usize,
}

/// Walk of length `kappa` drawn from `rng`: `v₁` uniform, then each step
/// picks one of the `d` edge slots at the current vertex uniformly.
pub fn walk_with(g: &RegularGraph, kappa: usize, rng: &mut Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(kappa);
    if kappa == 0 {
        return out;
    }
    let mut v = rng.random_range(0..g.n);
    out.push(v);
    for _ in 1..kappa {
        v = g.neighbor_slots(v)[rng.random_range(0..g.degree)];
        out.push(v);
    }
    out
}

pub fn sample_walk(g: &RegularGraph, kappa: usize, seed: u64) -> Result<WalkSample> {
    if kappa == 0 {
        return arg_err("walk length must be at least 1");
    }
    let vertices = walk_with(g, kappa, &mut rng::seeded(seed));
    Ok(WalkSample { vertices, seed, kappa })
}

/// Walk number `index` of a batch under `seed`, drawn from its own stream.
pub fn batch_walk(g: &RegularGraph, kappa: usize, seed: u64, index: u64) -> Vec<usize> {
    walk_with(g, kappa, &mut rng::stream(seed, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi_square(counts: &[usize], expected: &[f64]) -> f64 {
        counts.iter().zip(expected).map(|(&c, &e)| (c as f64 - e).powi(2) / e).sum()
    }

    #[test]
    fn small_graphs() {
        let k2 = gen_complete(2).unwrap();
        assert_eq!(k2.normalized_adjacency(), RMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(gen_cycle(5).unwrap().degree(), 2);
        assert_eq!(gen_complete(4).unwrap().degree(), 3);
        let q3 = gen_hypercube(3).unwrap();
        assert_eq!((q3.vertex_count(), q3.degree()), (8, 3));
        let a = q3.normalized_adjacency();
        for u in 0..8 {
            assert!((a.row(u).sum() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn expansion_values() {
        // K4: eigenvalues 1 and −1/3 (three times).
        let k4 = gen_complete(4).unwrap().spectral_expansion().unwrap();
        assert!((k4 - 1.0 / 3.0).abs() < 1e-12);
        // C5: cos(2πj/5), largest nontrivial magnitude |cos(4π/5)|.
        let c5 = gen_cycle(5).unwrap().spectral_expansion().unwrap();
        assert!((c5 - (4.0 * std::f64::consts::PI / 5.0).cos().abs()).abs() < 1e-12);
        assert!((gen_cycle(4).unwrap().spectral_expansion().unwrap() - 1.0).abs() < 1e-12);
        assert!((gen_hypercube(3).unwrap().spectral_expansion().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certificates_hold() {
        let mut rng = rng::seeded(5);
        for g in [
            gen_complete(4).unwrap(),
            gen_cycle(5).unwrap(),
            gen_hypercube(3).unwrap(),
            gen_random_regular(30, 5, 2).unwrap(),
        ] {
            let cert = g.expansion_certificate(100, &mut rng).unwrap();
            assert!(cert.holds, "{cert:?}");
        }
    }

    #[test]
    fn random_regular_is_deterministic_and_valid() {
        let a = gen_random_regular(50, 6, 1).unwrap();
        let b = gen_random_regular(50, 6, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random_regular(50, 6, 2).unwrap());
        assert_eq!(a.degree(), 6);
        let odd = gen_random_regular(10, 3, 4).unwrap();
        assert_eq!(odd.degree(), 3);
        assert!(gen_random_regular(5, 3, 0).is_err());
        let (mu, _) = symmetric_eigen(&a.normalized_adjacency()).unwrap();
        assert!(mu.iter().all(|m| m.abs() <= 1.0 + 1e-12));
        let an = a.normalized_adjacency();
        assert_eq!(an, an.transpose());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_random_regular(12, 4, 9).unwrap();
        let back = RegularGraph::from_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, back);
        let err = RegularGraph::from_edge_list("3 2\n0 1 1\n1 2 1\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = RegularGraph::from_edge_list("3 2\n0 1 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let loops = RegularGraph::from_edge_list("# two vertices\n2 3\n0 0 2\n1 1 2\n0 1 1\n").unwrap();
        assert_eq!(loops.neighbor_slots(0), &[0, 0, 1]);
    }

    #[test]
    fn k2_walk_alternates() {
        let g = gen_complete(2).unwrap();
        let w = sample_walk(&g, 3, 11).unwrap();
        assert_eq!(w.vertices.len(), 3);
        assert_ne!(w.vertices[0], w.vertices[1]);
        assert_eq!(w.vertices[0], w.vertices[2]);
        assert!(sample_walk(&g, 0, 1).is_err());
    }

    #[test]
    fn start_vertex_is_uniform() {
        let g = gen_cycle(10).unwrap();
        let mut counts = vec![0; 10];
        for seed in 0..100_000 {
            counts[sample_walk(&g, 1, seed).unwrap().vertices[0]] += 1;
        }
        // 0.999 quantile of χ² with 9 degrees of freedom.
        assert!(chi_square(&counts, &[10_000.0; 10]) < 27.88);
    }

    #[test]
    fn marginals_stay_uniform_and_pairs_follow_transitions() {
        let g = gen_random_regular(8, 3, 7).unwrap();
        let (n, kappa, walks) = (8, 10, 100_000u64);
        let mut marg = vec![vec![0usize; n]; 3];
        let mut pairs = vec![0usize; n * n];
        for i in 0..walks {
            let w = batch_walk(&g, kappa, 3, i);
            for (slot, j) in [0, kappa / 2 - 1, kappa - 1].into_iter().enumerate() {
                marg[slot][w[j]] += 1;
            }
            pairs[w[0] * n + w[1]] += 1;
        }
        for m in &marg {
            // 0.999 quantile of χ² with 7 degrees of freedom.
            assert!(chi_square(m, &vec![walks as f64 / n as f64; n]) < 24.32, "{m:?}");
        }
        for u in 0..n {
            for v in 0..n {
                let p = f64::from(g.multiplicity(u, v)) / (n * g.degree()) as f64;
                let expect = p * walks as f64;
                let sd = (walks as f64 * p * (1.0 - p)).sqrt();
                assert!((pairs[u * n + v] as f64 - expect).abs() <= 4.0 * sd + 1e-9, "({u},{v})");
            }
        }
    }

    #[test]
    fn graph_spec_builds() {
        let spec: GraphSpec = toml::from_str("kind = \"random_regular\"\nn = 10\ndegree = 4").unwrap();
        let a = spec.build(1).unwrap();
        assert_eq!(a, spec.build(1).unwrap());
        assert_eq!(GraphSpec::Hypercube { dim: 3 }.label(), "Q3");
    }
}
