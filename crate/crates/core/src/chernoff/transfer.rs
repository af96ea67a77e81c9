//! The block transfer operator `𝓕 ⋆ Ã` on `ℂⁿ ⊗ ℂ^{D²}` and the
//! contraction bounds it satisfies.
//!
//! A state is stored as a `D² × n` matrix whose column `v` is the block at
//! vertex `v`. `Ã = A ⊗ I` mixes columns through the normalized adjacency and
//! `𝓕` applies `𝓣_v = X_v ⊗ conj(X_v)` to column `v`, where
//! `X_v = exp(t·g(v)(a+ιb)/2)`. For real symmetric `g(v)`,
//! `conj(X_v) = exp(t·g(v)(a−ιb)/2)`. Starting from
//! `u₀ = 𝟏/√n ⊗ col(I)`, `⟨u₀, (𝓕Ã)^κ u₀⟩` is the stationary-walk
//! expectation of `‖X_{v_κ}⋯X_{v_1}‖²_F`. By reversibility of the walk this
//! equals `E Tr(X_{v_1}⋯X_{v_κ} X_{v_κ}ᴴ⋯X_{v_1}ᴴ)`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::expander::batch_walk;
use crate::linalg::{hermitian_exp_scaled, CMat, RMat};
use crate::rng::Rng;
use crate::C64;

use super::VertexTensorAssignment;

/// Largest `n·D²` for which the exact operator is built.
pub const TRANSFER_CAPACITY: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBounds {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
}

impl GammaBounds {
    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma1, self.gamma2, self.gamma3, self.gamma4]
    }
}

/// `γ₁ = e^x`, `γ₂ = λ(e^x − 1)`, `γ₃ = e^x − 1`, `γ₄ = λe^x` with
/// `x = t·r·√(a²+b²)`. `λ = 1` is accepted so that bipartite graphs can be
/// certified too.
pub fn gamma_bounds(t: f64, r: f64, a: f64, b: f64, lambda: f64) -> Result<GammaBounds> {
    if !(t >= 0.0 && r >= 0.0 && a >= 0.0 && t.is_finite() && r.is_finite() && b.is_finite() && a.is_finite()) {
        return arg_err(format!("need t, r, a ≥ 0 and finite b, got t={t}, r={r}, a={a}, b={b}"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return arg_err(format!("λ must lie in [0, 1], got {lambda}"));
    }
    let x = t * r * a.hypot(b);
    let e = x.exp();
    let em1 = x.exp_m1();
    Ok(GammaBounds {
        gamma1: e,
        gamma2: lambda * em1,
        gamma3: em1,
        gamma4: lambda * e,
    })
}

/// `𝓕 ⋆ Ã` for one assignment and one `(t, a, b)`.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    transition: RMat,
    blocks: Vec<CMat>,
    dim: usize,
}

impl TransferOperator {
    pub fn new(assign: &VertexTensorAssignment, t: f64, a: f64, b: f64) -> Result<Self> {
        let n = assign.graph().vertex_count();
        let dim = assign.dim();
        let size = n.saturating_mul(dim.saturating_mul(dim));
        if size > TRANSFER_CAPACITY {
            return Err(Error::Capacity(format!(
                "transfer operator size n·D² = {size} exceeds {TRANSFER_CAPACITY}"
            )));
        }
        let z = C64::new(t * a / 2.0, t * b / 2.0);
        let blocks = assign
            .tensors()
            .iter()
            .map(|g| {
                let x = hermitian_exp_scaled(g.unfolding(), z)?;
                Ok(x.kronecker(&x.map(|w| w.conj())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            transition: assign.graph().normalized_adjacency(),
            blocks,
            dim,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.len()
    }

    /// Block length `D²`.
    pub fn block_len(&self) -> usize {
        self.dim * self.dim
    }

    /// `u₀ = 𝟏/√n ⊗ col(I)`.
    pub fn start_state(&self) -> CMat {
        let n = self.vertex_count();
        let s = 1.0 / (n as f64).sqrt();
        let mut u = CMat::zeros(self.block_len(), n);
        for v in 0..n {
            for i in 0..self.dim {
                u[(i * self.dim + i, v)] = C64::new(s, 0.0);
            }
        }
        u
    }

    /// `u ↦ 𝓕 ⋆ Ã ⋆ u`.
    pub fn apply(&self, u: &CMat) -> CMat {
        let mixed = u * self.transition.map(|x| C64::new(x, 0.0));
        let mut out = CMat::zeros(mixed.nrows(), mixed.ncols());
        for (v, block) in self.blocks.iter().enumerate() {
            out.set_column(v, &(block * mixed.column(v)));
        }
        out
    }
}

/// Component in `span{𝟏 ⊗ eᵢ}`: every column replaced by the column mean.
pub fn parallel_part(u: &CMat) -> CMat {
    let n = u.ncols();
    let mean = u.column_sum() / C64::new(n as f64, 0.0);
    CMat::from_fn(u.nrows(), n, |i, _| mean[i])
}

pub fn perpendicular_part(u: &CMat) -> CMat {
    u - parallel_part(u)
}

/// Worst observed ratio for each of the four contraction statements, next to
/// the `γ` it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub lambda: f64,
    pub radius: f64,
    pub gammas: GammaBounds,
    pub trials: usize,
    pub worst: [f64; 4],
    pub holds: [bool; 4],
}

impl ContractionReport {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

/// Randomized check of the four bounds
/// `‖(𝓕Ãu∥)∥‖ ≤ γ₁‖u∥‖`, `‖(𝓕Ãu⊥)∥‖ ≤ γ₂‖u⊥‖`,
/// `‖(𝓕Ãu∥)⊥‖ ≤ γ₃‖u∥‖`, `‖(𝓕Ãu⊥)⊥‖ ≤ γ₄‖u⊥‖`
/// on `trials` complex Gaussian states, each within `γᵢ + 1e-9`.
pub fn contraction_certificate(
    assign: &VertexTensorAssignment,
    t: f64,
    a: f64,
    b: f64,
    trials: usize,
    rng: &mut Rng,
) -> Result<ContractionReport> {
    let op = TransferOperator::new(assign, t, a, b)?;
    let lambda = assign.graph().spectral_expansion()?;
    let radius = assign.radius();
    let gammas = gamma_bounds(t, radius, a, b, lambda)?;
    let (rows, cols) = (op.block_len(), op.vertex_count());
    let mut worst = [0.0f64; 4];
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    for _ in 0..trials {
        let u = CMat::from_fn(rows, cols, |_, _| {
            C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let (par, perp) = (parallel_part(&u), perpendicular_part(&u));
        let (np, nq) = (par.norm(), perp.norm());
        let img_par = op.apply(&par);
        let img_perp = op.apply(&perp);
        let observed = [
            ratio(parallel_part(&img_par).norm(), np),
            ratio(parallel_part(&img_perp).norm(), nq),
            ratio(perpendicular_part(&img_par).norm(), np),
            ratio(perpendicular_part(&img_perp).norm(), nq),
        ];
        for (w, o) in worst.iter_mut().zip(observed) {
            *w = w.max(o);
        }
    }
    let g = gammas.as_array();
    let holds = std::array::from_fn(|i| worst[i] <= g[i] + 1e-9);
    Ok(ContractionReport {
        lambda,
        radius,
        gammas,
        trials,
        worst,
        holds,
    })
}

/// Exact `⟨u₀, (𝓕 ⋆ Ã)^κ ⋆ u₀⟩`. The value is real in exact arithmetic; an
/// imaginary part above `1e-9·max(1, |re|)` is reported as a numerical error.
pub fn transfer_expectation(assign: &VertexTensorAssignment, t: f64, a: f64, b: f64, kappa: usize) -> Result<f64> {
    if kappa == 0 {
        return arg_err("walk length must be at least 1");
    }
    let op = TransferOperator::new(assign, t, a, b)?;
    let u0 = op.start_state();
    let mut u = u0.clone();
    for _ in 0..kappa {
        u = op.apply(&u);
    }
    let z: C64 = u0.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
    if z.im.abs() > 1e-9 * z.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("transfer expectation has imaginary part {:.3e}", z.im)));
    }
    Ok(z.re)
}

/// Sample mean and standard error of
/// `Tr(X_{v_1}⋯X_{v_κ} · exp(t·g(v_κ)(a−ιb)/2)⋯exp(t·g(v_1)(a−ιb)/2))`
/// over `num_walks` stationary walks (walk `i` uses stream `i` of `seed`).
pub fn monte_carlo_trace(
    assign: &VertexTensorAssignment,
    t: f64,
    a: f64,
    b: f64,
    kappa: usize,
    num_walks: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if kappa == 0 || num_walks < 2 {
        return arg_err("need κ ≥ 1 and at least two walks");
    }
    let plus = C64::new(t * a / 2.0, t * b / 2.0);
    let minus = plus.conj();
    let mut xs = Vec::with_capacity(assign.tensors().len());
    let mut ys = Vec::with_capacity(assign.tensors().len());
    for g in assign.tensors() {
        xs.push(hermitian_exp_scaled(g.unfolding(), plus)?);
        ys.push(hermitian_exp_scaled(g.unfolding(), minus)?);
    }
    let graph = assign.graph();
    let values: Vec<f64> = (0..num_walks as u64)
        .into_par_iter()
        .map(|i| {
            let walk = batch_walk(graph, kappa, seed, i);
            let mut left = xs[walk[0]].clone();
            for &v in &walk[1..] {
                left *= &xs[v];
            }
            let mut right = ys[walk[kappa - 1]].clone();
            for &v in walk[..kappa - 1].iter().rev() {
                right *= &ys[v];
            }
            (left * right).trace().re
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// `D·exp(κ(2x + 8/(1−λ) + 16x/(1−λ)))` with `x = t·r·√(a²+b²)`, claimed only
/// when `x < 1` and `λ(2eˣ − 1) ≤ 1`.
pub fn expectation_bound(kappa: usize, dim: usize, r: f64, t: f64, a: f64, b: f64, lambda: f64) -> Result<f64> {
    if kappa == 0 || dim == 0 {
        return arg_err("need κ ≥ 1 and a positive dimension");
    }
    if !(t >= 0.0 && r >= 0.0 && a >= 0.0 && b.is_finite()) || !(0.0..=1.0).contains(&lambda) {
        return arg_err(format!("invalid arguments t={t}, r={r}, a={a}, b={b}, λ={lambda}"));
    }
    let x = t * r * a.hypot(b);
    if x >= 1.0 {
        return Err(Error::Precondition(format!("t·r·√(a²+b²) = {x} is not below 1")));
    }
    if lambda * (2.0 * x.exp() - 1.0) > 1.0 {
        return Err(Error::Precondition(format!("λ(2e^x − 1) = {} exceeds 1", lambda * (2.0 * x.exp() - 1.0))));
    }
    if lambda >= 1.0 {
        return Err(Error::Precondition("λ = 1 leaves no spectral gap".into()));
    }
    let gap = 1.0 - lambda;
    let exponent = kappa as f64 * (2.0 * x + 8.0 / gap + 16.0 * x / gap);
    Ok(dim as f64 * exponent.exp())
}
