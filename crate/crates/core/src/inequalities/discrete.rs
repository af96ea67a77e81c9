//! Averaged majorization theorems over finitely supported probability
//! measures: eigenvalue (log-)majorization of `C` by the `ν`-average of the
//! spectra of `D_τ` against the Ky Fan inequality for `f(C)`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, shape_err, Result};
use crate::majorization::{self, SortedVec, Verdict};
use crate::norms;
use crate::random;
use crate::rng::Rng;
use crate::tensor::{HermitianTensor, TensorShape};

use super::ScalarFunction;

/// Probability measure with finitely many atoms.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure<T> {
    atoms: Vec<T>,
    weights: Vec<f64>,
}

impl<T> DiscreteMeasure<T> {
    /// Weights must be positive and sum to 1 within `1e-12`.
    pub fn new(atoms: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return arg_err(format!(
                "measure needs one weight per atom, got {} atoms and {} weights",
                atoms.len(),
                weights.len()
            ));
        }
        if let Some(w) = weights.iter().find(|w| **w <= 0.0 || !w.is_finite()) {
            return arg_err(format!("measure weights must be positive, found {w}"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return arg_err(format!("measure weights sum to {total}, not 1"));
        }
        Ok(Self { atoms, weights })
    }

    /// Uniform weights.
    pub fn uniform(atoms: Vec<T>) -> Result<Self> {
        let n = atoms.len();
        let mut weights = vec![1.0 / n as f64; n];
        // Put the rounding residue on the last atom so the sum is exact.
        let head: f64 = weights[..n.saturating_sub(1)].iter().sum();
        if let Some(last) = weights.last_mut() {
            *last = 1.0 - head;
        }
        Self::new(atoms, weights)
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.atoms.iter().zip(self.weights.iter().copied())
    }
}

/// Which averaged majorization statement to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageMode {
    /// `λ(C) ≺_w Σ ν λ(D)` against `‖f(C)‖_(k) ≤ Σ ν ‖f(D)‖_(k)`, `f`
    /// nondecreasing convex.
    Weak,
    /// `λ(C) ≺ Σ ν λ(D)` with `f` convex.
    Strong,
    /// `λ(C) ≺_{w log} exp Σ ν log λ(D)` against the geometric-mean bound
    /// for `f` and the arithmetic-mean bound for `g`.
    WeakLog,
    /// `λ(C) ≺_log exp Σ ν log λ(D)`.
    Log,
}

impl AverageMode {
    pub const ALL: [AverageMode; 4] = [
        AverageMode::Weak,
        AverageMode::Strong,
        AverageMode::WeakLog,
        AverageMode::Log,
    ];

    pub fn is_log(&self) -> bool {
        matches!(self, AverageMode::WeakLog | AverageMode::Log)
    }
}

/// Premise and conclusion of one averaged majorization instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub mode: AverageMode,
    pub premise_holds: bool,
    pub premise_first_failure: Option<usize>,
    /// `‖f(C)‖_(k)`.
    pub lhs: f64,
    /// `Σ ν ‖f(D)‖_(k)`, or `exp Σ ν log ‖f(D)‖_(k)` in the log modes.
    pub rhs: f64,
    pub conclusion_holds: bool,
    /// Log modes only: `‖g(C)‖_(k)` against `Σ ν ‖g(D)‖_(k)`.
    pub linear_lhs: Option<f64>,
    pub linear_rhs: Option<f64>,
    pub linear_holds: Option<bool>,
}

impl AverageReport {
    /// Premise true but a conclusion false.
    pub fn violation(&self) -> bool {
        self.premise_holds && (!self.conclusion_holds || self.linear_holds == Some(false))
    }
}

fn spectral_range<'a>(spectra: impl Iterator<Item = &'a Vec<f64>>) -> (f64, f64) {
    spectra.flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Checks that `f` (and `g`) satisfy the hypotheses of `mode` on `[lo, hi]`.
pub fn check_applicable(
    mode: AverageMode,
    f: ScalarFunction,
    g: ScalarFunction,
    lo: f64,
    hi: f64,
) -> Result<()> {
    let name = f.name();
    let ok = match mode {
        AverageMode::Weak => {
            f.nonnegative_on(lo, hi) && f.convex_on(lo, hi) && f.nondecreasing_on(lo, hi)
        }
        AverageMode::Strong => f.nonnegative_on(lo, hi) && f.convex_on(lo, hi),
        // Partial products only control nondecreasing images.
        AverageMode::WeakLog => {
            f.log_exp_convex_on(lo, hi)
                && f.nondecreasing_on(lo, hi)
                && g.exp_convex_on(lo, hi)
                && g.nondecreasing_on(lo, hi)
                && g.nonnegative_on(lo, hi)
        }
        AverageMode::Log => {
            f.log_exp_convex_on(lo, hi) && g.exp_convex_on(lo, hi) && g.nonnegative_on(lo, hi)
        }
    };
    if !ok {
        return arg_err(format!(
            "function {name} (and {}) does not meet the {mode:?} hypotheses on [{lo}, {hi}]",
            g.name()
        ));
    }
    Ok(())
}

fn ky_fan_of_map(h: &HermitianTensor, f: ScalarFunction, k: usize) -> Result<f64> {
    let mapped = h.map(|x| f.eval(x))?;
    norms::ky_fan_norm(mapped.as_tensor(), k)
}

fn tol_for(a: f64, b: f64) -> f64 {
    1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Tests one averaged majorization statement. `g` is the function for the
/// arithmetic-mean conclusion of the log modes and defaults to `f`.
pub fn verify_discrete_average_majorization(
    c: &HermitianTensor,
    ds: &DiscreteMeasure<HermitianTensor>,
    f: ScalarFunction,
    g: Option<ScalarFunction>,
    k: usize,
    mode: AverageMode,
) -> Result<AverageReport> {
    let g = g.unwrap_or(f);
    for d in ds.atoms() {
        if d.shape() != c.shape() {
            return shape_err(format!(
                "measure atom shape {:?} differs from {:?}",
                d.shape(),
                c.shape()
            ));
        }
    }
    let lc = c.eigenvalues()?;
    let ld: Vec<Vec<f64>> = ds.atoms().iter().map(|d| d.eigenvalues()).collect::<Result<_>>()?;
    let (lo, hi) = spectral_range(std::iter::once(&lc).chain(ld.iter()));
    check_applicable(mode, f, g, lo, hi)?;

    let n = lc.len();
    let premise: Verdict = if mode.is_log() {
        let avg: Vec<f64> = (0..n)
            .map(|i| ds.weights().iter().zip(&ld).map(|(w, l)| w * l[i].ln()).sum::<f64>().exp())
            .collect();
        let (y, x) = (SortedVec::new(avg)?, SortedVec::new(lc)?);
        if mode == AverageMode::Log {
            majorization::log_majorizes(&y, &x, None)?
        } else {
            majorization::weak_log_majorizes(&y, &x, None)?
        }
    } else {
        let avg: Vec<f64> = (0..n)
            .map(|i| ds.weights().iter().zip(&ld).map(|(w, l)| w * l[i]).sum())
            .collect();
        let (y, x) = (SortedVec::new(avg)?, SortedVec::new(lc)?);
        if mode == AverageMode::Strong {
            majorization::majorizes(&y, &x, None)?
        } else {
            majorization::weak_majorizes(&y, &x, None)?
        }
    };

    let lhs = ky_fan_of_map(c, f, k)?;
    let fd: Vec<f64> = ds.atoms().iter().map(|d| ky_fan_of_map(d, f, k)).collect::<Result<_>>()?;
    let rhs = if mode.is_log() {
        ds.weights().iter().zip(&fd).map(|(w, v)| w * v.ln()).sum::<f64>().exp()
    } else {
        ds.weights().iter().zip(&fd).map(|(w, v)| w * v).sum()
    };
    let conclusion_holds = lhs <= rhs + tol_for(lhs, rhs);

    let (linear_lhs, linear_rhs, linear_holds) = if mode.is_log() {
        let a = ky_fan_of_map(c, g, k)?;
        let mut b = 0.0;
        for (d, w) in ds.iter() {
            b += w * ky_fan_of_map(d, g, k)?;
        }
        (Some(a), Some(b), Some(a <= b + tol_for(a, b)))
    } else {
        (None, None, None)
    };

    Ok(AverageReport {
        mode,
        premise_holds: premise.holds,
        premise_first_failure: premise.first_failure,
        lhs,
        rhs,
        conclusion_holds,
        linear_lhs,
        linear_rhs,
        linear_holds,
    })
}

/// Random convex combination of `count` random permutations applied to `y`.
/// The result is majorized by `y`.
pub fn doubly_stochastic_mix(rng: &mut Rng, y: &[f64], count: usize) -> Vec<f64> {
    let n = y.len();
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut out = vec![0.0; n];
    for w in raw {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (o, &p) in out.iter_mut().zip(&perm) {
            *o += w / total * y[p];
        }
    }
    out
}

/// An instance whose premise holds by construction: random `D_τ`, then
/// `λ(C)` obtained from the averaged spectrum by a doubly stochastic mix (in
/// log space for the log modes) and, for the weak modes, lowered by a random
/// nonnegative amount. `C` gets a fresh random eigenbasis.
pub fn constructed_instance(
    rng: &mut Rng,
    shape: &TensorShape,
    atoms: usize,
    mode: AverageMode,
    spectrum: (f64, f64),
) -> Result<(HermitianTensor, DiscreteMeasure<HermitianTensor>)> {
    let n = shape.unfold_rows();
    let (lo, hi) = spectrum;
    let ds: Vec<HermitianTensor> = (0..atoms)
        .map(|_| {
            let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
            random::with_spectrum(rng, shape, &eigs)
        })
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..atoms - 1].iter().sum();
    weights[atoms - 1] = 1.0 - head;
    let measure = DiscreteMeasure::new(ds, weights)?;

    let spectra: Vec<Vec<f64>> = measure.atoms().iter().map(|d| d.eigenvalues()).collect::<Result<_>>()?;
    let to_space = |v: f64| if mode.is_log() { v.ln() } else { v };
    let avg: Vec<f64> = (0..n)
        .map(|i| measure.weights().iter().zip(&spectra).map(|(w, l)| w * to_space(l[i])).sum())
        .collect();
    let mut x = doubly_stochastic_mix(rng, &avg, 3);
    if matches!(mode, AverageMode::Weak | AverageMode::WeakLog) {
        // Lower each entry but stay inside the sampling range.
        let floor = if mode.is_log() { lo.ln() } else { lo };
        let width = (hi - lo).max(1e-3) * if mode.is_log() { 0.2 } else { 0.3 };
        for v in &mut x {
            let room = (*v - floor).max(0.0);
            *v -= rng.random_range(0.0..width).min(room);
        }
    }
    let eigs: Vec<f64> = if mode.is_log() {
        x.iter().map(|v| v.exp()).collect()
    } else {
        x
    };
    let c = random::with_spectrum(rng, shape, &eigs)?;
    Ok((c, measure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![1, 2], vec![0.5, 0.5]).is_ok());
        assert!(DiscreteMeasure::new(vec![1, 2], vec![0.6, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![1, 2], vec![1.0, 0.0]).is_err());
        assert!(DiscreteMeasure::new(Vec::<u8>::new(), vec![]).is_err());
        let u = DiscreteMeasure::uniform(vec![0; 7]).unwrap();
        assert!((u.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn single_atom_equality() {
        let mut r = rng::seeded(60);
        let shape = TensorShape::square(&[3]).unwrap();
        let c = random::positive(&mut r, &shape, 0.2, 2.0).unwrap();
        let ds = DiscreteMeasure::new(vec![c.clone()], vec![1.0]).unwrap();
        for mode in AverageMode::ALL {
            let rep = verify_discrete_average_majorization(&c, &ds, ScalarFunction::Exp, None, 2, mode).unwrap();
            assert!(rep.premise_holds && rep.conclusion_holds, "{mode:?}");
            assert!((rep.lhs - rep.rhs).abs() < 1e-9 * rep.rhs);
        }
    }

    #[test]
    fn commuting_average_is_tight_premise() {
        let mut r = rng::seeded(61);
        let shape = TensorShape::square(&[2, 2]).unwrap();
        let u = random::unitary_matrix(&mut r, 4);
        let a = [3.0, 2.0, 1.0, 0.5];
        let b = [2.0, 1.5, 1.0, 0.0];
        let d1 = random::with_basis(&u, &shape, &a).unwrap();
        let d2 = random::with_basis(&u, &shape, &b).unwrap();
        let avg: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.25 * x + 0.75 * y).collect();
        let c = random::with_basis(&u, &shape, &avg).unwrap();
        let ds = DiscreteMeasure::new(vec![d1, d2], vec![0.25, 0.75]).unwrap();
        let rep = verify_discrete_average_majorization(&c, &ds, ScalarFunction::Square, None, 2, AverageMode::Strong)
            .unwrap();
        assert!(rep.premise_holds && rep.conclusion_holds && !rep.violation());
    }

    #[test]
    fn inapplicable_function_is_rejected() {
        let mut r = rng::seeded(62);
        let shape = TensorShape::square(&[2]).unwrap();
        let c = random::hermitian(&mut r, &shape, 1.0).unwrap();
        let ds = DiscreteMeasure::new(vec![c.clone()], vec![1.0]).unwrap();
        // x² is not monotone on a spectrum with negative entries.
        let lo = c.eigenvalues().unwrap()[1];
        if lo < 0.0 {
            assert!(verify_discrete_average_majorization(&c, &ds, ScalarFunction::Square, None, 1, AverageMode::Weak)
                .is_err());
        }
        assert!(verify_discrete_average_majorization(
            &c,
            &ds,
            ScalarFunction::ReflectedRelu(1.0),
            None,
            1,
            AverageMode::Log
        )
        .is_err());
    }

    #[test]
    fn constructed_instances_satisfy_premise_and_conclusion() {
        let mut r = rng::seeded(63);
        let shape = TensorShape::square(&[3]).unwrap();
        let funcs = [ScalarFunction::Exp, ScalarFunction::ShiftedRelu(0.7), ScalarFunction::Square];
        for trial in 0..400 {
            let mode = AverageMode::ALL[trial % 4];
            let f = funcs[(trial / 4) % 3];
            let spectrum = if mode.is_log() || f == ScalarFunction::Square { (0.1, 3.0) } else { (-2.0, 2.0) };
            let (c, ds) = constructed_instance(&mut r, &shape, 1 + trial % 3, mode, spectrum).unwrap();
            let k = 1 + trial % 3;
            let rep = verify_discrete_average_majorization(&c, &ds, f, None, k, mode).unwrap();
            assert!(rep.premise_holds, "trial {trial}: {rep:?}");
            assert!(!rep.violation(), "trial {trial}: {rep:?}");
        }
    }
}
