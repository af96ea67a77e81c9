//! Hermitian tensors attached to the vertices of a regular graph.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::expander::RegularGraph;
use crate::rng;
use crate::tensor::io;
use crate::{random, HermitianTensor, TensorShape};

/// `g : 𝔙 → ` Hermitian tensors of one common square shape. The radius
/// `r = max_v ‖g(v)‖` is always recomputed from the tensors.
#[derive(Debug, Clone)]
pub struct VertexTensorAssignment {
    graph: RegularGraph,
    tensors: Vec<HermitianTensor>,
    radius: f64,
}

impl VertexTensorAssignment {
    pub fn new(graph: RegularGraph, tensors: Vec<HermitianTensor>) -> Result<Self> {
        if tensors.len() != graph.vertex_count() {
            return arg_err(format!(
                "{} tensors for {} vertices",
                tensors.len(),
                graph.vertex_count()
            ));
        }
        let shape = tensors[0].shape().clone();
        if let Some(v) = tensors.iter().position(|g| g.shape() != &shape) {
            return Err(Error::Shape(format!("tensor at vertex {v} has shape {:?}, expected {shape:?}", tensors[v].shape())));
        }
        let mut radius: f64 = 0.0;
        for g in &tensors {
            radius = radius.max(g.spectral_norm()?);
        }
        Ok(Self { graph, tensors, radius })
    }

    /// Independent random Hermitian tensors of shape `dims × dims`, each
    /// rescaled to spectral norm exactly `radius`.
    pub fn random(graph: RegularGraph, dims: &[usize], radius: f64, seed: u64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return arg_err(format!("radius must be nonnegative, got {radius}"));
        }
        let shape = TensorShape::square(dims)?;
        let mut tensors = Vec::with_capacity(graph.vertex_count());
        for v in 0..graph.vertex_count() {
            let mut rng = rng::stream(seed, v as u64);
            let g = random::hermitian(&mut rng, &shape, 1.0)?;
            let norm = g.spectral_norm()?;
            tensors.push(if norm > 0.0 { g.scale(radius / norm) } else { g });
        }
        Self::new(graph, tensors)
    }

    /// The same tensor at every vertex.
    pub fn constant(graph: RegularGraph, g: HermitianTensor) -> Result<Self> {
        let tensors = vec![g; graph.vertex_count()];
        Self::new(graph, tensors)
    }

    pub fn graph(&self) -> &RegularGraph {
        &self.graph
    }

    pub fn tensors(&self) -> &[HermitianTensor] {
        &self.tensors
    }

    pub fn tensor(&self, v: usize) -> &HermitianTensor {
        &self.tensors[v]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn shape(&self) -> &TensorShape {
        self.tensors[0].shape()
    }

    /// Square unfolding size `𝕀₁ᴹ`.
    pub fn dim(&self) -> usize {
        self.tensors[0].dim()
    }

    /// Writes one tensor file per vertex plus `manifest.txt` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let mut manifest = String::from("# vertex file\n");
        for (v, g) in self.tensors.iter().enumerate() {
            let name = format!("g{v}.tensor");
            io::write_file(&dir.join(&name), g.as_tensor())?;
            let _ = writeln!(manifest, "{v} {name}");
        }
        let path = dir.join("manifest.txt");
        std::fs::write(&path, manifest)?;
        Ok(path)
    }

    /// Reads a manifest of `vertex path` lines; relative paths resolve
    /// against the manifest's directory. Every vertex must appear once.
    pub fn load(graph: RegularGraph, manifest: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(manifest).map_err(|e| Error::Io(format!("{}: {e}", manifest.display())))?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        let n = graph.vertex_count();
        let mut slots: Vec<Option<HermitianTensor>> = vec![None; n];
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Config(format!("{} line {}: {msg}", manifest.display(), i + 1));
            let mut parts = line.splitn(2, char::is_whitespace);
            let v: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("expected `vertex path`, got {line:?}")))?;
            let file = parts.next().map(str::trim).filter(|s| !s.is_empty()).ok_or_else(|| bad("missing path".into()))?;
            if v >= n {
                return Err(bad(format!("vertex {v} out of range 0..{n}")));
            }
            if slots[v].is_some() {
                return Err(bad(format!("vertex {v} listed twice")));
            }
            let t = io::read_file(&base.join(file))?;
            slots[v] = Some(HermitianTensor::new(t).map_err(|e| bad(e.to_string()))?);
        }
        let tensors = slots
            .into_iter()
            .enumerate()
            .map(|(v, g)| g.ok_or_else(|| Error::Config(format!("{}: vertex {v} has no tensor", manifest.display()))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph, tensors)
    }
}

/// How an experiment obtains its vertex tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssignmentSpec {
    /// Random tensors of shape `dims × dims`, each of spectral norm `radius`.
    Random { dims: Vec<usize>, radius: f64, seed: Option<u64> },
    Manifest { path: PathBuf },
}

impl AssignmentSpec {
    pub fn build(&self, graph: RegularGraph, master_seed: u64) -> Result<VertexTensorAssignment> {
        match self {
            AssignmentSpec::Random { dims, radius, seed } => VertexTensorAssignment::random(
                graph,
                dims,
                *radius,
                seed.unwrap_or_else(|| rng::derive_seed(master_seed, "assignment")),
            ),
            AssignmentSpec::Manifest { path } => VertexTensorAssignment::load(graph, path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::gen_complete;

    #[test]
    fn random_assignment_has_requested_radius() {
        let a = VertexTensorAssignment::random(gen_complete(4).unwrap(), &[2, 2], 1.0, 3).unwrap();
        assert_eq!(a.dim(), 4);
        assert!((a.radius() - 1.0).abs() < 1e-12);
        for g in a.tensors() {
            assert!((g.spectral_norm().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = VertexTensorAssignment::random(gen_complete(3).unwrap(), &[2], 0.5, 8).unwrap();
        let manifest = a.save(dir.path()).unwrap();
        let b = VertexTensorAssignment::load(gen_complete(3).unwrap(), &manifest).unwrap();
        for (x, y) in a.tensors().iter().zip(b.tensors()) {
            assert_eq!(x.unfolding(), y.unfolding());
        }
        std::fs::write(&manifest, "0 g0.tensor\n1 g1.tensor\n").unwrap();
        let err = VertexTensorAssignment::load(gen_complete(3).unwrap(), &manifest).unwrap_err();
        assert!(err.to_string().contains("vertex 2"));
    }

    #[test]
    fn wrong_count_is_rejected() {
        let g = HermitianTensor::identity(&TensorShape::square(&[2]).unwrap()).unwrap();
        assert!(VertexTensorAssignment::new(gen_complete(3).unwrap(), vec![g]).is_err());
    }
}
