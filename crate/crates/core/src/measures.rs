//! Finite representations of probability measures.
//!
//! Discrete targets are atoms with weights. Absolutely continuous sources are
//! modelled by weighted node clouds ([`QuadratureMeasure`]); such clouds stand
//! in for c-regular measures, which cannot be verified on a finite sample (see
//! [`crate::semidiscrete::SemiDiscrete::tie_mass_diagnostic`] for the finite proxy).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cost::Point;
use crate::error::{Error, Result};

pub const MASS_TOL: f64 = 1e-12;

/// Points per axis of the grid used to discretize a perturbation disk.
pub const DISK_RESOLUTION: usize = 12;

fn check_weights(weights: &[f64]) -> Result<f64> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidInput(format!("invalid weight {w}")));
    }
    Ok(weights.iter().sum())
}

/// `Σ α_i δ_{u_i}` with pairwise distinct atoms.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    atoms: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() || atoms.is_empty() {
            return Err(Error::InvalidInput(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        let total = check_weights(&weights)?;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        let mut seen = HashSet::with_capacity(atoms.len());
        for a in &atoms {
            if !seen.insert(a.key()) {
                return Err(Error::InvalidInput(format!("duplicate atom {a}")));
            }
        }
        Ok(Self { atoms, weights })
    }

    /// Equal weights `1/n`.
    pub fn uniform(atoms: Vec<Point>) -> Result<Self> {
        let n = atoms.len();
        Self::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Grid { resolution: Vec<usize> },
    Samples,
}

/// Weighted node cloud approximating an absolutely continuous measure.
#[derive(Clone, Debug)]
pub struct QuadratureMeasure {
    nodes: Vec<Point>,
    weights: Vec<f64>,
    provenance: Provenance,
}

impl QuadratureMeasure {
    /// Weights are normalized to sum to one.
    pub fn new(nodes: Vec<Point>, weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidInput(format!("{} nodes but {} weights", nodes.len(), weights.len())));
        }
        let d = nodes[0].dim();
        if let Some(p) = nodes.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
        let total = check_weights(&weights)?;
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { nodes, weights, provenance })
    }

    /// Midpoint grid on the box `bounds` with `resolution[k]` cells along axis
    /// `k`; each node weighs `density(node)` times the cell volume. Nodes with
    /// zero density are dropped.
    pub fn grid(bounds: &[(f64, f64)], resolution: &[usize], density: impl Fn(&Point) -> f64) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != resolution.len() {
            return Err(Error::InvalidInput("grid bounds/resolution mismatch".into()));
        }
        if resolution.contains(&0) || bounds.iter().any(|(lo, hi)| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::InvalidInput("degenerate grid".into()));
        }
        let steps: Vec<f64> = bounds.iter().zip(resolution).map(|((lo, hi), n)| (hi - lo) / *n as f64).collect();
        let volume: f64 = steps.iter().product();
        let total: usize = resolution.iter().product();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; resolution.len()];
        for _ in 0..total {
            let coords: Vec<f64> =
                idx.iter().zip(bounds).zip(&steps).map(|((k, (lo, _)), h)| lo + (*k as f64 + 0.5) * h).collect();
            let p = Point::new(coords);
            let w = density(&p) * volume;
            if w > 0.0 {
                nodes.push(p);
                weights.push(w);
            }
            // odometer, last axis fastest
            for axis in (0..idx.len()).rev() {
                idx[axis] += 1;
                if idx[axis] < resolution[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        if nodes.is_empty() {
            return Err(Error::ZeroMass);
        }
        Self::new(nodes, weights, Provenance::Grid { resolution: resolution.to_vec() })
    }

    /// Equal-weight samples.
    pub fn from_samples(nodes: Vec<Point>) -> Result<Self> {
        let n = nodes.len();
        Self::new(nodes, vec![1.0; n], Provenance::Samples)
    }

    pub fn from_discrete(m: &DiscreteMeasure) -> Self {
        Self { nodes: m.atoms.clone(), weights: m.weights.clone(), provenance: Provenance::Samples }
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].dim()
    }

    /// `μ({x : pred(x)})`, summed in node order.
    pub fn mass(&self, pred: impl Fn(&Point) -> bool) -> f64 {
        self.nodes.iter().zip(&self.weights).filter(|(p, _)| pred(p)).map(|(_, w)| w).sum()
    }

    /// `μ|_A / μ(A)` for `A = {pred}`.
    pub fn restrict_normalize(&self, pred: impl Fn(&Point) -> bool) -> Result<Self> {
        let (nodes, weights): (Vec<_>, Vec<_>) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(p, w)| **w > 0.0 && pred(p))
            .map(|(p, w)| (p.clone(), *w))
            .unzip();
        if nodes.is_empty() {
            return Err(Error::ZeroMass);
        }
        Self::new(nodes, weights, self.provenance.clone())
    }

    /// `(1/k) Σ η_d + (1 - 1/k) μ` where the `η_d` are uniform on the disks and
    /// share total mass one equally.
    pub fn perturb_mix(&self, disks: &[Disk], k: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput("mixing index k must be >= 1".into()));
        }
        if disks.is_empty() {
            return Err(Error::InvalidInput("no perturbation disks".into()));
        }
        let inv_k = 1.0 / k as f64;
        let per_disk = inv_k / disks.len() as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for disk in disks {
            if disk.center.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: disk.center.dim() });
            }
            let pts = disk.nodes();
            let w = per_disk / pts.len() as f64;
            weights.extend(std::iter::repeat_n(w, pts.len()));
            nodes.extend(pts);
        }
        nodes.extend(self.nodes.iter().cloned());
        weights.extend(self.weights.iter().map(|w| w * (1.0 - inv_k)));
        Self::new(nodes, weights, Provenance::Samples)
    }
}

/// A ball `B(center, radius)` carrying the uniform perturbation measure for
/// the atom pair `label`.
#[derive(Clone, Debug)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
    pub label: (usize, usize),
}

impl Disk {
    pub fn new(center: Point, radius: f64, label: (usize, usize)) -> Self {
        assert!(radius > 0.0, "disk radius must be positive");
        Self { center, radius, label }
    }

    /// Midpoint grid nodes of the bounding cube that fall strictly inside the ball.
    pub fn nodes(&self) -> Vec<Point> {
        let d = self.center.dim();
        let n = DISK_RESOLUTION;
        let h = 2.0 * self.radius / n as f64;
        let mut out = Vec::new();
        let mut idx = vec![0usize; d];
        for _ in 0..n.pow(d as u32) {
            let offset: Vec<f64> = idx.iter().map(|k| -self.radius + (*k as f64 + 0.5) * h).collect();
            let r2: f64 = offset.iter().map(|v| v * v).sum();
            if r2 < self.radius * self.radius {
                let c = self.center.coords().iter().zip(&offset).map(|(a, b)| a + b).collect::<Vec<_>>();
                out.push(Point::new(c));
            }
            for axis in (0..d).rev() {
                idx[axis] += 1;
                if idx[axis] < n {
                    break;
                }
                idx[axis] = 0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_half_two(n: usize) -> QuadratureMeasure {
        QuadratureMeasure::grid(&[(0.5, 2.0)], &[n], |_| 1.0).unwrap()
    }

    #[test]
    fn mass_of_upper_interval() {
        let mu = uniform_half_two(1500);
        // exact: (2 - 1) * (2/3); node spacing 1e-3 puts no node on x = 1
        assert!((mu.mass(|p| p.coords()[0] > 1.0) - 2.0 / 3.0).abs() < 1e-9);
        assert!((mu.mass(|_| true) - 1.0).abs() < 1e-12);
        assert_eq!(mu.mass(|_| false), 0.0);
    }

    #[test]
    fn restrict_to_upper_half() {
        let mu = uniform_half_two(300);
        let r = mu.restrict_normalize(|p| p.coords()[0] > 1.0).unwrap();
        assert!(r.nodes().iter().all(|p| p.coords()[0] > 1.0));
        assert!((r.mass(|_| true) - 1.0).abs() < 1e-12);
        let same = mu.restrict_normalize(|_| true).unwrap();
        assert_eq!(same.nodes(), mu.nodes());
        for (a, b) in same.weights().iter().zip(mu.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(matches!(mu.restrict_normalize(|_| false), Err(Error::ZeroMass)));
    }

    #[test]
    fn restrict_piecewise_density_to_dense_part() {
        let mu =
            QuadratureMeasure::grid(&[(0.5, 2.0)], &[600], |p| if p.coords()[0] <= 1.0 { 1.0 } else { 0.5 }).unwrap();
        assert!((mu.mass(|p| p.coords()[0] <= 1.0) - 0.5).abs() < 1e-12);
        let r = mu.restrict_normalize(|p| p.coords()[0] <= 1.0).unwrap();
        let w0 = r.weights()[0];
        assert!(r.weights().iter().all(|w| (w - w0).abs() < 1e-15));
        assert_eq!(r.len(), 200);
    }

    #[test]
    fn perturb_mix_coefficients() {
        let mu = uniform_half_two(100);
        let disk = Disk::new(Point::scalar(1.5), 0.1, (0, 1));
        let n_disk = disk.nodes().len();

        let k2 = mu.perturb_mix(std::slice::from_ref(&disk), 2).unwrap();
        let disk_mass: f64 = k2.weights()[..n_disk].iter().sum();
        assert!((disk_mass - 0.5).abs() < 1e-12);
        assert!((k2.weights()[n_disk..].iter().sum::<f64>() - 0.5).abs() < 1e-12);

        let k1 = mu.perturb_mix(std::slice::from_ref(&disk), 1).unwrap();
        assert!(k1.weights()[n_disk..].iter().all(|w| *w == 0.0));

        let big = mu.perturb_mix(std::slice::from_ref(&disk), 1_000_000).unwrap();
        assert!(big.weights()[..n_disk].iter().sum::<f64>() <= 1e-6 + 1e-15);

        assert!(mu.perturb_mix(&[], 3).is_err());
        assert!(mu.perturb_mix(std::slice::from_ref(&disk), 0).is_err());
    }

    #[test]
    fn disk_nodes_inside_ball() {
        let d = Disk::new(Point::new([1.0, 1.0]), 0.25, (0, 1));
        let nodes = d.nodes();
        assert!(!nodes.is_empty());
        for p in nodes {
            let c = p.coords();
            assert!((c[0] - 1.0).powi(2) + (c[1] - 1.0).powi(2) < 0.0625);
        }
    }

    #[test]
    fn discrete_measure_validation() {
        let atoms = vec![Point::scalar(0.0), Point::scalar(1.0)];
        assert!(DiscreteMeasure::new(atoms.clone(), vec![0.5, 0.4]).is_err());
        assert!(DiscreteMeasure::new(vec![Point::scalar(0.0); 2], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(atoms, vec![0.5, 0.5]).is_ok());
    }

    proptest! {
        #[test]
        fn mass_additive_and_mix_normalized(
            pts in proptest::collection::vec(-2.0f64..2.0, 1..60),
            cut in -2.0f64..2.0,
            k in 1u64..10_000,
        ) {
            let mu = QuadratureMeasure::from_samples(pts.into_iter().map(Point::scalar).collect()).unwrap();
            let left = mu.mass(|p| p.coords()[0] < cut);
            let right = mu.mass(|p| p.coords()[0] >= cut);
            prop_assert!((left + right - mu.mass(|_| true)).abs() < 1e-12);
            let mixed = mu.perturb_mix(&[Disk::new(Point::scalar(0.0), 0.5, (0, 1))], k).unwrap();
            prop_assert!((mixed.mass(|_| true) - 1.0).abs() < 1e-12);
            if left > 0.0 {
                let r = mu.restrict_normalize(|p| p.coords()[0] < cut).unwrap();
                prop_assert!((r.mass(|_| true) - 1.0).abs() < 1e-12);
            }
        }
    }
}
