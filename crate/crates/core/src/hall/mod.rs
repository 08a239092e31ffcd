//! Hall polytopes of a source measure against finitely many target atoms.
//!
//! For atoms `u_1..u_m` let `A_I = {x : c(x, u_i) < ∞ for some i ∈ I}`. The
//! Hall polytope is
//!
//! ```text
//! P = { α ∈ Δ_m : Σ_{i∈I} α_i ≤ μ(A_I) for every I ⊆ [m] }
//! ```
//!
//! and `ν = Σ α_i δ_{u_i}` is c-compatible with `μ` iff `α ∈ P`, strongly
//! c-compatible iff `α` is in the relative interior. Subsets `I` are bitmasks
//! (bit `i` is atom `i`).
//!
//! `I ↦ μ(A_I)` is a coverage function, hence monotone and submodular, so `P`
//! is its base polytope and the greedy orderings enumerate its vertices.

pub mod geometry;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, Point};
use crate::error::{Error, Result};
use crate::measures::QuadratureMeasure;
use geometry::HPolytope;

pub const MAX_ATOMS: usize = 20;
/// Greedy vertex enumeration walks all `m!` orderings.
pub const MAX_VERTEX_ATOMS: usize = 9;
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn indices_to_mask(indices: &[usize]) -> u32 {
    indices.iter().fold(0, |m, i| m | (1 << i))
}

/// Finiteness bitmask of every node against the atoms.
pub(crate) fn node_masks(mu: &QuadratureMeasure, us: &[Point], c: &CostFunction) -> Result<Vec<u32>> {
    mu.nodes()
        .par_iter()
        .map(|x| {
            let mut mask = 0u32;
            for (i, u) in us.iter().enumerate() {
                if c.eval(x, u)?.is_finite() {
                    mask |= 1 << i;
                }
            }
            Ok(mask)
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Source {
    measure: QuadratureMeasure,
    supports: Vec<Point>,
    cost: CostFunction,
    masks: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct HallPolytope {
    m: usize,
    masses: Vec<f64>,
    source: Option<Source>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum Classification {
    Interior,
    /// Subsets whose inequality holds with equality.
    Boundary {
        active: Vec<u32>,
    },
    Exterior {
        violated: Vec<u32>,
    },
}

/// `F_I` factored as `μ(A_I) P_I × μ(A_I^c) P̂_I`; a `None` factor is `{0}`.
#[derive(Clone, Debug)]
pub struct FaceDescriptor {
    pub index_set: u32,
    pub mass_inside: f64,
    pub mass_outside: f64,
    pub inner: Option<HallPolytope>,
    pub outer: Option<HallPolytope>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nondegeneracy {
    pub nondegenerate: bool,
    /// First pair `(i, j)`, `i < j`, whose finiteness sets meet in a null set.
    pub witness: Option<(usize, usize)>,
}

impl HallPolytope {
    /// Mass table from the node sweep: each node's finiteness bitmask adds its
    /// weight to one bucket, and a subset-sum transform turns buckets into
    /// `μ(A_I) = 1 - μ({x : mask(x) ⊆ I^c})`.
    pub fn build(mu: &QuadratureMeasure, us: &[Point], c: &CostFunction) -> Result<Self> {
        let m = us.len();
        if m == 0 {
            return Err(Error::InvalidInput("no target atoms".into()));
        }
        if m > MAX_ATOMS {
            return Err(Error::TooManyAtoms(m));
        }
        let masks = node_masks(mu, us, c)?;
        let mut buckets = vec![0.0f64; 1 << m];
        for (node, (&mask, &w)) in masks.iter().zip(mu.weights()).enumerate() {
            if mask == 0 && w > 0.0 {
                return Err(Error::Uncovered { node });
            }
            buckets[mask as usize] += w;
        }
        // zeta transform: buckets[S] <- Σ_{T ⊆ S} buckets[T]
        for bit in 0..m {
            for s in 0..(1usize << m) {
                if s & (1 << bit) != 0 {
                    buckets[s] += buckets[s ^ (1 << bit)];
                }
            }
        }
        let full = (1usize << m) - 1;
        let total = buckets[full];
        let masses = (0..=full).map(|i| (total - buckets[full ^ i]) / total).collect();
        Ok(Self {
            m,
            masses,
            source: Some(Source { measure: mu.clone(), supports: us.to_vec(), cost: c.clone(), masks }),
        })
    }

    /// Polytope from an explicit table; `masses[I]` for all `2^m` masks.
    pub fn from_masses(m: usize, masses: Vec<f64>) -> Result<Self> {
        if m == 0 || m > MAX_ATOMS || masses.len() != 1 << m {
            return Err(Error::InvalidInput(format!("mass table of {} entries for m = {m}", masses.len())));
        }
        let full = (1usize << m) - 1;
        if masses[0].abs() > 1e-12 || (masses[full] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("mass table must have m(∅) = 0 and m([m]) = 1".into()));
        }
        for i in 0..=full {
            for bit in 0..m {
                let j = i | (1 << bit);
                if masses[i] > masses[j] + 1e-12 {
                    return Err(Error::InvalidInput(format!("mass table not monotone at {i:#b} ⊆ {j:#b}")));
                }
            }
        }
        Ok(Self { m, masses, source: None })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.m) - 1) as u32
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `μ(A_I)`.
    pub fn mass(&self, subset: u32) -> f64 {
        self.masses[subset as usize]
    }

    pub fn supports(&self) -> Option<&[Point]> {
        self.source.as_ref().map(|s| s.supports.as_slice())
    }

    pub fn source(&self) -> Option<&QuadratureMeasure> {
        self.source.as_ref().map(|s| &s.measure)
    }

    /// `(I, μ(A_I))` for every nonempty proper `I`.
    pub fn inequalities(&self) -> Vec<(u32, f64)> {
        (1..self.full_mask()).map(|i| (i, self.mass(i))).collect()
    }

    pub fn classify(&self, alpha: &[f64], tol: f64) -> Result<Classification> {
        if alpha.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: alpha.len() });
        }
        let sum: f64 = alpha.iter().sum();
        if alpha.iter().any(|a| !a.is_finite() || *a < -tol) || (sum - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!("{alpha:?} is not a probability vector")));
        }
        let mut active = Vec::new();
        let mut violated = Vec::new();
        for (subset, bound) in self.inequalities() {
            let s: f64 = mask_to_indices(subset).iter().map(|&i| alpha[i]).sum();
            if s > bound + tol {
                violated.push(subset);
            } else if (s - bound).abs() <= tol {
                active.push(subset);
            }
        }
        Ok(if !violated.is_empty() {
            Classification::Exterior { violated }
        } else if !active.is_empty() {
            Classification::Boundary { active }
        } else {
            Classification::Interior
        })
    }

    /// Vertices by the greedy rule: for an ordering `σ`, set
    /// `α_σ(k) = μ(A_{σ(1..k)}) - μ(A_{σ(1..k-1)})`.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        if self.m > MAX_VERTEX_ATOMS {
            return Err(Error::InvalidInput(format!("vertex enumeration capped at m = {MAX_VERTEX_ATOMS}")));
        }
        let mut out = Vec::new();
        for order in (0..self.m).permutations(self.m) {
            let mut alpha = vec![0.0; self.m];
            let mut prefix = 0u32;
            for &i in &order {
                let next = prefix | (1 << i);
                alpha[i] = self.mass(next) - self.mass(prefix);
                prefix = next;
            }
            geometry::push_unique(&mut out, alpha, 1e-12);
        }
        Ok(out)
    }

    /// H-description on `ℝ^m`: one row per nonempty proper `I`, plus `Σ α = 1`.
    /// Nonnegativity follows from monotonicity of the table.
    pub fn h_polytope(&self) -> HPolytope {
        let m = self.m;
        let ineq = self
            .inequalities()
            .into_iter()
            .map(|(subset, b)| {
                let row = (0..m).map(|i| if subset & (1 << i) != 0 { 1.0 } else { 0.0 }).collect();
                (row, b)
            })
            .collect();
        HPolytope { dim: m, ineq, eq: vec![(vec![1.0; m], 1.0)] }
    }

    /// Vertices of `F_I`, the face where `I`'s inequality is tight.
    pub fn face_vertices(&self, subset: u32, tol: f64) -> Result<Vec<Vec<f64>>> {
        let idx = mask_to_indices(subset);
        Ok(self
            .vertices()?
            .into_iter()
            .filter(|v| (idx.iter().map(|&i| v[i]).sum::<f64>() - self.mass(subset)).abs() <= tol)
            .collect())
    }

    /// Affine dimension of `P`, from the rank of its vertex set.
    pub fn dimension(&self) -> Result<usize> {
        let v = self.vertices()?;
        geometry::affine_dimension(&v, DEFAULT_TOL).ok_or(Error::EmptyPolytope)
    }

    pub fn hausdorff_distance(&self, other: &HallPolytope) -> Result<f64> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: other.m });
        }
        geometry::hausdorff(&self.vertices()?, &self.h_polytope(), &other.vertices()?, &other.h_polytope(), 1e-12)
            .ok_or(Error::EmptyPolytope)
    }

    /// Splits `F_I` into the Hall polytope of `μ|_{A_I}` against `(u_i)_{i∈I}`
    /// and that of `μ|_{A_I^c}` against the remaining atoms.
    pub fn split_face(&self, subset: u32) -> Result<FaceDescriptor> {
        if subset == 0 || subset == self.full_mask() {
            return Err(Error::InvalidInput("face index set must be nonempty and proper".into()));
        }
        let src =
            self.source.as_ref().ok_or_else(|| Error::Precondition("splitting needs the source measure".into()))?;
        let inside: Vec<usize> = mask_to_indices(subset);
        let outside: Vec<usize> = mask_to_indices(self.full_mask() & !subset);
        let restricted = |keep: &dyn Fn(u32) -> bool, atoms: &[usize]| -> Result<Option<HallPolytope>> {
            let (nodes, weights): (Vec<Point>, Vec<f64>) = src
                .measure
                .nodes()
                .iter()
                .zip(src.measure.weights())
                .zip(&src.masks)
                .filter(|((_, w), mask)| **w > 0.0 && keep(**mask))
                .map(|((p, w), _)| (p.clone(), *w))
                .unzip();
            if nodes.is_empty() {
                return Ok(None);
            }
            let mu = QuadratureMeasure::new(nodes, weights, src.measure.provenance().clone())?;
            let us: Vec<Point> = atoms.iter().map(|&i| src.supports[i].clone()).collect();
            HallPolytope::build(&mu, &us, &src.cost).map(Some)
        };
        let inner = restricted(&|mask| mask & subset != 0, &inside)?;
        let outer = restricted(&|mask| mask & subset == 0, &outside)?;
        let mass_inside = self.mass(subset);
        Ok(FaceDescriptor { index_set: subset, mass_inside, mass_outside: 1.0 - mass_inside, inner, outer })
    }
}

impl FaceDescriptor {
    /// Vertices of `μ(A_I) P_I ×_I μ(A_I^c) P̂_I`, embedded in `ℝ^m`.
    pub fn product_vertices(&self, m: usize) -> Result<Vec<Vec<f64>>> {
        let inside = mask_to_indices(self.index_set);
        let outside: Vec<usize> = (0..m).filter(|i| !inside.contains(i)).collect();
        let factor = |p: &Option<HallPolytope>, len: usize| -> Result<Vec<Vec<f64>>> {
            match p {
                Some(p) => p.vertices(),
                None => Ok(vec![vec![0.0; len]]),
            }
        };
        let vin = factor(&self.inner, inside.len())?;
        let vout = factor(&self.outer, outside.len())?;
        let mut out = Vec::new();
        for a in &vin {
            for b in &vout {
                let mut v = vec![0.0; m];
                for (k, &i) in inside.iter().enumerate() {
                    v[i] = self.mass_inside * a[k];
                }
                for (k, &i) in outside.iter().enumerate() {
                    v[i] = self.mass_outside * b[k];
                }
                out.push(v);
            }
        }
        Ok(out)
    }
}

pub fn build_polytope(mu: &QuadratureMeasure, us: &[Point], c: &CostFunction) -> Result<HallPolytope> {
    HallPolytope::build(mu, us, c)
}

/// Every pair of finiteness sets must meet in positive mass.
pub fn check_nondegenerate(mu: &QuadratureMeasure, us: &[Point], c: &CostFunction) -> Result<Nondegeneracy> {
    let masks = node_masks(mu, us, c)?;
    let m = us.len();
    for i in 0..m {
        for j in i + 1..m {
            let both = (1u32 << i) | (1u32 << j);
            let mass: f64 =
                masks.iter().zip(mu.weights()).filter(|(mask, _)| *mask & both == both).map(|(_, w)| w).sum();
            if mass <= 0.0 {
                return Ok(Nondegeneracy { nondegenerate: false, witness: Some((i, j)) });
            }
        }
    }
    Ok(Nondegeneracy { nondegenerate: true, witness: None })
}

/// `K^c = {j : c(x_i, y_j) = +∞ for all i ∈ K}`.
pub fn c_dual_set(k: &[usize], ground_x: &[Point], c: &CostFunction, ground_y: &[Point]) -> Result<Vec<usize>> {
    if let Some(&bad) = k.iter().find(|&&i| i >= ground_x.len()) {
        return Err(Error::InvalidInput(format!("index {bad} outside the ground set")));
    }
    let mut out = Vec::new();
    'y: for (j, y) in ground_y.iter().enumerate() {
        for &i in k {
            if c.eval(&ground_x[i], y)?.is_finite() {
                continue 'y;
            }
        }
        out.push(j);
    }
    Ok(out)
}
