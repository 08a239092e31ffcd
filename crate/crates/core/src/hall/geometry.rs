//! Small dense polytope routines in `ℝ^m`, sized for `m ≤ 6`.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

/// `{x : a_k·x ≤ b_k, e_l·x = f_l}`.
#[derive(Clone, Debug)]
pub struct HPolytope {
    pub dim: usize,
    pub ineq: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl HPolytope {
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.ineq.iter().all(|(a, b)| dot(a, x) <= b + tol) && self.eq.iter().all(|(a, b)| (dot(a, x) - b).abs() <= tol)
    }

    /// Solves the square system `rows·x = rhs`; `None` when it is singular.
    fn solve_square(rows: &[&(Vec<f64>, f64)], dim: usize) -> Option<Vec<f64>> {
        let a = DMatrix::from_fn(dim, dim, |i, j| rows[i].0[j]);
        let b = DVector::from_fn(dim, |i, _| rows[i].1);
        let x = a.clone().lu().solve(&b)?;
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        // reject near-singular solves
        let resid = (&a * &x - &b).amax();
        (resid <= 1e-9).then(|| x.iter().copied().collect())
    }

    /// Every basic feasible point: pick `dim - eq` inequalities to hold with
    /// equality, solve, keep the feasible solutions. Exponential; an oracle
    /// for small `dim`.
    pub fn vertices_by_bases(&self, tol: f64) -> Vec<Vec<f64>> {
        let k = self.dim.saturating_sub(self.eq.len());
        let mut out: Vec<Vec<f64>> = Vec::new();
        for chosen in (0..self.ineq.len()).combinations(k) {
            let mut rows: Vec<&(Vec<f64>, f64)> = self.eq.iter().collect();
            rows.extend(chosen.iter().map(|&i| &self.ineq[i]));
            if let Some(x) = Self::solve_square(&rows, self.dim) {
                if self.contains(&x, tol) {
                    push_unique(&mut out, x, tol);
                }
            }
        }
        out
    }

    /// Euclidean projection: the nearest feasible point among projections onto
    /// the affine hulls of all active sets.
    pub fn project(&self, x: &[f64], tol: f64) -> Option<Vec<f64>> {
        let free = self.dim.saturating_sub(self.eq.len());
        let mut best: Option<(f64, Vec<f64>)> = None;
        for size in 0..=free {
            for chosen in (0..self.ineq.len()).combinations(size) {
                let mut rows: Vec<&(Vec<f64>, f64)> = self.eq.iter().collect();
                rows.extend(chosen.iter().map(|&i| &self.ineq[i]));
                let Some(p) = project_affine(&rows, x, self.dim) else { continue };
                if !self.contains(&p, tol) {
                    continue;
                }
                let d = dist(&p, x);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, p));
                }
            }
        }
        best.map(|(_, p)| p)
    }

    pub fn distance(&self, x: &[f64], tol: f64) -> Option<f64> {
        self.project(x, tol).map(|p| dist(&p, x))
    }
}

/// Projection onto `{y : rows·y = rhs}`; `None` if the rows are dependent.
fn project_affine(rows: &[&(Vec<f64>, f64)], x: &[f64], dim: usize) -> Option<Vec<f64>> {
    if rows.is_empty() {
        return Some(x.to_vec());
    }
    let r = rows.len();
    let b = DMatrix::from_fn(r, dim, |i, j| rows[i].0[j]);
    let xv = DVector::from_column_slice(x);
    let d = DVector::from_fn(r, |i, _| rows[i].1);
    let gram = &b * b.transpose();
    if gram.determinant().abs() < 1e-12 {
        return None;
    }
    let lambda = gram.lu().solve(&(&b * &xv - d))?;
    let p = xv - b.transpose() * lambda;
    Some(p.iter().copied().collect())
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn push_unique(points: &mut Vec<Vec<f64>>, p: Vec<f64>, tol: f64) {
    if !points.iter().any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol)) {
        points.push(p);
    }
}

/// Affine dimension of a point set, by singular values of the differences.
pub fn affine_dimension(points: &[Vec<f64>], tol: f64) -> Option<usize> {
    let first = points.first()?;
    if points.len() == 1 {
        return Some(0);
    }
    let dim = first.len();
    let diffs = DMatrix::from_fn(points.len() - 1, dim, |i, j| points[i + 1][j] - first[j]);
    Some(diffs.svd(false, false).rank(tol))
}

/// Symmetric Hausdorff distance between two polytopes given by vertices and
/// H-descriptions. The distance to a convex set is convex, so its maximum over
/// a polytope is attained at a vertex.
pub fn hausdorff(
    p_vertices: &[Vec<f64>],
    p: &HPolytope,
    q_vertices: &[Vec<f64>],
    q: &HPolytope,
    tol: f64,
) -> Option<f64> {
    let mut h = 0.0f64;
    for v in p_vertices {
        h = h.max(q.distance(v, tol)?);
    }
    for v in q_vertices {
        h = h.max(p.distance(v, tol)?);
    }
    Some(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(m: usize) -> HPolytope {
        HPolytope {
            dim: m,
            ineq: (0..m)
                .map(|i| {
                    let mut a = vec![0.0; m];
                    a[i] = -1.0;
                    (a, 0.0)
                })
                .collect(),
            eq: vec![(vec![1.0; m], 1.0)],
        }
    }

    #[test]
    fn simplex_vertices_and_dimension() {
        let v = simplex(3).vertices_by_bases(1e-12);
        assert_eq!(v.len(), 3);
        assert_eq!(affine_dimension(&v, 1e-9), Some(2));
    }

    #[test]
    fn projection_onto_simplex() {
        let s = simplex(2);
        let p = s.project(&[2.0, 0.0], 1e-12).unwrap();
        assert!(dist(&p, &[1.0, 0.0]) < 1e-12);
        let d = s.distance(&[0.75, 0.25], 1e-12).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn hausdorff_of_segments() {
        let big = simplex(2);
        let mut small = simplex(2);
        small.ineq.push((vec![1.0, 0.0], 0.75));
        let vb = big.vertices_by_bases(1e-12);
        let vs = small.vertices_by_bases(1e-12);
        let h = hausdorff(&vb, &big, &vs, &small, 1e-12).unwrap();
        // (1,0) is sqrt(2)/4 away from (3/4,1/4)
        assert!((h - 2f64.sqrt() / 4.0).abs() < 1e-12);
    }
}
