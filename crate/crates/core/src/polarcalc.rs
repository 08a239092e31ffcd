//! Calculus of the polar cost on geometric convex functions (convex,
//! nonnegative, zero at the origin): the A-transform
//! `Aφ(y) = sup { (⟨x,y⟩ - 1) / φ(x) : ⟨x,y⟩ > 1 }`, the polar subgradient
//! `∂°φ(x) = { y : φ(x) Aφ(y) = ⟨x,y⟩ - 1 > 0 }`, and the conversions between
//! classical and polar subgradients.
//!
//! Suprema are taken over explicit grids with optional zoom refinement.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{dot, Point};
use crate::error::{Error, Result};

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum GeomConvexFn {
    /// `max(0, max_j ⟨a_j, x⟩ + b_j)`.
    PiecewiseAffine {
        pieces: Vec<(Vec<f64>, f64)>,
    },
    /// `|x|² / 2` in dimension `dim`.
    HalfSquare {
        dim: usize,
    },
    /// `0` on the box `[lower, upper]`, `+∞` outside.
    Indicator {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    BlackBox {
        dim: usize,
        f: Evaluator,
    },
}

impl fmt::Debug for GeomConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PiecewiseAffine { pieces } => f.debug_struct("PiecewiseAffine").field("pieces", pieces).finish(),
            Self::HalfSquare { dim } => f.debug_struct("HalfSquare").field("dim", dim).finish(),
            Self::Indicator { lower, upper } => {
                f.debug_struct("Indicator").field("lower", lower).field("upper", upper).finish()
            }
            Self::BlackBox { dim, .. } => f.debug_struct("BlackBox").field("dim", dim).finish_non_exhaustive(),
        }
    }
}

/// Piece list as stored in JSON files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Piece {
    pub a: Vec<f64>,
    pub b: f64,
}

impl GeomConvexFn {
    pub fn piecewise_affine(pieces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let Some(d) = pieces.first().map(|p| p.0.len()) else {
            return Err(Error::InvalidInput("no affine pieces".into()));
        };
        if let Some(p) = pieces.iter().find(|p| p.0.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: p.0.len() });
        }
        if pieces.iter().any(|p| p.1 > 0.0) {
            return Err(Error::InvalidInput("a piece with b > 0 makes φ(0) > 0".into()));
        }
        Ok(Self::PiecewiseAffine { pieces })
    }

    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        Self::piecewise_affine(pieces.into_iter().map(|p| (p.a, p.b)).collect())
    }

    pub fn half_square(dim: usize) -> Self {
        Self::HalfSquare { dim }
    }

    pub fn indicator(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(*l <= 0.0 && 0.0 <= *u)) {
            return Err(Error::InvalidInput("indicator box must contain the origin".into()));
        }
        Ok(Self::Indicator { lower, upper })
    }

    pub fn black_box(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::BlackBox { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::PiecewiseAffine { pieces } => pieces[0].0.len(),
            Self::HalfSquare { dim } | Self::BlackBox { dim, .. } => *dim,
            Self::Indicator { lower, .. } => lower.len(),
        }
    }

    /// Value in `[0, ∞]`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::PiecewiseAffine { pieces } => pieces.iter().map(|(a, b)| dot(a, x) + b).fold(0.0, f64::max),
            Self::HalfSquare { .. } => dot(x, x) / 2.0,
            Self::Indicator { lower, upper } => {
                let inside = x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| l <= v && v <= u);
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::BlackBox { f, .. } => f(x),
        }
    }

    /// A classical subgradient where one is available in closed form.
    pub fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Self::PiecewiseAffine { pieces } => {
                let (best, _) = pieces
                    .iter()
                    .enumerate()
                    .map(|(j, (a, b))| (j, dot(a, x) + b))
                    .fold((None, 0.0), |acc, (j, v)| if v > acc.1 { (Some(j), v) } else { acc });
                Some(best.map_or_else(|| vec![0.0; x.len()], |j| pieces[j].0.clone()))
            }
            Self::HalfSquare { .. } => Some(x.to_vec()),
            _ => None,
        }
    }

    /// Checks `φ(0) = 0`, `φ ≥ 0` on the grid, and the midpoint inequality on
    /// random grid segments.
    pub fn validate(&self, grid: &GridSpec, seed: u64) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: grid.dim() });
        }
        let zero = self.eval(&vec![0.0; self.dim()]);
        if zero.abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("φ(0) = {zero}")));
        }
        let pts = grid.points();
        if let Some(p) = pts.iter().find(|p| self.eval(p) < 0.0) {
            return Err(Error::InvalidInput(format!("φ({p:?}) < 0")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let a = &pts[rng.random_range(0..pts.len())];
            let b = &pts[rng.random_range(0..pts.len())];
            let mid: Vec<f64> = a.iter().zip(b).map(|(u, v)| (u + v) / 2.0).collect();
            let (fa, fb, fm) = (self.eval(a), self.eval(b), self.eval(&mid));
            if fm > (fa + fb) / 2.0 + 1e-9 * (1.0 + fm.abs()) {
                return Err(Error::InvalidInput(format!("midpoint convexity fails between {a:?} and {b:?}")));
            }
        }
        Ok(())
    }
}

/// Tensor grid with `resolution` equispaced points per axis, endpoints
/// included. `refine` zoom rounds re-grid a box of two cells around the best
/// point found so far.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
    pub refine: usize,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: usize, refine: usize) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidInput("grid bounds mismatch".into()));
        }
        if resolution < 2 || lower.iter().zip(&upper).any(|(l, u)| l.partial_cmp(u) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidInput("degenerate grid".into()));
        }
        Ok(Self { lower, upper, resolution, refine })
    }

    /// Cube `[-r, r]^dim`.
    pub fn cube(dim: usize, r: f64, resolution: usize, refine: usize) -> Self {
        Self { lower: vec![-r; dim], upper: vec![r; dim], resolution, refine }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn axis(&self, k: usize, i: usize) -> f64 {
        let (lo, hi) = (self.lower[k], self.upper[k]);
        lo + (hi - lo) * i as f64 / (self.resolution - 1) as f64
    }

    fn step(&self, k: usize) -> f64 {
        (self.upper[k] - self.lower[k]) / (self.resolution - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point number `idx`, last axis fastest.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for k in (0..d).rev() {
            out[k] = self.axis(k, idx % self.resolution);
            idx /= self.resolution;
        }
        out
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    fn zoom(&self, centre: &[f64], outer: &GridSpec) -> GridSpec {
        let mut lower = Vec::with_capacity(self.dim());
        let mut upper = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let h = 2.0 * self.step(k);
            lower.push((centre[k] - h).max(outer.lower[k]));
            upper.push((centre[k] + h).min(outer.upper[k]));
        }
        GridSpec { lower, upper, resolution: self.resolution, refine: 0 }
    }
}

/// Maximizes `score` over the grid; `None` scores are skipped. Returns the
/// best value and its point; ties go to the lowest index.
fn grid_max(grid: &GridSpec, score: &(dyn Fn(&[f64]) -> Option<f64> + Sync)) -> Option<(f64, Vec<f64>)> {
    (0..grid.len())
        .into_par_iter()
        .filter_map(|i| {
            let p = grid.point(i);
            score(&p).map(|v| (v, i))
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .map(|(v, i)| (v, grid.point(i)))
}

/// `(⟨x,y⟩ - 1) / φ(x)` for the A-transform; `None` off the domain or at 0/0.
fn ratio(phi: &GeomConvexFn, x: &[f64], y: &[f64]) -> Option<f64> {
    let num = dot(x, y) - 1.0;
    if num <= 0.0 {
        return None;
    }
    let den = phi.eval(x);
    if den == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(num / den)
    }
}

fn check_dims(phi: &GeomConvexFn, pts: &[&[f64]]) -> Result<()> {
    for p in pts {
        if p.len() != phi.dim() {
            return Err(Error::DimensionMismatch { expected: phi.dim(), got: p.len() });
        }
    }
    Ok(())
}

/// Grid supremum of `(⟨x,y⟩ - 1) / φ(x)` over `⟨x,y⟩ > 1`; `0` when no grid
/// point qualifies, `+∞` when one has `φ(x) = 0`.
pub fn a_transform(phi: &GeomConvexFn, y: &Point, search: &GridSpec) -> Result<f64> {
    check_dims(phi, &[y.coords(), &search.lower])?;
    let y = y.coords();
    let score = |x: &[f64]| ratio(phi, x, y);
    let Some((mut best, mut at)) = grid_max(search, &score) else {
        return Ok(0.0);
    };
    let mut grid = search.clone();
    for _ in 0..search.refine {
        if best.is_infinite() {
            break;
        }
        grid = grid.zoom(&at, search);
        if let Some((v, p)) = grid_max(&grid, &score) {
            if v > best {
                (best, at) = (v, p);
            }
        }
    }
    Ok(best)
}

/// Tangency test: `y ∈ ∂°φ(x)` iff `φ(x) (⟨w,y⟩ - 1) / (⟨x,y⟩ - 1) ≤ φ(w)` for
/// every `w`; checked on the search grid with relative tolerance `tol`.
pub fn is_polar_subgradient(phi: &GeomConvexFn, x: &Point, y: &Point, search: &GridSpec, tol: f64) -> Result<bool> {
    check_dims(phi, &[x.coords(), y.coords()])?;
    let fx = phi.eval(x.coords());
    let gap = dot(x.coords(), y.coords()) - 1.0;
    if !(fx > 0.0 && fx.is_finite()) || gap <= 0.0 {
        return Ok(false);
    }
    let a = a_transform(phi, y, search)?.max(gap / fx);
    Ok(fx * a - gap <= tol * gap.max(1.0))
}

/// Points of `y_grid` passing [`is_polar_subgradient`]; empty unless
/// `0 < φ(x) < ∞`.
pub fn polar_subgradient(
    phi: &GeomConvexFn,
    x: &Point,
    y_grid: &GridSpec,
    search: &GridSpec,
    tol: f64,
) -> Result<Vec<Point>> {
    let fx = phi.eval(x.coords());
    if !(fx > 0.0 && fx.is_finite()) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for y in y_grid.points() {
        let y = Point::new(y);
        if is_polar_subgradient(phi, x, &y, search, tol)? {
            out.push(y);
        }
    }
    Ok(out)
}

/// Subgradient inequality `φ(w) ≥ φ(x) + ⟨z, w - x⟩` on the grid.
pub fn is_subgradient(phi: &GeomConvexFn, x: &Point, z: &Point, grid: &GridSpec, tol: f64) -> Result<bool> {
    check_dims(phi, &[x.coords(), z.coords()])?;
    let fx = phi.eval(x.coords());
    let ok = grid.points().par_iter().all(|w| {
        let lin = fx + w.iter().zip(x.coords()).zip(z.coords()).map(|((a, b), c)| (a - b) * c).sum::<f64>();
        phi.eval(w) >= lin - tol * lin.abs().max(1.0)
    });
    Ok(ok)
}

/// `y = z / (⟨x,z⟩ - φ(x))`. With `check`, `z` must pass the subgradient
/// inequality on that grid.
pub fn subgrad_to_polar(phi: &GeomConvexFn, x: &Point, z: &Point, check: Option<&GridSpec>) -> Result<Point> {
    check_dims(phi, &[x.coords(), z.coords()])?;
    if let Some(grid) = check {
        if !is_subgradient(phi, x, z, grid, 1e-9)? {
            return Err(Error::Precondition(format!("{z:?} is not a subgradient at {x:?}")));
        }
    }
    let fx = phi.eval(x.coords());
    let d = dot(x.coords(), z.coords()) - fx;
    if !fx.is_finite() || d.abs() <= 1e-15 * fx.abs().max(1.0) {
        return Err(Error::Precondition("⟨x, z⟩ = φ(x)".into()));
    }
    Ok(Point::new(z.coords().iter().map(|v| v / d).collect::<Vec<_>>()))
}

/// `z = y φ(x) / (⟨x,y⟩ - 1)`. With `check`, `y` must pass the tangency test
/// on that grid.
pub fn polar_to_subgrad(phi: &GeomConvexFn, x: &Point, y: &Point, check: Option<&GridSpec>, tol: f64) -> Result<Point> {
    check_dims(phi, &[x.coords(), y.coords()])?;
    let gap = dot(x.coords(), y.coords()) - 1.0;
    if gap <= 0.0 {
        return Err(Error::Precondition("⟨x, y⟩ ≤ 1".into()));
    }
    if let Some(grid) = check {
        if !is_polar_subgradient(phi, x, y, grid, tol)? {
            return Err(Error::Precondition(format!("{y:?} is not a polar subgradient at {x:?}")));
        }
    }
    let fx = phi.eval(x.coords());
    Ok(Point::new(y.coords().iter().map(|v| v * fx / gap).collect::<Vec<_>>()))
}

/// `K° = { y : ⟨x, y⟩ ≤ 1 for all x ∈ K }` as a list of inequalities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolarSet {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl PolarSet {
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|a| dot(a, y) <= 1.0 + tol)
    }
}

/// Polar of `conv({0} ∪ points)`; zero points impose nothing.
pub fn polar_set(points: &[Point]) -> Result<PolarSet> {
    let Some(d) = points.first().map(Point::dim) else {
        return Err(Error::InvalidInput("empty point list".into()));
    };
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
    }
    let rows = points.iter().filter(|p| p.coords().iter().any(|v| *v != 0.0)).map(|p| p.coords().to_vec()).collect();
    Ok(PolarSet { dim: d, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostFunction;
    use crate::hall::c_dual_set;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec())
    }

    #[test]
    fn a_transform_of_half_square() {
        let phi = GeomConvexFn::half_square(1);
        let grid = GridSpec::cube(1, 4.0, 401, 4);
        let a = a_transform(&phi, &pt(&[1.0]), &grid).unwrap();
        assert!((a - 0.5).abs() < 1e-12, "{a}");
        for y in [0.5, 1.5, 2.5] {
            let a = a_transform(&phi, &pt(&[y]), &GridSpec::cube(1, 8.0, 801, 4)).unwrap();
            assert!((a - y * y / 2.0).abs() < 1e-9, "y = {y}: {a}");
        }
    }

    #[test]
    fn a_transform_of_indicator() {
        let phi = GeomConvexFn::indicator(vec![-1.0], vec![1.0]).unwrap();
        let grid = GridSpec::cube(1, 3.0, 601, 0);
        assert_eq!(a_transform(&phi, &pt(&[0.8]), &grid).unwrap(), 0.0);
        assert_eq!(a_transform(&phi, &pt(&[-1.0]), &grid).unwrap(), 0.0);
        assert_eq!(a_transform(&phi, &pt(&[1.2]), &grid).unwrap(), f64::INFINITY);
        assert_eq!(a_transform(&phi, &pt(&[-2.0]), &grid).unwrap(), f64::INFINITY);
    }

    #[test]
    fn a_transform_at_origin_is_zero() {
        let phi = GeomConvexFn::half_square(2);
        assert_eq!(a_transform(&phi, &pt(&[0.0, 0.0]), &GridSpec::cube(2, 2.0, 21, 0)).unwrap(), 0.0);
    }

    #[test]
    fn order_reversal() {
        let small = GeomConvexFn::half_square(1);
        let big = GeomConvexFn::black_box(1, |x| x[0] * x[0]);
        let grid = GridSpec::cube(1, 5.0, 501, 2);
        for k in 1..20 {
            let y = pt(&[k as f64 * 0.3 - 3.0]);
            assert!(a_transform(&small, &y, &grid).unwrap() >= a_transform(&big, &y, &grid).unwrap());
        }
    }

    #[test]
    fn involution_of_half_square() {
        let inner = GridSpec::cube(1, 8.0, 401, 3);
        let phi = GeomConvexFn::half_square(1);
        let a_phi = {
            let inner = inner.clone();
            let phi = phi.clone();
            GeomConvexFn::black_box(1, move |y| a_transform(&phi, &Point::new(y.to_vec()), &inner).unwrap())
        };
        let outer = GridSpec::cube(1, 6.0, 121, 2);
        for x in [0.75, 1.0, 2.0] {
            let v = a_transform(&a_phi, &pt(&[x]), &outer).unwrap();
            assert!((v - x * x / 2.0).abs() < 1e-6, "x = {x}: {v}");
        }
    }

    #[test]
    fn spherical_inversion() {
        let phi = GeomConvexFn::half_square(2);
        let x = pt(&[1.0, 1.0]);
        let y_grid = GridSpec::cube(2, 2.0, 9, 0);
        let search = GridSpec::cube(2, 4.0, 81, 2);
        let ys = polar_subgradient(&phi, &x, &y_grid, &search, 1e-9).unwrap();
        assert_eq!(ys, vec![pt(&[1.0, 1.0])]);
        assert!(polar_subgradient(&phi, &pt(&[0.0, 0.0]), &y_grid, &search, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn conversion_examples() {
        let phi = GeomConvexFn::half_square(1);
        let y = subgrad_to_polar(&phi, &pt(&[2.0]), &pt(&[2.0]), None).unwrap();
        assert_eq!(y, pt(&[1.0]));
        let z = polar_to_subgrad(&phi, &pt(&[2.0]), &y, Some(&GridSpec::cube(1, 6.0, 601, 2)), 1e-9).unwrap();
        assert_eq!(z, pt(&[2.0]));
        // ⟨x, z⟩ = φ(x) on a zero region
        let pl = GeomConvexFn::piecewise_affine(vec![(vec![1.0], -1.0)]).unwrap();
        assert!(subgrad_to_polar(&pl, &pt(&[0.5]), &pt(&[0.0]), None).is_err());
        assert!(polar_to_subgrad(&phi, &pt(&[1.0]), &pt(&[0.5]), None, 1e-9).is_err());
    }

    #[test]
    fn affine_piece_conversion() {
        let pl = GeomConvexFn::piecewise_affine(vec![(vec![2.0, 1.0], -0.5), (vec![-1.0, 0.0], -1.0)]).unwrap();
        let x = pt(&[1.0, 1.0]);
        let z = Point::new(pl.subgradient(x.coords()).unwrap());
        let grid = GridSpec::cube(2, 3.0, 31, 0);
        let y = subgrad_to_polar(&pl, &x, &z, Some(&grid)).unwrap();
        assert_eq!(y, pt(&[4.0, 2.0]));
        assert!(is_polar_subgradient(&pl, &x, &y, &grid, 1e-9).unwrap());
        let back = polar_to_subgrad(&pl, &x, &y, Some(&grid), 1e-9).unwrap();
        assert!((back.coords()[0] - 2.0).abs() < 1e-12 && (back.coords()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_subgradient_is_rejected() {
        let phi = GeomConvexFn::half_square(1);
        let grid = GridSpec::cube(1, 4.0, 81, 0);
        assert!(subgrad_to_polar(&phi, &pt(&[1.0]), &pt(&[3.0]), Some(&grid)).is_err());
        assert!(!is_polar_subgradient(&phi, &pt(&[1.0]), &pt(&[3.0]), &grid, 1e-9).unwrap());
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let k: Vec<Point> = [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]].iter().map(|v| pt(v)).collect();
        let p = polar_set(&k).unwrap();
        let grid = GridSpec::cube(2, 2.0, 17, 0);
        for y in grid.points() {
            assert_eq!(p.contains(&y, 0.0), y[0].abs() + y[1].abs() <= 1.0, "{y:?}");
        }
        let origin = polar_set(&[pt(&[0.0, 0.0])]).unwrap();
        assert!(origin.rows.is_empty() && origin.contains(&[1e9, -1e9], 0.0));
    }

    #[test]
    fn polar_set_matches_c_dual_set() {
        let grid: Vec<Point> = GridSpec::cube(2, 2.0, 9, 0).points().into_iter().map(Point::new).collect();
        let k: Vec<usize> = (0..grid.len()).filter(|&i| grid[i].coords().iter().all(|v| v.abs() <= 0.5)).collect();
        let kpts: Vec<Point> = k.iter().map(|&i| grid[i].clone()).collect();
        let p = polar_set(&kpts).unwrap();
        let by_polar: Vec<usize> = (0..grid.len()).filter(|&j| p.contains(grid[j].coords(), 0.0)).collect();
        assert_eq!(by_polar, c_dual_set(&k, &grid, &CostFunction::Polar, &grid).unwrap());
    }

    #[test]
    fn validation() {
        let grid = GridSpec::cube(2, 2.0, 11, 0);
        assert!(GeomConvexFn::half_square(2).validate(&grid, 1).is_ok());
        let bad = GeomConvexFn::black_box(2, |x| (x[0] * x[0] + x[1] * x[1]).sqrt().sin().abs());
        assert!(bad.validate(&grid, 1).is_err());
        let shifted = GeomConvexFn::black_box(2, |x| x[0].abs() + 1.0);
        assert!(shifted.validate(&grid, 1).is_err());
        assert!(GeomConvexFn::piecewise_affine(vec![(vec![1.0], 0.5)]).is_err());
    }
}
