//! Ground points and cost functions `c : X × Y → (-∞, +∞]`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xreal::XReal;

/// A point of `ℝ^d`, `d ≥ 1`, with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    /// Panics on an empty or non-finite coordinate list; use `TryFrom` for
    /// untrusted input.
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Self::try_from(coords.into()).expect("point coordinates must be finite and non-empty")
    }

    pub fn scalar(x: f64) -> Self {
        Self::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Point) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(dot(&self.0, &other.0))
    }

    pub(crate) fn key(&self) -> Vec<u64> {
        // +0.0 and -0.0 must hash alike
        self.0.iter().map(|v| (v + 0.0).to_bits()).collect()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point has no coordinates".into()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Point(coords))
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Explicit cost matrix between two finite point lists.
#[derive(Clone, Debug)]
pub struct TableCost {
    rows: Vec<Point>,
    cols: Vec<Point>,
    values: Vec<Vec<XReal>>,
    row_index: HashMap<Vec<u64>, usize>,
    col_index: HashMap<Vec<u64>, usize>,
}

impl TableCost {
    pub fn new(rows: Vec<Point>, cols: Vec<Point>, values: Vec<Vec<XReal>>) -> Result<Self> {
        if values.len() != rows.len() || values.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::InvalidInput(format!(
                "table shape does not match {} rows x {} columns",
                rows.len(),
                cols.len()
            )));
        }
        if values.iter().flatten().any(|v| *v == XReal::NegInf) {
            return Err(Error::InvalidInput("cost table contains -inf".into()));
        }
        let row_index = index_points(&rows)?;
        let col_index = index_points(&cols)?;
        Ok(Self { rows, cols, values, row_index, col_index })
    }

    /// Table over index points `0, 1, 2, ...` (rows) and `0, 1, 2, ...` (columns).
    pub fn from_matrix(values: Vec<Vec<XReal>>) -> Result<Self> {
        let n = values.len();
        let m = values.first().map_or(0, Vec::len);
        let rows = (0..n).map(|i| Point::scalar(i as f64)).collect();
        let cols = (0..m).map(|j| Point::scalar(j as f64)).collect();
        Self::new(rows, cols, values)
    }

    pub fn rows(&self) -> &[Point] {
        &self.rows
    }

    pub fn cols(&self) -> &[Point] {
        &self.cols
    }

    pub fn values(&self) -> &[Vec<XReal>] {
        &self.values
    }

    pub fn row_of(&self, x: &Point) -> Result<usize> {
        self.row_index.get(&x.key()).copied().ok_or_else(|| Error::UnknownPoint(x.to_string()))
    }

    pub fn col_of(&self, y: &Point) -> Result<usize> {
        self.col_index.get(&y.key()).copied().ok_or_else(|| Error::UnknownPoint(y.to_string()))
    }
}

fn index_points(points: &[Point]) -> Result<HashMap<Vec<u64>, usize>> {
    let mut index = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if index.insert(p.key(), i).is_some() {
            return Err(Error::InvalidInput(format!("duplicate table point {p}")));
        }
    }
    Ok(index)
}

/// The cost families the crate understands.
#[derive(Clone, Debug)]
pub enum CostFunction {
    /// `-ln(<x, y> - 1)` if `<x, y> > 1`, else `+∞`.
    Polar,
    /// `-<x, y>`.
    Bilinear,
    /// `|x - y|² / 2`.
    Quadratic,
    Table(TableCost),
}

impl CostFunction {
    pub fn eval(&self, x: &Point, y: &Point) -> Result<XReal> {
        match self {
            CostFunction::Polar => {
                let s = x.dot(y)?;
                // finiteness is the exact predicate <x,y> > 1, never a magnitude test
                if s > 1.0 {
                    Ok(XReal::Finite(-(s - 1.0).ln()))
                } else {
                    Ok(XReal::PosInf)
                }
            }
            CostFunction::Bilinear => Ok(XReal::Finite(-x.dot(y)?)),
            CostFunction::Quadratic => {
                check_dims(x.dim(), y.dim())?;
                let d2: f64 = x.coords().iter().zip(y.coords()).map(|(a, b)| (a - b) * (a - b)).sum();
                Ok(XReal::Finite(0.5 * d2))
            }
            CostFunction::Table(t) => Ok(t.values[t.row_of(x)?][t.col_of(y)?]),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CostFunction::Polar => "polar",
            CostFunction::Bilinear => "bilinear",
            CostFunction::Quadratic => "quadratic",
            CostFunction::Table(_) => "table",
        }
    }

    pub fn is_finite(&self, x: &Point, y: &Point) -> Result<bool> {
        Ok(self.eval(x, y)?.is_finite())
    }

    /// Full matrix `c(xs[i], ys[j])`.
    pub fn matrix(&self, xs: &[Point], ys: &[Point]) -> Result<Vec<Vec<XReal>>> {
        xs.iter().map(|x| ys.iter().map(|y| self.eval(x, y)).collect()).collect()
    }
}

/// Convenience wrapper for the `eval_cost` operation.
pub fn eval_cost(c: &CostFunction, x: &Point, y: &Point) -> Result<XReal> {
    c.eval(x, y)
}

/// All index pairs `(i, j)` with `c(xs[i], ys[j]) < +∞`, in row-major order.
pub fn finiteness_set(c: &CostFunction, xs: &[Point], ys: &[Point]) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            if c.eval(x, y)?.is_finite() {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64) -> Point {
        Point::scalar(x)
    }

    #[test]
    fn polar_examples() {
        assert_eq!(CostFunction::Polar.eval(&p(2.0), &p(2.0)).unwrap(), XReal::Finite(-(3.0f64).ln()));
        assert_eq!(CostFunction::Polar.eval(&p(1.0), &p(1.0)).unwrap(), XReal::PosInf);
    }

    #[test]
    fn polar_near_singularity_stays_finite() {
        let v = CostFunction::Polar.eval(&p(1.0 + 1e-15), &p(1.0)).unwrap();
        assert!(v.is_finite());
        assert!(v.finite().unwrap() > 30.0);
    }

    #[test]
    fn bilinear_orthogonal() {
        let c = CostFunction::Bilinear.eval(&Point::new([1.0, 0.0]), &Point::new([0.0, 1.0])).unwrap();
        assert_eq!(c, XReal::ZERO);
    }

    #[test]
    fn dimension_mismatch() {
        let err = CostFunction::Quadratic.eval(&p(1.0), &Point::new([1.0, 2.0]));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn polar_finiteness_set() {
        let xs = [p(0.5), p(2.0)];
        // 1/2 · 2 = 1 sits on the boundary <x, y> = 1, where the cost is +∞
        let s = finiteness_set(&CostFunction::Polar, &xs, &xs).unwrap();
        assert_eq!(s, vec![(1, 1)]);
        let ys = [p(0.75), p(3.0)];
        let s = finiteness_set(&CostFunction::Polar, &xs, &ys).unwrap();
        assert_eq!(s, vec![(0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn quadratic_finiteness_is_everything() {
        let xs: Vec<_> = (0..4).map(|i| p(i as f64)).collect();
        let ys: Vec<_> = (0..3).map(|i| p(-(i as f64))).collect();
        assert_eq!(finiteness_set(&CostFunction::Quadratic, &xs, &ys).unwrap().len(), 12);
    }

    #[test]
    fn table_lookup_and_finiteness() {
        let mut values = vec![vec![XReal::Finite(1.0); 3]; 2];
        values[1][2] = XReal::PosInf;
        let t = TableCost::from_matrix(values).unwrap();
        let c = CostFunction::Table(t.clone());
        let s = finiteness_set(&c, t.rows(), t.cols()).unwrap();
        assert_eq!(s.len(), 5);
        assert!(!s.contains(&(1, 2)));
        assert!(matches!(c.eval(&p(7.0), &p(0.0)), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn table_rejects_negative_infinity() {
        assert!(TableCost::from_matrix(vec![vec![XReal::NegInf]]).is_err());
    }

    proptest! {
        #[test]
        fn polar_is_symmetric_and_never_neg_inf(
            x in proptest::collection::vec(-3.0f64..3.0, 3),
            y in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            let (x, y) = (Point::new(x), Point::new(y));
            let a = CostFunction::Polar.eval(&x, &y).unwrap();
            let b = CostFunction::Polar.eval(&y, &x).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a != XReal::NegInf);
            let q = CostFunction::Quadratic.eval(&x, &y).unwrap();
            prop_assert!(q != XReal::NegInf);
        }
    }
}
