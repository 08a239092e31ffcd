//! c-transforms, potentials, c-subgradients and certificates for finite pair
//! sets.
//!
//! A finite pair set `G = {(x_k, y_k)}` is encoded as the complete directed
//! graph on its indices with edge weights
//!
//! ```text
//! w(a -> b) = c(x_b, y_a) - c(x_a, y_a)      (edge absent if c(x_b, y_a) = +∞)
//! ```
//!
//! A cycle of negative weight is exactly a permutation lowering the total
//! cost, so `G` is c-cyclically monotone iff the graph has no negative cycle.
//! Shortest-walk distances from a root give the potential
//! `φ(x) = min_k c(x, y_k) + d(k) - c(x_k, y_k)`, whose c-subgradient
//! contains `G`.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, Point};
use crate::error::{Error, Result};
use crate::xreal::{Convention, XReal};

/// Relative slack below which a relaxation is treated as round-off.
///
/// Walk sums accumulate one rounding per edge; without this a zero-weight
/// cycle (e.g. two pairs sharing a target) can drift to `-1e-16` and be
/// reported as a violation. Reported witnesses are always replayed exactly.
const RELAX_SLACK: f64 = 1e-12;

/// `φ(x) = min_i ( c(x, u_i) + s_i )`.
#[derive(Clone, Debug)]
pub struct Potential {
    supports: Vec<Point>,
    shifts: Vec<XReal>,
    cost: CostFunction,
}

impl Potential {
    pub fn new(supports: Vec<Point>, shifts: Vec<XReal>, cost: CostFunction) -> Result<Self> {
        if supports.is_empty() || supports.len() != shifts.len() {
            return Err(Error::InvalidInput(format!("{} supports but {} shifts", supports.len(), shifts.len())));
        }
        if shifts.contains(&XReal::NegInf) {
            return Err(Error::InvalidInput("potential shift is -inf".into()));
        }
        if !shifts.iter().any(|s| s.is_finite()) {
            return Err(Error::InvalidInput("potential has no finite shift".into()));
        }
        Ok(Self { supports, shifts, cost })
    }

    /// The basic function `c(·, y0) + t`.
    pub fn basic(y0: Point, t: f64, cost: CostFunction) -> Self {
        Self { supports: vec![y0], shifts: vec![XReal::Finite(t)], cost }
    }

    pub fn supports(&self) -> &[Point] {
        &self.supports
    }

    pub fn shifts(&self) -> &[XReal] {
        &self.shifts
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    /// Values `c(x, u_i) + s_i`, one per support.
    pub fn branches(&self, x: &Point) -> Result<Vec<XReal>> {
        self.supports
            .iter()
            .zip(&self.shifts)
            .map(|(u, s)| Ok(self.cost.eval(x, u)?.add(*s, Convention::PlusWins)))
            .collect()
    }

    pub fn eval(&self, x: &Point) -> Result<XReal> {
        Ok(self.branches(x)?.into_iter().min().expect("supports non-empty"))
    }

    /// Supports attaining `φ(x)` within `tol` through a finite cost.
    pub fn argmins(&self, x: &Point, tol: f64) -> Result<Vec<usize>> {
        let branches = self.branches(x)?;
        let Some(best) = branches.iter().copied().min().and_then(XReal::finite) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for (i, (u, b)) in self.supports.iter().zip(&branches).enumerate() {
            if let Some(v) = b.finite() {
                if v <= best + tol && self.cost.eval(x, u)?.is_finite() {
                    out.push(i);
                }
            }
        }
        Ok(out)
    }

    /// `(x index, support index)` pairs of the c-subgradient restricted to `xs`.
    pub fn subgradient_indices(&self, xs: &[Point], tol: f64) -> Result<Vec<(usize, usize)>> {
        if tol < 0.0 {
            return Err(Error::InvalidInput("negative tolerance".into()));
        }
        let mut out = Vec::new();
        for (k, x) in xs.iter().enumerate() {
            out.extend(self.argmins(x, tol)?.into_iter().map(|i| (k, i)));
        }
        Ok(out)
    }

    /// The c-subgradient of `φ` restricted to `xs`, as a pair set.
    pub fn subgradient_pairs(&self, xs: &[Point], tol: f64) -> Result<PairSet> {
        let idx = self.subgradient_indices(xs, tol)?;
        PairSet::new(
            idx.iter().map(|(k, _)| xs[*k].clone()).collect(),
            idx.iter().map(|(_, i)| self.supports[*i].clone()).collect(),
            self.cost.clone(),
        )
    }
}

/// `ψ^c(x) = inf_{y ∈ domain} c(x, y) - ψ(y)` for each `x` in `target`.
///
/// The subtraction uses the `+∞ - ∞ = +∞` convention; an empty effective
/// infimum is `+∞`.
pub fn c_transform(psi: &[XReal], domain: &[Point], c: &CostFunction, target: &[Point]) -> Result<Vec<XReal>> {
    check_len(psi.len(), domain.len())?;
    target
        .iter()
        .map(|x| {
            let mut best = XReal::PosInf;
            for (y, v) in domain.iter().zip(psi) {
                best = best.min(c.eval(x, y)?.add(-*v, Convention::PlusWins));
            }
            Ok(best)
        })
        .collect()
}

/// Transform in the other slot: `φ^c(y) = inf_{x ∈ domain} c(x, y) - φ(x)`.
pub fn c_transform_dual(phi: &[XReal], domain: &[Point], c: &CostFunction, target: &[Point]) -> Result<Vec<XReal>> {
    check_len(phi.len(), domain.len())?;
    target
        .iter()
        .map(|y| {
            let mut best = XReal::PosInf;
            for (x, v) in domain.iter().zip(phi) {
                best = best.min(c.eval(x, y)?.add(-*v, Convention::PlusWins));
            }
            Ok(best)
        })
        .collect()
}

/// `φ(x) + ψ(y) ≤ c(x, y)` on every grid pair, summing with `-∞ + ∞ = -∞`.
pub fn check_admissible(phi: &[XReal], xs: &[Point], psi: &[XReal], ys: &[Point], c: &CostFunction) -> Result<bool> {
    check_admissible_within(phi, xs, psi, ys, c, 0.0)
}

/// As [`check_admissible`], allowing `φ(x) + ψ(y) ≤ c(x, y) + tol·max(1, |c(x, y)|)`.
pub fn check_admissible_within(
    phi: &[XReal],
    xs: &[Point],
    psi: &[XReal],
    ys: &[Point],
    c: &CostFunction,
    tol: f64,
) -> Result<bool> {
    check_len(phi.len(), xs.len())?;
    check_len(psi.len(), ys.len())?;
    for (x, f) in xs.iter().zip(phi) {
        for (y, g) in ys.iter().zip(psi) {
            let cost = c.eval(x, y)?;
            let slack = cost.finite().map_or(0.0, |v| tol * v.abs().max(1.0));
            if f.add(*g, Convention::MinusWins) > cost.add(XReal::Finite(slack), Convention::PlusWins) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!("{a} values for {b} points")));
    }
    Ok(())
}

/// Finite set of finite-cost pairs `(x_k, y_k)`.
#[derive(Clone, Debug)]
pub struct PairSet {
    xs: Vec<Point>,
    ys: Vec<Point>,
    cost: CostFunction,
    /// `cross[a][b] = c(x_b, y_a)`
    cross: Vec<Vec<XReal>>,
}

impl PairSet {
    pub fn new(xs: Vec<Point>, ys: Vec<Point>, cost: CostFunction) -> Result<Self> {
        check_len(xs.len(), ys.len())?;
        let cross: Vec<Vec<XReal>> =
            ys.iter().map(|y| xs.iter().map(|x| cost.eval(x, y)).collect::<Result<_>>()).collect::<Result<_>>()?;
        for (k, row) in cross.iter().enumerate() {
            if !row[k].is_finite() {
                return Err(Error::InvalidInput(format!("pair {k} ({}, {}) has infinite cost", xs[k], ys[k])));
            }
        }
        Ok(Self { xs, ys, cost, cross })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[Point] {
        &self.xs
    }

    pub fn ys(&self) -> &[Point] {
        &self.ys
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    /// `c(x_k, y_k)`.
    pub fn diagonal(&self, k: usize) -> f64 {
        self.cross[k][k].finite().expect("checked finite")
    }

    /// `c(x_b, y_a)`.
    pub fn cross_cost(&self, a: usize, b: usize) -> XReal {
        self.cross[a][b]
    }

    /// `w(a -> b)`, `None` when the edge is absent.
    pub fn edge_weight(&self, a: usize, b: usize) -> Option<f64> {
        self.cross[a][b].finite().map(|v| v - self.diagonal(a))
    }

    /// Total costs `(Σ c(x_a, y_a), Σ c(x_next(a), y_a))` along `cycle`, i.e. the
    /// identity assignment against the one shifted along the cycle.
    pub fn replay_cycle(&self, cycle: &[usize]) -> (f64, XReal) {
        let identity = cycle.iter().map(|&a| self.diagonal(a)).sum();
        let mut shifted = XReal::ZERO;
        for (i, &a) in cycle.iter().enumerate() {
            let b = cycle[(i + 1) % cycle.len()];
            shifted = shifted.add(self.cross[a][b], Convention::PlusWins);
        }
        (identity, shifted)
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    if let Some(w) = self.edge_weight(a, b) {
                        out.push((a, b, w));
                    }
                }
            }
        }
        out
    }
}

/// Outcome of the monotonicity / path-boundedness checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Certificate {
    CyclicallyMonotone,
    /// Shifting the assignment along `cycle` lowers the cost from
    /// `identity_cost` to `permuted_cost`.
    NegativeCycle {
        cycle: Vec<usize>,
        identity_cost: f64,
        permuted_cost: f64,
    },
    /// `bounds[a][b] = -(shortest walk weight a -> b)`; `-inf` where no walk exists.
    PathBounded {
        bounds: Vec<Vec<XReal>>,
    },
    Unbounded {
        cycle: Vec<usize>,
        identity_cost: f64,
        permuted_cost: f64,
    },
}

impl Certificate {
    pub fn is_positive(&self) -> bool {
        matches!(self, Certificate::CyclicallyMonotone | Certificate::PathBounded { .. })
    }

    pub fn witness(&self) -> Option<&[usize]> {
        match self {
            Certificate::NegativeCycle { cycle, .. } | Certificate::Unbounded { cycle, .. } => Some(cycle),
            _ => None,
        }
    }
}

fn improves(candidate: f64, current: f64) -> bool {
    candidate < current - RELAX_SLACK * current.abs().max(1.0)
}

/// Bellman-Ford from a virtual source joined to every node; returns a
/// negative cycle rotated to start at its smallest index.
fn find_negative_cycle(g: &PairSet) -> Option<Vec<usize>> {
    let n = g.len();
    let edges = g.edges();
    let mut dist = vec![0.0f64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..n {
        last = None;
        for &(a, b, w) in &edges {
            let cand = dist[a] + w;
            if improves(cand, dist[b]) {
                dist[b] = cand;
                pred[b] = Some(a);
                last = Some(b);
            }
        }
        last?;
    }
    // still relaxing after n rounds: walk back n steps to land on the cycle
    let mut v = last?;
    for _ in 0..n {
        v = pred[v]?;
    }
    let start = v;
    let mut cycle = vec![start];
    let mut u = pred[start]?;
    while u != start {
        cycle.push(u);
        u = pred[u]?;
    }
    // pred links run backwards
    cycle.reverse();
    let pos = cycle.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i)?;
    cycle.rotate_left(pos);
    Some(cycle)
}

fn verified_cycle(g: &PairSet) -> Option<(Vec<usize>, f64, f64)> {
    let cycle = find_negative_cycle(g)?;
    let (identity, shifted) = g.replay_cycle(&cycle);
    let shifted = shifted.finite()?;
    (shifted < identity).then_some((cycle, identity, shifted))
}

/// c-cyclic monotonicity: no cyclic reassignment of the pairs lowers the
/// total cost. Zero-weight cycles count as monotone.
pub fn check_cyclic_monotone(g: &PairSet) -> Certificate {
    match verified_cycle(g) {
        Some((cycle, identity_cost, permuted_cost)) => {
            Certificate::NegativeCycle { cycle, identity_cost, permuted_cost }
        }
        None => Certificate::CyclicallyMonotone,
    }
}

/// All-pairs shortest walks; `None` on the diagonal means no walk, which only
/// happens off the diagonal.
fn shortest_walks(g: &PairSet) -> Vec<Vec<Option<f64>>> {
    let n = g.len();
    let mut d: Vec<Vec<Option<f64>>> =
        (0..n).map(|a| (0..n).map(|b| if a == b { Some(0.0) } else { g.edge_weight(a, b) }).collect()).collect();
    for k in 0..n {
        for a in 0..n {
            let Some(dak) = d[a][k] else { continue };
            for b in 0..n {
                if let Some(dkb) = d[k][b] {
                    let cand = dak + dkb;
                    if d[a][b].is_none_or(|cur| cand < cur) {
                        d[a][b] = Some(cand);
                    }
                }
            }
        }
    }
    d
}

/// c-path-boundedness of a finite pair set: no negative cycle, with the
/// bound table `M(a, b) = -(shortest walk weight from a to b)`.
pub fn check_path_bounded(g: &PairSet) -> Certificate {
    if let Some((cycle, identity_cost, permuted_cost)) = verified_cycle(g) {
        return Certificate::Unbounded { cycle, identity_cost, permuted_cost };
    }
    let bounds = shortest_walks(g)
        .into_iter()
        .enumerate()
        .map(|(a, row)| {
            row.into_iter()
                .enumerate()
                .map(|(b, v)| match v {
                    // round-off can leave a zero-weight closed walk at -1e-17
                    Some(_) if a == b => XReal::ZERO,
                    Some(w) => XReal::Finite(-w),
                    None => XReal::NegInf,
                })
                .collect()
        })
        .collect();
    Certificate::PathBounded { bounds }
}

/// Largest finite entry of a path-bound table, the finite-sample growth
/// diagnostic for path-boundedness.
pub fn path_bound_range(cert: &Certificate) -> Option<f64> {
    match cert {
        Certificate::PathBounded { bounds } => bounds
            .iter()
            .flatten()
            .filter_map(|v| v.finite())
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v)))),
        _ => None,
    }
}

/// Strongly connected components of the finiteness graph `a -> b` iff
/// `c(x_b, y_a) < ∞`. Classes are sorted internally and by smallest member.
pub fn equivalence_classes(g: &PairSet) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for a in 0..n {
        for b in 0..n {
            if a != b && g.cross[a][b].is_finite() {
                graph.add_edge(nodes[a], nodes[b], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = kosaraju_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    classes.sort_by_key(|c| c[0]);
    classes
}

/// Rebuilds a potential whose c-subgradient contains every pair of `g`.
///
/// Distances are shortest walks from root 0; indices not reachable from the
/// roots chosen so far become new roots at distance 0, so the result is
/// determined up to one additive constant per root.
pub fn reconstruct_potential(g: &PairSet) -> Result<Potential> {
    if g.is_empty() {
        return Err(Error::InvalidInput("empty pair set".into()));
    }
    if let Some((cycle, _, _)) = verified_cycle(g) {
        return Err(Error::Unbounded { cycle });
    }
    let n = g.len();
    let edges = g.edges();
    let mut dist: Vec<Option<f64>> = vec![None; n];
    while let Some(root) = dist.iter().position(Option::is_none) {
        dist[root] = Some(0.0);
        for _ in 0..n {
            let mut changed = false;
            for &(a, b, w) in &edges {
                let Some(da) = dist[a] else { continue };
                let cand = da + w;
                if dist[b].is_none_or(|db| improves(cand, db)) {
                    dist[b] = Some(cand);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    let shifts = dist
        .iter()
        .enumerate()
        .map(|(k, d)| XReal::Finite(d.expect("every index is reached") - g.diagonal(k)))
        .collect();
    Potential::new(g.ys.clone(), shifts, g.cost.clone())
}
