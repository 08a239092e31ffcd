//! Semi-discrete transport: a quadrature measure against finitely many atoms.
//!
//! Weights `t ∈ Δ_m` define cells `U_i = argmin_j c(x, u_j) - ln t_j` and the
//! weight map `H(t)_i = μ(U_i)`. The solver searches for `t` with
//! `H(t) = α` by ascent on the concave dual
//!
//! ```text
//! F(s) = Σ_k w_k min_i (c(x_k, u_i) + s_i) - Σ_i α_i s_i,    s = -ln t,
//! ```
//!
//! whose supergradient is `H - α`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, Point};
use crate::duality::Potential;
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::hall::{check_nondegenerate, mask_to_indices, Classification, HallPolytope, DEFAULT_TOL};
use crate::measures::{Disk, QuadratureMeasure};
use crate::xreal::XReal;

/// Scores within this absolute distance of the minimum count as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Perturbation indices used when `μ` is degenerate.
pub const PERTURB_LEVELS: [u64; 3] = [100, 1_000, 10_000];
const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    t: Vec<f64>,
}

impl WeightVector {
    /// Normalizes `t`; entries must be nonnegative with positive sum.
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(format!("bad weight vector {t:?}")));
        }
        let total: f64 = t.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(Self { t: t.into_iter().map(|v| v / total).collect() })
    }

    pub fn uniform(m: usize) -> Self {
        Self { t: vec![1.0 / m as f64; m] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_interior(&self) -> bool {
        self.t.iter().all(|v| *v > 0.0)
    }

    /// `s_i = -ln t_i`, `+∞` where `t_i = 0`.
    pub fn shifts(&self) -> Vec<f64> {
        self.t.iter().map(|v| -v.ln()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Atom(usize),
    /// Tied atoms in increasing order.
    Tie(Vec<usize>),
}

impl Cell {
    /// The atom used downstream: the lowest tied index.
    pub fn atom(&self) -> usize {
        match self {
            Cell::Atom(i) => *i,
            Cell::Tie(v) => v[0],
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellPartition {
    pub assignment: Vec<Cell>,
    pub tie_mass: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    /// `(node, atom, mass)`.
    pub entries: Vec<(usize, usize, f64)>,
}

impl TransportPlan {
    pub fn row_sums(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(k, _, w) in &self.entries {
            out[k] += w;
        }
        out
    }

    pub fn column_sums(&self, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m];
        for &(_, i, w) in &self.entries {
            out[i] += w;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub classify_tol: f64,
    /// Perturbation disks, used only when `μ` is degenerate.
    pub disks: Vec<Disk>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: 1e-6,
            initial_step: 0.5,
            min_step: 1e-12,
            classify_tol: DEFAULT_TOL,
            disks: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LogEntry {
    pub iter: usize,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub t: WeightVector,
    pub residual: f64,
    pub iterations: usize,
    pub log: Vec<LogEntry>,
    /// `(k, t_k)` for each perturbed solve when the fallback ran.
    pub perturbed: Vec<(u64, Vec<f64>)>,
}

/// A source cloud, target atoms, and the precomputed `n × m` cost table
/// (`+∞` stored as `f64::INFINITY`).
#[derive(Clone, Debug)]
pub struct SemiDiscrete {
    mu: QuadratureMeasure,
    us: Vec<Point>,
    cost: CostFunction,
    table: Vec<f64>,
}

/// One sub-problem of a decomposition, with maps back to the parent indices.
#[derive(Clone, Debug)]
pub struct SubProblem {
    pub problem: SemiDiscrete,
    pub alpha: Vec<f64>,
    /// Parent node index of each sub-problem node.
    pub nodes: Vec<usize>,
    /// Parent atom index of each sub-problem atom.
    pub atoms: Vec<usize>,
    /// Share of the parent mass carried by this part.
    pub mass: f64,
}

impl SemiDiscrete {
    pub fn new(mu: QuadratureMeasure, us: Vec<Point>, cost: CostFunction) -> Result<Self> {
        if us.is_empty() {
            return Err(Error::InvalidInput("no target atoms".into()));
        }
        let rows: Vec<Vec<f64>> = mu
            .nodes()
            .par_iter()
            .map(|x| us.iter().map(|u| cost.eval(x, u).map(XReal::to_f64)).collect())
            .collect::<Result<_>>()?;
        for (node, (row, w)) in rows.iter().zip(mu.weights()).enumerate() {
            if *w > 0.0 && row.iter().all(|v| v.is_infinite()) {
                return Err(Error::Uncovered { node });
            }
        }
        Ok(Self { mu, us, cost, table: rows.concat() })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn m(&self) -> usize {
        self.us.len()
    }

    pub fn measure(&self) -> &QuadratureMeasure {
        &self.mu
    }

    pub fn supports(&self) -> &[Point] {
        &self.us
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    /// `c(x_k, u_i)`, `f64::INFINITY` for `+∞`.
    pub fn cost_at(&self, k: usize, i: usize) -> f64 {
        self.table[k * self.m() + i]
    }

    pub fn polytope(&self) -> Result<HallPolytope> {
        HallPolytope::build(&self.mu, &self.us, &self.cost)
    }

    fn check_t(&self, t: &WeightVector) -> Result<()> {
        if t.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: t.len() });
        }
        Ok(())
    }

    /// Cell of node `k`. Atoms with `t_i = 0` are only used when no atom with
    /// positive weight has finite cost; then the plain cost decides.
    fn cell(&self, k: usize, shifts: &[f64]) -> Cell {
        let row = &self.table[k * self.m()..(k + 1) * self.m()];
        let scores: Vec<f64> = row.iter().zip(shifts).map(|(c, s)| c + s).collect();
        let pick = |vals: &[f64]| -> Cell {
            let best = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let tied: Vec<usize> =
                (0..vals.len()).filter(|&i| vals[i].is_finite() && vals[i] - best <= TIE_TOL).collect();
            if tied.len() == 1 {
                Cell::Atom(tied[0])
            } else {
                Cell::Tie(tied)
            }
        };
        if scores.iter().any(|v| v.is_finite()) {
            pick(&scores)
        } else {
            pick(row)
        }
    }

    pub fn cell_partition(&self, t: &WeightVector) -> Result<CellPartition> {
        self.check_t(t)?;
        let shifts = t.shifts();
        let assignment: Vec<Cell> = (0..self.n()).into_par_iter().map(|k| self.cell(k, &shifts)).collect();
        let tie_mass =
            assignment.iter().zip(self.mu.weights()).filter(|(c, _)| matches!(c, Cell::Tie(_))).map(|(_, w)| w).sum();
        Ok(CellPartition { assignment, tie_mass })
    }

    /// `H(t)`, ties to the lowest atom. Chunks are reduced in order, so the
    /// result does not depend on the thread count.
    pub fn weight_map(&self, t: &WeightVector) -> Result<Vec<f64>> {
        self.check_t(t)?;
        let shifts = t.shifts();
        let m = self.m();
        let weights = self.mu.weights();
        let partials: Vec<Vec<f64>> = (0..self.n())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = vec![0.0; m];
                for &k in chunk {
                    acc[self.cell(k, &shifts).atom()] += weights[k];
                }
                acc
            })
            .collect();
        let mut alpha = vec![0.0; m];
        for p in partials {
            for (a, v) in alpha.iter_mut().zip(p) {
                *a += v;
            }
        }
        Ok(alpha)
    }

    /// Mass of nodes whose two best scores are within `TIE_TOL`.
    pub fn tie_mass(&self, t: &WeightVector) -> Result<f64> {
        Ok(self.cell_partition(t)?.tie_mass)
    }

    /// `F(s)` at `s = -ln t`.
    pub fn dual_value(&self, t: &WeightVector, alpha: &[f64]) -> Result<f64> {
        self.check_t(t)?;
        let shifts = t.shifts();
        let mut total = 0.0;
        for (k, w) in self.mu.weights().iter().enumerate() {
            let best = (0..self.m()).map(|i| self.cost_at(k, i) + shifts[i]).fold(f64::INFINITY, f64::min);
            total += w * best;
        }
        let lin: f64 = alpha.iter().zip(&shifts).filter(|(a, _)| **a > 0.0).map(|(a, s)| a * s).sum();
        Ok(total - lin)
    }

    fn check_alpha(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: alpha.len() });
        }
        let sum: f64 = alpha.iter().sum();
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("{alpha:?} is not a probability vector")));
        }
        Ok(())
    }

    /// Finds `t` with `‖H(t) - α‖_∞ ≤ tol`.
    ///
    /// Requires `α` in the interior of the Hall polytope. When `μ` is
    /// degenerate and `opts.disks` is non-empty, the problem is re-solved on
    /// `perturb_mix(μ, disks, k)` for each `k` in `PERTURB_LEVELS` and the last
    /// two solutions are extrapolated linearly in `1/k`.
    pub fn solve(&self, alpha: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
        self.check_alpha(alpha)?;
        if !opts.disks.is_empty() && !check_nondegenerate(&self.mu, &self.us, &self.cost)?.nondegenerate {
            return self.solve_perturbed(alpha, opts);
        }
        match self.polytope()?.classify(alpha, opts.classify_tol)? {
            Classification::Interior => {}
            Classification::Boundary { active } => {
                return Err(Error::NotInterior { active, violated: Vec::new() });
            }
            Classification::Exterior { violated } => {
                return Err(Error::NotInterior { active: Vec::new(), violated });
            }
        }
        self.ascend(alpha, opts)
    }

    fn solve_perturbed(&self, alpha: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
        let inner = SolveOptions { disks: Vec::new(), ..opts.clone() };
        let mut perturbed = Vec::new();
        let mut log = Vec::new();
        let mut iterations = 0;
        for k in PERTURB_LEVELS {
            let mixed = self.mu.perturb_mix(&opts.disks, k)?;
            let sub = SemiDiscrete::new(mixed, self.us.clone(), self.cost.clone())?;
            let report = sub.solve(alpha, &inner)?;
            iterations += report.iterations;
            log.extend(report.log);
            perturbed.push((k, report.t.t));
        }
        let [.., (k1, t1), (k2, t2)] = perturbed.as_slice() else { unreachable!() };
        let (h1, h2) = (1.0 / *k1 as f64, 1.0 / *k2 as f64);
        let extrapolated: Vec<f64> = t1.iter().zip(t2).map(|(a, b)| (b + (b - a) * h2 / (h1 - h2)).max(0.0)).collect();
        let t = WeightVector::new(extrapolated)?;
        let residual = residual(&self.weight_map(&t)?, alpha);
        Ok(SolveReport { t, residual, iterations, log, perturbed })
    }

    /// Multiplicative supergradient ascent with step halving.
    fn ascend(&self, alpha: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
        let mut t = WeightVector::uniform(self.m());
        let mut r = residual(&self.weight_map(&t)?, alpha);
        let mut h = self.weight_map(&t)?;
        let mut step = opts.initial_step;
        let mut log = vec![LogEntry { iter: 0, residual: r, step }];
        let mut iter = 0;
        while r > opts.tol && iter < opts.max_iter && step >= opts.min_step {
            iter += 1;
            let cand: Vec<f64> =
                t.t.iter().zip(alpha.iter().zip(&h)).map(|(ti, (a, hi))| ti * (step * (a - hi)).exp()).collect();
            let cand = WeightVector::new(cand)?;
            let ch = self.weight_map(&cand)?;
            let cr = residual(&ch, alpha);
            if cr <= r {
                (t, h, r) = (cand, ch, cr);
            } else {
                step *= 0.5;
            }
            log.push(LogEntry { iter, residual: r, step });
        }
        if r > opts.tol {
            return Err(Error::MaxIterExceeded { best: t.t, residual: r });
        }
        Ok(SolveReport { t, residual: r, iterations: iter, log, perturbed: Vec::new() })
    }

    /// Plan of the cells of `t` and the potential `min_i c(·, u_i) - ln t_i`.
    ///
    /// With `alpha`, tie nodes are split between their tied atoms by a max
    /// flow so the column sums approach `α`; otherwise each goes whole to its
    /// lowest tied atom.
    pub fn extract_plan(&self, t: &WeightVector, alpha: Option<&[f64]>) -> Result<(TransportPlan, Potential)> {
        let part = self.cell_partition(t)?;
        let weights = self.mu.weights();
        let m = self.m();
        let mut entries = Vec::new();
        let mut fixed = vec![0.0; m];
        let mut ties = Vec::new();
        for (k, cell) in part.assignment.iter().enumerate() {
            match cell {
                Cell::Atom(i) => {
                    entries.push((k, *i, weights[k]));
                    fixed[*i] += weights[k];
                }
                Cell::Tie(atoms) => ties.push((k, atoms.clone())),
            }
        }
        match alpha {
            Some(alpha) if !ties.is_empty() => {
                self.check_alpha(alpha)?;
                entries.extend(split_ties(&ties, weights, &fixed, alpha));
            }
            _ => entries.extend(ties.iter().map(|(k, atoms)| (*k, atoms[0], weights[*k]))),
        }
        entries.retain(|e| e.2 > 0.0);
        entries.sort_by_key(|e| (e.0, e.1));
        let shifts = t.shifts().into_iter().map(XReal::from_f64).collect();
        let potential = Potential::new(self.us.clone(), shifts, self.cost.clone())?;
        Ok((TransportPlan { entries }, potential))
    }

    /// `Σ mass · c(x_k, u_i)` over the entries.
    pub fn plan_cost(&self, plan: &TransportPlan) -> f64 {
        plan.entries.iter().map(|&(k, i, w)| w * self.cost_at(k, i)).sum()
    }

    /// Splits along an active set `I`: nodes of `A_I` against the atoms of
    /// `I`, and the rest against the other atoms.
    pub fn decompose(&self, alpha: &[f64], active: u32) -> Result<(SubProblem, SubProblem)> {
        self.check_alpha(alpha)?;
        let m = self.m();
        let full = ((1u64 << m) - 1) as u32;
        if active == 0 || active & full == full {
            return Err(Error::Precondition("active set must be nonempty and proper".into()));
        }
        let inside: Vec<usize> = mask_to_indices(active);
        let outside: Vec<usize> = (0..m).filter(|i| active & (1 << i) == 0).collect();
        let in_a: Vec<bool> = (0..self.n()).map(|k| inside.iter().any(|&i| self.cost_at(k, i).is_finite())).collect();
        let part = |keep: bool, atoms: &[usize]| -> Result<SubProblem> {
            let nodes: Vec<usize> = (0..self.n()).filter(|&k| in_a[k] == keep && self.mu.weights()[k] > 0.0).collect();
            if nodes.is_empty() {
                return Err(Error::Precondition("active set has mass 0 or 1".into()));
            }
            let mass: f64 = nodes.iter().map(|&k| self.mu.weights()[k]).sum();
            let mu = QuadratureMeasure::new(
                nodes.iter().map(|&k| self.mu.nodes()[k].clone()).collect(),
                nodes.iter().map(|&k| self.mu.weights()[k]).collect(),
                self.mu.provenance().clone(),
            )?;
            let us = atoms.iter().map(|&i| self.us[i].clone()).collect();
            let a_total: f64 = atoms.iter().map(|&i| alpha[i]).sum();
            if a_total <= 0.0 {
                return Err(Error::Precondition("no target mass on one side of the split".into()));
            }
            Ok(SubProblem {
                problem: SemiDiscrete::new(mu, us, self.cost.clone())?,
                alpha: atoms.iter().map(|&i| alpha[i] / a_total).collect(),
                nodes,
                atoms: atoms.to_vec(),
                mass,
            })
        };
        Ok((part(true, &inside)?, part(false, &outside)?))
    }
}

/// Maps sub-problem plans back to the parent indices, scaling by each part's mass.
pub fn recombine(parts: &[(&SubProblem, &TransportPlan)]) -> TransportPlan {
    let mut entries: Vec<(usize, usize, f64)> = parts
        .iter()
        .flat_map(|(sub, plan)| plan.entries.iter().map(|&(k, i, w)| (sub.nodes[k], sub.atoms[i], w * sub.mass)))
        .collect();
    entries.sort_by_key(|e| (e.0, e.1));
    TransportPlan { entries }
}

pub fn residual(h: &[f64], alpha: &[f64]) -> f64 {
    h.iter().zip(alpha).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Routes tie-node mass to tied atoms with capacity `max(α_i - fixed_i, 0)`;
/// whatever cannot be routed goes to the lowest tied atom.
fn split_ties(ties: &[(usize, Vec<usize>)], weights: &[f64], fixed: &[f64], alpha: &[f64]) -> Vec<(usize, usize, f64)> {
    let m = alpha.len();
    let (s, t) = (0, 1);
    let atom_node = |i: usize| 2 + i;
    let tie_node = |j: usize| 2 + m + j;
    let mut g = FlowNetwork::new(2 + m + ties.len());
    for i in 0..m {
        g.add_arc(atom_node(i), t, (alpha[i] - fixed[i]).max(0.0), 0.0);
    }
    let mut arcs = Vec::new();
    for (j, (k, atoms)) in ties.iter().enumerate() {
        g.add_arc(s, tie_node(j), weights[*k], 0.0);
        for &i in atoms {
            arcs.push((j, i, g.add_arc(tie_node(j), atom_node(i), f64::INFINITY, 0.0)));
        }
    }
    g.max_flow(s, t);
    let mut routed = vec![0.0; ties.len()];
    let mut out = Vec::new();
    for (j, i, a) in arcs {
        let f = g.flow(a);
        if f > 0.0 {
            out.push((ties[j].0, i, f));
            routed[j] += f;
        }
    }
    for (j, (k, atoms)) in ties.iter().enumerate() {
        let rest = weights[*k] - routed[j];
        if rest > 0.0 {
            match out.iter_mut().find(|e| e.0 == *k && e.1 == atoms[0]) {
                Some(e) => e.2 += rest,
                None => out.push((*k, atoms[0], rest)),
            }
        }
    }
    out
}

pub fn cell_partition(
    mu: &QuadratureMeasure,
    us: &[Point],
    c: &CostFunction,
    t: &WeightVector,
) -> Result<CellPartition> {
    SemiDiscrete::new(mu.clone(), us.to_vec(), c.clone())?.cell_partition(t)
}

pub fn weight_map_h(mu: &QuadratureMeasure, us: &[Point], c: &CostFunction, t: &WeightVector) -> Result<Vec<f64>> {
    SemiDiscrete::new(mu.clone(), us.to_vec(), c.clone())?.weight_map(t)
}

pub fn solve_weights(
    mu: &QuadratureMeasure,
    us: &[Point],
    c: &CostFunction,
    alpha: &[f64],
    opts: &SolveOptions,
) -> Result<SolveReport> {
    SemiDiscrete::new(mu.clone(), us.to_vec(), c.clone())?.solve(alpha, opts)
}

pub fn tie_mass_diagnostic(mu: &QuadratureMeasure, us: &[Point], c: &CostFunction, t: &WeightVector) -> Result<f64> {
    SemiDiscrete::new(mu.clone(), us.to_vec(), c.clone())?.tie_mass(t)
}
