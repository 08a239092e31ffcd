//! Discrete transport with forbidden pairs.
//!
//! Feasibility, optimal plans and tight splits all run on the network
//! `s → μ_i → ν_j → t` with source capacities `μ_i`, sink capacities `ν_j`, and
//! an uncapacitated arc `μ_i → ν_j` for every finite-cost pair.

use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, TableCost};
use crate::duality::{c_transform_dual, reconstruct_potential, PairSet};
use crate::error::{Error, Result};
use crate::flow::{FlowNetwork, FLOW_EPS};
use crate::measures::DiscreteMeasure;
use crate::semidiscrete::TransportPlan;
use crate::xreal::XReal;

/// Mass balance tolerance for feasibility and tight-set detection.
pub const BALANCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BipartiteInstance {
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    matrix: Vec<Vec<XReal>>,
    cost: CostFunction,
}

/// Atoms `atoms` of one side whose finite-cost partners miss `blocked` on the
/// other side, with `mass(atoms) + mass(blocked) = 1 + excess`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HallWitness {
    pub atoms: Vec<usize>,
    pub blocked: Vec<usize>,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HallReport {
    pub feasible: bool,
    pub flow: f64,
    /// Inclusion-minimal violating set of `μ` atoms.
    pub mu_witness: Option<HallWitness>,
    /// Inclusion-minimal violating set of `ν` atoms.
    pub nu_witness: Option<HallWitness>,
}

/// `μ(A) = ν(B)` with every finite-cost partner of `A` in `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub mass: f64,
}

struct Network {
    g: FlowNetwork,
    /// Arc id of `μ_i → ν_j`, per finite pair.
    pairs: Vec<(usize, usize, usize)>,
}

const S: usize = 0;
const T: usize = 1;

impl BipartiteInstance {
    pub fn new(mu: DiscreteMeasure, nu: DiscreteMeasure, c: &CostFunction) -> Result<Self> {
        let matrix = c.matrix(mu.atoms(), nu.atoms())?;
        Self::from_matrix(mu, nu, matrix)
    }

    /// The cost is kept as a table over the atoms.
    pub fn from_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, matrix: Vec<Vec<XReal>>) -> Result<Self> {
        if matrix.len() != mu.len() {
            return Err(Error::DimensionMismatch { expected: mu.len(), got: matrix.len() });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != nu.len()) {
            return Err(Error::DimensionMismatch { expected: nu.len(), got: row.len() });
        }
        let table = TableCost::new(mu.atoms().to_vec(), nu.atoms().to_vec(), matrix.clone())?;
        Ok(Self { mu, nu, matrix, cost: CostFunction::Table(table) })
    }

    pub fn mu(&self) -> &DiscreteMeasure {
        &self.mu
    }

    pub fn nu(&self) -> &DiscreteMeasure {
        &self.nu
    }

    pub fn matrix(&self) -> &[Vec<XReal>] {
        &self.matrix
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    pub fn transpose(&self) -> Result<Self> {
        let mt = (0..self.nu.len()).map(|j| (0..self.mu.len()).map(|i| self.matrix[i][j]).collect()).collect();
        Self::from_matrix(self.nu.clone(), self.mu.clone(), mt)
    }

    /// Normalized sub-instance on the given rows and columns.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let pick = |m: &DiscreteMeasure, idx: &[usize]| -> Result<DiscreteMeasure> {
            let total: f64 = idx.iter().map(|&i| m.weights()[i]).sum();
            if total <= 0.0 {
                return Err(Error::ZeroMass);
            }
            DiscreteMeasure::new(
                idx.iter().map(|&i| m.atoms()[i].clone()).collect(),
                idx.iter().map(|&i| m.weights()[i] / total).collect(),
            )
        };
        let matrix = rows.iter().map(|&i| cols.iter().map(|&j| self.matrix[i][j]).collect()).collect();
        Self::from_matrix(pick(&self.mu, rows)?, pick(&self.nu, cols)?, matrix)
    }

    fn network(&self, rows: Option<&[bool]>) -> Network {
        let (n, m) = (self.mu.len(), self.nu.len());
        let mut g = FlowNetwork::new(2 + n + m);
        let mut pairs = Vec::new();
        for i in 0..n {
            if rows.is_none_or(|r| r[i]) {
                g.add_arc(S, 2 + i, self.mu.weights()[i], 0.0);
            }
        }
        for j in 0..m {
            g.add_arc(2 + n + j, T, self.nu.weights()[j], 0.0);
        }
        for i in 0..n {
            for j in 0..m {
                if let Some(c) = self.matrix[i][j].finite() {
                    pairs.push((i, j, g.add_arc(2 + i, 2 + n + j, f64::INFINITY, c)));
                }
            }
        }
        Network { g, pairs }
    }

    /// Finite-cost partners of a set of rows.
    fn neighbours(&self, rows: &[usize]) -> Vec<usize> {
        (0..self.nu.len()).filter(|&j| rows.iter().any(|&i| self.matrix[i][j].is_finite())).collect()
    }

    /// `μ` atoms on the source side of a minimum cut of the network
    /// restricted to `rows`, or `None` when every such atom can be routed.
    fn deficient_rows(&self, rows: &[bool]) -> Option<Vec<usize>> {
        let n = self.mu.len();
        let supply: f64 = (0..n).filter(|&i| rows[i]).map(|i| self.mu.weights()[i]).sum();
        let mut net = self.network(Some(rows));
        let flow = net.g.max_flow(S, T);
        if supply - flow <= BALANCE_TOL {
            return None;
        }
        let seen = net.g.residual_reachable(&[S]);
        Some((0..n).filter(|&i| rows[i] && seen[2 + i]).collect())
    }

    /// Shrinks a violating row set until no proper subset violates.
    fn minimal_witness(&self, mut set: Vec<usize>) -> HallWitness {
        let n = self.mu.len();
        let mut k = 0;
        while k < set.len() {
            let mut rows = vec![false; n];
            for (idx, &i) in set.iter().enumerate() {
                rows[i] = idx != k;
            }
            match self.deficient_rows(&rows) {
                Some(smaller) => {
                    set = smaller;
                    k = 0;
                }
                None => k += 1,
            }
        }
        let partners = self.neighbours(&set);
        let blocked: Vec<usize> = (0..self.nu.len()).filter(|j| !partners.contains(j)).collect();
        let excess = set.iter().map(|&i| self.mu.weights()[i]).sum::<f64>()
            + blocked.iter().map(|&j| self.nu.weights()[j]).sum::<f64>()
            - 1.0;
        HallWitness { atoms: set, blocked, excess }
    }

    fn row_witness(&self) -> Option<HallWitness> {
        let all = vec![true; self.mu.len()];
        self.deficient_rows(&all).map(|set| self.minimal_witness(set))
    }

    /// A plan with finite cost exists iff the max flow is `1`.
    pub fn hall_feasible(&self) -> Result<HallReport> {
        let mut net = self.network(None);
        let flow = net.g.max_flow(S, T);
        let feasible = 1.0 - flow <= BALANCE_TOL;
        if feasible {
            return Ok(HallReport { feasible, flow, mu_witness: None, nu_witness: None });
        }
        Ok(HallReport { feasible, flow, mu_witness: self.row_witness(), nu_witness: self.transpose()?.row_witness() })
    }

    /// Minimum-cost plan over finite-cost pairs.
    pub fn optimal_plan(&self) -> Result<(TransportPlan, f64)> {
        let mut net = self.network(None);
        let (flow, _) = net.g.min_cost_flow(S, T, 1.0);
        if 1.0 - flow > BALANCE_TOL {
            return Err(Error::Infeasible);
        }
        let entries: Vec<(usize, usize, f64)> = net
            .pairs
            .iter()
            .filter_map(|&(i, j, a)| {
                let f = net.g.flow(a);
                (f > FLOW_EPS).then_some((i, j, f))
            })
            .collect();
        let plan = TransportPlan { entries };
        let cost = self.plan_cost(&plan)?;
        Ok((plan, cost))
    }

    pub fn plan_cost(&self, plan: &TransportPlan) -> Result<f64> {
        let mut total = 0.0;
        for &(i, j, w) in &plan.entries {
            let c = self.matrix[i][j]
                .finite()
                .ok_or_else(|| Error::InvalidInput(format!("plan uses forbidden pair ({i}, {j})")))?;
            total += w * c;
        }
        Ok(total)
    }

    /// Potentials `(φ, ψ)` on the atoms from the plan's support: `φ` is the
    /// reconstructed potential, `ψ = φ^c` over the `μ` atoms.
    pub fn dual_potentials(&self, plan: &TransportPlan) -> Result<(Vec<XReal>, Vec<XReal>)> {
        let support: Vec<(usize, usize)> = plan.entries.iter().filter(|e| e.2 > 0.0).map(|&(i, j, _)| (i, j)).collect();
        let g = PairSet::new(
            support.iter().map(|&(i, _)| self.mu.atoms()[i].clone()).collect(),
            support.iter().map(|&(_, j)| self.nu.atoms()[j].clone()).collect(),
            self.cost.clone(),
        )?;
        let pot = reconstruct_potential(&g)?;
        let phi: Vec<XReal> = self.mu.atoms().iter().map(|x| pot.eval(x)).collect::<Result<_>>()?;
        let psi = c_transform_dual(&phi, self.mu.atoms(), &self.cost, self.nu.atoms())?;
        Ok((phi, psi))
    }

    /// `Σ φ μ + Σ ψ ν`, skipping zero-mass atoms.
    pub fn dual_objective(&self, phi: &[XReal], psi: &[XReal]) -> f64 {
        let side = |v: &[XReal], w: &[f64]| -> f64 {
            v.iter().zip(w).filter(|(_, w)| **w > 0.0).map(|(v, w)| v.to_f64() * w).sum()
        };
        side(phi, self.mu.weights()) + side(psi, self.nu.weights())
    }

    /// Minimal tight splits. After a maximum flow, the residual closure of a
    /// saturated `μ_i` that misses the sink is the smallest set `A ∋ i` with
    /// `μ(A) = ν(N(A))`.
    pub fn detect_decomposition(&self) -> Result<Vec<Split>> {
        let (n, m) = (self.mu.len(), self.nu.len());
        let mut net = self.network(None);
        let flow = net.g.max_flow(S, T);
        if 1.0 - flow > BALANCE_TOL {
            return Err(Error::Infeasible);
        }
        let mut found: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if self.mu.weights()[i] <= 0.0 {
                continue;
            }
            let seen = net.g.residual_reachable(&[S, 2 + i]);
            if seen[T] {
                continue;
            }
            let a: Vec<usize> = (0..n).filter(|&k| seen[2 + k]).collect();
            let mass: f64 = a.iter().map(|&k| self.mu.weights()[k]).sum();
            if mass < 1.0 - BALANCE_TOL && !found.contains(&a) {
                found.push(a);
            }
        }
        let minimal: Vec<Vec<usize>> = found
            .iter()
            .filter(|a| !found.iter().any(|b| b != *a && b.iter().all(|k| a.contains(k))))
            .cloned()
            .collect();
        let mut splits: Vec<Split> = minimal
            .into_iter()
            .map(|a| {
                let b = self.neighbours(&a);
                let mass = a.iter().map(|&k| self.mu.weights()[k]).sum();
                Split { a, b, mass }
            })
            .collect();
        splits.sort_by(|x, y| x.a.cmp(&y.a));
        debug_assert!(splits.iter().all(|s| s.b.iter().all(|&j| j < m)));
        Ok(splits)
    }

    /// Solves both sides of a split separately and recombines the plans with
    /// weights `μ(A)` and `1 - μ(A)`.
    pub fn solve_split(&self, split: &Split) -> Result<(TransportPlan, f64)> {
        let rest_a: Vec<usize> = (0..self.mu.len()).filter(|i| !split.a.contains(i)).collect();
        let rest_b: Vec<usize> = (0..self.nu.len()).filter(|j| !split.b.contains(j)).collect();
        let parts = [(&split.a, &split.b), (&rest_a, &rest_b)];
        let mut entries = Vec::new();
        for (rows, cols) in parts {
            let sub = self.restrict(rows, cols)?;
            let scale: f64 = rows.iter().map(|&i| self.mu.weights()[i]).sum();
            let (plan, _) = sub.optimal_plan()?;
            entries.extend(plan.entries.iter().map(|&(i, j, w)| (rows[i], cols[j], w * scale)));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let plan = TransportPlan { entries };
        let cost = self.plan_cost(&plan)?;
        Ok((plan, cost))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Point;
    use crate::duality::{check_admissible_within, check_cyclic_monotone};
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[f64]) -> Vec<Point> {
        v.iter().map(|x| Point::scalar(*x)).collect()
    }

    fn uniform(v: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::uniform(pts(v)).unwrap()
    }

    fn fin(v: f64) -> XReal {
        XReal::Finite(v)
    }

    fn indexed(n: usize, w: Vec<f64>) -> DiscreteMeasure {
        DiscreteMeasure::new((0..n).map(|k| Point::scalar(k as f64)).collect(), w).unwrap()
    }

    fn random_feasible(rng: &mut ChaCha8Rng, n: usize, m: usize, uniform_weights: bool) -> BipartiteInstance {
        loop {
            let wts = |rng: &mut ChaCha8Rng, k: usize| -> Vec<f64> {
                if uniform_weights {
                    return vec![1.0 / k as f64; k];
                }
                let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect()
            };
            let (wm, wn) = (wts(rng, n), wts(rng, m));
            let matrix = (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| if rng.random_bool(0.3) { XReal::PosInf } else { fin(rng.random_range(-1.0..1.0)) })
                        .collect()
                })
                .collect();
            let Ok(inst) = BipartiteInstance::from_matrix(indexed(n, wm), indexed(m, wn), matrix) else { continue };
            if inst.hall_feasible().unwrap().feasible {
                return inst;
            }
        }
    }

    #[test]
    fn all_finite_is_feasible() {
        let inst =
            BipartiteInstance::new(uniform(&[0.0, 1.0]), uniform(&[2.0, 3.0]), &CostFunction::Quadratic).unwrap();
        let r = inst.hall_feasible().unwrap();
        assert!(r.feasible && r.mu_witness.is_none());
    }

    #[test]
    fn hyperbola_atoms_are_infeasible() {
        let inst = BipartiteInstance::new(
            uniform(&[0.5, 1.0, 1.5, 2.0]),
            uniform(&[2.0, 1.0, 2.0 / 3.0, 0.5]),
            &CostFunction::Polar,
        )
        .unwrap();
        let r = inst.hall_feasible().unwrap();
        assert!(!r.feasible);
        let nu = r.nu_witness.unwrap();
        assert_eq!(nu.atoms, vec![3]);
        assert_eq!(nu.blocked, vec![0, 1, 2, 3]);
        assert!((nu.excess - 0.25).abs() < 1e-12);
        let mu = r.mu_witness.unwrap();
        assert_eq!(mu.atoms, vec![0]);
    }

    #[test]
    fn witness_is_inclusion_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 30 {
            let n = rng.random_range(2..7);
            let m = rng.random_range(2..7);
            let matrix: Vec<Vec<XReal>> = (0..n)
                .map(|_| (0..m).map(|_| if rng.random_bool(0.6) { XReal::PosInf } else { fin(1.0) }).collect())
                .collect();
            if matrix.iter().any(|r| r.iter().all(|v| !v.is_finite())) && rng.random_bool(0.5) {
                continue;
            }
            let inst = BipartiteInstance::from_matrix(
                indexed(n, vec![1.0 / n as f64; n]),
                indexed(m, vec![1.0 / m as f64; m]),
                matrix.clone(),
            )
            .unwrap();
            let r = inst.hall_feasible().unwrap();
            let Some(w) = r.mu_witness else { continue };
            checked += 1;
            // brute force over subsets: violation oracle
            let violates = |set: &[usize]| -> bool {
                let partners = (0..m).filter(|&j| set.iter().any(|&i| matrix[i][j].is_finite())).count();
                set.len() as f64 / n as f64 > partners as f64 / m as f64 + 1e-12
            };
            assert!(violates(&w.atoms));
            for size in 1..w.atoms.len() {
                for sub in w.atoms.iter().copied().combinations(size) {
                    assert!(!violates(&sub), "{sub:?} ⊂ {:?}", w.atoms);
                }
            }
        }
    }

    #[test]
    fn diagonal_plan() {
        let matrix = vec![vec![fin(0.0), fin(1.0)], vec![fin(1.0), fin(0.0)]];
        let inst =
            BipartiteInstance::from_matrix(indexed(2, vec![0.5, 0.5]), indexed(2, vec![0.5, 0.5]), matrix).unwrap();
        let (plan, cost) = inst.optimal_plan().unwrap();
        assert_eq!(plan.entries, vec![(0, 0, 0.5), (1, 1, 0.5)]);
        assert_eq!(cost, 0.0);
        let (phi, psi) = inst.dual_potentials(&plan).unwrap();
        assert!(inst.dual_objective(&phi, &psi).abs() < 1e-15);
    }

    #[test]
    fn polar_two_atoms_forced_structure() {
        // 2·(1/2) = 1 is forbidden, so 2 -> 2 and 3 -> 1/2
        let inst = BipartiteInstance::new(uniform(&[2.0, 3.0]), uniform(&[2.0, 0.5]), &CostFunction::Polar).unwrap();
        let (plan, cost) = inst.optimal_plan().unwrap();
        assert_eq!(plan.entries, vec![(0, 0, 0.5), (1, 1, 0.5)]);
        let expected = 0.5 * -(3.0f64).ln() + 0.5 * -(0.5f64).ln();
        assert!((cost - expected).abs() < 1e-12);
    }

    #[test]
    fn optimal_cost_matches_permutation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let inst = random_feasible(&mut rng, 6, 6, true);
            let (_, cost) = inst.optimal_plan().unwrap();
            let best = (0..6)
                .permutations(6)
                .filter_map(|p| p.iter().enumerate().map(|(i, &j)| inst.matrix()[i][j].finite()).sum::<Option<f64>>())
                .fold(f64::INFINITY, f64::min)
                / 6.0;
            assert!((cost - best).abs() < 1e-9, "{cost} vs {best}");
        }
    }

    #[test]
    fn strong_duality_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let (n, m) = (rng.random_range(2..12), rng.random_range(2..12));
            let inst = random_feasible(&mut rng, n, m, false);
            let (plan, cost) = inst.optimal_plan().unwrap();
            for (r, w) in plan.row_sums(n).iter().zip(inst.mu().weights()) {
                assert!((r - w).abs() < 1e-9);
            }
            for (c, w) in plan.column_sums(m).iter().zip(inst.nu().weights()) {
                assert!((c - w).abs() < 1e-9);
            }
            let g = PairSet::new(
                plan.entries.iter().map(|e| inst.mu().atoms()[e.0].clone()).collect(),
                plan.entries.iter().map(|e| inst.nu().atoms()[e.1].clone()).collect(),
                inst.cost().clone(),
            )
            .unwrap();
            assert!(check_cyclic_monotone(&g).is_positive());
            let (phi, psi) = inst.dual_potentials(&plan).unwrap();
            assert!(
                check_admissible_within(&phi, inst.mu().atoms(), &psi, inst.nu().atoms(), inst.cost(), 1e-12).unwrap()
            );
            assert!((inst.dual_objective(&phi, &psi) - cost).abs() <= 1e-9);
        }
    }

    #[test]
    fn suboptimal_plan_is_flagged() {
        let matrix = vec![vec![fin(0.0), fin(1.0)], vec![fin(1.0), fin(0.0)]];
        let inst =
            BipartiteInstance::from_matrix(indexed(2, vec![0.5, 0.5]), indexed(2, vec![0.5, 0.5]), matrix).unwrap();
        let swapped = TransportPlan { entries: vec![(0, 1, 0.5), (1, 0, 0.5)] };
        assert!(matches!(inst.dual_potentials(&swapped), Err(Error::Unbounded { .. })));
    }

    fn eight_atom_instance() -> BipartiteInstance {
        let atoms = [5.0 / 8.0, 6.0 / 8.0, 7.0 / 8.0, 1.0, 1.25, 1.5, 1.75, 2.0];
        BipartiteInstance::new(uniform(&atoms), uniform(&atoms), &CostFunction::Polar).unwrap()
    }

    #[test]
    fn eight_atoms_split_at_one() {
        let inst = eight_atom_instance();
        let splits = inst.detect_decomposition().unwrap();
        assert_eq!(splits, vec![Split { a: vec![0, 1, 2, 3], b: vec![4, 5, 6, 7], mass: 0.5 }]);
        let (_, direct) = inst.optimal_plan().unwrap();
        let (plan, cost) = inst.solve_split(&splits[0]).unwrap();
        assert!((cost - direct).abs() <= 1e-9);
        assert!(plan.row_sums(8).iter().all(|r| (r - 0.125).abs() < 1e-15));
        assert!(plan.column_sums(8).iter().all(|c| (c - 0.125).abs() < 1e-15));
    }

    #[test]
    fn strongly_compatible_has_no_split() {
        let inst =
            BipartiteInstance::new(uniform(&[0.0, 1.0, 2.0]), uniform(&[0.5, 1.5]), &CostFunction::Quadratic).unwrap();
        assert!(inst.detect_decomposition().unwrap().is_empty());
    }

    #[test]
    fn separated_blocks_give_two_splits() {
        let inf = XReal::PosInf;
        let matrix = vec![
            vec![fin(0.0), fin(1.0), inf, inf],
            vec![fin(1.0), fin(0.0), inf, inf],
            vec![inf, inf, fin(0.0), fin(2.0)],
            vec![inf, inf, fin(2.0), fin(0.0)],
        ];
        let inst =
            BipartiteInstance::from_matrix(indexed(4, vec![0.25; 4]), indexed(4, vec![0.25; 4]), matrix).unwrap();
        let splits = inst.detect_decomposition().unwrap();
        assert_eq!(splits.len(), 2);
        assert_eq!(splits[0].a, vec![0, 1]);
        assert_eq!(splits[0].b, vec![0, 1]);
        assert_eq!(splits[1].a, vec![2, 3]);
    }

    #[test]
    fn infeasible_plan_request_errors() {
        let inst = BipartiteInstance::new(uniform(&[0.5, 1.0]), uniform(&[0.5, 3.0]), &CostFunction::Polar).unwrap();
        assert!(matches!(inst.optimal_plan(), Err(Error::Infeasible)));
    }
}
