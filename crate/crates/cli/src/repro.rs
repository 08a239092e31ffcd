use anyhow::Result;
use infcost_core::discrete_ot::BipartiteInstance;
use infcost_core::duality::check_cyclic_monotone;
use infcost_core::hall::geometry::dist;
use infcost_core::polarcalc::{is_polar_subgradient, subgrad_to_polar};
use infcost_core::{Certificate, CostFunction, DiscreteMeasure, GeomConvexFn, GridSpec, PairSet, Point};

use crate::{ReproName, Status};

fn atoms(v: &[f64]) -> Result<DiscreteMeasure> {
    Ok(DiscreteMeasure::uniform(v.iter().map(|x| Point::scalar(*x)).collect())?)
}

fn report(name: &str, outcome: Result<String, String>) -> Status {
    match outcome {
        Ok(msg) => {
            println!("PASS {name}: {msg}");
            Status::Ok
        }
        Err(msg) => {
            println!("FAIL {name}: {msg}");
            Status::Usage
        }
    }
}

pub fn run(name: ReproName) -> Result<Status> {
    Ok(match name {
        ReproName::ExmNegCycle => report("exm-neg-cycle", neg_cycle()?),
        ReproName::ExmHyperbola => report("exm-hyperbola", hyperbola()?),
        ReproName::ExmDecompose => report("exm-decompose", decompose()?),
        ReproName::ExmInversion => report("exm-inversion", inversion()?),
    })
}

fn neg_cycle() -> Result<Result<String, String>> {
    let pts = |v: [f64; 2]| v.iter().map(|x| Point::scalar(*x)).collect::<Vec<_>>();
    // with the shared target (2) the swap only reproduces the same pairs
    let shared = PairSet::new(pts([2.0, 3.0]), pts([2.0, 2.0]), CostFunction::Polar)?;
    println!("pairs (2,2),(3,2): {:?}", check_cyclic_monotone(&shared));
    let g = PairSet::new(pts([2.0, 3.0]), pts([2.0, 3.0]), CostFunction::Polar)?;
    Ok(match check_cyclic_monotone(&g) {
        Certificate::NegativeCycle { cycle, identity_cost, permuted_cost } => {
            let (id, swapped) = g.replay_cycle(&cycle);
            let ok = (identity_cost + 24f64.ln()).abs() <= 1e-12
                && (permuted_cost + 25f64.ln()).abs() <= 1e-12
                && (id - identity_cost).abs() <= 1e-12
                && swapped.finite().is_some_and(|s| (s - permuted_cost).abs() <= 1e-12);
            if ok {
                Ok(format!("pairs (2,2),(3,3) violate c-cyclic monotonicity: -ln 24 = {identity_cost} > -ln 25 = {permuted_cost}"))
            } else {
                Err(format!("unexpected costs {identity_cost}, {permuted_cost}"))
            }
        }
        other => Err(format!("expected a negative cycle, got {other:?}")),
    })
}

fn hyperbola() -> Result<Result<String, String>> {
    let n = 16;
    let xs: Vec<f64> = (0..n).map(|k| 0.5 + 1.5 * k as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
    let inst = BipartiteInstance::new(atoms(&xs)?, atoms(&ys)?, &CostFunction::Polar)?;
    let r = inst.hall_feasible()?;
    if r.feasible {
        return Ok(Err("discrete instance reported feasible".into()));
    }
    let Some(w) = r.nu_witness else {
        return Ok(Err("no witness on the ν side".into()));
    };
    if w.atoms.len() != 1 || ys[w.atoms[0]] != 0.5 {
        return Ok(Err(format!("witness {:?}", w.atoms)));
    }
    // continuous check on 10³ curve nodes: ν({y ≤ a}) ≤ μ({x : xa > 1})
    let n = 1000;
    let w = 1.0 / n as f64;
    let cx: Vec<f64> = (0..n).map(|k| 0.5 + 1.5 * (k as f64 + 0.5) / n as f64).collect();
    let cy: Vec<f64> = cx.iter().map(|x| 1.0 / x).collect();
    let mut worst = f64::NEG_INFINITY;
    for (lhs, rhs) in [(&cy, &cx), (&cx, &cy)] {
        for &a in lhs.iter() {
            let below: f64 = lhs.iter().filter(|v| **v <= a).map(|_| w).sum();
            let reach: f64 = rhs.iter().filter(|v| **v * a > 1.0).map(|_| w).sum();
            worst = worst.max(below - reach);
        }
    }
    if worst > w + 1e-12 {
        return Ok(Err(format!("continuous inequality off by {worst}")));
    }
    Ok(Ok(format!(
        "compatible up to one grid node ({worst:.1e}); 16-atom plan infeasible, witness ν atom 1/2, max flow {:.6}",
        r.flow
    )))
}

fn decompose() -> Result<Result<String, String>> {
    let a = [5.0 / 8.0, 6.0 / 8.0, 7.0 / 8.0, 1.0, 1.25, 1.5, 1.75, 2.0];
    let inst = BipartiteInstance::new(atoms(&a)?, atoms(&a)?, &CostFunction::Polar)?;
    let splits = inst.detect_decomposition()?;
    let [s] = &splits[..] else {
        return Ok(Err(format!("expected one split, got {splits:?}")));
    };
    if s.a != [0, 1, 2, 3] || s.b != [4, 5, 6, 7] {
        return Ok(Err(format!("split {s:?}")));
    }
    let (_, direct) = inst.optimal_plan()?;
    let (_, split) = inst.solve_split(s)?;
    if (direct - split).abs() > 1e-9 {
        return Ok(Err(format!("recombined cost {split} vs direct {direct}")));
    }
    Ok(Ok(format!("split [1/2,1] ↔ (1,2], recombined cost {split:.12} = direct {direct:.12}")))
}

fn inversion() -> Result<Result<String, String>> {
    let phi = GeomConvexFn::half_square(2);
    let grid = GridSpec::cube(2, 4.0, 81, 0);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let th = k as f64 * 0.61 + 0.2;
        let r = 0.5 + 0.15 * k as f64;
        let x = Point::new(vec![r * th.cos(), r * th.sin()]);
        let y = subgrad_to_polar(&phi, &x, &x, Some(&grid))?;
        let expected: Vec<f64> = x.coords().iter().map(|c| 2.0 * c / (r * r)).collect();
        worst = worst.max(dist(y.coords(), &expected));
        if !is_polar_subgradient(&phi, &x, &y, &grid, 1e-9)? {
            return Ok(Err(format!("{y} fails the tangency test at {x}")));
        }
    }
    if worst > 1e-9 {
        return Ok(Err(format!("inversion error {worst}")));
    }
    Ok(Ok(format!("polar subgradient of |x|²/2 is 2x/|x|² at 10 points (error {worst:.1e})")))
}
