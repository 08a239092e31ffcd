use anyhow::Result;
use infcost_core::discrete_ot::BipartiteInstance;
use infcost_core::hall::{mask_to_indices, DEFAULT_TOL, MAX_ATOMS};
use infcost_core::{Classification, HallPolytope, Point};

use crate::input::{fmt_atoms, load};
use crate::{CompatArgs, Status};

fn fmt_sets(atoms: &[Point], masks: &[u32]) -> String {
    masks.iter().map(|&s| format!("{{{}}}", fmt_atoms(atoms, &mask_to_indices(s)))).collect::<Vec<_>>().join(" ")
}

pub fn run(args: &CompatArgs) -> Result<Status> {
    let l = load(&args.instance, args.alpha.as_deref())?;
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    let atoms = l.nu.atoms();

    if let Ok(mu) = l.instance.mu.discrete() {
        let inst = BipartiteInstance::new(mu, l.nu.clone(), &l.cost)?;
        let report = inst.hall_feasible()?;
        println!("max flow: {:.12}", report.flow);
        if !report.feasible {
            println!("not c-compatible");
            if let Some(w) = &report.mu_witness {
                println!("witness (μ atoms): {}  excess {:.6}", fmt_atoms(inst.mu().atoms(), &w.atoms), w.excess);
            }
            if let Some(w) = &report.nu_witness {
                println!("witness (ν atoms): {}  excess {:.6}", fmt_atoms(atoms, &w.atoms), w.excess);
            }
            return Ok(Status::Infeasible);
        }
        let splits = inst.detect_decomposition()?;
        if splits.is_empty() {
            println!("strongly c-compatible");
        } else {
            println!("c-compatible, NOT strongly");
            eprintln!("warning: the problem decomposes; no potential sees every pair");
            for s in &splits {
                println!(
                    "split: μ {{{}}} ↔ ν {{{}}}  mass {:.6}",
                    fmt_atoms(inst.mu().atoms(), &s.a),
                    fmt_atoms(atoms, &s.b),
                    s.mass
                );
            }
        }
        return Ok(Status::Ok);
    }

    let mu = l.instance.mu.quadrature()?;
    if l.nu.len() > MAX_ATOMS {
        anyhow::bail!("{} atoms exceed the Hall-polytope cap of {MAX_ATOMS}", l.nu.len());
    }
    let poly = HallPolytope::build(&mu, atoms, &l.cost)?;
    match poly.classify(l.nu.weights(), tol)? {
        Classification::Interior => {
            println!("classification: Interior");
            println!("strongly c-compatible");
            Ok(Status::Ok)
        }
        Classification::Boundary { active } => {
            println!("classification: Boundary");
            println!("active sets: {}", fmt_sets(atoms, &active));
            println!("c-compatible, NOT strongly");
            eprintln!("warning: target weights lie on a proper face of the Hall polytope");
            Ok(Status::Ok)
        }
        Classification::Exterior { violated } => {
            println!("classification: Exterior");
            println!("violated sets: {}", fmt_sets(atoms, &violated));
            println!("not c-compatible");
            Ok(Status::Infeasible)
        }
    }
}
