use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use infcost_core::discrete_ot::BipartiteInstance;
use infcost_core::duality::check_cyclic_monotone;
use infcost_core::hall::{mask_to_indices, DEFAULT_TOL};
use infcost_core::io::{write_json, write_plan_csv, PotentialFile};
use infcost_core::semidiscrete::{recombine, LogEntry, SemiDiscrete, SolveOptions, SubProblem};
use infcost_core::{
    Certificate, Classification, CostFunction, Disk, PairSet, Point, Potential, TransportPlan, WeightVector, XReal,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{fmt_atoms, load};
use crate::inspect::verdict;
use crate::{svg, SolveArgs, Status};

/// Support pairs checked for cyclic monotonicity; larger supports are subsampled.
const CERT_PAIRS: usize = 400;

#[derive(Serialize)]
struct SemiPotential<'a> {
    t: &'a [f64],
    #[serde(flatten)]
    potential: PotentialFile,
}

#[derive(Serialize)]
struct DiscretePotential<'a> {
    phi: &'a [XReal],
    psi: &'a [XReal],
}

#[derive(Serialize)]
struct CertificateFile {
    support: usize,
    checked: usize,
    /// Largest `c(x,u_i) + s_i - φ(x)` over the support, when a potential exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    subgradient_residual: Option<f64>,
    certificate: Certificate,
}

fn write_plan(path: &Path, plan: &TransportPlan) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_plan_csv(BufWriter::new(f), plan)?;
    Ok(())
}

fn write_log(path: &Path, log: &[LogEntry]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "iter,residual,step")?;
    for e in log {
        writeln!(w, "{},{:e},{:e}", e.iter, e.residual, e.step)?;
    }
    Ok(w.flush()?)
}

/// Cyclic-monotonicity certificate on the plan support, subsampled by `seed`.
fn certify(
    xs: &[Point],
    ys: &[Point],
    plan: &TransportPlan,
    cost: &CostFunction,
    seed: u64,
) -> Result<(usize, Certificate)> {
    let mut pick: Vec<usize> = (0..plan.entries.len()).collect();
    if pick.len() > CERT_PAIRS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pick = rand::seq::index::sample(&mut rng, plan.entries.len(), CERT_PAIRS).into_vec();
        pick.sort_unstable();
    }
    let g = PairSet::new(
        pick.iter().map(|&e| xs[plan.entries[e].0].clone()).collect(),
        pick.iter().map(|&e| ys[plan.entries[e].1].clone()).collect(),
        cost.clone(),
    )?;
    Ok((pick.len(), check_cyclic_monotone(&g)))
}

fn subgradient_residual(sd: &SemiDiscrete, phi: &Potential, plan: &TransportPlan) -> f64 {
    let shifts = phi.shifts();
    let mut worst = 0.0f64;
    for &(k, i, _) in &plan.entries {
        let branch = |j: usize| sd.cost_at(k, j) + shifts[j].to_f64();
        let best = (0..sd.m()).map(branch).fold(f64::INFINITY, f64::min);
        worst = worst.max(branch(i) - best);
    }
    worst
}

fn options(args: &SolveArgs, disks: Vec<Disk>) -> SolveOptions {
    SolveOptions { max_iter: args.max_iter, tol: args.tol.unwrap_or(1e-6), disks, ..SolveOptions::default() }
}

/// Solves one semi-discrete problem; its log and potential file names start with `prefix`.
fn solve_part(
    sd: &SemiDiscrete,
    alpha: &[f64],
    opts: &SolveOptions,
    out: &Path,
    prefix: &str,
) -> Result<(TransportPlan, Potential, WeightVector)> {
    let report = sd.solve(alpha, opts)?;
    println!(
        "{}t = {:?}, residual {:.3e} after {} iterations{}",
        prefix.replace('_', " "),
        report.t.as_slice(),
        report.residual,
        report.iterations,
        if report.perturbed.is_empty() { "" } else { " (perturbation fallback)" }
    );
    write_log(&out.join(format!("{prefix}log.csv")), &report.log)?;
    let (plan, phi) = sd.extract_plan(&report.t, Some(alpha))?;
    let file = SemiPotential { t: report.t.as_slice(), potential: PotentialFile::from_potential(&phi) };
    write_json(&out.join(format!("{prefix}potential.json")), &file)?;
    Ok((plan, phi, report.t))
}

pub fn semi(args: &SolveArgs) -> Result<Status> {
    let l = load(&args.instance, args.alpha.as_deref())?;
    let mu = l.instance.mu.quadrature()?;
    let alpha = l.nu.weights().to_vec();
    let sd = SemiDiscrete::new(mu, l.nu.atoms().to_vec(), l.cost.clone())?;
    let opts = options(args, l.instance.disks()?);
    fs::create_dir_all(&args.out)?;

    let split = if args.decompose {
        match sd.polytope()?.classify(&alpha, DEFAULT_TOL)? {
            Classification::Boundary { active } => Some(active[0]),
            _ => {
                println!("no active set: solving without decomposition");
                None
            }
        }
    } else {
        None
    };

    let (plan, residual) = match split {
        Some(mask) => {
            let (a, b) = sd.decompose(&alpha, mask)?;
            println!("split on atoms {{{}}}", fmt_atoms(sd.supports(), &mask_to_indices(mask)));
            let mut parts: Vec<(&SubProblem, TransportPlan)> = Vec::new();
            let mut residual = 0.0f64;
            for (sub, tag) in [(&a, "part_a_"), (&b, "part_b_")] {
                let (p, phi, _) = solve_part(&sub.problem, &sub.alpha, &opts, &args.out, tag)?;
                residual = residual.max(subgradient_residual(&sub.problem, &phi, &p));
                write_plan(&args.out.join(format!("{tag}plan.csv")), &recombine(&[(sub, &p)]))?;
                parts.push((sub, p));
            }
            let refs: Vec<(&SubProblem, &TransportPlan)> = parts.iter().map(|(s, p)| (*s, p)).collect();
            (recombine(&refs), residual)
        }
        None => {
            let (p, phi, t) = solve_part(&sd, &alpha, &opts, &args.out, "")?;
            let r = subgradient_residual(&sd, &phi, &p);
            let dual = sd.dual_value(&t, &alpha)?;
            println!("cost {:.12}  dual {:.12}  gap {:.3e}", sd.plan_cost(&p), dual, (sd.plan_cost(&p) - dual).abs());
            if args.svg {
                svg::write_cells(&args.out.join("cells.svg"), &sd, &p)?;
            }
            (p, r)
        }
    };
    if split.is_some() {
        println!("recombined cost {:.12}", sd.plan_cost(&plan));
    }
    write_plan(&args.out.join("plan.csv"), &plan)?;
    let (checked, certificate) = certify(sd.measure().nodes(), sd.supports(), &plan, sd.cost(), args.seed)?;
    println!("certificate: {}", verdict(&certificate));
    write_json(
        &args.out.join("certificate.json"),
        &CertificateFile { support: plan.entries.len(), checked, subgradient_residual: Some(residual), certificate },
    )?;
    Ok(Status::Ok)
}

pub fn discrete(args: &SolveArgs) -> Result<Status> {
    let l = load(&args.instance, args.alpha.as_deref())?;
    let mu = l.instance.mu.discrete().context("μ must be discrete")?;
    let inst = BipartiteInstance::new(mu, l.nu, &l.cost)?;
    let report = inst.hall_feasible()?;
    if !report.feasible {
        println!("infeasible: max flow {:.12} < 1", report.flow);
        if let Some(w) = &report.mu_witness {
            println!("witness (μ atoms): {}", fmt_atoms(inst.mu().atoms(), &w.atoms));
        }
        if let Some(w) = &report.nu_witness {
            println!("witness (ν atoms): {}", fmt_atoms(inst.nu().atoms(), &w.atoms));
        }
        return Ok(Status::Infeasible);
    }
    fs::create_dir_all(&args.out)?;
    let splits = if args.decompose { inst.detect_decomposition()? } else { Vec::new() };
    let (plan, cost) = match splits.first() {
        Some(s) => {
            println!(
                "split: μ {{{}}} ↔ ν {{{}}}  mass {:.6}",
                fmt_atoms(inst.mu().atoms(), &s.a),
                fmt_atoms(inst.nu().atoms(), &s.b),
                s.mass
            );
            let (plan, cost) = inst.solve_split(s)?;
            let (in_a, in_b): (Vec<_>, Vec<_>) = plan.entries.iter().partition(|e| s.a.contains(&e.0));
            write_plan(&args.out.join("part_a_plan.csv"), &TransportPlan { entries: in_a })?;
            write_plan(&args.out.join("part_b_plan.csv"), &TransportPlan { entries: in_b })?;
            (plan, cost)
        }
        None => {
            if args.decompose {
                println!("no split: solving without decomposition");
            }
            inst.optimal_plan()?
        }
    };
    let (phi, psi) = inst.dual_potentials(&plan)?;
    let dual = inst.dual_objective(&phi, &psi);
    println!("cost {cost:.12}  dual {dual:.12}  gap {:.3e}", (cost - dual).abs());
    write_plan(&args.out.join("plan.csv"), &plan)?;
    write_json(&args.out.join("potential.json"), &DiscretePotential { phi: &phi, psi: &psi })?;
    let (checked, certificate) = certify(inst.mu().atoms(), inst.nu().atoms(), &plan, inst.cost(), args.seed)?;
    println!("certificate: {}", verdict(&certificate));
    write_json(
        &args.out.join("certificate.json"),
        &CertificateFile { support: plan.entries.len(), checked, subgradient_residual: None, certificate },
    )?;
    Ok(Status::Ok)
}
