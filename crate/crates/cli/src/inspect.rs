use std::fs::File;

use anyhow::{Context, Result};
use infcost_core::duality::{check_cyclic_monotone, check_path_bounded};
use infcost_core::hall::{geometry, mask_to_indices, DEFAULT_TOL, MAX_VERTEX_ATOMS};
use infcost_core::io::{read_json, read_plan_csv, write_json, PolytopeFile, PotentialFile};
use infcost_core::{Certificate, HallPolytope, PairSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::input::{fmt_atoms, load};
use crate::{PolytopeArgs, Status, VerifyArgs};

const SAMPLE: usize = 400;

fn fmt_vec(v: &[f64]) -> String {
    format!("({})", v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", "))
}

pub fn polytope(args: &PolytopeArgs) -> Result<Status> {
    let l = load(&args.instance, args.alpha.as_deref())?;
    let mu = l.instance.mu.quadrature()?;
    let atoms = l.nu.atoms();
    let poly = HallPolytope::build(&mu, atoms, &l.cost)?;
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    let m = poly.m();
    println!("m = {m}");
    println!("inequalities (Σ_{{i∈I}} α_i ≤ μ(A_I)):");
    for (subset, bound) in poly.inequalities() {
        println!("  I = {{{}}}  ≤ {bound:.9}", fmt_atoms(atoms, &mask_to_indices(subset)));
    }
    println!("equality: Σ α_i = 1");
    if m <= MAX_VERTEX_ATOMS {
        let verts = poly.vertices()?;
        println!("dimension {}", poly.dimension()?);
        println!("vertices ({}):", verts.len());
        for v in &verts {
            println!("  {}", fmt_vec(v));
        }
        println!("faces F_I (I, #vertices, dimension):");
        for subset in 1..poly.full_mask() {
            let face = poly.face_vertices(subset, tol)?;
            let dim = geometry::affine_dimension(&face, tol).map_or("-".to_string(), |d| d.to_string());
            println!("  {{{}}}  {}  {dim}", fmt_atoms(atoms, &mask_to_indices(subset)), face.len());
        }
    } else {
        println!("vertex enumeration skipped: m > {MAX_VERTEX_ATOMS}");
    }
    if args.alpha.is_some() {
        let class = poly.classify(l.nu.weights(), tol)?;
        println!("α: {}", serde_json::to_string(&class)?);
    }
    if let Some(out) = &args.out {
        write_json(out, &PolytopeFile::from_polytope(&poly))?;
    }
    Ok(Status::Ok)
}

pub fn verdict(c: &Certificate) -> String {
    match c {
        Certificate::CyclicallyMonotone => "c-cyclically monotone".into(),
        Certificate::PathBounded { .. } => "c-path-bounded".into(),
        Certificate::NegativeCycle { cycle, identity_cost, permuted_cost } => {
            format!("negative cycle {cycle:?}: {identity_cost} → {permuted_cost}")
        }
        Certificate::Unbounded { cycle, .. } => format!("unbounded along {cycle:?}"),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Status> {
    let l = load(&args.instance, None)?;
    let mu = l.instance.mu.quadrature()?;
    let file: PotentialFile =
        read_json(&args.potential).with_context(|| format!("reading {}", args.potential.display()))?;
    let phi = file.build()?;
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    let nodes: Vec<_> =
        mu.nodes().iter().zip(mu.weights()).filter(|(_, w)| **w > 0.0).map(|(p, _)| p.clone()).collect();

    let mut pairs = phi.subgradient_indices(&nodes, tol)?;
    println!("subgradient pairs on the support: {}", pairs.len());
    if pairs.len() > SAMPLE {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let mut idx = rand::seq::index::sample(&mut rng, pairs.len(), SAMPLE).into_vec();
        idx.sort_unstable();
        pairs = idx.into_iter().map(|i| pairs[i]).collect();
        println!("checking a sample of {SAMPLE} (seed {})", args.seed);
    }
    let g = PairSet::new(
        pairs.iter().map(|&(k, _)| nodes[k].clone()).collect(),
        pairs.iter().map(|&(_, i)| phi.supports()[i].clone()).collect(),
        phi.cost().clone(),
    )?;
    let cm = check_cyclic_monotone(&g);
    let pb = check_path_bounded(&g);
    println!("cyclic monotonicity: {}", verdict(&cm));
    println!("path boundedness: {}", verdict(&pb));
    let mut ok = cm.is_positive() && pb.is_positive();

    if let Some(path) = &args.plan {
        let plan = read_plan_csv(File::open(path).with_context(|| format!("opening {}", path.display()))?)?;
        let mut worst = 0.0f64;
        for &(k, i, _) in &plan.entries {
            let x = mu.nodes().get(k).context("plan node out of range")?;
            let branches = phi.branches(x)?;
            let b = branches.get(i).context("plan atom out of range")?;
            let r = b.to_f64() - phi.eval(x)?.to_f64();
            worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
        }
        println!("plan support subgradient residual {worst:.3e}");
        ok &= worst <= tol;
    }
    println!("{}", if ok { "verified" } else { "NOT verified" });
    Ok(if ok { Status::Ok } else { Status::Infeasible })
}
