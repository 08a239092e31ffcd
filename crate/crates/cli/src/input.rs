use std::path::Path;

use anyhow::{bail, Context, Result};
use infcost_core::io::{read_instance, Instance};
use infcost_core::{CostFunction, DiscreteMeasure, GridSpec, Point};

pub struct Loaded {
    pub instance: Instance,
    pub cost: CostFunction,
    /// `ν` with its weights replaced by `--alpha` when given.
    pub nu: DiscreteMeasure,
}

pub fn load(path: &Path, alpha: Option<&str>) -> Result<Loaded> {
    let instance = read_instance(path).with_context(|| format!("reading {}", path.display()))?;
    let cost = instance.cost.build()?;
    let nu = instance.nu.discrete().context("ν must be discrete")?;
    let nu = match alpha {
        None => nu,
        Some(s) => {
            let w = parse_list(s)?;
            if w.len() != nu.len() {
                bail!("--alpha has {} entries, ν has {} atoms", w.len(), nu.len());
            }
            DiscreteMeasure::new(nu.atoms().to_vec(), w)?
        }
    };
    Ok(Loaded { instance, cost, nu })
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?}"))).collect()
}

/// `lo,hi,resolution` on every axis.
pub fn parse_grid(s: &str, dim: usize, refine: usize) -> Result<GridSpec> {
    let v = parse_list(s)?;
    let [lo, hi, res] = v[..] else {
        bail!("grid must be lo,hi,resolution");
    };
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || res < 2.0 || res.fract() != 0.0 {
        bail!("bad grid {s:?}");
    }
    Ok(GridSpec::new(vec![lo; dim], vec![hi; dim], res as usize, refine)?)
}

pub fn fmt_point(p: &Point) -> String {
    match p.coords() {
        [x] => format!("{x}"),
        c => format!("({})", c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
    }
}

pub fn fmt_atoms(atoms: &[Point], idx: &[usize]) -> String {
    idx.iter().map(|&i| fmt_point(&atoms[i])).collect::<Vec<_>>().join(", ")
}
