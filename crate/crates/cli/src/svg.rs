use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use infcost_core::semidiscrete::SemiDiscrete;
use infcost_core::TransportPlan;

const PALETTE: [&str; 10] =
    ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];
const SIZE: f64 = 480.0;

/// Smallest positive gap between sorted coordinates along `axis`.
fn spacing(sd: &SemiDiscrete, axis: usize) -> f64 {
    let mut v: Vec<f64> = sd.measure().nodes().iter().map(|p| p.coords()[axis]).collect();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 1e-12).fold(f64::INFINITY, f64::min)
}

/// One square (or bar) per node, colored by the atom receiving most of its mass.
pub fn write_cells(path: &Path, sd: &SemiDiscrete, plan: &TransportPlan) -> Result<()> {
    let d = sd.measure().dim();
    if d > 2 {
        bail!("cell plots need dimension ≤ 2, got {d}");
    }
    let mut owner = vec![(usize::MAX, 0.0); sd.n()];
    for &(k, i, w) in &plan.entries {
        if w > owner[k].1 {
            owner[k] = (i, w);
        }
    }
    let nodes = sd.measure().nodes();
    let gaps: Vec<f64> = (0..d).map(|a| Some(spacing(sd, a)).filter(|h| h.is_finite()).unwrap_or(1.0)).collect();
    let bounds: Vec<(f64, f64)> = (0..d)
        .map(|a| {
            let h = gaps[a];
            let (lo, hi) = nodes
                .iter()
                .map(|p| p.coords()[a])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), x| (l.min(x), u.max(x)));
            (lo - h / 2.0, hi + h / 2.0)
        })
        .collect();
    let scale = |a: usize, x: f64| (x - bounds[a].0) / (bounds[a].1 - bounds[a].0) * SIZE;
    let height = if d == 1 { 40.0 } else { SIZE };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{height}" shape-rendering="crispEdges">"#
    )?;
    for (k, p) in nodes.iter().enumerate() {
        let Some(color) = PALETTE.get(owner[k].0 % PALETTE.len()).filter(|_| owner[k].0 != usize::MAX) else {
            continue;
        };
        let w = gaps[0] / (bounds[0].1 - bounds[0].0) * SIZE;
        let x = scale(0, p.coords()[0]) - w / 2.0;
        let (y, h) = if d == 1 {
            (0.0, height)
        } else {
            let h = gaps[1] / (bounds[1].1 - bounds[1].0) * SIZE;
            (SIZE - scale(1, p.coords()[1]) - h / 2.0, h)
        };
        writeln!(s, r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{color}"/>"#)?;
    }
    for (i, u) in sd.supports().iter().enumerate() {
        let inside = (0..d).all(|a| (bounds[a].0..=bounds[a].1).contains(&u.coords()[a]));
        if inside {
            let cx = scale(0, u.coords()[0]);
            let cy = if d == 1 { height / 2.0 } else { SIZE - scale(1, u.coords()[1]) };
            writeln!(s, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="black"><title>atom {i}</title></circle>"#)?;
        }
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}
