use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use infcost_core::io::read_json;
use infcost_core::polarcalc::{a_transform, polar_subgradient, subgrad_to_polar, Piece};
use infcost_core::{GeomConvexFn, Point};
use serde::Deserialize;

use crate::input::{parse_grid, parse_list};
use crate::{PolarCommon, Status};

/// Convex function file.
#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum FunctionSpec {
    PiecewiseAffine { pieces: Vec<Piece> },
    HalfSquare { dim: usize },
    Indicator { lower: Vec<f64>, upper: Vec<f64> },
}

fn load_function(common: &PolarCommon) -> Result<(GeomConvexFn, infcost_core::GridSpec)> {
    let spec: FunctionSpec =
        read_json(&common.function).with_context(|| format!("reading {}", common.function.display()))?;
    let phi = match spec {
        FunctionSpec::PiecewiseAffine { pieces } => GeomConvexFn::from_pieces(pieces)?,
        FunctionSpec::HalfSquare { dim } => GeomConvexFn::half_square(dim),
        FunctionSpec::Indicator { lower, upper } => GeomConvexFn::indicator(lower, upper)?,
    };
    let grid = parse_grid(&common.grid, phi.dim(), common.refine)?;
    phi.validate(&grid, common.seed)?;
    Ok((phi, grid))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_rows(out: Option<&Path>, dim: usize, rows: &[(Point, f64)]) -> Result<()> {
    let mut w = sink(out)?;
    let header: Vec<String> = (0..dim).map(|i| format!("y{i}")).chain(["value".to_string()]).collect();
    writeln!(w, "{}", header.join(","))?;
    for (y, v) in rows {
        let cols: Vec<String> = y.coords().iter().map(|c| c.to_string()).chain([v.to_string()]).collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(w.flush()?)
}

fn read_points(path: &Path, dim: usize) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .filter(|l| l.trim_start().chars().next().is_some_and(|c| c.is_ascii_digit() || "+-.".contains(c)))
        .map(|l| {
            let v = parse_list(l)?;
            if v.len() != dim {
                bail!("row {l:?} has {} entries, expected {dim}", v.len());
            }
            Ok(Point::new(v))
        })
        .collect()
}

pub fn a_transform_cmd(common: &PolarCommon, ys: Option<&Path>) -> Result<Status> {
    let (phi, grid) = load_function(common)?;
    let points = match ys {
        Some(p) => read_points(p, phi.dim())?,
        None => grid.points().into_iter().map(Point::new).collect(),
    };
    let rows = points
        .into_iter()
        .map(|y| {
            let v = a_transform(&phi, &y, &grid)?;
            Ok((y, v))
        })
        .collect::<Result<Vec<_>>>()?;
    write_rows(common.out.as_deref(), phi.dim(), &rows)?;
    Ok(Status::Ok)
}

pub fn subgrad(
    common: &PolarCommon,
    x: &str,
    z: Option<&str>,
    y_grid: Option<&str>,
    tol: Option<f64>,
) -> Result<Status> {
    let (phi, grid) = load_function(common)?;
    let x = Point::new(parse_list(x)?);
    let tol = tol.unwrap_or(1e-6);
    let ys = match (z, y_grid) {
        (Some(z), _) => vec![subgrad_to_polar(&phi, &x, &Point::new(parse_list(z)?), Some(&grid))?],
        (None, Some(spec)) => polar_subgradient(&phi, &x, &parse_grid(spec, phi.dim(), 0)?, &grid, tol)?,
        (None, None) => bail!("give --z or --y-grid"),
    };
    let rows = ys
        .into_iter()
        .map(|y| {
            let v = a_transform(&phi, &y, &grid)?;
            Ok((y, v))
        })
        .collect::<Result<Vec<_>>>()?;
    write_rows(common.out.as_deref(), phi.dim(), &rows)?;
    Ok(Status::Ok)
}
