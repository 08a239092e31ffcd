//! File formats: instance, measure, cost, potential and polytope JSON; cost
//! table and plan CSV.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, Point, TableCost};
use crate::duality::Potential;
use crate::error::{Error, Result};
use crate::hall::HallPolytope;
use crate::measures::{DiscreteMeasure, Disk, QuadratureMeasure};
use crate::semidiscrete::TransportPlan;
use crate::xreal::XReal;

/// Cost table in JSON: explicit point lists and values (`"inf"` allowed).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableSpec {
    pub rows: Vec<Point>,
    pub cols: Vec<Point>,
    pub values: Vec<Vec<XReal>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostSpec {
    Polar,
    Bilinear,
    Quadratic,
    Table(TableSpec),
}

impl CostSpec {
    pub fn build(&self) -> Result<CostFunction> {
        Ok(match self {
            CostSpec::Polar => CostFunction::Polar,
            CostSpec::Bilinear => CostFunction::Bilinear,
            CostSpec::Quadratic => CostFunction::Quadratic,
            CostSpec::Table(t) => {
                CostFunction::Table(TableCost::new(t.rows.clone(), t.cols.clone(), t.values.clone())?)
            }
        })
    }

    pub fn from_cost(c: &CostFunction) -> Self {
        match c {
            CostFunction::Polar => CostSpec::Polar,
            CostFunction::Bilinear => CostSpec::Bilinear,
            CostFunction::Quadratic => CostSpec::Quadratic,
            CostFunction::Table(t) => CostSpec::Table(TableSpec {
                rows: t.rows().to_vec(),
                cols: t.cols().to_vec(),
                values: t.values().to_vec(),
            }),
        }
    }
}

/// Constant density `value` on the box `[lower, upper)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MeasureSpec {
    Discrete {
        points: Vec<Point>,
        weights: Option<Vec<f64>>,
    },
    /// Midpoint grid; the density is the sum of the boxes containing a node,
    /// or uniform when `density` is absent.
    Grid {
        bounds: Vec<(f64, f64)>,
        resolution: Vec<usize>,
        #[serde(default)]
        density: Option<Vec<DensityBox>>,
    },
    Samples {
        points: Vec<Point>,
    },
}

impl MeasureSpec {
    pub fn quadrature(&self) -> Result<QuadratureMeasure> {
        match self {
            MeasureSpec::Discrete { .. } => Ok(QuadratureMeasure::from_discrete(&self.discrete()?)),
            MeasureSpec::Grid { bounds, resolution, density } => {
                QuadratureMeasure::grid(bounds, resolution, |p| match density {
                    None => 1.0,
                    Some(boxes) => boxes
                        .iter()
                        .filter(|b| {
                            p.coords().iter().zip(b.lower.iter().zip(&b.upper)).all(|(x, (lo, hi))| lo <= x && x < hi)
                        })
                        .map(|b| b.value)
                        .sum(),
                })
            }
            MeasureSpec::Samples { points } => QuadratureMeasure::from_samples(points.clone()),
        }
    }

    pub fn discrete(&self) -> Result<DiscreteMeasure> {
        match self {
            MeasureSpec::Discrete { points, weights: Some(w) } => DiscreteMeasure::new(points.clone(), w.clone()),
            MeasureSpec::Discrete { points, weights: None } => DiscreteMeasure::uniform(points.clone()),
            _ => Err(Error::InvalidInput("expected a discrete measure".into())),
        }
    }

    pub fn from_discrete(m: &DiscreteMeasure) -> Self {
        MeasureSpec::Discrete { points: m.atoms().to_vec(), weights: Some(m.weights().to_vec()) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskSpec {
    pub center: Point,
    pub radius: f64,
    pub label: (usize, usize),
}

/// A transport problem: cost, source, target, and optional extras.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub cost: CostSpec,
    pub mu: MeasureSpec,
    pub nu: MeasureSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disks: Vec<DiskSpec>,
}

impl Instance {
    pub fn disks(&self) -> Result<Vec<Disk>> {
        self.disks
            .iter()
            .map(|d| {
                if d.radius.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(Error::InvalidInput("disk radius must be positive".into()));
                }
                Ok(Disk::new(d.center.clone(), d.radius, d.label))
            })
            .collect()
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let mut s = String::new();
    std::fs::File::open(path)?.read_to_string(&mut s)?;
    Ok(serde_json::from_str(&s)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    read_json(path)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialFile {
    pub supports: Vec<Point>,
    pub shifts: Vec<XReal>,
    pub cost: CostSpec,
}

impl PotentialFile {
    pub fn from_potential(p: &Potential) -> Self {
        Self { supports: p.supports().to_vec(), shifts: p.shifts().to_vec(), cost: CostSpec::from_cost(p.cost()) }
    }

    pub fn build(&self) -> Result<Potential> {
        Potential::new(self.supports.clone(), self.shifts.clone(), self.cost.build()?)
    }
}

/// Masses keyed by the decimal bitmask of the subset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub m: usize,
    pub masses: BTreeMap<String, f64>,
}

impl PolytopeFile {
    pub fn from_polytope(p: &HallPolytope) -> Self {
        let masses = p.masses().iter().enumerate().map(|(i, v)| (i.to_string(), *v)).collect();
        Self { m: p.m(), masses }
    }

    pub fn build(&self) -> Result<HallPolytope> {
        let mut table = vec![f64::NAN; 1usize.checked_shl(self.m as u32).unwrap_or(0)];
        for (k, v) in &self.masses {
            let i: usize = k.parse().map_err(|_| Error::InvalidInput(format!("bad bitmask {k}")))?;
            *table.get_mut(i).ok_or_else(|| Error::InvalidInput(format!("bitmask {k} out of range")))? = *v;
        }
        if table.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("mass table is incomplete".into()));
        }
        HallPolytope::from_masses(self.m, table)
    }
}

/// Cost matrix CSV: one row per source point, `inf` for `+∞`, no header.
pub fn read_table_csv(reader: impl Read) -> Result<Vec<Vec<XReal>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<XReal>().map_err(|_| Error::InvalidInput(format!("bad cost entry {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(row);
    }
    Ok(out)
}

pub fn write_table_csv(writer: impl Write, values: &[Vec<XReal>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in values {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct PlanRow {
    node_id: usize,
    atom_id: usize,
    mass: f64,
}

/// Plan CSV with header `node_id,atom_id,mass`.
pub fn write_plan_csv(writer: impl Write, plan: &TransportPlan) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for &(node_id, atom_id, mass) in &plan.entries {
        w.serialize(PlanRow { node_id, atom_id, mass })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_plan_csv(reader: impl Read) -> Result<TransportPlan> {
    let mut rdr = csv::Reader::from_reader(reader);
    let entries = rdr
        .deserialize::<PlanRow>()
        .map(|r| r.map(|r| (r.node_id, r.atom_id, r.mass)).map_err(Error::from))
        .collect::<Result<_>>()?;
    Ok(TransportPlan { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::Certificate;

    #[test]
    fn table_csv_round_trip() {
        let values = vec![vec![XReal::Finite(0.5), XReal::PosInf], vec![XReal::Finite(-1.25), XReal::Finite(3.0)]];
        let mut buf = Vec::new();
        write_table_csv(&mut buf, &values).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0.5,inf\n-1.25,3\n");
        assert_eq!(read_table_csv(buf.as_slice()).unwrap(), values);
        assert!(read_table_csv("1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn plan_csv_round_trip() {
        let plan = TransportPlan { entries: vec![(0, 1, 0.25), (3, 0, 0.75)] };
        let mut buf = Vec::new();
        write_plan_csv(&mut buf, &plan).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("node_id,atom_id,mass\n"));
        assert_eq!(read_plan_csv(buf.as_slice()).unwrap(), plan);
    }

    #[test]
    fn instance_json() {
        let text = r#"{
            "cost": "polar",
            "mu": {"type": "grid", "bounds": [[0.5, 2.0]], "resolution": [30],
                   "density": [{"lower": [0.5], "upper": [1.0], "value": 1.0},
                               {"lower": [1.0], "upper": [2.0], "value": 0.5}]},
            "nu": {"type": "discrete", "points": [[1.0], [2.0]], "weights": [0.5, 0.5]}
        }"#;
        let inst: Instance = serde_json::from_str(text).unwrap();
        let mu = inst.mu.quadrature().unwrap();
        assert_eq!(mu.len(), 30);
        assert!((mu.mass(|p| p.coords()[0] < 1.0) - 0.5).abs() < 1e-12);
        assert_eq!(inst.nu.discrete().unwrap().len(), 2);
        assert!(matches!(inst.cost.build().unwrap(), CostFunction::Polar));
        assert!(inst.mu.discrete().is_err());
    }

    #[test]
    fn table_cost_json() {
        let text = r#"{"table": {"rows": [[0], [1]], "cols": [[0]], "values": [[1.5], ["inf"]]}}"#;
        let spec: CostSpec = serde_json::from_str(text).unwrap();
        let c = spec.build().unwrap();
        assert_eq!(c.eval(&Point::scalar(1.0), &Point::scalar(0.0)).unwrap(), XReal::PosInf);
        let back = serde_json::to_string(&CostSpec::from_cost(&c)).unwrap();
        assert!(back.contains("\"inf\""));
    }

    #[test]
    fn potential_json_round_trip() {
        let p = Potential::new(
            vec![Point::scalar(1.0), Point::scalar(2.0)],
            vec![XReal::Finite(0.25), XReal::PosInf],
            CostFunction::Polar,
        )
        .unwrap();
        let text = serde_json::to_string(&PotentialFile::from_potential(&p)).unwrap();
        let q = serde_json::from_str::<PotentialFile>(&text).unwrap().build().unwrap();
        assert_eq!(q.shifts(), p.shifts());
        assert_eq!(q.supports(), p.supports());
    }

    #[test]
    fn polytope_json_round_trip() {
        let p = HallPolytope::from_masses(2, vec![0.0, 2.0 / 3.0, 1.0, 1.0]).unwrap();
        let text = serde_json::to_string(&PolytopeFile::from_polytope(&p)).unwrap();
        assert!(text.contains("\"1\":0.6666666666666666"));
        let q = serde_json::from_str::<PolytopeFile>(&text).unwrap().build().unwrap();
        assert_eq!(q.masses(), p.masses());
        let missing = PolytopeFile { m: 2, masses: BTreeMap::from([("0".into(), 0.0)]) };
        assert!(missing.build().is_err());
    }

    #[test]
    fn certificate_json_names_the_verdict() {
        let c = Certificate::NegativeCycle { cycle: vec![0, 1], identity_cost: -1.0, permuted_cost: -2.0 };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"verdict\":\"NegativeCycle\""));
    }
}
