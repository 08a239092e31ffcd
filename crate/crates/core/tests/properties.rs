//! Cross-module invariants on random instances.

use infcost_core::discrete_ot::BipartiteInstance;
use infcost_core::duality::{check_cyclic_monotone, check_path_bounded};
use infcost_core::polarcalc::subgrad_to_polar;
use infcost_core::{
    Classification, DiscreteMeasure, GeomConvexFn, GridSpec, HallPolytope, PairSet, Point, QuadratureMeasure, XReal,
};
use proptest::prelude::*;

fn probability(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Random table instance; every row and column keeps at least one finite entry.
fn instance() -> impl Strategy<Value = BipartiteInstance> {
    (2usize..7, 2usize..7).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(0.1f64..1.0, n),
            prop::collection::vec(0.1f64..1.0, m),
            prop::collection::vec(prop::option::weighted(0.6, -1.0f64..1.0), n * m),
        )
            .prop_map(move |(wm, wn, cells)| {
                let mut matrix: Vec<Vec<XReal>> = (0..n)
                    .map(|i| (0..m).map(|j| cells[i * m + j].map_or(XReal::PosInf, XReal::Finite)).collect())
                    .collect();
                for (i, row) in matrix.iter_mut().enumerate() {
                    if row.iter().all(|v| !v.is_finite()) {
                        row[i % m] = XReal::Finite(0.0);
                    }
                }
                for j in 0..m {
                    if matrix.iter().all(|r| !r[j].is_finite()) {
                        matrix[j % n][j] = XReal::Finite(0.0);
                    }
                }
                let pts = |k: usize| (0..k).map(|i| Point::scalar(i as f64)).collect::<Vec<_>>();
                BipartiteInstance::from_matrix(
                    DiscreteMeasure::new(pts(n), probability(wm)).unwrap(),
                    DiscreteMeasure::new(pts(m), probability(wn)).unwrap(),
                    matrix,
                )
                .unwrap()
            })
    })
}

fn classify(inst: &BipartiteInstance) -> Classification {
    let mu = QuadratureMeasure::from_discrete(inst.mu());
    let p = HallPolytope::build(&mu, inst.nu().atoms(), inst.cost()).unwrap();
    p.classify(inst.nu().weights(), 1e-9).unwrap()
}

fn is_exterior(c: &Classification) -> bool {
    matches!(c, Classification::Exterior { .. })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_feasibility_matches_polytope_membership(inst in instance()) {
        let feasible = inst.hall_feasible().unwrap().feasible;
        prop_assert_eq!(!feasible, is_exterior(&classify(&inst)));
    }

    #[test]
    fn compatibility_is_symmetric(inst in instance()) {
        let swapped = inst.transpose().unwrap();
        prop_assert_eq!(is_exterior(&classify(&inst)), is_exterior(&classify(&swapped)));
    }

    #[test]
    fn optimal_support_is_certified(inst in instance()) {
        prop_assume!(inst.hall_feasible().unwrap().feasible);
        let (plan, _) = inst.optimal_plan().unwrap();
        let g = PairSet::new(
            plan.entries.iter().map(|e| inst.mu().atoms()[e.0].clone()).collect(),
            plan.entries.iter().map(|e| inst.nu().atoms()[e.1].clone()).collect(),
            inst.cost().clone(),
        ).unwrap();
        let cm = check_cyclic_monotone(&g);
        prop_assert!(cm.is_positive(), "{:?}", cm);
        if check_path_bounded(&g).is_positive() {
            prop_assert!(cm.is_positive());
        }
    }

    /// `y = z / (⟨x,z⟩ - φ(x))` gives a minorant `φ(x)(⟨w,y⟩-1)/(⟨x,y⟩-1) ≤ φ(w)`.
    #[test]
    fn polar_subgradient_is_tangent(
        a in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -2.0f64..-0.2), 2..5),
        x in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let pieces: Vec<(Vec<f64>, f64)> = a.iter().map(|&(p, q, b)| (vec![p, q], b)).collect();
        let value = |w: [f64; 2]| pieces.iter().map(|(v, b)| v[0] * w[0] + v[1] * w[1] + b).fold(0.0f64, f64::max);
        let mut vals: Vec<f64> = pieces.iter().map(|(v, b)| v[0] * x.0 + v[1] * x.1 + b).collect();
        vals.sort_by(f64::total_cmp);
        let top = vals[vals.len() - 1];
        prop_assume!(top > 1e-3 && top - vals[vals.len() - 2].max(0.0) > 1e-3);
        let best = pieces.iter().max_by(|p, q| {
            (p.0[0] * x.0 + p.0[1] * x.1 + p.1).total_cmp(&(q.0[0] * x.0 + q.0[1] * x.1 + q.1))
        }).unwrap();

        let phi = GeomConvexFn::piecewise_affine(pieces.clone()).unwrap();
        let xp = Point::new(vec![x.0, x.1]);
        let y = subgrad_to_polar(&phi, &xp, &Point::new(best.0.clone()), None).unwrap();
        let (y0, y1) = (y.coords()[0], y.coords()[1]);
        let gap = x.0 * y0 + x.1 * y1 - 1.0;
        prop_assert!(gap > 0.0);
        let fx = value([x.0, x.1]);
        for w in GridSpec::cube(2, 3.0, 31, 0).points() {
            let minorant = fx * (w[0] * y0 + w[1] * y1 - 1.0) / gap;
            let fw = value([w[0], w[1]]);
            prop_assert!(minorant <= fw + 1e-9 * fw.abs().max(1.0), "at {:?}: {} > {}", w, minorant, fw);
        }
    }
}
