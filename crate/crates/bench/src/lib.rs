//! Fixtures shared by the benchmarks.

use infcost_core::{BipartiteInstance, SemiDiscrete};
use infcost_core::{CostFunction, DiscreteMeasure, Point, QuadratureMeasure, XReal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polar cost, μ uniform on `[1/2, 2]` with `n` nodes, atoms `{1, 2}`.
pub fn polar_line(n: usize) -> SemiDiscrete {
    let mu = QuadratureMeasure::grid(&[(0.5, 2.0)], &[n], |_| 1.0).expect("grid");
    SemiDiscrete::new(mu, vec![Point::scalar(1.0), Point::scalar(2.0)], CostFunction::Polar).expect("instance")
}

/// Quadratic cost on a `side × side` grid of the unit square with `m` random atoms.
pub fn quadratic_square(side: usize, m: usize, seed: u64) -> SemiDiscrete {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = QuadratureMeasure::grid(&[(0.0, 1.0), (0.0, 1.0)], &[side, side], |_| 1.0).expect("grid");
    let us = (0..m).map(|_| Point::new([rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])).collect();
    SemiDiscrete::new(mu, us, CostFunction::Quadratic).expect("instance")
}

/// Random `n × n` table instance with 30% forbidden pairs and uniform marginals.
/// The diagonal is always allowed, so the instance is feasible.
pub fn random_bipartite(n: usize, seed: u64) -> BipartiteInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i != j && rng.random_bool(0.3) {
                        XReal::PosInf
                    } else {
                        XReal::Finite(rng.random_range(0.0..1.0))
                    }
                })
                .collect()
        })
        .collect();
    let atoms = |k: usize| DiscreteMeasure::uniform((0..k).map(|i| Point::scalar(i as f64)).collect()).expect("atoms");
    BipartiteInstance::from_matrix(atoms(n), atoms(n), matrix).expect("instance")
}
