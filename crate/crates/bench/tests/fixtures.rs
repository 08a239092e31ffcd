use infcost_bench::{polar_line, quadratic_square, random_bipartite};

#[test]
fn fixtures_are_solvable() {
    assert_eq!(polar_line(100).n(), 100);
    let sq = quadratic_square(20, 4, 7);
    assert_eq!((sq.n(), sq.m()), (400, 4));
    assert!(random_bipartite(12, 3).hall_feasible().unwrap().feasible);
}

#[test]
fn fixtures_are_seeded() {
    let a = quadratic_square(10, 3, 42);
    let b = quadratic_square(10, 3, 42);
    assert_eq!(a.supports(), b.supports());
}
