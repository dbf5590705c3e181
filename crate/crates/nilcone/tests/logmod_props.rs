use nilcone::cones::{star_subdivide_complex, star_subdivision, Cone, ConeComplex, MatrixFrame};
use nilcone::exact::{exp_nilpotent, int_to_rat, rat, Matrix, Rat, RationalMatrix};
use nilcone::fixtures::blowup_example;
use nilcone::hodge::PolarizationSign;
use nilcone::logmod::*;
use nilcone::sample::{siegel_filtration, siegel_nilpotent};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| x.into()).collect()
}

fn diag(x: i64, y: i64) -> RationalMatrix {
    siegel_nilpotent(&[vec![x, 0], vec![0, y]])
}

fn quadrant_chart(frame: &MatrixFrame, limit: bool) -> LocalChart {
    let (nx, ny) = (diag(1, 0), diag(0, 1));
    let rays = vec![frame.coordinates(&nx).unwrap(), frame.coordinates(&ny).unwrap()];
    let f = limit.then(|| siegel_filtration(&[vec![1, 0], vec![0, 1]]));
    LocalChart::new("o", vec!["x".into(), "y".into()], rays, vec![nx, ny], f).unwrap()
}

#[test]
fn single_blowup_of_the_example() {
    let ex = blowup_example();
    let gens = ex.scenario.cone.generators().to_vec();
    let frame = MatrixFrame::spanning(&gens).unwrap();
    let source = frame.cone(&gens).unwrap();
    let target = ConeComplex::new(frame.dim(), ex.refined.iter().flat_map(|pair| frame.cone(pair).unwrap().faces()));
    let plan = subdivision_to_blowups(&source, &target).unwrap();
    assert_eq!(plan.steps.len(), 1);
    let step = &plan.steps[0];
    assert_eq!(frame.matrix(&int_to_rat(&step.center)), gens[0].add(&gens[1]));
    assert_eq!(step.charts.len(), 1);
    assert_eq!(step.charts[0].weights, vec![rat(1), rat(1)]);

    let chart = LocalChart::new(
        "o",
        vec!["x".into(), "y".into()],
        source.rays_rat(),
        frame.generators(&source),
        Some(ex.scenario.filtration.clone()),
    )
    .unwrap();
    let charts = apply_plan(&chart, &plan).unwrap();
    assert_eq!(charts.len(), 2);
    let nx = chart.log_of("x").unwrap().clone();
    let ny = chart.log_of("y").unwrap().clone();
    let ne = nx.add(&ny);
    let o_y = charts.iter().find(|c| c.labels()[1] == "y").unwrap();
    assert_eq!(o_y.logs(), &[ne.clone(), ny.clone()]);
    let o_x = charts.iter().find(|c| c.labels()[0] == "x").unwrap();
    assert_eq!(o_x.logs(), &[nx.clone(), ne.clone()]);

    // the exceptional divisor gets the same label from both charts
    let on_y = boundary_orbit(o_y, &["E1"]).unwrap();
    let on_x = boundary_orbit(o_x, &["E1"]).unwrap();
    assert_eq!(on_y.cone.generators(), std::slice::from_ref(&ne));
    assert_eq!(on_y.limit, ex.scenario.filtration);
    assert_eq!((&on_x.cone, &on_x.limit), (&on_y.cone, &on_y.limit));
    assert!(on_y.validate(&ex.scenario.lattice, PolarizationSign::Standard).holds());

    let corner = boundary_orbit(o_y, &["E1", "y"]).unwrap();
    assert_eq!(corner.cone.generators(), &[ne, ny.clone()]);
    let deepest = boundary_orbit(&chart, &["x", "y"]).unwrap();
    assert_eq!(deepest.cone.generators(), &[nx, ny]);
    assert!(deepest.validate(&ex.scenario.lattice, PolarizationSign::Standard).holds());

    let script = plan.script();
    assert!(script.contains("step 1: blow up at (1,1)"), "{script}");
    assert!(script.contains("z1 = y1, z2 = y1·y2"), "{script}");
}

#[test]
fn weighted_center_and_monomial_pullback() {
    let frame = MatrixFrame::spanning(&[diag(1, 0), diag(0, 1)]).unwrap();
    let source = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    let target = star_subdivision(&source, &[rat(2), rat(1)]).unwrap();
    let plan = subdivision_to_blowups(&source, &target).unwrap();
    assert_eq!(plan.steps.len(), 1);
    let affected = &plan.steps[0].charts[0];
    let at = |v: &[i64]| affected.rays.iter().position(|r| *r == ints(v)).unwrap();
    let (ix, iy) = (at(&[1, 0]), at(&[0, 1]));
    assert_eq!((&affected.weights[ix], &affected.weights[iy]), (&rat(2), &rat(1)));
    // replacing the x ray gives the quotient chart of index 2
    let index_of = |i: usize| affected.results.iter().find(|m| m.exceptional == i).unwrap().index.clone();
    assert_eq!((index_of(ix), index_of(iy)), ("2".to_string(), "1".to_string()));

    // pullback of z^m to each chart: the exponent of y_r is ⟨m, r⟩ with r in old ray coordinates
    let old = Matrix::from_rows(affected.rays.iter().map(|r| int_to_rat(r)).collect()).unwrap();
    let old_inv = old.transpose().inverse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for map in &affected.results {
        for _ in 0..20 {
            let m: Vec<i64> = (0..2).map(|_| rng.gen_range(0..6)).collect();
            for (r, ray) in map.rays.iter().enumerate() {
                let coords = old_inv.apply(&int_to_rat(ray));
                let expected: Rat = coords.iter().zip(&m).map(|(c, &e)| c * rat(e)).sum();
                let got: Rat = (0..2).map(|j| &map.exponents[j][r] * rat(m[j])).sum();
                assert_eq!(got, expected);
            }
            // and numerically at a rational point
            let y: Vec<Rat> =
                (0..2).map(|_| Rat::new(rng.gen_range(1..9).into(), rng.gen_range(1..5).into())).collect();
            let pow = |b: &Rat, e: &Rat| -> Rat {
                assert!(e.is_integer());
                num_traits::pow(b.clone(), e.to_integer().try_into().unwrap())
            };
            let z: Vec<Rat> =
                map.exponents.iter().map(|row| row.iter().zip(&y).map(|(e, b)| pow(b, e)).product()).collect();
            let lhs: Rat = z.iter().zip(&m).map(|(b, &e)| pow(b, &rat(e))).product();
            let rhs: Rat = (0..2)
                .map(|r| {
                    let e: Rat = (0..2).map(|j| &map.exponents[j][r] * rat(m[j])).sum();
                    pow(&y[r], &e)
                })
                .product();
            assert_eq!(lhs, rhs);
        }
    }

    let chart = quadrant_chart(&frame, true);
    let charts = apply_plan(&chart, &plan).unwrap();
    let exceptional = diag(2, 1);
    assert!(charts.iter().all(|c| c.log_of("E1") == Some(&exceptional)));
    for c in &charts {
        for (i, n) in c.logs().iter().enumerate() {
            assert!(exp_nilpotent(n).unwrap().is_integral());
            for m in &c.logs()[..i] {
                assert!(n.commutator(m).is_zero());
            }
        }
    }
}

#[test]
fn trivial_and_untouched_charts() {
    let frame = MatrixFrame::spanning(&[diag(1, 0), diag(0, 1)]).unwrap();
    let source = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    let plan = subdivision_to_blowups(&source, &ConeComplex::new(2, source.faces())).unwrap();
    assert!(plan.steps.is_empty());
    let chart = quadrant_chart(&frame, true);
    assert_eq!(apply_plan(&chart, &plan).unwrap(), vec![chart.clone()]);

    // a chart on the single ray (1,0) does not meet the center (1,1)
    let edge =
        LocalChart::new("d", vec!["x".into(), "w".into()], vec![vec![rat(1), rat(0)]], vec![diag(1, 0)], None).unwrap();
    let target = star_subdivision(&source, &[rat(1), rat(1)]).unwrap();
    let plan = subdivision_to_blowups(&source, &target).unwrap();
    assert_eq!(apply_plan(&edge, &plan).unwrap(), vec![edge.clone()]);
    assert!(matches!(blowup_chart(&edge, &plan.steps[0]), Err(LogmodError::CenterOutside(..))));
    assert!(matches!(boundary_orbit(&edge, &["x"]), Err(LogmodError::MissingLimit(_))));
    assert!(matches!(boundary_orbit(&chart, &["q"]), Err(LogmodError::UnknownLabel { .. })));
}

#[test]
fn refusals() {
    let source = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    let wide = Cone::from_ints(2, &[vec![1, 0], vec![-1, 1]]).unwrap();
    let err = subdivision_to_blowups(&source, &ConeComplex::new(2, wide.faces())).unwrap_err();
    assert!(matches!(err, LogmodError::NotARefinement(_)), "{err}");
    let half = Cone::from_ints(2, &[vec![1, 0], vec![1, 1]]).unwrap();
    let err = subdivision_to_blowups(&source, &ConeComplex::new(2, half.faces())).unwrap_err();
    assert_eq!(err, LogmodError::NotARefinement("target does not cover the source cone".into()));

    // middle triangle on the edge midpoints: every star order leaves an edge to a corner
    let s3 = Cone::from_ints(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let [e1, e2, e3, a, b, c] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 0, 1]].map(|v| v.to_vec());
    let tri =
        |x: &Vec<i64>, y: &Vec<i64>, z: &Vec<i64>| Cone::from_ints(3, &[x.clone(), y.clone(), z.clone()]).unwrap();
    let target = ConeComplex::new(
        3,
        [tri(&a, &b, &c), tri(&e1, &a, &c), tri(&a, &e2, &b), tri(&c, &b, &e3)].iter().flat_map(Cone::faces),
    );
    assert!(target.is_fan().is_ok());
    let err = subdivision_to_blowups(&s3, &target).unwrap_err();
    assert!(matches!(err, LogmodError::NotReachableByStars(_)), "{err}");
    let square = Cone::from_ints(3, &[vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]]).unwrap();
    assert_eq!(
        subdivision_to_blowups(&square, &ConeComplex::new(3, square.faces())).unwrap_err(),
        LogmodError::NotSimplicial
    );
}

/// Random star sequences in dimensions 2 and 3; the planner must reproduce the target exactly.
#[test]
fn plans_reproduce_random_star_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for d in [2usize, 3] {
        let source =
            Cone::from_ints(d, &(0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect::<Vec<_>>())
                .unwrap();
        for _ in 0..8 {
            let mut target = ConeComplex::new(d, source.faces());
            for _ in 0..rng.gen_range(1..=3) {
                let v: Vec<Rat> = (0..d).map(|_| rat(rng.gen_range(0..4))).collect();
                if v.iter().all(Zero::is_zero) || target.cones().iter().filter(|c| c.dim() == 1).any(|c| c.contains(&v))
                {
                    continue;
                }
                target = star_subdivide_complex(&target, &v).unwrap();
            }
            let plan = subdivision_to_blowups(&source, &target).unwrap();
            let mut replay = ConeComplex::new(d, source.faces());
            for step in &plan.steps {
                replay = star_subdivide_complex(&replay, &int_to_rat(&step.center)).unwrap();
            }
            assert_eq!(replay, target);
            // determinism, including the serialized form
            let again = subdivision_to_blowups(&source, &target).unwrap();
            assert_eq!(serde_json::to_string(&plan).unwrap(), serde_json::to_string(&again).unwrap());
        }
    }
}

#[test]
fn lexicographic_centers() {
    let source = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    let mut target = ConeComplex::new(2, source.faces());
    for v in [[1, 2], [1, 1], [2, 1]] {
        target = star_subdivide_complex(&target, &[rat(v[0]), rat(v[1])]).unwrap();
    }
    let plan = subdivision_to_blowups(&source, &target).unwrap();
    let centers: Vec<Vec<BigInt>> = plan.steps.iter().map(|s| s.center.clone()).collect();
    assert_eq!(centers, [ints(&[1, 1]), ints(&[1, 2]), ints(&[2, 1])]);
    assert!(plan.steps[1].charts[0].weights.iter().all(|w| w.is_one()));
}
