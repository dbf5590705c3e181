mod common;

use common::oracles::{chamber_count, covers, random_overlapping_pair, refines};
use nilcone::cones::*;
use nilcone::exact::{exp_nilpotent, rat, Rat, RationalMatrix};
use nilcone::sample::{siegel_lattice, siegel_nilpotent};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cone(d: usize, gens: &[&[i64]]) -> Cone {
    Cone::from_ints(d, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn closed(cones: &[Cone]) -> ConeComplex {
    ConeComplex::new(cones[0].ambient(), cones.iter().flat_map(Cone::faces))
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn quadrant_and_wedge_chambers() {
    let quad = cone(2, &[&[1, 0], &[0, 1]]);
    let wedge = cone(2, &[&[2, 1], &[1, 2]]);
    let input = closed(&[quad.clone(), wedge.clone()]);
    assert!(matches!(input.is_fan(), Err(FanViolation::Overlap { .. })));
    let out = chamber_subdivision(&input).unwrap();
    let expected = closed(&[cone(2, &[&[1, 0], &[2, 1]]), wedge.clone(), cone(2, &[&[1, 2], &[0, 1]])]);
    assert_eq!(out, expected);
    assert_eq!(out.cones().iter().filter(|c| c.dim() == 1).count(), 4);
    assert_eq!(out.len(), 8);
    assert_eq!(chamber_count(&input), out.len());
    assert!(out.is_fan().is_ok());
    assert_eq!(chamber_subdivision(&out).unwrap(), out);
}

#[test]
fn disjoint_cones_untouched() {
    let input = closed(&[cone(2, &[&[1, 0], &[1, 1]]), cone(2, &[&[0, 1], &[-1, 1]])]);
    assert_eq!(chamber_subdivision(&input).unwrap(), input);
}

#[test]
fn single_cone_is_its_own_chamber() {
    let input = closed(&[cone(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]])]);
    assert_eq!(chamber_subdivision(&input).unwrap(), input);
}

#[test]
fn chamber_requires_face_closure() {
    let input = ConeComplex::new(2, [cone(2, &[&[1, 0], &[0, 1]])]);
    assert_eq!(chamber_subdivision(&input), Err(ConeError::NotFaceClosed));
    assert!(matches!(input.is_fan(), Err(FanViolation::MissingFace { .. })));
    assert!(ConeComplex::new(2, [Cone::zero(2)]).is_fan().is_ok());
}

#[test]
fn random_overlapping_pairs_refine_to_fans() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..24 {
        let d = 2 + round % 3;
        let (a, b) = random_overlapping_pair(d, &mut rng);
        let input = closed(&[a, b]);
        let out = chamber_subdivision(&input).unwrap();
        assert!(out.is_fan().is_ok(), "round {round}");
        refines(&input, &out).unwrap();
        covers(&input, &out, &mut rng).unwrap();
        assert_eq!(out.len(), chamber_count(&input), "round {round}");
        assert_eq!(chamber_subdivision(&out).unwrap(), out);
    }
}

#[test]
fn hrep_vrep_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..20 {
        let (a, _) = random_overlapping_pair(2 + round % 3, &mut rng);
        for f in a.faces() {
            let eqs: Vec<Vec<Rat>> = f.hrep().equalities.iter().map(|v| nilcone::exact::int_to_rat(v)).collect();
            let strict: Vec<Vec<Rat>> = f.hrep().strict.iter().map(|v| nilcone::exact::int_to_rat(v)).collect();
            assert_eq!(open_region(f.ambient(), &eqs, &strict).unwrap(), Some(f.clone()));
            assert!(f.contains(&f.interior_point()));
            for r in f.rays_rat() {
                assert!(f.closure_contains(&r));
                assert!(f.hrep().strict.iter().all(|s| {
                    let v = nilcone::exact::dot(&nilcone::exact::int_to_rat(s), &r);
                    v >= rat(0)
                }));
            }
        }
    }
}

#[test]
fn wedge_hrep_by_hand() {
    // Facet normals orthogonal to one generator and positive on the other: (2,-1)·(1,2) = 0, (2,-1)·(2,1) = 3.
    let wedge = cone(2, &[&[2, 1], &[1, 2]]);
    assert_eq!(wedge.hrep().strict, vec![ints(&[-1, 2]), ints(&[2, -1])]);
    assert!(wedge.hrep().equalities.is_empty());
}

#[test]
fn star_subdivisions() {
    let quad = cone(2, &[&[1, 0], &[0, 1]]);
    let sub = star_subdivision(&quad, &[rat(1), rat(1)]).unwrap();
    let expected = closed(&[cone(2, &[&[1, 0], &[1, 1]]), cone(2, &[&[1, 1], &[0, 1]])]);
    assert_eq!(sub, expected);
    let simplex = cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    let sub = star_subdivision(&simplex, &[rat(1), rat(1), rat(1)]).unwrap();
    assert_eq!(sub.cones().iter().filter(|c| c.dim() == 3).count(), 3);
    assert!(sub.is_fan().is_ok());
    refines(&ConeComplex::new(3, simplex.faces()), &sub).unwrap();
    // a ray on a facet only splits that facet and the cone
    let sub = star_subdivision(&simplex, &[rat(1), rat(1), rat(0)]).unwrap();
    assert_eq!(sub.cones().iter().filter(|c| c.dim() == 3).count(), 2);
    refines(&ConeComplex::new(3, simplex.faces()), &sub).unwrap();
}

#[test]
fn transport_is_an_action() {
    let lat = siegel_lattice(2);
    let n1 = siegel_nilpotent(&[vec![1, 0], vec![0, 0]]);
    let n2 = siegel_nilpotent(&[vec![0, 0], vec![0, 1]]);
    let n3 = siegel_nilpotent(&[vec![0, 1], vec![1, 0]]);
    let frame = MatrixFrame::spanning(&[n1.clone(), n2.clone(), n3.clone()]).unwrap();
    let sigma = frame.cone(&[n1.clone(), n2.clone()]).unwrap();
    let q = lat.q();
    // Levi element e_i ↦ Σ A e, e^i ↦ A^{-T} e^ with A = [[1,1],[0,1]] in basis (e_1, e_2, e^2, e^1).
    let g1 = RationalMatrix::from_ints(&[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, -1], vec![0, 0, 0, 1]]);
    let g2 = RationalMatrix::from_ints(&[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]]);
    for g in [&g1, &g2] {
        assert_eq!(g.transpose().mul(q).mul(g), *q);
    }
    let once = transport(&g1.mul(&g2), q, &frame, &sigma).unwrap();
    let twice = transport(&g1, q, &frame, &transport(&g2, q, &frame, &sigma).unwrap()).unwrap();
    assert_eq!(once, twice);
    assert_eq!(transport(&RationalMatrix::identity(4), q, &frame, &sigma).unwrap(), sigma);
    let centralizing = exp_nilpotent(&n1.add(&n2)).unwrap();
    assert_eq!(transport(&centralizing, q, &frame, &sigma).unwrap(), sigma);
    let mut half = RationalMatrix::identity(4);
    half.set(0, 0, rat(2));
    half.set(3, 3, Rat::new(1.into(), 2.into()));
    assert_eq!(transport(&half, q, &frame, &sigma), Err(ConeError::NonIntegral));
    let mut skew = RationalMatrix::identity(4);
    skew.set(0, 1, rat(1));
    assert_eq!(transport(&skew, q, &frame, &sigma), Err(ConeError::FormNotPreserved));
    // fan verdicts survive transport of a whole complex
    let tau = frame.cone(&[n1.clone(), n3.clone()]).unwrap();
    let complex = closed(&[sigma.clone(), tau.clone()]);
    let moved = ConeComplex::new(3, complex.cones().iter().map(|c| transport(&g1, q, &frame, c).unwrap()));
    assert_eq!(complex.is_fan().is_ok(), moved.is_fan().is_ok());
}

#[test]
fn complex_document_roundtrip() {
    let a = siegel_nilpotent(&[vec![1, 0], vec![0, 0]]);
    let b = siegel_nilpotent(&[vec![0, 0], vec![0, 1]]);
    let frame = MatrixFrame::spanning(&[a.clone(), b.clone()]).unwrap();
    let complex = closed(&[frame.cone(&[a, b]).unwrap()]);
    let doc = ComplexDocument::from_complex(&frame, &complex);
    let json = serde_json::to_string(&doc).unwrap();
    let back: ComplexDocument = serde_json::from_str(&json).unwrap();
    let (frame2, complex2) = back.to_complex().unwrap();
    assert_eq!(frame2, frame);
    assert_eq!(complex2, complex);
}
