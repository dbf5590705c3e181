use nilcone::exact::{lift_vec, rat, unit_vec, Gauss, Rat, RationalMatrix, Subspace};
use nilcone::fixtures::{cy3_i1, cy3_iv1, cy3_type_i, cy3_type_iv, type_iv_operator, Scenario};
use nilcone::hodge::*;
use nilcone::reduce::*;
use nilcone::sample::random_symplectic;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shuffled(s: &Scenario, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_symplectic(s.lattice.q(), 6, &mut rng);
    s.conjugated(&g)
}

/// Columns of weight at most `k` span `W_k`.
fn check_adapted(b: &AdaptedBasis, w: &WeightFiltration, q: &RationalMatrix) {
    let p = b.change();
    assert_eq!(p.transpose().mul(q).mul(p), template_form(q.rows()));
    for k in -4..=4 {
        let cols: Vec<Vec<Rat>> = (0..b.rank()).filter(|&j| b.weights()[j] <= k).map(|j| b.vector(j)).collect();
        assert_eq!(Subspace::span(&cols, q.rows()).unwrap(), w.get(k), "step {k}");
    }
    let d = b.index_denominator().clone();
    let dr = Rat::from_integer(d);
    assert!(p.scale(&dr).is_integral());
    assert!(p.inverse().unwrap().scale(&dr).is_integral());
}

#[test]
fn adapted_bases_after_random_conjugation() {
    for seed in 0..6 {
        for (s, kind) in [
            (shuffled(&cy3_type_i(2, 1), seed), BasisKind::TypeI),
            (shuffled(&cy3_type_i(3, 2), seed), BasisKind::TypeI),
            (shuffled(&cy3_type_iv(2, 1), seed), BasisKind::TypeIV),
            (shuffled(&cy3_type_iv(3, 3), seed), BasisKind::TypeIV),
        ] {
            let w = cone_weight_filtration(&s.cone).unwrap();
            let b = adapted_symplectic_basis(&w, s.lattice.q(), kind).unwrap();
            check_adapted(&b, &w, s.lattice.q());
        }
    }
}

#[test]
fn levi_factors_multiply_back() {
    let s = cy3_type_iv(2, 2);
    let w = cone_weight_filtration(&s.cone).unwrap();
    let b = adapted_symplectic_basis(&w, s.lattice.q(), BasisKind::TypeIV).unwrap();
    // exp(N) is parabolic and purely unipotent
    let u = nilcone::exact::exp_nilpotent(&s.cone.interior()).unwrap();
    let pair = levi_decompose(&u, &b).unwrap();
    assert_eq!(pair.levi, RationalMatrix::identity(6));
    assert_eq!(pair.unipotent, u);
    // swap of the two (e_i, e^i) pairs composed with exp(N)
    let mut swap = RationalMatrix::zeros(6, 6);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 4), (4, 3), (5, 5)] {
        swap.set(i, j, rat(1));
    }
    assert!(s.lattice.preserves(&swap));
    let gamma = swap.mul(&u);
    let pair = levi_decompose(&gamma, &b).unwrap();
    assert_eq!(pair.levi, swap);
    assert_eq!(pair.levi.mul(&pair.unipotent), gamma);
    assert!(preserves_filtration(&w, &gamma));
    // the Weyl element exchanging ω₋ and ω₊ does not preserve W
    let mut flip = RationalMatrix::identity(6);
    for (i, j, v) in [(0, 0, 0), (5, 5, 0), (0, 5, 1), (5, 0, -1)] {
        flip.set(i, j, rat(v));
    }
    assert!(s.lattice.preserves(&flip));
    assert_eq!(levi_decompose(&flip, &b), Err(ReduceError::NotParabolic));
}

#[test]
fn type_i_restriction_is_hodge_tate() {
    for (h, a) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        for seed in 0..3 {
            let s = shuffled(&cy3_type_i(h, a), 40 + seed);
            let r = type_i_restrict(&s.lattice, &s.cone, &s.filtration, &[]).unwrap();
            let q = s.lattice.q();
            let gram = RationalMatrix::from_rows(
                r.basis.iter().map(|x| r.basis.iter().map(|y| q.pair(x, y)).collect()).collect(),
            )
            .unwrap();
            let mut expected = RationalMatrix::zeros(2 * a, 2 * a);
            for i in 0..a {
                expected.set(i, 2 * a - 1 - i, rat(1));
                expected.set(2 * a - 1 - i, i, rat(-1));
            }
            assert_eq!(gram, expected);
            assert_eq!(*r.lattice.as_ref().unwrap().q(), expected);
            assert_eq!(r.classification, Some(LmhsType::HodgeTate));
            assert!(r.orbit.holds(), "{:?}", r.orbit.first_failure());
            // reduced operator agrees with N on the reduced span
            let n = s.cone.interior();
            for (j, v) in r.basis.iter().enumerate() {
                let image = n.apply(v);
                let col = r.generators[0].col(j);
                let back = r
                    .basis
                    .iter()
                    .zip(&col)
                    .fold(vec![rat(0); v.len()], |acc, (b, c)| acc.iter().zip(b).map(|(x, y)| x + c * y).collect());
                assert_eq!(image, back);
            }
        }
    }
}

#[test]
fn type_i_degenerate_and_rejections() {
    let s = cy3_type_i(2, 0);
    let r = type_i_restrict(&s.lattice, &s.cone, &s.filtration, &[]).unwrap();
    assert!(r.lattice.is_none() && r.basis.is_empty());
    let iv = cy3_iv1();
    assert!(matches!(type_i_restrict(&iv.lattice, &iv.cone, &iv.filtration, &[]), Err(ReduceError::NotTypeI(_))));
    let i1 = cy3_i1();
    assert!(matches!(type_iv_quotient(&i1.lattice, &i1.cone, &i1.filtration, &[]), Err(ReduceError::NotTypeIV(_))));
}

#[test]
fn type_i_levi_witness_descends() {
    let s = cy3_type_i(2, 2);
    // swap e_1 ↔ e_2 and e^1 ↔ e^2, basis (e_1, e_2, f_0, f^0, e^2, e^1)
    let mut swap = RationalMatrix::zeros(6, 6);
    for (i, j) in [(0, 1), (1, 0), (2, 2), (3, 3), (4, 5), (5, 4)] {
        swap.set(i, j, rat(1));
    }
    assert!(s.lattice.preserves(&swap));
    let r = type_i_restrict(&s.lattice, &s.cone, &s.filtration, &[swap]).unwrap();
    let wq = r.lattice.as_ref().unwrap();
    assert_eq!(r.witnesses.len(), 1);
    assert!(wq.preserves(&r.witnesses[0]));
    assert_ne!(r.witnesses[0], RationalMatrix::identity(4));
}

#[test]
fn type_iv_quotient_types() {
    for (h, a) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 3)] {
        let s = shuffled(&cy3_type_iv(h, a), 7 * h as u64 + a as u64);
        assert_eq!(classify_lmhs(&s.lattice, &s.cone, &s.filtration).unwrap(), LmhsType::IV(a));
        let r = type_iv_quotient(&s.lattice, &s.cone, &s.filtration, &[]).unwrap();
        let lat = r.lattice.as_ref().unwrap();
        assert_eq!(lat.rank(), 2 * h);
        assert_eq!(lat.weight(), 1);
        let want = if a == h { LmhsType::HodgeTate } else { LmhsType::I(a) };
        assert_eq!(r.classification, Some(want), "h={h} a={a}");
    }
}

#[test]
fn bracket_certificate_on_engineered_pair() {
    let s = cy3_iv1();
    let w = cone_weight_filtration(&s.cone).unwrap();
    let b = adapted_symplectic_basis(&w, s.lattice.q(), BasisKind::TypeIV).unwrap();
    let n0 = s.cone.interior();
    for m in [1, 2, -3] {
        let d = type_iv_operator(4, &[rat(m)], &[vec![rat(0)]]);
        assert!(s.lattice.is_lie(&d));
        let top: Vec<Gauss> = lift_vec(&unit_vec::<Rat>(4, 3));
        let cert = bracket_certificate(&b, &n0.add(&d), &n0, &n0, &top);
        assert!(cert.quotient_vanishes && cert.fires, "{cert:?}");
        assert_eq!(cert.difference_after, ["0", "0", "0", "0"]);
        assert_eq!(cert.difference_before[1], (-m).to_string());
        // the generators N_0 ± D of the engineered cone do not commute
        assert!(!n0.sub(&d).commutator(&n0.add(&d)).is_zero());
    }
    let top: Vec<Gauss> = lift_vec(&unit_vec::<Rat>(4, 3));
    let scaled = bracket_certificate(&b, &n0.scale(&rat(2)), &n0, &n0, &top);
    assert!(!scaled.quotient_vanishes && !scaled.fires);
    let same = bracket_certificate(&b, &n0, &n0, &n0, &top);
    assert!(same.quotient_vanishes && !same.fires);
}
