use nilcone::exact::{rat, Gauss, Matrix, Rat, RationalMatrix, Subspace};
use nilcone::hodge::*;
use nilcone::sample::{random_sp_nilpotent, random_symplectic, siegel_lattice, siegel_nilpotent, standard_form};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn g(re: i64, im: i64) -> Gauss {
    Gauss::new(rat(re), rat(im))
}

fn ints(rows: &[&[i64]]) -> RationalMatrix {
    RationalMatrix::from_ints(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn span_g(vs: &[&[(i64, i64)]], n: usize) -> Subspace<Gauss> {
    let vs: Vec<Vec<Gauss>> = vs.iter().map(|v| v.iter().map(|&(a, b)| g(a, b)).collect()).collect();
    Subspace::span(&vs, n).unwrap()
}

fn unit_span(idx: &[usize], n: usize) -> Subspace<Rat> {
    let vs: Vec<Vec<Rat>> = idx.iter().map(|&i| (0..n).map(|j| rat(i64::from(i == j))).collect()).collect();
    Subspace::span(&vs, n).unwrap()
}

/// basis (e_1, f_0, f^0, e^1); Q(e^1, e_1) = Q(f^0, f_0) = 1; N e^1 = e_1.
fn cy3_i1() -> (SymplecticLattice, RationalMatrix, HodgeFiltration) {
    let q = ints(&[&[0, 0, 0, -1], &[0, 0, -1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]]);
    let lat = SymplecticLattice::new(q, 3, vec![1, 1, 1, 1]).unwrap();
    let mut n = RationalMatrix::zeros(4, 4);
    n.set(0, 3, rat(1));
    let o = (0, 0);
    let one = (1, 0);
    let f3: &[(i64, i64)] = &[o, one, (0, 1), o];
    let e_up: &[(i64, i64)] = &[o, o, o, one];
    let e_lo: &[(i64, i64)] = &[one, o, o, o];
    let f = HodgeFiltration::new(
        0,
        vec![Subspace::full(4), span_g(&[f3, e_up, e_lo], 4), span_g(&[f3, e_up], 4), span_g(&[f3], 4)],
    )
    .unwrap();
    (lat, n, f)
}

/// basis (ω₋, e_1, e^1, ω₊); N: ω₊ ↦ e^1 ↦ -e_1 ↦ ω₋.
fn cy3_iv1() -> (SymplecticLattice, RationalMatrix, HodgeFiltration) {
    let q = ints(&[&[0, 0, 0, -1], &[0, 0, -1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]]);
    let lat = SymplecticLattice::new(q, 3, vec![1, 1, 1, 1]).unwrap();
    let mut n = RationalMatrix::zeros(4, 4);
    n.set(2, 3, rat(1));
    n.set(1, 2, rat(-1));
    n.set(0, 1, rat(-1));
    let f = HodgeFiltration::new(
        0,
        vec![
            Subspace::full(4),
            unit_span(&[1, 2, 3], 4).to_gauss(),
            unit_span(&[2, 3], 4).to_gauss(),
            unit_span(&[3], 4).to_gauss(),
        ],
    )
    .unwrap();
    (lat, n, f)
}

fn elliptic(z: (i64, i64)) -> (SymplecticLattice, RationalMatrix, HodgeFiltration) {
    let lat = siegel_lattice(1);
    let n = siegel_nilpotent(&[vec![1]]);
    let f = HodgeFiltration::new(0, vec![Subspace::full(2), span_g(&[&[z, (1, 0)]], 2)]).unwrap();
    (lat, n, f)
}

/// Weight-graded Jordan form: blocks with chains v_0 ↦ v_1 ↦ … ↦ 0 and `weight(v_j) = m-1-2j`.
fn jordan(blocks: &[usize]) -> (RationalMatrix, Vec<i32>) {
    let n: usize = blocks.iter().sum();
    let mut m = RationalMatrix::zeros(n, n);
    let mut weights = Vec::new();
    let mut start = 0;
    for &b in blocks {
        for j in 0..b {
            weights.push(b as i32 - 1 - 2 * j as i32);
            if j + 1 < b {
                m.set(start + j + 1, start + j, rat(1));
            }
        }
        start += b;
    }
    (m, weights)
}

#[test]
fn jm_matches_conjugated_jordan_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let mut blocks = Vec::new();
        let mut left = rng.gen_range(1..=7);
        while left > 0 {
            let b = rng.gen_range(1..=left);
            blocks.push(b);
            left -= b;
        }
        let (j, weights) = jordan(&blocks);
        let n = j.rows();
        let p = loop {
            let p = RationalMatrix::from_ints(
                &(0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect::<Vec<_>>(),
            );
            if !p.det().eq(&rat(0)) {
                break p;
            }
        };
        let nmat = p.mul(&j).mul(&p.inverse().unwrap());
        let w = jm_weight_filtration(&nmat);
        for k in -8..=8 {
            let idx: Vec<usize> = (0..n).filter(|&i| weights[i] <= k).collect();
            assert_eq!(w.get(k), unit_span(&idx, n).image(&p), "blocks {blocks:?} k {k}");
        }
    }
}

fn satisfies_jm(n: &RationalMatrix, w: &dyn Fn(i32) -> Subspace<Rat>, mu: i32) -> bool {
    for k in -mu - 1..=mu + 1 {
        if !w(k - 2).contains_subspace(&w(k).image(n)) {
            return false;
        }
    }
    for k in 0..=mu {
        let nk = n.pow(k as usize);
        let grk = w(k).dim() - w(k - 1).dim();
        let grmk = w(-k).dim() - w(-k - 1).dim();
        if grk != grmk || w(-k - 1).preimage(&nk).intersect(&w(k)) != w(k - 1) {
            return false;
        }
    }
    true
}

#[test]
fn jm_properties_and_duality_on_random_sp() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..80 {
        let gdim = if round % 2 == 0 { 2 } else { 3 };
        let q = standard_form(gdim);
        let n = random_sp_nilpotent(gdim, &mut rng);
        assert!(q.mul(&n).add(&n.transpose().mul(&q)).is_zero());
        let w = jm_weight_filtration(&n);
        let mu = n.nilpotency_order().unwrap() as i32 - 1;
        assert!(satisfies_jm(&n, &|k| w.get(k), mu));
        assert_eq!(w.get(-mu), Subspace::full(2 * gdim).image(&n.pow(mu as usize)));
        for k in -mu - 1..=mu + 1 {
            assert_eq!(w.get(k).orthogonal(&q), w.get(-k - 1));
        }
        let s = random_symplectic(&q, 3, &mut rng);
        let conj = s.mul(&n).mul(&s.inverse().unwrap());
        assert_eq!(jm_weight_filtration(&conj), w.transform(&s));
    }
}

/// Every increasing chain drawn from sums of `ker N^a ∩ Im N^b` that satisfies the two
/// characterizing properties is the returned filtration.
#[test]
fn jm_unique_among_kernel_image_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..15 {
        let n = random_sp_nilpotent(2, &mut rng);
        let dim = n.rows();
        let order = n.nilpotency_order().unwrap();
        let mu = order as i32 - 1;
        let mut atoms = Vec::new();
        for a in 0..=order {
            for b in 0..=order {
                let s = Subspace::zero(dim).preimage(&n.pow(a)).intersect(&Subspace::full(dim).image(&n.pow(b)));
                if !atoms.contains(&s) {
                    atoms.push(s);
                }
            }
        }
        let mut cands = atoms.clone();
        for x in &atoms {
            for y in &atoms {
                let s = x.sum(y);
                if !cands.contains(&s) {
                    cands.push(s);
                }
            }
        }
        let slots = (2 * mu).max(0) as usize;
        let mut found = Vec::new();
        let mut chain: Vec<Subspace<Rat>> = Vec::new();
        fn dfs(
            cands: &[Subspace<Rat>],
            chain: &mut Vec<Subspace<Rat>>,
            slots: usize,
            n: &RationalMatrix,
            mu: i32,
            found: &mut Vec<Vec<Subspace<Rat>>>,
        ) {
            let dim = n.rows();
            if chain.len() == slots {
                let c = chain.clone();
                let w = |k: i32| {
                    if k < -mu {
                        Subspace::zero(dim)
                    } else if k >= mu {
                        Subspace::full(dim)
                    } else {
                        c[(k + mu) as usize].clone()
                    }
                };
                if satisfies_jm(n, &w, mu) {
                    found.push(c);
                }
                return;
            }
            for s in cands {
                if chain.last().is_none_or(|p| s.contains_subspace(p)) {
                    chain.push(s.clone());
                    dfs(cands, chain, slots, n, mu, found);
                    chain.pop();
                }
            }
        }
        dfs(&cands, &mut chain, slots, &n, mu, &mut found);
        let w = jm_weight_filtration(&n);
        assert_eq!(found.len(), 1);
        for (i, s) in found[0].iter().enumerate() {
            assert_eq!(*s, w.get(i as i32 - mu));
        }
    }
}

#[test]
fn jm_principal_nilpotent_spans() {
    let (_, n, _) = cy3_iv1();
    let w = jm_weight_filtration(&n);
    assert_eq!(w.get(-3), unit_span(&[0], 4));
    assert_eq!(w.get(-2), unit_span(&[0], 4));
    assert_eq!(w.get(-1), unit_span(&[0, 1], 4));
    assert_eq!(w.get(1), unit_span(&[0, 1, 2], 4));
    assert!(w.get(3).is_full());
    assert!(w.get(-4).is_zero());
}

#[test]
fn elliptic_ht_fixture() {
    for z in [(0, 1), (3, 5), (-2, 0)] {
        let (lat, n, f) = elliptic(z);
        // Independent evaluation: P_2 is spanned by v = e^1 + z e_1 and Q(v, N v̄) = Q(e^1, e_1) = 1.
        let v = vec![g(z.0, z.1), g(1, 0)];
        let nv = n.to_gauss().apply(&nilcone::exact::conj_vec(&v));
        assert_eq!(lat.q().to_gauss().pair(&v, &nv), g(1, 0));
        let cone = NilCone::ray(n.clone()).unwrap();
        assert!(is_nilpotent_orbit(&lat, &cone, &f, PolarizationSign::Standard).holds());
        assert_eq!(classify_lmhs(&lat, &cone, &f).unwrap(), LmhsType::HodgeTate);
        let flipped = NilCone::ray(n.neg()).unwrap();
        let cert = is_nilpotent_orbit(&lat, &flipped, &f, PolarizationSign::Standard);
        assert_eq!(cert.first_failure().unwrap().name, "polarization P_2");
        assert!(is_nilpotent_orbit(&lat, &flipped, &f, PolarizationSign::Negated).holds());
    }
}

#[test]
fn polarized_mhs_names_weight_mismatch() {
    let (lat, n, f) = elliptic((0, 1));
    let wrong = jm_weight_filtration(&n);
    let cert = is_polarized_mhs(&lat, &wrong, &f, &n, PolarizationSign::Standard);
    assert_eq!(cert.first_failure().unwrap().name, "weight filtration");
}

#[test]
fn cy3_type_i_fixture() {
    let (lat, n, f) = cy3_i1();
    // P_3 = F^3: v = f_0 + i f^0 with i^3 Q(v, v̄) = 2; P_4 = span{e^1} with Q(e^1, N e^1) = 1.
    let v = vec![g(0, 0), g(1, 0), g(0, 1), g(0, 0)];
    let qg = lat.q().to_gauss();
    assert_eq!(Gauss::i_pow(3) * qg.pair(&v, &nilcone::exact::conj_vec(&v)), g(2, 0));
    let e_up = vec![g(0, 0), g(0, 0), g(0, 0), g(1, 0)];
    assert_eq!(qg.pair(&e_up, &n.to_gauss().apply(&e_up)), g(1, 0));
    let cone = NilCone::ray(n.clone()).unwrap();
    let cert = is_nilpotent_orbit(&lat, &cone, &f, PolarizationSign::Standard);
    assert!(cert.holds(), "{cert:?}");
    assert_eq!(classify_lmhs(&lat, &cone, &f).unwrap(), LmhsType::I(1));
    assert!(n.pow(2).is_zero());
    let cert = is_nilpotent_orbit(&lat, &NilCone::ray(n.neg()).unwrap(), &f, PolarizationSign::Standard);
    assert_eq!(cert.first_failure().unwrap().name, "polarization P_4");
}

#[test]
fn cy3_type_iv_fixture() {
    let (lat, n, f) = cy3_iv1();
    let cone = NilCone::ray(n.clone()).unwrap();
    let cert = is_nilpotent_orbit(&lat, &cone, &f, PolarizationSign::Standard);
    assert!(cert.holds(), "{cert:?}");
    let w = jm_weight_filtration(&n).shift(3);
    let split = deligne_splitting(&w, &f).unwrap();
    let table: Vec<_> = split.table().into_iter().collect();
    assert_eq!(table, vec![((0, 0), 1), ((1, 1), 1), ((2, 2), 1), ((3, 3), 1)]);
    assert_eq!(classify_lmhs(&lat, &cone, &f).unwrap(), LmhsType::IV(1));
    assert!(!n.pow(3).is_zero() && n.pow(4).is_zero());
    let cert = is_nilpotent_orbit(&lat, &NilCone::ray(n.neg()).unwrap(), &f, PolarizationSign::Standard);
    assert!(!cert.holds());
}

#[test]
fn transversality_breaking_perturbation() {
    let (lat, n, _) = cy3_i1();
    // F^3 = ⟨e^1⟩, F^2 = F^3 + ⟨f_0 + i f^0⟩, F^1 = F^2 + ⟨f_0 - i f^0⟩: isotropic, but N F^2 ⊄ F^1.
    let o = (0, 0);
    let bad = HodgeFiltration::new(
        0,
        vec![
            Subspace::full(4),
            span_g(&[&[o, o, o, (1, 0)], &[o, (1, 0), (0, 1), o], &[o, (1, 0), (0, -1), o]], 4),
            span_g(&[&[o, o, o, (1, 0)], &[o, (1, 0), (0, 1), o]], 4),
            span_g(&[&[o, o, o, (1, 0)]], 4),
        ],
    )
    .unwrap();
    lat.check_flag(&bad).unwrap();
    let cert = is_nilpotent_orbit(&lat, &NilCone::ray(n).unwrap(), &bad, PolarizationSign::Standard);
    assert_eq!(cert.first_failure().unwrap().name, "transversality N_1");
}

#[test]
fn pure_splitting_is_hodge_decomposition() {
    let (lat, n, lim) = cy3_i1();
    let f = lim.transform(&exp_imaginary(&n, &rat(1)));
    lat.check_flag(&f).unwrap();
    let w = jm_weight_filtration(&RationalMatrix::zeros(4, 4)).shift(3);
    let split = deligne_splitting(&w, &f).unwrap();
    for p in 0..=3 {
        assert_eq!(split.get(p, 3 - p), f.get(p).intersect(&f.get(3 - p).conj()));
    }
    assert_eq!(classify_table(&split.table(), &lat), Ok(LmhsType::Pure));
}

#[test]
fn incompatible_pair_is_not_mhs() {
    let (_, n, _) = cy3_iv1();
    let w = jm_weight_filtration(&n).shift(3);
    // F^3 = ⟨ω₊ + e^1⟩, F^2 = ⟨ω₊, e^1⟩, F^1 = ⟨ω₊, e^1, ω₋⟩: the last step misses W_2.
    let f = HodgeFiltration::new(
        0,
        vec![
            Subspace::full(4),
            unit_span(&[0, 2, 3], 4).to_gauss(),
            unit_span(&[2, 3], 4).to_gauss(),
            span_g(&[&[(0, 0), (0, 0), (1, 0), (1, 0)]], 4),
        ],
    )
    .unwrap();
    assert!(matches!(deligne_splitting(&w, &f), Err(HodgeError::NotMhs(_))));
}

#[test]
fn splitting_reconstructs_filtrations() {
    for (lat, n, f) in [cy3_i1(), cy3_iv1(), elliptic((1, 2))] {
        let w = jm_weight_filtration(&n).shift(lat.weight());
        let split = deligne_splitting(&w, &f).unwrap();
        let dim = lat.rank();
        for k in -2..=8 {
            let mut acc = Subspace::zero(dim);
            for (&(p, q), s) in split.components() {
                if p + q <= k {
                    acc = acc.sum(s);
                }
            }
            assert_eq!(acc, w.get(k).to_gauss());
        }
        for p in -1..=4 {
            let mut acc = Subspace::zero(dim);
            for (&(r, _), s) in split.components() {
                if r >= p {
                    acc = acc.sum(s);
                }
            }
            assert_eq!(acc, f.get(p));
        }
        for (&(p, q), &h) in &split.table() {
            assert_eq!(split.h(q, p), h);
        }
    }
}

#[test]
fn cone_filtration_differs_from_faces() {
    let lat = siegel_lattice(2);
    let n1 = siegel_nilpotent(&[vec![1, 0], vec![0, 0]]);
    let n2 = siegel_nilpotent(&[vec![0, 0], vec![0, 1]]);
    let cone = NilCone::new(vec![n1.clone(), n2.clone()]).unwrap();
    lat.check_cone(&cone).unwrap();
    let w = cone_weight_filtration(&cone).unwrap();
    assert_eq!(w, jm_weight_filtration(&n1.add(&n2)));
    assert_ne!(w, jm_weight_filtration(&n1));
    assert_ne!(w, jm_weight_filtration(&n2));
    assert_eq!(cone_weight_filtration(&NilCone::ray(n1.clone()).unwrap()).unwrap(), jm_weight_filtration(&n1));
}

#[test]
fn interior_disagreement_is_reported() {
    // Commuting nilpotents with cancellation: N1 + N2 has a different Jordan type from 2N1 + N2.
    let n1 = ints(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
    let n2 = ints(&[&[0, -1, 1], &[0, 0, 0], &[0, 0, 0]]);
    assert!(n1.commutator(&n2).is_zero());
    let cone = NilCone::new(vec![n1, n2]).unwrap();
    let w = cone_weight_filtration(&cone);
    assert_eq!(w, Err(HodgeError::InteriorDisagreement));
}

#[test]
fn cone_rejects_noncommuting_and_dependent() {
    let a = ints(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
    let b = ints(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
    assert_eq!(NilCone::new(vec![a.clone(), b]), Err(HodgeError::NotCommuting(0, 1)));
    assert_eq!(NilCone::new(vec![a.clone(), a.scale(&rat(2))]), Err(HodgeError::Degenerate));
    let m = Matrix::from_rows(vec![vec![rat(1)]]).unwrap();
    assert_eq!(NilCone::ray(m), Err(HodgeError::NotNilpotent { index: 0 }));
}
