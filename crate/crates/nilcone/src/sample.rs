//! Seeded random generators for property tests.

use rand::Rng;

use crate::exact::{rat, Gauss, RationalMatrix, Subspace};
use crate::hodge::{HodgeFiltration, SymplecticLattice};

/// `[[0, I], [-I, 0]]` in basis `(x_1..x_g, y_1..y_g)`.
pub fn standard_form(g: usize) -> RationalMatrix {
    let mut q = RationalMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        q.set(i, g + i, rat(1));
        q.set(g + i, i, rat(-1));
    }
    q
}

fn small(rng: &mut impl Rng, span: i64) -> i64 {
    rng.gen_range(-span..=span)
}

/// Random element of `Sp(2g, ℤ)` built from `count` integral transvections
/// `x ↦ x + c·Q(v, x)·v`.
pub fn random_symplectic(q: &RationalMatrix, count: usize, rng: &mut impl Rng) -> RationalMatrix {
    let n = q.rows();
    let mut g = RationalMatrix::identity(n);
    for _ in 0..count {
        let v: Vec<_> = (0..n).map(|_| rat(small(rng, 1))).collect();
        let c = rat(if rng.gen_bool(0.5) { 1 } else { -1 });
        let qv = q.transpose().apply(&v);
        let mut t = RationalMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let x = t.get(i, j) + &c * &v[i] * &qv[j];
                t.set(i, j, x);
            }
        }
        g = t.mul(&g);
    }
    g
}

/// Random nilpotent element of `sp(2g, ℚ)` for [`standard_form`]: a block matrix
/// `[[A, B], [0, -Aᵀ]]` with `A` strictly upper triangular and `B` symmetric, conjugated by
/// a random symplectic matrix. Entries are zeroed at random to vary the Jordan type.
pub fn random_sp_nilpotent(g: usize, rng: &mut impl Rng) -> RationalMatrix {
    let n = 2 * g;
    let mut m = RationalMatrix::zeros(n, n);
    let density = rng.gen_range(0.2..0.9);
    for i in 0..g {
        for j in i + 1..g {
            if rng.gen_bool(density) {
                let a = rat(small(rng, 3));
                m.set(i, j, a.clone());
                m.set(g + j, g + i, -a);
            }
        }
        for j in i..g {
            if rng.gen_bool(density) {
                let b = rat(small(rng, 3));
                m.set(i, g + j, b.clone());
                m.set(j, g + i, b);
            }
        }
    }
    let q = standard_form(g);
    let s = random_symplectic(&q, 2 * g, rng);
    let s_inv = s.inverse().expect("symplectic matrices are invertible");
    s.mul(&m).mul(&s_inv)
}

/// Weight-1 lattice in basis `(e_1..e_g, e^g..e^1)` with `Q(e^i, e_i) = 1`.
pub fn siegel_lattice(g: usize) -> SymplecticLattice {
    let n = 2 * g;
    let mut q = RationalMatrix::zeros(n, n);
    for i in 0..g {
        let dual = n - 1 - i;
        q.set(dual, i, rat(1));
        q.set(i, dual, rat(-1));
    }
    SymplecticLattice::new(q, 1, vec![g, g]).expect("standard form is valid")
}

/// Nilpotent `e^j ↦ Σ_i s_{ij} e_i` for a symmetric `s` on [`siegel_lattice`].
pub fn siegel_nilpotent(s: &[Vec<i64>]) -> RationalMatrix {
    let g = s.len();
    let n = 2 * g;
    let mut m = RationalMatrix::zeros(n, n);
    for (i, row) in s.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            m.set(i, n - 1 - j, rat(x));
        }
    }
    m
}

/// `F^1 = span{e^j + i·Σ_k y_{jk} e_k}` on [`siegel_lattice`].
pub fn siegel_filtration(y: &[Vec<i64>]) -> HodgeFiltration {
    let g = y.len();
    let n = 2 * g;
    let f1: Vec<Vec<Gauss>> = (0..g)
        .map(|j| {
            let mut v = vec![Gauss::real(rat(0)); n];
            v[n - 1 - j] = Gauss::real(rat(1));
            for k in 0..g {
                v[k] = Gauss::new(rat(0), rat(y[j][k]));
            }
            v
        })
        .collect();
    let steps = vec![Subspace::full(n), Subspace::span(&f1, n).expect("length checked")];
    HodgeFiltration::new(0, steps).expect("decreasing")
}

/// Symmetric positive semidefinite `v vᵀ` for an integer vector.
pub fn rank_one(v: &[i64]) -> Vec<Vec<i64>> {
    v.iter().map(|a| v.iter().map(|b| a * b).collect()).collect()
}

/// Random integer vector with entries in `[-span, span]`, not all zero.
pub fn random_int_vec(len: usize, span: i64, rng: &mut impl Rng) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..len).map(|_| small(rng, span)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Random symmetric positive definite integer matrix `Σ v vᵀ + I`.
pub fn random_positive_definite(g: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let mut y: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..g {
        let v = random_int_vec(g, 2, rng);
        for (i, row) in y.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += v[i] * v[j];
            }
        }
    }
    y
}
