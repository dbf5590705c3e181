//! Hand-built scenarios used by tests, the acceptance suite and the command-line fixtures.

use crate::exact::{rat, Gauss, Rat, RationalMatrix, Subspace};
use crate::hodge::{HodgeFiltration, NilCone, SymplecticLattice};
use crate::reduce::template_form;
use crate::sample::{siegel_filtration, siegel_lattice, siegel_nilpotent};

/// A lattice, a cone and a candidate limit filtration, with optional `Γ` elements.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub lattice: SymplecticLattice,
    pub cone: NilCone,
    pub filtration: HodgeFiltration,
    pub witnesses: Vec<RationalMatrix>,
}

impl Scenario {
    /// Conjugate everything by a form-preserving `g`.
    pub fn conjugated(&self, g: &RationalMatrix) -> Scenario {
        let ginv = g.inverse().expect("invertible");
        let gens = self.cone.generators().iter().map(|n| g.mul(n).mul(&ginv)).collect();
        Scenario {
            name: self.name.clone(),
            lattice: self.lattice.clone(),
            cone: NilCone::new(gens).expect("conjugation keeps a valid cone"),
            filtration: self.filtration.transform_rational(g),
            witnesses: self.witnesses.iter().map(|w| g.mul(w).mul(&ginv)).collect(),
        }
    }
}

fn g(re: i64, im: i64) -> Gauss {
    Gauss::new(rat(re), rat(im))
}

fn unit(n: usize, k: usize) -> Vec<Gauss> {
    (0..n).map(|j| if j == k { Gauss::real(rat(1)) } else { g(0, 0) }).collect()
}

/// `x + s·i·y` for coordinates `x`, `y`.
fn mixed(n: usize, x: usize, y: usize, s: i64) -> Vec<Gauss> {
    let mut v = unit(n, x);
    v[y] = g(0, s);
    v
}

fn flag(n: usize, spans: Vec<Vec<Vec<Gauss>>>) -> HodgeFiltration {
    let mut steps = vec![Subspace::full(n)];
    let mut acc: Vec<Vec<Gauss>> = Vec::new();
    let mut tail: Vec<Subspace<Gauss>> = Vec::new();
    for s in spans.into_iter().rev() {
        acc.extend(s);
        tail.push(Subspace::span(&acc, n).expect("span"));
    }
    steps.extend(tail.into_iter().rev());
    HodgeFiltration::new(0, steps).expect("decreasing flag")
}

fn weight3_lattice(h: usize) -> SymplecticLattice {
    SymplecticLattice::new(template_form(2 * h + 2), 3, vec![1, h, h, 1]).expect("lattice")
}

/// Weight-1, genus-1 Hodge–Tate degeneration: `N e^1 = e_1`, `F^1 = ⟨i e_1 + e^1⟩`.
pub fn elliptic_ht() -> Scenario {
    Scenario {
        name: "elliptic_ht".into(),
        lattice: siegel_lattice(1),
        cone: NilCone::ray(siegel_nilpotent(&[vec![1]])).expect("ray"),
        filtration: siegel_filtration(&[vec![1]]),
        witnesses: Vec::new(),
    }
}

/// Weight-3 type I(a) with Hodge numbers (1,h,h,1), `0 ≤ a ≤ h`, in the basis
/// `(e_1..e_a, f_0, f_1..f_k, f^k..f^1, f^0, e^a..e^1)`, `k = h - a`, with `N e^i = e_i`.
pub fn cy3_type_i(h: usize, a: usize) -> Scenario {
    assert!(a <= h);
    let n = 2 * h + 2;
    let k = h - a;
    let (f0, f0_up) = (a, n - 1 - a);
    let mut m = RationalMatrix::zeros(n, n);
    for i in 0..a {
        m.set(i, n - 1 - i, rat(1));
    }
    let f_pairs: Vec<(usize, usize)> = (1..=k).map(|j| (a + j, n - 1 - a - j)).collect();
    let top = vec![mixed(n, f0, f0_up, 1)];
    let mut second: Vec<Vec<Gauss>> = (0..a).map(|i| unit(n, n - 1 - i)).collect();
    second.extend(f_pairs.iter().map(|&(x, y)| mixed(n, x, y, -1)));
    let mut third: Vec<Vec<Gauss>> = (0..a).map(|i| unit(n, i)).collect();
    third.extend(f_pairs.iter().map(|&(x, y)| mixed(n, x, y, 1)));
    Scenario {
        name: format!("cy3_type_i_{h}_{a}"),
        lattice: weight3_lattice(h),
        cone: NilCone::new(if a == 0 { Vec::new() } else { vec![m] }).expect("cone"),
        filtration: flag(n, vec![third, second, top]),
        witnesses: Vec::new(),
    }
}

/// Type IV operator on `(ω₋, e_1..e_a, f.., f^.., e^a..e^1, ω₊)`:
/// `ω₊ ↦ Σ c_i e^i`, `e^i ↦ Σ B_ij e_j`, `e_j ↦ -c_j ω₋` (`B` symmetric).
pub fn type_iv_operator(n: usize, c: &[Rat], b: &[Vec<Rat>]) -> RationalMatrix {
    let a = c.len();
    let e = |i: usize| 1 + i;
    let e_up = |i: usize| n - 2 - i;
    let mut m = RationalMatrix::zeros(n, n);
    for i in 0..a {
        m.set(e_up(i), n - 1, c[i].clone());
        m.set(0, e(i), -c[i].clone());
        for j in 0..a {
            m.set(e(j), e_up(i), b[i][j].clone());
        }
    }
    m
}

/// Weight-3 type IV(a) with Hodge numbers (1,h,h,1), `1 ≤ a ≤ h`: `c = (1,0..)`,
/// `B = diag(-1, 1, .., 1)`, limit `F^3 = ⟨ω₊⟩`, `F^2 = F^3 + ⟨e^i, f_j - i f^j⟩`.
pub fn cy3_type_iv(h: usize, a: usize) -> Scenario {
    assert!(1 <= a && a <= h);
    let n = 2 * h + 2;
    let c: Vec<Rat> = (0..a).map(|i| rat(i64::from(i == 0))).collect();
    let b: Vec<Vec<Rat>> = (0..a)
        .map(|i| {
            (0..a)
                .map(|j| {
                    if i != j {
                        rat(0)
                    } else if i == 0 {
                        rat(-1)
                    } else {
                        rat(1)
                    }
                })
                .collect()
        })
        .collect();
    let f_pairs: Vec<(usize, usize)> = (1..=h - a).map(|j| (a + j, n - 1 - a - j)).collect();
    let top = vec![unit(n, n - 1)];
    let mut second: Vec<Vec<Gauss>> = (0..a).map(|i| unit(n, n - 2 - i)).collect();
    second.extend(f_pairs.iter().map(|&(x, y)| mixed(n, x, y, -1)));
    let mut third: Vec<Vec<Gauss>> = (0..a).map(|i| unit(n, 1 + i)).collect();
    third.extend(f_pairs.iter().map(|&(x, y)| mixed(n, x, y, 1)));
    Scenario {
        name: format!("cy3_type_iv_{h}_{a}"),
        lattice: weight3_lattice(h),
        cone: NilCone::ray(type_iv_operator(n, &c, &b)).expect("ray"),
        filtration: flag(n, vec![third, second, top]),
        witnesses: Vec::new(),
    }
}

/// Type I(1) with h = 1, basis `(e_1, f_0, f^0, e^1)`.
pub fn cy3_i1() -> Scenario {
    let mut s = cy3_type_i(1, 1);
    s.name = "cy3_i1".into();
    s
}

/// Type IV(1) with h = 1, basis `(ω₋, e_1, e^1, ω₊)`.
pub fn cy3_iv1() -> Scenario {
    let mut s = cy3_type_iv(1, 1);
    s.name = "cy3_iv1".into();
    s
}

/// Weight-1 genus-2 quadrant `⟨N_x, N_y⟩` with a Hodge–Tate limit at the origin, and the two
/// cones of its star subdivision along `N_x + N_y`.
pub struct BlowupExample {
    pub scenario: Scenario,
    pub refined: [[RationalMatrix; 2]; 2],
}

pub fn blowup_example() -> BlowupExample {
    let nx = siegel_nilpotent(&[vec![1, 0], vec![0, 0]]);
    let ny = siegel_nilpotent(&[vec![0, 0], vec![0, 1]]);
    let diag = nx.add(&ny);
    BlowupExample {
        scenario: Scenario {
            name: "blowup_example".into(),
            lattice: siegel_lattice(2),
            cone: NilCone::new(vec![nx.clone(), ny.clone()]).expect("cone"),
            filtration: siegel_filtration(&[vec![1, 0], vec![0, 1]]),
            witnesses: Vec::new(),
        },
        refined: [[nx, diag.clone()], [diag, ny]],
    }
}

/// `x ↦ Σ_k κ_{ijk} x_k` for the cubic with `κ_111 = κ_222 = 1`, `κ_112 = κ_122 = 2`.
fn cubic_hessian(x: &[i64]) -> [[i64; 2]; 2] {
    let (a, b) = (x[0], x[1]);
    [[a + 2 * b, 2 * a + 2 * b], [2 * a + 2 * b, 2 * a + b]]
}

/// Type IV operator with `c = x` and `B = -K(x)`; any two of these commute.
pub fn ht14_iv(x: &[i64]) -> RationalMatrix {
    let k = cubic_hessian(x);
    let c: Vec<Rat> = x.iter().map(|&v| rat(v)).collect();
    let b: Vec<Vec<Rat>> = k.iter().map(|r| r.iter().map(|&v| rat(-v)).collect()).collect();
    type_iv_operator(6, &c, &b)
}

/// Type I operator `e^i ↦ Σ (v vᵀ)_ij e_j`.
pub fn ht14_i(v: &[i64]) -> RationalMatrix {
    let b: Vec<Vec<Rat>> = v.iter().map(|&p| v.iter().map(|&q| rat(p * q)).collect()).collect();
    type_iv_operator(6, &[rat(0), rat(0)], &b)
}

/// Levi element acting by `A` on `(e_1, e_2)` and by `A^{-T}` on `(e^1, e^2)`.
pub fn ht14_levi(a: [[i64; 2]; 2]) -> RationalMatrix {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    assert!(det == 1 || det == -1);
    // A^{-T} = adj(A)^T / det
    let inv_t = [[a[1][1] * det, -a[1][0] * det], [-a[0][1] * det, a[0][0] * det]];
    let mut g = RationalMatrix::zeros(6, 6);
    g.set(0, 0, rat(1));
    g.set(5, 5, rat(1));
    let e = |i: usize| 1 + i;
    let e_up = |i: usize| 4 - i;
    for i in 0..2 {
        for j in 0..2 {
            g.set(e(i), e(j), rat(a[i][j]));
            g.set(e_up(i), e_up(j), rat(inv_t[i][j]));
        }
    }
    g
}

/// Limit filtrations for the type IV and type I cones.
pub fn ht14_limits() -> (HodgeFiltration, HodgeFiltration) {
    let n = 6;
    let iv = flag(n, vec![vec![unit(n, 1), unit(n, 2)], vec![unit(n, 3), unit(n, 4)], vec![unit(n, 5)]]);
    let mut top = unit(n, 5);
    top[0] = g(0, -1);
    let i = flag(n, vec![vec![unit(n, 1), unit(n, 2)], vec![unit(n, 3), unit(n, 4)], vec![top]]);
    (iv, i)
}

/// Weight-3 system with Hodge numbers (1,2,2,1) mimicking a two-parameter census: three
/// type IV/IV cones, three IV/I cones and six I/I cones, with Levi group elements.
pub struct Ht14Like {
    pub system: crate::fan::ConeSystem,
    /// Expected types `[first edge, interior, second edge]` per cone.
    pub manifest: Vec<[crate::hodge::LmhsType; 3]>,
}

pub fn ht14_like() -> Ht14Like {
    use crate::hodge::{Family, LmhsType::*};
    let lattice = weight3_lattice(2);
    let (f_iv, f_i) = ht14_limits();
    let mut cones = Vec::new();
    let mut limits = Vec::new();
    let mut manifest = Vec::new();
    for (x, y) in [([1, 0], [1, 1]), ([1, 1], [0, 1]), ([2, 1], [1, 2])] {
        cones.push(NilCone::new(vec![ht14_iv(&x), ht14_iv(&y)]).expect("commuting"));
        limits.push(Some(f_iv.clone()));
        manifest.push([IV(2), IV(2), IV(2)]);
    }
    for (x, perp) in [([1, 0], [0, 1]), ([0, 1], [1, 0]), ([1, 1], [1, -1])] {
        cones.push(NilCone::new(vec![ht14_iv(&x), ht14_i(&perp)]).expect("commuting"));
        limits.push(Some(f_iv.clone()));
        manifest.push([IV(2), IV(2), I(1)]);
    }
    for (v, w) in
        [([1, 0], [0, 1]), ([1, 1], [1, -1]), ([1, 0], [1, 1]), ([1, 1], [0, 1]), ([1, 2], [2, 1]), ([1, -1], [1, 0])]
    {
        cones.push(NilCone::new(vec![ht14_i(&v), ht14_i(&w)]).expect("commuting"));
        limits.push(Some(f_i.clone()));
        manifest.push([I(1), I(2), I(1)]);
    }
    let witnesses = vec![ht14_levi([[0, 1], [1, 0]]), ht14_levi([[1, 1], [0, 1]]), ht14_levi([[1, 0], [1, 1]])];
    let phi = [Family::I, Family::IV].into_iter().collect();
    let system = crate::fan::ConeSystem::new(lattice, cones, witnesses, phi, limits).expect("valid system");
    Ht14Like { system, manifest }
}
