//! Brute-force oracles shared by the property tests and the acceptance target.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use nilcone::cones::{Cone, ConeComplex};
use nilcone::exact::{int_to_rat, primitive_integer, rat, Matrix, Rat};
use num_traits::ToPrimitive;
use rand::Rng;

type V = Vec<i128>;

fn to_i(v: &[num_bigint::BigInt]) -> V {
    v.iter().map(|x| x.to_i128().expect("small entries")).collect()
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer hrep of a cone: `(equalities, strict)`.
struct Hr {
    eqs: Vec<V>,
    strict: Vec<V>,
}

impl Hr {
    fn of(c: &Cone) -> Self {
        Hr {
            eqs: c.hrep().equalities.iter().map(|f| to_i(f)).collect(),
            strict: c.hrep().strict.iter().map(|f| to_i(f)).collect(),
        }
    }

    fn contains(&self, x: &[i128]) -> bool {
        self.eqs.iter().all(|f| dot(f, x) == 0) && self.strict.iter().all(|f| dot(f, x) > 0)
    }

    fn closure_contains(&self, x: &[i128]) -> bool {
        self.eqs.iter().all(|f| dot(f, x) == 0) && self.strict.iter().all(|f| dot(f, x) >= 0)
    }

    fn forms(&self) -> impl Iterator<Item = &V> {
        self.eqs.iter().chain(&self.strict)
    }
}

fn canonical(v: &[i128]) -> V {
    let g = v.iter().fold(0i128, |a, &b| num_integer::gcd(a, b));
    let mut out: V = if g == 0 { v.to_vec() } else { v.iter().map(|x| x / g).collect() };
    if out.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    out
}

/// Rays `±u` cut out by `d-1` of the forms and accepted by `keep`.
fn line_rays(forms: &[V], d: usize, keep: impl Fn(&[i128]) -> bool) -> Vec<V> {
    let mut rays = BTreeSet::new();
    let candidates: Vec<V> = if d == 1 {
        vec![vec![1], vec![-1]]
    } else {
        forms
            .iter()
            .combinations(d - 1)
            .filter_map(|combo| {
                let rows: Vec<Vec<Rat>> = combo.iter().map(|f| f.iter().map(|&x| rat(x as i64)).collect()).collect();
                let null = Matrix::from_rows(rows).unwrap().nullspace();
                (null.len() == 1).then(|| to_i(&primitive_integer(&null[0])))
            })
            .flat_map(|u| [u.clone(), u.iter().map(|x| -x).collect()])
            .collect()
    };
    for u in candidates {
        if keep(&u) {
            rays.insert(u);
        }
    }
    rays.into_iter().collect()
}

/// Whether the relative interiors of two cones meet: the sum of the rays of the intersection
/// of the closures lies in both relative interiors.
fn overlap(a: &Hr, b: &Hr, d: usize) -> bool {
    let forms: Vec<V> = a.forms().chain(b.forms()).cloned().collect();
    let rays = line_rays(&forms, d, |u| a.closure_contains(u) && b.closure_contains(u));
    let mut s = vec![0i128; d];
    for r in &rays {
        for (x, y) in s.iter_mut().zip(r) {
            *x += y;
        }
    }
    a.contains(&s) && b.contains(&s)
}

fn rank(vs: &[&V]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Rat>> = vs.iter().map(|v| v.iter().map(|&x| rat(x as i64)).collect()).collect();
    Matrix::from_rows(rows).unwrap().rank()
}

/// Expected number of output cones of the chamber subdivision of a face-closed complex:
/// distinct keys (sign vector on the arrangement, set of input cones containing the point)
/// over relint points of every cell, each formed as a sum of `k` independent rays of one
/// closed cell.
pub fn chamber_count(complex: &ConeComplex) -> usize {
    let d = complex.ambient();
    let hr: Vec<Hr> = complex.cones().iter().map(Hr::of).collect();
    let overlapping: Vec<usize> =
        (0..hr.len()).filter(|&i| (0..hr.len()).any(|j| j != i && overlap(&hr[i], &hr[j], d))).collect();
    // τ is a face of σ iff the rays of σ on the facets through a relint point of τ are τ's rays
    let face_of = |t: usize, s: usize| {
        let (tc, sc) = (&complex.cones()[t], &complex.cones()[s]);
        let p: V = to_i(&primitive_integer(&tc.interior_point()));
        if !hr[s].closure_contains(&p) {
            return false;
        }
        let tight: Vec<&V> = hr[s].strict.iter().filter(|f| dot(f, &p) == 0).collect();
        let rays: BTreeSet<V> =
            sc.rays().iter().map(|r| to_i(r)).filter(|r| tight.iter().all(|f| dot(f, r) == 0)).collect();
        rays == tc.rays().iter().map(|r| to_i(r)).collect::<BTreeSet<_>>()
    };
    let maximal: Vec<usize> = (0..hr.len()).filter(|&i| !(0..hr.len()).any(|j| j != i && face_of(i, j))).collect();
    let carriers: Vec<usize> = maximal.into_iter().filter(|&m| overlapping.iter().any(|&t| face_of(t, m))).collect();
    let h: Vec<V> = carriers
        .iter()
        .flat_map(|&i| hr[i].forms().map(|f| canonical(f)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut keys = BTreeSet::new();
    for (ci, cone) in complex.cones().iter().enumerate() {
        let own = &hr[ci];
        let forms: Vec<V> =
            h.iter().cloned().chain(own.forms().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        let rays = line_rays(&forms, d, |u| own.closure_contains(u));
        let sgn: Vec<Vec<i8>> = rays.iter().map(|r| forms.iter().map(|f| dot(f, r).signum() as i8).collect()).collect();
        let conformal = |a: usize, b: usize| sgn[a].iter().zip(&sgn[b]).all(|(x, y)| x * y >= 0);
        let mut record = |idx: &[usize]| {
            let mut s = vec![0i128; d];
            for &i in idx {
                for (x, y) in s.iter_mut().zip(&rays[i]) {
                    *x += y;
                }
            }
            if own.contains(&s) {
                let signs: Vec<i8> = h.iter().map(|f| dot(f, &s).signum() as i8).collect();
                let inside: Vec<usize> = (0..hr.len()).filter(|&j| hr[j].contains(&s)).collect();
                keys.insert((signs, inside));
            }
        };
        let k = cone.dim();
        // extend conformal independent subsets one ray at a time in increasing index order
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(sub) = stack.pop() {
            record(&sub);
            if sub.len() == k {
                continue;
            }
            let start = sub.last().map_or(0, |&i| i + 1);
            for next in start..rays.len() {
                if sub.iter().all(|&i| conformal(i, next)) {
                    let mut grown = sub.clone();
                    grown.push(next);
                    let vs: Vec<&V> = grown.iter().map(|&i| &rays[i]).collect();
                    if rank(&vs) == grown.len() {
                        stack.push(grown);
                    }
                }
            }
        }
    }
    keys.len()
}

/// Output refines each input: cells inside an input cone have Euler sum `(-1)^dim` and every
/// cell meeting an input cone lies inside it.
pub fn refines(input: &ConeComplex, output: &ConeComplex) -> Result<(), String> {
    for c in output.cones() {
        let p = c.interior_point();
        if !input.support_contains(&p) {
            return Err(format!("{c:?} leaves the support"));
        }
    }
    for s in input.cones() {
        let mut euler = 0i64;
        for c in output.cones() {
            if s.contains(&c.interior_point()) {
                if !c.rays_rat().iter().all(|r| s.closure_contains(r)) {
                    return Err(format!("{c:?} straddles {s:?}"));
                }
                euler += if c.dim() % 2 == 0 { 1 } else { -1 };
            }
        }
        let want = if s.dim() % 2 == 0 { 1 } else { -1 };
        if euler != want {
            return Err(format!("Euler sum {euler} over {s:?}"));
        }
    }
    Ok(())
}

/// Random positive combinations of the rays of each input cone are covered by the output.
pub fn covers(input: &ConeComplex, output: &ConeComplex, rng: &mut impl Rng) -> Result<(), String> {
    for s in input.cones() {
        for _ in 0..4 {
            let mut p = vec![Rat::from_integer(0.into()); input.ambient()];
            for r in s.rays_rat() {
                let c = Rat::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=4).into());
                for (a, b) in p.iter_mut().zip(&r) {
                    *a += &c * b;
                }
            }
            if !output.support_contains(&p) {
                return Err(format!("point of {s:?} not covered"));
            }
        }
    }
    Ok(())
}

/// Two full-dimensional simplicial cones in `ℚ^d` whose interiors share a point.
pub fn random_overlapping_pair(d: usize, rng: &mut impl Rng) -> (Cone, Cone) {
    let p: Vec<i64> = (0..d).map(|_| rng.gen_range(2..=5)).collect();
    let pr: Vec<Rat> = p.iter().map(|&x| rat(x)).collect();
    let mut make = || loop {
        let rays: Vec<Vec<Rat>> = (0..d).map(|_| (0..d).map(|i| rat(p[i] + rng.gen_range(-4..=4))).collect()).collect();
        if Matrix::from_rows(rays.clone()).unwrap().rank() < d {
            continue;
        }
        let Ok(c) = Cone::new(d, &rays) else { continue };
        if c.rays().len() == d && c.contains(&pr) {
            return c;
        }
    };
    let a = make();
    let b = make();
    (a, b)
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    int_to_rat(&v.iter().map(|&x| x.into()).collect::<Vec<_>>())
}
