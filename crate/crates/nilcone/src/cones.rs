//! Relatively open rational polyhedral cones and complexes of them.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{dot, int_to_rat, primitive_integer, ExactError, Matrix, Rat, RationalMatrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("cone is not pointed (its closure contains a line)")]
    NotPointed,
    #[error("vector of length {found} in a {expected}-dimensional space")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ray lies outside the closed cone")]
    RayOutside,
    #[error("complex is not closed under taking faces")]
    NotFaceClosed,
    #[error("group element does not preserve the form")]
    FormNotPreserved,
    #[error("group element is not integral")]
    NonIntegral,
    #[error("matrix lies outside the coordinate frame")]
    OutsideFrame,
    #[error("frame matrices are linearly dependent")]
    DependentFrame,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn rats(v: &[BigInt]) -> Vec<Rat> {
    int_to_rat(v)
}

/// Primitive integer direction with the first nonzero entry positive.
fn hyperplane_key(v: &[Rat]) -> Vec<BigInt> {
    let p = primitive_integer(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.into_iter().map(|x| -x).collect(),
        _ => p,
    }
}

fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        0
    } else {
        Matrix::from_rows(rows.to_vec()).expect("equal lengths").rank()
    }
}

/// Basis of `{x : a·x = 0 for all a in rows}`.
fn kernel(rows: &[Vec<Rat>], ambient: usize) -> Vec<Vec<Rat>> {
    if rows.is_empty() {
        (0..ambient).map(|i| (0..ambient).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
    } else {
        Matrix::from_rows(rows.to_vec()).expect("equal lengths").nullspace()
    }
}

fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Extreme rays of the pointed full-dimensional cone `{u : rows·u ≥ 0}` in `ℚ^k`, or
/// `None` when `rows` has rank below `k` (the cone contains a line).
fn extreme_rays_local(rows: &[Vec<Rat>], k: usize) -> Option<Vec<Vec<Rat>>> {
    if rank(rows) < k {
        return None;
    }
    let mut out: Vec<Vec<Rat>> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |u: Vec<Rat>| {
        let key = primitive_integer(&u);
        if seen.insert(key.clone()) {
            out.push(rats(&key));
        }
    };
    if k == 1 {
        if rows.iter().all(|r| !r[0].is_negative()) {
            push(vec![Rat::one()]);
        }
        if rows.iter().all(|r| !r[0].is_positive()) {
            push(vec![-Rat::one()]);
        }
        return Some(out);
    }
    for combo in (0..rows.len()).combinations(k - 1) {
        let sub: Vec<Vec<Rat>> = combo.iter().map(|&i| rows[i].clone()).collect();
        let null = Matrix::from_rows(sub).expect("equal lengths").nullspace();
        if null.len() != 1 {
            continue;
        }
        let u = &null[0];
        let signs: Vec<i8> = rows.iter().map(|r| sign(&dot(r, u))).collect();
        if signs.iter().all(|&s| s >= 0) {
            push(u.clone());
        } else if signs.iter().all(|&s| s <= 0) {
            push(u.iter().map(|x| -x.clone()).collect());
        }
    }
    Some(out)
}

/// Hyperplane description of a relatively open cone: `eq·x = 0` and `ineq·x > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HRep {
    pub equalities: Vec<Vec<BigInt>>,
    pub strict: Vec<Vec<BigInt>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Positive,
    Zero,
}

impl HRep {
    pub fn relations(&self) -> impl Iterator<Item = (&[BigInt], Relation)> {
        self.equalities
            .iter()
            .map(|f| (f.as_slice(), Relation::Zero))
            .chain(self.strict.iter().map(|f| (f.as_slice(), Relation::Positive)))
    }
}

/// Relatively open pointed rational cone, stored by its primitive integer extreme rays.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cone {
    ambient: usize,
    rays: Vec<Vec<BigInt>>,
    hrep: HRep,
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rays: Vec<String> =
            self.rays.iter().map(|r| format!("({})", r.iter().map(ToString::to_string).join(","))).collect();
        write!(f, "⟨{}⟩", rays.join(", "))
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cone {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient, self.dim(), &self.rays).cmp(&(other.ambient, other.dim(), &other.rays))
    }
}

impl Cone {
    /// Relatively open cone spanned by the given generators; redundant generators are dropped.
    pub fn new(ambient: usize, generators: &[Vec<Rat>]) -> Result<Self, ConeError> {
        for g in generators {
            if g.len() != ambient {
                return Err(ConeError::DimensionMismatch { expected: ambient, found: g.len() });
            }
        }
        let gens: Vec<Vec<Rat>> = generators
            .iter()
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .map(|g| primitive_integer(g))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|g| rats(&g))
            .collect();
        let span = Subspace::span(&gens, ambient)?;
        let basis = span.basis();
        let r = basis.len();
        let local: Vec<Vec<Rat>> = gens.iter().map(|g| basis.iter().map(|b| dot(b, g)).collect()).collect();
        let mut facets: Vec<Vec<Rat>> = Vec::new();
        if r == 1 {
            let signs: BTreeSet<i8> = local.iter().map(|y| sign(&y[0])).collect();
            if signs.len() > 1 {
                return Err(ConeError::NotPointed);
            }
            facets.push(vec![Rat::from_integer(BigInt::from(*signs.iter().next().unwrap()))]);
        } else if r > 1 {
            let mut seen = BTreeSet::new();
            for combo in (0..local.len()).combinations(r - 1) {
                let sub: Vec<Vec<Rat>> = combo.iter().map(|&i| local[i].clone()).collect();
                let null = Matrix::from_rows(sub)?.nullspace();
                if null.len() != 1 {
                    continue;
                }
                let c = &null[0];
                let signs: Vec<i8> = local.iter().map(|y| sign(&dot(c, y))).collect();
                let oriented: Vec<Rat> = if signs.iter().all(|&s| s >= 0) {
                    c.clone()
                } else if signs.iter().all(|&s| s <= 0) {
                    c.iter().map(|x| -x.clone()).collect()
                } else {
                    continue;
                };
                if seen.insert(primitive_integer(&oriented)) {
                    facets.push(oriented);
                }
            }
            if rank(&facets) < r {
                return Err(ConeError::NotPointed);
            }
        }
        let extreme: Vec<Vec<BigInt>> = gens
            .iter()
            .zip(&local)
            .filter(|(_, y)| {
                let tight: Vec<Vec<Rat>> = facets.iter().filter(|c| dot(c, y).is_zero()).cloned().collect();
                r <= 1 || rank(&tight) == r - 1
            })
            .map(|(g, _)| primitive_integer(g))
            .collect();
        let lift = |c: &Vec<Rat>| -> Vec<Rat> {
            (0..ambient).map(|j| basis.iter().zip(c).map(|(b, ci)| &b[j] * ci).sum()).collect()
        };
        let mut strict: Vec<Vec<BigInt>> = facets.iter().map(|c| primitive_integer(&lift(c))).collect();
        strict.sort();
        let mut equalities: Vec<Vec<BigInt>> =
            span.annihilator().basis().iter().map(|v| primitive_integer(v)).collect();
        equalities.sort();
        let mut rays = extreme;
        rays.sort();
        Ok(Cone { ambient, rays, hrep: HRep { equalities, strict } })
    }

    pub fn from_ints(ambient: usize, generators: &[Vec<i64>]) -> Result<Self, ConeError> {
        let gens: Vec<Vec<Rat>> =
            generators.iter().map(|g| g.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect();
        Self::new(ambient, &gens)
    }

    pub fn zero(ambient: usize) -> Self {
        Self::new(ambient, &[]).expect("zero cone")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn rays_rat(&self) -> Vec<Vec<Rat>> {
        self.rays.iter().map(|r| rats(r)).collect()
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.hrep.equalities.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim()
    }

    pub fn hrep(&self) -> &HRep {
        &self.hrep
    }

    pub fn span(&self) -> Subspace<Rat> {
        Subspace::span(&self.rays_rat(), self.ambient).expect("lengths match")
    }

    /// Sum of the extreme rays, a point of the relative interior.
    pub fn interior_point(&self) -> Vec<Rat> {
        let mut s = vec![Rat::zero(); self.ambient];
        for r in &self.rays {
            for (a, b) in s.iter_mut().zip(r) {
                *a += Rat::from_integer(b.clone());
            }
        }
        s
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.hrep.equalities.iter().all(|f| dot(&rats(f), x).is_zero())
            && self.hrep.strict.iter().all(|f| dot(&rats(f), x).is_positive())
    }

    pub fn closure_contains(&self, x: &[Rat]) -> bool {
        self.hrep.equalities.iter().all(|f| dot(&rats(f), x).is_zero())
            && self.hrep.strict.iter().all(|f| !dot(&rats(f), x).is_negative())
    }

    /// Whether the closure of `other` lies in the closure of `self`.
    pub fn closure_contains_cone(&self, other: &Cone) -> bool {
        other.rays_rat().iter().all(|r| self.closure_contains(r))
    }

    /// Whether one hyperplane of either representation keeps the two relative interiors apart.
    fn separated(&self, other: &Cone) -> bool {
        let apart = |a: &Cone, b: &Cone| {
            let signs = |f: &[BigInt]| -> (bool, bool) {
                let mut seen = (false, false);
                for r in &b.rays {
                    let v: BigInt = f.iter().zip(r).map(|(x, y)| x * y).sum();
                    match v.sign() {
                        Sign::Plus => seen.0 = true,
                        Sign::Minus => seen.1 = true,
                        Sign::NoSign => {}
                    }
                }
                seen
            };
            a.hrep.strict.iter().any(|f| !signs(f).0)
                || a.hrep.equalities.iter().any(|f| {
                    let (p, n) = signs(f);
                    p != n
                })
        };
        apart(self, other) || apart(other, self)
    }

    /// Relative-interior intersection, `None` when empty.
    pub fn intersect(&self, other: &Cone) -> Option<Cone> {
        if self == other {
            return Some(self.clone());
        }
        if self.separated(other) {
            return None;
        }
        let eqs: Vec<Vec<Rat>> = self.hrep.equalities.iter().chain(&other.hrep.equalities).map(|f| rats(f)).collect();
        let strict: Vec<Vec<Rat>> = self.hrep.strict.iter().chain(&other.hrep.strict).map(|f| rats(f)).collect();
        open_region(self.ambient, &eqs, &strict).expect("intersection of pointed cones is pointed")
    }

    /// All faces, including the cone itself and the zero cone.
    pub fn faces(&self) -> BTreeSet<Cone> {
        let mut out = BTreeSet::new();
        self.collect_faces(&mut out);
        out
    }

    fn collect_faces(&self, out: &mut BTreeSet<Cone>) {
        if !out.insert(self.clone()) {
            return;
        }
        for f in &self.hrep.strict {
            let fr = rats(f);
            let rays: Vec<Vec<Rat>> = self.rays_rat().into_iter().filter(|r| dot(&fr, r).is_zero()).collect();
            Cone::new(self.ambient, &rays).expect("faces of pointed cones are pointed").collect_faces(out);
        }
    }

    /// Facets of the closed cone, as relatively open cones.
    pub fn facets(&self) -> Vec<Cone> {
        self.hrep
            .strict
            .iter()
            .map(|f| {
                let fr = rats(f);
                let rays: Vec<Vec<Rat>> = self.rays_rat().into_iter().filter(|r| dot(&fr, r).is_zero()).collect();
                Cone::new(self.ambient, &rays).expect("faces of pointed cones are pointed")
            })
            .collect()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        other.faces().contains(self)
    }
}

/// `{x : eqs·x = 0, strict·x > 0}` as a relatively open cone, `None` when empty.
pub fn open_region(ambient: usize, eqs: &[Vec<Rat>], strict: &[Vec<Rat>]) -> Result<Option<Cone>, ConeError> {
    let basis = kernel(eqs, ambient);
    let k = basis.len();
    if k == 0 {
        return Ok(strict.is_empty().then(|| Cone::zero(ambient)));
    }
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in strict {
        let row: Vec<Rat> = basis.iter().map(|z| dot(a, z)).collect();
        if row.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        if seen.insert(primitive_integer(&row)) {
            rows.push(row);
        }
    }
    let local = extreme_rays_local(&rows, k).ok_or(ConeError::NotPointed)?;
    if local.is_empty() {
        return Ok(None);
    }
    let mut s = vec![Rat::zero(); k];
    for u in &local {
        for (a, b) in s.iter_mut().zip(u) {
            *a += b;
        }
    }
    if !rows.iter().all(|r| dot(r, &s).is_positive()) {
        return Ok(None);
    }
    let gens: Vec<Vec<Rat>> = local
        .iter()
        .map(|u| (0..ambient).map(|j| basis.iter().zip(u).map(|(z, c)| &z[j] * c).sum()).collect())
        .collect();
    Cone::new(ambient, &gens).map(Some)
}

/// Finite set of cones in one ambient space, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConeComplex {
    ambient: usize,
    cones: Vec<Cone>,
}

impl fmt::Debug for ConeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.cones).finish()
    }
}

/// First violation found by [`ConeComplex::is_fan`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanViolation {
    MissingFace { cone: Cone, face: Cone },
    Overlap { first: Cone, second: Cone, common: Cone },
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanViolation::MissingFace { cone, face } => write!(f, "face {face:?} of {cone:?} is missing"),
            FanViolation::Overlap { first, second, common } => {
                write!(f, "{first:?} and {second:?} overlap in {common:?}")
            }
        }
    }
}

impl ConeComplex {
    pub fn new(ambient: usize, cones: impl IntoIterator<Item = Cone>) -> Self {
        let set: BTreeSet<Cone> = cones.into_iter().collect();
        ConeComplex { ambient, cones: set.into_iter().collect() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.cones.binary_search(c).is_ok()
    }

    pub fn face_closure(&self) -> Self {
        Self::new(self.ambient, self.cones.iter().flat_map(Cone::faces))
    }

    pub fn is_face_closed(&self) -> bool {
        self.first_missing_face().is_none()
    }

    fn first_missing_face(&self) -> Option<FanViolation> {
        self.cones.iter().find_map(|c| {
            c.faces()
                .into_iter()
                .find(|f| !self.contains_cone(f))
                .map(|face| FanViolation::MissingFace { cone: c.clone(), face })
        })
    }

    /// Whether some cone of the complex contains `x`.
    pub fn support_contains(&self, x: &[Rat]) -> bool {
        self.cones.iter().any(|c| c.contains(x))
    }

    /// Face closure plus pairwise intersections empty or equal.
    pub fn is_fan(&self) -> Result<(), FanViolation> {
        if let Some(v) = self.first_missing_face() {
            return Err(v);
        }
        for (i, a) in self.cones.iter().enumerate() {
            for b in &self.cones[i + 1..] {
                if let Some(common) = a.intersect(b) {
                    return Err(FanViolation::Overlap { first: a.clone(), second: b.clone(), common });
                }
            }
        }
        Ok(())
    }

    pub fn maximal_cones(&self) -> Vec<Cone> {
        let mut covered = BTreeSet::new();
        for c in &self.cones {
            for f in c.faces() {
                if f != *c {
                    covered.insert(f);
                }
            }
        }
        self.cones.iter().filter(|c| !covered.contains(*c)).cloned().collect()
    }
}

/// Star subdivision of the closed cone at a ray of its closure.
pub fn star_subdivision(cone: &Cone, ray: &[Rat]) -> Result<ConeComplex, ConeError> {
    if ray.len() != cone.ambient() {
        return Err(ConeError::DimensionMismatch { expected: cone.ambient(), found: ray.len() });
    }
    if ray.iter().all(Zero::is_zero) || !cone.closure_contains(ray) {
        return Err(ConeError::RayOutside);
    }
    let v = rats(&primitive_integer(ray));
    let faces = cone.faces();
    let holders: Vec<&Cone> = faces.iter().filter(|f| f.closure_contains(&v)).collect();
    let mut out = Vec::new();
    for tau in &faces {
        if tau.closure_contains(&v) {
            continue;
        }
        out.push(tau.clone());
        if holders.iter().any(|f| f.closure_contains_cone(tau)) {
            let mut gens = tau.rays_rat();
            gens.push(v.clone());
            out.push(Cone::new(cone.ambient(), &gens)?);
        }
    }
    Ok(ConeComplex::new(cone.ambient(), out))
}

/// Star subdivision of a face-closed complex at a ray of its support: every cone whose closure
/// holds the ray is replaced by the joins of the ray with its faces that avoid it.
pub fn star_subdivide_complex(complex: &ConeComplex, ray: &[Rat]) -> Result<ConeComplex, ConeError> {
    if !complex.support_contains(ray) {
        return Err(ConeError::RayOutside);
    }
    let mut out = Vec::new();
    for m in complex.maximal_cones() {
        if m.closure_contains(ray) {
            out.extend(star_subdivision(&m, ray)?.cones().iter().cloned());
        } else {
            out.extend(m.faces());
        }
    }
    Ok(ConeComplex::new(complex.ambient(), out))
}

/// Cells `σ ∩ R` with `R` a relatively open cell of the arrangement of `forms`.
pub fn arrangement_cells(cone: &Cone, forms: &[Vec<Rat>]) -> Vec<Cone> {
    let mut out = Vec::new();
    let eqs: Vec<Vec<Rat>> = cone.hrep.equalities.iter().map(|f| rats(f)).collect();
    let strict: Vec<Vec<Rat>> = cone.hrep.strict.iter().map(|f| rats(f)).collect();
    split_cells(cone.clone(), eqs, strict, forms, &mut out);
    out
}

fn split_cells(region: Cone, eqs: Vec<Vec<Rat>>, strict: Vec<Vec<Rat>>, forms: &[Vec<Rat>], out: &mut Vec<Cone>) {
    let Some((h, rest)) = forms.split_first() else {
        out.push(region);
        return;
    };
    let signs: BTreeSet<i8> = region.rays_rat().iter().map(|r| sign(&dot(h, r))).collect();
    let pos = signs.contains(&1);
    let neg = signs.contains(&-1);
    if !(pos && neg) {
        // the sign of `h` is constant on the region, so the constraint is implied
        split_cells(region, eqs, strict, rest, out);
        return;
    }
    let ambient = region.ambient();
    for sgn in [1i8, 0, -1] {
        let mut e = eqs.clone();
        let mut s = strict.clone();
        match sgn {
            0 => e.push(h.clone()),
            1 => s.push(h.clone()),
            _ => s.push(h.iter().map(|x| -x.clone()).collect()),
        }
        let child = open_region(ambient, &e, &s).expect("subregions of pointed cones are pointed");
        if let Some(c) = child {
            split_cells(c, e, s, rest, out);
        }
    }
}

/// Hyperplanes carried by the hyperplane representations of the given cones, deduplicated.
pub fn hyperplanes<'a>(cones: impl IntoIterator<Item = &'a Cone>) -> Vec<Vec<Rat>> {
    let mut keys = BTreeSet::new();
    for c in cones {
        for (f, _) in c.hrep.relations() {
            keys.insert(hyperplane_key(&rats(f)));
        }
    }
    keys.into_iter().map(|k| rats(&k)).collect()
}

/// Cones of the complex that are not proper faces of another cone in it.
pub fn maximal_cones(complex: &ConeComplex) -> Vec<Cone> {
    complex.maximal_cones()
}

/// Refine a face-closed complex by the arrangement of hyperplanes carried by the maximal cones
/// that have an overlapping face, together with `extra_forms`. Faces are cut out by sign
/// conditions on their maximal cone's representation, so only maximal cones contribute forms.
pub fn chamber_subdivision_with(complex: &ConeComplex, extra_forms: &[Vec<Rat>]) -> Result<ConeComplex, ConeError> {
    if !complex.is_face_closed() {
        return Err(ConeError::NotFaceClosed);
    }
    let cones = complex.cones();
    let overlapping: Vec<&Cone> =
        cones.iter().filter(|a| cones.iter().any(|b| b != *a && a.intersect(b).is_some())).collect();
    let carriers: Vec<Cone> = complex
        .maximal_cones()
        .into_iter()
        .filter(|m| {
            let faces = m.faces();
            overlapping.iter().any(|t| faces.contains(*t))
        })
        .collect();
    let mut forms = hyperplanes(&carriers);
    let mut keys: BTreeSet<Vec<BigInt>> = forms.iter().map(|f| hyperplane_key(f)).collect();
    for f in extra_forms {
        if f.iter().any(|x| !x.is_zero()) && keys.insert(hyperplane_key(f)) {
            forms.push(rats(&hyperplane_key(f)));
        }
    }
    let cells = cones.iter().flat_map(|c| arrangement_cells(c, &forms));
    Ok(ConeComplex::new(complex.ambient(), cells))
}

/// Forms whose restrictions to the span of `a` cut `a` along `b`.
///
/// When the span of `a` lies in that of `b`, or meets it in a hyperplane of the span of `a`, the
/// cut depends only on the two cones and not on the coordinates. Otherwise every equality of `b`
/// that is nonzero on `a` is used, which depends on the chosen representation.
pub fn cut_forms(a: &Cone, b: &Cone) -> Vec<Vec<Rat>> {
    let rays = a.rays_rat();
    let live = |f: &Vec<Rat>| rays.iter().any(|r| !dot(f, r).is_zero());
    let (sa, sb) = (a.span(), b.span());
    if sb.contains_subspace(&sa) {
        return b.hrep.strict.iter().map(|f| rats(f)).filter(live).collect();
    }
    let eqs: Vec<Vec<Rat>> = b.hrep.equalities.iter().map(|f| rats(f)).filter(live).collect();
    if sa.intersect(&sb).dim() + 1 == sa.dim() {
        eqs.into_iter().take(1).collect()
    } else {
        eqs
    }
}

/// One round of local refinement of a face-closed complex: each cone is cut along every cone
/// whose relative interior meets its own, using [`cut_forms`] and `extra(a, b)`, and the result
/// is closed under faces.
pub fn overlap_refinement(
    complex: &ConeComplex,
    mut extra: impl FnMut(&Cone, &Cone) -> Vec<Vec<Rat>>,
) -> Result<ConeComplex, ConeError> {
    if !complex.is_face_closed() {
        return Err(ConeError::NotFaceClosed);
    }
    let cones = complex.cones();
    let mut out = Vec::new();
    for a in cones {
        let mut keys = BTreeSet::new();
        let mut forms = Vec::new();
        for b in cones {
            if b == a || a.intersect(b).is_none() {
                continue;
            }
            for f in cut_forms(a, b).into_iter().chain(extra(a, b)) {
                if f.iter().any(|x| !x.is_zero()) && keys.insert(hyperplane_key(&f)) {
                    forms.push(f);
                }
            }
        }
        out.extend(arrangement_cells(a, &forms));
    }
    Ok(ConeComplex::new(complex.ambient(), out).face_closure())
}

pub fn chamber_subdivision(complex: &ConeComplex) -> Result<ConeComplex, ConeError> {
    chamber_subdivision_with(complex, &[])
}

/// Linearly independent matrices giving coordinates on the span of a commuting family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFrame {
    basis: Vec<RationalMatrix>,
    pivots: Vec<usize>,
    solve: RationalMatrix,
}

impl MatrixFrame {
    pub fn new(basis: Vec<RationalMatrix>) -> Result<Self, ConeError> {
        let flat: Vec<Vec<Rat>> = basis.iter().map(|m| m.entries().to_vec()).collect();
        if flat.is_empty() {
            return Ok(MatrixFrame { basis, pivots: vec![], solve: RationalMatrix::zeros(0, 0) });
        }
        let m = Matrix::from_rows(flat)?;
        if m.rank() != basis.len() {
            return Err(ConeError::DependentFrame);
        }
        let (_, pivots) = m.rref();
        let idx: Vec<usize> = (0..basis.len()).collect();
        let square = m.select(&idx, &pivots);
        let solve = square.inverse().ok_or(ConeError::DependentFrame)?;
        Ok(MatrixFrame { basis, pivots, solve })
    }

    /// Frame on the span of `mats`: its echelon basis, each scaled to a primitive integer matrix.
    pub fn spanning(mats: &[RationalMatrix]) -> Result<Self, ConeError> {
        let Some(first) = mats.first() else {
            return Self::new(vec![]);
        };
        let (r, c) = (first.rows(), first.cols());
        let flat: Vec<Vec<Rat>> = mats.iter().map(|m| m.entries().to_vec()).collect();
        let span = Subspace::span(&flat, r * c)?;
        let basis = span
            .basis()
            .iter()
            .map(|v| {
                let ints = rats(&primitive_integer(v));
                let rows: Vec<Vec<Rat>> = ints.chunks(c).map(<[Rat]>::to_vec).collect();
                Matrix::from_rows(rows).expect("rectangular")
            })
            .collect();
        Self::new(basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RationalMatrix] {
        &self.basis
    }

    pub fn coordinates(&self, m: &RationalMatrix) -> Option<Vec<Rat>> {
        if self.basis.is_empty() {
            return m.is_zero().then(Vec::new);
        }
        let x: Vec<Rat> = self.pivots.iter().map(|&p| m.entries()[p].clone()).collect();
        let c = self.solve.transpose().apply(&x);
        (self.matrix(&c) == *m).then_some(c)
    }

    pub fn matrix(&self, coords: &[Rat]) -> RationalMatrix {
        let (r, c) = self.basis.first().map_or((0, 0), |b| (b.rows(), b.cols()));
        self.basis.iter().zip(coords).fold(RationalMatrix::zeros(r, c), |acc, (b, x)| acc.add(&b.scale(x)))
    }

    pub fn cone(&self, generators: &[RationalMatrix]) -> Result<Cone, ConeError> {
        let coords = generators
            .iter()
            .map(|g| self.coordinates(g).ok_or(ConeError::OutsideFrame))
            .collect::<Result<Vec<_>, _>>()?;
        Cone::new(self.dim(), &coords)
    }

    /// Ray matrices of a cone.
    pub fn generators(&self, cone: &Cone) -> Vec<RationalMatrix> {
        cone.rays_rat().iter().map(|r| self.matrix(r)).collect()
    }
}

/// `Ad_γ σ` for an integral `γ` preserving `q`.
pub fn transport(
    gamma: &RationalMatrix,
    q: &RationalMatrix,
    frame: &MatrixFrame,
    cone: &Cone,
) -> Result<Cone, ConeError> {
    if !gamma.is_integral() {
        return Err(ConeError::NonIntegral);
    }
    if gamma.transpose().mul(q).mul(gamma) != *q {
        return Err(ConeError::FormNotPreserved);
    }
    let inv = gamma.inverse().ok_or(ConeError::FormNotPreserved)?;
    let moved: Vec<RationalMatrix> = frame.generators(cone).iter().map(|n| gamma.mul(n).mul(&inv)).collect();
    frame.cone(&moved)
}

/// JSON form `{ambient_basis: [matrices], cones: [[generator vectors]]}` with integers as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub ambient_basis: Vec<RationalMatrix>,
    pub cones: Vec<Vec<Vec<String>>>,
}

impl ComplexDocument {
    pub fn from_complex(frame: &MatrixFrame, complex: &ConeComplex) -> Self {
        let cones = complex
            .cones()
            .iter()
            .map(|c| c.rays().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect())
            .collect();
        ComplexDocument { ambient_basis: frame.basis().to_vec(), cones }
    }

    pub fn to_complex(&self) -> Result<(MatrixFrame, ConeComplex), ConeError> {
        let frame = MatrixFrame::new(self.ambient_basis.clone())?;
        let cones = self
            .cones
            .iter()
            .map(|c| {
                let gens = c
                    .iter()
                    .map(|r| r.iter().map(|s| crate::exact::parse_rat(s)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Cone::new(frame.dim(), &gens)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((frame.clone(), ConeComplex::new(frame.dim(), cones)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hrep_examples() {
        let ray = Cone::from_ints(2, &[vec![1, 0]]).unwrap();
        assert_eq!(ray.hrep().equalities, vec![ints(&[0, 1])]);
        assert_eq!(ray.hrep().strict, vec![ints(&[1, 0])]);
        let quad = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(quad.hrep().strict, vec![ints(&[0, 1]), ints(&[1, 0])]);
        let wedge = Cone::from_ints(2, &[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(wedge.hrep().strict, vec![ints(&[-1, 2]), ints(&[2, -1])]);
    }

    #[test]
    fn redundant_generators_dropped() {
        let c = Cone::from_ints(2, &[vec![1, 0], vec![1, 1], vec![0, 1], vec![2, 0]]).unwrap();
        assert_eq!(c.rays(), &[ints(&[0, 1]), ints(&[1, 0])]);
        assert_eq!(Cone::from_ints(2, &[vec![1, 0], vec![-1, 0]]), Err(ConeError::NotPointed));
    }

    #[test]
    fn intersections() {
        let quad = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let wedge = Cone::from_ints(2, &[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(quad.intersect(&quad), Some(quad.clone()));
        assert_eq!(quad.intersect(&wedge), Some(wedge.clone()));
        let x = Cone::from_ints(2, &[vec![1, 0]]).unwrap();
        let y = Cone::from_ints(2, &[vec![0, 1]]).unwrap();
        assert_eq!(x.intersect(&y), None);
        assert_eq!(x.intersect(&quad), None);
    }

    #[test]
    fn face_counts() {
        assert_eq!(Cone::from_ints(2, &[vec![1, 0]]).unwrap().faces().len(), 2);
        assert_eq!(Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap().faces().len(), 4);
        assert_eq!(Cone::from_ints(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap().faces().len(), 8);
    }

    #[test]
    fn star_at_existing_ray_is_identity() {
        let quad = Cone::from_ints(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let sub = star_subdivision(&quad, &[rat(1), rat(0)]).unwrap();
        assert_eq!(sub, ConeComplex::new(2, quad.faces()));
        assert_eq!(star_subdivision(&quad, &[rat(-1), rat(1)]), Err(ConeError::RayOutside));
    }

    #[test]
    fn frame_coordinates_roundtrip() {
        let a = RationalMatrix::from_ints(&[vec![0, 2], vec![0, 0]]);
        let b = RationalMatrix::from_ints(&[vec![0, 1], vec![0, 0]]);
        let frame = MatrixFrame::spanning(&[a.clone(), b]).unwrap();
        assert_eq!(frame.dim(), 1);
        let c = frame.coordinates(&a).unwrap();
        assert_eq!(frame.matrix(&c), a);
        assert_eq!(frame.coordinates(&RationalMatrix::from_ints(&[vec![0, 0], vec![1, 0]])), None);
    }
}
