//! Adapted symplectic bases, Levi factors, and the reductions of weight-3
//! type I and type IV degenerations to weight-1 data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{lift_vec, rat, solve_in, ExactError, Gauss, GaussianMatrix, Rat, RationalMatrix, Subspace};
use crate::hodge::{
    classify_lmhs, cone_weight_filtration, deligne_splitting, is_nilpotent_orbit, Certificate, Family, HodgeError,
    HodgeFiltration, LmhsType, NilCone, PolarizationSign, SymplecticLattice, WeightFiltration,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("weight filtration does not have the expected shape: {0}")]
    WrongShape(String),
    #[error("group element does not preserve the weight filtration")]
    NotParabolic,
    #[error("not a type I degeneration: {0}")]
    NotTypeI(String),
    #[error("reduced basis is not real: {0}")]
    RealityFailure(String),
    #[error("not a type IV degeneration: {0}")]
    NotTypeIV(String),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Shape of the weight filtration an adapted basis is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Weight1,
    TypeI,
    TypeIV,
}

/// `q[n-1-i][i] = 1`, `q[i][n-1-i] = -1` for `i < n/2`: the block antidiagonal form with
/// `Q(x_{n-1-i}, x_i) = 1`.
pub fn template_form(n: usize) -> RationalMatrix {
    let mut q = RationalMatrix::zeros(n, n);
    for i in 0..n / 2 {
        q.set(n - 1 - i, i, rat(1));
        q.set(i, n - 1 - i, rat(-1));
    }
    q
}

/// Basis in which `Q` is [`template_form`] and every weight step is a coordinate span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBasis {
    kind: BasisKind,
    /// Columns are the new basis vectors in source coordinates.
    change: RationalMatrix,
    inverse: RationalMatrix,
    labels: Vec<String>,
    weights: Vec<i32>,
    isotropic: usize,
    index_denominator: BigInt,
}

impl AdaptedBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn change(&self) -> &RationalMatrix {
        &self.change
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Centered weight of each basis vector.
    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// Size of the isotropic block `(ω₋,) e_1..e_a`.
    pub fn isotropic(&self) -> usize {
        self.isotropic
    }

    /// Smallest `d` with `d·P` and `d·P⁻¹` integral.
    pub fn index_denominator(&self) -> &BigInt {
        &self.index_denominator
    }

    pub fn vector(&self, j: usize) -> Vec<Rat> {
        self.change.col(j)
    }

    /// Endomorphism written in the adapted basis.
    pub fn to_adapted(&self, m: &RationalMatrix) -> RationalMatrix {
        self.inverse.mul(m).mul(&self.change)
    }

    pub fn from_adapted(&self, m: &RationalMatrix) -> RationalMatrix {
        self.change.mul(m).mul(&self.inverse)
    }

    pub fn coordinates(&self, v: &[Rat]) -> Vec<Rat> {
        self.inverse.apply(v)
    }

    pub fn coordinates_gauss(&self, v: &[Gauss]) -> Vec<Gauss> {
        self.inverse.to_gauss().apply(v)
    }

    /// Indices of the middle block between `ω₋` and `ω₊` (type IV only; all indices otherwise).
    pub fn quotient_indices(&self) -> Vec<usize> {
        match self.kind {
            BasisKind::TypeIV => (1..self.rank() - 1).collect(),
            _ => (0..self.rank()).collect(),
        }
    }

    /// Image of an endomorphism preserving `W_1` on `W_1 / W_{-2}`, in the middle block coordinates.
    pub fn quotient(&self, m: &RationalMatrix) -> RationalMatrix {
        let idx = self.quotient_indices();
        self.to_adapted(m).select(&idx, &idx)
    }
}

fn shape(msg: &str) -> ReduceError {
    ReduceError::WrongShape(msg.to_string())
}

/// Symplectic Gram–Schmidt adapted to an isotropic flag read off `w` (centered weights).
pub fn adapted_symplectic_basis(
    w: &WeightFiltration,
    q: &RationalMatrix,
    kind: BasisKind,
) -> Result<AdaptedBasis, ReduceError> {
    let n = q.rows();
    if w.ambient() != n || !n.is_multiple_of(2) {
        return Err(shape("ambient dimension"));
    }
    let isotropic_ok = |s: &Subspace<Rat>| s.orthogonal(q).contains_subspace(s);
    let flags: Vec<Subspace<Rat>> = match kind {
        BasisKind::Weight1 | BasisKind::TypeI => {
            let low = w.get(-1);
            if !w.get(-2).is_zero() || !w.get(1).is_full() {
                return Err(shape("weights outside [-1, 1]"));
            }
            if !isotropic_ok(&low) || low.orthogonal(q) != w.get(0) {
                return Err(shape("W_0 is not the orthogonal of W_-1"));
            }
            vec![low]
        }
        BasisKind::TypeIV => {
            if !w.get(-4).is_zero() || !w.get(3).is_full() {
                return Err(shape("weights outside [-3, 3]"));
            }
            if w.get(-3).dim() != 1 || w.get(-2) != w.get(-3) || w.get(2) != w.get(1) {
                return Err(shape("type IV steps W_-3 = W_-2 of dimension 1, W_1 = W_2"));
            }
            let low = w.get(-1);
            if !isotropic_ok(&low) || low.orthogonal(q) != w.get(0) || w.get(-3).orthogonal(q) != w.get(1) {
                return Err(shape("steps are not orthogonal pairs"));
            }
            vec![w.get(-3), low]
        }
    };
    let mut lower: Vec<Vec<Rat>> = Vec::new();
    let mut level_weights: Vec<i32> = Vec::new();
    let mut prev = Subspace::zero(n);
    let step_weights: &[i32] = if kind == BasisKind::TypeIV { &[-3, -1] } else { &[-1] };
    for (step, &wt) in flags.iter().zip(step_weights) {
        for v in prev.complement_in(step) {
            lower.push(v);
            level_weights.push(wt);
        }
        prev = step.clone();
    }
    let m = lower.len();
    let top = prev;
    let candidates = top.orthogonal(q).complement_in(&Subspace::full(n));
    let pairing =
        RationalMatrix::from_rows(candidates.iter().map(|c| lower.iter().map(|u| q.pair(c, u)).collect()).collect())
            .map_err(ReduceError::from)?;
    let duals_raw: Vec<Vec<Rat>> = if m == 0 {
        Vec::new()
    } else {
        let inv = pairing.inverse().ok_or_else(|| shape("degenerate pairing on the isotropic flag"))?;
        (0..m)
            .map(|i| {
                (0..m).fold(vec![rat(0); n], |acc, k| {
                    acc.iter().zip(&candidates[k]).map(|(a, c)| a + inv.get(i, k) * c).collect()
                })
            })
            .collect()
    };
    let half = Rat::new(1.into(), 2.into());
    let duals: Vec<Vec<Rat>> = duals_raw
        .iter()
        .map(|d| {
            let mut out = d.clone();
            for (j, dj) in duals_raw.iter().enumerate() {
                let c = &half * q.pair(d, dj);
                for (o, u) in out.iter_mut().zip(&lower[j]) {
                    *o += &c * u;
                }
            }
            out
        })
        .collect();
    let mut outer: Vec<Vec<Rat>> = lower.clone();
    outer.extend(duals.iter().cloned());
    let mut rest = Subspace::span(&outer, n)?.orthogonal(q).basis();
    let (mut fs, mut fups) = (Vec::new(), Vec::new());
    while !rest.is_empty() {
        let v = rest[0].clone();
        let (b, s) = rest
            .iter()
            .rev()
            .find_map(|b| {
                let s = q.pair(b, &v);
                (!s.is_zero()).then(|| (b.clone(), s))
            })
            .ok_or_else(|| shape("middle block is degenerate"))?;
        let w_vec: Vec<Rat> = b.iter().map(|x| x / &s).collect();
        let projected: Vec<Vec<Rat>> = rest
            .iter()
            .map(|x| {
                let (a, bb) = (q.pair(x, &w_vec), q.pair(x, &v));
                x.iter().zip(&v).zip(&w_vec).map(|((xi, vi), wi)| xi + &a * vi - &bb * wi).collect()
            })
            .collect();
        fs.push(v);
        fups.push(w_vec);
        rest = Subspace::span(&projected, n)?.basis();
    }
    let mut cols = lower.clone();
    cols.extend(fs.iter().cloned());
    cols.extend(fups.iter().rev().cloned());
    cols.extend(duals.iter().rev().cloned());
    let change = RationalMatrix::from_cols(&cols, n)?;
    if change.transpose().mul(q).mul(&change) != template_form(n) {
        return Err(shape("Gram–Schmidt did not reach the template form"));
    }
    let inverse = change.inverse().ok_or(ExactError::Singular)?;
    let k = fs.len();
    let mut labels = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let a = if kind == BasisKind::TypeIV { m - 1 } else { m };
    if kind == BasisKind::TypeIV {
        labels.push("ω₋".to_string());
    }
    labels.extend((1..=a).map(|i| format!("e_{i}")));
    labels.extend((1..=k).map(|i| format!("f_{i}")));
    labels.extend((1..=k).rev().map(|i| format!("f^{i}")));
    labels.extend((1..=a).rev().map(|i| format!("e^{i}")));
    if kind == BasisKind::TypeIV {
        labels.push("ω₊".to_string());
    }
    weights.extend(level_weights.iter().copied());
    weights.extend(std::iter::repeat_n(0, 2 * k));
    weights.extend(level_weights.iter().rev().map(|w| -w));
    let index_denominator = change.denominator().lcm(&inverse.denominator());
    Ok(AdaptedBasis { kind, change, inverse, labels, weights, isotropic: m, index_denominator })
}

/// Factors `γ = levi · unipotent` of a parabolic element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeviPair {
    pub levi: RationalMatrix,
    pub unipotent: RationalMatrix,
}

pub fn levi_decompose(gamma: &RationalMatrix, basis: &AdaptedBasis) -> Result<LeviPair, ReduceError> {
    let g = basis.to_adapted(gamma);
    let wt = basis.weights();
    let n = basis.rank();
    let mut levi = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = g.get(i, j);
            if wt[i] > wt[j] && !x.is_zero() {
                return Err(ReduceError::NotParabolic);
            }
            if wt[i] == wt[j] {
                levi.set(i, j, x.clone());
            }
        }
    }
    let unipotent = levi.inverse().ok_or(ReduceError::NotParabolic)?.mul(&g);
    Ok(LeviPair { levi: basis.from_adapted(&levi), unipotent: basis.from_adapted(&unipotent) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    TypeI,
    TypeIV,
}

/// A weight-1 scenario produced from weight-3 data.
#[derive(Debug, Clone)]
pub struct ReducedScenario {
    pub kind: ReductionKind,
    /// `None` for the degenerate `a = 0` type I case.
    pub lattice: Option<SymplecticLattice>,
    /// Reduced basis vectors in source coordinates (representatives for a quotient).
    pub basis: Vec<Vec<Rat>>,
    pub generators: Vec<RationalMatrix>,
    pub filtration: Option<HodgeFiltration>,
    pub witnesses: Vec<RationalMatrix>,
    pub index_denominator: BigInt,
    pub classification: Option<LmhsType>,
    /// Nilpotent-orbit test of the reduced triple with the standard sign.
    pub orbit: Certificate,
}

impl ReducedScenario {
    pub fn cone(&self) -> Result<NilCone, HodgeError> {
        NilCone::new(self.generators.clone())
    }
}

fn weight3_split(
    lattice: &SymplecticLattice,
    cone: &NilCone,
    f: &HodgeFiltration,
) -> Result<(WeightFiltration, crate::hodge::DeligneSplitting, LmhsType), ReduceError> {
    let w = if cone.is_empty() {
        WeightFiltration::from_steps(0, vec![Subspace::full(lattice.rank())])?
    } else {
        cone_weight_filtration(cone)?
    };
    let split = deligne_splitting(&w.shift(3), f)?;
    let ty = crate::hodge::classify_table(&split.table(), lattice)?;
    Ok((w, split, ty))
}

fn gauss_coords(basis: &[Vec<Rat>], v: &[Gauss]) -> Option<Vec<Gauss>> {
    let lifted: Vec<Vec<Gauss>> = basis.iter().map(|b| lift_vec(b)).collect();
    solve_in(&lifted, v)
}

fn induced_matrix(basis: &[Vec<Rat>], m: &RationalMatrix) -> Result<RationalMatrix, ReduceError> {
    let cols: Vec<Vec<Rat>> = basis
        .iter()
        .map(|b| solve_in(basis, &m.apply(b)).ok_or_else(|| shape("operator does not preserve the reduced space")))
        .collect::<Result<_, _>>()?;
    Ok(RationalMatrix::from_cols(&cols, basis.len())?)
}

fn reduced_orbit(
    lattice: &SymplecticLattice,
    gens: &[RationalMatrix],
    f: &HodgeFiltration,
) -> (Option<LmhsType>, Certificate) {
    match NilCone::new(gens.to_vec()) {
        Ok(c) => (classify_lmhs(lattice, &c, f).ok(), is_nilpotent_orbit(lattice, &c, f, PolarizationSign::Standard)),
        Err(e) => {
            let mut cert = Certificate::default();
            cert.push("reduced cone", false, e.to_string());
            (None, cert)
        }
    }
}

/// Restriction of a weight-3 type I(a) degeneration to `H_2 = I^{2,2} ⊕ I^{1,1}` with the real
/// basis `(β_1..β_a, e_a..e_1)`, `β_i = Re α_i`.
pub fn type_i_restrict(
    lattice: &SymplecticLattice,
    cone: &NilCone,
    f: &HodgeFiltration,
    witnesses: &[RationalMatrix],
) -> Result<ReducedScenario, ReduceError> {
    if lattice.weight() != 3 {
        return Err(ReduceError::NotTypeI(format!("weight {}", lattice.weight())));
    }
    let (w, split, ty) = weight3_split(lattice, cone, f)?;
    let a = match ty {
        LmhsType::I(a) => a,
        LmhsType::Pure if split.h(3, 0) == 1 => 0,
        other => return Err(ReduceError::NotTypeI(other.to_string())),
    };
    if a == 0 {
        return Ok(ReducedScenario {
            kind: ReductionKind::TypeI,
            lattice: None,
            basis: Vec::new(),
            generators: Vec::new(),
            filtration: None,
            witnesses: Vec::new(),
            index_denominator: BigInt::one(),
            classification: None,
            orbit: Certificate::default(),
        });
    }
    let q = lattice.q();
    let n = lattice.rank();
    let basis = adapted_symplectic_basis(&w, q, BasisKind::TypeI)?;
    let e_low: Vec<Vec<Rat>> = (0..a).map(|j| basis.vector(j)).collect();
    let e_up: Vec<Vec<Rat>> = (0..a).map(|i| basis.vector(n - 1 - i)).collect();
    let i22 = split.get(2, 2);
    let h2 = i22.sum(&split.get(1, 1));
    let w3: Vec<Vec<Gauss>> = w.get(0).to_gauss().basis();
    let mut betas = Vec::with_capacity(a);
    for up in &e_up {
        let mut gens = i22.basis();
        gens.extend(w3.iter().cloned());
        let c = solve_in(&gens, &lift_vec(up))
            .ok_or_else(|| ReduceError::NotTypeI("I^{2,2} misses a dual vector".into()))?;
        let alpha: Vec<Gauss> = (0..n)
            .map(|t| (0..i22.dim()).fold(Gauss::zero(), |acc, k| acc + c[k].clone() * gens[k][t].clone()))
            .collect();
        let beta: Vec<Rat> = alpha.iter().map(|x| x.re.clone()).collect();
        if !h2.contains(&lift_vec(&beta)) {
            return Err(ReduceError::RealityFailure("Re α leaves H_2".into()));
        }
        betas.push(beta);
    }
    let mut reduced_basis = betas.clone();
    reduced_basis.extend(e_low.iter().rev().cloned());
    let gram = RationalMatrix::from_rows(
        reduced_basis.iter().map(|x| reduced_basis.iter().map(|y| q.pair(x, y)).collect()).collect(),
    )?;
    let mut standard = RationalMatrix::zeros(2 * a, 2 * a);
    for i in 0..a {
        standard.set(i, 2 * a - 1 - i, rat(1));
        standard.set(2 * a - 1 - i, i, rat(-1));
    }
    if gram != standard {
        return Err(ReduceError::RealityFailure(format!("form on the reduced basis is {gram:?}")));
    }
    let generators: Vec<RationalMatrix> =
        cone.generators().iter().map(|m| induced_matrix(&reduced_basis, m)).collect::<Result<_, _>>()?;
    let f1: Vec<Vec<Gauss>> = f
        .get(2)
        .intersect(&h2)
        .basis()
        .iter()
        .map(|v| gauss_coords(&reduced_basis, v).ok_or_else(|| shape("F^2 ∩ H_2 outside the reduced span")))
        .collect::<Result<_, _>>()?;
    let filtration = HodgeFiltration::new(0, vec![Subspace::full(2 * a), Subspace::span(&f1, 2 * a)?])?;
    let mut identified = e_up.clone();
    identified.extend(e_low.iter().rev().cloned());
    let reduced_witnesses: Vec<RationalMatrix> = witnesses
        .iter()
        .map(|g| induced_matrix(&identified, &levi_decompose(g, &basis)?.levi))
        .collect::<Result<_, _>>()?;
    let reduced_lattice = SymplecticLattice::new(standard, 1, vec![a, a])?;
    let (classification, orbit) = reduced_orbit(&reduced_lattice, &generators, &filtration);
    let index_denominator = reduced_basis.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    Ok(ReducedScenario {
        kind: ReductionKind::TypeI,
        lattice: Some(reduced_lattice),
        basis: reduced_basis,
        generators,
        filtration: Some(filtration),
        witnesses: reduced_witnesses,
        index_denominator,
        classification,
        orbit,
    })
}

/// Quotient `W_1 / W_{-2}` of a weight-3 type IV(a) degeneration, represented by the middle
/// block of the adapted basis.
pub fn type_iv_quotient(
    lattice: &SymplecticLattice,
    cone: &NilCone,
    f: &HodgeFiltration,
    witnesses: &[RationalMatrix],
) -> Result<ReducedScenario, ReduceError> {
    if lattice.weight() != 3 {
        return Err(ReduceError::NotTypeIV(format!("weight {}", lattice.weight())));
    }
    let (w, _, ty) = weight3_split(lattice, cone, f)?;
    if ty.family() != Family::IV {
        return Err(ReduceError::NotTypeIV(ty.to_string()));
    }
    let basis = adapted_symplectic_basis(&w, lattice.q(), BasisKind::TypeIV)?;
    let n = lattice.rank();
    let h = n / 2 - 1;
    let idx = basis.quotient_indices();
    let generators: Vec<RationalMatrix> = cone.generators().iter().map(|m| basis.quotient(m)).collect();
    let form = basis.to_adapted_form(lattice.q()).select(&idx, &idx);
    let f2w1 = f.get(2).intersect(&w.get(1).to_gauss());
    let inv = basis.inverse.to_gauss();
    let f1: Vec<Vec<Gauss>> = f2w1
        .basis()
        .iter()
        .map(|v| {
            let c = inv.apply(v);
            idx.iter().map(|&i| c[i].clone()).collect()
        })
        .collect();
    let f1 = Subspace::span(&f1, 2 * h)?;
    if f1.dim() != h {
        return Err(ReduceError::NotTypeIV(format!("induced F^1 has dimension {}", f1.dim())));
    }
    let filtration = HodgeFiltration::new(0, vec![Subspace::full(2 * h), f1])?;
    let reduced_witnesses: Vec<RationalMatrix> =
        witnesses.iter().map(|g| levi_decompose(g, &basis).map(|_| basis.quotient(g))).collect::<Result<_, _>>()?;
    let reduced_lattice = SymplecticLattice::new(form, 1, vec![h, h])?;
    let (classification, orbit) = reduced_orbit(&reduced_lattice, &generators, &filtration);
    Ok(ReducedScenario {
        kind: ReductionKind::TypeIV,
        lattice: Some(reduced_lattice),
        basis: idx.iter().map(|&i| basis.vector(i)).collect(),
        generators,
        filtration: Some(filtration),
        witnesses: reduced_witnesses,
        index_denominator: basis.index_denominator().clone(),
        classification,
        orbit,
    })
}

impl AdaptedBasis {
    /// Gram matrix `Pᵀ Q P`.
    pub fn to_adapted_form(&self, q: &RationalMatrix) -> RationalMatrix {
        self.change.transpose().mul(q).mul(&self.change)
    }
}

/// Evidence for two type IV cones with equal quotient images: `D = N_1 - N_2` vanishes on the
/// quotient, and the brackets `D N_3 v`, `N_3 D v` are compared on a top-weight vector `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketCertificate {
    pub difference: RationalMatrix,
    pub top_vector: Vec<String>,
    pub difference_after: Vec<String>,
    pub difference_before: Vec<String>,
    pub quotient_vanishes: bool,
    pub fires: bool,
}

pub fn bracket_certificate(
    basis: &AdaptedBasis,
    n1: &RationalMatrix,
    n2: &RationalMatrix,
    n3: &RationalMatrix,
    v: &[Gauss],
) -> BracketCertificate {
    let d = n1.sub(n2);
    let quotient_vanishes = basis.quotient(&d).is_zero();
    let (dg, n3g): (GaussianMatrix, GaussianMatrix) = (d.to_gauss(), n3.to_gauss());
    let after = dg.apply(&n3g.apply(v));
    let before = n3g.apply(&dg.apply(v));
    let strs = |x: &[Gauss]| x.iter().map(ToString::to_string).collect::<Vec<_>>();
    BracketCertificate {
        fires: quotient_vanishes && !d.is_zero() && after != before,
        difference: d,
        top_vector: strs(v),
        difference_after: strs(&after),
        difference_before: strs(&before),
        quotient_vanishes,
    }
}

/// `g W_k = W_k` for every `k`.
pub fn preserves_filtration(w: &WeightFiltration, g: &RationalMatrix) -> bool {
    (w.lo()..=w.hi()).all(|k| w.get(k).image(g) == w.get(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cy3_i1, cy3_iv1};
    use crate::sample::siegel_lattice;

    #[test]
    fn template_matches_siegel_form() {
        for g in 1..4 {
            assert_eq!(template_form(2 * g), *siegel_lattice(g).q());
        }
    }

    #[test]
    fn adapted_fixtures_need_no_change() {
        for (s, kind) in [(cy3_i1(), BasisKind::TypeI), (cy3_iv1(), BasisKind::TypeIV)] {
            let w = cone_weight_filtration(&s.cone).unwrap();
            let b = adapted_symplectic_basis(&w, s.lattice.q(), kind).unwrap();
            assert_eq!(*b.change(), RationalMatrix::identity(4), "{}", s.name);
            assert_eq!(*b.index_denominator(), BigInt::one());
        }
        let s = cy3_iv1();
        let w = cone_weight_filtration(&s.cone).unwrap();
        let b = adapted_symplectic_basis(&w, s.lattice.q(), BasisKind::TypeIV).unwrap();
        assert_eq!(b.labels(), ["ω₋", "e_1", "e^1", "ω₊"]);
        assert_eq!(b.weights(), [-3, -1, 1, 3]);
    }

    #[test]
    fn wrong_shape_is_reported() {
        let s = cy3_iv1();
        let w = cone_weight_filtration(&s.cone).unwrap();
        assert!(matches!(
            adapted_symplectic_basis(&w, s.lattice.q(), BasisKind::TypeI),
            Err(ReduceError::WrongShape(_))
        ));
    }
}
