//! Weight filtrations, Hodge filtrations, Deligne splittings and the
//! nilpotent-orbit test.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    conj_vec, exp_nilpotent, frac, rat, ExactError, Gauss, GaussianMatrix, Matrix, Rat, RationalMatrix, Subspace,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HodgeError {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("matrix {index} is not nilpotent")]
    NotNilpotent { index: usize },
    #[error("matrix {index} does not preserve the form (Q·N + Nᵀ·Q ≠ 0)")]
    NotLieElement { index: usize },
    #[error("generators {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("cone generators are linearly dependent")]
    Degenerate,
    #[error("weight filtration differs between interior points of the cone")]
    InteriorDisagreement,
    #[error("not a mixed Hodge structure: {0}")]
    NotMhs(String),
    #[error("Hodge-Deligne diagram matches no known template: {0}")]
    UnknownDiagram(String),
    #[error("invalid Hodge filtration: {0}")]
    BadFiltration(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Sign convention used in the positivity part of the polarization test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationSign {
    /// `Q(C v, N^k v̄) > 0` on primitive parts.
    #[default]
    Standard,
    /// Same test with `-Q`.
    Negated,
}

/// Integral lattice with alternating form and the Hodge numbers of the pure structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticLattice {
    q: RationalMatrix,
    weight: i32,
    hodge: Vec<usize>,
}

impl SymplecticLattice {
    /// `hodge[p] = h^{p, weight-p}`.
    pub fn new(q: RationalMatrix, weight: i32, hodge: Vec<usize>) -> Result<Self, HodgeError> {
        let bad = |m: &str| Err(HodgeError::Lattice(m.to_string()));
        if !q.is_square() || q.rows() == 0 || !q.rows().is_multiple_of(2) {
            return bad("Q must be a nonempty square matrix of even size");
        }
        if !q.is_integral() {
            return bad("Q integrality");
        }
        if q.transpose() != q.neg() {
            return bad("Q antisymmetry");
        }
        if q.det().is_zero() {
            return bad("Q nondegeneracy");
        }
        if weight < 0 || hodge.len() != weight as usize + 1 {
            return bad("Hodge numbers must list h^{p,l-p} for p = 0..=l");
        }
        if hodge.iter().sum::<usize>() != q.rows() {
            return bad("Hodge numbers must sum to the rank");
        }
        if hodge.iter().rev().ne(hodge.iter()) {
            return bad("Hodge symmetry");
        }
        Ok(SymplecticLattice { q, weight, hodge })
    }

    pub fn rank(&self) -> usize {
        self.q.rows()
    }

    pub fn q(&self) -> &RationalMatrix {
        &self.q
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn hodge_numbers(&self) -> &[usize] {
        &self.hodge
    }

    pub fn h(&self, p: i32) -> usize {
        if p < 0 || p > self.weight {
            0
        } else {
            self.hodge[p as usize]
        }
    }

    /// Expected `dim F^p` for the pure structure.
    pub fn f_dim(&self, p: i32) -> usize {
        (p.max(0)..=self.weight).map(|r| self.h(r)).sum()
    }

    pub fn is_lie(&self, n: &RationalMatrix) -> bool {
        self.q.mul(n).add(&n.transpose().mul(&self.q)).is_zero()
    }

    pub fn preserves(&self, g: &RationalMatrix) -> bool {
        g.transpose().mul(&self.q).mul(g) == self.q
    }

    pub fn check_nilpotent(&self, index: usize, n: &RationalMatrix) -> Result<(), HodgeError> {
        if n.rows() != self.rank() || n.cols() != self.rank() {
            return Err(ExactError::DimensionMismatch { expected: self.rank(), found: n.rows() }.into());
        }
        if !n.is_nilpotent() {
            return Err(HodgeError::NotNilpotent { index });
        }
        if !self.is_lie(n) {
            return Err(HodgeError::NotLieElement { index });
        }
        Ok(())
    }

    pub fn check_cone(&self, cone: &NilCone) -> Result<(), HodgeError> {
        cone.generators().iter().enumerate().try_for_each(|(i, n)| self.check_nilpotent(i, n))
    }

    /// Membership in the compact dual: step dimensions and isotropy `Q(F^p, F^{l+1-p}) = 0`.
    pub fn check_flag(&self, f: &HodgeFiltration) -> Result<(), HodgeError> {
        if f.ambient() != self.rank() {
            return Err(HodgeError::BadFiltration("ambient dimension".into()));
        }
        for p in 0..=self.weight + 1 {
            if f.get(p).dim() != self.f_dim(p) {
                return Err(HodgeError::BadFiltration(format!(
                    "dim F^{p} = {} but the Hodge numbers require {}",
                    f.get(p).dim(),
                    self.f_dim(p)
                )));
            }
        }
        let qg = self.q.to_gauss();
        for p in 0..=self.weight + 1 {
            let a = f.get(p);
            let b = f.get(self.weight + 1 - p);
            for x in a.basis() {
                for y in b.basis() {
                    if !qg.pair(&x, &y).is_zero() {
                        return Err(HodgeError::BadFiltration(format!("Q(F^{p}, F^{}) ≠ 0", self.weight + 1 - p)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Relatively open cone spanned by commuting nilpotent matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilCone {
    generators: Vec<RationalMatrix>,
    dim: usize,
}

impl NilCone {
    pub fn new(generators: Vec<RationalMatrix>) -> Result<Self, HodgeError> {
        let dim = generators.first().map_or(0, |g| g.rows());
        for (i, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != dim {
                return Err(ExactError::DimensionMismatch { expected: dim, found: g.rows() }.into());
            }
            if !g.is_nilpotent() {
                return Err(HodgeError::NotNilpotent { index: i });
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutator(&generators[j]).is_zero() {
                    return Err(HodgeError::NotCommuting(i, j));
                }
            }
        }
        let flat: Vec<Vec<Rat>> = generators.iter().map(|g| g.entries().to_vec()).collect();
        if !flat.is_empty() && Matrix::from_rows(flat)?.rank() != generators.len() {
            return Err(HodgeError::Degenerate);
        }
        Ok(NilCone { generators, dim })
    }

    pub fn ray(n: RationalMatrix) -> Result<Self, HodgeError> {
        Self::new(vec![n])
    }

    pub fn generators(&self) -> &[RationalMatrix] {
        &self.generators
    }

    /// Canonical interior point: the generator sum.
    pub fn interior(&self) -> RationalMatrix {
        self.combination(&vec![rat(1); self.generators.len()])
    }

    pub fn combination(&self, coeffs: &[Rat]) -> RationalMatrix {
        self.generators
            .iter()
            .zip(coeffs)
            .fold(RationalMatrix::zeros(self.dim, self.dim), |acc, (g, c)| acc.add(&g.scale(c)))
    }

    pub fn face(&self, indices: &[usize]) -> NilCone {
        NilCone { generators: indices.iter().map(|&i| self.generators[i].clone()).collect(), dim: self.dim }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.dim
    }
}

/// Increasing filtration `W_k`, stored from its lowest nonzero step up to the first full step.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightFiltration {
    ambient: usize,
    lo: i32,
    steps: Vec<Subspace<Rat>>,
}

impl fmt::Debug for WeightFiltration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[")?;
        for (j, s) in self.steps.iter().enumerate() {
            write!(f, "{}:{} ", self.lo + j as i32, s.dim())?;
        }
        write!(f, "]")
    }
}

impl WeightFiltration {
    /// Build from consecutive steps `W_lo ⊆ W_{lo+1} ⊆ …`; the last step must be the whole space.
    pub fn from_steps(lo: i32, steps: Vec<Subspace<Rat>>) -> Result<Self, HodgeError> {
        let ambient = steps.first().map(Subspace::ambient).ok_or_else(|| HodgeError::BadFiltration("empty".into()))?;
        for w in steps.windows(2) {
            if !w[1].contains_subspace(&w[0]) {
                return Err(HodgeError::BadFiltration("weight filtration not increasing".into()));
            }
        }
        if !steps.last().unwrap().is_full() {
            return Err(HodgeError::BadFiltration("weight filtration not exhaustive".into()));
        }
        Ok(Self::normalized(ambient, lo, steps))
    }

    fn normalized(ambient: usize, mut lo: i32, mut steps: Vec<Subspace<Rat>>) -> Self {
        while steps.len() > 1 && steps[0].is_zero() {
            steps.remove(0);
            lo += 1;
        }
        if let Some(k) = steps.iter().position(Subspace::is_full) {
            steps.truncate(k + 1);
        }
        WeightFiltration { ambient, lo, steps }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Lowest index with `W_k ≠ 0`.
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Lowest index with `W_k = H`.
    pub fn hi(&self) -> i32 {
        self.lo + self.steps.len() as i32 - 1
    }

    pub fn get(&self, k: i32) -> Subspace<Rat> {
        if k < self.lo {
            Subspace::zero(self.ambient)
        } else if k > self.hi() {
            Subspace::full(self.ambient)
        } else {
            self.steps[(k - self.lo) as usize].clone()
        }
    }

    /// `W[-l]`, i.e. the filtration with `W[-l]_k = W_{k-l}`.
    pub fn shift(&self, l: i32) -> Self {
        WeightFiltration { ambient: self.ambient, lo: self.lo + l, steps: self.steps.clone() }
    }

    pub fn gr_dim(&self, k: i32) -> usize {
        self.get(k).dim() - self.get(k - 1).dim()
    }

    pub fn transform(&self, g: &RationalMatrix) -> Self {
        let steps = self.steps.iter().map(|s| s.image(g)).collect();
        Self::normalized(self.ambient, self.lo, steps)
    }
}

/// Jacobson–Morozov filtration of a nilpotent matrix, centered at 0:
/// `W_k = Σ_{j ≥ max(0,-k)} ker N^{k+j+1} ∩ Im N^j`.
pub fn jm_weight_filtration(n: &RationalMatrix) -> WeightFiltration {
    let dim = n.rows();
    let order = n.nilpotency_order().expect("jm_weight_filtration needs a nilpotent matrix");
    let mu = order.saturating_sub(1) as i32;
    let powers: Vec<RationalMatrix> = (0..=order).map(|k| n.pow(k)).collect();
    let kernels: Vec<Subspace<Rat>> = powers.iter().map(|p| Subspace::zero(dim).preimage(p)).collect();
    let images: Vec<Subspace<Rat>> = powers.iter().map(|p| Subspace::full(dim).image(p)).collect();
    let steps = (-mu..=mu)
        .map(|k| {
            let mut acc = Subspace::zero(dim);
            for j in (-k).max(0)..=mu {
                let r = ((k + j + 1) as usize).min(order);
                acc = acc.sum(&kernels[r].intersect(&images[j as usize]));
            }
            acc
        })
        .collect();
    WeightFiltration::normalized(dim, -mu, steps)
}

fn random_positive(rng: &mut impl Rng) -> Rat {
    frac(rng.gen_range(1..=12), rng.gen_range(1..=7))
}

/// Weight filtration of a cone: the filtration at the generator sum, cross-checked at
/// `samples` random interior points drawn from `rng`.
pub fn cone_weight_filtration_with(
    cone: &NilCone,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<WeightFiltration, HodgeError> {
    if cone.is_empty() {
        return Ok(WeightFiltration::normalized(cone.ambient(), 0, vec![Subspace::full(cone.ambient())]));
    }
    let w = jm_weight_filtration(&cone.interior());
    for _ in 0..samples {
        let coeffs: Vec<Rat> = (0..cone.len()).map(|_| random_positive(rng)).collect();
        if jm_weight_filtration(&cone.combination(&coeffs)) != w {
            return Err(HodgeError::InteriorDisagreement);
        }
    }
    Ok(w)
}

/// Weight filtration of a cone with three seeded interior cross-checks.
pub fn cone_weight_filtration(cone: &NilCone) -> Result<WeightFiltration, HodgeError> {
    cone_weight_filtration_with(cone, &mut ChaCha8Rng::seed_from_u64(0x5eed), 3)
}

/// Decreasing filtration `F^p` over ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HodgeFiltration {
    ambient: usize,
    first: i32,
    steps: Vec<Subspace<Gauss>>,
}

impl fmt::Debug for HodgeFiltration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F[")?;
        for (j, s) in self.steps.iter().enumerate() {
            write!(f, "{}:{:?} ", self.first + j as i32, s.basis())?;
        }
        write!(f, "]")
    }
}

impl HodgeFiltration {
    /// Build from `F^first ⊇ F^{first+1} ⊇ …`; steps below `first` are the whole space and
    /// steps past the list are zero.
    pub fn new(first: i32, steps: Vec<Subspace<Gauss>>) -> Result<Self, HodgeError> {
        let ambient = steps.first().map(Subspace::ambient).ok_or_else(|| HodgeError::BadFiltration("empty".into()))?;
        if !steps[0].is_full() {
            return Err(HodgeError::BadFiltration("first step must be the whole space".into()));
        }
        for w in steps.windows(2) {
            if !w[0].contains_subspace(&w[1]) {
                return Err(HodgeError::BadFiltration("Hodge filtration not decreasing".into()));
            }
        }
        Ok(Self::normalized(ambient, first, steps))
    }

    /// Convenience constructor from spanning vectors of `F^first, F^{first+1}, …`.
    pub fn from_spans(first: i32, spans: &[Vec<Vec<Gauss>>], ambient: usize) -> Result<Self, HodgeError> {
        let steps = spans.iter().map(|s| Subspace::span(s, ambient)).collect::<Result<Vec<_>, _>>()?;
        Self::new(first, steps)
    }

    fn normalized(ambient: usize, mut first: i32, mut steps: Vec<Subspace<Gauss>>) -> Self {
        while steps.len() > 1 && steps[1].is_full() {
            steps.remove(0);
            first += 1;
        }
        while steps.len() > 1 && steps.last().unwrap().is_zero() {
            steps.pop();
        }
        HodgeFiltration { ambient, first, steps }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Largest `p` with `F^p = H`.
    pub fn first(&self) -> i32 {
        self.first
    }

    /// Largest `p` with `F^p ≠ 0`.
    pub fn last(&self) -> i32 {
        self.first + self.steps.len() as i32 - 1
    }

    pub fn get(&self, p: i32) -> Subspace<Gauss> {
        if p <= self.first {
            Subspace::full(self.ambient)
        } else if p > self.last() {
            Subspace::zero(self.ambient)
        } else {
            self.steps[(p - self.first) as usize].clone()
        }
    }

    pub fn conj_get(&self, p: i32) -> Subspace<Gauss> {
        self.get(p).conj()
    }

    pub fn transform(&self, g: &GaussianMatrix) -> Self {
        let steps = self.steps.iter().map(|s| s.image(g)).collect();
        Self::normalized(self.ambient, self.first, steps)
    }

    pub fn transform_rational(&self, g: &RationalMatrix) -> Self {
        self.transform(&g.to_gauss())
    }

    /// Steps `F^first, …, F^last` as basis lists.
    pub fn spans(&self) -> Vec<Vec<Vec<Gauss>>> {
        self.steps.iter().map(Subspace::basis).collect()
    }
}

/// `exp(i·y·N)` as a Gaussian matrix.
pub fn exp_imaginary(n: &RationalMatrix, y: &Rat) -> GaussianMatrix {
    let m = n.to_gauss().scale(&Gauss::new(Rat::zero(), y.clone()));
    exp_nilpotent(&m).expect("nilpotent input")
}

/// Bigraded decomposition `I^{p,q}` of a mixed Hodge structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeligneSplitting {
    ambient: usize,
    comps: BTreeMap<(i32, i32), Subspace<Gauss>>,
}

impl DeligneSplitting {
    pub fn get(&self, p: i32, q: i32) -> Subspace<Gauss> {
        self.comps.get(&(p, q)).cloned().unwrap_or_else(|| Subspace::zero(self.ambient))
    }

    pub fn h(&self, p: i32, q: i32) -> usize {
        self.comps.get(&(p, q)).map_or(0, Subspace::dim)
    }

    /// Nonzero `h^{p,q}`.
    pub fn table(&self) -> BTreeMap<(i32, i32), usize> {
        self.comps.iter().map(|(&k, s)| (k, s.dim())).collect()
    }

    pub fn components(&self) -> &BTreeMap<(i32, i32), Subspace<Gauss>> {
        &self.comps
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
}

/// Deligne's `I^{p,q} = F^p ∩ W_{p+q} ∩ (F̄^q ∩ W_{p+q} + Σ_{j≥1} F̄^{q-j} ∩ W_{p+q-j-1})`.
pub fn deligne_splitting(w: &WeightFiltration, f: &HodgeFiltration) -> Result<DeligneSplitting, HodgeError> {
    let n = w.ambient();
    if f.ambient() != n {
        return Err(ExactError::DimensionMismatch { expected: n, found: f.ambient() }.into());
    }
    let wg = |k: i32| w.get(k).to_gauss();
    let mut comps = BTreeMap::new();
    for p in f.first()..=f.last() {
        for q in f.first()..=f.last() {
            let k = p + q;
            if k < w.lo() {
                continue;
            }
            let a = f.get(p).intersect(&wg(k));
            if a.is_zero() {
                continue;
            }
            let mut b = f.conj_get(q).intersect(&wg(k));
            let mut j = 1;
            while k - j > w.lo() {
                b = b.sum(&f.conj_get(q - j).intersect(&wg(k - j - 1)));
                j += 1;
            }
            let i = a.intersect(&b);
            if !i.is_zero() {
                comps.insert((p, q), i);
            }
        }
    }
    let split = DeligneSplitting { ambient: n, comps };
    let sum_of = |pred: &dyn Fn(i32, i32) -> bool| {
        let mut acc = Subspace::zero(n);
        let mut dims = 0;
        for (&(p, q), s) in &split.comps {
            if pred(p, q) {
                acc = acc.sum(s);
                dims += s.dim();
            }
        }
        (acc, dims)
    };
    let (all, dims) = sum_of(&|_, _| true);
    if !all.is_full() || dims != n {
        return Err(HodgeError::NotMhs(format!("components span {} of {} dimensions", all.dim(), n)));
    }
    for k in w.lo()..=w.hi() {
        let (s, d) = sum_of(&|p, q| p + q <= k);
        if s != wg(k) || d != s.dim() {
            return Err(HodgeError::NotMhs(format!("W_{k} is not the sum of I^{{p,q}} with p+q ≤ {k}")));
        }
    }
    for p in f.first()..=f.last() {
        let (s, d) = sum_of(&|r, _| r >= p);
        if s != f.get(p) || d != s.dim() {
            return Err(HodgeError::NotMhs(format!("F^{p} is not the sum of I^{{r,s}} with r ≥ {p}")));
        }
    }
    Ok(split)
}

/// One named sub-check of a decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// List of sub-checks; the decision holds iff every sub-check passed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }
}

/// Exact test that a Hermitian Gaussian matrix is positive definite via leading principal minors.
pub fn hermitian_positive_definite(h: &GaussianMatrix) -> Result<(), String> {
    if h.conj().transpose() != *h {
        return Err("Gram matrix is not Hermitian".into());
    }
    for k in 1..=h.rows() {
        let idx: Vec<usize> = (0..k).collect();
        let m = h.select(&idx, &idx).det();
        if !m.im.is_zero() || !m.re.is_positive() {
            return Err(format!("leading minor {k} is {m}"));
        }
    }
    Ok(())
}

pub fn transversal(n: &RationalMatrix, f: &HodgeFiltration) -> bool {
    let ng = n.to_gauss();
    (f.first()..=f.last()).all(|p| f.get(p - 1).contains_subspace(&f.get(p).image(&ng)))
}

/// Polarized mixed Hodge structure test for `(W, F, N)` of weight `l`.
pub fn is_polarized_mhs(
    lattice: &SymplecticLattice,
    w: &WeightFiltration,
    f: &HodgeFiltration,
    n: &RationalMatrix,
    sign: PolarizationSign,
) -> Certificate {
    let l = lattice.weight();
    let mut cert = Certificate::default();
    let wn = jm_weight_filtration(n).shift(l);
    cert.push("weight filtration", *w == wn, if *w == wn { "W = W(N)[-l]" } else { "W ≠ W(N)[-l]" });
    let tr = transversal(n, f);
    cert.push("transversality", tr, if tr { "N F^p ⊆ F^{p-1}" } else { "N F^p ⊄ F^{p-1}" });
    let split = match deligne_splitting(w, f) {
        Ok(s) => {
            cert.push("mixed Hodge structure", true, "Deligne splitting exists");
            s
        }
        Err(e) => {
            cert.push("mixed Hodge structure", false, e.to_string());
            return cert;
        }
    };
    let ng = n.to_gauss();
    let mut sym = true;
    let mut graded = true;
    for (&(p, q), s) in split.components() {
        let target = split.get(q, p).sum(&w.get(p + q - 1).to_gauss());
        if !target.contains_subspace(&s.conj()) {
            sym = false;
        }
        if !split.get(p - 1, q - 1).contains_subspace(&s.image(&ng)) {
            graded = false;
        }
    }
    cert.push("Hodge symmetry", sym, if sym { "conj I^{p,q} ≡ I^{q,p} on Gr" } else { "conj I^{p,q} ≢ I^{q,p}" });
    cert.push(
        "N of type (-1,-1)",
        graded,
        if graded { "N I^{p,q} ⊆ I^{p-1,q-1}" } else { "N does not lower bidegree" },
    );
    if !(sym && graded) {
        return cert;
    }
    let qg = lattice.q().to_gauss();
    let sgn = match sign {
        PolarizationSign::Standard => Gauss::one(),
        PolarizationSign::Negated => -Gauss::one(),
    };
    let top = w.hi() - l;
    for k in 0..=top.max(0) {
        let nk = ng.pow(k as usize);
        let nk1 = ng.pow(k as usize + 1);
        let mut vecs: Vec<(Vec<Gauss>, Gauss)> = Vec::new();
        for (&(p, q), s) in split.components() {
            if p + q != l + k {
                continue;
            }
            let prim = s.intersect(&Subspace::zero(lattice.rank()).preimage(&nk1));
            let c = Gauss::i_pow((p - q) as i64);
            vecs.extend(prim.basis().into_iter().map(|v| (v, c.clone())));
        }
        if vecs.is_empty() {
            continue;
        }
        let m = vecs.len();
        let mut gram = GaussianMatrix::zeros(m, m);
        for (a, (va, ca)) in vecs.iter().enumerate() {
            for (b, (vb, _)) in vecs.iter().enumerate() {
                let val = sgn.clone() * ca.clone() * qg.pair(va, &nk.apply(&conj_vec(vb)));
                gram.set(a, b, val);
            }
        }
        let name = format!("polarization P_{}", l + k);
        match hermitian_positive_definite(&gram) {
            Ok(()) => cert.push(name, true, format!("positive on {m} primitive dimensions")),
            Err(e) => cert.push(name, false, e),
        }
    }
    cert
}

/// Nilpotent-orbit test: transversality of every generator and a polarized LMHS at the
/// generator sum with `W(σ)[-l]`.
pub fn is_nilpotent_orbit(
    lattice: &SymplecticLattice,
    cone: &NilCone,
    f: &HodgeFiltration,
    sign: PolarizationSign,
) -> Certificate {
    let mut cert = Certificate::default();
    match lattice.check_flag(f) {
        Ok(()) => cert.push("compact dual", true, "dimensions and isotropy hold"),
        Err(e) => {
            cert.push("compact dual", false, e.to_string());
            return cert;
        }
    }
    for (j, n) in cone.generators().iter().enumerate() {
        let ok = transversal(n, f);
        cert.push(format!("transversality N_{}", j + 1), ok, if ok { "N F^p ⊆ F^{p-1}" } else { "N F^p ⊄ F^{p-1}" });
    }
    let w = match cone_weight_filtration(cone) {
        Ok(w) => {
            cert.push("interior agreement", true, "W(σ) constant on sampled interior points");
            w
        }
        Err(e) => {
            cert.push("interior agreement", false, e.to_string());
            return cert;
        }
    };
    cert.extend(is_polarized_mhs(lattice, &w.shift(lattice.weight()), f, &cone.interior(), sign));
    cert
}

/// Degeneration family, used for the type index set Φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Pure,
    I,
    II,
    III,
    IV,
}

impl FromStr for Family {
    type Err = HodgeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "pure" | "Pure" => Ok(Family::Pure),
            "I" | "HT" => Ok(Family::I),
            "II" => Ok(Family::II),
            "III" => Ok(Family::III),
            "IV" => Ok(Family::IV),
            other => Err(HodgeError::UnknownDiagram(format!("unknown type family {other:?}"))),
        }
    }
}

/// LMHS type read off the Hodge–Deligne diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LmhsType {
    Pure,
    HodgeTate,
    I(usize),
    II,
    III,
    IV(usize),
}

impl LmhsType {
    pub fn family(self) -> Family {
        match self {
            LmhsType::Pure => Family::Pure,
            LmhsType::HodgeTate | LmhsType::I(_) => Family::I,
            LmhsType::II => Family::II,
            LmhsType::III => Family::III,
            LmhsType::IV(_) => Family::IV,
        }
    }
}

impl fmt::Display for LmhsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LmhsType::Pure => write!(f, "pure"),
            LmhsType::HodgeTate => write!(f, "HT"),
            LmhsType::I(a) => write!(f, "I_{a}"),
            LmhsType::II => write!(f, "II"),
            LmhsType::III => write!(f, "III"),
            LmhsType::IV(a) => write!(f, "IV_{a}"),
        }
    }
}

impl FromStr for LmhsType {
    type Err = HodgeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HodgeError::UnknownDiagram(format!("unknown type tag {s:?}"));
        match s.trim() {
            "pure" => Ok(LmhsType::Pure),
            "HT" => Ok(LmhsType::HodgeTate),
            "II" => Ok(LmhsType::II),
            "III" => Ok(LmhsType::III),
            t => {
                if let Some(a) = t.strip_prefix("IV_") {
                    a.parse().map(LmhsType::IV).map_err(|_| bad())
                } else if let Some(a) = t.strip_prefix("I_") {
                    a.parse().map(LmhsType::I).map_err(|_| bad())
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for LmhsType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LmhsType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn describe(table: &BTreeMap<(i32, i32), usize>) -> String {
    table.iter().map(|((p, q), h)| format!("h^{{{p},{q}}}={h}")).collect::<Vec<_>>().join(" ")
}

/// Map a Hodge–Deligne table to a type for weight 1 (any g) or weight 3 with CY shape (1,h,h,1).
pub fn classify_table(
    table: &BTreeMap<(i32, i32), usize>,
    lattice: &SymplecticLattice,
) -> Result<LmhsType, HodgeError> {
    let t = |p: i32, q: i32| table.get(&(p, q)).copied().unwrap_or(0);
    let unknown = || HodgeError::UnknownDiagram(describe(table));
    let matches = |expected: &[((i32, i32), usize)]| {
        let want: BTreeMap<(i32, i32), usize> = expected.iter().copied().filter(|&(_, h)| h > 0).collect();
        want == *table
    };
    match lattice.weight() {
        1 => {
            let g = lattice.rank() / 2;
            let a = t(1, 1);
            if a > g || !matches(&[((1, 1), a), ((0, 0), a), ((1, 0), g - a), ((0, 1), g - a)]) {
                return Err(unknown());
            }
            Ok(match a {
                0 => LmhsType::Pure,
                a if a == g => LmhsType::HodgeTate,
                a => LmhsType::I(a),
            })
        }
        3 if lattice.h(3) == 1 => {
            let h = lattice.h(2);
            if t(0, 0) == 1 {
                let a = t(2, 2);
                if a >= 1
                    && a <= h
                    && matches(&[((3, 3), 1), ((0, 0), 1), ((2, 2), a), ((1, 1), a), ((2, 1), h - a), ((1, 2), h - a)])
                {
                    return Ok(LmhsType::IV(a));
                }
            } else if t(3, 0) == 1 {
                let a = t(2, 2);
                if a <= h
                    && matches(&[((3, 0), 1), ((0, 3), 1), ((2, 2), a), ((1, 1), a), ((2, 1), h - a), ((1, 2), h - a)])
                {
                    return Ok(if a == 0 { LmhsType::Pure } else { LmhsType::I(a) });
                }
            } else if t(2, 0) == 1 {
                let c = t(2, 2);
                if c < h
                    && matches(&[
                        ((3, 1), 1),
                        ((1, 3), 1),
                        ((2, 0), 1),
                        ((0, 2), 1),
                        ((2, 2), c),
                        ((1, 1), c),
                        ((2, 1), h - 1 - c),
                        ((1, 2), h - 1 - c),
                    ])
                {
                    return Ok(LmhsType::II);
                }
            } else if t(1, 0) == 1 {
                let c = t(2, 2);
                if c < h
                    && matches(&[
                        ((3, 2), 1),
                        ((2, 3), 1),
                        ((1, 0), 1),
                        ((0, 1), 1),
                        ((2, 2), c),
                        ((1, 1), c),
                        ((2, 1), h - 1 - c),
                        ((1, 2), h - 1 - c),
                    ])
                {
                    return Ok(LmhsType::III);
                }
            }
            Err(unknown())
        }
        _ => Err(unknown()),
    }
}

/// Type of the LMHS `(W(σ)[-l], F)`.
pub fn classify_lmhs(lattice: &SymplecticLattice, cone: &NilCone, f: &HodgeFiltration) -> Result<LmhsType, HodgeError> {
    let w = cone_weight_filtration(cone)?.shift(lattice.weight());
    let split = deligne_splitting(&w, f)?;
    classify_table(&split.table(), lattice)
}

/// A filtration making `(face, ·)` a nilpotent orbit, searched among `exp(i·y·Σ_{j∉face} N_j)·F`
/// for `y = 0, 1, 2, …, max_y`.
pub fn face_witness(
    lattice: &SymplecticLattice,
    cone: &NilCone,
    f: &HodgeFiltration,
    face: &[usize],
    sign: PolarizationSign,
    max_y: i64,
) -> Option<HodgeFiltration> {
    let face_cone = cone.face(face);
    let rest: Vec<usize> = (0..cone.len()).filter(|j| !face.contains(j)).collect();
    let rest_sum = rest
        .iter()
        .fold(RationalMatrix::zeros(cone.ambient(), cone.ambient()), |acc, &j| acc.add(&cone.generators()[j]));
    (0..=max_y).find_map(|y| {
        let g = exp_imaginary(&rest_sum, &rat(y));
        let fy = f.transform(&g);
        is_nilpotent_orbit(lattice, &face_cone, &fy, sign).holds().then_some(fy)
    })
}
