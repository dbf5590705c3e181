//! Fan and weak-fan axioms on finite witness data, and the refinement pipeline that turns a
//! generating system into a weak fan.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cones::{cut_forms, overlap_refinement, transport, Cone, ConeComplex, ConeError, MatrixFrame};
use crate::exact::{exp_nilpotent, lift_vec, solve_in, Gauss, Rat, RationalMatrix};
use crate::hodge::{
    classify_lmhs, deligne_splitting, face_witness, is_nilpotent_orbit, jm_weight_filtration, Family, HodgeError,
    HodgeFiltration, LmhsType, NilCone, PolarizationSign, SymplecticLattice, WeightFiltration,
};
use crate::reduce::{
    adapted_symplectic_basis, bracket_certificate, AdaptedBasis, BasisKind, BracketCertificate, ReduceError,
};

pub const QUALIFIER: &str = "relative to supplied witnesses";

/// Note attached to every fan report about the finiteness input.
pub const FOOTER: &str = "Group elements are taken as the finite coset representatives attached to the \
classical-type sequence of parabolic elements; the finiteness statement that supplies them refers to this \
triple by a label that reads as a cross-reference slip, and the intended reading is used.";

const MAX_ROUNDS: usize = 10;
const FACE_WITNESS_BOUND: i64 = 16;
const MAX_EXP_DENOMINATOR: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("group element {index} is not integral")]
    NonIntegral { index: usize },
    #[error("group element {index} does not preserve the form")]
    FormNotPreserved { index: usize },
    #[error("cone {0} has no orbit witness")]
    MissingWitness(usize),
    #[error("type {0:?} lies outside the supported regimes (weight one, type I, type IV)")]
    MixedRegime(Family),
    #[error("refinement did not stabilise after {0} rounds")]
    NotConverged(usize),
    #[error("refined cell {0} is not simplicial")]
    NonSimplicial(String),
    #[error("no orbit witness found for refined cell {0}")]
    UnwitnessedCell(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

/// Integral, form-preserving matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupElement(RationalMatrix);

impl GroupElement {
    pub fn new(matrix: RationalMatrix, lattice: &SymplecticLattice, index: usize) -> Result<Self, FanError> {
        if !matrix.is_integral() {
            return Err(FanError::NonIntegral { index });
        }
        if !lattice.preserves(&matrix) {
            return Err(FanError::FormNotPreserved { index });
        }
        Ok(GroupElement(matrix))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }
}

/// Generating cones, finitely many group elements and optional orbit witnesses.
#[derive(Debug, Clone)]
pub struct ConeSystem {
    pub lattice: SymplecticLattice,
    pub cones: Vec<NilCone>,
    pub witnesses: Vec<GroupElement>,
    pub phi: BTreeSet<Family>,
    pub orbit_witnesses: Vec<Option<HodgeFiltration>>,
    pub sign: PolarizationSign,
}

impl ConeSystem {
    pub fn new(
        lattice: SymplecticLattice,
        cones: Vec<NilCone>,
        witnesses: Vec<RationalMatrix>,
        phi: BTreeSet<Family>,
        orbit_witnesses: Vec<Option<HodgeFiltration>>,
    ) -> Result<Self, FanError> {
        for c in &cones {
            lattice.check_cone(c)?;
        }
        let witnesses = witnesses
            .into_iter()
            .enumerate()
            .map(|(i, m)| GroupElement::new(m, &lattice, i))
            .collect::<Result<Vec<_>, _>>()?;
        let mut orbit_witnesses = orbit_witnesses;
        orbit_witnesses.resize(cones.len(), None);
        Ok(ConeSystem { lattice, cones, witnesses, phi, orbit_witnesses, sign: PolarizationSign::Standard })
    }

    /// The system moved by `Ad_g`: cones and limits by `g`, group elements by conjugation.
    pub fn transported(&self, g: &RationalMatrix) -> Result<ConeSystem, FanError> {
        let inv = g.inverse().ok_or(FanError::NonIntegral { index: 0 })?;
        let ad = |m: &RationalMatrix| g.mul(m).mul(&inv);
        let cones = self
            .cones
            .iter()
            .map(|c| NilCone::new(c.generators().iter().map(ad).collect()))
            .collect::<Result<_, _>>()?;
        let witnesses = self
            .witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| GroupElement::new(ad(&w.0), &self.lattice, i))
            .collect::<Result<_, _>>()?;
        let orbit_witnesses =
            self.orbit_witnesses.iter().map(|f| f.as_ref().map(|f| f.transform_rational(g))).collect();
        Ok(ConeSystem {
            lattice: self.lattice.clone(),
            cones,
            witnesses,
            phi: self.phi.clone(),
            orbit_witnesses,
            sign: self.sign,
        })
    }

    /// Identity followed by the supplied group elements.
    fn group(&self) -> Vec<RationalMatrix> {
        std::iter::once(RationalMatrix::identity(self.lattice.rank()))
            .chain(self.witnesses.iter().map(|g| g.0.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomVerdict {
    pub axiom: String,
    pub verdict: Verdict,
    /// Informational verdicts do not affect [`FanReport::passed`].
    pub binding: bool,
    pub detail: String,
}

/// Outcome of the shared-base-point question for two meeting cones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "decision", rename_all = "lowercase")]
pub enum MeetDecision {
    Shared { reason: String, lmhs: Option<LmhsType> },
    No { reason: String, certificate: Option<BracketCertificate> },
    Unknown { reason: String },
}

impl MeetDecision {
    fn no(reason: impl Into<String>) -> Self {
        MeetDecision::No { reason: reason.into(), certificate: None }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        MeetDecision::Unknown { reason: reason.into() }
    }

    /// Whether an attached bracket certificate fired, i.e. the pair is not a valid cone pair.
    pub fn ill_formed(&self) -> bool {
        matches!(self, MeetDecision::No { certificate: Some(c), .. } if c.fires)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellRecord {
    pub label: String,
    pub generators: Vec<RationalMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairFinding {
    pub first: CellRecord,
    pub second: CellRecord,
    pub decision: MeetDecision,
}

#[derive(Debug, Clone, Serialize)]
pub struct FanReport {
    pub check: String,
    pub qualifier: String,
    pub verdicts: Vec<AxiomVerdict>,
    pub violations: Vec<PairFinding>,
    pub undecided: Vec<PairFinding>,
    pub ill_formed: Vec<PairFinding>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl FanReport {
    fn new(check: &str) -> Self {
        FanReport {
            check: check.into(),
            qualifier: QUALIFIER.into(),
            verdicts: Vec::new(),
            violations: Vec::new(),
            undecided: Vec::new(),
            ill_formed: Vec::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn push(&mut self, axiom: &str, verdict: Verdict, binding: bool, detail: impl Into<String>) {
        self.verdicts.push(AxiomVerdict { axiom: axiom.into(), verdict, binding, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.binding).all(|v| v.verdict == Verdict::Pass)
    }

    pub fn verdict(&self, axiom: &str) -> Option<Verdict> {
        self.verdicts.iter().find(|v| v.axiom == axiom).map(|v| v.verdict)
    }
}

/// Smallest `k ≤ bound` with `exp(kN)` integral.
pub fn integral_exponent(n: &RationalMatrix, bound: u32) -> Option<u32> {
    (1..=bound).find(|&k| exp_nilpotent(&n.scale(&Rat::from_integer(k.into()))).is_ok_and(|t| t.is_integral()))
}

pub fn strong_compatibility(system: &ConeSystem) -> FanReport {
    let start = Instant::now();
    let mut report = FanReport::new("strong_compatibility");
    let mut bad = Vec::new();
    let mut exponents = Vec::new();
    for (i, c) in system.cones.iter().enumerate() {
        for (j, n) in c.generators().iter().enumerate() {
            match integral_exponent(n, MAX_EXP_DENOMINATOR) {
                Some(k) => exponents.push(k),
                None => bad.push(format!("cone {i} generator {j}")),
            }
        }
    }
    let max_k = exponents.iter().copied().max().unwrap_or(1);
    if bad.is_empty() {
        report.push(
            "integral logarithms",
            Verdict::Pass,
            true,
            format!("every generator N has exp(kN) integral for some k ≤ {max_k}"),
        );
    } else {
        report.push(
            "integral logarithms",
            Verdict::Fail,
            true,
            format!("no k ≤ {MAX_EXP_DENOMINATOR} with exp(kN) integral: {}", bad.join(", ")),
        );
    }
    report.push(
        "group elements",
        Verdict::Pass,
        true,
        format!("{} supplied elements are integral and preserve the form", system.witnesses.len()),
    );
    report.push(
        "adjoint closure",
        Verdict::Pass,
        false,
        "the collection is generated as adjoint orbits, so closure holds by construction",
    );
    report.notes.push(FOOTER.into());
    report.elapsed = start.elapsed();
    report
}

fn sum(gens: &[RationalMatrix], n: usize) -> RationalMatrix {
    gens.iter().fold(RationalMatrix::zeros(n, n), |acc, m| acc.add(m))
}

/// Regime read off the shape of the centered weight filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    WeightOne,
    TypeI,
    TypeIV,
    Other,
}

fn regime(lattice: &SymplecticLattice, w: &WeightFiltration) -> Regime {
    match (lattice.weight(), w.lo()) {
        (1, _) => Regime::WeightOne,
        (3, -1) if lattice.h(3) == 1 => Regime::TypeI,
        (3, -3) if lattice.h(3) == 1 => Regime::TypeIV,
        _ => Regime::Other,
    }
}

fn flatten(m: &RationalMatrix) -> Vec<Rat> {
    m.entries().to_vec()
}

/// Can two cones carry a common nilpotent-orbit base point?
///
/// Cones are given by raw generator lists so that ill-formed inputs can still be examined.
pub fn btilde_meet(
    sigma: &[RationalMatrix],
    f_sigma: Option<&HodgeFiltration>,
    tau: &[RationalMatrix],
    f_tau: Option<&HodgeFiltration>,
    system: &ConeSystem,
) -> MeetDecision {
    let lattice = &system.lattice;
    let n = lattice.rank();
    let w_sigma = jm_weight_filtration(&sum(sigma, n));
    if w_sigma != jm_weight_filtration(&sum(tau, n)) {
        return MeetDecision::no("weight filtrations differ");
    }
    let mut all = sigma.to_vec();
    all.extend(tau.iter().cloned());
    let cones = MatrixFrame::spanning(&all).and_then(|fr| Ok((fr.cone(sigma)?, fr.cone(tau)?, fr)));
    let (c_sigma, c_tau, frame) = match cones {
        Ok(x) => x,
        Err(e) => return MeetDecision::unknown(format!("cone construction failed: {e}")),
    };
    if c_sigma == c_tau {
        return MeetDecision::Shared { reason: "identical cones".into(), lmhs: None };
    }
    let Some(common) = c_sigma.intersect(&c_tau) else {
        return MeetDecision::no("relative interiors are disjoint");
    };
    let n_sigma = NilCone::new(sigma.to_vec()).ok();
    let n_tau = NilCone::new(tau.to_vec()).ok();
    let label = |c: &NilCone, f: &HodgeFiltration| classify_lmhs(lattice, c, f).ok();
    if let (Some(a), Some(b)) = (&n_sigma, &n_tau) {
        for f in [f_sigma, f_tau].into_iter().flatten() {
            if is_nilpotent_orbit(lattice, a, f, system.sign).holds()
                && is_nilpotent_orbit(lattice, b, f, system.sign).holds()
            {
                return MeetDecision::Shared {
                    reason: "one orbit witness serves both cones".into(),
                    lmhs: label(a, f),
                };
            }
        }
    }
    let witnessed = match (&n_sigma, &n_tau, f_sigma, f_tau) {
        (Some(a), Some(b), Some(fa), Some(fb)) => {
            is_nilpotent_orbit(lattice, a, fa, system.sign).holds()
                && is_nilpotent_orbit(lattice, b, fb, system.sign).holds()
        }
        _ => false,
    };
    match regime(lattice, &w_sigma) {
        Regime::WeightOne if witnessed => MeetDecision::Shared {
            reason: "weight one: meeting cones with orbit witnesses share a base point".into(),
            lmhs: label(n_sigma.as_ref().unwrap(), f_sigma.unwrap()),
        },
        Regime::TypeI if witnessed => MeetDecision::Shared {
            reason: "type I: meeting cones with orbit witnesses share a base point".into(),
            lmhs: label(n_sigma.as_ref().unwrap(), f_sigma.unwrap()),
        },
        Regime::TypeIV => type_iv_meet(sigma, f_sigma, tau, &w_sigma, &frame, &c_sigma, &c_tau, &common, system),
        Regime::Other => MeetDecision::unknown("no decision procedure for this degeneration type"),
        _ => MeetDecision::unknown("an orbit witness is missing"),
    }
}

fn quotient_cones(
    basis: &AdaptedBasis,
    sigma: &[RationalMatrix],
    tau: &[RationalMatrix],
) -> Result<(Cone, Cone), ConeError> {
    let qs: Vec<RationalMatrix> = sigma.iter().map(|m| basis.quotient(m)).filter(|m| !m.is_zero()).collect();
    let qt: Vec<RationalMatrix> = tau.iter().map(|m| basis.quotient(m)).filter(|m| !m.is_zero()).collect();
    let mut all = qs.clone();
    all.extend(qt.iter().cloned());
    let frame = MatrixFrame::spanning(&all)?;
    Ok((frame.cone(&qs)?, frame.cone(&qt)?))
}

#[allow(clippy::too_many_arguments)]
fn type_iv_meet(
    sigma: &[RationalMatrix],
    f_sigma: Option<&HodgeFiltration>,
    tau: &[RationalMatrix],
    w: &WeightFiltration,
    frame: &MatrixFrame,
    c_sigma: &Cone,
    c_tau: &Cone,
    common: &Cone,
    system: &ConeSystem,
) -> MeetDecision {
    let q = system.lattice.q();
    let basis = match adapted_symplectic_basis(w, q, BasisKind::TypeIV) {
        Ok(b) => b,
        Err(e) => return MeetDecision::unknown(format!("no adapted basis: {e}")),
    };
    let equal = match quotient_cones(&basis, sigma, tau) {
        Ok((a, b)) => a == b,
        Err(e) => return MeetDecision::unknown(format!("quotient cones: {e}")),
    };
    if !equal {
        return MeetDecision::unknown("type IV: quotient images differ");
    }
    let certificate = engineered_certificate(&basis, f_sigma, w, frame, c_sigma, c_tau, common);
    let reason = match &certificate {
        Some(c) if c.fires => {
            "type IV: equal quotients force equal cones; bracket certificate shows the pair is ill-formed"
        }
        _ => "type IV: equal quotient images with a common interior element force equal cones",
    };
    MeetDecision::No { reason: reason.into(), certificate }
}

/// `N_1 ∈ σ∖τ`, `N_2 ∈ τ` with the same quotient image, `N_3 ∈ σ∩τ` and a top-weight `v`.
#[allow(clippy::too_many_arguments)]
fn engineered_certificate(
    basis: &AdaptedBasis,
    f_sigma: Option<&HodgeFiltration>,
    w: &WeightFiltration,
    frame: &MatrixFrame,
    c_sigma: &Cone,
    c_tau: &Cone,
    common: &Cone,
) -> Option<BracketCertificate> {
    let outside = |a: &Cone, b: &Cone| -> Option<Vec<Rat>> {
        let p = a.interior_point();
        std::iter::once(p.clone())
            .chain(a.rays_rat().into_iter().map(|r| p.iter().zip(&r).map(|(x, y)| x + y).collect()))
            .find(|x| !b.contains(x))
    };
    let (x, other) = match outside(c_sigma, c_tau) {
        Some(x) => (x, c_tau),
        None => (outside(c_tau, c_sigma)?, c_sigma),
    };
    let n1 = frame.matrix(&x);
    let rays = other.rays_rat();
    let images: Vec<Vec<Rat>> = rays.iter().map(|r| flatten(&basis.quotient(&frame.matrix(r)))).collect();
    let coeffs = solve_in(&images, &flatten(&basis.quotient(&n1)))?;
    if coeffs.iter().any(|c| *c <= Rat::zero()) {
        return None;
    }
    let y: Vec<Rat> = (0..frame.dim()).map(|k| rays.iter().zip(&coeffs).map(|(r, c)| c * &r[k]).sum()).collect();
    let n2 = frame.matrix(&y);
    let n3 = frame.matrix(&common.interior_point());
    let top: Vec<Gauss> = f_sigma
        .and_then(|f| deligne_splitting(&w.shift(3), f).ok())
        .and_then(|s| s.get(3, 3).basis().into_iter().next())
        .unwrap_or_else(|| lift_vec(&basis.vector(basis.rank() - 1)));
    Some(bracket_certificate(basis, &n1, &n2, &n3, &top))
}

/// A transported generating cone in frame coordinates.
struct Member {
    cone: Cone,
    label: String,
    /// Generator matrices of the cone's rays, in ray order.
    rays: Vec<RationalMatrix>,
    witness: Option<HodgeFiltration>,
}

/// A cone of the face closure with the members it is a face of.
struct Cell {
    cone: Cone,
    label: String,
    sources: Vec<(usize, Vec<usize>)>,
    w: WeightFiltration,
}

struct Closure {
    frame: MatrixFrame,
    members: Vec<Member>,
    cells: Vec<Cell>,
    notes: Vec<String>,
}

/// `trusted` skips re-testing orbit witnesses that were produced by a successful orbit test.
fn materialize(system: &ConeSystem, trusted: bool) -> Result<Closure, FanError> {
    let group = system.group();
    let mut transported: Vec<(String, Vec<RationalMatrix>, Option<HodgeFiltration>)> = Vec::new();
    let mut notes = Vec::new();
    for (i, c) in system.cones.iter().enumerate() {
        let witness = system.orbit_witnesses.get(i).cloned().flatten().filter(|f| {
            let ok = trusted || is_nilpotent_orbit(&system.lattice, c, f, system.sign).holds();
            if !ok {
                notes.push(format!("orbit witness of cone {i} fails the nilpotent-orbit test and is ignored"));
            }
            ok
        });
        for (l, g) in group.iter().enumerate() {
            let inv = g.inverse().expect("group elements are invertible");
            let gens = c.generators().iter().map(|n| g.mul(n).mul(&inv)).collect();
            let label = if l == 0 { format!("σ_{}", i + 1) } else { format!("Ad(γ_{l}) σ_{}", i + 1) };
            transported.push((label, gens, witness.as_ref().map(|f| f.transform_rational(g))));
        }
    }
    let all: Vec<RationalMatrix> = transported.iter().flat_map(|(_, g, _)| g.iter().cloned()).collect();
    let frame = MatrixFrame::spanning(&all)?;
    let mut members: Vec<Member> = Vec::new();
    let mut seen = BTreeSet::new();
    for (label, gens, witness) in transported {
        let cone = frame.cone(&gens)?;
        if !seen.insert(cone.clone()) {
            continue;
        }
        let rays = frame.generators(&cone);
        members.push(Member { cone, label, rays, witness });
    }
    let cells = close(&frame, &members);
    Ok(Closure { frame, members, cells, notes })
}

fn close(frame: &MatrixFrame, members: &[Member]) -> Vec<Cell> {
    let mut index: BTreeMap<Cone, usize> = BTreeMap::new();
    let mut cells: Vec<Cell> = Vec::new();
    for (m, member) in members.iter().enumerate() {
        for face in member.cone.faces() {
            if face.is_zero() {
                continue;
            }
            let idx: Vec<usize> =
                (0..member.cone.rays().len()).filter(|&k| face.rays().contains(&member.cone.rays()[k])).collect();
            let at = *index.entry(face.clone()).or_insert_with(|| {
                let label =
                    if face == member.cone { member.label.clone() } else { format!("face of {}", member.label) };
                let w = jm_weight_filtration(&frame.matrix(&face.interior_point()));
                cells.push(Cell { cone: face.clone(), label, sources: Vec::new(), w });
                cells.len() - 1
            });
            cells[at].sources.push((m, idx));
        }
    }
    cells
}

impl Closure {
    fn record(&self, c: usize) -> CellRecord {
        CellRecord { label: self.cells[c].label.clone(), generators: self.frame.generators(&self.cells[c].cone) }
    }

    fn witness(
        &self,
        c: usize,
        system: &ConeSystem,
        cache: &mut BTreeMap<usize, Option<HodgeFiltration>>,
    ) -> Option<HodgeFiltration> {
        if let Some(w) = cache.get(&c) {
            return w.clone();
        }
        let found = self.cells[c].sources.iter().find_map(|(m, idx)| {
            let member = &self.members[*m];
            let f = member.witness.as_ref()?;
            let nil = NilCone::new(member.rays.clone()).ok()?;
            face_witness(&system.lattice, &nil, f, idx, system.sign, FACE_WITNESS_BOUND)
        });
        cache.insert(c, found.clone());
        found
    }

    /// Indices of cells grouped by weight filtration, in first-seen order.
    fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(WeightFiltration, Vec<usize>)> = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            match groups.iter_mut().find(|(w, _)| *w == c.w) {
                Some((_, v)) => v.push(i),
                None => groups.push((c.w.clone(), vec![i])),
            }
        }
        groups.into_iter().map(|(_, v)| v).collect()
    }
}

pub fn weak_fan_check(system: &ConeSystem) -> Result<FanReport, FanError> {
    check_closure(system, false)
}

fn check_closure(system: &ConeSystem, trusted: bool) -> Result<FanReport, FanError> {
    let start = Instant::now();
    let closure = materialize(system, trusted)?;
    let mut report = FanReport::new("weak_fan_check");
    report.notes.extend(closure.notes.iter().cloned());
    let complex = ConeComplex::new(
        closure.frame.dim(),
        closure.cells.iter().map(|c| c.cone.clone()).chain([Cone::zero(closure.frame.dim())]),
    );
    match complex.is_fan() {
        Ok(()) => report.push(
            "fan",
            Verdict::Pass,
            false,
            format!("{} cones, pairwise intersections are faces", complex.len()),
        ),
        Err(v) => report.push("fan", Verdict::Fail, false, v.to_string()),
    }
    let mut cache = BTreeMap::new();
    let mut outside_phi = 0usize;
    let mut meeting = 0usize;
    for group in closure.groups() {
        for (a, &i) in group.iter().enumerate() {
            for &j in &group[a + 1..] {
                if closure.cells[i].cone.intersect(&closure.cells[j].cone).is_none() {
                    continue;
                }
                meeting += 1;
                let fi = closure.witness(i, system, &mut cache);
                let fj = closure.witness(j, system, &mut cache);
                let gi = closure.frame.generators(&closure.cells[i].cone);
                let gj = closure.frame.generators(&closure.cells[j].cone);
                let decision = btilde_meet(&gi, fi.as_ref(), &gj, fj.as_ref(), system);
                let finding =
                    |d: MeetDecision| PairFinding { first: closure.record(i), second: closure.record(j), decision: d };
                match &decision {
                    MeetDecision::Shared { lmhs, .. } => {
                        if lmhs.is_none_or(|t| system.phi.contains(&t.family())) {
                            report.violations.push(finding(decision));
                        } else {
                            outside_phi += 1;
                        }
                    }
                    MeetDecision::Unknown { .. } => report.undecided.push(finding(decision)),
                    MeetDecision::No { .. } if decision.ill_formed() => report.ill_formed.push(finding(decision)),
                    MeetDecision::No { .. } => {}
                }
            }
        }
    }
    let phi: Vec<String> = system.phi.iter().map(|f| format!("{f:?}")).collect();
    let detail = format!(
        "{meeting} meeting pairs of distinct cones; {} share a base point of type in Φ = {{{}}}, {outside_phi} outside Φ, {} undecided",
        report.violations.len(),
        phi.join(", "),
        report.undecided.len()
    );
    let verdict = if !report.violations.is_empty() {
        Verdict::Fail
    } else if !report.undecided.is_empty() {
        Verdict::Undecided
    } else {
        Verdict::Pass
    };
    report.push("type-Φ weak fan", verdict, true, detail);
    let ill = report.ill_formed.len();
    report.push(
        "well-formed pairs",
        if ill == 0 { Verdict::Pass } else { Verdict::Fail },
        true,
        format!("{ill} pairs contradicted by a bracket certificate"),
    );
    report.notes.push(FOOTER.into());
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Refined system together with the refined complex in frame coordinates.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub system: ConeSystem,
    pub frame: MatrixFrame,
    pub complex: ConeComplex,
    pub rounds: usize,
    pub report: FanReport,
}

/// Linear map from frame coordinates to coordinates on the span of the type IV quotient images.
struct QuotientMap {
    dim: usize,
    /// Quotient coordinates of each frame basis matrix.
    lift: Vec<Vec<Rat>>,
}

impl QuotientMap {
    fn new(frame: &MatrixFrame, w: &WeightFiltration, lattice: &SymplecticLattice) -> Result<Self, FanError> {
        let basis = adapted_symplectic_basis(w, lattice.q(), BasisKind::TypeIV)?;
        let images: Vec<RationalMatrix> = frame.basis().iter().map(|b| basis.quotient(b)).collect();
        let nonzero: Vec<RationalMatrix> = images.iter().filter(|m| !m.is_zero()).cloned().collect();
        let qframe = MatrixFrame::spanning(&nonzero)?;
        let lift = images.iter().map(|m| qframe.coordinates(m).expect("inside span")).collect();
        Ok(QuotientMap { dim: qframe.dim(), lift })
    }

    fn image(&self, c: &Cone) -> Option<Cone> {
        let rays: Vec<Vec<Rat>> = c
            .rays_rat()
            .iter()
            .map(|r| {
                (0..self.dim).map(|k| r.iter().zip(&self.lift).map(|(x, l)| x * &l[k]).sum()).collect::<Vec<Rat>>()
            })
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        if rays.is_empty() {
            return None;
        }
        Cone::new(self.dim, &rays).ok()
    }

    fn pull(&self, form: &[Rat]) -> Vec<Rat> {
        self.lift.iter().map(|l| l.iter().zip(form).map(|(a, b)| a * b).sum()).collect()
    }

    /// Cuts of `a` along the quotient image of `b`.
    fn cuts(&self, a: &Cone, b: &Cone) -> Vec<Vec<Rat>> {
        match (self.image(a), self.image(b)) {
            (Some(qa), Some(qb)) if qa != qb => cut_forms(&qa, &qb).iter().map(|f| self.pull(f)).collect(),
            _ => Vec::new(),
        }
    }
}

fn refine_round(complex: &ConeComplex, frame: &MatrixFrame, system: &ConeSystem) -> Result<ConeComplex, FanError> {
    let mut groups: Vec<(WeightFiltration, Vec<Cone>)> = Vec::new();
    for c in complex.cones() {
        if c.is_zero() {
            continue;
        }
        let w = jm_weight_filtration(&frame.matrix(&c.interior_point()));
        match groups.iter_mut().find(|(x, _)| *x == w) {
            Some((_, v)) => v.push(c.clone()),
            None => groups.push((w, vec![c.clone()])),
        }
    }
    let mut out: Vec<Cone> = vec![Cone::zero(frame.dim())];
    for (w, cones) in groups {
        let sub = ConeComplex::new(frame.dim(), cones.iter().flat_map(Cone::faces));
        let refined = if regime(&system.lattice, &w) == Regime::TypeIV {
            let q = QuotientMap::new(frame, &w, &system.lattice)?;
            overlap_refinement(&sub, |a, b| q.cuts(a, b))?
        } else {
            overlap_refinement(&sub, |_, _| Vec::new())?
        };
        out.extend(refined.cones().iter().cloned());
    }
    Ok(ConeComplex::new(frame.dim(), out).face_closure())
}

pub fn build_weak_fan(system: &ConeSystem) -> Result<BuildOutput, FanError> {
    for f in &system.phi {
        if matches!(f, Family::II | Family::III) {
            return Err(FanError::MixedRegime(*f));
        }
    }
    if let Some(i) = system.orbit_witnesses.iter().position(Option::is_none) {
        return Err(FanError::MissingWitness(i));
    }
    let closure = materialize(system, false)?;
    let dim = closure.frame.dim();
    let mut complex = ConeComplex::new(dim, closure.cells.iter().map(|c| c.cone.clone()).chain([Cone::zero(dim)]));
    let mut rounds = 0;
    loop {
        let next = refine_round(&complex, &closure.frame, system)?;
        rounds += 1;
        if next == complex {
            break;
        }
        complex = next;
        if rounds >= MAX_ROUNDS {
            return Err(FanError::NotConverged(rounds));
        }
    }
    let maximal: Vec<Cone> = complex.maximal_cones().into_iter().filter(|c| !c.is_zero()).collect();
    let mut cones = Vec::with_capacity(maximal.len());
    let mut witnesses = Vec::with_capacity(maximal.len());
    let mut cache: BTreeMap<(usize, Vec<usize>), Option<HodgeFiltration>> = BTreeMap::new();
    for cell in &maximal {
        let gens = closure.frame.generators(cell);
        if !cell.is_simplicial() {
            return Err(FanError::NonSimplicial(format!("{cell:?}")));
        }
        let p = cell.interior_point();
        let mut found = None;
        for (m, member) in closure.members.iter().enumerate() {
            if !member.cone.closure_contains(&p) {
                continue;
            }
            let Some(face) = member.cone.faces().into_iter().find(|f| f.contains(&p)) else { continue };
            let idx: Vec<usize> =
                (0..member.cone.rays().len()).filter(|&k| face.rays().contains(&member.cone.rays()[k])).collect();
            let whole = idx.len() == member.rays.len();
            let w = cache
                .entry((m, idx.clone()))
                .or_insert_with(|| {
                    let f = member.witness.as_ref()?;
                    if whole {
                        return Some(f.clone());
                    }
                    let nil = NilCone::new(member.rays.clone()).ok()?;
                    face_witness(&system.lattice, &nil, f, &idx, system.sign, FACE_WITNESS_BOUND)
                })
                .clone();
            if w.is_some() {
                found = w;
                break;
            }
        }
        let f = found.ok_or_else(|| FanError::UnwitnessedCell(format!("{cell:?}")))?;
        cones.push(NilCone::new(gens)?);
        witnesses.push(Some(f));
    }
    let refined = ConeSystem {
        lattice: system.lattice.clone(),
        cones,
        witnesses: Vec::new(),
        phi: system.phi.clone(),
        orbit_witnesses: witnesses,
        sign: system.sign,
    };
    // each witness passed the orbit test on a cone whose relative interior contains the cell's,
    // and orbits restrict to such subcones
    let report = check_closure(&refined, true)?;
    Ok(BuildOutput { system: refined, frame: closure.frame, complex, rounds, report })
}

/// `Ad_γ` applied to every cone of a complex in frame coordinates.
pub fn transport_complex(
    gamma: &RationalMatrix,
    lattice: &SymplecticLattice,
    frame: &MatrixFrame,
    complex: &ConeComplex,
) -> Result<ConeComplex, ConeError> {
    let moved =
        complex.cones().iter().map(|c| transport(gamma, lattice.q(), frame, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(ConeComplex::new(complex.ambient(), moved))
}
