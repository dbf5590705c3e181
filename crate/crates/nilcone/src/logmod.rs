//! Toric blow-up plans realizing subdivisions of a simplicial monodromy cone, with the monodromy
//! logarithms and the limit filtration carried from chart to chart.
//!
//! Charts are symbolic: coordinate labels, the rays and logarithms attached to the first `k`
//! coordinates, and the value of the twisted period map at the chart's origin. Labels are always
//! relative to the recorded chart coordinates.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cones::{star_subdivide_complex, Cone, ConeComplex, ConeError};
use crate::exact::{exp_nilpotent, int_to_rat, primitive_integer, solve_in, Matrix, Rat, RationalMatrix};
use crate::hodge::{is_nilpotent_orbit, Certificate, HodgeFiltration, NilCone, PolarizationSign, SymplecticLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogmodError {
    #[error("target does not refine the source cone: {0}")]
    NotARefinement(String),
    #[error("target is not reachable by star subdivisions at its own rays: {0}")]
    NotReachableByStars(String),
    #[error("source cone is not simplicial")]
    NotSimplicial,
    #[error("center {0} lies outside the monodromy cone of chart {1}")]
    CenterOutside(String, String),
    #[error("chart {0} carries no limit filtration")]
    MissingLimit(String),
    #[error("chart {chart} has no coordinate {label}")]
    UnknownLabel { chart: String, label: String },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

fn ray_string(r: &[BigInt]) -> String {
    let parts: Vec<String> = r.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn rat_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn big_strings<S: Serializer>(rays: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = rays.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    v.serialize(s)
}

fn big_string<S: Serializer>(r: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<String> = r.iter().map(ToString::to_string).collect();
    v.serialize(s)
}

fn rat_rows<S: Serializer>(rows: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = rows.iter().map(|r| rat_strings(r)).collect();
    v.serialize(s)
}

fn rat_row<S: Serializer>(row: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    rat_strings(row).serialize(s)
}

/// Polydisk chart `(Δ*)^k × Δ^{n−k}` around a boundary point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalChart {
    name: String,
    labels: Vec<String>,
    rays: Vec<Vec<BigInt>>,
    logs: Vec<RationalMatrix>,
    limit: Option<HodgeFiltration>,
}

impl LocalChart {
    /// `rays[j]` and `logs[j]` belong to coordinate `labels[j]`; coordinates past `logs.len()`
    /// carry no monodromy.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        rays: Vec<Vec<Rat>>,
        logs: Vec<RationalMatrix>,
        limit: Option<HodgeFiltration>,
    ) -> Result<Self, LogmodError> {
        let name = name.into();
        if rays.len() != logs.len() || logs.len() > labels.len() {
            return Err(LogmodError::InvalidChart(format!(
                "{name}: {} labels, {} rays, {} logs",
                labels.len(),
                rays.len(),
                logs.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LogmodError::InvalidChart(format!("{name}: label {l} repeated")));
            }
        }
        if !rays.is_empty() && Matrix::from_rows(rays.clone()).map_or(true, |m| m.rank() < rays.len()) {
            return Err(LogmodError::InvalidChart(format!("{name}: rays are dependent")));
        }
        for (i, n) in logs.iter().enumerate() {
            if !exp_nilpotent(n).is_ok_and(|t| t.is_integral()) {
                return Err(LogmodError::InvalidChart(format!("{name}: exp of log {i} is not integral")));
            }
            for m in &logs[..i] {
                if !n.commutator(m).is_zero() {
                    return Err(LogmodError::InvalidChart(format!("{name}: logs do not commute")));
                }
            }
        }
        let rays = rays.iter().map(|r| primitive_integer(r)).collect();
        Ok(LocalChart { name, labels, rays, logs, limit })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn logs(&self) -> &[RationalMatrix] {
        &self.logs
    }

    pub fn limit(&self) -> Option<&HodgeFiltration> {
        self.limit.as_ref()
    }

    pub fn log_of(&self, label: &str) -> Option<&RationalMatrix> {
        self.labels.iter().position(|l| l == label).and_then(|i| self.logs.get(i))
    }

    /// Closed cone of the monodromy rays in ambient coordinates.
    pub fn cone(&self) -> Result<Cone, ConeError> {
        let ambient = self.rays.first().map_or(0, Vec::len);
        let rays: Vec<Vec<Rat>> = self.rays.iter().map(|r| int_to_rat(r)).collect();
        Cone::new(ambient, &rays)
    }

    fn weights(&self, center: &[BigInt]) -> Option<Vec<Rat>> {
        let basis: Vec<Vec<Rat>> = self.rays.iter().map(|r| int_to_rat(r)).collect();
        let w = solve_in(&basis, &int_to_rat(center))?;
        w.iter().all(|x| !x.is_negative()).then_some(w)
    }
}

/// One chart produced by a star subdivision, with `old_j = ∏_r new_r^{exponents[j][r]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartMap {
    #[serde(serialize_with = "big_strings")]
    pub rays: Vec<Vec<BigInt>>,
    /// Position of the exceptional coordinate.
    pub exceptional: usize,
    #[serde(serialize_with = "rat_rows")]
    pub exponents: Vec<Vec<Rat>>,
    /// Index of the new ray lattice in the old one; above 1 the chart is a quotient chart.
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffectedChart {
    #[serde(serialize_with = "big_strings")]
    pub rays: Vec<Vec<BigInt>>,
    /// Coordinates of the center in the chart's rays.
    #[serde(serialize_with = "rat_row")]
    pub weights: Vec<Rat>,
    pub results: Vec<ChartMap>,
}

/// Star subdivision at one primitive ray, read as a (weighted) blow-up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlowupStep {
    /// Label given to the exceptional divisor.
    pub label: String,
    #[serde(serialize_with = "big_string")]
    pub center: Vec<BigInt>,
    pub charts: Vec<AffectedChart>,
}

fn chart_maps(rays: &[Vec<BigInt>], weights: &[Rat], center: &[BigInt]) -> Vec<ChartMap> {
    let k = rays.len();
    (0..k)
        .filter(|&i| weights[i].is_positive())
        .map(|i| {
            let mut new_rays = rays.to_vec();
            new_rays[i] = center.to_vec();
            let exponents = (0..k)
                .map(|j| {
                    (0..k)
                        .map(|r| {
                            if r == i {
                                weights[j].clone()
                            } else if r == j {
                                Rat::one()
                            } else {
                                Rat::zero()
                            }
                        })
                        .collect()
                })
                .collect();
            ChartMap { rays: new_rays, exceptional: i, exponents, index: weights[i].to_string() }
        })
        .collect()
}

/// Ordered star subdivisions turning the source cone into the target fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionPlan {
    pub source: Cone,
    pub steps: Vec<BlowupStep>,
    pub target: ConeComplex,
}

#[derive(Serialize)]
struct PlanDocument<'a> {
    source: Vec<Vec<String>>,
    steps: &'a [BlowupStep],
    fan: Vec<Vec<Vec<String>>>,
}

impl Serialize for SubdivisionPlan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rays = |c: &Cone| -> Vec<Vec<String>> {
            c.rays().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
        };
        PlanDocument {
            source: rays(&self.source),
            steps: &self.steps,
            fan: self.target.cones().iter().map(rays).collect(),
        }
        .serialize(s)
    }
}

impl SubdivisionPlan {
    /// Human-readable listing of centers, weights and chart maps. Old coordinates are `z1…zk`,
    /// new ones `y1…yk`, both in ray order.
    pub fn script(&self) -> String {
        let mut out = String::new();
        let src: Vec<String> = self.source.rays().iter().map(|r| ray_string(r)).collect();
        let _ = writeln!(out, "# {} blow-up step(s) over ⟨{}⟩", self.steps.len(), src.join(", "));
        for (n, step) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "step {}: blow up at {} (exceptional divisor {})",
                n + 1,
                ray_string(&step.center),
                step.label
            );
            for chart in &step.charts {
                let rays: Vec<String> = chart.rays.iter().map(|r| ray_string(r)).collect();
                let _ =
                    writeln!(out, "  chart ⟨{}⟩, weights ({})", rays.join(", "), rat_strings(&chart.weights).join(","));
                for m in &chart.results {
                    let rays: Vec<String> = m.rays.iter().map(|r| ray_string(r)).collect();
                    let subs: Vec<String> = m
                        .exponents
                        .iter()
                        .enumerate()
                        .map(|(j, row)| format!("z{} = {}", j + 1, monomial(row)))
                        .collect();
                    let _ = writeln!(out, "    -> ⟨{}⟩ index {}: {}", rays.join(", "), m.index, subs.join(", "));
                }
            }
        }
        out
    }
}

fn monomial(exponents: &[Rat]) -> String {
    let factors: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(r, e)| if e.is_one() { format!("y{}", r + 1) } else { format!("y{}^{}", r + 1, e) })
        .collect();
    if factors.is_empty() {
        "1".into()
    } else {
        factors.join("·")
    }
}

/// Volume of `closure(c) ∩ {x : Σx_i ≤ 1}` up to a constant factor, for a full-dimensional cone in
/// coordinates where every ray has positive coordinate sum.
fn volume(c: &Cone) -> Rat {
    let d = c.ambient();
    if c.dim() < d {
        return Rat::zero();
    }
    let rays = c.rays_rat();
    if rays.len() == d {
        let scaled: Vec<Vec<Rat>> = rays
            .iter()
            .map(|r| {
                let l: Rat = r.iter().sum();
                r.iter().map(|x| x / &l).collect()
            })
            .collect();
        return Matrix::from_rows(scaled).expect("square").det().abs();
    }
    // cone from the first ray over the facets that avoid it
    let apex = &rays[0];
    c.facets()
        .iter()
        .filter(|f| !f.closure_contains(apex))
        .map(|f| {
            let mut gens = f.rays_rat();
            gens.push(apex.clone());
            volume(&Cone::new(d, &gens).expect("subcone of a pointed cone"))
        })
        .sum()
}

const SEARCH_BUDGET: usize = 20_000;

/// Whether every cone of `fine` sits in the relative interior of a cone of `coarse` whose closure
/// holds it.
fn refines(coarse: &ConeComplex, fine: &ConeComplex) -> bool {
    fine.cones().iter().all(|t| {
        let p = t.interior_point();
        coarse.cones().iter().any(|c| c.contains(&p) && c.closure_contains_cone(t))
    })
}

/// Depth-first search for an order of star subdivisions, trying rays lexicographically.
fn star_order(
    current: &ConeComplex,
    remaining: &[Vec<BigInt>],
    target: &ConeComplex,
    budget: &mut usize,
) -> Result<Option<Vec<Vec<BigInt>>>, LogmodError> {
    if remaining.is_empty() {
        return Ok((current == target).then(Vec::new));
    }
    for (i, v) in remaining.iter().enumerate() {
        if *budget == 0 {
            return Err(LogmodError::NotReachableByStars("search budget exhausted".into()));
        }
        *budget -= 1;
        let next = star_subdivide_complex(current, &int_to_rat(v))?;
        if !refines(&next, target) {
            continue;
        }
        let mut rest = remaining.to_vec();
        rest.remove(i);
        if let Some(mut order) = star_order(&next, &rest, target, budget)? {
            order.insert(0, v.clone());
            return Ok(Some(order));
        }
    }
    Ok(None)
}

/// Star subdivisions at the target's new rays composing to the target. Rays are taken in
/// lexicographic order of their primitive generators; when that order fails, the first order
/// in the lexicographic search that succeeds is used.
pub fn subdivision_to_blowups(source: &Cone, target: &ConeComplex) -> Result<SubdivisionPlan, LogmodError> {
    if !source.is_simplicial() {
        return Err(LogmodError::NotSimplicial);
    }
    let amb = source.ambient();
    if target.ambient() != amb {
        return Err(LogmodError::NotARefinement(format!(
            "target lives in dimension {}, source in {amb}",
            target.ambient()
        )));
    }
    target.is_fan().map_err(|v| LogmodError::NotARefinement(format!("target is not a fan: {v}")))?;
    if let Some(c) = target.cones().iter().find(|c| !source.closure_contains_cone(c)) {
        return Err(LogmodError::NotARefinement(format!("{c:?} leaves the source cone")));
    }
    let basis = source.rays_rat();
    let d = basis.len();
    let local = |c: &Cone| -> Cone {
        let coords: Vec<Vec<Rat>> =
            c.rays_rat().iter().map(|r| solve_in(&basis, r).expect("inside the source span")).collect();
        Cone::new(d, &coords).expect("subcone of the source")
    };
    let covered: Rat = target.maximal_cones().iter().filter(|c| c.dim() == d).map(|c| volume(&local(c))).sum();
    if covered != volume(&local(source)) {
        return Err(LogmodError::NotARefinement("target does not cover the source cone".into()));
    }
    let mut new_rays: Vec<Vec<BigInt>> = target
        .cones()
        .iter()
        .filter(|c| c.dim() == 1)
        .map(|c| c.rays()[0].clone())
        .filter(|r| !source.rays().contains(r))
        .collect();
    new_rays.sort();
    let start = ConeComplex::new(amb, source.faces());
    let mut budget = SEARCH_BUDGET;
    let order = star_order(&start, &new_rays, target, &mut budget)?.ok_or_else(|| {
        LogmodError::NotReachableByStars(format!("no order of the {} new rays reproduces the target", new_rays.len()))
    })?;
    let mut current = start;
    let mut steps = Vec::new();
    for (n, v) in order.iter().enumerate() {
        let vr = int_to_rat(v);
        let mut charts = Vec::new();
        for m in current.maximal_cones() {
            if !m.closure_contains(&vr) {
                continue;
            }
            let weights = solve_in(&m.rays_rat(), &vr).expect("simplicial cone containing the ray");
            let results = chart_maps(m.rays(), &weights, v);
            charts.push(AffectedChart { rays: m.rays().to_vec(), weights, results });
        }
        current = star_subdivide_complex(&current, &vr)?;
        steps.push(BlowupStep { label: format!("E{}", n + 1), center: v.clone(), charts });
    }
    Ok(SubdivisionPlan { source: source.clone(), steps, target: target.clone() })
}

/// Charts replacing `chart` after the step's blow-up. The exceptional coordinate carries the log
/// given by the center's weights; all other coordinates keep their logs, and the limit value is
/// unchanged because the twisted period map is pulled back along the substitution.
pub fn blowup_chart(chart: &LocalChart, step: &BlowupStep) -> Result<Vec<LocalChart>, LogmodError> {
    let outside = || LogmodError::CenterOutside(ray_string(&step.center), chart.name.clone());
    if chart.rays.is_empty() || chart.rays[0].len() != step.center.len() {
        return Err(outside());
    }
    let weights = chart.weights(&step.center).ok_or_else(outside)?;
    let n = chart.logs[0].rows();
    let exceptional =
        chart.logs.iter().zip(&weights).fold(RationalMatrix::zeros(n, n), |acc, (m, w)| acc.add(&m.scale(w)));
    let mut out = Vec::new();
    for map in chart_maps(&chart.rays, &weights, &step.center) {
        let i = map.exceptional;
        let mut labels = chart.labels.clone();
        labels[i] = step.label.clone();
        let mut logs = chart.logs.clone();
        logs[i] = exceptional.clone();
        let name = labels[..logs.len()].join("∩");
        out.push(LocalChart { name, labels, rays: map.rays, logs, limit: chart.limit.clone() });
    }
    Ok(out)
}

/// All charts after running the plan on `chart`; charts whose cone misses a center pass
/// through that step unchanged.
pub fn apply_plan(chart: &LocalChart, plan: &SubdivisionPlan) -> Result<Vec<LocalChart>, LogmodError> {
    let mut charts = vec![chart.clone()];
    for step in &plan.steps {
        let mut next = Vec::new();
        for c in charts {
            if c.weights(&step.center).is_some() {
                next.extend(blowup_chart(&c, step)?);
            } else {
                next.push(c);
            }
        }
        charts = next;
    }
    Ok(charts)
}

/// Nilpotent-orbit label of a boundary stratum, relative to the chart's coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitLabel {
    pub chart: String,
    pub stratum: Vec<String>,
    pub cone: NilCone,
    pub limit: HodgeFiltration,
}

impl OrbitLabel {
    pub fn validate(&self, lattice: &SymplecticLattice, sign: PolarizationSign) -> Certificate {
        is_nilpotent_orbit(lattice, &self.cone, &self.limit, sign)
    }
}

/// `(⟨logs of the stratum's divisors⟩, ψ₀)` for the stratum where the listed coordinates vanish.
pub fn boundary_orbit(chart: &LocalChart, stratum: &[&str]) -> Result<OrbitLabel, LogmodError> {
    let limit = chart.limit.clone().ok_or_else(|| LogmodError::MissingLimit(chart.name.clone()))?;
    let mut gens = Vec::new();
    for &label in stratum {
        let Some(i) = chart.labels.iter().position(|l| l == label) else {
            return Err(LogmodError::UnknownLabel { chart: chart.name.clone(), label: label.into() });
        };
        if let Some(n) = chart.logs.get(i) {
            gens.push(n.clone());
        }
    }
    let cone = NilCone::new(gens).map_err(|e| LogmodError::InvalidChart(e.to_string()))?;
    Ok(OrbitLabel { chart: chart.name.clone(), stratum: stratum.iter().map(|s| s.to_string()).collect(), cone, limit })
}
