//! Command dispatch: each command turns a scenario into a [`Report`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use nilcone::cones::{chamber_subdivision, ComplexDocument, Cone, ConeComplex, MatrixFrame};
use nilcone::exact::{int_to_rat, RationalMatrix, Subspace};
use nilcone::fan::{build_weak_fan, strong_compatibility, weak_fan_check, ConeSystem, Verdict};
use nilcone::hodge::{
    classify_lmhs, cone_weight_filtration, cone_weight_filtration_with, face_witness, is_nilpotent_orbit,
    jm_weight_filtration, Family, HodgeFiltration, LmhsType, PolarizationSign, WeightFiltration,
};
use nilcone::logmod::{apply_plan, boundary_orbit, subdivision_to_blowups, LocalChart, LogmodError};
use nilcone::reduce::{preserves_filtration, type_i_restrict, type_iv_quotient, ReducedScenario, ReductionKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::report::{Provenance, Report};
use crate::scenario::{filtration_doc, matrix_doc, NamedFiltration, NamedMatrix, Options, Scenario, ScenarioCone};

/// Search bound for the imaginary shift used to find limits on faces.
pub const FACE_WITNESS_BOUND: i64 = 16;

/// Interior points sampled per cone by `jm`.
pub const JM_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Command {
    Jm,
    Classify,
    CheckOrbit,
    CheckFan,
    BuildFan,
    Reduce,
    Logmod,
    Subdivide,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Jm => "jm",
            Command::Classify => "classify",
            Command::CheckOrbit => "check-orbit",
            Command::CheckFan => "check-fan",
            Command::BuildFan => "build-fan",
            Command::Reduce => "reduce",
            Command::Logmod => "logmod",
            Command::Subdivide => "subdivide",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: u64,
    /// Overrides the scenario's type index set.
    pub phi: Option<BTreeSet<Family>>,
    /// Refuse fan computations in more ambient dimensions than this.
    pub max_dim: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("{command}: scenario has no {field}")]
    Missing { command: &'static str, field: &'static str },
    #[error("{command}: cones span {dim} dimensions, above --max-dim {max}")]
    TooLarge { command: &'static str, dim: usize, max: usize },
    #[error("{command}: {message}")]
    Module { command: &'static str, message: String },
}

struct Ctx<'a> {
    command: Command,
    scenario: &'a Scenario,
    opts: &'a RunOptions,
    rng: ChaCha8Rng,
}

impl Ctx<'_> {
    fn err(&self, e: impl ToString) -> RunError {
        RunError::Module { command: self.command.name(), message: e.to_string() }
    }

    fn missing(&self, field: &'static str) -> RunError {
        RunError::Missing { command: self.command.name(), field }
    }

    fn phi(&self) -> BTreeSet<Family> {
        self.opts.phi.clone().unwrap_or_else(|| self.scenario.phi.clone())
    }

    fn check_dim(&self, frame: &MatrixFrame) -> Result<(), RunError> {
        match self.opts.max_dim {
            Some(max) if frame.dim() > max => {
                Err(RunError::TooLarge { command: self.command.name(), dim: frame.dim(), max })
            }
            _ => Ok(()),
        }
    }

    fn all_generators(&self) -> Vec<RationalMatrix> {
        self.scenario.cones.iter().flat_map(|c| c.cone.generators().iter().cloned()).collect()
    }

    fn system(&self) -> Result<ConeSystem, RunError> {
        let s = self.scenario;
        if s.cones.is_empty() {
            return Err(self.missing("cones"));
        }
        let frame = MatrixFrame::spanning(&self.all_generators()).map_err(|e| self.err(e))?;
        self.check_dim(&frame)?;
        let mut sys = ConeSystem::new(
            s.lattice.clone(),
            s.cones.iter().map(|c| c.cone.clone()).collect(),
            s.group_elements.iter().map(|g| g.matrix.clone()).collect(),
            self.phi(),
            (0..s.cones.len()).map(|i| s.filtration_of(i).cloned()).collect(),
        )
        .map_err(|e| self.err(e))?;
        sys.sign = s.sign;
        Ok(sys)
    }
}

/// Run one command; `input` is the raw scenario file, hashed into the provenance.
pub fn run(command: Command, scenario: &Scenario, input: &[u8], opts: &RunOptions) -> Result<Report, RunError> {
    let start = Instant::now();
    let mut rep = Report::new(command.name(), &scenario.name, Provenance::new(input, opts.seed));
    let mut ctx = Ctx { command, scenario, opts, rng: ChaCha8Rng::seed_from_u64(opts.seed) };
    match command {
        Command::Jm => jm(&mut ctx, &mut rep)?,
        Command::Classify => classify(&ctx, &mut rep)?,
        Command::CheckOrbit => check_orbit(&ctx, &mut rep)?,
        Command::CheckFan => check_fan(&ctx, &mut rep)?,
        Command::BuildFan => build_fan(&ctx, &mut rep)?,
        Command::Reduce => reduce(&ctx, &mut rep)?,
        Command::Logmod => logmod(&ctx, &mut rep)?,
        Command::Subdivide => subdivide(&ctx, &mut rep)?,
    }
    rep.elapsed = start.elapsed();
    Ok(rep)
}

/// The four defining properties of the weight filtration of `n`, as `(check, holds, detail)`.
pub fn jm_properties(
    n: &RationalMatrix,
    w: &WeightFiltration,
    q: &RationalMatrix,
) -> Vec<(&'static str, bool, String)> {
    let dim = n.rows();
    let (lo, hi) = (w.lo(), w.hi());
    let lowering = (lo..=hi).find(|&k| !w.get(k - 2).contains_subspace(&w.get(k).image(n)));
    let iso = (1..=hi.max(0)).find(|&k| {
        let nk = n.pow(k as usize);
        w.gr_dim(k) != w.gr_dim(-k) || w.get(k).image(&nk).sum(&w.get(-k - 1)) != w.get(-k)
    });
    let mu = n.nilpotency_order().map_or(0, |m| m.saturating_sub(1));
    let image = Subspace::full(dim).image(&n.pow(mu));
    let bottom = image == w.get(-(mu as i32));
    let dual = (lo - 1..=hi).find(|&k| w.get(k).orthogonal(q) != w.get(-k - 1));
    let at = |k: Option<i32>, ok: &str| k.map_or(ok.to_string(), |k| format!("fails at k = {k}"));
    vec![
        ("N lowers weight by 2", lowering.is_none(), at(lowering, "N W_k ⊆ W_{k-2}")),
        ("hard Lefschetz", iso.is_none(), at(iso, "N^k: Gr_k ≅ Gr_{-k}")),
        ("bottom step", bottom, format!("W_{{-{mu}}} {} Im N^{mu}", if bottom { "=" } else { "≠" })),
        ("Q-duality", dual.is_none(), at(dual, "W_k^⊥ = W_{-k-1}")),
    ]
}

fn jm(ctx: &mut Ctx, rep: &mut Report) -> Result<(), RunError> {
    let s = ctx.scenario;
    if s.cones.is_empty() {
        return Err(ctx.missing("cones"));
    }
    let mut payload = Vec::new();
    let mut table = String::from("| cone | W(σ) graded dimensions (centered) |\n|---|---|\n");
    for c in &s.cones {
        if c.cone.is_empty() {
            rep.notes.push(format!("cone {} has no generators; skipped", c.name));
            continue;
        }
        let sampled = cone_weight_filtration_with(&c.cone, &mut ctx.rng, JM_SAMPLES);
        rep.push_bool(
            &c.name,
            "interior agreement",
            sampled.is_ok(),
            match &sampled {
                Ok(_) => format!("W agrees at the generator sum and {JM_SAMPLES} seeded interior points"),
                Err(e) => e.to_string(),
            },
        );
        let n = c.cone.interior();
        let w = jm_weight_filtration(&n);
        for (check, ok, detail) in jm_properties(&n, &w, s.lattice.q()) {
            rep.push_bool(&c.name, check, ok, detail);
        }
        let graded: Vec<Value> = (w.lo()..=w.hi()).map(|k| json!({"k": k, "dim": w.gr_dim(k)})).collect();
        let steps: Vec<usize> = (w.lo()..=w.hi()).map(|k| w.get(k).dim()).collect();
        let gr: Vec<String> = (w.lo()..=w.hi()).map(|k| format!("Gr_{k}: {}", w.gr_dim(k))).collect();
        let _ = writeln!(table, "| {} | {} |", c.name, gr.join(", "));
        payload.push(json!({
            "cone": c.name,
            "lowest": w.lo(),
            "highest": w.hi(),
            "step_dims": steps,
            "graded": graded,
            "limit_shift": s.lattice.weight(),
        }));
    }
    rep.section("Weight filtrations", table);
    rep.certificates = Value::Array(payload);
    Ok(())
}

fn ray_types(ctx: &Ctx, cone_idx: usize, f: &HodgeFiltration) -> Vec<Option<LmhsType>> {
    let s = ctx.scenario;
    let cone = &s.cones[cone_idx].cone;
    if cone.len() == 1 {
        return vec![classify_lmhs(&s.lattice, cone, f).ok()];
    }
    (0..cone.len())
        .map(|j| {
            let fw = face_witness(&s.lattice, cone, f, &[j], s.sign, FACE_WITNESS_BOUND)?;
            classify_lmhs(&s.lattice, &cone.face(&[j]), &fw).ok()
        })
        .collect()
}

fn type_name(t: &Option<LmhsType>) -> String {
    t.map_or_else(|| "unknown".into(), |t| t.to_string())
}

fn classify(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let s = ctx.scenario;
    let mut payload = Vec::new();
    let mut table = String::from("| cone | type | ray types |\n|---|---|---|\n");
    for (i, c) in s.cones.iter().enumerate() {
        let Some(f) = s.filtration_of(i) else {
            rep.notes.push(format!("cone {} carries no limit filtration; not classified", c.name));
            continue;
        };
        let ty = classify_lmhs(&s.lattice, &c.cone, f);
        rep.push_bool(
            &c.name,
            "classification",
            ty.is_ok(),
            ty.as_ref().map_or_else(ToString::to_string, ToString::to_string),
        );
        let ty = ty.ok();
        let rays = ray_types(ctx, i, f);
        let ray_names: Vec<String> = rays.iter().map(type_name).collect();
        if let Some(m) = s.options.manifest.iter().find(|m| m.cone == i) {
            let ok = ty == Some(m.interior) && rays.iter().zip(&m.rays).all(|(got, want)| *got == Some(*want));
            let want: Vec<String> = m.rays.iter().map(ToString::to_string).collect();
            rep.push_bool(
                &c.name,
                "manifest",
                ok,
                format!(
                    "expected {} on rays [{}], found {} on rays [{}]",
                    m.interior,
                    want.join(", "),
                    type_name(&ty),
                    ray_names.join(", ")
                ),
            );
        }
        let _ = writeln!(table, "| {} | {} | {} |", c.name, type_name(&ty), ray_names.join(", "));
        payload.push(json!({"cone": c.name, "type": type_name(&ty), "rays": ray_names}));
    }
    if payload.is_empty() {
        return Err(ctx.missing("cone with a limit filtration"));
    }
    rep.section("Types", table);
    rep.certificates = Value::Array(payload);
    Ok(())
}

fn check_orbit(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let s = ctx.scenario;
    let mut payload = Vec::new();
    for (i, c) in s.cones.iter().enumerate() {
        let Some(f) = s.filtration_of(i) else {
            rep.notes.push(format!("cone {} carries no limit filtration; not tested", c.name));
            continue;
        };
        let cert = is_nilpotent_orbit(&s.lattice, &c.cone, f, s.sign);
        rep.push_certificate(&c.name, "nilpotent orbit", &cert);
        payload.push(json!({"cone": c.name, "holds": cert.holds(), "checks": cert.checks}));
    }
    if payload.is_empty() {
        return Err(ctx.missing("cone with a limit filtration"));
    }
    rep.certificates = Value::Array(payload);
    Ok(())
}

fn check_fan(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let sys = ctx.system()?;
    let weak = weak_fan_check(&sys).map_err(|e| ctx.err(e))?;
    let strong = strong_compatibility(&sys);
    rep.push_fan("weak fan", &weak, true);
    rep.push_fan("strong compatibility", &strong, true);
    rep.certificates = json!({"weak_fan": weak, "strong_compatibility": strong});
    Ok(())
}

/// The refined system as a scenario, limits deduplicated.
fn system_scenario(name: String, sys: &ConeSystem, group_names: &[String]) -> Scenario {
    let mut filtrations: Vec<NamedFiltration> = Vec::new();
    let mut cones = Vec::new();
    for (k, (cone, limit)) in sys.cones.iter().zip(&sys.orbit_witnesses).enumerate() {
        let filtration = limit.as_ref().map(|f| match filtrations.iter().position(|g| &g.filtration == f) {
            Some(p) => p,
            None => {
                filtrations
                    .push(NamedFiltration { name: format!("limit_{}", filtrations.len() + 1), filtration: f.clone() });
                filtrations.len() - 1
            }
        });
        cones.push(ScenarioCone { name: format!("cell_{}", k + 1), cone: cone.clone(), filtration });
    }
    let group_elements = sys
        .witnesses
        .iter()
        .enumerate()
        .map(|(k, g)| NamedMatrix {
            name: group_names.get(k).cloned().unwrap_or_else(|| format!("g{}", k + 1)),
            matrix: g.matrix().clone(),
        })
        .collect();
    Scenario {
        name,
        lattice: sys.lattice.clone(),
        sign: sys.sign,
        filtrations,
        cones,
        group_elements,
        phi: sys.phi.clone(),
        charts: Vec::new(),
        options: Options::default(),
    }
}

fn build_fan(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let sys = ctx.system()?;
    let before = weak_fan_check(&sys).map_err(|e| ctx.err(e))?;
    let out = build_weak_fan(&sys).map_err(|e| ctx.err(e))?;
    let strong = strong_compatibility(&out.system);
    rep.push_fan("input", &before, false);
    rep.push_fan("refined", &out.report, true);
    rep.push_fan("refined", &strong, true);
    let names: Vec<String> = ctx.scenario.group_elements.iter().map(|g| g.name.clone()).collect();
    let refined = system_scenario(format!("{}_refined", ctx.scenario.name), &out.system, &names);
    rep.section(
        "Refinement",
        format!(
            "{} input cones, {} refined cells ({} maximal) after {} round(s).",
            sys.cones.len(),
            out.system.cones.len(),
            out.complex.maximal_cones().len(),
            out.rounds
        ),
    );
    rep.certificates = json!({
        "rounds": out.rounds,
        "input_check": before,
        "refined_check": out.report,
        "strong_compatibility": strong,
        "refined_complex": ComplexDocument::from_complex(&out.frame, &out.complex),
        "refined_scenario": refined.to_document(),
    });
    Ok(())
}

fn reduced_scenario(src: &Scenario, cone: &str, r: &ReducedScenario, witness_names: &[String]) -> Option<Scenario> {
    let kind = match r.kind {
        ReductionKind::TypeI => "type_i",
        ReductionKind::TypeIV => "type_iv",
    };
    Some(Scenario {
        name: format!("{}_{}_{kind}", src.name, cone),
        lattice: r.lattice.clone()?,
        sign: PolarizationSign::Standard,
        filtrations: vec![NamedFiltration { name: "limit".into(), filtration: r.filtration.clone()? }],
        cones: vec![ScenarioCone { name: cone.into(), cone: r.cone().ok()?, filtration: Some(0) }],
        group_elements: r
            .witnesses
            .iter()
            .zip(witness_names)
            .map(|(m, n)| NamedMatrix { name: n.clone(), matrix: m.clone() })
            .collect(),
        phi: [Family::I].into_iter().collect(),
        charts: Vec::new(),
        options: Options::default(),
    })
}

fn reduce(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let s = ctx.scenario;
    if s.lattice.weight() != 3 {
        return Err(ctx.err(format!("reductions start from weight 3, scenario has weight {}", s.lattice.weight())));
    }
    let mut payload = Vec::new();
    for (i, c) in s.cones.iter().enumerate() {
        let Some(f) = s.filtration_of(i) else {
            rep.notes.push(format!("cone {} carries no limit filtration; not reduced", c.name));
            continue;
        };
        let ty = classify_lmhs(&s.lattice, &c.cone, f).map_err(|e| ctx.err(e))?;
        let w = cone_weight_filtration(&c.cone).map_err(|e| ctx.err(e))?;
        let (kept, skipped): (Vec<&NamedMatrix>, Vec<&NamedMatrix>) =
            s.group_elements.iter().partition(|g| preserves_filtration(&w, &g.matrix));
        if !skipped.is_empty() {
            let names: Vec<&str> = skipped.iter().map(|g| g.name.as_str()).collect();
            rep.notes.push(format!(
                "{}: group elements {} do not preserve W(σ) and are not reduced",
                c.name,
                names.join(", ")
            ));
        }
        let mats: Vec<RationalMatrix> = kept.iter().map(|g| g.matrix.clone()).collect();
        let names: Vec<String> = kept.iter().map(|g| g.name.clone()).collect();
        let r = match ty.family() {
            Family::I if ty != LmhsType::Pure => type_i_restrict(&s.lattice, &c.cone, f, &mats),
            Family::IV => type_iv_quotient(&s.lattice, &c.cone, f, &mats),
            _ => {
                rep.notes.push(format!("cone {} has type {ty}; no reduction applies", c.name));
                continue;
            }
        }
        .map_err(|e| ctx.err(format!("{}: {e}", c.name)))?;
        let Some(lattice) = &r.lattice else {
            rep.notes.push(format!("cone {}: type I(0) reduces to the zero lattice", c.name));
            continue;
        };
        let gram = RationalMatrix::from_rows(
            r.basis.iter().map(|x| r.basis.iter().map(|y| s.lattice.q().pair(x, y)).collect()).collect(),
        )
        .map_err(|e| ctx.err(e))?;
        rep.push_bool(
            &c.name,
            "induced form",
            gram == *lattice.q(),
            "Q on the reduced basis equals the reduced lattice form",
        );
        if r.kind == ReductionKind::TypeIV {
            let h = s.lattice.h(1);
            rep.push_bool(
                &c.name,
                "quotient rank",
                lattice.rank() == 2 * h,
                format!("rank {} with h = {h}", lattice.rank()),
            );
        }
        if r.kind == ReductionKind::TypeIV {
            // positivity holds on primitive parts of the source, not on the whole quotient
            let verdict = if r.orbit.holds() { Verdict::Pass } else { Verdict::Fail };
            let detail =
                r.orbit.first_failure().map_or("all sub-checks hold".into(), |f| format!("{}: {}", f.name, f.detail));
            rep.push(&c.name, "reduced nilpotent orbit", verdict, false, detail);
            rep.notes.push(format!(
                "{}: the quotient form need not polarize the reduced triple; only its type is binding",
                c.name
            ));
        } else {
            rep.push_certificate(&c.name, "reduced nilpotent orbit", &r.orbit);
        }
        rep.push_bool(&c.name, "reduced type", r.classification.is_some(), type_name(&r.classification));
        let doc = reduced_scenario(s, &c.name, &r, &names).map(|sc| sc.to_document());
        payload.push(json!({
            "cone": c.name,
            "kind": r.kind,
            "source_type": ty.to_string(),
            "reduced_type": type_name(&r.classification),
            "index_denominator": r.index_denominator.to_string(),
            "basis": r.basis.iter().map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "reduced_scenario": doc,
            "provenance": {
                "source_scenario": s.name,
                "source_sha256": rep.provenance.input_sha256,
                "source_cone": c.name,
                "kind": r.kind,
            },
        }));
    }
    if payload.is_empty() {
        return Err(ctx.missing("cone of type I or IV with a limit filtration"));
    }
    rep.certificates = Value::Array(payload);
    Ok(())
}

fn logmod(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let s = ctx.scenario;
    if s.charts.is_empty() {
        return Err(ctx.missing("charts"));
    }
    if s.options.subdivision.is_empty() {
        return Err(ctx.missing("options.subdivision"));
    }
    let mut payload = Vec::new();
    for chart in &s.charts {
        let gens = s.cones[chart.cone].cone.generators().to_vec();
        let frame = MatrixFrame::spanning(&gens).map_err(|e| ctx.err(e))?;
        ctx.check_dim(&frame)?;
        let source = frame.cone(&gens).map_err(|e| ctx.err(e))?;
        let targets =
            s.options.subdivision.iter().map(|g| frame.cone(g)).collect::<Result<Vec<Cone>, _>>().map_err(|e| {
                ctx.err(format!("chart {}: target cone outside the span of its monodromy logarithms ({e})", chart.name))
            })?;
        let target = ConeComplex::new(frame.dim(), targets.iter().flat_map(Cone::faces));
        let plan = match subdivision_to_blowups(&source, &target) {
            Ok(p) => p,
            Err(
                e @ (LogmodError::NotARefinement(_) | LogmodError::NotReachableByStars(_) | LogmodError::NotSimplicial),
            ) => {
                rep.push_bool(&chart.name, "blow-up plan", false, e.to_string());
                continue;
            }
            Err(e) => return Err(ctx.err(e)),
        };
        rep.push_bool(&chart.name, "blow-up plan", true, format!("{} star subdivision(s)", plan.steps.len()));
        let rays = gens.iter().map(|g| frame.coordinates(g).expect("generator in its own span")).collect();
        let limit = s.filtration_of(chart.cone).cloned();
        let local = LocalChart::new(chart.name.clone(), chart.labels.clone(), rays, gens.clone(), limit.clone())
            .map_err(|e| ctx.err(e))?;
        let charts = apply_plan(&local, &plan).map_err(|e| ctx.err(e))?;
        let exceptional: Vec<Value> = plan
            .steps
            .iter()
            .map(|st| json!({"label": st.label, "log": matrix_doc(&frame.matrix(&int_to_rat(&st.center)))}))
            .collect();
        let mut labels = Vec::new();
        let mut listing = String::new();
        if limit.is_none() {
            rep.notes.push(format!("chart {} carries no limit filtration; boundary orbit labels skipped", chart.name));
        }
        for c in charts.iter().filter(|_| limit.is_some()) {
            for st in &plan.steps {
                if !c.labels().contains(&st.label) {
                    continue;
                }
                let label = boundary_orbit(c, &[st.label.as_str()]).map_err(|e| ctx.err(e))?;
                let cert = label.validate(&s.lattice, s.sign);
                rep.push_certificate(&format!("{} / {}", c.name(), st.label), "boundary orbit", &cert);
                let gens: Vec<String> = label.cone.generators().iter().map(matrix_text).collect();
                let _ = writeln!(
                    listing,
                    "- chart `{}`, divisor {}: cone ⟨{}⟩ with the chart's limit",
                    c.name(),
                    st.label,
                    gens.join(", ")
                );
                labels.push(json!({
                    "chart": c.name(),
                    "stratum": label.stratum,
                    "generators": label.cone.generators().iter().map(matrix_doc).collect::<Vec<_>>(),
                    "limit": filtration_doc("limit", &label.limit),
                }));
            }
        }
        let chart_docs: Vec<Value> = charts
            .iter()
            .map(|c| json!({"name": c.name(), "labels": c.labels(), "logs": c.logs().iter().map(matrix_doc).collect::<Vec<_>>()}))
            .collect();
        rep.section(format!("Blow-up script for chart {}", chart.name), format!("```\n{}```", plan.script()));
        if !listing.is_empty() {
            rep.section(format!("Boundary orbits over chart {}", chart.name), listing);
        }
        payload.push(json!({
            "chart": chart.name,
            "plan": plan,
            "exceptional_logs": exceptional,
            "charts": chart_docs,
            "orbit_labels": labels,
        }));
    }
    rep.notes.push("Orbit labels are relative to the recorded chart coordinates.".into());
    rep.certificates = Value::Array(payload);
    Ok(())
}

/// `[a b; c d]` with entries in lowest terms.
pub fn matrix_text(m: &RationalMatrix) -> String {
    let rows: Vec<String> =
        (0..m.rows()).map(|i| m.row(i).iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

fn subdivide(ctx: &Ctx, rep: &mut Report) -> Result<(), RunError> {
    let s = ctx.scenario;
    if s.cones.is_empty() {
        return Err(ctx.missing("cones"));
    }
    let frame = MatrixFrame::spanning(&ctx.all_generators()).map_err(|e| ctx.err(e))?;
    ctx.check_dim(&frame)?;
    let cones = s
        .cones
        .iter()
        .map(|c| frame.cone(c.cone.generators()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ctx.err(e))?;
    let input = ConeComplex::new(frame.dim(), cones.iter().flat_map(Cone::faces));
    let input_fan = input.is_fan();
    rep.push(
        "input",
        "fan",
        if input_fan.is_ok() { Verdict::Pass } else { Verdict::Fail },
        false,
        input_fan.as_ref().map_or_else(ToString::to_string, |_| "cones meet along common faces".into()),
    );
    let refined = chamber_subdivision(&input).map_err(|e| ctx.err(e))?;
    let out_fan = refined.is_fan();
    rep.push_bool(
        "refined",
        "fan",
        out_fan.is_ok(),
        out_fan.as_ref().map_or_else(ToString::to_string, |_| "cones meet along common faces".into()),
    );
    let covered = input.cones().iter().all(|c| refined.support_contains(&c.interior_point()));
    let inside = refined.cones().iter().all(|c| input.support_contains(&c.interior_point()));
    rep.push_bool(
        "refined",
        "support",
        covered && inside,
        "interior points of every input cell lie in the refined support and conversely",
    );
    rep.section(
        "Subdivision",
        format!(
            "{} input cells, {} refined cells ({} maximal) in {} dimensions.",
            input.len(),
            refined.len(),
            refined.maximal_cones().len(),
            frame.dim()
        ),
    );
    rep.certificates = json!({
        "ambient_dim": frame.dim(),
        "input_cells": input.len(),
        "refined": ComplexDocument::from_complex(&frame, &refined),
    });
    Ok(())
}
