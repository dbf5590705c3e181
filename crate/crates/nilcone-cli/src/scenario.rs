//! Scenario files: the JSON document, ingestion with validation, and serialization back.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use nilcone::exact::{parse_rat, Gauss, Matrix, Rat, RationalMatrix};
use nilcone::fan::integral_exponent;
use nilcone::hodge::{Family, HodgeError, HodgeFiltration, LmhsType, NilCone, PolarizationSign, SymplecticLattice};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `k` tried when asking for `exp(kN)` to be integral.
pub const UNIPOTENT_EXPONENT_BOUND: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("SchemaError in {field}: {message}")]
    Schema { field: String, message: String },
    #[error("InvariantError in {field}: {check} failed ({detail})")]
    Invariant { field: String, check: String, detail: String },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> IngestError {
    IngestError::Schema { field: field.into(), message: message.into() }
}

fn invariant(field: impl Into<String>, check: &str, detail: impl Into<String>) -> IngestError {
    IngestError::Invariant { field: field.into(), check: check.into(), detail: detail.into() }
}

/// A matrix or vector entry: a JSON integer, or a string such as `"-3/4"` or `"1/2-2i"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn rational(&self, field: &str) -> Result<Rat, IngestError> {
        match self {
            Entry::Int(n) => Ok(Rat::from_integer((*n).into())),
            Entry::Text(s) => parse_rat(s).map_err(|_| schema(field, format!("{s:?} is not a rational number"))),
        }
    }

    fn gaussian(&self, field: &str) -> Result<Gauss, IngestError> {
        match self {
            Entry::Int(n) => Ok(Gauss::real(Rat::from_integer((*n).into()))),
            Entry::Text(s) => s.parse().map_err(|_| schema(field, format!("{s:?} is not a Gaussian rational"))),
        }
    }

    fn of_rat(x: &Rat) -> Entry {
        match x.is_integer().then(|| i64::try_from(&x.to_integer()).ok()).flatten() {
            Some(n) => Entry::Int(n),
            None => Entry::Text(x.to_string()),
        }
    }

    fn of_gauss(x: &Gauss) -> Entry {
        if x.is_real() {
            Entry::of_rat(&x.re)
        } else {
            Entry::Text(x.to_string())
        }
    }
}

pub type MatrixDoc = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: u32,
    pub name: String,
    pub lattice: LatticeDoc,
    #[serde(default)]
    pub filtrations: Vec<FiltrationDoc>,
    pub cones: Vec<ConeDoc>,
    #[serde(default)]
    pub group_elements: Vec<GroupDoc>,
    #[serde(default)]
    pub phi: Vec<String>,
    #[serde(default)]
    pub charts: Vec<ChartDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    /// Gram matrix of the alternating form.
    pub form: MatrixDoc,
    pub weight: i32,
    /// `h^{p, weight-p}` for `p = 0..=weight`.
    pub hodge_numbers: Vec<usize>,
    #[serde(default)]
    pub sign: PolarizationSign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDoc {
    pub name: String,
    /// Index of the first listed step; steps below it are the whole space.
    pub first: i32,
    /// Spanning vectors of each step, outermost first.
    pub steps: Vec<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDoc {
    pub name: String,
    pub generators: Vec<MatrixDoc>,
    /// Name of a filtration making the cone a nilpotent orbit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub name: String,
    pub matrix: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    pub name: String,
    pub cone: String,
    /// One coordinate label per cone generator.
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    /// Maximal cones of a target subdivision, as generator matrices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subdivision: Vec<Vec<MatrixDoc>>,
    /// Intended types per cone, checked by `classify`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub manifest: Vec<ManifestDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestDoc {
    pub cone: String,
    /// Types on the rays, in generator order.
    pub rays: Vec<String>,
    pub interior: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFiltration {
    pub name: String,
    pub filtration: HodgeFiltration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioCone {
    pub name: String,
    pub cone: NilCone,
    /// Index into [`Scenario::filtrations`].
    pub filtration: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: RationalMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    /// Index into [`Scenario::cones`].
    pub cone: usize,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub cone: usize,
    pub rays: Vec<LmhsType>,
    pub interior: LmhsType,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub subdivision: Vec<Vec<RationalMatrix>>,
    pub manifest: Vec<ManifestEntry>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub lattice: SymplecticLattice,
    pub sign: PolarizationSign,
    pub filtrations: Vec<NamedFiltration>,
    pub cones: Vec<ScenarioCone>,
    pub group_elements: Vec<NamedMatrix>,
    pub phi: BTreeSet<Family>,
    pub charts: Vec<Chart>,
    pub options: Options,
}

impl Scenario {
    pub fn filtration_of(&self, cone: usize) -> Option<&HodgeFiltration> {
        self.cones[cone].filtration.map(|k| &self.filtrations[k].filtration)
    }

    pub fn cone_index(&self, name: &str) -> Option<usize> {
        self.cones.iter().position(|c| c.name == name)
    }

    pub fn to_document(&self) -> Document {
        Document {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            lattice: LatticeDoc {
                form: matrix_doc(self.lattice.q()),
                weight: self.lattice.weight(),
                hodge_numbers: self.lattice.hodge_numbers().to_vec(),
                sign: self.sign,
            },
            filtrations: self.filtrations.iter().map(|f| filtration_doc(&f.name, &f.filtration)).collect(),
            cones: self
                .cones
                .iter()
                .map(|c| ConeDoc {
                    name: c.name.clone(),
                    generators: c.cone.generators().iter().map(matrix_doc).collect(),
                    filtration: c.filtration.map(|k| self.filtrations[k].name.clone()),
                })
                .collect(),
            group_elements: self
                .group_elements
                .iter()
                .map(|g| GroupDoc { name: g.name.clone(), matrix: matrix_doc(&g.matrix) })
                .collect(),
            phi: self.phi.iter().map(family_name).collect(),
            charts: self
                .charts
                .iter()
                .map(|c| ChartDoc {
                    name: c.name.clone(),
                    cone: self.cones[c.cone].name.clone(),
                    labels: c.labels.clone(),
                })
                .collect(),
            options: OptionsDoc {
                subdivision: self.options.subdivision.iter().map(|c| c.iter().map(matrix_doc).collect()).collect(),
                manifest: self
                    .options
                    .manifest
                    .iter()
                    .map(|m| ManifestDoc {
                        cone: self.cones[m.cone].name.clone(),
                        rays: m.rays.iter().map(ToString::to_string).collect(),
                        interior: m.interior.to_string(),
                    })
                    .collect(),
            },
        }
    }

    /// Pretty JSON with a trailing newline; stable across runs.
    pub fn to_json(&self) -> String {
        crate::json::to_string(&self.to_document())
    }
}

pub fn family_name(f: &Family) -> String {
    match f {
        Family::Pure => "pure".into(),
        Family::I => "I".into(),
        Family::II => "II".into(),
        Family::III => "III".into(),
        Family::IV => "IV".into(),
    }
}

pub fn matrix_doc(m: &RationalMatrix) -> MatrixDoc {
    (0..m.rows()).map(|i| m.row(i).iter().map(Entry::of_rat).collect()).collect()
}

pub fn filtration_doc(name: &str, f: &HodgeFiltration) -> FiltrationDoc {
    FiltrationDoc {
        name: name.into(),
        first: f.first(),
        steps: f.spans().iter().map(|s| s.iter().map(|v| v.iter().map(Entry::of_gauss).collect()).collect()).collect(),
    }
}

pub fn ingest(path: &Path) -> Result<Scenario, IngestError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IngestError::Io { path: path.display().to_string(), message: e.to_string() })?;
    ingest_str(&text)
}

pub fn ingest_str(text: &str) -> Result<Scenario, IngestError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => schema(field, strip_position(&inner.to_string())),
            _ => IngestError::Parse {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            },
        }
    })?;
    de.end().map_err(|e| IngestError::Parse {
        line: e.line(),
        column: e.column(),
        message: "trailing characters".into(),
    })?;
    validate(&doc)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(k) => msg[..k].to_string(),
        None => msg.to_string(),
    }
}

fn rational_matrix(doc: &MatrixDoc, field: &str, size: Option<usize>) -> Result<RationalMatrix, IngestError> {
    let rows = doc
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, x)| x.rational(&format!("{field}[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<Rat>>, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
        return Err(schema(field, "matrix rows must be nonempty and of equal length"));
    }
    if rows.len() != cols {
        return Err(schema(field, format!("matrix is {}x{cols}, expected square", rows.len())));
    }
    if let Some(n) = size {
        if cols != n {
            return Err(schema(field, format!("matrix has size {cols}, lattice rank is {n}")));
        }
    }
    Ok(Matrix::from_rows(rows).expect("rectangular"))
}

fn unique_names<'a>(names: impl Iterator<Item = &'a String>, field: &str) -> Result<(), IngestError> {
    let mut seen = HashSet::new();
    for (i, n) in names.enumerate() {
        if !seen.insert(n) {
            return Err(schema(format!("{field}[{i}].name"), format!("duplicate name {n:?}")));
        }
    }
    Ok(())
}

fn lattice_error(e: HodgeError) -> IngestError {
    match e {
        HodgeError::Lattice(check) if check.starts_with('Q') => {
            invariant("lattice.form", &check, "Gram matrix of the form")
        }
        HodgeError::Lattice(check) => invariant("lattice.hodge_numbers", "Hodge numbers", check),
        other => invariant("lattice", "lattice", other.to_string()),
    }
}

fn validate(doc: &Document) -> Result<Scenario, IngestError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(schema(
            "schema_version",
            format!("unsupported version {} (expected {SCHEMA_VERSION})", doc.schema_version),
        ));
    }
    let q = rational_matrix(&doc.lattice.form, "lattice.form", None)?;
    let lattice =
        SymplecticLattice::new(q, doc.lattice.weight, doc.lattice.hodge_numbers.clone()).map_err(lattice_error)?;
    let n = lattice.rank();

    unique_names(doc.filtrations.iter().map(|f| &f.name), "filtrations")?;
    let mut filtrations = Vec::new();
    for (i, f) in doc.filtrations.iter().enumerate() {
        let field = format!("filtrations[{i}]");
        let mut spans = Vec::new();
        for (s, step) in f.steps.iter().enumerate() {
            let mut vecs = Vec::new();
            for (k, v) in step.iter().enumerate() {
                let vf = format!("{field}.steps[{s}][{k}]");
                if v.len() != n {
                    return Err(schema(vf, format!("vector has length {}, lattice rank is {n}", v.len())));
                }
                vecs.push(
                    v.iter()
                        .enumerate()
                        .map(|(j, x)| x.gaussian(&format!("{vf}[{j}]")))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            spans.push(vecs);
        }
        let filtration = HodgeFiltration::from_spans(f.first, &spans, n)
            .map_err(|e| invariant(format!("{field}.steps"), "decreasing flag", e.to_string()))?;
        lattice
            .check_flag(&filtration)
            .map_err(|e| invariant(format!("{field}.steps"), "compact dual", e.to_string()))?;
        filtrations.push(NamedFiltration { name: f.name.clone(), filtration });
    }

    unique_names(doc.cones.iter().map(|c| &c.name), "cones")?;
    let mut cones = Vec::new();
    for (i, c) in doc.cones.iter().enumerate() {
        let field = format!("cones[{i}]");
        let mut gens = Vec::new();
        for (j, g) in c.generators.iter().enumerate() {
            let gf = format!("{field}.generators[{j}]");
            let m = rational_matrix(g, &gf, Some(n))?;
            if !m.is_nilpotent() {
                return Err(invariant(gf, "nilpotency", "generator is not nilpotent"));
            }
            if !lattice.is_lie(&m) {
                return Err(invariant(gf, "Q infinitesimal isometry", "Q(Nx, y) + Q(x, Ny) ≠ 0"));
            }
            if integral_exponent(&m, UNIPOTENT_EXPONENT_BOUND).is_none() {
                return Err(invariant(
                    gf,
                    "unipotent integrality",
                    format!("exp(kN) is not integral for any k ≤ {UNIPOTENT_EXPONENT_BOUND}"),
                ));
            }
            gens.push(m);
        }
        for a in 0..gens.len() {
            for b in a + 1..gens.len() {
                if !gens[a].commutator(&gens[b]).is_zero() {
                    return Err(invariant(
                        format!("{field}.generators"),
                        "commutation",
                        format!("generators {a} and {b} do not commute"),
                    ));
                }
            }
        }
        let cone = NilCone::new(gens)
            .map_err(|e| invariant(format!("{field}.generators"), "linear independence", e.to_string()))?;
        let filtration = match &c.filtration {
            None => None,
            Some(name) => Some(
                filtrations
                    .iter()
                    .position(|f| &f.name == name)
                    .ok_or_else(|| schema(format!("{field}.filtration"), format!("unknown filtration {name:?}")))?,
            ),
        };
        cones.push(ScenarioCone { name: c.name.clone(), cone, filtration });
    }

    unique_names(doc.group_elements.iter().map(|g| &g.name), "group_elements")?;
    let mut group_elements = Vec::new();
    for (i, g) in doc.group_elements.iter().enumerate() {
        let field = format!("group_elements[{i}].matrix");
        let m = rational_matrix(&g.matrix, &field, Some(n))?;
        if !m.is_integral() {
            return Err(invariant(field, "integrality", "group element has non-integral entries"));
        }
        if !lattice.preserves(&m) {
            return Err(invariant(field, "Q preservation", "gᵀ Q g ≠ Q"));
        }
        group_elements.push(NamedMatrix { name: g.name.clone(), matrix: m });
    }

    let mut phi = BTreeSet::new();
    for (i, p) in doc.phi.iter().enumerate() {
        phi.insert(p.parse::<Family>().map_err(|_| schema(format!("phi[{i}]"), format!("unknown type family {p:?}")))?);
    }

    unique_names(doc.charts.iter().map(|c| &c.name), "charts")?;
    let mut charts = Vec::new();
    for (i, c) in doc.charts.iter().enumerate() {
        let field = format!("charts[{i}]");
        let cone = cones
            .iter()
            .position(|k| k.name == c.cone)
            .ok_or_else(|| schema(format!("{field}.cone"), format!("unknown cone {:?}", c.cone)))?;
        if c.labels.len() != cones[cone].cone.len() {
            return Err(schema(
                format!("{field}.labels"),
                format!("{} labels for a cone with {} generators", c.labels.len(), cones[cone].cone.len()),
            ));
        }
        if c.labels.iter().collect::<HashSet<_>>().len() != c.labels.len() {
            return Err(schema(format!("{field}.labels"), "labels must be distinct"));
        }
        charts.push(Chart { name: c.name.clone(), cone, labels: c.labels.clone() });
    }

    let mut subdivision = Vec::new();
    for (i, c) in doc.options.subdivision.iter().enumerate() {
        let gens = c
            .iter()
            .enumerate()
            .map(|(j, m)| rational_matrix(m, &format!("options.subdivision[{i}][{j}]"), Some(n)))
            .collect::<Result<Vec<_>, _>>()?;
        subdivision.push(gens);
    }
    let mut manifest = Vec::new();
    for (i, m) in doc.options.manifest.iter().enumerate() {
        let field = format!("options.manifest[{i}]");
        let cone = cones
            .iter()
            .position(|k| k.name == m.cone)
            .ok_or_else(|| schema(format!("{field}.cone"), format!("unknown cone {:?}", m.cone)))?;
        if m.rays.len() != cones[cone].cone.len() {
            return Err(schema(format!("{field}.rays"), "one type per generator"));
        }
        let ty = |s: &String, f: String| s.parse::<LmhsType>().map_err(|_| schema(f, format!("unknown type {s:?}")));
        let rays =
            m.rays.iter().enumerate().map(|(j, s)| ty(s, format!("{field}.rays[{j}]"))).collect::<Result<_, _>>()?;
        manifest.push(ManifestEntry { cone, rays, interior: ty(&m.interior, format!("{field}.interior"))? });
    }

    Ok(Scenario {
        name: doc.name.clone(),
        lattice,
        sign: doc.lattice.sign,
        filtrations,
        cones,
        group_elements,
        phi,
        charts,
        options: Options { subdivision, manifest },
    })
}
