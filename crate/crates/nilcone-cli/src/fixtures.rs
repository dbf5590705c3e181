//! Scenario files shipped in `fixtures/`, built from the library's hand-made examples.

use nilcone::fixtures as lib;
use nilcone::hodge::{Family, NilCone, PolarizationSign};

use crate::scenario::{Chart, ManifestEntry, NamedFiltration, NamedMatrix, Options, Scenario, ScenarioCone};

fn single(s: lib::Scenario, name: &str, phi: &[Family]) -> Scenario {
    Scenario {
        name: name.into(),
        lattice: s.lattice,
        sign: PolarizationSign::Standard,
        filtrations: vec![NamedFiltration { name: "limit".into(), filtration: s.filtration }],
        cones: vec![ScenarioCone { name: "sigma".into(), cone: s.cone, filtration: Some(0) }],
        group_elements: Vec::new(),
        phi: phi.iter().copied().collect(),
        charts: Vec::new(),
        options: Options::default(),
    }
}

/// Weight one, genus one, Hodge–Tate.
pub fn elliptic_ht() -> Scenario {
    single(lib::elliptic_ht(), "elliptic_ht", &[Family::I])
}

/// Weight three, Hodge numbers (1,1,1,1), type I(1).
pub fn cy3_i1() -> Scenario {
    single(lib::cy3_i1(), "cy3_i1", &[Family::I])
}

/// Weight three, Hodge numbers (1,1,1,1), type IV(1).
pub fn cy3_iv_h1() -> Scenario {
    single(lib::cy3_iv1(), "cy3_iv_h1", &[Family::IV])
}

/// Genus-two quadrant with a chart and the subdivision along the diagonal ray.
pub fn blowup_example() -> Scenario {
    let ex = lib::blowup_example();
    let mut s = single(ex.scenario, "blowup_example", &[Family::I]);
    s.cones[0].name = "quadrant".into();
    s.charts.push(Chart { name: "origin".into(), cone: 0, labels: vec!["x".into(), "y".into()] });
    s.options.subdivision = ex.refined.iter().map(|pair| pair.to_vec()).collect();
    s
}

/// Weight-three census-like system: three IV/IV, three IV/I and six I/I cones, three Levi elements.
pub fn ht14_like() -> Scenario {
    let ex = lib::ht14_like();
    let sys = ex.system;
    let (f_iv, f_i) = lib::ht14_limits();
    let filtrations = vec![
        NamedFiltration { name: "limit_iv".into(), filtration: f_iv.clone() },
        NamedFiltration { name: "limit_i".into(), filtration: f_i },
    ];
    let prefixes = ["iv_iv", "iv_iv", "iv_iv", "iv_i", "iv_i", "iv_i", "i_i", "i_i", "i_i", "i_i", "i_i", "i_i"];
    let mut counts = std::collections::BTreeMap::new();
    let cones: Vec<ScenarioCone> = sys
        .cones
        .iter()
        .zip(&sys.orbit_witnesses)
        .zip(prefixes)
        .map(|((c, f), p): ((&NilCone, _), _)| {
            let k = counts.entry(p).or_insert(0);
            *k += 1;
            let filtration = Some(if f.as_ref() == Some(&f_iv) { 0 } else { 1 });
            ScenarioCone { name: format!("{p}_{k}"), cone: c.clone(), filtration }
        })
        .collect();
    let manifest = ex
        .manifest
        .iter()
        .enumerate()
        .map(|(i, [a, b, c])| ManifestEntry { cone: i, rays: vec![*a, *c], interior: *b })
        .collect();
    let names = ["swap", "shear_upper", "shear_lower"];
    let group_elements = sys
        .witnesses
        .iter()
        .zip(names)
        .map(|(g, n)| NamedMatrix { name: n.into(), matrix: g.matrix().clone() })
        .collect();
    Scenario {
        name: "ht14_like".into(),
        lattice: sys.lattice,
        sign: PolarizationSign::Standard,
        filtrations,
        cones,
        group_elements,
        phi: sys.phi,
        charts: Vec::new(),
        options: Options { subdivision: Vec::new(), manifest },
    }
}

/// `(file name, scenario)` for every bundled fixture.
pub fn bundled() -> Vec<(&'static str, Scenario)> {
    vec![
        ("elliptic_ht.json", elliptic_ht()),
        ("cy3_i1.json", cy3_i1()),
        ("cy3_iv_h1.json", cy3_iv_h1()),
        ("blowup_example.json", blowup_example()),
        ("ht14_like.json", ht14_like()),
    ]
}
