//! Scenario files: a versioned JSON description of a verification run, plus
//! the dispatcher that executes it and produces a report.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use supergc_core::algebra::{
    adjoint_exp, classical_algebra, realize_classical, realize_susy, structure_match,
    susy_algebra, AlgebraElement, AlgebraError, StructureConstants, VectorFieldError,
};
use supergc_core::catalog::{default_points, verify, CatalogError, FamilyId, FamilyParameters, VerifyConfig};
use supergc_core::geometry::{
    assemble_frames, classical_gc_residuals, gc_residuals, matrix_max_abs, zcc_residual,
    ClassicalData, ClassicalError, FrameCoefficients, FrameError,
};
use supergc_core::grassmann::Parity;
use supergc_core::jet::BasePoint;
use supergc_core::report::{CheckResult, Report};
use supergc_core::ring::Ring;
use supergc_core::GrassmannError;

use crate::eval::{eval_field, EvalContext, EvalError};
use crate::expr::{parse, ParseError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unsupported scenario version {0} (expected 1)")]
    Version(u32),
    #[error("scenario is missing required entry {0}")]
    Missing(&'static str),
    #[error("unknown algebra {0} (expected susy or classical)")]
    UnknownAlgebra(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    VectorField(#[from] VectorFieldError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SusyGc,
    ClassicalGc,
    Catalog,
    Brackets,
    Adjoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampler {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Sampling box `[xp_min, xp_max, xm_min, xm_max]` on the real parts.
    #[serde(default = "default_box")]
    pub range: [f64; 4],
}

fn default_box() -> [f64; 4] {
    [-1.0, 1.0, -1.0, 1.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Scenario {
    pub version: u32,
    #[serde(default = "default_generators")]
    pub generators: usize,
    #[serde(default = "default_order")]
    pub jet_order: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub mode: Mode,
    /// Explicit points `[re x+, im x+, re x-, im x-]`.
    #[serde(default)]
    pub points: Vec<[f64; 4]>,
    #[serde(default)]
    pub sampler: Option<Sampler>,
    /// Named complex parameters available to all field expressions.
    #[serde(default)]
    pub parameters: BTreeMap<String, Complex64>,
    /// Field definitions as expressions (susy-gc and classical-gc modes).
    #[serde(default)]
    pub fields: BTreeMap<String, String>,
    /// Catalog mode: family name and parameters.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub family_parameters: Option<FamilyParameters>,
    /// Brackets and adjoint modes.
    #[serde(default)]
    pub algebra: Option<String>,
    /// Adjoint mode: coordinate expressions for the group generator X and
    /// the transported element Y, plus the expected result.
    #[serde(default)]
    pub adjoint_x: BTreeMap<String, String>,
    #[serde(default)]
    pub adjoint_y: BTreeMap<String, String>,
    #[serde(default)]
    pub adjoint_expected: BTreeMap<String, String>,
}

fn default_generators() -> usize {
    8
}
fn default_order() -> usize {
    4
}
fn default_tolerance() -> f64 {
    1e-10
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let sc: Scenario = serde_json::from_str(text)?;
        if sc.version != 1 {
            return Err(ScenarioError::Version(sc.version));
        }
        Ok(sc)
    }

    pub fn evaluation_points(&self, family: Option<FamilyId>) -> Vec<BasePoint> {
        let mut pts: Vec<BasePoint> = self
            .points
            .iter()
            .map(|p| {
                BasePoint::new(
                    Complex64::new(p[0], p[1]),
                    Complex64::new(p[2], p[3]),
                )
            })
            .collect();
        if let Some(s) = &self.sampler {
            if let Some(fam) = family {
                pts.extend(default_points(fam, s.count, s.seed));
            } else {
                let mut rng = StdRng::seed_from_u64(s.seed);
                for _ in 0..s.count {
                    pts.push(BasePoint::real(
                        rng.gen_range(s.range[0]..s.range[1]),
                        rng.gen_range(s.range[2]..s.range[3]),
                    ));
                }
            }
        }
        if pts.is_empty() {
            pts.push(BasePoint::real(0.25, -0.4));
        }
        pts
    }
}

const SUSY_FIELDS: [(&str, Parity); 11] = [
    ("phi", Parity::Even),
    ("H", Parity::Even),
    ("Q+", Parity::Even),
    ("Q-", Parity::Even),
    ("R+", Parity::Odd),
    ("R-", Parity::Odd),
    ("S+", Parity::Odd),
    ("S-", Parity::Odd),
    ("T+", Parity::Odd),
    ("T-", Parity::Odd),
    ("f", Parity::Even),
];

pub fn run(scenario: &Scenario) -> Result<Report, ScenarioError> {
    match scenario.mode {
        Mode::SusyGc => run_susy_gc(scenario),
        Mode::ClassicalGc => run_classical_gc(scenario),
        Mode::Catalog => run_catalog(scenario),
        Mode::Brackets => run_brackets(scenario),
        Mode::Adjoint => run_adjoint(scenario),
    }
}

fn run_susy_gc(scenario: &Scenario) -> Result<Report, ScenarioError> {
    let mut report = Report::new("susy-gc");
    let points = scenario.evaluation_points(None);
    let names = ["gc-i", "gc-ii", "gc-iii", "gc-iv", "gc-v", "gc-vi"];
    let mut worst = vec![(0.0f64, "1".to_string(), [0usize; 2], [0.0f64; 4]); 6];
    let mut zcc_worst = (0.0f64, "1".to_string(), [0usize; 2], [0.0f64; 4]);
    let mut scale = 1.0f64;

    // parse once
    let mut exprs = BTreeMap::new();
    for (name, _) in SUSY_FIELDS {
        let src = scenario
            .fields
            .get(name)
            .cloned()
            .unwrap_or_else(|| "0".to_string());
        exprs.insert(name, parse(&src)?);
    }

    for pt in points {
        let ctx = EvalContext {
            k: scenario.generators,
            order: scenario.jet_order,
            at: pt,
            params: scenario.parameters.clone(),
        };
        let mut fields = BTreeMap::new();
        for (name, parity) in SUSY_FIELDS {
            fields.insert(name, eval_field(name, &exprs[name], parity, &ctx)?);
        }
        let coeffs = FrameCoefficients {
            phi: fields["phi"].clone(),
            h: fields["H"].clone(),
            q_plus: fields["Q+"].clone(),
            q_minus: fields["Q-"].clone(),
            r_plus: fields["R+"].clone(),
            r_minus: fields["R-"].clone(),
            s_plus: fields["S+"].clone(),
            s_minus: fields["S-"].clone(),
            t_plus: fields["T+"].clone(),
            t_minus: fields["T-"].clone(),
            f: fields["f"].clone(),
        };
        scale = scale.max(coeffs.scale());
        let res = gc_residuals(&coeffs)?;
        for (slot, r) in worst.iter_mut().zip(res.iter()) {
            let (mono, mag, jidx) = r.worst_entry();
            if mag > slot.0 {
                *slot = (mag, mono, jidx, [pt.xp.re, pt.xp.im, pt.xm.re, pt.xm.im]);
            }
        }
        let frames = assemble_frames(&coeffs, 1.0)?;
        let z = zcc_residual(&frames)?;
        let zmag = matrix_max_abs(&z);
        if zmag > zcc_worst.0 {
            zcc_worst = (
                zmag,
                "matrix".to_string(),
                [0, 0],
                [pt.xp.re, pt.xp.im, pt.xm.re, pt.xm.im],
            );
        }
    }

    let tol = scenario.tolerance * scale.max(1.0);
    for (name, (mag, mono, jidx, pt)) in names.iter().zip(worst.into_iter()) {
        report.per_check.push(CheckResult {
            name: name.to_string(),
            max_residual: mag,
            worst_monomial: mono,
            worst_jet_index: jidx,
            worst_point: pt,
            pass: mag <= tol,
        });
    }
    report.per_check.push(CheckResult {
        name: "zcc".to_string(),
        max_residual: zcc_worst.0,
        worst_monomial: zcc_worst.1,
        worst_jet_index: zcc_worst.2,
        worst_point: zcc_worst.3,
        pass: zcc_worst.0 <= tol,
    });
    Ok(report)
}

fn run_classical_gc(scenario: &Scenario) -> Result<Report, ScenarioError> {
    let mut report = Report::new("classical-gc");
    let points = scenario.evaluation_points(None);
    let names = ["gauss", "codazzi-1", "codazzi-2"];
    let mut worst = vec![(0.0f64, [0usize; 2], [0.0f64; 4]); 3];
    let mut scale = 1.0f64;

    let mut exprs = BTreeMap::new();
    for name in ["u", "H", "Q", "Qbar"] {
        let src = scenario
            .fields
            .get(name)
            .cloned()
            .unwrap_or_else(|| "0".to_string());
        exprs.insert(name, parse(&src)?);
    }

    for pt in points {
        let ctx = EvalContext {
            k: scenario.generators,
            order: scenario.jet_order,
            at: pt,
            params: scenario.parameters.clone(),
        };
        // classical fields are plain jets: evaluate and take the body ring
        let mut jets = BTreeMap::new();
        for name in ["u", "H", "Q", "Qbar"] {
            let sf = eval_field(name, &exprs[name], Parity::Even, &ctx)?;
            jets.insert(name, sf.value().body());
        }
        let data = ClassicalData {
            u: jets["u"].clone(),
            h: jets["H"].clone(),
            q: jets["Q"].clone(),
            qbar: jets["Qbar"].clone(),
        };
        for j in [&data.u, &data.h, &data.q, &data.qbar] {
            scale = scale.max(j.max_abs());
        }
        let res = classical_gc_residuals(&data)?;
        for (slot, r) in worst.iter_mut().zip(res.iter()) {
            let mag = r.max_abs_coeff();
            if mag > slot.0 {
                let (jm, jn) = r.worst_index();
                *slot = (mag, [jm, jn], [pt.xp.re, pt.xp.im, pt.xm.re, pt.xm.im]);
            }
        }
    }

    let tol = scenario.tolerance * scale.max(1.0);
    for (name, (mag, jidx, pt)) in names.iter().zip(worst.into_iter()) {
        report.per_check.push(CheckResult {
            name: name.to_string(),
            max_residual: mag,
            worst_monomial: "1".to_string(),
            worst_jet_index: jidx,
            worst_point: pt,
            pass: mag <= tol,
        });
    }
    Ok(report)
}

fn run_catalog(scenario: &Scenario) -> Result<Report, ScenarioError> {
    let family_name = scenario
        .family
        .as_deref()
        .ok_or(ScenarioError::Missing("family"))?;
    let family = FamilyId::parse(family_name)?;
    let params = scenario
        .family_parameters
        .clone()
        .unwrap_or_default();
    let points = scenario.evaluation_points(Some(family));
    let config = VerifyConfig {
        k: scenario.generators,
        order: scenario.jet_order,
        tolerance: scenario.tolerance,
    };
    Ok(verify(family, &params, &points, &config)?)
}

fn algebra_by_name(name: &str) -> Result<StructureConstants, ScenarioError> {
    match name {
        "susy" => Ok(susy_algebra()),
        "classical" => Ok(classical_algebra()),
        other => Err(ScenarioError::UnknownAlgebra(other.to_string())),
    }
}

pub fn run_brackets_by_name(name: &str, tolerance: f64) -> Result<Report, ScenarioError> {
    let sc = algebra_by_name(name)?;
    let fields: Vec<_> = match name {
        "susy" => sc
            .basis
            .names
            .iter()
            .map(|n| realize_susy(n))
            .collect::<Result<_, _>>()?,
        _ => sc
            .basis
            .names
            .iter()
            .map(|n| realize_classical(n))
            .collect::<Result<_, _>>()?,
    };
    let checks = structure_match(&sc.basis.names, &fields, &sc, tolerance)?;
    let mut report = Report::new(&format!("brackets:{name}"));
    for ch in checks {
        let kind = if ch.anti { "anti" } else { "comm" };
        report.per_check.push(CheckResult {
            name: format!("{}[{}, {}]", kind, ch.left, ch.right),
            max_residual: ch.residual,
            worst_monomial: "basis".to_string(),
            worst_jet_index: [0, 0],
            worst_point: [0.0; 4],
            pass: ch.matches,
        });
    }
    let jac = sc.super_jacobi_residual();
    report.per_check.push(CheckResult {
        name: "graded-jacobi".to_string(),
        max_residual: jac,
        worst_monomial: "basis".to_string(),
        worst_jet_index: [0, 0],
        worst_point: [0.0; 4],
        pass: jac <= tolerance,
    });
    Ok(report)
}

fn run_brackets(scenario: &Scenario) -> Result<Report, ScenarioError> {
    let name = scenario
        .algebra
        .as_deref()
        .ok_or(ScenarioError::Missing("algebra"))?;
    run_brackets_by_name(name, scenario.tolerance)
}

fn element_from_exprs(
    map: &BTreeMap<String, String>,
    sc: &StructureConstants,
    k: usize,
) -> Result<AlgebraElement, ScenarioError> {
    let mut e = AlgebraElement::zero(sc, k);
    let ctx = EvalContext {
        k,
        order: 0,
        at: BasePoint::real(0.0, 0.0),
        params: BTreeMap::new(),
    };
    for (name, src) in map {
        let idx = sc.basis.index_of(name)?;
        let expr = parse(src)?;
        let sf = crate::eval::eval_expr(&expr, &ctx)?;
        // constant supernumber: strip the jet layer
        let mut g = supergc_core::grassmann::GrassmannConst::zero(k, Complex64::new(0.0, 0.0));
        for (mask, jet) in sf.value().terms() {
            g = g
                .add(&constant_monomial(k, mask, jet.body()))
                .map_err(ScenarioError::Grassmann)?;
        }
        e.coords[idx] = g;
    }
    e.validate(sc)?;
    Ok(e)
}

fn constant_monomial(
    k: usize,
    mask: u32,
    coeff: Complex64,
) -> supergc_core::grassmann::GrassmannConst {
    use supergc_core::grassmann::{Generator, GrassmannConst};
    let mut gens = Vec::new();
    for slot in 0..(k as u32 + 2) {
        if mask & (1 << slot) != 0 {
            gens.push(if slot == k as u32 {
                Generator::ThetaPlus
            } else if slot == k as u32 + 1 {
                Generator::ThetaMinus
            } else {
                Generator::Xi(slot as u8 + 1)
            });
        }
    }
    GrassmannConst::from_raw_terms(k, Complex64::new(0.0, 0.0), vec![(gens, coeff)])
        .expect("mask in range")
}

fn run_adjoint(scenario: &Scenario) -> Result<Report, ScenarioError> {
    let name = scenario
        .algebra
        .as_deref()
        .ok_or(ScenarioError::Missing("algebra"))?;
    let sc = algebra_by_name(name)?;
    let k = scenario.generators;
    let x = element_from_exprs(&scenario.adjoint_x, &sc, k)?;
    let y = element_from_exprs(&scenario.adjoint_y, &sc, k)?;
    let z = adjoint_exp(&x, &y, &sc)?;

    let mut report = Report::new(&format!("adjoint:{name}"));
    if scenario.adjoint_expected.is_empty() {
        // nothing to compare against: report the transported coordinates
        for (i, coord) in z.coords.iter().enumerate() {
            report.per_check.push(CheckResult {
                name: format!("Ad[{}] = {}", sc.basis.names[i], coord),
                max_residual: 0.0,
                worst_monomial: "basis".to_string(),
                worst_jet_index: [0, 0],
                worst_point: [0.0; 4],
                pass: true,
            });
        }
        return Ok(report);
    }
    let expected = element_from_exprs(&scenario.adjoint_expected, &sc, k)?;
    for (i, (zc, ec)) in z.coords.iter().zip(expected.coords.iter()).enumerate() {
        let diff = zc.sub(ec)?.max_abs();
        report.per_check.push(CheckResult {
            name: format!("Ad[{}]", sc.basis.names[i]),
            max_residual: diff,
            worst_monomial: "basis".to_string(),
            worst_jet_index: [0, 0],
            worst_point: [0.0; 4],
            pass: diff <= scenario.tolerance,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let bad = r#"{"version": 1, "mode": "susy-gc", "bogus": 3}"#;
        assert!(Scenario::from_json(bad).is_err());
        let bad = r#"{"version": 2, "mode": "susy-gc"}"#;
        assert!(matches!(
            Scenario::from_json(bad),
            Err(ScenarioError::Version(2))
        ));
    }

    #[test]
    fn classical_catalog_scenario_passes() {
        let text = r#"{
            "version": 1,
            "mode": "catalog",
            "family": "classical-l12prime",
            "sampler": {"count": 20, "seed": 7}
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let report = run(&sc).unwrap();
        assert!(report.pass(), "{:?}", report);
        assert_eq!(report.exit_code(), 0);
        for check in &report.per_check {
            if check.name.starts_with("gc") || check.name.starts_with("codazzi") {
                assert!(check.max_residual < 1e-10);
            }
        }
    }

    #[test]
    fn brackets_scenario_susy() {
        let report = run_brackets_by_name("susy", 1e-12).unwrap();
        // 36 distinct pairs plus the Jacobi line
        assert_eq!(report.per_check.len(), 37);
        assert!(report.pass());
    }

    #[test]
    fn susy_gc_scenario_with_tampered_field_fails() {
        // flat data except H = 1: the second equation picks up H² e^φ f / 2
        let text = r#"{
            "version": 1,
            "mode": "susy-gc",
            "fields": {
                "H": "1",
                "f": "xi1*xi2"
            },
            "points": [[0.3, 0.0, -0.2, 0.0]]
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let report = run(&sc).unwrap();
        assert_eq!(report.exit_code(), 1);
        let failing: Vec<_> = report
            .per_check
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect();
        assert!(failing.contains(&"gc-ii".to_string()), "{failing:?}");
    }

    #[test]
    fn adjoint_scenario_matches_closed_form() {
        let text = r#"{
            "version": 1,
            "mode": "adjoint",
            "algebra": "susy",
            "tolerance": 1e-10,
            "adjoint-x": {"K1": "0.34657359027997264"},
            "adjoint-y": {"P+": "1", "P-": "1"},
            "adjoint-expected": {"P+": "0.5", "P-": "1"}
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let report = run(&sc).unwrap();
        assert!(report.pass(), "{report:?}");
    }
}
