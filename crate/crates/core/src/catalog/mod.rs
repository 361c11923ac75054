//! Builders and a verification driver for the invariant-solution families:
//! three SUSY families (l39, l27prime, l26doubleprime) and two classical
//! ones (classical-l12prime, classical-l17prime with an ODE-constrained
//! component function realized by jet lifting).
//!
//! The verifier evaluates the stored family formulas honestly and never
//! silently passes a failing family: when a residual check fails it emits a
//! structured [`Discrepancy`](crate::report::Discrepancy) naming the failing
//! equation and, when a one-parameter scan finds one, the minimal parameter
//! change restoring residual zero.

mod ansatz;
mod families;

pub use ansatz::{AnsatzField, OddInvariant, ReducedAnsatz, SlotSpec};
pub use ansatz::build_reduced_ansatz;
pub use families::{
    build_classical_l12prime, build_classical_l17prime, build_l26doubleprime, build_l27prime,
    build_l39, l26_printed_curvature, l26_umbilic_at, l27_printed_curvature, l27_umbilic,
    l39_printed_curvature,
};

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    assemble_frames, classical_curvatures, classical_gc_residuals, gc_residuals, susy_curvature,
    zcc_residual, ClassicalError, FrameError,
};
use crate::jet::{BasePoint, JetError};
use crate::report::{CheckResult, Discrepancy, Report};
use crate::superfield::SuperfieldError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("missing required parameter {0}")]
    MissingParameter(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parity violation in ansatz slot {0}")]
    ParityViolation(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Superfield(#[from] SuperfieldError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
}

/// Scalar component-function specification of one symmetry variable:
/// a finite sum of `coeff * t^power * e^{rate t}` terms. Exact Taylor
/// coefficients to any order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    Const { value: Complex64 },
    /// Polynomial coefficients, low degree first.
    Poly { coeffs: Vec<Complex64> },
    ExpPoly { terms: Vec<ExpPolyTerm> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpPolyTerm {
    pub coeff: Complex64,
    pub power: u32,
    pub rate: Complex64,
}

impl Profile {
    pub fn constant(v: f64) -> Self {
        Profile::Const {
            value: Complex64::new(v, 0.0),
        }
    }

    pub fn exp_term(coeff: Complex64, rate: Complex64) -> Self {
        Profile::ExpPoly {
            terms: vec![ExpPolyTerm {
                coeff,
                power: 0,
                rate,
            }],
        }
    }

    /// Scaled Taylor coefficients `g^(k)(t0)/k!` for k = 0..=order.
    pub fn taylor(&self, t0: Complex64, order: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        match self {
            Profile::Zero => {}
            Profile::Const { value } => out[0] = *value,
            Profile::Poly { coeffs } => {
                // expand sum c_n t^n around t0 by binomial theorem
                for (n, c) in coeffs.iter().enumerate() {
                    let mut binom = Complex64::new(1.0, 0.0);
                    for k in 0..=n.min(order) {
                        if k > 0 {
                            binom *= Complex64::new((n - k + 1) as f64 / k as f64, 0.0);
                        }
                        out[k] += c * binom * t0.powi((n - k) as i32);
                    }
                }
            }
            Profile::ExpPoly { terms } => {
                // d^k/dt^k [t^p e^{rt}] = Σ_j C(k,j) (p)_j t^{p-j} r^{k-j} e^{rt}
                for t in terms {
                    let e = (t.rate * t0).exp();
                    let p = t.power as usize;
                    let mut kfact = 1.0f64;
                    for k in 0..=order {
                        if k > 0 {
                            kfact *= k as f64;
                        }
                        let mut sum = Complex64::new(0.0, 0.0);
                        for j in 0..=k.min(p) {
                            let mut binom = 1.0f64;
                            for m in 0..j {
                                binom *= (k - m) as f64 / (m + 1) as f64;
                            }
                            let mut falling = 1.0f64;
                            for m in 0..j {
                                falling *= (p - m) as f64;
                            }
                            sum += Complex64::new(binom * falling, 0.0)
                                * t0.powi((p - j) as i32)
                                * t.rate.powu((k - j) as u32);
                        }
                        out[k] += t.coeff * e * sum / Complex64::new(kfact, 0.0);
                    }
                }
            }
        }
        out
    }

    /// Exact derivative profile.
    pub fn derivative(&self) -> Profile {
        match self {
            Profile::Zero | Profile::Const { .. } => Profile::Zero,
            Profile::Poly { coeffs } => {
                if coeffs.len() <= 1 {
                    Profile::Zero
                } else {
                    Profile::Poly {
                        coeffs: coeffs
                            .iter()
                            .enumerate()
                            .skip(1)
                            .map(|(n, c)| c * Complex64::new(n as f64, 0.0))
                            .collect(),
                    }
                }
            }
            Profile::ExpPoly { terms } => {
                let mut out = Vec::new();
                for t in terms {
                    if t.power > 0 {
                        out.push(ExpPolyTerm {
                            coeff: t.coeff * Complex64::new(t.power as f64, 0.0),
                            power: t.power - 1,
                            rate: t.rate,
                        });
                    }
                    out.push(ExpPolyTerm {
                        coeff: t.coeff * t.rate,
                        power: t.power,
                        rate: t.rate,
                    });
                }
                Profile::ExpPoly { terms: out }
            }
        }
    }
}

/// Parameters of a family instance: named complex scalars plus named scalar
/// component-function profiles. Missing entries take family defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyParameters {
    #[serde(default)]
    pub scalars: BTreeMap<String, Complex64>,
    #[serde(default)]
    pub profiles: BTreeMap<String, Profile>,
    /// Reading flag for the doubled constant in the l39 family; the printed
    /// reading assigns the same constant to both homogeneous parts.
    #[serde(default = "default_true")]
    pub quan2_as_printed: bool,
}

fn default_true() -> bool {
    true
}

impl Default for FamilyParameters {
    fn default() -> Self {
        FamilyParameters {
            scalars: BTreeMap::new(),
            profiles: BTreeMap::new(),
            quan2_as_printed: true,
        }
    }
}

impl FamilyParameters {
    pub fn scalar_or(&self, name: &str, default: f64) -> Complex64 {
        self.scalars
            .get(name)
            .copied()
            .unwrap_or(Complex64::new(default, 0.0))
    }

    pub fn profile_or(&self, name: &str, default: Profile) -> Profile {
        self.profiles.get(name).cloned().unwrap_or(default)
    }

    pub fn with_scalar(mut self, name: &str, v: f64) -> Self {
        self.scalars
            .insert(name.to_string(), Complex64::new(v, 0.0));
        self
    }

    pub fn with_profile(mut self, name: &str, p: Profile) -> Self {
        self.profiles.insert(name.to_string(), p);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    L39,
    L27Prime,
    L26DoublePrime,
    ClassicalL12Prime,
    ClassicalL17Prime,
}

impl FamilyId {
    pub fn parse(name: &str) -> Result<Self, CatalogError> {
        match name {
            "l39" | "L39" => Ok(FamilyId::L39),
            "l27prime" | "L27prime" | "l27'" => Ok(FamilyId::L27Prime),
            "l26doubleprime" | "L26doubleprime" | "l26''" => Ok(FamilyId::L26DoublePrime),
            "classical-l12prime" | "classical-L12prime" => Ok(FamilyId::ClassicalL12Prime),
            "classical-l17prime" | "classical-L17prime" => Ok(FamilyId::ClassicalL17Prime),
            other => Err(CatalogError::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::L39 => "l39",
            FamilyId::L27Prime => "l27prime",
            FamilyId::L26DoublePrime => "l26doubleprime",
            FamilyId::ClassicalL12Prime => "classical-l12prime",
            FamilyId::ClassicalL17Prime => "classical-l17prime",
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(
            self,
            FamilyId::ClassicalL12Prime | FamilyId::ClassicalL17Prime
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub k: usize,
    pub order: usize,
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            k: 8,
            order: 4,
            tolerance: 1e-10,
        }
    }
}

/// Sample evaluation points appropriate for a family: families with
/// fractional powers keep `Re x+` in [0.5, 2].
pub fn default_points(family: FamilyId, n: usize, seed: u64) -> Vec<BasePoint> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| match family {
            FamilyId::L26DoublePrime => BasePoint::real(
                rng.gen_range(0.5..2.0),
                rng.gen_range(-1.0..1.0),
            ),
            FamilyId::ClassicalL12Prime | FamilyId::ClassicalL17Prime => BasePoint::real(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            ),
            _ => BasePoint::real(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        })
        .collect()
}

pub(crate) struct CheckAccumulator {
    name: String,
    max_residual: f64,
    worst_monomial: String,
    worst_point: [f64; 4],
    worst_jet_index: [usize; 2],
}

impl CheckAccumulator {
    pub fn new(name: &str) -> Self {
        CheckAccumulator {
            name: name.to_string(),
            max_residual: 0.0,
            worst_monomial: "1".to_string(),
            worst_point: [0.0; 4],
            worst_jet_index: [0, 0],
        }
    }

    pub fn feed(&mut self, residual: f64, monomial: &str, jet_index: [usize; 2], point: BasePoint) {
        if residual > self.max_residual {
            self.max_residual = residual;
            self.worst_monomial = monomial.to_string();
            self.worst_jet_index = jet_index;
            self.worst_point = [point.xp.re, point.xp.im, point.xm.re, point.xm.im];
        }
    }

    pub fn finish(self, tol: f64) -> CheckResult {
        CheckResult {
            pass: self.max_residual <= tol,
            name: self.name,
            max_residual: self.max_residual,
            worst_monomial: self.worst_monomial,
            worst_jet_index: self.worst_jet_index,
            worst_point: self.worst_point,
        }
    }
}

pub(crate) const GC_NAMES: [&str; 6] = ["gc-i", "gc-ii", "gc-iii", "gc-iv", "gc-v", "gc-vi"];

/// Evaluate the six Gauss-Codazzi residuals, the zero-curvature residual and
/// the curvature comparison for a SUSY family at the given points; classical
/// families use their three residuals and curvature expectations. Always
/// returns a report; failing checks are accompanied by discrepancy records.
pub fn verify(
    family: FamilyId,
    params: &FamilyParameters,
    points: &[BasePoint],
    config: &VerifyConfig,
) -> Result<Report, CatalogError> {
    let mut report = Report::new(&format!("catalog:{}", family.name()));
    let check_results = if family.is_classical() {
        verify_classical_checks(family, params, points, config)?
    } else {
        verify_susy_checks(family, params, points, config)?
    };
    report.per_check = check_results;

    // discrepancy protocol: name each failing check and scan the family's
    // one-parameter candidates for a restoring change
    let failing: Vec<(String, f64, String)> = report
        .per_check
        .iter()
        .filter(|c| !c.pass)
        .map(|c| (c.name.clone(), c.max_residual, c.worst_monomial.clone()))
        .collect();
    if !failing.is_empty() {
        let scan_points = &points[..points.len().min(3)];
        let mut fix: Option<String> = None;
        let is_equation =
            |name: &str| name.starts_with("gc") || name.starts_with("codazzi") || name == "gauss";
        for (desc, candidate) in scan_candidates(family, params) {
            let candidate_checks = if family.is_classical() {
                verify_classical_checks(family, &candidate, scan_points, config)?
            } else {
                verify_susy_checks(family, &candidate, scan_points, config)?
            };
            // the scan targets the defining residual equations; the
            // zero-curvature f-column and the printed curvature comparison
            // carry independent constraints
            let residuals_pass = candidate_checks
                .iter()
                .filter(|c| is_equation(&c.name))
                .all(|c| c.pass);
            if residuals_pass {
                fix = Some(desc);
                break;
            }
        }
        for (name, residual, monomial) in failing {
            let applies = is_equation(&name);
            report.discrepancies.push(Discrepancy {
                family: family.name().to_string(),
                check: name,
                residual,
                leading_monomial: monomial,
                suggested_fix: if applies { fix.clone() } else { None },
            });
        }
    }
    Ok(report)
}

fn verify_susy_checks(
    family: FamilyId,
    params: &FamilyParameters,
    points: &[BasePoint],
    config: &VerifyConfig,
) -> Result<Vec<CheckResult>, CatalogError> {
    let mut accs: Vec<CheckAccumulator> = GC_NAMES.iter().map(|n| CheckAccumulator::new(n)).collect();
    let mut zcc_acc = CheckAccumulator::new("zcc");
    let mut curv_acc = CheckAccumulator::new("curvature-match");
    let mut hsq_acc = CheckAccumulator::new("h-squared");
    let mut f_acc = [
        CheckAccumulator::new("info-f-constraint-plus"),
        CheckAccumulator::new("info-f-constraint-minus"),
        CheckAccumulator::new("info-f-compatibility"),
    ];
    let mut scale = 1.0f64;

    for &pt in points {
        let coeffs = match family {
            FamilyId::L39 => build_l39(params, config.k, pt, config.order)?,
            FamilyId::L27Prime => build_l27prime(params, config.k, pt, config.order)?,
            FamilyId::L26DoublePrime => build_l26doubleprime(params, config.k, pt, config.order)?,
            _ => unreachable!(),
        };
        scale = scale.max(coeffs.scale());

        let res = gc_residuals(&coeffs)?;
        for (acc, r) in accs.iter_mut().zip(res.iter()) {
            let (mono, worst, jidx) = r.worst_entry();
            acc.feed(worst, &mono, jidx, pt);
        }

        let frames = assemble_frames(&coeffs, 1.0)?;
        let z = zcc_residual(&frames)?;
        for row in &z {
            for entry in row {
                let (mono, worst, jidx) = entry.worst_entry();
                zcc_acc.feed(worst, &mono, jidx, pt);
            }
        }

        let computed_k = susy_curvature(&coeffs)?;
        let printed_k = match family {
            FamilyId::L39 => l39_printed_curvature(params, config.k, pt, config.order)?,
            FamilyId::L27Prime => l27_printed_curvature(params, config.k, pt, config.order)?,
            FamilyId::L26DoublePrime => {
                l26_printed_curvature(params, config.k, pt, config.order)?
            }
            _ => unreachable!(),
        };
        let diff = computed_k.sub(&printed_k)?;
        let (mono, worst, jidx) = diff.worst_entry();
        curv_acc.feed(worst, &mono, jidx, pt);

        if family == FamilyId::L26DoublePrime {
            let hh = coeffs.h.mul(&coeffs.h)?;
            let (mono, worst, jidx) = hh.worst_entry();
            hsq_acc.feed(worst, &mono, jidx, pt);
        }

        // derivative constraints on f: reported, never gating (the catalog
        // instances solve the six equations, not the immersion
        // normalization)
        let (f_res, f_compat) = crate::geometry::f_constraint_residuals(&coeffs)?;
        for (slot, r) in f_acc.iter_mut().zip(f_res.iter().chain([&f_compat])) {
            let (mono, worst, jidx) = r.worst_entry();
            slot.feed(worst, &mono, jidx, pt);
        }
    }

    let tol = config.tolerance * scale.max(1.0);
    let mut out: Vec<CheckResult> = accs.into_iter().map(|a| a.finish(tol)).collect();
    out.push(zcc_acc.finish(tol));
    out.push(curv_acc.finish(tol));
    if family == FamilyId::L26DoublePrime {
        // exact Grassmann identity, machine-zero tolerance
        out.push(hsq_acc.finish(1e-14 * scale.max(1.0)));
    }
    for acc in f_acc {
        let mut check = acc.finish(f64::INFINITY);
        check.pass = true;
        out.push(check);
    }
    Ok(out)
}

fn verify_classical_checks(
    family: FamilyId,
    params: &FamilyParameters,
    points: &[BasePoint],
    config: &VerifyConfig,
) -> Result<Vec<CheckResult>, CatalogError> {
    let names = ["gauss", "codazzi-1", "codazzi-2"];
    let mut accs: Vec<CheckAccumulator> = names.iter().map(|n| CheckAccumulator::new(n)).collect();
    let mut curvature_acc = CheckAccumulator::new("gaussian-curvature-zero");
    let mut mean_min = f64::INFINITY;
    let mut scale = 1.0f64;

    for &pt in points {
        let data = match family {
            FamilyId::ClassicalL12Prime => build_classical_l12prime(params, pt, config.order)?,
            FamilyId::ClassicalL17Prime => build_classical_l17prime(params, pt, config.order)?,
            _ => unreachable!(),
        };
        for j in [&data.u, &data.h, &data.q, &data.qbar] {
            scale = scale.max(j.max_abs_coeff());
        }
        let res = classical_gc_residuals(&data)?;
        for (acc, r) in accs.iter_mut().zip(res.iter()) {
            let (jm, jn) = r.worst_index();
            acc.feed(r.max_abs_coeff(), "1", [jm, jn], pt);
        }
        let cur = classical_curvatures(&data, 1e-12)?;
        curvature_acc.feed(cur.gauss.norm(), "1", [0, 0], pt);
        mean_min = mean_min.min(cur.mean.norm());
    }

    // the classical l17prime family is verified at one order lower than the
    // stated tolerance since the lifted jets feed second derivatives
    let tol = match family {
        FamilyId::ClassicalL17Prime => 1e-9 * scale.max(1.0),
        _ => config.tolerance * scale.max(1.0),
    };
    let mut out: Vec<CheckResult> = accs.into_iter().map(|a| a.finish(tol)).collect();
    out.push(curvature_acc.finish(1e-10 * scale.max(1.0)));
    if family == FamilyId::ClassicalL12Prime {
        out.push(CheckResult {
            name: "mean-curvature-nonzero".to_string(),
            max_residual: mean_min,
            worst_monomial: "1".to_string(),
            worst_jet_index: [0, 0],
            worst_point: [0.0; 4],
            pass: mean_min > 0.1,
        });
    }
    Ok(out)
}

/// One-parameter scan candidates per family: (description, modified params).
fn scan_candidates(
    family: FamilyId,
    params: &FamilyParameters,
) -> Vec<(String, FamilyParameters)> {
    match family {
        FamilyId::L39 => vec![(
            "set a0 = 0 (removes the l0 sector)".to_string(),
            params.clone().with_scalar("a0", 0.0),
        )],
        FamilyId::L26DoublePrime => {
            // A rho' = 1 repairs the fourth residual; with the default
            // constant A this is a slope-1 linear rho
            let a0 = params.scalar_or("A0", 1.0);
            let slope = if a0.norm() > 1e-12 {
                (Complex64::new(1.0, 0.0) / a0).re
            } else {
                1.0
            };
            let rho0 = params.scalar_or("rho0", 1.0);
            vec![(
                format!("set rho slope = {} so that A*rho' = 1", slope),
                params.clone().with_profile(
                    "rho",
                    Profile::Poly {
                        coeffs: vec![rho0, Complex64::new(slope, 0.0)],
                    },
                ),
            )]
        }
        FamilyId::ClassicalL17Prime => vec![(
            "set k0 = 0 (degenerate flat subfamily)".to_string(),
            params.clone().with_scalar("k0", 0.0),
        )],
        _ => vec![],
    }
}
