//! Generic builder for symmetry-reduced field configurations: every
//! dependent superfield is assembled as
//!
//! ```text
//! field = e^{r x+} (x+)^p [ s0(ξ) + η s1(ξ) + σ s2(ξ) + η σ s3(ξ) ]
//! ```
//!
//! with a bosonic symmetry variable `ξ = c+ x+ + c- x-`, odd invariants
//! `η = (x+)^q θ+` and `σ = θ-` (or variants), and each slot a sum of
//! `coeff · profile(ξ) · (xi-monomial)` terms. The named catalog families
//! are expressible through this builder.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::catalog::{CatalogError, Profile};
use crate::geometry::FrameCoefficients;
use crate::grassmann::Parity;
use crate::jet::{BasePoint, Jet};
use crate::superfield::Superfield;

/// Odd invariant `(x+)^power θ±`.
#[derive(Debug, Clone)]
pub struct OddInvariant {
    pub theta_plus: bool,
    pub xplus_power: f64,
}

impl OddInvariant {
    pub fn theta(plus: bool) -> Self {
        OddInvariant {
            theta_plus: plus,
            xplus_power: 0.0,
        }
    }
}

/// One additive term of an expansion slot.
#[derive(Debug, Clone)]
pub struct SlotSpec {
    pub profile: Profile,
    /// Bitmask over the plain odd generators `xi1..xiK`.
    pub soul_mask: u32,
    pub coeff: Complex64,
}

/// Expansion of a single dependent field.
#[derive(Debug, Clone, Default)]
pub struct AnsatzField {
    pub exp_rate_xplus: Complex64,
    pub power_xplus: f64,
    /// Additive linear term `c x+` (used by the conformal exponent).
    pub linear_xplus: Complex64,
    /// Slots (theta-free, η, σ, ησ), each a sum of terms.
    pub slots: [Vec<SlotSpec>; 4],
}

#[derive(Debug, Clone)]
pub struct ReducedAnsatz {
    pub xi_cplus: Complex64,
    pub xi_cminus: Complex64,
    pub eta: OddInvariant,
    pub sigma: OddInvariant,
    /// keys: phi, H, Q+, Q-, R+, R-, S+, S-, T+, T-, f
    pub fields: BTreeMap<String, AnsatzField>,
}

impl ReducedAnsatz {
    pub fn new(xi_cplus: Complex64, xi_cminus: Complex64) -> Self {
        ReducedAnsatz {
            xi_cplus,
            xi_cminus,
            eta: OddInvariant::theta(true),
            sigma: OddInvariant::theta(false),
            fields: BTreeMap::new(),
        }
    }
}

const FIELD_NAMES: [(&str, Parity); 11] = [
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

fn soul_from_mask(
    k: usize,
    base: BasePoint,
    order: usize,
    mask: u32,
) -> Result<Superfield, CatalogError> {
    let mut out = Superfield::constant(k, base, order, Complex64::new(1.0, 0.0));
    for slot in 0..(k as u32) {
        if mask & (1 << slot) != 0 {
            out = out.mul(&Superfield::xi(k, base, order, slot as u8 + 1)?)?;
        }
    }
    Ok(out)
}

fn invariant_superfield(
    inv: &OddInvariant,
    k: usize,
    base: BasePoint,
    order: usize,
) -> Result<Superfield, CatalogError> {
    let theta = Superfield::theta(k, base, order, inv.theta_plus);
    if inv.xplus_power == 0.0 {
        return Ok(theta);
    }
    let p = Superfield::from_jet(k, Jet::coord_plus(base, order).powf(inv.xplus_power)?);
    Ok(p.mul(&theta)?)
}

/// Assemble frame coefficients from a reduced ansatz at a base point,
/// validating the parity pattern of every slot.
pub fn build_reduced_ansatz(
    spec: &ReducedAnsatz,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<FrameCoefficients, CatalogError> {
    let xi_jet = Jet::coord_plus(at, order)
        .scale_complex(spec.xi_cplus)
        .try_add(&Jet::coord_minus(at, order).scale_complex(spec.xi_cminus))?;
    let xi0 = spec.xi_cplus * at.xp + spec.xi_cminus * at.xm;
    let eta = invariant_superfield(&spec.eta, k, at, order)?;
    let sigma = invariant_superfield(&spec.sigma, k, at, order)?;

    let build_field = |name: &str, parity: Parity| -> Result<Superfield, CatalogError> {
        let field = match spec.fields.get(name) {
            Some(f) => f,
            None => return Ok(Superfield::zero(k, at, order, parity)),
        };
        let mut total = Superfield::zero(k, at, order, Parity::Even);
        for (slot_idx, slot) in field.slots.iter().enumerate() {
            // slots 0 and 3 carry the field parity, 1 and 2 the opposite
            let want = if slot_idx == 0 || slot_idx == 3 {
                parity
            } else {
                match parity {
                    Parity::Even => Parity::Odd,
                    Parity::Odd => Parity::Even,
                    Parity::Mixed => Parity::Mixed,
                }
            };
            let mut slot_val = Superfield::zero(k, at, order, Parity::Even);
            for term in slot {
                let soul = soul_from_mask(k, at, order, term.soul_mask)?;
                let want_odd = want == Parity::Odd;
                if (term.soul_mask.count_ones() % 2 == 1) != want_odd {
                    return Err(CatalogError::ParityViolation(format!(
                        "{name} slot {slot_idx}"
                    )));
                }
                let series = term.profile.taylor(xi0, order);
                let prof_jet = Jet::compose_univariate(&xi_jet, &series);
                slot_val = slot_val.add(
                    &Superfield::from_jet(k, prof_jet)
                        .mul(&soul)?
                        .scale(term.coeff),
                )?;
            }
            let with_invariant = match slot_idx {
                0 => slot_val,
                1 => eta.mul(&slot_val)?,
                2 => sigma.mul(&slot_val)?,
                _ => eta.mul(&sigma)?.mul(&slot_val)?,
            };
            total = total.add(&with_invariant)?;
        }
        // multiplicative prefactor and additive linear part
        let mut prefactor = Superfield::from_jet(
            k,
            Jet::coord_plus(at, order)
                .scale_complex(field.exp_rate_xplus)
                .exp(),
        );
        if field.power_xplus != 0.0 {
            prefactor = prefactor.mul(&Superfield::from_jet(
                k,
                Jet::coord_plus(at, order).powf(field.power_xplus)?,
            ))?;
        }
        let mut out = prefactor.mul(&total)?;
        if field.linear_xplus.norm() > 0.0 {
            out = out.add(&Superfield::from_jet(
                k,
                Jet::coord_plus(at, order).scale_complex(field.linear_xplus),
            ))?;
        }
        Ok(out)
    };

    let mut built = BTreeMap::new();
    for (name, parity) in FIELD_NAMES {
        // the normalization factor f must stay theta-free
        if name == "f" {
            if let Some(f) = spec.fields.get("f") {
                if f.slots[1..].iter().any(|s| !s.is_empty()) {
                    return Err(CatalogError::ParityViolation(
                        "f must be theta-free".to_string(),
                    ));
                }
            }
        }
        built.insert(name, build_field(name, parity)?);
    }

    Ok(FrameCoefficients {
        phi: built["phi"].clone(),
        h: built["H"].clone(),
        q_plus: built["Q+"].clone(),
        q_minus: built["Q-"].clone(),
        r_plus: built["R+"].clone(),
        r_minus: built["R-"].clone(),
        s_plus: built["S+"].clone(),
        s_minus: built["S-"].clone(),
        t_plus: built["T+"].clone(),
        t_minus: built["T-"].clone(),
        f: built["f"].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_l39, FamilyParameters};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn all_zero_slots_give_zero_coefficients() {
        let spec = ReducedAnsatz::new(c(-1.0, 0.0), c(1.0, 0.0));
        let out = build_reduced_ansatz(&spec, 8, BasePoint::real(0.1, 0.2), 4).unwrap();
        assert!(out.phi.is_zero(1e-14));
        assert!(out.h.is_zero(1e-14));
        assert!(out.f.is_zero(1e-14));
    }

    #[test]
    fn parity_violation_rejected() {
        let mut spec = ReducedAnsatz::new(c(-1.0, 0.0), c(1.0, 0.0));
        let mut field = AnsatzField::default();
        // H is even, its η-slot must be odd: an even (empty) soul mask fails
        field.slots[1].push(SlotSpec {
            profile: Profile::constant(1.0),
            soul_mask: 0,
            coeff: c(1.0, 0.0),
        });
        spec.fields.insert("H".to_string(), field);
        assert!(matches!(
            build_reduced_ansatz(&spec, 8, BasePoint::real(0.0, 0.0), 4),
            Err(CatalogError::ParityViolation(_))
        ));
    }

    #[test]
    fn l39_expressed_through_ansatz_matches_builder() {
        // defaults: eps = 1, a = 2, φ1 = 0, h0 = c0 S0+, ψ = 1, printed
        // reading of the doubled constant
        let mut p = FamilyParameters::default();
        p.quan2_as_printed = true;
        let k = 8;
        let order = 4;
        let at = BasePoint::real(0.35, -0.15);
        let direct = build_l39(&p, k, at, order).unwrap();

        let a = 2.0;
        let eps = 1.0;
        let aeps = a * eps;
        let i2 = c(0.0, 2.0);
        // soul masks: a0=xi1, a1=xi2, a2=xi3, c0=xi4, S0+=xi5 (bits 0..4)
        let m = |bits: &[u32]| -> u32 { bits.iter().fold(0, |acc, b| acc | (1 << b)) };
        let l0_mask = m(&[0, 4]);
        let l1_mask = m(&[2, 4]); // printed reading: a2 S0+
        let c0_mask = m(&[3, 4]);
        let s0_mask = m(&[4]);
        let f_mask = m(&[5, 6]);

        let mut spec = ReducedAnsatz::new(c(-eps, 0.0), c(1.0, 0.0));
        let term = |profile: Profile, mask: u32, coeff: Complex64| SlotSpec {
            profile,
            soul_mask: mask,
            coeff,
        };
        let exp_xi = |rate: f64| Profile::exp_term(c(1.0, 0.0), c(rate, 0.0));

        // H = e^{-a x+} [h0 + θθ 2i l0 e^ξ]
        let mut h = AnsatzField {
            exp_rate_xplus: c(-a, 0.0),
            ..Default::default()
        };
        h.slots[0].push(term(Profile::constant(1.0), c0_mask, c(1.0, 0.0)));
        h.slots[3].push(term(exp_xi(1.0), l0_mask, i2));
        spec.fields.insert("H".to_string(), h);

        // Q+ = e^{a x+} [l0 e^{2ξ} + l1 e^ξ + θθ (i a/2) h0 e^ξ]
        let mut qp = AnsatzField {
            exp_rate_xplus: c(a, 0.0),
            ..Default::default()
        };
        qp.slots[0].push(term(exp_xi(2.0), l0_mask, c(1.0, 0.0)));
        qp.slots[0].push(term(exp_xi(1.0), l1_mask, c(1.0, 0.0)));
        qp.slots[3].push(term(exp_xi(1.0), c0_mask, c(0.0, 0.5 * a)));
        spec.fields.insert("Q+".to_string(), qp);

        // Q- = e^{a x+} [ε l0/(aε-1) + l2 e^{(1-aε)ξ}]
        let mut qm = AnsatzField {
            exp_rate_xplus: c(a, 0.0),
            ..Default::default()
        };
        qm.slots[0].push(term(
            Profile::constant(1.0),
            l0_mask,
            c(eps / (aeps - 1.0), 0.0),
        ));
        qm.slots[0].push(term(exp_xi(1.0 - aeps), l1_mask, c(1.0, 0.0)));
        spec.fields.insert("Q-".to_string(), qm);

        // connection constants: R- = b1 S0+, R+ = b2 S0+, S± = S0+,
        // T- = b3 S0+, T+ = b4 S0+ with the builder defaults (1,2,3,4)
        for (name, coeff) in [
            ("R-", 1.0),
            ("R+", 2.0),
            ("S+", 1.0),
            ("S-", 1.0),
            ("T-", 3.0),
            ("T+", 4.0),
        ] {
            let mut fld = AnsatzField::default();
            fld.slots[0].push(term(Profile::constant(1.0), s0_mask, c(coeff, 0.0)));
            spec.fields.insert(name.to_string(), fld);
        }

        // phi = 2a x+ + ξ
        let mut phi = AnsatzField {
            linear_xplus: c(2.0 * a, 0.0),
            ..Default::default()
        };
        phi.slots[0].push(term(
            Profile::Poly {
                coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)],
            },
            0,
            c(1.0, 0.0),
        ));
        spec.fields.insert("phi".to_string(), phi);

        // f = ψ(ξ) xi6 xi7
        let mut f = AnsatzField::default();
        f.slots[0].push(term(Profile::constant(1.0), f_mask, c(1.0, 0.0)));
        spec.fields.insert("f".to_string(), f);

        let via_ansatz = build_reduced_ansatz(&spec, k, at, order).unwrap();

        let tol = 1e-10 * direct.scale();
        assert!(via_ansatz.h.approx_eq(&direct.h, tol), "H mismatch");
        assert!(via_ansatz.q_plus.approx_eq(&direct.q_plus, tol), "Q+ mismatch");
        assert!(via_ansatz.q_minus.approx_eq(&direct.q_minus, tol), "Q- mismatch");
        assert!(via_ansatz.phi.approx_eq(&direct.phi, tol), "phi mismatch");
        assert!(via_ansatz.f.approx_eq(&direct.f, tol), "f mismatch");
        assert!(via_ansatz.r_plus.approx_eq(&direct.r_plus, tol));
        assert!(via_ansatz.s_minus.approx_eq(&direct.s_minus, tol));
        assert!(via_ansatz.t_minus.approx_eq(&direct.t_minus, tol));
    }
}
