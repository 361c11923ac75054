//! The five stored invariant-solution families, built field by field from
//! their closed forms, with ODE-constrained component functions lifted to
//! jets at each evaluation point.
//!
//! Fermionic constants are auto-assigned distinct generators in declaration
//! order; the soul of `f` occupies the two slots after the family's
//! constants so no product vanishes by accident.

use num_complex::Complex64;

use crate::catalog::{CatalogError, FamilyParameters, Profile};
use crate::geometry::{ClassicalData, FrameCoefficients};
use crate::grassmann::Parity;
use crate::jet::{BasePoint, Jet};
use crate::superfield::Superfield;

fn i64c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn im() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Product of plain odd generators `xi(n)` for every listed index.
fn soul_mono(
    k: usize,
    base: BasePoint,
    order: usize,
    gens: &[u8],
) -> Result<Superfield, CatalogError> {
    let mut out = Superfield::constant(k, base, order, i64c(1.0));
    for &g in gens {
        out = out.mul(&Superfield::xi(k, base, order, g)?)?;
    }
    Ok(out)
}

fn theta_pair(k: usize, base: BasePoint, order: usize) -> Result<Superfield, CatalogError> {
    let tp = Superfield::theta(k, base, order, true);
    let tm = Superfield::theta(k, base, order, false);
    Ok(tp.mul(&tm)?)
}

/// Embed a scalar profile of one symmetry variable as a bivariate jet:
/// Taylor coefficients at `t0` composed with the (linear) inner jet.
fn embed_profile(
    p: &Profile,
    inner: &Jet,
    t0: Complex64,
    k: usize,
) -> Result<Superfield, CatalogError> {
    let series = p.taylor(t0, inner.order());
    let jet = Jet::compose_univariate(inner, &series);
    Ok(Superfield::from_jet(k, jet))
}

fn require_nonzero(v: Complex64, what: &str) -> Result<(), CatalogError> {
    if v.norm() < 1e-12 {
        return Err(CatalogError::InvalidParameter(format!(
            "{what} must be nonzero"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// l39: translations plus the K0 dilation; symmetry variable ξ = x- - ε x+.
// Fermionic constants a0 -> xi1, a1 -> xi2, a2 -> xi3, c0 -> xi4,
// S0+ -> xi5; f soul = xi6 xi7.
// ---------------------------------------------------------------------------

struct L39Pieces {
    theta2: Superfield,
    h0: Superfield,
    a: Superfield,
    b: Superfield,
    c: Superfield,
    e: Superfield,
    l0: Superfield,
    phi1: Superfield,
    e_xi: Superfield,
    e_m2xi: Superfield,
    e_ax_plus: Superfield,
    e_max_plus: Superfield,
}

fn l39_pieces(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<L39Pieces, CatalogError> {
    if k < 7 {
        return Err(CatalogError::InvalidParameter(
            "l39 needs at least 7 generators".into(),
        ));
    }
    let eps = p.scalar_or("eps", 1.0);
    let a = p.scalar_or("a", 2.0);
    require_nonzero(a, "a")?;
    if (a * eps - i64c(1.0)).norm() < 1e-9 {
        return Err(CatalogError::InvalidParameter(
            "a*eps = 1 is a pole of the stored solution".into(),
        ));
    }

    let xi_jet = Jet::coord_minus(at, order)
        .try_sub(&Jet::coord_plus(at, order).scale_complex(eps))?;
    let xi0 = at.xm - eps * at.xp;

    let a0c = p.scalar_or("a0", 1.0);
    let a1c = p.scalar_or("a1", 1.0);
    let a2c = p.scalar_or("a2", 1.0);
    let c0c = p.scalar_or("c0", 1.0);
    let s0c = p.scalar_or("s0", 1.0);

    let s0 = soul_mono(k, at, order, &[5])?.scale(s0c);
    let l0 = soul_mono(k, at, order, &[1])?.scale(a0c).mul(&s0)?;
    let l1 = if p.quan2_as_printed {
        soul_mono(k, at, order, &[3])?.scale(a2c).mul(&s0)?
    } else {
        soul_mono(k, at, order, &[2])?.scale(a1c).mul(&s0)?
    };
    let l2 = soul_mono(k, at, order, &[3])?.scale(a2c).mul(&s0)?;
    let c0s0 = soul_mono(k, at, order, &[4])?.scale(c0c).mul(&s0)?;

    let h0prof = p.profile_or("h0", Profile::constant(1.0));
    let phi1prof = p.profile_or("phi1", Profile::Zero);
    let h0_jet = embed_profile(&h0prof, &xi_jet, xi0, k)?;
    let h0p_jet = embed_profile(&h0prof.derivative(), &xi_jet, xi0, k)?;
    let phi1 = embed_profile(&phi1prof, &xi_jet, xi0, k)?;

    let h0 = h0_jet.mul(&c0s0)?;
    let h0p = h0p_jet.mul(&c0s0)?;

    let e_xi = Superfield::from_jet(k, xi_jet.exp());
    let e_2xi = Superfield::from_jet(k, xi_jet.scale_complex(i64c(2.0)).exp());
    let e_m2xi = Superfield::from_jet(k, xi_jet.scale_complex(i64c(-2.0)).exp());
    let one_minus_aeps = i64c(1.0) - a * eps;
    let e_1maexi = Superfield::from_jet(k, xi_jet.scale_complex(one_minus_aeps).exp());

    // A = l0 e^{2ξ} + l1 e^ξ and its theta-theta partner
    let a_field = l0.mul(&e_2xi)?.add(&l1.mul(&e_xi)?)?;
    let b_field = a_field.mul(&phi1)?.add(
        &h0.scale(a)
            .add(&h0p.scale(eps))?
            .mul(&e_xi)?
            .scale(im() * i64c(0.5)),
    )?;
    // C = ε l0 / (aε - 1) + l2 e^{(1-aε)ξ}
    let c_field = l0
        .scale(eps / (a * eps - i64c(1.0)))
        .add(&l2.mul(&e_1maexi)?)?;
    let e_field = c_field
        .mul(&phi1)?
        .sub(&h0p.mul(&e_xi)?.scale(im() * i64c(0.5)))?;

    let e_ax_plus = Superfield::from_jet(k, Jet::coord_plus(at, order).scale_complex(a).exp());
    let e_max_plus = Superfield::from_jet(k, Jet::coord_plus(at, order).scale_complex(-a).exp());
    let theta2 = theta_pair(k, at, order)?;

    Ok(L39Pieces {
        theta2,
        h0,
        a: a_field,
        b: b_field,
        c: c_field,
        e: e_field,
        l0,
        phi1,
        e_xi,
        e_m2xi,
        e_ax_plus,
        e_max_plus,
    })
}

pub fn build_l39(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<FrameCoefficients, CatalogError> {
    let eps = p.scalar_or("eps", 1.0);
    let a = p.scalar_or("a", 2.0);
    let pieces = l39_pieces(p, k, at, order)?;
    let s0c = p.scalar_or("s0", 1.0);
    let s0 = soul_mono(k, at, order, &[5])?.scale(s0c);

    let h = pieces
        .h0
        .add(
            &pieces
                .theta2
                .mul(&pieces.l0.mul(&pieces.e_xi)?.scale(im() * i64c(2.0)))?,
        )?
        .mul(&pieces.e_max_plus)?;
    let q_plus = pieces
        .a
        .add(&pieces.theta2.mul(&pieces.b)?)?
        .mul(&pieces.e_ax_plus)?;
    let q_minus = pieces
        .c
        .add(&pieces.theta2.mul(&pieces.e)?)?
        .mul(&pieces.e_ax_plus)?;

    let b1 = p.scalar_or("b1", 1.0);
    let b2 = p.scalar_or("b2", 2.0);
    let b3 = p.scalar_or("b3", 3.0);
    let b4 = p.scalar_or("b4", 4.0);

    // phi = 2a x+ + ξ + θ+θ- φ1
    let phi_body = Jet::coord_plus(at, order)
        .scale_complex(a * i64c(2.0))
        .try_add(
            &Jet::coord_minus(at, order)
                .try_sub(&Jet::coord_plus(at, order).scale_complex(eps))?,
        )?;
    let phi = Superfield::from_jet(k, phi_body).add(&pieces.theta2.mul(&pieces.phi1)?)?;

    let psi = p.profile_or("psi", Profile::constant(1.0));
    let xi_jet = Jet::coord_minus(at, order)
        .try_sub(&Jet::coord_plus(at, order).scale_complex(eps))?;
    let psi_jet = embed_profile(&psi, &xi_jet, at.xm - eps * at.xp, k)?;
    let f = psi_jet.mul(&soul_mono(k, at, order, &[6, 7])?)?;

    Ok(FrameCoefficients {
        phi,
        h,
        q_plus,
        q_minus,
        r_plus: s0.scale(b2),
        r_minus: s0.scale(b1),
        s_plus: s0.clone(),
        s_minus: s0.clone(),
        t_plus: s0.scale(b4),
        t_minus: s0.scale(b3),
        f,
    })
}

/// The curvature display stored with the l39 family, evaluated with honest
/// Grassmann arithmetic (every term carries two copies of the same odd
/// constant, so the whole expression collapses).
pub fn l39_printed_curvature(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<Superfield, CatalogError> {
    let pieces = l39_pieces(p, k, at, order)?;
    let one = Superfield::constant(k, at, order, i64c(1.0));
    let four = i64c(4.0);

    let t1 = pieces.h0.mul(&pieces.h0)?;
    let t2 = pieces
        .theta2
        .mul(&pieces.h0.mul(&pieces.l0)?.mul(&pieces.e_xi)?)?
        .scale(im() * four);
    let bracket = one.sub(&pieces.theta2.mul(&pieces.phi1)?.scale(i64c(2.0)))?;
    let t3 = pieces
        .a
        .mul(&pieces.c)?
        .mul(&pieces.e_m2xi)?
        .mul(&bracket)?
        .scale(four);
    let t4 = pieces
        .theta2
        .mul(&pieces.a.mul(&pieces.e)?.mul(&pieces.e_m2xi)?)?
        .scale(four);
    let t5 = pieces
        .theta2
        .mul(&pieces.c.mul(&pieces.b)?.mul(&pieces.e_m2xi)?)?
        .scale(four);

    let total = t1.add(&t2)?.add(&t3)?.add(&t4)?.add(&t5)?;
    Ok(total.mul(&pieces.e_max_plus.mul(&pieces.e_max_plus)?)?)
}

// ---------------------------------------------------------------------------
// l27prime: C0 plus an x+ translation; symmetry variable x-.
// Fermionic constant S0+ -> xi1; f soul = xi2 xi3.
// ---------------------------------------------------------------------------

struct L27Pieces {
    theta2: Superfield,
    psi: Superfield,
    h0: Superfield,
    h1: Superfield,
    phi0: Superfield,
    phi1: Superfield,
    e_eps_xp: Superfield,
}

fn l27_pieces(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<L27Pieces, CatalogError> {
    if k < 3 {
        return Err(CatalogError::InvalidParameter(
            "l27prime needs at least 3 generators".into(),
        ));
    }
    let eps = p.scalar_or("eps", 1.0);
    let b0p = p.scalar_or("B0plus", 1.0);
    let b0m = p.scalar_or("B0minus", 2.0);
    let b1p = p.scalar_or("B1plus", 0.0);
    let b1m = p.scalar_or("B1minus", 0.0);
    let k0 = p.scalar_or("k0", 0.0);
    let psi0 = p.scalar_or("psi0", 1.0);
    require_nonzero(b0p, "B0plus")?;

    let xm_jet = Jet::coord_minus(at, order);
    let phi0prof = p.profile_or("phi0", Profile::Zero);
    let phi0_jet = {
        let series = phi0prof.taylor(at.xm, order);
        Jet::compose_univariate(&xm_jet, &series)
    };
    let phi0 = Superfield::from_jet(k, phi0_jet.clone());

    // φ1 = ε (B0- B1+ - B0+ B1-) / (B0+)^2 x- + k0
    let slope = eps * (b0m * b1p - b0p * b1m) / (b0p * b0p);
    let phi1_jet = xm_jet
        .scale_complex(slope)
        .try_add(&Jet::constant(at, order, k0))?;
    let phi1 = Superfield::from_jet(k, phi1_jet);

    // scalar ODE lift: ψ' = (ε B0-/B0+ + φ0') ψ with seed ψ(x-0) = psi0
    let rate = eps * b0m / b0p;
    let phi0_deriv = phi0prof.derivative().taylor(at.xm, order);
    let mut c_series = phi0_deriv;
    c_series[0] += rate;
    let mut psi_series = vec![Complex64::new(0.0, 0.0); order + 1];
    psi_series[0] = psi0;
    for j in 0..order {
        // (j+1) P[j+1] = Σ_m C[m] P[j-m]
        let mut s = Complex64::new(0.0, 0.0);
        for m in 0..=j {
            s += c_series[m] * psi_series[j - m];
        }
        psi_series[j + 1] = s / i64c((j + 1) as f64);
    }
    let psi_scalar = Jet::compose_univariate(&xm_jet, &psi_series);
    let psi = Superfield::from_jet(k, psi_scalar).mul(&soul_mono(k, at, order, &[2, 3])?)?;

    let e_mphi0 = Superfield::from_jet(k, phi0_jet.scale_complex(i64c(-1.0)).exp());
    // h0 = 2iε (B1+ - B0+ φ1) e^{-φ0} ψ, h1 = 2iε B0- e^{-φ0} ψ
    let h0 = Superfield::constant(k, at, order, b1p)
        .sub(&phi1.scale(b0p))?
        .mul(&e_mphi0)?
        .mul(&psi)?
        .scale(im() * eps * i64c(2.0));
    let h1 = e_mphi0.mul(&psi)?.scale(im() * eps * b0m * i64c(2.0));

    let e_eps_xp = Superfield::from_jet(k, Jet::coord_plus(at, order).scale_complex(eps).exp());
    let theta2 = theta_pair(k, at, order)?;

    Ok(L27Pieces {
        theta2,
        psi,
        h0,
        h1,
        phi0,
        phi1,
        e_eps_xp,
    })
}

pub fn build_l27prime(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<FrameCoefficients, CatalogError> {
    let eps = p.scalar_or("eps", 1.0);
    let a = p.scalar_or("a", 1.0);
    let b0p = p.scalar_or("B0plus", 1.0);
    let b0m = p.scalar_or("B0minus", 2.0);
    let b1p = p.scalar_or("B1plus", 0.0);
    let b1m = p.scalar_or("B1minus", 0.0);
    let s0c = p.scalar_or("s0", 1.0);
    let pieces = l27_pieces(p, k, at, order)?;

    let h = pieces
        .h0
        .add(&pieces.theta2.mul(&pieces.h1)?)?
        .mul(&pieces.e_eps_xp)?;
    let bracket_p = Superfield::constant(k, at, order, b0p)
        .add(&pieces.theta2.scale(b1p))?;
    let bracket_m = Superfield::constant(k, at, order, b0m)
        .add(&pieces.theta2.scale(b1m))?;
    let q_plus = bracket_p.mul(&pieces.psi)?.mul(&pieces.e_eps_xp)?;
    let q_minus = bracket_m.mul(&pieces.psi)?.mul(&pieces.e_eps_xp)?;

    let s0 = soul_mono(k, at, order, &[1])?.scale(s0c);
    let zero_odd = Superfield::zero(k, at, order, Parity::Odd);

    let phi = pieces.phi0.add(&pieces.theta2.mul(&pieces.phi1)?)?;
    let e_m2eps_xp = Superfield::from_jet(
        k,
        Jet::coord_plus(at, order)
            .scale_complex(eps * i64c(-2.0))
            .exp(),
    );
    let f = e_m2eps_xp.mul(&pieces.psi)?;

    Ok(FrameCoefficients {
        phi,
        h,
        q_plus,
        q_minus,
        r_plus: zero_odd.clone(),
        r_minus: zero_odd.clone(),
        s_plus: s0.clone(),
        s_minus: s0.scale(a),
        t_plus: zero_odd.clone(),
        t_minus: zero_odd,
        f,
    })
}

/// The curvature display stored with the l27prime family: with a soul seed
/// `ψ = ψ0 xi2 xi3` the whole display vanishes exactly (every term carries
/// ψ²), matching the computed curvature.
pub fn l27_printed_curvature(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<Superfield, CatalogError> {
    let eps = p.scalar_or("eps", 1.0);
    let b0p = p.scalar_or("B0plus", 1.0);
    let b0m = p.scalar_or("B0minus", 2.0);
    let b1p = p.scalar_or("B1plus", 0.0);
    let b1m = p.scalar_or("B1minus", 0.0);
    let pieces = l27_pieces(p, k, at, order)?;

    let psi_sq = pieces.psi.mul(&pieces.psi)?;
    let numerator = Superfield::constant(k, at, order, b0p * b0m)
        .add(&pieces.theta2.scale(b0p * b1m + b0m * b1p))?;
    let e2phi0 = pieces.phi0.scale(i64c(2.0)).exp()?;
    let one = Superfield::constant(k, at, order, i64c(1.0));
    let denom = e2phi0.mul(&one.add(&pieces.theta2.mul(&pieces.phi1)?.scale(i64c(2.0)))?)?;
    let first = psi_sq.mul(&numerator)?.mul(&denom.invert()?)?;

    let second = pieces.h0.mul(&pieces.h0)?.add(
        &pieces
            .theta2
            .mul(&pieces.h0.mul(&pieces.h1)?)?
            .scale(i64c(2.0)),
    )?;

    let e2eps = pieces.e_eps_xp.mul(&pieces.e_eps_xp)?;
    let _ = eps;
    Ok(first.add(&second)?.mul(&e2eps)?)
}

/// Umbilic test for the l27prime family: the scalar constants multiplying
/// ψ² in the stored criterion must both vanish.
pub fn l27_umbilic(p: &FamilyParameters) -> bool {
    let b0p = p.scalar_or("B0plus", 1.0);
    let b0m = p.scalar_or("B0minus", 2.0);
    let b1p = p.scalar_or("B1plus", 0.0);
    let b1m = p.scalar_or("B1minus", 0.0);
    (b0p * b0m).norm() < 1e-12 && (b0p * b1m + b0m * b1p).norm() < 1e-12
}

// ---------------------------------------------------------------------------
// l26doubleprime: the K1/K0/C0 dilation family with fractional x+ powers.
// Fermionic constants l0 -> xi1, R0+ -> xi2, R0- -> xi3, T0- -> xi4;
// f soul = xi5 xi6.
// ---------------------------------------------------------------------------

struct L26Pieces {
    theta2: Superfield,
    big_b: Superfield,
    a_jet: Superfield,
    g_jet: Superfield,
    rho_jet: Superfield,
    rho_prime: Superfield,
    bracket: Superfield,
}

fn l26_pieces(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<L26Pieces, CatalogError> {
    if k < 6 {
        return Err(CatalogError::InvalidParameter(
            "l26doubleprime needs at least 6 generators".into(),
        ));
    }
    if at.xp.re <= 0.0 {
        return Err(CatalogError::Jet(crate::jet::JetError::Ring(
            crate::ring::RingError::BranchCut,
        )));
    }
    let l0c = p.scalar_or("l0c", 1.0);
    let r0pc = p.scalar_or("r0pc", 1.0);
    let r0mc = p.scalar_or("r0mc", 1.0);
    let t0mc = p.scalar_or("t0mc", 1.0);
    let a0 = p.scalar_or("A0", 1.0);
    require_nonzero(a0, "A0")?;

    let big_b = soul_mono(k, at, order, &[1, 2, 3, 4])?.scale(l0c * r0pc * r0mc * t0mc);

    let xm_jet = Jet::coord_minus(at, order);
    let embed = |prof: &Profile| -> Result<Superfield, CatalogError> {
        let series = prof.taylor(at.xm, order);
        Ok(Superfield::from_jet(
            k,
            Jet::compose_univariate(&xm_jet, &series),
        ))
    };
    let a_prof = p.profile_or(
        "A",
        Profile::Const { value: a0 },
    );
    let g_prof = p.profile_or("G", Profile::Zero);
    let rho0 = p.scalar_or("rho0", 1.0);
    let rho1 = p.scalar_or("rho1", 0.0);
    let rho_prof = p.profile_or(
        "rho",
        Profile::Poly {
            coeffs: vec![rho0, rho1],
        },
    );
    let a_jet = embed(&a_prof)?;
    let g_jet = embed(&g_prof)?;
    let rho_jet = embed(&rho_prof)?;
    let rho_prime = embed(&rho_prof.derivative())?;

    let xp_jet = Jet::coord_plus(at, order);
    let theta2 = theta_pair(k, at, order)?;
    let xp_mhalf = Superfield::from_jet(k, xp_jet.powf(-0.5)?);
    let one = Superfield::constant(k, at, order, i64c(1.0));
    let bracket = one.add(&theta2.mul(&xp_mhalf)?.mul(&g_jet)?)?;

    Ok(L26Pieces {
        theta2,
        big_b,
        a_jet,
        g_jet,
        rho_jet,
        rho_prime,
        bracket,
    })
}

pub fn build_l26doubleprime(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<FrameCoefficients, CatalogError> {
    let a = p.scalar_or("a", 2.0);
    require_nonzero(a, "a")?;
    if (a - i64c(0.5)).norm() < 1e-9 {
        return Err(CatalogError::InvalidParameter(
            "a = 1/2 degenerates the family".into(),
        ));
    }
    let l1 = p.scalar_or("l1", 1.0);
    let l2 = p.scalar_or("l2", 1.0);
    let r0pc = p.scalar_or("r0pc", 1.0);
    let r0mc = p.scalar_or("r0mc", 1.0);
    let t0mc = p.scalar_or("t0mc", 1.0);
    let psi0 = p.scalar_or("psi0", 1.0);
    let pieces = l26_pieces(p, k, at, order)?;

    let xp_jet = Jet::coord_plus(at, order);
    let pw = |q: f64| -> Result<Superfield, CatalogError> {
        Ok(Superfield::from_jet(k, xp_jet.powf(q)?))
    };
    let af = a.re;

    let h = pieces
        .theta2
        .mul(&pieces.big_b.mul(&pieces.rho_prime)?)?
        .mul(&pw((af - 2.0) / 2.0)?)?
        .scale(im() * i64c(2.0));

    let q_plus = pieces
        .big_b
        .mul(&pieces.a_jet)?
        .mul(&pieces.rho_jet)?
        .mul(&pw(-(af + 2.0) / 2.0)?)?
        .mul(&pieces.bracket)?;

    let q_minus = pieces
        .big_b
        .mul(&pw(-af / 2.0)?)?
        .mul(&pieces.bracket)?
        .scale(i64c(2.0) / a);

    let r_plus = soul_mono(k, at, order, &[2])?
        .scale(l1 * r0pc)
        .mul(&pw(-0.5)?)?;
    let r_minus = soul_mono(k, at, order, &[3])?
        .scale(l2 * r0mc)
        .mul(&pw(-1.0)?)?;
    let t0 = soul_mono(k, at, order, &[4])?.scale(t0mc);
    let zero_odd = Superfield::zero(k, at, order, Parity::Odd);

    // e^φ = A (x+)^{-a} (1 + (x+)^{-1/2} θθ G)
    let ln_a = Superfield::from_jet(k, {
        let series = p
            .profile_or("A", Profile::Const { value: p.scalar_or("A0", 1.0) })
            .taylor(at.xm, order);
        let a_biv = Jet::compose_univariate(&Jet::coord_minus(at, order), &series);
        a_biv.ln()?
    });
    let ln_xp = Superfield::from_jet(k, xp_jet.ln()?);
    let theta_part = pieces
        .theta2
        .mul(&pw(-0.5)?)?
        .mul(&pieces.g_jet)?;
    let phi = ln_a.sub(&ln_xp.scale(a))?.add(&theta_part)?;

    let psi_prof = p.profile_or("psi", Profile::Const { value: psi0 });
    let psi_series = psi_prof.taylor(at.xm, order);
    let psi_jet = Jet::compose_univariate(&Jet::coord_minus(at, order), &psi_series);
    let f = Superfield::from_jet(k, psi_jet)
        .mul(&soul_mono(k, at, order, &[5, 6])?)?
        .mul(&pw(0.5)?)?;

    Ok(FrameCoefficients {
        phi,
        h,
        q_plus,
        q_minus,
        r_plus,
        r_minus,
        s_plus: t0.clone(),
        s_minus: zero_odd.clone(),
        t_plus: zero_odd,
        t_minus: t0,
        f,
    })
}

/// The curvature display stored with the l26doubleprime family:
/// `(8B/(aA)) (x+)^{a-1} ρ (1 + (x+)^{-1/2} θ+θ- G)`. Evaluated honestly
/// this is a nonzero soul element, while the defining curvature expression
/// collapses (it is quadratic in B); the verifier reports the mismatch.
pub fn l26_printed_curvature(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
) -> Result<Superfield, CatalogError> {
    let a = p.scalar_or("a", 2.0);
    require_nonzero(a, "a")?;
    let pieces = l26_pieces(p, k, at, order)?;
    let xp_jet = Jet::coord_plus(at, order);
    let pw = Superfield::from_jet(k, xp_jet.powf(a.re - 1.0)?);
    Ok(pieces
        .big_b
        .mul(&pieces.a_jet.invert()?)?
        .mul(&pw)?
        .mul(&pieces.rho_jet)?
        .mul(&pieces.bracket)?
        .scale(i64c(8.0) / a))
}

/// Umbilic locus test for the l26doubleprime family: with `H² = 0` exactly,
/// umbilic points are the zero set of the stored curvature display.
pub fn l26_umbilic_at(
    p: &FamilyParameters,
    k: usize,
    at: BasePoint,
    order: usize,
    tol: f64,
) -> Result<bool, CatalogError> {
    let printed = l26_printed_curvature(p, k, at, order)?;
    // leading coefficient: the body jet value on the B monomial
    let mut lead = 0.0f64;
    for (_, c) in printed.value().terms() {
        lead = lead.max(c.body().norm());
    }
    Ok(lead <= tol)
}

// ---------------------------------------------------------------------------
// classical families
// ---------------------------------------------------------------------------

/// Exponential solution of the classical system:
/// `H = l0 e^{-a(z+zbar)}`, `Q = Qbar = k0 e^{a(z+zbar)}`,
/// `e^u = -(2 k0/l0) e^{2a(z+zbar)}`.
pub fn build_classical_l12prime(
    p: &FamilyParameters,
    at: BasePoint,
    order: usize,
) -> Result<ClassicalData, CatalogError> {
    let k0 = p.scalar_or("k0", 1.0);
    let l0 = p.scalar_or("l0", -2.0);
    let a = p.scalar_or("a", 1.0);
    require_nonzero(k0, "k0")?;
    require_nonzero(l0, "l0")?;
    let u0 = -i64c(2.0) * k0 / l0;
    if u0.im.abs() > 1e-12 || u0.re <= 0.0 {
        return Err(CatalogError::InvalidParameter(
            "-2 k0 / l0 must be a positive real for a real conformal factor".into(),
        ));
    }

    let zsum = Jet::coord_plus(at, order).try_add(&Jet::coord_minus(at, order))?;
    let u = zsum
        .scale_complex(a * i64c(2.0))
        .try_add(&Jet::constant(at, order, u0.ln()))?;
    let h = zsum.scale_complex(-a).exp().scale_complex(l0);
    let q = zsum.scale_complex(a).exp().scale_complex(k0);
    Ok(ClassicalData {
        u,
        h,
        q: q.clone(),
        qbar: q,
    })
}

/// The ODE-constrained classical family: at each evaluation point the
/// component function `v(ξ)`, `ξ = zbar - ε z`, is lifted to a jet from the
/// seeds `(v0, v1)` by differentiating `v'' = v'^2 / v + k0² v e^{aξ}`.
pub fn build_classical_l17prime(
    p: &FamilyParameters,
    at: BasePoint,
    order: usize,
) -> Result<ClassicalData, CatalogError> {
    let eps = p.scalar_or("eps", 1.0);
    let a = p.scalar_or("a", 1.0);
    let k0 = p.scalar_or("k0", 1.0);
    let v0 = p.scalar_or("v0", 1.0);
    let v1 = p.scalar_or("v1", 0.0);
    if v0.re <= 0.0 || v0.im.abs() > 1e-12 {
        return Err(CatalogError::InvalidParameter(
            "v seed must be a positive real".into(),
        ));
    }

    let xi0 = at.xm - eps * at.xp;
    // scaled Taylor coefficients of v at ξ0 from the ODE
    let len = order + 1;
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    v[0] = v0;
    if len > 1 {
        v[1] = v1;
    }
    let e_axi: Vec<Complex64> = {
        let e0 = (a * xi0).exp();
        let mut fact = 1.0;
        (0..len)
            .map(|j| {
                if j > 0 {
                    fact *= j as f64;
                }
                e0 * a.powu(j as u32) / i64c(fact)
            })
            .collect()
    };
    for m in 2..len {
        // series arithmetic on the first m coefficients
        let vp: Vec<Complex64> = (0..len)
            .map(|j| {
                if j + 1 < len {
                    v[j + 1] * i64c((j + 1) as f64)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let vp2 = series_mul(&vp, &vp, len);
        let vinv = series_recip(&v, len)?;
        let term1 = series_mul(&vp2, &vinv, len);
        let term2 = series_mul(&v, &e_axi, len);
        let rhs_j = term1[m - 2] + k0 * k0 * term2[m - 2];
        v[m] = rhs_j / i64c((m * (m - 1)) as f64);
    }

    let xi_jet = Jet::coord_minus(at, order)
        .try_sub(&Jet::coord_plus(at, order).scale_complex(eps))?;
    let v_jet = Jet::compose_univariate(&xi_jet, &v);

    let u = Jet::coord_plus(at, order)
        .scale_complex(a * i64c(2.0))
        .try_add(&v_jet.ln()?)?;
    // H = k0 v^{-1/2} e^{(a/2)(zbar - 3z)}
    let h_exp = Jet::coord_minus(at, order)
        .try_sub(&Jet::coord_plus(at, order).scale_complex(i64c(3.0)))?
        .scale_complex(a * i64c(0.5))
        .exp();
    let h = v_jet.powf(-0.5)?.try_mul(&h_exp)?.scale_complex(k0);
    // Q = Qbar = k0 v^{1/2} e^{(a/2)(z + zbar)} / 2
    let q_exp = Jet::coord_plus(at, order)
        .try_add(&Jet::coord_minus(at, order))?
        .scale_complex(a * i64c(0.5))
        .exp();
    let q = v_jet
        .powf(0.5)?
        .try_mul(&q_exp)?
        .scale_complex(k0 * i64c(0.5));

    Ok(ClassicalData {
        u,
        h,
        q: q.clone(),
        qbar: q,
    })
}

fn series_mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for i in 0..len {
        for j in 0..(len - i) {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

fn series_recip(a: &[Complex64], len: usize) -> Result<Vec<Complex64>, CatalogError> {
    if a[0].norm() < 1e-14 {
        return Err(CatalogError::InvalidParameter(
            "series reciprocal of zero constant term".into(),
        ));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[0] = i64c(1.0) / a[0];
    for m in 1..len {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=m {
            s += a[j] * out[m - j];
        }
        out[m] = -s / a[0];
    }
    Ok(out)
}
