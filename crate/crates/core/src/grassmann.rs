//! Exact arithmetic in a complex Grassmann algebra with `K` ordinary
//! generators `xi1..xiK` plus the two distinguished odd coordinates
//! `th+`, `th-`, over a pluggable coefficient ring.
//!
//! Monomials are bitmasks over `K + 2` slots in the fixed canonical order
//! `xi1 < xi2 < ... < xiK < th+ < th-`. Putting the theta slots last makes
//! superfield component extraction a mask operation. Every element is kept in
//! canonical form: strictly ascending generators inside a monomial, no
//! repeated generator, no stored coefficient below the relative pruning
//! threshold.
//!
//! Derivatives with respect to odd generators are *left* derivatives:
//! `derive(g, m)` removes `g` from `m` and multiplies by `(-1)^p` where `p`
//! is the number of generators preceding `g` in `m`. The sign table this
//! induces, e.g. `derive(th+ th-, th-) = -th+`, is exactly the one pinned by
//! the anticommutation identities of the covariant superspace derivatives
//! built on top (see the `superfield` module tests).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::ring::{Ring, RingError};

/// Relative threshold below which coefficients are dropped.
pub const PRUNE_REL_TOL: f64 = 1e-14;

/// Hard cap on generator slots (bitmask width).
pub const MAX_SLOTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrassmannError {
    #[error("generator index {0} out of range for K={1}")]
    GeneratorOutOfRange(usize, usize),
    #[error("elements built over different generator counts: K={0} vs K={1}")]
    KMismatch(usize, usize),
    #[error("coefficient ring contexts are incompatible")]
    RingMismatch,
    #[error("bodiless element is not invertible")]
    BodilessNotInvertible,
    #[error("exponential of an element of odd or mixed parity")]
    OddExponent,
    #[error("fractional power requires an even element with invertible body")]
    FractionalPower,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// One of the `K + 2` anticommuting generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    /// Ordinary generator `xi<n>`, 1-based.
    Xi(u8),
    ThetaPlus,
    ThetaMinus,
}

impl Generator {
    /// Bit slot in the canonical order for an algebra with `k` xi-generators.
    pub fn slot(self, k: usize) -> Result<u32, GrassmannError> {
        match self {
            Generator::Xi(n) => {
                if n == 0 || n as usize > k {
                    Err(GrassmannError::GeneratorOutOfRange(n as usize, k))
                } else {
                    Ok((n - 1) as u32)
                }
            }
            Generator::ThetaPlus => Ok(k as u32),
            Generator::ThetaMinus => Ok(k as u32 + 1),
        }
    }

    /// 1-based index as used in textual generator ids (`K+1` and `K+2` are
    /// the theta slots).
    pub fn index(self, k: usize) -> usize {
        match self {
            Generator::Xi(n) => n as usize,
            Generator::ThetaPlus => k + 1,
            Generator::ThetaMinus => k + 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Sign `(-1)^p` from sorting the concatenation of two disjoint ascending
/// monomials: each generator of `b` jumps over the generators of `a` above it.
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn monomial_parity(mask: u32) -> Parity {
    if mask.count_ones() % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Sparse sum of signed canonical generator monomials with coefficients in a
/// ring `R`. The element carries its generator count `k` and a context zero
/// of the ring so neutral coefficients can be produced in the right context
/// (jets need an order and a base point).
#[derive(Debug, Clone)]
pub struct GrassmannElement<R: Ring> {
    k: usize,
    zero: R,
    terms: BTreeMap<u32, R>,
}

impl<R: Ring> GrassmannElement<R> {
    pub fn zero(k: usize, zero: R) -> Self {
        assert!(k + 2 <= MAX_SLOTS, "too many generators");
        GrassmannElement {
            k,
            zero,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(k: usize, zero: R) -> Self {
        let mut e = Self::zero(k, zero);
        e.terms.insert(0, e.zero.one_like());
        e
    }

    /// Scalar embedding of a ring element.
    pub fn scalar(k: usize, zero: R, c: R) -> Self {
        let mut e = Self::zero(k, zero);
        e.set_term(0, c);
        e.prune();
        e
    }

    /// Single generator with unit coefficient.
    pub fn generator(k: usize, zero: R, g: Generator) -> Result<Self, GrassmannError> {
        let slot = g.slot(k)?;
        let mut e = Self::zero(k, zero);
        e.terms.insert(1 << slot, e.zero.one_like());
        Ok(e)
    }

    /// Canonicalize a raw sum of (generator sequence, coefficient) terms:
    /// sort each sequence with its permutation sign, drop squares, merge like
    /// terms, prune.
    pub fn from_raw_terms<I>(k: usize, zero: R, raw: I) -> Result<Self, GrassmannError>
    where
        I: IntoIterator<Item = (Vec<Generator>, R)>,
    {
        let mut e = Self::zero(k, zero);
        'term: for (gens, coeff) in raw {
            let mut mask = 0u32;
            let mut sign = 1.0;
            for g in gens {
                let slot = g.slot(k)?;
                let bit = 1u32 << slot;
                if mask & bit != 0 {
                    continue 'term; // repeated generator: term vanishes
                }
                // multiplying the accumulated ascending word by g on the right
                sign *= merge_sign(mask, bit);
                mask |= bit;
            }
            let signed = coeff.scale(Complex64::new(sign, 0.0));
            e.add_term(mask, signed);
        }
        e.prune();
        Ok(e)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn context_zero(&self) -> &R {
        &self.zero
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &R)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mask: u32) -> R {
        self.terms.get(&mask).cloned().unwrap_or_else(|| self.zero.zero_like())
    }

    fn add_term(&mut self, mask: u32, c: R) {
        match self.terms.get_mut(&mask) {
            Some(existing) => *existing = existing.add(&c),
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    fn set_term(&mut self, mask: u32, c: R) {
        self.terms.insert(mask, c);
    }

    /// Drop coefficients below `PRUNE_REL_TOL` relative to the largest one.
    pub fn prune(&mut self) {
        let max = self.max_abs();
        let cut = PRUNE_REL_TOL * max;
        self.terms.retain(|_, c| c.max_abs() > cut && c.max_abs() > 0.0);
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.sub(rhs).map(|d| d.max_abs() <= tol).unwrap_or(false)
    }

    fn check_compat(&self, rhs: &Self) -> Result<(), GrassmannError> {
        if self.k != rhs.k {
            return Err(GrassmannError::KMismatch(self.k, rhs.k));
        }
        if !self.zero.compatible(&rhs.zero) {
            return Err(GrassmannError::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, GrassmannError> {
        self.check_compat(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, GrassmannError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.scale(s);
        }
        out.prune();
        out
    }

    pub fn scale_ring(&self, s: &R) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.mul(s);
        }
        out.prune();
        out
    }

    /// Distributive product with canonicalization; graded commutativity
    /// holds on homogeneous elements.
    pub fn mul(&self, rhs: &Self) -> Result<Self, GrassmannError> {
        self.check_compat(rhs)?;
        let mut out = Self::zero(self.k, self.zero.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if ma & mb != 0 {
                    continue; // repeated generator
                }
                let sign = merge_sign(*ma, *mb);
                let c = ca.mul(cb).scale(Complex64::new(sign, 0.0));
                out.add_term(ma | mb, c);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Parity classification; zero reports even.
    pub fn parity(&self) -> Parity {
        let mut seen_even = false;
        let mut seen_odd = false;
        for m in self.terms.keys() {
            match monomial_parity(*m) {
                Parity::Even => seen_even = true,
                Parity::Odd => seen_odd = true,
                Parity::Mixed => unreachable!(),
            }
        }
        match (seen_even, seen_odd) {
            (true, true) => Parity::Mixed,
            (false, true) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> R {
        self.coeff(0)
    }

    /// Nilpotent remainder `self - body`.
    pub fn soul(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }

    pub fn body_soul(&self) -> (R, Self) {
        (self.body(), self.soul())
    }

    /// Exact inverse by the finite nilpotent series
    /// `body^-1 * sum_k (-soul/body)^k`; two-sided by construction since the
    /// body is a central scalar.
    pub fn invert(&self) -> Result<Self, GrassmannError> {
        let body = self.body();
        let binv = body
            .try_recip()
            .map_err(|_| GrassmannError::BodilessNotInvertible)?;
        let soul = self.soul();
        let mut out = Self::one(self.k, self.zero.clone());
        let mut power = Self::one(self.k, self.zero.clone());
        for j in 1..=(self.k + 3) {
            power = power.mul(&soul)?;
            if power.terms.is_empty() {
                break;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let mut binv_pow = binv.clone();
            for _ in 1..j {
                binv_pow = binv_pow.mul(&binv);
            }
            let term = power
                .scale_ring(&binv_pow)
                .scale(Complex64::new(sign, 0.0));
            out = out.add(&term)?;
        }
        out = out.scale_ring(&binv);
        out.prune();
        Ok(out)
    }

    /// `exp(body) * sum_k soul^k / k!`, finite by nilpotency. Defined for
    /// even elements only so the series is unambiguous.
    pub fn exp(&self) -> Result<Self, GrassmannError> {
        if self.parity() != Parity::Even {
            return Err(GrassmannError::OddExponent);
        }
        let (body, soul) = self.body_soul();
        let eb = body.try_exp()?;
        let mut out = Self::one(self.k, self.zero.clone());
        let mut power = Self::one(self.k, self.zero.clone());
        let mut factorial = 1.0f64;
        for j in 1..=(self.k + 3) {
            power = power.mul(&soul)?;
            if power.terms.is_empty() {
                break;
            }
            factorial *= j as f64;
            out = out.add(&power.scale(Complex64::new(1.0 / factorial, 0.0)))?;
        }
        out = out.scale_ring(&eb);
        out.prune();
        Ok(out)
    }

    /// Principal-branch real power of an even element with invertible body:
    /// `body^r * sum_k C(r,k) (soul/body)^k`.
    pub fn powf(&self, r: f64) -> Result<Self, GrassmannError> {
        if self.parity() != Parity::Even {
            return Err(GrassmannError::FractionalPower);
        }
        let (body, soul) = self.body_soul();
        let br = body.try_powf(r)?;
        let binv = body
            .try_recip()
            .map_err(|_| GrassmannError::BodilessNotInvertible)?;
        let mut out = Self::one(self.k, self.zero.clone());
        let mut power = Self::one(self.k, self.zero.clone());
        let mut binom = 1.0f64;
        for j in 1..=(self.k + 3) {
            power = power.mul(&soul)?;
            if power.terms.is_empty() {
                break;
            }
            binom *= (r - (j as f64 - 1.0)) / j as f64;
            let mut binv_pow = binv.clone();
            for _ in 1..j {
                binv_pow = binv_pow.mul(&binv);
            }
            let term = power
                .scale_ring(&binv_pow)
                .scale(Complex64::new(binom, 0.0));
            out = out.add(&term)?;
        }
        out = out.scale_ring(&br);
        out.prune();
        Ok(out)
    }

    /// Left interior derivative with respect to generator `g`.
    pub fn derive(&self, g: Generator) -> Result<Self, GrassmannError> {
        let slot = g.slot(self.k)?;
        let bit = 1u32 << slot;
        let below = bit - 1;
        let mut out = Self::zero(self.k, self.zero.clone());
        for (m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let preceding = (m & below).count_ones();
            let sign = if preceding % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(m & !bit, c.scale(Complex64::new(sign, 0.0)));
        }
        out.prune();
        Ok(out)
    }

    /// Left-multiply by a single generator.
    pub fn mul_generator_left(&self, g: Generator) -> Result<Self, GrassmannError> {
        let gen = Self::generator(self.k, self.zero.clone(), g)?;
        gen.mul(self)
    }

    /// Apply a ring map to every coefficient (used to push jet operations
    /// through an element termwise).
    pub fn map_coeffs<F, S, E>(&self, zero: S, f: F) -> Result<GrassmannElement<S>, E>
    where
        S: Ring,
        F: Fn(&R) -> Result<S, E>,
    {
        let mut out = GrassmannElement::zero(self.k, zero);
        for (m, c) in &self.terms {
            out.set_term(*m, f(c)?);
        }
        out.prune();
        Ok(out)
    }

    /// Largest-magnitude (monomial, coefficient) pair, for reports.
    pub fn worst_term(&self) -> Option<(u32, &R)> {
        self.terms
            .iter()
            .max_by(|a, b| {
                a.1.max_abs()
                    .partial_cmp(&b.1.max_abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(m, c)| (*m, c))
    }

    /// Render a monomial mask like `xi1^xi3^th+`; the empty monomial is `1`.
    pub fn monomial_name(&self, mask: u32) -> String {
        monomial_name(mask, self.k)
    }
}

pub fn monomial_name(mask: u32, k: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for slot in 0..(k as u32 + 2) {
        if mask & (1 << slot) != 0 {
            if slot < k as u32 {
                parts.push(format!("xi{}", slot + 1));
            } else if slot == k as u32 {
                parts.push("th+".to_string());
            } else {
                parts.push("th-".to_string());
            }
        }
    }
    parts.join("^")
}

impl<R: Ring> fmt::Display for GrassmannElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *m == 0 {
                write!(f, "{}", c.fmt_coeff())?;
            } else {
                write!(f, "{} * {}", c.fmt_coeff(), self.monomial_name(*m))?;
            }
        }
        Ok(())
    }
}

/// Convenience alias for constant supernumbers.
pub type GrassmannConst = GrassmannElement<Complex64>;

/// Constant-supernumber constructors used by the algebra and catalog layers.
impl GrassmannConst {
    pub fn complex(k: usize, c: Complex64) -> Self {
        Self::scalar(k, Complex64::new(0.0, 0.0), c)
    }

    pub fn real(k: usize, x: f64) -> Self {
        Self::complex(k, Complex64::new(x, 0.0))
    }

    pub fn xi(k: usize, n: u8) -> Result<Self, GrassmannError> {
        Self::generator(k, Complex64::new(0.0, 0.0), Generator::Xi(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn czero() -> Complex64 {
        c(0.0, 0.0)
    }

    const TOL: f64 = 1e-12;

    fn xi(k: usize, n: u8) -> GrassmannConst {
        GrassmannConst::xi(k, n).unwrap()
    }

    #[test]
    fn canonicalize_sorts_with_sign() {
        // (xi2, xi1) with coefficient 1 -> -xi1 xi2
        let e = GrassmannConst::from_raw_terms(
            4,
            czero(),
            vec![(vec![Generator::Xi(2), Generator::Xi(1)], c(1.0, 0.0))],
        )
        .unwrap();
        let expected = xi(4, 1).mul(&xi(4, 2)).unwrap().neg();
        assert!(e.approx_eq(&expected, TOL));
    }

    #[test]
    fn canonicalize_drops_squares() {
        let e = GrassmannConst::from_raw_terms(
            4,
            czero(),
            vec![(
                vec![Generator::ThetaPlus, Generator::ThetaPlus],
                c(5.0, 0.0),
            )],
        )
        .unwrap();
        assert!(e.is_zero(TOL));
    }

    #[test]
    fn canonicalize_merges_like_terms() {
        let e = GrassmannConst::from_raw_terms(
            4,
            czero(),
            vec![
                (vec![Generator::Xi(1), Generator::Xi(2)], c(1.0, 0.0)),
                (vec![Generator::Xi(2), Generator::Xi(1)], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert!(e.is_zero(TOL));
    }

    #[test]
    fn canonicalize_rejects_out_of_range() {
        let e = GrassmannConst::from_raw_terms(
            2,
            czero(),
            vec![(vec![Generator::Xi(3)], c(1.0, 0.0))],
        );
        assert!(matches!(e, Err(GrassmannError::GeneratorOutOfRange(3, 2))));
    }

    #[test]
    fn mul_antisymmetry_and_nilpotent_square() {
        let k = 4;
        let x1 = xi(k, 1);
        let x2 = xi(k, 2);
        let x12 = x1.mul(&x2).unwrap();
        let x21 = x2.mul(&x1).unwrap();
        assert!(x12.approx_eq(&x21.neg(), TOL));

        // (1 + xi1 xi2)(1 - xi1 xi2) = 1
        let one = GrassmannConst::one(k, czero());
        let a = one.add(&x12).unwrap();
        let b = one.sub(&x12).unwrap();
        assert!(a.mul(&b).unwrap().approx_eq(&one, TOL));

        // (th+ th-) th+ = 0
        let tp = GrassmannConst::generator(k, czero(), Generator::ThetaPlus).unwrap();
        let tm = GrassmannConst::generator(k, czero(), Generator::ThetaMinus).unwrap();
        let tptm = tp.mul(&tm).unwrap();
        assert!(tptm.mul(&tp).unwrap().is_zero(TOL));
    }

    #[test]
    fn parity_classification() {
        let k = 4;
        let x1 = xi(k, 1);
        let x2 = xi(k, 2);
        let x3 = xi(k, 3);
        let x12 = x1.mul(&x2).unwrap();
        assert_eq!(x12.parity(), Parity::Even);
        let x123 = x12.mul(&x3).unwrap();
        assert_eq!(x1.add(&x123).unwrap().parity(), Parity::Odd);
        let one = GrassmannConst::one(k, czero());
        assert_eq!(one.add(&x1).unwrap().parity(), Parity::Mixed);
        assert_eq!(GrassmannConst::zero(k, czero()).parity(), Parity::Even);
    }

    #[test]
    fn body_soul_split() {
        let k = 4;
        let three = GrassmannConst::complex(k, c(3.0, 0.0));
        let x12 = xi(k, 1).mul(&xi(k, 2)).unwrap();
        let a = three.add(&x12).unwrap();
        let (body, soul) = a.body_soul();
        assert!((body - c(3.0, 0.0)).norm() < TOL);
        assert!(soul.approx_eq(&x12, TOL));

        let (body, soul) = xi(k, 1).body_soul();
        assert!(body.norm() < TOL);
        assert!(soul.approx_eq(&xi(k, 1), TOL));

        let z = GrassmannConst::zero(k, czero());
        let (body, soul) = z.body_soul();
        assert!(body.norm() < TOL && soul.is_zero(TOL));
    }

    #[test]
    fn invert_matches_component_formula() {
        // C = C0 + th+ C1 + th- C2 + th+ th- C3 with C1 = xi1, C2 = xi2 odd:
        // C^-1 = 1/C0 - th+ C1/C0^2 - th- C2/C0^2
        //        - th+ th- (2 C1 C2 / C0^3 + C3 / C0^2)
        let k = 4;
        let c0 = c(2.0, 0.5);
        let c3 = c(0.75, -0.25);
        let tp = GrassmannConst::generator(k, czero(), Generator::ThetaPlus).unwrap();
        let tm = GrassmannConst::generator(k, czero(), Generator::ThetaMinus).unwrap();
        let x1 = xi(k, 1);
        let x2 = xi(k, 2);
        let a = GrassmannConst::complex(k, c0)
            .add(&tp.mul(&x1).unwrap())
            .unwrap()
            .add(&tm.mul(&x2).unwrap())
            .unwrap()
            .add(&tp.mul(&tm).unwrap().scale(c3))
            .unwrap();
        let inv = a.invert().unwrap();

        let one = GrassmannConst::one(k, czero());
        assert!(a.mul(&inv).unwrap().approx_eq(&one, 1e-12));
        assert!(inv.mul(&a).unwrap().approx_eq(&one, 1e-12));

        let expected = GrassmannConst::complex(k, 1.0 / c0)
            .add(&tp.mul(&x1).unwrap().scale(-1.0 / (c0 * c0)))
            .unwrap()
            .add(&tm.mul(&x2).unwrap().scale(-1.0 / (c0 * c0)))
            .unwrap()
            .add(
                &tp.mul(&tm)
                    .unwrap()
                    .mul(&x1.mul(&x2).unwrap())
                    .unwrap()
                    .scale(-2.0 / (c0 * c0 * c0)),
            )
            .unwrap()
            .add(&tp.mul(&tm).unwrap().scale(-c3 / (c0 * c0)))
            .unwrap();
        assert!(inv.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn invert_scalar_and_bodiless() {
        let k = 4;
        let two = GrassmannConst::complex(k, c(2.0, 0.0));
        let half = two.invert().unwrap();
        assert!((half.body() - c(0.5, 0.0)).norm() < TOL);

        let x12 = xi(k, 1).mul(&xi(k, 2)).unwrap();
        assert!(matches!(
            x12.invert(),
            Err(GrassmannError::BodilessNotInvertible)
        ));
    }

    #[test]
    fn exp_matches_component_formula() {
        // exp(u + th+ g + th- d + th+ th- v) = e^u (1 + th+ g + th- d
        //                                           + th+ th- (v - g d))
        let k = 4;
        let u = c(0.3, -0.2);
        let v = c(1.1, 0.4);
        let tp = GrassmannConst::generator(k, czero(), Generator::ThetaPlus).unwrap();
        let tm = GrassmannConst::generator(k, czero(), Generator::ThetaMinus).unwrap();
        let g = xi(k, 1);
        let d = xi(k, 2);
        let a = GrassmannConst::complex(k, u)
            .add(&tp.mul(&g).unwrap())
            .unwrap()
            .add(&tm.mul(&d).unwrap())
            .unwrap()
            .add(&tp.mul(&tm).unwrap().scale(v))
            .unwrap();
        let ea = a.exp().unwrap();

        let gd = g.mul(&d).unwrap();
        let inner = GrassmannConst::one(k, czero())
            .add(&tp.mul(&g).unwrap())
            .unwrap()
            .add(&tm.mul(&d).unwrap())
            .unwrap()
            .add(&tp.mul(&tm).unwrap().scale(v))
            .unwrap()
            .sub(&tp.mul(&tm).unwrap().mul(&gd).unwrap())
            .unwrap();
        let expected = inner.scale(u.exp());
        assert!(ea.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn exp_trivial_cases() {
        let k = 4;
        let one = GrassmannConst::one(k, czero());
        assert!(GrassmannConst::zero(k, czero()).exp().unwrap().approx_eq(&one, TOL));

        let x12 = xi(k, 1).mul(&xi(k, 2)).unwrap();
        let expected = one.add(&x12).unwrap();
        assert!(x12.exp().unwrap().approx_eq(&expected, TOL));

        assert!(matches!(xi(k, 1).exp(), Err(GrassmannError::OddExponent)));
    }

    #[test]
    fn derive_basics() {
        let k = 4;
        let tp = GrassmannConst::generator(k, czero(), Generator::ThetaPlus).unwrap();
        let tm = GrassmannConst::generator(k, czero(), Generator::ThetaMinus).unwrap();
        let one = GrassmannConst::one(k, czero());
        assert!(tp
            .derive(Generator::ThetaPlus)
            .unwrap()
            .approx_eq(&one, TOL));

        // derive(th+ th-, th+) = th-, and with th- gives -th+
        let tptm = tp.mul(&tm).unwrap();
        assert!(tptm
            .derive(Generator::ThetaPlus)
            .unwrap()
            .approx_eq(&tm, TOL));
        assert!(tptm
            .derive(Generator::ThetaMinus)
            .unwrap()
            .approx_eq(&tp.neg(), TOL));

        assert!(xi(k, 1).derive(Generator::ThetaPlus).unwrap().is_zero(TOL));

        // second derivative vanishes
        let d2 = tptm
            .derive(Generator::ThetaPlus)
            .unwrap()
            .derive(Generator::ThetaPlus)
            .unwrap();
        assert!(d2.is_zero(TOL));
    }

    #[test]
    fn display_format() {
        let k = 4;
        let e = xi(k, 1)
            .mul(&xi(k, 3))
            .unwrap()
            .mul(
                &GrassmannConst::generator(k, czero(), Generator::ThetaPlus).unwrap(),
            )
            .unwrap()
            .scale(c(2.0, 0.0));
        assert_eq!(format!("{}", e), "2.000000 * xi1^xi3^th+");
    }

    // -------- randomized algebraic laws --------

    fn arb_element(k: usize, max_terms: usize) -> impl Strategy<Value = GrassmannConst> {
        let slots = k + 2;
        prop::collection::vec(
            (0u32..(1 << slots), -1.0f64..1.0, -1.0f64..1.0),
            1..=max_terms,
        )
        .prop_map(move |terms| {
            let mut e = GrassmannConst::zero(k, Complex64::new(0.0, 0.0));
            for (m, re, im) in terms {
                e.add_term(m, Complex64::new(re, im));
            }
            e.prune();
            e
        })
    }

    fn arb_homogeneous(k: usize, odd: bool) -> impl Strategy<Value = GrassmannConst> {
        arb_element(k, 6).prop_map(move |e| {
            let mut out = GrassmannConst::zero(e.k(), czero());
            for (m, c) in e.terms() {
                if (m.count_ones() % 2 == 1) == odd {
                    out.add_term(m, *c);
                }
            }
            out
        })
    }

    proptest! {
        #[test]
        fn prop_graded_commutativity(
            a in arb_homogeneous(6, false),
            b in arb_homogeneous(6, false),
            ao in arb_homogeneous(6, true),
            bo in arb_homogeneous(6, true),
        ) {
            // even-even and even-odd commute, odd-odd anticommutes
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            prop_assert!(ab.approx_eq(&ba, TOL));

            let aob = a.mul(&bo).unwrap();
            let boa = bo.mul(&a).unwrap();
            prop_assert!(aob.approx_eq(&boa, TOL));

            let oo = ao.mul(&bo).unwrap();
            let oo2 = bo.mul(&ao).unwrap();
            prop_assert!(oo.approx_eq(&oo2.neg(), TOL));
        }

        #[test]
        fn prop_associativity_distributivity(
            a in arb_element(6, 5),
            b in arb_element(6, 5),
            d in arb_element(6, 5),
        ) {
            let left = a.mul(&b).unwrap().mul(&d).unwrap();
            let right = a.mul(&b.mul(&d).unwrap()).unwrap();
            let scale = left.max_abs().max(right.max_abs()).max(1.0);
            prop_assert!(left.approx_eq(&right, TOL * scale));

            let dist_l = a.mul(&b.add(&d).unwrap()).unwrap();
            let dist_r = a.mul(&b).unwrap().add(&a.mul(&d).unwrap()).unwrap();
            let scale = dist_l.max_abs().max(dist_r.max_abs()).max(1.0);
            prop_assert!(dist_l.approx_eq(&dist_r, TOL * scale));
        }

        #[test]
        fn prop_body_multiplicative(a in arb_element(6, 5), b in arb_element(6, 5)) {
            let ab = a.mul(&b).unwrap();
            prop_assert!((ab.body() - a.body() * b.body()).norm() < TOL
                * (1.0 + a.max_abs() * b.max_abs()));
        }

        #[test]
        fn prop_invert_two_sided(a in arb_element(6, 5)) {
            let shifted = a.add(&GrassmannConst::complex(6, c(2.0, 0.3))).unwrap();
            let inv = shifted.invert().unwrap();
            let one = GrassmannConst::one(6, czero());
            let scale = shifted.max_abs().max(1.0);
            prop_assert!(shifted.mul(&inv).unwrap().approx_eq(&one, 1e-10 * scale));
            prop_assert!(inv.mul(&shifted).unwrap().approx_eq(&one, 1e-10 * scale));
        }

        #[test]
        fn prop_exp_adds_for_even(a in arb_homogeneous(6, false), b in arb_homogeneous(6, false)) {
            // all even elements commute, so exp(a+b) = exp(a) exp(b)
            let lhs = a.add(&b).unwrap().exp().unwrap();
            let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
            let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
            prop_assert!(lhs.approx_eq(&rhs, 1e-10 * scale));
        }

        #[test]
        fn prop_exp_inverse_pair(a in arb_homogeneous(6, false)) {
            let ea = a.exp().unwrap();
            let ena = a.neg().exp().unwrap();
            let one = GrassmannConst::one(6, czero());
            let scale = ea.max_abs().max(1.0);
            prop_assert!(ea.mul(&ena).unwrap().approx_eq(&one, 1e-10 * scale));
        }

        #[test]
        fn prop_derive_leibniz(
            h_even in arb_homogeneous(6, false),
            h_odd in arb_homogeneous(6, true),
            g in arb_element(6, 5),
        ) {
            // derive(h g) = derive(h) g + (-1)^{deg h} h derive(g)
            for (h, sign) in [(&h_even, 1.0), (&h_odd, -1.0)] {
                for gen in [Generator::Xi(1), Generator::ThetaPlus, Generator::ThetaMinus] {
                    let lhs = h.mul(&g).unwrap().derive(gen).unwrap();
                    let rhs = h
                        .derive(gen)
                        .unwrap()
                        .mul(&g)
                        .unwrap()
                        .add(&h.mul(&g.derive(gen).unwrap()).unwrap().scale(c(sign, 0.0)))
                        .unwrap();
                    let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
                    prop_assert!(lhs.approx_eq(&rhs, TOL * scale));
                }
            }
        }

        #[test]
        fn prop_derive_squares_to_zero(a in arb_element(6, 6)) {
            for gen in [Generator::Xi(2), Generator::ThetaMinus] {
                let dd = a.derive(gen).unwrap().derive(gen).unwrap();
                prop_assert!(dd.is_zero(TOL));
            }
        }

        #[test]
        fn prop_soul_nilpotent(a in arb_element(4, 6)) {
            // soul^(K+3) = 0 with K = 4
            let soul = a.soul();
            let mut p = GrassmannConst::one(4, czero());
            for _ in 0..7 {
                p = p.mul(&soul).unwrap();
            }
            prop_assert!(p.is_zero(1e-6 * a.max_abs().powi(7).max(1.0)));
        }
    }
}
