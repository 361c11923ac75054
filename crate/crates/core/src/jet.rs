//! Truncated bivariate Taylor jets in the even coordinates `x+`, `x-` at a
//! base point, over complex scalars.
//!
//! A jet of order `d` stores the triangle `c[m][n]`, `m + n <= d`, where
//! `c[m][n]` approximates `∂+^m ∂-^n f / (m! n!)` at the base point.
//! Arithmetic is closed at fixed order (higher terms truncated); two jets
//! combine only at equal order and base point. Elementary functions are
//! applied by composing the outer function's Taylor series around the body
//! with the nilpotent remainder.
//!
//! The classical-surface module reuses the same type with the two slots read
//! as the independent complex coordinates `z`, `zbar`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{scalar_powf, Ring, RingError, REAL_AXIS_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jets have different orders: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("jets are based at different points")]
    BasePointMismatch,
    #[error("derivative of an order-0 jet")]
    OrderExhausted,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Evaluation point in the two even coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub xp: Complex64,
    pub xm: Complex64,
}

impl BasePoint {
    pub fn new(xp: Complex64, xm: Complex64) -> Self {
        BasePoint { xp, xm }
    }

    pub fn real(xp: f64, xm: f64) -> Self {
        Self::new(Complex64::new(xp, 0.0), Complex64::new(xm, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    base: BasePoint,
    /// Triangular layout: row `s = m + n` starts at `s (s + 1) / 2`,
    /// entry `n` within the row holds `c[s - n][n]`.
    c: Vec<Complex64>,
}

#[inline]
fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
fn tri_idx(m: usize, n: usize) -> usize {
    let s = m + n;
    s * (s + 1) / 2 + n
}

impl Jet {
    pub fn zero(base: BasePoint, order: usize) -> Self {
        Jet {
            order,
            base,
            c: vec![Complex64::new(0.0, 0.0); tri_len(order)],
        }
    }

    pub fn constant(base: BasePoint, order: usize, v: Complex64) -> Self {
        let mut j = Self::zero(base, order);
        j.c[0] = v;
        j
    }

    /// Jet of the coordinate function `x+`.
    pub fn coord_plus(base: BasePoint, order: usize) -> Self {
        let mut j = Self::zero(base, order);
        j.c[0] = base.xp;
        if order >= 1 {
            j.c[tri_idx(1, 0)] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Jet of the coordinate function `x-`.
    pub fn coord_minus(base: BasePoint, order: usize) -> Self {
        let mut j = Self::zero(base, order);
        j.c[0] = base.xm;
        if order >= 1 {
            j.c[tri_idx(0, 1)] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> BasePoint {
        self.base
    }

    /// Scaled derivative coefficient `∂+^m ∂-^n f / (m! n!)`.
    pub fn coeff(&self, m: usize, n: usize) -> Complex64 {
        if m + n > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[tri_idx(m, n)]
        }
    }

    pub fn set_coeff(&mut self, m: usize, n: usize, v: Complex64) {
        assert!(m + n <= self.order);
        self.c[tri_idx(m, n)] = v;
    }

    /// Value at the base point.
    pub fn body(&self) -> Complex64 {
        self.c[0]
    }

    fn check(&self, rhs: &Self) -> Result<(), JetError> {
        if self.order != rhs.order {
            return Err(JetError::OrderMismatch(self.order, rhs.order));
        }
        if self.base != rhs.base {
            return Err(JetError::BasePointMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check(rhs)?;
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check(rhs)?;
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    /// Cauchy product truncated at the common order.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check(rhs)?;
        let d = self.order;
        let mut out = Self::zero(self.base, d);
        for ma in 0..=d {
            for na in 0..=(d - ma) {
                let ca = self.c[tri_idx(ma, na)];
                if ca.norm() == 0.0 {
                    continue;
                }
                for mb in 0..=(d - ma - na) {
                    for nb in 0..=(d - ma - na - mb) {
                        let cb = rhs.c[tri_idx(mb, nb)];
                        if cb.norm() == 0.0 {
                            continue;
                        }
                        out.c[tri_idx(ma + mb, na + nb)] += ca * cb;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.c.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Derivative jet of order `d - 1`: `c'[m][n] = (m+1) c[m+1][n]` for the
    /// plus direction, symmetrically for minus.
    pub fn partial(&self, plus: bool) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        let d = self.order - 1;
        let mut out = Self::zero(self.base, d);
        for m in 0..=d {
            for n in 0..=(d - m) {
                out.c[tri_idx(m, n)] = if plus {
                    Complex64::new((m + 1) as f64, 0.0) * self.c[tri_idx(m + 1, n)]
                } else {
                    Complex64::new((n + 1) as f64, 0.0) * self.c[tri_idx(m, n + 1)]
                };
            }
        }
        Ok(out)
    }

    pub fn partial_plus(&self) -> Result<Self, JetError> {
        self.partial(true)
    }

    pub fn partial_minus(&self) -> Result<Self, JetError> {
        self.partial(false)
    }

    /// Restriction to a lower (or equal) order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order, "truncation cannot raise the order");
        let mut out = Self::zero(self.base, order);
        for m in 0..=order {
            for n in 0..=(order - m) {
                out.c[tri_idx(m, n)] = self.c[tri_idx(m, n)];
            }
        }
        out
    }

    /// Compose the Taylor coefficients `outer[k] ~ f^(k)(body)/k!` with the
    /// nilpotent remainder of `self` by Horner evaluation.
    pub fn compose(&self, outer: &[Complex64]) -> Self {
        let d = self.order;
        let mut soul = self.clone();
        soul.c[0] = Complex64::new(0.0, 0.0);
        let mut acc = Self::constant(self.base, d, outer[d]);
        for k in (0..d).rev() {
            acc = acc.try_mul(&soul).expect("same context");
            acc.c[0] += outer[k];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let eb = self.body().exp();
        let mut outer = vec![Complex64::new(0.0, 0.0); self.order + 1];
        let mut fact = 1.0;
        for (k, o) in outer.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *o = eb / fact;
        }
        self.compose(&outer)
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let b = self.body();
        if b.norm() == 0.0 {
            return Err(JetError::Ring(RingError::SingularBody));
        }
        let binv = Complex64::new(1.0, 0.0) / b;
        let mut outer = vec![Complex64::new(0.0, 0.0); self.order + 1];
        let mut p = binv;
        for (k, o) in outer.iter_mut().enumerate() {
            *o = if k % 2 == 0 { p } else { -p };
            p *= binv;
        }
        Ok(self.compose(&outer))
    }

    /// Principal-branch real power. Non-integer exponents require a body off
    /// the closed negative real axis; negative exponents require a nonzero
    /// body.
    pub fn powf(&self, r: f64) -> Result<Self, JetError> {
        let b = self.body();
        let mut outer = vec![Complex64::new(0.0, 0.0); self.order + 1];
        let mut binom = Complex64::new(1.0, 0.0);
        for (k, o) in outer.iter_mut().enumerate() {
            if k > 0 {
                binom *= Complex64::new((r - (k as f64 - 1.0)) / k as f64, 0.0);
            }
            if binom.norm() == 0.0 {
                *o = Complex64::new(0.0, 0.0);
                continue;
            }
            *o = binom * scalar_powf(b, r - k as f64)?;
        }
        Ok(self.compose(&outer))
    }

    /// Principal-branch logarithm; requires a body off the closed negative
    /// real axis.
    pub fn ln(&self) -> Result<Self, JetError> {
        let b = self.body();
        if b.norm() == 0.0 {
            return Err(JetError::Ring(RingError::SingularBody));
        }
        if b.im.abs() <= REAL_AXIS_TOL * b.re.abs().max(1.0) && b.re <= 0.0 {
            return Err(JetError::Ring(RingError::LogBranch));
        }
        let binv = Complex64::new(1.0, 0.0) / b;
        let mut outer = vec![Complex64::new(0.0, 0.0); self.order + 1];
        outer[0] = b.ln();
        let mut p = binv;
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            outer[k] = p * Complex64::new(sign / k as f64, 0.0);
            p *= binv;
        }
        Ok(self.compose(&outer))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Index `(m, n)` of the largest-magnitude coefficient.
    pub fn worst_index(&self) -> (usize, usize) {
        let mut best = (0usize, 0usize);
        let mut mag = -1.0f64;
        for m in 0..=self.order {
            for n in 0..=(self.order - m) {
                let v = self.c[tri_idx(m, n)].norm();
                if v > mag {
                    mag = v;
                    best = (m, n);
                }
            }
        }
        best
    }

    /// Embed a univariate Taylor series `g_k` (scaled by 1/k!) of a function
    /// of `t` where `t = t0 + inner_delta` and `inner_delta` is this jet
    /// minus its body. Used to lift profile and ODE-seeded functions of one
    /// symmetry variable to bivariate jets.
    pub fn compose_univariate(inner: &Jet, series: &[Complex64]) -> Jet {
        let d = inner.order;
        let mut padded = vec![Complex64::new(0.0, 0.0); d + 1];
        for (k, p) in padded.iter_mut().enumerate() {
            if k < series.len() {
                *p = series[k];
            }
        }
        inner.compose(&padded)
    }
}

/// Public checked arithmetic entry point: add, mul or scale two jets.
pub fn jet_arith(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet, JetError> {
    match op {
        JetOp::Add => a.try_add(b),
        JetOp::Mul => a.try_mul(b),
        JetOp::Scale(s) => Ok(a.scale_complex(s)),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum JetOp {
    Add,
    Mul,
    Scale(Complex64),
}

impl Ring for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero(self.base, self.order)
    }
    fn one_like(&self) -> Self {
        Jet::constant(self.base, self.order, Complex64::new(1.0, 0.0))
    }
    fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("jet context mismatch")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("jet context mismatch")
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("jet context mismatch")
    }
    fn neg(&self) -> Self {
        self.scale_complex(Complex64::new(-1.0, 0.0))
    }
    fn scale(&self, s: Complex64) -> Self {
        self.scale_complex(s)
    }
    fn max_abs(&self) -> f64 {
        self.max_abs_coeff()
    }
    fn compatible(&self, rhs: &Self) -> bool {
        self.order == rhs.order && self.base == rhs.base
    }
    fn try_exp(&self) -> Result<Self, RingError> {
        Ok(self.exp())
    }
    fn try_recip(&self) -> Result<Self, RingError> {
        self.recip().map_err(|_| RingError::SingularBody)
    }
    fn try_powf(&self, r: f64) -> Result<Self, RingError> {
        self.powf(r).map_err(|e| match e {
            JetError::Ring(r) => r,
            _ => RingError::SingularBody,
        })
    }
    fn try_ln(&self) -> Result<Self, RingError> {
        self.ln().map_err(|e| match e {
            JetError::Ring(r) => r,
            _ => RingError::SingularBody,
        })
    }
    fn fmt_coeff(&self) -> String {
        self.body().fmt_coeff()
    }
}

/// Evaluate an integer power exactly; helper for tests and profile code.
pub fn jet_powi(a: &Jet, n: u32) -> Jet {
    let mut out = Jet::constant(a.base(), a.order(), Complex64::new(1.0, 0.0));
    for _ in 0..n {
        out = out.try_mul(a).expect("same context");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const TOL: f64 = 1e-12;

    fn assert_jet_close(a: &Jet, b: &Jet, tol: f64) {
        let d = a.try_sub(b).unwrap();
        assert!(
            d.max_abs_coeff() <= tol,
            "jets differ by {}",
            d.max_abs_coeff()
        );
    }

    #[test]
    fn product_of_coordinates() {
        let base = BasePoint::real(0.0, 0.0);
        let xp = Jet::coord_plus(base, 2);
        let xm = Jet::coord_minus(base, 2);
        let p = xp.try_mul(&xm).unwrap();
        assert!((p.coeff(1, 1) - c(1.0, 0.0)).norm() < TOL);
        for (m, n) in [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)] {
            assert!(p.coeff(m, n).norm() < TOL, "({m},{n})");
        }
    }

    #[test]
    fn addition_and_square() {
        let base = BasePoint::real(0.0, 0.0);
        let xp = Jet::coord_plus(base, 2);
        let two_xp = xp.try_add(&xp).unwrap();
        assert!((two_xp.coeff(1, 0) - c(2.0, 0.0)).norm() < TOL);

        // (x+)^2 at base x+ = 1, order 1: value 1, slope 2
        let base1 = BasePoint::real(1.0, 0.0);
        let xp1 = Jet::coord_plus(base1, 1);
        let sq = xp1.try_mul(&xp1).unwrap();
        assert!((sq.coeff(0, 0) - c(1.0, 0.0)).norm() < TOL);
        assert!((sq.coeff(1, 0) - c(2.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn order_mismatch_rejected() {
        let base = BasePoint::real(0.0, 0.0);
        let a = Jet::coord_plus(base, 2);
        let b = Jet::coord_plus(base, 3);
        assert!(matches!(a.try_add(&b), Err(JetError::OrderMismatch(2, 3))));
        let b2 = Jet::coord_plus(BasePoint::real(1.0, 0.0), 2);
        assert!(matches!(
            a.try_add(&b2),
            Err(JetError::BasePointMismatch)
        ));
    }

    #[test]
    fn partial_derivatives() {
        let base = BasePoint::real(0.0, 0.0);
        let xp = Jet::coord_plus(base, 2);
        let d = xp.partial_plus().unwrap();
        assert_eq!(d.order(), 1);
        assert!((d.coeff(0, 0) - c(1.0, 0.0)).norm() < TOL);
        assert!(d.coeff(1, 0).norm() < TOL);

        let dm = xp.partial_minus().unwrap();
        assert!(dm.max_abs_coeff() < TOL);

        // exp'(x+) = exp(x+) at order 2 from an order-3 jet
        let e = Jet::coord_plus(base, 3).exp();
        let de = e.partial_plus().unwrap();
        assert_jet_close(&de, &e.truncated(2), 1e-12);

        let c0 = Jet::constant(base, 0, c(1.0, 0.0));
        assert!(matches!(c0.partial_plus(), Err(JetError::OrderExhausted)));
    }

    #[test]
    fn mixed_partials_commute() {
        let base = BasePoint::real(0.3, -0.2);
        let f = Jet::coord_plus(base, 4)
            .try_mul(&Jet::coord_minus(base, 4))
            .unwrap()
            .exp();
        let ab = f.partial_plus().unwrap().partial_minus().unwrap();
        let ba = f.partial_minus().unwrap().partial_plus().unwrap();
        assert_jet_close(&ab, &ba, 1e-12);
    }

    #[test]
    fn exp_series() {
        let base = BasePoint::real(0.0, 0.0);
        let e = Jet::coord_plus(base, 2).exp();
        assert!((e.coeff(0, 0) - c(1.0, 0.0)).norm() < TOL);
        assert!((e.coeff(1, 0) - c(1.0, 0.0)).norm() < TOL);
        assert!((e.coeff(2, 0) - c(0.5, 0.0)).norm() < TOL);
    }

    #[test]
    fn sqrt_binomial_series() {
        // Oracle: (1+x)^(1/2) = sum_k C(1/2, k) x^k = 1 + x/2 - x^2/8 + ...
        // computed independently term by term.
        let mut oracle = vec![c(1.0, 0.0)];
        let r = 0.5;
        let mut coeff = 1.0;
        for k in 1..=2usize {
            coeff *= (r - (k as f64 - 1.0)) / k as f64;
            oracle.push(c(coeff, 0.0));
        }
        assert!((oracle[1] - c(0.5, 0.0)).norm() < TOL);
        assert!((oracle[2] - c(-0.125, 0.0)).norm() < TOL);

        let base = BasePoint::real(0.0, 0.0);
        let one_plus_x = Jet::coord_plus(base, 2)
            .try_add(&Jet::constant(base, 2, c(1.0, 0.0)))
            .unwrap();
        let s = one_plus_x.powf(0.5).unwrap();
        for (k, o) in oracle.iter().enumerate() {
            assert!((s.coeff(k, 0) - o).norm() < TOL, "k={k}");
        }
    }

    #[test]
    fn recip_and_errors() {
        let base = BasePoint::real(0.0, 0.0);
        let two = Jet::constant(base, 2, c(2.0, 0.0));
        let half = two.recip().unwrap();
        assert!((half.body() - c(0.5, 0.0)).norm() < TOL);

        let zero = Jet::zero(base, 2);
        assert!(zero.recip().is_err());
        assert!(zero.powf(-1.0).is_err());

        let neg = Jet::constant(base, 2, c(-1.0, 0.0));
        assert!(matches!(
            neg.powf(0.5),
            Err(JetError::Ring(RingError::BranchCut))
        ));
        // integer powers of negative bodies are fine
        assert!((neg.powf(3.0).unwrap().body() - c(-1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn pow_times_pow_inverse() {
        let base = BasePoint::real(0.7, 0.1);
        let f = Jet::coord_plus(base, 4)
            .try_add(&Jet::constant(base, 4, c(1.5, 0.0)))
            .unwrap();
        let p = f.powf(0.37).unwrap();
        let q = f.powf(-0.37).unwrap();
        let prod = p.try_mul(&q).unwrap();
        let one = Jet::constant(base, 4, c(1.0, 0.0));
        assert_jet_close(&prod, &one, 1e-12);
    }

    #[test]
    fn exp_derivative_identity() {
        // d/dx+ exp(f) = f' exp(f) to truncation order
        let base = BasePoint::real(0.2, 0.4);
        let f = Jet::coord_plus(base, 4)
            .try_mul(&Jet::coord_minus(base, 4))
            .unwrap();
        let ef = f.exp();
        let lhs = ef.partial_plus().unwrap();
        let rhs = f
            .partial_plus()
            .unwrap()
            .try_mul(&ef.truncated(3))
            .unwrap();
        assert_jet_close(&lhs, &rhs, 1e-12);
    }

    #[test]
    fn ln_inverts_exp() {
        let base = BasePoint::real(0.1, -0.3);
        let f = Jet::coord_plus(base, 4)
            .try_add(&Jet::constant(base, 4, c(0.8, 0.2)))
            .unwrap();
        let back = f.exp().ln().unwrap();
        assert_jet_close(&back, &f, 1e-12);
    }

    #[test]
    fn first_order_matches_central_differences() {
        // Library of closed-form functions evaluated scalar-wise; the jet
        // first-order coefficients must match central finite differences.
        type ScalarFn = fn(Complex64, Complex64) -> Complex64;
        let lib: Vec<(ScalarFn, &str)> = vec![
            (|p, m| (p * m).exp(), "exp(x+ x-)"),
            (|p, m| (p + m * m).exp(), "exp(x+ + x-^2)"),
            (
                |p, m| (Complex64::new(1.0, 0.0) + p * p + m).powf(0.5),
                "sqrt(1 + x+^2 + x-)",
            ),
            (
                |p, m| Complex64::new(1.0, 0.0) / (Complex64::new(2.0, 0.0) + p + m),
                "1/(2 + x+ + x-)",
            ),
        ];
        let h = 1e-5;
        let base = BasePoint::real(0.3, 0.4);
        for (f, name) in lib {
            let xp = Jet::coord_plus(base, 2);
            let xm = Jet::coord_minus(base, 2);
            let jet = match name {
                "exp(x+ x-)" => xp.try_mul(&xm).unwrap().exp(),
                "exp(x+ + x-^2)" => xp
                    .try_add(&xm.try_mul(&xm).unwrap())
                    .unwrap()
                    .exp(),
                "sqrt(1 + x+^2 + x-)" => xp
                    .try_mul(&xp)
                    .unwrap()
                    .try_add(&xm)
                    .unwrap()
                    .try_add(&Jet::constant(base, 2, c(1.0, 0.0)))
                    .unwrap()
                    .powf(0.5)
                    .unwrap(),
                _ => Jet::constant(base, 2, c(2.0, 0.0))
                    .try_add(&xp)
                    .unwrap()
                    .try_add(&xm)
                    .unwrap()
                    .recip()
                    .unwrap(),
            };
            let dp = (f(base.xp + h, base.xm) - f(base.xp - h, base.xm)) / (2.0 * h);
            let dm = (f(base.xp, base.xm + h) - f(base.xp, base.xm - h)) / (2.0 * h);
            let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1e-12);
            assert!(rel(jet.coeff(1, 0), dp) < 1e-6, "{name} d+: {}", rel(jet.coeff(1, 0), dp));
            assert!(rel(jet.coeff(0, 1), dm) < 1e-6, "{name} d-: {}", rel(jet.coeff(0, 1), dm));
        }
    }
}
