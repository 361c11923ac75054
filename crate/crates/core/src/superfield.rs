//! Superfields on `R^(1,1|2)`: Grassmann elements with jet coefficients
//! where `th+`, `th-` are the two distinguished odd generators.
//!
//! The covariant superspace derivatives and SUSY generators act termwise,
//!
//! ```text
//! D± A = ∂θ± A - i θ± ∂± A,      J± A = ∂θ± A + i θ± ∂± A,
//! ```
//!
//! and satisfy `{D+,D-} = 0`, `D±² = -i ∂±`, `J±² = +i ∂±`, `{J,D} = 0`.
//! Because the x-derivative loses one jet order, `D±` and `J±` return a
//! superfield of order `d - 1`; binary operations harmonize orders by
//! truncation. Superfields are evaluated at a base point rather than stored
//! as global symbolic functions; scenario-level checks sample many points.

use num_complex::Complex64;
use thiserror::Error;

use crate::grassmann::{Generator, GrassmannElement, GrassmannError, Parity};
use crate::jet::{BasePoint, Jet, JetError};
use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuperfieldError {
    #[error("declared parity {declared:?} does not match actual parity {actual:?}")]
    ParityMismatch { declared: Parity, actual: Parity },
    #[error("superfields live at different base points")]
    BaseMismatch,
    #[error("jet order exhausted")]
    OrderExhausted,
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A Grassmann element over jets together with its evaluation context and a
/// declared parity. The zero superfield is valid for either parity.
#[derive(Debug, Clone)]
pub struct Superfield {
    value: GrassmannElement<Jet>,
    base: BasePoint,
    order: usize,
    parity: Parity,
}

impl Superfield {
    pub fn new(value: GrassmannElement<Jet>, parity: Parity) -> Result<Self, SuperfieldError> {
        let ctx = value.context_zero();
        let base = ctx.base();
        let order = ctx.order();
        let actual = value.parity();
        let ok = if value.num_terms() == 0 {
            true
        } else {
            parity == actual
        };
        if !ok {
            return Err(SuperfieldError::ParityMismatch {
                declared: parity,
                actual,
            });
        }
        Ok(Superfield {
            value,
            base,
            order,
            parity,
        })
    }

    pub fn zero(k: usize, base: BasePoint, order: usize, parity: Parity) -> Self {
        Superfield {
            value: GrassmannElement::zero(k, Jet::zero(base, order)),
            base,
            order,
            parity,
        }
    }

    /// Constant complex scalar as an even superfield.
    pub fn constant(k: usize, base: BasePoint, order: usize, c: Complex64) -> Self {
        let jet = Jet::constant(base, order, c);
        Superfield {
            value: GrassmannElement::scalar(k, Jet::zero(base, order), jet),
            base,
            order,
            parity: Parity::Even,
        }
    }

    /// Coordinate superfield `x+` or `x-`.
    pub fn coordinate(k: usize, base: BasePoint, order: usize, plus: bool) -> Self {
        let jet = if plus {
            Jet::coord_plus(base, order)
        } else {
            Jet::coord_minus(base, order)
        };
        Superfield {
            value: GrassmannElement::scalar(k, Jet::zero(base, order), jet),
            base,
            order,
            parity: Parity::Even,
        }
    }

    /// Odd coordinate `th+` or `th-`.
    pub fn theta(k: usize, base: BasePoint, order: usize, plus: bool) -> Self {
        let g = if plus {
            Generator::ThetaPlus
        } else {
            Generator::ThetaMinus
        };
        Superfield {
            value: GrassmannElement::generator(k, Jet::zero(base, order), g)
                .expect("theta always in range"),
            base,
            order,
            parity: Parity::Odd,
        }
    }

    /// Odd constant generator `xi<n>` as a superfield.
    pub fn xi(k: usize, base: BasePoint, order: usize, n: u8) -> Result<Self, SuperfieldError> {
        let value = GrassmannElement::generator(k, Jet::zero(base, order), Generator::Xi(n))?;
        Ok(Superfield {
            value,
            base,
            order,
            parity: Parity::Odd,
        })
    }

    /// Even superfield from a plain jet.
    pub fn from_jet(k: usize, jet: Jet) -> Self {
        let base = jet.base();
        let order = jet.order();
        Superfield {
            value: GrassmannElement::scalar(k, Jet::zero(base, order), jet),
            base,
            order,
            parity: Parity::Even,
        }
    }

    /// Wrap a Grassmann-over-jet value, inferring parity (mixed allowed for
    /// intermediate residual arithmetic).
    pub fn wrap(value: GrassmannElement<Jet>) -> Self {
        let ctx = value.context_zero();
        let base = ctx.base();
        let order = ctx.order();
        let parity = value.parity();
        Superfield {
            value,
            base,
            order,
            parity,
        }
    }

    pub fn value(&self) -> &GrassmannElement<Jet> {
        &self.value
    }

    pub fn k(&self) -> usize {
        self.value.k()
    }

    pub fn base(&self) -> BasePoint {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn max_abs(&self) -> f64 {
        self.value.max_abs()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.value.is_zero(tol)
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        match self.sub(rhs) {
            Ok(d) => d.is_zero(tol),
            Err(_) => false,
        }
    }

    /// Truncate every coefficient jet to `order`.
    pub fn truncated(&self, order: usize) -> Self {
        if order == self.order {
            return self.clone();
        }
        let value = self
            .value
            .map_coeffs::<_, Jet, std::convert::Infallible>(Jet::zero(self.base, order), |j| {
                Ok(j.truncated(order))
            })
            .unwrap();
        Superfield {
            value,
            base: self.base,
            order,
            parity: self.parity,
        }
    }

    fn harmonized(&self, rhs: &Self) -> Result<(Self, Self), SuperfieldError> {
        if self.base != rhs.base {
            return Err(SuperfieldError::BaseMismatch);
        }
        let d = self.order.min(rhs.order);
        Ok((self.truncated(d), rhs.truncated(d)))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SuperfieldError> {
        let (a, b) = self.harmonized(rhs)?;
        let value = a.value.add(&b.value)?;
        Ok(Superfield::wrap(value))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SuperfieldError> {
        let (a, b) = self.harmonized(rhs)?;
        let value = a.value.sub(&b.value)?;
        Ok(Superfield::wrap(value))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, SuperfieldError> {
        let (a, b) = self.harmonized(rhs)?;
        let value = a.value.mul(&b.value)?;
        Ok(Superfield::wrap(value))
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.value = out.value.neg();
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.value = out.value.scale(s);
        out
    }

    pub fn exp(&self) -> Result<Self, SuperfieldError> {
        Ok(Superfield::wrap(self.value.exp()?))
    }

    pub fn invert(&self) -> Result<Self, SuperfieldError> {
        Ok(Superfield::wrap(self.value.invert()?))
    }

    pub fn powf(&self, r: f64) -> Result<Self, SuperfieldError> {
        Ok(Superfield::wrap(self.value.powf(r)?))
    }

    /// Jet-level partial derivative applied to every coefficient; drops one
    /// jet order.
    pub fn partial(&self, plus: bool) -> Result<Self, SuperfieldError> {
        if self.order == 0 {
            return Err(SuperfieldError::OrderExhausted);
        }
        let order = self.order - 1;
        let value = self
            .value
            .map_coeffs::<_, Jet, JetError>(Jet::zero(self.base, order), |j| j.partial(plus))?;
        Ok(Superfield {
            value,
            base: self.base,
            order,
            parity: self.parity,
        })
    }

    /// Interior derivative with respect to `th+` or `th-` (jet order kept).
    pub fn theta_derive(&self, plus: bool) -> Result<Self, SuperfieldError> {
        let g = if plus {
            Generator::ThetaPlus
        } else {
            Generator::ThetaMinus
        };
        let value = self.value.derive(g)?;
        Ok(Superfield::wrap(value))
    }

    fn covariant(&self, plus: bool, sign: f64) -> Result<Self, SuperfieldError> {
        if self.order == 0 {
            return Err(SuperfieldError::OrderExhausted);
        }
        let dtheta = self.theta_derive(plus)?.truncated(self.order - 1);
        let dx = self.partial(plus)?;
        let theta = Superfield::theta(self.k(), self.base, self.order - 1, plus);
        let second = theta.mul(&dx)?.scale(Complex64::new(0.0, sign));
        dtheta.add(&second)
    }

    /// Covariant superspace derivative `D+ = ∂θ+ - i θ+ ∂+`.
    pub fn d_plus(&self) -> Result<Self, SuperfieldError> {
        self.covariant(true, -1.0)
    }

    pub fn d_minus(&self) -> Result<Self, SuperfieldError> {
        self.covariant(false, -1.0)
    }

    /// SUSY generator `J+ = ∂θ+ + i θ+ ∂+`.
    pub fn j_plus(&self) -> Result<Self, SuperfieldError> {
        self.covariant(true, 1.0)
    }

    pub fn j_minus(&self) -> Result<Self, SuperfieldError> {
        self.covariant(false, 1.0)
    }

    /// Unique theta expansion `A = a0 + θ+ a1 + θ- a2 + θ+θ- a3` with the
    /// theta-free components written to the right of the theta monomials.
    pub fn components(&self) -> [Superfield; 4] {
        let k = self.k();
        let tp_bit = 1u32 << k;
        let tm_bit = 1u32 << (k + 1);
        let zero_jet = Jet::zero(self.base, self.order);
        let mut comps = [
            GrassmannElement::zero(k, zero_jet.clone()),
            GrassmannElement::zero(k, zero_jet.clone()),
            GrassmannElement::zero(k, zero_jet.clone()),
            GrassmannElement::zero(k, zero_jet),
        ];
        for (m, c) in self.value.terms() {
            let xi_part = m & !(tp_bit | tm_bit);
            let xi_len = xi_part.count_ones();
            // canonical storage puts thetas last: m_xi θ's; pulling a single
            // theta to the front costs (-1)^{|xi|}, the θ+θ- pair is free
            let (slot, sign) = match (m & tp_bit != 0, m & tm_bit != 0) {
                (false, false) => (0usize, 1.0),
                (true, false) => (1, if xi_len % 2 == 0 { 1.0 } else { -1.0 }),
                (false, true) => (2, if xi_len % 2 == 0 { 1.0 } else { -1.0 }),
                (true, true) => (3, 1.0),
            };
            let coeff = GrassmannElement::scalar(k, comps[slot].context_zero().clone(), c.clone())
                .scale(Complex64::new(sign, 0.0));
            let mono = mask_element(k, xi_part, comps[slot].context_zero().clone());
            comps[slot] = comps[slot].add(&mono.mul(&coeff).unwrap()).unwrap();
        }
        comps.map(Superfield::wrap)
    }

    /// Inverse of [`Superfield::components`]: assemble
    /// `a0 + θ+ a1 + θ- a2 + θ+θ- a3` from theta-free parts. The
    /// opposite-parity pattern of the middle slots is enforced against
    /// `parity`.
    pub fn from_components(
        parity: Parity,
        a0: &Superfield,
        a1: &Superfield,
        a2: &Superfield,
        a3: &Superfield,
    ) -> Result<Self, SuperfieldError> {
        let k = a0.k();
        let base = a0.base;
        let order = a0.order;
        let flip = |p: Parity| match p {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        };
        for (part, want) in [
            (a0, parity),
            (a1, flip(parity)),
            (a2, flip(parity)),
            (a3, parity),
        ] {
            let actual = part.value.parity();
            if part.value.num_terms() != 0 && actual != want {
                return Err(SuperfieldError::ParityMismatch {
                    declared: want,
                    actual,
                });
            }
        }
        let tplus = Superfield::theta(k, base, order, true);
        let tminus = Superfield::theta(k, base, order, false);
        let mut out = a0.clone();
        out = out.add(&tplus.mul(a1)?)?;
        out = out.add(&tminus.mul(a2)?)?;
        out = out.add(&tplus.mul(&tminus)?.mul(a3)?)?;
        out.parity = parity;
        let actual = out.value.parity();
        if out.value.num_terms() != 0 && actual != parity {
            return Err(SuperfieldError::ParityMismatch {
                declared: parity,
                actual,
            });
        }
        Ok(out)
    }

    /// Left-multiply by `th+` or `th-`.
    pub fn mul_theta_left(&self, plus: bool) -> Result<Self, SuperfieldError> {
        let theta = Superfield::theta(self.k(), self.base, self.order, plus);
        theta.mul(self)
    }

    /// Largest-magnitude residual entry: monomial name, magnitude and the
    /// jet index `(m, n)` carrying it.
    pub fn worst_entry(&self) -> (String, f64, [usize; 2]) {
        match self.value.worst_term() {
            Some((m, c)) => {
                let (jm, jn) = c.worst_index();
                (self.value.monomial_name(m), c.max_abs(), [jm, jn])
            }
            None => ("0".to_string(), 0.0, [0, 0]),
        }
    }
}

fn mask_element(k: usize, mask: u32, zero: Jet) -> GrassmannElement<Jet> {
    let mut gens = Vec::new();
    for slot in 0..(k as u32) {
        if mask & (1 << slot) != 0 {
            gens.push(Generator::Xi(slot as u8 + 1));
        }
    }
    let one = zero.one_like();
    GrassmannElement::from_raw_terms(k, zero, vec![(gens, one)]).expect("mask in range")
}

/// Three-component bosonic or fermionic supervector.
#[derive(Debug, Clone)]
pub struct SuperVector3(pub [Superfield; 3]);

impl SuperVector3 {
    pub fn new(a: Superfield, b: Superfield, c: Superfield) -> Self {
        SuperVector3([a, b, c])
    }

    pub fn base(&self) -> BasePoint {
        self.0[0].base()
    }

    pub fn map(
        &self,
        f: impl Fn(&Superfield) -> Result<Superfield, SuperfieldError>,
    ) -> Result<Self, SuperfieldError> {
        Ok(SuperVector3([
            f(&self.0[0])?,
            f(&self.0[1])?,
            f(&self.0[2])?,
        ]))
    }

    /// Euclidean super scalar product `Σ u_m v_m` with Grassmann product
    /// order preserved (u factors left).
    pub fn dot(&self, rhs: &SuperVector3) -> Result<Superfield, SuperfieldError> {
        if self.base() != rhs.base() {
            return Err(SuperfieldError::BaseMismatch);
        }
        let mut acc = self.0[0].mul(&rhs.0[0])?;
        acc = acc.add(&self.0[1].mul(&rhs.0[1])?)?;
        acc.add(&self.0[2].mul(&rhs.0[2])?)
    }

    /// Scale by `<N,N>^(-1/2)`; the scalar square must have invertible body.
    pub fn normalized(&self) -> Result<SuperVector3, SuperfieldError> {
        let s = self.dot(self)?;
        let scale = s.powf(-0.5)?;
        self.map(|c| c.mul(&scale))
    }
}
