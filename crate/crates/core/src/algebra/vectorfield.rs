//! Polynomial vector fields on a set of graded coordinates, with exact
//! coefficient arithmetic at bounded degree.
//!
//! The coefficient ring is a supercommutative polynomial ring: monomials are
//! an exponent vector over the even coordinates and a subset mask over the
//! odd ones. This covers both the classical realization on
//! `(z, zbar, H, Q, Qbar, U)` (all even) and the SUSY realization on
//! `(x+, x-, th+, th-, fields...)` with odd coordinates.
//!
//! The bracket is the graded commutator
//! `[V, W] = V∘W - (-1)^{|V||W|} W∘V`, computed componentwise as
//! `[V,W]^c = V(W^c) - (-1)^{|V||W|} W(V^c)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VectorFieldError {
    #[error("vector fields live on different coordinate systems")]
    CoordinateMismatch,
    #[error("polynomial degree budget ({0}) exceeded")]
    DegreeOverflow(usize),
    #[error("unknown generator name {0}")]
    UnknownName(String),
    #[error("field of mixed parity cannot be bracketed")]
    MixedParity,
    #[error("bracket is not in the span of the given basis (residual {0:.3e})")]
    NotInSpan(f64),
}

/// Coordinate system: names plus parity flags (true = odd).
#[derive(Debug, Clone, PartialEq)]
pub struct CoordSystem {
    pub names: Vec<String>,
    pub odd: Vec<bool>,
}

impl CoordSystem {
    pub fn new(names: &[&str], odd: &[bool]) -> Self {
        assert_eq!(names.len(), odd.len());
        CoordSystem {
            names: names.iter().map(|s| s.to_string()).collect(),
            odd: odd.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub const MAX_POLY_DEGREE: usize = 4;

/// Monomial: exponents over even coordinates (indexed by coordinate slot,
/// zero for odd slots) and a mask of odd coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct PolyMono {
    evens: Vec<u8>,
    odd_mask: u32,
}

impl PolyMono {
    fn degree(&self) -> usize {
        self.evens.iter().map(|e| *e as usize).sum::<usize>()
            + self.odd_mask.count_ones() as usize
    }

    fn parity(&self) -> bool {
        self.odd_mask.count_ones() % 2 == 1
    }
}

fn odd_merge_sign(a: u32, b: u32) -> f64 {
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

/// Supercommutative polynomial over a coordinate system.
#[derive(Debug, Clone)]
pub struct SuperPoly {
    coords: CoordSystem,
    terms: BTreeMap<PolyMono, Complex64>,
}

impl SuperPoly {
    pub fn zero(coords: &CoordSystem) -> Self {
        SuperPoly {
            coords: coords.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(coords: &CoordSystem, v: Complex64) -> Self {
        let mut p = Self::zero(coords);
        if v.norm() > 0.0 {
            p.terms.insert(
                PolyMono {
                    evens: vec![0; coords.dim()],
                    odd_mask: 0,
                },
                v,
            );
        }
        p
    }

    /// The coordinate function itself.
    pub fn var(coords: &CoordSystem, idx: usize) -> Self {
        let mut p = Self::zero(coords);
        let mono = if coords.odd[idx] {
            PolyMono {
                evens: vec![0; coords.dim()],
                odd_mask: 1 << idx,
            }
        } else {
            let mut evens = vec![0; coords.dim()];
            evens[idx] = 1;
            PolyMono {
                evens,
                odd_mask: 0,
            }
        };
        p.terms.insert(mono, Complex64::new(1.0, 0.0));
        p
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn add_term(&mut self, m: PolyMono, c: Complex64) {
        let entry = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        // keep exact zeros out
        let prune: Vec<PolyMono> = self
            .terms
            .iter()
            .filter(|(_, v)| v.norm() == 0.0)
            .map(|(k, _)| k.clone())
            .collect();
        for m in prune {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, VectorFieldError> {
        if self.coords != rhs.coords {
            return Err(VectorFieldError::CoordinateMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, VectorFieldError> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.terms.retain(|_, c| c.norm() > 0.0);
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, VectorFieldError> {
        if self.coords != rhs.coords {
            return Err(VectorFieldError::CoordinateMismatch);
        }
        let mut out = Self::zero(&self.coords);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if ma.odd_mask & mb.odd_mask != 0 {
                    continue;
                }
                let mut evens = ma.evens.clone();
                for (e, eb) in evens.iter_mut().zip(mb.evens.iter()) {
                    *e += eb;
                }
                let mono = PolyMono {
                    evens,
                    odd_mask: ma.odd_mask | mb.odd_mask,
                };
                if mono.degree() > MAX_POLY_DEGREE {
                    return Err(VectorFieldError::DegreeOverflow(MAX_POLY_DEGREE));
                }
                // odd part of a commutes past the even part of b freely;
                // only odd-odd interleaving contributes a sign
                let sign = odd_merge_sign(ma.odd_mask, mb.odd_mask);
                out.add_term(mono, ca * cb * sign);
            }
        }
        Ok(out)
    }

    /// Graded left partial derivative with respect to coordinate `idx`.
    pub fn partial(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.coords);
        if self.coords.odd[idx] {
            let bit = 1u32 << idx;
            let below = bit - 1;
            for (m, c) in &self.terms {
                if m.odd_mask & bit == 0 {
                    continue;
                }
                let preceding = (m.odd_mask & below).count_ones();
                let sign = if preceding % 2 == 0 { 1.0 } else { -1.0 };
                out.add_term(
                    PolyMono {
                        evens: m.evens.clone(),
                        odd_mask: m.odd_mask & !bit,
                    },
                    c * sign,
                );
            }
        } else {
            for (m, c) in &self.terms {
                if m.evens[idx] == 0 {
                    continue;
                }
                let mut evens = m.evens.clone();
                evens[idx] -= 1;
                out.add_term(
                    PolyMono {
                        evens,
                        odd_mask: m.odd_mask,
                    },
                    c * Complex64::new(m.evens[idx] as f64, 0.0),
                );
            }
        }
        out
    }

    /// Parity of a homogeneous polynomial (None if mixed or zero).
    fn parity(&self) -> Option<bool> {
        let mut p = None;
        for m in self.terms.keys() {
            match p {
                None => p = Some(m.parity()),
                Some(q) if q != m.parity() => return None,
                _ => {}
            }
        }
        p
    }
}

/// First-order differential operator `Σ_c V^c ∂_c` with polynomial
/// coefficients and a definite parity.
#[derive(Debug, Clone)]
pub struct PolyVectorField {
    pub coords: CoordSystem,
    pub components: Vec<SuperPoly>,
}

impl PolyVectorField {
    pub fn zero(coords: &CoordSystem) -> Self {
        PolyVectorField {
            coords: coords.clone(),
            components: (0..coords.dim()).map(|_| SuperPoly::zero(coords)).collect(),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.components.iter().all(|c| c.is_zero(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.max_abs())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, VectorFieldError> {
        if self.coords != rhs.coords {
            return Err(VectorFieldError::CoordinateMismatch);
        }
        let mut out = self.clone();
        for (a, b) in out.components.iter_mut().zip(rhs.components.iter()) {
            *a = a.add(b)?;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, VectorFieldError> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.components.iter_mut() {
            *c = c.scale(s);
        }
        out
    }

    /// Apply the field as a derivation to a polynomial.
    pub fn apply(&self, g: &SuperPoly) -> Result<SuperPoly, VectorFieldError> {
        let mut out = SuperPoly::zero(&self.coords);
        for (idx, comp) in self.components.iter().enumerate() {
            if comp.terms.is_empty() {
                continue;
            }
            out = out.add(&comp.mul(&g.partial(idx))?)?;
        }
        Ok(out)
    }

    /// Field parity: parity(component) xor parity(coordinate), which must be
    /// constant across components.
    pub fn parity(&self) -> Result<bool, VectorFieldError> {
        let mut p = None;
        for (idx, comp) in self.components.iter().enumerate() {
            if comp.terms.is_empty() {
                continue;
            }
            let cp = comp.parity().ok_or(VectorFieldError::MixedParity)?;
            let fp = cp ^ self.coords.odd[idx];
            match p {
                None => p = Some(fp),
                Some(q) if q != fp => return Err(VectorFieldError::MixedParity),
                _ => {}
            }
        }
        Ok(p.unwrap_or(false))
    }
}

/// Graded commutator of two vector fields, componentwise
/// `[V,W]^c = V(W^c) - (-1)^{|V||W|} W(V^c)`.
pub fn vf_bracket(
    v: &PolyVectorField,
    w: &PolyVectorField,
) -> Result<PolyVectorField, VectorFieldError> {
    if v.coords != w.coords {
        return Err(VectorFieldError::CoordinateMismatch);
    }
    let pv = v.parity()?;
    let pw = w.parity()?;
    let sign = if pv && pw { 1.0 } else { -1.0 };
    let mut out = PolyVectorField::zero(&v.coords);
    for idx in 0..v.coords.dim() {
        let first = v.apply(&w.components[idx])?;
        let second = w.apply(&v.components[idx])?.scale(Complex64::new(sign, 0.0));
        out.components[idx] = first.add(&second)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Realizations
// ---------------------------------------------------------------------------

/// Coordinates of the classical symmetry algebra realization.
pub fn classical_coords() -> CoordSystem {
    CoordSystem::new(
        &["z", "zbar", "H", "Q", "Qbar", "U"],
        &[false, false, false, false, false, false],
    )
}

/// Conformal-scaling field `X(η) = η ∂z + η'(-2Q ∂Q - U ∂U)` for a
/// polynomial `η(z)` of degree at most 2 (coefficients low to high).
pub fn realize_x_eta(eta: &[Complex64]) -> Result<PolyVectorField, VectorFieldError> {
    if eta.len() > 3 {
        return Err(VectorFieldError::DegreeOverflow(2));
    }
    let coords = classical_coords();
    let z = SuperPoly::var(&coords, 0);
    let q = SuperPoly::var(&coords, 3);
    let u = SuperPoly::var(&coords, 5);
    let mut eta_poly = SuperPoly::zero(&coords);
    let mut zpow = SuperPoly::constant(&coords, Complex64::new(1.0, 0.0));
    for (k, c) in eta.iter().enumerate() {
        if k > 0 {
            zpow = zpow.mul(&z)?;
        }
        eta_poly = eta_poly.add(&zpow.scale(*c))?;
    }
    let eta_prime = eta_poly.partial(0);
    let mut vf = PolyVectorField::zero(&coords);
    vf.components[0] = eta_poly;
    vf.components[3] = eta_prime.mul(&q)?.scale(Complex64::new(-2.0, 0.0));
    vf.components[5] = eta_prime.mul(&u)?.scale(Complex64::new(-1.0, 0.0));
    Ok(vf)
}

/// Mirror field `Y(ζ) = ζ ∂zbar + ζ'(-2 Qbar ∂Qbar - U ∂U)`.
pub fn realize_y_zeta(zeta: &[Complex64]) -> Result<PolyVectorField, VectorFieldError> {
    if zeta.len() > 3 {
        return Err(VectorFieldError::DegreeOverflow(2));
    }
    let coords = classical_coords();
    let zb = SuperPoly::var(&coords, 1);
    let qb = SuperPoly::var(&coords, 4);
    let u = SuperPoly::var(&coords, 5);
    let mut zeta_poly = SuperPoly::zero(&coords);
    let mut zpow = SuperPoly::constant(&coords, Complex64::new(1.0, 0.0));
    for (k, c) in zeta.iter().enumerate() {
        if k > 0 {
            zpow = zpow.mul(&zb)?;
        }
        zeta_poly = zeta_poly.add(&zpow.scale(*c))?;
    }
    let zeta_prime = zeta_poly.partial(1);
    let mut vf = PolyVectorField::zero(&coords);
    vf.components[1] = zeta_poly;
    vf.components[4] = zeta_prime.mul(&qb)?.scale(Complex64::new(-2.0, 0.0));
    vf.components[5] = zeta_prime.mul(&u)?.scale(Complex64::new(-1.0, 0.0));
    Ok(vf)
}

/// The seven classical generators e0..e6 as printed vector fields.
pub fn realize_classical(name: &str) -> Result<PolyVectorField, VectorFieldError> {
    let coords = classical_coords();
    let one = Complex64::new(1.0, 0.0);
    match name {
        "e0" => {
            // -H ∂H + Q ∂Q + Qbar ∂Qbar + 2U ∂U
            let mut vf = PolyVectorField::zero(&coords);
            vf.components[2] = SuperPoly::var(&coords, 2).scale(-one);
            vf.components[3] = SuperPoly::var(&coords, 3);
            vf.components[4] = SuperPoly::var(&coords, 4);
            vf.components[5] = SuperPoly::var(&coords, 5).scale(Complex64::new(2.0, 0.0));
            Ok(vf)
        }
        "e1" => realize_x_eta(&[one]),
        "e3" => realize_x_eta(&[Complex64::new(0.0, 0.0), one]),
        "e5" => realize_x_eta(&[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one]),
        "e2" => realize_y_zeta(&[one]),
        "e4" => realize_y_zeta(&[Complex64::new(0.0, 0.0), one]),
        "e6" => realize_y_zeta(&[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one]),
        other => Err(VectorFieldError::UnknownName(other.to_string())),
    }
}

/// Coordinates of the SUSY symmetry algebra realization: independent
/// variables, odd coordinates, the eleven dependent fields.
pub fn susy_coords() -> CoordSystem {
    CoordSystem::new(
        &[
            "x+", "x-", "th+", "th-", "phi", "H", "Q+", "Q-", "R+", "R-", "S+", "S-", "T+", "T-",
            "f",
        ],
        &[
            false, false, true, true, false, false, false, false, true, true, true, true, true,
            true, false,
        ],
    )
}

/// The eight SUSY symmetry generators as vector fields on the extended
/// coordinate set.
pub fn realize_susy(name: &str) -> Result<PolyVectorField, VectorFieldError> {
    let coords = susy_coords();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let var = |n: &str| -> SuperPoly { SuperPoly::var(&coords, coords.index(n).unwrap()) };
    let idx = |n: &str| coords.index(n).unwrap();
    let mut vf = PolyVectorField::zero(&coords);
    match name {
        "C0" => {
            vf.components[idx("H")] = var("H");
            vf.components[idx("Q+")] = var("Q+");
            vf.components[idx("Q-")] = var("Q-");
            vf.components[idx("f")] = var("f").scale(Complex64::new(-2.0, 0.0));
        }
        "K0" => {
            vf.components[idx("H")] = var("H").scale(-one);
            vf.components[idx("Q+")] = var("Q+");
            vf.components[idx("Q-")] = var("Q-");
            vf.components[idx("phi")] = SuperPoly::constant(&coords, Complex64::new(2.0, 0.0));
        }
        "K1" => {
            vf.components[idx("x+")] = var("x+").scale(Complex64::new(-2.0, 0.0));
            vf.components[idx("th+")] = var("th+").scale(-one);
            vf.components[idx("R+")] = var("R+");
            vf.components[idx("R-")] = var("R-").scale(Complex64::new(2.0, 0.0));
            vf.components[idx("S-")] = var("S-");
            vf.components[idx("T+")] = var("T+").scale(-one);
            vf.components[idx("Q+")] = var("Q+").scale(Complex64::new(2.0, 0.0));
            vf.components[idx("phi")] = SuperPoly::constant(&coords, one);
        }
        "K2" => {
            vf.components[idx("x-")] = var("x-").scale(Complex64::new(-2.0, 0.0));
            vf.components[idx("th-")] = var("th-").scale(-one);
            vf.components[idx("R-")] = var("R-").scale(-one);
            vf.components[idx("S+")] = var("S+");
            vf.components[idx("T+")] = var("T+").scale(Complex64::new(2.0, 0.0));
            vf.components[idx("T-")] = var("T-");
            vf.components[idx("Q-")] = var("Q-").scale(Complex64::new(2.0, 0.0));
            vf.components[idx("phi")] = SuperPoly::constant(&coords, one);
        }
        "P+" => {
            vf.components[idx("x+")] = SuperPoly::constant(&coords, one);
        }
        "P-" => {
            vf.components[idx("x-")] = SuperPoly::constant(&coords, one);
        }
        "J+" => {
            vf.components[idx("th+")] = SuperPoly::constant(&coords, one);
            vf.components[idx("x+")] = var("th+").scale(i);
        }
        "J-" => {
            vf.components[idx("th-")] = SuperPoly::constant(&coords, one);
            vf.components[idx("x-")] = var("th-").scale(i);
        }
        other => return Err(VectorFieldError::UnknownName(other.to_string())),
    }
    Ok(vf)
}

// ---------------------------------------------------------------------------
// Structure matching
// ---------------------------------------------------------------------------

/// Outcome of comparing one bracket pair against a structure-constant table.
#[derive(Debug, Clone)]
pub struct BracketCheck {
    pub left: String,
    pub right: String,
    /// true when the pair is odd-odd, so the bracket is an anticommutator
    pub anti: bool,
    pub residual: f64,
    pub matches: bool,
}

/// Express a vector field in a basis by least-squares over the joint
/// (coordinate, monomial) support, then report the residual.
fn express_in_basis(
    target: &PolyVectorField,
    basis: &[PolyVectorField],
) -> Result<(Vec<Complex64>, f64), VectorFieldError> {
    // gather slots
    let mut slots: Vec<(usize, PolyMono)> = Vec::new();
    let mut push_slots = |vf: &PolyVectorField| {
        for (idx, comp) in vf.components.iter().enumerate() {
            for m in comp.terms.keys() {
                if !slots.iter().any(|(i, mm)| *i == idx && mm == m) {
                    slots.push((idx, m.clone()));
                }
            }
        }
    };
    for b in basis {
        push_slots(b);
    }
    push_slots(target);

    let rows = slots.len();
    let cols = basis.len();
    // normal equations solved by Gaussian elimination (basis is tiny)
    let entry = |vf: &PolyVectorField, slot: &(usize, PolyMono)| -> Complex64 {
        vf.components[slot.0]
            .terms
            .get(&slot.1)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    };
    let mut ata = vec![vec![Complex64::new(0.0, 0.0); cols]; cols];
    let mut atb = vec![Complex64::new(0.0, 0.0); cols];
    for s in &slots {
        for a in 0..cols {
            let ea = entry(&basis[a], s).conj();
            for b in 0..cols {
                ata[a][b] += ea * entry(&basis[b], s);
            }
            atb[a] += ea * entry(target, s);
        }
    }
    // eliminate
    let n = cols;
    let mut aug = ata.clone();
    let mut rhs = atb.clone();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if aug[r][col].norm() > aug[piv][col].norm() {
                piv = r;
            }
        }
        aug.swap(col, piv);
        rhs.swap(col, piv);
        let p = aug[col][col];
        if p.norm() < 1e-14 {
            continue;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = aug[r][col] / p;
            for cc in 0..n {
                let v = aug[col][cc];
                aug[r][cc] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        if aug[col][col].norm() >= 1e-14 {
            coeffs[col] = rhs[col] / aug[col][col];
        }
    }
    // residual
    let mut recon = PolyVectorField::zero(&target.coords);
    for (b, c) in basis.iter().zip(coeffs.iter()) {
        recon = recon.add(&b.scale(*c))?;
    }
    let residual = target.sub(&recon)?.max_abs();
    let _ = rows;
    Ok((coeffs, residual))
}

/// Brute-force all pairwise brackets of a realization, express each in the
/// basis, and compare with a structure-constant table. Diagonal pairs are
/// included; for odd generators they probe the anticommutator entry.
pub fn structure_match(
    names: &[String],
    realization: &[PolyVectorField],
    sc: &crate::algebra::structure::StructureConstants,
    tol: f64,
) -> Result<Vec<BracketCheck>, VectorFieldError> {
    use crate::algebra::structure::GenParity;
    let n = names.len();
    let mut checks = Vec::new();
    for i in 0..n {
        for j in i..n {
            let pi = sc.parity(i) == GenParity::Odd;
            let pj = sc.parity(j) == GenParity::Odd;
            let anti = pi && pj;
            if i == j && !anti {
                // [X, X] = 0 for even X, trivially
                checks.push(BracketCheck {
                    left: names[i].clone(),
                    right: names[j].clone(),
                    anti,
                    residual: 0.0,
                    matches: true,
                });
                continue;
            }
            let br = vf_bracket(&realization[i], &realization[j])?;
            let (coeffs, span_residual) = express_in_basis(&br, realization)?;
            if span_residual > tol {
                return Err(VectorFieldError::NotInSpan(span_residual));
            }
            let mut worst = 0.0f64;
            for (k, c) in coeffs.iter().enumerate() {
                let want = sc.c[i][j][k];
                worst = worst.max((c - want).norm());
            }
            checks.push(BracketCheck {
                left: names[i].clone(),
                right: names[j].clone(),
                anti,
                residual: worst,
                matches: worst <= tol,
            });
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure::{classical_algebra, susy_algebra};

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn realizations_match_printed_forms() {
        // X(η = z) is e3 = z ∂z - 2Q ∂Q - U ∂U
        let e3 = realize_x_eta(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let direct = realize_classical("e3").unwrap();
        assert!(e3.sub(&direct).unwrap().is_zero(TOL));

        // X(η = 1) = ∂z
        let e1 = realize_x_eta(&[c(1.0, 0.0)]).unwrap();
        let coords = classical_coords();
        assert!((e1.components[0]
            .terms
            .values()
            .next()
            .unwrap()
            - c(1.0, 0.0))
        .norm()
            < TOL);
        for idx in 1..coords.dim() {
            assert!(e1.components[idx].is_zero(TOL));
        }

        // e0 has the printed component pattern
        let e0 = realize_classical("e0").unwrap();
        assert!(!e0.components[2].is_zero(TOL));
        assert!(e0.components[0].is_zero(TOL));

        assert!(matches!(
            realize_classical("e9"),
            Err(VectorFieldError::UnknownName(_))
        ));
    }

    #[test]
    fn classical_bracket_relations() {
        let e1 = realize_classical("e1").unwrap();
        let e2 = realize_classical("e2").unwrap();
        let e3 = realize_classical("e3").unwrap();
        let e5 = realize_classical("e5").unwrap();

        // [e1, e3] = e1
        let b = vf_bracket(&e1, &e3).unwrap();
        assert!(b.sub(&e1).unwrap().is_zero(TOL));

        // [e3, e5] = e5
        let b = vf_bracket(&e3, &e5).unwrap();
        assert!(b.sub(&e5).unwrap().is_zero(TOL));

        // [e1, e5] = 2 e3 under this bracket orientation
        let b = vf_bracket(&e1, &e5).unwrap();
        assert!(b.sub(&e3.scale(c(2.0, 0.0))).unwrap().is_zero(TOL));

        // [e1, e2] = 0
        let b = vf_bracket(&e1, &e2).unwrap();
        assert!(b.is_zero(TOL));
    }

    #[test]
    fn classical_structure_match_and_subalgebra_split() {
        let sc = classical_algebra();
        let names = sc.basis.names.clone();
        let fields: Vec<PolyVectorField> = names
            .iter()
            .map(|n| realize_classical(n).unwrap())
            .collect();
        let checks = structure_match(&names, &fields, &sc, 1e-12).unwrap();
        assert_eq!(checks.len(), 28); // 7 choose 2 + 7 diagonal
        for ch in &checks {
            assert!(ch.matches, "{} vs {}: {}", ch.left, ch.right, ch.residual);
        }

        // {e1,e3,e5} and {e2,e4,e6} close with vanishing mutual brackets
        for i in [1usize, 3, 5] {
            for j in [2usize, 4, 6] {
                let b = vf_bracket(
                    &realize_classical(&format!("e{}", i)).unwrap(),
                    &realize_classical(&format!("e{}", j)).unwrap(),
                )
                .unwrap();
                assert!(b.is_zero(TOL));
            }
        }
    }

    #[test]
    fn virasoro_closure_at_polynomial_truncation() {
        // [X(η1), X(η2)] = X(η1 η2' - η1' η2) for monomials up to degree 2
        let monos = [
            vec![c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        for (a, ea) in monos.iter().enumerate() {
            for eb in monos.iter() {
                let va = realize_x_eta(ea).unwrap();
                let vb = realize_x_eta(eb).unwrap();
                let br = vf_bracket(&va, &vb).unwrap();
                // η3 = η1 η2' - η1' η2 computed on coefficient vectors
                let mut eta3 = vec![c(0.0, 0.0); 5];
                for (i, ca) in ea.iter().enumerate() {
                    for (j, cb) in eb.iter().enumerate() {
                        if j > 0 {
                            eta3[i + j - 1] += ca * cb * c(j as f64, 0.0);
                        }
                        if i > 0 {
                            eta3[i + j - 1] -= ca * cb * c(i as f64, 0.0);
                        }
                    }
                }
                eta3.truncate(3);
                let expected = realize_x_eta(&eta3).unwrap();
                assert!(br.sub(&expected).unwrap().is_zero(TOL), "monomial pair {a}");
            }
        }
    }

    #[test]
    fn susy_structure_match() {
        let sc = susy_algebra();
        let names = sc.basis.names.clone();
        let fields: Vec<PolyVectorField> = names.iter().map(|n| realize_susy(n).unwrap()).collect();
        let checks = structure_match(&names, &fields, &sc, 1e-12).unwrap();
        assert_eq!(checks.len(), 36);
        for ch in &checks {
            assert!(ch.matches, "{} vs {}: {}", ch.left, ch.right, ch.residual);
        }
        // the odd squares probed the anticommutator entries
        let squares: Vec<_> = checks.iter().filter(|ch| ch.anti && ch.left == ch.right).collect();
        assert_eq!(squares.len(), 2);
    }

    #[test]
    fn odd_vector_field_squares() {
        // {J+, J+} = 2i P+ as vector fields
        let jp = realize_susy("J+").unwrap();
        let pp = realize_susy("P+").unwrap();
        let sq = vf_bracket(&jp, &jp).unwrap();
        assert!(sq.sub(&pp.scale(c(0.0, 2.0))).unwrap().is_zero(TOL));

        // {J+, J-} = 0
        let jm = realize_susy("J-").unwrap();
        let z = vf_bracket(&jp, &jm).unwrap();
        assert!(z.is_zero(TOL));
    }

    #[test]
    fn degree_overflow_detected() {
        let coords = classical_coords();
        let z = SuperPoly::var(&coords, 0);
        let mut big = z.clone();
        for _ in 0..3 {
            big = big.mul(&z).unwrap();
        }
        // degree 4 times degree 1 overflows the budget
        assert!(matches!(
            big.mul(&z),
            Err(VectorFieldError::DegreeOverflow(_))
        ));
    }
}
