//! Graded structure constants, brackets over Grassmann-valued coordinates,
//! graded Jacobi checks, adjoint exponentials and conjugacy verification.
//!
//! Conventions. The bracket table stores `[X_i, X_j] = Σ c_ij^k X_k`, with
//! the anticommutator understood when both generators are odd. Elements
//! carry Grassmann coordinates whose parity matches the generator parity, so
//! every element is homogeneous-even as a whole; coefficients pass through
//! brackets with the Grassmann-envelope sign `(-1)^{|X_i||b|}`:
//! `[a X_i, b X_j] = (-1)^{|X_i||b|} a b [X_i, X_j]`.
//!
//! `adjoint_exp` computes the transformation of a one-dimensional subalgebra
//! representative under the group element generated by `X`, i.e. the
//! exponential of the right action `Y -> [Y, X]` (equivalently
//! `exp(-ad_X) Y`). This is the convention under which `K1` scales `P+` by
//! `e^{-2α}`, matching how representatives are rescaled in conjugacy
//! classifications.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grassmann::{GrassmannConst, GrassmannError, Parity};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("element has {0} coordinates, algebra has dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("coordinate {0} has parity incompatible with its generator")]
    CoordinateParity(usize),
    #[error("unknown generator name {0}")]
    UnknownName(String),
    #[error("matrix exponential did not converge (body norm too large)")]
    ExpDiverged,
    #[error("expected coordinate is not expressible: zero leading coefficient")]
    NoLeadingCoordinate,
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenParity {
    Even,
    Odd,
}

/// Named graded basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisSpec {
    pub names: Vec<String>,
    pub parities: Vec<GenParity>,
}

impl BasisSpec {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| AlgebraError::UnknownName(name.to_string()))
    }
}

/// Dense bracket table `[X_i, X_j] = Σ c_ij^k X_k`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    pub basis: BasisSpec,
    /// `c[i][j][k]`
    pub c: Vec<Vec<Vec<Complex64>>>,
}

/// Serialized form: dense list of nonzero triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureConstantsJson {
    pub names: Vec<String>,
    pub parities: Vec<GenParity>,
    pub constants: Vec<ConstantTriple>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

impl StructureConstants {
    pub fn new(basis: BasisSpec) -> Self {
        let n = basis.dim();
        StructureConstants {
            basis,
            c: vec![vec![vec![Complex64::new(0.0, 0.0); n]; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        self.c[i][j][k] = v;
    }

    pub fn parity(&self, i: usize) -> GenParity {
        self.basis.parities[i]
    }

    pub fn to_json(&self) -> StructureConstantsJson {
        let mut constants = Vec::new();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.c[i][j][k];
                    if v.norm() > 0.0 {
                        constants.push(ConstantTriple {
                            i,
                            j,
                            k,
                            re: v.re,
                            im: v.im,
                        });
                    }
                }
            }
        }
        StructureConstantsJson {
            names: self.basis.names.clone(),
            parities: self.basis.parities.clone(),
            constants,
        }
    }

    pub fn from_json(json: &StructureConstantsJson) -> Self {
        let basis = BasisSpec {
            names: json.names.clone(),
            parities: json.parities.clone(),
        };
        let mut sc = StructureConstants::new(basis);
        for t in &json.constants {
            sc.c[t.i][t.j][t.k] = Complex64::new(t.re, t.im);
        }
        sc
    }

    /// Max violation of `c_ij^k = -(-1)^{|i||j|} c_ji^k`.
    pub fn graded_antisymmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let both_odd =
                    self.parity(i) == GenParity::Odd && self.parity(j) == GenParity::Odd;
                for k in 0..n {
                    let r = if both_odd {
                        (self.c[i][j][k] - self.c[j][i][k]).norm()
                    } else {
                        (self.c[i][j][k] + self.c[j][i][k]).norm()
                    };
                    worst = worst.max(r);
                }
            }
        }
        worst
    }

    /// Max over all basis triples of the graded Jacobi sum
    /// `(-1)^{|i||k|}[X_i,[X_j,X_k]] + cyclic`.
    pub fn super_jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let p = |i: usize| -> u32 {
            if self.parity(i) == GenParity::Odd {
                1
            } else {
                0
            }
        };
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut sum = Complex64::new(0.0, 0.0);
                        let s1 = if p(i) * p(k) == 1 { -1.0 } else { 1.0 };
                        let s2 = if p(j) * p(i) == 1 { -1.0 } else { 1.0 };
                        let s3 = if p(k) * p(j) == 1 { -1.0 } else { 1.0 };
                        for l in 0..n {
                            sum += s1 * self.c[j][k][l] * self.c[i][l][m];
                            sum += s2 * self.c[k][i][l] * self.c[j][l][m];
                            sum += s3 * self.c[i][j][l] * self.c[k][l][m];
                        }
                        worst = worst.max(sum.norm());
                    }
                }
            }
        }
        worst
    }
}

/// The eight-generator symmetry superalgebra of the SUSY Gauss-Codazzi
/// system in the basis order (K1, P+, J+, K2, P-, J-, K0, C0); J± odd,
/// all others even, K0 and C0 central.
pub fn susy_algebra() -> StructureConstants {
    let basis = BasisSpec {
        names: ["K1", "P+", "J+", "K2", "P-", "J-", "K0", "C0"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        parities: vec![
            GenParity::Even,
            GenParity::Even,
            GenParity::Odd,
            GenParity::Even,
            GenParity::Even,
            GenParity::Odd,
            GenParity::Even,
            GenParity::Even,
        ],
    };
    let mut sc = StructureConstants::new(basis);
    let (k1, pp, jp, k2, pm, jm) = (0, 1, 2, 3, 4, 5);
    let two = Complex64::new(2.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let two_i = Complex64::new(0.0, 2.0);
    sc.set(k1, pp, pp, two);
    sc.set(pp, k1, pp, -two);
    sc.set(k1, jp, jp, one);
    sc.set(jp, k1, jp, -one);
    sc.set(jp, jp, pp, two_i);
    sc.set(k2, pm, pm, two);
    sc.set(pm, k2, pm, -two);
    sc.set(k2, jm, jm, one);
    sc.set(jm, k2, jm, -one);
    sc.set(jm, jm, pm, two_i);
    sc
}

/// The seven-generator finite-dimensional symmetry algebra of the classical
/// Gauss-Codazzi system, basis (e0..e6), all even. The constants are those
/// of the vector-field realization under `[V,W] = V∘W - W∘V`, in particular
/// `[e1,e5] = +2 e3` and `[e2,e6] = +2 e4`.
pub fn classical_algebra() -> StructureConstants {
    let basis = BasisSpec {
        names: (0..=6).map(|i| format!("e{}", i)).collect(),
        parities: vec![GenParity::Even; 7],
    };
    let mut sc = StructureConstants::new(basis);
    let one = Complex64::new(1.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let pairs = [
        (1usize, 3usize, 1usize, one),
        (1, 5, 3, two),
        (3, 5, 5, one),
        (2, 4, 2, one),
        (2, 6, 4, two),
        (4, 6, 6, one),
    ];
    for (i, j, k, v) in pairs {
        sc.set(i, j, k, v);
        sc.set(j, i, k, -v);
    }
    sc
}

/// Element of the Grassmann envelope: one Grassmann coordinate per basis
/// generator, even coordinates on even generators and odd on odd ones.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub coords: Vec<GrassmannConst>,
}

impl AlgebraElement {
    pub fn zero(sc: &StructureConstants, k: usize) -> Self {
        AlgebraElement {
            coords: vec![GrassmannConst::zero(k, Complex64::new(0.0, 0.0)); sc.dim()],
        }
    }

    /// Element with a single complex coefficient on one generator.
    pub fn single(
        sc: &StructureConstants,
        k: usize,
        idx: usize,
        v: Complex64,
    ) -> Result<Self, AlgebraError> {
        let mut e = Self::zero(sc, k);
        e.coords[idx] = GrassmannConst::complex(k, v);
        e.validate(sc)?;
        Ok(e)
    }

    pub fn validate(&self, sc: &StructureConstants) -> Result<(), AlgebraError> {
        if self.coords.len() != sc.dim() {
            return Err(AlgebraError::DimensionMismatch(self.coords.len(), sc.dim()));
        }
        for (i, c) in self.coords.iter().enumerate() {
            let want = match sc.parity(i) {
                GenParity::Even => Parity::Even,
                GenParity::Odd => Parity::Odd,
            };
            if c.num_terms() != 0 && c.parity() != want {
                return Err(AlgebraError::CoordinateParity(i));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        let mut out = self.clone();
        for (a, b) in out.coords.iter_mut().zip(rhs.coords.iter()) {
            *a = a.sub(b)?;
        }
        Ok(out)
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.sub(rhs).map(|d| d.max_abs() <= tol).unwrap_or(false)
    }
}

/// Graded bracket of two envelope elements.
pub fn bracket(
    x: &AlgebraElement,
    y: &AlgebraElement,
    sc: &StructureConstants,
) -> Result<AlgebraElement, AlgebraError> {
    x.validate(sc)?;
    y.validate(sc)?;
    let k = x.coords[0].k();
    let n = sc.dim();
    let mut out = AlgebraElement::zero(sc, k);
    for i in 0..n {
        if x.coords[i].num_terms() == 0 {
            continue;
        }
        for j in 0..n {
            if y.coords[j].num_terms() == 0 {
                continue;
            }
            // envelope sign: coefficient of X_j moves past X_i
            let sign = if sc.parity(i) == GenParity::Odd && sc.parity(j) == GenParity::Odd {
                -1.0
            } else {
                1.0
            };
            let ab = x.coords[i]
                .mul(&y.coords[j])?
                .scale(Complex64::new(sign, 0.0));
            for (m, cm) in sc.c[i][j].iter().enumerate() {
                if cm.norm() == 0.0 {
                    continue;
                }
                out.coords[m] = out.coords[m].add(&ab.scale(*cm))?;
            }
        }
    }
    Ok(out)
}

/// Matrix of the right action `Z -> [Z, X]` on coordinates: with the
/// envelope sign convention the coefficients simply multiply from the left,
/// `M[k][j] = Σ_i x_i c_ji^k`.
fn right_ad_matrix(
    x: &AlgebraElement,
    sc: &StructureConstants,
) -> Result<Vec<Vec<GrassmannConst>>, AlgebraError> {
    x.validate(sc)?;
    let kgen = x.coords[0].k();
    let n = sc.dim();
    let zero = GrassmannConst::zero(kgen, Complex64::new(0.0, 0.0));
    let mut m = vec![vec![zero.clone(); n]; n];
    for j in 0..n {
        for i in 0..n {
            if x.coords[i].num_terms() == 0 {
                continue;
            }
            for k in 0..n {
                let cjik = sc.c[j][i][k];
                if cjik.norm() == 0.0 {
                    continue;
                }
                m[k][j] = m[k][j].add(&x.coords[i].scale(cjik))?;
            }
        }
    }
    Ok(m)
}

const EXP_SERIES_CUTOFF: f64 = 1e-13;
const EXP_BODY_NORM_GUARD: f64 = 1e3;

/// Exponential of a Grassmann-even matrix by scaling and squaring with a
/// norm-based series cutoff; soul contributions terminate by nilpotency.
fn grassmann_matrix_exp(
    m: &[Vec<GrassmannConst>],
    kgen: usize,
) -> Result<Vec<Vec<GrassmannConst>>, AlgebraError> {
    let n = m.len();
    let norm: f64 = m
        .iter()
        .map(|row| row.iter().map(|e| e.max_abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm.is_finite() || norm > EXP_BODY_NORM_GUARD {
        return Err(AlgebraError::ExpDiverged);
    }
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let scale = Complex64::new(0.5f64.powi(squarings as i32), 0.0);
    let ms: Vec<Vec<GrassmannConst>> = m
        .iter()
        .map(|row| row.iter().map(|e| e.scale(scale)).collect())
        .collect();

    let zero = GrassmannConst::zero(kgen, Complex64::new(0.0, 0.0));
    let eye = |n: usize| -> Vec<Vec<GrassmannConst>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            GrassmannConst::real(kgen, 1.0)
                        } else {
                            zero.clone()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let mat_mul = |a: &[Vec<GrassmannConst>],
                   b: &[Vec<GrassmannConst>]|
     -> Result<Vec<Vec<GrassmannConst>>, AlgebraError> {
        let mut out = vec![vec![zero.clone(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if a[i][l].num_terms() == 0 {
                    continue;
                }
                for j in 0..n {
                    if b[l][j].num_terms() == 0 {
                        continue;
                    }
                    out[i][j] = out[i][j].add(&a[i][l].mul(&b[l][j])?)?;
                }
            }
        }
        Ok(out)
    };

    let mut acc = eye(n);
    let mut term = eye(n);
    for it in 1..200 {
        term = mat_mul(&term, &ms)?;
        let fact = Complex64::new(1.0 / it as f64, 0.0);
        term = term
            .iter()
            .map(|row| row.iter().map(|e| e.scale(fact)).collect())
            .collect();
        let tnorm: f64 = term
            .iter()
            .map(|row| row.iter().map(|e| e.max_abs()).sum::<f64>())
            .fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                acc[i][j] = acc[i][j].add(&term[i][j])?;
            }
        }
        if tnorm < EXP_SERIES_CUTOFF {
            break;
        }
    }
    for _ in 0..squarings {
        acc = mat_mul(&acc, &acc)?;
    }
    Ok(acc)
}

/// Transform a subalgebra representative `Y` under the group element
/// generated by `X`.
pub fn adjoint_exp(
    x: &AlgebraElement,
    y: &AlgebraElement,
    sc: &StructureConstants,
) -> Result<AlgebraElement, AlgebraError> {
    y.validate(sc)?;
    let kgen = x.coords[0].k();
    let m = right_ad_matrix(x, sc)?;
    let em = grassmann_matrix_exp(&m, kgen)?;
    let n = sc.dim();
    let mut out = AlgebraElement::zero(sc, kgen);
    for k in 0..n {
        for j in 0..n {
            if y.coords[j].num_terms() == 0 || em[k][j].num_terms() == 0 {
                continue;
            }
            out.coords[k] = out.coords[k].add(&em[k][j].mul(&y.coords[j])?)?;
        }
    }
    Ok(out)
}

/// Result of a conjugacy check: `adjoint_exp(X, Y) = s * Y_expected` for
/// some invertible even scalar `s` (ratio of leading coordinates).
#[derive(Debug, Clone)]
pub struct ConjugacyCheck {
    pub conjugate: bool,
    pub scale: Option<GrassmannConst>,
    pub residual: f64,
}

pub fn verify_conjugacy(
    y: &AlgebraElement,
    y_expected: &AlgebraElement,
    x: &AlgebraElement,
    sc: &StructureConstants,
    tol: f64,
) -> Result<ConjugacyCheck, AlgebraError> {
    let z = adjoint_exp(x, y, sc)?;
    // leading coordinate: first with an invertible body in Y_expected
    let lead = y_expected
        .coords
        .iter()
        .position(|c| c.body().norm() > 1e-12);
    let lead = match lead {
        Some(l) => l,
        None => return Err(AlgebraError::NoLeadingCoordinate),
    };
    let s = z.coords[lead].mul(&y_expected.coords[lead].invert()?)?;
    let mut residual = 0.0f64;
    for (zc, ec) in z.coords.iter().zip(y_expected.coords.iter()) {
        let diff = zc.sub(&s.mul(ec)?)?;
        residual = residual.max(diff.max_abs());
    }
    Ok(ConjugacyCheck {
        conjugate: residual <= tol && s.body().norm() > 1e-12,
        scale: Some(s),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn susy_table_spot_checks() {
        let sc = susy_algebra();
        let k = 4;
        let k1 = AlgebraElement::single(&sc, k, 0, c(1.0, 0.0)).unwrap();
        let pp = AlgebraElement::single(&sc, k, 1, c(1.0, 0.0)).unwrap();

        // [K1, P+] = 2 P+
        let b = bracket(&k1, &pp, &sc).unwrap();
        let expected = AlgebraElement::single(&sc, k, 1, c(2.0, 0.0)).unwrap();
        assert!(b.approx_eq(&expected, TOL));

        // raw table entry for the anticommutator {J+, J+} = 2i P+
        assert!((sc.c[2][2][1] - c(0.0, 2.0)).norm() < TOL);

        // odd generators pair with odd coordinates: [xi1 J+, xi2 J+] =
        // -(xi1 xi2) {J+, J+} = -2i xi1 xi2 P+
        let x1 = GrassmannConst::xi(k, 1).unwrap();
        let x2 = GrassmannConst::xi(k, 2).unwrap();
        let mut a = AlgebraElement::zero(&sc, k);
        a.coords[2] = x1.clone();
        let mut b2 = AlgebraElement::zero(&sc, k);
        b2.coords[2] = x2.clone();
        let br = bracket(&a, &b2, &sc).unwrap();
        let expected = x1.mul(&x2).unwrap().scale(c(0.0, -2.0));
        assert!(br.coords[1].approx_eq(&expected, TOL));

        // K0 row and column vanish entirely
        for j in 0..8 {
            for m in 0..8 {
                assert!(sc.c[6][j][m].norm() < TOL);
                assert!(sc.c[j][6][m].norm() < TOL);
            }
        }
    }

    #[test]
    fn jacobi_residuals_vanish_for_builtins() {
        assert!(susy_algebra().super_jacobi_residual() < 1e-14);
        assert!(classical_algebra().super_jacobi_residual() < 1e-14);
        assert!(susy_algebra().graded_antisymmetry_residual() < 1e-14);
        assert!(classical_algebra().graded_antisymmetry_residual() < 1e-14);
    }

    #[test]
    fn jacobi_detects_tampering() {
        let mut sc = susy_algebra();
        // tamper [K1, P+] to 3 P+
        sc.set(0, 1, 1, c(3.0, 0.0));
        assert!(sc.super_jacobi_residual() > 0.1);
    }

    #[test]
    fn adjoint_identity_for_zero() {
        let sc = susy_algebra();
        let k = 4;
        let x = AlgebraElement::zero(&sc, k);
        let mut y = AlgebraElement::zero(&sc, k);
        y.coords[1] = GrassmannConst::real(k, 1.0);
        y.coords[4] = GrassmannConst::real(k, 3.0);
        let z = adjoint_exp(&x, &y, &sc).unwrap();
        assert!(z.approx_eq(&y, TOL));
    }

    #[test]
    fn adjoint_scales_translations() {
        // X = α K1 + δ K2 with α = ln(2)/2, δ = 0 sends P+ + P- to
        // (1/2) P+ + P-
        let sc = susy_algebra();
        let k = 4;
        let alpha = 0.5 * 2.0f64.ln();
        let mut x = AlgebraElement::zero(&sc, k);
        x.coords[0] = GrassmannConst::real(k, alpha);
        let mut y = AlgebraElement::zero(&sc, k);
        y.coords[1] = GrassmannConst::real(k, 1.0);
        y.coords[4] = GrassmannConst::real(k, 1.0);
        let z = adjoint_exp(&x, &y, &sc).unwrap();
        assert!((z.coords[1].body() - c(0.5, 0.0)).norm() < 1e-12);
        assert!((z.coords[4].body() - c(1.0, 0.0)).norm() < 1e-12);
    }

    /// Independent oracle: truncated iterated-bracket series
    /// `Y + [Y,X] + [[Y,X],X]/2! + ...` without any matrix machinery.
    fn adjoint_series_oracle(
        x: &AlgebraElement,
        y: &AlgebraElement,
        sc: &StructureConstants,
        terms: usize,
    ) -> AlgebraElement {
        let mut acc = y.clone();
        let mut cur = y.clone();
        let mut fact = 1.0f64;
        for n in 1..=terms {
            cur = bracket(&cur, x, sc).unwrap();
            fact *= n as f64;
            let mut scaled = cur.clone();
            for cc in scaled.coords.iter_mut() {
                *cc = cc.scale(c(1.0 / fact, 0.0));
            }
            for (a, b) in acc.coords.iter_mut().zip(scaled.coords.iter()) {
                *a = a.add(b).unwrap();
            }
        }
        acc
    }

    #[test]
    fn adjoint_matches_bch_closed_form() {
        // X = α K1 + β P+ + η J+ + δ K2 + λ P- + ρ J-, Y = K2 + a P+
        // transforms to K2 + e^{-2α} a P+ - (λ/δ)(e^{-2δ}-1) P-
        //             - (1/δ)(e^{-δ}-1) ρ J-
        let sc = susy_algebra();
        let k = 4;
        let (alpha, beta, delta, lambda, a) = (1.0, 0.7, 0.5, 2.0, 3.0);
        let mut x = AlgebraElement::zero(&sc, k);
        x.coords[0] = GrassmannConst::real(k, alpha);
        x.coords[1] = GrassmannConst::real(k, beta);
        x.coords[2] = GrassmannConst::xi(k, 2).unwrap(); // η = xi2
        x.coords[3] = GrassmannConst::real(k, delta);
        x.coords[4] = GrassmannConst::real(k, lambda);
        x.coords[5] = GrassmannConst::xi(k, 1).unwrap(); // ρ = xi1
        let mut y = AlgebraElement::zero(&sc, k);
        y.coords[3] = GrassmannConst::real(k, 1.0);
        y.coords[1] = GrassmannConst::real(k, a);
        let z = adjoint_exp(&x, &y, &sc).unwrap();

        assert!((z.coords[3].body() - c(1.0, 0.0)).norm() < 1e-10);
        assert!((z.coords[1].body() - c(a * (-2.0 * alpha).exp(), 0.0)).norm() < 1e-10);
        let pm_expected = -(lambda / delta) * ((-2.0 * delta).exp() - 1.0);
        assert!((z.coords[4].body() - c(pm_expected, 0.0)).norm() < 1e-10);
        let jm_coeff = -(1.0 / delta) * ((-delta).exp() - 1.0);
        let expected_jm = GrassmannConst::xi(k, 1).unwrap().scale(c(jm_coeff, 0.0));
        assert!(z.coords[5].approx_eq(&expected_jm, 1e-10));

        // cross-check the whole element against the series oracle
        let oracle = adjoint_series_oracle(&x, &y, &sc, 40);
        assert!(z.approx_eq(&oracle, 1e-10));
    }

    #[test]
    fn adjoint_is_bracket_homomorphism() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let sc = susy_algebra();
        let k = 4;
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let mut x = AlgebraElement::zero(&sc, k);
            let mut y = AlgebraElement::zero(&sc, k);
            let mut z = AlgebraElement::zero(&sc, k);
            for e in [&mut x, &mut y, &mut z] {
                for (i, coord) in e.coords.iter_mut().enumerate() {
                    if sc.parity(i) == GenParity::Even {
                        *coord = GrassmannConst::real(k, rng.gen_range(-0.5..0.5));
                    } else {
                        *coord = GrassmannConst::xi(k, rng.gen_range(1..=4))
                            .unwrap()
                            .scale(c(rng.gen_range(-0.5..0.5), 0.0));
                    }
                }
            }
            let lhs = adjoint_exp(&x, &bracket(&y, &z, &sc).unwrap(), &sc).unwrap();
            let rhs = bracket(
                &adjoint_exp(&x, &y, &sc).unwrap(),
                &adjoint_exp(&x, &z, &sc).unwrap(),
                &sc,
            )
            .unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-10));

            // Ad(X) ∘ Ad(-X) = identity on the basis
            let mut neg_x = x.clone();
            for cc in neg_x.coords.iter_mut() {
                *cc = cc.neg();
            }
            for b in 0..sc.dim() {
                if sc.parity(b) == GenParity::Even {
                    let e = AlgebraElement::single(&sc, k, b, c(1.0, 0.0)).unwrap();
                    let round =
                        adjoint_exp(&neg_x, &adjoint_exp(&x, &e, &sc).unwrap(), &sc).unwrap();
                    assert!(round.approx_eq(&e, 1e-10));
                }
            }
        }
    }

    #[test]
    fn central_and_decomposition() {
        // brackets between the (K1,P+,J+) and (K2,P-,J-) blocks vanish,
        // K0 and C0 are central
        let sc = susy_algebra();
        let block1 = [0usize, 1, 2];
        let block2 = [3usize, 4, 5];
        for &i in &block1 {
            for &j in &block2 {
                for m in 0..8 {
                    assert!(sc.c[i][j][m].norm() < TOL);
                    assert!(sc.c[j][i][m].norm() < TOL);
                }
            }
        }
        for central in [6usize, 7] {
            for j in 0..8 {
                for m in 0..8 {
                    assert!(sc.c[central][j][m].norm() < TOL);
                    assert!(sc.c[j][central][m].norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn conjugacy_rescaling() {
        // Y = P+ + 4 P- with α - δ = -ln(4)/2 maps onto P+ + P-
        let sc = susy_algebra();
        let k = 4;
        let mut y = AlgebraElement::zero(&sc, k);
        y.coords[1] = GrassmannConst::real(k, 1.0);
        y.coords[4] = GrassmannConst::real(k, 4.0);
        let mut yexp = AlgebraElement::zero(&sc, k);
        yexp.coords[1] = GrassmannConst::real(k, 1.0);
        yexp.coords[4] = GrassmannConst::real(k, 1.0);
        let mut x = AlgebraElement::zero(&sc, k);
        let diff = -0.5 * 4.0f64.ln();
        x.coords[0] = GrassmannConst::real(k, diff); // α = -ln(4)/2, δ = 0
        let check = verify_conjugacy(&y, &yexp, &x, &sc, 1e-10).unwrap();
        assert!(check.conjugate, "residual {}", check.residual);

        // identity case
        let x0 = AlgebraElement::zero(&sc, k);
        let check = verify_conjugacy(&y, &y, &x0, &sc, 1e-12).unwrap();
        assert!(check.conjugate);
    }

    #[test]
    fn conjugacy_sign_classes_distinct() {
        // Y = P+ + P- vs P+ - P-: the relative sign cannot be flipped by
        // dilations; scan a parameter grid
        let sc = susy_algebra();
        let k = 4;
        let mut y = AlgebraElement::zero(&sc, k);
        y.coords[1] = GrassmannConst::real(k, 1.0);
        y.coords[4] = GrassmannConst::real(k, 1.0);
        let mut yexp = AlgebraElement::zero(&sc, k);
        yexp.coords[1] = GrassmannConst::real(k, 1.0);
        yexp.coords[4] = GrassmannConst::real(k, -1.0);
        for a in [-1.0f64, -0.3, 0.0, 0.4, 1.2] {
            for d in [-0.9f64, 0.0, 0.7, 1.5] {
                let mut x = AlgebraElement::zero(&sc, k);
                x.coords[0] = GrassmannConst::real(k, a);
                x.coords[3] = GrassmannConst::real(k, d);
                let check = verify_conjugacy(&y, &yexp, &x, &sc, 1e-10).unwrap();
                assert!(!check.conjugate);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let sc = susy_algebra();
        let json = sc.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let back: StructureConstantsJson = serde_json::from_str(&text).unwrap();
        let sc2 = StructureConstants::from_json(&back);
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    assert!((sc.c[i][j][k] - sc2.c[i][j][k]).norm() < TOL);
                }
            }
        }
    }
}
