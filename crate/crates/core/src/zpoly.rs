//! Dense univariate polynomials over ℤ and the valuation primitives built
//! on them: Gauss valuation, Taylor shift, `μ_c`, reversal, Möbius
//! substitution and the discriminant.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{div_exact, pow, val_p, ExtNat};
use crate::{Error, Result};

/// Polynomial with integer coefficients; `coeffs[i]` multiplies `xⁱ`.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and the last entry of a nonzero polynomial is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

/// Integer 2×2 matrix `(a b; c d)` acting by `x ↦ (a·x + b)/(c·x + d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Mat2 {
        Mat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Mat2 {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> ZPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn zero() -> ZPoly {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> ZPoly {
        ZPoly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> ZPoly {
        ZPoly::new(vec![c.into()])
    }

    /// `c·xⁿ`
    pub fn monomial(c: impl Into<BigInt>, n: usize) -> ZPoly {
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs.push(c.into());
        ZPoly::new(coeffs)
    }

    pub fn from_i64s(cs: &[i64]) -> ZPoly {
        ZPoly::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `xⁱ`, zero past the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn scale(&self, k: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self / k` if `k` divides every coefficient.
    pub fn div_exact_scalar(&self, k: &BigInt) -> Option<ZPoly> {
        let coeffs = self.coeffs.iter().map(|c| div_exact(c, k)).collect::<Option<Vec<_>>>()?;
        Some(ZPoly::new(coeffs))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Minimum `p`-adic valuation of the coefficients.
    pub fn gauss_val(&self, p: &BigInt) -> ExtNat {
        self.coeffs.iter().map(|c| val_p(c, p)).min().unwrap_or(ExtNat::Infinity)
    }

    /// `G(x) = H(x + c)` by repeated synthetic division.
    pub fn taylor_shift(&self, c: &BigInt) -> ZPoly {
        let mut a = self.coeffs.clone();
        if c.is_zero() {
            return self.clone();
        }
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &a[j + 1] * c;
                a[j] += t;
            }
        }
        ZPoly::new(a)
    }

    /// `H(k·x)`
    pub fn scale_var(&self, k: &BigInt) -> ZPoly {
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pw);
            pw *= k;
        }
        ZPoly::new(out)
    }

    /// `H(k·x + c)`
    pub fn compose_affine(&self, k: &BigInt, c: &BigInt) -> ZPoly {
        self.taylor_shift(c).scale_var(k)
    }

    /// `μ_c(H) = min_i (v_p(a_{c,i}) + i)` where `H = Σ a_{c,i}(x − c)ⁱ`.
    pub fn mu_c(&self, c: &BigInt, p: &BigInt) -> ExtNat {
        self.taylor_shift(c)
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| val_p(a, p) + i as u64)
            .min()
            .unwrap_or(ExtNat::Infinity)
    }

    /// `xⁿ·H(1/x)`.
    pub fn reverse(&self, n: usize) -> Result<ZPoly> {
        match self.degree() {
            Some(d) if d > n => Err(Error::ReversalDegreeTooSmall { degree: d, n }),
            None => Ok(ZPoly::zero()),
            Some(_) => {
                let mut out = vec![BigInt::zero(); n + 1];
                for (i, c) in self.coeffs.iter().enumerate() {
                    out[n - i] = c.clone();
                }
                Ok(ZPoly::new(out))
            }
        }
    }

    /// `(c·x + d)ⁿ · H((a·x + b)/(c·x + d))`, an integral polynomial of degree ≤ n.
    pub fn mobius_substitute(&self, m: &Mat2, n: usize) -> Result<ZPoly> {
        if m.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        if let Some(d) = self.degree() {
            if d > n {
                return Err(Error::DegreeMismatch(format!("degree {d} exceeds homogenization degree {n}")));
            }
        }
        let num = ZPoly::new(vec![m.b.clone(), m.a.clone()]);
        let den = ZPoly::new(vec![m.d.clone(), m.c.clone()]);
        let mut num_pows = vec![ZPoly::one()];
        let mut den_pows = vec![ZPoly::one()];
        for i in 1..=n {
            num_pows.push(&num_pows[i - 1] * &num);
            den_pows.push(&den_pows[i - 1] * &den);
        }
        let mut acc = ZPoly::zero();
        for (i, h) in self.coeffs.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            acc = &acc + &(&num_pows[i] * &den_pows[n - i]).scale(h);
        }
        Ok(acc)
    }

    /// gcd of the coefficients, nonnegative; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// `lc(b)^{δ+1}·a mod b` with `δ = deg a − deg b`.
    fn pseudo_rem(a: &ZPoly, b: &ZPoly) -> ZPoly {
        let db = b.degree().expect("pseudo-division by zero");
        let lb = b.leading_coeff().unwrap().clone();
        let Some(da) = a.degree() else { return ZPoly::zero() };
        if da < db {
            return a.clone();
        }
        let mut r = a.clone();
        let mut e = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading_coeff().unwrap().clone();
            let shifted = ZPoly::monomial(lr, dr - db);
            r = &r.scale(&lb) - &(&shifted * b);
            e -= 1;
        }
        r.scale(&pow(&lb, e as u64))
    }

    /// Resultant by the subresultant polynomial remainder sequence.
    pub fn resultant(a: &ZPoly, b: &ZPoly) -> BigInt {
        let (Some(mut da), Some(mut db)) = (a.degree(), b.degree()) else {
            return BigInt::zero();
        };
        let (mut a, mut b) = (a.clone(), b.clone());
        let mut sign = BigInt::one();
        if da < db {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut da, &mut db);
            if da % 2 == 1 && db % 2 == 1 {
                sign = -sign;
            }
        }
        if db == 0 {
            return sign * pow(&b.coeffs[0], da as u64);
        }
        let (ca, cb) = (a.content(), b.content());
        a = a.div_exact_scalar(&ca).unwrap();
        b = b.div_exact_scalar(&cb).unwrap();
        let t = pow(&ca, db as u64) * pow(&cb, da as u64);
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
            let delta = (da - db) as u64;
            if da % 2 == 1 && db % 2 == 1 {
                sign = -sign;
            }
            let r = ZPoly::pseudo_rem(&a, &b);
            a = b;
            let divisor = &g * pow(&h, delta);
            b = r.div_exact_scalar(&divisor).expect("subresultant division is exact");
            g = a.leading_coeff().unwrap().clone();
            if delta > 0 {
                h = div_exact(&pow(&g, delta), &pow(&h, delta - 1)).expect("subresultant h update is exact");
            }
            match b.degree() {
                None => return BigInt::zero(),
                Some(0) => break,
                Some(_) => {}
            }
        }
        let da = a.degree().unwrap() as u64;
        let lb = b.coeffs[0].clone();
        let h = div_exact(&pow(&lb, da), &pow(&h, da - 1)).expect("final subresultant step is exact");
        sign * t * h
    }

    /// `disc(F) = (−1)^{n(n−1)/2}·Res(F, F′)/lc(F)`.
    pub fn poly_discriminant(&self) -> Result<BigInt> {
        let n = match self.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        let res = ZPoly::resultant(self, &self.derivative());
        let lc = self.leading_coeff().unwrap();
        let d = div_exact(&res, lc).ok_or_else(|| Error::Internal("Res(F, F') not divisible by lc(F)".into()))?;
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ZPoly {
            type Output = ZPoly;
            fn $m(self, o: ZPoly) -> ZPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(cs: &[i64]) -> ZPoly {
        ZPoly::from_i64s(cs)
    }

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn gauss_valuation() {
        assert_eq!(zp(&[8, 2, 4]).gauss_val(&b(2)), ExtNat::Finite(1));
        assert_eq!(ZPoly::zero().gauss_val(&b(3)), ExtNat::Infinity);
        assert_eq!(zp(&[62500, 0, 0, 4]).gauss_val(&b(5)), ExtNat::Finite(0));
    }

    #[test]
    fn taylor_shift_examples() {
        assert_eq!(zp(&[0, 0, 1]).taylor_shift(&b(1)), zp(&[1, 2, 1]));
        let h = zp(&[3, -1, 4, 1, -5]);
        assert_eq!(h.taylor_shift(&b(0)), h);
        assert_eq!(zp(&[-1, 3, -3, 1]).taylor_shift(&b(1)), zp(&[0, 0, 0, 1]));
        assert_eq!(h.taylor_shift(&b(7)).taylor_shift(&b(-7)), h);
    }

    #[test]
    fn mu_c_examples() {
        assert_eq!(zp(&[0, 0, 0, -2]).mu_c(&b(0), &b(2)), ExtNat::Finite(4));
        assert_eq!(zp(&[1]).mu_c(&b(3), &b(7)), ExtNat::Finite(0));
        assert_eq!(zp(&[62500, 0, 0, 4]).mu_c(&b(0), &b(5)), ExtNat::Finite(3));
        assert_eq!(ZPoly::zero().mu_c(&b(0), &b(5)), ExtNat::Infinity);
    }

    #[test]
    fn reversal() {
        assert_eq!(zp(&[2, 0, 0, 1]).reverse(4).unwrap(), zp(&[0, 1, 0, 0, 2]));
        assert_eq!(ZPoly::zero().reverse(3).unwrap(), ZPoly::zero());
        assert_eq!(zp(&[62500, 0, 0, 4]).reverse(4).unwrap(), zp(&[0, 4, 0, 0, 62500]));
        assert!(matches!(zp(&[1, 1, 1]).reverse(1), Err(Error::ReversalDegreeTooSmall { .. })));
    }

    #[test]
    fn mobius_examples() {
        let h = zp(&[5, -3, 0, 2]);
        assert_eq!(h.mobius_substitute(&Mat2::identity(), 4).unwrap(), h);
        let swap = Mat2::new(0, 1, 1, 0);
        assert_eq!(zp(&[0, 0, 1]).mobius_substitute(&swap, 2).unwrap(), zp(&[1]));
        assert_eq!(h.mobius_substitute(&swap, 4).unwrap(), h.reverse(4).unwrap());
        assert_eq!(zp(&[1, 1]).mobius_substitute(&Mat2::new(1, 1, 0, 1), 1).unwrap(), zp(&[2, 1]));
        assert_eq!(h.mobius_substitute(&Mat2::new(1, 2, 2, 4), 3), Err(Error::SingularMatrix));
    }

    #[test]
    fn content_examples() {
        assert_eq!(zp(&[62500, 0, 0, 4]).content(), b(4));
        assert_eq!(ZPoly::zero().content(), b(0));
        assert_eq!(zp(&[2500, 0, 0, 20]).content(), b(20));
        assert_eq!(zp(&[-6, 9]).content(), b(3));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(zp(&[1, 0, 0, 1]).poly_discriminant().unwrap(), b(-27));
        assert_eq!(zp(&[-1, 0, 1]).poly_discriminant().unwrap(), b(4));
        assert_eq!(zp(&[4, 0, 0, 4]).poly_discriminant().unwrap(), b(-6912));
        assert_eq!(zp(&[0, 0, 0, 1]).poly_discriminant().unwrap(), b(0));
        assert_eq!(zp(&[5]).poly_discriminant(), Err(Error::ConstantPolynomial));
        assert_eq!(zp(&[3, 7]).poly_discriminant().unwrap(), b(1));
    }

    #[test]
    fn display() {
        assert_eq!(zp(&[62500, 0, -1, 4]).to_string(), "4*x^3 - x^2 + 62500");
        assert_eq!(zp(&[0, -1]).to_string(), "-x");
        assert_eq!(ZPoly::zero().to_string(), "0");
    }
}
