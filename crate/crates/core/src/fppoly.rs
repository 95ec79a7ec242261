//! Polynomials over a prime field 𝔽_p, for `p` of any size.
//!
//! Root finding never scans the field: distinct roots come from
//! `gcd(f, x^p − x)` and are split off by Cantor–Zassenhaus.

use std::fmt;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod, ExtNat};
use crate::zpoly::ZPoly;
use crate::{Error, Result};

/// Seed used by [`roots_with_mult_at_least`] so results are reproducible.
pub const DEFAULT_SPLIT_SEED: u64 = 0x5eed_f00d;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: BigInt,
    coeffs: Vec<BigInt>,
}

impl FpPoly {
    /// Reduces each coefficient into `[0, p)` and trims.
    pub fn new(p: &BigInt, coeffs: Vec<BigInt>) -> FpPoly {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().map(|c| c.mod_floor(p)).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        FpPoly { p: p.clone(), coeffs }
    }

    pub fn from_i64s(p: i64, cs: &[i64]) -> FpPoly {
        FpPoly::new(&BigInt::from(p), cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(p: &BigInt) -> FpPoly {
        FpPoly { p: p.clone(), coeffs: Vec::new() }
    }

    pub fn one(p: &BigInt) -> FpPoly {
        FpPoly::new(p, vec![BigInt::one()])
    }

    /// `x − c`
    pub fn linear(p: &BigInt, c: &BigInt) -> FpPoly {
        FpPoly::new(p, vec![-c, BigInt::one()])
    }

    pub fn modulus(&self) -> &BigInt {
        &self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(&self.p))
    }

    pub fn scale(&self, k: &BigInt) -> FpPoly {
        FpPoly::new(&self.p, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divides by the leading coefficient; the zero polynomial stays zero.
    pub fn monic(&self) -> FpPoly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(l) => self.scale(&inv_mod(l, &self.p).expect("nonzero residue is invertible")),
        }
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        FpPoly::new(&self.p, (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        FpPoly::new(&self.p, (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(&self.p);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        FpPoly::new(&self.p, out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = inv_mod(d.leading_coeff().unwrap(), &self.p).expect("nonzero residue is invertible");
        let mut r = self.coeffs.clone();
        let Some(dr) = self.degree() else { return (self.clone(), self.clone()) };
        if dr < dd {
            return (FpPoly::zero(&self.p), self.clone());
        }
        let mut q = vec![BigInt::zero(); dr - dd + 1];
        for k in (0..=dr - dd).rev() {
            let t = (&r[k + dd] * &inv).mod_floor(&self.p);
            if t.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] = (&r[k + j] - &t * dc).mod_floor(&self.p);
            }
            q[k] = t;
        }
        (FpPoly::new(&self.p, q), FpPoly::new(&self.p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    fn div_exact(&self, d: &FpPoly) -> FpPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `base^e mod m`.
    pub fn pow_mod(&self, e: &BigInt, m: &FpPoly) -> FpPoly {
        let mut result = FpPoly::one(&self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            result = result.mul(&result).rem(m);
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
        }
        result
    }

    pub fn derivative(&self) -> FpPoly {
        FpPoly::new(&self.p, self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Multiplicity of `c` as a root; `∞` for the zero polynomial.
    pub fn ord_at(&self, c: &BigInt) -> ExtNat {
        if self.is_zero() {
            return ExtNat::Infinity;
        }
        let lin = FpPoly::linear(&self.p, c);
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = f.div_rem(&lin);
            if !r.is_zero() {
                return ExtNat::Finite(k);
            }
            f = q;
            k += 1;
        }
    }

    /// Lowest index with a nonzero coefficient; `∞` for zero.
    pub fn ord_at_zero(&self) -> ExtNat {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => ExtNat::Finite(i as u64),
            None => ExtNat::Infinity,
        }
    }

    /// Squarefree decomposition of a nonzero polynomial: monic, pairwise
    /// coprime `(gᵢ, i)` with `f = lc(f)·∏ gᵢⁱ`. Constant factors are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(FpPoly, usize)> {
        assert!(!self.is_zero(), "squarefree decomposition of zero");
        let f = self.monic();
        let mut out = Vec::new();
        let mut c = f.gcd(&f.derivative());
        let mut w = f.div_exact(&c);
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_exact(&y);
            if fac.degree() > Some(0) {
                out.push((fac, i));
            }
            w = y;
            c = c.div_exact(&w);
            i += 1;
        }
        if !c.is_one() {
            let root = c.pth_root();
            let step = self.p_usize().expect("a p-th power of positive degree forces small p");
            for (g, k) in root.squarefree_decomposition() {
                out.push((g, k * step));
            }
        }
        out
    }

    fn p_usize(&self) -> Option<usize> {
        usize::try_from(&self.p).ok()
    }

    /// `h` with `h(x)^p = self(x)`, assuming only indices divisible by `p` are set.
    fn pth_root(&self) -> FpPoly {
        let p = self.p_usize().expect("p-th root needs a machine-sized p");
        FpPoly::new(&self.p, self.coeffs.iter().step_by(p).cloned().collect())
    }

    /// Roots of a squarefree polynomial that lie in 𝔽_p.
    fn rational_roots_squarefree<R: Rng>(&self, rng: &mut R) -> Vec<BigInt> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let x = FpPoly::new(&self.p, vec![BigInt::zero(), BigInt::one()]);
        let xp = x.pow_mod(&self.p, self);
        let split = self.gcd(&xp.sub(&x));
        let mut roots = Vec::new();
        split.split_linear(rng, &mut roots);
        roots.sort();
        roots
    }

    /// Collects the roots of a monic product of distinct linear factors.
    fn split_linear<R: Rng>(&self, rng: &mut R, out: &mut Vec<BigInt>) {
        match self.degree() {
            None | Some(0) => return,
            Some(1) => {
                out.push((-&self.coeffs[0]).mod_floor(&self.p));
                return;
            }
            _ => {}
        }
        if self.p == BigInt::from(2) {
            // Squarefree with only rational roots and degree 2 means x(x + 1).
            out.extend([BigInt::zero(), BigInt::one()]);
            return;
        }
        let half = (&self.p - 1u32) >> 1;
        loop {
            let a = rng.gen_bigint_range(&BigInt::zero(), &self.p);
            let shifted = FpPoly::linear(&self.p, &-a);
            let t = shifted.pow_mod(&half, self).sub(&FpPoly::one(&self.p));
            let d = self.gcd(&t);
            if d.degree() > Some(0) && d.degree() < self.degree() {
                let rest = self.div_exact(&d);
                d.split_linear(rng, out);
                rest.split_linear(rng, out);
                return;
            }
        }
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = ZPoly::new(self.coeffs.clone());
        write!(f, "{z} (mod {})", self.p)
    }
}

/// Coefficientwise reduction into `[0, p)`.
pub fn reduce_mod(h: &ZPoly, p: &BigInt) -> FpPoly {
    FpPoly::new(p, h.coeffs().to_vec())
}

/// All `c̄` with `(x − c̄)^m | f`, ascending.
pub fn roots_with_mult_at_least(f: &FpPoly, m: usize) -> Result<Vec<BigInt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SPLIT_SEED);
    roots_with_mult_at_least_rng(f, m, &mut rng)
}

/// As [`roots_with_mult_at_least`] with caller-supplied splitting randomness.
pub fn roots_with_mult_at_least_rng<R: Rng>(f: &FpPoly, m: usize, rng: &mut R) -> Result<Vec<BigInt>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = m.max(1);
    if f.degree().unwrap() < m {
        return Ok(Vec::new());
    }
    let mut prod = FpPoly::one(f.modulus());
    for (g, i) in f.squarefree_decomposition() {
        if i >= m {
            prod = prod.mul(&g);
        }
    }
    Ok(prod.rational_roots_squarefree(rng))
}

/// Whether every odd-index coefficient vanishes; only meaningful over 𝔽₂.
pub fn is_in_k_x2(f: &FpPoly) -> Result<bool> {
    if f.modulus() != &BigInt::from(2) {
        return Err(Error::EvenPrimeOnly(f.modulus().clone()));
    }
    Ok(f.coeffs().iter().skip(1).step_by(2).all(Zero::is_zero))
}

/// Square root in 𝔽₂[x] of an element of 𝔽₂[x²].
pub fn sqrt_poly_f2(f: &FpPoly) -> Result<FpPoly> {
    if !is_in_k_x2(f)? {
        return Err(Error::NotInKx2);
    }
    Ok(FpPoly::new(f.modulus(), f.coeffs().iter().step_by(2).cloned().collect()))
}

/// `c̄` with `f = (x − c̄)ⁿ` exactly, if there is one.
pub fn as_odd_power_of_linear(f: &FpPoly, n: usize) -> Option<BigInt> {
    let p = f.modulus();
    if f.degree() != Some(n) || !f.leading_coeff()?.is_one() {
        return None;
    }
    let nb = BigInt::from(n);
    let c = if !nb.is_multiple_of(p) {
        let inv = inv_mod(&nb, p).ok()?;
        -f.coeff(n - 1) * inv
    } else {
        let roots = roots_with_mult_at_least(f, n).ok()?;
        roots.first()?.clone()
    };
    let c = c.mod_floor(p);
    let lin = FpPoly::linear(p, &c);
    let mut expanded = FpPoly::one(p);
    for _ in 0..n {
        expanded = expanded.mul(&lin);
    }
    (expanded == *f).then_some(c)
}
