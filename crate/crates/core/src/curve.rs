//! Integral Weierstrass equations `y² + Q(x)·y = P(x)`, their discriminant,
//! the chart at infinity and changes of variables.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{div_exact, pow};
use crate::zpoly::{Mat2, ZPoly};
use crate::{Error, Result};

/// A smooth integral equation `y² + Q(x)·y = P(x)` of genus `g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassEquation {
    pub g: usize,
    pub q: ZPoly,
    pub p: ZPoly,
}

/// Change of variables `x = (a·x₁ + b)/(c·x₁ + d)`, `y = (e·y₁ + H(x₁))/(c·x₁ + d)^{g+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusChange {
    pub m: Mat2,
    pub e: BigInt,
    pub h: ZPoly,
}

/// Change of variables `x = u²·x₁ + c`, `y = u^{2g+1}·y₁ + H(x₁)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineChange {
    pub u: BigInt,
    pub c: BigInt,
    pub h: ZPoly,
}

/// An equation with `deg Q ≤ g` and `P` monic of degree `2g + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedEquation(WeierstrassEquation);

impl MobiusChange {
    pub fn identity() -> MobiusChange {
        MobiusChange { m: Mat2::identity(), e: BigInt::one(), h: ZPoly::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_identity() && self.e.is_one() && self.h.is_zero()
    }
}

impl AffineChange {
    pub fn identity() -> AffineChange {
        AffineChange { u: BigInt::one(), c: BigInt::zero(), h: ZPoly::zero() }
    }

    /// The same change written as a [`MobiusChange`] for genus `g`.
    pub fn to_mobius(&self, g: usize) -> MobiusChange {
        MobiusChange {
            m: Mat2 { a: &self.u * &self.u, b: self.c.clone(), c: BigInt::zero(), d: BigInt::one() },
            e: pow(&self.u, 2 * g as u64 + 1),
            h: self.h.clone(),
        }
    }
}

impl WeierstrassEquation {
    /// Validates degree bounds, genus and smoothness.
    pub fn new(g: usize, q: ZPoly, p: ZPoly) -> Result<WeierstrassEquation> {
        validate(g, q, p)
    }

    /// `F = 4P + Q²`
    pub fn f(&self) -> ZPoly {
        &self.p.scale(&BigInt::from(4)) + &(&self.q * &self.q)
    }

    pub fn discriminant(&self) -> BigInt {
        discriminant(self)
    }

    pub fn infinity_chart(&self) -> (ZPoly, ZPoly) {
        infinity_chart(self)
    }

    pub fn apply_change(&self, ch: &MobiusChange) -> Result<WeierstrassEquation> {
        apply_change(self, ch)
    }
}

impl fmt::Display for WeierstrassEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "y^2 = {}", self.p)
        } else {
            write!(f, "y^2 + ({})*y = {}", self.q, self.p)
        }
    }
}

impl PointedEquation {
    pub fn new(g: usize, q: ZPoly, p: ZPoly) -> Result<PointedEquation> {
        PointedEquation::try_from(validate(g, q, p)?)
    }

    pub fn equation(&self) -> &WeierstrassEquation {
        &self.0
    }

    pub fn into_equation(self) -> WeierstrassEquation {
        self.0
    }
}

impl TryFrom<WeierstrassEquation> for PointedEquation {
    type Error = Error;

    fn try_from(eq: WeierstrassEquation) -> Result<PointedEquation> {
        let g = eq.g;
        if eq.q.degree().is_some_and(|d| d > g) {
            return Err(Error::PointedShape(format!("deg Q exceeds g = {g}")));
        }
        if eq.p.degree() != Some(2 * g + 1) || !eq.p.leading_coeff().is_some_and(One::is_one) {
            return Err(Error::PointedShape(format!("P must be monic of degree {}", 2 * g + 1)));
        }
        Ok(PointedEquation(eq))
    }
}

/// Checks degree bounds, `deg F ∈ {2g+1, 2g+2}` and `disc(F) ≠ 0`.
pub fn validate(g: usize, q: ZPoly, p: ZPoly) -> Result<WeierstrassEquation> {
    if g == 0 {
        return Err(Error::InvalidArgument("genus must be at least 1".into()));
    }
    if q.degree().is_some_and(|d| d > g + 1) {
        return Err(Error::DegreeMismatch(format!("deg Q exceeds g + 1 = {}", g + 1)));
    }
    if p.degree().is_some_and(|d| d > 2 * g + 2) {
        return Err(Error::DegreeMismatch(format!("deg P exceeds 2g + 2 = {}", 2 * g + 2)));
    }
    let eq = WeierstrassEquation { g, q, p };
    let f = eq.f();
    match f.degree() {
        Some(d) if d == 2 * g + 1 || d == 2 * g + 2 => {}
        Some(d) => return Err(Error::DegreeMismatch(format!("deg(4P + Q^2) = {d} does not give genus {g}"))),
        None => return Err(Error::SingularCurve),
    }
    if f.poly_discriminant()?.is_zero() {
        return Err(Error::SingularCurve);
    }
    Ok(eq)
}

/// Brings `deg Q` down to at most `g + 1` via `y = z − E(x)` with `Q = Q₀ + 2E`.
///
/// Returns `(Q₀, P₀)` with `P₀ = P + Q·E − E²`, which keeps `4P + Q²` fixed.
pub fn reduce_degree_q(g: usize, q: &ZPoly, p: &ZPoly) -> Result<(ZPoly, ZPoly)> {
    let two = BigInt::from(2);
    let mut low = Vec::new();
    let mut e = Vec::new();
    for (i, c) in q.coeffs().iter().enumerate() {
        if i <= g + 1 {
            low.push(c.clone());
            e.push(BigInt::zero());
        } else {
            let half = div_exact(c, &two).ok_or(Error::NotReducible(i))?;
            low.push(BigInt::zero());
            e.push(half);
        }
    }
    let e = ZPoly::new(e);
    if e.is_zero() {
        return Ok((q.clone(), p.clone()));
    }
    let q0 = ZPoly::new(low);
    let p0 = &(p + &(q * &e)) - &(&e * &e);
    Ok((q0, p0))
}

/// `Δ = 2^{−4(g+1)}·disc(F)` for `deg F = 2g + 2`, and `2^{−4(g+1)}·lc(F)²·disc(F)`
/// for `deg F = 2g + 1`.
pub fn discriminant(eq: &WeierstrassEquation) -> BigInt {
    let g = eq.g;
    let f = eq.f();
    let disc = f.poly_discriminant().expect("validated equation has deg F >= 2");
    let scaled = if f.degree() == Some(2 * g + 1) {
        let a = f.leading_coeff().unwrap();
        a * a * disc
    } else {
        disc
    };
    div_exact(&scaled, &pow(&BigInt::from(2), 4 * (g as u64 + 1))).expect("discriminant of an integral equation is integral")
}

/// `(x^{g+1}·Q(1/x), x^{2g+2}·P(1/x))`
pub fn infinity_chart(eq: &WeierstrassEquation) -> (ZPoly, ZPoly) {
    let g = eq.g;
    (
        eq.q.reverse(g + 1).expect("deg Q <= g + 1"),
        eq.p.reverse(2 * g + 2).expect("deg P <= 2g + 2"),
    )
}

/// Applies `ch` and returns the transformed equation, checking integrality
/// and the discriminant law `Δ₁·e^{4(2g+1)} = det(M)^{2(g+1)(2g+1)}·Δ`.
pub fn apply_change(eq: &WeierstrassEquation, ch: &MobiusChange) -> Result<WeierstrassEquation> {
    let g = eq.g;
    if ch.e.is_zero() {
        return Err(Error::InvalidArgument("scalar e must be nonzero".into()));
    }
    if ch.h.degree().is_some_and(|d| d > g + 1) {
        return Err(Error::DegreeMismatch(format!("deg H exceeds g + 1 = {}", g + 1)));
    }
    let qt = eq.q.mobius_substitute(&ch.m, g + 1)?;
    let pt = eq.p.mobius_substitute(&ch.m, 2 * g + 2)?;
    let two_h = ch.h.scale(&BigInt::from(2));
    let q1 = (&qt + &two_h)
        .div_exact_scalar(&ch.e)
        .ok_or_else(|| Error::NonIntegral("Q1 is not divisible by e".into()))?;
    let e2 = &ch.e * &ch.e;
    let p1 = (&(&pt - &(&qt * &ch.h)) - &(&ch.h * &ch.h))
        .div_exact_scalar(&e2)
        .ok_or_else(|| Error::NonIntegral("P1 is not divisible by e^2".into()))?;
    let out = validate(g, q1, p1)?;
    let lhs = out.discriminant() * pow(&ch.e, 4 * (2 * g as u64 + 1));
    let rhs = pow(&ch.m.det(), 2 * (g as u64 + 1) * (2 * g as u64 + 1)) * eq.discriminant();
    if lhs != rhs {
        return Err(Error::Internal("discriminant transformation law violated".into()));
    }
    Ok(out)
}

/// Recovers `H` from `2H = e·Q₁ − (c·x + d)^{g+1}·Q((a·x + b)/(c·x + d))`.
pub fn recover_h(eq: &WeierstrassEquation, m: &Mat2, e: &BigInt, q1: &ZPoly) -> Result<ZPoly> {
    let qt = eq.q.mobius_substitute(m, eq.g + 1)?;
    (&q1.scale(e) - &qt)
        .div_exact_scalar(&BigInt::from(2))
        .ok_or_else(|| Error::Internal("trace identity: e*Q1 - Q~ is odd".into()))
}
