//! Pointed-minimal equations: `deg Q ≤ g`, `P` monic of degree `2g + 1`,
//! changed only by `x = u²·x₁ + c`, `y = u^{2g+1}·y₁ + H(x₁)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{factorize, pow, val_p, FactoredInteger};
use crate::curve::{recover_h, AffineChange, PointedEquation};
use crate::fppoly::{as_odd_power_of_linear, reduce_mod, roots_with_mult_at_least};
use crate::localize::{dilate, find_c_even_bound, lambda_even, v_disc, LocalModel, LocalReport, Move, Point};
use crate::minimize::{assemble, AssemblyMode};
use crate::zpoly::{Mat2, ZPoly};
use crate::{Error, Result};

/// `x ↦ scale·x + shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub scale: BigInt,
    pub shift: BigInt,
}

impl AffineMap {
    pub fn identity() -> AffineMap {
        AffineMap { scale: BigInt::one(), shift: BigInt::zero() }
    }

    pub fn new(scale: BigInt, shift: BigInt) -> AffineMap {
        AffineMap { scale, shift }
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap { scale: &self.scale * &inner.scale, shift: &self.scale * &inner.shift + &self.shift }
    }

    pub fn apply(&self, x: &BigInt) -> BigInt {
        &self.scale * x + &self.shift
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedResult {
    pub eq_min: PointedEquation,
    pub change: AffineChange,
    pub delta_min: FactoredInteger,
    pub reports: Vec<LocalReport>,
}

/// `v_p(Δ)` below which a pointed equation is pointed-minimal at `p`.
pub fn pointed_threshold(g: usize) -> u64 {
    4 * g as u64 * (2 * g as u64 + 1)
}

/// Validates `(g, Q, P)` as a pointed equation.
pub fn validate_pointed(g: usize, q: ZPoly, p: ZPoly) -> Result<PointedEquation> {
    PointedEquation::new(g, q, p)
}

fn check_shape(g: usize, q: &ZPoly, p: &ZPoly) -> Result<()> {
    let q_ok = q.degree().is_none_or(|d| d <= g);
    let p_ok = p.degree() == Some(2 * g + 1) && p.leading_coeff().is_some_and(One::is_one);
    if q_ok && p_ok {
        Ok(())
    } else {
        Err(Error::Internal("pointed driver left the pointed shape".into()))
    }
}

/// Searches for `p₀` with `λ(p₀) = 2g + 1` and `q₀` on `W(p₀)` with
/// `λ(q₀) = 2g + 2`; such a pair exists iff the equation is not
/// pointed-minimal at `p`. Returns the residues `(c̄(p₀), c̄(q₀))`.
pub fn non_minimality_witness(eq: &PointedEquation, p: &BigInt) -> Result<Option<(BigInt, BigInt)>> {
    let g = eq.equation().g;
    let top = 2 * g as u64 + 1;
    let model = LocalModel::from_equation(eq.equation(), p)?;
    for (pt0, l0) in model.points_with_lambda_at_least(g, top, false)? {
        if l0 != top {
            continue;
        }
        let (w, _) = model.dilate_at(&pt0, g)?;
        for (pt1, l1) in w.points_with_lambda_at_least(g, top + 1, false)? {
            if l1 == top + 1 {
                if let (Point::Finite(c0), Point::Finite(c1)) = (&pt0, pt1) {
                    let c0 = c0.clone();
                    return Ok(Some((c0, c1)));
                }
            }
        }
    }
    Ok(None)
}

/// Pointed pass at 2: repeatedly finds `p₀` with `λ = 2g + 1` and `q₀` on
/// `W(p₀)` with `λ = 2g + 2` and replaces the equation by `W(p₀)(q₀)`.
pub fn minimize_pointed_even(g: usize, q: &ZPoly, p: &ZPoly) -> Result<(ZPoly, ZPoly, AffineMap, Vec<Move>)> {
    let two = BigInt::from(2);
    let top = 2 * g as u64 + 1;
    let (mut q, mut p) = (q.clone(), p.clone());
    let mut l0 = AffineMap::identity();
    let mut moves = Vec::new();
    'outer: loop {
        if v_disc(g, &q, &p, &two)? < pointed_threshold(g) {
            break;
        }
        for c1 in find_c_even_bound(&q, &p, top).1 {
            let (lambda, qa, pa) = lambda_even(&q, &p, &c1, g)?;
            if lambda < top {
                continue;
            }
            check_shape(g, &qa, &pa)?;
            let (q1, p1) = dilate(&qa, &pa, &c1, lambda, &two)?;
            for c in find_c_even_bound(&q1, &p1, top + 1).1 {
                let (lambda1, qb, pb) = lambda_even(&q1, &p1, &c, g)?;
                if lambda1 < top + 1 {
                    continue;
                }
                let (qn, pn) = dilate(&qb, &pb, &c, lambda1, &two)?;
                check_shape(g, &qn, &pn)?;
                q = qn;
                p = pn;
                let step = AffineMap::new(BigInt::from(4), 2 * &c + &c1);
                moves.push(Move::TranslateDilate { c: c1.clone(), r: lambda / 2 });
                moves.push(Move::TranslateDilate { c: c.clone(), r: lambda1 / 2 });
                l0 = l0.compose(&step);
                continue 'outer;
            }
        }
        break;
    }
    Ok((q, p, l0, moves))
}

/// Largest `r` with `v(a_{c,i}) ≥ 2r·(2g + 1 − i)` for all `i ≤ 2g`, i.e.
/// `⌊θ/2⌋` computed in integers.
fn theta_half(f: &ZPoly, c: &BigInt, p: &BigInt, g: usize) -> u64 {
    let n = 2 * g as u64 + 1;
    let shifted = f.taylor_shift(c);
    (0..n as usize)
        .filter_map(|i| val_p(&shifted.coeff(i), p).finite().map(|v| v / (2 * (n - i as u64))))
        .min()
        .unwrap_or(0)
}

/// Refines a root `c̄` of `F̄` of order `2g + 1` to a residue mod `p²` that
/// is a center of a disc of radius `|p|²` containing all roots, if one exists.
fn refine_center(f: &ZPoly, c: &BigInt, p: &BigInt, g: usize) -> Option<BigInt> {
    let n = 2 * g + 1;
    let k = pow(p, n as u64);
    let gpoly = f.compose_affine(p, c).div_exact_scalar(&k)?;
    let c2 = as_odd_power_of_linear(&reduce_mod(&gpoly, p).monic(), n)?;
    Some(c + p * c2)
}

/// Pointed pass at the odd primes on `F = 4P + Q²` (degree `2g + 1`).
pub fn minimize_pointed_odd(f: &ZPoly, g: usize, odd_primes: &[BigInt]) -> Result<(ZPoly, AffineMap, Vec<(BigInt, Move)>)> {
    let n = 2 * g + 1;
    let mut f = f.clone();
    let mut l1 = AffineMap::identity();
    let mut moves = Vec::new();
    for p in odd_primes {
        loop {
            if v_disc(g, &ZPoly::zero(), &f, p)? < pointed_threshold(g) {
                break;
            }
            let roots = roots_with_mult_at_least(&reduce_mod(&f, p), n)?;
            let Some(c0) = roots.first() else { break };
            let Some(c) = refine_center(&f, c0, p, g) else { break };
            let r = theta_half(&f, &c, p, g);
            if r == 0 {
                break;
            }
            let s = pow(p, 2 * r);
            f = f
                .compose_affine(&s, &c)
                .div_exact_scalar(&pow(&s, n as u64))
                .ok_or_else(|| Error::Internal("pointed odd step is not integral".into()))?;
            l1 = l1.compose(&AffineMap::new(s, c.clone()));
            moves.push((p.clone(), Move::TranslateDilate { c, r: 2 * r }));
        }
    }
    Ok((f, l1, moves))
}

/// Glues the 2-adic pointed pair with the odd map `x ↦ u₁²x + c₁`.
pub fn assemble_pointed(q0: &ZPoly, p0: &ZPoly, u1: &BigInt, c1: &BigInt, g: usize, mode: AssemblyMode) -> Result<(ZPoly, ZPoly)> {
    let m1 = Mat2 { a: u1 * u1, b: c1.clone(), c: BigInt::zero(), d: BigInt::one() };
    let (q1, p1) = assemble(q0, p0, &m1, &pow(u1, 2 * g as u64 + 1), g, mode)?;
    check_shape(g, &q1, &p1)?;
    Ok((q1, p1))
}

fn exact_sqrt(n: &BigInt) -> Result<BigInt> {
    let r = n.abs().sqrt();
    if &(&r * &r) == n {
        Ok(r)
    } else {
        Err(Error::Internal(format!("composed scale {n} is not a square")))
    }
}

pub fn minimize_pointed(eq: &PointedEquation, prime_hints: &[BigInt]) -> Result<PointedResult> {
    minimize_pointed_with(eq, prime_hints, AssemblyMode::default())
}

pub fn minimize_pointed_with(eq: &PointedEquation, prime_hints: &[BigInt], mode: AssemblyMode) -> Result<PointedResult> {
    let input = eq.equation();
    let g = input.g;
    let two = BigInt::from(2);
    let fac = factorize(&input.discriminant(), prime_hints);
    if !fac.is_complete() {
        return Err(Error::FactorizationIncomplete(fac.cofactor));
    }
    let primes = fac.primes();

    let (q0, p0, l0, even_moves) = if primes.contains(&two) {
        minimize_pointed_even(g, &input.q, &input.p)?
    } else {
        (input.q.clone(), input.p.clone(), AffineMap::identity(), Vec::new())
    };
    let odd_primes: Vec<BigInt> = primes.iter().filter(|p| **p != two).cloned().collect();
    let f0 = &p0.scale(&BigInt::from(4)) + &(&q0 * &q0);
    let (f1, l1, odd_moves) = minimize_pointed_odd(&f0, g, &odd_primes)?;
    let u1 = exact_sqrt(&l1.scale)?;
    let (q1, p1) = assemble_pointed(&q0, &p0, &u1, &l1.shift, g, mode)?;
    if &p1.scale(&BigInt::from(4)) + &(&q1 * &q1) != f1 {
        return Err(Error::Internal("assembled pointed equation does not reproduce the odd model".into()));
    }

    let total = l0.compose(&l1);
    let u = exact_sqrt(&total.scale)?;
    let m = Mat2 { a: total.scale.clone(), b: total.shift.clone(), c: BigInt::zero(), d: BigInt::one() };
    let h = recover_h(input, &m, &pow(&u, 2 * g as u64 + 1), &q1)?;
    let change = AffineChange { u: u.clone(), c: total.shift, h };
    let out = input.apply_change(&change.to_mobius(g))?;
    if out.q != q1 || out.p != p1 {
        return Err(Error::Internal("recovered affine change does not reproduce the pointed equation".into()));
    }
    let delta_min = out.discriminant();
    if delta_min * pow(&u, pointed_threshold(g)) != input.discriminant() {
        return Err(Error::Internal("pointed discriminant law violated".into()));
    }
    let delta_min = factorize(&out.discriminant(), &primes);

    let mut reports = Vec::new();
    for p in &primes {
        let before = fac.exponent(p) as u64;
        let after = delta_min.exponent(p) as u64;
        if after < before && non_minimality_witness(eq, p)?.is_none() {
            return Err(Error::Internal(format!("pointed move at {p} without a witness pair")));
        }
        let moves = if *p == two {
            even_moves.clone()
        } else {
            odd_moves.iter().filter(|(q, _)| q == p).map(|(_, mv)| mv.clone()).collect()
        };
        reports.push(LocalReport { p: p.clone(), epsilon: 0, v_delta_before: before, v_delta_after: after, moves });
    }
    let eq_min = PointedEquation::try_from(out)?;
    Ok(PointedResult { eq_min, change, delta_min, reports })
}

/// Scales a pointed equation by `x = u²·x₁`, `y = u^{2g+1}·y₁` in reverse,
/// i.e. returns the equation whose pointed-minimal model at the primes of
/// `u` is the input.
pub fn scale_pointed(eq: &PointedEquation, u: &BigInt) -> Result<PointedEquation> {
    let e = eq.equation();
    let g = e.g;
    let u2 = u * u;
    let q = ZPoly::new(
        e.q.coeffs().iter().enumerate().map(|(i, a)| a * pow(u, 2 * g as u64 + 1 - 2 * i as u64)).collect(),
    );
    let p = ZPoly::new(
        e.p.coeffs().iter().enumerate().map(|(i, a)| a * pow(&u2, 2 * g as u64 + 1 - i as u64)).collect(),
    );
    PointedEquation::new(g, q, p)
}
