//! Global minimization: the pass at 2, the pass at odd primes, assembly of
//! the two local answers into one integral equation, and recovery of the
//! full change of variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{factorize, inv_mod, pow, val_p, FactoredInteger};
use crate::curve::{recover_h, MobiusChange, WeierstrassEquation};
use crate::localize::{
    c_ok_infinity, dilate, find_c_even, find_c_odd, lambda_even, lambda_ok, minimality_of_model, minimality_threshold,
    normalize_even, normalize_odd, v_disc, LocalModel, LocalReport, MinimalityStatus, Move,
};
use crate::zpoly::{Mat2, ZPoly};
use crate::{Error, Result};

/// How the 2-adic and odd answers are glued together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssemblyMode {
    /// `t = 1`: keeps `Q₁` equal to the substituted `Q₀`.
    #[default]
    SmallT,
    /// `m` with `4m ≡ 1 (mod e₁)`.
    ExactM,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizationResult {
    pub eq_min: WeierstrassEquation,
    pub change: MobiusChange,
    pub delta_min: FactoredInteger,
    pub reports: Vec<LocalReport>,
}

/// Result of the pass at 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenStage {
    pub q: ZPoly,
    pub p: ZPoly,
    pub m0: Mat2,
    pub e0: BigInt,
    pub moves: Vec<Move>,
}

/// Result of the pass at odd primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddStage {
    pub f: ZPoly,
    pub m1: Mat2,
    pub e1: BigInt,
    pub moves: Vec<(BigInt, Move)>,
}

fn iteration_guard(steps: &mut u64, bound: u64) -> Result<()> {
    *steps += 1;
    if *steps > bound {
        return Err(Error::Internal("minimization did not terminate within the valuation bound".into()));
    }
    Ok(())
}

/// Minimizes at 2. Returns the input unchanged when `2 ∤ Δ`.
pub fn minimize_even(eq: &WeierstrassEquation) -> Result<EvenStage> {
    let g = eq.g;
    let two = BigInt::from(2);
    let mut stage = EvenStage {
        q: eq.q.clone(),
        p: eq.p.clone(),
        m0: Mat2::identity(),
        e0: BigInt::one(),
        moves: Vec::new(),
    };
    let v_start = v_disc(g, &eq.q, &eq.p, &two)?;
    if v_start == 0 {
        return Ok(stage);
    }
    let n = normalize_even(&eq.q, &eq.p, &BigInt::one())?;
    stage.q = n.q;
    stage.p = n.p;
    stage.e0 = n.e0;
    stage.moves = n.moves;
    if v_disc(g, &stage.q, &stage.p, &two)? < minimality_threshold(g) {
        return Ok(stage);
    }

    if c_ok_infinity(&stage.q, &stage.p, g) {
        let qi = stage.q.reverse(g + 1)?;
        let pi = stage.p.reverse(2 * g + 2)?;
        let (lambda, qi, pi) = lambda_even(&qi, &pi, &BigInt::zero(), g)?;
        if !lambda_ok(lambda, n.epsilon, g) {
            let r = lambda / 2;
            let (q1, p1) = dilate(&qi, &pi, &BigInt::zero(), lambda, &two)?;
            stage.q = q1;
            stage.p = p1;
            stage.e0 *= pow(&two, r);
            stage.m0 = &stage.m0 * &Mat2::new(0, 1, 2, 0);
            stage.moves.push(Move::InfinitySwap { r });
        }
    }

    let mut steps = 0;
    'outer: loop {
        let (eps, cands) = find_c_even(&stage.q, &stage.p, g);
        for c in cands {
            let (lambda, q, p) = lambda_even(&stage.q, &stage.p, &c, g)?;
            if lambda_ok(lambda, eps, g) {
                continue;
            }
            iteration_guard(&mut steps, v_start + 1)?;
            let r = lambda / 2;
            let (q1, p1) = dilate(&q, &p, &c, lambda, &two)?;
            stage.q = q1;
            stage.p = p1;
            stage.e0 *= pow(&two, r);
            stage.m0 = &stage.m0 * &Mat2 { a: two.clone(), b: c.clone(), c: BigInt::zero(), d: BigInt::one() };
            stage.moves.push(Move::TranslateDilate { c, r });
            continue 'outer;
        }
        break;
    }

    let model = LocalModel::Even { q: stage.q.clone(), p: stage.p.clone() };
    if minimality_of_model(&model, g)?.status == MinimalityStatus::NotMinimal {
        return Err(Error::Internal("pass at 2 ended on a non-minimal model (pole of x not re-examined)".into()));
    }
    Ok(stage)
}

/// Minimizes `y² = F` at each prime of `odd_primes`, after removing the
/// largest odd square from the content.
pub fn minimize_odd(f: &ZPoly, g: usize, odd_primes: &[BigInt], hints: &[BigInt]) -> Result<OddStage> {
    let (mut f, s) = normalize_odd(f, hints)?;
    let mut stage = OddStage { f: ZPoly::zero(), m1: Mat2::identity(), e1: s.clone(), moves: Vec::new() };
    for p in odd_primes {
        let r = val_p(&s, p).finite().unwrap_or(0);
        if r > 0 {
            stage.moves.push((p.clone(), Move::Rescale { r }));
        }
    }
    for p in odd_primes {
        let v_start = v_disc(g, &ZPoly::zero(), &f, p)?;
        if v_start < minimality_threshold(g) {
            continue;
        }
        let eps = f.gauss_val(p).unwrap();
        let reduced = crate::fppoly::reduce_mod(&f.div_exact_scalar(&pow(p, eps)).unwrap(), p);
        if reduced.degree().unwrap_or(0) < g + 1 + eps as usize {
            let rev = f.reverse(2 * g + 2)?;
            let lambda = rev.mu_c(&BigInt::zero(), p).unwrap();
            if !lambda_ok(lambda, eps as u8, g) {
                let r = lambda / 2;
                f = dilate(&ZPoly::zero(), &rev, &BigInt::zero(), lambda, p)?.1;
                stage.e1 *= pow(p, r);
                stage.m1 = &stage.m1 * &Mat2 { a: BigInt::zero(), b: BigInt::one(), c: p.clone(), d: BigInt::zero() };
                stage.moves.push((p.clone(), Move::InfinitySwap { r }));
            }
        }
        let mut steps = 0;
        'outer: loop {
            let (eps, cands) = find_c_odd(&f, p, g)?;
            for c in cands {
                let lambda = f.mu_c(&c, p).unwrap();
                if lambda_ok(lambda, eps, g) {
                    continue;
                }
                iteration_guard(&mut steps, v_start + 1)?;
                let r = lambda / 2;
                f = dilate(&ZPoly::zero(), &f, &c, lambda, p)?.1;
                stage.e1 *= pow(p, r);
                stage.m1 = &stage.m1 * &Mat2 { a: p.clone(), b: c.clone(), c: BigInt::zero(), d: BigInt::one() };
                stage.moves.push((p.clone(), Move::TranslateDilate { c, r }));
                continue 'outer;
            }
            break;
        }
        let model = LocalModel::Odd { prime: p.clone(), f: f.clone() };
        if minimality_of_model(&model, g)?.status == MinimalityStatus::NotMinimal {
            return Err(Error::Internal(format!("pass at {p} ended on a non-minimal model (pole of x not re-examined)")));
        }
    }
    stage.f = f;
    Ok(stage)
}

/// Glues the 2-minimal pair `(Q₀, P₀)` with the odd change `(M₁, e₁)`.
///
/// The result is equivalent to `(Q₀, P₀)` at 2 and to `z² = F₁` at odd primes,
/// where `F₁ = e₁⁻²·(c₁x + d₁)^{2g+2}·F₀(M₁x)`.
pub fn assemble(q0: &ZPoly, p0: &ZPoly, m1: &Mat2, e1: &BigInt, g: usize, mode: AssemblyMode) -> Result<(ZPoly, ZPoly)> {
    if e1.is_even() || m1.det().is_even() {
        return Err(Error::Internal("assembly needs odd e1 and odd det M1".into()));
    }
    let qt = q0.mobius_substitute(m1, g + 1)?;
    let pt = p0.mobius_substitute(m1, 2 * g + 2)?;
    let q2 = &qt * &qt;
    let e2 = e1 * e1;
    let (q1, k) = match mode {
        AssemblyMode::SmallT => (qt.clone(), (BigInt::one() - &e2) / 4),
        AssemblyMode::ExactM => {
            let n = e1.abs();
            let m = if n.is_one() { BigInt::zero() } else { inv_mod(&BigInt::from(4), &n)? };
            let num = qt.scale(&(BigInt::one() - 4 * &m));
            let q1 = num.div_exact_scalar(e1).ok_or_else(|| Error::Internal("assembly: (1 - 4m) Q not divisible by e1".into()))?;
            (q1, 2 * &m - 4 * &m * &m)
        }
    };
    let p1 = (&pt + &q2.scale(&k))
        .div_exact_scalar(&e2)
        .ok_or_else(|| Error::Internal("assembly: P1 is not integral".into()))?;
    Ok((q1, p1))
}

/// Minimal equation, change of variables and factored minimal discriminant.
pub fn minimize(eq: &WeierstrassEquation, prime_hints: &[BigInt]) -> Result<MinimizationResult> {
    minimize_with(eq, prime_hints, AssemblyMode::default())
}

pub fn minimize_with(eq: &WeierstrassEquation, prime_hints: &[BigInt], mode: AssemblyMode) -> Result<MinimizationResult> {
    let g = eq.g;
    let delta = eq.discriminant();
    let fac = factorize(&delta, prime_hints);
    if !fac.is_complete() {
        return Err(Error::FactorizationIncomplete(fac.cofactor));
    }
    let primes = fac.primes();
    let two = BigInt::from(2);

    let even = if primes.contains(&two) {
        minimize_even(eq)?
    } else {
        EvenStage { q: eq.q.clone(), p: eq.p.clone(), m0: Mat2::identity(), e0: BigInt::one(), moves: Vec::new() }
    };
    let odd_primes: Vec<BigInt> = primes.iter().filter(|p| **p != two).cloned().collect();
    let (q1, p1, m1, e1, odd_moves) = if odd_primes.is_empty() {
        (even.q.clone(), even.p.clone(), Mat2::identity(), BigInt::one(), Vec::new())
    } else {
        let f0 = &even.p.scale(&BigInt::from(4)) + &(&even.q * &even.q);
        let odd = minimize_odd(&f0, g, &odd_primes, &primes)?;
        let (q1, p1) = assemble(&even.q, &even.p, &odd.m1, &odd.e1, g, mode)?;
        let f1 = &p1.scale(&BigInt::from(4)) + &(&q1 * &q1);
        if f1 != odd.f {
            return Err(Error::Internal("assembled equation does not reproduce the odd model".into()));
        }
        (q1, p1, odd.m1, odd.e1, odd.moves)
    };

    let m = &even.m0 * &m1;
    let e = &even.e0 * &e1;
    let h = recover_h(eq, &m, &e, &q1)?;
    let change = MobiusChange { m, e, h };
    let eq_min = eq.apply_change(&change)?;
    if eq_min.q != q1 || eq_min.p != p1 {
        return Err(Error::Internal("recovered change does not reproduce the minimal equation".into()));
    }
    let delta_min = eq_min.discriminant();
    let delta_min_f = factorize(&delta_min, &primes);
    if !delta_min_f.is_complete() {
        return Err(Error::Internal("minimal discriminant has a prime not dividing the input discriminant".into()));
    }

    let mut reports = Vec::new();
    for p in &primes {
        let moves: Vec<Move> = if *p == two {
            even.moves.clone()
        } else {
            odd_moves.iter().filter(|(q, _)| q == p).map(|(_, mv)| mv.clone()).collect()
        };
        let (model, _) = LocalModel::normalize(&eq_min, p)?;
        reports.push(LocalReport {
            p: p.clone(),
            epsilon: model.epsilon(),
            v_delta_before: fac.exponent(p) as u64,
            v_delta_after: delta_min_f.exponent(p) as u64,
            moves,
        });
    }
    Ok(MinimizationResult { eq_min, change, delta_min: delta_min_f, reports })
}
