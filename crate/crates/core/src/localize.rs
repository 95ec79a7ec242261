//! Per-prime machinery: normalization, the multiplicity `λ` of a point of
//! the special fiber, candidate search, dilatation and the local
//! minimality and uniqueness criteria.
//!
//! At `p = 2` a model is a pair `(Q, P)` in normal form: `v(Q) = 0`, or
//! `v(Q) > 0` with `P̄` not a square, or `v(Q) > 0` with `v(P) = 1`. At an
//! odd prime only `F = 4P + Q²` matters and normality means `v(F) ≤ 1`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{largest_odd_square_divisor, pow, val_p, ExtNat};
use crate::curve::WeierstrassEquation;
use crate::fppoly::{is_in_k_x2, reduce_mod, roots_with_mult_at_least, sqrt_poly_f2};
use crate::zpoly::ZPoly;
use crate::{Error, Result};

/// A rational point of the special fiber, identified by its `x`-coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Finite(BigInt),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(c) => write!(f, "x = {c}"),
            Point::Infinity => write!(f, "infinity"),
        }
    }
}

/// One step taken by a local driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// `y ↦ y − H` removing a square from `P̄`.
    CompleteSquare { h: ZPoly },
    /// Division of the whole equation by `p^r` (`y ↦ p^r·y`).
    Rescale { r: u64 },
    /// `x ↦ p·x + c` followed by division by `p^r`.
    TranslateDilate { c: BigInt, r: u64 },
    /// Dilatation at the pole of `x`: `x ↦ 1/(p·x)` and division by `p^r`.
    InfinitySwap { r: u64 },
}

/// Per-prime summary of what a driver did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalReport {
    pub p: BigInt,
    pub epsilon: u8,
    pub v_delta_before: u64,
    pub v_delta_after: u64,
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MinimalityStatus {
    Minimal,
    MinimalUnique,
    NotMinimal,
}

/// Why a model is not minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A point whose multiplicity is too large.
    Point { point: Point, lambda: u64 },
    /// The model was not normal; normalizing lowered `v(Δ)` by this much.
    Normalization { v_drop: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityVerdict {
    pub status: MinimalityStatus,
    pub witness: Option<Witness>,
}

/// Output of [`normalize_even`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenNormalization {
    pub q: ZPoly,
    pub p: ZPoly,
    pub e0: BigInt,
    pub epsilon: u8,
    pub moves: Vec<Move>,
}

fn two() -> BigInt {
    BigInt::from(2)
}

fn val_poly(h: &ZPoly, p: &BigInt) -> ExtNat {
    h.gauss_val(p)
}

/// Whether `(Q, P)` satisfies the normal-form conditions at 2.
pub fn is_normal_form_even(q: &ZPoly, p: &ZPoly) -> bool {
    let two = two();
    let vq = val_poly(q, &two);
    let vp = val_poly(p, &two);
    if vq == ExtNat::Finite(0) {
        return true;
    }
    match vp {
        ExtNat::Finite(0) => !is_in_k_x2(&reduce_mod(p, &two)).unwrap(),
        ExtNat::Finite(1) => true,
        _ => false,
    }
}

/// Normalizes `(Q, P)` at 2, multiplying `e₀` by the total rescaling.
pub fn normalize_even(q: &ZPoly, p: &ZPoly, e0: &BigInt) -> Result<EvenNormalization> {
    let two = two();
    let (mut q, mut p, mut e0) = (q.clone(), p.clone(), e0.clone());
    let mut moves = Vec::new();
    loop {
        let vq = val_poly(&q, &two);
        let vp = val_poly(&p, &two);
        if vq == ExtNat::Finite(0) {
            break;
        }
        match vp {
            ExtNat::Finite(0) => {
                let pbar = reduce_mod(&p, &two);
                if !is_in_k_x2(&pbar)? {
                    break;
                }
                let h = ZPoly::new(sqrt_poly_f2(&pbar)?.coeffs().to_vec());
                let p_new = &(&p + &(&q * &h)) - &(&h * &h);
                q = &q - &h.scale(&two);
                p = p_new;
                moves.push(Move::CompleteSquare { h });
            }
            ExtNat::Finite(1) => break,
            ExtNat::Infinity if vq == ExtNat::Infinity => return Err(Error::SingularCurve),
            _ => {
                let m = std::cmp::min(double(vq), vp).unwrap();
                let r = m / 2;
                let k = pow(&two, r);
                q = q.div_exact_scalar(&k).expect("v(Q) >= r");
                p = p.div_exact_scalar(&(&k * &k)).expect("v(P) >= 2r");
                e0 *= &k;
                moves.push(Move::Rescale { r });
            }
        }
    }
    let epsilon = std::cmp::min(val_poly(&q, &two), val_poly(&p, &two)).unwrap() as u8;
    Ok(EvenNormalization { q, p, e0, epsilon, moves })
}

/// Divides `F` by the largest odd square dividing its content.
pub fn normalize_odd(f: &ZPoly, hints: &[BigInt]) -> Result<(ZPoly, BigInt)> {
    let cont = f.content();
    if cont.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let s = largest_odd_square_divisor(&cont, hints)?;
    let f1 = f.div_exact_scalar(&(&s * &s)).expect("s^2 divides the content");
    Ok((f1, s))
}

/// `2·μ` on extended naturals.
fn double(m: ExtNat) -> ExtNat {
    match m {
        ExtNat::Finite(v) => ExtNat::Finite(2 * v),
        ExtNat::Infinity => ExtNat::Infinity,
    }
}

/// Multiplicity `λ` at `x ≡ c (mod 2)` together with a pair `(Q′, P′)`
/// equivalent to `(Q, P)` on which `λ = min{2μ_c(Q′), μ_c(P′)}`.
pub fn lambda_even(q: &ZPoly, p: &ZPoly, c: &BigInt, g: usize) -> Result<(u64, ZPoly, ZPoly)> {
    let two = two();
    let (mut q, mut p) = (q.clone(), p.clone());
    for _ in 0..(4 * g + 8) {
        let mq = q.mu_c(c, &two);
        let mp = p.mu_c(c, &two);
        let lambda = if double(mq) <= mp {
            Some(double(mq))
        } else if mp.unwrap() % 2 == 1 {
            Some(mp)
        } else {
            let shifted = p.taylor_shift(c);
            let target = mp.unwrap();
            let odd_hit = shifted
                .coeffs()
                .iter()
                .enumerate()
                .any(|(i, a)| i % 2 == 1 && val_p(a, &two) + i as u64 == mp);
            if odd_hit {
                Some(mp)
            } else {
                let r = target / 2;
                let mut h2 = vec![BigInt::zero(); r as usize + 1];
                for (i, a) in shifted.coeffs().iter().enumerate().step_by(2) {
                    if val_p(a, &two) + i as u64 == mp {
                        h2[i / 2] = pow(&two, r - (i / 2) as u64);
                    }
                }
                let h2 = ZPoly::new(h2).taylor_shift(&-c);
                let p_new = &(&p + &(&q * &h2)) - &(&h2 * &h2);
                q = &q - &h2.scale(&two);
                p = p_new;
                None
            }
        };
        if let Some(l) = lambda {
            let l = l.finite().ok_or_else(|| Error::Internal("infinite multiplicity".into()))?;
            if l > 2 * g as u64 + 3 {
                return Err(Error::Internal(format!("multiplicity {l} exceeds 2g + 3")));
            }
            return Ok((l, q, p));
        }
    }
    Err(Error::Internal("multiplicity search did not terminate".into()))
}

/// `λ = μ_c(F)` at an odd prime.
pub fn lambda_odd(f: &ZPoly, c: &BigInt, p: &BigInt) -> u64 {
    f.mu_c(c, p).finite().expect("F is nonzero")
}

/// Whether a point of multiplicity `λ` is compatible with minimality.
pub fn lambda_ok(lambda: u64, epsilon: u8, g: usize) -> bool {
    let g = g as u64;
    if lambda <= g + 1 {
        true
    } else if g % 2 == 0 || lambda >= g + 3 {
        false
    } else {
        epsilon == 1
    }
}

fn ceil_half(n: u64) -> u64 {
    n.div_ceil(2)
}

/// Necessary condition at 2 for the point over `c̄` to have `λ ≥ bound`.
fn c_ok_even_bound(q: &ZPoly, p: &ZPoly, c: &BigInt, bound: u64) -> bool {
    let two = two();
    let qbar = reduce_mod(q, &two);
    if !qbar.is_zero() {
        return qbar.ord_at(c) >= ExtNat::Finite(ceil_half(bound));
    }
    let pbar = reduce_mod(p, &two);
    if !pbar.is_zero() {
        return pbar.derivative().ord_at(c) >= ExtNat::Finite(bound.saturating_sub(1));
    }
    let q2 = reduce_mod(&q.div_exact_scalar(&two).expect("v(Q) >= 1"), &two);
    let p2 = reduce_mod(&p.div_exact_scalar(&two).expect("v(P) >= 1"), &two);
    q2.ord_at(c) >= ExtNat::Finite(ceil_half(bound).saturating_sub(1))
        && p2.ord_at(c) >= ExtNat::Finite(bound.saturating_sub(1))
}

fn epsilon_even(q: &ZPoly, p: &ZPoly) -> u8 {
    let two = two();
    std::cmp::min(val_poly(q, &two), val_poly(p, &two)).finite().unwrap_or(0).min(1) as u8
}

/// `ε` and the residues `c̄ ∈ {0, 1}` over which `λ ≥ g + 2` is possible.
pub fn find_c_even(q: &ZPoly, p: &ZPoly, g: usize) -> (u8, Vec<BigInt>) {
    find_c_even_bound(q, p, g as u64 + 2)
}

/// As [`find_c_even`] for the threshold `λ ≥ bound`.
pub fn find_c_even_bound(q: &ZPoly, p: &ZPoly, bound: u64) -> (u8, Vec<BigInt>) {
    let cands = [BigInt::zero(), BigInt::one()]
        .into_iter()
        .filter(|c| c_ok_even_bound(q, p, c, bound))
        .collect();
    (epsilon_even(q, p), cands)
}

/// `ε = v_p(F)` and the residues over which `λ ≥ g + 2` is possible.
pub fn find_c_odd(f: &ZPoly, p: &BigInt, g: usize) -> Result<(u8, Vec<BigInt>)> {
    find_c_odd_bound(f, p, g as u64 + 2)
}

/// As [`find_c_odd`] for the threshold `λ ≥ bound`.
pub fn find_c_odd_bound(f: &ZPoly, p: &BigInt, bound: u64) -> Result<(u8, Vec<BigInt>)> {
    let eps = match val_poly(f, p) {
        ExtNat::Finite(v) if v <= 1 => v,
        ExtNat::Infinity => return Err(Error::ZeroPolynomial),
        _ => return Err(Error::NotNormalized(p.clone())),
    };
    let reduced = reduce_mod(&f.div_exact_scalar(&pow(p, eps)).unwrap(), p);
    let m = bound.saturating_sub(eps).max(1) as usize;
    Ok((eps as u8, roots_with_mult_at_least(&reduced, m)?))
}

/// Whether the pole of `x` may have `λ ≥ g + 2` (the candidate test at 0
/// applied to the chart at infinity).
pub fn c_ok_infinity(q: &ZPoly, p: &ZPoly, g: usize) -> bool {
    let qi = q.reverse(g + 1).expect("deg Q <= g + 1");
    let pi = p.reverse(2 * g + 2).expect("deg P <= 2g + 2");
    c_ok_even_bound(&qi, &pi, &BigInt::zero(), g as u64 + 2)
}

/// Dilatation at `x ≡ c`: `Q₁ = p^{−r}Q(p·x + c)`, `P₁ = p^{−2r}P(p·x + c)`
/// with `r = ⌊λ/2⌋`. `(Q, P)` must attain `λ`.
pub fn dilate(q: &ZPoly, p: &ZPoly, c: &BigInt, lambda: u64, prime: &BigInt) -> Result<(ZPoly, ZPoly)> {
    let r = lambda / 2;
    let k = pow(prime, r);
    let q1 = q.compose_affine(prime, c).div_exact_scalar(&k);
    let p1 = p.compose_affine(prime, c).div_exact_scalar(&(&k * &k));
    match (q1, p1) {
        (Some(q1), Some(p1)) => Ok((q1, p1)),
        _ => Err(Error::Internal("dilatation: lambda not attained".into())),
    }
}

/// `ε` of an equation normalized at `p`.
pub fn epsilon_of(eq: &WeierstrassEquation, p: &BigInt) -> Result<u8> {
    if *p == two() {
        if !is_normal_form_even(&eq.q, &eq.p) {
            return Err(Error::NotNormalized(p.clone()));
        }
        Ok(epsilon_even(&eq.q, &eq.p))
    } else {
        match val_poly(&eq.f(), p) {
            ExtNat::Finite(v) if v <= 1 => Ok(v as u8),
            _ => Err(Error::NotNormalized(p.clone())),
        }
    }
}

/// A model normalized at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalModel {
    Even { q: ZPoly, p: ZPoly },
    Odd { prime: BigInt, f: ZPoly },
}

impl LocalModel {
    /// The local model of an equation that is already normal at `prime`.
    pub fn from_equation(eq: &WeierstrassEquation, prime: &BigInt) -> Result<LocalModel> {
        epsilon_of(eq, prime)?;
        Ok(if *prime == two() {
            LocalModel::Even { q: eq.q.clone(), p: eq.p.clone() }
        } else {
            LocalModel::Odd { prime: prime.clone(), f: eq.f() }
        })
    }

    /// Normalizes `eq` at `prime`; also returns how much `v(Δ)` dropped.
    pub fn normalize(eq: &WeierstrassEquation, prime: &BigInt) -> Result<(LocalModel, u64)> {
        let g = eq.g as u64;
        if *prime == two() {
            let n = normalize_even(&eq.q, &eq.p, &BigInt::one())?;
            let r = val_p(&n.e0, prime).unwrap();
            Ok((LocalModel::Even { q: n.q, p: n.p }, 4 * r * (2 * g + 1)))
        } else {
            let f = eq.f();
            let v = val_poly(&f, prime).finite().ok_or(Error::SingularCurve)?;
            let k = v / 2;
            let f1 = f.div_exact_scalar(&pow(prime, 2 * k)).unwrap();
            Ok((LocalModel::Odd { prime: prime.clone(), f: f1 }, 4 * k * (2 * g + 1)))
        }
    }

    pub fn prime(&self) -> BigInt {
        match self {
            LocalModel::Even { .. } => two(),
            LocalModel::Odd { prime, .. } => prime.clone(),
        }
    }

    pub fn epsilon(&self) -> u8 {
        match self {
            LocalModel::Even { q, p } => epsilon_even(q, p),
            LocalModel::Odd { prime, f } => val_poly(f, prime).unwrap() as u8,
        }
    }

    /// The model as an equation `y² + Q·y = P` (`Q = 0`, `P = F` at odd primes).
    pub fn as_pair(&self) -> (ZPoly, ZPoly) {
        match self {
            LocalModel::Even { q, p } => (q.clone(), p.clone()),
            LocalModel::Odd { f, .. } => (ZPoly::zero(), f.clone()),
        }
    }

    fn chart(&self, g: usize) -> LocalModel {
        match self {
            LocalModel::Even { q, p } => LocalModel::Even {
                q: q.reverse(g + 1).expect("deg Q <= g + 1"),
                p: p.reverse(2 * g + 2).expect("deg P <= 2g + 2"),
            },
            LocalModel::Odd { prime, f } => {
                LocalModel::Odd { prime: prime.clone(), f: f.reverse(2 * g + 2).expect("deg F <= 2g + 2") }
            }
        }
    }

    /// `λ` at the finite point over `c̄`, with a pair attaining it.
    fn lambda_finite(&self, c: &BigInt, g: usize) -> Result<(u64, LocalModel)> {
        match self {
            LocalModel::Even { q, p } => {
                let (l, q1, p1) = lambda_even(q, p, c, g)?;
                Ok((l, LocalModel::Even { q: q1, p: p1 }))
            }
            LocalModel::Odd { prime, f } => Ok((lambda_odd(f, c, prime), self.clone())),
        }
    }

    /// `λ` at `point`.
    pub fn lambda_at(&self, point: &Point, g: usize) -> Result<u64> {
        match point {
            Point::Finite(c) => Ok(self.lambda_finite(c, g)?.0),
            Point::Infinity => Ok(self.chart(g).lambda_finite(&BigInt::zero(), g)?.0),
        }
    }

    /// Finite residues that pass the candidate test for `λ ≥ bound`, ascending.
    pub fn finite_candidates(&self, bound: u64) -> Result<Vec<BigInt>> {
        match self {
            LocalModel::Even { q, p } => Ok(find_c_even_bound(q, p, bound).1),
            LocalModel::Odd { prime, f } => Ok(find_c_odd_bound(f, prime, bound)?.1),
        }
    }

    /// Whether the pole of `x` passes the candidate test for `λ ≥ bound`.
    pub fn infinity_candidate(&self, g: usize, bound: u64) -> Result<bool> {
        let chart = self.chart(g);
        Ok(chart.finite_candidates(bound)?.contains(&BigInt::zero()))
    }

    /// Every point (finite ones ascending, then infinity) with `λ ≥ bound`.
    pub fn points_with_lambda_at_least(&self, g: usize, bound: u64, with_infinity: bool) -> Result<Vec<(Point, u64)>> {
        let mut out = Vec::new();
        for c in self.finite_candidates(bound)? {
            let l = self.lambda_finite(&c, g)?.0;
            if l >= bound {
                out.push((Point::Finite(c), l));
            }
        }
        if with_infinity && self.infinity_candidate(g, bound)? {
            let l = self.lambda_at(&Point::Infinity, g)?;
            if l >= bound {
                out.push((Point::Infinity, l));
            }
        }
        Ok(out)
    }

    /// The model `W(p₀)` obtained by dilatation at `point`, and `r = ⌊λ/2⌋`.
    pub fn dilate_at(&self, point: &Point, g: usize) -> Result<(LocalModel, u64)> {
        let (base, c) = match point {
            Point::Finite(c) => (self.clone(), c.clone()),
            Point::Infinity => (self.chart(g), BigInt::zero()),
        };
        let (l, attained) = base.lambda_finite(&c, g)?;
        let prime = self.prime();
        let model = match attained {
            LocalModel::Even { q, p } => {
                let (q1, p1) = dilate(&q, &p, &c, l, &prime)?;
                LocalModel::Even { q: q1, p: p1 }
            }
            LocalModel::Odd { f, .. } => {
                let (_, f1) = dilate(&ZPoly::zero(), &f, &c, l, &prime)?;
                LocalModel::Odd { prime: prime.clone(), f: f1 }
            }
        };
        if model.epsilon() as u64 != l % 2 {
            return Err(Error::Internal("dilatation changed epsilon unexpectedly".into()));
        }
        Ok((model, l / 2))
    }
}

fn verdict(status: MinimalityStatus, witness: Option<Witness>) -> MinimalityVerdict {
    MinimalityVerdict { status, witness }
}

/// Minimality of a normal local model (`Minimal` or `NotMinimal`).
pub fn minimality_of_model(model: &LocalModel, g: usize) -> Result<MinimalityVerdict> {
    let gb = g as u64;
    let big = model.points_with_lambda_at_least(g, gb + 2, true)?;
    let Some((point, lambda)) = big.first().cloned() else {
        return Ok(verdict(MinimalityStatus::Minimal, None));
    };
    let not_minimal = |point: Point, lambda: u64| verdict(MinimalityStatus::NotMinimal, Some(Witness::Point { point, lambda }));
    if g % 2 == 0 {
        return Ok(not_minimal(point, lambda));
    }
    if let Some((pt, l)) = big.iter().find(|(_, l)| *l >= gb + 3) {
        return Ok(not_minimal(pt.clone(), *l));
    }
    if model.epsilon() == 1 {
        return Ok(verdict(MinimalityStatus::Minimal, None));
    }
    // λ = g + 2 with ε = 0: W has the discriminant of W(p₀), which has ε = 1.
    let (w1, _) = model.dilate_at(&point, g)?;
    if w1.epsilon() != 1 {
        return Err(Error::Internal("dilatation at lambda = g + 2 did not give epsilon = 1".into()));
    }
    let deeper = w1.points_with_lambda_at_least(g, gb + 3, false)?;
    if deeper.is_empty() {
        Ok(verdict(MinimalityStatus::Minimal, None))
    } else {
        Ok(not_minimal(point, lambda))
    }
}

/// Uniqueness of a normal local model already known to be minimal.
pub fn uniqueness_of_model(model: &LocalModel, g: usize) -> Result<bool> {
    let gb = g as u64;
    let big = model.points_with_lambda_at_least(g, gb + 1, true)?;
    if big.is_empty() {
        return Ok(true);
    }
    if g % 2 == 1 {
        return Ok(false);
    }
    if model.epsilon() == 1 {
        return Ok(true);
    }
    for (point, _) in &big {
        let (w1, _) = model.dilate_at(point, g)?;
        if !w1.points_with_lambda_at_least(g, gb + 2, false)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimality criterion for an equation already normal at `p`.
pub fn is_minimal_at(eq: &WeierstrassEquation, p: &BigInt) -> Result<MinimalityVerdict> {
    minimality_of_model(&LocalModel::from_equation(eq, p)?, eq.g)
}

/// Uniqueness criterion for an equation normal and minimal at `p`.
pub fn is_unique_minimal_at(eq: &WeierstrassEquation, p: &BigInt) -> Result<bool> {
    let model = LocalModel::from_equation(eq, p)?;
    if minimality_of_model(&model, eq.g)?.status == MinimalityStatus::NotMinimal {
        return Err(Error::InvalidArgument("uniqueness asked for a non-minimal model".into()));
    }
    uniqueness_of_model(&model, eq.g)
}

/// Full local verdict for any valid equation: normalizes at `p` first, then
/// applies the minimality and uniqueness criteria.
pub fn local_verdict(eq: &WeierstrassEquation, p: &BigInt) -> Result<MinimalityVerdict> {
    let (model, v_drop) = LocalModel::normalize(eq, p)?;
    if v_drop > 0 {
        return Ok(verdict(MinimalityStatus::NotMinimal, Some(Witness::Normalization { v_drop })));
    }
    let v = minimality_of_model(&model, eq.g)?;
    if v.status == MinimalityStatus::NotMinimal {
        return Ok(v);
    }
    if uniqueness_of_model(&model, eq.g)? {
        Ok(verdict(MinimalityStatus::MinimalUnique, None))
    } else {
        Ok(v)
    }
}

/// Early-exit bound: `v_p(Δ)` below it forces minimality at `p`.
pub fn minimality_threshold(g: usize) -> u64 {
    let g = g as u64;
    if g % 2 == 0 {
        2 * (2 * g + 1)
    } else {
        4 * (2 * g + 1)
    }
}

/// `v_p` of the discriminant of `y² + Q·y = P` (any integral pair of valid degrees).
pub fn v_disc(g: usize, q: &ZPoly, p: &ZPoly, prime: &BigInt) -> Result<u64> {
    let eq = WeierstrassEquation { g, q: q.clone(), p: p.clone() };
    if eq.f().poly_discriminant()?.is_zero() {
        return Err(Error::SingularCurve);
    }
    val_p(&eq.discriminant(), prime).finite().ok_or(Error::SingularCurve)
}
