//! Brute-force verifiers, kept independent of the production drivers.
//!
//! `bfs_local_min` enumerates every model reachable by at most `depth`
//! translate-dilate or infinity moves. Such models correspond to lattices
//! `(p^α, b; 0, p^δ)` with `α + δ ≤ depth`, `0 ≤ b < p^α` and the lattice
//! primitive. For each one the best rescaling of `y` is found directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{MobiusChange, WeierstrassEquation};
use crate::zpoly::{Mat2, ZPoly};
use crate::{Error, Result};

/// Largest prime accepted by [`bfs_local_min`].
pub const MAX_ORACLE_PRIME: u64 = 97;
/// Largest depth accepted by [`bfs_local_min`].
pub const MAX_ORACLE_DEPTH: u32 = 4;
/// Number of lattices examined before giving up.
pub const ORACLE_NODE_BUDGET: usize = 200_000;

/// Local state of an explored model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeState {
    /// `(Q, P)` at `p = 2`.
    Pair { q: ZPoly, p: ZPoly },
    /// `F` with `y² = F/4` at an odd prime.
    Odd { f: ZPoly },
}

/// A model found by the search together with the change producing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveNode {
    pub state: NodeState,
    pub v: u64,
    /// Composite change from the input: `x = (a·x₁ + b)/d`, `y` scaled by `e`.
    pub change: MobiusChange,
}

fn val(n: &BigInt, p: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Some(k);
        }
        n = q;
        k += 1;
    }
}

fn content_val(cs: &[BigInt], p: &BigInt) -> Option<u64> {
    cs.iter().filter_map(|a| val(a, p)).min()
}

fn ipow(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow(b.clone(), e as usize)
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn poly_scale(a: &[BigInt], k: &BigInt) -> Vec<BigInt> {
    a.iter().map(|x| x * k).collect()
}

/// `Σ aᵢ·(s·x + t)^i·d^{n−i}`
fn homogenized(coeffs: &[BigInt], n: usize, s: &BigInt, t: &BigInt, d: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut lin_pow = vec![BigInt::one()];
    let lin = vec![t.clone(), s.clone()];
    for (i, a) in coeffs.iter().enumerate() {
        if !a.is_zero() {
            let term = poly_scale(&lin_pow, &(a * ipow(d, (n - i) as u64)));
            out = poly_add(&out, &term);
        }
        lin_pow = poly_mul(&lin_pow, &lin);
    }
    out
}

/// Lattices `(α, δ, b)` at distance exactly `k` from the root.
fn lattices(p: &BigInt, k: u32) -> Vec<(u32, u32, BigInt)> {
    let mut out = Vec::new();
    for alpha in 0..=k {
        let delta = k - alpha;
        let bound = ipow(p, alpha as u64);
        let mut b = BigInt::zero();
        while b < bound {
            if alpha == 0 || delta == 0 || !b.is_multiple_of(p) {
                out.push((alpha, delta, b.clone()));
            }
            b += 1;
        }
    }
    out
}

/// Valid `H mod 2^k` for `Q + 2H ≡ 0 (2^k)` and `P − QH − H² ≡ 0 (2^{2k})`,
/// extended one binary digit at a time. Returns the largest `k` reached and
/// one witness `H`.
fn best_shift_at_two(q: &[BigInt], p: &[BigInt], g: usize, k_max: u64) -> (u64, Vec<BigInt>) {
    let two = BigInt::from(2);
    let width = g + 2;
    let valid = |h: &[BigInt], k: u64| {
        let m1 = ipow(&two, k);
        let m2 = ipow(&two, 2 * k);
        let lhs1 = poly_add(q, &poly_scale(h, &two));
        let qh = poly_mul(q, h);
        let hh = poly_mul(h, h);
        let lhs2 = poly_add(&poly_add(p, &poly_scale(&qh, &-BigInt::one())), &poly_scale(&hh, &-BigInt::one()));
        lhs1.iter().all(|a| a.is_multiple_of(&m1)) && lhs2.iter().all(|a| a.is_multiple_of(&m2))
    };
    let mut level: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); width]];
    let mut best = (0, level[0].clone());
    for k in 1..=k_max {
        let digit = ipow(&two, k - 1);
        let mut next = Vec::new();
        for h in &level {
            for mask in 0u32..(1 << width) {
                let cand: Vec<BigInt> = (0..width)
                    .map(|i| if mask >> i & 1 == 1 { &h[i] + &digit } else { h[i].clone() })
                    .collect();
                if valid(&cand, k) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        best = (k, next[0].clone());
        level = next;
    }
    best
}

fn trim(mut v: Vec<BigInt>) -> ZPoly {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    ZPoly::new(v)
}

/// Best model within `depth` moves of `eq` at `p`.
pub fn bfs_local_search(eq: &WeierstrassEquation, p: &BigInt, depth: u32) -> Result<MoveNode> {
    if depth > MAX_ORACLE_DEPTH {
        return Err(Error::InvalidArgument(format!("oracle depth {depth} exceeds {MAX_ORACLE_DEPTH}")));
    }
    if p.to_u64().is_none_or(|v| v > MAX_ORACLE_PRIME || v < 2) {
        return Err(Error::InvalidArgument(format!("oracle prime {p} outside 2..={MAX_ORACLE_PRIME}")));
    }
    let g = eq.g;
    let n = 2 * g + 2;
    let two = BigInt::from(2);
    let v0 = val(&eq.discriminant(), p).expect("nonsingular");
    let tree_step = 2 * (g as u64 + 1) * (2 * g as u64 + 1);
    let y_step = 4 * (2 * g as u64 + 1);
    let q: Vec<BigInt> = eq.q.coeffs().to_vec();
    let pp: Vec<BigInt> = eq.p.coeffs().to_vec();
    let f = poly_add(&poly_scale(&pp, &BigInt::from(4)), &poly_mul(&q, &q));

    let mut visited = 0usize;
    let mut best: Option<MoveNode> = None;
    for k in 0..=depth {
        for (alpha, delta, b) in lattices(p, k) {
            visited += 1;
            if visited > ORACLE_NODE_BUDGET {
                return Err(Error::OracleTimeout(format!("more than {ORACLE_NODE_BUDGET} lattices at p = {p}")));
            }
            let s = ipow(p, alpha as u64);
            let d = ipow(p, delta as u64);
            let v_t = v0 + tree_step * k as u64;
            let m = Mat2 { a: s.clone(), b: b.clone(), c: BigInt::zero(), d: d.clone() };
            let node = if *p == two {
                let qt = homogenized(&q, g + 1, &s, &b, &d);
                let pt = homogenized(&pp, n, &s, &b, &d);
                let (kk, h) = best_shift_at_two(&qt, &pt, g, v_t / y_step);
                let e = ipow(&two, kk);
                let q1: Vec<BigInt> = poly_add(&qt, &poly_scale(&h, &two)).iter().map(|a| a / &e).collect();
                let qh = poly_mul(&qt, &h);
                let hh = poly_mul(&h, &h);
                let p1: Vec<BigInt> = poly_add(&poly_add(&pt, &poly_scale(&qh, &-BigInt::one())), &poly_scale(&hh, &-BigInt::one()))
                    .iter()
                    .map(|a| a / (&e * &e))
                    .collect();
                MoveNode {
                    state: NodeState::Pair { q: trim(q1), p: trim(p1) },
                    v: v_t - y_step * kk,
                    change: MobiusChange { m, e, h: trim(h) },
                }
            } else {
                let ft = homogenized(&f, n, &s, &b, &d);
                let kk = content_val(&ft, p).expect("F is nonzero") / 2;
                let e = ipow(p, kk);
                let f1: Vec<BigInt> = ft.iter().map(|a| a / (&e * &e)).collect();
                MoveNode { state: NodeState::Odd { f: trim(f1) }, v: v_t - y_step * kk, change: MobiusChange { m, e, h: ZPoly::zero() } }
            };
            if best.as_ref().is_none_or(|b| node.v < b.v) {
                best = Some(node);
            }
        }
    }
    Ok(best.expect("root lattice is always visited"))
}

/// Least `v_p(Δ)` over models within `depth` moves of `eq`.
pub fn bfs_local_min(eq: &WeierstrassEquation, p: &BigInt, depth: u32) -> Result<u64> {
    Ok(bfs_local_search(eq, p, depth)?.v)
}

fn val2_u64(x: u64, cap: u64) -> u64 {
    if x == 0 {
        cap
    } else {
        (x.trailing_zeros() as u64).min(cap)
    }
}

/// `G(2x + c) mod 2^cap` for `G` with coefficients already reduced.
fn shift_mod(coeffs: &[u64], c: u64, mask: u64) -> Vec<u64> {
    let n = coeffs.len();
    let mut out = vec![0u64; n];
    let mut lin_pow = vec![1u64];
    for &a in coeffs.iter() {
        for (j, &l) in lin_pow.iter().enumerate() {
            out[j] = out[j].wrapping_add(a.wrapping_mul(l)) & mask;
        }
        let mut next = vec![0u64; lin_pow.len() + 1];
        for (j, &l) in lin_pow.iter().enumerate() {
            next[j] = next[j].wrapping_add(l.wrapping_mul(c)) & mask;
            next[j + 1] = next[j + 1].wrapping_add(l.wrapping_mul(2)) & mask;
        }
        lin_pow = next;
    }
    out
}

fn mu_mod(shifted: &[u64], cap: u64) -> u64 {
    shifted.iter().map(|&a| val2_u64(a, cap)).min().unwrap_or(cap)
}

fn to_residue(a: &BigInt, modulus: &BigInt) -> u64 {
    a.mod_floor(modulus).to_u64().expect("residue fits")
}

/// Exhaustive `max_H min{2μ_c(Q − 2H), μ_c(P + QH − H²)}` over `H` of degree
/// `≤ g + 1` with coefficients in `[0, 2^{g+3})`, at `p = 2`. Only for `g ≤ 2`.
pub fn lambda_brute_force(q: &ZPoly, p: &ZPoly, c: &BigInt, g: usize) -> Result<u64> {
    if g > 2 {
        return Err(Error::InvalidArgument("brute-force multiplicity only for g <= 2".into()));
    }
    let cap = 2 * g as u64 + 4;
    let modulus = BigInt::one() << cap;
    let mask = (1u64 << cap) - 1;
    let n = 2 * g + 3;
    let red = |z: &ZPoly| -> Vec<u64> { (0..n).map(|i| to_residue(&z.coeff(i), &modulus)).collect() };
    let c = to_residue(c, &BigInt::from(2));
    let qs = shift_mod(&red(q), c, mask);
    let ps = shift_mod(&red(p), c, mask);
    let width = g + 2;
    let base = 1u64 << (g + 3);
    let basis: Vec<Vec<u64>> = (0..width)
        .map(|i| {
            let mut e = vec![0u64; n];
            e[i] = 1;
            shift_mod(&e, c, mask)
        })
        .collect();
    let mut best = 0;
    let total = base.pow(width as u32);
    for idx in 0..total {
        let mut hs = vec![0u64; n];
        let mut rest = idx;
        for bvec in &basis {
            let h = rest % base;
            rest /= base;
            if h != 0 {
                for (j, &x) in bvec.iter().enumerate() {
                    hs[j] = hs[j].wrapping_add(h.wrapping_mul(x)) & mask;
                }
            }
        }
        let g1: Vec<u64> = (0..n).map(|j| qs[j].wrapping_sub(hs[j].wrapping_mul(2)) & mask).collect();
        let mut g2 = ps.clone();
        for i in 0..n {
            for j in 0..n - i {
                let t = qs[i].wrapping_mul(hs[j]).wrapping_sub(hs[i].wrapping_mul(hs[j]));
                g2[i + j] = g2[i + j].wrapping_add(t) & mask;
            }
        }
        let lam = (2 * mu_mod(&g1, cap)).min(mu_mod(&g2, cap)).min(cap);
        best = best.max(lam);
    }
    Ok(best)
}

fn random_unimodular<R: Rng>(rng: &mut R) -> Mat2 {
    let mut m = Mat2::identity();
    for _ in 0..rng.gen_range(0..4) {
        let k: i64 = rng.gen_range(-3..=3);
        let step = match rng.gen_range(0..3) {
            0 => Mat2::new(1, k, 0, 1),
            1 => Mat2::new(1, 0, k, 1),
            _ => Mat2::new(0, 1, 1, 0),
        };
        m = &m * &step;
    }
    m
}

/// Applies a pseudo-random integral change drawn from `seed` and returns the
/// new equation with the change used.
pub fn scramble(eq: &WeierstrassEquation, seed: u64) -> Result<(WeierstrassEquation, MobiusChange)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = eq.g;
    for _ in 0..64 {
        let mut m = random_unimodular(&mut rng);
        if rng.gen_bool(0.7) {
            let p: i64 = [2, 3, 5][rng.gen_range(0..3)];
            let k = rng.gen_range(1..=2u32);
            let c: i64 = rng.gen_range(0..p.pow(k));
            m = &m * &Mat2::new(p.pow(k), c, 0, 1);
        }
        let e: i64 = if rng.gen_bool(0.2) { [2, 3, 5][rng.gen_range(0..3)] } else { 1 };
        let h = ZPoly::new((0..=g + 1).map(|_| BigInt::from(rng.gen_range(-3..=3i64))).collect());
        let ch = MobiusChange { m, e: BigInt::from(e), h };
        match eq.apply_change(&ch) {
            Ok(out) => return Ok((out, ch)),
            Err(Error::NonIntegral(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok((eq.clone(), MobiusChange::identity()))
}
