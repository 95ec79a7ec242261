#![allow(dead_code)]

use hypermin::curve::{PointedEquation, WeierstrassEquation};
use hypermin::minimize::minimize;
use hypermin::oracle::scramble;
use hypermin::zpoly::ZPoly;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn zp(cs: &[i64]) -> ZPoly {
    ZPoly::from_i64s(cs)
}

pub fn b(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn genus2_example() -> WeierstrassEquation {
    WeierstrassEquation::new(2, zp(&[2288]), zp(&[0, 0, 0, 0, 0, 76765625])).unwrap()
}

pub fn genus2_minimal_example() -> WeierstrassEquation {
    WeierstrassEquation::new(2, zp(&[0, 0, 0, 1]), zp(&[0, 20, 0, 0, 0, 0, 1477440])).unwrap()
}

fn random_poly<R: Rng>(rng: &mut R, deg: usize, bound: i64) -> ZPoly {
    ZPoly::new((0..=deg).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

/// A random valid equation of genus `g` with small coefficients.
pub fn random_curve<R: Rng>(rng: &mut R, g: usize) -> WeierstrassEquation {
    loop {
        let q = if rng.gen_bool(0.5) { ZPoly::zero() } else { random_poly(rng, g + 1, 2) };
        let p = random_poly(rng, 2 * g + 2, 12);
        if let Ok(eq) = WeierstrassEquation::new(g, q, p) {
            return eq;
        }
    }
}

/// A random pointed equation of genus `g` with small coefficients.
pub fn random_pointed<R: Rng>(rng: &mut R, g: usize) -> PointedEquation {
    loop {
        let q = if rng.gen_bool(0.5) { ZPoly::zero() } else { random_poly(rng, g, 2) };
        let mut pc: Vec<BigInt> = random_poly(rng, 2 * g, 10).coeffs().to_vec();
        pc.resize(2 * g + 1, BigInt::from(0));
        pc.push(BigInt::from(1));
        if let Ok(eq) = PointedEquation::new(g, q, ZPoly::new(pc)) {
            return eq;
        }
    }
}

fn max_coeff(eq: &WeierstrassEquation) -> BigInt {
    eq.q.coeffs().iter().chain(eq.p.coeffs()).map(|a| a.abs()).max().unwrap_or_default()
}

/// Curves of genus 1 and 2 with coefficients at most `10⁶`: minimal ones,
/// scrambled minimal ones, and a few hand-built non-minimal ones.
pub fn corpus(size: usize) -> Vec<WeierstrassEquation> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let limit = BigInt::from(1_000_000);
    let mut out = vec![
        WeierstrassEquation::new(1, ZPoly::zero(), zp(&[15625, 0, 0, 1])).ok(),
        WeierstrassEquation::new(1, ZPoly::zero(), zp(&[64, 0, 0, 1])).ok(),
        WeierstrassEquation::new(2, ZPoly::zero(), zp(&[4, 0, 0, 0, 0, 0, 4])).ok(),
        WeierstrassEquation::new(1, zp(&[0, 2]), zp(&[8, 0, 0, 4])).ok(),
        WeierstrassEquation::new(2, ZPoly::zero(), zp(&[0, 729, 0, 0, 0, 1])).ok(),
    ]
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();
    let mut seed = 0u64;
    while out.len() < size {
        let g = 1 + (out.len() % 2);
        let base = minimize(&random_curve(&mut rng, g), &[]).unwrap().eq_min;
        if max_coeff(&base) > limit {
            continue;
        }
        if out.len() % 3 == 0 {
            out.push(base);
            continue;
        }
        seed += 1;
        let (s, _) = scramble(&base, seed).unwrap();
        if max_coeff(&s) <= limit {
            out.push(s);
        }
    }
    out
}
