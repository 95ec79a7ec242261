//! Integer utilities: p-adic valuations, primality, factorization and
//! modular inverses.

use std::fmt;
use std::ops::Add;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// A natural number or `+∞`, the codomain of valuations.
///
/// The derived ordering puts every finite value below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Finite(u64),
    Infinity,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Finite(_))
    }

    /// The finite value, or `None` for `+∞`.
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(v) => Some(v),
            ExtNat::Infinity => None,
        }
    }

    /// Finite value; panics on `+∞`. Only for call sites where finiteness
    /// has already been established.
    pub fn unwrap(self) -> u64 {
        self.finite().expect("valuation is infinite")
    }
}

impl Add<u64> for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: u64) -> ExtNat {
        match self {
            ExtNat::Finite(v) => ExtNat::Finite(v + rhs),
            ExtNat::Infinity => ExtNat::Infinity,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => ExtNat::Finite(a + b),
            _ => ExtNat::Infinity,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinity => write!(f, "inf"),
        }
    }
}

/// Largest `e` with `p^e | n`, `+∞` for `n = 0`.
pub fn val_p(n: &BigInt, p: &BigInt) -> ExtNat {
    if n.is_zero() {
        return ExtNat::Infinity;
    }
    if p == &BigInt::from(2) {
        return ExtNat::Finite(n.magnitude().trailing_zeros().unwrap_or(0));
    }
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return ExtNat::Finite(e);
        }
        m = q;
        e += 1;
    }
}

/// `n / p^k` when the division is exact.
pub fn div_exact(n: &BigInt, d: &BigInt) -> Option<BigInt> {
    let (q, r) = n.div_rem(d);
    r.is_zero().then_some(q)
}

pub fn pow(base: &BigInt, exp: u64) -> BigInt {
    num_traits::pow(base.clone(), exp as usize)
}

/// Least nonnegative `b` with `a·b ≡ 1 (mod n)`.
pub fn inv_mod(a: &BigInt, n: &BigInt) -> Result<BigInt> {
    if n < &BigInt::from(2) {
        return Err(Error::InvalidArgument(format!("modulus {n} must be at least 2")));
    }
    let e = a.mod_floor(n).extended_gcd(n);
    if !e.gcd.is_one() {
        return Err(Error::NotCoprime(a.clone(), n.clone()));
    }
    Ok(e.x.mod_floor(n))
}

/// Signed integer with its prime factorization.
///
/// `sign · cofactor · ∏ pᵢ^eᵢ` is the original value; `cofactor` is 1 unless
/// Pollard rho ran out of budget on a composite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub sign: i8,
    pub factors: Vec<(BigInt, u32)>,
    pub cofactor: BigInt,
}

impl FactoredInteger {
    pub fn value(&self) -> BigInt {
        if self.sign == 0 {
            return BigInt::zero();
        }
        let mut v = self.cofactor.clone();
        for (p, e) in &self.factors {
            v *= pow(p, u64::from(*e));
        }
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// Exponent of `p` in the factor list (0 if absent).
    pub fn exponent(&self, p: &BigInt) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e)
    }

    pub fn primes(&self) -> Vec<BigInt> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        write!(f, "{}", if self.sign < 0 { "-1" } else { "1" })?;
        for (p, e) in &self.factors {
            if *e == 1 {
                write!(f, " * {p}")?;
            } else {
                write!(f, " * {p}^{e}")?;
            }
        }
        if !self.cofactor.is_one() {
            write!(f, " * ({})", self.cofactor)?;
        }
        Ok(())
    }
}

/// Tuning knobs for [`factorize_with`].
#[derive(Debug, Clone)]
pub struct FactorConfig {
    /// Trial division by every prime below this bound.
    pub trial_bound: u32,
    /// Total number of Pollard–Brent iterations spent per composite.
    pub rho_budget: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_bound: 1 << 20,
            rho_budget: 1 << 20,
        }
    }
}

fn small_primes(bound: u32) -> &'static [u32] {
    static SIEVE: OnceLock<Vec<u32>> = OnceLock::new();
    let all = SIEVE.get_or_init(|| {
        let n = 1usize << 20;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    });
    let end = all.partition_point(|&p| p < bound);
    &all[..end]
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, n);
        }
        b = mul_mod_u64(b, b, n);
        e >>= 1;
    }
    r
}

fn miller_rabin_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &MR_BASES {
        let b = u64::from(b);
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'base: for &b in &MR_BASES {
        let mut x = pow_mod_u64(u64::from(b), d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn mr_witness(n: &BigUint, b: &BigUint, d: &BigUint, s: u64) -> bool {
    let n1 = n - 1u32;
    let mut x = b.modpow(d, n);
    if x.is_one() || x == n1 {
        return false;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n1 {
            return false;
        }
    }
    true
}

/// Miller–Rabin: deterministic below 3.3·10²⁴ (first 13 prime bases),
/// 24 extra seeded random bases above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return miller_rabin_u64(small);
    }
    for &b in &MR_BASES {
        if (n % b).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    for &b in &MR_BASES {
        if mr_witness(n, &BigUint::from(b), &d, s) {
            return false;
        }
    }
    let bound: BigUint = "3317044064679887385961981".parse().unwrap();
    if n < &bound {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let two = BigUint::from(2u32);
    for _ in 0..24 {
        let b = rng.gen_biguint_range(&two, &n1);
        if mr_witness(n, &b, &d, s) {
            return false;
        }
    }
    true
}

fn brent_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    let f = |y: u64| ((y as u128 * y as u128 + c as u128) % n as u128) as u64;
    let m = 128;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
            *budget = budget.saturating_sub(steps);
        }
        r *= 2;
        if *budget == 0 && g == 1 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigUint, c: &BigUint, budget: &mut u64) -> Option<BigUint> {
    let f = |y: &BigUint| (y * y + c) % n;
    let m = 128u64;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = BigUint::zero();
    let mut ys = BigUint::zero();
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = q * absdiff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += m;
            *budget = budget.saturating_sub(steps);
        }
        r *= 2;
        if *budget == 0 && g.is_one() {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// One nontrivial factor of the composite `n`, or `None` if the budget runs out.
fn find_factor(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let mut c = 1u64;
    while *budget > 0 {
        let found = match n.to_u64() {
            Some(small) => brent_u64(small, c, budget).map(BigUint::from),
            None => brent_big(n, &BigUint::from(c), budget),
        };
        if found.is_some() {
            return found;
        }
        c += 1;
    }
    None
}

pub fn factorize(n: &BigInt, hints: &[BigInt]) -> FactoredInteger {
    factorize_with(n, hints, &FactorConfig::default())
}

/// Factor `n`: hint primes first, trial division below `trial_bound`, then
/// Pollard rho with Brent's cycle detection on what remains.
pub fn factorize_with(n: &BigInt, hints: &[BigInt], config: &FactorConfig) -> FactoredInteger {
    let sign = match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    };
    if sign == 0 {
        return FactoredInteger { sign, factors: Vec::new(), cofactor: BigInt::one() };
    }
    let mut rest = n.magnitude().clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();
    let divide_out = |rest: &mut BigUint, p: &BigUint, found: &mut Vec<(BigUint, u32)>| {
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(p);
            if !r.is_zero() {
                break;
            }
            *rest = q;
            e += 1;
        }
        if e > 0 {
            found.push((p.clone(), e));
        }
    };

    for h in hints {
        let h = h.magnitude();
        if h > &BigUint::one() && is_probable_prime(h) {
            divide_out(&mut rest, h, &mut found);
        }
    }
    for &p in small_primes(config.trial_bound) {
        if rest.is_one() {
            break;
        }
        let p_big = BigUint::from(p);
        if &p_big * &p_big > rest {
            break;
        }
        if (&rest % p).is_zero() {
            divide_out(&mut rest, &p_big, &mut found);
        }
    }

    let mut cofactor = BigUint::one();
    let mut budget = config.rho_budget;
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            found.push((m, 1));
            continue;
        }
        match find_factor(&m, &mut budget) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => cofactor *= m,
        }
    }

    found.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in found {
        let p = BigInt::from(p);
        match factors.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => factors.push((p, e)),
        }
    }
    FactoredInteger { sign, factors, cofactor: BigInt::from(cofactor) }
}

/// Largest odd `s` with `s² | n`.
pub fn largest_odd_square_divisor(n: &BigInt, hints: &[BigInt]) -> Result<BigInt> {
    if !n.is_positive() {
        return Err(Error::InvalidArgument(format!("expected a positive integer, got {n}")));
    }
    let odd = n >> n.trailing_zeros().unwrap_or(0);
    let f = factorize(&odd, hints);
    if !f.is_complete() {
        return Err(Error::FactorizationIncomplete(f.cofactor));
    }
    Ok(f.factors.iter().fold(BigInt::one(), |acc, (p, e)| acc * pow(p, u64::from(e / 2))))
}
