//! Modular arithmetic on arbitrary-precision integers: exponentiation,
//! primality, square roots modulo a prime and square-free decomposition.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// An element of Z/mZ, kept in canonical form `0 <= value < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigInt,
    modulus: BigInt,
}

impl Residue {
    pub fn new(value: &BigInt, modulus: &BigInt) -> Result<Self> {
        if *modulus < BigInt::from(2) {
            return invalid(format!("modulus must be >= 2, got {modulus}"));
        }
        Ok(Residue {
            value: value.mod_floor(modulus),
            modulus: modulus.clone(),
        })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn into_value(self) -> BigInt {
        self.value
    }
}

/// `base^exp mod modulus`, with negative bases reduced first.
pub fn mod_pow(base: &BigInt, exp: &BigInt, modulus: &BigInt) -> Result<Residue> {
    if *modulus < BigInt::from(2) {
        return invalid(format!("modulus must be >= 2, got {modulus}"));
    }
    if exp.is_negative() {
        return invalid("exponent must be nonnegative");
    }
    let b = base.mod_floor(modulus);
    Ok(Residue {
        value: b.modpow(exp, modulus),
        modulus: modulus.clone(),
    })
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

/// `Some(r)` with `r*r == n` when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    // Quadratic residues mod 64 reject most non-squares cheaply.
    let low = (n & BigInt::from(63u8)).to_u8().unwrap_or(0);
    if (SQUARES_MOD_64 >> low) & 1 == 0 {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

const SQUARES_MOD_64: u64 = {
    let mut mask = 0u64;
    let mut k = 0;
    while k < 64 {
        mask |= 1 << ((k * k) % 64);
        k += 1;
    }
    mask
};

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

/// Witnesses that make Miller-Rabin deterministic for every n < 3.3e24.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Extra random-base rounds run above 2^64 after the BPSW stage.
const EXTRA_ROUNDS: usize = 16;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &U64_WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    assert!(n.is_positive() && n.is_odd(), "jacobi needs an odd positive modulus");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n & BigInt::from(7u8)).to_u8().unwrap();
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        let a3 = (&a & BigInt::from(3u8)).to_u8().unwrap();
        let n3 = (&n & BigInt::from(3u8)).to_u8().unwrap();
        if a3 == 3 && n3 == 3 {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn strong_probable_prime(n: &BigInt, base: &BigInt) -> bool {
    let n_minus_1 = n - 1u8;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

fn half_mod(x: BigInt, n: &BigInt) -> BigInt {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice.
/// `n` must be odd, greater than the small-prime table and not a square.
fn strong_lucas_probable_prime(n: &BigInt) -> bool {
    let mut d = 5i64;
    loop {
        let j = jacobi(&BigInt::from(d), n);
        if j == -1 {
            break;
        }
        if j == 0 && BigInt::from(d.abs()) != *n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let disc = BigInt::from(d);
    let p = BigInt::one();
    let q = BigInt::from((1 - d) / 4);

    let n_plus_1: BigInt = n + 1u8;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(n);
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(n);
        v = (&v * &v - (&qk * 2u8)).mod_floor(n);
        qk = (&qk * &qk).mod_floor(n);
        if k.bit(i) {
            let nu = half_mod((&p * &u + &v).mod_floor(n), n);
            let nv = half_mod((&disc * &u + &p * &v).mod_floor(n), n);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(n);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - (&qk * 2u8)).mod_floor(n);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(n);
    }
    false
}

fn seed_from(n: &BigInt) -> u64 {
    // FNV-1a over the little-endian limbs, so the extra bases depend only on n.
    let (_, digits) = n.to_u64_digits();
    digits.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &limb| {
        (h ^ limb).wrapping_mul(0x0100_0000_01b3)
    })
}

fn random_base(rng: &mut ChaCha8Rng, n: &BigInt) -> BigInt {
    let span: BigInt = n - 3u8;
    let words = span.bits().div_ceil(64) as usize + 1;
    let digits: Vec<u64> = (0..words).map(|_| rng.gen()).collect();
    let raw = BigInt::from_biguint(Sign::Plus, BigUint::new(to_u32_digits(&digits)));
    raw.mod_floor(&span) + 2u8
}

fn to_u32_digits(words: &[u64]) -> Vec<u32> {
    words
        .iter()
        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
        .collect()
}

/// Primality test.
///
/// Exact below 2^64. Above that: trial division, a base-2 strong
/// probable-prime test, a strong Lucas test and 16 further Miller-Rabin
/// rounds whose bases are derived from `m`, so the answer is reproducible.
/// Composites never return `true` below 2^64; above, a false positive would
/// need a BPSW counterexample that also survives the extra rounds.
pub fn is_prime(m: &BigInt) -> bool {
    if let Some(small) = m.to_u64() {
        return is_prime_u64(small);
    }
    if m.is_negative() {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if (m % p).is_zero() {
            return false;
        }
    }
    if !strong_probable_prime(m, &BigInt::from(2u8)) {
        return false;
    }
    if exact_sqrt(m).is_some() {
        return false;
    }
    if !strong_lucas_probable_prime(m) {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(m));
    (0..EXTRA_ROUNDS).all(|_| strong_probable_prime(m, &random_base(&mut rng, m)))
}

/// A square root of `a` modulo the odd prime `q` (Tonelli-Shanks).
///
/// Returns `Ok(None)` when `a` is a non-residue and `0` when `a ≡ 0`.
pub fn sqrt_mod(a: &BigInt, q: &BigInt) -> Result<Option<Residue>> {
    if *q < BigInt::from(3) || q.is_even() {
        return invalid(format!("sqrt_mod needs an odd prime modulus, got {q}"));
    }
    if !is_prime(q) {
        return invalid(format!("sqrt_mod modulus {q} is composite"));
    }
    let a = a.mod_floor(q);
    if a.is_zero() {
        return Ok(Some(Residue { value: a, modulus: q.clone() }));
    }
    let q_minus_1: BigInt = q - 1u8;
    let legendre = a.modpow(&(&q_minus_1 >> 1), q);
    if legendre != BigInt::one() {
        return Ok(None);
    }
    let s = q_minus_1.trailing_zeros().unwrap_or(0);
    let odd = &q_minus_1 >> s;
    let root = if s == 1 {
        a.modpow(&((q + 1u8) >> 2), q)
    } else {
        let mut z = BigInt::from(2u8);
        while z.modpow(&(&q_minus_1 >> 1), q) != q_minus_1 {
            z += 1u8;
        }
        let mut m = s;
        let mut c = z.modpow(&odd, q);
        let mut t = a.modpow(&odd, q);
        let mut r = a.modpow(&((&odd + 1u8) >> 1), q);
        while !t.is_one() {
            let mut i = 0u64;
            let mut t2 = t.clone();
            while !t2.is_one() {
                t2 = (&t2 * &t2) % q;
                i += 1;
            }
            let b = c.modpow(&(BigInt::one() << (m - i - 1)), q);
            m = i;
            c = (&b * &b) % q;
            t = (t * &c) % q;
            r = (r * b) % q;
        }
        r
    };
    debug_assert_eq!((&root * &root) % q, a);
    Ok(Some(Residue { value: root, modulus: q.clone() }))
}

/// Split `m = d * y^2` with `d` square-free.
///
/// Trial division runs up to `trial_bound`; the remaining cofactor is
/// accepted when it is 1, a perfect square, a prime, or below `trial_bound^3`
/// (then it is a product of at most two distinct primes above the bound).
/// Anything else cannot be certified and yields `Ok(None)`.
pub fn squarefree_split(m: &BigInt, trial_bound: u64) -> Result<Option<(BigInt, BigInt)>> {
    if !m.is_positive() {
        return invalid(format!("squarefree_split needs m >= 1, got {m}"));
    }
    if trial_bound == 0 {
        return invalid("trial bound must be positive");
    }
    let mut d = BigInt::one();
    let mut y = BigInt::one();
    let mut rest = m.clone();

    let absorb = |p: u64, e: u32, d: &mut BigInt, y: &mut BigInt| {
        if e % 2 == 1 {
            *d *= p;
        }
        for _ in 0..e / 2 {
            *y *= p;
        }
    };

    let mut candidate = 2u64;
    let mut exhausted_early = false;
    while candidate <= trial_bound {
        let c2 = BigInt::from(candidate) * candidate;
        if c2 > rest {
            exhausted_early = true;
            break;
        }
        let mut e = 0u32;
        if let Some(small) = rest.to_u128() {
            let mut r = small;
            while r % candidate as u128 == 0 {
                r /= candidate as u128;
                e += 1;
            }
            rest = BigInt::from(r);
        } else {
            loop {
                let (quot, rem) = rest.div_rem(&BigInt::from(candidate));
                if !rem.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
        }
        absorb(candidate, e, &mut d, &mut y);
        candidate += if candidate == 2 { 1 } else { 2 };
    }

    if rest.is_one() {
        return Ok(Some((d, y)));
    }
    if exhausted_early {
        // Every prime factor exceeds sqrt(rest), so rest is prime.
        return Ok(Some((d * rest, y)));
    }
    if let Some(r) = exact_sqrt(&rest) {
        return Ok(Some((d, y * r)));
    }
    let bound = BigInt::from(trial_bound);
    if is_prime(&rest) || rest < &bound * &bound * &bound {
        return Ok(Some((d * rest, y)));
    }
    Ok(None)
}
