//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub fn isqrt_u128(n: u128) -> u128 {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Every `(X, Y)` with `X² − D·Y² = m`, `|X| <= x_max`, `Y >= 0`.
pub fn brute_pell(d: u64, m: i64, x_max: u64) -> BTreeSet<(i128, u128)> {
    let mut out = BTreeSet::new();
    let cap = (x_max as i128) * (x_max as i128);
    let mut y: i128 = 0;
    loop {
        let rhs = d as i128 * y * y + m as i128;
        if rhs > cap {
            break;
        }
        if rhs >= 0 {
            let r = isqrt_u128(rhs as u128) as i128;
            if r * r == rhs {
                out.insert((r, y as u128));
                out.insert((-r, y as u128));
            }
        }
        y += 1;
    }
    out
}

const SQUARES_MOD_64: u64 = {
    let mut mask = 0u64;
    let mut i = 0;
    while i < 64 {
        mask |= 1 << ((i * i) % 64);
        i += 1;
    }
    mask
};

const fn square_table<const N: usize>() -> [bool; N] {
    let mut t = [false; N];
    let mut i = 0;
    while i < N {
        t[(i * i) % N] = true;
        i += 1;
    }
    t
}

const SQUARES_MOD_63: [bool; 63] = square_table();
const SQUARES_MOD_65: [bool; 65] = square_table();

/// Least `v` in `[1, v_max]` with `D·v² + 1` a square, and the root.
/// Residues mod 2^64, 63 and 65 are updated incrementally and screen out
/// almost every nonsquare before the exact test.
pub fn brute_unit(d: u64, v_max: u64) -> Option<(u128, u128)> {
    let (mut low, mut r63, mut r65) = (1u64, 1u64, 1u64);
    // n(v) − n(v−1) = D(2v − 1)
    let (mut inc, mut i63, mut i65) = (d, d % 63, d % 65);
    let (two_d, s63, s65) = (2 * d, 2 * d % 63, 2 * d % 65);
    for v in 1..=v_max {
        low = low.wrapping_add(inc);
        r63 += i63;
        if r63 >= 63 {
            r63 -= 63;
        }
        r65 += i65;
        if r65 >= 65 {
            r65 -= 65;
        }
        inc = inc.wrapping_add(two_d);
        i63 += s63;
        if i63 >= 63 {
            i63 -= 63;
        }
        i65 += s65;
        if i65 >= 65 {
            i65 -= 65;
        }
        if SQUARES_MOD_64 >> (low & 63) & 1 == 0 || !SQUARES_MOD_63[r63 as usize] || !SQUARES_MOD_65[r65 as usize] {
            continue;
        }
        let n = d as u128 * v as u128 * v as u128 + 1;
        let r = isqrt_u128(n);
        if r * r == n {
            return Some((r, v as u128));
        }
    }
    None
}

/// Fundamental solution of `u² − D·v² = 1` by the cyclic (chakravala)
/// method, independent of continued fractions.
pub fn chakravala(d: u64) -> (BigInt, BigInt) {
    let dd = BigInt::from(d);
    let root = BigInt::from(isqrt_u128(d as u128));
    let (mut a, mut b) = (root.clone(), BigInt::one());
    let mut k = &a * &a - &dd;
    if k.is_zero() {
        panic!("D = {d} is a square");
    }
    while !k.is_one() {
        let modulus = k.abs();
        // m ≡ -a/b (mod |k|), positive, with |m² − D| least.
        let inv = b.extended_gcd(&modulus).x.mod_floor(&modulus);
        let r = (-(&a) * inv).mod_floor(&modulus);
        let below = if r <= root { &r + (&root - &r) / &modulus * &modulus } else { r.clone() };
        let m = [&below - &modulus, below.clone(), &below + &modulus]
            .into_iter()
            .filter(|c| c.is_positive())
            .min_by_key(|c| (c * c - &dd).abs())
            .expect("below + |k| is positive");
        let a_next = (&a * &m + &dd * &b) / &modulus;
        let b_next = (&a + &b * &m) / &modulus;
        k = (&m * &m - &dd) / &k;
        a = a_next.abs();
        b = b_next.abs();
    }
    (a, b)
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt_u128(n as u128);
    r * r == n as u128
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
