//! Exact solver for generalized Pell equations `X² − D·Y² = m`.
//!
//! Class representatives come from the Lagrange–Matthews–Mollin
//! continued-fraction method: for every `f` with `f² | m` and every `z`
//! with `z² ≡ D (mod |m/f²|)`, the expansion of `(z + √D)/|m/f²|` is walked
//! until its first complete quotient with denominator ±1. All solutions are
//! then generated from the representatives by the fundamental unit.
//! Perfect-square `D` has finitely many solutions, found by pairing divisors.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt, isqrt};
use crate::error::{invalid, Result};

/// The equation `X² − D·Y² = m` with `D > 0`, `m ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PellInstance {
    d: BigInt,
    m: i64,
}

impl PellInstance {
    pub fn new(d: BigInt, m: i64) -> Result<Self> {
        if !d.is_positive() {
            return invalid(format!("D must be positive, got {d}"));
        }
        if m == 0 {
            return invalid("m must be nonzero");
        }
        Ok(PellInstance { d, m })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn is_degenerate(&self) -> bool {
        exact_sqrt(&self.d).is_some()
    }

    pub fn is_solution(&self, x: &BigInt, y: &BigInt) -> bool {
        x * x - &self.d * y * y == BigInt::from(self.m)
    }
}

/// One solution, with `Y >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PellSolution {
    #[serde(rename = "X", with = "crate::serde_int")]
    pub x: BigInt,
    #[serde(rename = "Y", with = "crate::serde_int")]
    pub y: BigInt,
}

impl PellSolution {
    pub fn new(x: BigInt, y: BigInt) -> Self {
        PellSolution { x, y }
    }

    fn sort_key(&self) -> (BigInt, BigInt, BigInt) {
        (self.x.abs(), self.x.clone(), self.y.clone())
    }
}

/// Sorts by |X|, then X, then Y, and removes duplicates.
fn canonical_order(mut sols: Vec<PellSolution>) -> Vec<PellSolution> {
    sols.sort_by_cached_key(PellSolution::sort_key);
    sols.dedup();
    sols
}

fn require_nonsquare(d: &BigInt) -> Result<BigInt> {
    if !d.is_positive() {
        return invalid(format!("D must be positive, got {d}"));
    }
    if exact_sqrt(d).is_some() {
        return invalid(format!("D = {d} is a perfect square"));
    }
    Ok(isqrt(d))
}

/// Complete quotient `(P + √D)/Q` of a quadratic irrational expansion.
#[derive(Debug, Clone)]
struct Expansion<'a> {
    d: &'a BigInt,
    root: &'a BigInt,
    p: BigInt,
    q: BigInt,
}

impl Expansion<'_> {
    /// Emits the next partial quotient and advances; the new `q` is the
    /// denominator of the following complete quotient.
    fn step(&mut self) -> BigInt {
        let num = &self.p + self.root;
        let a = if self.q.is_positive() {
            num.div_floor(&self.q)
        } else {
            -(num.div_floor(&-&self.q) + 1u8)
        };
        let p_next = &a * &self.q - &self.p;
        let q_next = (self.d - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

/// Continued fraction of √D: `(floor(√D), period)`. The period ends with
/// `2*floor(√D)`.
pub fn cf_sqrt(d: &BigInt) -> Result<(BigInt, Vec<BigInt>)> {
    let root = require_nonsquare(d)?;
    let mut e = Expansion { d, root: &root, p: BigInt::zero(), q: BigInt::one() };
    let a0 = e.step();
    let end = &a0 * 2u8;
    let mut period = Vec::new();
    loop {
        let a = e.step();
        let done = a == end;
        period.push(a);
        if done {
            break;
        }
    }
    Ok((a0, period))
}

type Pair = (BigInt, BigInt);

/// What the √D expansion reveals about the units of Z[√D].
#[derive(Debug, Clone)]
struct Units {
    /// Smallest solution of `u² − D·v² = 1`, `None` if above the cap.
    positive: Option<Pair>,
    negative: NegativeUnit,
}

#[derive(Debug, Clone)]
enum NegativeUnit {
    Absent,
    Known(Pair),
    /// The period end lies beyond the walk's cap.
    TooLarge,
}

fn units(d: &BigInt, root: &BigInt, cap: Option<&BigInt>) -> Units {
    let mut e = Expansion { d, root, p: BigInt::zero(), q: BigInt::one() };
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    loop {
        let a = e.step();
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        if e.q.is_one() {
            let norm = &h * &h - d * &k * &k;
            return if norm.is_one() {
                Units { positive: Some((h, k)), negative: NegativeUnit::Absent }
            } else {
                let eps = (&h * &h + d * &k * &k, (&h * &k) << 1);
                let positive = match cap {
                    Some(c) if eps.0 > *c => None,
                    _ => Some(eps),
                };
                Units { positive, negative: NegativeUnit::Known((h, k)) }
            };
        }
        if cap.is_some_and(|c| h > *c) {
            return Units { positive: None, negative: NegativeUnit::TooLarge };
        }
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
}

/// Smallest `(u, v)` with `u, v >= 1` and `u² − D·v² = 1`.
pub fn fundamental_unit(d: &BigInt) -> Result<(BigInt, BigInt)> {
    let root = require_nonsquare(d)?;
    Ok(units(d, &root, None).positive.expect("uncapped walk reaches the period end"))
}

fn mul(d: &BigInt, (a, b): (&BigInt, &BigInt), (c, e): (&BigInt, &BigInt)) -> Pair {
    (a * c + d * b * e, a * e + b * c)
}

/// Walks `(z + √D)/|m'|` to its first complete quotient with denominator
/// ±1 and returns the class representative it yields, if any. With a
/// `limit`, the walk stops once every later convergent would give
/// `f*X >= limit`.
fn lmm_representative(
    d: &BigInt,
    root: &BigInt,
    reduced_m: i64,
    z: i64,
    f: i64,
    negative: &NegativeUnit,
    limit: Option<&BigInt>,
) -> Option<Pair> {
    let q0 = BigInt::from(reduced_m.abs());
    let target = BigInt::from(reduced_m);
    let mut e = Expansion { d, root, p: BigInt::from(z), q: q0.clone() };
    let (mut g1, mut g2) = (q0, BigInt::from(-z));
    let (mut b1, mut b2) = (BigInt::zero(), BigInt::one());
    let mut seen = HashSet::new();
    let scaled_limit = limit.map(|l| l.div_ceil(&BigInt::from(f)));
    loop {
        let a = e.step();
        let g = &a * &g1 + &g2;
        let b = &a * &b1 + &b2;
        if e.q.abs().is_one() {
            let norm = &g * &g - d * &b * &b;
            let (x, y) = if norm == target {
                (g, b)
            } else {
                debug_assert_eq!(norm, -&target);
                match negative {
                    NegativeUnit::Known((t, w)) => mul(d, (&g, &b), (t, w)),
                    NegativeUnit::Absent | NegativeUnit::TooLarge => return None,
                }
            };
            return Some((x * f, y * f));
        }
        if let Some(lim) = &scaled_limit {
            if !g1.is_negative() && g.is_positive() && g >= *lim {
                return None;
            }
        }
        if !seen.insert((e.p.clone(), e.q.clone())) {
            return None;
        }
        (g2, g1) = (g1, g);
        (b2, b1) = (b1, b);
    }
}

fn representatives(inst: &PellInstance, root: &BigInt, units: &Units, limit: Option<&BigInt>) -> Vec<Pair> {
    let d = &inst.d;
    let m = inst.m;
    let mut reps = Vec::new();
    let mut f = 1i64;
    while f * f <= m.abs() {
        if m % (f * f) == 0 {
            let reduced = m / (f * f);
            if reduced == 1 {
                // The trivial class; its walk would return the unit itself.
                reps.push((BigInt::from(f), BigInt::zero()));
                f += 1;
                continue;
            }
            let modulus = reduced.abs();
            let dm = d.mod_floor(&BigInt::from(modulus));
            // z ranges over (-|m'|/2, |m'|/2]
            let lo = -((modulus - 1) / 2);
            let hi = modulus / 2;
            for z in lo..=hi {
                if BigInt::from(z * z).mod_floor(&BigInt::from(modulus)) != dm {
                    continue;
                }
                if let Some(rep) = lmm_representative(d, root, reduced, z, f, &units.negative, limit) {
                    debug_assert!(inst.is_solution(&rep.0, &rep.1));
                    reps.push(rep);
                }
            }
        }
        f += 1;
    }
    reps
}

/// Moves a solution to the element of its unit orbit with least |Y|.
fn reduce_in_orbit(d: &BigInt, (u, v): (&BigInt, &BigInt), mut sol: Pair) -> Pair {
    let conj_v = -v;
    loop {
        let up = mul(d, (&sol.0, &sol.1), (u, v));
        let down = mul(d, (&sol.0, &sol.1), (u, &conj_v));
        let best = if down.1.abs() <= up.1.abs() { down } else { up };
        if best.1.abs() < sol.1.abs() {
            sol = best;
        } else {
            break;
        }
    }
    if sol.1.is_negative() {
        (-sol.0, -sol.1)
    } else {
        sol
    }
}

fn with_both_signs(sols: impl IntoIterator<Item = Pair>) -> Vec<PellSolution> {
    let out = sols
        .into_iter()
        .flat_map(|(x, y)| {
            let y = y.abs();
            [PellSolution::new(-&x, y.clone()), PellSolution::new(x, y)]
        })
        .collect();
    canonical_order(out)
}

/// One representative per solution class under the fundamental unit, each
/// moved to least |Y| in its orbit and listed with both signs of X.
pub fn fundamental_solutions(inst: &PellInstance) -> Result<Vec<PellSolution>> {
    let root = require_nonsquare(&inst.d)?;
    let units = units(&inst.d, &root, None);
    let (u, v) = units.positive.clone().expect("uncapped walk reaches the period end");
    let reps = representatives(inst, &root, &units, None)
        .into_iter()
        .map(|rep| reduce_in_orbit(&inst.d, (&u, &v), rep));
    Ok(with_both_signs(reps))
}

/// Every solution with `|X| < 2^limit_bits`, sorted by |X|, then X, then Y.
pub fn iterate_solutions(inst: &PellInstance, limit_bits: u32) -> Result<Vec<PellSolution>> {
    let root = require_nonsquare(&inst.d)?;
    let d = &inst.d;
    let limit = BigInt::one() << limit_bits;
    // A unit above 2^(2b+8) moves every solution with |X| < 2^b past 2^b.
    let cap = BigInt::one() << (2 * limit_bits + 8);
    let units = units(d, &root, Some(&cap));
    let reps = representatives(inst, &root, &units, Some(&limit));

    let mut found = Vec::new();
    for (x, y) in reps {
        for (sx, sy) in [(x.clone(), y.clone()), (-&x, y.clone()), (x.clone(), -&y), (-&x, -&y)] {
            let mut cur = (sx, sy);
            let mut prev: Option<BigInt> = None;
            loop {
                let size = cur.0.abs();
                if size < limit {
                    found.push(PellSolution::new(cur.0.clone(), cur.1.abs()));
                }
                // |X| along an orbit falls and then rises, so the walk can
                // stop once it is rising and past the limit.
                let rising = prev.as_ref().is_some_and(|p| size >= *p);
                let Some((u, v)) = &units.positive else { break };
                if size >= limit && rising {
                    break;
                }
                prev = Some(size);
                cur = mul(d, (&cur.0, &cur.1), (u, v));
            }
        }
    }
    debug_assert!(found.iter().all(|s| inst.is_solution(&s.x, &s.y)));
    Ok(canonical_order(found))
}

/// All solutions when `D = e²`, from factorizations `m = (X − eY)(X + eY)`.
pub fn degenerate_solutions(inst: &PellInstance) -> Result<Vec<PellSolution>> {
    let Some(e) = exact_sqrt(&inst.d) else {
        return invalid(format!("D = {} is not a perfect square", inst.d));
    };
    let m = inst.m;
    let mut out = Vec::new();
    let mut i = 1i64;
    while i * i <= m.abs() {
        if m % i == 0 {
            for a in [i, m.abs() / i] {
                for d1 in [a, -a] {
                    let d2 = m / d1;
                    let (sum, diff) = (d1 + d2, d2 - d1);
                    if sum % 2 != 0 || diff < 0 {
                        continue;
                    }
                    let (y, r) = BigInt::from(diff / 2).div_rem(&e);
                    if r.is_zero() {
                        out.push(PellSolution::new(BigInt::from(sum / 2), y));
                    }
                }
            }
        }
        i += 1;
    }
    Ok(canonical_order(out))
}

/// Solutions with `|X| < 2^limit_bits`, routing perfect-square `D` to
/// [`degenerate_solutions`].
pub fn solve(inst: &PellInstance, limit_bits: u32) -> Vec<PellSolution> {
    if inst.is_degenerate() {
        let limit = BigInt::one() << limit_bits;
        degenerate_solutions(inst)
            .expect("degenerate instance")
            .into_iter()
            .filter(|s| s.x.abs() < limit)
            .collect()
    } else {
        iterate_solutions(inst, limit_bits).expect("nonsquare instance")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn inst(d: i64, m: i64) -> PellInstance {
        PellInstance::new(big(d), m).unwrap()
    }

    fn pairs(sols: &[PellSolution]) -> Vec<(i64, i64)> {
        sols.iter().map(|s| (s.x.to_i64().unwrap(), s.y.to_i64().unwrap())).collect()
    }

    fn brute(d: i64, m: i64, x_max: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        let mut y = 0i64;
        while d * y * y + m <= x_max * x_max {
            let rhs = d * y * y + m;
            if rhs >= 0 {
                let x = (rhs as f64).sqrt() as i64;
                for cand in [x - 1, x, x + 1] {
                    if cand >= 0 && cand * cand == rhs && cand <= x_max {
                        out.push((-cand, y));
                        out.push((cand, y));
                    }
                }
            }
            y += 1;
        }
        out.sort_by_key(|&(x, y)| (x.abs(), x, y));
        out.dedup();
        out
    }

    /// Convergent check of a continued fraction: p/q from the terms.
    fn convergents(a0: &BigInt, period: &[BigInt], count: usize) -> Vec<(BigInt, BigInt)> {
        let terms = std::iter::once(a0.clone()).chain(period.iter().cycle().cloned()).take(count);
        let (mut h1, mut h2, mut k1, mut k2) = (big(1), big(0), big(0), big(1));
        let mut out = Vec::new();
        for a in terms {
            let h = &a * &h1 + &h2;
            let k = &a * &k1 + &k2;
            out.push((h.clone(), k.clone()));
            (h2, h1, k2, k1) = (h1, h, k1, k);
        }
        out
    }

    #[test]
    fn instance_validation() {
        assert!(PellInstance::new(big(0), -8).is_err());
        assert!(PellInstance::new(big(4), 0).is_err());
        assert!(PellInstance::new(big(-3), 1).is_err());
    }

    #[test]
    fn cf_sqrt_examples() {
        assert_eq!(cf_sqrt(&big(3)).unwrap(), (big(1), vec![big(1), big(2)]));
        assert_eq!(cf_sqrt(&big(2)).unwrap(), (big(1), vec![big(2)]));
        assert!(cf_sqrt(&big(16)).is_err());
        // Convergents of √2 alternate between norms −1 and +1.
        let (a0, period) = cf_sqrt(&big(2)).unwrap();
        for (i, (p, q)) in convergents(&a0, &period, 12).into_iter().enumerate() {
            let expected = if i % 2 == 0 { -1 } else { 1 };
            assert_eq!(&p * &p - big(2) * &q * &q, big(expected));
        }
    }

    #[test]
    fn cf_sqrt_129_by_floor_recurrence() {
        // Independent recurrence on exact rationals: x -> 1/(x - floor(x))
        // represented as (P + sqrt(D))/Q with floor computed by f64 bounds.
        let (a0, period) = cf_sqrt(&big(129)).unwrap();
        assert_eq!(a0, big(11));
        assert_eq!(&period[..2], &[big(2), big(1)]);
        assert_eq!(period.last(), Some(&big(22)));
        let sqrt = 129f64.sqrt();
        let (mut p, mut q) = (0f64, 1f64);
        let mut terms = Vec::new();
        for _ in 0..=period.len() {
            let a = ((p + sqrt) / q).floor();
            terms.push(a as i64);
            p = a * q - p;
            q = (129.0 - p * p) / q;
        }
        let expected: Vec<i64> = std::iter::once(11).chain(period.iter().map(|a| a.to_i64().unwrap())).collect();
        assert_eq!(terms, expected);
    }

    #[test]
    fn fundamental_unit_examples() {
        assert_eq!(fundamental_unit(&big(3)).unwrap(), (big(2), big(1)));
        assert_eq!(fundamental_unit(&big(6)).unwrap(), (big(5), big(2)));
        assert_eq!(fundamental_unit(&big(8)).unwrap(), (big(3), big(1)));
        // Odd period: unit is the square of the norm −1 solution (2,1) of D = 5.
        assert_eq!(fundamental_unit(&big(5)).unwrap(), (big(9), big(4)));
        assert!(fundamental_unit(&big(9)).is_err());
    }

    #[test]
    fn unit_at_period_boundary() {
        for d in [2i64, 3, 7, 13, 19, 31, 46, 94] {
            let (a0, period) = cf_sqrt(&big(d)).unwrap();
            let l = period.len();
            let idx = if l % 2 == 0 { l - 1 } else { 2 * l - 1 };
            let conv = convergents(&a0, &period, idx + 1);
            assert_eq!(conv[idx], fundamental_unit(&big(d)).unwrap(), "D = {d}");
        }
    }

    #[test]
    fn fundamental_solutions_examples() {
        let sols = pairs(&fundamental_solutions(&inst(3, -8)).unwrap());
        assert!(sols.contains(&(2, 2)) && sols.contains(&(-2, 2)), "{sols:?}");
        let sols = pairs(&fundamental_solutions(&inst(129, -8)).unwrap());
        assert!(sols.contains(&(11, 1)) && sols.contains(&(-11, 1)), "{sols:?}");
        assert!(fundamental_solutions(&inst(3, 7)).unwrap().is_empty());
        assert!(brute(3, 7, 10_000).is_empty());
        assert!(fundamental_solutions(&inst(9, -8)).is_err());
    }

    #[test]
    fn iterate_examples() {
        let sols = pairs(&iterate_solutions(&inst(3, -8), 8).unwrap());
        assert_eq!(
            sols,
            vec![(-2, 2), (2, 2), (-10, 6), (10, 6), (-38, 22), (38, 22), (-142, 82), (142, 82)]
        );
        assert_eq!(sols, brute(3, -8, 255));
        let sols = pairs(&iterate_solutions(&inst(129, -8), 8).unwrap());
        assert!(sols.contains(&(11, 1)));
    }

    #[test]
    fn iterate_matches_brute_force_small_d() {
        for d in 2..=120i64 {
            if exact_sqrt(&big(d)).is_some() {
                continue;
            }
            for m in [-8, 24, -1, 1, 7, -13] {
                let ours = pairs(&iterate_solutions(&inst(d, m), 14).unwrap());
                assert_eq!(ours, brute(d, m, (1 << 14) - 1), "D = {d}, m = {m}");
            }
        }
    }

    #[test]
    fn fundamental_solutions_generate_everything() {
        // Each class representative lies within the classical bound on Y.
        for d in 2..=60i64 {
            if exact_sqrt(&big(d)).is_some() {
                continue;
            }
            let (u, _) = fundamental_unit(&big(d)).unwrap();
            let u = u.to_f64().unwrap();
            for m in [-8i64, 24] {
                let bound = if m < 0 {
                    ((m.abs() as f64) * (u + 1.0) / (2.0 * d as f64)).sqrt()
                } else {
                    ((m as f64) * (u - 1.0) / (2.0 * d as f64)).sqrt()
                };
                for s in fundamental_solutions(&inst(d, m)).unwrap() {
                    assert!(s.y.to_f64().unwrap() <= bound + 1e-9, "D = {d} m = {m} {s:?}");
                }
            }
        }
    }

    #[test]
    fn degenerate_examples() {
        assert_eq!(pairs(&degenerate_solutions(&inst(9, -8)).unwrap()), vec![(-1, 1), (1, 1)]);
        assert_eq!(degenerate_solutions(&inst(9, 24)).unwrap(), vec![]);
        assert_eq!(brute(9, 24, 1000), vec![]);
        // X² − 4Y² = −8 forces X = 2a with a² − Y² = −2, impossible by parity.
        assert_eq!(degenerate_solutions(&inst(4, -8)).unwrap(), vec![]);
        assert_eq!(brute(4, -8, 1000), vec![]);
        assert_eq!(pairs(&degenerate_solutions(&inst(4, 12)).unwrap()), vec![(-4, 1), (4, 1)]);
        assert!(degenerate_solutions(&inst(3, -8)).is_err());
        for (d, m) in [(1, 15), (16, -15), (25, 11), (36, 64)] {
            assert_eq!(pairs(&degenerate_solutions(&inst(d, m)).unwrap()), brute(d, m, 10_000), "D={d} m={m}");
        }
    }

    #[test]
    fn solve_dispatches() {
        assert_eq!(pairs(&solve(&inst(9, -8), 4)), vec![(-1, 1), (1, 1)]);
        assert_eq!(pairs(&solve(&inst(3, -8), 4)), vec![(-2, 2), (2, 2), (-10, 6), (10, 6)]);
    }

    #[test]
    fn solution_json() {
        let s = PellSolution::new(big(-10), big(6));
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"X":"-10","Y":"6"}"#);
    }
}
