//! Candidate search: walk square-free discriminants, solve each family's
//! Pell equation, recover `x` and keep the primes. A direct scan over `x`
//! serves as an independent path for cross-checking.

use log::{debug, warn};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::arith::{is_prime, isqrt, mod_pow, squarefree_split};
use crate::error::{invalid, Result};
use crate::families::{check_admissible, families_for, Branch, Check, FamilySpec, QuadraticFamily, VerificationReport};
use crate::pell::{self, PellInstance, PellSolution};
use crate::poly::cyclotomic;
use crate::serde_int::Int;

/// Accepted curve parameters. `t² − 4p = delta·Y²` and `#E = q·n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CurveCandidate {
    pub k: u32,
    pub q: u64,
    pub s: u64,
    pub branch: Branch,
    #[serde(with = "crate::serde_int")]
    pub x: BigInt,
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    #[serde(with = "crate::serde_int")]
    pub t: BigInt,
    #[serde(with = "crate::serde_int")]
    pub delta: BigInt,
    #[serde(rename = "Y", with = "crate::serde_int")]
    pub y: BigInt,
    pub p_bits: u64,
    pub n_bits: u64,
}

impl CurveCandidate {
    pub fn family(&self) -> FamilySpec {
        FamilySpec { k: self.k, q: self.q, s: self.s, branch: self.branch }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    PellDriven,
    DirectScan { x_min: BigInt, x_max: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub k: u32,
    pub q: u64,
    pub branches: Vec<Branch>,
    /// Bounds on |Δ|, inclusive.
    pub delta_min: u64,
    pub delta_max: u64,
    /// Bound on |X| during Pell iteration; derived from the p window if unset.
    pub x_bits_max: Option<u32>,
    pub p_bits_min: u64,
    pub p_bits_max: Option<u64>,
    pub max_hits: Option<usize>,
    pub mode: Mode,
    pub trial_bound: u64,
}

impl SearchConfig {
    pub fn new(k: u32, q: u64) -> Self {
        SearchConfig {
            k,
            q,
            branches: Branch::BOTH.to_vec(),
            delta_min: 1,
            delta_max: 10_000,
            x_bits_max: None,
            p_bits_min: 0,
            p_bits_max: None,
            max_hits: None,
            mode: Mode::PellDriven,
            trial_bound: 1_000_000,
        }
    }

    pub fn effective_x_bits(&self) -> u32 {
        match (self.x_bits_max, self.p_bits_max) {
            (Some(bits), _) => bits,
            (None, Some(p_bits)) => (p_bits / 2 + 4).min(u32::MAX as u64) as u32,
            (None, None) => 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_admissible(self.k, self.q)?;
        if self.branches.is_empty() {
            return invalid("at least one branch is required");
        }
        if self.delta_min < 1 || self.delta_min > self.delta_max {
            return invalid(format!("empty |Δ| range [{}, {}]", self.delta_min, self.delta_max));
        }
        if self.p_bits_max.is_some_and(|hi| hi < self.p_bits_min) {
            return invalid("empty p bit window");
        }
        if self.effective_x_bits() == 0 {
            return invalid("x bit bound must be positive");
        }
        if self.trial_bound == 0 {
            return invalid("trial bound must be positive");
        }
        if let Mode::DirectScan { x_min, x_max } = &self.mode {
            if x_min > x_max {
                return invalid(format!("empty x range [{x_min}, {x_max}]"));
            }
            if (x_max - x_min).to_u64().is_none() {
                return invalid("x range is too wide to scan");
            }
        }
        Ok(())
    }

    fn accepts_bits(&self, p: &BigInt) -> bool {
        let bits = p.bits();
        bits >= self.p_bits_min && self.p_bits_max.is_none_or(|hi| bits <= hi)
    }
}

/// `x = (X − β)/α` when the division is exact.
pub fn recover_x(fam: &QuadraticFamily, big_x: &BigInt) -> Option<BigInt> {
    let (x, r) = (big_x - &fam.pell.beta).div_rem(&fam.pell.alpha);
    r.is_zero().then_some(x)
}

/// `n > k` and `n | Φ_k(p)`.
pub fn embedding_degree_holds(p: &BigInt, n: &BigInt, k: u32) -> bool {
    if *n <= BigInt::from(k) {
        return false;
    }
    match cyclotomic(k) {
        Ok(phi) => phi.evaluate(p).mod_floor(n).is_zero(),
        Err(_) => false,
    }
}

/// Family values at `x` that pass every check needing no discriminant.
fn screen(fam: &QuadraticFamily, x: &BigInt, cfg_bits: &SearchConfig) -> Option<(BigInt, BigInt, BigInt)> {
    let spec = fam.spec;
    let t = fam.t.evaluate(x);
    if t.is_zero() || t.is_one() || t == BigInt::from(2) {
        return None;
    }
    let n = fam.n.evaluate(x);
    if n <= BigInt::from(spec.k) || n == BigInt::from(spec.q) {
        return None;
    }
    let p = fam.p.evaluate(x);
    if !cfg_bits.accepts_bits(&p) || &t * &t >= &p << 2 {
        return None;
    }
    if !is_prime(&n) || !is_prime(&p) {
        return None;
    }
    let qn = &n * spec.q;
    if &p + 1u8 - &t != qn || !embedding_degree_holds(&p, &qn, spec.k) {
        return None;
    }
    Some((p, n, t))
}

fn assemble(fam: &QuadraticFamily, x: BigInt, (p, n, t): (BigInt, BigInt, BigInt), delta: BigInt, y: BigInt) -> CurveCandidate {
    let spec = fam.spec;
    CurveCandidate {
        k: spec.k,
        q: spec.q,
        s: spec.s,
        branch: spec.branch,
        x,
        p_bits: p.bits(),
        n_bits: n.bits(),
        p,
        n,
        t,
        delta,
        y,
    }
}

fn accept(
    fam: &QuadraticFamily,
    delta: &BigInt,
    sol: &PellSolution,
    sign: i8,
    cfg: &SearchConfig,
) -> Option<CurveCandidate> {
    let big_x = if sign < 0 { -&sol.x } else { sol.x.clone() };
    let x = recover_x(fam, &big_x)?;
    let values = screen(fam, &x, cfg)?;
    let (p, _, t) = &values;
    assert_eq!(t * t - (p << 2), delta * &sol.y * &sol.y, "Pell solution off the CM curve");
    Some(assemble(fam, x, values, delta.clone(), sol.y.clone()))
}

/// The candidate obtained from a Pell solution, if it survives every filter.
/// `delta` is the negative square-free discriminant with `3|delta| = D`.
pub fn candidate_from_solution(
    fam: &QuadraticFamily,
    delta: &BigInt,
    sol: &PellSolution,
    x_sign: i8,
) -> Option<CurveCandidate> {
    let cfg = SearchConfig::new(fam.spec.k, fam.spec.q);
    accept(fam, delta, sol, x_sign, &cfg)
}

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            for j in (i * i..=limit).step_by(i) {
                composite[j] = true;
            }
        }
    }
    out
}

/// Square-free integers in `[lo, hi]`, ascending.
pub fn squarefree_range(lo: u64, hi: u64) -> Vec<u64> {
    if lo > hi {
        return Vec::new();
    }
    let root = isqrt(&BigInt::from(hi)).to_u64().unwrap_or(u64::MAX);
    squarefree_with(lo, hi, &small_primes(root))
}

fn squarefree_with(lo: u64, hi: u64, primes: &[u64]) -> Vec<u64> {
    let lo = lo.max(1);
    if lo > hi {
        return Vec::new();
    }
    let mut keep = vec![true; (hi - lo + 1) as usize];
    for &p in primes {
        let Some(sq) = p.checked_mul(p) else { break };
        if sq > hi {
            break;
        }
        let mut j = lo.div_ceil(sq) * sq;
        while j <= hi {
            keep[(j - lo) as usize] = false;
            j += sq;
        }
    }
    keep.iter()
        .enumerate()
        .filter(|(_, &k)| k)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// `(|Δ|, |X|, branch, s, x)`
type SortKey = (BigInt, BigInt, Branch, u64, BigInt);

fn sort_key(fam: &QuadraticFamily, c: &CurveCandidate) -> SortKey {
    let big_x = &fam.pell.alpha * &c.x + &fam.pell.beta;
    (c.delta.abs(), big_x.abs(), c.branch, c.s, c.x.clone())
}

const DELTA_CHUNK: u64 = 4096;

fn pell_search(cfg: &SearchConfig, fams: &[QuadraticFamily]) -> Vec<(SortKey, CurveCandidate)> {
    let m = fams[0].pell.m;
    let bits = cfg.effective_x_bits();
    let root = isqrt(&BigInt::from(cfg.delta_max)).to_u64().unwrap_or(u64::MAX);
    let primes = small_primes(root);
    let mut hits = Vec::new();
    let mut lo = cfg.delta_min;
    loop {
        let hi = lo.saturating_add(DELTA_CHUNK - 1).min(cfg.delta_max);
        let deltas = squarefree_with(lo, hi, &primes);
        let chunk: Vec<_> = deltas
            .par_iter()
            .flat_map_iter(|&d| {
                let inst = PellInstance::new(BigInt::from(d) * 3u8, m).expect("D and m are nonzero");
                let delta = -BigInt::from(d);
                // Solutions come in ±X pairs, so one sign per solution suffices.
                let sols = pell::solve(&inst, bits);
                let mut out = Vec::new();
                for sol in &sols {
                    for fam in fams {
                        if let Some(c) = accept(fam, &delta, sol, 1, cfg) {
                            out.push((sort_key(fam, &c), c));
                        }
                    }
                }
                out
            })
            .collect();
        hits.extend(chunk);
        debug!("|Δ| in [{lo}, {hi}]: {} hits so far", hits.len());
        if hi >= cfg.delta_max || cfg.max_hits.is_some_and(|h| hits.len() >= h) {
            break;
        }
        lo = hi + 1;
    }
    hits
}

fn scan_search(cfg: &SearchConfig, fams: &[QuadraticFamily], x_min: &BigInt, x_max: &BigInt) -> Vec<(SortKey, CurveCandidate)> {
    let span = (x_max - x_min).to_u64().expect("validated scan width");
    let lo = BigInt::from(cfg.delta_min);
    let hi = BigInt::from(cfg.delta_max);
    (0..=span)
        .into_par_iter()
        .flat_map_iter(|offset| {
            let x = x_min + offset;
            let mut out = Vec::new();
            for fam in fams {
                let Some(values) = screen(fam, &x, cfg) else { continue };
                let (p, _, t) = &values;
                let gap = (p << 2) - t * t;
                let (d, y) = match squarefree_split(&gap, cfg.trial_bound) {
                    Ok(Some(split)) => split,
                    Ok(None) => {
                        warn!("{}: x = {x}: cannot certify the square-free part of 4p - t^2 = {gap}", fam.spec);
                        continue;
                    }
                    Err(e) => {
                        warn!("{}: x = {x}: {e}", fam.spec);
                        continue;
                    }
                };
                if d < lo || d > hi {
                    continue;
                }
                let c = assemble(fam, x.clone(), values, -d, y);
                out.push((sort_key(fam, &c), c));
            }
            out
        })
        .collect()
}

/// Runs the configured search. Output is sorted by `(|Δ|, |X|, branch)` and
/// does not depend on the number of worker threads.
pub fn run_search(cfg: &SearchConfig) -> Result<Vec<CurveCandidate>> {
    cfg.validate()?;
    if cfg.q > 1 && cfg.q <= cfg.k as u64 {
        warn!(
            "cofactor q = {} does not exceed k = {}; only q*n | Φ_k(p) is checked for it",
            cfg.q, cfg.k
        );
    }
    let fams: Vec<_> = families_for(cfg.k, cfg.q)?
        .into_iter()
        .filter(|f| cfg.branches.contains(&f.spec.branch))
        .collect();
    if fams.is_empty() {
        return Ok(Vec::new());
    }
    let mut hits = match &cfg.mode {
        Mode::PellDriven => pell_search(cfg, &fams),
        Mode::DirectScan { x_min, x_max } => scan_search(cfg, &fams, x_min, x_max),
    };
    hits.sort_by(|a, b| a.0.cmp(&b.0));
    hits.dedup_by(|a, b| a.1 == b.1);
    let mut out: Vec<_> = hits.into_iter().map(|(_, c)| c).collect();
    if let Some(limit) = cfg.max_hits {
        out.truncate(limit);
    }
    Ok(out)
}

fn opt_int<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigInt>, D::Error> {
    Ok(Option::<Int>::deserialize(d)?.map(|i| i.0))
}

/// A candidate as read back for verification. Only the curve data is
/// required; family fields and bit lengths are checked when present.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CandidateRecord {
    #[serde(with = "crate::serde_int")]
    pub k: BigInt,
    #[serde(with = "crate::serde_int")]
    pub q: BigInt,
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    #[serde(with = "crate::serde_int")]
    pub t: BigInt,
    #[serde(with = "crate::serde_int")]
    pub delta: BigInt,
    #[serde(rename = "Y", with = "crate::serde_int")]
    pub y: BigInt,
    #[serde(default, deserialize_with = "opt_int")]
    pub s: Option<BigInt>,
    #[serde(default)]
    pub branch: Option<Branch>,
    #[serde(default, deserialize_with = "opt_int")]
    pub x: Option<BigInt>,
    #[serde(default, deserialize_with = "opt_int")]
    pub p_bits: Option<BigInt>,
    #[serde(default, deserialize_with = "opt_int")]
    pub n_bits: Option<BigInt>,
}

impl From<&CurveCandidate> for CandidateRecord {
    fn from(c: &CurveCandidate) -> Self {
        CandidateRecord {
            k: c.k.into(),
            q: c.q.into(),
            p: c.p.clone(),
            n: c.n.clone(),
            t: c.t.clone(),
            delta: c.delta.clone(),
            y: c.y.clone(),
            s: Some(c.s.into()),
            branch: Some(c.branch),
            x: Some(c.x.clone()),
            p_bits: Some(c.p_bits.into()),
            n_bits: Some(c.n_bits.into()),
        }
    }
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: detail.into() }
}

/// Smallest `e >= 1` with `p^e ≡ 1 (mod n)`, searched up to `cap`.
fn multiplicative_order(p: &BigInt, n: &BigInt, cap: u32) -> Option<u32> {
    let mut acc = BigInt::one();
    let base = p.mod_floor(n);
    for e in 1..=cap {
        acc = (acc * &base).mod_floor(n);
        if acc.is_one() {
            return Some(e);
        }
    }
    None
}

/// Re-checks every candidate invariant from the record's numbers alone.
pub fn verify_candidate(rec: &CandidateRecord) -> VerificationReport {
    let mut checks = Vec::new();
    let (p, n, t, delta, y) = (&rec.p, &rec.n, &rec.t, &rec.delta, &rec.y);
    let k = rec.k.to_u32().filter(|k| matches!(k, 3 | 4 | 6));
    checks.push(check("k_supported", k.is_some(), format!("k = {}", rec.k)));
    checks.push(check("q_positive", rec.q.is_positive(), format!("q = {}", rec.q)));

    checks.push(check("p_prime", p.is_positive() && is_prime(p), format!("p = {p}")));
    checks.push(check("n_prime", n.is_positive() && is_prime(n), format!("n = {n}")));
    checks.push(check("n_exceeds_k", n > &rec.k, format!("n = {n}, k = {}", rec.k)));
    checks.push(check("n_differs_from_q", n != &rec.q, format!("n = {n}, q = {}", rec.q)));

    let order = &rec.q * n;
    let rhs = p + 1u8 - t;
    checks.push(check("trace_identity", order == rhs, format!("q*n = {order}, p+1-t = {rhs}")));
    checks.push(check(
        "trace_nondegenerate",
        !(t.is_zero() || t.is_one() || *t == BigInt::from(2)),
        format!("t = {t}"),
    ));
    let four_p: BigInt = p << 2;
    checks.push(check("hasse_bound", t * t <= four_p, format!("t^2 = {}, 4p = {four_p}", t * t)));

    let cm = t * t - &four_p;
    let dy2 = delta * y * y;
    checks.push(check(
        "cm_equation",
        delta.is_negative() && y.is_positive() && cm == dy2,
        format!("t^2-4p = {cm}, delta*Y^2 = {dy2}"),
    ));

    let abs_delta = delta.abs();
    let squarefree = if abs_delta.is_zero() {
        (false, "delta = 0".to_string())
    } else {
        let bound = isqrt(&abs_delta).to_u64().unwrap_or(u64::MAX).clamp(1, 10_000_000);
        match squarefree_split(&abs_delta, bound) {
            Ok(Some((_, part))) => (part.is_one(), format!("|delta| = {abs_delta} has square part {part}^2")),
            Ok(None) => (false, format!("|delta| = {abs_delta} could not be factored")),
            Err(e) => (false, e.to_string()),
        }
    };
    checks.push(check("delta_squarefree", squarefree.0, squarefree.1));

    let phi = match k {
        Some(3) => Some(p * p + p + 1u8),
        Some(4) => Some(p * p + 1u8),
        Some(6) => Some(p * p - p + 1u8),
        _ => None,
    };
    let divides = match (&phi, order.is_positive()) {
        (Some(phi), true) => (phi.mod_floor(&order).is_zero(), format!("Φ_k(p) = {phi} mod q*n = {}", phi.mod_floor(&order))),
        (None, _) => (false, "unsupported k".to_string()),
        (_, false) => (false, format!("q*n = {order} is not positive")),
    };
    checks.push(check("embedding_divisibility", divides.0, divides.1));

    let exact = match (k, n > &BigInt::one()) {
        (Some(k), true) => {
            let ord = multiplicative_order(p, n, k);
            (ord == Some(k), format!("order of p mod n is {ord:?}"))
        }
        _ => (false, "undefined".to_string()),
    };
    checks.push(check("embedding_degree_exact", exact.0, exact.1));

    if let (Some(s), Some(branch), Some(x), Some(k)) = (&rec.s, rec.branch, &rec.x, k) {
        let family = match (rec.q.to_u64(), s.to_u64()) {
            (Some(q), Some(s)) => crate::families::build_family(FamilySpec { k, q, s, branch }).ok(),
            _ => None,
        };
        let consistent = match family {
            Some(f) => {
                let vals = (f.p.evaluate(x), f.n.evaluate(x), f.t.evaluate(x));
                (vals == (p.clone(), n.clone(), t.clone()), format!("family gives p, n, t = {}, {}, {}", vals.0, vals.1, vals.2))
            }
            None => (false, format!("no family k={k} q={} s={s} branch {branch}", rec.q)),
        };
        checks.push(check("family_values", consistent.0, consistent.1));
    }
    if let Some(bits) = &rec.p_bits {
        checks.push(check("p_bits", *bits == BigInt::from(p.bits()), format!("stated {bits}, actual {}", p.bits())));
    }
    if let Some(bits) = &rec.n_bits {
        checks.push(check("n_bits", *bits == BigInt::from(n.bits()), format!("stated {bits}, actual {}", n.bits())));
    }
    // Fermat witness as a cheap cross-check of the primality tests.
    if p > &BigInt::from(3) {
        let w = mod_pow(&BigInt::from(2), &(p - 1u8), p).map(|r| r.into_value().is_one()).unwrap_or(false);
        checks.push(check("p_fermat_base2", w, format!("2^(p-1) mod p {}", if w { "= 1" } else { "!= 1" })));
    }
    VerificationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::build_family;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn fam(k: u32, q: u64, s: u64, branch: Branch) -> QuadraticFamily {
        build_family(FamilySpec { k, q, s, branch }).unwrap()
    }

    fn known() -> CurveCandidate {
        CurveCandidate {
            k: 6,
            q: 1,
            s: 0,
            branch: Branch::B,
            x: big(4),
            p: big(17),
            n: big(13),
            t: big(5),
            delta: big(-43),
            y: big(1),
            p_bits: 5,
            n_bits: 4,
        }
    }

    #[test]
    fn recover_x_examples() {
        let f = fam(6, 1, 0, Branch::B);
        assert_eq!(recover_x(&f, &big(11)), Some(big(4)));
        assert_eq!(recover_x(&f, &big(10)), None);
        assert_eq!(recover_x(&fam(3, 1, 0, Branch::A), &big(9)), Some(big(2)));
    }

    #[test]
    fn embedding_degree_examples() {
        assert!(embedding_degree_holds(&big(17), &big(13), 6));
        assert!(!embedding_degree_holds(&big(13), &big(7), 3));
        assert!(!embedding_degree_holds(&big(17), &big(5), 6));
        // 3 divides Φ_6(5) = 21 but 3 <= 6.
        assert!(!embedding_degree_holds(&big(5), &big(3), 6));
    }

    #[test]
    fn candidate_from_solution_examples() {
        let f = fam(6, 1, 0, Branch::B);
        let delta = big(-43);
        let c = candidate_from_solution(&f, &delta, &PellSolution::new(big(11), big(1)), 1).unwrap();
        assert_eq!(c, known());
        assert!(candidate_from_solution(&f, &delta, &PellSolution::new(big(10), big(1)), 1).is_none());
        // x = 2 gives p = 5, n = 3 <= k; X = 5, 3|Δ|Y² = 33 with Δ = −11.
        let sol = PellSolution::new(big(5), big(1));
        assert!(candidate_from_solution(&f, &big(-11), &sol, 1).is_none());
    }

    #[test]
    fn squarefree_range_matches_trial_division() {
        let expected: Vec<u64> = (1..=2000u64)
            .filter(|&m| (2..=44u64).all(|d| m % (d * d) != 0))
            .collect();
        assert_eq!(squarefree_range(1, 2000), expected);
        assert_eq!(squarefree_range(44, 44), Vec::<u64>::new());
        assert_eq!(squarefree_range(43, 43), vec![43]);
        assert_eq!(squarefree_range(0, 3), vec![1, 2, 3]);
    }

    #[test]
    fn search_finds_known_candidate() {
        let mut cfg = SearchConfig::new(6, 1);
        cfg.branches = vec![Branch::B];
        cfg.delta_max = 50;
        cfg.p_bits_max = Some(16);
        let hits = run_search(&cfg).unwrap();
        assert!(hits.contains(&known()), "{hits:?}");
        assert!(hits.windows(2).all(|w| w[0].delta.abs() <= w[1].delta.abs()));
    }

    #[test]
    fn search_on_non_squarefree_range_is_empty() {
        let mut cfg = SearchConfig::new(6, 1);
        cfg.delta_min = 44;
        cfg.delta_max = 44;
        assert!(run_search(&cfg).unwrap().is_empty());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SearchConfig::new(6, 5);
        assert!(matches!(run_search(&cfg), Err(crate::error::Error::Inadmissible(_))));
        cfg.q = 7;
        cfg.delta_min = 10;
        cfg.delta_max = 9;
        assert!(run_search(&cfg).is_err());
        let mut cfg = SearchConfig::new(4, 5);
        cfg.mode = Mode::DirectScan { x_min: big(3), x_max: big(2) };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn default_x_bits() {
        let mut cfg = SearchConfig::new(6, 7);
        assert_eq!(cfg.effective_x_bits(), 64);
        cfg.p_bits_max = Some(80);
        assert_eq!(cfg.effective_x_bits(), 44);
        cfg.x_bits_max = Some(30);
        assert_eq!(cfg.effective_x_bits(), 30);
    }

    #[test]
    fn scan_and_pell_agree_small() {
        for (k, q) in [(6, 1), (4, 2), (3, 7), (6, 7), (4, 5)] {
            let mut cfg = SearchConfig::new(k, q);
            cfg.delta_max = 2000;
            cfg.x_bits_max = Some(40);
            let pell: Vec<_> = run_search(&cfg)
                .unwrap()
                .into_iter()
                .filter(|c| c.x.abs() <= big(300))
                .collect();
            cfg.mode = Mode::DirectScan { x_min: big(-300), x_max: big(300) };
            let scan = run_search(&cfg).unwrap();
            assert_eq!(pell, scan, "k = {k}, q = {q}");
        }
    }

    #[test]
    fn verify_examples() {
        let rec = CandidateRecord::from(&known());
        assert!(verify_candidate(&rec).all_passed(), "{:?}", verify_candidate(&rec));

        let mut bad = rec.clone();
        bad.t = big(6);
        let report = verify_candidate(&bad);
        assert!(!report.check("trace_identity").unwrap().passed);

        let mut bad = rec.clone();
        bad.delta = big(-42);
        let report = verify_candidate(&bad);
        assert!(!report.check("cm_equation").unwrap().passed);

        let mut bad = rec.clone();
        bad.x = Some(big(5));
        assert!(!verify_candidate(&bad).check("family_values").unwrap().passed);
    }

    #[test]
    fn record_parsing() {
        let rec: CandidateRecord =
            serde_json::from_str(r#"{"p":17,"n":"13","q":1,"t":"0x5","delta":-43,"Y":1,"k":6}"#).unwrap();
        assert!(verify_candidate(&rec).all_passed());
        assert!(serde_json::from_str::<CandidateRecord>(r#"{"p":17}"#).is_err());
    }

    #[test]
    fn candidate_json_shape() {
        let line = serde_json::to_string(&known()).unwrap();
        assert_eq!(
            line,
            r#"{"k":6,"q":1,"s":0,"branch":"B","x":"4","p":"17","n":"13","t":"5","delta":"-43","Y":"1","p_bits":5,"n_bits":4}"#
        );
        let back: CandidateRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, CandidateRecord::from(&known()));
    }
}
