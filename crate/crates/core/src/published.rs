//! Closed forms and tabulated families as they appear in the literature on
//! generalized MNT curves, used to audit the derived families.
//!
//! Trace and Pell variables are recorded as polynomials in `u = q*x + s`.
//! The derived family is authoritative; every disagreement is reported as an
//! [`Erratum`] and never silently accepted.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::families::{Branch, FamilySpec, QuadraticFamily};
use crate::poly::IntPolynomial;

/// A published value that disagrees with the derived family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub spec: FamilySpec,
    /// `"t"` or `"X"`.
    pub field: &'static str,
    pub published: IntPolynomial,
    pub derived: IntPolynomial,
    pub reason: String,
}

impl fmt::Display for Erratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "erratum for {}: published {} = {} but {}; using derived {} = {}",
            self.spec, self.field, self.published, self.reason, self.field, self.derived
        )
    }
}

/// `a*u + b` with coefficients as published for (k, branch).
fn stated_trace_in_u(k: u32, branch: Branch) -> (i64, i64) {
    match (k, branch) {
        (6, Branch::A) => (-1, 1),
        (6, Branch::B) => (1, 1),
        (4, Branch::A) => (-1, 1),
        (4, Branch::B) => (1, 0),
        (3, Branch::A) => (3, -1),
        (3, Branch::B) => (-3, 1),
        _ => unreachable!("k is validated by FamilySpec"),
    }
}

fn stated_pell_x_in_u(k: u32, branch: Branch) -> (i64, i64) {
    match (k, branch) {
        (6, Branch::A) => (3, 1),
        (6, Branch::B) => (3, -1),
        (4, Branch::A) => (3, 1),
        (4, Branch::B) => (3, 2),
        (3, _) => (3, 3),
        _ => unreachable!("k is validated by FamilySpec"),
    }
}

fn in_x(spec: &FamilySpec, (a, b): (i64, i64)) -> IntPolynomial {
    IntPolynomial::linear(BigInt::from(a), BigInt::from(b)).compose(&spec.substitution())
}

/// Published closed-form trace of the family selected by `spec`.
pub fn stated_trace(spec: &FamilySpec) -> IntPolynomial {
    in_x(spec, stated_trace_in_u(spec.k, spec.branch))
}

/// Published closed-form Pell variable `X(x)` of the family selected by `spec`.
pub fn stated_pell_x(spec: &FamilySpec) -> IntPolynomial {
    in_x(spec, stated_pell_x_in_u(spec.k, spec.branch))
}

/// A row of the tabulated k = 4 families with small cofactor.
#[derive(Debug, Clone, Copy)]
pub struct TabulatedFamily {
    pub k: u32,
    pub q: u64,
    pub s: u64,
    pub branch: Branch,
    /// Constant term first.
    pub n: [i64; 3],
    pub p: [i64; 3],
    pub t: [i64; 2],
}

pub const TABULATED: [TabulatedFamily; 3] = [
    TabulatedFamily { k: 4, q: 2, s: 1, branch: Branch::A, n: [1, 2, 2], p: [1, 2, 4], t: [0, -2] },
    TabulatedFamily { k: 4, q: 5, s: 2, branch: Branch::A, n: [1, 4, 5], p: [3, 15, 25], t: [-1, -5] },
    TabulatedFamily { k: 4, q: 5, s: 3, branch: Branch::A, n: [2, 6, 5], p: [7, 25, 25], t: [-1, -5] },
];

/// A classic prime-order family, as tabulated in the variable `y`.
#[derive(Debug, Clone, Copy)]
pub struct ClassicFamily {
    pub k: u32,
    pub n: [i64; 3],
    pub p: [i64; 3],
    pub t: [i64; 2],
    /// Pell variable; only its square is meaningful.
    pub x: [i64; 2],
}

/// The classic MNT families with both sign choices written out.
pub const CLASSIC: [ClassicFamily; 6] = [
    ClassicFamily { k: 6, n: [1, 2, 4], p: [1, 0, 4], t: [1, -2], x: [1, 6] },
    ClassicFamily { k: 6, n: [1, -2, 4], p: [1, 0, 4], t: [1, 2], x: [-1, 6] },
    ClassicFamily { k: 4, n: [2, 2, 1], p: [1, 1, 1], t: [0, -1], x: [2, 3] },
    ClassicFamily { k: 4, n: [1, 0, 1], p: [1, 1, 1], t: [1, 1], x: [1, 3] },
    ClassicFamily { k: 3, n: [1, -6, 12], p: [-1, 0, 12], t: [-1, 6], x: [3, 6] },
    ClassicFamily { k: 3, n: [1, 6, 12], p: [-1, 0, 12], t: [-1, -6], x: [-3, 6] },
];

/// Affine substitutions `x -> c*y` relating the q = 1 families to the
/// classic table.
pub fn classic_substitutions(k: u32) -> &'static [i64] {
    match k {
        4 => &[1, -1],
        _ => &[2, -2],
    }
}

/// `(n, p, t, X)` of a family after `x -> c*y`.
pub fn substitute(
    fam: &QuadraticFamily,
    c: i64,
) -> (IntPolynomial, IntPolynomial, IntPolynomial, IntPolynomial) {
    let sub = IntPolynomial::linear(BigInt::from(c), BigInt::from(0));
    (
        fam.n.compose(&sub),
        fam.p.compose(&sub),
        fam.t.compose(&sub),
        fam.pell.x_polynomial().compose(&sub),
    )
}

fn satisfies_trace_identity(fam: &QuadraticFamily, t: &IntPolynomial) -> bool {
    let qn = fam.n.scale(&BigInt::from(fam.spec.q));
    let one = IntPolynomial::constant(BigInt::from(1));
    qn == &(&fam.p + &one) - t
}

fn completes_square(fam: &QuadraticFamily, x: &IntPolynomial) -> bool {
    let cm = crate::families::cm_quadratic(&fam.p, &fam.t).scale(&BigInt::from(-3));
    let m = IntPolynomial::constant(BigInt::from(fam.pell.m));
    &(x * x) - &m == cm
}

/// Compares a derived family with the published closed forms and, when the
/// family is tabulated, with the table row.
pub fn audit(fam: &QuadraticFamily) -> Vec<Erratum> {
    let mut out = Vec::new();
    let spec = fam.spec;

    let t_stated = stated_trace(&spec);
    if t_stated != fam.t {
        let reason = if satisfies_trace_identity(fam, &t_stated) {
            "it differs from the derived trace".to_string()
        } else {
            "q*n = p + 1 - t fails for it".to_string()
        };
        out.push(Erratum { spec, field: "t", published: t_stated, derived: fam.t.clone(), reason });
    }

    let x_stated = stated_pell_x(&spec);
    let x_derived = fam.pell.x_polynomial();
    if x_stated != x_derived && x_stated != -&x_derived {
        let reason = if completes_square(fam, &x_stated) {
            "it differs from the derived Pell variable".to_string()
        } else {
            format!("X^2 - ({}) != -3(t^2 - 4p) for it", fam.pell.m)
        };
        out.push(Erratum { spec, field: "X", published: x_stated, derived: x_derived, reason });
    }

    for row in TABULATED.iter().filter(|r| {
        r.k == spec.k && r.q == spec.q && r.s == spec.s && r.branch == spec.branch
    }) {
        let t_row = IntPolynomial::from_i64(&row.t);
        if t_row != fam.t {
            out.push(Erratum {
                spec,
                field: "t",
                published: t_row.clone(),
                derived: fam.t.clone(),
                reason: if satisfies_trace_identity(fam, &t_row) {
                    "it differs from the derived trace".to_string()
                } else {
                    "q*n = p + 1 - t fails for the tabulated value".to_string()
                },
            });
        }
        for (field, row_poly, derived) in [("n", &row.n, &fam.n), ("p", &row.p, &fam.p)] {
            let published = IntPolynomial::from_i64(row_poly);
            if &published != derived {
                out.push(Erratum {
                    spec,
                    field,
                    published,
                    derived: derived.clone(),
                    reason: "it differs from the derived polynomial".to_string(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::build_family;

    fn fam(k: u32, q: u64, s: u64, branch: Branch) -> QuadraticFamily {
        build_family(FamilySpec { k, q, s, branch }).unwrap()
    }

    #[test]
    fn consistent_closed_forms_have_no_errata() {
        for (k, q, s, branch) in [(6, 7, 2, Branch::A), (6, 7, 3, Branch::B), (3, 7, 2, Branch::A)] {
            assert!(audit(&fam(k, q, s, branch)).is_empty());
        }
    }

    #[test]
    fn k4_pell_variable_flagged() {
        for (s, branch) in [(2, Branch::A), (3, Branch::B)] {
            let errata = audit(&fam(4, 5, s, branch));
            assert!(errata.iter().any(|e| e.field == "X"), "{errata:?}");
            assert!(errata.iter().all(|e| e.field != "t"), "{errata:?}");
        }
    }

    #[test]
    fn k3_branch_b_trace_flagged() {
        let f = fam(3, 7, 1, Branch::B);
        let errata = audit(&f);
        let t = errata.iter().find(|e| e.field == "t").unwrap();
        assert_eq!(t.derived, f.t);
        assert!(t.reason.contains("fails"));
        assert!(errata.iter().any(|e| e.field == "X"));
    }

    #[test]
    fn tabulated_q5_s3_trace_flagged() {
        let f = fam(4, 5, 3, Branch::A);
        let errata = audit(&f);
        let tab = errata
            .iter()
            .find(|e| e.field == "t" && e.published == IntPolynomial::from_i64(&[-1, -5]))
            .expect("tabulated trace erratum");
        assert_eq!(tab.derived, IntPolynomial::from_i64(&[-2, -5]));
        assert!(tab.to_string().contains("-5x-1"));
        assert!(tab.to_string().contains("-5x-2"));
    }
}
