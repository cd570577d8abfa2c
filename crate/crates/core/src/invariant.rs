//! Resolution keys: inv-vectors over ℚ≥0 ∪ {∞}, ν and ρ.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marked::Divisor;
use crate::poly::{fmt_rational, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qbar {
    Finite(Rational),
    Infinity,
}

impl Qbar {
    pub fn zero() -> Self {
        Qbar::Finite(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Qbar::Finite(q) if q.is_zero())
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "inf" {
            return Some(Qbar::Infinity);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: num_bigint::BigInt = n.parse().ok()?;
        let d: num_bigint::BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Qbar::Finite(Rational::new(n, d)))
    }
}

impl fmt::Display for Qbar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qbar::Finite(q) => f.write_str(&fmt_rational(q)),
            Qbar::Infinity => f.write_str("inf"),
        }
    }
}

/// Finite prefix of an infinite sequence padded with zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct InvVector(Vec<Qbar>);

impl InvVector {
    pub fn new(mut entries: Vec<Qbar>) -> Self {
        while entries.last().map(Qbar::is_zero).unwrap_or(false) {
            entries.pop();
        }
        InvVector(entries)
    }

    pub fn entries(&self) -> &[Qbar] {
        &self.0
    }

    pub fn prepend(&self, head: &[Qbar]) -> Self {
        let mut v = head.to_vec();
        v.extend(self.0.iter().cloned());
        InvVector::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for InvVector {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        let z = Qbar::zero();
        for i in 0..n {
            let a = self.0.get(i).unwrap_or(&z);
            let b = other.0.get(i).unwrap_or(&z);
            match a.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for InvVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for InvVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        parts.push("0...".into());
        write!(f, "({})", parts.join(", "))
    }
}

/// A subset of E, stored newest divisor first. Vec ordering gives the
/// Sub(E) comparison with the empty tail below any divisor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rho(Vec<Divisor>);

impl Rho {
    pub fn new(mut divisors: Vec<Divisor>) -> Self {
        divisors.sort_by(|a, b| b.cmp(a));
        divisors.dedup();
        Rho(divisors)
    }

    pub fn empty() -> Self {
        Rho(Vec::new())
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResolutionKey {
    pub inv: InvVector,
    pub nu: Rational,
    pub rho: Rho,
}

impl ResolutionKey {
    pub fn terminal(head: &[Qbar]) -> Self {
        let mut v = head.to_vec();
        v.push(Qbar::Infinity);
        ResolutionKey {
            inv: InvVector::new(v),
            nu: Rational::zero(),
            rho: Rho::empty(),
        }
    }

    pub fn prepend(&self, head: &[Qbar]) -> Self {
        ResolutionKey {
            inv: self.inv.prepend(head),
            nu: self.nu.clone(),
            rho: self.rho.clone(),
        }
    }

    /// `Some(k)` when inv = (1,0)^k, ∞ with k ≥ 1.
    pub fn stop_marker_codim(&self) -> Option<usize> {
        let e = self.inv.entries();
        if e.len() < 3 || e.len().is_multiple_of(2) || e.last() != Some(&Qbar::Infinity) {
            return None;
        }
        let one = Qbar::Finite(rat(1));
        let ok = e[..e.len() - 1]
            .chunks(2)
            .all(|c| c[0] == one && c[1].is_zero());
        ok.then_some(e.len() / 2)
    }

    pub fn to_json(&self) -> KeyJson {
        KeyJson {
            inv: self.inv.entries().iter().map(|q| q.to_string()).collect(),
            nu: fmt_rational(&self.nu),
            rho: self.rho.divisors().iter().map(|d| d.name.clone()).collect(),
        }
    }
}

/// Lexicographic on inv, ties broken by ρ.
impl Ord for ResolutionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.inv
            .cmp(&other.inv)
            .then_with(|| self.rho.cmp(&other.rho))
    }
}

impl PartialOrd for ResolutionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ResolutionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rho: Vec<_> = self
            .rho
            .divisors()
            .iter()
            .map(|d| d.name.as_str())
            .collect();
        write!(
            f,
            "{} nu={} rho={{{}}}",
            self.inv,
            fmt_rational(&self.nu),
            rho.join(",")
        )
    }
}

/// Comparison that first checks both ρ live in `ledger`.
pub fn compare_key(a: &ResolutionKey, b: &ResolutionKey, ledger: &[Divisor]) -> Result<Ordering> {
    let known = |k: &ResolutionKey| k.rho.divisors().iter().all(|d| ledger.contains(d));
    if !known(a) || !known(b) {
        return Err(Error::LedgerMismatch);
    }
    Ok(a.cmp(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyJson {
    pub inv: Vec<String>,
    pub nu: String,
    pub rho: Vec<String>,
}

/// ρ and ν for the monomial x^a with mark μ; `None` when Σa < μ.
pub fn compute_rho_nu_monomial(exps: &[(Divisor, u32)], mu: u64) -> Option<(Rho, Rational)> {
    let total: u64 = exps.iter().map(|(_, a)| *a as u64).sum();
    if total < mu {
        return None;
    }
    let nu = Rational::new(total.into(), mu.into());
    let live: Vec<&(Divisor, u32)> = exps.iter().filter(|(_, a)| *a > 0).collect();
    assert!(live.len() < 32, "too many divisors through a point");
    let mut best: Option<Rho> = None;
    for mask in 1u32..(1 << live.len()) {
        let chosen: Vec<_> = (0..live.len()).filter(|i| mask >> i & 1 == 1).collect();
        let sum: u64 = chosen.iter().map(|&i| live[i].1 as u64).sum();
        if sum < mu {
            continue;
        }
        if chosen.iter().any(|&i| sum - live[i].1 as u64 >= mu) {
            continue;
        }
        let rho = Rho::new(chosen.iter().map(|&i| live[i].0.clone()).collect());
        if best.as_ref().map(|b| rho > *b).unwrap_or(true) {
            best = Some(rho);
        }
    }
    Some((best.expect("the full set contains a minimal subset"), nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn q(s: &str) -> Qbar {
        Qbar::parse(s).unwrap()
    }

    fn inv(s: &[&str]) -> InvVector {
        InvVector::new(s.iter().map(|x| q(x)).collect())
    }

    fn key(s: &[&str], rho: Vec<Divisor>) -> ResolutionKey {
        ResolutionKey {
            inv: inv(s),
            nu: rat(0),
            rho: Rho::new(rho),
        }
    }

    fn d(i: u32) -> Divisor {
        Divisor::exceptional(i)
    }

    #[test]
    fn lexicographic_examples() {
        assert!(inv(&["2", "0", "5/2", "inf"]) > inv(&["2", "0", "0"]));
        assert!(inv(&["1", "1", "2", "0"]) > inv(&["1", "1", "0"]));
        assert_eq!(inv(&["1", "0", "0"]), inv(&["1"]));
        assert!(key(&["0"], vec![d(2)]) > key(&["0"], vec![d(1)]));
        assert!(key(&["0"], vec![d(2)]) < key(&["0"], vec![d(1), d(2)]));
        assert!(inv(&["1", "inf"]) > inv(&["1", "1000"]));
    }

    #[test]
    fn ledger_check() {
        let a = key(&["1"], vec![d(3)]);
        let b = key(&["1"], vec![]);
        assert_eq!(compare_key(&a, &b, &[d(3)]), Ok(Ordering::Greater));
        assert_eq!(compare_key(&a, &b, &[d(1)]), Err(Error::LedgerMismatch));
    }

    #[test]
    fn monomial_examples() {
        let (r, nu) = compute_rho_nu_monomial(&[(d(1), 2), (d(2), 3)], 4).unwrap();
        assert_eq!((r, nu), (Rho::new(vec![d(1), d(2)]), ratio(5, 4)));
        let (r, nu) = compute_rho_nu_monomial(&[(d(1), 3)], 2).unwrap();
        assert_eq!((r, nu), (Rho::new(vec![d(1)]), ratio(3, 2)));
        let (r, _) = compute_rho_nu_monomial(&[(d(1), 1), (d(2), 1), (d(3), 1)], 2).unwrap();
        assert_eq!(r.divisors(), &[d(3), d(2)]);
        assert!(compute_rho_nu_monomial(&[(d(1), 1)], 2).is_none());
    }

    #[test]
    fn stop_marker() {
        assert_eq!(key(&["1", "0", "inf"], vec![]).stop_marker_codim(), Some(1));
        assert_eq!(
            key(&["1", "0", "1", "0", "inf"], vec![]).stop_marker_codim(),
            Some(2)
        );
        assert_eq!(key(&["1", "1", "inf"], vec![]).stop_marker_codim(), None);
        assert_eq!(key(&["0", "inf"], vec![]).stop_marker_codim(), None);
    }

    #[test]
    fn json_form() {
        let k = key(&["2", "0", "5/2", "inf"], vec![d(1), d(2)]);
        let j = serde_json::to_string(&k.to_json()).unwrap();
        assert_eq!(
            j,
            r#"{"inv":["2","0","5/2","inf"],"nu":"0","rho":["D2","D1"]}"#
        );
    }
}
