//! Buchberger's algorithm over the rationals with a step budget.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{grevlex, Monomial, Polynomial, Rational};

/// Caps the number of reduction steps a single basis computation may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 5_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Grevlex,
    /// The last variable dominates everything; grevlex on the rest.
    EliminateLast,
}

fn grevlex_slice(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::EliminateLast => {
                let n = a.0.len();
                a.0[n - 1]
                    .cmp(&b.0[n - 1])
                    .then_with(|| grevlex_slice(&a.0[..n - 1], &b.0[..n - 1]))
            }
        }
    }
}

/// Terms stored ascending so the leading term is last.
#[derive(Clone, Debug)]
struct GPoly {
    terms: Vec<(Monomial, Rational)>,
}

impl GPoly {
    fn from_poly(p: &Polynomial, order: MonomialOrder) -> Self {
        let mut terms = p.terms().to_vec();
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        GPoly { terms }
    }

    fn lead(&self) -> Option<&(Monomial, Rational)> {
        self.terms.last()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.last() {
            let inv = c.recip();
            for t in &mut self.terms {
                t.1 = &t.1 * &inv;
            }
        }
    }

    /// `self - c * shift * g`
    fn sub_mul(&self, g: &GPoly, c: &Rational, shift: &Monomial, order: MonomialOrder) -> GPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut i = 0;
        let mut j = 0;
        let scaled = |k: usize| (g.terms[k].0.mul(shift), &g.terms[k].1 * c);
        while i < self.terms.len() && j < g.terms.len() {
            let (gm, gc) = scaled(j);
            match order.cmp(&self.terms[i].0, &gm) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((gm, -gc));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = &self.terms[i].1 - gc;
                    if !v.is_zero() {
                        out.push((gm, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        while j < g.terms.len() {
            let (gm, gc) = scaled(j);
            out.push((gm, -gc));
            j += 1;
        }
        GPoly { terms: out }
    }
}

struct Counter {
    used: u64,
    max: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.max {
            Err(Error::BudgetExhausted(self.max))
        } else {
            Ok(())
        }
    }
}

/// Fully reduces `f` modulo `basis`.
fn reduce(f: &GPoly, basis: &[GPoly], order: MonomialOrder, ctr: &mut Counter) -> Result<GPoly> {
    let mut p = f.clone();
    // remainder collected largest-first, reversed at the end
    let mut rem: Vec<(Monomial, Rational)> = Vec::new();
    while let Some((m, c)) = p.lead().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.lead().map(|(lm, _)| lm.divides(&m)).unwrap_or(false));
        match divisor {
            Some(g) => {
                ctr.tick()?;
                let (lm, lc) = g.lead().expect("nonzero");
                let coef = &c / lc;
                let shift = lm.quotient(&m);
                p = p.sub_mul(g, &coef, &shift, order);
            }
            None => {
                p.terms.pop();
                rem.push((m, c));
            }
        }
    }
    rem.reverse();
    Ok(GPoly { terms: rem })
}

/// Reduced Gröbner basis, monic, sorted descending by leading monomial in `order`.
pub fn groebner(
    gens: &[Polynomial],
    order: MonomialOrder,
    budget: Budget,
) -> Result<Vec<Polynomial>> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Ok(Vec::new()),
    };
    let mut ctr = Counter {
        used: 0,
        max: budget.max_steps,
    };
    let mut basis: Vec<GPoly> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        if g.is_constant() {
            return Ok(vec![Polynomial::one(nvars)]);
        }
        let mut gp = GPoly::from_poly(g, order);
        gp.make_monic();
        basis.push(gp);
    }
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    if basis.iter().all(|g| g.terms.len() == 1) {
        // Monomial ideals: the minimal generators already form the reduced basis.
        let mut reduced = minimal_monomials(
            basis
                .into_iter()
                .map(|g| g.lead().unwrap().0.clone())
                .collect(),
        );
        reduced.sort_by(|a, b| order.cmp(b, a));
        return Ok(reduced
            .into_iter()
            .map(|m| Polynomial::monomial(m, Rational::one()))
            .collect());
    }
    // Interreduce the input first; it keeps the pair set small.
    basis = interreduce(basis, order, &mut ctr)?;
    if basis.iter().any(|g| g.lead().unwrap().0.is_one()) {
        return Ok(vec![Polynomial::one(nvars)]);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let (idx, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = pair_lcm(&basis, **a);
                let lb = pair_lcm(&basis, **b);
                order.cmp(&la, &lb)
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(idx);
        let li = &basis[i].lead().unwrap().0;
        let lj = &basis[j].lead().unwrap().0;
        if li.is_coprime(lj) {
            continue;
        }
        let l = li.lcm(lj);
        if chain_criterion(&basis, &pairs, i, j, &l) {
            continue;
        }
        ctr.tick()?;
        let s = spoly(&basis[i], &basis[j], &l, order);
        let mut r = reduce(&s, &basis, order, &mut ctr)?;
        if r.is_zero() {
            continue;
        }
        r.make_monic();
        if r.lead().unwrap().0.is_one() {
            return Ok(vec![Polynomial::one(nvars)]);
        }
        let k = basis.len();
        basis.push(r);
        for i in 0..k {
            pairs.push((i, k));
        }
    }

    let basis = minimalize(basis);
    let mut reduced = interreduce(basis, order, &mut ctr)?;
    reduced.sort_by(|a, b| order.cmp(&b.lead().unwrap().0, &a.lead().unwrap().0));
    Ok(reduced
        .into_iter()
        .map(|g| Polynomial::from_terms(nvars, g.terms))
        .collect())
}

fn pair_lcm(basis: &[GPoly], (i, j): (usize, usize)) -> Monomial {
    basis[i].lead().unwrap().0.lcm(&basis[j].lead().unwrap().0)
}

/// Skips (i, j) if some k has lm(k) | lcm and the pairs (i,k), (j,k) were already handled.
fn chain_criterion(
    basis: &[GPoly],
    pending: &[(usize, usize)],
    i: usize,
    j: usize,
    l: &Monomial,
) -> bool {
    let is_pending = |a: usize, b: usize| {
        let p = (a.min(b), a.max(b));
        pending.contains(&p)
    };
    (0..basis.len()).any(|k| {
        k != i
            && k != j
            && basis[k].lead().map(|(m, _)| m.divides(l)).unwrap_or(false)
            && !is_pending(i, k)
            && !is_pending(j, k)
    })
}

fn spoly(f: &GPoly, g: &GPoly, l: &Monomial, order: MonomialOrder) -> GPoly {
    let (lf, cf) = f.lead().unwrap();
    let (lg, cg) = g.lead().unwrap();
    let zero = GPoly { terms: Vec::new() };
    let a = zero.sub_mul(f, &-cf.recip(), &lf.quotient(l), order);
    a.sub_mul(g, &cg.recip(), &lg.quotient(l), order)
}

/// Minimal generators of a monomial ideal.
fn minimal_monomials(ms: Vec<Monomial>) -> Vec<Monomial> {
    let mut ms: Vec<Monomial> = ms
        .into_iter()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    ms.sort_by_key(|m| m.degree());
    let mut keep: Vec<Monomial> = Vec::new();
    for m in ms {
        if !keep.iter().any(|k| k.divides(&m)) {
            keep.push(m);
        }
    }
    keep
}

fn minimalize(basis: Vec<GPoly>) -> Vec<GPoly> {
    let mut keep: Vec<GPoly> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let lm = &g.lead().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            let hm = &h.lead().unwrap().0;
            k != idx && hm.divides(lm) && (hm != lm || k < idx)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    keep
}

/// Reduces each element by the others until stable; drops zeros.
fn interreduce(
    mut basis: Vec<GPoly>,
    order: MonomialOrder,
    ctr: &mut Counter,
) -> Result<Vec<GPoly>> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let g = basis.remove(i);
            let mut r = reduce(&g, &basis, order, ctr)?;
            if r.is_zero() {
                changed = true;
                continue;
            }
            r.make_monic();
            if r.terms != g.terms {
                changed = true;
            }
            basis.insert(i, r);
            i += 1;
        }
        if !changed {
            return Ok(basis);
        }
    }
}

/// Normal form of `f` with respect to a grevlex Gröbner basis.
pub fn normal_form(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let order = MonomialOrder::Grevlex;
    let gb: Vec<GPoly> = basis.iter().map(|g| GPoly::from_poly(g, order)).collect();
    let mut ctr = Counter {
        used: 0,
        max: u64::MAX,
    };
    let r = reduce(&GPoly::from_poly(f, order), &gb, order, &mut ctr).expect("unbounded");
    Polynomial::from_terms(f.nvars(), r.terms)
}

pub fn is_unit_basis(basis: &[Polynomial]) -> bool {
    basis.len() == 1 && basis[0].is_constant() && basis[0].constant_term().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &["x".into(), "y".into(), "z".into()]).unwrap()
    }

    fn gb(gens: &[&str]) -> Vec<Polynomial> {
        let g: Vec<_> = gens.iter().map(|s| p(s)).collect();
        groebner(&g, MonomialOrder::Grevlex, Budget::default()).unwrap()
    }

    #[test]
    fn curve_derivative_basis() {
        assert_eq!(gb(&["x^2+y^5", "2*x", "5*y^4"]), vec![p("y^4"), p("x")]);
    }

    #[test]
    fn unit_and_elimination() {
        assert_eq!(gb(&["x", "x+1"]), vec![p("1")]);
        assert_eq!(gb(&["y^2-x^3", "x"]), vec![p("y^2"), p("x")]);
    }

    #[test]
    fn presentation_independent() {
        let a = gb(&["x^2-y", "x*y-1"]);
        let b = gb(&["x^2-y", "x*y-1", "x^3-x*y + (x^2-y)*z"]);
        assert_eq!(a, b);
        let c = gb(&a
            .iter()
            .map(|f| f.to_string_with(&["x".into(), "y".into(), "z".into()]))
            .collect::<Vec<_>>()
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>());
        assert_eq!(a, c);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g: Vec<_> = ["x^3-2*x*y", "x^2*y-2*y^2+x", "z^3-x*y*z+1"]
            .iter()
            .map(|s| p(s))
            .collect();
        let r = groebner(&g, MonomialOrder::Grevlex, Budget { max_steps: 3 });
        assert!(matches!(r, Err(Error::BudgetExhausted(3))));
    }

    #[test]
    fn normal_form_membership() {
        let b = gb(&["x", "y^4"]);
        assert!(normal_form(&p("x*z + y^5"), &b).is_zero());
        assert_eq!(normal_form(&p("x + y^3"), &b), p("y^3"));
    }
}
