//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept sorted by the graded reverse lexicographic order (largest
//! first) with no zero coefficients, so structural equality is polynomial
//! equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Largest constant or leading coefficient whose divisors we enumerate.
const ROOT_SEARCH_CAP: u64 = 1 << 40;

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Graded reverse lexicographic comparison with `x_0 > x_1 > ...`.
pub fn grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.0.iter().zip(&b.0).rev() {
        if x != y {
            // smaller exponent in the last differing variable wins
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Monomial, Rational)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_terms(nvars, vec![(Monomial::one(nvars), c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_terms(nvars, vec![(Monomial::var(nvars, i), Rational::one())])
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let n = m.nvars();
        Self::from_terms(n, vec![(m, c)])
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(nvars: usize, terms: Vec<(Monomial, Rational)>) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        Polynomial { nvars, terms }
    }

    /// Terms must already be strictly grevlex-descending with nonzero coefficients.
    pub(crate) fn from_sorted_terms(nvars: usize, terms: Vec<(Monomial, Rational)>) -> Self {
        Polynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.is_constant()
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Minimal total degree of a term; `None` for the zero polynomial.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Leading coefficient normalized to one (grevlex).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[var] > 0)
            .map(|(m, c)| {
                let mut e = m.0.clone();
                let k = e[var];
                e[var] -= 1;
                (Monomial(e), c * rat(k as i64))
            })
            .collect();
        Self::from_terms(self.nvars, terms)
    }

    /// Ring-homomorphic substitution `x_i -> images[i]`; the result lives in
    /// the ring of the images.
    pub fn substitute(&self, images: &[Polynomial]) -> Self {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut cache: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut acc = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cache
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e))
                    .clone();
                t = &t * &p;
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Replaces `x_var` by `value` and keeps the ring.
    pub fn substitute_var(&self, var: usize, value: &Polynomial) -> Self {
        let images: Vec<_> = (0..self.nvars)
            .map(|i| {
                if i == var {
                    value.clone()
                } else {
                    Self::var(self.nvars, i)
                }
            })
            .collect();
        self.substitute(&images)
    }

    /// Sets the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[usize]) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.0[v] == 0))
                .cloned()
                .collect(),
        }
    }

    /// Largest `k` with `x_var^k | self`; `None` for zero.
    pub fn var_valuation(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.0[var]).min()
    }

    /// Exact division by `x_var^k`; `None` when some term is not divisible.
    pub fn div_var_pow(&self, var: usize, k: u32) -> Option<Self> {
        if k == 0 {
            return Some(self.clone());
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if m.0[var] < k {
                return None;
            }
            let mut e = m.0.clone();
            e[var] -= k;
            terms.push((Monomial(e), c.clone()));
        }
        // dividing every term by the same monomial preserves grevlex order
        Some(Polynomial::from_sorted_terms(self.nvars, terms))
    }

    /// Exact division by the monomial `m`.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, c) in &self.terms {
            if !m.divides(t) {
                return None;
            }
            terms.push((m.quotient(t), c.clone()));
        }
        Some(Polynomial::from_sorted_terms(self.nvars, terms))
    }

    /// Multivariate division with remainder by a single divisor.
    pub fn div_rem(&self, g: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!g.is_zero(), "division by zero polynomial");
        let (lm, lc) = g.leading().cloned().expect("nonzero");
        let mut quotient = Vec::new();
        let mut rem_terms = Vec::new();
        let mut p = self.clone();
        while let Some((m, c)) = p.leading().cloned() {
            if lm.divides(&m) {
                let q = lm.quotient(&m);
                let coef = &c / &lc;
                p = &p - &g.mul_monomial(&q).scale(&coef);
                quotient.push((q, coef));
            } else {
                rem_terms.push((m, c));
                p.terms.remove(0);
            }
        }
        (
            Polynomial::from_terms(self.nvars, quotient),
            Polynomial::from_terms(self.nvars, rem_terms),
        )
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide `self`.
    pub fn exact_div(&self, g: &Polynomial) -> Option<Polynomial> {
        let (q, r) = self.div_rem(g);
        r.is_zero().then_some(q)
    }

    /// Largest `k` with `g^k | self`, for non-constant `g`.
    pub fn valuation_by(&self, g: &Polynomial) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut p = self.clone();
        while let Some(q) = p.exact_div(g) {
            p = q;
            k += 1;
        }
        Some(k)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.0[var]).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.0[var] > 0)
    }

    /// Coefficient of the degree-one monomial `x_var`.
    pub fn linear_coefficient(&self, var: usize) -> Rational {
        self.coefficient(&Monomial::var(self.nvars, var))
    }

    /// If `self = c * x_var + r` with `c` a nonzero constant and `r` free of
    /// `x_var`, returns `(c, r)`.
    pub fn solve_linear(&self, var: usize) -> Option<(Rational, Polynomial)> {
        if self.degree_in(var) != 1 {
            return None;
        }
        let mut c = None;
        let mut rest = Vec::new();
        for (m, a) in &self.terms {
            if m.0[var] == 1 {
                if m.degree() != 1 {
                    return None;
                }
                c = Some(a.clone());
            } else {
                rest.push((m.clone(), a.clone()));
            }
        }
        c.map(|c| (c, Polynomial::from_sorted_terms(self.nvars, rest)))
    }

    /// A factor `x_t - r` with `r` rational when `self` is a polynomial in the
    /// single variable `x_t`. Coefficients too large to enumerate give `None`.
    pub fn rational_root_factor(&self) -> Option<Polynomial> {
        let vars: Vec<usize> = (0..self.nvars).filter(|&v| self.involves(v)).collect();
        let [t] = vars[..] else { return None };
        let xt = Polynomial::var(self.nvars, t);
        let deg = self.degree_in(t) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[t] as usize] = c.clone();
        }
        if coeffs[0].is_zero() {
            return Some(xt);
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * Rational::from(den.clone())).to_integer())
            .collect();
        let small = |b: &BigInt| {
            u64::try_from(b.abs())
                .ok()
                .filter(|&v| v <= ROOT_SEARCH_CAP)
        };
        let (a0, an) = (small(&ints[0])?, small(&ints[deg])?);
        let eval = |r: &Rational| {
            coeffs
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * r + c)
        };
        for q in divisors(an) {
            for p in divisors(a0) {
                for sign in [1i64, -1] {
                    let r = Rational::new(BigInt::from(p) * sign, BigInt::from(q));
                    if eval(&r).is_zero() {
                        return Some(&xt - &Polynomial::constant(self.nvars, r));
                    }
                }
            }
        }
        None
    }

    /// Embeds into a ring with `extra` additional trailing variables.
    pub fn extend(&self, extra: usize) -> Self {
        let n = self.nvars + extra;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(n, 0);
                (Monomial(e), c.clone())
            })
            .collect();
        Polynomial::from_terms(n, terms)
    }

    /// Drops trailing variables that do not occur.
    pub fn truncate(&self, nvars: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                debug_assert!(m.0[nvars..].iter().all(|&e| e == 0));
                (Monomial(m.0[..nvars].to_vec()), c.clone())
            })
            .collect();
        Polynomial::from_terms(nvars, terms)
    }

    /// Renders with the given variable names, e.g. `x^2 + 2*x*y - 1/3`.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(fmt_rational(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Default variable names `x0, x1, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_names(self.nvars)))
    }
}

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    assert_eq!(a.nvars, b.nvars, "ring mismatch");
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() && j < b.terms.len() {
        let (ma, ca) = &a.terms[i];
        let (mb, cb) = &b.terms[j];
        match grevlex(ma, mb) {
            Ordering::Greater => {
                terms.push((ma.clone(), ca.clone()));
                i += 1;
            }
            Ordering::Less => {
                terms.push((mb.clone(), if negate_b { -cb } else { cb.clone() }));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { ca - cb } else { ca + cb };
                if !c.is_zero() {
                    terms.push((ma.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    terms.extend(a.terms[i..].iter().cloned());
    terms.extend(
        b.terms[j..]
            .iter()
            .map(|(m, c)| (m.clone(), if negate_b { -c } else { c.clone() })),
    );
    Polynomial::from_sorted_terms(a.nvars, terms)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        Polynomial::from_sorted_terms(self.nvars, terms)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Polynomial, Polynomial) {
        (Polynomial::var(2, 0), Polynomial::var(2, 1))
    }

    #[test]
    fn grevlex_orders_by_degree_then_reverse_lex() {
        let x2 = Monomial(vec![2, 0, 0]);
        let xy = Monomial(vec![1, 1, 0]);
        let xz = Monomial(vec![1, 0, 1]);
        let y2 = Monomial(vec![0, 2, 0]);
        assert_eq!(grevlex(&x2, &xy), Ordering::Greater);
        assert_eq!(grevlex(&xy, &y2), Ordering::Greater);
        assert_eq!(grevlex(&y2, &xz), Ordering::Greater);
    }

    #[test]
    fn derivative_power_rule() {
        let (x, y) = xy();
        let f = &x.pow(2) + &y.pow(5);
        assert_eq!(f.partial_derivative(0), x.scale(&rat(2)));
        assert_eq!(f.partial_derivative(1), y.pow(4).scale(&rat(5)));
        assert!(Polynomial::constant(2, rat(7))
            .partial_derivative(0)
            .is_zero());
    }

    #[test]
    fn order_at_origin_cases() {
        let (x, y) = xy();
        assert_eq!((&x.pow(2) + &y.pow(5)).order_at_origin(), Some(2));
        assert_eq!((&Polynomial::one(2) + &x).order_at_origin(), Some(0));
        assert_eq!(Polynomial::zero(2).order_at_origin(), None);
    }

    #[test]
    fn substitution_examples() {
        let (x, y) = xy();
        let f = x.pow(2);
        let g = f.substitute(&[&x + &y.pow(2), y.clone()]);
        let expect = &(&x.pow(2) + &(&x * &y.pow(2)).scale(&rat(2))) + &y.pow(4);
        assert_eq!(g, expect);

        let c = &x.pow(2) + &y.pow(5);
        let chart = c.substitute(&[&x * &y, y.clone()]);
        assert_eq!(chart, &(&y.pow(2) * &x.pow(2)) + &y.pow(5));
        assert_eq!(c.substitute(&[x.clone(), y.clone()]), c);
    }

    #[test]
    fn exact_division_and_valuations() {
        let (x, y) = xy();
        let f = &y.pow(2) * &(&x.pow(2) + &y.pow(3));
        assert_eq!(f.var_valuation(1), Some(2));
        assert_eq!(f.div_var_pow(1, 2).unwrap(), &x.pow(2) + &y.pow(3));
        assert!(f.div_var_pow(1, 3).is_none());
        let g = &x + &Polynomial::one(2);
        let h = &g.pow(3) * &y;
        assert_eq!(h.valuation_by(&g), Some(3));
    }

    #[test]
    fn rational_roots_become_linear_factors() {
        let (x, y) = xy();
        let one = Polynomial::one(2);
        let f = &y * &(&y + &one);
        assert_eq!(f.rational_root_factor(), Some(y.clone()));
        let g = &(&y.scale(&rat(3)) - &Polynomial::constant(2, rat(2))) * &(&y.pow(2) + &one);
        let r = g.rational_root_factor().unwrap();
        assert!(g.exact_div(&r).is_some());
        assert_eq!(r.degree_in(1), 1);
        assert!((&y.pow(2) + &one).rational_root_factor().is_none());
        assert!((&x + &y).rational_root_factor().is_none());
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn solve_linear_requires_constant_coefficient() {
        let (x, y) = xy();
        let u = &x + &y.pow(2);
        let (c, r) = u.solve_linear(0).unwrap();
        assert_eq!(c, rat(1));
        assert_eq!(r, y.pow(2));
        assert!((&x * &y).solve_linear(0).is_none());
        assert!(x.pow(2).solve_linear(0).is_none());
    }

    #[test]
    fn display_uses_names() {
        let (x, y) = xy();
        let f = &(&x.pow(2) - &y.scale(&ratio(1, 3))) + &Polynomial::one(2);
        assert_eq!(
            f.to_string_with(&["x".into(), "y".into()]),
            "x^2 - 1/3*y + 1"
        );
    }
}
