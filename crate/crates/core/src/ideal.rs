//! Finitely generated ideals with a memoized reduced Gröbner basis.

use std::fmt;
use std::sync::OnceLock;

use num_traits::One;

use crate::error::{Error, Result};
use crate::groebner::{groebner, is_unit_basis, normal_form, Budget, MonomialOrder};
use crate::poly::{default_names, Polynomial};

#[derive(Clone, Debug)]
pub struct Ideal {
    nvars: usize,
    gens: Vec<Polynomial>,
    budget: Budget,
    basis: OnceLock<Vec<Polynomial>>,
}

impl Ideal {
    pub fn new(nvars: usize, gens: Vec<Polynomial>) -> Self {
        Self::with_budget(nvars, gens, Budget::default())
    }

    pub fn with_budget(nvars: usize, gens: Vec<Polynomial>, budget: Budget) -> Self {
        let gens: Vec<_> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        debug_assert!(gens.iter().all(|g| g.nvars() == nvars));
        Ideal {
            nvars,
            gens,
            budget,
            basis: OnceLock::new(),
        }
    }

    pub fn principal(f: Polynomial) -> Self {
        let n = f.nvars();
        Self::new(n, vec![f])
    }

    pub fn unit(nvars: usize) -> Self {
        Self::new(nvars, vec![Polynomial::one(nvars)])
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(nvars, Vec::new())
    }

    /// The ideal generated by the listed coordinates.
    pub fn coordinates(nvars: usize, vars: &[usize]) -> Self {
        Self::new(
            nvars,
            vars.iter().map(|&v| Polynomial::var(nvars, v)).collect(),
        )
    }

    /// Same budget, new generators.
    pub fn derive(&self, gens: Vec<Polynomial>) -> Self {
        Self::with_budget(self.nvars, gens, self.budget)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn set_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Reduced grevlex basis, sorted descending by leading monomial.
    pub fn basis(&self) -> Result<&[Polynomial]> {
        if let Some(b) = self.basis.get() {
            return Ok(b);
        }
        let b = groebner(&self.gens, MonomialOrder::Grevlex, self.budget)?;
        Ok(self.basis.get_or_init(|| b))
    }

    /// The ideal presented by its reduced basis.
    pub fn canonical(&self) -> Result<Ideal> {
        let b = self.basis()?.to_vec();
        let out = self.derive(b.clone());
        let _ = out.basis.set(b);
        Ok(out)
    }

    pub fn is_unit(&self) -> Result<bool> {
        if self.gens.iter().any(|g| g.is_unit()) {
            return Ok(true);
        }
        if self.is_zero() {
            return Ok(false);
        }
        Ok(is_unit_basis(self.basis()?))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        Ok(normal_form(f, self.basis()?).is_zero())
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        for g in other.gens() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        Ok(self.basis()? == other.basis()?)
    }

    /// `f` vanishes on V(self): 1 ∈ self + (1 - t f) with an extra variable t.
    pub fn radical_contains(&self, f: &Polynomial) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let n = self.nvars;
        let mut gens: Vec<_> = self.gens.iter().map(|g| g.extend(1)).collect();
        let t = Polynomial::var(n + 1, n);
        gens.push(&Polynomial::one(n + 1) - &(&t * &f.extend(1)));
        let b = groebner(&gens, MonomialOrder::Grevlex, self.budget)?;
        Ok(is_unit_basis(&b))
    }

    pub fn radical_contains_ideal(&self, other: &Ideal) -> Result<bool> {
        for g in other.gens() {
            if !self.radical_contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// V(self) = V(other).
    pub fn same_zero_set(&self, other: &Ideal) -> Result<bool> {
        Ok(self.radical_contains_ideal(other)? && other.radical_contains_ideal(self)?)
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        self.derive(g)
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        let a = self.basis()?;
        let b = other.basis()?;
        let mut g = Vec::with_capacity(a.len() * b.len());
        for f in a {
            for h in b {
                g.push(f * h);
            }
        }
        self.derive(g).canonical()
    }

    pub fn pow(&self, k: u32) -> Result<Ideal> {
        if k == 0 {
            return Ok(self.derive(vec![Polynomial::one(self.nvars)]));
        }
        let mut base = self.canonical()?;
        let mut acc: Option<Ideal> = None;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.product(&base)?,
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k == 0 {
                return Ok(acc.expect("k > 0"));
            }
            base = base.product(&base)?;
        }
    }

    /// I plus all first partials of its generators.
    pub fn derivative(&self) -> Ideal {
        let mut g = self.gens.clone();
        for f in &self.gens {
            for v in 0..self.nvars {
                g.push(f.partial_derivative(v));
            }
        }
        self.derive(g)
    }

    /// D^i, interreduced after each step.
    pub fn derivative_iter(&self, i: u32) -> Result<Ideal> {
        let mut acc = self.clone();
        for _ in 0..i {
            if acc.is_unit()? {
                break;
            }
            acc = acc.canonical()?.derivative().canonical()?;
        }
        Ok(acc)
    }

    /// Smallest μ with D^μ(I) = (1); 0 for the unit ideal.
    pub fn max_order(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let mut acc = self.canonical()?;
        let mut mu = 0;
        while !acc.is_unit()? {
            acc = acc.derivative().canonical()?;
            mu += 1;
        }
        Ok(mu)
    }

    /// max k with I ⊆ (x_var)^k.
    pub fn variable_valuation(&self, var: usize) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Ok(self
            .basis()?
            .iter()
            .map(|f| f.var_valuation(var).expect("nonzero"))
            .min()
            .expect("nonempty"))
    }

    /// Divides every basis element by x_var^k; `None` if not exact.
    pub fn div_var_pow(&self, var: usize, k: u32) -> Result<Option<Ideal>> {
        let mut g = Vec::new();
        for f in self.basis()? {
            match f.div_var_pow(var, k) {
                Some(q) => g.push(q),
                None => return Ok(None),
            }
        }
        Ok(Some(self.derive(g)))
    }

    pub fn substitute(&self, images: &[Polynomial]) -> Ideal {
        let n = images.first().map(|p| p.nvars()).unwrap_or(self.nvars);
        let g = self.gens.iter().map(|f| f.substitute(images)).collect();
        Ideal::with_budget(n, g, self.budget)
    }

    pub fn restrict_zero(&self, vars: &[usize]) -> Ideal {
        self.derive(self.gens.iter().map(|f| f.restrict_zero(vars)).collect())
    }

    /// Smoothness of V(I): I plus the codim-size Jacobian minors is the unit ideal.
    pub fn jacobian_unit_check(&self, codim: usize) -> Result<bool> {
        self.jacobian_ideal(codim)?.is_unit()
    }

    /// I plus all codim-size minors of the Jacobian of its reduced basis.
    pub fn jacobian_ideal(&self, codim: usize) -> Result<Ideal> {
        if codim == 0 {
            return Ok(self.derive(vec![Polynomial::one(self.nvars)]));
        }
        let basis = self.basis()?.to_vec();
        let jac: Vec<Vec<Polynomial>> = basis
            .iter()
            .map(|f| (0..self.nvars).map(|v| f.partial_derivative(v)).collect())
            .collect();
        let mut gens = basis.clone();
        for rows in subsets(basis.len(), codim) {
            for cols in subsets(self.nvars, codim) {
                let m: Vec<Vec<Polynomial>> = rows
                    .iter()
                    .map(|&r| cols.iter().map(|&c| jac[r][c].clone()).collect())
                    .collect();
                gens.push(determinant(&m));
            }
        }
        Ok(self.derive(gens))
    }

    /// I ∩ J, via (t I + (1 - t) J) ∩ ℚ[x].
    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        let n = self.nvars;
        let t = Polynomial::var(n + 1, n);
        let one_minus_t = &Polynomial::one(n + 1) - &t;
        let mut gens: Vec<_> = self.gens.iter().map(|g| &t * &g.extend(1)).collect();
        gens.extend(other.gens.iter().map(|g| &one_minus_t * &g.extend(1)));
        let b = groebner(&gens, MonomialOrder::EliminateLast, self.budget)?;
        Ok(self.derive(
            b.iter()
                .filter(|p| !p.involves(n))
                .map(|p| p.truncate(n))
                .collect(),
        ))
    }

    /// I : J^∞ = ∩_h I : h^∞ over the generators h of J.
    pub fn saturate_ideal(&self, j: &Ideal) -> Result<Ideal> {
        let mut acc: Option<Ideal> = None;
        for h in j.basis()? {
            let s = self.saturate(h)?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.intersect(&s)?,
            });
        }
        Ok(acc.unwrap_or_else(|| self.derive(vec![Polynomial::one(self.nvars)])))
    }

    /// I : h^∞, via (I + (1 - t h)) ∩ ℚ[x].
    pub fn saturate(&self, h: &Polynomial) -> Result<Ideal> {
        let n = self.nvars;
        let t = Polynomial::var(n + 1, n);
        let mut gens: Vec<_> = self.gens.iter().map(|g| g.extend(1)).collect();
        gens.push(&Polynomial::one(n + 1) - &(&t * &h.extend(1)));
        let b = groebner(&gens, MonomialOrder::EliminateLast, self.budget)?;
        Ok(self.derive(
            b.iter()
                .filter(|p| !p.involves(n))
                .map(|p| p.truncate(n))
                .collect(),
        ))
    }

    /// gcd of the basis elements, monic; 1 for the unit ideal.
    pub fn basis_gcd(&self) -> Result<Polynomial> {
        let b = self.basis()?;
        let mut g = b[0].clone();
        for f in &b[1..] {
            g = poly_gcd(&g, f, self.budget)?;
            if g.is_constant() {
                break;
            }
        }
        Ok(g.monic())
    }

    pub fn to_strings(&self, names: &[String]) -> Result<Vec<String>> {
        Ok(self
            .basis()?
            .iter()
            .map(|f| f.to_string_with(names))
            .collect())
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let s: Vec<_> = self.gens.iter().map(|g| g.to_string_with(&names)).collect();
        write!(f, "({})", s.join(", "))
    }
}

/// lcm via (t f, (1 - t) g) ∩ ℚ[x].
pub fn poly_lcm(f: &Polynomial, g: &Polynomial, budget: Budget) -> Result<Polynomial> {
    let n = f.nvars();
    let t = Polynomial::var(n + 1, n);
    let one_minus_t = &Polynomial::one(n + 1) - &t;
    let gens = vec![&t * &f.extend(1), &one_minus_t * &g.extend(1)];
    let b = groebner(&gens, MonomialOrder::EliminateLast, budget)?;
    let l = b
        .iter()
        .find(|p| !p.involves(n))
        .expect("intersection of principal ideals is principal");
    Ok(l.truncate(n).monic())
}

pub fn poly_gcd(f: &Polynomial, g: &Polynomial, budget: Budget) -> Result<Polynomial> {
    let n = f.nvars();
    if f.is_zero() {
        return Ok(g.monic());
    }
    if g.is_zero() {
        return Ok(f.monic());
    }
    if f.is_constant() || g.is_constant() {
        return Ok(Polynomial::one(n));
    }
    let l = poly_lcm(f, g, budget)?;
    let q = (f * g).exact_div(&l).expect("lcm divides product");
    Ok(q.monic())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn determinant(m: &[Vec<Polynomial>]) -> Polynomial {
    let k = m.len();
    let n = m[0][0].nvars();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(n);
    for c in 0..k {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][c] * &determinant(&minor);
        acc = if c % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// Sorted-subset enumeration shared with the resolver.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n, k)
}

#[allow(dead_code)]
fn is_one(p: &Polynomial) -> bool {
    p.is_constant() && p.constant_term().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &names()).unwrap()
    }

    fn id(gs: &[&str]) -> Ideal {
        Ideal::new(3, gs.iter().map(|s| p(s)).collect())
    }

    #[test]
    fn unit_detection() {
        assert!(!id(&["x", "y^4"]).is_unit().unwrap());
        assert!(id(&["x", "x+1"]).is_unit().unwrap());
        assert!(!id(&["0"]).is_unit().unwrap());
    }

    #[test]
    fn radical_membership_examples() {
        assert!(id(&["x^2"]).radical_contains(&p("x")).unwrap());
        assert!(!id(&["x^2"]).radical_contains(&p("y")).unwrap());
        assert!(id(&["x^2", "y^2"]).radical_contains(&p("x+y")).unwrap());
    }

    #[test]
    fn valuations() {
        assert_eq!(id(&["y^2*(x^2+y^3)"]).variable_valuation(1).unwrap(), 2);
        assert_eq!(id(&["x^2+y^5"]).variable_valuation(0).unwrap(), 0);
        assert_eq!(
            id(&["x^3*y^2", "x^4*y^2"]).variable_valuation(0).unwrap(),
            3
        );
        assert_eq!(id(&[]).variable_valuation(0), Err(Error::ZeroIdeal));
    }

    #[test]
    fn jacobian_examples() {
        assert!(!id(&["x^2+y^3"]).jacobian_unit_check(1).unwrap());
        assert!(id(&["x"]).jacobian_unit_check(1).unwrap());
        assert!(id(&["x^2+y+1"]).jacobian_unit_check(1).unwrap());
    }

    #[test]
    fn derivative_and_order() {
        let d = id(&["x^2+y^5"]).derivative();
        assert!(d.equals(&id(&["x", "y^4"])).unwrap());
        assert!(id(&["x^2+y^5"])
            .derivative_iter(2)
            .unwrap()
            .is_unit()
            .unwrap());
        assert_eq!(id(&["x^2+y^5"]).max_order().unwrap(), 2);
        // 1+x vanishes at x = -1, so order one is attained there
        assert_eq!(id(&["1+x"]).max_order().unwrap(), 1);
        assert_eq!(id(&["1"]).max_order().unwrap(), 0);
        assert_eq!(id(&["y^2-x^3"]).max_order().unwrap(), 2);
    }

    #[test]
    fn gcd_lcm() {
        let b = Budget::default();
        let g = poly_gcd(&p("x^2-y^2"), &p("x^2+2*x*y+y^2"), b).unwrap();
        assert_eq!(g, p("x+y"));
        assert_eq!(poly_gcd(&p("x"), &p("y"), b).unwrap(), p("1"));
        assert_eq!(id(&["x*y^2", "x^2*y"]).basis_gcd().unwrap(), p("x*y"));
    }
}
