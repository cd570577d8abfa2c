//! Marked ideals (I, E, μ) and the constructions on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::poly::{rat, ratio, Monomial, Polynomial, Rational};
use crate::region::Region;

/// Largest mark a coefficient ideal may carry before we give up.
pub const MARK_CAP: u64 = 5040;

/// A boundary divisor. Ordered by birth, then by input position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Divisor {
    pub birth: u32,
    pub seq: u32,
    pub name: String,
}

impl Divisor {
    pub fn exceptional(birth: u32) -> Self {
        Divisor {
            birth,
            seq: 0,
            name: format!("D{birth}"),
        }
    }

    pub fn input(seq: u32, name: impl Into<String>) -> Self {
        Divisor {
            birth: 0,
            seq,
            name: name.into(),
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A divisor present in a chart as the hyperplane `x_var = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryEntry {
    pub divisor: Divisor,
    pub var: usize,
}

/// Boundary kept sorted by divisor order.
pub type Boundary = Vec<BoundaryEntry>;

pub fn sort_boundary(b: &mut Boundary) {
    b.sort_by(|a, c| a.divisor.cmp(&c.divisor));
}

pub fn boundary_var(b: &Boundary, d: &Divisor) -> Option<usize> {
    b.iter().find(|e| &e.divisor == d).map(|e| e.var)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Canonical,
    #[serde(alias = "bv")]
    BravoVillamayor,
}

#[derive(Clone, Debug)]
pub struct MarkedIdeal {
    pub ideal: Ideal,
    pub mark: u64,
    pub boundary: Boundary,
}

/// Result of the companion construction.
#[derive(Clone, Debug)]
pub struct Companion {
    pub marked: MarkedIdeal,
    pub ord_n: u64,
    /// First entry of the invariant contributed by Step 2a.
    pub prefix: Rational,
    /// True for the modified companion `(M, 1)`.
    pub monomial_only: bool,
}

fn factorial(n: u64) -> Result<u64> {
    let mut acc: u64 = 1;
    for k in 2..=n {
        acc = acc
            .checked_mul(k)
            .filter(|&a| a <= MARK_CAP)
            .ok_or(Error::MarkCapExceeded(MARK_CAP))?;
    }
    Ok(acc)
}

impl MarkedIdeal {
    pub fn new(ideal: Ideal, mark: u64, mut boundary: Boundary) -> Self {
        sort_boundary(&mut boundary);
        MarkedIdeal {
            ideal,
            mark,
            boundary,
        }
    }

    pub fn nvars(&self) -> usize {
        self.ideal.nvars()
    }

    fn with_ideal(&self, ideal: Ideal, mark: u64) -> Self {
        MarkedIdeal {
            ideal,
            mark,
            boundary: self.boundary.clone(),
        }
    }

    /// D^{μ-1}(I), whose zero set is the support.
    pub fn support_ideal(&self) -> Result<Ideal> {
        if self.mark == 0 {
            return Ok(Ideal::zero(self.nvars()));
        }
        self.ideal.derivative_iter(iter_count(self.mark - 1)?)
    }

    pub fn support_is_empty(&self) -> Result<bool> {
        self.support_is_empty_in(&Region::whole())
    }

    pub fn support_is_empty_in(&self, region: &Region) -> Result<bool> {
        if self.mark == 0 {
            return Ok(false);
        }
        Ok(!region.meets(&self.support_ideal()?)?)
    }

    /// D^μ(I) = (1).
    pub fn has_maximal_order(&self) -> Result<bool> {
        self.has_maximal_order_in(&Region::whole())
    }

    pub fn has_maximal_order_in(&self, region: &Region) -> Result<bool> {
        Ok(!region.meets(&self.ideal.derivative_iter(iter_count(self.mark)?)?)?)
    }

    pub fn tangent_directions(&self) -> Result<Ideal> {
        self.tangent_directions_in(&Region::whole())
    }

    pub fn tangent_directions_in(&self, region: &Region) -> Result<Ideal> {
        if !self.has_maximal_order_in(region)? {
            return Err(Error::Precondition(
                "marked ideal is not of maximal order".into(),
            ));
        }
        self.support_ideal()
    }

    /// H(I) = I + Σ_{i=1}^{μ-1} D^i(I)·T^i.
    pub fn homogenized_ideal(&self) -> Result<MarkedIdeal> {
        self.homogenized_ideal_in(&Region::whole())
    }

    pub fn homogenized_ideal_in(&self, region: &Region) -> Result<MarkedIdeal> {
        let t = self.tangent_directions_in(region)?.canonical()?;
        let mut acc = self.ideal.canonical()?;
        let mut d = self.ideal.canonical()?;
        let mut tp = t.clone();
        for i in 1..self.mark {
            d = d.derivative().canonical()?;
            if i > 1 {
                tp = tp.product(&t)?;
            }
            acc = acc.sum(&d.product(&tp)?).canonical()?;
        }
        Ok(self.with_ideal(acc, self.mark))
    }

    /// Marked sum of (D^i I, μ - i) for i = 0..μ-1; mark μ!.
    pub fn coefficient_ideal(&self) -> Result<MarkedIdeal> {
        self.coefficient_ideal_in(&Region::whole())
    }

    pub fn coefficient_ideal_in(&self, region: &Region) -> Result<MarkedIdeal> {
        if !self.has_maximal_order_in(region)? {
            return Err(Error::Precondition(
                "marked ideal is not of maximal order".into(),
            ));
        }
        factorial(self.mark)?;
        let mut parts = Vec::with_capacity(self.mark as usize);
        let mut d = self.ideal.canonical()?;
        for i in 0..self.mark {
            if i > 0 {
                d = d.derivative().canonical()?;
            }
            parts.push(self.with_ideal(d.clone(), self.mark - i));
        }
        marked_sum(&parts)
    }

    /// Exponents of the boundary coordinates dividing I, and the quotient N.
    pub fn monomial_decomposition(&self) -> Result<(Vec<(BoundaryEntry, u32)>, Ideal)> {
        let mut exps = Vec::new();
        let mut n = self.ideal.canonical()?;
        for e in &self.boundary {
            let k = self.ideal.variable_valuation(e.var)?;
            if k > 0 {
                n = n
                    .div_var_pow(e.var, k)?
                    .expect("valuation divides")
                    .canonical()?;
            }
            exps.push((e.clone(), k));
        }
        Ok((exps, n))
    }

    /// max over supp(I, μ) of ord_x(N).
    pub fn order_of_nonmonomial_part(&self, n: &Ideal) -> Result<u64> {
        self.order_of_nonmonomial_part_in(n, &Region::whole())
    }

    pub fn order_of_nonmonomial_part_in(&self, n: &Ideal, region: &Region) -> Result<u64> {
        let s = self.support_ideal()?;
        let mut dn = n.canonical()?;
        let mut k = 0;
        while region.meets(&s.sum(&dn))? {
            k += 1;
            dn = dn.derivative().canonical()?;
        }
        Ok(k)
    }

    pub fn companion_ideal(&self, variant: Variant) -> Result<Companion> {
        self.companion_ideal_in(variant, &Region::whole())
    }

    pub fn companion_ideal_in(&self, variant: Variant, region: &Region) -> Result<Companion> {
        let (exps, n) = self.monomial_decomposition()?;
        let ord_n = self.order_of_nonmonomial_part_in(&n, region)?;
        let nv = self.nvars();
        let m = Ideal::with_budget(nv, vec![monomial_of(nv, &exps)], self.ideal.budget());
        let m_trivial = exps.iter().all(|(_, k)| *k == 0);
        if variant == Variant::BravoVillamayor && ord_n <= 1 && self.mark == 1 && !m_trivial {
            return Ok(Companion {
                marked: self.with_ideal(m, 1),
                ord_n,
                prefix: ratio(3, 2),
                monomial_only: true,
            });
        }
        if ord_n == 0 {
            return Err(Error::CompanionOrderZero);
        }
        let prefix = Rational::new(ord_n.into(), self.mark.into());
        let marked = if ord_n >= self.mark {
            self.with_ideal(n, ord_n)
        } else {
            marked_sum(&[
                self.with_ideal(n, ord_n),
                self.with_ideal(m, self.mark - ord_n),
            ])?
        };
        Ok(Companion {
            marked,
            ord_n,
            prefix,
            monomial_only: false,
        })
    }

    /// `(J, μ/k)` when `I = J^k` for a monomial ideal `J`, else a copy.
    /// The two are equivalent: same supports under every multiple test blow-up.
    pub fn reduced(&self) -> Result<MarkedIdeal> {
        let basis = self.ideal.basis()?;
        if self.mark <= 1 || basis.is_empty() || basis.iter().any(|f| f.terms().len() != 1) {
            return Ok(self.clone());
        }
        let exps: Vec<&Monomial> = basis.iter().map(|f| &f.terms()[0].0).collect();
        for k in (2..=self.mark).rev().filter(|k| self.mark.is_multiple_of(*k)) {
            let Ok(k32) = u32::try_from(k) else { continue };
            // the minimal generators of J^k include the k-th powers of J's
            let roots: Vec<Polynomial> = exps
                .iter()
                .filter(|m| m.0.iter().all(|e| e % k32 == 0))
                .map(|m| {
                    Polynomial::monomial(Monomial(m.0.iter().map(|e| e / k32).collect()), rat(1))
                })
                .collect();
            if roots.is_empty() {
                continue;
            }
            let j = self.ideal.derive(roots).canonical()?;
            if j.pow(k32)?.equals(&self.ideal)? {
                return Ok(self.with_ideal(j, self.mark / k));
            }
        }
        Ok(self.clone())
    }

    /// Substitutes zero for `vars`; the boundary is replaced by `boundary`.
    pub fn restrict(&self, vars: &[usize], boundary: Boundary) -> MarkedIdeal {
        MarkedIdeal::new(self.ideal.restrict_zero(vars), self.mark, boundary)
    }
}

fn iter_count(k: u64) -> Result<u32> {
    u32::try_from(k).map_err(|_| Error::MarkCapExceeded(MARK_CAP))
}

/// Π x_D^{k_D}.
pub fn monomial_of(nvars: usize, exps: &[(BoundaryEntry, u32)]) -> Polynomial {
    let mut e = vec![0; nvars];
    for (b, k) in exps {
        e[b.var] += k;
    }
    Polynomial::monomial(Monomial(e), rat(1))
}

/// Σ I_j^{Π_{k≠j} μ_k} with mark Π μ_k.
pub fn marked_sum(parts: &[MarkedIdeal]) -> Result<MarkedIdeal> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Precondition("empty marked sum".into()))?;
    if parts.iter().any(|p| p.mark == 0) {
        return Err(Error::ZeroMark);
    }
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let mut total: u64 = 1;
    for p in parts {
        total = total
            .checked_mul(p.mark)
            .filter(|&t| t <= MARK_CAP)
            .ok_or(Error::MarkCapExceeded(MARK_CAP))?;
    }
    let mut acc = Ideal::zero(first.nvars()).set_budget(first.ideal.budget());
    for p in parts {
        let e = iter_count(total / p.mark)?;
        acc = acc.sum(&p.ideal.pow(e)?).canonical()?;
    }
    Ok(MarkedIdeal {
        ideal: acc,
        mark: total,
        boundary: first.boundary.clone(),
    })
}

pub fn marked_product(a: &MarkedIdeal, b: &MarkedIdeal) -> Result<MarkedIdeal> {
    Ok(MarkedIdeal {
        ideal: a.ideal.product(&b.ideal)?,
        mark: a.mark + b.mark,
        boundary: a.boundary.clone(),
    })
}

/// First reduced-basis element `u = c·x_p + r` with `r` free of `x_p` and `p` allowed.
pub fn select_tangent_direction(
    t: &Ideal,
    allowed: impl Fn(usize) -> bool,
) -> Result<(Polynomial, usize)> {
    let mut blocked = false;
    for u in t.basis()? {
        for p in 0..u.nvars() {
            if u.solve_linear(p).is_some() {
                if allowed(p) {
                    return Ok((u.clone(), p));
                }
                blocked = true;
            }
        }
    }
    if blocked {
        Err(Error::NoTransversalDirection)
    } else {
        Err(Error::NoTangentDirection)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn id(gs: &[&str]) -> Ideal {
        let v = vec!["x".to_string(), "y".to_string()];
        Ideal::new(
            2,
            gs.iter()
                .map(|s| parse_polynomial(s, &v).unwrap())
                .collect(),
        )
    }

    fn mi(gs: &[&str], mark: u64) -> MarkedIdeal {
        MarkedIdeal::new(id(gs), mark, vec![])
    }

    fn dy() -> Boundary {
        vec![BoundaryEntry {
            divisor: Divisor::exceptional(1),
            var: 1,
        }]
    }

    #[test]
    fn supports() {
        assert!(!mi(&["x^2+y^5"], 2).support_is_empty().unwrap());
        assert!(mi(&["1+x^3*y^5"], 2).support_is_empty().unwrap());
        assert!(mi(&["x"], 2).support_is_empty().unwrap());
    }

    #[test]
    fn tangent_directions_examples() {
        let t = mi(&["x^2+y^5"], 2).tangent_directions().unwrap();
        assert!(t.equals(&id(&["x", "y^4"])).unwrap());
        let t = mi(&["x^2", "x*y^4", "y^5"], 2)
            .tangent_directions()
            .unwrap();
        assert!(t.equals(&id(&["x", "y^4"])).unwrap());
        assert!(mi(&["x^3"], 2).tangent_directions().is_err());
    }

    #[test]
    fn select_direction() {
        let (u, p) = select_tangent_direction(&id(&["x", "y^4"]), |_| true).unwrap();
        assert_eq!((u, p), (id(&["x"]).gens()[0].clone(), 0));
        let (u, _) = select_tangent_direction(&id(&["y", "x"]), |_| true).unwrap();
        assert_eq!(u, id(&["x"]).gens()[0]);
        let (u, p) = select_tangent_direction(&id(&["x+y^2", "y^3"]), |_| true).unwrap();
        assert_eq!((u, p), (id(&["x+y^2"]).gens()[0].clone(), 0));
        assert_eq!(
            select_tangent_direction(&id(&["x^2", "y^2"]), |_| true),
            Err(Error::NoTangentDirection)
        );
        assert_eq!(
            select_tangent_direction(&id(&["y"]), |v| v != 1),
            Err(Error::NoTransversalDirection)
        );
    }

    #[test]
    fn homogenized_curve() {
        let h = mi(&["x^2+y^5"], 2).homogenized_ideal().unwrap();
        assert_eq!(h.mark, 2);
        assert!(h.ideal.equals(&id(&["x^2", "x*y^4", "y^5"])).unwrap());
        let h1 = mi(&["x"], 1).homogenized_ideal().unwrap();
        assert!(h1.ideal.equals(&id(&["x"])).unwrap());
    }

    #[test]
    fn coefficient_examples() {
        let c = mi(&["x^2", "x*y^4", "y^5"], 2).coefficient_ideal().unwrap();
        assert_eq!(c.mark, 2);
        assert!(c.ideal.equals(&id(&["x^2", "x*y^4", "y^5"])).unwrap());
        let r = c.restrict(&[0], vec![]);
        assert!(r.ideal.equals(&id(&["y^5"])).unwrap());
        let c1 = mi(&["x"], 1).coefficient_ideal().unwrap();
        assert_eq!(c1.mark, 1);
        assert!(c1.ideal.equals(&id(&["x"])).unwrap());
    }

    #[test]
    fn sums_and_products() {
        let s = marked_sum(&[mi(&["x"], 1), mi(&["y"], 1)]).unwrap();
        assert!(s.ideal.equals(&id(&["x", "y"])).unwrap());
        assert_eq!(s.mark, 1);
        let s = marked_sum(&[mi(&["x^2"], 2), mi(&["y"], 1)]).unwrap();
        assert!(s.ideal.equals(&id(&["x^2", "y^2"])).unwrap());
        assert_eq!(s.mark, 2);
        assert_eq!(marked_sum(&[mi(&["x"], 0)]).unwrap_err(), Error::ZeroMark);
        let p = marked_product(&mi(&["x", "y"], 1), &mi(&["x"], 2)).unwrap();
        assert!(p.ideal.equals(&id(&["x^2", "x*y"])).unwrap());
        assert_eq!(p.mark, 3);
        let p = marked_product(&mi(&["x+y^3"], 2), &mi(&["1"], 0)).unwrap();
        assert!(p.ideal.equals(&id(&["x+y^3"])).unwrap());
        assert_eq!(p.mark, 2);
    }

    #[test]
    fn decomposition_and_companion() {
        let m = MarkedIdeal::new(id(&["y^2*(x^2+y^3)"]), 1, dy());
        let (e, n) = m.monomial_decomposition().unwrap();
        assert_eq!(e[0].1, 2);
        assert!(n.equals(&id(&["x^2+y^3"])).unwrap());
        let o = m.companion_ideal(Variant::Canonical).unwrap();
        assert_eq!(o.marked.mark, 2);
        assert!(o.marked.ideal.equals(&id(&["x^2+y^3"])).unwrap());

        let o = mi(&["x^2+y^5"], 1)
            .companion_ideal(Variant::Canonical)
            .unwrap();
        assert_eq!((o.marked.mark, o.prefix.clone()), (2, rat(2)));

        let mono = MarkedIdeal::new(id(&["y^3"]), 1, dy());
        assert_eq!(
            mono.companion_ideal(Variant::Canonical).unwrap_err(),
            Error::CompanionOrderZero
        );

        // x^2 times a unit, with x a boundary coordinate
        let bx = vec![BoundaryEntry {
            divisor: Divisor::exceptional(1),
            var: 0,
        }];
        let bv = MarkedIdeal::new(id(&["x^2*(1+y)"]), 1, bx);
        let o = bv.companion_ideal(Variant::BravoVillamayor).unwrap();
        assert!(o.monomial_only);
        assert_eq!(o.prefix, ratio(3, 2));
        assert!(o.marked.ideal.equals(&id(&["x^2"])).unwrap());
    }
}
