//! Leaf certificates.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ideal::{k_subsets, Ideal};
use crate::marked::{monomial_of, Boundary, MarkedIdeal};
use crate::region::Region;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
    /// Exceptional exponents of the total transform, by divisor name.
    pub exponents: Vec<(String, u32)>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }
}

/// Data a certificate is computed from; everything here survives a JSON round trip.
pub struct LeafData<'a> {
    pub ideal: &'a Ideal,
    pub mark: u64,
    pub total: &'a Ideal,
    pub exceptional: &'a Boundary,
    /// Part of the chart this leaf answers for.
    pub region: &'a Region,
}

fn decompose(d: &LeafData) -> Result<(Certificate, Ideal, Ideal)> {
    let m = MarkedIdeal::new(d.total.clone(), 1, d.exceptional.clone());
    let (exps, n) = m.monomial_decomposition()?;
    let exponents = exps
        .iter()
        .map(|(b, k)| (b.divisor.name.clone(), *k))
        .collect();
    let mono = Ideal::with_budget(
        d.total.nvars(),
        vec![monomial_of(d.total.nvars(), &exps)],
        d.total.budget(),
    );
    Ok((
        Certificate {
            checks: Vec::new(),
            exponents,
        },
        n,
        mono,
    ))
}

/// Total transform is an exceptional monomial.
pub fn verify_principalized(d: &LeafData) -> Result<Certificate> {
    let (mut c, n, _) = decompose(d)?;
    c.push("monomial", !d.region.meets(&n)?);
    Ok(c)
}

/// Controlled transform has empty support.
pub fn verify_resolved(d: &LeafData) -> Result<Certificate> {
    let (mut c, _, _) = decompose(d)?;
    let m = MarkedIdeal::new(d.ideal.clone(), d.mark, vec![]);
    c.push("support_empty", m.support_is_empty_in(d.region)?);
    Ok(c)
}

/// Weak transform smooth of codimension `codim` and SNC with the exceptional coordinates.
pub fn verify_embedded(d: &LeafData, codim: usize) -> Result<Certificate> {
    let (mut c, n, mono) = decompose(d)?;
    c.push("factorization", d.total.equals(&mono.product(&n)?)?);
    if !d.region.meets(&n)? {
        c.push("misses_chart", true);
        return Ok(c);
    }
    c.push("smooth", !d.region.meets(&n.jacobian_ideal(codim)?)?);
    let vars: Vec<usize> = d.exceptional.iter().map(|e| e.var).collect();
    let mut snc = true;
    'outer: for k in 1..=vars.len() {
        for s in k_subsets(vars.len(), k) {
            let xs: Vec<usize> = s.iter().map(|&i| vars[i]).collect();
            let cut = n.sum(&Ideal::coordinates(n.nvars(), &xs));
            if d.region.meets(&cut)? && d.region.meets(&cut.jacobian_ideal(codim + k)?)? {
                snc = false;
                break 'outer;
            }
        }
    }
    c.push("snc", snc);
    Ok(c)
}
