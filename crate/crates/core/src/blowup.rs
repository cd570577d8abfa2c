//! Coordinate blow-ups, chart bookkeeping and ideal transforms.

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::marked::{sort_boundary, Boundary, BoundaryEntry, Divisor};
use crate::poly::{Polynomial, Rational};

#[derive(Clone, Debug)]
pub struct Chart {
    pub id: String,
    pub names: Vec<String>,
    pub parent: Option<String>,
    /// Images of the parent's variables, including later coordinate changes.
    pub to_parent: Vec<Polynomial>,
    /// Images of the root variables.
    pub to_root: Vec<Polynomial>,
    pub exceptional: Vec<Option<Divisor>>,
    pub depth: u32,
}

impl Chart {
    pub fn root(names: Vec<String>) -> Self {
        let n = names.len();
        let id: Vec<_> = (0..n).map(|i| Polynomial::var(n, i)).collect();
        Chart {
            id: "0".into(),
            names,
            parent: None,
            to_parent: id.clone(),
            to_root: id,
            exceptional: vec![None; n],
            depth: 0,
        }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Applies the coordinate change `x_i -> images[i]` to the chart maps.
    pub fn compose(&mut self, images: &[Polynomial]) {
        self.to_parent = self
            .to_parent
            .iter()
            .map(|f| f.substitute(images))
            .collect();
        self.to_root = self.to_root.iter().map(|f| f.substitute(images)).collect();
    }

    /// Exceptional divisors present in this chart, with their coordinates.
    pub fn exceptional_boundary(&self) -> Boundary {
        let mut b: Boundary = self
            .exceptional
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.clone().map(|divisor| BoundaryEntry { divisor, var: v }))
            .collect();
        sort_boundary(&mut b);
        b
    }
}

/// A coordinate subspace `x_i = 0, i ∈ vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Center {
    pub vars: Vec<usize>,
}

impl Center {
    pub fn new(mut vars: Vec<usize>) -> Result<Self> {
        vars.sort_unstable();
        for w in vars.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateCenterVariable(w[0]));
            }
        }
        if vars.is_empty() {
            return Err(Error::Precondition("empty center".into()));
        }
        Ok(Center { vars })
    }

    pub fn ideal(&self, nvars: usize) -> Ideal {
        Ideal::coordinates(nvars, &self.vars)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vars.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Total,
    Controlled(u64),
    Weak,
    Strict,
}

/// One blow-up chart: the substitution and the exceptional coordinate.
#[derive(Clone, Debug)]
pub struct ChartStep {
    pub images: Vec<Polynomial>,
    pub exc_var: usize,
}

/// Substitution for the chart of `center` indexed by `m`.
pub fn chart_step(nvars: usize, center: &Center, m: usize) -> ChartStep {
    let xm = Polynomial::var(nvars, m);
    let images = (0..nvars)
        .map(|i| {
            let xi = Polynomial::var(nvars, i);
            if i != m && center.contains(i) {
                &xi * &xm
            } else {
                xi
            }
        })
        .collect();
    ChartStep { images, exc_var: m }
}

/// Blows up `center`; one child per center variable, in increasing order.
pub fn blow_up_center(chart: &Chart, center: &Center) -> Result<Vec<(Chart, ChartStep)>> {
    let center = Center::new(center.vars.clone())?;
    let n = chart.nvars();
    if center.vars.iter().any(|&v| v >= n) {
        return Err(Error::Precondition("center variable out of range".into()));
    }
    let birth = chart.depth + 1;
    Ok(center
        .vars
        .iter()
        .map(|&m| {
            let step = chart_step(n, &center, m);
            let mut exceptional = chart.exceptional.clone();
            exceptional[m] = Some(Divisor::exceptional(birth));
            let child = Chart {
                id: format!("{}.{}", chart.id, chart.names[m]),
                names: chart.names.clone(),
                parent: Some(chart.id.clone()),
                to_parent: step.images.clone(),
                to_root: chart
                    .to_root
                    .iter()
                    .map(|f| f.substitute(&step.images))
                    .collect(),
                exceptional,
                depth: birth,
            };
            (child, step)
        })
        .collect())
}

pub fn transform_ideal(i: &Ideal, kind: TransformKind, step: &ChartStep) -> Result<Ideal> {
    let total = i.substitute(&step.images);
    let y = step.exc_var;
    match kind {
        TransformKind::Total => Ok(total),
        TransformKind::Controlled(mu) => {
            let k = u32::try_from(mu).map_err(|_| Error::CenterNotInSupport)?;
            let mut gens = Vec::with_capacity(total.gens().len());
            for f in total.gens() {
                gens.push(f.div_var_pow(y, k).ok_or(Error::CenterNotInSupport)?);
            }
            Ok(total.derive(gens))
        }
        TransformKind::Weak => {
            if total.is_zero() {
                return Ok(total);
            }
            let k = total.variable_valuation(y)?;
            Ok(total.div_var_pow(y, k)?.expect("valuation divides"))
        }
        TransformKind::Strict => {
            if total.gens().len() != 1 {
                return Err(Error::Precondition(
                    "strict transform needs a principal ideal".into(),
                ));
            }
            let f = &total.gens()[0];
            let k = f.var_valuation(y).unwrap_or(0);
            Ok(total.derive(vec![f.div_var_pow(y, k).expect("valuation divides")]))
        }
    }
}

/// Drops the divisor on the exceptional coordinate and appends the new one.
pub fn transform_boundary(e: &Boundary, step: &ChartStep, new: Option<Divisor>) -> Boundary {
    let mut out: Boundary = e
        .iter()
        .filter(|b| b.var != step.exc_var)
        .cloned()
        .collect();
    if let Some(d) = new {
        out.push(BoundaryEntry {
            divisor: d,
            var: step.exc_var,
        });
    }
    sort_boundary(&mut out);
    out
}

/// Substitution making `u = c·x_p + r` the new coordinate `x_p`.
pub fn normalize_tangent_direction(
    u: &Polynomial,
    p: usize,
    forbidden: &[usize],
) -> Result<Vec<Polynomial>> {
    if forbidden.contains(&p) {
        return Err(Error::NoTransversalDirection);
    }
    let (c, r) = u.solve_linear(p).ok_or(Error::NotMonomializable)?;
    let n = u.nvars();
    let inv: Rational = c.recip();
    let image = (&Polynomial::var(n, p) - &r).scale(&inv);
    Ok((0..n)
        .map(|i| {
            if i == p {
                image.clone()
            } else {
                Polynomial::var(n, i)
            }
        })
        .collect())
}

/// True when the images are the identity.
pub fn is_identity(images: &[Polynomial]) -> bool {
    let n = images.len();
    images
        .iter()
        .enumerate()
        .all(|(i, f)| *f == Polynomial::var(n, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn names(n: usize) -> Vec<String> {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, &names(n)).unwrap()
    }

    #[test]
    fn point_blowup_of_plane() {
        let root = Chart::root(names(2));
        let kids = blow_up_center(&root, &Center::new(vec![0, 1]).unwrap()).unwrap();
        assert_eq!(kids.len(), 2);
        let (c0, s0) = &kids[0];
        assert_eq!(s0.images, vec![p("x", 2), p("y*x", 2)]);
        assert_eq!(c0.exceptional[0], Some(Divisor::exceptional(1)));
        let (c1, s1) = &kids[1];
        assert_eq!(s1.images, vec![p("x*y", 2), p("y", 2)]);
        assert!(c1.exceptional[1].is_some() && c1.exceptional[0].is_none());
    }

    #[test]
    fn codim_one_and_product_centers() {
        let root = Chart::root(names(2));
        let kids = blow_up_center(&root, &Center::new(vec![0]).unwrap()).unwrap();
        assert_eq!(kids.len(), 1);
        assert!(is_identity(&kids[0].1.images));
        assert!(kids[0].0.exceptional[0].is_some());
        let root3 = Chart::root(names(3));
        let kids = blow_up_center(&root3, &Center::new(vec![0, 1]).unwrap()).unwrap();
        assert!(kids.iter().all(|(_, s)| s.images[2] == p("z", 3)));
        assert_eq!(
            Center::new(vec![1, 1]),
            Err(Error::DuplicateCenterVariable(1))
        );
    }

    #[test]
    fn transforms_of_the_curve() {
        let i = Ideal::principal(p("x^2+y^5", 2));
        let step = chart_step(2, &Center::new(vec![0, 1]).unwrap(), 1);
        let c = transform_ideal(&i, TransformKind::Controlled(2), &step).unwrap();
        assert_eq!(c.gens(), &[p("x^2+y^3", 2)]);
        let t = transform_ideal(&i, TransformKind::Total, &step).unwrap();
        assert_eq!(t.gens(), &[p("y^2*x^2+y^5", 2)]);
        let w = transform_ideal(&i, TransformKind::Weak, &step).unwrap();
        assert_eq!(w.gens(), &[p("x^2+y^3", 2)]);
        let s = transform_ideal(&i, TransformKind::Strict, &step).unwrap();
        assert_eq!(s.gens(), &[p("x^2+y^3", 2)]);
        assert_eq!(
            transform_ideal(&i, TransformKind::Controlled(3), &step).unwrap_err(),
            Error::CenterNotInSupport
        );
        // (v^m, μ!) ↦ (y^{m-μ!}, μ!)
        let v = Ideal::principal(p("y^5", 2));
        let c = transform_ideal(&v, TransformKind::Controlled(2), &step).unwrap();
        assert_eq!(c.gens(), &[p("y^3", 2)]);
    }

    #[test]
    fn boundary_bookkeeping() {
        let d1 = Divisor::exceptional(1);
        let e = vec![BoundaryEntry {
            divisor: d1.clone(),
            var: 1,
        }];
        let step = chart_step(2, &Center::new(vec![0, 1]).unwrap(), 1);
        let out = transform_boundary(&e, &step, Some(Divisor::exceptional(2)));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].divisor, Divisor::exceptional(2));
        let e = vec![BoundaryEntry {
            divisor: d1.clone(),
            var: 0,
        }];
        let step = chart_step(3, &Center::new(vec![1, 2]).unwrap(), 2);
        let out = transform_boundary(&e, &step, Some(Divisor::exceptional(2)));
        assert_eq!(out.iter().map(|b| b.var).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn normalization() {
        let u = p("x+y^2", 2);
        let sub = normalize_tangent_direction(&u, 0, &[]).unwrap();
        assert_eq!(p("(x+y^2)^3", 2).substitute(&sub), p("x^3", 2));
        let sub = normalize_tangent_direction(&p("2*x", 2), 0, &[]).unwrap();
        assert_eq!(p("x", 2).substitute(&sub), p("1/2*x", 2));
        assert!(is_identity(
            &normalize_tangent_direction(&p("x", 2), 0, &[]).unwrap()
        ));
        assert_eq!(
            normalize_tangent_direction(&u, 0, &[0]),
            Err(Error::NoTransversalDirection)
        );
    }
}
