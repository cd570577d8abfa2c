//! Per-chart resolution state: nested problems and center planning.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    is_identity, normalize_tangent_direction, transform_boundary, transform_ideal, Center,
    ChartStep, TransformKind,
};
use crate::error::{Error, Result};
use crate::ideal::{k_subsets, Ideal};
use crate::invariant::{compute_rho_nu_monomial, InvVector, Qbar, ResolutionKey};
use crate::marked::{
    select_tangent_direction, Boundary, BoundaryEntry, Divisor, MarkedIdeal, Variant,
};
use crate::poly::{ratio, Polynomial, Rational};
use crate::region::Region;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "2a")]
    S2a,
    #[serde(rename = "1aa")]
    S1aa,
    #[serde(rename = "1ab")]
    S1ab,
    #[serde(rename = "1ba")]
    S1ba,
    #[serde(rename = "1bb")]
    S1bb,
    #[serde(rename = "2b")]
    S2b,
    #[serde(rename = "resolved")]
    Resolved,
    #[serde(rename = "stop")]
    Stop,
    #[serde(rename = "split")]
    Split,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::S2a => "2a",
            Stage::S1aa => "1aa",
            Stage::S1ab => "1ab",
            Stage::S1ba => "1ba",
            Stage::S1bb => "1bb",
            Stage::S2b => "2b",
            Stage::Resolved => "resolved",
            Stage::Stop => "stop",
            Stage::Split => "split",
        }
    }

    /// Tag for a chain of steps: the Step 1 sub-step under 2a, else the first.
    pub fn tag(path: &[Stage]) -> Stage {
        match path {
            [Stage::S2a, next, ..] => *next,
            [first, ..] => *first,
            [] => Stage::Resolved,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) struct Ctx<'a> {
    pub variant: Variant,
    pub region: &'a Region,
    /// Variables carrying a divisor anywhere in the chart; never pivots.
    pub divisor_vars: &'a [usize],
}

/// Where the maximal key is attained.
#[derive(Clone, Debug)]
pub enum Locus {
    Coordinates(Vec<usize>),
    /// V(g) inside the coordinate subspace `killed`: smooth, but not a
    /// coordinate subspace in this chart.
    Unaligned {
        g: Polynomial,
        killed: Vec<usize>,
    },
}

impl Locus {
    pub fn ideal(&self, n: usize) -> Ideal {
        match self {
            Locus::Coordinates(c) => Ideal::coordinates(n, c),
            Locus::Unaligned { g, killed } => {
                Ideal::principal(g.clone()).sum(&Ideal::coordinates(n, killed))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Choice {
    pub key: ResolutionKey,
    pub center: Locus,
    pub path: Vec<Stage>,
}

impl Choice {
    fn lift(self, head: Qbar, extra: &[usize], stage: Stage) -> Choice {
        let center = match self.center {
            Locus::Coordinates(c) => Locus::Coordinates(with(&c, extra)),
            Locus::Unaligned { g, killed } => Locus::Unaligned {
                g,
                killed: with(&killed, extra),
            },
        };
        let mut path = vec![stage];
        path.extend(self.path);
        Choice {
            key: self.key.prepend(&[head]),
            center,
            path,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Plan {
    Empty,
    Center(Choice),
    Normalize(Vec<Polynomial>),
    /// A maximal-contact direction `u` needs the divisor coordinate `x_p`,
    /// whose divisor misses `V(support)` in the region.
    Translate {
        u: Polynomial,
        p: usize,
        support: Ideal,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub killed: Vec<usize>,
    pub ideal: Ideal,
    pub mark: u64,
    pub boundary: Boundary,
    phase: Phase,
}

#[derive(Clone, Debug)]
enum Phase {
    Fresh,
    Step1(Box<Step1>),
}

#[derive(Clone, Debug)]
struct Step1 {
    prefix: Rational,
    jbar: Ideal,
    mbar: u64,
    old: Vec<Divisor>,
    sub: Sub,
}

#[derive(Clone, Debug)]
enum Sub {
    None,
    Boundary {
        s: usize,
        frames: Vec<(Vec<usize>, Problem)>,
    },
    MaxContact {
        pivot: usize,
        frame: Box<Problem>,
    },
}

fn with(v: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut out = v.to_vec();
    out.extend_from_slice(extra);
    out.sort_unstable();
    out.dedup();
    out
}

/// Best ρ over the divisor strata that meet the region.
fn monomial_choice(
    exps: &[(BoundaryEntry, u32)],
    mark: u64,
    head: &[Qbar],
    region: &Region,
    n: usize,
) -> Result<Plan> {
    let pairs: Vec<(Divisor, u32)> = exps.iter().map(|(b, a)| (b.divisor.clone(), *a)).collect();
    let mut best = None;
    if region.is_whole() {
        best = compute_rho_nu_monomial(&pairs, mark).map(|(r, _)| r);
    } else {
        let live: Vec<usize> = (0..exps.len()).filter(|&i| exps[i].1 > 0).collect();
        for k in (1..=live.len()).rev() {
            for sub in k_subsets(live.len(), k) {
                let idx: Vec<usize> = sub.iter().map(|&i| live[i]).collect();
                let vars: Vec<usize> = idx.iter().map(|&i| exps[i].0.var).collect();
                if !region.meets(&Ideal::coordinates(n, &vars))? {
                    continue;
                }
                let stratum: Vec<(Divisor, u32)> = idx.iter().map(|&i| pairs[i].clone()).collect();
                if let Some((r, _)) = compute_rho_nu_monomial(&stratum, mark) {
                    if best.as_ref().map(|b| r > *b).unwrap_or(true) {
                        best = Some(r);
                    }
                }
            }
        }
    }
    let rho = best.ok_or_else(|| Error::Precondition("monomial support is empty".into()))?;
    let sum: u64 = pairs
        .iter()
        .filter(|(d, _)| rho.divisors().contains(d))
        .map(|(_, a)| *a as u64)
        .sum();
    let center = exps
        .iter()
        .filter(|(b, _)| rho.divisors().contains(&b.divisor))
        .map(|(b, _)| b.var)
        .collect::<Vec<_>>();
    let key = ResolutionKey {
        inv: InvVector::new(head.to_vec()),
        nu: Rational::new(sum.into(), mark.into()),
        rho,
    };
    Ok(Plan::Center(Choice {
        key,
        center: Locus::Coordinates(with(&center, &[])),
        path: vec![Stage::S2b],
    }))
}

impl Problem {
    pub fn new(killed: Vec<usize>, ideal: Ideal, mark: u64, boundary: Boundary) -> Self {
        Problem {
            killed,
            ideal,
            mark,
            boundary,
            phase: Phase::Fresh,
        }
    }

    /// A restricted frame, with its mark lowered to an equivalent one where possible.
    fn derived(killed: Vec<usize>, ideal: Ideal, mark: u64, boundary: Boundary) -> Result<Self> {
        let m = MarkedIdeal::new(ideal, mark, boundary).reduced()?;
        Ok(Problem::new(killed, m.ideal, m.mark, m.boundary))
    }

    fn marked(&self) -> MarkedIdeal {
        MarkedIdeal::new(self.ideal.clone(), self.mark, self.boundary.clone())
    }

    pub fn plan(&mut self, ctx: &Ctx) -> Result<Plan> {
        let region = ctx.region.restrict_zero(&self.killed);
        let n = self.ideal.nvars();
        let m = self.marked();
        if m.support_is_empty_in(&region)? {
            self.phase = Phase::Fresh;
            return Ok(Plan::Empty);
        }
        if let Phase::Step1(st) = &self.phase {
            let jb = MarkedIdeal::new(st.jbar.clone(), st.mbar, vec![]);
            if jb.support_is_empty_in(&region)? {
                self.phase = Phase::Fresh;
            }
        }
        if matches!(self.phase, Phase::Fresh) {
            match m.companion_ideal_in(ctx.variant, &region) {
                Ok(c) if c.monomial_only => {
                    let (exps, _) = m.monomial_decomposition()?;
                    let head = [Qbar::Finite(ratio(3, 2))];
                    return monomial_choice(&exps, 1, &head, &region, n);
                }
                Ok(c) => {
                    let jbar = c
                        .marked
                        .reduced()?
                        .homogenized_ideal_in(&region)?
                        .coefficient_ideal_in(&region)?
                        .reduced()?;
                    self.phase = Phase::Step1(Box::new(Step1 {
                        prefix: c.prefix,
                        jbar: jbar.ideal.canonical()?,
                        mbar: jbar.mark,
                        old: self.boundary.iter().map(|e| e.divisor.clone()).collect(),
                        sub: Sub::None,
                    }));
                }
                Err(Error::CompanionOrderZero) => {
                    let (exps, _) = m.monomial_decomposition()?;
                    return monomial_choice(&exps, self.mark, &[], &region, n);
                }
                Err(e) => return Err(e),
            }
        }
        let Phase::Step1(st) = &mut self.phase else {
            unreachable!()
        };
        let prefix = Qbar::Finite(st.prefix.clone());
        Ok(
            match plan_step1(st, &self.killed, &self.boundary, ctx, &region)? {
                Plan::Center(c) => Plan::Center(c.lift(prefix, &[], Stage::S2a)),
                other => other,
            },
        )
    }

    /// Controlled transform of the whole frame stack; `None` if the frame
    /// does not survive in this chart.
    pub fn transform(
        &self,
        step: &ChartStep,
        center: &Center,
        new: &Divisor,
        top: bool,
    ) -> Result<Option<Problem>> {
        let m = step.exc_var;
        if self.killed.contains(&m) || !self.killed.iter().all(|&k| center.contains(k)) {
            return Ok(None);
        }
        let ideal = match transform_ideal(&self.ideal, TransformKind::Controlled(self.mark), step) {
            Ok(i) => i.canonical()?,
            Err(Error::CenterNotInSupport) if !top => return Ok(None),
            Err(e) => return Err(e),
        };
        let boundary = transform_boundary(&self.boundary, step, Some(new.clone()));
        let phase = match &self.phase {
            Phase::Fresh => Phase::Fresh,
            Phase::Step1(st) => {
                match transform_ideal(&st.jbar, TransformKind::Controlled(st.mbar), step) {
                    Ok(j) => {
                        let sub = match &st.sub {
                            Sub::None => Sub::None,
                            Sub::Boundary { s, frames } => {
                                let mut kept = Vec::new();
                                for (a, f) in frames {
                                    if let Some(g) = f.transform(step, center, new, false)? {
                                        kept.push((a.clone(), g));
                                    }
                                }
                                Sub::Boundary {
                                    s: *s,
                                    frames: kept,
                                }
                            }
                            Sub::MaxContact { pivot, frame } => {
                                match frame.transform(step, center, new, false)? {
                                    Some(g) => Sub::MaxContact {
                                        pivot: *pivot,
                                        frame: Box::new(g),
                                    },
                                    None => Sub::None,
                                }
                            }
                        };
                        Phase::Step1(Box::new(Step1 {
                            prefix: st.prefix.clone(),
                            jbar: j.canonical()?,
                            mbar: st.mbar,
                            old: st.old.clone(),
                            sub,
                        }))
                    }
                    Err(Error::CenterNotInSupport) => Phase::Fresh,
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(Some(Problem {
            killed: self.killed.clone(),
            ideal,
            mark: self.mark,
            boundary,
            phase,
        }))
    }

    /// Removes the boundary divisor on `v` and restarts the construction.
    pub fn forget_divisor_var(&mut self, v: usize) {
        self.boundary.retain(|e| e.var != v);
        self.phase = Phase::Fresh;
    }

    /// Applies a coordinate change, restricted to this frame's hyperplanes.
    pub fn substitute(&mut self, images: &[Polynomial]) {
        let im: Vec<Polynomial> = images
            .iter()
            .map(|f| f.restrict_zero(&self.killed))
            .collect();
        self.ideal = self.ideal.substitute(&im);
        if let Phase::Step1(st) = &mut self.phase {
            st.jbar = st.jbar.substitute(&im);
            match &mut st.sub {
                Sub::None => {}
                Sub::Boundary { frames, .. } => {
                    frames.iter_mut().for_each(|(_, f)| f.substitute(images))
                }
                Sub::MaxContact { frame, .. } => frame.substitute(images),
            }
        }
    }
}

fn plan_step1(
    st: &mut Step1,
    killed: &[usize],
    boundary: &Boundary,
    ctx: &Ctx,
    region: &Region,
) -> Result<Plan> {
    let jb = MarkedIdeal::new(st.jbar.clone(), st.mbar, vec![]);
    let t = region.closure(&jb.support_ideal()?.canonical()?)?;
    let n = t.nvars();
    let old_here: Vec<&BoundaryEntry> = boundary
        .iter()
        .filter(|e| st.old.contains(&e.divisor))
        .collect();
    let new_boundary = |a: &[usize]| -> Boundary {
        boundary
            .iter()
            .filter(|e| !st.old.contains(&e.divisor) && !a.contains(&e.var))
            .cloned()
            .collect()
    };

    let mut s = 0;
    let mut alphas: Vec<Vec<usize>> = Vec::new();
    for k in (1..=old_here.len()).rev() {
        for subset in k_subsets(old_here.len(), k) {
            let vars = with(
                &subset.iter().map(|&i| old_here[i].var).collect::<Vec<_>>(),
                &[],
            );
            if region.meets(&t.sum(&Ideal::coordinates(n, &vars)))? {
                alphas.push(vars);
            }
        }
        if !alphas.is_empty() {
            s = k;
            break;
        }
    }
    alphas.sort();

    if s >= 1 {
        let head = Qbar::Finite(Rational::from_integer((s as i64).into()));
        for a in &alphas {
            if st.jbar.restrict_zero(a).is_zero() {
                return Ok(Plan::Center(Choice {
                    key: ResolutionKey::terminal(&[head]),
                    center: Locus::Coordinates(a.clone()),
                    path: vec![Stage::S1aa],
                }));
            }
        }
        let mut existing = match std::mem::replace(&mut st.sub, Sub::None) {
            Sub::Boundary { s: s0, frames } if s0 == s => frames,
            _ => Vec::new(),
        };
        let mut frames = Vec::with_capacity(alphas.len());
        for a in &alphas {
            let f = match existing.iter().position(|(b, _)| b == a) {
                Some(i) => existing.swap_remove(i).1,
                None => Problem::derived(
                    with(killed, a),
                    st.jbar.restrict_zero(a),
                    st.mbar,
                    new_boundary(a),
                )?,
            };
            frames.push((a.clone(), f));
        }
        let mut best: Option<Choice> = None;
        let mut result = None;
        for (a, f) in frames.iter_mut() {
            match f.plan(ctx)? {
                p @ (Plan::Normalize(_) | Plan::Translate { .. }) => {
                    result = Some(p);
                    break;
                }
                Plan::Empty => {}
                Plan::Center(c) => {
                    let c = c.lift(head.clone(), a, Stage::S1ab);
                    if best.as_ref().map(|b| c.key > b.key).unwrap_or(true) {
                        best = Some(c);
                    }
                }
            }
        }
        st.sub = Sub::Boundary { s, frames };
        if let Some(r) = result {
            return Ok(r);
        }
        return best
            .map(Plan::Center)
            .ok_or_else(|| Error::Precondition("support lost on boundary intersections".into()));
    }

    if matches!(st.sub, Sub::Boundary { .. }) {
        st.sub = Sub::None;
    }
    let zero = Qbar::Finite(Rational::zero());

    // codimension-one part of the support; parts outside the region are saturated away
    let mut t = t;
    loop {
        let g = t.basis_gcd()?;
        if g.total_degree().unwrap_or(0) == 0 {
            break;
        }
        if !region.meets(&Ideal::principal(g.clone()).set_budget(t.budget()))? {
            t = t.saturate(&g)?.canonical()?;
            continue;
        }
        let choice = |center| {
            Plan::Center(Choice {
                key: ResolutionKey::terminal(std::slice::from_ref(&zero)),
                center,
                path: vec![Stage::S1ba],
            })
        };
        if let Some(p) = (0..n).find(|&v| g == Polynomial::var(n, v)) {
            return Ok(choice(Locus::Coordinates(vec![p])));
        }
        let pivot = (0..n).find(|&v| {
            !killed.contains(&v) && !ctx.divisor_vars.contains(&v) && g.solve_linear(v).is_some()
        });
        return Ok(match pivot {
            Some(p) => Plan::Normalize(normalize_tangent_direction(&g, p, &[])?),
            None => choice(Locus::Unaligned {
                g,
                killed: killed.to_vec(),
            }),
        });
    }

    let allowed = |v: usize| !killed.contains(&v) && !ctx.divisor_vars.contains(&v);
    let (u, p) = match select_tangent_direction(&t, allowed) {
        Err(Error::NoTransversalDirection) => {
            let support = t.sum(&Ideal::coordinates(n, killed));
            for u in t.basis()? {
                for &p in ctx.divisor_vars.iter().filter(|v| !killed.contains(v)) {
                    if u.solve_linear(p).is_some()
                        && !region.meets(&support.sum(&Ideal::coordinates(n, &[p])))?
                    {
                        return Ok(Plan::Translate {
                            u: u.clone(),
                            p,
                            support,
                        });
                    }
                }
            }
            return Err(Error::NoTransversalDirection);
        }
        r => r?,
    };
    let images = normalize_tangent_direction(&u, p, &[])?;
    if !is_identity(&images) {
        return Ok(Plan::Normalize(images));
    }
    let mut frame = match std::mem::replace(&mut st.sub, Sub::None) {
        Sub::MaxContact { pivot, frame } if pivot == p => *frame,
        _ => Problem::derived(
            with(killed, &[p]),
            st.jbar.restrict_zero(&[p]),
            st.mbar,
            new_boundary(&[p]),
        )?,
    };
    let plan = frame.plan(ctx)?;
    st.sub = Sub::MaxContact {
        pivot: p,
        frame: Box::new(frame),
    };
    match plan {
        p @ (Plan::Normalize(_) | Plan::Translate { .. }) => Ok(p),
        Plan::Empty => Err(Error::Precondition(
            "support left the hypersurface of maximal contact".into(),
        )),
        Plan::Center(c) => Ok(Plan::Center(c.lift(zero, &[p], Stage::S1bb))),
    }
}
