//! Canonical resolution driver, principalization and embedded desingularization.

mod state;
pub mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blowup::{
    blow_up_center, normalize_tangent_direction, transform_ideal, Center, Chart, TransformKind,
};
use crate::error::Error;
use crate::groebner::Budget;
use crate::ideal::{poly_gcd, Ideal};
use crate::invariant::ResolutionKey;
use crate::marked::{Boundary, MarkedIdeal, Variant};
use crate::par::{self, Execution};
use crate::poly::Polynomial;
use crate::region::Region;

pub use state::{Choice, Locus, Plan, Stage};
use state::{Ctx, Problem};
pub use verify::{Certificate, Check, LeafData};

/// Coordinate changes and hand-offs allowed at one node before giving up.
const MAX_NORMALIZATIONS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Principalize,
    Resolve,
    Embedded,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Principalize => "principalize",
            Mode::Resolve => "resolve",
            Mode::Embedded => "embedded",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub max_depth: u32,
    pub budget: Budget,
    pub mode: Mode,
    pub variant: Variant,
    pub trace: u8,
    pub execution: Execution,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_depth: 64,
            budget: Budget::default(),
            mode: Mode::Resolve,
            variant: Variant::Canonical,
            trace: 0,
            execution: Execution::default(),
        }
    }
}

impl Config {
    pub fn with_mode(mode: Mode) -> Self {
        Config {
            mode,
            ..Config::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub chart: Chart,
    /// Controlled transform of the input marked ideal.
    pub state: MarkedIdeal,
    /// Total transform of the input ideal.
    pub total: Ideal,
    pub stage: Stage,
    /// Full recursion path of the chosen center.
    pub path: Vec<Stage>,
    pub key: Option<ResolutionKey>,
    pub center: Option<Center>,
    pub children: Vec<Node>,
    pub certificate: Option<Certificate>,
    pub error: Option<Error>,
    /// Part of the chart this node answers for.
    pub region: Region,
    pub handoffs: Vec<Handoff>,
}

/// A closed set left to a sibling chart whose domain contains it.
#[derive(Clone, Debug)]
pub struct Handoff {
    /// Position of the sibling among its parent's children.
    pub sibling: usize,
    pub chart: String,
    pub locus: Ideal,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Preorder traversal.
    pub fn walk<'a>(&'a self, out: &mut Vec<&'a Node>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResolutionTree {
    pub names: Vec<String>,
    pub mode: Mode,
    pub variant: Variant,
    pub input: MarkedIdeal,
    pub root: Node,
}

impl ResolutionTree {
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        self.root.walk(&mut out);
        out
    }

    pub fn leaves(&self) -> Vec<&Node> {
        self.nodes().into_iter().filter(|n| n.is_leaf()).collect()
    }

    /// Number of nodes at which a center was blown up.
    pub fn blowups(&self) -> usize {
        self.nodes()
            .iter()
            .filter(|n| !n.children.is_empty())
            .count()
    }

    pub fn depth(&self) -> u32 {
        self.nodes()
            .iter()
            .map(|n| n.chart.depth)
            .max()
            .unwrap_or(0)
    }

    pub fn first_error(&self) -> Option<&Node> {
        self.nodes().into_iter().find(|n| n.error.is_some())
    }

    pub fn certificates_pass(&self) -> bool {
        self.leaves()
            .iter()
            .all(|n| n.certificate.as_ref().map(|c| c.passed()).unwrap_or(false))
    }

    /// Maximal key among the nodes at each depth.
    pub fn max_keys_by_depth(&self) -> Vec<Option<ResolutionKey>> {
        let mut out: Vec<Option<ResolutionKey>> = Vec::new();
        for n in self.nodes() {
            let d = n.chart.depth as usize;
            if out.len() <= d {
                out.resize(d + 1, None);
            }
            if let Some(k) = &n.key {
                if out[d].as_ref().map(|m| k > m).unwrap_or(true) {
                    out[d] = Some(k.clone());
                }
            }
        }
        out
    }

    /// Distinct consecutive maximal keys, ν included in the comparison.
    pub fn golden_trace(&self) -> Vec<ResolutionKey> {
        let mut out: Vec<ResolutionKey> = Vec::new();
        for k in self.max_keys_by_depth().into_iter().flatten() {
            let same = out
                .last()
                .map(|l| l.inv == k.inv && l.rho == k.rho && l.nu == k.nu);
            if same != Some(true) {
                out.push(k);
            }
        }
        out
    }
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("{error} (chart {chart}, stage {stage})")]
pub struct ResolveError {
    pub error: Error,
    pub chart: String,
    pub stage: String,
    pub partial: Option<Box<ResolutionTree>>,
}

impl ResolveError {
    fn bare(error: Error) -> Self {
        ResolveError {
            error,
            chart: "0".into(),
            stage: "input".into(),
            partial: None,
        }
    }
}

#[derive(Clone)]
struct ChartState {
    chart: Chart,
    top: Problem,
    total: Ideal,
    region: Region,
    /// Sibling position and the coordinate that is a unit on that sibling's domain.
    overlaps: Vec<(usize, String, Polynomial)>,
    handoffs: Vec<Handoff>,
    splits: u32,
}

impl ChartState {
    fn divisor_vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .chart
            .exceptional_boundary()
            .iter()
            .map(|e| e.var)
            .collect();
        v.extend(self.top.boundary.iter().map(|e| e.var));
        v.sort_unstable();
        v.dedup();
        v
    }

    fn normalize(&mut self, images: &[Polynomial]) {
        self.chart.compose(images);
        self.top.substitute(images);
        self.total = self.total.substitute(images);
        self.region = self.region.substitute(images);
        for (_, _, x) in &mut self.overlaps {
            *x = x.substitute(images);
        }
    }

    /// Hands `z` to a sibling whose domain contains it; false if none does.
    fn hand_off(&mut self, z: &Ideal) -> crate::Result<bool> {
        for (pos, id, x) in &self.overlaps {
            let n = z.nvars();
            if !self
                .region
                .meets(&z.sum(&Ideal::with_budget(n, vec![x.clone()], z.budget())))?
            {
                self.handoffs.push(Handoff {
                    sibling: *pos,
                    chart: id.clone(),
                    locus: z.clone(),
                });
                self.region = self.region.excluding(z)?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn children(&self, center: &Center) -> crate::Result<Vec<ChartState>> {
        let mut out = Vec::new();
        let charts = blow_up_center(&self.chart, center)?;
        let ids: Vec<String> = charts.iter().map(|(c, _)| c.id.clone()).collect();
        for (chart, step) in charts {
            let n = chart.nvars();
            let overlaps = center
                .vars
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != step.exc_var)
                .map(|(pos, &v)| (pos, ids[pos].clone(), Polynomial::var(n, v)))
                .collect();
            let region = self.region.substitute(&step.images);
            let new = chart.exceptional[step.exc_var]
                .clone()
                .expect("new divisor");
            let top = self
                .top
                .transform(&step, center, &new, true)?
                .ok_or(Error::CenterNotInSupport)?;
            let total = transform_ideal(&self.total, TransformKind::Total, &step)?.canonical()?;
            out.push(ChartState {
                chart,
                top,
                total,
                region,
                overlaps,
                handoffs: Vec::new(),
                splits: 0,
            });
        }
        Ok(out)
    }

    fn node(&self) -> Node {
        Node {
            chart: self.chart.clone(),
            state: MarkedIdeal::new(
                self.top.ideal.clone(),
                self.top.mark,
                self.top.boundary.clone(),
            ),
            total: self.total.clone(),
            stage: Stage::Resolved,
            path: Vec::new(),
            key: None,
            center: None,
            children: Vec::new(),
            certificate: None,
            error: None,
            region: self.region.clone(),
            handoffs: self.handoffs.clone(),
        }
    }
}

fn leaf_data<'a>(node: &'a Node, exceptional: &'a Boundary) -> LeafData<'a> {
    LeafData {
        ideal: &node.state.ideal,
        mark: node.state.mark,
        total: &node.total,
        exceptional,
        region: &node.region,
    }
}

/// Certificate for a finished node under `mode`; `codim` is used by embedded stops.
pub fn verify_leaf(node: &Node, mode: Mode, codim: usize) -> crate::Result<Certificate> {
    let exc = node.chart.exceptional_boundary();
    let d = leaf_data(node, &exc);
    match mode {
        Mode::Principalize => verify::verify_principalized(&d),
        Mode::Resolve => verify::verify_resolved(&d),
        Mode::Embedded => verify::verify_embedded(&d, codim),
    }
}

/// A divisor coordinate `p` that could carry `g` as a coordinate, if its
/// divisor did not have to stay at `x_p = 0`.
fn split_pivot(
    st: &ChartState,
    g: &Polynomial,
    z: &Ideal,
    killed: &[usize],
) -> crate::Result<Option<usize>> {
    let n = z.nvars();
    for p in st.divisor_vars() {
        if killed.contains(&p) || g.solve_linear(p).is_none() {
            continue;
        }
        if !st.region.meets(&z.sum(&Ideal::coordinates(n, &[p])))? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Covers the chart by `chart \ Z` and `chart \ {x_p = 0}`; on the second
/// the divisor on `p` is absent and `g` becomes the coordinate `x_p`.
fn split(st: &ChartState, p: usize, g: &Polynomial, z: &Ideal) -> crate::Result<Vec<ChartState>> {
    let n = z.nvars();
    let mut away = st.clone();
    away.region = st.region.excluding(z)?;
    away.chart.id = format!("{}~1", st.chart.id);
    away.splits += 1;
    let mut near = st.clone();
    near.region = st.region.excluding(&Ideal::coordinates(n, &[p]))?;
    near.chart.exceptional[p] = None;
    near.top.forget_divisor_var(p);
    near.normalize(&normalize_tangent_direction(g, p, &[])?);
    near.chart.id = format!("{}~2", st.chart.id);
    near.splits += 1;
    Ok(vec![away, near])
}

/// When `V(g)` falls apart into two pieces that do not meet in the region,
/// covers the chart by the complement of each piece.
fn separate_components(
    st: &ChartState,
    g: &Polynomial,
    killed: &[usize],
) -> crate::Result<Option<Vec<ChartState>>> {
    let n = g.nvars();
    let g1 = match (0..n).find(|&v| g.var_valuation(v).unwrap_or(0) > 0) {
        Some(v) => Polynomial::var(n, v),
        None => match g.rational_root_factor() {
            Some(f) => f,
            None => return Ok(None),
        },
    };
    let k = g.valuation_by(&g1).unwrap_or(0);
    let mut g2 = g.clone();
    for _ in 0..k {
        g2 = g2.exact_div(&g1).expect("valuation divides");
    }
    if g2.is_constant() {
        return Ok(None);
    }
    let base = Ideal::coordinates(n, killed).set_budget(st.total.budget());
    let z1 = base.sum(&Ideal::principal(g1));
    let z2 = base.sum(&Ideal::principal(g2));
    if st.region.meets(&z1.sum(&z2))? {
        return Ok(None);
    }
    let mut parts = Vec::new();
    for (tag, z) in [("~1", &z2), ("~2", &z1)] {
        let mut part = st.clone();
        part.region = st.region.excluding(z)?;
        part.chart.id = format!("{}{tag}", st.chart.id);
        part.splits += 1;
        parts.push(part);
    }
    Ok(Some(parts))
}

enum Outcome {
    Plan(crate::Result<Plan>),
    Split(crate::Result<Vec<ChartState>>),
}

fn expand(mut st: ChartState, cfg: &Config, codim: usize) -> Node {
    let mut rounds = 0;
    let outcome = loop {
        rounds += 1;
        if rounds > MAX_NORMALIZATIONS || st.splits > MAX_NORMALIZATIONS as u32 {
            break Outcome::Plan(Err(Error::NotMonomializable));
        }
        if cfg.mode == Mode::Embedded {
            let exc = st.chart.exceptional_boundary();
            let m = MarkedIdeal::new(st.total.clone(), 1, exc);
            match m
                .monomial_decomposition()
                .and_then(|(_, n)| st.region.meets(&n))
            {
                Ok(false) => break Outcome::Plan(Ok(Plan::Empty)),
                Ok(true) => {}
                Err(e) => break Outcome::Plan(Err(e)),
            }
        }
        let dv = st.divisor_vars();
        let ctx = Ctx {
            variant: cfg.variant,
            region: &st.region,
            divisor_vars: &dv,
        };
        match st.top.plan(&ctx) {
            Ok(Plan::Normalize(images)) => st.normalize(&images),
            Ok(Plan::Translate { u, p, support }) => {
                break Outcome::Split(split(&st, p, &u, &support.set_budget(cfg.budget)));
            }
            Ok(Plan::Center(c)) => {
                let stop = cfg.mode == Mode::Embedded && c.key.stop_marker_codim().is_some();
                match &c.center {
                    Locus::Unaligned { g, killed } if !stop => {
                        let z = c.center.ideal(st.chart.nvars()).set_budget(cfg.budget);
                        match split_pivot(&st, g, &z, killed) {
                            Ok(Some(p)) => break Outcome::Split(split(&st, p, g, &z)),
                            Ok(None) => {}
                            Err(e) => break Outcome::Plan(Err(e)),
                        }
                        match separate_components(&st, g, killed) {
                            Ok(Some(parts)) => break Outcome::Split(Ok(parts)),
                            Ok(None) => {}
                            Err(e) => break Outcome::Plan(Err(e)),
                        }
                        match st.hand_off(&z) {
                            Ok(true) => {}
                            Ok(false) => break Outcome::Plan(Ok(Plan::Center(c))),
                            Err(e) => break Outcome::Plan(Err(e)),
                        }
                    }
                    _ => break Outcome::Plan(Ok(Plan::Center(c))),
                }
            }
            other => break Outcome::Plan(other),
        }
    };
    let mut node = st.node();
    let plan = match outcome {
        Outcome::Plan(p) => p,
        Outcome::Split(parts) => {
            node.stage = Stage::Split;
            match parts {
                Ok(parts) => {
                    node.children = par::map(cfg.execution, parts, |k| expand(k, cfg, codim))
                }
                Err(e) => node.error = Some(e),
            }
            return node;
        }
    };
    let choice = match plan {
        Err(e) => {
            node.error = Some(e);
            return node;
        }
        Ok(Plan::Empty) => {
            finish(&mut node, cfg.mode, codim);
            return node;
        }
        Ok(Plan::Normalize(_) | Plan::Translate { .. }) => unreachable!(),
        Ok(Plan::Center(c)) => c,
    };
    node.stage = Stage::tag(&choice.path);
    node.path = choice.path.clone();
    node.key = Some(choice.key.clone());
    if cfg.mode == Mode::Embedded {
        if let Some(k) = choice.key.stop_marker_codim() {
            node.stage = Stage::Stop;
            finish(&mut node, cfg.mode, k);
            return node;
        }
    }
    let Locus::Coordinates(vars) = choice.center else {
        node.error = Some(Error::NotMonomializable);
        return node;
    };
    let center = match Center::new(vars) {
        Ok(c) => c,
        Err(e) => {
            node.error = Some(e);
            return node;
        }
    };
    node.center = Some(center.clone());
    if node.chart.depth >= cfg.max_depth {
        node.error = Some(if cfg.mode == Mode::Embedded {
            Error::StopNotReached
        } else {
            Error::DepthExceeded(cfg.max_depth as usize)
        });
        return node;
    }
    match st.children(&center) {
        Ok(kids) => {
            node.children = par::map(cfg.execution, kids, |k| expand(k, cfg, codim));
            reject_handoff_cycles(&mut node.children);
        }
        Err(e) => node.error = Some(e),
    }
    node
}

/// Sibling hand-offs must form an acyclic graph, or some points are covered by no chart.
fn reject_handoff_cycles(children: &mut [Node]) {
    let n = children.len();
    fn targets(node: &Node, out: &mut Vec<usize>) {
        out.extend(node.handoffs.iter().map(|h| h.sibling));
        if node.stage == Stage::Split {
            node.children.iter().for_each(|c| targets(c, out));
        }
    }
    let edges: Vec<Vec<usize>> = children
        .iter()
        .map(|c| {
            let mut t = Vec::new();
            targets(c, &mut t);
            t
        })
        .collect();
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(v: usize, edges: &[Vec<usize>], color: &mut [u8], bad: &mut Vec<usize>) {
        color[v] = 1;
        for &w in &edges[v] {
            if color[w] == 1 {
                bad.push(v);
            } else if color[w] == 0 {
                visit(w, edges, color, bad);
            }
        }
        color[v] = 2;
    }
    let mut color = vec![0u8; n];
    let mut bad = Vec::new();
    for v in 0..n {
        if color[v] == 0 {
            visit(v, &edges, &mut color, &mut bad);
        }
    }
    for v in bad {
        children[v].error.get_or_insert(Error::Precondition(
            "cyclic hand-off between sibling charts".into(),
        ));
    }
}

fn finish(node: &mut Node, mode: Mode, codim: usize) {
    match verify_leaf(node, mode, codim) {
        Ok(c) => node.certificate = Some(c),
        Err(e) => node.error = Some(e),
    }
}

fn run(
    names: Vec<String>,
    input: MarkedIdeal,
    cfg: &Config,
    codim: usize,
) -> Result<ResolutionTree, ResolveError> {
    if cfg.max_depth < 1 {
        return Err(ResolveError::bare(Error::Input(
            "max depth must be at least 1".into(),
        )));
    }
    if input.mark == 0 {
        return Err(ResolveError::bare(Error::ZeroMark));
    }
    if input.ideal.is_zero() {
        return Err(ResolveError::bare(Error::ZeroIdeal));
    }
    let mut vars: Vec<usize> = input.boundary.iter().map(|e| e.var).collect();
    vars.sort_unstable();
    vars.dedup();
    if vars.len() != input.boundary.len() {
        return Err(ResolveError::bare(Error::Input(
            "boundary variables must be distinct".into(),
        )));
    }
    let ideal = input.ideal.clone().set_budget(cfg.budget);
    let input = MarkedIdeal::new(ideal.clone(), input.mark, input.boundary.clone());
    let st = ChartState {
        chart: Chart::root(names.clone()),
        top: Problem::new(
            Vec::new(),
            ideal.clone(),
            input.mark,
            input.boundary.clone(),
        ),
        total: ideal,
        region: Region::whole(),
        overlaps: Vec::new(),
        handoffs: Vec::new(),
        splits: 0,
    };
    let root = expand(st, cfg, codim);
    let tree = ResolutionTree {
        names,
        mode: cfg.mode,
        variant: cfg.variant,
        input,
        root,
    };
    match tree.first_error() {
        None => Ok(tree),
        Some(n) => Err(ResolveError {
            error: n.error.clone().expect("error node"),
            chart: n.chart.id.clone(),
            stage: n.stage.to_string(),
            partial: Some(Box::new(tree.clone())),
        }),
    }
}

/// Resolves `(I, E, μ)`: every leaf has empty support.
pub fn resolve_marked_ideal(
    names: Vec<String>,
    m: MarkedIdeal,
    cfg: &Config,
) -> Result<ResolutionTree, ResolveError> {
    let cfg = Config {
        mode: Mode::Resolve,
        ..cfg.clone()
    };
    run(names, m, &cfg, 0)
}

/// Resolves `(I, ∅, 1)` and certifies the total transform is monomial.
pub fn principalize(
    names: Vec<String>,
    i: Ideal,
    cfg: &Config,
) -> Result<ResolutionTree, ResolveError> {
    let cfg = Config {
        mode: Mode::Principalize,
        ..cfg.clone()
    };
    run(names, MarkedIdeal::new(i, 1, vec![]), &cfg, 0)
}

/// Runs the canonical algorithm on `(I_Y, ∅, 1)` up to the stop invariant.
pub fn embedded_desingularize(
    names: Vec<String>,
    i: Ideal,
    cfg: &Config,
) -> Result<ResolutionTree, ResolveError> {
    let cfg = Config {
        mode: Mode::Embedded,
        ..cfg.clone()
    };
    if i.is_zero() {
        return Err(ResolveError::bare(Error::ZeroIdeal));
    }
    check_reduced(&i).map_err(ResolveError::bare)?;
    run(names, MarkedIdeal::new(i, 1, vec![]), &cfg, 1)
}

/// Dispatches on `cfg.mode`. Embedded mode ignores the mark and boundary.
pub fn run_mode(
    names: Vec<String>,
    m: MarkedIdeal,
    cfg: &Config,
) -> Result<ResolutionTree, ResolveError> {
    match cfg.mode {
        Mode::Resolve => resolve_marked_ideal(names, m, cfg),
        Mode::Principalize => principalize(names, m.ideal, cfg),
        Mode::Embedded => embedded_desingularize(names, m.ideal, cfg),
    }
}

/// A principal generator must be squarefree.
fn check_reduced(i: &Ideal) -> crate::Result<()> {
    let nonzero: Vec<&Polynomial> = i.gens().iter().filter(|g| !g.is_zero()).collect();
    if nonzero.len() != 1 {
        return Ok(());
    }
    let f = nonzero[0];
    let mut g = f.clone();
    for v in 0..f.nvars() {
        if g.is_constant() {
            break;
        }
        let d = f.partial_derivative(v);
        if !d.is_zero() {
            g = poly_gcd(&g, &d, i.budget())?;
        }
    }
    if g.is_constant() {
        Ok(())
    } else {
        Err(Error::Input("non-reduced hypersurface".into()))
    }
}
