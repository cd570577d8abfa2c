//! Problem files in, tree reports out.
//!
//! A report keeps enough of every leaf (controlled ideal, total transform,
//! exceptional ledger, excluded set) to recompute its certificate after a
//! JSON round trip.

use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groebner::Budget;
use crate::ideal::Ideal;
use crate::invariant::{InvVector, KeyJson, Qbar, ResolutionKey, Rho};
use crate::marked::{Boundary, BoundaryEntry, Divisor, MarkedIdeal, Variant};
use crate::parse::parse_polynomial;
use crate::region::Region;
use crate::resolver::{
    self, Certificate, Config, LeafData, Mode, Node, ResolutionTree, ResolveError, Stage,
};

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groebner_steps: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub id: String,
    pub variable: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(alias = "vars")]
    pub variables: Vec<String>,
    #[serde(alias = "gens")]
    pub generators: Vec<String>,
    #[serde(default = "one")]
    pub mark: u64,
    #[serde(default)]
    pub boundary: Vec<DivisorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub limits: Limits,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    /// Parsed and validated marked ideal.
    pub fn marked_ideal(&self) -> Result<MarkedIdeal> {
        let names = &self.variables;
        if names.is_empty() {
            return Err(Error::Input("no variables".into()));
        }
        for (i, v) in names.iter().enumerate() {
            if names[..i].contains(v) {
                return Err(Error::Input(format!("variable `{v}` listed twice")));
            }
        }
        if self.generators.is_empty() {
            return Err(Error::Input("no generators".into()));
        }
        if self.mark == 0 {
            return Err(Error::ZeroMark);
        }
        let gens = self
            .generators
            .iter()
            .map(|g| parse_polynomial(g, names))
            .collect::<Result<Vec<_>>>()?;
        let ideal = Ideal::new(names.len(), gens);
        if ideal.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let mut boundary = Boundary::new();
        for (seq, d) in self.boundary.iter().enumerate() {
            let var = names
                .iter()
                .position(|v| v == &d.variable)
                .ok_or_else(|| Error::UnknownVariable(d.variable.clone()))?;
            if boundary.iter().any(|e: &BoundaryEntry| e.var == var) {
                return Err(Error::Input("boundary variables must be distinct".into()));
            }
            if boundary
                .iter()
                .any(|e: &BoundaryEntry| e.divisor.name == d.id)
            {
                return Err(Error::Input(format!("divisor id `{}` listed twice", d.id)));
            }
            boundary.push(BoundaryEntry {
                divisor: Divisor::input(seq as u32, d.id.clone()),
                var,
            });
        }
        Ok(MarkedIdeal::new(ideal, self.mark, boundary))
    }

    /// `base` with the file's mode, variant and limits applied.
    pub fn config(&self, base: &Config) -> Config {
        let mut cfg = base.clone();
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(d) = self.limits.max_depth {
            cfg.max_depth = d;
        }
        if let Some(s) = self.limits.groebner_steps {
            cfg.budget = Budget { max_steps: s };
        }
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Depth or budget ran out; the tree is partial.
    Exhausted,
    /// The run failed for a mathematical reason; the tree is partial.
    Failed,
    /// Finished, but some leaf certificate does not pass.
    VerificationFailed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandoffRecord {
    pub chart: String,
    pub locus: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub chart: String,
    pub parent: Option<String>,
    /// Blow-ups between the root and this chart.
    pub depth: u32,
    /// Nesting in the tree; differs from `depth` below split nodes.
    pub level: u32,
    /// Images of the parent's coordinates, `name = expression`.
    pub substitutions: Vec<String>,
    pub to_root: Vec<String>,
    pub stage: String,
    pub path: Vec<String>,
    pub key: Option<KeyJson>,
    pub center: Option<Vec<String>>,
    pub ideal: Vec<String>,
    pub mark: u64,
    pub boundary: Vec<DivisorSpec>,
    /// Exceptional divisors present in the chart.
    pub divisors: Vec<DivisorSpec>,
    pub total: Vec<String>,
    /// Generators of the closed set this node does not answer for.
    pub excluded: Option<Vec<String>>,
    pub handoffs: Vec<HandoffRecord>,
    pub certificate: Option<Certificate>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub status: Status,
    pub error: Option<String>,
    pub mode: Mode,
    pub variant: Variant,
    pub variables: Vec<String>,
    pub blowups: usize,
    pub depth: u32,
    /// Distinct successive maximal keys.
    pub trace: Vec<KeyJson>,
    /// Preorder, so parents precede children.
    pub nodes: Vec<NodeRecord>,
}

fn strings(i: &Ideal, names: &[String]) -> Result<Vec<String>> {
    i.canonical()?.to_strings(names)
}

fn divisor_specs(b: &Boundary, names: &[String]) -> Vec<DivisorSpec> {
    b.iter()
        .map(|e| DivisorSpec {
            id: e.divisor.name.clone(),
            variable: names[e.var].clone(),
        })
        .collect()
}

/// Preorder records; split children name the split node as parent.
fn collect(n: &Node, parent: Option<&str>, level: u32, out: &mut Vec<NodeRecord>) -> Result<()> {
    out.push(node_record(n, parent, level)?);
    for c in &n.children {
        collect(c, Some(&n.chart.id), level + 1, out)?;
    }
    Ok(())
}

fn node_record(n: &Node, parent: Option<&str>, level: u32) -> Result<NodeRecord> {
    let names = &n.chart.names;
    Ok(NodeRecord {
        chart: n.chart.id.clone(),
        parent: parent.map(str::to_string),
        depth: n.chart.depth,
        level,
        substitutions: names
            .iter()
            .zip(&n.chart.to_parent)
            .map(|(v, f)| format!("{v} = {}", f.to_string_with(names)))
            .collect(),
        to_root: n
            .chart
            .to_root
            .iter()
            .map(|f| f.to_string_with(names))
            .collect(),
        stage: n.stage.to_string(),
        path: n.path.iter().map(|s| s.to_string()).collect(),
        key: n.key.as_ref().map(|k| k.to_json()),
        center: n
            .center
            .as_ref()
            .map(|c| c.vars.iter().map(|&v| names[v].clone()).collect()),
        ideal: strings(&n.state.ideal, names)?,
        mark: n.state.mark,
        boundary: divisor_specs(&n.state.boundary, names),
        divisors: divisor_specs(&n.chart.exceptional_boundary(), names),
        total: strings(&n.total, names)?,
        excluded: n.region.excluded().map(|e| strings(e, names)).transpose()?,
        handoffs: n
            .handoffs
            .iter()
            .map(|h| {
                Ok(HandoffRecord {
                    chart: h.chart.clone(),
                    locus: strings(&h.locus, names)?,
                })
            })
            .collect::<Result<_>>()?,
        certificate: n.certificate.clone(),
        error: n.error.as_ref().map(|e| e.to_string()),
    })
}

impl TreeReport {
    pub fn from_tree(tree: &ResolutionTree) -> Result<Self> {
        let status = if tree.certificates_pass() {
            Status::Ok
        } else {
            Status::VerificationFailed
        };
        Self::build(tree, status, None)
    }

    /// Report for a failed run, built from the partial tree if there is one.
    pub fn from_error(err: &ResolveError) -> Result<Option<Self>> {
        let status = if err.error.is_exhaustion() {
            Status::Exhausted
        } else {
            Status::Failed
        };
        match &err.partial {
            Some(t) => Self::build(t, status, Some(err.to_string())).map(Some),
            None => Ok(None),
        }
    }

    fn build(tree: &ResolutionTree, status: Status, error: Option<String>) -> Result<Self> {
        Ok(TreeReport {
            status,
            error,
            mode: tree.mode,
            variant: tree.variant,
            variables: tree.names.clone(),
            blowups: tree.blowups(),
            depth: tree.depth(),
            trace: tree.golden_trace().iter().map(|k| k.to_json()).collect(),
            nodes: {
                let mut v = Vec::new();
                collect(&tree.root, None, 0, &mut v)?;
                v
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    /// Indented tree, one line per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "mode {} variant {} status {} blowups {} depth {}",
            self.mode,
            variant_name(self.variant),
            status_name(self.status),
            self.blowups,
            self.depth
        );
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        let _ = writeln!(out, "trace:");
        for k in &self.trace {
            let _ = writeln!(out, "  {}", key_text(k));
        }
        for n in &self.nodes {
            let pad = "  ".repeat(n.level as usize);
            let _ = write!(out, "{pad}[{}] {}", n.chart, n.stage);
            if let Some(k) = &n.key {
                let _ = write!(out, " key {}", key_text(k));
            }
            if let Some(c) = &n.center {
                let _ = write!(out, " center {{{}}}", c.join(","));
            }
            let _ = write!(out, " ideal ({}) mark {}", n.ideal.join(", "), n.mark);
            if let Some(c) = &n.certificate {
                let checks: Vec<String> = c
                    .checks
                    .iter()
                    .map(|k| format!("{}={}", k.name, if k.passed { "pass" } else { "FAIL" }))
                    .collect();
                let _ = write!(out, " cert [{}]", checks.join(" "));
            }
            if let Some(e) = &n.error {
                let _ = write!(out, " error: {e}");
            }
            let _ = writeln!(out);
        }
        out
    }

    /// Recomputes every leaf certificate from the recorded data alone.
    pub fn reverify(&self) -> Result<Vec<(String, Certificate)>> {
        let mut out = Vec::new();
        for n in self.nodes.iter().filter(|n| n.certificate.is_some()) {
            out.push((
                n.chart.clone(),
                reverify_node(self.mode, &self.variables, n)?,
            ));
        }
        Ok(out)
    }
}

/// `(2, 0, 5/2, inf) nu=0 rho={}`.
pub fn key_text(k: &KeyJson) -> String {
    format!(
        "({}) nu={} rho={{{}}}",
        k.inv.join(", "),
        k.nu,
        k.rho.join(",")
    )
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Canonical => "canonical",
        Variant::BravoVillamayor => "bv",
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Exhausted => "exhausted",
        Status::Failed => "failed",
        Status::VerificationFailed => "verification_failed",
    }
}

fn parse_ideal(gens: &[String], names: &[String]) -> Result<Ideal> {
    let g = gens
        .iter()
        .map(|s| parse_polynomial(s, names))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ideal::new(names.len(), g))
}

fn exceptional_divisor(id: &str) -> Result<Divisor> {
    id.strip_prefix('D')
        .and_then(|b| b.parse().ok())
        .map(Divisor::exceptional)
        .ok_or_else(|| Error::Input(format!("bad exceptional divisor id `{id}`")))
}

/// Codimension recorded in a stop key, 1 otherwise.
fn stop_codim(k: Option<&KeyJson>) -> Result<usize> {
    let Some(k) = k else { return Ok(1) };
    let inv = k
        .inv
        .iter()
        .map(|s| Qbar::parse(s).ok_or_else(|| Error::Input(format!("bad key entry `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    let key = ResolutionKey {
        inv: InvVector::new(inv),
        nu: Zero::zero(),
        rho: Rho::empty(),
    };
    Ok(key.stop_marker_codim().unwrap_or(1))
}

fn reverify_node(mode: Mode, names: &[String], n: &NodeRecord) -> Result<Certificate> {
    let ideal = parse_ideal(&n.ideal, names)?;
    let total = parse_ideal(&n.total, names)?;
    let region = Region::from_excluded(
        n.excluded
            .as_ref()
            .map(|e| parse_ideal(e, names))
            .transpose()?,
    );
    let mut exceptional = Boundary::new();
    for d in &n.divisors {
        let var = names
            .iter()
            .position(|v| v == &d.variable)
            .ok_or_else(|| Error::UnknownVariable(d.variable.clone()))?;
        exceptional.push(BoundaryEntry {
            divisor: exceptional_divisor(&d.id)?,
            var,
        });
    }
    let data = LeafData {
        ideal: &ideal,
        mark: n.mark,
        total: &total,
        exceptional: &exceptional,
        region: &region,
    };
    match mode {
        Mode::Principalize => resolver::verify::verify_principalized(&data),
        Mode::Resolve => resolver::verify::verify_resolved(&data),
        Mode::Embedded => {
            let codim = if n.stage == Stage::Stop.to_string() {
                stop_codim(n.key.as_ref())?
            } else {
                1
            };
            resolver::verify::verify_embedded(&data, codim)
        }
    }
}
