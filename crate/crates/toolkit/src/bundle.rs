//! The JSON proof bundle: algebra, trace objects, morphisms, rules and a
//! preproof, optionally annotated with boards and reset steps.

use std::collections::BTreeMap;

use resetproof_core::cgt::{Cgt, CgtRule, GtSequent};
use resetproof_core::gtc::TraceInterpretation;
use resetproof_core::instance::{Compiled, Instance};
use resetproof_core::mu::{Mu, MuRule, MuSequent, MuTraces};
use resetproof_core::proof::Node;
use resetproof_core::reset::{AnnotatedSequent, ResetPreproof, StepKind};
use resetproof_core::trace::TraceObject;
use resetproof_core::{ActivationAlgebra, Address, DerivationSystem, Elem, Obj, Preproof, RuleId, SafraBoard, SequentId, TraceMorphism};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("algebra: {0}")]
    Algebra(#[from] resetproof_core::AlgebraError),
    #[error("unknown {what} {name}")]
    Dangling { what: &'static str, name: String },
    #[error("duplicate {what} {name}")]
    Duplicate { what: &'static str, name: String },
    #[error("bad address {0:?}")]
    Address(Vec<u32>),
    #[error("morphism {0}: {1}")]
    Morphism(usize, String),
    #[error("rule {0}: {1}")]
    Rule(usize, String),
    #[error("node {0}: {1}")]
    Node(Address, String),
    #[error("instance: {0}")]
    Instance(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Traces {
    Failure,
    Boolean,
}

impl From<Traces> for MuTraces {
    fn from(t: Traces) -> Self {
        match t {
            Traces::Failure => MuTraces::Failure,
            Traces::Boolean => MuTraces::Boolean,
        }
    }
}

impl From<MuTraces> for Traces {
    fn from(t: MuTraces) -> Self {
        match t {
            MuTraces::Failure => Traces::Failure,
            MuTraces::Boolean => Traces::Boolean,
        }
    }
}

/// Which concrete syntax layer the sequent and rule names belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum InstanceSpec {
    Generic,
    Cgt,
    Mu { traces: Traces },
}

impl From<resetproof_core::corpus::InstanceTag> for InstanceSpec {
    fn from(t: resetproof_core::corpus::InstanceTag) -> Self {
        use resetproof_core::corpus::InstanceTag as T;
        match t {
            T::Generic => InstanceSpec::Generic,
            T::Cgt => InstanceSpec::Cgt,
            T::Mu(m) => InstanceSpec::Mu { traces: m.into() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSection {
    pub elements: Vec<String>,
    pub join: Vec<Vec<u8>>,
    pub alpha: u8,
}

/// The trace object of one sequent; its index is the object id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub sequent: String,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismEntry {
    pub dom: u32,
    pub cod: u32,
    pub triples: Vec<(u32, u8, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub name: String,
    pub conclusion: String,
    pub premises: Vec<String>,
    /// Morphism indices, one per premise.
    pub maps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEntry {
    pub x: u32,
    pub a: u8,
    pub stacks: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardEntry {
    pub object: u32,
    pub control: Vec<u32>,
    pub sigma: Vec<CellEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepEntry {
    Lifted { rule: usize },
    Weak,
    Reset { chip: u32 },
    Pop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub addr: Vec<u32>,
    pub sequent: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub board: Option<BoardEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<StepEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudEntry {
    pub bud: Vec<u32>,
    pub companion: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofSection {
    pub nodes: Vec<NodeEntry>,
    pub beta: Vec<BudEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub instance: InstanceSpec,
    /// True when nodes carry boards and reset steps.
    #[serde(default)]
    pub reset: bool,
    pub algebra: AlgebraSection,
    pub objects: Vec<ObjectEntry>,
    pub morphisms: Vec<MorphismEntry>,
    pub rules: Vec<RuleEntry>,
    pub proof: ProofSection,
}

/// The preproof of a loaded bundle.
#[derive(Clone, Debug)]
pub enum Body {
    Plain(Preproof),
    Reset(ResetPreproof),
}

/// A bundle resolved against the core types.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub instance: InstanceSpec,
    pub system: DerivationSystem,
    pub iota: TraceInterpretation,
    /// Morphisms in table order, for lasso queries.
    pub morphisms: Vec<TraceMorphism>,
    pub body: Body,
}

impl Loaded {
    pub fn plain(&self) -> Option<&Preproof> {
        match &self.body {
            Body::Plain(p) => Some(p),
            Body::Reset(_) => None,
        }
    }

    pub fn reset(&self) -> Option<&ResetPreproof> {
        match &self.body {
            Body::Reset(r) => Some(r),
            Body::Plain(_) => None,
        }
    }

    pub fn to_bundle(&self) -> Bundle {
        match &self.body {
            Body::Plain(p) => Bundle::from_plain(self.instance, &self.system, &self.iota, p),
            Body::Reset(r) => Bundle::from_reset(self.instance, &self.system, &self.iota, r),
        }
    }
}

struct Tables {
    algebra: AlgebraSection,
    objects: Vec<ObjectEntry>,
    morphisms: Vec<MorphismEntry>,
    index: BTreeMap<MorphismEntry, usize>,
    rules: Vec<RuleEntry>,
}

impl PartialOrd for MorphismEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MorphismEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.dom, self.cod, &self.triples).cmp(&(other.dom, other.cod, &other.triples))
    }
}

impl Tables {
    fn new(sys: &DerivationSystem, iota: &TraceInterpretation) -> Self {
        let alg = &iota.algebra;
        let algebra = AlgebraSection { elements: alg.names().to_vec(), join: alg.table(), alpha: alg.alpha().0 };
        let objects = sys
            .sequents()
            .map(|(id, s)| ObjectEntry {
                sequent: s.to_string(),
                elements: iota.trace_object(id).map(|o| o.names.clone()).unwrap_or_default(),
            })
            .collect();
        let mut t = Tables { algebra, objects, morphisms: Vec::new(), index: BTreeMap::new(), rules: Vec::new() };
        for (rid, r) in sys.rules() {
            let maps = iota.maps(rid).unwrap_or(&[]).iter().map(|m| t.morphism(m)).collect();
            t.rules.push(RuleEntry {
                name: r.name.clone(),
                conclusion: sys.display(r.conclusion).to_string(),
                premises: r.premises.iter().map(|p| sys.display(*p).to_string()).collect(),
                maps,
            });
        }
        t
    }

    fn morphism(&mut self, m: &TraceMorphism) -> usize {
        let e = MorphismEntry {
            dom: m.dom().id,
            cod: m.cod().id,
            triples: m.triples().iter().map(|&(x, a, y)| (x, a.0, y)).collect(),
        };
        if let Some(&i) = self.index.get(&e) {
            return i;
        }
        self.morphisms.push(e.clone());
        self.index.insert(e, self.morphisms.len() - 1);
        self.morphisms.len() - 1
    }

    fn finish(self, instance: InstanceSpec, reset: bool, proof: ProofSection) -> Bundle {
        Bundle { instance, reset, algebra: self.algebra, objects: self.objects, morphisms: self.morphisms, rules: self.rules, proof }
    }
}

fn beta_entries<S: Clone + Eq, R: Clone>(p: &Preproof<S, R>) -> Vec<BudEntry> {
    p.beta().iter().map(|(t, c)| BudEntry { bud: t.0.clone(), companion: c.0.clone() }).collect()
}

pub fn board_entry(b: &SafraBoard) -> BoardEntry {
    BoardEntry {
        object: b.object().id,
        control: b.control().to_vec(),
        sigma: b
            .sigma()
            .iter()
            .map(|(&(x, a), ss)| CellEntry { x, a: a.0, stacks: ss.iter().cloned().collect() })
            .collect(),
    }
}

impl Bundle {
    pub fn from_plain(instance: InstanceSpec, sys: &DerivationSystem, iota: &TraceInterpretation, p: &Preproof) -> Bundle {
        let t = Tables::new(sys, iota);
        let nodes = p
            .nodes()
            .iter()
            .map(|(a, n)| NodeEntry {
                addr: a.0.clone(),
                sequent: sys.display(n.label).to_string(),
                rule: n.rule.map(|r| r.0 as usize),
                board: None,
                step: None,
            })
            .collect();
        t.finish(instance, false, ProofSection { nodes, beta: beta_entries(p) })
    }

    pub fn from_compiled(instance: InstanceSpec, c: &Compiled) -> Bundle {
        Bundle::from_plain(instance, &c.system, &c.iota, &c.proof)
    }

    pub fn from_reset(instance: InstanceSpec, sys: &DerivationSystem, iota: &TraceInterpretation, rp: &ResetPreproof) -> Bundle {
        let t = Tables::new(sys, iota);
        let nodes = rp
            .nodes()
            .iter()
            .map(|(a, n)| NodeEntry {
                addr: a.0.clone(),
                sequent: sys.display(n.label.base).to_string(),
                rule: None,
                board: Some(board_entry(&n.label.board)),
                step: n.rule.as_ref().map(|k| match k {
                    StepKind::Lifted(r) => StepEntry::Lifted { rule: r.0 as usize },
                    StepKind::Weak => StepEntry::Weak,
                    StepKind::Reset(g) => StepEntry::Reset { chip: *g },
                    StepKind::Pop => StepEntry::Pop,
                }),
            })
            .collect();
        t.finish(instance, true, ProofSection { nodes, beta: beta_entries(rp) })
    }

    pub fn from_json(s: &str) -> Result<Bundle, BundleError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    /// Resolves every reference and, for instance bundles, checks the
    /// tables against the instance's own rule schemas.
    pub fn load(&self) -> Result<Loaded, BundleError> {
        let alg = ActivationAlgebra::new(self.algebra.elements.clone(), self.algebra.join.clone(), self.algebra.alpha)?;
        let mut system = DerivationSystem::new();
        let mut iota = TraceInterpretation::new(alg.clone());
        for (i, o) in self.objects.iter().enumerate() {
            let id = system.sequent(&o.sequent);
            if id.0 as usize != i {
                return Err(BundleError::Duplicate { what: "sequent", name: o.sequent.clone() });
            }
            iota.set_object(id, TraceObject::new(id.0, o.elements.clone()));
        }
        let obj = |id: u32| -> Result<Obj, BundleError> {
            iota.object(SequentId(id)).ok_or(BundleError::Dangling { what: "object", name: id.to_string() })
        };
        let morphisms = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| {
                TraceMorphism::new(&alg, obj(m.dom)?, obj(m.cod)?, m.triples.iter().map(|&(x, a, y)| (x, Elem(a), y)))
                    .map_err(|e| BundleError::Morphism(i, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let seq = |s: &str, system: &DerivationSystem| {
            system.find_sequent(s).ok_or_else(|| BundleError::Dangling { what: "sequent", name: s.to_string() })
        };
        for (i, r) in self.rules.iter().enumerate() {
            let c = seq(&r.conclusion, &system)?;
            let ps = r.premises.iter().map(|p| seq(p, &system)).collect::<Result<Vec<_>, _>>()?;
            let before = system.rule_count();
            let rid = system.rule(&r.name, c, ps);
            if system.rule_count() == before || rid.0 as usize != i {
                return Err(BundleError::Duplicate { what: "rule", name: r.name.clone() });
            }
            let ms = r
                .maps
                .iter()
                .map(|&m| morphisms.get(m).cloned().ok_or(BundleError::Dangling { what: "morphism", name: m.to_string() }))
                .collect::<Result<Vec<_>, _>>()?;
            iota.set_maps(rid, ms);
        }
        iota.validate(&system).map_err(|e| BundleError::Instance(e.to_string()))?;
        self.check_instance(&system, &iota)?;

        let body = if self.reset {
            let mut nodes = BTreeMap::new();
            for n in &self.proof.nodes {
                let a = Address(n.addr.clone());
                let base = seq(&n.sequent, &system)?;
                let b = n.board.as_ref().ok_or_else(|| BundleError::Node(a.clone(), "missing board".into()))?;
                let board = parse_board(&alg, &iota, b).map_err(|e| BundleError::Node(a.clone(), e))?;
                let rule = match &n.step {
                    None => None,
                    Some(StepEntry::Lifted { rule }) => Some(StepKind::Lifted(self.rule_id(*rule)?)),
                    Some(StepEntry::Weak) => Some(StepKind::Weak),
                    Some(StepEntry::Reset { chip }) => Some(StepKind::Reset(*chip)),
                    Some(StepEntry::Pop) => Some(StepKind::Pop),
                };
                if nodes.insert(a.clone(), Node { label: AnnotatedSequent { base, board }, rule }).is_some() {
                    return Err(BundleError::Duplicate { what: "node", name: a.to_string() });
                }
            }
            Body::Reset(Preproof::from_parts(nodes, self.beta()?))
        } else {
            let mut nodes = BTreeMap::new();
            for n in &self.proof.nodes {
                let a = Address(n.addr.clone());
                let label = seq(&n.sequent, &system)?;
                let rule = n.rule.map(|r| self.rule_id(r)).transpose()?;
                if nodes.insert(a.clone(), Node { label, rule }).is_some() {
                    return Err(BundleError::Duplicate { what: "node", name: a.to_string() });
                }
            }
            Body::Plain(Preproof::from_parts(nodes, self.beta()?))
        };
        Ok(Loaded { instance: self.instance, system, iota, morphisms, body })
    }

    fn rule_id(&self, r: usize) -> Result<RuleId, BundleError> {
        if r < self.rules.len() {
            Ok(RuleId(r as u32))
        } else {
            Err(BundleError::Dangling { what: "rule", name: r.to_string() })
        }
    }

    fn beta(&self) -> Result<BTreeMap<Address, Address>, BundleError> {
        let mut out = BTreeMap::new();
        for b in &self.proof.beta {
            if out.insert(Address(b.bud.clone()), Address(b.companion.clone())).is_some() {
                return Err(BundleError::Duplicate { what: "bud", name: Address(b.bud.clone()).to_string() });
            }
        }
        Ok(out)
    }

    fn check_instance(&self, sys: &DerivationSystem, iota: &TraceInterpretation) -> Result<(), BundleError> {
        match self.instance {
            InstanceSpec::Generic => Ok(()),
            InstanceSpec::Cgt => check_against(&Cgt, sys, iota, GtSequent::parse, CgtRule::parse),
            InstanceSpec::Mu { traces } => check_against(&Mu(traces.into()), sys, iota, MuSequent::parse, MuRule::parse),
        }
    }
}

fn parse_board(alg: &ActivationAlgebra, iota: &TraceInterpretation, b: &BoardEntry) -> Result<SafraBoard, String> {
    let o = iota.object(SequentId(b.object)).ok_or_else(|| format!("unknown object {}", b.object))?;
    let cells = b.sigma.iter().map(|c| ((c.x, Elem(c.a)), c.stacks.clone()));
    SafraBoard::new(o, b.control.clone(), cells, alg).map_err(|e| e.to_string())
}

/// Every sequent and rule name must parse and print back unchanged, and the
/// tables must agree with what the instance derives from them.
fn check_against<I: Instance, E: std::fmt::Display>(
    inst: &I,
    sys: &DerivationSystem,
    iota: &TraceInterpretation,
    parse_seq: impl Fn(&str) -> Result<I::Sequent, E>,
    parse_rule: impl Fn(&str) -> Result<I::Rule, E>,
) -> Result<(), BundleError> {
    let bad = |s: String| Err(BundleError::Instance(s));
    if iota.algebra != inst.algebra() {
        return bad("algebra differs from the instance algebra".into());
    }
    let mut parsed = BTreeMap::new();
    for (id, s) in sys.sequents() {
        let q = parse_seq(s).map_err(|e| BundleError::Instance(format!("{s}: {e}")))?;
        if q.to_string() != s {
            return bad(format!("sequent {s:?} prints as {q}"));
        }
        if iota.trace_object(id).map(|o| &o.names) != Some(&inst.object(&q)) {
            return bad(format!("trace object of {s} differs"));
        }
        parsed.insert(id, q);
    }
    for (rid, r) in sys.rules() {
        let rule = parse_rule(&r.name).map_err(|e| BundleError::Instance(format!("{}: {e}", r.name)))?;
        if rule.to_string() != r.name {
            return bad(format!("rule {:?} prints as {rule}", r.name));
        }
        let c = &parsed[&r.conclusion];
        let prem = inst.premises(&rule, c).map_err(|e| BundleError::Instance(e.to_string()))?;
        let ids: Vec<String> = prem.iter().map(|p| p.to_string()).collect();
        let have: Vec<&str> = r.premises.iter().map(|p| sys.display(*p)).collect();
        if ids != have {
            return bad(format!("premises of {} on {} differ", r.name, c));
        }
        let want = inst.maps(&rule, c, &prem);
        let got: Vec<Vec<(u32, Elem, u32)>> = iota.maps(rid).unwrap_or(&[]).iter().map(|m| m.triples().to_vec()).collect();
        let want: Vec<Vec<(u32, Elem, u32)>> = want
            .into_iter()
            .map(|mut t| {
                t.sort();
                t.dedup();
                t
            })
            .collect();
        if got != want {
            return bad(format!("trace maps of {} on {} differ", r.name, c));
        }
    }
    Ok(())
}
