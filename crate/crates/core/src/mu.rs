//! The modal μ-calculus: formulas, addresses, the rules over formula sets
//! and the two trace interpretations (over 𝔽 and over 𝔹).

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{ActivationAlgebra, Elem};
use crate::instance::{Instance, InstanceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fix {
    Mu,
    Nu,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Prop(String),
    NProp(String),
    Var(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
    Fix(Fix, String, Box<Formula>),
}

/// A subformula address: `0`/`1` for the operands of `∧`/`∨`, `0` below
/// unary operators and binders.
pub type Addr = Vec<u8>;

impl Formula {
    pub fn parse(s: &str) -> Result<Formula, InstanceError> {
        let toks = lex(s).ok_or_else(|| InstanceError::MalformedSequent(s.into()))?;
        let mut p = Parser { toks, pos: 0, bound: Vec::new() };
        let f = p.formula().ok_or_else(|| InstanceError::MalformedSequent(s.into()))?;
        if p.pos != p.toks.len() {
            return Err(InstanceError::MalformedSequent(s.into()));
        }
        Ok(f)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn dia(a: Formula) -> Formula {
        Formula::Dia(Box::new(a))
    }

    pub fn fix(s: Fix, x: &str, body: Formula) -> Formula {
        Formula::Fix(s, x.into(), Box::new(body))
    }

    /// `φ @ a`
    pub fn at(&self, a: &[u8]) -> Option<&Formula> {
        let Some((&i, rest)) = a.split_first() else { return Some(self) };
        match (self, i) {
            (Formula::And(l, _) | Formula::Or(l, _), 0) => l.at(rest),
            (Formula::And(_, r) | Formula::Or(_, r), 1) => r.at(rest),
            (Formula::Box(f) | Formula::Dia(f) | Formula::Fix(_, _, f), 0) => f.at(rest),
            _ => None,
        }
    }

    fn walk<'a>(&'a self, addr: &mut Addr, f: &mut impl FnMut(&Addr, &'a Formula)) {
        f(addr, self);
        let mut go = |i: u8, g: &'a Formula, addr: &mut Addr| {
            addr.push(i);
            g.walk(addr, f);
            addr.pop();
        };
        match self {
            Formula::And(l, r) | Formula::Or(l, r) => {
                go(0, l, addr);
                go(1, r, addr);
            }
            Formula::Box(g) | Formula::Dia(g) | Formula::Fix(_, _, g) => go(0, g, addr),
            _ => {}
        }
    }

    /// `N(φ)`: addresses of ν-subformulas.
    pub fn nu_addresses(&self) -> Vec<Addr> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |a, g| {
            if matches!(g, Formula::Fix(Fix::Nu, _, _)) {
                out.push(a.clone());
            }
        });
        out
    }

    /// `O_x(φ)`: addresses of free occurrences of `x`.
    pub fn open_addresses(&self, x: &str) -> Vec<Addr> {
        fn go(f: &Formula, x: &str, addr: &mut Addr, out: &mut Vec<Addr>) {
            match f {
                Formula::Var(y) if y == x => out.push(addr.clone()),
                Formula::Fix(_, y, _) if y == x => {}
                Formula::And(l, r) | Formula::Or(l, r) => {
                    addr.push(0);
                    go(l, x, addr, out);
                    *addr.last_mut().unwrap() = 1;
                    go(r, x, addr, out);
                    addr.pop();
                }
                Formula::Box(g) | Formula::Dia(g) | Formula::Fix(_, _, g) => {
                    addr.push(0);
                    go(g, x, addr, out);
                    addr.pop();
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, x, &mut Vec::new(), &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Var(x) => BTreeSet::from([x.clone()]),
            Formula::Prop(_) | Formula::NProp(_) => BTreeSet::new(),
            Formula::And(l, r) | Formula::Or(l, r) => {
                let mut s = l.free_vars();
                s.extend(r.free_vars());
                s
            }
            Formula::Box(g) | Formula::Dia(g) => g.free_vars(),
            Formula::Fix(_, x, g) => {
                let mut s = g.free_vars();
                s.remove(x);
                s
            }
        }
    }

    /// `V_ν(φ)`
    pub fn nu_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut Vec::new(), &mut |_, g| {
            if let Formula::Fix(Fix::Nu, x, _) = g {
                out.insert(x.clone());
            }
        });
        out
    }

    /// The relation `x <_φ y` as pairs: `σy.ψ` occurs and `x` is free in it.
    pub fn subsumption(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        self.walk(&mut Vec::new(), &mut |_, g| {
            if let Formula::Fix(_, y, _) = g {
                for x in g.free_vars() {
                    out.insert((x, y.clone()));
                }
            }
        });
        out
    }

    /// The transitive closure of `<_φ`.
    pub fn subsumption_closure(&self) -> BTreeSet<(String, String)> {
        let mut rel = self.subsumption();
        loop {
            let extra: Vec<_> = rel
                .iter()
                .flat_map(|(a, b)| rel.iter().filter(move |(c, _)| c == b).map(move |(_, d)| (a.clone(), d.clone())))
                .filter(|p| !rel.contains(p))
                .collect();
            if extra.is_empty() {
                return rel;
            }
            rel.extend(extra);
        }
    }

    /// The closure of `<_φ` is irreflexive.
    pub fn is_well_named(&self) -> bool {
        self.subsumption_closure().iter().all(|(a, b)| a != b)
    }

    /// `φ[ψ/x]`: replaces the free occurrences of `x`. Undefined when a free
    /// variable of `ψ` would be captured.
    pub fn substitute(&self, x: &str, psi: &Formula) -> Result<Formula, InstanceError> {
        let fv = psi.free_vars();
        self.subst(x, psi, &fv, &mut Vec::new())
    }

    fn subst(&self, x: &str, psi: &Formula, fv: &BTreeSet<String>, binders: &mut Vec<String>) -> Result<Formula, InstanceError> {
        Ok(match self {
            Formula::Var(y) if y == x => {
                if let Some(b) = binders.iter().find(|b| fv.contains(*b)) {
                    return Err(InstanceError::SubstitutionUndefined(format!("{b} would capture in {psi}")));
                }
                psi.clone()
            }
            Formula::Fix(_, y, _) if y == x => self.clone(),
            Formula::Fix(s, y, g) => {
                binders.push(y.clone());
                let g = g.subst(x, psi, fv, binders)?;
                binders.pop();
                Formula::Fix(*s, y.clone(), Box::new(g))
            }
            Formula::And(l, r) => Formula::and(l.subst(x, psi, fv, binders)?, r.subst(x, psi, fv, binders)?),
            Formula::Or(l, r) => Formula::or(l.subst(x, psi, fv, binders)?, r.subst(x, psi, fv, binders)?),
            Formula::Box(g) => Formula::boxed(g.subst(x, psi, fv, binders)?),
            Formula::Dia(g) => Formula::dia(g.subst(x, psi, fv, binders)?),
            _ => self.clone(),
        })
    }

    /// One fixpoint unfolding `φ[σx.φ/x]` of `σx.φ`.
    pub fn unfold(&self) -> Result<Formula, InstanceError> {
        match self {
            Formula::Fix(_, x, body) => body.substitute(x, self),
            _ => Err(InstanceError::SubstitutionUndefined(format!("{self} is not a fixpoint"))),
        }
    }

    /// Whether the rendering ends in a binder body, which would swallow a
    /// following binary operator.
    fn ends_open(&self) -> bool {
        match self {
            Formula::Fix(..) => true,
            Formula::Box(g) | Formula::Dia(g) => g.ends_open(),
            _ => false,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prop(p) | Formula::Var(p) => f.write_str(p),
            Formula::NProp(p) => write!(f, "~{p}"),
            Formula::And(l, r) | Formula::Or(l, r) => {
                let op = if matches!(self, Formula::And(..)) { "&" } else { "|" };
                if l.ends_open() {
                    write!(f, "(({l}) {op} {r})")
                } else {
                    write!(f, "({l} {op} {r})")
                }
            }
            Formula::Box(g) => write!(f, "[]{g}"),
            Formula::Dia(g) => write!(f, "<>{g}"),
            Formula::Fix(s, x, g) => write!(f, "{} {x}.{g}", if *s == Fix::Mu { "mu" } else { "nu" }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Boxx,
    Dia,
    Dot,
    LParen,
    RParen,
}

fn lex(s: &str) -> Option<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let two = cs.get(i + 1).copied();
        match c {
            ' ' | '\t' | '\n' => {}
            '~' => out.push(Tok::Not),
            '&' => out.push(Tok::And),
            '|' => out.push(Tok::Or),
            '.' => out.push(Tok::Dot),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            '[' if two == Some(']') => {
                out.push(Tok::Boxx);
                i += 1;
            }
            '<' if two == Some('>') => {
                out.push(Tok::Dia);
                i += 1;
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '\'' => {
                let st = i;
                while i + 1 < cs.len() && (cs[i + 1].is_ascii_alphanumeric() || cs[i + 1] == '_' || cs[i + 1] == '\'') {
                    i += 1;
                }
                out.push(Tok::Ident(cs[st..=i].iter().collect()));
            }
            _ => return None,
        }
        i += 1;
    }
    Some(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn binder(&mut self) -> Option<Option<Fix>> {
        match self.peek() {
            Some(Tok::Ident(k)) if k == "mu" || k == "nu" => {
                let s = if k == "mu" { Fix::Mu } else { Fix::Nu };
                Some(Some(s))
            }
            _ => Some(None),
        }
    }

    // formula := binder | disj
    fn formula(&mut self) -> Option<Formula> {
        if let Some(s) = self.binder()? {
            return self.fixpoint(s);
        }
        let mut l = self.conj()?;
        while self.eat(&Tok::Or) {
            l = Formula::or(l, self.conj()?);
        }
        Some(l)
    }

    fn fixpoint(&mut self, s: Fix) -> Option<Formula> {
        self.pos += 1;
        let Some(Tok::Ident(x)) = self.peek().cloned() else { return None };
        self.pos += 1;
        if !self.eat(&Tok::Dot) {
            return None;
        }
        self.bound.push(x.clone());
        let body = self.formula();
        self.bound.pop();
        Some(Formula::Fix(s, x, Box::new(body?)))
    }

    fn conj(&mut self) -> Option<Formula> {
        let mut l = self.unary()?;
        while self.eat(&Tok::And) {
            l = Formula::and(l, self.unary()?);
        }
        Some(l)
    }

    fn unary(&mut self) -> Option<Formula> {
        if let Some(s) = self.binder()? {
            return self.fixpoint(s);
        }
        match self.peek().cloned()? {
            Tok::Boxx => {
                self.pos += 1;
                Some(Formula::boxed(self.unary()?))
            }
            Tok::Dia => {
                self.pos += 1;
                Some(Formula::dia(self.unary()?))
            }
            Tok::Not => {
                self.pos += 1;
                let Some(Tok::Ident(p)) = self.peek().cloned() else { return None };
                self.pos += 1;
                Some(Formula::NProp(p))
            }
            Tok::LParen => {
                self.pos += 1;
                let f = self.formula()?;
                self.eat(&Tok::RParen).then_some(f)
            }
            Tok::Ident(x) => {
                self.pos += 1;
                Some(if self.bound.contains(&x) { Formula::Var(x) } else { Formula::Prop(x) })
            }
            _ => None,
        }
    }
}

/// A finite set of formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MuSequent(pub BTreeSet<Formula>);

impl MuSequent {
    pub fn new(fs: impl IntoIterator<Item = Formula>) -> Self {
        MuSequent(fs.into_iter().collect())
    }

    /// Syntax: `{f, g}` (braces optional).
    pub fn parse(s: &str) -> Result<Self, InstanceError> {
        let t = s.trim();
        let t = t.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(t);
        let mut out = BTreeSet::new();
        if t.trim().is_empty() {
            return Ok(MuSequent(out));
        }
        let mut depth = 0i32;
        let mut start = 0;
        for (i, c) in t.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    out.insert(Formula::parse(&t[start..i])?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        out.insert(Formula::parse(&t[start..])?);
        Ok(MuSequent(out))
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Formula>) -> Self {
        let mut s = self.0.clone();
        s.extend(extra);
        MuSequent(s)
    }

    pub fn without(&self, f: &Formula) -> Self {
        let mut s = self.0.clone();
        s.remove(f);
        MuSequent(s)
    }
}

impl fmt::Display for MuSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, g) in self.0.iter().enumerate() {
            write!(f, "{}{g}", if i > 0 { ", " } else { "" })?;
        }
        f.write_str("}")
    }
}

/// Rules of the calculus; every rule but `Ax` names its principal formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MuRule {
    Ax,
    Wk(Formula),
    Or(Formula),
    And(Formula),
    /// Names the boxed formula; every other formula must be a diamond.
    Mod(Formula),
    Mu(Formula),
    Nu(Formula),
}

impl MuRule {
    pub fn principal(&self) -> Option<&Formula> {
        match self {
            MuRule::Ax => None,
            MuRule::Wk(f) | MuRule::Or(f) | MuRule::And(f) | MuRule::Mod(f) | MuRule::Mu(f) | MuRule::Nu(f) => Some(f),
        }
    }

    pub fn parse(s: &str) -> Result<Self, InstanceError> {
        let s = s.trim();
        if s == "Ax" {
            return Ok(MuRule::Ax);
        }
        let (name, arg) = s.split_once(' ').ok_or_else(|| InstanceError::MalformedSequent(s.into()))?;
        let f = Formula::parse(arg)?;
        Ok(match name {
            "Wk" => MuRule::Wk(f),
            "Or" => MuRule::Or(f),
            "And" => MuRule::And(f),
            "Mod" => MuRule::Mod(f),
            "Mu" => MuRule::Mu(f),
            "Nu" => MuRule::Nu(f),
            _ => return Err(InstanceError::MalformedSequent(s.into())),
        })
    }
}

impl fmt::Display for MuRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MuRule::Ax => return f.write_str("Ax"),
            MuRule::Wk(_) => "Wk",
            MuRule::Or(_) => "Or",
            MuRule::And(_) => "And",
            MuRule::Mod(_) => "Mod",
            MuRule::Mu(_) => "Mu",
            MuRule::Nu(_) => "Nu",
        };
        write!(f, "{name} {}", self.principal().unwrap())
    }
}

fn check_named(fs: &BTreeSet<Formula>) -> Result<(), InstanceError> {
    match fs.iter().find(|f| !f.is_well_named()) {
        Some(f) => Err(InstanceError::NotWellNamed(f.to_string())),
        None => Ok(()),
    }
}

/// Premises of `rule` at conclusion `c`, with the results of the principal
/// formula in each premise.
fn apply(rule: &MuRule, c: &MuSequent) -> Result<Vec<(MuSequent, Vec<Formula>)>, InstanceError> {
    let no = || InstanceError::NotApplicable { rule: rule.to_string(), sequent: c.to_string() };
    if let Some(p) = rule.principal() {
        if !c.0.contains(p) {
            return Err(no());
        }
    }
    let rest = |p: &Formula| c.without(p);
    Ok(match rule {
        MuRule::Ax => {
            let ok = c.0.len() == 2
                && c.0.iter().any(|f| matches!(f, Formula::Prop(p) if c.0.contains(&Formula::NProp(p.clone()))));
            if !ok {
                return Err(no());
            }
            Vec::new()
        }
        MuRule::Wk(p) => Vec::from([(rest(p), Vec::new())]),
        MuRule::Or(p @ Formula::Or(l, r)) => {
            Vec::from([(rest(p).with([(**l).clone(), (**r).clone()]), Vec::from([(**l).clone(), (**r).clone()]))])
        }
        MuRule::And(p @ Formula::And(l, r)) => Vec::from([
            (rest(p).with([(**l).clone()]), Vec::from([(**l).clone()])),
            (rest(p).with([(**r).clone()]), Vec::from([(**r).clone()])),
        ]),
        MuRule::Mod(p @ Formula::Box(g)) => {
            let mut out = Vec::from([(**g).clone()]);
            for f in rest(p).0 {
                match f {
                    Formula::Dia(h) => out.push(*h),
                    _ => return Err(no()),
                }
            }
            Vec::from([(MuSequent::new(out.iter().cloned()), Vec::from([(**g).clone()]))])
        }
        MuRule::Mu(p @ Formula::Fix(Fix::Mu, ..)) | MuRule::Nu(p @ Formula::Fix(Fix::Nu, ..)) => {
            let u = p.unfold()?;
            Vec::from([(rest(p).with([u.clone()]), Vec::from([u]))])
        }
        _ => return Err(no()),
    })
}

/// The precursor relation of one premise: pairs `(φ, φ′)`, tagged with
/// whether `φ` is principal.
pub fn precursors(rule: &MuRule, c: &MuSequent, premise: usize) -> Result<Vec<(Formula, Formula, bool)>, InstanceError> {
    let prem = apply(rule, c)?;
    let (_, results) = prem.get(premise).ok_or_else(|| InstanceError::NotApplicable {
        rule: rule.to_string(),
        sequent: c.to_string(),
    })?;
    let mut out = Vec::new();
    for f in &c.0 {
        let principal = match rule {
            MuRule::Mod(_) => true,
            _ => rule.principal() == Some(f),
        };
        if !principal {
            out.push((f.clone(), f.clone(), false));
        } else if let MuRule::Mod(b) = rule {
            let g = match f {
                Formula::Dia(h) => (**h).clone(),
                _ if f == b => results[0].clone(),
                _ => unreachable!(),
            };
            out.push((f.clone(), g, true));
        } else {
            for r in results {
                out.push((f.clone(), r.clone(), true));
            }
        }
    }
    Ok(out)
}

/// Which trace interpretation an instance value carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuTraces {
    /// Over 𝔽: objects `(φ, x)` for `x ∈ V_ν(φ)`.
    Failure,
    /// Over 𝔹: objects `(φ, a)` for `a ∈ N(φ)`.
    Boolean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mu(pub MuTraces);

fn addr_str(a: &[u8]) -> String {
    if a.is_empty() {
        "ε".into()
    } else {
        a.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
    }
}

/// Object positions of a sequent, as `(formula, key)`.
fn positions(t: MuTraces, s: &MuSequent) -> Vec<(Formula, String)> {
    let mut out = Vec::new();
    for f in &s.0 {
        match t {
            MuTraces::Failure => out.extend(f.nu_vars().into_iter().map(|x| (f.clone(), x))),
            MuTraces::Boolean => out.extend(f.nu_addresses().into_iter().map(|a| (f.clone(), addr_str(&a)))),
        }
    }
    out
}

fn parse_addr(s: &str) -> Addr {
    if s == "ε" {
        Vec::new()
    } else {
        s.bytes().map(|b| b - b'0').collect()
    }
}

impl Instance for Mu {
    type Sequent = MuSequent;
    type Rule = MuRule;

    fn algebra(&self) -> ActivationAlgebra {
        match self.0 {
            MuTraces::Failure => ActivationAlgebra::failure(),
            MuTraces::Boolean => ActivationAlgebra::boolean(),
        }
    }

    fn premises(&self, rule: &MuRule, c: &MuSequent) -> Result<Vec<MuSequent>, InstanceError> {
        check_named(&c.0)?;
        let out: Vec<MuSequent> = apply(rule, c)?.into_iter().map(|(s, _)| s).collect();
        for s in &out {
            check_named(&s.0)?;
        }
        Ok(out)
    }

    fn object(&self, s: &MuSequent) -> Vec<String> {
        positions(self.0, s).into_iter().map(|(f, k)| format!("{f} : {k}")).collect()
    }

    fn maps(&self, rule: &MuRule, c: &MuSequent, premises: &[MuSequent]) -> Vec<Vec<(u32, Elem, u32)>> {
        let dom: BTreeMap<(Formula, String), u32> =
            positions(self.0, c).into_iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        premises
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let cod: BTreeMap<(Formula, String), u32> =
                    positions(self.0, p).into_iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
                let mut out = BTreeSet::new();
                let pre = precursors(rule, c, i).expect("premises were computed");
                for (f, g, principal) in pre {
                    match self.0 {
                        MuTraces::Failure => {
                            for x in f.nu_vars() {
                                let Some(&v) = cod.get(&(g.clone(), x.clone())) else { continue };
                                let label = match (principal, rule, &f) {
                                    (true, MuRule::Mu(_), Formula::Fix(Fix::Mu, y, _))
                                        if f.subsumption_closure().contains(&(y.clone(), x.clone())) =>
                                    {
                                        2
                                    }
                                    (true, MuRule::Nu(_), Formula::Fix(Fix::Nu, y, _)) if *y == x => 1,
                                    _ => 0,
                                };
                                out.insert((dom[&(f.clone(), x)], Elem(label), v));
                            }
                        }
                        MuTraces::Boolean => {
                            for a in f.nu_addresses() {
                                let u = dom[&(f.clone(), addr_str(&a))];
                                for (b, lab) in relocate(rule, &f, &g, principal, &a) {
                                    if let Some(&v) = cod.get(&(g.clone(), addr_str(&b))) {
                                        out.insert((u, Elem(lab), v));
                                    }
                                }
                            }
                        }
                    }
                }
                out.into_iter().collect()
            })
            .collect()
    }
}

/// Where the ν-instance at address `a` of `f` lives in its precursor `g`.
fn relocate(rule: &MuRule, f: &Formula, g: &Formula, principal: bool, a: &[u8]) -> Vec<(Addr, u8)> {
    if !principal {
        return Vec::from([(a.to_vec(), 0)]);
    }
    match (rule, f) {
        (MuRule::Mu(_) | MuRule::Nu(_), Formula::Fix(s, x, body)) => {
            let opens = body.open_addresses(x);
            match a.split_first() {
                None => {
                    let b = (*s == Fix::Nu) as u8;
                    opens.into_iter().map(|o| (o, b)).collect()
                }
                Some((_, rest)) => {
                    let mut out = Vec::from([(rest.to_vec(), 0)]);
                    for o in opens {
                        let mut v = o;
                        v.push(0);
                        v.extend_from_slice(rest);
                        out.push((v, 0));
                    }
                    out
                }
            }
        }
        (MuRule::Or(_), Formula::Or(l, r)) => match a.split_first() {
            Some((&i, rest)) if (i == 0 && **l == *g) || (i == 1 && **r == *g) => Vec::from([(rest.to_vec(), 0)]),
            _ => Vec::new(),
        },
        (MuRule::And(_), Formula::And(l, r)) => match a.split_first() {
            Some((&i, rest)) if (i == 0 && **l == *g) || (i == 1 && **r == *g) => Vec::from([(rest.to_vec(), 0)]),
            _ => Vec::new(),
        },
        (MuRule::Mod(_), Formula::Box(_) | Formula::Dia(_)) => match a.split_first() {
            Some((_, rest)) => Vec::from([(rest.to_vec(), 0)]),
            None => Vec::new(),
        },
        _ => Vec::new(),
    }
}

/// Reads a position name produced by [`Mu::object`] back.
pub fn parse_position(t: MuTraces, name: &str) -> Option<(Formula, String)> {
    let (f, k) = name.rsplit_once(" : ")?;
    let f = Formula::parse(f).ok()?;
    match t {
        MuTraces::Failure => f.nu_vars().contains(k).then(|| (f, k.to_string())),
        MuTraces::Boolean => {
            matches!(f.at(&parse_addr(k)), Some(Formula::Fix(Fix::Nu, ..))).then(|| (f, k.to_string()))
        }
    }
}
