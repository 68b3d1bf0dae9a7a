//! Cyclic Gödel's T: simple types over `N`, sequents `Γ ⇒ A`, the ten rules
//! and the trace interpretation over 𝔹 that follows occurrences of `N`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{ActivationAlgebra, Elem};
use crate::instance::{Instance, InstanceError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    N,
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    pub fn parse(s: &str) -> Result<Ty, InstanceError> {
        let toks = tokenize(s)?;
        let mut pos = 0;
        let t = parse_ty(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(InstanceError::MalformedSequent(s.into()));
        }
        Ok(t)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::N => f.write_str("N"),
            Ty::Arrow(a, b) => write!(f, "({a}->{b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    N,
    Arrow,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, InstanceError> {
    let mut out = Vec::new();
    let mut it = s.chars().peekable();
    while let Some(c) = it.next() {
        match c {
            ' ' | '\t' => {}
            'N' => out.push(Tok::N),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            '-' if it.next_if_eq(&'>').is_some() => out.push(Tok::Arrow),
            _ => return Err(InstanceError::MalformedSequent(s.into())),
        }
    }
    Ok(out)
}

// ty := atom ("->" ty)?
fn parse_ty(toks: &[Tok], pos: &mut usize) -> Result<Ty, InstanceError> {
    let bad = || InstanceError::MalformedSequent("type".into());
    let a = match toks.get(*pos) {
        Some(Tok::N) => {
            *pos += 1;
            Ty::N
        }
        Some(Tok::LParen) => {
            *pos += 1;
            let t = parse_ty(toks, pos)?;
            if toks.get(*pos) != Some(&Tok::RParen) {
                return Err(bad());
            }
            *pos += 1;
            t
        }
        _ => return Err(bad()),
    };
    if toks.get(*pos) == Some(&Tok::Arrow) {
        *pos += 1;
        return Ok(Ty::arrow(a, parse_ty(toks, pos)?));
    }
    Ok(a)
}

/// `Γ ⇒ A` with an ordered context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GtSequent {
    pub context: Vec<Ty>,
    pub goal: Ty,
}

impl GtSequent {
    pub fn new(context: Vec<Ty>, goal: Ty) -> Self {
        GtSequent { context, goal }
    }

    /// `|Γ|_N`
    pub fn n_count(&self) -> u32 {
        count_n(&self.context)
    }

    /// Syntax: `N, (N->N) => N`; an empty context is written `=> A`.
    pub fn parse(s: &str) -> Result<Self, InstanceError> {
        let (ctx, goal) = s.split_once("=>").ok_or_else(|| InstanceError::MalformedSequent(s.into()))?;
        let mut context = Vec::new();
        if !ctx.trim().is_empty() {
            let mut depth = 0i32;
            let mut start = 0;
            for (i, c) in ctx.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        context.push(Ty::parse(&ctx[start..i])?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            context.push(Ty::parse(&ctx[start..])?);
        }
        Ok(GtSequent { context, goal: Ty::parse(goal)? })
    }
}

impl fmt::Display for GtSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.context.iter().enumerate() {
            write!(f, "{}{t}", if i > 0 { ", " } else { "" })?;
        }
        write!(f, "{}=> {}", if self.context.is_empty() { "" } else { " " }, self.goal)
    }
}

fn count_n(ctx: &[Ty]) -> u32 {
    ctx.iter().filter(|t| **t == Ty::N).count() as u32
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CgtRule {
    Id,
    Zero,
    Succ,
    L,
    R,
    Cond,
    /// Swaps context positions `k` and `k + 1` (0-based).
    Ex(usize),
    Wk,
    Ctr,
    Cut(Ty),
}

impl fmt::Display for CgtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CgtRule::Id => f.write_str("Id"),
            CgtRule::Zero => f.write_str("0"),
            CgtRule::Succ => f.write_str("S"),
            CgtRule::L => f.write_str("L"),
            CgtRule::R => f.write_str("R"),
            CgtRule::Cond => f.write_str("Cond"),
            CgtRule::Ex(k) => write!(f, "Ex({k})"),
            CgtRule::Wk => f.write_str("Wk"),
            CgtRule::Ctr => f.write_str("Ctr"),
            CgtRule::Cut(b) => write!(f, "Cut({b})"),
        }
    }
}

impl CgtRule {
    pub fn parse(s: &str) -> Result<Self, InstanceError> {
        let s = s.trim();
        let arg = |p: &str| s.strip_prefix(p).and_then(|r| r.strip_suffix(')'));
        Ok(match s {
            "Id" => CgtRule::Id,
            "0" => CgtRule::Zero,
            "S" => CgtRule::Succ,
            "L" => CgtRule::L,
            "R" => CgtRule::R,
            "Cond" => CgtRule::Cond,
            "Wk" => CgtRule::Wk,
            "Ctr" => CgtRule::Ctr,
            _ => {
                if let Some(k) = arg("Ex(") {
                    CgtRule::Ex(k.trim().parse().map_err(|_| InstanceError::MalformedSequent(s.into()))?)
                } else if let Some(t) = arg("Cut(") {
                    CgtRule::Cut(Ty::parse(t)?)
                } else {
                    return Err(InstanceError::MalformedSequent(s.into()));
                }
            }
        })
    }
}

/// The system together with its 𝔹-interpretation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cgt;

impl Instance for Cgt {
    type Sequent = GtSequent;
    type Rule = CgtRule;

    fn algebra(&self) -> ActivationAlgebra {
        ActivationAlgebra::boolean()
    }

    fn premises(&self, rule: &CgtRule, c: &GtSequent) -> Result<Vec<GtSequent>, InstanceError> {
        let no = || InstanceError::NotApplicable { rule: rule.to_string(), sequent: c.to_string() };
        let ctx = &c.context;
        let (init, last) = match ctx.split_last() {
            Some((l, i)) => (i.to_vec(), Some(l)),
            None => (Vec::new(), None),
        };
        let with = |mut v: Vec<Ty>, extra: &[Ty]| {
            v.extend_from_slice(extra);
            v
        };
        Ok(match rule {
            CgtRule::Id if ctx.len() == 1 && ctx[0] == c.goal => Vec::new(),
            CgtRule::Zero if ctx.is_empty() && c.goal == Ty::N => Vec::new(),
            CgtRule::Succ if *ctx == [Ty::N] && c.goal == Ty::N => Vec::new(),
            CgtRule::L => match last {
                Some(Ty::Arrow(rho, a)) => Vec::from([
                    GtSequent::new(init.clone(), (**rho).clone()),
                    GtSequent::new(with(init, &[(**a).clone()]), c.goal.clone()),
                ]),
                _ => return Err(no()),
            },
            CgtRule::R => match &c.goal {
                Ty::Arrow(a, b) => Vec::from([GtSequent::new(with(ctx.clone(), &[(**a).clone()]), (**b).clone())]),
                _ => return Err(no()),
            },
            CgtRule::Cond if last == Some(&Ty::N) => {
                Vec::from([GtSequent::new(init, c.goal.clone()), c.clone()])
            }
            CgtRule::Ex(k) if k + 1 < ctx.len() => {
                let mut v = ctx.clone();
                v.swap(*k, k + 1);
                Vec::from([GtSequent::new(v, c.goal.clone())])
            }
            CgtRule::Wk if last.is_some() => Vec::from([GtSequent::new(init, c.goal.clone())]),
            CgtRule::Ctr => match last {
                Some(a) => Vec::from([GtSequent::new(with(ctx.clone(), core::slice::from_ref(a)), c.goal.clone())]),
                None => return Err(no()),
            },
            CgtRule::Cut(b) => Vec::from([
                GtSequent::new(ctx.clone(), b.clone()),
                GtSequent::new(with(ctx.clone(), core::slice::from_ref(b)), c.goal.clone()),
            ]),
            _ => return Err(no()),
        })
    }

    /// `{1, …, |Γ|_N}`
    fn object(&self, s: &GtSequent) -> Vec<String> {
        (1..=s.n_count()).map(|i| format!("{i}")).collect()
    }

    fn maps(&self, rule: &CgtRule, c: &GtSequent, premises: &[GtSequent]) -> Vec<Vec<(u32, Elem, u32)>> {
        let z = Elem::ZERO;
        let id = |n: u32| (0..n).map(|j| (j, z, j)).collect::<Vec<_>>();
        let k = c.n_count();
        let ends_in_n = c.context.last() == Some(&Ty::N);
        premises
            .iter()
            .enumerate()
            .map(|(i, p)| match rule {
                CgtRule::Ex(pos) if c.context[*pos] == Ty::N && c.context[pos + 1] == Ty::N => {
                    let a = count_n(&c.context[..*pos]);
                    let mut m = id(k);
                    m.retain(|t| t.0 != a && t.0 != a + 1);
                    m.extend([(a, z, a + 1), (a + 1, z, a)]);
                    m
                }
                CgtRule::Wk if ends_in_n => id(k - 1),
                CgtRule::Cond if i == 0 => id(k - 1),
                CgtRule::Cond => {
                    let mut m = id(k - 1);
                    m.push((k - 1, Elem(1), k - 1));
                    m
                }
                CgtRule::Ctr if ends_in_n => {
                    let mut m = id(k);
                    m.push((k - 1, z, k));
                    m
                }
                _ => id(k.min(p.n_count())),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtc::check_gtc;
    use crate::instance::{build, Sketch};
    use alloc::vec;

    fn seq(s: &str) -> GtSequent {
        GtSequent::parse(s).unwrap()
    }

    #[test]
    fn syntax_round_trip() {
        for s in ["=> N", "N => N", "N, (N->N) => N", "((N->N)->N), N => (N->(N->N))"] {
            assert_eq!(seq(s).to_string(), s);
        }
        assert_eq!(Ty::parse("N->N->N").unwrap(), Ty::arrow(Ty::N, Ty::arrow(Ty::N, Ty::N)));
        assert!(GtSequent::parse("N, => N").is_err());
        assert!(GtSequent::parse("N N").is_err());
        for r in ["Id", "0", "S", "Ex(2)", "Cut((N->N))", "Cond"] {
            assert_eq!(CgtRule::parse(r).unwrap().to_string(), r);
        }
    }

    #[test]
    fn rule_shapes() {
        let p = Cgt.premises(&CgtRule::Cond, &seq("(N->N), N => N")).unwrap();
        assert_eq!(p, vec![seq("(N->N) => N"), seq("(N->N), N => N")]);
        assert_eq!(Cgt.premises(&CgtRule::Ex(0), &seq("N, (N->N) => N")).unwrap(), vec![seq("(N->N), N => N")]);
        assert_eq!(
            Cgt.premises(&CgtRule::L, &seq("N, (N->N) => N")).unwrap(),
            vec![seq("N => N"), seq("N, N => N")]
        );
        assert!(Cgt.premises(&CgtRule::Id, &seq("N => N")).unwrap().is_empty());
        assert!(Cgt.premises(&CgtRule::Zero, &seq("N => N")).is_err());
        assert!(Cgt.premises(&CgtRule::Cond, &seq("(N->N) => N")).is_err());
        assert_eq!(Cgt.premises(&CgtRule::Ctr, &seq("N => N")).unwrap(), vec![seq("N, N => N")]);
    }

    #[test]
    fn trace_maps() {
        let c = seq("N, N, N => N");
        let prem = Cgt.premises(&CgtRule::Cond, &c).unwrap();
        let m = Cgt.maps(&CgtRule::Cond, &c, &prem);
        assert_eq!(m[0], vec![(0, Elem(0), 0), (1, Elem(0), 1)]);
        assert!(m[1].contains(&(2, Elem(1), 2)));
        let prem = Cgt.premises(&CgtRule::Ex(1), &c).unwrap();
        let m = Cgt.maps(&CgtRule::Ex(1), &c, &prem);
        assert_eq!(m[0], vec![(0, Elem(0), 0), (1, Elem(0), 2), (2, Elem(0), 1)]);
        let c = seq("(N->N), N => N");
        let prem = Cgt.premises(&CgtRule::Ex(0), &c).unwrap();
        assert_eq!(Cgt.maps(&CgtRule::Ex(0), &c, &prem)[0], vec![(0, Elem(0), 0)]);
        let c = seq("N => N");
        let prem = Cgt.premises(&CgtRule::Ctr, &c).unwrap();
        assert_eq!(Cgt.maps(&CgtRule::Ctr, &c, &prem)[0], vec![(0, Elem(0), 0), (0, Elem(0), 1)]);
    }

    fn cond_loop(progress: bool) -> crate::instance::Compiled {
        use CgtRule::*;
        let sk = Sketch::named("r", Sketch::rule(Cond, vec![Sketch::rule(Zero, vec![]), Sketch::Bud("r")]));
        let mut c = build(&Cgt, seq("N => N"), &sk).unwrap();
        if !progress {
            // drop the progress triple
            let r = c.proof.rule(&Address::root()).copied().unwrap();
            let mut ms = c.iota.maps(r).unwrap().to_vec();
            ms[1] = crate::trace::TraceMorphism::identity(ms[1].dom());
            c.iota.set_maps(r, ms);
        }
        c
    }
    use crate::proof::Address;

    #[test]
    fn cond_loop_verdicts() {
        let c = cond_loop(true);
        c.proof.validate(&c.system).unwrap();
        assert!(check_gtc(&c.proof, &c.iota).unwrap().is_proof());
        let c = cond_loop(false);
        assert!(!check_gtc(&c.proof, &c.iota).unwrap().is_proof());
    }
}
