//! The expression language: s-expressions for spaces, points, open and
//! closed sets, and functors.
//!
//! ```text
//! space   := nat | (fin a b … (le a b) …) | (sum S T) | (prod S T)
//!          | (words S) | (trees S) | (ordwords S α) | (ordtrees S α) | (mu F)
//! point   := atom | n | (pair p q) | (inl p) | (inr p) | (word p …)
//!          | (node p t …) | (ordword (p α) …) | (onode p (t α) …)
//! open    := empty | whole | (union U …) | (inter U …) | (up p …) | (base a)
//!          | (rect U V) | (sumopen U V) | (wordopen U …) | (concatup U V)
//!          | (treeopen U V) | (tri α U) | (rtimes C U) | (lconcat U V)
//!          | (within U C) | (divup U)
//! closed  := emptyc | wholec | (unionc C …) | (interc C …) | (down p …)
//!          | (compl U) | (ordprod A …)   where A := (le1 C) | (pow C α)
//! functor := unit | id | (sum F G) | (prod F G) | (list F) | (const S) | S
//! ```
//!
//! Ordinals are written in compact form (`w^2*3+1`, `w^{w+1}`). Points, opens
//! and closed sets are parsed against the space they live in, so `3` is a
//! natural in `nat` and an atom in `(fin 3 4)`. Printing is canonical and
//! re-parses to an equal value.

use std::fmt;

use crate::error::Result;
use crate::inductive::{self, FunctorExpr};
use crate::ordinal::Ordinal;
use crate::sets::{ClosedExpr, OpenExpr, ProductAtom};
use crate::sexpr::{self, Sexp};
use crate::space::{self, FiniteQo, PointTerm, SpaceExpr};

fn bx<T>(x: T) -> Box<T> {
    Box::new(x)
}

fn arity<'a>(s: &'a Sexp, args: &'a [Sexp], n: usize) -> Result<&'a [Sexp]> {
    if args.len() == n {
        Ok(args)
    } else {
        Err(s.error(format!("expected {n} argument(s), found {}", args.len())))
    }
}

fn ordinal(s: &Sexp) -> Result<Ordinal> {
    let text = s.as_atom().ok_or_else(|| s.error("expected an ordinal"))?;
    text.parse::<Ordinal>().map_err(|e| s.error(format!("bad ordinal {text:?}: {e}")))
}

fn ord_atom(a: &Ordinal) -> Sexp {
    Sexp::atom(a.to_compact())
}

pub fn parse_space(s: &Sexp) -> Result<SpaceExpr> {
    let space = space_inner(s)?;
    space.validate().map_err(|e| s.error(e.to_string()))?;
    Ok(space)
}

fn space_inner(s: &Sexp) -> Result<SpaceExpr> {
    if let Some(a) = s.as_atom() {
        return match a {
            "nat" => Ok(SpaceExpr::Nat),
            _ => Err(s.error(format!("unknown space {a:?}"))),
        };
    }
    let (head, args) = s.as_call().ok_or_else(|| s.error("expected a space"))?;
    match head {
        "fin" => {
            let mut atoms = Vec::new();
            let mut pairs = Vec::new();
            for a in args {
                match (a.as_atom(), a.as_call()) {
                    (Some(x), _) => atoms.push(x.to_string()),
                    (_, Some(("le", [x, y]))) => match (x.as_atom(), y.as_atom()) {
                        (Some(x), Some(y)) => pairs.push((x.to_string(), y.to_string())),
                        _ => return Err(a.error("le expects two atoms")),
                    },
                    _ => return Err(a.error("expected an atom or (le a b)")),
                }
            }
            let qo = FiniteQo::from_pairs(atoms, &pairs).map_err(|e| s.error(e.to_string()))?;
            Ok(SpaceExpr::Fin(qo))
        }
        "sum" | "prod" => {
            let a = arity(s, args, 2)?;
            let (l, r) = (space_inner(&a[0])?, space_inner(&a[1])?);
            Ok(if head == "sum" { SpaceExpr::sum(l, r) } else { SpaceExpr::product(l, r) })
        }
        "words" => Ok(SpaceExpr::words(space_inner(&arity(s, args, 1)?[0])?)),
        "trees" => Ok(SpaceExpr::trees(space_inner(&arity(s, args, 1)?[0])?)),
        "ordwords" | "ordtrees" => {
            let a = arity(s, args, 2)?;
            let (b, alpha) = (space_inner(&a[0])?, ordinal(&a[1])?);
            Ok(if head == "ordwords" { SpaceExpr::ord_words(b, alpha) } else { SpaceExpr::ord_trees(b, alpha) })
        }
        "mu" => Ok(SpaceExpr::Mu(bx(parse_functor(&arity(s, args, 1)?[0])?))),
        _ => Err(s.error(format!("unknown space constructor {head:?}"))),
    }
}

pub fn space_to_sexp(space: &SpaceExpr) -> Sexp {
    match space {
        SpaceExpr::Nat => Sexp::atom("nat"),
        SpaceExpr::Fin(qo) => {
            let mut args: Vec<Sexp> = qo.atoms().iter().map(Sexp::atom).collect();
            for (a, b) in qo.strict_pairs() {
                args.push(Sexp::call("le", vec![Sexp::atom(a), Sexp::atom(b)]));
            }
            Sexp::call("fin", args)
        }
        SpaceExpr::Sum(l, r) => Sexp::call("sum", vec![space_to_sexp(l), space_to_sexp(r)]),
        SpaceExpr::Product(l, r) => Sexp::call("prod", vec![space_to_sexp(l), space_to_sexp(r)]),
        SpaceExpr::Words(b) => Sexp::call("words", vec![space_to_sexp(b)]),
        SpaceExpr::Trees(b) => Sexp::call("trees", vec![space_to_sexp(b)]),
        SpaceExpr::OrdWords(b, a) => Sexp::call("ordwords", vec![space_to_sexp(b), ord_atom(a)]),
        SpaceExpr::OrdTrees(b, a) => Sexp::call("ordtrees", vec![space_to_sexp(b), ord_atom(a)]),
        SpaceExpr::Mu(f) => Sexp::call("mu", vec![functor_to_sexp(f)]),
    }
}

/// Accepts a functor body or `(mu F)`.
pub fn parse_functor(s: &Sexp) -> Result<FunctorExpr> {
    let body = match s.as_call() {
        Some(("mu", args)) => &arity(s, args, 1)?[0],
        _ => s,
    };
    let f = functor_inner(body)?;
    f.validate().map_err(|e| s.error(e.to_string()))?;
    Ok(f)
}

fn functor_inner(s: &Sexp) -> Result<FunctorExpr> {
    match s.as_atom() {
        Some("unit") => return Ok(FunctorExpr::Unit),
        Some("id") => return Ok(FunctorExpr::Id),
        _ => {}
    }
    match s.as_call() {
        Some(("sum" | "prod", args)) => {
            let a = arity(s, args, 2)?;
            let (l, r) = (bx(functor_inner(&a[0])?), bx(functor_inner(&a[1])?));
            Ok(if s.as_call().map(|c| c.0) == Some("sum") { FunctorExpr::Sum(l, r) } else { FunctorExpr::Prod(l, r) })
        }
        Some(("list", args)) => Ok(FunctorExpr::List(bx(functor_inner(&arity(s, args, 1)?[0])?))),
        Some(("const", args)) => Ok(FunctorExpr::Const(space_inner(&arity(s, args, 1)?[0])?)),
        _ => Ok(FunctorExpr::Const(space_inner(s)?)),
    }
}

pub fn functor_to_sexp(f: &FunctorExpr) -> Sexp {
    match f {
        FunctorExpr::Unit => Sexp::atom("unit"),
        FunctorExpr::Id => Sexp::atom("id"),
        FunctorExpr::Sum(l, r) => Sexp::call("sum", vec![functor_to_sexp(l), functor_to_sexp(r)]),
        FunctorExpr::Prod(l, r) => Sexp::call("prod", vec![functor_to_sexp(l), functor_to_sexp(r)]),
        FunctorExpr::List(g) => Sexp::call("list", vec![functor_to_sexp(g)]),
        FunctorExpr::Const(s @ (SpaceExpr::Sum(..) | SpaceExpr::Product(..))) => {
            Sexp::call("const", vec![space_to_sexp(s)])
        }
        FunctorExpr::Const(s) => space_to_sexp(s),
    }
}

/// Parses a point of `space` and checks that it belongs to it.
pub fn parse_point(space: &SpaceExpr, s: &Sexp) -> Result<PointTerm> {
    let p = point_inner(space, s)?;
    if !space::typecheck(space, &p) {
        return Err(s.error(format!("point does not belong to {}", space_to_sexp(space))));
    }
    Ok(p)
}

fn point_inner(space: &SpaceExpr, s: &Sexp) -> Result<PointTerm> {
    let call = s.as_call();
    match space {
        SpaceExpr::Fin(qo) => match s.as_atom() {
            Some(a) if qo.index_of(a).is_some() => Ok(PointTerm::atom(a)),
            _ => Err(s.error(format!("expected an atom of {}", space_to_sexp(space)))),
        },
        SpaceExpr::Nat => s
            .as_atom()
            .and_then(|a| a.parse::<u64>().ok())
            .map(PointTerm::Nat)
            .ok_or_else(|| s.error("expected a natural number")),
        SpaceExpr::Sum(l, r) => match call {
            Some(("inl", args)) => Ok(PointTerm::InL(bx(point_inner(l, &arity(s, args, 1)?[0])?))),
            Some(("inr", args)) => Ok(PointTerm::InR(bx(point_inner(r, &arity(s, args, 1)?[0])?))),
            _ => Err(s.error("expected (inl p) or (inr p)")),
        },
        SpaceExpr::Product(l, r) => match call {
            Some(("pair", args)) => {
                let a = arity(s, args, 2)?;
                Ok(PointTerm::pair(point_inner(l, &a[0])?, point_inner(r, &a[1])?))
            }
            _ => Err(s.error("expected (pair p q)")),
        },
        SpaceExpr::Words(b) => match call {
            Some(("word", args)) => Ok(PointTerm::Word(args.iter().map(|a| point_inner(b, a)).collect::<Result<_>>()?)),
            _ => Err(s.error("expected (word …)")),
        },
        SpaceExpr::Trees(b) => match call {
            Some(("node", [label, kids @ ..])) => Ok(PointTerm::node(
                point_inner(b, label)?,
                kids.iter().map(|k| point_inner(space, k)).collect::<Result<_>>()?,
            )),
            _ => Err(s.error("expected (node label child …)")),
        },
        SpaceExpr::OrdWords(b, _) => match call {
            Some(("ordword", segs)) => Ok(PointTerm::ord_word(segments(b, segs)?)),
            _ => Err(s.error("expected (ordword (letter α) …)")),
        },
        SpaceExpr::OrdTrees(b, _) => match call {
            Some(("onode", [label, kids @ ..])) => Ok(PointTerm::ord_node(point_inner(b, label)?, segments(space, kids)?)),
            _ => Err(s.error("expected (onode label (child α) …)")),
        },
        SpaceExpr::Mu(f) => point_inner(&inductive::shape_space(f, f), s),
    }
}

fn segments(letters: &SpaceExpr, segs: &[Sexp]) -> Result<Vec<(PointTerm, Ordinal)>> {
    segs.iter()
        .map(|seg| match seg {
            Sexp::List(xs, _) if xs.len() == 2 => Ok((point_inner(letters, &xs[0])?, ordinal(&xs[1])?)),
            _ => Err(seg.error("expected (letter α)")),
        })
        .collect()
}

pub fn point_to_sexp(p: &PointTerm) -> Sexp {
    let segs = |segs: &[(PointTerm, Ordinal)]| -> Vec<Sexp> {
        segs.iter().map(|(x, n)| Sexp::list(vec![point_to_sexp(x), ord_atom(n)])).collect()
    };
    match p {
        PointTerm::Atom(a) => Sexp::atom(a.clone()),
        PointTerm::Nat(n) => Sexp::atom(n.to_string()),
        PointTerm::Pair(x, y) => Sexp::call("pair", vec![point_to_sexp(x), point_to_sexp(y)]),
        PointTerm::InL(x) => Sexp::call("inl", vec![point_to_sexp(x)]),
        PointTerm::InR(x) => Sexp::call("inr", vec![point_to_sexp(x)]),
        PointTerm::Word(xs) => Sexp::call("word", xs.iter().map(point_to_sexp).collect()),
        PointTerm::Node(l, cs) => match cs.as_slice() {
            [PointTerm::OrdWord(kids)] => {
                let mut args = vec![point_to_sexp(l)];
                args.extend(segs(kids));
                Sexp::call("onode", args)
            }
            _ => {
                let mut args = vec![point_to_sexp(l)];
                args.extend(cs.iter().map(point_to_sexp));
                Sexp::call("node", args)
            }
        },
        PointTerm::OrdWord(s) => Sexp::call("ordword", segs(s)),
    }
}

fn word_space(space: &SpaceExpr, s: &Sexp) -> Result<SpaceExpr> {
    space.letters().cloned().ok_or_else(|| s.error(format!("{} is not a word space", space_to_sexp(space))))
}

pub fn parse_open(space: &SpaceExpr, s: &Sexp) -> Result<OpenExpr> {
    match s.as_atom() {
        Some("empty") => return Ok(OpenExpr::Empty),
        Some("whole") => return Ok(OpenExpr::Whole),
        Some(a) => return Err(s.error(format!("unknown open {a:?}"))),
        None => {}
    }
    let (head, args) = s.as_call().ok_or_else(|| s.error("expected an open set"))?;
    let many = |sp: &SpaceExpr| args.iter().map(|a| parse_open(sp, a)).collect::<Result<Vec<_>>>();
    Ok(match head {
        "union" => OpenExpr::Union(many(space)?),
        "inter" => OpenExpr::Intersect(many(space)?),
        "up" => OpenExpr::UpClosure(args.iter().map(|a| parse_point(space, a)).collect::<Result<_>>()?),
        "base" => {
            let a = &arity(s, args, 1)?[0];
            match (space, a.as_atom()) {
                (SpaceExpr::Fin(qo), Some(x)) if qo.index_of(x).is_some() => OpenExpr::BaseOpen(x.to_string()),
                _ => return Err(a.error("expected an atom of a finite space")),
            }
        }
        "rect" | "sumopen" => {
            let a = arity(s, args, 2)?;
            match (head, space) {
                ("rect", SpaceExpr::Product(l, r)) => OpenExpr::Rect(bx(parse_open(l, &a[0])?), bx(parse_open(r, &a[1])?)),
                ("sumopen", SpaceExpr::Sum(l, r)) => {
                    OpenExpr::SumOpen(bx(parse_open(l, &a[0])?), bx(parse_open(r, &a[1])?))
                }
                _ => return Err(s.error(format!("{head} does not apply to {}", space_to_sexp(space)))),
            }
        }
        "wordopen" => OpenExpr::WordOpen(many(&word_space(space, s)?)?),
        "concatup" => {
            word_space(space, s)?;
            let a = arity(s, args, 2)?;
            OpenExpr::concat_up(parse_open(space, &a[0])?, parse_open(space, &a[1])?)
        }
        "treeopen" => {
            let a = arity(s, args, 2)?;
            let (base, kids) = match space {
                SpaceExpr::Trees(b) => (&**b, SpaceExpr::words(space.clone())),
                SpaceExpr::OrdTrees(b, alpha) => (&**b, SpaceExpr::ord_words(space.clone(), alpha.clone())),
                _ => return Err(s.error("treeopen needs a tree space")),
            };
            OpenExpr::tree_open(parse_open(base, &a[0])?, parse_open(&kids, &a[1])?)
        }
        "tri" => {
            word_space(space, s)?;
            let a = arity(s, args, 2)?;
            OpenExpr::triangle(ordinal(&a[0])?, parse_open(space, &a[1])?)
        }
        "rtimes" => {
            let letters = word_space(space, s)?;
            let a = arity(s, args, 2)?;
            OpenExpr::rtimes(parse_closed(&letters, &a[0])?, parse_open(space, &a[1])?)
        }
        "lconcat" => {
            let letters = word_space(space, s)?;
            let a = arity(s, args, 2)?;
            OpenExpr::letter_concat(parse_open(&letters, &a[0])?, parse_open(space, &a[1])?)
        }
        "within" => {
            let a = arity(s, args, 2)?;
            OpenExpr::Within(bx(parse_open(space, &a[0])?), bx(parse_closed(space, &a[1])?))
        }
        "divup" => match space {
            SpaceExpr::Mu(f) => OpenExpr::DivUp(bx(parse_open(&inductive::shape_space(f, f), &arity(s, args, 1)?[0])?)),
            _ => return Err(s.error("divup needs an inductive space")),
        },
        _ => return Err(s.error(format!("unknown open constructor {head:?}"))),
    })
}

pub fn open_to_sexp(u: &OpenExpr) -> Sexp {
    use OpenExpr::*;
    let all = |xs: &[OpenExpr]| xs.iter().map(open_to_sexp).collect::<Vec<_>>();
    match u {
        Empty => Sexp::atom("empty"),
        Whole => Sexp::atom("whole"),
        Union(xs) => Sexp::call("union", all(xs)),
        Intersect(xs) => Sexp::call("inter", all(xs)),
        UpClosure(ps) => Sexp::call("up", ps.iter().map(point_to_sexp).collect()),
        BaseOpen(a) => Sexp::call("base", vec![Sexp::atom(a.clone())]),
        Rect(l, r) => Sexp::call("rect", vec![open_to_sexp(l), open_to_sexp(r)]),
        SumOpen(l, r) => Sexp::call("sumopen", vec![open_to_sexp(l), open_to_sexp(r)]),
        WordOpen(xs) => Sexp::call("wordopen", all(xs)),
        ConcatUp(l, r) => Sexp::call("concatup", vec![open_to_sexp(l), open_to_sexp(r)]),
        TreeOpen(l, r) => Sexp::call("treeopen", vec![open_to_sexp(l), open_to_sexp(r)]),
        Triangle(b, x) => Sexp::call("tri", vec![ord_atom(b), open_to_sexp(x)]),
        RTimes(f, x) => Sexp::call("rtimes", vec![closed_to_sexp(f), open_to_sexp(x)]),
        LetterConcat(l, r) => Sexp::call("lconcat", vec![open_to_sexp(l), open_to_sexp(r)]),
        Within(x, h) => Sexp::call("within", vec![open_to_sexp(x), closed_to_sexp(h)]),
        DivUp(l) => Sexp::call("divup", vec![open_to_sexp(l)]),
    }
}

pub fn parse_closed(space: &SpaceExpr, s: &Sexp) -> Result<ClosedExpr> {
    match s.as_atom() {
        Some("emptyc") => return Ok(ClosedExpr::EmptyC),
        Some("wholec") => return Ok(ClosedExpr::WholeC),
        Some(a) => return Err(s.error(format!("unknown closed set {a:?}"))),
        None => {}
    }
    let (head, args) = s.as_call().ok_or_else(|| s.error("expected a closed set"))?;
    let many = || args.iter().map(|a| parse_closed(space, a)).collect::<Result<Vec<_>>>();
    Ok(match head {
        "unionc" => ClosedExpr::UnionC(many()?),
        "interc" => ClosedExpr::IntersectC(many()?),
        "down" => ClosedExpr::DownClosure(args.iter().map(|a| parse_point(space, a)).collect::<Result<_>>()?),
        "compl" => ClosedExpr::complement_of(parse_open(space, &arity(s, args, 1)?[0])?),
        "ordprod" => {
            let letters = word_space(space, s)?;
            let atoms = args
                .iter()
                .map(|a| match a.as_call() {
                    Some(("le1", [f])) => Ok(ProductAtom::AtMostOne(parse_closed(&letters, f)?)),
                    Some(("pow", [f, beta])) => Ok(ProductAtom::Power(parse_closed(&letters, f)?, ordinal(beta)?)),
                    _ => Err(a.error("expected (le1 F) or (pow F α)")),
                })
                .collect::<Result<_>>()?;
            ClosedExpr::OrdProduct(atoms)
        }
        _ => return Err(s.error(format!("unknown closed constructor {head:?}"))),
    })
}

pub fn closed_to_sexp(c: &ClosedExpr) -> Sexp {
    use ClosedExpr::*;
    let all = |xs: &[ClosedExpr]| xs.iter().map(closed_to_sexp).collect::<Vec<_>>();
    match c {
        EmptyC => Sexp::atom("emptyc"),
        WholeC => Sexp::atom("wholec"),
        UnionC(xs) => Sexp::call("unionc", all(xs)),
        IntersectC(xs) => Sexp::call("interc", all(xs)),
        DownClosure(ps) => Sexp::call("down", ps.iter().map(point_to_sexp).collect()),
        ComplementOf(u) => Sexp::call("compl", vec![open_to_sexp(u)]),
        OrdProduct(atoms) => Sexp::call(
            "ordprod",
            atoms
                .iter()
                .map(|a| match a {
                    ProductAtom::AtMostOne(f) => Sexp::call("le1", vec![closed_to_sexp(f)]),
                    ProductAtom::Power(f, b) => Sexp::call("pow", vec![closed_to_sexp(f), ord_atom(b)]),
                })
                .collect(),
        ),
    }
}

pub fn space_from_str(src: &str) -> Result<SpaceExpr> {
    parse_space(&sexpr::parse_one(src)?)
}

pub fn functor_from_str(src: &str) -> Result<FunctorExpr> {
    parse_functor(&sexpr::parse_one(src)?)
}

pub fn point_from_str(space: &SpaceExpr, src: &str) -> Result<PointTerm> {
    parse_point(space, &sexpr::parse_one(src)?)
}

pub fn open_from_str(space: &SpaceExpr, src: &str) -> Result<OpenExpr> {
    parse_open(space, &sexpr::parse_one(src)?)
}

pub fn closed_from_str(space: &SpaceExpr, src: &str) -> Result<ClosedExpr> {
    parse_closed(space, &sexpr::parse_one(src)?)
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", space_to_sexp(self))
    }
}

impl fmt::Display for PointTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", point_to_sexp(self))
    }
}

impl fmt::Display for OpenExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", open_to_sexp(self))
    }
}

impl fmt::Display for ClosedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", closed_to_sexp(self))
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", functor_to_sexp(self))
    }
}

macro_rules! serialize_as_text {
    ($($t:ty),*) => {$(
        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

serialize_as_text!(SpaceExpr, PointTerm, OpenExpr, ClosedExpr, FunctorExpr);
