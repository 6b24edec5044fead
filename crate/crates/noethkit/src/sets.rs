//! Symbolic open and closed sets, membership, inclusion, restriction, and the
//! complement construction for ordinal products.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inductive;
use crate::ordinal::{Classification, Ordinal};
use crate::space::{self, ow, PointTerm, SpaceExpr};
use crate::universe::Universe;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpenExpr {
    Empty,
    Whole,
    Union(Vec<OpenExpr>),
    Intersect(Vec<OpenExpr>),
    /// Upward closure of finitely many points.
    UpClosure(Vec<PointTerm>),
    /// Upward closure of an atom of a finite base.
    BaseOpen(String),
    Rect(Box<OpenExpr>, Box<OpenExpr>),
    SumOpen(Box<OpenExpr>, Box<OpenExpr>),
    /// `⟨U1,…,Un⟩`: words with a subsequence whose i-th letter lies in `Ui`.
    WordOpen(Vec<OpenExpr>),
    /// `↑(UV)`.
    ConcatUp(Box<OpenExpr>, Box<OpenExpr>),
    /// `◇U⟨V⟩`: trees with a subtree whose root is in `U` and children word in `V`.
    TreeOpen(Box<OpenExpr>, Box<OpenExpr>),
    /// `↑(β ▷ U)`.
    Triangle(Ordinal, Box<OpenExpr>),
    /// `F ⋊ U = ↑{av : a ∉ F, av ∈ U}`.
    RTimes(Box<ClosedExpr>, Box<OpenExpr>),
    /// Plain concatenation `UV` of a letter set and a word set (not upward closed).
    LetterConcat(Box<OpenExpr>, Box<OpenExpr>),
    /// `U ∩ H` for a closed carrier `H`.
    Within(Box<OpenExpr>, Box<ClosedExpr>),
    /// `↑⊑ δ(L)` over an initial algebra, for `L` open in the unfolding space.
    DivUp(Box<OpenExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosedExpr {
    EmptyC,
    WholeC,
    UnionC(Vec<ClosedExpr>),
    IntersectC(Vec<ClosedExpr>),
    DownClosure(Vec<PointTerm>),
    ComplementOf(Box<OpenExpr>),
    /// `A1 A2 ⋯ An` over words; the empty product is `{ε}`.
    OrdProduct(Vec<ProductAtom>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProductAtom {
    /// `F^{≤1}`.
    AtMostOne(ClosedExpr),
    /// `F^{<β}`.
    Power(ClosedExpr, Ordinal),
}

impl ProductAtom {
    pub fn letters(&self) -> &ClosedExpr {
        match self {
            ProductAtom::AtMostOne(f) | ProductAtom::Power(f, _) => f,
        }
    }

    /// The strict length bound `β` (2 for `F^{≤1}`).
    pub fn exponent(&self) -> Ordinal {
        match self {
            ProductAtom::AtMostOne(_) => Ordinal::from(2),
            ProductAtom::Power(_, b) => b.clone(),
        }
    }
}

fn bx<T>(x: T) -> Box<T> {
    Box::new(x)
}

impl OpenExpr {
    pub fn up(points: Vec<PointTerm>) -> Self {
        OpenExpr::UpClosure(points)
    }

    /// `↑a` for a single atom.
    pub fn up_atom(a: &str) -> Self {
        OpenExpr::UpClosure(vec![PointTerm::atom(a)])
    }

    /// `⟨↑a1, …, ↑an⟩` for single-character atoms.
    pub fn subword(s: &str) -> Self {
        OpenExpr::WordOpen(s.chars().map(|c| OpenExpr::up_atom(&c.to_string())).collect())
    }

    pub fn union(xs: Vec<OpenExpr>) -> Self {
        OpenExpr::Union(xs).normalize()
    }

    pub fn concat_up(l: OpenExpr, r: OpenExpr) -> Self {
        OpenExpr::ConcatUp(bx(l), bx(r))
    }

    pub fn triangle(beta: Ordinal, u: OpenExpr) -> Self {
        OpenExpr::Triangle(beta, bx(u))
    }

    pub fn rtimes(f: ClosedExpr, u: OpenExpr) -> Self {
        OpenExpr::RTimes(bx(f), bx(u))
    }

    pub fn letter_concat(u: OpenExpr, v: OpenExpr) -> Self {
        OpenExpr::LetterConcat(bx(u), bx(v))
    }

    pub fn tree_open(root: OpenExpr, children: OpenExpr) -> Self {
        OpenExpr::TreeOpen(bx(root), bx(children))
    }

    /// Syntactic upward closure: everything except plain concatenations and
    /// carrier restrictions (and expressions containing them).
    pub fn is_up_closed(&self) -> bool {
        match self {
            OpenExpr::LetterConcat(..) | OpenExpr::Within(..) => false,
            OpenExpr::Union(xs) | OpenExpr::Intersect(xs) | OpenExpr::WordOpen(xs) => {
                xs.iter().all(OpenExpr::is_up_closed)
            }
            OpenExpr::Rect(l, r) | OpenExpr::SumOpen(l, r) => l.is_up_closed() && r.is_up_closed(),
            _ => true,
        }
    }

    pub fn normalize(self) -> OpenExpr {
        use OpenExpr::*;
        match self {
            Union(xs) => {
                let mut flat = Vec::new();
                for x in xs {
                    match x.normalize() {
                        Empty => {}
                        Whole => return Whole,
                        Union(ys) => flat.extend(ys),
                        y => flat.push(y),
                    }
                }
                flat.sort();
                flat.dedup();
                match flat.len() {
                    0 => Empty,
                    1 => flat.pop().expect("one"),
                    _ => Union(flat),
                }
            }
            Intersect(xs) => {
                let mut flat = Vec::new();
                for x in xs {
                    match x.normalize() {
                        Whole => {}
                        Empty => return Empty,
                        Intersect(ys) => flat.extend(ys),
                        y => flat.push(y),
                    }
                }
                flat.sort();
                flat.dedup();
                match flat.len() {
                    0 => Whole,
                    1 => flat.pop().expect("one"),
                    _ => Intersect(flat),
                }
            }
            UpClosure(mut pts) => {
                pts.sort();
                pts.dedup();
                if pts.is_empty() {
                    Empty
                } else {
                    UpClosure(pts)
                }
            }
            Rect(l, r) => match (l.normalize(), r.normalize()) {
                (Empty, _) | (_, Empty) => Empty,
                (Whole, Whole) => Whole,
                (l, r) => Rect(bx(l), bx(r)),
            },
            SumOpen(l, r) => match (l.normalize(), r.normalize()) {
                (Empty, Empty) => Empty,
                (Whole, Whole) => Whole,
                (l, r) => SumOpen(bx(l), bx(r)),
            },
            WordOpen(parts) => {
                let parts: Vec<OpenExpr> = parts.into_iter().map(OpenExpr::normalize).collect();
                if parts.contains(&Empty) {
                    Empty
                } else if parts.is_empty() {
                    Whole
                } else {
                    WordOpen(parts)
                }
            }
            ConcatUp(l, r) => match (l.normalize(), r.normalize()) {
                (Empty, _) | (_, Empty) => Empty,
                (Whole, r) if r.is_up_closed() => r,
                (l, Whole) if l.is_up_closed() => l,
                (WordOpen(mut p), WordOpen(q)) => {
                    p.extend(q);
                    WordOpen(p)
                }
                (l, r) => ConcatUp(bx(l), bx(r)),
            },
            TreeOpen(u, v) => match (u.normalize(), v.normalize()) {
                (Empty, _) | (_, Empty) => Empty,
                (u, v) => TreeOpen(bx(u), bx(v)),
            },
            Triangle(beta, u) => {
                if beta.is_zero() {
                    return Whole;
                }
                match u.normalize() {
                    Empty => Empty,
                    Whole => Whole,
                    u => Triangle(beta, bx(u)),
                }
            }
            RTimes(f, u) => match (f.normalize(), u.normalize()) {
                (_, Empty) | (ClosedExpr::WholeC, _) => Empty,
                (f, u) => RTimes(bx(f), bx(u)),
            },
            LetterConcat(u, v) => match (u.normalize(), v.normalize()) {
                (Empty, _) | (_, Empty) => Empty,
                (u, v) => LetterConcat(bx(u), bx(v)),
            },
            Within(u, h) => match (u.normalize(), h.normalize()) {
                (Empty, _) | (_, ClosedExpr::EmptyC) => Empty,
                (u, ClosedExpr::WholeC) => u,
                (u, h) => Within(bx(u), bx(h)),
            },
            DivUp(l) => match l.normalize() {
                Empty => Empty,
                l => DivUp(bx(l)),
            },
            e @ (Empty | Whole | BaseOpen(_)) => e,
        }
    }
}

impl ClosedExpr {
    pub fn down(points: Vec<PointTerm>) -> Self {
        ClosedExpr::DownClosure(points)
    }

    pub fn down_atom(a: &str) -> Self {
        ClosedExpr::DownClosure(vec![PointTerm::atom(a)])
    }

    pub fn complement_of(u: OpenExpr) -> Self {
        ClosedExpr::ComplementOf(bx(u))
    }

    pub fn normalize(self) -> ClosedExpr {
        use ClosedExpr::*;
        match self {
            UnionC(xs) => {
                let mut flat = Vec::new();
                for x in xs {
                    match x.normalize() {
                        EmptyC => {}
                        WholeC => return WholeC,
                        UnionC(ys) => flat.extend(ys),
                        y => flat.push(y),
                    }
                }
                flat.sort();
                flat.dedup();
                match flat.len() {
                    0 => EmptyC,
                    1 => flat.pop().expect("one"),
                    _ => UnionC(flat),
                }
            }
            IntersectC(xs) => {
                let mut flat = Vec::new();
                for x in xs {
                    match x.normalize() {
                        WholeC => {}
                        EmptyC => return EmptyC,
                        IntersectC(ys) => flat.extend(ys),
                        y => flat.push(y),
                    }
                }
                flat.sort();
                flat.dedup();
                match flat.len() {
                    0 => WholeC,
                    1 => flat.pop().expect("one"),
                    _ => IntersectC(flat),
                }
            }
            DownClosure(mut pts) => {
                pts.sort();
                pts.dedup();
                if pts.is_empty() {
                    EmptyC
                } else {
                    DownClosure(pts)
                }
            }
            ComplementOf(u) => match u.normalize() {
                OpenExpr::Empty => WholeC,
                OpenExpr::Whole => EmptyC,
                u => ComplementOf(bx(u)),
            },
            OrdProduct(atoms) => {
                let mut out = Vec::new();
                for a in atoms {
                    let (f, beta) = match a {
                        ProductAtom::AtMostOne(f) => (f.normalize(), None),
                        ProductAtom::Power(f, b) => (f.normalize(), Some(b)),
                    };
                    if beta.as_ref().is_some_and(Ordinal::is_zero) {
                        return EmptyC;
                    }
                    if f == EmptyC {
                        continue;
                    }
                    match beta {
                        None => out.push(ProductAtom::AtMostOne(f)),
                        Some(b) if b == Ordinal::one() => {}
                        Some(b) => out.push(ProductAtom::Power(f, b)),
                    }
                }
                OrdProduct(out)
            }
            e @ (EmptyC | WholeC) => e,
        }
    }
}

/// Either kind of set expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetExpr {
    Open(OpenExpr),
    Closed(ClosedExpr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

/// An inclusion verdict; `bound` is set when it was decided by comparing
/// extents on a bounded universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inclusion {
    pub verdict: Verdict,
    pub bound: Option<usize>,
    pub witness: Option<PointTerm>,
}

impl Inclusion {
    fn exact(v: Verdict) -> Self {
        Inclusion { verdict: v, bound: None, witness: None }
    }

    pub fn is_true(&self) -> bool {
        self.verdict == Verdict::True
    }
}

fn shape_error(what: &str, space: &SpaceExpr) -> Error {
    Error::Type(format!("{what} does not apply to {}", crate::syntax::space_to_sexp(space)))
}

fn open_kind(u: &OpenExpr) -> &'static str {
    match u {
        OpenExpr::Empty => "empty",
        OpenExpr::Whole => "whole",
        OpenExpr::Union(_) => "union",
        OpenExpr::Intersect(_) => "inter",
        OpenExpr::UpClosure(_) => "up",
        OpenExpr::BaseOpen(_) => "base",
        OpenExpr::Rect(..) => "rect",
        OpenExpr::SumOpen(..) => "sumopen",
        OpenExpr::WordOpen(_) => "wordopen",
        OpenExpr::ConcatUp(..) => "concatup",
        OpenExpr::TreeOpen(..) => "treeopen",
        OpenExpr::Triangle(..) => "tri",
        OpenExpr::RTimes(..) => "rtimes",
        OpenExpr::LetterConcat(..) => "lconcat",
        OpenExpr::Within(..) => "within",
        OpenExpr::DivUp(_) => "divup",
    }
}

fn check_point(space: &SpaceExpr, p: &PointTerm) -> Result<()> {
    if space::typecheck(space, p) {
        Ok(())
    } else {
        Err(Error::Type(format!(
            "point {} does not belong to {}",
            crate::syntax::point_to_sexp(p),
            crate::syntax::space_to_sexp(space)
        )))
    }
}

/// Exact membership of a point in an open set.
pub fn member_open(space: &SpaceExpr, p: &PointTerm, u: &OpenExpr) -> Result<bool> {
    check_point(space, p)?;
    mem_open(space, p, u)
}

/// Exact membership of a point in a closed set.
pub fn member_closed(space: &SpaceExpr, p: &PointTerm, c: &ClosedExpr) -> Result<bool> {
    check_point(space, p)?;
    mem_closed(space, p, c)
}

pub(crate) fn mem_open(space: &SpaceExpr, p: &PointTerm, u: &OpenExpr) -> Result<bool> {
    use OpenExpr::*;
    match u {
        Empty => return Ok(false),
        Whole => return Ok(true),
        Union(xs) => {
            for x in xs {
                if mem_open(space, p, x)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        Intersect(xs) => {
            for x in xs {
                if !mem_open(space, p, x)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        UpClosure(pts) => return Ok(pts.iter().any(|q| space::leq(space, q, p))),
        Within(v, h) => return Ok(mem_open(space, p, v)? && mem_closed(space, p, h)?),
        _ => {}
    }
    match (space, p) {
        (SpaceExpr::Words(base), PointTerm::Word(w)) => mem_word(base, w, u),
        (SpaceExpr::OrdWords(base, _), PointTerm::OrdWord(segs)) => mem_ow(base, segs, u),
        (SpaceExpr::Fin(qo), PointTerm::Atom(a)) => match u {
            BaseOpen(b) => qo.leq(b, a).ok_or_else(|| Error::Type(format!("unknown atom {b}"))),
            _ => Err(shape_error(open_kind(u), space)),
        },
        (SpaceExpr::Product(l, r), PointTerm::Pair(x, y)) => match u {
            Rect(ul, ur) => Ok(mem_open(l, x, ul)? && mem_open(r, y, ur)?),
            _ => Err(shape_error(open_kind(u), space)),
        },
        (SpaceExpr::Sum(l, r), PointTerm::InL(x) | PointTerm::InR(x)) => match u {
            SumOpen(ul, ur) => {
                if matches!(p, PointTerm::InL(_)) {
                    mem_open(l, x, ul)
                } else {
                    mem_open(r, x, ur)
                }
            }
            _ => Err(shape_error(open_kind(u), space)),
        },
        (SpaceExpr::Trees(_) | SpaceExpr::OrdTrees(..), PointTerm::Node(..)) => match u {
            TreeOpen(root, kids) => tree_open_member(space, p, root, kids),
            _ => Err(shape_error(open_kind(u), space)),
        },
        (SpaceExpr::Mu(f), _) => match u {
            DivUp(l) => {
                let shape = inductive::shape_space(f, f);
                for sub in inductive::substructures(f, p) {
                    if mem_open(&shape, sub, l)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Err(shape_error(open_kind(u), space)),
        },
        _ => Err(shape_error(open_kind(u), space)),
    }
}

fn tree_open_member(space: &SpaceExpr, t: &PointTerm, root: &OpenExpr, kids: &OpenExpr) -> Result<bool> {
    let (base, word_space) = match space {
        SpaceExpr::Trees(b) => (&**b, SpaceExpr::words(space.clone())),
        SpaceExpr::OrdTrees(b, alpha) => (&**b, SpaceExpr::ord_words(space.clone(), alpha.clone())),
        _ => return Err(shape_error("treeopen", space)),
    };
    for s in space::subtrees(t) {
        if let PointTerm::Node(label, cs) = s {
            let children = match space {
                SpaceExpr::Trees(_) => PointTerm::Word(cs.clone()),
                _ => cs.first().cloned().unwrap_or(PointTerm::OrdWord(Vec::new())),
            };
            if mem_open(base, label, root)? && mem_open(&word_space, &children, kids)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn word_point_leq(base: &SpaceExpr, q: &PointTerm, w: &[PointTerm]) -> bool {
    let letters = match q {
        PointTerm::Word(x) => x.clone(),
        PointTerm::OrdWord(segs) => match ow::to_letters(segs) {
            Some(x) => x,
            None => return false,
        },
        _ => return false,
    };
    space::higman(&letters, w, &mut |a, b| space::leq(base, a, b))
}

fn subsequences(w: &[PointTerm]) -> Vec<Vec<PointTerm>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << w.len()) {
        let s: Vec<PointTerm> = w.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// Membership in the upward closure of `u`.
fn down_mem_word(base: &SpaceExpr, w: &[PointTerm], u: &OpenExpr) -> Result<bool> {
    if u.is_up_closed() {
        return mem_word(base, w, u);
    }
    for s in subsequences(w) {
        if mem_word(base, &s, u)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn mem_word(base: &SpaceExpr, w: &[PointTerm], u: &OpenExpr) -> Result<bool> {
    use OpenExpr::*;
    Ok(match u {
        Empty => false,
        Whole => true,
        Union(xs) => {
            for x in xs {
                if mem_word(base, w, x)? {
                    return Ok(true);
                }
            }
            false
        }
        Intersect(xs) => {
            for x in xs {
                if !mem_word(base, w, x)? {
                    return Ok(false);
                }
            }
            true
        }
        UpClosure(pts) => pts.iter().any(|q| word_point_leq(base, q, w)),
        WordOpen(parts) => {
            let mut i = 0;
            for a in w {
                if i == parts.len() {
                    break;
                }
                if mem_open(base, a, &parts[i])? {
                    i += 1;
                }
            }
            i == parts.len()
        }
        ConcatUp(l, r) => {
            if l.is_up_closed() && r.is_up_closed() {
                let mut split = None;
                for k in 0..=w.len() {
                    if mem_word(base, &w[..k], l)? {
                        split = Some(k);
                        break;
                    }
                }
                match split {
                    Some(k) => mem_word(base, &w[k..], r)?,
                    None => false,
                }
            } else {
                for k in 0..=w.len() {
                    if down_mem_word(base, &w[..k], l)? && down_mem_word(base, &w[k..], r)? {
                        return Ok(true);
                    }
                }
                false
            }
        }
        Triangle(beta, v) => {
            if beta.is_zero() {
                return Ok(true);
            }
            let n = w.len();
            if v.is_up_closed() {
                let start = match beta.to_u64() {
                    Some(b) if b as usize <= n => b as usize,
                    _ => n,
                };
                mem_word(base, &w[start..], v)?
            } else {
                let last = beta.to_u64().map_or(n, |b| (b as usize - 1).min(n));
                for gamma in 0..=last.min(n.saturating_sub(1)) {
                    if !down_mem_word(base, &w[(gamma + 1).min(n)..], v)? {
                        return Ok(false);
                    }
                }
                true
            }
        }
        RTimes(f, v) => {
            if v.is_up_closed() {
                let mut k = None;
                for (i, a) in w.iter().enumerate() {
                    if !mem_closed(base, a, f)? {
                        k = Some(i);
                        break;
                    }
                }
                match k {
                    Some(k) => mem_word(base, &w[k..], v)?,
                    None => false,
                }
            } else {
                for s in subsequences(w) {
                    if let Some(a) = s.first() {
                        if !mem_closed(base, a, f)? && mem_word(base, &s, v)? {
                            return Ok(true);
                        }
                    }
                }
                false
            }
        }
        LetterConcat(a, v) => match w.split_first() {
            Some((x, rest)) => mem_open(base, x, a)? && mem_word(base, rest, v)?,
            None => false,
        },
        Within(v, h) => mem_word(base, w, v)? && mem_closed_word(base, w, h)?,
        BaseOpen(_) | Rect(..) | SumOpen(..) | TreeOpen(..) | DivUp(_) => {
            return Err(shape_error(open_kind(u), &SpaceExpr::words(base.clone())))
        }
    })
}

fn mem_closed_word(base: &SpaceExpr, w: &[PointTerm], c: &ClosedExpr) -> Result<bool> {
    use ClosedExpr::*;
    Ok(match c {
        EmptyC => false,
        WholeC => true,
        UnionC(xs) => {
            for x in xs {
                if mem_closed_word(base, w, x)? {
                    return Ok(true);
                }
            }
            false
        }
        IntersectC(xs) => {
            for x in xs {
                if !mem_closed_word(base, w, x)? {
                    return Ok(false);
                }
            }
            true
        }
        DownClosure(pts) => pts.iter().any(|q| {
            let q_letters = match q {
                PointTerm::Word(x) => Some(x.clone()),
                PointTerm::OrdWord(segs) => ow::to_letters(segs),
                _ => None,
            };
            match q_letters {
                Some(x) => space::higman(w, &x, &mut |a, b| space::leq(base, a, b)),
                None => matches!(q, PointTerm::OrdWord(segs)
                    if ow::embed_end(&ow::from_letters(w), segs, &mut |a, b| space::leq(base, a, b)).is_some()),
            }
        }),
        ComplementOf(u) => !mem_word(base, w, u)?,
        OrdProduct(atoms) => {
            let mut pos = 0;
            for atom in atoms {
                let limit = atom.exponent().to_u64().map_or(usize::MAX, |b| b as usize - 1);
                let mut taken = 0;
                while pos < w.len() && taken < limit && mem_closed(base, &w[pos], atom.letters())? {
                    pos += 1;
                    taken += 1;
                }
            }
            pos == w.len()
        }
    })
}

fn mem_ow(base: &SpaceExpr, segs: &ow::Segments, u: &OpenExpr) -> Result<bool> {
    match ow::to_letters(segs) {
        Some(w) => mem_word(base, &w, u),
        None => mem_segments(base, segs, u),
    }
}

fn mem_segments(base: &SpaceExpr, segs: &ow::Segments, u: &OpenExpr) -> Result<bool> {
    use OpenExpr::*;
    match u {
        Union(xs) => {
            for x in xs {
                if mem_ow(base, segs, x)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Intersect(xs) => {
            for x in xs {
                if !mem_ow(base, segs, x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Within(v, h) => Ok(mem_ow(base, segs, v)? && mem_closed_ow(base, segs, h)?),
        LetterConcat(a, v) => match segs.first() {
            Some((x, _)) => Ok(mem_open(base, x, a)? && mem_ow(base, &ow::drop_prefix(segs, &Ordinal::one()), v)?),
            None => Ok(false),
        },
        _ if u.is_up_closed() => Ok(least_prefix(base, segs, u)?.is_some()),
        _ => Err(Error::Unsupported(format!(
            "{} around a non-upward-closed set on an infinite ordinal word",
            open_kind(u)
        ))),
    }
}

/// Length of the shortest prefix of `segs` lying in the upward-closed open
/// `u`, or `None` when `segs ∉ u`.
pub fn least_prefix(base: &SpaceExpr, segs: &ow::Segments, u: &OpenExpr) -> Result<Option<Ordinal>> {
    use OpenExpr::*;
    Ok(match u {
        Empty => None,
        Whole => Some(Ordinal::zero()),
        Union(xs) => {
            let mut best: Option<Ordinal> = None;
            for x in xs {
                if let Some(g) = least_prefix(base, segs, x)? {
                    if best.as_ref().is_none_or(|b| g < *b) {
                        best = Some(g);
                    }
                }
            }
            best
        }
        Intersect(xs) => {
            let mut worst = Ordinal::zero();
            for x in xs {
                match least_prefix(base, segs, x)? {
                    Some(g) => worst = worst.max(g),
                    None => return Ok(None),
                }
            }
            Some(worst)
        }
        UpClosure(pts) => {
            let mut best: Option<Ordinal> = None;
            for q in pts {
                let q_segs = match q {
                    PointTerm::Word(x) => ow::from_letters(x),
                    PointTerm::OrdWord(s) => s.clone(),
                    _ => continue,
                };
                if let Some(g) = ow::embed_end(&q_segs, segs, &mut |a, b| space::leq(base, a, b)) {
                    if best.as_ref().is_none_or(|b| g < *b) {
                        best = Some(g);
                    }
                }
            }
            best
        }
        WordOpen(parts) => {
            if parts.is_empty() {
                return Ok(Some(Ordinal::zero()));
            }
            let mut i = 0;
            let mut consumed = Ordinal::zero();
            for (a, c) in segs {
                let cap = c.to_u64();
                let mut used = 0u64;
                while i < parts.len() && cap.is_none_or(|k| used < k) && mem_open(base, a, &parts[i])? {
                    i += 1;
                    used += 1;
                }
                if i == parts.len() {
                    return Ok(Some(consumed.add(&Ordinal::from(used))));
                }
                consumed = consumed.add(c);
            }
            None
        }
        ConcatUp(l, r) => {
            let Some(g1) = least_prefix(base, segs, l)? else {
                return Ok(None);
            };
            let rest = ow::drop_prefix(segs, &g1);
            least_prefix(base, &rest, r)?.map(|g2| g1.add(&g2))
        }
        Triangle(beta, v) => {
            if beta.is_zero() || least_prefix(base, &[], v)?.is_some() {
                return Ok(Some(Ordinal::zero()));
            }
            if ow::length(segs) < *beta {
                return Ok(None);
            }
            match beta.classify() {
                Classification::Successor(_) => {
                    let rest = ow::drop_prefix(segs, beta);
                    least_prefix(base, &rest, v)?.map(|d| beta.add(&d))
                }
                _ => {
                    let head = ow::take_prefix(segs, beta);
                    let (x, _) = head.last().expect("non-empty prefix");
                    let tail_len = beta.last_power().expect("positive");
                    let probe = ow::concat(&[(x.clone(), tail_len.clone())], &ow::drop_prefix(segs, beta));
                    least_prefix(base, &probe, v)?.map(|d| match d.left_sub(&tail_len) {
                        Some(extra) if d > tail_len => beta.add(&extra),
                        _ => beta.clone(),
                    })
                }
            }
        }
        RTimes(f, v) => {
            let mut k = Ordinal::zero();
            let mut found = false;
            for (a, c) in segs {
                if !mem_closed(base, a, f)? {
                    found = true;
                    break;
                }
                k = k.add(c);
            }
            if !found {
                return Ok(None);
            }
            let rest = ow::drop_prefix(segs, &k);
            least_prefix(base, &rest, v)?.map(|d| k.add(&d.max(Ordinal::one())))
        }
        _ => {
            return Err(Error::Unsupported(format!("least prefix of {} on ordinal words", open_kind(u))));
        }
    })
}

fn mem_closed_ow(base: &SpaceExpr, segs: &ow::Segments, c: &ClosedExpr) -> Result<bool> {
    if let Some(w) = ow::to_letters(segs) {
        return mem_closed_word(base, &w, c);
    }
    mem_closed_segments(base, segs, c)
}

fn mem_closed_segments(base: &SpaceExpr, segs: &ow::Segments, c: &ClosedExpr) -> Result<bool> {
    use ClosedExpr::*;
    Ok(match c {
        EmptyC => false,
        WholeC => true,
        UnionC(xs) => {
            for x in xs {
                if mem_closed_ow(base, segs, x)? {
                    return Ok(true);
                }
            }
            false
        }
        IntersectC(xs) => {
            for x in xs {
                if !mem_closed_ow(base, segs, x)? {
                    return Ok(false);
                }
            }
            true
        }
        DownClosure(pts) => pts.iter().any(|q| {
            let q_segs = match q {
                PointTerm::Word(x) => ow::from_letters(x),
                PointTerm::OrdWord(s) => s.clone(),
                _ => return false,
            };
            ow::embed_end(segs, &q_segs, &mut |a, b| space::leq(base, a, b)).is_some()
        }),
        ComplementOf(u) => !mem_ow(base, segs, u)?,
        OrdProduct(atoms) => {
            let mut seg = 0usize;
            let mut off = Ordinal::zero();
            for atom in atoms {
                let beta = atom.exponent();
                let mut taken = Ordinal::zero();
                while seg < segs.len() {
                    let (b, count) = &segs[seg];
                    if !mem_closed(base, b, atom.letters())? {
                        break;
                    }
                    let avail = count.left_sub(&off).expect("offset inside segment");
                    let total = taken.add(&avail);
                    if total < beta {
                        taken = total;
                        seg += 1;
                        off = Ordinal::zero();
                        continue;
                    }
                    let m = match beta.classify() {
                        Classification::Successor(mu) => mu.left_sub(&taken).expect("taken below beta"),
                        _ => {
                            // Any amount short of `-taken + β` fits; leave exactly its last power.
                            let rest = beta.left_sub(&taken).expect("taken below beta");
                            let p = rest.last_power().expect("positive");
                            let terms: Vec<_> = rest.terms().to_vec();
                            let mut keep: Vec<(Ordinal, num_bigint::BigUint)> =
                                terms.iter().map(|t| (t.exponent.clone(), t.coefficient.clone())).collect();
                            let last = keep.last_mut().expect("positive");
                            last.1 -= 1u32;
                            if last.1 == num_bigint::BigUint::from(0u32) {
                                keep.pop();
                            }
                            let m = Ordinal::from_terms(keep).expect("normal form");
                            debug_assert_eq!(m.add(&p), rest);
                            m
                        }
                    };
                    off = off.add(&m);
                    if off == *count {
                        seg += 1;
                        off = Ordinal::zero();
                    }
                    break;
                }
            }
            seg == segs.len()
        }
    })
}

pub(crate) fn mem_closed(space: &SpaceExpr, p: &PointTerm, c: &ClosedExpr) -> Result<bool> {
    use ClosedExpr::*;
    match c {
        EmptyC => return Ok(false),
        WholeC => return Ok(true),
        UnionC(xs) => {
            for x in xs {
                if mem_closed(space, p, x)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        IntersectC(xs) => {
            for x in xs {
                if !mem_closed(space, p, x)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        DownClosure(pts) => return Ok(pts.iter().any(|q| space::leq(space, p, q))),
        ComplementOf(u) => return Ok(!mem_open(space, p, u)?),
        OrdProduct(_) => {}
    }
    match (space, p) {
        (SpaceExpr::Words(base), PointTerm::Word(w)) => mem_closed_word(base, w, c),
        (SpaceExpr::OrdWords(base, _), PointTerm::OrdWord(segs)) => mem_closed_ow(base, segs, c),
        _ => Err(shape_error("ordprod", space)),
    }
}

/// Points of the bounded universe that lie in the set, in enumeration order.
pub fn extent(space: &SpaceExpr, s: &SetExpr, bound: usize) -> Result<Vec<PointTerm>> {
    let u = Universe::new(space, bound)?;
    let bits = match s {
        SetExpr::Open(o) => u.open_bits(o)?,
        SetExpr::Closed(c) => u.closed_bits(c)?,
    };
    Ok(u.points_of(&bits))
}

pub fn extent_open(space: &SpaceExpr, o: &OpenExpr, bound: usize) -> Result<Vec<PointTerm>> {
    extent(space, &SetExpr::Open(o.clone()), bound)
}

pub fn extent_closed(space: &SpaceExpr, c: &ClosedExpr, bound: usize) -> Result<Vec<PointTerm>> {
    extent(space, &SetExpr::Closed(c.clone()), bound)
}

/// Inclusion `a ⊆ b`: decided symbolically on the complete fragment, else by
/// comparing extents at `bound` (recorded in the verdict).
pub fn includes(space: &SpaceExpr, a: &OpenExpr, b: &OpenExpr, bound: usize) -> Result<Inclusion> {
    let v = includes_symbolic(space, a, b)?;
    if v != Verdict::Unknown {
        return Ok(Inclusion::exact(v));
    }
    let u = match Universe::new(space, bound) {
        Ok(u) => u,
        Err(Error::NotEnumerable(_)) => return Ok(Inclusion::exact(Verdict::Unknown)),
        Err(e) => return Err(e),
    };
    let (ea, eb) = (u.open_bits(a)?, u.open_bits(b)?);
    let witness = ea.difference(&eb).next().map(|i| u.points[i].clone());
    Ok(Inclusion {
        verdict: if witness.is_none() { Verdict::True } else { Verdict::False },
        bound: Some(bound),
        witness,
    })
}

fn all_any(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::True;
    for v in vs {
        match v {
            Verdict::False => return Verdict::False,
            Verdict::Unknown => out = Verdict::Unknown,
            Verdict::True => {}
        }
    }
    out
}

fn cylinder_parts(u: &OpenExpr) -> Option<Vec<&OpenExpr>> {
    match u {
        OpenExpr::Whole => Some(Vec::new()),
        OpenExpr::LetterConcat(x, rest) => {
            let mut out = vec![&**x];
            out.extend(cylinder_parts(rest)?);
            Some(out)
        }
        _ => None,
    }
}

fn union_members(u: &OpenExpr) -> Vec<&OpenExpr> {
    match u {
        OpenExpr::Union(xs) => xs.iter().collect(),
        OpenExpr::Empty => Vec::new(),
        _ => vec![u],
    }
}

/// Prefix cylinders `U1⋯UnΣ*` over a finite alphabet: every letter tuple of
/// the left cylinder must extend some right cylinder.
fn cylinder_inclusion(base: &SpaceExpr, a: &[&OpenExpr], bs: &[Vec<&OpenExpr>]) -> Result<Verdict> {
    let SpaceExpr::Fin(qo) = base else {
        return Ok(Verdict::Unknown);
    };
    let letters = |u: &OpenExpr| -> Result<Vec<PointTerm>> {
        let mut out = Vec::new();
        for x in qo.atoms() {
            let p = PointTerm::Atom(x.clone());
            if mem_open(base, &p, u)? {
                out.push(p);
            }
        }
        Ok(out)
    };
    let left: Vec<Vec<PointTerm>> = a.iter().map(|u| letters(u)).collect::<Result<_>>()?;
    let right: Vec<Vec<Vec<PointTerm>>> =
        bs.iter().map(|c| c.iter().map(|u| letters(u)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let total: usize = left.iter().map(Vec::len).product();
    if total > 1 << 16 {
        return Ok(Verdict::Unknown);
    }
    let mut tuple = vec![0usize; left.len()];
    for _ in 0..total {
        let covered = right.iter().any(|c| {
            c.len() <= left.len() && c.iter().enumerate().all(|(i, set)| set.contains(&left[i][tuple[i]]))
        });
        if !covered {
            return Ok(Verdict::False);
        }
        for i in (0..tuple.len()).rev() {
            tuple[i] += 1;
            if tuple[i] < left[i].len() {
                break;
            }
            tuple[i] = 0;
        }
    }
    Ok(Verdict::True)
}

/// Symbolic inclusion; `Unknown` outside the decidable fragment.
pub fn includes_symbolic(space: &SpaceExpr, a: &OpenExpr, b: &OpenExpr) -> Result<Verdict> {
    use OpenExpr::*;
    if a == b || *a == Empty || *b == Whole {
        return Ok(Verdict::True);
    }
    if let SpaceExpr::Fin(qo) = space {
        for x in qo.atoms() {
            let p = PointTerm::Atom(x.clone());
            if mem_open(space, &p, a)? && !mem_open(space, &p, b)? {
                return Ok(Verdict::False);
            }
        }
        return Ok(Verdict::True);
    }
    if let Union(xs) = a {
        let mut vs = Vec::new();
        for x in xs {
            vs.push(includes_symbolic(space, x, b)?);
        }
        return Ok(all_any(vs));
    }
    if let UpClosure(pts) = a {
        if b.is_up_closed() {
            for p in pts {
                if !mem_open(space, p, b)? {
                    return Ok(Verdict::False);
                }
            }
            return Ok(Verdict::True);
        }
    }
    if let Some(base) = space.letters() {
        if let (WordOpen(us), WordOpen(vs)) = (a, b) {
            let mut i = 0;
            let mut unknown = false;
            let mut matched = true;
            for v in vs {
                let mut hit = false;
                while i < us.len() {
                    let r = includes_symbolic(base, &us[i], v)?;
                    i += 1;
                    match r {
                        Verdict::True => {
                            hit = true;
                            break;
                        }
                        Verdict::Unknown => unknown = true,
                        Verdict::False => {}
                    }
                }
                if !hit {
                    matched = false;
                    break;
                }
            }
            if matched {
                return Ok(Verdict::True);
            }
            if !unknown && matches!(base, SpaceExpr::Fin(_)) {
                return Ok(Verdict::False);
            }
        }
        if let Some(left) = cylinder_parts(a) {
            let rights: Option<Vec<Vec<&OpenExpr>>> = union_members(b).into_iter().map(cylinder_parts).collect();
            if let Some(rights) = rights {
                let v = cylinder_inclusion(base, &left, &rights)?;
                if v != Verdict::Unknown {
                    return Ok(v);
                }
            }
        }
    }
    match b {
        Union(ys) => {
            for y in ys {
                if includes_symbolic(space, a, y)? == Verdict::True {
                    return Ok(Verdict::True);
                }
            }
        }
        Intersect(ys) => {
            let mut vs = Vec::new();
            for y in ys {
                vs.push(includes_symbolic(space, a, y)?);
            }
            if all_any(vs.iter().copied()) == Verdict::True {
                return Ok(Verdict::True);
            }
        }
        _ => {}
    }
    if let Intersect(xs) = a {
        for x in xs {
            if includes_symbolic(space, x, b)? == Verdict::True {
                return Ok(Verdict::True);
            }
        }
    }
    Ok(Verdict::Unknown)
}

fn is_bottom(space: &SpaceExpr, p: &PointTerm) -> bool {
    match (space, p) {
        (SpaceExpr::Words(_), PointTerm::Word(w)) => w.is_empty(),
        (SpaceExpr::OrdWords(..), PointTerm::OrdWord(s)) => s.is_empty(),
        (SpaceExpr::Nat, PointTerm::Nat(n)) => *n == 0,
        (SpaceExpr::Fin(qo), PointTerm::Atom(a)) => qo.atoms().iter().all(|b| qo.leq(a, b) == Some(true)),
        (SpaceExpr::Product(l, r), PointTerm::Pair(x, y)) => is_bottom(l, x) && is_bottom(r, y),
        _ => false,
    }
}

/// `↑points`, minimized to an antichain; `Whole` when a point is the least element.
pub fn up_closure(space: &SpaceExpr, points: &[PointTerm]) -> Result<OpenExpr> {
    for p in points {
        check_point(space, p)?;
    }
    if points.iter().any(|p| is_bottom(space, p)) {
        return Ok(OpenExpr::Whole);
    }
    let mut keep: Vec<PointTerm> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let dominated = points.iter().enumerate().any(|(j, q)| {
            j != i && space::leq(space, q, p) && (!space::leq(space, p, q) || j < i)
        });
        if !dominated {
            keep.push(p.clone());
        }
    }
    Ok(OpenExpr::UpClosure(keep).normalize())
}

/// Closure of a single point: a product of `(↓a)^{≤1}` atoms for finite words,
/// the down-set of the point otherwise.
pub fn closure_point(space: &SpaceExpr, p: &PointTerm) -> Result<ClosedExpr> {
    check_point(space, p)?;
    let letters = match p {
        PointTerm::Word(w) => Some(w.clone()),
        PointTerm::OrdWord(segs) => Some(
            ow::to_letters(segs)
                .ok_or_else(|| Error::Unsupported("closure of an infinite ordinal word".into()))?,
        ),
        _ => None,
    };
    Ok(match letters {
        Some(w) => ClosedExpr::OrdProduct(
            w.into_iter().map(|a| ProductAtom::AtMostOne(ClosedExpr::DownClosure(vec![a]))).collect(),
        ),
        None => ClosedExpr::DownClosure(vec![p.clone()]),
    })
}

/// A finitely generated topology, optionally restricted to a closed carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyDesc {
    pub space: SpaceExpr,
    pub subbasis: Vec<OpenExpr>,
    pub carrier: Option<ClosedExpr>,
}

impl TopologyDesc {
    pub fn new(space: SpaceExpr, subbasis: Vec<OpenExpr>) -> Self {
        TopologyDesc { space, subbasis, carrier: None }
    }

    /// `{∅, X}`.
    pub fn trivial(space: SpaceExpr) -> Self {
        TopologyDesc::new(space, vec![OpenExpr::Empty, OpenExpr::Whole])
    }

    /// The Alexandroff topology of the point order, generated by `↑x` for
    /// every point of size at most `bound`.
    pub fn alexandroff(space: SpaceExpr, bound: usize) -> Result<Self> {
        let subbasis = base_subbasis(&space, bound)?;
        Ok(TopologyDesc::new(space, subbasis))
    }

    /// Subbasis extents at `bound`, always including the whole universe.
    pub fn extents(&self, u: &Universe) -> Result<Vec<FixedBitSet>> {
        let mut out = vec![u.full()];
        for s in &self.subbasis {
            out.push(u.open_bits(s)?);
        }
        Ok(out)
    }
}

/// `↑x` for every point of size at most `bound`.
pub fn base_subbasis(space: &SpaceExpr, bound: usize) -> Result<Vec<OpenExpr>> {
    Ok(space::enumerate_points(space, bound)?.into_iter().map(|p| OpenExpr::UpClosure(vec![p])).collect())
}

/// Whether `h` is closed in the topology generated by `t` on the bounded universe.
pub fn is_closed_in(t: &TopologyDesc, h: &ClosedExpr, bound: usize) -> Result<bool> {
    let u = Universe::new(&t.space, bound)?;
    let spec = u.specialization(&t.extents(&u)?);
    let mut outside = u.closed_bits(h)?;
    outside.toggle_range(..);
    Ok(outside.ones().all(|x| spec[x].is_subset(&outside)))
}

/// `τ|H`: the topology generated by `U ∩ H`, with `H` kept as the carrier.
pub fn restrict(t: &TopologyDesc, h: &ClosedExpr, bound: usize) -> Result<TopologyDesc> {
    let h = h.clone().normalize();
    if h == ClosedExpr::WholeC {
        return Ok(t.clone());
    }
    if !is_closed_in(t, &h, bound)? {
        return Err(Error::NotClosed(crate::syntax::closed_to_sexp(&h).to_string()));
    }
    let carrier = match &t.carrier {
        Some(c) => ClosedExpr::IntersectC(vec![c.clone(), h.clone()]).normalize(),
        None => h.clone(),
    };
    let subbasis = t
        .subbasis
        .iter()
        .map(|s| OpenExpr::Within(bx(s.clone()), bx(h.clone())).normalize())
        .collect();
    Ok(TopologyDesc { space: t.space.clone(), subbasis, carrier: Some(carrier) })
}

/// Specialisation preorder of the generated topology: every subbasic open
/// containing `x` contains `y`.
pub fn spec_leq(t: &TopologyDesc, x: &PointTerm, y: &PointTerm) -> Result<bool> {
    check_point(&t.space, x)?;
    check_point(&t.space, y)?;
    for s in &t.subbasis {
        if mem_open(&t.space, x, s)? && !mem_open(&t.space, y, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Specialisation preorder of `τ|H`, computed from the opens `U ∩ H` and `X`.
pub fn spec_leq_restricted(t: &TopologyDesc, h: &ClosedExpr, x: &PointTerm, y: &PointTerm) -> Result<bool> {
    let mut subbasis: Vec<OpenExpr> = vec![OpenExpr::Within(bx(OpenExpr::Whole), bx(h.clone()))];
    subbasis.extend(t.subbasis.iter().map(|s| OpenExpr::Within(bx(s.clone()), bx(h.clone()))));
    spec_leq(&TopologyDesc::new(t.space.clone(), subbasis), x, y)
}

/// `x ⪯ y ∈ H` or `x ∉ H`.
pub fn restriction_formula(t: &TopologyDesc, h: &ClosedExpr, x: &PointTerm, y: &PointTerm) -> Result<bool> {
    if !mem_closed(&t.space, x, h)? {
        return Ok(true);
    }
    Ok(spec_leq(t, x, y)? && mem_closed(&t.space, y, h)?)
}

fn word_alpha(space: &SpaceExpr) -> Result<(&SpaceExpr, Ordinal)> {
    match space {
        SpaceExpr::OrdWords(b, alpha) => Ok((b, alpha.clone())),
        SpaceExpr::Words(b) => Ok((b, Ordinal::omega())),
        _ => Err(shape_error("ordinal product", space)),
    }
}

/// `F^c` as an open of a finite base.
pub fn base_complement(base: &SpaceExpr, f: &ClosedExpr) -> Result<OpenExpr> {
    let SpaceExpr::Fin(qo) = base else {
        return Err(Error::Unsupported("letter complements need a finite base".into()));
    };
    let mut out = Vec::new();
    for a in qo.atoms() {
        let p = PointTerm::Atom(a.clone());
        if !mem_closed(base, &p, f)? {
            out.push(p);
        }
    }
    Ok(OpenExpr::UpClosure(out).normalize())
}

/// The complement of an ordinal product, built by induction on its atoms:
/// `(F^{<β} P')^c = (F ⋊ P'^c) ∪ B` where `B` depends on the shape of `β`.
pub fn complement_ordinal_product(space: &SpaceExpr, p: &ClosedExpr) -> Result<OpenExpr> {
    let (_, alpha) = word_alpha(space)?;
    let atoms = match p.clone().normalize() {
        ClosedExpr::OrdProduct(atoms) => atoms,
        ClosedExpr::EmptyC => return Ok(OpenExpr::Whole),
        _ => return Err(Error::Invalid("expected an ordinal product".into())),
    };
    Ok(complement_atoms(&atoms, &alpha))
}

fn complement_atoms(atoms: &[ProductAtom], alpha: &Ordinal) -> OpenExpr {
    let Some((atom, rest)) = atoms.split_first() else {
        return OpenExpr::WordOpen(vec![OpenExpr::Whole]);
    };
    let u = complement_atoms(rest, alpha);
    let beta = atom.exponent();
    let a = OpenExpr::rtimes(atom.letters().clone(), u.clone());
    let b = if beta >= *alpha {
        OpenExpr::Empty
    } else {
        match beta.classify() {
            Classification::Successor(mu) => match mu.classify() {
                Classification::Zero => u,
                Classification::Successor(_) => OpenExpr::triangle(mu, u),
                Classification::Limit => OpenExpr::concat_up(
                    OpenExpr::triangle(mu, OpenExpr::WordOpen(vec![OpenExpr::Whole])),
                    u,
                ),
            },
            _ => OpenExpr::triangle(beta, u),
        }
    };
    OpenExpr::Union(vec![a, b]).normalize()
}

/// Rewrites `F ⋊ U` for `U` of the shapes `⟨W⟩`, `↑(U1 V)` and `↑(β ▷ V)`
/// (unions distribute).
pub fn rtimes_rewrite(space: &SpaceExpr, f: &ClosedExpr, u: &OpenExpr) -> Result<OpenExpr> {
    let (base, _) = word_alpha(space)?;
    let fc = base_complement(base, f)?;
    rewrite_rtimes(&fc, &u.clone().normalize()).map(OpenExpr::normalize)
}

fn rewrite_rtimes(fc: &OpenExpr, u: &OpenExpr) -> Result<OpenExpr> {
    use OpenExpr::*;
    Ok(match u {
        Empty => Empty,
        Whole => WordOpen(vec![fc.clone()]),
        Union(xs) => Union(xs.iter().map(|x| rewrite_rtimes(fc, x)).collect::<Result<_>>()?),
        WordOpen(parts) if parts.len() == 1 => Union(vec![
            WordOpen(vec![Intersect(vec![parts[0].clone(), fc.clone()])]),
            WordOpen(vec![fc.clone(), parts[0].clone()]),
        ]),
        WordOpen(parts) => ConcatUp(
            bx(rewrite_rtimes(fc, &WordOpen(vec![parts[0].clone()]))?),
            bx(WordOpen(parts[1..].to_vec())),
        ),
        ConcatUp(l, r) => ConcatUp(bx(rewrite_rtimes(fc, l)?), r.clone()),
        Triangle(beta, v) => {
            let shifted = beta.left_sub(&Ordinal::one()).expect("positive exponent");
            let tail = if shifted.is_zero() { (**v).clone() } else { Triangle(shifted, v.clone()) };
            ConcatUp(bx(WordOpen(vec![fc.clone()])), bx(tail))
        }
        other => {
            return Err(Error::Unsupported(format!("no rewrite for F ⋊ {}", open_kind(other))));
        }
    })
}
