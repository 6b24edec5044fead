//! Polynomial-plus-list functors, their initial algebras at bounded depth,
//! the substructure ordering, and divisibility preorders.
//!
//! An element of `μF` is stored as its one-step unfolding: an `F`-shaped
//! point whose `Id` positions hold elements of `μF`. Shapes are encoded as
//! points: `Unit` is the atom `unit`, sums are injections, products are pairs
//! and lists are words.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::sets::OpenExpr;
use crate::space::{self, enumerate_points, FiniteQo, PointTerm, SpaceExpr};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Const(SpaceExpr),
    Unit,
    Id,
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    Prod(Box<FunctorExpr>, Box<FunctorExpr>),
    List(Box<FunctorExpr>),
}

impl FunctorExpr {
    /// `X ↦ 1 + Σ × X`.
    pub fn words(alphabet: SpaceExpr) -> Self {
        FunctorExpr::Sum(
            Box::new(FunctorExpr::Unit),
            Box::new(FunctorExpr::Prod(Box::new(FunctorExpr::Const(alphabet)), Box::new(FunctorExpr::Id))),
        )
    }

    /// `X ↦ Σ × X*`.
    pub fn trees(labels: SpaceExpr) -> Self {
        FunctorExpr::Prod(
            Box::new(FunctorExpr::Const(labels)),
            Box::new(FunctorExpr::List(Box::new(FunctorExpr::Id))),
        )
    }

    /// Requires some shape without `Id` positions, so that `μF` is inhabited.
    pub fn validate(&self) -> Result<()> {
        fn base_case(f: &FunctorExpr) -> bool {
            match f {
                FunctorExpr::Const(_) | FunctorExpr::Unit | FunctorExpr::List(_) => true,
                FunctorExpr::Id => false,
                FunctorExpr::Sum(l, r) => base_case(l) || base_case(r),
                FunctorExpr::Prod(l, r) => base_case(l) && base_case(r),
            }
        }
        fn consts(f: &FunctorExpr) -> Result<()> {
            match f {
                FunctorExpr::Const(s) => s.validate(),
                FunctorExpr::Unit | FunctorExpr::Id => Ok(()),
                FunctorExpr::Sum(l, r) | FunctorExpr::Prod(l, r) => {
                    consts(l)?;
                    consts(r)
                }
                FunctorExpr::List(g) => consts(g),
            }
        }
        consts(self)?;
        if base_case(self) {
            Ok(())
        } else {
            Err(Error::Invalid("functor has no base case".into()))
        }
    }
}

/// The space of one-step unfoldings `F(μF)` for the sub-functor `g`.
pub fn shape_space(root: &FunctorExpr, g: &FunctorExpr) -> SpaceExpr {
    match g {
        FunctorExpr::Const(s) => s.clone(),
        FunctorExpr::Unit => SpaceExpr::Fin(FiniteQo::discrete(["unit"])),
        FunctorExpr::Id => SpaceExpr::Mu(Box::new(root.clone())),
        FunctorExpr::Sum(l, r) => SpaceExpr::sum(shape_space(root, l), shape_space(root, r)),
        FunctorExpr::Prod(l, r) => SpaceExpr::product(shape_space(root, l), shape_space(root, r)),
        FunctorExpr::List(h) => SpaceExpr::words(shape_space(root, h)),
    }
}

fn shape_ok(root: &FunctorExpr, g: &FunctorExpr, p: &PointTerm) -> bool {
    match (g, p) {
        (FunctorExpr::Const(s), _) => space::typecheck(s, p),
        (FunctorExpr::Unit, PointTerm::Atom(a)) => a == "unit",
        (FunctorExpr::Id, _) => shape_ok(root, root, p),
        (FunctorExpr::Sum(l, _), PointTerm::InL(x)) => shape_ok(root, l, x),
        (FunctorExpr::Sum(_, r), PointTerm::InR(x)) => shape_ok(root, r, x),
        (FunctorExpr::Prod(l, r), PointTerm::Pair(x, y)) => shape_ok(root, l, x) && shape_ok(root, r, y),
        (FunctorExpr::List(h), PointTerm::Word(xs)) => xs.iter().all(|x| shape_ok(root, h, x)),
        _ => false,
    }
}

pub fn typecheck_mu(f: &FunctorExpr, p: &PointTerm) -> bool {
    shape_ok(f, f, p)
}

fn collect_children<'a>(root: &FunctorExpr, g: &FunctorExpr, p: &'a PointTerm, out: &mut Vec<&'a PointTerm>) {
    match (g, p) {
        (FunctorExpr::Id, _) => out.push(p),
        (FunctorExpr::Sum(l, _), PointTerm::InL(x)) => collect_children(root, l, x, out),
        (FunctorExpr::Sum(_, r), PointTerm::InR(x)) => collect_children(root, r, x, out),
        (FunctorExpr::Prod(l, r), PointTerm::Pair(x, y)) => {
            collect_children(root, l, x, out);
            collect_children(root, r, y, out);
        }
        (FunctorExpr::List(h), PointTerm::Word(xs)) => {
            for x in xs {
                collect_children(root, h, x, out);
            }
        }
        _ => {}
    }
}

/// The set of `Id`-position contents of an unfolding, in first-occurrence order.
pub fn support(f: &FunctorExpr, value: &PointTerm) -> Vec<PointTerm> {
    let mut all = Vec::new();
    collect_children(f, f, value, &mut all);
    let mut seen = HashSet::new();
    all.into_iter().filter(|c| seen.insert(*c)).cloned().collect()
}

fn children<'a>(f: &FunctorExpr, value: &'a PointTerm) -> Vec<&'a PointTerm> {
    let mut all = Vec::new();
    collect_children(f, f, value, &mut all);
    all
}

/// Reflexive-transitive closure of the child relation.
pub fn substructure_leq(f: &FunctorExpr, a: &PointTerm, b: &PointTerm) -> bool {
    a == b || children(f, b).into_iter().any(|c| substructure_leq(f, a, c))
}

/// Every substructure of `p` (including `p`), duplicate-free.
pub fn substructures<'a>(f: &FunctorExpr, p: &'a PointTerm) -> Vec<&'a PointTerm> {
    let mut out = vec![p];
    let mut seen: HashSet<&PointTerm> = HashSet::from([p]);
    let mut k = 0;
    while k < out.len() {
        for c in children(f, out[k]) {
            if seen.insert(c) {
                out.push(c);
            }
        }
        k += 1;
    }
    out
}

/// `1 + max` child depth; elements of depth `n` are exactly `A_n`.
pub fn depth(f: &FunctorExpr, p: &PointTerm) -> usize {
    1 + children(f, p).into_iter().map(|c| depth(f, c)).max().unwrap_or(0)
}

/// Number of `Const` leaves, counted through all nested children.
pub fn data_size(f: &FunctorExpr, p: &PointTerm) -> usize {
    fn go(root: &FunctorExpr, g: &FunctorExpr, p: &PointTerm) -> usize {
        match (g, p) {
            (FunctorExpr::Const(_), _) => 1,
            (FunctorExpr::Unit, _) => 0,
            (FunctorExpr::Id, _) => go(root, root, p),
            (FunctorExpr::Sum(l, _), PointTerm::InL(x)) => go(root, l, x),
            (FunctorExpr::Sum(_, r), PointTerm::InR(x)) => go(root, r, x),
            (FunctorExpr::Prod(l, r), PointTerm::Pair(x, y)) => go(root, l, x) + go(root, r, y),
            (FunctorExpr::List(h), PointTerm::Word(xs)) => xs.iter().map(|x| go(root, h, x)).sum(),
            _ => 0,
        }
    }
    go(f, f, p)
}

/// The canonical order lift of `id_rel` through the shape `g`.
pub fn lift(
    root: &FunctorExpr,
    g: &FunctorExpr,
    x: &PointTerm,
    y: &PointTerm,
    id_rel: &mut dyn FnMut(&PointTerm, &PointTerm) -> bool,
) -> bool {
    match (g, x, y) {
        (FunctorExpr::Const(s), _, _) => space::leq(s, x, y),
        (FunctorExpr::Unit, _, _) => x == y,
        (FunctorExpr::Id, _, _) => id_rel(x, y),
        (FunctorExpr::Sum(l, _), PointTerm::InL(a), PointTerm::InL(b)) => lift(root, l, a, b, id_rel),
        (FunctorExpr::Sum(_, r), PointTerm::InR(a), PointTerm::InR(b)) => lift(root, r, a, b, id_rel),
        (FunctorExpr::Prod(l, r), PointTerm::Pair(a1, a2), PointTerm::Pair(b1, b2)) => {
            lift(root, l, a1, b1, id_rel) && lift(root, r, a2, b2, id_rel)
        }
        (FunctorExpr::List(h), PointTerm::Word(u), PointTerm::Word(v)) => {
            space::higman(u, v, &mut |p, q| lift(root, h, p, q, id_rel))
        }
        _ => false,
    }
}

/// Reads an element of `μ(1 + Σ × X)` as a word over `Σ`.
pub fn mu_to_word(p: &PointTerm) -> Option<PointTerm> {
    let mut letters = Vec::new();
    let mut cur = p;
    loop {
        match cur {
            PointTerm::InL(_) => return Some(PointTerm::Word(letters)),
            PointTerm::InR(c) => match &**c {
                PointTerm::Pair(a, tail) => {
                    letters.push((**a).clone());
                    cur = tail;
                }
                _ => return None,
            },
            _ => return None,
        }
    }
}

/// Reads an element of `μ(Σ × X*)` as a tree over `Σ`.
pub fn mu_to_tree(p: &PointTerm) -> Option<PointTerm> {
    match p {
        PointTerm::Pair(label, kids) => match &**kids {
            PointTerm::Word(ks) => Some(PointTerm::node(
                (**label).clone(),
                ks.iter().map(mu_to_tree).collect::<Option<Vec<_>>>()?,
            )),
            _ => None,
        },
        _ => None,
    }
}

/// Divisibility preorder in recursive form: `a ≼ b` iff the lift relates
/// the unfoldings or `a ≼ c` for a child `c` of `b`.
pub fn mu_leq(f: &FunctorExpr, a: &PointTerm, b: &PointTerm) -> bool {
    lift(f, f, a, b, &mut |x, y| mu_leq(f, x, y)) || children(f, b).into_iter().any(|c| mu_leq(f, a, c))
}

fn shape_values(
    root: &FunctorExpr,
    g: &FunctorExpr,
    pool: &[(PointTerm, usize)],
    budget: usize,
    list_cap: usize,
) -> Result<Vec<(PointTerm, usize)>> {
    Ok(match g {
        FunctorExpr::Const(s) => {
            if budget == 0 {
                Vec::new()
            } else {
                enumerate_points(s, list_cap)?.into_iter().map(|p| (p, 1)).collect()
            }
        }
        FunctorExpr::Unit => vec![(PointTerm::unit(), 0)],
        FunctorExpr::Id => pool.iter().filter(|(_, s)| *s <= budget).cloned().collect(),
        FunctorExpr::Sum(l, r) => {
            let mut out: Vec<(PointTerm, usize)> = shape_values(root, l, pool, budget, list_cap)?
                .into_iter()
                .map(|(p, s)| (PointTerm::InL(Box::new(p)), s))
                .collect();
            out.extend(
                shape_values(root, r, pool, budget, list_cap)?
                    .into_iter()
                    .map(|(p, s)| (PointTerm::InR(Box::new(p)), s)),
            );
            out
        }
        FunctorExpr::Prod(l, r) => {
            let mut out = Vec::new();
            for (x, sx) in shape_values(root, l, pool, budget, list_cap)? {
                for (y, sy) in shape_values(root, r, pool, budget - sx, list_cap)? {
                    out.push((PointTerm::pair(x.clone(), y), sx + sy));
                }
            }
            out
        }
        FunctorExpr::List(h) => {
            let items = shape_values(root, h, pool, budget, list_cap)?;
            let mut out: Vec<(Vec<PointTerm>, usize)> = vec![(Vec::new(), 0)];
            let mut start = 0;
            for _ in 0..list_cap {
                let end = out.len();
                for i in start..end {
                    for (x, sx) in &items {
                        let s = out[i].1 + sx;
                        if s <= budget {
                            let mut w = out[i].0.clone();
                            w.push(x.clone());
                            out.push((w, s));
                        }
                    }
                }
                start = end;
            }
            out.into_iter().map(|(w, s)| (PointTerm::Word(w), s)).collect()
        }
    })
}

/// The elements of `A_depth` (with `A_0 = ∅` and `A_{n+1} = F(A_n)`) of data
/// size at most `max_size`, lists capped at `max_size` entries.
pub fn enumerate_mu(f: &FunctorExpr, depth: usize, max_size: usize) -> Result<Vec<PointTerm>> {
    let mut pool: Vec<(PointTerm, usize)> = Vec::new();
    for _ in 0..depth {
        let next = shape_values(f, f, &pool, max_size, max_size)?;
        let mut seen = HashSet::new();
        let next: Vec<(PointTerm, usize)> = next.into_iter().filter(|(p, _)| seen.insert(p.clone())).collect();
        if next.len() == pool.len() {
            break;
        }
        pool = next;
    }
    Ok(pool.into_iter().map(|(p, _)| p).collect())
}

/// Stage-wise divisibility preorders on a size-bounded `A_depth`.
///
/// Stage `n` is the transitive closure, over `A_n`, of the lift of stage
/// `n - 1` together with the child-below-parent relation.
pub struct DivisibilityTable {
    pub functor: FunctorExpr,
    pub elements: Vec<PointTerm>,
    pub depths: Vec<usize>,
    index: HashMap<PointTerm, usize>,
    stages: Vec<Vec<FixedBitSet>>,
}

impl DivisibilityTable {
    pub fn build(f: &FunctorExpr, depth: usize, max_size: usize) -> Result<Self> {
        f.validate()?;
        let elements = enumerate_mu(f, depth, max_size)?;
        let n = elements.len();
        let index: HashMap<PointTerm, usize> = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let depths: Vec<usize> = elements.iter().map(|p| self::depth(f, p)).collect();
        let kids: Vec<Vec<usize>> = elements.iter().map(|p| children(f, p).iter().map(|c| index[*c]).collect()).collect();
        let mut stages: Vec<Vec<FixedBitSet>> = vec![vec![FixedBitSet::with_capacity(n); n]];
        for stage in 1..=depth {
            let prev = stages.last().expect("stage 0");
            let members: Vec<usize> = (0..n).filter(|&i| depths[i] <= stage).collect();
            let mut rel = vec![FixedBitSet::with_capacity(n); n];
            for &i in &members {
                for &j in &members {
                    let related = lift(f, f, &elements[i], &elements[j], &mut |x, y| prev[index[x]].contains(index[y]));
                    if related {
                        rel[i].insert(j);
                    }
                }
                for &c in &kids[i] {
                    rel[c].insert(i);
                }
            }
            close_transitively(&mut rel);
            stages.push(rel);
        }
        Ok(DivisibilityTable { functor: f.clone(), elements, depths, index, stages })
    }

    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn index_of(&self, p: &PointTerm) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Stage-`n` relation; `None` unless both points lie in `A_n`.
    pub fn leq_at(&self, n: usize, a: &PointTerm, b: &PointTerm) -> Option<bool> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        if n >= self.stages.len() || self.depths[i] > n || self.depths[j] > n {
            return None;
        }
        Some(self.stages[n][i].contains(j))
    }

    pub fn leq(&self, a: &PointTerm, b: &PointTerm) -> Option<bool> {
        self.leq_at(self.depth(), a, b)
    }

    /// Indices of the elements of `A_n`.
    pub fn members(&self, n: usize) -> Vec<usize> {
        (0..self.elements.len()).filter(|&i| self.depths[i] <= n).collect()
    }

    pub fn relation(&self, n: usize) -> &[FixedBitSet] {
        &self.stages[n]
    }

    /// Stage `n + 1` restricted to `A_n` equals stage `n`, for every `n`.
    pub fn is_conservative(&self) -> bool {
        (1..self.depth()).all(|n| {
            let m = self.members(n);
            m.iter().all(|&i| m.iter().all(|&j| self.stages[n][i].contains(j) == self.stages[n + 1][i].contains(j)))
        })
    }

    /// Every stage is reflexive and transitive on its members.
    pub fn is_preorder(&self) -> bool {
        (1..=self.depth()).all(|n| {
            let m = self.members(n);
            let r = &self.stages[n];
            m.iter().all(|&i| r[i].contains(i))
                && m.iter().all(|&i| m.iter().all(|&j| !r[i].contains(j) || r[j].is_subset(&r[i])))
        })
    }

    /// `(≼⊑)* = ≼` on `A_n`.
    pub fn is_stable(&self, n: usize) -> bool {
        let m = self.members(n);
        let r = &self.stages[n];
        let mut composed: Vec<FixedBitSet> = r.to_vec();
        for &a in &m {
            for b in r[a].ones().collect::<Vec<_>>() {
                for &c in &m {
                    if substructure_leq(&self.functor, &self.elements[b], &self.elements[c]) {
                        composed[a].insert(c);
                    }
                }
            }
        }
        close_transitively(&mut composed);
        m.iter().all(|&a| composed[a] == r[a])
    }
}

/// Warshall closure of a relation stored as successor bitsets.
pub fn close_transitively(rel: &mut [FixedBitSet]) {
    let n = rel.len();
    for k in 0..n {
        let row_k = rel[k].clone();
        for i in 0..n {
            if rel[i].contains(k) {
                rel[i].union_with(&row_k);
            }
        }
    }
}

/// Stage-`n` divisibility between two elements of `A_n`.
pub fn divisibility_leq(f: &FunctorExpr, n: usize, a: &PointTerm, b: &PointTerm) -> Result<bool> {
    for p in [a, b] {
        if !typecheck_mu(f, p) {
            return Err(Error::Type(format!("{p:?} is not an element of the initial algebra")));
        }
    }
    let size = data_size(f, a).max(data_size(f, b)).max(1);
    let table = DivisibilityTable::build(f, n, size)?;
    table
        .leq_at(n, a, b)
        .ok_or_else(|| Error::Invalid(format!("elements must lie in A_{n}")))
}

/// Checks `(≼⊑)* = ≼` on `A_n`, elements bounded by `max_size`.
pub fn check_preorder_stability(f: &FunctorExpr, n: usize, max_size: usize) -> Result<bool> {
    let table = DivisibilityTable::build(f, n, max_size)?;
    Ok(table.is_stable(n))
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Coincidence {
    pub equal: bool,
    /// Longest word, or tallest tree, in the compared universe.
    pub bound: usize,
    pub pairs: usize,
    /// Pairs where divisibility and the embedding order disagree, printed.
    pub mismatches: Vec<(String, String)>,
}

/// Compares the stage-`depth` divisibility preorder with Higman's ordering
/// (words functor) or Kruskal's (trees functor) on elements of size at most
/// `max_size`.
pub fn coincidence(f: &FunctorExpr, depth: usize, max_size: usize) -> Result<Coincidence> {
    let (plain, read): (SpaceExpr, fn(&PointTerm) -> Option<PointTerm>) = match f {
        FunctorExpr::Sum(l, r) => match (&**l, &**r) {
            (FunctorExpr::Unit, FunctorExpr::Prod(a, x)) if **x == FunctorExpr::Id => match &**a {
                FunctorExpr::Const(base) => (SpaceExpr::words(base.clone()), mu_to_word),
                _ => return Err(not_embedding(f)),
            },
            _ => return Err(not_embedding(f)),
        },
        FunctorExpr::Prod(a, l) if **l == FunctorExpr::List(Box::new(FunctorExpr::Id)) => match &**a {
            FunctorExpr::Const(base) => (SpaceExpr::trees(base.clone()), mu_to_tree),
            _ => return Err(not_embedding(f)),
        },
        _ => return Err(not_embedding(f)),
    };
    let table = DivisibilityTable::build(f, depth, max_size)?;
    let read_all: Vec<PointTerm> = table
        .elements
        .iter()
        .map(|p| read(p).ok_or_else(|| Error::Invalid(format!("cannot read {p}"))))
        .collect::<Result<_>>()?;
    let mut mismatches = Vec::new();
    for (a, x) in table.elements.iter().zip(&read_all) {
        for (b, y) in table.elements.iter().zip(&read_all) {
            if table.leq(a, b) != Some(space::leq(&plain, x, y)) {
                mismatches.push((x.to_string(), y.to_string()));
            }
        }
    }
    let n = read_all.len();
    Ok(Coincidence { equal: mismatches.is_empty(), bound: depth.saturating_sub(1), pairs: n * n, mismatches })
}

fn not_embedding(f: &FunctorExpr) -> Error {
    Error::Unsupported(format!("coincidence is defined for the words and trees functors, not {f}"))
}

/// Generators `↑⊑ δ(U)` for every open `U` of the lifted topology on `F(μF)`.
///
/// `Id` positions range over `stage`; constants over the singleton
/// upward closures of their points (up to `bound`); list positions over
/// `WordOpen`s with at most `max_parts` parts.
pub fn div_exp_generators(
    f: &FunctorExpr,
    stage: &[OpenExpr],
    bound: usize,
    max_parts: usize,
) -> Result<Vec<OpenExpr>> {
    let lifted = lift_opens(f, stage, bound, max_parts)?;
    let mut seen = HashSet::new();
    Ok(lifted
        .into_iter()
        .map(|l| OpenExpr::DivUp(Box::new(l)).normalize())
        .filter(|g| seen.insert(g.clone()))
        .collect())
}

fn lift_opens(g: &FunctorExpr, stage: &[OpenExpr], bound: usize, max_parts: usize) -> Result<Vec<OpenExpr>> {
    Ok(match g {
        FunctorExpr::Const(s) => crate::sets::base_subbasis(s, bound)?,
        FunctorExpr::Unit => vec![OpenExpr::Whole],
        FunctorExpr::Id => stage.to_vec(),
        FunctorExpr::Sum(l, r) => {
            let mut out: Vec<OpenExpr> = lift_opens(l, stage, bound, max_parts)?
                .into_iter()
                .map(|u| OpenExpr::SumOpen(Box::new(u), Box::new(OpenExpr::Empty)))
                .collect();
            out.extend(
                lift_opens(r, stage, bound, max_parts)?
                    .into_iter()
                    .map(|v| OpenExpr::SumOpen(Box::new(OpenExpr::Empty), Box::new(v))),
            );
            out
        }
        FunctorExpr::Prod(l, r) => {
            let ls = lift_opens(l, stage, bound, max_parts)?;
            let rs = lift_opens(r, stage, bound, max_parts)?;
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for u in &ls {
                for v in &rs {
                    out.push(OpenExpr::Rect(Box::new(u.clone()), Box::new(v.clone())));
                }
            }
            out
        }
        FunctorExpr::List(h) => {
            let items = lift_opens(h, stage, bound, max_parts)?;
            let mut out = vec![OpenExpr::Whole];
            let mut layer: Vec<Vec<OpenExpr>> = vec![Vec::new()];
            for _ in 0..max_parts {
                let mut next = Vec::new();
                for parts in &layer {
                    for u in &items {
                        let mut p = parts.clone();
                        p.push(u.clone());
                        out.push(OpenExpr::WordOpen(p.clone()));
                        next.push(p);
                    }
                }
                layer = next;
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> SpaceExpr {
        SpaceExpr::discrete(["a", "b"])
    }

    /// Words functor element for a string.
    pub fn mu_word(s: &str) -> PointTerm {
        s.chars().rev().fold(PointTerm::InL(Box::new(PointTerm::unit())), |tail, c| {
            PointTerm::InR(Box::new(PointTerm::pair(PointTerm::Atom(c.to_string()), tail)))
        })
    }

    #[test]
    fn enumerate_examples() {
        let f = FunctorExpr::words(ab());
        assert!(enumerate_mu(&f, 0, 10).unwrap().is_empty());
        // A_1 = {ε}, A_2 adds the letters, A_3 the two-letter words.
        assert_eq!(enumerate_mu(&f, 3, 10).unwrap().len(), 7);
        let t = FunctorExpr::trees(ab());
        let single = enumerate_mu(&t, 1, 10).unwrap();
        assert_eq!(single.len(), 2);
        assert!(single.iter().all(|p| support(&t, p).is_empty()));
    }

    #[test]
    fn support_examples() {
        let f = FunctorExpr::words(ab());
        let w = mu_word("ab");
        assert_eq!(support(&f, &w), vec![mu_word("b")]);
        assert!(support(&f, &mu_word("")).is_empty());
        let t = FunctorExpr::trees(ab());
        let leaf = |l: &str| PointTerm::pair(PointTerm::atom(l), PointTerm::Word(vec![]));
        let node = PointTerm::pair(PointTerm::atom("a"), PointTerm::Word(vec![leaf("a"), leaf("b"), leaf("a")]));
        assert_eq!(support(&t, &node), vec![leaf("a"), leaf("b")]);
    }

    #[test]
    fn substructure_is_suffix_on_words() {
        let f = FunctorExpr::words(ab());
        let all = enumerate_mu(&f, 5, 4).unwrap();
        for x in &all {
            for y in &all {
                let (sx, sy) = (unword(x), unword(y));
                assert_eq!(substructure_leq(&f, x, y), sy.ends_with(&sx), "{sx} {sy}");
            }
        }
    }

    fn unword(p: &PointTerm) -> String {
        match p {
            PointTerm::InL(_) => String::new(),
            PointTerm::InR(c) => match &**c {
                PointTerm::Pair(a, t) => match &**a {
                    PointTerm::Atom(s) => format!("{s}{}", unword(t)),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn table_matches_recursive_form() {
        for (f, depth, size) in [
            (FunctorExpr::words(ab()), 5, 4),
            (FunctorExpr::trees(ab()), 4, 4),
        ] {
            let t = DivisibilityTable::build(&f, depth, size).unwrap();
            assert!(t.is_preorder());
            assert!(t.is_conservative());
            for a in &t.elements {
                for b in &t.elements {
                    assert_eq!(t.leq(a, b), Some(mu_leq(&f, a, b)));
                }
            }
            for n in 1..=depth {
                assert!(t.is_stable(n));
            }
        }
    }

    #[test]
    fn downward_closure_of_stages() {
        let f = FunctorExpr::trees(ab());
        let all = enumerate_mu(&f, 4, 4).unwrap();
        for b in &all {
            for a in substructures(&f, b) {
                if a != b {
                    assert!(depth(&f, a) < depth(&f, b));
                }
            }
        }
    }

    #[test]
    fn divisibility_leq_examples() {
        let f = FunctorExpr::words(ab());
        assert!(divisibility_leq(&f, 4, &mu_word("ab"), &mu_word("bab")).unwrap());
        assert!(!divisibility_leq(&f, 4, &mu_word("ab"), &mu_word("bba")).unwrap());
        assert!(divisibility_leq(&f, 3, &mu_word("a"), &mu_word("a")).unwrap());
        assert!(divisibility_leq(&f, 2, &mu_word("a"), &mu_word("ab")).is_err());
        assert!(check_preorder_stability(&f, 1, 3).unwrap());
    }

    #[test]
    fn coincidence_examples() {
        let c = coincidence(&FunctorExpr::words(ab()), 4, 4).unwrap();
        assert!(c.equal);
        assert_eq!((c.bound, c.pairs), (3, 15 * 15));
        assert!(coincidence(&FunctorExpr::trees(ab()), 3, 4).unwrap().equal);
        assert!(coincidence(&FunctorExpr::List(Box::new(FunctorExpr::Id)), 3, 3).is_err());
    }

    #[test]
    fn validate_rejects_uninhabited() {
        let f = FunctorExpr::Prod(Box::new(FunctorExpr::Const(ab())), Box::new(FunctorExpr::Id));
        assert!(f.validate().is_err());
        assert!(FunctorExpr::words(ab()).validate().is_ok());
    }
}
