//! Spaces, their points, and the canonical embedding quasi-orders.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::inductive::{self, FunctorExpr};
use crate::ordinal::Ordinal;

/// A finite quasi-order given by its reflexive-transitive relation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteQo {
    atoms: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl FiniteQo {
    /// Validates that `leq` is reflexive and transitive.
    pub fn new(atoms: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = atoms.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("relation matrix has the wrong shape".into()));
        }
        if atoms.iter().collect::<HashSet<_>>().len() != n {
            return Err(Error::Invalid("duplicate atom".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::Invalid(format!("relation is not reflexive at {}", atoms[i])));
            }
            for j in 0..n {
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::Invalid(format!(
                            "relation is not transitive at {} {} {}",
                            atoms[i], atoms[j], atoms[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteQo { atoms, leq })
    }

    /// The reflexive-transitive closure of `pairs`.
    pub fn from_pairs(atoms: Vec<String>, pairs: &[(String, String)]) -> Result<Self> {
        let n = atoms.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            let find = |x: &String| {
                atoms.iter().position(|y| y == x).ok_or_else(|| Error::Invalid(format!("unknown atom {x}")))
            };
            let (i, j) = (find(a)?, find(b)?);
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        FiniteQo::new(atoms, leq)
    }

    pub fn discrete<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Self {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        FiniteQo::from_pairs(atoms, &[]).expect("discrete order is valid")
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, a: &str) -> Option<usize> {
        self.atoms.iter().position(|x| x == a)
    }

    pub fn leq_index(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn leq(&self, a: &str, b: &str) -> Option<bool> {
        Some(self.leq[self.index_of(a)?][self.index_of(b)?])
    }

    /// All strict pairs of the relation, in atom order.
    pub fn strict_pairs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            for (j, b) in self.atoms.iter().enumerate() {
                if i != j && self.leq[i][j] {
                    out.push((a.as_str(), b.as_str()));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceExpr {
    Fin(FiniteQo),
    Nat,
    Sum(Box<SpaceExpr>, Box<SpaceExpr>),
    Product(Box<SpaceExpr>, Box<SpaceExpr>),
    Words(Box<SpaceExpr>),
    Trees(Box<SpaceExpr>),
    OrdWords(Box<SpaceExpr>, Ordinal),
    /// Trees whose children form an ordinal word of length below alpha.
    OrdTrees(Box<SpaceExpr>, Ordinal),
    /// Initial algebra of a functor; points are nested one-step unfoldings.
    Mu(Box<FunctorExpr>),
}

impl SpaceExpr {
    pub fn discrete<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Self {
        SpaceExpr::Fin(FiniteQo::discrete(atoms))
    }

    pub fn words(base: SpaceExpr) -> Self {
        SpaceExpr::Words(Box::new(base))
    }

    pub fn trees(base: SpaceExpr) -> Self {
        SpaceExpr::Trees(Box::new(base))
    }

    pub fn ord_words(base: SpaceExpr, alpha: Ordinal) -> Self {
        SpaceExpr::OrdWords(Box::new(base), alpha)
    }

    pub fn ord_trees(base: SpaceExpr, alpha: Ordinal) -> Self {
        SpaceExpr::OrdTrees(Box::new(base), alpha)
    }

    pub fn product(l: SpaceExpr, r: SpaceExpr) -> Self {
        SpaceExpr::Product(Box::new(l), Box::new(r))
    }

    pub fn sum(l: SpaceExpr, r: SpaceExpr) -> Self {
        SpaceExpr::Sum(Box::new(l), Box::new(r))
    }

    /// Letter space of a word-like space.
    pub fn letters(&self) -> Option<&SpaceExpr> {
        match self {
            SpaceExpr::Words(b) | SpaceExpr::OrdWords(b, _) => Some(b),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceExpr::Fin(_) | SpaceExpr::Nat => Ok(()),
            SpaceExpr::Sum(l, r) | SpaceExpr::Product(l, r) => {
                l.validate()?;
                r.validate()
            }
            SpaceExpr::Words(b) | SpaceExpr::Trees(b) => b.validate(),
            SpaceExpr::OrdWords(b, a) | SpaceExpr::OrdTrees(b, a) => {
                if a.is_zero() {
                    return Err(Error::Invalid("ordinal bound must be positive".into()));
                }
                b.validate()
            }
            SpaceExpr::Mu(f) => f.validate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointTerm {
    Atom(String),
    Nat(u64),
    Pair(Box<PointTerm>, Box<PointTerm>),
    InL(Box<PointTerm>),
    InR(Box<PointTerm>),
    Word(Vec<PointTerm>),
    /// A tree node. Over ordinal trees the children list holds a single `OrdWord`.
    Node(Box<PointTerm>, Vec<PointTerm>),
    OrdWord(Vec<(PointTerm, Ordinal)>),
}

impl PointTerm {
    pub fn atom(s: &str) -> Self {
        PointTerm::Atom(s.into())
    }

    pub fn unit() -> Self {
        PointTerm::Atom("unit".into())
    }

    /// A word of single-character atoms, e.g. `word_of("abb")`.
    pub fn word_of(s: &str) -> Self {
        PointTerm::Word(s.chars().map(|c| PointTerm::Atom(c.to_string())).collect())
    }

    pub fn pair(l: PointTerm, r: PointTerm) -> Self {
        PointTerm::Pair(Box::new(l), Box::new(r))
    }

    pub fn node(label: PointTerm, children: Vec<PointTerm>) -> Self {
        PointTerm::Node(Box::new(label), children)
    }

    /// A canonical ordinal word.
    pub fn ord_word(segments: Vec<(PointTerm, Ordinal)>) -> Self {
        PointTerm::OrdWord(ow::canonical(segments))
    }

    /// Node of an ordinal-branching tree.
    pub fn ord_node(label: PointTerm, children: Vec<(PointTerm, Ordinal)>) -> Self {
        PointTerm::Node(Box::new(label), vec![PointTerm::ord_word(children)])
    }

    /// Length of a word-like point.
    pub fn word_len(&self) -> Option<Ordinal> {
        match self {
            PointTerm::Word(ls) => Some(Ordinal::from(ls.len() as u64)),
            PointTerm::OrdWord(segs) => Some(ow::length(segs)),
            _ => None,
        }
    }
}

/// Ordinal-word helpers over canonical segment lists.
pub mod ow {
    use super::PointTerm;
    use crate::ordinal::Ordinal;

    pub type Segments = [(PointTerm, Ordinal)];

    /// Drops empty segments and merges adjacent equal letters.
    pub fn canonical(segments: Vec<(PointTerm, Ordinal)>) -> Vec<(PointTerm, Ordinal)> {
        let mut out: Vec<(PointTerm, Ordinal)> = Vec::with_capacity(segments.len());
        for (a, n) in segments {
            if n.is_zero() {
                continue;
            }
            match out.last_mut() {
                Some((b, m)) if *b == a => *m = m.add(&n),
                _ => out.push((a, n)),
            }
        }
        out
    }

    pub fn length(segs: &Segments) -> Ordinal {
        segs.iter().fold(Ordinal::zero(), |acc, (_, n)| acc.add(n))
    }

    pub fn from_letters(letters: &[PointTerm]) -> Vec<(PointTerm, Ordinal)> {
        canonical(letters.iter().map(|a| (a.clone(), Ordinal::one())).collect())
    }

    /// Expands a finite-length ordinal word.
    pub fn to_letters(segs: &Segments) -> Option<Vec<PointTerm>> {
        let mut out = Vec::new();
        for (a, n) in segs {
            let k = n.to_u64()?;
            out.extend(std::iter::repeat_n(a.clone(), k as usize));
        }
        Some(out)
    }

    /// `w_{≥γ}`: the suffix after the first `γ` letters.
    pub fn drop_prefix(segs: &Segments, gamma: &Ordinal) -> Vec<(PointTerm, Ordinal)> {
        let mut rest = gamma.clone();
        for (k, (a, n)) in segs.iter().enumerate() {
            if rest.is_zero() {
                return segs[k..].to_vec();
            }
            if rest < *n {
                let left = n.left_sub(&rest).expect("rest below count");
                let mut out = vec![(a.clone(), left)];
                out.extend(segs[k + 1..].iter().cloned());
                return out;
            }
            rest = rest.left_sub(n).expect("count below rest");
        }
        Vec::new()
    }

    /// `w_{<γ}`: the first `γ` letters.
    pub fn take_prefix(segs: &Segments, gamma: &Ordinal) -> Vec<(PointTerm, Ordinal)> {
        let mut rest = gamma.clone();
        let mut out = Vec::new();
        for (a, n) in segs {
            if rest.is_zero() {
                break;
            }
            if rest < *n {
                out.push((a.clone(), rest.clone()));
                break;
            }
            out.push((a.clone(), n.clone()));
            rest = rest.left_sub(n).expect("count below rest");
        }
        out
    }

    pub fn concat(u: &Segments, v: &Segments) -> Vec<(PointTerm, Ordinal)> {
        canonical(u.iter().chain(v).cloned().collect())
    }

    /// Greedy Higman embedding of `x` into `y`; returns the length of the
    /// shortest prefix of `y` that `x` embeds into.
    pub fn embed_end(
        x: &Segments,
        y: &Segments,
        leq: &mut dyn FnMut(&PointTerm, &PointTerm) -> bool,
    ) -> Option<Ordinal> {
        let mut seg = 0usize;
        let mut off = Ordinal::zero();
        let mut consumed = Ordinal::zero();
        for (a, beta) in x {
            let mut need = beta.clone();
            while !need.is_zero() {
                let (b, gamma) = y.get(seg)?;
                let avail = gamma.left_sub(&off).expect("offset inside segment");
                if leq(a, b) {
                    if need <= avail {
                        off = off.add(&need);
                        need = Ordinal::zero();
                        if off == *gamma {
                            consumed = consumed.add(gamma);
                            seg += 1;
                            off = Ordinal::zero();
                        }
                        continue;
                    }
                    need = need.left_sub(&avail).expect("avail below need");
                }
                consumed = consumed.add(gamma);
                seg += 1;
                off = Ordinal::zero();
            }
        }
        Some(consumed.add(&off))
    }
}

/// Whether `p` is a well-formed element of `space`.
pub fn typecheck(space: &SpaceExpr, p: &PointTerm) -> bool {
    match (space, p) {
        (SpaceExpr::Fin(qo), PointTerm::Atom(a)) => qo.index_of(a).is_some(),
        (SpaceExpr::Nat, PointTerm::Nat(_)) => true,
        (SpaceExpr::Sum(l, _), PointTerm::InL(x)) => typecheck(l, x),
        (SpaceExpr::Sum(_, r), PointTerm::InR(x)) => typecheck(r, x),
        (SpaceExpr::Product(l, r), PointTerm::Pair(x, y)) => typecheck(l, x) && typecheck(r, y),
        (SpaceExpr::Words(b), PointTerm::Word(ls)) => ls.iter().all(|x| typecheck(b, x)),
        (SpaceExpr::Trees(b), PointTerm::Node(l, cs)) => {
            typecheck(b, l) && cs.iter().all(|c| typecheck(space, c))
        }
        (SpaceExpr::OrdWords(b, alpha), PointTerm::OrdWord(segs)) => {
            ordword_ok(segs, alpha, &mut |x| typecheck(b, x))
        }
        (SpaceExpr::OrdTrees(b, alpha), PointTerm::Node(l, cs)) => match cs.as_slice() {
            [PointTerm::OrdWord(segs)] => {
                typecheck(b, l) && ordword_ok(segs, alpha, &mut |x| typecheck(space, x))
            }
            _ => false,
        },
        (SpaceExpr::Mu(f), p) => inductive::typecheck_mu(f, p),
        _ => false,
    }
}

fn ordword_ok(segs: &ow::Segments, alpha: &Ordinal, letter_ok: &mut dyn FnMut(&PointTerm) -> bool) -> bool {
    segs.iter().all(|(a, n)| !n.is_zero() && letter_ok(a))
        && segs.windows(2).all(|w| w[0].0 != w[1].0)
        && ow::length(segs) < *alpha
}

/// The canonical embedding quasi-order, after type checking both points.
pub fn point_leq(space: &SpaceExpr, x: &PointTerm, y: &PointTerm) -> Result<bool> {
    for p in [x, y] {
        if !typecheck(space, p) {
            return Err(Error::Type(format!("point {p:?} does not belong to the space")));
        }
    }
    Ok(leq(space, x, y))
}

/// [`point_leq`] without type checking; ill-typed pairs compare false.
pub fn leq(space: &SpaceExpr, x: &PointTerm, y: &PointTerm) -> bool {
    match (space, x, y) {
        (SpaceExpr::Fin(qo), PointTerm::Atom(a), PointTerm::Atom(b)) => qo.leq(a, b).unwrap_or(false),
        (SpaceExpr::Nat, PointTerm::Nat(a), PointTerm::Nat(b)) => a <= b,
        (SpaceExpr::Sum(l, _), PointTerm::InL(a), PointTerm::InL(b)) => leq(l, a, b),
        (SpaceExpr::Sum(_, r), PointTerm::InR(a), PointTerm::InR(b)) => leq(r, a, b),
        (SpaceExpr::Product(l, r), PointTerm::Pair(a1, a2), PointTerm::Pair(b1, b2)) => {
            leq(l, a1, b1) && leq(r, a2, b2)
        }
        (SpaceExpr::Words(b), PointTerm::Word(u), PointTerm::Word(v)) => higman(u, v, &mut |p, q| leq(b, p, q)),
        (SpaceExpr::OrdWords(b, _), PointTerm::OrdWord(u), PointTerm::OrdWord(v)) => {
            ow::embed_end(u, v, &mut |p, q| leq(b, p, q)).is_some()
        }
        (SpaceExpr::Trees(b), PointTerm::Node(..), PointTerm::Node(..)) => kruskal(b, space, x, y),
        (SpaceExpr::OrdTrees(b, _), PointTerm::Node(..), PointTerm::Node(..)) => kruskal(b, space, x, y),
        (SpaceExpr::Mu(f), _, _) => inductive::mu_leq(f, x, y),
        _ => false,
    }
}

/// Greedy leftmost Higman embedding for an arbitrary letter relation.
pub fn higman<T>(u: &[T], v: &[T], rel: &mut dyn FnMut(&T, &T) -> bool) -> bool {
    let mut j = 0;
    for a in u {
        loop {
            match v.get(j) {
                None => return false,
                Some(b) => {
                    j += 1;
                    if rel(a, b) {
                        break;
                    }
                }
            }
        }
    }
    true
}

/// Children of a tree node, as letters (distinct letters for ordinal trees).
pub fn tree_children(t: &PointTerm) -> Vec<&PointTerm> {
    match t {
        PointTerm::Node(_, cs) => match cs.as_slice() {
            [PointTerm::OrdWord(segs)] => segs.iter().map(|(c, _)| c).collect(),
            _ => cs.iter().collect(),
        },
        _ => Vec::new(),
    }
}

/// Every subtree of `t`, root first, in preorder.
pub fn subtrees(t: &PointTerm) -> Vec<&PointTerm> {
    let mut out = vec![t];
    let mut k = 0;
    while k < out.len() {
        let next = tree_children(out[k]);
        out.extend(next);
        k += 1;
    }
    out
}

fn kruskal(base: &SpaceExpr, space: &SpaceExpr, t: &PointTerm, u: &PointTerm) -> bool {
    let (PointTerm::Node(lt, ct), PointTerm::Node(lu, cu)) = (t, u) else {
        return false;
    };
    if leq(base, lt, lu) {
        let root_ok = match (ct.as_slice(), cu.as_slice()) {
            ([PointTerm::OrdWord(x)], [PointTerm::OrdWord(y)]) => {
                ow::embed_end(x, y, &mut |p, q| kruskal(base, space, p, q)).is_some()
            }
            _ => higman(ct, cu, &mut |p, q| kruskal(base, space, p, q)),
        };
        if root_ok {
            return true;
        }
    }
    tree_children(u).into_iter().any(|c| kruskal(base, space, t, c))
}

/// Number of nodes of a tree point.
pub fn tree_size(t: &PointTerm) -> usize {
    match t {
        PointTerm::Node(_, cs) => match cs.as_slice() {
            [PointTerm::OrdWord(segs)] => {
                1 + segs.iter().map(|(c, n)| tree_size(c) * n.to_u64().unwrap_or(1) as usize).sum::<usize>()
            }
            _ => 1 + cs.iter().map(tree_size).sum::<usize>(),
        },
        _ => 0,
    }
}

/// All points of structural size at most `bound`, duplicate-free, in a
/// deterministic order.
///
/// Words and ordinal words are bounded by length, trees by node count, and
/// naturals by value; product and sum components share the bound.
pub fn enumerate_points(space: &SpaceExpr, bound: usize) -> Result<Vec<PointTerm>> {
    Ok(match space {
        SpaceExpr::Fin(qo) => qo.atoms().iter().map(|a| PointTerm::Atom(a.clone())).collect(),
        SpaceExpr::Nat => (0..=bound as u64).map(PointTerm::Nat).collect(),
        SpaceExpr::Sum(l, r) => {
            let mut out: Vec<PointTerm> =
                enumerate_points(l, bound)?.into_iter().map(|x| PointTerm::InL(Box::new(x))).collect();
            out.extend(enumerate_points(r, bound)?.into_iter().map(|x| PointTerm::InR(Box::new(x))));
            out
        }
        SpaceExpr::Product(l, r) => {
            let ls = enumerate_points(l, bound)?;
            let rs = enumerate_points(r, bound)?;
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for x in &ls {
                for y in &rs {
                    out.push(PointTerm::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        SpaceExpr::Words(b) => {
            let letters = enumerate_points(b, bound)?;
            finite_words(&letters, bound).into_iter().map(PointTerm::Word).collect()
        }
        SpaceExpr::OrdWords(b, alpha) => {
            let letters = enumerate_points(b, bound)?;
            let max = alpha.to_u64().map_or(bound, |a| bound.min(a.saturating_sub(1) as usize));
            finite_words(&letters, max).into_iter().map(|w| PointTerm::OrdWord(ow::from_letters(&w))).collect()
        }
        SpaceExpr::Trees(b) => {
            let labels = enumerate_points(b, bound)?;
            finite_trees(&labels, bound, usize::MAX, false)
        }
        SpaceExpr::OrdTrees(b, alpha) => {
            let labels = enumerate_points(b, bound)?;
            let fan = alpha.to_u64().map_or(usize::MAX, |a| a.saturating_sub(1) as usize);
            finite_trees(&labels, bound, fan, true)
        }
        SpaceExpr::Mu(f) => inductive::enumerate_mu(f, bound + 1, bound)?,
    })
}

fn finite_words(letters: &[PointTerm], max_len: usize) -> Vec<Vec<PointTerm>> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in start..end {
            for a in letters {
                let mut w = out[i].clone();
                w.push(a.clone());
                out.push(w);
            }
        }
        start = end;
    }
    out
}

/// Trees with at most `max_nodes` nodes and at most `fan` children per node,
/// ordered by node count.
fn finite_trees(labels: &[PointTerm], max_nodes: usize, fan: usize, ordinal: bool) -> Vec<PointTerm> {
    // by_size[n]: trees with exactly n nodes; forests[n]: child lists of total size n.
    let mut by_size: Vec<Vec<PointTerm>> = vec![Vec::new(); max_nodes + 1];
    let mut forests: Vec<Vec<Vec<PointTerm>>> = vec![Vec::new(); max_nodes + 1];
    if max_nodes == 0 {
        return Vec::new();
    }
    forests[0].push(Vec::new());
    for n in 1..=max_nodes {
        let mut trees = Vec::new();
        for l in labels {
            for cs in &forests[n - 1] {
                if cs.len() > fan {
                    continue;
                }
                let t = if ordinal {
                    PointTerm::Node(Box::new(l.clone()), vec![PointTerm::OrdWord(ow::from_letters(cs))])
                } else {
                    PointTerm::Node(Box::new(l.clone()), cs.clone())
                };
                trees.push(t);
            }
        }
        by_size[n] = trees;
        // forests of size n: a first tree of size k followed by a forest of size n - k
        let mut fs = Vec::new();
        for k in 1..=n {
            for t in &by_size[k] {
                for rest in &forests[n - k] {
                    let mut f = Vec::with_capacity(rest.len() + 1);
                    f.push(t.clone());
                    f.extend(rest.iter().cloned());
                    fs.push(f);
                }
            }
        }
        forests[n] = fs;
    }
    by_size.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> SpaceExpr {
        SpaceExpr::discrete(["a", "b"])
    }

    fn w(s: &str) -> PointTerm {
        PointTerm::word_of(s)
    }

    fn leaf(l: &str) -> PointTerm {
        PointTerm::node(PointTerm::atom(l), vec![])
    }

    #[test]
    fn typecheck_examples() {
        assert!(typecheck(&SpaceExpr::words(ab()), &w("ab")));
        let ow_space = SpaceExpr::ord_words(ab(), Ordinal::omega());
        assert!(!typecheck(&ow_space, &PointTerm::ord_word(vec![(PointTerm::atom("a"), Ordinal::omega())])));
        let t = PointTerm::node(PointTerm::atom("a"), vec![leaf("b")]);
        assert!(typecheck(&SpaceExpr::trees(ab()), &t));
        assert!(!typecheck(&SpaceExpr::words(ab()), &w("ac")));
        let uncanonical = PointTerm::OrdWord(vec![
            (PointTerm::atom("a"), Ordinal::one()),
            (PointTerm::atom("a"), Ordinal::one()),
        ]);
        assert!(!typecheck(&SpaceExpr::ord_words(ab(), Ordinal::omega()), &uncanonical));
    }

    #[test]
    fn leq_examples() {
        let ws = SpaceExpr::words(SpaceExpr::discrete(["a", "b", "c"]));
        assert!(point_leq(&ws, &w("ab"), &w("acb")).unwrap());
        assert!(!point_leq(&ws, &w("ab"), &w("ba")).unwrap());
        let n3 = SpaceExpr::product(SpaceExpr::Nat, SpaceExpr::product(SpaceExpr::Nat, SpaceExpr::Nat));
        let v = |a, b, c| {
            PointTerm::pair(PointTerm::Nat(a), PointTerm::pair(PointTerm::Nat(b), PointTerm::Nat(c)))
        };
        assert!(point_leq(&n3, &v(1, 2, 3), &v(1, 5, 3)).unwrap());
        assert!(point_leq(&ws, &w("ab"), &PointTerm::Nat(1)).is_err());

        let abcx = SpaceExpr::discrete(["a", "b", "c", "x"]);
        let small = PointTerm::node(PointTerm::atom("a"), vec![leaf("b")]);
        let big = PointTerm::node(
            PointTerm::atom("c"),
            vec![PointTerm::node(PointTerm::atom("a"), vec![PointTerm::node(PointTerm::atom("x"), vec![leaf("b")])])],
        );
        let ts = SpaceExpr::trees(abcx);
        assert!(point_leq(&ts, &small, &big).unwrap());
        assert!(!point_leq(&ts, &big, &small).unwrap());
    }

    #[test]
    fn sum_injections_are_incomparable() {
        let s = SpaceExpr::sum(SpaceExpr::Nat, SpaceExpr::Nat);
        let l = PointTerm::InL(Box::new(PointTerm::Nat(0)));
        let r = PointTerm::InR(Box::new(PointTerm::Nat(5)));
        assert!(!point_leq(&s, &l, &r).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let got = enumerate_points(&SpaceExpr::words(ab()), 2).unwrap();
        let want: Vec<PointTerm> = ["", "a", "b", "aa", "ab", "ba", "bb"].iter().map(|s| w(s)).collect();
        assert_eq!(got, want);
        let nn = enumerate_points(&SpaceExpr::product(SpaceExpr::Nat, SpaceExpr::Nat), 1).unwrap();
        let pairs: Vec<(u64, u64)> = nn
            .iter()
            .map(|p| match p {
                PointTerm::Pair(a, b) => match (&**a, &**b) {
                    (PointTerm::Nat(x), PointTerm::Nat(y)) => (*x, *y),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(enumerate_points(&SpaceExpr::trees(SpaceExpr::discrete(["a"])), 3).unwrap().len(), 4);
    }

    #[test]
    fn ordinal_word_slicing() {
        let a = PointTerm::atom("a");
        let b = PointTerm::atom("b");
        let segs = vec![(a.clone(), Ordinal::omega()), (b.clone(), Ordinal::from(2))];
        assert_eq!(ow::drop_prefix(&segs, &Ordinal::from(3)), segs);
        assert_eq!(ow::drop_prefix(&segs, &Ordinal::omega()), vec![(b.clone(), Ordinal::from(2))]);
        assert_eq!(ow::drop_prefix(&segs, &Ordinal::omega().succ()), vec![(b.clone(), Ordinal::one())]);
        assert_eq!(ow::take_prefix(&segs, &Ordinal::from(3)), vec![(a.clone(), Ordinal::from(3))]);
        assert_eq!(ow::length(&segs), Ordinal::omega().add(&Ordinal::from(2)));
        let x = vec![(a.clone(), Ordinal::omega()), (b.clone(), Ordinal::one())];
        let mut eq = |p: &PointTerm, q: &PointTerm| p == q;
        assert_eq!(ow::embed_end(&x, &segs, &mut eq), Some(Ordinal::omega().succ()));
        let y = vec![(a.clone(), Ordinal::from(5)), (b, Ordinal::one())];
        assert_eq!(ow::embed_end(&x, &y, &mut eq), None);
    }
}
