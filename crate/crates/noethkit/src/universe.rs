//! A bounded finite universe of points, where set expressions become bitsets.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;

use crate::error::Result;
use crate::exec;
use crate::sets::{self, ClosedExpr, OpenExpr};
use crate::space::{self, PointTerm, SpaceExpr};

#[derive(Clone, Debug)]
pub struct Universe {
    pub space: SpaceExpr,
    pub bound: usize,
    pub points: Vec<PointTerm>,
    index: HashMap<PointTerm, usize>,
    codes: Option<WordCodes>,
    trees: Option<TreeCodes>,
    memo: Arc<Mutex<Memo>>,
}

/// Extents of subexpressions met inside the fast paths.
#[derive(Debug, Default)]
struct Memo {
    opens: HashMap<OpenExpr, FixedBitSet>,
    closed: HashMap<ClosedExpr, FixedBitSet>,
}

/// Finite trees over at most 64 labels: label index, children and subtrees
/// as universe indices.
#[derive(Clone, Debug)]
struct TreeCodes {
    labels: Vec<PointTerm>,
    label: Vec<u8>,
    children: Vec<Vec<usize>>,
    subtrees: Vec<Vec<usize>>,
}

impl TreeCodes {
    fn build(space: &SpaceExpr, points: &[PointTerm], index: &HashMap<PointTerm, usize>) -> Option<Self> {
        let (SpaceExpr::Trees(base) | SpaceExpr::OrdTrees(base, _)) = space else { return None };
        let SpaceExpr::Fin(q) = &**base else { return None };
        if q.atoms().len() > 64 {
            return None;
        }
        let labels: Vec<PointTerm> = q.atoms().iter().map(|a| PointTerm::atom(a)).collect();
        let mut codes = TreeCodes { labels, label: Vec::new(), children: Vec::new(), subtrees: Vec::new() };
        for p in points {
            let PointTerm::Node(l, cs) = p else { return None };
            codes.label.push(codes.labels.iter().position(|x| x == &**l)? as u8);
            let kids: Vec<&PointTerm> = match cs.as_slice() {
                [PointTerm::OrdWord(segs)] => {
                    let mut out = Vec::new();
                    for (c, e) in segs {
                        out.extend(std::iter::repeat_n(c, e.to_u64()? as usize));
                    }
                    out
                }
                _ => cs.iter().collect(),
            };
            codes.children.push(kids.into_iter().map(|c| index.get(c).copied()).collect::<Option<_>>()?);
            codes.subtrees.push(space::subtrees(p).into_iter().map(|c| index.get(c).copied()).collect::<Option<_>>()?);
        }
        Some(codes)
    }
}

/// Words over a finite alphabet of at most 64 letters, coded by letter index.
#[derive(Clone, Debug)]
struct WordCodes {
    letters: Vec<PointTerm>,
    words: Vec<Vec<u8>>,
    /// Index of the word without its first letter.
    tails: Vec<usize>,
}

impl WordCodes {
    fn build(space: &SpaceExpr, points: &[PointTerm], index: &HashMap<PointTerm, usize>) -> Option<Self> {
        let SpaceExpr::Words(base) = space else { return None };
        let SpaceExpr::Fin(q) = &**base else { return None };
        if q.atoms().len() > 64 {
            return None;
        }
        let letters: Vec<PointTerm> = q.atoms().iter().map(|a| PointTerm::atom(a)).collect();
        let mut words = Vec::with_capacity(points.len());
        let mut tails = Vec::with_capacity(points.len());
        for p in points {
            let PointTerm::Word(w) = p else { return None };
            let code = w
                .iter()
                .map(|x| letters.iter().position(|l| l == x).map(|i| i as u8))
                .collect::<Option<Vec<u8>>>()?;
            let tail = match w.split_first() {
                Some((_, rest)) => *index.get(&PointTerm::Word(rest.to_vec()))?,
                None => 0,
            };
            words.push(code);
            tails.push(tail);
        }
        Some(WordCodes { letters, words, tails })
    }
}

impl Universe {
    pub fn new(space: &SpaceExpr, bound: usize) -> Result<Self> {
        let points = space::enumerate_points(space, bound)?;
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let codes = WordCodes::build(space, &points, &index);
        let trees = TreeCodes::build(space, &points, &index);
        Ok(Universe { space: space.clone(), bound, points, index, codes, trees, memo: Arc::default() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &PointTerm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn full(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.len());
        b.insert_range(..);
        b
    }

    pub fn open_bits(&self, u: &OpenExpr) -> Result<FixedBitSet> {
        if let OpenExpr::Within(v, h) = u {
            let mut b = self.open_bits(v)?;
            b.intersect_with(&self.memo_closed(h)?);
            return Ok(b);
        }
        if let Some(codes) = &self.codes {
            if let Some(b) = self.word_bits(codes, u)? {
                return Ok(b);
            }
        }
        if let Some(trees) = &self.trees {
            if let Some(b) = self.tree_bits(trees, u)? {
                return Ok(b);
            }
        }
        self.collect(|p| sets::mem_open(&self.space, p, u))
    }

    fn memo_open(&self, u: &OpenExpr) -> Result<FixedBitSet> {
        if let Some(b) = self.memo.lock().expect("memo lock").opens.get(u) {
            return Ok(b.clone());
        }
        let b = self.open_bits(u)?;
        self.memo.lock().expect("memo lock").opens.insert(u.clone(), b.clone());
        Ok(b)
    }

    fn memo_closed(&self, c: &ClosedExpr) -> Result<FixedBitSet> {
        if let Some(b) = self.memo.lock().expect("memo lock").closed.get(c) {
            return Ok(b.clone());
        }
        let b = self.closed_bits(c)?;
        self.memo.lock().expect("memo lock").closed.insert(c.clone(), b.clone());
        Ok(b)
    }

    fn letter_mask(&self, letters: &[PointTerm], u: &OpenExpr) -> Result<u64> {
        let base = match &self.space {
            SpaceExpr::Words(b) | SpaceExpr::Trees(b) | SpaceExpr::OrdTrees(b, _) => &**b,
            _ => unreachable!("fast paths exist only for finite words and trees"),
        };
        let mut m = 0u64;
        for (i, l) in letters.iter().enumerate() {
            if sets::mem_open(base, l, u)? {
                m |= 1 << i;
            }
        }
        Ok(m)
    }

    /// Bitset fast path for tree opens over finite labels.
    fn tree_bits(&self, codes: &TreeCodes, u: &OpenExpr) -> Result<Option<FixedBitSet>> {
        let n = self.len();
        Ok(Some(match u {
            OpenExpr::Empty => FixedBitSet::with_capacity(n),
            OpenExpr::Whole => self.full(),
            OpenExpr::TreeOpen(root, kids) => {
                let mask = self.letter_mask(&codes.labels, root)?;
                let Some(kids) = self.children_bits(codes, kids)? else { return Ok(None) };
                let mut node = kids;
                for i in 0..n {
                    if mask >> codes.label[i] & 1 == 0 {
                        node.set(i, false);
                    }
                }
                let mut b = FixedBitSet::with_capacity(n);
                for (i, subs) in codes.subtrees.iter().enumerate() {
                    if subs.iter().any(|&s| node.contains(s)) {
                        b.insert(i);
                    }
                }
                b
            }
            OpenExpr::Union(xs) => {
                let mut b = FixedBitSet::with_capacity(n);
                for x in xs {
                    b.union_with(&self.open_bits(x)?);
                }
                b
            }
            OpenExpr::Intersect(xs) => {
                let mut b = self.full();
                for x in xs {
                    b.intersect_with(&self.open_bits(x)?);
                }
                b
            }
            _ => return Ok(None),
        }))
    }

    /// Bit `i` is set when the children of tree `i`, read as a word of trees, lie in `kids`.
    fn children_bits(&self, codes: &TreeCodes, kids: &OpenExpr) -> Result<Option<FixedBitSet>> {
        let n = self.len();
        Ok(Some(match kids {
            OpenExpr::Empty => FixedBitSet::with_capacity(n),
            OpenExpr::Whole => self.full(),
            OpenExpr::WordOpen(parts) => {
                let parts = parts.iter().map(|p| self.memo_open(p)).collect::<Result<Vec<_>>>()?;
                let mut b = FixedBitSet::with_capacity(n);
                for (i, cs) in codes.children.iter().enumerate() {
                    let mut k = 0;
                    for &c in cs {
                        if k < parts.len() && parts[k].contains(c) {
                            k += 1;
                        }
                    }
                    if k == parts.len() {
                        b.insert(i);
                    }
                }
                b
            }
            OpenExpr::Union(xs) | OpenExpr::Intersect(xs) => {
                let union = matches!(kids, OpenExpr::Union(_));
                let mut b = if union { FixedBitSet::with_capacity(n) } else { self.full() };
                for x in xs {
                    let Some(c) = self.children_bits(codes, x)? else { return Ok(None) };
                    if union {
                        b.union_with(&c);
                    } else {
                        b.intersect_with(&c);
                    }
                }
                b
            }
            _ => return Ok(None),
        }))
    }

    /// Bitset fast path for the word-shaped fragment over a finite alphabet.
    fn word_bits(&self, codes: &WordCodes, u: &OpenExpr) -> Result<Option<FixedBitSet>> {
        let n = self.len();
        Ok(Some(match u {
            OpenExpr::Empty => FixedBitSet::with_capacity(n),
            OpenExpr::Whole => self.full(),
            OpenExpr::WordOpen(parts) => {
                let masks = parts.iter().map(|p| self.letter_mask(&codes.letters, p)).collect::<Result<Vec<u64>>>()?;
                let mut b = FixedBitSet::with_capacity(n);
                for (i, w) in codes.words.iter().enumerate() {
                    let mut k = 0;
                    for &x in w {
                        if k < masks.len() && masks[k] >> x & 1 == 1 {
                            k += 1;
                        }
                    }
                    if k == masks.len() {
                        b.insert(i);
                    }
                }
                b
            }
            OpenExpr::LetterConcat(l, v) => {
                let mask = self.letter_mask(&codes.letters, l)?;
                let rest = self.memo_open(v)?;
                let mut b = FixedBitSet::with_capacity(n);
                for (i, w) in codes.words.iter().enumerate() {
                    if w.first().is_some_and(|&x| mask >> x & 1 == 1) && rest.contains(codes.tails[i]) {
                        b.insert(i);
                    }
                }
                b
            }
            OpenExpr::Union(xs) => {
                let mut b = FixedBitSet::with_capacity(n);
                for x in xs {
                    b.union_with(&self.open_bits(x)?);
                }
                b
            }
            OpenExpr::Intersect(xs) => {
                let mut b = self.full();
                for x in xs {
                    b.intersect_with(&self.open_bits(x)?);
                }
                b
            }
            _ => return Ok(None),
        }))
    }

    pub fn closed_bits(&self, c: &ClosedExpr) -> Result<FixedBitSet> {
        self.collect(|p| sets::mem_closed(&self.space, p, c))
    }

    fn collect(&self, f: impl Fn(&PointTerm) -> Result<bool> + Sync + Send) -> Result<FixedBitSet> {
        let hits = exec::map(&self.points, f);
        let mut b = FixedBitSet::with_capacity(self.len());
        for (i, h) in hits.into_iter().enumerate() {
            if h? {
                b.insert(i);
            }
        }
        Ok(b)
    }

    pub fn points_of(&self, bits: &FixedBitSet) -> Vec<PointTerm> {
        bits.ones().map(|i| self.points[i].clone()).collect()
    }

    /// Row `x` holds every `y` with `x ≤ y`.
    pub fn leq_matrix(&self) -> Vec<FixedBitSet> {
        exec::map_range(self.len(), |i| {
            let mut row = FixedBitSet::with_capacity(self.len());
            for (j, q) in self.points.iter().enumerate() {
                if space::leq(&self.space, &self.points[i], q) {
                    row.insert(j);
                }
            }
            row
        })
    }

    /// Specialisation preorder of the topology generated by `opens`: row `x`
    /// is the intersection of the opens containing `x`.
    pub fn specialization(&self, opens: &[FixedBitSet]) -> Vec<FixedBitSet> {
        exec::map_range(self.len(), |x| {
            let mut row = self.full();
            for o in opens.iter().filter(|o| o.contains(x)) {
                row.intersect_with(o);
            }
            row
        })
    }
}
