//! Refinement functions on finitely generated topologies, iterated from the
//! trivial topology, with depth bookkeeping, goodness and bad-chain oracles,
//! the respects-subsets check, and lattice export.
//!
//! A stage is a list of generators (a subbasis). Generators are deduplicated
//! by normal form and then by extent at the configured bound.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec;
use crate::inductive::{self, FunctorExpr};
use crate::ordinal::Ordinal;
use crate::sets::{self, ClosedExpr, OpenExpr, TopologyDesc, Verdict};
use crate::space::{PointTerm, SpaceExpr};
use crate::universe::Universe;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpanderSpec {
    /// `↑(U+1)` over the naturals.
    Div,
    /// `UV` for a letter open `U` and `V` in the stage.
    BadIterator(SpaceExpr),
    /// `↑UV` for `U, V` in the stage, and `⟨W⟩` for `W` open in the base.
    RegSubExp(SpaceExpr),
    /// `↑U⟨V⟩` for `U` open in the base and `V` a word open over stage generators.
    TreeExp(SpaceExpr),
    /// The regular-subword generators plus `↑(β ▷ U)` for `β` in a finite menu.
    RegSubExpOrd { base: SpaceExpr, alpha: Ordinal, menu: Vec<Ordinal> },
    /// Tree opens over ordinal-branching trees.
    TreeExpOm(SpaceExpr, Ordinal),
    /// `↑⊑ δ(U)` for `U` open in the lifted topology.
    DivExpOf(FunctorExpr),
}

impl ExpanderSpec {
    pub fn reg_sub_exp_ord(base: SpaceExpr, alpha: Ordinal) -> Self {
        let menu = default_menu(&alpha);
        ExpanderSpec::RegSubExpOrd { base, alpha, menu }
    }

    /// The space the expander acts on.
    pub fn space(&self) -> SpaceExpr {
        match self {
            ExpanderSpec::Div => SpaceExpr::Nat,
            ExpanderSpec::BadIterator(b) | ExpanderSpec::RegSubExp(b) => SpaceExpr::words(b.clone()),
            ExpanderSpec::TreeExp(b) => SpaceExpr::trees(b.clone()),
            ExpanderSpec::RegSubExpOrd { base, alpha, .. } => SpaceExpr::ord_words(base.clone(), alpha.clone()),
            ExpanderSpec::TreeExpOm(b, alpha) => SpaceExpr::ord_trees(b.clone(), alpha.clone()),
            ExpanderSpec::DivExpOf(f) => SpaceExpr::Mu(Box::new(f.clone())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExpanderSpec::Div => "div",
            ExpanderSpec::BadIterator(_) => "baditer",
            ExpanderSpec::RegSubExp(_) => "regsubexp",
            ExpanderSpec::TreeExp(_) => "treeexp",
            ExpanderSpec::RegSubExpOrd { .. } => "regsubexpord",
            ExpanderSpec::TreeExpOm(..) => "treeexpom",
            ExpanderSpec::DivExpOf(_) => "divexp",
        }
    }
}

/// `{1, 2, ω, ω+1, ω·2, ω², α}`, restricted to exponents at most `α`.
pub fn default_menu(alpha: &Ordinal) -> Vec<Ordinal> {
    let w = Ordinal::omega();
    let mut menu = vec![
        Ordinal::one(),
        Ordinal::from(2),
        w.clone(),
        w.succ(),
        w.add(&w),
        Ordinal::omega_pow(Ordinal::from(2)),
        alpha.clone(),
    ];
    menu.retain(|b| b <= alpha);
    menu.sort();
    menu.dedup();
    menu
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Oracle bound for extents.
    pub bound: usize,
    /// Per-stage generator cap.
    pub cap: usize,
    /// Most parts in a generated word open.
    pub max_parts: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { bound: 4, cap: 256, max_parts: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub open: OpenExpr,
    pub depth: Ordinal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyStage {
    pub space: SpaceExpr,
    pub generators: Vec<Generator>,
    pub step: usize,
    /// Generators dropped by the per-stage cap.
    pub dropped: usize,
}

impl TopologyStage {
    /// `{∅, X}`.
    pub fn trivial(space: SpaceExpr) -> Self {
        let gens = [OpenExpr::Empty, OpenExpr::Whole];
        TopologyStage {
            space,
            generators: gens.into_iter().map(|open| Generator { open, depth: Ordinal::zero() }).collect(),
            step: 0,
            dropped: 0,
        }
    }

    pub fn opens(&self) -> Vec<OpenExpr> {
        self.generators.iter().map(|g| g.open.clone()).collect()
    }

    pub fn topology(&self) -> TopologyDesc {
        TopologyDesc::new(self.space.clone(), self.opens())
    }

    pub fn depth_of(&self, u: &OpenExpr) -> Option<&Ordinal> {
        self.generators.iter().find(|g| g.open == *u).map(|g| &g.depth)
    }
}

fn letter_opens(space: &SpaceExpr, bound: usize) -> Result<Vec<OpenExpr>> {
    let base = space.letters().ok_or_else(|| Error::Type(format!("{space} is not a word space")))?;
    sets::base_subbasis(base, bound)
}

fn tree_base(space: &SpaceExpr) -> Result<&SpaceExpr> {
    match space {
        SpaceExpr::Trees(b) | SpaceExpr::OrdTrees(b, _) => Ok(b),
        _ => Err(Error::Type(format!("{space} is not a tree space"))),
    }
}

fn shift_nat(u: &OpenExpr) -> Result<OpenExpr> {
    Ok(match u {
        OpenExpr::Empty => OpenExpr::Empty,
        OpenExpr::Whole => OpenExpr::UpClosure(vec![PointTerm::Nat(1)]),
        OpenExpr::UpClosure(ps) => OpenExpr::UpClosure(
            ps.iter()
                .map(|p| match p {
                    PointTerm::Nat(n) => Ok(PointTerm::Nat(n + 1)),
                    _ => Err(Error::Type(format!("{p} is not a natural"))),
                })
                .collect::<Result<_>>()?,
        ),
        OpenExpr::Union(xs) => OpenExpr::Union(xs.iter().map(shift_nat).collect::<Result<_>>()?),
        other => return Err(Error::Unsupported(format!("shifting {other}"))),
    })
}

/// Word opens `⟨T1,…,Tk⟩` with `k ≤ max_parts`, plus `Whole`.
fn word_opens(items: &[OpenExpr], max_parts: usize) -> Vec<OpenExpr> {
    let mut out = vec![OpenExpr::Whole];
    let mut layer: Vec<Vec<OpenExpr>> = vec![Vec::new()];
    for _ in 0..max_parts {
        let mut next = Vec::new();
        for parts in &layer {
            for t in items {
                let mut p = parts.clone();
                p.push(t.clone());
                out.push(OpenExpr::WordOpen(p.clone()));
                next.push(p);
            }
        }
        layer = next;
    }
    out
}

/// The raw generator list of `E(τ)` for `τ` generated by `gens`, before
/// deduplication. The construction is uniform in `gens`, so restricting every
/// input generator to a carrier restricts the corresponding outputs.
pub fn candidates(e: &ExpanderSpec, gens: &[OpenExpr], cfg: &Config) -> Result<Vec<OpenExpr>> {
    let space = e.space();
    let mut out = vec![OpenExpr::Empty, OpenExpr::Whole];
    match e {
        ExpanderSpec::Div => {
            for u in gens {
                out.push(shift_nat(u)?);
            }
        }
        ExpanderSpec::BadIterator(_) => {
            for l in letter_opens(&space, cfg.bound)? {
                for v in gens {
                    out.push(OpenExpr::letter_concat(l.clone(), v.clone()));
                }
            }
        }
        ExpanderSpec::RegSubExp(_) | ExpanderSpec::RegSubExpOrd { .. } => {
            for u in gens {
                for v in gens {
                    out.push(OpenExpr::concat_up(u.clone(), v.clone()));
                }
            }
            for w in letter_opens(&space, cfg.bound)? {
                out.push(OpenExpr::WordOpen(vec![w]));
            }
            if let ExpanderSpec::RegSubExpOrd { menu, alpha, .. } = e {
                for beta in menu.iter().filter(|b| *b <= alpha) {
                    for u in gens {
                        out.push(OpenExpr::triangle(beta.clone(), u.clone()));
                    }
                }
            }
        }
        ExpanderSpec::TreeExp(_) | ExpanderSpec::TreeExpOm(..) => {
            let mut roots = sets::base_subbasis(tree_base(&space)?, cfg.bound)?;
            roots.push(OpenExpr::Whole);
            let kids = word_opens(gens, cfg.max_parts);
            for r in &roots {
                for v in &kids {
                    out.push(OpenExpr::tree_open(r.clone(), v.clone()));
                }
            }
        }
        ExpanderSpec::DivExpOf(f) => {
            out.extend(inductive::div_exp_generators(f, gens, cfg.bound, cfg.max_parts)?);
        }
    }
    Ok(out.into_iter().map(OpenExpr::normalize).collect())
}

/// A lower bound on the length of the words in `o`.
fn min_len(o: &OpenExpr) -> u64 {
    match o {
        OpenExpr::Empty => u64::MAX,
        OpenExpr::UpClosure(ps) => ps.iter().map(|p| p.word_len().and_then(|n| n.to_u64()).unwrap_or(u64::MAX)).min().unwrap_or(u64::MAX),
        OpenExpr::WordOpen(parts) => parts.len() as u64,
        OpenExpr::ConcatUp(l, r) => min_len(l).saturating_add(min_len(r)),
        OpenExpr::LetterConcat(_, r) => min_len(r).saturating_add(1),
        OpenExpr::Union(xs) => xs.iter().map(min_len).min().unwrap_or(u64::MAX),
        OpenExpr::Intersect(xs) => xs.iter().map(min_len).max().unwrap_or(0),
        OpenExpr::Within(u, _) => min_len(u),
        _ => 0,
    }
}

fn extents(u: &Universe, opens: &[OpenExpr]) -> Result<Vec<FixedBitSet>> {
    exec::map(opens, |o| u.open_bits(o)).into_iter().collect()
}

/// One application of the expander to a stage.
pub fn apply(e: &ExpanderSpec, stage: &TopologyStage, cfg: &Config) -> Result<TopologyStage> {
    if stage.space != e.space() {
        return Err(Error::Type(format!("stage over {} but {} acts on {}", stage.space, e.name(), e.space())));
    }
    let u = Universe::new(&stage.space, cfg.bound)?;
    let mut previous: HashMap<FixedBitSet, Ordinal> = HashMap::new();
    for (g, bits) in stage.generators.iter().zip(extents(&u, &stage.opens())?) {
        previous.entry(bits).or_insert_with(|| g.depth.clone());
    }
    let mut raw = candidates(e, &stage.opens(), cfg)?;
    let mut seen_expr = std::collections::HashSet::new();
    let words = stage.space.letters().is_some();
    raw.retain(|o| (!words || min_len(o) <= cfg.bound as u64 || *o == OpenExpr::Empty) && seen_expr.insert(o.clone()));
    let bits = extents(&u, &raw)?;
    let fresh = Ordinal::from(stage.step as u64 + 1);
    let mut seen: HashMap<FixedBitSet, ()> = HashMap::new();
    let mut gens = Vec::new();
    for (open, b) in raw.into_iter().zip(bits) {
        if seen.insert(b.clone(), ()).is_none() {
            let depth = previous.get(&b).cloned().unwrap_or_else(|| fresh.clone());
            gens.push(Generator { open, depth });
        }
    }
    gens.sort_by(|a, b| a.depth.cmp(&b.depth));
    let dropped = gens.len().saturating_sub(cfg.cap);
    gens.truncate(cfg.cap);
    Ok(TopologyStage { space: stage.space.clone(), generators: gens, step: stage.step + 1, dropped })
}

#[derive(Clone, Debug)]
pub struct Iteration {
    pub stages: Vec<TopologyStage>,
    /// First step whose generator extents equal those of the previous step.
    pub fixed_point: Option<usize>,
}

/// Stages `0..=k` from the trivial topology.
pub fn iterate(e: &ExpanderSpec, k: usize, cfg: &Config) -> Result<Iteration> {
    let u = Universe::new(&e.space(), cfg.bound)?;
    let mut stages = vec![TopologyStage::trivial(e.space())];
    let mut fixed_point = None;
    let mut last = extent_set(&u, &stages[0])?;
    for _ in 0..k {
        let next = apply(e, stages.last().expect("nonempty"), cfg)?;
        let ext = extent_set(&u, &next)?;
        if fixed_point.is_none() && ext == last {
            fixed_point = Some(next.step);
        }
        last = ext;
        stages.push(next);
    }
    Ok(Iteration { stages, fixed_point })
}

fn extent_set(u: &Universe, stage: &TopologyStage) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = extents(u, &stage.opens())?.iter().map(|b| b.ones().collect()).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Distinct generator extents of a stage, as sorted point lists.
pub fn stage_extents(stage: &TopologyStage, bound: usize) -> Result<Vec<Vec<PointTerm>>> {
    let u = Universe::new(&stage.space, bound)?;
    Ok(extent_set(&u, stage)?.into_iter().map(|ix| ix.into_iter().map(|i| u.points[i].clone()).collect()).collect())
}

/// Least `i` with `U_i ⊆ U_0 ∪ … ∪ U_{i-1}`.
pub fn find_good_index(space: &SpaceExpr, seq: &[OpenExpr], bound: usize) -> Result<Option<usize>> {
    for i in 0..seq.len() {
        let prefix = OpenExpr::Union(seq[..i].to_vec()).normalize();
        if sets::includes(space, &seq[i], &prefix, bound)?.verdict == Verdict::True {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Node budget of the bad-chain search.
pub const CHAIN_BUDGET: usize = 200_000;

/// Searches the first `length` stages for generators `G_0, …, G_{n-1}` with
/// `depth(G_i) ≤ i + 1` whose partial unions strictly increase at the bound.
/// Returns the unions.
pub fn find_bad_chain(e: &ExpanderSpec, length: usize, cfg: &Config) -> Result<Option<Vec<OpenExpr>>> {
    let it = iterate(e, length, cfg)?;
    let u = Universe::new(&e.space(), cfg.bound)?;
    let full = u.full();
    let mut pool: Vec<(OpenExpr, usize, FixedBitSet)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for stage in &it.stages {
        let bits = extents(&u, &stage.opens())?;
        for (g, b) in stage.generators.iter().zip(bits) {
            let depth = g.depth.to_u64().unwrap_or(u64::MAX) as usize;
            if b.is_clear() || b == full || depth == 0 || !seen.insert(b.clone()) {
                continue;
            }
            pool.push((g.open.clone(), depth, b));
        }
    }
    let mut chain = Vec::new();
    let mut budget = CHAIN_BUDGET;
    let found = chain_dfs(&pool, length, &FixedBitSet::with_capacity(u.len()), &mut chain, &mut budget);
    if !found {
        return Ok(None);
    }
    let mut unions = Vec::new();
    for k in 0..chain.len() {
        unions.push(OpenExpr::Union(chain[..=k].iter().map(|&i| pool[i].0.clone()).collect()).normalize());
    }
    Ok(Some(unions))
}

fn chain_dfs(
    pool: &[(OpenExpr, usize, FixedBitSet)],
    length: usize,
    covered: &FixedBitSet,
    chain: &mut Vec<usize>,
    budget: &mut usize,
) -> bool {
    if chain.len() == length {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let i = chain.len();
    let mut options: Vec<(usize, Vec<usize>, usize)> = pool
        .iter()
        .enumerate()
        .filter(|(_, (_, d, _))| *d <= i + 1)
        .filter_map(|(k, (_, _, b))| {
            let new: Vec<usize> = b.difference(covered).collect();
            let mut grown = covered.clone();
            grown.union_with(b);
            (!new.is_empty() && grown.count_ones(..) < covered.len()).then_some((new.len(), new, k))
        })
        .collect();
    options.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    for (_, _, k) in options {
        let mut grown = covered.clone();
        grown.union_with(&pool[k].2);
        chain.push(k);
        if chain_dfs(pool, length, &grown, chain, budget) {
            return true;
        }
        chain.pop();
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RespectsReport {
    pub equal: bool,
    /// Generators of `E(τ)|H` that are not open in `E(τ|H)|H`.
    pub left_only: Vec<OpenExpr>,
    /// Generators of `E(τ|H)|H` that are not open in `E(τ)|H`.
    pub right_only: Vec<OpenExpr>,
    pub bound: usize,
}

/// Smallest neighbourhood of each point of `carrier` in the topology
/// generated by `subbasis`.
fn neighbourhoods(subbasis: &[FixedBitSet], carrier: &FixedBitSet) -> Vec<FixedBitSet> {
    (0..carrier.len())
        .map(|p| {
            let mut nbhd = carrier.clone();
            for s in subbasis.iter().filter(|s| s.contains(p)) {
                nbhd.intersect_with(s);
            }
            nbhd
        })
        .collect()
}

fn open_in(x: &FixedBitSet, nbhds: &[FixedBitSet], carrier: &FixedBitSet) -> bool {
    x.is_subset(carrier) && x.ones().all(|p| nbhds[p].is_subset(x))
}

/// Compares `E(τ)|H` with `E(τ|H)|H` at the bound.
pub fn check_respects_subsets(
    e: &ExpanderSpec,
    stage: &TopologyStage,
    h: &ClosedExpr,
    cfg: &Config,
) -> Result<RespectsReport> {
    if !sets::is_closed_in(&stage.topology(), h, cfg.bound)? {
        return Err(Error::NotClosed(h.to_string()));
    }
    let u = Universe::new(&stage.space, cfg.bound)?;
    let carrier = u.closed_bits(h)?;
    // Opens of the stage are up-sets, so `H` is a down-set; at the bound it
    // is the down-closure of its maximal points, a much smaller expression.
    let leq = u.leq_matrix();
    let tops: Vec<PointTerm> = carrier
        .ones()
        .filter(|&x| carrier.ones().all(|y| y == x || !leq[x].contains(y) || leq[y].contains(x)))
        .map(|x| u.points[x].clone())
        .collect();
    let small = ClosedExpr::down(tops);
    let h = if u.closed_bits(&small)? == carrier { &small } else { h };
    let within = |o: &OpenExpr| OpenExpr::Within(Box::new(o.clone()), Box::new(h.clone())).normalize();
    let left: Vec<OpenExpr> = candidates(e, &stage.opens(), cfg)?.iter().map(within).collect();
    let restricted: Vec<OpenExpr> = stage.opens().iter().map(within).collect();
    let right: Vec<OpenExpr> = candidates(e, &restricted, cfg)?.iter().map(within).collect();
    let (lb, rb) = (extents(&u, &left)?, extents(&u, &right)?);
    let missing = |xs: &[OpenExpr], xb: &[FixedBitSet], other: &[FixedBitSet]| -> Vec<OpenExpr> {
        let nbhds = neighbourhoods(other, &carrier);
        let mut seen = std::collections::HashSet::new();
        xs.iter()
            .zip(xb)
            .filter(|(_, b)| seen.insert((*b).clone()) && !open_in(b, &nbhds, &carrier))
            .map(|(o, _)| o.clone())
            .collect()
    };
    let left_only = missing(&left, &lb, &rb);
    let right_only = missing(&right, &rb, &lb);
    Ok(RespectsReport { equal: left_only.is_empty() && right_only.is_empty(), left_only, right_only, bound: cfg.bound })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    /// Distinct generator extents.
    pub size: usize,
    /// Largest antichain of generator extents under inclusion.
    pub width: usize,
    /// Longest strictly increasing chain of generator extents.
    pub height: usize,
    pub bound: usize,
}

/// Finite-lattice check of a stage: the poset of generator extents is
/// finite, so every ascending chain stabilises; reports its size, width and height.
pub fn check_noetherian_stage(stage: &TopologyStage, bound: usize) -> Result<StageReport> {
    let u = Universe::new(&stage.space, bound)?;
    let ext: Vec<FixedBitSet> = extent_set(&u, stage)?
        .into_iter()
        .map(|ix| {
            let mut b = FixedBitSet::with_capacity(u.len());
            b.extend(ix);
            b
        })
        .collect();
    let n = ext.len();
    let below = |i: usize, j: usize| i != j && ext[i].is_subset(&ext[j]);
    let mut matched: Vec<Option<usize>> = vec![None; n];
    let mut matching = 0;
    for i in 0..n {
        let mut visited = vec![false; n];
        if augment(i, &below, &mut matched, &mut visited) {
            matching += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| ext[i].count_ones(..));
    let mut height = vec![1usize; n];
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[..a] {
            if below(j, i) {
                height[i] = height[i].max(height[j] + 1);
            }
        }
    }
    Ok(StageReport { size: n, width: n - matching, height: height.into_iter().max().unwrap_or(0), bound })
}

fn augment(
    i: usize,
    below: &dyn Fn(usize, usize) -> bool,
    matched: &mut Vec<Option<usize>>,
    visited: &mut Vec<bool>,
) -> bool {
    for j in 0..matched.len() {
        if below(i, j) && !visited[j] {
            visited[j] = true;
            if matched[j].is_none_or(|k| augment(k, below, matched, visited)) {
                matched[j] = Some(i);
                return true;
            }
        }
    }
    false
}

/// Generators strictly shallower than `u`.
pub fn tdown(stage: &TopologyStage, u: &OpenExpr, bound: usize) -> Result<TopologyStage> {
    let univ = Universe::new(&stage.space, bound)?;
    let target = univ.open_bits(u)?;
    let bits = extents(&univ, &stage.opens())?;
    let depth = stage
        .generators
        .iter()
        .zip(&bits)
        .find(|(_, b)| **b == target)
        .map(|(g, _)| g.depth.clone())
        .ok_or_else(|| Error::Invalid(format!("{u} is not a generator of the stage")))?;
    Ok(TopologyStage {
        space: stage.space.clone(),
        generators: stage.generators.iter().filter(|g| g.depth < depth).cloned().collect(),
        step: stage.step,
        dropped: 0,
    })
}

/// Hasse diagram of the generator extents, one node per distinct extent,
/// labelled by its first generator.
pub fn export_dot(stage: &TopologyStage, bound: usize) -> Result<String> {
    let u = Universe::new(&stage.space, bound)?;
    let bits = extents(&u, &stage.opens())?;
    let mut nodes: Vec<(String, FixedBitSet)> = Vec::new();
    for (g, b) in stage.generators.iter().zip(bits) {
        if !nodes.iter().any(|(_, c)| *c == b) {
            nodes.push((g.open.to_string(), b));
        }
    }
    nodes.sort_by(|a, b| a.1.count_ones(..).cmp(&b.1.count_ones(..)).then_with(|| a.0.cmp(&b.0)));
    let lt = |i: usize, j: usize| i != j && nodes[i].1.is_subset(&nodes[j].1);
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    for (i, (label, _)) in nodes.iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{}\"];", label.replace('"', "\\\"")).expect("string write");
    }
    for i in 0..nodes.len() {
        for j in 0..nodes.len() {
            if lt(i, j) && !(0..nodes.len()).any(|k| lt(i, k) && lt(k, j)) {
                writeln!(out, "  n{i} -> n{j};").expect("string write");
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorDump {
    pub expr: String,
    pub depth: String,
    pub extent_hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageDump {
    pub step: usize,
    pub generators: Vec<GeneratorDump>,
    pub dropped: usize,
}

/// JSON-ready view of a stage; extent hashes are SHA-256 over the printed extent.
pub fn dump_stage(stage: &TopologyStage, bound: usize) -> Result<StageDump> {
    let u = Universe::new(&stage.space, bound)?;
    let bits = extents(&u, &stage.opens())?;
    let generators = stage
        .generators
        .iter()
        .zip(bits)
        .map(|(g, b)| {
            let mut h = Sha256::new();
            for p in u.points_of(&b) {
                h.update(p.to_string().as_bytes());
                h.update(b"\n");
            }
            let digest = h.finalize();
            GeneratorDump {
                expr: g.open.to_string(),
                depth: g.depth.to_string(),
                extent_hash: digest.iter().map(|x| format!("{x:02x}")).collect(),
            }
        })
        .collect();
    Ok(StageDump { step: stage.step, generators, dropped: stage.dropped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> SpaceExpr {
        SpaceExpr::discrete(["a", "b"])
    }

    fn cfg(bound: usize) -> Config {
        Config { bound, ..Config::default() }
    }

    fn nats(xs: &[u64]) -> Vec<PointTerm> {
        xs.iter().map(|&n| PointTerm::Nat(n)).collect()
    }

    fn up_from(k: u64, bound: u64) -> Vec<PointTerm> {
        nats(&(k..=bound).collect::<Vec<_>>())
    }

    fn prefix(x: &str) -> OpenExpr {
        x.chars().rev().fold(OpenExpr::Whole, |acc, c| OpenExpr::letter_concat(OpenExpr::up_atom(&c.to_string()), acc))
    }

    #[test]
    fn div_stages_are_initial_segments() {
        let it = iterate(&ExpanderSpec::Div, 3, &cfg(20)).unwrap();
        for (k, stage) in it.stages.iter().enumerate() {
            let mut want = vec![vec![], up_from(0, 20)];
            want.extend((1..=k as u64).map(|i| up_from(i, 20)));
            want.sort_by_key(|v| v.iter().map(|p| format!("{p}")).collect::<Vec<_>>());
            let mut got = stage_extents(stage, 20).unwrap();
            got.sort_by_key(|v| v.iter().map(|p| format!("{p}")).collect::<Vec<_>>());
            assert_eq!(got, want, "stage {k}");
        }
        assert_eq!(it.fixed_point, None);
    }

    #[test]
    fn bad_iterator_first_stage() {
        let e = ExpanderSpec::BadIterator(ab());
        let s1 = apply(&e, &TopologyStage::trivial(e.space()), &cfg(3)).unwrap();
        let u = Universe::new(&e.space(), 3).unwrap();
        let mut got: Vec<FixedBitSet> = extents(&u, &s1.opens()).unwrap();
        let want: Vec<FixedBitSet> =
            extents(&u, &[OpenExpr::Empty, OpenExpr::Whole, prefix("a"), prefix("b")]).unwrap();
        got.sort_by_key(|b| b.ones().collect::<Vec<_>>());
        let mut want = want;
        want.sort_by_key(|b| b.ones().collect::<Vec<_>>());
        assert_eq!(got, want);
        for k in 0..4 {
            let it = iterate(&e, k, &cfg(k + 1)).unwrap();
            assert_eq!(stage_extents(it.stages.last().unwrap(), k + 1).unwrap().len(), 1 << (k + 1));
        }
    }

    #[test]
    fn reg_sub_exp_second_stage_matches_the_figure() {
        let e = ExpanderSpec::RegSubExp(ab());
        let it = iterate(&e, 2, &cfg(4)).unwrap();
        let s2 = &it.stages[2];
        let ab_open = OpenExpr::subword("ab");
        assert_eq!(s2.depth_of(&ab_open), Some(&Ordinal::from(2)));
        assert!(sets::includes(&e.space(), &ab_open, &OpenExpr::subword("b"), 4).unwrap().is_true());
        let report = check_noetherian_stage(s2, 4).unwrap();
        assert_eq!((report.size, report.width, report.height), (8, 4, 4));
        let dot = export_dot(s2, 4).unwrap();
        assert_eq!(dot.matches("->").count(), 12);
        assert_eq!(dot.matches("[label=").count(), 8);
        let down = tdown(s2, &ab_open, 4).unwrap();
        let s1 = &it.stages[1];
        assert_eq!(stage_extents(&down, 4).unwrap(), stage_extents(s1, 4).unwrap());
    }

    #[test]
    fn reg_sub_exp_reaches_a_fixed_point_at_the_bound() {
        let e = ExpanderSpec::RegSubExp(ab());
        let it = iterate(&e, 5, &cfg(3)).unwrap();
        assert!(it.fixed_point.is_some_and(|k| k <= 5));
        assert_eq!(stage_extents(&it.stages[4], 3).unwrap(), stage_extents(&it.stages[5], 3).unwrap());
    }

    #[test]
    fn stages_grow_monotonically() {
        let specs = [
            ExpanderSpec::Div,
            ExpanderSpec::BadIterator(ab()),
            ExpanderSpec::RegSubExp(ab()),
            ExpanderSpec::TreeExp(ab()),
            ExpanderSpec::reg_sub_exp_ord(ab(), Ordinal::omega().add(&Ordinal::omega())),
            ExpanderSpec::DivExpOf(FunctorExpr::words(ab())),
        ];
        for e in specs {
            let c = cfg(3);
            let it = iterate(&e, 2, &c).unwrap();
            let u = Universe::new(&e.space(), 3).unwrap();
            for w in it.stages.windows(2) {
                let next = extents(&u, &w[1].opens()).unwrap();
                for b in extents(&u, &w[0].opens()).unwrap() {
                    let mut cover = FixedBitSet::with_capacity(u.len());
                    for n in next.iter().filter(|n| n.is_subset(&b)) {
                        cover.union_with(n);
                    }
                    assert_eq!(cover, b, "{} step {}", e.name(), w[1].step);
                }
                for g in &w[1].generators {
                    let down = tdown(&w[1], &g.open, 3).unwrap();
                    let target = u.open_bits(&g.open).unwrap();
                    assert!(extents(&u, &down.opens()).unwrap().iter().all(|b| *b != target));
                }
            }
        }
    }

    #[test]
    fn goodness_examples() {
        let up = |n| OpenExpr::UpClosure(vec![PointTerm::Nat(n)]);
        assert_eq!(find_good_index(&SpaceExpr::Nat, &[up(2), up(1), up(3)], 4).unwrap(), Some(2));
        let ws = SpaceExpr::words(ab());
        let chain: Vec<OpenExpr> = (0..=20).map(|i| prefix(&format!("{}b", "a".repeat(i)))).collect();
        assert_eq!(find_good_index(&ws, &chain, 4).unwrap(), None);
        let rep = [OpenExpr::subword("ab"), OpenExpr::subword("ba"), OpenExpr::subword("ab")];
        assert_eq!(find_good_index(&ws, &rep, 4).unwrap(), Some(2));
    }

    #[test]
    fn bad_chains() {
        let c = Config { bound: 7, cap: 1 << 14, max_parts: 2 };
        let chain = find_bad_chain(&ExpanderSpec::BadIterator(ab()), 5, &c).unwrap().expect("chain");
        assert_eq!(chain.len(), 5);
        let ws = SpaceExpr::words(ab());
        for (k, link) in chain.iter().enumerate() {
            let want = OpenExpr::Union((0..=k).map(|i| prefix(&format!("{}b", "a".repeat(i)))).collect());
            assert_eq!(sets::extent_open(&ws, link, 7).unwrap(), sets::extent_open(&ws, &want, 7).unwrap());
        }
        assert_eq!(find_bad_chain(&ExpanderSpec::RegSubExp(ab()), 5, &c).unwrap(), None);
        assert_eq!(find_bad_chain(&ExpanderSpec::Div, 2, &cfg(10)).unwrap(), None);
    }

    #[test]
    fn respects_subsets_examples() {
        let rse = ExpanderSpec::RegSubExp(ab());
        let c = cfg(4);
        let s1 = apply(&rse, &TopologyStage::trivial(rse.space()), &c).unwrap();
        let h = ClosedExpr::complement_of(OpenExpr::subword("a"));
        assert!(check_respects_subsets(&rse, &s1, &h, &c).unwrap().equal);
        assert!(check_respects_subsets(&rse, &s1, &ClosedExpr::WholeC, &c).unwrap().equal);

        let bi = ExpanderSpec::BadIterator(ab());
        let s1 = apply(&bi, &TopologyStage::trivial(bi.space()), &c).unwrap();
        let h = ClosedExpr::complement_of(prefix("b"));
        let r = check_respects_subsets(&bi, &s1, &h, &c).unwrap();
        assert!(!r.equal);
        assert!(r.left_only.iter().any(|o| o.to_string().contains("(lconcat (up a) (lconcat (up b) whole))")));
        assert!(check_respects_subsets(&bi, &s1, &ClosedExpr::WholeC, &c).unwrap().equal);
        let not_closed = ClosedExpr::down(vec![PointTerm::word_of("a")]);
        assert!(matches!(check_respects_subsets(&bi, &s1, &not_closed, &c), Err(Error::NotClosed(_))));
    }

    #[test]
    fn dot_export_examples() {
        let triv = TopologyStage::trivial(SpaceExpr::Nat);
        let dot = export_dot(&triv, 5).unwrap();
        assert_eq!(dot.matches("->").count(), 1);
        let it = iterate(&ExpanderSpec::Div, 2, &cfg(5)).unwrap();
        let dot = export_dot(&it.stages[2], 5).unwrap();
        assert!(dot.contains("n0 [label=\"empty\"]"));
        assert!(dot.contains("n1 [label=\"(up 2)\"]"));
        assert!(dot.contains("n2 [label=\"(up 1)\"]"));
        assert!(dot.contains("n3 [label=\"whole\"]"));
        for edge in ["n0 -> n1", "n1 -> n2", "n2 -> n3"] {
            assert!(dot.contains(edge), "{dot}");
        }
        assert_eq!(dot.matches("->").count(), 3);
        let dump = dump_stage(&it.stages[2], 5).unwrap();
        assert_eq!(dump.generators.len(), 4);
        assert_eq!(dump.generators[0].extent_hash.len(), 64);
    }
}
