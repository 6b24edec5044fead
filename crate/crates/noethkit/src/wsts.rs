//! Monotone transition systems over well-quasi-ordered states: the
//! three-counter program as a bad-sequence generator, and backward
//! coverability over upward-closed sets.
//!
//! States are points: VAS markings are right-nested pairs of naturals and
//! lossy channel states are `(pair location word)`.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expanders;
use crate::sets::OpenExpr;
use crate::space::{self, FiniteQo, PointTerm, SpaceExpr};

/// Default limit on basis insertions.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgRule {
    L,
    R,
}

/// Rule schedule for the three-counter program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    Always(AlgRule),
    /// Alternate, starting with the given rule.
    Alternate(AlgRule),
    /// Repeat a fixed pattern.
    Cycle(Vec<AlgRule>),
    Random(u64),
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rule = |c: char| match c {
            'l' => Ok(AlgRule::L),
            'r' => Ok(AlgRule::R),
            _ => Err(Error::Parse { line: 1, col: 1, message: format!("bad rule {c:?} in schedule") }),
        };
        match s {
            "l" => Ok(Schedule::Always(AlgRule::L)),
            "r" => Ok(Schedule::Always(AlgRule::R)),
            "alt" | "lr" => Ok(Schedule::Alternate(AlgRule::L)),
            "rl" => Ok(Schedule::Alternate(AlgRule::R)),
            _ => {
                if let Some(seed) = s.strip_prefix("random:") {
                    let seed = seed.parse().map_err(|_| Error::Parse {
                        line: 1,
                        col: 8,
                        message: format!("bad seed {seed:?}"),
                    })?;
                    return Ok(Schedule::Random(seed));
                }
                if let Some(pat) = s.strip_prefix("cycle:") {
                    let rules = pat.chars().map(rule).collect::<Result<Vec<_>>>()?;
                    if rules.is_empty() {
                        return Err(Error::Parse { line: 1, col: 7, message: "empty cycle".into() });
                    }
                    return Ok(Schedule::Cycle(rules));
                }
                Err(Error::Parse { line: 1, col: 1, message: format!("unknown schedule {s:?}") })
            }
        }
    }
}

fn alg_step(s: [u64; 3], rule: AlgRule) -> Option<[u64; 3]> {
    let [a, b, c] = s;
    match rule {
        AlgRule::L => Some([a.checked_sub(1)?, b, c.checked_mul(2)?]),
        AlgRule::R => Some([c.checked_mul(2)?, b.checked_sub(1)?, 1]),
    }
}

/// Runs the three-counter program until a counter would become negative.
/// The trace is checked to be a bad sequence as it grows.
pub fn run_alg(start: [u64; 3], schedule: &Schedule, fuel: u64) -> Result<Vec<[u64; 3]>> {
    let mut rng = match schedule {
        Schedule::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut trace = vec![start];
    for k in 0.. {
        if k >= fuel {
            return Err(Error::Fuel(fuel));
        }
        let rule = match schedule {
            Schedule::Always(r) => *r,
            Schedule::Alternate(first) => {
                if k % 2 == 0 {
                    *first
                } else if *first == AlgRule::L {
                    AlgRule::R
                } else {
                    AlgRule::L
                }
            }
            Schedule::Cycle(rules) => rules[k as usize % rules.len()],
            Schedule::Random(_) => {
                if rng.as_mut().expect("seeded").random_bool(0.5) {
                    AlgRule::L
                } else {
                    AlgRule::R
                }
            }
        };
        let last = *trace.last().expect("nonempty");
        if last[2] > u64::MAX / 2 {
            return Err(Error::Invalid(format!("counter overflow after {last:?}")));
        }
        let Some(next) = alg_step(last, rule) else {
            break;
        };
        if let Some(i) = trace.iter().position(|x| x.iter().zip(&next).all(|(p, q)| p <= q)) {
            return Err(Error::Invalid(format!("trace is good: state {i} is below {next:?}")));
        }
        trace.push(next);
    }
    Ok(trace)
}

/// Whether no earlier state is componentwise below a later one.
pub fn is_bad(trace: &[[u64; 3]]) -> bool {
    (0..trace.len()).all(|j| (0..j).all(|i| !trace[i].iter().zip(&trace[j]).all(|(p, q)| p <= q)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VasRule {
    /// Componentwise lower bound for firing (besides non-negativity of the result).
    #[serde(default)]
    pub guard: Vec<u64>,
    pub delta: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelOp {
    Send(String),
    Recv(String),
    Nop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelRule {
    pub from: String,
    pub to: String,
    pub op: ChannelOp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SystemSpec {
    Vas { places: usize, rules: Vec<VasRule> },
    /// One lossy FIFO channel. A step drops any messages and then fires a rule
    /// (or does nothing else).
    Lossy { locations: Vec<String>, alphabet: Vec<String>, rules: Vec<ChannelRule> },
    /// The three-counter program with rules `l` and `r`.
    Alg,
}

pub fn nat_vector(v: &[u64]) -> PointTerm {
    match v {
        [] => PointTerm::Nat(0),
        [x] => PointTerm::Nat(*x),
        [x, rest @ ..] => PointTerm::pair(PointTerm::Nat(*x), nat_vector(rest)),
    }
}

pub fn vector_of(p: &PointTerm, n: usize) -> Result<Vec<u64>> {
    match (p, n) {
        (PointTerm::Nat(x), 1) => Ok(vec![*x]),
        (PointTerm::Pair(a, rest), n) if n > 1 => {
            let mut out = vector_of(a, 1)?;
            out.extend(vector_of(rest, n - 1)?);
            Ok(out)
        }
        _ => Err(Error::Type(format!("{p} is not a vector of {n} naturals"))),
    }
}

fn channel_state(loc: &str, word: &[String]) -> PointTerm {
    PointTerm::pair(PointTerm::atom(loc), PointTerm::Word(word.iter().map(|x| PointTerm::atom(x)).collect()))
}

fn channel_parts(p: &PointTerm) -> Result<(String, Vec<String>)> {
    let err = || Error::Type(format!("{p} is not a channel state"));
    let PointTerm::Pair(l, w) = p else { return Err(err()) };
    let (PointTerm::Atom(l), PointTerm::Word(w)) = (&**l, &**w) else { return Err(err()) };
    let word = w
        .iter()
        .map(|x| match x {
            PointTerm::Atom(a) => Ok(a.clone()),
            _ => Err(err()),
        })
        .collect::<Result<_>>()?;
    Ok((l.clone(), word))
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SystemSpec::Vas { places, rules } => {
                if *places == 0 {
                    return Err(Error::Invalid("a VAS needs at least one place".into()));
                }
                for r in rules {
                    if r.delta.len() != *places || !(r.guard.is_empty() || r.guard.len() == *places) {
                        return Err(Error::Invalid(format!("rule dimensions differ from {places} places")));
                    }
                }
                Ok(())
            }
            SystemSpec::Lossy { locations, alphabet, rules } => {
                for r in rules {
                    for l in [&r.from, &r.to] {
                        if !locations.contains(l) {
                            return Err(Error::Invalid(format!("unknown location {l}")));
                        }
                    }
                    if let ChannelOp::Send(x) | ChannelOp::Recv(x) = &r.op {
                        if !alphabet.contains(x) {
                            return Err(Error::Invalid(format!("unknown message {x}")));
                        }
                    }
                }
                Ok(())
            }
            SystemSpec::Alg => Ok(()),
        }
    }

    pub fn state_space(&self) -> SpaceExpr {
        match self {
            SystemSpec::Vas { places, .. } => nat_space(*places),
            SystemSpec::Alg => nat_space(3),
            SystemSpec::Lossy { locations, alphabet, .. } => SpaceExpr::product(
                SpaceExpr::Fin(FiniteQo::discrete(locations.clone())),
                SpaceExpr::words(SpaceExpr::Fin(FiniteQo::discrete(alphabet.clone()))),
            ),
        }
    }

    fn dims(&self) -> usize {
        match self {
            SystemSpec::Vas { places, .. } => *places,
            _ => 3,
        }
    }

    /// One-step successors.
    pub fn successors(&self, p: &PointTerm) -> Result<Vec<PointTerm>> {
        match self {
            SystemSpec::Vas { rules, places } => {
                let x = vector_of(p, *places)?;
                let mut out = Vec::new();
                for r in rules {
                    if !r.guard.is_empty() && x.iter().zip(&r.guard).any(|(a, g)| a < g) {
                        continue;
                    }
                    let next: Option<Vec<u64>> =
                        x.iter().zip(&r.delta).map(|(&a, &d)| a.checked_add_signed(d)).collect();
                    if let Some(n) = next {
                        out.push(nat_vector(&n));
                    }
                }
                Ok(out)
            }
            SystemSpec::Alg => {
                let x = vector_of(p, 3)?;
                let s = [x[0], x[1], x[2]];
                Ok([AlgRule::L, AlgRule::R].into_iter().filter_map(|r| alg_step(s, r)).map(|n| nat_vector(&n)).collect())
            }
            SystemSpec::Lossy { rules, .. } => {
                let (loc, w) = channel_parts(p)?;
                let mut out = Vec::new();
                for w in subwords(&w) {
                    for r in rules.iter().filter(|r| r.from == loc) {
                        match &r.op {
                            ChannelOp::Nop => out.push(channel_state(&r.to, &w)),
                            ChannelOp::Send(x) => {
                                let mut v = w.clone();
                                v.push(x.clone());
                                out.push(channel_state(&r.to, &v));
                            }
                            ChannelOp::Recv(x) => {
                                if w.first() == Some(x) {
                                    out.push(channel_state(&r.to, &w[1..]));
                                }
                            }
                        }
                    }
                    out.push(channel_state(&loc, &w));
                }
                out.retain(|q| q != p);
                out.sort_by_key(|q| q.to_string());
                out.dedup();
                Ok(out)
            }
        }
    }
}

/// Distinct subwords, the word itself included.
fn subwords(w: &[String]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![vec![]];
    for x in w {
        let ext: Vec<Vec<String>> = out
            .iter()
            .map(|v| {
                let mut v = v.clone();
                v.push(x.clone());
                v
            })
            .collect();
        out.extend(ext);
    }
    out.sort();
    out.dedup();
    out
}

fn nat_space(n: usize) -> SpaceExpr {
    if n <= 1 {
        SpaceExpr::Nat
    } else {
        SpaceExpr::product(SpaceExpr::Nat, nat_space(n - 1))
    }
}

/// `↑basis` for a finite basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpwardSet {
    pub basis: Vec<PointTerm>,
}

impl UpwardSet {
    /// Minimizes to an antichain, keeping the first of equivalent points.
    pub fn new(space: &SpaceExpr, points: Vec<PointTerm>) -> Self {
        let mut basis: Vec<PointTerm> = Vec::new();
        for p in points {
            if basis.iter().any(|b| space::leq(space, b, &p)) {
                continue;
            }
            basis.retain(|b| !space::leq(space, &p, b));
            basis.push(p);
        }
        UpwardSet { basis }
    }

    pub fn contains(&self, space: &SpaceExpr, p: &PointTerm) -> bool {
        self.basis.iter().any(|b| space::leq(space, b, p))
    }

    pub fn to_open(&self) -> OpenExpr {
        OpenExpr::UpClosure(self.basis.clone()).normalize()
    }
}

/// Minimal basis of the one-step predecessors of `↑target`.
pub fn pred_basis(sys: &SystemSpec, target: &UpwardSet) -> Result<UpwardSet> {
    let space = sys.state_space();
    let mut out = Vec::new();
    match sys {
        SystemSpec::Vas { places, rules } => {
            for b in &target.basis {
                let t = vector_of(b, *places)?;
                for r in rules {
                    let x: Vec<u64> = (0..*places)
                        .map(|i| {
                            let need = (t[i] as i64 - r.delta[i]).max(-r.delta[i]).max(0) as u64;
                            need.max(r.guard.get(i).copied().unwrap_or(0))
                        })
                        .collect();
                    out.push(nat_vector(&x));
                }
            }
        }
        SystemSpec::Alg => {
            for b in &target.basis {
                let t = vector_of(b, 3)?;
                out.push(nat_vector(&[t[0] + 1, t[1], t[2].div_ceil(2)]));
                if t[2] <= 1 {
                    out.push(nat_vector(&[0, t[1] + 1, t[0].div_ceil(2)]));
                }
            }
        }
        SystemSpec::Lossy { rules, .. } => {
            for b in &target.basis {
                let (loc, w) = channel_parts(b)?;
                out.push(b.clone());
                for r in rules.iter().filter(|r| r.to == loc) {
                    let pre = match &r.op {
                        ChannelOp::Nop => w.clone(),
                        ChannelOp::Send(x) => {
                            if w.last() == Some(x) {
                                w[..w.len() - 1].to_vec()
                            } else {
                                w.clone()
                            }
                        }
                        ChannelOp::Recv(x) => {
                            let mut v = vec![x.clone()];
                            v.extend(w.iter().cloned());
                            v
                        }
                    };
                    out.push(channel_state(&r.from, &pre));
                }
            }
        }
    }
    Ok(UpwardSet::new(&space, out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Coverage {
    /// `init` reaches `↑target` in `witness` steps (the backward distance).
    Coverable { witness: usize, steps: usize },
    /// `↑invariant` is closed under predecessors, contains the target and misses `init`.
    Uncoverable { invariant: UpwardSet, steps: usize },
}

/// Saturates predecessor bases from `target` until `init` is covered or the
/// basis stops growing. Saturation is certified by the goodness oracle on
/// the sequence of cumulative upward closures.
pub fn backward_coverability(
    sys: &SystemSpec,
    init: &PointTerm,
    target: &UpwardSet,
    fuel: u64,
) -> Result<Coverage> {
    sys.validate()?;
    let space = sys.state_space();
    space::point_leq(&space, init, init)?;
    let mut basis = UpwardSet::new(&space, target.basis.clone());
    let mut history = vec![basis.to_open()];
    let mut inserted = 0u64;
    for step in 0.. {
        if basis.contains(&space, init) {
            return Ok(Coverage::Coverable { witness: step, steps: step });
        }
        let pre = pred_basis(sys, &basis)?;
        let fresh: Vec<PointTerm> = pre.basis.into_iter().filter(|p| !basis.contains(&space, p)).collect();
        if fresh.is_empty() {
            history.push(basis.to_open());
            let good = expanders::find_good_index(&space, &history, 0)?;
            if good != Some(history.len() - 1) {
                return Err(Error::Invalid(format!("saturation not certified: good index {good:?}")));
            }
            return Ok(Coverage::Uncoverable { invariant: basis, steps: step });
        }
        inserted += fresh.len() as u64;
        if inserted > fuel {
            return Err(Error::Fuel(fuel));
        }
        let mut all = basis.basis.clone();
        all.extend(fresh);
        basis = UpwardSet::new(&space, all);
        history.push(basis.to_open());
    }
    unreachable!("the saturation loop returns")
}

/// Breadth-first forward search over states whose naturals are at most
/// `max_value` and whose channel words have length at most `max_len`.
/// Returns the length of a shortest covering run.
pub fn forward_coverable(
    sys: &SystemSpec,
    init: &PointTerm,
    target: &UpwardSet,
    max_value: u64,
    max_len: usize,
) -> Result<Option<usize>> {
    let space = sys.state_space();
    let fits = |p: &PointTerm| -> Result<bool> {
        Ok(match sys {
            SystemSpec::Lossy { .. } => channel_parts(p)?.1.len() <= max_len,
            _ => vector_of(p, sys.dims())?.iter().all(|&x| x <= max_value),
        })
    };
    let mut seen = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([(init.clone(), 0usize)]);
    while let Some((p, d)) = queue.pop_front() {
        if target.contains(&space, &p) {
            return Ok(Some(d));
        }
        for q in sys.successors(&p)? {
            if fits(&q)? && seen.insert(q.clone()) {
                queue.push_back((q, d + 1));
            }
        }
    }
    Ok(None)
}

/// Exhaustive monotonicity check on the states of size at most `bound`:
/// `x ≤ y` and `x → x'` imply `y → y' ≥ x'` for some `y'`.
pub fn check_monotone(sys: &SystemSpec, bound: usize) -> Result<bool> {
    let space = sys.state_space();
    let states = space::enumerate_points(&space, bound)?;
    for x in &states {
        let xs = sys.successors(x)?;
        for y in states.iter().filter(|y| space::leq(&space, x, y)) {
            let ys = sys.successors(y)?;
            if !xs.iter().all(|x1| ys.iter().any(|y1| space::leq(&space, x1, y1))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A system file: the system plus an initial state and a target basis, with
/// states written as in the expression language.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(flatten)]
    pub system: SystemSpec,
    pub init: serde_json::Value,
    pub target: Vec<serde_json::Value>,
}

impl SystemFile {
    /// States are integer arrays for counter systems and `{"loc", "word"}`
    /// objects (word as an array of messages) for channel systems.
    pub fn state(&self, v: &serde_json::Value) -> Result<PointTerm> {
        let bad = || Error::Invalid(format!("bad state {v}"));
        match &self.system {
            SystemSpec::Lossy { .. } => {
                let loc = v.get("loc").and_then(|l| l.as_str()).ok_or_else(bad)?;
                let word: Vec<String> = v
                    .get("word")
                    .and_then(|w| w.as_array())
                    .ok_or_else(bad)?
                    .iter()
                    .map(|x| x.as_str().map(str::to_string).ok_or_else(bad))
                    .collect::<Result<_>>()?;
                Ok(channel_state(loc, &word))
            }
            sys => {
                let xs: Vec<u64> = serde_json::from_value(v.clone()).map_err(|_| bad())?;
                if xs.len() != sys.dims() {
                    return Err(bad());
                }
                Ok(nat_vector(&xs))
            }
        }
    }

    pub fn init_state(&self) -> Result<PointTerm> {
        self.state(&self.init)
    }

    pub fn target_set(&self) -> Result<UpwardSet> {
        let pts = self.target.iter().map(|v| self.state(v)).collect::<Result<Vec<_>>>()?;
        Ok(UpwardSet::new(&self.system.state_space(), pts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vas(places: usize, rules: &[&[i64]]) -> SystemSpec {
        SystemSpec::Vas {
            places,
            rules: rules.iter().map(|d| VasRule { guard: vec![], delta: d.to_vec() }).collect(),
        }
    }

    #[test]
    fn alg_examples() {
        assert_eq!(run_alg([0, 0, 0], &Schedule::Always(AlgRule::L), 100).unwrap(), vec![[0, 0, 0]]);
        let trace = run_alg([2, 1, 1], &Schedule::Alternate(AlgRule::L), 100).unwrap();
        assert_eq!(trace, vec![[2, 1, 1], [1, 1, 2], [4, 0, 1], [3, 0, 2]]);
        for seed in 0..5 {
            let t = run_alg([3, 3, 3], &Schedule::Random(seed), 1 << 20).unwrap();
            assert!(is_bad(&t));
        }
        assert_eq!("cycle:llr".parse::<Schedule>().unwrap(), Schedule::Cycle(vec![AlgRule::L, AlgRule::L, AlgRule::R]));
        assert!("cycle:x".parse::<Schedule>().unwrap_err().is_parse());
    }

    #[test]
    fn vas_predecessors() {
        let sys = vas(3, &[&[-1, 0, 2]]);
        let target = UpwardSet { basis: vec![nat_vector(&[0, 0, 1])] };
        let pre = pred_basis(&sys, &target).unwrap();
        assert_eq!(pre.basis, vec![nat_vector(&[1, 0, 0])]);
        let space = sys.state_space();
        for x in space::enumerate_points(&space, 4).unwrap() {
            let one_step = sys.successors(&x).unwrap().iter().any(|y| target.contains(&space, y));
            assert_eq!(pre.contains(&space, &x), one_step, "{x}");
        }
    }

    #[test]
    fn coverability_examples() {
        let sys = vas(2, &[&[-1, 1]]);
        let target = UpwardSet { basis: vec![nat_vector(&[0, 1])] };
        assert_eq!(
            backward_coverability(&sys, &nat_vector(&[1, 0]), &target, DEFAULT_FUEL).unwrap(),
            Coverage::Coverable { witness: 1, steps: 1 }
        );
        let at_init = UpwardSet { basis: vec![nat_vector(&[1, 0])] };
        assert!(matches!(
            backward_coverability(&sys, &nat_vector(&[1, 0]), &at_init, DEFAULT_FUEL).unwrap(),
            Coverage::Coverable { witness: 0, .. }
        ));
        let far = UpwardSet { basis: vec![nat_vector(&[0, 2])] };
        match backward_coverability(&sys, &nat_vector(&[1, 0]), &far, DEFAULT_FUEL).unwrap() {
            Coverage::Uncoverable { invariant, .. } => {
                assert!(!invariant.contains(&sys.state_space(), &nat_vector(&[1, 0])));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lossy_channel_predecessors() {
        let sys = SystemSpec::Lossy {
            locations: vec!["p".into(), "q".into()],
            alphabet: vec!["x".into(), "y".into()],
            rules: vec![
                ChannelRule { from: "p".into(), to: "q".into(), op: ChannelOp::Recv("x".into()) },
                ChannelRule { from: "q".into(), to: "p".into(), op: ChannelOp::Send("y".into()) },
            ],
        };
        assert!(check_monotone(&sys, 3).unwrap());
        let w = |l: &str, s: &str| channel_state(l, &s.chars().map(|c| c.to_string()).collect::<Vec<_>>());
        let target = UpwardSet { basis: vec![w("q", "y")] };
        let pre = pred_basis(&sys, &target).unwrap();
        assert!(pre.contains(&sys.state_space(), &w("p", "xy")));
        let space = sys.state_space();
        for x in space::enumerate_points(&space, 3).unwrap() {
            let one_step = sys.successors(&x).unwrap().iter().any(|y| target.contains(&space, y));
            if one_step {
                assert!(pre.contains(&space, &x), "{x}");
            }
        }
        let c = backward_coverability(&sys, &w("p", "x"), &UpwardSet { basis: vec![w("p", "y")] }, DEFAULT_FUEL);
        assert!(matches!(c.unwrap(), Coverage::Coverable { witness: 2, .. }));
        assert_eq!(forward_coverable(&sys, &w("p", "x"), &UpwardSet { basis: vec![w("p", "y")] }, 0, 3).unwrap(), Some(2));
    }

    #[test]
    fn alg_system_is_monotone_and_exact() {
        let sys = SystemSpec::Alg;
        assert!(check_monotone(&sys, 3).unwrap());
        let space = sys.state_space();
        let target = UpwardSet { basis: vec![nat_vector(&[3, 0, 2]), nat_vector(&[0, 2, 1])] };
        let pre = pred_basis(&sys, &target).unwrap();
        for x in space::enumerate_points(&space, 5).unwrap() {
            let one_step = sys.successors(&x).unwrap().iter().any(|y| target.contains(&space, y));
            assert_eq!(pre.contains(&space, &x), one_step, "{x}");
        }
    }
}
