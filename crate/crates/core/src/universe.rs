//! Universe levels and the constraint graph behind typical ambiguity.
//!
//! Every `Type` written by the user gets its own level variable. Typing emits
//! `<` and `<=` constraints between them, and a set of constraints is
//! consistent iff some assignment of naturals satisfies all of them. Levels
//! carry no arithmetic: `Type(u) : Type(v)` is encoded as a fresh `v` with
//! `u < v`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Where a level (or a constraint) came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origin {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
    /// Allocated by the kernel rather than written as `Type` in the source.
    pub synthesized: bool,
}

impl Origin {
    pub fn user(file: Arc<str>, line: u32, column: u32) -> Self {
        Origin { file, line, column, synthesized: false }
    }

    pub fn kernel(file: Arc<str>, line: u32, column: u32) -> Self {
        Origin { file, line, column, synthesized: true }
    }

    pub fn synthesized(file: &str) -> Self {
        Origin { file: file.into(), line: 0, column: 0, synthesized: true }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)?;
        if self.synthesized {
            f.write_str(" (kernel)")?;
        }
        Ok(())
    }
}

/// A universe level variable.
#[derive(Clone, Debug)]
pub struct Level {
    id: u32,
    origin: Arc<Origin>,
}

impl Level {
    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn origin(&self) -> &Arc<Origin> {
        &self.origin
    }
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Level {}

impl Hash for Level {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.id)
    }
}

/// Issues level ids in allocation order.
#[derive(Clone, Debug, Default)]
pub struct LevelAllocator {
    next: u32,
    issued: Vec<Level>,
}

impl LevelAllocator {
    /// Continues numbering after `next`.
    pub fn starting_at(next: u32) -> Self {
        LevelAllocator { next, issued: Vec::new() }
    }

    pub fn fresh(&mut self, origin: Arc<Origin>) -> Level {
        let level = Level { id: self.next, origin };
        self.next += 1;
        self.issued.push(level.clone());
        level
    }

    pub fn next_id(&self) -> u32 {
        self.next
    }

    /// Levels issued by this allocator, in order.
    pub fn issued(&self) -> &[Level] {
        &self.issued
    }

    pub fn take_issued(&mut self) -> Vec<Level> {
        std::mem::take(&mut self.issued)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    /// `<`
    Lt,
    /// `<=`
    Le,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
        }
    }
}

/// `lo rel hi`. Identity is the triple; `site` records the command that
/// produced the constraint and is ignored by comparisons.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub lo: Level,
    pub rel: Rel,
    pub hi: Level,
    pub site: Option<Arc<Origin>>,
}

impl Constraint {
    pub fn new(lo: Level, rel: Rel, hi: Level) -> Self {
        Constraint { lo, rel, hi, site: None }
    }

    pub fn lt(lo: &Level, hi: &Level) -> Self {
        Self::new(lo.clone(), Rel::Lt, hi.clone())
    }

    pub fn le(lo: &Level, hi: &Level) -> Self {
        Self::new(lo.clone(), Rel::Le, hi.clone())
    }

    pub fn with_site(mut self, site: Arc<Origin>) -> Self {
        self.site = Some(site);
        self
    }

    fn key(&self) -> (u32, Rel, u32) {
        (self.lo.id, self.rel, self.hi.id)
    }
}

impl PartialEq for Constraint {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Constraint {}

impl Hash for Constraint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Constraint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Constraint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lo, self.rel.symbol(), self.hi)
    }
}

/// Numeric witness for a satisfiable constraint set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<u32, u32>,
}

impl Assignment {
    pub fn get(&self, level: &Level) -> Option<u32> {
        self.values.get(&level.id).copied()
    }

    pub fn get_id(&self, id: u32) -> Option<u32> {
        self.values.get(&id).copied()
    }

    pub fn satisfies(&self, c: &Constraint) -> bool {
        match (self.get(&c.lo), self.get(&c.hi)) {
            (Some(lo), Some(hi)) => match c.rel {
                Rel::Lt => lo < hi,
                Rel::Le => lo <= hi,
            },
            _ => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Clone, Debug)]
pub enum Satisfiability {
    Sat(Assignment),
    /// A cycle through at least one strict constraint, listed in cycle order.
    Unsat(Vec<Constraint>),
}

impl Satisfiability {
    pub fn is_sat(&self) -> bool {
        matches!(self, Satisfiability::Sat(_))
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConstraintSet {
    levels: BTreeMap<u32, Level>,
    constraints: BTreeSet<Constraint>,
}

impl PartialEq for ConstraintSet {
    fn eq(&self, other: &Self) -> bool {
        self.constraints == other.constraints
            && self.levels.keys().eq(other.levels.keys())
    }
}

impl Eq for ConstraintSet {}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_constraints(cs: impl IntoIterator<Item = Constraint>) -> Self {
        let mut set = Self::new();
        set.add_constraints(cs);
        set
    }

    pub fn add_level(&mut self, level: &Level) {
        self.levels.entry(level.id).or_insert_with(|| level.clone());
    }

    /// Union with `delta`. Duplicates collapse; the first provenance wins.
    pub fn add_constraints(&mut self, delta: impl IntoIterator<Item = Constraint>) {
        for c in delta {
            self.add_level(&c.lo);
            self.add_level(&c.hi);
            self.constraints.insert(c);
        }
    }

    pub fn merge(&self, other: &ConstraintSet) -> ConstraintSet {
        let mut out = self.clone();
        for level in other.levels.values() {
            out.add_level(level);
        }
        out.add_constraints(other.constraints.iter().cloned());
        out
    }

    pub fn levels(&self) -> impl Iterator<Item = &Level> {
        self.levels.values()
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.constraints.contains(c)
    }

    /// Decides whether some assignment of naturals satisfies every constraint.
    ///
    /// Lax edges weigh 0 and strict edges 1. The set is unsatisfiable iff a
    /// strongly connected component contains a strict edge; otherwise the
    /// longest-path labelling of the condensation is a witness.
    pub fn satisfiable(&self) -> Satisfiability {
        solve(&self.levels, &self.constraints)
    }
}

struct Edge<'a> {
    from: usize,
    to: usize,
    strict: bool,
    constraint: &'a Constraint,
}

fn solve(levels: &BTreeMap<u32, Level>, constraints: &BTreeSet<Constraint>) -> Satisfiability {
    let ids: Vec<u32> = levels.keys().copied().collect();
    let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let n = ids.len();

    let edges: Vec<Edge<'_>> = constraints
        .iter()
        .map(|c| Edge {
            from: index[&c.lo.id],
            to: index[&c.hi.id],
            strict: c.rel == Rel::Lt,
            constraint: c,
        })
        .collect();

    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    for (e, edge) in edges.iter().enumerate() {
        out_edges[edge.from].push(e);
        in_edges[edge.to].push(e);
    }

    let (component, count) = kosaraju(n, &edges, &out_edges, &in_edges);

    // Any strict edge inside a component closes a positive cycle.
    let mut best: Option<Vec<usize>> = None;
    for (e, edge) in edges.iter().enumerate() {
        if !edge.strict || component[edge.from] != component[edge.to] {
            continue;
        }
        let path = shortest_path(edge.to, edge.from, &edges, &out_edges, &component);
        let mut cycle = vec![e];
        cycle.extend(path);
        if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
            best = Some(cycle);
        }
    }
    if let Some(cycle) = best {
        return Satisfiability::Unsat(
            cycle.into_iter().map(|e| edges[e].constraint.clone()).collect(),
        );
    }

    // Components come out of Kosaraju in topological order.
    let mut comp_out: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (e, edge) in edges.iter().enumerate() {
        if component[edge.from] != component[edge.to] {
            comp_out[component[edge.from]].push(e);
        }
    }
    let mut value = vec![0u32; count];
    for c in 0..count {
        for &e in &comp_out[c] {
            let edge = &edges[e];
            let target = component[edge.to];
            let candidate = value[c] + u32::from(edge.strict);
            if candidate > value[target] {
                value[target] = candidate;
            }
        }
    }

    let values = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, value[component[i]]))
        .collect();
    Satisfiability::Sat(Assignment { values })
}

/// Strongly connected components, numbered in topological order of the
/// condensation.
fn kosaraju(
    n: usize,
    edges: &[Edge<'_>],
    out_edges: &[Vec<usize>],
    in_edges: &[Vec<usize>],
) -> (Vec<usize>, usize) {
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut stack = vec![(start, 0usize)];
        while let Some((node, next)) = stack.last_mut() {
            if let Some(&e) = out_edges[*node].get(*next) {
                *next += 1;
                let succ = edges[e].to;
                if !visited[succ] {
                    visited[succ] = true;
                    stack.push((succ, 0));
                }
            } else {
                order.push(*node);
                stack.pop();
            }
        }
    }

    const UNSET: usize = usize::MAX;
    let mut component = vec![UNSET; n];
    let mut count = 0;
    for &root in order.iter().rev() {
        if component[root] != UNSET {
            continue;
        }
        component[root] = count;
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            for &e in &in_edges[node] {
                let pred = edges[e].from;
                if component[pred] == UNSET {
                    component[pred] = count;
                    stack.push(pred);
                }
            }
        }
        count += 1;
    }
    (component, count)
}

/// Fewest-edge path from `from` to `to` staying inside their component.
fn shortest_path(
    from: usize,
    to: usize,
    edges: &[Edge<'_>],
    out_edges: &[Vec<usize>],
    component: &[usize],
) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let comp = component[from];
    let mut via: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        for &e in &out_edges[node] {
            let succ = edges[e].to;
            if component[succ] != comp || succ == from || via.contains_key(&succ) {
                continue;
            }
            via.insert(succ, e);
            if succ == to {
                let mut path = Vec::new();
                let mut cur = to;
                while cur != from {
                    let e = via[&cur];
                    path.push(e);
                    cur = edges[e].from;
                }
                path.reverse();
                return path;
            }
            queue.push_back(succ);
        }
    }
    unreachable!("nodes in one strongly connected component are mutually reachable")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(n: usize) -> Vec<Level> {
        let mut alloc = LevelAllocator::default();
        let origin = Arc::new(Origin::synthesized("test"));
        (0..n).map(|_| alloc.fresh(origin.clone())).collect()
    }

    #[test]
    fn fresh_levels_are_distinct_and_unconstrained() {
        let l = levels(2);
        assert_ne!(l[0], l[1]);
        let mut set = ConstraintSet::new();
        set.add_level(&l[0]);
        assert!(set.constraints().all(|c| c.lo != l[0] && c.hi != l[0]));
    }

    #[test]
    fn add_is_idempotent() {
        let l = levels(2);
        let mut set = ConstraintSet::new();
        set.add_constraints([Constraint::lt(&l[0], &l[1])]);
        set.add_constraints([Constraint::lt(&l[0], &l[1])]);
        assert_eq!(set.len(), 1);
        let before = set.clone();
        set.add_constraints([]);
        assert_eq!(set, before);
    }

    #[test]
    fn single_strict_edge() {
        let l = levels(2);
        let set = ConstraintSet::from_constraints([Constraint::lt(&l[0], &l[1])]);
        match set.satisfiable() {
            Satisfiability::Sat(w) => {
                assert_eq!(w.get(&l[0]), Some(0));
                assert_eq!(w.get(&l[1]), Some(1));
            }
            Satisfiability::Unsat(_) => panic!("expected Sat"),
        }
    }

    #[test]
    fn lax_then_strict_chain_is_sat() {
        let l = levels(3);
        let set = ConstraintSet::from_constraints([
            Constraint::le(&l[0], &l[1]),
            Constraint::lt(&l[1], &l[2]),
        ]);
        assert!(set.satisfiable().is_sat());
    }

    #[test]
    fn strict_two_cycle_is_unsat_with_both_edges() {
        let l = levels(2);
        let a = Constraint::lt(&l[0], &l[1]);
        let b = Constraint::lt(&l[1], &l[0]);
        let set = ConstraintSet::from_constraints([a.clone(), b.clone()]);
        match set.satisfiable() {
            Satisfiability::Unsat(core) => {
                assert_eq!(core.len(), 2);
                assert!(core.contains(&a) && core.contains(&b));
            }
            Satisfiability::Sat(_) => panic!("expected Unsat"),
        }
    }

    #[test]
    fn lax_cycle_collapses_to_one_value() {
        let l = levels(3);
        let set = ConstraintSet::from_constraints([
            Constraint::le(&l[0], &l[1]),
            Constraint::le(&l[1], &l[0]),
            Constraint::lt(&l[1], &l[2]),
        ]);
        let Satisfiability::Sat(w) = set.satisfiable() else { panic!() };
        assert_eq!(w.get(&l[0]), w.get(&l[1]));
        assert!(w.get(&l[1]) < w.get(&l[2]));
    }

    #[test]
    fn reflexive_strict_is_reported() {
        let l = levels(1);
        let c = Constraint::lt(&l[0], &l[0]);
        let set = ConstraintSet::from_constraints([c.clone()]);
        match set.satisfiable() {
            Satisfiability::Unsat(core) => assert_eq!(core, vec![c]),
            Satisfiability::Sat(_) => panic!("u < u must be unsatisfiable"),
        }
    }

    #[test]
    fn core_is_shortest_cycle_found() {
        // long cycle 0<1<=2<=3<=0 and short cycle 0<1<=0
        let l = levels(4);
        let set = ConstraintSet::from_constraints([
            Constraint::lt(&l[0], &l[1]),
            Constraint::le(&l[1], &l[2]),
            Constraint::le(&l[2], &l[3]),
            Constraint::le(&l[3], &l[0]),
            Constraint::le(&l[1], &l[0]),
        ]);
        let Satisfiability::Unsat(core) = set.satisfiable() else { panic!() };
        assert_eq!(core.len(), 2);
    }

    #[test]
    fn merge_identity_and_chain() {
        let l = levels(3);
        let s = ConstraintSet::from_constraints([Constraint::lt(&l[0], &l[1])]);
        assert_eq!(ConstraintSet::new().merge(&s), s);
        let t = ConstraintSet::from_constraints([Constraint::lt(&l[1], &l[2])]);
        let Satisfiability::Sat(w) = s.merge(&t).satisfiable() else { panic!() };
        assert_eq!((w.get(&l[0]), w.get(&l[1]), w.get(&l[2])), (Some(0), Some(1), Some(2)));
    }

    #[test]
    fn merged_halves_can_conflict() {
        let l = levels(2);
        let a = ConstraintSet::from_constraints([Constraint::lt(&l[0], &l[1])]);
        let b = ConstraintSet::from_constraints([Constraint::lt(&l[1], &l[0])]);
        assert!(a.satisfiable().is_sat());
        assert!(b.satisfiable().is_sat());
        assert!(!a.merge(&b).satisfiable().is_sat());
    }
}
