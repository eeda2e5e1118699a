//! Exact cover by dancing links, and the searches built on it: ovoids of a
//! quadrangle, local resolutions about a point, and non-triangular local
//! resolution systems (NTLRS) of a design.
//!
//! Every search runs under a [`Budget`] (node count, wall clock, cooperative
//! cancellation) and reports whether the search tree was exhausted. Results
//! are re-verified before they are returned.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canon::{canonical_form, Certificate, ColoredIncidenceGraph};
use crate::structures::{
    verify_lrs, verify_non_triangular, verify_ovoid, Design, LocalResolutionSystem, Ovoid, Quadrangle,
    TriangleWitness,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("candidate {candidate} contains {element}, outside the universe of size {universe}")]
    ElementOutOfRange { candidate: usize, element: usize, universe: usize },
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
}

/// Shared flag for cooperative cancellation.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub time: Option<Duration>,
    pub cancel: Option<CancelToken>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.max_nodes = Some(nodes);
        self
    }

    pub fn with_time(mut self, time: Duration) -> Self {
        self.time = Some(time);
        self
    }

    pub fn with_cancel(mut self, token: CancelToken) -> Self {
        self.cancel = Some(token);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The whole search tree was traversed.
    Exhausted,
    /// Stopped after reaching the solution limit.
    LimitReached,
    /// Node or time budget ran out.
    BudgetExceeded,
    Cancelled,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<T> {
    pub solutions: Vec<T>,
    pub status: SearchStatus,
    pub nodes: u64,
}

impl<T> SearchOutcome<T> {
    pub fn exhausted(&self) -> bool {
        self.status == SearchStatus::Exhausted
    }
}

/// Node accounting shared by all workers of one search.
struct Meter {
    start: Instant,
    budget: Budget,
    nodes: AtomicU64,
    stop: Mutex<Option<SearchStatus>>,
    stopped: AtomicBool,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter {
            start: Instant::now(),
            budget,
            nodes: AtomicU64::new(0),
            stop: Mutex::new(None),
            stopped: AtomicBool::new(false),
        }
    }

    fn halt(&self, status: SearchStatus) {
        let mut stop = self.stop.lock().unwrap();
        if stop.is_none() {
            *stop = Some(status);
        }
        self.stopped.store(true, Ordering::Relaxed);
    }

    /// Counts one node; false once the search must stop.
    fn tick(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget.max_nodes.is_some_and(|max| n > max) {
            self.halt(SearchStatus::BudgetExceeded);
            return false;
        }
        if n.is_multiple_of(256) {
            if self.budget.time.is_some_and(|t| self.start.elapsed() > t) {
                self.halt(SearchStatus::BudgetExceeded);
                return false;
            }
            if self.budget.cancel.as_ref().is_some_and(|c| c.is_cancelled()) {
                self.halt(SearchStatus::Cancelled);
                return false;
            }
        }
        true
    }

    fn is_stopped(&self) -> bool {
        self.stopped.load(Ordering::Relaxed)
    }

    fn finish<T>(&self, solutions: Vec<T>) -> SearchOutcome<T> {
        let status = self.stop.lock().unwrap().unwrap_or(SearchStatus::Exhausted);
        SearchOutcome { solutions, status, nodes: self.nodes.load(Ordering::Relaxed) }
    }
}

/// Universe `0..universe` and candidate subsets of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCoverInstance {
    universe: usize,
    candidates: Vec<Vec<usize>>,
}

impl ExactCoverInstance {
    pub fn new(universe: usize, candidates: Vec<Vec<usize>>) -> Result<Self, SearchError> {
        let mut candidates = candidates;
        for (i, c) in candidates.iter_mut().enumerate() {
            c.sort_unstable();
            c.dedup();
            if let Some(&element) = c.iter().find(|&&e| e >= universe) {
                return Err(SearchError::ElementOutOfRange { candidate: i, element, universe });
            }
        }
        Ok(ExactCoverInstance { universe, candidates })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn candidates(&self) -> &[Vec<usize>] {
        &self.candidates
    }
}

/// Dancing-links matrix. Node 0 is the root, nodes `1..=n` are column
/// headers, the rest are candidate entries.
struct Dlx {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    column: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
}

impl Dlx {
    fn new(inst: &ExactCoverInstance) -> Self {
        let n = inst.universe;
        let total = 1 + n + inst.candidates.iter().map(Vec::len).sum::<usize>();
        let mut d = Dlx {
            left: Vec::with_capacity(total),
            right: Vec::with_capacity(total),
            up: Vec::with_capacity(total),
            down: Vec::with_capacity(total),
            column: Vec::with_capacity(total),
            row: Vec::with_capacity(total),
            size: vec![0; n + 1],
        };
        for i in 0..=n {
            d.left.push(if i == 0 { n } else { i - 1 });
            d.right.push(if i == n { 0 } else { i + 1 });
            d.up.push(i);
            d.down.push(i);
            d.column.push(i);
            d.row.push(usize::MAX);
        }
        for (r, cand) in inst.candidates.iter().enumerate() {
            let first = d.left.len();
            for (j, &e) in cand.iter().enumerate() {
                let node = first + j;
                let col = e + 1;
                d.left.push(if j == 0 { first + cand.len() - 1 } else { node - 1 });
                d.right.push(if j + 1 == cand.len() { first } else { node + 1 });
                let last = d.up[col];
                d.up.push(last);
                d.down.push(col);
                d.down[last] = node;
                d.up[col] = node;
                d.column.push(col);
                d.row.push(r);
                d.size[col] += 1;
            }
        }
        d
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.column[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                self.size[self.column[j]] += 1;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Uncovered column with fewest rows, lowest index on ties.
    fn choose(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut c = self.right[0];
        while c != 0 {
            if best.is_none_or(|b| self.size[c] < self.size[b]) {
                best = Some(c);
            }
            c = self.right[c];
        }
        best
    }

    fn search(&mut self, partial: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: Option<usize>, meter: &Meter) {
        if !meter.tick() {
            return;
        }
        let Some(c) = self.choose() else {
            let mut sol = partial.clone();
            sol.sort_unstable();
            out.push(sol);
            if limit.is_some_and(|l| out.len() >= l) {
                meter.halt(SearchStatus::LimitReached);
            }
            return;
        };
        if self.size[c] == 0 {
            return;
        }
        self.cover(c);
        let mut r = self.down[c];
        while r != c && !meter.is_stopped() {
            partial.push(self.row[r]);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.column[j]);
                j = self.right[j];
            }
            self.search(partial, out, limit, meter);
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.column[j]);
                j = self.left[j];
            }
            partial.pop();
            r = self.down[r];
        }
        self.uncover(c);
    }
}

/// All exact covers, as sorted lists of candidate indices, up to `limit`.
pub fn solve_exact_cover(
    inst: &ExactCoverInstance,
    limit: Option<usize>,
    budget: Budget,
) -> SearchOutcome<Vec<usize>> {
    let meter = Meter::new(budget);
    let mut out = Vec::new();
    if limit == Some(0) {
        meter.halt(SearchStatus::LimitReached);
        return meter.finish(out);
    }
    Dlx::new(inst).search(&mut Vec::new(), &mut out, limit, &meter);
    meter.finish(out)
}

/// Ovoids as exact covers of the lines by point pencils.
pub fn find_ovoids(gq: &Quadrangle, limit: Option<usize>, budget: Budget) -> SearchOutcome<Ovoid> {
    let s = gq.structure();
    let candidates = (0..s.point_count()).map(|x| s.lines_through(x).to_vec()).collect();
    let inst = ExactCoverInstance::new(s.line_count(), candidates).expect("pencils are in range");
    let outcome = solve_exact_cover(&inst, limit, budget);
    let solutions = outcome
        .solutions
        .into_iter()
        .map(|points| {
            let o = Ovoid::new(points);
            verify_ovoid(gq, &o).expect("exact cover of the lines is an ovoid");
            o
        })
        .collect();
    SearchOutcome { solutions, status: outcome.status, nodes: outcome.nodes }
}

const NO_LABEL: u32 = u32::MAX;

/// Co-class relation on block instances built incrementally: edge `(b,c,p)`
/// means `b` and `c` lie in a common class about `p`. Insertions that would
/// close a triangle with unequal labels are refused.
#[derive(Debug, Clone)]
pub struct ParallelGraph {
    n: usize,
    label: Vec<u32>,
    adj: Vec<Vec<usize>>,
    log: Vec<(usize, usize)>,
}

impl ParallelGraph {
    pub fn new(instances: usize) -> Self {
        ParallelGraph { n: instances, label: vec![NO_LABEL; instances * instances], adj: vec![Vec::new(); instances], log: Vec::new() }
    }

    pub fn label(&self, b: usize, c: usize) -> Option<usize> {
        let l = self.label[b * self.n + c];
        (l != NO_LABEL).then_some(l as usize)
    }

    /// Adds edge `(b,c,p)` unless it completes a triangle whose labels are
    /// not all equal; the offending triangle is returned instead.
    pub fn insert(&mut self, b: usize, c: usize, p: usize) -> Result<(), TriangleWitness> {
        debug_assert!(self.label(b, c).is_none(), "instances {b},{c} already co-class");
        for &e in &self.adj[b] {
            if let Some(r) = self.label(c, e) {
                let q = self.label(b, e).unwrap();
                if q != p || r != p {
                    return Err(TriangleWitness { b, c, e, p, q, r });
                }
            }
        }
        self.label[b * self.n + c] = p as u32;
        self.label[c * self.n + b] = p as u32;
        self.adj[b].push(c);
        self.adj[c].push(b);
        self.log.push((b, c));
        Ok(())
    }

    /// Adds every pair of a class about `p`; all or nothing.
    pub fn insert_class(&mut self, p: usize, class: &[usize]) -> Result<(), TriangleWitness> {
        let mark = self.mark();
        for (i, &b) in class.iter().enumerate() {
            for &c in &class[..i] {
                if let Err(w) = self.insert(b, c, p) {
                    self.undo_to(mark);
                    return Err(w);
                }
            }
        }
        Ok(())
    }

    pub fn mark(&self) -> usize {
        self.log.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (b, c) = self.log.pop().unwrap();
            self.label[b * self.n + c] = NO_LABEL;
            self.label[c * self.n + b] = NO_LABEL;
            self.adj[b].pop();
            self.adj[c].pop();
        }
    }

    /// All edges `(b, c, p)` with `b < c`.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        self.log.iter().map(|&(b, c)| (b.min(c), b.max(c), self.label(b, c).unwrap())).collect()
    }
}

/// Point set as a bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Mask(Vec<u64>);

impl Mask {
    fn empty(n: usize) -> Self {
        Mask(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn disjoint(&self, other: &Mask) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    fn union_with(&mut self, other: &Mask) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a |= b);
    }

    fn subtract(&mut self, other: &Mask) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }
}

/// Solutions recorded so far by all workers of one search.
#[derive(Default)]
struct Registry {
    count: AtomicUsize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Enumerate local resolutions about one point; all identical instances
    /// are interchangeable.
    Single(usize),
    /// Full systems, point by point, with triangle pruning.
    System,
}

/// Depth-first search for local resolutions.
struct Resolver<'a> {
    design: &'a Design,
    mode: Mode,
    limit: Option<usize>,
    meter: &'a Meter,
    /// `rest[i]` is instance `i` as a point mask.
    masks: Vec<Mask>,
    through: Vec<Vec<usize>>,
    /// `pair[p][u]`: instances through `p` and `u`, in branching order.
    pair: Vec<Vec<Vec<usize>>>,
    /// Instances with identical content, ascending.
    twins: Vec<Arc<Vec<usize>>>,
    used: Vec<bool>,
    graph: ParallelGraph,
    classes: Vec<Vec<Vec<usize>>>,
    found: Vec<Vec<Vec<Vec<usize>>>>,
    registry: &'a Registry,
    has_twins: bool,
    seen: HashSet<Certificate>,
}

impl<'a> Resolver<'a> {
    fn new(
        design: &'a Design,
        mode: Mode,
        limit: Option<usize>,
        meter: &'a Meter,
        registry: &'a Registry,
        seed: u64,
    ) -> Self {
        let v = design.point_count();
        let b = design.block_count();
        let masks = design
            .blocks()
            .iter()
            .map(|blk| {
                let mut m = Mask::empty(v);
                blk.iter().for_each(|&x| m.set(x));
                m
            })
            .collect();
        let through = design.instances_through();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = (0..v)
            .map(|p| {
                (0..v)
                    .map(|u| {
                        let mut list: Vec<usize> =
                            through[p].iter().copied().filter(|&i| u != p && design.contains(i, u)).collect();
                        if seed != 0 {
                            list.shuffle(&mut rng);
                        }
                        list
                    })
                    .collect()
            })
            .collect();
        let mut groups: HashMap<&[usize], Vec<usize>> = HashMap::new();
        for (i, blk) in design.blocks().iter().enumerate() {
            groups.entry(blk.as_slice()).or_default().push(i);
        }
        let mut twins: Vec<Arc<Vec<usize>>> = (0..b).map(|_| Arc::default()).collect();
        for members in groups.into_values() {
            let shared = Arc::new(members);
            for &i in shared.iter() {
                twins[i] = Arc::clone(&shared);
            }
        }
        let has_twins = twins.iter().any(|t| t.len() > 1);
        Resolver {
            design,
            mode,
            limit,
            meter,
            masks,
            through,
            pair,
            twins,
            used: vec![false; b],
            graph: ParallelGraph::new(b),
            classes: vec![Vec::new(); v],
            found: Vec::new(),
            registry,
            has_twins,
            seen: HashSet::new(),
        }
    }

    /// Whether `inst` is interchangeable with its identical twins about `p`:
    /// none of them has been placed about an earlier point.
    fn free(&self, p: usize, inst: usize) -> bool {
        self.twins[inst].len() > 1
            && match self.mode {
                Mode::Single(_) => true,
                Mode::System => self.design.block(inst)[0] == p,
            }
    }

    /// Free twins are used lowest first.
    fn allowed(&self, p: usize, inst: usize) -> bool {
        !self.free(p, inst) || self.twins[inst].iter().take_while(|&&j| j < inst).all(|&j| self.used[j])
    }

    /// The instance that opens the next class about `p`: the lowest unused
    /// fixed instance, otherwise the lowest unused copy of the free group
    /// with the smallest leader.
    fn seed(&self, p: usize) -> Option<usize> {
        let unused = || self.through[p].iter().copied().filter(|&i| !self.used[i]);
        unused()
            .find(|&i| !self.free(p, i))
            .or_else(|| unused().min_by_key(|&i| (self.twins[i][0], i)))
    }

    /// Group leaders of a class made only of free instances, sorted.
    fn free_key(&self, p: usize, class: &[usize]) -> Option<Vec<usize>> {
        let mut key = Vec::with_capacity(class.len());
        for &i in class {
            if !self.free(p, i) {
                return None;
            }
            key.push(self.twins[i][0]);
        }
        key.sort_unstable();
        Some(key)
    }

    /// Classes made only of free instances must come in nondecreasing key
    /// order; any other order is a relabeling of one already explored.
    fn ordered(&self, p: usize) -> bool {
        let classes = &self.classes[p];
        let [.., prev, last] = classes.as_slice() else { return true };
        match (self.free_key(p, prev), self.free_key(p, last)) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        }
    }

    fn record(&mut self) {
        let snapshot = match self.mode {
            Mode::Single(p) => vec![self.classes[p].clone()],
            Mode::System => self.classes.clone(),
        };
        // Pruning about each point leaves relabelings that act on all points
        // at once; the orbit certificate removes them.
        if self.has_twins {
            let key = self.orbit_key(&snapshot);
            if !self.seen.insert(key) {
                return;
            }
        }
        self.found.push(snapshot);
        let total = self.registry.count.fetch_add(1, Ordering::Relaxed) + 1;
        if self.limit.is_some_and(|l| total >= l) {
            self.meter.halt(SearchStatus::LimitReached);
        }
    }

    /// Certificate of a (partial) system up to swapping identical instances:
    /// instances colored by group, one uniquely colored vertex per point, and
    /// each class a line through its point vertex and its instances.
    fn orbit_key(&self, classes: &[Vec<Vec<usize>>]) -> Certificate {
        let b = self.design.block_count();
        let mut colors: Vec<u32> = self.twins.iter().map(|t| t[0] as u32).collect();
        let mut lines = Vec::new();
        for (k, about) in classes.iter().enumerate() {
            colors.push((b + k) as u32);
            lines.extend(about.iter().map(|c| c.iter().copied().chain([b + k]).collect::<Vec<_>>()));
        }
        let g = ColoredIncidenceGraph::new(colors.len(), lines).with_point_colors(colors);
        canonical_form(&g).certificate
    }

    /// Resolves point `p` onward.
    fn point(&mut self, p: usize) {
        if self.meter.is_stopped() {
            return;
        }
        if self.mode == Mode::System && p == self.design.point_count() {
            return self.record();
        }
        self.next_class(p);
    }

    fn next_class(&mut self, p: usize) {
        let Some(first) = self.seed(p) else {
            let saved = std::mem::take(&mut self.used);
            self.used = vec![false; self.design.block_count()];
            match self.mode {
                Mode::Single(_) => self.record(),
                Mode::System => self.point(p + 1),
            }
            self.used = saved;
            return;
        };
        let mut covered = Mask::empty(self.design.point_count());
        self.classes[p].push(Vec::new());
        self.extend(p, first, &mut covered);
        self.classes[p].pop();
    }

    /// Places `inst` in the open class about `p` and continues.
    fn extend(&mut self, p: usize, inst: usize, covered: &mut Mask) {
        if !self.meter.tick() {
            return;
        }
        let mark = self.graph.mark();
        if self.mode == Mode::System {
            let members = self.classes[p].last().unwrap().clone();
            for &m in &members {
                if self.graph.insert(inst, m, p).is_err() {
                    self.graph.undo_to(mark);
                    return;
                }
            }
        }
        self.used[inst] = true;
        self.classes[p].last_mut().unwrap().push(inst);
        let mut added = self.masks[inst].clone();
        added.0[p / 64] &= !(1 << (p % 64));
        covered.union_with(&added);

        self.branch(p, covered);

        covered.subtract(&added);
        self.classes[p].last_mut().unwrap().pop();
        self.used[inst] = false;
        self.graph.undo_to(mark);
    }

    fn branch(&mut self, p: usize, covered: &mut Mask) {
        let v = self.design.point_count();
        let mut best: Option<(usize, usize)> = None;
        for u in 0..v {
            if u == p || covered.get(u) {
                continue;
            }
            let count = self.pair[p][u]
                .iter()
                .filter(|&&i| !self.used[i] && self.masks[i].disjoint(covered))
                .count();
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((u, count));
            }
            if count == 0 {
                return;
            }
        }
        let Some((u, _)) = best else {
            // Class complete.
            if !self.ordered(p) {
                return;
            }
            let saved = covered.clone();
            self.next_class(p);
            *covered = saved;
            return;
        };
        let options: Vec<usize> = self.pair[p][u]
            .iter()
            .copied()
            .filter(|&i| !self.used[i] && self.masks[i].disjoint(covered) && self.allowed(p, i))
            .collect();
        for inst in options {
            if self.meter.is_stopped() {
                return;
            }
            self.extend(p, inst, covered);
        }
    }
}

/// Local resolutions about `p`, each a list of classes sorted by smallest
/// instance. Identical instances are treated as interchangeable, so each
/// partition is reported once up to swapping identical instances.
pub fn find_local_resolutions(
    d: &Design,
    p: usize,
    limit: Option<usize>,
    budget: Budget,
) -> Result<SearchOutcome<Vec<Vec<usize>>>, SearchError> {
    if p >= d.point_count() {
        return Err(SearchError::PointOutOfRange(p));
    }
    let meter = Meter::new(budget);
    if limit == Some(0) {
        meter.halt(SearchStatus::LimitReached);
        return Ok(meter.finish(Vec::new()));
    }
    let registry = Registry::default();
    let mut r = Resolver::new(d, Mode::Single(p), limit, &meter, &registry, 0);
    r.point(p);
    let found = std::mem::take(&mut r.found).into_iter().map(|mut s| s.pop().unwrap()).collect();
    Ok(meter.finish(found))
}

#[derive(Debug, Clone)]
pub struct NtlrsOptions {
    pub limit: Option<usize>,
    pub budget: Budget,
    /// 0 keeps the natural branching order; other seeds shuffle it.
    pub seed: u64,
    pub threads: usize,
}

impl Default for NtlrsOptions {
    fn default() -> Self {
        NtlrsOptions { limit: None, budget: Budget::unlimited(), seed: 0, threads: 1 }
    }
}

/// Non-triangular local resolution systems, found point by point in
/// ascending order with triangle pruning after every placement. Systems that
/// differ only by a global permutation of identical instances are reported
/// once.
pub fn find_ntlrs(d: &Design, opts: &NtlrsOptions) -> SearchOutcome<LocalResolutionSystem> {
    let meter = Meter::new(opts.budget.clone());
    if opts.limit == Some(0) {
        meter.halt(SearchStatus::LimitReached);
        return meter.finish(Vec::new());
    }
    let raw = if opts.threads <= 1 {
        let registry = Registry::default();
        let mut r = Resolver::new(d, Mode::System, opts.limit, &meter, &registry, opts.seed);
        r.point(0);
        r.found
    } else {
        parallel_ntlrs(d, opts, &meter)
    };
    let solutions = raw
        .into_iter()
        .map(|classes| {
            let lrs = LocalResolutionSystem::new(classes);
            verify_lrs(d, &lrs).expect("search produced an invalid local resolution system");
            verify_non_triangular(d, &lrs).expect("search produced a triangle");
            lrs
        })
        .collect();
    meter.finish(solutions)
}

/// Classes about each point, as instance lists.
type RawSystem = Vec<Vec<Vec<usize>>>;

/// Splits the search over the local resolutions about point 0.
fn parallel_ntlrs(d: &Design, opts: &NtlrsOptions, meter: &Meter) -> Vec<RawSystem> {
    let roots = {
        // About point 0 every label is 0, so no triangle can arise yet.
        let registry = Registry::default();
        let mut r = Resolver::new(d, Mode::Single(0), None, meter, &registry, opts.seed);
        r.point(0);
        r.found.into_iter().map(|mut s| s.pop().unwrap()).collect::<Vec<_>>()
    };
    if meter.is_stopped() {
        return Vec::new();
    }
    let next = AtomicUsize::new(0);
    let registry = Registry::default();
    let results: Mutex<Vec<(usize, Vec<RawSystem>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..opts.threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= roots.len() || meter.is_stopped() {
                    break;
                }
                let mut r = Resolver::new(d, Mode::System, opts.limit, meter, &registry, opts.seed);
                let root: &Vec<Vec<usize>> = &roots[i];
                if root.iter().all(|class| r.graph.insert_class(0, class).is_ok()) {
                    r.classes[0] = root.clone();
                    r.point(1);
                }
                results.lock().unwrap().push((i, r.found));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(i, _)| *i);
    let mut out: Vec<_> = results.into_iter().flat_map(|(_, f)| f).collect();
    // Different roots can reach the same orbit; keep the first in root order.
    let keys = Resolver::new(d, Mode::System, None, meter, &registry, opts.seed);
    if keys.has_twins {
        let mut seen = HashSet::new();
        out.retain(|s| seen.insert(keys.orbit_key(s)));
    }
    if let Some(l) = opts.limit {
        out.truncate(l);
    }
    out
}
