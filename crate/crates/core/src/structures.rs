//! Incidence structures, block designs, ovoids and local resolution systems,
//! together with verifiers for each of their defining properties.
//!
//! Block instances are identified by their position in a [`Design`]; equal
//! blocks may repeat and are still distinct instances.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("line {line} contains point {point} but there are only {point_count} points")]
    LinePointOutOfRange { line: usize, point: usize, point_count: usize },
    #[error("line {0} is empty")]
    EmptyLine(usize),
    #[error("line {line} repeats point {point}")]
    RepeatedPoint { line: usize, point: usize },
    #[error("design has no blocks")]
    NoBlocks,
    #[error("block {block} contains point {point} but there are only {v} points")]
    BlockPointOutOfRange { block: usize, point: usize, v: usize },
    #[error("block {block} repeats point {point}")]
    RepeatedBlockPoint { block: usize, point: usize },
    #[error("block {block} has size {size}, expected {expected}")]
    NonUniformBlocks { block: usize, size: usize, expected: usize },
}

/// Points `0..point_count` and lines given as sorted point sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncidenceStructure {
    point_count: usize,
    lines: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    pub fn new(point_count: usize, lines: Vec<Vec<usize>>) -> Result<Self, StructureError> {
        let mut lines = lines;
        for (i, line) in lines.iter_mut().enumerate() {
            if line.is_empty() {
                return Err(StructureError::EmptyLine(i));
            }
            line.sort_unstable();
            if let Some(&point) = line.iter().find(|&&x| x >= point_count) {
                return Err(StructureError::LinePointOutOfRange { line: i, point, point_count });
            }
            if let Some(w) = line.windows(2).find(|w| w[0] == w[1]) {
                return Err(StructureError::RepeatedPoint { line: i, point: w[0] });
            }
        }
        let mut point_lines = vec![Vec::new(); point_count];
        for (i, line) in lines.iter().enumerate() {
            for &x in line {
                point_lines[x].push(i);
            }
        }
        Ok(IncidenceStructure { point_count, lines, point_lines })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn line(&self, l: usize) -> &[usize] {
        &self.lines[l]
    }

    /// Lines through `x`, ascending.
    pub fn lines_through(&self, x: usize) -> &[usize] {
        &self.point_lines[x]
    }

    pub fn is_incident(&self, x: usize, l: usize) -> bool {
        self.lines[l].binary_search(&x).is_ok()
    }

    /// The structure with points and lines exchanged: point `i` of the dual is
    /// line `i` of `self`, and line `j` of the dual is the pencil of point `j`.
    pub fn dual(&self) -> IncidenceStructure {
        IncidenceStructure {
            point_count: self.lines.len(),
            lines: self.point_lines.clone(),
            point_lines: self.lines.clone(),
        }
    }

    /// Relabels points by `perm[old] = new` and reorders lines so that old
    /// line `l` becomes new line `line_perm[l]`.
    pub fn relabel(&self, perm: &[usize], line_perm: &[usize]) -> IncidenceStructure {
        let mut lines = vec![Vec::new(); self.lines.len()];
        for (l, line) in self.lines.iter().enumerate() {
            lines[line_perm[l]] = line.iter().map(|&x| perm[x]).collect();
        }
        IncidenceStructure::new(self.point_count, lines).expect("relabeling preserves validity")
    }
}

/// Free function form of [`IncidenceStructure::dual`].
pub fn dual(s: &IncidenceStructure) -> IncidenceStructure {
    s.dual()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GqParams {
    pub s: usize,
    pub t: usize,
}

impl GqParams {
    pub fn point_count(&self) -> usize {
        (1 + self.s) * (1 + self.s * self.t)
    }

    pub fn line_count(&self) -> usize {
        (1 + self.t) * (1 + self.s * self.t)
    }

    pub fn ovoid_size(&self) -> usize {
        1 + self.s * self.t
    }
}

impl fmt::Display for GqParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.t)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GqError {
    #[error("structure has no points or no lines")]
    Empty,
    #[error("axiom (i): point {point} lies on {found} lines, point 0 on {expected}")]
    PointDegree { point: usize, expected: usize, found: usize },
    #[error("axiom (i): points on a single line only, t = 0")]
    NoSecondLine,
    #[error("axiom (i): points {x} and {y} share lines {lines:?}")]
    TwoCommonLines { x: usize, y: usize, lines: (usize, usize) },
    #[error("axiom (ii): line {line} has {found} points, line 0 has {expected}")]
    LineSize { line: usize, expected: usize, found: usize },
    #[error("axiom (ii): lines have a single point, s = 0")]
    NoSecondPoint,
    #[error("axiom (ii): lines {l} and {m} share points {points:?}")]
    TwoCommonPoints { l: usize, m: usize, points: (usize, usize) },
    #[error("axiom (iii): point {point} off line {line} has {connections} connecting pairs")]
    Projection { point: usize, line: usize, connections: usize },
    #[error("counts: {points} points and {lines} lines do not match (s,t) = {params}")]
    Counts { points: usize, lines: usize, params: GqParams },
}

impl GqError {
    /// The axiom number the error refers to (1, 2 or 3), or 0 for shape errors.
    pub fn axiom(&self) -> u8 {
        match self {
            GqError::PointDegree { .. } | GqError::NoSecondLine | GqError::TwoCommonLines { .. } => 1,
            GqError::LineSize { .. } | GqError::NoSecondPoint | GqError::TwoCommonPoints { .. } => 2,
            GqError::Projection { .. } => 3,
            GqError::Empty | GqError::Counts { .. } => 0,
        }
    }
}

/// Checks the three generalized quadrangle axioms in order and returns `(s,t)`.
pub fn verify_gq(s: &IncidenceStructure) -> Result<GqParams, GqError> {
    let n = s.point_count();
    if n == 0 || s.line_count() == 0 {
        return Err(GqError::Empty);
    }

    // (i)
    let deg = s.lines_through(0).len();
    for x in 0..n {
        let found = s.lines_through(x).len();
        if found != deg {
            return Err(GqError::PointDegree { point: x, expected: deg, found });
        }
    }
    if deg < 2 {
        return Err(GqError::NoSecondLine);
    }
    let mut shared: Vec<Option<usize>> = vec![None; n];
    for x in 0..n {
        shared.iter_mut().for_each(|c| *c = None);
        for &l in s.lines_through(x) {
            for &y in s.line(l) {
                if y == x {
                    continue;
                }
                if let Some(first) = shared[y] {
                    return Err(GqError::TwoCommonLines { x, y, lines: (first, l) });
                }
                shared[y] = Some(l);
            }
        }
    }

    // (ii)
    let size = s.line(0).len();
    for (l, line) in s.lines().iter().enumerate() {
        if line.len() != size {
            return Err(GqError::LineSize { line: l, expected: size, found: line.len() });
        }
    }
    if size < 2 {
        return Err(GqError::NoSecondPoint);
    }
    let mut shared: Vec<Option<usize>> = vec![None; s.line_count()];
    for l in 0..s.line_count() {
        shared.iter_mut().for_each(|c| *c = None);
        for &x in s.line(l) {
            for &m in s.lines_through(x) {
                if m == l {
                    continue;
                }
                if let Some(first) = shared[m] {
                    return Err(GqError::TwoCommonPoints { l, m, points: (first, x) });
                }
                shared[m] = Some(x);
            }
        }
    }

    // (iii): for x off L, the connecting pairs (y, M) correspond to the points
    // y of L collinear with x.
    let collinear = collinearity(s);
    for x in 0..n {
        for (l, line) in s.lines().iter().enumerate() {
            if line.binary_search(&x).is_ok() {
                continue;
            }
            let connections = line.iter().filter(|&&y| collinear[x * n + y]).count();
            if connections != 1 {
                return Err(GqError::Projection { point: x, line: l, connections });
            }
        }
    }

    let params = GqParams { s: size - 1, t: deg - 1 };
    if params.point_count() != n || params.line_count() != s.line_count() {
        return Err(GqError::Counts { points: n, lines: s.line_count(), params });
    }
    Ok(params)
}

/// Dense collinearity relation; `x ~ x` is false.
fn collinearity(s: &IncidenceStructure) -> Vec<bool> {
    let n = s.point_count();
    let mut m = vec![false; n * n];
    for line in s.lines() {
        for &x in line {
            for &y in line {
                if x != y {
                    m[x * n + y] = true;
                }
            }
        }
    }
    m
}

/// An incidence structure that has passed [`verify_gq`], with its collinearity
/// relation cached.
#[derive(Debug, Clone)]
pub struct Quadrangle {
    inc: IncidenceStructure,
    params: GqParams,
    collinear: Vec<bool>,
}

impl Quadrangle {
    pub fn new(inc: IncidenceStructure) -> Result<Self, GqError> {
        let params = verify_gq(&inc)?;
        let collinear = collinearity(&inc);
        Ok(Quadrangle { inc, params, collinear })
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.inc
    }

    pub fn into_structure(self) -> IncidenceStructure {
        self.inc
    }

    pub fn params(&self) -> GqParams {
        self.params
    }

    pub fn point_count(&self) -> usize {
        self.inc.point_count()
    }

    /// `x ~ y`: distinct points on a common line.
    pub fn collinear(&self, x: usize, y: usize) -> bool {
        self.collinear[x * self.inc.point_count() + y]
    }

    /// The line through two distinct collinear points.
    pub fn joining_line(&self, x: usize, y: usize) -> Option<usize> {
        let ly = self.inc.lines_through(y);
        self.inc.lines_through(x).iter().copied().find(|l| ly.contains(l))
    }
}

/// Sorted set of points of a quadrangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ovoid(Vec<usize>);

impl Ovoid {
    pub fn new(mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        points.dedup();
        Ovoid(points)
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OvoidError {
    #[error("ovoid point {point} out of range")]
    OutOfRange { point: usize },
    #[error("line {line} meets the set in {count} points")]
    BadLine { line: usize, count: usize },
    #[error("ovoid has {found} points, expected 1+st = {expected}")]
    WrongSize { found: usize, expected: usize },
}

/// Every line must meet `o` in exactly one point.
pub fn verify_ovoid(gq: &Quadrangle, o: &Ovoid) -> Result<(), OvoidError> {
    if let Some(&point) = o.points().iter().find(|&&x| x >= gq.point_count()) {
        return Err(OvoidError::OutOfRange { point });
    }
    for (l, line) in gq.structure().lines().iter().enumerate() {
        let count = line.iter().filter(|&&x| o.contains(x)).count();
        if count != 1 {
            return Err(OvoidError::BadLine { line: l, count });
        }
    }
    let expected = gq.params().ovoid_size();
    if o.len() != expected {
        return Err(OvoidError::WrongSize { found: o.len(), expected });
    }
    Ok(())
}

/// Point set `0..v` and a sequence of block instances of common size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    v: usize,
    blocks: Vec<Vec<usize>>,
}

impl Design {
    pub fn new(v: usize, blocks: Vec<Vec<usize>>) -> Result<Self, StructureError> {
        if blocks.is_empty() {
            return Err(StructureError::NoBlocks);
        }
        let mut blocks = blocks;
        let k = blocks[0].len();
        for (i, b) in blocks.iter_mut().enumerate() {
            b.sort_unstable();
            if let Some(&point) = b.iter().find(|&&x| x >= v) {
                return Err(StructureError::BlockPointOutOfRange { block: i, point, v });
            }
            if let Some(w) = b.windows(2).find(|w| w[0] == w[1]) {
                return Err(StructureError::RepeatedBlockPoint { block: i, point: w[0] });
            }
            if b.len() != k {
                return Err(StructureError::NonUniformBlocks { block: i, size: b.len(), expected: k });
            }
        }
        Ok(Design { v, blocks })
    }

    pub fn point_count(&self) -> usize {
        self.v
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn contains(&self, block: usize, point: usize) -> bool {
        self.blocks[block].binary_search(&point).is_ok()
    }

    /// Instances containing each point, ascending.
    pub fn instances_through(&self) -> Vec<Vec<usize>> {
        let mut through = vec![Vec::new(); self.v];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                through[x].push(i);
            }
        }
        through
    }

    /// The design seen as an incidence structure with blocks as lines.
    pub fn to_incidence(&self) -> IncidenceStructure {
        IncidenceStructure::new(self.v, self.blocks.clone()).expect("designs are well formed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DesignParams {
    pub v: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
    pub lambda: usize,
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.v, self.b, self.r, self.k, self.lambda)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BibdError {
    #[error("fewer than two points")]
    TooFewPoints,
    #[error("pair {reference:?} lies in {reference_count} blocks but pair {witness:?} in {count}")]
    NonUniformPairs {
        reference: (usize, usize),
        reference_count: usize,
        witness: (usize, usize),
        count: usize,
    },
    #[error("point 0 lies in {reference_count} blocks but point {point} in {count}")]
    NonUniformReplication { point: usize, reference_count: usize, count: usize },
    #[error("balanced with parameters {params} but not incomplete (k >= v)")]
    NotIncomplete { params: DesignParams },
    #[error("balanced with parameters {params} but trivial (k <= 2)")]
    Trivial { params: DesignParams },
}

impl BibdError {
    /// Parameters of a balanced but degenerate design.
    pub fn degenerate_params(&self) -> Option<DesignParams> {
        match self {
            BibdError::NotIncomplete { params } | BibdError::Trivial { params } => Some(*params),
            _ => None,
        }
    }
}

/// Pairwise balance only: every pair in the same number of instances.
pub fn verify_balance(d: &Design) -> Result<DesignParams, BibdError> {
    let v = d.point_count();
    if v < 2 {
        return Err(BibdError::TooFewPoints);
    }
    let mut pairs = vec![0usize; v * v];
    let mut reps = vec![0usize; v];
    for b in d.blocks() {
        for (i, &x) in b.iter().enumerate() {
            reps[x] += 1;
            for &y in &b[i + 1..] {
                pairs[x * v + y] += 1;
            }
        }
    }
    let lambda = pairs[1];
    for x in 0..v {
        for y in x + 1..v {
            if pairs[x * v + y] != lambda {
                return Err(BibdError::NonUniformPairs {
                    reference: (0, 1),
                    reference_count: lambda,
                    witness: (x, y),
                    count: pairs[x * v + y],
                });
            }
        }
    }
    let r = reps[0];
    if let Some(point) = reps.iter().position(|&c| c != r) {
        return Err(BibdError::NonUniformReplication { point, reference_count: r, count: reps[point] });
    }
    let params = DesignParams { v, b: d.block_count(), r, k: d.block_size(), lambda };
    debug_assert_eq!(params.v * params.r, params.b * params.k);
    debug_assert_eq!(params.r * (params.k - 1), params.lambda * (params.v - 1));
    Ok(params)
}

/// Balance plus nondegeneracy: `2 < k < v`.
pub fn verify_bibd(d: &Design) -> Result<DesignParams, BibdError> {
    let params = verify_balance(d)?;
    if params.k >= params.v {
        return Err(BibdError::NotIncomplete { params });
    }
    if params.k <= 2 {
        return Err(BibdError::Trivial { params });
    }
    Ok(params)
}

/// For each point, its parallel classes as sorted lists of block instances.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalResolutionSystem {
    classes: Vec<Vec<Vec<usize>>>,
}

impl LocalResolutionSystem {
    pub fn new(mut classes: Vec<Vec<Vec<usize>>>) -> Self {
        for about in &mut classes {
            for class in about.iter_mut() {
                class.sort_unstable();
            }
        }
        LocalResolutionSystem { classes }
    }

    pub fn point_count(&self) -> usize {
        self.classes.len()
    }

    /// The parallel classes about `p`.
    pub fn about(&self, p: usize) -> &[Vec<usize>] {
        &self.classes[p]
    }

    pub fn classes(&self) -> &[Vec<Vec<usize>>] {
        &self.classes
    }

    /// Same system with the classes about each point sorted by smallest
    /// instance; useful for comparing systems as partitions.
    pub fn normalized(&self) -> Self {
        let mut classes = self.classes.clone();
        for about in &mut classes {
            about.sort();
        }
        LocalResolutionSystem { classes }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LrsError {
    #[error("system covers {found} points, design has {expected}")]
    PointCount { found: usize, expected: usize },
    #[error("point {point}: class {class} is empty")]
    EmptyClass { point: usize, class: usize },
    #[error("point {point}: class {class} names instance {instance} out of range")]
    InstanceOutOfRange { point: usize, class: usize, instance: usize },
    #[error("point {point}: class {class} holds instance {instance} which misses the point")]
    MissingPoint { point: usize, class: usize, instance: usize },
    #[error("point {point}: class {class} leaves point {uncovered} uncovered")]
    Uncovered { point: usize, class: usize, uncovered: usize },
    #[error("point {point}: class {class} covers point {covered} twice")]
    DoublyCovered { point: usize, class: usize, covered: usize },
    #[error("point {point}: instance {instance} is in no class")]
    Unassigned { point: usize, instance: usize },
    #[error("point {point}: instance {instance} is assigned twice")]
    DoublyAssigned { point: usize, instance: usize },
}

/// Checks that the classes about every point `p` partition the instances
/// through `p`, and that each class minus `p` partitions the other points.
pub fn verify_lrs(d: &Design, lrs: &LocalResolutionSystem) -> Result<(), LrsError> {
    let v = d.point_count();
    if lrs.point_count() != v {
        return Err(LrsError::PointCount { found: lrs.point_count(), expected: v });
    }
    let mut assigned = vec![usize::MAX; d.block_count()];
    let mut covered = vec![usize::MAX; v];
    let through = d.instances_through();
    for (p, through_p) in through.iter().enumerate() {
        for (ci, class) in lrs.about(p).iter().enumerate() {
            if class.is_empty() {
                return Err(LrsError::EmptyClass { point: p, class: ci });
            }
            let stamp = p * d.block_count() + ci;
            for &inst in class {
                if inst >= d.block_count() {
                    return Err(LrsError::InstanceOutOfRange { point: p, class: ci, instance: inst });
                }
                if !d.contains(inst, p) {
                    return Err(LrsError::MissingPoint { point: p, class: ci, instance: inst });
                }
                if assigned[inst] == p {
                    return Err(LrsError::DoublyAssigned { point: p, instance: inst });
                }
                assigned[inst] = p;
                for &x in d.block(inst) {
                    if x == p {
                        continue;
                    }
                    if covered[x] == stamp {
                        return Err(LrsError::DoublyCovered { point: p, class: ci, covered: x });
                    }
                    covered[x] = stamp;
                }
            }
            if let Some(x) = (0..v).find(|&x| x != p && covered[x] != stamp) {
                return Err(LrsError::Uncovered { point: p, class: ci, uncovered: x });
            }
        }
        if let Some(&inst) = through_p.iter().find(|&&i| assigned[i] != p) {
            return Err(LrsError::Unassigned { point: p, instance: inst });
        }
    }
    Ok(())
}

/// Three instances pairwise co-class about points that are not all equal.
/// `b,c` are co-class about `p`, `b,e` about `q != p`, `c,e` about `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleWitness {
    pub b: usize,
    pub c: usize,
    pub e: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl fmt::Display for TriangleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instances {},{} co-class about {}; {},{} about {}; {},{} about {}",
            self.b, self.c, self.p, self.b, self.e, self.q, self.c, self.e, self.r
        )
    }
}

/// Labels of the co-class relation: `(b,c) -> p` whenever instances `b < c`
/// lie in a common class about `p`.
pub fn coclass_labels(lrs: &LocalResolutionSystem) -> HashMap<(usize, usize), usize> {
    let mut labels = HashMap::new();
    for (p, about) in lrs.classes().iter().enumerate() {
        for class in about {
            for (i, &b) in class.iter().enumerate() {
                for &c in &class[i + 1..] {
                    labels.insert((b.min(c), b.max(c)), p);
                }
            }
        }
    }
    labels
}

/// Searches for a co-class triangle whose labels are not all equal. Assumes
/// `lrs` has passed [`verify_lrs`].
pub fn verify_non_triangular(d: &Design, lrs: &LocalResolutionSystem) -> Result<(), TriangleWitness> {
    let labels = coclass_labels(lrs);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d.block_count()];
    for (&(b, c), &p) in &labels {
        adj[b].push((c, p));
        adj[c].push((b, p));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    for (b, list) in adj.iter().enumerate() {
        for (i, &(c, p)) in list.iter().enumerate() {
            for &(e, q) in &list[i + 1..] {
                if p == q {
                    continue;
                }
                if let Some(&r) = labels.get(&(c.min(e), c.max(e))) {
                    return Err(TriangleWitness { b, c, e, p, q, r });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fano() -> Vec<Vec<usize>> {
        vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ]
    }

    fn grid() -> IncidenceStructure {
        let rows = (0..3).map(|r| (0..3).map(|c| 3 * r + c).collect());
        let cols = (0..3).map(|c| (0..3).map(|r| 3 * r + c).collect());
        IncidenceStructure::new(9, rows.chain(cols).collect()).unwrap()
    }

    #[test]
    fn fano_is_a_bibd() {
        let d = Design::new(7, fano()).unwrap();
        assert_eq!(verify_bibd(&d).unwrap(), DesignParams { v: 7, b: 7, r: 3, k: 3, lambda: 1 });
    }

    #[test]
    fn unbalanced_pairs_witness() {
        let d = Design::new(4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let err = verify_bibd(&d).unwrap_err();
        assert_eq!(
            err,
            BibdError::NonUniformPairs { reference: (0, 1), reference_count: 2, witness: (0, 2), count: 1 }
        );
        // Pair {2,3} is in no block at all.
        assert!(!d.blocks().iter().any(|b| b.contains(&2) && b.contains(&3)));
    }

    #[test]
    fn degenerate_designs_get_dedicated_errors() {
        let full = Design::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(verify_bibd(&full), Err(BibdError::NotIncomplete { .. })));
        let pairs = Design::new(3, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let err = verify_bibd(&pairs).unwrap_err();
        assert_eq!(err.degenerate_params().unwrap().lambda, 1);
        assert!(matches!(err, BibdError::Trivial { .. }));
        assert!(verify_balance(&pairs).is_ok());
    }

    #[test]
    fn malformed_designs_rejected() {
        assert_eq!(Design::new(3, vec![]).unwrap_err(), StructureError::NoBlocks);
        assert!(matches!(Design::new(3, vec![vec![0, 3]]), Err(StructureError::BlockPointOutOfRange { .. })));
        assert!(matches!(Design::new(3, vec![vec![0, 0]]), Err(StructureError::RepeatedBlockPoint { .. })));
        assert!(matches!(
            Design::new(3, vec![vec![0, 1], vec![2]]),
            Err(StructureError::NonUniformBlocks { .. })
        ));
        assert!(matches!(IncidenceStructure::new(2, vec![vec![]]), Err(StructureError::EmptyLine(0))));
    }

    #[test]
    fn grid_is_gq_2_1_and_dual_is_gq_1_2() {
        let g = grid();
        assert_eq!(verify_gq(&g).unwrap(), GqParams { s: 2, t: 1 });
        assert_eq!(verify_gq(&g.dual()).unwrap(), GqParams { s: 1, t: 2 });
        assert_eq!(g.dual().dual(), g);
    }

    #[test]
    fn fano_fails_axiom_three() {
        let f = IncidenceStructure::new(7, fano()).unwrap();
        let err = verify_gq(&f).unwrap_err();
        assert_eq!(err.axiom(), 3);
        assert!(matches!(err, GqError::Projection { connections: 3, .. }));
    }

    #[test]
    fn axiom_one_failures() {
        let uneven = IncidenceStructure::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(matches!(verify_gq(&uneven), Err(GqError::PointDegree { .. })));
        let doubled = IncidenceStructure::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(matches!(verify_gq(&doubled), Err(GqError::TwoCommonLines { .. })));
    }

    #[test]
    fn ovoid_checks() {
        let g = Quadrangle::new(grid()).unwrap();
        // A transversal of the grid: one point per row and per column.
        assert!(verify_ovoid(&g, &Ovoid::new(vec![0, 4, 8])).is_ok());
        assert!(matches!(verify_ovoid(&g, &Ovoid::new((0..9).collect())), Err(OvoidError::BadLine { count: 3, .. })));
        assert!(matches!(verify_ovoid(&g, &Ovoid::new(vec![])), Err(OvoidError::BadLine { count: 0, .. })));
        assert!(matches!(verify_ovoid(&g, &Ovoid::new(vec![9])), Err(OvoidError::OutOfRange { .. })));
    }

    #[test]
    fn fano_single_class_lrs() {
        let d = Design::new(7, fano()).unwrap();
        let through = d.instances_through();
        let lrs = LocalResolutionSystem::new(through.iter().map(|t| vec![t.clone()]).collect());
        verify_lrs(&d, &lrs).unwrap();
        // Three lines of the plane forming a triangle are pairwise co-class
        // about three different points.
        assert!(verify_non_triangular(&d, &lrs).is_err());
    }

    #[test]
    fn overlapping_blocks_in_one_class() {
        let d = Design::new(4, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).unwrap();
        let mut classes = vec![vec![]; 4];
        classes[0] = vec![vec![0, 1], vec![2]];
        let err = verify_lrs(&d, &LocalResolutionSystem::new(classes)).unwrap_err();
        assert_eq!(err, LrsError::DoublyCovered { point: 0, class: 0, covered: 1 });
    }

    #[test]
    fn lrs_assignment_errors() {
        let d = Design::new(7, fano()).unwrap();
        let through = d.instances_through();
        let mut classes: Vec<Vec<Vec<usize>>> = through.iter().map(|t| vec![t.clone()]).collect();
        classes[0] = vec![vec![0, 1], vec![2]];
        assert!(matches!(
            verify_lrs(&d, &LocalResolutionSystem::new(classes.clone())),
            Err(LrsError::Uncovered { point: 0, class: 0, .. })
        ));
        classes[0] = vec![vec![0, 1, 2], vec![2]];
        assert!(matches!(
            verify_lrs(&d, &LocalResolutionSystem::new(classes.clone())),
            Err(LrsError::DoublyAssigned { point: 0, instance: 2 })
        ));
        classes[0] = vec![vec![0, 1, 3]];
        assert!(matches!(
            verify_lrs(&d, &LocalResolutionSystem::new(classes.clone())),
            Err(LrsError::MissingPoint { point: 0, instance: 3, .. })
        ));
        classes.pop();
        assert!(matches!(
            verify_lrs(&d, &LocalResolutionSystem::new(classes)),
            Err(LrsError::PointCount { found: 6, expected: 7 })
        ));
    }

    #[test]
    fn monochromatic_triangle_is_allowed() {
        // Three blocks through point 0 forming one class; no other co-class pairs.
        let d = Design::new(7, fano()).unwrap();
        let mut classes = vec![Vec::new(); 7];
        classes[0] = vec![vec![0, 1, 2]];
        let lrs = LocalResolutionSystem::new(classes);
        assert!(verify_non_triangular(&d, &lrs).is_ok());
    }
}
