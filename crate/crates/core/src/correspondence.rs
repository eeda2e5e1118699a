//! The two maps between quadrangles with an ovoid and designs with a
//! non-triangular local resolution system, their round trips, and checkers
//! for regular-pair ovoids in replicated designs.
//!
//! `nu` sends `(S, O)` to the design on `O` whose blocks are `b_x`, the ovoid
//! points collinear with `x`, one instance per point `x` off the ovoid; the
//! class about `p` for a line `l` through `p` holds the blocks of the points
//! of `l` other than `p`. `mu` goes back: its points are the design points
//! followed by the block instances, and its lines are the parallel classes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::canon::{are_isomorphic, ColoredIncidenceGraph};
use crate::geometry::{is_regular_pair, trace};
use crate::structures::{
    verify_balance, verify_bibd, verify_lrs, verify_non_triangular, verify_ovoid, BibdError, Design, DesignParams,
    GqError, GqParams, IncidenceStructure, LocalResolutionSystem, LrsError, Ovoid, OvoidError, Quadrangle,
    TriangleWitness,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrespondenceError {
    #[error("invalid ovoid: {0}")]
    Ovoid(#[from] OvoidError),
    #[error("parameters (s,t) = ({s},{t}) need s > 1 and t > 1")]
    SmallParameters { s: usize, t: usize },
    #[error("design is not a BIBD: {0}")]
    Bibd(#[from] BibdError),
    #[error("design parameters {0} are not (1+st, 1+t, 1+t)")]
    Factor(DesignParams),
    #[error("invalid local resolution system: {0}")]
    Lrs(#[from] LrsError),
    #[error("local resolution system is triangular: {0}")]
    Triangular(TriangleWitness),
    /// A postcondition failed on a construction whose inputs were verified.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Where a point of a `mu` image came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    DesignPoint(usize),
    Instance(usize),
}

#[derive(Debug, Clone)]
pub struct NuOutput {
    pub design: Design,
    pub lrs: LocalResolutionSystem,
    pub params: DesignParams,
    /// Design point `i` is quadrangle point `design_points[i]`.
    pub design_points: Vec<usize>,
    /// Block instance `j` is `b_x` for `x = instance_points[j]`.
    pub instance_points: Vec<usize>,
}

/// A verified quadrangle with a verified ovoid, built by [`mu`].
#[derive(Debug, Clone)]
pub struct OvoidLabeledGq {
    pub gq: Quadrangle,
    pub ovoid: Ovoid,
    pub point_origin: Vec<Origin>,
    /// Line `i` is class `line_origin[i].1` about design point `line_origin[i].0`.
    pub line_origin: Vec<(usize, usize)>,
}

fn check_small(params: GqParams, allow_degenerate: bool) -> Result<(), CorrespondenceError> {
    if !allow_degenerate && (params.s <= 1 || params.t <= 1) {
        return Err(CorrespondenceError::SmallParameters { s: params.s, t: params.t });
    }
    Ok(())
}

fn internal(what: impl std::fmt::Display) -> CorrespondenceError {
    CorrespondenceError::Internal(what.to_string())
}

/// The map from a quadrangle with ovoid to a design with a non-triangular
/// local resolution system. All postconditions are verified.
pub fn nu(gq: &Quadrangle, o: &Ovoid, allow_degenerate: bool) -> Result<NuOutput, CorrespondenceError> {
    let params = gq.params();
    check_small(params, allow_degenerate)?;
    verify_ovoid(gq, o)?;
    let s = gq.structure();
    let design_points = o.points().to_vec();
    let mut ovoid_index = vec![usize::MAX; s.point_count()];
    for (i, &p) in design_points.iter().enumerate() {
        ovoid_index[p] = i;
    }
    let instance_points: Vec<usize> = (0..s.point_count()).filter(|&x| !o.contains(x)).collect();
    let mut instance_of = vec![usize::MAX; s.point_count()];
    for (j, &x) in instance_points.iter().enumerate() {
        instance_of[x] = j;
    }
    let blocks = instance_points
        .iter()
        .map(|&x| design_points.iter().filter(|&&p| gq.collinear(x, p)).map(|&p| ovoid_index[p]).collect())
        .collect();
    let design = Design::new(design_points.len(), blocks).map_err(internal)?;
    let classes = design_points
        .iter()
        .map(|&p| {
            s.lines_through(p)
                .iter()
                .map(|&l| s.line(l).iter().filter(|&&x| x != p).map(|&x| instance_of[x]).collect())
                .collect()
        })
        .collect();
    let lrs = LocalResolutionSystem::new(classes);

    let found = if allow_degenerate { verify_balance(&design) } else { verify_bibd(&design) }.map_err(internal)?;
    let (st, t1) = (params.s * params.t, params.t + 1);
    let expected = DesignParams { v: 1 + st, b: params.s * (1 + st), r: t1 * params.s, k: t1, lambda: t1 };
    if found != expected {
        return Err(internal(format!("nu produced {found}, expected {expected}")));
    }
    verify_lrs(&design, &lrs).map_err(internal)?;
    verify_non_triangular(&design, &lrs).map_err(internal)?;
    Ok(NuOutput { design, lrs, params: found, design_points, instance_points })
}

/// Reads `(s,t)` off the parameters `(1+st, 1+t, 1+t)`.
fn factor(params: DesignParams) -> Result<GqParams, CorrespondenceError> {
    if params.k != params.lambda || params.k < 2 || !(params.v - 1).is_multiple_of(params.k - 1) {
        return Err(CorrespondenceError::Factor(params));
    }
    let t = params.k - 1;
    let s = (params.v - 1) / t;
    if s == 0 {
        return Err(CorrespondenceError::Factor(params));
    }
    Ok(GqParams { s, t })
}

/// The map from a design with a non-triangular local resolution system to a
/// quadrangle with ovoid. Inputs are verified first; the output is verified
/// before it is returned.
pub fn mu(
    d: &Design,
    lrs: &LocalResolutionSystem,
    allow_degenerate: bool,
) -> Result<OvoidLabeledGq, CorrespondenceError> {
    let params = match verify_bibd(d) {
        Ok(p) => p,
        Err(e) if allow_degenerate => e.degenerate_params().map_or_else(|| verify_balance(d), Ok)?,
        Err(e) => return Err(e.into()),
    };
    let gqp = factor(params)?;
    check_small(gqp, allow_degenerate)?;
    verify_lrs(d, lrs)?;
    verify_non_triangular(d, lrs).map_err(CorrespondenceError::Triangular)?;

    let v = d.point_count();
    let point_origin =
        (0..v).map(Origin::DesignPoint).chain((0..d.block_count()).map(Origin::Instance)).collect();
    let mut lines = Vec::new();
    let mut line_origin = Vec::new();
    for p in 0..v {
        for (c, class) in lrs.about(p).iter().enumerate() {
            lines.push(std::iter::once(p).chain(class.iter().map(|&i| v + i)).collect());
            line_origin.push((p, c));
        }
    }
    let inc = IncidenceStructure::new(v + d.block_count(), lines).map_err(internal)?;
    let gq = Quadrangle::new(inc).map_err(|e: GqError| internal(format!("mu output is not a GQ: {e}")))?;
    if gq.params() != gqp {
        return Err(internal(format!("mu output has (s,t) = {}, expected {gqp}", gq.params())));
    }
    let ovoid = Ovoid::new((0..v).collect());
    verify_ovoid(&gq, &ovoid).map_err(internal)?;
    Ok(OvoidLabeledGq { gq, ovoid, point_origin, line_origin })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub holds: bool,
    pub mismatch: Option<String>,
}

impl RoundTrip {
    fn ok() -> Self {
        RoundTrip { holds: true, mismatch: None }
    }

    fn fail(why: String) -> Self {
        RoundTrip { holds: false, mismatch: Some(why) }
    }
}

fn class_sets(classes: &[Vec<usize>], map: impl Fn(usize) -> usize) -> BTreeSet<BTreeSet<usize>> {
    classes.iter().map(|c| c.iter().map(|&i| map(i)).collect()).collect()
}

/// `nu(mu(d, lrs))` compared with `(d, lrs)` under the provenance labels.
pub fn roundtrip_design(
    d: &Design,
    lrs: &LocalResolutionSystem,
    allow_degenerate: bool,
) -> Result<RoundTrip, CorrespondenceError> {
    let m = mu(d, lrs, allow_degenerate)?;
    let n = nu(&m.gq, &m.ovoid, allow_degenerate)?;
    let point_back: Vec<usize> = n
        .design_points
        .iter()
        .map(|&x| match m.point_origin[x] {
            Origin::DesignPoint(p) => Ok(p),
            Origin::Instance(_) => Err(internal("ovoid point labeled as an instance")),
        })
        .collect::<Result<_, _>>()?;
    let instance_back: Vec<usize> = n
        .instance_points
        .iter()
        .map(|&x| match m.point_origin[x] {
            Origin::Instance(i) => Ok(i),
            Origin::DesignPoint(_) => Err(internal("off-ovoid point labeled as a design point")),
        })
        .collect::<Result<_, _>>()?;
    for (j, &i) in instance_back.iter().enumerate() {
        let mut image: Vec<usize> = n.design.block(j).iter().map(|&x| point_back[x]).collect();
        image.sort_unstable();
        if image != d.block(i) {
            return Ok(RoundTrip::fail(format!("instance {i} came back as {image:?}")));
        }
    }
    for (a, &p) in point_back.iter().enumerate() {
        let back = class_sets(n.lrs.about(a), |j| instance_back[j]);
        if back != class_sets(lrs.about(p), |i| i) {
            return Ok(RoundTrip::fail(format!("classes about point {p} differ")));
        }
    }
    Ok(RoundTrip::ok())
}

/// `mu(nu(S, O))` compared with `(S, O)`: the provenance bijection must carry
/// lines onto lines and the ovoid onto the ovoid, and the ovoid-colored
/// incidence graphs must be isomorphic.
pub fn roundtrip_gq(gq: &Quadrangle, o: &Ovoid, allow_degenerate: bool) -> Result<RoundTrip, CorrespondenceError> {
    let n = nu(gq, o, allow_degenerate)?;
    let m = mu(&n.design, &n.lrs, allow_degenerate)?;
    let to_original: Vec<usize> = m
        .point_origin
        .iter()
        .map(|origin| match *origin {
            Origin::DesignPoint(p) => n.design_points[p],
            Origin::Instance(i) => n.instance_points[i],
        })
        .collect();
    let original: HashMap<&[usize], usize> =
        gq.structure().lines().iter().enumerate().map(|(l, line)| (line.as_slice(), l)).collect();
    let mut hit = vec![false; gq.structure().line_count()];
    for line in m.gq.structure().lines() {
        let mut image: Vec<usize> = line.iter().map(|&x| to_original[x]).collect();
        image.sort_unstable();
        match original.get(image.as_slice()) {
            Some(&l) if !hit[l] => hit[l] = true,
            _ => return Ok(RoundTrip::fail(format!("line {line:?} maps to {image:?}, not a fresh line"))),
        }
    }
    let mut ovoid_image: Vec<usize> = m.ovoid.points().iter().map(|&x| to_original[x]).collect();
    ovoid_image.sort_unstable();
    if ovoid_image != o.points() {
        return Ok(RoundTrip::fail("ovoid not carried onto ovoid".into()));
    }
    let a = ColoredIncidenceGraph::from_structure(m.gq.structure()).with_ovoid(&m.ovoid);
    let b = ColoredIncidenceGraph::from_structure(gq.structure()).with_ovoid(o);
    if are_isomorphic(&a, &b).is_none() {
        return Ok(RoundTrip::fail("ovoid-colored canonical forms differ".into()));
    }
    Ok(RoundTrip::ok())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop32Report {
    /// Every point off the ovoid has a regular partner whose trace lies in
    /// the ovoid.
    pub holds: bool,
    /// One partner per point off the ovoid, where one exists.
    pub witnesses: BTreeMap<usize, usize>,
    /// First point off the ovoid without a partner.
    pub failing_point: Option<usize>,
    /// Distinct block contents of the induced design and their multiplicities.
    pub multiplicities: BTreeMap<Vec<usize>, usize>,
    /// Every distinct block occurs exactly `1 + t` times.
    pub multiplicity_ok: bool,
    /// Every distinct block is the trace of a regular pair, in design labels.
    pub blocks_are_traces: bool,
}

/// Regular noncollinear pairs `x, y` off the ovoid whose trace lies in it.
fn good_pair(gq: &Quadrangle, o: &Ovoid, x: usize, y: usize) -> Option<Vec<usize>> {
    if x == y || o.contains(y) || gq.collinear(x, y) {
        return None;
    }
    let tr = trace(gq, x, y).ok()?;
    (tr.iter().all(|&z| o.contains(z)) && is_regular_pair(gq, x, y).ok()?).then_some(tr)
}

pub fn check_prop32(gq: &Quadrangle, o: &Ovoid) -> Result<Prop32Report, CorrespondenceError> {
    verify_ovoid(gq, o)?;
    let n = gq.point_count();
    let off: Vec<usize> = (0..n).filter(|&x| !o.contains(x)).collect();
    let mut witnesses = BTreeMap::new();
    let mut failing_point = None;
    let mut traces = BTreeSet::new();
    let index: HashMap<usize, usize> = o.points().iter().enumerate().map(|(i, &p)| (p, i)).collect();
    for &x in &off {
        for &y in &off {
            if let Some(tr) = good_pair(gq, o, x, y) {
                witnesses.entry(x).or_insert(y);
                traces.insert(tr.iter().map(|z| index[z]).collect::<Vec<_>>());
            }
        }
        if !witnesses.contains_key(&x) && failing_point.is_none() {
            failing_point = Some(x);
        }
    }
    let induced = nu(gq, o, true)?;
    let mut multiplicities = BTreeMap::new();
    for b in induced.design.blocks() {
        *multiplicities.entry(b.clone()).or_insert(0) += 1;
    }
    let t1 = gq.params().t + 1;
    Ok(Prop32Report {
        holds: failing_point.is_none(),
        witnesses,
        failing_point,
        multiplicity_ok: multiplicities.values().all(|&m| m == t1),
        blocks_are_traces: multiplicities.keys().all(|b| traces.contains(b)),
        multiplicities,
    })
}

/// When every distinct block occurs exactly `n > 1` times, the design with
/// one copy of each (in order of first occurrence) and `n`.
pub fn check_replicated(d: &Design) -> Option<(Design, usize)> {
    let mut order: Vec<&Vec<usize>> = Vec::new();
    let mut counts: HashMap<&Vec<usize>, usize> = HashMap::new();
    for b in d.blocks() {
        let c = counts.entry(b).or_insert(0);
        if *c == 0 {
            order.push(b);
        }
        *c += 1;
    }
    let n = counts[order[0]];
    if n < 2 || counts.values().any(|&c| c != n) {
        return None;
    }
    let base = Design::new(d.point_count(), order.into_iter().cloned().collect()).ok()?;
    Some((base, n))
}
