//! Classical generalized quadrangles W(q), Q(4,q), H(3,q^2), the
//! perp/trace/span calculus on a verified quadrangle, and Payne derivation.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::field::{Elem, Field, FieldError};
use crate::structures::{IncidenceStructure, Quadrangle};

/// Largest `q` accepted by [`build_w`] and [`build_q4`].
pub const MAX_Q: u32 = 16;
/// Largest `q` accepted by [`build_h3`] (the field is GF(q^2)).
pub const MAX_Q_HERMITIAN: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("q = {q} exceeds the construction bound {bound}")]
    TooLarge { q: u32, bound: u32 },
    #[error("point {0} given twice")]
    SamePoint(usize),
    #[error("points {x} and {y} are collinear")]
    Collinear { x: usize, y: usize },
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    #[error("Payne derivation needs s = t, got (s,t) = ({s},{t})")]
    NotOrderQ { s: usize, t: usize },
    #[error("point {point} is not regular: pair with {witness} has a span of {span_size} points")]
    NotRegular { point: usize, witness: usize, span_size: usize },
}

/// Homogeneous coordinates normalized so the first nonzero entry is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(pub Vec<Elem>);

impl ProjectivePoint {
    pub fn coords(&self) -> &[Elem] {
        &self.0
    }
}

/// Points of PG(n, q) in lexicographic order of normalized coordinates.
pub struct ProjectiveSpace<'f> {
    field: &'f Field,
    points: Vec<ProjectivePoint>,
    index: Vec<usize>,
}

impl<'f> ProjectiveSpace<'f> {
    pub fn new(field: &'f Field, dimension: usize) -> Self {
        let q = field.order() as usize;
        let len = dimension + 1;
        let total = q.pow(len as u32);
        let mut points = Vec::new();
        let mut index = vec![usize::MAX; total];
        for (code, slot) in index.iter_mut().enumerate() {
            let coords = decode(code, q, len);
            if coords.iter().find(|&&c| c != 0) == Some(&1) {
                *slot = points.len();
                points.push(ProjectivePoint(coords));
            }
        }
        ProjectiveSpace { field, points, index }
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the projective class of a nonzero vector.
    pub fn index_of(&self, v: &[Elem]) -> usize {
        let lead = *v.iter().find(|&&c| c != 0).expect("zero vector has no projective point");
        let inv = self.field.inv(lead).unwrap();
        let q = self.field.order() as usize;
        let code = v.iter().fold(0usize, |acc, &c| acc * q + self.field.mul(c, inv) as usize);
        self.index[code]
    }

    /// The `q + 1` points on the line joining points `i != j`, sorted.
    pub fn line_through(&self, i: usize, j: usize) -> Vec<usize> {
        let f = self.field;
        let (x, y) = (&self.points[i].0, &self.points[j].0);
        let mut out: Vec<usize> = f
            .elements()
            .map(|c| {
                let v: Vec<Elem> = x.iter().zip(y).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
                self.index_of(&v)
            })
            .collect();
        out.push(j);
        out.sort_unstable();
        out
    }
}

fn decode(mut code: usize, q: usize, len: usize) -> Vec<Elem> {
    let mut out = vec![0; len];
    for c in out.iter_mut().rev() {
        *c = (code % q) as Elem;
        code /= q;
    }
    out
}

/// Lines of PG(n,q) lying on a point subset, accepted pairwise by `accept`.
fn lines_on(
    space: &ProjectiveSpace<'_>,
    on: &[bool],
    accept: impl Fn(usize, usize, &[usize]) -> bool,
) -> IncidenceStructure {
    let members: Vec<usize> = (0..space.len()).filter(|&i| on[i]).collect();
    let mut new_index = vec![usize::MAX; space.len()];
    for (k, &i) in members.iter().enumerate() {
        new_index[i] = k;
    }
    let m = members.len();
    let mut joined = vec![false; m * m];
    let mut lines = BTreeSet::new();
    for a in 0..m {
        for b in a + 1..m {
            if joined[a * m + b] {
                continue;
            }
            let (i, j) = (members[a], members[b]);
            let pts = space.line_through(i, j);
            if !pts.iter().all(|&z| on[z]) || !accept(i, j, &pts) {
                continue;
            }
            let mut line: Vec<usize> = pts.iter().map(|&z| new_index[z]).collect();
            line.sort_unstable();
            for &u in &line {
                for &w in &line {
                    joined[u * m + w] = true;
                }
            }
            lines.insert(line);
        }
    }
    IncidenceStructure::new(m, lines.into_iter().collect()).expect("lines of a projective space are well formed")
}

fn check_q(q: u32, bound: u32) -> Result<Field, GeometryError> {
    let field = Field::of_order(q)?;
    if q > bound {
        return Err(GeometryError::TooLarge { q, bound });
    }
    Ok(field)
}

/// The symplectic quadrangle W(q): all points of PG(3,q) and the lines totally
/// isotropic for `x0 y1 - x1 y0 + x2 y3 - x3 y2`.
pub fn build_w(q: u32) -> Result<IncidenceStructure, GeometryError> {
    let f = check_q(q, MAX_Q)?;
    let space = ProjectiveSpace::new(&f, 3);
    let form = |x: &[Elem], y: &[Elem]| {
        let a = f.sub(f.mul(x[0], y[1]), f.mul(x[1], y[0]));
        let b = f.sub(f.mul(x[2], y[3]), f.mul(x[3], y[2]));
        f.add(a, b)
    };
    let on = vec![true; space.len()];
    Ok(lines_on(&space, &on, |i, j, _| {
        form(space.points()[i].coords(), space.points()[j].coords()) == 0
    }))
}

/// The parabolic quadric Q(4,q): `x0^2 = x1 x2 + x3 x4` in PG(4,q).
pub fn build_q4(q: u32) -> Result<IncidenceStructure, GeometryError> {
    let f = check_q(q, MAX_Q)?;
    let space = ProjectiveSpace::new(&f, 4);
    let on: Vec<bool> = space
        .points()
        .iter()
        .map(|pt| {
            let x = pt.coords();
            f.mul(x[0], x[0]) == f.add(f.mul(x[1], x[2]), f.mul(x[3], x[4]))
        })
        .collect();
    Ok(lines_on(&space, &on, |_, _, _| true))
}

/// The Hermitian surface `sum x_i^(q+1) = 0` in PG(3,q^2), a GQ(q^2,q).
pub fn build_h3(q: u32) -> Result<IncidenceStructure, GeometryError> {
    let (p, a) = crate::field::prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    if q > MAX_Q_HERMITIAN {
        return Err(GeometryError::TooLarge { q, bound: MAX_Q_HERMITIAN });
    }
    let f = Field::new(p, 2 * a)?;
    let space = ProjectiveSpace::new(&f, 3);
    let norm = q as i64 + 1;
    let on: Vec<bool> = space
        .points()
        .iter()
        .map(|pt| pt.coords().iter().fold(0, |acc, &c| f.add(acc, f.pow(c, norm))) == 0)
        .collect();
    Ok(lines_on(&space, &on, |_, _, _| true))
}

fn check_point(gq: &Quadrangle, x: usize) -> Result<(), GeometryError> {
    if x < gq.point_count() {
        Ok(())
    } else {
        Err(GeometryError::PointOutOfRange(x))
    }
}

/// `x` together with every point collinear with it, sorted.
pub fn perp(gq: &Quadrangle, x: usize) -> Vec<usize> {
    (0..gq.point_count()).filter(|&z| z == x || gq.collinear(x, z)).collect()
}

fn in_perp(gq: &Quadrangle, x: usize, z: usize) -> bool {
    z == x || gq.collinear(x, z)
}

/// Points in the perp of both `x` and `y`.
pub fn trace(gq: &Quadrangle, x: usize, y: usize) -> Result<Vec<usize>, GeometryError> {
    check_point(gq, x)?;
    check_point(gq, y)?;
    if x == y {
        return Err(GeometryError::SamePoint(x));
    }
    Ok((0..gq.point_count()).filter(|&z| in_perp(gq, x, z) && in_perp(gq, y, z)).collect())
}

/// Points in the perp of every point of the trace of `x` and `y`.
pub fn span(gq: &Quadrangle, x: usize, y: usize) -> Result<Vec<usize>, GeometryError> {
    let tr = trace(gq, x, y)?;
    Ok((0..gq.point_count()).filter(|&z| tr.iter().all(|&w| in_perp(gq, w, z))).collect())
}

/// A noncollinear pair is regular when its span has `t + 1` points.
pub fn is_regular_pair(gq: &Quadrangle, x: usize, y: usize) -> Result<bool, GeometryError> {
    check_point(gq, x)?;
    check_point(gq, y)?;
    if x == y {
        return Err(GeometryError::SamePoint(x));
    }
    if gq.collinear(x, y) {
        return Err(GeometryError::Collinear { x, y });
    }
    Ok(span(gq, x, y)?.len() == gq.params().t + 1)
}

/// First point `y` not collinear with `x` whose pair with `x` is irregular.
fn irregular_partner(gq: &Quadrangle, x: usize) -> Option<(usize, usize)> {
    (0..gq.point_count())
        .filter(|&y| y != x && !gq.collinear(x, y))
        .map(|y| (y, span(gq, x, y).unwrap().len()))
        .find(|&(_, size)| size != gq.params().t + 1)
}

pub fn is_regular_point(gq: &Quadrangle, x: usize) -> Result<bool, GeometryError> {
    check_point(gq, x)?;
    Ok(irregular_partner(gq, x).is_none())
}

/// P(S,x) for a quadrangle of order `q` and a regular point `x`. Points are the
/// points not collinear with `x` in ascending order; lines are the lines of
/// `S` not through `x` restricted to those points, followed by the hyperbolic
/// lines `span(x,y) - {x}` in order of first appearance.
pub fn payne_derivation(gq: &Quadrangle, x: usize) -> Result<IncidenceStructure, GeometryError> {
    let params = gq.params();
    if params.s != params.t {
        return Err(GeometryError::NotOrderQ { s: params.s, t: params.t });
    }
    check_point(gq, x)?;
    if let Some((witness, span_size)) = irregular_partner(gq, x) {
        return Err(GeometryError::NotRegular { point: x, witness, span_size });
    }
    let n = gq.point_count();
    let mut index = vec![usize::MAX; n];
    let mut count = 0;
    for (z, slot) in index.iter_mut().enumerate() {
        if !in_perp(gq, x, z) {
            *slot = count;
            count += 1;
        }
    }
    let mut lines = Vec::new();
    for line in gq.structure().lines() {
        if line.contains(&x) {
            continue;
        }
        lines.push(line.iter().filter(|&&z| index[z] != usize::MAX).map(|&z| index[z]).collect::<Vec<_>>());
    }
    let mut seen = BTreeSet::new();
    for y in 0..n {
        if index[y] == usize::MAX {
            continue;
        }
        let hyperbolic: Vec<usize> = span(gq, x, y)?.into_iter().filter(|&z| z != x).map(|z| index[z]).collect();
        if seen.insert(hyperbolic.clone()) {
            lines.push(hyperbolic);
        }
    }
    Ok(IncidenceStructure::new(count, lines).expect("derived lines are well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{verify_gq, GqParams};

    fn quad(s: IncidenceStructure) -> Quadrangle {
        Quadrangle::new(s).unwrap()
    }

    #[test]
    fn w_small_orders() {
        for (q, n) in [(2u32, 15usize), (3, 40), (4, 85)] {
            let w = build_w(q).unwrap();
            assert_eq!(w.point_count(), n);
            assert_eq!(w.line_count(), n);
            let params = verify_gq(&w).unwrap();
            assert_eq!(params, GqParams { s: q as usize, t: q as usize });
            assert!((0..n).all(|x| w.lines_through(x).len() == q as usize + 1));
        }
    }

    #[test]
    fn q4_small_orders() {
        let q2 = build_q4(2).unwrap();
        assert_eq!(q2.point_count(), 15);
        assert_eq!(verify_gq(&q2).unwrap(), GqParams { s: 2, t: 2 });
        let q3 = build_q4(3).unwrap();
        assert_eq!((q3.point_count(), q3.line_count()), (40, 40));
        assert_eq!(verify_gq(&q3).unwrap(), GqParams { s: 3, t: 3 });
    }

    #[test]
    fn hermitian_q2() {
        let h = build_h3(2).unwrap();
        assert_eq!((h.point_count(), h.line_count()), (45, 27));
        assert_eq!(verify_gq(&h).unwrap(), GqParams { s: 4, t: 2 });
        assert!(h.lines().iter().all(|l| l.len() == 5));
    }

    #[test]
    fn bad_orders() {
        assert!(matches!(build_w(6), Err(GeometryError::Field(FieldError::NotPrimePower(6)))));
        assert!(matches!(build_q4(32), Err(GeometryError::TooLarge { .. })));
        assert!(matches!(build_h3(5), Err(GeometryError::TooLarge { .. })));
        assert!(build_h3(10).is_err());
    }

    #[test]
    fn traces_in_w2() {
        let w = quad(build_w(2).unwrap());
        for x in 0..15 {
            assert_eq!(perp(&w, x).len(), 1 + 2 * 3);
            for y in 0..15 {
                if x == y {
                    assert_eq!(trace(&w, x, y), Err(GeometryError::SamePoint(x)));
                    continue;
                }
                let tr = trace(&w, x, y).unwrap();
                if w.collinear(x, y) {
                    let l = w.joining_line(x, y).unwrap();
                    assert_eq!(tr, w.structure().line(l));
                } else {
                    assert_eq!(tr.len(), 3);
                }
                let sp = span(&w, x, y).unwrap();
                assert!(sp.contains(&x) && sp.contains(&y));
            }
        }
    }

    #[test]
    fn regularity() {
        for q in [2, 3] {
            let w = quad(build_w(q).unwrap());
            assert!((0..w.point_count()).all(|x| is_regular_point(&w, x).unwrap()));
        }
        let q42 = quad(build_q4(2).unwrap());
        assert!((0..15).all(|x| is_regular_point(&q42, x).unwrap()));
        let q43 = quad(build_q4(3).unwrap());
        assert!((0..40).any(|x| !is_regular_point(&q43, x).unwrap()));
        let (x, y) = (0, (1..15).find(|&y| q42.collinear(0, y)).unwrap());
        assert_eq!(is_regular_pair(&q42, x, y), Err(GeometryError::Collinear { x, y }));
    }

    #[test]
    fn span_points_are_opposite_to_regular_point() {
        for q in [2, 4] {
            let w = quad(build_w(q).unwrap());
            let x = 0;
            for y in 1..w.point_count() {
                if w.collinear(x, y) {
                    continue;
                }
                let sp = span(&w, x, y).unwrap();
                assert!(sp.iter().all(|&z| z == x || !w.collinear(x, z)));
            }
        }
    }

    #[test]
    fn payne_of_w2_and_w4() {
        let w2 = quad(build_w(2).unwrap());
        let p2 = payne_derivation(&w2, 0).unwrap();
        assert_eq!((p2.point_count(), p2.line_count()), (8, 16));
        assert_eq!(verify_gq(&p2).unwrap(), GqParams { s: 1, t: 3 });

        let w4 = quad(build_w(4).unwrap());
        let p4 = payne_derivation(&w4, 7).unwrap();
        assert_eq!((p4.point_count(), p4.line_count()), (64, 96));
        assert_eq!(verify_gq(&p4).unwrap(), GqParams { s: 3, t: 5 });
        assert!((0..64).all(|z| p4.lines_through(z).len() == 6));
    }

    #[test]
    fn payne_rejects_irregular_point() {
        let q43 = quad(build_q4(3).unwrap());
        let x = (0..40).find(|&x| !is_regular_point(&q43, x).unwrap()).unwrap();
        assert!(matches!(payne_derivation(&q43, x), Err(GeometryError::NotRegular { .. })));
        let h = quad(build_h3(2).unwrap());
        assert_eq!(payne_derivation(&h, 0), Err(GeometryError::NotOrderQ { s: 4, t: 2 }));
    }
}
