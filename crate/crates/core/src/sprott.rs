//! Sprott's difference-family designs over GF(p^a), the explicit local
//! resolution system for the hyperoval family `(q^2, q+2)` with `q` even,
//! and the Desarguesian affine plane used as a comparator.
//!
//! Base blocks are `{0, x^i, x^(i+m), ..., x^(i+(k-2)m)}` for `0 <= i < m` with
//! `m (k - 1) = p^a - 1`. The design consists of every translate of every base
//! block; instances are sorted by content, then translate, then base block.

use std::collections::HashMap;

use thiserror::Error;

use crate::field::{prime_power, Elem, Field, FieldError};
use crate::structures::{Design, LocalResolutionSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SprottError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("block size {0} must be at least 2")]
    BlockSizeTooSmall(usize),
    #[error("{order} - 1 is not divisible by block size {k} minus one")]
    Divisibility { order: u32, k: usize },
    #[error("base block {block} has coincident entries")]
    CoincidentEntries { block: usize },
    #[error("block size {k} is not below the number of points {v}")]
    NotIncomplete { k: usize, v: usize },
    #[error("q = {0} is not a power of two")]
    NotPowerOfTwo(u32),
    #[error("q = 2 gives k = v; need q >= 4")]
    DegenerateOrder,
    #[error("point {point}: described block {block:?} matches no unused instance")]
    NoMatchingInstance { point: Elem, block: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct DifferenceFamily {
    pub field: Field,
    pub base_blocks: Vec<Vec<Elem>>,
}

impl DifferenceFamily {
    pub fn m(&self) -> usize {
        self.base_blocks.len()
    }
}

/// A developed difference family. `origins[i]` is the (base block, translate)
/// pair that produced instance `i`.
#[derive(Debug, Clone)]
pub struct SprottDesign {
    pub family: DifferenceFamily,
    pub design: Design,
    pub origins: Vec<(usize, Elem)>,
}

/// Develops Sprott's base blocks over GF(p^a) with block size `k`.
pub fn sprott_design(p: u32, a: u32, k: usize) -> Result<SprottDesign, SprottError> {
    let field = Field::new(p, a)?;
    if k < 2 {
        return Err(SprottError::BlockSizeTooSmall(k));
    }
    let order = field.order();
    let n = (order - 1) as usize;
    if !n.is_multiple_of(k - 1) {
        return Err(SprottError::Divisibility { order, k });
    }
    let m = n / (k - 1);
    let v = order as usize;
    if k >= v {
        return Err(SprottError::NotIncomplete { k, v });
    }
    let mut base_blocks = Vec::with_capacity(m);
    for i in 0..m {
        let mut block: Vec<Elem> = std::iter::once(0)
            .chain((0..k - 1).map(|j| field.exp((i + j * m) as i64)))
            .collect();
        block.sort_unstable();
        if block.windows(2).any(|w| w[0] == w[1]) {
            return Err(SprottError::CoincidentEntries { block: i });
        }
        base_blocks.push(block);
    }

    let mut instances: Vec<(Vec<usize>, Elem, usize)> = Vec::with_capacity(m * v);
    for (i, base) in base_blocks.iter().enumerate() {
        for g in field.elements() {
            instances.push((translate(&field, base, g), g, i));
        }
    }
    instances.sort();
    let origins = instances.iter().map(|(_, g, i)| (*i, *g)).collect();
    let design = Design::new(v, instances.into_iter().map(|(b, _, _)| b).collect())
        .expect("translates of base blocks are well formed");
    Ok(SprottDesign { family: DifferenceFamily { field, base_blocks }, design, origins })
}

fn translate(field: &Field, block: &[Elem], g: Elem) -> Vec<usize> {
    let mut out: Vec<usize> = block.iter().map(|&e| field.add(e, g) as usize).collect();
    out.sort_unstable();
    out
}

/// The Sprott design for `(q^2, q+2)`, `q` a power of two, with its explicit
/// local resolution system.
///
/// About 0 the classes are the base blocks, and for `0 <= j <= q` the
/// multiples `x^(j+(q+1)i) * (0, 1, x^(q-1)+1, ..., x^(q(q-1))+1)` for
/// `0 <= i <= q-2`. The classes about `v` are those about 0 translated by `v`.
/// Each described point set is matched greedily to the lowest unused
/// instance with the same content.
pub fn sprott_lrs(q: u32) -> Result<(SprottDesign, LocalResolutionSystem), SprottError> {
    let e = match prime_power(q) {
        Some((2, e)) => e,
        _ => return Err(SprottError::NotPowerOfTwo(q)),
    };
    if q == 2 {
        return Err(SprottError::DegenerateOrder);
    }
    let sd = sprott_design(2, 2 * e, q as usize + 2)?;
    let f = &sd.family.field;
    let qi = q as i64;

    let mut about_zero: Vec<Vec<Vec<Elem>>> = vec![sd.family.base_blocks.clone()];
    let shape: Vec<Elem> = std::iter::once(0)
        .chain(std::iter::once(1))
        .chain((1..=qi).map(|l| f.add(f.exp(l * (qi - 1)), 1)))
        .collect();
    for j in 0..=qi {
        let class = (0..=qi - 2)
            .map(|i| {
                let c = f.exp(j + (qi + 1) * i);
                shape.iter().map(|&s| f.mul(c, s)).collect()
            })
            .collect();
        about_zero.push(class);
    }

    let mut by_content: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (i, b) in sd.design.blocks().iter().enumerate() {
        by_content.entry(b.as_slice()).or_default().push(i);
    }
    let mut classes = Vec::with_capacity(f.order() as usize);
    for point in f.elements() {
        let mut used: HashMap<&[usize], usize> = HashMap::new();
        let mut about = Vec::with_capacity(about_zero.len());
        for class in &about_zero {
            let mut instances = Vec::with_capacity(class.len());
            for block in class {
                let content = translate(f, block, point);
                let pool = by_content.get(content.as_slice());
                let next = used.get(content.as_slice()).copied().unwrap_or(0);
                match pool.and_then(|p| p.get(next)) {
                    Some(&inst) => {
                        let key = sd.design.block(inst);
                        used.insert(key, next + 1);
                        instances.push(inst);
                    }
                    None => return Err(SprottError::NoMatchingInstance { point, block: content }),
                }
            }
            about.push(instances);
        }
        classes.push(about);
    }
    Ok((sd, LocalResolutionSystem::new(classes)))
}

/// AG(2,q): point `(x,y)` is `x*q + y`; lines `y = mx + c` ordered by `(m,c)`,
/// then the verticals `x = c`.
pub fn affine_plane(q: u32) -> Result<Design, FieldError> {
    let f = Field::of_order(q)?;
    let n = q as usize;
    let mut blocks = Vec::with_capacity(n * n + n);
    for m in f.elements() {
        for c in f.elements() {
            blocks.push(f.elements().map(|x| x as usize * n + f.add(f.mul(m, x), c) as usize).collect());
        }
    }
    for c in 0..n {
        blocks.push((0..n).map(|y| c * n + y).collect());
    }
    Ok(Design::new(n * n, blocks).expect("affine lines are well formed"))
}

/// Repeats every instance `copies` times in place: instance `i` becomes
/// instances `i*copies .. (i+1)*copies`.
pub fn replicate(d: &Design, copies: usize) -> Design {
    assert!(copies >= 1, "replicate needs at least one copy");
    let blocks = d
        .blocks()
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.clone(), copies))
        .collect();
    Design::new(d.point_count(), blocks).expect("copies of a design are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{verify_balance, verify_bibd, verify_lrs, verify_non_triangular, BibdError, DesignParams};

    fn params(v: usize, b: usize, r: usize, k: usize, lambda: usize) -> DesignParams {
        DesignParams { v, b, r, k, lambda }
    }

    #[test]
    fn sprott_parameters() {
        let d = sprott_design(2, 4, 6).unwrap();
        assert_eq!(d.family.m(), 3);
        assert!(d.family.base_blocks.iter().all(|b| b[0] == 0 && b.len() == 6));
        assert_eq!(verify_bibd(&d.design).unwrap(), params(16, 48, 18, 6, 6));
        let d = sprott_design(3, 2, 3).unwrap();
        assert_eq!(verify_bibd(&d.design).unwrap(), params(9, 36, 12, 3, 3));
    }

    #[test]
    fn sprott_families_balance() {
        for q in [3u32, 4, 5] {
            let (p, a) = prime_power(q).unwrap();
            let d = sprott_design(p, 2 * a, q as usize).unwrap();
            let n = (q * q) as usize;
            let m = q as usize + 1;
            assert_eq!(verify_bibd(&d.design).unwrap(), params(n, m * n, m * q as usize, q as usize, q as usize));
        }
        for q in [4u32, 8] {
            let a = q.trailing_zeros();
            let d = sprott_design(2, 2 * a, q as usize + 2).unwrap();
            let n = (q * q) as usize;
            let m = q as usize - 1;
            let k = q as usize + 2;
            assert_eq!(verify_bibd(&d.design).unwrap(), params(n, m * n, m * k, k, k));
        }
    }

    #[test]
    fn sprott_errors() {
        assert_eq!(sprott_design(2, 2, 4).unwrap_err(), SprottError::NotIncomplete { k: 4, v: 4 });
        assert!(matches!(sprott_design(2, 4, 5), Err(SprottError::Divisibility { .. })));
        assert!(matches!(sprott_design(4, 1, 3), Err(SprottError::Field(FieldError::NotPrime(4)))));
        assert_eq!(sprott_design(2, 4, 1).unwrap_err(), SprottError::BlockSizeTooSmall(1));
        assert_eq!(sprott_lrs(2).unwrap_err(), SprottError::DegenerateOrder);
        assert_eq!(sprott_lrs(6).unwrap_err(), SprottError::NotPowerOfTwo(6));
        assert_eq!(sprott_lrs(9).unwrap_err(), SprottError::NotPowerOfTwo(9));
    }

    #[test]
    fn explicit_system_q4() {
        let (sd, lrs) = sprott_lrs(4).unwrap();
        for p in 0..16 {
            assert_eq!(lrs.about(p).len(), 6);
            assert!(lrs.about(p).iter().all(|c| c.len() == 3));
        }
        verify_lrs(&sd.design, &lrs).unwrap();
        verify_non_triangular(&sd.design, &lrs).unwrap();
    }

    #[test]
    fn explicit_system_q8() {
        let (sd, lrs) = sprott_lrs(8).unwrap();
        assert!((0..64).all(|p| lrs.about(p).len() == 10));
        verify_lrs(&sd.design, &lrs).unwrap();
        verify_non_triangular(&sd.design, &lrs).unwrap();
    }

    #[test]
    fn explicit_system_is_translation_equivariant() {
        let (sd, lrs) = sprott_lrs(4).unwrap();
        let f = &sd.family.field;
        let contents = |p: usize, shift: Elem| -> Vec<Vec<Vec<usize>>> {
            let mut classes: Vec<Vec<Vec<usize>>> = lrs
                .about(p)
                .iter()
                .map(|class| {
                    let mut c: Vec<Vec<usize>> = class
                        .iter()
                        .map(|&i| {
                            let b: Vec<Elem> = sd.design.block(i).iter().map(|&x| x as Elem).collect();
                            translate(f, &b, shift)
                        })
                        .collect();
                    c.sort();
                    c
                })
                .collect();
            classes.sort();
            classes
        };
        for v in f.elements() {
            for w in f.elements() {
                assert_eq!(contents(v as usize, w), contents(f.add(v, w) as usize, 0));
            }
        }
    }

    #[test]
    fn affine_planes() {
        assert_eq!(verify_bibd(&affine_plane(3).unwrap()).unwrap(), params(9, 12, 4, 3, 1));
        assert_eq!(verify_bibd(&affine_plane(4).unwrap()).unwrap(), params(16, 20, 5, 4, 1));
        let ag2 = affine_plane(2).unwrap();
        assert_eq!(verify_bibd(&ag2).unwrap_err(), BibdError::Trivial { params: params(4, 6, 3, 2, 1) });
        assert!(affine_plane(6).is_err());
    }

    #[test]
    fn replication() {
        let ag3 = affine_plane(3).unwrap();
        assert_eq!(replicate(&ag3, 1), ag3);
        let r = replicate(&ag3, 3);
        assert_eq!(verify_balance(&r).unwrap(), params(9, 36, 12, 3, 3));
        assert_eq!(r.block(4), ag3.block(1));
    }
}
