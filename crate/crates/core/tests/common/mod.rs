//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gqdesign::correspondence::nu;
use gqdesign::geometry::{build_h3, build_q4, build_w, payne_derivation};
use gqdesign::search::{find_ntlrs, find_ovoids, Budget, NtlrsOptions, ParallelGraph};
use gqdesign::sprott::{affine_plane, replicate, sprott_design, sprott_lrs};
use gqdesign::structures::{Design, IncidenceStructure, LocalResolutionSystem, Quadrangle};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fano() -> Design {
    Design::new(
        7,
        vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6], vec![1, 3, 5], vec![1, 4, 6], vec![2, 3, 6], vec![2, 4, 5]],
    )
    .unwrap()
}

pub fn gq(inc: IncidenceStructure) -> Quadrangle {
    Quadrangle::new(inc).unwrap()
}

/// Every subset of the candidates, kept when it partitions the universe.
pub fn brute_exact_cover(universe: usize, candidates: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << candidates.len()) {
        let mut seen = vec![0u32; universe];
        for (i, c) in candidates.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &e in c {
                    seen[e] += 1;
                }
            }
        }
        if seen.iter().all(|&n| n == 1) {
            out.push((0..candidates.len()).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

pub fn random_exact_cover(rng: &mut impl Rng) -> (usize, Vec<Vec<usize>>) {
    let universe = rng.gen_range(0..=12);
    let count = rng.gen_range(0..=14);
    let mut candidates = Vec::with_capacity(count);
    for _ in 0..count {
        if universe == 0 {
            break;
        }
        // Bias towards small subsets so that covers actually occur.
        let size = rng.gen_range(1..=universe.min(4));
        let mut all: Vec<usize> = (0..universe).collect();
        all.shuffle(rng);
        let mut c: Vec<usize> = all[..size].to_vec();
        c.sort_unstable();
        candidates.push(c);
    }
    (universe, candidates)
}

/// The defining condition checked literally: no three distinct instances
/// that are pairwise co-class, with at least two distinct points involved.
pub fn naive_non_triangular(d: &Design, lrs: &LocalResolutionSystem) -> bool {
    let b = d.block_count();
    let mut coclass = vec![vec![BTreeSet::new(); b]; b];
    for (p, classes) in lrs.classes().iter().enumerate() {
        for class in classes {
            for &x in class {
                for &y in class {
                    if x != y {
                        coclass[x][y].insert(p);
                    }
                }
            }
        }
    }
    for x in 0..b {
        for y in x + 1..b {
            for z in y + 1..b {
                for &p in &coclass[x][y] {
                    for &q in &coclass[y][z] {
                        for &r in &coclass[x][z] {
                            if !(p == q && q == r) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

/// Each labeled edge `(b, c, p)` of the parallel graph must have `b ∩ c = {p}`.
pub fn parallel_graph_invariant(d: &Design, lrs: &LocalResolutionSystem) -> bool {
    let mut g = ParallelGraph::new(d.block_count());
    for (p, classes) in lrs.classes().iter().enumerate() {
        for class in classes {
            if g.insert_class(p, class).is_err() {
                return false;
            }
        }
    }
    g.edges().into_iter().all(|(b, c, p)| {
        let common: Vec<usize> = d.block(b).iter().copied().filter(|x| d.block(c).contains(x)).collect();
        common == [p]
    })
}

/// Quadrangles used throughout the property suites.
pub fn corpus_structures() -> Vec<(&'static str, IncidenceStructure)> {
    let w3 = gq(build_w(3).unwrap());
    vec![
        ("W(2)", build_w(2).unwrap()),
        ("Q(4,2)", build_q4(2).unwrap()),
        ("W(3)", build_w(3).unwrap()),
        ("Q(4,3)", build_q4(3).unwrap()),
        ("H(3,4)", build_h3(2).unwrap()),
        ("P(W(3))", payne_derivation(&w3, 0).unwrap()),
        ("Fano", fano().to_incidence()),
        ("3AG(2,3)", replicate(&affine_plane(3).unwrap(), 3).to_incidence()),
    ]
}

/// Designs with a local resolution system, both non-triangular and not.
pub fn corpus_systems() -> Vec<(&'static str, Design, LocalResolutionSystem)> {
    let mut out = Vec::new();
    let w2 = gq(build_w(2).unwrap());
    for o in find_ovoids(&w2, None, Budget::unlimited()).solutions {
        let n = nu(&w2, &o, false).unwrap();
        out.push(("nu(W(2))", n.design, n.lrs));
    }
    let q43 = gq(build_q4(3).unwrap());
    let o = find_ovoids(&q43, Some(1), Budget::unlimited()).solutions.remove(0);
    let n = nu(&q43, &o, false).unwrap();
    out.push(("nu(Q(4,3))", n.design, n.lrs));
    for q in [4, 8] {
        let (sd, lrs) = sprott_lrs(q).unwrap();
        out.push(("sprott", sd.design, lrs));
    }
    let ag3 = replicate(&affine_plane(3).unwrap(), 3);
    let found = find_ntlrs(&ag3, &NtlrsOptions { limit: Some(1), ..Default::default() });
    out.push(("ntlrs(3AG(2,3))", ag3.clone(), found.solutions[0].clone()));
    // Copy i of every line in class i: triangular.
    let classes = ag3
        .instances_through()
        .iter()
        .map(|insts| (0..3).map(|copy| insts.iter().copied().filter(|i| i % 3 == copy).collect()).collect())
        .collect();
    out.push(("copies(3AG(2,3))", ag3, LocalResolutionSystem::new(classes)));
    let f = fano();
    let single = LocalResolutionSystem::new(f.instances_through().into_iter().map(|c| vec![c]).collect());
    out.push(("Fano", f, single));
    let sd = sprott_design(3, 2, 3).unwrap();
    let found = find_ntlrs(&sd.design, &NtlrsOptions { limit: Some(1), ..Default::default() });
    if let Some(lrs) = found.solutions.into_iter().next() {
        out.push(("ntlrs(sprott(3))", sd.design, lrs));
    }
    out
}

/// A uniformly random permutation of `0..n`.
pub fn random_perm(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
