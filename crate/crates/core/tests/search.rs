mod common;

use std::collections::{BTreeMap, BTreeSet};

use gqdesign::correspondence::nu;
use gqdesign::geometry::build_w;
use gqdesign::search::{find_ntlrs, find_ovoids, Budget, NtlrsOptions};
use gqdesign::sprott::replicate;
use gqdesign::structures::{Design, LocalResolutionSystem};

use common::*;

type Classes = Vec<Vec<usize>>;

/// All partitions of the instances through `p` into parallel classes,
/// by plain recursion over the lowest unplaced instance.
fn naive_local_resolutions(d: &Design, p: usize) -> Vec<Classes> {
    let through: Vec<usize> = (0..d.block_count()).filter(|&i| d.contains(i, p)).collect();
    let rest = d.point_count() - 1;
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn grow(
        d: &Design,
        p: usize,
        rest: usize,
        left: &[usize],
        class: &mut Vec<usize>,
        covered: &mut BTreeSet<usize>,
        done: &mut Classes,
        out: &mut Vec<Classes>,
    ) {
        if covered.len() == rest {
            done.push(class.clone());
            let remaining: Vec<usize> = left.to_vec();
            if remaining.is_empty() {
                out.push(done.clone());
            } else {
                let first = remaining[0];
                let mut c = vec![first];
                let mut cov: BTreeSet<usize> = d.block(first).iter().copied().filter(|&x| x != p).collect();
                grow(d, p, rest, &remaining[1..], &mut c, &mut cov, done, out);
            }
            done.pop();
            return;
        }
        let last = *class.last().unwrap();
        for (i, &b) in left.iter().enumerate() {
            if b < last {
                continue;
            }
            let pts: Vec<usize> = d.block(b).iter().copied().filter(|&x| x != p).collect();
            if pts.iter().any(|x| covered.contains(x)) {
                continue;
            }
            let mut next: Vec<usize> = left.to_vec();
            next.remove(i);
            class.push(b);
            pts.iter().for_each(|&x| {
                covered.insert(x);
            });
            grow(d, p, rest, &next, class, covered, done, out);
            pts.iter().for_each(|x| {
                covered.remove(x);
            });
            class.pop();
        }
    }
    if through.is_empty() {
        return out;
    }
    let first = through[0];
    let mut cov: BTreeSet<usize> = d.block(first).iter().copied().filter(|&x| x != p).collect();
    grow(d, p, rest, &through[1..], &mut vec![first], &mut cov, &mut Vec::new(), &mut out);
    out
}

/// Every non-triangular system, by the product of naive local resolutions.
fn naive_systems(d: &Design) -> Vec<LocalResolutionSystem> {
    let per_point: Vec<Vec<Classes>> = (0..d.point_count()).map(|p| naive_local_resolutions(d, p)).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; per_point.len()];
    if per_point.iter().any(|r| r.is_empty()) {
        return out;
    }
    loop {
        let lrs = LocalResolutionSystem::new(pick.iter().enumerate().map(|(p, &i)| per_point[p][i].clone()).collect());
        if naive_non_triangular(d, &lrs) {
            out.push(lrs);
        }
        let mut j = 0;
        loop {
            if j == pick.len() {
                return out;
            }
            pick[j] += 1;
            if pick[j] < per_point[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

/// Permutations of instances that only swap identical blocks.
fn twin_group(d: &Design) -> Vec<Vec<usize>> {
    let mut twins: BTreeMap<&Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, b) in d.blocks().iter().enumerate() {
        twins.entry(b).or_default().push(i);
    }
    let mut group = vec![(0..d.block_count()).collect::<Vec<usize>>()];
    for members in twins.values() {
        let perms = permutations(members);
        group = group
            .iter()
            .flat_map(|g| {
                perms.iter().map(move |image| {
                    let mut h = g.clone();
                    for (&from, &to) in members.iter().zip(image) {
                        h[from] = to;
                    }
                    h
                })
            })
            .collect();
    }
    group
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn orbit_key(lrs: &LocalResolutionSystem, group: &[Vec<usize>]) -> Vec<Classes> {
    group
        .iter()
        .map(|g| {
            lrs.classes()
                .iter()
                .map(|classes| {
                    let mut cs: Classes = classes
                        .iter()
                        .map(|c| {
                            let mut c: Vec<usize> = c.iter().map(|&i| g[i]).collect();
                            c.sort_unstable();
                            c
                        })
                        .collect();
                    cs.sort();
                    cs
                })
                .collect()
        })
        .min()
        .unwrap()
}

fn orbit_count(d: &Design, systems: &[LocalResolutionSystem]) -> usize {
    let group = twin_group(d);
    systems.iter().map(|s| orbit_key(s, &group)).collect::<BTreeSet<_>>().len()
}

fn all_pairs(v: usize) -> Design {
    Design::new(v, (0..v).flat_map(|a| (a + 1..v).map(move |b| vec![a, b])).collect()).unwrap()
}

fn pairs_of_four() -> Design {
    all_pairs(4)
}

fn check_against_naive(d: &Design) -> usize {
    let naive = naive_systems(d);
    let found = find_ntlrs(d, &NtlrsOptions::default());
    assert!(found.exhausted());
    assert_eq!(found.solutions.len(), orbit_count(d, &naive));
    // Distinct orbits among the reported systems, too.
    assert_eq!(orbit_count(d, &found.solutions), found.solutions.len());
    for threads in [2, 4] {
        for seed in [0, 3] {
            let other = find_ntlrs(d, &NtlrsOptions { threads, seed, ..Default::default() });
            assert_eq!(other.solutions.len(), found.solutions.len(), "threads={threads} seed={seed}");
        }
    }
    found.solutions.len()
}

#[test]
fn ntlrs_without_twins_matches_naive_product() {
    let w2 = gq(build_w(2).unwrap());
    for o in find_ovoids(&w2, Some(2), Budget::unlimited()).solutions {
        // The system nu produces is among them.
        assert!(check_against_naive(&nu(&w2, &o, false).unwrap().design) >= 1);
    }
    check_against_naive(&pairs_of_four());
}

#[test]
fn ntlrs_with_twins_counts_orbits() {
    let pairs = check_against_naive(&replicate(&pairs_of_four(), 2));
    let fano2 = check_against_naive(&replicate(&fano(), 2));
    let five = check_against_naive(&replicate(&all_pairs(5), 2));
    check_against_naive(&replicate(&all_pairs(3), 3));
    let mut shuffled = replicate(&all_pairs(4), 2).blocks().to_vec();
    shuffled.reverse();
    check_against_naive(&Design::new(4, shuffled).unwrap());
    println!("orbits: K4 x2 = {pairs}, K5 x2 = {five}, Fano x2 = {fano2}");
    assert!(pairs >= 1 && five >= 1);
}

#[test]
fn local_resolution_counts_match_naive() {
    use gqdesign::search::find_local_resolutions;
    let w2 = gq(build_w(2).unwrap());
    let o = find_ovoids(&w2, Some(1), Budget::unlimited()).solutions.remove(0);
    let d = nu(&w2, &o, false).unwrap().design;
    for p in 0..d.point_count() {
        let mut naive: Vec<Classes> = naive_local_resolutions(&d, p)
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        naive.sort();
        let mut found: Vec<Classes> = find_local_resolutions(&d, p, None, Budget::unlimited())
            .unwrap()
            .solutions
            .into_iter()
            .map(|mut c| {
                c.iter_mut().for_each(|x| x.sort_unstable());
                c.sort();
                c
            })
            .collect();
        found.sort();
        assert_eq!(found, naive);
    }
}

#[test]
fn sprott_q4_system_is_unique() {
    use gqdesign::search::find_local_resolutions;
    use gqdesign::sprott::sprott_lrs;
    let (sd, explicit) = sprott_lrs(4).unwrap();
    let d = &sd.design;
    let found = find_ntlrs(d, &NtlrsOptions::default());
    assert!(found.exhausted());
    assert_eq!(found.solutions.len(), 1);
    let group = twin_group(d);
    assert_eq!(orbit_key(&found.solutions[0], &group), orbit_key(&explicit, &group));
    // Unique about each point on its own as well.
    let per_point: Vec<usize> = (0..d.point_count())
        .map(|p| find_local_resolutions(d, p, None, Budget::unlimited()).unwrap().solutions.len())
        .collect();
    println!("local resolutions per point: {per_point:?}");
    assert!(per_point.iter().all(|&n| n == 1));
}

#[test]
fn three_affine_planes_have_one_system_up_to_twins() {
    use gqdesign::canon::{canonical_form, ColoredIncidenceGraph};
    use gqdesign::correspondence::mu;
    use gqdesign::sprott::affine_plane;
    let d = replicate(&affine_plane(3).unwrap(), 3);
    let found = find_ntlrs(&d, &NtlrsOptions::default());
    assert!(found.exhausted());
    assert_eq!(found.solutions.len(), 1);
    let parallel = find_ntlrs(&d, &NtlrsOptions { threads: 4, ..Default::default() });
    assert!(parallel.exhausted());
    assert_eq!(parallel.solutions.len(), 1);
    let cert = |l| canonical_form(&ColoredIncidenceGraph::from_structure(mu(&d, l, false).unwrap().gq.structure())).certificate;
    assert_eq!(cert(&found.solutions[0]), cert(&parallel.solutions[0]));
    let gq = mu(&d, &found.solutions[0], false).unwrap().gq;
    assert_eq!((gq.params().s, gq.params().t), (4, 2));
}
