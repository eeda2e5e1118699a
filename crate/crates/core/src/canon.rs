//! Canonical labeling of colored incidence graphs by partition refinement
//! with individualization, and isomorphism testing on top of it.
//!
//! The graph is bipartite: one vertex per point and one per line (or block
//! instance). Points always precede lines in the canonical order. The search
//! keeps the smallest leaf certificate, records automorphisms discovered when
//! two leaves coincide, skips children that are equivalent under automorphisms
//! fixing the current path, and jumps back to the common ancestor whenever a
//! leaf matches the first or the best leaf.

use sha2::{Digest, Sha256};

use crate::structures::{Design, IncidenceStructure, Ovoid};

/// Bipartite incidence graph with per-vertex colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredIncidenceGraph {
    points: usize,
    lines: Vec<Vec<usize>>,
    point_colors: Vec<u32>,
    line_colors: Vec<u32>,
}

impl ColoredIncidenceGraph {
    pub fn new(points: usize, lines: Vec<Vec<usize>>) -> Self {
        let line_colors = vec![0; lines.len()];
        ColoredIncidenceGraph { points, lines, point_colors: vec![0; points], line_colors }
    }

    pub fn from_structure(s: &IncidenceStructure) -> Self {
        Self::new(s.point_count(), s.lines().to_vec())
    }

    /// Points and block instances; repeated blocks stay separate vertices.
    pub fn from_design(d: &Design) -> Self {
        Self::new(d.point_count(), d.blocks().to_vec())
    }

    pub fn with_point_colors(mut self, colors: Vec<u32>) -> Self {
        assert_eq!(colors.len(), self.points);
        self.point_colors = colors;
        self
    }

    /// Colors ovoid points 1 and all other points 0.
    pub fn with_ovoid(self, o: &Ovoid) -> Self {
        let colors = (0..self.points).map(|x| o.contains(x) as u32).collect();
        self.with_point_colors(colors)
    }

    pub fn point_count(&self) -> usize {
        self.points
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    fn vertex_count(&self) -> usize {
        self.points + self.lines.len()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (l, line) in self.lines.iter().enumerate() {
            let lv = self.points + l;
            for &x in line {
                adj[x].push(lv);
                adj[lv].push(x);
            }
        }
        adj
    }

    /// Initial coloring key: side first, then user color.
    fn key(&self, v: usize) -> (u32, u32) {
        if v < self.points {
            (0, self.point_colors[v])
        } else {
            (1, self.line_colors[v - self.points])
        }
    }
}

/// Invariant of the isomorphism class of a colored incidence graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    data: Vec<u32>,
}

impl Certificate {
    /// SHA-256 of the certificate, lowercase hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.data {
            h.update(w.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub certificate: Certificate,
    /// `order[i]` is the vertex placed at canonical position `i`; vertices
    /// `0..points` are points, the rest lines.
    pub order: Vec<usize>,
}

/// Ordered partition of the vertex set.
#[derive(Clone)]
struct Partition {
    order: Vec<usize>,
    /// Start index of the cell containing each vertex.
    cell: Vec<usize>,
    /// Length of the cell starting at each index (only meaningful at starts).
    len: Vec<usize>,
}

impl Partition {
    fn initial(g: &ColoredIncidenceGraph) -> Self {
        let n = g.vertex_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| g.key(v));
        let mut p = Partition { order, cell: vec![0; n], len: vec![0; n] };
        let mut start = 0;
        for i in 1..=n {
            if i == n || g.key(p.order[i]) != g.key(p.order[start]) {
                p.set_cell(start, i - start);
                start = i;
            }
        }
        p
    }

    fn set_cell(&mut self, start: usize, len: usize) {
        self.len[start] = len;
        for i in start..start + len {
            self.cell[self.order[i]] = start;
        }
    }

    fn starts(&self) -> Vec<usize> {
        let mut starts = Vec::new();
        let mut i = 0;
        while i < self.order.len() {
            starts.push(i);
            i += self.len[i];
        }
        starts
    }

    /// Splits cells by the multiset of neighbor cells until stable.
    fn refine(&mut self, adj: &[Vec<usize>]) {
        let mut sig: Vec<Vec<usize>> = vec![Vec::new(); self.order.len()];
        loop {
            for (v, s) in sig.iter_mut().enumerate() {
                s.clear();
                s.extend(adj[v].iter().map(|&w| self.cell[w]));
                s.sort_unstable();
            }
            let mut split = false;
            for start in self.starts() {
                let len = self.len[start];
                if len == 1 {
                    continue;
                }
                let slice = &mut self.order[start..start + len];
                slice.sort_by(|&a, &b| sig[a].cmp(&sig[b]));
                let mut bounds = vec![start];
                for i in start + 1..start + len {
                    if sig[self.order[i]] != sig[self.order[i - 1]] {
                        bounds.push(i);
                    }
                }
                if bounds.len() == 1 {
                    continue;
                }
                split = true;
                bounds.push(start + len);
                for w in bounds.windows(2) {
                    self.set_cell(w[0], w[1] - w[0]);
                }
            }
            if !split {
                return;
            }
        }
    }

    /// First smallest non-singleton cell.
    fn target(&self) -> Option<usize> {
        self.starts()
            .into_iter()
            .filter(|&s| self.len[s] > 1)
            .min_by_key(|&s| (self.len[s], s))
    }

    /// Moves `v` into its own cell at the front of its current cell.
    fn individualize(&self, v: usize) -> Partition {
        let mut p = self.clone();
        let start = p.cell[v];
        let len = p.len[start];
        let at = p.order[start..start + len].iter().position(|&w| w == v).unwrap() + start;
        p.order.swap(start, at);
        p.set_cell(start, 1);
        p.set_cell(start + 1, len - 1);
        p
    }
}

struct Leaf {
    cert: Vec<u32>,
    order: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'g> {
    g: &'g ColoredIncidenceGraph,
    adj: Vec<Vec<usize>>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn certificate(&self, order: &[usize]) -> Vec<u32> {
        let n = order.len();
        let mut pos = vec![0u32; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i as u32;
        }
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (l, line) in self.g.lines.iter().enumerate() {
            let lp = pos[self.g.points + l];
            edges.extend(line.iter().map(|&x| (pos[x], lp)));
        }
        edges.sort_unstable();
        let mut data = vec![self.g.points as u32, self.g.lines.len() as u32, edges.len() as u32];
        for &v in order {
            let (side, color) = self.g.key(v);
            data.push(side);
            data.push(color);
        }
        for (a, b) in edges {
            data.push(a);
            data.push(b);
        }
        data
    }

    /// Automorphism mapping leaf `from` onto leaf `to`.
    fn automorphism(from: &[usize], to: &[usize]) -> Vec<usize> {
        let mut perm = vec![0; from.len()];
        for (i, &v) in from.iter().enumerate() {
            perm[v] = to[i];
        }
        perm
    }

    fn common_prefix(a: &[usize], b: &[usize]) -> usize {
        a.iter().zip(b).take_while(|(x, y)| x == y).count()
    }

    /// Returns `Some(level)` to abandon every node deeper than `level`.
    fn visit(&mut self, part: Partition, path: &mut Vec<usize>) -> Option<usize> {
        let Some(start) = part.target() else {
            return self.leaf(part.order, path);
        };
        let mut cell: Vec<usize> = part.order[start..start + part.len[start]].to_vec();
        cell.sort_unstable();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.equivalent_to_explored(path, &cell, &explored, v) {
                continue;
            }
            let mut child = part.individualize(v);
            child.refine(&self.adj);
            path.push(v);
            let jump = self.visit(child, path);
            path.pop();
            explored.push(v);
            if let Some(level) = jump {
                if level < path.len() {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, order: Vec<usize>, path: &[usize]) -> Option<usize> {
        let cert = self.certificate(&order);
        let Some(first) = &self.first else {
            let leaf = Leaf { cert, order, path: path.to_vec() };
            self.best = Some(Leaf { cert: leaf.cert.clone(), order: leaf.order.clone(), path: leaf.path.clone() });
            self.first = Some(leaf);
            return None;
        };
        if cert == first.cert {
            let aut = Self::automorphism(&first.order, &order);
            let level = Self::common_prefix(&first.path, path);
            self.automorphisms.push(aut);
            return Some(level);
        }
        let best = self.best.as_ref().unwrap();
        if cert == best.cert {
            let aut = Self::automorphism(&best.order, &order);
            let level = Self::common_prefix(&best.path, path);
            self.automorphisms.push(aut);
            return Some(level);
        }
        if cert < best.cert {
            self.best = Some(Leaf { cert, order, path: path.to_vec() });
        }
        None
    }

    /// Whether `v` shares an orbit with an explored sibling under the
    /// automorphisms found so far that fix `path` pointwise.
    fn equivalent_to_explored(&self, path: &[usize], cell: &[usize], explored: &[usize], v: usize) -> bool {
        let n = self.g.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for aut in &self.automorphisms {
            if path.iter().any(|&x| aut[x] != x) {
                continue;
            }
            any = true;
            for &x in cell {
                let (a, b) = (find(&mut parent, x), find(&mut parent, aut[x]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == root)
    }
}

pub fn canonical_form(g: &ColoredIncidenceGraph) -> CanonicalForm {
    let mut search = Search { g, adj: g.adjacency(), first: None, best: None, automorphisms: Vec::new() };
    let mut root = Partition::initial(g);
    root.refine(&search.adj);
    search.visit(root, &mut Vec::new());
    let best = search.best.expect("search reaches at least one leaf");
    CanonicalForm { certificate: Certificate { data: best.cert }, order: best.order }
}

/// Point and line bijection from one graph onto another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub point_map: Vec<usize>,
    pub line_map: Vec<usize>,
}

/// Checks that `iso` preserves colors and carries every line of `a` onto the
/// corresponding line of `b`.
pub fn check_isomorphism(a: &ColoredIncidenceGraph, b: &ColoredIncidenceGraph, iso: &Isomorphism) -> bool {
    if a.points != b.points || a.lines.len() != b.lines.len() {
        return false;
    }
    if iso.point_map.len() != a.points || iso.line_map.len() != a.lines.len() {
        return false;
    }
    let mut hit_p = vec![false; b.points];
    let mut hit_l = vec![false; b.lines.len()];
    for (x, &y) in iso.point_map.iter().enumerate() {
        if y >= b.points || std::mem::replace(&mut hit_p[y], true) || a.point_colors[x] != b.point_colors[y] {
            return false;
        }
    }
    for (l, &m) in iso.line_map.iter().enumerate() {
        if m >= b.lines.len() || std::mem::replace(&mut hit_l[m], true) || a.line_colors[l] != b.line_colors[m] {
            return false;
        }
        let mut image: Vec<usize> = a.lines[l].iter().map(|&x| iso.point_map[x]).collect();
        image.sort_unstable();
        let mut target = b.lines[m].clone();
        target.sort_unstable();
        if image != target {
            return false;
        }
    }
    true
}

/// An explicit, verified isomorphism when the certificates agree.
pub fn are_isomorphic(a: &ColoredIncidenceGraph, b: &ColoredIncidenceGraph) -> Option<Isomorphism> {
    if a.points != b.points || a.lines.len() != b.lines.len() {
        return None;
    }
    let (ca, cb) = (canonical_form(a), canonical_form(b));
    if ca.certificate != cb.certificate {
        return None;
    }
    let n = a.points;
    let mut point_map = vec![0; n];
    let mut line_map = vec![0; a.lines.len()];
    for (&va, &vb) in ca.order.iter().zip(&cb.order) {
        if va < n {
            point_map[va] = vb;
        } else {
            line_map[va - n] = vb - n;
        }
    }
    let iso = Isomorphism { point_map, line_map };
    check_isomorphism(a, b, &iso).then_some(iso)
}
