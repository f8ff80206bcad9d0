//! Finite directed graphs, paths in operator order and shape predicates.
//!
//! An edge `e` has a source `s(e)` and a range `r(e)`. A path
//! `e_1 … e_k` is stored in operator order: `s(e_j) = r(e_{j+1})`, so the
//! rightmost edge is traversed first. The JSON format and the path strings
//! use walk order (first traversed edge first); conversion happens at the
//! boundary.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub rng: usize,
}

#[derive(Clone, Debug)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    no_sources: bool,
    no_sinks: bool,
}

#[derive(Deserialize, Serialize)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<EdgeDoc>,
}

#[derive(Deserialize, Serialize)]
struct EdgeDoc {
    name: String,
    src: String,
    dst: String,
}

/// A path in operator order. Length-0 paths are vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub edges: Vec<usize>,
    pub src: usize,
    pub rng: usize,
}

impl Path {
    pub fn vertex(v: usize) -> Self {
        Path {
            edges: Vec::new(),
            src: v,
            rng: v,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub no_sources: bool,
    pub no_sinks: bool,
    pub transitive: bool,
    pub is_cycle: bool,
    pub is_cycle_with_entry: bool,
    pub out_degree_all_one: bool,
}

/// Which length-`q` path is fixed as the reference path at each vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiChoice {
    #[default]
    LexMin,
    LexMax,
}

impl Graph {
    /// Builds a graph from vertex names and `(edge, src, dst)` triples.
    pub fn new(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        Self::from_parts(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(n, s, d)| (n.to_string(), s.to_string(), d.to_string()))
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph: {e}")))?;
        Self::from_parts(
            doc.vertices,
            doc.edges.into_iter().map(|e| (e.name, e.src, e.dst)).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    name: e.name.clone(),
                    src: self.vertices[e.src].clone(),
                    dst: self.vertices[e.rng].clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("graph serializes")
    }

    fn from_parts(vertices: Vec<String>, edges: Vec<(String, String, String)>) -> Result<Self> {
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        let mut es = Vec::with_capacity(edges.len());
        for (i, (name, src, dst)) in edges.into_iter().enumerate() {
            if edge_index.insert(name.clone(), i).is_some() || vertex_index.contains_key(&name) {
                return Err(Error::DuplicateId(name));
            }
            let lookup = |v: &String| {
                vertex_index.get(v).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: name.clone(),
                    vertex: v.clone(),
                })
            };
            let (s, r) = (lookup(&src)?, lookup(&dst)?);
            es.push(Edge { name, src: s, rng: r });
        }
        let n = vertices.len();
        let no_sources = (0..n).all(|v| es.iter().any(|e| e.rng == v));
        let no_sinks = (0..n).all(|v| es.iter().any(|e| e.src == v));
        Ok(Graph {
            vertices,
            edges: es,
            vertex_index,
            edge_index,
            no_sources,
            no_sinks,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e].name
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<usize> {
        self.edge_index.get(name).copied()
    }

    pub fn s(&self, e: usize) -> usize {
        self.edges[e].src
    }

    pub fn r(&self, e: usize) -> usize {
        self.edges[e].rng
    }

    pub fn no_sources(&self) -> bool {
        self.no_sources
    }

    pub fn no_sinks(&self) -> bool {
        self.no_sinks
    }

    /// `a[v][w]` = number of edges with source `v` and range `w`.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u64; n]; n];
        for e in &self.edges {
            a[e.src][e.rng] += 1;
        }
        a
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.src == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.rng == v).count()
    }

    /// Vertices reachable from `v` by walking along edges (including `v`).
    pub fn reachable_from(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        while let Some(x) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.src == x) {
                if !seen[e.rng] {
                    seen[e.rng] = true;
                    queue.push_back(e.rng);
                }
            }
        }
        seen
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.reachable_from(v).iter().all(|&b| b))
    }

    fn weakly_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.src, e.rng), (e.rng, e.src)] {
                    if a == x && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn validate(&self) -> ShapeReport {
        let n = self.vertex_count();
        let out_one = n > 0 && (0..n).all(|v| self.out_degree(v) == 1);
        let cycle_with_entry = out_one && self.edge_count() == n && self.weakly_connected() && {
            let roots: Vec<usize> = (0..n).filter(|&v| self.in_degree(v) == 0).collect();
            if roots.len() > 1 {
                false
            } else {
                let mut seen = vec![false; n];
                let mut v = roots.first().copied().unwrap_or(0);
                while !seen[v] {
                    seen[v] = true;
                    v = self.edges.iter().find(|e| e.src == v).map(|e| e.rng).unwrap();
                }
                seen.into_iter().all(|b| b)
            }
        };
        let is_cycle = cycle_with_entry && (0..n).all(|v| self.in_degree(v) == 1);
        ShapeReport {
            no_sources: self.no_sources,
            no_sinks: self.no_sinks,
            transitive: self.is_transitive(),
            is_cycle,
            is_cycle_with_entry: cycle_with_entry,
            out_degree_all_one: out_one,
        }
    }

    /// All paths of length `k` in canonical order (lexicographic in the
    /// operator-order edge sequence). `k = 0` yields the vertices.
    pub fn paths(&self, k: usize) -> Vec<Path> {
        let mut level: Vec<Path> = (0..self.vertex_count()).map(Path::vertex).collect();
        for _ in 0..k {
            let mut next = Vec::new();
            for (e, edge) in self.edges.iter().enumerate() {
                for beta in level.iter().filter(|b| b.rng == edge.src) {
                    next.push(self.prepend(e, beta).expect("ranges match"));
                }
            }
            level = next;
        }
        level
    }

    /// `e·β`, defined when `r(β) = s(e)`.
    pub fn prepend(&self, e: usize, beta: &Path) -> Option<Path> {
        if beta.rng != self.s(e) {
            return None;
        }
        let mut edges = Vec::with_capacity(beta.len() + 1);
        edges.push(e);
        edges.extend_from_slice(&beta.edges);
        Some(Path {
            edges,
            src: beta.src,
            rng: self.r(e),
        })
    }

    /// `αβ`, defined iff `r(β) = s(α)`.
    pub fn compose(&self, alpha: &Path, beta: &Path) -> Option<Path> {
        if beta.rng != alpha.src {
            return None;
        }
        let mut edges = alpha.edges.clone();
        edges.extend_from_slice(&beta.edges);
        Some(Path {
            edges,
            src: beta.src,
            rng: alpha.rng,
        })
    }

    /// Path from operator-order edge indices; checks composability.
    pub fn path_from_edges(&self, edges: &[usize]) -> Option<Path> {
        let (first, last) = (edges.first()?, edges.last()?);
        if edges.windows(2).any(|w| self.s(w[0]) != self.r(w[1])) {
            return None;
        }
        Some(Path {
            edges: edges.to_vec(),
            src: self.s(*last),
            rng: self.r(*first),
        })
    }

    /// Walk-order string: edge names joined by `.`, first traversed edge first.
    pub fn walk_string(&self, p: &Path) -> String {
        if p.is_empty() {
            return self.vertices[p.src].clone();
        }
        p.edges
            .iter()
            .rev()
            .map(|&e| self.edges[e].name.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Parses a walk-order string (or a vertex name for a length-0 path).
    pub fn parse_walk(&self, s: &str) -> Result<Path> {
        if let Some(v) = self.vertex_id(s) {
            return Ok(Path::vertex(v));
        }
        let mut edges = Vec::new();
        for name in s.split('.') {
            edges.push(
                self.edge_id(name.trim())
                    .ok_or_else(|| Error::UnknownPath(s.to_string()))?,
            );
        }
        edges.reverse();
        self.path_from_edges(&edges)
            .ok_or_else(|| Error::UnknownPath(s.to_string()))
    }

    /// The fixed reference path of length `q` with source `v`.
    pub fn xi(&self, v: usize, q: usize, choice: XiChoice) -> Result<Path> {
        let mut candidates = self.paths(q).into_iter().filter(|c| c.src == v);
        match choice {
            XiChoice::LexMin => candidates.next(),
            XiChoice::LexMax => candidates.next_back(),
        }
        .ok_or_else(|| {
            Error::Precondition(format!(
                "no path of length {q} leaves vertex {}",
                self.vertices[v]
            ))
        })
    }
}

/// Index tables for paths up to a fixed length.
///
/// Level `k` lists `E^k` in canonical order. Each path of positive length
/// is `head·tail` with `head` its leftmost (range-side) edge; `prepend`
/// gives the index of `e·β` in constant time.
#[derive(Clone, Debug)]
pub struct PathTable {
    levels: Vec<Level>,
    edge_src: Vec<usize>,
    edge_rng: Vec<usize>,
    vertex_count: usize,
}

#[derive(Clone, Debug)]
struct Level {
    src: Vec<usize>,
    rng: Vec<usize>,
    head: Vec<usize>,
    tail: Vec<usize>,
    pos_in_rng: Vec<usize>,
    rng_count: Vec<usize>,
    edge_start: Vec<usize>,
}

impl PathTable {
    pub fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let level0 = Level {
            src: (0..n).collect(),
            rng: (0..n).collect(),
            head: vec![usize::MAX; n],
            tail: vec![usize::MAX; n],
            pos_in_rng: vec![0; n],
            rng_count: vec![1; n],
            edge_start: Vec::new(),
        };
        PathTable {
            levels: vec![level0],
            edge_src: g.edges().iter().map(|e| e.src).collect(),
            edge_rng: g.edges().iter().map(|e| e.rng).collect(),
            vertex_count: n,
        }
    }

    /// Extends the tables so that level `k` is available.
    pub fn ensure(&mut self, k: usize) {
        while self.levels.len() <= k {
            let prev = self.levels.last().unwrap();
            let mut by_rng: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
            for (i, &r) in prev.rng.iter().enumerate() {
                by_rng[r].push(i);
            }
            let mut lvl = Level {
                src: Vec::new(),
                rng: Vec::new(),
                head: Vec::new(),
                tail: Vec::new(),
                pos_in_rng: Vec::new(),
                rng_count: vec![0; self.vertex_count],
                edge_start: Vec::with_capacity(self.edge_src.len()),
            };
            for e in 0..self.edge_src.len() {
                lvl.edge_start.push(lvl.src.len());
                for &b in &by_rng[self.edge_src[e]] {
                    let r = self.edge_rng[e];
                    lvl.src.push(prev.src[b]);
                    lvl.rng.push(r);
                    lvl.head.push(e);
                    lvl.tail.push(b);
                    lvl.pos_in_rng.push(lvl.rng_count[r]);
                    lvl.rng_count[r] += 1;
                }
            }
            self.levels.push(lvl);
        }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.levels[k].src.len()
    }

    pub fn src(&self, k: usize, i: usize) -> usize {
        self.levels[k].src[i]
    }

    pub fn rng(&self, k: usize, i: usize) -> usize {
        self.levels[k].rng[i]
    }

    /// Leftmost edge of path `i` at level `k >= 1`.
    pub fn head(&self, k: usize, i: usize) -> usize {
        self.levels[k].head[i]
    }

    /// Index at level `k-1` of the path with the leftmost edge removed.
    pub fn tail(&self, k: usize, i: usize) -> usize {
        self.levels[k].tail[i]
    }

    /// Index at level `k+1` of `e·β` for `β` = path `i` at level `k`.
    pub fn prepend(&self, e: usize, k: usize, i: usize) -> Option<usize> {
        let lvl = &self.levels[k];
        if lvl.rng[i] != self.edge_src[e] {
            return None;
        }
        Some(self.levels[k + 1].edge_start[e] + lvl.pos_in_rng[i])
    }

    /// Operator-order edge list of path `i` at level `k`.
    pub fn edges_of(&self, k: usize, mut i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        for l in (1..=k).rev() {
            out.push(self.levels[l].head[i]);
            i = self.levels[l].tail[i];
        }
        out
    }

    /// Index of a path given by its operator-order edges (`None` if the
    /// edges do not compose). The vertex `v` is used for length 0.
    pub fn index_of(&self, edges: &[usize], v: usize) -> Option<usize> {
        let k = edges.len();
        let mut idx = match edges.last() {
            Some(&e) => self.edge_src[e],
            None => v,
        };
        for (l, &e) in edges.iter().rev().enumerate() {
            idx = self.prepend(e, l, idx)?;
        }
        debug_assert!(k <= self.max_level());
        Some(idx)
    }

    /// Strips the leftmost `m` edges of path `i` at level `k`, returning the
    /// stripped edges (operator order) and the remaining suffix index.
    pub fn strip(&self, k: usize, mut i: usize, m: usize) -> (Vec<usize>, usize) {
        let mut heads = Vec::with_capacity(m);
        for l in ((k - m + 1)..=k).rev() {
            heads.push(self.levels[l].head[i]);
            i = self.levels[l].tail[i];
        }
        (heads, i)
    }

    /// Re-attaches `heads` (operator order) on the range side of path `i`
    /// at level `j`.
    pub fn attach(&self, heads: &[usize], j: usize, mut i: usize) -> Option<usize> {
        for (off, &e) in heads.iter().rev().enumerate() {
            i = self.prepend(e, j + off, i)?;
        }
        Some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn c3() -> Graph {
        Graph::new(
            &["v1", "v2", "v3"],
            &[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")],
        )
        .unwrap()
    }

    fn o2() -> Graph {
        Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap()
    }

    fn g2() -> Graph {
        Graph::new(
            &["v1", "v2"],
            &[("l1", "v1", "v1"), ("l2", "v2", "v2"), ("a", "v1", "v2")],
        )
        .unwrap()
    }

    #[test]
    fn loads_and_rejects() {
        let g = Graph::from_json(
            r#"{"vertices":["v"],"edges":[{"name":"e","src":"v","dst":"v"},{"name":"f","src":"v","dst":"v"}]}"#,
        )
        .unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 2));
        let bad = Graph::from_json(r#"{"vertices":["v"],"edges":[{"name":"e","src":"v","dst":"w"}]}"#);
        assert!(matches!(bad, Err(Error::DanglingEndpoint { .. })));
        let dup = Graph::new(&["v", "v"], &[]);
        assert!(matches!(dup, Err(Error::DuplicateId(_))));
    }

    #[test]
    fn shapes() {
        let r = c3().validate();
        assert!(r.no_sources && r.no_sinks && r.transitive && r.is_cycle);
        assert!(r.is_cycle_with_entry && r.out_degree_all_one);
        let r = o2().validate();
        assert!(r.transitive && !r.is_cycle);
        let r = g2().validate();
        assert!(r.no_sources && r.no_sinks && !r.transitive && !r.is_cycle);
        let entry = Graph::new(
            &["a", "b", "c"],
            &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "b")],
        )
        .unwrap()
        .validate();
        assert!(entry.is_cycle_with_entry && !entry.is_cycle && !entry.no_sources);
    }

    #[test]
    fn path_counts_and_order() {
        let g = c3();
        let p2 = g.paths(2);
        assert_eq!(p2.len(), 3);
        let mut srcs: Vec<usize> = p2.iter().map(|p| p.src).collect();
        srcs.sort();
        assert_eq!(srcs, vec![0, 1, 2]);
        assert_eq!(o2().paths(3).len(), 8);
        assert_eq!(g.paths(0), (0..3).map(Path::vertex).collect::<Vec<_>>());
    }

    #[test]
    fn xi_choices() {
        let g = c3();
        assert_eq!(g.walk_string(&g.xi(0, 1, XiChoice::LexMin).unwrap()), "e1");
        assert_eq!(g.xi(2, 0, XiChoice::LexMin).unwrap(), Path::vertex(2));
        let o = o2();
        assert_eq!(o.walk_string(&o.xi(0, 2, XiChoice::LexMin).unwrap()), "e.e");
        assert_eq!(o.walk_string(&o.xi(0, 2, XiChoice::LexMax).unwrap()), "f.f");
    }

    #[test]
    fn walk_strings_round_trip() {
        let g = c3();
        let p = g.parse_walk("e1.e2").unwrap();
        assert_eq!(p.edges, vec![1, 0]);
        assert_eq!((p.src, p.rng), (0, 2));
        assert_eq!(g.walk_string(&p), "e1.e2");
        assert!(g.parse_walk("e2.e1").is_err());
    }

    #[test]
    fn table_matches_enumeration() {
        for g in [c3(), o2(), g2()] {
            let mut t = PathTable::new(&g);
            t.ensure(5);
            for k in 0..=5 {
                let ps = g.paths(k);
                assert_eq!(ps.len(), t.count(k));
                for (i, p) in ps.iter().enumerate() {
                    assert_eq!(t.src(k, i), p.src);
                    assert_eq!(t.rng(k, i), p.rng);
                    assert_eq!(t.edges_of(k, i), p.edges);
                    assert_eq!(t.index_of(&p.edges, p.src), Some(i));
                    if k >= 2 {
                        let (heads, j) = t.strip(k, i, 2);
                        assert_eq!(heads, p.edges[..2].to_vec());
                        assert_eq!(t.attach(&heads, k - 2, j), Some(i));
                    }
                }
            }
        }
    }
}
