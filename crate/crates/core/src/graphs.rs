//! Problem graphs: unit-disk instances, star graphs and their JSON form.

use crate::error::{Error, Result};
use crate::rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_RADIUS_SQ: f64 = 2.0;

/// Configurations are bitmasks, so enumeration-based code needs n ≤ 128.
pub const MAX_MASK_VERTICES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    UnitDisk,
    Star,
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    kind: GraphKind,
    n: usize,
    coords: Option<Vec<[f64; 2]>>,
    edges: Vec<(usize, usize)>,
    meta: Map<String, Value>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    version: u32,
    kind: GraphKind,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    meta: Map<String, Value>,
}

impl Graph {
    /// Builds a simple undirected graph. Edges are normalized to `u < v`,
    /// sorted and deduplicated; self-loops and out-of-range endpoints fail.
    pub fn new(kind: GraphKind, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Config(format!("edge ({a},{b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::Config(format!("self-loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph { kind, n, coords: None, edges: list, meta: Map::new(), adj })
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::Config(format!("{} coordinates for {} vertices", coords.len(), self.n)));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Neighborhood bitmasks, one per vertex.
    pub fn neighbor_masks(&self) -> Result<Vec<u128>> {
        if self.n > MAX_MASK_VERTICES {
            return Err(Error::Capacity(format!(
                "{} vertices exceed the {MAX_MASK_VERTICES}-vertex configuration limit",
                self.n
            )));
        }
        Ok(self.adj.iter().map(|nb| nb.iter().fold(0u128, |m, &v| m | 1u128 << v)).collect())
    }

    /// True when no edge set forms a cycle.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    /// Whether `mask` is an independent set of this graph.
    pub fn is_independent(&self, mask: u128) -> bool {
        self.edges.iter().all(|&(u, v)| mask >> u & 1 == 0 || mask >> v & 1 == 0)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            version: FORMAT_VERSION,
            kind: self.kind,
            n: self.n,
            coords: self.coords.clone(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        if file.version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported instance version {}", file.version)));
        }
        let mut g = Graph::new(file.kind, file.n, file.edges.iter().map(|e| (e[0], e[1])))
            .map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(c) = file.coords {
            g = g.with_coords(c).map_err(|e| Error::Parse(e.to_string()))?;
        }
        g.meta = file.meta;
        Ok(g)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Random unit-disk graph on a `width × height` square lattice.
///
/// Sites are visited row-major (`y` outer, `x` inner); each draws one uniform
/// double from `rng::stream(seed, 0)` and is kept when the draw is below
/// `filling`. Kept sites are joined when their squared distance is at most
/// `radius_sq`. Isolated vertices are kept.
pub fn generate_unit_disk(width: usize, height: usize, filling: f64, radius_sq: f64, seed: u64) -> Result<Graph> {
    if width == 0 || height == 0 {
        return Err(Error::Config("lattice sides must be at least 1".into()));
    }
    if !(filling > 0.0 && filling <= 1.0) {
        return Err(Error::Config(format!("filling {filling} outside (0, 1]")));
    }
    if !(radius_sq > 0.0) {
        return Err(Error::Config(format!("radius_sq {radius_sq} must be positive")));
    }
    let mut r = rng::stream(seed, 0);
    let mut sites = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if rng::uniform(&mut r) < filling {
                sites.push([x as f64, y as f64]);
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let dx = sites[i][0] - sites[j][0];
            let dy = sites[i][1] - sites[j][1];
            if dx * dx + dy * dy <= radius_sq + 1e-9 {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::new(GraphKind::UnitDisk, sites.len(), edges)?
        .with_coords(sites)?
        .with_meta("generator", "unit_disk")
        .with_meta("width", width)
        .with_meta("height", height)
        .with_meta("filling", filling)
        .with_meta("radius_sq", radius_sq)
        .with_meta("seed", seed)
        .with_meta("rng", "chacha8/le-seed/stream0");
    Ok(g)
}

/// Star graph: central vertex 0 with `n_b` paths of `l` vertices attached.
/// Branch `i` holds vertices `1 + i·l ..= (i + 1)·l`, the first one adjacent
/// to the center.
pub fn generate_star(n_b: usize, l: usize) -> Result<Graph> {
    if n_b == 0 || l == 0 {
        return Err(Error::Config("star needs n_b ≥ 1 and l ≥ 1".into()));
    }
    let n = 1 + n_b * l;
    let mut edges = Vec::with_capacity(n - 1);
    for i in 0..n_b {
        let first = branch_vertex(l, i, 0);
        edges.push((0, first));
        for p in 1..l {
            edges.push((first + p - 1, first + p));
        }
    }
    let g = Graph::new(GraphKind::Star, n, edges)?
        .with_meta("generator", "star")
        .with_meta("n_b", n_b)
        .with_meta("l", l);
    Ok(g)
}

/// Vertex index of position `pos` (0 = next to the center) on branch `branch`.
pub fn branch_vertex(l: usize, branch: usize, pos: usize) -> usize {
    1 + branch * l + pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_shape() {
        let g = generate_star(2, 2).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 2), (3, 4)]);
        assert_eq!(g.degree(0), 2);
        assert!(g.is_forest());
    }

    #[test]
    fn full_lattice_is_king_graph() {
        let g = generate_unit_disk(3, 3, 1.0, DEFAULT_RADIUS_SQ, 0).unwrap();
        assert_eq!(g.n(), 9);
        // 12 axis neighbors plus 8 diagonals.
        assert_eq!(g.edges().len(), 20);
        assert_eq!(g.degree(4), 8);
    }

    #[test]
    fn unit_disk_is_seed_stable() {
        let a = generate_unit_disk(6, 6, 0.8, 2.0, 11).unwrap();
        let b = generate_unit_disk(6, 6, 0.8, 2.0, 11).unwrap();
        let c = generate_unit_disk(6, 6, 0.8, 2.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.coords(), c.coords());
    }

    #[test]
    fn json_round_trip() {
        let g = generate_unit_disk(4, 5, 0.8, 2.0, 3).unwrap();
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        let s = generate_star(3, 4).unwrap();
        assert_eq!(Graph::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new(GraphKind::Generic, 3, [(0, 3)]).is_err());
        assert!(Graph::new(GraphKind::Generic, 3, [(1, 1)]).is_err());
        assert!(Graph::from_json("{\"version\":1,\"kind\":\"generic\",\"n\":2,\"edges\":[[0,5]]}").is_err());
        assert!(generate_unit_disk(0, 3, 0.5, 2.0, 0).is_err());
        assert!(generate_unit_disk(3, 3, 0.0, 2.0, 0).is_err());
    }

    #[test]
    fn empty_graph_has_no_edges() {
        let g = Graph::new(GraphKind::Generic, 4, []).unwrap();
        assert!(g.edges().is_empty());
        assert!(g.is_independent(0b1111));
    }
}
