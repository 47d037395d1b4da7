//! Simple undirected graphs, named presets and local complementation.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count (adjacency rows are `u64` masks).
pub const MAX_VERTICES: usize = 64;

/// Largest vertex count for exhaustive LC-orbit search.
pub const MAX_LC_SEARCH_VERTICES: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<u64>,
}

impl Graph {
    /// Graph without edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::Capacity(format!("graphs are limited to {MAX_VERTICES} vertices")));
        }
        Ok(Graph {
            adjacency: vec![0; n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has an endpoint ≥ {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            g.toggle_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.adjacency[u] >> v) & 1 == 1
    }

    /// Neighborhood of `v` as a bit mask.
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adjacency[v].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in (u + 1)..self.n() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn toggle_edge(&mut self, u: usize, v: usize) {
        self.adjacency[u] ^= 1 << v;
        self.adjacency[v] ^= 1 << u;
    }

    /// Toggles every edge inside the neighborhood of `v`.
    pub fn local_complement(&self, v: usize) -> Result<Graph> {
        if v >= self.n() {
            return Err(Error::InvalidGraph(format!("vertex {v} out of range for n = {}", self.n())));
        }
        let mut g = self.clone();
        let nb = self.adjacency[v];
        let mut rest = nb;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // toggle a's adjacency to every other neighbor of v
            g.adjacency[a] ^= nb & !(1u64 << a);
        }
        Ok(g)
    }

    /// Applies local complementations in order.
    pub fn local_complement_sequence(&self, vertices: &[usize]) -> Result<Graph> {
        vertices
            .iter()
            .try_fold(self.clone(), |g, &v| g.local_complement(v))
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidGraph("not a permutation of the vertex set".into()));
        }
        let mut g = Graph::empty(n)?;
        for (u, v) in self.edges() {
            g.toggle_edge(perm[u], perm[v]);
        }
        Ok(g)
    }

    /// Upper-triangle adjacency bits; an exact key for `n ≤ 11`.
    fn key(&self) -> u64 {
        let mut k = 0u64;
        let mut bit = 0;
        for u in 0..self.n() {
            for v in (u + 1)..self.n() {
                if self.has_edge(u, v) {
                    k |= 1 << bit;
                }
                bit += 1;
            }
        }
        k
    }

    pub fn from_json_str(text: &str) -> Result<Graph> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidGraph(format!("graph JSON: {e}")))?;
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(file.n, &edges)
    }

    pub fn load(path: &Path) -> Result<Graph> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Graph::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&file).expect("graph serialization")
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Named graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Path `0–1–…–(n−1)`.
    Linear(usize),
    /// Four-qubit box cluster, edges 0–1, 0–2, 1–3, 2–3.
    Box4,
    /// Error-correction graph: complete bipartite `K_{2,k}` with poles `0`
    /// and `k+1` and middles `1..=k`.
    Ec(usize),
    /// Complete graph.
    GhzComplete(usize),
    /// Star centred at vertex 0.
    GhzStar(usize),
    /// `K_4` on `{0,1,2,3}` plus pendant vertex 4 attached to 0.
    Ec3Lc,
    SingleVertex,
}

impl Preset {
    pub fn graph(self) -> Result<Graph> {
        match self {
            Preset::Linear(n) => {
                let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
                Graph::from_edges(n, &edges)
            }
            Preset::Box4 => Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]),
            Preset::Ec(k) => {
                if k == 0 {
                    return Err(Error::InvalidGraph("ec(k) needs k ≥ 1".into()));
                }
                let pole = k + 1;
                let edges: Vec<_> = (1..=k).flat_map(|m| [(0, m), (m, pole)]).collect();
                Graph::from_edges(k + 2, &edges)
            }
            Preset::GhzComplete(n) => {
                let edges: Vec<_> = (0..n)
                    .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                    .collect();
                Graph::from_edges(n, &edges)
            }
            Preset::GhzStar(n) => {
                let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
                Graph::from_edges(n, &edges)
            }
            Preset::Ec3Lc => Graph::from_edges(
                5,
                &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)],
            ),
            Preset::SingleVertex => Graph::empty(1),
        }
    }
}

/// Builds a preset by family name; `n` is required for sized families.
///
/// Names: `linear`, `box4`, `ec`, `ghz_complete`, `ghz_star`, `ec3_lc`,
/// `single_vertex`.
pub fn make_named_graph(name: &str, n: Option<usize>) -> Result<Graph> {
    let sized = |f: fn(usize) -> Preset| -> Result<Preset> {
        match n {
            Some(0) => Err(Error::InvalidGraph(format!("{name} needs n ≥ 1"))),
            Some(k) => Ok(f(k)),
            None => Err(Error::Invalid(format!("preset {name} requires a size"))),
        }
    };
    let preset = match name {
        "linear" => sized(Preset::Linear)?,
        "box4" => Preset::Box4,
        "ec" => sized(Preset::Ec)?,
        "ghz_complete" => sized(Preset::GhzComplete)?,
        "ghz_star" => sized(Preset::GhzStar)?,
        "ec3_lc" => Preset::Ec3Lc,
        "single_vertex" => Preset::SingleVertex,
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    preset.graph()
}

impl FromStr for Preset {
    type Err = Error;

    /// Short names used on the command line: `lc4`, `bc4`, `ec1`, `ec3`,
    /// `ec3-lc`, `ec5`, `ghzN`, `starN`, `linearN`, `ecN`, `single`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let sized = |prefix: &str| -> Option<usize> {
            lower
                .strip_prefix(prefix)
                .and_then(|rest| rest.parse::<usize>().ok())
        };
        let preset = match lower.as_str() {
            "lc4" => Preset::Linear(4),
            "bc4" | "box4" => Preset::Box4,
            "ec3-lc" | "ec3lc" | "ec3_lc" => Preset::Ec3Lc,
            "single" | "single_vertex" | "g1" => Preset::SingleVertex,
            _ => {
                if let Some(k) = sized("ghz") {
                    if k < 2 {
                        return Err(Error::UnknownPreset(s.to_string()));
                    }
                    Preset::GhzComplete(k)
                } else if let Some(k) = sized("star") {
                    Preset::GhzStar(k)
                } else if let Some(k) = sized("linear") {
                    Preset::Linear(k)
                } else if let Some(k) = sized("ec") {
                    Preset::Ec(k)
                } else {
                    return Err(Error::UnknownPreset(s.to_string()));
                }
            }
        };
        match preset {
            Preset::Linear(0) | Preset::Ec(0) | Preset::GhzStar(0) => {
                Err(Error::UnknownPreset(s.to_string()))
            }
            p => Ok(p),
        }
    }
}

/// Witness of LC equivalence: complementing `g1` at `sequence` (in order)
/// and then relabelling vertex `v` as `permutation[v]` yields `g2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcWitness {
    pub sequence: Vec<usize>,
    pub permutation: Option<Vec<usize>>,
}

impl LcWitness {
    /// Checks that the witness maps `g1` onto `g2`.
    pub fn verify(&self, g1: &Graph, g2: &Graph) -> Result<bool> {
        let mut g = g1.local_complement_sequence(&self.sequence)?;
        if let Some(p) = &self.permutation {
            g = g.permuted(p)?;
        }
        Ok(&g == g2)
    }
}

/// Searches the local-complementation orbit of `g1` for `g2`.
///
/// With `allow_permutation`, `g2` is matched up to vertex relabelling. The
/// search is exhaustive: `None` means no witness exists. Witness sequences are
/// shortest and deterministic (breadth-first, vertices in increasing order).
pub fn lc_equivalent(g1: &Graph, g2: &Graph, allow_permutation: bool) -> Result<Option<LcWitness>> {
    if g1.n() != g2.n() {
        return Err(Error::dimension(g1.n(), g2.n()));
    }
    let n = g1.n();
    if n > MAX_LC_SEARCH_VERTICES {
        return Err(Error::Capacity(format!(
            "LC orbit search is limited to {MAX_LC_SEARCH_VERTICES} vertices"
        )));
    }
    // target keys -> relabelling that maps the matching orbit member onto g2
    let mut targets: HashMap<u64, Option<Vec<usize>>> = HashMap::new();
    if allow_permutation {
        for perm in permutations(n) {
            let inv = invert(&perm);
            // member h with h.permuted(perm) == g2  <=>  h == g2.permuted(inv)
            let h = g2.permuted(&inv)?;
            targets.entry(h.key()).or_insert(Some(perm));
        }
    } else {
        targets.insert(g2.key(), None);
    }

    let mut visited: HashSet<u64> = HashSet::new();
    let mut queue: VecDeque<(Graph, Vec<usize>)> = VecDeque::new();
    visited.insert(g1.key());
    queue.push_back((g1.clone(), Vec::new()));
    while let Some((g, seq)) = queue.pop_front() {
        if let Some(perm) = targets.get(&g.key()) {
            return Ok(Some(LcWitness {
                sequence: seq,
                permutation: perm.clone(),
            }));
        }
        for v in 0..n {
            if g.degree(v) < 2 {
                continue; // complementing at a vertex of degree < 2 is the identity
            }
            let next = g.local_complement(v)?;
            if visited.insert(next.key()) {
                let mut s = seq.clone();
                s.push(v);
                queue.push_back((next, s));
            }
        }
    }
    Ok(None)
}

/// Size of the labelled LC orbit of `g` (for diagnostics and tests).
pub fn lc_orbit_size(g: &Graph) -> Result<usize> {
    if g.n() > MAX_LC_SEARCH_VERTICES {
        return Err(Error::Capacity("orbit enumeration limited to 8 vertices".into()));
    }
    let mut visited = HashSet::from([g.key()]);
    let mut queue = VecDeque::from([g.clone()]);
    while let Some(h) = queue.pop_front() {
        for v in 0..h.n() {
            let next = h.local_complement(v)?;
            if visited.insert(next.key()) {
                queue.push_back(next);
            }
        }
    }
    Ok(visited.len())
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}
