//! Directed multigraphs with optional edge colors: connected components,
//! exact spanning-tree counts of the undirected shadow (matrix-tree with
//! fraction-free Bareiss elimination over big integers), colored digraph
//! isomorphism, and DOT/JSON text export.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeColor {
    Blue,
    Green,
    None,
}

impl EdgeColor {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeColor::Blue => "blue",
            EdgeColor::Green => "green",
            EdgeColor::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeColor> {
        match s {
            "blue" => Some(EdgeColor::Blue),
            "green" => Some(EdgeColor::Green),
            "none" => Some(EdgeColor::None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRec {
    pub id: String,
    pub j: Option<String>,
    pub point: Option<String>,
    pub level: Option<u32>,
    pub component: Option<usize>,
}

impl VertexRec {
    pub fn bare(id: String) -> Self {
        VertexRec { id, j: None, point: None, level: None, component: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRec {
    pub src: usize,
    pub dst: usize,
    pub color: EdgeColor,
    /// multiplicity-distinguishing tag (kernel serial for isogeny graphs)
    pub kernel: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiDiGraph {
    pub verts: Vec<VertexRec>,
    pub edges: Vec<EdgeRec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    Disconnected,
    TooLarge(usize),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Disconnected => write!(f, "graph is not connected"),
            GraphError::TooLarge(n) => write!(f, "graph too large for this search ({} vertices)", n),
        }
    }
}

/// Out-/in-edge indices per vertex.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub out: Vec<Vec<usize>>,
    pub inn: Vec<Vec<usize>>,
}

impl MultiDiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexRec) -> usize {
        self.verts.push(v);
        self.verts.len() - 1
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, color: EdgeColor, kernel: String) {
        debug_assert!(src < self.verts.len() && dst < self.verts.len());
        self.edges.push(EdgeRec { src, dst, color, kernel });
    }

    pub fn adjacency(&self) -> Adjacency {
        let n = self.verts.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
            inn[e.dst].push(i);
        }
        Adjacency { out, inn }
    }

    /// Partition under undirected reachability; component ids numbered by the
    /// least member vertex, in vertex order. Returns per-vertex component ids.
    pub fn components(&self) -> Vec<usize> {
        let n = self.verts.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
        let mut ids = BTreeMap::new();
        let mut out = vec![0usize; n];
        for v in 0..n {
            let root = find(&mut parent, v);
            let next = ids.len();
            let id = *ids.entry(root).or_insert(next);
            out[v] = id;
        }
        out
    }

    pub fn assign_components(&mut self) -> usize {
        let comps = self.components();
        let count = comps.iter().max().map_or(0, |&m| m + 1);
        for (v, c) in comps.into_iter().enumerate() {
            self.verts[v].component = Some(c);
        }
        count
    }

    /// Vertex indices of one component.
    pub fn component_vertices(&self, comps: &[usize], c: usize) -> Vec<usize> {
        (0..self.verts.len()).filter(|&v| comps[v] == c).collect()
    }

    /// Number of spanning trees of the undirected shadow of the whole graph,
    /// which must be connected. Every directed edge contributes one undirected
    /// edge (dual pairs stay parallel edges); loops never enter spanning trees.
    pub fn spanning_tree_count(&self) -> Result<BigInt, GraphError> {
        let comps = self.components();
        if comps.iter().any(|&c| c != 0) {
            return Err(GraphError::Disconnected);
        }
        let all: Vec<usize> = (0..self.verts.len()).collect();
        Ok(self.spanning_tree_count_of(&all))
    }

    /// Spanning trees of the undirected shadow induced on `vertices`
    /// (assumed to be one connected component).
    pub fn spanning_tree_count_of(&self, vertices: &[usize]) -> BigInt {
        let n = vertices.len();
        if n <= 1 {
            return BigInt::from(1);
        }
        let mut index = BTreeMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        // reduced Laplacian (drop the last vertex)
        let m = n - 1;
        let mut lap = vec![vec![BigInt::zero(); m]; m];
        for e in &self.edges {
            let (Some(&a), Some(&b)) = (index.get(&e.src), index.get(&e.dst)) else {
                continue;
            };
            if a == b {
                continue; // loop
            }
            if a < m {
                lap[a][a] += 1;
            }
            if b < m {
                lap[b][b] += 1;
            }
            if a < m && b < m {
                lap[a][b] -= 1;
                lap[b][a] -= 1;
            }
        }
        bareiss_determinant(lap)
    }
}

/// Fraction-free exact determinant. The reduced Laplacian of a connected
/// graph is positive definite, so no pivoting is needed.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        assert!(!m[k][k].is_zero(), "zero pivot in Laplacian minor");
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = &num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    debug_assert!(!det.is_negative());
    det
}

/// Options for the isomorphism search.
#[derive(Default)]
pub struct IsoOptions<'a> {
    /// allowed images per g-vertex (e.g. covering fibers); None = unrestricted
    pub candidates: Option<&'a [Vec<usize>]>,
    /// labels per edge of g and h that the mapping must preserve in addition
    /// to colors (e.g. base-edge ids when counting deck transformations)
    pub g_edge_labels: Option<&'a [usize]>,
    pub h_edge_labels: Option<&'a [usize]>,
    /// count every isomorphism instead of stopping at the first
    pub count_all: bool,
    /// hard cap on vertex count for the backtracking search
    pub max_vertices: usize,
}

pub struct IsoResult {
    pub count: u64,
    pub witness: Option<Vec<usize>>,
}

/// Isomorphism of colored directed multigraphs: a bijection of vertices
/// preserving directed edges with multiplicity and colors.
pub fn colored_digraph_iso(g: &MultiDiGraph, h: &MultiDiGraph) -> Option<Vec<usize>> {
    let opts = IsoOptions { max_vertices: 4096, ..Default::default() };
    search_isomorphisms(g, h, &opts).witness
}

/// Backtracking search over vertex images with incremental edge-consistency
/// checks. When every vertex of both graphs has per-color out-degree and
/// in-degree at most 1, the BFS assignment order makes each step forced, so
/// the search degenerates to the anchored parallel walk over |V(h)| anchors.
pub fn search_isomorphisms(g: &MultiDiGraph, h: &MultiDiGraph, opts: &IsoOptions) -> IsoResult {
    let n = g.verts.len();
    let empty = IsoResult { count: 0, witness: None };
    if n != h.verts.len() || g.edges.len() != h.edges.len() {
        return empty;
    }
    if n == 0 {
        return IsoResult { count: 1, witness: Some(Vec::new()) };
    }
    let cap = if opts.max_vertices == 0 { 64 } else { opts.max_vertices };
    if n > cap {
        return empty;
    }
    let g_adj = g.adjacency();
    let h_adj = h.adjacency();
    let g_lab = |i: usize| opts.g_edge_labels.map_or(0, |l| l[i]);
    let h_lab = |i: usize| opts.h_edge_labels.map_or(0, |l| l[i]);

    // degree/color signature per vertex for pruning
    let sig = |adj: &Adjacency, edges: &[EdgeRec], lab: &dyn Fn(usize) -> usize, v: usize| {
        let mut out: Vec<(EdgeColor, usize)> =
            adj.out[v].iter().map(|&i| (edges[i].color, lab(i))).collect();
        let mut inn: Vec<(EdgeColor, usize)> =
            adj.inn[v].iter().map(|&i| (edges[i].color, lab(i))).collect();
        out.sort();
        inn.sort();
        (out, inn)
    };
    let g_sigs: Vec<_> = (0..n).map(|v| sig(&g_adj, &g.edges, &g_lab, v)).collect();
    let h_sigs: Vec<_> = (0..n).map(|v| sig(&h_adj, &h.edges, &h_lab, v)).collect();

    // BFS order over g (undirected), seeding every component
    let order = {
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = vec![s];
            let mut qi = 0;
            while qi < queue.len() {
                let v = queue[qi];
                qi += 1;
                order.push(v);
                for &i in g_adj.out[v].iter().chain(&g_adj.inn[v]) {
                    for w in [g.edges[i].src, g.edges[i].dst] {
                        if !seen[w] {
                            seen[w] = true;
                            queue.push(w);
                        }
                    }
                }
            }
        }
        order
    };

    // multiset of (color, label) between an ordered pair
    let pair_edges = |edges: &[EdgeRec], adj: &Adjacency, lab: &dyn Fn(usize) -> usize, a: usize, b: usize| {
        let mut v: Vec<(EdgeColor, usize)> = adj.out[a]
            .iter()
            .filter(|&&i| edges[i].dst == b)
            .map(|&i| (edges[i].color, lab(i)))
            .collect();
        v.sort();
        v
    };

    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut count = 0u64;
    let mut witness: Option<Vec<usize>> = None;

    struct Frame {
        cand_pos: usize,
    }
    let cand_list = |gv: usize| -> Vec<usize> {
        match opts.candidates {
            Some(c) => c[gv].clone(),
            None => (0..n).collect(),
        }
    };
    let mut frames: Vec<Frame> = vec![Frame { cand_pos: 0 }];
    let mut cands: Vec<Vec<usize>> = vec![cand_list(order[0])];

    'outer: loop {
        let depth = frames.len() - 1;
        let gv = order[depth];
        let frame = frames.last_mut().expect("frame");
        let mut advanced = false;
        while frame.cand_pos < cands[depth].len() {
            let hv = cands[depth][frame.cand_pos];
            frame.cand_pos += 1;
            if used[hv] || g_sigs[gv] != h_sigs[hv] {
                continue;
            }
            // consistency with all previously assigned vertices
            let mut ok = true;
            for &gu in order.iter().take(depth) {
                let hu = mapping[gu];
                if pair_edges(&g.edges, &g_adj, &g_lab, gv, gu)
                    != pair_edges(&h.edges, &h_adj, &h_lab, hv, hu)
                    || pair_edges(&g.edges, &g_adj, &g_lab, gu, gv)
                        != pair_edges(&h.edges, &h_adj, &h_lab, hu, hv)
                {
                    ok = false;
                    break;
                }
            }
            if ok
                && pair_edges(&g.edges, &g_adj, &g_lab, gv, gv)
                    != pair_edges(&h.edges, &h_adj, &h_lab, hv, hv)
            {
                ok = false;
            }
            if !ok {
                continue;
            }
            mapping[gv] = hv;
            used[hv] = true;
            if depth + 1 == n {
                count += 1;
                if witness.is_none() {
                    witness = Some(mapping.clone());
                }
                if !opts.count_all {
                    return IsoResult { count, witness };
                }
                used[hv] = false;
                mapping[gv] = usize::MAX;
                continue;
            }
            frames.push(Frame { cand_pos: 0 });
            cands.push(cand_list(order[depth + 1]));
            advanced = true;
            break;
        }
        if advanced {
            continue;
        }
        // backtrack
        frames.pop();
        cands.pop();
        if frames.is_empty() {
            break 'outer;
        }
        let prev_gv = order[frames.len() - 1];
        let hv = mapping[prev_gv];
        used[hv] = false;
        mapping[prev_gv] = usize::MAX;
    }
    IsoResult { count, witness }
}

// ---------------- export ----------------

/// Graph-level metadata carried by the JSON schema.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphMeta {
    pub p: u64,
    pub l: u64,
    pub n: u64,
    pub m: u32,
    pub base_degree: u32,
    pub working_degree: u32,
}

fn json_escape(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Canonical JSON form:
/// {"p":..,"l":..,"N":..,"m":..,"base_degree":..,"working_degree":..,
///  "vertices":[{"id":..,"j":..,"point":..,"level":..,"component":..}],
///  "edges":[{"src":..,"dst":..,"color":..,"kernel":..}]}
pub fn export_json(meta: &GraphMeta, g: &MultiDiGraph) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{{\"p\":{},\"l\":{},\"N\":{},\"m\":{},\"base_degree\":{},\"working_degree\":{},\"vertices\":[",
        meta.p, meta.l, meta.n, meta.m, meta.base_degree, meta.working_degree
    ));
    for (i, v) in g.verts.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str("{\"id\":");
        json_escape(&v.id, &mut s);
        s.push_str(",\"j\":");
        match &v.j {
            Some(j) => json_escape(j, &mut s),
            None => s.push_str("null"),
        }
        s.push_str(",\"point\":");
        match &v.point {
            Some(p) => json_escape(p, &mut s),
            None => s.push_str("null"),
        }
        s.push_str(",\"level\":");
        match v.level {
            Some(l) => s.push_str(&format!("{}", l)),
            None => s.push_str("null"),
        }
        s.push_str(",\"component\":");
        match v.component {
            Some(c) => s.push_str(&format!("{}", c)),
            None => s.push_str("null"),
        }
        s.push('}');
    }
    s.push_str("],\"edges\":[");
    for (i, e) in g.edges.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str("{\"src\":");
        json_escape(&g.verts[e.src].id, &mut s);
        s.push_str(",\"dst\":");
        json_escape(&g.verts[e.dst].id, &mut s);
        s.push_str(",\"color\":");
        json_escape(e.color.as_str(), &mut s);
        s.push_str(",\"kernel\":");
        json_escape(&e.kernel, &mut s);
        s.push('}');
    }
    s.push_str("]}");
    s
}

/// DOT text with color attributes blue/green/gray and directed edges.
pub fn export_dot(g: &MultiDiGraph) -> String {
    let mut s = String::from("digraph G {\n");
    for v in &g.verts {
        let mut label = v.id.clone();
        if let Some(l) = v.level {
            label.push_str(&format!(" L{}", l));
        }
        s.push_str(&format!("  \"{}\" [label=\"{}\"];\n", v.id, label));
    }
    for e in &g.edges {
        let color = match e.color {
            EdgeColor::Blue => "blue",
            EdgeColor::Green => "green",
            EdgeColor::None => "gray",
        };
        s.push_str(&format!(
            "  \"{}\" -> \"{}\" [color={}];\n",
            g.verts[e.src].id, g.verts[e.dst].id, color
        ));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn bare_graph(n: usize, edges: &[(usize, usize)]) -> MultiDiGraph {
        let mut g = MultiDiGraph::new();
        for i in 0..n {
            g.add_vertex(VertexRec::bare(format!("v{}", i)));
        }
        for &(a, b) in edges {
            g.add_edge(a, b, EdgeColor::None, String::new());
        }
        g
    }

    fn colored_graph(n: usize, edges: &[(usize, usize, EdgeColor)]) -> MultiDiGraph {
        let mut g = MultiDiGraph::new();
        for i in 0..n {
            g.add_vertex(VertexRec::bare(format!("v{}", i)));
        }
        for &(a, b, c) in edges {
            g.add_edge(a, b, c, String::new());
        }
        g
    }

    #[test]
    fn components_basic() {
        let g = bare_graph(0, &[]);
        assert!(g.components().is_empty());
        let g = bare_graph(2, &[(0, 0), (1, 1)]);
        assert_eq!(g.components(), vec![0, 1]);
        let g = bare_graph(4, &[(0, 1), (2, 3)]);
        assert_eq!(g.components(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn components_invariant_under_relabeling() {
        let g = bare_graph(4, &[(0, 1), (2, 3)]);
        let h = bare_graph(4, &[(3, 2), (1, 0)]);
        let cg = g.components();
        let ch = h.components();
        assert_eq!(cg.iter().max(), ch.iter().max());
        // idempotent
        assert_eq!(g.components(), cg);
    }

    #[test]
    fn spanning_trees_cycle_and_complete() {
        // C3 -> 3
        let c3 = bare_graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(c3.spanning_tree_count().unwrap(), BigInt::from(3));
        // K4 -> 16 (Cayley)
        let k4 = bare_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(k4.spanning_tree_count().unwrap(), BigInt::from(16));
        // doubled edge -> 2
        let d = bare_graph(2, &[(0, 1), (0, 1)]);
        assert_eq!(d.spanning_tree_count().unwrap(), BigInt::from(2));
        // loops are ignored
        let l = bare_graph(2, &[(0, 1), (0, 0)]);
        assert_eq!(l.spanning_tree_count().unwrap(), BigInt::from(1));
        // disconnected rejected
        let dis = bare_graph(3, &[(0, 1)]);
        assert!(dis.spanning_tree_count().is_err());
    }

    /// Brute-force spanning tree count: all (n-1)-subsets of non-loop edges.
    fn brute_spanning_trees(g: &MultiDiGraph) -> u64 {
        let n = g.verts.len();
        let es: Vec<(usize, usize)> = g
            .edges
            .iter()
            .filter(|e| e.src != e.dst)
            .map(|e| (e.src, e.dst))
            .collect();
        if n == 0 {
            return 0;
        }
        if n == 1 {
            return 1;
        }
        let k = n - 1;
        let m = es.len();
        if m < k {
            return 0;
        }
        let mut count = 0u64;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let mut ok = true;
            for (i, &(a, b)) in es.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    ok = false;
                    break;
                }
                parent[ra] = rb;
            }
            if ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn matrix_tree_matches_brute_force_on_small_graphs() {
        let mut state = 0x243F6A8885A308D3u64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut tested = 0;
        while tested < 60 {
            let n = 2 + (rnd() % 5) as usize; // 2..6 vertices
            let m = (n - 1) + (rnd() % 4) as usize;
            if m > 8 {
                continue;
            }
            let mut edges = Vec::new();
            for _ in 0..m {
                let a = (rnd() % n as u64) as usize;
                let b = (rnd() % n as u64) as usize;
                edges.push((a, b));
            }
            let g = bare_graph(n, &edges);
            if g.components().iter().any(|&c| c != 0) {
                continue;
            }
            let fast = g.spanning_tree_count().unwrap();
            let brute = brute_spanning_trees(&g);
            assert_eq!(fast, BigInt::from(brute));
            tested += 1;
        }
    }

    #[test]
    fn iso_identity_and_counts() {
        let g = colored_graph(
            3,
            &[(0, 1, EdgeColor::Blue), (1, 2, EdgeColor::Blue), (2, 0, EdgeColor::Blue)],
        );
        let w = colored_digraph_iso(&g, &g).unwrap();
        assert_eq!(w.len(), 3);
        // a directed 3-cycle has 3 automorphisms
        let res = search_isomorphisms(
            &g,
            &g,
            &IsoOptions { count_all: true, max_vertices: 64, ..Default::default() },
        );
        assert_eq!(res.count, 3);
    }

    #[test]
    fn iso_respects_color_and_direction() {
        let blue3 = colored_graph(
            3,
            &[(0, 1, EdgeColor::Blue), (1, 2, EdgeColor::Blue), (2, 0, EdgeColor::Blue)],
        );
        let green3 = colored_graph(
            3,
            &[(0, 1, EdgeColor::Green), (1, 2, EdgeColor::Green), (2, 0, EdgeColor::Green)],
        );
        assert!(colored_digraph_iso(&blue3, &green3).is_none());
        let rev3 = colored_graph(
            3,
            &[(1, 0, EdgeColor::Blue), (2, 1, EdgeColor::Blue), (0, 2, EdgeColor::Blue)],
        );
        // reversal of a 3-cycle is still a 3-cycle after relabeling
        assert!(colored_digraph_iso(&blue3, &rev3).is_some());
        let blue4 = colored_graph(
            4,
            &[
                (0, 1, EdgeColor::Blue),
                (1, 2, EdgeColor::Blue),
                (2, 3, EdgeColor::Blue),
                (3, 0, EdgeColor::Blue),
            ],
        );
        assert!(colored_digraph_iso(&blue3, &blue4).is_none());
    }

    #[test]
    fn iso_symmetry_and_witness_validity() {
        let g = colored_graph(
            4,
            &[
                (0, 1, EdgeColor::Blue),
                (1, 0, EdgeColor::Green),
                (2, 3, EdgeColor::Blue),
                (3, 2, EdgeColor::Green),
            ],
        );
        let h = colored_graph(
            4,
            &[
                (3, 0, EdgeColor::Blue),
                (0, 3, EdgeColor::Green),
                (1, 2, EdgeColor::Blue),
                (2, 1, EdgeColor::Green),
            ],
        );
        let w = colored_digraph_iso(&g, &h).unwrap();
        let bak = colored_digraph_iso(&h, &g).unwrap();
        // witnesses compose to a bijection
        let mut seen = vec![false; 4];
        for v in 0..4 {
            let round = bak[w[v]];
            assert!(!seen[round]);
            seen[round] = true;
        }
        // every g-edge maps to an h-edge of the same color
        for e in &g.edges {
            let found = h
                .edges
                .iter()
                .any(|f| f.src == w[e.src] && f.dst == w[e.dst] && f.color == e.color);
            assert!(found);
        }
    }

    #[test]
    fn fibered_automorphism_count() {
        // 2-cycle covering a single loop; with base-edge labels the deck
        // transformations form Z/2
        let cover = bare_graph(2, &[(0, 1), (1, 0)]);
        let labels = vec![0usize, 0];
        let fibers = vec![vec![0, 1], vec![0, 1]];
        let res = search_isomorphisms(
            &cover,
            &cover,
            &IsoOptions {
                candidates: Some(&fibers),
                g_edge_labels: Some(&labels),
                h_edge_labels: Some(&labels),
                count_all: true,
                max_vertices: 64,
            },
        );
        assert_eq!(res.count, 2);
    }

    #[test]
    fn export_dot_loop() {
        let g = bare_graph(1, &[(0, 0)]);
        let dot = export_dot(&g);
        assert!(dot.contains("\"v0\" -> \"v0\" [color=gray];"));
    }

    #[test]
    fn export_json_shape() {
        let mut g = bare_graph(2, &[(0, 1)]);
        g.verts[0].j = Some("5^1:3".to_string());
        g.verts[0].level = Some(0);
        g.verts[0].component = Some(0);
        let meta = GraphMeta { p: 5, l: 2, n: 1, m: 0, base_degree: 1, working_degree: 2 };
        let s = export_json(&meta, &g);
        assert!(s.starts_with("{\"p\":5,\"l\":2,\"N\":1,\"m\":0,\"base_degree\":1,\"working_degree\":2,"));
        assert!(s.contains("\"id\":\"v0\",\"j\":\"5^1:3\",\"point\":null,\"level\":0,\"component\":0"));
        assert!(s.contains("\"edges\":[{\"src\":\"v0\",\"dst\":\"v1\",\"color\":\"none\",\"kernel\":\"\"}]"));
    }
}
