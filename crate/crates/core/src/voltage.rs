//! Voltage assignments realizing the p-power tower over G_1^0: basis choice
//! for the truncated Tate modules, the assignment t_phi per edge, the derived
//! graph, and the comparison against the directly built G_1^m under both
//! group conventions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

use crate::arith::gcd;
use crate::ecurve::{self, scalar_mul, torsion_generators, Point};
use crate::graphcore::{EdgeColor, IsoOptions, MultiDiGraph, VertexRec};
use crate::volcano::{BuildError, VolcanoGraph};

#[derive(Debug, Clone)]
pub enum VoltageError {
    TorsionNotRational(String),
    DlogFailure,
    Build(String),
}

impl fmt::Display for VoltageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoltageError::TorsionNotRational(s) => write!(f, "p-power torsion not rational: {}", s),
            VoltageError::DlogFailure => write!(f, "discrete log failure in a cyclic p-group"),
            VoltageError::Build(s) => write!(f, "{}", s),
        }
    }
}

impl From<BuildError> for VoltageError {
    fn from(e: BuildError) -> Self {
        VoltageError::Build(format!("{}", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupConvention {
    /// fibers (Z/p^m)^x
    Full,
    /// fibers (Z/p^m)^x / {±1}
    ModSigns,
}

/// Bases of the truncated Tate modules and the edge voltages over G_1^0.
pub struct VoltageData {
    pub m: u32,
    /// per class index of the base graph: a generator t_E of E[p^m]
    pub bases: BTreeMap<usize, Point>,
    /// per edge of the base graph: t_phi in (Z/p^m)^x
    pub assignment: Vec<u64>,
    /// edges of the chosen spanning tree when tree propagation was used
    pub tree_edges: Vec<usize>,
}

/// Chooses a generator of E[p^m] per curve of G_1^0. With `tree_mode` a
/// single choice is propagated along a spanning tree per component, making
/// the assignment trivial on tree edges. The base graph must be built over a
/// working field with the p^m-torsion rational (share the field with G_1^m).
pub fn choose_bases(
    base: &VolcanoGraph,
    m: u32,
    seed: u64,
    tree_mode: bool,
) -> Result<(BTreeMap<usize, Point>, Vec<usize>), VoltageError> {
    let ctx = &base.work_ctx;
    let p = base.params.p;
    let pm = p.pow(m);
    let q = base.q();
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xA076_1D64_78BD_642F);
    let mut bases: BTreeMap<usize, Point> = BTreeMap::new();
    let mut gen_for = |ci: usize| -> Result<Point, VoltageError> {
        let curve = base.work_curve(ci);
        let order = ecurve::count_points_ext(base.classes[ci].trace, q, base.work_degree as usize)
            .to_biguint()
            .expect("positive count");
        let tors = torsion_generators(ctx, &curve, pm, &order, &mut rng, 6000)
            .map_err(|e| VoltageError::TorsionNotRational(format!("{}", e)))?;
        if tors.a_order != pm {
            return Err(VoltageError::TorsionNotRational(format!(
                "order {} instead of {}",
                tors.a_order, pm
            )));
        }
        Ok(tors.gen_a)
    };
    let mut tree_edges = Vec::new();
    if !tree_mode {
        for v in 0..base.vertex_count() {
            let ci = base.class_of_vertex[v];
            if !bases.contains_key(&ci) {
                let g = gen_for(ci)?;
                bases.insert(ci, g);
            }
        }
        return Ok((bases, tree_edges));
    }
    // spanning tree per component (BFS over undirected edges in edge order),
    // pushing the basis forward (or pulling it back) along tree edges
    let adj = base.graph.adjacency();
    let comps = base.graph.components();
    let n_comps = comps.iter().max().map_or(0, |&c| c + 1);
    for comp in 0..n_comps {
        let members: Vec<usize> = (0..base.vertex_count()).filter(|&v| comps[v] == comp).collect();
        let root = members[0];
        let root_class = base.class_of_vertex[root];
        if !bases.contains_key(&root_class) {
            let g = gen_for(root_class)?;
            bases.insert(root_class, g);
        }
        let mut seen_class: BTreeMap<usize, ()> = BTreeMap::new();
        seen_class.insert(root_class, ());
        let mut queue = vec![root];
        let mut visited = vec![false; base.vertex_count()];
        visited[root] = true;
        let mut qi = 0;
        while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            let vc = base.class_of_vertex[v];
            for &ei in adj.out[v].iter().chain(&adj.inn[v]) {
                let e = &base.graph.edges[ei];
                let (other, forward) = if e.src == v { (e.dst, true) } else { (e.src, false) };
                if visited[other] {
                    continue;
                }
                visited[other] = true;
                queue.push(other);
                let oc = base.class_of_vertex[other];
                if seen_class.contains_key(&oc) {
                    continue;
                }
                // propagate the basis along this tree edge
                let (src_class, tgt_class) = if forward { (vc, oc) } else { (oc, vc) };
                debug_assert!(bases.contains_key(&if forward { vc } else { oc }) || !forward);
                let img_of = |t: &Point| -> Result<Point, VoltageError> {
                    apply_edge_isogeny(base, src_class, &base.graph.edges[ei].kernel, t)
                };
                if forward {
                    let t_src = bases[&src_class].clone();
                    let t_new = img_of(&t_src)?;
                    bases.insert(tgt_class, t_new);
                } else {
                    // the far class needs a basis mapping onto ours
                    let t_tgt = bases[&tgt_class].clone();
                    let fresh = gen_for(src_class)?;
                    let img = img_of(&fresh)?;
                    // t_tgt = k * img; pull back: basis = k * fresh
                    let curve_tgt = base.work_curve(tgt_class);
                    let k = ecurve::brute_dlog(ctx, &curve_tgt, &t_tgt, &img, pm)
                        .ok_or(VoltageError::DlogFailure)?;
                    let curve_src = base.work_curve(src_class);
                    bases.insert(src_class, scalar_mul(ctx, &curve_src, k, &fresh));
                }
                seen_class.insert(oc, ());
                tree_edges.push(ei);
            }
        }
        // isolated or revisited classes still need a basis
        for &v in &members {
            let ci = base.class_of_vertex[v];
            if !bases.contains_key(&ci) {
                let g = gen_for(ci)?;
                bases.insert(ci, g);
            }
        }
    }
    Ok((bases, tree_edges))
}

/// Pushes a point through the isogeny behind one base-graph edge, landing on
/// the standard model of the target class.
fn apply_edge_isogeny(
    base: &VolcanoGraph,
    src_class: usize,
    kernel: &str,
    pt: &Point,
) -> Result<Point, VoltageError> {
    let key = (src_class, String::from(kernel));
    let (step, target) = base
        .steps
        .get(&key)
        .ok_or_else(|| VoltageError::Build("missing isogeny step for edge".into()))?;
    let (iso, _) = target
        .as_ref()
        .ok_or_else(|| VoltageError::Build("edge with irrational codomain".into()))?;
    Ok(iso.apply(&base.work_ctx, &step.eval(&base.work_ctx, pt)))
}

/// The assignment t_phi per edge: phi(t_src) = t_phi * t_dst in E[p^m].
pub fn compute_assignment(
    base: &VolcanoGraph,
    bases: &BTreeMap<usize, Point>,
    m: u32,
    tree_edges: Vec<usize>,
) -> Result<VoltageData, VoltageError> {
    let ctx = &base.work_ctx;
    let pm = base.params.p.pow(m);
    let mut assignment = Vec::with_capacity(base.graph.edges.len());
    for e in &base.graph.edges {
        let sc = base.class_of_vertex[e.src];
        let tc = base.class_of_vertex[e.dst];
        let img = apply_edge_isogeny(base, sc, &e.kernel, &bases[&sc])?;
        let curve_tgt = base.work_curve(tc);
        let t_phi = ecurve::brute_dlog(ctx, &curve_tgt, &img, &bases[&tc], pm)
            .ok_or(VoltageError::DlogFailure)?;
        if gcd(t_phi, pm) != 1 {
            return Err(VoltageError::Build("assignment value is not a unit".into()));
        }
        assignment.push(t_phi);
    }
    Ok(VoltageData { m, bases: bases.clone(), assignment, tree_edges })
}

/// Group elements under a convention, as canonical residues mod p^m.
pub fn group_elements(p: u64, m: u32, convention: GroupConvention) -> Vec<u64> {
    let pm = p.pow(m);
    let mut out = Vec::new();
    for u in 1..pm {
        if gcd(u, p) != 1 {
            continue;
        }
        match convention {
            GroupConvention::Full => out.push(u),
            GroupConvention::ModSigns => {
                if u <= pm - u {
                    out.push(u);
                }
            }
        }
    }
    out
}

fn canon_rep(u: u64, pm: u64, convention: GroupConvention) -> u64 {
    match convention {
        GroupConvention::Full => u % pm,
        GroupConvention::ModSigns => {
            let v = u % pm;
            v.min(pm - v)
        }
    }
}

/// The derived graph: vertices V(base) x G, an edge (e, sigma) from
/// (src, sigma) to (dst, sigma * alpha(e)).
pub fn derived_graph(
    base: &VolcanoGraph,
    vd: &VoltageData,
    convention: GroupConvention,
) -> (MultiDiGraph, Vec<usize>) {
    let pm = base.params.p.pow(vd.m);
    let sigmas = group_elements(base.params.p, vd.m, convention);
    let index: BTreeMap<u64, usize> = sigmas.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut g = MultiDiGraph::new();
    let mut class_of = Vec::new();
    for (bv, vr) in base.graph.verts.iter().enumerate() {
        for &s in &sigmas {
            g.add_vertex(VertexRec {
                id: format!("{}|{}", vr.id, s),
                j: vr.j.clone(),
                point: None,
                level: vr.level,
                component: None,
            });
            class_of.push(base.class_of_vertex[bv]);
        }
    }
    let width = sigmas.len();
    for (ei, e) in base.graph.edges.iter().enumerate() {
        for (si, &s) in sigmas.iter().enumerate() {
            let target_sigma = canon_rep(s * vd.assignment[ei] % pm, pm, convention);
            let ti = index[&target_sigma];
            g.add_edge(e.src * width + si, e.dst * width + ti, EdgeColor::None, String::new());
        }
    }
    (g, class_of)
}

#[derive(Debug, Clone)]
pub struct AppendixReport {
    pub convention: GroupConvention,
    /// global isomorphism derived vs the directly built graph
    pub graph_match: bool,
    /// per base component: whether the parts over it are isomorphic
    pub per_component: Vec<(usize, bool)>,
}

/// Compares the derived graph with the directly built G_1^m as directed
/// multigraphs, restricting vertex images to the fibers over the same curve.
pub fn verify_appendix(
    base: &VolcanoGraph,
    derived: &MultiDiGraph,
    derived_class: &[usize],
    direct: &VolcanoGraph,
    convention: GroupConvention,
) -> AppendixReport {
    let fiber_candidates = |dv_class: &[usize], tv_class: &[usize], g: &MultiDiGraph, h: &MultiDiGraph| {
        let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in tv_class.iter().enumerate() {
            by_class.entry(c).or_default().push(i);
        }
        let _ = (g, h);
        dv_class
            .iter()
            .map(|c| by_class.get(c).cloned().unwrap_or_default())
            .collect::<Vec<_>>()
    };
    let direct_classes: Vec<usize> = (0..direct.vertex_count()).map(|v| direct.class_of_vertex[v]).collect();
    let global = {
        let cands = fiber_candidates(derived_class, &direct_classes, derived, &direct.graph);
        crate::graphcore::search_isomorphisms(
            derived,
            &direct.graph,
            &IsoOptions {
                candidates: Some(&cands),
                count_all: false,
                max_vertices: derived.verts.len().max(64),
                ..Default::default()
            },
        )
        .witness
        .is_some()
    };
    // per base component
    let base_comps = base.graph.components();
    let n_comps = base_comps.iter().max().map_or(0, |&c| c + 1);
    let mut per_component = Vec::new();
    for comp in 0..n_comps {
        let classes: Vec<usize> = (0..base.vertex_count())
            .filter(|&v| base_comps[v] == comp)
            .map(|v| base.class_of_vertex[v])
            .collect();
        let keep_derived: Vec<usize> =
            (0..derived.verts.len()).filter(|&v| classes.contains(&derived_class[v])).collect();
        let keep_direct: Vec<usize> =
            (0..direct.vertex_count()).filter(|&v| classes.contains(&direct.class_of_vertex[v])).collect();
        let (dg, _) = induced_sub(derived, &keep_derived);
        let (tg, _) = induced_sub(&direct.graph, &keep_direct);
        let d_classes: Vec<usize> = keep_derived.iter().map(|&v| derived_class[v]).collect();
        let t_classes: Vec<usize> = keep_direct.iter().map(|&v| direct.class_of_vertex[v]).collect();
        let cands = fiber_candidates(&d_classes, &t_classes, &dg, &tg);
        let ok = crate::graphcore::search_isomorphisms(
            &dg,
            &tg,
            &IsoOptions {
                candidates: Some(&cands),
                count_all: false,
                max_vertices: dg.verts.len().max(64),
                ..Default::default()
            },
        )
        .witness
        .is_some();
        per_component.push((comp, ok));
    }
    AppendixReport { convention, graph_match: global, per_component }
}

fn induced_sub(g: &MultiDiGraph, keep: &[usize]) -> (MultiDiGraph, Vec<usize>) {
    let mut back = vec![usize::MAX; g.verts.len()];
    let mut sub = MultiDiGraph::new();
    for &v in keep {
        back[v] = sub.add_vertex(g.verts[v].clone());
    }
    let mut parents = Vec::new();
    for (ei, e) in g.edges.iter().enumerate() {
        if back[e.src] != usize::MAX && back[e.dst] != usize::MAX {
            sub.add_edge(back[e.src], back[e.dst], e.color, e.kernel.clone());
            parents.push(ei);
        }
    }
    (sub, parents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volcano::{build_graph, build_graph_at_degree, Budget, BuildParams};

    fn setup_f5_l2_m1() -> (VolcanoGraph, VolcanoGraph) {
        let budget = Budget::default();
        let direct = build_graph(&BuildParams::new(5, 1, 2, 1, 1), &budget).unwrap();
        let base =
            build_graph_at_degree(&BuildParams::new(5, 1, 2, 1, 0), &budget, direct.work_degree)
                .unwrap();
        (base, direct)
    }

    #[test]
    fn assignment_exists_and_tree_mode_is_trivial_on_tree() {
        let (base, _direct) = setup_f5_l2_m1();
        let (bases, tree) = choose_bases(&base, 1, 7, true).unwrap();
        let vd = compute_assignment(&base, &bases, 1, tree).unwrap();
        for &ei in &vd.tree_edges {
            assert_eq!(vd.assignment[ei], 1);
        }
        // every voltage is a unit mod 5
        assert!(vd.assignment.iter().all(|&a| a % 5 != 0));
    }

    #[test]
    fn derived_graph_is_a_cover_of_the_base() {
        let (base, _d) = setup_f5_l2_m1();
        let (bases, tree) = choose_bases(&base, 1, 3, false).unwrap();
        let vd = compute_assignment(&base, &bases, 1, tree).unwrap();
        for conv in [GroupConvention::Full, GroupConvention::ModSigns] {
            let (g, _) = derived_graph(&base, &vd, conv);
            let width = group_elements(5, 1, conv).len();
            assert_eq!(g.verts.len(), base.vertex_count() * width);
            assert_eq!(g.edges.len(), base.graph.edges.len() * width);
        }
    }

    #[test]
    fn seeds_differ_by_a_coboundary() {
        let (base, _d) = setup_f5_l2_m1();
        let (b1, t1) = choose_bases(&base, 1, 1, false).unwrap();
        let (b2, t2) = choose_bases(&base, 1, 2, false).unwrap();
        let v1 = compute_assignment(&base, &b1, 1, t1).unwrap();
        let v2 = compute_assignment(&base, &b2, 1, t2).unwrap();
        // per class: b2 = u_c * b1 for a unit u_c; then
        // alpha2(e) = alpha1(e) * u_src / u_dst mod 5
        let ctx = &base.work_ctx;
        let mut unit = BTreeMap::new();
        for (&ci, t1p) in &b1 {
            let curve = base.work_curve(ci);
            let k = ecurve::brute_dlog(ctx, &curve, &b2[&ci], t1p, 5).unwrap();
            unit.insert(ci, k);
        }
        for (ei, e) in base.graph.edges.iter().enumerate() {
            let us = unit[&base.class_of_vertex[e.src]];
            let ud = unit[&base.class_of_vertex[e.dst]];
            // alpha1 * us = alpha2 * ud mod 5
            assert_eq!(v1.assignment[ei] * us % 5, v2.assignment[ei] * ud % 5);
        }
    }

    #[test]
    fn dual_edge_voltages_multiply_to_l_up_to_aut() {
        // an edge and its dual compose to multiplication by l up to an
        // automorphism of the source, so the voltages multiply to l times an
        // automorphism scalar: ±l for a generic source, l mu_4 at j = 1728
        let (base, _d) = setup_f5_l2_m1();
        let (bases, tree) = choose_bases(&base, 1, 5, false).unwrap();
        let vd = compute_assignment(&base, &bases, 1, tree).unwrap();
        let adj = base.graph.adjacency();
        let v1728 = (0..base.vertex_count())
            .find(|&v| base.graph.verts[v].j.as_deref() == Some("5^1:3"))
            .unwrap();
        let v1 = (0..base.vertex_count())
            .find(|&v| base.graph.verts[v].j.as_deref() == Some("5^1:1"))
            .unwrap();
        // ascent from the generic j = 1 curve: Aut = {±1}, so the product
        // with its dual descent is ±2 mod 5, i.e. 2 or 3
        let ups: Vec<usize> = adj.out[v1].to_vec();
        assert_eq!(ups.len(), 1);
        let up_alpha = vd.assignment[ups[0]];
        let downs: Vec<usize> = adj.out[v1728]
            .iter()
            .copied()
            .filter(|&ei| base.graph.edges[ei].dst == v1)
            .collect();
        assert_eq!(downs.len(), 2);
        assert!(downs
            .iter()
            .any(|&ei| matches!(vd.assignment[ei] * up_alpha % 5, 2 | 3)));
        // the loop at j = 1728 is its own dual; its square is 2 times a
        // mu_4 scalar, hence ±2i = ±4 mod 5
        let loop_edge = adj.out[v1728]
            .iter()
            .copied()
            .find(|&ei| base.graph.edges[ei].dst == v1728)
            .unwrap();
        let a = vd.assignment[loop_edge];
        assert!(matches!(a * a % 5, 1 | 4));
    }
}
