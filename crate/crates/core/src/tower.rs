//! Abelian p-towers: stabilization of component counts, tower construction
//! with covering and deck-group verification, spanning-tree counts per level,
//! and the exact-integer fit of the Iwasawa invariants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::gcd;
use crate::ecurve::{self, aut_group, serialize_point};
use crate::graphcore::{IsoOptions, MultiDiGraph, VertexRec};
use crate::volcano::{
    build_graph, build_graph_at_degree, project, verify_covering, Budget, BuildError, BuildParams,
    VolcanoGraph,
};

#[derive(Debug, Clone)]
pub enum TowerError {
    InvalidParams(String),
    Build(BuildError),
    Internal(String),
}

impl fmt::Display for TowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerError::InvalidParams(s) => write!(f, "invalid tower parameters: {}", s),
            TowerError::Build(e) => write!(f, "{}", e),
            TowerError::Internal(s) => write!(f, "internal tower error: {}", s),
        }
    }
}

impl From<BuildError> for TowerError {
    fn from(e: BuildError) -> Self {
        TowerError::Build(e)
    }
}

/// Multiplicative order of l modulo n, by brute stepping with a cap.
fn order_mod(l: u64, n: u64, cap: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    crate::arith::mult_order(l % n, n, cap)
}

/// The integers (m0, c) with ord of l in (Z/N p^m)^x equal to c p^(m - m0)
/// for every m >= m0.
pub fn stabilization_level(n: u64, p: u64, l: u64) -> Result<(u32, u64), TowerError> {
    if gcd(l, n * p) != 1 {
        return Err(TowerError::InvalidParams("gcd(l, N p) must be 1".into()));
    }
    let cap = 100_000_000u64;
    let mut prev = order_mod(l, n * p, cap)
        .ok_or_else(|| TowerError::InvalidParams("order computation over budget".into()))?;
    for m in 1..=40u32 {
        let modulus = n
            .checked_mul(p.checked_pow(m + 1).ok_or_else(|| TowerError::InvalidParams("p^m overflow".into()))?)
            .ok_or_else(|| TowerError::InvalidParams("modulus overflow".into()))?;
        let next = order_mod(l, modulus, cap)
            .ok_or_else(|| TowerError::InvalidParams("order computation over budget".into()))?;
        if next == prev * p {
            // once the order starts multiplying by p it keeps doing so
            return Ok((m, prev));
        }
        prev = next;
    }
    Err(TowerError::Internal("stabilization onset not found within 40 levels".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitOutcome {
    Fit { mu: u64, lambda: u64, nu: i64, n_start: usize },
    Insufficient,
}

/// Exact-integer fit of ord_p(kappa_n) = mu p^n + lambda n + nu on the
/// largest suffix: the coefficients are solved from the last three points and
/// verified leftwards.
pub fn iwasawa_fit(ords: &[u32], p: u64) -> FitOutcome {
    let n = ords.len();
    if n < 3 {
        return FitOutcome::Insufficient;
    }
    let k = n - 3;
    let o = |i: usize| ords[i] as i64;
    let d1 = o(k + 1) - o(k);
    let d2 = o(k + 2) - o(k + 1);
    let pk = (p as i64).pow(k as u32);
    let denom = pk * (p as i64 - 1) * (p as i64 - 1);
    let num = d2 - d1;
    if num % denom != 0 {
        return FitOutcome::Insufficient;
    }
    let mu = num / denom;
    let lambda = d1 - mu * pk * (p as i64 - 1);
    if mu < 0 || lambda < 0 {
        return FitOutcome::Insufficient;
    }
    let nu = o(k) - mu * pk - lambda * k as i64;
    let predicts = |i: usize| -> bool {
        let pi = (p as i64).pow(i as u32);
        o(i) == mu * pi + lambda * i as i64 + nu
    };
    if !(k..n).all(predicts) {
        return FitOutcome::Insufficient;
    }
    let mut n_start = k;
    while n_start > 0 && predicts(n_start - 1) {
        n_start -= 1;
    }
    FitOutcome::Fit { mu: mu as u64, lambda: lambda as u64, nu, n_start }
}

/// The action (E, P) -> (E, aP) on a graph, as vertex and edge permutations.
/// Shares the representative-twist bookkeeping with `project` (scalar 1 level).
pub fn scalar_action(vg: &VolcanoGraph, a: u64) -> Result<(Vec<usize>, Vec<usize>), TowerError> {
    let ctx = &vg.work_ctx;
    let mut vmap = Vec::with_capacity(vg.vertex_count());
    let mut twist = Vec::with_capacity(vg.vertex_count());
    for v in 0..vg.vertex_count() {
        let ci = vg.class_of_vertex[v];
        let curve = vg.work_curve(ci);
        let img = ecurve::scalar_mul(ctx, &curve, a, &vg.points[v]);
        let auts = aut_group(ctx, &curve).map_err(|e| TowerError::Internal(format!("{}", e)))?;
        let canon = ecurve::canonical_point(ctx, &auts, &img);
        let alpha = auts
            .iter()
            .find(|m| m.apply(ctx, &img) == canon)
            .expect("canonical point in orbit")
            .clone();
        let serial = serialize_point(ctx, &canon);
        let w = *vg
            .vertex_index
            .get(&(ci, serial))
            .ok_or_else(|| TowerError::Internal("scalar action leaves the vertex set".into()))?;
        vmap.push(w);
        twist.push(alpha);
    }
    // edge image: kernel twisted by the representative-fixing automorphism
    let mut edge_lookup: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for (i, e) in vg.graph.edges.iter().enumerate() {
        edge_lookup.insert((e.src, e.kernel.as_str()), i);
    }
    let l = vg.params.l;
    let mut emap = Vec::with_capacity(vg.graph.edges.len());
    for e in &vg.graph.edges {
        let ci = vg.class_of_vertex[e.src];
        let curve = vg.work_curve(ci);
        let gen = ecurve::parse_point(ctx, &e.kernel)
            .map_err(|er| TowerError::Internal(format!("bad kernel serial: {}", er)))?;
        let tg = twist[e.src].apply(ctx, &gen);
        let mut best = tg.clone();
        let mut cur = tg.clone();
        for _ in 1..l {
            cur = ecurve::add(ctx, &curve, &cur, &tg);
            if cur.is_inf() {
                break;
            }
            if cur < best {
                best = cur.clone();
            }
        }
        let serial = serialize_point(ctx, &best);
        let ei = *edge_lookup
            .get(&(vmap[e.src], serial.as_str()))
            .ok_or_else(|| TowerError::Internal("scalar action does not permute edges".into()))?;
        emap.push(ei);
    }
    Ok((vmap, emap))
}

#[derive(Debug, Clone)]
pub struct TowerLevel {
    pub m: u32,
    /// vertices and directed edges of the anchor component
    pub vertices: usize,
    pub edges: usize,
    /// components of the whole non-isolated subgraph H_N^m
    pub h_components: usize,
    /// consecutive cover (to the previous level) verified with degree p
    pub consecutive_cover_ok: bool,
    /// composite cover down to the base level verified with degree p^r
    pub composite_cover_ok: bool,
    pub composite_degree: Option<u64>,
    /// deck transformations of the composite cover restricted to the anchor
    /// component: total count, and whether the unit action accounts for all
    pub deck_count: u64,
    pub deck_ok: bool,
    /// fibers over non-isolated base vertices are exactly {(E, l^{cn} P)}
    pub fiber_ok: bool,
    pub kappa: BigInt,
    pub ord_p_kappa: u32,
}

#[derive(Debug, Clone)]
pub struct TowerReport {
    pub m0: u32,
    pub c: u64,
    pub levels: Vec<TowerLevel>,
    pub fit: FitOutcome,
    /// set when level construction stopped early on a budget boundary
    pub truncated: Option<String>,
}

/// Induced subgraph with a vertex map back to the parent.
fn induced(g: &MultiDiGraph, keep: &[usize]) -> (MultiDiGraph, Vec<usize>) {
    let mut back = vec![usize::MAX; g.verts.len()];
    let mut sub = MultiDiGraph::new();
    for &v in keep {
        back[v] = sub.add_vertex(VertexRec::bare(g.verts[v].id.clone()));
    }
    let mut edge_parent = Vec::new();
    for (ei, e) in g.edges.iter().enumerate() {
        if back[e.src] != usize::MAX && back[e.dst] != usize::MAX {
            sub.add_edge(back[e.src], back[e.dst], e.color, e.kernel.clone());
            edge_parent.push(ei);
        }
    }
    (sub, edge_parent)
}

pub struct TowerGraphs {
    pub report: TowerReport,
    pub levels: Vec<VolcanoGraph>,
    /// per level: vertex indices of the anchor component
    pub anchor_components: Vec<Vec<usize>>,
}

/// Builds the tower of non-isolated components above the anchor curve:
/// levels m0 .. m0 + r_max (truncated on budget), all over one working field,
/// with every covering, deck-group, fiber and spanning-tree verification.
pub fn build_tower(
    p: u64,
    deg: u32,
    l: u64,
    n: u64,
    r_max: u32,
    anchor_j: &str,
    seed: u64,
    budget: &Budget,
) -> Result<TowerGraphs, TowerError> {
    let (m0, c) = stabilization_level(n, p, l)?;
    // largest feasible top level within the budget
    let mut top_r = r_max;
    let top_graph = loop {
        let mut params = BuildParams::new(p, deg, l, n, m0 + top_r);
        params.seed = seed;
        match build_graph(&params, budget) {
            Ok(g) => break g,
            Err(BuildError::Sizing(_)) if top_r > 0 => top_r -= 1,
            Err(e) => return Err(e.into()),
        }
    };
    let truncated = if top_r < r_max {
        Some(format!("levels above m = {} exceed the budget", m0 + top_r))
    } else {
        None
    };
    let d_star = top_graph.work_degree;
    // all levels over the same working field
    let mut levels: Vec<VolcanoGraph> = Vec::with_capacity(top_r as usize + 1);
    for r in 0..top_r {
        let mut params = BuildParams::new(p, deg, l, n, m0 + r);
        params.seed = seed;
        let g = build_graph_at_degree(&params, budget, d_star)?;
        if g.work_degree != d_star {
            return Err(TowerError::Internal("level escalated past the shared working field".into()));
        }
        levels.push(g);
    }
    levels.push(top_graph);

    // anchor: the component of the base level containing the anchor curve
    let base = &levels[0];
    let anchor_class = base
        .classes
        .iter()
        .position(|cl| {
            cl.j_serial == anchor_j
                || (!anchor_j.contains(':')
                    && anchor_j.parse::<u64>().is_ok_and(|v| cl.j_base == base.base_ctx.from_u64(v)))
        })
        .ok_or_else(|| TowerError::InvalidParams(format!("anchor j {} is not an ordinary class", anchor_j)))?;
    if base.classes[anchor_class].isolated {
        return Err(TowerError::InvalidParams(
            "anchor curve is isolated; the tower needs a vertex of positive degree".into(),
        ));
    }
    let anchor_comp0 = (0..base.vertex_count())
        .find(|&v| base.class_of_vertex[v] == anchor_class)
        .map(|v| base.comp_of_vertex[v])
        .ok_or_else(|| TowerError::Internal("anchor class has no vertex".into()))?;

    let mut report_levels = Vec::new();
    let mut anchor_components = Vec::new();
    let mut ords = Vec::new();
    for (r, level) in levels.iter().enumerate() {
        let proj = project(level, base)?;
        // the unique component of H over the anchor component
        let comp_ids: BTreeSet<usize> = (0..level.vertex_count())
            .filter(|&v| !level.is_isolated_curve(v) && base.comp_of_vertex[proj.vertex_map[v]] == anchor_comp0)
            .map(|v| level.comp_of_vertex[v])
            .collect();
        if comp_ids.len() != 1 {
            return Err(TowerError::Internal(format!(
                "expected one component over the anchor at level {}, found {}",
                r,
                comp_ids.len()
            )));
        }
        let comp = *comp_ids.iter().next().expect("nonempty");
        let members: Vec<usize> =
            (0..level.vertex_count()).filter(|&v| level.comp_of_vertex[v] == comp).collect();

        let composite = verify_covering(level, base, &proj);
        let consecutive_ok = if r == 0 {
            true
        } else {
            let prev = &levels[r - 1];
            let cproj = project(level, prev)?;
            let rep = verify_covering(level, prev, &cproj);
            rep.is_cover && rep.degree == Some(p)
        };

        // deck transformations of the composite cover on the anchor component
        let (sub, edge_parent) = induced(&level.graph, &members);
        let labels: Vec<usize> = edge_parent.iter().map(|&ei| proj.edge_map[ei]).collect();
        let mut back = BTreeMap::new();
        for (i, &v) in members.iter().enumerate() {
            back.insert(v, i);
        }
        let fibers: Vec<Vec<usize>> = members
            .iter()
            .map(|&v| {
                members
                    .iter()
                    .filter(|&&w| proj.vertex_map[w] == proj.vertex_map[v])
                    .map(|&w| back[&w])
                    .collect()
            })
            .collect();
        let deck = crate::graphcore::search_isomorphisms(
            &sub,
            &sub,
            &IsoOptions {
                candidates: Some(&fibers),
                g_edge_labels: Some(&labels),
                h_edge_labels: Some(&labels),
                count_all: true,
                max_vertices: sub.verts.len().max(64),
            },
        );
        let expected_deck = p.pow(r as u32);

        // the unit action a(E, P) = (E, aP) realizes the whole deck group
        let big_m = n * p.pow(level.params.m);
        let small_m = n * p.pow(m0);
        let mut action_ok = true;
        let mut action_perms: BTreeSet<Vec<usize>> = BTreeSet::new();
        for k in 0..expected_deck {
            let a = (1 + small_m * k) % big_m;
            let (vmap, emap) = scalar_action(level, a)?;
            // automorphism: edges permute with matching endpoints
            for (ei, e) in level.graph.edges.iter().enumerate() {
                let f = &level.graph.edges[emap[ei]];
                if f.src != vmap[e.src] || f.dst != vmap[e.dst] {
                    action_ok = false;
                }
            }
            // commutes with the projection
            for v in &members {
                if proj.vertex_map[vmap[*v]] != proj.vertex_map[*v] {
                    action_ok = false;
                }
            }
            // freeness on the anchor component
            if a % big_m != 1 && members.iter().any(|&v| vmap[v] == v) {
                action_ok = false;
            }
            action_perms.insert(members.iter().map(|&v| vmap[v]).collect());
        }
        let deck_ok = action_ok && action_perms.len() as u64 == expected_deck && deck.count == expected_deck;

        // fibers over non-isolated base vertices: exactly {(E, l^{c n0} P)}
        let mut fiber_ok = true;
        let step_scalar = crate::arith::pow_mod(l, c, big_m);
        let (step_vmap, _) = scalar_action(level, step_scalar % big_m)?;
        let mut by_base: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &members {
            by_base.entry(proj.vertex_map[v]).or_default().push(v);
        }
        let expected_fiber = p.pow(level.params.m - m0) as usize;
        for (_, fiber) in by_base.iter() {
            if fiber.len() != expected_fiber {
                fiber_ok = false;
                continue;
            }
            // orbit of one preimage under multiplication by l^c
            let mut orbit = BTreeSet::new();
            let mut cur = fiber[0];
            for _ in 0..expected_fiber {
                orbit.insert(cur);
                cur = step_vmap[cur];
            }
            if orbit != fiber.iter().copied().collect::<BTreeSet<_>>() {
                fiber_ok = false;
            }
        }

        let kappa = level.graph.spanning_tree_count_of(&members);
        let ord = valuation_bigint(&kappa, p);
        ords.push(ord);
        report_levels.push(TowerLevel {
            m: level.params.m,
            vertices: members.len(),
            edges: sub.edges.len(),
            h_components: level.h_component_count(),
            consecutive_cover_ok: consecutive_ok,
            composite_cover_ok: composite.is_cover,
            composite_degree: composite.degree,
            deck_count: deck.count,
            deck_ok,
            fiber_ok,
            kappa,
            ord_p_kappa: ord,
        });
        anchor_components.push(members);
    }
    let fit = iwasawa_fit(&ords, p);
    Ok(TowerGraphs {
        report: TowerReport { m0, c, levels: report_levels, fit, truncated },
        levels,
        anchor_components,
    })
}

pub fn valuation_bigint(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero(), "kappa must be a positive integer");
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut cur = x.clone();
    while (&cur % &pb).is_zero() {
        cur /= &pb;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stabilization_examples() {
        // ord(2) mod 5 = 4, mod 25 = 20
        assert_eq!(stabilization_level(1, 5, 2).unwrap(), (1, 4));
        // 409 = 1 mod 3, ord mod 9 = 3
        assert_eq!(stabilization_level(1, 3, 409).unwrap(), (1, 1));
        // l = 1 mod N p^2 forces m0 = 2 with c = 1: l = 1 + 25 = 26 = 2*13
        assert_eq!(stabilization_level(1, 5, 151).unwrap(), (2, 1));
        assert!(stabilization_level(1, 5, 5).is_err());
    }

    #[test]
    fn fit_examples() {
        assert_eq!(
            iwasawa_fit(&[1, 6, 27, 128], 5),
            FitOutcome::Fit { mu: 1, lambda: 1, nu: 0, n_start: 0 }
        );
        assert_eq!(
            iwasawa_fit(&[0, 1, 2, 3], 7),
            FitOutcome::Fit { mu: 0, lambda: 1, nu: 0, n_start: 0 }
        );
        assert_eq!(
            iwasawa_fit(&[7, 7, 7], 3),
            FitOutcome::Fit { mu: 0, lambda: 0, nu: 7, n_start: 0 }
        );
        assert_eq!(iwasawa_fit(&[1, 2], 3), FitOutcome::Insufficient);
        // noisy head, exact tail
        assert_eq!(
            iwasawa_fit(&[9, 1, 2, 3], 7),
            FitOutcome::Fit { mu: 0, lambda: 1, nu: 0, n_start: 1 }
        );
    }

    #[test]
    fn small_tower_over_f5() {
        // p=5, l=2, N=1 with r_max = 1: levels m = 1, 2
        let tg = build_tower(5, 1, 2, 1, 1, "3", 0, &Budget::default()).unwrap();
        assert_eq!(tg.report.m0, 1);
        assert_eq!(tg.report.c, 4);
        assert_eq!(tg.report.levels.len(), 2);
        let l0 = &tg.report.levels[0];
        assert_eq!(l0.vertices, 3);
        assert_eq!(l0.kappa, BigInt::from(4));
        assert!(l0.composite_cover_ok && l0.deck_ok && l0.fiber_ok);
        assert_eq!(l0.deck_count, 1);
        let l1 = &tg.report.levels[1];
        assert_eq!(l1.vertices, 15);
        assert!(l1.consecutive_cover_ok && l1.composite_cover_ok);
        assert_eq!(l1.composite_degree, Some(5));
        assert!(l1.deck_ok && l1.fiber_ok, "deck count {}", l1.deck_count);
        assert_eq!(l1.deck_count, 5);
        // component counts of H stabilize at one from m0 on
        assert!(tg.report.levels.iter().all(|lv| lv.h_components == 1));
    }

}
