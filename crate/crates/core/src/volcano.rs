//! Construction of the level-structure isogeny graphs G_N^m over F_q:
//! vertex enumeration of (E, P) classes, edge construction by Velu kernels,
//! level assignment, projection maps, and covering verification.
//!
//! The build runs in two phases. Phase 1 works at a small extension degree
//! sufficient for E[l] and derives the intrinsic j-graph: adjacency of
//! j-invariants, isolation, components, discriminants, depths and levels.
//! Phase 2 re-runs at the full working degree (torsion for N p^m plus any
//! roots of unity and twist scalars) and produces the vertex-level graph.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

use crate::arith::{factor, gcd, is_prime, kronecker, valuation};
use crate::ecurve::{
    self, aut_group, curve_from_j, is_ordinary, iso_between, j_invariant, serialize_point,
    torsion_generators, trace_of_frobenius, AutMap, Curve, EcError, Point, TorsionBasis,
};
use crate::graphcore::{EdgeColor, GraphMeta, MultiDiGraph, VertexRec};
use crate::isogeny::{velu_isogeny, IsogenyError, IsogenyStep};
use crate::qfield::{make_field, FieldCtx, FieldElement, FieldError};

#[derive(Debug, Clone)]
pub enum BuildError {
    InvalidParams(String),
    Sizing(String),
    Internal(String),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::InvalidParams(s) => write!(f, "invalid parameters: {}", s),
            BuildError::Sizing(s) => write!(f, "sizing: {}", s),
            BuildError::Internal(s) => write!(f, "internal error: {}", s),
        }
    }
}

impl From<EcError> for BuildError {
    fn from(e: EcError) -> Self {
        BuildError::Internal(format!("{}", e))
    }
}

impl From<IsogenyError> for BuildError {
    fn from(e: IsogenyError) -> Self {
        BuildError::Internal(format!("{}", e))
    }
}

impl From<FieldError> for BuildError {
    fn from(e: FieldError) -> Self {
        BuildError::Internal(format!("{}", e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildParams {
    pub p: u64,
    /// degree of the base field over F_p
    pub deg: u32,
    pub l: u64,
    /// the prime-to-p part N of the level
    pub n: u64,
    /// the p-power exponent m of the level
    pub m: u32,
    pub exclude_special_j: bool,
    /// restrict to these base-field j-invariants (serials or plain integers)
    pub j_filter: Option<Vec<String>>,
    pub seed: u64,
}

impl BuildParams {
    pub fn new(p: u64, deg: u32, l: u64, n: u64, m: u32) -> Self {
        BuildParams { p, deg, l, n, m, exclude_special_j: false, j_filter: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// cap on the working degree D over the base field
    pub max_degree: u32,
    pub max_vertices: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_degree: 200, max_vertices: 20_000 }
    }
}

/// Phase-1 data for one ordinary j over the base field.
#[derive(Debug, Clone)]
pub struct CurveClass {
    pub j_base: FieldElement,
    pub j_serial: String,
    pub trace: i64,
    /// d_pi = t^2 - 4q of the standard representative
    pub d_pi: i64,
    pub special: bool,
    /// no edges at all in the intrinsic j-graph
    pub isolated: bool,
    pub level: u32,
    pub j_component: usize,
}

/// Metadata of one connected component of the built vertex-level graph.
#[derive(Debug, Clone)]
pub struct ComponentInfo {
    pub id: usize,
    /// trace of a generic member class (of the standard representative)
    pub trace: i64,
    pub d_pi: i64,
    pub d_k: i64,
    /// conductor f with d_pi = f^2 d_K (1 when only special j's are present)
    pub conductor: u64,
    /// v_l of the conductor: the class depth
    pub depth: u32,
    /// Kronecker symbol (d_K / l): 1 split, 0 ramified, -1 inert
    pub kron: i32,
    pub has_special_j: bool,
    /// all crater vertices have loop-free, pairwise-distinct counted edges
    pub suff_large: bool,
}

/// The built graph with all side data needed by later analyses.
pub struct VolcanoGraph {
    pub params: BuildParams,
    pub meta: GraphMeta,
    pub graph: MultiDiGraph,
    pub base_ctx: FieldCtx,
    pub work_ctx: FieldCtx,
    /// working degree D over the base field
    pub work_degree: u32,
    /// image of the base-field generator in the working field
    pub embed_root: FieldElement,
    pub classes: Vec<CurveClass>,
    /// per vertex: index into `classes`
    pub class_of_vertex: Vec<usize>,
    /// per vertex: canonical point on the standard model over work_ctx
    pub points: Vec<Point>,
    /// per vertex: component id (same as graph.verts[v].component)
    pub comp_of_vertex: Vec<usize>,
    pub comps: Vec<ComponentInfo>,
    /// cached isogeny data: (class, kernel serial) -> step, iso to the
    /// standard target model, and the target class when rational
    pub steps: BTreeMap<(usize, String), (IsogenyStep, Option<(AutMap, usize)>)>,
    /// per in-scope class: generators of E[l] over the working field
    pub torsion_l: BTreeMap<usize, TorsionBasis>,
    /// lookup: (class, canonical point serial) -> vertex index
    pub vertex_index: BTreeMap<(usize, String), usize>,
}

impl VolcanoGraph {
    pub fn q(&self) -> u64 {
        self.base_ctx.order().to_u64().expect("base field size fits u64")
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.verts.len()
    }

    /// Whether the curve of a vertex is isolated in the intrinsic j-graph
    /// (the vertex then lies outside H_N^m).
    pub fn is_isolated_curve(&self, v: usize) -> bool {
        self.classes[self.class_of_vertex[v]].isolated
    }

    pub fn level_of_vertex(&self, v: usize) -> u32 {
        self.classes[self.class_of_vertex[v]].level
    }

    /// Vertices of the non-isolated subgraph H_N^m.
    pub fn h_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.is_isolated_curve(v)).collect()
    }

    /// Component count of H_N^m (components of the subgraph induced on
    /// non-isolated curves; edges never leave it).
    pub fn h_component_count(&self) -> usize {
        let hs: BTreeSet<usize> = self.h_vertices().into_iter().map(|v| self.comp_of_vertex[v]).collect();
        hs.len()
    }

    /// The standard curve of a class over the working field.
    pub fn work_curve(&self, class_idx: usize) -> Curve {
        let j = self.embed(&self.classes[class_idx].j_base);
        curve_from_j(&self.work_ctx, &j)
    }

    /// Base-field element embedded into the working field.
    pub fn embed(&self, a: &FieldElement) -> FieldElement {
        embed_element(&self.work_ctx, &self.embed_root, a)
    }
}

fn embed_element(work: &FieldCtx, root: &FieldElement, a: &FieldElement) -> FieldElement {
    // a = sum c_i alpha^i maps to sum c_i root^i
    let mut acc = work.zero();
    let mut pow = work.one();
    for (i, &c) in a.c.iter().enumerate() {
        if i > 0 {
            pow = work.mul(&pow, root);
        }
        acc = work.add(&acc, &work.scalar_mul(c, &pow));
    }
    acc
}

/// Canonical root of the base modulus inside the working field; identity for
/// prime base fields, quadratic formula for degree-2 bases.
fn embedding_root(base: &FieldCtx, work: &FieldCtx) -> Result<FieldElement, BuildError> {
    match base.degree() {
        1 => Ok(work.zero()),
        2 => {
            let m = base.modulus(); // x^2 + c1 x + c0
            let (c0, c1) = (m[0], m[1]);
            let disc = {
                let c1e = work.from_u64(c1);
                let c0e = work.from_u64(c0);
                work.sub(&work.sqr(&c1e), &work.scalar_mul(4, &c0e))
            };
            let s = work
                .sqrt(&disc)
                .ok_or_else(|| BuildError::Internal("quadratic base has no root in work field".into()))?;
            let half = work.inv(&work.from_u64(2)).expect("2 invertible");
            let r1 = work.mul(&work.sub(&s, &work.from_u64(c1)), &half);
            let r2 = work.mul(&work.sub(&work.neg(&s), &work.from_u64(c1)), &half);
            Ok(if r1.c < r2.c { r1 } else { r2 })
        }
        d => Err(BuildError::InvalidParams(format!("base degree {} unsupported (use 1 or 2)", d))),
    }
}

fn validate(params: &BuildParams) -> Result<(), BuildError> {
    if !is_prime(params.p) || params.p < 5 {
        return Err(BuildError::InvalidParams(format!("p = {} must be a prime > 3", params.p)));
    }
    if !is_prime(params.l) {
        return Err(BuildError::InvalidParams(format!("l = {} must be prime", params.l)));
    }
    if params.l == params.p {
        return Err(BuildError::InvalidParams("l != p is a standing hypothesis".into()));
    }
    if params.n == 0 || gcd(params.n, params.p * params.l) != 1 {
        return Err(BuildError::InvalidParams(format!(
            "N = {} must be positive and coprime to p*l = {}",
            params.n,
            params.p * params.l
        )));
    }
    if params.deg == 0 || params.deg > 2 {
        return Err(BuildError::InvalidParams("base degree must be 1 or 2".into()));
    }
    let q = (params.p as u128).pow(params.deg);
    if q > 1_000_000 {
        return Err(BuildError::Sizing("base field beyond the q <= 10^6 enumeration budget".into()));
    }
    let npm = (params.n as u128) * (params.p as u128).pow(params.m);
    if npm > 10_000 {
        return Err(BuildError::Sizing("N p^m beyond the 10^4 torsion budget".into()));
    }
    Ok(())
}

/// Order of the companion matrix [[0, -q], [1, t]] modulo n: the degree where
/// the full n-torsion becomes rational. None if it exceeds the cap.
fn frobenius_matrix_order(t: i64, q: u64, n: u64, cap: u32) -> Option<u32> {
    let tm = t.rem_euclid(n as i64) as u64;
    let qm = (n as i64 - (q % n) as i64).rem_euclid(n as i64) as u64; // -q mod n
    let (mut a, mut b, mut c, mut d) = (0u64, qm, 1u64, tm); // M itself
    let mut k = 1u32;
    loop {
        if a == 1 && b == 0 && c == 0 && d == 1 {
            return Some(k);
        }
        if k >= cap {
            return None;
        }
        // multiply by M = [[0, qm], [1, tm]] on the right:
        // [a b; c d] * [0 qm; 1 tm] = [b, a*qm + b*tm; d, c*qm + d*tm]
        let (na, nb) = (b, (a * qm + b * tm) % n);
        let (nc, nd) = (d, (c * qm + d * tm) % n);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        k += 1;
    }
}

/// Least e >= 1 with p^m | #E(F_{q^e}), via the trace recurrence modulo p^m.
fn p_power_torsion_degree(t: i64, q: u64, p: u64, m: u32, cap: u32) -> Option<u32> {
    if m == 0 {
        return Some(1);
    }
    let pm = p.pow(m);
    let tm = t.rem_euclid(pm as i64) as u64;
    let qm = q % pm;
    let mut s0 = 2 % pm;
    let mut s1 = tm;
    for e in 1..=cap {
        // #E(F_{q^e}) = q^e + 1 - s_e
        let qe = crate::arith::pow_mod(qm, e as u64, pm);
        let count = (qe + 1 + pm - s1 % pm) % pm;
        if count == 0 {
            return Some(e);
        }
        let s2 = (crate::arith::mul_mod(tm, s1, pm) + pm * pm - crate::arith::mul_mod(qm, s0, pm)) % pm;
        s0 = s1;
        s1 = s2;
    }
    None
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a / (gcd(a as u64, b as u64) as u32) * b
}

/// Small cache of working fields indexed by degree over the base.
struct FieldCache {
    p: u64,
    deg: u32,
    fields: BTreeMap<u32, (FieldCtx, FieldElement)>,
}

impl FieldCache {
    fn new(p: u64, deg: u32) -> Self {
        FieldCache { p, deg, fields: BTreeMap::new() }
    }

    fn get(&mut self, base: &FieldCtx, e: u32) -> Result<&(FieldCtx, FieldElement), BuildError> {
        if !self.fields.contains_key(&e) {
            let ctx = make_field(self.p, (self.deg * e) as usize)?;
            let root = embedding_root(base, &ctx)?;
            self.fields.insert(e, (ctx, root));
        }
        Ok(&self.fields[&e])
    }
}

fn sorted_divisors(n: u32) -> Vec<u32> {
    let mut d = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            d.push(i);
            if i != n / i {
                d.push(n / i);
            }
        }
        i += 1;
    }
    d.sort_unstable();
    d
}

/// Smallest e with E[n] fully rational over F_{q^e}. The order of Frobenius
/// on Z[pi]/n bounds it from above; candidate divisors are filtered by count
/// divisibility and root-of-unity membership, then confirmed by sampling the
/// torsion structure in the candidate field.
fn torsion_degree(
    base: &FieldCtx,
    cache: &mut FieldCache,
    j_base: &FieldElement,
    t: i64,
    n: u64,
    cap: u32,
    rng: &mut ChaCha12Rng,
) -> Result<Option<u32>, BuildError> {
    let q = base.order().to_u64().expect("base field fits u64");
    let Some(d_comp) = frobenius_matrix_order(t, q, n, cap) else {
        return Ok(None);
    };
    for e in sorted_divisors(d_comp) {
        // count divisibility: n^2 | #E(F_{q^e})
        let count = ecurve::count_points_ext(t, q, e as usize);
        if (&count % num_bigint::BigInt::from(n * n)) != num_bigint::BigInt::from(0) {
            continue;
        }
        // root-of-unity membership: n | q^e - 1 (Weil pairing target)
        if crate::arith::pow_mod(q % n, e as u64, n) != 1 % n {
            continue;
        }
        if e == d_comp {
            return Ok(Some(e)); // guaranteed by the matrix order
        }
        let (ctx, root) = cache.get(base, e)?;
        let ew = curve_from_j(ctx, &embed_element(ctx, root, j_base));
        let order = count.to_biguint().expect("positive count");
        match torsion_generators(ctx, &ew, n, &order, rng, 2000) {
            Ok(tors) if tors.fully_rational() => return Ok(Some(e)),
            _ => {}
        }
    }
    Ok(Some(d_comp))
}

/// Report from the working-degree computation.
#[derive(Debug, Clone)]
pub struct WorkingDegreeReport {
    /// chosen D over the base field
    pub degree: u32,
    /// per ordinary class: (j serial, degree for E[l], degree for E[N p^m])
    pub per_class: Vec<(String, u32, u32)>,
}

/// Phase-1 intrinsic data shared by the builder and the public
/// `working_degree` entry point.
struct Phase1 {
    base_ctx: FieldCtx,
    classes: Vec<CurveClass>,
    /// per class: smallest degree with E[l] rational
    d_l_per_class: Vec<u32>,
    /// per j-component: (trace, d_pi, d_k, conductor, depth, kron)
    j_comp_info: Vec<(i64, i64, i64, u64, u32, i32)>,
    d_j: u32,
}

fn phase1(params: &BuildParams, budget: &Budget) -> Result<Phase1, BuildError> {
    let q = (params.p as u64).pow(params.deg);
    let base_ctx = make_field(params.p, params.deg as usize)?;

    // ordinary classes in canonical j order
    let mut classes = Vec::new();
    for j in base_ctx.iter_elements() {
        let e = curve_from_j(&base_ctx, &j);
        if base_ctx.is_zero(&ecurve::discriminant(&base_ctx, &e)) {
            continue;
        }
        let t = trace_of_frobenius(&base_ctx, &e).map_err(BuildError::from)?;
        if !is_ordinary(t, params.p) {
            continue;
        }
        let special = base_ctx.is_zero(&j) || j == base_ctx.from_u64(1728);
        classes.push(CurveClass {
            j_serial: base_ctx.serialize(&j),
            j_base: j,
            trace: t,
            d_pi: t * t - 4 * q as i64,
            special,
            isolated: true,
            level: 0,
            j_component: 0,
        });
    }
    if classes.is_empty() {
        return Err(BuildError::Sizing("no ordinary curves over this base field".into()));
    }

    // smallest degree making every E[l] rational
    let mut cache = FieldCache::new(params.p, params.deg);
    let mut degree_rng = ChaCha12Rng::seed_from_u64(params.seed ^ 0x5DEECE66D);
    let mut d_j = 1u32;
    let mut d_l_per_class = Vec::with_capacity(classes.len());
    for c in &classes {
        let d = torsion_degree(&base_ctx, &mut cache, &c.j_base, c.trace, params.l, budget.max_degree * 4, &mut degree_rng)?
            .ok_or_else(|| BuildError::Sizing(format!("E[l] degree for j = {} exceeds the cap", c.j_serial)))?;
        d_l_per_class.push(d);
        d_j = lcm_u32(d_j, d);
        if d_j > budget.max_degree {
            return Err(BuildError::Sizing(format!(
                "l-torsion working degree {} exceeds the budget {}",
                d_j, budget.max_degree
            )));
        }
    }

    // work field for the j-graph
    let work_ctx = make_field(params.p, (params.deg * d_j) as usize)?;
    let root = embedding_root(&base_ctx, &work_ctx)?;
    let mut j_table: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        let emb = embed_element(&work_ctx, &root, &c.j_base);
        j_table.insert(emb.c, i);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(params.seed ^ 0x9E3779B97F4A7C15);
    let mut j_edges: Vec<(usize, usize)> = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let ew = curve_from_j(&work_ctx, &embed_element(&work_ctx, &root, &c.j_base));
        let order = ecurve::count_points_ext(c.trace, q, d_j as usize)
            .to_biguint()
            .expect("positive count");
        let tors = torsion_generators(&work_ctx, &ew, params.l, &order, &mut rng, 4000)
            .map_err(BuildError::from)?;
        if !tors.fully_rational() {
            return Err(BuildError::Internal(format!(
                "E[l] not rational at the computed degree for j = {}",
                c.j_serial
            )));
        }
        let kernels = crate::isogeny::enumerate_kernels(&work_ctx, &ew, params.l, &tors)
            .map_err(BuildError::from)?;
        for g in &kernels {
            let step = velu_isogeny(&work_ctx, &ew, g, params.l).map_err(BuildError::from)?;
            let j2 = j_invariant(&work_ctx, &step.codomain);
            if let Some(&tgt) = j_table.get(&j2.c) {
                j_edges.push((i, tgt));
            }
        }
    }

    // isolation and j-components
    for &(a, b) in &j_edges {
        classes[a].isolated = false;
        classes[b].isolated = false;
    }
    let n_classes = classes.len();
    let mut parent: Vec<usize> = (0..n_classes).collect();
    fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in &j_edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
    }
    let mut comp_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n_classes {
        let r = find(&mut parent, i);
        let next = comp_ids.len();
        let id = *comp_ids.entry(r).or_insert(next);
        classes[i].j_component = id;
    }
    let n_comps = comp_ids.len();

    // per-component arithmetic invariants
    let mut j_comp_info = Vec::with_capacity(n_comps);
    for comp in 0..n_comps {
        let members: Vec<usize> = (0..n_classes).filter(|&i| classes[i].j_component == comp).collect();
        let generic = members.iter().copied().find(|&i| !classes[i].special);
        let (t, d_pi, d_k, cond, depth) = match generic {
            Some(i) => {
                let t = classes[i].trace;
                let d_pi = classes[i].d_pi;
                let (d_k, f) = crate::arith::fundamental_discriminant(d_pi);
                (t, d_pi, d_k, f, valuation(f, params.l))
            }
            None => {
                // only special j's: their endomorphism rings are maximal
                let i = members[0];
                let d_k = if classes[i].j_base == base_ctx.from_u64(1728) && !base_ctx.is_zero(&classes[i].j_base) {
                    -4
                } else if base_ctx.is_zero(&classes[i].j_base) {
                    -3
                } else {
                    -4
                };
                (classes[i].trace, classes[i].d_pi, d_k, 1, 0)
            }
        };
        let kron = kronecker(d_k, params.l as i64);
        j_comp_info.push((t, d_pi, d_k, cond, depth, kron));
    }

    // levels: depth-0 components are all level 0; otherwise BFS up from the
    // floor (classes whose rational out-degree is 1)
    let mut out_deg = vec![0usize; n_classes];
    for &(a, _) in &j_edges {
        out_deg[a] += 1;
    }
    for comp in 0..n_comps {
        let members: Vec<usize> = (0..n_classes).filter(|&i| classes[i].j_component == comp).collect();
        let depth = j_comp_info[comp].4;
        if depth == 0 {
            for &i in &members {
                classes[i].level = 0;
            }
            continue;
        }
        if members.len() == 1 {
            return Err(BuildError::Internal(
                "single-curve component with positive depth is inconsistent".into(),
            ));
        }
        let floor: Vec<usize> = members.iter().copied().filter(|&i| out_deg[i] == 1).collect();
        if floor.is_empty() {
            return Err(BuildError::Internal("no floor found in a positive-depth component".into()));
        }
        // BFS distance to the floor over the undirected j-graph
        let mut dist: BTreeMap<usize, u32> = floor.iter().map(|&i| (i, 0)).collect();
        let mut queue: Vec<usize> = floor.clone();
        let mut qi = 0;
        while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            for &(a, b) in &j_edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !dist.contains_key(&y) && classes[y].j_component == comp {
                        dist.insert(y, dist[&v] + 1);
                        queue.push(y);
                    }
                }
            }
        }
        let max_dist = dist.values().copied().max().unwrap_or(0);
        if max_dist != depth {
            return Err(BuildError::Internal(format!(
                "floor distance {} disagrees with conductor depth {}",
                max_dist, depth
            )));
        }
        for &i in &members {
            let d = *dist
                .get(&i)
                .ok_or_else(|| BuildError::Internal("class unreachable from the floor".into()))?;
            classes[i].level = depth - d;
        }
    }

    Ok(Phase1 { base_ctx, classes, d_l_per_class, j_comp_info, d_j })
}

/// Computes the working degree D <= budget.max_degree making, for every
/// ordinary curve in scope, E[l] and E[N p^m] rational over F_{q^D} with the
/// isomorphism scalars present, or reports why the parameters are rejected.
fn working_degree_of(ph1: &Phase1, params: &BuildParams, budget: &Budget) -> Result<WorkingDegreeReport, BuildError> {
    let q = (params.p as u64).pow(params.deg);
    let mut cache = FieldCache::new(params.p, params.deg);
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed ^ 0x2545F4914F6CDD1D);
    let mut d = ph1.d_j;
    let mut per_class = Vec::new();
    for (i, c) in ph1.classes.iter().enumerate() {
        let d_l = ph1.d_l_per_class[i];
        let d_n = if params.n > 1 {
            torsion_degree(&ph1.base_ctx, &mut cache, &c.j_base, c.trace, params.n, budget.max_degree * 8, &mut rng)?
                .ok_or_else(|| {
                    BuildError::Sizing(format!("E[N] degree for j = {} exceeds the cap", c.j_serial))
                })?
        } else {
            1
        };
        let d_p = p_power_torsion_degree(c.trace, q, params.p, params.m, budget.max_degree * 8)
            .ok_or_else(|| {
                BuildError::Sizing(format!("p-power torsion degree for j = {} exceeds the cap", c.j_serial))
            })?;
        let d_tor = lcm_u32(d_n, d_p);
        per_class.push((c.j_serial.clone(), d_l, d_tor));
        d = lcm_u32(d, lcm_u32(d_l, d_tor));
        if d > budget.max_degree {
            return Err(BuildError::Sizing(format!(
                "working degree {} exceeds the budget {} (j = {})",
                d, budget.max_degree, c.j_serial
            )));
        }
    }
    // roots of unity for the special automorphisms
    let has_1728 = ph1.classes.iter().any(|c| c.j_base == ph1.base_ctx.from_u64(1728));
    let has_0 = ph1.classes.iter().any(|c| ph1.base_ctx.is_zero(&c.j_base));
    if has_1728 && q % 4 == 3 {
        d = lcm_u32(d, 2);
    }
    if has_0 && q % 3 == 2 {
        d = lcm_u32(d, 2);
    }
    if d > budget.max_degree {
        return Err(BuildError::Sizing(format!("working degree {} exceeds the budget", d)));
    }
    Ok(WorkingDegreeReport { degree: d, per_class })
}

/// Computes the smallest working degree D <= budget.max_degree making, for
/// every ordinary curve in scope, E[l] and E[N p^m] rational over F_{q^D}
/// with the needed roots of unity present, or reports why the parameters are
/// rejected.
pub fn working_degree(params: &BuildParams, budget: &Budget) -> Result<WorkingDegreeReport, BuildError> {
    validate(params)?;
    let ph1 = phase1(params, budget)?;
    working_degree_of(&ph1, params, budget)
}

/// Builds G_N^m. Deterministic for fixed parameters: the seed only drives
/// torsion sampling, whose output (the canonical graph) is seed-independent.
pub fn build_graph(params: &BuildParams, budget: &Budget) -> Result<VolcanoGraph, BuildError> {
    validate(params)?;
    let ph1 = phase1(params, budget)?;
    let wd = working_degree_of(&ph1, params, budget)?;
    build_with_retries(&ph1, params, budget, wd.degree)
}

/// Builds G_N^m at a working degree that must be a multiple of the computed
/// minimum (towers use this so every level shares one working field).
pub fn build_graph_at_degree(
    params: &BuildParams,
    budget: &Budget,
    d: u32,
) -> Result<VolcanoGraph, BuildError> {
    validate(params)?;
    let ph1 = phase1(params, budget)?;
    let wd = working_degree_of(&ph1, params, budget)?;
    if d % wd.degree != 0 {
        return Err(BuildError::InvalidParams(format!(
            "requested degree {} is not a multiple of the minimum {}",
            d, wd.degree
        )));
    }
    build_with_retries(&ph1, params, budget, d)
}

/// Twist scalars may be missing over the minimal field; retry with the hinted
/// multiple when an isomorphism fails to exist over F_{q^D}.
fn build_with_retries(
    ph1: &Phase1,
    params: &BuildParams,
    budget: &Budget,
    start: u32,
) -> Result<VolcanoGraph, BuildError> {
    let mut d = start;
    loop {
        match build_at_degree(ph1, params, budget, d) {
            Ok(g) => return Ok(g),
            Err(BuildRetry::NeedLargerField(hint)) => {
                d = d.saturating_mul(hint);
                if d > budget.max_degree {
                    return Err(BuildError::Sizing(format!(
                        "twist scalars push the working degree past the budget ({})",
                        budget.max_degree
                    )));
                }
            }
            Err(BuildRetry::Fail(e)) => return Err(e),
        }
    }
}

enum BuildRetry {
    NeedLargerField(u32),
    Fail(BuildError),
}

impl From<BuildError> for BuildRetry {
    fn from(e: BuildError) -> Self {
        BuildRetry::Fail(e)
    }
}

fn ec_retry(e: EcError) -> BuildRetry {
    match e {
        EcError::NeedLargerField(h) => BuildRetry::NeedLargerField(h),
        other => BuildRetry::Fail(BuildError::Internal(format!("{}", other))),
    }
}

fn build_at_degree(ph1: &Phase1, params: &BuildParams, budget: &Budget, d: u32) -> Result<VolcanoGraph, BuildRetry> {
    let q = (params.p as u64).pow(params.deg);
    let npm = params.n * params.p.pow(params.m);
    let work_ctx = make_field(params.p, (params.deg * d) as usize).map_err(BuildError::from)?;
    let embed_root = embedding_root(&ph1.base_ctx, &work_ctx)?;
    let embed = |a: &FieldElement| embed_element(&work_ctx, &embed_root, a);

    // scope: filters apply to vertices and edges, never to the intrinsic data
    let j_filter: Option<BTreeSet<String>> = match &params.j_filter {
        None => None,
        Some(list) => {
            let mut set = BTreeSet::new();
            for item in list {
                let fe = if item.contains(':') {
                    ph1.base_ctx
                        .parse(item)
                        .map_err(|e| BuildError::InvalidParams(format!("bad j in filter: {}", e)))?
                } else {
                    let v: u64 = item
                        .parse()
                        .map_err(|_| BuildError::InvalidParams(format!("bad j in filter: {}", item)))?;
                    ph1.base_ctx.from_u64(v)
                };
                set.insert(ph1.base_ctx.serialize(&fe));
            }
            Some(set)
        }
    };
    let in_scope = |c: &CurveClass| -> bool {
        if params.exclude_special_j && c.special {
            return false;
        }
        match &j_filter {
            Some(f) => f.contains(&c.j_serial),
            None => true,
        }
    };

    let mut j_table: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for (i, c) in ph1.classes.iter().enumerate() {
        j_table.insert(embed(&c.j_base).c, i);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    let mut graph = MultiDiGraph::new();
    let mut class_of_vertex: Vec<usize> = Vec::new();
    let mut points: Vec<Point> = Vec::new();
    let mut vertex_index: BTreeMap<(usize, String), usize> = BTreeMap::new();

    // vertex enumeration, class by class in canonical order
    struct ClassData {
        curve: Curve,
        auts: Vec<AutMap>,
        tors_l: TorsionBasis,
    }
    let mut class_data: BTreeMap<usize, ClassData> = BTreeMap::new();
    for (ci, c) in ph1.classes.iter().enumerate() {
        if !in_scope(c) {
            continue;
        }
        let ew = curve_from_j(&work_ctx, &embed(&c.j_base));
        let auts = aut_group(&work_ctx, &ew).map_err(ec_retry)?;
        let order = ecurve::count_points_ext(c.trace, q, d as usize)
            .to_biguint()
            .expect("positive count");
        let tors_l = torsion_generators(&work_ctx, &ew, params.l, &order, &mut rng, 6000)
            .map_err(|e| BuildRetry::Fail(BuildError::Internal(format!("{}", e))))?;
        if !tors_l.fully_rational() {
            return Err(BuildRetry::Fail(BuildError::Internal(format!(
                "E[l] not rational over the working field for j = {}",
                c.j_serial
            ))));
        }

        if npm == 1 {
            // the unique trivial point class
            let serial = serialize_point(&work_ctx, &Point::Inf);
            let v = graph.add_vertex(VertexRec {
                id: String::new(),
                j: Some(c.j_serial.clone()),
                point: Some(serial.clone()),
                level: Some(c.level),
                component: None,
            });
            class_of_vertex.push(ci);
            points.push(Point::Inf);
            vertex_index.insert((ci, serial), v);
        } else {
            let tors = torsion_generators(&work_ctx, &ew, npm, &order, &mut rng, 6000)
                .map_err(|e| BuildRetry::Fail(BuildError::Internal(format!("{}", e))))?;
            // the N-part must be fully rational, the p-part cyclic of order p^m
            for (r, e_r) in factor(params.n) {
                let need = r.pow(e_r);
                if tors.a_order % need != 0 || tors.b_order % need != 0 {
                    return Err(BuildRetry::Fail(BuildError::Internal(format!(
                        "E[N] not rational over the working field for j = {}",
                        c.j_serial
                    ))));
                }
            }
            if params.m > 0 && tors.a_order % params.p.pow(params.m) != 0 {
                return Err(BuildRetry::Fail(BuildError::Internal(format!(
                    "p-power torsion not rational over the working field for j = {}",
                    c.j_serial
                ))));
            }
            let (a_ord, b_ord) = (tors.a_order, tors.b_order);
            let mut seen: BTreeSet<String> = BTreeSet::new();
            // incremental sweep over x*G_a + y*G_b
            let mut px = Point::Inf;
            for x in 0..a_ord {
                if x > 0 {
                    px = ecurve::add(&work_ctx, &ew, &px, &tors.gen_a);
                }
                let mut pxy = px.clone();
                for y in 0..b_ord {
                    if y > 0 {
                        pxy = ecurve::add(&work_ctx, &ew, &pxy, &tors.gen_b);
                    }
                    // exact order of (x, y) in Z/a x Z/b
                    let ox = a_ord / gcd(x, a_ord);
                    let oy = b_ord / gcd(y, b_ord);
                    let ord = ox / gcd(ox, oy) * oy;
                    if ord != npm {
                        continue;
                    }
                    let canon = ecurve::canonical_point(&work_ctx, &auts, &pxy);
                    let serial = serialize_point(&work_ctx, &canon);
                    if !seen.insert(serial.clone()) {
                        continue;
                    }
                    let v = graph.add_vertex(VertexRec {
                        id: String::new(),
                        j: Some(c.j_serial.clone()),
                        point: Some(serial.clone()),
                        level: Some(c.level),
                        component: None,
                    });
                    class_of_vertex.push(ci);
                    points.push(canon);
                    vertex_index.insert((ci, serial), v);
                    if graph.verts.len() > budget.max_vertices {
                        return Err(BuildRetry::Fail(BuildError::Sizing(format!(
                            "vertex count exceeds the budget {}",
                            budget.max_vertices
                        ))));
                    }
                }
            }
        }
        class_data.insert(ci, ClassData { curve: ew, auts, tors_l });
    }

    if graph.verts.is_empty() {
        return Err(BuildRetry::Fail(BuildError::Sizing("empty vertex set after filtering".into())));
    }

    // canonical vertex order: (class, point serial); relabel
    {
        let mut order: Vec<usize> = (0..graph.verts.len()).collect();
        order.sort_by(|&a, &b| {
            (class_of_vertex[a], &graph.verts[a].point)
                .cmp(&(class_of_vertex[b], &graph.verts[b].point))
        });
        let mut new_graph = MultiDiGraph::new();
        let mut new_class = Vec::new();
        let mut new_points = Vec::new();
        let mut new_index = BTreeMap::new();
        for (new_i, &old_i) in order.iter().enumerate() {
            let mut v = graph.verts[old_i].clone();
            v.id = format!("v{}", new_i);
            new_graph.add_vertex(v);
            new_class.push(class_of_vertex[old_i]);
            new_points.push(points[old_i].clone());
            let key = (class_of_vertex[old_i], graph.verts[old_i].point.clone().unwrap_or_default());
            new_index.insert(key, new_i);
        }
        graph = new_graph;
        class_of_vertex = new_class;
        points = new_points;
        vertex_index = new_index;
    }

    // edges: one per (vertex, kernel class) with a rational, in-scope codomain
    let mut steps: BTreeMap<(usize, String), (IsogenyStep, Option<(AutMap, usize)>)> = BTreeMap::new();
    for ci in class_data.keys().copied().collect::<Vec<_>>() {
        let data = &class_data[&ci];
        let kernels = crate::isogeny::enumerate_kernels(&work_ctx, &data.curve, params.l, &data.tors_l)
            .map_err(BuildError::from)?;
        for g in kernels {
            let serial = serialize_point(&work_ctx, &g);
            let step = velu_isogeny(&work_ctx, &data.curve, &g, params.l).map_err(BuildError::from)?;
            let j2 = j_invariant(&work_ctx, &step.codomain);
            let target = match j_table.get(&j2.c) {
                Some(&tc) if in_scope(&ph1.classes[tc]) => {
                    let std_model = curve_from_j(&work_ctx, &embed(&ph1.classes[tc].j_base));
                    let iso = if step.codomain == std_model {
                        AutMap { u2: work_ctx.one(), u3: work_ctx.one() }
                    } else {
                        iso_between(&work_ctx, &step.codomain, &std_model).map_err(ec_retry)?
                    };
                    Some((iso, tc))
                }
                _ => None,
            };
            steps.insert((ci, serial), (step, target));
        }
    }

    // group steps per class for the vertex sweep
    let mut steps_by_class: BTreeMap<usize, Vec<(String, &IsogenyStep, &AutMap, usize)>> = BTreeMap::new();
    for ((sci, kserial), (step, target)) in steps.iter() {
        if let Some((iso, tc)) = target {
            steps_by_class
                .entry(*sci)
                .or_default()
                .push((kserial.clone(), step, iso, *tc));
        }
    }
    let mut edges: Vec<(usize, usize, String)> = Vec::new();
    for v in 0..graph.verts.len() {
        let ci = class_of_vertex[v];
        let p = &points[v];
        let Some(outs) = steps_by_class.get(&ci) else { continue };
        for (kserial, step, iso, tc) in outs {
            let img = iso.apply(&work_ctx, &step.eval(&work_ctx, p));
            debug_assert!(ecurve::on_curve(&work_ctx, &class_data[tc].curve, &img));
            let canon = ecurve::canonical_point(&work_ctx, &class_data[tc].auts, &img);
            let serial = serialize_point(&work_ctx, &canon);
            let w = *vertex_index
                .get(&(*tc, serial))
                .ok_or_else(|| BuildError::Internal("edge target vertex missing".into()))?;
            edges.push((v, w, kserial.clone()));
        }
    }
    edges.sort();
    for (src, dst, kernel) in edges {
        graph.add_edge(src, dst, EdgeColor::None, kernel);
    }

    // components and their metadata
    let comp_of_vertex = graph.components();
    let n_comps = graph.assign_components();
    let mut comps = Vec::with_capacity(n_comps);
    for comp in 0..n_comps {
        let members = graph.component_vertices(&comp_of_vertex, comp);
        let jc = ph1.classes[class_of_vertex[members[0]]].j_component;
        let (t, d_pi, d_k, cond, depth, kron) = ph1.j_comp_info[jc];
        let has_special = members.iter().any(|&v| ph1.classes[class_of_vertex[v]].special);
        comps.push(ComponentInfo {
            id: comp,
            trace: t,
            d_pi,
            d_k,
            conductor: cond,
            depth,
            kron,
            has_special_j: has_special,
            suff_large: false,
        });
    }

    let meta = GraphMeta {
        p: params.p,
        l: params.l,
        n: params.n,
        m: params.m,
        base_degree: params.deg,
        working_degree: d,
    };
    let torsion_l = class_data.into_iter().map(|(ci, cd)| (ci, cd.tors_l)).collect();
    let mut vg = VolcanoGraph {
        params: params.clone(),
        meta,
        graph,
        base_ctx: ph1.base_ctx.clone(),
        work_ctx,
        work_degree: d,
        embed_root,
        classes: ph1.classes.clone(),
        class_of_vertex,
        points,
        comp_of_vertex,
        comps,
        steps,
        torsion_l,
        vertex_index,
    };
    compute_suff_large(&mut vg);
    Ok(vg)
}

/// The paper counts edges at a crater vertex as its out-edges plus its
/// horizontal in-edges; the "N or m sufficiently large" hypothesis holds when
/// those edges have no loops and pairwise distinct far endpoints.
pub fn crater_edge_count(vg: &VolcanoGraph, adj: &crate::graphcore::Adjacency, v: usize) -> (usize, Vec<usize>) {
    let mut endpoints = Vec::new();
    let mut count = 0;
    for &ei in &adj.out[v] {
        count += 1;
        endpoints.push(vg.graph.edges[ei].dst);
    }
    for &ei in &adj.inn[v] {
        let e = &vg.graph.edges[ei];
        if vg.level_of_vertex(e.src) == 0 && vg.level_of_vertex(e.dst) == 0 {
            count += 1;
            endpoints.push(e.src);
        }
    }
    (count, endpoints)
}

fn compute_suff_large(vg: &mut VolcanoGraph) {
    let n_comps = vg.comps.len();
    let adj = vg.graph.adjacency();
    let mut flags = vec![true; n_comps];
    for v in 0..vg.vertex_count() {
        if vg.level_of_vertex(v) != 0 {
            continue;
        }
        let comp = vg.comp_of_vertex[v];
        let (_, endpoints) = crater_edge_count(vg, &adj, v);
        let mut sorted = endpoints.clone();
        sorted.sort_unstable();
        let mut distinct = sorted.clone();
        distinct.dedup();
        if sorted.iter().any(|&w| w == v) || distinct.len() != sorted.len() {
            flags[comp] = false;
        }
    }
    for (c, f) in flags.into_iter().enumerate() {
        vg.comps[c].suff_large = f;
    }
}

/// The projection G_N^{m} -> G_{N'}^{m'} given by
/// (E, P) -> (E, (N/N') p^{m-m'} P). Both graphs must share the working field.
///
/// Projecting a vertex may land on a different Aut-orbit representative, and
/// the automorphism relating the two representatives permutes the kernels; the
/// edge map records, per high edge, the base edge it corresponds to after
/// that twist.
pub struct Projection {
    /// per high-graph vertex: the base-graph vertex index
    pub vertex_map: Vec<usize>,
    /// per high-graph edge: the base-graph edge index
    pub edge_map: Vec<usize>,
}

pub fn project(high: &VolcanoGraph, base: &VolcanoGraph) -> Result<Projection, BuildError> {
    if base.params.p != high.params.p
        || base.params.deg != high.params.deg
        || base.params.l != high.params.l
    {
        return Err(BuildError::InvalidParams("projection between unrelated graphs".into()));
    }
    if high.params.n % base.params.n != 0 || high.params.m < base.params.m {
        return Err(BuildError::InvalidParams(
            "projection needs N' | N and a smaller or equal p-power level".into(),
        ));
    }
    if high.work_ctx != base.work_ctx {
        return Err(BuildError::InvalidParams(
            "projection requires both graphs built over the same working field".into(),
        ));
    }
    let ctx = &high.work_ctx;
    let scalar = (high.params.n / base.params.n) * high.params.p.pow(high.params.m - base.params.m);
    let mut vertex_map = Vec::with_capacity(high.vertex_count());
    // per high vertex: the automorphism carrying the projected point onto the
    // canonical representative downstairs
    let mut twist: Vec<AutMap> = Vec::with_capacity(high.vertex_count());
    for v in 0..high.vertex_count() {
        let ci = high.class_of_vertex[v];
        // classes are indexed identically in both graphs: same base field,
        // same canonical enumeration of ordinary j's
        let curve = high.work_curve(ci);
        let img = ecurve::scalar_mul(ctx, &curve, scalar, &high.points[v]);
        let auts = aut_group(ctx, &curve).map_err(BuildError::from)?;
        let canon = ecurve::canonical_point(ctx, &auts, &img);
        let alpha = auts
            .iter()
            .find(|a| a.apply(ctx, &img) == canon)
            .expect("canonical point is in the orbit")
            .clone();
        let serial = serialize_point(ctx, &canon);
        let w = *base
            .vertex_index
            .get(&(ci, serial))
            .ok_or_else(|| BuildError::Internal("projected vertex missing in the base graph".into()))?;
        vertex_map.push(w);
        twist.push(alpha);
    }
    // base out-edge lookup by (src vertex, kernel serial)
    let mut base_out: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for (i, e) in base.graph.edges.iter().enumerate() {
        base_out.insert((e.src, e.kernel.as_str()), i);
    }
    let l = high.params.l;
    let mut edge_map = Vec::with_capacity(high.graph.edges.len());
    for e in &high.graph.edges {
        let ci = high.class_of_vertex[e.src];
        let curve = high.work_curve(ci);
        let gen = crate::ecurve::parse_point(ctx, &e.kernel)
            .map_err(|er| BuildError::Internal(format!("bad kernel serial: {}", er)))?;
        // twisted kernel: alpha(C), re-canonicalized inside its subgroup
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
        let bi = *base_out
            .get(&(vertex_map[e.src], serial.as_str()))
            .ok_or_else(|| BuildError::Internal("projected edge missing in the base graph".into()))?;
        edge_map.push(bi);
    }
    Ok(Projection { vertex_map, edge_map })
}

#[derive(Debug, Clone)]
pub struct CoveringReport {
    pub is_cover: bool,
    /// constant fiber size per reachable base component, when it is constant
    pub degree: Option<u64>,
    pub failures: Vec<String>,
}

/// Checks that the projection is a covering: edges commute with the vertex
/// map, incident edge stars biject, and the map is surjective onto every
/// reachable base component with constant fiber size.
pub fn verify_covering(high: &VolcanoGraph, base: &VolcanoGraph, proj: &Projection) -> CoveringReport {
    let mut failures = Vec::new();
    let high_adj = high.graph.adjacency();
    let base_adj = base.graph.adjacency();

    // edge-level commutation
    for (ei, e) in high.graph.edges.iter().enumerate() {
        let be = &base.graph.edges[proj.edge_map[ei]];
        if be.src != proj.vertex_map[e.src] || be.dst != proj.vertex_map[e.dst] {
            failures.push(format!("edge {} does not commute with the projection", ei));
        }
    }

    // local bijectivity of the out- and in-stars
    for v in 0..high.vertex_count() {
        let bv = proj.vertex_map[v];
        let outs: BTreeSet<usize> = high_adj.out[v].iter().map(|&ei| proj.edge_map[ei]).collect();
        if outs.len() != high_adj.out[v].len()
            || outs.len() != base_adj.out[bv].len()
            || outs.iter().any(|&bi| base.graph.edges[bi].src != bv)
        {
            failures.push(format!("out-star does not biject at vertex {}", v));
        }
        let inns: BTreeSet<usize> = high_adj.inn[v].iter().map(|&ei| proj.edge_map[ei]).collect();
        if inns.len() != high_adj.inn[v].len()
            || inns.len() != base_adj.inn[bv].len()
            || inns.iter().any(|&bi| base.graph.edges[bi].dst != bv)
        {
            failures.push(format!("in-star does not biject at vertex {}", v));
        }
    }

    // surjectivity on reachable components and constant fiber size
    let mut fiber: BTreeMap<usize, u64> = BTreeMap::new();
    for v in 0..high.vertex_count() {
        *fiber.entry(proj.vertex_map[v]).or_insert(0) += 1;
    }
    let reachable: BTreeSet<usize> = fiber.keys().map(|&bv| base.comp_of_vertex[bv]).collect();
    let mut degree: Option<u64> = None;
    let mut constant = true;
    for bv in 0..base.vertex_count() {
        if !reachable.contains(&base.comp_of_vertex[bv]) {
            continue;
        }
        match fiber.get(&bv) {
            None => {
                failures.push(format!("base vertex {} in a reachable component is not hit", bv));
                constant = false;
            }
            Some(&f) => match degree {
                None => degree = Some(f),
                Some(d) if d == f => {}
                Some(_) => constant = false,
            },
        }
    }
    if !constant {
        failures.push("fiber size is not constant".into());
    }
    CoveringReport { is_cover: failures.is_empty(), degree: if constant { degree } else { None }, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(p: u64, deg: u32, l: u64, n: u64, m: u32) -> VolcanoGraph {
        build_graph(&BuildParams::new(p, deg, l, n, m), &Budget::default()).unwrap()
    }

    #[test]
    fn working_degree_small_cases() {
        // E[2] for all ordinary curves over F5 needs degree lcm(1,2,3) = 6
        let r = working_degree(&BuildParams::new(5, 1, 2, 1, 0), &Budget::default()).unwrap();
        assert!(r.degree >= 1 && r.degree <= 6);
        // for y^2 = x^3 + x the 2-torsion is already rational over F5
        let e1728 = r.per_class.iter().find(|(j, _, _)| j == "5^1:3").unwrap();
        assert_eq!(e1728.1, 1);
        // m = 1 forces the cyclic 5-torsion: degree 4 for t = 2
        let r1 = working_degree(&BuildParams::new(5, 1, 2, 1, 1), &Budget::default()).unwrap();
        let e1728 = r1.per_class.iter().find(|(j, _, _)| j == "5^1:3").unwrap();
        assert_eq!(e1728.2, 4);
    }

    #[test]
    fn impossible_budget_rejected() {
        // l = 409 over F5: the 409-torsion degree blows past 200
        let err = working_degree(&BuildParams::new(5, 1, 409, 1, 0), &Budget::default());
        assert!(matches!(err, Err(BuildError::Sizing(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(
            build_graph(&BuildParams::new(5, 1, 5, 1, 0), &Budget::default()),
            Err(BuildError::InvalidParams(_))
        ));
        assert!(matches!(
            build_graph(&BuildParams::new(5, 1, 2, 10, 0), &Budget::default()),
            Err(BuildError::InvalidParams(_))
        ));
    }

    #[test]
    fn f5_l2_classical_volcano() {
        // G_1^0 over F5: ordinary j's are 1, 2, 3(=1728), 4; the j=1728 curve
        // carries the ramified loop and two descents to j=1
        let vg = build(5, 1, 2, 1, 0);
        assert_eq!(vg.vertex_count(), 4);
        // one vertex per ordinary j, all with the trivial point
        let adj = vg.graph.adjacency();
        let v1728 = (0..4)
            .find(|&v| vg.graph.verts[v].j.as_deref() == Some("5^1:3"))
            .unwrap();
        let v1 = (0..4)
            .find(|&v| vg.graph.verts[v].j.as_deref() == Some("5^1:1"))
            .unwrap();
        // out-edges of j=1728: loop + two edges to j=1
        let outs: Vec<usize> = adj.out[v1728].iter().map(|&e| vg.graph.edges[e].dst).collect();
        assert_eq!(outs.len(), 3);
        assert_eq!(outs.iter().filter(|&&w| w == v1728).count(), 1);
        assert_eq!(outs.iter().filter(|&&w| w == v1).count(), 2);
        // j=1 ascends once
        let outs1: Vec<usize> = adj.out[v1].iter().map(|&e| vg.graph.edges[e].dst).collect();
        assert_eq!(outs1, vec![v1728]);
        // levels: 1728 at 0, 1 at 1; j = 2 and 4 isolated at level 0
        assert_eq!(vg.level_of_vertex(v1728), 0);
        assert_eq!(vg.level_of_vertex(v1), 1);
        for v in 0..4 {
            let j = vg.graph.verts[v].j.as_deref().unwrap();
            if j == "5^1:2" || j == "5^1:4" {
                assert!(vg.is_isolated_curve(v));
                assert!(adj.out[v].is_empty() && adj.inn[v].is_empty());
            }
        }
        // component of the volcano: depth 1, d_pi = -16 = 2^2 * (-4)
        let comp = &vg.comps[vg.comp_of_vertex[v1728]];
        assert_eq!(comp.d_pi, -16);
        assert_eq!(comp.d_k, -4);
        assert_eq!(comp.conductor, 2);
        assert_eq!(comp.depth, 1);
        assert_eq!(comp.kron, 0);
    }

    #[test]
    fn f5_l2_m1_fibers_and_cover() {
        let base = build(5, 1, 2, 1, 0);
        let m1 = build(5, 1, 2, 1, 1);
        // j=1728 fiber folds to one vertex under mu_4; j=1 keeps two
        let count_j = |vg: &VolcanoGraph, j: &str| {
            (0..vg.vertex_count())
                .filter(|&v| vg.graph.verts[v].j.as_deref() == Some(j))
                .count()
        };
        assert_eq!(count_j(&m1, "5^1:3"), 1);
        assert_eq!(count_j(&m1, "5^1:1"), 2);
        assert_eq!(count_j(&m1, "5^1:2"), 2);
        assert_eq!(m1.vertex_count(), 7);
        // the non-isolated component is {1728-vertex, two 1-vertices}
        assert_eq!(m1.h_vertices().len(), 3);
        assert_eq!(m1.h_component_count(), 1);
        let _ = base;
    }

    #[test]
    fn identity_projection_covers_with_degree_one() {
        let g = build(5, 1, 2, 1, 1);
        let proj = project(&g, &g).unwrap();
        assert!(proj.vertex_map.iter().enumerate().all(|(i, &v)| i == v));
        let rep = verify_covering(&g, &g, &proj);
        assert!(rep.is_cover);
        assert_eq!(rep.degree, Some(1));
    }

    #[test]
    fn degree_p_cover_between_levels() {
        // build both levels at the common (larger) working degree
        let budget = Budget::default();
        let p2 = BuildParams::new(5, 1, 2, 1, 2);
        let high = build_graph(&p2, &budget).unwrap();
        let p1 = BuildParams::new(5, 1, 2, 1, 1);
        let low = build_graph_at_degree(&p1, &budget, high.work_degree).unwrap();
        let proj = project(&high, &low).unwrap();
        let rep = verify_covering(&high, &low, &proj);
        assert!(rep.is_cover, "failures: {:?}", rep.failures);
        assert_eq!(rep.degree, Some(5));
        // fibers over non-isolated vertices have exactly p elements
        let mut fib: BTreeMap<usize, u64> = BTreeMap::new();
        for v in 0..high.vertex_count() {
            if !high.is_isolated_curve(v) {
                *fib.entry(proj.vertex_map[v]).or_insert(0) += 1;
            }
        }
        assert!(fib.values().all(|&c| c == 5));
    }

    #[test]
    fn bad_map_is_not_a_cover() {
        let g = build(5, 1, 2, 1, 1);
        // send everything to vertex 0 of a multi-vertex base
        let proj = Projection {
            vertex_map: vec![0; g.vertex_count()],
            edge_map: (0..g.graph.edges.len()).collect(),
        };
        let rep = verify_covering(&g, &g, &proj);
        assert!(!rep.is_cover);
    }
}


