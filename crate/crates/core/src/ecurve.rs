//! Elliptic curves y^2 = x^3 + ax + b over F_{p^d}: group law, brute-force
//! point counts, torsion subgroup structure over extensions, automorphisms,
//! and canonical representatives of (E, P) pairs up to isomorphism.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand_core::RngCore;

use crate::qfield::{FieldCtx, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EcError {
    Singular,
    MismatchedCurves,
    /// The working field misses a root needed for an isomorphism or
    /// automorphism; retry with the degree multiplied by the hint.
    NeedLargerField(u32),
    SamplingBudget,
    BudgetExceeded(String),
    NotOnCurve,
}

impl fmt::Display for EcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcError::Singular => write!(f, "singular Weierstrass equation"),
            EcError::MismatchedCurves => write!(f, "points from mismatched curves"),
            EcError::NeedLargerField(k) => write!(f, "working field too small (enlarge degree by {})", k),
            EcError::SamplingBudget => write!(f, "torsion sampling budget exhausted"),
            EcError::BudgetExceeded(s) => write!(f, "budget exceeded: {}", s),
            EcError::NotOnCurve => write!(f, "point does not satisfy the curve equation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Curve {
    pub a: FieldElement,
    pub b: FieldElement,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Inf,
    Aff(FieldElement, FieldElement),
}

impl Point {
    pub fn is_inf(&self) -> bool {
        matches!(self, Point::Inf)
    }
}

/// Canonical identifier of an equivalence class of pairs (E, P): the curve by
/// its j-invariant over the base field, the point by the least serialized
/// image in the Aut(E)-orbit on the fixed standard model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub j: String,
    pub point: String,
}

pub fn discriminant(ctx: &FieldCtx, e: &Curve) -> FieldElement {
    let a3 = ctx.mul(&ctx.sqr(&e.a), &e.a);
    let b2 = ctx.sqr(&e.b);
    ctx.add(&ctx.scalar_mul(4, &a3), &ctx.scalar_mul(27, &b2))
}

pub fn j_invariant(ctx: &FieldCtx, e: &Curve) -> FieldElement {
    let a3 = ctx.mul(&ctx.sqr(&e.a), &e.a);
    let four_a3 = ctx.scalar_mul(4, &a3);
    let denom = discriminant(ctx, e);
    let num = ctx.scalar_mul(1728 % ctx.p(), &four_a3);
    ctx.div(&num, &denom).expect("nonsingular curve")
}

/// The fixed standard model per j: j=0 -> y^2 = x^3 + 1,
/// j=1728 -> y^2 = x^3 + x, otherwise a = 3j(1728-j), b = 2j(1728-j)^2.
pub fn curve_from_j(ctx: &FieldCtx, j: &FieldElement) -> Curve {
    let zero = ctx.zero();
    let one = ctx.one();
    if *j == zero {
        return Curve { a: zero, b: one };
    }
    if *j == ctx.from_u64(1728) {
        return Curve { a: one, b: zero };
    }
    let k = ctx.sub(&ctx.from_u64(1728), j);
    let a = ctx.scalar_mul(3, &ctx.mul(j, &k));
    let b = ctx.scalar_mul(2, &ctx.mul(j, &ctx.sqr(&k)));
    Curve { a, b }
}

pub fn on_curve(ctx: &FieldCtx, e: &Curve, pt: &Point) -> bool {
    match pt {
        Point::Inf => true,
        Point::Aff(x, y) => {
            let rhs = ctx.add(&ctx.add(&ctx.mul(&ctx.sqr(x), x), &ctx.mul(&e.a, x)), &e.b);
            ctx.sqr(y) == rhs
        }
    }
}

pub fn neg(ctx: &FieldCtx, pt: &Point) -> Point {
    match pt {
        Point::Inf => Point::Inf,
        Point::Aff(x, y) => Point::Aff(x.clone(), ctx.neg(y)),
    }
}

pub fn add(ctx: &FieldCtx, e: &Curve, p: &Point, q: &Point) -> Point {
    match (p, q) {
        (Point::Inf, _) => q.clone(),
        (_, Point::Inf) => p.clone(),
        (Point::Aff(x1, y1), Point::Aff(x2, y2)) => {
            if x1 == x2 {
                if *y1 == ctx.neg(y2) {
                    return Point::Inf;
                }
                // doubling
                let num = ctx.add(&ctx.scalar_mul(3, &ctx.sqr(x1)), &e.a);
                let den = ctx.scalar_mul(2, y1);
                let lam = ctx.div(&num, &den).expect("2y != 0 here");
                let x3 = ctx.sub(&ctx.sub(&ctx.sqr(&lam), x1), x2);
                let y3 = ctx.sub(&ctx.mul(&lam, &ctx.sub(x1, &x3)), y1);
                Point::Aff(x3, y3)
            } else {
                let lam = ctx
                    .div(&ctx.sub(y2, y1), &ctx.sub(x2, x1))
                    .expect("x2 != x1");
                let x3 = ctx.sub(&ctx.sub(&ctx.sqr(&lam), x1), x2);
                let y3 = ctx.sub(&ctx.mul(&lam, &ctx.sub(x1, &x3)), y1);
                Point::Aff(x3, y3)
            }
        }
    }
}

pub fn sub(ctx: &FieldCtx, e: &Curve, p: &Point, q: &Point) -> Point {
    add(ctx, e, p, &neg(ctx, q))
}

pub fn scalar_mul(ctx: &FieldCtx, e: &Curve, n: u64, p: &Point) -> Point {
    let mut acc = Point::Inf;
    let mut base = p.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = add(ctx, e, &acc, &base);
        }
        base = add(ctx, e, &base, &base);
        n >>= 1;
    }
    acc
}

pub fn scalar_mul_big(ctx: &FieldCtx, e: &Curve, n: &BigUint, p: &Point) -> Point {
    let mut acc = Point::Inf;
    let mut base = p.clone();
    for i in 0..n.bits() {
        if n.bit(i) {
            acc = add(ctx, e, &acc, &base);
        }
        base = add(ctx, e, &base, &base);
    }
    acc
}

/// Brute-force trace over the base field: t = q + 1 - #E(F_q), with the
/// enumeration budget q <= 10^6.
pub fn trace_of_frobenius(ctx: &FieldCtx, e: &Curve) -> Result<i64, EcError> {
    let q = ctx
        .order()
        .to_u64()
        .filter(|&q| q <= 1_000_000)
        .ok_or_else(|| EcError::BudgetExceeded(String::from("point-count enumeration needs q <= 10^6")))?;
    let mut count: i64 = 1; // infinity
    for x in ctx.iter_elements() {
        let rhs = ctx.add(&ctx.add(&ctx.mul(&ctx.sqr(&x), &x), &ctx.mul(&e.a, &x)), &e.b);
        if ctx.is_zero(&rhs) {
            count += 1;
        } else if ctx.is_square(&rhs) {
            count += 2;
        }
    }
    Ok(q as i64 + 1 - count)
}

pub fn is_ordinary(t: i64, p: u64) -> bool {
    t.rem_euclid(p as i64) != 0
}

/// #E(F_{q^e}) from the base trace via s_0 = 2, s_1 = t,
/// s_k = t*s_{k-1} - q*s_{k-2}; returns q^e + 1 - s_e. Requires e >= 1.
pub fn count_points_ext(t: i64, q: u64, e: usize) -> BigInt {
    assert!(e >= 1, "extension degree must be at least 1");
    let qb = BigInt::from(q);
    let tb = BigInt::from(t);
    let mut s0 = BigInt::from(2);
    let mut s1 = tb.clone();
    for _ in 1..e {
        let s2 = &tb * &s1 - &qb * &s0;
        s0 = s1;
        s1 = s2;
    }
    qb.pow(e as u32) + 1 - s1
}

/// Samples a uniformish point on E over ctx using the provided RNG.
pub fn random_point<R: RngCore>(ctx: &FieldCtx, e: &Curve, rng: &mut R) -> Point {
    loop {
        let x = random_element(ctx, rng);
        let rhs = ctx.add(&ctx.add(&ctx.mul(&ctx.sqr(&x), &x), &ctx.mul(&e.a, &x)), &e.b);
        if let Some(y) = ctx.sqrt(&rhs) {
            let y = if rng.next_u32() & 1 == 0 { y } else { ctx.neg(&y) };
            return Point::Aff(x, y);
        }
    }
}

fn random_element<R: RngCore>(ctx: &FieldCtx, rng: &mut R) -> FieldElement {
    let mut c = vec![0u64; ctx.degree()];
    for ci in c.iter_mut() {
        *ci = rng.next_u64() % ctx.p();
    }
    FieldElement { c }
}

/// Exact order of a point known to be killed by `bound` (with the factorization
/// of `bound` supplied).
pub fn exact_order(ctx: &FieldCtx, e: &Curve, p: &Point, bound: u64, bound_factors: &[(u64, u32)]) -> u64 {
    debug_assert!(scalar_mul(ctx, e, bound, p).is_inf());
    let mut ord = bound;
    for &(r, _) in bound_factors {
        while ord % r == 0 && scalar_mul(ctx, e, ord / r, p).is_inf() {
            ord /= r;
        }
    }
    ord
}

/// Structure of the n-torsion rational over the context field:
/// E[n](F) = Z/a x Z/b with b | a | n.
#[derive(Debug, Clone)]
pub struct TorsionBasis {
    pub n: u64,
    pub a_order: u64,
    pub b_order: u64,
    pub gen_a: Point,
    pub gen_b: Point,
}

impl TorsionBasis {
    /// Whether the full n-torsion (Z/n)^2 is rational here. For p-power n the
    /// physical torsion of an ordinary curve is cyclic, so this is only
    /// meaningful for n coprime to p.
    pub fn fully_rational(&self) -> bool {
        self.a_order == self.n && self.b_order == self.n
    }
}

/// Finds generators of E[n](F_{q^d}) by cofactor multiplication of random
/// points plus brute-force discrete logs in the small torsion groups.
/// `group_order` must be #E over the context field.
pub fn torsion_generators<R: RngCore>(
    ctx: &FieldCtx,
    e: &Curve,
    n: u64,
    group_order: &BigUint,
    rng: &mut R,
    sample_budget: u32,
) -> Result<TorsionBasis, EcError> {
    assert!(n >= 1 && n <= 10_000, "torsion bound n <= 10^4");
    if n == 1 {
        return Ok(TorsionBasis { n, a_order: 1, b_order: 1, gen_a: Point::Inf, gen_b: Point::Inf });
    }
    let n_factors = crate::arith::factor(n);
    let mut a_order = 1u64;
    let mut b_order = 1u64;
    let mut gen_a = Point::Inf;
    let mut gen_b = Point::Inf;
    for &(l, e_l) in &n_factors {
        let (alpha_gen, beta_gen, alpha, beta) = sylow_generators(ctx, e, l, group_order, rng, sample_budget)?;
        // restrict to the l^e_l torsion
        let ea = alpha.min(e_l);
        let eb = beta.min(e_l);
        let ga = scalar_mul(ctx, e, l.pow(alpha - ea), &alpha_gen);
        let gb = scalar_mul(ctx, e, l.pow(beta - eb), &beta_gen);
        gen_a = add(ctx, e, &gen_a, &ga);
        gen_b = add(ctx, e, &gen_b, &gb);
        a_order *= l.pow(ea);
        b_order *= l.pow(eb);
    }
    Ok(TorsionBasis { n, a_order, b_order, gen_a, gen_b })
}

/// Generators of the l-Sylow subgroup Z/l^alpha x Z/l^beta (alpha >= beta).
fn sylow_generators<R: RngCore>(
    ctx: &FieldCtx,
    e: &Curve,
    l: u64,
    group_order: &BigUint,
    rng: &mut R,
    sample_budget: u32,
) -> Result<(Point, Point, u32, u32), EcError> {
    // valuation of the group order at l
    let lb = BigUint::from(l);
    let mut v = 0u32;
    let mut cof = group_order.clone();
    while (&cof % &lb).is_zero() {
        cof /= &lb;
        v += 1;
    }
    if v == 0 {
        return Ok((Point::Inf, Point::Inf, 0, 0));
    }
    let order_in_sylow = |p: &Point| -> u32 {
        let mut k = 0;
        let mut q = p.clone();
        while !q.is_inf() {
            q = scalar_mul(ctx, e, l, &q);
            k += 1;
            assert!(k <= v, "point escapes the Sylow subgroup");
        }
        k
    };
    let mut g1 = Point::Inf;
    let mut alpha = 0u32;
    let mut budget = sample_budget;
    // phase 1: maximal-order element
    let mut stable = 0u32;
    while stable < 8 && budget > 0 {
        budget -= 1;
        let p = random_point(ctx, e, rng);
        let q = scalar_mul_big(ctx, e, &cof, &p);
        let k = order_in_sylow(&q);
        if k > alpha {
            alpha = k;
            g1 = q;
            stable = 0;
        } else {
            stable += 1;
        }
        if alpha == v {
            break;
        }
    }
    if alpha == 0 || g1.is_inf() {
        return Err(EcError::SamplingBudget);
    }
    let beta = v - alpha;
    if beta == 0 {
        return Ok((g1, Point::Inf, alpha, 0));
    }
    // phase 2: independent generator of order l^beta
    let g1_subgroup: BTreeSet<Point> = {
        let mut s = BTreeSet::new();
        let mut cur = Point::Inf;
        loop {
            if !s.insert(cur.clone()) {
                break;
            }
            cur = add(ctx, e, &cur, &g1);
        }
        s
    };
    while budget > 0 {
        budget -= 1;
        let p = random_point(ctx, e, rng);
        let q = scalar_mul_big(ctx, e, &cof, &p);
        // find least j with l^j q in <g1>
        let mut j = 0u32;
        let mut qj = q.clone();
        while !g1_subgroup.contains(&qj) {
            qj = scalar_mul(ctx, e, l, &qj);
            j += 1;
        }
        if j < beta {
            continue;
        }
        debug_assert!(j == beta, "independent part larger than beta");
        // l^beta q = m g1 with l^beta | m; subtract to isolate the new direction
        let m = brute_dlog(ctx, e, &qj, &g1, l.pow(alpha)).expect("qj in <g1>");
        debug_assert!(m % l.pow(beta) == 0);
        let corr = scalar_mul(ctx, e, m / l.pow(beta), &g1);
        let g2 = sub(ctx, e, &q, &corr);
        let check = scalar_mul(ctx, e, l.pow(beta - 1), &g2);
        if !g1_subgroup.contains(&check) {
            debug_assert_eq!(order_in_sylow(&g2), beta);
            return Ok((g1, g2, alpha, beta));
        }
    }
    Err(EcError::SamplingBudget)
}

/// Brute-force discrete log: find m with q = m * g, g of order `ord`.
pub fn brute_dlog(ctx: &FieldCtx, e: &Curve, q: &Point, g: &Point, ord: u64) -> Option<u64> {
    let mut cur = Point::Inf;
    for m in 0..ord {
        if cur == *q {
            return Some(m);
        }
        cur = add(ctx, e, &cur, g);
    }
    None
}

/// An automorphism (x, y) -> (u2 x, u3 y) of a curve in short Weierstrass form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutMap {
    pub u2: FieldElement,
    pub u3: FieldElement,
}

impl AutMap {
    pub fn apply(&self, ctx: &FieldCtx, p: &Point) -> Point {
        match p {
            Point::Inf => Point::Inf,
            Point::Aff(x, y) => Point::Aff(ctx.mul(&self.u2, x), ctx.mul(&self.u3, y)),
        }
    }
}

/// Aut(E): {±1} generically, the scalings by 4th roots of unity when j=1728,
/// by 6th roots when j=0. Errors when the working field misses the required
/// root of unity.
pub fn aut_group(ctx: &FieldCtx, e: &Curve) -> Result<Vec<AutMap>, EcError> {
    let one = ctx.one();
    let neg_one = ctx.neg(&one);
    let id = AutMap { u2: one.clone(), u3: one.clone() };
    let minus = AutMap { u2: one.clone(), u3: neg_one.clone() };
    if ctx.is_zero(&e.b) && !ctx.is_zero(&e.a) {
        // j = 1728: u^4 = 1
        let i = ctx.sqrt(&neg_one).ok_or(EcError::NeedLargerField(2))?;
        let neg_i = ctx.neg(&i);
        return Ok(vec![
            id,
            minus,
            AutMap { u2: neg_one.clone(), u3: neg_i },
            AutMap { u2: neg_one, u3: i },
        ]);
    }
    if ctx.is_zero(&e.a) && !ctx.is_zero(&e.b) {
        // j = 0: u^6 = 1; u^2 runs over cube roots of unity, u^3 over ±1
        let m3 = ctx.neg(&ctx.from_u64(3));
        let s = ctx.sqrt(&m3).ok_or(EcError::NeedLargerField(2))?;
        let half = ctx.inv(&ctx.from_u64(2)).expect("2 invertible");
        let zeta = ctx.mul(&ctx.add(&ctx.neg(&one), &s), &half);
        let zeta2 = ctx.sqr(&zeta);
        let mut out = Vec::with_capacity(6);
        for u2 in [one.clone(), zeta, zeta2] {
            for u3 in [one.clone(), neg_one.clone()] {
                out.push(AutMap { u2: u2.clone(), u3 });
            }
        }
        return Ok(out);
    }
    Ok(vec![id, minus])
}

/// Isomorphism (x, y) -> (u^2 x, u^3 y) from one model to another with the
/// same j-invariant, over the context field when it exists.
pub fn iso_between(ctx: &FieldCtx, from: &Curve, to: &Curve) -> Result<AutMap, EcError> {
    let fa0 = ctx.is_zero(&from.a);
    let fb0 = ctx.is_zero(&from.b);
    let u2 = if fb0 && !fa0 {
        // j = 1728: u^4 = a_to / a_from
        if !ctx.is_zero(&to.b) || ctx.is_zero(&to.a) {
            return Err(EcError::MismatchedCurves);
        }
        let c = ctx.div(&to.a, &from.a).expect("nonzero");
        ctx.sqrt(&c).ok_or(EcError::NeedLargerField(2))?
    } else if fa0 && !fb0 {
        // j = 0: u^6 = b_to / b_from
        if !ctx.is_zero(&to.a) || ctx.is_zero(&to.b) {
            return Err(EcError::MismatchedCurves);
        }
        let c = ctx.div(&to.b, &from.b).expect("nonzero");
        ctx.cube_root(&c).ok_or(EcError::NeedLargerField(3))?
    } else {
        if ctx.is_zero(&to.a) || ctx.is_zero(&to.b) {
            return Err(EcError::MismatchedCurves);
        }
        // u^2 = (b_to * a_from) / (b_from * a_to)
        let num = ctx.mul(&to.b, &from.a);
        let den = ctx.mul(&from.b, &to.a);
        let u2 = ctx.div(&num, &den).expect("nonzero");
        // consistency: u^4 a_from = a_to
        if ctx.mul(&ctx.sqr(&u2), &from.a) != to.a {
            return Err(EcError::MismatchedCurves);
        }
        u2
    };
    let u = ctx.sqrt(&u2).ok_or(EcError::NeedLargerField(2))?;
    let u3 = ctx.mul(&u, &u2);
    let map = AutMap { u2, u3 };
    // u^4 a_from = a_to and u^6 b_from = b_to
    debug_assert_eq!(ctx.mul(&ctx.sqr(&map.u2), &from.a), to.a);
    debug_assert_eq!(ctx.mul(&ctx.mul(&map.u2, &ctx.sqr(&map.u2)), &from.b), to.b);
    Ok(map)
}

/// Least serialized point in the Aut(E)-orbit of P; the canonical encoding of
/// the class of (E, P) once E is the standard model.
pub fn canonical_point(ctx: &FieldCtx, auts: &[AutMap], p: &Point) -> Point {
    let mut best = p.clone();
    for a in auts {
        let q = a.apply(ctx, p);
        if point_key(&q) < point_key(&best) {
            best = q;
        }
    }
    best
}

fn point_key(p: &Point) -> (u8, Vec<u64>, Vec<u64>) {
    match p {
        Point::Inf => (0, vec![], vec![]),
        Point::Aff(x, y) => (1, x.c.clone(), y.c.clone()),
    }
}

pub fn serialize_point(ctx: &FieldCtx, p: &Point) -> String {
    match p {
        Point::Inf => String::from("inf"),
        Point::Aff(x, y) => {
            let mut s = ctx.serialize(x);
            s.push(';');
            s.push_str(&ctx.serialize(y));
            s
        }
    }
}

pub fn parse_point(ctx: &FieldCtx, s: &str) -> Result<Point, crate::qfield::FieldError> {
    if s == "inf" {
        return Ok(Point::Inf);
    }
    let (xs, ys) = s
        .split_once(';')
        .ok_or_else(|| crate::qfield::FieldError::BadSerial(String::from(s)))?;
    Ok(Point::Aff(ctx.parse(xs)?, ctx.parse(ys)?))
}

/// Canonical vertex for a pair (E, P) with E an arbitrary model over the
/// working field: moves P onto the standard model for j(E), then takes the
/// least point in the Aut-orbit. `j_base_serial` names the curve over the
/// base field.
pub fn canonical_pair(
    ctx: &FieldCtx,
    e: &Curve,
    p: &Point,
    j_base_serial: &str,
) -> Result<Vertex, EcError> {
    let j = j_invariant(ctx, e);
    let std_model = curve_from_j(ctx, &j);
    let iso = if *e == std_model {
        AutMap { u2: ctx.one(), u3: ctx.one() }
    } else {
        iso_between(ctx, e, &std_model)?
    };
    let moved = iso.apply(ctx, p);
    let auts = aut_group(ctx, &std_model)?;
    let canon = canonical_point(ctx, &auts, &moved);
    Ok(Vertex {
        j: String::from(j_base_serial),
        point: serialize_point(ctx, &canon),
    })
}

/// Whether (E, P) and (E2, P2) are equivalent: a working-field isomorphism
/// E -> E2 carrying P to P2 (Aut-orbits included).
pub fn are_equivalent(
    ctx: &FieldCtx,
    e1: &Curve,
    p1: &Point,
    e2: &Curve,
    p2: &Point,
) -> Result<bool, EcError> {
    if j_invariant(ctx, e1) != j_invariant(ctx, e2) {
        return Ok(false);
    }
    let v1 = canonical_pair(ctx, e1, p1, "")?;
    let v2 = canonical_pair(ctx, e2, p2, "")?;
    Ok(v1.point == v2.point)
}
