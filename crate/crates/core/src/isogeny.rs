//! Degree-l isogenies for prime l != p: kernel enumeration, Velu's formulas
//! with point evaluation, dual verification, and the Frobenius eigenvalue on
//! a kernel (the datum behind the blue/green edge coloring).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ecurve::{
    add, aut_group, brute_dlog, exact_order, on_curve, scalar_mul, Curve, EcError, Point,
    TorsionBasis,
};
use crate::qfield::FieldCtx;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsogenyError {
    KernelNotRational,
    WrongKernelOrder,
    Ec(EcError),
}

impl fmt::Display for IsogenyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsogenyError::KernelNotRational => write!(f, "E[l] is not rational over the working field"),
            IsogenyError::WrongKernelOrder => write!(f, "kernel generator has the wrong order"),
            IsogenyError::Ec(e) => write!(f, "{}", e),
        }
    }
}

impl From<EcError> for IsogenyError {
    fn from(e: EcError) -> Self {
        IsogenyError::Ec(e)
    }
}

/// One degree-l isogeny up to equivalence: the kernel subgroup with its
/// canonical generator, the Velu codomain, and enough data to push points
/// through the map.
#[derive(Debug, Clone)]
pub struct IsogenyStep {
    pub domain: Curve,
    pub l: u64,
    pub kernel_gen: Point,
    /// the l - 1 nonzero kernel points, in generator-multiple order
    pub kernel_points: Vec<Point>,
    pub codomain: Curve,
}

/// All l + 1 order-l subgroups of E[l], each by its canonical generator
/// (least nonzero point of the subgroup). Requires E[l] fully rational.
pub fn enumerate_kernels(
    ctx: &FieldCtx,
    e: &Curve,
    l: u64,
    torsion: &TorsionBasis,
) -> Result<Vec<Point>, IsogenyError> {
    if torsion.n % l != 0 || torsion.a_order % l != 0 || torsion.b_order % l != 0 {
        return Err(IsogenyError::KernelNotRational);
    }
    let k1 = scalar_mul(ctx, e, torsion.a_order / l, &torsion.gen_a);
    let k2 = scalar_mul(ctx, e, torsion.b_order / l, &torsion.gen_b);
    debug_assert!(!k1.is_inf() && !k2.is_inf());
    let mut gens = Vec::with_capacity(l as usize + 1);
    gens.push(canonical_generator(ctx, e, &k1, l));
    for c in 0..l {
        let g = add(ctx, e, &k2, &scalar_mul(ctx, e, c, &k1));
        gens.push(canonical_generator(ctx, e, &g, l));
    }
    gens.sort();
    gens.dedup();
    if gens.len() != l as usize + 1 {
        return Err(IsogenyError::KernelNotRational);
    }
    Ok(gens)
}

/// Least nonzero point of the subgroup generated by g (order l).
fn canonical_generator(ctx: &FieldCtx, e: &Curve, g: &Point, l: u64) -> Point {
    let mut best = g.clone();
    let mut cur = g.clone();
    for _ in 1..l {
        cur = add(ctx, e, &cur, g);
        if cur.is_inf() {
            break;
        }
        if cur < best {
            best = cur.clone();
        }
    }
    best
}

/// Velu's formulas for the quotient by the cyclic group generated by
/// `kernel_gen` of exact prime order l != p.
pub fn velu_isogeny(
    ctx: &FieldCtx,
    e: &Curve,
    kernel_gen: &Point,
    l: u64,
) -> Result<IsogenyStep, IsogenyError> {
    if kernel_gen.is_inf()
        || !on_curve(ctx, e, kernel_gen)
        || !scalar_mul(ctx, e, l, kernel_gen).is_inf()
    {
        return Err(IsogenyError::WrongKernelOrder);
    }
    // collect the nonzero kernel points
    let mut pts = Vec::with_capacity(l as usize - 1);
    let mut cur = kernel_gen.clone();
    while !cur.is_inf() {
        pts.push(cur.clone());
        cur = add(ctx, e, &cur, kernel_gen);
    }
    if pts.len() as u64 != l - 1 {
        return Err(IsogenyError::WrongKernelOrder);
    }
    // codomain coefficients from the standard half-kernel sums:
    // for Q in S: v_Q = 2(3x^2 + a) (or 3x^2 + a when 2Q = O), u_Q = 4y^2
    let mut v = ctx.zero();
    let mut w = ctx.zero();
    let half = (l as usize - 1) / 2;
    let iter: Vec<&Point> = if l == 2 {
        pts.iter().collect()
    } else {
        pts.iter().take(half).collect()
    };
    for q in iter {
        let (x, y) = match q {
            Point::Aff(x, y) => (x, y),
            Point::Inf => unreachable!(),
        };
        let gx = ctx.add(&ctx.scalar_mul(3, &ctx.sqr(x)), &e.a);
        let two_torsion = ctx.is_zero(y);
        let vq = if two_torsion { gx.clone() } else { ctx.scalar_mul(2, &gx) };
        let uq = ctx.scalar_mul(4, &ctx.sqr(y));
        v = ctx.add(&v, &vq);
        w = ctx.add(&w, &ctx.add(&uq, &ctx.mul(x, &vq)));
    }
    let a2 = ctx.sub(&e.a, &ctx.scalar_mul(5, &v));
    let b2 = ctx.sub(&e.b, &ctx.scalar_mul(7, &w));
    Ok(IsogenyStep {
        domain: e.clone(),
        l,
        kernel_gen: kernel_gen.clone(),
        kernel_points: pts,
        codomain: Curve { a: a2, b: b2 },
    })
}

impl IsogenyStep {
    /// Image of a point under the isogeny, by the translation form
    /// phi(P) = (x_P + sum(x_{P+Q} - x_Q), y_P + sum(y_{P+Q} - y_Q)).
    /// Kernel points map to infinity.
    pub fn eval(&self, ctx: &FieldCtx, p: &Point) -> Point {
        if p.is_inf() {
            return Point::Inf;
        }
        if self.kernel_points.contains(p) {
            return Point::Inf;
        }
        let (xp, yp) = match p {
            Point::Aff(x, y) => (x.clone(), y.clone()),
            Point::Inf => unreachable!(),
        };
        let mut xs = xp;
        let mut ys = yp;
        for q in &self.kernel_points {
            let s = add(ctx, &self.domain, p, q);
            let (xq, yq) = match q {
                Point::Aff(x, y) => (x, y),
                Point::Inf => unreachable!(),
            };
            let (xsq, ysq) = match s {
                Point::Aff(x, y) => (x, y),
                Point::Inf => unreachable!("P + Q = O only for P in the kernel"),
            };
            xs = ctx.add(&xs, &ctx.sub(&xsq, xq));
            ys = ctx.add(&ys, &ctx.sub(&ysq, yq));
        }
        // no on-curve assertion here: verify_dual feeds deliberately corrupted
        // steps through this path and must see a clean false, not a panic
        Point::Aff(xs, ys)
    }

    /// Kernel of the dual isogeny: the image of E[l] under this step,
    /// as a canonical generator on the codomain.
    pub fn dual_kernel_gen(&self, ctx: &FieldCtx, torsion: &TorsionBasis) -> Point {
        let k1 = scalar_mul(ctx, &self.domain, torsion.a_order / self.l, &torsion.gen_a);
        let k2 = scalar_mul(ctx, &self.domain, torsion.b_order / self.l, &torsion.gen_b);
        for g in [&k1, &k2, &add(ctx, &self.domain, &k1, &k2)] {
            let img = self.eval(ctx, g);
            if !img.is_inf() {
                return canonical_generator(ctx, &self.codomain, &img, self.l);
            }
        }
        unreachable!("E[l] cannot map entirely to zero under a degree-l isogeny")
    }
}

/// Checks that the dual isogeny exists and composes with the step to
/// multiplication by l up to an automorphism of the domain, testing on a
/// spanning set of torsion points.
pub fn verify_dual(
    ctx: &FieldCtx,
    step: &IsogenyStep,
    torsion_l: &TorsionBasis,
    test_points: &[Point],
) -> Result<bool, IsogenyError> {
    let dk = step.dual_kernel_gen(ctx, torsion_l);
    if !on_curve(ctx, &step.codomain, &dk) {
        return Ok(false);
    }
    let dual = match velu_isogeny(ctx, &step.codomain, &dk, step.l) {
        Ok(d) => d,
        Err(IsogenyError::WrongKernelOrder) => return Ok(false),
        Err(e) => return Err(e),
    };
    // the composite lands on a curve isomorphic to the domain
    let iso = match crate::ecurve::iso_between(ctx, &dual.codomain, &step.domain) {
        Ok(m) => m,
        Err(EcError::MismatchedCurves) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    let auts = aut_group(ctx, &step.domain)?;
    'auts: for alpha in &auts {
        for t in test_points {
            let lhs = iso.apply(ctx, &dual.eval(ctx, &step.eval(ctx, t)));
            let rhs = alpha.apply(ctx, &scalar_mul(ctx, &step.domain, step.l, t));
            if lhs != rhs {
                continue 'auts;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrobeniusAction {
    Eigenvalue(u64),
    NotStable,
}

/// Action of the q-power Frobenius on the kernel generated by `gen` (order l):
/// pi(G) = lambda G when the kernel is pi-stable. `q_power` is the absolute
/// degree of the base field, so pi is x -> x^(p^q_power).
pub fn frobenius_eigenvalue(
    ctx: &FieldCtx,
    e: &Curve,
    gen: &Point,
    l: u64,
    q_power: usize,
) -> FrobeniusAction {
    let img = match gen {
        Point::Aff(x, y) => Point::Aff(
            ctx.frobenius_power(x, q_power),
            ctx.frobenius_power(y, q_power),
        ),
        Point::Inf => return FrobeniusAction::NotStable,
    };
    match brute_dlog(ctx, e, &img, gen, l) {
        Some(m) => FrobeniusAction::Eigenvalue(m),
        None => FrobeniusAction::NotStable,
    }
}

/// Serial of a kernel subgroup for edge tags.
pub fn kernel_serial(ctx: &FieldCtx, gen: &Point) -> String {
    crate::ecurve::serialize_point(ctx, gen)
}

/// Exact order helper for callers working with kernel points.
pub fn point_order(ctx: &FieldCtx, e: &Curve, p: &Point, bound: u64) -> u64 {
    exact_order(ctx, e, p, bound, &crate::arith::factor(bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecurve::{curve_from_j, j_invariant, random_point, torsion_generators};
    use crate::qfield::make_field;
    use alloc::vec;
    use alloc::vec::Vec;
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use rand_chacha::ChaCha12Rng;
    use rand_core::SeedableRng;

    #[test]
    fn three_two_kernels_over_f5() {
        let ctx = make_field(5, 1).unwrap();
        let e = Curve { a: ctx.one(), b: ctx.zero() };
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let tors = torsion_generators(&ctx, &e, 2, &BigUint::from(4u32), &mut rng, 200).unwrap();
        let kernels = enumerate_kernels(&ctx, &e, 2, &tors).unwrap();
        let expect: Vec<Point> = [0u64, 2, 3]
            .iter()
            .map(|&x| Point::Aff(ctx.from_u64(x), ctx.zero()))
            .collect();
        assert_eq!(kernels.len(), 3);
        for k in &expect {
            assert!(kernels.contains(k));
        }
    }

    #[test]
    fn velu_loop_at_j_1728() {
        // kernel <(0,0)>: v = 3*0+1 = 1, w = 0, a' = 1-5 = -4 = 1, b' = 0
        let ctx = make_field(5, 1).unwrap();
        let e = Curve { a: ctx.one(), b: ctx.zero() };
        let k = Point::Aff(ctx.zero(), ctx.zero());
        let step = velu_isogeny(&ctx, &e, &k, 2).unwrap();
        assert_eq!(step.codomain, e);
    }

    #[test]
    fn velu_descent_to_j_1() {
        // kernel <(2,0)>: codomain y^2 = x^3 + x + 3 with j = 1
        let ctx = make_field(5, 1).unwrap();
        let e = Curve { a: ctx.one(), b: ctx.zero() };
        let k = Point::Aff(ctx.from_u64(2), ctx.zero());
        let step = velu_isogeny(&ctx, &e, &k, 2).unwrap();
        assert_eq!(step.codomain, Curve { a: ctx.one(), b: ctx.from_u64(3) });
        assert_eq!(j_invariant(&ctx, &step.codomain), ctx.one());
    }

    #[test]
    fn four_kernels_for_l_3() {
        // find an ordinary curve over F13 whose 3-torsion is rational over a
        // small extension, then check the kernel count and pairwise triviality
        let base = make_field(13, 1).unwrap();
        let mut found = false;
        for jv in 1..13u64 {
            let e = curve_from_j(&base, &base.from_u64(jv));
            let t = crate::ecurve::trace_of_frobenius(&base, &e).unwrap();
            if !crate::ecurve::is_ordinary(t, 13) {
                continue;
            }
            // degree where E[3] is rational: order of the Frobenius matrix mod 3
            let mut deg = 0usize;
            {
                let (mut a, mut b, mut c, mut d) = (1i64, 0, 0, 1);
                for k in 1..=24 {
                    // multiply by companion [[0, -q], [1, t]]
                    let (na, nb) = (b, (-13 * a + t * b).rem_euclid(3));
                    let (nc, nd) = (d, (-13 * c + t * d).rem_euclid(3));
                    a = na.rem_euclid(3);
                    b = nb;
                    c = nc.rem_euclid(3);
                    d = nd;
                    if a == 1 && b == 0 && c == 0 && d == 1 {
                        deg = k;
                        break;
                    }
                }
            }
            if deg == 0 || deg > 4 {
                continue;
            }
            let ctx = make_field(13, deg).unwrap();
            let ew = curve_from_j(&ctx, &ctx.from_u64(jv));
            let order = crate::ecurve::count_points_ext(t, 13, deg).to_biguint().unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(29);
            let tors = torsion_generators(&ctx, &ew, 3, &order, &mut rng, 400).unwrap();
            if !tors.fully_rational() {
                continue;
            }
            let kernels = enumerate_kernels(&ctx, &ew, 3, &tors).unwrap();
            assert_eq!(kernels.len(), 4);
            // subgroups of size 3 intersect trivially pairwise
            for (i, g) in kernels.iter().enumerate() {
                let gi2 = add(&ctx, &ew, g, g);
                for h in kernels.iter().skip(i + 1) {
                    assert!(h != g && *h != gi2);
                }
            }
            found = true;
            break;
        }
        assert!(found, "no ordinary curve over F13 with accessible 3-torsion");
    }

    #[test]
    fn evaluator_preserves_coprime_order() {
        // the image under a 2-isogeny of a point of odd order keeps its order
        let ctx4 = make_field(5, 4).unwrap();
        let e4 = Curve { a: ctx4.one(), b: ctx4.zero() };
        let n4 = crate::ecurve::count_points_ext(2, 5, 4).to_biguint().unwrap();
        let mut odd = n4.clone();
        while (&odd % 2u32) == BigUint::from(0u32) {
            odd >>= 1;
        }
        let two_part = &n4 / &odd;
        let k4 = Point::Aff(ctx4.zero(), ctx4.zero());
        let step4 = velu_isogeny(&ctx4, &e4, &k4, 2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut tested = 0;
        while tested < 3 {
            let p = random_point(&ctx4, &e4, &mut rng);
            let podd = crate::ecurve::scalar_mul_big(&ctx4, &e4, &two_part, &p);
            if podd.is_inf() {
                continue;
            }
            let bound = odd.to_u64().unwrap();
            let ord = point_order(&ctx4, &e4, &podd, bound);
            let img = step4.eval(&ctx4, &podd);
            let ord_img = point_order(&ctx4, &step4.codomain, &img, ord);
            assert_eq!(ord, ord_img);
            tested += 1;
        }
    }

    #[test]
    fn dual_verifies_and_corruption_fails() {
        let ctx = make_field(5, 2).unwrap();
        let e = Curve { a: ctx.one(), b: ctx.zero() };
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let order = BigUint::from(32u32);
        let tors2 = torsion_generators(&ctx, &e, 2, &order, &mut rng, 300).unwrap();
        let tors4 = torsion_generators(&ctx, &e, 4, &order, &mut rng, 300).unwrap();
        let test_points = vec![tors4.gen_a.clone(), tors4.gen_b.clone()];
        for g in enumerate_kernels(&ctx, &e, 2, &tors2).unwrap() {
            let step = velu_isogeny(&ctx, &e, &g, 2).unwrap();
            assert!(verify_dual(&ctx, &step, &tors2, &test_points).unwrap());
            // negative control: corrupt the codomain
            let mut bad = step.clone();
            bad.codomain = Curve { a: ctx.from_u64(2), b: ctx.from_u64(1) };
            assert!(!verify_dual(&ctx, &bad, &tors2, &test_points).unwrap_or(false));
        }
    }

    #[test]
    fn frobenius_eigenvalue_on_rational_kernel() {
        // (0,0) on y^2 = x^3 + x over F5 is F5-rational: lambda = 1
        let ctx = make_field(5, 2).unwrap();
        let e = Curve { a: ctx.one(), b: ctx.zero() };
        let k = Point::Aff(ctx.zero(), ctx.zero());
        assert_eq!(
            frobenius_eigenvalue(&ctx, &e, &k, 2, 1),
            FrobeniusAction::Eigenvalue(1)
        );
    }

    #[test]
    fn frobenius_eigenvalues_match_characteristic_polynomial() {
        // t=2 over F5, l=13: eigenvalues of X^2 - 2X + 5 mod 13 are {4, 11}
        let roots: Vec<u64> = (0..13u64)
            .filter(|&x| (x * x + 13 * 13 - 2 * x + 5) % 13 == 0)
            .collect();
        assert_eq!(roots, vec![4, 11]);
        // l=3: X^2 + X + 2 mod 3 has no roots (discriminant is a non-residue)
        let r3: Vec<u64> = (0..3u64)
            .filter(|&x| (x * x + 3 * 3 - 2 * x + 5) % 3 == 0)
            .collect();
        assert!(r3.is_empty());
    }
}
