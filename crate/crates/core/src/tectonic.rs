//! Abstract tectonic craters: the lattice-quotient generator, the recognizer
//! for the defining properties, the CM-order oracle predicting crater
//! profiles from ideal data, and the bounded inverse search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{factor, gcd, inv_mod, is_prime, kronecker, mul_mod, pow_mod};
use crate::graphcore::{EdgeColor, MultiDiGraph, VertexRec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TectonicParams {
    pub omega: u64,
    pub s: u64,
    pub t: u64,
    pub c: u64,
}

#[derive(Debug, Clone)]
pub enum TectonicError {
    BadParams(String),
    BadInput(String),
}

impl fmt::Display for TectonicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TectonicError::BadParams(s) => write!(f, "invalid tectonic parameters: {}", s),
            TectonicError::BadInput(s) => write!(f, "invalid oracle input: {}", s),
        }
    }
}

impl TectonicParams {
    pub fn new(omega: u64, s: u64, t: u64, c: u64) -> Result<Self, TectonicError> {
        if omega == 0 || s == 0 || t == 0 || c == 0 {
            return Err(TectonicError::BadParams("parameters must be positive".into()));
        }
        if gcd(c, omega) != 1 {
            return Err(TectonicError::BadParams(format!("gcd(c, omega) = {} != 1", gcd(c, omega))));
        }
        if omega * s * t > 1_000_000 {
            return Err(TectonicError::BadParams("omega * s * t beyond the desk budget".into()));
        }
        Ok(TectonicParams { omega, s, t, c: canonical_c(c, omega) })
    }
}

fn canonical_c(c: u64, omega: u64) -> u64 {
    if omega == 1 {
        1
    } else {
        c % omega
    }
}

/// The reference construction: vertices Z^2 / <(s, -c t), (0, t omega)>,
/// blue edges (x, y) -> (x+1, y), green edges (x, y) -> (x, y+1).
pub fn generate(params: &TectonicParams) -> MultiDiGraph {
    let (omega, s, t, c) = (params.omega, params.s, params.t, params.c);
    let height = t * omega;
    // canonical coset representatives: 0 <= x < s, 0 <= y < t*omega
    let normalize = |x: u64, y: u64| -> (u64, u64) {
        if x >= s {
            // subtract (s, -c t): y gains c t
            ((x - s) % s, (y + c * t) % height)
        } else {
            (x, y % height)
        }
    };
    let index = |x: u64, y: u64| -> usize { (x * height + y) as usize };
    let mut g = MultiDiGraph::new();
    for x in 0..s {
        for y in 0..height {
            g.add_vertex(VertexRec::bare(format!("{},{}", x, y)));
        }
    }
    debug_assert_eq!(g.verts.len() as u64, omega * s * t);
    for x in 0..s {
        for y in 0..height {
            let src = index(x, y);
            let (bx, by) = normalize(x + 1, y);
            g.add_edge(src, index(bx, by), EdgeColor::Blue, String::new());
            let (gx, gy) = normalize(x, y + 1);
            g.add_edge(src, index(gx, gy), EdgeColor::Green, String::new());
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecognizeOutcome {
    Tectonic(TectonicParams),
    NotTectonic(String),
}

/// Checks the defining properties literally and, on success, returns the
/// lexicographically least parameter tuple over all anchor choices.
pub fn recognize(g: &MultiDiGraph) -> RecognizeOutcome {
    let n = g.verts.len();
    if n == 0 {
        return RecognizeOutcome::NotTectonic("empty graph".into());
    }
    // properties b/c: every edge colored, per-color out/in degree exactly 1
    let mut blue_next = vec![usize::MAX; n];
    let mut green_next = vec![usize::MAX; n];
    let mut blue_in = vec![0usize; n];
    let mut green_in = vec![0usize; n];
    for e in &g.edges {
        match e.color {
            EdgeColor::Blue => {
                if blue_next[e.src] != usize::MAX {
                    return RecognizeOutcome::NotTectonic("blue out-degree above one".into());
                }
                blue_next[e.src] = e.dst;
                blue_in[e.dst] += 1;
            }
            EdgeColor::Green => {
                if green_next[e.src] != usize::MAX {
                    return RecognizeOutcome::NotTectonic("green out-degree above one".into());
                }
                green_next[e.src] = e.dst;
                green_in[e.dst] += 1;
            }
            EdgeColor::None => return RecognizeOutcome::NotTectonic("uncolored edge".into()),
        }
    }
    for v in 0..n {
        if blue_next[v] == usize::MAX || green_next[v] == usize::MAX {
            return RecognizeOutcome::NotTectonic("missing blue or green out-edge".into());
        }
        if blue_in[v] != 1 || green_in[v] != 1 {
            return RecognizeOutcome::NotTectonic("per-color in-degree is not one".into());
        }
    }
    // property d: all blue cycles share one length, all green cycles too
    let cycle_lengths = |next: &[usize]| -> Option<u64> {
        let mut seen = vec![false; n];
        let mut len: Option<u64> = None;
        for s0 in 0..n {
            if seen[s0] {
                continue;
            }
            let mut cur = s0;
            let mut k = 0u64;
            loop {
                seen[cur] = true;
                cur = next[cur];
                k += 1;
                if cur == s0 {
                    break;
                }
                if k > n as u64 {
                    return None;
                }
            }
            match len {
                None => len = Some(k),
                Some(l) if l == k => {}
                Some(_) => return None,
            }
        }
        len
    };
    let Some(h1) = cycle_lengths(&blue_next) else {
        return RecognizeOutcome::NotTectonic("blue cycles have mixed lengths".into());
    };
    let Some(h2) = cycle_lengths(&green_next) else {
        return RecognizeOutcome::NotTectonic("green cycles have mixed lengths".into());
    };

    // per anchor: extract (omega, s, t, c) and verify properties a and e
    let mut best: Option<TectonicParams> = None;
    for anchor in 0..n {
        let Some(params) = extract_at_anchor(&blue_next, &green_next, h1, h2, anchor) else {
            continue;
        };
        if verify_properties(n, &blue_next, &green_next, h1, h2, &params) {
            best = match best {
                None => Some(params),
                Some(b) if params < b => Some(params),
                keep => keep,
            };
        }
    }
    match best {
        Some(p) => RecognizeOutcome::Tectonic(p),
        None => RecognizeOutcome::NotTectonic("no anchor admits a consistent parameter tuple".into()),
    }
}

fn extract_at_anchor(
    blue_next: &[usize],
    green_next: &[usize],
    h1: u64,
    h2: u64,
    anchor: usize,
) -> Option<TectonicParams> {
    // green cycle through the anchor
    let mut green_cycle = Vec::with_capacity(h2 as usize);
    let mut cur = anchor;
    for _ in 0..h2 {
        green_cycle.push(cur);
        cur = green_next[cur];
    }
    if cur != anchor {
        return None;
    }
    let green_pos: BTreeMap<usize, u64> =
        green_cycle.iter().enumerate().map(|(i, &v)| (v, i as u64)).collect();
    // s: first blue-walk index meeting the green cycle
    let mut cur = anchor;
    let mut s = 0u64;
    for i in 1..=h1 {
        cur = blue_next[cur];
        if green_pos.contains_key(&cur) {
            s = i;
            break;
        }
    }
    if s == 0 || h1 % s != 0 {
        return None;
    }
    let omega = h1 / s;
    if h2 % omega != 0 {
        return None;
    }
    let t = h2 / omega;
    let gamma = green_pos[&cur];
    if gamma % t != 0 {
        return None;
    }
    let c = canonical_c((gamma / t) % omega, omega);
    if gcd(c, omega) != 1 {
        return None;
    }
    Some(TectonicParams { omega, s, t, c })
}

fn verify_properties(
    n: usize,
    blue_next: &[usize],
    green_next: &[usize],
    h1: u64,
    h2: u64,
    params: &TectonicParams,
) -> bool {
    let (omega, s, t, c) = (params.omega, params.s, params.t, params.c);
    // property a
    if n as u64 != omega * s * t {
        return false;
    }
    // property d ties cycle lengths to the parameters
    if h1 != omega * s || h2 != omega * t {
        return false;
    }
    // property e: blue^s = green^{c t} as permutations
    let step = |next: &[usize], mut v: usize, k: u64| -> usize {
        for _ in 0..k {
            v = next[v];
        }
        v
    };
    (0..n).all(|v| step(blue_next, v, s) == step(green_next, v, (c * t) % h2.max(1)))
}

// -------------------- the CM-order oracle --------------------

/// Ideal data for the principal split case: p and the split factors of N come
/// with lifted square roots of d_K, and x generates one prime above l.
#[derive(Debug, Clone)]
pub struct CMOracleInput {
    pub d_k: i64,
    pub p: u64,
    pub m: u32,
    /// root of X^2 = d_K mod p^m; None picks the Hensel lift of the least
    /// positive root mod p
    pub r_p: Option<u64>,
    /// (prime r, exponent e, root of d_K mod r^e) for each factor of N
    pub n_factors: Vec<(u64, u32, u64)>,
    /// x = a + b omega_K generating one prime ideal above l
    pub x: (i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmProfile {
    pub h1: u64,
    pub h2: u64,
    pub s: u64,
    pub t: u64,
    pub c: u64,
    pub omega: u64,
}

/// Norm of a + b omega_K in the maximal order of Q(sqrt(d_K)).
pub fn norm_in_order(d_k: i64, a: i64, b: i64) -> i64 {
    if d_k.rem_euclid(4) == 0 {
        // omega = sqrt(d_K)/2, omega^2 = d_K/4
        a * a - b * b * (d_k / 4)
    } else {
        // omega = (1 + sqrt(d_K))/2, omega^2 = omega + (d_K - 1)/4
        a * a + a * b + b * b * ((1 - d_k) / 4)
    }
}

/// Least positive square root of d mod an odd prime r, by brute force.
fn sqrt_mod_prime(d: i64, r: u64) -> Option<u64> {
    let dm = d.rem_euclid(r as i64) as u64;
    (0..r).find(|&x| mul_mod(x, x, r) == dm)
}

/// Hensel lift: root of X^2 = d mod r^e from the least root mod r.
pub fn hensel_sqrt(d: i64, r: u64, e: u32) -> Option<u64> {
    let mut root = sqrt_mod_prime(d, r)?;
    if e == 1 {
        return Some(root);
    }
    if root == 0 {
        return None; // ramified, no unit lift
    }
    let mut modulus = r;
    for _ in 1..e {
        let next = modulus * r;
        let dm = d.rem_euclid(next as i64) as u64;
        // root' = root - (root^2 - d) / (2 root) mod next
        let num = (mul_mod(root, root, next) + next - dm) % next;
        debug_assert!(num % modulus == 0);
        let inv2r = inv_mod(mul_mod(2 % next, root, next), next)?;
        root = (root + next - mul_mod(num, inv2r, next)) % next;
        modulus = next;
    }
    debug_assert_eq!(mul_mod(root, root, modulus), d.rem_euclid(modulus as i64) as u64);
    Some(root)
}

/// Order of u in (Z/M)^x / {±1}: least k >= 1 with u^k = ±1.
fn order_mod_signs(u: u64, m: u64) -> u64 {
    let u = u % m;
    let mut cur = u;
    let mut k = 1u64;
    let minus_one = m - 1;
    loop {
        if cur == 1 || cur == minus_one {
            return k;
        }
        cur = mul_mod(cur, u, m);
        k += 1;
        assert!(k <= m, "element is not a unit mod {}", m);
    }
}

/// Predicted crater profile from the ideal data: maps x and its conjugate to
/// units mod M = N p^m, then reads (h1, h2, s, t, c) off the subgroup they
/// generate in (Z/M)^x / {±1}.
pub fn cm_order_profile(inp: &CMOracleInput) -> Result<CmProfile, TectonicError> {
    // the unit group of the order must be {±1}
    if inp.d_k >= -4 {
        return Err(TectonicError::BadInput(
            "d_K in {-3, -4} rejected: extra units break the profile map".into(),
        ));
    }
    if inp.d_k.rem_euclid(4) > 1 {
        return Err(TectonicError::BadInput("d_K is not a discriminant".into()));
    }
    let (fund, cond) = crate::arith::fundamental_discriminant(inp.d_k);
    if fund != inp.d_k || cond != 1 {
        return Err(TectonicError::BadInput("d_K is not fundamental".into()));
    }
    if !is_prime(inp.p) || inp.p == 2 {
        return Err(TectonicError::BadInput("p must be an odd prime".into()));
    }
    if kronecker(inp.d_k, inp.p as i64) != 1 {
        return Err(TectonicError::BadInput("p does not split in K".into()));
    }
    if inp.m == 0 {
        return Err(TectonicError::BadInput("m >= 1 required".into()));
    }
    let pm = inp.p.pow(inp.m);
    let r_p = match inp.r_p {
        Some(r) => {
            let rr = r % pm;
            if mul_mod(rr, rr, pm) != inp.d_k.rem_euclid(pm as i64) as u64 {
                return Err(TectonicError::BadInput("r_p is not a root of d_K".into()));
            }
            rr
        }
        None => hensel_sqrt(inp.d_k, inp.p, inp.m)
            .ok_or_else(|| TectonicError::BadInput("no square root of d_K mod p^m".into()))?,
    };
    let omega_image = |root: u64, modulus: u64, d_k: i64| -> Result<u64, TectonicError> {
        let inv2 = inv_mod(2 % modulus, modulus)
            .ok_or_else(|| TectonicError::BadInput("even modulus unsupported".into()))?;
        Ok(if d_k.rem_euclid(4) == 0 {
            mul_mod(root, inv2, modulus)
        } else {
            mul_mod((1 + root) % modulus, inv2, modulus)
        })
    };
    let mut residues: Vec<(u64, u64)> = vec![(omega_image(r_p, pm, inp.d_k)?, pm)];
    let mut big_m = pm;
    for &(r, e, root) in &inp.n_factors {
        if !is_prime(r) || r == 2 || r == inp.p {
            return Err(TectonicError::BadInput(format!("bad split factor {}", r)));
        }
        let re = r.pow(e);
        if mul_mod(root % re, root % re, re) != inp.d_k.rem_euclid(re as i64) as u64 {
            return Err(TectonicError::BadInput(format!("bad root of d_K mod {}^{}", r, e)));
        }
        residues.push((omega_image(root % re, re, inp.d_k)?, re));
        big_m = big_m
            .checked_mul(re)
            .ok_or_else(|| TectonicError::BadInput("modulus overflow".into()))?;
    }
    if big_m > 10_000_000 {
        return Err(TectonicError::BadInput("N p^m beyond the oracle budget".into()));
    }
    let (w, m_all) = crate::arith::crt(&residues)
        .ok_or_else(|| TectonicError::BadInput("overlapping split factors".into()))?;
    debug_assert_eq!(m_all, big_m);
    let (a, b) = inp.x;
    if gcd(norm_in_order(inp.d_k, a, b).unsigned_abs(), big_m) != 1 {
        return Err(TectonicError::BadInput("Norm(x) shares a factor with N p".into()));
    }
    let u_x = (a + b * w as i64).rem_euclid(big_m as i64) as u64;
    let u_xbar = if inp.d_k.rem_euclid(4) == 0 {
        (a - b * w as i64).rem_euclid(big_m as i64) as u64
    } else {
        // the conjugate of omega is 1 - omega
        (a + b * (1 - w as i64)).rem_euclid(big_m as i64) as u64
    };
    let h1 = order_mod_signs(u_x, big_m);
    let h2 = order_mod_signs(u_xbar, big_m);
    // subgroup generated by u_xbar in (Z/M)^x / ±, as canonical residues
    let canon = |v: u64| -> u64 { v.min(big_m - v) };
    let mut green_set = BTreeSet::new();
    let mut green_index = BTreeMap::new();
    let mut cur = 1u64;
    for k in 0..h2 {
        green_set.insert(canon(cur));
        green_index.entry(canon(cur)).or_insert(k);
        cur = mul_mod(cur, u_xbar, big_m);
    }
    let mut s = 0u64;
    let mut cur = 1u64;
    for k in 1..=h1 {
        cur = mul_mod(cur, u_x, big_m);
        if green_set.contains(&canon(cur)) {
            s = k;
            break;
        }
    }
    if s == 0 || h1 % s != 0 {
        return Err(TectonicError::BadInput("inconsistent subgroup structure".into()));
    }
    let omega = h1 / s;
    if h2 % omega != 0 {
        return Err(TectonicError::BadInput("h1/s does not divide h2".into()));
    }
    let t = h2 / omega;
    let meet = canon(pow_mod(u_x, s, big_m));
    let gamma = green_index[&meet];
    if gamma % t != 0 {
        return Err(TectonicError::BadInput("meeting index not aligned to t".into()));
    }
    let c = canonical_c((gamma / t) % omega, omega);
    Ok(CmProfile { h1, h2, s, t, c, omega })
}

// -------------------- inverse search --------------------

#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub max_p: u64,
    pub max_l: u64,
    pub max_n: u64,
    pub max_dk: u64,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub d_k: i64,
    pub p: u64,
    pub n: u64,
    pub l: u64,
    /// generator of one prime above l, as (a, b) with x = a + b omega_K
    pub x: (i64, i64),
    pub profile: CmProfile,
}

fn fundamental_discriminants(max_abs: u64) -> Vec<i64> {
    let mut out = Vec::new();
    for k in 3..=max_abs as i64 {
        let d = -k;
        if d.rem_euclid(4) > 1 {
            continue;
        }
        let (fund, cond) = crate::arith::fundamental_discriminant(d);
        if fund == d && cond == 1 {
            out.push(d);
        }
    }
    out
}

/// Generator of a principal prime above l in O_K, when one exists.
pub fn principal_prime_above(d_k: i64, l: u64) -> Option<(i64, i64)> {
    let li = l as i64;
    let mut b = 1i64;
    loop {
        if d_k.rem_euclid(4) == 0 {
            // a^2 - b^2 d/4 = l
            let rest = li + b * b * (d_k / 4);
            if rest < 0 {
                return None;
            }
            let a = crate::arith::isqrt(rest as u64) as i64;
            for cand in [a - 1, a, a + 1] {
                if cand >= 0 && cand * cand == rest {
                    return Some((cand, b));
                }
            }
        } else {
            // discriminant of a^2 + ab + b^2 (1-d)/4 - l in a
            let rest = b * b * d_k + 4 * li;
            if rest < 0 {
                return None;
            }
            let sq = crate::arith::isqrt(rest as u64) as i64;
            for cand in [sq - 1, sq, sq + 1] {
                if cand >= 0 && cand * cand == rest {
                    for sign in [1i64, -1] {
                        let num = -b + sign * cand;
                        if num % 2 == 0 {
                            let a = num / 2;
                            if norm_in_order(d_k, a, b) == li {
                                return Some((a, b));
                            }
                        }
                    }
                }
            }
        }
        b += 1;
    }
}

/// Whether a predicted profile matches the target, allowing the blue/green
/// relabeling (s and t swap, c inverts mod omega).
pub fn profile_matches(p: &CmProfile, target: &TectonicParams) -> bool {
    if p.omega == target.omega && p.s == target.s && p.t == target.t && p.c == target.c {
        return true;
    }
    if p.omega == target.omega && p.s == target.t && p.t == target.s {
        let cinv = if p.omega == 1 { 1 } else { inv_mod(p.c % p.omega, p.omega).unwrap_or(0) };
        return canonical_c(cinv, p.omega) == target.c;
    }
    false
}

/// Exhaustive, deterministic enumeration of (d_K, l, p, N) within the bounds,
/// keeping tuples whose predicted profile matches the target. The existence
/// theorem behind this is asymptotic; an empty result never contradicts it.
pub fn inverse_search(
    target: &TectonicParams,
    bounds: &SearchBounds,
) -> Result<Vec<Witness>, TectonicError> {
    let target = TectonicParams::new(target.omega, target.s, target.t, target.c)?;
    let mut out = Vec::new();
    for d_k in fundamental_discriminants(bounds.max_dk) {
        if d_k == -3 || d_k == -4 {
            continue;
        }
        for l in 2..=bounds.max_l {
            if !is_prime(l) || kronecker(d_k, l as i64) != 1 {
                continue;
            }
            let Some(x) = principal_prime_above(d_k, l) else { continue };
            for p in 3..=bounds.max_p {
                if !is_prime(p) || p == l || kronecker(d_k, p as i64) != 1 {
                    continue;
                }
                for n in 1..=bounds.max_n {
                    if gcd(n, p * l) != 1 || n % 2 == 0 {
                        continue;
                    }
                    // all prime factors of n must split with liftable roots
                    let mut n_factors = Vec::new();
                    let mut ok = true;
                    for (r, e) in factor(n) {
                        if kronecker(d_k, r as i64) != 1 {
                            ok = false;
                            break;
                        }
                        match hensel_sqrt(d_k, r, e) {
                            Some(root) => n_factors.push((r, e, root)),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let inp = CMOracleInput { d_k, p, m: 1, r_p: None, n_factors, x };
                    let Ok(profile) = cm_order_profile(&inp) else { continue };
                    if profile_matches(&profile, &target) {
                        out.push(Witness { d_k, p, n, l, x, profile });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_single_vertex() {
        let p = TectonicParams::new(1, 1, 1, 1).unwrap();
        let g = generate(&p);
        assert_eq!(g.verts.len(), 1);
        assert_eq!(g.edges.len(), 2); // one blue and one green loop
        assert!(matches!(recognize(&g), RecognizeOutcome::Tectonic(q) if q == p));
    }

    #[test]
    fn eg12_and_eg24_counts() {
        let g12 = generate(&TectonicParams::new(3, 2, 2, 1).unwrap());
        assert_eq!(g12.verts.len(), 12);
        let g24 = generate(&TectonicParams::new(3, 4, 2, 1).unwrap());
        assert_eq!(g24.verts.len(), 24);
        // different sizes are never isomorphic
        assert!(crate::graphcore::colored_digraph_iso(&g12, &g24).is_none());
    }

    #[test]
    fn round_trip_small_sweep() {
        for omega in 1..=6u64 {
            for s in 1..=4u64 {
                for t in 1..=4u64 {
                    for c in 1..=omega.max(1) {
                        if gcd(c, omega) != 1 || omega * s * t > 60 {
                            continue;
                        }
                        let Ok(p) = TectonicParams::new(omega, s, t, c) else { continue };
                        let g = generate(&p);
                        match recognize(&g) {
                            RecognizeOutcome::Tectonic(q) => assert_eq!(q, p, "params {:?}", p),
                            RecognizeOutcome::NotTectonic(r) => panic!("{:?} not recognized: {}", p, r),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn single_color_cycle_is_not_tectonic() {
        let mut g = MultiDiGraph::new();
        for i in 0..5 {
            g.add_vertex(VertexRec::bare(format!("{}", i)));
        }
        for i in 0..5usize {
            g.add_edge(i, (i + 1) % 5, EdgeColor::Blue, String::new());
        }
        assert!(matches!(recognize(&g), RecognizeOutcome::NotTectonic(_)));
    }

    #[test]
    fn oracle_q_sqrt_minus_10() {
        // d_K = -40, p = 13, m = 1, x = 1 + sqrt(-10): orders 3 and 2
        let inp = CMOracleInput { d_k: -40, p: 13, m: 1, r_p: None, n_factors: vec![], x: (1, 1) };
        let prof = cm_order_profile(&inp).unwrap();
        assert_eq!((prof.h1, prof.h2), (3, 2));
        assert_eq!((prof.s, prof.t, prof.omega), (3, 2, 1));
    }

    #[test]
    fn oracle_q_sqrt_minus_5_tower() {
        // d_K = -20, p = 3, x = 2 + 9 sqrt(-5): orders 3^(m-1)
        for m in 2..=4u32 {
            let inp = CMOracleInput { d_k: -20, p: 3, m, r_p: None, n_factors: vec![], x: (2, 9) };
            let prof = cm_order_profile(&inp).unwrap();
            let expect = 3u64.pow(m - 1);
            assert_eq!((prof.h1, prof.h2), (expect, expect), "m = {}", m);
        }
    }

    #[test]
    fn oracle_trivial_action() {
        // x = 1: h1 = 1
        let inp = CMOracleInput { d_k: -40, p: 13, m: 1, r_p: None, n_factors: vec![], x: (1, 0) };
        let prof = cm_order_profile(&inp).unwrap();
        assert_eq!(prof.h1, 1);
    }

    #[test]
    fn oracle_rejects_small_discriminants() {
        let inp = CMOracleInput { d_k: -4, p: 13, m: 1, r_p: None, n_factors: vec![], x: (1, 1) };
        assert!(cm_order_profile(&inp).is_err());
        let inp3 = CMOracleInput { d_k: -3, p: 13, m: 1, r_p: None, n_factors: vec![], x: (1, 1) };
        assert!(cm_order_profile(&inp3).is_err());
    }

    #[test]
    fn principal_primes() {
        // (11) = (1 + sqrt(-10))(1 - sqrt(-10)) in Z[sqrt(-10)]
        assert_eq!(principal_prime_above(-40, 11), Some((1, 1)));
        // 13 splits in Q(sqrt(-10)) but the primes above it are not principal
        assert_eq!(kronecker(-40, 13), 1);
        assert_eq!(principal_prime_above(-40, 13), None);
        // 409 = Norm(2 + 9 sqrt(-5)) in Z[sqrt(-5)]
        assert_eq!(norm_in_order(-20, 2, 9), 409);
    }

    #[test]
    fn search_finds_witnesses_with_matching_profiles() {
        // small sweep; every returned witness must reproduce the target
        let target = TectonicParams::new(1, 3, 2, 1).unwrap();
        let bounds = SearchBounds { max_p: 20, max_l: 15, max_n: 1, max_dk: 50 };
        let ws = inverse_search(&target, &bounds).unwrap();
        assert!(ws.iter().any(|w| w.d_k == -40 && w.p == 13 && w.l == 11));
        for w in &ws {
            assert!(profile_matches(&w.profile, &target));
        }
        // a target violating gcd(c, omega) = 1 is rejected before searching
        let bad = TectonicParams { omega: 4, s: 1, t: 1, c: 2 };
        assert!(inverse_search(&bad, &bounds).is_err());
    }
}
