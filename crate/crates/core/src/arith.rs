//! Small-integer helpers shared across the crate: primality, factoring,
//! Kronecker symbols, discriminant factorization, CRT.

use alloc::vec::Vec;

/// Deterministic Miller-Rabin, exact for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'wit: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'wit;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modular inverse of `a` mod `m` for gcd(a, m) = 1.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        let r = r0 - q * r1;
        r0 = r1;
        r1 = r;
        let t = t0 - q * t1;
        t0 = t1;
        t1 = t;
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Trial-division factorization into (prime, exponent) pairs, ascending.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of a mod m (gcd(a, m) = 1), by brute stepping.
/// Returns None if the order exceeds `cap`.
pub fn mult_order(a: u64, m: u64, cap: u64) -> Option<u64> {
    let a = a % m;
    let mut x = a;
    let mut k = 1u64;
    while x != 1 {
        if k >= cap {
            return None;
        }
        x = mul_mod(x, a, m);
        k += 1;
    }
    Some(k)
}

/// Kronecker symbol (a/n), full generality for i64 a and u64 n.
pub fn kronecker(mut a: i64, mut n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 {
        1i32
    } else {
        // (a/2)^v
        match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        }
    };
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        debug_assert!(n % 2 == 1 && n > 0);
        a = a.rem_euclid(n);
        if a == 0 {
            return if n == 1 { k } else { 0 };
        }
        let mut v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 && matches!(n % 8, 3 | 5) {
            k = -k;
        }
        // quadratic reciprocity for odd positive a, n
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        core::mem::swap(&mut a, &mut n);
    }
}

/// Writes d = f^2 * d_k with d_k a fundamental discriminant (< 0 input).
/// Returns (d_k, f).
pub fn fundamental_discriminant(d: i64) -> (i64, u64) {
    assert!(d < 0 && (d % 4 == 0 || d.rem_euclid(4) == 1), "not a discriminant: {}", d);
    let mut m = (-d) as u64;
    let mut f = 1u64;
    for (p, e) in factor(m) {
        let half = e / 2;
        for _ in 0..half {
            f *= p;
        }
    }
    // largest square divisor is f^2; adjust until the cofactor is fundamental
    loop {
        m = (-d) as u64 / (f * f);
        let d0 = -(m as i64);
        if d0.rem_euclid(4) == 1 {
            return (d0, f);
        }
        if d0 % 4 == 0 {
            let q = d0 / 4;
            if q.rem_euclid(4) == 2 || q.rem_euclid(4) == 3 {
                return (d0, f);
            }
        }
        assert!(f % 2 == 0, "discriminant factorization failed for {}", d);
        f /= 2;
    }
}

/// CRT for pairwise coprime moduli: returns x mod prod with x = r_i mod m_i.
pub fn crt(pairs: &[(u64, u64)]) -> Option<(u64, u64)> {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, mi) in pairs {
        // solve x' = x mod m, x' = r mod mi
        let g = gcd(m, mi);
        if g != 1 {
            return None;
        }
        let inv = inv_mod(m % mi, mi)?;
        let diff = (r as i128 - x as i128).rem_euclid(mi as i128) as u64;
        let k = mul_mod(diff, inv, mi);
        x += m * k;
        m *= mi;
        x %= m;
    }
    Some((x, m))
}

/// Floor of the integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = 1u64 << ((64 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// p-adic valuation of n (n > 0).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(13) && is_prime(409));
        assert!(!is_prime(1) && !is_prime(169) && !is_prime(0));
    }

    #[test]
    fn kronecker_values() {
        // -4 is ramified at 2, -11 inert at 2, -7 split at 2
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-11, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        // -40 at 11 and 13: both split (paper's Q(sqrt(-10)) example)
        assert_eq!(kronecker(-40, 11), 1);
        assert_eq!(kronecker(-40, 13), 1);
        // -20 at 3: split (paper's Q(sqrt(-5)) example)
        assert_eq!(kronecker(-20, 3), 1);
        // -4 at 3: inert, at 5: split
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
    }

    #[test]
    fn fundamental_disc() {
        assert_eq!(fundamental_discriminant(-16), (-4, 2));
        assert_eq!(fundamental_discriminant(-4), (-4, 1));
        assert_eq!(fundamental_discriminant(-11), (-11, 1));
        assert_eq!(fundamental_discriminant(-640), (-40, 4));
        assert_eq!(fundamental_discriminant(-36), (-4, 3));
        assert_eq!(fundamental_discriminant(-12), (-3, 2));
        assert_eq!(fundamental_discriminant(-108), (-3, 6));
    }

    #[test]
    fn crt_basic() {
        let (x, m) = crt(&[(2, 5), (3, 7)]).unwrap();
        assert_eq!(m, 35);
        assert_eq!(x % 5, 2);
        assert_eq!(x % 7, 3);
        assert!(crt(&[(1, 6), (2, 4)]).is_none());
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order(2, 5, 1000), Some(4));
        assert_eq!(mult_order(2, 25, 1000), Some(20));
        assert_eq!(mult_order(409 % 9, 9, 1000), Some(3));
    }
}
