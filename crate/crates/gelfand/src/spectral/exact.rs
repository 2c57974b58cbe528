//! Exact machinery behind the eigen pipeline: integer characteristic
//! polynomials, root extraction in `Z[ζ_c]` by p-adic lifting over split primes,
//! and Gaussian elimination over cyclotomic fields.
//!
//! The p-adic stage only produces candidates; every root is confirmed by exact
//! polynomial evaluation and every eigencharacter by exact resubstitution, so
//! no step here trusts an unproven bound.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::cyclo::{euler_phi, units_mod, CycNum};

// ---------------------------------------------------------------------------
// integer matrices and characteristic polynomials
// ---------------------------------------------------------------------------

/// Characteristic polynomial of an integer matrix by Faddeev–LeVerrier,
/// ascending coefficients, monic of degree n. All intermediate matrices stay
/// integral, so the division at each step is exact.
pub fn char_poly(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk: Vec<Vec<BigInt>> = (0..n)
        .map(|r| (0..n).map(|c| BigInt::from(m[r][c])).collect())
        .collect();
    for k in 1..=n {
        let trace: BigInt = (0..n).map(|i| mk[i][i].clone()).sum();
        let kk = BigInt::from(k as i64);
        debug_assert!((&trace % &kk).is_zero());
        let ck = -(trace / kk);
        coeffs[n - k] = ck.clone();
        if k == n {
            break;
        }
        // mk := M · (mk + ck I)
        for i in 0..n {
            mk[i][i] += &ck;
        }
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for r in 0..n {
            for t in 0..n {
                if m[r][t] == 0 {
                    continue;
                }
                let f = BigInt::from(m[r][t]);
                for c in 0..n {
                    if !mk[t][c].is_zero() {
                        next[r][c] += &f * &mk[t][c];
                    }
                }
            }
        }
        mk = next;
    }
    coeffs
}

/// Sound squarefree acceptance: squarefree mod p implies squarefree over Q.
/// A polynomial reported non-squarefree here may occasionally be squarefree
/// (bad prime); callers only use this as a gate, and every eigencharacter is
/// verified exactly afterwards.
pub fn is_squarefree(f: &[BigInt]) -> bool {
    const PRIMES: [u64; 5] = [1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081];
    'primes: for &p in &PRIMES {
        if f.last().unwrap().mod_floor_u64(p) == 0 {
            continue;
        }
        let mut a: Vec<u64> = f.iter().map(|c| c.mod_floor_u64(p)).collect();
        let mut b: Vec<u64> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| (c * BigInt::from(i)).mod_floor_u64(p))
            .collect();
        let trim = |v: &mut Vec<u64>| {
            while v.len() > 1 && *v.last().unwrap() == 0 {
                v.pop();
            }
        };
        trim(&mut a);
        trim(&mut b);
        if b.iter().all(|&c| c == 0) {
            continue 'primes;
        }
        while !(b.len() == 1 && b[0] == 0) {
            let lead = *b.last().unwrap();
            let Some(lead_inv) = inv_mod_u64(lead, p) else {
                continue 'primes;
            };
            while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
                let q = mul_mod(*a.last().unwrap(), lead_inv, p);
                let shift = a.len() - b.len();
                for (j, &bj) in b.iter().enumerate() {
                    let delta = mul_mod(q, bj, p);
                    a[shift + j] = (a[shift + j] + p - delta) % p;
                }
                trim(&mut a);
                if a.len() < b.len() {
                    break;
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
        if a.len() == 1 && a[0] != 0 {
            return true;
        }
    }
    false
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn inv_mod_u64(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    Some(mod_pow(a, p - 2, p))
}

// ---------------------------------------------------------------------------
// p-adic root lifting
// ---------------------------------------------------------------------------

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mm = m as u128;
    let mut b = base as u128 % mm;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % mm;
        }
        b = b * b % mm;
        exp >>= 1;
    }
    acc as u64
}

fn eval_poly_mod(f: &[BigInt], x: u64, p: u64) -> u64 {
    let mut acc: u128 = 0;
    let pp = p as u128;
    for c in f.iter().rev() {
        let cm = c.mod_floor_u64(p);
        acc = (acc * x as u128 + cm as u128) % pp;
    }
    acc as u64
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = self % BigInt::from(p);
        let m = if m.is_negative() { m + BigInt::from(p) } else { m };
        m.to_u64().unwrap()
    }
}

/// Find a prime p ≡ 1 (mod c) where every root of f in F_p is simple, and
/// return it with an element of order c and the (scanned) root list.
fn choose_prime(f: &[BigInt], c: u64) -> Option<(u64, u64, Vec<u64>)> {
    let df = derivative(f);
    let mut m = 1u64;
    let mut tried = 0;
    while tried < 400 {
        m += 1;
        let p = c * m + 1;
        if p < 3 || !is_prime_u64(p) {
            continue;
        }
        tried += 1;
        if f.last().unwrap().mod_floor_u64(p) == 0 {
            continue;
        }
        // roots of f mod p by scanning (p stays small: first primes ≡ 1 mod c),
        // demanding simplicity so Hensel lifting applies
        let mut roots = Vec::new();
        let mut simple = true;
        for x in 0..p {
            if eval_poly_mod(f, x, p) == 0 {
                if eval_poly_mod(&df, x, p) == 0 {
                    simple = false;
                    break;
                }
                roots.push(x);
            }
        }
        if !simple {
            continue;
        }
        // order-c element
        let mut omega = 0u64;
        if c > 1 {
            let prime_factors = {
                let mut out = Vec::new();
                let mut reduced = c;
                let mut q = 2;
                while q * q <= reduced {
                    if reduced % q == 0 {
                        out.push(q);
                        while reduced % q == 0 {
                            reduced /= q;
                        }
                    }
                    q += 1;
                }
                if reduced > 1 {
                    out.push(reduced);
                }
                out
            };
            for g in 2..p {
                let cand = mod_pow(g, (p - 1) / c, p);
                if cand == 1 {
                    continue;
                }
                if prime_factors.iter().all(|&q| mod_pow(cand, c / q, p) != 1) {
                    omega = cand;
                    break;
                }
            }
            if omega == 0 {
                continue;
            }
        }
        return Some((p, omega, roots));
    }
    None
}

fn eval_poly_big(f: &[BigInt], x: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in f.iter().rev() {
        acc = (acc * x + c) % modulus;
    }
    ((acc % modulus) + modulus) % modulus
}

fn derivative(f: &[BigInt]) -> Vec<BigInt> {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Modular inverse in Z/m for m a prime power (the argument must be a unit).
fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (mut r0, mut r1) = (m.clone(), ((a % m) + m) % m);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if r0.is_one() {
        Some(((t0 % m) + m) % m)
    } else {
        None
    }
}

/// Hensel-lift a simple root of f from mod p to mod p^target via Newton steps.
fn hensel_root(f: &[BigInt], root: u64, p: u64, target_modulus: &BigInt) -> Option<BigInt> {
    let df = derivative(f);
    let mut modulus = BigInt::from(p);
    let mut x = BigInt::from(root);
    while &modulus < target_modulus {
        modulus = &modulus * &modulus;
        if &modulus > target_modulus {
            modulus = target_modulus.clone();
        }
        let fx = eval_poly_big(f, &x, &modulus);
        let dfx = eval_poly_big(&df, &x, &modulus);
        let inv = inv_mod_big(&dfx, &modulus)?;
        x = ((&x - fx * inv) % &modulus + &modulus) % &modulus;
    }
    Some(x)
}

/// Symmetric representative of x mod m.
fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let half = m / 2;
    if x > &half {
        x - m
    } else {
        x.clone()
    }
}

/// All roots of the monic integer polynomial `f` lying in `Z[ζ_c]` with
/// power-basis coefficients bounded by `coeff_bound` in absolute value,
/// verified exactly. `None` when no suitable prime is found or the candidate
/// tuple space exceeds `tuple_cap`.
pub fn roots_in_cyclotomic(
    f: &[BigInt],
    c: u64,
    coeff_bound: &BigInt,
    tuple_cap: u64,
) -> Option<Vec<CycNum>> {
    let phi = euler_phi(c) as usize;
    let (p, omega, p_roots) = choose_prime(f, c)?;
    if p_roots.is_empty() {
        return Some(Vec::new());
    }
    // tuple space size check
    let mut size: u64 = 1;
    for _ in 0..phi {
        size = size.saturating_mul(p_roots.len() as u64);
        if size > tuple_cap {
            return None;
        }
    }
    let modulus = {
        let mut m = BigInt::from(p);
        let target = BigInt::from(2) * coeff_bound * BigInt::from(phi as u64 + 1) + BigInt::from(1);
        while m < target {
            m = m * BigInt::from(p);
        }
        m
    };
    // lift the F_p roots and ω
    let lifted: Vec<BigInt> = p_roots
        .iter()
        .map(|&r| hensel_root(f, r, p, &modulus))
        .collect::<Option<Vec<_>>>()?;
    let omega_lift = if c == 1 {
        BigInt::one()
    } else {
        let mut xc = vec![BigInt::zero(); c as usize + 1];
        xc[0] = BigInt::from(-1);
        xc[c as usize] = BigInt::one();
        hensel_root(&xc, omega, p, &modulus)?
    };
    // Vandermonde on the embeddings t ∈ (Z/c)^×, columns = powers of ζ
    let units = units_mod(c);
    debug_assert_eq!(units.len(), phi);
    let v: Vec<Vec<BigInt>> = units
        .iter()
        .map(|&t| {
            (0..phi)
                .map(|r| {
                    let e = (t as u128 * r as u128 % c.max(1) as u128) as u64;
                    mod_pow_big(&omega_lift, e, &modulus)
                })
                .collect()
        })
        .collect();
    let vinv = invert_matrix_mod(&v, &modulus)?;

    // walk all choice functions (which lifted root realizes each embedding)
    let nroots = lifted.len();
    let mut indices = vec![0usize; phi];
    let mut out: Vec<CycNum> = Vec::new();
    loop {
        // u = V⁻¹ · (λ_{a(t)})_t
        let mut ok = true;
        let mut coords: Vec<BigInt> = Vec::with_capacity(phi);
        for row in &vinv {
            let mut acc = BigInt::zero();
            for (col, &idx) in indices.iter().enumerate() {
                acc = (acc + &row[col] * &lifted[idx]) % &modulus;
            }
            let s = symmetric(&(((acc.clone() % &modulus) + &modulus) % &modulus), &modulus);
            if s.magnitude() > coeff_bound.magnitude() {
                ok = false;
                break;
            }
            coords.push(s);
        }
        if ok {
            let cand = CycNum::from_coeffs(
                c,
                coords
                    .into_iter()
                    .map(BigRational::from_integer)
                    .collect(),
            );
            if !out.contains(&cand) && eval_cyc_poly(f, &cand).is_zero() {
                out.push(cand);
            }
        }
        // next tuple
        let mut pos = 0;
        loop {
            if pos == phi {
                return Some(out);
            }
            indices[pos] += 1;
            if indices[pos] < nroots {
                break;
            }
            indices[pos] = 0;
            pos += 1;
        }
    }
}

fn mod_pow_big(base: &BigInt, mut exp: u64, m: &BigInt) -> BigInt {
    let mut acc = BigInt::one();
    let mut b = base.clone() % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * &b % m;
        }
        b = &b * &b % m;
        exp >>= 1;
    }
    ((acc % m) + m) % m
}

/// Invert a square matrix over Z/m (m a prime power; fails on non-unit pivot).
fn invert_matrix_mod(v: &[Vec<BigInt>], m: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let n = v.len();
    let mut a: Vec<Vec<BigInt>> = v
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut full = row.clone();
            for j in 0..n {
                full.push(if r == j { BigInt::one() } else { BigInt::zero() });
            }
            full
        })
        .collect();
    for col in 0..n {
        // find a row with invertible pivot
        let pivot = (col..n).find_map(|r| {
            inv_mod_big(&a[r][col], m).map(|inv| (r, inv))
        })?;
        let (prow, pinv) = pivot;
        a.swap(col, prow);
        for c in col..2 * n {
            a[col][c] = &a[col][c] * &pinv % m;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..2 * n {
                    let delta = (&f * &a[col][c]) % m;
                    a[r][c] = ((&a[r][c] - delta) % m + m) % m;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Evaluate an integer polynomial at a cyclotomic argument (exact Horner).
pub fn eval_cyc_poly(f: &[BigInt], x: &CycNum) -> CycNum {
    let mut acc = CycNum::zero();
    for c in f.iter().rev() {
        acc = acc * x + CycNum::from_bigint(c.clone());
    }
    acc
}

// ---------------------------------------------------------------------------
// exact linear algebra over cyclotomic fields
// ---------------------------------------------------------------------------

/// Kernel basis of a rectangular matrix over the cyclotomic field.
pub fn kernel_basis(mat: &[Vec<CycNum>]) -> Vec<Vec<CycNum>> {
    if mat.is_empty() {
        return Vec::new();
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut a: Vec<Vec<CycNum>> = mat.to_vec();
    let mut pivot_in_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = CycNum::one().checked_div(&a[rank][col]).unwrap();
        for c in col..cols {
            a[rank][c] = &a[rank][c] * &inv;
        }
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    let delta = &f * &a[rank][c];
                    a[r][c] = &a[r][c] - &delta;
                }
            }
        }
        pivot_in_col[col] = Some(rank);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_in_col[free].is_some() {
            continue;
        }
        let mut v = vec![CycNum::zero(); cols];
        v[free] = CycNum::one();
        for (col, piv) in pivot_in_col.iter().enumerate() {
            if let Some(r) = piv {
                v[col] = -&a[*r][free];
            }
        }
        basis.push(v);
    }
    basis
}
