//! Exact arithmetic in cyclotomic fields `Q(ζ_k)`.
//!
//! A [`CycNum`] is stored on the power basis `1, ζ, …, ζ^{φ(k)−1}` of its
//! *minimal* conductor, with arbitrary-precision rational coefficients reduced
//! modulo the k-th cyclotomic polynomial. Two values are equal exactly when
//! their canonical representations coincide, which makes the type usable as a
//! key in regression tests and hash maps.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Numeric tolerance used by [`CycNum::snap`]. Snapped values are candidates
/// only; callers verify them exactly, so this affects completeness, never
/// soundness.
pub const EPS_SNAP: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CycError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{t} is not a unit modulo {k}")]
    NotAUnit { t: u64, k: u64 },
    #[error("cannot parse cyclotomic number from {0:?}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// elementary number theory helpers
// ---------------------------------------------------------------------------

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(k: u64) -> u64 {
    factorize(k)
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Sorted list of all divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Units of `Z/k`, ascending. For k = 1 this is `[0]` (the trivial group).
pub fn units_mod(k: u64) -> Vec<u64> {
    if k == 1 {
        return vec![0];
    }
    (1..k).filter(|&t| gcd_u64(t, k) == 1).collect()
}

// ---------------------------------------------------------------------------
// dense rational polynomials (index = degree)
// ---------------------------------------------------------------------------

type Poly = Vec<BigRational>;

fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![BigRational::zero()];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`, in place.
fn poly_rem(a: &mut Poly, m: &[BigRational]) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - dm;
        for (j, mj) in m.iter().take(dm).enumerate() {
            if !mj.is_zero() {
                let delta = &lead * mj;
                a[shift + j] -= delta;
            }
        }
    }
}

/// Exact quotient `a / b` for polynomials with zero remainder.
fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut rem: Poly = a.to_vec();
    poly_trim(&mut rem);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = BigRational::one() / b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db || (rem.len() == db + 1 && db == 0) {
        if rem.iter().all(|c| c.is_zero()) {
            break;
        }
        let d = rem.len() - 1;
        let c = rem.last().unwrap() * &lead_inv;
        let shift = d - db;
        q[shift] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            let delta = &c * bj;
            rem[shift + j] -= delta;
        }
        poly_trim(&mut rem);
        if d == db {
            break;
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    if q.is_empty() {
        q.push(BigRational::zero());
    }
    q
}

/// Extended gcd over Q[x]: returns `(g, u)` with `u·a ≡ g (mod m)`, `g` monic.
fn poly_invert_mod(a: &[BigRational], m: &[BigRational]) -> Option<Poly> {
    // Standard extended Euclid tracking only the coefficient of `a`.
    let mut r0: Poly = m.to_vec();
    let mut r1: Poly = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut u0: Poly = vec![BigRational::zero()];
    let mut u1: Poly = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        // divide r0 by r1
        let mut q = vec![BigRational::zero(); r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let lead_inv = BigRational::one() / r1.last().unwrap().clone();
        while rem.len() >= r1.len() && !(rem.len() == 1 && rem[0].is_zero()) {
            let c = rem.last().unwrap() * &lead_inv;
            let shift = rem.len() - r1.len();
            q[shift] = c.clone();
            for (j, bj) in r1.iter().enumerate() {
                let delta = &c * bj;
                rem[shift + j] -= delta;
            }
            poly_trim(&mut rem);
            if rem.len() == 1 && rem[0].is_zero() {
                break;
            }
            if rem.len() < r1.len() {
                break;
            }
        }
        poly_trim(&mut q);
        let qu1 = poly_mul(&q, &u1);
        let mut u2 = u0.clone();
        u2.resize(u2.len().max(qu1.len()), BigRational::zero());
        for (i, c) in qu1.iter().enumerate() {
            u2[i] -= c;
        }
        poly_trim(&mut u2);
        r0 = r1;
        r1 = rem;
        u0 = u1;
        u1 = u2;
    }
    // r0 is the gcd; invertible iff gcd is a nonzero constant
    if r0.len() == 1 && !r0[0].is_zero() {
        let scale = BigRational::one() / r0[0].clone();
        let mut inv = u0;
        for c in inv.iter_mut() {
            *c *= &scale;
        }
        Some(inv)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// per-conductor context: φ(k) and the cyclotomic polynomial Φ_k
// ---------------------------------------------------------------------------

struct CycContext {
    phi: usize,
    /// Monic Φ_k of degree φ(k).
    min_poly: Poly,
}

fn context(k: u64) -> Arc<CycContext> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycContext>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(ctx) = cache.lock().unwrap().get(&k) {
        return ctx.clone();
    }
    // Φ_k = (x^k − 1) / ∏_{d|k, d<k} Φ_d, computed outside the lock to allow
    // recursion into smaller conductors.
    let mut num = vec![BigRational::zero(); k as usize + 1];
    num[0] = -BigRational::one();
    num[k as usize] = BigRational::one();
    let mut quotient = num;
    for d in divisors(k) {
        if d == k {
            continue;
        }
        let sub = context(d);
        quotient = poly_div_exact(&quotient, &sub.min_poly);
    }
    poly_trim(&mut quotient);
    let ctx = Arc::new(CycContext {
        phi: quotient.len() - 1,
        min_poly: quotient,
    });
    cache
        .lock()
        .unwrap()
        .entry(k)
        .or_insert_with(|| ctx.clone())
        .clone()
}

/// Power-basis images of `ζ_d^j` (j < φ(d)) inside Q(ζ_k), cached per (k, d).
fn subfield_basis(k: u64, d: u64) -> Arc<Vec<Vec<BigRational>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<Vec<Vec<BigRational>>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&(k, d)) {
        return m.clone();
    }
    let ctx = context(k);
    let phi_d = context(d).phi;
    let step = (k / d) as usize;
    let mut cols = Vec::with_capacity(phi_d);
    for j in 0..phi_d {
        let mut poly = vec![BigRational::zero(); j * step + 1];
        poly[j * step] = BigRational::one();
        poly_rem(&mut poly, &ctx.min_poly);
        poly.resize(ctx.phi, BigRational::zero());
        cols.push(poly);
    }
    let arc = Arc::new(cols);
    cache
        .lock()
        .unwrap()
        .entry((k, d))
        .or_insert_with(|| arc.clone())
        .clone()
}

/// Solve `Σ_j y_j · basis_j = rhs` exactly; `None` when inconsistent.
fn solve_in_basis(basis: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = rhs.len();
    let cols = basis.len();
    // augmented matrix, column-major assembly into row-major
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = basis.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = BigRational::one() / m[rank][col].clone();
        for c in col..=cols {
            m[rank][c] *= &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let delta = &f * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
    }
    // consistency: no pivot in the augmented column
    for r in rank..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut y = vec![BigRational::zero(); cols];
    for col in 0..cols {
        if pivot_of_col[col] != usize::MAX {
            y[col] = m[pivot_of_col[col]][cols].clone();
        }
    }
    // verify (free columns default to zero; the basis is independent so this
    // only rejects genuinely inconsistent systems)
    for (i, want) in rhs.iter().enumerate() {
        let mut acc = BigRational::zero();
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                acc += yj * &basis[j][i];
            }
        }
        if &acc != want {
            return None;
        }
    }
    Some(y)
}

// ---------------------------------------------------------------------------
// CycNum
// ---------------------------------------------------------------------------

/// An exact element of a cyclotomic field, kept at its minimal conductor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    conductor: u64,
    /// Length φ(conductor); coordinates on `1, ζ, …, ζ^{φ−1}`.
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycNum {
            conductor: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    /// `ζ_k^e`, canonicalized.
    pub fn root_of_unity(k: u64, e: u64) -> Self {
        assert!(k >= 1, "conductor must be positive");
        let e = (e % k) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::from_poly(k, poly)
    }

    /// Build from arbitrary power-basis coordinates at conductor `k`.
    pub fn from_coeffs(k: u64, coeffs: Vec<BigRational>) -> Self {
        Self::from_poly(k, coeffs)
    }

    fn from_poly(k: u64, mut poly: Poly) -> Self {
        let ctx = context(k);
        poly_rem(&mut poly, &ctx.min_poly);
        poly.resize(ctx.phi, BigRational::zero());
        let (conductor, coeffs) = minimize_conductor(k, poly);
        CycNum { conductor, coeffs }
    }

    /// Minimal conductor of the value (1 for rationals).
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Power-basis coordinates at the minimal conductor.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.conductor == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    /// Coordinates of `self` inside Q(ζ_K); `K` must be a multiple of the
    /// conductor.
    pub fn coeffs_at(&self, big_k: u64) -> Vec<BigRational> {
        assert!(
            big_k % self.conductor == 0,
            "conductor {} does not divide {}",
            self.conductor,
            big_k
        );
        let ctx = context(big_k);
        let step = (big_k / self.conductor) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[i * step] = c.clone();
            }
        }
        poly_rem(&mut poly, &ctx.min_poly);
        poly.resize(ctx.phi, BigRational::zero());
        poly
    }

    /// Complex conjugate: the image of ζ under ζ ↦ ζ^{−1}.
    pub fn conjugate(&self) -> CycNum {
        if self.conductor == 1 {
            return self.clone();
        }
        self.galois_apply(self.conductor - 1)
            .expect("k-1 is always a unit")
    }

    /// Galois automorphism ζ ↦ ζ^t; requires gcd(t, k) = 1 for the value's
    /// minimal conductor k (rationals accept every t).
    pub fn galois_apply(&self, t: u64) -> Result<CycNum, CycError> {
        let k = self.conductor;
        if k == 1 {
            return Ok(self.clone());
        }
        let t = t % k;
        if gcd_u64(t, k) != 1 {
            return Err(CycError::NotAUnit { t, k });
        }
        let ctx = context(k);
        let mut poly = vec![BigRational::zero(); k as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = (i as u64 * t % k) as usize;
                poly[e] += c;
            }
        }
        poly_rem(&mut poly, &ctx.min_poly);
        poly.resize(ctx.phi, BigRational::zero());
        // Galois images stay in the same field, so the conductor is already
        // minimal.
        Ok(CycNum {
            conductor: k,
            coeffs: poly,
        })
    }

    /// Apply a Galois element given modulo a multiple `K` of the conductor.
    pub fn galois_apply_mod(&self, t: u64, big_k: u64) -> Result<CycNum, CycError> {
        if gcd_u64(t % big_k, big_k) != 1 && big_k > 1 {
            return Err(CycError::NotAUnit { t: t % big_k, k: big_k });
        }
        if self.conductor == 1 {
            return Ok(self.clone());
        }
        self.galois_apply(t % self.conductor)
    }

    /// True iff the value lies in `Z[ζ]`: every power-basis coefficient is an
    /// integer (the power basis is an integral basis of the ring of integers).
    pub fn is_cyclotomic_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Integer power-basis coordinates when the value is a cyclotomic integer.
    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        if self.is_cyclotomic_integer() {
            Some(self.coeffs.iter().map(|c| c.numer().clone()).collect())
        } else {
            None
        }
    }

    pub fn checked_div(&self, rhs: &CycNum) -> Result<CycNum, CycError> {
        if rhs.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        Ok(self * &rhs.inverse_unchecked())
    }

    fn inverse_unchecked(&self) -> CycNum {
        let ctx = context(self.conductor);
        let mut a = self.coeffs.clone();
        poly_trim(&mut a);
        let mut inv = poly_invert_mod(&a, &ctx.min_poly).expect("nonzero element is invertible");
        poly_rem(&mut inv, &ctx.min_poly);
        inv.resize(ctx.phi, BigRational::zero());
        // Q(x) is closed under inversion, so the conductor stays minimal.
        CycNum {
            conductor: self.conductor,
            coeffs: inv,
        }
    }

    /// Numeric value under the embedding ζ_k ↦ exp(2πi/k).
    pub fn to_complex(&self) -> Complex64 {
        let k = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * (i as f64) / k;
            let z = Complex64::new(angle.cos(), angle.sin());
            acc += z * c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Recognize a floating approximation as an element of Q(ζ_k) with
    /// denominator dividing `denom_bound`, within [`EPS_SNAP`].
    ///
    /// The search walks structured candidates (rationals, scaled roots of
    /// unity, two-monomial combinations and scaled Galois-orbit period sums),
    /// which covers every value arising from the catalog pipelines. The result
    /// is a candidate only — callers must verify it exactly.
    pub fn snap(x: Complex64, k: u64, denom_bound: u64) -> Option<CycNum> {
        snap_impl(x, k, denom_bound)
    }

    /// Machine form `k;c0,c1,…` with rational coefficients `p/q`; rationals
    /// always serialize with k = 1.
    pub fn serialize(&self) -> String {
        let coeffs: Vec<String> = self.coeffs.iter().map(rational_string).collect();
        format!("{};{}", self.conductor, coeffs.join(","))
    }

    pub fn parse(s: &str) -> Result<CycNum, CycError> {
        let s_trim = s.trim();
        let (k_str, rest) = s_trim
            .split_once(';')
            .ok_or_else(|| CycError::Parse(s.to_string()))?;
        let k: u64 = k_str
            .trim()
            .parse()
            .map_err(|_| CycError::Parse(s.to_string()))?;
        if k == 0 {
            return Err(CycError::Parse(s.to_string()));
        }
        let mut coeffs = Vec::new();
        for part in rest.split(',') {
            let c = BigRational::from_str(part.trim())
                .map_err(|_| CycError::Parse(s.to_string()))?;
            coeffs.push(c);
        }
        if coeffs.len() != context(k).phi {
            return Err(CycError::Parse(s.to_string()));
        }
        Ok(Self::from_coeffs(k, coeffs))
    }

    /// Total order on canonical forms (conductor, then coordinates); used for
    /// deterministic serialization-based tie-breaking.
    pub fn canonical_cmp(&self, other: &CycNum) -> Ordering {
        self.conductor
            .cmp(&other.conductor)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn minimize_conductor(mut k: u64, mut coeffs: Poly) -> (u64, Poly) {
    'outer: loop {
        if k == 1 {
            return (k, coeffs);
        }
        // rational shortcut: on the power basis, rationals are exactly the
        // vectors supported on the constant coordinate
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            coeffs.truncate(1);
            return (1, coeffs);
        }
        for (p, _) in factorize(k) {
            let d = k / p;
            if d == 1 {
                continue; // the rational case was already ruled out
            }
            let basis = subfield_basis(k, d);
            if let Some(y) = solve_in_basis(&basis, &coeffs) {
                k = d;
                coeffs = y;
                continue 'outer;
            }
        }
        return (k, coeffs);
    }
}

// --- operator impls (by reference; owned variants delegate) ----------------

impl<'b> Add<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &'b CycNum) -> CycNum {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.conductor == 1 && rhs.conductor == 1 {
            return CycNum::from_rational(&self.coeffs[0] + &rhs.coeffs[0]);
        }
        let k = lcm_u64(self.conductor, rhs.conductor);
        let mut a = self.coeffs_at(k);
        let b = rhs.coeffs_at(k);
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        let (conductor, coeffs) = minimize_conductor(k, a);
        CycNum { conductor, coeffs }
    }
}

impl<'b> Sub<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &'b CycNum) -> CycNum {
        self + &(-rhs)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'b> Mul<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &'b CycNum) -> CycNum {
        // scalar fast paths: a nonzero rational factor never changes the
        // minimal conductor
        if self.conductor == 1 {
            let q = &self.coeffs[0];
            if q.is_zero() {
                return CycNum::zero();
            }
            if q.is_one() {
                return rhs.clone();
            }
            return CycNum {
                conductor: rhs.conductor,
                coeffs: rhs.coeffs.iter().map(|c| c * q).collect(),
            };
        }
        if rhs.conductor == 1 {
            return rhs * self;
        }
        let k = lcm_u64(self.conductor, rhs.conductor);
        let a = self.coeffs_at(k);
        let b = rhs.coeffs_at(k);
        let prod = poly_mul(&a, &b);
        CycNum::from_poly(k, prod)
    }
}

impl<'b> Div<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn div(self, rhs: &'b CycNum) -> CycNum {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &'a CycNum) -> CycNum {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conductor == 1 {
            return write!(f, "{}", rational_string(&self.coeffs[0]));
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            if e == 0 {
                write!(f, "{}", rational_string(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", rational_string(&mag))?;
                }
                write!(f, "z{}", self.conductor)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({})", self)
    }
}

/// Spec-level arithmetic entry point; `Div` reports division by zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn cyc_arith(a: &CycNum, b: &CycNum, op: ArithOp) -> Result<CycNum, CycError> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
    }
}

// ---------------------------------------------------------------------------
// snapping
// ---------------------------------------------------------------------------

fn round_to_bounded_rational(y: f64, denom_bound: u64, tol: f64) -> Option<BigRational> {
    if !y.is_finite() {
        return None;
    }
    let mut best: Option<(f64, BigRational)> = None;
    for m in divisors(denom_bound.max(1)) {
        let scaled = y * m as f64;
        if scaled.abs() > 9e15 {
            continue;
        }
        let n = scaled.round() as i128;
        let cand = BigRational::new(BigInt::from(n), BigInt::from(m));
        let err = (cand.to_f64().unwrap() - y).abs();
        if err <= tol && best.as_ref().map_or(true, |(e, _)| err < *e) {
            best = Some((err, cand));
        }
    }
    best.map(|(_, q)| q)
}

fn zeta_complex(k: u64, e: u64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (e % k) as f64 / k as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Candidate shapes: every entry in the paper's matrices is a bounded-denominator
/// rational combination of at most two monomials `q·ζ^e`, or a scaled Galois
/// period `q·Σ_{s∈⟨t⟩} ζ^{as} + q'`.
/// A candidate is screened numerically first; the exact `CycNum` is only
/// constructed for the few survivors.
struct SnapCandidate {
    /// basis exponents (monomials) or orbit exponent sets (periods)
    supports: Vec<Vec<u64>>,
    rationals: Vec<BigRational>,
}

impl SnapCandidate {
    fn build(&self, k: u64) -> CycNum {
        let mut acc = CycNum::zero();
        for (support, q) in self.supports.iter().zip(&self.rationals) {
            let mut basis = CycNum::zero();
            for &e in support {
                basis = basis + CycNum::root_of_unity(k, e);
            }
            acc = acc + CycNum::from_rational(q.clone()) * basis;
        }
        acc
    }
}

fn rational_approx(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn snap_impl(x: Complex64, k: u64, denom_bound: u64) -> Option<CycNum> {
    let tol = EPS_SNAP;
    let mut survivors: Vec<SnapCandidate> = Vec::new();
    let mut screen = |supports: Vec<Vec<u64>>, rationals: Vec<BigRational>, zs: &[Complex64]| {
        let mut approx = Complex64::new(0.0, 0.0);
        for (q, z) in rationals.iter().zip(zs) {
            approx += z * rational_approx(q);
        }
        if (approx - x).norm() <= tol {
            survivors.push(SnapCandidate {
                supports,
                rationals,
            });
        }
    };

    // rationals
    if x.im.abs() <= tol {
        if let Some(q) = round_to_bounded_rational(x.re, denom_bound, tol) {
            screen(vec![vec![0]], vec![q], &[Complex64::new(1.0, 0.0)]);
        }
    }

    let fit_two = |z1: Complex64, z2: Complex64| -> Option<(f64, f64)> {
        let det = z1.re * z2.im - z1.im * z2.re;
        if det.abs() < 1e-9 {
            return None;
        }
        let q1 = (x.re * z2.im - x.im * z2.re) / det;
        let q2 = (z1.re * x.im - z1.im * x.re) / det;
        Some((q1, q2))
    };

    if k > 1 {
        // single monomials q·ζ^e
        for e in 1..k {
            let z = zeta_complex(k, e);
            let y = x * z.conj();
            if y.im.abs() <= tol {
                if let Some(q) = round_to_bounded_rational(y.re, denom_bound, tol) {
                    if !q.is_zero() {
                        screen(vec![vec![e]], vec![q], &[z]);
                    }
                }
            }
        }

        // q1·ζ^{e1} + q2·ζ^{e2} with real bounded-denominator q's
        for e1 in 0..k {
            let z1 = zeta_complex(k, e1);
            for e2 in (e1 + 1)..k {
                let z2 = zeta_complex(k, e2);
                if let Some((y1, y2)) = fit_two(z1, z2) {
                    if let (Some(q1), Some(q2)) = (
                        round_to_bounded_rational(y1, denom_bound, 1e-6),
                        round_to_bounded_rational(y2, denom_bound, 1e-6),
                    ) {
                        screen(vec![vec![e1], vec![e2]], vec![q1, q2], &[z1, z2]);
                    }
                }
            }
        }

        // scaled period sums over cyclic unit subgroups
        let units = units_mod(k);
        let mut seen_subgroups: Vec<Vec<u64>> = Vec::new();
        for &t in &units {
            let mut sub = vec![1u64 % k];
            let mut cur = t;
            while cur != 1 % k {
                sub.push(cur);
                cur = cur * t % k;
            }
            sub.sort_unstable();
            if seen_subgroups.contains(&sub) {
                continue;
            }
            seen_subgroups.push(sub.clone());
            if sub.len() < 2 {
                continue;
            }
            let mut seen_orbits: Vec<Vec<u64>> = Vec::new();
            for a in 1..k {
                let mut orbit: Vec<u64> = sub.iter().map(|&s| a * s % k).collect();
                orbit.sort_unstable();
                orbit.dedup();
                if seen_orbits.contains(&orbit) {
                    continue;
                }
                seen_orbits.push(orbit.clone());
                let mut eta_c = Complex64::new(0.0, 0.0);
                for &m in &orbit {
                    eta_c += zeta_complex(k, m);
                }
                if eta_c.norm() < 1e-9 {
                    continue;
                }
                if eta_c.im.abs() > 1e-9 {
                    // complex period: fit q·η + q′ from the 2×2 system
                    if let Some((y1, y2)) = fit_two(eta_c, Complex64::new(1.0, 0.0)) {
                        if let (Some(q1), Some(q2)) = (
                            round_to_bounded_rational(y1, denom_bound, 1e-6),
                            round_to_bounded_rational(y2, denom_bound, 1e-6),
                        ) {
                            screen(
                                vec![orbit.clone(), vec![0]],
                                vec![q1, q2],
                                &[eta_c, Complex64::new(1.0, 0.0)],
                            );
                        }
                    }
                } else if x.im.abs() <= tol {
                    // real period: scan small rational offsets q′
                    for num in -8i64..=8 {
                        for den in divisors(denom_bound.max(1)) {
                            let off = num as f64 / den as f64;
                            let yq = (x.re - off) / eta_c.re;
                            if let Some(q) = round_to_bounded_rational(yq, denom_bound, 1e-6) {
                                if q.is_zero() {
                                    continue;
                                }
                                screen(
                                    vec![orbit.clone(), vec![0]],
                                    vec![
                                        q,
                                        BigRational::new(BigInt::from(num), BigInt::from(den)),
                                    ],
                                    &[eta_c, Complex64::new(1.0, 0.0)],
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    let mut best: Option<(f64, CycNum)> = None;
    for cand in survivors {
        let exact = cand.build(k);
        let err = (exact.to_complex() - x).norm();
        if err > tol {
            continue;
        }
        match &best {
            Some((e, b)) => {
                if err < *e - 1e-15
                    || (err <= *e + 1e-15 && exact.canonical_cmp(b) == Ordering::Less)
                {
                    best = Some((err, exact));
                }
            }
            None => best = Some((err, exact)),
        }
    }
    best.map(|(_, c)| c)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(k: u64, e: u64) -> CycNum {
        CycNum::root_of_unity(k, e)
    }

    #[test]
    fn products_reduce_mod_cyclotomic_polynomial() {
        assert_eq!(zeta(3, 1) * zeta(3, 1), zeta(3, 2));
        // 1 + ζ_3 + ζ_3² = 0
        let s = CycNum::one() + zeta(3, 1) + zeta(3, 2);
        assert!(s.is_zero());
        // ζ_4² = −1
        assert_eq!(zeta(4, 1) * zeta(4, 1), CycNum::from_int(-1));
    }

    #[test]
    fn conjugation_is_an_involution_fixing_rationals() {
        assert_eq!(zeta(5, 1).conjugate(), zeta(5, 4));
        let x = CycNum::from_int(2)
            + CycNum::from_int(3) * zeta(7, 1)
            + CycNum::from_int(3) * zeta(7, 2);
        let want = CycNum::from_int(2)
            + CycNum::from_int(3) * zeta(7, 6)
            + CycNum::from_int(3) * zeta(7, 5);
        assert_eq!(x.conjugate(), want);
        assert_eq!(x.conjugate().conjugate(), x);
        let q = CycNum::from_rational(BigRational::new(BigInt::from(5), BigInt::from(2)));
        assert_eq!(q.conjugate(), q);
    }

    #[test]
    fn galois_action_composes_multiplicatively() {
        assert_eq!(zeta(5, 1).galois_apply(2).unwrap(), zeta(5, 2));
        // (1+ζ_3) under t=2 → 1+ζ_3² = −ζ_3
        let x = CycNum::one() + zeta(3, 1);
        assert_eq!(x.galois_apply(2).unwrap(), -zeta(3, 1));
        // composition
        let a = zeta(7, 1) + CycNum::from_int(4) * zeta(7, 3);
        let b = a.galois_apply(2).unwrap().galois_apply(3).unwrap();
        assert_eq!(b, a.galois_apply(6).unwrap());
        assert!(matches!(
            zeta(4, 1).galois_apply(2),
            Err(CycError::NotAUnit { .. })
        ));
        assert_eq!(CycNum::from_int(7).galois_apply(3).unwrap(), CycNum::from_int(7));
    }

    #[test]
    fn integrality_detection_uses_the_power_basis() {
        // golden ratio = −ζ_5² − ζ_5³
        let golden = -(zeta(5, 2) + zeta(5, 3));
        assert!(golden.is_cyclotomic_integer());
        let coords = golden.integer_coords().unwrap();
        assert_eq!(coords.len(), 4);
        let half = CycNum::from_rational(BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert!(!half.is_cyclotomic_integer());
        let x = zeta(7, 3) + zeta(7, 5) + zeta(7, 6);
        assert!(x.is_cyclotomic_integer());
    }

    #[test]
    fn conductor_reduction_is_canonical() {
        // ζ_6 lives in Q(ζ_3): ζ_6 = −ζ_3²
        let z6 = zeta(6, 1);
        assert_eq!(z6.conductor(), 3);
        assert_eq!(z6, -zeta(3, 2));
        // embedding then reducing is the identity
        let x = zeta(3, 1) + CycNum::from_int(2);
        let lifted = CycNum::from_coeffs(12, x.coeffs_at(12));
        assert_eq!(lifted, x);
        // ζ_4²·ζ_4² = 1 stays rational
        assert_eq!(zeta(4, 2) * zeta(4, 2), CycNum::one());
    }

    #[test]
    fn division_is_exact() {
        let a = CycNum::one() + zeta(5, 1);
        assert_eq!(a.checked_div(&a).unwrap(), CycNum::one());
        assert_eq!(CycNum::one().checked_div(&zeta(3, 1)).unwrap(), zeta(3, 2));
        assert!(matches!(
            a.checked_div(&CycNum::zero()),
            Err(CycError::DivisionByZero)
        ));
        // a · a⁻¹ for a denser element
        let b = CycNum::from_int(3) * zeta(7, 2) - zeta(7, 5) + CycNum::from_int(1);
        let inv = CycNum::one().checked_div(&b).unwrap();
        assert_eq!(b * inv, CycNum::one());
    }

    #[test]
    fn snap_recognizes_catalog_shapes() {
        // ζ_3 from its numeric value
        let z = CycNum::snap(Complex64::new(-0.5, 0.8660254), 3, 1).unwrap();
        assert_eq!(z, zeta(3, 1));
        // plain integer
        let six = CycNum::snap(Complex64::new(6.0, 0.0), 1, 1).unwrap();
        assert_eq!(six, CycNum::from_int(6));
        // ζ_5² + ζ_5³ ≈ −1.618…
        let g = CycNum::snap(Complex64::new(-1.6180339887, 0.0), 5, 1).unwrap();
        assert_eq!(g, zeta(5, 2) + zeta(5, 3));
        // period entry 3ζ_7³+3ζ_7⁵+3ζ_7⁶
        let want = CycNum::from_int(3) * (zeta(7, 3) + zeta(7, 5) + zeta(7, 6));
        let approx = want.to_complex();
        assert_eq!(CycNum::snap(approx, 7, 1).unwrap(), want);
        // absence
        assert!(CycNum::snap(Complex64::new(0.2345678, 1.1), 1, 1).is_none());
    }

    #[test]
    fn snap_round_trips_numerically() {
        let vals = [
            zeta(12, 1) + CycNum::from_int(2),
            CycNum::from_int(2) * (zeta(5, 1) + zeta(5, 4)),
            CycNum::from_rational(BigRational::new(BigInt::from(3), BigInt::from(2))),
        ];
        for v in vals {
            let snapped = CycNum::snap(v.to_complex(), 60, 2).unwrap();
            assert!((snapped.to_complex() - v.to_complex()).norm() <= 2.0 * EPS_SNAP);
        }
    }

    #[test]
    fn serialization_round_trips() {
        let x = CycNum::from_rational(BigRational::new(BigInt::from(-5), BigInt::from(3)))
            * zeta(8, 3)
            + CycNum::from_int(2);
        let s = x.serialize();
        assert_eq!(CycNum::parse(&s).unwrap(), x);
        // rationals serialize with k = 1
        let q = CycNum::from_rational(BigRational::new(BigInt::from(5), BigInt::from(2)));
        assert_eq!(q.serialize(), "1;5/2");
        assert_eq!(CycNum::parse("1; 5/2").unwrap(), q);
    }

    #[test]
    fn display_is_greppable() {
        let x = CycNum::from_int(3) * zeta(7, 5) + CycNum::from_int(2);
        assert_eq!(x.to_string(), "2 + 3*z7^5");
        assert_eq!(zeta(4, 1).to_string(), "z4");
        assert_eq!(CycNum::zero().to_string(), "0");
    }

    #[test]
    fn phi_and_divisors() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(420), 96);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(units_mod(8), vec![1, 3, 5, 7]);
    }
}
