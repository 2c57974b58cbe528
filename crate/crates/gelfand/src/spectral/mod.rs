//! The algebraic half of the pair invariant: exact eigencharacters of the
//! commutative convolution algebra, the triple (A, B, C) with its involutions,
//! idempotent reconstruction and the septuple consistency report.
//!
//! The working pipeline is hybrid: a seeded random combination of the left
//! convolution matrices is diagonalized numerically, candidate eigenvalues are
//! snapped to cyclotomic numbers and every snapped character is verified by
//! exact resubstitution. Soundness never rests on floating point — failed
//! verification escalates through refinement retries into a fully exact
//! p-adic eigensolver, which also serves as the independent oracle.

mod exact;
mod numeric;

pub use exact::{char_poly, eval_cyc_poly, is_squarefree, kernel_basis, roots_in_cyclotomic};

use std::fmt::Write as _;

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclo::{euler_phi, lcm_u64, CycNum};
use crate::scheme::OrbitalScheme;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("pair is not Gelfand: convolution is noncommutative")]
    NotGelfand,
    #[error("snap failure: {0}")]
    SnapFailure(String),
    #[error("conductor candidate search passed its bound (exponent bound {bound})")]
    ConductorExceeded { bound: u128 },
    #[error("triple invariants violated: {0:?}")]
    Invalid(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Tunables of the eigen pipeline. The defaults match the shipped reports.
#[derive(Clone, Debug)]
pub struct SpectralConfig {
    /// Denominator bound handed to `CycNum::snap` (eigenvalues are algebraic
    /// integers, so 1 suffices).
    pub denom_bound: u64,
    /// Skip conductor candidates with φ(d) above this.
    pub phi_cap: u64,
    /// Skip conductor candidates above this outright.
    pub conductor_cap: u64,
    /// Numeric attempts before falling back to the exact engine; retries
    /// increase the refinement effort.
    pub numeric_attempts: usize,
    /// Separating-combination retries inside the exact engine.
    pub exact_combo_attempts: usize,
    /// Cap on the p-adic choice-tuple space per conductor.
    pub tuple_cap: u64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            denom_bound: 1,
            phi_cap: 96,
            conductor_cap: 10_000,
            numeric_attempts: 5,
            exact_combo_attempts: 8,
            tuple_cap: 1 << 21,
        }
    }
}

/// One eigencharacter of the scheme algebra: the exact eigenvalue of each
/// left convolution operator `L_s`, plus the multiplicity `B_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenColumn {
    pub values: Vec<CycNum>,
    pub multiplicity: BigInt,
}

impl EigenColumn {
    fn sort_key(&self) -> (BigInt, Vec<String>) {
        (
            self.multiplicity.clone(),
            self.values.iter().map(|v| v.serialize()).collect(),
        )
    }
}

// ---------------------------------------------------------------------------
// eigen splitting
// ---------------------------------------------------------------------------

/// Divisors d of `bound` worth trying as snap conductors, smallest fields
/// first; conductors ≡ 2 (mod 4) are redundant and skipped.
fn conductor_candidates(bound: u128, cfg: &SpectralConfig) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for d in 1..=cfg.conductor_cap {
        if d > 2 && d % 4 == 2 {
            continue;
        }
        if d == 2 {
            continue;
        }
        if bound % d as u128 != 0 {
            continue;
        }
        if euler_phi(d) > cfg.phi_cap {
            continue;
        }
        out.push(d);
    }
    out.sort_by_key(|&d| (euler_phi(d), d));
    out
}

fn combo_coefficients(rank: usize, attempt: usize) -> Vec<i64> {
    let mut state: u64 = 0x9e3779b97f4a7c15 ^ (attempt as u64).wrapping_mul(0xbf58476d1ce4e5b9);
    (0..rank)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            1 + ((state >> 33) % 17) as i64
        })
        .collect()
}

/// Exact verification and multiplicity extraction for a candidate character.
///
/// The reconstructed idempotent has coordinates `conj(p_t)/a_t` on the orbital
/// basis; the candidate passes iff it is a common eigenvector of every `L_s`
/// with the claimed eigenvalues.
fn column_from_values(
    scheme: &OrbitalScheme,
    values: Vec<CycNum>,
) -> Result<EigenColumn, String> {
    let r = scheme.rank();
    let sizes = scheme.suborbit_sizes();
    let x = scheme.degree();
    if values.len() != r {
        return Err("wrong column length".into());
    }
    if !values[0].is_one() {
        return Err("eigenvalue at the diagonal class must be 1".into());
    }
    let v: Vec<CycNum> = (0..r)
        .map(|t| {
            let inv_a = BigRational::new(BigInt::one(), BigInt::from(sizes[t] as i64));
            values[t].conjugate() * CycNum::from_rational(inv_a)
        })
        .collect();
    for s in 1..r {
        for t in 0..r {
            let mut acc = CycNum::zero();
            for j in 0..r {
                let a = scheme.a(s, j, t);
                if a != 0 {
                    acc = acc + CycNum::from_int(a) * &v[j];
                }
            }
            if acc != &values[s] * &v[t] {
                return Err(format!("candidate fails L_{} at row {}", s + 1, t + 1));
            }
        }
    }
    // B_j = (Σ_s p_s conj(p_s)/A_s)⁻¹
    let mut inv_b = CycNum::zero();
    for s in 0..r {
        let inv_a = BigRational::new(BigInt::one(), BigInt::from((x * sizes[s]) as i64));
        inv_b = inv_b + &values[s] * &values[s].conjugate() * CycNum::from_rational(inv_a);
    }
    let inv_b = inv_b
        .as_rational()
        .ok_or_else(|| "norm sum is not rational".to_string())?;
    if inv_b.is_zero() || inv_b.is_negative() {
        return Err("nonpositive norm sum".into());
    }
    let b = inv_b.recip();
    if !b.denom().is_one() {
        return Err(format!("multiplicity {} is not an integer", b));
    }
    Ok(EigenColumn {
        values,
        multiplicity: b.numer().clone(),
    })
}

fn trivial_column(scheme: &OrbitalScheme) -> EigenColumn {
    let values: Vec<CycNum> = scheme
        .suborbit_sizes()
        .iter()
        .map(|&s| CycNum::from_int(s as i64))
        .collect();
    column_from_values(scheme, values).expect("the all-ones character is always valid")
}

fn finish_columns(
    scheme: &OrbitalScheme,
    mut cols: Vec<EigenColumn>,
) -> Result<Vec<EigenColumn>, String> {
    let r = scheme.rank();
    for i in 0..cols.len() {
        for j in (i + 1)..cols.len() {
            if cols[i].values == cols[j].values {
                return Err("duplicate eigencharacter".into());
            }
        }
    }
    if cols.len() != r {
        return Err(format!("found {} of {} characters", cols.len(), r));
    }
    let total: BigInt = cols.iter().map(|c| c.multiplicity.clone()).sum();
    if total != BigInt::from(scheme.degree() as i64) {
        return Err(format!(
            "multiplicities sum to {} instead of |X| = {}",
            total,
            scheme.degree()
        ));
    }
    let trivial = trivial_column(scheme);
    let pos = cols
        .iter()
        .position(|c| c.values == trivial.values)
        .ok_or_else(|| "trivial character missing".to_string())?;
    let lead = cols.remove(pos);
    cols.sort_by_key(|c| c.sort_key());
    let mut out = vec![lead];
    out.extend(cols);
    Ok(out)
}

fn numeric_attempt(
    scheme: &OrbitalScheme,
    lmats: &[Vec<Vec<i64>>],
    conductors: &[u64],
    attempt: usize,
    cfg: &SpectralConfig,
) -> Result<Vec<EigenColumn>, String> {
    let r = scheme.rank();
    let combo = combo_coefficients(r, attempt);
    let mut m_int = vec![vec![0i64; r]; r];
    for s in 1..r {
        for t in 0..r {
            for j in 0..r {
                m_int[t][j] += combo[s] * lmats[s][t][j];
            }
        }
    }
    let f = char_poly(&m_int);
    if !is_squarefree(&f) {
        return Err("combination is not separating".into());
    }
    let coeffs_f64: Vec<f64> = f
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
        .collect();
    if coeffs_f64.iter().any(|c| !c.is_finite()) {
        return Err("characteristic polynomial overflows f64".into());
    }
    let roots = numeric::aberth_roots(&coeffs_f64, 150 * (attempt + 1))
        .ok_or_else(|| "root iteration failed".to_string())?;
    let m_c: Vec<Vec<Complex64>> = m_int
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| Complex64::new(v as f64, 0.0))
                .collect()
        })
        .collect();
    let mut cols = Vec::with_capacity(r);
    for &root in &roots {
        let shifted: Vec<Vec<Complex64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        m_c[i][j]
                            - if i == j {
                                root
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                    })
                    .collect()
            })
            .collect();
        let mut v = numeric::kernel_vector(&shifted)
            .ok_or_else(|| "no numeric kernel vector".to_string())?;
        numeric::refine_eigenvector(&m_c, root, &mut v, 1 + attempt);
        let mut values = Vec::with_capacity(r);
        values.push(CycNum::one());
        let mut preferred: Option<u64> = None;
        for lm in lmats.iter().take(r).skip(1) {
            let approx = numeric::rayleigh(lm, &v);
            let mut snapped = None;
            if let Some(d) = preferred {
                snapped = CycNum::snap(approx, d, cfg.denom_bound);
            }
            if snapped.is_none() {
                for &d in conductors {
                    if let Some(c) = CycNum::snap(approx, d, cfg.denom_bound) {
                        preferred = Some(d);
                        snapped = Some(c);
                        break;
                    }
                }
            }
            let c = snapped.ok_or_else(|| {
                format!("could not snap eigenvalue near {:.6}+{:.6}i", approx.re, approx.im)
            })?;
            values.push(c);
        }
        cols.push(column_from_values(scheme, values)?);
    }
    finish_columns(scheme, cols)
}

/// Exact eigencharacters via the p-adic engine: characteristic polynomial of a
/// seeded separating combination, roots in `Z[ζ_c]` for divisor conductors, and
/// exact kernels over the cyclotomic field. No floating point anywhere.
pub fn eigen_split_exact_with(
    scheme: &OrbitalScheme,
    cfg: &SpectralConfig,
) -> Result<Vec<EigenColumn>, SpectralError> {
    if !scheme.is_gelfand() {
        return Err(SpectralError::NotGelfand);
    }
    let r = scheme.rank();
    if r == 1 {
        return Ok(vec![trivial_column(scheme)]);
    }
    let lmats: Vec<Vec<Vec<i64>>> = (0..r).map(|s| scheme.l_matrix(s)).collect();
    let bound = scheme.pair().group().exponent_bound();
    let conductors = conductor_candidates(bound, cfg);
    let mut last: Option<SpectralError> = None;
    for attempt in 0..cfg.exact_combo_attempts {
        let combo = combo_coefficients(r, 1000 + attempt);
        let mut m_int = vec![vec![0i64; r]; r];
        for s in 1..r {
            for t in 0..r {
                for j in 0..r {
                    m_int[t][j] += combo[s] * lmats[s][t][j];
                }
            }
        }
        let f = char_poly(&m_int);
        if !is_squarefree(&f) {
            last = Some(SpectralError::SnapFailure(
                "no separating combination found".into(),
            ));
            continue;
        }
        // crude eigenvalue bound: max absolute row sum
        let radius: i64 = m_int
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<i64>())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut roots: Vec<CycNum> = Vec::new();
        for &c in &conductors {
            if roots.len() == r {
                break;
            }
            let coeff_bound = BigInt::from(radius) * BigInt::from(c.max(4)) * BigInt::from(4);
            match exact::roots_in_cyclotomic(&f, c, &coeff_bound, cfg.tuple_cap) {
                Some(found) => {
                    for root in found {
                        if !roots.contains(&root) {
                            roots.push(root);
                        }
                    }
                }
                None => continue, // tuple space too large or no usable prime
            }
        }
        if roots.len() < r {
            last = Some(SpectralError::ConductorExceeded { bound });
            continue;
        }
        let mut cols = Vec::with_capacity(r);
        let mut failed = None;
        for theta in &roots {
            let shifted: Vec<Vec<CycNum>> = (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            let base = CycNum::from_int(m_int[i][j]);
                            if i == j {
                                base - theta
                            } else {
                                base
                            }
                        })
                        .collect()
                })
                .collect();
            let ker = exact::kernel_basis(&shifted);
            if ker.len() != 1 {
                failed = Some(format!(
                    "kernel dimension {} for a separating eigenvalue",
                    ker.len()
                ));
                break;
            }
            let v = &ker[0];
            let pivot = v
                .iter()
                .position(|c| !c.is_zero())
                .expect("kernel vector is nonzero");
            let mut values = Vec::with_capacity(r);
            for lm in lmats.iter().take(r) {
                let mut acc = CycNum::zero();
                for j in 0..r {
                    if lm[pivot][j] != 0 {
                        acc = acc + CycNum::from_int(lm[pivot][j]) * &v[j];
                    }
                }
                values.push(acc.checked_div(&v[pivot]).expect("pivot is nonzero"));
            }
            match column_from_values(scheme, values) {
                Ok(col) => cols.push(col),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            last = Some(SpectralError::SnapFailure(e));
            continue;
        }
        match finish_columns(scheme, cols) {
            Ok(out) => return Ok(out),
            Err(e) => {
                last = Some(SpectralError::SnapFailure(e));
                continue;
            }
        }
    }
    Err(last.unwrap_or(SpectralError::ConductorExceeded { bound }))
}

pub fn eigen_split_exact(scheme: &OrbitalScheme) -> Result<Vec<EigenColumn>, SpectralError> {
    eigen_split_exact_with(scheme, &SpectralConfig::default())
}

/// The hybrid pipeline: numeric candidates with exact verification, escalating
/// refinement on snap failure, then the exact engine as a last resort.
pub fn eigen_split_with(
    scheme: &OrbitalScheme,
    cfg: &SpectralConfig,
) -> Result<Vec<EigenColumn>, SpectralError> {
    if !scheme.is_gelfand() {
        return Err(SpectralError::NotGelfand);
    }
    let r = scheme.rank();
    if r == 1 {
        return Ok(vec![trivial_column(scheme)]);
    }
    let lmats: Vec<Vec<Vec<i64>>> = (0..r).map(|s| scheme.l_matrix(s)).collect();
    let bound = scheme.pair().group().exponent_bound();
    let conductors = conductor_candidates(bound, cfg);
    for attempt in 0..cfg.numeric_attempts {
        if let Ok(cols) = numeric_attempt(scheme, &lmats, &conductors, attempt, cfg) {
            return Ok(cols);
        }
    }
    eigen_split_exact_with(scheme, cfg)
}

pub fn eigen_split(scheme: &OrbitalScheme) -> Result<Vec<EigenColumn>, SpectralError> {
    eigen_split_with(scheme, &SpectralConfig::default())
}

// ---------------------------------------------------------------------------
// the character triple
// ---------------------------------------------------------------------------

/// Raw triple payload, before invariant validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleData {
    pub x_size: usize,
    pub a: Vec<BigRational>,
    pub b: Vec<BigRational>,
    pub c: Vec<Vec<CycNum>>,
    pub mu: Vec<usize>,
    pub pi: Vec<usize>,
}

/// The complete invariant of a Gelfand pair: positive vectors A and B, the
/// exact matrix C and the two index involutions, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTriple {
    data: TripleData,
    conductor: u64,
    ratios_integral: bool,
}

impl CharacterTriple {
    pub fn from_data(data: TripleData) -> Result<Self, SpectralError> {
        let violations = invariant_violations(&data);
        if !violations.is_empty() {
            return Err(SpectralError::Invalid(violations));
        }
        let mut conductor = 1u64;
        let mut ratios_integral = true;
        for (s, row) in data.c.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                conductor = lcm_u64(conductor, entry.conductor());
                let ratio = entry
                    .checked_div(&CycNum::from_rational(data.b[j].clone()))
                    .expect("B entries are positive");
                if !ratio.is_cyclotomic_integer() {
                    ratios_integral = false;
                }
                let _ = s;
            }
        }
        Ok(CharacterTriple {
            data,
            conductor,
            ratios_integral,
        })
    }

    pub fn data(&self) -> &TripleData {
        &self.data
    }

    pub fn x_size(&self) -> usize {
        self.data.x_size
    }

    pub fn rank(&self) -> usize {
        self.data.a.len()
    }

    /// Minimal conductor containing every entry of C.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn a(&self) -> &[BigRational] {
        &self.data.a
    }

    pub fn b(&self) -> &[BigRational] {
        &self.data.b
    }

    pub fn c(&self) -> &[Vec<CycNum>] {
        &self.data.c
    }

    pub fn entry(&self, i: usize, j: usize) -> &CycNum {
        &self.data.c[i][j]
    }

    pub fn mu(&self) -> &[usize] {
        &self.data.mu
    }

    pub fn pi(&self) -> &[usize] {
        &self.data.pi
    }

    /// Suborbit sizes `a_i = A_i/|X|` as integers.
    pub fn suborbit_sizes(&self) -> Vec<BigInt> {
        let x = BigInt::from(self.data.x_size as i64);
        self.data
            .a
            .iter()
            .map(|a| (a / BigRational::from_integer(x.clone())).to_integer())
            .collect()
    }

    /// Whether every `C_{sj}/B_j` is a cyclotomic integer. True for every
    /// triple arising from a pair; may fail for duals of non-integral triples.
    pub fn ratios_integral(&self) -> bool {
        self.ratios_integral
    }

    /// Eigenvalue matrix column `p_{·j} = C_{·j}/B_j`.
    pub fn eigen_column(&self, j: usize) -> Vec<CycNum> {
        let b = CycNum::from_rational(self.data.b[j].clone());
        self.data
            .c
            .iter()
            .map(|row| row[j].checked_div(&b).unwrap())
            .collect()
    }

    /// Text serialization: header, A row, B row, C rows, μ and π.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "X {} k {} r {}",
            self.data.x_size,
            self.conductor,
            self.rank()
        )
        .unwrap();
        let rats = |v: &[BigRational]| -> String {
            v.iter()
                .map(|q| {
                    if q.denom().is_one() {
                        q.numer().to_string()
                    } else {
                        format!("{}/{}", q.numer(), q.denom())
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "A {}", rats(&self.data.a)).unwrap();
        writeln!(out, "B {}", rats(&self.data.b)).unwrap();
        for row in &self.data.c {
            let entries: Vec<String> = row.iter().map(|e| e.serialize()).collect();
            writeln!(out, "C {}", entries.join(" ")).unwrap();
        }
        let perm = |p: &[usize]| -> String {
            p.iter()
                .map(|&i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "mu {}", perm(&self.data.mu)).unwrap();
        writeln!(out, "pi {}", perm(&self.data.pi)).unwrap();
        out
    }

    /// Parse the serialization back into raw data (validate separately).
    pub fn parse(text: &str) -> Result<TripleData, SpectralError> {
        let bad = |msg: &str| SpectralError::Parse(msg.to_string());
        let mut x_size = None;
        let mut a = None;
        let mut b = None;
        let mut c: Vec<Vec<CycNum>> = Vec::new();
        let mut mu = None;
        let mut pi = None;
        let parse_rats = |s: &str| -> Result<Vec<BigRational>, SpectralError> {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<BigRational>()
                        .map_err(|_| SpectralError::Parse(format!("bad rational {:?}", t)))
                })
                .collect()
        };
        let parse_perm = |s: &str| -> Result<Vec<usize>, SpectralError> {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| SpectralError::Parse(format!("bad index {:?}", t)))
                        .and_then(|v| {
                            if v == 0 {
                                Err(SpectralError::Parse("indices are 1-based".into()))
                            } else {
                                Ok(v - 1)
                            }
                        })
                })
                .collect()
        };
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("X ") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 5 || toks[1] != "k" || toks[3] != "r" {
                    return Err(bad("malformed header"));
                }
                x_size = Some(toks[0].parse().map_err(|_| bad("bad |X|"))?);
            } else if let Some(rest) = line.strip_prefix("A ") {
                a = Some(parse_rats(rest)?);
            } else if let Some(rest) = line.strip_prefix("B ") {
                b = Some(parse_rats(rest)?);
            } else if let Some(rest) = line.strip_prefix("C ") {
                let row: Result<Vec<CycNum>, _> = rest
                    .split_whitespace()
                    .map(|t| {
                        CycNum::parse(t).map_err(|e| SpectralError::Parse(e.to_string()))
                    })
                    .collect();
                c.push(row?);
            } else if let Some(rest) = line.strip_prefix("mu ") {
                mu = Some(parse_perm(rest)?);
            } else if let Some(rest) = line.strip_prefix("pi ") {
                pi = Some(parse_perm(rest)?);
            } else {
                return Err(SpectralError::Parse(format!("unknown line {:?}", raw)));
            }
        }
        Ok(TripleData {
            x_size: x_size.ok_or_else(|| bad("missing header"))?,
            a: a.ok_or_else(|| bad("missing A row"))?,
            b: b.ok_or_else(|| bad("missing B row"))?,
            c,
            mu: mu.ok_or_else(|| bad("missing mu"))?,
            pi: pi.ok_or_else(|| bad("missing pi"))?,
        })
    }
}

/// All violated triple identities, by name; empty for a valid triple.
pub fn invariant_violations(d: &TripleData) -> Vec<String> {
    let mut out = Vec::new();
    let r = d.a.len();
    let x = BigRational::from_integer(BigInt::from(d.x_size as i64));
    if d.b.len() != r || d.c.len() != r || d.c.iter().any(|row| row.len() != r) {
        out.push("dimension mismatch".to_string());
        return out;
    }
    if d.mu.len() != r || d.pi.len() != r {
        out.push("involution length mismatch".to_string());
        return out;
    }
    if d.a.iter().any(|v| !v.is_positive()) || d.b.iter().any(|v| !v.is_positive()) {
        out.push("A and B must be positive".to_string());
    }
    // E:ABfromC
    for i in 0..r {
        let want = CycNum::from_rational(&d.a[i] / &x);
        if d.c[i][0] != want {
            out.push(format!("A[{}] != |X|·C[{},1]", i + 1, i + 1));
        }
    }
    for j in 0..r {
        if d.c[0][j] != CycNum::from_rational(d.b[j].clone()) {
            out.push(format!("B[{}] != C[1,{}]", j + 1, j + 1));
        }
    }
    // row and column sums
    for i in 0..r {
        let sum = d.c[i]
            .iter()
            .fold(CycNum::zero(), |acc, e| acc + e.clone());
        let want = if i == 0 {
            CycNum::from_rational(x.clone())
        } else {
            CycNum::zero()
        };
        if sum != want {
            out.push(format!("row sum {} violates E:csecondeq1", i + 1));
        }
    }
    for j in 0..r {
        let mut sum = CycNum::zero();
        for i in 0..r {
            sum = sum + d.c[i][j].clone();
        }
        let want = if j == 0 {
            CycNum::from_rational(x.clone())
        } else {
            CycNum::zero()
        };
        if sum != want {
            out.push(format!("column sum {} violates E:cfirsteq", j + 1));
        }
    }
    // orthogonality
    for k in 0..r {
        for l in 0..r {
            let mut acc = CycNum::zero();
            for i in 0..r {
                let inv_a = CycNum::from_rational(d.a[i].recip());
                acc = acc + inv_a * &d.c[i][k] * d.c[i][l].conjugate();
            }
            let want = if k == l {
                CycNum::from_rational(d.b[k].clone())
            } else {
                CycNum::zero()
            };
            if acc != want {
                out.push(format!("orthogonality (E:compatibility) fails at ({},{})", k + 1, l + 1));
            }
        }
    }
    for i in 0..r {
        for j in 0..r {
            let mut acc = CycNum::zero();
            for s in 0..r {
                let inv_b = CycNum::from_rational(d.b[s].recip());
                acc = acc + inv_b * &d.c[i][s] * d.c[j][s].conjugate();
            }
            let want = if i == j {
                CycNum::from_rational(d.a[i].clone())
            } else {
                CycNum::zero()
            };
            if acc != want {
                out.push(format!("orthogonality (E:secondeq) fails at ({},{})", i + 1, j + 1));
            }
        }
    }
    // involutions
    let is_perm = |p: &[usize]| {
        let mut seen = vec![false; r];
        p.iter().all(|&v| {
            if v < r && !seen[v] {
                seen[v] = true;
                true
            } else {
                false
            }
        })
    };
    if !is_perm(&d.mu) || !is_perm(&d.pi) {
        out.push("mu/pi are not permutations".to_string());
        return out;
    }
    for i in 0..r {
        if d.mu[d.mu[i]] != i {
            out.push("mu is not an involution".to_string());
            break;
        }
    }
    for j in 0..r {
        if d.pi[d.pi[j]] != j {
            out.push("pi is not an involution".to_string());
            break;
        }
    }
    for i in 0..r {
        if d.a[d.mu[i]] != d.a[i] {
            out.push(format!("A[{}] != A[mu({})]", i + 1, i + 1));
        }
    }
    for j in 0..r {
        if d.b[d.pi[j]] != d.b[j] {
            out.push(format!("B[{}] != B[pi({})]", j + 1, j + 1));
        }
    }
    for i in 0..r {
        for j in 0..r {
            if d.c[i][d.pi[j]] != d.c[i][j].conjugate() {
                out.push(format!("C[{},pi({})] != conj(C[{},{}])", i + 1, j + 1, i + 1, j + 1));
            }
            if d.c[d.mu[i]][j] != d.c[i][j].conjugate() {
                out.push(format!("C[mu({}),{}] != conj(C[{},{}])", i + 1, j + 1, i + 1, j + 1));
            }
        }
    }
    out
}

/// Assemble the validated triple of a Gelfand scheme.
pub fn build_triple(scheme: &OrbitalScheme) -> Result<CharacterTriple, SpectralError> {
    build_triple_with(scheme, &SpectralConfig::default())
}

pub fn build_triple_with(
    scheme: &OrbitalScheme,
    cfg: &SpectralConfig,
) -> Result<CharacterTriple, SpectralError> {
    let cols = eigen_split_with(scheme, cfg)?;
    let r = scheme.rank();
    let x = scheme.degree();
    let a: Vec<BigRational> = scheme
        .suborbit_sizes()
        .iter()
        .map(|&s| BigRational::from_integer(BigInt::from((x * s) as i64)))
        .collect();
    let b: Vec<BigRational> = cols
        .iter()
        .map(|c| BigRational::from_integer(c.multiplicity.clone()))
        .collect();
    let mut c_mat = vec![vec![CycNum::zero(); r]; r];
    for (j, col) in cols.iter().enumerate() {
        let bj = CycNum::from_rational(b[j].clone());
        for s in 0..r {
            c_mat[s][j] = &col.values[s] * &bj;
        }
    }
    // π matches each column with its conjugate column
    let mut pi = vec![usize::MAX; r];
    for j in 0..r {
        let conj: Vec<CycNum> = cols[j].values.iter().map(|v| v.conjugate()).collect();
        let partner = cols
            .iter()
            .position(|c| c.values == conj)
            .ok_or_else(|| {
                SpectralError::Invalid(vec![format!(
                    "no conjugate partner for eigencolumn {}",
                    j + 1
                )])
            })?;
        pi[j] = partner;
    }
    let triple = CharacterTriple::from_data(TripleData {
        x_size: x,
        a,
        b,
        c: c_mat,
        mu: scheme.mu().to_vec(),
        pi,
    })?;
    if !triple.ratios_integral() {
        return Err(SpectralError::Invalid(vec![
            "scheme-derived eigenvalues must be cyclotomic integers".to_string(),
        ]));
    }
    Ok(triple)
}

// ---------------------------------------------------------------------------
// idempotent reconstruction and the septuple report
// ---------------------------------------------------------------------------

/// Change-of-basis matrices between the orbital basis and the convolution
/// idempotents, exact and mutually inverse.
#[derive(Clone, Debug)]
pub struct IdempotentBases {
    /// `psi_in_x[s][j] = conj(C_{sj})/A_s`: column j holds Ψ_j on the X basis.
    pub psi_in_x: Vec<Vec<CycNum>>,
    /// `x_in_psi[s][j] = C_{sj}/B_j`: row s holds X_s on the Ψ basis.
    pub x_in_psi: Vec<Vec<CycNum>>,
}

pub fn reconstruct_idempotents(t: &CharacterTriple) -> IdempotentBases {
    let r = t.rank();
    let mut psi_in_x = vec![vec![CycNum::zero(); r]; r];
    let mut x_in_psi = vec![vec![CycNum::zero(); r]; r];
    for s in 0..r {
        let inv_a = CycNum::from_rational(t.a()[s].recip());
        for j in 0..r {
            psi_in_x[s][j] = t.entry(s, j).conjugate() * &inv_a;
            x_in_psi[s][j] = t
                .entry(s, j)
                .checked_div(&CycNum::from_rational(t.b()[j].clone()))
                .unwrap();
        }
    }
    // D·E = I exactly: Σ_j psi_in_x[s][j] · x_in_psi[t][j] = δ_{st}
    for s in 0..r {
        for tt in 0..r {
            let mut acc = CycNum::zero();
            for j in 0..r {
                acc = acc + &psi_in_x[s][j] * &x_in_psi[tt][j];
            }
            let want = if s == tt { CycNum::one() } else { CycNum::zero() };
            assert_eq!(acc, want, "change-of-basis matrices are not inverse");
        }
    }
    IdempotentBases { psi_in_x, x_in_psi }
}

/// Verify Ψ_j × Ψ_j = Ψ_j through the intersection numbers.
pub fn check_idempotency(scheme: &OrbitalScheme, t: &CharacterTriple) -> Result<(), String> {
    let r = t.rank();
    let bases = reconstruct_idempotents(t);
    for j in 0..r {
        let d: Vec<&CycNum> = (0..r).map(|s| &bases.psi_in_x[s][j]).collect();
        for target in 0..r {
            let mut acc = CycNum::zero();
            for i in 0..r {
                if d[i].is_zero() {
                    continue;
                }
                for s in 0..r {
                    let a = scheme.a(i, s, target);
                    if a != 0 {
                        acc = acc + CycNum::from_int(a) * d[i] * d[s];
                    }
                }
            }
            if &acc != d[target] {
                return Err(format!(
                    "Ψ_{} fails idempotency at orbital {}",
                    j + 1,
                    target + 1
                ));
            }
        }
    }
    Ok(())
}

/// Normalization constants recovered from the triple alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeptupleReport {
    pub n: BigRational,
    pub k: BigRational,
    pub x: BigRational,
}

/// Recompute tr-normalization constants from C and check the septuple
/// identities; lists every violated identity on failure.
pub fn validate_septuple(d: &TripleData) -> Result<SeptupleReport, Vec<String>> {
    let mut errs = Vec::new();
    let r = d.a.len();
    if d.c.len() != r || d.c.iter().any(|row| row.len() != r) {
        return Err(vec!["dimension mismatch".to_string()]);
    }
    let x = BigRational::from_integer(BigInt::from(d.x_size as i64));
    // N = tr_×(1_·)/|X| with 1_· = Σ_s X_s and tr_× X_s = Σ_j C_{sj}
    let mut total = CycNum::zero();
    for row in &d.c {
        for e in row {
            total = total + e.clone();
        }
    }
    let n = match total.as_rational() {
        Some(t) => t / x.clone(),
        None => {
            return Err(vec!["trace sum is not rational".to_string()]);
        }
    };
    // tr_·(1_·) = Σ_s C_{s1}; tr_×(1_×) = Σ_j C_{1j}/|X|
    let col1 = d
        .c
        .iter()
        .fold(CycNum::zero(), |acc, row| acc + row[0].clone());
    let row1 = d.c[0]
        .iter()
        .fold(CycNum::zero(), |acc, e| acc + e.clone());
    let (Some(tr_dot), Some(row1)) = (col1.as_rational(), row1.as_rational()) else {
        return Err(vec!["unit traces are not rational".to_string()]);
    };
    let tr_times = row1 / x.clone();
    let k = &tr_dot * &tr_times;
    if n.is_zero() {
        errs.push("N = 0".to_string());
        return Err(errs);
    }
    if &k / (&n * &n) != x {
        errs.push("|X| != K/N^2".to_string());
    }
    if &k / &n != tr_dot {
        errs.push("tr_dot(1_dot) != K/N".to_string());
    }
    if tr_times != n {
        errs.push("tr_times(1_times) != N".to_string());
    }
    if d.c[0][0] != CycNum::one() {
        errs.push("C[1,1] != 1".to_string());
    }
    for i in 0..r {
        if CycNum::from_rational(&d.a[i] / &x) != d.c[i][0] {
            errs.push(format!("A[{}] != |X| C[{},1] (E:cacbrelspec)", i + 1, i + 1));
        }
    }
    for j in 0..r {
        if CycNum::from_rational(d.b[j].clone()) != d.c[0][j] {
            errs.push(format!("B[{}] != C[1,{}] (E:cacbrelspec)", j + 1, j + 1));
        }
    }
    if errs.is_empty() {
        Ok(SeptupleReport {
            n,
            k,
            x: x.clone(),
        })
    } else {
        Err(errs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{cyclic_group, symmetric_group, GroupPair, PermGroup, Permutation};

    fn scheme_of(g: PermGroup) -> OrbitalScheme {
        OrbitalScheme::build(&GroupPair::new(g, 0).unwrap())
    }

    fn wreath_s2_s2() -> OrbitalScheme {
        let gens = vec![
            Permutation::parse_cycles("(1 2)", 4).unwrap(),
            Permutation::parse_cycles("(3 4)", 4).unwrap(),
            Permutation::parse_cycles("(1 3)(2 4)", 4).unwrap(),
        ];
        scheme_of(PermGroup::from_generators(4, gens).unwrap())
    }

    #[test]
    fn symmetric_pair_eigen_split() {
        let scheme = scheme_of(symmetric_group(7));
        let cols = eigen_split(&scheme).unwrap();
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].values, vec![CycNum::one(), CycNum::from_int(6)]);
        assert_eq!(cols[0].multiplicity, BigInt::from(1));
        assert_eq!(cols[1].values, vec![CycNum::one(), CycNum::from_int(-1)]);
        assert_eq!(cols[1].multiplicity, BigInt::from(6));
    }

    #[test]
    fn regular_z3_characters() {
        let scheme = scheme_of(cyclic_group(3));
        let cols = eigen_split(&scheme).unwrap();
        assert_eq!(cols.len(), 3);
        for col in &cols {
            assert_eq!(col.multiplicity, BigInt::from(1));
        }
        let z = CycNum::root_of_unity(3, 1);
        let zz = CycNum::root_of_unity(3, 2);
        assert!(cols.iter().any(|c| c.values == vec![CycNum::one(), z.clone(), zz.clone()]));
        assert!(cols.iter().any(|c| c.values == vec![CycNum::one(), zz.clone(), z.clone()]));
    }

    #[test]
    fn symmetric_triple_is_l7() {
        let scheme = scheme_of(symmetric_group(7));
        let t = build_triple(&scheme).unwrap();
        assert_eq!(t.x_size(), 7);
        assert_eq!(t.conductor(), 1);
        assert_eq!(t.entry(0, 0), &CycNum::one());
        assert_eq!(t.entry(0, 1), &CycNum::from_int(6));
        assert_eq!(t.entry(1, 0), &CycNum::from_int(6));
        assert_eq!(t.entry(1, 1), &CycNum::from_int(-6));
        assert!(t.ratios_integral());
    }

    #[test]
    fn wreath_triple_matches_m22() {
        let t = build_triple(&wreath_s2_s2()).unwrap();
        let want: Vec<Vec<i64>> = vec![vec![1, 1, 2], vec![1, 1, -2], vec![2, -2, 0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.entry(i, j), &CycNum::from_int(want[i][j]));
            }
        }
    }

    #[test]
    fn exact_engine_agrees_with_hybrid() {
        for scheme in [
            scheme_of(symmetric_group(5)),
            scheme_of(cyclic_group(5)),
            scheme_of(cyclic_group(8)),
            wreath_s2_s2(),
        ] {
            let hybrid = eigen_split(&scheme).unwrap();
            let exact = eigen_split_exact(&scheme).unwrap();
            assert_eq!(hybrid, exact);
        }
    }

    #[test]
    fn not_gelfand_is_refused() {
        let pair = GroupPair::regular(&symmetric_group(3)).unwrap();
        let scheme = OrbitalScheme::build(&pair);
        assert!(matches!(
            eigen_split(&scheme),
            Err(SpectralError::NotGelfand)
        ));
    }

    #[test]
    fn idempotent_reconstruction() {
        let scheme = scheme_of(symmetric_group(7));
        let t = build_triple(&scheme).unwrap();
        let bases = reconstruct_idempotents(&t);
        // Ψ_2 = (6/7)·X_1 − (1/7)·X_2
        let frac = |n: i64, d: i64| {
            CycNum::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
        };
        assert_eq!(bases.psi_in_x[0][1], frac(6, 7));
        assert_eq!(bases.psi_in_x[1][1], frac(-1, 7));
        check_idempotency(&scheme, &t).unwrap();
        // trivial idempotent Ψ_1 = (1/|X|)·Σ_s X_s
        for s in 0..t.rank() {
            assert_eq!(bases.psi_in_x[s][0], frac(1, 7));
        }
    }

    #[test]
    fn septuple_report_and_fault_detection() {
        let scheme = scheme_of(symmetric_group(7));
        let t = build_triple(&scheme).unwrap();
        let report = validate_septuple(t.data()).unwrap();
        assert_eq!(report.n, BigRational::from_integer(BigInt::from(1)));
        assert_eq!(report.k, BigRational::from_integer(BigInt::from(7)));
        // scaled triple must be caught
        let mut bad = t.data().clone();
        for row in bad.c.iter_mut() {
            for e in row.iter_mut() {
                *e = e.clone() * CycNum::from_int(2);
            }
        }
        assert!(validate_septuple(&bad).is_err());
        assert!(!invariant_violations(&bad).is_empty());
    }

    #[test]
    fn serialization_round_trips() {
        let scheme = scheme_of(cyclic_group(4));
        let t = build_triple(&scheme).unwrap();
        let text = t.serialize();
        let parsed = CharacterTriple::parse(&text).unwrap();
        let rebuilt = CharacterTriple::from_data(parsed).unwrap();
        assert_eq!(&rebuilt, &t);
    }

    #[test]
    fn rank_one_pair() {
        let scheme = scheme_of(cyclic_group(1));
        let t = build_triple(&scheme).unwrap();
        assert_eq!(t.rank(), 1);
        assert_eq!(t.entry(0, 0), &CycNum::one());
    }
}
