//! Floating-point helpers for the hybrid eigen pipeline: Aberth–Ehrlich root
//! finding on the exact characteristic polynomial and complex kernel vectors
//! with inverse-iteration refinement. Nothing here affects soundness — every
//! candidate is verified exactly downstream.

use num::complex::Complex64;

/// Simultaneous root iteration for a monic polynomial given by ascending
/// coefficients (`coeffs[n] = 1`). Returns `None` when the iteration fails to
/// settle, which sends the caller to the exact fallback.
pub fn aberth_roots(coeffs: &[f64], max_iters: usize) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            df = df * z + f;
            f = f * z + c;
        }
        (f, df)
    };
    // Cauchy-style inclusion radius
    let mut radius: f64 = 0.0;
    for (i, &c) in coeffs.iter().enumerate().take(n) {
        if c != 0.0 {
            radius = radius.max(c.abs().powf(1.0 / (n - i) as f64));
        }
    }
    radius = 2.0 * radius.max(1.0);
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64 + 0.376) / n as f64;
            Complex64::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    for _ in 0..max_iters {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (f, df) = eval(z[i]);
            if !f.re.is_finite() || !f.im.is_finite() {
                return None;
            }
            let newton = if df.norm() > 1e-300 {
                f / df
            } else {
                Complex64::new(1e-3, 1e-3)
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() < 1e-300 {
                        return None;
                    }
                    repulsion += Complex64::new(1.0, 0.0) / d;
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-14 {
            return Some(z);
        }
    }
    Some(z)
}

/// A vector spanning the (numerically) most singular direction of `m`:
/// Gaussian elimination with partial pivoting, treating the weakest pivot
/// column as free.
pub fn kernel_vector(m: &[Vec<Complex64>]) -> Option<Vec<Complex64>> {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    let mut weakest: Option<(f64, usize)> = None;
    for col in 0..n {
        // partial pivot
        let (best_row, best_val) = (row..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if best_val < 1e-9 {
            match weakest {
                Some((w, _)) if w <= best_val => {}
                _ => weakest = Some((best_val, col)),
            }
            continue;
        }
        a.swap(row, best_row);
        let inv = Complex64::new(1.0, 0.0) / a[row][col];
        for c in col..n {
            a[row][c] *= inv;
        }
        for r in 0..n {
            if r != row {
                let f = a[r][col];
                if f.norm() > 0.0 {
                    for c in col..n {
                        let delta = f * a[row][c];
                        a[r][c] -= delta;
                    }
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let free_col = match weakest {
        Some((_, c)) => c,
        None => return None,
    };
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[free_col] = Complex64::new(1.0, 0.0);
    for (r, &pc) in pivot_cols.iter().enumerate() {
        if pc < free_col {
            v[pc] = -a[r][free_col];
        }
    }
    // normalize
    let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return None;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Some(v)
}

/// Solve `a x = b` by LU with partial pivoting; used for inverse iteration.
pub fn solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let (best, val) = (col..n)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if val < 1e-300 {
            return None;
        }
        m.swap(col, best);
        let inv = Complex64::new(1.0, 0.0) / m[col][col];
        for c in col..=n {
            m[col][c] *= inv;
        }
        for r in 0..n {
            if r != col && m[r][col].norm() > 0.0 {
                let f = m[r][col];
                for c in col..=n {
                    let delta = f * m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some((0..n).map(|r| m[r][n]).collect())
}

/// Refine an approximate eigenvector by inverse iteration around `lambda`.
pub fn refine_eigenvector(
    m: &[Vec<Complex64>],
    lambda: Complex64,
    v: &mut Vec<Complex64>,
    rounds: usize,
) {
    let n = m.len();
    let shift = lambda + Complex64::new(1e-10, 1e-10);
    let shifted: Vec<Vec<Complex64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| m[r][c] - if r == c { shift } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    for _ in 0..rounds {
        if let Some(w) = solve(&shifted, v) {
            let norm: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-300 && norm.is_finite() {
                *v = w.into_iter().map(|x| x / norm).collect();
                continue;
            }
        }
        break;
    }
}

/// Rayleigh quotient `v* A v / v* v`.
pub fn rayleigh(a: &[Vec<i64>], v: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut av = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..n {
        for c in 0..n {
            if a[r][c] != 0 {
                av[r] += Complex64::new(a[r][c] as f64, 0.0) * v[c];
            }
        }
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0f64;
    for i in 0..n {
        num += v[i].conj() * av[i];
        den += v[i].norm_sqr();
    }
    num / den
}
