//! Least squares via Householder QR with column pivoting.
//!
//! Full-rank problems are solved by back substitution on `R`. When the
//! numerical rank `r` is below the column count, the leading `r` rows of `R`
//! are factored again from the right (a complete orthogonal decomposition)
//! so the returned solution has minimum Euclidean norm.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    pub rank: usize,
    /// Sum of squared residuals `||A x - b||^2`.
    pub residual_ss: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Householder reflector for `x`: returns `(v, beta, alpha)` with
/// `(I - beta v v^T) x = alpha e_0`, or `None` when `x` is zero.
fn householder<T: Real>(x: &[T]) -> Option<(Vec<T>, T, T)> {
    let norm = dot(x, x).sqrt();
    if norm == T::zero() {
        return None;
    }
    let alpha = if x[0] > T::zero() { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vv = dot(&v, &v);
    if vv == T::zero() {
        return None;
    }
    Some((v, T::lit(2.0) / vv, alpha))
}

fn reflect<T: Real>(v: &[T], beta: T, y: &mut [T]) {
    let s = beta * dot(v, y);
    for (yi, &vi) in y.iter_mut().zip(v) {
        *yi -= s * vi;
    }
}

/// Solves `min ||A x - b||` for `A` given as `m` rows of width `n`.
///
/// Columns whose pivot falls below `max(m, n) * eps * |R_00|` are treated as
/// dependent.
pub fn lstsq<T: Real>(rows: &[&[T]], b: &[T]) -> LstsqSolution<T> {
    let m = rows.len();
    assert_eq!(b.len(), m, "right-hand side length mismatch");
    let n = rows.first().map_or(0, |r| r.len());
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut qtb = b.to_vec();
    let steps = m.min(n);
    let mut diag = Vec::with_capacity(steps);

    for k in 0..steps {
        let (p, _) = (k..n)
            .map(|j| (j, dot(&cols[j][k..], &cols[j][k..])))
            .fold((k, T::neg_infinity()), |acc, v| if v.1 > acc.1 { v } else { acc });
        cols.swap(k, p);
        perm.swap(k, p);
        match householder(&cols[k][k..]) {
            None => {
                diag.push(T::zero());
                break;
            }
            Some((v, beta, alpha)) => {
                for col in cols.iter_mut().skip(k + 1) {
                    reflect(&v, beta, &mut col[k..]);
                }
                reflect(&v, beta, &mut qtb[k..]);
                cols[k][k] = alpha;
                cols[k][k + 1..].iter_mut().for_each(|c| *c = T::zero());
                diag.push(alpha);
            }
        }
    }

    let tol = diag.first().map_or(T::zero(), |d| d.abs())
        * T::epsilon()
        * T::from_usize_lossy(m.max(n));
    let rank = diag.iter().take_while(|d| d.abs() > tol).count();
    let residual_ss = qtb[rank..].iter().map(|&v| v * v).sum();
    let c = &qtb[..rank];
    let r_at = |i: usize, j: usize| cols[j][i];

    let y: Vec<T> = if rank == n {
        let mut y = vec![T::zero(); n];
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| r_at(i, j) * y[j]).sum();
            y[i] = (c[i] - s) / r_at(i, i);
        }
        y
    } else {
        // factor R_top^T (n x r) = Z L, then R_top = L^T Z^T
        let mut t: Vec<Vec<T>> = (0..rank).map(|i| (0..n).map(|j| r_at(i, j)).collect()).collect();
        let mut reflectors = Vec::with_capacity(rank);
        for k in 0..rank {
            let h = householder(&t[k][k..]);
            if let Some((v, beta, alpha)) = h.clone() {
                for col in t.iter_mut().skip(k + 1) {
                    reflect(&v, beta, &mut col[k..]);
                }
                t[k][k] = alpha;
            }
            reflectors.push(h);
        }
        // L^T u = c, with L[i][j] = t[j][i] for i <= j
        let mut u = vec![T::zero(); rank];
        for i in 0..rank {
            let s: T = (0..i).map(|j| t[i][j] * u[j]).sum();
            u[i] = (c[i] - s) / t[i][i];
        }
        let mut y = u;
        y.resize(n, T::zero());
        for (k, h) in reflectors.iter().enumerate().rev() {
            if let Some((v, beta, _)) = h {
                reflect(v, *beta, &mut y[k..]);
            }
        }
        y
    };

    let mut x = vec![T::zero(); n];
    for (j, &pj) in perm.iter().enumerate() {
        x[pj] = y[j];
    }
    LstsqSolution { x, rank, residual_ss }
}
