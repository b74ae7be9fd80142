use crate::scalar::Real;

/// Orthonormal DCT-II as an explicit `n_out x n_in` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Dct2<T> {
    n_in: usize,
    n_out: usize,
    basis: Vec<T>,
}

impl<T: Real> Dct2<T> {
    /// Keeps the first `n_out` of `n_in` coefficients.
    pub fn new(n_in: usize, n_out: usize) -> Self {
        assert!(n_out <= n_in && n_in > 0);
        let mut basis = Vec::with_capacity(n_in * n_out);
        for k in 0..n_out {
            let scale = if k == 0 {
                (1.0 / n_in as f64).sqrt()
            } else {
                (2.0 / n_in as f64).sqrt()
            };
            for n in 0..n_in {
                let a = std::f64::consts::PI * k as f64 * (2 * n + 1) as f64 / (2 * n_in) as f64;
                basis.push(T::lit(scale * a.cos()));
            }
        }
        Self { n_in, n_out, basis }
    }

    pub fn basis_row(&self, k: usize) -> &[T] {
        &self.basis[k * self.n_in..(k + 1) * self.n_in]
    }

    pub fn transform(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_in);
        (0..self.n_out)
            .map(|k| self.basis_row(k).iter().zip(x).map(|(&b, &v)| b * v).sum())
            .collect()
    }
}
