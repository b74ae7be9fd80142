//! Iterative radix-2 FFT and a real-input front end built on a half-length
//! complex transform.

use num_complex::Complex;

use crate::scalar::Real;

/// Precomputed plan for a complex radix-2 transform of length `n`.
#[derive(Clone, Debug)]
pub struct Fft<T> {
    n: usize,
    twiddles: Vec<Complex<T>>,
    bitrev: Vec<usize>,
}

impl<T: Real> Fft<T> {
    /// # Panics
    /// If `n` is not a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        // twiddles are computed in f64 regardless of T
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Complex::new(T::lit(a.cos()), T::lit(a.sin()))
            })
            .collect();
        Self {
            n,
            twiddles,
            bitrev,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Forward transform, `X_k = sum_j x_j e^{-2 pi i jk/n}`, in place.
    pub fn forward(&self, data: &mut [Complex<T>]) {
        assert_eq!(data.len(), self.n, "FFT buffer length mismatch");
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let stride = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Real-input transform of even power-of-two length `n`, computed with one
/// complex FFT of length `n/2` plus an untangling pass.
#[derive(Clone, Debug)]
pub struct RealFft<T> {
    n: usize,
    half: Fft<T>,
    untangle: Vec<Complex<T>>,
}

impl<T: Real> RealFft<T> {
    /// # Panics
    /// If `n` is not a power of two of at least 2.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n.is_power_of_two(), "real FFT length {n} must be a power of two >= 2");
        let untangle = (0..=n / 2)
            .map(|k| {
                let a = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Complex::new(T::lit(a.cos()), T::lit(a.sin()))
            })
            .collect();
        Self {
            n,
            half: Fft::new(n / 2),
            untangle,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Bins `0..=n/2` of the DFT of `frame`, zero-padded to `n`.
    pub fn spectrum(&self, frame: &[T]) -> Vec<Complex<T>> {
        assert!(frame.len() <= self.n, "frame longer than FFT length");
        let m = self.n / 2;
        let at = |i: usize| frame.get(i).copied().unwrap_or_else(T::zero);
        let mut z: Vec<Complex<T>> = (0..m).map(|k| Complex::new(at(2 * k), at(2 * k + 1))).collect();
        self.half.forward(&mut z);

        let half = T::lit(0.5);
        (0..=m)
            .map(|k| {
                let zk = z[k % m];
                let zc = z[(m - k) % m].conj();
                let even = (zk + zc) * half;
                // (zk - zc) / 2i
                let odd = (zk - zc) * Complex::new(T::zero(), -half);
                even + self.untangle[k] * odd
            })
            .collect()
    }

    /// `|X_k|^2` for `k = 0..=n/2`.
    pub fn power_spectrum(&self, frame: &[T]) -> Vec<T> {
        self.spectrum(frame).into_iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Power spectrum of a (windowed) frame zero-padded to `n_fft`.
pub fn power_spectrum<T: Real>(frame: &[T], n_fft: usize) -> Vec<T> {
    RealFft::new(n_fft).power_spectrum(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (j, &v)| {
                    let a = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex::new(a.cos(), a.sin())
                })
            })
            .collect()
    }

    fn max_rel_err(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        let scale = b.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
    }

    #[test]
    fn complex_fft_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 4, 8, 64, 256, 1024] {
            let x: Vec<Complex<f64>> = (0..n)
                .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let mut fast = x.clone();
            Fft::new(n).forward(&mut fast);
            assert!(max_rel_err(&fast, &brute_dft(&x)) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn real_fft_matches_brute_force_with_zero_padding() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (len, n) in [(2usize, 2usize), (5, 8), (560, 1024), (1000, 1024)] {
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let padded: Vec<Complex<f64>> =
                (0..n).map(|i| Complex::new(x.get(i).copied().unwrap_or(0.0), 0.0)).collect();
            let want = brute_dft(&padded);
            let got = RealFft::new(n).spectrum(&x);
            assert!(max_rel_err(&got, &want[..=n / 2]) < 1e-9, "len={len} n={n}");
        }
    }

    #[test]
    fn zero_frame_gives_zero_spectrum() {
        assert!(power_spectrum(&[0.0f64; 400], 512).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn cosine_on_bin_concentrates_power() {
        let n = 256;
        let k0 = 19;
        let x: Vec<f64> = (0..n)
            .map(|j| (2.0 * std::f64::consts::PI * (k0 * j) as f64 / n as f64).cos())
            .collect();
        let p = power_spectrum(&x, n);
        let peak = p[k0];
        let argmax = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        assert_eq!(argmax, k0);
        for (k, &v) in p.iter().enumerate() {
            if k.abs_diff(k0) > 1 {
                assert!(v < 1e-10 * peak, "bin {k}: {v}");
            }
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        let x: Vec<f64> = (0..512).map(|j| ((j * 37 % 101) as f64 / 50.0) - 1.0).collect();
        let x32: Vec<f32> = x.iter().map(|&v| v as f32).collect();
        let p64 = power_spectrum(&x, 512);
        let p32 = power_spectrum(&x32, 512);
        let scale = p64.iter().cloned().fold(0.0, f64::max);
        for (a, b) in p64.iter().zip(&p32) {
            assert!((a - f64::from(*b)).abs() < 1e-4 * scale);
        }
    }
}
