//! Discrete Fourier transforms.
//!
//! Power-of-two lengths use an iterative radix-2 kernel; every other length
//! goes through Bluestein's chirp-z reduction onto a power-of-two kernel.
//! [`RealFft`] packs a real sequence of even length `n` into a complex
//! sequence of length `n / 2` and returns the non-negative half spectrum.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

fn twiddle(num: usize, den: usize) -> Complex64 {
    // exp(-2 pi i num / den)
    let theta = -2.0 * PI * (num as f64) / (den as f64);
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|k| twiddle(k, n)).collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Radix2 { n, twiddles, bitrev }
    }

    fn forward(&self, data: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for j in 0..half {
                    let w = self.twiddles[j * stride];
                    let a = data[start + j];
                    let b = data[start + j + half] * w;
                    data[start + j] = a + b;
                    data[start + j + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    inner: Radix2,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // exp(-i pi j^2 / n); j^2 reduced mod 2n keeps the angle small.
        let chirp: Vec<Complex64> = (0..n)
            .map(|j| {
                let r = (j * j) % (2 * n);
                let theta = -PI * (r as f64) / (n as f64);
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for j in 1..n {
            kernel[j] = chirp[j].conj();
            kernel[m - j] = chirp[j].conj();
        }
        inner.forward(&mut kernel);
        Bluestein {
            n,
            chirp,
            kernel_hat: kernel,
            inner,
        }
    }

    fn forward(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let m = self.inner.n;
        scratch.clear();
        scratch.resize(m, Complex64::new(0.0, 0.0));
        for j in 0..self.n {
            scratch[j] = data[j] * self.chirp[j];
        }
        self.inner.forward(scratch);
        for (s, k) in scratch.iter_mut().zip(self.kernel_hat.iter()) {
            *s = (*s * k).conj();
        }
        // inverse via conjugation
        self.inner.forward(scratch);
        let scale = 1.0 / m as f64;
        for k in 0..self.n {
            data[k] = scratch[k].conj() * scale * self.chirp[k];
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// Unnormalized complex DFT of a fixed length.
#[derive(Debug, Clone)]
pub struct ComplexFft {
    n: usize,
    kernel: Kernel,
    scratch: Vec<Complex64>,
}

impl ComplexFft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be positive");
        let kernel = if n.is_power_of_two() {
            Kernel::Radix2(Radix2::new(n))
        } else {
            Kernel::Bluestein(Bluestein::new(n))
        };
        ComplexFft {
            n,
            kernel,
            scratch: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = sum_j x_j exp(-2 pi i j k / n)`, in place.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        match &self.kernel {
            Kernel::Radix2(r) => r.forward(data),
            Kernel::Bluestein(b) => b.forward(data, &mut self.scratch),
        }
    }

    /// `x_j = sum_k X_k exp(+2 pi i j k / n)`, in place (no `1/n` factor).
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        for v in data.iter_mut() {
            *v = v.conj();
        }
        self.forward(data);
        for v in data.iter_mut() {
            *v = v.conj();
        }
    }
}

/// Real-to-half-complex transform of even length `n`.
///
/// `forward` returns normalized coefficients `c_k = X_k / n` for
/// `k = 0..=n/2`, so that `x_j = sum_k c_k exp(2 pi i j k / n)` over the full
/// Hermitian-extended spectrum. `inverse` is the exact left inverse.
#[derive(Debug, Clone)]
pub struct RealFft {
    n: usize,
    half: ComplexFft,
    twiddles: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl RealFft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n.is_multiple_of(2), "real transform length must be even");
        let m = n / 2;
        RealFft {
            n,
            half: ComplexFft::new(m),
            twiddles: (0..=m).map(|k| twiddle(k, n)).collect(),
            buf: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spectrum_len(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn forward(&mut self, input: &[f64], output: &mut [Complex64]) {
        let m = self.n / 2;
        assert_eq!(input.len(), self.n);
        assert_eq!(output.len(), m + 1);
        for j in 0..m {
            self.buf[j] = Complex64::new(input[2 * j], input[2 * j + 1]);
        }
        self.half.forward(&mut self.buf);
        let scale = 1.0 / self.n as f64;
        for (k, out) in output.iter_mut().enumerate().take(m + 1) {
            let zk = self.buf[k % m];
            let zc = self.buf[(m - k) % m].conj();
            let even = (zk + zc) * 0.5;
            let odd = (zk - zc) * Complex64::new(0.0, -0.5);
            *out = (even + self.twiddles[k] * odd) * scale;
        }
    }

    pub fn inverse(&mut self, input: &[Complex64], output: &mut [f64]) {
        let m = self.n / 2;
        assert_eq!(input.len(), m + 1);
        assert_eq!(output.len(), self.n);
        for k in 0..m {
            let xk = input[k];
            let xc = input[m - k].conj();
            let even = (xk + xc) * 0.5;
            let odd = (xk - xc) * 0.5 * self.twiddles[k].conj();
            self.buf[k] = even + Complex64::new(0.0, 1.0) * odd;
        }
        self.half.inverse(&mut self.buf);
        for j in 0..m {
            output[2 * j] = 2.0 * self.buf[j].re;
            output[2 * j + 1] = 2.0 * self.buf[j].im;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * twiddle((j * k) % n, n))
                    .sum()
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let t = j as f64;
                Complex64::new(libm::sin(0.37 * t + 0.1 * t * t), libm::cos(1.3 * t) - 0.2)
            })
            .collect()
    }

    #[test]
    fn complex_matches_naive_for_several_lengths() {
        for &n in &[1usize, 2, 4, 6, 8, 12, 15, 16, 30, 64, 100] {
            let x = sample(n);
            let expected = naive_dft(&x);
            let mut got = x.clone();
            let mut fft = ComplexFft::new(n);
            fft.forward(&mut got);
            for (a, b) in got.iter().zip(expected.iter()) {
                assert!((a - b).norm() < 1e-10 * n as f64, "n = {n}");
            }
            fft.inverse(&mut got);
            for (a, b) in got.iter().zip(x.iter()) {
                assert!((a / n as f64 - b).norm() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn real_matches_naive_and_round_trips() {
        for &n in &[8usize, 10, 12, 24, 64, 90] {
            let x: Vec<f64> = sample(n).iter().map(|c| c.re + 0.5 * c.im).collect();
            let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let expected = naive_dft(&xc);
            let mut fft = RealFft::new(n);
            let mut spec = vec![Complex64::new(0.0, 0.0); fft.spectrum_len()];
            fft.forward(&x, &mut spec);
            for k in 0..=n / 2 {
                assert!((spec[k] * n as f64 - expected[k]).norm() < 1e-10, "n = {n}, k = {k}");
            }
            let mut back = vec![0.0; n];
            fft.inverse(&spec, &mut back);
            for (a, b) in back.iter().zip(x.iter()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }
}
