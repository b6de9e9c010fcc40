//! Dense-matrix reference simulator. Independent of the factorized kernels:
//! the mixer is exponentiated as a full 2^n x 2^n matrix.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Matrix = Vec<Complex64>;

pub fn identity(dim: usize) -> Matrix {
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        m[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Matrix, b: &Matrix, dim: usize) -> Matrix {
    let mut c = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                c[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    c
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    let dim = v.len();
    (0..dim).map(|i| (0..dim).map(|j| a[i * dim + j] * v[j]).sum()).collect()
}

/// `exp(a)` by scaling and squaring with a Taylor series.
pub fn expm(a: &Matrix, dim: usize) -> Matrix {
    let norm: f64 = (0..dim).map(|i| (0..dim).map(|j| a[i * dim + j].norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let scale = Complex64::new(f64::powi(2.0, -s), 0.0);
    let scaled: Matrix = a.iter().map(|x| x * scale).collect();
    let mut result = identity(dim);
    let mut term = identity(dim);
    for k in 1..30 {
        term = matmul(&term, &scaled, dim);
        let inv = Complex64::new(1.0 / k as f64, 0.0);
        term.iter_mut().for_each(|x| *x *= inv);
        result.iter_mut().zip(&term).for_each(|(r, t)| *r += t);
    }
    for _ in 0..s {
        result = matmul(&result, &result, dim);
    }
    result
}

/// `H_B = -Σ_q σ^x_q` as a dense matrix.
pub fn mixer_hamiltonian(n: usize) -> Matrix {
    let dim = 1 << n;
    let mut h = vec![Complex64::new(0.0, 0.0); dim * dim];
    for b in 0..dim {
        for q in 0..n {
            h[b * dim + (b ^ (1 << q))] += Complex64::new(-1.0, 0.0);
        }
    }
    h
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary(h: &Matrix, t: f64, dim: usize) -> Matrix {
    let a: Matrix = h.iter().map(|x| x * Complex64::new(0.0, -t)).collect();
    expm(&a, dim)
}

pub fn diag(values: &[f64]) -> Matrix {
    let dim = values.len();
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (i, &v) in values.iter().enumerate() {
        m[i * dim + i] = Complex64::new(v, 0.0);
    }
    m
}

/// Full QAOA state from per-layer diagonal energies.
pub fn dense_evolve(n: usize, layer_energies: &[Vec<f64>], gammas: &[f64], betas: &[f64]) -> Vec<Complex64> {
    let dim = 1 << n;
    let hb = mixer_hamiltonian(n);
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let mut psi = vec![amp; dim];
    for m in 0..gammas.len() {
        let ud = unitary(&diag(&layer_energies[m]), gammas[m], dim);
        psi = matvec(&ud, &psi);
        let um = unitary(&hb, betas[m], dim);
        psi = matvec(&um, &psi);
    }
    psi
}
