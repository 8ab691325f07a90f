//! Perron-Frobenius dimensions.
//!
//! The regular representation `R = Σ_i L_i` has strictly positive entries
//! (every `k` occurs in `i⊗j` for `i = k⊗j*`), so power iteration on it
//! converges geometrically to the common PF eigenvector `d`. Each `d_i` is then
//! read off as the eigenvalue of `L_i` on `d`. Iterating each `L_i` on its own
//! can stall when `L_i` is reducible or its spectral gap is tiny (large `k`).

use serde::Serialize;

use super::{FusionError, FusionRing};

pub const PF_THRESHOLD: f64 = 1e-12;
pub const PF_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumDims {
    labels: Vec<String>,
    values: Vec<f64>,
    pub iterations: usize,
}

impl QuantumDims {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i])
    }

    /// `Σ d_i²`.
    pub fn global_dim(&self) -> f64 {
        self.values.iter().map(|d| d * d).sum()
    }
}

pub fn pf_dimensions(ring: &FusionRing) -> Result<QuantumDims, FusionError> {
    let n = ring.rank();
    let mut reg = vec![0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                reg[k * n + j] += f64::from(ring.n(i, j, k));
            }
        }
    }
    let mut v = vec![1f64; n];
    let mut iterations = 0;
    loop {
        if iterations >= PF_MAX_ITERATIONS {
            return Err(FusionError::NonConvergence { label: ring.label(0).to_string(), iterations });
        }
        iterations += 1;
        let mut w: Vec<f64> = (0..n).map(|k| (0..n).map(|j| reg[k * n + j] * v[j]).sum()).collect();
        let top = w.iter().cloned().fold(0.0, f64::max);
        if top <= 0.0 || !top.is_finite() {
            return Err(FusionError::NonConvergence { label: ring.label(0).to_string(), iterations });
        }
        w.iter_mut().for_each(|x| *x /= top);
        let delta = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if delta < PF_THRESHOLD {
            break;
        }
    }
    let total: f64 = v.iter().sum();
    let values = (0..n)
        .map(|i| {
            let image: f64 = (0..n)
                .map(|k| (0..n).map(|j| f64::from(ring.n(i, j, k)) * v[j]).sum::<f64>())
                .sum();
            image / total
        })
        .collect::<Vec<_>>();
    // Normalize so the unit has dimension exactly one.
    let u = values[ring.unit()];
    let values = values.into_iter().map(|d| d / u).collect();
    Ok(QuantumDims { labels: ring.labels().to_vec(), values, iterations })
}
