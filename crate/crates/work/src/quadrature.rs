//! Trapezoid quadrature on unions of windows around Gaussian centers.

use qwork_core::scalar::{lit, Real};

/// Nodes and weights of a composite trapezoid rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature<T: Real> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Quadrature<T> {
    /// Covers `[c - reach, c + reach]` for every center `c` with overlapping
    /// windows merged; each merged window is sampled at spacing `≤ step`.
    pub fn around(centers: &[T], reach: T, step: T) -> Self {
        assert!(reach > T::zero() && step > T::zero(), "reach and step must be positive");
        let mut sorted: Vec<T> = centers.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite centers"));
        let mut windows: Vec<(T, T)> = Vec::new();
        for c in sorted {
            let (lo, hi) = (c - reach, c + reach);
            match windows.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => windows.push((lo, hi)),
            }
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (lo, hi) in windows {
            let count = to_usize(((hi - lo) / step).ceil()).max(1);
            let h = (hi - lo) / lit(count as f64);
            for k in 0..=count {
                nodes.push(lo + h * lit(k as f64));
                let end = k == 0 || k == count;
                weights.push(if end { h * lit(0.5) } else { h });
            }
        }
        Self { nodes, weights }
    }

    /// Uniform rule on `[lo, hi]` with `points ≥ 2` nodes.
    pub fn uniform(lo: T, hi: T, points: usize) -> Self {
        assert!(points >= 2 && hi > lo, "need at least two nodes on a proper interval");
        let h = (hi - lo) / lit((points - 1) as f64);
        let nodes = (0..points).map(|k| lo + h * lit(k as f64)).collect();
        let weights = (0..points)
            .map(|k| if k == 0 || k + 1 == points { h * lit(0.5) } else { h })
            .collect();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

fn to_usize<T: Real>(x: T) -> usize {
    x.to_usize().unwrap_or(1)
}
