//! Hierarchical one-dimensional shape functions.
//!
//! Index 0 and 1 are the linear nodal functions `(1-x)/2` and `(1+x)/2`;
//! index `k ≥ 2` is the integrated Legendre bubble
//! `b_k = (P_k - P_{k-2}) / sqrt(2(2k-1))`, which vanishes at both ends and
//! satisfies `b_k(-x) = (-1)^k b_k(x)`.

use crate::jacobi::{jacobi_all_unchecked, symmetric_deriv_all};

/// Values and first two derivatives of shapes `0..=p` at one abscissa.
#[derive(Debug, Clone)]
pub struct ShapeTable {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub fn shapes_1d(p: usize, x: f64) -> ShapeTable {
    let n = p + 1;
    let mut leg = vec![0.0; n.max(2)];
    let mut dleg = vec![0.0; n.max(2)];
    let mut ddleg = vec![0.0; n.max(2)];
    jacobi_all_unchecked(0.0, 0.0, x, &mut leg);
    symmetric_deriv_all(0.0, 1, x, &mut dleg);
    symmetric_deriv_all(0.0, 2, x, &mut ddleg);

    let mut value = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    value[0] = 0.5 * (1.0 - x);
    d1[0] = -0.5;
    if n > 1 {
        value[1] = 0.5 * (1.0 + x);
        d1[1] = 0.5;
    }
    for k in 2..n {
        let s = 1.0 / (2.0 * (2.0 * k as f64 - 1.0)).sqrt();
        value[k] = s * (leg[k] - leg[k - 2]);
        d1[k] = s * (dleg[k] - dleg[k - 2]);
        d2[k] = s * (ddleg[k] - ddleg[k - 2]);
    }
    // exact zeros at the end points keep vertex values clean
    if x.abs() == 1.0 {
        for v in value.iter_mut().skip(2) {
            *v = 0.0;
        }
    }
    ShapeTable { value, d1, d2 }
}

/// Shape tables at every node of a rule.
pub fn tabulate(p: usize, nodes: &[f64]) -> Vec<ShapeTable> {
    nodes.iter().map(|&x| shapes_1d(p, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubbles_vanish_at_ends() {
        for &x in &[-1.0, 1.0] {
            let t = shapes_1d(10, x);
            assert!(t.value[2..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn bubble_parity() {
        let a = shapes_1d(9, 0.37);
        let b = shapes_1d(9, -0.37);
        for k in 2..=9 {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a.value[k] - s * b.value[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_bubble_is_scaled_legendre() {
        // b_k' = P_{k-1} · sqrt((2k-1)/2)
        let x = 0.3;
        let t = shapes_1d(6, x);
        let mut leg = vec![0.0; 7];
        jacobi_all_unchecked(0.0, 0.0, x, &mut leg);
        for k in 2..=6 {
            let expect = leg[k - 1] * ((2.0 * k as f64 - 1.0) / 2.0).sqrt();
            assert!((t.d1[k] - expect).abs() < 1e-13);
        }
    }
}
