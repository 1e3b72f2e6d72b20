mod common;

use std::f64::consts::PI;

use common::{rel_close, weighted_integral};
use pfem::jacobi::*;
use pfem::weighted::*;
use pfem::Error;

fn w(b: f64) -> WeightExponent {
    WeightExponent::new(b).unwrap()
}

#[test]
fn expansion_recovers_polynomial_coefficients() {
    let b = w(-0.4);
    let mut c = TensorCoeffs::zeros(b, 5);
    c.set(0, 0, 1.5);
    c.set(2, 3, -0.7);
    c.set(5, 1, 0.25);
    let e = expand(&|x, y| c.eval(x, y), b, 7, 9).unwrap();
    for i in 0..=7 {
        for j in 0..=7 {
            let want = if i <= 5 && j <= 5 { c.get(i, j) } else { 0.0 };
            assert!((e.get(i, j) - want).abs() < 1e-13, "({i},{j})");
        }
    }
}

#[test]
fn projection_is_idempotent_and_orthogonal() {
    let b = w(0.6);
    let f = |x: f64, y: f64| (x + 0.3 * y).exp() * (1.0 + y * y).recip();
    let full = expand(&f, b, 20, 30).unwrap();
    let p5 = project(&full, 5).unwrap();
    assert_eq!(project(&p5, 5).unwrap(), p5);
    // residual has no component of degree ≤ 5
    let resid = full.add_scaled(-1.0, &p5.padded(20)).unwrap();
    for i in 0..=5 {
        for j in 0..=5 {
            assert_eq!(resid.get(i, j), 0.0);
        }
    }
    assert!(project(&p5, 6).is_err());
}

#[test]
fn coefficient_norms_match_quadrature_and_oracle() {
    for &b in &[-0.6, 0.0, 0.6] {
        let beta = w(b);
        let fx = |x: f64| (1.3 * x).sin() + 0.2;
        let fy = |y: f64| (0.5 * y).exp();
        let dfx = |x: f64| 1.3 * (1.3 * x).cos();
        let dfy = |y: f64| 0.5 * (0.5 * y).exp();
        let full = expand(&|x, y| fx(x) * fy(y), beta, 30, 40).unwrap();
        let g = GradFn {
            value: |x: f64, y: f64| fx(x) * fy(y),
            gradient: |x: f64, y: f64| [dfx(x) * fy(y), fx(x) * dfy(y)],
        };
        // separable oracle
        let i0 = |h: &dyn Fn(f64) -> f64, e: f64| weighted_integral(e, &|t| h(t).powi(2));
        let l2 = i0(&fx, b) * i0(&fy, b);
        let h1 = l2 + i0(&dfx, b + 1.0) * i0(&fy, b) + i0(&fx, b) * i0(&dfy, b + 1.0);
        let q0 = weighted_norm_sq(&g, WeightSpec::plain(0, beta), 30).unwrap();
        let q1 = weighted_norm_sq(&g, WeightSpec::plain(1, beta), 30).unwrap();
        assert!(rel_close(q0, l2, 1e-12));
        assert!(rel_close(q1, h1, 1e-12));
        assert!(rel_close(
            coeff_norm_sq(&full, WeightSpec::plain(0, beta)).unwrap(),
            l2,
            1e-12
        ));
        assert!(rel_close(
            coeff_norm_sq(&full, WeightSpec::plain(1, beta)).unwrap(),
            h1,
            1e-10
        ));
        let semi = weighted_norm_sq(&g, WeightSpec::plain(1, beta).semi(), 30).unwrap();
        assert!(rel_close(semi, h1 - l2, 1e-12));
    }
}

#[test]
fn tilde_norm_uses_lowered_weights() {
    let beta = w(0.6);
    let g = GradFn {
        value: |x: f64, y: f64| x * y + 1.0,
        gradient: |x: f64, y: f64| [y, x],
    };
    let i = |e: f64, h: &dyn Fn(f64) -> f64| weighted_integral(e, &|t| h(t).powi(2));
    // the cross term 2xy integrates to zero
    let want = i(0.6, &|x| x) * i(0.6, &|y| y)
        + i(0.6, &|_| 1.0).powi(2)
        + i(-0.4, &|_| 1.0) * i(0.6, &|y| y)
        + i(0.6, &|x| x) * i(-0.4, &|_| 1.0);
    let got = weighted_norm_sq(&g, WeightSpec::tilde(1, beta), 6).unwrap();
    assert!(rel_close(got, want, 1e-12), "{got} vs {want}");
    let neg = weighted_norm_sq(&g, WeightSpec::tilde(1, w(-0.2)), 6);
    assert!(matches!(neg, Err(Error::Integrability(_))));
}

#[test]
fn traces_match_pointwise_values() {
    let b = w(-0.6);
    let full = expand(&|x, y| (PI * x).sin() * (2.0 * y).cos() + x * y, b, 12, 16).unwrap();
    for (edge, pt) in [
        (
            RefEdge::Bottom,
            (|t: f64| (t, -1.0)) as fn(f64) -> (f64, f64),
        ),
        (RefEdge::Top, |t| (t, 1.0)),
        (RefEdge::Left, |t| (-1.0, t)),
        (RefEdge::Right, |t| (1.0, t)),
    ] {
        let tr = trace_to_edge(&full, edge);
        for &t in &[-1.0, -0.4, 0.0, 0.8, 1.0] {
            let (x, y) = pt(t);
            assert!((tr.eval(t) - full.eval(x, y)).abs() < 1e-12);
        }
    }
}

#[test]
fn series_norm_and_derivative() {
    let b = w(0.2);
    let s = JacobiSeries::new(b, vec![0.5, -1.0, 0.25, 2.0]);
    let oracle = weighted_integral(0.2, &|t| s.eval(t).powi(2));
    assert!(rel_close(s.norm().powi(2), oracle, 1e-12));
    let h = 1e-6;
    let fd = (s.eval(0.3 + h) - s.eval(0.3 - h)) / (2.0 * h);
    assert!((fd - s.eval_deriv(0.3)).abs() < 1e-7);
    assert_eq!(s.degree(), 3);
}

#[test]
fn rejects_bad_requests() {
    let b = w(0.0);
    assert!(matches!(
        expand(&|_, _| 1.0, b, 10, 8),
        Err(Error::Parameter(_))
    ));
    assert!(weighted_norm(&ValueFn(|_, _| 1.0), WeightSpec::plain(2, b), 4).is_err());
    assert!(weighted_norm(&ValueFn(|_, _| 1.0), WeightSpec::plain(1, b), 4).is_err());
    assert!(TensorCoeffs::from_vec(b, 2, vec![0.0; 5]).is_err());
}
