mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::One;
use switchcert::basis::{
    power_vector, random_k_copy_basis, single_copy_basis, span_dimension, span_residual, three_copy_basis,
    two_copy_basis, unitary_k_copy_basis, unitary_span_dimension, ChannelBasis,
};
use switchcert::channels::{is_cp, is_tp, kraus_to_choi, random_channel};
use switchcert::exact::{rank_rational, Q};

#[test]
fn span_dimensions() {
    assert_eq!(span_dimension(13, 1), 13);
    assert_eq!(span_dimension(13, 2), 91);
    assert_eq!(span_dimension(13, 3), 455);
    assert_eq!(span_dimension(13, 4), 1820);
    assert_eq!(span_dimension(1, 5), 1);
    assert_eq!((1..=3).map(unitary_span_dimension).collect::<Vec<_>>(), vec![10, 35, 84]);
}

/// Numerical rank of the k-th tensor powers (SVD with relative cutoff).
fn float_rank(b: &ChannelBasis) -> usize {
    let cols: Vec<DVector<Complex64>> = b.elements.iter().map(|j| power_vector(j, b.copies)).collect();
    let sv = DMatrix::from_columns(&cols).singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

fn assert_exact_tp(b: &ChannelBasis) {
    for m in b.exact.as_ref().expect("exact entries") {
        let red = m.partial_trace(&["out"]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let z = &red.data()[(r, c)];
                let want = if r == c { Q::one() } else { Q::from_integer(0.into()) };
                assert!(z.re == want && z.im == Q::from_integer(0.into()));
            }
        }
        for z in m.data().iter() {
            for x in [&z.re, &z.im] {
                let den = x.denom().clone();
                assert!(den == 1.into() || den == 2.into(), "denominator {den}");
            }
        }
    }
}

fn universality(b: &ChannelBasis, trials: usize) {
    let cols: Vec<DVector<Complex64>> = b.elements.iter().map(|j| power_vector(j, b.copies)).collect();
    let q = DMatrix::from_columns(&cols).qr().q();
    let mut r = rng(20 + b.copies as u64);
    for _ in 0..trials {
        let ch = random_channel(2, 2, 4, &mut r).unwrap().with_labels("in", "out").unwrap();
        let t = power_vector(&kraus_to_choi(&ch).unwrap(), b.copies);
        let res = (&t - &q * (q.adjoint() * &t)).norm() / t.norm();
        assert!(res < 1e-8, "residual {res}");
    }
}

#[test]
fn single_copy_family() {
    let b = single_copy_basis();
    assert_eq!(b.span_dim(), 13);
    assert_exact_tp(&b);
    // exact rank over the rationals of the vectorized real and imaginary parts
    let rows: Vec<Vec<Q>> = b
        .exact
        .as_ref()
        .unwrap()
        .iter()
        .map(|m| m.data().iter().flat_map(|z| [z.re.clone(), z.im.clone()]).collect())
        .collect();
    assert_eq!(rank_rational(&rows), 13);
    assert_eq!(float_rank(&b), 13);
    universality(&b, 20);
}

#[test]
fn two_copy_family() {
    let b = two_copy_basis().unwrap();
    assert_eq!(b.span_dim(), 91);
    assert_exact_tp(&b);
    assert_eq!(float_rank(&b), 91);
    universality(&b, 20);
}

#[test]
fn three_copy_family() {
    let b = three_copy_basis().unwrap();
    assert_eq!(b.span_dim(), 455);
    assert_exact_tp(&b);
    assert_eq!(float_rank(&b), 455);
    universality(&b, 20);
}

#[test]
fn random_bases() {
    let b1 = random_k_copy_basis(1, 3).unwrap();
    assert_eq!(b1.span_dim(), 13);
    let b2 = random_k_copy_basis(2, 3).unwrap();
    assert_eq!(b2.span_dim(), 91);
    assert_eq!(float_rank(&b2), 91);
    let again = random_k_copy_basis(2, 3).unwrap();
    assert_eq!(b2.exact, again.exact);
    assert_ne!(random_k_copy_basis(1, 4).unwrap().exact, b1.exact);
    universality(&b2, 5);
    let cols: Vec<DVector<Complex64>> = b2.elements.iter().map(|j| power_vector(j, 2)).collect();
    assert!(span_residual(&cols, &cols[7]) < 1e-12);
}

#[test]
fn unitary_bases() {
    for (k, n) in [(1, 10), (2, 35), (3, 84)] {
        let b = unitary_k_copy_basis(k, 5).unwrap();
        assert_eq!(b.span_dim(), n);
        assert!(b.exact.is_none());
        for j in &b.elements {
            assert!(is_cp(j, 1e-10) && is_tp(j, &["out"], 1e-10));
            assert!((j.trace().re - 2.0).abs() < 1e-12);
        }
        if k < 3 {
            assert_eq!(float_rank(&b), n);
        }
    }
}
