#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use switchcert::channels::KrausChannel;
use switchcert::{Operator, SpaceLayout};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn layout(systems: &[(&str, usize)]) -> SpaceLayout {
    SpaceLayout::new(systems).unwrap()
}

pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng>(l: &SpaceLayout, rng: &mut R) -> Operator {
    let m = random_matrix(l.total_dim(), rng);
    Operator::new(l.clone(), (&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

pub fn random_density<R: Rng>(l: &SpaceLayout, rng: &mut R) -> Operator {
    let m = random_matrix(l.total_dim(), rng);
    let rho = &m * m.adjoint();
    let t = rho.trace();
    Operator::new(l.clone(), rho / t).unwrap()
}

pub fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Two-system channel `x ⊗ x'` with Kraus operators `k`.
pub fn bipartite(k: Vec<DMatrix<Complex64>>, x: &str, d: usize, dp: usize) -> KrausChannel {
    let l = |s: &str| SpaceLayout::new(&[(format!("{x}{s}"), d), (format!("{x}'{s}"), dp)]).unwrap();
    KrausChannel::new(k, l("I"), l("O")).unwrap()
}
