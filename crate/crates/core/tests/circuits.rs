mod common;

use common::*;
use switchcert::channels::{amplitude_damping, haar_unitary, random_channel, random_unitary_channel, KrausChannel};
use switchcert::circuits::{
    bipartite_aba_circuit, check_simulation, chiribella_circuit, extend_trivially, naive_circuit, purity,
    reduced_output,
};
use switchcert::switch::apply_switch;
use switchcert::tensor::mats;
use switchcert::Operator;

#[test]
fn aba_reproduces_switch_on_unitaries() {
    let mut r = rng(60);
    for _ in 0..50 {
        let a = random_unitary_channel(2, &mut r);
        let b = random_unitary_channel(2, &mut r);
        let c = chiribella_circuit(&a, &b).unwrap();
        let rep = check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap();
        assert!(rep.choi_distance < 1e-9, "{rep:?}");
        assert!((rep.fidelity - 1.0).abs() < 1e-9);
    }
    // B may be noisy
    for _ in 0..10 {
        let a = random_unitary_channel(2, &mut r);
        let b = random_channel(2, 2, 3, &mut r).unwrap();
        let c = chiribella_circuit(&a, &b).unwrap();
        assert!(check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap().choi_distance < 1e-9);
    }
}

#[test]
fn aba_fails_on_noisy_a() {
    let mut r = rng(61);
    let a = amplitude_damping(0.5);
    let b = random_unitary_channel(2, &mut r);
    let c = chiribella_circuit(&a, &b).unwrap();
    let rep = check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap();
    assert!(rep.choi_distance > 1e-3, "{rep:?}");
}

#[test]
fn bipartite_aba_reproduces_switch() {
    let mut r = rng(62);
    for _ in 0..50 {
        let a = bipartite(vec![haar_unitary(4, &mut r)], "A", 2, 2);
        let b = bipartite(random_channel(4, 4, 3, &mut r).unwrap().kraus().to_vec(), "B", 2, 2);
        let c = bipartite_aba_circuit(&a, &b).unwrap();
        let rep = check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap();
        assert!(rep.choi_distance < 1e-9, "{rep:?}");
    }
    let a = bipartite(random_channel(4, 4, 2, &mut r).unwrap().kraus().to_vec(), "A", 2, 2);
    let b = bipartite(random_channel(4, 4, 2, &mut r).unwrap().kraus().to_vec(), "B", 2, 2);
    let c = bipartite_aba_circuit(&a, &b).unwrap();
    let rep = check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap();
    assert!(rep.choi_distance > 1e-3, "{rep:?}");
}

#[test]
fn bipartite_with_trivial_primes_matches_local_circuit() {
    let mut r = rng(63);
    let a = random_unitary_channel(2, &mut r);
    let b = random_channel(2, 2, 2, &mut r).unwrap();
    let local = chiribella_circuit(&a, &b).unwrap().reduced_choi().unwrap();
    let ae = extend_trivially(&a, 1, ("A", "A'")).unwrap();
    let be = extend_trivially(&b, 1, ("B", "B'")).unwrap();
    let bip = bipartite_aba_circuit(&ae, &be).unwrap().reduced_choi().unwrap();
    // systems of dimension one do not change the matrix once the rest are in the same order
    let mut order: Vec<String> = local.layout().labels().to_vec();
    let extra: Vec<String> = bip.layout().labels().iter().filter(|l| !order.contains(l)).cloned().collect();
    order.extend(extra);
    let bip = bip.permute_systems(&order).unwrap();
    assert_eq!(bip.layout().total_dim(), local.layout().total_dim());
    assert!(max_entry(&(bip.data() - local.data())) < 1e-12);
}

#[test]
fn identity_inputs_are_exact() {
    let id = KrausChannel::identity(2);
    let sw = apply_switch(&id, &id).unwrap();
    for c in [chiribella_circuit(&id, &id).unwrap(), naive_circuit(&id, &id).unwrap()] {
        assert!(check_simulation(&c.channel, &sw, &c.aux).unwrap().choi_distance < 1e-14, "{}", c.name);
    }
    let c = bipartite_aba_circuit(&bipartite(vec![mats::identity(4)], "A", 2, 2), &bipartite(vec![mats::identity(4)], "B", 2, 2)).unwrap();
    let sw = apply_switch(&bipartite(vec![mats::identity(4)], "A", 2, 2), &bipartite(vec![mats::identity(4)], "B", 2, 2)).unwrap();
    assert!(check_simulation(&c.channel, &sw, &c.aux).unwrap().choi_distance < 1e-14);
}

#[test]
fn circuits_are_trace_preserving() {
    let mut r = rng(64);
    for _ in 0..10 {
        let a = random_channel(2, 2, 2, &mut r).unwrap();
        let b = random_channel(2, 2, 3, &mut r).unwrap();
        assert!(chiribella_circuit(&a, &b).unwrap().channel.tp_deviation() < 1e-10);
        assert!(naive_circuit(&a, &b).unwrap().channel.tp_deviation() < 1e-10);
        let a = bipartite(random_channel(4, 4, 2, &mut r).unwrap().kraus().to_vec(), "A", 2, 2);
        let b = bipartite(random_channel(4, 4, 2, &mut r).unwrap().kraus().to_vec(), "B", 2, 2);
        assert!(bipartite_aba_circuit(&a, &b).unwrap().channel.tp_deviation() < 1e-10);
    }
}

fn naive_output(b: nalgebra::DMatrix<num_complex::Complex64>) -> (f64, f64, f64) {
    let a = KrausChannel::unitary(mats::pauli(1)).unwrap();
    let b = KrausChannel::unitary(b).unwrap();
    let c = naive_circuit(&a, &b).unwrap();
    let psi = mats::plus().kronecker(&mats::ket(2, 0));
    let full = Operator::new(c.channel.out_layout().clone(), c.channel.apply_ket(&psi)).unwrap();
    let reduced = reduced_output(&c.channel, &["auxO"], &psi).unwrap();
    let dist = check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap().choi_distance;
    (purity(&full), purity(&reduced), dist)
}

#[test]
fn naive_circuit_leaks_order() {
    // anticommuting unitaries: the aux ends up as ±(the same state) in both
    // branches, so the output stays pure but the relative phase is wrong
    let (full, reduced, dist) = naive_output(mats::pauli(3));
    assert!((full - 1.0).abs() < 1e-12);
    assert!((reduced - 1.0).abs() < 1e-12);
    assert!(dist > 1e-3);

    // generic pair: the aux records the order and the output is mixed
    let (full, reduced, dist) = naive_output(mats::hadamard());
    assert!((full - 1.0).abs() < 1e-12);
    assert!(reduced < 1.0 - 1e-3, "{reduced}");
    assert!(dist > 1e-3);
}

#[test]
fn report_fields_are_sane() {
    let mut r = rng(65);
    for _ in 0..10 {
        let a = random_channel(2, 2, 2, &mut r).unwrap();
        let b = random_channel(2, 2, 2, &mut r).unwrap();
        let c = naive_circuit(&a, &b).unwrap();
        let rep = check_simulation(&c.channel, &apply_switch(&a, &b).unwrap(), &c.aux).unwrap();
        for v in [rep.choi_distance, rep.fidelity, rep.purity_gap] {
            assert!(v.is_finite() && v >= 0.0, "{rep:?}");
        }
        assert!(rep.fidelity <= 1.0 + 1e-12);
    }
}
