mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use switchcert::channels::{
    choi_to_kraus, fully_depolarizing_qubit, is_cp, is_tp, kraus_to_choi, random_channel, random_unitary_channel,
    KrausChannel,
};
use switchcert::sdp::link;
use switchcert::switch::{apply_switch, choi_fidelity, switch_choi, switch_fixed_inputs};
use switchcert::tensor::mats;
use switchcert::Operator;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn choi_on(ch: &KrausChannel, i: &str, o: &str) -> Operator {
    kraus_to_choi(&ch.with_labels(i, o).unwrap()).unwrap()
}

#[test]
fn choi_examples() {
    let id = choi_on(&KrausChannel::identity(2), "in", "out");
    assert_eq!(id, mats::identity_choi("in", "out", 2));

    let dep = choi_on(&fully_depolarizing_qubit(), "in", "out");
    assert!(max_entry(&(dep.data() - mats::identity(4) * c(0.5))) < 1e-15);

    // |X⟩⟩ = |01⟩ + |10⟩
    let x = choi_on(&KrausChannel::unitary(mats::pauli(1)).unwrap(), "in", "out");
    let v = DVector::from_vec(vec![c(0.0), c(1.0), c(1.0), c(0.0)]);
    assert_eq!(x.data(), &(&v * v.adjoint()));
}

#[test]
fn kraus_from_choi() {
    let k = choi_to_kraus(&mats::identity_choi("in", "out", 2), &["in"], 1e-9).unwrap();
    assert_eq!(k.kraus().len(), 1);

    let dep = choi_on(&fully_depolarizing_qubit(), "in", "out");
    let k = choi_to_kraus(&dep, &["in"], 1e-9).unwrap();
    assert_eq!(k.kraus().len(), 4);
    assert!(kraus_to_choi(&k).unwrap().distance(&dep).unwrap() < 1e-9);

    let mut r = rng(5);
    let u = choi_on(&random_unitary_channel(3, &mut r), "in", "out");
    assert_eq!(choi_to_kraus(&u, &["in"], 1e-9).unwrap().kraus().len(), 1);

    for _ in 0..10 {
        let ch = random_channel(2, 3, 4, &mut r).unwrap().with_labels("in", "out").unwrap();
        let m = kraus_to_choi(&ch).unwrap();
        let back = kraus_to_choi(&choi_to_kraus(&m, &["in"], 1e-9).unwrap()).unwrap();
        assert!(back.distance(&m).unwrap() < 1e-9);
    }

    let mut bad = mats::identity_choi("in", "out", 2);
    bad.data_mut()[(0, 0)] = c(-0.5);
    assert!(choi_to_kraus(&bad, &["in"], 1e-9).is_err());
}

#[test]
fn cp_and_tp_predicates() {
    // 𝟙⊗𝟙/2 + 𝟙⊗Z is trace preserving but has a negative eigenvalue
    let id = DMatrix::<Complex64>::identity(2, 2);
    let m = mats::kron(&id, &id) * c(0.5) + mats::kron(&id, &mats::pauli(3));
    let m = Operator::new(layout(&[("in", 2), ("out", 2)]), m).unwrap();
    assert!(is_tp(&m, &["out"], 1e-12));
    assert!(!is_cp(&m, 1e-9));

    let phi = mats::identity_choi("in", "out", 2);
    assert!(is_tp(&phi, &["out"], 1e-12) && is_cp(&phi, 1e-12));

    // 𝟙 ⊗ |0⟩⟨0| on (in, out) is the reset channel; with the factors swapped Tr_out gives 2|0⟩⟨0|
    let reset = mats::on("in", id.clone()).kron(&mats::on("out", mats::projector(&mats::ket(2, 0)))).unwrap();
    assert!(is_tp(&reset, &["out"], 1e-12));
    let m = mats::on("in", mats::projector(&mats::ket(2, 0))).kron(&mats::on("out", id.clone())).unwrap();
    assert!(!is_tp(&m, &["out"], 1e-9));
}

#[test]
fn generated_channels_are_valid() {
    let mut r = rng(6);
    for _ in 0..20 {
        let u = random_unitary_channel(2, &mut r);
        let k = &u.kraus()[0];
        assert!(max_entry(&(k.adjoint() * k - mats::identity(2))) < 1e-12);
        let ch = random_channel(2, 2, 4, &mut r).unwrap();
        assert!(ch.tp_deviation() < 1e-12);
        let m = choi_on(&ch, "in", "out");
        assert!(is_cp(&m, 1e-12) && is_tp(&m, &["out"], 1e-12));
    }
    let ch = random_channel(2, 2, 1, &mut r).unwrap();
    let k = &ch.kraus()[0];
    assert!(max_entry(&(k * k.adjoint() - mats::identity(2))) < 1e-12);
}

#[test]
fn haar_twirl_of_a_state_is_maximally_mixed() {
    let mut r = rng(7);
    let rho = mats::projector(&mats::ket(2, 0));
    let n = 10_000;
    let mut acc = DMatrix::<Complex64>::zeros(2, 2);
    for _ in 0..n {
        acc += random_unitary_channel(2, &mut r).apply(&rho);
    }
    acc /= c(n as f64);
    assert!(max_entry(&(acc - mats::identity(2) * c(0.5))) < 0.01);
}

#[test]
fn choi_is_invariant_under_kraus_remixing() {
    let mut r = rng(8);
    for _ in 0..5 {
        let ch = random_channel(2, 2, 3, &mut r).unwrap();
        // Kraus set mixed by a 4×3 isometry, padded with a zero operator
        let v = random_channel(3, 4, 1, &mut r).unwrap().kraus()[0].clone();
        let mixed: Vec<DMatrix<Complex64>> = (0..4)
            .map(|a| (0..3).fold(DMatrix::zeros(2, 2), |acc, b| acc + &ch.kraus()[b] * v[(a, b)]))
            .collect();
        let remixed = KrausChannel::simple(mixed).unwrap();
        assert!(choi_on(&ch, "in", "out").distance(&choi_on(&remixed, "in", "out")).unwrap() < 1e-12);
    }
}

#[test]
fn switch_choi_examples() {
    let s = switch_choi(2).unwrap();
    assert!((s.operator.trace().re - 16.0).abs() < 1e-12);
    assert!((s.s_vector.norm_squared() - 16.0).abs() < 1e-12);
    // rank one: S² = Tr(S) S
    let sq = s.operator.data() * s.operator.data();
    assert!(max_entry(&(sq - s.operator.data() * c(16.0))) < 1e-10);
    // coherence between the two orders
    let half = s.operator.dim() / 2;
    let off = s.operator.data().view((0, half), (half, half)).iter().map(|z| z.norm()).sum::<f64>();
    assert!(off > 1.0);
    assert!(switch_choi(1).is_err());

    // control 0 in and out: the order A then B, i.e. a chain of identity wires
    let p0 = |l: &str| mats::on(l, mats::projector(&mats::ket(2, 0)));
    let fixed = p0("cI").link(&s.operator).unwrap().link(&p0("cO")).unwrap();
    let chain = mats::identity_choi("tI", "AI", 2)
        .kron(&mats::identity_choi("AO", "BI", 2))
        .unwrap()
        .kron(&mats::identity_choi("BO", "tO", 2))
        .unwrap();
    assert!(fixed.distance(&chain).unwrap() < 1e-12);
}

#[test]
fn fixed_input_switch() {
    let s0 = switch_fixed_inputs(2).unwrap();
    assert!((s0.trace().re - 4.0).abs() < 1e-12);
    let ev = s0.eigenvalues();
    assert!(ev[..ev.len() - 1].iter().all(|x| x.abs() < 1e-10));

    // identity channels: the output is |+⟩|0⟩ on control and target
    let id = mats::identity_choi("AI", "AO", 2).kron(&mats::identity_choi("BI", "BO", 2)).unwrap();
    let out = link(&s0, &id).unwrap().permute_systems(&["cO", "tO"]).unwrap();
    let expect = mats::projector(&mats::plus().kronecker(&mats::ket(2, 0)));
    assert!(max_entry(&(out.data() - expect)) < 1e-12);

    assert!((choi_fidelity(&s0, &s0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn fidelity_with_one_order() {
    // control prepared in |0⟩ instead of |+⟩: the A-then-B branch of S_{+0}, with trace d²
    let s = switch_choi(2).unwrap();
    let rho = mats::on("cI", mats::projector(&mats::ket(2, 0))).kron(&mats::on("tI", mats::projector(&mats::ket(2, 0)))).unwrap();
    let s0 = switch_fixed_inputs(2).unwrap();
    let ordered = rho.link(&s.operator).unwrap().aligned_to(s0.layout()).unwrap();
    assert!((ordered.trace().re - 4.0).abs() < 1e-12);
    assert!((choi_fidelity(&s0, &ordered).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn fidelity_is_in_unit_interval() {
    let mut r = rng(9);
    let s0 = switch_fixed_inputs(2).unwrap();
    for _ in 0..10 {
        let a = choi_on(&random_channel(2, 2, 4, &mut r).unwrap(), "AI", "AO");
        let b = choi_on(&random_channel(2, 2, 4, &mut r).unwrap(), "BI", "BO");
        let rho = random_density(&layout(&[("tO", 2), ("cO", 2)]), &mut r);
        let n = a.kron(&b).unwrap().kron(&rho).unwrap();
        let f = choi_fidelity(&s0, &n).unwrap();
        assert!((0.0..=1.0).contains(&f), "{f}");
    }
}

fn ket2(a: &DVector<Complex64>, b: &DVector<Complex64>) -> DVector<Complex64> {
    a.kronecker(b)
}

#[test]
fn apply_switch_examples() {
    // X then Z: S₀₀|+⟩|0⟩ = (|0⟩ZX|0⟩ + |1⟩XZ|0⟩)/√2 = −|−⟩|1⟩
    let x = KrausChannel::unitary(mats::pauli(1)).unwrap();
    let z = KrausChannel::unitary(mats::pauli(3)).unwrap();
    let s = apply_switch(&x, &z).unwrap();
    let out = &s.kraus()[0] * ket2(&mats::plus(), &mats::ket(2, 0));
    let expect = -ket2(&mats::minus(), &mats::ket(2, 1));
    assert!((out - expect).norm() < 1e-12);

    let id = KrausChannel::identity(2);
    let s = apply_switch(&id, &id).unwrap();
    let mut r = rng(10);
    let rho = random_density(&layout(&[("c", 2), ("t", 2)]), &mut r);
    assert!(max_entry(&(s.apply(rho.data()) - rho.data())) < 1e-12);

    // depolarizing inputs keep control coherence
    let dep = fully_depolarizing_qubit();
    let s = apply_switch(&dep, &dep).unwrap();
    assert_eq!(s.kraus().len(), 16);
    let out = Operator::new(
        s.out_layout().clone(),
        s.apply(&mats::projector(&ket2(&mats::plus(), &mats::ket(2, 0)))),
    )
    .unwrap();
    let ctrl = out.partial_trace(&[s.out_layout().labels()[1].clone()]).unwrap();
    assert!(ctrl.data()[(0, 1)].norm() > 0.1);
    assert!(s.tp_deviation() < 1e-12);
}

#[test]
fn switch_kraus_matches_choi_link() {
    let mut r = rng(11);
    let s = switch_choi(2).unwrap().operator;
    for t in 0..20 {
        let (a, b) = if t % 2 == 0 {
            (random_channel(2, 2, 3, &mut r).unwrap(), random_channel(2, 2, 2, &mut r).unwrap())
        } else {
            (random_unitary_channel(2, &mut r), random_channel(2, 2, 4, &mut r).unwrap())
        };
        let via_link = link(&s, &choi_on(&a, "AI", "AO").kron(&choi_on(&b, "BI", "BO")).unwrap()).unwrap();
        let sw = apply_switch(&a, &b).unwrap();
        assert!(sw.tp_deviation() < 1e-12);
        let via_kraus = kraus_to_choi(&sw.with_layouts(
            layout(&[("cI", 2), ("tI", 2)]),
            layout(&[("cO", 2), ("tO", 2)]),
        ).unwrap())
        .unwrap();
        assert!(via_kraus.distance(&via_link).unwrap() < 1e-10);
    }
}

#[test]
fn switch_choi_link_with_x_and_z() {
    let s = switch_choi(2).unwrap().operator;
    let x = KrausChannel::unitary(mats::pauli(1)).unwrap();
    let z = KrausChannel::unitary(mats::pauli(3)).unwrap();
    let lhs = link(&s, &choi_on(&x, "AI", "AO").kron(&choi_on(&z, "BI", "BO")).unwrap()).unwrap();
    let sw = apply_switch(&x, &z).unwrap().with_layouts(layout(&[("cI", 2), ("tI", 2)]), layout(&[("cO", 2), ("tO", 2)])).unwrap();
    assert!(lhs.distance(&kraus_to_choi(&sw).unwrap()).unwrap() < 1e-12);
}

#[test]
fn bipartite_switch_is_tp_and_ignores_trivial_primes() {
    let mut r = rng(12);
    let a = bipartite(random_channel(4, 4, 2, &mut r).unwrap().kraus().to_vec(), "A", 2, 2);
    let b = bipartite(random_channel(4, 4, 3, &mut r).unwrap().kraus().to_vec(), "B", 2, 2);
    assert!(apply_switch(&a, &b).unwrap().tp_deviation() < 1e-10);

    // primed systems of dimension 1 reduce to the local switch
    let a1 = random_channel(2, 2, 2, &mut r).unwrap();
    let b1 = random_channel(2, 2, 2, &mut r).unwrap();
    let local = kraus_to_choi(&apply_switch(&a1, &b1).unwrap()).unwrap();
    let ext = apply_switch(&bipartite(a1.kraus().to_vec(), "A", 2, 1), &bipartite(b1.kraus().to_vec(), "B", 2, 1)).unwrap();
    let ext = kraus_to_choi(&ext).unwrap();
    assert!(max_entry(&(local.data() - ext.data())) < 1e-12);
}
