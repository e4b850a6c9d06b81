mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use switchcert::channels::{kraus_to_choi, random_channel};
use switchcert::comb::{CombSpec, QcccSpec, Slot};
use switchcert::switch::switch_choi;
use switchcert::tensor::mats;
use switchcert::{Operator, SpaceLayout};

fn sys(l: &str, d: usize) -> (String, usize) {
    (l.to_string(), d)
}

fn slots(k: usize, d: usize) -> Vec<Slot> {
    (1..=k).map(|i| Slot::new((&format!("I{i}"), d), (&format!("O{i}"), d))).collect()
}

fn spec(k: usize, dp: usize, df: usize) -> CombSpec {
    CombSpec::new(vec![sys("P", dp)], slots(k, 2), vec![sys("F", df)])
}

/// Random channel on the given multi-system layouts.
fn channel_choi<R: Rng>(ins: &[(String, usize)], outs: &[(String, usize)], rng: &mut R) -> Operator {
    let li = SpaceLayout::new(ins).unwrap();
    let lo = SpaceLayout::new(outs).unwrap();
    let ch = random_channel(li.total_dim(), lo.total_dim(), 2, rng).unwrap();
    kraus_to_choi(&ch.with_layouts(li, lo).unwrap()).unwrap()
}

/// Sequential circuit: random channels with a qubit memory between slots,
/// link-composed into the comb's Choi operator.
fn sequential_comb<R: Rng>(spec: &CombSpec, rng: &mut R) -> Operator {
    let mut past = spec.past.clone();
    if past.is_empty() {
        past.push(sys("none", 1));
    }
    let k = spec.k();
    let mut c = channel_choi(&past, &[spec.slots[0].inputs[0].clone(), sys("M1", 2)], rng);
    for j in 1..k {
        let step = channel_choi(
            &[spec.slots[j - 1].outputs[0].clone(), sys(&format!("M{j}"), 2)],
            &[spec.slots[j].inputs[0].clone(), sys(&format!("M{}", j + 1), 2)],
            rng,
        );
        c = c.link(&step).unwrap();
    }
    let last = channel_choi(&[spec.slots[k - 1].outputs[0].clone(), sys(&format!("M{k}"), 2)], &spec.future, rng);
    c = c.link(&last).unwrap();
    if spec.past.is_empty() {
        c = c.partial_trace(&["none"]).unwrap();
    }
    c.aligned_to(&spec.layout().unwrap()).unwrap()
}

fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
    a.distance(b).unwrap() <= tol * (1.0 + a.frobenius_norm())
}

#[test]
fn comb_projector_is_unital_and_idempotent() {
    for (k, n) in [(2, 50), (3, 50), (4, 5)] {
        let s = if k == 4 { spec(4, 1, 2) } else { spec(k, 2, 2) };
        let l = s.layout().unwrap();
        let d = l.total_dim() as f64;
        let mixed = Operator::identity(l.clone()).scale(&Complex64::new(1.0 / d, 0.0));
        assert!(close(&s.project(&mixed).unwrap(), &mixed, 1e-12));
        assert!(close(&s.project_dual(&Operator::identity(l.clone())).unwrap(), &Operator::identity(l.clone()), 1e-12));
        let mut r = rng(100 + k as u64);
        for _ in 0..n {
            let m = random_hermitian(&l, &mut r);
            let p = s.project(&m).unwrap();
            let q = s.project_dual(&m).unwrap();
            for x in [&p, &q] {
                assert!(x.is_hermitian(1e-10));
                assert!((x.trace() - m.trace()).norm() < 1e-10 * d);
            }
            assert!(close(&s.project(&p).unwrap(), &p, 1e-10));
            assert!(close(&s.project_dual(&q).unwrap(), &q, 1e-10));
        }
    }
}

#[test]
fn projector_matches_printed_two_slot_formula() {
    let s = spec(2, 2, 2);
    let m = random_hermitian(&s.layout().unwrap(), &mut rng(2));
    let tr = |ls: &[&str]| m.trace_and_replace(ls).unwrap();
    let mut expect = m.sub(&tr(&["F"])).unwrap();
    expect = expect.add(&tr(&["O2", "F"])).unwrap();
    expect = expect.sub(&tr(&["I2", "O2", "F"])).unwrap();
    expect = expect.add(&tr(&["O1", "I2", "O2", "F"])).unwrap();
    expect = expect.sub(&tr(&["I1", "O1", "I2", "O2", "F"])).unwrap();
    expect = expect.add(&tr(&["P", "I1", "O1", "I2", "O2", "F"])).unwrap();
    assert!(close(&s.project(&m).unwrap(), &expect, 1e-12));
}

#[test]
fn unsupported_slot_counts() {
    assert!(spec(1, 2, 2).projector_map().is_err());
    assert!(spec(5, 1, 1).projector_map().is_err());
    let q = QcccSpec { slots: slots(4, 2), future: vec![sys("F", 2)] };
    assert!(q.constraints().is_err());
}

#[test]
fn sequential_circuits_are_combs() {
    let mut r = rng(3);
    for k in 2..=4 {
        let s = if k == 4 { spec(4, 1, 2) } else { spec(k, 2, 2) };
        let c = sequential_comb(&s, &mut r);
        assert!(s.is_comb(&c, 1e-9).unwrap(), "k = {k}");
    }
}

#[test]
fn parallel_and_wire_combs() {
    // independent preparations with discarded slot outputs
    let s = spec(2, 1, 1);
    let mut r = rng(4);
    let mut c = Operator::identity(SpaceLayout::new(&[("P", 1)]).unwrap());
    for i in 1..=2 {
        let rho = random_density(&layout(&[(&format!("I{i}"), 2)]), &mut r);
        c = c.kron(&rho).unwrap().kron(&mats::on(&format!("O{i}"), mats::identity(2))).unwrap();
    }
    c = c.kron(&Operator::identity(SpaceLayout::new(&[("F", 1)]).unwrap())).unwrap();
    assert!(s.is_comb(&c, 1e-9).unwrap());

    // identity wires P → I1, O1 → I2, O2 → F
    let s = spec(2, 2, 2);
    let c = mats::identity_choi("P", "I1", 2)
        .kron(&mats::identity_choi("O1", "I2", 2))
        .unwrap()
        .kron(&mats::identity_choi("O2", "F", 2))
        .unwrap();
    assert!(s.is_comb(&c, 1e-9).unwrap());
}

#[test]
fn switch_is_not_a_comb() {
    let s = switch_choi(2).unwrap().operator;
    let ab = CombSpec::new(
        vec![sys("cI", 2), sys("tI", 2)],
        vec![Slot::new(("AI", 2), ("AO", 2)), Slot::new(("BI", 2), ("BO", 2))],
        vec![sys("tO", 2), sys("cO", 2)],
    );
    let ba = CombSpec::new(ab.past.clone(), vec![ab.slots[1].clone(), ab.slots[0].clone()], ab.future.clone());
    for spec in [ab, ba] {
        let m = s.aligned_to(&spec.layout().unwrap()).unwrap();
        assert!((m.trace().re - spec.normalization() as f64).abs() < 1e-9);
        assert!(!spec.is_comb(&m, 1e-6).unwrap());
    }
}

#[test]
fn random_hermitian_is_not_a_comb() {
    let s = spec(2, 2, 2);
    let mut r = rng(5);
    for _ in 0..10 {
        let m = random_hermitian(&s.layout().unwrap(), &mut r);
        assert!(!s.is_comb(&m, 1e-6).unwrap());
    }
}

#[test]
fn dual_affine_elements_pair_constantly_with_combs() {
    let s = spec(2, 2, 2);
    let l = s.layout().unwrap();
    let mut r = rng(6);
    let g = s.project_dual(&random_hermitian(&l, &mut r)).unwrap();
    let expect = g.trace().re * s.normalization() as f64 / l.total_dim() as f64;
    for _ in 0..20 {
        let c = sequential_comb(&s, &mut r);
        let v = c.trace_product(&g).unwrap();
        assert!((v.re - expect).abs() < 1e-9 && v.im.abs() < 1e-9, "{v} vs {expect}");
    }
}

fn qccc2() -> QcccSpec {
    QcccSpec { slots: slots(2, 2), future: vec![sys("F", 2)] }
}

fn order_comb<R: Rng>(q: &QcccSpec, order: &[usize], rng: &mut R) -> Operator {
    let slots = order.iter().map(|&i| q.slots[i].clone()).collect();
    let s = CombSpec::new(vec![], slots, q.future.clone());
    sequential_comb(&s, rng).aligned_to(&q.layout().unwrap()).unwrap()
}

#[test]
fn qccc_two_slot_mixtures_satisfy_constraints() {
    let q = qccc2();
    let cons = q.constraints().unwrap();
    assert_eq!(cons.orders.len(), 2);
    assert_eq!(cons.trace, 4);
    let mut r = rng(7);
    let half = Complex64::new(0.5, 0.0);
    let comps: Vec<Operator> = cons.orders.iter().map(|o| order_comb(&q, o, &mut r).scale(&half)).collect();
    assert!(cons.violation(&comps).unwrap() < 1e-9);

    let pure = vec![order_comb(&q, &cons.orders[0], &mut r), Operator::zeros(q.layout().unwrap())];
    assert!(cons.violation(&pure).unwrap() < 1e-9);

    // the wrong order placed in a component is rejected
    let swapped = vec![Operator::zeros(q.layout().unwrap()), order_comb(&q, &cons.orders[0], &mut r)];
    assert!(cons.violation(&swapped).unwrap() > 1e-3);
}

#[test]
fn qccc_three_slot_structure() {
    let q = QcccSpec { slots: slots(3, 2), future: vec![sys("F", 2)] };
    let cons = q.constraints().unwrap();
    assert_eq!(cons.orders.len(), 6);
    let coupled = cons.equalities.iter().filter(|e| e.terms.len() == 2).count();
    assert_eq!(coupled, 3);
    assert_eq!(cons.trace, 8);

    let mut r = rng(8);
    let sixth = Complex64::new(1.0 / 6.0, 0.0);
    let comps: Vec<Operator> = cons.orders.iter().map(|o| order_comb(&q, o, &mut r).scale(&sixth)).collect();
    assert!(cons.violation(&comps).unwrap() < 1e-9);

    let mut one = vec![Operator::zeros(q.layout().unwrap()); 6];
    one[3] = order_comb(&q, &cons.orders[3], &mut r);
    assert!(cons.violation(&one).unwrap() < 1e-9);
}
