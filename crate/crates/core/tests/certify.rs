mod common;

use std::sync::OnceLock;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use switchcert::basis::{identity_element, single_copy_basis, BasisKind, ChannelBasis};
use switchcert::certify::{
    certify_scenario, emit_bound, find_eta, normalize_dual, project_dual_affine, psd_check, psd_check_exact,
    psd_check_shifted_float, rationalize, symmetrize, verify_certificate, CertifyOptions, EtaOptions,
    FloatVerdict, ProofCertificate,
};
use switchcert::exact::{exact_from_float, gq, gq_int, q, to_float_matrix, GaussQ, RationalMatrix, Q};
use switchcert::sdp::{Restriction, SimulationScenario, SolverOptions};
use switchcert::{Operator, SpaceLayout};

fn rat(l: &SpaceLayout, rows: &[&[(i64, i64)]], den: i64) -> RationalMatrix {
    let n = rows.len();
    let entries: Vec<GaussQ> = rows.iter().flat_map(|r| r.iter().map(|&(a, b)| gq(q(a, den), q(b, den)))).collect();
    RationalMatrix::new(l.clone(), DMatrix::from_row_slice(n, n, &entries)).unwrap()
}

fn adj(m: &DMatrix<GaussQ>) -> DMatrix<GaussQ> {
    m.map(|z| z.conj()).transpose()
}

fn diag(vals: &[Q]) -> RationalMatrix {
    let n = vals.len();
    let mut m = DMatrix::from_element(n, n, GaussQ::zero());
    for (i, v) in vals.iter().enumerate() {
        m[(i, i)] = gq(v.clone(), Q::zero());
    }
    RationalMatrix::new(SpaceLayout::single("a", n), m).unwrap()
}

#[test]
fn rationalize_truncates() {
    let l = SpaceLayout::single("a", 1);
    let m = Operator::new(l.clone(), DMatrix::from_element(1, 1, Complex64::new(1.0 / 3.0, -2.0 / 3.0))).unwrap();
    let r = rationalize(&m, 3);
    assert_eq!(r.data()[(0, 0)], gq(q(333, 1000), q(-666, 1000)));

    let exact = Operator::new(l, DMatrix::from_element(1, 1, Complex64::new(0.375, 0.5))).unwrap();
    assert_eq!(rationalize(&exact, 12).data()[(0, 0)], gq(q(3, 8), q(1, 2)));

    let mut rr = rng(40);
    let m = random_hermitian(&layout(&[("a", 5)]), &mut rr);
    for n in [3, 6, 9] {
        let back = to_float_matrix(&rationalize(&m, n));
        assert!(max_entry(&(back.data() - m.data())) <= 10f64.powi(-(n as i32) + 1));
    }
}

#[test]
fn symmetrize_examples() {
    let l = SpaceLayout::single("a", 2);
    let upper = rat(&l, &[&[(2, 0), (1, 1)], &[(0, 0), (4, 0)]], 1);
    let s = symmetrize(&upper);
    assert_eq!(s, rat(&l, &[&[(4, 0), (1, 1)], &[(1, -1), (8, 0)]], 2));
    assert!(s.is_exactly_hermitian());
    assert_eq!(symmetrize(&s), s);
    let anti = rat(&l, &[&[(0, 1), (1, 2)], &[(-1, 2), (0, -3)]], 1);
    assert!(symmetrize(&anti).data().iter().all(|z| z.is_zero()));
}

#[test]
fn normalization_is_scale_invariant() {
    let l = SpaceLayout::single("c", 2);
    let t = vec![rat(&l, &[&[(1, 0), (1, 0)], &[(1, 0), (1, 0)]], 2), rat(&l, &[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]], 1)];
    let rs = vec![rat(&l, &[&[(1, 0), (0, 0)], &[(0, 0), (1, 0)]], 2), rat(&l, &[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]], 2)];
    let (ok, tsym) = normalize_dual(&rs, &t).unwrap();
    assert_eq!(tsym, Q::one());
    assert_eq!(ok, rs);
    let seven: Vec<RationalMatrix> = rs.iter().map(|r| r.scale(&gq_int(7))).collect();
    let (ok7, t7) = normalize_dual(&seven, &t).unwrap();
    assert_eq!(t7, q(7, 1));
    assert_eq!(ok7, rs);
    let zero = vec![RationalMatrix::zeros(l.clone()), RationalMatrix::zeros(l)];
    assert!(normalize_dual(&zero, &t).is_err());
}

#[test]
fn exact_dual_projection() {
    let scn = SimulationScenario::comb("AB", Restriction::Restricted);
    let spec = scn.comb_spec();
    let l = spec.layout().unwrap();
    let id = RationalMatrix::identity(l.clone());
    assert_eq!(project_dual_affine(&id, &spec).unwrap(), id);

    let mut r = rng(41);
    let m = symmetrize(&rationalize(&random_hermitian(&l, &mut r), 4));
    let p = project_dual_affine(&m, &spec).unwrap();
    assert_eq!(project_dual_affine(&p, &spec).unwrap(), p);
    let float = spec.project_dual(&to_float_matrix(&m)).unwrap();
    assert!(max_entry(&(to_float_matrix(&p).data() - float.data())) < 1e-12);
}

#[test]
fn psd_examples() {
    assert!(psd_check_exact(&diag(&[Q::one(), Q::zero()])));
    let l = SpaceLayout::single("a", 2);
    let bad = rat(&l, &[&[(1, 0), (2, 0)], &[(2, 0), (1, 0)]], 1);
    assert!(!psd_check_exact(&bad));
    assert!(!psd_check(&bad).0);

    // a zero pivot with a nonzero remainder is indefinite
    let l3 = SpaceLayout::single("a", 3);
    assert!(!psd_check_exact(&rat(&l3, &[&[(0, 0), (1, 0), (0, 0)], &[(1, 0), (1, 0), (0, 0)], &[(0, 0), (0, 0), (1, 0)]], 1)));

    let mut r = rng(42);
    let v = DMatrix::from_fn(6, 3, |_, _| gq(q(r.gen_range(-9..=9), r.gen_range(1..=5)), q(r.gen_range(-9..=9), 7)));
    let gram = RationalMatrix::new(SpaceLayout::single("a", 6), &v * adj(&v)).unwrap();
    assert!(psd_check_exact(&gram));
}

#[test]
fn shifted_float_examples() {
    let id = RationalMatrix::identity(SpaceLayout::single("a", 8));
    assert_eq!(psd_check_shifted_float(&id), FloatVerdict::Accept);

    // Gram matrix plus a margin of 10^-2 · dim
    let mut r = rng(43);
    let n = 12;
    let v = DMatrix::from_fn(n, 4, |_, _| gq(q(r.gen_range(-9..=9), 3), q(r.gen_range(-9..=9), 5)));
    let mut g = &v * adj(&v);
    for i in 0..n {
        g[(i, i)] += gq(q(n as i64, 100), Q::zero());
    }
    let g = RationalMatrix::new(SpaceLayout::single("a", n), g).unwrap();
    assert_eq!(psd_check_shifted_float(&g), FloatVerdict::Accept);

    // PSD with a zero eigenvalue: the shift destroys definiteness
    assert_eq!(psd_check_shifted_float(&diag(&[Q::one(), Q::zero()])), FloatVerdict::Unknown);
    // never accepts an indefinite matrix
    assert_eq!(psd_check_shifted_float(&diag(&[Q::one(), q(-1, 1_000_000_000)])), FloatVerdict::Unknown);
}

#[test]
fn exact_psd_agrees_with_eigenvalues() {
    let mut r = rng(44);
    let (mut psd, mut not) = (0, 0);
    for t in 0..100 {
        let n = if t < 10 { 64 } else { r.gen_range(1..=40) };
        let rank = r.gen_range(1..=n);
        let b = DMatrix::from_fn(n, rank, |_, _| gq(q(r.gen_range(-3..=3), 1), q(r.gen_range(-3..=3), 1)));
        let mut m = &b * adj(&b);
        let shift = match t % 3 {
            0 => Q::zero(),
            1 => q(-1, 3),
            _ => q(1, 5),
        };
        for i in 0..n {
            m[(i, i)] += gq(shift.clone(), Q::zero());
        }
        let m = RationalMatrix::new(SpaceLayout::single("a", n), m).unwrap();
        let f = to_float_matrix(&m);
        let scale = f.frobenius_norm().max(1.0);
        let float_psd = f.min_eigenvalue() >= -1e-12 * scale;
        let exact = psd_check_exact(&m);
        assert_eq!(exact, float_psd, "trial {t}: n = {n}, rank = {rank}, min eig {}", f.min_eigenvalue());
        if exact {
            psd += 1;
        } else {
            not += 1;
        }
    }
    assert!(psd > 20 && not > 20, "{psd} / {not}");
}

#[test]
fn eta_search() {
    let opts = EtaOptions::default();
    let ok = diag(&[Q::one(), q(1, 2)]);
    assert_eq!(find_eta(&ok, &ok, &opts).unwrap().eta, Q::zero());
    let neg = diag(&[Q::one(), q(-1, 1000)]);
    assert_eq!(find_eta(&ok, &neg, &opts).unwrap().eta, q(1, 1000));
    let bit_less = diag(&[Q::one(), q(-10001, 10_000_000)]);
    assert_eq!(find_eta(&bit_less, &ok, &opts).unwrap().eta, q(10001, 10_000_000));
    assert!(find_eta(&diag(&[q(-1, 1)]), &ok, &opts).is_err());
}

fn exact_identity_basis() -> ChannelBasis {
    let j = identity_element();
    let ex = RationalMatrix::new(j.layout().clone(), exact_from_float(j.data())).unwrap();
    ChannelBasis { kind: BasisKind::Pauli, copies: 1, elements: vec![j], exact: Some(vec![ex]) }
}

#[test]
fn hand_built_certificate() {
    // identity inputs only: R = |+⟩⟨+| meets the normalization, and Γ = 4·𝟙 dominates
    // R ⊗ Kᵀ (largest eigenvalue 1 · 2 · 2), so the bound is N · 4 = 16
    let scn = SimulationScenario::comb("AB", Restriction::Restricted);
    let b = exact_identity_basis();
    let vl = scn.variable_layout().unwrap();
    let gamma = Operator::identity(vl).scale_re(4.0);
    let r = Operator::new(scn.output_layout(), DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0))).unwrap();
    let cert = emit_bound(&scn, &b, Some(&b), &gamma, &[r.clone()], &CertifyOptions::default()).unwrap();
    assert_eq!(cert.bound, "16");
    assert_eq!(cert.eta, "0");
    assert!(verify_certificate(&cert).accepted);

    // a smaller Γ violates the slack condition
    let small = Operator::identity(scn.variable_layout().unwrap()).scale_re(3.0);
    let mut c2 = cert.clone();
    c2.gamma_ok = switchcert::io::RationalMatrixJson::from_matrix(&rationalize(&small, 6));
    c2.bound = "12".into();
    assert!(!verify_certificate(&c2).accepted);

    // R = 0 breaks the normalization
    let mut c3 = cert.clone();
    c3.r_ok = vec![switchcert::io::RationalMatrixJson::from_matrix(&RationalMatrix::zeros(scn.output_layout()))];
    assert!(!verify_certificate(&c3).accepted);
    assert!(emit_bound(&scn, &b, Some(&b), &gamma, &[r.scale_re(0.0)], &CertifyOptions::default()).is_err());
}

fn ab_certificate() -> &'static ProofCertificate {
    static CERT: OnceLock<ProofCertificate> = OnceLock::new();
    CERT.get_or_init(|| {
        let scn = SimulationScenario::comb("AB", Restriction::Restricted);
        let b = single_copy_basis();
        certify_scenario(&scn, &b, Some(&b), &SolverOptions::default(), &CertifyOptions::default()).unwrap()
    })
}

#[test]
fn ab_certificate_verifies_and_roundtrips() {
    let cert = ab_certificate();
    assert!(cert.bound_exact().unwrap() <= q(4001, 10000));
    let report = verify_certificate(cert);
    assert!(report.accepted, "{:?}", report.failures);
    let text = serde_json::to_string(cert).unwrap();
    let back: ProofCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, cert);
    assert_eq!(verify_certificate(&back), report);
}

/// Adds 10^-7 to one component of a `num/den` string.
fn bump(s: &mut String) {
    let x = switchcert::exact::q_parse(s).unwrap() + q(1, 10_000_000);
    *s = switchcert::exact::q_to_string(&x);
}

#[test]
fn tampered_certificates_are_rejected() {
    let cert = ab_certificate();
    let mut r = rng(45);
    for t in 0..20 {
        let mut c = cert.clone();
        let what = match t % 5 {
            0 | 1 => {
                let n = c.gamma_ok.re.len();
                let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
                if r.gen_bool(0.5) {
                    bump(&mut c.gamma_ok.re[i][j]);
                } else {
                    bump(&mut c.gamma_ok.im[i][j]);
                }
                format!("gamma[{i}][{j}]")
            }
            2 | 3 => {
                let k = r.gen_range(0..c.r_ok.len());
                let (i, j) = (r.gen_range(0..2), r.gen_range(0..2));
                if r.gen_bool(0.5) {
                    bump(&mut c.r_ok[k].re[i][j]);
                } else {
                    bump(&mut c.r_ok[k].im[i][j]);
                }
                format!("R[{k}][{i}][{j}]")
            }
            _ => {
                bump(&mut c.bound);
                "bound".into()
            }
        };
        assert!(!verify_certificate(&c).accepted, "tampering {what} went unnoticed");
    }
}
