use qpainleve::exact::rat;
use qpainleve::params::Family;
use qpainleve::weyl::*;

fn hbar() -> qpainleve::exact::RatFun {
    cvar("hbar")
}

#[test]
fn normal_order_examples() {
    let w = Mode::Weyl;
    let p11 = NCPoly::p(1, w, 0, 0);
    let q11 = NCPoly::q(1, w, 0, 0);
    let got = p11.mul(&q11).normal_order().unwrap();
    let want = q11.mul(&p11).add(&NCPoly::scalar(1, w, hbar()));
    assert_eq!(got, want);

    let q12 = NCPoly::q(2, w, 0, 1);
    let p21 = NCPoly::p(2, w, 1, 0);
    let x = q12.mul(&p21);
    assert_eq!(x.normal_order().unwrap().terms().len(), 1);
    assert!(x.normal_order().unwrap() == x);

    let p12 = NCPoly::p(2, w, 0, 1);
    let got = p12.mul(&q12).normal_order().unwrap();
    assert_eq!(got, q12.mul(&p12));
    let q21 = NCPoly::q(2, w, 1, 0);
    let got = p12.mul(&q21).normal_order().unwrap();
    assert_eq!(got, q21.mul(&p12).add(&NCPoly::scalar(2, w, hbar())));
}

#[test]
fn free_mode_refuses_normal_order() {
    let x = NCPoly::letter(1, Mode::Free, Letter::FreeP);
    assert!(matches!(x.normal_order(), Err(qpainleve::Error::UnsupportedMode(_))));
}

#[test]
fn trace_identities_hold() {
    for n in 1..=3 {
        for c in trace_identities_check(n).unwrap() {
            assert!(c.passed(), "{} -> {}", c.identity, c.residual);
        }
    }
}

#[test]
fn trace_difference_values() {
    let d = trace_difference(2, "pq", "qp").unwrap();
    assert_eq!(d, NCPoly::scalar(2, Mode::Weyl, hbar().scale(&rat(4, 1))));
    let d = trace_difference(1, "pq", "qp").unwrap();
    assert_eq!(d, NCPoly::scalar(1, Mode::Weyl, hbar()));
}

#[test]
fn worked_example_needs_the_factor_n() {
    for n in 1..=3 {
        for c in worked_example_check(n).unwrap() {
            let printed = c.identity.starts_with("[p, Tr(pqpq)] = 2 hbar pqp + hbar^2 p");
            assert_eq!(c.passed(), n == 1 || !printed, "{} -> {}", c.identity, c.residual);
        }
    }
}

#[test]
fn eom_and_zero_curvature() {
    for c in verify_eom_pvi(2).unwrap() {
        assert!(c.passed(), "{} -> {}", c.identity, c.residual);
    }
    for c in verify_zero_curvature_pvi().unwrap() {
        assert!(c.passed(), "{} -> {}", c.identity, c.residual);
    }
}

#[test]
fn hamiltonian_terms() {
    let h4 = quantum_hamiltonian(Family::IV, 1).unwrap();
    assert!(!h4.is_zero());
    let h2q = quantum_hamiltonian(Family::II, 2).unwrap();
    let h2c = classical_hamiltonian(Family::II, 2).unwrap();
    assert_eq!(h2q.with_mode(Mode::Classical), h2c);
}
