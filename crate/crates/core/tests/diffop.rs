use qpainleve::diffop::*;
use qpainleve::exact::{int, rat, MPoly, RatFun};
use qpainleve::params::{Family, ParamSet};
use qpainleve::radial::{build_radial_hamiltonian, pii_gauge_exponent, RadialForm};
use qpainleve::report::Status;

fn z(n: usize, i: usize) -> MPoly {
    MPoly::var(&z_registry(n), i)
}

#[test]
fn canonical_term_shapes() {
    let dd = canonicalize(2, &[Term::DividedDifference(tc(int(1)))]);
    let inv = RatFun::inv_factor(&z(2, 0).sub(&z(2, 1)), 1).scale(&int(2));
    assert_eq!(dd.first()[0], inv);
    assert_eq!(dd.first()[1], inv.neg());
    let pot = canonicalize(2, &[Term::PotentialSingle(tc(int(1)))]);
    assert_eq!(*pot.zeroth(), RatFun::inv_factor(&z(2, 0).sub(&z(2, 1)), 2).scale(&int(2)));
    assert!(canonicalize(3, &[]).is_zero());
}

#[test]
fn divided_difference_application() {
    // Σ_{ρ≠σ}(∂_ρ − ∂_σ)/(z_ρ − z_σ) is DD(1)
    let dd = canonicalize(2, &[Term::DividedDifference(tc(int(1)))]);
    let f = z(2, 0).pow(2).add(&z(2, 1).pow(2));
    assert_eq!(dd.apply_polynomial(&f).unwrap(), MPoly::constant(&z_registry(2), int(4)));
    assert!(dd.apply_polynomial(&z(2, 0).add(&z(2, 1))).unwrap().is_zero());
    assert!(dd.apply(&z(2, 0)).is_err());
}

#[test]
fn builders_are_symmetric_and_conjugation_round_trips() {
    let p = ParamSet::new(Family::VI)
        .with("hbar", "1/2")
        .unwrap()
        .with("a", "1/3")
        .unwrap()
        .with("b", "-1/5")
        .unwrap()
        .with("c", "2/7")
        .unwrap()
        .with("d", "1/11")
        .unwrap();
    for j in [Family::II, Family::III, Family::IV, Family::V, Family::VI] {
        for n in 1..=3 {
            let op = build_cp_hamiltonian(j, n, 2, &p).unwrap();
            assert!(op.is_symmetric(), "{j} N={n}");
            let back = op.conjugate_by_vandermonde(&rat(3, 2)).conjugate_by_vandermonde(&rat(-3, 2));
            assert_eq!(back, op);
            assert_eq!(op.conjugate_by_vandermonde(&int(0)), op);
        }
    }
}

#[test]
fn cp_printed_coefficients() {
    let p = ParamSet::new(Family::IV).with("b", "-1/3").unwrap().with("hbar", "1").unwrap();
    let op = build_cp_hamiltonian(Family::IV, 2, 3, &p).unwrap();
    // constant ħNm·t = 6t on the input 1
    let one = MPoly::one(&z_registry(2));
    let t = MPoly::var(&z_registry(2), 2);
    let got = op.apply_polynomial(&one).unwrap();
    assert_eq!(got, t.scale(&int(6)).add(&z(2, 0).add(&z(2, 1)).scale(&int(3))));
    assert!(build_cp_hamiltonian(Family::I, 2, 1, &p).is_err());
}

#[test]
fn n1_reduction_all_families() {
    let p = ParamSet::default().with("hbar", "1/3").unwrap().with("b", "2/5").unwrap().with("c", "-1/7").unwrap();
    for j in [Family::II, Family::III, Family::IV, Family::V, Family::VI] {
        for m in 1..=3 {
            let rec = check_n1_reduction(j, m, &p).unwrap();
            assert_eq!(rec.status, Status::Pass, "{rec:?}");
        }
    }
}

#[test]
fn pii_gauge_recovers_gauged_hamiltonian() {
    let p = ParamSet::new(Family::II)
        .with("hbar", "2/3")
        .unwrap()
        .with("kappa", "3/4")
        .unwrap()
        .with("theta", "1/5")
        .unwrap();
    for n in 1..=3 {
        let pre = build_radial_hamiltonian(Family::II, n, &p, RadialForm::Reduced).unwrap();
        let post = build_radial_hamiltonian(Family::II, n, &p, RadialForm::Gauged).unwrap();
        let g = pre.gauge_scalar_conjugate(&pii_gauge_exponent(n), &p.hbar()).unwrap();
        assert_eq!(g, post, "N={n}: {:?}", g.slot_differences(&post));
        assert_eq!(pre.gauge_scalar_conjugate(&MPoly::zero(&z_registry(n)), &p.hbar()).unwrap(), pre);
    }
}

#[test]
fn gauge_identities_hold_on_every_branch() {
    for n in [2, 3] {
        for h in [rat(1, 2), rat(1, 3), int(2)] {
            for k in kappa_branches(&h) {
                for a in 0..=3 {
                    let rec = check_gauge_family(n, a, &h, &k).unwrap();
                    assert!(rec.passed(), "{} -> {} {:?}", rec.identity, rec.residual, rec.detail);
                }
                let rec = check_pii_gauge_lemma(n, 2, &h, &k).unwrap();
                assert!(rec.passed(), "{} -> {:?}", rec.identity, rec.detail);
            }
        }
    }
}

#[test]
fn table1_second_family_rows_match() {
    let base = ParamSet::default()
        .with("a", "1/3")
        .unwrap()
        .with("b", "-1/5")
        .unwrap()
        .with("c", "2/7")
        .unwrap()
        .with("d", "1/11")
        .unwrap();
    for j in [Family::II, Family::III, Family::IV, Family::V, Family::VI] {
        for n in [2, 3] {
            let p = table1_params(j, &int(1), Table1Mode::Ungauged, 2, n, &base).unwrap();
            let rec = check_table1(j, n, 2, &p, Table1Mode::Ungauged).unwrap();
            if j == Family::II {
                assert!(rec.passed(), "{} -> {:?}", rec.identity, rec.detail);
            }
            for h in [rat(1, 2), int(2)] {
                let p = table1_params(j, &h, Table1Mode::Gauged, 2, n, &base).unwrap();
                let rec = check_table1(j, n, 2, &p, Table1Mode::Gauged).unwrap();
                if j == Family::II {
                    assert!(rec.passed(), "{} -> {:?}", rec.identity, rec.detail);
                }
            }
        }
    }
    assert!(table1_params(Family::II, &rat(1, 2), Table1Mode::Ungauged, 1, 2, &base).is_err());
}
