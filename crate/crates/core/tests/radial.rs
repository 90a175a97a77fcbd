use num_traits::ToPrimitive;
use qpainleve::diffop::z_registry;
use qpainleve::exact::{int, rat, MPoly, Rat};
use qpainleve::params::{Family, ParamSet};
use qpainleve::radial::*;
use qpainleve::report::Status;
use qpainleve::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point2() -> RationalMatrixPoint {
    let g = RatMatrix::from_rows(&[vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
    RationalMatrixPoint::new(vec![rat(1, 2), int(-3)], g).unwrap()
}

#[test]
fn conjugated_point_has_the_prescribed_traces() {
    let pt = point2();
    let f = TracePolynomial::parse("T1^2 + 3*T3").unwrap();
    let sym = f.to_symmetric(&z_registry(2), 2);
    let mut vals = pt.z().to_vec();
    vals.push(int(0));
    assert_eq!(f.eval_matrix(pt.q()), sym.eval(&vals));
}

#[test]
fn degenerate_points_are_rejected() {
    let g = RatMatrix::identity(2);
    assert!(matches!(RationalMatrixPoint::new(vec![int(1), int(1)], g), Err(Error::DegeneratePoint(_))));
    let sing = RatMatrix::from_rows(&[vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
    assert!(matches!(RationalMatrixPoint::new(vec![int(1), int(2)], sing), Err(Error::DegeneratePoint(_))));
}

#[test]
fn laplacian_of_second_power_trace() {
    let h = rat(2, 3);
    for pt in [point2(), RationalMatrixPoint::random(2, &mut ChaCha8Rng::seed_from_u64(3))] {
        let op = MatrixOpSpec::trace(int(1), "pp").to_ncpoly(2).unwrap();
        let op = specialize_coefficients(&op, &[("hbar", h.clone())], &[]).unwrap();
        let v = apply_matrix_operator(&op, &TracePolynomial::power_trace(2), pt.q(), &h).unwrap();
        assert_eq!(v, int(8) * &h * &h);
    }
    let op = MatrixOpSpec::trace(int(1), "p").to_ncpoly(3).unwrap();
    let pt = RationalMatrixPoint::random(3, &mut ChaCha8Rng::seed_from_u64(4));
    assert_eq!(apply_matrix_operator(&op, &TracePolynomial::power_trace(1), pt.q(), &h).unwrap(), int(3) * &h);
    let op = MatrixOpSpec::trace(int(1), "qq").to_ncpoly(3).unwrap();
    let one = TracePolynomial::parse("1").unwrap();
    let s: Rat = pt.z().iter().map(|z| z * z).sum();
    assert_eq!(apply_matrix_operator(&op, &one, pt.q(), &h).unwrap(), s);
}

#[test]
fn matrix_action_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = TracePolynomial::random(&mut rng);
    let op = MatrixOpSpec::trace(int(1), "qpqp").plus(rat(1, 3), &["q", "p"]).to_ncpoly(3).unwrap();
    let op = specialize_coefficients(&op, &[("hbar", rat(3, 2))], &[]).unwrap();
    let z = vec![int(1), rat(-1, 2), int(3)];
    let mut vals = Vec::new();
    for rows in [
        vec![vec![int(1), int(0), int(1)], vec![int(2), int(1), int(0)], vec![int(0), int(1), int(1)]],
        vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(2)], vec![int(-1), int(0), int(1)]],
    ] {
        let pt = RationalMatrixPoint::new(z.clone(), RatMatrix::from_rows(&rows).unwrap()).unwrap();
        vals.push(apply_matrix_operator(&op, &f, pt.q(), &rat(3, 2)).unwrap());
    }
    assert_eq!(vals[0], vals[1]);
}

#[test]
fn second_derivatives_match_finite_differences() {
    let pt = RationalMatrixPoint::random(3, &mut ChaCha8Rng::seed_from_u64(5));
    let f = TracePolynomial::parse("T1*T2 - 2*T3 + T1^3 + T4/5").unwrap();
    let der = MatrixDerivatives::compute(&f, pt.q());
    let q0: Vec<f64> = (0..9).map(|i| pt.q().get(i / 3, i % 3).to_f64().unwrap()).collect();
    let psi = |q: &[f64]| {
        let m = |a: &[f64], b: &[f64]| {
            let mut c = vec![0.0; 9];
            for i in 0..3 {
                for k in 0..3 {
                    for j in 0..3 {
                        c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
                    }
                }
            }
            c
        };
        let tr = |a: &[f64]| a[0] + a[4] + a[8];
        let q2 = m(q, q);
        let q3 = m(&q2, q);
        let q4 = m(&q3, q);
        tr(q) * tr(&q2) - 2.0 * tr(&q3) + tr(q).powi(3) + tr(&q4) / 5.0
    };
    let quotient = |u: usize, v: usize, h: f64| {
        let at = |du: f64, dv: f64| {
            let mut q = q0.clone();
            q[u] += du;
            q[v] += dv;
            psi(&q)
        };
        (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
    };
    for u in 0..9 {
        for v in 0..9 {
            let fd = (4.0 * quotient(u, v, 0.005) - quotient(u, v, 0.01)) / 3.0;
            let exact = der.second(u / 3, u % 3, v / 3, v % 3).to_f64().unwrap();
            assert!((fd - exact).abs() <= 1e-8 * exact.abs().max(1.0), "{u} {v}: {fd} vs {exact}");
        }
    }
}

#[test]
fn radial_matches_matrix_side() {
    for n in [2, 3] {
        for j in Family::ALL {
            let rec = verify_radial_match(j, n, 5, 42).unwrap();
            println!("{} | {} | {} | {:?}", rec.identity, rec.status.as_str(), rec.residual, rec.detail);
            if j == Family::VI {
                assert!(rec.detail.as_deref().unwrap().contains("carries the multiplier 2 "), "{rec:?}");
            } else {
                assert_eq!(rec.status, Status::Pass);
            }
        }
        for k in 0..=3 {
            let rec = verify_trace_qk_p2(n, k, 5, 7).unwrap();
            assert_eq!(rec.status, Status::Pass, "{rec:?}");
        }
    }
}

#[test]
fn printed_radial_constants() {
    let p = ParamSet::new(Family::III)
        .with("hbar", "1/2")
        .unwrap()
        .with("theta0", "1")
        .unwrap()
        .with("theta1", "2")
        .unwrap();
    let op = build_radial_hamiltonian(Family::III, 2, &p, RadialForm::Reduced).unwrap();
    let one = MPoly::one(&z_registry(2));
    let c = op.apply_polynomial(&one).unwrap();
    // ħ²N(1+N²)/2 − (ħN+θ1)Σz
    let z = |i| MPoly::var(&z_registry(2), i);
    let expect = MPoly::constant(&z_registry(2), rat(5, 4)).sub(&z(0).add(&z(1)).scale(&int(3)));
    assert_eq!(c, expect);
    assert!(build_radial_hamiltonian(Family::V, 2, &p, RadialForm::Reduced).is_err());
    let k_pos = ParamSet::new(Family::VI).with("k", "3").unwrap();
    let k_neg = ParamSet::new(Family::VI).with("k", "-3").unwrap();
    let full = |q: ParamSet| {
        q.with("theta0", "1").unwrap().with("theta1", "1/2").unwrap().with("thetat", "2").unwrap()
    };
    assert_eq!(
        build_radial_hamiltonian(Family::VI, 3, &full(k_pos), RadialForm::Reduced).unwrap(),
        build_radial_hamiltonian(Family::VI, 3, &full(k_neg), RadialForm::Reduced).unwrap()
    );
}

#[test]
fn pii_gauge() {
    let p = ParamSet::new(Family::II).with("hbar", "1/3").unwrap().with("theta", "2/7").unwrap().with("kappa", "1").unwrap();
    for n in 1..=3 {
        assert_eq!(verify_pii_gauge(n, &p).unwrap().status, Status::Pass);
    }
}
