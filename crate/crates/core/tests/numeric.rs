use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use qpainleve::error::Error;
use qpainleve::exact::{rat, Rat};
use qpainleve::moments::{build_phi, nagoya_parameters, split_z, system_for, MomentSymbol};
use qpainleve::numeric::*;
use qpainleve::params::{Family, ParamSet};

fn nagoya_point(j: Family) -> (ParamSet, Rat) {
    let mut p = ParamSet::new(j);
    let t = match j {
        Family::II => rat(1, 2),
        Family::III => {
            p.set_rat("b", rat(-1, 3)).unwrap();
            rat(-3, 2)
        }
        Family::IV => {
            p.set_rat("b", rat(-1, 3)).unwrap();
            rat(1, 2)
        }
        Family::V => {
            p.set_rat("b", rat(-1, 3)).unwrap();
            p.set_rat("c", rat(-1, 5)).unwrap();
            rat(3, 2)
        }
        _ => {
            p.set_rat("b", rat(-5, 2)).unwrap();
            p.set_rat("c", rat(-1, 5)).unwrap();
            rat(3, 2)
        }
    };
    (p, t)
}

fn nagoya(j: Family, m: usize, hbar: &str) -> (ParamSet, Rat) {
    let (base, t) = nagoya_point(j);
    (nagoya_parameters(j, m, &base.with("hbar", hbar).unwrap()).unwrap(), t)
}

#[test]
fn moment_relations_hold_on_the_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for j in Family::NAGOYA {
        for _ in 0..3 {
            let (p, t) = random_oracle_point(j, &mut rng).unwrap();
            let worst = moment_relation_residual(j, &p, &t, 6, 192).unwrap();
            assert!(worst < 1e-10, "{j} {} t={t}: {worst:e}", p.render());
        }
    }
}

#[test]
fn second_family_moment_at_zero_time() {
    // ∫_0^∞ e^{−2r³/3} dr = Γ(1/3)(3/2)^{1/3}/3 on each ray; the polyline gives (1 − e^{−2πi/3}) times that
    let ray = 2.678_938_534_707_747_6_f64 * 1.5f64.powf(1.0 / 3.0) / 3.0;
    let ang = -2.0 * std::f64::consts::PI / 3.0;
    let (re, im) = (ray * (1.0 - ang.cos()), -ray * ang.sin());
    let p = ParamSet::new(Family::II);
    let t0 = Float::with_val(192, 0);
    let (v, err) = moment_numeric(Family::II, 0, 0, &t0, &p, &QuadOptions::oracle(192)).unwrap();
    assert!((v.re.to_f64() - re).abs() < 1e-14 && (v.im.to_f64() - im).abs() < 1e-14, "{v}");
    assert!(err < 1e-30);
    let (w, _) = moment_numeric(Family::II, 0, 0, &Float::with_val(128, 0), &p, &QuadOptions::oracle(128)).unwrap();
    assert!(v.sub(&CFloat::new(Float::with_val(192, &w.re), Float::with_val(192, &w.im))).abs_f64() < 1e-30);
}

#[test]
fn contour_contracts() {
    let t = Float::with_val(128, 3) / 2u32;
    let v = ParamSet::new(Family::V).with("b", "-1/3").unwrap().with("c", "-1/5").unwrap();
    let opts = QuadOptions::oracle(128);
    assert!(matches!(moments_numeric(Family::V, &[0], 1, &t, &v, &opts), Err(Error::Usage(_))));
    let bad_v = ParamSet::new(Family::V).with("b", "1/3").unwrap().with("c", "-1/5").unwrap();
    assert!(matches!(moments_numeric(Family::V, &[0], 0, &t, &bad_v, &opts), Err(Error::Domain(_))));
    let iii = ParamSet::new(Family::III).with("b", "1/3").unwrap();
    assert!(matches!(moments_numeric(Family::III, &[0], 0, &t, &iii, &opts), Err(Error::Domain(_))));
    let vi = ParamSet::new(Family::VI).with("a", "1/4").unwrap().with("b", "-1/2").unwrap().with("c", "-1/5").unwrap().with("d", "1").unwrap();
    let half = Float::with_val(128, 1) / 2u32;
    assert!(matches!(moments_numeric(Family::VI, &[0], 0, &half, &vi, &opts), Err(Error::Domain(_))));
    assert!(moments_numeric(Family::VI, &[0, 1], 1, &t, &vi, &opts).is_ok());
    let (p, _) = nagoya(Family::II, 2, "1/2");
    assert!(matches!(phi_numeric(Family::II, 1, 2, &p, &t, &QuadOptions::multi(128, 1e-10), false), Err(Error::UnsupportedMode(_))));
    assert!(matches!(phi_numeric(Family::V, 1, 4, &v, &t, &QuadOptions::multi(128, 1e-10), false), Err(Error::Usage(_))));
    assert!(ContourSpec::of(Family::I).is_err());
}

#[test]
fn doubling_nodes_stays_within_the_error_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for j in Family::NAGOYA {
        let (p, t) = random_oracle_point(j, &mut rng).unwrap();
        let tf = rat_to_float(&t, 192);
        let coarse = QuadOptions { prec: 192, tol: 1e-12, min_level: 2, max_level: 12 };
        let a = moments_numeric(j, &[0, 3], 0, &tf, &p, &coarse).unwrap();
        let fine = QuadOptions { prec: 192, tol: 1e-45, min_level: a.level + 1, max_level: 14 };
        let b = moments_numeric(j, &[0, 3], 0, &tf, &p, &fine).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            let change = x.sub(y).abs_f64() / y.abs_f64();
            assert!(change <= a.rel_error.max(1e-50), "{j}: {change:e} vs {:e}", a.rel_error);
        }
    }
}

fn symbolic_phi_at(j: Family, n: usize, m: usize, p: &ParamSet, t: &Float) -> ZPoly {
    let sys = system_for(j, n, m, p).unwrap();
    let sym = build_phi(&sys, n, m, 1).unwrap();
    let seeds: Vec<i64> = sym
        .expr
        .symbols()
        .iter()
        .map(|s| match s {
            MomentSymbol::Nu(k) => *k,
            MomentSymbol::Rho(_) => panic!("rho seed"),
        })
        .collect();
    let mv = moments_numeric(j, &seeds, 0, t, p, &QuadOptions::oracle(t.prec())).unwrap();
    let moments = seeds.iter().map(|k| MomentSymbol::Nu(*k)).zip(mv.values).collect();
    let mut vals = vec![Float::new(t.prec()); n];
    vals.push(t.clone());
    split_z(&sym.expr, n)
        .into_iter()
        .map(|(e, c)| (e, eval_moment_expr(&c, &vals, &moments).unwrap().0))
        .collect()
}

#[test]
fn wave_function_paths_agree_at_unit_hbar() {
    for j in Family::NAGOYA {
        let sizes: &[(usize, usize)] = if j == Family::II { &[(1, 1), (1, 2)] } else { &[(1, 1), (1, 2), (2, 2)] };
        for &(n, m) in sizes {
            let (p, t) = nagoya(j, m, "1");
            let tf = rat_to_float(&t, 192);
            let phi = phi_numeric(j, n, m, &p, &tf, &QuadOptions::multi(192, 1e-12), false).unwrap();
            let det = andreief_phi(j, n, m, &p, &tf, &QuadOptions::oracle(192)).unwrap();
            let sym = symbolic_phi_at(j, n, m, &p, &tf);
            assert!(zpoly_rel_diff(&phi.coeffs, &det) < 1e-8, "{j} N={n} m={m} determinant");
            assert!(zpoly_rel_diff(&phi.coeffs, &sym) < 1e-8, "{j} N={n} m={m} moment engine");
            assert!(zpoly_rel_diff(&det, &sym) < 1e-25, "{j} N={n} m={m} exact routes");
        }
    }
}

#[test]
fn single_particle_single_integral() {
    for j in Family::NAGOYA {
        let (p, t) = nagoya(j, 1, if j == Family::II { "1" } else { "1/2" });
        let tf = rat_to_float(&t, 192);
        let phi = phi_numeric(j, 1, 1, &p, &tf, &QuadOptions::multi(192, 1e-20), false).unwrap();
        let nu = moments_numeric(j, &[0, 1], 0, &tf, &p, &QuadOptions::oracle(192)).unwrap().values;
        let expect: ZPoly = [(vec![1], nu[0].clone()), (vec![0], nu[1].neg())].into_iter().collect();
        assert!(zpoly_rel_diff(&phi.coeffs, &expect) < 1e-20, "{j}");
    }
}

/// Full-square `∫∫ (u1−u2)² Θ(u1)Θ(u2) (z−u1)(z−u2)` for family V in double precision.
fn full_square_v(b: f64, c: f64, t: f64) -> [f64; 3] {
    let theta = |u: f64, cu: f64| u.powf(-b - 1.0) * cu.powf(-c - 1.0) * (u * t).exp();
    let h = 1.0 / 64.0;
    let pts: Vec<(f64, f64, f64)> = (-384..=384)
        .map(|k| {
            let s = k as f64 * h;
            let v = std::f64::consts::PI * s.sinh();
            let x = 1.0 / (1.0 + (-v).exp());
            let cx = 1.0 / (1.0 + v.exp());
            (x, cx, h * std::f64::consts::PI * s.cosh() * x * cx)
        })
        .filter(|p| p.0 > 0.0 && p.1 > 0.0 && p.2 > 0.0)
        .collect();
    let mut out = [0.0; 3];
    for &(u1, c1, w1) in &pts {
        for &(u2, c2, w2) in &pts {
            let base = w1 * w2 * theta(u1, c1) * theta(u2, c2) * (u1 - u2).powi(2);
            out[0] += base;
            out[1] -= base * (u1 + u2);
            out[2] += base * u1 * u2;
        }
    }
    out
}

#[test]
fn ordered_simplex_is_half_the_full_square() {
    let (p, t) = nagoya(Family::V, 2, "1");
    let tf = rat_to_float(&t, 192);
    let phi = phi_numeric(Family::V, 1, 2, &p, &tf, &QuadOptions::multi(192, 1e-14), false).unwrap();
    let square = full_square_v(-1.0 / 3.0, -1.0 / 5.0, 1.5);
    for (k, want) in square.iter().enumerate() {
        let got = phi.coeffs[&vec![2 - k as u32]].re.to_f64();
        let simplex = got / 2.0;
        assert!((simplex - want / 2.0).abs() < 1e-9 * want.abs().max(1.0), "z^{}: {simplex} vs {}", 2 - k, want / 2.0);
    }
}

#[test]
fn wave_function_is_symmetric_in_z() {
    let (p, t) = nagoya(Family::IV, 2, "1/2");
    let tf = rat_to_float(&t, 192);
    let phi = phi_numeric(Family::IV, 3, 2, &p, &tf, &QuadOptions::multi(192, 1e-10), false).unwrap();
    let z = |a: i32| CFloat::real(Float::with_val(192, a) / 7u32);
    let v1 = phi.eval(&[z(1), z(-3), z(5)]);
    for perm in [[z(-3), z(1), z(5)], [z(5), z(-3), z(1)], [z(1), z(5), z(-3)]] {
        let v2 = phi.eval(&perm);
        assert!(v1.sub(&v2).abs_f64() < 1e-40 * v1.abs_f64().max(1.0));
    }
}

#[test]
fn numeric_schrodinger_single_particle_half_hbar() {
    for j in [Family::III, Family::IV, Family::V, Family::VI] {
        let (p, t) = nagoya(j, 1, "1/2");
        let cfg = NumericPdeConfig::new(192);
        let recs = verify_pde_numeric(j, 1, 1, &p, &t, &cfg, 1e-8).unwrap();
        assert!(recs.iter().all(|r| r.passed()), "{j}: {recs:?}");
    }
}

#[test]
fn numeric_schrodinger_unit_hbar_two_particles() {
    let (p, t) = nagoya(Family::VI, 2, "1");
    let mut cfg = NumericPdeConfig::new(192);
    cfg.quad = QuadOptions::multi(192, 1e-12);
    let sides = pde_residual_numeric(Family::VI, 2, 2, &p, &t, &cfg, None).unwrap();
    assert!(sides.route_gap < 1e-8);
    assert!(sides.residual(2) < 1e-8);
    assert!((sides.residual(1) - 0.5).abs() < 1e-6);
    let flipped = sign_flipped_operator(Family::VI, 2, 2, &p).unwrap();
    let (neg, _) = apply_operator(&flipped, &sides.phi, &rat_to_float(&t, 192)).unwrap();
    let control = NumericPde { operator_side: neg, ..sides };
    assert!(control.residual(1) > 1e-3 && control.residual(2) > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tanh_sinh_power_integrals(num in -9i32..30) {
        let alpha = num as f64 / 10.0;
        let prec = 128;
        let win = Window::for_tails(Rule::TanhSinh, Tail::Power(alpha), Tail::Power(0.0), 80.0).unwrap();
        let a = Float::with_val(prec, num) / 10u32;
        let opts = QuadOptions { prec, tol: 1e-28, min_level: 2, max_level: 10 };
        let r = refine(&opts, |level| {
            let ns = nodes(Rule::TanhSinh, win, level, prec);
            let mut s = Float::new(prec);
            for nd in &ns {
                s += (Float::with_val(prec, &a * &nd.ln_x)).exp() * &nd.w;
            }
            Ok((vec![s], ns.len()))
        }, real_norm).unwrap();
        let exact = Float::with_val(prec, 1) / (a + 1u32);
        let rel = (Float::with_val(prec, &r.values[0] - &exact) / &exact).abs().to_f64();
        prop_assert!(rel < 1e-25, "alpha {alpha}: {rel:e}");
    }

    #[test]
    fn exp_sinh_gamma_integrals(num in -9i32..40) {
        let prec = 128;
        let win = Window::for_tails(Rule::ExpSinh, Tail::Power(num as f64 / 10.0), Tail::Decay { kappa: 1.0, p: 1.0, shift: 4.0 }, 80.0).unwrap();
        let a = Float::with_val(prec, num) / 10u32;
        let opts = QuadOptions { prec, tol: 1e-28, min_level: 2, max_level: 10 };
        let r = refine(&opts, |level| {
            let ns = nodes(Rule::ExpSinh, win, level, prec);
            let mut s = Float::new(prec);
            for nd in &ns {
                s += (Float::with_val(prec, &a * &nd.ln_x) - &nd.x).exp() * &nd.w;
            }
            Ok((vec![s], ns.len()))
        }, real_norm).unwrap();
        let exact = (a + 1u32).gamma();
        let rel = (Float::with_val(prec, &r.values[0] - &exact) / &exact).abs().to_f64();
        prop_assert!(rel < 1e-25, "alpha {num}/10: {rel:e}");
    }
}
