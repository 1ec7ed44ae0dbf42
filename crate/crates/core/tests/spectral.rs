use nalgebra::DMatrix;
use urqt::dynamics::{integrate_surqt, RateFamily, RtInit};
use urqt::graph::{DirectedNetwork, ModelParams};
use urqt::instances::{random_instance, random_omega_point};
use urqt::ode::uniform_grid;
use urqt::spectral::{
    build_q1, build_q2, equilibrium_map, find_rumor_equilibrium, rumor_free_linearization,
    spectral_abscissa, spectral_radius_nonnegative, spectral_report, sufficient_criteria, Verdict,
};
use urqt::Matrix;

fn dense_abscissa(m: &Matrix) -> f64 {
    let n = m.n();
    let d = DMatrix::from_row_slice(n, n, m.as_slice());
    d.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn abscissa_agrees_with_dense_eigensolver() {
    for seed in 0..30 {
        let n = 3 + seed as usize % 25;
        let p = random_instance(n, seed).unwrap();
        let fam = RateFamily::linear(&p);
        for m in [
            build_q1(&p, &fam),
            build_q2(&p, &fam),
            rumor_free_linearization(&p, &fam),
        ] {
            let ours = spectral_abscissa(&m).unwrap().value;
            let reference = dense_abscissa(&m);
            assert!(
                (ours - reference).abs() < 1e-8,
                "seed {seed}: {ours} vs {reference}"
            );
        }
    }
}

#[test]
fn perron_vector_is_positive_eigenvector() {
    for seed in 0..20 {
        let p = random_instance(15, seed).unwrap();
        let m = build_q2(&p, &RateFamily::saturating(&p, 0.7).unwrap());
        let perron = spectral_abscissa(&m).unwrap();
        assert!(perron.vector.iter().all(|&v| v > 0.0));
        let mv = m.mul_vec(&perron.vector);
        for (a, b) in mv.iter().zip(&perron.vector) {
            assert!((a - perron.value * b).abs() < 1e-9);
        }
    }
}

#[test]
fn radius_within_norm_bounds() {
    for seed in 0..30 {
        let p = random_instance(12, seed).unwrap();
        let inv: Vec<f64> = p.theta.iter().map(|t| 1.0 / t).collect();
        let m = p.beta_t.scale_cols(&inv);
        let rho = spectral_radius_nonnegative(&m).unwrap();
        let max_col = m.col_sums().into_iter().fold(0.0, f64::max);
        let max_row = m.row_sums().into_iter().fold(0.0, f64::max);
        assert!(rho <= max_col + 1e-12 && rho <= max_row + 1e-12);
        assert!(spectral_radius_nonnegative(&m.scale(-1.0)).is_err());
    }
}

#[test]
fn q2_below_q1_and_limit_in_delta() {
    for seed in 0..10 {
        let mut p = random_instance(10, seed).unwrap();
        let fam = RateFamily::linear(&p);
        let (q1, q2) = (build_q1(&p, &fam), build_q2(&p, &fam));
        assert!(q1.as_slice().iter().zip(q2.as_slice()).all(|(a, b)| b <= a));
        let (s1, s2) = (
            spectral_abscissa(&q1).unwrap().value,
            spectral_abscissa(&q2).unwrap().value,
        );
        assert!(s2 <= s1);
        // a fast return from quarantine removes the middle term of Q2
        p.delta = vec![1e9; 10];
        let q2 = build_q2(&p, &fam);
        let lin = rumor_free_linearization(&p, &fam);
        let gap = spectral_abscissa(&q2).unwrap().value - spectral_abscissa(&lin).unwrap().value;
        assert!(gap.abs() < 1e-6);
    }
}

#[test]
fn corollary_chain_has_no_counterexamples() {
    let (mut c_true, mut d_true) = (0, 0);
    for seed in 0..100 {
        let p = random_instance(10, seed).unwrap();
        let c = sufficient_criteria(&p).unwrap();
        let s = spectral_abscissa(&build_q1(&p, &RateFamily::linear(&p)))
            .unwrap()
            .value;
        assert!(!c.d || c.b);
        assert!(!c.c || c.b);
        assert!(!c.b || c.a);
        assert!(!c.a || s < 0.0);
        c_true += c.c as usize;
        d_true += c.d as usize;
    }
    assert!(c_true > 0 && d_true > 0, "chain only vacuously true");
}

#[test]
fn equilibrium_map_is_monotone() {
    for seed in 0..20 {
        let p = random_instance(8, seed).unwrap();
        let fam = RateFamily::saturating(&p, 1.5).unwrap();
        let cap: Vec<f64> = (0..8)
            .map(|i| p.delta[i] / (p.theta[i] + p.delta[i]))
            .collect();
        let a: Vec<f64> = random_omega_point(8, seed)
            .iter()
            .zip(&cap)
            .map(|(s, c)| s.r * c)
            .collect();
        let b: Vec<f64> = a
            .iter()
            .zip(&cap)
            .enumerate()
            .map(|(i, (x, c))| x + (c - x) * ((i % 3) as f64) / 3.0)
            .collect();
        let (ha, hb) = (equilibrium_map(&p, &fam, &a), equilibrium_map(&p, &fam, &b));
        for i in 0..8 {
            assert!(ha[i] <= hb[i] + 1e-15);
            assert!(hb[i] < cap[i]);
        }
    }
}

#[test]
fn equilibria_are_fixed_points_of_the_dynamics() {
    let mut found = 0;
    for seed in 0..30 {
        let p = random_instance(10, seed).unwrap();
        let fam = RateFamily::linear(&p);
        let eq = find_rumor_equilibrium(&p, &fam).unwrap();
        if !eq.converged {
            continue;
        }
        found += 1;
        assert!(eq.worst_decrease >= -1e-15, "iterates decreased");
        assert!(eq.residual <= 1e-9);
        let init: Vec<RtInit> =
            eq.r.iter()
                .zip(&eq.t)
                .map(|(&r, &t)| RtInit { r, t })
                .collect();
        let traj = integrate_surqt(&p, &fam, &init, &[0.0, 20.0]).unwrap();
        for i in 0..10 {
            assert!((traj.r[1][i] - eq.r[i]).abs() < 1e-6);
        }
    }
    assert!(found >= 5);
}

fn bisect(mut lo: f64, mut hi: f64, h: impl Fn(f64) -> f64) -> f64 {
    let s_lo = h(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn symmetric_pair_matches_bisection() {
    let g = DirectedNetwork::complete(2);
    let (bt, gr, th, de) = (1.2, 0.3, 0.4, 0.5);
    let p = ModelParams::uniform(g.clone(), g, [0.2, bt, 0.2, gr], th, de).unwrap();
    let c = (th + de) / de;
    for (fam, profile) in [
        (
            RateFamily::linear(&p),
            Box::new(|z: f64| z) as Box<dyn Fn(f64) -> f64>,
        ),
        (
            RateFamily::saturating(&p, 0.8).unwrap(),
            Box::new(|z: f64| 0.8 * (1.0 - (-z / 0.8).exp())),
        ),
    ] {
        // R (theta + g(T)) = T f(R) on the symmetric line, T = 1 - c R
        let h = |r: f64| {
            let t = 1.0 - c * r;
            t * profile(bt * r) - r * (th + profile(gr * t))
        };
        let oracle = bisect(1e-9, 1.0 / c, h);
        let eq = find_rumor_equilibrium(&p, &fam).unwrap();
        assert!(eq.converged && eq.residual <= 1e-12);
        for i in 0..2 {
            assert!((eq.r[i] - oracle).abs() < 1e-10, "{} vs {oracle}", eq.r[i]);
            assert!((eq.t[i] - (1.0 - c * oracle)).abs() < 1e-10);
        }
    }
}

#[test]
fn positive_q1_need_not_give_a_rumor_equilibrium() {
    // s(Q1) = 0.2 > 0, but recovery at full truth makes E0 stable
    let g = DirectedNetwork::complete(2);
    let p = ModelParams::uniform(g.clone(), g, [0.2, 0.5, 0.2, 0.5], 0.3, 0.5).unwrap();
    let fam = RateFamily::linear(&p);
    assert!((spectral_abscissa(&build_q1(&p, &fam)).unwrap().value - 0.2).abs() < 1e-12);
    assert!(
        spectral_abscissa(&rumor_free_linearization(&p, &fam))
            .unwrap()
            .value
            < 0.0
    );
    assert!(!find_rumor_equilibrium(&p, &fam).unwrap().converged);
    let init = vec![RtInit { r: 0.3, t: 0.5 }; 2];
    let traj = integrate_surqt(&p, &fam, &init, &[0.0, 100.0]).unwrap();
    assert!(traj.r_frac[1] < 1e-6);
}

#[test]
fn verdict_follows_thresholds() {
    for seed in 0..20 {
        let p = random_instance(10, seed).unwrap();
        let rep = spectral_report(&p, &RateFamily::linear(&p), true).unwrap();
        assert_eq!(rep.verdict, Verdict::classify(rep.s_q1, rep.s_q2));
        if rep.corollary_c || rep.corollary_d {
            assert_eq!(rep.verdict, Verdict::DiesOut);
        }
        if rep.equilibrium.converged {
            assert!(rep.s_q1 > 0.0);
        }
    }
}

#[test]
fn bounds_hold_on_long_horizons() {
    for seed in 0..10 {
        let p = random_instance(10, seed).unwrap();
        let fam = RateFamily::linear(&p);
        let rep = spectral_report(&p, &fam, false).unwrap();
        let tgrid = uniform_grid(300.0, 1.0).unwrap();
        let traj = integrate_surqt(&p, &fam, &random_omega_point(10, seed), &tgrid).unwrap();
        for k in 200..tgrid.len() {
            for i in 0..10 {
                assert!(traj.r[k][i] <= rep.bounds_a[i] + 1e-3);
                assert!(traj.t[k][i] >= rep.bounds_b[i] - 1e-3);
            }
        }
    }
}
