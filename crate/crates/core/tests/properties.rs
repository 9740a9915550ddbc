use proptest::prelude::*;

use singular_paths::grid::{Grid, RngStream, SampledPath};
use singular_paths::integrate::{chen_defect, young_integral, InhomRoughPath};
use singular_paths::norms::{
    reparametrize_power, restricted_equivalence_constant, restricted_seminorm,
    singular_holder_seminorm, singular_via_eps_profile, undo_power_reparametrization,
    weighted_seminorm,
};
use singular_paths::roughvol::{
    negative_noise_part, renorm_constant, rho_bar, rl_fbm, stationary_fbm, KernelSpec,
    MollifierSpec, NoisePath, RenormMethod,
};
use singular_paths::sle::{critical_r, loewner_trace, moment_exponents, TraceConfig};

/// Path on the lattice `{k / n}` with the given values.
fn lattice_path(values: Vec<f64>) -> SampledPath {
    let n = values.len();
    SampledPath::new(Grid::lattice(1.0, n, 1, n as i64).unwrap(), values).unwrap()
}

fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), stream in 0u64..1000) {
        let a = RngStream::new(seed, stream).standard_normals(16);
        let b = RngStream::new(seed, stream).standard_normals(16);
        let c = RngStream::new(seed, stream + 1).standard_normals(16);
        prop_assert_eq!(&a, &b);
        prop_assert_ne!(&a, &c);
    }

    #[test]
    fn profile_identity(v in values(2..120), alpha in 0.05f64..1.0, gap in 0.0f64..1.5) {
        let p = lattice_path(v);
        let eta = alpha - gap;
        let direct = singular_holder_seminorm(&p, alpha, eta).unwrap().value;
        let via = singular_via_eps_profile(&p, alpha, eta).unwrap();
        prop_assert!((direct - via).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn nondecreasing_in_eta(v in values(2..100), alpha in 0.05f64..1.0, g1 in 0.0f64..1.0, g2 in 0.0f64..1.0) {
        let p = lattice_path(v);
        let (lo, hi) = (alpha - g1.max(g2), alpha - g1.min(g2));
        let a = singular_holder_seminorm(&p, alpha, lo).unwrap().value;
        let b = singular_holder_seminorm(&p, alpha, hi).unwrap().value;
        // The weight s^{alpha - eta} grows with eta on (0, 1].
        prop_assert!(a <= b * (1.0 + 1e-12));
    }

    #[test]
    fn restricted_sandwich(
        v in values(2..100),
        alpha in 0.05f64..1.0,
        delta in 0.05f64..1.0,
        gap in 0.0f64..1.0,
    ) {
        let p = lattice_path(v);
        let eta = delta - gap;
        let c = restricted_equivalence_constant(alpha, delta, eta).unwrap();
        let r = restricted_seminorm(&p, alpha, delta, eta).unwrap();
        let f = weighted_seminorm(&p, alpha, delta, eta).unwrap();
        prop_assert!(r <= f * (1.0 + 1e-12));
        prop_assert!(f <= c * r * (1.0 + 1e-12));
    }

    #[test]
    fn reparametrization_round_trip(v in values(2..100), beta in 1.0f64..6.0) {
        let p = lattice_path(v);
        let z = reparametrize_power(&p, beta).unwrap();
        let back = undo_power_reparametrization(&z, beta).unwrap();
        prop_assert_eq!(back.values(), p.values());
        for (a, b) in back.times().iter().zip(p.times()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn young_additivity(y in values(8..64), x in values(8..64), cut in 0.0f64..1.0) {
        let n = y.len().min(x.len());
        let (yp, xp) = (lattice_path(y[..n].to_vec()), lattice_path(x[..n].to_vec()));
        let t = yp.times();
        let (s, e) = (t[0], t[n - 1]);
        let u = t[1 + ((n - 3) as f64 * cut) as usize];
        let whole = young_integral(&yp, &xp, s, e).unwrap().value;
        let split = young_integral(&yp, &xp, s, u).unwrap().value + young_integral(&yp, &xp, u, e).unwrap().value;
        prop_assert!((whole - split).abs() <= 1e-12 * (1.0 + whole.abs()));
    }

    #[test]
    fn chen_relation(x in values(3..60), xh in values(3..60)) {
        let n = x.len().min(xh.len());
        let rp = InhomRoughPath::from_left_point(
            lattice_path(x[..n].to_vec()),
            lattice_path(xh[..n].to_vec()),
            0.45,
            0.4,
        )
        .unwrap();
        let r = chen_defect(&rp);
        prop_assert!(r.max_defect <= 1e-10 * r.scale.max(1e-300));
    }

    #[test]
    fn moment_identity(r in 0.0f64..10.0, kappa in 0.01f64..8.0) {
        let (q, zeta) = moment_exponents(r, kappa);
        prop_assert!((zeta - (q - kappa * r / 4.0)).abs() <= 1e-12 * (1.0 + q.abs()));
        prop_assert!(critical_r(kappa) > 0.5);
    }

    #[test]
    fn kernel_agreement_and_domination(hurst in 0.26f64..0.5, u in 0.0f64..1.6) {
        let k = KernelSpec::new(hurst, 1.0).unwrap();
        let u = u.max(1e-6);
        let (c, rl) = (k.stationary(u), k.rl(u));
        if u <= 1.0 {
            prop_assert_eq!(c, rl);
        }
        prop_assert!(c >= 0.0 && c <= rl);
    }

    #[test]
    fn closed_form_is_homogeneous(hurst in 0.26f64..0.5, eps in 0.001f64..0.2, lambda in 0.1f64..1.0) {
        let k = KernelSpec::new(hurst, 1.0).unwrap();
        let c = |e: f64| renorm_constant(&k, &MollifierSpec::new(e).unwrap(), RenormMethod::ClosedForm)
            .unwrap()
            .value;
        let ratio = c(lambda * eps) / c(eps);
        prop_assert!((ratio - lambda.powf(hurst - 0.5)).abs() <= 1e-12 * ratio);
    }

    #[test]
    fn mollifier_is_even(y in 0.0f64..2.0) {
        prop_assert!((rho_bar(y) - rho_bar(-y)).abs() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stationary_split_matches(seed in any::<u64>(), hurst in 0.26f64..0.5) {
        let k = KernelSpec::new(hurst, 1.0).unwrap();
        let nz = NoisePath::sample(1.0, 256, 1.5, 0.0, &RngStream::new(seed, 0)).unwrap();
        let wh = rl_fbm(&nz, hurst).unwrap();
        let what = stationary_fbm(&nz, &k).unwrap();
        let neg = negative_noise_part(&nz, &k).unwrap();
        for i in 0..wh.len() {
            let positive = what.values()[i] - neg.values()[i];
            prop_assert!((positive - wh.values()[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn trace_stays_in_upper_half_plane(a in -2.0f64..2.0, b in 0.5f64..6.0) {
        let cfg = TraceConfig { steps: 256, ..TraceConfig::default() };
        let driver = SampledPath::from_fn(Grid::lattice(1.0, 256, 0, 256).unwrap(), |t| a * (b * t).sin())
            .unwrap();
        let trace = loewner_trace(&driver, &cfg).unwrap();
        prop_assert!(trace.path.values().iter().all(|z| z.im >= 0.0));
    }
}
