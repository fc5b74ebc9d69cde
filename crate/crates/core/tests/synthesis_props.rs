use framekz::hilbert::*;
use framekz::kaczmarz::*;
use framekz::synthesis::*;
use framekz::triangular::*;
use framekz_testkit as tk;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn stable_admissible(seed: u64, d: usize, l: usize) -> UnitVectorSequence {
    let mut rng = tk::rng(seed);
    UnitVectorSequence::new(tk::admissible_sequence(&mut rng, d, l + 1, 0.1), &ToleranceConfig::default()).unwrap()
}

fn random_bessel(seed: u64, d: usize, len: usize) -> BesselSequence {
    let mut rng = tk::rng(seed);
    let scale = rng.random_range(0.05..=1.0);
    validate_bessel(tk::bessel_sequence(&mut rng, d, len, scale), &ToleranceConfig::default()).unwrap()
}

/// `max |Δe| / max |Δg|` for a small perturbation of `g_1..g_L` inside `g_0^⊥`.
fn condition_estimate(gs: &BesselSequence, units: &UnitVectorSequence, tol: &ToleranceConfig) -> f64 {
    let step = 1e-9;
    let mut rng = tk::rng(0xc0de);
    let g = gs.vectors();
    let mut nudged = g.to_vec();
    for v in &mut nudged[1..] {
        let mut delta = tk::gaussian_vector(&mut rng, v.len());
        let along = inner(&delta, &g[0]).unwrap();
        delta -= &g[0] * along;
        let scale = delta.iter().map(|z| z.norm()).fold(0.0, f64::max);
        *v += delta.unscale(scale / step);
    }
    let size = tk::max_entry_distance(&nudged, g);
    match validate_bessel(nudged, tol).and_then(|p| synthesize_admissible(&p, tol)) {
        Ok(out) => tk::max_entry_distance(out.units.vectors(), units.vectors()) / size,
        Err(_) => f64::INFINITY,
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn admissible_inverse_recovers_units(seed in any::<u64>(), d in 2usize..=8, extra in 0usize..=8) {
        let tol = ToleranceConfig::default();
        let l = (d + extra).min(16);
        let es = stable_admissible(seed, d, l);
        let gs = validate_bessel(auxiliary_sequence(&es).into_vectors(), &tol).unwrap();
        let out = synthesize_admissible(&gs, &tol).unwrap();
        prop_assert!(out.diagnostics.non_unique_steps.is_empty());
        prop_assert!(out.diagnostics.kernel_dims.iter().all(|&k| k == 1));
        prop_assert!(out.diagnostics.solution_norms.iter().all(|&y| y < 1.0));
        prop_assert!(out.diagnostics.kernel_containment.unwrap() <= tol.eps_id);
        let back = auxiliary_sequence(&out.units);
        prop_assert!(tk::max_entry_distance(back.vectors(), gs.vectors()) <= 1e-8);
        // The forward error is bounded by the conditioning of g -> e, which can
        // exceed 1e8 on long sequences with small overlaps; estimate it by
        // perturbing g and allow unit roundoff times that estimate.
        let err = tk::max_entry_distance(out.units.vectors(), es.vectors());
        let kappa = condition_estimate(&gs, &out.units, &tol);
        prop_assert!(err <= 1e-8_f64.max(64.0 * f64::EPSILON * kappa), "error {err:e}, condition {kappa:e}");
    }

    #[test]
    fn triangular_inverse_reproduces_bessel(seed in any::<u64>(), d in 1usize..=8, len in 1usize..=24) {
        let tol = ToleranceConfig::default();
        let gs = random_bessel(seed, d, len);
        let out = synthesize_triangular(&gs, &tol).unwrap();
        let back = auxiliary_sequence(&out.units);
        prop_assert!(tk::max_entry_distance(back.vectors(), gs.vectors()) <= 1e-8);
        prop_assert!(out.diagnostics.max_unit_deviation <= tol.eps_id);
        prop_assert!(out.diagnostics.overlap_residual.unwrap() <= tol.eps_id);
        // the synthesized pair reproduces the Gram matrix of g
        let pair = triangular_pair(&out.units);
        prop_assert!(max_abs(&(gram_via_u(&pair) - gs.gram())) <= tol.eps_id);
    }

    #[test]
    fn admissible_inverse_reproduces_bessel(seed in any::<u64>(), d in 1usize..=6, len in 1usize..=12) {
        let tol = ToleranceConfig::default();
        let gs = random_bessel(seed, d, len);
        let out = synthesize_admissible(&gs, &tol).unwrap();
        let back = auxiliary_sequence(&out.units);
        prop_assert!(tk::max_entry_distance(back.vectors(), gs.vectors()) <= 1e-8);
        prop_assert!(out.diagnostics.solution_norms.iter().all(|&y| y <= 1.0 + tol.eps_id));
        for o in out.units.consecutive_overlaps() {
            prop_assert!(o >= 0.0);
        }
        for w in out.units.vectors().windows(2) {
            let c = inner(&w[1], &w[0]).unwrap();
            prop_assert!(c.im.abs() <= 1e-8 && c.re >= -1e-8);
        }
    }

    #[test]
    fn parseval_frames_are_tight_and_effective(seed in any::<u64>(), d in 1usize..=6, extra in 0usize..=6) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let gs = validate_bessel(tk::parseval_frame(&mut rng, d, d + extra), &tol).unwrap();
        prop_assert!(is_tight_frame(&gs, &tol));
        let g = gs.gram();
        prop_assert!(operator_norm(&(&g * &g - &g)) <= 1e-10);
        for _ in 0..5 {
            let x = tk::gaussian_vector(&mut rng, d);
            prop_assert!(defect(&x, gs.vectors()).unwrap().abs() <= tol.eps_id * x.norm_squared().max(1.0));
        }
        for out in [synthesize_triangular(&gs, &tol).unwrap(), synthesize_admissible(&gs, &tol).unwrap()] {
            prop_assert!((trace_dimension(&triangular_pair(&out.units)) - d as f64).abs() <= 1e-8);
            for _ in 0..3 {
                let x = tk::gaussian_vector(&mut rng, d);
                let trace = run_kaczmarz(&x, &out.units).unwrap();
                prop_assert!(trace.defect.abs() <= tol.eps_id * x.norm_squared().max(1.0));
            }
        }
    }

    #[test]
    fn strict_contractions_are_not_tight(seed in any::<u64>(), d in 2usize..=6, len in 2usize..=10) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let scale = rng.random_range(0.1..0.9);
        let gs = validate_bessel(tk::bessel_sequence(&mut rng, d, len, scale), &tol).unwrap();
        prop_assert!(is_contraction(&gs.gram(), &tol).unwrap());
        prop_assert!(!is_projection(&gs.gram(), &tol).unwrap());
        prop_assert!(!is_tight_frame(&gs, &tol));
    }

    #[test]
    fn stability_equivalence_on_random_units(seed in any::<u64>(), d in 1usize..=5, len in 1usize..=12) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let es = UnitVectorSequence::new(tk::unit_sequence(&mut rng, d, len), &tol).unwrap();
        prop_assert!(stability_equivalence_holds(&es, &tol));
    }

    #[test]
    fn validation_reports_every_violation(seed in any::<u64>(), d in 2usize..=5, len in 3usize..=8) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let mut g = tk::bessel_sequence(&mut rng, d, len, 1.0);
        g[0] *= num_complex::Complex64::new(1.5, 0.0);
        let shift = &g[0] * num_complex::Complex64::new(0.3, 0.0);
        g[1] += shift;
        for v in &mut g[2..] {
            *v *= num_complex::Complex64::new(2.0, 0.0);
        }
        match validate_bessel(g, &tol) {
            Err(framekz::Error::InvalidBessel(v)) => {
                let keys: Vec<String> = v.iter().map(|x| x.key()).collect();
                prop_assert!(keys.contains(&"g0_norm".to_string()));
                prop_assert!(keys.contains(&"g0_orthogonality[1]".to_string()));
                prop_assert!(keys.contains(&"contraction".to_string()));
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}

#[test]
fn orthonormal_basis_breaks_stability_by_overlap() {
    let tol = ToleranceConfig::default();
    let es = UnitVectorSequence::new(
        vec![real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0]), real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0])],
        &tol,
    )
    .unwrap();
    let sides = stability_sides(&es, &tol);
    assert!(sides.iter().all(|(l, r)| l == r));
    // level 1: the tail still spans but the first overlap vanishes
    assert_eq!(sides[1], (false, false));
    let report = stability_report(&es, &tol);
    assert_eq!(report.units_stable_through, Some(2));
    assert_eq!(report.bessel_stable_through, Some(1));
}
