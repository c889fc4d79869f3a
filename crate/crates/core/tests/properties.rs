use std::path::Path;

use proptest::prelude::*;

use helical_oseen::analytic::{random_helical_perturbation, PerturbationSpec};
use helical_oseen::diagnostics::inequalities::poincare_ratio;
use helical_oseen::diagnostics::DiagnosticsRecord;
use helical_oseen::io::config::InitialKind;
use helical_oseen::io::csv::{parse_records, records_to_string};
use helical_oseen::io::{ExperimentConfig, Snapshot};
use helical_oseen::spectral::helical_defect;
use helical_oseen::spectral::ops::{h1_norm, inner, l2_norm, max_divergence};
use helical_oseen::spectral::{forward, leray_project, perp_part, vertical_mean};
use helical_oseen::{GridSpec, PhysicalField};

fn small_grid(pitch: f64) -> GridSpec {
    GridSpec::with_shape(8, 8, 8, 6.0, pitch).unwrap()
}

fn field(grid: &GridSpec, vals: &[f64]) -> PhysicalField {
    let n = grid.len();
    let comps = (0..3).map(|c| (0..n).map(|i| vals[(c * n + i) % vals.len()]).collect()).collect();
    PhysicalField::from_components(grid, comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_output_is_solenoidal_and_idempotent(vals in prop::collection::vec(-1.0f64..1.0, 97)) {
        let g = small_grid(0.7);
        let p = leray_project(&forward(&field(&g, &vals)));
        let scale = l2_norm(&p).max(1e-300);
        prop_assert!(max_divergence(&p) < 1e-12 * scale.max(1.0));
        prop_assert!(l2_norm(&leray_project(&p).sub(&p)) <= 1e-13 * scale);
    }

    #[test]
    fn mean_and_perp_parts_split_orthogonally(vals in prop::collection::vec(-1.0f64..1.0, 131)) {
        let g = small_grid(1.3);
        let f = forward(&field(&g, &vals));
        let (m, p) = (vertical_mean(&f), perp_part(&f));
        let total = l2_norm(&f).powi(2);
        prop_assert!(l2_norm(&m.add(&p).sub(&f)) <= 1e-12 * total.sqrt());
        prop_assert!(inner(&m, &p).abs() <= 1e-12 * total);
        prop_assert!((l2_norm(&m).powi(2) + l2_norm(&p).powi(2) - total).abs() <= 1e-12 * total);
    }

    #[test]
    fn poincare_ratio_never_exceeds_pitch(
        vals in prop::collection::vec(-1.0f64..1.0, 61),
        pitch in 0.2f64..3.0,
    ) {
        let g = small_grid(pitch);
        let r = poincare_ratio(&forward(&field(&g, &vals))).unwrap();
        prop_assert!(r <= pitch * (1.0 + 1e-10), "ratio {r} > L = {pitch}");
    }

    #[test]
    fn csv_rows_round_trip_exactly(t in 0.0f64..1e3, x in -1e10f64..1e10, y in 0.0f64..1e-200) {
        let g = small_grid(1.0);
        let mut r = DiagnosticsRecord::compute(&helical_oseen::SpectralField::zeros(&g, 3), 0.0, 1.0, 1.0, None).unwrap();
        r.t = t;
        r.k_perp = x;
        r.l2_nbar = y;
        let back = parse_records(&records_to_string(&[r]).unwrap()).unwrap();
        prop_assert_eq!(back[0].values(), r.values());
    }

    #[test]
    fn snapshots_round_trip_exactly(vals in prop::collection::vec(-1e6f64..1e6, 37), time in 0.0f64..100.0, with_vort in any::<bool>()) {
        let g = small_grid(0.9);
        let u = field(&g, &vals);
        let s = Snapshot { time, vorticity: with_vort.then(|| u.scaled(-3.0)), velocity: u };
        let back = Snapshot::from_bytes(&s.to_bytes(), Path::new("mem")).unwrap();
        prop_assert_eq!(back.time, time);
        prop_assert_eq!(back.velocity.components(), s.velocity.components());
        prop_assert_eq!(back.vorticity.is_some(), with_vort);
    }

    #[test]
    fn config_echo_is_a_fixed_point(
        half_nx in 4usize..64,
        lx in 1.0f64..200.0,
        a in -5.0f64..5.0,
        t_end in 0.0f64..10.0,
        cfl in 0.05f64..0.95,
        seed in 0u64..1_000_000,
        kind in 0usize..3,
        frac in 0.1f64..1.0,
    ) {
        let mut c = ExperimentConfig::default();
        c.grid.nx = 2 * half_nx;
        c.grid.ny = 2 * half_nx;
        c.grid.lx = lx;
        c.physics.a = a;
        c.time.t_end = t_end;
        c.time.cfl = cfl;
        c.initial.seed = seed;
        c.initial.kind = [InitialKind::OseenOnly, InitialKind::Shear, InitialKind::Lamb2d][kind];
        c.initial.sigma = frac * lx / 16.0;
        let text = c.to_toml();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn generated_perturbations_are_admissible(seed in any::<u64>(), amplitude in 1e-3f64..10.0) {
        let g = GridSpec::with_shape(48, 48, 16, 16.0, 1.0).unwrap();
        let spec = PerturbationSpec { seed, amplitude, modes: vec![0, 1, 2], sigma: 1.0 };
        let v = random_helical_perturbation(&spec, &g).unwrap();
        prop_assert!((h1_norm(&v) / amplitude - 1.0).abs() < 1e-12);
        prop_assert!(max_divergence(&v) < 1e-10 * amplitude.max(1.0));
        prop_assert!(helical_defect(&v) < 1e-8);
        // seeded generation is reproducible bit for bit
        let w = random_helical_perturbation(&spec, &g).unwrap();
        prop_assert_eq!(v.components(), w.components());
    }
}
