use std::collections::BTreeMap;

use proptest::prelude::*;
use trineumann::bounds::{
    cheng_upper, convex_perimeter_lower, perimeter_lower, pw_diameter_lower, thm_diameter_lower,
};
use trineumann::fem::{neumann_spectrum, solve_triangle};
use trineumann::geometry::Triangle;
use trineumann::special_fn::{bessel_j, bessel_j_derivative, bessel_jprime_zero};
use trineumann::sweep::{read_csv, write_csv, SweepRecord};

/// Triangles with smallest angle above ~0.15 rad, so level-8 meshes stay usable.
fn triangle() -> impl Strategy<Value = Triangle> {
    (0.3f64..2.5, 0.3f64..2.5, 0.5f64..2.0, -3.0f64..3.0, -3.0f64..3.0, 0.0..std::f64::consts::TAU)
        .prop_filter_map("thin or degenerate", |(a, b, s, x, y, rot)| {
            if a + b > 2.8 {
                return None;
            }
            let (c, d) = (rot.cos(), rot.sin());
            // Base s, angle b at the origin and a at (s, 0).
            let r = s * a.sin() / (a + b).sin();
            let pts = [[0.0, 0.0], [s, 0.0], [r * b.cos(), r * b.sin()]].map(|p| [x + c * p[0] - d * p[1], y + d * p[0] + c * p[1]]);
            Triangle::new(pts).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rayleigh_quotient_dominates_first_eigenvalue(t in triangle(), seed in any::<u64>()) {
        let (space, sols) = solve_triangle(&t, 8, 1).unwrap();
        let mu1 = sols[0].eigenvalue;
        let mut state = seed | 1;
        let u: Vec<f64> = (0..space.mesh.vertex_count())
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let r = space.rayleigh_quotient(&u).unwrap();
        prop_assert!(r >= mu1 * (1.0 - 1e-10), "{r} < {mu1}");
        let r1 = space.rayleigh_quotient(&sols[0].coefficients).unwrap();
        prop_assert!((r1 - mu1).abs() <= 1e-8 * mu1);
    }

    #[test]
    fn eigenvalues_scale_and_move_rigidly(t in triangle(), s in 0.5f64..2.0, dx in -5.0f64..5.0) {
        let a = neumann_spectrum(&t, 8, 2).unwrap();
        let moved = t.map_points(|p| [p[0] + dx, p[1] - dx]).unwrap();
        let b = neumann_spectrum(&moved, 8, 2).unwrap();
        let c = neumann_spectrum(&t.scaled(s).unwrap(), 8, 2).unwrap();
        for i in 0..2 {
            let mu = a[i].eigenvalue;
            prop_assert!((b[i].eigenvalue - mu).abs() <= 1e-7 * mu);
            prop_assert!((c[i].eigenvalue * s * s - mu).abs() <= 1e-7 * mu);
        }
        prop_assert!(a[0].eigenvalue > 0.0 && a[0].eigenvalue <= a[1].eigenvalue);
    }

    #[test]
    fn bound_values_are_ordered(t in triangle()) {
        let lower = [pw_diameter_lower(&t), thm_diameter_lower(&t), perimeter_lower(&t), convex_perimeter_lower(&t)];
        prop_assert!(lower.iter().all(|&l| l > 0.0 && l < cheng_upper(&t)));
        prop_assert!(pw_diameter_lower(&t) < thm_diameter_lower(&t));
    }
}

proptest! {
    #[test]
    fn jprime_zero_is_a_root(nu in 0.0f64..6.0) {
        let z = bessel_jprime_zero(nu).unwrap();
        let scale = bessel_j(nu, z).unwrap().abs().max(1e-3);
        prop_assert!(bessel_j_derivative(nu, z).unwrap().abs() < 1e-10 * scale.max(1.0));
        prop_assert!(z > nu);
    }

    #[test]
    fn csv_round_trip_is_byte_identical(
        rows in prop::collection::vec(
            (0.0f64..3.2, -1e3f64..1e3, prop::option::of(-1e3f64..1e3), prop::option::of(any::<f64>()), 0.0f64..1.0, any::<f64>()),
            0..8,
        )
    ) {
        let mut records: Vec<SweepRecord> = rows
            .into_iter()
            .filter(|r| r.3.map_or(true, f64::is_finite) && r.5.is_finite())
            .map(|(aperture, mu1_d2, mua_d2, mus_d2, error_estimate, b)| SweepRecord {
                aperture,
                mu1_d2,
                mua_d2,
                mus_d2,
                error_estimate,
                bounds: BTreeMap::from([("a".to_string(), b), ("z".to_string(), -b)]),
            })
            .collect();
        records.sort_by(|a, b| a.aperture.total_cmp(&b.aperture));
        let mut first = Vec::new();
        write_csv(&records, &mut first).unwrap();
        let back = read_csv(first.as_slice()).unwrap();
        prop_assert_eq!(&back, &records);
        let mut second = Vec::new();
        write_csv(&back, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}
