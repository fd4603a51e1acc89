use proptest::prelude::*;
use revtorus_core::profile::candidate_region;
use revtorus_core::stability::{annulus_partner, parallel_pair_verdict};
use revtorus_core::*;

fn torus(r: f64) -> SurfaceProfile {
    build_standard_torus(StandardTorusParams { a: 1.0, r }).unwrap()
}

#[test]
fn parallels_pair_is_the_annulus_complement() {
    let s = torus(0.4);
    let beta = total_area(&s);
    for t in [0.3, 0.8, 1.1] {
        let ann = candidate_region(&s, RegionShape::SymmetricAnnulus { t }, false, None).unwrap();
        let band = candidate_region(&s, RegionShape::Parallels { ts: vec![-t, t] }, false, None).unwrap();
        assert!((ann.area + band.area - beta).abs() <= 1e-10 * beta);
        assert!((ann.perimeter - band.perimeter).abs() <= 1e-12 * ann.perimeter);
        // Same boundary, same verdict.
        let va = classify_region(&s, &ann, None).unwrap();
        let vb = classify_region(&s, &band, None).unwrap();
        assert_eq!(va.stable, vb.stable);
    }
}

#[test]
fn candidate_region_curvature_orientation() {
    let s = torus(0.4);
    let x = 0.7;
    let tpp = annulus_partner(&s, x).unwrap();
    let rg = candidate_region(&s, RegionShape::NonsymmetricAnnulus { x, t_dprime: tpp }, false, None).unwrap();
    // Inner normal points up at t'' and down at -x; both give -h(x).
    assert!((rg.h + s.parallel_curvature(x)).abs() <= 1e-12);
    assert!((rg.h + s.parallel_curvature(tpp)).abs() <= 1e-10);
    let disk = candidate_region(&s, RegionShape::Disk { t_max: 0.3 }, true, None).unwrap();
    assert!(disk.h > 0.0 && disk.area > 0.5 * total_area(&s));
}

#[test]
fn unduloid_region_needs_its_branch() {
    let s = torus(0.4);
    let shape = RegionShape::UnduloidCircle { t_max: 0.65, x: 0.8 };
    assert!(candidate_region(&s, shape, false, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    /// The circle criterion against the second periodic eigenvalue
    /// `1/f^2 - (K + h^2)`.
    #[test]
    fn circle_verdict_matches_spectrum(r in 0.2f64..0.9, u in -0.999f64..0.999) {
        let s = torus(r);
        let t = u * s.t0;
        let m = metric_eval(&s, t).unwrap();
        let lambda_2 = 1.0 / (m.f * m.f) - (m.k + m.h * m.h);
        prop_assume!(lambda_2.abs() > 1e-7);
        let v = circle_stable(&s, t);
        prop_assert_eq!(v.admissible(), lambda_2 >= -1e-8, "t {} lambda_2 {}", t, lambda_2);
    }

    /// The symmetric criterion agrees with the two-parallel form at `(t, -t)`.
    #[test]
    fn symmetric_annulus_two_forms(r in 0.2f64..0.9, u in 0.01f64..0.999) {
        let s = torus(r);
        let t = u * s.t0;
        let tc = critical_points(&s).t_c.unwrap();
        prop_assume!((t - tc).abs() > 1e-6);
        let a = symmetric_annulus_stable(&s, t).unwrap();
        let b = parallel_pair_verdict(&s, t, t);
        prop_assert_eq!(a.admissible(), b.admissible(), "t {} margins {} {}", t, a.margin, b.margin);
    }

    /// Partners match curvature and are unique on the monotone branch.
    #[test]
    fn partner_matches_and_is_unique(r in 0.2f64..0.9, u in 0.0f64..1.0) {
        let s = torus(r);
        let tc = critical_points(&s).t_c.unwrap();
        let x = u * tc;
        let tpp = annulus_partner(&s, x).unwrap();
        prop_assert!(tpp >= tc && tpp <= s.t0);
        prop_assert!((s.parallel_curvature(x) - s.parallel_curvature(tpp)).abs() <= 1e-10);
        // h is monotone on [t_c, t0], so no second crossing exists.
        let g = |t: f64| s.parallel_curvature(t) - s.parallel_curvature(x);
        let n = 64;
        let mut sign_changes = 0;
        for i in 0..n {
            let a = tc + (s.t0 - tc) * i as f64 / n as f64;
            let b = tc + (s.t0 - tc) * (i + 1) as f64 / n as f64;
            if g(a) * g(b) < 0.0 {
                sign_changes += 1;
            }
        }
        prop_assert!(sign_changes <= 1);
    }

    #[test]
    fn verdicts_ignore_complement(r in 0.2f64..0.9, u in 0.05f64..0.95) {
        let s = torus(r);
        let t = u * s.t0;
        for shape in [RegionShape::SymmetricAnnulus { t }, RegionShape::Parallels { ts: vec![t] }] {
            let a = candidate_region(&s, shape.clone(), false, None).unwrap();
            let b = candidate_region(&s, shape, true, None).unwrap();
            prop_assert_eq!(classify_region(&s, &a, None).unwrap(), classify_region(&s, &b, None).unwrap());
        }
    }
}
