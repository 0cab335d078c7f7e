use std::f64::consts::PI;

use nqd::growth::{
    geometric_radii, growth_ratio, growth_ratio_roof, heins_functional, pl_lower_bound, three_tract_certificate,
    tract_lengths, tract_report, CertificateVerdict, CircleCache, HarmonicSampler, Predicate,
};
use nqd::roof::{build_roof, RoofConfig};
use nqd::{catalog, NqdError, C64};

fn upper_im(z: C64) -> Option<f64> {
    (z.im > 0.0).then_some(z.im)
}

fn re_z3(z: C64) -> Option<f64> {
    Some(z.powi(3).re)
}

#[test]
fn growth_of_linear_and_cubic_functions() {
    let radii = geometric_radii(1.0, 16.0, 5).unwrap();
    let lin = growth_ratio(&upper_im, &radii, 1024, 2.0).unwrap();
    assert!(lin.passed);
    assert!(lin.rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-12 && (511..=512).contains(&r.samples)));
    let cub = growth_ratio(&re_z3, &radii, 1024, 2.0).unwrap();
    assert!(!cub.passed);
    for r in &cub.rows {
        assert!((r.max_abs_u - r.t.powi(3)).abs() < 1e-12 * r.t.powi(3));
    }
    assert!(cub.to_csv().starts_with("t,max_abs_u,ratio,samples,constructive_ratio\n"));
}

#[test]
fn cubic_has_three_tracts_of_width_pi_t_over_3() {
    for t in [0.8, 5.0, 30.0] {
        for pred in [Predicate::Above(0.0), Predicate::Negative] {
            let tr = tract_lengths(&re_z3, t, pred, 4096).unwrap();
            assert_eq!(tr.len(), 3);
            for x in tr {
                assert!((x.theta / (PI * t / 3.0) - 1.0).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn cubic_tract_report_pl_bound_is_three_log_r() {
    let radii = geometric_radii(1.0, 20.0, 40).unwrap();
    let rep = tract_report(&re_z3, &radii, Predicate::Above(0.0), 2048).unwrap();
    assert_eq!(rep.tract_ids().len(), 3);
    for row in rep.rows.iter().filter(|r| r.t >= 2.0) {
        let b = row.pl_bound.unwrap();
        assert!((b / (3.0 * row.t.ln()) - 1.0).abs() < 0.02, "t = {} bound {b}", row.t);
    }
    for id in rep.tract_ids() {
        assert_eq!(rep.widths(id).len(), radii.len());
    }
    assert!(rep.to_csv().starts_with("t,tract_id,theta,Mk,pl_bound\n"));
}

#[test]
fn pinched_tract_is_reported() {
    let table = [(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)];
    assert!(matches!(pl_lower_bound(&table, 3.0), Err(NqdError::TractPinch(t)) if t == 2.0));
}

#[test]
fn certificates_on_samplers() {
    let radii = geometric_radii(1.0, 30.0, 24).unwrap();
    let pos = three_tract_certificate(&upper_im, &radii, 0.5, 1e-9, 1024).unwrap();
    assert!(pos.passed());
    let cub = three_tract_certificate(&re_z3, &radii, 0.5, 1e-9, 1024).unwrap();
    match cub.verdict {
        CertificateVerdict::Contradiction { slope } => assert!(slope >= 1.5, "{slope}"),
        v => panic!("expected a contradiction, got {v:?}"),
    }
}

#[test]
fn heins_of_single_halfplane_function() {
    let rows = heins_functional(&[&upper_im], &[1.0, 4.0, 9.0], 4096).unwrap();
    for r in rows {
        let want = (r.r * PI / 2.0).sqrt();
        assert!((r.value - want).abs() < 1e-9 * want, "{} vs {want}", r.value);
    }
    let overlap = |z: C64| Some(z.re.abs());
    assert!(heins_functional(&[&upper_im, &overlap], &[1.0], 1024).is_err());
}

#[test]
fn cached_circles_match_direct_sampling() {
    let cache = CircleCache::new(&re_z3);
    let a = cache.circle(2.5, 1024);
    let b = cache.circle(2.5, 1024);
    assert_eq!(a, b);
    assert_eq!(a, re_z3.circle(2.5, 1024));
}

#[test]
fn halfplane_roof_growth_ratio_is_one() {
    let r = build_roof(&catalog("halfplane").unwrap(), &RoofConfig::default()).unwrap();
    let radii = geometric_radii(2.0, 20.0, 4).unwrap();
    let g = growth_ratio_roof(&r, &radii, 1024, 2.0).unwrap();
    assert!(g.passed);
    for row in &g.rows {
        assert!((row.ratio - 1.0).abs() < 1e-6, "{}", row.ratio);
        assert!(row.constructive_ratio.unwrap() >= row.ratio);
    }
}
