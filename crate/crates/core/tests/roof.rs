use nqd::roof::{
    build_roof, build_roof_unchecked, check_roof, discrete_laplacian, random_interior_points, RoofConfig,
};
use nqd::{catalog, NqdError, C64};

#[test]
fn shifted_disk_roof_is_log_distance() {
    let c = C64::new(0.7, -0.4);
    let d = catalog("disk-exterior").unwrap().translated(c).unwrap();
    let r = build_roof(&d, &RoofConfig::default()).unwrap();
    let pts = random_interior_points(&r, 40, 11, 0.0).unwrap();
    for z in pts {
        let u = r.eval_u(z).unwrap();
        assert!((u - (z - c).norm().ln()).abs() < 1e-8, "u({z}) = {u}");
        let g = r.grad_u(z).unwrap();
        let want = (z - c) / (z - c).norm_sqr();
        assert!((g - want).norm() < 1e-8, "grad u({z}) = {g}");
    }
    assert!((r.periods()[0].value.re - std::f64::consts::TAU).abs() < 1e-10);
}

#[test]
fn rotated_halfplane_roof_is_distance_to_line() {
    let rot = C64::from_polar(1.0, 0.9);
    let d = catalog("halfplane").unwrap().rotated(rot).unwrap();
    let r = build_roof(&d, &RoofConfig::default()).unwrap();
    let pts = random_interior_points(&r, 40, 5, 0.0).unwrap();
    for z in pts {
        let want = (z * rot.conj()).im;
        assert!((r.eval_u(z).unwrap() - want).abs() < 1e-6, "u({z})");
        assert!((r.grad_u(z).unwrap() - C64::i() * rot).norm() < 1e-6);
    }
}

#[test]
fn roof_checks_pass_on_exact_domains() {
    for name in ["disk-exterior", "halfplane"] {
        let r = build_roof(&catalog(name).unwrap(), &RoofConfig::default()).unwrap();
        let rep = check_roof(&r, 1e-6).unwrap();
        assert!(rep.passed, "{name}: {:?}", rep.failed());
        let z = C64::new(0.3, 2.0);
        // stencil truncation is h^2/12 * u_xxxx, about 1e-5 here
        assert!(discrete_laplacian(&r, z, 1e-2).unwrap().abs() < 1e-4);
    }
}

#[test]
fn ellipse_roof_check_fails() {
    let r = build_roof_unchecked(&catalog("ellipse-exterior:2,1").unwrap(), &RoofConfig::default()).unwrap();
    let rep = check_roof(&r, 1e-6).unwrap();
    assert!(!rep.passed);
    assert!(rep.failed().iter().any(|i| i.name == "boundary_gradient"));
}

#[test]
fn basepoint_on_boundary_is_rejected() {
    let d = catalog("disk-exterior").unwrap();
    let on = nqd::Domain::new(d.components().to_vec(), C64::new(1.0, 0.0));
    assert!(matches!(on, Err(NqdError::InvalidDomain(_))));
}

#[test]
fn evaluation_outside_the_domain_is_an_error() {
    let r = build_roof(&catalog("halfplane").unwrap(), &RoofConfig::default()).unwrap();
    assert!(r.eval_u(C64::new(0.0, -1.0)).is_err());
}
