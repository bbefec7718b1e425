use fracvar::envelope::convex_envelope_1d;
use fracvar::fields::smooth_bump;
use fracvar::grid::io::{read_binary, write_binary};
use fracvar::spaces::{prescribed_with_datum, project_complementary, ComplementarySpec, ConstructionOptions};
use fracvar::varsolve::{evaluate_functional, pinched_nonconvex, relaxed_energy};
use fracvar::{Backend, DecayClass, FractionalParams, GridSpec, Mask, SampledField};

fn spec(points: usize) -> (ComplementarySpec, FractionalParams) {
    let grid = GridSpec::truncated(1, 2.0, points).unwrap();
    let omega = Mask::open_box(grid, &[0.0], &[1.0]);
    let g = smooth_bump(grid, &[0.5], 1.2).scale(0.4);
    (ComplementarySpec::with_margin(omega, g, 4).unwrap(), FractionalParams::new(1, 0.4, 2.0).unwrap())
}

#[test]
fn prescribed_field_keeps_datum_and_hits_targets() {
    let (spec, params) = spec(2048);
    let x0 = spec.g().grid().nearest_index(&[0.5]);
    let (z, a) = ([0.3], [-0.7]);
    let p = prescribed_with_datum(x0, &z, &a, &spec, &params, &ConstructionOptions::default()).unwrap();
    assert!(p.relative_error(&z, &a) <= 1e-3, "error {}", p.relative_error(&z, &a));
    for i in spec.omega().complement().indices() {
        assert_eq!(p.field.values()[i], spec.g().values()[i]);
    }
    let again = project_complementary(&p.field, &spec).unwrap();
    assert_eq!(again.values(), p.field.values());
}

#[test]
fn relaxed_energy_never_exceeds_energy_of_prescribed_field() {
    let (spec, params) = spec(512);
    let backend = Backend::quadrature();
    let x0 = spec.g().grid().nearest_index(&[0.4]);
    let p = prescribed_with_datum(x0, &[0.1], &[0.5], &spec, &params, &ConstructionOptions::default()).unwrap();
    let f = pinched_nonconvex();
    let table = convex_envelope_1d(|a| f.eval(&[0.0], &[0.0], &[a]), -6.0, 6.0, 6001, f.growth.pinching()).unwrap();
    let full = evaluate_functional(&p.field, &f, &spec, &params, &backend).unwrap();
    let relaxed = relaxed_energy(&p.field, &f, &table, &spec, &params, &backend).unwrap();
    assert!(!relaxed.extrapolated);
    assert!(relaxed.value <= full.value + 1e-12);
    assert!(relaxed.value > 0.0);
}

#[test]
fn binary_round_trip_is_exact() {
    let grid = GridSpec::truncated(2, 1.5, 32).unwrap();
    let u = SampledField::scalar_fn(grid, DecayClass::SchwartzLike, |x| (-(x[0] * x[0] + 3.0 * x[1] * x[1])).exp());
    let path = std::env::temp_dir().join(format!("fracvar-roundtrip-{}.bin", std::process::id()));
    write_binary(&u, &path).unwrap();
    let back = read_binary(&path).unwrap();
    assert_eq!(back.values(), u.values());
    assert_eq!(back.decay(), u.decay());
    assert_eq!(back.grid(), u.grid());
    let _ = std::fs::remove_file(fracvar::grid::io::sidecar_path(&path));
    let _ = std::fs::remove_file(&path);
}
