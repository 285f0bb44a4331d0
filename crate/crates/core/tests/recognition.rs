use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use emgest::dictionary::{ContrastSettings, NearFieldSpec, OnDemandDictionary, ShapeRecord};
use emgest::em::{
    lebedev_grid, vsh_basis, ApertureMask, Polarization, SourceConfig, SphereGrid, TangentialFieldOnSphere, VshBasis,
    VshIndex, WaveNumber,
};
use emgest::forward::{simulate_measurement, FarFieldMode, ReceiverLayout, SolverParams};
use emgest::recognition::{
    add_far_field_noise, add_noise, identify, locate, location_indicator, probe_field, shape_indicator_near,
    LocationIndicator, MatchTable, MeasuredData, NoiseSpec, SamplingGrid,
};
use emgest::shapes::{preset, rasterize_contrast, PlacedShape, Placement, ShapeSpec};
use emgest::vec3::{cnorm, norm, sub, Vec3};
use emgest::Error;

fn grid() -> Arc<SphereGrid> {
    Arc::new(lebedev_grid(110).unwrap())
}

fn basis() -> VshBasis {
    vsh_basis(grid())
}

fn k_low() -> WaveNumber {
    WaveNumber::from_wavelength(20.0).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Σ_j c_j probe_j(z)`, a field the indicator should score exactly 1 at `z`.
fn probe_span(z: &Vec3, coeffs: &[Complex64; 6], b: &VshBasis) -> TangentialFieldOnSphere {
    let g = b.grid().clone();
    let mut samples = vec![[c(0.0, 0.0); 3]; g.len()];
    for (j, idx) in VshIndex::ALL.iter().enumerate() {
        let p = probe_field(z, k_low(), b, *idx).unwrap();
        for (s, v) in samples.iter_mut().zip(p.samples()) {
            for a in 0..3 {
                s[a] += coeffs[j] * v[a];
            }
        }
    }
    TangentialFieldOnSphere::new(g, samples).unwrap()
}

fn random_far(rng: &mut ChaCha8Rng, g: &Arc<SphereGrid>) -> TangentialFieldOnSphere {
    let samples = (0..g.len())
        .map(|_| [0; 3].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    TangentialFieldOnSphere::new(g.clone(), samples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn indicator_never_exceeds_one(seed in any::<u64>(), x in -50.0f64..50.0, y in -50.0f64..50.0, z in -50.0f64..50.0) {
        prop_assume!(norm(&[x, y, z]) > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = basis();
        let far = random_far(&mut rng, b.grid());
        let v = location_indicator(&far, &[x, y, z], k_low(), &b, None).unwrap();
        prop_assert!(v <= 1.0 + 1e-6 && v >= 0.0);
    }

    #[test]
    fn probe_span_scores_one_at_its_own_point(seed in any::<u64>(), x in -50.0f64..50.0, y in -50.0f64..50.0, z in 5.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = [0; 6].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let b = basis();
        let far = probe_span(&[x, y, z], &coeffs, &b);
        let v = location_indicator(&far, &[x, y, z], k_low(), &b, None).unwrap();
        prop_assert!((v - 1.0).abs() <= 1e-8, "I = {v}");
    }

    #[test]
    fn indicator_is_invariant_under_field_scaling(seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let s = c(re, im);
        prop_assume!(s.norm() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = basis();
        let far = random_far(&mut rng, b.grid());
        let scaled = far.map_phase(|_| s);
        let z = [3.0, -1.0, 38.0];
        let a = location_indicator(&far, &z, k_low(), &b, None).unwrap();
        let d = location_indicator(&scaled, &z, k_low(), &b, None).unwrap();
        prop_assert!((a - d).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn noise_is_bounded_by_delta_times_max_magnitude(seed in any::<u64>(), delta in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let samples: Vec<_> = (0..40).map(|_| [0; 3].map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))).collect();
        let m = samples.iter().map(cnorm).fold(0.0, f64::max);
        let noisy = add_noise(&samples, &NoiseSpec::new(delta, seed).unwrap(), 0);
        for (a, b) in samples.iter().zip(&noisy) {
            for i in 0..3 {
                prop_assert!((a[i] - b[i]).norm() <= delta * m * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn probe_fields_reject_the_origin() {
    let b = basis();
    assert!(probe_field(&[0.0; 3], k_low(), &b, VshIndex::ALL[0]).is_err());
    let far = probe_span(&[0.0, 0.0, 40.0], &[c(1.0, 0.0); 6], &b);
    assert!(location_indicator(&far, &[0.0; 3], k_low(), &b, None).is_err());
    let zero = TangentialFieldOnSphere::zeros(b.grid().clone());
    assert!(matches!(LocationIndicator::new(&zero, k_low(), &b, None), Err(Error::ZeroNorm(_))));
}

#[test]
fn noise_has_zero_mean_and_is_reproducible() {
    let samples = vec![[c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)]; 4000];
    let spec = NoiseSpec::new(0.1, 42).unwrap();
    let a = add_noise(&samples, &spec, 0);
    assert_eq!(a, add_noise(&samples, &spec, 0));
    assert_ne!(a, add_noise(&samples, &spec, 1));
    assert_ne!(a, add_noise(&samples, &NoiseSpec::new(0.1, 43).unwrap(), 0));
    let m = cnorm(&samples[0]);
    let mut mean = c(0.0, 0.0);
    for (x, y) in samples.iter().zip(&a) {
        for i in 0..3 {
            mean += y[i] - x[i];
        }
    }
    mean /= (3 * samples.len()) as f64;
    // Each perturbation has standard deviation δM/√6 per complex component.
    assert!(mean.norm() < 4.0 * 0.1 * m / (6.0 * 3.0 * 4000.0f64).sqrt(), "mean {mean}");
}

#[test]
fn noisy_far_fields_stay_tangential() {
    let b = basis();
    let far = probe_span(&[0.0, 0.0, 40.0], &[c(1.0, 0.2); 6], &b);
    let noisy = add_far_field_noise(&far, &NoiseSpec::new(0.05, 1).unwrap(), 0).unwrap();
    for (x, v) in b.grid().nodes().iter().zip(noisy.samples()) {
        let radial: Complex64 = (0..3).map(|a| v[a] * x[a]).sum();
        assert!(radial.norm() < 1e-12);
    }
}

#[test]
fn locate_finds_a_grid_point_and_reports_boundary_maxima() {
    let b = basis();
    let z = [1.0, -0.5, 40.0];
    let far = probe_span(&z, &[c(0.3, 0.1), c(1.0, 0.0), c(-0.2, 0.4), c(0.0, 0.5), c(0.7, 0.0), c(0.1, -0.1)], &b);
    let s = SamplingGrid::default_for([0.0, 0.0, 40.0], k_low());
    let r = locate(&far, k_low(), &b, &s, None, false).unwrap();
    assert!(norm(&sub(&r.position, &z)) < 1e-9, "{:?}", r.position);
    assert!((r.value - 1.0).abs() < 1e-8);
    assert!(!r.is_tie());
    assert!(!r.on_boundary);
    assert_eq!(r.map.len(), 729);

    let shifted = SamplingGrid::default_for([0.0, 0.0, 42.0], k_low());
    let r = locate(&far, k_low(), &b, &shifted, None, false).unwrap();
    assert!(r.on_boundary);
}

#[test]
fn refinement_recovers_an_off_grid_target() {
    let b = basis();
    let z = [0.2, 0.1, 40.15];
    let far = probe_span(&z, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.2)], &b);
    let s = SamplingGrid::default_for([0.0, 0.0, 40.0], k_low());
    let coarse = locate(&far, k_low(), &b, &s, None, false).unwrap();
    let fine = locate(&far, k_low(), &b, &s, None, true).unwrap();
    assert!(fine.refined);
    assert!(fine.value >= coarse.value);
    let ec = norm(&sub(&coarse.position, &z));
    let ef = norm(&sub(&fine.position, &z));
    assert!(ef <= ec, "{ef} > {ec}");
    assert!(ef < 0.1, "{ef}");
}

#[test]
fn symmetric_maps_report_ties() {
    // A field with no dependence on z̃ along x₁: the map is flat along that axis.
    let b = basis();
    let far = probe_span(&[0.0, 0.0, 40.0], &[c(1.0, 0.0); 6], &b);
    let s = SamplingGrid::new([0.0, 0.0, 40.0], [1e-13, 1.0, 1.0], [3, 1, 1]).unwrap();
    let r = locate(&far, k_low(), &b, &s, None, false).unwrap();
    assert!(r.is_tie());
    assert_eq!(r.maximisers.len(), 3);
}

/// Mean localisation error over `zs` for probe-span fields plus noise, with
/// and without an aperture.
fn mean_error(zs: &[Vec3], mask: Option<&ApertureMask>, b: &VshBasis, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for (i, z) in zs.iter().enumerate() {
        let coeffs = [0; 6].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let clean = probe_span(z, &coeffs, b);
        let far = add_far_field_noise(&clean, &NoiseSpec::new(0.3, seed).unwrap(), i as u64).unwrap();
        let s = SamplingGrid::default_for([0.0, 0.0, 40.0], k_low());
        let r = locate(&far, k_low(), b, &s, mask, false).unwrap();
        total += norm(&sub(&r.position, z));
    }
    total / zs.len() as f64
}

#[test]
fn shrinking_the_aperture_does_not_improve_localisation() {
    let b = basis();
    let cap = ApertureMask::polar_cap(b.grid(), &[0.0, 0.0, 1.0], 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trials = 20;
    let mut ok = 0;
    for t in 0..trials {
        let zs: Vec<Vec3> = (0..10)
            .map(|_| {
                let i = rng.gen_range(1..8) as f64 - 4.0;
                let j = rng.gen_range(1..8) as f64 - 4.0;
                let l = rng.gen_range(1..8) as f64 - 4.0;
                [0.5 * i, 0.5 * j, 40.0 + 0.5 * l]
            })
            .collect();
        let full = mean_error(&zs, None, &b, t);
        let part = mean_error(&zs, Some(&cap), &b, t);
        if full <= part {
            ok += 1;
        }
    }
    assert!(ok * 100 >= 95 * trials, "{ok}/{trials}");
}

fn settings(n: f64, resolution: usize) -> ContrastSettings {
    ContrastSettings {
        n_inside: [n, 0.0],
        resolution,
        smoothing: 0.0,
    }
}

fn on_demand(shapes: &[ShapeSpec], near: Option<NearFieldSpec>) -> OnDemandDictionary {
    OnDemandDictionary::new(
        shapes.iter().map(|s| ShapeRecord::new(s, settings(2.0, 2))).collect(),
        Polarization::new([0.0, 0.0, 1.0]).unwrap(),
        SolverParams::default(),
        Arc::new(lebedev_grid(50).unwrap()),
        near,
    )
}

fn simulated(shape: &ShapeSpec, z: Vec3, k: WaveNumber, receivers: &ReceiverLayout) -> emgest::forward::Measurement {
    let contrast = rasterize_contrast(shape, c(2.0, 0.0), 2, 0.0).unwrap();
    let placed = PlacedShape::new(shape.clone(), Placement::new(z).unwrap(), contrast);
    let sources = SourceConfig::single_at_origin(Polarization::new([0.0, 0.0, 1.0]).unwrap());
    simulate_measurement(
        &placed,
        k,
        &sources,
        receivers,
        &Arc::new(lebedev_grid(50).unwrap()),
        &SolverParams::default(),
        FarFieldMode::Exact,
    )
    .unwrap()
}

#[test]
fn single_shape_dictionary_identifies_its_shape() {
    let d1 = preset("D1").unwrap();
    let k = WaveNumber::from_wavelength(2.0).unwrap();
    let z = [40.0, 0.0, 0.0];
    let m = simulated(&d1, z, k, &ReceiverLayout::square_x2x3(3, 2.0).unwrap());
    let dict = on_demand(std::slice::from_ref(&d1), None);
    let id = identify(MeasuredData::Far(&m.far_field, None), &dict, k, &z).unwrap();
    assert_eq!(id.shape(), Some("D1"));
    assert!(id.raw[0] > 0.0 && id.raw[0] <= 1.0);
    assert_eq!(id.normalized, vec![1.0]);
    assert_eq!(id.direction_gaps, vec![0.0]);
}

#[test]
fn duplicate_shapes_tie_instead_of_picking_one() {
    let d1 = preset("D1").unwrap();
    let twin = ShapeSpec::new("twin", d1.cubes().to_vec()).unwrap();
    let k = WaveNumber::from_wavelength(2.0).unwrap();
    let z = [40.0, 0.0, 0.0];
    let m = simulated(&d1, z, k, &ReceiverLayout::square_x2x3(3, 2.0).unwrap());
    let dict = on_demand(&[d1, twin], None);
    let id = identify(MeasuredData::Far(&m.far_field, None), &dict, k, &z).unwrap();
    assert!(id.is_tie());
    assert_eq!(id.shape(), None);
    assert_eq!(id.winners, vec![0, 1]);
    let table = MatchTable::from_identifications(vec!["D1".into()], &[id]).unwrap();
    assert!(!table.diagonal_dominant());
    assert!(table.to_csv(&["seed 1".into()], true).lines().last().unwrap().ends_with(",TIE"));
}

#[test]
fn near_mode_checks_the_receiver_layout() {
    let d1 = preset("D1").unwrap();
    let k = WaveNumber::from_wavelength(2.0).unwrap();
    let z = [40.0, 0.0, 0.0];
    let receivers = ReceiverLayout::square_x2x3(3, 2.0).unwrap();
    let m = simulated(&d1, z, k, &receivers);
    let spec = NearFieldSpec {
        receivers: receivers.clone(),
        anchor: z,
    };
    let dict = on_demand(std::slice::from_ref(&d1), Some(spec.clone()));
    let id = identify(MeasuredData::Near(&m.aperture), &dict, k, &[40.3, 0.2, 0.0]).unwrap();
    assert!(id.raw[0] > 0.0 && id.raw[0] <= 1.0);

    let entry = dict.entry("D1", k, &[1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        shape_indicator_near(&m.aperture, &entry, &spec, &[42.0, 0.0, 0.0]),
        Err(Error::LayoutMismatch(_))
    ));
    let far_only = on_demand(std::slice::from_ref(&d1), None);
    assert!(matches!(
        identify(MeasuredData::Near(&m.aperture), &far_only, k, &z),
        Err(Error::LayoutMismatch(_))
    ));
}

#[test]
fn location_at_desk_scale_is_within_half_a_unit() {
    let receivers = ReceiverLayout::square_x2x3(3, 2.0).unwrap();
    let b = vsh_basis(Arc::new(lebedev_grid(50).unwrap()));
    for (name, z) in [("D1", [40.0, 0.0, 0.0]), ("D3", [0.0, 28.0, 28.5])] {
        let m = simulated(&preset(name).unwrap(), z, k_low(), &receivers);
        let s = SamplingGrid::default_for(z.map(|v| v.round()), k_low());
        let r = locate(&m.far_field, k_low(), &b, &s, None, false).unwrap();
        let err = norm(&sub(&r.position, &z));
        assert!(err <= 0.5, "{name}: error {err}");
    }
}
