use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use emgest::dictionary::{
    build_dictionary, default_directions, BuildSpec, ContrastSettings, Dictionary, NearFieldSpec, OnDemandDictionary,
    ShapeRecord, FORMAT_VERSION,
};
use emgest::em::{lebedev_grid, Polarization, SphereGrid, WaveNumber};
use emgest::forward::{plane_wave_far_field, ReceiverLayout, SolverParams};
use emgest::shapes::{preset, rasterize_contrast};
use emgest::vec3::{cnorm, dot, norm, Vec3};
use emgest::Error;

fn grid() -> Arc<SphereGrid> {
    Arc::new(lebedev_grid(26).unwrap())
}

fn settings(n: f64) -> ContrastSettings {
    ContrastSettings {
        n_inside: [n, 0.0],
        resolution: 2,
        smoothing: 0.0,
    }
}

fn spec(shapes: &[&str], n: f64, directions: Vec<Vec3>, near: bool) -> BuildSpec {
    BuildSpec {
        shapes: shapes.iter().map(|s| ShapeRecord::new(&preset(s).unwrap(), settings(n))).collect(),
        k_values: vec![WaveNumber::from_wavelength(2.0).unwrap()],
        directions,
        polarization: Polarization::new([0.0, 0.0, 1.0]).unwrap(),
        solver: SolverParams::default(),
        grid: grid(),
        near_field: near.then(|| NearFieldSpec {
            receivers: ReceiverLayout::square_x2x3(3, 1.0).unwrap(),
            anchor: [40.0, 0.0, 0.0],
        }),
    }
}

fn x_axis() -> Vec<Vec3> {
    vec![[1.0, 0.0, 0.0]]
}

#[test]
fn single_key_build_round_trips_byte_identically() {
    let (dict, report) = build_dictionary(&spec(&["D1"], 2.0, x_axis(), true)).unwrap();
    assert_eq!(dict.len(), 1);
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.failures(), 0);
    assert_eq!(report.records[0].iterations, dict.entries()[0].metadata.iterations);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.emgdict");
    dict.save(&path).unwrap();
    let loaded = Dictionary::load(&path).unwrap();
    assert_eq!(loaded, dict);
    let again = dir.path().join("e.emgdict");
    loaded.save(&again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn zero_contrast_entries_are_zero() {
    let (dict, _) = build_dictionary(&spec(&["D2"], 1.0, x_axis(), true)).unwrap();
    let e = &dict.entries()[0];
    assert!(e.far_field.samples().iter().all(|v| cnorm(v) == 0.0));
    assert!(e.near_field.as_ref().unwrap().iter().all(|v| cnorm(v) == 0.0));
}

#[test]
fn entry_matches_a_direct_forward_solve_bit_for_bit() {
    let d = [0.0, 0.6, 0.8];
    let (dict, _) = build_dictionary(&spec(&["D3"], 3.0, vec![d], false)).unwrap();
    let shape = preset("D3").unwrap();
    let c = rasterize_contrast(&shape, num_complex::Complex64::new(3.0, 0.0), 2, 0.0).unwrap();
    let direct = plane_wave_far_field(
        &c,
        WaveNumber::from_wavelength(2.0).unwrap(),
        &d,
        Polarization::new([0.0, 0.0, 1.0]).unwrap(),
        dict.grid(),
        &SolverParams::default(),
    )
    .unwrap();
    assert_eq!(dict.entries()[0].far_field.samples(), direct.samples());
}

#[test]
fn corruption_truncation_and_version_are_detected() {
    let (dict, _) = build_dictionary(&spec(&["D1"], 2.0, x_axis(), true)).unwrap();
    let bytes = dict.to_bytes();

    for pos in [20, bytes.len() / 2, bytes.len() - 40, bytes.len() - 1] {
        let mut bad = bytes.clone();
        bad[pos] ^= 0x10;
        assert!(matches!(Dictionary::from_bytes(&bad), Err(Error::ChecksumMismatch)), "byte {pos}");
    }
    for cut in [10, 40, bytes.len() - 100] {
        assert!(matches!(Dictionary::from_bytes(&bytes[..cut]), Err(Error::Truncated)), "cut {cut}");
    }
    let mut v = bytes.clone();
    v[8..12].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
    assert!(matches!(
        Dictionary::from_bytes(&v),
        Err(Error::VersionMismatch { found, expected }) if found == FORMAT_VERSION + 1 && expected == FORMAT_VERSION
    ));
    let mut m = bytes;
    m[0] = b'X';
    assert!(matches!(Dictionary::from_bytes(&m), Err(Error::InvalidDictionary(_))));
}

#[test]
fn file_size_matches_sample_accounting() {
    let dirs = default_directions()[..6].to_vec();
    let (dict, _) = build_dictionary(&spec(&["D1", "D2"], 2.0, dirs, true)).unwrap();
    let bytes = dict.to_bytes();
    let header_len = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let receivers = dict.near_field().unwrap().receivers.len();
    let predicted = header_len + dict.len() * (dict.grid().len() * 6 + receivers * 6) * 8;
    let rel = (bytes.len() as f64 - predicted as f64).abs() / predicted as f64;
    assert!(rel <= 0.05, "size {} vs {predicted}", bytes.len());
}

#[test]
fn nearest_direction_reports_angular_gap() {
    let k = WaveNumber::from_wavelength(2.0).unwrap();
    let (dict, _) = build_dictionary(&spec(&["D1"], 2.0, vec![[-1.0, 0.0, 0.0]], false)).unwrap();
    let (e, gap) = dict.nearest_direction_entry("D1", k, &[-1.0, 0.0, 0.0]).unwrap();
    assert_eq!(e.key.direction, [-1.0, 0.0, 0.0]);
    assert_eq!(gap, 0.0);
    let (_, gap) = dict.nearest_direction_entry("D1", k, &[1.0, 0.0, 0.0]).unwrap();
    assert!((gap - PI).abs() < 1e-12);
    assert!(matches!(
        dict.nearest_direction_entry("D9", k, &[1.0, 0.0, 0.0]),
        Err(Error::MissingEntry { .. })
    ));
    assert!(matches!(
        dict.nearest_direction_entry("D1", WaveNumber::new(1.0).unwrap(), &[1.0, 0.0, 0.0]),
        Err(Error::MissingEntry { .. })
    ));
}

/// Largest angle from any set member to its nearest neighbour.
fn nearest_neighbour_bound(dirs: &[Vec3]) -> f64 {
    dirs.iter()
        .enumerate()
        .map(|(i, a)| {
            dirs.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| dot(a, b).clamp(-1.0, 1.0).acos())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn shared_26_dictionary() -> &'static Dictionary {
    static DICT: std::sync::OnceLock<Dictionary> = std::sync::OnceLock::new();
    DICT.get_or_init(|| build_dictionary(&spec(&["D1"], 1.0, default_directions(), false)).unwrap().0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn nearest_direction_gap_is_within_the_covering_bound(
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0
    ) {
        let n = (x * x + y * y + z * z).sqrt();
        prop_assume!(n > 1e-3);
        let zhat = [x / n, y / n, z / n];
        let dict = shared_26_dictionary();
        let dirs: Vec<Vec3> = dict.entries().iter().map(|e| e.key.direction).collect();
        let (entry, gap) = dict
            .nearest_direction_entry("D1", WaveNumber::from_wavelength(2.0).unwrap(), &zhat)
            .unwrap();
        prop_assert!(gap <= nearest_neighbour_bound(&dirs) + 1e-12);
        // The returned entry really is the closest one.
        for d in &dirs {
            prop_assert!(dot(d, &zhat) <= dot(&entry.key.direction, &zhat) + 1e-15);
        }
    }
}

#[test]
fn regeneration_audit_is_within_solver_tolerance() {
    let (dict, _) = build_dictionary(&spec(&["D1", "D4"], 3.0, default_directions()[..3].to_vec(), true)).unwrap();
    let report = dict.audit(4).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.near_relative.is_some());
    assert!(dict.audit(99).is_err());
}

#[test]
fn on_demand_entries_match_the_built_dictionary_and_are_cached() {
    let s = spec(&["D1", "D2"], 2.0, vec![[0.0, 1.0, 0.0]], true);
    let (dict, _) = build_dictionary(&s).unwrap();
    let lazy = OnDemandDictionary::new(s.shapes.clone(), s.polarization, s.solver, s.grid.clone(), s.near_field.clone());
    let k = s.k_values[0];
    let a = lazy.entry("D2", k, &[0.0, 1.0, 0.0]).unwrap();
    assert_eq!(*a, dict.entries()[1]);
    let b = lazy.entry("D2", k, &[0.0, 1.0, 0.0]).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    assert_eq!(lazy.cached(), 1);
    assert!(lazy.entry("D2", k, &[0.0, 2.0, 0.0]).is_err());
    assert!(lazy.entry("nope", k, &[0.0, 1.0, 0.0]).is_err());
}

#[test]
fn failed_entries_fail_the_build() {
    let mut s = spec(&["D1"], 5.0, x_axis(), false);
    s.solver.max_iterations = 1;
    assert!(matches!(build_dictionary(&s), Err(Error::IncompleteDictionary(1))));
}

#[test]
fn invalid_build_inputs_are_rejected() {
    let s = spec(&["D1"], 2.0, vec![[1.0, 1.0, 0.0]], false);
    assert!(matches!(build_dictionary(&s), Err(Error::NonUnitDirection(_))));
    let s = spec(&["D1", "D1"], 2.0, x_axis(), false);
    assert!(matches!(build_dictionary(&s), Err(Error::InvalidDictionary(_))));
    let mut s = spec(&["D1"], 2.0, x_axis(), false);
    s.directions.clear();
    assert!(build_dictionary(&s).is_err());
    assert!(norm(&default_directions()[0]) > 0.0);
}

#[test]
fn many_entries_reload_to_equal_values() {
    // Residuals and tolerances live in the JSON header and must parse back
    // to the same f64.
    let (dict, _) = build_dictionary(&spec(&["D1", "D3"], 3.7, default_directions(), true)).unwrap();
    let loaded = Dictionary::from_bytes(&dict.to_bytes()).unwrap();
    assert_eq!(loaded, dict);
    assert_eq!(loaded.to_bytes(), dict.to_bytes());
}
