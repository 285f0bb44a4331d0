use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use emgest::dictionary::{build_dictionary, BuildReport, BuildSpec, Dictionary};
use emgest::em::vsh_basis;
use emgest::forward::{simulate_measurement, FarFieldMode, Measurement};
use emgest::recognition::{
    add_aperture_noise, add_far_field_noise, identify, indicator_map_csv, locate, location_table_csv,
    low_frequency_advisory, Identification, LocationRow, MatchMode, MatchTable, MeasuredData, NoiseSpec,
};
use emgest::shapes::{rasterize_contrast, PlacedShape, Placement};
use emgest::vec3::Vec3;

use crate::config::{ExperimentConfig, Resolved};
use crate::error::CliError;
use crate::files::{write_output, Acquisition, MeasurementFile, Role};

pub const DICTIONARY_FILE: &str = "dictionary.emgdict";
pub const BUILD_REPORT_FILE: &str = "build-report.csv";
pub const MEASUREMENT_DIR: &str = "measurements";
pub const LOCATION_FILE: &str = "location.csv";
pub const MAP_DIR: &str = "maps";
pub const GESTURE_RAW_FILE: &str = "gesture-raw.csv";
pub const GESTURE_NORMALIZED_FILE: &str = "gesture-normalized.csv";
pub const ACCURACY_FILE: &str = "accuracy.csv";
pub const SWEEP_DIR: &str = "sweep";

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: PathBuf,
    pub strict: bool,
    /// Measurement files for `locate`/`identify`; defaults to the ones
    /// `simulate` writes under the output directory.
    pub measurements: Vec<PathBuf>,
    pub dictionary: Option<PathBuf>,
    /// Skip the location stage in `identify` and match at this point.
    pub position: Option<Vec3>,
    pub timing_file: Option<PathBuf>,
}

pub struct Context {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub options: Options,
}

impl Context {
    pub fn new(config: ExperimentConfig, options: Options) -> Result<Self, CliError> {
        let resolved = config.validate()?;
        Ok(Self {
            config,
            resolved,
            options,
        })
    }

    fn out(&self, name: &str) -> PathBuf {
        self.options.out.join(name)
    }

    fn comments(&self, noise: Option<&NoiseSpec>) -> Vec<String> {
        let r = &self.resolved;
        let mut c = vec![
            format!("emgest {}", env!("CARGO_PKG_VERSION")),
            format!("config-hash {}", r.hash),
            format!(
                "k_low {} (wavelength {}) k_high {} (wavelength {})",
                r.k_low.value(),
                r.k_low.wavelength(),
                r.k_high.value(),
                r.k_high.wavelength()
            ),
            format!("placement {:?}", r.z),
            format!(
                "sampling center {:?} spacing {:?} counts {:?} refine {}",
                r.sampling.center, r.sampling.spacing, r.sampling.counts, r.refine
            ),
            format!("far-field points {} match mode {:?}", r.grid.len(), r.mode),
        ];
        if let Some(n) = noise {
            c.push(format!(
                "noise delta {} seed {} (per component, scale = max euclidean magnitude)",
                n.delta, n.seed
            ));
        }
        c
    }
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn simulate_clean(ctx: &Context) -> Result<Vec<(String, Measurement, Measurement)>, CliError> {
    let r = &ctx.resolved;
    r.shapes
        .par_iter()
        .map(|s| {
            let c = &r.contrast;
            let contrast = rasterize_contrast(s, c.n(), c.resolution, c.smoothing)?;
            let placed = PlacedShape::new(s.clone(), Placement::new(r.z)?, contrast);
            let run = |k| {
                simulate_measurement(&placed, k, &r.sources, &r.receivers, &r.grid, &r.solver, FarFieldMode::Exact)
            };
            let low = run(r.k_low)?;
            let high = run(r.k_high)?;
            log::info!(
                "simulated {}: {} + {} iterations",
                s.id(),
                low.iterations,
                high.iterations
            );
            Ok((s.id().to_string(), low, high))
        })
        .collect()
}

fn with_noise(m: &Measurement, spec: &NoiseSpec, stream: u64) -> Result<Measurement, CliError> {
    Ok(Measurement {
        aperture: add_aperture_noise(&m.aperture, spec, stream)?,
        far_field: add_far_field_noise(&m.far_field, spec, stream + 1)?,
        iterations: m.iterations,
        residual: m.residual,
    })
}

/// Each shape gets its own noise streams: four per shape, one for every
/// (frequency, near/far) pair.
fn noisy_files(
    ctx: &Context,
    clean: &[(String, Measurement, Measurement)],
    spec: &NoiseSpec,
) -> Result<Vec<MeasurementFile>, CliError> {
    let r = &ctx.resolved;
    clean
        .iter()
        .enumerate()
        .map(|(i, (id, low, high))| {
            let base = 4 * i as u64;
            let acq = vec![
                Acquisition::new(Role::Location, r.k_low, &with_noise(low, spec, base)?),
                Acquisition::new(Role::Shape, r.k_high, &with_noise(high, spec, base + 2)?),
            ];
            Ok(MeasurementFile::new(
                &r.hash,
                id,
                Some(r.z),
                (spec.delta, spec.seed),
                &r.sources,
                &r.receivers,
                acq,
            ))
        })
        .collect()
}

fn write_measurements(dir: &Path, files: &[MeasurementFile]) -> Result<(), CliError> {
    for f in files {
        write_output(&dir.join(format!("{}.json", file_stem(&f.shape))), f.to_json().as_bytes())?;
    }
    Ok(())
}

fn load_measurements(ctx: &Context) -> Result<Vec<MeasurementFile>, CliError> {
    let paths: Vec<PathBuf> = if ctx.options.measurements.is_empty() {
        ctx.resolved
            .shapes
            .iter()
            .map(|s| ctx.out(MEASUREMENT_DIR).join(format!("{}.json", file_stem(s.id()))))
            .collect()
    } else {
        ctx.options.measurements.clone()
    };
    let files: Vec<MeasurementFile> = paths.iter().map(|p| MeasurementFile::load(p)).collect::<Result<_, _>>()?;
    for (f, p) in files.iter().zip(&paths) {
        if f.config_hash != ctx.resolved.hash {
            log::warn!("{} was produced by config {}", p.display(), f.config_hash);
        }
    }
    Ok(files)
}

fn locate_all(ctx: &Context, files: &[MeasurementFile]) -> Result<Vec<LocationRow>, CliError> {
    let r = &ctx.resolved;
    for s in &r.shapes {
        if low_frequency_advisory(r.k_low, s.diameter()) {
            log::warn!(
                "location wavelength {} is not large compared to {} (diameter {:.2})",
                r.k_low.wavelength(),
                s.id(),
                s.diameter()
            );
        }
    }
    files
        .iter()
        .map(|f| {
            let acq = f.acquisition(Role::Location)?;
            let far = acq.far_field()?;
            let basis = vsh_basis(far.grid().clone());
            let result = locate(&far, acq.wave_number()?, &basis, &r.sampling, None, r.refine)?;
            Ok(LocationRow {
                shape: f.shape.clone(),
                truth: f.placement,
                result,
            })
        })
        .collect()
}

fn load_dictionary(ctx: &Context) -> Result<Dictionary, CliError> {
    let path = ctx
        .options
        .dictionary
        .clone()
        .or_else(|| ctx.config.dictionary.file.clone())
        .unwrap_or_else(|| ctx.out(DICTIONARY_FILE));
    if !path.exists() {
        return Err(CliError::Input(format!(
            "no dictionary at {}; run build-dict first or set dictionary.file",
            path.display()
        )));
    }
    Dictionary::load(&path).map_err(|e| match e {
        emgest::Error::Io(io) => CliError::io(&path, io),
        other => CliError::Core(other),
    })
}

fn identify_all(
    ctx: &Context,
    files: &[MeasurementFile],
    dict: &Dictionary,
    positions: &[Vec3],
) -> Result<Vec<Identification>, CliError> {
    files
        .iter()
        .zip(positions)
        .map(|(f, z)| {
            let acq = f.acquisition(Role::Shape)?;
            let k = acq.wave_number()?;
            let id = match ctx.resolved.mode {
                MatchMode::Far => {
                    let far = acq.far_field()?;
                    identify(MeasuredData::Far(&far, None), dict, k, z)?
                }
                MatchMode::Near => {
                    let near = acq.aperture(&f.layout()?)?;
                    identify(MeasuredData::Near(&near), dict, k, z)?
                }
            };
            Ok(id)
        })
        .collect()
}

fn build(ctx: &Context) -> Result<(Dictionary, BuildReport), CliError> {
    let r = &ctx.resolved;
    let spec = BuildSpec {
        shapes: r.shape_records(),
        k_values: vec![r.k_high],
        directions: r.directions.clone(),
        polarization: r.sources.polarization(),
        solver: r.solver,
        grid: r.grid.clone(),
        near_field: r.near_field.clone(),
    };
    let (mut dict, report) = build_dictionary(&spec)?;
    dict.set_provenance(format!("config-hash {}", r.hash));
    Ok((dict, report))
}

fn report_csv(report: &BuildReport, comments: &[String]) -> String {
    let mut out = comment_block(comments);
    out.push_str("shape,k,dx,dy,dz,iterations,residual,error\n");
    for rec in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:e},{}",
            rec.shape,
            rec.k,
            rec.direction[0],
            rec.direction[1],
            rec.direction[2],
            rec.iterations,
            rec.residual,
            rec.error.as_deref().unwrap_or("")
        );
    }
    out
}

fn comment_block(comments: &[String]) -> String {
    comments.iter().map(|c| format!("# {c}\n")).collect()
}

fn write_dictionary(ctx: &Context, dict: &Dictionary, report: &BuildReport) -> Result<(), CliError> {
    write_output(&ctx.out(DICTIONARY_FILE), &dict.to_bytes())?;
    write_output(&ctx.out(BUILD_REPORT_FILE), report_csv(report, &ctx.comments(None)).as_bytes())
}

pub fn build_dict(ctx: &Context) -> Result<(), CliError> {
    let (dict, report) = build(ctx)?;
    write_dictionary(ctx, &dict, &report)?;
    log::info!("wrote {} entries to {}", dict.len(), ctx.out(DICTIONARY_FILE).display());
    Ok(())
}

fn configured_noise(ctx: &Context) -> Result<NoiseSpec, CliError> {
    Ok(NoiseSpec::new(ctx.config.noise.delta, ctx.config.noise.seed)?)
}

pub fn simulate(ctx: &Context) -> Result<(), CliError> {
    let clean = simulate_clean(ctx)?;
    let files = noisy_files(ctx, &clean, &configured_noise(ctx)?)?;
    write_measurements(&ctx.out(MEASUREMENT_DIR), &files)
}

fn write_locations(dir: &Path, ctx: &Context, rows: &[LocationRow], noise: &NoiseSpec) -> Result<(), CliError> {
    let comments = ctx.comments(Some(noise));
    write_output(&dir.join(LOCATION_FILE), location_table_csv(rows, &comments).as_bytes())?;
    for row in rows {
        let mut c = comments.clone();
        c.push(format!("indicator map of {}", row.shape));
        write_output(
            &dir.join(MAP_DIR).join(format!("{}.csv", file_stem(&row.shape))),
            indicator_map_csv(&ctx.resolved.sampling, &row.result, &c).as_bytes(),
        )?;
    }
    Ok(())
}

fn noise_of(files: &[MeasurementFile]) -> Result<NoiseSpec, CliError> {
    let n = files.first().map_or((0.0, 0), |f| (f.noise.delta, f.noise.seed));
    Ok(NoiseSpec::new(n.0, n.1)?)
}

pub fn locate_cmd(ctx: &Context) -> Result<(), CliError> {
    let files = load_measurements(ctx)?;
    let rows = locate_all(ctx, &files)?;
    write_locations(&ctx.options.out, ctx, &rows, &noise_of(&files)?)?;
    check_outcome(ctx.options.strict, &rows, None)
}

fn write_tables(dir: &Path, ctx: &Context, table: &MatchTable, noise: &NoiseSpec) -> Result<(), CliError> {
    let mut comments = ctx.comments(Some(noise));
    comments.push("rows: measured shape; columns: dictionary shape; raw indicator values".into());
    write_output(&dir.join(GESTURE_RAW_FILE), table.to_csv(&comments, false).as_bytes())?;
    *comments.last_mut().expect("nonempty") =
        "rows: measured shape; columns: dictionary shape; each row divided by its maximum".into();
    write_output(&dir.join(GESTURE_NORMALIZED_FILE), table.to_csv(&comments, true).as_bytes())
}

pub fn identify_cmd(ctx: &Context) -> Result<(), CliError> {
    let files = load_measurements(ctx)?;
    let dict = load_dictionary(ctx)?;
    let (rows, positions) = match ctx.options.position {
        Some(p) => (Vec::new(), vec![p; files.len()]),
        None => {
            let rows = locate_all(ctx, &files)?;
            let p = rows.iter().map(|r| r.result.position).collect();
            (rows, p)
        }
    };
    let ids = identify_all(ctx, &files, &dict, &positions)?;
    let table = MatchTable::from_identifications(files.iter().map(|f| f.shape.clone()).collect(), &ids)?;
    write_tables(&ctx.options.out, ctx, &table, &noise_of(&files)?)?;
    check_outcome(ctx.options.strict, &rows, Some(&table))
}

/// Escalates ties and boundary maxima under `--strict`, and reports a
/// labelled table that is not diagonal-dominant.
fn check_outcome(strict: bool, rows: &[LocationRow], table: Option<&MatchTable>) -> Result<(), CliError> {
    if strict {
        if let Some(r) = rows.iter().find(|r| r.result.is_tie()) {
            return Err(CliError::Tie(format!("location of {} is not unique", r.shape)));
        }
        if let Some(t) = table {
            if let Some(i) = t.winners.iter().position(|w| w.len() > 1) {
                return Err(CliError::Tie(format!("TIE in the gesture row of {}", t.rows[i])));
            }
        }
        if let Some(r) = rows.iter().find(|r| r.result.on_boundary) {
            return Err(CliError::Boundary(format!(
                "location maximum of {} lies on the sampling-box boundary",
                r.shape
            )));
        }
    }
    if let Some(t) = table {
        let labelled = t.rows.iter().all(|r| t.columns.contains(r));
        if labelled && !t.diagonal_dominant() {
            return Err(CliError::NotDiagonal("gesture table is not diagonal-dominant".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Default)]
struct Timing {
    stages: Vec<(&'static str, Duration)>,
}

impl Timing {
    fn add(&mut self, name: &'static str, d: Duration) {
        match self.stages.iter_mut().find(|s| s.0 == name) {
            Some(s) => s.1 += d,
            None => self.stages.push((name, d)),
        }
    }

    fn render(&self) -> String {
        let total: f64 = self.stages.iter().map(|s| s.1.as_secs_f64()).sum();
        let mut out = String::from("stage,seconds,fraction\n");
        for (name, d) in &self.stages {
            let s = d.as_secs_f64();
            let _ = writeln!(out, "{name},{s:.3},{:.4}", if total > 0.0 { s / total } else { 0.0 });
        }
        let _ = writeln!(out, "total,{total:.3},1.0000");
        out
    }
}

fn timed<T>(timing: &mut Timing, name: &'static str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let v = f();
    timing.add(name, t.elapsed());
    v
}

#[derive(Debug)]
struct SweepRow {
    delta: f64,
    mean_error: f64,
    max_error: f64,
    correct: usize,
    total: usize,
    margin: Option<f64>,
    location_ties: usize,
    shape_ties: usize,
    boundary: usize,
}

fn accuracy_csv(rows: &[SweepRow], comments: &[String]) -> String {
    let mut out = comment_block(comments);
    out.push_str(
        "delta,mean_location_error,max_location_error,identified,total,min_diagonal_margin,location_ties,shape_ties,boundary\n",
    );
    for r in rows {
        let margin = r.margin.map(|m| format!("{m:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{},{},{margin},{},{},{}",
            r.delta, r.mean_error, r.max_error, r.correct, r.total, r.location_ties, r.shape_ties, r.boundary
        );
    }
    out
}

fn config_copy(ctx: &Context) -> String {
    let mut c = ctx.config.clone();
    c.output = Default::default();
    format!("# config-hash {}\n{}", ctx.resolved.hash, c.to_toml())
}

/// Dictionary, simulation, location and identification for every configured
/// shape, repeated for each noise level of the sweep.
pub fn experiment(ctx: &Context) -> Result<(), CliError> {
    let mut timing = Timing::default();
    write_output(&ctx.out("config.toml"), config_copy(ctx).as_bytes())?;

    let dict = timed(&mut timing, "dictionary", || -> Result<Dictionary, CliError> {
        if ctx.options.dictionary.is_some() || ctx.config.dictionary.file.is_some() {
            load_dictionary(ctx)
        } else {
            let (dict, report) = build(ctx)?;
            write_dictionary(ctx, &dict, &report)?;
            Ok(dict)
        }
    })?;
    let clean = timed(&mut timing, "simulation", || simulate_clean(ctx))?;

    let mut levels = vec![ctx.config.noise.delta];
    for d in &ctx.config.noise.sweep {
        if !levels.contains(d) {
            levels.push(*d);
        }
    }
    let mut sweep = Vec::new();
    let mut outcome = Ok(());
    for (i, &delta) in levels.iter().enumerate() {
        let spec = NoiseSpec::new(delta, ctx.config.noise.seed)?;
        let files = noisy_files(ctx, &clean, &spec)?;
        let rows = timed(&mut timing, "location", || locate_all(ctx, &files))?;
        let positions: Vec<Vec3> = rows.iter().map(|r| r.result.position).collect();
        let ids = timed(&mut timing, "identification", || identify_all(ctx, &files, &dict, &positions))?;
        let table = MatchTable::from_identifications(files.iter().map(|f| f.shape.clone()).collect(), &ids)?;

        let dir = if i == 0 {
            write_measurements(&ctx.out(MEASUREMENT_DIR), &files)?;
            ctx.options.out.clone()
        } else {
            ctx.out(SWEEP_DIR).join(format!("delta-{delta:.4}"))
        };
        write_locations(&dir, ctx, &rows, &spec)?;
        write_tables(&dir, ctx, &table, &spec)?;

        let errors: Vec<f64> = rows.iter().filter_map(|r| r.error()).collect();
        sweep.push(SweepRow {
            delta,
            mean_error: errors.iter().sum::<f64>() / errors.len().max(1) as f64,
            max_error: errors.iter().copied().fold(0.0, f64::max),
            correct: ids
                .iter()
                .zip(&files)
                .filter(|(id, f)| id.shape() == Some(f.shape.as_str()))
                .count(),
            total: ids.len(),
            margin: table.diagonal_margin(),
            location_ties: rows.iter().filter(|r| r.result.is_tie()).count(),
            shape_ties: ids.iter().filter(|id| id.is_tie()).count(),
            boundary: rows.iter().filter(|r| r.result.on_boundary).count(),
        });
        if i == 0 {
            outcome = check_outcome(ctx.options.strict, &rows, Some(&table));
        }
    }
    sweep.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let mut comments = ctx.comments(None);
    comments.push(format!("noise seed {} for every level", ctx.config.noise.seed));
    write_output(&ctx.out(ACCURACY_FILE), accuracy_csv(&sweep, &comments).as_bytes())?;

    let summary = timing.render();
    eprint!("{summary}");
    if let Some(path) = &ctx.options.timing_file {
        write_output(path, summary.as_bytes())?;
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_stems_are_filesystem_safe() {
        assert_eq!(file_stem("D1"), "D1");
        assert_eq!(file_stem("my shape/2"), "my_shape_2");
    }

    #[test]
    fn timing_fractions_sum_to_one() {
        let mut t = Timing::default();
        t.add("a", Duration::from_millis(300));
        t.add("b", Duration::from_millis(100));
        t.add("a", Duration::from_millis(100));
        let s = t.render();
        assert!(s.contains("a,0.400,0.8000"));
        assert!(s.contains("b,0.100,0.2000"));
    }
}
