//! Verification runner: loads a JSON run configuration (all fields
//! optional), applies command-line overrides, executes the requested
//! suite, prints one line per check, and writes `report.json` plus
//! `summary.csv` into the output directory.
//!
//! Exit codes: 0 — every check passed; 1 — at least one check failed
//! (the failing rows are listed); 2 — the configuration or run setup was
//! invalid (with a diagnostic naming the offending key or value).

use clap::{Parser, Subcommand};
use ovhardy::config::{FamilySpec, RunConfig};
use ovhardy::field::make_field;
use ovhardy::report::{assemble, failures, write_report, Row};
use ovhardy::suites;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ovhardy", version, about = "Verification suites for operator-valued local Hardy spaces")]
struct Cli {
    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory receiving report.json and summary.csv.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Override the configured base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the samples per axis.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Override the box side length.
    #[arg(long = "box", global = true, value_name = "L")]
    box_side: Option<f64>,
    /// Override the matrix size n.
    #[arg(long, global = true, value_name = "N")]
    matrix_size: Option<usize>,
    /// Worker threads (default: all cores, or OVHARDY_THREADS).
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    /// Double the sampling rate and scale nodes.
    #[arg(long, global = true)]
    refine: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact identities: Plancherel, the L₂ energy identity, the
    /// polarized duality identity, embed/retract, quadruple defects.
    VerifyIdentities,
    /// Hardy-norm equivalence ratios across square-function variants,
    /// plus the pointwise domination constants.
    VerifyEquivalences,
    /// Atom validity, uniform atom norm bounds, atomic decomposition.
    VerifyAtoms,
    /// Carleson functionals against bmo, the exponent-q majorant
    /// witness, and tent-norm duality.
    VerifyCarleson,
    /// Empirical duality constants over a field-pair grid.
    VerifyDuality,
    /// Shifted dyadic systems: nesting, conditional expectations, the
    /// covering search against its oracle, window means.
    VerifyDyadic,
    /// Time the core operations and write bench.csv.
    Bench,
    /// Generate one deterministic field and write it as an OVF1 file.
    ExportField {
        /// Family descriptor, e.g. '{"kind":"band-limited","kmax":8,"count":1}'.
        #[arg(long, value_name = "JSON")]
        spec: String,
        /// Destination file.
        #[arg(long, value_name = "PATH")]
        path: PathBuf,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            RunConfig::from_json(&text).map_err(|e| format!("config error: {e}"))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = cli.grid {
        cfg.grid = grid;
    }
    if let Some(l) = cli.box_side {
        cfg.box_side = l;
    }
    if let Some(n) = cli.matrix_size {
        cfg.matrix_size = n;
    }
    cfg.refine |= cli.refine;
    cfg.validate().map_err(|e| format!("config error: {e}"))?;
    Ok(cfg)
}

fn init_threads(cli: &Cli) -> Result<(), String> {
    let from_env = std::env::var("OVHARDY_THREADS")
        .ok()
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| format!("OVHARDY_THREADS must be an integer, got {v:?}"))
        })
        .transpose()?;
    if let Some(k) = cli.threads.or(from_env) {
        if k == 0 {
            return Err("thread count must be positive".into());
        }
        // A second init in the same process (tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

fn emit(cfg: &RunConfig, rows: Vec<Row>, skipped: usize, out: &PathBuf) -> Result<ExitCode, String> {
    for r in &rows {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {}/{} (p={}, {}): observed {:.6e} bound {:.6e}",
            r.suite, r.check, r.p, r.variant, r.observed, r.bound
        );
    }
    if skipped > 0 {
        println!("note: {skipped} pair(s) skipped for vanishing denominators");
    }
    let report = assemble(cfg, rows);
    std::fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    write_report(out, &report).map_err(|e| format!("cannot write report: {e}"))?;
    println!(
        "report: {} (config {})",
        out.join("report.json").display(),
        report.config_hash
    );
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed checks:");
        for line in failures(&report) {
            eprintln!("  {line}");
        }
        Ok(ExitCode::from(1))
    }
}

fn bench(cfg: &RunConfig, out: &PathBuf) -> Result<ExitCode, String> {
    use ovhardy::cubes::{CubeFamily, CubeKind};
    use ovhardy::field::FieldSpec;
    use ovhardy::kernels::Kernel;
    use ovhardy::square::{cone_profile, conic_square, Aperture, Weighting};

    let suite = cfg.resolve().map_err(|e| format!("config error: {e}"))?;
    let grid = suite.grid;
    let f = make_field(&FieldSpec::BandLimited { kmax: 8 }, grid, cfg.seed)
        .map_err(|e| e.to_string())?;
    let mut timings: Vec<(&str, f64)> = Vec::new();
    let time = |label: &'static str, timings: &mut Vec<(&str, f64)>, work: &mut dyn FnMut()| {
        let start = Instant::now();
        work();
        timings.push((label, start.elapsed().as_secs_f64()));
    };

    time("fft-roundtrip", &mut timings, &mut || {
        let hat = ovhardy::fft::forward(&f);
        let back = ovhardy::fft::inverse(&hat);
        assert!(back.rel_l2_error(&f).unwrap() < 1e-10);
    });
    let mut profile = None;
    time("cone-profile", &mut timings, &mut || {
        profile = Some(cone_profile(&f, Kernel::DPoisson, &suite.scales));
    });
    let profile = profile.expect("set by the timed closure");
    time("conic-square", &mut timings, &mut || {
        let _ = conic_square(&profile, Aperture::Local);
    });
    time("carleson-functional", &mut timings, &mut || {
        let family = CubeFamily::standard(&grid, CubeKind::Small, false);
        let _ = ovhardy::carleson::carleson_functional(
            &profile,
            &family,
            Weighting::PoissonDerivative,
        )
        .unwrap();
    });
    time("hardy-norm-p1", &mut timings, &mut || {
        let _ = ovhardy::norms::hp_c_norm(&f, 1.0, &suite.scales).unwrap();
    });
    time("cover-search-10k", &mut timings, &mut || {
        use ovhardy::cubes::Cube;
        use ovhardy::dyadic::{cover_cube, filtrations};
        let g = ovhardy::GridSpec::new(1, 2, 64.0, 512).unwrap();
        let systems = filtrations(&g);
        for i in 0..10_000 {
            let side = 0.01 + 0.99 * (i as f64 / 10_000.0);
            let q = Cube {
                center: [-6.0 + 12.0 * (i as f64 / 10_000.0), 0.0],
                side,
            };
            let _ = cover_cube(&q, &systems).unwrap();
        }
    });

    let mut csv = String::from("operation,seconds\n");
    for (label, secs) in &timings {
        println!("{label:>20}: {secs:.4} s");
        csv.push_str(&format!("{label},{secs:.6}\n"));
    }
    std::fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    let path = out.join("bench.csv");
    std::fs::write(&path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!("bench table: {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn export_field(cfg: &RunConfig, spec: &str, path: &PathBuf) -> Result<ExitCode, String> {
    let family: FamilySpec =
        serde_json::from_str(spec).map_err(|e| format!("bad field spec: {e}"))?;
    let suite = cfg.resolve().map_err(|e| format!("config error: {e}"))?;
    let field = make_field(&family.spec(), suite.grid, cfg.seed)
        .map_err(|e| format!("cannot generate field: {e}"))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    ovhardy::io::write_field(path, &field).map_err(|e| format!("cannot write field: {e}"))?;
    println!(
        "wrote {} ({}d grid, {} samples/axis, {}x{} blocks)",
        path.display(),
        suite.grid.d,
        suite.grid.nsamp,
        suite.grid.n,
        suite.grid.n
    );
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    init_threads(cli)?;
    let cfg = load_config(cli)?;
    let suite_err = |e: suites::SuiteError| format!("run error: {e}");
    match &cli.cmd {
        Command::VerifyIdentities => {
            let rows = suites::identity_suite(&cfg.resolve().map_err(|e| format!("config error: {e}"))?)
                .map_err(suite_err)?;
            emit(&cfg, rows, 0, &cli.out)
        }
        Command::VerifyEquivalences => {
            let resolved = cfg.resolve().map_err(|e| format!("config error: {e}"))?;
            let eq = suites::equivalence_suite(&resolved).map_err(suite_err)?;
            let mut rows = eq.rows;
            rows.extend(suites::domination_suite(&resolved).map_err(suite_err)?);
            emit(&cfg, rows, eq.skipped, &cli.out)
        }
        Command::VerifyAtoms => {
            let rows = suites::atom_suite(&cfg.resolve().map_err(|e| format!("config error: {e}"))?)
                .map_err(suite_err)?;
            emit(&cfg, rows, 0, &cli.out)
        }
        Command::VerifyCarleson => {
            let rows = suites::carleson_suite(&cfg.resolve().map_err(|e| format!("config error: {e}"))?)
                .map_err(suite_err)?;
            emit(&cfg, rows, 0, &cli.out)
        }
        Command::VerifyDuality => {
            let rep = suites::duality_bound_suite(&cfg.resolve().map_err(|e| format!("config error: {e}"))?)
                .map_err(suite_err)?;
            emit(&cfg, rep.rows, rep.skipped, &cli.out)
        }
        Command::VerifyDyadic => {
            let rows = suites::dyadic_suite(&cfg.resolve().map_err(|e| format!("config error: {e}"))?)
                .map_err(suite_err)?;
            emit(&cfg, rows, 0, &cli.out)
        }
        Command::Bench => bench(&cfg, &cli.out),
        Command::ExportField { spec, path } => export_field(&cfg, spec, path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
