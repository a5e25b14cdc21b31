use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use twolocal::code::{CodeStructure, SubsystemCodeSpec, DEFAULT_W_MAX};
use twolocal::dynamics::{
    decoupling_csv, decoupling_experiment, encoded_computation_fidelity, instance_for_seed, EvolutionConfig,
};
use twolocal::gf2::BinaryMatrix;
use twolocal::hamiltonian::penalty_hamiltonian;
use twolocal::matrix_code::{code_from_matrix, code_params, FamilyCode};
use twolocal::nogo::{scan_matrices, SCAN_SIZE_CAP};
use twolocal::pauli::PauliOp;
use twolocal::spectral::{
    calibrate, diagonalize_capped, encoding_calibration_targets, error_detection_check, verify_ground_space,
    CalibrationOptions, PenaltyCalibration, SpectralResult, DEFAULT_DEGENERACY_TOL,
};
use twolocal::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "twolocal",
    version,
    about = "Two-local subsystem codes, penalty Hamiltonians and their checks"
)]
struct Cli {
    /// Output directory for reports and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for seeded commands; overrides config and per-command defaults.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest qubit count handled with dense matrices.
    #[arg(long, global = true, default_value_t = 14)]
    dense_cap: usize,
    /// Tolerance for numerical checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code and write its structure report and generator listing.
    Code {
        #[command(flatten)]
        source: Source,
        /// Weight cap for the distance search.
        #[arg(long, default_value_t = DEFAULT_W_MAX)]
        w_max: usize,
    },
    /// Print the closed-form parameters [[n, k, d]].
    Params {
        #[command(flatten)]
        source: Source,
    },
    /// Diagonalize the penalty Hamiltonian, check the ground space and
    /// measure the calibration ratios.
    Calibrate {
        /// Code family index.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "code")]
        k: Option<u64>,
        /// Code JSON written by `code`.
        #[arg(long, required_unless_present = "k")]
        code: Option<PathBuf>,
    },
    /// Run the decoupling sweep and the encoded-computation fidelity check.
    Evolve(EvolveArgs),
    /// No-go weight bound checks.
    Nogo {
        #[command(subcommand)]
        command: NogoCommand,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Code family index.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    /// Binary matrix file, one row of 0/1 characters per line.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// Evolution config JSON; defaults apply to absent fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Calibration JSON written by `calibrate`; measured on the fly when absent.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Penalty strengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    ep: Option<Vec<f64>>,
    /// Seeds, comma separated.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Use the raw couplings instead of dividing by the calibrated ratios.
    #[arg(long)]
    no_rescale: bool,
    #[arg(long)]
    total_time: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Also write CSV tables.
    #[arg(long)]
    emit_csv: bool,
}

#[derive(Subcommand, Debug)]
enum NogoCommand {
    /// Check the weight bound on codes from random binary matrices.
    Scan {
        #[arg(long, default_value_t = 5)]
        size_max: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Weight cap for the minimum-weight search.
        #[arg(long, default_value_t = 4)]
        w_cap: usize,
    },
}

/// A numerically violated claim; maps to exit code 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Violation(String);

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: Value,
    version: &'static str,
    seeds: Vec<u64>,
    outputs: Vec<PathBuf>,
    wall_clock_seconds: f64,
}

struct Run {
    out: PathBuf,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn new(out: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Self {
            out: out.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write_text(&mut self, name: &str, text: &str) -> anyhow::Result<()> {
        let path = self.out.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }
}

struct Outcome {
    command: &'static str,
    config: Value,
    seeds: Vec<u64>,
    violation: Option<String>,
}

fn load_matrix(path: &Path) -> anyhow::Result<BinaryMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.parse::<BinaryMatrix>()?)
}

fn build_code(source: &Source) -> anyhow::Result<(SubsystemCodeSpec, BinaryMatrix)> {
    match (source.k, &source.matrix) {
        (Some(k), _) => {
            let pc = FamilyCode::new(k as usize)?;
            Ok((pc.code, pc.layout.matrix))
        }
        (None, Some(path)) => {
            let a = load_matrix(path)?;
            Ok((code_from_matrix(&a)?.0, a))
        }
        (None, None) => unreachable!("clap enforces one source"),
    }
}

fn source_json(source: &Source) -> Value {
    json!({ "k": source.k, "matrix": source.matrix })
}

fn structure_json(code: &SubsystemCodeSpec, st: &CodeStructure, d: usize) -> Value {
    let label = |op| code.labeled(op);
    json!({
        "n": st.n,
        "k_logical": st.k,
        "s": st.s,
        "g": st.g,
        "d": d,
        "stabilizers": st.stabilizer_basis.iter().map(label).collect::<Vec<_>>(),
        "logical_pairs": st.logical_pairs.iter().map(|(x, z)| [label(x), label(z)]).collect::<Vec<_>>(),
        "gauge_pairs": st.gauge_pairs.iter().map(|(x, z)| [label(x), label(z)]).collect::<Vec<_>>(),
        "dependent_generators": st.dependent_generators,
    })
}

fn cmd_code(run: &mut Run, source: &Source, w_max: usize) -> anyhow::Result<Outcome> {
    let (code, _) = build_code(source)?;
    let st = code.derive_structure()?;
    let d = st.distance(w_max)?.weight();
    run.write_text("code.json", &(code.to_json()? + "\n"))?;
    run.write_json("structure.json", &structure_json(&code, &st, d))?;
    let listing: String = code
        .gauge_generators()
        .iter()
        .map(|g| format!("{g}\t{}\n", code.labeled(g)))
        .collect();
    run.write_text("generators.txt", &listing)?;
    println!(
        "[[{}, {}, {}]] with {} stabilizers and {} gauge qubits",
        st.n, st.k, d, st.s, st.g
    );
    Ok(Outcome {
        command: "code",
        config: json!({ "source": source_json(source), "w_max": w_max }),
        seeds: Vec::new(),
        violation: None,
    })
}

fn cmd_params(run: &mut Run, source: &Source) -> anyhow::Result<Outcome> {
    let (_, a) = build_code(source)?;
    let p = code_params(&a)?;
    run.write_json("params.json", &p)?;
    println!("[[{}, {}, {}]]", p.n, p.k, p.d);
    Ok(Outcome {
        command: "params",
        config: json!({ "source": source_json(source) }),
        seeds: Vec::new(),
        violation: None,
    })
}

fn spectrum_json(res: &SpectralResult) -> Value {
    json!({
        "n": res.n,
        "ground_energy": res.ground_energy,
        "ground_degeneracy": res.ground_degeneracy,
        "gap": res.gap,
        "degeneracy_tol": res.degeneracy_tol,
        "warning": res.warning,
        "levels": res.levels(),
    })
}

fn cmd_calibrate(cli: &Cli, run: &mut Run, k: Option<u64>, code_path: Option<&Path>) -> anyhow::Result<Outcome> {
    let (code, targets, code_id) = match (k, code_path) {
        (Some(k), _) => {
            let pc = FamilyCode::new(k as usize)?;
            let targets = encoding_calibration_targets(&pc);
            (pc.code, targets, format!("family-k{k}"))
        }
        (None, Some(path)) => {
            let code = SubsystemCodeSpec::load(path)?;
            let targets = code.gauge_generators().to_vec();
            (code, targets, path.display().to_string())
        }
        (None, None) => unreachable!("clap enforces one source"),
    };
    let st = code.derive_structure()?;
    let hp = penalty_hamiltonian(&code)?;
    let res = diagonalize_capped(&hp, DEFAULT_DEGENERACY_TOL, cli.dense_cap)?;
    let ground = verify_ground_space(&st, &hp, &res, cli.tol)?;
    let detection = error_detection_check(&res, code.n(), cli.tol)?;
    run.write_json("spectrum.json", &spectrum_json(&res))?;
    run.write_json("ground_space.json", &ground)?;
    run.write_json("error_detection.json", &detection)?;
    let mut violation = None;
    if !ground.passed() {
        violation = Some(ground.clone().into_result().unwrap_err().to_string());
    } else if !detection.passed() {
        violation = Some(format!(
            "error detection: {} has residual {:.3e}",
            detection.worst, detection.max_residual
        ));
    } else {
        let opts = CalibrationOptions {
            tol: cli.tol,
            ..CalibrationOptions::default()
        };
        let cal = calibrate(&st, &res, &targets, &code_id, opts)?;
        run.write_text("calibration.json", &(cal.to_json()? + "\n"))?;
        for (op, alpha) in &cal.alphas {
            println!("alpha({}) = {alpha:.6}", code.labeled(&PauliOp::parse(code.n(), op)?));
        }
    }
    println!(
        "ground degeneracy {} (expected {})",
        res.ground_degeneracy, ground.expected_degeneracy
    );
    Ok(Outcome {
        command: "calibrate",
        config: json!({ "k": k, "code": code_path, "tol": cli.tol, "dense_cap": cli.dense_cap }),
        seeds: Vec::new(),
        violation,
    })
}

fn cmd_evolve(cli: &Cli, run: &mut Run, args: &EvolveArgs) -> anyhow::Result<Outcome> {
    let mut cfg: EvolutionConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => EvolutionConfig::default(),
    };
    if let Some(ep) = &args.ep {
        cfg.ep_values = ep.clone();
    }
    if let Some(seeds) = &args.seeds {
        cfg.seeds = seeds.clone();
    } else if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    if let Some(t) = args.total_time {
        cfg.total_time = t;
    }
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    if args.no_rescale {
        cfg.rescale = false;
    }
    cfg.validate()?;
    let pc = FamilyCode::new(cfg.k)?;
    let n_bath = cfg.bath.system_qubits.as_ref().map_or(pc.n(), Vec::len);
    if pc.n() + n_bath > cli.dense_cap {
        return Err(Error::DenseCap {
            qubits: pc.n() + n_bath,
            cap: cli.dense_cap,
        }
        .into());
    }
    let cal = match &args.calibration {
        Some(path) => PenaltyCalibration::load(path)?,
        None => {
            let st = pc.code.derive_structure()?;
            let hp = penalty_hamiltonian(&pc.code)?;
            let res = diagonalize_capped(&hp, DEFAULT_DEGENERACY_TOL, cli.dense_cap)?;
            let opts = CalibrationOptions {
                tol: cli.tol,
                ..CalibrationOptions::default()
            };
            calibrate(
                &st,
                &res,
                &encoding_calibration_targets(&pc),
                &format!("family-k{}", cfg.k),
                opts,
            )?
        }
    };
    let reports = decoupling_experiment(&cfg, &pc, &cal)?;
    let fidelity = cfg
        .seeds
        .iter()
        .map(|&seed| {
            let (schedule, _) = instance_for_seed(&cfg, &pc, seed);
            let report = encoded_computation_fidelity(&cfg, &pc, cfg.rescale.then_some(&cal), &schedule, seed)?;
            Ok(json!({ "seed": seed, "report": report }))
        })
        .collect::<twolocal::Result<Vec<_>>>()?;
    run.write_json("decoupling.json", &reports)?;
    run.write_json("fidelity.json", &fidelity)?;
    if args.emit_csv {
        run.write_text("decoupling.csv", &decoupling_csv(&reports))?;
        let mut csv = String::from("seed,ep,infidelity\n");
        for entry in &fidelity {
            for row in entry["report"]["rows"].as_array().into_iter().flatten() {
                csv.push_str(&format!(
                    "{},{},{:e}\n",
                    entry["seed"],
                    row["ep"],
                    row["infidelity"].as_f64().unwrap_or(f64::NAN)
                ));
            }
        }
        run.write_text("fidelity.csv", &csv)?;
    }
    for r in &reports {
        println!(
            "seed {}: slope {:.3}, monotone {}, bound holds {}",
            r.seed, r.slope, r.monotone, r.bound_holds
        );
    }
    let failing: Vec<u64> = reports.iter().filter(|r| !r.bound_holds).map(|r| r.seed).collect();
    let violation = (!failing.is_empty()).then(|| format!("decoupling bound violated for seeds {failing:?}"));
    Ok(Outcome {
        command: "evolve",
        config: serde_json::to_value(&cfg)?,
        seeds: cfg.seeds.clone(),
        violation,
    })
}

fn cmd_nogo_scan(cli: &Cli, run: &mut Run, size_max: usize, count: usize, w_cap: usize) -> anyhow::Result<Outcome> {
    if !(2..=SCAN_SIZE_CAP).contains(&size_max) {
        return Err(Error::Config(format!("--size-max must lie in 2..={SCAN_SIZE_CAP}, got {size_max}")).into());
    }
    let seed = cli.seed.unwrap_or(7);
    let report = scan_matrices(size_max, count, seed, w_cap)?;
    run.write_json("nogo.json", &report)?;
    println!(
        "{} instances, {} counterexamples, {} unresolved rows",
        report.count,
        report.counterexamples.len(),
        report.unresolved_rows
    );
    let violation = (!report.counterexamples.is_empty())
        .then(|| format!("counterexamples at instances {:?}", report.counterexamples));
    Ok(Outcome {
        command: "nogo scan",
        config: json!({ "size_max": size_max, "count": count, "seed": seed, "w_cap": w_cap }),
        seeds: vec![seed],
        violation,
    })
}

fn execute(cli: &Cli) -> anyhow::Result<Option<String>> {
    let start = Instant::now();
    let mut run = Run::new(&cli.out)?;
    let outcome = match &cli.command {
        Command::Code { source, w_max } => cmd_code(&mut run, source, *w_max)?,
        Command::Params { source } => cmd_params(&mut run, source)?,
        Command::Calibrate { k, code } => cmd_calibrate(cli, &mut run, *k, code.as_deref())?,
        Command::Evolve(args) => cmd_evolve(cli, &mut run, args)?,
        Command::Nogo {
            command: NogoCommand::Scan { size_max, count, w_cap },
        } => cmd_nogo_scan(cli, &mut run, *size_max, *count, *w_cap)?,
    };
    let manifest = RunManifest {
        command: outcome.command.to_string(),
        config: outcome.config,
        version: env!("CARGO_PKG_VERSION"),
        seeds: outcome.seeds,
        outputs: run.outputs.clone(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    run.write_json("manifest.json", &manifest)?;
    Ok(outcome.violation)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Violation>().is_some() {
        return EXIT_VIOLATION;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::CheckFailed(_)) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|v| match v {
        Some(msg) => bail!(Violation(msg)),
        None => Ok(()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
