use std::fs::File;
use std::io::Write;
use std::path::Path;

use mcu_forge_core::{
    build_cnu_with_branch, circuit_unitary, depth_scaling_table, lower_controlled, oracle_cnu,
    oracle_unitary, run, run_experiment, schedule_asap, to_qasm, Experiment, ExperimentResult,
    McGateSpec, NoiseSpec, RootBranch, Statevector, Unitary2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::unitary_spec::UnitarySpec;
use crate::{BenchArgs, CliError, DecomposeArgs, ExperimentArgs, Fault, Format, VerifyArgs, Which};

/// Largest control count checked against the full dense unitary.
const DENSE_N_MAX: usize = 9;
const DENSE_TOL: f64 = 1e-9;
const STATE_TOL: f64 = 1e-8;
const STATES_PER_TARGET: usize = 4;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    if args.format == Format::Qasm && !args.lower {
        return Err(CliError::Usage(
            "QASM output needs --lower (controlled rotations have no qelib1 spelling)".into(),
        ));
    }
    let u = args.u.resolve().map_err(CliError::Usage)?;
    let spec = McGateSpec::new(args.n, u);
    let controlled = build_cnu_with_branch(&spec, RootBranch::Principal);
    let report = schedule_asap(&controlled);
    let circuit = if args.lower {
        lower_controlled(&controlled)
    } else {
        controlled
    };
    let text = match args.format {
        Format::Json => circuit.to_json()? + "\n",
        Format::Qasm => to_qasm(&circuit)?,
    };
    let summary = format!(
        "n={} width={} gates={} controlled_gates={} depth_controlled={} depth_lowered={} cx_count={}",
        args.n,
        circuit.width(),
        circuit.len(),
        report.count_controlled,
        report.depth_controlled,
        report.depth_lowered,
        report.count_cx,
    );
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

struct Failure {
    n: usize,
    target: String,
    error: f64,
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.n_max < 1 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let branch = match args.inject_fault {
        Some(Fault::FaultySquareRoot) => RootBranch::FaultySquareRoot,
        None => RootBranch::Principal,
    };
    let mut seeds = ChaCha8Rng::seed_from_u64(args.seed);
    let mut failures = Vec::new();
    for n in 1..=args.n_max {
        let mut targets = vec![(String::from("x"), Unitary2::x())];
        for _ in 0..args.trials {
            let s: u64 = seeds.gen();
            let u = UnitarySpec::Random(s).resolve().map_err(CliError::Usage)?;
            targets.push((format!("random:{s}"), u));
        }
        let dense = n <= DENSE_N_MAX;
        let mut worst: f64 = 0.0;
        for (label, u) in targets {
            let spec = McGateSpec::new(n, u);
            let circuit = build_cnu_with_branch(&spec, branch);
            let err = if dense {
                circuit_unitary(&circuit)?.max_abs_diff(&oracle_unitary(&spec)?)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
                let mut e: f64 = 0.0;
                for _ in 0..STATES_PER_TARGET {
                    let psi = Statevector::random(n + 1, &mut rng);
                    e = e.max(run(&circuit, &psi)?.distance(&oracle_cnu(&spec, &psi)?));
                }
                e
            };
            let tol = if dense { DENSE_TOL } else { STATE_TOL };
            if err.is_nan() || err >= tol {
                failures.push(Failure {
                    n,
                    target: label,
                    error: err,
                });
            }
            worst = worst.max(err);
        }
        println!(
            "n={n:<3} {:<11} targets={} worst_error={worst:.3e}",
            if dense { "unitary" } else { "statevector" },
            args.trials + 1
        );
    }
    if failures.is_empty() {
        println!("all checks passed");
        return Ok(());
    }
    eprintln!("{} check(s) failed:", failures.len());
    for f in &failures {
        eprintln!("  n={} u={} error={:.3e}", f.n, f.target, f.error);
    }
    Err(CliError::Verification)
}

fn csv_out<T: Serialize>(rows: &[T], path: Option<&Path>) -> Result<(), CliError> {
    let io = |e: csv::Error, p: &Path| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(p, source),
        other => CliError::Usage(format!("{other:?}")),
    };
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = csv::Writer::from_writer(file);
            for r in rows {
                w.serialize(r).map_err(|e| io(e, p))?;
            }
            w.flush().map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = Path::new("<stdout>");
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for r in rows {
                w.serialize(r).map_err(|e| io(e, stdout))?;
            }
            w.flush().map_err(|e| CliError::io(stdout, e))
        }
    }
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let rows = depth_scaling_table(args.n_min, args.n_max, args.trials, args.seed)?;
    csv_out(&rows, args.csv.as_deref())
}

#[derive(Serialize)]
struct ExperimentRow {
    experiment: &'static str,
    n: usize,
    noise_p: f64,
    shots: u64,
    seed: u64,
    unitary: String,
    p_ones: f64,
    sigma: f64,
    depth_controlled: usize,
    depth_lowered: usize,
    cx_count: usize,
}

impl ExperimentRow {
    fn new(r: ExperimentResult, unitary: &str) -> Self {
        Self {
            experiment: r.experiment,
            n: r.n,
            noise_p: r.noise_p,
            shots: r.shots,
            seed: r.seed,
            unitary: unitary.to_string(),
            p_ones: r.p_ones,
            sigma: ExperimentResult::sigma(r.p_ones, r.shots),
            depth_controlled: r.depth_controlled,
            depth_lowered: r.depth_lowered,
            cx_count: r.cx_count,
        }
    }
}

fn spec_label(spec: &UnitarySpec) -> String {
    match spec {
        UnitarySpec::X => "x".into(),
        UnitarySpec::H => "h".into(),
        UnitarySpec::Z => "z".into(),
        UnitarySpec::Rx(t) => format!("rx:{t}"),
        UnitarySpec::Ry(t) => format!("ry:{t}"),
        UnitarySpec::Rz(t) => format!("rz:{t}"),
        UnitarySpec::Literal(_) => "literal".into(),
        UnitarySpec::Random(s) => format!("random:{s}"),
    }
}

pub fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let (exp, label) = match args.which {
        Which::A => {
            if args.u.is_some() {
                return Err(CliError::Usage(
                    "experiment a always targets X; drop -u".into(),
                ));
            }
            (Experiment::A, "x".to_string())
        }
        Which::B => {
            let spec = args.u.clone().unwrap_or(UnitarySpec::Random(args.seed));
            let u = spec.resolve().map_err(CliError::Usage)?;
            (Experiment::B(u), spec_label(&spec))
        }
    };
    let shots = args.shots.unwrap_or(exp.default_shots());
    if shots == 0 {
        return Err(CliError::Usage("--shots must be positive".into()));
    }
    let mut rows = Vec::new();
    for &n in &args.n {
        for &p in &args.p {
            let noise = NoiseSpec::new(p, args.seed)?;
            rows.push(ExperimentRow::new(
                run_experiment(&exp, n, &noise, shots)?,
                &label,
            ));
        }
    }
    eprintln!(
        "note: no transpiler optimization is applied; depths are raw ASAP depths of the lowered circuit"
    );
    csv_out(&rows, args.csv.as_deref())?;
    std::io::stdout()
        .flush()
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}
