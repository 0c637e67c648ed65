use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qsl_core::bc::default_optimizer;
use qsl_core::bounds::{bound_report, BoundLabel};
use qsl_core::cases::{
    cnot_case, cnot_finite_pulses, grover_case, hadamard_case, hadamard_range, CaseReport,
};
use qsl_core::evolution::OverlapTrace;
use qsl_core::harness::{
    emit_curves, format_number, load_system, report_csv_header, report_csv_row, report_text,
    verify_random, RunConfig,
};
use qsl_core::{energy_stats, Angle, EnergyStats, QslError};
use rayon::prelude::*;
use serde::Serialize;

use crate::{BoundsArgs, CaseCommand, Failure, Format};

fn io_error(path: &Path) -> impl Fn(io::Error) -> QslError + '_ {
    move |source| QslError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Usage(format!("cannot serialize output: {e}")))?;
    println!("{text}");
    Ok(())
}

fn load(path: &Path) -> Result<qsl_core::harness::LoadedSystem, Failure> {
    let loaded = load_system(path)?;
    if loaded.needs_normalization_warning() {
        eprintln!(
            "qsl: warning: state in {} is not normalized (| |psi| - 1 | = {:e}); normalizing",
            path.display(),
            loaded.norm_deviation
        );
    }
    Ok(loaded)
}

pub(crate) fn bounds(args: BoundsArgs) -> Result<(), Failure> {
    let theta = Angle::new(args.theta)?.radians();
    let stats = match (args.mean, &args.system) {
        (Some(mean), _) => EnergyStats::new(
            mean,
            args.spread.expect("clap requires --spread"),
            args.emin.expect("clap requires --emin"),
            args.emax.unwrap_or(f64::INFINITY),
        )?,
        (None, Some(path)) => {
            let loaded = load(path)?;
            energy_stats(&loaded.state, &loaded.system)?
        }
        (None, None) => unreachable!("clap requires --mean or --system"),
    };
    let bc = default_optimizer().value(theta)?;
    let report = bound_report(&stats, theta, bc, args.actual_time)?;
    match args.format {
        Format::Text => print!("{}", report_text(&report, args.units)),
        Format::Csv => println!(
            "{}\n{}",
            report_csv_header(),
            report_csv_row(&report, args.units)
        ),
        Format::Json => print_json(&report)?,
    }
    Ok(())
}

pub(crate) fn curve(points: usize, out: &Path) -> Result<(), Failure> {
    let rows = emit_curves(points, out)?;
    eprintln!("qsl: wrote {rows} rows to {}", out.display());
    Ok(())
}

fn ratio(time: f64, bound: Option<f64>) -> String {
    match bound {
        Some(b) if b > 0.0 => format_number(time / b),
        Some(_) => "inf".into(),
        None => String::new(),
    }
}

pub(crate) fn evolve(system: &Path, t_max: f64, samples: usize, out: &Path) -> Result<(), Failure> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Failure::Usage(format!(
            "t-max must be positive, got {t_max}"
        )));
    }
    if samples < 2 {
        return Err(Failure::Usage(format!(
            "samples must be at least 2, got {samples}"
        )));
    }
    let loaded = load(system)?;
    let stats = energy_stats(&loaded.state, &loaded.system)?;
    let trace = OverlapTrace::new(&loaded.system, &loaded.state)?;
    let optimizer = default_optimizer();

    let rows = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<String, QslError> {
            let time = t_max * k as f64 / (samples - 1) as f64;
            let sample = trace.sample(time);
            let report = bound_report(
                &stats,
                sample.theta,
                optimizer.value(sample.theta)?,
                Some(time),
            )?;
            let mut fields = vec![
                format_number(time),
                format_number(sample.s_real),
                format_number(sample.s_imag),
                format_number(sample.theta),
            ];
            fields.extend(
                BoundLabel::ALL
                    .iter()
                    .map(|&label| ratio(time, report.get(label))),
            );
            Ok(fields.join(","))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut header = vec![
        "time".to_string(),
        "s_real".into(),
        "s_imag".into(),
        "theta".into(),
    ];
    header.extend(
        BoundLabel::ALL
            .iter()
            .map(|label| format!("saturation_{label}")),
    );
    let mut file = BufWriter::new(File::create(out).map_err(io_error(out))?);
    writeln!(file, "{}", header.join(",")).map_err(io_error(out))?;
    for row in rows {
        writeln!(file, "{row}").map_err(io_error(out))?;
    }
    file.flush().map_err(io_error(out))?;
    Ok(())
}

fn print_case(report: &CaseReport) {
    println!("case = {}", report.name);
    println!("theta = {}", format_number(report.theta));
    println!("passage_time = {}", format_number(report.passage_time));
    if let Some(t) = report.simulated_passage_time {
        println!("simulated_passage_time = {}", format_number(t));
    }
    println!("spread = {}", format_number(report.stats.spread));
    println!(
        "spread_time_product_h = {}",
        format_number(report.spread_time_product_in_h())
    );
    println!(
        "tightest = {} {}",
        report.bound_values.tightest.label,
        format_number(report.bound_values.tightest.value)
    );
    println!(
        "saturation_ratio = {}",
        format_number(report.saturation_ratio)
    );
    for note in &report.notes {
        println!("note: {note}");
    }
}

pub(crate) fn case(case: CaseCommand, format: Format) -> Result<(), Failure> {
    match case {
        CaseCommand::Hadamard { epsilon, delta } => {
            let report = hadamard_case(epsilon, delta)?;
            if format == Format::Json {
                return print_json(&report);
            }
            print_case(&report);
            let range = hadamard_range();
            println!(
                "range_h = [{}, {}] (quoted upper {})",
                format_number(range.lower),
                format_number(range.upper),
                format_number(range.quoted_upper)
            );
        }
        CaseCommand::Cnot {
            epsilon,
            variant,
            delta,
        } => {
            let report = cnot_case(epsilon, variant)?;
            let pulses = delta.map(|d| cnot_finite_pulses(epsilon, d)).transpose()?;
            if format == Format::Json {
                return print_json(&(report, pulses));
            }
            print_case(&report.case);
            println!(
                "bare_initial_spread = {}",
                format_number(report.bare_initial_spread)
            );
            println!("gate_distance = {}", format_number(report.gate_distance));
            println!("gate_fidelity = {}", format_number(report.gate_fidelity));
            if let Some(alt) = &report.alternative {
                println!();
                print_case(alt);
            }
            if let Some(p) = pulses {
                println!();
                println!("pulse_duration = {}", format_number(p.pulse_duration));
                println!("pulse_saturation = {}", format_number(p.pulse_saturation));
                println!("pulse_gate_fidelity = {}", format_number(p.gate_fidelity));
            }
        }
        CaseCommand::Grover { n, spread } => {
            let budget = grover_case(n, spread)?;
            if format == Format::Json {
                return print_json(&budget);
            }
            println!(
                "iteration_angle = {}",
                format_number(budget.iteration_angle)
            );
            println!(
                "iteration_count = {}",
                format_number(budget.iteration_count)
            );
            println!(
                "per_iteration_min_time = {}",
                format_number(budget.per_iteration_min_time)
            );
            println!("total_min_time = {}", format_number(budget.total_min_time));
            println!(
                "total_spread_product_h = {}",
                format_number(budget.total_in_h())
            );
            println!(
                "exact_total_min_time = {}",
                format_number(budget.exact_total_min_time)
            );
        }
    }
    Ok(())
}

pub(crate) fn verify(
    trials: usize,
    dim_max: usize,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let config = RunConfig {
        seed,
        trials,
        dim_max,
        samples,
        ..RunConfig::default()
    };
    let report = verify_random(&config)?;
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::Usage(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, &text).map_err(io_error(path))?,
        None => print!("{text}"),
    }
    eprintln!(
        "qsl: {} trials, {} violations, {:.3} s",
        report.trials,
        report.violations.len(),
        report.elapsed.as_secs_f64()
    );
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violations(report.violations.len()))
    }
}
