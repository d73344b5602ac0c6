use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use tsv_core::config::{ParameterSet, PHYSICAL_KEYS};
use tsv_core::export::write_table;
use tsv_core::network::z_matrix_at;
use tsv_core::sparams::z_to_s;

use crate::output::{print_json, PendingFiles};

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter to sweep (any structural or material key, or z0).
    #[arg(long, value_name = "KEY")]
    pub param: String,

    #[arg(long)]
    pub start: f64,

    #[arg(long)]
    pub stop: f64,

    /// Number of evenly spaced values, ends included.
    #[arg(
        long,
        value_name = "N",
        conflicts_with = "step",
        required_unless_present = "step"
    )]
    pub count: Option<usize>,

    /// Increment between values; the last value does not pass `stop`.
    #[arg(long)]
    pub step: Option<f64>,

    /// Frequency for the |S21| and |S31| columns (Hz).
    #[arg(long, default_value_t = 1e9, value_name = "HZ")]
    pub probe_frequency: f64,

    /// CSV destination; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

const COLUMNS: [&str; 8] = [
    "r_dc_ohm", "l_tsv_h", "c_ox_f", "c_d_f", "c_si_f", "g_si_s", "s21_db", "s31_db",
];

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>> {
    let (start, stop) = (args.start, args.stop);
    if !(start.is_finite() && stop.is_finite()) {
        bail!("--start and --stop must be finite");
    }
    let count = match (args.count, args.step) {
        (Some(n), _) => n,
        (None, Some(step)) => {
            if !(step.is_finite() && step > 0.0) {
                bail!("--step must be > 0");
            }
            if stop < start {
                bail!("--step needs --stop >= --start");
            }
            ((stop - start) / step * (1.0 + 1e-12)).floor() as usize + 1
        }
        (None, None) => bail!("give --count or --step"),
    };
    match (count, args.step) {
        (0, _) => bail!("sweep needs at least one value"),
        (1, _) => Ok(vec![start]),
        (n, Some(step)) => Ok((0..n).map(|i| start + i as f64 * step).collect()),
        (n, None) => Ok((0..n)
            .map(|i| (start * (n - 1 - i) as f64 + stop * i as f64) / (n - 1) as f64)
            .collect()),
    }
}

fn row(set: &ParameterSet, f: f64) -> tsv_core::Result<Vec<f64>> {
    let model = set.model()?;
    let e = model.rlgc_at(f)?;
    let s = z_to_s(&z_matrix_at(f, &e)?, set.z0)?;
    Ok(vec![
        model.r_dc(),
        e.l_total,
        e.c_ox,
        e.c_d,
        e.c_si,
        e.g_si,
        s.s21_db(),
        s.s31_db(),
    ])
}

#[derive(Serialize)]
struct SweepReport<'a> {
    param: &'a str,
    probe_frequency_hz: f64,
    columns: Vec<&'a str>,
    rows: &'a [Vec<f64>],
}

pub fn run(base: &ParameterSet, args: &SweepArgs, json: bool) -> Result<ExitCode> {
    let key = args.param.as_str();
    if !(PHYSICAL_KEYS.contains(&key) || key == "z0") {
        bail!(
            "cannot sweep `{key}`; choose one of {} or z0",
            PHYSICAL_KEYS.join(", ")
        );
    }
    let values = sweep_values(args)?;
    let rows = values
        .iter()
        .map(|&v| {
            let mut set = base.clone();
            set.set(key, &format!("{v:e}"))
                .map_err(anyhow::Error::msg)?;
            set.check_run()?;
            let mut r = vec![v];
            r.extend(row(&set, args.probe_frequency).with_context(|| format!("{key} = {v:e}"))?);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec![key];
    columns.extend(COLUMNS);
    let mut csv = Vec::new();
    write_table(&columns, &rows, &mut csv)?;

    match &args.output {
        Some(path) => {
            let mut files = PendingFiles::default();
            files.add(path, csv);
            files.commit()?;
        }
        None if !json => print!("{}", String::from_utf8(csv)?),
        None => {}
    }
    if json {
        print_json(&SweepReport {
            param: key,
            probe_frequency_hz: args.probe_frequency,
            columns,
            rows: &rows,
        })?;
    } else if let Some(path) = &args.output {
        println!("{} rows of {key} written to {}", rows.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}
