use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use tsv_core::config::ParameterSet;
use tsv_core::export::write_table;
use tsv_core::spur::{
    calibrate_k_sub, reference_data, OscillatorModel, ReferencePoint, SidebandModel, SpurSetup,
};

use crate::output::{finite, print_json, PendingFiles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Sweep aggressor amplitude at a fixed frequency.
    Amplitude,
    /// Sweep aggressor frequency at a fixed amplitude.
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrationSource {
    /// Single built-in point: 100 mVpp at 1 GHz gives -36.1 dBc.
    Paper,
}

/// `AMPLITUDE_VPP,FREQUENCY_HZ,SPUR_DBC`
#[derive(Debug, Clone, Copy)]
pub struct RefArg(ReferencePoint);

impl FromStr for RefArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected AMPLITUDE,FREQUENCY,DBC, got `{s}`"));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        };
        Ok(RefArg(ReferencePoint::new(
            num(parts[0])?,
            num(parts[1])?,
            num(parts[2])?,
        )))
    }
}

#[derive(Debug, Args)]
pub struct SpurArgs {
    #[arg(long, value_enum, default_value = "amplitude")]
    pub mode: Mode,

    /// First swept value (V peak-to-peak or Hz). Mode default when omitted.
    #[arg(long)]
    pub start: Option<f64>,

    /// Last swept value.
    #[arg(long)]
    pub stop: Option<f64>,

    /// Number of swept values.
    #[arg(long, value_name = "N", default_value_t = 7)]
    pub count: usize,

    /// Aggressor frequency for amplitude mode (Hz).
    #[arg(long, default_value_t = 1e9, value_name = "HZ")]
    pub frequency: f64,

    /// Aggressor amplitude for frequency mode (V peak-to-peak).
    #[arg(long, default_value_t = 0.3, value_name = "VPP")]
    pub amplitude: f64,

    /// Built-in calibration; ignored when --ref or k_sub is given.
    #[arg(long, value_enum, default_value = "paper")]
    pub calibration: CalibrationSource,

    /// Calibration point `AMPLITUDE_VPP,FREQUENCY_HZ,SPUR_DBC`; repeatable.
    #[arg(long = "ref", value_name = "A,F,DBC")]
    pub references: Vec<RefArg>,

    /// Use J1/J0 instead of the first-order sideband.
    #[arg(long)]
    pub bessel: bool,

    /// CSV destination; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    value: f64,
    spur_dbc: Option<f64>,
    modulation_index: f64,
    h_sub: f64,
}

#[derive(Serialize)]
struct SpurReport<'a> {
    mode: &'a str,
    k_sub_hz_per_v: f64,
    calibrated: bool,
    residuals_db: Vec<f64>,
    slope_db_per_octave: Option<f64>,
    total_change_db: Option<f64>,
    spur_frequency_first_hz: f64,
    rows: Vec<Row>,
}

fn swept_values(args: &SpurArgs) -> Result<Vec<f64>> {
    let (start, stop) = match args.mode {
        Mode::Amplitude => (args.start.unwrap_or(0.1), args.stop.unwrap_or(0.7)),
        Mode::Frequency => (args.start.unwrap_or(0.5e9), args.stop.unwrap_or(2e9)),
    };
    if !(start.is_finite() && stop.is_finite()) {
        bail!("--start and --stop must be finite");
    }
    Ok(match args.count {
        0 => bail!("--count must be at least 1"),
        1 => vec![start],
        n => match args.mode {
            Mode::Amplitude => (0..n)
                .map(|i| (start * (n - 1 - i) as f64 + stop * i as f64) / (n - 1) as f64)
                .collect(),
            Mode::Frequency => {
                if !(start > 0.0 && stop > 0.0) {
                    bail!("frequencies must be > 0");
                }
                let ratio = stop / start;
                (0..n)
                    .map(|i| start * ratio.powf(i as f64 / (n - 1) as f64))
                    .collect()
            }
        },
    })
}

pub fn run(set: &ParameterSet, args: &SpurArgs, json: bool) -> Result<ExitCode> {
    let model = set.model()?;
    let values = swept_values(args)?;
    let sideband = if args.bessel {
        SidebandModel::Bessel
    } else {
        set.sideband
    };
    let mut setup = SpurSetup {
        model,
        // placeholder gain, replaced below
        oscillator: OscillatorModel::new(set.f_osc, 1.0, set.carrier_power_db)?,
        termination: set.termination,
        load: set.load.to_load(),
        sideband,
    };

    let (k_sub, residuals, calibrated) = match set.k_sub {
        Some(k) => {
            if !args.references.is_empty() {
                bail!("k_sub is set explicitly; drop it or the --ref points");
            }
            (k, Vec::new(), false)
        }
        None => {
            let points: Vec<ReferencePoint> = if args.references.is_empty() {
                match args.calibration {
                    CalibrationSource::Paper => vec![reference_data::CALIBRATION_ANCHOR],
                }
            } else {
                args.references.iter().map(|r| r.0).collect()
            };
            let cal =
                calibrate_k_sub(&points, |f| setup.transfer(f)).context("calibrating k_sub")?;
            (cal.k_sub, cal.residuals, true)
        }
    };
    setup.oscillator = OscillatorModel::new(set.f_osc, k_sub, set.carrier_power_db)?;

    let rows = values
        .iter()
        .map(|&v| {
            let (a, f) = match args.mode {
                Mode::Amplitude => (v, args.frequency),
                Mode::Frequency => (args.amplitude, v),
            };
            let e = setup
                .estimate(a, f)
                .with_context(|| format!("amplitude {a} Vpp at {f:e} Hz"))?;
            Ok((e, setup.transfer(f)?.norm(), v))
        })
        .collect::<Result<Vec<_>>>()?;

    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let change = (rows.len() > 1)
        .then_some(last.0.dbc - first.0.dbc)
        .filter(|c| c.is_finite());
    let slope = change
        .map(|c| c / (last.2 / first.2).log2())
        .filter(|s| s.is_finite());

    let (mode, column) = match args.mode {
        Mode::Amplitude => ("amplitude", "amplitude_v"),
        Mode::Frequency => ("frequency", "frequency_hz"),
    };
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|(e, h, v)| vec![*v, e.dbc, e.modulation_index, *h])
        .collect();
    let mut csv = Vec::new();
    write_table(
        &[column, "spur_dbc", "modulation_index", "h_sub"],
        &table,
        &mut csv,
    )?;

    let report = SpurReport {
        mode,
        k_sub_hz_per_v: k_sub,
        calibrated,
        residuals_db: residuals,
        slope_db_per_octave: slope,
        total_change_db: change,
        spur_frequency_first_hz: first.0.spur_frequency,
        rows: rows
            .iter()
            .map(|(e, h, v)| Row {
                value: *v,
                spur_dbc: finite(e.dbc),
                modulation_index: e.modulation_index,
                h_sub: *h,
            })
            .collect(),
    };

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
        print_json(&report)?;
        return Ok(ExitCode::SUCCESS);
    }

    // summary goes to stderr when the table occupies stdout
    let lines = summary_lines(&report, args);
    for line in lines {
        if args.output.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn summary_lines(report: &SpurReport, args: &SpurArgs) -> Vec<String> {
    let mut out = vec![format!(
        "k_sub = {:.6e} Hz/V ({})",
        report.k_sub_hz_per_v,
        if report.calibrated {
            "calibrated"
        } else {
            "given"
        }
    )];
    if !report.residuals_db.is_empty() {
        let r: Vec<String> = report
            .residuals_db
            .iter()
            .map(|r| format!("{r:+.3}"))
            .collect();
        out.push(format!("calibration residuals (dB): {}", r.join(" ")));
    }
    let over = match args.mode {
        Mode::Amplitude => "of amplitude",
        Mode::Frequency => "of frequency",
    };
    match (report.slope_db_per_octave, report.total_change_db) {
        (Some(slope), Some(change)) => {
            out.push(format!("slope {slope:+.3} dB per octave {over}"));
            match args.mode {
                Mode::Amplitude => out.push(format!("total rise {change:+.3} dB")),
                Mode::Frequency => out.push(format!("total roll-off {:.3} dB", -change)),
            }
        }
        _ => out.push("slope undefined (single point or no spur)".into()),
    }
    out
}
