use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde::Serialize;

use tsv_core::config::ParameterSet;
use tsv_core::export::write_s_csv;
use tsv_core::network::z_sweep;
use tsv_core::sparams::s_sweep;
use tsv_core::touchstone::{write_s3p, DataFormat, WriteOptions};
use tsv_core::TsvModel;

use crate::output::{print_json, PendingFiles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Ri,
    Ma,
    Db,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory for the output files.
    #[arg(short, long, default_value = ".")]
    pub output_dir: PathBuf,

    /// Base name: writes NAME.s3p and NAME_s21_s31.csv.
    #[arg(long, default_value = "tsv_pair")]
    pub name: String,

    /// Touchstone number format.
    #[arg(long, value_enum, default_value = "ri")]
    pub format: FormatArg,

    /// Add every S entry (real, imaginary) to the CSV.
    #[arg(long)]
    pub full: bool,

    /// Frequency at which the element summary is evaluated (Hz).
    #[arg(long, default_value_t = 1e9, value_name = "HZ")]
    pub summary_frequency: f64,
}

#[derive(Debug, Serialize)]
pub struct ElementSummary {
    pub frequency_hz: f64,
    pub r_dc_ohm: f64,
    pub skin_depth_m: f64,
    pub r_total_ohm: f64,
    pub l_tsv_h: f64,
    pub c_ox_f: f64,
    pub depletion_width_m: f64,
    pub c_d_f: f64,
    pub c_si_f: f64,
    pub g_si_s: f64,
}

pub fn element_summary(model: &TsvModel, f: f64) -> tsv_core::Result<ElementSummary> {
    let w_d = model.depletion_width();
    let (c_si, g_si) = model.c_si_g_si();
    Ok(ElementSummary {
        frequency_hz: f,
        r_dc_ohm: model.r_dc(),
        skin_depth_m: model.skin_depth(f)?,
        r_total_ohm: model.r_total(f)?,
        l_tsv_h: model.l_tsv(),
        c_ox_f: model.c_ox(),
        depletion_width_m: w_d,
        c_d_f: model.c_d(w_d)?,
        c_si_f: c_si,
        g_si_s: g_si,
    })
}

impl ElementSummary {
    fn print(&self) {
        let rows = [
            ("R_DC", self.r_dc_ohm, "Ohm"),
            ("delta", self.skin_depth_m, "m"),
            ("R_TSV", self.r_total_ohm, "Ohm"),
            ("L_TSV", self.l_tsv_h, "H"),
            ("C_ox", self.c_ox_f, "F"),
            ("W_d", self.depletion_width_m, "m"),
            ("C_d", self.c_d_f, "F"),
            ("C_si", self.c_si_f, "F"),
            ("G_si", self.g_si_s, "S"),
        ];
        println!("elements at {:e} Hz", self.frequency_hz);
        for (name, value, unit) in rows {
            println!("  {name:<6} {value:>16.9e} {unit}");
        }
    }
}

#[derive(Serialize)]
struct ExtractReport {
    elements: ElementSummary,
    points: usize,
    option_line: String,
    files: Vec<PathBuf>,
    s21_db_min: f64,
    s21_db_max: f64,
    s31_db_min: f64,
}

pub fn run(set: &ParameterSet, args: &ExtractArgs, json: bool) -> Result<ExitCode> {
    let model = set.model()?;
    let grid = set.frequency_grid()?;
    let summary = element_summary(&model, args.summary_frequency)?;
    let sweep = s_sweep(&z_sweep(&grid, &model)?, set.z0)?;

    let options = WriteOptions {
        format: match args.format {
            FormatArg::Ri => DataFormat::RealImag,
            FormatArg::Ma => DataFormat::MagAngle,
            FormatArg::Db => DataFormat::DbAngle,
        },
        ..WriteOptions::default()
    };
    let mut s3p = Vec::new();
    write_s3p(&sweep, &options, &mut s3p)?;
    let mut csv = Vec::new();
    write_s_csv(&sweep, args.full, &mut csv)?;
    let option_line = String::from_utf8_lossy(&s3p)
        .lines()
        .find(|l| l.starts_with('#'))
        .unwrap_or_default()
        .to_string();

    let mut files = PendingFiles::default();
    files.add(args.output_dir.join(format!("{}.s3p", args.name)), s3p);
    files.add(
        args.output_dir.join(format!("{}_s21_s31.csv", args.name)),
        csv,
    );

    let fold = |f: fn(f64, f64) -> f64, init: f64, get: fn(&tsv_core::ThreePortS) -> f64| {
        sweep.iter().map(get).fold(init, f)
    };
    let report = ExtractReport {
        points: sweep.len(),
        option_line,
        s21_db_min: fold(f64::min, f64::INFINITY, |s| s.s21_db()),
        s21_db_max: fold(f64::max, f64::NEG_INFINITY, |s| s.s21_db()),
        s31_db_min: fold(f64::min, f64::INFINITY, |s| s.s31_db()),
        files: files.paths().into_iter().map(PathBuf::from).collect(),
        elements: summary,
    };

    files.commit()?;
    if json {
        print_json(&report)?;
    } else {
        report.elements.print();
        println!(
            "{} points, |S21| {:.2} .. {:.2} dB, |S31| >= {:.3} dB",
            report.points, report.s21_db_min, report.s21_db_max, report.s31_db_min
        );
        for path in &report.files {
            println!("wrote {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
