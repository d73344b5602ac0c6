//! Touchstone v1 `.s3p` reader and writer.
//!
//! Emitted layout, one matrix row per line:
//!
//! ```text
//! ! comments
//! # Hz S RI R 50
//! <f> <S11> <S12> <S13>
//!     <S21> <S22> <S23>
//!     <S31> <S32> <S33>
//! ```
//!
//! Each `<Sij>` is a pair of numbers (RI, MA or DB), printed with nine
//! significant digits. The reader also accepts kHz/MHz/GHz units, arbitrary
//! whitespace, blank lines and `!` comments anywhere, and records split
//! across lines differently, as long as each record starts on a line with
//! an odd token count (the frequency plus value pairs).

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Matrix3;
use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::sparams::ThreePortS;

const PORTS: usize = 3;
const VALUES_PER_RECORD: usize = PORTS * PORTS;
const SIG_DIGITS: usize = 9;
const FIELD_WIDTH: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    RealImag,
    /// Magnitude, angle in degrees.
    MagAngle,
    /// Magnitude in dB, angle in degrees.
    DbAngle,
}

impl DataFormat {
    pub fn token(self) -> &'static str {
        match self {
            DataFormat::RealImag => "RI",
            DataFormat::MagAngle => "MA",
            DataFormat::DbAngle => "DB",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_uppercase().as_str() {
            "RI" => Some(DataFormat::RealImag),
            "MA" => Some(DataFormat::MagAngle),
            "DB" => Some(DataFormat::DbAngle),
            _ => None,
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            DataFormat::RealImag => Complex64::new(a, b),
            DataFormat::MagAngle => Complex64::from_polar(a, b.to_radians()),
            DataFormat::DbAngle => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, x: Complex64) -> Option<(f64, f64)> {
        match self {
            DataFormat::RealImag => Some((x.re, x.im)),
            DataFormat::MagAngle => Some((x.norm(), x.arg().to_degrees())),
            DataFormat::DbAngle => {
                let mag = x.norm();
                (mag > 0.0).then(|| (20.0 * mag.log10(), x.arg().to_degrees()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FrequencyUnit {
    pub fn multiplier(self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::KHz => 1e3,
            FrequencyUnit::MHz => 1e6,
            FrequencyUnit::GHz => 1e9,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            FrequencyUnit::Hz => "Hz",
            FrequencyUnit::KHz => "kHz",
            FrequencyUnit::MHz => "MHz",
            FrequencyUnit::GHz => "GHz",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_uppercase().as_str() {
            "HZ" => Some(FrequencyUnit::Hz),
            "KHZ" => Some(FrequencyUnit::KHz),
            "MHZ" => Some(FrequencyUnit::MHz),
            "GHZ" => Some(FrequencyUnit::GHz),
            _ => None,
        }
    }
}

/// `# <unit> S <format> R <ohms>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionLine {
    pub frequency_unit: FrequencyUnit,
    pub format: DataFormat,
    pub reference_resistance: f64,
}

impl Default for OptionLine {
    /// Touchstone's implied option line when none is present.
    fn default() -> Self {
        OptionLine {
            frequency_unit: FrequencyUnit::GHz,
            format: DataFormat::MagAngle,
            reference_resistance: 50.0,
        }
    }
}

impl fmt::Display for OptionLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "# {} S {} R {}",
            self.frequency_unit.token(),
            self.format.token(),
            self.reference_resistance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneRecord {
    /// Frequency in Hz, already scaled by the option-line unit.
    pub frequency: f64,
    pub s: Matrix3<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneDocument {
    pub option_line: OptionLine,
    pub records: Vec<TouchstoneRecord>,
    pub comments: Vec<String>,
}

impl TouchstoneDocument {
    pub fn to_sweep(&self) -> Vec<ThreePortS> {
        self.records
            .iter()
            .map(|r| ThreePortS {
                frequency: r.frequency,
                s: r.s,
                z0: self.option_line.reference_resistance,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed option line: {reason}")]
    OptionLine { line: usize, reason: String },

    #[error("line {line}: invalid number `{token}`")]
    Number { line: usize, token: String },

    #[error("line {line}: invalid frequency {value}")]
    Frequency { line: usize, value: f64 },

    #[error("line {line}: frequency {value} Hz does not increase on the previous record")]
    NonMonotonic { line: usize, value: f64 },

    #[error("line {line}: record has {found} values, expected {expected}")]
    Arity {
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("no data records")]
    Empty,
}

/// Nine significant digits, C-style exponent (`-1.23456789e-05`).
pub fn format_number(x: f64) -> String {
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WriteOptions {
    pub format: DataFormat,
    /// Extra `!` comment lines placed after the generator line.
    pub comments: Vec<String>,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions {
            format: DataFormat::RealImag,
            comments: Vec::new(),
        }
    }
}

fn check_sweep(sweep: &[ThreePortS]) -> Result<()> {
    let first = sweep
        .first()
        .ok_or_else(|| Error::Grid("cannot write an empty sweep".into()))?;
    for point in sweep {
        if point.z0 != first.z0 {
            return Err(Error::MixedReference {
                first: first.z0,
                other: point.z0,
            });
        }
        if point
            .s
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::validation(
                "s",
                point.frequency,
                "non-finite S entry at this frequency",
            ));
        }
    }
    if let Some(w) = sweep.windows(2).find(|w| w[1].frequency <= w[0].frequency) {
        return Err(Error::Grid(format!(
            "frequencies not strictly increasing ({} then {})",
            w[0].frequency, w[1].frequency
        )));
    }
    Ok(())
}

/// Writes a three-port sweep as Touchstone v1 text in Hz.
pub fn write_s3p<W: Write>(sweep: &[ThreePortS], options: &WriteOptions, mut out: W) -> Result<()> {
    check_sweep(sweep)?;
    let option_line = OptionLine {
        frequency_unit: FrequencyUnit::Hz,
        format: options.format,
        reference_resistance: sweep[0].z0,
    };

    let mut text = String::new();
    text.push_str(&format!(
        "! {} {} three-port TSV pair model\n",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    ));
    text.push_str("! ports: 1 = signal bottom, 2 = substrate, 3 = signal top\n");
    for c in &options.comments {
        for line in c.lines() {
            text.push_str("! ");
            text.push_str(line);
            text.push('\n');
        }
    }
    text.push_str(&option_line.to_string());
    text.push('\n');

    let blank = " ".repeat(FIELD_WIDTH);
    for point in sweep {
        for row in 0..PORTS {
            if row == 0 {
                text.push_str(&format!("{:>FIELD_WIDTH$}", format_number(point.frequency)));
            } else {
                text.push_str(&blank);
            }
            for col in 0..PORTS {
                let (a, b) = options.format.encode(point.s[(row, col)]).ok_or_else(|| {
                    Error::validation("s", point.frequency, "zero magnitude has no dB form")
                })?;
                text.push_str(&format!(
                    " {:>FIELD_WIDTH$} {:>FIELD_WIDTH$}",
                    format_number(a),
                    format_number(b)
                ));
            }
            text.push('\n');
        }
    }
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn write_s3p_file(sweep: &[ThreePortS], options: &WriteOptions, path: &Path) -> Result<()> {
    check_sweep(sweep)?;
    let file = File::create(path)?;
    write_s3p(sweep, options, BufWriter::new(file))
}

fn parse_option_line(line: usize, body: &str) -> std::result::Result<OptionLine, ParseError> {
    let malformed = |reason: String| ParseError::OptionLine { line, reason };
    let mut option = OptionLine::default();
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        if let Some(unit) = FrequencyUnit::parse(tok) {
            option.frequency_unit = unit;
        } else if let Some(format) = DataFormat::parse(tok) {
            option.format = format;
        } else if tok.eq_ignore_ascii_case("S") {
            // the only supported parameter type
        } else if ["Y", "Z", "H", "G"]
            .iter()
            .any(|p| tok.eq_ignore_ascii_case(p))
        {
            return Err(malformed(format!(
                "parameter type {tok} not supported, only S"
            )));
        } else if tok.eq_ignore_ascii_case("R") {
            let value = tokens
                .next()
                .ok_or_else(|| malformed("R without a value".into()))?;
            let r: f64 = value
                .parse()
                .map_err(|_| malformed(format!("invalid reference resistance `{value}`")))?;
            if !(r.is_finite() && r > 0.0) {
                return Err(malformed(format!("reference resistance {r} must be > 0")));
            }
            option.reference_resistance = r;
        } else {
            return Err(malformed(format!("unknown token `{tok}`")));
        }
    }
    Ok(option)
}

struct PendingRecord {
    line: usize,
    frequency: f64,
    values: Vec<f64>,
}

fn finish(
    pending: PendingRecord,
    option: &OptionLine,
    records: &mut Vec<TouchstoneRecord>,
) -> std::result::Result<(), ParseError> {
    if pending.values.len() != 2 * VALUES_PER_RECORD {
        return Err(ParseError::Arity {
            line: pending.line,
            found: pending.values.len() / 2,
            expected: VALUES_PER_RECORD,
        });
    }
    if let Some(prev) = records.last() {
        if pending.frequency <= prev.frequency {
            return Err(ParseError::NonMonotonic {
                line: pending.line,
                value: pending.frequency,
            });
        }
    }
    let mut s = Matrix3::<Complex64>::zeros();
    for (k, pair) in pending.values.chunks_exact(2).enumerate() {
        s[(k / PORTS, k % PORTS)] = option.format.decode(pair[0], pair[1]);
    }
    records.push(TouchstoneRecord {
        frequency: pending.frequency,
        s,
    });
    Ok(())
}

/// Parses Touchstone v1 three-port text.
pub fn parse_s3p(text: &str) -> std::result::Result<TouchstoneDocument, ParseError> {
    let mut option: Option<OptionLine> = None;
    let mut comments = Vec::new();
    let mut records = Vec::new();
    let mut pending: Option<PendingRecord> = None;
    let mut seen_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.split_once('!') {
            Some((data, comment)) => {
                comments.push(comment.trim().to_string());
                data
            }
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(body) = content.strip_prefix('#') {
            if seen_data {
                return Err(ParseError::OptionLine {
                    line,
                    reason: "option line after data".into(),
                });
            }
            if option.is_some() {
                return Err(ParseError::OptionLine {
                    line,
                    reason: "duplicate option line".into(),
                });
            }
            option = Some(parse_option_line(line, body)?);
            continue;
        }

        seen_data = true;
        let opt = *option.get_or_insert_with(OptionLine::default);
        let numbers = content
            .split_whitespace()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(ParseError::Number {
                    line,
                    token: tok.to_string(),
                }),
            })
            .collect::<std::result::Result<Vec<f64>, _>>()?;

        if numbers.len() % 2 == 1 {
            if let Some(done) = pending.take() {
                finish(done, &opt, &mut records)?;
            }
            let frequency = numbers[0] * opt.frequency_unit.multiplier();
            if !(frequency >= 0.0) {
                return Err(ParseError::Frequency {
                    line,
                    value: frequency,
                });
            }
            pending = Some(PendingRecord {
                line,
                frequency,
                values: numbers[1..].to_vec(),
            });
        } else {
            let Some(current) = pending.as_mut() else {
                return Err(ParseError::Arity {
                    line,
                    found: numbers.len() / 2,
                    expected: VALUES_PER_RECORD,
                });
            };
            current.values.extend_from_slice(&numbers);
        }
        if let Some(current) = &pending {
            if current.values.len() > 2 * VALUES_PER_RECORD {
                return Err(ParseError::Arity {
                    line: current.line,
                    found: current.values.len() / 2,
                    expected: VALUES_PER_RECORD,
                });
            }
        }
    }

    let opt = option.unwrap_or_default();
    if let Some(done) = pending.take() {
        finish(done, &opt, &mut records)?;
    }
    if records.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(TouchstoneDocument {
        option_line: opt,
        records,
        comments,
    })
}

pub fn read_s3p<R: Read>(mut input: R) -> Result<TouchstoneDocument> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    Ok(parse_s3p(&text)?)
}

pub fn read_s3p_file(path: &Path) -> Result<TouchstoneDocument> {
    read_s3p(File::open(path)?)
}
