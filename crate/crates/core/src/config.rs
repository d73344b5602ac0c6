//! Plain-text parameter files: one `name = value` per line, SI units,
//! `#` starts a comment. Unknown names are errors.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{FrequencyGrid, Spacing};
use crate::physics::{Guards, MaterialParams, TsvGeometry, TsvModel};
use crate::sparams::DEFAULT_Z0;
use crate::spur::{SidebandModel, SubstrateLoad, DEFAULT_CARRIER_POWER_DB, DEFAULT_F_OSC};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    /// 1-based line number in the source, 0 for entries not read from a file.
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse_entries(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut entries: Vec<ConfigEntry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `name = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config {
                line,
                message: format!("expected `name = value`, got `{content}`"),
            });
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(Error::Config {
                line,
                message: format!("`{key}` already set on line {}", prev.line),
            });
        }
        entries.push(ConfigEntry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(entries)
}

/// Every recognised key with a one-line description, in file order.
pub const KEYS: &[(&str, &str)] = &[
    ("height", "TSV height h (m)"),
    ("radius", "TSV radius r (m)"),
    ("pitch", "centre-to-centre pitch p (m)"),
    ("liner_thickness", "oxide liner thickness t_ox (m)"),
    ("rho_cu", "copper resistivity (Ohm m)"),
    ("mu_r", "relative permeability of the fill"),
    ("eps_ox", "liner relative permittivity"),
    ("eps_si", "silicon relative permittivity"),
    ("n_a", "substrate acceptor density (m^-3)"),
    ("n_i", "intrinsic carrier density (m^-3)"),
    ("sigma_si", "substrate conductivity (S/m)"),
    (
        "hole_mobility",
        "if set, sigma_si = q n_a hole_mobility (m^2/V s)",
    ),
    ("temperature", "lattice temperature (K)"),
    ("min_liner_thickness", "liner thickness floor (m)"),
    ("min_depletion_width", "depletion width floor (m)"),
    ("min_acosh_margin", "floor on p/2r - 1"),
    ("f_start", "first grid frequency (Hz)"),
    ("f_stop", "last grid frequency (Hz)"),
    ("points", "number of grid points"),
    ("spacing", "log or linear"),
    ("z0", "reference impedance (Ohm)"),
    ("termination", "port 3 termination for spur estimates (Ohm)"),
    ("f_osc", "oscillator free-running frequency (Hz)"),
    (
        "k_sub",
        "substrate pushing gain (Hz/V); calibrated when absent",
    ),
    ("carrier_power_db", "carrier power (dB)"),
    ("sideband", "first_order or bessel"),
    (
        "load_resistance",
        "substrate port load, series resistance (Ohm)",
    ),
    (
        "load_reactance",
        "substrate port load, series reactance (Ohm)",
    ),
    (
        "load_conductance",
        "substrate port load, shunt conductance (S)",
    ),
    (
        "load_capacitance",
        "substrate port load, shunt capacitance (F)",
    ),
];

/// Keys that describe the physical structure rather than the run.
pub const PHYSICAL_KEYS: &[&str] = &[
    "height",
    "radius",
    "pitch",
    "liner_thickness",
    "rho_cu",
    "mu_r",
    "eps_ox",
    "eps_si",
    "n_a",
    "n_i",
    "sigma_si",
    "hole_mobility",
    "temperature",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            start: FrequencyGrid::DEFAULT_START,
            stop: FrequencyGrid::DEFAULT_STOP,
            points: FrequencyGrid::DEFAULT_POINTS,
            spacing: Spacing::Logarithmic,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::generate(self.start, self.stop, self.points, self.spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LoadSpec {
    #[default]
    Open,
    Series {
        resistance: f64,
        reactance: f64,
    },
    Shunt {
        conductance: f64,
        capacitance: f64,
    },
}

impl LoadSpec {
    pub fn to_load(self) -> SubstrateLoad {
        match self {
            LoadSpec::Open => SubstrateLoad::Open,
            LoadSpec::Series {
                resistance,
                reactance,
            } => SubstrateLoad::Impedance(Complex64::new(resistance, reactance)),
            LoadSpec::Shunt {
                conductance,
                capacitance,
            } => SubstrateLoad::ShuntRc {
                conductance,
                capacitance,
            },
        }
    }
}

/// Unvalidated parameter values; [`ParameterSet::model`] and friends turn
/// them into checked domain objects.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub geometry: TsvGeometry,
    pub material: MaterialParams,
    pub hole_mobility: Option<f64>,
    pub guards: Guards,
    pub grid: GridSpec,
    pub z0: f64,
    pub termination: f64,
    pub f_osc: f64,
    pub k_sub: Option<f64>,
    pub carrier_power_db: f64,
    pub sideband: SidebandModel,
    pub load: LoadSpec,
}

impl Default for ParameterSet {
    fn default() -> Self {
        Self::reference()
    }
}

fn parse_f64(key: &str, value: &str) -> std::result::Result<f64, String> {
    let v: f64 = value
        .parse()
        .map_err(|_| format!("`{key}`: `{value}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{key}`: value must be finite"))
    }
}

impl ParameterSet {
    /// The reference structure and oscillator with default grid and loads.
    pub fn reference() -> Self {
        ParameterSet {
            geometry: TsvGeometry::reference(),
            material: MaterialParams::reference(),
            hole_mobility: None,
            guards: Guards::default(),
            grid: GridSpec::default(),
            z0: DEFAULT_Z0,
            termination: DEFAULT_Z0,
            f_osc: DEFAULT_F_OSC,
            k_sub: None,
            carrier_power_db: DEFAULT_CARRIER_POWER_DB,
            sideband: SidebandModel::FirstOrder,
            load: LoadSpec::Open,
        }
    }

    pub fn is_known_key(key: &str) -> bool {
        KEYS.iter().any(|(k, _)| *k == key)
    }

    /// Sets one key. Errors are plain messages; callers add location.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = || parse_f64(key, value);
        match key {
            "height" => self.geometry.height = num()?,
            "radius" => self.geometry.radius = num()?,
            "pitch" => self.geometry.pitch = num()?,
            "liner_thickness" => self.geometry.liner_thickness = num()?,
            "rho_cu" => self.material.rho_cu = num()?,
            "mu_r" => self.material.mu_r = num()?,
            "eps_ox" => self.material.eps_ox = num()?,
            "eps_si" => self.material.eps_si = num()?,
            "n_a" => self.material.n_a = num()?,
            "n_i" => self.material.n_i = num()?,
            "sigma_si" => self.material.sigma_si = num()?,
            "hole_mobility" => self.hole_mobility = Some(num()?),
            "temperature" => self.material.temperature = num()?,
            "min_liner_thickness" => self.guards.min_liner_thickness = num()?,
            "min_depletion_width" => self.guards.min_depletion_width = num()?,
            "min_acosh_margin" => self.guards.min_acosh_margin = num()?,
            "f_start" => self.grid.start = num()?,
            "f_stop" => self.grid.stop = num()?,
            "points" => {
                self.grid.points = value
                    .parse()
                    .map_err(|_| format!("`points`: `{value}` is not a non-negative integer"))?
            }
            "spacing" => {
                self.grid.spacing = match value {
                    "log" | "logarithmic" => Spacing::Logarithmic,
                    "lin" | "linear" => Spacing::Linear,
                    _ => return Err(format!("`spacing`: expected log or linear, got `{value}`")),
                }
            }
            "z0" => self.z0 = num()?,
            "termination" => self.termination = num()?,
            "f_osc" => self.f_osc = num()?,
            "k_sub" => self.k_sub = Some(num()?),
            "carrier_power_db" => self.carrier_power_db = num()?,
            "sideband" => {
                self.sideband = match value {
                    "first_order" => SidebandModel::FirstOrder,
                    "bessel" => SidebandModel::Bessel,
                    _ => {
                        return Err(format!(
                            "`sideband`: expected first_order or bessel, got `{value}`"
                        ))
                    }
                }
            }
            "load_resistance" | "load_reactance" => {
                let v = num()?;
                let (mut resistance, mut reactance) = match self.load {
                    LoadSpec::Open => (0.0, 0.0),
                    LoadSpec::Series {
                        resistance,
                        reactance,
                    } => (resistance, reactance),
                    LoadSpec::Shunt { .. } => {
                        return Err(format!("`{key}` conflicts with a shunt substrate load"))
                    }
                };
                if key == "load_resistance" {
                    resistance = v;
                } else {
                    reactance = v;
                }
                self.load = LoadSpec::Series {
                    resistance,
                    reactance,
                };
            }
            "load_conductance" | "load_capacitance" => {
                let v = num()?;
                let (mut conductance, mut capacitance) = match self.load {
                    LoadSpec::Open => (0.0, 0.0),
                    LoadSpec::Shunt {
                        conductance,
                        capacitance,
                    } => (conductance, capacitance),
                    LoadSpec::Series { .. } => {
                        return Err(format!("`{key}` conflicts with a series substrate load"))
                    }
                };
                if key == "load_conductance" {
                    conductance = v;
                } else {
                    capacitance = v;
                }
                self.load = LoadSpec::Shunt {
                    conductance,
                    capacitance,
                };
            }
            _ => return Err(format!("unknown parameter `{key}`")),
        }
        Ok(())
    }

    pub fn apply(&mut self, entries: &[ConfigEntry]) -> Result<()> {
        for e in entries {
            self.set(&e.key, &e.value)
                .map_err(|message| Error::Config {
                    line: e.line,
                    message,
                })?;
        }
        Ok(())
    }

    pub fn from_str_with_defaults(text: &str) -> Result<Self> {
        let mut set = Self::reference();
        set.apply(&parse_entries(text)?)?;
        Ok(set)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply(&parse_entries(&text)?)
    }

    pub fn effective_material(&self) -> MaterialParams {
        match self.hole_mobility {
            Some(mu) => self.material.with_mobility_conductivity(mu),
            None => self.material,
        }
    }

    pub fn model(&self) -> Result<TsvModel> {
        if let Some(mu) = self.hole_mobility {
            if !(mu > 0.0) {
                return Err(Error::validation("hole_mobility", mu, "must be > 0"));
            }
        }
        TsvModel::with_guards(self.geometry, self.effective_material(), self.guards)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        self.grid.build()
    }

    pub fn check_run(&self) -> Result<()> {
        if !(self.z0 > 0.0) {
            return Err(Error::validation(
                "z0",
                self.z0,
                "reference impedance must be > 0",
            ));
        }
        if !(self.termination > 0.0) {
            return Err(Error::validation(
                "termination",
                self.termination,
                "must be > 0",
            ));
        }
        Ok(())
    }

    /// Renders the set back into the file format; parsing the output
    /// reproduces the set.
    pub fn to_config_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.geometry;
        let m = &self.material;
        writeln!(f, "height = {:e}", g.height)?;
        writeln!(f, "radius = {:e}", g.radius)?;
        writeln!(f, "pitch = {:e}", g.pitch)?;
        writeln!(f, "liner_thickness = {:e}", g.liner_thickness)?;
        writeln!(f, "rho_cu = {:e}", m.rho_cu)?;
        writeln!(f, "mu_r = {:e}", m.mu_r)?;
        writeln!(f, "eps_ox = {:e}", m.eps_ox)?;
        writeln!(f, "eps_si = {:e}", m.eps_si)?;
        writeln!(f, "n_a = {:e}", m.n_a)?;
        writeln!(f, "n_i = {:e}", m.n_i)?;
        writeln!(f, "sigma_si = {:e}", m.sigma_si)?;
        if let Some(mu) = self.hole_mobility {
            writeln!(f, "hole_mobility = {mu:e}")?;
        }
        writeln!(f, "temperature = {:e}", m.temperature)?;
        writeln!(
            f,
            "min_liner_thickness = {:e}",
            self.guards.min_liner_thickness
        )?;
        writeln!(
            f,
            "min_depletion_width = {:e}",
            self.guards.min_depletion_width
        )?;
        writeln!(f, "min_acosh_margin = {:e}", self.guards.min_acosh_margin)?;
        writeln!(f, "f_start = {:e}", self.grid.start)?;
        writeln!(f, "f_stop = {:e}", self.grid.stop)?;
        writeln!(f, "points = {}", self.grid.points)?;
        let spacing = match self.grid.spacing {
            Spacing::Logarithmic => "log",
            Spacing::Linear => "linear",
        };
        writeln!(f, "spacing = {spacing}")?;
        writeln!(f, "z0 = {:e}", self.z0)?;
        writeln!(f, "termination = {:e}", self.termination)?;
        writeln!(f, "f_osc = {:e}", self.f_osc)?;
        if let Some(k) = self.k_sub {
            writeln!(f, "k_sub = {k:e}")?;
        }
        writeln!(f, "carrier_power_db = {:e}", self.carrier_power_db)?;
        let sideband = match self.sideband {
            SidebandModel::FirstOrder => "first_order",
            SidebandModel::Bessel => "bessel",
        };
        writeln!(f, "sideband = {sideband}")?;
        match self.load {
            LoadSpec::Open => {}
            LoadSpec::Series {
                resistance,
                reactance,
            } => {
                writeln!(f, "load_resistance = {resistance:e}")?;
                writeln!(f, "load_reactance = {reactance:e}")?;
            }
            LoadSpec::Shunt {
                conductance,
                capacitance,
            } => {
                writeln!(f, "load_conductance = {conductance:e}")?;
                writeln!(f, "load_capacitance = {capacitance:e}")?;
            }
        }
        Ok(())
    }
}
