//! Z ↔ S conversion with a real reference impedance shared by all ports.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{Port, ThreePortZ};

pub const DEFAULT_Z0: f64 = 50.0;

/// Conversions whose system matrix is worse conditioned than this fail.
pub const MAX_CONDITION: f64 = 1e12;

/// Scattering matrix at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePortS {
    pub frequency: f64,
    pub s: Matrix3<Complex64>,
    pub z0: f64,
}

impl ThreePortS {
    pub fn get(&self, row: Port, col: Port) -> Complex64 {
        self.s[(row as usize, col as usize)]
    }

    /// |S_ij| in dB.
    pub fn db(&self, row: Port, col: Port) -> f64 {
        db(self.get(row, col))
    }

    /// Substrate coupling |S21| in dB.
    pub fn s21_db(&self) -> f64 {
        self.db(Port::Substrate, Port::SignalBottom)
    }

    /// Insertion loss |S31| in dB.
    pub fn s31_db(&self) -> f64 {
        self.db(Port::SignalTop, Port::SignalBottom)
    }

    pub fn max_singular_value(&self) -> f64 {
        self.s.singular_values().max()
    }

    /// ‖S − Sᵀ‖_F / ‖S‖_F.
    pub fn asymmetry(&self) -> f64 {
        let norm = self.s.norm();
        if norm == 0.0 {
            0.0
        } else {
            (self.s - self.s.transpose()).norm() / norm
        }
    }
}

/// 20·log10|x|.
pub fn db(x: Complex64) -> f64 {
    20.0 * x.norm().log10()
}

fn condition_number(m: &Matrix3<Complex64>) -> f64 {
    let sv = m.singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

/// Solves X·A = B for X without forming A⁻¹.
fn right_divide(
    b: &Matrix3<Complex64>,
    a: &Matrix3<Complex64>,
    frequency: f64,
) -> Result<Matrix3<Complex64>> {
    let condition = condition_number(a);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conversion {
            frequency,
            condition,
        });
    }
    let lu = a.transpose().lu();
    let xt = lu.solve(&b.transpose()).ok_or(Error::Conversion {
        frequency,
        condition,
    })?;
    Ok(xt.transpose())
}

fn check_z0(z0: f64) -> Result<()> {
    if z0.is_finite() && z0 > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            "z0",
            z0,
            "reference impedance must be finite and > 0",
        ))
    }
}

/// S = (Z − Z0·I)(Z + Z0·I)⁻¹.
pub fn z_to_s(z: &ThreePortZ, z0: f64) -> Result<ThreePortS> {
    check_z0(z0)?;
    let shift = Matrix3::<Complex64>::identity().scale(z0);
    let s = right_divide(&(z.z - shift), &(z.z + shift), z.frequency)?;
    Ok(ThreePortS {
        frequency: z.frequency,
        s,
        z0,
    })
}

/// Z = Z0·(I + S)(I − S)⁻¹.
pub fn s_to_z(s: &ThreePortS) -> Result<ThreePortZ> {
    check_z0(s.z0)?;
    let eye = Matrix3::<Complex64>::identity();
    let z = right_divide(&(eye + s.s), &(eye - s.s), s.frequency)?.scale(s.z0);
    Ok(ThreePortZ {
        frequency: s.frequency,
        z,
    })
}

/// Per-point conversion of a sweep, order preserved.
pub fn s_sweep(zs: &[ThreePortZ], z0: f64) -> Result<Vec<ThreePortS>> {
    if zs.is_empty() {
        return Err(Error::Grid("empty impedance sweep".into()));
    }
    zs.par_iter()
        .map(|z| z_to_s(z, z0).map_err(|e| e.at_frequency(z.frequency)))
        .collect()
}
