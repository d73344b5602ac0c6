//! Closed-form RLGC element values for a signal-ground TSV pair.
//!
//! Everything here is SI: meters, ohms, farads, henries, siemens, hertz.
//! Conversion to µm/fF/pH happens only at the I/O boundary.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical constants (CODATA 2018).
pub mod constants {
    /// Vacuum permittivity, F/m.
    pub const EPS_0: f64 = 8.8541878128e-12;
    /// Vacuum permeability, H/m.
    pub const MU_0: f64 = 1.25663706212e-6;
    /// Elementary charge, C.
    pub const Q: f64 = 1.602176634e-19;
    /// Boltzmann constant, J/K.
    pub const K_B: f64 = 1.380649e-23;
}

use constants::{EPS_0, K_B, MU_0, Q};

/// Physical dimensions of the TSV pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsvGeometry {
    /// Via height (m).
    pub height: f64,
    /// Copper core radius (m).
    pub radius: f64,
    /// Center-to-center distance between signal and ground via (m).
    pub pitch: f64,
    /// Oxide liner thickness (m).
    pub liner_thickness: f64,
}

impl TsvGeometry {
    /// 50 µm tall, 2.5 µm radius, 40 µm pitch, 0.5 µm liner.
    pub const fn reference() -> Self {
        TsvGeometry {
            height: 50e-6,
            radius: 2.5e-6,
            pitch: 40e-6,
            liner_thickness: 0.5e-6,
        }
    }

    /// Uniformly scales every dimension.
    pub fn scaled(&self, factor: f64) -> Self {
        TsvGeometry {
            height: self.height * factor,
            radius: self.radius * factor,
            pitch: self.pitch * factor,
            liner_thickness: self.liner_thickness * factor,
        }
    }
}

impl Default for TsvGeometry {
    fn default() -> Self {
        Self::reference()
    }
}

/// Conductor, dielectric and substrate properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Copper resistivity (Ω·m).
    pub rho_cu: f64,
    /// Relative permeability of the conductor.
    pub mu_r: f64,
    /// Relative permittivity of the liner.
    pub eps_ox: f64,
    /// Relative permittivity of silicon.
    pub eps_si: f64,
    /// Acceptor doping (m⁻³).
    pub n_a: f64,
    /// Intrinsic carrier density (m⁻³).
    pub n_i: f64,
    /// Substrate conductivity (S/m).
    pub sigma_si: f64,
    /// Temperature (K), sets the thermal voltage.
    pub temperature: f64,
}

/// Default hole mobility for the mobility-based conductivity mode, m²/(V·s).
pub const DEFAULT_HOLE_MOBILITY: f64 = 450e-4;

impl MaterialParams {
    /// Standard process values: Cu at 1.68e-8 Ω·m, SiO₂ liner, p-type
    /// substrate with N_A = 1.2e15 cm⁻³ and ρ_si = 0.12 Ω·m, 300 K.
    pub const fn reference() -> Self {
        MaterialParams {
            rho_cu: 1.68e-8,
            mu_r: 1.0,
            eps_ox: 3.9,
            eps_si: 11.9,
            n_a: 1.2e21,
            n_i: 1.45e16,
            sigma_si: 1.0 / 0.12,
            temperature: 300.0,
        }
    }

    /// V_T = kT/q.
    pub fn thermal_voltage(&self) -> f64 {
        K_B * self.temperature / Q
    }

    /// Substrate conductivity from doping and hole mobility, σ = q·N_A·μ_p.
    pub fn mobility_conductivity(&self, hole_mobility: f64) -> f64 {
        Q * self.n_a * hole_mobility
    }

    /// Replaces `sigma_si` with the mobility-derived value.
    pub fn with_mobility_conductivity(mut self, hole_mobility: f64) -> Self {
        self.sigma_si = self.mobility_conductivity(hole_mobility);
        self
    }

    pub fn substrate_resistivity(&self) -> f64 {
        1.0 / self.sigma_si
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Floors below which the log/acosh singularities of the capacitance
/// formulas are rejected instead of evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    /// Minimum liner thickness (m).
    pub min_liner_thickness: f64,
    /// Minimum depletion width (m).
    pub min_depletion_width: f64,
    /// Minimum value of p/(2r) − 1.
    pub min_acosh_margin: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            min_liner_thickness: 1e-12,
            min_depletion_width: 1e-12,
            min_acosh_margin: 1e-12,
        }
    }
}

/// Lumped element values of the pair at one frequency.
///
/// Only `r_total`/`r_half` depend on `frequency`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlgcElements {
    pub frequency: f64,
    pub r_total: f64,
    pub r_half: f64,
    pub l_total: f64,
    pub l_half: f64,
    pub c_ox: f64,
    pub c_d: f64,
    pub c_si: f64,
    pub g_si: f64,
}

impl RlgcElements {
    /// Same elements with the series resistance re-evaluated at `frequency`.
    pub fn at_resistance(&self, frequency: f64, r_total: f64) -> Self {
        RlgcElements {
            frequency,
            r_total,
            r_half: 0.5 * r_total,
            ..*self
        }
    }

    /// Series combination of the oxide and depletion capacitances.
    pub fn c_mos(&self) -> f64 {
        self.c_ox * self.c_d / (self.c_ox + self.c_d)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(name, value, "must be finite and > 0"))
    }
}

fn check_frequency(f: f64) -> Result<()> {
    positive("frequency", f)
}

/// A validated geometry/material pair.
///
/// Construction checks every precondition, so the frequency-independent
/// formulas cannot fail afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsvModel {
    geometry: TsvGeometry,
    material: MaterialParams,
    guards: Guards,
}

impl TsvModel {
    pub fn new(geometry: TsvGeometry, material: MaterialParams) -> Result<Self> {
        Self::with_guards(geometry, material, Guards::default())
    }

    pub fn with_guards(
        geometry: TsvGeometry,
        material: MaterialParams,
        guards: Guards,
    ) -> Result<Self> {
        positive("min_liner_thickness", guards.min_liner_thickness)?;
        positive("min_depletion_width", guards.min_depletion_width)?;
        positive("min_acosh_margin", guards.min_acosh_margin)?;

        positive("height", geometry.height)?;
        positive("radius", geometry.radius)?;
        positive("pitch", geometry.pitch)?;
        positive("liner_thickness", geometry.liner_thickness)?;
        if geometry.liner_thickness < guards.min_liner_thickness {
            return Err(Error::validation(
                "liner_thickness",
                geometry.liner_thickness,
                "below the configured liner floor",
            ));
        }
        if geometry.liner_thickness >= geometry.radius {
            return Err(Error::validation(
                "liner_thickness",
                geometry.liner_thickness,
                "must be smaller than the radius",
            ));
        }
        let ratio = geometry.pitch / (2.0 * geometry.radius);
        if geometry.pitch <= 2.0 * (geometry.radius + geometry.liner_thickness)
            || ratio - 1.0 < guards.min_acosh_margin
        {
            return Err(Error::GeometryOverlap {
                pitch: geometry.pitch,
                radius: geometry.radius,
                ratio,
            });
        }

        positive("rho_cu", material.rho_cu)?;
        positive("mu_r", material.mu_r)?;
        positive("eps_ox", material.eps_ox)?;
        positive("eps_si", material.eps_si)?;
        positive("n_a", material.n_a)?;
        positive("n_i", material.n_i)?;
        positive("sigma_si", material.sigma_si)?;
        positive("temperature", material.temperature)?;
        if material.n_a <= material.n_i {
            return Err(Error::validation(
                "n_a",
                material.n_a,
                "doping must exceed the intrinsic carrier density",
            ));
        }

        Ok(TsvModel {
            geometry,
            material,
            guards,
        })
    }

    /// The reference geometry and materials.
    pub fn reference() -> Self {
        TsvModel {
            geometry: TsvGeometry::reference(),
            material: MaterialParams::reference(),
            guards: Guards::default(),
        }
    }

    pub fn geometry(&self) -> &TsvGeometry {
        &self.geometry
    }

    pub fn material(&self) -> &MaterialParams {
        &self.material
    }

    pub fn guards(&self) -> &Guards {
        &self.guards
    }

    /// R_DC = ρ·h / (π r²).
    pub fn r_dc(&self) -> f64 {
        let g = &self.geometry;
        self.material.rho_cu * g.height / (PI * g.radius * g.radius)
    }

    /// δ(f) = sqrt(ρ / (π f μ_r μ_0)).
    pub fn skin_depth(&self, f: f64) -> Result<f64> {
        check_frequency(f)?;
        let m = &self.material;
        Ok((m.rho_cu / (PI * f * m.mu_r * MU_0)).sqrt())
    }

    /// Annulus approximation R_AC = ρ·h / (2π r δ).
    pub fn r_ac(&self, f: f64) -> Result<f64> {
        let delta = self.skin_depth(f)?;
        let g = &self.geometry;
        Ok(self.material.rho_cu * g.height / (2.0 * PI * g.radius * delta))
    }

    /// Quadrature sum of DC and AC resistance.
    pub fn r_total(&self, f: f64) -> Result<f64> {
        Ok(self.r_dc().hypot(self.r_ac(f)?))
    }

    /// Coaxial liner capacitance.
    pub fn c_ox(&self) -> f64 {
        let g = &self.geometry;
        2.0 * PI * self.material.eps_ox * EPS_0 * g.height
            / ((g.radius + g.liner_thickness) / g.radius).ln()
    }

    /// Bias-independent depletion width around the via.
    pub fn depletion_width(&self) -> f64 {
        let m = &self.material;
        (4.0 * m.eps_si * EPS_0 * m.thermal_voltage() * (m.n_a / m.n_i).ln() / (Q * m.n_a)).sqrt()
    }

    /// Depletion capacitance for a depletion shell of width `w_d`.
    pub fn c_d(&self, w_d: f64) -> Result<f64> {
        positive("depletion_width", w_d)?;
        if w_d < self.guards.min_depletion_width {
            return Err(Error::validation(
                "depletion_width",
                w_d,
                "below the configured depletion floor",
            ));
        }
        let g = &self.geometry;
        let inner = g.radius + g.liner_thickness;
        Ok(2.0 * PI * self.material.eps_si * EPS_0 * g.height / ((inner + w_d) / inner).ln())
    }

    fn wire_pair_factor(&self) -> f64 {
        let g = &self.geometry;
        PI * g.height / (g.pitch / (2.0 * g.radius)).acosh()
    }

    /// Lateral silicon capacitance and conductance between the two vias.
    pub fn c_si_g_si(&self) -> (f64, f64) {
        let k = self.wire_pair_factor();
        (self.material.eps_si * EPS_0 * k, self.material.sigma_si * k)
    }

    /// Grover-style self inductance of a finite cylinder.
    pub fn l_tsv(&self) -> f64 {
        let g = &self.geometry;
        let hr = g.height / g.radius;
        let rh = g.radius / g.height;
        let bracket = (hr + (1.0 + hr * hr).sqrt()).ln() + rh - (1.0 + rh * rh).sqrt();
        MU_0 * self.material.mu_r * g.height / (2.0 * PI) * bracket
    }

    pub fn rlgc_at(&self, f: f64) -> Result<RlgcElements> {
        let r_total = self.r_total(f)?;
        let l_total = self.l_tsv();
        let c_d = self.c_d(self.depletion_width())?;
        let (c_si, g_si) = self.c_si_g_si();
        Ok(RlgcElements {
            frequency: f,
            r_total,
            r_half: 0.5 * r_total,
            l_total,
            l_half: 0.5 * l_total,
            c_ox: self.c_ox(),
            c_d,
            c_si,
            g_si,
        })
    }
}

impl Default for TsvModel {
    fn default() -> Self {
        Self::reference()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Golden values from an independent 40-digit evaluation of the closed
    // forms with the reference parameters.
    const R_DC: f64 = 0.042780848703101466;
    const DELTA_1G: f64 = 2.0628838335353741e-6;
    const DELTA_100G: f64 = 2.0628838335353741e-7;
    const R_AC_1G: f64 = 0.025922962800687357;
    const R_AC_100G: f64 = 0.25922962800687357;
    const R_TOTAL_1G: f64 = 0.050022005318894193;
    const C_OX: f64 = 5.9501126643387913e-14;
    const W_D: f64 = 8.0107458539842815e-7;
    const C_D: f64 = 1.3986194295543896e-13;
    const C_D_AT_080UM: f64 = 1.4002923243919815e-13;
    const C_SI: f64 = 5.9778641152235122e-15;
    const G_SI: f64 = 0.00047279089182473564;
    const L_TSV: f64 = 2.7382546507545057e-11;
    const V_T: f64 = 0.025851999786435532;

    fn close(actual: f64, expected: f64, rel: f64) {
        let err = ((actual - expected) / expected).abs();
        assert!(err <= rel, "{actual:e} vs {expected:e} (rel err {err:e})");
    }

    fn with_geometry(edit: impl FnOnce(&mut TsvGeometry)) -> TsvModel {
        let mut g = TsvGeometry::reference();
        edit(&mut g);
        TsvModel::new(g, MaterialParams::reference()).unwrap()
    }

    #[test]
    fn reference_values() {
        let m = TsvModel::reference();
        close(m.material().thermal_voltage(), V_T, 1e-12);
        close(m.r_dc(), R_DC, 1e-9);
        close(m.skin_depth(1e9).unwrap(), DELTA_1G, 1e-9);
        close(m.skin_depth(1e11).unwrap(), DELTA_100G, 1e-9);
        close(m.r_ac(1e9).unwrap(), R_AC_1G, 1e-9);
        close(m.r_ac(1e11).unwrap(), R_AC_100G, 1e-9);
        close(m.r_total(1e9).unwrap(), R_TOTAL_1G, 1e-9);
        close(m.c_ox(), C_OX, 1e-9);
        close(m.depletion_width(), W_D, 1e-9);
        close(m.c_d(W_D).unwrap(), C_D, 1e-9);
        close(m.c_d(0.80e-6).unwrap(), C_D_AT_080UM, 1e-9);
        let (c_si, g_si) = m.c_si_g_si();
        close(c_si, C_SI, 1e-9);
        close(g_si, G_SI, 1e-9);
        close(m.l_tsv(), L_TSV, 1e-9);
    }

    #[test]
    fn r_dc_scaling() {
        let base = TsvModel::reference().r_dc();
        // doubling r needs a wider pitch to stay valid
        let wide = with_geometry(|g| {
            g.radius *= 2.0;
        });
        close(base / wide.r_dc(), 4.0, 1e-15);
        let tall = with_geometry(|g| g.height *= 2.0);
        close(tall.r_dc() / base, 2.0, 1e-15);
    }

    #[test]
    fn skin_depth_and_r_ac_scale_with_sqrt_f() {
        let m = TsvModel::reference();
        close(
            m.skin_depth(4e9).unwrap(),
            0.5 * m.skin_depth(1e9).unwrap(),
            1e-15,
        );
        close(m.r_ac(4e9).unwrap(), 2.0 * m.r_ac(1e9).unwrap(), 1e-15);
    }

    #[test]
    fn non_positive_frequency_rejected() {
        let m = TsvModel::reference();
        for f in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(m.skin_depth(f), Err(Error::Validation { .. })));
            assert!(m.r_ac(f).is_err());
            assert!(m.r_total(f).is_err());
            assert!(m.rlgc_at(f).is_err());
        }
    }

    #[test]
    fn r_total_limits() {
        let m = TsvModel::reference();
        close(m.r_total(1e-9).unwrap(), m.r_dc(), 1e-12);
        for f in [1e6, 3.3e8, 1e9, 7e10] {
            let (dc, ac, tot) = (m.r_dc(), m.r_ac(f).unwrap(), m.r_total(f).unwrap());
            assert!(tot >= dc.max(ac));
            close(tot * tot, dc * dc + ac * ac, 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn c_ox_linear_in_height() {
        let base = TsvModel::reference().c_ox();
        close(with_geometry(|g| g.height *= 2.0).c_ox(), 2.0 * base, 1e-15);
    }

    #[test]
    fn liner_floor_and_bounds() {
        let g = TsvGeometry {
            liner_thickness: 1e-13,
            ..TsvGeometry::reference()
        };
        assert!(matches!(
            TsvModel::new(g, MaterialParams::reference()),
            Err(Error::Validation {
                name: "liner_thickness",
                ..
            })
        ));
        let g = TsvGeometry {
            liner_thickness: 0.0,
            ..TsvGeometry::reference()
        };
        assert!(TsvModel::new(g, MaterialParams::reference()).is_err());
        let g = TsvGeometry {
            liner_thickness: 3e-6,
            ..TsvGeometry::reference()
        };
        assert!(TsvModel::new(g, MaterialParams::reference()).is_err());

        // a tighter floor admits a thin liner, and c_ox grows as it thins
        let guards = Guards {
            min_liner_thickness: 1e-15,
            ..Guards::default()
        };
        let thin = TsvModel::with_guards(
            TsvGeometry {
                liner_thickness: 1e-13,
                ..TsvGeometry::reference()
            },
            MaterialParams::reference(),
            guards,
        )
        .unwrap();
        assert!(thin.c_ox() > 1e3 * TsvModel::reference().c_ox());
    }

    #[test]
    fn depletion_width_special_cases() {
        let mut mat = MaterialParams::reference();
        mat.n_i = mat.n_a / std::f64::consts::E;
        let m = TsvModel::new(TsvGeometry::reference(), mat).unwrap();
        let expected = (4.0 * mat.eps_si * EPS_0 * mat.thermal_voltage() / (Q * mat.n_a)).sqrt();
        close(m.depletion_width(), expected, 1e-14);

        // ln(N_A/n_i) × 4 at fixed N_A doubles W_d
        let base = TsvModel::reference();
        let ratio = base.material().n_a / base.material().n_i;
        let mut mat = MaterialParams::reference();
        mat.n_i = mat.n_a / ratio.powi(4);
        let m = TsvModel::new(TsvGeometry::reference(), mat).unwrap();
        close(m.depletion_width(), 2.0 * base.depletion_width(), 1e-12);
    }

    #[test]
    fn doping_below_intrinsic_rejected() {
        let mut mat = MaterialParams::reference();
        mat.n_a = mat.n_i;
        assert!(matches!(
            TsvModel::new(TsvGeometry::reference(), mat),
            Err(Error::Validation { name: "n_a", .. })
        ));
    }

    #[test]
    fn c_d_guards_and_monotonicity() {
        let m = TsvModel::reference();
        assert!(m.c_d(0.0).is_err());
        assert!(m.c_d(-1e-6).is_err());
        assert!(m.c_d(1e-13).is_err());
        let mut prev = f64::INFINITY;
        for w in [1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-3, 1.0] {
            let c = m.c_d(w).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn wire_pair_ratio_identity() {
        let m = TsvModel::reference();
        let (c, g) = m.c_si_g_si();
        let mat = m.material();
        close(g * mat.eps_si * EPS_0, c * mat.sigma_si, 1e-12);
    }

    #[test]
    fn overlapping_pair_rejected() {
        for pitch in [5e-6, 5.5e-6, 6e-6, 1e-6] {
            let g = TsvGeometry {
                pitch,
                ..TsvGeometry::reference()
            };
            assert!(matches!(
                TsvModel::new(g, MaterialParams::reference()),
                Err(Error::GeometryOverlap { .. })
            ));
        }
    }

    #[test]
    fn inductance_positive_and_scale_covariant() {
        for k in 0..=40 {
            let hr = 0.1 * 10f64.powf(k as f64 / 10.0);
            let g = TsvGeometry {
                height: hr * 2.5e-6,
                ..TsvGeometry::reference()
            };
            let m = TsvModel::new(g, MaterialParams::reference()).unwrap();
            assert!(m.l_tsv() > 0.0, "h/r = {hr}");
        }
        let base = TsvModel::reference();
        let scaled =
            TsvModel::new(base.geometry().scaled(2.0), MaterialParams::reference()).unwrap();
        close(scaled.l_tsv(), 2.0 * base.l_tsv(), 1e-14);
    }

    #[test]
    fn rlgc_bundle() {
        let m = TsvModel::reference();
        let a = m.rlgc_at(1e9).unwrap();
        let b = m.rlgc_at(1e9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.r_half, a.r_total / 2.0);
        assert_eq!(a.l_half, a.l_total / 2.0);
        close(a.r_total, R_TOTAL_1G, 1e-9);
        close(a.c_d, C_D, 1e-9);

        let c = m.rlgc_at(3.7e10).unwrap();
        assert_eq!(
            (a.c_ox, a.c_d, a.c_si, a.g_si, a.l_total),
            (c.c_ox, c.c_d, c.c_si, c.g_si, c.l_total)
        );
        assert!(c.r_total > a.r_total);
        assert_eq!(a.at_resistance(3.7e10, c.r_total), c);
    }

    #[test]
    fn mobility_conductivity_is_consistent_with_reference_resistivity() {
        let mat = MaterialParams::reference();
        let sigma = mat.mobility_conductivity(DEFAULT_HOLE_MOBILITY);
        close(sigma, 8.6517538236, 1e-9);
        // ρ from q·N_A·μ_p lands within 5 % of the quoted 0.12 Ω·m
        assert!((1.0 / sigma - 0.12).abs() / 0.12 < 0.05);
        let m = mat.with_mobility_conductivity(DEFAULT_HOLE_MOBILITY);
        assert_eq!(m.sigma_si, sigma);
    }
}
