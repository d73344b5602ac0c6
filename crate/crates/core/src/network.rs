//! Three-port lumped network of the TSV pair and its open-circuit
//! impedance matrix.
//!
//! Ports: 1 = signal bottom, 2 = substrate, 3 = signal top. The signal via
//! is split into two R/L half-segments meeting at a midnode; the substrate
//! port hangs off the midnode through the oxide and depletion capacitances
//! in series, and returns to the ground via through the lateral silicon
//! conductance and capacitance. The ground via itself is the reference node.
//!
//! Two independent routes produce Z: [`z_matrix_at`] uses branch algebra on
//! this fixed topology, [`nodal_z_matrix_at`] stamps a [`NetworkDescription`]
//! into a complex nodal admittance matrix and solves it column by column.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::physics::{RlgcElements, TsvModel};

/// Elements smaller than this (SI units) are rejected rather than stamped.
pub const MIN_ELEMENT_VALUE: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Strictly increasing, strictly positive list of analysis frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl FrequencyGrid {
    pub const DEFAULT_START: f64 = 1e6;
    pub const DEFAULT_STOP: f64 = 100e9;
    pub const DEFAULT_POINTS: usize = 201;

    pub fn new(points: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Grid("no frequency points".into()));
        }
        if let Some(f) = points.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::Grid(format!(
                "frequency {f} is not finite and positive"
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "frequencies not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(FrequencyGrid { points, spacing })
    }

    pub fn logarithmic(start: f64, stop: f64, count: usize) -> Result<Self> {
        Self::generate(start, stop, count, Spacing::Logarithmic)
    }

    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        Self::generate(start, stop, count, Spacing::Linear)
    }

    pub fn generate(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if count == 0 {
            return Err(Error::Grid("point count must be at least 1".into()));
        }
        if count == 1 {
            if start != stop {
                return Err(Error::Grid(
                    "a single-point grid needs start == stop".into(),
                ));
            }
            return Self::new(vec![start], spacing);
        }
        if !(start > 0.0 && stop > start) {
            return Err(Error::Grid(format!(
                "need 0 < start < stop, got {start} .. {stop}"
            )));
        }
        let last = (count - 1) as f64;
        let mut points: Vec<f64> = (0..count)
            .map(|i| {
                let t = i as f64 / last;
                match spacing {
                    Spacing::Linear => start + (stop - start) * t,
                    Spacing::Logarithmic => start * (stop / start).powf(t),
                }
            })
            .collect();
        points[count - 1] = stop;
        Self::new(points, spacing)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for FrequencyGrid {
    /// 201 log-spaced points from 1 MHz to 100 GHz.
    fn default() -> Self {
        Self::logarithmic(
            Self::DEFAULT_START,
            Self::DEFAULT_STOP,
            Self::DEFAULT_POINTS,
        )
        .expect("default grid is valid")
    }
}

/// Port numbering used for every 3×3 matrix in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    SignalBottom = 0,
    Substrate = 1,
    SignalTop = 2,
}

/// Open-circuit impedance matrix at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePortZ {
    pub frequency: f64,
    pub z: Matrix3<Complex64>,
}

impl ThreePortZ {
    pub fn get(&self, row: Port, col: Port) -> Complex64 {
        self.z[(row as usize, col as usize)]
    }

    /// ‖Z − Zᵀ‖_F / ‖Z‖_F.
    pub fn asymmetry(&self) -> f64 {
        (self.z - self.z.transpose()).norm() / self.z.norm()
    }

    /// Smallest eigenvalue of the Hermitian part (Z + Zᴴ)/2. Non-negative
    /// for a passive network.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        let h = (self.z + self.z.adjoint()).scale(0.5);
        h.symmetric_eigenvalues().min()
    }
}

/// Node handle; `None` is the reference (ground via).
pub type NodeRef = Option<usize>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchElement {
    SeriesRl { r: f64, l: f64 },
    SeriesCapacitors { c1: f64, c2: f64 },
    Conductance(f64),
    Capacitance(f64),
}

impl BranchElement {
    /// Branch admittance at complex frequency `s`.
    pub fn admittance(&self, s: Complex64) -> Complex64 {
        match *self {
            BranchElement::SeriesRl { r, l } => 1.0 / (r + s * l),
            BranchElement::SeriesCapacitors { c1, c2 } => s * (c1 * c2 / (c1 + c2)),
            BranchElement::Conductance(g) => Complex64::new(g, 0.0),
            BranchElement::Capacitance(c) => s * c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub name: &'static str,
    pub from: NodeRef,
    pub to: NodeRef,
    pub element: BranchElement,
}

/// Node/branch form of the lumped network, ready for nodal analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDescription {
    pub nodes: Vec<&'static str>,
    pub branches: Vec<Branch>,
    /// Node index of ports 1, 2, 3.
    pub ports: [usize; 3],
}

impl NetworkDescription {
    /// True when every node has a branch path to the reference. A floating
    /// node makes the nodal matrix singular at every frequency.
    pub fn grounded(&self) -> bool {
        let n = self.nodes.len();
        let mut reached = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for b in &self.branches {
                let side = |node: NodeRef| node.is_none_or(|i| reached[i]);
                let (from, to) = (side(b.from), side(b.to));
                for (node, other) in [(b.from, to), (b.to, from)] {
                    if let Some(i) = node {
                        if other && !reached[i] {
                            reached[i] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        reached.into_iter().all(|r| r)
    }
}

const NODE_PORT1: usize = 0;
const NODE_MID: usize = 1;
const NODE_PORT3: usize = 2;
const NODE_PORT2: usize = 3;

fn check_elements(e: &RlgcElements) -> Result<()> {
    let values = [
        ("r_half", e.r_half),
        ("l_half", e.l_half),
        ("c_ox", e.c_ox),
        ("c_d", e.c_d),
        ("g_si", e.g_si),
        ("c_si", e.c_si),
    ];
    for (element, value) in values {
        if !value.is_finite() || value < MIN_ELEMENT_VALUE {
            return Err(Error::DegenerateElement {
                element,
                value,
                floor: MIN_ELEMENT_VALUE,
            });
        }
    }
    Ok(())
}

pub fn assemble_topology(elements: &RlgcElements) -> Result<NetworkDescription> {
    check_elements(elements)?;
    let segment = BranchElement::SeriesRl {
        r: elements.r_half,
        l: elements.l_half,
    };
    Ok(NetworkDescription {
        nodes: vec!["port1", "mid", "port3", "port2"],
        branches: vec![
            Branch {
                name: "lower segment",
                from: Some(NODE_PORT1),
                to: Some(NODE_MID),
                element: segment,
            },
            Branch {
                name: "upper segment",
                from: Some(NODE_MID),
                to: Some(NODE_PORT3),
                element: segment,
            },
            Branch {
                name: "oxide + depletion",
                from: Some(NODE_MID),
                to: Some(NODE_PORT2),
                element: BranchElement::SeriesCapacitors {
                    c1: elements.c_ox,
                    c2: elements.c_d,
                },
            },
            Branch {
                name: "substrate conductance",
                from: Some(NODE_PORT2),
                to: None,
                element: BranchElement::Conductance(elements.g_si),
            },
            Branch {
                name: "substrate capacitance",
                from: Some(NODE_PORT2),
                to: None,
                element: BranchElement::Capacitance(elements.c_si),
            },
        ],
        ports: [NODE_PORT1, NODE_PORT2, NODE_PORT3],
    })
}

pub(crate) fn laplace(f: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI * f)
}

fn check_frequency(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(Error::validation("frequency", f, "must be finite and > 0"))
    }
}

/// Z at `f` from branch algebra. The series resistance is taken from
/// `elements` as given; re-evaluate it with [`RlgcElements::at_resistance`]
/// when moving to another frequency.
pub fn z_matrix_at(f: f64, elements: &RlgcElements) -> Result<ThreePortZ> {
    check_frequency(f)?;
    check_elements(elements)?;
    let s = laplace(f);
    let segment = elements.r_half + s * elements.l_half;
    let mos = 1.0 / (s * elements.c_mos());
    let substrate = 1.0 / (elements.g_si + s * elements.c_si);

    // Current injected at either signal port reaches ground only through
    // the midnode, so every path shares the mos + substrate impedance.
    let through_mid = mos + substrate;
    let signal_self = segment + through_mid;
    #[rustfmt::skip]
    let z = Matrix3::new(
        signal_self, substrate, through_mid,
        substrate, substrate, substrate,
        through_mid, substrate, signal_self,
    );
    if z.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::SingularNodal { frequency: f });
    }
    Ok(ThreePortZ { frequency: f, z })
}

/// Modified nodal analysis matrix of `network` at complex frequency `s`.
///
/// Unknowns are the node voltages followed by one current per series RL
/// branch, so large series admittances are never summed with small shunt
/// ones on the diagonal. `shunts` adds extra admittances from a node to the
/// reference.
pub(crate) fn mna_matrix(
    network: &NetworkDescription,
    s: Complex64,
    shunts: &[(usize, Complex64)],
) -> DMatrix<Complex64> {
    let n = network.nodes.len();
    let series = network
        .branches
        .iter()
        .filter(|b| matches!(b.element, BranchElement::SeriesRl { .. }))
        .count();
    let one = Complex64::new(1.0, 0.0);
    let mut m = DMatrix::<Complex64>::zeros(n + series, n + series);
    let mut k = n;
    for branch in &network.branches {
        match branch.element {
            BranchElement::SeriesRl { r, l } => {
                // current k flows from `from` to `to`
                if let Some(a) = branch.from {
                    m[(a, k)] += one;
                    m[(k, a)] += one;
                }
                if let Some(b) = branch.to {
                    m[(b, k)] -= one;
                    m[(k, b)] -= one;
                }
                m[(k, k)] = -(r + s * l);
                k += 1;
            }
            element => {
                let g = element.admittance(s);
                if let Some(a) = branch.from {
                    m[(a, a)] += g;
                }
                if let Some(b) = branch.to {
                    m[(b, b)] += g;
                }
                if let (Some(a), Some(b)) = (branch.from, branch.to) {
                    m[(a, b)] -= g;
                    m[(b, a)] -= g;
                }
            }
        }
    }
    for &(node, y) in shunts {
        m[(node, node)] += y;
    }
    m
}

/// Z at `f` by modified nodal analysis of `network`: 1 A injected at each
/// port in turn, open-circuit voltages read at every port.
pub fn nodal_z_matrix_at(f: f64, network: &NetworkDescription) -> Result<ThreePortZ> {
    check_frequency(f)?;
    if !network.grounded() {
        return Err(Error::SingularNodal { frequency: f });
    }
    let m = mna_matrix(network, laplace(f), &[]);
    let size = m.nrows();
    let lu = m.lu();
    let mut z = Matrix3::<Complex64>::zeros();
    for (col, &node) in network.ports.iter().enumerate() {
        let mut rhs = DVector::<Complex64>::zeros(size);
        rhs[node] = Complex64::new(1.0, 0.0);
        let v = lu
            .solve(&rhs)
            .ok_or(Error::SingularNodal { frequency: f })?;
        for (row, &probe) in network.ports.iter().enumerate() {
            z[(row, col)] = v[probe];
        }
    }
    if z.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::SingularNodal { frequency: f });
    }
    Ok(ThreePortZ { frequency: f, z })
}

fn sweep_with<F>(grid: &FrequencyGrid, model: &TsvModel, eval: F) -> Result<Vec<ThreePortZ>>
where
    F: Fn(f64, &RlgcElements) -> Result<ThreePortZ> + Sync,
{
    let first = grid.points()[0];
    let base = model.rlgc_at(first).map_err(|e| e.at_frequency(first))?;
    grid.points()
        .par_iter()
        .map(|&f| {
            let r = model.r_total(f)?;
            eval(f, &base.at_resistance(f, r))
        })
        .zip(grid.points().par_iter())
        .map(|(res, &f)| res.map_err(|e| e.at_frequency(f)))
        .collect()
}

/// Z over a grid. Frequency-independent elements are computed once, the
/// series resistance per point. Output order follows the grid.
pub fn z_sweep(grid: &FrequencyGrid, model: &TsvModel) -> Result<Vec<ThreePortZ>> {
    sweep_with(grid, model, z_matrix_at)
}

/// Same as [`z_sweep`] but through nodal analysis.
pub fn nodal_z_sweep(grid: &FrequencyGrid, model: &TsvModel) -> Result<Vec<ThreePortZ>> {
    sweep_with(grid, model, |f, e| {
        nodal_z_matrix_at(f, &assemble_topology(e)?)
    })
}

/// Largest entry-wise relative difference |a − b| / max(|a|, |b|).
pub fn max_relative_difference(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let scale = x.norm().max(y.norm());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}
