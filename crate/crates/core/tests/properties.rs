use num_complex::Complex64;
use proptest::prelude::*;

use tsv_core::network::{assemble_topology, nodal_z_matrix_at, z_matrix_at, FrequencyGrid};
use tsv_core::physics::constants::EPS_0;
use tsv_core::physics::{MaterialParams, TsvGeometry, TsvModel};
use tsv_core::sparams::{s_to_z, z_to_s};
use tsv_core::spur::{
    calibrate_k_sub, reference_data, spur_dbc, substrate_transfer, OscillatorModel, SpurScenario,
    SubstrateLoad,
};
use tsv_core::touchstone::{parse_s3p, write_s3p, WriteOptions};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn frequency() -> impl Strategy<Value = f64> {
    log_uniform(1e6, 1e11)
}

/// Valid geometries: liner thinner than the radius, pitch clear of the pair.
fn geometry() -> impl Strategy<Value = TsvGeometry> {
    (
        log_uniform(5e-6, 500e-6),
        log_uniform(0.5e-6, 20e-6),
        0.01f64..0.5,
        2.2f64..20.0,
    )
        .prop_map(|(height, radius, liner_frac, pitch_mult)| {
            let liner_thickness = radius * liner_frac;
            TsvGeometry {
                height,
                radius,
                pitch: pitch_mult * (radius + liner_thickness),
                liner_thickness,
            }
        })
}

fn model() -> impl Strategy<Value = TsvModel> {
    geometry().prop_map(|g| TsvModel::new(g, MaterialParams::reference()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resistance_and_skin_depth_monotone(m in model(), f1 in frequency(), f2 in frequency()) {
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        prop_assume!(hi > lo * (1.0 + 1e-9));
        prop_assert!(m.r_total(hi).unwrap() >= m.r_total(lo).unwrap());
        prop_assert!(m.skin_depth(hi).unwrap() < m.skin_depth(lo).unwrap());
    }

    #[test]
    fn quadrature_identity(m in model(), f in frequency()) {
        let (dc, ac, total) = (m.r_dc(), m.r_ac(f).unwrap(), m.r_total(f).unwrap());
        let residual = total * total - dc * dc - ac * ac;
        prop_assert!(residual.abs() <= 8.0 * f64::EPSILON * total * total);
    }

    #[test]
    fn oxide_capacitance_increases_with_height(g in geometry(), factor in 1.01f64..10.0) {
        let short = TsvModel::new(g, MaterialParams::reference()).unwrap();
        let tall = TsvModel::new(TsvGeometry { height: g.height * factor, ..g }, MaterialParams::reference()).unwrap();
        prop_assert!(tall.c_ox() > short.c_ox());
    }

    #[test]
    fn substrate_capacitance_conductance_ratio(m in model(), sigma in log_uniform(0.1, 1e3), eps in 1.0f64..20.0) {
        let material = MaterialParams { sigma_si: sigma, eps_si: eps, ..MaterialParams::reference() };
        let m = TsvModel::new(*m.geometry(), material).unwrap();
        let (c_si, g_si) = m.c_si_g_si();
        let lhs = g_si * eps * EPS_0;
        let rhs = c_si * sigma;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn elements_finite_and_positive(m in model(), f in frequency()) {
        let e = m.rlgc_at(f).unwrap();
        for v in [e.r_total, e.r_half, e.l_total, e.l_half, e.c_ox, e.c_d, e.c_si, e.g_si] {
            prop_assert!(v.is_finite() && v > 0.0);
        }
    }

    #[test]
    fn branch_algebra_matches_nodal(m in model(), f in frequency()) {
        let e = m.rlgc_at(f).unwrap();
        let a = z_matrix_at(f, &e).unwrap();
        let b = nodal_z_matrix_at(f, &assemble_topology(&e).unwrap()).unwrap();
        let scale = a.z.norm();
        prop_assert!((a.z - b.z).norm() <= 1e-9 * scale);
        prop_assert!(a.asymmetry() <= 1e-12);
        prop_assert!(a.min_hermitian_eigenvalue() >= -1e-9 * scale);
    }

    #[test]
    fn scattering_is_passive_reciprocal_and_invertible(m in model(), f in frequency(), z0 in 5.0f64..200.0) {
        let z = z_matrix_at(f, &m.rlgc_at(f).unwrap()).unwrap();
        let s = z_to_s(&z, z0).unwrap();
        prop_assert!(s.max_singular_value() <= 1.0 + 1e-9);
        prop_assert!(s.asymmetry() <= 1e-9);
        let back = s_to_z(&s).unwrap();
        prop_assert!((back.z - z.z).norm() <= 1e-9 * z.z.norm());
    }

    #[test]
    fn touchstone_round_trip(m in model(), start in log_uniform(1e6, 1e9), points in 1usize..20) {
        let grid = FrequencyGrid::logarithmic(start, start * 100.0, points.max(2)).unwrap();
        let sweep: Vec<_> = grid
            .points()
            .iter()
            .map(|&f| z_to_s(&z_matrix_at(f, &m.rlgc_at(f).unwrap()).unwrap(), 50.0).unwrap())
            .collect();
        let mut first = Vec::new();
        write_s3p(&sweep, &WriteOptions::default(), &mut first).unwrap();
        let mut second = Vec::new();
        write_s3p(&sweep, &WriteOptions::default(), &mut second).unwrap();
        prop_assert_eq!(&first, &second);

        let doc = parse_s3p(std::str::from_utf8(&first).unwrap()).unwrap();
        let read = doc.to_sweep();
        prop_assert_eq!(read.len(), sweep.len());
        for (a, b) in read.iter().zip(&sweep) {
            prop_assert!((a.frequency - b.frequency).abs() <= 1e-8 * b.frequency);
            for (x, y) in a.s.iter().zip(b.s.iter()) {
                prop_assert!((x - y).norm() <= 1e-8 * y.norm().max(1e-12));
            }
        }
    }

    #[test]
    fn amplitude_doubling_is_six_db(a in 1e-3f64..0.5, f in log_uniform(1e8, 1e10), h in 0.01f64..1.0) {
        let osc = OscillatorModel::with_k_sub(1e8).unwrap();
        let t = Complex64::new(h, 0.0);
        let one = spur_dbc(&osc, &SpurScenario::new(a, f, t).unwrap()).unwrap().dbc;
        let two = spur_dbc(&osc, &SpurScenario::new(2.0 * a, f, t).unwrap()).unwrap().dbc;
        prop_assert!((two - one - 6.020599913279624).abs() < 1e-9);
    }
}

#[test]
fn coupling_impedance_falls_above_one_gigahertz() {
    let m = TsvModel::reference();
    let grid = FrequencyGrid::default();
    let mut prev = f64::INFINITY;
    for &f in grid.points().iter().filter(|&&f| f >= 1e9) {
        let z12 = z_matrix_at(f, &m.rlgc_at(f).unwrap()).unwrap().z[(0, 1)].norm();
        assert!(z12 < prev, "at {f}");
        prev = z12;
    }
}

#[test]
fn amplitude_sweep_endpoints_calibrate_consistently() {
    let m = TsvModel::reference();
    let cal = calibrate_k_sub(&reference_data::AMPLITUDE_SWEEP, |f| {
        substrate_transfer(f, &m, 50.0, SubstrateLoad::Open)
    })
    .unwrap();
    assert!(cal.spread() <= 1.0, "spread {}", cal.spread());
    assert!(cal.is_consistent());
}

#[test]
fn nodal_route_keeps_precision_where_series_and_shunt_admittances_differ_most() {
    let m = TsvModel::reference();
    for f in [1.0, 1e3, 1e6] {
        let e = m.rlgc_at(f).unwrap();
        let a = z_matrix_at(f, &e).unwrap();
        let b = nodal_z_matrix_at(f, &assemble_topology(&e).unwrap()).unwrap();
        assert!((a.z - b.z).norm() <= 1e-14 * a.z.norm(), "at {f}");
        if f >= 1e6 {
            assert!(tsv_core::network::max_relative_difference(&a.z, &b.z) <= 1e-12);
        }
    }
}
