use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use tsv_core::config::ParameterSet;
use tsv_core::network::{max_relative_difference, nodal_z_sweep, z_sweep};
use tsv_core::sparams::{s_sweep, s_to_z};
use tsv_core::touchstone::{parse_s3p, write_s3p, WriteOptions};

use crate::output::print_json;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Relative tolerance for the dual-oracle and round-trip checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Relative tolerance for the Touchstone write/read check.
    #[arg(long, default_value_t = 1e-8)]
    pub touchstone_tolerance: f64,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    worst: f64,
    limit: f64,
}

#[derive(Serialize)]
struct ValidateReport {
    points: usize,
    pass: bool,
    checks: Vec<Check>,
}

fn check(name: &'static str, worst: f64, limit: f64) -> Check {
    Check {
        name,
        pass: worst <= limit,
        worst,
        limit,
    }
}

pub fn run(set: &ParameterSet, args: &ValidateArgs, json: bool) -> Result<ExitCode> {
    let model = set.model()?;
    let grid = set.frequency_grid()?;
    let tol = args.tolerance;

    let closed = z_sweep(&grid, &model)?;
    let nodal = nodal_z_sweep(&grid, &model)?;
    let s = s_sweep(&closed, set.z0)?;

    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let dual = fold(
        &mut closed
            .iter()
            .zip(&nodal)
            .map(|(a, b)| max_relative_difference(&a.z, &b.z)),
    );
    let z_recip = fold(&mut closed.iter().map(|z| z.asymmetry()));
    let z_passive = fold(
        &mut closed
            .iter()
            .map(|z| -z.min_hermitian_eigenvalue() / z.z.norm()),
    );
    let s_recip = fold(&mut s.iter().map(|x| x.asymmetry()));
    let s_passive = fold(&mut s.iter().map(|x| x.max_singular_value() - 1.0));
    let mut round = 0.0f64;
    for (z, x) in closed.iter().zip(&s) {
        let back = s_to_z(x)?;
        round = round.max((back.z - z.z).norm() / z.z.norm());
    }

    let mut first = Vec::new();
    write_s3p(&s, &WriteOptions::default(), &mut first)?;
    let mut second = Vec::new();
    write_s3p(&s, &WriteOptions::default(), &mut second)?;
    let read = parse_s3p(std::str::from_utf8(&first)?)?.to_sweep();
    let mut ts = if read.len() == s.len() && first == second {
        0.0f64
    } else {
        f64::INFINITY
    };
    for (a, b) in read.iter().zip(&s) {
        ts = ts.max(((a.frequency - b.frequency) / b.frequency).abs());
        for (x, y) in a.s.iter().zip(b.s.iter()) {
            ts = ts.max((x - y).norm() / y.norm());
        }
    }

    let checks = vec![
        check("dual-oracle Z agreement", dual, tol),
        check("Z reciprocity", z_recip, 1e-12),
        check("Z passivity (Hermitian part)", z_passive, tol),
        check("S reciprocity", s_recip, tol),
        check("S passivity (max singular value - 1)", s_passive, tol),
        check("Z->S->Z round trip", round, tol),
        check("touchstone write/read", ts, args.touchstone_tolerance),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let report = ValidateReport {
        points: grid.len(),
        pass,
        checks,
    };

    if json {
        print_json(&report)?;
    } else {
        for c in &report.checks {
            println!(
                "{} {}: worst {:.3e} (limit {:.0e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.limit
            );
        }
        println!(
            "{} points, {}",
            report.points,
            if pass { "all checks passed" } else { "FAILED" }
        );
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
