use serde_json::{json, Value};

use nearly_g2::eigencheck::{eigencheck_report, GridSpec};
use nearly_g2::fd::Stencil;
use nearly_g2::hypersurface::{hypersurface_survey, ExampleSurface, DEFAULT_MARGIN, DEFECT_DIRECTIONS};
use nearly_g2::identities::{corrupted_phi0, verify_all};
use nearly_g2::octonion::PHI0;
use nearly_g2::sphere::{nearly_curvature, torsion_survey, TAU0};
use nearly_g2::{MetricTensor, Result, Vec8};

use crate::report::{envelope, Run};

pub fn verify_identities(corrupt: Option<[usize; 3]>) -> Result<Run> {
    let table = corrupt.map_or(PHI0, corrupted_phi0);
    let checks = verify_all(&table);
    let mut failures = Vec::new();
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            if let Some(t) = &c.first_failure {
                failures.push(format!(
                    "{}: {} of {} tuples fail, first failing index tuple {:?}",
                    c.name, c.failures, c.tuples, t
                ));
            }
            json!({
                "name": c.name,
                "tuples": c.tuples,
                "failures": c.failures,
                "first_failure": c.first_failure,
                "passed": c.passed(),
            })
        })
        .collect();
    let params = json!({ "corrupt_phi": corrupt });
    Ok(Run {
        report: envelope("verify-identities", 0, params, json!({ "checks": rows })),
        failures,
    })
}

pub fn torsion(samples: usize, seed: u64, step: f64, order: u32, tol: f64) -> Result<Run> {
    let stencil = Stencil::from_order(order)?;
    let s = torsion_survey(samples, seed, step, stencil)?;
    let (ric, scal) = nearly_curvature(TAU0, &MetricTensor::identity());
    let mut failures = Vec::new();
    if samples > 0 {
        if s.max_tau0_deviation > tol {
            failures.push(format!("|tau0 - 4| = {:e} exceeds {tol:e}", s.max_tau0_deviation));
        }
        for (name, v) in [("tau1", s.max_tau1), ("tau2", s.max_tau2), ("tau3", s.max_tau3)] {
            if v > tol {
                failures.push(format!("|{name}| = {v:e} exceeds {tol:e}"));
            }
        }
    }
    let results = if samples == 0 {
        json!({ "points": 0 })
    } else {
        json!({
            "points": s.points,
            "mean_t_deviation": s.mean_t_deviation,
            "max_t_deviation": s.max_t_deviation,
            "mean_tau0": s.mean_tau0,
            "max_tau0_deviation": s.max_tau0_deviation,
            "max_tau1": s.max_tau1,
            "max_tau2": s.max_tau2,
            "max_tau3": s.max_tau3,
            "ricci_over_g": ric[(0, 0)],
            "scalar_curvature": scal,
        })
    };
    let params = json!({ "samples": samples, "step": step, "order": order, "tol": tol });
    Ok(Run {
        report: envelope("torsion", seed, params, results),
        failures,
    })
}

pub fn hypersurface(example: &str, samples: usize, seed: u64, tol: f64) -> Result<Run> {
    let ex: ExampleSurface = example.parse()?;
    let chart = ex.chart()?;
    let s = hypersurface_survey(&chart, samples, seed)?;
    let mut failures = Vec::new();
    if samples > 0 {
        if s.max_abs_mean > tol {
            failures.push(format!("tr A = {:e} is not minimal", s.max_abs_mean));
        }
        if s.max_div_xi > tol || s.max_div_xi_fd > tol {
            failures.push(format!(
                "div xi = {:e} (closed form), {:e} (finite differences) exceeds {tol:e}",
                s.max_div_xi, s.max_div_xi_fd
            ));
        }
        if s.max_umbilic_defect <= tol && s.max_nk_defect > tol {
            failures.push("umbilic but not nearly Kaehler".into());
        }
        if s.min_umbilic_defect > tol && s.min_nk_defect <= tol {
            failures.push("nearly Kaehler at a non-umbilic point".into());
        }
    }
    let results = if samples == 0 {
        json!({ "points": 0 })
    } else {
        json!({
            "points": s.points,
            "max_abs_trace_a": s.max_abs_mean,
            "a2": [s.min_a2, s.max_a2],
            "umbilic_defect": [s.min_umbilic_defect, s.max_umbilic_defect],
            "nk_defect": [s.min_nk_defect, s.max_nk_defect],
            "cross_defect_sup": [s.min_cross_defect, s.max_cross_defect],
            "div_xi": s.max_div_xi,
            "div_xi_fd": s.max_div_xi_fd,
            "scalar_curvature": s.scalar.map(|(lo, hi)| vec![lo, hi]),
        })
    };
    let params = json!({
        "example": ex.to_string(),
        "samples": samples,
        "directions": DEFECT_DIRECTIONS,
        "margin": DEFAULT_MARGIN,
        "tol": tol,
    });
    Ok(Run {
        report: envelope("hypersurface", seed, params, results),
        failures,
    })
}

pub fn eigencheck(
    example: &str,
    field1: [f64; 8],
    field2: [f64; 8],
    delta: f64,
    order: u32,
    tol: f64,
    seed: u64,
) -> Result<Run> {
    let ex: ExampleSurface = example.parse()?;
    let stencil = Stencil::from_order(order)?;
    let chart = ex.chart()?;
    let spec = GridSpec::centered(&chart, delta, stencil);
    let (y, yt) = (Vec8::from(field1), Vec8::from(field2));
    let r = eigencheck_report(ex, &y, &yt, &spec)?;
    let mut failures = Vec::new();
    if !(r.rel_residual <= tol) {
        failures.push(format!("relative residual {:e} exceeds {tol:e}", r.rel_residual));
    }
    let bounds: Vec<[f64; 2]> = r.grid_box.iter().map(|(a, b)| [*a, *b]).collect();
    let results = json!({
        "example": r.example,
        "k": r.k,
        "Y": field1,
        "Y_tilde": field2,
        "grid": { "box": bounds, "delta": r.delta, "order": r.order },
        "lambda_expected": r.lambda_expected,
        "max_abs_h": r.max_abs_h,
        "max_residual": r.max_residual,
        "rel_residual": r.rel_residual,
        "nonconstancy": r.nonconstancy,
    });
    let params = json!({
        "example": ex.to_string(),
        "grid": delta,
        "order": order,
        "tol": tol,
        "nodes_per_axis": spec.nodes_per_axis(),
    });
    Ok(Run {
        report: envelope("eigencheck", seed, params, results),
        failures,
    })
}
