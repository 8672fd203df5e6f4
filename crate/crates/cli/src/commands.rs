use matvar_core::distributions::{
    default_membership_tol, verify_membership_with_tol, MembershipReport, QuadraticFit,
};
use matvar_core::{
    compute_reports, infer_quadratic, mc_cross_check, BoundReport, Distribution,
    McReport, Quadratic, Theorem,
};
use serde::Serialize;

use crate::config::Job;
use crate::failure::{code, CliResult, Failure};
use crate::output::{write_csv, write_json, Printer};

fn membership_failure(max: f64, tol: f64) -> Failure {
    Failure {
        code: code::MEMBERSHIP,
        message: format!("membership residual {max:.3e} exceeds tolerance {tol:.3e}"),
    }
}

fn residual_tol(job: &Job, dist: &Distribution) -> f64 {
    job.tol.unwrap_or_else(|| default_membership_tol(dist))
}

#[derive(Serialize)]
struct InferOutput<'a> {
    distribution: &'a str,
    declared: Option<Quadratic>,
    fit: QuadraticFit,
    membership: MembershipReport,
}

pub fn infer_q(job: &Job, out: &Printer) -> CliResult<i32> {
    let dist = job.distribution()?;
    let fit = infer_quadratic(&dist.clone().without_quadratic())?;
    let tol = residual_tol(job, dist);
    let fitted = dist.clone().with_quadratic(fit.quadratic);
    let membership = verify_membership_with_tol(&fitted, tol)?;
    let q = fit.quadratic;
    out.line(dist.name());
    out.line(format!("delta = {:.10e}\nbeta  = {:.10e}\ngamma = {:.10e}", q.delta, q.beta, q.gamma));
    if let Some(d) = dist.quadratic() {
        out.line(format!(
            "declared q = {d} (normalized distance {:.3e})",
            q.normalized_distance(&d)
        ));
    }
    out.line(format!(
        "residual: max={:.3e} mean={:.3e} tol={:.3e} points={} {}",
        membership.max_residual,
        membership.mean_residual,
        tol,
        membership.points,
        if membership.pass { "PASS" } else { "FAIL" }
    ));
    if let Some(path) = &job.json {
        write_json(
            path,
            &InferOutput {
                distribution: dist.name(),
                declared: dist.quadratic(),
                fit,
                membership,
            },
        )?;
    }
    if membership.pass {
        Ok(code::PASS)
    } else {
        Err(membership_failure(membership.max_residual, tol))
    }
}

pub fn verify(job: &Job, out: &Printer) -> CliResult<i32> {
    let dist = job.distribution()?;
    let tol = residual_tol(job, dist);
    let m = verify_membership_with_tol(dist, tol)?;
    out.line(format!("{}: q = {}", dist.name(), dist.q()?));
    out.line(format!(
        "residual: max={:.3e} mean={:.3e} tol={:.3e} points={} {}",
        m.max_residual,
        m.mean_residual,
        tol,
        m.points,
        if m.pass { "PASS" } else { "FAIL" }
    ));
    if let Some(path) = &job.json {
        write_json(path, &m)?;
    }
    if m.pass {
        Ok(code::PASS)
    } else {
        Err(membership_failure(m.max_residual, tol))
    }
}

/// The distribution with a checked quadratic: the declared one, or a fitted one when
/// none is declared.
fn checked_distribution(job: &Job, out: &Printer) -> CliResult<Distribution> {
    let dist = job.distribution()?.clone();
    let dist = match dist.quadratic() {
        Some(_) => dist,
        None => {
            let fit = infer_quadratic(&dist)?;
            out.line(format!("{}: no quadratic declared, using fitted q = {}", dist.name(), fit.quadratic));
            dist.with_quadratic(fit.quadratic)
        }
    };
    let tol = default_membership_tol(&dist);
    let m = verify_membership_with_tol(&dist, tol)?;
    if !m.pass {
        return Err(membership_failure(m.max_residual, tol));
    }
    Ok(dist)
}

fn run_reports(job: &Job, dist: &Distribution, orders: &[usize], theorems: &[Theorem]) -> CliResult<Vec<BoundReport>> {
    Ok(compute_reports(dist, job.tuple()?, orders, theorems, &job.bounds)?)
}

pub fn bounds(job: &Job, out: &Printer) -> CliResult<i32> {
    let orders = job.orders()?;
    let dist = checked_distribution(job, out)?;
    let reports = run_reports(job, &dist, orders, &job.theorems)?;
    out.line(format!("{}  g = ({})", dist.name(), job.tuple()?.labels().join(", ")));
    for r in &reports {
        for a in &r.provenance.annotations {
            out.line(format!("[n={}] note: {a}", r.n));
        }
        for v in &r.verdicts {
            out.line(v.to_string());
        }
    }
    if let Some(path) = &job.json {
        write_json(path, &reports)?;
    }
    if let Some(path) = &job.csv {
        let rows: Vec<_> = reports.iter().flat_map(|r| r.eigen_rows()).collect();
        write_csv(path, &rows)?;
    }
    Ok(if reports.iter().all(|r| r.pass()) {
        code::PASS
    } else {
        code::VERDICT
    })
}

/// One row of the sandwich table.
#[derive(Debug, Serialize)]
struct ChainRow {
    n: usize,
    bound: &'static str,
    side: &'static str,
    trace_bound: f64,
    trace_d: f64,
    /// Smallest eigenvalue of the difference that must be PSD.
    min_eigenvalue: f64,
    tol: f64,
    pass: bool,
}

pub fn chain(job: &Job, out: &Printer) -> CliResult<i32> {
    let top = *job.orders()?.iter().max().expect("nonempty");
    let dist = checked_distribution(job, out)?;
    let orders: Vec<usize> = (1..=top).collect();
    let theorems = [Theorem::Poincare, Theorem::Bessel];
    let reports = run_reports(job, &dist, &orders, &theorems)?;
    let mut rows = Vec::new();
    for r in &reports {
        let trace_d = r.d.trace();
        if let (Some(s), Some(v)) = (&r.s_n, r.verdict(Theorem::Poincare)) {
            rows.push(ChainRow {
                n: r.n,
                bound: "S_n",
                side: if r.n % 2 == 1 { "upper" } else { "lower" },
                trace_bound: s.trace(),
                trace_d,
                min_eigenvalue: v.min_eigenvalue,
                tol: v.tol,
                pass: v.pass,
            });
        }
        if let (Some(l), Some(v)) = (&r.l_n, r.verdict(Theorem::Bessel)) {
            rows.push(ChainRow {
                n: r.n,
                bound: "L_n",
                side: "lower",
                trace_bound: l.trace(),
                trace_d,
                min_eigenvalue: v.min_eigenvalue,
                tol: v.tol,
                pass: v.pass,
            });
        }
    }
    out.line(format!("{}  g = ({})", dist.name(), job.tuple()?.labels().join(", ")));
    out.line(format!(
        "{:>3}  {:<5} {:<6} {:>16} {:>16} {:>14}  verdict",
        "n", "bound", "side", "tr(bound)", "tr(D)", "min-eig"
    ));
    for row in &rows {
        out.line(format!(
            "{:>3}  {:<5} {:<6} {:>16.9} {:>16.9} {:>14.6e}  {}",
            row.n,
            row.bound,
            row.side,
            row.trace_bound,
            row.trace_d,
            row.min_eigenvalue + 0.0,
            if row.pass { "PASS" } else { "FAIL" }
        ));
    }
    if let Some(path) = &job.json {
        write_json(path, &reports)?;
    }
    if let Some(path) = &job.csv {
        write_csv(path, &rows)?;
    }
    Ok(if rows.iter().all(|r| r.pass) {
        code::PASS
    } else {
        code::VERDICT
    })
}

#[derive(Serialize)]
struct McRow<'a> {
    n: usize,
    matrix: &'a str,
    i: usize,
    j: usize,
    reference: f64,
    estimate: f64,
    half_width: f64,
    deviation: f64,
    allowed: f64,
    pass: bool,
}

pub fn mc_verify(job: &Job, out: &Printer) -> CliResult<i32> {
    let orders = job.orders()?;
    let dist = job.distribution()?;
    if !dist.has_sampler() {
        return Err(matvar_core::Error::NoSampler(dist.name().to_string()).into());
    }
    let dist = checked_distribution(job, out)?;
    let reports = run_reports(job, &dist, orders, &job.theorems)?;
    let g = job.tuple()?;
    let mc: Vec<McReport> = reports
        .iter()
        .map(|r| mc_cross_check(&dist, g, r, &job.bounds.engine))
        .collect::<Result<_, _>>()?;
    out.line(format!("{}  g = ({})", dist.name(), g.labels().join(", ")));
    for m in &mc {
        out.line(format!(
            "[n={}] mc: {} max-dev={:.3e} max-ratio={:.3} entries={} samples={} seed={}",
            m.n,
            if m.pass { "PASS" } else { "FAIL" },
            m.max_deviation,
            m.max_ratio,
            m.entries.len(),
            m.samples,
            m.seed
        ));
        for e in m.entries.iter().filter(|e| !e.pass) {
            out.line(format!(
                "    {}[{},{}]: reference={:.9e} estimate={:.9e} deviation={:.3e} allowed={:.3e}",
                e.matrix, e.i, e.j, e.reference, e.estimate, e.deviation, e.allowed
            ));
        }
    }
    if let Some(path) = &job.json {
        write_json(path, &mc)?;
    }
    if let Some(path) = &job.csv {
        let rows: Vec<McRow> = mc
            .iter()
            .flat_map(|m| {
                m.entries.iter().map(move |e| McRow {
                    n: m.n,
                    matrix: &e.matrix,
                    i: e.i,
                    j: e.j,
                    reference: e.reference,
                    estimate: e.estimate,
                    half_width: e.half_width,
                    deviation: e.deviation,
                    allowed: e.allowed,
                    pass: e.pass,
                })
            })
            .collect();
        write_csv(path, &rows)?;
    }
    Ok(if mc.iter().all(|m| m.pass) {
        code::PASS
    } else {
        code::MC_DISAGREEMENT
    })
}
