use std::time::Instant;

use serde_json::{json, Value};

use badapprox::constructions::{build_scenario, sample_shift, sample_theta};
use badapprox::cover::{
    classify_convergence, growth_diagnosis, m_profile, theorem_bound, CoverParams, CoverProfile,
};
use badapprox::engine::{Engine, EngineError, RecordTable, Subject};
use badapprox::exponent::{estimate_exponent, liminf_profile, ExponentError, ExponentEstimate};
use badapprox::geometry::{graph_subspace, Ambient};
use badapprox::parallel::Execution;

use crate::config::{ExperimentConfig, Parallelism, ProfileRows};
use crate::output::{create_csv, join, json_f64, write_json};
use crate::subject::parse_subject;
use crate::{CliError, EXIT_BELOW_THRESHOLD, EXIT_BUDGET, EXIT_OK};

/// Exit code plus a human-readable report for stdout.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: String,
    pub summary: Value,
}

fn engine(cfg: &ExperimentConfig) -> Engine {
    Engine::new(cfg.budget, Execution::Parallel)
}

#[cfg(feature = "parallel")]
fn with_pool<T: Send>(parallelism: Parallelism, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match parallelism {
        Parallelism::Auto => Ok(f()),
        Parallelism::Threads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build a pool of {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_pool<T: Send>(_parallelism: Parallelism, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    Ok(f())
}

#[cfg(feature = "parallel")]
fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

fn config_json(cfg: &ExperimentConfig) -> Value {
    Value::Object(cfg.entries().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect())
}

fn estimate_json(est: &Result<ExponentEstimate, ExponentError>) -> Value {
    match est {
        Ok(e) => json!({
            "omega_hat": json_f64(e.omega_hat),
            "method": e.method.as_str(),
            "tail_slope": json_f64(e.tail_slope),
            "max_ratio": json_f64(e.max_ratio),
            "window": e.window,
            "residual": json_f64(e.residual),
            "records_used": e.records_used,
            "caveat_flags": e.caveat_flags.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        }),
        Err(ExponentError::ZeroValueSubject) => json!({
            "omega_hat": "inf",
            "caveat_flags": ["ZERO_VALUE_SUBJECT"],
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Record table, allowing a budget overrun to return the partial table.
fn table_or_partial(
    engine: &Engine,
    subject: &Subject,
    cfg: &ExperimentConfig,
    t_max: u64,
) -> Result<(RecordTable, Option<String>), CliError> {
    match engine.record_table(subject, t_max, cfg.convention) {
        Ok(t) => Ok((t, None)),
        Err(e @ EngineError::BudgetExceeded { .. }) => {
            let message = e.to_string();
            match e {
                EngineError::BudgetExceeded { partial: Some(p), .. } => Ok((*p, Some(message))),
                _ => Err(CliError::Budget(message)),
            }
        }
        Err(e) => Err(CliError::Config(e.to_string())),
    }
}

fn subject_summary(cfg: &ExperimentConfig) -> Result<(Subject, RecordTable, Option<String>, Value, String), CliError> {
    cfg.validate()?;
    let subject = parse_subject(&cfg.subject, cfg)?;
    let (table, budget) = table_or_partial(&engine(cfg), &subject, cfg, cfg.t_max)?;
    let est = estimate_exponent(&table, cfg.method, cfg.window);
    let mut report = format!(
        "subject {} ({}), convention {}, scanned to t = {}: {} records\n",
        cfg.subject,
        table.subject,
        table.convention,
        table.t_max_scanned,
        table.records.len()
    );
    let liminf = match &est {
        Ok(e) => {
            report += &format!(
                "omega_hat = {} ({}; window {}, residual {}); max_ratio = {}\n",
                e.omega_hat, e.method, e.window, e.residual, e.max_ratio
            );
            let profile = liminf_profile(&table, e.tail_slope);
            let lo = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let hi = profile.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            report += &format!("liminf profile at tau = {}: min {lo}, max {hi}\n", e.tail_slope);
            json!({ "tau": json_f64(e.tail_slope), "min": json_f64(lo), "max": json_f64(hi) })
        }
        Err(e) => {
            report += &format!("no exponent estimate: {e}\n");
            Value::Null
        }
    };
    report += &format!("contains_integer_points={}\n", table.contains_integer_points);
    if let Some(b) = &budget {
        report += &format!("{b}\n");
    }
    let summary = json!({
        "subject": cfg.subject,
        "subject_description": table.subject,
        "convention": table.convention.as_str(),
        "t_max": cfg.t_max,
        "t_max_scanned": table.t_max_scanned,
        "records_count": table.records.len(),
        "contains_integer_points": table.contains_integer_points,
        "estimate": estimate_json(&est),
        "liminf_profile": liminf,
        "budget_exceeded": budget.is_some(),
    });
    Ok((subject, table, budget, summary, report))
}

fn finish(
    cfg: &ExperimentConfig,
    command: &str,
    mut summary: Value,
    report: String,
    exit_code: i32,
    started: Instant,
) -> Result<Outcome, CliError> {
    let obj = summary.as_object_mut().expect("summary is an object");
    obj.insert("command".into(), json!(command));
    obj.insert("exit_code".into(), json!(exit_code));
    obj.insert("config".into(), config_json(cfg));
    obj.insert(
        "timings".into(),
        json!({ "total_seconds": started.elapsed().as_secs_f64(), "finished": crate::output::timestamp() }),
    );
    write_json(&cfg.output_dir, "summary.json", &summary)?;
    Ok(Outcome { exit_code, report, summary })
}

/// Record table of the configured subject, written to `records.csv`.
pub fn run_records(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let (_, table, budget, summary, report) = with_pool(cfg.parallelism, || subject_summary(cfg))??;
    let mut csv = create_csv(&cfg.output_dir, "records.csv", "records", &["t", "value", "witness", "log10_t", "log10_value"])?;
    for r in &table.records {
        csv.write_record([
            r.t.to_string(),
            r.value.to_string(),
            join(&r.witness),
            (r.t as f64).log10().to_string(),
            r.value.log10().to_string(),
        ])?;
    }
    csv.flush()?;
    let code = if budget.is_some() { EXIT_BUDGET } else { EXIT_OK };
    finish(cfg, "records", summary, report, code, started)
}

/// Exponent estimate of the configured subject; writes `summary.json` only.
pub fn run_exponent(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let (_, _, budget, summary, report) = with_pool(cfg.parallelism, || subject_summary(cfg))??;
    let code = if budget.is_some() { EXIT_BUDGET } else { EXIT_OK };
    finish(cfg, "exponent", summary, report, code, started)
}

struct SampleRow {
    theta: Vec<f64>,
    omega_hat: f64,
    within: bool,
    included: bool,
    records: usize,
    scanned: u64,
    flags: Vec<&'static str>,
}

fn omega_of(table: &RecordTable, cfg: &ExperimentConfig, flags: &mut Vec<&'static str>) -> f64 {
    match estimate_exponent(table, cfg.method, cfg.window) {
        Ok(e) => {
            flags.extend(e.caveat_flags.iter().map(|f| f.as_str()));
            e.omega_hat
        }
        Err(ExponentError::ZeroValueSubject) => {
            flags.push("ZERO_VALUE_SUBJECT");
            f64::INFINITY
        }
        Err(_) => {
            flags.push("TOO_FEW_RECORDS");
            f64::NAN
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    match values.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => values[n / 2],
        n => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}

/// Monte Carlo check of the exponent bound for subspaces `𝔆(Θ) ⊂ 𝔄`.
pub fn run_verify_theorem(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    cfg.validate()?;
    let scenario = build_scenario(cfg.d, cfg.a, cfg.b, cfg.c, cfg.b_kind, cfg.theta_bound, cfg.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let eng = engine(cfg);
    let (rows, cols) = (cfg.a - cfg.c, cfg.c);

    let (b_table, b_omega, bound, b_flags, rows_out) = with_pool(cfg.parallelism, || -> Result<_, CliError> {
        let (b_table, b_budget) = table_or_partial(&eng, &Subject::Subspace(scenario.b_space.clone()), cfg, cfg.b_t_max)?;
        let mut b_flags = Vec::new();
        if b_budget.is_some() {
            b_flags.push("BUDGET_EXCEEDED");
        }
        let b_omega = omega_of(&b_table, cfg, &mut b_flags);
        let bound = theorem_bound(cfg.a as u32, cfg.b as u32, cfg.c as u32, cfg.d as u32, b_omega)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let rows_out: Vec<Result<SampleRow, CliError>> = map_indexed(cfg.sample_count, |i| {
            let theta = sample_theta(rows, cols, cfg.theta_bound, cfg.seed ^ i as u64)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let space = graph_subspace(&theta, Ambient::Within(&scenario.a_space))
                .map_err(|e| CliError::Config(e.to_string()))?;
            let (table, budget) = table_or_partial(&eng, &Subject::Subspace(space), cfg, cfg.t_max)?;
            let mut flags = Vec::new();
            if budget.is_some() {
                flags.push("BUDGET_EXCEEDED");
            }
            let omega_hat = omega_of(&table, cfg, &mut flags);
            let records = table.positive_records().len();
            Ok(SampleRow {
                theta: theta.entries().to_vec(),
                omega_hat,
                within: omega_hat <= bound + cfg.slack,
                included: !(budget.is_some() && records < 3),
                records: table.records.len(),
                scanned: table.t_max_scanned,
                flags,
            })
        });
        Ok((b_table, b_omega, bound, b_flags, rows_out))
    })??;
    let rows_out: Vec<SampleRow> = rows_out.into_iter().collect::<Result<_, _>>()?;

    let mut csv = create_csv(
        &cfg.output_dir,
        "samples.csv",
        "verify-theorem",
        &["sample_id", "theta_rowmajor", "omega_hat", "bound", "slack", "within_bound", "records_count", "t_max_scanned", "flags"],
    )?;
    for (i, r) in rows_out.iter().enumerate() {
        csv.write_record([
            i.to_string(),
            join(&r.theta),
            r.omega_hat.to_string(),
            bound.to_string(),
            cfg.slack.to_string(),
            r.within.to_string(),
            r.records.to_string(),
            r.scanned.to_string(),
            r.flags.join("|"),
        ])?;
    }
    csv.flush()?;

    let included = rows_out.iter().filter(|r| r.included).count();
    let within = rows_out.iter().filter(|r| r.included && r.within).count();
    let fraction = if included == 0 { 0.0 } else { within as f64 / included as f64 };
    let mut omegas: Vec<f64> = rows_out.iter().filter(|r| r.included && !r.omega_hat.is_nan()).map(|r| r.omega_hat).collect();
    let median_omega = median(&mut omegas);
    let pass = fraction >= cfg.threshold;
    let report = format!(
        "scenario (d,a,b,c) = ({},{},{},{}) {}: omega_hat(B) = {b_omega} from {} records\n\
         bound = {bound}, slack = {}, {within}/{included} samples within bound (fraction {fraction}), median omega_hat = {median_omega}\n\
         verdict: {}\n",
        cfg.d,
        cfg.a,
        cfg.b,
        cfg.c,
        cfg.b_kind,
        b_table.records.len(),
        cfg.slack,
        if pass { "PASS" } else { "FAIL" }
    );
    let summary = json!({
        "scenario": { "d": cfg.d, "a": cfg.a, "b": cfg.b, "c": cfg.c, "b_kind": cfg.b_kind.as_str() },
        "omega_b": json_f64(b_omega),
        "omega_b_flags": b_flags,
        "b_records_count": b_table.records.len(),
        "bound": json_f64(bound),
        "slack": cfg.slack,
        "threshold": cfg.threshold,
        "samples": rows_out.len(),
        "included": included,
        "within_bound": within,
        "fraction": fraction,
        "median_omega_hat": json_f64(median_omega),
        "verdict": if pass { "PASS" } else { "FAIL" },
    });
    let code = if pass { EXIT_OK } else { EXIT_BELOW_THRESHOLD };
    finish(cfg, "verify-theorem", summary, report, code, started)
}

/// Row indices (0-based, `T − 1`) written to `profile.csv`.
fn profile_indices(t_max: usize, rows: ProfileRows) -> Vec<usize> {
    match rows {
        ProfileRows::All => (0..t_max).collect(),
        ProfileRows::Log => {
            let mut ts: Vec<usize> = (1..=t_max.min(100)).collect();
            let mut k = 200;
            loop {
                let t = 10f64.powf(k as f64 / 100.0).round() as usize;
                if t > t_max {
                    break;
                }
                if ts.last() != Some(&t) {
                    ts.push(t);
                }
                k += 1;
            }
            if ts.last() != Some(&t_max) {
                ts.push(t_max);
            }
            ts.into_iter().map(|t| t - 1).collect()
        }
    }
}

fn partial_at_json(profile: &CoverProfile, t: usize) -> Value {
    if t <= profile.t_max() {
        json_f64(profile.partial_at(t))
    } else {
        Value::Null
    }
}

/// Covering profile and convergence classification for power-log `ψ`, `φ`.
pub fn run_series(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    cfg.validate()?;
    let p = CoverParams::new(cfg.a as u32, cfg.b as u32, cfg.c as u32, cfg.d as u32)
        .map_err(|e| CliError::Config(e.to_string()))?;
    for (name, f) in [("psi", &cfg.psi), ("phi", &cfg.phi)] {
        f.validate(cfg.series_t_max as f64).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    }
    let profile = m_profile(cfg.series_t_max, &p, &cfg.psi, &cfg.phi);
    let class = classify_convergence(&p, cfg.psi.gamma, cfg.psi.logpow, cfg.phi.gamma, cfg.phi.logpow);
    let diag = growth_diagnosis(&profile);
    let diagnosis = if class.is_boundary() {
        "numerically undecidable".to_string()
    } else {
        match diag {
            Some(g) if g.tail_growth < 0.05 && g.decade_ratio < 1.0 => "partial sums settling".into(),
            Some(_) => "partial sums still growing".into(),
            None => "range too short for a growth diagnosis".into(),
        }
    };

    let mut csv = create_csv(&cfg.output_dir, "profile.csv", "series", &["T", "mu", "M", "lambda", "term", "partial_sum"])?;
    for i in profile_indices(profile.t_max(), cfg.profile_rows) {
        csv.write_record([
            (i + 1).to_string(),
            profile.mu[i].to_string(),
            profile.m[i].to_string(),
            profile.lambda[i].to_string(),
            profile.term[i].to_string(),
            profile.partial_sum[i].to_string(),
        ])?;
    }
    csv.flush()?;

    let mut report = format!(
        "(a,b,c,d) = ({},{},{},{}), psi = {:?}, phi = {:?}\nclassification: {}\ndiagnosis: {diagnosis}\n",
        p.a,
        p.b,
        p.c,
        p.d,
        cfg.psi,
        cfg.phi,
        class.as_str()
    );
    if let Some(g) = diag {
        report += &format!("tail growth over the last decade: {}, decade ratio: {}\n", g.tail_growth, g.decade_ratio);
    }
    for w in &profile.warnings {
        report += &format!("warning: {w}\n");
    }
    let summary = json!({
        "classification": class.as_str(),
        "diagnosis": diagnosis,
        "tail_growth": diag.map(|g| json_f64(g.tail_growth)),
        "decade_ratio": diag.map(|g| json_f64(g.decade_ratio)),
        "partial_sum": {
            "1e3": partial_at_json(&profile, 1_000),
            "1e5": partial_at_json(&profile, 100_000),
            "1e6": partial_at_json(&profile, 1_000_000),
            "t_max": json_f64(profile.partial_at(profile.t_max())),
        },
        "warnings": profile.warnings,
    });
    finish(cfg, "series", summary, report, EXIT_OK, started)
}

/// Lattice points in shifted, scaled neighbourhoods `ℤ^d ∩ (s·Ω_T + x)`.
pub fn run_lemma2(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    cfg.validate()?;
    let space = match parse_subject(&cfg.subject, cfg)? {
        Subject::Subspace(s) => s,
        Subject::Theta(_) => return Err(CliError::Config("lemma2 needs a subspace subject".into())),
    };
    let psi = cfg.lemma_psi;
    let eng = engine(cfg);
    let check_t = cfg.lemma_t.iter().fold(2.0f64, |m, &t| m.max(t)).ceil() as u64;

    let result = with_pool(cfg.parallelism, || -> Result<_, CliError> {
        let (table, budget) = table_or_partial(&eng, &Subject::Subspace(space.clone()), cfg, check_t)?;
        if let Some(b) = budget {
            return Err(CliError::Budget(b));
        }
        if let Some(r) = table.records.iter().find(|r| r.value < psi.eval(r.t as f64)) {
            return Err(CliError::PsiNotValid(format!(
                "record at t = {} has value {} < psi(t) = {}",
                r.t,
                r.value,
                psi.eval(r.t as f64)
            )));
        }
        let mut rows = Vec::new();
        for &t in &cfg.lemma_t {
            let counts: Vec<Result<usize, EngineError>> = map_indexed(cfg.shift_count, |i| {
                let shift = sample_shift(space.ambient_dim(), cfg.seed ^ i as u64);
                eng.omega_lattice_points(&space, &psi, t, &shift, cfg.lemma_scale).map(|p| p.len())
            });
            for (i, c) in counts.into_iter().enumerate() {
                rows.push((t, i, c.map_err(|e| CliError::Budget(e.to_string()))?));
            }
        }
        let origin = vec![0.0; space.ambient_dim()];
        let mut diagnostic = Vec::new();
        for &t in &cfg.lemma_t {
            let pts = eng.omega_lattice_points(&space, &psi, t, &origin, 1.0).map_err(|e| CliError::Budget(e.to_string()))?;
            diagnostic.push((t, pts));
        }
        Ok((rows, diagnostic))
    })?;
    let (rows, diagnostic) = result?;

    let mut csv = create_csv(&cfg.output_dir, "lemma2.csv", "lemma2", &["T", "shift_id", "count"])?;
    for (t, i, c) in &rows {
        csv.write_record([t.to_string(), i.to_string(), c.to_string()])?;
    }
    csv.flush()?;

    let max_count = rows.iter().map(|r| r.2).max().unwrap_or(0);
    let origin_only = diagnostic.iter().all(|(_, pts)| pts.len() == 1 && pts[0].iter().all(|&x| x == 0));
    let pass = max_count <= 1;
    let mut report = format!(
        "{} shifts x {} values of T at scale {}: max lattice count {max_count}\n",
        cfg.shift_count,
        cfg.lemma_t.len(),
        cfg.lemma_scale
    );
    for (t, pts) in &diagnostic {
        report += &format!("scale 1, shift 0, T = {t}: {} lattice point(s)\n", pts.len());
    }
    report += &format!("verdict: {}\n", if pass { "PASS" } else { "FAIL" });
    let summary = json!({
        "max_count": max_count,
        "origin_only_at_scale_1": origin_only,
        "diagnostic": diagnostic.iter().map(|(t, pts)| json!({ "T": t, "points": pts })).collect::<Vec<_>>(),
        "verdict": if pass { "PASS" } else { "FAIL" },
    });
    finish(cfg, "lemma2", summary, report, if pass { EXIT_OK } else { EXIT_BELOW_THRESHOLD }, started)
}
