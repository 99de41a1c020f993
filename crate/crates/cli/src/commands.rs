use std::path::Path;

use divfilt::asymptotics::{
    default_remainder_slope, empirical_scan, limit_exists_report, scan_summary, ExampleModel,
    PrintedClaims, SCAN_DIGITS,
};
use divfilt::beatty::{two_values_hold, BeattySequence};
use divfilt::intersection::{example_form, IntersectionForm};
use divfilt::monomial::{check_filtration, ideal_records, SigmaFiltration};
use divfilt::picard::{curve_from_json, default_instance, qn_report};
use divfilt::quadfield::{
    example_alpha, format_rational, parse_rational, quad_from_json, QuadExt, Radicand, Rational,
    MAX_DECIMAL_DIGITS,
};
use serde_json::{json, Value};

use crate::{config, ingest, read_input, to_json, AlphaArgs, Failure, Outcome};

/// Largest `K` accepted by `quad-eval --powers`.
const MAX_POWERS: u32 = 256;

/// Largest `n` accepted by the scanning commands.
const MAX_SCAN: u64 = 1 << 40;

/// Largest `n` accepted by `elliptic-qn`; heights grow like `n^2`.
const MAX_QN: u64 = 5000;

fn positive(name: &str, v: u64) -> Outcome<u64> {
    if v == 0 {
        return Err(Failure::Config(format!("--{name} must be positive")));
    }
    Ok(v)
}

fn at_most(name: &str, v: u64, max: u64) -> Outcome<u64> {
    if v > max {
        return Err(Failure::Config(format!("--{name} must be at most {max}, got {v}")));
    }
    positive(name, v)
}

/// Parses `a,b,d`.
fn parse_alpha_triple(s: &str) -> Outcome<QuadExt> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, d] = parts[..] else {
        return Err(Failure::Config(format!("--alpha expects a,b,d, got {s:?}")));
    };
    let a = parse_rational(a).map_err(config)?;
    let b = parse_rational(b).map_err(config)?;
    let d: u64 = d.parse().map_err(|_| Failure::Config(format!("radicand {d:?} is not an integer")))?;
    Ok(QuadExt::new(a, b, Radicand::new(d).map_err(config)?))
}

fn resolve_alpha(args: &AlphaArgs) -> Outcome<QuadExt> {
    if let Some(s) = &args.alpha {
        return parse_alpha_triple(s);
    }
    if let Some(path) = &args.alpha_file {
        return quad_from_json(&read_input(path)?).map_err(ingest);
    }
    Ok(example_alpha())
}

fn load_form(table: Option<&Path>) -> Outcome<IntersectionForm> {
    match table {
        Some(path) => IntersectionForm::from_json(&read_input(path)?).map_err(ingest),
        None => Ok(example_form()),
    }
}

fn remainder_slope(s: Option<&str>) -> Outcome<Rational> {
    s.map_or_else(|| Ok(default_remainder_slope()), |s| parse_rational(s).map_err(config))
}

/// Builds the length model. Problems that come from a table file are
/// ingestion errors; an unusable `alpha` or slope is a config error.
fn build_model(alpha: &AlphaArgs, table: Option<&Path>, slope: Option<&str>) -> Outcome<ExampleModel> {
    let alpha = resolve_alpha(alpha)?;
    let slope = remainder_slope(slope)?;
    let form = load_form(table)?;
    let model = ExampleModel::from_form(&form, alpha.clone(), slope).map_err(|e| match table {
        Some(_) if !matches!(e, divfilt::asymptotics::AsymptoticsError::AlphaOutOfRange(_)) => ingest(e),
        _ => config(e),
    })?;
    Ok(if alpha == example_alpha() { model.with_printed_claims(PrintedClaims::example()) } else { model })
}

pub fn quad_eval(args: &AlphaArgs, digits: usize, powers: u32) -> Outcome<Value> {
    let alpha = resolve_alpha(args)?;
    at_most("digits", digits as u64, MAX_DECIMAL_DIGITS as u64)?;
    if powers > MAX_POWERS {
        return Err(Failure::Config(format!("--powers must be at most {MAX_POWERS}")));
    }
    let minimal: Vec<String> = alpha.minimal_polynomial().iter().map(ToString::to_string).collect();
    let powers: Vec<Value> = (1..=powers)
        .map(|k| json!({ "k": k, "value": to_json(&alpha.pow(k)) }))
        .collect();
    Ok(json!({
        "value": to_json(&alpha),
        "decimal": alpha.to_decimal(digits).map_err(config)?,
        "conj": to_json(&alpha.conj()),
        "norm": format_rational(&alpha.norm()),
        "trace": format_rational(&alpha.trace()),
        "floor": alpha.floor().to_string(),
        "ceil": alpha.ceil().to_string(),
        "sign": alpha.sign(),
        "minimal_polynomial": minimal,
        "powers": powers,
        "audit_flags": Vec::<String>::new(),
    }))
}

pub fn beatty_scan(args: &AlphaArgs, n_max: u64, bins: u64, window_max: u64) -> Outcome<Value> {
    let alpha = resolve_alpha(args)?;
    at_most("n-max", n_max, MAX_SCAN)?;
    at_most("window-max", window_max, MAX_SCAN)?;
    let seq = BeattySequence::new(alpha.clone()).map_err(config)?;
    let report = seq.equidistribution_histogram(n_max, bins).map_err(config)?;
    let checked = n_max.min(window_max);
    let windows = seq.check_windows(checked);
    let two_values = two_values_hold(&seq, checked);
    let telescoping = seq.telescoping_holds(checked);

    // Exact discrepancy: the count of sigma = ceil(alpha) differs from
    // n_max {alpha} by less than 2.
    let diff = QuadExt::from_rational(report.sigma2_density.clone(), alpha.radicand()) - alpha.fract();
    let error = if diff.sign() < 0 { -diff } else { diff };
    let tolerance = QuadExt::from_rational(Rational::new(2.into(), 1000.into()), alpha.radicand());
    let discrepancy_ok = error.scale(&Rational::from_integer(n_max.into()))
        < QuadExt::from_integer(2, alpha.radicand());

    let mut flags = Vec::new();
    if !two_values {
        flags.push(format!("two_values: sigma leaves {{floor, ceil}} of alpha below {checked}"));
    }
    if let Some(start) = windows.first_violation {
        flags.push(format!("windows: [{start}, {start} + {}) misses a value", windows.window));
    }
    if !telescoping {
        flags.push(format!("telescoping: partial sum up to {checked} is off"));
    }
    if !discrepancy_ok {
        flags.push("discrepancy: |count - n_max {alpha}| >= 2".to_string());
    }
    Ok(json!({
        "alpha": to_json(&alpha),
        "partition": to_json(&report),
        "checked_up_to": checked,
        "windows": to_json(&windows),
        "two_values": two_values,
        "telescoping": telescoping,
        "density_error": to_json(&error),
        "density_within_2e-3": error <= tolerance,
        "audit_flags": flags,
    }))
}

pub fn example_limits(args: &AlphaArgs, table: Option<&Path>, slope: Option<&str>) -> Outcome<Value> {
    let model = build_model(args, table, slope)?;
    Ok(to_json(&limit_exists_report(&model)))
}

pub struct ScanOutput {
    pub csv: String,
    pub summary: Value,
}

pub fn example_scan(
    args: &AlphaArgs,
    table: Option<&Path>,
    n_max: u64,
    stride: u64,
    slope: Option<&str>,
) -> Outcome<ScanOutput> {
    let model = build_model(args, table, slope)?;
    at_most("n-max", n_max, MAX_SCAN)?;
    positive("stride", stride)?;
    let scan = empirical_scan(&model, n_max, stride).map_err(config)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["n", "sigma", "ceil_alpha_n", "delta_exact", "delta_over_n2_decimal"])
        .map_err(config)?;
    for row in &scan.rows {
        writer
            .write_record([
                row.n.to_string(),
                row.sigma.to_string(),
                row.ceil_alpha_n.to_string(),
                format_rational(&row.delta),
                row.delta_over_n2_decimal(),
            ])
            .map_err(config)?;
    }
    let bytes = writer.into_inner().map_err(config)?;
    let csv = String::from_utf8(bytes).expect("csv output is UTF-8");
    let mut summary = to_json(&scan_summary(&model, &scan));
    summary["stride"] = json!(stride);
    summary["decimal_digits"] = json!(SCAN_DIGITS);
    Ok(ScanOutput { csv, summary })
}

pub fn monomial_check(sigma: &Path, n_max: u64, grid_max: u64) -> Outcome<Value> {
    let f = SigmaFiltration::from_json(&read_input(sigma)?).map_err(ingest)?;
    positive("n-max", n_max)?;
    positive("grid-max", grid_max)?;
    if n_max > f.len() {
        return Err(Failure::Config(format!(
            "--n-max {n_max} exceeds the {} tabulated sigma values",
            f.len()
        )));
    }
    let records = ideal_records(&f, n_max).map_err(config)?;
    let check = check_filtration(&f, n_max.min(grid_max)).map_err(config)?;
    let mut flags = Vec::new();
    let mismatches: Vec<u64> = records
        .iter()
        .filter(|r| Ok(r.count as u64) != f.sigma(r.n).map(|s| s + 2))
        .map(|r| r.n)
        .collect();
    if !mismatches.is_empty() {
        flags.push(format!("generator_count: count != sigma(n) + 2 at n = {mismatches:?}"));
    }
    if let Some((m, n)) = check.counterexamples.first() {
        flags.push(format!(
            "product_containment: I_{m} I_{n} is not inside I_{} ({} pairs fail)",
            m + n,
            check.counterexamples.len()
        ));
    }
    Ok(json!({
        "n_max": n_max,
        "records": to_json(&records),
        "check": to_json(&check),
        "audit_flags": flags,
    }))
}

pub fn elliptic_qn(curve: Option<&Path>, n_max: u64, bound: u64, restriction_max: u64) -> Outcome<Value> {
    let input = match curve {
        Some(path) => curve_from_json(&read_input(path)?).map_err(ingest)?,
        None => default_instance(),
    };
    at_most("n-max", n_max, MAX_QN)?;
    at_most("bound", bound, 1000)?;
    at_most("restriction-max", restriction_max, MAX_QN)?;
    let report = qn_report(&input.curve, &input.p, &input.q, n_max, bound, restriction_max)
        .map_err(|e| if curve.is_some() { ingest(e) } else { config(e) })?;
    Ok(to_json(&report))
}
