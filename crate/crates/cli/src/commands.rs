use std::io::{self, Write};

use rug::Float;

use polycoef::compositions::{a_knq, a_kq, b_knq, b_kq_row, enumerate_oracle, PartConstraint};
use polycoef::real::to_decimal;
use polycoef::saddle::{log_nat, Lemma33Report};
use polycoef::unimodality::UnimodalityReport;
use polycoef::{
    approx_root, baseline_estimate, binomial, check_identities, coeff, coeff_altsum, coeff_quadrature,
    coeff_row, conjecture_scan, corollary35_estimate, hayman_estimate, lemma33_bound_check, or_scan,
    solve_saddle, ApproxVariant, BaselineKind, Estimate, Nat, Precision, Real,
};

use crate::output::{open_sink, Cell, Format, Report, TableWriter};
use crate::{Command, Engine, RunConfig, ScanKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DISAGREEMENT: u8 = 2;
pub const EXIT_ASSERTION: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<polycoef::Error> for Failure {
    fn from(err: polycoef::Error) -> Self {
        Failure::usage(err.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::usage(format!("i/o: {err}"))
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(command: Command, config: &RunConfig) -> Outcome {
    match command {
        Command::Coeff { n, q, k, engine } => cmd_coeff(config, n, q, k, engine),
        Command::Row { n, q } => cmd_row(config, n, q),
        Command::Identities { n, q, n_max, q_max } => cmd_identities(config, n, q, n_max, q_max),
        Command::Estimate { n, q, c, kind, check } => cmd_estimate(config, n, q, c, &kind, check),
        Command::Root { q, c, bound_check, compare_approx } => {
            cmd_root(config, q, c, bound_check, compare_approx)
        }
        Command::Scan { kind: ScanKind::Conjecture, c, n_min, n_max, .. } => {
            let n_max = n_max.ok_or_else(|| Failure::usage("scan --kind conjecture needs --n-max"))?;
            cmd_scan_conjecture(config, c, n_min, n_max)
        }
        Command::Scan { kind: ScanKind::Or, k_min, k_max, .. } => {
            let k_max = k_max.ok_or_else(|| Failure::usage("scan --kind or needs --k-max"))?;
            cmd_scan_or(config, k_min, k_max)
        }
        Command::Oracle { k, n, max_part, largest } => {
            let constraint = match (max_part, largest) {
                (Some(q), None) => PartConstraint::MaxPart(q),
                (None, Some(q)) => PartConstraint::ExactLargest(q),
                _ => return Err(Failure::usage("give exactly one of --max-part and --largest")),
            };
            cmd_oracle(config, k, n, constraint)
        }
    }
}

fn sink(config: &RunConfig) -> io::Result<Box<dyn Write>> {
    open_sink(config.output.as_deref())
}

fn decimal(x: &Real, prec: Precision) -> Cell {
    Cell::Text(to_decimal(x, prec.decimal_digits()))
}

fn big(x: &Nat) -> Cell {
    Cell::Big(x.to_string())
}

fn cmd_coeff(config: &RunConfig, n: u32, q: u32, k: i64, engine: Engine) -> Outcome {
    if q == 0 {
        return Err(Failure::usage("coeff requires q >= 1"));
    }
    let prec = config.precision;
    let format = config.format.unwrap_or(Format::Pretty);
    let dp = || coeff(n, q, k);
    let altsum = || u64::try_from(k).map(|k| coeff_altsum(n, q, k)).unwrap_or_default();
    let quadrature = || -> polycoef::Result<Real> {
        let k = u64::try_from(k).map_err(|_| polycoef::Error::Domain("quadrature requires k >= 0".into()))?;
        coeff_quadrature(n, q, k, prec)
    };

    let single = match engine {
        Engine::Dp => Some(big(&dp())),
        Engine::Altsum => Some(big(&altsum())),
        Engine::Quadrature => Some(decimal(&quadrature()?, prec)),
        Engine::All => None,
    };
    let mut report = Report::new();
    report.put("n", Cell::Int(n.into())).put("q", Cell::Int(q.into())).put("k", Cell::Signed(k));
    if let Some(value) = single {
        if format == Format::Pretty {
            let mut out = sink(config)?;
            match value {
                Cell::Big(s) | Cell::Text(s) => writeln!(out, "{s}")?,
                _ => unreachable!(),
            }
            out.flush()?;
            return Ok(EXIT_OK);
        }
        report.put("value", value);
        report.write(format, sink(config)?)?;
        return Ok(EXIT_OK);
    }

    let exact = dp();
    let alt = altsum();
    let mut agree = exact == alt;
    report.put("dp", big(&exact)).put("altsum", big(&alt));
    match quadrature() {
        Ok(value) => {
            let reference = Float::with_val(value.prec(), &exact);
            let err = Float::with_val(value.prec(), &value - &reference).abs();
            let scale = if reference > 1 { reference } else { Float::with_val(value.prec(), 1) };
            agree &= err / scale <= 1e-6;
            report.put("quadrature", decimal(&value, prec));
        }
        Err(e) => {
            report.text("quadrature", format!("skipped ({e})"));
        }
    }
    report.put("match", Cell::Bool(agree));
    report.write(format, sink(config)?)?;
    Ok(if agree { EXIT_OK } else { EXIT_DISAGREEMENT })
}

fn cmd_row(config: &RunConfig, n: u32, q: u32) -> Outcome {
    let row = coeff_row(n, q)?;
    let mut table =
        TableWriter::new(config.format.unwrap_or(Format::Csv), vec!["k", "value"], sink(config)?)?;
    for (k, v) in row.coeffs().iter().enumerate() {
        table.row(&[Cell::Int(k as u64), big(v)])?;
    }
    table.finish(&[
        ("n", Cell::Int(n.into())),
        ("q", Cell::Int(q.into())),
        ("degree", Cell::Int(row.degree())),
        ("sum", big(&row.sum())),
    ])?;
    Ok(EXIT_OK)
}

fn cmd_identities(config: &RunConfig, n: Option<u32>, q: Option<u32>, n_max: u32, q_max: u32) -> Outcome {
    let ns = n.map_or(1..=n_max, |n| n..=n);
    let qs = q.map_or(2..=q_max, |q| q..=q);
    let header = vec!["n", "q", "q_term", "three_term", "symmetry", "row_sum", "first_failure"];
    let mut table = TableWriter::new(config.format.unwrap_or(Format::Pretty), header, sink(config)?)?;
    let (mut rows, mut failed) = (0u64, 0u64);
    for n in ns {
        for q in qs.clone() {
            let r = check_identities(n, q)?;
            let failure = match r.first_failure {
                Some((which, Some(k))) => format!("{which} at k={k}"),
                Some((which, None)) => which.to_string(),
                None => String::new(),
            };
            rows += 1;
            failed += u64::from(!r.all_ok());
            table.row(&[
                Cell::Int(n.into()),
                Cell::Int(q.into()),
                Cell::Bool(r.recurrence_ok),
                Cell::Bool(r.three_term_ok),
                Cell::Bool(r.symmetry_ok),
                Cell::Bool(r.row_sum_ok),
                Cell::Text(failure),
            ])?;
        }
    }
    table.finish(&[
        ("rows", Cell::Int(rows)),
        ("failed", Cell::Int(failed)),
        ("all_ok", Cell::Bool(failed == 0)),
    ])?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_ASSERTION })
}

/// Rough big-integer operation count of the exact alternating sum.
fn altsum_cost(n: u64, q: u32, k: u64) -> u64 {
    n.min(k / u64::from(q.max(1))) + 1
}

fn exact_for_check(config: &RunConfig, n: u64, q: u32, k: u64) -> Result<Nat, Failure> {
    let n32 = u32::try_from(n).map_err(|_| Failure::usage("--check requires n to fit in 32 bits"))?;
    let needed = altsum_cost(n, q, k);
    if needed > config.cell_budget.0 {
        return Err(polycoef::Error::ResourceLimit { cell: n, needed, budget: config.cell_budget.0 }.into());
    }
    Ok(coeff_altsum(n32, q, k))
}

fn cmd_estimate(config: &RunConfig, n: u64, q: u32, c: u32, kind: &str, check: bool) -> Outcome {
    let prec = config.precision;
    let mut report = Report::new();
    report.text("kind", kind).put("n", Cell::Int(n));

    let (estimate, exact): (Estimate, Option<Nat>) = match kind.split_once(':').unwrap_or((kind, "")) {
        ("hayman", "") => {
            report.put("q", Cell::Int(q.into())).put("c", Cell::Int(c.into()));
            let e = hayman_estimate(n, q, c, prec)?;
            let exact = check.then(|| exact_for_check(config, n, q, u64::from(c) * n)).transpose()?;
            (e, exact)
        }
        ("cor35", "") => {
            if c != 1 {
                return Err(Failure::usage("the cor35 estimate is only defined for c = 1"));
            }
            report.put("q", Cell::Int(q.into()));
            let e = corollary35_estimate(n, q, prec)?;
            let exact = check.then(|| exact_for_check(config, n, q, n)).transpose()?;
            (e, exact)
        }
        ("trinomial", "") => {
            if q != 3 || c != 1 {
                return Err(Failure::usage("the trinomial estimate is C(n, 3, n): needs q = 3, c = 1"));
            }
            let e = baseline_estimate(&BaselineKind::TrinomialCentral, n, prec)?;
            let exact = check.then(|| exact_for_check(config, n, 3, n)).transpose()?;
            (e, exact)
        }
        ("andre", "") => {
            report.put("q", Cell::Int(q.into()));
            let e = baseline_estimate(&BaselineKind::AndreSup { q }, n, prec)?;
            let center = u64::from(q.saturating_sub(1)) * n / 2;
            let exact = check.then(|| exact_for_check(config, n, q, center)).transpose()?;
            (e, exact)
        }
        ("binomial", frac) if !frac.is_empty() => {
            let parsed =
                Float::parse(frac).map_err(|e| Failure::usage(format!("bad cFrac {frac:?}: {e}")))?;
            let c_frac = Float::with_val(prec.bits(), parsed);
            report.text("c_frac", frac);
            let e = baseline_estimate(&BaselineKind::Binomial { c_frac: c_frac.clone() }, n, prec)?;
            let exact = if check {
                let k = Float::with_val(prec.bits(), &c_frac * n);
                if !k.is_integer() {
                    return Err(Failure::usage("binomial --check requires cFrac * n to be an integer"));
                }
                let k = k.to_integer().expect("finite").to_i64().expect("k fits i64");
                Some(binomial(n, k))
            } else {
                None
            };
            (e, exact)
        }
        _ => {
            return Err(Failure::usage(format!(
                "unknown estimate kind {kind:?}; expected hayman, cor35, trinomial, andre or binomial:<cFrac>"
            )))
        }
    };

    report.put("log_value", decimal(&estimate.log_value, prec));
    report
        .text("value", estimate.linear().map_or_else(|| "unrepresentable".to_string(), |v| format!("{v:e}")));
    if let (Some(lo), Some(hi)) = (&estimate.lower, &estimate.upper) {
        report.put("log_lower", decimal(lo, prec)).put("log_upper", decimal(hi, prec));
    }
    if let Some(exact) = exact {
        if exact == 0 {
            return Err(Failure::usage("the exact coefficient is zero; no ratio"));
        }
        let log_exact = log_nat(&exact, prec.bits());
        report.put("exact", big(&exact)).put("log_exact", decimal(&log_exact, prec));
        report.put("ratio", decimal(&estimate.ratio_to(&exact), prec));
        if let Some(inside) = estimate.envelope_contains(&log_exact) {
            report.put("envelope_contains_exact", Cell::Bool(inside));
        }
    }
    report.write(config.format.unwrap_or(Format::Pretty), sink(config)?)?;
    Ok(EXIT_OK)
}

fn cmd_root(config: &RunConfig, q: u32, c: u32, bound_check: bool, compare_approx: bool) -> Outcome {
    let prec = config.precision;
    if bound_check && c != 1 {
        return Err(Failure::usage("--bound-check applies to the c = 1 root only"));
    }
    let sp = solve_saddle(q, c, prec)?;
    let mut report = Report::new();
    report
        .put("q", Cell::Int(q.into()))
        .put("c", Cell::Int(c.into()))
        .put("r", decimal(&sp.r, prec))
        .put("phi", decimal(&sp.phi, prec))
        .text("residual", format!("{:e}", sp.residual.to_f64()))
        .put("iterations", Cell::Int(sp.iterations.into()));
    if bound_check {
        let b: Lemma33Report = lemma33_bound_check(q, prec)?;
        report
            .put("deviation", decimal(&b.deviation, prec))
            .put("bound", decimal(&b.bound, prec))
            .put("pass", Cell::Bool(b.pass));
        if let Some(refined) = &b.refined {
            report
                .put("refined_lower", decimal(&refined.lower, prec))
                .put("refined_upper", decimal(&refined.upper, prec))
                .put("refined_lower_ok", Cell::Bool(refined.lower_ok))
                .put("refined_upper_ok", Cell::Bool(refined.upper_ok))
                .put("refined_pass", Cell::Bool(refined.pass()));
        }
    }
    if compare_approx {
        for (name, variant) in [("thm12", ApproxVariant::Thm12), ("thm36", ApproxVariant::Thm36)] {
            let approx = approx_root(q, c, variant, prec)?;
            let dev = Float::with_val(prec.bits(), &approx - &sp.r);
            report.put(format!("approx_{name}"), decimal(&approx, prec));
            report.text(format!("deviation_{name}"), format!("{:e}", dev.to_f64()));
        }
    }
    report.write(config.format.unwrap_or(Format::Pretty), sink(config)?)?;
    Ok(EXIT_OK)
}

const SCAN_COLUMNS: [&str; 7] =
    ["q_min", "q_max", "is_unimodal", "argmax", "predicted", "hit_any", "hit_all"];

fn scan_cells(index: u64, q_min: u64, q_max: u64, report: &UnimodalityReport) -> Vec<Cell> {
    let prediction = report.prediction.as_ref().expect("scans attach predictions");
    vec![
        Cell::Int(index),
        Cell::Int(q_min),
        Cell::Int(q_max),
        Cell::Bool(report.is_unimodal),
        Cell::List(report.argmax.clone()),
        Cell::List(prediction.predicted.clone()),
        Cell::Bool(prediction.hit_any),
        Cell::Bool(prediction.hit_all),
    ]
}

fn scan_header(index: &'static str) -> Vec<&'static str> {
    std::iter::once(index).chain(SCAN_COLUMNS).collect()
}

#[derive(Default)]
struct Tally {
    rows: u64,
    unimodal: u64,
    hit_any: u64,
    hit_all: u64,
}

impl Tally {
    fn add(&mut self, report: &UnimodalityReport) {
        let p = report.prediction.as_ref().expect("scans attach predictions");
        self.rows += 1;
        self.unimodal += u64::from(report.is_unimodal);
        self.hit_any += u64::from(p.hit_any);
        self.hit_all += u64::from(p.hit_all);
    }

    fn cells(&self, kind: &str) -> Vec<(&'static str, Cell)> {
        vec![
            ("kind", Cell::Text(kind.to_string())),
            ("rows", Cell::Int(self.rows)),
            ("unimodal", Cell::Int(self.unimodal)),
            ("hit_any", Cell::Int(self.hit_any)),
            ("hit_all", Cell::Int(self.hit_all)),
        ]
    }
}

fn cmd_scan_conjecture(config: &RunConfig, c: u32, n_min: u32, n_max: u32) -> Outcome {
    if n_min > n_max {
        return Err(Failure::usage(format!("--n-min {n_min} exceeds --n-max {n_max}")));
    }
    let rows = conjecture_scan(n_min..=n_max, c, config.cell_budget)?;
    let format = config.format.unwrap_or(Format::Csv);
    let mut table = TableWriter::new(format, scan_header("n"), sink(config)?)?;
    let mut tally = Tally::default();
    for row in &rows {
        tally.add(&row.report);
        table.row(&scan_cells(row.n.into(), row.q_min.into(), row.q_max.into(), &row.report))?;
    }
    let mut summary = tally.cells("conjecture");
    summary.insert(1, ("c", Cell::Int(c.into())));
    table.finish(&summary)?;
    Ok(EXIT_OK)
}

fn cmd_scan_or(config: &RunConfig, k_min: u64, k_max: u64) -> Outcome {
    if k_min > k_max {
        return Err(Failure::usage(format!("--k-min {k_min} exceeds --k-max {k_max}")));
    }
    let rows = or_scan(k_min..=k_max, config.cell_budget, false)?;
    let format = config.format.unwrap_or(Format::Csv);
    let mut table = TableWriter::new(format, scan_header("k"), sink(config)?)?;
    let mut tally = Tally::default();
    let mut violations = 0u64;
    for row in &rows {
        tally.add(&row.report);
        violations += u64::from(!row.holds());
        table.row(&scan_cells(row.k, row.q_min, row.q_max, &row.report))?;
    }
    let mut summary = tally.cells("or");
    summary.push(("violations", Cell::Int(violations)));
    summary.push(("hard_assertions_hold", Cell::Bool(violations == 0)));
    table.finish(&summary)?;
    Ok(if violations == 0 { EXIT_OK } else { EXIT_ASSERTION })
}

fn cmd_oracle(config: &RunConfig, k: u32, n: Option<u32>, constraint: PartConstraint) -> Outcome {
    let enumerated = enumerate_oracle(k, n, constraint)?;
    let k64 = u64::from(k);
    let closed = match (n, constraint) {
        (Some(n), PartConstraint::MaxPart(q)) => b_knq(k64, n, q),
        (Some(n), PartConstraint::ExactLargest(q)) => a_knq(k64, n, q),
        (None, PartConstraint::MaxPart(q)) => b_kq_row(k64, q).swap_remove(k as usize),
        (None, PartConstraint::ExactLargest(q)) => a_kq(k64, q),
    };
    let (label, q) = match constraint {
        PartConstraint::MaxPart(q) => ("max_part", q),
        PartConstraint::ExactLargest(q) => ("largest", q),
    };
    let agree = enumerated == closed;
    let mut report = Report::new();
    report
        .put("k", Cell::Int(k64))
        .text("n", n.map_or_else(|| "any".to_string(), |n| n.to_string()))
        .put(label, Cell::Int(q.into()))
        .put("enumerated", big(&enumerated))
        .put("closed_form", big(&closed))
        .put("match", Cell::Bool(agree));
    report.write(config.format.unwrap_or(Format::Pretty), sink(config)?)?;
    Ok(if agree { EXIT_OK } else { EXIT_DISAGREEMENT })
}
