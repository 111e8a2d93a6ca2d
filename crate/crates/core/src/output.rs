//! Serialization: fixed-precision float text, CSV and JSON writers for every
//! artifact the CLI emits, and atomic file writes.
//!
//! Floats are always written with 17 significant digits so parsing the text
//! back recovers the exact bit pattern; absent values become empty CSV cells
//! or JSON nulls, never a placeholder number.

use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::bounds::BoundComparison;
use crate::error::{Error, Result};
use crate::estimator::{EstimateReport, MeasurementCounts, ShotRecord};
use crate::pauli::PauliObservable;
use crate::sweeps::{SweepGrid, SweepKind, SweepPoint, TightnessRatios};

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Serialize as JSON with every float at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    struct Precise17;
    impl serde_json::ser::Formatter for Precise17 {
        fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
        where
            W: ?Sized + std::io::Write,
        {
            write!(writer, "{value:.16e}")
        }
    }
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise17);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

/// Write through a temporary file in the destination directory plus a
/// rename, so a crash mid-write never leaves a partial file at `path`.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

const SWEEP_COLUMNS: &str = "gamma,theta,phi,M,lhs_sum_std,lhs_sum_var,rhs_eq14,rhs_eq3,rhs_eq4,rhs_eq5,t1,t2,t3,t4";

fn sweep_header(kind: SweepKind) -> String {
    match kind {
        SweepKind::Fig3 => format!("{SWEEP_COLUMNS},L_new,L_SUR"),
        _ => SWEEP_COLUMNS.to_string(),
    }
}

pub fn sweep_to_csv(grid: &SweepGrid) -> String {
    let mut out = String::new();
    out.push_str(&sweep_header(grid.kind));
    out.push('\n');
    for p in &grid.points {
        let base = [
            fmt_f64(p.gamma),
            fmt_f64(p.theta),
            fmt_f64(p.phi),
            fmt_f64(p.mixedness),
            fmt_f64(p.lhs_sum_std),
            fmt_f64(p.lhs_sum_var),
            fmt_f64(p.rhs_eq14),
            fmt_opt(p.rhs_eq3),
            fmt_opt(p.rhs_eq4),
            fmt_opt(p.rhs_eq5),
            fmt_opt(p.ratios.t1),
            fmt_opt(p.ratios.t2),
            fmt_opt(p.ratios.t3),
            fmt_opt(p.ratios.t4),
        ];
        out.push_str(&base.join(","));
        if grid.kind == SweepKind::Fig3 {
            out.push(',');
            out.push_str(&fmt_opt(p.l_new));
            out.push(',');
            out.push_str(&fmt_opt(p.l_sur));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonAxis<'a> {
    name: &'a str,
    min: f64,
    max: f64,
    steps: usize,
}

#[derive(Serialize)]
struct JsonPoint {
    gamma: f64,
    theta: f64,
    phi: f64,
    #[serde(rename = "M")]
    m: f64,
    lhs_sum_std: f64,
    lhs_sum_var: f64,
    rhs_eq14: f64,
    rhs_eq3: Option<f64>,
    rhs_eq4: Option<f64>,
    rhs_eq5: Option<f64>,
    t1: Option<f64>,
    t2: Option<f64>,
    t3: Option<f64>,
    t4: Option<f64>,
    #[serde(rename = "L_new", skip_serializing_if = "Option::is_none")]
    l_new: Option<f64>,
    #[serde(rename = "L_SUR", skip_serializing_if = "Option::is_none")]
    l_sur: Option<f64>,
}

#[derive(Serialize)]
struct JsonGrid<'a> {
    kind: &'a str,
    axes: Vec<JsonAxis<'a>>,
    points: Vec<JsonPoint>,
}

fn json_point(p: &SweepPoint) -> JsonPoint {
    JsonPoint {
        gamma: p.gamma,
        theta: p.theta,
        phi: p.phi,
        m: p.mixedness,
        lhs_sum_std: p.lhs_sum_std,
        lhs_sum_var: p.lhs_sum_var,
        rhs_eq14: p.rhs_eq14,
        rhs_eq3: p.rhs_eq3,
        rhs_eq4: p.rhs_eq4,
        rhs_eq5: p.rhs_eq5,
        t1: p.ratios.t1,
        t2: p.ratios.t2,
        t3: p.ratios.t3,
        t4: p.ratios.t4,
        l_new: p.l_new,
        l_sur: p.l_sur,
    }
}

pub fn sweep_to_json(grid: &SweepGrid) -> String {
    let doc = JsonGrid {
        kind: grid.kind.name(),
        axes: grid
            .axes
            .iter()
            .map(|a| JsonAxis {
                name: a.name,
                min: a.min,
                max: a.max,
                steps: a.steps,
            })
            .collect(),
        points: grid.points.iter().map(json_point).collect(),
    };
    to_json(&doc)
}

/// (label, value) rows of a comparison, in fixed order. The row set is the
/// stable schema shared by the text table, CSV, and JSON renderings.
fn comparison_rows(
    cmp: &BoundComparison,
    ratios: &TightnessRatios,
) -> Vec<(&'static str, Option<f64>)> {
    vec![
        ("lhs_sum_stddev", Some(cmp.lhs_sum_stddev)),
        ("lhs_sum_variance", Some(cmp.lhs_sum_variance)),
        ("lhs_variance_product", cmp.lhs_variance_product),
        ("equality_rhs", Some(cmp.equality_rhs)),
        ("inequality_rhs", Some(cmp.inequality_rhs)),
        ("sur_bound", cmp.sur),
        ("maccone_pati_bound", cmp.maccone_pati),
        ("triple_bound_sum", cmp.triple_sum),
        ("triple_bound_commutators", cmp.triple_commutators),
        ("n_observable_bound", cmp.n_observable),
        ("t1", ratios.t1),
        ("t2", ratios.t2),
        ("t3", ratios.t3),
        ("t4", ratios.t4),
    ]
}

/// Human-oriented table for standard output; inapplicable rows read "n/a".
pub fn comparison_table(cmp: &BoundComparison, ratios: &TightnessRatios) -> String {
    let mut out = format!("observables{:>15}\n", cmp.observable_count);
    for (label, value) in comparison_rows(cmp, ratios) {
        let rendered = value.map(fmt_f64).unwrap_or_else(|| "n/a".to_string());
        out.push_str(&format!("{label:<26}{rendered}\n"));
    }
    out
}

pub fn comparison_to_csv(cmp: &BoundComparison, ratios: &TightnessRatios) -> String {
    let mut out = String::from("quantity,value\n");
    out.push_str(&format!("observables,{}\n", cmp.observable_count));
    for (label, value) in comparison_rows(cmp, ratios) {
        out.push_str(&format!("{label},{}\n", fmt_opt(value)));
    }
    out
}

pub fn comparison_to_json(cmp: &BoundComparison, ratios: &TightnessRatios) -> String {
    #[derive(Serialize)]
    struct Doc {
        observables: usize,
        lhs_sum_stddev: f64,
        lhs_sum_variance: f64,
        lhs_variance_product: Option<f64>,
        equality_rhs: f64,
        inequality_rhs: f64,
        sur_bound: Option<f64>,
        maccone_pati_bound: Option<f64>,
        triple_bound_sum: Option<f64>,
        triple_bound_commutators: Option<f64>,
        n_observable_bound: Option<f64>,
        t1: Option<f64>,
        t2: Option<f64>,
        t3: Option<f64>,
        t4: Option<f64>,
    }
    to_json(&Doc {
        observables: cmp.observable_count,
        lhs_sum_stddev: cmp.lhs_sum_stddev,
        lhs_sum_variance: cmp.lhs_sum_variance,
        lhs_variance_product: cmp.lhs_variance_product,
        equality_rhs: cmp.equality_rhs,
        inequality_rhs: cmp.inequality_rhs,
        sur_bound: cmp.sur,
        maccone_pati_bound: cmp.maccone_pati,
        triple_bound_sum: cmp.triple_sum,
        triple_bound_commutators: cmp.triple_commutators,
        n_observable_bound: cmp.n_observable,
        t1: ratios.t1,
        t2: ratios.t2,
        t3: ratios.t3,
        t4: ratios.t4,
    })
}

#[derive(Serialize)]
struct ReportDoc {
    m_hat: f64,
    interval_low: f64,
    interval_high: f64,
    clamped: bool,
    shots_per_setting: u64,
    resamples: u32,
    true_m: Option<f64>,
}

impl From<&EstimateReport> for ReportDoc {
    fn from(r: &EstimateReport) -> Self {
        ReportDoc {
            m_hat: r.m_hat,
            interval_low: r.interval_low,
            interval_high: r.interval_high,
            clamped: r.clamped,
            shots_per_setting: r.shots_per_setting,
            resamples: r.resamples,
            true_m: r.true_m,
        }
    }
}

pub fn report_to_json(report: &EstimateReport) -> String {
    to_json(&ReportDoc::from(report))
}

pub fn report_to_csv(report: &EstimateReport) -> String {
    format!(
        "m_hat,interval_low,interval_high,clamped,shots_per_setting,resamples,true_m\n{},{},{},{},{},{},{}\n",
        fmt_f64(report.m_hat),
        fmt_f64(report.interval_low),
        fmt_f64(report.interval_high),
        report.clamped,
        report.shots_per_setting,
        report.resamples,
        fmt_opt(report.true_m),
    )
}

/// Standard-output rendering of an estimate.
pub fn report_text(report: &EstimateReport) -> String {
    let mut out = format!(
        "m_hat             {}\ninterval_95       [{}, {}]\nclamped           {}\nshots_per_setting {}\nresamples         {}\n",
        fmt_f64(report.m_hat),
        fmt_f64(report.interval_low),
        fmt_f64(report.interval_high),
        report.clamped,
        report.shots_per_setting,
        report.resamples,
    );
    if let Some(m) = report.true_m {
        out.push_str(&format!("true_m            {}  (simulated state)\n", fmt_f64(m)));
        out.push_str(&format!("abs_error         {}\n", fmt_f64((report.m_hat - m).abs())));
    }
    out
}

const COUNTS_HEADER: &str = "a1,a2,a3,a4,shots,count_plus,count_minus";

/// Counts as CSV, four rows in plan order (A, B, A+B, cross).
pub fn counts_to_csv(counts: &MeasurementCounts) -> String {
    let mut out = String::from(COUNTS_HEADER);
    out.push('\n');
    for rec in counts.records() {
        let [a1, a2, a3, a4] = rec.observable().coefficients();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(a1),
            fmt_f64(a2),
            fmt_f64(a3),
            fmt_f64(a4),
            rec.shots(),
            rec.count_plus(),
            rec.count_minus(),
        ));
    }
    out
}

fn parse_counts_row(line: &str, row: usize) -> Result<ShotRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 7 {
        return Err(Error::BadShotRecord {
            reason: format!("row {row}: expected 7 fields, got {}", fields.len()),
        });
    }
    let num = |idx: usize| -> Result<f64> {
        fields[idx].trim().parse().map_err(|_| Error::BadShotRecord {
            reason: format!("row {row}: field {} is not a number", idx + 1),
        })
    };
    let int = |idx: usize| -> Result<u64> {
        fields[idx].trim().parse().map_err(|_| Error::BadShotRecord {
            reason: format!("row {row}: field {} is not a nonnegative integer", idx + 1),
        })
    };
    let obs = PauliObservable::new(num(0)?, num(1)?, num(2)?, num(3)?)?;
    let (shots, plus, minus) = (int(4)?, int(5)?, int(6)?);
    if plus + minus != shots {
        return Err(Error::BadShotRecord {
            reason: format!("row {row}: count_plus + count_minus != shots"),
        });
    }
    ShotRecord::new(obs, plus, minus)
}

/// Parse a counts file back into validated plan counts.
pub fn counts_from_csv(text: &str) -> Result<MeasurementCounts> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == COUNTS_HEADER => {}
        _ => {
            return Err(Error::BadShotRecord {
                reason: format!("first line must be the header '{COUNTS_HEADER}'"),
            })
        }
    }
    let rows: Vec<&str> = lines.collect();
    if rows.len() != 4 {
        return Err(Error::BadShotRecord {
            reason: format!("expected 4 data rows (A, B, A+B, cross), got {}", rows.len()),
        });
    }
    let records = [
        parse_counts_row(rows[0], 1)?,
        parse_counts_row(rows[1], 2)?,
        parse_counts_row(rows[2], 3)?,
        parse_counts_row(rows[3], 4)?,
    ];
    MeasurementCounts::from_records(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{collect_counts, MeasurementPlan};
    use crate::pauli::BlochState;
    use crate::sweeps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seventeen_digit_floats_round_trip_exactly() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e17,
            1e-300,
            0.0,
            0.32,
            std::f64::consts::PI,
            f64::MIN_POSITIVE,
        ] {
            let text = fmt_f64(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(x.to_bits(), back.to_bits(), "{text}");
        }
    }

    #[test]
    fn json_floats_round_trip_exactly() {
        #[derive(Serialize)]
        struct Probe {
            x: f64,
        }
        let text = to_json(&Probe { x: 1.0 / 3.0 });
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["x"].as_f64().unwrap().to_bits(), (1.0 / 3.0f64).to_bits());
    }

    #[test]
    fn sweep_csv_has_the_documented_schema() {
        let grid = sweeps::sweep_fig1(0.5, 3, 3).unwrap();
        let csv = sweep_to_csv(&grid);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS);
        assert_eq!(csv.lines().count(), 1 + 9);
        // No trailing commas, no placeholder values.
        assert!(!csv.contains("NaN") && !csv.contains("inf"));

        let grid = sweeps::sweep_fig3(3).unwrap();
        let csv = sweep_to_csv(&grid);
        assert!(csv.lines().next().unwrap().ends_with(",L_new,L_SUR"));
    }

    #[test]
    fn undefined_ratios_are_empty_cells_and_nulls() {
        // The completely mixed endpoint of a fig2 sweep has no t3.
        let grid = sweeps::sweep_fig2(0.3, 0.7, 3).unwrap();
        let csv = sweep_to_csv(&grid);
        let last = csv.lines().last().unwrap();
        let cells: Vec<&str> = last.split(',').collect();
        assert_eq!(cells.len(), 14);
        assert_eq!(cells[12], "", "t3 cell should be empty: {last}");

        let json = sweep_to_json(&grid);
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        let points = doc["points"].as_array().unwrap();
        assert!(points.last().unwrap()["t3"].is_null());
        // fig2 points carry no closed-form columns at all.
        assert!(points[0].get("L_new").is_none());
        assert_eq!(doc["kind"], "fig2");
        assert_eq!(doc["axes"][0]["name"], "M");
    }

    #[test]
    fn counts_csv_round_trips() {
        let plan = MeasurementPlan::new(
            &PauliObservable::new(1.0 / 3.0, 0.0, 0.25, -0.5).unwrap(),
            &PauliObservable::SIGMA_Y,
        )
        .unwrap();
        let state = BlochState::new(0.3, -0.1, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let counts = collect_counts(&plan, &state, 5000, &mut rng).unwrap();
        let csv = counts_to_csv(&counts);
        let back = counts_from_csv(&csv).unwrap();
        for (orig, echoed) in counts.records().iter().zip(back.records()) {
            assert_eq!(orig.count_plus(), echoed.count_plus());
            assert_eq!(orig.shots(), echoed.shots());
            assert_eq!(orig.observable().coefficients(), echoed.observable().coefficients());
        }
    }

    #[test]
    fn counts_csv_rejects_malformed_input() {
        assert!(counts_from_csv("nonsense\n1,2,3\n").is_err());
        // Header fine, but counts do not add up.
        let bad = format!("{COUNTS_HEADER}\n1,0,0,0,100,60,50\n");
        assert!(counts_from_csv(&bad).is_err());
        // Too few rows.
        let short = format!("{COUNTS_HEADER}\n1,0,0,0,100,60,40\n");
        assert!(counts_from_csv(&short).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "first\n").unwrap();
        write_atomic(&path, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        // Only the destination file remains; no temp files left behind.
        let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(entries.len(), 1);
    }
}
