use pointer_core::sweep::emit::{emit_csv, CSV_PAPER_LITERAL_COLUMNS};
use pointer_core::sweep::run::{analyze_pair, evaluate_point, points, Point};
use pointer_core::sweep::{
    emit, parse_config, Envelope, Family, OutputFormat, Param, RunOptions, RunRecord, SweepSpec, CSV_HEADER,
};
use pointer_core::grid::Grid;
use pointer_core::pointer::{gaussian_post, GaussianParams};

fn run_one(text: &str) -> RunRecord {
    let spec = parse_config(text).unwrap();
    pointer_core::sweep::run_sweep(&spec, RunOptions::default()).unwrap().remove(0)
}

#[test]
fn unit_gaussian_record() {
    let rec = run_one("family = \"gaussian\"\nsigma0 = 1\ng = 1\nt = 1\n");
    let r = rec.report.unwrap();
    assert!((r.m - 0.90484).abs() < 1e-5);
    assert!((r.abs_i - 0.11943).abs() < 1e-5);
    assert!((r.e.unwrap().value - 0.3274).abs() < 1e-4);
    assert!((r.gap - 0.785).abs() < 1e-3);
    assert!(rec.flags.is_empty(), "{:?}", rec.flags);
}

#[test]
fn squeezed_example_is_flagged() {
    let rec = run_one("family = \"squeezed\"\nt = 1e-4\ng = 10\nc = -100\nsigma0 = 1e-4\n");
    let r = rec.report.unwrap();
    assert!(r.m > 0.999 && r.abs_i < 1e-4);
    assert!(rec.has_flag("formally_ideal_operationally_nonideal"));
    assert!(!rec.has_flag("closedform_mismatch"));
}

#[test]
fn faithful_point_is_certified() {
    let rec = run_one("family = \"faithful\"\ntilt = 0\ntheta = 0.3\ns = 1\nenvelope = \"gaussian\"\n");
    let r = rec.report.unwrap();
    assert!(r.gap < 1e-8 && r.is_faithful);
    assert!(rec.has_flag("faithful"));
}

#[test]
fn tilted_faithful_point_has_asymmetric_error_forms() {
    let rec = run_one("family = \"faithful\"\ntilt = 0.2\ntheta = 0.3\ns = 1\n");
    let r = rec.report.unwrap();
    assert!(r.is_faithful);
    assert!(rec.has_flag("e_forms_differ"));
}

#[test]
fn triangular_linear_phase_has_no_closed_form() {
    let rec = run_one("family = \"linear_phase\"\nenvelope = \"triangular\"\nkappa = 1.5\ns = 0.5\n");
    assert!(rec.m_closed.is_none() && rec.abs_i_closed.is_none());
    assert!(rec.report.unwrap().is_faithful);
}

#[test]
fn one_gaussian_record_gives_one_row_of_seventeen_columns() {
    let rec = run_one("family = \"gaussian\"\n");
    let csv = emit(&[rec], None, OutputFormat::Csv, false);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER.join(","));
    assert_eq!(lines[0], "family,sigma0,g,t,C,theta,s,kappa,M_num,absI_num,M_closed,absI_closed,E_num,gap,phase_dev,truncation,flags");
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells.len(), 17);
    assert_eq!(&cells[..8], &["gaussian", "1", "1", "1", "", "", "", ""]);
}

#[test]
fn paper_literal_columns() {
    let rec = run_one("family = \"gaussian\"\nt = 2\n");
    let csv = emit_csv(&[rec], true);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[17..], &CSV_PAPER_LITERAL_COLUMNS);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let literal: f64 = row[17].parse().unwrap();
    assert!((literal - 0.904837).abs() < 1e-5);
    let corrected: f64 = row[10].parse().unwrap();
    assert!((corrected - 0.778801).abs() < 1e-5);
}

#[test]
fn mismatch_flag_reaches_the_flags_column() {
    let spec = SweepSpec::new(Family::Gaussian);
    let pair = gaussian_post(&GaussianParams::new(1.0, 1.0, 1.0).unwrap(), Grid::symmetric(12.0, 4801).unwrap()).unwrap();
    let mut rec = RunRecord::new(Point::new(0, Family::Gaussian, vec![(Param::Sigma0, 1.0), (Param::G, 1.0), (Param::T, 1.0)]));
    rec.m_closed = Some(0.5);
    rec.abs_i_closed = Some(0.119432968);
    analyze_pair(&pair, spec.mass_floor, &spec.qubit, 0, 0, &mut rec).unwrap();
    let csv = emit(&[rec], None, OutputFormat::Csv, false);
    let row = csv.lines().nth(1).unwrap();
    assert!(row.ends_with(",closedform_mismatch"), "{row}");
}

#[test]
fn failures_stay_in_their_row() {
    let text = "family = \"gaussian\"\ng.start = 0\ng.stop = 4\ng.count = 3\nt = 2\ngrid.x_min = -10\ngrid.x_max = 10\ngrid.n = 2001\n";
    let spec = parse_config(text).unwrap();
    let recs = pointer_core::sweep::run_sweep(&spec, RunOptions { workers: 2, strict_window: true }).unwrap();
    assert_eq!(recs.len(), 3);
    assert!(!recs[0].failed());
    assert!(recs[2].failed() && recs[2].has_flag("error:window_too_small"));
    let csv = emit(&recs, Some(&spec), OutputFormat::Csv, false);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(3).unwrap().contains("NaN"));
}

#[test]
fn json_document_shape() {
    let spec = parse_config("family = \"linear_phase\"\nenvelope = \"triangular\"\nkappa = 0.5\nseed = 9\n").unwrap();
    let recs = pointer_core::sweep::run_sweep(&spec, RunOptions::default()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&emit(&recs, Some(&spec), OutputFormat::Json, false)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["spec"]["family"], "linear_phase");
    assert_eq!(doc["spec"]["envelope"], "triangular");
    assert_eq!(doc["spec"]["seed"], 9);
    let rec = &doc["records"][0];
    for key in CSV_HEADER.iter().filter(|k| **k != "family") {
        assert!(rec.get(*key).is_some(), "missing {key}");
    }
    assert!(rec["g"].is_null() && rec["M_closed"].is_null());
    assert_eq!(rec["flags"], "faithful");
}

#[test]
fn explicit_points_use_spec_envelope() {
    let mut spec = SweepSpec::new(Family::Faithful);
    spec.envelope = Envelope::Triangular;
    spec.set(Param::Sigma0, 2.0).unwrap();
    let point = points(&spec).remove(0);
    let rec = evaluate_point(&spec, point, RunOptions { workers: 1, strict_window: true });
    assert!(rec.report.unwrap().is_faithful);
}
