//! CSV and JSON output. Numbers are written with 12 significant digits, so
//! output is byte-identical for identical inputs.

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{Family, OutputFormat, Param, SweepSpec};
use super::run::RunRecord;

pub const CSV_HEADER: [&str; 17] = [
    "family", "sigma0", "g", "t", "C", "theta", "s", "kappa", "M_num", "absI_num", "M_closed", "absI_closed",
    "E_num", "gap", "phase_dev", "truncation", "flags",
];
pub const CSV_PAPER_LITERAL_COLUMNS: [&str; 2] = ["M_closed_paper_literal", "absI_closed_paper_literal"];
pub const JSON_SCHEMA_VERSION: u32 = 1;

const CSV_PARAMS: [Param; 7] = [
    Param::Sigma0,
    Param::G,
    Param::T,
    Param::C,
    Param::Theta,
    Param::S,
    Param::Kappa,
];

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// scientific notation outside `[1e-4, 1e12)`.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format_g12(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(format_g12).unwrap_or_default()
}

pub fn flags_field(rec: &RunRecord) -> String {
    rec.flags.join(";")
}

pub fn emit(records: &[RunRecord], spec: Option<&SweepSpec>, format: OutputFormat, paper_literal: bool) -> String {
    match format {
        OutputFormat::Csv => emit_csv(records, paper_literal),
        OutputFormat::Json => emit_json(records, spec, paper_literal),
    }
}

pub fn emit_csv(records: &[RunRecord], paper_literal: bool) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if paper_literal {
        header.extend(CSV_PAPER_LITERAL_COLUMNS);
    }
    w.write_record(&header).expect("write to memory");
    for rec in records {
        let mut row: Vec<String> = vec![rec.point.family.label().to_string()];
        row.extend(CSV_PARAMS.iter().map(|&p| cell(rec.point.get(p))));
        let nan = Some(f64::NAN);
        match &rec.report {
            Some(r) => {
                row.push(cell(Some(r.m)));
                row.push(cell(Some(r.abs_i)));
                row.push(cell(rec.m_closed));
                row.push(cell(rec.abs_i_closed));
                row.push(cell(r.e.map(|e| e.value)));
                row.push(cell(Some(r.gap)));
                row.push(cell(Some(r.phase_dev)));
                row.push(cell(Some(r.truncation)));
            }
            None => {
                row.extend([cell(nan), cell(nan), cell(rec.m_closed), cell(rec.abs_i_closed)]);
                row.extend([cell(nan), cell(nan), cell(nan), cell(nan)]);
            }
        }
        row.push(flags_field(rec));
        if paper_literal {
            row.push(cell(rec.m_closed_paper_literal));
            row.push(cell(rec.abs_i_closed_paper_literal));
        }
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

#[derive(Debug, Serialize)]
pub struct JsonGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

/// One JSON record. Carries the CSV fields plus the tilt, `arg I`, both
/// error-measure forms and the measurement probabilities.
#[derive(Debug, Serialize)]
pub struct JsonRecord {
    pub index: usize,
    pub family: &'static str,
    pub sigma0: Option<f64>,
    pub g: Option<f64>,
    pub t: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub theta: Option<f64>,
    pub s: Option<f64>,
    pub kappa: Option<f64>,
    pub tilt: Option<f64>,
    #[serde(rename = "M_num")]
    pub m_num: Option<f64>,
    #[serde(rename = "absI_num")]
    pub abs_i_num: Option<f64>,
    #[serde(rename = "argI_num")]
    pub arg_i_num: Option<f64>,
    #[serde(rename = "M_closed")]
    pub m_closed: Option<f64>,
    #[serde(rename = "absI_closed")]
    pub abs_i_closed: Option<f64>,
    #[serde(rename = "M_closed_paper_literal", skip_serializing_if = "Option::is_none")]
    pub m_closed_paper_literal: Option<f64>,
    #[serde(rename = "absI_closed_paper_literal", skip_serializing_if = "Option::is_none")]
    pub abs_i_closed_paper_literal: Option<f64>,
    #[serde(rename = "E_num")]
    pub e_num: Option<f64>,
    #[serde(rename = "E_from_plus")]
    pub e_from_plus: Option<f64>,
    pub gap: Option<f64>,
    pub phase_dev: Option<f64>,
    pub truncation: Option<f64>,
    pub p_upper_plus: Option<f64>,
    pub p_lower_minus: Option<f64>,
    pub povm_p_plus: Option<f64>,
    pub povm_p_minus: Option<f64>,
    pub mc_upper_fraction: Option<f64>,
    pub grid: Option<JsonGrid>,
    pub flags: String,
    pub error: Option<String>,
}

impl JsonRecord {
    pub fn new(rec: &RunRecord, paper_literal: bool) -> Self {
        let r = |x: Option<f64>| x.map(round12);
        let p = |param| r(rec.point.get(param));
        let report = rec.report.as_ref();
        let probs = rec.probabilities.as_ref();
        let lit = |x: Option<f64>| if paper_literal { r(x) } else { None };
        Self {
            index: rec.point.index,
            family: rec.point.family.label(),
            sigma0: p(Param::Sigma0),
            g: p(Param::G),
            t: p(Param::T),
            c: p(Param::C),
            theta: p(Param::Theta),
            s: p(Param::S),
            kappa: p(Param::Kappa),
            tilt: p(Param::Tilt),
            m_num: r(report.map(|x| x.m)),
            abs_i_num: r(report.map(|x| x.abs_i)),
            arg_i_num: r(report.map(|x| x.theta)),
            m_closed: r(rec.m_closed),
            abs_i_closed: r(rec.abs_i_closed),
            m_closed_paper_literal: lit(rec.m_closed_paper_literal),
            abs_i_closed_paper_literal: lit(rec.abs_i_closed_paper_literal),
            e_num: r(report.and_then(|x| x.e).map(|e| e.value)),
            e_from_plus: r(report.and_then(|x| x.e).map(|e| e.from_plus)),
            gap: r(report.map(|x| x.gap)),
            phase_dev: r(report.map(|x| x.phase_dev)),
            truncation: r(report.map(|x| x.truncation)),
            p_upper_plus: r(probs.map(|x| x.upper_plus)),
            p_lower_minus: r(probs.map(|x| x.lower_minus)),
            povm_p_plus: r(probs.map(|x| x.povm_plus)),
            povm_p_minus: r(probs.map(|x| x.povm_minus)),
            mc_upper_fraction: r(probs.and_then(|x| x.mc_upper_fraction)),
            grid: rec.grid.map(|g| JsonGrid {
                x_min: round12(g.x_min()),
                x_max: round12(g.x_max()),
                n: g.len(),
            }),
            flags: flags_field(rec),
            error: rec.error.clone(),
        }
    }
}

/// The configuration as echoed in JSON output.
pub fn spec_echo(spec: &SweepSpec) -> Value {
    let mut ranges = Map::new();
    for (p, r) in spec.ranges() {
        ranges.insert(
            p.key().into(),
            json!({ "start": round12(r.start), "stop": round12(r.stop), "count": r.count }),
        );
    }
    let grid = match spec.grid.bounds {
        Some((lo, hi)) => json!({ "x_min": lo, "x_max": hi, "n": spec.grid.n }),
        None => json!({ "x_min": "auto", "x_max": "auto", "n": spec.grid.n }),
    };
    let uses_envelope = matches!(spec.family, Family::Faithful | Family::LinearPhase);
    json!({
        "family": spec.family.label(),
        "envelope": if uses_envelope { Value::from(spec.envelope.label()) } else { Value::Null },
        "seed": spec.seed,
        "parameters": ranges,
        "grid": grid,
        "qubit": {
            "alpha": [round12(spec.qubit.alpha.re), round12(spec.qubit.alpha.im)],
            "beta": [round12(spec.qubit.beta.re), round12(spec.qubit.beta.im)],
        },
        "sampling": { "n": spec.samples },
        "limits": { "max_points": spec.max_points },
        "certificate": { "mass_floor": spec.mass_floor },
    })
}

pub fn emit_json(records: &[RunRecord], spec: Option<&SweepSpec>, paper_literal: bool) -> String {
    let recs: Vec<JsonRecord> = records.iter().map(|r| JsonRecord::new(r, paper_literal)).collect();
    let doc = json!({
        "schema_version": JSON_SCHEMA_VERSION,
        "spec": spec.map(spec_echo).unwrap_or(Value::Null),
        "records": recs,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("records serialize");
    out.push('\n');
    out
}
