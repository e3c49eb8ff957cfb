use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;

use super::BenchError;
use crate::anomaly::AnomalyKind;

pub const COLUMNS: [&str; 29] = [
    "circuit_id",
    "size_class",
    "num_qubits",
    "gate_count",
    "kind",
    "mode",
    "severity",
    "sis",
    "delta_gate",
    "delta_depth",
    "delta_2q",
    "delta_topo",
    "igs",
    "d_edge",
    "d_node",
    "d_order",
    "d_inter",
    "d_usage",
    "ois",
    "jsd",
    "detected_by_ois",
    "detected_by_igs",
    "blind_spot",
    "t_sis_ms",
    "t_igs_ms",
    "t_ois_ms",
    "applied_count",
    "seed_stream_id",
    "status",
];

pub const TIMING_COLUMNS: [&str; 3] = ["t_sis_ms", "t_igs_ms", "t_ois_ms"];

/// Formats with at most 9 significant digits, like C's `%.9g`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..9).contains(&exp) {
        format!("{}e{}", trim(mantissa), exp)
    } else {
        trim(&format!("{:.*}", (8 - exp) as usize, v))
    }
}

/// `v` rounded to the precision it is stored with.
pub fn round_sig9(v: f64) -> f64 {
    format_sig9(v).parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub fn classify(num_qubits: usize, small_max: usize, medium_max: usize) -> Self {
        if num_qubits <= small_max {
            SizeClass::Small
        } else if num_qubits <= medium_max {
            SizeClass::Medium
        } else {
            SizeClass::Large
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }
}

impl FromStr for SizeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small" => Ok(SizeClass::Small),
            "medium" => Ok(SizeClass::Medium),
            "large" => Ok(SizeClass::Large),
            _ => Err(format!("unknown size class `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Ok,
    /// SIS and IGS present, OIS skipped because of the simulation cap.
    SkippedQubitCap,
    /// SIS and IGS present, OIS skipped because simulation failed.
    SkippedSimulation,
    /// No eligible site: no scores at all.
    SkippedIneligible,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::SkippedQubitCap => "skipped:qubit_cap",
            Status::SkippedSimulation => "skipped:simulation",
            Status::SkippedIneligible => "skipped:ineligible",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Status::Ok,
            Status::SkippedQubitCap,
            Status::SkippedSimulation,
            Status::SkippedIneligible,
        ]
        .into_iter()
        .find(|st| st.name() == s)
        .ok_or_else(|| format!("unknown status `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralScores {
    pub sis: f64,
    pub delta_gate: f64,
    pub delta_depth: f64,
    pub delta_2q: f64,
    pub delta_topo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionScores {
    pub igs: f64,
    pub d_edge: f64,
    pub d_node: f64,
    pub d_order: f64,
    pub d_inter: f64,
    pub d_usage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BehavioralScores {
    pub ois: f64,
    pub jsd: f64,
}

/// One cell of the benchmark grid. Scores are stored rounded to 9
/// significant digits so that the CSV round-trips exactly and the detection
/// flags agree with the written scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub circuit_id: String,
    pub size_class: SizeClass,
    pub num_qubits: usize,
    pub gate_count: usize,
    pub kind: AnomalyKind,
    /// `"fixed"` or `"severity"`.
    pub mode: String,
    pub severity: Option<f64>,
    pub structural: Option<StructuralScores>,
    pub interaction: Option<InteractionScores>,
    pub behavioral: Option<BehavioralScores>,
    pub detected_by_ois: Option<bool>,
    pub detected_by_igs: Option<bool>,
    pub blind_spot: Option<bool>,
    pub t_sis_ms: Option<f64>,
    pub t_igs_ms: Option<f64>,
    pub t_ois_ms: Option<f64>,
    pub applied_count: Option<usize>,
    pub seed_stream_id: String,
    pub status: Status,
}

impl BenchRecord {
    pub fn sis(&self) -> Option<f64> {
        self.structural.map(|s| s.sis)
    }

    pub fn igs(&self) -> Option<f64> {
        self.interaction.map(|s| s.igs)
    }

    pub fn ois(&self) -> Option<f64> {
        self.behavioral.map(|s| s.ois)
    }

    /// `"fixed"` or the severity value, e.g. `"0.3"`.
    pub fn mode_label(&self) -> String {
        match self.severity {
            Some(s) => format_sig9(s),
            None => self.mode.clone(),
        }
    }

    fn fields(&self, with_timings: bool) -> Vec<String> {
        let f = |v: Option<f64>| v.map(format_sig9).unwrap_or_default();
        let b = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
        let s = self.structural;
        let i = self.interaction;
        let o = self.behavioral;
        let t = |v: Option<f64>| if with_timings { f(v) } else { String::new() };
        vec![
            self.circuit_id.clone(),
            self.size_class.name().into(),
            self.num_qubits.to_string(),
            self.gate_count.to_string(),
            self.kind.name().into(),
            self.mode.clone(),
            f(self.severity),
            f(s.map(|s| s.sis)),
            f(s.map(|s| s.delta_gate)),
            f(s.map(|s| s.delta_depth)),
            f(s.map(|s| s.delta_2q)),
            f(s.map(|s| s.delta_topo)),
            f(i.map(|i| i.igs)),
            f(i.map(|i| i.d_edge)),
            f(i.map(|i| i.d_node)),
            f(i.map(|i| i.d_order)),
            f(i.map(|i| i.d_inter)),
            f(i.map(|i| i.d_usage)),
            f(o.map(|o| o.ois)),
            f(o.map(|o| o.jsd)),
            b(self.detected_by_ois),
            b(self.detected_by_igs),
            b(self.blind_spot),
            t(self.t_sis_ms),
            t(self.t_igs_ms),
            t(self.t_ois_ms),
            self.applied_count.map(|c| c.to_string()).unwrap_or_default(),
            self.seed_stream_id.clone(),
            self.status.name().into(),
        ]
    }

    fn from_fields(r: &csv::StringRecord, line: u64) -> Result<Self, BenchError> {
        let bad = |col: &str, v: &str| BenchError::Csv(format!("line {line}: bad value `{v}` in column `{col}`"));
        let get = |idx: usize| r.get(idx).unwrap_or("");
        fn opt<T: FromStr>(v: &str) -> Result<Option<T>, ()> {
            if v.is_empty() {
                Ok(None)
            } else {
                v.parse().map(Some).map_err(|_| ())
            }
        }
        macro_rules! col {
            ($idx:expr) => {
                opt(get($idx)).map_err(|_| bad(COLUMNS[$idx], get($idx)))?
            };
        }
        macro_rules! req {
            ($idx:expr) => {
                get($idx).parse().map_err(|_| bad(COLUMNS[$idx], get($idx)))?
            };
        }
        let sis: Option<f64> = col!(7);
        let igs: Option<f64> = col!(12);
        let ois: Option<f64> = col!(18);
        let structural = match sis {
            Some(sis) => Some(StructuralScores {
                sis,
                delta_gate: req!(8),
                delta_depth: req!(9),
                delta_2q: req!(10),
                delta_topo: req!(11),
            }),
            None => None,
        };
        let interaction = match igs {
            Some(igs) => Some(InteractionScores {
                igs,
                d_edge: req!(13),
                d_node: req!(14),
                d_order: req!(15),
                d_inter: req!(16),
                d_usage: req!(17),
            }),
            None => None,
        };
        let behavioral = match ois {
            Some(ois) => Some(BehavioralScores { ois, jsd: req!(19) }),
            None => None,
        };
        let kind_s = get(4);
        Ok(BenchRecord {
            circuit_id: get(0).to_string(),
            size_class: req!(1),
            num_qubits: req!(2),
            gate_count: req!(3),
            kind: AnomalyKind::from_name(kind_s).map_err(|_| bad("kind", kind_s))?,
            mode: get(5).to_string(),
            severity: col!(6),
            structural,
            interaction,
            behavioral,
            detected_by_ois: col!(20),
            detected_by_igs: col!(21),
            blind_spot: col!(22),
            t_sis_ms: col!(23),
            t_igs_ms: col!(24),
            t_ois_ms: col!(25),
            applied_count: col!(26),
            seed_stream_id: get(27).to_string(),
            status: req!(28),
        })
    }
}

fn write_impl<W: Write>(out: W, records: &[BenchRecord], with_timings: bool) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.fields(with_timings))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records<W: Write>(out: W, records: &[BenchRecord]) -> Result<(), BenchError> {
    write_impl(out, records, true)
}

/// The CSV with the three timing columns left empty: identical across runs
/// with the same configuration.
pub fn records_without_timings(records: &[BenchRecord]) -> Result<String, BenchError> {
    let mut buf = Vec::new();
    write_impl(&mut buf, records, false)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(BenchError::Csv("unexpected header row".into()));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        out.push(BenchRecord::from_fields(&row, line)?);
    }
    Ok(out)
}
