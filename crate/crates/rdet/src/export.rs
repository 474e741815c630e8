//! File formats: system and validator JSON, profile and trajectory CSV,
//! recurrence plots as PBM (P4) and run-length PGM (P5), run-length JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

use rdet_core::rational::format_fraction;
use rdet_core::rqa::{BitMatrix, DeterminismReport, TailStats};
use rdet_core::validate::ValidationReport;
use rdet_core::{IntervalSystem, Word};
use serde::Serialize;

use crate::{Error, Result};

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct IntervalJson {
    word: String,
    lo: String,
    hi: String,
}

#[derive(Serialize)]
struct LevelJson {
    t: u32,
    denominator: String,
    intervals: Vec<IntervalJson>,
}

#[derive(Serialize)]
struct StageJson {
    n: u32,
    t: u32,
    eps: String,
    t_prime: u32,
    eps_prime: String,
    delta: String,
}

#[derive(Serialize)]
struct SystemJson {
    kind: &'static str,
    depth: u32,
    depth_cap: u32,
    materialized_depth: u32,
    levels: Vec<LevelJson>,
    ladder: Option<Vec<StageJson>>,
}

/// Levels `0..=depth` with endpoints as `"num/den"` strings; words are
/// listed in index order, least significant digit first.
pub fn system_json(sys: &IntervalSystem, depth: u32) -> Result<String> {
    sys.check_depth(depth)?;
    let mut levels = Vec::new();
    for t in 0..=depth {
        let level = sys.level(t)?;
        let intervals = (0..level.len())
            .map(|i| {
                let k = level.interval(i);
                IntervalJson {
                    word: Word::new(i as u64, t).map(|w| w.to_string()).unwrap_or_default(),
                    lo: format_fraction(k.lo()),
                    hi: format_fraction(k.hi()),
                }
            })
            .collect();
        levels.push(LevelJson {
            t,
            denominator: level.denom().to_string(),
            intervals,
        });
    }
    let ladder = sys.ladder().map(|l| {
        l.stages()
            .iter()
            .map(|s| StageJson {
                n: s.n,
                t: s.t,
                eps: format_fraction(&s.eps),
                t_prime: s.t_prime,
                eps_prime: format_fraction(&s.eps_prime),
                delta: format_fraction(&s.delta),
            })
            .collect()
    });
    to_json(&SystemJson {
        kind: sys.kind().name(),
        depth,
        depth_cap: sys.depth_cap(),
        materialized_depth: sys.materialized_depth(),
        levels,
        ladder,
    })
}

#[derive(Serialize)]
struct CheckJson<'a> {
    check: &'a str,
    level: Option<u32>,
    stage: Option<u32>,
    passed: bool,
    checked: u64,
    violations: u64,
    words: Vec<String>,
    values: Vec<(&'a str, String)>,
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct ValidationJson<'a> {
    kind: &'static str,
    depth: u32,
    passed: bool,
    records: Vec<CheckJson<'a>>,
}

pub fn validation_json(report: &ValidationReport) -> Result<String> {
    to_json(&ValidationJson {
        kind: report.kind.name(),
        depth: report.depth,
        passed: report.passed(),
        records: report
            .records
            .iter()
            .map(|r| CheckJson {
                check: r.check,
                level: r.level,
                stage: r.stage,
                passed: r.passed,
                checked: r.checked,
                violations: r.violations,
                words: r.words.iter().map(Word::to_string).collect(),
                values: r.values.iter().map(|(k, v)| (*k, format_fraction(v))).collect(),
                note: r.note.as_deref(),
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct ProfileRow {
    m: usize,
    n: usize,
    #[serde(rename = "C")]
    c: f64,
    rdet: f64,
    rqa_det: Option<f64>,
}

/// One row per `(m, n)`; `rqa_det` is empty where it was not computed.
pub fn profile_csv(report: &DeterminismReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (ni, &n) in report.n_values.iter().enumerate() {
        for m in 1..=report.m_cap {
            let rqa_det = report
                .rqa_det
                .as_ref()
                .and_then(|t| t[ni].get(m - 1).copied());
            w.serialize(ProfileRow {
                m,
                n,
                c: report.corr[ni][m - 1],
                rdet: report.rdet[ni][m - 1],
                rqa_det,
            })?;
        }
    }
    w.into_inner().map_err(|e| Error::io("<profile csv>", e.into_error()))
}

struct TailStatsRef<'a>(&'a TailStats);

impl Serialize for TailStatsRef<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let t = self.0;
        let mut st = s.serialize_struct("TailStats", 5)?;
        st.serialize_field("m", &t.m)?;
        st.serialize_field("c_min", &t.c_min)?;
        st.serialize_field("c_max", &t.c_max)?;
        st.serialize_field("rdet_min", &t.rdet_min)?;
        st.serialize_field("rdet_max", &t.rdet_max)?;
        st.end()
    }
}

/// JSON summary of a report with the run configuration embedded.
pub fn report_json<C: Serialize>(report: &DeterminismReport, config: &C) -> Result<String> {
    #[derive(Serialize)]
    struct Summary<'a, C: Serialize> {
        config: &'a C,
        eps: f64,
        m_cap: usize,
        n_values: &'a [usize],
        tails: Vec<TailStatsRef<'a>>,
        monotone_ok: bool,
        sandwich_ok: bool,
        stabilized_at: usize,
        det_identity_error: Option<f64>,
        undecided: u64,
    }
    to_json(&Summary {
        config,
        eps: report.eps,
        m_cap: report.m_cap,
        n_values: &report.n_values,
        tails: report.tails.iter().map(TailStatsRef).collect(),
        monotone_ok: report.monotone_ok,
        sandwich_ok: report.sandwich_ok,
        stabilized_at: report.stabilized_at,
        det_identity_error: report.det_identity_error,
        undecided: report.undecided,
    })
}

pub fn trajectory_csv(xs: &[f64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "x"])?;
    for (i, x) in xs.iter().enumerate() {
        w.write_record([i.to_string(), format!("{x:?}")])?;
    }
    w.into_inner().map_err(|e| Error::io("<trajectory csv>", e.into_error()))
}

/// Binary PBM: row `i` is orbit index `i`, a set pixel (black) is a recurrence.
pub fn pbm(mat: &BitMatrix) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", mat.n(), mat.n()).into_bytes();
    out.extend_from_slice(&mat.to_msb_rows());
    out
}

/// Length of the maximal diagonal run through every cell, 0 off the plot.
pub fn diagonal_run_lengths(mat: &BitMatrix) -> Vec<u32> {
    let n = mat.n();
    let mut out = vec![0u32; n * n];
    for d in 0..n {
        for lower in [false, true] {
            if lower && d == 0 {
                continue;
            }
            let cell = |i: usize| if lower { (i + d, i) } else { (i, i + d) };
            let mut i = 0;
            while i < n - d {
                let (r, c) = cell(i);
                if !mat.get(r, c) {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < n - d && {
                    let (r, c) = cell(i);
                    mat.get(r, c)
                } {
                    i += 1;
                }
                for k in start..i {
                    let (r, c) = cell(k);
                    out[r * n + c] = (i - start) as u32;
                }
            }
        }
    }
    out
}

/// Binary PGM with the diagonal run length through each cell, clamped to 255.
pub fn pgm_run_lengths(mat: &BitMatrix) -> Vec<u8> {
    let n = mat.n();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(diagonal_run_lengths(mat).into_iter().map(|l| l.min(255) as u8));
    out
}

#[derive(Serialize)]
struct RunLengthJson {
    n: usize,
    /// Per row, `[start, length]` of each run of set cells.
    rows: Vec<Vec<[usize; 2]>>,
}

pub fn run_length_json(mat: &BitMatrix) -> Result<String> {
    let n = mat.n();
    let rows = (0..n)
        .map(|i| {
            let mut runs = Vec::new();
            let mut j = 0;
            while j < n {
                if mat.get(i, j) {
                    let start = j;
                    while j < n && mat.get(i, j) {
                        j += 1;
                    }
                    runs.push([start, j - start]);
                } else {
                    j += 1;
                }
            }
            runs
        })
        .collect();
    let mut s = serde_json::to_string(&RunLengthJson { n, rows })?;
    s.push('\n');
    Ok(s)
}

pub fn write_string(path: &Path, s: &str) -> Result<()> {
    write_file(path, s.as_bytes())
}

pub fn stdout(s: &str) -> Result<()> {
    std::io::stdout()
        .lock()
        .write_all(s.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}
