//! Recording CSV.
//!
//! ```text
//! # schema=1
//! # start_utc=2020-02-28T06:06:29Z
//! # sample_rate_hz=30
//! # duration_s=1036800
//! # rf_freq_hz=20000000
//! # seed=20200228
//! t_s,mpd_deg[,truth_dl_m,truth_at_m]
//! 0,0.0123
//! ```
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every value bit for bit.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::{GroundTruth, PhaseRecord, RecordingConfig, RecordingSeries};
use crate::tide::{format_utc, parse_utc};

pub const SCHEMA_VERSION: u32 = 1;

const COLUMNS: &str = "t_s,mpd_deg";
const COLUMNS_TRUTH: &str = "t_s,mpd_deg,truth_dl_m,truth_at_m";

#[derive(Debug, Error)]
pub enum RecordingFileError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_err(line: usize, message: impl Into<String>) -> RecordingFileError {
    RecordingFileError::Format {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordingHeader {
    pub start_utc_s: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub rf_freq_hz: f64,
    pub seed: u64,
}

impl RecordingHeader {
    pub fn config(&self) -> RecordingConfig {
        RecordingConfig {
            start_utc_s: self.start_utc_s,
            duration_s: self.duration_s,
            sample_rate_hz: self.sample_rate_hz,
            rng_seed: self.seed,
        }
    }

    pub fn expected_rows(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).floor() as usize
    }
}

/// Row-by-row writer; the header is emitted on construction.
pub struct RecordingWriter<W: Write> {
    out: W,
    with_truth: bool,
}

impl<W: Write> RecordingWriter<W> {
    pub fn new(mut out: W, header: &RecordingHeader, with_truth: bool) -> std::io::Result<Self> {
        writeln!(out, "# schema={SCHEMA_VERSION}")?;
        writeln!(out, "# start_utc={}", format_utc(header.start_utc_s))?;
        writeln!(out, "# sample_rate_hz={}", header.sample_rate_hz)?;
        writeln!(out, "# duration_s={}", header.duration_s)?;
        writeln!(out, "# rf_freq_hz={}", header.rf_freq_hz)?;
        writeln!(out, "# seed={}", header.seed)?;
        writeln!(out, "{}", if with_truth { COLUMNS_TRUTH } else { COLUMNS })?;
        Ok(Self { out, with_truth })
    }

    pub fn write(&mut self, rec: &PhaseRecord, truth: Option<&GroundTruth>) -> std::io::Result<()> {
        match (self.with_truth, truth) {
            (true, Some(g)) => writeln!(self.out, "{},{},{},{}", rec.t_s, rec.mpd_deg, g.dl_m, g.at_m),
            (true, None) => Err(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "truth columns declared but no truth given",
            )),
            (false, _) => writeln!(self.out, "{},{}", rec.t_s, rec.mpd_deg),
        }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_recording<W: Write>(out: W, series: &RecordingSeries) -> std::io::Result<()> {
    let mut w = RecordingWriter::new(out, &series.header(), series.ground_truth.is_some())?;
    for (i, rec) in series.records.iter().enumerate() {
        w.write(rec, series.ground_truth.as_ref().map(|g| &g[i]))?;
    }
    w.finish()?;
    Ok(())
}

/// Streams a recording, calling `visit` per row with the parsed header.
pub fn visit_recording<R: BufRead>(
    input: R,
    mut visit: impl FnMut(&RecordingHeader, PhaseRecord, Option<GroundTruth>),
) -> Result<(RecordingHeader, bool), RecordingFileError> {
    let mut keys: Vec<(String, String, usize)> = Vec::new();
    let mut header: Option<RecordingHeader> = None;
    let mut with_truth = false;
    let mut rows = 0usize;
    let mut last_t = f64::NEG_INFINITY;
    let mut line_no = 0usize;

    for line in input.lines() {
        line_no += 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if header.is_none() {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| format_err(line_no, "header line is not key=value"))?;
                keys.push((k.trim().to_string(), v.trim().to_string(), line_no));
                continue;
            }
            with_truth = match line.trim() {
                COLUMNS => false,
                COLUMNS_TRUTH => true,
                other => return Err(format_err(line_no, format!("unexpected column line {other:?}"))),
            };
            header = Some(parse_header(&keys, line_no)?);
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let h = header.as_ref().expect("header parsed");
        let fields: Vec<&str> = line.split(',').collect();
        let want = if with_truth { 4 } else { 2 };
        if fields.len() != want {
            return Err(format_err(line_no, format!("expected {want} fields, found {}", fields.len())));
        }
        let num = |s: &str| -> Result<f64, RecordingFileError> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| format_err(line_no, format!("not a number: {s:?}")))?;
            if !v.is_finite() {
                return Err(format_err(line_no, "non-finite value"));
            }
            Ok(v)
        };
        let rec = PhaseRecord {
            t_s: num(fields[0])?,
            mpd_deg: num(fields[1])?,
        };
        if rec.t_s <= last_t {
            return Err(format_err(line_no, "time is not strictly increasing"));
        }
        last_t = rec.t_s;
        let truth = if with_truth {
            Some(GroundTruth {
                dl_m: num(fields[2])?,
                at_m: num(fields[3])?,
            })
        } else {
            None
        };
        rows += 1;
        visit(h, rec, truth);
    }
    let header = header.ok_or_else(|| format_err(line_no, "missing column line"))?;
    if rows != header.expected_rows() {
        return Err(format_err(
            line_no,
            format!("{rows} data rows, header implies {} (truncated file?)", header.expected_rows()),
        ));
    }
    Ok((header, with_truth))
}

fn parse_header(keys: &[(String, String, usize)], columns_line: usize) -> Result<RecordingHeader, RecordingFileError> {
    let get = |name: &str| {
        keys.iter()
            .find(|(k, _, _)| k == name)
            .ok_or_else(|| format_err(columns_line, format!("missing header key {name}")))
    };
    let num = |name: &str| -> Result<f64, RecordingFileError> {
        let (_, v, line) = get(name)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format_err(*line, format!("bad value for {name}: {v:?}")))
    };
    let (_, schema, schema_line) = get("schema")?;
    if schema.parse::<u32>().ok() != Some(SCHEMA_VERSION) {
        return Err(format_err(*schema_line, format!("unsupported schema {schema:?}")));
    }
    let (_, start, start_line) = get("start_utc")?;
    let start_utc_s = parse_utc(start).map_err(|e| format_err(*start_line, e))?;
    let (_, seed, seed_line) = get("seed")?;
    let seed = seed
        .parse::<u64>()
        .map_err(|_| format_err(*seed_line, format!("bad seed {seed:?}")))?;
    let header = RecordingHeader {
        start_utc_s,
        sample_rate_hz: num("sample_rate_hz")?,
        duration_s: num("duration_s")?,
        rf_freq_hz: num("rf_freq_hz")?,
        seed,
    };
    if !(header.sample_rate_hz > 0.0) || !(header.duration_s > 0.0) || !(header.rf_freq_hz > 0.0) {
        return Err(format_err(columns_line, "rate, duration and RF frequency must be positive"));
    }
    Ok(header)
}

/// Reads a whole recording into memory.
pub fn read_recording<R: BufRead>(input: R) -> Result<RecordingSeries, RecordingFileError> {
    let mut records = Vec::new();
    let mut truth = Vec::new();
    let (header, with_truth) = visit_recording(input, |_, rec, g| {
        records.push(rec);
        if let Some(g) = g {
            truth.push(g);
        }
    })?;
    Ok(RecordingSeries {
        config: header.config(),
        rf_freq_hz: header.rf_freq_hz,
        records,
        ground_truth: with_truth.then_some(truth),
        temperature: None,
    })
}
