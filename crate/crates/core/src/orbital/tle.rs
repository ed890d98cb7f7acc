use chrono::{Datelike, NaiveDate, TimeZone, Utc};
use thiserror::Error;

use super::{normalize_deg, OrbitalElements, SECONDS_PER_DAY};

const LINE_LEN: usize = 69;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("TLE line {line}, column {column}: {kind}")]
pub struct TleError {
    /// 1-based line number within the input text.
    pub line: usize,
    /// 1-based column, 0 when the whole line is at fault.
    pub column: usize,
    pub kind: TleErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TleErrorKind {
    #[error("expected {LINE_LEN} columns, found {0}")]
    LineLength(usize),
    #[error("checksum digit is {found}, computed {computed}")]
    Checksum { found: char, computed: u8 },
    #[error("expected line number {0}")]
    LineNumber(char),
    #[error("cannot parse {field} from {text:?}")]
    Number { field: &'static str, text: String },
    #[error("catalog numbers of line 1 and line 2 differ")]
    CatalogMismatch,
    #[error("expected two or three lines, found {0}")]
    RecordShape(usize),
}

/// Mod-10 checksum over the first 68 columns: digits count their value, '-' counts 1.
pub fn checksum(line: &str) -> u8 {
    let sum: u32 = line
        .bytes()
        .take(LINE_LEN - 1)
        .map(|b| match b {
            b'0'..=b'9' => u32::from(b - b'0'),
            b'-' => 1,
            _ => 0,
        })
        .sum();
    (sum % 10) as u8
}

fn validate_line(line: &str, line_no: usize, expect: char) -> Result<(), TleError> {
    let err = |column, kind| TleError {
        line: line_no,
        column,
        kind,
    };
    if !line.is_ascii() || line.len() != LINE_LEN {
        return Err(err(0, TleErrorKind::LineLength(line.chars().count())));
    }
    let first = line.as_bytes()[0] as char;
    if first != expect {
        return Err(err(1, TleErrorKind::LineNumber(expect)));
    }
    let found = line.as_bytes()[LINE_LEN - 1] as char;
    let computed = checksum(line);
    if found.to_digit(10) != Some(u32::from(computed)) {
        return Err(err(LINE_LEN, TleErrorKind::Checksum { found, computed }));
    }
    Ok(())
}

/// Parses the 1-based inclusive column range `[from, to]`.
fn field<T: std::str::FromStr>(
    line: &str,
    line_no: usize,
    from: usize,
    to: usize,
    name: &'static str,
) -> Result<T, TleError> {
    let text = line[from - 1..to].trim();
    text.parse().map_err(|_| TleError {
        line: line_no,
        column: from,
        kind: TleErrorKind::Number {
            field: name,
            text: text.to_string(),
        },
    })
}

fn epoch_to_unix(year_2digit: u32, day_of_year: f64) -> f64 {
    let year = if year_2digit < 57 {
        2000 + year_2digit as i32
    } else {
        1900 + year_2digit as i32
    };
    let jan1 = Utc
        .with_ymd_and_hms(year, 1, 1, 0, 0, 0)
        .single()
        .expect("valid date")
        .timestamp() as f64;
    jan1 + (day_of_year - 1.0) * SECONDS_PER_DAY
}

/// Parses one TLE record: two element lines, optionally preceded by a name line.
///
/// The satellite id is the trimmed name line if present, the catalog number otherwise.
pub fn parse_tle(text: &str) -> Result<OrbitalElements, TleError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches(['\r', ' ']))
        .filter(|l| !l.is_empty())
        .collect();
    match lines.as_slice() {
        [l1, l2] => parse_lines(None, l1, l2, 1),
        [name, l1, l2] => parse_lines(Some(name), l1, l2, 2),
        other => Err(TleError {
            line: 1,
            column: 0,
            kind: TleErrorKind::RecordShape(other.len()),
        }),
    }
}

fn parse_lines(
    name: Option<&str>,
    l1: &str,
    l2: &str,
    l1_no: usize,
) -> Result<OrbitalElements, TleError> {
    let l2_no = l1_no + 1;
    validate_line(l1, l1_no, '1')?;
    validate_line(l2, l2_no, '2')?;

    let cat1: u32 = field(l1, l1_no, 3, 7, "catalog number")?;
    let cat2: u32 = field(l2, l2_no, 3, 7, "catalog number")?;
    if cat1 != cat2 {
        return Err(TleError {
            line: l2_no,
            column: 3,
            kind: TleErrorKind::CatalogMismatch,
        });
    }
    let epoch_year: u32 = field(l1, l1_no, 19, 20, "epoch year")?;
    let epoch_day: f64 = field(l1, l1_no, 21, 32, "epoch day")?;

    let inclination: f64 = field(l2, l2_no, 9, 16, "inclination")?;
    let raan: f64 = field(l2, l2_no, 18, 25, "right ascension")?;
    let ecc_digits: u32 = field(l2, l2_no, 27, 33, "eccentricity")?;
    let arg_perigee: f64 = field(l2, l2_no, 35, 42, "argument of perigee")?;
    let mean_anomaly: f64 = field(l2, l2_no, 44, 51, "mean anomaly")?;
    let mean_motion: f64 = field(l2, l2_no, 53, 63, "mean motion")?;
    if mean_motion <= 0.0 {
        return Err(TleError {
            line: l2_no,
            column: 53,
            kind: TleErrorKind::Number {
                field: "mean motion",
                text: l2[52..63].trim().to_string(),
            },
        });
    }

    let satellite_id = match name {
        Some(n) => n.trim().trim_start_matches("0 ").to_string(),
        None => cat1.to_string(),
    };
    Ok(OrbitalElements {
        satellite_id,
        epoch: epoch_to_unix(epoch_year, epoch_day),
        inclination: inclination.rem_euclid(180.0),
        raan: normalize_deg(raan),
        eccentricity: f64::from(ecc_digits) * 1e-7,
        arg_perigee: normalize_deg(arg_perigee),
        mean_anomaly_at_epoch: normalize_deg(mean_anomaly),
        mean_motion,
    })
}

/// Parses a file of consecutive records. Records may mix two- and three-line forms.
pub fn parse_tle_file(text: &str) -> Result<Vec<OrbitalElements>, TleError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches(['\r', ' '])))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        let (no, line) = lines[k];
        let is_element = |l: &str, c: &str| l.len() == LINE_LEN && l.starts_with(c);
        let (name, start) = if is_element(line, "1 ") {
            (None, k)
        } else {
            (Some(line), k + 1)
        };
        if start + 1 >= lines.len() {
            return Err(TleError {
                line: no,
                column: 0,
                kind: TleErrorKind::RecordShape(lines.len() - k),
            });
        }
        let (no1, l1) = lines[start];
        let (no2, l2) = lines[start + 1];
        let el = parse_lines(name, l1, l2, no1).map_err(|mut e| {
            // parse_lines numbers line 2 as line 1 + 1
            if e.line == no1 + 1 {
                e.line = no2;
            }
            e
        })?;
        out.push(el);
        k = start + 2;
    }
    Ok(out)
}

/// Renders elements as a three-line TLE record with valid checksums.
///
/// Drag terms are written as zero; `catalog` must fit in five digits.
pub fn format_tle(el: &OrbitalElements, catalog: u32) -> String {
    let dt = Utc
        .timestamp_opt(el.epoch.floor() as i64, 0)
        .single()
        .expect("epoch in range");
    let jan1 = NaiveDate::from_ymd_opt(dt.year(), 1, 1)
        .expect("valid date")
        .and_hms_opt(0, 0, 0)
        .expect("valid time")
        .and_utc()
        .timestamp() as f64;
    let day = (el.epoch - jan1) / SECONDS_PER_DAY + 1.0;
    let yy = dt.year().rem_euclid(100);
    let catalog = catalog % 100_000;
    let l1 = format!(
        "1 {catalog:05}U {intl:<8} {yy:02}{day:012.8}  .00000000  00000-0  00000-0 0  999",
        intl = "00000A"
    );
    let ecc = (el.eccentricity * 1e7).round() as u32;
    let l2 = format!(
        "2 {catalog:05} {:8.4} {:8.4} {ecc:07} {:8.4} {:8.4} {:11.8}{:5}",
        el.inclination, el.raan, el.arg_perigee, el.mean_anomaly_at_epoch, el.mean_motion, 0
    );
    let l1 = format!("{l1}{}", checksum(&l1));
    let l2 = format!("{l2}{}", checksum(&l2));
    format!("{}\n{l1}\n{l2}\n", el.satellite_id)
}
