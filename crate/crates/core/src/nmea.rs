//! NMEA 0183 RMC sentence parsing.
//!
//! Only `$GPRMC` / `$GNRMC` are accepted. After the sentence tag, the
//! checksum is verified before any field is looked at, so a corrupt
//! sentence never yields partial data.

use thiserror::Error;

use crate::types::{ContractViolation, GeoPoint, GpsFix, SensorEvent, SensorPayload, Timestamp};

/// Longest sentence content, excluding the trailing CR/LF.
pub const MAX_SENTENCE_LEN: usize = 80;

const KPH_PER_KNOT: f64 = 1.852;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("checksum mismatch: expected {expected}, found {found}")]
    ChecksumMismatch { expected: String, found: String },
    #[error("missing field {index}")]
    MissingField { index: usize },
    #[error("malformed number in {field}")]
    MalformedNumber { field: &'static str },
    #[error("unsupported sentence {0}")]
    UnsupportedSentence(String),
    #[error("malformed sentence: {0}")]
    Malformed(&'static str),
}

impl ParseError {
    /// The variant name, e.g. `ChecksumMismatch`.
    pub fn name(&self) -> &'static str {
        match self {
            ParseError::ChecksumMismatch { .. } => "ChecksumMismatch",
            ParseError::MissingField { .. } => "MissingField",
            ParseError::MalformedNumber { .. } => "MalformedNumber",
            ParseError::UnsupportedSentence(_) => "UnsupportedSentence",
            ParseError::Malformed(_) => "Malformed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixStatus {
    Active,
    Void,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmcData {
    /// `hhmmss` or `hhmmss.sss`, as received.
    pub utc_time: String,
    pub status: FixStatus,
    pub point: GeoPoint,
    pub speed_knots: f64,
    pub course_deg: f64,
    /// `ddmmyy`, as received.
    pub date: String,
}

/// XOR of the body bytes as two uppercase hex digits.
pub fn checksum(body: &str) -> Result<String, ParseError> {
    let mut acc = 0u8;
    for b in body.bytes() {
        if !is_printable(b) {
            return Err(ParseError::Malformed("non-printable character in body"));
        }
        if b == b'$' || b == b'*' {
            return Err(ParseError::Malformed("`$` or `*` inside body"));
        }
        acc ^= b;
    }
    Ok(format!("{acc:02X}"))
}

fn is_printable(b: u8) -> bool {
    (0x20..=0x7e).contains(&b)
}

/// Parse raw bytes; anything that is not printable ASCII is rejected.
pub fn parse_rmc_bytes(line: &[u8]) -> Result<RmcData, ParseError> {
    let text = std::str::from_utf8(line).map_err(|_| ParseError::Malformed("not ASCII"))?;
    parse_rmc(text)
}

pub fn parse_rmc(line: &str) -> Result<RmcData, ParseError> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    if !line.bytes().all(is_printable) {
        return Err(ParseError::Malformed("non-printable character"));
    }
    if line.len() > MAX_SENTENCE_LEN {
        return Err(ParseError::Malformed("sentence longer than 80 characters before CR/LF"));
    }
    let rest = line.strip_prefix('$').ok_or(ParseError::Malformed("missing `$`"))?;
    let (body, found) = rest.rsplit_once('*').ok_or(ParseError::Malformed("missing `*`"))?;
    if found.len() != 2 {
        return Err(ParseError::Malformed("checksum must be two hex digits"));
    }

    let tag = body.split(',').next().unwrap_or_default();
    if tag != "GPRMC" && tag != "GNRMC" {
        return Err(ParseError::UnsupportedSentence(tag.to_string()));
    }

    let expected = checksum(body)?;
    if expected != found {
        return Err(ParseError::ChecksumMismatch {
            expected,
            found: found.to_string(),
        });
    }

    let fields: Vec<&str> = body.split(',').collect();
    let field = |index: usize| -> Result<&str, ParseError> {
        match fields.get(index) {
            Some(f) if !f.is_empty() => Ok(f),
            _ => Err(ParseError::MissingField { index }),
        }
    };

    let utc_time = field(1)?;
    validate_time(utc_time)?;
    let status = match field(2)? {
        "A" => FixStatus::Active,
        "V" => FixStatus::Void,
        _ => return Err(ParseError::MalformedNumber { field: "status" }),
    };
    let lat = parse_coordinate(field(3)?, 2, "latitude")?;
    let lat = match field(4)? {
        "N" => lat,
        "S" => -lat,
        _ => return Err(ParseError::MalformedNumber { field: "latitude hemisphere" }),
    };
    let lon = parse_coordinate(field(5)?, 3, "longitude")?;
    let lon = match field(6)? {
        "E" => lon,
        "W" => -lon,
        _ => return Err(ParseError::MalformedNumber { field: "longitude hemisphere" }),
    };
    let speed_knots = parse_unsigned(field(7)?, "speed")?;
    let course_deg = parse_unsigned(field(8)?, "course")?;
    if course_deg >= 360.0 {
        return Err(ParseError::MalformedNumber { field: "course" });
    }
    let date = field(9)?;
    validate_date(date)?;

    let point = GeoPoint::new(lat, lon).map_err(|e| ParseError::MalformedNumber {
        field: if e.field == "lat_deg" { "latitude" } else { "longitude" },
    })?;

    Ok(RmcData {
        utc_time: utc_time.to_string(),
        status,
        point,
        speed_knots,
        course_deg,
        date: date.to_string(),
    })
}

/// Plain decimal: digits with at most one `.`; no sign or exponent.
fn parse_unsigned(s: &str, field: &'static str) -> Result<f64, ParseError> {
    let mut dots = 0;
    let mut digits = 0;
    for b in s.bytes() {
        match b {
            b'.' => dots += 1,
            b'0'..=b'9' => digits += 1,
            _ => return Err(ParseError::MalformedNumber { field }),
        }
    }
    if dots > 1 || digits == 0 {
        return Err(ParseError::MalformedNumber { field });
    }
    s.parse::<f64>().map_err(|_| ParseError::MalformedNumber { field })
}

/// `ddmm.mmmm` (latitude, 2 degree digits) or `dddmm.mmmm` (longitude, 3).
fn parse_coordinate(s: &str, degree_digits: usize, field: &'static str) -> Result<f64, ParseError> {
    let int_len = s.find('.').unwrap_or(s.len());
    if int_len != degree_digits + 2 {
        return Err(ParseError::MalformedNumber { field });
    }
    // all bytes are printable ASCII here, so slicing at a byte index is safe
    let (deg, min) = s.split_at(degree_digits);
    if !deg.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::MalformedNumber { field });
    }
    let degrees: f64 = deg.parse().map_err(|_| ParseError::MalformedNumber { field })?;
    let minutes = parse_unsigned(min, field)?;
    if minutes >= 60.0 {
        return Err(ParseError::MalformedNumber { field });
    }
    Ok(degrees + minutes / 60.0)
}

fn two_digits(s: &str) -> Option<u32> {
    if s.len() == 2 && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

fn validate_time(s: &str) -> Result<(), ParseError> {
    let bad = ParseError::MalformedNumber { field: "utc_time" };
    let (hms, frac) = match s.split_once('.') {
        Some((hms, frac)) => (hms, Some(frac)),
        None => (s, None),
    };
    if hms.len() != 6 {
        return Err(bad);
    }
    let (h, m, sec) = (two_digits(&hms[0..2]), two_digits(&hms[2..4]), two_digits(&hms[4..6]));
    match (h, m, sec) {
        (Some(h), Some(m), Some(sec)) if h < 24 && m < 60 && sec < 60 => {}
        _ => return Err(bad),
    }
    if let Some(frac) = frac {
        if frac.is_empty() || frac.len() > 3 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad);
        }
    }
    Ok(())
}

fn validate_date(s: &str) -> Result<(), ParseError> {
    let bad = ParseError::MalformedNumber { field: "date" };
    if s.len() != 6 {
        return Err(bad);
    }
    match (two_digits(&s[0..2]), two_digits(&s[2..4]), two_digits(&s[4..6])) {
        (Some(d), Some(m), Some(_)) if (1..=31).contains(&d) && (1..=12).contains(&m) => Ok(()),
        _ => Err(bad),
    }
}

pub fn knots_to_kph(knots: f64) -> Result<f64, ContractViolation> {
    if knots.is_nan() || knots < 0.0 {
        return Err(ContractViolation(format!("speed {knots} kn must be >= 0")));
    }
    Ok(knots * KPH_PER_KNOT)
}

/// Convert a parsed sentence into a controller event. A `Void` fix is
/// passed on as `valid = false`.
pub fn to_gps_fix(rmc: &RmcData, t: Timestamp) -> SensorEvent {
    // speed_knots is non-negative by construction of the parser
    let speed_kph = rmc.speed_knots.max(0.0) * KPH_PER_KNOT;
    SensorEvent {
        t,
        payload: SensorPayload::GpsFix(GpsFix {
            point: rmc.point,
            speed_kph,
            valid: rmc.status == FixStatus::Active,
        }),
    }
}
