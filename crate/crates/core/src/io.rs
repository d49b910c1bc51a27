//! Text formats: spectrum CSV, spectral-data CSV and generator presentations.
//!
//! Spectrum files start with the header
//! `length,holonomy,multiplicity,primitive,root_length,power_index`, may carry
//! `#horizon=`, `#systole=` and `#complete=` metadata rows, and print floats
//! with 17 significant digits so that export → import → export is
//! byte-identical.

use crate::algebra::{canonicalize_unit, Mat2, DEFAULT_TOL};
use crate::enumeration::GroupPresentation;
use crate::error::{Error, Result};
use crate::measures::SpectralDatum;
use crate::spectrum::{GeodesicClass, SpectrumTable};
use num_complex::Complex64;
use std::fs;
use std::path::Path;
use std::str::FromStr;

pub const SPECTRUM_HEADER: &str = "length,holonomy,multiplicity,primitive,root_length,power_index";
pub const SPECTRAL_HEADER: &str = "re_nu,im_nu,p,multiplicity";

/// Shortest fixed format that round-trips an f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_error(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_field<T: FromStr>(raw: &str, line: usize, field: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.trim()
        .parse::<T>()
        .map_err(|e| parse_error(line, field, format!("`{raw}`: {e}")))
}

fn parse_bool(raw: &str, line: usize, field: &str) -> Result<bool> {
    match raw.trim() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(parse_error(line, field, format!("`{other}` is not a boolean"))),
    }
}

/// Splits a CSV text into `#key=value` metadata (with line numbers) and a
/// body for the csv reader with comment lines blanked out.
fn split_metadata(text: &str) -> (Vec<(usize, String, String)>, String) {
    let mut meta = Vec::new();
    let mut body = String::with_capacity(text.len());
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.push((i + 1, k.trim().to_string(), v.trim().to_string()));
            }
            body.push('\n');
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    (meta, body)
}

/// Reads records with the csv crate, checking the header. Yields the
/// 1-based file line of each record.
fn read_records(body: &str, header: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let expected: Vec<&str> = header.split(',').collect();
    let mut out = Vec::new();
    let mut seen_header = false;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, "record", e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if !seen_header {
            let got: Vec<&str> = rec.iter().collect();
            if got != expected {
                return Err(parse_error(line, "header", format!("expected `{header}`, got `{}`", got.join(","))));
            }
            seen_header = true;
            continue;
        }
        if rec.len() != expected.len() {
            return Err(parse_error(
                line,
                "record",
                format!("expected {} fields, got {}", expected.len(), rec.len()),
            ));
        }
        out.push((line, rec));
    }
    if !seen_header {
        return Err(parse_error(1, "header", format!("missing header `{header}`")));
    }
    Ok(out)
}

/// Serializes a table in canonical form.
pub fn spectrum_to_string(table: &SpectrumTable) -> String {
    let mut out = String::new();
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    out.push_str(&format!("#horizon={}\n", fmt_float(table.horizon())));
    out.push_str(&format!("#systole={}\n", fmt_float(table.systole())));
    out.push_str(&format!("#complete={}\n", table.complete()));
    for c in table.classes() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_float(c.length),
            fmt_float(c.holonomy),
            c.multiplicity,
            c.primitive,
            fmt_float(c.root_length),
            c.power_index
        ));
    }
    out
}

/// Parses a spectrum file. Without `#horizon=` the horizon is the maximum
/// length; without `#complete=` the table is taken as complete.
pub fn spectrum_from_str(text: &str) -> Result<SpectrumTable> {
    let (meta, body) = split_metadata(text);
    let mut horizon = None;
    let mut systole = None;
    let mut complete = true;
    for (line, key, value) in &meta {
        match key.as_str() {
            "horizon" => horizon = Some(parse_field::<f64>(value, *line, "horizon")?),
            "systole" => systole = Some(parse_field::<f64>(value, *line, "systole")?),
            "complete" => complete = parse_bool(value, *line, "complete")?,
            _ => {}
        }
    }
    let mut classes = Vec::new();
    for (line, rec) in read_records(&body, SPECTRUM_HEADER)? {
        let c = GeodesicClass {
            length: parse_field(&rec[0], line, "length")?,
            holonomy: parse_field(&rec[1], line, "holonomy")?,
            multiplicity: parse_field(&rec[2], line, "multiplicity")?,
            primitive: parse_bool(&rec[3], line, "primitive")?,
            root_length: parse_field(&rec[4], line, "root_length")?,
            power_index: parse_field(&rec[5], line, "power_index")?,
        };
        c.check(line)?;
        classes.push(c);
    }
    let horizon = horizon.unwrap_or_else(|| classes.iter().map(|c| c.length).fold(0.0, f64::max));
    if let Some(max) = classes.iter().map(|c| c.length).reduce(f64::max) {
        if max > horizon {
            return Err(Error::InvariantViolation {
                row: 0,
                invariant: format!("class length {max} beyond declared horizon {horizon}"),
            });
        }
    }
    SpectrumTable::new(classes, horizon, complete, systole)
}

pub fn export_spectrum(table: &SpectrumTable, path: &Path) -> Result<()> {
    fs::write(path, spectrum_to_string(table))?;
    Ok(())
}

pub fn import_spectrum(path: &Path) -> Result<SpectrumTable> {
    spectrum_from_str(&fs::read_to_string(path)?)
}

pub fn spectral_to_string(data: &[SpectralDatum]) -> String {
    let mut out = String::from(SPECTRAL_HEADER);
    out.push('\n');
    for d in data {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(d.nu.re),
            fmt_float(d.nu.im),
            d.p,
            d.multiplicity
        ));
    }
    out
}

pub fn spectral_from_str(text: &str) -> Result<Vec<SpectralDatum>> {
    let (_, body) = split_metadata(text);
    read_records(&body, SPECTRAL_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let nu = Complex64::new(
                parse_field(&rec[0], line, "re_nu")?,
                parse_field(&rec[1], line, "im_nu")?,
            );
            let p = parse_field(&rec[2], line, "p")?;
            let m = parse_field(&rec[3], line, "multiplicity")?;
            SpectralDatum::new(nu, p, m).map_err(|e| parse_error(line, "re_nu", e.to_string()))
        })
        .collect()
}

pub fn import_spectral(path: &Path) -> Result<Vec<SpectralDatum>> {
    spectral_from_str(&fs::read_to_string(path)?)
}

pub fn export_spectral(data: &[SpectralDatum], path: &Path) -> Result<()> {
    fs::write(path, spectral_to_string(data))?;
    Ok(())
}

/// One generator per line as 8 whitespace-separated reals
/// (Re a, Im a, Re b, Im b, Re c, Im c, Re d, Im d); `#` starts a comment line.
pub fn presentation_from_str(text: &str, name: &str, source: &str) -> Result<GroupPresentation> {
    let mut matrices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(parse_error(line_no, "generator", format!("expected 8 reals, got {}", fields.len())));
        }
        let mut r = [0.0; 8];
        for (j, f) in fields.iter().enumerate() {
            r[j] = parse_field(f, line_no, "generator")?;
        }
        let m = Mat2::from_reals(r);
        canonicalize_unit(m, DEFAULT_TOL).map_err(|e| parse_error(line_no, "determinant", e.to_string()))?;
        matrices.push(m);
    }
    GroupPresentation::new(name, source, &matrices)
}

pub fn import_presentation(path: &Path) -> Result<GroupPresentation> {
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map_or_else(|| "presentation".to_string(), |s| s.to_string_lossy().into_owned());
    presentation_from_str(&text, &name, &path.display().to_string())
}

pub fn presentation_to_string(p: &GroupPresentation) -> String {
    let mut out = format!("# {}\n", p.name);
    for g in p.generators() {
        let cells: Vec<String> = g.matrix().to_reals().iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
