//! Byte-stable artifact writers: sorted-key JSON with every float rendered
//! at 17 significant digits (round-trip exact for doubles), CSV sweep
//! tables, and state dumps that reload to the bit.

use std::collections::BTreeMap;
use std::path::Path;

use modvar::{BranchState, CvState, GridSpec, Representation, TwoModeState};
use num_complex::Complex64;
use serde::Deserialize;

use crate::{CliError, CliResult};

/// A JSON value whose object keys are always sorted.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    UInt(u64),
    Float(f64),
    Text(String),
    List(Vec<Json>),
    Map(BTreeMap<String, Json>),
}

impl Json {
    pub fn map(pairs: impl IntoIterator<Item = (&'static str, Json)>) -> Json {
        Json::Map(
            pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn floats(values: impl IntoIterator<Item = f64>) -> Json {
        Json::List(values.into_iter().map(Json::Float).collect())
    }

    /// Pretty-prints with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::UInt(u) => out.push_str(&u.to_string()),
            Json::Float(f) => out.push_str(&render_float(*f)),
            Json::Text(s) => write_escaped(out, s),
            Json::List(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, depth + 1);
                    item.write(out, depth + 1);
                }
                newline(out, depth);
                out.push(']');
            }
            Json::Map(entries) => {
                if entries.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, depth + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, depth + 1);
                }
                newline(out, depth);
                out.push('}');
            }
        }
    }
}

fn newline(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// 17 significant decimal digits; parses back to the identical double.
pub fn render_float(f: f64) -> String {
    if f.is_finite() {
        format!("{f:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Writes an artifact file, mapping failures to the I/O exit class.
pub fn write_artifact(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn grid_json(grid: GridSpec) -> Json {
    Json::map([
        ("period_count", Json::UInt(grid.period_count() as u64)),
        (
            "samples_per_period",
            Json::UInt(grid.samples_per_period() as u64),
        ),
    ])
}

/// Serializes a branch state as position-basis amplitude arrays.
pub fn state_dump_json(state: &BranchState) -> Json {
    let (grid, modes, amps): (GridSpec, u64, Vec<Complex64>) = match state {
        BranchState::Single(s) => (
            s.grid(),
            1,
            s.clone().into_position().amplitudes().to_vec(),
        ),
        BranchState::Two(t) => (t.grid(0), 2, t.amplitudes().to_vec()),
    };
    Json::map([
        ("grid", grid_json(grid)),
        ("im", Json::floats(amps.iter().map(|a| a.im))),
        ("modes", Json::UInt(modes)),
        ("re", Json::floats(amps.iter().map(|a| a.re))),
        ("representation", Json::Text("position".to_string())),
    ])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDump {
    grid: RawGrid,
    modes: usize,
    representation: String,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    samples_per_period: usize,
    period_count: usize,
}

/// Loads a state dump, insisting it matches the configured grid.
pub fn load_state_dump(path: &Path, grid: GridSpec) -> CliResult<BranchState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read state file {}: {e}", path.display())))?;
    let raw: RawDump = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("state file {}: {e}", path.display())))?;
    let dumped = GridSpec::new(raw.grid.samples_per_period, raw.grid.period_count)?;
    if dumped != grid {
        return Err(CliError::Config(format!(
            "state file grid ({}, {}) does not match configured grid ({}, {})",
            raw.grid.samples_per_period,
            raw.grid.period_count,
            grid.samples_per_period(),
            grid.period_count(),
        )));
    }
    if raw.representation != "position" {
        return Err(CliError::Config(format!(
            "state file representation '{}' is not 'position'",
            raw.representation
        )));
    }
    let expected = match raw.modes {
        1 => grid.dim(),
        2 => grid.dim() * grid.dim(),
        other => {
            return Err(CliError::Config(format!(
                "state file declares {other} modes; only 1 or 2 are supported"
            )))
        }
    };
    if raw.re.len() != expected || raw.im.len() != expected {
        return Err(CliError::Config(format!(
            "state file holds {} amplitudes, expected {expected}",
            raw.re.len().min(raw.im.len())
        )));
    }
    let amps: Vec<Complex64> = raw
        .re
        .iter()
        .zip(&raw.im)
        .map(|(re, im)| Complex64::new(*re, *im))
        .collect();
    Ok(if raw.modes == 1 {
        BranchState::Single(CvState::new(grid, Representation::Position, amps)?)
    } else {
        BranchState::Two(TwoModeState::from_amplitudes(grid, grid, amps)?)
    })
}

/// One CSV line from float cells, 17 significant digits each.
pub fn csv_line(cells: &[f64]) -> String {
    let mut line = cells
        .iter()
        .map(|c| render_float(*c))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use modvar::{encode_logical, make_envelope, EnvelopeFamily};

    #[test]
    fn json_renders_sorted_keys_and_full_precision() {
        let value = Json::map([
            ("zeta", Json::Float(0.25)),
            ("alpha", Json::UInt(3)),
            ("note", Json::Text("a \"quoted\" name".to_string())),
            ("items", Json::List(vec![Json::Null, Json::Bool(true)])),
        ]);
        let text = value.render();
        let alpha = text.find("\"alpha\"").unwrap();
        let zeta = text.find("\"zeta\"").unwrap();
        assert!(alpha < zeta);
        assert!(text.contains("2.5000000000000000e-1"));
        assert!(text.contains("\\\"quoted\\\""));
    }

    #[test]
    fn float_rendering_round_trips_exactly() {
        for &x in &[
            0.0,
            1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -7.25e-31,
        ] {
            let back: f64 = render_float(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn state_dump_round_trips_to_the_bit() {
        let grid = GridSpec::new(8, 4).unwrap();
        let env = make_envelope(grid, EnvelopeFamily::default_gaussian()).unwrap();
        let psi = encode_logical(0.3, -1.2, &env).unwrap();
        let state = BranchState::Single(psi);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        write_artifact(&path, &state_dump_json(&state).render()).unwrap();
        let loaded = load_state_dump(&path, grid).unwrap();
        let (a, b) = (state.as_single().unwrap(), loaded.as_single().unwrap());
        let a = a.clone().into_position();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn mismatched_grid_reload_is_a_config_error() {
        let grid = GridSpec::new(8, 4).unwrap();
        let env = make_envelope(grid, EnvelopeFamily::default_gaussian()).unwrap();
        let psi = encode_logical(0.0, 0.0, &env).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        write_artifact(&path, &state_dump_json(&BranchState::Single(psi)).render()).unwrap();
        match load_state_dump(&path, GridSpec::new(16, 4).unwrap()) {
            Err(CliError::Config(msg)) => assert!(msg.contains("does not match"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
