//! Resistance literals with `k`/`M` suffixes and gate weight lists.

use crate::error::ParseError;

fn err(position: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        position,
        message: message.into(),
    }
}

/// Parses `"60.5k"`, `"3M"`, `"470"` (ohms). An optional trailing `ohm` or
/// `Ω` is accepted. `offset` is added to reported positions.
pub fn parse_resistance_at(text: &str, offset: usize) -> Result<f64, ParseError> {
    let lead = text.len() - text.trim_start().len();
    let trimmed = text.trim();
    let pos = offset + lead;
    if trimmed.is_empty() {
        return Err(err(pos, "expected a resistance value"));
    }
    let body = trimmed
        .strip_suffix("ohm")
        .or_else(|| trimmed.strip_suffix('Ω'))
        .unwrap_or(trimmed)
        .trim_end();
    let (number, scale) = match body.chars().last() {
        Some('k') | Some('K') => (&body[..body.len() - 1], 1e3),
        Some('M') => (&body[..body.len() - 1], 1e6),
        _ => (body, 1.0),
    };
    let value: f64 = number
        .parse()
        .map_err(|_| err(pos, format!("invalid resistance {trimmed:?}")))?;
    let ohms = value * scale;
    if !(ohms.is_finite() && ohms > 0.0) {
        return Err(err(
            pos,
            format!("resistance must be positive, got {trimmed:?}"),
        ));
    }
    Ok(ohms)
}

pub fn parse_resistance(text: &str) -> Result<f64, ParseError> {
    parse_resistance_at(text, 0)
}

/// Parses `"M1,M2,...;TH1,TH2,..."` into input and threshold memristances.
pub fn parse_weights(text: &str) -> Result<(Vec<f64>, Vec<f64>), ParseError> {
    let Some(split) = text.find(';') else {
        return Err(err(
            text.len(),
            "expected ';' between input and threshold weights",
        ));
    };
    if text[split + 1..].contains(';') {
        let second = split + 1 + text[split + 1..].find(';').unwrap_or(0);
        return Err(err(second, "unexpected second ';'"));
    }
    let list = |part: &str, base: usize| -> Result<Vec<f64>, ParseError> {
        let mut out = Vec::new();
        let mut start = 0;
        for item in part.split(',') {
            out.push(parse_resistance_at(item, base + start)?);
            start += item.len() + 1;
        }
        Ok(out)
    };
    Ok((
        list(&text[..split], 0)?,
        list(&text[split + 1..], split + 1)?,
    ))
}

/// Formats ohms compactly with a `k` or `M` suffix where it applies.
pub fn format_resistance(ohms: f64) -> String {
    if ohms >= 1e6 {
        format!("{}M", trim(ohms / 1e6))
    } else if ohms >= 1e3 {
        format!("{}k", trim(ohms / 1e3))
    } else {
        trim(ohms)
    }
}

fn trim(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
