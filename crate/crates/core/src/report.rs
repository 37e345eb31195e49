//! Output formats: `Φ` tables, the Ferrers diagram of `(Φ(n,1), .., Φ(n,2^n))`
//! as dot list or SVG, and chain export. Everything here is byte-deterministic;
//! all text uses LF line endings.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{format_family, parse_family, Family, FamilyDoc};
use crate::phi::PhiTable;
use crate::witness::Chain;

/// Largest `n` accepted for Ferrers output (about `2^{2n}/2` dots).
pub const FERRERS_MAX_N: u32 = 10;

// ---------------------------------------------------------------------------
// Tables

/// `m\tphi` header, then one row per `m`.
pub fn table_tsv(t: &PhiTable) -> String {
    let mut out = String::from("m\tphi\n");
    for (m, v) in t.values().iter().enumerate() {
        writeln!(out, "{m}\t{v}").unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub n: u32,
    /// `values[m] = Φ(n, m)`.
    pub values: Vec<u64>,
}

impl From<&PhiTable> for TableDoc {
    fn from(t: &PhiTable) -> Self {
        TableDoc {
            n: t.ground_size(),
            values: t.values().to_vec(),
        }
    }
}

pub fn table_json(t: &PhiTable) -> String {
    let mut s = serde_json::to_string_pretty(&TableDoc::from(t)).expect("plain data");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// Ferrers diagram

fn check_ferrers(t: &PhiTable) -> Result<()> {
    if t.ground_size() > FERRERS_MAX_N {
        return Err(Error::TooLarge {
            what: "ferrers diagram",
            n: t.ground_size(),
            max: FERRERS_MAX_N,
        });
    }
    Ok(())
}

/// Dots `(x, y)` for `x ∈ 1..=2^n`, `y ∈ 1..=Φ(n,x)`, column by column.
pub fn ferrers_dots(t: &PhiTable) -> impl Iterator<Item = (u64, u64)> + '_ {
    t.values()
        .iter()
        .enumerate()
        .skip(1)
        .flat_map(|(x, &h)| (1..=h).map(move |y| (x as u64, y)))
}

pub fn ferrers_tsv(t: &PhiTable) -> Result<String> {
    check_ferrers(t)?;
    let mut out = String::from("x\ty\n");
    for (x, y) in ferrers_dots(t) {
        writeln!(out, "{x}\t{y}").unwrap();
    }
    Ok(out)
}

/// Fixed drawing constants for [`ferrers_svg`], in pixels unless noted.
#[derive(Clone, Copy, Debug)]
pub struct SvgStyle {
    pub unit: f64,
    pub margin: f64,
    /// In grid units.
    pub dot_radius: f64,
    pub dot_fill: &'static str,
    pub square_fill: &'static str,
    pub curve_stroke: &'static str,
    pub curve_width: f64,
    pub curve_dash: &'static str,
}

pub const FERRERS_STYLE: SvgStyle = SvgStyle {
    unit: 12.0,
    margin: 12.0,
    dot_radius: 0.35,
    dot_fill: "#000000",
    square_fill: "#d0d0d0",
    curve_stroke: "#808080",
    curve_width: 1.5,
    curve_dash: "6 4",
};

/// Dots on a unit grid (column `x` holds `Φ(n,x)` dots, bottom-aligned), the
/// Durfee square shaded behind them, and `f(n,x) = 2√(2^n x) − x` as a dashed
/// polyline through the integer points.
pub fn ferrers_svg(t: &PhiTable) -> Result<String> {
    check_ferrers(t)?;
    let s = FERRERS_STYLE;
    let n = t.ground_size();
    let side = (1u64 << n) as f64;
    let size = 2.0 * s.margin + side * s.unit;
    let cx = |x: f64| s.margin + (x - 0.5) * s.unit;
    let cy = |y: f64| s.margin + (side - y + 0.5) * s.unit;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.2}" height="{size:.2}" viewBox="0 0 {size:.2} {size:.2}">"#
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect x="0" y="0" width="{size:.2}" height="{size:.2}" fill="#ffffff"/>"##
    )
    .unwrap();

    let d = t.durfee_side() as f64;
    if d > 0.0 {
        writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            s.margin + (side - d) * s.unit,
            s.margin + (side - d) * s.unit,
            d * s.unit,
            d * s.unit,
            s.square_fill
        )
        .unwrap();
    }

    writeln!(out, r#"<g fill="{}">"#, s.dot_fill).unwrap();
    for (x, y) in ferrers_dots(t) {
        writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
            cx(x as f64),
            cy(y as f64),
            s.dot_radius * s.unit
        )
        .unwrap();
    }
    out.push_str("</g>\n");

    let points: Vec<String> = (1..=1u64 << n)
        .map(|x| {
            let f = 2.0 * ((x << n) as f64).sqrt() - x as f64;
            format!("{:.2},{:.2}", cx(x as f64), cy(f))
        })
        .collect();
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{:.2}" stroke-dasharray="{}"/>"#,
        points.join(" "),
        s.curve_stroke,
        s.curve_width,
        s.curve_dash
    )
    .unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

// ---------------------------------------------------------------------------
// Chain export

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainFormat {
    /// `chain n=<n>`, then per index a `# m=<m>` line followed by the family
    /// in the text format of [`format_family`].
    Text,
    /// JSON lines: `{"n":..,"len":..}`, then one `{"m":..,"family":{..}}` per index.
    JsonLines,
}

#[derive(Serialize, Deserialize)]
struct ChainHeader {
    n: u32,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct ChainRecord {
    m: usize,
    family: FamilyDoc,
}

/// Streams `chain` to `w`, one family per record.
pub fn write_chain<W: Write>(chain: &Chain, format: ChainFormat, mut w: W) -> io::Result<()> {
    let n = chain.ground_size();
    match format {
        ChainFormat::Text => {
            writeln!(w, "chain n={n}")?;
            for (m, f) in chain.families().iter().enumerate() {
                writeln!(w, "# m={m}")?;
                w.write_all(format_family(f).as_bytes())?;
            }
        }
        ChainFormat::JsonLines => {
            let header = ChainHeader {
                n,
                len: chain.families().len(),
            };
            serde_json::to_writer(&mut w, &header)?;
            w.write_all(b"\n")?;
            for (m, f) in chain.families().iter().enumerate() {
                serde_json::to_writer(
                    &mut w,
                    &ChainRecord {
                        m,
                        family: FamilyDoc::from(f),
                    },
                )?;
                w.write_all(b"\n")?;
            }
        }
    }
    w.flush()
}

pub fn chain_to_string(chain: &Chain, format: ChainFormat) -> String {
    let mut buf = Vec::new();
    write_chain(chain, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads either chain format back. Records must appear in index order.
pub fn read_chain<R: BufRead>(r: R) -> Result<Chain> {
    let lines: Vec<String> = r
        .lines()
        .collect::<io::Result<_>>()
        .map_err(|e| parse_err(0, e.to_string()))?;
    let first = lines
        .iter()
        .position(|l| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "empty chain document"))?;
    if lines[first].trim_start().starts_with('{') {
        read_json_lines(&lines, first)
    } else {
        read_text(&lines, first)
    }
}

fn read_text(lines: &[String], first: usize) -> Result<Chain> {
    let header = lines[first].trim();
    let n: u32 = header
        .strip_prefix("chain")
        .and_then(|rest| rest.trim().strip_prefix("n="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| parse_err(first + 1, format!("expected `chain n=<n>`, got `{header}`")))?;
    let mut families = Vec::new();
    let mut body: Option<(usize, String)> = None;
    let finish = |body: Option<(usize, String)>, families: &mut Vec<Family>| -> Result<()> {
        if let Some((start, text)) = body {
            let f = parse_family(&text).map_err(|e| match e {
                Error::Parse { line, message } => parse_err(start + line, message),
                other => other,
            })?;
            if f.ground_size() != n {
                return Err(Error::GroundSizeMismatch {
                    left: n,
                    right: f.ground_size(),
                });
            }
            families.push(f);
        }
        Ok(())
    };
    for (i, line) in lines.iter().enumerate().skip(first + 1) {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            finish(body.take(), &mut families)?;
            let m: usize = rest
                .trim()
                .strip_prefix("m=")
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| parse_err(i + 1, format!("expected `# m=<m>`, got `{t}`")))?;
            if m != families.len() {
                return Err(parse_err(i + 1, format!("record m={m} out of order")));
            }
            body = Some((i + 1, String::new()));
        } else if let Some((_, text)) = body.as_mut() {
            text.push_str(line);
            text.push('\n');
        } else if !t.is_empty() {
            return Err(parse_err(i + 1, "content before first `# m=` record"));
        }
    }
    finish(body.take(), &mut families)?;
    Chain::from_families(n, families)
}

fn read_json_lines(lines: &[String], first: usize) -> Result<Chain> {
    let header: ChainHeader =
        serde_json::from_str(&lines[first]).map_err(|e| parse_err(first + 1, e.to_string()))?;
    let mut families = Vec::with_capacity(header.len);
    for (i, line) in lines.iter().enumerate().skip(first + 1) {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ChainRecord =
            serde_json::from_str(line).map_err(|e| parse_err(i + 1, e.to_string()))?;
        if rec.m != families.len() {
            return Err(parse_err(i + 1, format!("record m={} out of order", rec.m)));
        }
        if rec.family.n != header.n {
            return Err(Error::GroundSizeMismatch {
                left: header.n,
                right: rec.family.n,
            });
        }
        families.push(Family::try_from(&rec.family)?);
    }
    if families.len() != header.len {
        return Err(parse_err(
            lines.len(),
            format!(
                "header promises {} records, found {}",
                header.len,
                families.len()
            ),
        ));
    }
    Chain::from_families(header.n, families)
}
