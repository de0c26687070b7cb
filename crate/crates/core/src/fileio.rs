//! Text formats for families and received words.
//!
//! Family file: a `UDM L N K q` header, a field line with the modulus
//! coefficients, a provenance comment, then L blocks of N rows of K
//! space-separated element values (radix-p integers), blocks separated by
//! blank lines:
//!
//! ```text
//! UDM 4 3 3 3
//! GF(3) 0 1
//! # provenance pascal alpha=2
//!
//! 1 0 0
//! 0 1 0
//! 0 0 1
//!
//! ...
//! ```
//!
//! Received word: an `RX L N K q` header, then one line per channel holding
//! the v_l received values followed by `?` markers up to length N.
//!
//! Writing then reading is the identity on both formats, and reading then
//! writing reproduces written files byte for byte.

use thiserror::Error;

use crate::codec::ChannelOutput;
use crate::gf::{field_new, FieldElement, FieldSpec, GfError};
use crate::linalg::MatrixGF;
use crate::udm::{Provenance, UdmError, UdmFamily};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Udm(#[from] UdmError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what} is not a non-negative integer: {tok}")))
}

fn parse_u64(tok: &str, line: usize, what: &str) -> Result<u64, FormatError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what} is not a non-negative integer: {tok}")))
}

fn provenance_line(p: Provenance) -> String {
    match p {
        Provenance::Pascal { alpha } => format!("# provenance pascal alpha={alpha}"),
        Provenance::Monomial { alpha } => format!("# provenance monomial alpha={alpha}"),
        Provenance::QPlus2 { alpha } => format!("# provenance qplus2 alpha={alpha}"),
        Provenance::Transformed => "# provenance transformed".to_string(),
        Provenance::Loaded => "# provenance loaded".to_string(),
    }
}

fn parse_provenance(rest: &str, spec: &FieldSpec, line: usize) -> Result<Provenance, FormatError> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let alpha_of = |toks: &[&str]| -> Result<FieldElement, FormatError> {
        let tok = toks
            .get(1)
            .and_then(|t| t.strip_prefix("alpha="))
            .ok_or_else(|| parse_err(line, "expected alpha=<value> after the variant"))?;
        let v = parse_u64(tok, line, "alpha")?;
        Ok(spec.element(v)?)
    };
    match toks.first() {
        Some(&"pascal") => Ok(Provenance::Pascal {
            alpha: alpha_of(&toks)?,
        }),
        Some(&"monomial") => Ok(Provenance::Monomial {
            alpha: alpha_of(&toks)?,
        }),
        Some(&"qplus2") => Ok(Provenance::QPlus2 {
            alpha: alpha_of(&toks)?,
        }),
        Some(&"transformed") => Ok(Provenance::Transformed),
        Some(&"loaded") => Ok(Provenance::Loaded),
        other => Err(parse_err(
            line,
            format!("unknown provenance tag: {:?}", other.unwrap_or(&"")),
        )),
    }
}

/// Serializes a family in the canonical text form.
pub fn write_family(family: &UdmFamily) -> String {
    let spec = family.spec();
    let mut out = String::new();
    out.push_str(&format!(
        "UDM {} {} {} {}\n",
        family.l(),
        family.n(),
        family.k(),
        spec.q()
    ));
    let modulus: Vec<String> = spec.modulus().iter().map(|c| c.to_string()).collect();
    out.push_str(&format!("GF({}) {}\n", spec.q(), modulus.join(" ")));
    out.push_str(&provenance_line(family.provenance()));
    out.push('\n');
    for m in family.matrices() {
        out.push('\n');
        for r in 0..m.rows() {
            let row: Vec<String> = m.row(r).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses a family file; returns parameter warnings alongside (the loader
/// warns rather than rejects when K > LN).
pub fn read_family(text: &str) -> Result<(UdmFamily, Vec<String>), FormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut idx = 0;

    let header: Vec<&str> = lines
        .first()
        .ok_or_else(|| parse_err(1, "empty file, expected a UDM header"))?
        .split_whitespace()
        .collect();
    if header.len() != 5 || header[0] != "UDM" {
        return Err(parse_err(1, "expected header: UDM L N K q"));
    }
    let l = parse_usize(header[1], 1, "L")?;
    let n = parse_usize(header[2], 1, "N")?;
    let k = parse_usize(header[3], 1, "K")?;
    let q = parse_u64(header[4], 1, "q")?;
    let spec = field_new(q)?;
    idx += 1;

    // field line: GF(q) plus modulus coefficients
    let field_line: Vec<&str> = lines
        .get(idx)
        .ok_or_else(|| parse_err(idx + 1, "missing field line"))?
        .split_whitespace()
        .collect();
    let expect_tag = format!("GF({q})");
    if field_line.first() != Some(&expect_tag.as_str()) {
        return Err(parse_err(
            idx + 1,
            format!("expected field line starting with {expect_tag}"),
        ));
    }
    let modulus: Vec<u64> = field_line[1..]
        .iter()
        .map(|t| parse_u64(t, idx + 1, "modulus coefficient"))
        .collect::<Result<_, _>>()?;
    if modulus != spec.modulus() {
        return Err(parse_err(
            idx + 1,
            format!(
                "modulus {:?} does not match the canonical modulus {:?} for GF({q})",
                modulus,
                spec.modulus()
            ),
        ));
    }
    idx += 1;

    // comment lines; a provenance comment is recognized, others skipped
    let mut provenance = Provenance::Loaded;
    while let Some(line) = lines.get(idx) {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(tag) = rest.strip_prefix("provenance") {
                provenance = parse_provenance(tag.trim(), &spec, idx + 1)?;
            }
            idx += 1;
        } else {
            break;
        }
    }

    // L blocks of N rows, separated by blank lines
    let mut matrices = Vec::with_capacity(l);
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for (off, line) in lines[idx..].iter().enumerate() {
        let line_no = idx + off + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if !rows.is_empty() {
                matrices.push(MatrixGF::from_rows(std::mem::take(&mut rows)));
            }
            continue;
        }
        let row: Vec<FieldElement> = trimmed
            .split_whitespace()
            .map(|t| {
                let v = parse_u64(t, line_no, "element")?;
                spec.element(v)
                    .map_err(|e| parse_err(line_no, e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != k {
            return Err(parse_err(
                line_no,
                format!("row has {} entries, expected K = {k}", row.len()),
            ));
        }
        rows.push(row);
        if rows.len() > n {
            return Err(parse_err(
                line_no,
                format!("block has more than N = {n} rows"),
            ));
        }
    }
    if !rows.is_empty() {
        matrices.push(MatrixGF::from_rows(rows));
    }
    if matrices.len() != l {
        return Err(parse_err(
            lines.len(),
            format!("found {} matrix blocks, expected L = {l}", matrices.len()),
        ));
    }
    for (i, m) in matrices.iter().enumerate() {
        if m.rows() != n {
            return Err(parse_err(
                lines.len(),
                format!("block {i} has {} rows, expected N = {n}", m.rows()),
            ));
        }
    }
    let family = UdmFamily::new(spec, matrices, provenance)?;
    let warnings = family.parameter_warnings();
    Ok((family, warnings))
}

/// Serializes a received word: per channel, the prefix values then `?`
/// markers up to length N.
pub fn write_received(out: &ChannelOutput, k: usize, spec: &FieldSpec) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "RX {} {} {} {}\n",
        out.channels(),
        out.n(),
        k,
        spec.q()
    ));
    for l in 0..out.channels() {
        let mut toks: Vec<String> = out.prefix(l).iter().map(|e| e.to_string()).collect();
        toks.extend(std::iter::repeat_n("?".to_string(), out.n() - out.prefix(l).len()));
        s.push_str(&toks.join(" "));
        s.push('\n');
    }
    s
}

/// A parsed received-word file; element values are still raw integers so the
/// caller can bind them to the family's field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedWordFile {
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub prefixes: Vec<Vec<u64>>,
}

impl ReceivedWordFile {
    pub fn into_channel_output(self, spec: &FieldSpec) -> Result<ChannelOutput, FormatError> {
        let prefixes: Vec<Vec<FieldElement>> = self
            .prefixes
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&v| spec.element(v).map_err(FormatError::from))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        ChannelOutput::new(self.n, prefixes).map_err(|e| parse_err(0, e.to_string()))
    }
}

/// Parses a received-word file, enforcing the prefix structure (values first,
/// then only `?` markers).
pub fn read_received(text: &str) -> Result<ReceivedWordFile, FormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let header: Vec<&str> = lines
        .first()
        .ok_or_else(|| parse_err(1, "empty file, expected an RX header"))?
        .split_whitespace()
        .collect();
    if header.len() != 5 || header[0] != "RX" {
        return Err(parse_err(1, "expected header: RX L N K q"));
    }
    let l = parse_usize(header[1], 1, "L")?;
    let n = parse_usize(header[2], 1, "N")?;
    let k = parse_usize(header[3], 1, "K")?;
    let q = parse_u64(header[4], 1, "q")?;

    let mut prefixes = Vec::with_capacity(l);
    for ch in 0..l {
        let line_no = ch + 2;
        let toks: Vec<&str> = lines
            .get(ch + 1)
            .ok_or_else(|| parse_err(line_no, format!("missing line for channel {ch}")))?
            .split_whitespace()
            .collect();
        if toks.len() != n {
            return Err(parse_err(
                line_no,
                format!("channel line has {} symbols, expected N = {n}", toks.len()),
            ));
        }
        let mut prefix = Vec::new();
        let mut erased_seen = false;
        for t in toks {
            if t == "?" {
                erased_seen = true;
            } else {
                if erased_seen {
                    return Err(parse_err(
                        line_no,
                        "non-erased symbol after a ? marker breaks the prefix structure",
                    ));
                }
                prefix.push(parse_u64(t, line_no, "element")?);
                if *prefix.last().unwrap() >= q {
                    return Err(parse_err(
                        line_no,
                        format!("element {} is out of range for GF({q})", prefix.last().unwrap()),
                    ));
                }
            }
        }
        prefixes.push(prefix);
    }
    if lines.len() > l + 1 && lines[l + 1..].iter().any(|s| !s.trim().is_empty()) {
        return Err(parse_err(l + 2, "trailing content after the channel lines"));
    }
    Ok(ReceivedWordFile {
        l,
        n,
        k,
        q,
        prefixes,
    })
}
