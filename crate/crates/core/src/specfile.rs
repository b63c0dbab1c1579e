//! JSON cipher specifications and the small table/matrix file formats.
//!
//! ```json
//! {
//!   "layout": { "m": 3, "b": 3 },
//!   "repeat": 3,
//!   "rounds": [ { "bricks": "inverse_gf2m", "layer": "rotation" } ],
//!   "metadata": { "name": "rotation cipher" }
//! }
//! ```
//!
//! `bricks` is a builtin name (`inverse_gf2m`, `present`, `identity`), a
//! table (array of entries, or one string of whitespace/comma separated hex
//! values), or a list of 1 or `b` such items. `layer` is a builtin name
//! (`rotation`, `identity`, `aes_sr_mc`, `butterfly`) or `d` hex rows, row `i`
//! being the image of the `i`-th unit vector. `repeat` (default 1) repeats
//! the round list.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::cipher::{Round, TbCipher};
use crate::error::Error;
use crate::gf2::{BitMatrix, BrickLayout};
use crate::hex::{parse_list, parse_word};
use crate::mixing::MixingLayer;
use crate::sbox::SBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecErrorKind {
    /// Malformed JSON or a value of the wrong shape.
    Syntax,
    /// A well-formed value that is not acceptable (non-bijective table,
    /// inconsistent dimensions, ...).
    Invalid,
    /// A layer matrix that is not invertible.
    Singular,
}

/// A problem in a spec file, located by 1-based line and column and, where
/// known, the JSON path of the offending value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub line: usize,
    pub column: usize,
    pub path: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)?;
        if !self.path.is_empty() {
            write!(f, " ({})", self.path)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for SpecError {}

pub type SpecResult<T> = std::result::Result<T, SpecError>;

/// A parsed cipher specification.
#[derive(Clone, Debug)]
pub struct CipherSpec {
    pub cipher: TbCipher,
    pub metadata: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    m: usize,
    b: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRound<'a> {
    #[serde(borrow)]
    bricks: &'a RawValue,
    #[serde(borrow)]
    layer: &'a RawValue,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec<'a> {
    #[serde(borrow)]
    layout: &'a RawValue,
    #[serde(borrow)]
    rounds: Vec<RawRound<'a>>,
    #[serde(default, borrow)]
    repeat: Option<&'a RawValue>,
    #[serde(default)]
    metadata: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayerFile<'a> {
    #[serde(borrow)]
    layout: &'a RawValue,
    #[serde(borrow)]
    layer: &'a RawValue,
}

/// Locates values borrowed from one source text.
struct Source<'s> {
    text: &'s str,
}

impl<'s> Source<'s> {
    fn position(&self, raw: &str) -> (usize, usize) {
        let offset = (raw.as_ptr() as usize)
            .checked_sub(self.text.as_ptr() as usize)
            .filter(|&o| o <= self.text.len())
            .unwrap_or(0);
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error(&self, raw: &RawValue, kind: SpecErrorKind, path: &str, message: impl Into<String>) -> SpecError {
        let (line, column) = self.position(raw.get());
        SpecError {
            kind,
            line,
            column,
            path: path.to_string(),
            message: message.into(),
        }
    }

    /// Parses a borrowed value, translating positions back to the source.
    fn parse<T: Deserialize<'s>>(&self, raw: &'s RawValue, path: &str) -> SpecResult<T> {
        serde_json::from_str(raw.get()).map_err(|e| {
            let (line, column) = self.position(raw.get());
            let (l, c) = (e.line().max(1), e.column().max(1));
            let message = strip_position(&e);
            SpecError {
                kind: SpecErrorKind::Syntax,
                line: line + l - 1,
                column: if l == 1 { column + c - 1 } else { c },
                path: path.to_string(),
                message,
            }
        })
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn top_level<'s, T: Deserialize<'s>>(text: &'s str) -> SpecResult<T> {
    serde_json::from_str(text).map_err(|e| SpecError {
        kind: SpecErrorKind::Syntax,
        line: e.line().max(1),
        column: e.column().max(1),
        path: String::new(),
        message: strip_position(&e),
    })
}

fn starts_with(raw: &RawValue, c: char) -> bool {
    raw.get().trim_start().starts_with(c)
}

fn invalid(src: &Source<'_>, raw: &RawValue, path: &str, e: Error) -> SpecError {
    let kind = match e {
        Error::Singular { .. } => SpecErrorKind::Singular,
        _ => SpecErrorKind::Invalid,
    };
    src.error(raw, kind, path, e.to_string())
}

fn parse_layout<'s>(src: &Source<'s>, raw: &'s RawValue) -> SpecResult<BrickLayout> {
    let l: RawLayout = src.parse(raw, "layout")?;
    BrickLayout::new(l.m, l.b).map_err(|e| invalid(src, raw, "layout", e))
}

fn builtin_brick(name: &str, m: usize) -> Option<Result<SBox, Error>> {
    Some(match name {
        "inverse_gf2m" => SBox::inverse_gf2m(m),
        "identity" => SBox::identity(m),
        "present" if m == 4 => Ok(SBox::present()),
        "present" => Err(Error::InvalidArgument(format!(
            "builtin \"present\" is a 4-bit S-box, layout has m = {m}"
        ))),
        _ => return None,
    })
}

fn table_to_sbox(values: Vec<u128>, m: usize) -> Result<SBox, Error> {
    let n = 1u128 << m;
    if let Some(v) = values.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidArgument(format!(
            "table entry {v:#x} does not fit in {m} bits"
        )));
    }
    SBox::with_width(m, values.into_iter().map(|v| v as u16).collect())
}

/// Table entry: a JSON number or a hex string.
#[derive(Deserialize)]
#[serde(untagged)]
enum Entry<'a> {
    Num(u64),
    Str(&'a str),
}

fn is_entry(raw: &RawValue) -> bool {
    match serde_json::from_str::<Entry>(raw.get()) {
        Ok(Entry::Num(_)) => true,
        Ok(Entry::Str(s)) => parse_word(s).is_ok(),
        Err(_) => false,
    }
}

fn parse_entries<'s>(src: &Source<'s>, items: &[&'s RawValue], path: &str) -> SpecResult<Vec<u128>> {
    items
        .iter()
        .enumerate()
        .map(|(i, raw)| {
            let p = format!("{path}[{i}]");
            match src.parse::<Entry>(raw, &p)? {
                Entry::Num(v) => Ok(v as u128),
                Entry::Str(s) => parse_word(s).map_err(|e| src.error(raw, SpecErrorKind::Syntax, &p, e)),
            }
        })
        .collect()
}

/// One brick: builtin name, table string or table array.
fn parse_brick<'s>(src: &Source<'s>, raw: &'s RawValue, path: &str, m: usize) -> SpecResult<SBox> {
    if starts_with(raw, '"') {
        let s: &str = src.parse(raw, path)?;
        if let Some(r) = builtin_brick(s, m) {
            return r.map_err(|e| invalid(src, raw, path, e));
        }
        let values = parse_list(s).map_err(|e| {
            src.error(raw, SpecErrorKind::Syntax, path, format!("not a builtin S-box or a table: {e}"))
        })?;
        return table_to_sbox(values, m).map_err(|e| invalid(src, raw, path, e));
    }
    let items: Vec<&RawValue> = src.parse(raw, path)?;
    let values = parse_entries(src, &items, path)?;
    table_to_sbox(values, m).map_err(|e| invalid(src, raw, path, e))
}

fn parse_bricks<'s>(src: &Source<'s>, raw: &'s RawValue, path: &str, layout: BrickLayout) -> SpecResult<Vec<SBox>> {
    let (m, b) = (layout.m(), layout.b());
    if !starts_with(raw, '[') {
        return Ok(vec![parse_brick(src, raw, path, m)?; b]);
    }
    let items: Vec<&RawValue> = src.parse(raw, path)?;
    let table_like = items.iter().all(|r| is_entry(r))
        || (items.len() != 1 && items.len() != b)
        || items.iter().any(|r| !starts_with(r, '"') && !starts_with(r, '['));
    if !items.is_empty() && table_like {
        return Ok(vec![parse_brick(src, raw, path, m)?; b]);
    }
    match items.len() {
        0 => Err(src.error(raw, SpecErrorKind::Invalid, path, "empty brick list")),
        1 => Ok(vec![parse_brick(src, items[0], &format!("{path}[0]"), m)?; b]),
        _ => items
            .iter()
            .enumerate()
            .map(|(i, r)| parse_brick(src, r, &format!("{path}[{i}]"), m))
            .collect(),
    }
}

fn parse_layer<'s>(src: &Source<'s>, raw: &'s RawValue, path: &str, layout: BrickLayout) -> SpecResult<MixingLayer> {
    let d = layout.d();
    if starts_with(raw, '"') {
        let s: &str = src.parse(raw, path)?;
        let r = match s {
            "rotation" => Ok(MixingLayer::rotation(layout)),
            "identity" => Ok(MixingLayer::identity(layout)),
            "aes_sr_mc" if (layout.m(), layout.b()) == (8, 16) => Ok(MixingLayer::aes_sr_mc()),
            "aes_sr_mc" => Err(Error::InvalidArgument("builtin \"aes_sr_mc\" needs m = 8, b = 16".into())),
            "butterfly" if layout.b() == 2 => MixingLayer::two_brick_butterfly(layout.m()),
            "butterfly" => Err(Error::InvalidArgument("builtin \"butterfly\" needs b = 2".into())),
            other => {
                return Err(src.error(
                    raw,
                    SpecErrorKind::Invalid,
                    path,
                    format!("unknown layer builtin {other:?}; expected rotation, identity, aes_sr_mc or butterfly"),
                ))
            }
        };
        return r.map_err(|e| invalid(src, raw, path, e));
    }
    let items: Vec<&RawValue> = src.parse(raw, path)?;
    if items.len() != d {
        return Err(src.error(
            raw,
            SpecErrorKind::Invalid,
            path,
            format!("expected {d} matrix rows, found {}", items.len()),
        ));
    }
    let rows = parse_entries(src, &items, path)?;
    for (i, (&row, r)) in rows.iter().zip(&items).enumerate() {
        if d < 128 && row >> d != 0 {
            return Err(src.error(
                r,
                SpecErrorKind::Invalid,
                &format!("{path}[{i}]"),
                format!("row {row:#x} has bits beyond column {}", d - 1),
            ));
        }
    }
    let matrix = BitMatrix::from_rows(rows, d).map_err(|e| invalid(src, raw, path, e))?;
    MixingLayer::new(matrix, layout).map_err(|e| invalid(src, raw, path, e))
}

/// Parses and validates a cipher specification.
pub fn parse_cipher_spec(text: &str) -> SpecResult<CipherSpec> {
    let src = Source { text };
    let spec: RawSpec = top_level(text)?;
    let layout = parse_layout(&src, spec.layout)?;
    let repeat = match spec.repeat {
        None => 1,
        Some(raw) => {
            let n: usize = src.parse(raw, "repeat")?;
            if n == 0 {
                return Err(src.error(raw, SpecErrorKind::Invalid, "repeat", "repeat must be at least 1"));
            }
            n
        }
    };
    if spec.rounds.is_empty() {
        return Err(SpecError {
            kind: SpecErrorKind::Invalid,
            line: 1,
            column: 1,
            path: "rounds".into(),
            message: "at least one round is required".into(),
        });
    }
    let mut rounds = Vec::with_capacity(spec.rounds.len());
    for (i, r) in spec.rounds.iter().enumerate() {
        let bricks = parse_bricks(&src, r.bricks, &format!("rounds[{i}].bricks"), layout)?;
        let layer = parse_layer(&src, r.layer, &format!("rounds[{i}].layer"), layout)?;
        let round = Round::new(bricks, layer).map_err(|e| invalid(&src, r.bricks, &format!("rounds[{i}]"), e))?;
        rounds.push(round);
    }
    let all: Vec<Round> = (0..repeat).flat_map(|_| rounds.iter().cloned()).collect();
    let cipher = TbCipher::new(layout, all).map_err(|e| SpecError {
        kind: SpecErrorKind::Invalid,
        line: 1,
        column: 1,
        path: String::new(),
        message: e.to_string(),
    })?;
    Ok(CipherSpec {
        cipher,
        metadata: spec.metadata,
    })
}

/// `{"layout": {"m": .., "b": ..}, "layer": ...}` with `layer` as in a
/// cipher spec.
pub fn parse_layer_file(text: &str) -> SpecResult<MixingLayer> {
    let src = Source { text };
    let f: RawLayerFile = top_level(text)?;
    let layout = parse_layout(&src, f.layout)?;
    parse_layer(&src, f.layer, "layer", layout)
}

/// Whitespace or comma separated hex values; `#` starts a comment. The
/// width is inferred from the table length.
pub fn parse_table_file(text: &str) -> SpecResult<SBox> {
    let mut values = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        let mut col = 0;
        for token in content.split(|c: char| c.is_whitespace() || c == ',') {
            let start = col;
            col += token.len() + 1;
            if token.is_empty() {
                continue;
            }
            let v = parse_word(token).map_err(|message| SpecError {
                kind: SpecErrorKind::Syntax,
                line: ln + 1,
                column: content[..start].chars().count() + 1,
                path: format!("entry {}", values.len()),
                message,
            })?;
            values.push(v);
        }
    }
    let whole = |e: Error| SpecError {
        kind: SpecErrorKind::Invalid,
        line: 1,
        column: 1,
        path: String::new(),
        message: e.to_string(),
    };
    if values.len() < 4 || !values.len().is_power_of_two() {
        return Err(whole(Error::BadTableLength(values.len())));
    }
    let m = values.len().trailing_zeros() as usize;
    table_to_sbox(values, m).map_err(whole)
}

#[derive(Serialize)]
struct OutLayout {
    m: usize,
    b: usize,
}

#[derive(Serialize)]
struct OutRound {
    bricks: Vec<String>,
    layer: Vec<String>,
}

#[derive(Serialize)]
struct OutSpec<'a> {
    layout: OutLayout,
    rounds: Vec<OutRound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<&'a serde_json::Value>,
}

fn table_string(f: &SBox) -> String {
    let w = f.m().div_ceil(4);
    let parts: Vec<String> = f.table().iter().map(|v| format!("{v:0w$x}")).collect();
    parts.join(" ")
}

/// Writes `cipher` as an explicit spec (every table and row spelled out).
pub fn cipher_to_spec(cipher: &TbCipher, metadata: Option<&serde_json::Value>) -> String {
    let l = cipher.layout();
    let w = l.d().div_ceil(4);
    let spec = OutSpec {
        layout: OutLayout { m: l.m(), b: l.b() },
        rounds: cipher
            .rounds()
            .iter()
            .map(|r| OutRound {
                bricks: r.bricks().iter().map(table_string).collect(),
                layer: r.layer().matrix().rows().iter().map(|row| format!("0x{row:0w$x}")).collect(),
            })
            .collect(),
        metadata,
    };
    serde_json::to_string_pretty(&spec).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROTATION: &str = r#"{
  "layout": { "m": 3, "b": 3 },
  "repeat": 3,
  "rounds": [ { "bricks": "inverse_gf2m", "layer": "rotation" } ]
}"#;

    #[test]
    fn builtin_rotation_spec() {
        let spec = parse_cipher_spec(ROTATION).unwrap();
        let c = TbCipher::rotation(3, 3, 3).unwrap();
        assert_eq!(spec.cipher.rounds().len(), 3);
        let keys = [5u128, 77, 300];
        for x in [0u128, 1, 200, 511] {
            assert_eq!(spec.cipher.encrypt_word(&keys, x), c.encrypt_word(&keys, x));
        }
    }

    #[test]
    fn explicit_round_trip() {
        let c = TbCipher::rotation(3, 3, 2).unwrap();
        let meta = serde_json::json!({"name": "x"});
        let text = cipher_to_spec(&c, Some(&meta));
        let back = parse_cipher_spec(&text).unwrap();
        assert_eq!(back.metadata, Some(meta));
        assert_eq!(cipher_to_spec(&back.cipher, None), cipher_to_spec(&c, None));
    }

    #[test]
    fn per_brick_lists_and_tables() {
        let text = r#"{"layout": {"m": 2, "b": 2}, "rounds": [
            {"bricks": ["identity", "0 2 1 3"], "layer": ["1", "2", "4", "0x8"]},
            {"bricks": [0, 1, 3, 2], "layer": "identity"},
            {"bricks": [["0x1", 0, 2, 3]], "layer": "rotation"}
        ]}"#;
        let c = parse_cipher_spec(text).unwrap().cipher;
        let r = c.rounds();
        assert_eq!(r[0].bricks()[1].table(), &[0, 2, 1, 3]);
        assert_eq!(r[1].bricks()[0].table(), &[0, 1, 3, 2]);
        assert_eq!(r[2].bricks()[1].table(), &[1, 0, 2, 3]);
    }

    fn err(text: &str) -> SpecError {
        parse_cipher_spec(text).unwrap_err()
    }

    #[test]
    fn errors_point_at_the_value() {
        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": [0, 1, 1, 2], \"layer\": \"identity\"}]}");
        assert_eq!((e.kind, e.line, e.column), (SpecErrorKind::Invalid, 3, 14));
        assert_eq!(e.path, "rounds[0].bricks");

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": \"identity\",\n   \"layer\": [\"1\", \"2\", \"4\", \"4\"]}]}");
        assert_eq!((e.kind, e.line, e.column), (SpecErrorKind::Singular, 4, 13));

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": [\"0\", \"1\", \"zz\", \"2\"], \"layer\": \"identity\"}]}");
        assert_eq!((e.kind, e.line, e.path.as_str()), (SpecErrorKind::Syntax, 3, "rounds[0].bricks[2]"));
        assert_eq!(e.column, 25);

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": \"present\", \"layer\": \"identity\"}]}");
        assert_eq!((e.kind, e.line), (SpecErrorKind::Invalid, 3));

        let e = err("{\"layout\": {\"m\": 2, \"b\": 1}, \"rounds\": []}");
        assert_eq!((e.kind, e.path.as_str()), (SpecErrorKind::Invalid, "layout"));

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": \"identity\", \"layer\": \"shuffle\"}]}");
        assert_eq!((e.line, e.path.as_str()), (3, "rounds[0].layer"));

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": \"identity\", \"layer\": [\"1\", \"2\", \"4\", \"0x18\"]}]}");
        assert_eq!(e.path, "rounds[0].layer[3]");

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": \"identity\", \"layer\": \"identity\", \"key\": 1}]}");
        assert_eq!((e.kind, e.line), (SpecErrorKind::Syntax, 3));

        let e = err("{\"layout\": {\"m\": 2, \"b\": 2},\n \"rounds\": [\n  {\"bricks\": \"identity\" \"layer\": 1}]}");
        assert_eq!((e.kind, e.line), (SpecErrorKind::Syntax, 3));
    }

    #[test]
    fn layer_and_table_files() {
        let l = parse_layer_file(r#"{"layout": {"m": 3, "b": 4}, "layer": "rotation"}"#).unwrap();
        assert_eq!(l, MixingLayer::rotation(BrickLayout::new(3, 4).unwrap()));
        let e = parse_layer_file("{\"layout\": {\"m\": 2, \"b\": 2},\n\"layer\": [\"1\",\"1\",\"4\",\"8\"]}").unwrap_err();
        assert_eq!((e.kind, e.line), (SpecErrorKind::Singular, 2));

        let f = parse_table_file("# PRESENT\nc 5 6 b 9 0 a d\n3 e f 8 4 7 1 2\n").unwrap();
        assert_eq!(f, SBox::present());
        let e = parse_table_file("0 1\n2 q\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse_table_file("0 1 2").is_err());
        assert!(parse_table_file("0 1 2 2").is_err());
    }
}
