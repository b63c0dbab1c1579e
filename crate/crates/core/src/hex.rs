//! Hex parsing shared by the file formats.

pub fn parse_word(s: &str) -> Result<u128, String> {
    let t = s.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t)
        .replace('_', "");
    if digits.is_empty() {
        return Err(format!("empty hex value {s:?}"));
    }
    u128::from_str_radix(&digits, 16).map_err(|e| format!("bad hex value {s:?}: {e}"))
}

/// Splits on whitespace and commas.
pub fn parse_list(s: &str) -> Result<Vec<u128>, String> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(parse_word)
        .collect()
}
