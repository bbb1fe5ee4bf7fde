//! Canonical JSON emission.
//!
//! All tool output goes through one serializer so that repeated runs are
//! byte-identical: compact layout, struct-ordered keys, and every float
//! printed with 17 significant digits (`{:.16e}`), enough to reconstruct
//! the exact f64 bit pattern on parse.

use serde::Serialize;
use std::io::Write;

use crate::error::Result;

/// `serde_json` formatter that pins float formatting to 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{:.16e}", value)
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{:.7e}", value)
    }
}

/// Serialize `value` to the canonical JSON string (no trailing newline).
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser)?;
    // SigDigits only ever writes valid UTF-8.
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

/// Format one float the same way the JSON emitter does.
pub fn fmt_f64(value: f64) -> String {
    format!("{:.16e}", value)
}
