//! Binary PGM (P5) reader and writer, bit-exact on canonical files.
//!
//! Canonical encoding: `P5\n{width} {height}\n255\n` followed by the raw
//! row-major pixel bytes. The reader additionally tolerates `#` comment
//! lines and arbitrary whitespace inside the header, so files from other
//! tools load fine; such files re-encode to the canonical form.

use crate::error::{Error, Result};
use crate::image::GrayImage;

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n')
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) -> Result<()> {
        loop {
            while self.pos < self.bytes.len() && is_ws(self.bytes[self.pos]) {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            return Ok(());
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u32> {
        self.skip_separators()?;
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::PgmFormat(format!("missing {what} in header")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::PgmFormat(format!("unreadable {what} in header")))
    }
}

/// Parses a binary PGM. Errors on a wrong magic number, a maxval other
/// than 255, or a truncated pixel payload.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(Error::PgmFormat("expected magic 'P5'".into()));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.read_number("width")?;
    let height = cur.read_number("height")?;
    let maxval = cur.read_number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if cur.pos >= bytes.len() || !is_ws(bytes[cur.pos]) {
        return Err(Error::PgmFormat("missing separator after maxval".into()));
    }
    cur.pos += 1;

    let expected = width as usize * height as usize;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(Error::PgmFormat(format!(
            "truncated pixel payload: expected {expected} bytes, found {}",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(Error::PgmFormat(format!(
            "{} trailing bytes after pixel payload",
            payload.len() - expected
        )));
    }
    GrayImage::new(width, height, payload.to_vec())
}

/// Canonical P5 encoding of an image.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}
