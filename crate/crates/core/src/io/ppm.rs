// Binary PPM (P6, maxval 255) reader and writer.

use std::fs;
use std::path::Path;

use crate::cipher::ImageRgb;
use crate::{Error, Result};

pub fn load_ppm(path: impl AsRef<Path>) -> Result<ImageRgb> {
    let path = path.as_ref();
    decode_ppm(&fs::read(path).map_err(Error::file(path))?)
}

pub fn save_ppm(path: impl AsRef<Path>, img: &ImageRgb) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(img)).map_err(Error::file(path))?;
    Ok(())
}

pub fn encode_ppm(img: &ImageRgb) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(&img.to_interleaved());
    out
}

struct Header<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.buf.get(self.pos) {
            if b == b'#' {
                while self.buf.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedImage(format!("missing or invalid {what}")))
    }
}

pub fn decode_ppm(buf: &[u8]) -> Result<ImageRgb> {
    match buf.get(..2) {
        Some(b"P6") => {}
        Some([b'P', d]) if d.is_ascii_digit() => {
            return Err(Error::UnsupportedFormat(format!(
                "P{} images are not supported, only binary P6",
                *d as char
            )))
        }
        _ => return Err(Error::UnsupportedFormat("not a PPM file".into())),
    }
    let mut h = Header { buf, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(Error::MalformedImage(format!(
            "maxval {maxval}, expected 255"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedImage(format!(
            "empty image {width}x{height}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match buf.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(Error::MalformedImage("header not terminated".into())),
    }
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::MalformedImage("dimensions overflow".into()))?;
    let raster = &buf[h.pos..];
    if raster.len() < need {
        return Err(Error::MalformedImage(format!(
            "truncated raster: {} of {need} bytes",
            raster.len()
        )));
    }
    ImageRgb::from_interleaved(width, height, &raster[..need])
}
