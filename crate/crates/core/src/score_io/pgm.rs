//! Binary (P5) PGM images with 8-bit samples.

use super::GrayImage;
use crate::{Error, Result};

/// Reads the whitespace/comment-separated header fields of a netpbm file and
/// returns them with the offset of the first raster byte.
pub(crate) fn netpbm_header(bytes: &[u8], fields: usize) -> Result<(Vec<usize>, usize), String> {
    let mut pos = 2;
    let mut out = Vec::with_capacity(fields);
    while out.len() < fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err("truncated header".into()),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(format!("expected a number at byte {start}"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        out.push(text.parse().map_err(|_| format!("number {text} out of range"))?);
    }
    // exactly one whitespace byte before the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => Ok((out, pos + 1)),
        _ => Err("missing whitespace after header".into()),
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.get(..2) != Some(b"P5") {
        return Err(Error::Pgm("only binary P5 PGM is supported".into()));
    }
    let (fields, start) = netpbm_header(bytes, 3).map_err(Error::Pgm)?;
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("unsupported maxval {maxval}")));
    }
    let n = width * height;
    let raster = bytes
        .get(start..start + n)
        .ok_or_else(|| Error::Pgm("truncated raster".into()))?;
    let pixels = if maxval == 255 {
        raster.to_vec()
    } else {
        raster
            .iter()
            .map(|&p| ((u32::from(p.min(maxval as u8)) * 255 + maxval as u32 / 2) / maxval as u32) as u8)
            .collect()
    };
    GrayImage::new(width, height, pixels)
}

pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}
