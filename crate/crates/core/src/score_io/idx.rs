//! IDX3 image archives, the container format of the MNIST dataset.

use super::GrayImage;
use crate::{Error, Result};

const IMAGE_MAGIC: u32 = 0x0000_0803;

fn be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Idx("truncated header".into()))
}

/// Parses an IDX3 (unsigned byte, three dimensions) file into images in file
/// order. The payload must be exactly `count × rows × cols` bytes.
pub fn parse_idx(bytes: &[u8]) -> Result<Vec<GrayImage>> {
    let magic = be_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::Idx(format!(
            "bad magic 0x{magic:08X}, expected 0x{IMAGE_MAGIC:08X}"
        )));
    }
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let payload = &bytes[16..];
    let expected = count
        .checked_mul(rows)
        .and_then(|n| n.checked_mul(cols))
        .ok_or_else(|| Error::Idx("dimensions overflow".into()))?;
    if payload.len() != expected {
        return Err(Error::Idx(format!(
            "length mismatch: header implies {expected} pixel bytes, found {}",
            payload.len()
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let size = rows * cols;
    if size == 0 {
        return Err(Error::Idx("zero-sized images".into()));
    }
    payload
        .chunks_exact(size)
        .map(|px| GrayImage::new(cols, rows, px.to_vec()))
        .collect()
}

/// Serializes images (all the same shape) as IDX3.
pub fn write_idx(images: &[GrayImage]) -> Result<Vec<u8>> {
    let (rows, cols) = images
        .first()
        .map(|im| (im.height(), im.width()))
        .unwrap_or((0, 0));
    if images.iter().any(|im| im.height() != rows || im.width() != cols) {
        return Err(Error::Idx("images differ in shape".into()));
    }
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for x in [IMAGE_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&x.to_be_bytes());
    }
    for im in images {
        out.extend_from_slice(im.pixels());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_two_by_two_image() {
        let bytes = [
            0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, //
            1, 2, 3, 4,
        ];
        let images = parse_idx(&bytes).unwrap();
        assert_eq!(images.len(), 1);
        assert_eq!(images[0].width(), 2);
        assert_eq!(images[0].pixels(), &[1, 2, 3, 4]);
        assert_eq!(images[0].get(1, 0), 3);
    }

    #[test]
    fn zero_images() {
        let bytes = [0, 0, 8, 3, 0, 0, 0, 0, 0, 0, 0, 28, 0, 0, 0, 28];
        assert!(parse_idx(&bytes).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        let labels = [0, 0, 8, 1, 0, 0, 0, 0];
        assert!(matches!(parse_idx(&labels), Err(Error::Idx(_))));
        let short = [0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 1, 2, 3];
        assert!(parse_idx(&short).is_err());
        assert!(parse_idx(&[0, 0]).is_err());
    }

    #[test]
    fn write_then_parse() {
        let im = GrayImage::new(3, 2, vec![0, 10, 20, 30, 40, 50]).unwrap();
        let back = parse_idx(&write_idx(&[im.clone(), im.clone()]).unwrap()).unwrap();
        assert_eq!(back, vec![im.clone(), im]);
    }
}
