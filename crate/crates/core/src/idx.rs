//! Reader and writer for the IDX format used by MNIST.
//!
//! Big-endian throughout: magic `0x00000803` for images followed by count,
//! rows and cols, or `0x00000801` for labels followed by count; then one
//! unsigned byte per pixel (row-major) or per label.

use std::io::{Read, Write};

use crate::error::{GeneoError, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    pixels: Vec<u8>,
}

impl IdxImages {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if rows * cols == 0 || !pixels.len().is_multiple_of(rows * cols) {
            return Err(GeneoError::Parse(format!(
                "{} pixels do not split into {rows}x{cols} images",
                pixels.len()
            )));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn len(&self) -> usize {
        self.pixels.len() / (self.rows * self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|e| GeneoError::Parse(format!("truncated IDX header: {e}")))?;
    Ok(u32::from_be_bytes(buf))
}

fn read_body(r: &mut impl Read, len: usize) -> Result<Vec<u8>> {
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)
        .map_err(|e| GeneoError::Parse(format!("truncated IDX body: {e}")))?;
    Ok(body)
}

fn expect_magic(r: &mut impl Read, want: u32) -> Result<()> {
    let magic = read_u32(r)?;
    if magic != want {
        return Err(GeneoError::Parse(format!(
            "bad IDX magic {magic:#010x}, expected {want:#010x}"
        )));
    }
    Ok(())
}

pub fn read_images(mut r: impl Read) -> Result<IdxImages> {
    expect_magic(&mut r, IMAGE_MAGIC)?;
    let count = read_u32(&mut r)? as usize;
    let rows = read_u32(&mut r)? as usize;
    let cols = read_u32(&mut r)? as usize;
    let pixels = read_body(&mut r, count * rows * cols)?;
    if count == 0 {
        return Ok(IdxImages { rows, cols, pixels });
    }
    IdxImages::new(rows, cols, pixels)
}

pub fn read_labels(mut r: impl Read) -> Result<Vec<u8>> {
    expect_magic(&mut r, LABEL_MAGIC)?;
    let count = read_u32(&mut r)? as usize;
    read_body(&mut r, count)
}

pub fn write_images(mut w: impl Write, images: &IdxImages) -> std::io::Result<()> {
    for v in [IMAGE_MAGIC, images.len() as u32, images.rows as u32, images.cols as u32] {
        w.write_all(&v.to_be_bytes())?;
    }
    w.write_all(&images.pixels)
}

pub fn write_labels(mut w: impl Write, labels: &[u8]) -> std::io::Result<()> {
    w.write_all(&LABEL_MAGIC.to_be_bytes())?;
    w.write_all(&(labels.len() as u32).to_be_bytes())?;
    w.write_all(labels)
}
