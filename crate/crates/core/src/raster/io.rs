use std::fs;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};

use super::BinaryImage;
use crate::error::{Error, Result};

/// Reads a PNG, PGM or PBM file. Gray (or luma-converted colour) pixels
/// strictly darker than `threshold` become object pixels; in PBM files the
/// black bits are the object pixels.
pub fn load_binary(path: impl AsRef<Path>, threshold: u8) -> Result<BinaryImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let format = image::guess_format(&bytes).map_err(|_| Error::UnsupportedFormat {
        path: path.to_path_buf(),
    })?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Pnm) {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
        });
    }
    let decoded =
        image::load_from_memory_with_format(&bytes, format).map_err(|e| Error::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let gray = decoded.to_luma8();
    let (w, h) = gray.dimensions();
    let bits = gray.pixels().map(|p| p.0[0] < threshold).collect();
    BinaryImage::from_bits(w as usize, h as usize, bits)
}

/// Writes a binary PBM (P4); object pixels are black.
pub fn save_pbm(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let samples: Vec<u8> = img.bits().iter().map(|&b| u8::from(!b)).collect();
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Bitmap(SampleEncoding::Binary))
        .write_image(
            &samples,
            img.width() as u32,
            img.height() as u32,
            ExtendedColorType::L8,
        )
        .map_err(|e| encode_error(path, e))
}

/// Writes an 8-bit gray PNG; object pixels are black on white.
pub fn save_png(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let samples: Vec<u8> = img
        .bits()
        .iter()
        .map(|&b| if b { 0 } else { 255 })
        .collect();
    image::save_buffer_with_format(
        path,
        &samples,
        img.width() as u32,
        img.height() as u32,
        ExtendedColorType::L8,
        ImageFormat::Png,
    )
    .map_err(|e| encode_error(path, e))
}

/// Picks PNG for `.png` paths and PBM otherwise.
pub fn save_binary(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        save_png(img, path)
    } else {
        save_pbm(img, path)
    }
}

fn encode_error(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}
