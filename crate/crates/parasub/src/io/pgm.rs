//! PGM (portable graymap) reader/writer for the P2 (ASCII) and P5 (binary)
//! formats, maxval up to 65535.
//!
//! Raw pixels and the header maxval are kept alongside the normalized
//! `[0, 1]` view, so writing an image back out is bit-exact at the pixel
//! level.

use std::io::{Read, Write};

use ndarray::Array2;

use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    Ascii,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub pixels: Vec<u16>,
    pub format: PgmFormat,
}

impl PgmImage {
    /// Pixels scaled by `1 / maxval` into `[0, 1]`, row-major.
    pub fn to_matrix(&self) -> Array2<f64> {
        Array2::from_shape_vec(
            (self.height, self.width),
            self.pixels.iter().map(|&p| p as f64 / self.maxval as f64).collect(),
        )
        .expect("pixel count validated at read")
    }

    /// Quantizes a `[0, 1]` matrix back to pixel values under `maxval`.
    pub fn from_matrix(matrix: &Array2<f64>, maxval: u32, format: PgmFormat) -> Result<Self, IoError> {
        if !(1..=65535).contains(&maxval) {
            return Err(IoError::BadMaxval(maxval));
        }
        let (height, width) = matrix.dim();
        let pixels = matrix
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * maxval as f64).round() as u16)
            .collect();
        Ok(PgmImage { width, height, maxval, pixels, format })
    }
}

pub fn read_pgm(mut reader: impl Read) -> Result<PgmImage, IoError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let mut pos = 0usize;

    let magic = read_token(&bytes, &mut pos)
        .ok_or_else(|| IoError::UnsupportedFormat("missing magic".into()))?;
    let format = match magic.as_str() {
        "P2" => PgmFormat::Ascii,
        "P5" => PgmFormat::Binary,
        other => return Err(IoError::UnsupportedFormat(other.to_string())),
    };

    let width = read_header_number(&bytes, &mut pos)? as usize;
    let height = read_header_number(&bytes, &mut pos)? as usize;
    let maxval = read_header_number(&bytes, &mut pos)?;
    if !(1..=65535).contains(&maxval) {
        return Err(IoError::BadMaxval(maxval));
    }
    let expected = width * height;

    let pixels = match format {
        PgmFormat::Ascii => {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                match read_header_number(&bytes, &mut pos) {
                    Ok(v) => {
                        if v > maxval {
                            return Err(IoError::Malformed {
                                line: 0,
                                message: format!("pixel {v} exceeds maxval {maxval}"),
                            });
                        }
                        pixels.push(v as u16);
                    }
                    Err(_) => return Err(IoError::Truncated { expected, got: pixels.len() }),
                }
            }
            pixels
        }
        PgmFormat::Binary => {
            // exactly one whitespace byte separates the header from the raster
            pos += 1;
            let bytes_per = if maxval > 255 { 2 } else { 1 };
            let need = expected * bytes_per;
            if bytes.len() < pos + need {
                return Err(IoError::Truncated {
                    expected,
                    got: bytes.len().saturating_sub(pos) / bytes_per,
                });
            }
            let raster = &bytes[pos..pos + need];
            if bytes_per == 1 {
                raster.iter().map(|&b| b as u16).collect()
            } else {
                raster.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
            }
        }
    };

    Ok(PgmImage { width, height, maxval, pixels, format })
}

pub fn write_pgm(image: &PgmImage, mut writer: impl Write) -> Result<(), IoError> {
    match image.format {
        PgmFormat::Ascii => {
            writeln!(writer, "P2")?;
            writeln!(writer, "{} {}", image.width, image.height)?;
            writeln!(writer, "{}", image.maxval)?;
            for row in image.pixels.chunks(image.width.max(1)) {
                let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
                writeln!(writer, "{}", cells.join(" "))?;
            }
        }
        PgmFormat::Binary => {
            write!(writer, "P5\n{} {}\n{}\n", image.width, image.height, image.maxval)?;
            if image.maxval > 255 {
                for &p in &image.pixels {
                    writer.write_all(&p.to_be_bytes())?;
                }
            } else {
                let raw: Vec<u8> = image.pixels.iter().map(|&p| p as u8).collect();
                writer.write_all(&raw)?;
            }
        }
    }
    Ok(())
}

pub fn read_pgm_path(path: &std::path::Path) -> Result<PgmImage, IoError> {
    read_pgm(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn write_pgm_path(image: &PgmImage, path: &std::path::Path) -> Result<(), IoError> {
    write_pgm(image, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Next whitespace-separated token, skipping `#` comments.
fn read_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    while *pos < bytes.len() {
        let b = bytes[*pos];
        if b == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else if b.is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn read_header_number(bytes: &[u8], pos: &mut usize) -> Result<u32, IoError> {
    let token = read_token(bytes, pos)
        .ok_or_else(|| IoError::UnsupportedFormat("header ended early".into()))?;
    token.parse::<u32>().map_err(|e| IoError::Malformed {
        line: 0,
        message: format!("bad header number {token:?}: {e}"),
    })
}
