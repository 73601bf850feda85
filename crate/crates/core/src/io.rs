//! PNG and PFM codecs for views, depth maps and segmentation maps.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, Rgb};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Plane, View};

/// Bit depth of the PNG a view was decoded from; reused when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SampleDepth {
    #[default]
    Eight,
    Sixteen,
}

impl SampleDepth {
    fn max_value(self) -> f64 {
        match self {
            SampleDepth::Eight => 255.0,
            SampleDepth::Sixteen => 65535.0,
        }
    }
}

fn open_image(path: &Path) -> Result<DynamicImage> {
    image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

/// Decodes a PNG into `[0, 1]` RGB samples. Alpha is dropped; gray is
/// replicated across channels.
pub fn read_rgb(path: &Path) -> Result<(View, SampleDepth)> {
    let img = open_image(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let sixteen = matches!(
        img.color(),
        image::ColorType::L16 | image::ColorType::La16 | image::ColorType::Rgb16 | image::ColorType::Rgba16
    );
    if sixteen {
        let buf = img.to_rgb16();
        let data = buf.as_raw().iter().map(|&x| x as f64 / 65535.0).collect();
        Ok((View::from_raw(w, h, data), SampleDepth::Sixteen))
    } else {
        let buf = img.to_rgb8();
        let data = buf.as_raw().iter().map(|&x| x as f64 / 255.0).collect();
        Ok((View::from_raw(w, h, data), SampleDepth::Eight))
    }
}

/// Re-quantizes and writes a view as PNG.
pub fn write_rgb(path: &Path, view: &View, depth: SampleDepth) -> Result<()> {
    let (w, h) = (view.width() as u32, view.height() as u32);
    let q = |x: f64| (x.clamp(0.0, 1.0) * depth.max_value()).round();
    let result = match depth {
        SampleDepth::Eight => {
            let raw: Vec<u8> = view.data().iter().map(|&x| q(x) as u8).collect();
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw)
                .expect("buffer size matches dimensions")
                .save_with_format(path, ImageFormat::Png)
        }
        SampleDepth::Sixteen => {
            let raw: Vec<u16> = view.data().iter().map(|&x| q(x) as u16).collect();
            ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, raw)
                .expect("buffer size matches dimensions")
                .save_with_format(path, ImageFormat::Png)
        }
    };
    result.map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a PNG as raw RGB8 triples, used for segmentation labels. Palette
/// images are expanded by the decoder.
pub fn read_labels(path: &Path) -> Result<(usize, usize, Vec<[u8; 3]>)> {
    let img = open_image(path)?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let labels = img.pixels().map(|p| p.0).collect();
    Ok((w, h, labels))
}

/// Reads a 16-bit grayscale PNG and maps each sample `x` to `x * scale + offset`.
pub fn read_png16_depth(path: &Path, scale: f64, offset: f64) -> Result<Plane> {
    let img = open_image(path)?.to_luma16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img.as_raw().iter().map(|&x| x as f64 * scale + offset).collect();
    Ok(Plane::from_raw(w, h, data))
}

/// Reads a single-channel PFM (`Pf`). Rows are stored bottom-to-top in the
/// file and returned top-to-bottom. A negative scale means little-endian.
pub fn read_pfm(path: &Path) -> Result<Plane> {
    let bad = |reason: &str| Error::Pfm {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);

    let mut tokens: Vec<String> = Vec::with_capacity(4);
    let mut line = String::new();
    while tokens.len() < 4 {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Err(bad("truncated header"));
        }
        tokens.extend(line.split_whitespace().map(str::to_string));
    }
    if tokens.len() != 4 {
        return Err(bad("header must be `Pf`, dimensions and scale on separate lines"));
    }
    match tokens[0].as_str() {
        "Pf" => {}
        "PF" => return Err(bad("color PFM not supported for depth")),
        _ => return Err(bad("missing `Pf` magic")),
    }
    let w: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let h: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = tokens[3].parse().map_err(|_| bad("bad scale"))?;
    if w == 0 || h == 0 {
        return Err(bad("zero dimension"));
    }
    let little = scale < 0.0;

    let mut raw = vec![0u8; w * h * 4];
    reader
        .read_exact(&mut raw)
        .map_err(|_| bad("pixel data shorter than width * height floats"))?;

    let mut data = vec![0.0; w * h];
    for (i, chunk) in raw.chunks_exact(4).enumerate() {
        let bytes = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let x = if little {
            f32::from_le_bytes(bytes)
        } else {
            f32::from_be_bytes(bytes)
        };
        let (file_row, col) = (i / w, i % w);
        data[(h - 1 - file_row) * w + col] = x as f64;
    }
    Ok(Plane::from_raw(w, h, data))
}

/// Writes a little-endian single-channel PFM.
pub fn write_pfm(path: &Path, plane: &Plane) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let (w, h) = (plane.width(), plane.height());
    let mut write = || -> std::io::Result<()> {
        write!(out, "Pf\n{w} {h}\n-1.0\n")?;
        for file_row in 0..h {
            let v = h - 1 - file_row;
            for u in 0..w {
                out.write_all(&(plane.get(u, v) as f32).to_le_bytes())?;
            }
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
