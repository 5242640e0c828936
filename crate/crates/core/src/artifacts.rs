//! On-disk formats: encoder and generator parameter files, metrics and
//! trace CSVs, and image grids (plain PGM, optional PNG).
//!
//! Parameter files are line-oriented text: a `iqgan-<kind> 1` header, then
//! `key value…` lines. Floats are written with round-trip precision.

use std::fmt::Write as _;
use std::path::Path;

use crate::circuits::{Ansatz, EncoderMode, EncoderParams, GeneratorParams};
use crate::error::{Error, Result};
use crate::training::TrainRecord;

const ENCODER_HEADER: &str = "iqgan-encoder 1";
const GENERATOR_HEADER: &str = "iqgan-generator 1";

pub const METRICS_HEADER: &str = "epoch,loss,fidelity,lr,wall_ms";
pub const TRACE_HEADER: &str = "step,objective";

fn floats_line(key: &str, values: &[f64]) -> String {
    let mut line = key.to_owned();
    for v in values {
        let _ = write!(line, " {v:?}");
    }
    line.push('\n');
    line
}

/// Key/value lines after a fixed header, in a fixed key order.
struct Fields<'a> {
    what: &'static str,
    lines: std::iter::Filter<std::str::Lines<'a>, fn(&&str) -> bool>,
}

impl<'a> Fields<'a> {
    fn open(text: &'a str, header: &str, what: &'static str) -> Result<Self> {
        let not_blank: fn(&&str) -> bool = |l| !l.trim().is_empty();
        let mut lines = text.lines().filter(not_blank);
        match lines.next() {
            Some(h) if h.trim() == header => Ok(Self { what, lines }),
            Some(h) => Err(Error::Format(format!(
                "{what}: unsupported header `{}`",
                h.trim()
            ))),
            None => Err(Error::Format(format!("{what}: empty file"))),
        }
    }

    fn bad(&self, msg: String) -> Error {
        Error::Format(format!("{}: {msg}", self.what))
    }

    fn next(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self
            .lines
            .next()
            .ok_or_else(|| self.bad(format!("missing `{key}` line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.bad(format!("expected `{key}`, found `{line}`")));
        }
        Ok(parts.collect())
    }

    fn one(&mut self, key: &str) -> Result<&'a str> {
        match self.next(key)?.as_slice() {
            [v] => Ok(v),
            _ => Err(self.bad(format!("`{key}` takes exactly one value"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.one(key)?;
        v.parse()
            .map_err(|_| self.bad(format!("bad `{key}` value `{v}`")))
    }

    fn floats(&mut self, key: &str) -> Result<Vec<f64>> {
        let parts = self.next(key)?;
        parts
            .iter()
            .map(|s| match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(self.bad(format!("bad number `{s}` in `{key}`"))),
            })
            .collect()
    }

    fn finish(mut self) -> Result<()> {
        match self.lines.next() {
            None => Ok(()),
            Some(extra) => Err(self.bad(format!("unexpected trailing line `{extra}`"))),
        }
    }
}

pub fn encoder_to_text(p: &EncoderParams) -> String {
    format!(
        "{ENCODER_HEADER}\nmode {}\npretrained {}\n{}",
        p.mode,
        p.pretrained,
        floats_line("theta_s", &p.theta_s)
    )
}

pub fn encoder_from_text(text: &str) -> Result<EncoderParams> {
    let mut f = Fields::open(text, ENCODER_HEADER, "encoder file")?;
    let mode: EncoderMode = f
        .one("mode")?
        .parse()
        .map_err(|e: Error| f.bad(e.to_string()))?;
    let pretrained: bool = f.parse("pretrained")?;
    let theta_s = f.floats("theta_s")?;
    f.finish()?;
    if theta_s.is_empty() {
        return Err(Error::Format("encoder file: `theta_s` is empty".into()));
    }
    Ok(EncoderParams {
        mode,
        theta_s,
        pretrained,
    })
}

pub fn generator_to_text(p: &GeneratorParams) -> String {
    format!(
        "{GENERATOR_HEADER}\nansatz {}\nn {}\nblocks {}\n{}",
        p.ansatz.name(),
        p.n,
        p.blocks,
        floats_line("theta_g", &p.theta_g)
    )
}

pub fn generator_from_text(text: &str) -> Result<GeneratorParams> {
    let mut f = Fields::open(text, GENERATOR_HEADER, "generator file")?;
    let ansatz: Ansatz = f
        .one("ansatz")?
        .parse()
        .map_err(|e: Error| f.bad(e.to_string()))?;
    let n: usize = f.parse("n")?;
    let blocks: usize = f.parse("blocks")?;
    let theta_g = f.floats("theta_g")?;
    f.finish()?;
    GeneratorParams::new(ansatz, n, blocks, theta_g)
        .map_err(|e| Error::Format(format!("generator file: {e}")))
}

pub fn save_encoder(path: impl AsRef<Path>, p: &EncoderParams) -> Result<()> {
    Ok(std::fs::write(path, encoder_to_text(p))?)
}

pub fn load_encoder(path: impl AsRef<Path>) -> Result<EncoderParams> {
    encoder_from_text(&std::fs::read_to_string(path)?)
}

pub fn save_generator(path: impl AsRef<Path>, p: &GeneratorParams) -> Result<()> {
    Ok(std::fs::write(path, generator_to_text(p))?)
}

pub fn load_generator(path: impl AsRef<Path>) -> Result<GeneratorParams> {
    generator_from_text(&std::fs::read_to_string(path)?)
}

pub fn metrics_csv(records: &[TrainRecord]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{}",
            r.epoch, r.loss, r.fidelity, r.lr, r.wall_ms
        );
    }
    out
}

pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for (step, v) in trace.iter().enumerate() {
        let _ = writeln!(out, "{step},{v:?}");
    }
    out
}

/// A grayscale raster with intensities in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl Raster {
    pub fn bytes(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    /// Plain (ASCII) 8-bit PGM.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.bytes().chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_pgm())?)
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut buf, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc
                .write_header()
                .map_err(|e| Error::Format(format!("png: {e}")))?;
            writer
                .write_image_data(&self.bytes())
                .map_err(|e| Error::Format(format!("png: {e}")))?;
        }
        Ok(buf)
    }
}

/// Tiles `rows × cols` images left to right, `per_row` per grid row, with a
/// one-pixel black gutter.
pub fn image_grid(images: &[Vec<f64>], rows: usize, cols: usize, per_row: usize) -> Result<Raster> {
    if images.is_empty() || rows == 0 || cols == 0 || per_row == 0 {
        return Err(crate::error::invalid(
            "image grid needs at least one non-empty image",
        ));
    }
    for img in images {
        crate::error::check_len(rows * cols, img.len())?;
    }
    let tiles_x = per_row.min(images.len());
    let tiles_y = images.len().div_ceil(per_row);
    let width = tiles_x * (cols + 1) - 1;
    let height = tiles_y * (rows + 1) - 1;
    let mut pixels = vec![0.0; width * height];
    for (i, img) in images.iter().enumerate() {
        let (ox, oy) = ((i % per_row) * (cols + 1), (i / per_row) * (rows + 1));
        for r in 0..rows {
            for c in 0..cols {
                pixels[(oy + r) * width + ox + c] = img[r * cols + c];
            }
        }
    }
    Ok(Raster {
        width,
        height,
        pixels,
    })
}
