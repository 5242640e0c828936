use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 2051;
pub const LABEL_MAGIC: u32 = 2049;

/// One labelled image with pixels scaled to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub pixels: Vec<f64>,
    pub label: u8,
    pub rows: usize,
    pub cols: usize,
}

struct Reader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn u32(&mut self, what: &str) -> Result<u32> {
        let chunk = self.take(4, what)?;
        Ok(u32::from_be_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]))
    }

    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Truncated {
                path: self.path.to_path_buf(),
                detail: format!(
                    "{what}: need {len} bytes at offset {}, file has {}",
                    self.pos,
                    self.bytes.len()
                ),
            })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn magic(&mut self, expected: u32) -> Result<()> {
        let found = self.u32("magic number")?;
        if found != expected {
            return Err(Error::BadMagic {
                path: self.path.to_path_buf(),
                expected,
                found,
            });
        }
        Ok(())
    }
}

/// Reads an IDX image file and its label file.
pub fn load_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<Vec<Sample>> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let image_bytes = fs::read(images_path)?;
    let label_bytes = fs::read(labels_path)?;

    let mut img = Reader {
        path: images_path,
        bytes: &image_bytes,
        pos: 0,
    };
    img.magic(IMAGE_MAGIC)?;
    let count = img.u32("image count")? as usize;
    let rows = img.u32("row count")? as usize;
    let cols = img.u32("column count")? as usize;

    let mut lab = Reader {
        path: labels_path,
        bytes: &label_bytes,
        pos: 0,
    };
    lab.magic(LABEL_MAGIC)?;
    let label_count = lab.u32("label count")? as usize;
    if label_count != count {
        return Err(Error::CountMismatch {
            images: count,
            labels: label_count,
        });
    }

    let pixels = img.take(count * rows * cols, "pixel data")?;
    let labels = lab.take(count, "label data")?;
    if let Some(bad) = labels.iter().find(|&&l| l > 9) {
        return Err(Error::Format(format!(
            "{}: label {bad} outside 0..=9",
            labels_path.display()
        )));
    }
    let dim = rows * cols;
    Ok(labels
        .iter()
        .enumerate()
        .map(|(i, &label)| Sample {
            pixels: pixels[i * dim..(i + 1) * dim]
                .iter()
                .map(|&b| f64::from(b) / 255.0)
                .collect(),
            label,
            rows,
            cols,
        })
        .collect())
}

/// Writes samples back out as an IDX image/label pair (pixels rounded to bytes).
pub fn write_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    samples: &[Sample],
) -> Result<()> {
    let (rows, cols) = samples.first().map_or((0, 0), |s| (s.rows, s.cols));
    let mut images = Vec::with_capacity(16 + samples.len() * rows * cols);
    for v in [IMAGE_MAGIC, samples.len() as u32, rows as u32, cols as u32] {
        images.extend_from_slice(&v.to_be_bytes());
    }
    let mut labels = Vec::with_capacity(8 + samples.len());
    for v in [LABEL_MAGIC, samples.len() as u32] {
        labels.extend_from_slice(&v.to_be_bytes());
    }
    for s in samples {
        if s.pixels.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: s.pixels.len(),
            });
        }
        images.extend(
            s.pixels
                .iter()
                .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8),
        );
        labels.push(s.label);
    }
    fs::write(images_path, images)?;
    fs::write(labels_path, labels)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(
        dir: &Path,
        count: u32,
        label_count: u32,
        image_magic: u32,
    ) -> (std::path::PathBuf, std::path::PathBuf) {
        let ip = dir.join("img");
        let lp = dir.join("lab");
        let mut images = Vec::new();
        for v in [image_magic, count, 2, 2] {
            images.extend_from_slice(&v.to_be_bytes());
        }
        images.extend((0..count * 4).map(|i| (i * 17 % 256) as u8));
        let mut labels = Vec::new();
        for v in [LABEL_MAGIC, label_count] {
            labels.extend_from_slice(&v.to_be_bytes());
        }
        labels.extend((0..label_count).map(|i| (i % 10) as u8));
        fs::write(&ip, images).unwrap();
        fs::write(&lp, labels).unwrap();
        (ip, lp)
    }

    #[test]
    fn reads_pixels_and_labels_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = fixture(dir.path(), 3, 3, IMAGE_MAGIC);
        let samples = load_idx(&ip, &lp).unwrap();
        assert_eq!(samples.len(), 3);
        assert_eq!(samples[1].label, 1);
        assert_eq!(samples[1].pixels[0], f64::from(4u8 * 17) / 255.0);
        assert_eq!((samples[0].rows, samples[0].cols), (2, 2));
    }

    #[test]
    fn count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = fixture(dir.path(), 3, 2, IMAGE_MAGIC);
        assert!(matches!(
            load_idx(&ip, &lp),
            Err(Error::CountMismatch {
                images: 3,
                labels: 2
            })
        ));
    }

    #[test]
    fn wrong_magic_names_observed_value() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = fixture(dir.path(), 3, 3, 2049);
        let err = load_idx(&ip, &lp).unwrap_err();
        assert!(matches!(
            err,
            Error::BadMagic {
                found: 2049,
                expected: 2051,
                ..
            }
        ));
        assert!(err.to_string().contains("2049"));
    }

    #[test]
    fn truncated_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = fixture(dir.path(), 3, 3, IMAGE_MAGIC);
        let mut bytes = fs::read(&ip).unwrap();
        bytes.truncate(bytes.len() - 1);
        fs::write(&ip, bytes).unwrap();
        assert!(matches!(load_idx(&ip, &lp), Err(Error::Truncated { .. })));
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = fixture(dir.path(), 4, 4, IMAGE_MAGIC);
        let samples = load_idx(&ip, &lp).unwrap();
        let (ip2, lp2) = (dir.path().join("i2"), dir.path().join("l2"));
        write_idx(&ip2, &lp2, &samples).unwrap();
        assert_eq!(fs::read(&ip).unwrap(), fs::read(&ip2).unwrap());
        assert_eq!(load_idx(&ip2, &lp2).unwrap(), samples);
    }
}
