use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};

const FORMAT_TAG: &str = "iqgan-pca";
const FORMAT_VERSION: u32 = 1;

/// Linear down-sampler: `coords = ((x − mean)·componentsᵀ) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal rows of length `dim`.
    pub components: Vec<Vec<f64>>,
    /// Per-component max-abs of the training projections.
    pub scale: Vec<f64>,
}

impl PcaModel {
    /// Zero mean, identity components, unit scale.
    pub fn identity(dim: usize) -> Self {
        let components = (0..dim)
            .map(|i| {
                let mut row = vec![0.0; dim];
                row[i] = 1.0;
                row
            })
            .collect();
        Self {
            mean: vec![0.0; dim],
            components,
            scale: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    fn raw_projection(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(x)
                    .zip(&self.mean)
                    .map(|((ci, xi), mi)| ci * (xi - mi))
                    .sum()
            })
            .collect()
    }

    /// Scaled coordinates clamped to [−1, 1].
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_len(self.dim(), x.len())?;
        let mut clamped = 0;
        let out = self
            .raw_projection(x)
            .into_iter()
            .zip(&self.scale)
            .map(|(v, s)| {
                let u = v / s;
                if u.abs() > 1.0 {
                    clamped += 1;
                }
                u.clamp(-1.0, 1.0)
            })
            .collect();
        if clamped > 0 {
            log::debug!("PCA projection clamped {clamped} coordinate(s) to [-1, 1]");
        }
        Ok(out)
    }

    /// `mean + Σ_j v_j·scale_j·component_j`, unclamped.
    pub fn reconstruct(&self, v: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_len(self.k(), v.len())?;
        let mut out = self.mean.clone();
        for ((c, vj), sj) in self.components.iter().zip(v).zip(&self.scale) {
            let w = vj * sj;
            for (o, ci) in out.iter_mut().zip(c) {
                *o += w * ci;
            }
        }
        Ok(out)
    }

    /// Reconstruction clamped to [0, 1] for image export.
    pub fn reconstruct_image(&self, v: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .reconstruct(v)?
            .into_iter()
            .map(|p| p.clamp(0.0, 1.0))
            .collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{FORMAT_TAG} {FORMAT_VERSION}\ndim {}\nk {}\n",
            self.dim(),
            self.k()
        );
        let mut line = |name: &str, values: &[f64]| {
            out.push_str(name);
            for v in values {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        };
        line("mean", &self.mean);
        for c in &self.components {
            line("component", c);
        }
        line("scale", &self.scale);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Format(format!("PCA model: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        if header.trim() != format!("{FORMAT_TAG} {FORMAT_VERSION}") {
            return Err(bad(format!("unsupported header `{header}`")));
        }
        let mut field = |name: &str| -> Result<Vec<String>> {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing `{name}` line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(name) {
                return Err(bad(format!("expected `{name}`, found `{line}`")));
            }
            Ok(parts.map(str::to_owned).collect())
        };
        let scalar = |v: Vec<String>, name: &str| -> Result<usize> {
            match v.as_slice() {
                [one] => one.parse().map_err(|_| bad(format!("bad {name} `{one}`"))),
                _ => Err(bad(format!("`{name}` takes one value"))),
            }
        };
        let floats = |v: Vec<String>, len: usize, name: &str| -> Result<Vec<f64>> {
            if v.len() != len {
                return Err(bad(format!(
                    "`{name}` has {} values, expected {len}",
                    v.len()
                )));
            }
            v.iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| bad(format!("bad number `{s}` in `{name}`")))
                })
                .collect()
        };
        let dim = scalar(field("dim")?, "dim")?;
        let k = scalar(field("k")?, "k")?;
        let mean = floats(field("mean")?, dim, "mean")?;
        let components = (0..k)
            .map(|_| floats(field("component")?, dim, "component"))
            .collect::<Result<_>>()?;
        let scale = floats(field("scale")?, k, "scale")?;
        if scale.iter().any(|s| s.is_nan() || *s <= 0.0) {
            return Err(bad("scale entries must be positive".into()));
        }
        Ok(Self {
            mean,
            components,
            scale,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Fits the top-`k` principal components of `samples` (rows) through the
/// symmetric eigendecomposition of the sample covariance. Each component is
/// signed so that its first non-negligible entry is positive; scales are set
/// so every training projection lies in [−1, 1].
pub fn fit_pca(samples: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let m = samples.len();
    let dim = samples.first().map_or(0, Vec::len);
    if k == 0 || k > dim {
        return Err(invalid(format!("k = {k} must lie in 1..={dim}")));
    }
    if m < k + 1 {
        return Err(Error::Degenerate(format!(
            "{m} samples cannot determine {k} components"
        )));
    }
    for s in samples {
        crate::error::check_len(dim, s.len())?;
    }
    let mut mean = vec![0.0; dim];
    for s in samples {
        for (acc, v) in mean.iter_mut().zip(s) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= m as f64;
    }
    let centered = DMatrix::from_fn(m, dim, |i, j| samples[i][j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (m as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let top = eig.eigenvalues[order[0]];
    let kth = eig.eigenvalues[order[k - 1]];
    if top.is_nan() || top <= 0.0 || kth <= 1e-10 * top {
        return Err(Error::Degenerate(format!(
            "covariance rank is below {k} (eigenvalue {kth:e} vs largest {top:e})"
        )));
    }

    let components: Vec<Vec<f64>> = order[..k]
        .iter()
        .map(|&col| {
            let mut v: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let max = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * max) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v.iter_mut().for_each(|x| *x /= norm);
            v
        })
        .collect();

    let mut model = PcaModel {
        mean,
        components,
        scale: vec![1.0; k],
    };
    let mut scale = vec![0.0f64; k];
    for s in samples {
        for (acc, v) in scale.iter_mut().zip(model.raw_projection(s)) {
            *acc = acc.max(v.abs());
        }
    }
    if scale.iter().any(|s| s.is_nan() || *s <= 0.0) {
        return Err(Error::Degenerate(
            "a principal component has zero spread".into(),
        ));
    }
    model.scale = scale;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_data() -> Vec<Vec<f64>> {
        // points on the line y = 2x + 1
        (0..7)
            .map(|i| {
                let t = i as f64 * 0.5 - 1.0;
                vec![t, 2.0 * t + 1.0]
            })
            .collect()
    }

    #[test]
    fn one_dimensional_line() {
        let data = line_data();
        let model = fit_pca(&data, 1).unwrap();
        let c = &model.components[0];
        let expected = [1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()];
        assert!((c[0] - expected[0]).abs() < 1e-12 && (c[1] - expected[1]).abs() < 1e-12);
        for x in &data {
            let back = model.reconstruct(&model.project(x).unwrap()).unwrap();
            assert!((back[0] - x[0]).abs() < 1e-9 && (back[1] - x[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_projects_to_zero() {
        let data = vec![
            vec![1.0, 0.0, 2.0],
            vec![0.0, 1.0, 1.0],
            vec![2.0, 2.0, 0.0],
            vec![1.0, 3.0, 1.0],
        ];
        let model = fit_pca(&data, 2).unwrap();
        let p = model.project(&model.mean).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(model.reconstruct(&[0.0, 0.0]).unwrap(), model.mean);
    }

    #[test]
    fn full_rank_is_lossless() {
        let data = vec![
            vec![0.1, 0.9],
            vec![0.4, 0.2],
            vec![0.8, 0.5],
            vec![0.3, 0.3],
        ];
        let model = fit_pca(&data, 2).unwrap();
        for x in &data {
            let back = model.reconstruct(&model.project(x).unwrap()).unwrap();
            assert!(back.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn training_projections_within_unit_box() {
        let data = vec![
            vec![0.1, 0.9, 0.0],
            vec![0.4, 0.2, 1.0],
            vec![0.8, 0.5, 0.5],
            vec![0.3, 0.3, 0.2],
        ];
        let model = fit_pca(&data, 2).unwrap();
        let mut hit = false;
        for x in &data {
            for v in model.project(x).unwrap() {
                assert!(v.abs() <= 1.0 + 1e-12);
                hit |= (v.abs() - 1.0).abs() < 1e-12;
            }
        }
        assert!(hit);
    }

    #[test]
    fn degenerate_inputs() {
        let data = line_data();
        assert!(matches!(fit_pca(&data, 2), Err(Error::Degenerate(_))));
        assert!(matches!(fit_pca(&data[..2], 2), Err(Error::Degenerate(_))));
        assert!(fit_pca(&data, 3).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let data = vec![
            vec![0.1, 0.9, 0.0],
            vec![0.4, 0.2, 1.0],
            vec![0.8, 0.5, 0.5],
            vec![0.3, 0.3, 0.2],
        ];
        let model = fit_pca(&data, 2).unwrap();
        assert_eq!(PcaModel::from_text(&model.to_text()).unwrap(), model);
        assert!(PcaModel::from_text("iqgan-pca 2\n").is_err());
        assert!(PcaModel::from_text("garbage").is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let model = PcaModel::identity(3);
        assert!(model.project(&[1.0]).is_err());
        assert!(model.reconstruct(&[1.0]).is_err());
    }
}
