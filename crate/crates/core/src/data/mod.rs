//! MNIST IDX ingestion and PCA down-sampling into the encoder's input box.

mod idx;
mod pca;

pub use idx::{load_idx, write_idx, Sample, IMAGE_MAGIC, LABEL_MAGIC};
pub use pca::{fit_pca, PcaModel};

/// Samples whose label is in `classes`, in file order.
pub fn filter_classes(samples: &[Sample], classes: &[u8]) -> Vec<Sample> {
    samples
        .iter()
        .filter(|s| classes.contains(&s.label))
        .cloned()
        .collect()
}
