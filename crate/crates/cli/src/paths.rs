//! Canonical layout of the output tree. Every artifact path is derived
//! here so commands, the index, and the tests agree on names.
//!
//! ```text
//! out/
//!   datasets/{family}_{symbol}{level:02}.jsonl
//!   embeddings/{model_slug}/{family}_{symbol}{level:02}.jsonl
//!   sweeps/{model_slug}/{family}.jsonl
//!   tables/{family}.{md,csv,tex}
//!   figures/{metric}_{family}.svg
//!   figures/{model_slug}/{stem}.svg
//!   manifest.json
//!   index.json
//! ```

use numprobe::metrics::MetricKind;
use numprobe::numgen::Family;
use numprobe::report::TableFormat;
use numprobe::ModelRef;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct OutTree {
    root: PathBuf,
}

impl OutTree {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn level_file(family: Family, level: u32) -> String {
        format!(
            "{}_{}{level:02}.jsonl",
            family.name(),
            family.precision_symbol()
        )
    }

    pub fn dataset_path(&self, family: Family, level: u32) -> PathBuf {
        self.root.join("datasets").join(Self::level_file(family, level))
    }

    pub fn embedding_path(&self, model: &ModelRef, family: Family, level: u32) -> PathBuf {
        self.root
            .join("embeddings")
            .join(model.slug())
            .join(Self::level_file(family, level))
    }

    pub fn sweep_path(&self, model: &ModelRef, family: Family) -> PathBuf {
        self.root
            .join("sweeps")
            .join(model.slug())
            .join(format!("{}.jsonl", family.name()))
    }

    pub fn table_path(&self, family: Family, format: TableFormat) -> PathBuf {
        self.root
            .join("tables")
            .join(format!("{}.{}", family.name(), format.extension()))
    }

    pub fn curve_path(&self, kind: MetricKind, family: Family) -> PathBuf {
        self.root
            .join("figures")
            .join(format!("{}_{}.svg", kind.name(), family.name()))
    }

    pub fn scatter_path(&self, model: &ModelRef, stem: &str) -> PathBuf {
        self.root
            .join("figures")
            .join(model.slug())
            .join(format!("{stem}.svg"))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_stable() {
        let tree = OutTree::new("out");
        let model = ModelRef::parse("synthetic:linear/d=16").unwrap();
        assert_eq!(
            tree.dataset_path(Family::PositiveDecimals, 3),
            PathBuf::from("out/datasets/positive-decimals_b03.jsonl")
        );
        assert_eq!(
            tree.dataset_path(Family::MixedSignIntegers, 12),
            PathBuf::from("out/datasets/mixed-sign-integers_a12.jsonl")
        );
        assert_eq!(
            tree.embedding_path(&model, Family::MixedSignDecimals, 1),
            PathBuf::from(
                "out/embeddings/synthetic_linear_d_16_seed_0_sigma_0/mixed-sign-decimals_b01.jsonl"
            )
        );
        assert_eq!(
            tree.sweep_path(&model, Family::PositiveDecimals),
            PathBuf::from("out/sweeps/synthetic_linear_d_16_seed_0_sigma_0/positive-decimals.jsonl")
        );
        assert_eq!(
            tree.table_path(Family::PositiveDecimals, TableFormat::Latex),
            PathBuf::from("out/tables/positive-decimals.tex")
        );
        assert_eq!(
            tree.curve_path(MetricKind::PcaVarianceRatio, Family::MixedSignIntegers),
            PathBuf::from("out/figures/pca-variance-ratio_mixed-sign-integers.svg")
        );
        assert_eq!(
            tree.scatter_path(&model, "magnitude-signed"),
            PathBuf::from("out/figures/synthetic_linear_d_16_seed_0_sigma_0/magnitude-signed.svg")
        );
    }
}
