//! File formats.
//!
//! * datasets: JSON Lines of `{"x": [...], "y": 0|1}` with a schema sidecar
//!   `<stem>.schema.json`;
//! * masks: JSON Lines of `{"mask": [0,1,...], "values": [...]}`, row-aligned
//!   with a dataset;
//! * joint tables: `{"schema": ..., "entries": [{"x", "y", "p"}]}`;
//! * DGP and suite configurations: TOML or JSON, chosen by extension;
//! * fitted models: `{"format_version": 1, "model": {...}}`.
//!
//! Every write goes to a temporary file in the target directory and is then
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use stripex_core::bench::SuiteConfig;
use stripex_core::dgp::DiscreteDgp;
use stripex_core::estimators::ModelDocument;
use stripex_core::{DgpSpec, Explanation, LabeledDataset, Sample, Schema, SelectionMask};

use crate::error::{CliError, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn is_toml(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "toml")
}

/// Parses TOML or JSON by extension.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    if is_toml(path) {
        toml::from_str(&text).map_err(|e| CliError::parse(path, e))
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| CliError::parse(path, e))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_pretty(value).as_bytes())
}

/// `data.jsonl` -> `data.schema.json`.
pub fn schema_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    data.with_file_name(format!("{stem}.schema.json"))
}

fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    Ok(read_to_string(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect())
}

pub fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    let schema: Schema = read_json(&schema_path(path))?;
    let mut samples = Vec::new();
    for (no, line) in lines(path)? {
        let mut s: Sample =
            serde_json::from_str(&line).map_err(|e| CliError::parse(path, format!("line {no}: {e}")))?;
        schema.coerce(&mut s.x);
        samples.push(s);
    }
    Ok(LabeledDataset::new(schema, samples)?)
}

pub fn dataset_jsonl(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for s in data.samples() {
        out.push_str(&serde_json::to_string(s).expect("sample serializes"));
        out.push('\n');
    }
    out
}

/// Writes the dataset and its schema sidecar.
pub fn write_dataset(path: &Path, data: &LabeledDataset) -> Result<()> {
    write_json(&schema_path(path), data.schema())?;
    write_atomic(path, dataset_jsonl(data).as_bytes())
}

#[derive(Deserialize)]
struct MaskLine {
    mask: SelectionMask,
}

/// Reads masks and checks they are row-aligned with a dataset of `rows`
/// samples and `dim` features.
pub fn read_masks(path: &Path, rows: usize, dim: usize) -> Result<Vec<SelectionMask>> {
    let mut masks = Vec::new();
    for (no, line) in lines(path)? {
        let m: MaskLine =
            serde_json::from_str(&line).map_err(|e| CliError::parse(path, format!("line {no}: {e}")))?;
        if m.mask.len() != dim {
            return Err(CliError::parse(path, format!("line {no}: mask has {} bits, expected {dim}", m.mask.len())));
        }
        masks.push(m.mask);
    }
    if masks.len() != rows {
        return Err(CliError::parse(path, format!("{} masks for {rows} dataset rows", masks.len())));
    }
    Ok(masks)
}

pub fn explanations_jsonl(exps: &[Explanation]) -> String {
    let mut out = String::new();
    for e in exps {
        out.push_str(&serde_json::to_string(e).expect("explanation serializes"));
        out.push('\n');
    }
    out
}

pub fn read_table(path: &Path) -> Result<DiscreteDgp> {
    read_json(path)
}

pub fn read_dgp_spec(path: &Path) -> Result<DgpSpec> {
    read_config(path)
}

pub fn read_suite(path: &Path) -> Result<SuiteConfig> {
    read_config(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub model: ModelDocument,
}

pub fn write_model(path: &Path, model: &ModelDocument) -> Result<()> {
    write_json(path, &ModelFile { format_version: MODEL_FORMAT_VERSION, model: model.clone() })
}

pub fn read_model(path: &Path) -> Result<ModelDocument> {
    let f: ModelFile = read_json(path)?;
    if f.format_version != MODEL_FORMAT_VERSION {
        return Err(CliError::parse(path, format!("unsupported model format version {}", f.format_version)));
    }
    Ok(f.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use stripex_core::dgp::build_dgp;

    #[test]
    fn schema_sidecar_name() {
        assert_eq!(schema_path(Path::new("out/data.jsonl")), PathBuf::from("out/data.schema.json"));
    }

    #[test]
    fn dataset_round_trip_keeps_reals() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.jsonl");
        let dgp = build_dgp(&DgpSpec::Hybrid { gamma: 5.0, mean: 0.0, quadrature_nodes: 16 }).unwrap();
        let data = dgp.sample(20, 1).unwrap();
        write_dataset(&p, &data).unwrap();
        assert_eq!(read_dataset(&p).unwrap(), data);
    }

    #[test]
    fn mask_count_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        fs::write(&p, "{\"mask\":[1,0]}\n{\"mask\":[0,1]}\n").unwrap();
        assert!(read_masks(&p, 2, 2).is_ok());
        assert!(read_masks(&p, 3, 2).is_err());
        assert!(read_masks(&p, 2, 3).is_err());
    }

    proptest::proptest! {
        #[test]
        fn sampled_data_and_masks_round_trip(seed in 0u64..1_000, n in 1usize..40, bits in 0u64..32) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("d.jsonl");
            let dgp = build_dgp(&DgpSpec::Hybrid { gamma: 5.0, mean: 0.0, quadrature_nodes: 8 }).unwrap();
            let data = dgp.sample(n, seed).unwrap();
            write_dataset(&p, &data).unwrap();
            proptest::prop_assert_eq!(read_dataset(&p).unwrap(), data.clone());

            let m = SelectionMask::from_code(5, bits);
            let exps: Vec<Explanation> = data
                .samples()
                .iter()
                .map(|s| stripex_core::mask::extract_explanation(&s.x, &m).unwrap())
                .collect();
            let mp = dir.path().join("m.jsonl");
            write_atomic(&mp, explanations_jsonl(&exps).as_bytes()).unwrap();
            let masks = read_masks(&mp, n, 5).unwrap();
            proptest::prop_assert!(masks.iter().all(|r| *r == m));
        }
    }
}
