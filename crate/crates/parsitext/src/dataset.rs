//! Dataset ingestion from CSV/TSV files and train/test splitting.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One labeled document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    /// Binary label: 1 positive, 0 negative.
    pub label: usize,
}

/// Where a dataset came from, for report embedding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub sha256: String,
}

/// Disjoint covering train/test row-index sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub documents: Vec<Document>,
    pub provenance: Provenance,
    pub split: Option<Split>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.label).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Tsv,
    Csv,
}

impl DatasetFormat {
    /// Infer from the file extension; anything but `.csv` reads as TSV.
    pub fn from_path(path: &Path) -> DatasetFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => DatasetFormat::Csv,
            _ => DatasetFormat::Tsv,
        }
    }

    fn delimiter(self) -> u8 {
        match self {
            DatasetFormat::Tsv => b'\t',
            DatasetFormat::Csv => b',',
        }
    }
}

/// The label map used when none is configured: `pos`/`neg` spellings plus
/// literal `0`/`1`.
pub fn default_label_map() -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for (k, v) in [
        ("pos", 1),
        ("neg", 0),
        ("positive", 1),
        ("negative", 0),
        ("1", 1),
        ("0", 0),
    ] {
        m.insert(k.to_owned(), v);
    }
    m
}

/// Load a delimited UTF-8 file with a header row.
///
/// A UTF-8 byte-order mark and CRLF line endings are tolerated. An `id`
/// column, when present, provides document ids; otherwise the row number
/// does. Duplicate ids are rejected.
pub fn load_dataset(
    path: &Path,
    format: DatasetFormat,
    text_col: &str,
    label_col: &str,
    label_map: &BTreeMap<String, usize>,
) -> Result<Dataset> {
    let bytes = std::fs::read(path)?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let content: &[u8] = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(&bytes);

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(true)
        .flexible(false)
        .from_reader(content);

    let headers = reader.byte_headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name.as_bytes())
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    };
    let text_idx = col(text_col)?;
    let label_idx = col(label_col)?;
    let id_idx = headers.iter().position(|h| h == b"id");

    let mut documents = Vec::new();
    let mut seen_ids = HashSet::new();
    for (row, record) in reader.byte_records().enumerate() {
        let record = record?;
        let field = |idx: usize| -> Result<&str> {
            std::str::from_utf8(record.get(idx).unwrap_or(b""))
                .map_err(|_| Error::MalformedUtf8 { row })
        };
        let text = field(text_idx)?.to_owned();
        let label_str = field(label_idx)?.trim().to_owned();
        let label = *label_map
            .get(&label_str)
            .ok_or_else(|| Error::UnmappableLabel {
                row,
                label: label_str.clone(),
            })?;
        let doc_id = match id_idx {
            Some(i) => field(i)?.to_owned(),
            None => row.to_string(),
        };
        if !seen_ids.insert(doc_id.clone()) {
            return Err(Error::DuplicateDocId(doc_id));
        }
        documents.push(Document {
            doc_id,
            text,
            label,
        });
    }
    Ok(Dataset {
        documents,
        provenance: Provenance {
            source: path.display().to_string(),
            sha256,
        },
        split: None,
    })
}

/// Assign a stratified train/test split.
///
/// The test side holds `round(n * test_fraction)` rows, apportioned across
/// classes by largest remainder so the class ratio is preserved within one
/// sample. Deterministic for a given seed.
pub fn split_train_test(
    dataset: &mut Dataset,
    test_fraction: f64,
    stratified: bool,
    seed: u64,
) -> Result<()> {
    let n = dataset.len();
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidFraction(test_fraction));
    }
    let labels = dataset.labels();
    let pos: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| labels[i] == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateLabels);
    }
    let total_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut test: Vec<usize> = Vec::with_capacity(total_test);
    if stratified {
        let mut quotas: Vec<(usize, f64, Vec<usize>)> = Vec::new(); // (floor, remainder, indices)
        for class_idx in [neg, pos] {
            let exact = class_idx.len() as f64 * test_fraction;
            quotas.push((exact.floor() as usize, exact - exact.floor(), class_idx));
        }
        let mut assigned: usize = quotas.iter().map(|q| q.0).sum();
        // hand out the leftover to the largest remainders
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| quotas[b].1.partial_cmp(&quotas[a].1).unwrap().then(a.cmp(&b)));
        let n_classes = quotas.len();
        let mut oi = 0;
        while assigned < total_test {
            quotas[order[oi % n_classes]].0 += 1;
            assigned += 1;
            oi += 1;
        }
        for (take, _, mut class_idx) in quotas {
            class_idx.shuffle(&mut rng);
            test.extend(&class_idx[..take.min(class_idx.len())]);
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        test.extend(&all[..total_test]);
    }
    test.sort_unstable();
    let test_set: HashSet<usize> = test.iter().copied().collect();
    let train: Vec<usize> = (0..n).filter(|i| !test_set.contains(i)).collect();
    dataset.split = Some(Split { train, test });
    Ok(())
}

/// Write a dataset as a TSV with `id`, `text`, `label` columns (labels as
/// `pos`/`neg`).
pub fn write_tsv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::from("id\ttext\tlabel\n");
    for d in &dataset.documents {
        let label = if d.label == 1 { "pos" } else { "neg" };
        out.push_str(&format!("{}\t{}\t{}\n", d.doc_id, d.text, label));
    }
    std::fs::write(path, out)?;
    Ok(())
}
