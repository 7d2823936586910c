//! Priority merge of curated sources.
//!
//! Sources are merged in the order given; the first source to contribute a
//! key keeps it. Kept files are trusted: their smiles column is already the
//! canonical key written by the per-source run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::keyset::{key_hash, ShardedKeyMap};
use super::{MoleculeRecord, PipelineError, RecordReader, Status, KEY_NOTE};
use crate::molgraph::CanonicalKey;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub source: String,
    pub count: u64,
}

/// What one source added to the merged set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GainRow {
    pub source: String,
    pub input: u64,
    pub new: u64,
    pub duplicates: u64,
    /// Duplicates broken down by the source that already held the key.
    pub overlap_with: Vec<Overlap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GainTable {
    pub schema_version: u32,
    pub note: String,
    pub sources: Vec<GainRow>,
    pub total: u64,
}

#[derive(Debug, Clone)]
pub struct MergeOutput {
    pub records: Vec<MoleculeRecord>,
    pub gain: GainTable,
}

/// Merge records in priority order.
pub fn merge_rows<I>(records: I) -> Result<MergeOutput, PipelineError>
where
    I: IntoIterator<Item = Result<MoleculeRecord, PipelineError>>,
{
    let mut owner: ShardedKeyMap<u32> = ShardedKeyMap::new(8);
    let mut ids: ShardedKeyMap<u64> = ShardedKeyMap::new(8);
    let mut rows: Vec<GainRow> = Vec::new();
    let mut index: std::collections::HashMap<String, u32> = Default::default();
    let mut overlaps: Vec<Vec<u64>> = Vec::new();
    let mut kept = Vec::new();
    for rec in records {
        let rec = rec?;
        let src = *index.entry(rec.source.clone()).or_insert_with(|| {
            rows.push(GainRow { source: rec.source.clone(), input: 0, new: 0, duplicates: 0, overlap_with: Vec::new() });
            overlaps.push(Vec::new());
            rows.len() as u32 - 1
        });
        let row = &mut rows[src as usize];
        row.input += 1;
        let key = rec.key.as_ref().map_or(rec.smiles.as_str(), CanonicalKey::as_str);
        let id = format!("{}\t{}", rec.source, rec.source_id);
        if let Some(h) = ids.insert(&id, key_hash(key)) {
            if h != key_hash(key) {
                return Err(PipelineError::DuplicateId { origin: rec.source, source_id: rec.source_id });
            }
        }
        match owner.insert(key, src) {
            None => {
                row.new += 1;
                let key = CanonicalKey::from_canonical_string(key);
                kept.push(MoleculeRecord { key: Some(key), status: Status::Ok, ..rec });
            }
            Some(first) => {
                row.duplicates += 1;
                let o = &mut overlaps[src as usize];
                if o.len() <= first as usize {
                    o.resize(first as usize + 1, 0);
                }
                o[first as usize] += 1;
            }
        }
    }
    let names: Vec<String> = rows.iter().map(|r| r.source.clone()).collect();
    for (row, counts) in rows.iter_mut().zip(&overlaps) {
        row.overlap_with = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| Overlap { source: names[i].clone(), count: c })
            .collect();
    }
    let total = kept.len() as u64;
    Ok(MergeOutput {
        records: kept,
        gain: GainTable { schema_version: super::LEDGER_SCHEMA_VERSION, note: KEY_NOTE.to_string(), sources: rows, total },
    })
}

/// Merge kept-record files in priority order.
pub fn merge_files(paths: &[&Path]) -> Result<MergeOutput, PipelineError> {
    let mut readers = Vec::with_capacity(paths.len());
    for p in paths {
        readers.push((p.to_path_buf(), RecordReader::open(p)?));
    }
    let records = readers.into_iter().flat_map(|(path, rows)| {
        rows.map(move |r| match r? {
            Ok(r) => Ok(MoleculeRecord { source: r.source, source_id: r.source_id, smiles: r.smiles, key: None, status: Status::Ok }),
            Err(m) => Err(PipelineError::InvalidField(format!("{}:{}: {}", path.display(), m.line, m.text))),
        })
    });
    merge_rows(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(source: &str, id: &str, smiles: &str) -> Result<MoleculeRecord, PipelineError> {
        Ok(MoleculeRecord { source: source.into(), source_id: id.into(), smiles: smiles.into(), key: None, status: Status::Ok })
    }

    #[test]
    fn earlier_source_wins() {
        let out = merge_rows(vec![
            rec("a", "1", "CCO"),
            rec("a", "2", "CN"),
            rec("b", "1", "CCO"),
            rec("b", "2", "CCC"),
            rec("c", "9", "CN"),
            rec("c", "8", "CCC"),
        ])
        .unwrap();
        let ids: Vec<_> = out.records.iter().map(|r| (r.source.as_str(), r.source_id.as_str())).collect();
        assert_eq!(ids, vec![("a", "1"), ("a", "2"), ("b", "2")]);
        let c = &out.gain.sources[2];
        assert_eq!((c.input, c.new, c.duplicates), (2, 0, 2));
        assert_eq!(
            c.overlap_with,
            vec![Overlap { source: "a".into(), count: 1 }, Overlap { source: "b".into(), count: 1 }]
        );
        assert_eq!(out.gain.total, 3);
    }

    #[test]
    fn remerge_adds_nothing() {
        let once = merge_rows(vec![rec("a", "1", "CCO"), rec("b", "1", "CN")]).unwrap();
        let again = merge_rows(once.records.iter().cloned().map(Ok).chain(once.records.iter().cloned().map(Ok))).unwrap();
        assert_eq!(again.records, once.records);
    }

    #[test]
    fn conflicting_ids_are_rejected() {
        let err = merge_rows(vec![rec("a", "1", "CCO"), rec("a", "1", "CN")]).unwrap_err();
        assert!(matches!(err, PipelineError::DuplicateId { .. }));
    }
}
