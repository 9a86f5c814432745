//! Loading of sentence/weights corpora from a directory: one `<name>.sent`
//! file per entry with companion `<name>.w1`, `<name>.w2`, … weight maps.

use crate::normalize::WeightedSentence;
use crate::syntax::{parse_sentence_file, parse_weights, Formula, Vocabulary, WeightMap};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("io error on {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("parse error in {path}: {err}")]
    Parse { path: String, err: crate::syntax::SyntaxError },
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub sentence: Formula,
    pub vocab: Vocabulary,
    /// Weight maps by suffix; unit weights are always included first.
    pub weight_maps: Vec<(String, WeightMap)>,
}

impl CorpusEntry {
    pub fn weighted(&self, map_index: usize) -> WeightedSentence {
        WeightedSentence::new(
            self.sentence.clone(),
            self.vocab.clone(),
            self.weight_maps[map_index].1.clone(),
        )
    }
}

/// Reads every `*.sent` file of the directory with its weight maps, sorted
/// by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    let read_dir = std::fs::read_dir(dir)
        .map_err(|err| CorpusError::Io { path: dir.display().to_string(), err })?;
    let mut sentence_files: Vec<_> = read_dir
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "sent"))
        .collect();
    sentence_files.sort();
    for path in sentence_files {
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(&path)
            .map_err(|err| CorpusError::Io { path: path.display().to_string(), err })?;
        let (sentence, vocab) = parse_sentence_file(&text)
            .map_err(|err| CorpusError::Parse { path: path.display().to_string(), err })?;
        let mut weight_maps = vec![("unit".to_string(), WeightMap::ones(&vocab))];
        for idx in 1..=9 {
            let wpath = path.with_extension(format!("w{idx}"));
            if !wpath.exists() {
                break;
            }
            let wtext = std::fs::read_to_string(&wpath)
                .map_err(|err| CorpusError::Io { path: wpath.display().to_string(), err })?;
            let map = parse_weights(&wtext, &vocab)
                .map_err(|err| CorpusError::Parse { path: wpath.display().to_string(), err })?;
            weight_maps.push((format!("w{idx}"), map));
        }
        entries.push(CorpusEntry { name, sentence, vocab, weight_maps });
    }
    Ok(entries)
}

/// The repository corpus directory, resolved relative to this crate.
pub fn default_corpus_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}
