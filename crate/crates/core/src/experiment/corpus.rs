use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use crate::level::{parse_vglc, Level};

use super::{io_err, ExperimentError};

#[derive(Clone, Debug)]
pub struct CorpusLevel {
    pub path: PathBuf,
    pub text: String,
    pub level: Level,
}

/// Which corpus levels make up a training set; ids are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subset {
    First(usize),
    Ids(Vec<usize>),
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Chunk {
    Digits(u128, usize),
    Text(String),
}

/// Sort key that orders embedded digit runs numerically, so `Level 2`
/// precedes `Level 10`; zero-padded names sort as they do lexicographically.
pub fn natural_key(name: &str) -> Vec<impl Ord> {
    let mut chunks = Vec::new();
    let mut chars = name.chars().peekable();
    while let Some(&c) = chars.peek() {
        let digit = c.is_ascii_digit();
        let mut run = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_digit() != digit {
                break;
            }
            run.push(c);
            chars.next();
        }
        chunks.push(if digit { Chunk::Digits(run.parse().unwrap_or(u128::MAX), run.len()) } else { Chunk::Text(run) });
    }
    chunks
}

/// Loads every regular file of `dir` in natural name order as levels 1..n.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<CorpusLevel>, ExperimentError> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()).map_err(io_err(dir)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|p| p.is_file() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    paths.sort_by(|a, b| {
        let (na, nb) = (a.file_name().unwrap().to_string_lossy(), b.file_name().unwrap().to_string_lossy());
        natural_key(&na).cmp(&natural_key(&nb)).then_with(|| na.cmp(&nb)).then(Ordering::Equal)
    });
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let level = parse_vglc(&text)
                .map_err(|source| ExperimentError::Level { file: path.display().to_string(), source })?;
            Ok(CorpusLevel { path, text, level })
        })
        .collect()
}

pub fn select_subset<'a>(corpus: &'a [CorpusLevel], subset: &Subset) -> Result<Vec<&'a CorpusLevel>, ExperimentError> {
    let picked: Vec<&CorpusLevel> = match subset {
        Subset::First(n) => {
            if *n > corpus.len() {
                return Err(ExperimentError::UnknownLevelId { id: *n, size: corpus.len() });
            }
            corpus[..*n].iter().collect()
        }
        Subset::Ids(ids) => ids
            .iter()
            .map(|&id| {
                id.checked_sub(1)
                    .and_then(|i| corpus.get(i))
                    .ok_or(ExperimentError::UnknownLevelId { id, size: corpus.len() })
            })
            .collect::<Result<_, _>>()?,
    };
    if picked.is_empty() {
        return Err(ExperimentError::EmptySubset);
    }
    Ok(picked)
}
