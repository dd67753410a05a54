use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::util::write_atomic;
use crate::{Error, Result};

/// Newline-delimited JSON file holding one record per line
/// (`RawPost` for `corpus.ndjson`, `CleanDocument` for `docs.ndjson`).
///
/// Writes replace the file atomically; any number of readers may open it.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    path: PathBuf,
}

impl CorpusStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write<'a, T, I>(&self, records: I) -> Result<usize>
    where
        T: Serialize + 'a,
        I: IntoIterator<Item = &'a T>,
    {
        let mut count = 0;
        write_atomic(&self.path, |w| {
            for record in records {
                serde_json::to_writer(&mut *w, record)?;
                w.write_all(b"\n")?;
                count += 1;
            }
            Ok(())
        })?;
        Ok(count)
    }

    /// Lazily decode records; each item carries its 1-based line number on error.
    pub fn iter<T: DeserializeOwned>(&self) -> Result<impl Iterator<Item = Result<T>>> {
        let reader = BufReader::new(File::open(&self.path)?);
        Ok(reader
            .lines()
            .enumerate()
            .filter(|(_, line)| line.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|(idx, line)| {
                let line = line?;
                serde_json::from_str(&line).map_err(|e| Error::Parse {
                    what: "corpus record",
                    line: idx + 1,
                    reason: e.to_string(),
                })
            }))
    }

    pub fn read<T: DeserializeOwned>(&self) -> Result<Vec<T>> {
        self.iter()?.collect()
    }
}
