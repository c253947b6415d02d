//! On-disk weight cache: one JSON-lines file per `(r, n)` under a
//! schema-versioned directory.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::partitions::PartitionTuple;
use crate::vertex::WeightRecord;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Line {
    key: String,
    record: WeightRecord,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

/// `sha256("v<schema>:" + canonical tuple JSON)` in hex.
pub fn cache_key(t: &PartitionTuple) -> String {
    let mut h = Sha256::new();
    h.update(format!("v{SCHEMA_VERSION}:").as_bytes());
    h.update(t.to_json_string().as_bytes());
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        let root = dir.join(format!("v{SCHEMA_VERSION}"));
        fs::create_dir_all(&root)?;
        Ok(Cache { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn file(&self, r: usize, n: usize) -> PathBuf {
        self.root.join(format!("r{r}_n{n}.jsonl"))
    }

    /// All records for `(r, n)`, keyed by [`cache_key`]. Later lines win.
    pub fn load(&self, r: usize, n: usize) -> Result<HashMap<String, WeightRecord>> {
        let path = self.file(r, n);
        let mut out = HashMap::new();
        if !path.exists() {
            return Ok(out);
        }
        let f = fs::File::open(&path)?;
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let l: Line = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1)))?;
            if cache_key(&l.record.tuple) != l.key {
                return Err(Error::Parse(format!(
                    "{}:{}: key does not match tuple",
                    path.display(),
                    i + 1
                )));
            }
            out.insert(l.key, l.record);
        }
        Ok(out)
    }

    /// Appends records as whole lines in one write.
    pub fn append(&self, r: usize, n: usize, records: &[WeightRecord]) -> Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let mut buf = String::new();
        for rec in records {
            let line = Line {
                key: cache_key(&rec.tuple),
                record: rec.clone(),
            };
            buf.push_str(&serde_json::to_string(&line)?);
            buf.push('\n');
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.file(r, n))?;
        f.write_all(buf.as_bytes())?;
        Ok(())
    }
}
