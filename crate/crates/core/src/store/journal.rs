//! Write-ahead journal. Each record is
//!
//! ```text
//! [payload length: u32 LE][crc32 of payload: u32 LE][payload]
//! ```
//!
//! The payload is UTF-8 text, one operation per line: `- <quad>` for a
//! removal, `+ <quad>` for an addition, quads in N-Quads syntax. Removals
//! come first. A record whose header or payload is incomplete, or whose
//! checksum does not match, marks the torn tail left by a crash: replay
//! stops there and the tail is truncated on open.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::{StoreError, TxChange};
use crate::rdf::parse_quad_line;

const HEADER_LEN: usize = 8;

pub(crate) fn encode(change: &TxChange) -> Vec<u8> {
    let mut payload = String::new();
    for q in &change.removals {
        payload.push_str("- ");
        payload.push_str(&q.to_string());
        payload.push('\n');
    }
    for q in &change.additions {
        payload.push_str("+ ");
        payload.push_str(&q.to_string());
        payload.push('\n');
    }
    let payload = payload.into_bytes();
    let mut record = Vec::with_capacity(HEADER_LEN + payload.len());
    record.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    record.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    record.extend_from_slice(&payload);
    record
}

fn decode_payload(payload: &[u8], offset: u64) -> Result<TxChange, StoreError> {
    let corrupt = |message: String| StoreError::CorruptJournal { offset, message };
    let text = std::str::from_utf8(payload).map_err(|e| corrupt(e.to_string()))?;
    let mut change = TxChange::new();
    for line in text.lines() {
        let (op, quad) = line
            .split_at_checked(2)
            .ok_or_else(|| corrupt(format!("short line {line:?}")))?;
        let quad = parse_quad_line(quad).map_err(|e| corrupt(e.to_string()))?;
        match op {
            "+ " => change.additions.insert(quad),
            "- " => change.removals.insert(quad),
            _ => return Err(corrupt(format!("unknown operation {op:?}"))),
        };
    }
    Ok(change)
}

/// Decodes every complete record. Returns the changes and the byte length
/// of the valid prefix.
pub(crate) fn decode_all(bytes: &[u8]) -> Result<(Vec<TxChange>, u64), StoreError> {
    let mut changes = Vec::new();
    let mut pos = 0usize;
    while bytes.len() - pos >= HEADER_LEN {
        let len = u32::from_le_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        let crc = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap());
        let start = pos + HEADER_LEN;
        let Some(payload) = bytes.get(start..start + len) else {
            break;
        };
        if crc32fast::hash(payload) != crc {
            break;
        }
        changes.push(decode_payload(payload, pos as u64)?);
        pos = start + len;
    }
    Ok((changes, pos as u64))
}

pub(crate) struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    /// Opens the journal, returning the committed changes it holds. A torn
    /// tail is cut off so later appends start on a record boundary.
    pub(crate) fn open(path: &Path) -> Result<(Self, Vec<TxChange>), StoreError> {
        let bytes = match std::fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let (changes, valid) = decode_all(&bytes)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        if valid < bytes.len() as u64 {
            tracing::warn!(
                journal = %path.display(),
                dropped = bytes.len() as u64 - valid,
                "discarding incomplete journal record"
            );
            file.set_len(valid)?;
            file.sync_data()?;
        }
        Ok((
            Self {
                path: path.to_owned(),
                file,
            },
            changes,
        ))
    }

    pub(crate) fn append(&mut self, record: &[u8]) -> io::Result<()> {
        self.file.write_all(record)?;
        self.file.sync_data()
    }

    pub(crate) fn truncate(&mut self) -> io::Result<()> {
        self.file.set_len(0)?;
        self.file.sync_data()
    }

    pub(crate) fn path(&self) -> &Path {
        &self.path
    }
}
