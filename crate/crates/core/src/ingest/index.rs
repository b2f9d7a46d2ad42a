use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::model::{rel_ad, NodeLabel};

const MAGIC: &[u8; 8] = b"TPQIDX1\0";

/// Per-tag label lists of one document, each in document order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    lists: BTreeMap<String, Vec<NodeLabel>>,
    node_count: u32,
    depth: u32,
    recursive: BTreeSet<String>,
}

/// Summary numbers printed by `tpq index` and consumed by the optimality predictor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocumentStats {
    pub depth: u32,
    pub node_count: u32,
    pub tag_counts: BTreeMap<String, usize>,
    pub recursive_tags: BTreeSet<String>,
}

impl DocumentStats {
    pub fn is_recursive(&self, tag: &str) -> bool {
        self.recursive_tags.contains(tag)
    }
}

impl InvertedIndex {
    pub(crate) fn from_parts(
        lists: BTreeMap<String, Vec<NodeLabel>>,
        node_count: u32,
        depth: u32,
    ) -> Self {
        // Lists are sorted by left, so some pair nests iff a consecutive pair does.
        let recursive = lists
            .iter()
            .filter(|(_, l)| l.windows(2).any(|w| rel_ad(&w[0], &w[1])))
            .map(|(t, _)| t.clone())
            .collect();
        InvertedIndex {
            lists,
            node_count,
            depth,
            recursive,
        }
    }

    /// Labels of `tag` in document order; empty for an unknown tag.
    pub fn list(&self, tag: &str) -> &[NodeLabel] {
        self.lists.get(tag).map_or(&[], Vec::as_slice)
    }

    pub fn index_scan(&self, tag: &str) -> LabelStream<'_> {
        LabelStream::new(self.list(tag))
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.lists.keys().map(String::as_str)
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    /// Maximum level of any node; 0 for the empty index.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_recursive(&self, tag: &str) -> bool {
        self.recursive.contains(tag)
    }

    pub fn recursive_tags(&self) -> &BTreeSet<String> {
        &self.recursive
    }

    /// Label of the virtual document root, which contains every node.
    pub fn document_label(&self) -> NodeLabel {
        NodeLabel::new(0, 2 * self.node_count + 1, 0)
    }

    pub fn stats(&self) -> DocumentStats {
        DocumentStats {
            depth: self.depth,
            node_count: self.node_count,
            tag_counts: self
                .lists
                .iter()
                .map(|(t, l)| (t.clone(), l.len()))
                .collect(),
            recursive_tags: self.recursive.clone(),
        }
    }
}

/// Cursor over one tag list.
#[derive(Clone, Debug)]
pub struct LabelStream<'a> {
    labels: &'a [NodeLabel],
    pos: usize,
}

impl<'a> LabelStream<'a> {
    pub fn new(labels: &'a [NodeLabel]) -> Self {
        LabelStream { labels, pos: 0 }
    }

    pub fn current(&self) -> Option<&'a NodeLabel> {
        self.labels.get(self.pos)
    }

    pub fn advance(&mut self) {
        self.pos += 1;
    }

    pub fn finished(&self) -> bool {
        self.pos >= self.labels.len()
    }
}

impl Iterator for LabelStream<'_> {
    type Item = NodeLabel;

    fn next(&mut self) -> Option<NodeLabel> {
        let l = self.current().copied();
        self.advance();
        l
    }
}

#[derive(Debug, Error)]
pub enum IndexFormatError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("index file is truncated")]
    Truncated,
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

pub fn save_index(idx: &InvertedIndex, path: &Path) -> Result<(), IndexFormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_index(idx, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<InvertedIndex, IndexFormatError> {
    read_index(&mut BufReader::new(File::open(path)?))
}

pub(crate) fn write_index(idx: &InvertedIndex, w: &mut impl Write) -> Result<(), IndexFormatError> {
    w.write_all(MAGIC)?;
    w.write_all(&idx.node_count.to_le_bytes())?;
    w.write_all(&idx.depth.to_le_bytes())?;
    w.write_all(&(idx.lists.len() as u32).to_le_bytes())?;
    for (tag, list) in &idx.lists {
        let len = u16::try_from(tag.len())
            .map_err(|_| IndexFormatError::Corrupt(format!("tag '{tag}' is too long")))?;
        w.write_all(&len.to_le_bytes())?;
        w.write_all(tag.as_bytes())?;
        w.write_all(&(list.len() as u32).to_le_bytes())?;
        for l in list {
            w.write_all(&l.left.to_le_bytes())?;
            w.write_all(&l.right.to_le_bytes())?;
            w.write_all(&l.level.to_le_bytes())?;
        }
    }
    Ok(())
}

pub(crate) fn read_index(r: &mut impl Read) -> Result<InvertedIndex, IndexFormatError> {
    let mut magic = [0u8; 8];
    read_exact(r, &mut magic)?;
    if &magic != MAGIC {
        return Err(IndexFormatError::BadMagic);
    }
    let node_count = read_u32(r)?;
    let depth = read_u32(r)?;
    let tag_count = read_u32(r)?;
    let mut lists = BTreeMap::new();
    for _ in 0..tag_count {
        let mut len = [0u8; 2];
        read_exact(r, &mut len)?;
        let mut tag = vec![0u8; u16::from_le_bytes(len) as usize];
        read_exact(r, &mut tag)?;
        let tag = String::from_utf8(tag)
            .map_err(|_| IndexFormatError::Corrupt("tag is not UTF-8".into()))?;
        let count = read_u32(r)?;
        let mut list: Vec<NodeLabel> = Vec::new();
        for _ in 0..count {
            let l = NodeLabel::new(read_u32(r)?, read_u32(r)?, read_u32(r)?);
            if l.left >= l.right || list.last().is_some_and(|p| p.left >= l.left) {
                return Err(IndexFormatError::Corrupt(format!(
                    "list of '{tag}' is not a sorted label list"
                )));
            }
            list.push(l);
        }
        if lists.insert(tag.clone(), list).is_some() {
            return Err(IndexFormatError::Corrupt(format!("duplicate tag '{tag}'")));
        }
    }
    Ok(InvertedIndex::from_parts(lists, node_count, depth))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<(), IndexFormatError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => IndexFormatError::Truncated,
        _ => IndexFormatError::Io(e),
    })
}

fn read_u32(r: &mut impl Read) -> Result<u32, IndexFormatError> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}
