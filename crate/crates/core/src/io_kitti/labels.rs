use std::path::Path;

use crate::error::Result;

use super::{read_records, write_bytes};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Label {
    pub semantic_id: u16,
    pub instance_id: u16,
}

impl Label {
    pub fn from_word(word: u32) -> Self {
        Self { semantic_id: (word & 0xFFFF) as u16, instance_id: (word >> 16) as u16 }
    }

    pub fn to_word(self) -> u32 {
        (self.instance_id as u32) << 16 | self.semantic_id as u32
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelArray {
    pub labels: Vec<Label>,
}

impl LabelArray {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl FromIterator<Label> for LabelArray {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        Self { labels: iter.into_iter().collect() }
    }
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelArray> {
    let bytes = read_records(path.as_ref(), 4)?;
    Ok(bytes.chunks_exact(4).map(|w| Label::from_word(u32::from_le_bytes([w[0], w[1], w[2], w[3]]))).collect())
}

pub fn write_labels(path: impl AsRef<Path>, labels: &LabelArray) -> Result<()> {
    let bytes: Vec<u8> = labels.labels.iter().flat_map(|l| l.to_word().to_le_bytes()).collect();
    write_bytes(path.as_ref(), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn word_split() {
        assert_eq!(Label::from_word(0x0001_0028), Label { semantic_id: 40, instance_id: 1 });
        assert_eq!(Label::from_word(0), Label { semantic_id: 0, instance_id: 0 });
        assert_eq!(Label { semantic_id: 40, instance_id: 1 }.to_word(), 0x0001_0028);
    }

    #[test]
    fn six_byte_file_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.label");
        std::fs::write(&path, [0u8; 6]).unwrap();
        assert!(matches!(read_labels(&path), Err(Error::TruncatedRecord { offset: 4, .. })));
    }

    #[test]
    fn reads_little_endian_words() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.label");
        std::fs::write(&path, [0x28, 0x00, 0x01, 0x00, 0x0a, 0, 0, 0]).unwrap();
        let labels = read_labels(&path).unwrap();
        assert_eq!(labels.labels, vec![Label { semantic_id: 40, instance_id: 1 }, Label { semantic_id: 10, instance_id: 0 }]);
    }
}
