use std::path::Path;

use crate::error::{Error, Result};
use crate::freespace::SpaceClass;

use super::write_bytes;

/// Writes one byte per point: 1 free, 0 off-ground, 2 invalid.
pub fn write_prediction(path: impl AsRef<Path>, classes: &[SpaceClass]) -> Result<()> {
    let bytes: Vec<u8> = classes.iter().map(|c| c.to_byte()).collect();
    write_bytes(path.as_ref(), &bytes)
}

pub fn read_prediction(path: impl AsRef<Path>) -> Result<Vec<SpaceClass>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    bytes
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            SpaceClass::from_byte(b).ok_or_else(|| Error::Dataset(format!("{}: invalid class byte {b} at offset {i}", path.display())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_one_byte_per_point() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pred");
        let classes = [SpaceClass::Free, SpaceClass::OffGround, SpaceClass::Invalid];
        write_prediction(&path, &classes).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), vec![0x01, 0x00, 0x02]);
        assert_eq!(read_prediction(&path).unwrap(), classes);
    }

    #[test]
    fn empty_prediction_is_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.pred");
        write_prediction(&path, &[]).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 0);
        assert!(read_prediction(&path).unwrap().is_empty());
    }

    #[test]
    fn rejects_unknown_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pred");
        std::fs::write(&path, [1u8, 7]).unwrap();
        assert!(read_prediction(&path).is_err());
    }
}
