use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{Error, Result};

/// A file written to a temporary sibling and moved into place on
/// [`commit`](PendingFile::commit). Dropping it uncommitted leaves the
/// destination untouched.
pub struct PendingFile {
    target: PathBuf,
    writer: BufWriter<NamedTempFile>,
}

impl PendingFile {
    pub fn create(target: &Path) -> Result<Self> {
        let dir = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let tmp = NamedTempFile::new_in(&dir).map_err(Error::at_path(&dir))?;
        Ok(PendingFile {
            target: target.to_path_buf(),
            writer: BufWriter::new(tmp),
        })
    }

    pub fn commit(self) -> Result<()> {
        let target = self.target;
        let tmp = self
            .writer
            .into_inner()
            .map_err(|e| Error::at_path(&target)(e.into_error()))?;
        tmp.as_file().sync_all().map_err(Error::at_path(&target))?;
        tmp.persist(&target).map_err(|e| Error::at_path(&target)(e.error))?;
        Ok(())
    }
}

impl Write for PendingFile {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.writer.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

/// Commits a group of pending files only after all of them were written.
pub fn commit_all(files: Vec<PendingFile>) -> Result<()> {
    for file in files {
        file.commit()?;
    }
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(Error::at_path(path))
}

pub fn open_buffered(path: &Path) -> Result<io::BufReader<fs::File>> {
    fs::File::open(path)
        .map(io::BufReader::new)
        .map_err(Error::at_path(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dropped_file_leaves_no_trace() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.txt");
        {
            let mut f = PendingFile::create(&target).unwrap();
            f.write_all(b"partial").unwrap();
        }
        assert!(!target.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

        let mut f = PendingFile::create(&target).unwrap();
        f.write_all(b"done").unwrap();
        f.commit().unwrap();
        assert_eq!(fs::read(&target).unwrap(), b"done");
    }
}
