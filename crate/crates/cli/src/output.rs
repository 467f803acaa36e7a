//! Outputs are written next to their destination under a temporary name and
//! renamed into place only once every output of a command is ready.

use std::path::{Path, PathBuf};

use crate::failure::Failure;

pub struct Staged {
    tmp: PathBuf,
    dest: PathBuf,
    done: bool,
}

impl Staged {
    pub fn new(dest: &Path) -> Self {
        let name = dest
            .file_name()
            .map_or("out".into(), |n| n.to_string_lossy().into_owned());
        let tmp = dest.with_file_name(format!(".{name}.{}.partial", std::process::id()));
        Self {
            tmp,
            dest: dest.to_path_buf(),
            done: false,
        }
    }

    pub fn path(&self) -> &Path {
        &self.tmp
    }

    fn commit(mut self) -> Result<(), Failure> {
        std::fs::rename(&self.tmp, &self.dest)
            .map_err(|e| Failure::Io(format!("cannot move output into {}: {e}", self.dest.display())))?;
        self.done = true;
        Ok(())
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        if !self.done {
            let _ = std::fs::remove_file(&self.tmp);
        }
    }
}

/// Renames every staged file into place. Outputs already moved are removed
/// again if a later rename fails.
pub fn commit_all(staged: Vec<Staged>) -> Result<(), Failure> {
    let mut moved: Vec<PathBuf> = Vec::new();
    for s in staged {
        let dest = s.dest.clone();
        if let Err(e) = s.commit() {
            for p in moved {
                let _ = std::fs::remove_file(p);
            }
            return Err(e);
        }
        moved.push(dest);
    }
    Ok(())
}
