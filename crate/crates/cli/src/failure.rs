use std::fmt;

use vocalcrypt::Error;

/// A failed command, classified by exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Processing(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Io(_) => 2,
            Self::Processing(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Io(m) | Self::Processing(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) | Error::MalformedFile(_) | Error::UnsupportedFormat(_) | Error::SidecarParse(_) => {
                Self::Io(msg)
            }
            Error::InvalidConfig(_) | Error::InvalidAttack(_) => Self::Usage(msg),
            _ => Self::Processing(msg),
        }
    }
}

/// Attaches the offending path to a library error.
pub fn at(path: &std::path::Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Io(m) => Failure::Io(format!("{}: {m}", path.display())),
        Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
        Failure::Processing(m) => Failure::Processing(format!("{}: {m}", path.display())),
    }
}
