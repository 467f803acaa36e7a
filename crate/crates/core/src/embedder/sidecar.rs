//! Protection sidecar: the per-band quantizer steps needed to read the
//! payload back.
//!
//! Line-oriented UTF-8 text, fields separated by single spaces:
//!
//! ```text
//! vocalcrypt-sidecar 1
//! sample_rate <Hz>
//! frame_len <samples>
//! channels <count>
//! frames <frames per channel>
//! bands <band> <band> ...
//! source keyed <16 hex digits> | source decoy
//! data
//! <channel> <frame> <band> <step> <skipped 0|1>
//! ...
//! ```
//!
//! Data rows are ordered by channel, frame, then band in header order, and
//! cover every combination exactly once. `step` is written with Rust's
//! shortest round-trip float formatting, so parsing restores it bit-exactly.
//! Skipped bands carry step `0`. Decoy audio is never stored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const SIDECAR_MAGIC: &str = "vocalcrypt-sidecar";
pub const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceTag {
    Keyed(u64),
    Decoy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandStep {
    pub step: f64,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub sample_rate: u32,
    pub frame_len: usize,
    pub bands: Vec<usize>,
    pub source: SourceTag,
    /// `steps[channel][frame][i]` belongs to `bands[i]`.
    pub steps: Vec<Vec<Vec<BandStep>>>,
}

impl Sidecar {
    pub fn channels(&self) -> usize {
        self.steps.len()
    }

    pub fn frames(&self) -> usize {
        self.steps.first().map_or(0, Vec::len)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SIDECAR_MAGIC} {SIDECAR_VERSION}").unwrap();
        writeln!(s, "sample_rate {}", self.sample_rate).unwrap();
        writeln!(s, "frame_len {}", self.frame_len).unwrap();
        writeln!(s, "channels {}", self.channels()).unwrap();
        writeln!(s, "frames {}", self.frames()).unwrap();
        let bands: Vec<String> = self.bands.iter().map(usize::to_string).collect();
        writeln!(s, "bands {}", bands.join(" ")).unwrap();
        match self.source {
            SourceTag::Keyed(k) => writeln!(s, "source keyed {k:016x}").unwrap(),
            SourceTag::Decoy => writeln!(s, "source decoy").unwrap(),
        }
        s.push_str("data\n");
        for (c, frames) in self.steps.iter().enumerate() {
            for (f, row) in frames.iter().enumerate() {
                for (b, st) in self.bands.iter().zip(row) {
                    writeln!(s, "{c} {f} {b} {} {}", st.step, u8::from(st.skipped)).unwrap();
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::SidecarParse(m);
        let mut lines = text.lines().enumerate();
        let mut header = |name: &str| -> Result<Vec<String>> {
            let (no, line) = lines.next().ok_or_else(|| bad(format!("missing `{name}` line")))?;
            let mut parts = line.split(' ');
            if parts.next() != Some(name) {
                return Err(bad(format!("line {}: expected `{name}`", no + 1)));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let num = |v: &[String], what: &str| -> Result<u64> {
            match v {
                [x] => x.parse().map_err(|_| bad(format!("bad {what} `{x}`"))),
                _ => Err(bad(format!("`{what}` takes one value"))),
            }
        };
        let version = num(&header(SIDECAR_MAGIC)?, "version")?;
        if version != SIDECAR_VERSION as u64 {
            return Err(bad(format!("unsupported version {version}")));
        }
        let sample_rate = num(&header("sample_rate")?, "sample_rate")? as u32;
        let frame_len = num(&header("frame_len")?, "frame_len")? as usize;
        let channels = num(&header("channels")?, "channels")? as usize;
        let frames = num(&header("frames")?, "frames")? as usize;
        let bands = header("bands")?
            .iter()
            .map(|b| b.parse::<usize>().map_err(|_| bad(format!("bad band `{b}`"))))
            .collect::<Result<Vec<_>>>()?;
        let source = match header("source")?.as_slice() {
            [m] if m == "decoy" => SourceTag::Decoy,
            [m, k] if m == "keyed" => {
                SourceTag::Keyed(u64::from_str_radix(k, 16).map_err(|_| bad(format!("bad key `{k}`")))?)
            }
            other => return Err(bad(format!("bad source {other:?}"))),
        };
        if !header("data")?.is_empty() {
            return Err(bad("`data` takes no values".into()));
        }

        let mut steps = vec![vec![Vec::with_capacity(bands.len()); frames]; channels];
        let mut rows = lines.filter(|(_, l)| !l.is_empty());
        for (c, ch) in steps.iter_mut().enumerate() {
            for (f, row) in ch.iter_mut().enumerate() {
                for &b in &bands {
                    let (no, line) = rows.next().ok_or_else(|| bad(format!("missing row {c} {f} {b}")))?;
                    let fields: Vec<&str> = line.split(' ').collect();
                    let ok = fields.len() == 5
                        && fields[0] == c.to_string()
                        && fields[1] == f.to_string()
                        && fields[2] == b.to_string();
                    if !ok {
                        return Err(bad(format!("line {}: expected row for {c} {f} {b}", no + 1)));
                    }
                    let step: f64 = fields[3]
                        .parse()
                        .map_err(|_| bad(format!("line {}: bad step", no + 1)))?;
                    let skipped = match fields[4] {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad(format!("line {}: bad skip flag", no + 1))),
                    };
                    if !step.is_finite() || step < 0.0 || (!skipped && step == 0.0) {
                        return Err(bad(format!("line {}: invalid step {step}", no + 1)));
                    }
                    row.push(BandStep { step, skipped });
                }
            }
        }
        if let Some((no, _)) = rows.next() {
            return Err(bad(format!("line {}: unexpected trailing row", no + 1)));
        }
        Ok(Self {
            sample_rate,
            frame_len,
            bands,
            source,
            steps,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}
