//! Line-oriented text tables: a `# col col ...` header followed by one
//! whitespace-separated row per record. Loads directly into most plotting tools.

use std::fmt::Write as _;

use crate::metrics::MetricsReport;
use crate::psychoacoustics::MaskingReport;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TextTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\n", self.columns.join(" "));
        for r in &self.rows {
            out.push_str(&r.join(" "));
            out.push('\n');
        }
        out
    }

    /// Reads back a rendered table. Blank lines are ignored.
    pub fn parse(text: &str) -> Option<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let columns: Vec<String> = lines
            .next()?
            .strip_prefix("# ")?
            .split_whitespace()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for l in lines {
            let r: Vec<String> = l.split_whitespace().map(String::from).collect();
            if r.len() != columns.len() {
                return None;
            }
            rows.push(r);
        }
        Some(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn num(v: f64) -> String {
    let mut s = String::new();
    if v.is_finite() {
        write!(s, "{v:e}").unwrap();
    } else {
        write!(s, "{v}").unwrap();
    }
    s
}

pub const ANALYZE_COLUMNS: [&str; 15] = [
    "channel",
    "frame",
    "band",
    "count",
    "energy",
    "sfm_db",
    "tonality",
    "offset_db",
    "spread",
    "raw_threshold",
    "ath_db",
    "ath_energy",
    "threshold",
    "step",
    "skipped",
];

/// One row per channel, frame and band. `step` is `-` where no step was set.
pub fn analyze_table<T: Scalar>(reports: &[MaskingReport<T>]) -> TextTable {
    let mut t = TextTable::new(&ANALYZE_COLUMNS);
    for r in reports {
        for (f, bands) in r.frames.iter().enumerate() {
            for b in bands {
                t.push(vec![
                    r.channel.to_string(),
                    f.to_string(),
                    b.band.to_string(),
                    b.count.to_string(),
                    num(b.energy.to_f64_lossy()),
                    num(b.sfm_db.to_f64_lossy()),
                    num(b.tonality.to_f64_lossy()),
                    num(b.offset_db.to_f64_lossy()),
                    num(b.spread.to_f64_lossy()),
                    num(b.raw_threshold.to_f64_lossy()),
                    num(b.ath_db),
                    num(b.ath_energy.to_f64_lossy()),
                    num(b.threshold.to_f64_lossy()),
                    b.step.map_or("-".into(), |s| num(s.to_f64_lossy())),
                    u8::from(b.skipped).to_string(),
                ]);
            }
        }
    }
    t
}

/// `metric band value` rows; `band` is `-` for whole-clip measures.
pub fn metrics_table(m: &MetricsReport) -> TextTable {
    let mut t = TextTable::new(&["metric", "band", "value"]);
    let mut row = |name: &str, band: String, v: String| t.push(vec![name.into(), band, v]);
    row("snr_db", "-".into(), num(m.snr_db));
    row("seg_snr_db", "-".into(), num(m.seg_snr_db));
    row("lsd_db", "-".into(), num(m.lsd_db));
    row("clipped", "-".into(), m.clipped.to_string());
    for b in &m.bands {
        row("nmr_mean_db", b.band.to_string(), num(b.mean_db));
        row("nmr_max_db", b.band.to_string(), num(b.max_db));
    }
    if let Some(ber) = &m.ber {
        for b in &ber.per_band {
            row("ber", b.band.to_string(), num(b.rate()));
        }
        row("ber", "all".into(), num(ber.overall()));
    }
    t
}
