//! Minimal RIFF/WAVE reader and writer: 16-bit integer PCM, one or two channels.
//!
//! Only the `fmt ` and `data` chunks are interpreted. Any other chunk
//! (`LIST`, `fact`, `cue `, ...) is skipped on read and never written.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::AudioClip;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

pub fn read_wav<T: Scalar>(path: impl AsRef<Path>) -> Result<AudioClip<T>> {
    let file = File::open(path)?;
    read_wav_from(BufReader::new(file))
}

pub fn read_wav_from<T: Scalar, R: Read>(mut reader: R) -> Result<AudioClip<T>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let (channels, sample_rate, words) = parse(&bytes)?;
    let scale = T::lit(1.0 / 32768.0);
    let mut out = vec![Vec::with_capacity(words.len() / channels); channels];
    for (i, w) in words.iter().enumerate() {
        out[i % channels].push(T::lit(*w as f64) * scale);
    }
    AudioClip::new(out, sample_rate)
}

fn parse(bytes: &[u8]) -> Result<(usize, u32, Vec<i16>)> {
    let malformed = |m: &str| Error::MalformedFile(m.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE header"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, usize, u32, u16, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| malformed("chunk extends past end of file"))?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(malformed("fmt chunk too short"));
                }
                let u16_at = |o: usize| u16::from_le_bytes([body[o], body[o + 1]]);
                let mut format = u16_at(0);
                let channels = u16_at(2) as usize;
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let block_align = u16_at(12);
                let bits = u16_at(14);
                if format == FORMAT_EXTENSIBLE {
                    if size < 40 {
                        return Err(malformed("extensible fmt chunk too short"));
                    }
                    // first two bytes of the sub-format GUID carry the format code
                    format = u16_at(24);
                }
                fmt = Some((format, channels, rate, block_align, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos = body_end + (size & 1);
    }
    let (format, channels, rate, block_align, bits) = fmt.ok_or_else(|| malformed("no fmt chunk"))?;
    let data = data.ok_or_else(|| malformed("no data chunk"))?;
    if format != FORMAT_PCM {
        return Err(Error::UnsupportedFormat(format!("compression code {format:#x}")));
    }
    if bits != 16 {
        return Err(Error::UnsupportedFormat(format!("{bits}-bit samples")));
    }
    if channels == 0 || channels > 2 {
        return Err(Error::UnsupportedFormat(format!("{channels} channels")));
    }
    if rate == 0 {
        return Err(malformed("zero sample rate"));
    }
    if block_align as usize != 2 * channels {
        return Err(malformed("block align inconsistent with channel count"));
    }
    if data.len() % block_align as usize != 0 {
        return Err(malformed("data chunk is not a whole number of frames"));
    }
    let words = data.chunks_exact(2).map(|b| i16::from_le_bytes([b[0], b[1]])).collect();
    Ok((channels, rate, words))
}

/// Quantizes a sample to a 16-bit word: `round(x * 32768)`, saturating.
///
/// Using the same scale as [`read_wav`] makes read/write round trips bit-exact;
/// a full-scale `1.0` saturates to `32767`.
pub(crate) fn quantize_i16<T: Scalar>(x: T) -> i16 {
    let v = (x.to_f64_lossy() * 32768.0).round();
    v.clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

pub fn write_wav<T: Scalar>(clip: &AudioClip<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_wav_to(clip, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_wav_to<T: Scalar, W: Write>(clip: &AudioClip<T>, mut w: W) -> Result<()> {
    let channels = clip.channel_count() as u16;
    let block_align = 2 * channels;
    let data_len = clip.len() * block_align as usize;
    if data_len + 36 > u32::MAX as usize {
        return Err(Error::UnsupportedFormat("clip too long for RIFF".into()));
    }
    let mut buf = Vec::with_capacity(44 + data_len);
    buf.extend_from_slice(b"RIFF");
    buf.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    buf.extend_from_slice(b"WAVEfmt ");
    buf.extend_from_slice(&16u32.to_le_bytes());
    buf.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    buf.extend_from_slice(&channels.to_le_bytes());
    buf.extend_from_slice(&clip.sample_rate().to_le_bytes());
    buf.extend_from_slice(&(clip.sample_rate() * block_align as u32).to_le_bytes());
    buf.extend_from_slice(&block_align.to_le_bytes());
    buf.extend_from_slice(&16u16.to_le_bytes());
    buf.extend_from_slice(b"data");
    buf.extend_from_slice(&(data_len as u32).to_le_bytes());
    for i in 0..clip.len() {
        for ch in clip.channels() {
            buf.extend_from_slice(&quantize_i16(ch[i]).to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}
