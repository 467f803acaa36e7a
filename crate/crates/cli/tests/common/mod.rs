#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vocalcrypt::audio::{write_wav, AudioClip};
use vocalcrypt::synth::{corpus_params, speech_like, SpeechParams};

pub const KEY: &str = "00c0ffee12345678";

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vocalcrypt"))
        .args(args)
        .output()
        .expect("spawn vocalcrypt")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// `name value` line of a command summary.
pub fn field(text: &str, name: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(name).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{name}` in:\n{text}"))
        .to_string()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn speech_wav(dir: &Path, name: &str, params: &SpeechParams) -> PathBuf {
    let path = dir.join(name);
    write_wav(&speech_like(params).unwrap(), &path).unwrap();
    path
}

pub fn corpus_wav(dir: &Path, i: usize) -> PathBuf {
    speech_wav(dir, &format!("clip{i:02}.wav"), &corpus_params(i))
}

pub fn samples_wav(dir: &Path, name: &str, samples: Vec<f64>, fs: u32) -> PathBuf {
    let path = dir.join(name);
    write_wav(&AudioClip::mono(samples, fs).unwrap(), &path).unwrap();
    path
}
