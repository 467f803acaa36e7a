mod common;

use std::f64::consts::PI;

use common::*;
use vocalcrypt::audio::read_wav;
use vocalcrypt::psychoacoustics::bark_layout;
use vocalcrypt::report::TextTable;
use vocalcrypt::synth::SpeechParams;
use vocalcrypt::Clip;

fn eight_k(dir: &std::path::Path) -> std::path::PathBuf {
    let params = SpeechParams {
        sample_rate: 8000,
        seconds: 2.0,
        seed: 5,
        ..SpeechParams::default()
    };
    speech_wav(dir, "in.wav", &params)
}

#[test]
fn protect_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = eight_k(dir.path());
    let out = dir.path().join("out.wav");
    let o = run(&["protect", p(&input), p(&out), "--key", KEY]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = stdout(&o);
    let a: Clip = read_wav(&input).unwrap();
    let b: Clip = read_wav(&out).unwrap();
    assert_eq!((a.len(), a.sample_rate()), (b.len(), b.sample_rate()));
    assert_eq!(field(&summary, "frames"), "32");
    assert_eq!(field(&summary, "clipped"), "0");
    assert!(field(&summary, "mean_nmr_db").parse::<f64>().unwrap() <= -5.0);
    assert!(field(&summary, "max_nmr_db").parse::<f64>().unwrap() <= -5.0 + 1e-9);

    let sidecar = dir.path().join("out.wav.sidecar");
    let o = run(&["verify", p(&out), p(&sidecar), "--key", KEY]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = TextTable::parse(&stdout(&o)).unwrap();
    let all = t.rows.last().unwrap();
    assert_eq!((all[0].as_str(), all[1].as_str()), ("all", "0"));
    assert!(stderr(&o).is_empty());

    let o = run(&["verify", p(&out), p(&sidecar), "--key", "1"]);
    assert_eq!(code(&o), 0);
    let ber: f64 = TextTable::parse(&stdout(&o)).unwrap().rows.last().unwrap()[3]
        .parse()
        .unwrap();
    assert!((ber - 0.5).abs() < 0.05, "{ber}");
    assert!(stderr(&o).contains("key does not match"));
    assert!(stderr(&o).contains("warning: BER"));
}

#[test]
fn protect_is_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = eight_k(dir.path());
    let (a, b) = (dir.path().join("a.wav"), dir.path().join("b.wav"));
    for out in [&a, &b] {
        assert_eq!(code(&run(&["protect", p(&input), p(out), "--key", KEY])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let sc = |x: &std::path::Path| std::fs::read(format!("{}.sidecar", x.display())).unwrap();
    assert_eq!(sc(&a), sc(&b));
}

#[test]
fn failures_leave_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.wav");
    let o = run(&["protect", p(&dir.path().join("missing.wav")), p(&out), "--key", KEY]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"));

    // a full-scale square wave clips once the payload is added
    let loud: Vec<f64> = (0..8000).map(|i| if (i / 20) % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let input = samples_wav(dir.path(), "loud.wav", loud, 8000);
    let o = run(&["protect", p(&input), p(&out), "--key", KEY, "--clip", "reject"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, vec![std::ffi::OsString::from("loud.wav")]);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = eight_k(dir.path());
    let out = dir.path().join("o.wav");
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["protect", p(&input), p(&out)])), 1, "key is required");
    assert_eq!(code(&run(&["protect", p(&input), p(&out), "--key", "xyz"])), 1);
    assert_eq!(
        code(&run(&["protect", p(&input), p(&out), "--key", "1", "--nmr-limit", "3"])),
        1
    );
    assert_eq!(code(&run(&["attack", p(&input), p(&out), "blur:3"])), 1);
    assert_eq!(code(&run(&["attack", p(&input), p(&out), "requantize:2"])), 1);
    assert!(!out.exists());
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn verify_rejects_mismatched_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let input = eight_k(dir.path());
    let out = dir.path().join("out.wav");
    assert_eq!(code(&run(&["protect", p(&input), p(&out), "--key", KEY])), 0);
    let other = speech_wav(
        dir.path(),
        "other.wav",
        &SpeechParams {
            sample_rate: 16000,
            seconds: 2.0,
            ..SpeechParams::default()
        },
    );
    let o = run(&[
        "verify",
        p(&other),
        p(&dir.path().join("out.wav.sidecar")),
        "--key",
        KEY,
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("sidecar does not match"));

    let broken = dir.path().join("broken.sidecar");
    std::fs::write(&broken, "not a sidecar\n").unwrap();
    assert_eq!(code(&run(&["verify", p(&out), p(&broken), "--key", KEY])), 2);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = eight_k(dir.path());
    let cfg = dir.path().join("vc.conf");
    std::fs::write(&cfg, format!("# test\nkey = {KEY}\nbands = 1-3\nnmr_limit = -8\n")).unwrap();
    let out = dir.path().join("out.wav");
    let o = run(&["--config", p(&cfg), "protect", p(&input), p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "bands"), "1,2,3");
    assert!(field(&stdout(&o), "max_nmr_db").parse::<f64>().unwrap() <= -8.0 + 1e-9);

    let o = run(&["--config", p(&cfg), "protect", p(&input), p(&out), "--bands", "2,4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(field(&stdout(&o), "bands"), "2,4");
    // the key comes from the file
    let o = run(&["--config", p(&cfg), "verify", p(&out), &format!("{}.sidecar", p(&out))]);
    assert_eq!(code(&o), 0);
    assert!(!stderr(&o).contains("key does not match"));
    let ber: f64 = TextTable::parse(&stdout(&o)).unwrap().rows.last().unwrap()[3]
        .parse()
        .unwrap();
    assert!(ber < 0.01, "{ber}");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(
        code(&run(&[
            "--config",
            p(&cfg),
            "protect",
            p(&input),
            p(&out),
            "--key",
            "1"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "--config",
            p(&dir.path().join("nope.conf")),
            "protect",
            p(&input),
            p(&out)
        ])),
        2
    );
}

#[test]
fn analyze_silence_sits_on_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    let input = samples_wav(dir.path(), "quiet.wav", vec![0.0; 504 * 4], 8000);
    let report = dir.path().join("quiet.txt");
    let o = run(&["analyze", p(&input), p(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = TextTable::parse(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let layout = bark_layout(8000, 504).unwrap();
    assert_eq!(t.rows.len(), 4 * layout.bands.len());
    let col = |n: &str| t.column(n).unwrap();
    for r in &t.rows {
        let band: usize = r[col("band")].parse().unwrap();
        let b = layout.band(band).unwrap();
        let tz: f64 = r[col("threshold")].parse().unwrap();
        let want = b.count() as f64 * b.ath_energy;
        assert!((tz - want).abs() <= 1e-12 * want, "band {band}");
        assert_eq!(r[col("energy")].parse::<f64>().unwrap(), 0.0);
        let payload = layout.embed_bands.contains(&band);
        assert_eq!(r[col("step")] != "-", payload);
    }
}

#[test]
fn analyze_tone_lifts_band_three() {
    let dir = tempfile::tempdir().unwrap();
    let tone: Vec<f64> = (0..504 * 3)
        .map(|i| (2.0 * PI * 250.0 * i as f64 / 8000.0).sin() * 0.999)
        .collect();
    let input = samples_wav(dir.path(), "tone.wav", tone, 8000);
    let o = run(&["analyze", p(&input), "-"]);
    assert_eq!(code(&o), 0);
    let t = TextTable::parse(&stdout(&o)).unwrap();
    let (fc, bc, ec) = (
        t.column("frame").unwrap(),
        t.column("band").unwrap(),
        t.column("energy").unwrap(),
    );
    let frame0: Vec<_> = t.rows.iter().filter(|r| r[fc] == "0").collect();
    let loudest = frame0
        .iter()
        .max_by(|a, b| a[ec].parse::<f64>().unwrap().total_cmp(&b[ec].parse().unwrap()))
        .unwrap();
    assert_eq!(loudest[bc], "3");
}

#[test]
fn attacks_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let input = speech_wav(
        dir.path(),
        "in.wav",
        &SpeechParams {
            sample_rate: 16000,
            seconds: 1.5,
            ..SpeechParams::default()
        },
    );
    let out = dir.path().join("rs.wav");
    assert_eq!(code(&run(&["attack", p(&input), p(&out), "resample:8000"])), 0);
    let (a, b): (Clip, Clip) = (read_wav(&input).unwrap(), read_wav(&out).unwrap());
    assert_eq!((b.sample_rate(), b.len()), (16000, a.len()));

    let (n1, n2, n3) = (
        dir.path().join("n1.wav"),
        dir.path().join("n2.wav"),
        dir.path().join("n3.wav"),
    );
    assert_eq!(code(&run(&["attack", p(&input), p(&n1), "noise:20", "--seed", "3"])), 0);
    assert_eq!(code(&run(&["attack", p(&input), p(&n2), "noise:20:3"])), 0);
    assert_eq!(code(&run(&["attack", p(&input), p(&n3), "noise:20:4"])), 0);
    assert_eq!(std::fs::read(&n1).unwrap(), std::fs::read(&n2).unwrap());
    assert_ne!(std::fs::read(&n1).unwrap(), std::fs::read(&n3).unwrap());
}

#[test]
fn metrics_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = eight_k(dir.path());
    let out = dir.path().join("out.wav");
    assert_eq!(code(&run(&["protect", p(&input), p(&out), "--key", KEY])), 0);
    let o = run(&["metrics", p(&input), p(&input)]);
    assert_eq!(code(&o), 0);
    let t = TextTable::parse(&stdout(&o)).unwrap();
    let value = |t: &TextTable, m: &str, b: &str| -> f64 {
        t.rows.iter().find(|r| r[0] == m && r[1] == b).unwrap()[2]
            .parse()
            .unwrap()
    };
    assert_eq!(value(&t, "snr_db", "-"), 120.0);
    assert_eq!(value(&t, "lsd_db", "-"), 0.0);

    let sc = format!("{}.sidecar", p(&out));
    let o = run(&["metrics", p(&input), p(&out), "--sidecar", &sc, "--key", KEY]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = TextTable::parse(&stdout(&o)).unwrap();
    assert_eq!(value(&t, "ber", "all"), 0.0);
    let snr = value(&t, "snr_db", "-");
    assert!(snr.is_finite() && snr > 0.0);
    for b in 1..=7 {
        assert!(value(&t, "nmr_max_db", &b.to_string()) <= -5.0 + 1e-6, "band {b}");
    }
}

#[test]
fn bench_reports_throughput() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bench", p(dir.path())]);
    assert_ne!(code(&o), 0);
    for i in 0..10 {
        speech_wav(
            dir.path(),
            &format!("c{i}.wav"),
            &SpeechParams {
                sample_rate: 8000,
                seconds: 1.0,
                seed: i,
                ..SpeechParams::default()
            },
        );
    }
    let o = run(&["bench", p(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(field(&s, "files"), "10");
    assert_eq!(field(&s, "threads"), "1");
    assert!(field(&s, "rtf").parse::<f64>().unwrap() > 0.0);
}
