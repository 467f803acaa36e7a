use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use vocalcrypt::attacks::{apply_attack, AttackSpec};
use vocalcrypt::audio::{frame_length_for, read_wav, write_wav};
use vocalcrypt::embedder::{
    plan_steps, protect, verify, ClipPolicy, EmbedConfig, PseudoTimbreSource, Sidecar, SourceTag, Warning,
};
use vocalcrypt::metrics::compare;
use vocalcrypt::psychoacoustics::{analyze_clip, BarkLayout};
use vocalcrypt::report::{analyze_table, metrics_table, TextTable};
use vocalcrypt::Clip;

use crate::config::{parse_bands, parse_f64, parse_key, parse_string, parse_u64, parse_usize, FileConfig};
use crate::failure::{at, Failure};
use crate::output::{commit_all, Staged};
use crate::{Command, EmbedArgs, PayloadArgs};

pub const DEFAULT_MAX_BER: f64 = 0.1;

pub fn dispatch(cmd: Command, file: &FileConfig) -> Result<(), Failure> {
    match cmd {
        Command::Protect {
            input,
            output,
            sidecar,
            payload,
            embed,
        } => cmd_protect(&input, &output, sidecar, &payload, &embed, file),
        Command::Verify {
            input,
            sidecar,
            payload,
            max_ber,
        } => cmd_verify(&input, &sidecar, &payload, max_ber, file),
        Command::Analyze { input, report, embed } => cmd_analyze(&input, report, &embed, file),
        Command::Attack {
            input,
            output,
            spec,
            seed,
        } => cmd_attack(&input, &output, spec, seed, file),
        Command::Metrics {
            original,
            processed,
            sidecar,
            payload,
            report,
        } => cmd_metrics(&original, &processed, sidecar, &payload, report, file),
        Command::Bench {
            dir,
            threads,
            key,
            embed,
        } => cmd_bench(&dir, threads, key, &embed, file),
    }
}

fn read(path: &Path) -> Result<Clip, Failure> {
    if !path.exists() {
        return Err(Failure::Io(format!("{}: no such file", path.display())));
    }
    read_wav(path).map_err(at(path))
}

fn embed_config(args: &EmbedArgs, file: &FileConfig) -> Result<EmbedConfig, Failure> {
    let mut cfg = EmbedConfig::default();
    let flag_bands = args
        .bands
        .as_deref()
        .map(parse_bands)
        .transpose()
        .map_err(Failure::Usage)?;
    if let Some(b) = file.pick(flag_bands, "bands", parse_bands)? {
        cfg.embed_bands = b;
    }
    if let Some(v) = file.pick(args.nmr_limit, "nmr_limit", parse_f64)? {
        cfg.nmr_limit_db = v;
    }
    if let Some(v) = file.pick(args.skip_floor, "skip_floor", parse_f64)? {
        cfg.skip_floor_db = v;
    }
    if let Some(v) = file.pick(args.clip.clone(), "clip", parse_string)? {
        cfg.clip = match v.as_str() {
            "clamp" => ClipPolicy::Clamp,
            "reject" => ClipPolicy::Reject,
            _ => return Err(Failure::Usage(format!("clip policy `{v}` is not clamp or reject"))),
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn key_of(flag: Option<String>, file: &FileConfig) -> Result<Option<u64>, Failure> {
    let flag = flag.as_deref().map(parse_key).transpose().map_err(Failure::Usage)?;
    file.pick(flag, "key", parse_key)
}

enum Mode {
    Keyed(u64),
    Decoy(PathBuf),
}

fn payload_mode(args: &PayloadArgs, file: &FileConfig) -> Result<Mode, Failure> {
    let mode = file
        .pick(args.mode.clone(), "mode", parse_string)?
        .unwrap_or_else(|| "keyed".into());
    match mode.as_str() {
        "keyed" => match key_of(args.key.clone(), file)? {
            Some(k) => Ok(Mode::Keyed(k)),
            None => Err(Failure::Usage(
                "a payload key is required (--key or `key` in the config)".into(),
            )),
        },
        "decoy" => match file.pick(args.decoy.clone(), "decoy", |s| Ok(PathBuf::from(s)))? {
            Some(p) => Ok(Mode::Decoy(p)),
            None => Err(Failure::Usage(
                "decoy mode needs --decoy or `decoy` in the config".into(),
            )),
        },
        m => Err(Failure::Usage(format!("mode `{m}` is not keyed or decoy"))),
    }
}

fn source(mode: &Mode) -> Result<PseudoTimbreSource<f64>, Failure> {
    Ok(match mode {
        Mode::Keyed(key) => PseudoTimbreSource::Keyed { key: *key },
        Mode::Decoy(p) => PseudoTimbreSource::Decoy(read(p)?),
    })
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".sidecar");
    PathBuf::from(s)
}

fn stage_text(path: &Path, text: &str) -> Result<Staged, Failure> {
    let s = Staged::new(path);
    std::fs::write(s.path(), text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn stage_wav(path: &Path, clip: &Clip) -> Result<Staged, Failure> {
    let s = Staged::new(path);
    write_wav(clip, s.path()).map_err(at(path))?;
    Ok(s)
}

fn fmt_db(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.3}"))
}

fn cmd_protect(
    input: &Path,
    output: &Path,
    sidecar: Option<PathBuf>,
    payload: &PayloadArgs,
    embed: &EmbedArgs,
    file: &FileConfig,
) -> Result<(), Failure> {
    let cfg = embed_config(embed, file)?;
    let mode = payload_mode(payload, file)?;
    let sidecar = file
        .pick(sidecar, "sidecar", |s| Ok(PathBuf::from(s)))?
        .unwrap_or_else(|| sidecar_path(output));
    let clip = read(input)?;
    let src = source(&mode)?;
    let out = protect(&clip, &src, &cfg).map_err(at(input))?;

    let staged = vec![
        stage_wav(output, &out.clip)?,
        stage_text(&sidecar, &out.sidecar.to_text())?,
    ];
    commit_all(staged)?;

    for w in &out.warnings {
        match w {
            Warning::SilentInput => eprintln!("warning: {}: every payload band fell below the floor", input.display()),
            Warning::NoCompleteFrame => {
                eprintln!("warning: {}: shorter than one frame, nothing embedded", input.display())
            }
        }
    }
    if out.clipped > 0 {
        eprintln!("warning: {}: {} samples clamped", input.display(), out.clipped);
    }
    println!("file {}", input.display());
    println!("sample_rate {}", clip.sample_rate());
    println!("channels {}", clip.channel_count());
    println!("frames {}", out.frames());
    println!("bands {}", join(&out.layout.embed_bands));
    println!("embedded_bands {}", out.embedded_count());
    println!("skipped_bands {}", out.skipped_count());
    println!("clipped {}", out.clipped);
    println!("mean_nmr_db {}", fmt_db(out.mean_nmr_db()));
    println!("max_nmr_db {}", fmt_db(out.max_worst_nmr_db()));
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_verify(
    input: &Path,
    sidecar_path: &Path,
    payload: &PayloadArgs,
    max_ber: Option<f64>,
    file: &FileConfig,
) -> Result<(), Failure> {
    let mode = payload_mode(payload, file)?;
    let max_ber = file.pick(max_ber, "max_ber", parse_f64)?.unwrap_or(DEFAULT_MAX_BER);
    let clip = read(input)?;
    if !sidecar_path.exists() {
        return Err(Failure::Io(format!("{}: no such file", sidecar_path.display())));
    }
    let sidecar = Sidecar::read(sidecar_path).map_err(at(sidecar_path))?;
    match (&mode, sidecar.source) {
        (Mode::Keyed(k), SourceTag::Keyed(s)) if *k != s => {
            eprintln!("warning: key does not match the one recorded in the sidecar")
        }
        (Mode::Keyed(_), SourceTag::Decoy) => eprintln!("warning: sidecar was written in decoy mode"),
        (Mode::Decoy(_), SourceTag::Keyed(_)) => eprintln!("warning: sidecar was written in keyed mode"),
        _ => {}
    }
    let src = source(&mode)?;
    let ber = verify(&clip, &sidecar, &src).map_err(at(input))?;
    let mut t = TextTable::new(&["band", "errors", "bits", "ber"]);
    for b in &ber.per_band {
        t.push(vec![
            b.band.to_string(),
            b.errors.to_string(),
            b.bits.to_string(),
            format!("{:.6}", b.rate()),
        ]);
    }
    t.push(vec![
        "all".into(),
        ber.errors().to_string(),
        ber.bits().to_string(),
        format!("{:.6}", ber.overall()),
    ]);
    print!("{}", t.render());
    if ber.overall() > max_ber {
        eprintln!(
            "warning: BER {:.3} above {max_ber}: wrong key, unprotected input or heavy processing",
            ber.overall()
        );
    }
    Ok(())
}

fn emit(report: Option<&Path>, text: &str) -> Result<(), Failure> {
    match report {
        Some(p) if p != Path::new("-") => commit_all(vec![stage_text(p, text)?]),
        _ => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn cmd_analyze(input: &Path, report: Option<PathBuf>, embed: &EmbedArgs, file: &FileConfig) -> Result<(), Failure> {
    let cfg = embed_config(embed, file)?;
    let report = file.pick(report, "report", |s| Ok(PathBuf::from(s)))?;
    let clip = read(input)?;
    let fs = clip.sample_rate();
    let layout = BarkLayout::new(fs, frame_length_for(fs)?, &cfg.embed_bands)?;
    let mut reports = analyze_clip(&clip, &layout).map_err(at(input))?;
    plan_steps(&mut reports, &layout, &cfg)?;
    emit(report.as_deref(), &analyze_table(&reports).render())
}

fn cmd_attack(
    input: &Path,
    output: &Path,
    spec: Option<String>,
    seed: Option<u64>,
    file: &FileConfig,
) -> Result<(), Failure> {
    let text = file
        .pick(spec, "attack", parse_string)?
        .ok_or_else(|| Failure::Usage("an attack spec is required".into()))?;
    let mut spec: AttackSpec = text.parse()?;
    if let AttackSpec::Noise { seed: s, .. } = &mut spec {
        if text.split(':').count() < 3 {
            *s = file.pick(seed, "seed", parse_u64)?.unwrap_or(0);
        }
    }
    let clip = read(input)?;
    let out = apply_attack(&clip, &spec).map_err(at(input))?;
    commit_all(vec![stage_wav(output, &out)?])?;
    println!("attack {spec}");
    println!("samples {}", out.len());
    Ok(())
}

fn cmd_metrics(
    original: &Path,
    processed: &Path,
    sidecar: Option<PathBuf>,
    payload: &PayloadArgs,
    report: Option<PathBuf>,
    file: &FileConfig,
) -> Result<(), Failure> {
    let report = file.pick(report, "report", |s| Ok(PathBuf::from(s)))?;
    let sidecar = file.pick(sidecar, "sidecar", |s| Ok(PathBuf::from(s)))?;
    let (a, b) = (read(original)?, read(processed)?);
    let m = match sidecar {
        Some(p) => {
            let sc = Sidecar::read(&p).map_err(at(&p))?;
            let src = source(&payload_mode(payload, file)?)?;
            compare(&a, &b, Some((&sc, &src)))
        }
        None => compare(&a, &b, None),
    }
    .map_err(at(processed))?;
    emit(report.as_deref(), &metrics_table(&m).render())
}

fn cmd_bench(
    dir: &Path,
    threads: Option<usize>,
    key: Option<String>,
    embed: &EmbedArgs,
    file: &FileConfig,
) -> Result<(), Failure> {
    let cfg = embed_config(embed, file)?;
    let threads = file.pick(threads, "threads", parse_usize)?.unwrap_or(1);
    if threads == 0 {
        return Err(Failure::Usage("threads must be at least 1".into()));
    }
    let key = key_of(key, file)?.unwrap_or(0);
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Io(format!("{}: no WAV files", dir.display())));
    }
    let clips = paths.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Processing(e.to_string()))?;
    let src = PseudoTimbreSource::Keyed { key };
    let start = Instant::now();
    pool.install(|| {
        clips
            .iter()
            .zip(&paths)
            .try_for_each(|(c, p)| protect(c, &src, &cfg).map(drop).map_err(at(p)))
    })?;
    let wall = start.elapsed().as_secs_f64();
    let audio: f64 = clips.iter().map(Clip::duration_secs).sum();
    let samples: usize = clips.iter().map(|c| c.len() * c.channel_count()).sum();
    println!("files {}", clips.len());
    println!("threads {threads}");
    println!("audio_seconds {audio:.3}");
    println!("wall_seconds {wall:.6}");
    println!("rtf {:.2}", audio / wall);
    println!("mean_file_seconds {:.6}", wall / clips.len() as f64);
    println!("ns_per_sample {:.2}", wall * 1e9 / samples as f64);
    Ok(())
}
