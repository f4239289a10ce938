use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptransform"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

/// Spectrum with maxima of persistence 1, 4, 2 and 3 (the last is global).
fn write_spectrum(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("s.csv");
    let values = [0.0, 1.0, 0.0, 4.0, 0.0, 2.0, 0.0, 5.0, 2.0];
    let text: String = values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{},{v}\n", 500.0 + i as f64))
        .collect();
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn transform_emits_all_or_top_k_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_spectrum(dir.path());
    let out = dir.path().join("f.csv");
    let diagram = dir.path().join("d.csv");

    let o = run(&[
        "transform",
        "--in",
        path(&input),
        "--k",
        "100",
        "--out",
        path(&out),
        "--diagram",
        path(&diagram),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&out).len(), 4);
    assert_eq!(lines(&diagram).len(), 4);

    let o = run(&[
        "transform",
        "--in",
        path(&input),
        "--k",
        "30",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success());
    // ceil(0.3 * 4) = 2: the global maximum and the peak of persistence 4.
    assert_eq!(lines(&out), vec!["7,507,5", "3,503,4"]);

    let o = run(&[
        "transform",
        "--in",
        path(&input),
        "--k",
        "30",
        "--full",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success());
    assert_eq!(lines(&out), vec!["7,507,5,0,5", "3,503,4,0,4"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_spectrum(dir.path());
    let out = dir.path().join("f.csv");

    let o = run(&[
        "transform",
        "--in",
        path(&input),
        "--k",
        "0",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0, 100]"));

    let missing = dir.path().join("missing.csv");
    let o = run(&["transform", "--in", path(&missing), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(run(&["transform", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));

    let help = run(&["transform", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for flag in ["--in", "--k", "--out", "--full", "--diagram", "--threads"] {
        assert!(text.contains(flag), "help lacks {flag}");
    }
}

fn write_dataset(dir: &Path, n_groups: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let q = 30;
    let mut spectra = (0..q)
        .map(|j| format!("{}", 600 + j))
        .collect::<Vec<_>>()
        .join(",");
    spectra.push('\n');
    let mut labels = String::new();
    for g in 0..n_groups {
        for i in 0..8 {
            let label = i % 2;
            let row: Vec<String> = (0..q)
                .map(|j| {
                    let base = ((i * 7 + j * 3 + g) % 5) as f64 * 0.01;
                    let v = match j {
                        10 => base + 3.0,
                        20 => base + if label == 1 { 5.0 } else { 1.0 },
                        _ => base,
                    };
                    format!("{v}")
                })
                .collect();
            spectra.push_str(&row.join(","));
            spectra.push('\n');
            labels.push_str(&format!("{label},{}\n", g + 1));
        }
    }
    let (s, l) = (dir.join("spectra.csv"), dir.join("labels.csv"));
    fs::write(&s, spectra).unwrap();
    fs::write(&l, labels).unwrap();
    (s, l)
}

#[test]
fn classify_writes_one_row_per_fold() {
    let dir = tempfile::tempdir().unwrap();
    let (s, l) = write_dataset(dir.path(), 8);
    let out = dir.path().join("report");
    for (scheme, classifier, rows) in [("logo", "rf", 8), ("ab", "lr", 2)] {
        let o = run(&[
            "classify",
            "--spectra",
            path(&s),
            "--labels",
            path(&l),
            "--k",
            "50",
            "--classifier",
            classifier,
            "--scheme",
            scheme,
            "--n-trees",
            "20",
            "--out-dir",
            path(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(lines(&out.join("folds.csv")).len(), rows + 1);
        let summary = lines(&out.join("summary.csv"));
        assert_eq!(summary[0], "statistic,value");
        assert_eq!(summary.len(), 6);
        assert!(String::from_utf8_lossy(&o.stdout).contains("median"));
    }

    let (s, l) = write_dataset(dir.path(), 1);
    let o = run(&[
        "classify",
        "--spectra",
        path(&s),
        "--labels",
        path(&l),
        "--out-dir",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

const SMALL: [&str; 6] = ["--size", "10", "--n-mz", "400", "--n-peaks", "6"];

#[test]
fn simulate_and_zero_noise() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = run(&["simulate", "--size", "8", "--out-dir", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = lines(&out.join("noisy.csv"));
    assert_eq!(csv[0].split(',').count(), 3466);
    assert_eq!(csv.len(), 65);

    let mut args = vec![
        "simulate",
        "--noise",
        "gaussian",
        "--sd",
        "0",
        "--out-dir",
        path(&out),
    ];
    args.extend(SMALL);
    assert!(run(&args).status.success());
    assert_eq!(
        fs::read(out.join("noisy.pgm")).unwrap(),
        fs::read(out.join("ground_truth.pgm")).unwrap()
    );
}

#[test]
fn denoise_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let mut args = vec![
            "--threads",
            "2",
            "denoise",
            "--noise",
            "poisson",
            "--lambda",
            "1",
            "--k",
            "10,50",
            "--out-dir",
            path(out),
        ];
        args.extend(SMALL);
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in [
        "ground_truth.pgm",
        "noisy.pgm",
        "denoised_k10.pgm",
        "denoised_k50.pgm",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let timing = lines(&a.join("timing.csv"));
    assert_eq!(timing[0], "k,seconds,iou");
    assert_eq!(timing.len(), 3);
}

#[test]
fn bench_reports_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let mut args = vec![
        "--threads",
        "1",
        "bench",
        "--sizes",
        "10,20",
        "--repeats",
        "1",
        "--out",
        path(&out),
    ];
    args.extend(&SMALL[2..]);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = lines(&out);
    assert_eq!(rows.len(), 3);
    let second: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(second[0], "20");
    assert_eq!(second[5].parse::<f64>().unwrap(), 4.0);
}
