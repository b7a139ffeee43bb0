mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::*;
use lorenz_dct::cipher::ImageRgb;
use lorenz_dct::io::{bundle_len, load_ppm, save_ppm};
use lorenz_dct::Plane;

fn ldct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldct"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const KEYS: [&str; 6] = ["--key1", "Key#01", "--key2", "Lorenz", "--key3", "Dct2!x"];

fn with_keys(mut base: Vec<&str>) -> Vec<&str> {
    base.extend_from_slice(&KEYS);
    base
}

#[test]
fn encrypt_decrypt_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let input = data_path("astronaut_256.ppm");
    let bundle = dir.path().join("a.ldct");
    let again = dir.path().join("b.ldct");
    let out = dir.path().join("a.ppm");
    let json = dir.path().join("report.json");

    for target in [&bundle, &again] {
        let o = ldct(&with_keys(vec![
            "encrypt",
            "--in",
            s(&input),
            "--out",
            s(target),
        ]));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let bytes = fs::read(&bundle).unwrap();
    assert_eq!(bytes.len(), bundle_len(256));
    assert_eq!(bytes, fs::read(&again).unwrap());

    let o = ldct(&with_keys(vec![
        "decrypt",
        "--in",
        s(&bundle),
        "--out",
        s(&out),
    ]));
    assert!(o.status.success());
    assert_eq!(load_ppm(&out).unwrap(), load_ppm(&input).unwrap());

    let hist = dir.path().join("hist");
    let scatter = dir.path().join("scatter");
    let o = ldct(&[
        "analyze",
        "--original",
        s(&input),
        "--bundle",
        s(&bundle),
        "--decrypted",
        s(&out),
        "--json",
        s(&json),
        "--hist-csv",
        s(&hist),
        "--scatter-csv",
        s(&scatter),
        "--scatter-count",
        "500",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["image"], "astronaut_256");
    for p in v["pairs"].as_array().unwrap() {
        if p["b"].as_str().unwrap().starts_with("decrypted") {
            assert_eq!(p["psnr"], "inf");
        } else {
            assert!(p["npcr"].as_f64().unwrap() > 99.5);
        }
    }
    let h = fs::read_to_string(hist.join("encrypted.R.csv")).unwrap();
    assert_eq!(h.lines().count(), 257);
    let sc = fs::read_to_string(scatter.join("original.G.diagonal.csv")).unwrap();
    assert_eq!(sc.lines().count(), 502);
}

#[test]
fn wrong_key_decrypts_to_noise() {
    let dir = tempfile::tempdir().unwrap();
    let input = data_path("rocket_256.ppm");
    let bundle = dir.path().join("r.ldct");
    let out = dir.path().join("r.ppm");
    let json = dir.path().join("r.json");
    assert!(ldct(&with_keys(vec![
        "encrypt",
        "--in",
        s(&input),
        "--out",
        s(&bundle)
    ]))
    .status
    .success());
    let o = ldct(&[
        "decrypt",
        "--in",
        s(&bundle),
        "--out",
        s(&out),
        "--key1",
        "Key#00",
        "--key2",
        "Lorenz",
        "--key3",
        "Dct2!x",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let orig = load_ppm(&input).unwrap();
    let bad = load_ppm(&out).unwrap();
    for (a, b) in orig.planes().iter().zip(bad.planes()) {
        let r = lorenz_dct::analysis::cross_correlation(a, b).unwrap();
        assert!(r.abs() <= 0.1, "r = {r}");
    }
    assert!(ldct(&[
        "analyze",
        "--original",
        s(&input),
        "--decrypted",
        s(&out),
        "--json",
        s(&json)
    ])
    .status
    .success());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing_key3 = ldct(&[
        "encrypt", "--in", "x.ppm", "--out", "y", "--key1", "aaaaaa", "--key2", "bbbbbb",
    ]);
    assert_eq!(missing_key3.status.code(), Some(1));
    let err = String::from_utf8_lossy(&missing_key3.stderr);
    assert!(err.starts_with("ldct: usage error:"), "{err}");
    assert!(err.contains("--key3"));

    let bad_shifts = ldct(&with_keys(vec![
        "encrypt", "--in", "x.ppm", "--out", "y", "--shifts", "1,2",
    ]));
    assert_eq!(bad_shifts.status.code(), Some(1));

    let p3 = dir.path().join("ascii.ppm");
    fs::write(&p3, "P3\n1 1\n255\n0 0 0\n").unwrap();
    let o = ldct(&with_keys(vec![
        "encrypt",
        "--in",
        s(&p3),
        "--out",
        s(&dir.path().join("z")),
    ]));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ldct: data error:"));

    let rect = dir.path().join("rect.ppm");
    let p = Plane::new(4, 6);
    save_ppm(&rect, &ImageRgb::new([p.clone(), p.clone(), p]).unwrap()).unwrap();
    let o = ldct(&with_keys(vec![
        "encrypt",
        "--in",
        s(&rect),
        "--out",
        s(&dir.path().join("z")),
    ]));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("square"));

    // checksum failure
    let small = dir.path().join("small.ppm");
    let q = Plane::from_fn(8, 8, |r, c| (r * 8 + c) as u8);
    save_ppm(&small, &ImageRgb::new([q.clone(), q.clone(), q]).unwrap()).unwrap();
    let bundle = dir.path().join("small.ldct");
    assert!(ldct(&with_keys(vec![
        "encrypt",
        "--in",
        s(&small),
        "--out",
        s(&bundle)
    ]))
    .status
    .success());
    let mut bytes = fs::read(&bundle).unwrap();
    bytes[40] ^= 0x10;
    fs::write(&bundle, &bytes).unwrap();
    let o = ldct(&with_keys(vec![
        "decrypt",
        "--in",
        s(&bundle),
        "--out",
        s(&dir.path().join("o.ppm")),
    ]));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ldct: verification failed:"));
}

#[test]
fn custom_schedule_is_read_back_from_header() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("s.ppm");
    let q = Plane::from_fn(16, 16, |r, c| (r * 9 + c * 5) as u8);
    let img = ImageRgb::new([q.clone(), q.map(|&v| v / 2), q.map(|&v| 255 - v)]).unwrap();
    save_ppm(&small, &img).unwrap();
    let bundle = dir.path().join("s.ldct");
    let o = ldct(&with_keys(vec![
        "encrypt",
        "--in",
        s(&small),
        "--out",
        s(&bundle),
        "--shifts",
        "1,2,40",
        "--rotations",
        "1,2,3,4,5,6,7,8,9",
    ]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("o.ppm");
    assert!(ldct(&with_keys(vec![
        "decrypt",
        "--in",
        s(&bundle),
        "--out",
        s(&out)
    ]))
    .status
    .success());
    assert_eq!(load_ppm(&out).unwrap(), img);
}

#[test]
fn debug_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let o = ldct(&[
        "lorenz",
        "--key",
        "Lorenz",
        "--dump",
        s(&csv),
        "--t-end",
        "1",
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("t,x,y,z"));
    assert_eq!(text.lines().count(), 1 + 1001);

    let ks = dir.path().join("ks");
    assert!(ldct(&[
        "keystream",
        "--key",
        "Lorenz",
        "--size",
        "16",
        "--out-dir",
        s(&ks)
    ])
    .status
    .success());
    for label in ["XY", "XZ", "YZ"] {
        assert_eq!(
            fs::read(ks.join(format!("{label}.pgm"))).unwrap().len(),
            13 + 256
        );
        assert_eq!(
            fs::read_to_string(ks.join(format!("{label}_rows.csv")))
                .unwrap()
                .lines()
                .count(),
            16
        );
    }

    let o = ldct(&["selftest"]);
    assert!(o.status.success());
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().all(|l| l.starts_with("PASS ")));
}
