use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rlseg::io::{mh_encode_image, read_pbm, read_rle, write_pbm, write_rle, EolMode, MhOptions, PbmFormat};
use rlseg::synth::{synthetic_document, InkStyle};
use rlseg::{decode_image, extract_block, BlockSpec};
use tempfile::TempDir;

fn rlseg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlseg"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), stderr(&out));
    out
}

fn put(dir: &TempDir, name: &str, bytes: &[u8]) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, bytes).unwrap();
    p
}

#[test]
fn encode_plain_pbm() {
    let dir = TempDir::new().unwrap();
    put(&dir, "in.pbm", b"P1\n3 1\n1 1 0\n");
    ok(rlseg(dir.path(), &["encode", "in.pbm", "out.rlc"]));
    assert_eq!(fs::read(dir.path().join("out.rlc")).unwrap(), b"RLC1\n3 1\n0 2 1\n");
}

#[test]
fn decode_reproduces_encoded_raster() {
    let dir = TempDir::new().unwrap();
    let grid = decode_image(&synthetic_document(77, 31, 0.3, InkStyle::TextLike, 2));
    let pbm = write_pbm(&grid, PbmFormat::Raw);
    put(&dir, "in.pbm", &pbm);
    ok(rlseg(dir.path(), &["encode", "in.pbm", "doc.rlc"]));
    ok(rlseg(dir.path(), &["decode", "doc.rlc", "back.pbm"]));
    assert_eq!(fs::read(dir.path().join("back.pbm")).unwrap(), pbm);
    ok(rlseg(dir.path(), &["decode", "doc.rlc", "plain.pbm", "--plain"]));
    assert_eq!(read_pbm(&fs::read(dir.path().join("plain.pbm")).unwrap()).unwrap(), grid);
}

#[test]
fn mh_round_trip_through_cli() {
    let dir = TempDir::new().unwrap();
    let doc = synthetic_document(300, 20, 0.2, InkStyle::Uniform, 5);
    put(&dir, "in.pbm", &write_pbm(&decode_image(&doc), PbmFormat::Raw));
    ok(rlseg(dir.path(), &["encode", "in.pbm", "doc.mh", "--to", "mh", "--eol", "forbidden", "--byte-align"]));
    let expected = mh_encode_image(&doc, MhOptions { eol: EolMode::Forbidden, byte_align: true });
    assert_eq!(fs::read(dir.path().join("doc.mh")).unwrap(), expected.as_bytes());
    let flags = ["--width", "300", "--height", "20", "--eol", "forbidden", "--byte-align"];
    ok(rlseg(dir.path(), &[&["decode", "doc.mh", "out.pbm"][..], &flags].concat()));
    let back = read_pbm(&fs::read(dir.path().join("out.pbm")).unwrap()).unwrap();
    assert_eq!(back, decode_image(&doc));

    // missing framing flags is a usage error
    let out = rlseg(dir.path(), &["decode", "doc.mh", "x.pbm", "--width", "300"]);
    assert_eq!(out.status.code(), Some(2));
    // wrong framing is a parse error
    let out = rlseg(dir.path(), &["decode", "doc.mh", "x.pbm", "--width", "300", "--height", "20", "--eol", "required"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn corrupt_row_exits_2_naming_row() {
    let dir = TempDir::new().unwrap();
    put(&dir, "bad.rlc", b"RLC1\n8 2\n8\n3 3\n");
    let out = rlseg(dir.path(), &["decode", "bad.rlc", "out.pbm"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("row 2"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn syntax_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    put(&dir, "bad.rlc", b"RLC1\n8 1\n4 four\n");
    put(&dir, "junk.bin", b"\x00\x01");
    for file in ["bad.rlc", "junk.bin"] {
        let out = rlseg(dir.path(), &["info", file]);
        assert_eq!(out.status.code(), Some(3), "{file}: {}", stderr(&out));
    }
}

#[test]
fn extract_trace_matches_worked_example() {
    let dir = TempDir::new().unwrap();
    put(&dir, "doc.rlc", b"RLC1\n8 2\n4 4\n4 4\n");
    let out = ok(rlseg(
        dir.path(),
        &["extract", "doc.rlc", "--x1", "1", "--x2", "2", "--y1", "3", "--y2", "6", "-o", "block.rlc", "--trace"],
    ));
    assert_eq!(stdout(&out), "1 2 2 2\n1 2 2 2\n");
    assert_eq!(fs::read(dir.path().join("block.rlc")).unwrap(), b"RLC1\n4 2\n2 2\n2 2\n");
}

#[test]
fn extract_full_image_is_identity() {
    let dir = TempDir::new().unwrap();
    let doc = synthetic_document(50, 12, 0.3, InkStyle::TextLike, 3);
    put(&dir, "doc.rlc", &write_rle(&doc));
    ok(rlseg(dir.path(), &["extract", "doc.rlc", "--x1", "1", "--x2", "12", "--y1", "1", "--y2", "50", "-o", "out.rlc"]));
    assert_eq!(read_rle(&fs::read(dir.path().join("out.rlc")).unwrap()).unwrap(), doc);
}

#[test]
fn extract_out_of_bounds_names_the_bound() {
    let dir = TempDir::new().unwrap();
    put(&dir, "doc.rlc", b"RLC1\n8 2\n8\n8\n");
    for (args, bound) in [
        (["0", "1", "1", "1"], "x1"),
        (["1", "3", "1", "1"], "x2"),
        (["1", "1", "9", "9"], "y1"),
        (["1", "1", "4", "3"], "y2"),
    ] {
        let out = rlseg(
            dir.path(),
            &["extract", "doc.rlc", "--x1", args[0], "--x2", args[1], "--y1", args[2], "--y2", args[3], "-o", "o.rlc"],
        );
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains(bound), "{}", stderr(&out));
    }
}

#[test]
fn extract_checks_bounds_before_reading_rows() {
    let dir = TempDir::new().unwrap();
    // the body is broken, but the spec is rejected first
    put(&dir, "doc.rlc", b"RLC1\n8 2\nnot a row\n");
    let out = rlseg(dir.path(), &["extract", "doc.rlc", "--x1", "1", "--x2", "5", "--y1", "1", "--y2", "1", "-o", "o.rlc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("x2"), "{}", stderr(&out));
}

#[test]
fn sample_scale_published_blocks() {
    let dir = TempDir::new().unwrap();
    let doc = synthetic_document(1542, 1009, 0.1, InkStyle::TextLike, 1009);
    put(&dir, "sample.rlc", &write_rle(&doc));
    let cases = [
        ((100, 400, 200, 500), (301, 301)),
        ((500, 800, 700, 1100), (301, 401)),
        ((700, 1000, 1200, 1500), (301, 301)),
        ((100, 500, 1200, 1500), (401, 301)),
    ];
    for ((x1, x2, y1, y2), (rows, cols)) in cases {
        let coords = [x1, x2, y1, y2].map(|v| v.to_string());
        ok(rlseg(
            dir.path(),
            &[
                "extract", "sample.rlc", "--x1", &coords[0], "--x2", &coords[1], "--y1", &coords[2], "--y2",
                &coords[3], "-o", "block.rlc", "--verify", "--report", "report.json",
            ],
        ));
        let block = read_rle(&fs::read(dir.path().join("block.rlc")).unwrap()).unwrap();
        assert_eq!((block.height(), block.width()), (rows, cols));
        assert_eq!(block, extract_block(&doc, &BlockSpec::new(x1, x2, y1, y2)).unwrap());

        let report: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(report["accuracy"][0]["percentage"], 100.0);
        assert_eq!(report["accuracy"][1]["percentage"], 100.0);
        assert!(report.get("wall_time_ms").is_none());

        let out = ok(rlseg(dir.path(), &["characterize", "block.rlc", "--doc", "sample.rlc", "--x1", &coords[0], "--y1", &coords[2], "--json"]));
        let c: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let abs = c["features"][0]["density"].as_f64().unwrap();
        let rel = c["features"][1]["density"].as_f64().unwrap();
        let implied = abs * (rows * cols) as f64 / (1009.0 * 1542.0);
        assert!((rel - implied).abs() <= 1e-12 * implied.max(1e-300), "{rel} vs {implied}");
        assert!(c["quadrant"].is_string());
    }
}

#[test]
fn characterize_self_and_determinism() {
    let dir = TempDir::new().unwrap();
    let doc = synthetic_document(90, 40, 0.2, InkStyle::Uniform, 8);
    put(&dir, "doc.rlc", &write_rle(&doc));
    let args = ["characterize", "doc.rlc", "--doc", "doc.rlc", "--x1", "1", "--y1", "1", "--json", "--log-base", "10"];
    let first = ok(rlseg(dir.path(), &args));
    let second = ok(rlseg(dir.path(), &args));
    assert_eq!(first.stdout, second.stdout);
    let c: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(c["features"][0]["density"], c["features"][1]["density"]);
    assert_eq!(c["features"][0]["context"]["log_base"], "10");

    let text = stdout(&ok(rlseg(dir.path(), &["characterize", "doc.rlc"])));
    assert!(text.contains("absolute") && !text.contains("relative"), "{text}");
}

#[test]
fn characterize_needs_full_relative_context() {
    let dir = TempDir::new().unwrap();
    put(&dir, "doc.rlc", b"RLC1\n8 1\n4 4\n");
    put(&dir, "block.rlc", b"RLC1\n4 1\n2 2\n");
    for args in [
        &["characterize", "block.rlc", "--doc", "doc.rlc"][..],
        &["characterize", "block.rlc", "--x1", "1", "--y1", "3"],
        &["characterize", "block.rlc", "--doc", "doc.rlc", "--x1", "1", "--y1", "3", "--y2", "7"],
        // block does not sit at this origin
        &["characterize", "block.rlc", "--doc", "doc.rlc", "--x1", "1", "--y1", "1"],
        &["characterize", "block.rlc", "--log-base", "3"],
    ] {
        let out = rlseg(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    let out = ok(rlseg(dir.path(), &["characterize", "block.rlc", "--doc", "doc.rlc", "--x1", "1", "--y1", "3", "--y2", "6"]));
    assert!(stdout(&out).contains("quadrant"));
}

#[test]
fn evaluate_modes() {
    let dir = TempDir::new().unwrap();
    put(&dir, "a.pbm", b"P1\n4 4\n1 1 0 0\n1 1 0 0\n0 0 0 0\n0 0 0 0\n");
    // the same square shifted one column right: 4 of 16 pixels differ
    put(&dir, "b.pbm", b"P1\n4 4\n0 1 1 0\n0 1 1 0\n0 0 0 0\n0 0 0 0\n");
    put(&dir, "c.pbm", b"P1\n3 4\n1 1 0\n1 1 0\n0 0 0\n0 0 0\n");
    assert_eq!(stdout(&ok(rlseg(dir.path(), &["evaluate", "a.pbm", "a.pbm"]))), "100.0000\n");
    assert_eq!(stdout(&ok(rlseg(dir.path(), &["evaluate", "a.pbm", "a.pbm", "--mode", "compressed"]))), "100.0000\n");
    assert_eq!(stdout(&ok(rlseg(dir.path(), &["evaluate", "a.pbm", "b.pbm"]))), "75.0000\n");
    let out = rlseg(dir.path(), &["evaluate", "a.pbm", "c.pbm"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluate_manifest_is_sorted_and_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let doc = synthetic_document(120, 60, 0.15, InkStyle::TextLike, 4);
    let mut manifest = String::new();
    for i in (0..12).rev() {
        let spec = BlockSpec::new(1 + i, 30 + i, 5 + i, 90 + i);
        let block = extract_block(&doc, &spec).unwrap();
        put(&dir, &format!("x{i:02}.rlc"), &write_rle(&block));
        let truth = rlseg::oracle_crop(&decode_image(&doc), &spec).unwrap();
        put(&dir, &format!("t{i:02}.pbm"), &write_pbm(&truth, PbmFormat::Raw));
        manifest.push_str(&format!("x{i:02}.rlc t{i:02}.pbm\n"));
    }
    put(&dir, "list.txt", manifest.as_bytes());
    let one = ok(rlseg(dir.path(), &["evaluate", "--manifest", "list.txt", "--mode", "compressed"]));
    let four = ok(rlseg(dir.path(), &["evaluate", "--manifest", "list.txt", "--mode", "compressed", "--jobs", "4"]));
    assert_eq!(one.stdout, four.stdout);
    let lines: Vec<String> = stdout(&one).lines().map(String::from).collect();
    assert_eq!(lines.len(), 12);
    assert!(lines.windows(2).all(|w| w[0] < w[1]));
    assert!(lines.iter().all(|l| l.ends_with("\t100.0000")), "{lines:?}");
}

#[test]
fn info_and_help() {
    let dir = TempDir::new().unwrap();
    put(&dir, "doc.rlc", b"RLC1\n8 2\n4 4\n0 8\n");
    let text = stdout(&ok(rlseg(dir.path(), &["info", "doc.rlc"])));
    assert!(text.contains("8 x 2") && text.contains("runs: 4"), "{text}");
    for cmd in ["encode", "decode", "extract", "characterize", "evaluate", "info"] {
        assert!(stdout(&ok(rlseg(dir.path(), &[cmd, "--help"]))).contains("Usage"));
        assert!(stdout(&ok(rlseg(dir.path(), &[cmd, "--version"]))).contains(env!("CARGO_PKG_VERSION")));
    }
    assert_eq!(rlseg(dir.path(), &["bogus"]).status.code(), Some(2));
}
