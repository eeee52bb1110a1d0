use std::path::Path;
use std::process::{Command, Output};

fn hfsd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfsd")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, scene: &str, name: &str, extra: &[&str]) {
    let mut args = vec!["synth", "--scene", scene, "--out", "scenes", "--name", name];
    args.extend_from_slice(extra);
    let o = hfsd(&args, dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_writes_pair_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "plane", "a", &["--sensor-height", "1.8", "--noise", "0.02", "--seed", "7"]);
    synth(dir.path(), "plane", "b", &["--sensor-height", "1.8", "--noise", "0.02", "--seed", "7"]);
    let s = dir.path().join("scenes");
    assert!(s.join("a.label").is_file());
    assert_eq!(std::fs::read(s.join("a.bin")).unwrap(), std::fs::read(s.join("b.bin")).unwrap());
    assert_eq!(std::fs::read(s.join("a.label")).unwrap(), std::fs::read(s.join("b.label")).unwrap());
    synth(dir.path(), "ramp", "r", &["--grade", "0.12"]);
    assert!(s.join("r.bin").is_file());
}

#[test]
fn synth_rejects_bad_spec() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hfsd(&["synth", "--sensor-height", "-1"], dir.path())), 64);
    assert_eq!(code(&hfsd(&["synth", "--scene", "volcano"], dir.path())), 64);
}

#[test]
fn segment_single_scan() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "boxes", "000000", &[]);
    let o = hfsd(&["segment", "scenes/000000.bin", "--out", "pred", "--ply"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("free"));
    let bin_len = std::fs::metadata(dir.path().join("scenes/000000.bin")).unwrap().len();
    let pred = std::fs::read(dir.path().join("pred/000000.pred")).unwrap();
    assert_eq!(pred.len() as u64, bin_len / 16);
    assert!(pred.iter().all(|&b| b <= 2));
    assert!(pred.contains(&1));
    let ply = std::fs::read_to_string(dir.path().join("pred/000000.ply")).unwrap();
    assert!(ply.starts_with("ply\nformat ascii 1.0"));
}

#[test]
fn segment_directory_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (i, scene) in ["plane", "wall", "boxes"].iter().enumerate() {
        synth(dir.path(), scene, &format!("{i:06}"), &["--noise", "0.01", "--seed", &i.to_string()]);
    }
    let o = hfsd(&["segment", "scenes", "--out", "all", "--threads", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("3 scans"));
    for i in 0..3 {
        let name = format!("{i:06}");
        assert_eq!(code(&hfsd(&["segment", &format!("scenes/{name}.bin"), "--out", "one", "--threads", "1"], dir.path())), 0);
        assert_eq!(
            std::fs::read(dir.path().join(format!("all/{name}.pred"))).unwrap(),
            std::fs::read(dir.path().join(format!("one/{name}.pred"))).unwrap()
        );
    }
}

#[test]
fn segment_failure_names_path_and_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    let o = hfsd(&["segment", "missing.bin", "--out", "pred"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.bin"));

    synth(dir.path(), "plane", "000000", &[]);
    std::fs::write(dir.path().join("scenes/000001.bin"), [0u8; 10]).unwrap();
    let o = hfsd(&["segment", "scenes", "--out", "pred"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("000001.bin"));
    assert_eq!(std::fs::read_dir(dir.path().join("pred")).unwrap().count(), 0);
}

fn make_dataset(dir: &Path, scans: usize) {
    for i in 0..scans {
        synth(dir, "boxes", &format!("{i:06}"), &["--noise", "0.02", "--seed", &i.to_string()]);
    }
    let seq = dir.join("kitti/sequences/08");
    std::fs::create_dir_all(seq.join("velodyne")).unwrap();
    std::fs::create_dir_all(seq.join("labels")).unwrap();
    for i in 0..scans {
        let n = format!("{i:06}");
        std::fs::rename(dir.join(format!("scenes/{n}.bin")), seq.join(format!("velodyne/{n}.bin"))).unwrap();
        std::fs::rename(dir.join(format!("scenes/{n}.label")), seq.join(format!("labels/{n}.label"))).unwrap();
    }
}

#[test]
fn eval_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    make_dataset(dir.path(), 3);
    let o = hfsd(&["eval", "--root", "kitti", "--sequences", "08", "--limit", "2", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("mIoU"));
    let report = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(report.contains("\"scan_count\": 2"));
    assert!(report.contains("iou_free"));
}

#[test]
fn eval_errors() {
    let dir = tempfile::tempdir().unwrap();
    make_dataset(dir.path(), 2);
    assert_eq!(code(&hfsd(&["eval", "--root", "kitti", "--sequences", ""], dir.path())), 64);
    assert_eq!(code(&hfsd(&["eval", "--root", "kitti"], dir.path())), 64);
    std::fs::remove_file(dir.path().join("kitti/sequences/08/labels/000001.label")).unwrap();
    let o = hfsd(&["eval", "--root", "kitti", "--sequences", "08"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("000001"));
}

#[test]
fn bench_counts_samples() {
    let dir = tempfile::tempdir().unwrap();
    let o = hfsd(&["bench", "--synthetic", "1", "--repeat", "5", "--warmup", "0"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("samples 5"), "{out}");
    assert!(out.contains("projection") && out.contains("normals") && out.contains("filter"));
    assert_eq!(code(&hfsd(&["bench"], dir.path())), 64);
}

#[test]
fn bench_tiny_scan() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"height": 8, "width": 64}"#).unwrap();
    let o = hfsd(&["bench", "--synthetic", "1", "--config", "c.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("samples 1"));
}

#[test]
fn export_writes_normals() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "plane", "p", &[]);
    let o = hfsd(&["export", "scenes/p.bin", "--out", "p.ply"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ply = std::fs::read_to_string(dir.path().join("p.ply")).unwrap();
    assert!(ply.contains("property float nx"));
}

#[test]
fn bad_config_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "plane", "p", &[]);
    std::fs::write(dir.path().join("c.json"), r#"{"cos_gamma_min": "high"}"#).unwrap();
    assert_eq!(code(&hfsd(&["segment", "scenes/p.bin", "--out", "o", "--config", "c.json"], dir.path())), 2);
    assert_eq!(code(&hfsd(&["--help"], dir.path())), 0);
    assert_eq!(code(&hfsd(&["frobnicate"], dir.path())), 64);
}
