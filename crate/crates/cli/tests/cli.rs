use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use islands::generators::{flat_tree_center, RED};
use islands::geom::Scalar;
use islands_cli::format::{read_instance, serialize_instance};
use islands_cli::solution::SolutionFile;
use num_traits::Signed;
use tempfile::TempDir;

fn islands(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_islands"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = islands(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn checkerboard(dir: &Path, k: usize) -> PathBuf {
    let inst = dir.join(format!("cc{k}.inst"));
    ok(&[
        "generate",
        "checkerboard-cross",
        "--k",
        &k.to_string(),
        "-o",
        s(&inst),
    ]);
    inst
}

fn run(dir: &Path, algo: &str, inst: &Path) -> SolutionFile {
    let out = dir.join(format!("{algo}.json"));
    ok(&["run", algo, s(inst), "-o", s(&out)]);
    SolutionFile::read(&out).unwrap()
}

#[test]
fn generate_checkerboard_writes_instance_and_witnesses() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 2);
    assert_eq!(read_instance(&inst).unwrap().len(), 12);
    for w in ["cover", "partition"] {
        let sol = SolutionFile::read(&dir.path().join(format!("cc2.{w}.json"))).unwrap();
        assert!(sol.validity.values().all(|&v| v));
    }
}

#[test]
fn generate_flat_tree_red_counts() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ft2.inst");
    ok(&["generate", "flat-tree", "--ell", "2", "-o", s(&path)]);
    let inst = read_instance(&path).unwrap();
    let eps = Scalar::new(1.into(), 64.into());
    let count = |c: islands::geom::Point| {
        (0..inst.len())
            .filter(|&i| inst.color(i) == RED)
            .filter(|&i| {
                let p = inst.point(i);
                (&p.x - &c.x).abs() < eps && (&p.y - &c.y).abs() < eps
            })
            .count()
    };
    let counts = [
        count(flat_tree_center(0, 0)),
        count(flat_tree_center(0, 1)),
        count(flat_tree_center(1, 0)),
    ];
    assert_eq!(counts, [64, 64, 128]);
}

#[test]
fn generate_random_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.inst");
    let b = dir.path().join("b.inst");
    for p in [&a, &b] {
        ok(&[
            "generate",
            "random",
            "--n",
            "8",
            "--colors",
            "2",
            "--seed",
            "7",
            "-o",
            s(p),
        ]);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let inst = read_instance(&a).unwrap();
    assert_eq!(serialize_instance(&inst).as_bytes(), &text[..]);
}

#[test]
fn generate_bad_params() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("x.inst");
    let out = islands(&["generate", "grid-rectangles", "--k", "3", "-o", s(&p)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid parameters"));
    let out = islands(&["generate", "random", "-o", s(&p)]);
    assert_ne!(code(&out), 0);
}

#[test]
fn run_checkerboard_cardinalities() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 2);
    let over = run(dir.path(), "overlap-greedy", &inst);
    assert_eq!(over.islands.len(), 4);
    assert_eq!(over.ratios["islands/opt_cover"], "1");
    let bold = run(dir.path(), "bold", &inst);
    assert_eq!(bold.islands.len(), 8);
    assert_eq!(bold.ratios["islands/opt_partition"], "8/5");
    assert_eq!(bold.steps.len(), 4);
    assert!(bold.steps.iter().all(|s| s.face_increase <= s.face_bound));
    assert_eq!(run(dir.path(), "exact-partition", &inst).islands.len(), 5);
    assert_eq!(run(dir.path(), "exact-cover", &inst).islands.len(), 4);
    for sol in [&over, &bold] {
        assert!(sol.validity.values().all(|&v| v), "{:?}", sol.validity);
    }
}

#[test]
fn run_size_limit_exit_3() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 3);
    let out = islands(&["run", "exact-partition", s(&inst)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle size limit"));
}

#[test]
fn run_degeneracy_exit_4() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("deg.inst");
    std::fs::write(
        &inst,
        "islands-instance 1\nn 9\ncolors 3\n0 0 2 1\n1 1 0 2\n2 1 1 0\n3 2 2 2\n4 3 0 1\n5 3 1 1\n6 4 0 0\n7 4 2 2\n8 4 3 1\n",
    )
    .unwrap();
    let out = islands(&["run", "bold", s(&inst), "--no-exact"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("triple point at (2, 2/3)"));
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 3);
    let witness = dir.path().join("cc3.partition.json");
    let v = ok(&["verify", s(&inst), s(&witness)]);
    assert!(v.contains("partition: pass"));

    let cover = dir.path().join("cover.json");
    ok(&[
        "run",
        "overlap-greedy",
        s(&inst),
        "--no-exact",
        "-o",
        s(&cover),
    ]);
    ok(&["verify", s(&inst), s(&cover)]);
    let out = islands(&["verify", s(&inst), s(&cover), "--as", "partition"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("hulls intersect"));

    let small = checkerboard(dir.path(), 2);
    let lines = dir.path().join("lines.json");
    ok(&["run", "line-greedy", s(&small), "-o", s(&lines)]);
    let v = ok(&["verify", s(&small), s(&lines)]);
    assert!(v.contains("separating: pass") && v.contains("partition: pass"));
}

#[test]
fn every_flag_reproduces() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 2);
    for algo in [
        "disjoint-greedy",
        "overlap-greedy",
        "bold",
        "line-greedy",
        "exact-partition",
        "exact-cover",
    ] {
        let path = dir.path().join(format!("{algo}.json"));
        ok(&["run", algo, s(&inst), "-o", s(&path)]);
        let text = std::fs::read_to_string(&path).unwrap();
        let sol: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(sol.to_json(), text, "{algo} round-trip");
        ok(&["verify", s(&inst), s(&path)]);
    }
}

#[test]
fn stale_flags_and_bad_indices_fail() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 2);
    let mut sol = run(dir.path(), "overlap-greedy", &inst);
    sol.islands.pop();
    let path = dir.path().join("edited.json");
    sol.write(&path).unwrap();
    let out = islands(&["verify", s(&inst), s(&path)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("stale flag cover"));

    sol.islands.push(vec![99]);
    sol.write(&path).unwrap();
    assert_eq!(code(&islands(&["verify", s(&inst), s(&path)])), 2);
}

#[test]
fn render_examples() {
    let dir = TempDir::new().unwrap();
    let inst = checkerboard(dir.path(), 3);
    let before = std::fs::read(&inst).unwrap();
    let cover = dir.path().join("cover.json");
    ok(&[
        "run",
        "overlap-greedy",
        s(&inst),
        "--no-exact",
        "-o",
        s(&cover),
    ]);
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    ok(&["render", s(&inst), s(&cover), "-o", s(&a)]);
    ok(&["render", s(&inst), s(&cover), "-o", s(&b)]);
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 6);
    assert_eq!(svg.matches("<circle").count(), 24);
    assert_eq!(std::fs::read(&b).unwrap(), svg.as_bytes());
    assert_eq!(std::fs::read(&inst).unwrap(), before);

    ok(&["render", s(&inst), "-o", s(&a)]);
    let bare = std::fs::read_to_string(&a).unwrap();
    assert!(!bare.contains("<polygon") && bare.contains("<circle"));

    let small = checkerboard(dir.path(), 2);
    let lines = dir.path().join("lines.json");
    ok(&["run", "line-greedy", s(&small), "-o", s(&lines)]);
    ok(&["render", s(&small), s(&lines), "-o", s(&a)]);
    let sol = SolutionFile::read(&lines).unwrap();
    let drawn = std::fs::read_to_string(&a).unwrap();
    assert_eq!(drawn.matches("<line ").count(), sol.lines.len());
}

#[test]
fn report_checkerboard_ratios() {
    let dir = TempDir::new().unwrap();
    for k in 1..=3 {
        checkerboard(dir.path(), k);
    }
    let json = dir.path().join("report.json");
    let text = ok(&["report", s(dir.path()), "--json", s(&json)]);
    assert_eq!(text.lines().count(), 4);
    let table: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let rows = table["rows"].as_array().unwrap();
    let ratios: Vec<&str> = rows
        .iter()
        .map(|r| r["ratio_bold"].as_str().unwrap())
        .collect();
    assert_eq!(ratios, ["1", "8/5", "15/7"]);
    assert_eq!(rows[2]["reference"], "witness");
    assert_eq!(rows[2]["crossing_bound"], "unchecked");
    assert_eq!(rows[1]["crossing_bound"], "ok");
    assert_eq!(rows[1]["face_bound"], "ok");
    assert_eq!(rows[1]["harmonic_bound"], "ok");
}

#[test]
fn report_flat_tree() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ft2.inst");
    ok(&["generate", "flat-tree", "--ell", "2", "-o", s(&path)]);
    let json = dir.path().join("report.json");
    ok(&["report", s(dir.path()), "--json", s(&json)]);
    let table: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let row = &table["rows"][0];
    assert!(row["disjoint_greedy"].as_u64().unwrap() >= 3);
    assert!(row["witness_partition"].as_u64().unwrap() <= 8);
    assert_eq!(row["opt_partition"], serde_json::Value::Null);
}

#[test]
fn report_empty_directory() {
    let dir = TempDir::new().unwrap();
    let text = ok(&["report", s(dir.path())]);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("instance"));
}

#[test]
fn decimal_input_accepted() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("d.inst");
    std::fs::write(
        &inst,
        "islands-instance 1\nn 4\ncolors 2\n0 0.0 0 0\n1 1.5 0 1\n2 1.5 2.25 0\n3 0 2.25 1\n",
    )
    .unwrap();
    let sol = run(dir.path(), "exact-partition", &inst);
    assert_eq!(sol.islands.len(), 3);
    let parsed = read_instance(&inst).unwrap();
    assert!(serialize_instance(&parsed).contains("2 3/2 9/4 0\n"));
}

#[test]
fn malformed_instance_rejected() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("bad.inst");
    std::fs::write(&inst, "islands-instance 1\nn 1\ncolors 1\n0 1/0 0 0\n").unwrap();
    let out = islands(&["run", "disjoint-greedy", s(&inst)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.inst:4"));
}
