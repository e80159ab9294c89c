use std::process::{Command, Output};

fn thompson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thompson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = thompson(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> Option<i32> {
    thompson(args).status.code()
}

#[test]
fn words_and_diagrams() {
    assert_eq!(stdout(&["normalize", "abbab"]), "aBab\n");
    assert_eq!(stdout(&["normalize", "aa"]), "e\n");
    assert_eq!(stdout(&["to-diagram", "bab"]), "1011000:4:1010100\n");
    assert_eq!(stdout(&["to-word", "1011000:4:1010100"]), "bab\n");
    assert_eq!(stdout(&["to-word", "1100100:3:1100100"]), "a\n");
    assert_eq!(stdout(&["compose", "ab", "ab"]), "abab\n");
    assert_eq!(stdout(&["compose", "100:2:100", "b"]), "11000:1:10100\n");
}

#[test]
fn membership() {
    assert_eq!(stdout(&["member", "bab"]), "1011000:4:1010100 member\n");
    assert_eq!(
        stdout(&["member", "1010100:1:1011000"]),
        "1010100:1:1011000 non-member\n"
    );
    assert_eq!(
        stdout(&["member", "0,0; 1/2,1/2; 3/4,5/8; 7/8,3/4; 1,1"]),
        "1010100:1:1011000 non-member\n"
    );
    assert_eq!(code(&["to-word", "1010100:1:1011000"]), Some(1));
}

#[test]
fn question_mark() {
    assert_eq!(stdout(&["minkowski", "1/2"]), "1/8\n");
    assert_eq!(stdout(&["minkowski", "-1/2"]), "7/8\n");
    assert_eq!(stdout(&["minkowski", "1/0"]), "1/2\n");
    assert_eq!(stdout(&["minkowski-inv", "3/8"]), "2/1\n");
    assert_eq!(code(&["minkowski-inv", "1"]), Some(2));
    let c = stdout(&[
        "conjugate",
        "0/1..1/0:[[0,-1],[1,1]];-1/0..-1/1:[[0,-1],[1,1]];-1/1..0/1:[[0,-1],[1,1]]",
    ]);
    assert_eq!(c, "0,3/4; 1/2,1; 3/4,3/2; 1,7/4\n");
}

#[test]
fn slope_sequences() {
    let out = stdout(&["seq", "b"]);
    assert_eq!(
        out,
        "2^-2/2^-1,o2^-1/2^-2,2^-2/2^-2\nslopes 1/2,o2/1,1/1\ngood\n"
    );
    assert!(stdout(&["seq", "1010100:1:1011000"]).ends_with("not good\n"));
}

#[test]
fn reports() {
    let lengths = stdout(&["lengths", "--max-k", "2"]);
    assert!(lengths.contains("bab\t3\t3\t4\t-"));
    assert!(lengths.trim_end().ends_with("bounds hold"));
    let free = stdout(&["free-subgroup", "--max-len", "2"]);
    assert!(free.contains("abelianization g -> (0, 2)"));
    assert!(free.contains("trivial 0"));
    assert_eq!(stdout(&["bfs", "--radius", "3", "a"]), "2\n");
    assert_eq!(stdout(&["bfs", "--radius", "1", "a"]), "beyond radius 1\n");
}

#[test]
fn render_to_file() {
    let path = std::env::temp_dir().join(format!("thompson-render-{}.dot", std::process::id()));
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&["render", "a", "-o", p]), "");
    let dot = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(dot.starts_with("// diagram 100:2:100\n// pairing 1->2 2->1\n"));
    assert_eq!(dot.matches("digraph").count(), 2);
}

#[test]
fn verify_small() {
    let out = stdout(&["verify", "--max-k", "2", "--radius", "0"]);
    assert!(
        out.trim_end().ends_with("9 passed, 0 failed, 1 skipped"),
        "{out}"
    );
    assert_eq!(out, stdout(&["verify", "--max-k", "2", "--radius", "0"]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["normalize", "abx"]), Some(2));
    assert_eq!(code(&["to-diagram"]), Some(2));
    assert_eq!(code(&["member", "10:1:10"]), Some(2));
    assert_eq!(code(&["lengths", "--max-k", "13"]), Some(2));
    assert_eq!(code(&["bfs", "--radius", "7", "a"]), Some(2));
    assert_eq!(code(&["seq", "0,0; 1/3,1/2; 1,1"]), Some(2));
}
