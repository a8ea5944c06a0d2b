use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn imdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imdyn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Case {
    args: Vec<String>,
    code: i32,
    /// Must appear in stdout.
    expect: &'static str,
}

fn case(sub: &str, map: &str, rest: &[&str], code: i32, expect: &'static str) -> Case {
    let mut args = vec![sub.to_string(), data(map)];
    args.extend(rest.iter().map(|s| s.to_string()));
    Case { args, code, expect }
}

#[test]
fn exit_code_contract() {
    let cases = vec![
        case("expand", "tent.map", &["--limit", "12"], 0, "N=1\nmin_expansion=2\n"),
        case("kn", "tent.map", &["--nmax", "8"], 0, "8,256,30,"),
        case("orbits", "tent.map", &["--period", "2"], 0, "2,0.1,2/5,4/5,-4,-4,repelling"),
        case("renorm", "skew_tent.map", &["--qmax", "10"], 0, "q=2\nJ=[10/23,13/23]\nboundary_touching=yes"),
        case("renorm", "tent.map", &["--qmax", "10"], 0, "depth=0"),
        case("acip", "three_halves.map", &["--bins", "4"], 0, "0,1/4,0.25,1"),
        case("acip", "attracting.map", &["--bins", "8"], 2, ""),
        case("expand", "attracting.map", &["--limit", "6"], 2, "status=refused"),
        case("mane", "tent.map", &["--avoid", "2/5,3/5", "--nmax", "6"], 0, "certified=yes"),
        case("returns", "tent.map", &["--base", "2/5", "--horizon", "1"], 0, "1/5,3/10,1\n7/10,4/5,1\n"),
        case("expand", "discontinuous.map", &[], 1, ""),
        case("kn", "tent.map", &["--nmax", "x"], 1, ""),
    ];
    assert_eq!(cases.len(), 12);
    for c in &cases {
        let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
        let o = imdyn(&args);
        assert_eq!(o.status.code(), Some(c.code), "{args:?}\n{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains(c.expect), "{args:?}\n{}", stdout(&o));
    }
}

#[test]
fn refusal_reason_is_printed() {
    let o = imdyn(&["acip", &data("attracting.map"), "--bins", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("|Df^N| > 1"));
}

#[test]
fn missing_map_file_is_an_input_error() {
    let o = imdyn(&["kn", &data("no_such.map")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_file_and_summary() {
    let dir = std::env::temp_dir().join(format!("imdyn-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("kn.csv");
    let o = imdyn(&["kn", &data("tent.map"), "--nmax", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "nmax=3 K_last=8\n");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv, "n,K_n,orbit_count,attaining_word\n1,2,2,0\n2,4,1,0.1\n3,8,2,0.0.1\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_deterministic() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["distort", "three_halves.map", "--trials", "40", "--seed", "11"],
        vec!["omega", "skew_tent.map", "--steps", "5000"],
        vec!["acip", "three_halves.map", "--bins", "64"],
        vec!["returns", "tent.map", "--base", "2/5", "--horizon", "5"],
    ];
    for r in runs {
        let mut args: Vec<String> = r.iter().map(|s| s.to_string()).collect();
        args[1] = data(r[1]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let one = imdyn(&args);
        let two = Command::new(env!("CARGO_BIN_EXE_imdyn"))
            .args(&args)
            .env("IMDYN_THREADS", "1")
            .output()
            .unwrap();
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(one.stdout, two.stdout, "{args:?}");
    }
}

#[test]
fn bad_thread_count() {
    let o = Command::new(env!("CARGO_BIN_EXE_imdyn"))
        .args(["kn", &data("tent.map")])
        .env("IMDYN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
