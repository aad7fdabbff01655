use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scl-hodge"))
}

#[test]
fn mesh_pipes_into_spectrum() {
    let mesh = bin().args(["mesh", "--torus", "8", "--dim", "2"]).output().unwrap();
    assert!(mesh.status.success());
    let mut child = bin()
        .args(["spectrum", "--degree", "1", "--nev", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&mesh.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["# scl-hodge", "# input sha256", "# seed 7", "# quad-order 4", "# tolerances"] {
        assert!(text.contains(key), "{key}");
    }
    let row = text.lines().find(|l| l.starts_with("1\t0\t")).unwrap();
    let lam: f64 = row.split('\t').nth(2).unwrap().parse().unwrap();
    assert!((lam - 38.807358284668).abs() < 1e-8, "{lam}");
}

#[test]
fn growth_csv() {
    let out = bin().args(["growth", "--class", "1,0,0,0", "--n", "40"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,norm,ratio");
    assert_eq!(rows.len(), 41);
    let last: f64 = rows[40].split(',').nth(2).unwrap().parse().unwrap();
    assert!((last - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
}

#[test]
fn decay_table_carries_the_banner() {
    let out = bin().args(["growth", "--decay", "--n", "10"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("illustrative constants"));
    assert!(text.contains("# r_hat = 9.6242365011920694e-1"));
    let twice = bin().args(["growth", "--decay", "--n", "10", "--D", "2"]).output().unwrap();
    let a: Vec<f64> = text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let t2 = String::from_utf8(twice.stdout).unwrap();
    assert!(!t2.contains("illustrative"));
    let b: Vec<f64> = t2.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(a.iter().zip(&b).all(|(x, y)| (2.0 * x - y).abs() <= 1e-15 * y));
}

#[test]
fn exit_codes() {
    let zero = bin().args(["growth", "--class", "0,0,0,0"]).output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("zero homology class"));
    assert_eq!(bin().args(["spectrum", "--bogus"]).output().unwrap().status.code(), Some(2));
    let bad = bin().args(["hodge", "--input", "/nonexistent/file"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let neg = bin().args(["growth", "--decay", "--K", "-1"]).output().unwrap();
    assert_eq!(neg.status.code(), Some(2));
    // the top-degree space has no coexact part
    let none = bin().args(["spectrum", "--torus", "4", "--degree", "2"]).output().unwrap();
    assert_eq!(none.status.code(), Some(3));
}

#[test]
fn reports_go_to_the_output_directory() {
    let dir = std::env::temp_dir().join(format!("scl-hodge-cli-{}", std::process::id()));
    let st = bin().args(["diameter", "--torus", "8", "--out", dir.to_str().unwrap()]).status().unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(dir.join("diameter.tsv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("5\t7.5")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn certify_and_fill() {
    let out = bin().args(["certify", "--torus", "8", "--eps", "1"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("g_eps\ttrue") && text.contains("net_dense\ttrue"));
    let dir = std::env::temp_dir().join(format!("scl-hodge-fill-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sphere = "dim 2\ncurvature 0\nsimplex 2 1 2 3\nsimplex 2 0 2 3\nsimplex 2 0 1 3\nsimplex 2 0 1 2\n\
length 0 1 1\nlength 0 2 1\nlength 0 3 1\nlength 1 2 1\nlength 1 3 1\nlength 2 3 1\n";
    std::fs::write(dir.join("s.txt"), sphere).unwrap();
    std::fs::write(dir.join("c.txt"), "edge 0 1 1\nedge 1 2 1\nedge 2 0 1\n").unwrap();
    let out = bin()
        .args(["scl", "--lp", "rational", "--input"])
        .arg(dir.join("s.txt"))
        .arg("--cycle")
        .arg(dir.join("c.txt"))
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("primal")).unwrap();
    let cols: Vec<&str> = row.split('\t').collect();
    assert_eq!(cols[3], "1");
    assert_eq!(cols[4], "4.0000000000000000e0");
    std::fs::write(dir.join("m.txt"), "edge 0 1 1\n").unwrap();
    let out = bin().args(["fill", "--input"]).arg(dir.join("s.txt")).arg("--cycle").arg(dir.join("m.txt")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
