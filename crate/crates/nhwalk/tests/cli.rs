use std::process::Command;

fn nhwalk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nhwalk"))
}

#[test]
fn validation_errors_exit_with_two() {
    let out = nhwalk().args(["hn_spectrum", "--g-list", "0.5,0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g_list"));

    let out = nhwalk().args(["hn_spectrum", "--boundary", "twisted"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = nhwalk().args(["no_such_experiment"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = nhwalk()
        .args(["hn_spectrum", "--L", "4"])
        .env("NHWALK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = nhwalk()
        .args(["walk_evolve", "--T", "4", "--g", "400", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!path.exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "experiment = \"hn_spectrum\"\nL = 10\ng_list = [0.0, 0.5]\nseed = 3\n").unwrap();
    let path = dir.path().join("s.csv");
    let status = nhwalk()
        .args(["hn_spectrum", "--seed", "8", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# seed = 8\n"));
    assert!(text.contains("# L = 10\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 21);
}

#[test]
fn reruns_and_thread_counts_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let path = dir.path().join(format!("{i}.csv"));
        let status = nhwalk()
            .args(["walk_spectrum", "--L", "12", "--g-list", "0.3,0.6", "--realizations", "2", "--out"])
            .arg(&path)
            .env("NHWALK_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn summarize_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    assert!(nhwalk()
        .args(["hn_spectrum", "--L", "20", "--g-list", "0,1.5", "--out"])
        .arg(&path)
        .status()
        .unwrap()
        .success());
    let out = nhwalk().arg("summarize").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("transition_g = 1.5"), "{text}");

    std::fs::write(&path, "# version = \"0.1.0\"\n# [config]\n# experiment = \"tm_kappa\"\n# seed = 0\n# realizations = 1\n# tol = 1e-9\ng,index\n1,2\n").unwrap();
    let out = nhwalk().arg("summarize").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdout_when_no_out_path() {
    let out = nhwalk().args(["tm_kappa", "--N", "1000"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\ntheta,kappa,stderr\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 130);
}
