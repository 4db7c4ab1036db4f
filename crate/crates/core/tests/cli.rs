// Copyright 2026 The splitauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `splitauth` binary end to end.

use std::io::Write;
use std::net::TcpListener;
use std::process::{Command, Output, Stdio};

const SCRIPT: &str =
    "register\nAlex\n0504\nregister\nRony\n6451\nlogin\nAlex\n0504\nlogout\nlogin\nAlex\n6451\n";

const GOLDEN: &[&str] = &[
    "Welcome to the system. Kindly register to login.",
    "Options: register/login/logout",
    "> register",
    "New username: Alex",
    "New password: 0504",
    "Creating account...",
    "Account has been created",
    "> register",
    "New username: Rony",
    "New password: 6451",
    "Creating account...",
    "Account has been created",
    "> login",
    "Username: Alex",
    "Password: 0504",
    "Login successful",
    "Welcome to your account Alex",
    "Options: logout",
    "Alex > logout",
    "Logging out...",
    "> login",
    "Username: Alex",
    "Password: 6451",
    "Invalid username or password",
    "> ",
];

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_splitauth"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn demo_reproduces_the_transcript() {
    for args in [
        ["demo", "--n", "2", "--mode", "segment", "--seed", "0"],
        ["demo", "--n", "1", "--mode", "segment", "--seed", "1"],
        ["demo", "--n", "3", "--mode", "xor", "--seed", "2"],
    ] {
        let out = run(&args, SCRIPT);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = stdout(&out);
        assert_eq!(text.lines().collect::<Vec<_>>(), GOLDEN, "{args:?}");
    }
}

#[test]
fn demo_without_seed_works() {
    let out = run(&["demo"], "register\nAlex\n0504\nlogin\nAlex\n0504\n");
    assert!(stdout(&out).contains("Welcome to your account Alex"));
}

#[test]
fn unreachable_gateway() {
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap();
    let out = run(&["client", "--gateway", &port.to_string()], "login\n");
    assert!(!out.status.success());
    assert_eq!(stdout(&out), "Service unavailable\n");
}

#[test]
fn attacklab_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let dict = dir.path().join("small.txt");
    let words: String = (0..300).map(|i| format!("{i:04}\n")).collect();
    std::fs::write(&dict, words).unwrap();
    let csv = dir.path().join("out.csv");
    let args = [
        "attacklab",
        "--seed",
        "7",
        "--dict",
        dict.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ];
    let a = run(&args, "");
    let b = run(&args, "");
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    for attack in [
        "replay",
        "impersonation",
        "compromise",
        "eavesdrop-login",
        "eavesdrop-register",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(attack)),
            "no {attack} row"
        );
    }
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers: Vec<String> = reader
        .headers()
        .unwrap()
        .iter()
        .map(str::to_owned)
        .collect();
    assert_eq!(
        headers,
        ["attack", "n", "mode", "compromised", "trials", "successes"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(row.len(), 6);
        let trials: usize = row[4].parse().unwrap();
        let successes: usize = row[5].parse().unwrap();
        assert!(successes <= trials);
    }
}

#[test]
fn attacklab_missing_dictionary() {
    let out = run(
        &[
            "attacklab",
            "--seed",
            "1",
            "--dict",
            "/nonexistent/words.txt",
        ],
        "",
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dictionary"));
}

#[test]
fn serve_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let out = run(
        &[
            "serve",
            "--role",
            "shareserver",
            "--listen",
            "127.0.0.1:0",
            "--peer",
            "127.0.0.1:1",
            "--store",
            store.to_str().unwrap(),
        ],
        "",
    );
    assert!(!out.status.success());
    let out = run(
        &[
            "serve",
            "--role",
            "boss",
            "--listen",
            "127.0.0.1:0",
            "--store",
            "x",
        ],
        "",
    );
    assert!(!out.status.success());
}
