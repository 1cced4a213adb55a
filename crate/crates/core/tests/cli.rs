use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn ikp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ikp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ikp_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ikp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn prove_ax1_exits_zero_with_a_proof() {
    let o = ikp(&["prove", "box (p->q) -> (box p -> box q)", "--proof"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("provable"));
    assert!(text.contains("by BoxR"));
}

#[test]
fn dual_box_countermodel_json() {
    let o = ikp(&["prove", "~dia ~p -> box p", "--countermodel", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let json = text.split_once('\n').unwrap().1;
    let m = ikp::model::Model::from_json(json).unwrap();
    assert_eq!(m.worlds.len(), 6);
    assert!(m.refutes(&ikp::formula::parse("~dia ~p -> box p").unwrap()));
}

#[test]
fn syntax_error_exits_two() {
    let o = ikp(&["prove", "p -> "]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn tiny_budget_exits_three() {
    let o = ikp(&[
        "prove",
        "(dia p -> box q) -> box (p -> q)",
        "--max-steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), "budget-exceeded");
}

#[test]
fn check_worked_model() {
    let o = ikp(&["check", &data("dual_box_model.json"), "~dia ~p -> box p"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = ikp(&["check", &data("dual_box_model.json"), "~dia ~p"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_single_world_against_false() {
    let o = ikp(&["check", &data("single_world.json"), "false"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_reports_backward_confluence_failure() {
    let o = ikp(&["check", &data("no_backward_confluence.json"), "p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("BC fails"));
}

#[test]
fn check_reads_stdin() {
    let json = std::fs::read_to_string(data("single_world.json")).unwrap();
    let o = ikp_stdin(&["check", "-", "true"], &json);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn translate_labelled_golden() {
    let o = ikp(&["translate", "labelled", "x0<=x1; x1Rx2 |- x0:A&B, x2:A"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "=>{0} A & B, < =>{1} [ =>{2} A ] >");
}

#[test]
fn translate_polarised_golden() {
    let input = "+A, +B, [ +C, -D ], [ { +H, [ +J ] }, -E, [ -F ] ]";
    let o = ikp(&["translate", "polarised", input]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "A, B =>{0} [ C =>{1} D ], [ H =>{2} E, [ J =>{3} ], [ =>{4} F ] ]"
    );
}

#[test]
fn translate_then_prove() {
    let o = ikp(&["translate", "labelled", "xRy; x:box p |- y:p", "--prove"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "provable"));
}

#[test]
fn non_tree_labelled_input_exits_two() {
    let o = ikp(&["translate", "labelled", "xRy; z<=y; x:A |- z:B"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ikp_stdin(
        &["translate", "labelled", "-"],
        "x<=y; x<=z; y<=w; z<=w |- x:p",
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn batch_keeps_input_order_and_flags_errors() {
    let o = ikp(&["prove", "--batch", &data("batch.txt")]);
    assert_eq!(o.status.code(), Some(2));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("2\tprovable\t"));
    assert!(lines[1].starts_with("3\tunprovable\t"));
    assert!(lines[2].starts_with("5\tprovable\t"));
    assert!(lines[3].starts_with("6\terror\t"));
    assert!(lines[4].starts_with("7\tprovable\t"));
}

#[test]
fn trace_and_stats_are_json() {
    let o = ikp(&["prove", "p | ~p", "--trace", "--stats"]);
    assert_eq!(o.status.code(), Some(1));
    for line in stdout(&o).lines().skip(1) {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    let stats: serde_json::Value =
        serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert!(stats["rule_applications"].as_u64().unwrap() > 0);
}
