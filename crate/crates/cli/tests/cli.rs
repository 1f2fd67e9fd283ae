use std::io::Write;
use std::process::{Command, Stdio};

fn run(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_orderthree"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn orderthree");
    {
        let mut sin = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            sin.write_all(s.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("orderthree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Formulas over p, q and false with at most `n` connectives.
fn corpus(n: usize) -> Vec<String> {
    let mut by_size: Vec<Vec<String>> = vec![vec!["p".into(), "q".into(), "false".into()]];
    for k in 1..=n {
        let mut level = Vec::new();
        for i in 0..k {
            for a in &by_size[i] {
                for b in &by_size[k - 1 - i] {
                    for op in ["->", "/\\", "\\/"] {
                        level.push(format!("({a} {op} {b})"));
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.concat()
}

#[test]
fn prove_identity_prints_witness() {
    let (code, out, _) = run(&["prove", "p -> p", "--term"], None);
    assert_eq!(code, 0);
    assert_eq!(out, "provable\nwitness: \\x:p. x\ncheck: p -> p\n");
}

#[test]
fn peirce_has_two_state_countermodel() {
    let (code, out, _) = run(&["prove", "((p->q)->p)->p", "--refute", "3"], None);
    assert_eq!(code, 1);
    assert!(
        out.starts_with("unprovable\ncountermodel (2 states"),
        "{out}"
    );
    assert!(out.contains("c0 |/- goal:"), "{out}");
}

#[test]
fn order_two_plus_example_needs_three_states() {
    let (code, out, _) = run(
        &["prove", "(~p->q)->(~r->q)->(p->~r)->q", "--refute", "3"],
        None,
    );
    assert_eq!(code, 1);
    assert!(out.contains("countermodel (3 states"), "{out}");
    let (_, out2, _) = run(
        &["prove", "(~p->q)->(~r->q)->(p->~r)->q", "--refute", "2"],
        None,
    );
    assert!(
        out2.contains("no countermodel with at most 2 states"),
        "{out2}"
    );
}

#[test]
fn refute_defaults_to_four_states() {
    let (code, out, _) = run(&["prove", "p \\/ ~p", "--refute"], None);
    assert_eq!(code, 1);
    assert!(out.contains("countermodel (2 states"), "{out}");
}

#[test]
fn printed_countermodel_refutes_goal() {
    use orderthree::kripke::KripkeModel;
    let goal = "(~p->q)->(~r->q)->(p->~r)->q";
    let (_, out, _) = run(&["--json", "prove", goal, "--refute", "3"], None);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let model: KripkeModel = v["data"]["countermodel"]["model"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    let f = orderthree::parse_formula(goal).unwrap();
    let root = v["data"]["countermodel"]["root"].as_u64().unwrap() as usize;
    assert!(!model.forces(root, &f));
}

#[test]
fn judgements_and_iipc_fragment() {
    let (code, _, _) = run(&["prove", "a: p -> q, b: p |- q"], None);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["prove", "p /\\ q -> p", "--fragment", "iipc"], None);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["prove", "p -> "], None);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn classical_rewrite_golden_and_fragment_error() {
    let (code, out, _) = run(
        &["reduce", "(((p1->p2)->p3)->p4)->p5", "--to", "classical3"],
        None,
    );
    assert_eq!(code, 0);
    assert_eq!(out, "(p1 -> (p2 -> p5) -> p4) -> (p3 -> p4) -> p5\n");
    let (code, _, _) = run(&["reduce", "p \\/ q -> p", "--to", "classical3"], None);
    assert_eq!(code, 2);
}

#[test]
fn iipc3_output_has_order_at_most_three() {
    let (_, out, _) = run(&["reduce", "p -> p", "--to", "iipc3"], None);
    let (code, report, _) = run(&["--json", "classify", "-"], Some(&out));
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!(v["data"]["implicational"].as_bool().unwrap());
    assert!(v["data"]["order"].as_u64().unwrap() <= 3);
}

#[test]
fn classify_examples() {
    let (_, out, _) = run(&["classify", "p -> p"], None);
    assert!(out.contains("implicational: yes\norder: 1\n"), "{out}");
    let (_, out, _) = run(&["classify", "(((p1->p2)->p3)->p4)->p5"], None);
    assert!(out.contains("order: 4\n"), "{out}");
    let (_, out, _) = run(&["classify", "(~p->q)->q"], None);
    assert!(out.contains("order-two-plus: yes\n"), "{out}");
    let (code, _, _) = run(&["classify", "p ->"], None);
    assert_eq!(code, 2);
}

#[test]
fn automaton_output_runs() {
    let (_, text, _) = run(&["reduce", "p /\\ q -> q", "--to", "automaton"], None);
    let (code, out, _) = run(&["automaton", "run", "-", "--witness"], Some(&text));
    assert_eq!(code, 0);
    assert!(out.starts_with("accepting\nwitness ("), "{out}");
}

#[test]
fn dfa_file_runs_and_init_override() {
    // Register a0 / b0: the first letter is a / b. Accepts words starting
    // with a.
    let text = "states: s t fin\nregisters: a0 b0\nfinal: fin\ninit: s {a0}\n\
                s: check {a0} set {} goto t\nt: goto fin\n";
    let p = write_temp("dfa.txt", text);
    let p = p.to_str().unwrap();
    assert_eq!(run(&["automaton", "run", p], None).0, 0);
    assert_eq!(run(&["automaton", "run", p, "--init", "s {b0}"], None).0, 1);
    assert_eq!(run(&["automaton", "validate", p], None).0, 0);
}

#[test]
fn unknown_state_is_one_defect() {
    let text = "states: s fin\nregisters: r\nfinal: fin\ninit: s {}\ns: goto nowhere\n";
    let p = write_temp("bad.txt", text);
    let p = p.to_str().unwrap();
    let (code, out, _) = run(&["automaton", "validate", p], None);
    assert_eq!(code, 1);
    assert_eq!(out, "instruction 1: unknown state nowhere\n1 defects\n");
    assert_eq!(run(&["automaton", "run", p], None).0, 2);
}

#[test]
fn encoders_agree_with_truth_tables() {
    let unsat = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n";
    let (code, ctx, _) = run(&["encode", "--mode", "conp"], Some(unsat));
    assert_eq!(code, 0);
    assert!(ctx.trim_end().ends_with("|- false"), "{ctx}");
    assert_eq!(run(&["prove"], Some(&ctx)).0, 0);

    let sat = "p cnf 2 2\n1 2 2 0\n-1 -2 -2 0\n";
    let (_, ctx, _) = run(&["encode", "-", "--mode", "conp"], Some(sat));
    assert_eq!(run(&["prove"], Some(&ctx)).0, 1);
    let (_, f, _) = run(&["encode", "-", "--mode", "np"], Some(sat));
    assert_eq!(run(&["prove", "-"], Some(&f)).0, 0);
    let (_, f, _) = run(&["encode", "-", "--mode", "np"], Some(unsat));
    assert_eq!(run(&["prove", "-"], Some(&f)).0, 1);

    let short = "p cnf 2 1\n1 2 0\n";
    assert_eq!(run(&["encode", "-", "--mode", "np"], Some(short)).0, 2);
    assert_eq!(
        run(&["encode", "-", "--mode", "np", "--pad"], Some(short)).0,
        0
    );
    assert_eq!(
        run(&["encode", "-", "--mode", "np"], Some("p cnf x\n")).0,
        2
    );
}

#[test]
fn lba_battery_machine() {
    let machine = orderthree::reductions::lba::battery::first_symbol().to_string();
    let p = write_temp("first.lba", &machine);
    let p = p.to_str().unwrap();
    for (input, want) in [("a", 0), ("b", 1), ("a b", 0), ("b a", 1)] {
        let (code, out, err) = run(&["lba", p, "--input", input], None);
        assert_eq!(code, want, "{input}: {out}{err}");
    }
    let (code, out, _) = run(&["lba", p, "--input", "a", "--emit"], None);
    assert_eq!(code, 0);
    assert_eq!(run(&["automaton", "run", "-"], Some(&out)).0, 0);
}

#[test]
fn check_types_terms() {
    let (code, out, _) = run(&["check", "\\x:p. x", "--type", "p -> p"], None);
    assert_eq!((code, out.as_str()), (0, "type: p -> p\n"));
    let (code, _, _) = run(&["check", "\\x:p. x", "--type", "q -> q"], None);
    assert_eq!(code, 1);
    let (code, out, _) = run(
        &["check", "(\\x:p. x) y", "--context", "y: p", "--normalize"],
        None,
    );
    assert_eq!(code, 0);
    assert!(out.ends_with("normal form: y\n"), "{out}");
    assert_eq!(run(&["check", "\\x:p."], None).0, 2);
}

#[test]
fn pipe_coherence_over_corpus() {
    for f in corpus(2) {
        let direct = run(&["prove", &f], None).0;
        let (c, iipc3, _) = run(&["reduce", &f, "--to", "iipc3"], None);
        assert_eq!(c, 0, "{f}");
        assert_eq!(
            run(&["prove", "--fragment", "iipc"], Some(&iipc3)).0,
            direct,
            "{f} via iipc3"
        );
        let (c, auto, _) = run(&["reduce", &f, "--to", "automaton"], None);
        assert_eq!(c, 0, "{f}");
        assert_eq!(
            run(&["automaton", "run"], Some(&auto)).0,
            direct,
            "{f} via automaton"
        );
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["prove", "(~p->q)->(~r->q)->(p->~r)->q", "--refute", "3"],
        vec!["reduce", "(p -> q) \\/ (q -> p)", "--to", "automaton"],
        vec!["--json", "prove", "((p -> q) -> p) -> p", "--refute"],
    ] {
        assert_eq!(run(&args, None), run(&args, None));
    }
}
