//! Line-based automaton files.
//!
//! ```text
//! states: q0 q1 f
//! registers: r0 r1
//! final: f
//! init: q0 {r0}
//! q0: check {r0} set {r1} goto q1
//! q1: split f f
//! ```

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Configuration, Instruction, MonotonicAutomaton};
use crate::error::{Error, Result};

fn line_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Line {
        line,
        msg: msg.into(),
    })
}

/// Splits `{a, b} rest` into the set and the remainder.
fn take_set(s: &str, line: usize) -> Result<(BTreeSet<String>, &str)> {
    let s = s.trim_start();
    let Some(body) = s.strip_prefix('{') else {
        return line_err(line, format!("expected '{{' at {s:?}"));
    };
    let Some(close) = body.find('}') else {
        return line_err(line, "unclosed '{'");
    };
    let set = body[..close]
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(String::from)
        .collect();
    Ok((set, &body[close + 1..]))
}

fn parse_instruction(at: &str, rest: &str, line: usize) -> Result<Instruction> {
    let words: Vec<&str> = rest.split_whitespace().collect();
    if words.first() == Some(&"split") {
        return match words[..] {
            [_, l, r] => Ok(Instruction::split(at, l, r)),
            _ => line_err(line, "expected 'split <state> <state>'"),
        };
    }
    let mut check = BTreeSet::new();
    let mut set = BTreeSet::new();
    let mut rest = rest.trim_start();
    if let Some(r) = rest.strip_prefix("check") {
        (check, rest) = take_set(r, line)?;
        rest = rest.trim_start();
    }
    if let Some(r) = rest.strip_prefix("set") {
        (set, rest) = take_set(r, line)?;
        rest = rest.trim_start();
    }
    match rest.split_whitespace().collect::<Vec<_>>()[..] {
        ["goto", p] => Ok(Instruction::CheckSet {
            at: at.to_string(),
            check,
            set,
            goto: p.to_string(),
        }),
        _ => line_err(
            line,
            "expected '[check {..}] [set {..}] goto <state>' or 'split <state> <state>'",
        ),
    }
}

/// Parses an automaton and its optional initial configuration.
pub fn parse_automaton(text: &str) -> Result<(MonotonicAutomaton, Option<Configuration>)> {
    let mut a = MonotonicAutomaton::default();
    let mut init = None;
    let mut final_seen = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((head, rest)) = content.split_once(':') else {
            return line_err(line, "expected '<keyword or state>: ...'");
        };
        let head = head.trim();
        match head {
            "states" => a.states.extend(rest.split_whitespace().map(String::from)),
            "registers" => a
                .registers
                .extend(rest.split_whitespace().map(String::from)),
            "final" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                let [f] = words[..] else {
                    return line_err(line, "expected exactly one final state");
                };
                if final_seen {
                    return line_err(line, "final state declared twice");
                }
                final_seen = true;
                a.final_state = f.to_string();
            }
            "init" => {
                let rest = rest.trim();
                let (q, sets) = rest.split_once(char::is_whitespace).unwrap_or((rest, "{}"));
                let (store, tail) = take_set(sets, line)?;
                if !tail.trim().is_empty() || q.is_empty() {
                    return line_err(line, "expected 'init: <state> {<registers>}'");
                }
                init = Some(Configuration {
                    state: q.to_string(),
                    store,
                });
            }
            q if !q.contains(char::is_whitespace) && !q.is_empty() => {
                a.instructions.push(parse_instruction(q, rest, line)?)
            }
            _ => return line_err(line, format!("unknown line head {head:?}")),
        }
    }
    if !final_seen {
        return Err(Error::Invalid("missing 'final:' line".into()));
    }
    Ok((a, init))
}

fn write_set(out: &mut String, s: &BTreeSet<String>) {
    out.push('{');
    for (i, r) in s.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(r);
    }
    out.push('}');
}

/// Renders the format read by `parse_automaton`.
pub fn to_text(a: &MonotonicAutomaton, init: Option<&Configuration>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", a.states.join(" "));
    let _ = writeln!(out, "registers: {}", a.registers.join(" "));
    let _ = writeln!(out, "final: {}", a.final_state);
    if let Some(c) = init {
        let _ = write!(out, "init: {} ", c.state);
        write_set(&mut out, &c.store);
        out.push('\n');
    }
    for i in &a.instructions {
        match i {
            Instruction::CheckSet {
                at,
                check,
                set,
                goto,
            } => {
                let _ = write!(out, "{at}: check ");
                write_set(&mut out, check);
                out.push_str(" set ");
                write_set(&mut out, set);
                let _ = writeln!(out, " goto {goto}");
            }
            Instruction::Split { at, left, right } => {
                let _ = writeln!(out, "{at}: split {left} {right}");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two registers
states: q0 q1 f
registers: r0 r1
final: f
init: q0 {r0}
q0: check {r0} set {r1} goto q1
q1: split f f   # both halves accept
q1: set {r0, r1} goto f
";

    #[test]
    fn parse_and_render() {
        let (a, init) = parse_automaton(SAMPLE).unwrap();
        assert_eq!(a.states, ["q0", "q1", "f"]);
        assert_eq!(a.instructions.len(), 3);
        assert_eq!(init, Some(Configuration::new("q0", ["r0"])));
        let again = parse_automaton(&to_text(&a, init.as_ref())).unwrap();
        assert_eq!(again, (a, init));
    }

    #[test]
    fn errors_name_lines() {
        let err = parse_automaton("final: f\nq0: jump q1\n").unwrap_err();
        assert!(matches!(err, Error::Line { line: 2, .. }), "{err}");
        let err = parse_automaton("final: f\nq0: check {r0 goto q1\n").unwrap_err();
        assert!(matches!(err, Error::Line { line: 2, .. }));
        assert!(parse_automaton("states: q\n").is_err());
    }
}
