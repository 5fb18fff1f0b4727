//! SMT-LIB 2 export and an external solver backend driven through it.

use std::fmt::Write as _;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{Clause, ConstraintSystem, Family, Lit, Overlay, SolverBackend, SolverModel};
use crate::error::{Error, Result};

fn b_name(v: usize) -> String {
    if v == 0 { "b_eps".into() } else { format!("b{v}") }
}

fn q_name(v: usize) -> String {
    if v == 0 { "q_eps".into() } else { format!("q{v}") }
}

fn lit_term(l: &Lit) -> String {
    match *l {
        Lit::B(v, true) => b_name(v),
        Lit::B(v, false) => format!("(not {})", b_name(v)),
        Lit::QEq(a, b) => format!("(= {} {})", q_name(a), q_name(b)),
        Lit::QNeq(a, b) => format!("(not (= {} {}))", q_name(a), q_name(b)),
        Lit::QIs(a, k) => format!("(= {} {k})", q_name(a)),
    }
}

fn clause_term(c: &Clause) -> String {
    match c.lits.as_slice() {
        [] => "false".into(),
        [l] => lit_term(l),
        lits => format!("(or {})", lits.iter().map(lit_term).collect::<Vec<_>>().join(" ")),
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Pin => "b_eps pinned",
        Family::C1 => "C1",
        Family::C2 => "C2",
        Family::C2Output => "C2 outputs",
        Family::C3 => "C3",
        Family::C4 => "C4",
    }
}

/// Script asserting ranges and the base, then the overlay inside a
/// `push`/`pop` frame followed by `check-sat` and `get-model`.
pub fn export_smtlib(sys: &ConstraintSystem, overlay: Overlay) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "; N = {}, {} reset and {} location variables", sys.n, sys.resets, sys.locations);
    let _ = writeln!(s, "(set-logic QF_LIA)");
    for v in 0..sys.resets {
        let _ = writeln!(s, "(declare-const {} Bool)", b_name(v));
    }
    for v in 0..sys.locations {
        let _ = writeln!(s, "(declare-const {} Int)", q_name(v));
    }
    let _ = writeln!(s, "; C3' ranges");
    for v in 0..sys.locations {
        let q = q_name(v);
        let _ = writeln!(s, "(assert (and (<= 1 {q}) (<= {q} {})))", sys.n);
    }
    let mut family = None;
    for c in &sys.base {
        if family != Some(c.family) {
            family = Some(c.family);
            let _ = writeln!(s, "; {}", family_name(c.family));
        }
        let _ = writeln!(s, "(assert {})", clause_term(c));
    }
    let _ = writeln!(s, "(push 1)");
    let top = sys.overlay(overlay);
    if !top.is_empty() {
        let _ = writeln!(s, "; C3");
    }
    for c in &top {
        let _ = writeln!(s, "(assert {})", clause_term(c));
    }
    let _ = writeln!(s, "(check-sat)\n(get-model)\n(pop 1)");
    s
}

/// Runs `<path> <script file>` and reads `sat`/`unsat` plus a model.
#[derive(Clone, Debug)]
pub struct SmtLibSolver {
    pub path: String,
}

impl SmtLibSolver {
    pub fn new(path: &str) -> Self {
        SmtLibSolver { path: path.to_string() }
    }
}

static SCRIPT_COUNTER: AtomicU64 = AtomicU64::new(0);

impl SolverBackend for SmtLibSolver {
    fn name(&self) -> String {
        format!("smtlib:{}", self.path)
    }

    fn solve(&mut self, sys: &ConstraintSystem, overlay: Overlay) -> Result<Option<SolverModel>> {
        let script = export_smtlib(sys, overlay);
        let file = std::env::temp_dir().join(format!(
            "dota-learn-{}-{}.smt2",
            std::process::id(),
            SCRIPT_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&file, script)?;
        let out = Command::new(&self.path).arg(&file).output();
        let _ = std::fs::remove_file(&file);
        let out = out.map_err(|e| Error::Solver(format!("cannot run {}: {e}", self.path)))?;
        let text = String::from_utf8_lossy(&out.stdout);
        let model = parse_response(&text, sys)?;
        if let Some(m) = &model {
            if let Some(bad) = sys.violated(overlay, m) {
                return Err(Error::Solver(format!("{} returned a model violating {bad}", self.path)));
            }
            if m.locations.iter().any(|&q| !(1..=sys.n).contains(&q)) {
                return Err(Error::Solver(format!("{} returned a location out of range", self.path)));
            }
        }
        Ok(model)
    }
}

#[derive(Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_all(tokens: &[String]) -> Result<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let list = stack.pop().filter(|_| !stack.is_empty());
                let list = list.ok_or_else(|| Error::Solver("unbalanced solver output".into()))?;
                stack.last_mut().expect("outer frame").push(Sexp::List(list));
            }
            a => stack.last_mut().expect("frame").push(Sexp::Atom(a.to_string())),
        }
    }
    match stack.pop() {
        Some(top) if stack.is_empty() => Ok(top),
        _ => Err(Error::Solver("unbalanced solver output".into())),
    }
}

fn int_value(s: &Sexp) -> Option<i64> {
    match s {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(l) => match l.as_slice() {
            [Sexp::Atom(m), x] if m == "-" => int_value(x).map(|v| -v),
            _ => None,
        },
    }
}

fn collect_defines(s: &Sexp, out: &mut Vec<(String, Sexp)>) {
    if let Sexp::List(items) = s {
        if let [Sexp::Atom(kw), Sexp::Atom(name), _, _, value] = items.as_slice() {
            if kw == "define-fun" {
                let v = match value {
                    Sexp::Atom(a) => Sexp::Atom(a.clone()),
                    Sexp::List(_) => Sexp::Atom(int_value(value).map(|v| v.to_string()).unwrap_or_default()),
                };
                out.push((name.clone(), v));
                return;
            }
        }
        for i in items {
            collect_defines(i, out);
        }
    }
}

fn var_index(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest == "_eps" { Some(0) } else { rest.parse().ok().filter(|&v| v > 0) }
}

fn parse_response(text: &str, sys: &ConstraintSystem) -> Result<Option<SolverModel>> {
    let items = parse_all(&tokenize(text))?;
    let verdict = items.iter().find_map(|s| match s {
        Sexp::Atom(a) => Some(a.as_str()),
        _ => None,
    });
    match verdict {
        Some("unsat") => return Ok(None),
        Some("sat") => {}
        other => return Err(Error::Solver(format!("unexpected solver verdict {other:?}"))),
    }
    let mut defines = Vec::new();
    for s in &items {
        collect_defines(s, &mut defines);
    }
    let mut m = SolverModel { resets: vec![false; sys.resets], locations: vec![1; sys.locations] };
    for (name, value) in defines {
        let Sexp::Atom(v) = value else { continue };
        if let Some(i) = var_index(&name, 'b').filter(|&i| i < sys.resets) {
            m.resets[i] = v == "true";
        } else if let Some(i) = var_index(&name, 'q').filter(|&i| i < sys.locations) {
            let k: i64 = v.parse().map_err(|_| Error::Solver(format!("bad value {v} for {name}")))?;
            m.locations[i] = u32::try_from(k).map_err(|_| Error::Solver(format!("location {k} out of range")))?;
        }
    }
    Ok(Some(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> ConstraintSystem {
        ConstraintSystem {
            resets: 2,
            locations: 2,
            n: 2,
            base: vec![
                Clause::new(vec![Lit::B(0, true)], Family::Pin, vec![0]),
                Clause::new(vec![Lit::B(1, false), Lit::QNeq(0, 1)], Family::C1, vec![0, 1]),
                Clause::new(vec![Lit::QIs(0, 1)], Family::C4, vec![0]),
            ],
            representatives: vec![0],
        }
    }

    #[test]
    fn export_layout() {
        let text = export_smtlib(&sys(), Overlay::Closed);
        assert!(text.contains("(declare-const b_eps Bool)"));
        assert!(text.contains("(assert (and (<= 1 q1) (<= q1 2)))"));
        assert!(text.contains("(assert (or (not b1) (not (= q_eps q1))))"));
        let push = text.find("(push 1)").unwrap();
        assert!(text[push..].contains("(assert (= q_eps 2))"));
        assert!(text.trim_end().ends_with("(check-sat)\n(get-model)\n(pop 1)"));
    }

    #[test]
    fn parses_models() {
        let out = "sat\n(\n  (define-fun b_eps () Bool true)\n  (define-fun b1 () Bool false)\n  \
                   (define-fun q_eps () Int 1)\n  (define-fun q1 () Int (- 2))\n)\n";
        assert!(parse_response(out, &sys()).is_err());
        let out = out.replace("(- 2)", "2");
        let m = parse_response(&out, &sys()).unwrap().unwrap();
        assert_eq!(m.resets, [true, false]);
        assert_eq!(m.locations, [1, 2]);
        assert!(parse_response("unsat\n", &sys()).unwrap().is_none());
        assert!(parse_response("error\n", &sys()).is_err());
    }

    #[cfg(unix)]
    #[test]
    fn external_process_round_trip() {
        let dir = std::env::temp_dir().join(format!("dota-learn-fake-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let script = dir.join("fake.sh");
        std::fs::write(
            &script,
            "#!/bin/sh\ngrep -q '(push 1)' \"$1\" || exit 1\n\
             echo sat; echo '((define-fun b_eps () Bool true) (define-fun q1 () Int 2))'\n",
        )
        .unwrap();
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let mut s = SmtLibSolver::new(script.to_str().unwrap());
        let m = s.solve(&sys(), Overlay::Relaxed).unwrap().unwrap();
        assert_eq!(m.locations, [1, 2]);
        assert!(s.solve(&sys(), Overlay::Closed).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
