//! Text formats.
//!
//! Instances (`.pmp`):
//!
//! ```text
//! 3 5
//! 3 7 2 9
//! 3 1 8 4
//! 3 6 3 5
//! # name 3-3-H5-1
//! # class 3*3/H5
//! # seed 1
//! ```
//!
//! The first line is `W H`, then one line per stack holding its height and
//! priorities bottom to top. Lines starting with `#` are comments; `name`,
//! `class` and `seed` comments carry metadata. Solutions are a `moves M`
//! header followed by one `from to` pair per line, stacks counted from 0.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bay::{Bay, BayError, Move, Priority};
use crate::engine::Solution;
use crate::generate::BayClass;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceMeta {
    pub class: Option<BayClass>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub bay: Bay,
    pub meta: InstanceMeta,
}

impl Instance {
    pub fn new(name: impl Into<String>, bay: Bay) -> Self {
        Instance {
            name: name.into(),
            bay,
            meta: InstanceMeta::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseWarning {
    DuplicatePriority(Priority),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseWarning>,
}

/// Whitespace-separated tokens of one line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line
        .char_indices()
        .chain(std::iter::once((line.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn number<T: std::str::FromStr>(
    line: usize,
    (col, tok): (usize, &str),
    what: &str,
) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| err(line, col, format!("expected {what}, found {tok:?}")))
}

/// Non-blank, non-comment lines with their 1-based numbers; comments go to `comments`.
fn content_lines<'a>(text: &'a str, comments: &mut Vec<(usize, &'a str)>) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(c) = trimmed.strip_prefix('#') {
            comments.push((i + 1, c.trim()));
        } else {
            out.push((i + 1, line));
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Parsed<Instance>, ParseError> {
    let mut comments = Vec::new();
    let lines = content_lines(text, &mut comments);
    let Some(&(hline, header)) = lines.first() else {
        return Err(err(text.lines().count().max(1), 1, "missing `W H` header"));
    };
    let toks = tokens(header);
    if toks.len() != 2 {
        return Err(err(hline, 1, "header must be `W H`"));
    }
    let width: usize = number(hline, toks[0], "stack count")?;
    let max_height: usize = number(hline, toks[1], "height cap")?;
    if width < 2 {
        return Err(err(hline, toks[0].0, "a bay needs at least 2 stacks"));
    }
    if width > crate::bay::MAX_WIDTH {
        return Err(err(
            hline,
            toks[0].0,
            format!("at most {} stacks are supported", crate::bay::MAX_WIDTH),
        ));
    }
    if max_height == 0 {
        return Err(err(hline, toks[1].0, "height cap must be positive"));
    }
    let body = &lines[1..];
    if body.len() < width {
        let at = body.last().map_or(hline, |l| l.0) + 1;
        return Err(err(
            at,
            1,
            format!("expected {width} stack lines, found {}", body.len()),
        ));
    }
    if let Some(&(extra, _)) = body.get(width) {
        return Err(err(extra, 1, "unexpected line after the last stack"));
    }

    let mut stacks = Vec::with_capacity(width);
    let mut seen = BTreeSet::new();
    let mut warnings = Vec::new();
    for &(ln, line) in body {
        let toks = tokens(line);
        let k: usize = number(ln, toks[0], "stack height")?;
        if k > max_height {
            return Err(err(
                ln,
                toks[0].0,
                format!("stack height {k} exceeds cap {max_height}"),
            ));
        }
        if toks.len() != k + 1 {
            return Err(err(
                ln,
                1,
                format!("stack declares {k} blocks but lists {}", toks.len() - 1),
            ));
        }
        let mut stack = Vec::with_capacity(k);
        for &tok in &toks[1..] {
            let p: Priority = number(ln, tok, "priority")?;
            if p == 0 {
                return Err(err(ln, tok.0, "priorities start at 1"));
            }
            if !seen.insert(p) && !warnings.contains(&ParseWarning::DuplicatePriority(p)) {
                warnings.push(ParseWarning::DuplicatePriority(p));
            }
            stack.push(p);
        }
        stacks.push(stack);
    }
    let bay = Bay::new(max_height, stacks).map_err(|e: BayError| err(hline, 1, e.to_string()))?;

    let mut instance = Instance::new("", bay);
    for (ln, c) in comments {
        let (key, value) = c.split_once(char::is_whitespace).unwrap_or((c, ""));
        let value = value.trim();
        match key {
            "name" => instance.name = value.to_owned(),
            "class" => {
                instance.meta.class = Some(
                    value
                        .parse()
                        .map_err(|e: crate::generate::BadClassLabel| err(ln, 1, e.to_string()))?,
                )
            }
            "seed" => {
                instance.meta.seed = Some(
                    value
                        .parse()
                        .map_err(|_| err(ln, 1, format!("bad seed {value:?}")))?,
                )
            }
            _ => {}
        }
    }
    Ok(Parsed {
        value: instance,
        warnings,
    })
}

pub fn serialize_instance(inst: &Instance) -> String {
    let bay = &inst.bay;
    let mut out = format!("{} {}\n", bay.width(), bay.max_height());
    for s in bay.stacks() {
        write!(out, "{}", s.len()).unwrap();
        for p in s {
            write!(out, " {p}").unwrap();
        }
        out.push('\n');
    }
    if !inst.name.is_empty() {
        writeln!(out, "# name {}", inst.name).unwrap();
    }
    if let Some(c) = inst.meta.class {
        writeln!(out, "# class {c}").unwrap();
    }
    if let Some(s) = inst.meta.seed {
        writeln!(out, "# seed {s}").unwrap();
    }
    out
}

pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    let mut comments = Vec::new();
    let lines = content_lines(text, &mut comments);
    let Some(&(hline, header)) = lines.first() else {
        return Err(err(1, 1, "missing `moves M` header"));
    };
    let toks = tokens(header);
    if toks.len() != 2 || toks[0].1 != "moves" {
        return Err(err(hline, 1, "header must be `moves M`"));
    }
    let count: usize = number(hline, toks[1], "move count")?;
    let body = &lines[1..];
    if body.len() != count {
        let at = body.get(count).map_or(hline, |l| l.0);
        return Err(err(
            at,
            1,
            format!("header says {count} moves, found {}", body.len()),
        ));
    }
    let mut moves = Vec::with_capacity(count);
    for &(ln, line) in body {
        let toks = tokens(line);
        if toks.len() != 2 {
            return Err(err(ln, 1, "a move is `from to`"));
        }
        moves.push(Move::new(
            number(ln, toks[0], "stack index")?,
            number(ln, toks[1], "stack index")?,
        ));
    }
    let label = comments
        .iter()
        .find_map(|(_, c)| c.strip_prefix("config").map(str::trim))
        .unwrap_or("");
    Ok(Solution::new(moves, label))
}

pub fn serialize_solution(sol: &Solution) -> String {
    let mut out = format!("moves {}\n", sol.moves.len());
    for m in &sol.moves {
        writeln!(out, "{} {}", m.from, m.to).unwrap();
    }
    if !sol.config_label.is_empty() {
        writeln!(out, "# config {}", sol.config_label).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate;

    #[test]
    fn reads_documented_example() {
        let text = "3 5\n3 7 2 9\n3 1 8 4\n3 6 3 5\n# name 3-3-H5-1\n# class 3*3/H5\n# seed 1\n";
        let parsed = parse_instance(text).unwrap();
        assert!(parsed.warnings.is_empty());
        let inst = parsed.value;
        assert_eq!(inst.bay.stack(1), &[1, 8, 4]);
        assert_eq!(inst.name, "3-3-H5-1");
        assert_eq!(inst.meta.class, Some(BayClass::new(3, 3, 5)));
        assert_eq!(inst.meta.seed, Some(1));
        assert_eq!(serialize_instance(&inst), text);
    }

    #[test]
    fn round_trips_generated() {
        for seed in 0..1000 {
            let inst = generate(2 + seed as usize % 5, 1 + seed as usize % 4, 6, seed).unwrap();
            let text = serialize_instance(&inst);
            assert_eq!(parse_instance(&text).unwrap().value, inst);
        }
    }

    #[test]
    fn empty_stacks_and_comments_anywhere() {
        let text = "# leading\n2 3\n\n0\n2 2 1\n";
        let inst = parse_instance(text).unwrap().value;
        assert_eq!(inst.bay.stacks(), &[vec![], vec![2, 1]]);
        assert_eq!(inst.name, "");
    }

    #[test]
    fn too_tall_stack() {
        let e = parse_instance("2 2\n3 1 2 3\n0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
    }

    #[test]
    fn bad_tokens_point_at_column() {
        let e = parse_instance("2 4\n2 1 x\n0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = parse_instance("2 4\n2 1 0\n0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = parse_instance("2 4\n3 1 2\n0\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_instance("2 4\n1 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_instance("2 4\n1 1\n0\n1 3\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(parse_instance("").is_err());
        assert!(parse_instance("1 4\n0\n").is_err());
        assert!(parse_instance("2\n").is_err());
    }

    #[test]
    fn duplicates_are_accepted_with_warning() {
        let parsed = parse_instance("3 4\n2 5 5\n1 2\n2 2 1\n").unwrap();
        assert_eq!(
            parsed.warnings,
            vec![
                ParseWarning::DuplicatePriority(5),
                ParseWarning::DuplicatePriority(2)
            ]
        );
        assert!(parsed.value.bay.all_well_located());
    }

    #[test]
    fn solution_round_trip() {
        let sol = Solution::new(vec![Move::new(0, 2), Move::new(1, 0)], "max-w-tlp-none");
        let text = serialize_solution(&sol);
        assert_eq!(text, "moves 2\n0 2\n1 0\n# config max-w-tlp-none\n");
        assert_eq!(parse_solution(&text).unwrap(), sol);
        assert_eq!(
            parse_solution("moves 0\n").unwrap(),
            Solution::new(vec![], "")
        );
        assert!(parse_solution("moves 2\n0 1\n").is_err());
        assert!(parse_solution("moves 1\n0 1 2\n").is_err());
        assert!(parse_solution("steps 1\n0 1\n").is_err());
    }
}
