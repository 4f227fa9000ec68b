use std::collections::HashMap;

use super::{
    Binding, DedupStrategy, DenseRepr, Direction, FrontierCreation, HybridCriteria, HybridSchedule,
    LoadBalance, Schedule, ScheduleProgram, Threshold,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    Punct(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::ScheduleSyntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            bump(&mut i, &mut col, 1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump(&mut i, &mut col, 1);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' || chars[i] == '+' || chars[i] == '-')
            {
                // allow exponents like 1e-3 but stop at a sign not preceded by e/E
                if (chars[i] == '+' || chars[i] == '-') && !matches!(chars[i - 1], 'e' | 'E') {
                    break;
                }
                bump(&mut i, &mut col, 1);
            }
            out.push(Token {
                tok: Tok::Num(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
        } else if c == '"' {
            bump(&mut i, &mut col, 1);
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump(&mut i, &mut col, 1);
            }
            if chars.get(i) != Some(&'"') {
                return Err(syntax(tl, tc, "unterminated string"));
            }
            let s = chars[start..i].iter().collect();
            bump(&mut i, &mut col, 1);
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
        } else {
            let p = match c {
                ';' => ";",
                '(' => "(",
                ')' => ")",
                ',' => ",",
                '.' => ".",
                '=' => "=",
                '-' if chars.get(i + 1) == Some(&'>') => "->",
                _ => return Err(syntax(tl, tc, format!("unexpected character {c:?}"))),
            };
            bump(&mut i, &mut col, p.len());
            out.push(Token {
                tok: Tok::Punct(p),
                line: tl,
                col: tc,
            });
        }
    }
    Ok(out)
}

enum Object {
    Simple(Schedule),
    Hybrid(HybridSchedule),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.col))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(syntax(l, c, msg))
    }

    fn next(&mut self) -> Result<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn punct(&mut self, p: &'static str) -> Result<()> {
        match self.peek() {
            Some(Token { tok: Tok::Punct(q), .. }) if *q == p => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected '{p}'")),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    fn ident(&mut self) -> Result<(String, usize, usize)> {
        match self.peek().cloned() {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                col,
            }) => {
                self.pos += 1;
                Ok((s, line, col))
            }
            _ => self.err("expected identifier"),
        }
    }

    fn string(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Str(s), .. }) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected string literal"),
        }
    }

    /// Comma-separated arguments inside parentheses.
    fn args(&mut self) -> Result<Vec<Token>> {
        self.punct("(")?;
        let mut args = Vec::new();
        if self.is_punct(")") {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            let t = self.next()?;
            if matches!(t.tok, Tok::Punct(_)) {
                return Err(syntax(t.line, t.col, "expected argument"));
            }
            args.push(t);
            if self.is_punct(",") {
                self.pos += 1;
                continue;
            }
            self.punct(")")?;
            return Ok(args);
        }
    }
}

fn enum_arg<T>(t: &Token, parse: impl Fn(&str) -> Option<T>) -> Result<T> {
    match &t.tok {
        Tok::Ident(s) => parse(s).ok_or_else(|| syntax(t.line, t.col, format!("invalid enum value {s}"))),
        _ => Err(syntax(t.line, t.col, "invalid enum value")),
    }
}

fn switch_arg(t: &Token) -> Result<bool> {
    enum_arg(t, |s| match s {
        "ENABLED" => Some(true),
        "DISABLED" => Some(false),
        _ => None,
    })
}

fn int_arg(t: &Token) -> Result<u64> {
    match &t.tok {
        Tok::Num(s) => {
            let parsed = if let Some(h) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
                u64::from_str_radix(h, 16).ok()
            } else {
                s.parse().ok()
            };
            parsed.ok_or_else(|| syntax(t.line, t.col, format!("expected non-negative integer, got {s}")))
        }
        _ => Err(syntax(t.line, t.col, "expected integer")),
    }
}

fn arity(name: &str, t: &Token, args: &[Token], min: usize, max: usize) -> Result<()> {
    if args.len() < min || args.len() > max {
        let want = if min == max {
            format!("{min}")
        } else {
            format!("{min}..{max}")
        };
        return Err(syntax(
            t.line,
            t.col,
            format!("wrong arity for {name}: expected {want} arguments, got {}", args.len()),
        ));
    }
    Ok(())
}

fn apply_config(s: &mut Schedule, func: &str, at: &Token, args: &[Token]) -> Result<()> {
    match func {
        "configDirection" => {
            arity(func, at, args, 1, 2)?;
            s.direction = enum_arg(&args[0], Direction::from_token)?;
            if let Some(r) = args.get(1) {
                s.pull_frontier = enum_arg(r, DenseRepr::from_token)?;
            }
        }
        "configLoadBalance" => {
            arity(func, at, args, 1, 3)?;
            s.load_balance = enum_arg(&args[0], LoadBalance::from_token)?;
            s.blocking = false;
            if let Some(b) = args.get(1) {
                s.blocking = enum_arg(b, |t| match t {
                    "BLOCKED" => Some(true),
                    "UNBLOCKED" => Some(false),
                    _ => None,
                })?;
            }
            s.blocking_size = match args.get(2) {
                Some(n) => {
                    let v = int_arg(n)?;
                    Some(u32::try_from(v).map_err(|_| syntax(n.line, n.col, "blocking size too large"))?)
                }
                None => None,
            };
        }
        "configFrontierCreation" => {
            arity(func, at, args, 1, 1)?;
            s.frontier_creation = enum_arg(&args[0], FrontierCreation::from_token)?;
        }
        "configDeduplication" => {
            arity(func, at, args, 1, 2)?;
            s.dedup = switch_arg(&args[0])?;
            if let Some(k) = args.get(1) {
                s.dedup_strategy = enum_arg(k, DedupStrategy::from_token)?;
            }
        }
        "configDelta" => {
            arity(func, at, args, 1, 1)?;
            s.delta = int_arg(&args[0])?;
        }
        "configKernelFusion" => {
            arity(func, at, args, 1, 1)?;
            s.kernel_fusion = switch_arg(&args[0])?;
        }
        other => return Err(syntax(at.line, at.col, format!("unknown config function {other}"))),
    }
    Ok(())
}

fn threshold_arg(t: &Token) -> Result<Threshold> {
    let bad = || syntax(t.line, t.col, "threshold must be a fraction in (0, 1) or \"argv[k]\"");
    let text = match &t.tok {
        Tok::Num(s) => s.as_str(),
        Tok::Str(s) => {
            if let Some(k) = s.strip_prefix("argv[").and_then(|r| r.strip_suffix(']')) {
                return k.parse().map(Threshold::Argv).map_err(|_| bad());
            }
            s.as_str()
        }
        _ => return Err(bad()),
    };
    let f: f64 = text.parse().map_err(|_| bad())?;
    if f > 0.0 && f < 1.0 {
        Ok(Threshold::Fraction(f))
    } else {
        Err(bad())
    }
}

pub(super) fn parse(text: &str) -> Result<ScheduleProgram> {
    let toks = lex(text)?;
    let end = {
        let lines = text.split('\n').count();
        (lines, text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1)
    };
    let mut p = Parser { toks, pos: 0, end };
    let mut vars: HashMap<String, Object> = HashMap::new();
    let mut program = ScheduleProgram::default();

    let simple = |vars: &HashMap<String, Object>, name: &str, line, col| -> Result<Schedule> {
        match vars.get(name) {
            Some(Object::Simple(s)) => Ok(s.clone()),
            Some(Object::Hybrid(_)) => Err(syntax(line, col, format!("{name} is not a SimpleGPUSchedule"))),
            None => Err(syntax(line, col, format!("undefined schedule {name}"))),
        }
    };

    while p.peek().is_some() {
        let (head, hl, hc) = p.ident()?;
        match head.as_str() {
            "SimpleGPUSchedule" => {
                let (name, nl, nc) = p.ident()?;
                let sched = if p.is_punct("=") {
                    p.pos += 1;
                    let (src, sl, sc) = p.ident()?;
                    simple(&vars, &src, sl, sc)?
                } else {
                    Schedule::default()
                };
                if vars.contains_key(&name) {
                    return Err(syntax(nl, nc, format!("{name} is already defined")));
                }
                vars.insert(name, Object::Simple(sched));
            }
            "HybridGPUSchedule" => {
                let (name, nl, nc) = p.ident()?;
                let at = p.peek().cloned();
                let args = p.args()?;
                let at = at.expect("args consumed a token");
                arity("HybridGPUSchedule", &at, &args, 4, 4)?;
                let criteria = enum_arg(&args[0], |t| match t {
                    "INPUT_VERTEXSET_SIZE" | "VERTEXSET_SIZE" => Some(HybridCriteria::InputVertexsetSize),
                    _ => None,
                })?;
                let threshold = threshold_arg(&args[1])?;
                let pick = |t: &Token| match &t.tok {
                    Tok::Ident(n) => simple(&vars, n, t.line, t.col),
                    _ => Err(syntax(t.line, t.col, "expected schedule name")),
                };
                let (s1, s2) = (pick(&args[2])?, pick(&args[3])?);
                if vars.contains_key(&name) {
                    return Err(syntax(nl, nc, format!("{name} is already defined")));
                }
                vars.insert(
                    name,
                    Object::Hybrid(HybridSchedule {
                        criteria,
                        threshold,
                        s1,
                        s2,
                    }),
                );
            }
            "apply" | "program" => {
                if head == "program" {
                    p.punct("->")?;
                    let (f, fl, fc) = p.ident()?;
                    if f != "applyGPUSchedule" {
                        return Err(syntax(fl, fc, format!("unknown program function {f}")));
                    }
                }
                p.punct("(")?;
                let (ll, lc) = p.here();
                let label = p.string()?;
                p.punct(",")?;
                let (name, vl, vc) = p.ident()?;
                p.punct(")")?;
                let binding = match vars.get(&name) {
                    Some(Object::Simple(s)) => Binding::Simple(s.clone()),
                    Some(Object::Hybrid(h)) => Binding::Hybrid(h.clone()),
                    None => return Err(syntax(vl, vc, format!("undefined schedule {name}"))),
                };
                if program.get(&label).is_some() {
                    return Err(syntax(ll, lc, format!("label {label:?} bound twice")));
                }
                program.bind(&label, binding);
            }
            var => {
                p.punct(".")?;
                let (func, fl, fc) = p.ident()?;
                let args = p.args()?;
                let at = Token {
                    tok: Tok::Ident(func.clone()),
                    line: fl,
                    col: fc,
                };
                match vars.get_mut(var) {
                    Some(Object::Simple(s)) => apply_config(s, &func, &at, &args)?,
                    Some(Object::Hybrid(_)) => {
                        return Err(syntax(fl, fc, format!("{var} is a HybridGPUSchedule and has no {func}")))
                    }
                    None => return Err(syntax(hl, hc, format!("undefined schedule {var}"))),
                }
            }
        }
        p.punct(";")?;
    }
    Ok(program)
}
