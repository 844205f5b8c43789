//! Minimal s-expression reader with source positions. PDDL is
//! case-insensitive, so symbols are lowercased on the way in.

use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Symbol(..) => None,
        }
    }

    /// The leading symbol of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

/// Reads every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, PddlError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut symbol: Option<(String, Pos)> = None;

    fn flush(symbol: &mut Option<(String, Pos)>, stack: &mut [(Vec<SExpr>, Pos)], top: &mut Vec<SExpr>) {
        if let Some((s, p)) = symbol.take() {
            let e = SExpr::Symbol(s, p);
            match stack.last_mut() {
                Some((items, _)) => items.push(e),
                None => top.push(e),
            }
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        let pos = Pos { line, col };
        match c {
            '\n' => {
                flush(&mut symbol, &mut stack, &mut top);
                line += 1;
                col = 0;
            }
            ';' => {
                flush(&mut symbol, &mut stack, &mut top);
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                flush(&mut symbol, &mut stack, &mut top);
                stack.push((Vec::new(), pos));
            }
            ')' => {
                flush(&mut symbol, &mut stack, &mut top);
                let (items, open) = stack.pop().ok_or_else(|| syntax(pos, "unbalanced ')'"))?;
                let e = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
            }
            c if c.is_whitespace() => flush(&mut symbol, &mut stack, &mut top),
            c => match &mut symbol {
                Some((s, _)) => s.extend(c.to_lowercase()),
                None => symbol = Some((c.to_lowercase().collect(), pos)),
            },
        }
    }
    flush(&mut symbol, &mut stack, &mut top);
    if let Some((_, open)) = stack.last() {
        return Err(syntax(*open, "unclosed '('"));
    }
    Ok(top)
}

/// Reads exactly one top-level list.
pub fn parse_one(text: &str) -> Result<SExpr, PddlError> {
    let mut all = parse_all(text)?;
    match all.len() {
        0 => Err(syntax(Pos { line: 1, col: 1 }, "empty input")),
        1 => {
            let e = all.pop().unwrap();
            if e.as_list().is_none() {
                return Err(syntax(e.pos(), "expected '('"));
            }
            Ok(e)
        }
        _ => Err(syntax(all[1].pos(), "unexpected content after the definition")),
    }
}
