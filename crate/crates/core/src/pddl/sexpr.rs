use super::PddlError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
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

    pub fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Symbol(..) => None,
        }
    }

    /// First element of a list when it is a symbol.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(SExpr::symbol)
    }
}

pub fn syntax(pos: Pos, msg: impl Into<String>) -> PddlError {
    PddlError::Syntax { line: pos.line, col: pos.col, msg: msg.into() }
}

/// Reads exactly one top-level expression. Symbols are lower-cased.
pub fn read(text: &str) -> Result<SExpr, PddlError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut result = None;
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut token = String::new();
    let mut token_pos = Pos::default();

    let flush = |token: &mut String, pos: Pos, stack: &mut Vec<(Vec<SExpr>, Pos)>, result: &mut Option<SExpr>| {
        if token.is_empty() {
            return Ok(());
        }
        let sym = SExpr::Symbol(token.to_lowercase(), pos);
        token.clear();
        match stack.last_mut() {
            Some((items, _)) => {
                items.push(sym);
                Ok(())
            }
            None if result.is_none() => Err(syntax(pos, "expected '(' at top level")),
            None => Err(syntax(pos, "trailing input after expression")),
        }
    };

    while let Some(c) = chars.next() {
        col += 1;
        let here = Pos { line, col };
        match c {
            ';' => {
                flush(&mut token, token_pos, &mut stack, &mut result)?;
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut result)?;
                if stack.is_empty() && result.is_some() {
                    return Err(syntax(here, "trailing input after expression"));
                }
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut result)?;
                let (items, pos) = stack.pop().ok_or_else(|| syntax(here, "unbalanced ')'"))?;
                let expr = SExpr::List(items, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(expr),
                    None => result = Some(expr),
                }
            }
            c if c.is_whitespace() => {
                flush(&mut token, token_pos, &mut stack, &mut result)?;
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => {
                if token.is_empty() {
                    token_pos = here;
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut result)?;
    if let Some((_, pos)) = stack.last() {
        return Err(syntax(*pos, "unclosed '('"));
    }
    result.ok_or_else(|| syntax(Pos { line, col }, "empty input"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let e = read("; c\n(Define (A b)\n  (c))").unwrap();
        let items = e.list().unwrap();
        assert_eq!(items[0].symbol(), Some("define"));
        assert_eq!(items[2].pos(), Pos { line: 3, col: 3 });
    }

    #[test]
    fn reports_unbalanced() {
        assert!(matches!(read("(a (b)"), Err(PddlError::Syntax { line: 1, col: 1, .. })));
        assert!(matches!(read("(a))"), Err(PddlError::Syntax { .. })));
        assert!(read("(a) (b)").is_err());
    }
}
