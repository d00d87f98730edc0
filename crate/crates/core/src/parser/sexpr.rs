//! Tokenizer and s-expression reader with line/column spans.

use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub enum SExpr {
    Sym { text: String, span: SourceSpan },
    List { items: Vec<SExpr>, span: SourceSpan },
}

impl SExpr {
    pub fn span(&self) -> &SourceSpan {
        match self {
            SExpr::Sym { span, .. } | SExpr::List { span, .. } => span,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            SExpr::Sym { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Sym { .. } => None,
        }
    }

    /// Is this a symbol equal to `keyword`, ignoring ASCII case?
    pub fn is_keyword(&self, keyword: &str) -> bool {
        self.as_sym().is_some_and(|s| s.eq_ignore_ascii_case(keyword))
    }

    /// Is this a list whose head symbol is `keyword`?
    pub fn is_form(&self, keyword: &str) -> bool {
        self.as_list()
            .and_then(|items| items.first())
            .is_some_and(|head| head.is_keyword(keyword))
    }
}

/// Reads exactly one top-level form; anything but whitespace and comments after it is an error.
pub fn read_one(text: &str) -> Result<SExpr, ParseError> {
    let mut reader = Reader::new(text);
    reader.skip_trivia();
    let form = match reader.peek() {
        None => {
            return Err(ParseError::new(
                reader.span(),
                ParseErrorKind::Syntax,
                "expected a form, found end of input",
            ))
        }
        Some(_) => reader.read()?,
    };
    reader.skip_trivia();
    match reader.peek() {
        None => Ok(form),
        Some(')') => Err(ParseError::new(
            reader.span(),
            ParseErrorKind::Syntax,
            "unbalanced parenthesis: unexpected `)`",
        )),
        Some(_) => Err(ParseError::new(
            reader.span(),
            ParseErrorKind::Syntax,
            "unexpected input after the top-level form",
        )),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn span(&self) -> SourceSpan {
        SourceSpan::new(self.line, self.column)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<SExpr, ParseError> {
        let start = self.span();
        match self.peek() {
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => {
                            return Err(ParseError::new(
                                start,
                                ParseErrorKind::Syntax,
                                "unbalanced parenthesis: `(` is never closed",
                            ))
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List { items, span: start });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(ParseError::new(
                start,
                ParseErrorKind::Syntax,
                "unbalanced parenthesis: unexpected `)`",
            )),
            Some(_) => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(SExpr::Sym { text, span: start })
            }
            None => Err(ParseError::new(
                start,
                ParseErrorKind::Syntax,
                "unexpected end of input",
            )),
        }
    }
}
