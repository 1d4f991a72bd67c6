//! Character cursor shared by the Turtle and N-Quads readers.

use super::RdfError;

pub(crate) struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    /// CRLF and lone CR are normalized to LF.
    pub fn new(text: &str) -> Self {
        let text = text.replace("\r\n", "\n").replace('\r', "\n");
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    pub fn starts_with_ignore_case(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|p| p.eq_ignore_ascii_case(&c)))
    }

    pub fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    pub fn position(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    pub fn error(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), RdfError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> RdfError {
        match self.peek() {
            Some(c) => self.error(format!("expected {wanted}, found '{}'", c.escape_debug())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    /// Skips whitespace (including newlines) and `#` comments.
    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
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

    /// Skips spaces and tabs only.
    pub fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    fn read_hex(&mut self, digits: usize) -> Result<char, RdfError> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.unexpected("hex digit"))?;
            self.bump();
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error(format!("invalid code point U+{value:X}")))
    }

    /// After a backslash: `uXXXX` or `UXXXXXXXX`.
    fn read_uchar(&mut self) -> Result<char, RdfError> {
        match self.bump() {
            Some('u') => self.read_hex(4),
            Some('U') => self.read_hex(8),
            _ => Err(self.error("invalid unicode escape")),
        }
    }

    /// Reads `<...>` and returns the unescaped content, unresolved.
    pub fn read_iriref(&mut self) -> Result<String, RdfError> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(out),
                Some('\\') => out.push(self.read_uchar()?),
                Some(c) if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error(format!("invalid character '{}' in IRI", c.escape_debug())))
                }
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
    }

    /// Reads a quoted string in any of the four Turtle forms. N-Quads callers
    /// pass `long_forms = false` to only accept `"..."`.
    pub fn read_string(&mut self, long_forms: bool) -> Result<String, RdfError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) if long_forms || q == '"' => q,
            _ => return Err(self.unexpected("string literal")),
        };
        let long = long_forms
            && self.peek_at(1) == Some(quote)
            && self.peek_at(2) == Some(quote);
        self.advance(if long { 3 } else { 1 });
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated string literal")),
                Some(c) if c == quote => {
                    if !long {
                        self.bump();
                        return Ok(out);
                    }
                    if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                        // A long string may end with up to two extra quotes
                        // before the closing triple.
                        let mut run = 0;
                        while self.peek_at(run) == Some(quote) {
                            run += 1;
                        }
                        if run > 5 {
                            return Err(self.error("too many quotes closing long string"));
                        }
                        for _ in 0..run - 3 {
                            out.push(quote);
                        }
                        self.advance(run);
                        return Ok(out);
                    }
                    self.bump();
                    out.push(c);
                }
                Some('\n') if !long => return Err(self.error("newline in short string literal")),
                Some('\\') => {
                    self.bump();
                    let escaped = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u' | 'U') => {
                            out.push(self.read_uchar()?);
                            continue;
                        }
                        _ => return Err(self.unexpected("escape sequence")),
                    };
                    self.bump();
                    out.push(escaped);
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    /// After '@': `[a-zA-Z]+ ('-' [a-zA-Z0-9]+)*`, lowercased.
    pub fn read_langtag(&mut self) -> Result<String, RdfError> {
        let mut tag = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphabetic) {
            tag.push(c);
            self.bump();
        }
        if tag.is_empty() {
            return Err(self.unexpected("language tag"));
        }
        while self.peek() == Some('-')
            && self.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric())
        {
            self.bump();
            tag.push('-');
            while let Some(c) = self.peek().filter(char::is_ascii_alphanumeric) {
                tag.push(c);
                self.bump();
            }
        }
        Ok(tag.to_ascii_lowercase())
    }

    /// After `_:`.
    pub fn read_bnode_label(&mut self) -> Result<String, RdfError> {
        let mut label = String::new();
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {
                label.push(c);
                self.bump();
            }
            _ => return Err(self.unexpected("blank node label")),
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) {
                label.push(c);
                self.bump();
            } else if c == '.' && self.peek_at(1).is_some_and(|n| is_pn_chars(n) || n == '.') {
                // '.' is allowed inside a label but never as its last character.
                let mut look = 1;
                while self.peek_at(look) == Some('.') {
                    look += 1;
                }
                if !self.peek_at(look).is_some_and(is_pn_chars) {
                    break;
                }
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(label)
    }
}

pub(crate) fn is_pn_chars_base(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c as u32,
            0xC0..=0xD6 | 0xD8..=0xF6 | 0xF8..=0x2FF | 0x370..=0x37D | 0x37F..=0x1FFF
            | 0x200C..=0x200D | 0x2070..=0x218F | 0x2C00..=0x2FEF | 0x3001..=0xD7FF
            | 0xF900..=0xFDCF | 0xFDF0..=0xFFFD | 0x10000..=0xEFFFF)
}

pub(crate) fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

pub(crate) fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c)
        || c == '-'
        || c.is_ascii_digit()
        || matches!(c as u32, 0xB7 | 0x300..=0x36F | 0x203F..=0x2040)
}
