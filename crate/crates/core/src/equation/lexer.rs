use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Equals,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut push = |token: Token| {
            out.push(Spanned {
                token,
                line: start_line,
                column: start_col,
            })
        };
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '+' => push(Token::Plus),
            '-' | '\u{2212}' => push(Token::Minus),
            '*' => push(Token::Star),
            '/' => push(Token::Slash),
            '^' => push(Token::Caret),
            '(' => push(Token::LParen),
            ')' => push(Token::RParen),
            '[' => push(Token::LBracket),
            ']' => push(Token::RBracket),
            '=' => push(Token::Equals),
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, only when followed by a digit (so `2e` stays `2 * e`)
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let literal: String = chars[start..i].iter().collect();
                if literal == "." || literal.matches('.').count() > 1 {
                    return Err(ParseError::new(start_line, start_col, format!("malformed number `{literal}`")));
                }
                push(Token::Number(literal));
                column += i - start;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let ident: String = chars[start..i].iter().collect();
                push(Token::Ident(ident));
                column += i - start;
                continue;
            }
            other => {
                return Err(ParseError::new(line, column, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
        column += 1;
    }
    out.push(Spanned {
        token: Token::Eof,
        line,
        column,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_identifiers() {
        let toks: Vec<Token> = tokenize("2.5e-3*sigma^2[y]").unwrap().into_iter().map(|s| s.token).collect();
        assert_eq!(
            toks,
            vec![
                Token::Number("2.5e-3".into()),
                Token::Star,
                Token::Ident("sigma".into()),
                Token::Caret,
                Token::Number("2".into()),
                Token::LBracket,
                Token::Ident("y".into()),
                Token::RBracket,
                Token::Eof
            ]
        );
    }

    #[test]
    fn trailing_e_is_not_an_exponent() {
        let toks: Vec<Token> = tokenize("2e").unwrap().into_iter().map(|s| s.token).collect();
        assert_eq!(toks, vec![Token::Number("2".into()), Token::Ident("e".into()), Token::Eof]);
    }

    #[test]
    fn positions_are_tracked() {
        let err = tokenize("y +\n  $").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }
}
