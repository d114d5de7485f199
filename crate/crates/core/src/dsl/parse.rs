use super::{BinOp, Exponent, Expr, Func, ParseError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        let tok = match ch {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{00b7}' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                let end = scan_number(text, pos);
                let lit = &text[pos..end];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: pos,
                    message: format!("malformed number `{lit}`"),
                })?;
                if !v.is_finite() {
                    return Err(ParseError::Syntax {
                        offset: pos,
                        message: format!("number `{lit}` is not finite"),
                    });
                }
                while chars.peek().is_some_and(|&(p, _)| p < end) {
                    chars.next();
                }
                out.push((Tok::Num(v), pos));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = pos;
                while let Some(&(p, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() {
                        end = p + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(text[pos..end].to_string()), pos));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        out.push((tok, pos));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn scan_number(text: &str, start: usize) -> usize {
    let b = text.as_bytes();
    let mut i = start;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

pub(super) fn reduce_exponent(num: i32, den: i32) -> Option<Exponent> {
    if den == 0 {
        return None;
    }
    let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i32;
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    match d {
        1 | 2 => Some(Exponent { num: n, den: d as u8 }),
        _ => None,
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(super) struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    pub(super) fn new(text: &str, dim: usize) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            dim,
        })
    }

    pub(super) fn parse(mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::End {
            return Err(self.error("empty expression"));
        }
        let e = self.expr()?;
        if self.peek() != &Tok::End {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let start = self.offset();
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = self.rational()?;
        if !exp.is_integer() && !base.nonnegative_on_reals() {
            return Err(ParseError::Syntax {
                offset: start,
                message: "half-integer power of a base that is not provably non-negative on real arguments; enter branch-sensitive factors pre-factored".into(),
            });
        }
        Ok(Expr::Pow(Box::new(base), exp))
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) if v.fract() == 0.0 && v <= f64::from(i32::MAX) => {
                self.bump();
                let n = v as i32;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.error("expected integer exponent")),
        }
    }

    fn rational(&mut self) -> Result<Exponent, ParseError> {
        let at = self.offset();
        let (num, den) = if *self.peek() == Tok::LParen {
            self.bump();
            let num = self.integer()?;
            let den = if *self.peek() == Tok::Slash {
                self.bump();
                self.integer()?
            } else {
                1
            };
            self.expect(Tok::RParen, "`)` closing the exponent")?;
            (num, den)
        } else {
            (self.integer()?, 1)
        };
        reduce_exponent(num, den).ok_or_else(|| ParseError::Syntax {
            offset: at,
            message: "only integer and half-integer powers are supported".into(),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.atom()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, at),
            Tok::End => Err(ParseError::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
            _ => Err(ParseError::Syntax {
                offset: at,
                message: "expected a number, variable, function or `(`".into(),
            }),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "i" => return Ok(Expr::Imag),
            "abs2" | "normx2" => {
                let arg = if name == "abs2" { "k" } else { "x" };
                self.expect(Tok::LParen, "`(`")?;
                match self.bump() {
                    Tok::Ident(a) if a == arg => {}
                    _ => {
                        return Err(ParseError::Syntax {
                            offset: at,
                            message: format!("{name} takes the vector `{arg}` as its argument"),
                        })
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                return Ok(if name == "abs2" { Expr::Abs2 } else { Expr::NormX2 });
            }
            "exp" | "sqrt" => {
                let func = if name == "exp" { Func::Exp } else { Func::Sqrt };
                self.expect(Tok::LParen, "`(`")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::Call(func, Box::new(e)));
            }
            _ => {}
        }
        let (head, digits) = name.split_at(1);
        if (head == "x" || head == "k") && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            let idx: usize = digits.parse().unwrap_or(usize::MAX);
            if idx == 0 || idx > self.dim {
                return Err(ParseError::Dimension {
                    name,
                    offset: at,
                    dim: self.dim,
                });
            }
            return Ok(if head == "x" { Expr::X(idx) } else { Expr::K(idx) });
        }
        Err(ParseError::Syntax {
            offset: at,
            message: format!("unknown identifier `{name}`"),
        })
    }
}
