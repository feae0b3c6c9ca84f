use super::ast::*;
use super::diagnostic::{Diagnostic, Span};
use super::lexer::{lex, Tok, Token};

pub fn parse(source: &str) -> Result<SurfaceProgram, Vec<Diagnostic>> {
    let tokens = lex(source).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, pos: 0 };
    p.program().map_err(|d| vec![d])
}

/// Parses a standalone type, mostly for tests and tooling.
pub fn parse_exist_type(source: &str) -> Result<ExistExpr, Vec<Diagnostic>> {
    let tokens = lex(source).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, pos: 0 };
    let t = p.etype().map_err(|d| vec![d])?;
    p.expect(Tok::Eof).map_err(|d| vec![d])?;
    Ok(t)
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let code = if *self.peek() == Tok::Eof {
            "E0003"
        } else {
            "E0002"
        };
        Diagnostic::error(
            code,
            format!("expected {wanted}, found {}", self.peek()),
            self.span(),
        )
    }

    fn lower(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Lower(name) => Ok(Ident {
                name,
                span: self.bump().span,
            }),
            _ => Err(self.unexpected("a lowercase identifier")),
        }
    }

    fn upper(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Upper(name) => Ok(Ident {
                name,
                span: self.bump().span,
            }),
            _ => Err(self.unexpected("a type variable")),
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Lower(name) => Ok(Name::Ident(Ident {
                name,
                span: self.bump().span,
            })),
            Tok::Upper(name) => Ok(Name::Ident(Ident {
                name,
                span: self.bump().span,
            })),
            Tok::Loc(n) => Ok(Name::Loc(n, self.bump().span)),
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn program(&mut self) -> PResult<SurfaceProgram> {
        let mut decls = Vec::new();
        while *self.peek() == Tok::Val {
            let start = self.bump().span;
            let name = self.lower()?;
            self.expect(Tok::Eq)?;
            let value = self.term()?;
            let end = self.expect(Tok::Semi)?;
            decls.push(Decl {
                name,
                value,
                span: start.to(end),
            });
        }
        if *self.peek() == Tok::Eof {
            return Err(Diagnostic::error(
                "E0003",
                "expected a term, found end of input",
                self.span(),
            ));
        }
        let main = self.term()?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(SurfaceProgram { decls, main })
    }

    fn term(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Let => {
                self.bump();
                if self.eat(&Tok::Lt) {
                    let c = self.lower()?;
                    self.expect(Tok::Comma)?;
                    let x = self.lower()?;
                    self.expect(Tok::Gt)?;
                    if c.name == x.name {
                        return Err(Diagnostic::error(
                            "E0004",
                            format!("duplicate binder `{}` in existential pattern", x.name),
                            x.span,
                        ));
                    }
                    self.expect(Tok::Eq)?;
                    let bound = self.term()?;
                    self.expect(Tok::In)?;
                    let body = self.term()?;
                    let span = start.to(body.span);
                    Ok(Expr {
                        kind: ExprKind::LetEx(c, x, Box::new(bound), Box::new(body)),
                        span,
                    })
                } else {
                    let x = self.lower()?;
                    self.expect(Tok::Eq)?;
                    let bound = self.term()?;
                    self.expect(Tok::In)?;
                    let body = self.term()?;
                    let span = start.to(body.span);
                    Ok(Expr {
                        kind: ExprKind::Let(x, Box::new(bound), Box::new(body)),
                        span,
                    })
                }
            }
            Tok::Fun | Tok::Lt => self.value(),
            Tok::Lower(_) | Tok::Loc(_) => {
                let head = self.name()?;
                match self.peek().clone() {
                    Tok::Lower(_) | Tok::Loc(_) => {
                        let arg = self.name()?;
                        let span = start.to(arg.span());
                        Ok(Expr {
                            kind: ExprKind::App(head, arg),
                            span,
                        })
                    }
                    Tok::LBracket => {
                        self.bump();
                        if *self.peek() == Tok::LBrace {
                            let set = self.captset()?;
                            let end = self.expect(Tok::RBracket)?;
                            Ok(Expr {
                                kind: ExprKind::CApp(head, set),
                                span: start.to(end),
                            })
                        } else {
                            let shape = self.shape()?;
                            let end = self.expect(Tok::RBracket)?;
                            Ok(Expr {
                                kind: ExprKind::TApp(head, shape),
                                span: start.to(end),
                            })
                        }
                    }
                    _ => Ok(Expr {
                        span: head.span(),
                        kind: ExprKind::Var(head),
                    }),
                }
            }
            Tok::Upper(_) => Err(Diagnostic::error(
                "E0002",
                "type variables cannot appear in term position",
                self.span(),
            )),
            _ => Err(self.unexpected("a term")),
        }
    }

    fn value(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.eat(&Tok::Lt) {
            let set = self.captset()?;
            self.expect(Tok::Comma)?;
            let x = self.name()?;
            let end = self.expect(Tok::Gt)?;
            return Ok(Expr {
                kind: ExprKind::Pack(set, x),
                span: start.to(end),
            });
        }
        self.expect(Tok::Fun)?;
        if self.eat(&Tok::LParen) {
            let x = self.lower()?;
            self.expect(Tok::Colon)?;
            let ty = self.type_expr()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Arrow)?;
            let body = self.term()?;
            let span = start.to(body.span);
            return Ok(Expr {
                kind: ExprKind::Lam(x, ty, Box::new(body)),
                span,
            });
        }
        self.expect(Tok::LBracket)?;
        match self.peek().clone() {
            Tok::Upper(_) => {
                let x = self.upper()?;
                self.expect(Tok::SubBound)?;
                let bound = self.shape()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Arrow)?;
                let body = self.term()?;
                let span = start.to(body.span);
                Ok(Expr {
                    kind: ExprKind::TLam(x, bound, Box::new(body)),
                    span,
                })
            }
            Tok::Lower(_) => {
                let c = self.lower()?;
                self.expect(Tok::SubBound)?;
                let bound = self.bound()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Arrow)?;
                let body = self.term()?;
                let span = start.to(body.span);
                Ok(Expr {
                    kind: ExprKind::CLam(c, bound, Box::new(body)),
                    span,
                })
            }
            _ => Err(self.unexpected("a type or capture variable")),
        }
    }

    fn captset(&mut self) -> PResult<CaptSet> {
        let start = self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        if *self.peek() != Tok::RBrace {
            items.push(self.name()?);
            while self.eat(&Tok::Comma) {
                items.push(self.name()?);
            }
        }
        let end = self.expect(Tok::RBrace)?;
        Ok(CaptSet {
            items,
            span: start.to(end),
        })
    }

    fn bound(&mut self) -> PResult<BoundExpr> {
        if *self.peek() == Tok::Star {
            Ok(BoundExpr::Star(self.bump().span))
        } else if *self.peek() == Tok::LBrace {
            Ok(BoundExpr::Set(self.captset()?))
        } else {
            Err(self.unexpected("`*` or a capture set"))
        }
    }

    fn shape(&mut self) -> PResult<Shape> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Top => Ok(Shape {
                kind: ShapeKind::Top,
                span: self.bump().span,
            }),
            Tok::Upper(_) => {
                let x = self.upper()?;
                Ok(Shape {
                    span: x.span,
                    kind: ShapeKind::Var(x),
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.shape()?;
                let end = self.expect(Tok::RParen)?;
                Ok(Shape {
                    kind: inner.kind,
                    span: start.to(end),
                })
            }
            Tok::Forall => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let x = self.lower()?;
                    self.expect(Tok::Colon)?;
                    let param = self.type_expr()?;
                    self.expect(Tok::RParen)?;
                    let result = self.etype()?;
                    let span = Span::new(start.start, self.prev_end());
                    return Ok(Shape {
                        kind: ShapeKind::Fun(x, Box::new(param), Box::new(result)),
                        span,
                    });
                }
                self.expect(Tok::LBracket)?;
                match self.peek().clone() {
                    Tok::Upper(_) => {
                        let x = self.upper()?;
                        self.expect(Tok::SubBound)?;
                        let bound = self.shape()?;
                        self.expect(Tok::RBracket)?;
                        let result = self.etype()?;
                        let span = Span::new(start.start, self.prev_end());
                        Ok(Shape {
                            kind: ShapeKind::TFun(x, Box::new(bound), Box::new(result)),
                            span,
                        })
                    }
                    Tok::Lower(_) => {
                        let c = self.lower()?;
                        self.expect(Tok::SubBound)?;
                        let bound = self.bound()?;
                        self.expect(Tok::RBracket)?;
                        let result = self.etype()?;
                        let span = Span::new(start.start, self.prev_end());
                        Ok(Shape {
                            kind: ShapeKind::CFun(c, bound, Box::new(result)),
                            span,
                        })
                    }
                    _ => Err(self.unexpected("a type or capture variable")),
                }
            }
            _ => Err(self.unexpected("a shape type")),
        }
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let shape = self.shape()?;
        let captures = if self.eat(&Tok::Caret) {
            Some(self.captset()?)
        } else {
            None
        };
        let span = match &captures {
            Some(c) => shape.span.to(c.span),
            None => shape.span,
        };
        Ok(TypeExpr {
            shape,
            captures,
            span,
        })
    }

    fn etype(&mut self) -> PResult<ExistExpr> {
        if self.eat(&Tok::Exists) {
            let c = self.lower()?;
            self.expect(Tok::Dot)?;
            let body = self.type_expr()?;
            Ok(ExistExpr::Exists(c, body))
        } else {
            Ok(ExistExpr::Plain(self.type_expr()?))
        }
    }
}
