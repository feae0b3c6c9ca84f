//! Named surface syntax with source spans.

use super::diagnostic::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// A variable reference in term or capture-set position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Name {
    Ident(Ident),
    Loc(usize, Span),
}

impl Name {
    pub fn span(&self) -> Span {
        match self {
            Name::Ident(i) => i.span,
            Name::Loc(_, s) => *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaptSet {
    pub items: Vec<Name>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundExpr {
    Star(Span),
    Set(CaptSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub kind: ShapeKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Top,
    Var(Ident),
    Fun(Ident, Box<TypeExpr>, Box<ExistExpr>),
    TFun(Ident, Box<Shape>, Box<ExistExpr>),
    CFun(Ident, BoundExpr, Box<ExistExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeExpr {
    pub shape: Shape,
    pub captures: Option<CaptSet>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExistExpr {
    Exists(Ident, TypeExpr),
    Plain(TypeExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(Name),
    Lam(Ident, TypeExpr, Box<Expr>),
    TLam(Ident, Shape, Box<Expr>),
    CLam(Ident, BoundExpr, Box<Expr>),
    Pack(CaptSet, Name),
    App(Name, Name),
    TApp(Name, Shape),
    CApp(Name, CaptSet),
    Let(Ident, Box<Expr>, Box<Expr>),
    LetEx(Ident, Ident, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: Ident,
    pub value: Expr,
    pub span: Span,
}

/// A parsed `.capless` file: optional `val name = term;` declarations
/// followed by the main term. Declarations behave like enclosing lets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceProgram {
    pub decls: Vec<Decl>,
    pub main: Expr,
}

impl SurfaceProgram {
    /// Span of the sub-term reached by following `path` through the core
    /// term this program resolves to. Child numbering: lambda bodies are
    /// child 0; let and existential let have the bound term at 0 and the
    /// body at 1. Stops at the deepest node the path still describes.
    pub fn span_at(&self, path: &[usize]) -> Span {
        let mut path = path;
        for decl in &self.decls {
            match path.split_first() {
                None => return decl.span,
                Some((0, rest)) => return decl.value.span_at(rest),
                Some((_, rest)) => path = rest,
            }
        }
        self.main.span_at(path)
    }
}

impl Expr {
    pub fn span_at(&self, path: &[usize]) -> Span {
        let Some((&first, rest)) = path.split_first() else {
            return self.span;
        };
        match (&self.kind, first) {
            (ExprKind::Lam(_, _, body), 0)
            | (ExprKind::TLam(_, _, body), 0)
            | (ExprKind::CLam(_, _, body), 0) => body.span_at(rest),
            (ExprKind::Let(_, t, _), 0) | (ExprKind::LetEx(_, _, t, _), 0) => t.span_at(rest),
            (ExprKind::Let(_, _, u), 1) | (ExprKind::LetEx(_, _, _, u), 1) => u.span_at(rest),
            _ => self.span,
        }
    }
}
