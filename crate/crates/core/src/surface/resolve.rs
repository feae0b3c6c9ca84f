//! Name resolution from the surface tree to the nameless core.

use super::ast::*;
use super::diagnostic::{Diagnostic, Span};
use crate::syntax::{
    Bound, Capture, CaptureSet, ExistType, Loc, Namespace, ShapeType, Term, Type, Value, Var,
};

pub fn resolve(program: &SurfaceProgram) -> Result<Term, Vec<Diagnostic>> {
    let mut r = Resolver::default();
    r.program(program);
    if r.errors.is_empty() {
        Ok(r.program_term.take().expect("resolved program"))
    } else {
        Err(r.errors)
    }
}

/// Resolves a standalone type in the empty scope.
pub fn resolve_exist_type(ty: &ExistExpr) -> Result<ExistType, Vec<Diagnostic>> {
    let mut r = Resolver::default();
    let t = r.etype(ty);
    if r.errors.is_empty() {
        Ok(t)
    } else {
        Err(r.errors)
    }
}

#[derive(Default)]
struct Resolver {
    scope: Vec<(String, Namespace)>,
    errors: Vec<Diagnostic>,
    program_term: Option<Term>,
}

impl Resolver {
    fn lookup(&self, name: &str) -> Option<(Namespace, usize)> {
        let (pos, ns) = self
            .scope
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (n, _))| n == name)
            .map(|(i, (_, ns))| (i, *ns))?;
        let index = self.scope[pos + 1..]
            .iter()
            .filter(|(_, n)| *n == ns)
            .count();
        Some((ns, index))
    }

    fn with<T>(&mut self, binders: &[(&Ident, Namespace)], f: impl FnOnce(&mut Self) -> T) -> T {
        for (id, ns) in binders {
            self.scope.push((id.name.clone(), *ns));
        }
        let out = f(self);
        for _ in binders {
            self.scope.pop();
        }
        out
    }

    fn unbound(&mut self, id: &Ident) {
        self.errors.push(Diagnostic::error(
            "E0101",
            format!("unbound variable `{}`", id.name),
            id.span,
        ));
    }

    fn kind_mismatch(&mut self, name: &str, span: Span, wanted: &str, found: Namespace) {
        self.errors.push(Diagnostic::error(
            "E0102",
            format!("`{name}` is a {found} variable but a {wanted} is expected here"),
            span,
        ));
    }

    fn program(&mut self, p: &SurfaceProgram) {
        fn go(r: &mut Resolver, decls: &[Decl], main: &Expr) -> Term {
            match decls.split_first() {
                None => r.term(main),
                Some((d, rest)) => {
                    let bound = r.term(&d.value);
                    let body = r.with(&[(&d.name, Namespace::Term)], |r| go(r, rest, main));
                    Term::let_(bound, body)
                }
            }
        }
        let t = go(self, &p.decls, &p.main);
        self.program_term = Some(t);
    }

    fn term_var(&mut self, name: &Name) -> Var {
        match name {
            Name::Loc(n, _) => Var::Loc(Loc(*n)),
            Name::Ident(id) => match self.lookup(&id.name) {
                Some((Namespace::Term, i)) => Var::Bound(i),
                Some((ns, _)) => {
                    self.kind_mismatch(&id.name, id.span, "term variable", ns);
                    Var::Bound(0)
                }
                None => {
                    self.unbound(id);
                    Var::Bound(0)
                }
            },
        }
    }

    fn captset(&mut self, set: &CaptSet) -> CaptureSet {
        let mut out = CaptureSet::empty();
        for item in &set.items {
            match item {
                Name::Loc(n, _) => {
                    out.insert(Capture::Loc(Loc(*n)));
                }
                Name::Ident(id) => match self.lookup(&id.name) {
                    Some((Namespace::Term, i)) => {
                        out.insert(Capture::TermVar(i));
                    }
                    Some((Namespace::Capt, i)) => {
                        out.insert(Capture::CaptVar(i));
                    }
                    Some((Namespace::Type, _)) => {
                        self.kind_mismatch(&id.name, id.span, "capture atom", Namespace::Type)
                    }
                    None if id.name.starts_with(|c: char| c.is_ascii_uppercase()) => {
                        self.kind_mismatch(&id.name, id.span, "capture atom", Namespace::Type)
                    }
                    None => self.unbound(id),
                },
            }
        }
        out
    }

    fn bound(&mut self, b: &BoundExpr) -> Bound {
        match b {
            BoundExpr::Star(_) => Bound::Star,
            BoundExpr::Set(s) => Bound::Set(self.captset(s)),
        }
    }

    fn shape(&mut self, s: &Shape) -> ShapeType {
        match &s.kind {
            ShapeKind::Top => ShapeType::Top,
            ShapeKind::Var(id) => match self.lookup(&id.name) {
                Some((Namespace::Type, i)) => ShapeType::TVar(i),
                Some((ns, _)) => {
                    self.kind_mismatch(&id.name, id.span, "type variable", ns);
                    ShapeType::Top
                }
                None => {
                    self.unbound(id);
                    ShapeType::Top
                }
            },
            ShapeKind::Fun(x, param, result) => {
                let param = self.type_expr(param);
                let result = self.with(&[(x, Namespace::Term)], |r| r.etype(result));
                ShapeType::Fun(Box::new(param), Box::new(result))
            }
            ShapeKind::TFun(x, bound, result) => {
                let bound = self.shape(bound);
                let result = self.with(&[(x, Namespace::Type)], |r| r.etype(result));
                ShapeType::TFun(Box::new(bound), Box::new(result))
            }
            ShapeKind::CFun(c, bound, result) => {
                let bound = self.bound(bound);
                let result = self.with(&[(c, Namespace::Capt)], |r| r.etype(result));
                ShapeType::CFun(bound, Box::new(result))
            }
        }
    }

    fn type_expr(&mut self, t: &TypeExpr) -> Type {
        let shape = self.shape(&t.shape);
        let captures = t
            .captures
            .as_ref()
            .map(|c| self.captset(c))
            .unwrap_or_default();
        Type::new(shape, captures)
    }

    fn etype(&mut self, e: &ExistExpr) -> ExistType {
        match e {
            ExistExpr::Exists(c, t) => {
                ExistType::Exists(self.with(&[(c, Namespace::Capt)], |r| r.type_expr(t)))
            }
            ExistExpr::Plain(t) => ExistType::Plain(self.type_expr(t)),
        }
    }

    fn term(&mut self, e: &Expr) -> Term {
        match &e.kind {
            ExprKind::Var(x) => Term::Ans(crate::syntax::Answer::Var(self.term_var(x))),
            ExprKind::Lam(x, ty, body) => {
                let ty = self.type_expr(ty);
                let body = self.with(&[(x, Namespace::Term)], |r| r.term(body));
                Term::lam(ty, body)
            }
            ExprKind::TLam(x, bound, body) => {
                let bound = self.shape(bound);
                let body = self.with(&[(x, Namespace::Type)], |r| r.term(body));
                Term::tlam(bound, body)
            }
            ExprKind::CLam(c, bound, body) => {
                let bound = self.bound(bound);
                let body = self.with(&[(c, Namespace::Capt)], |r| r.term(body));
                Term::clam(bound, body)
            }
            ExprKind::Pack(set, x) => Term::val(Value::Pack(self.captset(set), self.term_var(x))),
            ExprKind::App(f, x) => Term::App(self.term_var(f), self.term_var(x)),
            ExprKind::TApp(f, s) => Term::TApp(self.term_var(f), self.shape(s)),
            ExprKind::CApp(f, c) => Term::CApp(self.term_var(f), self.captset(c)),
            ExprKind::Let(x, bound, body) => {
                let bound = self.term(bound);
                let body = self.with(&[(x, Namespace::Term)], |r| r.term(body));
                Term::let_(bound, body)
            }
            ExprKind::LetEx(c, x, bound, body) => {
                let bound = self.term(bound);
                let body = self.with(&[(c, Namespace::Capt), (x, Namespace::Term)], |r| {
                    r.term(body)
                });
                Term::let_ex(bound, body)
            }
        }
    }
}
