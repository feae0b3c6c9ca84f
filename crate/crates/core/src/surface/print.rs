//! Canonical pretty-printer. Output re-parses to the same core term.
//!
//! Binders get deterministic names from their de Bruijn level: `x0, x1, ...`
//! for term variables, `X0, ...` for type variables and `c0, ...` for
//! capture variables.

use crate::syntax::{
    Answer, Bound, Capture, CaptureSet, Depth, ExistType, Namespace, ShapeType, Term, Type, Value,
    Var,
};

/// Names of the variables free in the printed subject, outermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrintScope {
    term: Vec<String>,
    ty: Vec<String>,
    capt: Vec<String>,
}

impl PrintScope {
    pub fn new() -> Self {
        PrintScope::default()
    }

    pub fn with_names(term: &[&str], ty: &[&str], capt: &[&str]) -> Self {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        PrintScope {
            term: own(term),
            ty: own(ty),
            capt: own(capt),
        }
    }

    /// Scope whose binders carry the generated level names, matching what the
    /// printer itself would have chosen for enclosing binders.
    pub fn generated(depth: Depth) -> Self {
        PrintScope {
            term: (0..depth.term).map(|i| format!("x{i}")).collect(),
            ty: (0..depth.ty).map(|i| format!("X{i}")).collect(),
            capt: (0..depth.capt).map(|i| format!("c{i}")).collect(),
        }
    }

    fn stack(&self, ns: Namespace) -> &Vec<String> {
        match ns {
            Namespace::Term => &self.term,
            Namespace::Type => &self.ty,
            Namespace::Capt => &self.capt,
        }
    }

    fn stack_mut(&mut self, ns: Namespace) -> &mut Vec<String> {
        match ns {
            Namespace::Term => &mut self.term,
            Namespace::Type => &mut self.ty,
            Namespace::Capt => &mut self.capt,
        }
    }

    fn name(&self, ns: Namespace, index: usize) -> String {
        let stack = self.stack(ns);
        if index < stack.len() {
            stack[stack.len() - 1 - index].clone()
        } else {
            let prefix = match ns {
                Namespace::Term => "x",
                Namespace::Type => "X",
                Namespace::Capt => "c",
            };
            format!("{prefix}?{}", index - stack.len())
        }
    }

    fn taken(&self, name: &str) -> bool {
        self.term
            .iter()
            .chain(&self.ty)
            .chain(&self.capt)
            .any(|n| n == name)
    }

    fn push(&mut self, ns: Namespace) -> String {
        let prefix = match ns {
            Namespace::Term => "x",
            Namespace::Type => "X",
            Namespace::Capt => "c",
        };
        let mut level = self.stack(ns).len();
        let mut name = format!("{prefix}{level}");
        while self.taken(&name) {
            level += 1;
            name = format!("{prefix}{level}");
        }
        self.stack_mut(ns).push(name.clone());
        name
    }

    fn pop(&mut self, ns: Namespace) {
        self.stack_mut(ns).pop();
    }
}

pub fn print_term(t: &Term) -> String {
    print_term_in(&PrintScope::new(), t)
}

pub fn print_term_in(scope: &PrintScope, t: &Term) -> String {
    let mut p = Printer {
        scope: scope.clone(),
        out: String::new(),
    };
    p.term(t);
    p.out
}

pub fn print_exist_type(e: &ExistType) -> String {
    print_exist_type_in(&PrintScope::new(), e)
}

pub fn print_exist_type_in(scope: &PrintScope, e: &ExistType) -> String {
    let mut p = Printer {
        scope: scope.clone(),
        out: String::new(),
    };
    p.etype(e);
    p.out
}

pub fn print_type_in(scope: &PrintScope, t: &Type) -> String {
    let mut p = Printer {
        scope: scope.clone(),
        out: String::new(),
    };
    p.type_(t);
    p.out
}

pub fn print_shape_in(scope: &PrintScope, s: &ShapeType) -> String {
    let mut p = Printer {
        scope: scope.clone(),
        out: String::new(),
    };
    p.shape(s);
    p.out
}

pub fn print_captures_in(scope: &PrintScope, c: &CaptureSet) -> String {
    let mut p = Printer {
        scope: scope.clone(),
        out: String::new(),
    };
    p.captset(c);
    p.out
}

pub fn print_bound_in(scope: &PrintScope, b: &Bound) -> String {
    let mut p = Printer {
        scope: scope.clone(),
        out: String::new(),
    };
    p.bound(b);
    p.out
}

struct Printer {
    scope: PrintScope,
    out: String,
}

impl Printer {
    fn var(&mut self, v: &Var) {
        match v {
            Var::Bound(i) => {
                let n = self.scope.name(Namespace::Term, *i);
                self.out.push_str(&n);
            }
            Var::Loc(l) => self.out.push_str(&l.to_string()),
        }
    }

    fn captset(&mut self, c: &CaptureSet) {
        self.out.push('{');
        for (k, atom) in c.iter().enumerate() {
            if k > 0 {
                self.out.push_str(", ");
            }
            match atom {
                Capture::TermVar(i) => {
                    let n = self.scope.name(Namespace::Term, *i);
                    self.out.push_str(&n)
                }
                Capture::CaptVar(i) => {
                    let n = self.scope.name(Namespace::Capt, *i);
                    self.out.push_str(&n)
                }
                Capture::Loc(l) => self.out.push_str(&l.to_string()),
            }
        }
        self.out.push('}');
    }

    fn bound(&mut self, b: &Bound) {
        match b {
            Bound::Star => self.out.push('*'),
            Bound::Set(c) => self.captset(c),
        }
    }

    fn shape(&mut self, s: &ShapeType) {
        match s {
            ShapeType::Top => self.out.push_str("Top"),
            ShapeType::TVar(i) => {
                let n = self.scope.name(Namespace::Type, *i);
                self.out.push_str(&n)
            }
            ShapeType::Fun(param, result) => {
                self.out.push_str("forall (");
                let name = self.scope.push(Namespace::Term);
                // the parameter type lives outside the binder
                self.scope.pop(Namespace::Term);
                self.out.push_str(&name);
                self.out.push_str(": ");
                self.type_(param);
                self.out.push_str(") ");
                self.scope.stack_mut(Namespace::Term).push(name);
                self.etype(result);
                self.scope.pop(Namespace::Term);
            }
            ShapeType::TFun(bound, result) => {
                self.out.push_str("forall [");
                let name = self.scope.push(Namespace::Type);
                self.scope.pop(Namespace::Type);
                self.out.push_str(&name);
                self.out.push_str(" <: ");
                self.shape(bound);
                self.out.push_str("] ");
                self.scope.stack_mut(Namespace::Type).push(name);
                self.etype(result);
                self.scope.pop(Namespace::Type);
            }
            ShapeType::CFun(bound, result) => {
                self.out.push_str("forall [");
                let name = self.scope.push(Namespace::Capt);
                self.scope.pop(Namespace::Capt);
                self.out.push_str(&name);
                self.out.push_str(" <: ");
                self.bound(bound);
                self.out.push_str("] ");
                self.scope.stack_mut(Namespace::Capt).push(name);
                self.etype(result);
                self.scope.pop(Namespace::Capt);
            }
        }
    }

    fn type_(&mut self, t: &Type) {
        if t.captures.is_empty() {
            self.shape(&t.shape);
            return;
        }
        let wrap = matches!(
            t.shape,
            ShapeType::Fun(..) | ShapeType::TFun(..) | ShapeType::CFun(..)
        );
        if wrap {
            self.out.push('(');
        }
        self.shape(&t.shape);
        if wrap {
            self.out.push(')');
        }
        self.out.push('^');
        self.captset(&t.captures);
    }

    fn etype(&mut self, e: &ExistType) {
        match e {
            ExistType::Plain(t) => self.type_(t),
            ExistType::Exists(t) => {
                let name = self.scope.push(Namespace::Capt);
                self.out.push_str("exists ");
                self.out.push_str(&name);
                self.out.push_str(". ");
                self.type_(t);
                self.scope.pop(Namespace::Capt);
            }
        }
    }

    fn binder_body(&mut self, ns: Namespace, body: &Term) {
        self.term(body);
        self.scope.pop(ns);
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::Ans(Answer::Var(v)) => self.var(v),
            Term::Ans(Answer::Val(v)) => self.value(v),
            Term::App(f, x) => {
                self.var(f);
                self.out.push(' ');
                self.var(x);
            }
            Term::TApp(f, s) => {
                self.var(f);
                self.out.push('[');
                self.shape(s);
                self.out.push(']');
            }
            Term::CApp(f, c) => {
                self.var(f);
                self.out.push('[');
                self.captset(c);
                self.out.push(']');
            }
            Term::Let(bound, body) => {
                self.out.push_str("let ");
                let name = self.scope.push(Namespace::Term);
                self.scope.pop(Namespace::Term);
                self.out.push_str(&name);
                self.out.push_str(" = ");
                self.term(bound);
                self.out.push_str(" in ");
                self.scope.stack_mut(Namespace::Term).push(name);
                self.binder_body(Namespace::Term, body);
            }
            Term::LetEx(bound, body) => {
                self.out.push_str("let <");
                let c = self.scope.push(Namespace::Capt);
                let x = self.scope.push(Namespace::Term);
                self.scope.pop(Namespace::Term);
                self.scope.pop(Namespace::Capt);
                self.out.push_str(&c);
                self.out.push_str(", ");
                self.out.push_str(&x);
                self.out.push_str("> = ");
                self.term(bound);
                self.out.push_str(" in ");
                self.scope.stack_mut(Namespace::Capt).push(c);
                self.scope.stack_mut(Namespace::Term).push(x);
                self.term(body);
                self.scope.pop(Namespace::Term);
                self.scope.pop(Namespace::Capt);
            }
        }
    }

    fn value(&mut self, v: &Value) {
        match v {
            Value::Lam(param, body) => {
                self.out.push_str("fun (");
                let name = self.scope.push(Namespace::Term);
                self.scope.pop(Namespace::Term);
                self.out.push_str(&name);
                self.out.push_str(": ");
                self.type_(param);
                self.out.push_str(") => ");
                self.scope.stack_mut(Namespace::Term).push(name);
                self.binder_body(Namespace::Term, body);
            }
            Value::TLam(bound, body) => {
                self.out.push_str("fun [");
                let name = self.scope.push(Namespace::Type);
                self.scope.pop(Namespace::Type);
                self.out.push_str(&name);
                self.out.push_str(" <: ");
                self.shape(bound);
                self.out.push_str("] => ");
                self.scope.stack_mut(Namespace::Type).push(name);
                self.binder_body(Namespace::Type, body);
            }
            Value::CLam(bound, body) => {
                self.out.push_str("fun [");
                let name = self.scope.push(Namespace::Capt);
                self.scope.pop(Namespace::Capt);
                self.out.push_str(&name);
                self.out.push_str(" <: ");
                self.bound(bound);
                self.out.push_str("] => ");
                self.scope.stack_mut(Namespace::Capt).push(name);
                self.binder_body(Namespace::Capt, body);
            }
            Value::Pack(set, x) => {
                self.out.push('<');
                self.captset(set);
                self.out.push_str(", ");
                self.var(x);
                self.out.push('>');
            }
        }
    }
}
