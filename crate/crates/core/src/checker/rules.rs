use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value as Json};

use crate::surface::{print_captures_in, print_exist_type_in, PrintScope};
use crate::syntax::{CaptureSet, Depth, ExistType};

/// Every inference rule of the type system, by family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Var,
    Pack,
    Sub,
    Abs,
    App,
    TAbs,
    TApp,
    CAbs,
    CApp,
    Let,
    LetE,
    ScTrans,
    ScVar,
    ScBound,
    ScElem,
    ScSet,
    Top,
    Refl,
    Trans,
    TVar,
    Capt,
    Exist,
    Fun,
    TFun,
    CFun,
}

impl Rule {
    pub const TYPING: [Rule; 11] = [
        Rule::Var,
        Rule::Pack,
        Rule::Sub,
        Rule::Abs,
        Rule::App,
        Rule::TAbs,
        Rule::TApp,
        Rule::CAbs,
        Rule::CApp,
        Rule::Let,
        Rule::LetE,
    ];
    pub const SUBCAPTURING: [Rule; 5] = [
        Rule::ScTrans,
        Rule::ScVar,
        Rule::ScBound,
        Rule::ScElem,
        Rule::ScSet,
    ];
    pub const SUBTYPING: [Rule; 9] = [
        Rule::Top,
        Rule::Refl,
        Rule::Trans,
        Rule::TVar,
        Rule::Capt,
        Rule::Exist,
        Rule::Fun,
        Rule::TFun,
        Rule::CFun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Var => "var",
            Rule::Pack => "pack",
            Rule::Sub => "sub",
            Rule::Abs => "abs",
            Rule::App => "app",
            Rule::TAbs => "tabs",
            Rule::TApp => "tapp",
            Rule::CAbs => "cabs",
            Rule::CApp => "capp",
            Rule::Let => "let",
            Rule::LetE => "let-e",
            Rule::ScTrans => "sc-trans",
            Rule::ScVar => "sc-var",
            Rule::ScBound => "sc-bound",
            Rule::ScElem => "sc-elem",
            Rule::ScSet => "sc-set",
            Rule::Top => "top",
            Rule::Refl => "refl",
            Rule::Trans => "trans",
            Rule::TVar => "tvar",
            Rule::Capt => "capt",
            Rule::Exist => "exist",
            Rule::Fun => "fun",
            Rule::TFun => "tfun",
            Rule::CFun => "cfun",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::TYPING
            .iter()
            .chain(&Rule::SUBCAPTURING)
            .chain(&Rule::SUBTYPING)
            .copied()
            .find(|r| r.name() == name)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One node of a typing derivation. `side` lists the subcapturing and
/// subtyping rules used to discharge this node's side premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub use_set: CaptureSet,
    pub ty: ExistType,
    /// Binder counts of the context the node was derived in.
    pub scope: Depth,
    pub side: Vec<Rule>,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn rules(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<Rule>) {
        out.insert(self.rule);
        out.extend(self.side.iter().copied());
        for c in &self.children {
            c.collect(out);
        }
    }

    /// `{rule, useSet, type, side, children}`, with types printed under
    /// generated names for the enclosing binders.
    pub fn to_json(&self) -> Json {
        let scope = PrintScope::generated(self.scope);
        let side: BTreeSet<&str> = self.side.iter().map(|r| r.name()).collect();
        json!({
            "rule": self.rule.name(),
            "useSet": print_captures_in(&scope, &self.use_set),
            "type": print_exist_type_in(&scope, &self.ty),
            "side": side,
            "children": self.children.iter().map(Derivation::to_json).collect::<Vec<_>>(),
        })
    }

    /// Indented one-line-per-node rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        let scope = PrintScope::generated(self.scope);
        out.push_str(&"  ".repeat(indent));
        out.push_str(&format!(
            "({}) {} ; {}",
            self.rule,
            print_captures_in(&scope, &self.use_set),
            print_exist_type_in(&scope, &self.ty)
        ));
        if !self.side.is_empty() {
            let side: BTreeSet<&str> = self.side.iter().map(|r| r.name()).collect();
            out.push_str(&format!(
                "  [{}]",
                side.into_iter().collect::<Vec<_>>().join(", ")
            ));
        }
        out.push('\n');
        for c in &self.children {
            c.render_into(indent + 1, out);
        }
    }
}
