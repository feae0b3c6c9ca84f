use std::collections::BTreeMap;
use std::sync::Arc;

use crate::syntax::{Bound, Capture, CaptureSet, Depth, Loc, Namespace, ShapeType, Syntax, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Binding {
    Term(Type),
    Type(ShapeType),
    Capt(Bound),
}

impl Binding {
    pub fn namespace(&self) -> Namespace {
        match self {
            Binding::Term(_) => Namespace::Term,
            Binding::Type(_) => Namespace::Type,
            Binding::Capt(_) => Namespace::Capt,
        }
    }

    fn shifted_all(&self, by: Depth) -> Binding {
        match self {
            Binding::Term(t) => Binding::Term(t.shifted_all(by)),
            Binding::Type(s) => Binding::Type(s.shifted_all(by)),
            Binding::Capt(b) => Binding::Capt(b.shifted_all(by)),
        }
    }
}

/// Types of store locations. Every annotation is closed apart from
/// locations, so it never needs shifting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocationContext {
    entries: BTreeMap<Loc, Type>,
}

impl LocationContext {
    pub fn new() -> Self {
        LocationContext::default()
    }

    pub fn get(&self, loc: Loc) -> Option<&Type> {
        self.entries.get(&loc)
    }

    pub fn insert(&mut self, loc: Loc, ty: Type) {
        self.entries.insert(loc, ty);
    }

    pub fn contains(&self, loc: Loc) -> bool {
        self.entries.contains_key(&loc)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Loc, &Type)> + '_ {
        self.entries.iter().map(|(l, t)| (*l, t))
    }

    /// The entries allocated before `loc`.
    pub fn before(&self, loc: Loc) -> LocationContext {
        LocationContext {
            entries: self
                .entries
                .range(..loc)
                .map(|(l, t)| (*l, t.clone()))
                .collect(),
        }
    }
}

/// What `let` does with a result type that mentions its own binder.
///
/// `Strict` rejects it. `Widen` first replaces covariant occurrences of the
/// binder by the captures of its type (`{x} <: captures(T)` by sc-var), which
/// is what a declarative derivation gets from subsumption; only contravariant
/// occurrences are then rejected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Avoidance {
    #[default]
    Strict,
    Widen,
}

#[derive(Debug)]
struct Node {
    binding: Binding,
    parent: Option<Arc<Node>>,
    depth: Depth,
}

/// Typing context `Γ`: an immutable, persistently shared list of bindings
/// (innermost last) plus the ambient location typing.
#[derive(Clone, Debug, Default)]
pub struct TypeContext {
    head: Option<Arc<Node>>,
    locations: Arc<LocationContext>,
    avoidance: Avoidance,
}

impl TypeContext {
    pub fn empty() -> Self {
        TypeContext::default()
    }

    pub fn with_locations(locations: Arc<LocationContext>) -> Self {
        TypeContext {
            head: None,
            locations,
            avoidance: Avoidance::Strict,
        }
    }

    pub fn with_avoidance(mut self, avoidance: Avoidance) -> Self {
        self.avoidance = avoidance;
        self
    }

    pub fn avoidance(&self) -> Avoidance {
        self.avoidance
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = Binding>) -> Self {
        bindings
            .into_iter()
            .fold(TypeContext::empty(), |ctx, b| ctx.push(b))
    }

    pub fn push(&self, binding: Binding) -> TypeContext {
        let depth = self.depth().enter(binding.namespace());
        TypeContext {
            head: Some(Arc::new(Node {
                binding,
                parent: self.head.clone(),
                depth,
            })),
            locations: self.locations.clone(),
            avoidance: self.avoidance,
        }
    }

    pub fn push_term(&self, t: Type) -> TypeContext {
        self.push(Binding::Term(t))
    }

    pub fn push_type(&self, s: ShapeType) -> TypeContext {
        self.push(Binding::Type(s))
    }

    pub fn push_capt(&self, b: Bound) -> TypeContext {
        self.push(Binding::Capt(b))
    }

    /// Number of bindings per namespace.
    pub fn depth(&self) -> Depth {
        self.head.as_ref().map(|n| n.depth).unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        let d = self.depth();
        d.term + d.ty + d.capt
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_none()
    }

    pub fn locations(&self) -> &LocationContext {
        &self.locations
    }

    pub fn location(&self, loc: Loc) -> Option<&Type> {
        self.locations.get(loc)
    }

    /// Bindings outermost first, each as written (relative to its prefix).
    pub fn bindings(&self) -> Vec<Binding> {
        let mut out = Vec::new();
        let mut cur = self.head.as_deref();
        while let Some(n) = cur {
            out.push(n.binding.clone());
            cur = n.parent.as_deref();
        }
        out.reverse();
        out
    }

    /// The `index`-th most recent binding of `ns`, with its annotation
    /// shifted into the full context.
    pub fn lookup(&self, ns: Namespace, index: usize) -> Option<Binding> {
        let full = self.depth();
        let mut seen = 0;
        let mut cur = self.head.as_deref();
        while let Some(n) = cur {
            if n.binding.namespace() == ns {
                if seen == index {
                    let prefix = n.parent.as_ref().map(|p| p.depth).unwrap_or_default();
                    let by = Depth {
                        term: full.term - prefix.term,
                        ty: full.ty - prefix.ty,
                        capt: full.capt - prefix.capt,
                    };
                    return Some(n.binding.shifted_all(by));
                }
                seen += 1;
            }
            cur = n.parent.as_deref();
        }
        None
    }

    pub fn lookup_term(&self, index: usize) -> Option<Type> {
        match self.lookup(Namespace::Term, index)? {
            Binding::Term(t) => Some(t),
            _ => None,
        }
    }

    pub fn lookup_type(&self, index: usize) -> Option<ShapeType> {
        match self.lookup(Namespace::Type, index)? {
            Binding::Type(s) => Some(s),
            _ => None,
        }
    }

    pub fn lookup_capt(&self, index: usize) -> Option<Bound> {
        match self.lookup(Namespace::Capt, index)? {
            Binding::Capt(b) => Some(b),
            _ => None,
        }
    }

    /// Every atom with a concrete upper bound usable by `sc-var` or
    /// `sc-bound`, with that bound expressed in the full context. Capture
    /// variables bounded by `*` have none.
    pub fn capture_bounds(&self) -> Vec<(Capture, CaptureSet)> {
        let full = self.depth();
        let mut out = Vec::new();
        let mut cur = self.head.as_deref();
        while let Some(n) = cur {
            let prefix = n.parent.as_ref().map(|p| p.depth).unwrap_or_default();
            let by = Depth {
                term: full.term - prefix.term,
                ty: full.ty - prefix.ty,
                capt: full.capt - prefix.capt,
            };
            match &n.binding {
                Binding::Term(t) => {
                    out.push((Capture::TermVar(by.term - 1), t.captures.shifted_all(by)));
                }
                Binding::Capt(Bound::Set(c)) => {
                    out.push((Capture::CaptVar(by.capt - 1), c.shifted_all(by)));
                }
                Binding::Capt(Bound::Star) | Binding::Type(_) => {}
            }
            cur = n.parent.as_deref();
        }
        for (loc, ty) in self.locations.iter() {
            out.push((Capture::Loc(loc), ty.captures.clone()));
        }
        out
    }
}
