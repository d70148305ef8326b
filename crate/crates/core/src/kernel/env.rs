use std::collections::HashMap;
use std::sync::Arc;

use crate::term::{Name, Sort, Telescope, Term};
use crate::universe::{Constraint, ConstraintSet, Level, LevelAllocator};

/// Names the kernel reserves for built-in equality.
pub const BUILTIN_NAMES: [&str; 3] = ["eq", "refl", "eq_elim"];

#[derive(Clone, Debug)]
pub struct ConstantInfo {
    pub name: Name,
    pub ty: Term,
    /// `None` for parameters and axioms.
    pub body: Option<Term>,
}

#[derive(Clone, Debug)]
pub struct ConstructorDecl {
    pub name: Name,
    /// Constructor type in the context of the inductive's parameters.
    pub ty: Term,
}

#[derive(Clone, Debug)]
pub struct InductiveDescriptor {
    pub name: Name,
    pub params: Telescope,
    pub sort: Sort,
    pub ctors: Vec<ConstructorDecl>,
    /// Field names, for records.
    pub fields: Option<Vec<Name>>,
}

impl InductiveDescriptor {
    pub fn is_record(&self) -> bool {
        self.fields.is_some()
    }
}

/// A checked inductive together with everything derived from it.
#[derive(Clone, Debug)]
pub struct InductiveInfo {
    pub desc: InductiveDescriptor,
    /// `forall params, sort`
    pub ty: Term,
    /// Closed constructor types, `forall params args, I params`.
    pub ctor_types: Vec<Term>,
    /// Per constructor, per argument: `Some(k)` when the argument is recursive
    /// with `k` leading binders (`k = 0` for a direct occurrence).
    pub recursive_args: Vec<Vec<Option<usize>>>,
    /// Whether the recursor may target Type as well as Prop.
    pub large_elim: bool,
}

impl InductiveInfo {
    pub fn name(&self) -> &Name {
        &self.desc.name
    }

    pub fn num_params(&self) -> usize {
        self.desc.params.len()
    }

    pub fn num_ctors(&self) -> usize {
        self.desc.ctors.len()
    }

    pub fn ctor_arity(&self, ctor: usize) -> usize {
        self.recursive_args[ctor].len()
    }

    pub fn elim_name(&self) -> String {
        elim_name(&self.desc.name)
    }

    /// Arguments a recursor needs before it can fire: parameters, motive,
    /// one branch per constructor, and the major premise.
    pub fn elim_arity(&self) -> usize {
        self.num_params() + 1 + self.num_ctors() + 1
    }
}

pub fn elim_name(inductive: &str) -> String {
    format!("{inductive}_rect")
}

#[derive(Clone, Debug)]
pub enum Decl {
    Constant(Arc<ConstantInfo>),
    Inductive(Arc<InductiveInfo>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum GlobalRef {
    Constant,
    Inductive,
    Constructor(Name, usize),
    Eliminator(Name),
}

/// Checked declarations in order, plus the accumulated universe constraints.
#[derive(Clone, Debug, Default)]
pub struct GlobalEnv {
    decls: Vec<Decl>,
    constants: HashMap<Name, Arc<ConstantInfo>>,
    inductives: HashMap<Name, Arc<InductiveInfo>>,
    names: HashMap<Name, GlobalRef>,
    constraints: ConstraintSet,
    next_level: u32,
}

impl GlobalEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn constant(&self, name: &str) -> Option<&Arc<ConstantInfo>> {
        self.constants.get(name)
    }

    pub fn inductive(&self, name: &str) -> Option<&Arc<InductiveInfo>> {
        self.inductives.get(name)
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.names.contains_key(name) || BUILTIN_NAMES.contains(&name)
    }

    /// The kernel term a global name stands for.
    pub fn resolve(&self, name: &str) -> Option<Term> {
        match name {
            "eq" => return Some(Term::Eq),
            "refl" => return Some(Term::Refl),
            "eq_elim" => return Some(Term::EqElim),
            _ => {}
        }
        let (key, r) = self.names.get_key_value(name)?;
        Some(match r {
            GlobalRef::Constant => Term::Const(key.clone()),
            GlobalRef::Inductive => Term::Ind(key.clone()),
            GlobalRef::Constructor(ind, i) => Term::Ctor(ind.clone(), *i),
            GlobalRef::Eliminator(ind) => Term::Elim(ind.clone()),
        })
    }

    /// Printable name of a constructor.
    pub fn ctor_name(&self, inductive: &str, index: usize) -> Option<&Name> {
        self.inductive(inductive)?.desc.ctors.get(index).map(|c| &c.name)
    }

    /// First level id not yet issued in this environment.
    pub fn next_level(&self) -> u32 {
        self.next_level
    }

    pub fn allocator(&self) -> LevelAllocator {
        LevelAllocator::starting_at(self.next_level)
    }

    /// Records levels issued while processing a command.
    pub fn commit_levels(&mut self, issued: &[Level], next_level: u32) {
        for level in issued {
            self.constraints.add_level(level);
        }
        self.next_level = self.next_level.max(next_level);
    }

    pub(crate) fn add_constraints(&mut self, delta: impl IntoIterator<Item = Constraint>) {
        self.constraints.add_constraints(delta);
    }

    pub(crate) fn push_constant(&mut self, info: ConstantInfo) {
        let info = Arc::new(info);
        self.names.insert(info.name.clone(), GlobalRef::Constant);
        self.constants.insert(info.name.clone(), info.clone());
        self.decls.push(Decl::Constant(info));
    }

    pub(crate) fn push_inductive(&mut self, info: InductiveInfo) {
        let info = Arc::new(info);
        let name = info.desc.name.clone();
        self.names.insert(name.clone(), GlobalRef::Inductive);
        for (i, ctor) in info.desc.ctors.iter().enumerate() {
            self.names.insert(ctor.name.clone(), GlobalRef::Constructor(name.clone(), i));
        }
        self.names.insert(elim_name(&name).into(), GlobalRef::Eliminator(name.clone()));
        self.inductives.insert(name, info.clone());
        self.decls.push(Decl::Inductive(info));
    }

    /// Copy of the environment in which `name` is already an inductive type
    /// (with no constructors), so constructor types mentioning it can be
    /// elaborated and checked.
    pub fn with_provisional_inductive(&self, name: &Name, params: &Telescope, sort: &Sort) -> GlobalEnv {
        let mut env = self.clone();
        let ty = params.close_pi(Term::Sort(sort.clone()));
        let info = InductiveInfo {
            desc: InductiveDescriptor {
                name: name.clone(),
                params: params.clone(),
                sort: sort.clone(),
                ctors: Vec::new(),
                fields: None,
            },
            ty,
            ctor_types: Vec::new(),
            recursive_args: Vec::new(),
            large_elim: false,
        };
        let info = Arc::new(info);
        env.names.insert(name.clone(), GlobalRef::Inductive);
        env.inductives.insert(name.clone(), info);
        env
    }
}
