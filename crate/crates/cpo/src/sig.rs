//! Signatures: declared sorts (with arities) and function symbols with their
//! fully-applied argument and output types.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::term::SimpleType;

/// A function symbol declaration. `args` fixes the arity; a `FunApp` for this
/// symbol always carries exactly `args.len()` arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDecl {
    pub name: String,
    pub args: Vec<SimpleType>,
    pub out: SimpleType,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("sort {0} declared twice")]
    DuplicateSort(String),
    #[error("symbol {0} declared twice")]
    DuplicateFun(String),
    #[error("undeclared sort {sort} in type of {owner}")]
    UndeclaredSort { owner: String, sort: String },
    #[error("sort {sort} takes {expected} type arguments, got {found} (in type of {owner})")]
    SortArity { owner: String, sort: String, expected: usize, found: usize },
    #[error("{0} takes arguments, so its output type must be a data type, not {1}")]
    ArrowOutput(String, String),
}

/// Declared sorts and function symbols.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorts: BTreeMap<String, usize>,
    funs: BTreeMap<String, FunDecl>,
    fun_order: Vec<String>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, name: &str, arity: usize) -> Result<(), SigError> {
        if self.sorts.insert(name.to_string(), arity).is_some() {
            return Err(SigError::DuplicateSort(name.to_string()));
        }
        Ok(())
    }

    /// Declares a symbol. Output types of symbols with arguments must be
    /// sort-headed; constants may carry any type (they are applied through
    /// `@` when their type is an arrow).
    pub fn add_fun(&mut self, decl: FunDecl) -> Result<(), SigError> {
        if self.funs.contains_key(&decl.name) {
            return Err(SigError::DuplicateFun(decl.name));
        }
        for ty in decl.args.iter().chain(std::iter::once(&decl.out)) {
            self.check_type(&decl.name, ty)?;
        }
        if !decl.args.is_empty() && !decl.out.is_data() {
            return Err(SigError::ArrowOutput(decl.name, decl.out.to_string()));
        }
        self.fun_order.push(decl.name.clone());
        self.funs.insert(decl.name.clone(), decl);
        Ok(())
    }

    /// Checks that a type only mentions declared sorts at their arities.
    pub fn check_type(&self, owner: &str, ty: &SimpleType) -> Result<(), SigError> {
        match ty {
            SimpleType::Sort { name, args } => {
                match self.sorts.get(name) {
                    None => {
                        return Err(SigError::UndeclaredSort {
                            owner: owner.to_string(),
                            sort: name.clone(),
                        })
                    }
                    Some(&arity) if arity != args.len() => {
                        return Err(SigError::SortArity {
                            owner: owner.to_string(),
                            sort: name.clone(),
                            expected: arity,
                            found: args.len(),
                        })
                    }
                    Some(_) => {}
                }
                for a in args {
                    self.check_type(owner, a)?;
                }
                Ok(())
            }
            SimpleType::Arrow { dom, cod } => {
                self.check_type(owner, dom)?;
                self.check_type(owner, cod)
            }
        }
    }

    pub fn fun(&self, name: &str) -> Option<&FunDecl> {
        self.funs.get(name)
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.contains_key(name)
    }

    pub fn sort_arity(&self, name: &str) -> Option<usize> {
        self.sorts.get(name).copied()
    }

    /// Symbols in declaration order.
    pub fn fun_names(&self) -> impl Iterator<Item = &str> {
        self.fun_order.iter().map(String::as_str)
    }

    pub fn sorts(&self) -> impl Iterator<Item = (&str, usize)> {
        self.sorts.iter().map(|(n, a)| (n.as_str(), *a))
    }

    /// Every type mentioned by a declaration.
    pub fn declared_types(&self) -> Vec<SimpleType> {
        let mut out = Vec::new();
        for name in &self.fun_order {
            let d = &self.funs[name];
            out.extend(d.args.iter().cloned());
            out.push(d.out.clone());
        }
        out
    }
}
