//! Saturation-based reasoning for guarded and loosely guarded clause sets,
//! with goal-directed answering and rewriting of Boolean conjunctive queries.

pub mod calculus;
pub mod class;
pub mod clausify;
pub mod engine;
pub mod formula;
pub mod gen;
pub mod oracle;
pub mod ordering;
pub mod par;
pub mod parser;
pub mod selection;
pub mod subst;
pub mod sweep;
pub mod term;
