use super::{Atom, Binding, KbError, Term};

/// Replaces every variable of `atom` by its bound entity.
pub fn apply_substitution(atom: &Atom, binding: &Binding) -> Result<Atom, KbError> {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => binding
                .get(v)
                .map(Term::entity)
                .ok_or_else(|| KbError::UnboundVariable(v.clone())),
            Term::Entity(_) => Ok(t.clone()),
        })
        .collect::<Result<_, _>>()?;
    Ok(Atom { relation: atom.relation.clone(), args })
}
