//! Tangent-valued forms on a plain coordinate set and the
//! Frölicher–Nijenhuis bracket.
//!
//! A tangent-valued `r`-form `φ = (1/r!) φ^μ_{λ1…λr} dz^{λ1}∧⋯∧dz^{λr} ⊗ ∂_μ`
//! is stored per output direction `μ` as an exterior part over strictly
//! increasing index sets, the `1/r!` absorbed. Coordinates are the base
//! coordinates followed by the order-0 fibre coordinates; everything here is
//! Grassmann-even.

use crate::expr::{Atom, Expression};
use crate::index::MultiIndex;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TvError {
    #[error("tangent-valued forms live on different coordinate sets")]
    SpaceMismatch,
    #[error("bracket degree {0} exceeds the coordinate count {1}")]
    DegreeOverflow(usize, usize),
}

/// A plain coordinate set: `n_base` base coordinates then `n_fiber`
/// order-0 fibre coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordSpace {
    pub n_base: usize,
    pub n_fiber: usize,
}

impl CoordSpace {
    pub fn dim(&self) -> usize {
        self.n_base + self.n_fiber
    }

    /// The expression atom for coordinate direction `d`.
    pub fn atom(&self, d: usize) -> Atom {
        if d < self.n_base {
            Atom::Base(d as u32)
        } else {
            Atom::EvenJet((d - self.n_base) as u32, MultiIndex::empty())
        }
    }

    pub fn partial(&self, e: &Expression, d: usize) -> Expression {
        e.partial(&self.atom(d)).expect("coordinate atom")
    }
}

/// Exterior part: coefficients over strictly increasing direction lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExteriorPart {
    terms: BTreeMap<Vec<u8>, Expression>,
}

impl ExteriorPart {
    pub fn zero() -> Self {
        ExteriorPart::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Expression)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, key: Vec<u8>, e: Expression) {
        if e.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(e);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&e);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Fully antisymmetric component at an arbitrary index tuple.
    pub fn value_at(&self, tuple: &[u8]) -> Expression {
        let mut sorted = tuple.to_vec();
        // count inversions
        let mut neg = false;
        for i in 0..sorted.len() {
            for j in (i + 1)..sorted.len() {
                match sorted[i].cmp(&sorted[j]) {
                    std::cmp::Ordering::Greater => neg = !neg,
                    std::cmp::Ordering::Equal => return Expression::zero(),
                    _ => {}
                }
            }
        }
        sorted.sort_unstable();
        match self.terms.get(&sorted) {
            Some(e) => {
                if neg {
                    e.neg()
                } else {
                    e.clone()
                }
            }
            None => Expression::zero(),
        }
    }
}

/// Tangent-valued form: one exterior part per output direction, all of one
/// degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentValuedForm {
    pub space: CoordSpace,
    pub degree: usize,
    pub comps: Vec<ExteriorPart>,
}

impl TangentValuedForm {
    pub fn zero(space: CoordSpace, degree: usize) -> Self {
        TangentValuedForm {
            space,
            degree,
            comps: vec![ExteriorPart::zero(); space.dim()],
        }
    }

    /// A vector field `u = u^μ ∂_μ` as a degree-0 tangent-valued form.
    pub fn vector_field(space: CoordSpace, comps: Vec<Expression>) -> Self {
        let mut f = TangentValuedForm::zero(space, 0);
        for (mu, e) in comps.into_iter().enumerate() {
            f.comps[mu].add_term(Vec::new(), e);
        }
        f
    }

    /// The canonical form `θ_Z = dz^λ ⊗ ∂_λ`.
    pub fn canonical(space: CoordSpace) -> Self {
        let mut f = TangentValuedForm::zero(space, 1);
        for mu in 0..space.dim() {
            f.comps[mu].add_term(vec![mu as u8], Expression::one());
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ExteriorPart::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (mu, part) in other.comps.iter().enumerate() {
            for (k, e) in part.terms() {
                out.comps[mu].add_term(k.clone(), e.clone());
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = TangentValuedForm::zero(self.space, self.degree);
        for (mu, part) in self.comps.iter().enumerate() {
            for (k, e) in part.terms() {
                out.comps[mu].add_term(k.clone(), e.neg());
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &crate::expr::Rat) -> Self {
        let mut out = TangentValuedForm::zero(self.space, self.degree);
        for (mu, part) in self.comps.iter().enumerate() {
            for (k, e) in part.terms() {
                out.comps[mu].add_term(k.clone(), e.scale(r));
            }
        }
        out
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

/// Frölicher–Nijenhuis bracket in coordinates:
///
/// ```text
/// [φ,σ]^μ = (1/r!s!) ( φ^ν∂_ν σ^μ − σ^ν∂_ν φ^μ
///                      − r φ^μ_{…ν} ∂_{λr} σ^ν + s σ^μ_{ν…} ∂_{λ_{r+1}} φ^ν )
///           dz^{λ1}∧⋯∧dz^{λ_{r+s}} ⊗ ∂_μ
/// ```
///
/// Reduces to the Lie bracket when both arguments are vector fields.
pub fn fn_bracket(
    phi: &TangentValuedForm,
    sigma: &TangentValuedForm,
) -> Result<TangentValuedForm, TvError> {
    if phi.space != sigma.space {
        return Err(TvError::SpaceMismatch);
    }
    let space = phi.space;
    let n = space.dim();
    let (r, s) = (phi.degree, sigma.degree);
    if r + s > n {
        return Err(TvError::DegreeOverflow(r + s, n));
    }
    let norm = crate::expr::Rat::new(
        1.into(),
        (factorial(r) * factorial(s)).into(),
    );
    let mut out = TangentValuedForm::zero(space, r + s);

    let mut tuple = vec![0u8; r + s];
    loop {
        let a = &tuple[..r];
        let b = &tuple[r..];
        // skip tuples with repeated entries: the wedge kills them
        let mut seen = 0u64;
        let distinct = tuple.iter().all(|&d| {
            let bit = 1u64 << d;
            let ok = seen & bit == 0;
            seen |= bit;
            ok
        });
        if distinct || tuple.is_empty() {
            for mu in 0..n {
                let mut g = Expression::zero();
                for nu in 0..n {
                    let phi_nu_a = phi.comps[nu].value_at(a);
                    if !phi_nu_a.is_zero() {
                        let d = space.partial(&sigma.comps[mu].value_at(b), nu);
                        g = g.add(&phi_nu_a.mul(&d));
                    }
                    let sigma_nu_b = sigma.comps[nu].value_at(b);
                    if !sigma_nu_b.is_zero() {
                        let d = space.partial(&phi.comps[mu].value_at(a), nu);
                        g = g.sub(&sigma_nu_b.mul(&d));
                    }
                    if r > 0 {
                        // −r φ^μ_{λ1…λ_{r−1}ν} ∂_{λr} σ^ν_{λ_{r+1}…}
                        let mut idx = a[..r - 1].to_vec();
                        idx.push(nu as u8);
                        let phi_mu = phi.comps[mu].value_at(&idx);
                        if !phi_mu.is_zero() {
                            let d = space.partial(&sigma.comps[nu].value_at(b), a[r - 1] as usize);
                            g = g.sub(
                                &phi_mu
                                    .mul(&d)
                                    .scale(&crate::expr::rat_int(r as i64)),
                            );
                        }
                    }
                    if s > 0 {
                        // +s σ^μ_{νλ_{r+2}…} ∂_{λ_{r+1}} φ^ν_{λ1…λr}
                        let mut idx = vec![nu as u8];
                        idx.extend_from_slice(&b[1..]);
                        let sigma_mu = sigma.comps[mu].value_at(&idx);
                        if !sigma_mu.is_zero() {
                            let d = space.partial(&phi.comps[nu].value_at(a), b[0] as usize);
                            g = g.add(
                                &sigma_mu
                                    .mul(&d)
                                    .scale(&crate::expr::rat_int(s as i64)),
                            );
                        }
                    }
                }
                if g.is_zero() {
                    continue;
                }
                // sort the wedge dz^{λ1}∧…, sign into the coefficient
                let mut key = tuple.clone();
                let mut neg = false;
                for i in 0..key.len() {
                    for j in (i + 1)..key.len() {
                        if key[i] > key[j] {
                            neg = !neg;
                        }
                    }
                }
                key.sort_unstable();
                let signed = if neg { g.neg() } else { g };
                out.comps[mu].add_term(key, signed.scale(&norm));
            }
        }
        // advance the tuple
        let mut carry = true;
        for d in tuple.iter_mut().rev() {
            if carry {
                *d += 1;
                if (*d as usize) < n {
                    carry = false;
                    break;
                }
                *d = 0;
            }
        }
        if carry {
            break;
        }
    }
    Ok(out)
}

/// Nijenhuis differential `d_θ ψ = [θ, ψ]_FN`.
pub fn nijenhuis_differential(
    theta: &TangentValuedForm,
    psi: &TangentValuedForm,
) -> Result<TangentValuedForm, TvError> {
    fn_bracket(theta, psi)
}
