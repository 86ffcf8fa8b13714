//! Noether identities for gauge symmetries: the η multi-index transform,
//! gauge-symmetry derivations built from coefficient tables, residual
//! verification of Noether identities, and complete-NI checking, including
//! Grassmann-odd gauge parameters.
//!
//! Gauge parameters are extra declared fields on an enlarged model, so the
//! whole jet and variational stack applies unchanged.

use crate::expr::{Atom, Expression, Field, Parity, Rat};
use crate::index::{multi_indices_up_to, MultiIndex};
use crate::jet::{total_derivative_multi, ContactDerivation, JetError, JetModel};
use crate::variational::{
    euler_lagrange, euler_lagrange_form, lie_derivative_density, EulerLagrange, Lagrangian,
    SymmetryClass, VarError,
};
use num_bigint::BigInt;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NoetherError {
    #[error("gauge parameter index {0} is not declared")]
    UndeclaredParameter(usize),
    #[error("base coefficients u^{{λΛ}}_a must depend on x only")]
    BaseCoefficientNotXOnly,
    #[error("{0}")]
    Jet(#[from] JetError),
    #[error("{0}")]
    Var(#[from] VarError),
}

/// A finite tuple of expressions indexed by multi-indices.
pub type IndexedTuple = BTreeMap<MultiIndex, Expression>;

/// The η transform
/// `η(f)^Λ = Σ_Σ (−1)^{|Σ+Λ|} (number of interleavings of Σ and Λ) d_Σ f^{Σ+Λ}`,
/// an involution on multi-index coefficient tuples.
pub fn eta(model: &JetModel, f: &IndexedTuple) -> IndexedTuple {
    let k = f.keys().map(MultiIndex::len).max().unwrap_or(0);
    let n = model.base_dim() as u8;
    let mut out = IndexedTuple::new();
    for lam in multi_indices_up_to(n, k) {
        let mut e = Expression::zero();
        for sig in multi_indices_up_to(n, k - lam.len()) {
            let Some(coeff) = f.get(&sig.merge(&lam)) else {
                continue;
            };
            if coeff.is_zero() {
                continue;
            }
            let count = Rat::from(BigInt::from(sig.interleavings(&lam)));
            let term = total_derivative_multi(model, coeff, &sig)
                .expect("declared index")
                .scale(&count);
            e = if (sig.len() + lam.len()) % 2 == 0 {
                e.add(&term)
            } else {
                e.sub(&term)
            };
        }
        if !e.is_zero() {
            out.insert(lam, e);
        }
    }
    out
}

/// Residual of the integration-by-parts identity
/// `Σ (−1)^{|Λ|} d_Λ(f^Λ φ) = Σ η(f)^Λ d_Λ φ`; identically zero.
pub fn integration_by_parts_residual(
    model: &JetModel,
    f: &IndexedTuple,
    phi: &Expression,
) -> Expression {
    let mut lhs = Expression::zero();
    for (mi, coeff) in f {
        let term = total_derivative_multi(model, &coeff.mul(phi), mi).expect("declared index");
        lhs = if mi.len() % 2 == 0 {
            lhs.add(&term)
        } else {
            lhs.sub(&term)
        };
    }
    let mut rhs = Expression::zero();
    for (mi, coeff) in eta(model, f) {
        let dphi = total_derivative_multi(model, phi, &mi).expect("declared index");
        rhs = rhs.add(&coeff.mul(&dphi));
    }
    lhs.sub(&rhs)
}

/// Coefficient tables of a gauge symmetry
/// `u = (Σ u^{λΛ}_a χ^a_Λ)∂_λ + (Σ u^{iΛ}_a χ^a_Λ)∂_i`,
/// linear in the parameter jets. The base tables must depend on `x` only.
#[derive(Debug, Clone, Default)]
pub struct GaugeSymmetrySpec {
    /// per parameter index `a`: map `(λ, Λ) → u^{λΛ}_a(x)`
    pub base: Vec<BTreeMap<(u32, MultiIndex), Expression>>,
    /// per parameter index `a`: map `(field, Λ) → u^{iΛ}_a(x, jets)`
    pub field: Vec<BTreeMap<(Field, MultiIndex), Expression>>,
}

impl GaugeSymmetrySpec {
    pub fn n_params(&self) -> usize {
        self.base.len().max(self.field.len())
    }

    fn base_table(&self, a: usize) -> Option<&BTreeMap<(u32, MultiIndex), Expression>> {
        self.base.get(a)
    }

    fn field_table(&self, a: usize) -> Option<&BTreeMap<(Field, MultiIndex), Expression>> {
        self.field.get(a)
    }
}

/// The model enlarged by the gauge parameters as extra fields.
pub fn enlarged_model(
    model: &JetModel,
    param_names: &[String],
    odd_params: bool,
) -> Result<JetModel, JetError> {
    let mut even = model.even_names().to_vec();
    let mut odd = model.odd_names().to_vec();
    if odd_params {
        odd.extend(param_names.iter().cloned());
    } else {
        even.extend(param_names.iter().cloned());
    }
    JetModel::new(
        model.base_names().to_vec(),
        even,
        odd,
        model.param_names().to_vec(),
    )
}

/// Jet atom of gauge parameter `a` on the enlarged model.
fn param_jet(model: &JetModel, odd_params: bool, n_orig_even: u32, n_orig_odd: u32, a: usize, mi: MultiIndex) -> Expression {
    let _ = model;
    if odd_params {
        Expression::jet(Field::Odd(n_orig_odd + a as u32), mi)
    } else {
        Expression::jet(Field::Even(n_orig_even + a as u32), mi)
    }
}

/// Builds the gauge-symmetry derivation over the enlarged model. Returns
/// the enlarged model and the derivation (odd when the parameters are).
pub fn build_gauge_symmetry(
    model: &JetModel,
    spec: &GaugeSymmetrySpec,
    param_names: &[String],
    odd_params: bool,
) -> Result<(JetModel, ContactDerivation), NoetherError> {
    if spec.n_params() > param_names.len() {
        return Err(NoetherError::UndeclaredParameter(param_names.len()));
    }
    for table in &spec.base {
        for e in table.values() {
            let ok = e.atoms_all(|at| matches!(at, Atom::Base(_) | Atom::Param(_) | Atom::Func(..)));
            if !ok {
                return Err(NoetherError::BaseCoefficientNotXOnly);
            }
        }
    }
    let big = enlarged_model(model, param_names, odd_params)?;
    let n_even = model.n_even();
    let n_odd = model.n_odd();
    let chi = |a: usize, mi: MultiIndex| param_jet(&big, odd_params, n_even, n_odd, a, mi);

    let mut xi = vec![Expression::zero(); big.base_dim() as usize];
    let mut v_even = vec![Expression::zero(); big.n_even() as usize];
    let mut v_odd = vec![Expression::zero(); big.n_odd() as usize];
    for a in 0..param_names.len() {
        if let Some(table) = spec.base_table(a) {
            for ((lam, mi), coeff) in table {
                xi[*lam as usize] =
                    xi[*lam as usize].add(&coeff.mul(&chi(a, mi.clone())));
            }
        }
        if let Some(table) = spec.field_table(a) {
            for ((f, mi), coeff) in table {
                let term = coeff.mul(&chi(a, mi.clone()));
                match f {
                    Field::Even(i) => v_even[*i as usize] = v_even[*i as usize].add(&term),
                    Field::Odd(o) => v_odd[*o as usize] = v_odd[*o as usize].add(&term),
                }
            }
        }
    }
    let parity = if odd_params { Parity::Odd } else { Parity::Even };
    let derivation = ContactDerivation::new(&big, parity, xi, v_even, v_odd)
        .map_err(NoetherError::Jet)?;
    Ok((big, derivation))
}

/// Noether identity residuals
/// `E_a = Σ_Λ (−1)^{|Λ|} d_Λ[(u^{iΛ}_a − y^i_λ u^{λΛ}_a) E_i]`,
/// one per parameter index; zero exactly when the tables are a genuine
/// gauge symmetry. Computed over the original model — the parameters drop
/// out of the display.
pub fn noether_identity_residuals(
    model: &JetModel,
    spec: &GaugeSymmetrySpec,
    lag: &Lagrangian,
) -> Vec<Expression> {
    let el = euler_lagrange(model, lag);
    let n_params = spec.n_params();
    let mut out = Vec::with_capacity(n_params);
    for a in 0..n_params {
        // collect vertical coefficients (u^{iΛ}_a − y^i_λ u^{λΛ}_a) per (i, Λ)
        let mut vertical: BTreeMap<(Field, MultiIndex), Expression> = BTreeMap::new();
        if let Some(table) = spec.field_table(a) {
            for ((f, mi), coeff) in table {
                let entry = vertical.entry((*f, mi.clone())).or_insert_with(Expression::zero);
                *entry = entry.add(coeff);
            }
        }
        if let Some(table) = spec.base_table(a) {
            for ((lam, mi), coeff) in table {
                for f in model.fields() {
                    let s = Expression::jet(f, MultiIndex::single(*lam as u8));
                    let entry = vertical.entry((f, mi.clone())).or_insert_with(Expression::zero);
                    *entry = entry.sub(&s.mul(coeff));
                }
            }
        }
        let mut residual = Expression::zero();
        for ((f, mi), coeff) in vertical {
            let inner = coeff.mul(el.component(f));
            if inner.is_zero() {
                continue;
            }
            let term = total_derivative_multi(model, &inner, &mi).expect("declared index");
            residual = if mi.len() % 2 == 0 {
                residual.add(&term)
            } else {
                residual.sub(&term)
            };
        }
        out.push(residual);
    }
    out
}

/// Generators of candidate Noether identities
/// `Δ_r = Σ Δ^{A,Λ}_r s̄_{ΛA}`.
#[derive(Debug, Clone, Default)]
pub struct NIGenerator {
    /// per identity index `r`: map `(field, Λ) → Δ^{A,Λ}_r`
    pub delta: Vec<BTreeMap<(Field, MultiIndex), Expression>>,
}

/// Complete-NI residuals `Σ Δ^{A,Λ}_r d_Λ E_A`, one per generator.
pub fn complete_ni_residuals(
    model: &JetModel,
    gen: &NIGenerator,
    lag: &Lagrangian,
) -> Vec<Expression> {
    let el = euler_lagrange(model, lag);
    gen.delta
        .iter()
        .map(|table| {
            let mut residual = Expression::zero();
            for ((f, mi), coeff) in table {
                let de = total_derivative_multi(model, el.component(*f), mi)
                    .expect("declared index");
                residual = residual.add(&coeff.mul(&de));
            }
            residual
        })
        .collect()
}

/// Classifies a gauge-symmetry spec against a Lagrangian over the enlarged
/// model: exact when `L_u L = 0` identically; variational when the density
/// `u_V⌋δL` has vanishing variational derivatives with respect to all
/// fields and parameters; none otherwise.
pub fn gauge_invariance_check(
    model: &JetModel,
    spec: &GaugeSymmetrySpec,
    param_names: &[String],
    odd_params: bool,
    lag: &Lagrangian,
) -> Result<SymmetryClass, NoetherError> {
    let (big, u) = build_gauge_symmetry(model, spec, param_names, odd_params)?;
    let big_lag = Lagrangian::new(&big, lag.density.clone())?;
    let lie = lie_derivative_density(&big, &u, &big_lag)?;
    if lie.is_zero() {
        return Ok(SymmetryClass::Exact);
    }
    let u_vert = u.vertical_part(&big);
    let density = crate::forms::interior_product(&big, &u_vert, &euler_lagrange_form(&big, &big_lag))
        .map_err(VarError::Forms)?
        .density_coefficient(&big);
    let as_lag = Lagrangian {
        order: density.max_jet_order(),
        density,
    };
    if euler_lagrange(&big, &as_lag).is_zero() {
        Ok(SymmetryClass::Variational)
    } else {
        Ok(SymmetryClass::None)
    }
}

/// Euler–Lagrange components re-exported for callers that already hold the
/// enlarged model.
pub fn euler_lagrange_components(model: &JetModel, lag: &Lagrangian) -> EulerLagrange {
    euler_lagrange(model, lag)
}
