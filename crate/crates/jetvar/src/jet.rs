//! The declared fibred coordinate system, total derivatives, and jet
//! prolongations of vector fields and contact derivations.

use crate::expr::{Atom, ExprParity, Expression, Field, NameSource, Parity};
use crate::index::MultiIndex;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("base index {0} out of range (base dimension {1})")]
    IndexOutOfRange(u32, u32),
    #[error("vector field is not projectable: {0}")]
    NotProjectable(String),
    #[error("{0}")]
    Invalid(String),
}

static MODEL_IDS: AtomicU64 = AtomicU64::new(1);

/// The declared coordinate system: base coordinates, even and odd fields,
/// and parameters. The jet-order truncation is a watermark that only grows.
#[derive(Debug)]
pub struct JetModel {
    id: u64,
    base: Vec<String>,
    even: Vec<String>,
    odd: Vec<String>,
    params: Vec<String>,
    order_mark: AtomicU32,
}

impl Clone for JetModel {
    fn clone(&self) -> Self {
        JetModel {
            id: self.id,
            base: self.base.clone(),
            even: self.even.clone(),
            odd: self.odd.clone(),
            params: self.params.clone(),
            order_mark: AtomicU32::new(self.order_mark.load(Ordering::Relaxed)),
        }
    }
}

impl JetModel {
    pub fn new(
        base: Vec<String>,
        even: Vec<String>,
        odd: Vec<String>,
        params: Vec<String>,
    ) -> Result<JetModel, JetError> {
        if base.is_empty() {
            return Err(JetError::Invalid("base dimension must be ≥ 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in base.iter().chain(&even).chain(&odd).chain(&params) {
            if !seen.insert(name.clone()) {
                return Err(JetError::Invalid(format!("duplicate name `{name}`")));
            }
        }
        Ok(JetModel {
            id: MODEL_IDS.fetch_add(1, Ordering::Relaxed),
            base,
            even,
            odd,
            params,
            order_mark: AtomicU32::new(0),
        })
    }

    /// Unnamed model: base coordinates `x0..`, even fields `y0..` (a single
    /// field is called `y`), odd fields likewise `c`.
    pub fn unnamed(n: u32, n_even: u32, n_odd: u32) -> JetModel {
        let base = (0..n).map(|l| format!("x{l}")).collect();
        let even = if n_even == 1 {
            vec!["y".to_string()]
        } else {
            (0..n_even).map(|i| format!("y{i}")).collect()
        };
        let odd = if n_odd == 1 {
            vec!["c".to_string()]
        } else {
            (0..n_odd).map(|a| format!("c{a}")).collect()
        };
        JetModel::new(base, even, odd, Vec::new()).expect("generated names are unique")
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn base_dim(&self) -> u32 {
        self.base.len() as u32
    }

    pub fn n_even(&self) -> u32 {
        self.even.len() as u32
    }

    pub fn n_odd(&self) -> u32 {
        self.odd.len() as u32
    }

    pub fn n_params(&self) -> u32 {
        self.params.len() as u32
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn even_names(&self) -> &[String] {
        &self.even
    }

    pub fn odd_names(&self) -> &[String] {
        &self.odd
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn fields(&self) -> impl Iterator<Item = Field> + '_ {
        (0..self.n_even())
            .map(Field::Even)
            .chain((0..self.n_odd()).map(Field::Odd))
    }

    pub fn field_name(&self, f: Field) -> &str {
        match f {
            Field::Even(i) => &self.even[i as usize],
            Field::Odd(a) => &self.odd[a as usize],
        }
    }

    /// Current truncation watermark.
    pub fn max_order(&self) -> u32 {
        self.order_mark.load(Ordering::Relaxed)
    }

    /// Extends the truncation; it never shrinks.
    pub fn note_order(&self, k: u32) {
        self.order_mark.fetch_max(k, Ordering::Relaxed);
    }

    /// Checks that every atom of `e` refers to a declared coordinate, and
    /// records the jet order seen.
    pub fn validate_expr(&self, e: &Expression) -> Result<(), crate::expr::ExprError> {
        let mut bad: Option<String> = None;
        e.visit_atoms(&mut |a| {
            let ok = match a {
                Atom::Base(l) => *l < self.base_dim(),
                Atom::EvenJet(i, _) => *i < self.n_even(),
                Atom::OddJet(i, _) => *i < self.n_odd(),
                Atom::Param(p) => *p < self.n_params(),
                Atom::Func(..) => true,
            };
            if !ok && bad.is_none() {
                bad = Some(format!("{a:?}"));
            }
        });
        if let Some(b) = bad {
            return Err(crate::expr::ExprError::UndeclaredAtom(b));
        }
        self.note_order(e.max_jet_order() as u32);
        Ok(())
    }

    pub fn render(&self, e: &Expression) -> String {
        crate::expr::render(e, Some(self))
    }

    pub fn render_atom(&self, a: &Atom) -> String {
        crate::expr::render_atom(a, Some(self))
    }
}

impl NameSource for JetModel {
    fn base_name(&self, l: u32) -> Option<String> {
        self.base.get(l as usize).cloned()
    }
    fn even_name(&self, i: u32) -> Option<String> {
        self.even.get(i as usize).cloned()
    }
    fn odd_name(&self, a: u32) -> Option<String> {
        self.odd.get(a as usize).cloned()
    }
    fn param_name(&self, p: u32) -> Option<String> {
        self.params.get(p as usize).cloned()
    }
}

/// Total derivative `d_λ e = ∂_λ e + Σ s^A_{λ+Λ} ∂^Λ_A e` over the jet atoms
/// present in `e`.
pub fn total_derivative(
    model: &JetModel,
    e: &Expression,
    lambda: u32,
) -> Result<Expression, JetError> {
    if lambda >= model.base_dim() {
        return Err(JetError::IndexOutOfRange(lambda, model.base_dim()));
    }
    let mut out = e
        .partial(&Atom::Base(lambda))
        .expect("base atom is coordinate-like");
    for (field, mi) in e.jet_atoms() {
        let de = e
            .partial(&Atom::jet(field, mi.clone()))
            .expect("jet atom is coordinate-like");
        if de.is_zero() {
            continue;
        }
        let raised = Expression::jet(field, mi.plus(lambda as u8));
        out = out.add(&raised.mul(&de));
        model.note_order(mi.len() as u32 + 1);
    }
    Ok(out)
}

/// Iterated total derivative `d_Λ`; the order of iteration is immaterial.
pub fn total_derivative_multi(
    model: &JetModel,
    e: &Expression,
    mi: &MultiIndex,
) -> Result<Expression, JetError> {
    let mut out = e.clone();
    for l in mi.iter() {
        out = total_derivative(model, &out, l as u32)?;
    }
    Ok(out)
}

/// A generalized vector field `υ = υ^λ∂_λ + υ^A∂_A` whose coefficients may
/// depend on jet coordinates of any finite order. Prolongation components
/// are derived on demand from `d_Λ(υ^A − s^A_μ υ^μ) + s^A_{μ+Λ} υ^μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactDerivation {
    pub parity: Parity,
    pub xi: Vec<Expression>,
    pub v_even: Vec<Expression>,
    pub v_odd: Vec<Expression>,
}

impl ContactDerivation {
    pub fn new(
        model: &JetModel,
        parity: Parity,
        xi: Vec<Expression>,
        v_even: Vec<Expression>,
        v_odd: Vec<Expression>,
    ) -> Result<ContactDerivation, JetError> {
        if xi.len() != model.base_dim() as usize
            || v_even.len() != model.n_even() as usize
            || v_odd.len() != model.n_odd() as usize
        {
            return Err(JetError::Invalid(
                "component counts do not match the model".into(),
            ));
        }
        let check = |e: &Expression, want: Parity, what: &str| -> Result<(), JetError> {
            let ok = match (e.parity(), want) {
                (ExprParity::Even, Parity::Even) | (ExprParity::Odd, Parity::Odd) => true,
                _ => e.is_zero(),
            };
            if ok {
                Ok(())
            } else {
                Err(JetError::Invalid(format!(
                    "{what} component has wrong parity for a {parity:?} derivation"
                )))
            }
        };
        for e in &xi {
            check(e, parity, "base")?;
        }
        for (i, e) in v_even.iter().enumerate() {
            check(e, parity, &format!("even field {i}"))?;
        }
        for (a, e) in v_odd.iter().enumerate() {
            check(e, parity.flip(), &format!("odd field {a}"))?;
        }
        Ok(ContactDerivation {
            parity,
            xi,
            v_even,
            v_odd,
        })
    }

    pub fn zero(model: &JetModel) -> ContactDerivation {
        ContactDerivation {
            parity: Parity::Even,
            xi: vec![Expression::zero(); model.base_dim() as usize],
            v_even: vec![Expression::zero(); model.n_even() as usize],
            v_odd: vec![Expression::zero(); model.n_odd() as usize],
        }
    }

    /// Even derivation with the given components.
    pub fn even(
        model: &JetModel,
        xi: Vec<Expression>,
        v_even: Vec<Expression>,
        v_odd: Vec<Expression>,
    ) -> Result<ContactDerivation, JetError> {
        ContactDerivation::new(model, Parity::Even, xi, v_even, v_odd)
    }

    pub fn field_component(&self, f: Field) -> &Expression {
        match f {
            Field::Even(i) => &self.v_even[i as usize],
            Field::Odd(a) => &self.v_odd[a as usize],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().all(Expression::is_zero)
            && self.v_even.iter().all(Expression::is_zero)
            && self.v_odd.iter().all(Expression::is_zero)
    }

    /// True when the base components depend on base coordinates and
    /// parameters only.
    pub fn is_projectable(&self) -> bool {
        self.xi
            .iter()
            .all(|e| e.atoms_all(|a| matches!(a, Atom::Base(_) | Atom::Param(_))))
    }

    /// `υ_V^A = υ^A − s^A_μ υ^μ`, the vertical component over field `f`.
    pub fn vertical_component(&self, f: Field) -> Expression {
        let mut out = self.field_component(f).clone();
        for (mu, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let s = Expression::jet(f, MultiIndex::single(mu as u8));
            out = out.sub(&s.mul(xi));
        }
        out
    }

    /// Vertical part `υ_V` of the canonical horizontal splitting.
    pub fn vertical_part(&self, model: &JetModel) -> ContactDerivation {
        let v_even = (0..model.n_even())
            .map(|i| self.vertical_component(Field::Even(i)))
            .collect();
        let v_odd = (0..model.n_odd())
            .map(|a| self.vertical_component(Field::Odd(a)))
            .collect();
        ContactDerivation {
            parity: self.parity,
            xi: vec![Expression::zero(); model.base_dim() as usize],
            v_even,
            v_odd,
        }
    }

    /// Horizontal part `υ_H = υ^λ d_λ`, expressed as the contact derivation
    /// with `υ^A = s^A_μ υ^μ` so that every contact form contracts to zero.
    pub fn horizontal_part(&self, model: &JetModel) -> ContactDerivation {
        let comp = |f: Field| {
            let mut out = Expression::zero();
            for (mu, xi) in self.xi.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                let s = Expression::jet(f, MultiIndex::single(mu as u8));
                out = out.add(&s.mul(xi));
            }
            out
        };
        ContactDerivation {
            parity: self.parity,
            xi: self.xi.clone(),
            v_even: (0..model.n_even()).map(|i| comp(Field::Even(i))).collect(),
            v_odd: (0..model.n_odd()).map(|a| comp(Field::Odd(a))).collect(),
        }
    }

    /// Jet component `ϑ^A_Λ = d_Λ(υ^A − s^A_μ υ^μ) + s^A_{μ+Λ} υ^μ`.
    pub fn jet_component(&self, model: &JetModel, f: Field, mi: &MultiIndex) -> Expression {
        if mi.is_empty() {
            return self.field_component(f).clone();
        }
        let mut out = total_derivative_multi(model, &self.vertical_component(f), mi)
            .expect("declared indices");
        for (mu, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let s = Expression::jet(f, mi.plus(mu as u8));
            out = out.add(&s.mul(xi));
        }
        out
    }

    /// `ϑ⌋θ^A_Λ = d_Λ(υ_V^A)`: contraction with a contact form.
    pub fn contract_contact(&self, model: &JetModel, f: Field, mi: &MultiIndex) -> Expression {
        total_derivative_multi(model, &self.vertical_component(f), mi).expect("declared indices")
    }

    /// Applies the prolonged derivation to an expression.
    pub fn apply(&self, model: &JetModel, e: &Expression) -> Expression {
        let mut out = Expression::zero();
        for (l, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let de = e.partial(&Atom::Base(l as u32)).expect("coordinate atom");
            out = out.add(&xi.mul(&de));
        }
        for (f, mi) in e.jet_atoms() {
            let de = e.partial(&Atom::jet(f, mi.clone())).expect("coordinate atom");
            if de.is_zero() {
                continue;
            }
            let comp = self.jet_component(model, f, &mi);
            out = out.add(&comp.mul(&de));
        }
        out
    }

    /// Graded commutator `[u, v] = u∘v − (−1)^{[u][v]} v∘u` as a contact
    /// derivation.
    pub fn bracket(&self, model: &JetModel, other: &ContactDerivation) -> ContactDerivation {
        let sign = self.parity == Parity::Odd && other.parity == Parity::Odd;
        let combine = |a: &Expression, b: &Expression| {
            let ab = self.apply(model, b);
            let ba = other.apply(model, a);
            if sign {
                ab.add(&ba)
            } else {
                ab.sub(&ba)
            }
        };
        let parity = if self.parity == other.parity {
            Parity::Even
        } else {
            Parity::Odd
        };
        ContactDerivation {
            parity,
            xi: self
                .xi
                .iter()
                .zip(&other.xi)
                .map(|(a, b)| combine(a, b))
                .collect(),
            v_even: self
                .v_even
                .iter()
                .zip(&other.v_even)
                .map(|(a, b)| combine(a, b))
                .collect(),
            v_odd: self
                .v_odd
                .iter()
                .zip(&other.v_odd)
                .map(|(a, b)| combine(a, b))
                .collect(),
        }
    }
}

/// Explicit component table of a prolonged derivation, `|Λ| ≤ order`.
#[derive(Debug, Clone)]
pub struct Prolongation {
    pub order: usize,
    pub xi: Vec<Expression>,
    pub components: BTreeMap<(Field, MultiIndex), Expression>,
}

/// `k`-order jet prolongation of a projectable vector field with order-0
/// coefficients.
pub fn prolong_vector_field(
    model: &JetModel,
    u: &ContactDerivation,
    k: usize,
) -> Result<Prolongation, JetError> {
    if !u.is_projectable() {
        return Err(JetError::NotProjectable(
            "base components must depend on base coordinates only".into(),
        ));
    }
    let order0 = u
        .v_even
        .iter()
        .chain(&u.v_odd)
        .all(|e| e.max_jet_order() == 0);
    if !order0 {
        return Err(JetError::Invalid(
            "vector field coefficients must be of jet order 0".into(),
        ));
    }
    Ok(prolong_contact_derivation(model, u, k))
}

/// `k`-order jet prolongation of a contact derivation (generalized vector
/// field); reduces to the vector-field prolongation for projectable
/// order-0 input.
pub fn prolong_contact_derivation(
    model: &JetModel,
    v: &ContactDerivation,
    k: usize,
) -> Prolongation {
    let mut components = BTreeMap::new();
    for mi in crate::index::multi_indices_up_to(model.base_dim() as u8, k) {
        for f in model.fields() {
            components.insert((f, mi.clone()), v.jet_component(model, f, &mi));
        }
    }
    model.note_order(k as u32);
    Prolongation {
        order: k,
        xi: v.xi.clone(),
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat_int;

    fn model_1d() -> JetModel {
        // one base coordinate x, one field y
        JetModel::new(
            vec!["x".into()],
            vec!["y".into()],
            vec![],
            vec![],
        )
        .unwrap()
    }

    fn y(mi: &[u8]) -> Expression {
        Expression::jet(Field::Even(0), MultiIndex::from_slice(mi))
    }

    #[test]
    fn total_derivative_of_field() {
        let m = model_1d();
        // d_x(y) → y_x
        assert_eq!(total_derivative(&m, &y(&[]), 0).unwrap(), y(&[0]));
        // d_x(x) → 1
        assert_eq!(
            total_derivative(&m, &Expression::base(0), 0).unwrap(),
            Expression::one()
        );
        // d_x(y·y_x) → y_x² + y·y_xx
        let e = y(&[]).mul(&y(&[0]));
        let expect = y(&[0]).mul(&y(&[0])).add(&y(&[]).mul(&y(&[0, 0])));
        assert_eq!(total_derivative(&m, &e, 0).unwrap(), expect);
    }

    #[test]
    fn iterated_total_derivative() {
        let m = JetModel::new(
            vec!["t".into(), "x".into()],
            vec!["y".into()],
            vec![],
            vec![],
        )
        .unwrap();
        // d_{()}(e) = e
        let e = y(&[1]).mul(&y(&[1]));
        assert_eq!(
            total_derivative_multi(&m, &e, &MultiIndex::empty()).unwrap(),
            e
        );
        // d_{(t,x)}(y) = y_{tx}
        assert_eq!(
            total_derivative_multi(&m, &y(&[]), &MultiIndex::from_slice(&[0, 1])).unwrap(),
            y(&[0, 1])
        );
        // mixed order agrees
        let a = total_derivative(&m, &total_derivative(&m, &e, 0).unwrap(), 1).unwrap();
        let b = total_derivative(&m, &total_derivative(&m, &e, 1).unwrap(), 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn total_derivative_is_a_derivation() {
        let m = model_1d();
        let e = y(&[]).mul(&y(&[0])).add(&Expression::base(0));
        let f = y(&[0]).scale(&rat_int(3)).add(&Expression::one());
        let lhs = total_derivative(&m, &e.mul(&f), 0).unwrap();
        let rhs = total_derivative(&m, &e, 0)
            .unwrap()
            .mul(&f)
            .add(&e.mul(&total_derivative(&m, &f, 0).unwrap()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn prolong_base_translation() {
        let m = model_1d();
        // u = ∂_x → J¹u = ∂_x, jet components 0
        let u = ContactDerivation::even(
            &m,
            vec![Expression::one()],
            vec![Expression::zero()],
            vec![],
        )
        .unwrap();
        let p = prolong_vector_field(&m, &u, 1).unwrap();
        assert!(p.components[&(Field::Even(0), MultiIndex::single(0))].is_zero());
    }

    #[test]
    fn prolong_vertical_scaling() {
        let m = model_1d();
        // u = y∂_y → J¹u = y∂_y + y_x∂^x_y
        let u = ContactDerivation::even(&m, vec![Expression::zero()], vec![y(&[])], vec![]).unwrap();
        let p = prolong_vector_field(&m, &u, 1).unwrap();
        assert_eq!(p.components[&(Field::Even(0), MultiIndex::single(0))], y(&[0]));
    }

    #[test]
    fn prolong_zero() {
        let m = model_1d();
        let u = ContactDerivation::zero(&m);
        let p = prolong_vector_field(&m, &u, 2).unwrap();
        assert!(p.components.values().all(Expression::is_zero));
    }

    #[test]
    fn prolong_generalized_field() {
        let m = model_1d();
        // υ = y_x ∂_y → first prolongation adds y_xx ∂^x_y
        let v =
            ContactDerivation::even(&m, vec![Expression::zero()], vec![y(&[0])], vec![]).unwrap();
        let p = prolong_contact_derivation(&m, &v, 1);
        assert_eq!(
            p.components[&(Field::Even(0), MultiIndex::single(0))],
            y(&[0, 0])
        );
    }

    #[test]
    fn prolongation_respects_brackets() {
        let m = model_1d();
        let x = Expression::base(0);
        // u = x∂_x + y∂_y, v = ∂_x + y²∂_y
        let u = ContactDerivation::even(&m, vec![x.clone()], vec![y(&[])], vec![]).unwrap();
        let v = ContactDerivation::even(
            &m,
            vec![Expression::one()],
            vec![y(&[]).mul(&y(&[]))],
            vec![],
        )
        .unwrap();
        let w = u.bracket(&m, &v);
        // J¹[u,v] components equal [J¹u, J¹v] applied to jet coordinates
        let mi = MultiIndex::single(0);
        let coord = Expression::jet(Field::Even(0), mi.clone());
        let lhs = w.jet_component(&m, Field::Even(0), &mi);
        let rhs = u
            .apply(&m, &v.jet_component(&m, Field::Even(0), &mi))
            .sub(&v.apply(&m, &u.jet_component(&m, Field::Even(0), &mi)));
        assert_eq!(lhs, rhs, "bracket prolongation on {coord}");
    }

    #[test]
    fn truncation_watermark_only_grows() {
        let m = model_1d();
        assert_eq!(m.max_order(), 0);
        let e = total_derivative(&m, &y(&[0, 0]), 0).unwrap();
        assert_eq!(m.max_order(), 3);
        let _ = total_derivative(&m, &y(&[]), 0).unwrap();
        assert_eq!(m.max_order(), 3, "watermark never shrinks");
        let _ = e;
    }

    #[test]
    fn not_projectable_is_reported() {
        let m = model_1d();
        let u = ContactDerivation::even(&m, vec![y(&[])], vec![Expression::zero()], vec![]).unwrap();
        assert!(matches!(
            prolong_vector_field(&m, &u, 1),
            Err(JetError::NotProjectable(_))
        ));
    }
}
