//! Bigraded exterior calculus on finite-order jet coordinates.
//!
//! Forms are stored in the `{dx^λ, θ^A_Λ}` basis with coefficients to the
//! left of the wedge monomial; input in the `{dx, dy}` basis is converted on
//! construction via `dy^A_Λ = θ^A_Λ + s^A_{λ+Λ} dx^λ`. Generators carry a
//! form degree of one each; `θ` of an odd field also carries Grassmann
//! parity one, so two odd-field generators commute (`dc^i∧dc^j = dc^j∧dc^i`)
//! while every other pair anticommutes, and an odd coefficient anticommutes
//! past an odd-field generator.

use crate::expr::{Expression, Field, Parity};
use crate::index::MultiIndex;
use crate::jet::{total_derivative, ContactDerivation, JetModel};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormsError {
    #[error("forms belong to different models")]
    ModelMismatch,
    #[error("cannot contract a zero-form")]
    DegreeZero,
}

/// One basis generator of the contact-split cotangent space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// `dx^λ`
    Dx(u32),
    /// Contact form `θ^A_Λ = dy^A_Λ − s^A_{λ+Λ} dx^λ`
    Th(Field, MultiIndex),
}

impl Gen {
    /// Grassmann parity of the generator; form degree is always one.
    pub fn grassmann_odd(&self) -> bool {
        matches!(self, Gen::Th(Field::Odd(_), _))
    }
}

/// Sorts generators into canonical order. Returns `None` when a repeated
/// even-type generator annihilates the monomial, otherwise the sign.
fn sort_gens(mut gens: Vec<Gen>) -> Option<(bool, Vec<Gen>)> {
    let mut neg = false;
    // insertion sort; adjacent swap of two odd-field generators is free,
    // every other adjacent swap flips the sign
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j] < gens[j - 1] {
            if !(gens[j].grassmann_odd() && gens[j - 1].grassmann_odd()) {
                neg = !neg;
            }
            gens.swap(j, j - 1);
            j -= 1;
        }
    }
    for w in gens.windows(2) {
        if w[0] == w[1] && !w[0].grassmann_odd() {
            return None;
        }
    }
    Some((neg, gens))
}

fn mono_grassmann_parity(gens: &[Gen]) -> Parity {
    if gens.iter().filter(|g| g.grassmann_odd()).count() % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// A bigraded differential form: a sum of `coefficient × wedge monomial`
/// terms. Terms of different degree may coexist; every operation acts on
/// homogeneous terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialForm {
    model_id: u64,
    terms: BTreeMap<Vec<Gen>, Expression>,
}

impl DifferentialForm {
    pub fn zero(model: &JetModel) -> Self {
        DifferentialForm {
            model_id: model.id(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(model: &JetModel, e: Expression) -> Self {
        let mut f = Self::zero(model);
        f.add_term(Vec::new(), e);
        f
    }

    pub fn dx(model: &JetModel, l: u32) -> Self {
        let mut f = Self::zero(model);
        f.add_term(vec![Gen::Dx(l)], Expression::one());
        f
    }

    pub fn theta(model: &JetModel, field: Field, mi: MultiIndex) -> Self {
        let mut f = Self::zero(model);
        f.add_term(vec![Gen::Th(field, mi)], Expression::one());
        f
    }

    /// `dy^A_Λ = θ^A_Λ + s^A_{λ+Λ} dx^λ`: holonomic basis input.
    pub fn dy(model: &JetModel, field: Field, mi: MultiIndex) -> Self {
        let mut f = Self::theta(model, field, mi.clone());
        for l in 0..model.base_dim() {
            let s = Expression::jet(field, mi.plus(l as u8));
            f.add_term(vec![Gen::Dx(l)], s);
        }
        model.note_order(mi.len() as u32 + 1);
        f
    }

    /// Volume form `ω = dx^0∧…∧dx^{n−1}`.
    pub fn volume(model: &JetModel) -> Self {
        let mut f = Self::zero(model);
        f.add_term(
            (0..model.base_dim()).map(Gen::Dx).collect(),
            Expression::one(),
        );
        f
    }

    /// `ω_λ = ∂_λ⌋ω`, with the sign `(−1)^λ` built in.
    pub fn volume_contracted(model: &JetModel, l: u32) -> Self {
        let mut f = Self::zero(model);
        let gens: Vec<Gen> = (0..model.base_dim()).filter(|&m| m != l).map(Gen::Dx).collect();
        let e = if l % 2 == 0 {
            Expression::one()
        } else {
            Expression::one().neg()
        };
        f.add_term(gens, e);
        f
    }

    pub fn model_id(&self) -> u64 {
        self.model_id
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Gen>, &Expression)> {
        self.terms.iter()
    }

    /// Coefficient of a given canonical monomial (zero when absent).
    pub fn coefficient(&self, gens: &[Gen]) -> Expression {
        self.terms.get(gens).cloned().unwrap_or_else(Expression::zero)
    }

    /// Coefficient of the volume monomial.
    pub fn density_coefficient(&self, model: &JetModel) -> Expression {
        let gens: Vec<Gen> = (0..model.base_dim()).map(Gen::Dx).collect();
        self.coefficient(&gens)
    }

    fn add_term(&mut self, gens: Vec<Gen>, e: Expression) {
        if e.is_zero() {
            return;
        }
        match self.terms.entry(gens) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(e);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&e);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, e) in &other.terms {
            out.add_term(g.clone(), e.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            model_id: self.model_id,
            terms: self.terms.iter().map(|(g, e)| (g.clone(), e.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Left multiplication by a scalar expression: `f ∧ φ`.
    pub fn scale_left(&self, f: &Expression) -> Self {
        let mut out = DifferentialForm {
            model_id: self.model_id,
            terms: BTreeMap::new(),
        };
        for (g, e) in &self.terms {
            out.add_term(g.clone(), f.mul(e));
        }
        out
    }

    /// Maps every coefficient (degree and monomials unchanged).
    pub fn map_coefficients(&self, mut f: impl FnMut(&Expression) -> Expression) -> Self {
        let mut out = DifferentialForm {
            model_id: self.model_id,
            terms: BTreeMap::new(),
        };
        for (g, e) in &self.terms {
            out.add_term(g.clone(), f(e));
        }
        out
    }

    /// Horizontal projection `h₀`: keeps only `dx`-monomials.
    pub fn horizontalize(&self) -> Self {
        DifferentialForm {
            model_id: self.model_id,
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| g.iter().all(|x| matches!(x, Gen::Dx(_))))
                .map(|(g, e)| (g.clone(), e.clone()))
                .collect(),
        }
    }

    /// Canonical splitting `φ = h₀φ + (φ − h₀φ)`.
    pub fn contact_split(&self) -> (Self, Self) {
        let h = self.horizontalize();
        let v = self.sub(&h);
        (h, v)
    }

    /// Prints as a sum of `coef * dx0^th[y;01]` monomials, `^` joining the
    /// generators, in canonical generator order.
    pub fn render(&self, model: &JetModel) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(gens, c)| {
                let mono: Vec<String> = gens.iter().map(|g| render_gen(model, g)).collect();
                if mono.is_empty() {
                    model.render(c)
                } else {
                    format!("({}) * {}", model.render(c), mono.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// JSON emission mirroring the term list: an array of
    /// `{"coef": ..., "mono": [...]}` objects in canonical order.
    pub fn to_json_terms(&self, model: &JetModel) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(gens, c)| {
                    serde_json::json!({
                        "coef": model.render(c),
                        "mono": gens.iter().map(|g| render_gen(model, g)).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

fn render_gen(model: &JetModel, g: &Gen) -> String {
    match g {
        Gen::Dx(l) => format!("dx{l}"),
        Gen::Th(f, mi) => {
            let mi_str: String = mi.iter().map(|l| l.to_string()).collect();
            format!("th[{};{mi_str}]", model.field_name(*f))
        }
    }
}

/// Exterior product with the bigraded sign rule
/// `φ∧φ' = (−1)^{|φ||φ'|+[φ][φ']} φ'∧φ`.
pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm, FormsError> {
    if a.model_id != b.model_id {
        return Err(FormsError::ModelMismatch);
    }
    let mut out = DifferentialForm {
        model_id: a.model_id,
        terms: BTreeMap::new(),
    };
    for (ga, ca) in &a.terms {
        let gp_a = mono_grassmann_parity(ga);
        for (gb, cb) in &b.terms {
            // move cb to the front, past ga
            let cb_moved = if gp_a == Parity::Odd {
                let (e, o) = cb.split_parity();
                e.sub(&o)
            } else {
                cb.clone()
            };
            let coeff = ca.mul(&cb_moved);
            if coeff.is_zero() {
                continue;
            }
            let mut gens = ga.clone();
            gens.extend(gb.iter().cloned());
            if let Some((neg, sorted)) = sort_gens(gens) {
                out.add_term(sorted, if neg { coeff.neg() } else { coeff });
            }
        }
    }
    Ok(out)
}

fn single_gen(model_id: u64, g: Gen) -> DifferentialForm {
    let mut f = DifferentialForm {
        model_id,
        terms: BTreeMap::new(),
    };
    f.add_term(vec![g], Expression::one());
    f
}

/// `d` of one generator: `d(dx) = 0`, `d(θ^A_Λ) = dx^λ ∧ θ^A_{λ+Λ}`.
fn d_gen(model: &JetModel, g: &Gen) -> DifferentialForm {
    match g {
        Gen::Dx(_) => DifferentialForm::zero(model),
        Gen::Th(f, mi) => {
            let mut out = DifferentialForm::zero(model);
            for l in 0..model.base_dim() {
                let dxl = single_gen(model.id(), Gen::Dx(l));
                let th = single_gen(model.id(), Gen::Th(*f, mi.plus(l as u8)));
                out = out.add(&wedge(&dxl, &th).expect("same model"));
            }
            model.note_order(mi.len() as u32 + 1);
            out
        }
    }
}

/// Vertical differential of a scalar:
/// `d_V f = Σ ±(∂^Λ_A f)·θ^A_Λ`, the sign moving the coefficient left past
/// an odd-field generator.
fn d_v_scalar(model: &JetModel, e: &Expression) -> DifferentialForm {
    let mut out = DifferentialForm::zero(model);
    for (field, mi) in e.jet_atoms() {
        let de = e
            .partial(&crate::expr::Atom::jet(field, mi.clone()))
            .expect("coordinate atom");
        if de.is_zero() {
            continue;
        }
        let coeff = if field.parity() == Parity::Odd {
            let (ev, od) = de.split_parity();
            ev.sub(&od)
        } else {
            de
        };
        out.add_term(vec![Gen::Th(field, mi)], coeff);
    }
    out
}

/// Full differential of a scalar: `d f = d_λ(f) dx^λ + d_V f`.
fn d_scalar(model: &JetModel, e: &Expression) -> DifferentialForm {
    let mut out = d_v_scalar(model, e);
    for l in 0..model.base_dim() {
        let dl = total_derivative(model, e, l).expect("declared index");
        out.add_term(vec![Gen::Dx(l)], dl);
    }
    out
}

/// Exterior differential, `d∘d = 0`.
pub fn exterior_d(model: &JetModel, phi: &DifferentialForm) -> DifferentialForm {
    let mut out = DifferentialForm::zero(model);
    for (gens, c) in &phi.terms {
        // d(c·w) = dc∧w + c·d(w), with d(w) expanded in place
        let w_form = mono_form(model.id(), gens);
        out = out.add(&wedge(&d_scalar(model, c), &w_form).expect("same model"));
        for (j, g) in gens.iter().enumerate() {
            let mut piece = mono_form(model.id(), &gens[..j]);
            piece = wedge(&piece, &d_gen(model, g)).expect("same model");
            piece = wedge(&piece, &mono_form(model.id(), &gens[j + 1..])).expect("same model");
            let signed = if j % 2 == 1 { piece.neg() } else { piece };
            out = out.add(&signed.scale_left(c));
        }
    }
    out
}

fn mono_form(model_id: u64, gens: &[Gen]) -> DifferentialForm {
    let mut f = DifferentialForm {
        model_id,
        terms: BTreeMap::new(),
    };
    f.add_term(gens.to_vec(), Expression::one());
    f
}

/// Total differential `d_H φ = dx^λ ∧ d_λ(φ)` where `d_λ` raises contact
/// generators: `d_λ(θ^A_Λ) = θ^A_{λ+Λ}`.
pub fn d_h(model: &JetModel, phi: &DifferentialForm) -> DifferentialForm {
    let mut out = DifferentialForm::zero(model);
    for l in 0..model.base_dim() {
        let dxl = single_gen(model.id(), Gen::Dx(l));
        out = out.add(&wedge(&dxl, &d_lambda(model, phi, l)).expect("same model"));
    }
    out
}

/// The even derivation `d_λ` on forms.
fn d_lambda(model: &JetModel, phi: &DifferentialForm, l: u32) -> DifferentialForm {
    let mut out = DifferentialForm::zero(model);
    for (gens, c) in &phi.terms {
        let dl = total_derivative(model, c, l).expect("declared index");
        out.add_term(gens.clone(), dl);
        for (j, g) in gens.iter().enumerate() {
            if let Gen::Th(f, mi) = g {
                let mut raised = gens.clone();
                raised[j] = Gen::Th(*f, mi.plus(l as u8));
                if let Some((neg, sorted)) = sort_gens(raised) {
                    let e = if neg { c.neg() } else { c.clone() };
                    out.add_term(sorted, e);
                }
                model.note_order(mi.len() as u32 + 1);
            }
        }
    }
    out
}

/// Vertical differential `d_V φ`: `d_V` of each coefficient wedged with the
/// monomial; generators are `d_V`-closed.
pub fn d_v(model: &JetModel, phi: &DifferentialForm) -> DifferentialForm {
    let mut out = DifferentialForm::zero(model);
    for (gens, c) in &phi.terms {
        let w_form = mono_form(model.id(), gens);
        out = out.add(&wedge(&d_v_scalar(model, c), &w_form).expect("same model"));
    }
    out
}

/// Interior product `ϑ⌋φ` of a (prolonged) contact derivation with a form,
/// the graded antiderivation rule
/// `u⌋(φ∧φ') = (u⌋φ)∧φ' + (−1)^{|φ|+[φ][u]} φ∧(u⌋φ')`.
pub fn interior_product(
    model: &JetModel,
    v: &ContactDerivation,
    phi: &DifferentialForm,
) -> Result<DifferentialForm, FormsError> {
    if phi.terms.keys().all(|g| g.is_empty()) && !phi.is_zero() {
        return Err(FormsError::DegreeZero);
    }
    let mut out = DifferentialForm::zero(model);
    for (gens, c) in &phi.terms {
        if gens.is_empty() {
            continue; // 0-form components contract to zero inside a mixed sum
        }
        let contracted = contract_mono(model, v, gens);
        // move c (parity-split) to the front: ϑ⌋(c·w) = ±c·(ϑ⌋w)
        let c_moved = if v.parity == Parity::Odd {
            let (e, o) = c.split_parity();
            e.sub(&o)
        } else {
            c.clone()
        };
        out = out.add(&contracted.scale_left(&c_moved));
    }
    Ok(out)
}

/// Contraction with a single wedge monomial, recursively:
/// `u⌋(g∧rest) = (u⌋g)·rest + (−1)^{1+[g][u]} g ∧ (u⌋rest)`.
fn contract_mono(model: &JetModel, v: &ContactDerivation, gens: &[Gen]) -> DifferentialForm {
    let Some((first, rest)) = gens.split_first() else {
        return DifferentialForm::zero(model);
    };
    let e1 = contract_gen(model, v, first);
    let mut out = mono_form(model.id(), rest).scale_left(&e1);
    let tail = contract_mono(model, v, rest);
    if !tail.is_zero() {
        let g_form = single_gen(model.id(), first.clone());
        let mut piece = wedge(&g_form, &tail).expect("same model");
        if !(first.grassmann_odd() && v.parity == Parity::Odd) {
            piece = piece.neg();
        }
        out = out.add(&piece);
    }
    out
}

/// `ϑ⌋dx^λ = υ^λ`, `ϑ⌋θ^A_Λ = d_Λ(υ_V^A)`.
fn contract_gen(model: &JetModel, v: &ContactDerivation, g: &Gen) -> Expression {
    match g {
        Gen::Dx(l) => v.xi[*l as usize].clone(),
        Gen::Th(f, mi) => v.contract_contact(model, *f, mi),
    }
}

/// Lie derivative by the Cartan formula `L_ϑφ = ϑ⌋dφ + d(ϑ⌋φ)`.
pub fn lie_derivative(
    model: &JetModel,
    v: &ContactDerivation,
    phi: &DifferentialForm,
) -> Result<DifferentialForm, FormsError> {
    let a = interior_product(model, v, &exterior_d(model, phi))?;
    let inner = match interior_product(model, v, phi) {
        Ok(f) => f,
        Err(FormsError::DegreeZero) => {
            // L on a 0-form is ϑ⌋dφ
            return Ok(a);
        }
        Err(e) => return Err(e),
    };
    Ok(a.add(&exterior_d(model, &inner)))
}
