//! Lagrangians as horizontal densities: Euler–Lagrange operators (even and
//! graded), Lepage equivalents, the first variational formula, symmetry
//! classification, Noether currents, and variational-triviality testing.

use crate::expr::{rat, Atom, ExprParity, Expression, Field};
use crate::forms::{d_h, d_v, interior_product, wedge, DifferentialForm, FormsError};
use crate::index::MultiIndex;
use crate::jet::{total_derivative, total_derivative_multi, ContactDerivation, JetModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VarError {
    #[error("Lagrangian density must be even; parity is {0:?}")]
    OddDensity(ExprParity),
    #[error("operation supports Lagrangians of order ≤ 2; this one has order {0}")]
    OrderTooHigh(usize),
    #[error("derivation is not projectable; symmetry classification needs υ^λ = υ^λ(x)")]
    NotProjectable,
    #[error("{0}")]
    Forms(#[from] FormsError),
}

/// A horizontal density `L·ω` of finite order, stored by its coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lagrangian {
    pub density: Expression,
    pub order: usize,
}

impl Lagrangian {
    pub fn new(model: &JetModel, density: Expression) -> Result<Lagrangian, VarError> {
        match density.parity() {
            ExprParity::Even => {}
            p => return Err(VarError::OddDensity(p)),
        }
        let order = density.max_jet_order();
        model.note_order(order as u32);
        Ok(Lagrangian { density, order })
    }
}

/// Variational derivatives `E_A = Σ_Λ (−1)^{|Λ|} d_Λ(∂^Λ_A L)`, one per
/// field (even and odd), with left graded derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerLagrange {
    pub even: Vec<Expression>,
    pub odd: Vec<Expression>,
}

impl EulerLagrange {
    pub fn component(&self, f: Field) -> &Expression {
        match f {
            Field::Even(i) => &self.even[i as usize],
            Field::Odd(a) => &self.odd[a as usize],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.even.iter().chain(&self.odd).all(Expression::is_zero)
    }
}

pub fn euler_lagrange(model: &JetModel, lag: &Lagrangian) -> EulerLagrange {
    let comp = |f: Field| {
        let mut e = Expression::zero();
        for (field, mi) in lag.density.jet_atoms() {
            if field != f {
                continue;
            }
            let dl = lag
                .density
                .partial(&Atom::jet(field, mi.clone()))
                .expect("coordinate atom");
            if dl.is_zero() {
                continue;
            }
            let term = total_derivative_multi(model, &dl, &mi).expect("declared index");
            e = if mi.len() % 2 == 0 {
                e.add(&term)
            } else {
                e.sub(&term)
            };
        }
        e
    };
    EulerLagrange {
        even: (0..model.n_even()).map(|i| comp(Field::Even(i))).collect(),
        odd: (0..model.n_odd()).map(|a| comp(Field::Odd(a))).collect(),
    }
}

/// `δL = 0` iff every variational derivative normalizes to zero (the local
/// criterion; on coordinate domains this is equivalent to `L = h₀σ + d_Hξ`).
pub fn is_variationally_trivial(model: &JetModel, lag: &Lagrangian) -> bool {
    euler_lagrange(model, lag).is_zero()
}

/// Lepage coefficient tables for an order ≤ 2 Lagrangian, the free local
/// functions σ set to zero:
/// `F^{μλ}_A` is the symmetric-tensor representative of `∂^{μλ}_A L`, and
/// `F^λ_A = ∂^λ_A L − d_μ F^{μλ}_A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LepageForm {
    /// `f1[field][λ]`
    pub f1: Vec<Vec<Expression>>,
    /// `f2[field][λ][ν]`, symmetric in `(λ, ν)`
    pub f2: Vec<Vec<Vec<Expression>>>,
    pub fields: Vec<Field>,
}

pub fn lepage(model: &JetModel, lag: &Lagrangian) -> Result<LepageForm, VarError> {
    if lag.order > 2 {
        return Err(VarError::OrderTooHigh(lag.order));
    }
    let n = model.base_dim() as usize;
    let fields: Vec<Field> = model.fields().collect();
    let mut f2 = vec![vec![vec![Expression::zero(); n]; n]; fields.len()];
    for (fi, f) in fields.iter().enumerate() {
        for lam in 0..n {
            for nu in 0..n {
                let mi = MultiIndex::from_slice(&[lam as u8, nu as u8]);
                let d = lag
                    .density
                    .partial(&Atom::jet(*f, mi))
                    .expect("coordinate atom");
                // ordered-pair representative: halve the mixed entries
                f2[fi][lam][nu] = if lam == nu { d } else { d.scale(&rat(1, 2)) };
            }
        }
    }
    let mut f1 = vec![vec![Expression::zero(); n]; fields.len()];
    for (fi, f) in fields.iter().enumerate() {
        for lam in 0..n {
            let mut e = lag
                .density
                .partial(&Atom::jet(*f, MultiIndex::single(lam as u8)))
                .expect("coordinate atom");
            for mu in 0..n {
                let d = total_derivative(model, &f2[fi][mu][lam], mu as u32).expect("index");
                e = e.sub(&d);
            }
            f1[fi][lam] = e;
        }
    }
    Ok(LepageForm { f1, f2, fields })
}

/// The Lepage equivalent as a form:
/// `Ξ_L = Lω + [F^λ_A θ^A + F^{λν}_A θ^A_ν] ∧ ω_λ`, built generator-left so
/// the graded coefficient moves are handled by the wedge.
pub fn lepage_form(model: &JetModel, lag: &Lagrangian) -> Result<DifferentialForm, VarError> {
    let lp = lepage(model, lag)?;
    let n = model.base_dim();
    let mut xi = DifferentialForm::volume(model).scale_left(&lag.density);
    for (fi, f) in lp.fields.iter().enumerate() {
        for lam in 0..n {
            let omega_l = DifferentialForm::volume_contracted(model, lam);
            let c1 = &lp.f1[fi][lam as usize];
            if !c1.is_zero() {
                let th = DifferentialForm::theta(model, *f, MultiIndex::empty());
                xi = xi.add(&wedge(&th, &omega_l.scale_left(c1))?);
            }
            for nu in 0..n {
                let c2 = &lp.f2[fi][lam as usize][nu as usize];
                if c2.is_zero() {
                    continue;
                }
                let th = DifferentialForm::theta(model, *f, MultiIndex::single(nu as u8));
                xi = xi.add(&wedge(&th, &omega_l.scale_left(c2))?);
            }
        }
    }
    Ok(xi)
}

/// `δL` as the source form `θ^A ∧ E_A ω`, generator-left.
pub fn euler_lagrange_form(model: &JetModel, lag: &Lagrangian) -> DifferentialForm {
    let el = euler_lagrange(model, lag);
    let omega = DifferentialForm::volume(model);
    let mut out = DifferentialForm::zero(model);
    for f in model.fields() {
        let e = el.component(f);
        if e.is_zero() {
            continue;
        }
        let th = DifferentialForm::theta(model, f, MultiIndex::empty());
        out = out.add(&wedge(&th, &omega.scale_left(e)).expect("same model"));
    }
    out
}

/// The Lie derivative of the density form `L·ω` along a contact derivation,
/// by the Cartan formula; returns the coefficient of `ω`. The `υ^λ d_λ L`
/// and `L d_λ υ^λ` contributions enter through the volume form.
pub fn lie_derivative_density(
    model: &JetModel,
    v: &ContactDerivation,
    lag: &Lagrangian,
) -> Result<Expression, VarError> {
    let form = crate::forms::lie_derivative(
        model,
        v,
        &DifferentialForm::volume(model).scale_left(&lag.density),
    )?;
    Ok(form.density_coefficient(model))
}

/// Residual of the first variational formula
/// `L_ϑ(Lω) = υ_V⌋δL + d_H(h₀(ϑ⌋Ξ_L)) + L·d_V(υ_H⌋ω)`,
/// returned as an n-form; identically zero for order ≤ 2.
pub fn first_variational_residual(
    model: &JetModel,
    v: &ContactDerivation,
    lag: &Lagrangian,
) -> Result<DifferentialForm, VarError> {
    let l_omega = DifferentialForm::volume(model).scale_left(&lag.density);
    let lhs = crate::forms::lie_derivative(model, v, &l_omega)?;

    let v_vert = v.vertical_part(model);
    let term1 = interior_product(model, &v_vert, &euler_lagrange_form(model, lag))?;

    let xi = lepage_form(model, lag)?;
    let term2 = d_h(model, &interior_product(model, v, &xi)?.horizontalize());

    let v_hor = v.horizontal_part(model);
    let omega = DifferentialForm::volume(model);
    let contracted = interior_product(model, &v_hor, &omega)?;
    let term3 = d_v(model, &contracted).scale_left(&lag.density);

    Ok(lhs.sub(&term1).sub(&term2).sub(&term3))
}

/// Classification of a contact derivation against a Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    /// `L_ϑ L = 0` identically.
    Exact,
    /// `L_ϑ L` is a total divergence (its variational derivatives vanish).
    Variational,
    /// Neither.
    None,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymmetryClass::Exact => write!(f, "exact"),
            SymmetryClass::Variational => write!(f, "variational"),
            SymmetryClass::None => write!(f, "none"),
        }
    }
}

/// Classifies a projectable contact derivation. A non-projectable one is
/// reported as an error, not silently classified.
pub fn check_symmetry(
    model: &JetModel,
    v: &ContactDerivation,
    lag: &Lagrangian,
) -> Result<SymmetryClass, VarError> {
    if !v.is_projectable() {
        return Err(VarError::NotProjectable);
    }
    let lie = lie_derivative_density(model, v, lag)?;
    if lie.is_zero() {
        return Ok(SymmetryClass::Exact);
    }
    let as_lag = Lagrangian {
        order: lie.max_jet_order(),
        density: lie,
    };
    if euler_lagrange(model, &as_lag).is_zero() {
        Ok(SymmetryClass::Variational)
    } else {
        Ok(SymmetryClass::None)
    }
}

/// Noether current `J^μ` with `J = J^μ ω_μ = −h₀(ϑ⌋Ξ_L)`.
pub fn noether_current(
    model: &JetModel,
    v: &ContactDerivation,
    lag: &Lagrangian,
) -> Result<Vec<Expression>, VarError> {
    let xi = lepage_form(model, lag)?;
    let j = interior_product(model, v, &xi)?.horizontalize().neg();
    let n = model.base_dim();
    let mut out = Vec::with_capacity(n as usize);
    for mu in 0..n {
        let gens: Vec<crate::forms::Gen> = (0..n)
            .filter(|&l| l != mu)
            .map(crate::forms::Gen::Dx)
            .collect();
        let c = j.coefficient(&gens);
        out.push(if mu % 2 == 0 { c } else { c.neg() });
    }
    Ok(out)
}

/// Off-shell conservation residual: the coefficient of `ω` in
/// `d_H(J) − υ_V⌋δL`. For an exact symmetry this is identically zero; on
/// shell it reduces to the weak law `d_H J ≈ 0`.
pub fn conservation_residual(
    model: &JetModel,
    v: &ContactDerivation,
    lag: &Lagrangian,
) -> Result<Expression, VarError> {
    let xi = lepage_form(model, lag)?;
    let j_form = interior_product(model, v, &xi)?.horizontalize().neg();
    let dj = d_h(model, &j_form).density_coefficient(model);
    let v_vert = v.vertical_part(model);
    let source = interior_product(model, &v_vert, &euler_lagrange_form(model, lag))?
        .density_coefficient(model);
    Ok(dj.sub(&source))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat_int, FuncKind, Parity};

    fn model_tx() -> JetModel {
        JetModel::new(
            vec!["t".into(), "x".into()],
            vec!["y".into()],
            vec![],
            vec![],
        )
        .unwrap()
    }

    fn model_x() -> JetModel {
        JetModel::new(vec!["x".into()], vec!["y".into()], vec![], vec![]).unwrap()
    }

    fn y(mi: &[u8]) -> Expression {
        Expression::jet(Field::Even(0), MultiIndex::from_slice(mi))
    }

    fn half(e: Expression) -> Expression {
        e.scale(&rat(1, 2))
    }

    #[test]
    fn free_particle_el() {
        // L = ½ y_x² → E = −y_xx
        let m = model_x();
        let lag = Lagrangian::new(&m, half(y(&[0]).mul(&y(&[0])))).unwrap();
        let el = euler_lagrange(&m, &lag);
        assert_eq!(el.even[0], y(&[0, 0]).neg());
    }

    #[test]
    fn sine_gordon_el() {
        // L = ½(y_t² − y_x²) − (1 − cos y) → E = −y_tt + y_xx − sin y
        let m = model_tx();
        let kinetic = half(y(&[0]).mul(&y(&[0]))).sub(&half(y(&[1]).mul(&y(&[1]))));
        let cos_y = Expression::func(FuncKind::Cos, y(&[])).unwrap();
        let potential = Expression::one().sub(&cos_y);
        let lag = Lagrangian::new(&m, kinetic.sub(&potential)).unwrap();
        let el = euler_lagrange(&m, &lag);
        let sin_y = Expression::func(FuncKind::Sin, y(&[])).unwrap();
        let want = y(&[0, 0]).neg().add(&y(&[1, 1])).sub(&sin_y);
        assert_eq!(el.even[0], want);
    }

    #[test]
    fn divergence_is_trivial() {
        // L = d_x(y²) and L = d_x(y·y_x) are variationally trivial
        let m = model_x();
        for f in [y(&[]).mul(&y(&[])), y(&[]).mul(&y(&[0]))] {
            let div = total_derivative(&m, &f, 0).unwrap();
            let lag = Lagrangian::new(&m, div).unwrap();
            assert!(is_variationally_trivial(&m, &lag));
        }
        // ½y_x² is not
        let lag = Lagrangian::new(&m, half(y(&[0]).mul(&y(&[0])))).unwrap();
        assert!(!is_variationally_trivial(&m, &lag));
        // constant density is
        let lag = Lagrangian::new(&m, Expression::one()).unwrap();
        assert!(is_variationally_trivial(&m, &lag));
    }

    #[test]
    fn lepage_first_order() {
        // L = ½y_x² → F^x = y_x and h₀(Ξ_L) = Lω
        let m = model_x();
        let lag = Lagrangian::new(&m, half(y(&[0]).mul(&y(&[0])))).unwrap();
        let lp = lepage(&m, &lag).unwrap();
        assert_eq!(lp.f1[0][0], y(&[0]));
        let xi = lepage_form(&m, &lag).unwrap();
        assert_eq!(
            xi.horizontalize(),
            DifferentialForm::volume(&m).scale_left(&lag.density)
        );
        // jet-independent L: Ξ_L = Lω
        let lag0 = Lagrangian::new(&m, Expression::base(0)).unwrap();
        assert_eq!(
            lepage_form(&m, &lag0).unwrap(),
            DifferentialForm::volume(&m).scale_left(&lag0.density)
        );
    }

    #[test]
    fn order_cap() {
        let m = model_x();
        let lag = Lagrangian::new(&m, y(&[0, 0, 0]).mul(&y(&[0, 0, 0]))).unwrap();
        assert!(matches!(lepage(&m, &lag), Err(VarError::OrderTooHigh(3))));
    }

    #[test]
    fn lie_derivative_examples() {
        let m = model_x();
        let lag = Lagrangian::new(&m, half(y(&[0]).mul(&y(&[0])))).unwrap();
        // autonomous L is translation invariant
        let dx = ContactDerivation::even(
            &m,
            vec![Expression::one()],
            vec![Expression::zero()],
            vec![],
        )
        .unwrap();
        assert!(lie_derivative_density(&m, &dx, &lag).unwrap().is_zero());
        // ϑ = 0
        let z = ContactDerivation::zero(&m);
        assert!(lie_derivative_density(&m, &z, &lag).unwrap().is_zero());
        // scaling y∂_y has weight 2 on ½y_x²
        let scaling =
            ContactDerivation::even(&m, vec![Expression::zero()], vec![y(&[])], vec![]).unwrap();
        assert_eq!(
            lie_derivative_density(&m, &scaling, &lag).unwrap(),
            y(&[0]).mul(&y(&[0]))
        );
    }

    #[test]
    fn first_variational_formula_instances() {
        let m = model_x();
        let lag = Lagrangian::new(&m, half(y(&[0]).mul(&y(&[0])))).unwrap();
        let cases = [
            ContactDerivation::even(&m, vec![Expression::base(0)], vec![y(&[])], vec![]).unwrap(),
            ContactDerivation::even(&m, vec![Expression::zero()], vec![y(&[0])], vec![]).unwrap(),
            ContactDerivation::zero(&m),
        ];
        for v in cases {
            assert!(first_variational_residual(&m, &v, &lag).unwrap().is_zero());
        }
        // vertical ϑ on an order-1 L, υ_H term absent
        let m2 = model_tx();
        let lag2 = Lagrangian::new(
            &m2,
            half(y(&[0]).mul(&y(&[0]))).sub(&half(y(&[1]).mul(&y(&[1])))),
        )
        .unwrap();
        let vert = ContactDerivation::even(
            &m2,
            vec![Expression::zero(), Expression::zero()],
            vec![y(&[]).mul(&y(&[]))],
            vec![],
        )
        .unwrap();
        assert!(first_variational_residual(&m2, &vert, &lag2)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn symmetry_classification() {
        let m = model_x();
        let lag = Lagrangian::new(&m, half(y(&[0]).mul(&y(&[0])))).unwrap();
        // ∂_x: exact
        let dx = ContactDerivation::even(
            &m,
            vec![Expression::one()],
            vec![Expression::zero()],
            vec![],
        )
        .unwrap();
        assert_eq!(check_symmetry(&m, &dx, &lag).unwrap(), SymmetryClass::Exact);
        // y∂_y: none (L_ϑL = y_x², EL = −2y_xx ≠ 0)
        let sc =
            ContactDerivation::even(&m, vec![Expression::zero()], vec![y(&[])], vec![]).unwrap();
        assert_eq!(check_symmetry(&m, &sc, &lag).unwrap(), SymmetryClass::None);
        // Galilean boost x∂_y on ½y_x²: L_ϑL = y_x = d_x(y), variational
        let boost = ContactDerivation::even(&m, vec![Expression::zero()], vec![Expression::base(0)], vec![])
            .unwrap();
        assert_eq!(
            check_symmetry(&m, &boost, &lag).unwrap(),
            SymmetryClass::Variational
        );
        // x∂_x + ½y∂_y: exact scaling symmetry
        let dil = ContactDerivation::even(
            &m,
            vec![Expression::base(0)],
            vec![y(&[]).scale(&rat(1, 2))],
            vec![],
        )
        .unwrap();
        assert_eq!(check_symmetry(&m, &dil, &lag).unwrap(), SymmetryClass::Exact);
        // generalized (non-projectable) derivation is reported
        let gen =
            ContactDerivation::even(&m, vec![y(&[0])], vec![Expression::zero()], vec![]).unwrap();
        assert_eq!(
            check_symmetry(&m, &gen, &lag).unwrap_err(),
            VarError::NotProjectable
        );
    }

    #[test]
    fn wave_energy_current() {
        // ϑ = ∂_t on the wave Lagrangian: J^t = ½y_t² + ½y_x², J^x = −y_t y_x
        // (overall sign anchored by the conservation identity)
        let m = model_tx();
        let lag = Lagrangian::new(
            &m,
            half(y(&[0]).mul(&y(&[0]))).sub(&half(y(&[1]).mul(&y(&[1])))),
        )
        .unwrap();
        let dt = ContactDerivation::even(
            &m,
            vec![Expression::one(), Expression::zero()],
            vec![Expression::zero()],
            vec![],
        )
        .unwrap();
        let j = noether_current(&m, &dt, &lag).unwrap();
        let want_t = half(y(&[0]).mul(&y(&[0]))).add(&half(y(&[1]).mul(&y(&[1]))));
        assert_eq!(j[0], want_t);
        assert_eq!(j[1], y(&[0]).mul(&y(&[1])).neg());
        assert!(conservation_residual(&m, &dt, &lag).unwrap().is_zero());
        // ϑ = 0 → zero current
        let z = ContactDerivation::zero(&m);
        assert!(noether_current(&m, &z, &lag).unwrap().iter().all(Expression::is_zero));
        assert!(conservation_residual(&m, &z, &lag).unwrap().is_zero());
    }

    #[test]
    fn vertical_shift_current() {
        // ϑ = ∂_y on the free L = ½Σ y_μ²: J^μ = −y_μ, and
        // d_μ J^μ = υ_V E with E = −□y
        let m = model_tx();
        let lag = Lagrangian::new(
            &m,
            half(y(&[0]).mul(&y(&[0]))).add(&half(y(&[1]).mul(&y(&[1])))),
        )
        .unwrap();
        let dy = ContactDerivation::even(
            &m,
            vec![Expression::zero(), Expression::zero()],
            vec![Expression::one()],
            vec![],
        )
        .unwrap();
        let j = noether_current(&m, &dy, &lag).unwrap();
        assert_eq!(j[0], y(&[0]).neg());
        assert_eq!(j[1], y(&[1]).neg());
        assert!(conservation_residual(&m, &dy, &lag).unwrap().is_zero());
    }

    #[test]
    fn noether_current_is_linear() {
        let m = model_tx();
        let lag = Lagrangian::new(
            &m,
            half(y(&[0]).mul(&y(&[0]))).sub(&half(y(&[1]).mul(&y(&[1])))),
        )
        .unwrap();
        let u = ContactDerivation::even(
            &m,
            vec![Expression::one(), Expression::zero()],
            vec![y(&[])],
            vec![],
        )
        .unwrap();
        let v = ContactDerivation::even(
            &m,
            vec![Expression::zero(), Expression::base(0)],
            vec![Expression::one()],
            vec![],
        )
        .unwrap();
        // 3u − 2v, componentwise
        let comb = ContactDerivation::even(
            &m,
            vec![
                u.xi[0].scale(&rat_int(3)).sub(&v.xi[0].scale(&rat_int(2))),
                u.xi[1].scale(&rat_int(3)).sub(&v.xi[1].scale(&rat_int(2))),
            ],
            vec![u.v_even[0]
                .scale(&rat_int(3))
                .sub(&v.v_even[0].scale(&rat_int(2)))],
            vec![],
        )
        .unwrap();
        let ju = noether_current(&m, &u, &lag).unwrap();
        let jv = noether_current(&m, &v, &lag).unwrap();
        let jc = noether_current(&m, &comb, &lag).unwrap();
        for mu in 0..2 {
            let want = ju[mu].scale(&rat_int(3)).sub(&jv[mu].scale(&rat_int(2)));
            assert_eq!(jc[mu], want);
        }
    }

    #[test]
    fn graded_el_parity() {
        // L = c·c_x on one odd field: E_c has odd parity, never mixed
        let m = JetModel::new(vec!["x".into()], vec![], vec!["c".into()], vec![]).unwrap();
        let c = Expression::jet(Field::Odd(0), MultiIndex::empty());
        let cx = Expression::jet(Field::Odd(0), MultiIndex::single(0));
        let lag = Lagrangian::new(&m, c.mul(&cx)).unwrap();
        let el = euler_lagrange(&m, &lag);
        // E_c = ∂_c L − d_x ∂^x_c L = c_x − d_x(−c) = 2 c_x
        assert_eq!(el.odd[0], cx.scale(&rat_int(2)));
        assert_eq!(el.odd[0].parity(), ExprParity::Odd);
        // odd density is rejected
        assert!(matches!(
            Lagrangian::new(&m, c.clone()),
            Err(VarError::OddDensity(ExprParity::Odd))
        ));
    }

    #[test]
    fn graded_first_variational_formula() {
        // odd field with an even density; even and odd derivations
        let m = JetModel::new(
            vec!["x".into()],
            vec!["y".into()],
            vec!["c".into()],
            vec![],
        )
        .unwrap();
        let c = Expression::jet(Field::Odd(0), MultiIndex::empty());
        let cx = Expression::jet(Field::Odd(0), MultiIndex::single(0));
        let lag = Lagrangian::new(
            &m,
            c.mul(&cx).add(&half(y(&[0]).mul(&y(&[0])))).add(&y(&[]).mul(&c).mul(&cx)),
        )
        .unwrap();
        let even_v = ContactDerivation::even(
            &m,
            vec![Expression::base(0)],
            vec![y(&[])],
            vec![c.clone()],
        )
        .unwrap();
        assert!(first_variational_residual(&m, &even_v, &lag)
            .unwrap()
            .is_zero());
        let odd_v = ContactDerivation::new(
            &m,
            Parity::Odd,
            vec![Expression::zero()],
            vec![c.clone()],
            vec![y(&[])],
        )
        .unwrap();
        assert!(first_variational_residual(&m, &odd_v, &lag)
            .unwrap()
            .is_zero());
    }
}
