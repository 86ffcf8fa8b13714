//! Connections on a fibred coordinate system in components: curvature,
//! soldered curvature, torsion, the shift relations under `Γ → Γ + σ`, and
//! the two Bianchi identities.
//!
//! Components are stored for `λ < μ` only; the accessor supplies the sign.
//! Everything lives over the even fields of a model, with `∂_j` the partial
//! with respect to the order-0 fibre coordinate `y^j`.

use crate::expr::{Atom, Expression};
use crate::index::MultiIndex;
use crate::jet::JetModel;
use crate::tvform::{fn_bracket, CoordSpace, TangentValuedForm, TvError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConnError {
    #[error("connection components must depend on order-0 coordinates only")]
    NotOrderZero,
    #[error("component table shape does not match the model")]
    Shape,
    #[error("{0}")]
    Tv(#[from] TvError),
}

fn check_components(model: &JetModel, comps: &[Vec<Expression>]) -> Result<(), ConnError> {
    if comps.len() != model.n_even() as usize
        || comps.iter().any(|row| row.len() != model.base_dim() as usize)
    {
        return Err(ConnError::Shape);
    }
    for row in comps {
        for e in row {
            let ok = e.atoms_all(|a| match a {
                Atom::Base(_) | Atom::Param(_) => true,
                Atom::EvenJet(_, mi) => mi.is_empty(),
                Atom::Func(..) => true,
                Atom::OddJet(..) => false,
            });
            if !ok {
                return Err(ConnError::NotOrderZero);
            }
        }
    }
    Ok(())
}

/// Nonlinear connection `Γ^i_λ(x, y)`, a section of the affine jet bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    /// `gamma[i][λ]`
    pub gamma: Vec<Vec<Expression>>,
}

impl Connection {
    pub fn new(model: &JetModel, gamma: Vec<Vec<Expression>>) -> Result<Connection, ConnError> {
        check_components(model, &gamma)?;
        Ok(Connection { gamma })
    }

    pub fn zero(model: &JetModel) -> Connection {
        Connection {
            gamma: vec![
                vec![Expression::zero(); model.base_dim() as usize];
                model.n_even() as usize
            ],
        }
    }

    /// `Γ + σ`.
    pub fn shifted(&self, sigma: &SolderingForm) -> Connection {
        Connection {
            gamma: self
                .gamma
                .iter()
                .zip(&sigma.sigma)
                .map(|(g, s)| g.iter().zip(s).map(|(a, b)| a.add(b)).collect())
                .collect(),
        }
    }

    /// The horizontal tangent-valued one-form `dx^λ ⊗ (∂_λ + Γ^i_λ ∂_i)`.
    pub fn as_tangent_valued(&self, model: &JetModel) -> TangentValuedForm {
        let space = conn_space(model);
        let mut tv = TangentValuedForm::zero(space, 1);
        for l in 0..space.n_base {
            tv.comps[l].add_term(vec![l as u8], Expression::one());
        }
        for (i, row) in self.gamma.iter().enumerate() {
            for (l, e) in row.iter().enumerate() {
                tv.comps[space.n_base + i].add_term(vec![l as u8], e.clone());
            }
        }
        tv
    }
}

/// Soldering form `σ^i_λ(x, y)`, a vertical-valued horizontal one-form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolderingForm {
    /// `sigma[i][λ]`
    pub sigma: Vec<Vec<Expression>>,
}

impl SolderingForm {
    pub fn new(model: &JetModel, sigma: Vec<Vec<Expression>>) -> Result<SolderingForm, ConnError> {
        check_components(model, &sigma)?;
        Ok(SolderingForm { sigma })
    }

    /// The vertical tangent-valued one-form `σ^i_λ dx^λ ⊗ ∂_i`.
    pub fn as_tangent_valued(&self, model: &JetModel) -> TangentValuedForm {
        let space = conn_space(model);
        let mut tv = TangentValuedForm::zero(space, 1);
        for (i, row) in self.sigma.iter().enumerate() {
            for (l, e) in row.iter().enumerate() {
                tv.comps[space.n_base + i].add_term(vec![l as u8], e.clone());
            }
        }
        tv
    }
}

pub fn conn_space(model: &JetModel) -> CoordSpace {
    CoordSpace {
        n_base: model.base_dim() as usize,
        n_fiber: model.n_even() as usize,
    }
}

/// Vertical-valued two-form components stored for `λ < μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalTwoForm {
    pub n_base: usize,
    /// `comps[i]` maps `(λ, μ)` with `λ < μ` to the component expression.
    pub comps: Vec<std::collections::BTreeMap<(u32, u32), Expression>>,
}

impl VerticalTwoForm {
    fn new(n_base: usize, n_fiber: usize) -> Self {
        VerticalTwoForm {
            n_base,
            comps: vec![Default::default(); n_fiber],
        }
    }

    fn set(&mut self, i: usize, l: u32, m: u32, e: Expression) {
        if !e.is_zero() {
            self.comps[i].insert((l, m), e);
        }
    }

    /// Component at arbitrary index order, antisymmetry supplied.
    pub fn get(&self, i: usize, l: u32, m: u32) -> Expression {
        match l.cmp(&m) {
            std::cmp::Ordering::Less => self.comps[i]
                .get(&(l, m))
                .cloned()
                .unwrap_or_else(Expression::zero),
            std::cmp::Ordering::Equal => Expression::zero(),
            std::cmp::Ordering::Greater => self.comps[i]
                .get(&(m, l))
                .cloned()
                .unwrap_or_else(Expression::zero)
                .neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_empty())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, comp) in other.comps.iter().enumerate() {
            for (&(l, m), e) in comp {
                let cur = out.get(i, l, m).sub(e);
                out.comps[i].remove(&(l, m));
                out.set(i, l, m, cur);
            }
        }
        out
    }

    /// `½ R^i_{λμ} dx^λ∧dx^μ ⊗ ∂_i` as a tangent-valued two-form.
    pub fn as_tangent_valued(&self, model: &JetModel) -> TangentValuedForm {
        let space = conn_space(model);
        let mut tv = TangentValuedForm::zero(space, 2);
        for (i, comp) in self.comps.iter().enumerate() {
            for (&(l, m), e) in comp {
                tv.comps[space.n_base + i].add_term(vec![l as u8, m as u8], e.clone());
            }
        }
        tv
    }
}

fn d_fiber(e: &Expression, j: u32) -> Expression {
    e.partial(&Atom::EvenJet(j, MultiIndex::empty()))
        .expect("coordinate atom")
}

fn d_base(e: &Expression, l: u32) -> Expression {
    e.partial(&Atom::Base(l)).expect("coordinate atom")
}

/// Curvature `R^i_{λμ} = ∂_λΓ^i_μ − ∂_μΓ^i_λ + Γ^j_λ∂_jΓ^i_μ − Γ^j_μ∂_jΓ^i_λ`.
pub fn curvature(model: &JetModel, conn: &Connection) -> VerticalTwoForm {
    let n = model.base_dim();
    let m = model.n_even();
    let mut out = VerticalTwoForm::new(n as usize, m as usize);
    for i in 0..m {
        for l in 0..n {
            for mu in (l + 1)..n {
                let gl = &conn.gamma[i as usize][l as usize];
                let gm = &conn.gamma[i as usize][mu as usize];
                let mut e = d_base(gm, l).sub(&d_base(gl, mu));
                for j in 0..m {
                    let gjl = &conn.gamma[j as usize][l as usize];
                    let gjm = &conn.gamma[j as usize][mu as usize];
                    e = e.add(&gjl.mul(&d_fiber(gm, j))).sub(&gjm.mul(&d_fiber(gl, j)));
                }
                out.set(i as usize, l, mu, e);
            }
        }
    }
    out
}

/// Soldered curvature `ρ^i_{λμ} = σ^j_λ∂_jσ^i_μ − σ^j_μ∂_jσ^i_λ`.
pub fn soldered_curvature(model: &JetModel, sol: &SolderingForm) -> VerticalTwoForm {
    let n = model.base_dim();
    let m = model.n_even();
    let mut out = VerticalTwoForm::new(n as usize, m as usize);
    for i in 0..m {
        for l in 0..n {
            for mu in (l + 1)..n {
                let mut e = Expression::zero();
                let si_l = &sol.sigma[i as usize][l as usize];
                let si_m = &sol.sigma[i as usize][mu as usize];
                for j in 0..m {
                    let sj_l = &sol.sigma[j as usize][l as usize];
                    let sj_m = &sol.sigma[j as usize][mu as usize];
                    e = e.add(&sj_l.mul(&d_fiber(si_m, j))).sub(&sj_m.mul(&d_fiber(si_l, j)));
                }
                out.set(i as usize, l, mu, e);
            }
        }
    }
    out
}

/// Torsion of `Γ` with respect to `σ`:
/// the display `(∂_λσ^i_μ + Γ^j_λ∂_jσ^i_μ − ∂_jΓ^i_λ σ^j_μ) dx^λ∧dx^μ ⊗ ∂_i`
/// antisymmetrized over `(λ, μ)`, which the wedge implies.
pub fn torsion(model: &JetModel, conn: &Connection, sol: &SolderingForm) -> VerticalTwoForm {
    let n = model.base_dim();
    let m = model.n_even();
    let display = |l: u32, mu: u32, i: u32| {
        let si_m = &sol.sigma[i as usize][mu as usize];
        let mut e = d_base(si_m, l);
        for j in 0..m {
            let gj_l = &conn.gamma[j as usize][l as usize];
            let gi_l = &conn.gamma[i as usize][l as usize];
            let sj_m = &sol.sigma[j as usize][mu as usize];
            e = e.add(&gj_l.mul(&d_fiber(si_m, j)));
            e = e.sub(&d_fiber(gi_l, j).mul(sj_m));
        }
        e
    };
    let mut out = VerticalTwoForm::new(n as usize, m as usize);
    for i in 0..m {
        for l in 0..n {
            for mu in (l + 1)..n {
                out.set(i as usize, l, mu, display(l, mu, i).sub(&display(mu, l, i)));
            }
        }
    }
    out
}

/// Residual of the curvature shift relation `R' = R + ρ + T` for
/// `Γ' = Γ + σ`; identically zero.
pub fn curvature_shift_residual(
    model: &JetModel,
    conn: &Connection,
    sol: &SolderingForm,
) -> VerticalTwoForm {
    let shifted = curvature(model, &conn.shifted(sol));
    let r = curvature(model, conn);
    let rho = soldered_curvature(model, sol);
    let t = torsion(model, conn, sol);
    shifted.sub(&r).sub(&rho).sub(&t)
}

/// Residual of the torsion shift relation `T' = T + 2ρ`.
pub fn torsion_shift_residual(
    model: &JetModel,
    conn: &Connection,
    sol: &SolderingForm,
) -> VerticalTwoForm {
    let shifted = torsion(model, &conn.shifted(sol), sol);
    let t = torsion(model, conn, sol);
    let mut rho2 = soldered_curvature(model, sol);
    for comp in &mut rho2.comps {
        for e in comp.values_mut() {
            *e = e.scale(&crate::expr::rat_int(2));
        }
    }
    shifted.sub(&t).sub(&rho2)
}

/// `curvature(Γ) − ½[Γ,Γ]_FN`, computed through the tangent-valued machinery;
/// identically zero.
pub fn curvature_vs_fn_residual(
    model: &JetModel,
    conn: &Connection,
) -> Result<TangentValuedForm, ConnError> {
    let tv = conn.as_tangent_valued(model);
    let half = fn_bracket(&tv, &tv)?.scale(&crate::expr::rat(1, 2));
    Ok(curvature(model, conn).as_tangent_valued(model).sub(&half))
}

/// Second Bianchi identity residuals: the cyclic sum
/// `Σ_{(λμν)} (∂_λ R^i_{μν} + Γ^j_λ ∂_j R^i_{μν} − ∂_jΓ^i_λ R^j_{μν})`,
/// one expression per `(i, λ<μ<ν)`.
pub fn second_bianchi_residuals(model: &JetModel, conn: &Connection) -> Vec<Expression> {
    let n = model.base_dim();
    let m = model.n_even();
    let r = curvature(model, conn);
    let covariant = |l: u32, mu: u32, nu: u32, i: u32| {
        let rc = r.get(i as usize, mu, nu);
        let mut e = d_base(&rc, l);
        for j in 0..m {
            e = e.add(&conn.gamma[j as usize][l as usize].mul(&d_fiber(&rc, j)));
            e = e.sub(&d_fiber(&conn.gamma[i as usize][l as usize], j).mul(&r.get(j as usize, mu, nu)));
        }
        e
    };
    let mut out = Vec::new();
    for i in 0..m {
        for l in 0..n {
            for mu in (l + 1)..n {
                for nu in (mu + 1)..n {
                    let cyc = covariant(l, mu, nu, i)
                        .add(&covariant(mu, nu, l, i))
                        .add(&covariant(nu, l, mu, i));
                    out.push(cyc);
                }
            }
        }
    }
    out
}

/// First Bianchi identity residual `d_Γ T − [R, σ]_FN` as a tangent-valued
/// three-form; identically zero.
pub fn first_bianchi_residual(
    model: &JetModel,
    conn: &Connection,
    sol: &SolderingForm,
) -> Result<TangentValuedForm, ConnError> {
    let gamma_tv = conn.as_tangent_valued(model);
    let t_tv = torsion(model, conn, sol).as_tangent_valued(model);
    let r_tv = curvature(model, conn).as_tangent_valued(model);
    let sigma_tv = sol.as_tangent_valued(model);
    let lhs = fn_bracket(&gamma_tv, &t_tv)?;
    let rhs = fn_bracket(&r_tv, &sigma_tv)?;
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Field as F;

    fn model(n: u32, m: u32) -> JetModel {
        JetModel::unnamed(n, m, 0)
    }

    fn y() -> Expression {
        Expression::jet(F::Even(0), MultiIndex::empty())
    }

    #[test]
    fn flat_connection() {
        let m = model(2, 1);
        let c = Connection::zero(&m);
        assert!(curvature(&m, &c).is_zero());
    }

    #[test]
    fn single_base_index_forces_zero() {
        let m = model(1, 1);
        let c = Connection::new(&m, vec![vec![y()]]).unwrap();
        assert!(curvature(&m, &c).is_zero());
    }

    #[test]
    fn curvature_by_hand() {
        // 2 base, Γ^y_0 = y, Γ^y_1 = x⁰y:
        // R^y_{01} = ∂_0(x⁰y) − ∂_1(y) + y·∂_y(x⁰y) − x⁰y·∂_y(y)
        //          = y + x⁰y − x⁰y = y
        let m = model(2, 1);
        let x0 = Expression::base(0);
        let c = Connection::new(&m, vec![vec![y(), x0.mul(&y())]]).unwrap();
        let r = curvature(&m, &c);
        assert_eq!(r.get(0, 0, 1), y());
    }

    #[test]
    fn soldered_curvature_examples() {
        let m = model(2, 1);
        // x-only soldering form has zero soldered curvature
        let s = SolderingForm::new(
            &m,
            vec![vec![Expression::base(0), Expression::base(1)]],
        )
        .unwrap();
        assert!(soldered_curvature(&m, &s).is_zero());
        // σ^y_0 = y, σ^y_1 = y² → ρ^y_{01} = y·2y − y²·1 = y²
        let s2 = SolderingForm::new(&m, vec![vec![y(), y().mul(&y())]]).unwrap();
        let rho = soldered_curvature(&m, &s2);
        assert_eq!(rho.get(0, 0, 1), y().mul(&y()));
    }

    #[test]
    fn torsion_zero_soldering() {
        let m = model(2, 1);
        let c = Connection::new(&m, vec![vec![y(), y().mul(&y())]]).unwrap();
        let s = SolderingForm::new(&m, vec![vec![Expression::zero(), Expression::zero()]]).unwrap();
        assert!(torsion(&m, &c, &s).is_zero());
    }

    #[test]
    fn torsion_partial_terms_only() {
        // Γ independent of y, σ constant: only the ∂-terms survive
        let m = model(2, 1);
        let x0 = Expression::base(0);
        let c = Connection::new(&m, vec![vec![x0.clone(), Expression::zero()]]).unwrap();
        let s = SolderingForm::new(
            &m,
            vec![vec![Expression::one(), Expression::from_int(2)]],
        )
        .unwrap();
        assert!(torsion(&m, &c, &s).is_zero());
        // make σ x-dependent: T^y_{01} = ∂_0σ^y_1 − ∂_1σ^y_0
        let s2 = SolderingForm::new(&m, vec![vec![Expression::zero(), x0.clone()]]).unwrap();
        let t = torsion(&m, &c, &s2);
        assert_eq!(t.get(0, 0, 1), Expression::one());
    }

    #[test]
    fn shift_relations() {
        let m = model(2, 1);
        let x0 = Expression::base(0);
        let c = Connection::new(&m, vec![vec![y(), x0.mul(&y())]]).unwrap();
        let s = SolderingForm::new(&m, vec![vec![y().mul(&y()), y()]]).unwrap();
        assert!(torsion_shift_residual(&m, &c, &s).is_zero());
        assert!(curvature_shift_residual(&m, &c, &s).is_zero());
        // Γ = 0 specialization: R(σ) = ρ(σ) + T(0, σ)
        let z = Connection::zero(&m);
        assert!(curvature_shift_residual(&m, &z, &s).is_zero());
    }

    #[test]
    fn curvature_equals_half_fn_bracket() {
        let m = model(2, 1);
        let x0 = Expression::base(0);
        let c = Connection::new(&m, vec![vec![y().mul(&x0), y().mul(&y())]]).unwrap();
        assert!(curvature_vs_fn_residual(&m, &c).unwrap().is_zero());
    }

    #[test]
    fn bianchi_identities() {
        let m = model(3, 1);
        let x0 = Expression::base(0);
        let x1 = Expression::base(1);
        let c = Connection::new(
            &m,
            vec![vec![y().mul(&x1), y().mul(&y()), x0.mul(&y())]],
        )
        .unwrap();
        for r in second_bianchi_residuals(&m, &c) {
            assert!(r.is_zero());
        }
        let s = SolderingForm::new(&m, vec![vec![y(), x0.mul(&y()), y().mul(&y())]]).unwrap();
        assert!(first_bianchi_residual(&m, &c, &s).unwrap().is_zero());
    }

    #[test]
    fn rejects_higher_order_components() {
        let m = model(2, 1);
        let yx = Expression::jet(F::Even(0), MultiIndex::single(0));
        assert!(matches!(
            Connection::new(&m, vec![vec![yx, Expression::zero()]]),
            Err(ConnError::NotOrderZero)
        ));
    }
}
