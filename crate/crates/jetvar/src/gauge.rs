//! Principal-connection field strength and principal vector fields in
//! coordinates, for a gauge algebra given by structure constants.
//!
//! The bundle of principal connections carries coordinates `a^r_μ`; here
//! they are the order-0 fibre coordinates of a dedicated model, one even
//! field per `(r, μ)` pair.

use crate::expr::{rat_int, Atom, Expression, Field, Rat};
use crate::index::MultiIndex;
use crate::jet::{ContactDerivation, JetModel};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaugeError {
    #[error("structure constants must be antisymmetric in the lower indices")]
    NotAntisymmetric,
    #[error("structure constants violate the Jacobi identity")]
    JacobiIdentity,
    #[error("algebra index out of range for this gauge algebra")]
    AlgebraMismatch,
    #[error("component table shape mismatch")]
    Shape,
    #[error("components must depend on base coordinates only")]
    NotBaseOnly,
}

/// A finite-dimensional Lie algebra by structure constants
/// `[e_p, e_q] = c^r_{pq} e_r`, validated at load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeAlgebra {
    /// `c[r][p][q]`
    c: Vec<Vec<Vec<Rat>>>,
}

impl GaugeAlgebra {
    pub fn new(c: Vec<Vec<Vec<Rat>>>) -> Result<GaugeAlgebra, GaugeError> {
        let k = c.len();
        for plane in &c {
            if plane.len() != k || plane.iter().any(|row| row.len() != k) {
                return Err(GaugeError::Shape);
            }
        }
        for r in 0..k {
            for p in 0..k {
                for q in 0..k {
                    if c[r][p][q] != -&c[r][q][p] {
                        return Err(GaugeError::NotAntisymmetric);
                    }
                }
            }
        }
        // Σ_m (c^m_{pq} c^s_{mr} + cyclic in pqr) = 0
        for s in 0..k {
            for p in 0..k {
                for q in 0..k {
                    for r in 0..k {
                        let mut sum = Rat::zero();
                        for m in 0..k {
                            sum += &c[m][p][q] * &c[s][m][r];
                            sum += &c[m][q][r] * &c[s][m][p];
                            sum += &c[m][r][p] * &c[s][m][q];
                        }
                        if !sum.is_zero() {
                            return Err(GaugeError::JacobiIdentity);
                        }
                    }
                }
            }
        }
        Ok(GaugeAlgebra { c })
    }

    pub fn abelian(dim: usize) -> GaugeAlgebra {
        GaugeAlgebra {
            c: vec![vec![vec![Rat::zero(); dim]; dim]; dim],
        }
    }

    /// su(2) with `c^r_{pq} = ε_{rpq}`.
    pub fn su2() -> GaugeAlgebra {
        let mut c = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
        let eps: [(usize, usize, usize, i64); 6] = [
            (0, 1, 2, 1),
            (1, 2, 0, 1),
            (2, 0, 1, 1),
            (0, 2, 1, -1),
            (2, 1, 0, -1),
            (1, 0, 2, -1),
        ];
        for (r, p, q, s) in eps {
            c[r][p][q] = rat_int(s);
        }
        GaugeAlgebra::new(c).expect("ε is a Lie algebra")
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self, r: usize, p: usize, q: usize) -> &Rat {
        &self.c[r][p][q]
    }
}

/// Principal connection in coordinates: `a^r_μ(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalConnectionField {
    /// `a[r][μ]`
    pub a: Vec<Vec<Expression>>,
}

impl PrincipalConnectionField {
    pub fn new(
        alg: &GaugeAlgebra,
        a: Vec<Vec<Expression>>,
    ) -> Result<PrincipalConnectionField, GaugeError> {
        if a.len() != alg.dim() {
            return Err(GaugeError::AlgebraMismatch);
        }
        let n = a.first().map(|r| r.len()).unwrap_or(0);
        if a.iter().any(|row| row.len() != n) {
            return Err(GaugeError::Shape);
        }
        for row in &a {
            for e in row {
                if !e.atoms_all(|at| matches!(at, Atom::Base(_) | Atom::Param(_) | Atom::Func(..))) {
                    return Err(GaugeError::NotBaseOnly);
                }
            }
        }
        Ok(PrincipalConnectionField { a })
    }

    pub fn base_dim(&self) -> usize {
        self.a.first().map(|r| r.len()).unwrap_or(0)
    }
}

/// Strength `F^r_{λμ} = ∂_λ a^r_μ − ∂_μ a^r_λ + c^r_{pq} a^p_λ a^q_μ`,
/// stored for `λ < μ`.
pub struct Strength {
    pub comps: BTreeMap<(usize, usize, usize), Expression>,
    n: usize,
}

impl Strength {
    pub fn get(&self, r: usize, lam: usize, mu: usize) -> Expression {
        match lam.cmp(&mu) {
            std::cmp::Ordering::Less => self
                .comps
                .get(&(r, lam, mu))
                .cloned()
                .unwrap_or_else(Expression::zero),
            std::cmp::Ordering::Equal => Expression::zero(),
            std::cmp::Ordering::Greater => self
                .comps
                .get(&(r, mu, lam))
                .cloned()
                .unwrap_or_else(Expression::zero)
                .neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }
}

fn d_base(e: &Expression, l: usize) -> Expression {
    e.partial(&Atom::Base(l as u32)).expect("coordinate atom")
}

pub fn strength(field: &PrincipalConnectionField, alg: &GaugeAlgebra) -> Result<Strength, GaugeError> {
    if field.a.len() != alg.dim() {
        return Err(GaugeError::AlgebraMismatch);
    }
    let n = field.base_dim();
    let k = alg.dim();
    let mut comps = BTreeMap::new();
    for r in 0..k {
        for lam in 0..n {
            for mu in (lam + 1)..n {
                let mut e = d_base(&field.a[r][mu], lam).sub(&d_base(&field.a[r][lam], mu));
                for p in 0..k {
                    for q in 0..k {
                        let c = alg.c(r, p, q);
                        if c.is_zero() {
                            continue;
                        }
                        e = e.add(&field.a[p][lam].mul(&field.a[q][mu]).scale(c));
                    }
                }
                if !e.is_zero() {
                    comps.insert((r, lam, mu), e);
                }
            }
        }
    }
    Ok(Strength { comps, n })
}

/// The model whose even fields are the connection coordinates `a^r_μ`,
/// flattened as `field_index(r, μ) = r·n + μ`.
pub fn connection_model(n: usize, alg: &GaugeAlgebra, base_names: &[String]) -> JetModel {
    let fields: Vec<String> = (0..alg.dim())
        .flat_map(|r| (0..n).map(move |mu| format!("a{r}_{mu}")))
        .collect();
    JetModel::new(base_names.to_vec(), fields, Vec::new(), Vec::new())
        .expect("unique generated names")
}

pub fn field_index(n: usize, r: usize, mu: usize) -> u32 {
    (r * n + mu) as u32
}

fn a_coord(n: usize, r: usize, mu: usize) -> Expression {
    Expression::jet(Field::Even(field_index(n, r, mu)), MultiIndex::empty())
}

/// Principal vector field
/// `u_ξ = ξ^μ∂_μ + (∂_μ ξ^r + c^r_{pq} a^p_μ ξ^q − a^r_ν ∂_μ ξ^ν) ∂^μ_r`
/// on the connection-coordinate model, for `ξ = (ξ^μ(x), ξ^r(x))`.
pub fn principal_vector_field(
    model: &JetModel,
    alg: &GaugeAlgebra,
    xi_base: &[Expression],
    xi_alg: &[Expression],
) -> Result<ContactDerivation, GaugeError> {
    if xi_alg.len() != alg.dim() {
        return Err(GaugeError::AlgebraMismatch);
    }
    let n = xi_base.len();
    let k = alg.dim();
    let mut v = vec![Expression::zero(); n * k];
    for r in 0..k {
        for mu in 0..n {
            let mut e = d_base(&xi_alg[r], mu);
            for p in 0..k {
                for q in 0..k {
                    let c = alg.c(r, p, q);
                    if c.is_zero() {
                        continue;
                    }
                    e = e.add(&a_coord(n, p, mu).mul(&xi_alg[q]).scale(c));
                }
            }
            for nu in 0..n {
                let d = d_base(&xi_base[nu], mu);
                if !d.is_zero() {
                    e = e.sub(&a_coord(n, r, nu).mul(&d));
                }
            }
            v[field_index(n, r, mu) as usize] = e;
        }
    }
    ContactDerivation::even(model, xi_base.to_vec(), v, Vec::new())
        .map_err(|_| GaugeError::Shape)
}

/// Bracket of `T_GP` sections:
/// `[ξ,η]^λ = ξ^μ∂_μη^λ − η^μ∂_μξ^λ`,
/// `[ξ,η]^r = ξ^λ∂_λη^r − η^λ∂_λξ^r + c^r_{pq} ξ^p η^q`.
pub fn section_bracket(
    alg: &GaugeAlgebra,
    xi: (&[Expression], &[Expression]),
    eta: (&[Expression], &[Expression]),
) -> (Vec<Expression>, Vec<Expression>) {
    let n = xi.0.len();
    let k = alg.dim();
    let mut base = Vec::with_capacity(n);
    for lam in 0..n {
        let mut e = Expression::zero();
        for mu in 0..n {
            e = e.add(&xi.0[mu].mul(&d_base(&eta.0[lam], mu)));
            e = e.sub(&eta.0[mu].mul(&d_base(&xi.0[lam], mu)));
        }
        base.push(e);
    }
    let mut algc = Vec::with_capacity(k);
    for r in 0..k {
        let mut e = Expression::zero();
        for lam in 0..n {
            e = e.add(&xi.0[lam].mul(&d_base(&eta.1[r], lam)));
            e = e.sub(&eta.0[lam].mul(&d_base(&xi.1[r], lam)));
        }
        for p in 0..k {
            for q in 0..k {
                let c = alg.c(r, p, q);
                if !c.is_zero() {
                    e = e.add(&xi.1[p].mul(&eta.1[q]).scale(c));
                }
            }
        }
        algc.push(e);
    }
    (base, algc)
}

/// Canonical splitting of the jet coordinates `a^r_{λμ}` into the
/// antisymmetric-plus-quadratic strength part and the symmetric part:
/// `a^r_{λμ} = ½(F^r_{λμ} + S^r_{λμ})`. Returns `(F, S)` keyed by
/// `(r, λ, μ)`.
pub type SplitTable = BTreeMap<(usize, usize, usize), Expression>;

pub fn jet_splitting(n: usize, alg: &GaugeAlgebra) -> (SplitTable, SplitTable) {
    let k = alg.dim();
    // a^r_{λμ} = d_λ-jet of the coordinate a^r_μ
    let a_jet = |r: usize, lam: usize, mu: usize| {
        Expression::jet(
            Field::Even(field_index(n, r, mu)),
            MultiIndex::single(lam as u8),
        )
    };
    let mut f = SplitTable::new();
    let mut s = SplitTable::new();
    for r in 0..k {
        for lam in 0..n {
            for mu in 0..n {
                let mut quad = Expression::zero();
                for p in 0..k {
                    for q in 0..k {
                        let c = alg.c(r, p, q);
                        if !c.is_zero() {
                            quad = quad.add(&a_coord(n, p, lam).mul(&a_coord(n, q, mu)).scale(c));
                        }
                    }
                }
                let anti = a_jet(r, lam, mu).sub(&a_jet(r, mu, lam));
                let sym = a_jet(r, lam, mu).add(&a_jet(r, mu, lam));
                f.insert((r, lam, mu), anti.add(&quad));
                s.insert((r, lam, mu), sym.sub(&quad));
            }
        }
    }
    (f, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(l: u32) -> Expression {
        Expression::base(l)
    }

    #[test]
    fn algebra_validation() {
        assert!(GaugeAlgebra::su2().dim() == 3);
        // broken antisymmetry
        let mut c = vec![vec![vec![Rat::zero(); 2]; 2]; 2];
        c[0][0][1] = rat_int(1);
        assert!(matches!(
            GaugeAlgebra::new(c),
            Err(GaugeError::NotAntisymmetric)
        ));
        // antisymmetric but non-Jacobi: [e0,e1] = e1, [e1,e2] = e2 leaves
        // [[e0,e1],e2] + cyclic = e2 ≠ 0
        let mut c = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
        let put = |c: &mut Vec<Vec<Vec<Rat>>>, r: usize, p: usize, q: usize, v: i64| {
            c[r][p][q] = rat_int(v);
            c[r][q][p] = rat_int(-v);
        };
        put(&mut c, 1, 0, 1, 1);
        put(&mut c, 2, 1, 2, 1);
        assert!(matches!(
            GaugeAlgebra::new(c),
            Err(GaugeError::JacobiIdentity)
        ));
    }

    #[test]
    fn abelian_strength_is_curl() {
        let alg = GaugeAlgebra::abelian(1);
        let field =
            PrincipalConnectionField::new(&alg, vec![vec![x(1).neg(), x(0).mul(&x(0))]]).unwrap();
        let f = strength(&field, &alg).unwrap();
        // F_{01} = ∂_0 a_1 − ∂_1 a_0 = 2x⁰ + 1
        let want = x(0).scale(&rat_int(2)).add(&Expression::one());
        assert_eq!(f.get(0, 0, 1), want);
        assert_eq!(f.get(0, 1, 0), want.neg());
    }

    #[test]
    fn zero_field_zero_strength() {
        let alg = GaugeAlgebra::su2();
        let field = PrincipalConnectionField::new(
            &alg,
            vec![vec![Expression::zero(); 2]; 3],
        )
        .unwrap();
        assert!(strength(&field, &alg).unwrap().is_zero());
    }

    #[test]
    fn su2_constant_field_strength() {
        // a¹_0 = 1, a²_1 = 1 (fields indexed from 0: a⁰_0 = 1, a¹_1 = 1)
        // F²_{01} = c²_{01}·1·1 = 1
        let alg = GaugeAlgebra::su2();
        let mut a = vec![vec![Expression::zero(); 2]; 3];
        a[0][0] = Expression::one();
        a[1][1] = Expression::one();
        let field = PrincipalConnectionField::new(&alg, a).unwrap();
        let f = strength(&field, &alg).unwrap();
        assert_eq!(f.get(2, 0, 1), Expression::one());
        assert!(f.get(0, 0, 1).is_zero());
    }

    #[test]
    fn principal_field_examples() {
        let n = 2;
        // abelian, constant ξ → u = 0
        let alg = GaugeAlgebra::abelian(1);
        let model = connection_model(n, &alg, &["x0".into(), "x1".into()]);
        let u = principal_vector_field(
            &model,
            &alg,
            &[Expression::zero(), Expression::zero()],
            &[Expression::one()],
        )
        .unwrap();
        assert!(u.is_zero());
        // abelian, ξ(x) → u = ∂_μξ ∂^μ (gauge shift of the potential)
        let xi = x(0).mul(&x(1));
        let u = principal_vector_field(
            &model,
            &alg,
            &[Expression::zero(), Expression::zero()],
            &[xi.clone()],
        )
        .unwrap();
        assert_eq!(u.v_even[0], x(1));
        assert_eq!(u.v_even[1], x(0));
    }

    #[test]
    fn bracket_closure() {
        // u_{[ξ,η]} = [u_ξ, u_η] for su(2) with x-dependent sections
        let n = 2;
        let alg = GaugeAlgebra::su2();
        let model = connection_model(n, &alg, &["x0".into(), "x1".into()]);
        let xi = (
            vec![x(1), Expression::zero()],
            vec![x(0), Expression::one(), Expression::zero()],
        );
        let eta = (
            vec![Expression::zero(), x(0)],
            vec![Expression::zero(), x(1).mul(&x(0)), Expression::one()],
        );
        let u_xi = principal_vector_field(&model, &alg, &xi.0, &xi.1).unwrap();
        let u_eta = principal_vector_field(&model, &alg, &eta.0, &eta.1).unwrap();
        let (bb, ba) = section_bracket(&alg, (&xi.0, &xi.1), (&eta.0, &eta.1));
        let u_br = principal_vector_field(&model, &alg, &bb, &ba).unwrap();
        let commutator = u_xi.bracket(&model, &u_eta);
        assert_eq!(u_br.xi, commutator.xi);
        assert_eq!(u_br.v_even, commutator.v_even);
    }

    #[test]
    fn splitting_reconstructs() {
        let n = 2;
        let alg = GaugeAlgebra::su2();
        let (f, s) = jet_splitting(n, &alg);
        for r in 0..3 {
            for lam in 0..n {
                for mu in 0..n {
                    let sum = f[&(r, lam, mu)].add(&s[&(r, lam, mu)]);
                    let a2 = Expression::jet(
                        Field::Even(field_index(n, r, mu)),
                        MultiIndex::single(lam as u8),
                    )
                    .scale(&rat_int(2));
                    assert_eq!(sum, a2);
                }
            }
        }
        // abelian with symmetric a_{λμ}: F-part = 0 after symmetrizing subst
        let ab = GaugeAlgebra::abelian(1);
        let (f1, _) = jet_splitting(n, &ab);
        // F-part evaluated on a section: substitute a^r_{λμ} → d_λ A_μ
        let field =
            PrincipalConnectionField::new(&ab, vec![vec![x(1).mul(&x(1)), x(0).mul(&x(1))]])
                .unwrap();
        let mut binds = std::collections::BTreeMap::new();
        for mu in 0..n {
            binds.insert(
                Atom::EvenJet(field_index(n, 0, mu), MultiIndex::empty()),
                field.a[0][mu].clone(),
            );
            for lam in 0..n {
                binds.insert(
                    Atom::EvenJet(field_index(n, 0, mu), MultiIndex::single(lam as u8)),
                    d_base(&field.a[0][mu], lam),
                );
            }
        }
        let fa = strength(&field, &ab).unwrap();
        for lam in 0..n {
            for mu in 0..n {
                let on_section = f1[&(0, lam, mu)].substitute(&binds).unwrap();
                assert_eq!(on_section, fa.get(0, lam, mu));
            }
        }
    }
}
