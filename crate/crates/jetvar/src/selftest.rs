//! Seeded randomized property suites, shared by the `selftest` CLI command
//! and the acceptance tests. Every symbolic residual must normalize to
//! exactly zero; the numeric checks carry explicit tolerances.

use crate::conn::{
    curvature_shift_residual, curvature_vs_fn_residual, first_bianchi_residual,
    second_bianchi_residuals, torsion_shift_residual, Connection, SolderingForm,
};
use crate::expr::{rat, Atom, ExprParity, Expression, Field, FuncKind, Parity};
use crate::forms::{d_h, d_v, exterior_d, DifferentialForm};
use crate::gauge::{connection_model, field_index, GaugeAlgebra};
use crate::index::{multi_indices_up_to, MultiIndex};
use crate::jet::{total_derivative, ContactDerivation, JetModel};
use crate::noether::{
    eta, gauge_invariance_check, integration_by_parts_residual, noether_identity_residuals,
    GaugeSymmetrySpec, IndexedTuple,
};
use crate::tvform::{fn_bracket, CoordSpace, TangentValuedForm};
use crate::variational::{
    check_symmetry, conservation_residual, euler_lagrange, first_variational_residual, Lagrangian,
    SymmetryClass,
};
use crate::world::{christoffel, integrate_geodesic, metricity_residuals, Metric};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

/// Outcome of one property suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

// ---------------------------------------------------------------- generators

fn rng_for(seed: u64, salt: u64) -> StdRng {
    StdRng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn small_rat(rng: &mut StdRng) -> crate::expr::Rat {
    let n = loop {
        let v = rng.gen_range(-3i64..=3);
        if v != 0 {
            break v;
        }
    };
    let d = rng.gen_range(1i64..=2);
    rat(n, d)
}

fn random_atom(rng: &mut StdRng, model: &JetModel, max_order: usize, allow_odd: bool) -> Atom {
    loop {
        match rng.gen_range(0..5) {
            0 => return Atom::Base(rng.gen_range(0..model.base_dim())),
            1 | 2 => {
                if model.n_even() > 0 {
                    let i = rng.gen_range(0..model.n_even());
                    let mi = random_multi_index(rng, model, max_order);
                    return Atom::EvenJet(i, mi);
                }
            }
            3 => {
                if allow_odd && model.n_odd() > 0 {
                    let a = rng.gen_range(0..model.n_odd());
                    let mi = random_multi_index(rng, model, max_order);
                    return Atom::OddJet(a, mi);
                }
            }
            _ => {
                let l = rng.gen_range(0..model.base_dim());
                let kind = if rng.gen_bool(0.5) {
                    FuncKind::Sin
                } else {
                    FuncKind::Cos
                };
                return Atom::Func(kind, Box::new(Expression::base(l)));
            }
        }
    }
}

fn random_multi_index(rng: &mut StdRng, model: &JetModel, max_order: usize) -> MultiIndex {
    let len = rng.gen_range(0..=max_order);
    let entries: Vec<u8> = (0..len)
        .map(|_| rng.gen_range(0..model.base_dim()) as u8)
        .collect();
    MultiIndex::from_slice(&entries)
}

/// Random polynomial expression over the model's coordinates.
pub fn random_expression(
    rng: &mut StdRng,
    model: &JetModel,
    max_order: usize,
    allow_odd: bool,
) -> Expression {
    let terms = rng.gen_range(1..=3);
    let mut e = Expression::zero();
    for _ in 0..terms {
        let mut t = Expression::from_rat(small_rat(rng));
        for _ in 0..rng.gen_range(1..=2) {
            t = t.mul(&Expression::atom(random_atom(rng, model, max_order, allow_odd)));
        }
        e = e.add(&t);
    }
    e
}

fn random_even_expression(
    rng: &mut StdRng,
    model: &JetModel,
    max_order: usize,
    allow_odd: bool,
) -> Expression {
    random_expression(rng, model, max_order, allow_odd)
        .split_parity()
        .0
}

/// Random form of the given degree in the `{dx, θ}` basis.
pub fn random_form(
    rng: &mut StdRng,
    model: &JetModel,
    degree: usize,
    max_order: usize,
) -> DifferentialForm {
    let mut out = DifferentialForm::zero(model);
    for _ in 0..rng.gen_range(1..=2) {
        let mut f = DifferentialForm::scalar(model, random_expression(rng, model, max_order, true));
        for _ in 0..degree {
            let g = if rng.gen_bool(0.4) {
                DifferentialForm::dx(model, rng.gen_range(0..model.base_dim()))
            } else {
                let field = if rng.gen_bool(0.5) && model.n_odd() > 0 {
                    Field::Odd(rng.gen_range(0..model.n_odd()))
                } else {
                    Field::Even(rng.gen_range(0..model.n_even()))
                };
                DifferentialForm::theta(model, field, random_multi_index(rng, model, max_order))
            };
            f = crate::forms::wedge(&f, &g).expect("same model");
        }
        out = out.add(&f);
    }
    out
}

/// Random projectable vector field with order-0 coefficients.
pub fn random_projectable_field(rng: &mut StdRng, model: &JetModel) -> ContactDerivation {
    let xi = (0..model.base_dim())
        .map(|_| {
            let mut e = Expression::from_rat(small_rat(rng));
            if rng.gen_bool(0.6) {
                e = e.mul(&Expression::base(rng.gen_range(0..model.base_dim())));
            }
            e
        })
        .collect();
    let v_even = (0..model.n_even())
        .map(|_| {
            random_even_expression(rng, model, 0, false)
        })
        .collect();
    let v_odd = vec![Expression::zero(); model.n_odd() as usize];
    ContactDerivation::even(model, xi, v_even, v_odd).expect("components are even")
}

fn random_connection(rng: &mut StdRng, model: &JetModel) -> Connection {
    let gamma = (0..model.n_even())
        .map(|_| {
            (0..model.base_dim())
                .map(|_| random_even_expression(rng, model, 0, false))
                .collect()
        })
        .collect();
    Connection::new(model, gamma).expect("order-0 components")
}

fn random_soldering(rng: &mut StdRng, model: &JetModel) -> SolderingForm {
    let sigma = (0..model.n_even())
        .map(|_| {
            (0..model.base_dim())
                .map(|_| random_even_expression(rng, model, 0, false))
                .collect()
        })
        .collect();
    SolderingForm::new(model, sigma).expect("order-0 components")
}

fn random_tv_form(rng: &mut StdRng, space: CoordSpace, degree: usize) -> TangentValuedForm {
    let model = JetModel::unnamed(space.n_base as u32, space.n_fiber as u32, 0);
    let mut tv = TangentValuedForm::zero(space, degree);
    for mu in 0..space.dim() {
        for _ in 0..rng.gen_range(0..=1) {
            let mut key: Vec<u8> = Vec::new();
            let mut ok = true;
            for _ in 0..degree {
                let d = rng.gen_range(0..space.dim()) as u8;
                if key.contains(&d) {
                    ok = false;
                    break;
                }
                key.push(d);
            }
            if !ok {
                continue;
            }
            key.sort_unstable();
            tv.comps[mu].add_term(key, random_even_expression(rng, &model, 0, false));
        }
    }
    tv
}

// ------------------------------------------------------------------- suites

/// Suite 1 (and the forms half of suite 8): `d_H² = 0`, `d_V² = 0`,
/// `d_Hd_V + d_Vd_H = 0`, `h₀∘d = d_H∘h₀` on random forms with one even and
/// one odd field.
pub fn bicomplex_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 1);
    let model = JetModel::unnamed(2, 1, 1);
    let mut failures = Vec::new();
    for case in 0..cases {
        let degree = case % 4; // degrees 0..3
        let phi = random_form(&mut rng, &model, degree, 2);
        let dh2 = d_h(&model, &d_h(&model, &phi));
        if !dh2.is_zero() {
            failures.push(format!("case {case}: d_H² ≠ 0"));
        }
        let dv2 = d_v(&model, &d_v(&model, &phi));
        if !dv2.is_zero() {
            failures.push(format!("case {case}: d_V² ≠ 0"));
        }
        let anti = d_h(&model, &d_v(&model, &phi)).add(&d_v(&model, &d_h(&model, &phi)));
        if !anti.is_zero() {
            failures.push(format!("case {case}: d_Hd_V + d_Vd_H ≠ 0"));
        }
        let lhs = exterior_d(&model, &phi).horizontalize();
        let rhs = d_h(&model, &phi.horizontalize());
        if lhs != rhs {
            failures.push(format!("case {case}: h₀∘d ≠ d_H∘h₀"));
        }

        // wedge sign rule φ∧σ = (−1)^{|φ||σ|+[φ][σ]} σ∧φ on bihomogeneous
        // single-term forms, odd-field generators included
        let (a, pa, ga) = random_bihomogeneous_term(&mut rng, &model, case % 3);
        let (b, pb, gb) = random_bihomogeneous_term(&mut rng, &model, (case + 1) % 3);
        let ab = crate::forms::wedge(&a, &b).expect("same model");
        let mut ba = crate::forms::wedge(&b, &a).expect("same model");
        if (pa * pb + ga * gb) % 2 == 1 {
            ba = ba.neg();
        }
        if ab != ba {
            failures.push(format!("case {case}: wedge sign rule fails"));
        }

        // interior product is a graded antiderivation:
        // υ⌋(φ∧σ) = (υ⌋φ)∧σ + (−1)^{|φ|+[φ][υ]} φ∧(υ⌋σ)
        for parity in [Parity::Even, Parity::Odd] {
            let v = random_derivation(&mut rng, &model, parity);
            let lhs = match crate::forms::interior_product(&model, &v, &ab) {
                Ok(f) => f,
                Err(_) => continue, // degree-zero product
            };
            let left = crate::forms::wedge(
                &crate::forms::interior_product(&model, &v, &a)
                    .unwrap_or_else(|_| DifferentialForm::zero(&model)),
                &b,
            )
            .expect("same model");
            let mut right = crate::forms::wedge(
                &a,
                &crate::forms::interior_product(&model, &v, &b)
                    .unwrap_or_else(|_| DifferentialForm::zero(&model)),
            )
            .expect("same model");
            let v_g = if parity == Parity::Odd { 1 } else { 0 };
            if (pa + ga * v_g) % 2 == 1 {
                right = right.neg();
            }
            if lhs != left.add(&right) {
                failures.push(format!(
                    "case {case}: interior product antiderivation fails ([υ] = {v_g})"
                ));
            }
        }
    }
    SuiteResult {
        name: "bicomplex",
        cases,
        failures,
    }
}

/// One term `c · g₁∧…∧g_d` with a parity-homogeneous coefficient; returns
/// the form with its form degree and Grassmann parity.
fn random_bihomogeneous_term(
    rng: &mut StdRng,
    model: &JetModel,
    degree: usize,
) -> (DifferentialForm, usize, usize) {
    let coeff_parity = rng.gen_bool(0.5);
    let raw = random_expression(rng, model, 1, true);
    let (even, odd) = raw.split_parity();
    let coeff = if coeff_parity { odd } else { even };
    let coeff = if coeff.is_zero() {
        Expression::one()
    } else {
        coeff
    };
    let coeff_parity = matches!(coeff.parity(), ExprParity::Odd);
    let mut form = DifferentialForm::scalar(model, coeff);
    let mut odd_gens = 0usize;
    for _ in 0..degree {
        let g = if rng.gen_bool(0.4) {
            DifferentialForm::dx(model, rng.gen_range(0..model.base_dim()))
        } else if rng.gen_bool(0.5) {
            odd_gens += 1;
            DifferentialForm::theta(
                model,
                Field::Odd(rng.gen_range(0..model.n_odd())),
                random_multi_index(rng, model, 1),
            )
        } else {
            DifferentialForm::theta(
                model,
                Field::Even(rng.gen_range(0..model.n_even())),
                random_multi_index(rng, model, 1),
            )
        };
        form = crate::forms::wedge(&form, &g).expect("same model");
    }
    let grassmann = usize::from(coeff_parity) + odd_gens;
    (form, degree, grassmann % 2)
}

/// Random parity-homogeneous contact derivation with order ≤ 1 coefficients.
fn random_derivation(rng: &mut StdRng, model: &JetModel, parity: Parity) -> ContactDerivation {
    let pick = |rng: &mut StdRng, want_odd: bool| {
        let raw = random_expression(rng, model, 1, true);
        let (even, odd) = raw.split_parity();
        if want_odd {
            odd
        } else {
            even
        }
    };
    let want_odd_base = parity == Parity::Odd;
    let xi = (0..model.base_dim()).map(|_| pick(rng, want_odd_base)).collect();
    let v_even = (0..model.n_even()).map(|_| pick(rng, want_odd_base)).collect();
    let v_odd = (0..model.n_odd()).map(|_| pick(rng, !want_odd_base)).collect();
    ContactDerivation::new(model, parity, xi, v_even, v_odd).expect("parity-homogeneous parts")
}

/// Suite 2: `[d_λ, d_μ] = 0` and `J¹[u,v] = [J¹u, J¹v]` on random
/// projectable pairs.
pub fn prolongation_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 2);
    let model = JetModel::unnamed(2, 2, 0);
    let mut failures = Vec::new();
    for case in 0..cases {
        let e = random_expression(&mut rng, &model, 3, false);
        let ab = total_derivative(&model, &total_derivative(&model, &e, 0).unwrap(), 1).unwrap();
        let ba = total_derivative(&model, &total_derivative(&model, &e, 1).unwrap(), 0).unwrap();
        if ab != ba {
            failures.push(format!("case {case}: [d_0, d_1] ≠ 0"));
        }

        let u = random_projectable_field(&mut rng, &model);
        let v = random_projectable_field(&mut rng, &model);
        let w = u.bracket(&model, &v);
        for f in model.fields() {
            for mi in multi_indices_up_to(model.base_dim() as u8, 1) {
                let lhs = w.jet_component(&model, f, &mi);
                let rhs = u
                    .apply(&model, &v.jet_component(&model, f, &mi))
                    .sub(&v.apply(&model, &u.jet_component(&model, f, &mi)));
                if lhs != rhs {
                    failures.push(format!("case {case}: J¹[u,v] ≠ [J¹u, J¹v] at {f:?} {mi:?}"));
                }
            }
        }
    }
    SuiteResult {
        name: "prolongation",
        cases,
        failures,
    }
}

/// Suite 3: graded antisymmetry and graded Jacobi for the FN bracket on
/// degrees (0,1), and `curvature(Γ) = ½[Γ,Γ]_FN`.
pub fn fn_bracket_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 3);
    let space = CoordSpace {
        n_base: 2,
        n_fiber: 1,
    };
    let mut failures = Vec::new();
    for case in 0..cases {
        let da = rng.gen_range(0..=1);
        let db = rng.gen_range(0..=1);
        let a = random_tv_form(&mut rng, space, da);
        let b = random_tv_form(&mut rng, space, db);
        let ab = fn_bracket(&a, &b).unwrap();
        let ba = fn_bracket(&b, &a).unwrap();
        // [a,b] + (−1)^{|a||b|}[b,a] = 0
        let signed = if da * db % 2 == 1 { ba.neg() } else { ba };
        if !ab.add(&signed).is_zero() {
            failures.push(format!("case {case}: graded antisymmetry fails"));
        }
        // graded Jacobi on degrees (0,1): keep total ≤ dim
        let c = random_tv_form(&mut rng, space, (3 - da - db).min(1));
        let dc = c.degree;
        let lhs = fn_bracket(&a, &fn_bracket(&b, &c).unwrap()).unwrap();
        let rhs1 = fn_bracket(&fn_bracket(&a, &b).unwrap(), &c).unwrap();
        let rhs2 = fn_bracket(&b, &fn_bracket(&a, &c).unwrap()).unwrap();
        let rhs2 = if (da * db) % 2 == 1 { rhs2.neg() } else { rhs2 };
        let jac = lhs.sub(&rhs1).sub(&rhs2);
        if !jac.is_zero() {
            failures.push(format!(
                "case {case}: graded Jacobi fails at degrees ({da},{db},{dc})"
            ));
        }
    }
    let model = JetModel::unnamed(2, 1, 0);
    for case in 0..20 {
        let conn = random_connection(&mut rng, &model);
        if !curvature_vs_fn_residual(&model, &conn).unwrap().is_zero() {
            failures.push(format!("connection {case}: R ≠ ½[Γ,Γ]_FN"));
        }
    }
    SuiteResult {
        name: "fn-bracket",
        cases,
        failures,
    }
}

/// Suite 4: second Bianchi at n = 3, first Bianchi, and the shift relations
/// `T' = T + 2ρ`, `R' = R + ρ + T`.
pub fn connection_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 4);
    // alternate between one and two fibre fields so the ∂_j sums see a
    // genuine fibre index
    let models3 = [JetModel::unnamed(3, 1, 0), JetModel::unnamed(3, 2, 0)];
    let models2 = [JetModel::unnamed(2, 1, 0), JetModel::unnamed(2, 2, 0)];
    let mut failures = Vec::new();
    for case in 0..cases {
        let model3 = &models3[case % 2];
        let model2 = &models2[case % 2];
        let c3 = random_connection(&mut rng, model3);
        for r in second_bianchi_residuals(model3, &c3) {
            if !r.is_zero() {
                failures.push(format!("case {case}: second Bianchi residual ≠ 0"));
                break;
            }
        }
        let c2 = random_connection(&mut rng, model2);
        let s2 = random_soldering(&mut rng, model2);
        if !first_bianchi_residual(model2, &c2, &s2).unwrap().is_zero() {
            failures.push(format!("case {case}: first Bianchi residual ≠ 0"));
        }
        if !torsion_shift_residual(model2, &c2, &s2).is_zero() {
            failures.push(format!("case {case}: T' ≠ T + 2ρ"));
        }
        if !curvature_shift_residual(model2, &c2, &s2).is_zero() {
            failures.push(format!("case {case}: R' ≠ R + ρ + T"));
        }
    }
    SuiteResult {
        name: "connection",
        cases,
        failures,
    }
}

fn random_diagonal_metric(rng: &mut StdRng, n: usize) -> Metric {
    let mut g = vec![vec![Expression::zero(); n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        let l = rng.gen_range(0..n as u32);
        row[i] = match rng.gen_range(0..4) {
            0 => Expression::from_rat(rat(rng.gen_range(1..=3), 1)),
            1 => Expression::base(l).pow(2).unwrap(),
            2 => Expression::func(FuncKind::Exp, Expression::base(l)).unwrap(),
            _ => {
                let s = Expression::func(FuncKind::Sin, Expression::base(l)).unwrap();
                s.mul(&s)
            }
        };
    }
    Metric::new(g).expect("diagonal single-term metrics are invertible")
}

/// Suite 5: Euclidean Christoffel vanishes, metricity on random diagonal
/// metrics, and the 2-sphere great-circle geodesic under RK4.
pub fn metric_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 5);
    let mut failures = Vec::new();

    let euc = christoffel(&Metric::euclidean(3)).unwrap();
    if !euc.comps.iter().flatten().flatten().all(Expression::is_zero) {
        failures.push("christoffel(Euclidean) ≠ 0".into());
    }

    for case in 0..cases {
        let n = rng.gen_range(1..=3);
        let g = random_diagonal_metric(&mut rng, n);
        let c = match christoffel(&g) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("case {case}: christoffel failed: {e}"));
                continue;
            }
        };
        for r in metricity_residuals(&g, &c) {
            if !r.is_zero() {
                failures.push(format!("case {case}: metricity residual ≠ 0"));
                break;
            }
        }
    }

    // 2-sphere equator: latitude must stay constant to 1e-6 over unit time
    let s = Expression::func(FuncKind::Sin, Expression::base(0)).unwrap();
    let sphere = Metric::new(vec![
        vec![Expression::one(), Expression::zero()],
        vec![Expression::zero(), s.mul(&s)],
    ])
    .unwrap();
    let conn = christoffel(&sphere).unwrap();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let path = integrate_geodesic(&conn, &[half_pi, 0.0], &[0.0, 1.0], 1.0, 1e-3).unwrap();
    let max_dev = path
        .iter()
        .map(|(x, _)| (x[0] - half_pi).abs())
        .fold(0.0, f64::max);
    if max_dev > 1e-6 {
        failures.push(format!("great circle deviates by {max_dev:e}"));
    }
    // affine reparametrization: doubling the velocity halves the time
    let fast = integrate_geodesic(&conn, &[half_pi, 0.0], &[0.0, 2.0], 0.5, 1e-3).unwrap();
    let (xa, _) = path.last().unwrap();
    let (xb, _) = fast.last().unwrap();
    if (xa[1] - xb[1]).abs() > 1e-6 || (xa[0] - xb[0]).abs() > 1e-6 {
        failures.push("affine reparametrization changes the path".into());
    }

    SuiteResult {
        name: "metric",
        cases,
        failures,
    }
}

// --------------------------------------------------- numeric Gateaux oracle

/// A band-limited field `Σ A cos(k·x + φ)`; all jets are analytic.
struct TrigField {
    modes: Vec<(f64, Vec<i32>, f64)>,
}

impl TrigField {
    fn random(rng: &mut StdRng, dim: usize, max_mode: i32) -> TrigField {
        let modes = (0..3)
            .map(|_| {
                let amp = rng.gen_range(0.2..1.0);
                let k: Vec<i32> = (0..dim).map(|_| rng.gen_range(-max_mode..=max_mode)).collect();
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                (amp, k, phase)
            })
            .collect();
        TrigField { modes }
    }

    /// `∂_Λ y` at `x`, exactly.
    fn jet(&self, x: &[f64], mi: &MultiIndex) -> f64 {
        self.modes
            .iter()
            .map(|(amp, k, phase)| {
                let mut factor = *amp;
                for l in mi.iter() {
                    factor *= k[l as usize] as f64;
                }
                let arg: f64 = x
                    .iter()
                    .zip(k)
                    .map(|(xi, ki)| xi * *ki as f64)
                    .sum::<f64>()
                    + phase
                    + mi.len() as f64 * std::f64::consts::FRAC_PI_2;
                factor * arg.cos()
            })
            .sum()
    }
}

fn grid_points(dim: usize, n_per_axis: usize) -> Vec<Vec<f64>> {
    let h = std::f64::consts::TAU / n_per_axis as f64;
    let total = n_per_axis.pow(dim as u32);
    (0..total)
        .map(|flat| {
            let mut x = vec![0.0; dim];
            let mut rem = flat;
            for d in 0..dim {
                x[d] = (rem % n_per_axis) as f64 * h;
                rem /= n_per_axis;
            }
            x
        })
        .collect()
}

/// Random polynomial Lagrangian in the jets of a single field, order ≤ 2,
/// with constant coefficients.
fn random_grid_lagrangian(rng: &mut StdRng, model: &JetModel) -> Lagrangian {
    let mis = multi_indices_up_to(model.base_dim() as u8, 2);
    let mut density = Expression::zero();
    for _ in 0..rng.gen_range(2..=3) {
        let mut term = Expression::from_rat(small_rat(rng));
        for _ in 0..rng.gen_range(1..=3) {
            let mi = &mis[rng.gen_range(0..mis.len())];
            term = term.mul(&Expression::jet(Field::Even(0), mi.clone()));
        }
        density = density.add(&term);
    }
    Lagrangian::new(model, density).expect("even polynomial density")
}

/// Compares the symbolic Euler–Lagrange output against a central-difference
/// Gateaux derivative of the discretized action, on a periodic grid with a
/// band-limited field and probe direction. Returns the relative error.
pub fn gateaux_relative_error(seed: u64, dim: usize) -> f64 {
    let mut rng = rng_for(seed, 6);
    let model = JetModel::unnamed(dim as u32, 1, 0);
    let lag = random_grid_lagrangian(&mut rng, &model);
    let el = euler_lagrange(&model, &lag);

    let n_per_axis = if dim == 1 { 64 } else { 8 };
    let points = grid_points(dim, n_per_axis);
    let cell = (std::f64::consts::TAU / n_per_axis as f64).powi(dim as i32);
    let y = TrigField::random(&mut rng, dim, 1);
    let v = TrigField::random(&mut rng, dim, 1);
    let eps = 1e-5;

    let mis = multi_indices_up_to(dim as u8, 4);
    let action = |shift: f64| -> f64 {
        points
            .iter()
            .map(|x| {
                let mut bind = BTreeMap::new();
                for (d, xv) in x.iter().enumerate() {
                    bind.insert(Atom::Base(d as u32), *xv);
                }
                for mi in &mis {
                    let val = y.jet(x, mi) + shift * v.jet(x, mi);
                    bind.insert(Atom::EvenJet(0, mi.clone()), val);
                }
                lag.density.evaluate(&bind).expect("bound grid point")
            })
            .sum::<f64>()
            * cell
    };
    let gateaux = (action(eps) - action(-eps)) / (2.0 * eps);

    let symbolic: f64 = points
        .iter()
        .map(|x| {
            let mut bind = BTreeMap::new();
            for (d, xv) in x.iter().enumerate() {
                bind.insert(Atom::Base(d as u32), *xv);
            }
            for mi in &mis {
                bind.insert(Atom::EvenJet(0, mi.clone()), y.jet(x, mi));
            }
            el.even[0].evaluate(&bind).expect("bound grid point") * v.jet(x, &MultiIndex::empty())
        })
        .sum::<f64>()
        * cell;

    (gateaux - symbolic).abs() / symbolic.abs().max(1.0)
}

fn random_order2_lagrangian(
    rng: &mut StdRng,
    model: &JetModel,
    allow_odd: bool,
) -> Lagrangian {
    let density = random_even_expression(rng, model, 2, allow_odd);
    Lagrangian::new(model, density).expect("even part is even")
}

/// Suite 6 (and, with `with_odd`, the variational half of suite 8):
/// EL kills divergences, the Gateaux oracle, the first variational formula,
/// and the wave / sine-Gordon fixtures.
pub fn variational_suite(seed: u64, cases: usize, with_odd: bool) -> SuiteResult {
    let mut rng = rng_for(seed, if with_odd { 7 } else { 6 });
    let n_odd = if with_odd { 1 } else { 0 };
    let model = JetModel::unnamed(2, 1, n_odd);
    let mut failures = Vec::new();

    // EL of a total derivative vanishes
    for case in 0..cases {
        let e = random_expression(&mut rng, &model, 2, with_odd);
        let lam = rng.gen_range(0..model.base_dim());
        let div = total_derivative(&model, &e, lam).unwrap();
        let (even_div, _) = div.split_parity();
        let lag = Lagrangian::new(&model, even_div).unwrap();
        let el = euler_lagrange(&model, &lag);
        if !el.is_zero() {
            failures.push(format!("case {case}: EL of a divergence ≠ 0"));
        }
        if with_odd {
            for comp in el.even.iter().chain(&el.odd) {
                if comp.parity() == ExprParity::Mixed {
                    failures.push(format!("case {case}: EL output has mixed parity"));
                }
            }
        }
    }

    // first variational formula
    for case in 0..cases {
        let lag = random_order2_lagrangian(&mut rng, &model, with_odd);
        let v = if with_odd && rng.gen_bool(0.5) {
            let xi = vec![Expression::zero(); model.base_dim() as usize];
            let v_even = (0..model.n_even())
                .map(|_| random_expression(&mut rng, &model, 1, true).split_parity().1)
                .collect();
            let v_odd = (0..model.n_odd())
                .map(|_| random_expression(&mut rng, &model, 1, true).split_parity().0)
                .collect();
            ContactDerivation::new(&model, Parity::Odd, xi, v_even, v_odd).unwrap()
        } else {
            let xi = (0..model.base_dim())
                .map(|_| random_even_expression(&mut rng, &model, 1, with_odd))
                .collect();
            let v_even = (0..model.n_even())
                .map(|_| random_even_expression(&mut rng, &model, 1, with_odd))
                .collect();
            let v_odd = (0..model.n_odd())
                .map(|_| random_expression(&mut rng, &model, 1, true).split_parity().1)
                .collect();
            ContactDerivation::new(&model, Parity::Even, xi, v_even, v_odd).unwrap()
        };
        match first_variational_residual(&model, &v, &lag) {
            Ok(r) => {
                if !r.is_zero() {
                    failures.push(format!("case {case}: first variational residual ≠ 0"));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }

    // numeric Gateaux oracle (even fields only)
    if !with_odd {
        for k in 0..10u64 {
            let dim = if k % 2 == 0 { 1 } else { 2 };
            let err = gateaux_relative_error(seed.wrapping_add(k), dim);
            if err > 1e-6 {
                failures.push(format!("Gateaux case {k} ({dim}D): relative error {err:e}"));
            }
        }
    }

    // fixtures
    let m = JetModel::new(
        vec!["t".into(), "x".into()],
        vec!["y".into()],
        vec![],
        vec![],
    )
    .unwrap();
    let y = |mi: &[u8]| Expression::jet(Field::Even(0), MultiIndex::from_slice(mi));
    let wave = Lagrangian::new(
        &m,
        y(&[0]).mul(&y(&[0])).scale(&rat(1, 2)).sub(&y(&[1]).mul(&y(&[1])).scale(&rat(1, 2))),
    )
    .unwrap();
    let el = euler_lagrange(&m, &wave);
    if el.even[0] != y(&[0, 0]).neg().add(&y(&[1, 1])) {
        failures.push("wave-equation fixture mismatch".into());
    }
    let cos_y = Expression::func(FuncKind::Cos, y(&[])).unwrap();
    let sg = Lagrangian::new(
        &m,
        wave.density.sub(&Expression::one().sub(&cos_y)),
    )
    .unwrap();
    let el = euler_lagrange(&m, &sg);
    let sin_y = Expression::func(FuncKind::Sin, y(&[])).unwrap();
    if el.even[0] != y(&[0, 0]).neg().add(&y(&[1, 1])).sub(&sin_y) {
        failures.push("sine-Gordon fixture mismatch".into());
    }

    SuiteResult {
        name: if with_odd { "variational-graded" } else { "variational" },
        cases,
        failures,
    }
}

// --------------------------------------------------------- gauge fixtures

/// Maxwell theory on an `n`-dimensional Euclidean base: the model, the
/// Lagrangian `−¼F_{λμ}F^{λμ}`, and the gauge spec `δa_μ = ∂_μχ`.
pub fn maxwell_fixture(n: usize) -> (JetModel, Lagrangian, GaugeSymmetrySpec) {
    let alg = GaugeAlgebra::abelian(1);
    let names: Vec<String> = (0..n).map(|l| format!("x{l}")).collect();
    let model = connection_model(n, &alg, &names);
    let a_jet = |mu: usize, lam: usize| {
        Expression::jet(
            Field::Even(field_index(n, 0, mu)),
            MultiIndex::single(lam as u8),
        )
    };
    let mut density = Expression::zero();
    for lam in 0..n {
        for mu in 0..n {
            let f = a_jet(mu, lam).sub(&a_jet(lam, mu));
            density = density.add(&f.mul(&f));
        }
    }
    let lag = Lagrangian::new(&model, density.scale(&rat(-1, 4))).unwrap();
    let mut table = BTreeMap::new();
    for mu in 0..n {
        table.insert(
            (
                Field::Even(field_index(n, 0, mu)),
                MultiIndex::single(mu as u8),
            ),
            Expression::one(),
        );
    }
    let spec = GaugeSymmetrySpec {
        base: vec![BTreeMap::new()],
        field: vec![table],
    };
    (model, lag, spec)
}

/// su(2) Yang–Mills on an `n`-dimensional Euclidean base with the gauge
/// spec `δa^r_μ = ∂_μχ^r + c^r_{pq} a^p_μ χ^q`.
pub fn yang_mills_fixture(n: usize) -> (JetModel, Lagrangian, GaugeSymmetrySpec) {
    let alg = GaugeAlgebra::su2();
    let k = alg.dim();
    let names: Vec<String> = (0..n).map(|l| format!("x{l}")).collect();
    let model = connection_model(n, &alg, &names);
    let a = |r: usize, mu: usize| {
        Expression::jet(Field::Even(field_index(n, r, mu)), MultiIndex::empty())
    };
    let a_jet = |r: usize, mu: usize, lam: usize| {
        Expression::jet(
            Field::Even(field_index(n, r, mu)),
            MultiIndex::single(lam as u8),
        )
    };
    let mut density = Expression::zero();
    for r in 0..k {
        for lam in 0..n {
            for mu in 0..n {
                let mut f = a_jet(r, mu, lam).sub(&a_jet(r, lam, mu));
                for p in 0..k {
                    for q in 0..k {
                        let c = alg.c(r, p, q);
                        if !num_traits::Zero::is_zero(c) {
                            f = f.add(&a(p, lam).mul(&a(q, mu)).scale(c));
                        }
                    }
                }
                density = density.add(&f.mul(&f));
            }
        }
    }
    let lag = Lagrangian::new(&model, density.scale(&rat(-1, 4))).unwrap();
    let mut field_tables = Vec::new();
    for aa in 0..k {
        let mut table: BTreeMap<(Field, MultiIndex), Expression> = BTreeMap::new();
        for mu in 0..n {
            table.insert(
                (
                    Field::Even(field_index(n, aa, mu)),
                    MultiIndex::single(mu as u8),
                ),
                Expression::one(),
            );
            for r in 0..k {
                let mut coeff = Expression::zero();
                for p in 0..k {
                    let c = alg.c(r, p, aa);
                    if !num_traits::Zero::is_zero(c) {
                        coeff = coeff.add(&a(p, mu).scale(c));
                    }
                }
                if !coeff.is_zero() {
                    let key = (Field::Even(field_index(n, r, mu)), MultiIndex::empty());
                    let entry = table.entry(key).or_insert_with(Expression::zero);
                    *entry = entry.add(&coeff);
                }
            }
        }
        field_tables.push(table);
    }
    let spec = GaugeSymmetrySpec {
        base: vec![BTreeMap::new(); k],
        field: field_tables,
    };
    (model, lag, spec)
}

/// Suite 7: η involution, integration by parts, conservation identities for
/// exact symmetries, and the Maxwell / Yang–Mills gauge fixtures with a
/// mass-term negative control.
pub fn noether_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 8);
    let model = JetModel::unnamed(2, 1, 0);
    let mut failures = Vec::new();

    // η∘η = id for random tuples, |Λ| ≤ 3
    for case in 0..cases {
        let mut f = IndexedTuple::new();
        for mi in multi_indices_up_to(2, 3) {
            if rng.gen_bool(0.5) {
                f.insert(mi, random_even_expression(&mut rng, &model, 1, false));
            }
        }
        f.retain(|_, e| !e.is_zero());
        let hh = eta(&model, &eta(&model, &f));
        if hh != f {
            failures.push(format!("case {case}: η(η(f)) ≠ f"));
        }
        // integration-by-parts residual
        let phi = random_even_expression(&mut rng, &model, 2, false);
        if !integration_by_parts_residual(&model, &f, &phi).is_zero() {
            failures.push(format!("case {case}: qq1b residual ≠ 0"));
        }
    }

    // conservation identity for exact symmetries: autonomous Lagrangians and
    // base translations, plus derivative-only Lagrangians with field shifts
    let mut conserved = 0;
    let mut attempts = 0;
    while conserved < 20 && attempts < 400 {
        attempts += 1;
        // keep only autonomous terms: jet atoms carry no explicit x
        let density: Expression = random_even_expression(&mut rng, &model, 2, false)
            .terms()
            .filter(|(m, _)| {
                m.factors()
                    .iter()
                    .all(|(a, _)| matches!(a, Atom::EvenJet(..) | Atom::OddJet(..)))
            })
            .map(|(m, c)| Expression::from_rat(c.clone()).mul(&mono_expr(m)))
            .fold(Expression::zero(), |acc, t| acc.add(&t));
        if density.is_zero() {
            continue;
        }
        let lag = Lagrangian::new(&model, density).unwrap();
        let lam = rng.gen_range(0..model.base_dim());
        let mut xi = vec![Expression::zero(); model.base_dim() as usize];
        xi[lam as usize] = Expression::one();
        let shift = ContactDerivation::even(
            &model,
            xi,
            vec![Expression::zero(); model.n_even() as usize],
            vec![],
        )
        .unwrap();
        match check_symmetry(&model, &shift, &lag) {
            Ok(SymmetryClass::Exact) => {}
            other => {
                failures.push(format!("translation not exact on autonomous L: {other:?}"));
                continue;
            }
        }
        match conservation_residual(&model, &shift, &lag) {
            Ok(r) if r.is_zero() => conserved += 1,
            Ok(_) => failures.push("conservation residual ≠ 0".into()),
            Err(e) => failures.push(format!("conservation residual failed: {e}")),
        }
    }

    // Maxwell
    let (m_model, m_lag, m_spec) = maxwell_fixture(3);
    for r in noether_identity_residuals(&m_model, &m_spec, &m_lag) {
        if !r.is_zero() {
            failures.push("Maxwell NI residual ≠ 0".into());
        }
    }
    match gauge_invariance_check(&m_model, &m_spec, &["xi".into()], false, &m_lag) {
        Ok(SymmetryClass::Exact) => {}
        other => failures.push(format!("Maxwell classification: {other:?}")),
    }
    // mass-term negative control
    let a0 = Expression::jet(Field::Even(0), MultiIndex::empty());
    let massive = Lagrangian::new(&m_model, m_lag.density.add(&a0.mul(&a0))).unwrap();
    let broken = noether_identity_residuals(&m_model, &m_spec, &massive);
    if broken[0].is_zero() {
        failures.push("mass term should break the Maxwell NI".into());
    }
    match gauge_invariance_check(&m_model, &m_spec, &["xi".into()], false, &massive) {
        Ok(SymmetryClass::None) => {}
        other => failures.push(format!("massive Maxwell classification: {other:?}")),
    }

    // Yang–Mills, even and odd (ghost-like) parameters
    let (y_model, y_lag, y_spec) = yang_mills_fixture(2);
    for r in noether_identity_residuals(&y_model, &y_spec, &y_lag) {
        if !r.is_zero() {
            failures.push("Yang–Mills NI residual ≠ 0".into());
        }
    }
    let ghost_names: Vec<String> = (0..3).map(|a| format!("gh{a}")).collect();
    for odd in [false, true] {
        match gauge_invariance_check(&y_model, &y_spec, &ghost_names, odd, &y_lag) {
            Ok(SymmetryClass::Exact) => {}
            other => failures.push(format!("Yang–Mills (odd={odd}) classification: {other:?}")),
        }
    }

    SuiteResult {
        name: "noether",
        cases,
        failures,
    }
}

fn mono_expr(m: &crate::expr::Monomial) -> Expression {
    let mut e = Expression::one();
    for (a, exp) in m.factors() {
        e = e.mul(&Expression::atom(a.clone()).pow(*exp).expect("positive power"));
    }
    e
}

/// Runs every suite with per-suite case counts at the acceptance sizes.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    vec![
        bicomplex_suite(seed, 100),
        prolongation_suite(seed, 50),
        fn_bracket_suite(seed, 40),
        connection_suite(seed, 20),
        metric_suite(seed, 10),
        variational_suite(seed, 50, false),
        noether_suite(seed, 30),
        variational_suite(seed, 30, true),
    ]
}
