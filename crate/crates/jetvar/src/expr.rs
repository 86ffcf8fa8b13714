//! Exact-arithmetic expression trees over jet coordinates with Grassmann
//! parity tracking.
//!
//! An [`Expression`] is a finite sum of terms `coefficient × monomial` where
//! the coefficient is an exact rational and the monomial is an ordered list
//! of atoms with integer exponents. Atoms are totally ordered
//! (base < even jet < parameter < function < odd jet); reordering two odd
//! atoms flips the sign of the coefficient, per `aa' = (−1)^{[a][a']}a'a`,
//! and any odd atom squares to zero. The normalized form is unique, so the
//! zero test is structural.

use crate::index::MultiIndex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Grassmann parity of a homogeneous object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Parity of a general expression; `Mixed` when terms disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprParity {
    Even,
    Odd,
    Mixed,
}

/// A field of the model: even (commuting) or odd (anticommuting), by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Even(u32),
    Odd(u32),
}

impl Field {
    pub fn parity(self) -> Parity {
        match self {
            Field::Even(_) => Parity::Even,
            Field::Odd(_) => Parity::Odd,
        }
    }
}

/// Built-in elementary functions. The derivative rules live in
/// [`FuncKind::derivative`]; adding a function means adding a variant and a
/// table row there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncKind {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl FuncKind {
    pub fn name(self) -> &'static str {
        match self {
            FuncKind::Sin => "sin",
            FuncKind::Cos => "cos",
            FuncKind::Exp => "exp",
            FuncKind::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<FuncKind> {
        match name {
            "sin" => Some(FuncKind::Sin),
            "cos" => Some(FuncKind::Cos),
            "exp" => Some(FuncKind::Exp),
            "ln" => Some(FuncKind::Ln),
            _ => None,
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            FuncKind::Sin => x.sin(),
            FuncKind::Cos => x.cos(),
            FuncKind::Exp => x.exp(),
            FuncKind::Ln => x.ln(),
        }
    }

    /// d f(u) = derivative(u) · du.
    pub fn derivative(self, arg: &Expression) -> Result<Expression, ExprError> {
        match self {
            FuncKind::Sin => Ok(Expression::func(FuncKind::Cos, arg.clone())?),
            FuncKind::Cos => Ok(Expression::func(FuncKind::Sin, arg.clone())?.neg()),
            FuncKind::Exp => Ok(Expression::func(FuncKind::Exp, arg.clone())?),
            FuncKind::Ln => arg.inverse(),
        }
    }
}

/// One symbol of the algebra. The variant order is the canonical atom order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Base coordinate `x^λ`.
    Base(u32),
    /// Even jet coordinate `y^i_Λ`.
    EvenJet(u32, MultiIndex),
    /// Declared parameter symbol.
    Param(u32),
    /// Elementary function applied to a normalized even argument.
    Func(FuncKind, Box<Expression>),
    /// Odd (Grassmann) jet coordinate `c^a_Λ`.
    OddJet(u32, MultiIndex),
}

impl Atom {
    pub fn jet(field: Field, mi: MultiIndex) -> Atom {
        match field {
            Field::Even(i) => Atom::EvenJet(i, mi),
            Field::Odd(a) => Atom::OddJet(a, mi),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            Atom::OddJet(..) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn is_coordinate_like(&self) -> bool {
        !matches!(self, Atom::Func(..))
    }

    pub fn as_jet(&self) -> Option<(Field, &MultiIndex)> {
        match self {
            Atom::EvenJet(i, mi) => Some((Field::Even(*i), mi)),
            Atom::OddJet(a, mi) => Some((Field::Odd(*a), mi)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("atom references an undeclared name: {0}")]
    UndeclaredAtom(String),
    #[error("cannot differentiate with respect to a function application")]
    NotDifferentiable,
    #[error("replacement parity does not match the parity of the replaced atom")]
    ParityMismatch,
    #[error("unbound atom in numeric evaluation: {0}")]
    UnboundAtom(String),
    #[error("odd atom present in numeric evaluation")]
    OddAtomPresent,
    #[error("division needs a single-term divisor; divisor has {0} terms")]
    DivisorNotSingleTerm(usize),
    #[error("odd atoms cannot be inverted")]
    OddInverse,
    #[error("function arguments must be even and free of odd atoms")]
    OddFunctionArg,
    #[error("expression growth exceeds the JETVAR_MAX_TERMS budget")]
    TooLarge,
}

/// Ordered atom–exponent list; atoms sorted, exponents nonzero, odd atoms
/// always to exponent 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Atom, i64)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn factors(&self) -> &[(Atom, i64)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn odd_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0
            .iter()
            .filter(|(a, _)| a.parity() == Parity::Odd)
            .map(|(a, _)| a)
    }

    pub fn parity(&self) -> Parity {
        if self.odd_atoms().count() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Graded product. `None` when an odd atom repeats (the term vanishes);
    /// otherwise the sign of moving `other`'s odd atoms into place and the
    /// merged monomial.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        // Sign: inversions between the two odd blocks. Everything else
        // commutes freely.
        let a_odd: Vec<&Atom> = self.odd_atoms().collect();
        let mut neg = false;
        for b in other.odd_atoms() {
            let jumps = a_odd.iter().filter(|a| ***a > *b).count();
            if jumps % 2 == 1 {
                neg = !neg;
            }
        }
        let mut out: Vec<(Atom, i64)> = Vec::with_capacity(self.0.len() + other.0.len());
        let mut ia = 0;
        let mut ib = 0;
        while ia < self.0.len() || ib < other.0.len() {
            let take_a = match (self.0.get(ia), other.0.get(ib)) {
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        if a.0.parity() == Parity::Odd {
                            return None;
                        }
                        let e = a.1 + b.1;
                        if e != 0 {
                            out.push((a.0.clone(), e));
                        }
                        ia += 1;
                        ib += 1;
                        continue;
                    }
                },
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_a {
                out.push(self.0[ia].clone());
                ia += 1;
            } else {
                out.push(other.0[ib].clone());
                ib += 1;
            }
        }
        Some((neg, Monomial(out)))
    }
}

fn max_terms_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("JETVAR_MAX_TERMS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(1_000_000)
    })
}

/// A normalized sum of `coefficient × monomial` terms. Zero is the empty sum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expression {
    terms: BTreeMap<Monomial, Rat>,
}

impl Expression {
    pub fn zero() -> Expression {
        Expression::default()
    }

    pub fn one() -> Expression {
        Expression::from_int(1)
    }

    pub fn from_int(n: i64) -> Expression {
        Expression::from_rat(rat_int(n))
    }

    pub fn from_rat(r: Rat) -> Expression {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Monomial::one(), r);
        }
        Expression { terms }
    }

    pub fn atom(a: Atom) -> Expression {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::atom(a), Rat::one());
        Expression { terms }
    }

    pub fn base(l: u32) -> Expression {
        Expression::atom(Atom::Base(l))
    }

    pub fn jet(field: Field, mi: MultiIndex) -> Expression {
        Expression::atom(Atom::jet(field, mi))
    }

    pub fn param(p: u32) -> Expression {
        Expression::atom(Atom::Param(p))
    }

    /// Function application; the argument must be even with no odd atoms.
    pub fn func(kind: FuncKind, arg: Expression) -> Result<Expression, ExprError> {
        if arg.contains_odd_atom() {
            return Err(ExprError::OddFunctionArg);
        }
        Ok(Expression::atom(Atom::Func(kind, Box::new(arg))))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The single (coefficient, monomial) pair, if there is exactly one term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (m, c))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        self.as_single_term()
            .filter(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        let cap = max_terms_cap();
        if self.terms.len() > cap {
            panic!("expression exceeded JETVAR_MAX_TERMS = {cap} terms");
        }
    }

    pub fn add(&self, other: &Expression) -> Expression {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Expression {
        Expression {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rat) -> Expression {
        if r.is_zero() {
            return Expression::zero();
        }
        Expression {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    /// Graded product, left factor first.
    pub fn mul(&self, other: &Expression) -> Expression {
        let mut out = Expression::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((neg, m)) = ma.mul(mb) {
                    let c = if neg { -(ca * cb) } else { ca * cb };
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Inverse of a single-term expression with even atoms only.
    pub fn inverse(&self) -> Result<Expression, ExprError> {
        let (m, c) = self
            .as_single_term()
            .ok_or(ExprError::DivisorNotSingleTerm(self.terms.len()))?;
        if m.parity() == Parity::Odd || m.odd_atoms().next().is_some() {
            return Err(ExprError::OddInverse);
        }
        let inv = Monomial(
            m.factors()
                .iter()
                .map(|(a, e)| (a.clone(), -e))
                .collect(),
        );
        let mut terms = BTreeMap::new();
        terms.insert(inv, c.recip());
        Ok(Expression { terms })
    }

    pub fn div(&self, other: &Expression) -> Result<Expression, ExprError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, e: i64) -> Result<Expression, ExprError> {
        if e == 0 {
            return Ok(Expression::one());
        }
        if e.unsigned_abs() > 4096 {
            return Err(ExprError::TooLarge);
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        // a-priori growth guards: exponent magnitude and term count
        let max_exp = base
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(_, x)| x.unsigned_abs()))
            .max()
            .unwrap_or(0);
        if max_exp.saturating_mul(e.unsigned_abs()) > 1 << 40 {
            return Err(ExprError::TooLarge);
        }
        let cap = max_terms_cap();
        let mut out = base.clone();
        for _ in 1..e.unsigned_abs() {
            if out.num_terms().saturating_mul(base.num_terms()) > cap {
                return Err(ExprError::TooLarge);
            }
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn parity(&self) -> ExprParity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            match m.parity() {
                Parity::Even => even = true,
                Parity::Odd => odd = true,
            }
        }
        match (even, odd) {
            (_, false) => ExprParity::Even,
            (false, true) => ExprParity::Odd,
            (true, true) => ExprParity::Mixed,
        }
    }

    /// Splits into (even part, odd part).
    pub fn split_parity(&self) -> (Expression, Expression) {
        let mut e = Expression::zero();
        let mut o = Expression::zero();
        for (m, c) in &self.terms {
            match m.parity() {
                Parity::Even => e.add_term(m.clone(), c.clone()),
                Parity::Odd => o.add_term(m.clone(), c.clone()),
            }
        }
        (e, o)
    }

    pub fn contains_odd_atom(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if a.parity() == Parity::Odd {
                found = true;
            }
        });
        found
    }

    /// Walks every atom, descending into function arguments.
    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                f(a);
                if let Atom::Func(_, arg) = a {
                    arg.visit_atoms(f);
                }
            }
        }
    }

    /// Distinct jet atoms present anywhere in the expression.
    pub fn jet_atoms(&self) -> BTreeSet<(Field, MultiIndex)> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Some((f, mi)) = a.as_jet() {
                out.insert((f, mi.clone()));
            }
        });
        out
    }

    /// Highest |Λ| among the jet atoms present; 0 when none.
    pub fn max_jet_order(&self) -> usize {
        self.jet_atoms()
            .iter()
            .map(|(_, mi)| mi.len())
            .max()
            .unwrap_or(0)
    }

    /// True when every atom satisfies the predicate (function arguments
    /// included).
    pub fn atoms_all(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        let mut ok = true;
        self.visit_atoms(&mut |a| {
            if !pred(a) {
                ok = false;
            }
        });
        ok
    }

    /// Left partial derivative with respect to a coordinate-like atom.
    ///
    /// For an odd atom the derivative anticommutes past preceding odd
    /// factors; the chain rule is applied through function applications.
    pub fn partial(&self, a: &Atom) -> Result<Expression, ExprError> {
        if !a.is_coordinate_like() {
            return Err(ExprError::NotDifferentiable);
        }
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            for (j, (atom, exp)) in m.factors().iter().enumerate() {
                if atom == a {
                    let mut rest: Vec<(Atom, i64)> = Vec::with_capacity(m.factors().len());
                    rest.extend_from_slice(&m.factors()[..j]);
                    let mut coeff = c.clone();
                    if atom.parity() == Parity::Odd {
                        let passed = m.factors()[..j]
                            .iter()
                            .filter(|(x, _)| x.parity() == Parity::Odd)
                            .count();
                        if passed % 2 == 1 {
                            coeff = -coeff;
                        }
                    } else {
                        coeff *= rat_int(*exp);
                        if *exp != 1 {
                            rest.push((atom.clone(), exp - 1));
                        }
                    }
                    rest.extend_from_slice(&m.factors()[j + 1..]);
                    out.add_term(Monomial(rest), coeff);
                } else if let Atom::Func(kind, arg) = atom {
                    if a.parity() == Parity::Odd {
                        continue; // arguments are odd-free
                    }
                    let darg = arg.partial(a)?;
                    if darg.is_zero() {
                        continue;
                    }
                    let chain = kind.derivative(arg)?.mul(&darg);
                    let mut rest: Vec<(Atom, i64)> = Vec::new();
                    rest.extend_from_slice(&m.factors()[..j]);
                    if *exp != 1 {
                        rest.push((atom.clone(), exp - 1));
                    }
                    rest.extend_from_slice(&m.factors()[j + 1..]);
                    let factor = Expression {
                        terms: [(Monomial(rest), c * rat_int(*exp))].into(),
                    };
                    out = out.add(&factor.mul(&chain));
                }
            }
        }
        Ok(out)
    }

    /// Right derivative, obtained from the left one by the sign conversion
    /// `∂⃖_a f = (−1)^{[a]([f]+1)} ∂_a f` on parity-homogeneous parts; there
    /// is no second differentiation engine.
    pub fn partial_right(&self, a: &Atom) -> Result<Expression, ExprError> {
        if a.parity() == Parity::Even {
            return self.partial(a);
        }
        let (even, odd) = self.split_parity();
        Ok(even.partial(a)?.neg().add(&odd.partial(a)?))
    }

    /// Simultaneous substitution followed by normalization. Each replacement
    /// must match the parity of the atom it replaces.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Atom, Expression>,
    ) -> Result<Expression, ExprError> {
        for (a, repl) in bindings {
            let want = a.parity();
            match (want, repl.parity()) {
                (Parity::Even, ExprParity::Even) => {}
                (Parity::Odd, ExprParity::Odd) => {}
                (_, _) if repl.is_zero() => {}
                _ => return Err(ExprError::ParityMismatch),
            }
        }
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            let mut acc = Expression::from_rat(c.clone());
            for (atom, exp) in m.factors() {
                let factor = if let Some(repl) = bindings.get(atom) {
                    repl.pow(*exp)?
                } else if let Atom::Func(kind, arg) = atom {
                    let new_arg = arg.substitute(bindings)?;
                    Expression::func(*kind, new_arg)?.pow(*exp)?
                } else {
                    Expression::atom(atom.clone()).pow(*exp)?
                };
                acc = acc.mul(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Numeric evaluation; the expression must be even with no odd atoms and
    /// every atom bound.
    pub fn evaluate(&self, point: &BTreeMap<Atom, f64>) -> Result<f64, ExprError> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = c.to_f64().expect("rational out of f64 range");
            for (atom, exp) in m.factors() {
                let base = Expression::eval_atom(atom, point)?;
                v *= base.powi((*exp).clamp(i32::MIN as i64, i32::MAX as i64) as i32);
            }
            total += v;
        }
        Ok(total)
    }

    fn eval_atom(atom: &Atom, point: &BTreeMap<Atom, f64>) -> Result<f64, ExprError> {
        if atom.parity() == Parity::Odd {
            return Err(ExprError::OddAtomPresent);
        }
        if let Some(v) = point.get(atom) {
            return Ok(*v);
        }
        match atom {
            Atom::Func(kind, arg) => Ok(kind.eval(arg.evaluate(point)?)),
            _ => Err(ExprError::UnboundAtom(format!("{atom:?}"))),
        }
    }
}

impl fmt::Display for Expression {
    /// Canonical index-form printing: `x0`, `y[0;01]`, `c[0;]`, `k0`,
    /// explicit rational coefficients, terms in atom order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self, None))
    }
}

/// Renders an atom with the given name table (canonical indices when absent).
pub(crate) fn render_atom(a: &Atom, names: Option<&dyn NameSource>) -> String {
    match a {
        Atom::Base(l) => match names.and_then(|n| n.base_name(*l)) {
            Some(s) => s,
            None => format!("x{l}"),
        },
        Atom::Param(p) => match names.and_then(|n| n.param_name(*p)) {
            Some(s) => s,
            None => format!("k{p}"),
        },
        Atom::EvenJet(i, mi) => render_jet(names.and_then(|n| n.even_name(*i)), "y", *i, mi, names),
        Atom::OddJet(a, mi) => render_jet(names.and_then(|n| n.odd_name(*a)), "c", *a, mi, names),
        Atom::Func(kind, arg) => format!("{}({})", kind.name(), render(arg, names)),
    }
}

fn render_jet(
    name: Option<String>,
    head: &str,
    idx: u32,
    mi: &MultiIndex,
    names: Option<&dyn NameSource>,
) -> String {
    // single-character base names render by name; anything else by index
    let mi_str: String = mi
        .iter()
        .map(|l| match names.and_then(|n| n.base_name(l as u32)) {
            Some(s) if s.len() == 1 => s,
            _ => format!("{l}"),
        })
        .collect();
    match name {
        Some(n) => format!("{n}[;{mi_str}]"),
        None => format!("{head}[{idx};{mi_str}]"),
    }
}

/// Canonical printing shared by `Display` and model-aware rendering.
pub(crate) fn render(e: &Expression, names: Option<&dyn NameSource>) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let negative = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut parts: Vec<String> = Vec::new();
        if !mag.is_one() || m.is_one() {
            parts.push(render_rat(&mag));
        }
        for (a, exp) in m.factors() {
            let base = render_atom(a, names);
            if *exp == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{exp}"));
            }
        }
        out.push_str(&parts.join(" * "));
    }
    out
}

fn render_rat(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Name lookup used by model-aware printing.
pub trait NameSource {
    fn base_name(&self, l: u32) -> Option<String>;
    fn even_name(&self, i: u32) -> Option<String>;
    fn odd_name(&self, a: u32) -> Option<String>;
    fn param_name(&self, p: u32) -> Option<String>;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: u32) -> Expression {
        Expression::atom(Atom::OddJet(a, MultiIndex::empty()))
    }

    fn y(mi: &[u8]) -> Expression {
        Expression::atom(Atom::EvenJet(0, MultiIndex::from_slice(mi)))
    }

    fn x() -> Expression {
        Expression::base(0)
    }

    #[test]
    fn additive_identity() {
        // x + 0·y → x
        let e = x().add(&y(&[]).scale(&rat_int(0)));
        assert_eq!(e, x());
    }

    #[test]
    fn odd_nilpotency() {
        // c¹·c¹ → 0
        assert!(c(1).mul(&c(1)).is_zero());
    }

    #[test]
    fn odd_transposition_sign() {
        // c²·c¹ → −c¹·c²
        let lhs = c(2).mul(&c(1));
        let rhs = c(1).mul(&c(2)).neg();
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn normalize_is_idempotent_by_construction() {
        let e = c(2).mul(&c(1)).add(&x().mul(&x()));
        // re-multiplying by one is the identity on the normal form
        assert_eq!(e.mul(&Expression::one()), e);
    }

    #[test]
    fn power_rule() {
        // ∂(y_x·y_x)/∂y_x → 2·y_x
        let yx = y(&[0]);
        let e = yx.mul(&yx);
        let d = e.partial(&Atom::EvenJet(0, MultiIndex::single(0))).unwrap();
        assert_eq!(d, yx.scale(&rat_int(2)));
    }

    #[test]
    fn table_rule_sin() {
        // ∂(sin(x))/∂x → cos(x)
        let e = Expression::func(FuncKind::Sin, x()).unwrap();
        let d = e.partial(&Atom::Base(0)).unwrap();
        assert_eq!(d, Expression::func(FuncKind::Cos, x()).unwrap());
    }

    #[test]
    fn graded_leibniz_derivative() {
        // ∂(c¹c²)/∂c² → −c¹; oracle: both orderings of the product.
        let e = c(1).mul(&c(2));
        let d = e.partial(&Atom::OddJet(2, MultiIndex::empty())).unwrap();
        assert_eq!(d, c(1).neg());
        // same expression entered in the other order differentiates the same
        let e2 = c(2).mul(&c(1)).neg();
        let d2 = e2.partial(&Atom::OddJet(2, MultiIndex::empty())).unwrap();
        assert_eq!(d2, d);
    }

    #[test]
    fn derivative_of_function_is_an_error() {
        let f = Atom::Func(FuncKind::Sin, Box::new(x()));
        assert_eq!(
            x().partial(&f).unwrap_err(),
            ExprError::NotDifferentiable
        );
    }

    #[test]
    fn substitution_numeric() {
        // (y_x², {y_x → 3}) → 9
        let yx = y(&[0]);
        let e = yx.mul(&yx);
        let mut b = BTreeMap::new();
        b.insert(
            Atom::EvenJet(0, MultiIndex::single(0)),
            Expression::from_int(3),
        );
        assert_eq!(e.substitute(&b).unwrap(), Expression::from_int(9));
    }

    #[test]
    fn substitution_empty_is_identity() {
        let e = x().mul(&y(&[]));
        assert_eq!(e.substitute(&BTreeMap::new()).unwrap(), e);
    }

    #[test]
    fn substitution_odd_nilpotency() {
        // (c¹c², {c¹ → c²}) → 0
        let e = c(1).mul(&c(2));
        let mut b = BTreeMap::new();
        b.insert(Atom::OddJet(1, MultiIndex::empty()), c(2));
        assert!(e.substitute(&b).unwrap().is_zero());
    }

    #[test]
    fn substitution_parity_mismatch() {
        let e = c(1);
        let mut b = BTreeMap::new();
        b.insert(Atom::OddJet(1, MultiIndex::empty()), x());
        assert_eq!(e.substitute(&b).unwrap_err(), ExprError::ParityMismatch);
    }

    #[test]
    fn parity_classification() {
        assert_eq!(y(&[0]).mul(&y(&[0])).parity(), ExprParity::Even);
        assert_eq!(c(1).mul(&y(&[])).parity(), ExprParity::Odd);
        assert_eq!(y(&[]).add(&c(1)).parity(), ExprParity::Mixed);
    }

    #[test]
    fn evaluate_basic() {
        let mut p = BTreeMap::new();
        p.insert(Atom::Base(0), 2.0);
        assert_eq!(x().mul(&x()).evaluate(&p).unwrap(), 4.0);
        let s = Expression::func(FuncKind::Sin, x()).unwrap();
        p.insert(Atom::Base(0), 0.0);
        assert_eq!(s.evaluate(&p).unwrap(), 0.0);
        let mut q = BTreeMap::new();
        q.insert(Atom::EvenJet(0, MultiIndex::empty()), 1.5);
        q.insert(Atom::EvenJet(0, MultiIndex::single(0)), 2.0);
        let e = y(&[]).mul(&y(&[0]));
        assert_eq!(e.evaluate(&q).unwrap(), 3.0);
    }

    #[test]
    fn evaluate_rejects_odd_and_unbound() {
        let p = BTreeMap::new();
        assert_eq!(c(1).evaluate(&p).unwrap_err(), ExprError::OddAtomPresent);
        assert!(matches!(
            x().evaluate(&p).unwrap_err(),
            ExprError::UnboundAtom(_)
        ));
    }

    #[test]
    fn partials_commute_even_anticommute_odd() {
        let a = Atom::OddJet(1, MultiIndex::empty());
        let b = Atom::OddJet(2, MultiIndex::empty());
        let e = c(1).mul(&c(2)).mul(&y(&[])).add(&c(1).mul(&c(2)));
        let dab = e.partial(&a).unwrap().partial(&b).unwrap();
        let dba = e.partial(&b).unwrap().partial(&a).unwrap();
        assert_eq!(dab, dba.neg());

        let p = Atom::Base(0);
        let q = Atom::EvenJet(0, MultiIndex::empty());
        let f = x().mul(&y(&[])).mul(&y(&[])).add(&x());
        assert_eq!(
            f.partial(&p).unwrap().partial(&q).unwrap(),
            f.partial(&q).unwrap().partial(&p).unwrap()
        );
    }

    #[test]
    fn laurent_inverse() {
        let s = Expression::func(FuncKind::Sin, x()).unwrap();
        let inv = s.inverse().unwrap();
        assert_eq!(s.mul(&inv), Expression::one());
        let sum = x().add(&y(&[]));
        assert!(matches!(
            sum.inverse().unwrap_err(),
            ExprError::DivisorNotSingleTerm(2)
        ));
    }

    #[test]
    fn ln_chain_rule() {
        // d/dx ln(x²) = 2/x
        let e = Expression::func(FuncKind::Ln, x().mul(&x())).unwrap();
        let d = e.partial(&Atom::Base(0)).unwrap();
        let expected = x().inverse().unwrap().scale(&rat_int(2));
        assert_eq!(d, expected);
    }

    #[test]
    fn canonical_display() {
        let e = y(&[0, 0]).neg().add(&x().mul(&x()).scale(&rat(3, 2)));
        assert_eq!(format!("{e}"), "3/2 * x0^2 - y[0;00]");
    }

    #[test]
    fn evaluate_commutes_with_numeric_substitution() {
        // substituting exact rationals and evaluating equals evaluating on
        // the composed bindings, to ≤ 1e-12 relative
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(31);
        for _ in 0..50 {
            let mut e = Expression::zero();
            for _ in 0..3 {
                let mut t = Expression::from_rat(rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
                for _ in 0..rng.gen_range(1..=2) {
                    let a = match rng.gen_range(0..3) {
                        0 => Atom::Base(rng.gen_range(0..2)),
                        1 => Atom::EvenJet(0, MultiIndex::single(rng.gen_range(0..2))),
                        _ => Atom::Func(FuncKind::Cos, Box::new(x())),
                    };
                    t = t.mul(&Expression::atom(a));
                }
                e = e.add(&t);
            }
            let vals: Vec<(Atom, Rat)> = vec![
                (Atom::Base(0), rat(3, 2)),
                (Atom::Base(1), rat(-2, 3)),
                (Atom::EvenJet(0, MultiIndex::single(0)), rat(5, 4)),
                (Atom::EvenJet(0, MultiIndex::single(1)), rat(-1, 7)),
            ];
            let bindings: BTreeMap<Atom, Expression> = vals
                .iter()
                .map(|(a, r)| (a.clone(), Expression::from_rat(r.clone())))
                .collect();
            let point: BTreeMap<Atom, f64> = vals
                .iter()
                .map(|(a, r)| (a.clone(), r.to_f64().unwrap()))
                .collect();
            let via_subst = e.substitute(&bindings).unwrap().evaluate(&point).unwrap();
            let direct = e.evaluate(&point).unwrap();
            let denom = direct.abs().max(1.0);
            assert!(
                (via_subst - direct).abs() / denom <= 1e-12,
                "{via_subst} vs {direct}"
            );
        }
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Expression>();
        assert_send_sync::<Atom>();
        assert_send_sync::<crate::jet::JetModel>();
        assert_send_sync::<crate::jet::ContactDerivation>();
        assert_send_sync::<crate::forms::DifferentialForm>();
        assert_send_sync::<crate::tvform::TangentValuedForm>();
    }

    #[test]
    fn right_derivative_conversion() {
        // ∂⃖_{c²}(c¹c²) = c¹ while ∂_{c²}(c¹c²) = −c¹; odd f keeps its sign
        let f = c(1).mul(&c(2));
        let a = Atom::OddJet(2, MultiIndex::empty());
        assert_eq!(f.partial_right(&a).unwrap(), c(1));
        let g = c(2).mul(&y(&[]));
        assert_eq!(g.partial_right(&a).unwrap(), g.partial(&a).unwrap());
        // even atoms: no conversion
        let h = x().mul(&x());
        let b = Atom::Base(0);
        assert_eq!(h.partial_right(&b).unwrap(), h.partial(&b).unwrap());
    }
}
