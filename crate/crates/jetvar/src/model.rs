//! Declarative model files: a line-oriented sectioned text format holding
//! the coordinate system and the objects the CLI commands operate on.
//!
//! ```text
//! # free wave equation
//! base = [t, x]
//! fields = [y]
//!
//! [lagrangian]
//! L = 1/2*y[;t]^2 - 1/2*y[;x]^2
//!
//! [vector_field time_shift]
//! xi[t] = 1
//! ```
//!
//! Sections: `metric` (`row =` lines), `lagrangian` (`L =`), named
//! `vector_field` blocks (`xi[base] =`, `v[field] =`), `connection` /
//! `soldering` (`Gamma[field][base] =`, `sigma[field][base] =`),
//! `world_connection` (`Gamma[l][m][n] =` for `Γ_l^m_n`), `gauge_algebra`
//! (`dim =`, sparse `c[r][p][q] =` with antisymmetric completion),
//! `gauge_field` (`a[r][base] =`), `gauge_params` (`names =`, `odd =`),
//! `gauge_symmetry` (`u[field][param][mi] =`, `xi_base[base][param][mi] =`),
//! and `ni_generators` (`Delta[r][field][mi] =`).

use crate::conn::{Connection, SolderingForm};
use crate::expr::{Expression, Field, Parity, Rat};
use crate::gauge::{GaugeAlgebra, PrincipalConnectionField};
use crate::index::MultiIndex;
use crate::jet::{ContactDerivation, JetModel};
use crate::noether::{GaugeSymmetrySpec, NIGenerator};
use crate::parse::parse_expr;
use crate::variational::Lagrangian;
use crate::world::{LinearWorldConnection, Metric};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
}

fn validation(msg: impl Into<String>) -> LoadError {
    LoadError::Validation(msg.into())
}

/// A fully validated model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: JetModel,
    pub metric: Option<Metric>,
    pub lagrangian: Option<Lagrangian>,
    pub vector_fields: Vec<(String, ContactDerivation)>,
    pub connection: Option<Connection>,
    pub soldering: Option<SolderingForm>,
    pub world_connection: Option<LinearWorldConnection>,
    pub gauge_algebra: Option<GaugeAlgebra>,
    pub gauge_field: Option<PrincipalConnectionField>,
    pub gauge_params: Option<(Vec<String>, bool)>,
    pub gauge_symmetry: Option<GaugeSymmetrySpec>,
    pub ni_generators: Option<NIGenerator>,
}

struct Line {
    no: usize,
    key: String,
    args: Vec<String>,
    value: String,
}

struct Section {
    name: String,
    arg: Option<String>,
    lines: Vec<Line>,
}

pub fn load_model_str(src: &str) -> Result<ModelFile, LoadError> {
    let sections = split_sections(src)?;
    let header = &sections[0];

    let mut base_names: Vec<String> = vec!["x0".into()];
    let mut fields: Vec<String> = Vec::new();
    let mut odd_fields: Vec<String> = Vec::new();
    let mut params: Vec<String> = Vec::new();
    for line in &header.lines {
        match line.key.as_str() {
            "base" => {
                base_names = if line.value.trim_start().starts_with('[') {
                    parse_name_list(line)?
                } else {
                    let n: usize = line.value.trim().parse().map_err(|_| {
                        parse_err(line, "base must be a dimension or a name list")
                    })?;
                    if n == 0 {
                        return Err(validation("base dimension must be ≥ 1"));
                    }
                    (0..n).map(|l| format!("x{l}")).collect()
                };
            }
            "fields" => fields = parse_name_list(line)?,
            "odd_fields" => odd_fields = parse_name_list(line)?,
            "params" => params = parse_name_list(line)?,
            other => {
                return Err(parse_err(line, &format!("unknown top-level key `{other}`")));
            }
        }
    }
    let model = JetModel::new(base_names, fields, odd_fields, params)
        .map_err(|e| validation(e.to_string()))?;

    let mut out = ModelFile {
        model,
        metric: None,
        lagrangian: None,
        vector_fields: Vec::new(),
        connection: None,
        soldering: None,
        world_connection: None,
        gauge_algebra: None,
        gauge_field: None,
        gauge_params: None,
        gauge_symmetry: None,
        ni_generators: None,
    };

    // gauge parameter names must be known before the symmetry tables,
    // regardless of section order in the file
    for sec in &sections[1..] {
        if sec.name == "gauge_params" {
            if out.gauge_params.is_some() {
                return Err(validation("at most one gauge_params section is allowed"));
            }
            out.gauge_params = Some(load_gauge_params(sec)?);
        }
    }

    for sec in &sections[1..] {
        match sec.name.as_str() {
            "metric" => {
                if out.metric.is_some() {
                    return Err(validation("at most one metric section is allowed"));
                }
                out.metric = Some(load_metric(&out.model, sec)?);
            }
            "lagrangian" => out.lagrangian = Some(load_lagrangian(&out.model, sec)?),
            "vector_field" => {
                let name = sec
                    .arg
                    .clone()
                    .ok_or_else(|| validation("vector_field section needs a name"))?;
                let v = load_vector_field(&out.model, sec)?;
                out.vector_fields.push((name, v));
            }
            "connection" => out.connection = Some(load_connection(&out.model, sec)?),
            "soldering" => out.soldering = Some(load_soldering(&out.model, sec)?),
            "world_connection" => {
                out.world_connection = Some(load_world_connection(&out.model, sec)?)
            }
            "gauge_algebra" => out.gauge_algebra = Some(load_gauge_algebra(sec)?),
            "gauge_field" => out.gauge_field = Some(load_gauge_field_raw(&out.model, sec)?),
            "gauge_params" => {}
            "gauge_symmetry" => {
                let (names, _) = out
                    .gauge_params
                    .as_ref()
                    .ok_or_else(|| validation("gauge_symmetry requires a gauge_params section"))?;
                out.gauge_symmetry = Some(load_gauge_symmetry(&out.model, names, sec)?);
            }
            "ni_generators" => out.ni_generators = Some(load_ni_generators(&out.model, sec)?),
            other => return Err(validation(format!("unknown section `{other}`"))),
        }
    }

    // cross-section invariants
    if out.gauge_field.is_some() {
        match &out.gauge_algebra {
            Some(alg) => {
                let f = out.gauge_field.as_ref().unwrap();
                if f.a.len() != alg.dim() {
                    return Err(validation(
                        "gauge_field rows must match the gauge algebra dimension",
                    ));
                }
            }
            None => {
                return Err(validation(
                    "gauge_field requires a gauge_algebra section",
                ))
            }
        }
    }
    Ok(out)
}

pub fn load_model(path: &std::path::Path) -> Result<ModelFile, LoadError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    load_model_str(&src)
}

fn split_sections(src: &str) -> Result<Vec<Section>, LoadError> {
    let mut sections = vec![Section {
        name: String::new(),
        arg: None,
        lines: Vec::new(),
    }];
    for (no, raw) in src.lines().enumerate() {
        let no = no + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let inner = rest.strip_suffix(']').ok_or(LoadError::Parse {
                line: no,
                col: line.len(),
                msg: "expected `]`".into(),
            })?;
            let mut parts = inner.split_whitespace();
            let name = parts.next().unwrap_or("").to_string();
            let arg = parts.next().map(|s| s.to_string());
            sections.push(Section {
                name,
                arg,
                lines: Vec::new(),
            });
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(LoadError::Parse {
                line: no,
                col: 1,
                msg: "expected `key = value`".into(),
            });
        };
        let (lhs, rhs) = line.split_at(eq);
        let (key, args) = parse_key(lhs.trim(), no)?;
        sections.last_mut().unwrap().lines.push(Line {
            no,
            key,
            args,
            value: rhs[1..].trim().to_string(),
        });
    }
    Ok(sections)
}

fn parse_key(lhs: &str, no: usize) -> Result<(String, Vec<String>), LoadError> {
    let bracket = lhs.find('[').unwrap_or(lhs.len());
    let key = lhs[..bracket].trim().to_string();
    let mut args = Vec::new();
    let mut rest = &lhs[bracket..];
    while let Some(r) = rest.strip_prefix('[') {
        let end = r.find(']').ok_or(LoadError::Parse {
            line: no,
            col: 1,
            msg: "unterminated `[` in key".into(),
        })?;
        args.push(r[..end].trim().to_string());
        rest = &r[end + 1..];
    }
    if !rest.trim().is_empty() {
        return Err(LoadError::Parse {
            line: no,
            col: 1,
            msg: format!("bad key syntax `{lhs}`"),
        });
    }
    Ok((key, args))
}

fn parse_err(line: &Line, msg: &str) -> LoadError {
    LoadError::Parse {
        line: line.no,
        col: 1,
        msg: msg.to_string(),
    }
}

fn parse_name_list(line: &Line) -> Result<Vec<String>, LoadError> {
    let v = line.value.trim();
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| parse_err(line, "expected `[a, b, ...]`"))?;
    Ok(inner
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect())
}

/// Parses an expression, classifying undeclared-name failures as validation
/// errors and everything else as positioned parse errors.
fn expr_on(model: &JetModel, line: &Line, src: &str) -> Result<Expression, LoadError> {
    parse_expr(model, src).map_err(|e| {
        if e.msg.starts_with("undeclared") || e.msg.starts_with("atom references") {
            validation(e.msg)
        } else {
            LoadError::Parse {
                line: line.no,
                col: e.col,
                msg: e.msg,
            }
        }
    })
}

/// Splits on commas at paren depth zero.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

fn base_index(model: &JetModel, name: &str) -> Result<u32, LoadError> {
    if let Some(l) = model.base_names().iter().position(|b| b == name) {
        return Ok(l as u32);
    }
    if let Ok(l) = name.parse::<u32>() {
        if l < model.base_dim() {
            return Ok(l);
        }
    }
    Err(validation(format!("`{name}` is not a base coordinate")))
}

fn field_by_name(model: &JetModel, name: &str) -> Result<Field, LoadError> {
    if let Some(i) = model.even_names().iter().position(|f| f == name) {
        return Ok(Field::Even(i as u32));
    }
    if let Some(a) = model.odd_names().iter().position(|f| f == name) {
        return Ok(Field::Odd(a as u32));
    }
    Err(validation(format!("undeclared field {name}")))
}

fn multi_index_arg(model: &JetModel, arg: &str) -> Result<MultiIndex, LoadError> {
    let mut entries = Vec::new();
    for ch in arg.chars() {
        if ch.is_whitespace() {
            continue;
        }
        if ch.is_ascii_digit() {
            let l = ch as u8 - b'0';
            if (l as u32) < model.base_dim() {
                entries.push(l);
                continue;
            }
        }
        let s = ch.to_string();
        match model.base_names().iter().position(|b| *b == s) {
            Some(l) => entries.push(l as u8),
            None => {
                return Err(validation(format!(
                    "`{ch}` is not a base coordinate in a multi-index"
                )))
            }
        }
    }
    Ok(MultiIndex::from_slice(&entries))
}

fn load_metric(model: &JetModel, sec: &Section) -> Result<Metric, LoadError> {
    let n = model.base_dim() as usize;
    let mut rows = Vec::new();
    for line in &sec.lines {
        if line.key != "row" {
            return Err(parse_err(line, "metric section takes `row = ...` lines"));
        }
        let entries = split_top_level(&line.value);
        if entries.len() != n {
            return Err(validation(format!(
                "metric row has {} entries, expected {n}",
                entries.len()
            )));
        }
        let mut row = Vec::new();
        for s in entries {
            row.push(expr_on(model, line, &s)?);
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(validation(format!(
            "metric has {} rows, expected {n}",
            rows.len()
        )));
    }
    Metric::new(rows).map_err(|e| validation(e.to_string()))
}

fn load_lagrangian(model: &JetModel, sec: &Section) -> Result<Lagrangian, LoadError> {
    let line = sec
        .lines
        .iter()
        .find(|l| l.key == "L")
        .ok_or_else(|| validation("lagrangian section needs `L = ...`"))?;
    let density = expr_on(model, line, &line.value)?;
    Lagrangian::new(model, density).map_err(|e| validation(e.to_string()))
}

fn load_vector_field(model: &JetModel, sec: &Section) -> Result<ContactDerivation, LoadError> {
    let mut xi = vec![Expression::zero(); model.base_dim() as usize];
    let mut v_even = vec![Expression::zero(); model.n_even() as usize];
    let mut v_odd = vec![Expression::zero(); model.n_odd() as usize];
    for line in &sec.lines {
        match line.key.as_str() {
            "xi" => {
                let arg = line
                    .args
                    .first()
                    .ok_or_else(|| parse_err(line, "xi needs a base index: xi[t] = ..."))?;
                let l = base_index(model, arg)?;
                xi[l as usize] = expr_on(model, line, &line.value)?;
            }
            "v" => {
                let arg = line
                    .args
                    .first()
                    .ok_or_else(|| parse_err(line, "v needs a field name: v[y] = ..."))?;
                match field_by_name(model, arg)? {
                    Field::Even(i) => v_even[i as usize] = expr_on(model, line, &line.value)?,
                    Field::Odd(a) => v_odd[a as usize] = expr_on(model, line, &line.value)?,
                }
            }
            other => return Err(parse_err(line, &format!("unknown key `{other}`"))),
        }
    }
    for parity in [Parity::Even, Parity::Odd] {
        if let Ok(v) =
            ContactDerivation::new(model, parity, xi.clone(), v_even.clone(), v_odd.clone())
        {
            return Ok(v);
        }
    }
    Err(validation(
        "vector field components are not parity-homogeneous",
    ))
}

fn component_table(
    model: &JetModel,
    sec: &Section,
    key: &str,
) -> Result<Vec<Vec<Expression>>, LoadError> {
    let mut table = vec![
        vec![Expression::zero(); model.base_dim() as usize];
        model.n_even() as usize
    ];
    for line in &sec.lines {
        if line.key != key {
            return Err(parse_err(line, &format!("expected `{key}[field][base] = ...`")));
        }
        let [f, b] = line.args.as_slice() else {
            return Err(parse_err(line, &format!("expected `{key}[field][base] = ...`")));
        };
        let field = field_by_name(model, f)?;
        let Field::Even(i) = field else {
            return Err(validation("connection components live over even fields"));
        };
        let l = base_index(model, b)?;
        table[i as usize][l as usize] = expr_on(model, line, &line.value)?;
    }
    Ok(table)
}

fn load_connection(model: &JetModel, sec: &Section) -> Result<Connection, LoadError> {
    let table = component_table(model, sec, "Gamma")?;
    Connection::new(model, table).map_err(|e| validation(e.to_string()))
}

fn load_soldering(model: &JetModel, sec: &Section) -> Result<SolderingForm, LoadError> {
    let table = component_table(model, sec, "sigma")?;
    SolderingForm::new(model, table).map_err(|e| validation(e.to_string()))
}

fn load_world_connection(
    model: &JetModel,
    sec: &Section,
) -> Result<LinearWorldConnection, LoadError> {
    let n = model.base_dim() as usize;
    let mut comps = vec![vec![vec![Expression::zero(); n]; n]; n];
    for line in &sec.lines {
        if line.key != "Gamma" {
            return Err(parse_err(line, "expected `Gamma[l][m][n] = ...`"));
        }
        let [a, b, c] = line.args.as_slice() else {
            return Err(parse_err(line, "expected `Gamma[l][m][n] = ...`"));
        };
        let (l, m, k) = (
            base_index(model, a)? as usize,
            base_index(model, b)? as usize,
            base_index(model, c)? as usize,
        );
        comps[l][m][k] = expr_on(model, line, &line.value)?;
    }
    LinearWorldConnection::new(comps).map_err(|e| validation(e.to_string()))
}

fn load_gauge_algebra(sec: &Section) -> Result<GaugeAlgebra, LoadError> {
    let mut dim = None;
    let mut entries: Vec<(usize, usize, usize, Rat, usize)> = Vec::new();
    for line in &sec.lines {
        match line.key.as_str() {
            "dim" => {
                dim = Some(line.value.trim().parse::<usize>().map_err(|_| {
                    parse_err(line, "dim must be a nonnegative integer")
                })?)
            }
            "c" => {
                let [r, p, q] = line.args.as_slice() else {
                    return Err(parse_err(line, "expected `c[r][p][q] = rational`"));
                };
                let idx = |s: &str| -> Result<usize, LoadError> {
                    s.parse().map_err(|_| parse_err(line, "algebra index must be an integer"))
                };
                let v = parse_rational(&line.value)
                    .ok_or_else(|| parse_err(line, "expected a rational number"))?;
                entries.push((idx(r)?, idx(p)?, idx(q)?, v, line.no));
            }
            other => return Err(parse_err(line, &format!("unknown key `{other}`"))),
        }
    }
    let dim = dim.ok_or_else(|| validation("gauge_algebra needs `dim = ...`"))?;
    let mut c = vec![vec![vec![Rat::from_integer(0.into()); dim]; dim]; dim];
    let mut given = std::collections::BTreeSet::new();
    for (r, p, q, v, no) in &entries {
        if *r >= dim || *p >= dim || *q >= dim {
            return Err(LoadError::Parse {
                line: *no,
                col: 1,
                msg: "algebra index out of range".into(),
            });
        }
        c[*r][*p][*q] = v.clone();
        given.insert((*r, *p, *q));
    }
    // complete by antisymmetry where the partner was not given explicitly
    for (r, p, q, v, _) in &entries {
        if !given.contains(&(*r, *q, *p)) {
            c[*r][*q][*p] = -v.clone();
        }
    }
    GaugeAlgebra::new(c).map_err(|e| validation(e.to_string()))
}

fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = num.parse().ok()?;
    let d: num_bigint::BigInt = den.parse().ok()?;
    if d == 0.into() {
        return None;
    }
    let r = Rat::new(n, d);
    Some(if neg { -r } else { r })
}

fn load_gauge_field_raw(
    model: &JetModel,
    sec: &Section,
) -> Result<PrincipalConnectionField, LoadError> {
    let n = model.base_dim() as usize;
    let mut rows: BTreeMap<usize, Vec<Expression>> = BTreeMap::new();
    for line in &sec.lines {
        if line.key != "a" {
            return Err(parse_err(line, "expected `a[r][base] = ...`"));
        }
        let [r, b] = line.args.as_slice() else {
            return Err(parse_err(line, "expected `a[r][base] = ...`"));
        };
        let r: usize = r
            .parse()
            .map_err(|_| parse_err(line, "algebra index must be an integer"))?;
        let l = base_index(model, b)? as usize;
        let e = expr_on(model, line, &line.value)?;
        rows.entry(r).or_insert_with(|| vec![Expression::zero(); n])[l] = e;
    }
    let dim = rows.keys().max().map(|m| m + 1).unwrap_or(0);
    let mut a = vec![vec![Expression::zero(); n]; dim];
    for (r, row) in rows {
        a[r] = row;
    }
    // shape/x-only validation happens against the algebra at dispatch
    for row in &a {
        for e in row {
            let ok = e.atoms_all(|at| {
                matches!(
                    at,
                    crate::expr::Atom::Base(_)
                        | crate::expr::Atom::Param(_)
                        | crate::expr::Atom::Func(..)
                )
            });
            if !ok {
                return Err(validation(
                    "gauge field potentials must depend on base coordinates only",
                ));
            }
        }
    }
    Ok(PrincipalConnectionField { a })
}

fn load_gauge_params(sec: &Section) -> Result<(Vec<String>, bool), LoadError> {
    let mut names = Vec::new();
    let mut odd = false;
    for line in &sec.lines {
        match line.key.as_str() {
            "names" => names = parse_name_list(line)?,
            "odd" => {
                odd = match line.value.trim() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(parse_err(line, "odd must be true or false")),
                }
            }
            other => return Err(parse_err(line, &format!("unknown key `{other}`"))),
        }
    }
    if names.is_empty() {
        return Err(validation("gauge_params needs `names = [..]`"));
    }
    Ok((names, odd))
}

fn param_index(names: &[String], name: &str) -> Result<usize, LoadError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| validation(format!("`{name}` is not a declared gauge parameter")))
}

fn load_gauge_symmetry(
    model: &JetModel,
    param_names: &[String],
    sec: &Section,
) -> Result<GaugeSymmetrySpec, LoadError> {
    let mut spec = GaugeSymmetrySpec::default();
    for _ in param_names {
        spec.base.push(BTreeMap::new());
        spec.field.push(BTreeMap::new());
    }
    for line in &sec.lines {
        let [target, param, mi] = line.args.as_slice() else {
            return Err(parse_err(
                line,
                "expected `u[field][param][mi] = ...` or `xi_base[base][param][mi] = ...`",
            ));
        };
        let a = param_index(param_names, param)?;
        let mi = multi_index_arg(model, mi)?;
        let e = expr_on(model, line, &line.value)?;
        match line.key.as_str() {
            "u" => {
                let f = field_by_name(model, target)?;
                let entry = spec.field[a].entry((f, mi)).or_insert_with(Expression::zero);
                *entry = entry.add(&e);
            }
            "xi_base" => {
                let l = base_index(model, target)?;
                let entry = spec.base[a].entry((l, mi)).or_insert_with(Expression::zero);
                *entry = entry.add(&e);
            }
            other => return Err(parse_err(line, &format!("unknown key `{other}`"))),
        }
    }
    Ok(spec)
}

fn load_ni_generators(model: &JetModel, sec: &Section) -> Result<NIGenerator, LoadError> {
    let mut gen = NIGenerator::default();
    for line in &sec.lines {
        if line.key != "Delta" {
            return Err(parse_err(line, "expected `Delta[r][field][mi] = ...`"));
        }
        let [r, f, mi] = line.args.as_slice() else {
            return Err(parse_err(line, "expected `Delta[r][field][mi] = ...`"));
        };
        let r: usize = r
            .parse()
            .map_err(|_| parse_err(line, "generator index must be an integer"))?;
        while gen.delta.len() <= r {
            gen.delta.push(BTreeMap::new());
        }
        let field = field_by_name(model, f)?;
        let mi = multi_index_arg(model, mi)?;
        let e = expr_on(model, line, &line.value)?;
        let entry = gen.delta[r]
            .entry((field, mi))
            .or_insert_with(Expression::zero);
        *entry = entry.add(&e);
    }
    Ok(gen)
}
