//! Domain and problem interpretation on top of the s-expression reader.
//! Only `:strips` and `:typing` are accepted; richer constructs are
//! rejected with [`PddlError::Unsupported`].

use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use super::sexpr::{parse_one, Pos, SExpr};
use super::PddlError;

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing"];

const KNOWN_UNSUPPORTED_REQUIREMENTS: &[&str] = &[
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":equality",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
    ":conditional-effects",
    ":fluents",
    ":numeric-fluents",
    ":object-fluents",
    ":adl",
    ":durative-actions",
    ":duration-inequalities",
    ":continuous-effects",
    ":derived-predicates",
    ":timed-initial-literals",
    ":preferences",
    ":constraints",
    ":action-costs",
];

const UNSUPPORTED_FORMULA_HEADS: &[&str] = &[
    "or", "imply", "exists", "forall", "when", "=", "increase", "decrease", "assign",
    "scale-up", "scale-down", "either", "<", ">", "<=", ">=",
];

fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn unsupported(pos: Pos, construct: impl Into<String>) -> PddlError {
    PddlError::Unsupported {
        construct: construct.into(),
        line: pos.line,
        col: pos.col,
    }
}

fn symbol(e: &SExpr, what: &str) -> Result<String, PddlError> {
    e.as_symbol()
        .map(str::to_string)
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}")))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], PddlError> {
    e.as_list().ok_or_else(|| syntax(e.pos(), format!("expected {what}")))
}

/// `(define (<kind> <name>) sections...)` → (name, sections).
fn definition<'a>(root: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let items = list(root, "'(define ...)'")?;
    if items.first().and_then(SExpr::as_symbol) != Some("define") {
        return Err(syntax(root.pos(), "expected 'define'"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(root.pos(), format!("missing ({kind} <name>)")))?;
    let h = list(header, &format!("({kind} <name>)"))?;
    if h.len() != 2 || h[0].as_symbol() != Some(kind) {
        return Err(syntax(header.pos(), format!("expected ({kind} <name>)")));
    }
    Ok((symbol(&h[1], "a name")?, &items[2..]))
}

/// Parses `a b - t c - u d` into typed names; trailing names get `object`.
fn typed_list(items: &[SExpr]) -> Result<Vec<(String, String, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        match item {
            SExpr::Symbol(s, p) if s == "-" => {
                let ty = items.get(i + 1).ok_or_else(|| syntax(*p, "expected a type after '-'"))?;
                if ty.head() == Some("either") {
                    return Err(unsupported(ty.pos(), "either types"));
                }
                let ty = symbol(ty, "a type name")?;
                if pending.is_empty() {
                    return Err(syntax(*p, "'-' without preceding names"));
                }
                out.extend(pending.drain(..).map(|(n, p)| (n, ty.clone(), p)));
                i += 2;
            }
            SExpr::Symbol(s, p) => {
                pending.push((s.clone(), *p));
                i += 1;
            }
            SExpr::List(_, p) => return Err(syntax(*p, "unexpected list in typed list")),
        }
    }
    out.extend(pending.into_iter().map(|(n, p)| (n, ROOT_TYPE.to_string(), p)));
    Ok(out)
}

/// Parses a domain file.
pub fn parse_domain(text: &str) -> Result<DomainAst, PddlError> {
    let root = parse_one(text)?;
    let (name, sections) = definition(&root, "domain")?;
    let mut dom = DomainAst {
        name,
        requirements: Vec::new(),
        types: TypeHierarchy::default(),
        constants: Vec::new(),
        predicates: Vec::new(),
        action_schemas: Vec::new(),
    };
    // Types and predicates must be known before actions are checked, and
    // PDDL does not fix the section order strictly, so collect first.
    let mut actions = Vec::new();
    let mut type_decls = Vec::new();
    let mut const_decls = Vec::new();
    let mut pred_param_types = Vec::new();
    for sec in sections {
        let items = list(sec, "a domain section")?;
        let head = items
            .first()
            .and_then(SExpr::as_symbol)
            .ok_or_else(|| syntax(sec.pos(), "expected a section keyword"))?;
        match head {
            ":requirements" => {
                for r in &items[1..] {
                    let r_name = symbol(r, "a requirement flag")?;
                    if KNOWN_UNSUPPORTED_REQUIREMENTS.contains(&r_name.as_str()) {
                        return Err(unsupported(r.pos(), format!("requirement {r_name}")));
                    }
                    if !SUPPORTED_REQUIREMENTS.contains(&r_name.as_str()) {
                        return Err(PddlError::UnknownRequirement {
                            flag: r_name,
                            line: r.pos().line,
                            col: r.pos().col,
                        });
                    }
                    dom.requirements.push(r_name);
                }
            }
            ":types" => type_decls.extend(typed_list(&items[1..])?),
            ":constants" => const_decls.extend(typed_list(&items[1..])?),
            ":predicates" => {
                for p in &items[1..] {
                    let parts = list(p, "a predicate declaration")?;
                    let pname = symbol(
                        parts.first().ok_or_else(|| syntax(p.pos(), "empty predicate"))?,
                        "a predicate name",
                    )?;
                    if dom.predicates.iter().any(|q| q.name == pname) {
                        return Err(syntax(p.pos(), format!("predicate {pname} declared twice")));
                    }
                    let mut params = Vec::new();
                    for (name, ty, pos) in typed_list(&parts[1..])? {
                        pred_param_types.push((ty.clone(), pos));
                        params.push(TypedName { name, ty });
                    }
                    dom.predicates.push(PredicateSchema { name: pname, params });
                }
            }
            ":action" => actions.push(sec),
            ":functions" | ":derived" | ":durative-action" | ":constraints" => {
                return Err(unsupported(sec.pos(), head.to_string()))
            }
            other => return Err(syntax(sec.pos(), format!("unknown domain section {other}"))),
        }
    }

    for (ty, parent, _) in &type_decls {
        dom.types.declare(ty, parent);
    }
    // A type used only as a parent is an implicit subtype of `object`.
    for (_, parent, _) in &type_decls {
        if !dom.types.is_declared(parent) {
            dom.types.declare(parent, ROOT_TYPE);
        }
    }
    for (ty, parent, pos) in &type_decls {
        if ty != ROOT_TYPE && dom.types.is_subtype(parent, ty) {
            return Err(syntax(*pos, format!("type {ty} is part of a cycle")));
        }
    }
    let check_type = |ty: &str, pos: Pos| -> Result<(), PddlError> {
        if dom.types.is_declared(ty) {
            Ok(())
        } else {
            Err(PddlError::UndeclaredType {
                name: ty.to_string(),
                line: pos.line,
                col: pos.col,
            })
        }
    };
    for (name, ty, pos) in &const_decls {
        check_type(ty, *pos)?;
        dom.constants.push(TypedName {
            name: name.clone(),
            ty: ty.clone(),
        });
    }
    for (ty, pos) in &pred_param_types {
        check_type(ty, *pos)?;
    }

    for sec in actions {
        let schema = parse_action(sec, &dom)?;
        if dom.schema(&schema.name).is_some() {
            return Err(syntax(sec.pos(), format!("action {} declared twice", schema.name)));
        }
        dom.action_schemas.push(schema);
    }
    Ok(dom)
}

fn parse_action(sec: &SExpr, dom: &DomainAst) -> Result<ActionSchema, PddlError> {
    let items = sec.as_list().unwrap_or(&[]);
    let name = symbol(
        items.get(1).ok_or_else(|| syntax(sec.pos(), "missing action name"))?,
        "an action name",
    )?;
    let mut params = Vec::new();
    let mut pre_expr = None;
    let mut eff_expr = None;
    let mut i = 2;
    while i < items.len() {
        let key = symbol(&items[i], "an action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(items[i].pos(), format!("missing value for {key}")))?;
        match key.as_str() {
            ":parameters" => {
                for (pname, ty, pos) in typed_list(list(value, "a parameter list")?)? {
                    if !pname.starts_with('?') {
                        return Err(syntax(pos, format!("parameter {pname} must start with '?'")));
                    }
                    if !dom.types.is_declared(&ty) {
                        return Err(PddlError::UndeclaredType {
                            name: ty,
                            line: pos.line,
                            col: pos.col,
                        });
                    }
                    if params.iter().any(|p: &TypedName| p.name == pname) {
                        return Err(syntax(pos, format!("duplicate parameter {pname}")));
                    }
                    params.push(TypedName { name: pname, ty });
                }
            }
            ":precondition" => pre_expr = Some(value),
            ":effect" => eff_expr = Some(value),
            other => return Err(syntax(items[i].pos(), format!("unknown action keyword {other}"))),
        }
        i += 2;
    }

    let mut pre = Vec::new();
    if let Some(e) = pre_expr {
        collect_precondition(e, &params, dom, &mut pre)?;
    }
    let mut add = Vec::new();
    let mut del = Vec::new();
    if let Some(e) = eff_expr {
        collect_effect(e, &params, dom, &mut add, &mut del)?;
    }
    Ok(ActionSchema {
        name,
        params,
        pre,
        add,
        del,
    })
}

fn collect_precondition(
    e: &SExpr,
    params: &[TypedName],
    dom: &DomainAst,
    out: &mut Vec<AtomSchema>,
) -> Result<(), PddlError> {
    let items = list(e, "a precondition formula")?;
    match e.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..]
            .iter()
            .try_for_each(|sub| collect_precondition(sub, params, dom, out)),
        Some("not") => Err(unsupported(e.pos(), "negative precondition")),
        Some(h) if UNSUPPORTED_FORMULA_HEADS.contains(&h) => Err(unsupported(e.pos(), format!("'{h}' in precondition"))),
        _ => {
            out.push(schema_atom(e, params, dom)?);
            Ok(())
        }
    }
}

fn collect_effect(
    e: &SExpr,
    params: &[TypedName],
    dom: &DomainAst,
    add: &mut Vec<AtomSchema>,
    del: &mut Vec<AtomSchema>,
) -> Result<(), PddlError> {
    let items = list(e, "an effect formula")?;
    match e.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..]
            .iter()
            .try_for_each(|sub| collect_effect(sub, params, dom, add, del)),
        Some("not") => {
            if items.len() != 2 {
                return Err(syntax(e.pos(), "'not' takes one atom"));
            }
            del.push(schema_atom(&items[1], params, dom)?);
            Ok(())
        }
        Some(h) if UNSUPPORTED_FORMULA_HEADS.contains(&h) => Err(unsupported(e.pos(), format!("'{h}' in effect"))),
        _ => {
            add.push(schema_atom(e, params, dom)?);
            Ok(())
        }
    }
}

fn arity_mismatch(predicate: &str, expected: usize, found: usize, pos: Pos) -> PddlError {
    PddlError::ArityMismatch {
        predicate: predicate.to_string(),
        expected,
        found,
        line: pos.line,
        col: pos.col,
    }
}

fn schema_atom(e: &SExpr, params: &[TypedName], dom: &DomainAst) -> Result<AtomSchema, PddlError> {
    let items = list(e, "an atom")?;
    let pos = e.pos();
    let pname = symbol(items.first().ok_or_else(|| syntax(pos, "empty atom"))?, "a predicate")?;
    let pred = dom.predicate(&pname).ok_or_else(|| PddlError::UndeclaredPredicate {
        name: pname.clone(),
        line: pos.line,
        col: pos.col,
    })?;
    if pred.params.len() != items.len() - 1 {
        return Err(arity_mismatch(&pname, pred.params.len(), items.len() - 1, pos));
    }
    let mut args = Vec::with_capacity(pred.params.len());
    for (arg, slot) in items[1..].iter().zip(&pred.params) {
        let a = symbol(arg, "a term")?;
        let (term, ty) = if a.starts_with('?') {
            let idx = params.iter().position(|p| p.name == a).ok_or_else(|| {
                syntax(arg.pos(), format!("undeclared variable {a}"))
            })?;
            (Term::Param(idx), params[idx].ty.clone())
        } else {
            let c = dom.constants.iter().find(|c| c.name == a).ok_or_else(|| PddlError::UnknownObject {
                name: a.clone(),
                line: arg.pos().line,
                col: arg.pos().col,
            })?;
            (Term::Constant(a.clone()), c.ty.clone())
        };
        if !dom.types.is_subtype(&ty, &slot.ty) {
            return Err(PddlError::TypeMismatch {
                term: a,
                expected: slot.ty.clone(),
                found: ty,
                line: arg.pos().line,
                col: arg.pos().col,
            });
        }
        args.push(term);
    }
    Ok(AtomSchema {
        predicate: pname,
        args,
    })
}

/// Parses a problem file against an already parsed domain.
pub fn parse_problem(text: &str, domain: &DomainAst) -> Result<ProblemAst, PddlError> {
    let root = parse_one(text)?;
    let (name, sections) = definition(&root, "problem")?;
    let mut prob = ProblemAst {
        name,
        domain_name: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut init_expr = None;
    let mut goal_expr = None;
    for sec in sections {
        let items = list(sec, "a problem section")?;
        let head = items
            .first()
            .and_then(SExpr::as_symbol)
            .ok_or_else(|| syntax(sec.pos(), "expected a section keyword"))?;
        match head {
            ":domain" => {
                let d = symbol(items.get(1).ok_or_else(|| syntax(sec.pos(), "missing domain name"))?, "a domain name")?;
                if d != domain.name {
                    return Err(PddlError::DomainMismatch {
                        expected: domain.name.clone(),
                        found: d,
                    });
                }
                prob.domain_name = d;
            }
            ":requirements" => {
                for r in &items[1..] {
                    let r_name = symbol(r, "a requirement flag")?;
                    if KNOWN_UNSUPPORTED_REQUIREMENTS.contains(&r_name.as_str()) {
                        return Err(unsupported(r.pos(), format!("requirement {r_name}")));
                    }
                    if !SUPPORTED_REQUIREMENTS.contains(&r_name.as_str()) {
                        return Err(PddlError::UnknownRequirement {
                            flag: r_name,
                            line: r.pos().line,
                            col: r.pos().col,
                        });
                    }
                }
            }
            ":objects" => {
                for (oname, ty, pos) in typed_list(&items[1..])? {
                    if !domain.types.is_declared(&ty) {
                        return Err(PddlError::UndeclaredType {
                            name: ty,
                            line: pos.line,
                            col: pos.col,
                        });
                    }
                    if prob.objects.iter().any(|o| o.name == oname) || domain.constants.iter().any(|c| c.name == oname) {
                        return Err(syntax(pos, format!("object {oname} declared twice")));
                    }
                    prob.objects.push(TypedName { name: oname, ty });
                }
            }
            ":init" => init_expr = Some(sec),
            ":goal" => goal_expr = Some(sec),
            ":metric" | ":constraints" => return Err(unsupported(sec.pos(), head.to_string())),
            other => return Err(syntax(sec.pos(), format!("unknown problem section {other}"))),
        }
    }
    if prob.domain_name.is_empty() {
        return Err(syntax(root.pos(), "missing (:domain <name>)"));
    }

    let mut types: HashMap<&str, &str> = HashMap::new();
    for o in domain.constants.iter().chain(&prob.objects) {
        types.insert(&o.name, &o.ty);
    }

    let mut init = BTreeSet::new();
    if let Some(sec) = init_expr {
        for a in &sec.as_list().unwrap()[1..] {
            if a.head() == Some("=") {
                return Err(unsupported(a.pos(), "numeric initial value"));
            }
            if a.head() == Some("not") {
                return Err(unsupported(a.pos(), "negative literal in init"));
            }
            init.insert(ground_atom(a, domain, &types)?);
        }
    }
    let mut goal = BTreeSet::new();
    if let Some(sec) = goal_expr {
        let items = sec.as_list().unwrap();
        if items.len() > 2 {
            return Err(syntax(sec.pos(), "goal takes a single formula"));
        }
        if let Some(g) = items.get(1) {
            collect_goal(g, domain, &types, &mut goal)?;
        }
    }
    prob.init = init.into_iter().collect();
    prob.goal = goal.into_iter().collect();
    Ok(prob)
}

fn collect_goal(
    e: &SExpr,
    domain: &DomainAst,
    types: &HashMap<&str, &str>,
    out: &mut BTreeSet<GroundAtom>,
) -> Result<(), PddlError> {
    let items = list(e, "a goal formula")?;
    match e.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..].iter().try_for_each(|g| collect_goal(g, domain, types, out)),
        Some("not") => Err(unsupported(e.pos(), "negative goal")),
        Some(h) if UNSUPPORTED_FORMULA_HEADS.contains(&h) => Err(unsupported(e.pos(), format!("'{h}' in goal"))),
        _ => {
            out.insert(ground_atom(e, domain, types)?);
            Ok(())
        }
    }
}

fn ground_atom(e: &SExpr, domain: &DomainAst, types: &HashMap<&str, &str>) -> Result<GroundAtom, PddlError> {
    let items = list(e, "an atom")?;
    let pos = e.pos();
    let pname = symbol(items.first().ok_or_else(|| syntax(pos, "empty atom"))?, "a predicate")?;
    let pred = domain.predicate(&pname).ok_or_else(|| PddlError::UndeclaredPredicate {
        name: pname.clone(),
        line: pos.line,
        col: pos.col,
    })?;
    if pred.params.len() != items.len() - 1 {
        return Err(arity_mismatch(&pname, pred.params.len(), items.len() - 1, pos));
    }
    let mut args = Vec::new();
    for (arg, slot) in items[1..].iter().zip(&pred.params) {
        let a = symbol(arg, "an object")?;
        if a.starts_with('?') {
            return Err(syntax(arg.pos(), format!("variable {a} in a ground atom")));
        }
        let ty = types.get(a.as_str()).ok_or_else(|| PddlError::UnknownObject {
            name: a.clone(),
            line: arg.pos().line,
            col: arg.pos().col,
        })?;
        if !domain.types.is_subtype(ty, &slot.ty) {
            return Err(PddlError::TypeMismatch {
                term: a.clone(),
                expected: slot.ty.clone(),
                found: ty.to_string(),
                line: arg.pos().line,
                col: arg.pos().col,
            });
        }
        args.push(a);
    }
    Ok(GroundAtom::new(pname, args))
}
