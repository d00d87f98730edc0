//! Reader for the domain and problem file format.
//!
//! The format is a small s-expression subset of PDDL:
//!
//! ```text
//! (domain NAME
//!   (:types T*)
//!   (:predicates (P ?v - T ...)*)
//!   (:action A (:params ?v - T ...) (:pre LIT*) (:add ATOM*) (:del ATOM*) [:global])*)
//!
//! (problem NAME
//!   (:objects O - T ...)
//!   (:init ATOM*)
//!   (:goal ATOM*)
//!   [(:geometry (base R x y z)* (loc O x y z)* (reach R radius)*)])
//! ```
//!
//! Keywords are case-insensitive, identifiers are not. `;` starts a comment.

mod print;
mod sexpr;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::feasibility::{GeometryConfig, Point3};
use crate::model::{
    ActionSchema, AtomTemplate, Domain, GroundAtom, ObjectDecl, PredicateDecl, Problem, Term, TypedVar,
};

pub use print::{print_canonical, print_domain, print_problem, Canonical};
pub use sexpr::{read_one, SExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Option<PathBuf>,
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize) -> Self {
        SourceSpan {
            file: None,
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}:{}:{}", p.display(), self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Syntax,
    UnknownPredicate,
    ArityMismatch,
    UnknownType,
    DuplicateName,
}

impl ParseErrorKind {
    /// Stable machine-readable code.
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownPredicate => "unknown-predicate",
            ParseErrorKind::ArityMismatch => "arity-mismatch",
            ParseErrorKind::UnknownType => "unknown-type",
            ParseErrorKind::DuplicateName => "duplicate-name",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: error[{}]: {message}", kind.code())]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError {
            span,
            kind,
            message: message.into(),
        }
    }

    pub fn with_file(mut self, path: &Path) -> Self {
        self.span.file = Some(path.to_path_buf());
        self
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn load_domain(path: &Path) -> Result<Domain, LoadError> {
    let text = read_file(path)?;
    Ok(parse_domain(&text).map_err(|e| e.with_file(path))?)
}

pub fn load_problem(path: &Path, domain: &Domain) -> Result<Problem, LoadError> {
    let text = read_file(path)?;
    Ok(parse_problem(&text, domain).map_err(|e| e.with_file(path))?)
}

fn read_file(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

type Result<T, E = ParseError> = std::result::Result<T, E>;

fn syntax(span: &SourceSpan, msg: impl Into<String>) -> ParseError {
    ParseError::new(span.clone(), ParseErrorKind::Syntax, msg)
}

/// Sequential access to the items of one list form.
struct Cursor<'a> {
    items: &'a [SExpr],
    pos: usize,
    /// Span of the enclosing list, used when items run out.
    span: &'a SourceSpan,
}

impl<'a> Cursor<'a> {
    fn of(expr: &'a SExpr, what: &str) -> Result<Self> {
        match expr {
            SExpr::List { items, span } => Ok(Cursor { items, pos: 0, span }),
            SExpr::Sym { span, text } => Err(syntax(span, format!("expected {what}, found `{text}`"))),
        }
    }

    fn peek(&self) -> Option<&'a SExpr> {
        self.items.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&'a SExpr> {
        let item = self
            .items
            .get(self.pos)
            .ok_or_else(|| syntax(self.span, format!("expected {what} before `)`")))?;
        self.pos += 1;
        Ok(item)
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let item = self.next(&format!("`{kw}`"))?;
        if item.is_keyword(kw) {
            Ok(())
        } else {
            Err(syntax(item.span(), format!("expected `{kw}`")))
        }
    }

    fn name(&mut self, what: &str) -> Result<(&'a str, &'a SourceSpan)> {
        let item = self.next(what)?;
        match item {
            SExpr::Sym { text, span } if is_identifier(text) => Ok((text, span)),
            other => Err(syntax(other.span(), format!("expected {what}"))),
        }
    }

    /// The next item, which must be a list headed by `kw`; returns a cursor past the head.
    fn section(&mut self, kw: &str) -> Result<Cursor<'a>> {
        let item = self.next(&format!("`({kw} ...)`"))?;
        if !item.is_form(kw) {
            return Err(syntax(item.span(), format!("expected `({kw} ...)`")));
        }
        let mut c = Cursor::of(item, kw)?;
        c.pos = 1;
        Ok(c)
    }

    fn rest(&mut self) -> &'a [SExpr] {
        let r = &self.items[self.pos..];
        self.pos = self.items.len();
        r
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(extra) => Err(syntax(extra.span(), "unexpected item")),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && !s.starts_with('?') && !s.starts_with(':') && s != "-"
}

fn is_variable(s: &str) -> bool {
    s.len() > 1 && s.starts_with('?')
}

/// `(name - type)*` with PDDL-style grouping (`a b - t`). Returns (name, type, name span).
fn typed_list(items: &[SExpr], variables: bool) -> Result<Vec<(&str, &SExpr, &SourceSpan)>> {
    let mut out = Vec::new();
    let mut pending: Vec<(&str, &SourceSpan)> = Vec::new();
    let mut it = items.iter();
    while let Some(item) = it.next() {
        let SExpr::Sym { text, span } = item else {
            return Err(syntax(item.span(), "expected a name, found a list"));
        };
        if text == "-" {
            let ty = it.next().ok_or_else(|| syntax(span, "expected a type after `-`"))?;
            match ty.as_sym() {
                Some(t) if is_identifier(t) => {}
                _ => return Err(syntax(ty.span(), "expected a type name")),
            }
            if pending.is_empty() {
                return Err(syntax(span, "`-` without a preceding name"));
            }
            for (n, s) in pending.drain(..) {
                out.push((n, ty, s));
            }
            continue;
        }
        let ok = if variables {
            is_variable(text)
        } else {
            is_identifier(text)
        };
        if !ok {
            let what = if variables {
                "a variable `?name`"
            } else {
                "an object name"
            };
            return Err(syntax(span, format!("expected {what}, found `{text}`")));
        }
        pending.push((text, span));
    }
    if let Some((n, s)) = pending.first() {
        return Err(syntax(s, format!("missing type for `{n}`")));
    }
    Ok(out)
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let top = read_one(text)?;
    let mut cur = Cursor::of(&top, "`(domain ...)`")?;
    cur.keyword("domain")?;
    let (name, _) = cur.name("a domain name")?;

    let mut types_sec = cur.section(":types")?;
    let mut types = Vec::new();
    for item in types_sec.rest() {
        match item.as_sym() {
            Some(t) if is_identifier(t) => {
                if types.iter().any(|x: &String| x == t) {
                    return Err(ParseError::new(
                        item.span().clone(),
                        ParseErrorKind::DuplicateName,
                        format!("type `{t}` declared twice"),
                    ));
                }
                types.push(t.to_string());
            }
            _ => return Err(syntax(item.span(), "expected a type name")),
        }
    }

    let check_type = |ty: &SExpr| -> Result<String> {
        let t = ty.as_sym().unwrap_or_default();
        if types.iter().any(|x| x == t) {
            Ok(t.to_string())
        } else {
            Err(ParseError::new(
                ty.span().clone(),
                ParseErrorKind::UnknownType,
                format!("unknown type `{t}`"),
            ))
        }
    };

    let mut preds_sec = cur.section(":predicates")?;
    let mut predicates: Vec<PredicateDecl> = Vec::new();
    for form in preds_sec.rest() {
        let mut pc = Cursor::of(form, "a predicate declaration")?;
        let (pname, pspan) = pc.name("a predicate name")?;
        if predicates.iter().any(|p| p.name == pname) {
            return Err(ParseError::new(
                pspan.clone(),
                ParseErrorKind::DuplicateName,
                format!("predicate `{pname}` declared twice"),
            ));
        }
        let params = typed_params(pc.rest(), &check_type)?;
        predicates.push(PredicateDecl {
            name: pname.to_string(),
            params,
        });
    }

    let mut actions: Vec<ActionSchema> = Vec::new();
    while let Some(form) = cur.peek() {
        if !form.is_form(":action") {
            return Err(syntax(form.span(), "expected `(:action ...)`"));
        }
        cur.pos += 1;
        let schema = parse_action(form, &predicates, &check_type)?;
        if actions.iter().any(|a| a.name == schema.name) {
            return Err(ParseError::new(
                form.span().clone(),
                ParseErrorKind::DuplicateName,
                format!("action `{}` declared twice", schema.name),
            ));
        }
        actions.push(schema);
    }

    Ok(Domain {
        name: name.to_string(),
        types,
        predicates,
        actions,
    })
}

fn typed_params(items: &[SExpr], check_type: &dyn Fn(&SExpr) -> Result<String>) -> Result<Vec<TypedVar>> {
    let mut params: Vec<TypedVar> = Vec::new();
    for (var, ty, span) in typed_list(items, true)? {
        let name = &var[1..];
        if params.iter().any(|p| p.name == name) {
            return Err(ParseError::new(
                span.clone(),
                ParseErrorKind::DuplicateName,
                format!("parameter `{var}` declared twice"),
            ));
        }
        params.push(TypedVar {
            name: name.to_string(),
            ty: check_type(ty)?,
        });
    }
    Ok(params)
}

fn parse_action(
    form: &SExpr,
    predicates: &[PredicateDecl],
    check_type: &dyn Fn(&SExpr) -> Result<String>,
) -> Result<ActionSchema> {
    let mut ac = Cursor::of(form, "an action")?;
    ac.keyword(":action")?;
    let (name, _) = ac.name("an action name")?;
    let mut params_sec = ac.section(":params")?;
    let params = typed_params(params_sec.rest(), check_type)?;

    let template = |expr: &SExpr| -> Result<AtomTemplate> {
        let mut c = Cursor::of(expr, "an atom")?;
        let (pred, pspan) = c.name("a predicate name")?;
        let decl = predicates.iter().find(|p| p.name == pred).ok_or_else(|| {
            ParseError::new(
                pspan.clone(),
                ParseErrorKind::UnknownPredicate,
                format!("unknown predicate `{pred}`"),
            )
        })?;
        let args = c.rest();
        if args.len() != decl.params.len() {
            return Err(ParseError::new(
                expr.span().clone(),
                ParseErrorKind::ArityMismatch,
                format!("`{pred}` takes {} arguments, found {}", decl.params.len(), args.len()),
            ));
        }
        let mut terms = Vec::with_capacity(args.len());
        for (arg, slot) in args.iter().zip(&decl.params) {
            let text = match arg.as_sym() {
                Some(t) if is_variable(t) || is_identifier(t) => t,
                _ => return Err(syntax(arg.span(), "expected a variable or object name")),
            };
            if let Some(v) = text.strip_prefix('?') {
                let param = params
                    .iter()
                    .find(|p| p.name == v)
                    .ok_or_else(|| syntax(arg.span(), format!("variable `{text}` is not a parameter of `{name}`")))?;
                if param.ty != slot.ty {
                    return Err(ParseError::new(
                        arg.span().clone(),
                        ParseErrorKind::UnknownType,
                        format!("`{text}` is a {}, but `{pred}` expects a {}", param.ty, slot.ty),
                    ));
                }
                terms.push(Term::Var(v.to_string()));
            } else {
                terms.push(Term::Const(text.to_string()));
            }
        }
        Ok(AtomTemplate {
            predicate: pred.to_string(),
            terms,
        })
    };

    let mut pre_pos = Vec::new();
    let mut pre_neg = Vec::new();
    let mut pre_sec = ac.section(":pre")?;
    for lit in pre_sec.rest() {
        if lit.is_form("not") {
            let items = lit.as_list().unwrap_or_default();
            if items.len() != 2 {
                return Err(syntax(lit.span(), "`not` takes exactly one atom"));
            }
            pre_neg.push(template(&items[1])?);
        } else {
            pre_pos.push(template(lit)?);
        }
    }
    let mut add_sec = ac.section(":add")?;
    let add = add_sec.rest().iter().map(&template).collect::<Result<Vec<_>>>()?;
    let mut del_sec = ac.section(":del")?;
    let del = del_sec.rest().iter().map(&template).collect::<Result<Vec<_>>>()?;

    let global = match ac.peek() {
        Some(item) if item.is_keyword(":global") => {
            ac.pos += 1;
            true
        }
        _ => false,
    };
    ac.finish()?;

    Ok(ActionSchema {
        name: name.to_string(),
        params,
        pre_pos,
        pre_neg,
        add,
        del,
        global,
    })
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem> {
    let top = read_one(text)?;
    let mut cur = Cursor::of(&top, "`(problem ...)`")?;
    cur.keyword("problem")?;
    let (name, _) = cur.name("a problem name")?;

    let mut obj_sec = cur.section(":objects")?;
    let mut objects: Vec<ObjectDecl> = Vec::new();
    let mut types_of: HashMap<String, String> = HashMap::new();
    for (obj, ty, span) in typed_list(obj_sec.rest(), false)? {
        let t = ty.as_sym().unwrap_or_default();
        if !domain.types.iter().any(|x| x == t) {
            return Err(ParseError::new(
                ty.span().clone(),
                ParseErrorKind::UnknownType,
                format!("unknown type `{t}`"),
            ));
        }
        if types_of.contains_key(obj) {
            return Err(ParseError::new(
                span.clone(),
                ParseErrorKind::DuplicateName,
                format!("object `{obj}` declared twice"),
            ));
        }
        types_of.insert(obj.to_string(), t.to_string());
        objects.push(ObjectDecl {
            name: obj.to_string(),
            ty: t.to_string(),
        });
    }

    let declared = |sym: &SExpr| -> Result<String> {
        let text = sym
            .as_sym()
            .filter(|t| is_identifier(t))
            .ok_or_else(|| syntax(sym.span(), "expected an object name"))?;
        if types_of.contains_key(text) {
            Ok(text.to_string())
        } else {
            Err(ParseError::new(
                sym.span().clone(),
                ParseErrorKind::UnknownType,
                format!("undeclared object `{text}`"),
            ))
        }
    };

    let ground_atom = |expr: &SExpr| -> Result<GroundAtom> {
        let mut c = Cursor::of(expr, "an atom")?;
        let (pred, pspan) = c.name("a predicate name")?;
        let decl = domain.predicate(pred).ok_or_else(|| {
            ParseError::new(
                pspan.clone(),
                ParseErrorKind::UnknownPredicate,
                format!("unknown predicate `{pred}`"),
            )
        })?;
        let args = c.rest();
        if args.len() != decl.params.len() {
            return Err(ParseError::new(
                expr.span().clone(),
                ParseErrorKind::ArityMismatch,
                format!("`{pred}` takes {} arguments, found {}", decl.params.len(), args.len()),
            ));
        }
        let mut out = Vec::with_capacity(args.len());
        for (arg, slot) in args.iter().zip(&decl.params) {
            let obj = declared(arg)?;
            let ty = &types_of[&obj];
            if *ty != slot.ty {
                return Err(ParseError::new(
                    arg.span().clone(),
                    ParseErrorKind::UnknownType,
                    format!("`{obj}` is a {ty}, but `{pred}` expects a {}", slot.ty),
                ));
            }
            out.push(obj);
        }
        Ok(GroundAtom {
            predicate: pred.to_string(),
            args: out,
        })
    };

    let mut init_sec = cur.section(":init")?;
    let mut init = Vec::new();
    let mut seen = HashSet::new();
    for expr in init_sec.rest() {
        let atom = ground_atom(expr)?;
        if seen.insert(atom.clone()) {
            init.push(atom);
        }
    }

    let mut goal_sec = cur.section(":goal")?;
    let mut goal: Vec<GroundAtom> = Vec::new();
    for expr in goal_sec.rest() {
        let atom = ground_atom(expr)?;
        if goal.contains(&atom) {
            return Err(ParseError::new(
                expr.span().clone(),
                ParseErrorKind::DuplicateName,
                format!("goal {atom} listed twice"),
            ));
        }
        goal.push(atom);
    }

    let geometry = match cur.peek() {
        Some(form) if form.is_form(":geometry") => {
            cur.pos += 1;
            Some(parse_geometry(form, &declared)?)
        }
        _ => None,
    };
    cur.finish()?;

    Ok(Problem {
        name: name.to_string(),
        objects,
        init,
        goal,
        geometry,
    })
}

fn parse_number(expr: &SExpr) -> Result<f64> {
    expr.as_sym()
        .and_then(|t| t.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| syntax(expr.span(), "expected a decimal number"))
}

fn parse_geometry(form: &SExpr, declared: &dyn Fn(&SExpr) -> Result<String>) -> Result<GeometryConfig> {
    let mut sec = Cursor::of(form, "a geometry block")?;
    sec.pos = 1;
    let mut geo = GeometryConfig {
        bases: BTreeMap::new(),
        locations: BTreeMap::new(),
        reach: BTreeMap::new(),
    };
    let dup = |span: &SourceSpan, what: &str, name: &str| {
        ParseError::new(
            span.clone(),
            ParseErrorKind::DuplicateName,
            format!("{what} for `{name}` given twice"),
        )
    };
    for entry in sec.rest() {
        let mut c = Cursor::of(entry, "a geometry entry")?;
        let head = c.next("`base`, `loc` or `reach`")?;
        let target = c.next("an object name")?;
        let name = declared(target)?;
        if head.is_keyword("base") || head.is_keyword("loc") {
            let p = Point3::new(
                parse_number(c.next("x")?)?,
                parse_number(c.next("y")?)?,
                parse_number(c.next("z")?)?,
            );
            c.finish()?;
            let (map, what) = if head.is_keyword("base") {
                (&mut geo.bases, "base")
            } else {
                (&mut geo.locations, "location")
            };
            if map.insert(name.clone(), p).is_some() {
                return Err(dup(target.span(), what, &name));
            }
        } else if head.is_keyword("reach") {
            let r_expr = c.next("a radius")?;
            let r = parse_number(r_expr)?;
            c.finish()?;
            if r <= 0.0 {
                return Err(syntax(r_expr.span(), "reach radius must be positive"));
            }
            if geo.reach.insert(name.clone(), r).is_some() {
                return Err(dup(target.span(), "reach", &name));
            }
        } else {
            return Err(syntax(head.span(), "expected `base`, `loc` or `reach`"));
        }
    }
    Ok(geo)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOMAIN: &str = r#"
; minimal test domain
(domain tiny
  (:types thing)
  (:predicates (ready ?x - thing) (done ?x - thing))
  (:action finish
    (:params ?x - thing)
    (:pre (ready ?x) (not (done ?x)))
    (:add (done ?x))
    (:del (ready ?x))
    :global))
"#;

    #[test]
    fn minimal_domain_with_effect_free_action() {
        let d = parse_domain("(domain m (:types) (:predicates (p)) (:action noop (:params) (:pre) (:add) (:del)))")
            .unwrap();
        assert_eq!(d.actions.len(), 1);
        assert!(d.actions[0].add.is_empty() && d.actions[0].del.is_empty());
        assert!(!d.actions[0].global);
    }

    #[test]
    fn parses_literals_and_global_flag() {
        let d = parse_domain(DOMAIN).unwrap();
        let a = &d.actions[0];
        assert_eq!(a.pre_pos.len(), 1);
        assert_eq!(a.pre_neg[0].predicate, "done");
        assert!(a.global);
    }

    #[test]
    fn keywords_ignore_case_identifiers_do_not() {
        let d = parse_domain("(DOMAIN m (:TYPES T) (:Predicates (P ?x - T)) (:ACTION a (:PARAMS ?x - T) (:PRE (NOT (P ?x))) (:ADD (P ?x)) (:DEL) :GLOBAL))").unwrap();
        assert_eq!(d.types, ["T"]);
        assert!(d.actions[0].global);
        let err = parse_domain(
            "(domain m (:types t) (:predicates (p ?x - t)) (:action a (:params ?x - t) (:pre (P ?x)) (:add) (:del)))",
        )
        .unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownPredicate);
    }

    #[test]
    fn unbalanced_paren_reports_syntax_at_span() {
        let err = parse_domain("(domain m\n  (:types t\n").unwrap_err();
        // the innermost open form is the one reported
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!((err.span.line, err.span.column), (2, 3));
    }

    #[test]
    fn undeclared_predicate_is_named() {
        let err = parse_domain(
            "(domain m (:types t) (:predicates (p ?x - t))\n (:action a (:params ?x - t) (:pre (q ?x)) (:add) (:del)))",
        )
        .unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownPredicate);
        assert!(err.message.contains("`q`"));
        assert_eq!((err.span.line, err.span.column), (2, 37));
    }

    #[test]
    fn domain_validation_errors() {
        let kind = |t: &str| parse_domain(t).unwrap_err().kind;
        assert_eq!(
            kind("(domain m (:types t t) (:predicates))"),
            ParseErrorKind::DuplicateName
        );
        assert_eq!(
            kind("(domain m (:types t) (:predicates (p ?x - u)))"),
            ParseErrorKind::UnknownType
        );
        assert_eq!(
            kind("(domain m (:types t) (:predicates (p ?x - t)) (:action a (:params ?x - t) (:pre (p ?x ?x)) (:add) (:del)))"),
            ParseErrorKind::ArityMismatch
        );
        assert_eq!(
            kind("(domain m (:types t) (:predicates (p ?x - t)) (:action a (:params ?x - t) (:pre (p ?y)) (:add) (:del)))"),
            ParseErrorKind::Syntax
        );
        assert_eq!(
            kind("(domain m (:types t) (:predicates) (:action a (:params ?x - t ?x - t) (:pre) (:add) (:del)))"),
            ParseErrorKind::DuplicateName
        );
        assert_eq!(
            kind("(domain m (:types t) (:predicates) (:action a (:params) (:pre) (:add) (:del)) (:action a (:params) (:pre) (:add) (:del)))"),
            ParseErrorKind::DuplicateName
        );
        assert_eq!(kind("(domain m (:predicates))"), ParseErrorKind::Syntax);
    }

    #[test]
    fn grouped_typed_lists() {
        let d = parse_domain("(domain m (:types t) (:predicates (p ?x ?y - t)))").unwrap();
        assert_eq!(d.predicates[0].params.len(), 2);
        assert!(parse_domain("(domain m (:types t) (:predicates (p ?x)))").is_err());
    }

    #[test]
    fn problem_goal_order_and_validation() {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem(
            "(problem q (:objects a b - thing) (:init (ready a) (ready b) (ready a)) (:goal (done b) (done a)))",
            &d,
        )
        .unwrap();
        assert_eq!(p.init.len(), 2);
        assert_eq!(p.goal[0], GroundAtom::new("done", ["b"]));
        assert!(p.geometry.is_none());

        let empty = parse_problem("(problem q (:objects) (:init) (:goal))", &d).unwrap();
        assert!(empty.goal.is_empty());

        let kind = |t: &str| parse_problem(t, &d).unwrap_err().kind;
        assert_eq!(
            kind("(problem q (:objects a - thing) (:init) (:goal (done a a)))"),
            ParseErrorKind::ArityMismatch
        );
        assert_eq!(
            kind("(problem q (:objects a - thing) (:init (ready z)) (:goal))"),
            ParseErrorKind::UnknownType
        );
        assert_eq!(
            kind("(problem q (:objects a - widget) (:init) (:goal))"),
            ParseErrorKind::UnknownType
        );
        assert_eq!(
            kind("(problem q (:objects a a - thing) (:init) (:goal))"),
            ParseErrorKind::DuplicateName
        );
        assert_eq!(
            kind("(problem q (:objects a - thing) (:init) (:goal (done a) (done a)))"),
            ParseErrorKind::DuplicateName
        );
        assert_eq!(
            kind("(problem q (:objects a - thing) (:init) (:goal (gone a)))"),
            ParseErrorKind::UnknownPredicate
        );
    }

    #[test]
    fn geometry_block() {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem(
            "(problem q (:objects r s - thing) (:init) (:goal)
               (:geometry (base r 0 0 0.5) (loc s -0.25 1.0 0) (reach r 0.75)))",
            &d,
        )
        .unwrap();
        let g = p.geometry.unwrap();
        assert_eq!(g.bases["r"], Point3::new(0.0, 0.0, 0.5));
        assert_eq!(g.locations["s"], Point3::new(-0.25, 1.0, 0.0));
        assert_eq!(g.reach["r"], 0.75);

        let kind = |t: &str| parse_problem(t, &d).unwrap_err().kind;
        assert_eq!(
            kind("(problem q (:objects r - thing) (:init) (:goal) (:geometry (reach r 0)))"),
            ParseErrorKind::Syntax
        );
        assert_eq!(
            kind("(problem q (:objects r - thing) (:init) (:goal) (:geometry (base x 0 0 0)))"),
            ParseErrorKind::UnknownType
        );
        assert_eq!(
            kind("(problem q (:objects r - thing) (:init) (:goal) (:geometry (base r 0 0)))"),
            ParseErrorKind::Syntax
        );
        assert_eq!(
            kind("(problem q (:objects r - thing) (:init) (:goal) (:geometry (loc r 0 0 0) (loc r 1 1 1)))"),
            ParseErrorKind::DuplicateName
        );
    }

    #[test]
    fn error_display_carries_file_and_code() {
        let err = parse_domain("(domain").unwrap_err().with_file(Path::new("d.pddl"));
        assert_eq!(
            err.to_string(),
            "d.pddl:1:1: error[syntax]: unbalanced parenthesis: `(` is never closed"
        );
    }
}
