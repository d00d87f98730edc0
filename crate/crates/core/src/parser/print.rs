//! Canonical printer. `parse(print(x)) == x` for every parsed domain and problem.

use std::fmt::Write;

use crate::feasibility::{GeometryConfig, Point3};
use crate::model::{AtomTemplate, Domain, Problem, TypedVar};

pub trait Canonical {
    fn canonical(&self) -> String;
}

impl Canonical for Domain {
    fn canonical(&self) -> String {
        print_domain(self)
    }
}

impl Canonical for Problem {
    fn canonical(&self) -> String {
        print_problem(self)
    }
}

pub fn print_canonical<T: Canonical + ?Sized>(value: &T) -> String {
    value.canonical()
}

fn template(a: &AtomTemplate) -> String {
    let mut s = format!("({}", a.predicate);
    for t in &a.terms {
        write!(s, " {t}").unwrap();
    }
    s.push(')');
    s
}

fn params(vars: &[TypedVar]) -> String {
    vars.iter().map(|v| format!(" ?{} - {}", v.name, v.ty)).collect()
}

fn atoms<'a>(items: impl Iterator<Item = String> + 'a) -> String {
    items.map(|a| format!(" {a}")).collect()
}

pub fn print_domain(d: &Domain) -> String {
    let mut out = format!("(domain {}\n", d.name);
    writeln!(
        out,
        "  (:types{})",
        d.types.iter().map(|t| format!(" {t}")).collect::<String>()
    )
    .unwrap();
    out.push_str("  (:predicates");
    for p in &d.predicates {
        write!(out, "\n    ({}{})", p.name, params(&p.params)).unwrap();
    }
    out.push(')');
    for a in &d.actions {
        write!(out, "\n  (:action {}", a.name).unwrap();
        write!(out, "\n    (:params{})", params(&a.params)).unwrap();
        let pre = a
            .pre_pos
            .iter()
            .map(template)
            .chain(a.pre_neg.iter().map(|t| format!("(not {})", template(t))));
        write!(out, "\n    (:pre{})", atoms(pre)).unwrap();
        write!(out, "\n    (:add{})", atoms(a.add.iter().map(template))).unwrap();
        write!(out, "\n    (:del{})", atoms(a.del.iter().map(template))).unwrap();
        if a.global {
            out.push_str("\n    :global");
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

fn number(v: f64) -> String {
    let s = v.to_string();
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn point(p: &Point3) -> String {
    format!("{} {} {}", number(p.x), number(p.y), number(p.z))
}

fn geometry(g: &GeometryConfig) -> String {
    let mut out = String::from("  (:geometry");
    for (r, p) in &g.bases {
        write!(out, "\n    (base {r} {})", point(p)).unwrap();
    }
    for (o, p) in &g.locations {
        write!(out, "\n    (loc {o} {})", point(p)).unwrap();
    }
    for (r, radius) in &g.reach {
        write!(out, "\n    (reach {r} {})", number(*radius)).unwrap();
    }
    out.push(')');
    out
}

pub fn print_problem(p: &Problem) -> String {
    let mut out = format!("(problem {}\n", p.name);
    out.push_str("  (:objects");
    for o in &p.objects {
        write!(out, "\n    {} - {}", o.name, o.ty).unwrap();
    }
    out.push(')');
    out.push_str("\n  (:init");
    for a in &p.init {
        write!(out, "\n    {a}").unwrap();
    }
    out.push(')');
    out.push_str("\n  (:goal");
    for a in &p.goal {
        write!(out, "\n    {a}").unwrap();
    }
    out.push(')');
    if let Some(g) = &p.geometry {
        out.push('\n');
        out.push_str(&geometry(g));
    }
    out.push_str(")\n");
    out
}
