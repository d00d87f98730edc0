//! Bearing-inspection benchmark generator.
//!
//! Two robots share the workcell: `gr1` has a small gripper (top grasps only),
//! `gr2` a big one (top and side grasps). Each robot has its own table with `b`
//! spots and its own camera. Both reach a handover point; only `gr2` reaches
//! the human-inspection table and only `gr1` reaches the conveyor. Every
//! bearing must be presented from all four sides, placed for human
//! inspection and finally discarded.

use std::fmt::Write;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("bearing count must be at least 1")]
    NoBearings,
    #[error("failure probability must lie in [0, 1), got {0}")]
    FailureProbability(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Both robots, all 17 schemas, six sub-goals per bearing.
    Full,
    /// One bearing, the big robot only, top and one side presented.
    Reduced,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BearingScenario {
    pub bearings: usize,
    /// Probability that a present action fails; recorded in the problem header.
    pub failure_f: f64,
    pub variant: Variant,
}

impl BearingScenario {
    pub fn new(bearings: usize) -> Self {
        BearingScenario {
            bearings,
            failure_f: 0.0,
            variant: Variant::Full,
        }
    }

    pub fn stochastic(bearings: usize, f: f64) -> Self {
        BearingScenario {
            failure_f: f,
            ..Self::new(bearings)
        }
    }

    pub fn reduced() -> Self {
        BearingScenario {
            variant: Variant::Reduced,
            ..Self::new(1)
        }
    }

    /// Number of sub-goals.
    pub fn goal_count(&self) -> usize {
        match self.variant {
            Variant::Full => 6 * self.bearings,
            Variant::Reduced => 2,
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.bearings == 0 {
            return Err(DomainError::NoBearings);
        }
        if !(0.0..1.0).contains(&self.failure_f) {
            return Err(DomainError::FailureProbability(self.failure_f));
        }
        Ok(())
    }
}

struct Schema {
    name: &'static str,
    params: &'static str,
    pre: &'static str,
    add: &'static str,
    del: &'static str,
}

const PICK_PARAMS: &str = "?g - gripper ?b - bearing ?s - spot";
const PRESENT_PARAMS: &str = "?g - gripper ?b - bearing ?c - camera";
const HANDOVER_PARAMS: &str = "?g1 - gripper ?g2 - gripper ?b - bearing ?p - handover-point";
const TABLE_PARAMS: &str = "?g - gripper ?b - bearing ?t - inspection-table";

const SCHEMAS: [Schema; 17] = [
    Schema {
        name: "pick-top-small",
        params: PICK_PARAMS,
        pre: "(small ?g) (free ?g) (placed ?b ?s)",
        add: "(holding-top ?g ?b) (spot-free ?s)",
        del: "(free ?g) (placed ?b ?s)",
    },
    Schema {
        name: "pick-top-big",
        params: PICK_PARAMS,
        pre: "(big ?g) (free ?g) (placed ?b ?s)",
        add: "(holding-top ?g ?b) (spot-free ?s)",
        del: "(free ?g) (placed ?b ?s)",
    },
    Schema {
        name: "pick-side-big",
        params: PICK_PARAMS,
        pre: "(big ?g) (free ?g) (placed ?b ?s)",
        add: "(holding-side ?g ?b) (spot-free ?s)",
        del: "(free ?g) (placed ?b ?s)",
    },
    Schema {
        name: "place-top-small",
        params: PICK_PARAMS,
        pre: "(small ?g) (holding-top ?g ?b) (spot-free ?s) (not (plhi ?b))",
        add: "(placed ?b ?s) (free ?g)",
        del: "(holding-top ?g ?b) (spot-free ?s)",
    },
    Schema {
        name: "place-top-big",
        params: PICK_PARAMS,
        pre: "(big ?g) (holding-top ?g ?b) (spot-free ?s) (not (plhi ?b))",
        add: "(placed ?b ?s) (free ?g)",
        del: "(holding-top ?g ?b) (spot-free ?s)",
    },
    Schema {
        name: "place-side-big",
        params: PICK_PARAMS,
        pre: "(big ?g) (holding-side ?g ?b) (spot-free ?s) (not (plhi ?b))",
        add: "(placed ?b ?s) (free ?g)",
        del: "(holding-side ?g ?b) (spot-free ?s)",
    },
    Schema {
        name: "present-top",
        params: PRESENT_PARAMS,
        pre: "(holding-side ?g ?b) (not (pr ?b si1))",
        add: "(pr ?b si1)",
        del: "",
    },
    Schema {
        name: "present-bottom",
        params: PRESENT_PARAMS,
        pre: "(holding-top ?g ?b) (not (pr ?b si2))",
        add: "(pr ?b si2)",
        del: "",
    },
    Schema {
        name: "present-side-a",
        params: PRESENT_PARAMS,
        pre: "(holding-top ?g ?b) (not (pr ?b si3))",
        add: "(pr ?b si3)",
        del: "",
    },
    Schema {
        name: "present-side-b",
        params: PRESENT_PARAMS,
        pre: "(holding-top ?g ?b) (not (pr ?b si4))",
        add: "(pr ?b si4)",
        del: "",
    },
    Schema {
        name: "handover-small-big",
        params: HANDOVER_PARAMS,
        pre: "(small ?g1) (big ?g2) (holding-top ?g1 ?b) (free ?g2)",
        add: "(holding-side ?g2 ?b) (free ?g1)",
        del: "(holding-top ?g1 ?b) (free ?g2)",
    },
    Schema {
        name: "handover-big-small",
        params: HANDOVER_PARAMS,
        pre: "(big ?g1) (small ?g2) (holding-side ?g1 ?b) (free ?g2)",
        add: "(holding-top ?g2 ?b) (free ?g1)",
        del: "(holding-side ?g1 ?b) (free ?g2)",
    },
    Schema {
        name: "place-hi-top",
        params: TABLE_PARAMS,
        pre: "(holding-top ?g ?b) (pr ?b si1) (pr ?b si2) (pr ?b si3) (pr ?b si4) (not (plhi ?b))",
        add: "(at-hi ?b ?t) (plhi ?b) (free ?g)",
        del: "(holding-top ?g ?b)",
    },
    Schema {
        name: "place-hi-side",
        params: TABLE_PARAMS,
        pre: "(holding-side ?g ?b) (pr ?b si1) (pr ?b si2) (pr ?b si3) (pr ?b si4) (not (plhi ?b))",
        add: "(at-hi ?b ?t) (plhi ?b) (free ?g)",
        del: "(holding-side ?g ?b)",
    },
    Schema {
        name: "pick-hi-top",
        params: TABLE_PARAMS,
        pre: "(free ?g) (at-hi ?b ?t)",
        add: "(holding-top ?g ?b)",
        del: "(free ?g) (at-hi ?b ?t)",
    },
    Schema {
        name: "pick-hi-side",
        params: TABLE_PARAMS,
        pre: "(big ?g) (free ?g) (at-hi ?b ?t)",
        add: "(holding-side ?g ?b)",
        del: "(free ?g) (at-hi ?b ?t)",
    },
    Schema {
        name: "discard",
        params: "?g - gripper ?b - bearing ?c - conveyor",
        pre: "(holding-top ?g ?b) (plhi ?b)",
        add: "(di ?b) (free ?g)",
        del: "(holding-top ?g ?b)",
    },
];

const REDUCED_SCHEMAS: [&str; 6] = [
    "pick-top-big",
    "pick-side-big",
    "place-top-big",
    "place-side-big",
    "present-top",
    "present-side-a",
];

const TYPES: &str = "gripper bearing spot camera side inspection-table handover-point conveyor";

const PREDICATES: [&str; 11] = [
    "(small ?g - gripper)",
    "(big ?g - gripper)",
    "(free ?g - gripper)",
    "(holding-top ?g - gripper ?b - bearing)",
    "(holding-side ?g - gripper ?b - bearing)",
    "(placed ?b - bearing ?s - spot)",
    "(spot-free ?s - spot)",
    "(pr ?b - bearing ?si - side)",
    "(at-hi ?b - bearing ?t - inspection-table)",
    "(plhi ?b - bearing)",
    "(di ?b - bearing)",
];

/// Names of the action schemas emitted for `variant`, in declaration order.
pub fn schema_names(variant: Variant) -> Vec<&'static str> {
    SCHEMAS
        .iter()
        .map(|s| s.name)
        .filter(|n| variant == Variant::Full || REDUCED_SCHEMAS.contains(n))
        .collect()
}

pub fn generate_domain(variant: Variant) -> String {
    let mut out = String::new();
    let label = match variant {
        Variant::Full => "bearing",
        Variant::Reduced => "bearing-reduced",
    };
    writeln!(out, "; bearing inspection domain ({label})").unwrap();
    out.push_str("; action schemas:\n");
    for name in schema_names(variant) {
        writeln!(out, ";   {name}").unwrap();
    }
    writeln!(out, "(domain {label}").unwrap();
    writeln!(out, "  (:types {TYPES})").unwrap();
    out.push_str("  (:predicates");
    for p in PREDICATES {
        write!(out, "\n    {p}").unwrap();
    }
    out.push(')');
    for s in SCHEMAS
        .iter()
        .filter(|s| variant == Variant::Full || REDUCED_SCHEMAS.contains(&s.name))
    {
        write!(
            out,
            "\n  (:action {}\n    (:params {})\n    (:pre {})\n    (:add {})\n    (:del {})\n    :global)",
            s.name, s.params, s.pre, s.add, s.del
        )
        .unwrap();
    }
    out.push_str(")\n");
    out
}

fn spot_y(i: usize, b: usize) -> f64 {
    if b == 1 {
        0.0
    } else {
        -0.25 + 0.5 * i as f64 / (b - 1) as f64
    }
}

/// The table holding bearing `i` (0-based) and its spot index on that table.
fn initial_spot(i: usize) -> (usize, usize) {
    (i % 2 + 1, i / 2 + 1)
}

pub fn generate_problem(scenario: &BearingScenario) -> Result<String, DomainError> {
    scenario.validate()?;
    let b = scenario.bearings;
    let reduced = scenario.variant == Variant::Reduced;
    let mut out = String::new();
    writeln!(out, "; bearing inspection problem: b={b}, N={}", scenario.goal_count()).unwrap();
    if scenario.failure_f > 0.0 {
        writeln!(
            out,
            "; stochastic: present fails with probability f={}",
            scenario.failure_f
        )
        .unwrap();
    }
    let name = if reduced {
        "bearing-reduced-1".to_string()
    } else {
        format!("bearing-{b}")
    };
    let tables: &[usize] = if reduced { &[2] } else { &[1, 2] };
    let robots: &[&str] = if reduced { &["gr2"] } else { &["gr1", "gr2"] };
    let spots_per_table = if reduced { 2 } else { b };

    writeln!(out, "(problem {name}").unwrap();
    out.push_str("  (:objects\n");
    writeln!(out, "    {} - gripper", robots.join(" ")).unwrap();
    let bearings: Vec<String> = (1..=b).map(|i| format!("be{i}")).collect();
    writeln!(out, "    {} - bearing", bearings.join(" ")).unwrap();
    for &t in tables {
        let spots: Vec<String> = (1..=spots_per_table).map(|s| format!("t{t}s{s}")).collect();
        writeln!(out, "    {} - spot", spots.join(" ")).unwrap();
    }
    let cams: Vec<String> = tables.iter().map(|t| format!("cam{t}")).collect();
    writeln!(out, "    {} - camera", cams.join(" ")).unwrap();
    out.push_str("    si1 si2 si3 si4 - side");
    if !reduced {
        out.push_str("\n    hit - inspection-table\n    hp - handover-point\n    conv - conveyor");
    }
    out.push(')');

    out.push_str("\n  (:init");
    for &r in robots {
        let size = if r == "gr1" { "small" } else { "big" };
        write!(out, "\n    ({size} {r}) (free {r})").unwrap();
    }
    let mut occupied = Vec::new();
    for (i, be) in bearings.iter().enumerate() {
        let (t, s) = if reduced { (2, 1) } else { initial_spot(i) };
        write!(out, "\n    (placed {be} t{t}s{s})").unwrap();
        occupied.push((t, s));
    }
    for &t in tables {
        for s in 1..=spots_per_table {
            if !occupied.contains(&(t, s)) {
                write!(out, "\n    (spot-free t{t}s{s})").unwrap();
            }
        }
    }
    out.push(')');

    out.push_str("\n  (:goal");
    for be in &bearings {
        if reduced {
            write!(out, "\n    (pr {be} si1) (pr {be} si3)").unwrap();
        } else {
            write!(
                out,
                "\n    (pr {be} si1) (pr {be} si2) (pr {be} si3) (pr {be} si4) (plhi {be}) (di {be})"
            )
            .unwrap();
        }
    }
    out.push(')');

    out.push_str("\n  (:geometry");
    if !reduced {
        out.push_str("\n    (base gr1 0.0 0.0 0.0)");
    }
    out.push_str("\n    (base gr2 1.0 0.0 0.0)");
    for &t in tables {
        let x = if t == 1 { -0.4 } else { 1.4 };
        for s in 1..=spots_per_table {
            write!(
                out,
                "\n    (loc t{t}s{s} {x:.3} {:.3} 0.000)",
                spot_y(s - 1, spots_per_table)
            )
            .unwrap();
        }
    }
    for &t in tables {
        let x = if t == 1 { 0.0 } else { 1.0 };
        write!(out, "\n    (loc cam{t} {x:.3} 0.450 0.300)").unwrap();
    }
    if !reduced {
        out.push_str("\n    (loc hp 0.500 0.000 0.300)");
        out.push_str("\n    (loc hit 1.000 -0.450 0.000)");
        out.push_str("\n    (loc conv 0.000 -0.450 0.000)");
    }
    for &r in robots {
        write!(out, "\n    (reach {r} 0.6)").unwrap();
    }
    out.push_str("))\n");
    Ok(out)
}

/// Domain and problem text for `scenario`.
pub fn generate_bearing(scenario: &BearingScenario) -> Result<(String, String), DomainError> {
    let problem = generate_problem(scenario)?;
    Ok((generate_domain(scenario.variant), problem))
}
