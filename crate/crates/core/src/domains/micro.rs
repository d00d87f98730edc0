//! Tiny hand-checkable domains exercising single search mechanics.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MicroKind {
    /// A chain `s0 -> s4` whose only sub-goal is four steps deep.
    Demotion,
    /// Two sub-goals, each one step from the root.
    Retention,
    /// A trap branch with no successors next to a two-step solution.
    DeadEnd,
}

impl MicroKind {
    pub const ALL: [MicroKind; 3] = [MicroKind::Demotion, MicroKind::Retention, MicroKind::DeadEnd];

    pub fn name(self) -> &'static str {
        match self {
            MicroKind::Demotion => "demotion",
            MicroKind::Retention => "retention",
            MicroKind::DeadEnd => "dead-end",
        }
    }

    /// Length of the shortest plan, checked by hand.
    pub fn optimal_length(self) -> usize {
        match self {
            MicroKind::Demotion => 4,
            MicroKind::Retention => 2,
            MicroKind::DeadEnd => 2,
        }
    }
}

const DEMOTION_DOMAIN: &str = "\
(domain demotion
  (:types step)
  (:predicates (at ?s - step) (next ?a - step ?b - step))
  (:action advance
    (:params ?a - step ?b - step)
    (:pre (at ?a) (next ?a ?b))
    (:add (at ?b))
    (:del (at ?a))))
";

const DEMOTION_PROBLEM: &str = "\
(problem demotion-chain
  (:objects s0 s1 s2 s3 s4 - step)
  (:init (at s0) (next s0 s1) (next s1 s2) (next s2 s3) (next s3 s4))
  (:goal (at s4)))
";

const RETENTION_DOMAIN: &str = "\
(domain retention
  (:types)
  (:predicates (g1) (g2))
  (:action a (:params) (:pre (not (g1))) (:add (g1)) (:del))
  (:action b (:params) (:pre (not (g2))) (:add (g2)) (:del)))
";

const RETENTION_PROBLEM: &str = "\
(problem retention-pair
  (:objects)
  (:init)
  (:goal (g1) (g2)))
";

const DEAD_END_DOMAIN: &str = "\
(domain dead-end
  (:types)
  (:predicates (start) (trapped) (half) (finished))
  (:action trap (:params) (:pre (start)) (:add (trapped)) (:del (start)))
  (:action go (:params) (:pre (start)) (:add (half)) (:del (start)))
  (:action finish (:params) (:pre (half)) (:add (finished)) (:del (half))))
";

const DEAD_END_PROBLEM: &str = "\
(problem dead-end-fork
  (:objects)
  (:init (start))
  (:goal (finished)))
";

/// Domain and problem text for `kind`.
pub fn generate_micro(kind: MicroKind) -> (String, String) {
    let (d, p) = match kind {
        MicroKind::Demotion => (DEMOTION_DOMAIN, DEMOTION_PROBLEM),
        MicroKind::Retention => (RETENTION_DOMAIN, RETENTION_PROBLEM),
        MicroKind::DeadEnd => (DEAD_END_DOMAIN, DEAD_END_PROBLEM),
    };
    (d.to_string(), p.to_string())
}
