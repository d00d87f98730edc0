//! Shared test helpers: a stand-alone plain UCT planner used as a reference.
#![allow(dead_code)]

use mgtp_core::model::{apply, is_applicable, GoalSet, State, Task};

struct RefNode {
    parent: Option<usize>,
    state: State,
    achieved: GoalSet,
    w: f64,
    n: u64,
}

pub struct RefRun {
    /// Ids of the selected nodes, in selection order.
    pub chosen: Vec<usize>,
    pub terminal: Option<usize>,
    pub created: usize,
}

/// Plain UCT over a flat frontier with full expansion and sub-goal rewards,
/// written against the model layer only. Node ids follow creation order.
pub fn reference_uct(task: &Task, c: f64, reward: f64, max_nodes: usize) -> RefRun {
    let mut nodes = vec![RefNode {
        parent: None,
        state: task.init().clone(),
        achieved: task.initial_goal_set(),
        w: 0.0,
        n: 1,
    }];
    let mut run = RefRun {
        chosen: Vec::new(),
        terminal: None,
        created: 0,
    };
    if nodes[0].achieved.is_complete() {
        run.terminal = Some(0);
        return run;
    }
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let value = |i: usize| {
            let node = &nodes[i];
            let big_n = node.parent.map_or(node.n, |p| nodes[p].n) as f64;
            let n = node.n as f64;
            node.w / n + c * (big_n.ln() / n).sqrt()
        };
        let mut best = 0;
        for k in 1..frontier.len() {
            let (vk, vb) = (value(frontier[k]), value(frontier[best]));
            if vk > vb || (vk == vb && frontier[k] < frontier[best]) {
                best = k;
            }
        }
        let chosen = frontier.remove(best);
        run.chosen.push(chosen);
        let state = nodes[chosen].state.clone();
        let achieved = nodes[chosen].achieved.clone();
        for action in task.actions().iter().filter(|a| is_applicable(&state, a)) {
            if run.created == max_nodes {
                return run;
            }
            let next = apply(&state, action).unwrap();
            let new = achieved.new_subgoals(&state, &next);
            let mut child_achieved = achieved.clone();
            child_achieved.credit(&new);
            let r = if new.is_empty() { 0.0 } else { reward };
            let complete = child_achieved.is_complete();
            let id = nodes.len();
            nodes.push(RefNode {
                parent: Some(chosen),
                state: next,
                achieved: child_achieved,
                w: 0.0,
                n: 0,
            });
            run.created += 1;
            let mut cursor = Some(id);
            while let Some(k) = cursor {
                nodes[k].n += 1;
                nodes[k].w += r;
                cursor = nodes[k].parent;
            }
            if complete {
                run.terminal = Some(id);
                return run;
            }
            frontier.push(id);
        }
    }
    run
}
