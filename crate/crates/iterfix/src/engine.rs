//! The iterative inference loop: classify the program, derive suspicious
//! locations, generate candidate patches, validate them, and recurse —
//! re-running fault localization only when a partial patch strictly reduced
//! the failing count. Every explored state lands in a replayable trace.

use crate::check::{self, first_ce_location};
use crate::diffs;
use crate::exec::{render_fe_diagnostic, run_suite, TestReport, TestSuite, DEFAULT_STEP_BUDGET};
use crate::faultloc::{rank, SuspiciousLocation};
use crate::gen::{apply_patch, generate, make_context, CandidatePatch, GeneratorModel};
use crate::lang::{executable_lines, SourceProgram};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopPolicy {
    CollectAll,
    FirstPlausible,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineConfig {
    pub k: usize,
    pub max_iter: u32,
    pub top_n: usize,
    pub step_budget: u64,
    pub seed: u64,
    pub stop_policy: StopPolicy,
    pub prune_worsening: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            k: 2,
            max_iter: 3,
            top_n: 50,
            step_budget: DEFAULT_STEP_BUDGET,
            seed: 42,
            stop_policy: StopPolicy::CollectAll,
            prune_worsening: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    #[serde(rename = "CE")]
    Ce,
    #[serde(rename = "FE")]
    Fe,
    #[serde(rename = "PLAUSIBLE")]
    Plausible,
}

/// One explored program state. `failing` at a CE state is the count of its
/// nearest compilable ancestor (the suite cannot run); `location` is the
/// suspicious line the incoming patch targeted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceState {
    pub id: u32,
    pub parent: Option<u32>,
    pub depth: u32,
    pub kind: StateKind,
    pub failing: u32,
    pub diagnostic: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub location: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub patch: Option<CandidatePatch>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fl_snapshot: Option<Vec<SuspiciousLocation>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlausibleEntry {
    /// State ids from the root to the plausible state, inclusive.
    pub chain: Vec<u32>,
    pub path: String,
    pub diff: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairTrace {
    pub config: EngineConfig,
    pub root_source: String,
    pub states: Vec<TraceState>,
    pub plausible: Vec<PlausibleEntry>,
}

impl RepairTrace {
    /// Rebuilds a state's source text by replaying patches from the root.
    pub fn state_source(&self, id: u32) -> SourceProgram {
        let mut chain = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.states[i as usize].parent;
        }
        chain.reverse();
        let mut src = SourceProgram::new(&self.root_source);
        for i in chain {
            if let Some(p) = &self.states[i as usize].patch {
                src = apply_patch(&src, p);
            }
        }
        src
    }
}

/// Joins the kinds of every post-root state in a chain, ending in the
/// terminal "plausible".
pub fn evolution_path(kinds: &[StateKind]) -> String {
    assert_eq!(kinds.last(), Some(&StateKind::Plausible), "chain must end plausible");
    kinds
        .iter()
        .map(|k| match k {
            StateKind::Ce => "CE",
            StateKind::Fe => "FE",
            StateKind::Plausible => "plausible",
        })
        .collect::<Vec<_>>()
        .join("->")
}

fn classify_state(
    source: &SourceProgram,
    suite: &TestSuite,
    step_budget: u64,
) -> (StateKind, Option<TestReport>, String) {
    let diags = check::check(source);
    if !diags.is_empty() {
        return (StateKind::Ce, None, diags[0].render());
    }
    let report = run_suite(source, suite, step_budget);
    if report.failing == 0 {
        (StateKind::Plausible, Some(report), "all tests pass".to_string())
    } else {
        let diag = render_fe_diagnostic(&report);
        (StateKind::Fe, Some(report), diag)
    }
}

struct Search<'a> {
    config: &'a EngineConfig,
    model: &'a GeneratorModel,
    suite: &'a TestSuite,
    states: Vec<TraceState>,
    sources: Vec<SourceProgram>,
    plausible: Vec<PlausibleEntry>,
    explored: HashSet<String>,
    halted: bool,
}

impl Search<'_> {
    fn chain_of(&self, id: u32) -> Vec<u32> {
        let mut chain = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.states[i as usize].parent;
        }
        chain.reverse();
        chain
    }

    /// `inherited`: the location list this branch is still working on, if
    /// any. `governing`: the failing count N of the last compilable state at
    /// which fault localization ran; None before any FL run on this branch.
    fn expand(
        &mut self,
        id: u32,
        report: Option<&TestReport>,
        inherited: Option<Vec<u32>>,
        governing: Option<u32>,
    ) {
        if self.halted {
            return;
        }
        let (kind, depth, failing, diagnostic) = {
            let s = &self.states[id as usize];
            (s.kind, s.depth, s.failing, s.diagnostic.clone())
        };

        if kind == StateKind::Plausible {
            let chain = self.chain_of(id);
            let kinds: Vec<StateKind> = chain[1..]
                .iter()
                .map(|&i| self.states[i as usize].kind)
                .collect();
            let path = if kinds.is_empty() {
                // root was already plausible; rejected before search
                unreachable!("plausible root is rejected up front")
            } else {
                evolution_path(&kinds)
            };
            let diff = diffs::unified(&self.sources[0].text().to_string(), self.sources[id as usize].text());
            self.plausible.push(PlausibleEntry { chain, path, diff });
            if self.config.stop_policy == StopPolicy::FirstPlausible {
                self.halted = true;
            }
            return;
        }
        if depth >= self.config.max_iter {
            return;
        }

        let source = self.sources[id as usize].clone();
        let (locations, next_governing) = match kind {
            StateKind::Ce => {
                // the compiler names the line; no localization to run
                let diags = check::check(&source);
                (vec![first_ce_location(&diags, source.line_count())], governing)
            }
            StateKind::Fe => {
                let gate = inherited.is_none() || governing.map_or(true, |n| failing < n);
                if gate {
                    let report = report.expect("FE state has a report");
                    let executable = executable_lines(source.ast().expect("FE state parses"));
                    let ranked = rank(report, &executable, self.config.top_n);
                    let locs: Vec<u32> = ranked.iter().map(|l| l.line).collect();
                    self.states[id as usize].fl_snapshot = Some(ranked);
                    (locs, Some(failing))
                } else {
                    (inherited.unwrap(), governing)
                }
            }
            StateKind::Plausible => unreachable!(),
        };

        for loc in locations {
            let ctx = make_context(&source, loc, &diagnostic);
            for cand in generate(self.model, &ctx, self.config.k) {
                if self.halted {
                    return;
                }
                let child_src = apply_patch(&source, &cand);
                if !self.explored.insert(child_src.text().to_string()) {
                    continue;
                }
                let (ckind, creport, cdiag) =
                    classify_state(&child_src, self.suite, self.config.step_budget);
                let cfailing = match ckind {
                    StateKind::Ce => failing,
                    StateKind::Fe => creport.as_ref().unwrap().failing,
                    StateKind::Plausible => 0,
                };
                let cid = self.states.len() as u32;
                self.states.push(TraceState {
                    id: cid,
                    parent: Some(id),
                    depth: depth + 1,
                    kind: ckind,
                    failing: cfailing,
                    diagnostic: cdiag,
                    location: Some(loc),
                    patch: Some(cand),
                    fl_snapshot: None,
                });
                self.sources.push(child_src);
                if self.config.prune_worsening
                    && ckind == StateKind::Fe
                    && next_governing.map_or(false, |n| cfailing > n)
                {
                    continue; // recorded but not recursed, by explicit flag
                }
                self.expand(cid, creport.as_ref(), Some(vec![loc]), next_governing);
            }
        }
    }
}

/// Runs the full repair search and returns the trace. Errors on an empty
/// suite or an input that already passes everything.
pub fn iter_repair(
    program: &SourceProgram,
    suite: &TestSuite,
    config: &EngineConfig,
    model: &GeneratorModel,
) -> Result<RepairTrace, String> {
    if suite.tests.is_empty() {
        return Err("test suite is empty; plausibility would be vacuous".to_string());
    }
    let (kind, report, diagnostic) = classify_state(program, suite, config.step_budget);
    if kind == StateKind::Plausible {
        return Err("nothing to repair: program already passes its suite".to_string());
    }
    let failing = match kind {
        StateKind::Ce => suite.tests.len() as u32, // can't run anything yet
        _ => report.as_ref().unwrap().failing,
    };
    let root = TraceState {
        id: 0,
        parent: None,
        depth: 0,
        kind,
        failing,
        diagnostic,
        location: None,
        patch: None,
        fl_snapshot: None,
    };
    let mut search = Search {
        config,
        model,
        suite,
        states: vec![root],
        sources: vec![SourceProgram::new(program.text())],
        plausible: Vec::new(),
        explored: HashSet::from([program.text().to_string()]),
        halted: false,
    };
    search.expand(0, report.as_ref(), None, None);
    Ok(RepairTrace {
        config: config.clone(),
        root_source: program.text().to_string(),
        states: search.states,
        plausible: search.plausible,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSummary {
    pub traces: usize,
    pub plausible_total: usize,
    pub repaired: usize,
    pub per_depth: BTreeMap<u32, usize>,
    pub paths: BTreeMap<String, usize>,
    pub fl_runs: usize,
    pub fl_reexecutions: usize,
}

/// Aggregates a batch of traces into the evolution-path summary.
pub fn summarize(traces: &[RepairTrace]) -> ReportSummary {
    let mut s = ReportSummary {
        traces: traces.len(),
        plausible_total: 0,
        repaired: 0,
        per_depth: BTreeMap::new(),
        paths: BTreeMap::new(),
        fl_runs: 0,
        fl_reexecutions: 0,
    };
    for t in traces {
        if !t.plausible.is_empty() {
            s.repaired += 1;
        }
        for p in &t.plausible {
            s.plausible_total += 1;
            let depth = t.states[*p.chain.last().unwrap() as usize].depth;
            *s.per_depth.entry(depth).or_insert(0) += 1;
            *s.paths.entry(p.path.clone()).or_insert(0) += 1;
        }
        for st in &t.states {
            if st.fl_snapshot.is_some() {
                s.fl_runs += 1;
                if st.depth > 0 {
                    s.fl_reexecutions += 1;
                }
            }
        }
    }
    s
}
