use std::time::Instant;

use crate::formula::{Cnf, Lit, Var};

use super::SatError;

/// Outcome of a satisfiability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// A total assignment satisfying the clauses and the assumptions.
    Sat(Model),
    /// Unsatisfiable; carries the assumptions involved in the final conflict
    /// (empty when the clauses alone are contradictory).
    Unsat(Vec<Lit>),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, v: Var) -> bool {
        self.values
            .get(v.index() as usize)
            .copied()
            .unwrap_or(false)
    }

    pub fn lit(&self, l: Lit) -> bool {
        l.eval(self.value(l.var()))
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len().saturating_sub(1) as u32
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
}

enum Search {
    Sat,
    Unsat,
    Restart,
}

/// Incremental CDCL solver: two watched literals, first-UIP learning with
/// local minimization, VSIDS branching with phase saving, Luby restarts, and
/// assumption literals with final-conflict analysis.
///
/// Branching is deterministic; equal inputs give equal models.
#[derive(Debug, Clone)]
pub struct Solver {
    num_vars: usize,
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    deadline: Option<Instant>,
    final_core: Option<Vec<Lit>>,
    stats: Stats,
}

const VAR_DECAY: f64 = 0.95;
const CLA_DECAY: f64 = 0.999;
const RESTART_BASE: u64 = 100;

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            watches: vec![Vec::new(), Vec::new()],
            assigns: vec![None],
            level: vec![0],
            reason: vec![None],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            phase: vec![false],
            seen: vec![false],
            ok: true,
            num_learnts: 0,
            max_learnts: 2000.0,
            deadline: None,
            final_core: None,
            stats: Stats::default(),
        }
    }

    pub fn from_cnf(cnf: &Cnf) -> Solver {
        let mut s = Solver::new();
        s.reserve_vars(cnf.num_vars());
        for c in cnf.clauses() {
            s.add_clause(c.lits());
        }
        s
    }

    /// Wall-clock limit for subsequent `solve` calls.
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars as u32
    }

    pub fn reserve_vars(&mut self, n: u32) {
        let n = n as usize;
        while self.num_vars < n {
            self.num_vars += 1;
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.assigns.push(None);
            self.level.push(0);
            self.reason.push(None);
            self.activity.push(0.0);
            self.phase.push(false);
            self.seen.push(false);
            self.heap.insert(self.num_vars as u32, &self.activity);
        }
    }

    pub fn new_var(&mut self) -> Var {
        self.reserve_vars(self.num_vars as u32 + 1);
        Var::new(self.num_vars as u32)
    }

    /// Adds a permanent clause. Returns `false` once the clause set is known
    /// to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert!(self.trail_lim.is_empty());
        if let Some(m) = lits.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(m);
        }
        let mut ps: Vec<Lit> = lits.to_vec();
        ps.sort_unstable();
        ps.dedup();
        let mut out = Vec::with_capacity(ps.len());
        for (i, &l) in ps.iter().enumerate() {
            if i + 1 < ps.len() && ps[i + 1] == !l {
                return true;
            }
            match self.value(l) {
                Some(true) => return true,
                Some(false) => {}
                None => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], None);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.attach(out, false);
                true
            }
        }
    }

    /// Decides satisfiability under `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SatResult, SatError> {
        if !self.ok {
            return Ok(SatResult::Unsat(Vec::new()));
        }
        if let Some(m) = assumptions.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(m);
        }
        let mut restarts = 0u64;
        loop {
            let limit = luby(restarts) * RESTART_BASE;
            match self.search(limit, assumptions) {
                Ok(Search::Sat) => {
                    let values = self.assigns.iter().map(|a| a.unwrap_or(false)).collect();
                    self.cancel_until(0);
                    return Ok(SatResult::Sat(Model { values }));
                }
                Ok(Search::Unsat) => {
                    let core = self.final_core.take().unwrap_or_default();
                    self.cancel_until(0);
                    return Ok(SatResult::Unsat(core));
                }
                Ok(Search::Restart) => {
                    restarts += 1;
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                    if self.num_learnts as f64 >= self.max_learnts {
                        self.reduce_db();
                    }
                }
                Err(e) => {
                    self.cancel_until(0);
                    return Err(e);
                }
            }
        }
    }

    fn search(&mut self, conflict_limit: u64, assumptions: &[Lit]) -> Result<Search, SatError> {
        let mut conflicts = 0u64;
        let mut ticks = 0u32;
        self.final_core_reset();
        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(128) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return Err(SatError::Timeout);
                    }
                }
            }
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.trail_lim.is_empty() {
                    self.ok = false;
                    return Ok(Search::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cr = self.attach(learnt, true);
                    self.bump_clause(cr);
                    self.enqueue(first, Some(cr));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLA_DECAY;
                continue;
            }
            if conflicts >= conflict_limit {
                return Ok(Search::Restart);
            }
            let mut next = None;
            while self.trail_lim.len() < assumptions.len() {
                let p = assumptions[self.trail_lim.len()];
                match self.value(p) {
                    Some(true) => self.trail_lim.push(self.trail.len()),
                    Some(false) => {
                        self.analyze_final(p);
                        return Ok(Search::Unsat);
                    }
                    None => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => {
                        self.stats.decisions += 1;
                        p
                    }
                    None => return Ok(Search::Sat),
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    fn value(&self, l: Lit) -> Option<bool> {
        self.assigns[l.var().index() as usize].map(|b| l.eval(b))
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var().index() as usize;
        debug_assert!(self.assigns[v].is_none());
        self.assigns[v] = Some(l.is_positive());
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let cr = self.clauses.len();
        self.watches[(!lits[0]).code()].push(Watcher {
            cref: cr,
            blocker: lits[1],
        });
        self.watches[(!lits[1]).code()].push(Watcher {
            cref: cr,
            blocker: lits[0],
        });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(ClauseData {
            lits,
            learnt,
            activity: 0.0,
        });
        cr
    }

    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Some(true) {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cr = w.cref;
                let lits = &mut self.clauses[cr].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let first_val = self.assigns[first.var().index() as usize].map(|b| first.eval(b));
                if first != w.blocker && first_val == Some(true) {
                    ws[j] = Watcher {
                        cref: cr,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    let lk = lits[k];
                    let vk = self.assigns[lk.var().index() as usize].map(|b| lk.eval(b));
                    if vk != Some(false) {
                        lits.swap(1, k);
                        self.watches[(!lk).code()].push(Watcher {
                            cref: cr,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: cr,
                    blocker: first,
                };
                j += 1;
                if first_val == Some(false) {
                    conflict = Some(cr);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(cr));
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, usize) {
        let current = self.trail_lim.len() as u32;
        let mut learnt: Vec<Lit> = vec![Lit::new(Var::new(1), true)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[confl].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl].lits.len() {
                let q = self.clauses[confl].lits[k];
                let v = q.var().index() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = lit.var().index() as usize;
            self.seen[v] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[v].expect("implied literal without reason");
        }
        learnt[0] = !p.unwrap();

        // Drop literals implied by the rest of the clause.
        let original = learnt.clone();
        let mut kept = vec![learnt[0]];
        for &q in &learnt[1..] {
            let v = q.var().index() as usize;
            let redundant = match self.reason[v] {
                None => false,
                Some(r) => self.clauses[r].lits[1..].iter().all(|x| {
                    let xv = x.var().index() as usize;
                    self.seen[xv] || self.level[xv] == 0
                }),
            };
            if !redundant {
                kept.push(q);
            }
        }
        for q in &original[1..] {
            self.seen[q.var().index() as usize] = false;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index() as usize]
                    > self.level[learnt[max_i].var().index() as usize]
                {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index() as usize] as usize
        };
        (learnt, bt)
    }

    /// Collects the assumptions responsible for `p` being false.
    fn analyze_final(&mut self, p: Lit) {
        let mut core = vec![p];
        if !self.trail_lim.is_empty() {
            let pv = p.var().index() as usize;
            self.seen[pv] = true;
            for i in (self.trail_lim[0]..self.trail.len()).rev() {
                let x = self.trail[i].var().index() as usize;
                if !self.seen[x] {
                    continue;
                }
                match self.reason[x] {
                    None => {
                        if self.trail[i] != p {
                            core.push(self.trail[i]);
                        }
                    }
                    Some(r) => {
                        for k in 1..self.clauses[r].lits.len() {
                            let q = self.clauses[r].lits[k].var().index() as usize;
                            if self.level[q] > 0 {
                                self.seen[q] = true;
                            }
                        }
                    }
                }
                self.seen[x] = false;
            }
            self.seen[pv] = false;
        }
        self.final_core = Some(core);
    }

    fn final_core_reset(&mut self) {
        self.final_core = None;
    }

    fn cancel_until(&mut self, level: usize) {
        if self.trail_lim.len() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index() as usize;
            self.phase[v] = l.is_positive();
            self.assigns[v] = None;
            self.reason[v] = None;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = self.trail.len();
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize].is_none() {
                return Some(Lit::new(Var::new(v), self.phase[v as usize]));
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cr: usize) {
        self.clauses[cr].activity += self.cla_inc;
        if self.clauses[cr].activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// Halves the learnt clause database. Only called at decision level 0,
    /// where no reason clause is ever consulted again.
    fn reduce_db(&mut self) {
        debug_assert!(self.trail_lim.is_empty());
        let mut learnt: Vec<(f64, usize)> = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.learnt && c.lits.len() > 2)
            .map(|(i, c)| (c.activity, i))
            .collect();
        learnt.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut drop = vec![false; self.clauses.len()];
        for &(_, i) in &learnt[..learnt.len() / 2] {
            drop[i] = true;
        }
        let old = std::mem::take(&mut self.clauses);
        self.clauses = old
            .into_iter()
            .zip(drop)
            .filter_map(|(c, d)| (!d).then_some(c))
            .collect();
        self.num_learnts = self.clauses.iter().filter(|c| c.learnt).count();
        for r in self.reason.iter_mut() {
            *r = None;
        }
        for w in self.watches.iter_mut() {
            w.clear();
        }
        for (cr, c) in self.clauses.iter().enumerate() {
            self.watches[(!c.lits[0]).code()].push(Watcher {
                cref: cr,
                blocker: c.lits[1],
            });
            self.watches[(!c.lits[1]).code()].push(Watcher {
                cref: cr,
                blocker: c.lits[0],
            });
        }
        self.max_learnts *= 1.1;
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

/// Max-heap of variables keyed by activity; ties go to the lower index.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn better(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        let vi = v as usize;
        if self.pos.len() <= vi {
            self.pos.resize(vi + 1, None);
        }
        if self.pos[vi].is_some() {
            return;
        }
        self.heap.push(v);
        self.pos[vi] = Some(self.heap.len() - 1);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if let Some(Some(i)) = self.pos.get(v as usize) {
            self.up(*i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.pos[self.heap[0] as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if !Self::better(self.heap[child], v, act) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}

/// One-shot decision: `hard` under `assumptions`.
pub fn solve(hard: &Cnf, assumptions: &[Lit]) -> Result<SatResult, SatError> {
    Solver::from_cnf(hard).solve(assumptions)
}
