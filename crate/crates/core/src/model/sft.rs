//! Two-sided vertex shifts of finite type on eventually periodic sequences.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use smale_ktheory::TransitionMatrix;
use std::collections::{BTreeSet, VecDeque};

use super::space::SmaleSpace;
use crate::error::{Error, Result};

/// An eventually periodic bi-infinite sequence in canonical form.
///
/// `x_i = left[i mod |left|]` for `i < start`, `x_i = core[i - start]` inside the core, and
/// `x_i = right[i mod |right|]` from `start + |core|` on. Cycles are primitive and anchored to
/// absolute indices; the left run is as long as possible and the core as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SftPoint {
    left: Vec<u8>,
    core: Vec<u8>,
    right: Vec<u8>,
    start: i64,
}

fn cyc(c: &[u8], i: i64) -> u8 {
    c[i.rem_euclid(c.len() as i64) as usize]
}

fn primitive(c: &[u8]) -> Vec<u8> {
    let p = c.len();
    for d in 1..=p {
        if p.is_multiple_of(d) && (0..p).all(|j| c[j] == c[(j + d) % p]) {
            return c[..d].to_vec();
        }
    }
    c.to_vec()
}

/// `c` re-anchored so that index `pos` reads `c[j]`.
fn anchored(c: &[u8], j: usize, pos: i64) -> Vec<u8> {
    let q = c.len() as i64;
    let k = (j as i64 - pos).rem_euclid(q);
    (0..q).map(|t| c[((t + k) % q) as usize]).collect()
}

impl SftPoint {
    /// Builds the canonical form of the sequence described by the parts.
    pub fn from_parts(left: Vec<u8>, core: Vec<u8>, right: Vec<u8>, start: i64) -> Self {
        assert!(
            !left.is_empty() && !right.is_empty(),
            "tail cycles must be nonempty"
        );
        let raw = SftPoint {
            left: primitive(&left),
            core,
            right: primitive(&right),
            start,
        };
        raw.canonical()
    }

    /// The periodic point `x_i = cycle[i mod |cycle|]`.
    pub fn periodic(cycle: &[u8]) -> Self {
        Self::from_parts(cycle.to_vec(), Vec::new(), cycle.to_vec(), 0)
    }

    pub fn at(&self, i: i64) -> u8 {
        if i < self.start {
            cyc(&self.left, i)
        } else if i < self.end() {
            self.core[(i - self.start) as usize]
        } else {
            cyc(&self.right, i)
        }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.core.len() as i64
    }

    pub fn left_cycle(&self) -> &[u8] {
        &self.left
    }

    pub fn right_cycle(&self) -> &[u8] {
        &self.right
    }

    pub fn core(&self) -> &[u8] {
        &self.core
    }

    pub fn is_periodic(&self) -> bool {
        self.core.is_empty() && self.left == self.right
    }

    fn canonical(self) -> Self {
        let (p, q) = (self.left.len() as i64, self.right.len() as i64);
        let (s, e) = (self.start, self.end());
        // a: first index where the left pattern breaks.
        let mut a = Some(s);
        while let Some(i) = a {
            if i >= e + p + q {
                a = None;
                break;
            }
            if self.at(i) != cyc(&self.left, i) {
                break;
            }
            a = Some(i + 1);
        }
        let Some(a) = a else {
            return SftPoint {
                left: self.left.clone(),
                core: Vec::new(),
                right: self.left,
                start: 0,
            };
        };
        // b: smallest index from which the right pattern holds.
        let mut b = e;
        while b > s - p - q && self.at(b - 1) == cyc(&self.right, b - 1) {
            b -= 1;
        }
        let (start, core) = if a <= b {
            (a, (a..b).map(|i| self.at(i)).collect())
        } else {
            (b, Vec::new())
        };
        SftPoint {
            left: self.left,
            core,
            right: self.right,
            start,
        }
    }

    fn shifted(&self) -> Self {
        // (φx)_i = x_{i+1}
        let rot = |c: &[u8]| -> Vec<u8> { (0..c.len()).map(|j| c[(j + 1) % c.len()]).collect() };
        SftPoint {
            left: rot(&self.left),
            core: self.core.clone(),
            right: rot(&self.right),
            start: self.start - 1,
        }
        .canonical()
    }

    fn unshifted(&self) -> Self {
        let rot = |c: &[u8]| -> Vec<u8> {
            let n = c.len();
            (0..n).map(|j| c[(j + n - 1) % n]).collect()
        };
        SftPoint {
            left: rot(&self.left),
            core: self.core.clone(),
            right: rot(&self.right),
            start: self.start + 1,
        }
        .canonical()
    }

    /// Smallest `|i|` where the sequences differ, `None` if equal.
    pub fn disagreement(&self, other: &Self) -> Option<u64> {
        if self == other {
            return None;
        }
        let hi = self.end().max(other.end()).max(0) + (self.right.len() + other.right.len()) as i64;
        let lo = self.start.min(other.start).min(0) - (self.left.len() + other.left.len()) as i64;
        (0..=hi.max(-lo))
            .find(|&k| self.at(k) != other.at(k) || self.at(-k) != other.at(-k))
            .map(|k| k as u64)
    }

    /// Whether the sequences agree on every index `>= from`.
    pub fn agrees_from(&self, other: &Self, from: i64) -> bool {
        self.right == other.right && {
            let hi = self.end().max(other.end()).max(from) + self.right.len() as i64;
            (from..hi).all(|i| self.at(i) == other.at(i))
        }
    }

    /// Whether the sequences agree on every index `<= to`.
    pub fn agrees_until(&self, other: &Self, to: i64) -> bool {
        self.left == other.left && {
            let lo = self.start.min(other.start).min(to) - self.left.len() as i64;
            (lo..=to).all(|i| self.at(i) == other.at(i))
        }
    }

    fn word(c: &[u8]) -> String {
        if c.iter().all(|&s| s < 10) {
            c.iter().map(|s| char::from(b'0' + s)).collect()
        } else {
            c.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn encode(&self) -> String {
        format!(
            "...({})[{}@{}]({})...",
            Self::word(&self.left),
            Self::word(&self.core),
            self.start,
            Self::word(&self.right)
        )
    }
}

/// Smallest `m` with `2^-m <= r`: the agreement radius matching a distance bound.
pub fn level(r: f64) -> u32 {
    let mut m = 0;
    while m < 62 && (0.5f64).powi(m as i32) > r {
        m += 1;
    }
    m
}

/// Vertex shift of a 0-1 pattern: `i -> j` is allowed when `A_ij >= 1`.
pub struct SftModel {
    matrix: TransitionMatrix,
    label: String,
    cycles: Vec<SftPoint>,
    period_bound: u32,
}

impl SftModel {
    pub fn new(matrix: TransitionMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.size() > 64 {
            return Err(Error::InvalidModel(
                "alphabet larger than 64 symbols".into(),
            ));
        }
        let mut model = SftModel {
            matrix,
            label: label.into(),
            cycles: Vec::new(),
            period_bound: 16,
        };
        let mut len = 1;
        while model.cycles.is_empty() || len <= 2 {
            let pts = model.periodic_points(len)?;
            model.cycles.extend(pts);
            len += 1;
        }
        model.cycles.sort();
        model.cycles.dedup();
        Ok(model)
    }

    pub fn full_shift(n: usize) -> Result<Self> {
        let m = TransitionMatrix::new(vec![vec![1; n]; n])?;
        Self::new(m, format!("full {n}-shift"))
    }

    pub fn golden_mean() -> Result<Self> {
        let m = TransitionMatrix::new(vec![vec![1, 1], vec![1, 0]])?;
        Self::new(m, "golden-mean shift")
    }

    pub fn with_period_bound(mut self, bound: u32) -> Self {
        self.period_bound = bound;
        self
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn symbols(&self) -> usize {
        self.matrix.size()
    }

    pub fn allowed(&self, a: u8, b: u8) -> bool {
        self.matrix.allowed(a as usize, b as usize)
    }

    /// Validated constructor.
    pub fn point(&self, left: &[u8], core: &[u8], right: &[u8], start: i64) -> Result<SftPoint> {
        let n = self.symbols() as u8;
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidPoint("tail cycles must be nonempty".into()));
        }
        if let Some(s) = left.iter().chain(core).chain(right).find(|&&s| s >= n) {
            return Err(Error::InvalidPoint(format!(
                "symbol {s} outside alphabet of size {n}"
            )));
        }
        let x = SftPoint::from_parts(left.to_vec(), core.to_vec(), right.to_vec(), start);
        self.check_admissible(&x)?;
        Ok(x)
    }

    pub fn check_admissible(&self, x: &SftPoint) -> Result<()> {
        let lo = x.start - x.left.len() as i64 - 1;
        let hi = x.end() + x.right.len() as i64 + 1;
        for i in lo..hi {
            if !self.allowed(x.at(i), x.at(i + 1)) {
                return Err(Error::InvalidPoint(format!(
                    "forbidden transition {} -> {} at index {i} in {}",
                    x.at(i),
                    x.at(i + 1),
                    x.encode()
                )));
            }
        }
        Ok(())
    }

    /// All admissible words of length `len` that may follow `from` and precede `to`.
    pub fn words(&self, len: usize, from: Option<u8>, to: Option<u8>) -> Vec<Vec<u8>> {
        let n = self.symbols() as u8;
        let mut out = Vec::new();
        let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == len {
                let ok = match (w.last().copied().or(from), to) {
                    (Some(a), Some(b)) => self.allowed(a, b),
                    _ => true,
                };
                if ok {
                    out.push(w);
                }
                continue;
            }
            for s in (0..n).rev() {
                if w.last()
                    .copied()
                    .or(from)
                    .is_none_or(|a| self.allowed(a, s))
                {
                    let mut v = w.clone();
                    v.push(s);
                    stack.push(v);
                }
            }
        }
        out
    }

    /// Number of paths of `gap` free symbols joining `from` to `to`, as floats per step.
    fn path_counts(&self, to: u8, gap: usize) -> Vec<Vec<f64>> {
        let n = self.symbols();
        // counts[k][s]: ways to fill k more symbols after s and then reach `to`.
        let mut counts = vec![vec![0.0; n]; gap + 1];
        for s in 0..n {
            counts[0][s] = if self.allowed(s as u8, to) { 1.0 } else { 0.0 };
        }
        for k in 1..=gap {
            for s in 0..n {
                counts[k][s] = (0..n)
                    .filter(|&t| self.allowed(s as u8, t as u8))
                    .map(|t| counts[k - 1][t])
                    .sum();
            }
        }
        counts
    }

    /// Up to `limit` distinct fillings of a gap of `gap` symbols between `from` and `to`.
    fn gap_fillings(
        &self,
        from: u8,
        to: u8,
        gap: usize,
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Vec<u8>> {
        let counts = self.path_counts(to, gap);
        let total = counts[gap][from as usize];
        if total == 0.0 {
            return Vec::new();
        }
        if total <= limit as f64 {
            let mut out = Vec::new();
            let mut stack = vec![(from, Vec::<u8>::new())];
            while let Some((last, w)) = stack.pop() {
                if w.len() == gap {
                    out.push(w);
                    continue;
                }
                let rem = gap - w.len() - 1;
                for t in (0..self.symbols() as u8).rev() {
                    if self.allowed(last, t) && counts[rem][t as usize] > 0.0 {
                        let mut v = w.clone();
                        v.push(t);
                        stack.push((t, v));
                    }
                }
            }
            return out;
        }
        let mut seen = BTreeSet::new();
        let mut attempts = 0;
        while seen.len() < limit && attempts < 8 * limit {
            attempts += 1;
            let mut last = from;
            let mut w = Vec::with_capacity(gap);
            for k in (0..gap).rev() {
                let weights: Vec<(u8, f64)> = (0..self.symbols() as u8)
                    .filter(|&t| self.allowed(last, t))
                    .map(|t| (t, counts[k][t as usize]))
                    .filter(|&(_, c)| c > 0.0)
                    .collect();
                let sum: f64 = weights.iter().map(|w| w.1).sum();
                let mut pick = rng.random::<f64>() * sum;
                let mut choice = weights[weights.len() - 1].0;
                for &(t, c) in &weights {
                    if pick < c {
                        choice = t;
                        break;
                    }
                    pick -= c;
                }
                w.push(choice);
                last = choice;
            }
            seen.insert(w);
        }
        seen.into_iter().collect()
    }

    fn shortest_path(&self, from: u8, targets: &[u8], forward: bool) -> Vec<u8> {
        // BFS over symbols; returns the symbols after `from` up to and including a target.
        let n = self.symbols();
        let step = |a: u8, b: u8| {
            if forward {
                self.allowed(a, b)
            } else {
                self.allowed(b, a)
            }
        };
        let mut prev = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for t in 0..n as u8 {
            if step(from, t) {
                seen[t as usize] = true;
                queue.push_back(t);
            }
        }
        while let Some(v) = queue.pop_front() {
            if targets.contains(&v) {
                let mut path = vec![v];
                let mut cur = v;
                while let Some(p) = prev[cur as usize] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return path;
            }
            for t in 0..n as u8 {
                if !seen[t as usize] && step(v, t) {
                    seen[t as usize] = true;
                    prev[t as usize] = Some(v);
                    queue.push_back(t);
                }
            }
        }
        unreachable!("irreducible matrix reaches every symbol")
    }

    /// Completes a fixed window `[start, start + syms.len())` with random admissible
    /// extensions of up to `spread` symbols and periodic tails on the sides that are open.
    fn complete(
        &self,
        mut syms: VecDeque<u8>,
        mut start: i64,
        left: Option<Vec<u8>>,
        right: Option<Vec<u8>>,
        spread: usize,
        rng: &mut ChaCha8Rng,
    ) -> SftPoint {
        let right_cycle = match right {
            Some(c) => c,
            None => {
                for _ in 0..rng.random_range(0..=spread) {
                    let last = *syms.back().expect("nonempty window");
                    let succ: Vec<u8> = (0..self.symbols() as u8)
                        .filter(|&t| self.allowed(last, t))
                        .collect();
                    syms.push_back(*succ.choose(rng).expect("irreducible"));
                }
                let cycle = self.cycles.choose(rng).expect("cycles exist");
                let targets = cycle.right.clone();
                let path = self.shortest_path(*syms.back().unwrap(), &targets, true);
                syms.extend(path.iter().copied());
                let pos = start + syms.len() as i64 - 1;
                let sigma = *syms.back().unwrap();
                let js: Vec<usize> = (0..targets.len())
                    .filter(|&j| targets[j] == sigma)
                    .collect();
                anchored(&targets, *js.choose(rng).unwrap(), pos)
            }
        };
        let left_cycle = match left {
            Some(c) => c,
            None => {
                for _ in 0..rng.random_range(0..=spread) {
                    let first = *syms.front().expect("nonempty window");
                    let pred: Vec<u8> = (0..self.symbols() as u8)
                        .filter(|&t| self.allowed(t, first))
                        .collect();
                    syms.push_front(*pred.choose(rng).expect("irreducible"));
                    start -= 1;
                }
                let cycle = self.cycles.choose(rng).expect("cycles exist");
                let targets = cycle.left.clone();
                let path = self.shortest_path(*syms.front().unwrap(), &targets, false);
                for &s in &path {
                    syms.push_front(s);
                    start -= 1;
                }
                let sigma = *syms.front().unwrap();
                let js: Vec<usize> = (0..targets.len())
                    .filter(|&j| targets[j] == sigma)
                    .collect();
                anchored(&targets, *js.choose(rng).unwrap(), start)
            }
        };
        SftPoint::from_parts(left_cycle, syms.into_iter().collect(), right_cycle, start)
    }

    /// A word of exactly `len` symbols joining `from` to `to`, if one exists.
    fn bridge(&self, from: u8, to: u8, len: usize) -> Option<Vec<u8>> {
        let n = self.symbols() as u8;
        // reach[k][s]: `to` is reachable from s using k free symbols in between.
        let mut reach = vec![(0..n).map(|s| self.allowed(s, to)).collect::<Vec<_>>()];
        for k in 1..=len {
            let row = (0..n)
                .map(|s| (0..n).any(|t| self.allowed(s, t) && reach[k - 1][t as usize]))
                .collect();
            reach.push(row);
        }
        if !reach[len][from as usize] {
            return None;
        }
        let mut word = Vec::with_capacity(len);
        let mut cur = from;
        for k in (0..len).rev() {
            cur = (0..n).find(|&t| self.allowed(cur, t) && reach[k][t as usize])?;
            word.push(cur);
        }
        Some(word)
    }

    /// Shortest deterministic splice of `window` (placed at `start`) between a past from
    /// `q` and a future from `p`.
    fn splice_tails(
        &self,
        window: &[u8],
        start: i64,
        p: &[SftPoint],
        q: &[SftPoint],
    ) -> Option<SftPoint> {
        let max_bridge = 2 * self.symbols() + 2;
        let end = start + window.len() as i64;
        let front = *window.first()?;
        let back = *window.last()?;
        let (qq, lbridge) = (0..=max_bridge).find_map(|len| {
            q.iter().find_map(|qq| {
                let a = qq.at(start - len as i64 - 1);
                self.bridge(a, front, len).map(|w| (qq, w))
            })
        })?;
        let (pp, rbridge) = (0..=max_bridge).find_map(|len| {
            p.iter().find_map(|pp| {
                let b = pp.at(end + len as i64);
                self.bridge(back, b, len).map(|w| (pp, w))
            })
        })?;
        let lo = start - lbridge.len() as i64;
        let mut core = lbridge;
        core.extend_from_slice(window);
        core.extend(rbridge);
        // Pad with one period of each tail so the splice is anchored on the cycles.
        let lo_pad = lo - qq.left.len() as i64;
        let mut full: Vec<u8> = (lo_pad..lo).map(|i| qq.at(i)).collect();
        full.extend(core);
        let hi = lo_pad + full.len() as i64;
        full.extend((hi..hi + pp.right.len() as i64).map(|i| pp.at(i)));
        Some(SftPoint::from_parts(
            qq.left.clone(),
            full,
            pp.right.clone(),
            lo_pad,
        ))
    }

    fn window(x: &SftPoint, lo: i64, hi: i64) -> VecDeque<u8> {
        (lo..=hi).map(|i| x.at(i)).collect()
    }
}

impl SmaleSpace for SftModel {
    type Point = SftPoint;

    fn label(&self) -> String {
        self.label.clone()
    }

    fn phi(&self, x: &SftPoint) -> SftPoint {
        x.shifted()
    }

    fn phi_inv(&self, x: &SftPoint) -> SftPoint {
        x.unshifted()
    }

    fn iterate(&self, x: &SftPoint, n: i64) -> SftPoint {
        let rot = |c: &[u8]| -> Vec<u8> {
            let len = c.len() as i64;
            (0..len)
                .map(|j| c[(j + n).rem_euclid(len) as usize])
                .collect()
        };
        SftPoint {
            left: rot(&x.left),
            core: x.core.clone(),
            right: rot(&x.right),
            start: x.start - n,
        }
        .canonical()
    }

    fn dist(&self, x: &SftPoint, y: &SftPoint) -> f64 {
        match x.disagreement(y) {
            None => 0.0,
            Some(k) => (0.5f64).powi(k as i32),
        }
    }

    fn bracket(&self, x: &SftPoint, y: &SftPoint) -> Option<SftPoint> {
        if x.at(0) != y.at(0) {
            return None;
        }
        let lo = y.start.min(0);
        let hi = x.end().max(1);
        let core = (lo..hi)
            .map(|i| if i <= 0 { y.at(i) } else { x.at(i) })
            .collect();
        Some(
            SftPoint {
                left: y.left.clone(),
                core,
                right: x.right.clone(),
                start: lo,
            }
            .canonical(),
        )
    }

    fn eps_x(&self) -> f64 {
        0.5
    }

    fn lambda(&self) -> f64 {
        2.0
    }

    fn phi_lipschitz(&self) -> f64 {
        2.0
    }

    fn eps_x_prime_candidate(&self) -> f64 {
        0.25
    }

    fn in_local_stable(&self, y: &SftPoint, x: &SftPoint, r: f64) -> bool {
        match level(r) {
            0 => true,
            m => y.agrees_from(x, -(m as i64 - 1)),
        }
    }

    fn in_local_unstable(&self, y: &SftPoint, x: &SftPoint, r: f64) -> bool {
        match level(r) {
            0 => true,
            m => y.agrees_until(x, m as i64 - 1),
        }
    }

    fn stably_equivalent(&self, x: &SftPoint, y: &SftPoint) -> bool {
        x.right == y.right
    }

    fn unstably_equivalent(&self, x: &SftPoint, y: &SftPoint) -> bool {
        x.left == y.left
    }

    fn encode(&self, x: &SftPoint) -> String {
        x.encode()
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> SftPoint {
        let c = self.cycles.choose(rng).expect("cycles exist");
        let phase = rng.random_range(0..c.left.len() as i64);
        let seed = VecDeque::from([c.at(phase)]);
        self.complete(seed, rng.random_range(-3..=3), None, None, 6, rng)
    }

    fn random_near(&self, x: &SftPoint, r: f64, rng: &mut ChaCha8Rng) -> SftPoint {
        match level(r) {
            0 => self.random_point(rng),
            m => {
                let k = m as i64 - 1;
                self.complete(Self::window(x, -k, k), -k, None, None, 6, rng)
            }
        }
    }

    fn random_local_stable(&self, x: &SftPoint, r: f64, rng: &mut ChaCha8Rng) -> SftPoint {
        let k = level(r).max(1) as i64 - 1;
        let hi = x.end().max(-k) + x.right.len() as i64;
        self.complete(
            Self::window(x, -k, hi - 1),
            -k,
            None,
            Some(x.right.clone()),
            6,
            rng,
        )
    }

    fn random_local_unstable(&self, x: &SftPoint, r: f64, rng: &mut ChaCha8Rng) -> SftPoint {
        let k = level(r).max(1) as i64 - 1;
        let lo = x.start.min(k) - x.left.len() as i64;
        self.complete(
            Self::window(x, lo, k),
            lo,
            Some(x.left.clone()),
            None,
            6,
            rng,
        )
    }

    fn periodic_points(&self, period: u32) -> Result<Vec<SftPoint>> {
        if period == 0 || period > self.period_bound {
            return Err(Error::PeriodBound {
                requested: period,
                bound: self.period_bound,
            });
        }
        let words = self.words(period as usize, None, None);
        let pts: BTreeSet<SftPoint> = words
            .into_iter()
            .filter(|w| self.allowed(*w.last().unwrap(), w[0]))
            .map(|w| SftPoint::periodic(&w))
            .collect();
        Ok(pts.into_iter().collect())
    }

    fn homoclinic_points(&self, p: &[SftPoint], q: &[SftPoint], size: u32) -> Vec<SftPoint> {
        let b = size as i64;
        let mut out = BTreeSet::new();
        for qp in q {
            for pp in p {
                let from = qp.at(-b - 1);
                let to = pp.at(b);
                for w in self.words(2 * size as usize, Some(from), Some(to)) {
                    out.insert(SftPoint::from_parts(
                        qp.left.clone(),
                        w,
                        pp.right.clone(),
                        -b,
                    ));
                }
            }
        }
        out.into_iter().collect()
    }

    fn crossings(
        &self,
        s_center: &SftPoint,
        s_radius: f64,
        u_center: &SftPoint,
        u_radius: f64,
        n: i64,
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<SftPoint> {
        let ms = level(s_radius).max(1) as i64;
        let mu = level(u_radius).max(1) as i64;
        let shifted = self.iterate(u_center, n);
        let a0 = -(ms - 1); // fixed by s_center from here on
        let b0 = mu - 1 - n; // fixed by the shifted u_center up to here
        let lo = shifted.start.min(b0 + 1).min(a0) - 1;
        let hi = s_center.end().max(a0).max(b0 + 1) + 1;
        if b0 >= a0 - 1 {
            let ok = (a0..=b0).all(|i| shifted.at(i) == s_center.at(i))
                && (b0 + 1 != a0 || self.allowed(shifted.at(b0), s_center.at(a0)));
            if !ok {
                return Vec::new();
            }
            let core = (lo..hi)
                .map(|i| {
                    if i <= b0 {
                        shifted.at(i)
                    } else {
                        s_center.at(i)
                    }
                })
                .collect();
            return vec![SftPoint::from_parts(
                shifted.left.clone(),
                core,
                s_center.right.clone(),
                lo,
            )];
        }
        let gap = (a0 - b0 - 1) as usize;
        let mut out: Vec<SftPoint> = self
            .gap_fillings(shifted.at(b0), s_center.at(a0), gap, limit, rng)
            .into_iter()
            .map(|w| {
                let core = (lo..hi)
                    .map(|i| {
                        if i <= b0 {
                            shifted.at(i)
                        } else if i < a0 {
                            w[(i - b0 - 1) as usize]
                        } else {
                            s_center.at(i)
                        }
                    })
                    .collect();
                SftPoint::from_parts(shifted.left.clone(), core, s_center.right.clone(), lo)
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn local_stable_homoclinic(
        &self,
        center: &SftPoint,
        r: f64,
        q: &[SftPoint],
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<SftPoint> {
        let mut out = BTreeSet::new();
        for n in 0..48 {
            for qp in q {
                let room = limit.saturating_sub(out.len());
                if room == 0 {
                    return out.into_iter().collect();
                }
                out.extend(self.crossings(center, r, qp, 0.5, n, room, rng));
            }
        }
        out.into_iter().collect()
    }

    fn local_unstable_homoclinic(
        &self,
        center: &SftPoint,
        r: f64,
        p: &[SftPoint],
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<SftPoint> {
        let mut out = BTreeSet::new();
        for n in 0..48 {
            for pp in p {
                let room = limit.saturating_sub(out.len());
                if room == 0 {
                    return out.into_iter().collect();
                }
                // X^s(φ^-n p) ∩ X^u(center) = φ^-n (X^s(p) ∩ φ^n X^u(center)).
                let pts = self.crossings(pp, 0.5, center, r, n, room, rng);
                out.extend(pts.iter().map(|z| self.iterate(z, -n)));
            }
        }
        out.into_iter().collect()
    }

    fn cover_centers(&self, h: f64) -> Vec<SftPoint> {
        let m = level(h);
        if m == 0 {
            return vec![self.cycles[0].clone()];
        }
        let k = m as i64 - 1;
        let base = [self.cycles[0].clone()];
        let mut out: Vec<SftPoint> = self
            .words(2 * k as usize + 1, None, None)
            .into_iter()
            .filter_map(|w| self.splice_tails(&w, -k, &base, &base))
            .collect();
        out.sort();
        out
    }

    fn homoclinic_cover(
        &self,
        targets: &[SftPoint],
        r: f64,
        p: &[SftPoint],
        q: &[SftPoint],
        _size: u32,
        alternatives: usize,
    ) -> Result<Vec<Vec<SftPoint>>> {
        // Smallest m with 2^-m < r; agreeing on |i| < m gives distance at most 2^-m.
        let mut m = level(r).max(1);
        if 0.5f64.powi(m as i32) >= r {
            m += 1;
        }
        let k = m as i64 - 1;
        targets
            .iter()
            .map(|t| {
                let w: Vec<u8> = (-k..=k).map(|i| t.at(i)).collect();
                // Alternatives extend the window to the right before splicing.
                let mut picks: Vec<SftPoint> = Vec::new();
                'outer: for extra in 0..=4usize {
                    for ext in self.words(extra, w.last().copied(), None) {
                        let mut word = w.clone();
                        word.extend(ext);
                        if let Some(z) = self.splice_tails(&word, -k, p, q) {
                            if !picks.contains(&z) {
                                picks.push(z);
                            }
                        }
                        if picks.len() >= alternatives.max(1) {
                            break 'outer;
                        }
                    }
                }
                if picks.is_empty() {
                    return Err(Error::CoverInfeasible {
                        center: t.encode(),
                        radius: r,
                    });
                }
                Ok(picks)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn two_shift() -> SftModel {
        SftModel::full_shift(2).unwrap()
    }

    #[test]
    fn canonical_forms_are_unique() {
        // The same sequence written three ways.
        let a = SftPoint::from_parts(vec![1], vec![1, 1, 0, 0], vec![0], -3);
        let b = SftPoint::from_parts(vec![1, 1], vec![0], vec![0, 0, 0], -1);
        let c = SftPoint::from_parts(vec![1], vec![], vec![0], -1);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.core(), &[] as &[u8]);
        let per = SftPoint::from_parts(vec![0, 1], vec![0, 1, 0, 1], vec![0, 1], 4);
        assert!(per.is_periodic());
        assert_eq!(per, SftPoint::periodic(&[0, 1]));
    }

    #[test]
    fn splice_bracket_example() {
        let m = two_shift();
        // x = ...000.0111...: zeros up to index 0, ones from index 1.
        let x = SftPoint::from_parts(vec![0], vec![], vec![1], 1);
        // y = ...111.0000...: ones up to index -1, zeros from index 0.
        let y = SftPoint::from_parts(vec![1], vec![], vec![0], 0);
        let z = m.bracket(&x, &y).unwrap();
        for i in -5..=5 {
            let expected = if i < 0 {
                1
            } else if i == 0 {
                0
            } else {
                1
            };
            assert_eq!(z.at(i), expected, "index {i}");
        }
        assert_eq!(m.bracket(&x, &x).unwrap(), x);
        let w = SftPoint::periodic(&[1]);
        assert!(m.bracket(&x, &w).is_none());
    }

    #[test]
    fn distance_by_direct_scan() {
        let m = two_shift();
        let x = SftPoint::periodic(&[0]);
        // Agrees with x exactly on |i| <= 3.
        let y = SftPoint::from_parts(vec![0], vec![0, 0, 0, 0, 0, 0, 0, 1], vec![0], -3);
        assert_eq!(m.dist(&x, &y), 1.0 / 16.0);
        assert_eq!(m.dist(&x, &x), 0.0);
    }

    #[test]
    fn shift_inverse_and_iterate_agree() {
        let m = SftModel::golden_mean().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = m.random_point(&mut rng);
            m.check_admissible(&x).unwrap();
            assert_eq!(m.phi_inv(&m.phi(&x)), x);
            assert_eq!(m.iterate(&x, 3), m.phi(&m.phi(&m.phi(&x))));
            assert_eq!(m.iterate(&m.iterate(&x, 7), -7), x);
            assert_eq!(m.phi(&x).at(4), x.at(5));
        }
    }

    #[test]
    fn random_local_sets_are_members() {
        let m = SftModel::golden_mean().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let x = m.random_point(&mut rng);
            let s = m.random_local_stable(&x, 0.125, &mut rng);
            let u = m.random_local_unstable(&x, 0.125, &mut rng);
            let near = m.random_near(&x, 0.125, &mut rng);
            assert!(m.in_local_stable(&s, &x, 0.125));
            assert!(m.in_local_unstable(&u, &x, 0.125));
            assert!(m.dist(&near, &x) <= 0.125);
            for p in [&s, &u, &near] {
                m.check_admissible(p).unwrap();
            }
        }
    }

    #[test]
    fn periodic_counts_match_traces() {
        let m = SftModel::golden_mean().unwrap();
        // trace of the Fibonacci matrix powers: 1, 3, 4, 7, 11, 18
        for (n, t) in [(1, 1), (2, 3), (3, 4), (4, 7), (5, 11), (6, 18)] {
            assert_eq!(m.periodic_points(n).unwrap().len(), t, "period {n}");
        }
        assert_eq!(two_shift().periodic_points(1).unwrap().len(), 2);
        assert!(matches!(
            m.periodic_points(40),
            Err(Error::PeriodBound { .. })
        ));
    }

    #[test]
    fn crossings_lie_in_both_sets() {
        let m = two_shift();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = SftPoint::periodic(&[0]);
        let q = SftPoint::periodic(&[1]);
        let c = SftPoint::from_parts(vec![1], vec![0, 1], vec![0], -1);
        for n in 0..10 {
            let pts = m.crossings(&c, 0.25, &q, 0.25, n, 50, &mut rng);
            for z in &pts {
                assert!(m.in_local_stable(z, &c, 0.25));
                let back = m.iterate(z, -n);
                assert!(
                    m.in_local_unstable(&back, &q, 0.25),
                    "n={n} z={}",
                    z.encode()
                );
            }
            let expected = if n < 3 { 0 } else { 1usize << (n - 3) };
            assert_eq!(pts.len(), expected.min(50), "n={n}");
        }
        let hs = m.local_stable_homoclinic(&c, 0.25, std::slice::from_ref(&q), 20, &mut rng);
        assert_eq!(hs.len(), 20);
        assert!(hs
            .iter()
            .all(|z| m.in_local_stable(z, &c, 0.25) && m.unstably_equivalent(z, &q)));
        let hu = m.local_unstable_homoclinic(&c, 0.25, std::slice::from_ref(&p), 20, &mut rng);
        assert!(hu
            .iter()
            .all(|z| m.in_local_unstable(z, &c, 0.25) && m.stably_equivalent(z, &p)));
    }
}
