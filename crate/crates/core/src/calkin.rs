//! Symbolic elements of the quotient algebra and their level-wise
//! evaluation on the Fock space.
//!
//! Elements are complex combinations of words in `u_e`, `u_e*`, `z` and
//! `p_v`. Normalisation applies only path-combinatorial relations; `z` is
//! kept as a free letter and its relations are seen in evaluation. Norms in
//! the quotient are estimated as the largest block norm over a window of
//! high levels, with explicit stabilisation checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::RwLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Graph, Path, PathTable};
use crate::linalg::{op_norm, re, BlockMat, C64, ONE, ZERO};
use crate::weights::WeightSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    U(usize),
    Ustar(usize),
    Z,
    P(usize),
}

pub type Word = Vec<Letter>;

/// Finite linear combination of normalised words. The empty word is the unit.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CalkinElement {
    terms: BTreeMap<Word, C64>,
}

/// Rewrites adjacent letter pairs until no rule applies. `None` means zero.
pub fn normalize_word(g: &Graph, word: &[Letter]) -> Option<Word> {
    use Letter::*;
    let mut out: Word = Vec::with_capacity(word.len());
    for &l in word {
        out.push(l);
        while out.len() >= 2 {
            let n = out.len();
            let (a, b) = (out[n - 2], out[n - 1]);
            let merged = match (a, b) {
                (Ustar(e), U(f)) => {
                    if e != f {
                        return None;
                    }
                    Some(P(g.s(e)))
                }
                (P(v), U(e)) => (g.r(e) == v).then_some(U(e)).map(Some)?,
                (U(e), P(v)) => (g.s(e) == v).then_some(U(e)).map(Some)?,
                (Ustar(e), P(v)) => (g.r(e) == v).then_some(Ustar(e)).map(Some)?,
                (P(v), Ustar(e)) => (g.s(e) == v).then_some(Ustar(e)).map(Some)?,
                (P(v), P(w)) => (v == w).then_some(P(v)).map(Some)?,
                (U(e), U(f)) if g.s(e) != g.r(f) => return None,
                (Ustar(f), Ustar(e)) if g.s(e) != g.r(f) => return None,
                _ => None,
            };
            match merged {
                Some(l) => {
                    out.truncate(n - 2);
                    out.push(l);
                }
                None => break,
            }
        }
    }
    Some(out)
}

pub fn word_degree(word: &[Letter]) -> isize {
    word.iter()
        .map(|l| match l {
            Letter::U(_) => 1,
            Letter::Ustar(_) => -1,
            _ => 0,
        })
        .sum()
}

/// Number of levels a word descends below its input level when applied.
pub fn word_depth(word: &[Letter]) -> usize {
    let mut cur: isize = 0;
    let mut worst: isize = 0;
    for l in word.iter().rev() {
        match l {
            Letter::U(_) => cur += 1,
            Letter::Ustar(_) => {
                cur -= 1;
                worst = worst.min(cur);
            }
            _ => {}
        }
    }
    (-worst) as usize
}

fn adjoint_word(word: &[Letter]) -> Word {
    word.iter()
        .rev()
        .map(|l| match *l {
            Letter::U(e) => Letter::Ustar(e),
            Letter::Ustar(e) => Letter::U(e),
            other => other,
        })
        .collect()
}

impl CalkinElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(c: C64) -> Self {
        let mut x = Self::zero();
        x.push(Vec::new(), c);
        x
    }

    /// Single word with unit coefficient (normalised).
    pub fn word(g: &Graph, word: &[Letter]) -> Self {
        let mut x = Self::zero();
        if let Some(w) = normalize_word(g, word) {
            x.push(w, ONE);
        }
        x
    }

    pub fn u(g: &Graph, e: usize) -> Self {
        Self::word(g, &[Letter::U(e)])
    }

    pub fn u_star(g: &Graph, e: usize) -> Self {
        Self::word(g, &[Letter::Ustar(e)])
    }

    pub fn z() -> Self {
        let mut x = Self::zero();
        x.push(vec![Letter::Z], ONE);
        x
    }

    pub fn z_pow(l: usize) -> Self {
        let mut x = Self::zero();
        x.push(vec![Letter::Z; l], ONE);
        x
    }

    pub fn p(v: usize) -> Self {
        let mut x = Self::zero();
        x.push(vec![Letter::P(v)], ONE);
        x
    }

    /// `u_α`; for a vertex this is `p_v`.
    pub fn u_path(path: &Path) -> Self {
        if path.is_empty() {
            return Self::p(path.src);
        }
        let mut x = Self::zero();
        x.push(path.edges.iter().map(|&e| Letter::U(e)).collect(), ONE);
        x
    }

    pub fn u_path_star(path: &Path) -> Self {
        Self::u_path(path).adjoint()
    }

    fn push(&mut self, w: Word, c: C64) {
        if c == ZERO {
            return;
        }
        let cancelled = {
            let entry = self.terms.entry(w.clone()).or_insert(ZERO);
            *entry += c;
            *entry == ZERO
        };
        if cancelled {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut x = self.clone();
        for (w, c) in &other.terms {
            x.push(w.clone(), *c);
        }
        x
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut x = Self::zero();
        for (w, c) in &self.terms {
            x.push(w.clone(), c * s);
        }
        x
    }

    pub fn mul(&self, g: &Graph, other: &Self) -> Self {
        let mut x = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                if let Some(w) = normalize_word(g, &w) {
                    x.push(w, ca * cb);
                }
            }
        }
        x
    }

    /// Product of a list of factors.
    pub fn product(g: &Graph, factors: &[&CalkinElement]) -> Self {
        factors
            .iter()
            .fold(Self::one(), |acc, f| acc.mul(g, f))
    }

    pub fn adjoint(&self) -> Self {
        let mut x = Self::zero();
        for (w, c) in &self.terms {
            x.push(adjoint_word(w), c.conj());
        }
        x
    }

    /// Grading degree if homogeneous (`Some(0)` for zero).
    pub fn degree(&self) -> Option<isize> {
        let mut degs = self.terms.keys().map(|w| word_degree(w));
        let first = degs.next().unwrap_or(0);
        degs.all(|d| d == first).then_some(first)
    }

    pub fn depth(&self) -> usize {
        self.terms.keys().map(|w| word_depth(w)).max().unwrap_or(0)
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn format(&self, g: &Graph) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (w, c)) in self.terms.iter().enumerate() {
            let mut c = *c;
            if n > 0 {
                if c.im == 0.0 && c.re < 0.0 {
                    s.push_str(" - ");
                    c = -c;
                } else {
                    s.push_str(" + ");
                }
            }
            let coeff = if c.im == 0.0 {
                format!("{}", c.re)
            } else {
                format!("({}{:+}i)", c.re, c.im)
            };
            if w.is_empty() {
                s.push_str(&coeff);
                continue;
            }
            if c != ONE {
                let _ = write!(s, "{coeff}*");
            }
            let letters: Vec<String> = w
                .iter()
                .map(|l| match *l {
                    Letter::U(e) => format!("u({})", g.edge_name(e)),
                    Letter::Ustar(e) => format!("u*({})", g.edge_name(e)),
                    Letter::Z => "z".into(),
                    Letter::P(v) => format!("p({})", g.vertex_name(v)),
                })
                .collect();
            s.push_str(&letters.join("."));
        }
        s
    }

    /// Parses expressions such as `u(e1).z^2.u*(e3) - 2*p(v1) + (0+1i)*z`.
    /// Inside `u(...)`/`u*(...)` a walk-order path `e1.e2` is accepted.
    pub fn parse(g: &Graph, text: &str) -> Result<Self> {
        Parser {
            g,
            s: text.as_bytes(),
            pos: 0,
        }
        .expr()
    }
}

struct Parser<'a> {
    g: &'a Graph,
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "element at offset {}: {msg} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<CalkinElement> {
        let mut acc = CalkinElement::zero();
        let mut sign = if self.eat(b'-') { -1.0 } else { 1.0 };
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(re(sign)));
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                None => return Ok(acc),
                Some(_) => return Err(self.err("unexpected character")),
            }
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.s[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("bad number"))
    }

    fn complex(&mut self) -> Result<C64> {
        // `(a+bi)`, `(a-bi)`, `(bi)` or `(a)`
        self.expect(b'(')?;
        let mut z = ZERO;
        let mut sign = if self.eat(b'-') { -1.0 } else { 1.0 };
        loop {
            let x = if self.peek() == Some(b'i') {
                1.0
            } else {
                self.number()?
            };
            if self.eat(b'i') {
                z.im += sign * x;
            } else {
                z.re += sign * x;
            }
            if self.eat(b'+') {
                sign = 1.0;
            } else if self.eat(b'-') {
                sign = -1.0;
            } else {
                break;
            }
        }
        self.expect(b')')?;
        Ok(z)
    }

    fn term(&mut self) -> Result<CalkinElement> {
        let mut coeff = if self.eat(b'-') { -ONE } else { ONE };
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                coeff *= re(self.number()?);
                if !self.eat(b'*') {
                    return Ok(CalkinElement::scalar(coeff));
                }
            }
            Some(b'(') => {
                coeff *= self.complex()?;
                if !self.eat(b'*') {
                    return Ok(CalkinElement::scalar(coeff));
                }
            }
            _ => {}
        }
        let mut acc = self.factor()?;
        while self.eat(b'.') {
            let f = self.factor()?;
            acc = acc.mul(self.g, &f);
        }
        Ok(acc.scale(coeff))
    }

    fn name(&mut self) -> Result<String> {
        self.expect(b'(')?;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != b')' {
            self.pos += 1;
        }
        let name = String::from_utf8_lossy(&self.s[start..self.pos]).trim().to_string();
        self.expect(b')')?;
        Ok(name)
    }

    fn factor(&mut self) -> Result<CalkinElement> {
        match self.peek() {
            Some(b'u') => {
                self.pos += 1;
                let star = self.eat(b'*');
                let name = self.name()?;
                let path = self.g.parse_walk(&name)?;
                let x = CalkinElement::u_path(&path);
                Ok(if star { x.adjoint() } else { x })
            }
            Some(b'p') => {
                self.pos += 1;
                let name = self.name()?;
                let v = self
                    .g
                    .vertex_id(&name)
                    .ok_or_else(|| Error::Parse(format!("unknown vertex {name:?}")))?;
                Ok(CalkinElement::p(v))
            }
            Some(b'z') => {
                self.pos += 1;
                let mut l = 1;
                if self.eat(b'^') {
                    let start = self.pos;
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    l = std::str::from_utf8(&self.s[start..self.pos])
                        .unwrap()
                        .parse()
                        .map_err(|_| self.err("bad exponent"))?;
                }
                Ok(CalkinElement::z_pow(l))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(CalkinElement::one())
            }
            _ => Err(self.err("expected u(..), u*(..), p(..), z or 1")),
        }
    }
}

/// Window placement: blocks at levels `base..base + width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Window {
    pub base: usize,
    pub width: usize,
}

impl Window {
    pub fn levels(&self) -> std::ops::Range<usize> {
        self.base..self.base + self.width
    }

    pub fn shifted(&self, by: usize) -> Window {
        Window {
            base: self.base + by,
            width: self.width,
        }
    }

    pub fn widened(&self, by: usize) -> Window {
        Window {
            base: self.base,
            width: self.width + by,
        }
    }
}

/// Numerical settings of the window protocol.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct WindowConfig {
    pub norm_tol: f64,
    pub rank_tol: f64,
    pub max_widenings: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            norm_tol: 1e-9,
            rank_tol: 1e-8,
            max_widenings: 8,
        }
    }
}

/// Norm estimate with its stabilisation certificate.
#[derive(Clone, Debug, serde::Serialize)]
pub struct NormCertificate {
    pub norm: f64,
    pub window: Window,
    pub widened_norm: f64,
    pub shifted_norm: f64,
}

/// Evaluates elements on the Fock space of a graph with a weight sequence.
#[derive(Debug)]
pub struct Evaluator {
    pub graph: Graph,
    pub weights: WeightSpec,
    table: RwLock<PathTable>,
}

impl Clone for Evaluator {
    fn clone(&self) -> Self {
        Evaluator {
            graph: self.graph.clone(),
            weights: self.weights.clone(),
            table: RwLock::new(self.table.read().unwrap().clone()),
        }
    }
}

impl Evaluator {
    pub fn new(g: &Graph, w: &WeightSpec) -> Self {
        Evaluator {
            graph: g.clone(),
            weights: w.clone(),
            table: RwLock::new(PathTable::new(g)),
        }
    }

    /// Runs `f` with path tables covering level `k`.
    pub fn with_table<T>(&self, k: usize, f: impl FnOnce(&PathTable) -> T) -> T {
        {
            let t = self.table.read().unwrap();
            if t.max_level() >= k {
                return f(&t);
            }
        }
        self.table.write().unwrap().ensure(k);
        f(&self.table.read().unwrap())
    }

    pub fn count(&self, k: usize) -> usize {
        self.with_table(k, |t| t.count(k))
    }

    fn apply_word(&self, t: &PathTable, word: &[Letter], k: usize, i: usize) -> Vec<(usize, C64)> {
        let diag = self.weights.is_diagonal();
        let mut state: Vec<(usize, C64)> = vec![(i, ONE)];
        let mut lvl = k;
        for l in word.iter().rev() {
            match *l {
                Letter::U(e) => {
                    state = state
                        .into_iter()
                        .filter_map(|(j, c)| t.prepend(e, lvl, j).map(|n| (n, c)))
                        .collect();
                    lvl += 1;
                }
                Letter::Ustar(e) => {
                    if lvl == 0 {
                        return Vec::new();
                    }
                    state = state
                        .into_iter()
                        .filter(|(j, _)| t.head(lvl, *j) == e)
                        .map(|(j, c)| (t.tail(lvl, j), c))
                        .collect();
                    lvl -= 1;
                }
                Letter::P(v) => state.retain(|(j, _)| t.rng(lvl, *j) == v),
                Letter::Z => {
                    if diag {
                        for (j, c) in state.iter_mut() {
                            *c *= self.weights.diag_entry(t, lvl, *j);
                        }
                    } else {
                        let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
                        for (j, c) in state {
                            for (r, v) in self.weights.column(t, lvl, j) {
                                *acc.entry(r).or_insert(ZERO) += c * v;
                            }
                        }
                        state = acc.into_iter().filter(|(_, c)| *c != ZERO).collect();
                    }
                }
            }
            if state.is_empty() {
                return state;
            }
        }
        state
    }

    /// Compression `Q_{k+d} x Q_k` of the terms of degree `d`.
    pub fn eval_graded(&self, x: &CalkinElement, k: usize, d: isize) -> DMatrix<C64> {
        let top = k + x.max_word_len();
        self.with_table(top, |t| {
            let rows = if k as isize + d < 0 {
                0
            } else {
                t.count((k as isize + d) as usize)
            };
            let cols = t.count(k);
            let mut m = DMatrix::zeros(rows, cols);
            for (w, c) in x.terms() {
                if word_degree(w) != d {
                    continue;
                }
                for i in 0..cols {
                    for (r, v) in self.apply_word(t, w, k, i) {
                        m[(r, i)] += c * v;
                    }
                }
            }
            m
        })
    }

    /// Block of a homogeneous element at input level `k`.
    pub fn eval_block(&self, x: &CalkinElement, k: usize) -> Result<DMatrix<C64>> {
        let d = x
            .degree()
            .ok_or_else(|| Error::Precondition("element is not homogeneous".into()))?;
        Ok(self.eval_graded(x, k, d))
    }

    /// Blocks of a homogeneous element over a window.
    pub fn window(&self, x: &CalkinElement, win: Window) -> Result<BlockMat> {
        let d = x
            .degree()
            .ok_or_else(|| Error::Precondition("element is not homogeneous".into()))?;
        Ok(BlockMat::new(
            win.levels().map(|k| self.eval_graded(x, k, d)).collect(),
        ))
    }

    /// Identity blocks over a window.
    pub fn window_identity(&self, win: Window) -> BlockMat {
        let sizes: Vec<usize> = win.levels().map(|k| self.count(k)).collect();
        BlockMat::identity(&sizes)
    }

    fn max_block_norm(&self, x: &CalkinElement, win: Window) -> Result<f64> {
        Ok(self.window(x, win)?.op_norm())
    }

    /// Quotient-norm estimate: the largest block norm over a window whose
    /// width is grown in steps of `p` until the maximum is unchanged by one
    /// more period and by shifting the base up one period.
    pub fn calkin_norm(
        &self,
        x: &CalkinElement,
        start: Window,
        cfg: &WindowConfig,
    ) -> Result<NormCertificate> {
        let p = self.weights.p;
        let base = start.base.max(x.depth() + self.weights.n);
        let mut win = Window {
            base,
            width: start.width.max(1),
        };
        for _ in 0..=cfg.max_widenings {
            let norm = self.max_block_norm(x, win)?;
            let widened = self.max_block_norm(x, win.widened(p))?;
            let shifted = self.max_block_norm(x, win.shifted(p))?;
            let scale = norm.max(1.0);
            if (widened - norm).abs() <= cfg.norm_tol * scale
                && (shifted - norm).abs() <= cfg.norm_tol * scale
            {
                return Ok(NormCertificate {
                    norm,
                    window: win,
                    widened_norm: widened,
                    shifted_norm: shifted,
                });
            }
            win = win.widened(p);
        }
        Err(Error::WindowUnstable(format!(
            "block norms of {} did not stabilise up to width {}",
            x.format(&self.graph),
            win.width
        )))
    }

    pub fn calkin_equal(
        &self,
        x: &CalkinElement,
        y: &CalkinElement,
        start: Window,
        cfg: &WindowConfig,
    ) -> Result<bool> {
        Ok(self.calkin_norm(&x.sub(y), start, cfg)?.norm <= cfg.norm_tol)
    }

    /// Default window base for a tower with `stages` stages.
    pub fn default_base(&self, stages: usize) -> usize {
        self.weights.n + (stages + 3) * self.weights.p
    }

    /// Maximum absolute deviation of a block from being zero.
    pub fn block_norm(&self, x: &CalkinElement, k: usize) -> Result<f64> {
        Ok(op_norm(&self.eval_block(x, k)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Graph {
        Graph::new(
            &["v1", "v2", "v3"],
            &[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")],
        )
        .unwrap()
    }

    fn weighted(g: &Graph) -> Evaluator {
        Evaluator::new(g, &WeightSpec::diagonal(g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap())
    }

    fn o2() -> Graph {
        Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap()
    }

    #[test]
    fn normal_forms() {
        let g = o2();
        let e = CalkinElement::u(&g, 0);
        let f = CalkinElement::u(&g, 1);
        assert!(e.adjoint().mul(&g, &f).is_zero());
        assert_eq!(e.adjoint().mul(&g, &e), CalkinElement::p(0));
        let c = c3();
        let a = c.parse_walk("e1.e2").unwrap();
        let ua = CalkinElement::u_path(&a);
        assert_eq!(ua.adjoint().mul(&c, &ua), CalkinElement::p(a.src));
        assert!(CalkinElement::u(&c, 1).mul(&c, &CalkinElement::u(&c, 1)).is_zero());
        assert!(CalkinElement::p(0).mul(&c, &CalkinElement::p(1)).is_zero());
    }

    #[test]
    fn parse_and_format() {
        let g = c3();
        let x = CalkinElement::parse(&g, "u(e1).z^2.u*(e3) - 2*p(v1) + (0+1i)*z + 3").unwrap();
        assert_eq!(x.terms().count(), 4);
        let y = CalkinElement::parse(&g, &x.format(&g)).unwrap();
        assert_eq!(x, y);
        assert!(CalkinElement::parse(&g, "u(e9)").is_err());
        assert!(CalkinElement::parse(&g, "q(v1)").is_err());
        let walk = CalkinElement::parse(&g, "u(e1.e2)").unwrap();
        assert_eq!(
            walk,
            CalkinElement::u(&g, 1).mul(&g, &CalkinElement::u(&g, 0))
        );
    }

    #[test]
    fn blocks_on_the_cycle() {
        let g = c3();
        let ev = weighted(&g);
        let z5 = ev.eval_block(&CalkinElement::z(), 5).unwrap();
        let mut d: Vec<f64> = (0..3).map(|i| z5[(i, i)].re).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(d, vec![1.0, 2.0, 3.0]);
        let p2 = ev.eval_block(&CalkinElement::p(1), 1).unwrap();
        assert_eq!(p2[(0, 0)], ONE);
        assert_eq!(p2.iter().filter(|x| **x != ZERO).count(), 1);
        let uu = CalkinElement::parse(&g, "u(e1).u*(e1)").unwrap();
        assert_eq!(
            ev.eval_block(&uu, 2).unwrap(),
            ev.eval_block(&CalkinElement::p(1), 2).unwrap()
        );
        let sum = CalkinElement::parse(&g, "u(e1).u*(e1) + u(e2).u*(e2) + u(e3).u*(e3)").unwrap();
        assert_eq!(ev.eval_block(&sum, 4).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn window_values() {
        let g = c3();
        let ev = weighted(&g);
        let x = CalkinElement::parse(&g, "p(v1).z - 2*p(v1)").unwrap();
        let w = ev.window(&x, Window { base: 12, width: 6 }).unwrap();
        let mut vals = std::collections::BTreeSet::new();
        for (off, b) in w.blocks.iter().enumerate() {
            let nz: Vec<f64> = b.iter().filter(|c| c.norm() > 0.0).map(|c| c.re).collect();
            if (12 + off) % 2 == 1 {
                assert!(nz.len() <= 1);
                vals.insert(nz.first().copied().unwrap_or(0.0) as i64);
            } else {
                assert!(nz.iter().all(|v| (*v + 1.0).abs() < 1e-12));
            }
        }
        assert_eq!(vals.into_iter().collect::<Vec<_>>(), vec![-1, 0, 1]);
    }

    #[test]
    fn quotient_norms() {
        let g = c3();
        let ev = weighted(&g);
        let cfg = WindowConfig::default();
        let start = Window { base: 12, width: 2 };
        let z = CalkinElement::z();
        assert!((ev.calkin_norm(&z, start, &cfg).unwrap().norm - 3.0).abs() < 1e-9);
        let one = CalkinElement::parse(&g, "p(v1) + p(v2) + p(v3)").unwrap();
        assert!((ev.calkin_norm(&one, start, &cfg).unwrap().norm - 1.0).abs() < 1e-9);
        let poly = CalkinElement::parse(&g, "z.z - 3*z + 2").unwrap();
        assert!((ev.calkin_norm(&poly, start, &cfg).unwrap().norm - 2.0).abs() < 1e-9);
        assert!(!ev.calkin_equal(&z, &CalkinElement::one(), start, &cfg).unwrap());
        let lhs = CalkinElement::parse(&g, "z.u(e1).u*(e1)").unwrap();
        let rhs = CalkinElement::parse(&g, "u(e1).u*(e1).z").unwrap();
        assert!(ev.calkin_equal(&lhs, &rhs, start, &cfg).unwrap());
    }
}
