//! The product lattice `[4]^d` (d = 2, 3, 4), its bitmask subsets, and
//! Ferrers-shaped down-sets.
//!
//! Cells are addressed by a little-endian base-4 linear index
//! `idx = sum coords[i] * 4^i`, which is the canonical cell order everywhere
//! (certificates, clause triples, serialized sets).

use num_bigint::BigUint;
use std::fmt;
use std::sync::OnceLock;

pub const VALS: u8 = 4;

/// A point of `[4]^d`; unused trailing coordinates are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub dim: u8,
    pub coords: [u8; 4],
}

impl Point {
    pub fn new(dim: u8, coords: &[u8]) -> Self {
        assert!(dim >= 2 && dim <= 4 && coords.len() == dim as usize);
        let mut c = [0u8; 4];
        for (i, &v) in coords.iter().enumerate() {
            assert!(v < VALS, "coordinate out of range");
            c[i] = v;
        }
        Point { dim, coords: c }
    }

    /// Canonical little-endian base-4 linear index.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for i in (0..self.dim as usize).rev() {
            idx = idx * 4 + self.coords[i] as usize;
        }
        idx
    }

    pub fn from_index(dim: u8, mut idx: usize) -> Self {
        assert!(idx < cell_count(dim));
        let mut c = [0u8; 4];
        for slot in c.iter_mut().take(dim as usize) {
            *slot = (idx % 4) as u8;
            idx /= 4;
        }
        Point { dim, coords: c }
    }

    /// Coordinatewise order: true iff `self <= other` in the product order.
    pub fn le(&self, other: &Point) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        (0..self.dim as usize).all(|i| self.coords[i] <= other.coords[i])
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords[..self.dim as usize]
            .iter()
            .map(|c| c.to_string())
            .collect();
        write!(f, "({})", cs.join(","))
    }
}

pub fn cell_count(dim: u8) -> usize {
    1usize << (2 * dim)
}

/// A subset of `[4]^d` as a fixed-width 256-bit mask (dims below 4 use the
/// low words only).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellSet {
    pub dim: u8,
    words: [u64; 4],
}

impl CellSet {
    pub fn empty(dim: u8) -> Self {
        assert!((2..=4).contains(&dim));
        CellSet { dim, words: [0; 4] }
    }

    pub fn full(dim: u8) -> Self {
        let mut s = CellSet::empty(dim);
        let n = cell_count(dim);
        for i in 0..4 {
            let lo = i * 64;
            if n > lo {
                let bits = (n - lo).min(64);
                s.words[i] = if bits == 64 { !0 } else { (1u64 << bits) - 1 };
            }
        }
        s
    }

    pub fn from_indices(dim: u8, indices: &[usize]) -> Self {
        let mut s = CellSet::empty(dim);
        for &i in indices {
            s.insert_index(i);
        }
        s
    }

    pub fn insert(&mut self, p: &Point) {
        debug_assert_eq!(p.dim, self.dim);
        self.insert_index(p.index());
    }

    pub fn insert_index(&mut self, idx: usize) {
        debug_assert!(idx < cell_count(self.dim));
        self.words[idx / 64] |= 1u64 << (idx % 64);
    }

    pub fn remove_index(&mut self, idx: usize) {
        self.words[idx / 64] &= !(1u64 << (idx % 64));
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.contains_index(p.index())
    }

    pub fn len(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        debug_assert_eq!(self.dim, other.dim);
        let mut w = self.words;
        for i in 0..4 {
            w[i] |= other.words[i];
        }
        CellSet { dim: self.dim, words: w }
    }

    pub fn intersect(&self, other: &CellSet) -> CellSet {
        debug_assert_eq!(self.dim, other.dim);
        let mut w = self.words;
        for i in 0..4 {
            w[i] &= other.words[i];
        }
        CellSet { dim: self.dim, words: w }
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        debug_assert_eq!(self.dim, other.dim);
        let mut w = self.words;
        for i in 0..4 {
            w[i] &= !other.words[i];
        }
        CellSet { dim: self.dim, words: w }
    }

    pub fn complement(&self) -> CellSet {
        CellSet::full(self.dim).difference(self)
    }

    pub fn intersects(&self, other: &CellSet) -> bool {
        (0..4).any(|i| self.words[i] & other.words[i] != 0)
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        (0..4).all(|i| self.words[i] & !other.words[i] == 0)
    }

    pub fn union_in_place(&mut self, other: &CellSet) {
        for i in 0..4 {
            self.words[i] |= other.words[i];
        }
    }

    pub fn subtract_in_place(&mut self, other: &CellSet) {
        for i in 0..4 {
            self.words[i] &= !other.words[i];
        }
    }

    /// Cell indices in ascending (canonical) order.
    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let n = cell_count(self.dim);
        (0..n).filter(move |&i| self.contains_index(i))
    }

    pub fn iter_points(&self) -> impl Iterator<Item = Point> + '_ {
        let dim = self.dim;
        self.iter_indices().map(move |i| Point::from_index(dim, i))
    }

    /// The low 64-bit word; the full mask for dims 2 and 3.
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }

    pub fn words(&self) -> [u64; 4] {
        self.words
    }

    /// True iff the set is closed upward: every coordinate successor of a
    /// member is a member.
    pub fn is_up_set(&self) -> bool {
        for idx in self.iter_indices() {
            let p = Point::from_index(self.dim, idx);
            for i in 0..self.dim as usize {
                if p.coords[i] + 1 < VALS {
                    let succ = idx + 4usize.pow(i as u32);
                    if !self.contains_index(succ) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_down_set(&self) -> bool {
        self.complement().is_up_set()
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellSet(d={}, n={}, {:?})", self.dim, self.len(), self.iter_points().collect::<Vec<_>>())
    }
}

/// `{q : q >= p}`; its size is the product of `4 - p_i`.
pub fn principal_up_closure(p: &Point) -> CellSet {
    let mut s = CellSet::empty(p.dim);
    let mut stack = vec![p.index()];
    s.insert_index(p.index());
    while let Some(idx) = stack.pop() {
        let q = Point::from_index(p.dim, idx);
        for i in 0..p.dim as usize {
            if q.coords[i] + 1 < VALS {
                let succ = idx + 4usize.pow(i as u32);
                if !s.contains_index(succ) {
                    s.insert_index(succ);
                    stack.push(succ);
                }
            }
        }
    }
    s
}

/// `{q : q <= p}`; its size is the product of `p_i + 1`.
pub fn principal_down_closure(p: &Point) -> CellSet {
    let mut s = CellSet::empty(p.dim);
    let mut stack = vec![p.index()];
    s.insert_index(p.index());
    while let Some(idx) = stack.pop() {
        let q = Point::from_index(p.dim, idx);
        for i in 0..p.dim as usize {
            if q.coords[i] > 0 {
                let pred = idx - 4usize.pow(i as u32);
                if !s.contains_index(pred) {
                    s.insert_index(pred);
                    stack.push(pred);
                }
            }
        }
    }
    s
}

/// Cached principal closures for the 4-dimensional lattice (hot path in the
/// searches).
pub fn up_closure_table() -> &'static Vec<CellSet> {
    static TABLE: OnceLock<Vec<CellSet>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..256)
            .map(|i| principal_up_closure(&Point::from_index(4, i)))
            .collect()
    })
}

pub fn down_closure_table() -> &'static Vec<CellSet> {
    static TABLE: OnceLock<Vec<CellSet>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..256)
            .map(|i| principal_down_closure(&Point::from_index(4, i)))
            .collect()
    })
}

/// A Ferrers-shaped down-set, stored as monotone heights.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FerrersShape {
    /// `d = 2`: nonincreasing heights, column `x` holds values `< h[x]`.
    Two([u8; 4]),
    /// `d = 3`: heights nonincreasing along rows and columns; cell
    /// `(x, y, c)` is present iff `c < h[x][y]`.
    Three([[u8; 4]; 4]),
}

impl FerrersShape {
    pub fn dim(&self) -> u8 {
        match self {
            FerrersShape::Two(_) => 2,
            FerrersShape::Three(_) => 3,
        }
    }

    pub fn size(&self) -> u32 {
        match self {
            FerrersShape::Two(h) => h.iter().map(|&v| v as u32).sum(),
            FerrersShape::Three(h) => h.iter().flatten().map(|&v| v as u32).sum(),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            FerrersShape::Two(h) => h.iter().all(|&v| v <= VALS) && h.windows(2).all(|w| w[0] >= w[1]),
            FerrersShape::Three(h) => {
                h.iter().flatten().all(|&v| v <= VALS)
                    && h.iter().all(|row| row.windows(2).all(|w| w[0] >= w[1]))
                    && (0..4).all(|c| (0..3).all(|r| h[r][c] >= h[r + 1][c]))
            }
        }
    }

    pub fn expand(&self) -> CellSet {
        match self {
            FerrersShape::Two(h) => {
                let mut s = CellSet::empty(2);
                for x in 0..4u8 {
                    for c in 0..h[x as usize] {
                        s.insert(&Point::new(2, &[x, c]));
                    }
                }
                s
            }
            FerrersShape::Three(h) => {
                let mut s = CellSet::empty(3);
                for x in 0..4u8 {
                    for y in 0..4u8 {
                        for c in 0..h[x as usize][y as usize] {
                            s.insert(&Point::new(3, &[x, y, c]));
                        }
                    }
                }
                s
            }
        }
    }
}

impl fmt::Debug for FerrersShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FerrersShape::Two(h) => write!(f, "F2{:?}", h),
            FerrersShape::Three(h) => write!(f, "F3{:?}", h),
        }
    }
}

/// All Ferrers shapes of the given dimension in lexicographic order on the
/// height vector / row-major height matrix.
pub fn enumerate_ferrers(dim: u8) -> Vec<FerrersShape> {
    match dim {
        2 => {
            let mut out = Vec::new();
            for h0 in 0..=VALS {
                for h1 in 0..=h0 {
                    for h2 in 0..=h1 {
                        for h3 in 0..=h2 {
                            out.push(FerrersShape::Two([h0, h1, h2, h3]));
                        }
                    }
                }
            }
            out
        }
        3 => {
            let mut out = Vec::new();
            let mut h = [[0u8; 4]; 4];
            fn rec(h: &mut [[u8; 4]; 4], pos: usize, out: &mut Vec<FerrersShape>) {
                if pos == 16 {
                    out.push(FerrersShape::Three(*h));
                    return;
                }
                let (r, c) = (pos / 4, pos % 4);
                let mut cap = VALS;
                if r > 0 {
                    cap = cap.min(h[r - 1][c]);
                }
                if c > 0 {
                    cap = cap.min(h[r][c - 1]);
                }
                for v in 0..=cap {
                    h[r][c] = v;
                    rec(h, pos + 1, out);
                }
                h[r][c] = 0;
            }
            rec(&mut h, 0, &mut out);
            out
        }
        _ => panic!("Ferrers enumeration is defined for dims 2 and 3"),
    }
}

/// Exact count of monotone height matrices in an `a x b` grid with entries
/// `0..=c` (the boxed plane-partition product formula).
pub fn boxed_plane_partition_count(a: u32, b: u32, c: u32) -> BigUint {
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                num *= BigUint::from(i + j + k - 1);
                den *= BigUint::from(i + j + k - 2);
            }
        }
    }
    assert!((&num % &den) == BigUint::from(0u32));
    num / den
}

/// A partial trace: present values on a 2- or 3-column support.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TraceKind {
    Pair,
    Triple,
}

impl TraceKind {
    pub fn arity(&self) -> usize {
        match self {
            TraceKind::Pair => 2,
            TraceKind::Triple => 3,
        }
    }
}

/// A value assignment on a sorted support of 2 or 3 of the 4 columns.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SupportedTrace {
    pub kind: TraceKind,
    /// Sorted column indices; only the first `kind.arity()` entries are used.
    pub support: [u8; 3],
    /// `value.coords[i]` is the value on column `support[i]`.
    pub value: Point,
}

impl SupportedTrace {
    pub fn new(support: &[u8], value: &[u8]) -> Self {
        let kind = match support.len() {
            2 => TraceKind::Pair,
            3 => TraceKind::Triple,
            _ => panic!("support must have 2 or 3 columns"),
        };
        assert_eq!(support.len(), value.len());
        let mut s = [0u8; 3];
        for (i, &c) in support.iter().enumerate() {
            assert!(c < 4);
            s[i] = c;
        }
        assert!(support.windows(2).all(|w| w[0] < w[1]), "support must be sorted");
        SupportedTrace {
            kind,
            support: s,
            value: Point::new(support.len() as u8, value),
        }
    }

    pub fn support_slice(&self) -> &[u8] {
        &self.support[..self.kind.arity()]
    }

    /// Value on an absolute column, if the column is in the support.
    pub fn value_on_column(&self, col: u8) -> Option<u8> {
        self.support_slice()
            .iter()
            .position(|&c| c == col)
            .map(|i| self.value.coords[i])
    }

    /// The wide cells of `[4]^4` extending this trace (its closure support).
    pub fn extension_cells(&self) -> CellSet {
        let mut s = CellSet::empty(4);
        let free: Vec<u8> = (0..4u8).filter(|c| self.value_on_column(*c).is_none()).collect();
        let mut coords = [0u8; 4];
        for (i, &c) in self.support_slice().iter().enumerate() {
            coords[c as usize] = self.value.coords[i];
        }
        let k = free.len();
        for combo in 0..4usize.pow(k as u32) {
            let mut x = combo;
            let mut cs = coords;
            for &c in &free {
                cs[c as usize] = (x % 4) as u8;
                x /= 4;
            }
            s.insert(&Point::new(4, &cs));
        }
        s
    }

    /// Canonical text form, e.g. `t:013:v=102` or `p:23:v=01`.
    pub fn label(&self) -> String {
        let s: String = self.support_slice().iter().map(|c| c.to_string()).collect();
        let v: String = (0..self.kind.arity())
            .map(|i| self.value.coords[i].to_string())
            .collect();
        match self.kind {
            TraceKind::Pair => format!("p:{}:v={}", s, v),
            TraceKind::Triple => format!("t:{}:v={}", s, v),
        }
    }
}

impl fmt::Debug for SupportedTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// The 6 pair supports in lexicographic order.
pub fn pair_supports() -> Vec<[u8; 2]> {
    let mut v = Vec::new();
    for a in 0..4u8 {
        for b in (a + 1)..4 {
            v.push([a, b]);
        }
    }
    v
}

/// The 4 triple supports in lexicographic order.
pub fn triple_supports() -> Vec<[u8; 3]> {
    let mut v = Vec::new();
    for a in 0..4u8 {
        for b in (a + 1)..4 {
            for c in (b + 1)..4 {
                v.push([a, b, c]);
            }
        }
    }
    v
}
