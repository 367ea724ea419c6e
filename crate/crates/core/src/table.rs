//! Finite loops as multiplication tables, plus first-order structural
//! invariants: nuclei, center, associator subloop, nilpotency class.
//!
//! Element 0 is always the identity. Tables are Latin squares with row 0
//! and column 0 equal to the identity permutation.

use crate::error::{Error, Result};

/// A finite loop of order `n`, stored as a row-major Latin square together
/// with both division tables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LoopTable {
    n: usize,
    table: Vec<u16>,
    ldiv: Vec<u16>,
    rdiv: Vec<u16>,
}

impl std::fmt::Debug for LoopTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LoopTable(n={})", self.n)
    }
}

impl LoopTable {
    /// Validates a raw square array as a loop table with identity 0.
    pub fn validate(raw: &[Vec<usize>]) -> Result<LoopTable> {
        let n = raw.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::BadShape);
        }
        for row in raw {
            if row.len() != n || row.iter().any(|&v| v >= n) {
                return Err(Error::BadShape);
            }
        }
        let mut table = vec![0u16; n * n];
        for (i, row) in raw.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                table[i * n + j] = v as u16;
            }
        }
        Self::from_flat(n, table)
    }

    pub(crate) fn from_flat(n: usize, table: Vec<u16>) -> Result<LoopTable> {
        assert_eq!(table.len(), n * n);
        // Latin property, rows and columns.
        let mut seen = vec![false; n];
        for i in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for j in 0..n {
                let v = table[i * n + j] as usize;
                if seen[v] {
                    return Err(Error::NotLatin(i));
                }
                seen[v] = true;
            }
        }
        for j in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for i in 0..n {
                let v = table[i * n + j] as usize;
                if seen[v] {
                    return Err(Error::NotLatin(j));
                }
                seen[v] = true;
            }
        }
        for x in 0..n {
            if table[x] as usize != x || table[x * n] as usize != x {
                return Err(Error::NoIdentity);
            }
        }
        let mut ldiv = vec![0u16; n * n];
        let mut rdiv = vec![0u16; n * n];
        for a in 0..n {
            for x in 0..n {
                let b = table[a * n + x] as usize;
                ldiv[a * n + b] = x as u16;
                let c = table[x * n + a] as usize;
                rdiv[a * n + c] = x as u16;
            }
        }
        Ok(LoopTable { n, table, ldiv, rdiv })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// The product x·y.
    #[inline(always)]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    /// The unique x with a·x = b.
    #[inline(always)]
    pub fn ldiv(&self, a: usize, b: usize) -> usize {
        self.ldiv[a * self.n + b] as usize
    }

    /// The unique x with x·a = b.
    #[inline(always)]
    pub fn rdiv(&self, a: usize, b: usize) -> usize {
        self.rdiv[a * self.n + b] as usize
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u16]> {
        self.table.chunks(self.n)
    }

    /// The commutator [x,y]: the unique c with x·y = (y·x)·c.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        self.ldiv(self.mul(y, x), self.mul(x, y))
    }

    /// The associator [x,y,z]: the unique a with (xy)z = (x(yz))·a.
    pub fn associator(&self, x: usize, y: usize, z: usize) -> usize {
        let lhs = self.mul(self.mul(x, y), z);
        let rhs = self.mul(x, self.mul(y, z));
        self.ldiv(rhs, lhs)
    }

    /// The number of non-associating triples.
    pub fn mu_count(&self) -> u64 {
        let n = self.n;
        let mut count = 0u64;
        for a in 0..n {
            for b in 0..n {
                let ab = self.table[a * n + b] as usize;
                for c in 0..n {
                    let bc = self.table[b * n + c] as usize;
                    if self.table[ab * n + c] != self.table[a * n + bc] {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    pub fn is_associative(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let ab = self.table[a * n + b] as usize;
                for c in 0..n {
                    let bc = self.table[b * n + c] as usize;
                    if self.table[ab * n + c] != self.table[a * n + bc] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| (x..n).all(|y| self.table[x * n + y] == self.table[y * n + x]))
    }

    /// The four nuclei (left, middle, right, intersection), each checked to
    /// be a subloop.
    pub fn nuclei(&self) -> Nuclei {
        let n = self.n;
        let mut left = SubloopMask::full(n);
        let mut middle = SubloopMask::full(n);
        let mut right = SubloopMask::full(n);
        for x in 0..n {
            'l: for y in 0..n {
                for z in 0..n {
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                        left.remove(x);
                        break 'l;
                    }
                }
            }
            'm: for y in 0..n {
                for z in 0..n {
                    if self.mul(self.mul(y, x), z) != self.mul(y, self.mul(x, z)) {
                        middle.remove(x);
                        break 'm;
                    }
                }
            }
            'r: for y in 0..n {
                for z in 0..n {
                    if self.mul(self.mul(y, z), x) != self.mul(y, self.mul(z, x)) {
                        right.remove(x);
                        break 'r;
                    }
                }
            }
        }
        let full = left.intersection(&middle).intersection(&right);
        for m in [&left, &middle, &right, &full] {
            assert!(m.is_subloop(self), "nucleus failed subloop closure");
        }
        Nuclei { left, middle, right, full }
    }

    /// The center: nuclear elements commuting with everything. Checked normal.
    pub fn center(&self) -> SubloopMask {
        let nuc = self.nuclei().full;
        let mut z = SubloopMask::empty(self.n);
        for x in nuc.iter() {
            if (0..self.n).all(|y| self.mul(x, y) == self.mul(y, x)) {
                z.insert(x);
            }
        }
        assert!(z.is_subloop(self), "center failed subloop closure");
        assert!(self.is_normal(&z), "center failed normality");
        z
    }

    /// Images of z under the standard inner mapping generators.
    /// T(x): z -> the solution of w·x = x·z.
    #[inline]
    pub fn inner_t(&self, x: usize, z: usize) -> usize {
        self.rdiv(x, self.mul(x, z))
    }

    /// L(x,y): z -> (yx) \ (y·(xz)).
    #[inline]
    pub fn inner_l(&self, x: usize, y: usize, z: usize) -> usize {
        self.ldiv(self.mul(y, x), self.mul(y, self.mul(x, z)))
    }

    /// R(x,y): z -> ((zx)y) / (xy).
    #[inline]
    pub fn inner_r(&self, x: usize, y: usize, z: usize) -> usize {
        self.rdiv(self.mul(x, y), self.mul(self.mul(z, x), y))
    }

    /// Whether the subloop S is fixed setwise by every inner mapping.
    pub fn is_normal(&self, s: &SubloopMask) -> bool {
        if !s.contains(0) {
            return false;
        }
        for z in s.iter() {
            for x in 0..self.n {
                if !s.contains(self.inner_t(x, z)) {
                    return false;
                }
                for y in 0..self.n {
                    if !s.contains(self.inner_l(x, y, z)) || !s.contains(self.inner_r(x, y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Smallest subloop containing `seed`; with `normal`, smallest normal
    /// subloop (closure under all inner mapping generators as well).
    pub fn subloop_generated(&self, seed: &[usize], normal: bool) -> SubloopMask {
        let mut s = SubloopMask::empty(self.n);
        s.insert(0);
        for &x in seed {
            s.insert(x);
        }
        loop {
            let mut changed = self.close_under_ops(&mut s);
            if normal {
                changed |= self.close_under_inner(&mut s);
            }
            if !changed {
                return s;
            }
        }
    }

    fn close_under_ops(&self, s: &mut SubloopMask) -> bool {
        let mut changed = false;
        loop {
            let members: Vec<usize> = s.iter().collect();
            let before = s.len();
            for &x in &members {
                for &y in &members {
                    s.insert(self.mul(x, y));
                    s.insert(self.ldiv(x, y));
                    s.insert(self.rdiv(x, y));
                }
            }
            if s.len() == before {
                return changed;
            }
            changed = true;
        }
    }

    fn close_under_inner(&self, s: &mut SubloopMask) -> bool {
        let mut changed = false;
        loop {
            let members: Vec<usize> = s.iter().collect();
            let before = s.len();
            for &z in &members {
                for x in 0..self.n {
                    s.insert(self.inner_t(x, z));
                    for y in 0..self.n {
                        s.insert(self.inner_l(x, y, z));
                        s.insert(self.inner_r(x, y, z));
                    }
                }
            }
            if s.len() == before {
                return changed;
            }
            changed = true;
        }
    }

    /// The associator subloop A(Q): iterated normal closure of associators
    /// until the quotient is a group.
    pub fn associator_subloop(&self) -> SubloopMask {
        let mut assocs: Vec<usize> = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                for z in 0..self.n {
                    let a = self.associator(x, y, z);
                    if a != 0 {
                        assocs.push(a);
                    }
                }
            }
        }
        assocs.sort_unstable();
        assocs.dedup();
        let mut s = self.subloop_generated(&assocs, true);
        // One pass suffices in theory; iterate anyway until the quotient is
        // associative.
        loop {
            let q = self.quotient(&s).expect("associator closure is normal");
            if q.is_associative() {
                return s;
            }
            let coset_of = self.coset_partition(&s).expect("normal");
            let mut extra: Vec<usize> = s.iter().collect();
            for x in 0..q.order() {
                for y in 0..q.order() {
                    for z in 0..q.order() {
                        if q.associator(x, y, z) != 0 {
                            // adjoin a preimage associator
                            let (px, py, pz) = (
                                coset_of.iter().position(|&c| c == x).unwrap(),
                                coset_of.iter().position(|&c| c == y).unwrap(),
                                coset_of.iter().position(|&c| c == z).unwrap(),
                            );
                            extra.push(self.associator(px, py, pz));
                        }
                    }
                }
            }
            s = self.subloop_generated(&extra, true);
        }
    }

    /// Assigns a coset index to every element, with the coset of 0 first and
    /// the rest ordered by minimal element. Errors if left and right cosets
    /// of S disagree.
    pub fn coset_partition(&self, s: &SubloopMask) -> Result<Vec<usize>> {
        if !s.contains(0) || !s.is_subloop(self) {
            return Err(Error::NotSubloop);
        }
        let mut coset_of = vec![usize::MAX; self.n];
        let mut next = 0usize;
        for x in 0..self.n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let idx = next;
            next += 1;
            for m in s.iter() {
                let xm = self.mul(x, m);
                if coset_of[xm] != usize::MAX && coset_of[xm] != idx {
                    return Err(Error::NotNormal);
                }
                coset_of[xm] = idx;
            }
            // left coset must equal right coset
            for m in s.iter() {
                let mx = self.mul(m, x);
                if coset_of[mx] != idx {
                    return Err(Error::NotNormal);
                }
            }
        }
        Ok(coset_of)
    }

    /// The factor loop Q/S. Errors with NotNormal if S is not normal or the
    /// coset product is not well defined.
    pub fn quotient(&self, s: &SubloopMask) -> Result<LoopTable> {
        let coset_of = self.coset_partition(s)?;
        let k = coset_of.iter().max().unwrap() + 1;
        let mut table = vec![u16::MAX; k * k];
        for x in 0..self.n {
            for y in 0..self.n {
                let (cx, cy) = (coset_of[x], coset_of[y]);
                let cz = coset_of[self.mul(x, y)];
                let cell = &mut table[cx * k + cy];
                if *cell == u16::MAX {
                    *cell = cz as u16;
                } else if *cell != cz as u16 {
                    return Err(Error::NotNormal);
                }
            }
        }
        LoopTable::from_flat(k, table)
    }

    /// Length of the iterated center-quotient series, or None if the series
    /// stalls before reaching the trivial loop.
    pub fn nilpotency_class(&self) -> Option<u32> {
        let mut q = self.clone();
        let mut class = 0u32;
        loop {
            if q.order() == 1 {
                return Some(class);
            }
            let z = q.center();
            if z.len() == 1 {
                return None;
            }
            q = q.quotient(&z).expect("center is normal");
            class += 1;
        }
    }

    /// True iff every element generates an associative subloop.
    pub fn is_power_associative(&self) -> bool {
        for x in 0..self.n {
            let s = self.subloop_generated(&[x], false);
            let members: Vec<usize> = s.iter().collect();
            for &a in &members {
                for &b in &members {
                    let ab = self.mul(a, b);
                    for &c in &members {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// The four nuclei of a loop.
pub struct Nuclei {
    pub left: SubloopMask,
    pub middle: SubloopMask,
    pub right: SubloopMask,
    pub full: SubloopMask,
}

/// A subset of loop elements as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SubloopMask {
    n: usize,
    words: Vec<u64>,
}

impl SubloopMask {
    pub fn empty(n: usize) -> Self {
        SubloopMask { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut m = Self::empty(n);
        for x in 0..n {
            m.insert(x);
        }
        m
    }

    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut m = Self::empty(n);
        m.insert(0);
        for &x in members {
            m.insert(x);
        }
        m
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn contains(&self, x: usize) -> bool {
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        self.words[x / 64] &= !(1 << (x % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&x| self.contains(x))
    }

    pub fn intersection(&self, other: &SubloopMask) -> SubloopMask {
        assert_eq!(self.n, other.n);
        SubloopMask {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union(&self, other: &SubloopMask) -> SubloopMask {
        assert_eq!(self.n, other.n);
        SubloopMask {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Contains 0 and is closed under product and both divisions.
    pub fn is_subloop(&self, q: &LoopTable) -> bool {
        if !self.contains(0) {
            return false;
        }
        let members: Vec<usize> = self.iter().collect();
        for &x in &members {
            for &y in &members {
                if !self.contains(q.mul(x, y))
                    || !self.contains(q.ldiv(x, y))
                    || !self.contains(q.rdiv(x, y))
                {
                    return false;
                }
            }
        }
        true
    }
}

/// The Cayley table of the cyclic group of order n (identity first).
pub fn cyclic_group(n: usize) -> LoopTable {
    let raw: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    LoopTable::validate(&raw).unwrap()
}

/// The elementary abelian 2-group of rank r as a table (xor on indices).
pub fn elementary_abelian_2(rank: usize) -> LoopTable {
    let n = 1usize << rank;
    let raw: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| i ^ j).collect()).collect();
    LoopTable::validate(&raw).unwrap()
}
