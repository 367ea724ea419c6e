//! Permutation groups with a base and strong generating set.
//!
//! The stabilizer chain is deterministic: the base is the full point
//! sequence 0,1,2,..., with levels whose orbit is trivial costing nothing.
//! This makes certificates reproducible and gives the stabilizer of point 0
//! (the inner mapping group of a loop) directly as the tail of the chain.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::LoopTable;

/// A permutation of {0,..,n-1}, stored by images.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    img: Vec<u16>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.img)
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm { img: (0..degree as u16).collect() }
    }

    pub fn from_images(img: Vec<u16>) -> Result<Perm> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &v in &img {
            if v as usize >= n || seen[v as usize] {
                return Err(Error::NotBijection);
            }
            seen[v as usize] = true;
        }
        Ok(Perm { img })
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline(always)]
    pub fn apply(&self, x: usize) -> usize {
        self.img[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// Composition acting on the left: (a.compose(b))(x) = a(b(x)).
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { img: other.img.iter().map(|&x| self.img[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut img = vec![0u16; self.img.len()];
        for (i, &v) in self.img.iter().enumerate() {
            img[v as usize] = i as u16;
        }
        Perm { img }
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Order of the permutation: lcm of cycle lengths.
    pub fn element_order(&self) -> u64 {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut ord = 1u64;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    /// Sorted cycle lengths (including fixed points).
    pub fn cycle_type(&self) -> Vec<u32> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable();
        cycles
    }

    pub fn images(&self) -> &[u16] {
        &self.img
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

struct Level {
    gens: Vec<Perm>,
    /// orbit points of the base point in discovery order
    orbit: Vec<usize>,
    /// point -> transversal rep u with u(base) = point
    trans: HashMap<usize, Perm>,
}

/// A permutation group with a certified stabilizer chain.
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    levels: Vec<Level>,
    order: BigUint,
}

impl PermGroup {
    /// Deterministic Schreier-Sims over the base 0,1,2,...,degree-1.
    pub fn from_generators(degree: usize, gens: &[Perm]) -> Result<PermGroup> {
        let mut uniq: Vec<Perm> = Vec::new();
        let mut seen: HashSet<Perm> = HashSet::new();
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch);
            }
            if !g.is_identity() && seen.insert(g.clone()) {
                uniq.push(g.clone());
            }
        }
        let mut levels: Vec<Level> = (0..degree)
            .map(|_| Level { gens: Vec::new(), orbit: Vec::new(), trans: HashMap::new() })
            .collect();
        levels[0].gens = uniq.clone();
        let mut group = PermGroup { degree, gens: uniq, levels, order: BigUint::from(1u32) };
        if degree > 0 {
            group.complete_level(0);
        }
        let mut order = BigUint::from(1u32);
        for lvl in &group.levels {
            if !lvl.orbit.is_empty() {
                order *= BigUint::from(lvl.orbit.len());
            }
        }
        group.order = order;
        debug_assert!(group.gens.iter().all(|g| group.contains(g)));
        Ok(group)
    }

    fn recompute_orbit(&mut self, i: usize) {
        let base = i;
        let mut orbit = vec![base];
        let mut trans = HashMap::new();
        trans.insert(base, Perm::identity(self.degree));
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            let up = trans[&p].clone();
            for g in &self.levels[i].gens {
                let q = g.apply(p);
                if !trans.contains_key(&q) {
                    trans.insert(q, g.compose(&up));
                    orbit.push(q);
                }
            }
        }
        self.levels[i].orbit = orbit;
        self.levels[i].trans = trans;
    }

    /// Strips g through levels from..; returns the residue and the level at
    /// which stripping failed, or None if g stripped to the identity.
    fn strip_from(&self, mut g: Perm, from: usize) -> Option<(Perm, usize)> {
        for j in from..self.degree {
            if g.is_identity() {
                return None;
            }
            let p = g.apply(j);
            if p == j {
                continue;
            }
            match self.levels[j].trans.get(&p) {
                Some(u) => g = u.inverse().compose(&g),
                None => return Some((g, j)),
            }
        }
        if g.is_identity() { None } else { unreachable!("full base") }
    }

    fn complete_level(&mut self, i: usize) {
        self.recompute_orbit(i);
        loop {
            let mut clean = true;
            let orbit = self.levels[i].orbit.clone();
            let gens = self.levels[i].gens.clone();
            'pairs: for &p in &orbit {
                let up = self.levels[i].trans[&p].clone();
                for g in &gens {
                    let q = g.apply(p);
                    let uq_inv = self.levels[i].trans[&q].inverse();
                    let h = uq_inv.compose(&g.compose(&up));
                    if h.is_identity() {
                        continue;
                    }
                    if let Some((r, j)) = self.strip_from(h, i + 1) {
                        for l in i + 1..=j {
                            self.levels[l].gens.push(r.clone());
                        }
                        for l in (i + 1..=j).rev() {
                            self.complete_level(l);
                        }
                        clean = false;
                        continue 'pairs;
                    }
                }
            }
            if clean {
                return;
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(&self.order).ok()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.strip_from(g.clone(), 0).is_none()
    }

    /// Base points with nontrivial orbit, in chain order.
    pub fn base(&self) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.orbit.len() > 1)
            .map(|(i, _)| i)
            .collect()
    }

    /// Strong generators fixing point 0: generate the stabilizer of 0.
    pub fn point_stabilizer_gens(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        let mut seen: HashSet<Perm> = HashSet::new();
        for lvl in &self.levels[1..] {
            for g in &lvl.gens {
                debug_assert_eq!(g.apply(0), 0);
                if seen.insert(g.clone()) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        all_commute(&self.gens)
    }

    pub fn is_elementary_abelian_2(&self) -> bool {
        self.is_abelian() && self.gens.iter().all(|g| g.compose(g).is_identity())
    }

    /// All group elements, or TooLarge above the cap.
    pub fn elements(&self, cap: u64) -> Result<Vec<Perm>> {
        match self.order_u64() {
            Some(o) if o <= cap => {}
            _ => return Err(Error::TooLarge(self.order.to_string())),
        }
        let mut elems = vec![Perm::identity(self.degree)];
        let mut seen: HashSet<Perm> = elems.iter().cloned().collect();
        let mut head = 0;
        while head < elems.len() {
            let e = elems[head].clone();
            head += 1;
            for g in &self.gens {
                let f = g.compose(&e);
                if seen.insert(f.clone()) {
                    elems.push(f);
                }
            }
        }
        debug_assert_eq!(BigUint::from(elems.len()), self.order);
        Ok(elems)
    }

    /// The derived subgroup, as the normal closure of generator commutators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut gens: Vec<Perm> = Vec::new();
        let mut seen: HashSet<Perm> = HashSet::new();
        for a in &self.gens {
            for b in &self.gens {
                let c = a.inverse().compose(&b.inverse()).compose(a).compose(b);
                if !c.is_identity() && seen.insert(c.clone()) {
                    gens.push(c);
                }
            }
        }
        let mut sub = PermGroup::from_generators(self.degree, &gens).unwrap();
        loop {
            let mut grew = false;
            let current = sub.gens.clone();
            for k in &current {
                for g in &self.gens {
                    let c = g.inverse().compose(k).compose(g);
                    if !sub.contains(&c) {
                        gens.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                return sub;
            }
            sub = PermGroup::from_generators(self.degree, &gens).unwrap();
        }
    }

    /// Canonical (lexicographically minimal) representative of the coset
    /// g·self, via greedy descent through the chain.
    fn min_coset_rep(&self, g: &Perm) -> Perm {
        let mut cur = g.clone();
        for lvl in &self.levels {
            if lvl.orbit.len() <= 1 {
                continue;
            }
            let mut best: Option<(usize, usize)> = None;
            for &p in &lvl.orbit {
                let image = cur.apply(p);
                if best.map_or(true, |(bi, _)| image < bi) {
                    best = Some((image, p));
                }
            }
            let (_, p) = best.unwrap();
            cur = cur.compose(&lvl.trans[&p]);
        }
        cur
    }

    pub fn fingerprint(&self) -> GroupFingerprint {
        const CAP: u64 = 1 << 20;
        let derived = self.derived_series();
        let derived_series_orders: Vec<String> =
            derived.iter().map(|g| g.order().to_string()).collect();
        let abelianization_divisors = self.abelianization_divisors(&derived[0]);
        let (center_order, element_order_histogram, histogram_skipped) =
            match self.elements(CAP) {
                Ok(elems) => {
                    let center = elems
                        .iter()
                        .filter(|e| self.gens.iter().all(|g| e.commutes_with(g)))
                        .count() as u64;
                    let mut hist = BTreeMap::new();
                    for e in &elems {
                        *hist.entry(e.element_order()).or_insert(0u64) += 1;
                    }
                    (Some(center), Some(hist), false)
                }
                Err(_) => (None, None, true),
            };
        GroupFingerprint {
            order: self.order.to_string(),
            center_order,
            derived_series_orders,
            abelianization_divisors,
            element_order_histogram,
            histogram_skipped,
        }
    }

    /// Derived series G' >= G'' >= ... down to (and including) the trivial
    /// group.
    pub fn derived_series(&self) -> Vec<PermGroup> {
        let mut series = vec![self.derived_subgroup()];
        while series.last().unwrap().order() > &BigUint::from(1u32) {
            let next = series.last().unwrap().derived_subgroup();
            series.push(next);
        }
        series
    }

    /// Elementary divisors of G/G', computed by enumerating the (small)
    /// abelian quotient through canonical coset representatives.
    fn abelianization_divisors(&self, derived: &PermGroup) -> Vec<u64> {
        let mut reps = vec![Perm::identity(self.degree)];
        let mut seen: HashSet<Perm> = reps.iter().cloned().collect();
        let mut head = 0;
        while head < reps.len() {
            let r = reps[head].clone();
            head += 1;
            for g in &self.gens {
                let c = derived.min_coset_rep(&g.compose(&r));
                if seen.insert(c.clone()) {
                    reps.push(c);
                }
            }
        }
        // order of each coset in the quotient
        let mut orders: Vec<u64> = Vec::with_capacity(reps.len());
        for r in &reps {
            let mut pow = r.clone();
            let mut k = 1u64;
            while !derived.min_coset_rep(&pow).is_identity() {
                pow = pow.compose(r);
                k += 1;
            }
            orders.push(k);
        }
        let total = reps.len() as u64;
        let mut divisors = Vec::new();
        let mut rest = total;
        let mut p = 2u64;
        while rest > 1 {
            if rest % p == 0 {
                let e = ilog(p_part(total, p), p) as usize;
                // N_k = #elements of order dividing p^k, k = 0..=e
                let mut counts = Vec::with_capacity(e + 1);
                let mut pk = 1u64;
                for _ in 0..=e {
                    counts.push(orders.iter().filter(|&&o| pk % o == 0).count() as u64);
                    pk *= p;
                }
                // r_k = number of cyclic divisors with exponent >= k
                let ranks: Vec<u64> =
                    (1..=e).map(|k| ilog(counts[k] / counts[k - 1], p)).collect();
                for k in 1..=e {
                    let next = if k < e { ranks[k] } else { 0 };
                    for _ in 0..ranks[k - 1].saturating_sub(next) {
                        divisors.push(p.pow(k as u32));
                    }
                }
                while rest % p == 0 {
                    rest /= p;
                }
            }
            p += 1;
        }
        divisors.sort_unstable();
        divisors
    }
}

fn p_part(mut n: u64, p: u64) -> u64 {
    let mut q = 1;
    while n % p == 0 {
        n /= p;
        q *= p;
    }
    q
}

fn ilog(mut n: u64, p: u64) -> u64 {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

/// Isomorphism-invariant summary of a permutation group. Equal fingerprints
/// are necessary, not sufficient, for isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupFingerprint {
    pub order: String,
    pub center_order: Option<u64>,
    pub derived_series_orders: Vec<String>,
    pub abelianization_divisors: Vec<u64>,
    pub element_order_histogram: Option<BTreeMap<u64, u64>>,
    pub histogram_skipped: bool,
}

pub fn all_commute(perms: &[Perm]) -> bool {
    for (i, a) in perms.iter().enumerate() {
        for b in &perms[i + 1..] {
            if !a.commutes_with(b) {
                return false;
            }
        }
    }
    true
}

pub fn all_involutions(perms: &[Perm]) -> bool {
    perms.iter().all(|g| g.compose(g).is_identity())
}

/// Left and right translations of a loop, deduplicated.
pub fn translation_gens(q: &LoopTable) -> Vec<Perm> {
    let n = q.order();
    let mut out = Vec::new();
    let mut seen: HashSet<Perm> = HashSet::new();
    for x in 0..n {
        let l = Perm { img: (0..n).map(|y| q.mul(x, y) as u16).collect() };
        let r = Perm { img: (0..n).map(|y| q.mul(y, x) as u16).collect() };
        for p in [l, r] {
            if !p.is_identity() && seen.insert(p.clone()) {
                out.push(p);
            }
        }
    }
    out
}

/// Mlt(Q), generated by all translations.
pub fn multiplication_group(q: &LoopTable) -> PermGroup {
    PermGroup::from_generators(q.order(), &translation_gens(q)).unwrap()
}

/// Inn(Q) as the stabilizer of point 0 in Mlt(Q).
pub fn inner_mapping_group(q: &LoopTable) -> PermGroup {
    let mlt = multiplication_group(q);
    let stab = mlt.point_stabilizer_gens();
    let inn = PermGroup::from_generators(q.order(), &stab).unwrap();
    // Mlt is transitive on a loop, so |Mlt| = n * |Inn|.
    debug_assert_eq!(
        mlt.order().clone(),
        inn.order() * BigUint::from(q.order())
    );
    inn
}

/// The standard inner mapping generators T(x), L(x,y), R(x,y) as
/// permutations, deduplicated. Generates Inn(Q).
pub fn inner_generator_perms(q: &LoopTable) -> Vec<Perm> {
    let n = q.order();
    let mut out = Vec::new();
    let mut seen: HashSet<Perm> = HashSet::new();
    let push = |p: Perm, out: &mut Vec<Perm>, seen: &mut HashSet<Perm>| {
        if !p.is_identity() && seen.insert(p.clone()) {
            out.push(p);
        }
    };
    for x in 0..n {
        let t = Perm { img: (0..n).map(|z| q.inner_t(x, z) as u16).collect() };
        push(t, &mut out, &mut seen);
        for y in 0..n {
            let l = Perm { img: (0..n).map(|z| q.inner_l(x, y, z) as u16).collect() };
            push(l, &mut out, &mut seen);
            let r = Perm { img: (0..n).map(|z| q.inner_r(x, y, z) as u16).collect() };
            push(r, &mut out, &mut seen);
        }
    }
    out
}

/// Fast abelianness check for Inn(Q) without building a stabilizer chain.
pub fn inn_is_abelian(q: &LoopTable) -> bool {
    all_commute(&inner_generator_perms(q))
}

/// Inn(Q) abelian with every generator an involution.
pub fn inn_is_elementary_abelian_2(q: &LoopTable) -> bool {
    let gens = inner_generator_perms(q);
    all_commute(&gens) && all_involutions(&gens)
}
