//! Loop isomorphism testing via iterated signature refinement and
//! backtracking, plus an isomorphism-invariant fingerprint for
//! deduplication.

use sha2::{Digest, Sha256};

use crate::table::LoopTable;

type Color = [u8; 32];

fn digest(parts: &[&[u8]]) -> Color {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

/// Initial per-element invariants: cycle types of both translations,
/// nucleus and center membership, centralizer size.
fn initial_colors(q: &LoopTable) -> Vec<Color> {
    let n = q.order();
    let nuclei = q.nuclei();
    let center = q.center();
    (0..n)
        .map(|x| {
            let mut lrow: Vec<u16> = (0..n).map(|y| q.mul(x, y) as u16).collect();
            let mut rrow: Vec<u16> = (0..n).map(|y| q.mul(y, x) as u16).collect();
            lrow = cycle_type(&lrow);
            rrow = cycle_type(&rrow);
            let centralizer = (0..n).filter(|&y| q.mul(x, y) == q.mul(y, x)).count();
            let flags = [
                nuclei.left.contains(x) as u8,
                nuclei.middle.contains(x) as u8,
                nuclei.right.contains(x) as u8,
                nuclei.full.contains(x) as u8,
                center.contains(x) as u8,
            ];
            let lb: Vec<u8> = lrow.iter().flat_map(|v| v.to_le_bytes()).collect();
            let rb: Vec<u8> = rrow.iter().flat_map(|v| v.to_le_bytes()).collect();
            digest(&[&lb, &rb, &flags, &(centralizer as u32).to_le_bytes()])
        })
        .collect()
}

fn cycle_type(perm: &[u16]) -> Vec<u16> {
    let mut seen = vec![false; perm.len()];
    let mut lens = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u16;
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            p = perm[p] as usize;
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable();
    lens
}

/// Refines colors with the multiset of (c(y), c(xy), c(yx)) over all y until
/// the number of classes stabilizes.
fn refine_colors(q: &LoopTable, mut colors: Vec<Color>) -> Vec<Color> {
    let n = q.order();
    let mut classes = count_distinct(&colors);
    for _ in 0..n {
        let next: Vec<Color> = (0..n)
            .map(|x| {
                let mut triples: Vec<[Color; 3]> = (0..n)
                    .map(|y| [colors[y], colors[q.mul(x, y)], colors[q.mul(y, x)]])
                    .collect();
                triples.sort_unstable();
                let mut h = Sha256::new();
                h.update(colors[x]);
                for t in &triples {
                    for c in t {
                        h.update(c);
                    }
                }
                h.finalize().into()
            })
            .collect();
        let new_classes = count_distinct(&next);
        colors = next;
        if new_classes == classes {
            break;
        }
        classes = new_classes;
    }
    colors
}

fn count_distinct(colors: &[Color]) -> usize {
    let mut sorted: Vec<&Color> = colors.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

pub fn element_colors(q: &LoopTable) -> Vec<Color> {
    refine_colors(q, initial_colors(q))
}

fn global_invariants(q: &LoopTable) -> Vec<u64> {
    let nuclei = q.nuclei();
    let center = q.center();
    vec![
        q.order() as u64,
        q.mu_count(),
        nuclei.left.iter().count() as u64,
        nuclei.middle.iter().count() as u64,
        nuclei.right.iter().count() as u64,
        nuclei.full.iter().count() as u64,
        center.iter().count() as u64,
        q.is_commutative() as u64,
        q.is_power_associative() as u64,
    ]
}

/// Isomorphism-invariant digest: global invariants plus the sorted multiset
/// of refined element colors. Equal digests are dedup candidates, not proof;
/// confirm with `are_isomorphic`.
pub fn canonical_fingerprint(q: &LoopTable) -> String {
    let mut colors = element_colors(q);
    colors.sort_unstable();
    let inv: Vec<u8> = global_invariants(q).iter().flat_map(|v| v.to_le_bytes()).collect();
    let mut h = Sha256::new();
    h.update(&inv);
    for c in &colors {
        h.update(c);
    }
    let out: Color = h.finalize().into();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

struct Search<'a> {
    q1: &'a LoopTable,
    q2: &'a LoopTable,
    colors1: Vec<Color>,
    colors2: Vec<Color>,
    /// q1 element -> q2 element, usize::MAX when unset
    map: Vec<usize>,
    used: Vec<bool>,
    /// defined domain elements, in insertion order
    domain: Vec<usize>,
}

impl<'a> Search<'a> {
    /// Extends map[x] = y and closes under products; records every newly
    /// defined element in `added` so the caller can roll back.
    fn assign(&mut self, x: usize, y: usize, added: &mut Vec<usize>) -> bool {
        if self.map[x] != usize::MAX {
            return self.map[x] == y;
        }
        if self.used[y] || self.colors1[x] != self.colors2[y] {
            return false;
        }
        self.map[x] = y;
        self.used[y] = true;
        self.domain.push(x);
        added.push(x);
        let mut frontier = vec![x];
        while let Some(a) = frontier.pop() {
            let defined: Vec<usize> = self.domain.clone();
            for b in defined {
                for (p, pi) in [
                    (self.q1.mul(a, b), self.q2.mul(self.map[a], self.map[b])),
                    (self.q1.mul(b, a), self.q2.mul(self.map[b], self.map[a])),
                ] {
                    if self.map[p] == usize::MAX {
                        if self.used[pi] || self.colors1[p] != self.colors2[pi] {
                            return false;
                        }
                        self.map[p] = pi;
                        self.used[pi] = true;
                        self.domain.push(p);
                        added.push(p);
                        frontier.push(p);
                    } else if self.map[p] != pi {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn rollback(&mut self, added: &[usize]) {
        for &x in added {
            self.used[self.map[x]] = false;
            self.map[x] = usize::MAX;
        }
        self.domain.truncate(self.domain.len() - added.len());
    }

    fn solve(&mut self) -> bool {
        let n = self.q1.order();
        if self.domain.len() == n {
            return true;
        }
        // next unmapped element with the rarest color (smallest class),
        // ties by index
        let mut class_size = std::collections::HashMap::new();
        for c in &self.colors1 {
            *class_size.entry(*c).or_insert(0usize) += 1;
        }
        let x = (0..n)
            .filter(|&x| self.map[x] == usize::MAX)
            .min_by_key(|&x| (class_size[&self.colors1[x]], x))
            .unwrap();
        for y in 0..n {
            if self.used[y] || self.colors2[y] != self.colors1[x] {
                continue;
            }
            let mut added = Vec::new();
            if self.assign(x, y, &mut added) && self.solve() {
                return true;
            }
            self.rollback(&added);
        }
        false
    }
}

/// A product-preserving bijection from q1 to q2, or None. Any returned map
/// is verified on all n^2 products.
pub fn are_isomorphic(q1: &LoopTable, q2: &LoopTable) -> Option<Vec<usize>> {
    let n = q1.order();
    if n != q2.order() || global_invariants(q1) != global_invariants(q2) {
        return None;
    }
    let colors1 = element_colors(q1);
    let colors2 = element_colors(q2);
    let mut sorted1 = colors1.clone();
    let mut sorted2 = colors2.clone();
    sorted1.sort_unstable();
    sorted2.sort_unstable();
    if sorted1 != sorted2 {
        return None;
    }
    let mut search = Search {
        q1,
        q2,
        colors1,
        colors2,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        domain: Vec::new(),
    };
    let mut seed = Vec::new();
    if !search.assign(0, 0, &mut seed) || !search.solve() {
        return None;
    }
    let map = search.map;
    for x in 0..n {
        for y in 0..n {
            assert_eq!(
                map[q1.mul(x, y)],
                q2.mul(map[x], map[y]),
                "isomorphism witness failed verification"
            );
        }
    }
    Some(map)
}

/// Relabels a table by a permutation with perm[0] = 0.
pub fn relabel(q: &LoopTable, perm: &[usize]) -> LoopTable {
    let n = q.order();
    assert_eq!(perm[0], 0, "relabeling must preserve the identity position");
    let mut inv = vec![0usize; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let mut flat = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            flat[x * n + y] = perm[q.mul(inv[x], inv[y])] as u16;
        }
    }
    LoopTable::from_flat(n, flat).expect("relabeling preserves the loop property")
}
