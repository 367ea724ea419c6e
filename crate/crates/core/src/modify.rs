//! Group modifications x*y = xy·mu(x,y): the chain Z <= K <= N <| G, the
//! conditions (C1)-(C3), synthesis of delta and mu from a symmetric trilinear
//! alternating form, the class-2 groups H of order 64, and the C(H,mu)
//! builder.

use crate::error::{Error, Result};
use crate::perm::inn_is_abelian;
use crate::table::{LoopTable, SubloopMask};

// ---------------------------------------------------------------------------
// The groups H of order 64 with H' = Z(H) and both H/H' and H' elementary
// abelian of order 8, in the normal form e1^{v1} e2^{v2} e3^{v3} m.
// ---------------------------------------------------------------------------

/// A class-2 group of order 64 given by a squaring vector: s[i] holds the
/// coordinates of e_{i+1}^2 in the commutator basis [e1,e2],[e1,e3],[e2,e3].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group64 {
    pub s: [u8; 3],
}

impl Group64 {
    pub fn new(s: [u8; 3]) -> Group64 {
        assert!(s.iter().all(|&si| si < 8));
        Group64 { s }
    }

    /// Element (v, m) at index v*8 + m; v = v1*4 + v2*2 + v3 and
    /// m = m12*4 + m13*2 + m23.
    pub fn index(v: usize, m: usize) -> usize {
        v * 8 + m
    }

    pub fn v_part(x: usize) -> usize {
        x >> 3
    }

    pub fn m_part(x: usize) -> usize {
        x & 7
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        let (v, m) = (x >> 3, x & 7);
        let (w, n) = (y >> 3, y & 7);
        let (v1, v2, v3) = (v >> 2 & 1, v >> 1 & 1, v & 1);
        let (w1, w2, w3) = (w >> 2 & 1, w >> 1 & 1, w & 1);
        let beta = (v2 & w1) << 2 | (v3 & w1) << 1 | (v3 & w2);
        let mut out = m ^ n ^ beta;
        if v1 & w1 == 1 {
            out ^= self.s[0] as usize;
        }
        if v2 & w2 == 1 {
            out ^= self.s[1] as usize;
        }
        if v3 & w3 == 1 {
            out ^= self.s[2] as usize;
        }
        (v ^ w) * 8 + out
    }

    /// The full multiplication table; associativity is verified by brute
    /// force over all 64^3 triples.
    pub fn table(&self) -> LoopTable {
        let raw: Vec<Vec<usize>> =
            (0..64).map(|x| (0..64).map(|y| self.mul(x, y)).collect()).collect();
        let t = LoopTable::validate(&raw).expect("normal form is a Latin square");
        assert!(t.is_associative(), "squaring vector yields nonassociative table");
        t
    }
}

pub const E1: usize = 32;
pub const E2: usize = 16;
pub const E3: usize = 8;
pub const M12: usize = 4;
pub const M13: usize = 2;
pub const M23: usize = 1;

/// All 512 squaring vectors.
pub fn all_group64() -> Vec<Group64> {
    let mut out = Vec::with_capacity(512);
    for s1 in 0..8u8 {
        for s2 in 0..8u8 {
            for s3 in 0..8u8 {
                out.push(Group64::new([s1, s2, s3]));
            }
        }
    }
    out
}

/// One isomorphism class among the 512 squaring vectors.
pub struct Group64Class {
    pub rep: Group64,
    pub table: LoopTable,
    pub members: Vec<[u8; 3]>,
    pub fingerprint: String,
}

/// Deduplicates the 512 squaring vectors into isomorphism classes, ordered
/// by their minimal squaring vector (so the class of s = 0 comes first).
pub fn group64_classes() -> Vec<Group64Class> {
    use rayon::prelude::*;
    use std::collections::BTreeMap;

    use crate::iso::{are_isomorphic, canonical_fingerprint};

    let groups = all_group64();
    let fps: Vec<(String, LoopTable)> = groups
        .par_iter()
        .map(|g| {
            let t = g.table();
            (canonical_fingerprint(&t), t)
        })
        .collect();
    let mut by_fp: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, (fp, _)) in fps.iter().enumerate() {
        by_fp.entry(fp.clone()).or_default().push(i);
    }
    let mut classes: Vec<Group64Class> = Vec::new();
    for (fp, idxs) in by_fp {
        // equal digests are candidates only; confirm against the first member
        let mut buckets: Vec<Vec<usize>> = Vec::new();
        for &i in &idxs {
            let mut placed = false;
            for b in buckets.iter_mut() {
                if are_isomorphic(&fps[b[0]].1, &fps[i].1).is_some() {
                    b.push(i);
                    placed = true;
                    break;
                }
            }
            if !placed {
                buckets.push(vec![i]);
            }
        }
        for b in buckets {
            classes.push(Group64Class {
                rep: groups[b[0]],
                table: fps[b[0]].1.clone(),
                members: b.iter().map(|&i| groups[i].s).collect(),
                fingerprint: fp.clone(),
            });
        }
    }
    classes.sort_by_key(|c| c.rep.s);
    classes
}

// ---------------------------------------------------------------------------
// Symmetric trilinear alternating forms on F2^3 (values in {1,-1}, stored as
// sign bits: true = -1).
// ---------------------------------------------------------------------------

/// A symmetric trilinear alternating form on a 3-dimensional F2 space is
/// determined by the single value f(e1,e2,e3); the nontrivial one is the
/// determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrilinearForm {
    pub nontrivial: bool,
}

impl TrilinearForm {
    /// Sign bit of f(u,v,w) for 3-bit vectors (bit 2 = first coordinate).
    pub fn eval(&self, u: usize, v: usize, w: usize) -> bool {
        self.nontrivial && det3(u, v, w)
    }
}

/// Determinant over F2 of the 3x3 matrix with rows u, v, w (bit 2 = column 1).
fn det3(u: usize, v: usize, w: usize) -> bool {
    let c = |x: usize, i: usize| x >> (2 - i) & 1;
    let mut d = 0;
    d ^= c(u, 0) & (c(v, 1) & c(w, 2) ^ c(v, 2) & c(w, 1));
    d ^= c(u, 1) & (c(v, 0) & c(w, 2) ^ c(v, 2) & c(w, 0));
    d ^= c(u, 2) & (c(v, 0) & c(w, 1) ^ c(v, 1) & c(w, 0));
    d == 1
}

// ---------------------------------------------------------------------------
// Free parameters for delta and mu.
// ---------------------------------------------------------------------------

/// The 21 + 7 free sign parameters: delta_bits indexes pairs (i,j) with
/// 1 < i < j <= 8 lexicographically, mu_bits indexes the diagonal values
/// mu(t_i, t_i) for i = 2..8. Bit 1 encodes the value -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaMuParams {
    pub delta_bits: u32,
    pub mu_bits: u8,
}

impl DeltaMuParams {
    pub const TRIVIAL: DeltaMuParams = DeltaMuParams { delta_bits: 0, mu_bits: 0 };

    pub fn new(delta_bits: u32, mu_bits: u8) -> DeltaMuParams {
        assert!(delta_bits < 1 << 21);
        assert!(mu_bits < 1 << 7);
        DeltaMuParams { delta_bits, mu_bits }
    }

    pub fn from_hex(delta: &str, mu: &str) -> Result<DeltaMuParams> {
        let d = u32::from_str_radix(delta, 16)
            .map_err(|e| Error::Parse(format!("bad delta hex: {e}")))?;
        let m = u8::from_str_radix(mu, 16)
            .map_err(|e| Error::Parse(format!("bad mu hex: {e}")))?;
        if d >= 1 << 21 {
            return Err(Error::Parse("delta parameter exceeds 21 bits".into()));
        }
        if m >= 1 << 7 {
            return Err(Error::Parse("mu parameter exceeds 7 bits".into()));
        }
        Ok(DeltaMuParams { delta_bits: d, mu_bits: m })
    }

    /// Position of the pair (i,j), 1 <= i < j <= 8 (1-based, i > 1), in the
    /// lexicographic enumeration of the 21 free pairs.
    pub fn pair_bit(i: usize, j: usize) -> usize {
        assert!(1 < i && i < j && j <= 8);
        let before: usize = (2..i).map(|a| 8 - a).sum();
        before + (j - i - 1)
    }

    fn delta_tt(&self, i: usize, j: usize) -> bool {
        // transversal signs: delta(t_1, t) = delta(t, t) = 1, antisymmetric
        // (order two, so the inverse has the same sign bit)
        if i == j || i == 1 || j == 1 {
            return false;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.delta_bits >> Self::pair_bit(a, b) & 1 == 1
    }

    fn mu_tt(&self, i: usize, j: usize) -> bool {
        if i == j {
            if i == 1 {
                false
            } else {
                self.mu_bits >> (i - 2) & 1 == 1
            }
        } else if i < j {
            self.delta_tt(i, j)
        } else {
            false
        }
    }
}

// ---------------------------------------------------------------------------
// delta and mu tables on H x H.
// ---------------------------------------------------------------------------

/// A 64x64 sign table (true = -1) on a Group64.
#[derive(Clone)]
pub struct SignTable {
    pub bits: Vec<bool>,
}

impl SignTable {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[x * 64 + y]
    }
}

/// delta(m, h) for m in M = H' and any h, forced by f via
/// delta([ei,ej], ek m) = f(ei,ej,ek) and linearity.
fn delta_mh(f: TrilinearForm, m: usize, h: usize) -> bool {
    if !f.nontrivial {
        return false;
    }
    let w = Group64::v_part(h);
    let (w1, w2, w3) = (w >> 2 & 1, w >> 1 & 1, w & 1);
    let (m12, m13, m23) = (m >> 2 & 1, m >> 1 & 1, m & 1);
    (m12 & w3 ^ m13 & w2 ^ m23 & w1) == 1
}

/// The map delta: H x H -> A from the form and the 21 free parameters, over
/// the canonical transversal t_{v+1} = (v, 0).
pub fn build_delta(f: TrilinearForm, params: DeltaMuParams) -> SignTable {
    let mut bits = vec![false; 64 * 64];
    for x in 0..64usize {
        let (v, m) = (Group64::v_part(x), Group64::m_part(x));
        for y in 0..64usize {
            let (w, m2) = (Group64::v_part(y), Group64::m_part(y));
            // delta(mt, m't') = delta(m,t') delta(m',t)^{-1} delta(t,t')
            let b = delta_mh(f, m, y & !7) ^ delta_mh(f, m2, x & !7)
                ^ params.delta_tt(v + 1, w + 1);
            bits[x * 64 + y] = b;
        }
    }
    SignTable { bits }
}

/// The map mu: H x H -> A with delta(u,v) = mu(u,v) mu(v,u)^{-1}, from the
/// same parameters: mu(mt, m't') = mu(m,t') mu(t,t').
pub fn build_mu(f: TrilinearForm, params: DeltaMuParams) -> SignTable {
    let mut bits = vec![false; 64 * 64];
    for x in 0..64usize {
        let (v, m) = (Group64::v_part(x), Group64::m_part(x));
        for y in 0..64usize {
            let w = Group64::v_part(y);
            bits[x * 64 + y] = delta_mh(f, m, y & !7) ^ params.mu_tt(v + 1, w + 1);
        }
    }
    SignTable { bits }
}

// ---------------------------------------------------------------------------
// ModificationContext: Z <= K <= N <| G with mu: (G/K)^2 -> Z.
// ---------------------------------------------------------------------------

pub struct ModificationContext {
    pub g: LoopTable,
    pub z: SubloopMask,
    pub k: SubloopMask,
    pub n: SubloopMask,
    /// element -> K-coset index (identity coset 0)
    pub coset_of_k: Vec<usize>,
    /// K-coset representatives (minimal elements)
    pub k_reps: Vec<usize>,
    /// mu on K-coset pairs, values are elements of Z
    mu_reps: Vec<u16>,
    inv: Vec<usize>,
}

impl ModificationContext {
    /// Validates the chain invariants and the normalization and
    /// well-definedness of mu. `mu` is a full |G| x |G| table of elements
    /// of Z.
    pub fn new(
        g: LoopTable,
        z: SubloopMask,
        k: SubloopMask,
        n: SubloopMask,
        mu: &[u16],
    ) -> Result<ModificationContext> {
        let order = g.order();
        if !g.is_associative() {
            return Err(Error::ChainViolation("G is not a group".into()));
        }
        for x in z.iter() {
            if !k.contains(x) {
                return Err(Error::ChainViolation("Z is not contained in K".into()));
            }
        }
        for x in k.iter() {
            if !n.contains(x) {
                return Err(Error::ChainViolation("K is not contained in N".into()));
            }
        }
        for s in [&z, &k, &n] {
            if !s.is_subloop(&g) {
                return Err(Error::ChainViolation("chain member is not a subgroup".into()));
            }
        }
        if !g.is_normal(&n) {
            return Err(Error::ChainViolation("N is not normal".into()));
        }
        if !g.is_normal(&k) {
            return Err(Error::ChainViolation("K is not normal".into()));
        }
        let nv: Vec<usize> = n.iter().collect();
        for &a in &nv {
            for &b in &nv {
                if g.mul(a, b) != g.mul(b, a) {
                    return Err(Error::ChainViolation("N is not abelian".into()));
                }
            }
        }
        if !g.quotient(&n)?.is_commutative() {
            return Err(Error::ChainViolation("G/N is not abelian".into()));
        }
        for a in z.iter() {
            for x in 0..order {
                if g.mul(a, x) != g.mul(x, a) {
                    return Err(Error::ChainViolation("Z is not central".into()));
                }
            }
        }
        let coset_of_k = g.coset_partition(&k)?;
        let nc = coset_of_k.iter().max().unwrap() + 1;
        let gk = g.quotient(&k)?;
        // N/K <= Z(G/K)
        for x in n.iter() {
            let xc = coset_of_k[x];
            for yc in 0..nc {
                if gk.mul(xc, yc) != gk.mul(yc, xc) {
                    return Err(Error::ChainViolation("N/K is not central in G/K".into()));
                }
            }
        }
        if mu.len() != order * order {
            return Err(Error::NotNormalizedMu);
        }
        let mut k_reps = vec![usize::MAX; nc];
        for x in 0..order {
            if k_reps[coset_of_k[x]] == usize::MAX {
                k_reps[coset_of_k[x]] = x;
            }
        }
        let mut mu_reps = vec![u16::MAX; nc * nc];
        for x in 0..order {
            for y in 0..order {
                let v = mu[x * order + y];
                if !z.contains(v as usize) {
                    return Err(Error::NotNormalizedMu);
                }
                let slot = &mut mu_reps[coset_of_k[x] * nc + coset_of_k[y]];
                if *slot == u16::MAX {
                    *slot = v;
                } else if *slot != v {
                    return Err(Error::NotNormalizedMu);
                }
            }
        }
        for c in 0..nc {
            if mu_reps[c * nc] != 0 || mu_reps[c] != 0 {
                return Err(Error::NotNormalizedMu);
            }
        }
        let inv = (0..order).map(|x| g.ldiv(x, 0)).collect();
        Ok(ModificationContext { g, z, k, n, coset_of_k, k_reps, mu_reps, inv })
    }

    pub fn ncosets(&self) -> usize {
        self.k_reps.len()
    }

    /// mu(xK, yK) as an element of Z.
    pub fn mu(&self, x: usize, y: usize) -> usize {
        self.mu_reps[self.coset_of_k[x] * self.ncosets() + self.coset_of_k[y]] as usize
    }

    fn mu_c(&self, xc: usize, yc: usize) -> usize {
        self.mu_reps[xc * self.ncosets() + yc] as usize
    }

    /// delta(x,y) = mu(x,y) mu(y,x)^{-1}.
    pub fn delta(&self, x: usize, y: usize) -> usize {
        self.g.mul(self.mu(x, y), self.inv[self.mu(y, x)])
    }

    /// Flips one mu entry (at the K-coset level) by a nontrivial element of
    /// Z; used by perturbation tests.
    pub fn perturb(&mut self, xc: usize, yc: usize, zval: usize) {
        assert!(self.z.contains(zval));
        let nc = self.ncosets();
        let old = self.mu_reps[xc * nc + yc] as usize;
        self.mu_reps[xc * nc + yc] = self.g.mul(old, zval) as u16;
    }

    /// The modified loop Q = (G, *) with x*y = xy mu(x,y). Verifies the loop
    /// property, Z <= Z(Q), and Q/Z = G/Z.
    pub fn modify(&self) -> Result<LoopTable> {
        let order = self.g.order();
        let mut flat = vec![0u16; order * order];
        for x in 0..order {
            for y in 0..order {
                flat[x * order + y] = self.g.mul(self.g.mul(x, y), self.mu(x, y)) as u16;
            }
        }
        let q = LoopTable::from_flat(order, flat)?;
        for a in self.z.iter() {
            for x in 0..order {
                assert_eq!(q.mul(a, x), q.mul(x, a), "Z not central in Q");
                for y in 0..order {
                    assert_eq!(
                        q.mul(q.mul(x, a), y),
                        q.mul(x, q.mul(a, y)),
                        "Z not nuclear in Q"
                    );
                }
            }
        }
        // mu takes values in Z, so the Z-coset structures agree and the two
        // quotient tables must be identical
        let qz = q.quotient(&self.z)?;
        let gz = self.g.quotient(&self.z)?;
        assert!(
            (0..qz.order()).all(|x| (0..qz.order()).all(|y| qz.mul(x, y) == gz.mul(x, y))),
            "Q/Z differs from G/Z"
        );
        Ok(q)
    }

    /// Exhaustive check of conditions (C1), (C2) over K-coset triples with a
    /// factor in N, and (C3) over all of G^3.
    pub fn check_conditions(&self) -> (bool, bool, bool) {
        let nc = self.ncosets();
        let g = &self.g;
        let mut in_n = vec![false; nc];
        for x in self.n.iter() {
            in_n[self.coset_of_k[x]] = true;
        }
        let cmul: Vec<usize> = (0..nc * nc)
            .map(|i| self.coset_of_k[g.mul(self.k_reps[i / nc], self.k_reps[i % nc])])
            .collect();
        let mut c1 = true;
        let mut c2 = true;
        'outer: for xc in 0..nc {
            for yc in 0..nc {
                for zc in 0..nc {
                    if !(in_n[xc] || in_n[yc] || in_n[zc]) {
                        continue;
                    }
                    if self.mu_c(cmul[xc * nc + yc], zc)
                        != g.mul(self.mu_c(xc, zc), self.mu_c(yc, zc))
                    {
                        c1 = false;
                    }
                    if self.mu_c(xc, cmul[yc * nc + zc])
                        != g.mul(self.mu_c(xc, yc), self.mu_c(xc, zc))
                    {
                        c2 = false;
                    }
                    if !c1 && !c2 {
                        break 'outer;
                    }
                }
            }
        }
        let order = g.order();
        let conj = |z: usize, w: usize| g.mul(self.inv[w], g.mul(z, w));
        let mut c3 = true;
        'c3: for x in 0..order {
            for y in 0..order {
                let yx = g.mul(y, x);
                let xy = g.mul(x, y);
                for z in 0..order {
                    let lhs = g.mul(conj(z, yx), self.delta(g.commutator(z, y), x));
                    let rhs = g.mul(conj(z, xy), self.delta(g.commutator(z, x), y));
                    if lhs != rhs {
                        c3 = false;
                        break 'c3;
                    }
                }
            }
        }
        (c1, c2, c3)
    }

    /// Validation harness for the equivalence "Inn Q abelian iff (C3)",
    /// given (C1) and (C2).
    pub fn inn_abelian_equivalence(&self) -> Result<bool> {
        let (c1, c2, c3) = self.check_conditions();
        if !(c1 && c2) {
            return Err(Error::PreconditionFailed("C1 and C2 do not hold".into()));
        }
        let q = self.modify()?;
        Ok(c3 == inn_is_abelian(&q))
    }

    /// The symmetric triadditive form f(xN, yN, zN) = delta([x,y], z) on
    /// (G/N)^3, defined when G has class 2 and Q class 3.
    pub fn extract_form(&self) -> Result<SymmetricForm> {
        let (c1, c2, c3) = self.check_conditions();
        if !(c1 && c2 && c3) {
            return Err(Error::PreconditionFailed("C1-C3 do not hold".into()));
        }
        let g = &self.g;
        if g.nilpotency_class() != Some(2) {
            return Err(Error::ClassMismatch("G is not of class 2".into()));
        }
        let q = self.modify()?;
        if q.nilpotency_class() != Some(3) {
            return Err(Error::ClassMismatch("Q is not of class 3".into()));
        }
        let coset_of = g.coset_partition(&self.n)?;
        let nc = coset_of.iter().max().unwrap() + 1;
        let order = g.order();
        let mut values = vec![u16::MAX; nc * nc * nc];
        for x in 0..order {
            for y in 0..order {
                let comm = g.commutator(x, y);
                for z in 0..order {
                    let v = self.delta(comm, z) as u16;
                    let slot =
                        &mut values[(coset_of[x] * nc + coset_of[y]) * nc + coset_of[z]];
                    if *slot == u16::MAX {
                        *slot = v;
                    } else {
                        assert_eq!(*slot, v, "form not constant on N-cosets");
                    }
                }
            }
        }
        let form = SymmetricForm { coset_of, ncosets: nc, values };
        form.verify(g)?;
        Ok(form)
    }
}

/// A symmetric triadditive form on (G/N)^3 with values in an exponent-2
/// subgroup of Z.
pub struct SymmetricForm {
    pub coset_of: Vec<usize>,
    pub ncosets: usize,
    pub values: Vec<u16>,
}

impl SymmetricForm {
    pub fn eval(&self, xc: usize, yc: usize, zc: usize) -> usize {
        self.values[(xc * self.ncosets + yc) * self.ncosets + zc] as usize
    }

    /// Symmetry, triadditivity, and exponent-2 values. The coset product
    /// table is recovered from `g`.
    fn verify(&self, g: &LoopTable) -> Result<()> {
        let nc = self.ncosets;
        let mut reps = vec![usize::MAX; nc];
        for x in 0..g.order() {
            if reps[self.coset_of[x]] == usize::MAX {
                reps[self.coset_of[x]] = x;
            }
        }
        let cmul =
            |a: usize, b: usize| self.coset_of[g.mul(reps[a], reps[b])];
        for a in 0..nc {
            for b in 0..nc {
                for c in 0..nc {
                    let v = self.eval(a, b, c);
                    if g.mul(v, v) != 0 {
                        return Err(Error::ClassMismatch("form value not of exponent 2".into()));
                    }
                    for (p, q, r) in
                        [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
                    {
                        if self.eval(p, q, r) != v {
                            return Err(Error::ClassMismatch("form not symmetric".into()));
                        }
                    }
                    for d in 0..nc {
                        let lhs = self.eval(cmul(a, d), b, c);
                        let rhs = g.mul(self.eval(a, b, c), self.eval(d, b, c));
                        if lhs != rhs {
                            return Err(Error::ClassMismatch("form not triadditive".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// C(H, mu): G = A x H of order 128.
// ---------------------------------------------------------------------------

/// The direct product A x H with (a, h) at index h*2 + a; A = {0, 1}.
pub fn a_cross_h(h: &Group64) -> LoopTable {
    let raw: Vec<Vec<usize>> = (0..128)
        .map(|x: usize| {
            (0..128).map(|y: usize| h.mul(x >> 1, y >> 1) * 2 + ((x ^ y) & 1)).collect()
        })
        .collect();
    LoopTable::validate(&raw).unwrap()
}

/// The modification context of C(H, mu): G = A x H, Z = K = A x 1,
/// N = A x H'.
pub fn chmu_context(
    h: &Group64,
    f: TrilinearForm,
    params: DeltaMuParams,
) -> Result<ModificationContext> {
    let g = a_cross_h(h);
    let z = SubloopMask::from_members(128, &[1]);
    let k = z.clone();
    let n = SubloopMask::from_members(128, &(0..16).collect::<Vec<_>>());
    let mu_signs = build_mu(f, params);
    let mut mu = vec![0u16; 128 * 128];
    for x in 0..128 {
        for y in 0..128 {
            mu[x * 128 + y] = mu_signs.get(x >> 1, y >> 1) as u16;
        }
    }
    ModificationContext::new(g, z, k, n, &mu)
}

/// The order-128 loop C(H, mu).
pub fn build_chmu(h: &Group64, f: TrilinearForm, params: DeltaMuParams) -> Result<LoopTable> {
    chmu_context(h, f, params)?.modify()
}

// ---------------------------------------------------------------------------
// Block modification (Figure-1 style).
// ---------------------------------------------------------------------------

/// Replaces xy by xy·h exactly on the selected (rowCoset, columnCoset)
/// blocks modulo K. `h` must be a central involution contained in K.
pub fn block_modify(
    q: &LoopTable,
    k: &SubloopMask,
    pattern: &[(usize, usize)],
    h: usize,
) -> Result<LoopTable> {
    if !k.is_subloop(q) || !q.is_normal(k) {
        return Err(Error::NotNormal);
    }
    if h == 0 || q.mul(h, h) != 0 || !k.contains(h) || !q.center().contains(h) {
        return Err(Error::NotCentralInvolution);
    }
    let coset_of = q.coset_partition(k)?;
    let nc = coset_of.iter().max().unwrap() + 1;
    let mut flip = vec![false; nc * nc];
    for &(i, j) in pattern {
        if i >= nc || j >= nc {
            return Err(Error::BadCosetStructure(format!("block ({i},{j}) out of range")));
        }
        flip[i * nc + j] = true;
    }
    let n = q.order();
    let mut flat = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut v = q.mul(x, y);
            if flip[coset_of[x] * nc + coset_of[y]] {
                v = q.mul(v, h);
            }
            flat[x * n + y] = v as u16;
        }
    }
    LoopTable::from_flat(n, flat)
}

/// The Figure-1 block pattern on Gbar modulo its kernel K: rows with i = 1,
/// columns with l' = 1 (F-coset indices l*8 + i*4 + j*2 + k).
pub fn figure1_pattern() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..16 {
        if r >> 2 & 1 == 1 {
            for c in 8..16 {
                out.push((r, c));
            }
        }
    }
    out
}
