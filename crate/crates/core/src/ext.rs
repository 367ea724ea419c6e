//! Nuclear extensions: loops K x_{theta,phi} F with abelian kernel K inside
//! the nucleus, decomposition of such loops back into (action, cocycle)
//! data, and the named cocycles over F2 x D8.

use crate::error::{Error, Result};
use crate::table::{elementary_abelian_2, LoopTable, SubloopMask};

/// Data for a nuclear extension: an abelian kernel (as a group table), a
/// factor loop, an action of the factor on the kernel, and a normalized
/// cocycle.
pub struct ExtensionData {
    /// abelian group table on kernel indices, identity 0
    pub kernel: LoopTable,
    pub factor: LoopTable,
    /// action[x][a] = phi_x(a)
    pub action: Vec<Vec<u16>>,
    /// cocycle[x * |F| + y], a kernel index
    pub cocycle: Vec<u16>,
}

impl ExtensionData {
    pub fn validate(&self) -> Result<()> {
        let k = self.kernel.order();
        let f = self.factor.order();
        if !self.kernel.is_associative() || !self.kernel.is_commutative() {
            return Err(Error::BadAction("kernel is not an abelian group".into()));
        }
        if self.action.len() != f {
            return Err(Error::BadAction("action table has wrong length".into()));
        }
        for (x, phi) in self.action.iter().enumerate() {
            if phi.len() != k {
                return Err(Error::BadAction(format!("phi_{x} has wrong length")));
            }
            let mut seen = vec![false; k];
            for &v in phi {
                if v as usize >= k || seen[v as usize] {
                    return Err(Error::BadAction(format!("phi_{x} is not a bijection")));
                }
                seen[v as usize] = true;
            }
            // automorphism of the kernel
            for a in 0..k {
                for b in 0..k {
                    let lhs = phi[self.kernel.mul(a, b)] as usize;
                    let rhs = self.kernel.mul(phi[a] as usize, phi[b] as usize);
                    if lhs != rhs {
                        return Err(Error::BadAction(format!("phi_{x} is not an automorphism")));
                    }
                }
            }
        }
        if self.action[0].iter().enumerate().any(|(a, &v)| a != v as usize) {
            return Err(Error::BadAction("phi_1 is not the identity".into()));
        }
        // homomorphism F -> Aut K
        for x in 0..f {
            for y in 0..f {
                let xy = self.factor.mul(x, y);
                for a in 0..k {
                    let lhs = self.action[xy][a] as usize;
                    let rhs = self.action[x][self.action[y][a] as usize] as usize;
                    if lhs != rhs {
                        return Err(Error::BadAction(format!(
                            "phi_({x}*{y}) != phi_{x} phi_{y}"
                        )));
                    }
                }
            }
        }
        if self.cocycle.len() != f * f {
            return Err(Error::BadCocycle("cocycle table has wrong length".into()));
        }
        for x in 0..f {
            if self.cocycle[x * f] != 0 || self.cocycle[x] != 0 {
                return Err(Error::BadCocycle(format!("theta not normalized at {x}")));
            }
            for y in 0..f {
                if self.cocycle[x * f + y] as usize >= k {
                    return Err(Error::BadCocycle("cocycle value out of range".into()));
                }
            }
        }
        Ok(())
    }

    /// The loop K x_{theta,phi} F on K x F, with (a,x) at index x*|K| + a.
    /// Verifies that K x {1} lies in the nucleus and is normal.
    pub fn extension(&self) -> Result<LoopTable> {
        self.validate()?;
        let k = self.kernel.order();
        let f = self.factor.order();
        let n = k * f;
        let mut table = vec![0u16; n * n];
        for x in 0..f {
            for a in 0..k {
                let row = x * k + a;
                for y in 0..f {
                    let theta = self.cocycle[x * f + y] as usize;
                    let xy = self.factor.mul(x, y);
                    for b in 0..k {
                        let c = self.kernel.mul(self.kernel.mul(a, self.action[x][b] as usize), theta);
                        table[row * n + (y * k + b)] = (xy * k + c) as u16;
                    }
                }
            }
        }
        let q = LoopTable::from_flat(n, table)?;
        let kmask = self.kernel_mask();
        assert!(in_nucleus(&q, &kmask), "kernel not in nucleus of extension");
        assert!(q.is_normal(&kmask), "kernel not normal in extension");
        Ok(q)
    }

    /// The kernel K x {1} as a subset of the extension.
    pub fn kernel_mask(&self) -> SubloopMask {
        let k = self.kernel.order();
        let members: Vec<usize> = (0..k).collect();
        SubloopMask::from_members(k * self.factor.order(), &members)
    }
}

/// Whether every element of S associates in all three positions.
fn in_nucleus(q: &LoopTable, s: &SubloopMask) -> bool {
    let n = q.order();
    for a in s.iter() {
        for y in 0..n {
            for z in 0..n {
                if q.mul(q.mul(a, y), z) != q.mul(a, q.mul(y, z))
                    || q.mul(q.mul(y, a), z) != q.mul(y, q.mul(a, z))
                    || q.mul(q.mul(y, z), a) != q.mul(y, q.mul(z, a))
                {
                    return false;
                }
            }
        }
    }
    true
}

/// An F2-linear map given by the images of the basis vectors.
#[derive(Clone)]
pub struct F2Matrix {
    pub rank: usize,
    pub cols: Vec<u16>,
}

impl F2Matrix {
    pub fn identity(rank: usize) -> F2Matrix {
        F2Matrix { rank, cols: (0..rank).map(|i| 1 << i).collect() }
    }

    pub fn apply(&self, v: usize) -> usize {
        let mut out = 0usize;
        for i in 0..self.rank {
            if v >> i & 1 == 1 {
                out ^= self.cols[i] as usize;
            }
        }
        out
    }

    pub fn to_table(&self) -> Vec<u16> {
        (0..1usize << self.rank).map(|v| self.apply(v) as u16).collect()
    }
}

// ---------------------------------------------------------------------------
// The dihedral group D8 in the normal form rho^{2i} sigma^j (sigma rho)^k,
// and the factor group F = F2 x D8 used by the theta_t family.
// ---------------------------------------------------------------------------

/// (i,j,k) -> (a,b) with the element written as rho^a sigma^b.
fn d8_normal_to_ab(i: usize, j: usize, k: usize) -> (usize, usize) {
    // sigma^j (sigma rho)^k as rho^a sigma^b
    let (a0, b) = match (j, k) {
        (0, 0) => (0, 0),
        (1, 0) => (0, 1),
        (0, 1) => (3, 1), // sigma rho = rho^3 sigma
        (1, 1) => (1, 0), // sigma * sigma rho = rho
        _ => unreachable!(),
    };
    ((2 * i + a0) % 4, b)
}

fn d8_ab_to_normal(a: usize, b: usize) -> (usize, usize, usize) {
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                if d8_normal_to_ab(i, j, k) == (a, b) {
                    return (i, j, k);
                }
            }
        }
    }
    unreachable!()
}

/// D8 product in normal-form coordinates.
pub fn d8_mul(x: (usize, usize, usize), y: (usize, usize, usize)) -> (usize, usize, usize) {
    let (a1, b1) = d8_normal_to_ab(x.0, x.1, x.2);
    let (a2, b2) = d8_normal_to_ab(y.0, y.1, y.2);
    // rho^a1 sigma^b1 rho^a2 sigma^b2 = rho^(a1 + (-1)^b1 a2) sigma^(b1+b2)
    let a = if b1 == 1 { (a1 + 4 - a2 % 4) % 4 } else { (a1 + a2) % 4 };
    d8_ab_to_normal(a, (b1 + b2) % 2)
}

/// Index of (l, i, j, k) in F = F2 x D8: l*8 + i*4 + j*2 + k.
pub fn f2d8_index(l: usize, i: usize, j: usize, k: usize) -> usize {
    l * 8 + i * 4 + j * 2 + k
}

pub fn f2d8_unindex(idx: usize) -> (usize, usize, usize, usize) {
    (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1)
}

/// Multiplication table of F = F2 x D8 (order 16, identity first).
pub fn f2d8_table() -> LoopTable {
    let mut raw = vec![vec![0usize; 16]; 16];
    for x in 0..16 {
        let (l1, i1, j1, k1) = f2d8_unindex(x);
        for y in 0..16 {
            let (l2, i2, j2, k2) = f2d8_unindex(y);
            let (i, j, k) = d8_mul((i1, j1, k1), (i2, j2, k2));
            raw[x][y] = f2d8_index((l1 + l2) % 2, i, j, k);
        }
    }
    LoopTable::validate(&raw).unwrap()
}

/// The action of F2 x D8 on K = F2^3 used throughout the theta family:
/// phi_{(l, rho^{2i} sigma^j (sigma rho)^k)}(a,b,c) = (a + k*b + j*c, b, c).
/// Kernel vectors (a,b,c) are indexed a*4 + b*2 + c.
pub fn f2d8_action() -> Vec<Vec<u16>> {
    (0..16)
        .map(|x| {
            let (_, _, j, k) = f2d8_unindex(x);
            (0..8u16)
                .map(|v| {
                    let (a, b, c) = (v as usize >> 2 & 1, v as usize >> 1 & 1, v as usize & 1);
                    (((a + k * b + j * c) % 2) * 4 + b * 2 + c) as u16
                })
                .collect()
        })
        .collect()
}

/// The loop (or group) K x_{theta_t, phi} F for 0 <= t <= 127.
pub fn build_theta_t(t: usize) -> LoopTable {
    assert!(t < 128);
    let tb: Vec<usize> = (0..7).map(|b| t >> b & 1).collect();
    let factor = f2d8_table();
    let mut cocycle = vec![0u16; 16 * 16];
    for x in 0..16 {
        let (_, i, j, k) = f2d8_unindex(x);
        for y in 0..16 {
            let (l2, _, _, _) = f2d8_unindex(y);
            let first = (tb[0] * i
                + tb[1] * j
                + tb[2] * i * j
                + tb[3] * k
                + tb[4] * i * k
                + tb[5] * j * k
                + tb[6] * i * j * k)
                % 2;
            cocycle[x * 16 + y] = (l2 * (first * 4 + j * 2 + k)) as u16;
        }
    }
    let data = ExtensionData {
        kernel: elementary_abelian_2(3),
        factor,
        action: f2d8_action(),
        cocycle,
    };
    data.extension().unwrap()
}

/// The loop from the cocycle theta'' = (l'(i + (k+k')j), l'j, l'k), which is
/// isomorphic neither to C nor to Cbar.
pub fn build_theta_doubleprime() -> LoopTable {
    let factor = f2d8_table();
    let mut cocycle = vec![0u16; 16 * 16];
    for x in 0..16 {
        let (_, i, j, k) = f2d8_unindex(x);
        for y in 0..16 {
            let (l2, _, _, k2) = f2d8_unindex(y);
            let first = (i + (k + k2) * j) % 2;
            cocycle[x * 16 + y] = (l2 * (first * 4 + j * 2 + k)) as u16;
        }
    }
    let data = ExtensionData {
        kernel: elementary_abelian_2(3),
        factor,
        action: f2d8_action(),
        cocycle,
    };
    data.extension().unwrap()
}

/// Cbar, built from the simplest cocycle theta_1 = (l'i, l'j, l'k).
pub fn build_cbar() -> LoopTable {
    build_theta_t(1)
}

/// The group Gbar = K x_{theta,phi} F with theta derived from the D8
/// crosshomomorphism (t = 42).
pub fn build_gbar() -> LoopTable {
    build_theta_t(42)
}

// ---------------------------------------------------------------------------
// The loop C as a nuclear extension of an elementary abelian group of order
// 16 by an elementary abelian group of order 8.
// ---------------------------------------------------------------------------

/// Kernel constants for C and the power-associative loop of order 64:
/// basis a1..a4 as bits 0..3, a = a1 a2 a3, b = a4.
const KA: u16 = 0b0111;
const KB: u16 = 0b1000;

pub fn build_c_data() -> ExtensionData {
    let kernel = elementary_abelian_2(4);
    let factor = elementary_abelian_2(3);
    // phi(x_i): a_i -> a_i a b, a_4 -> a1 a2 a3, others fixed.
    let gens: Vec<F2Matrix> = (0..3)
        .map(|i| {
            let mut cols: Vec<u16> = (0..4).map(|j| 1 << j).collect();
            cols[i] ^= KA ^ KB;
            cols[3] = KA;
            F2Matrix { rank: 4, cols }
        })
        .collect();
    let action: Vec<Vec<u16>> = (0..8usize)
        .map(|x| {
            let mut m = F2Matrix::identity(4);
            for (i, g) in gens.iter().enumerate() {
                if x >> i & 1 == 1 {
                    m = F2Matrix { rank: 4, cols: g.cols.iter().map(|&c| m.apply(c as usize) as u16).collect() };
                }
            }
            m.to_table()
        })
        .collect();
    // The 8x8 cocycle table, rows/columns ordered 1, x1, x2, x1x2, x3,
    // x1x3, x2x3, x1x2x3.
    const A: u16 = KA;
    const B: u16 = KB;
    const A1: u16 = 1;
    const A2: u16 = 2;
    const A3: u16 = 4;
    #[rustfmt::skip]
    let theta: [[u16; 8]; 8] = [
        [0, 0,      0, 0,      0,        0,         0,          0],
        [0, 0,      0, 0,      A2,       A2,        A^B^A2,     A^B^A2],
        [0, A3,     0, A3,     A1,       A^A2,      A1,         A^A2],
        [0, A3,     0, A3,     A^A3,     A,         A3^B,       B],
        [0, 0,      0, 0,      0,        0,         0,          0],
        [0, 0,      0, 0,      A2,       A2,        A^B^A2,     A^B^A2],
        [0, A^B^A3, 0, A^B^A3, A1,       A2^B,      A1,         A2^B],
        [0, A^B^A3, 0, A^B^A3, A^A3,     B,         A3^B,       A],
    ];
    let mut cocycle = vec![0u16; 64];
    for x in 0..8 {
        for y in 0..8 {
            cocycle[x * 8 + y] = theta[x][y];
        }
    }
    ExtensionData { kernel, factor, action, cocycle }
}

/// Csorgo's loop C, order 128.
pub fn build_c() -> LoopTable {
    build_c_data().extension().unwrap()
}

/// The nonassociative power-associative loop of order 64 that is the union
/// of its nuclei.
pub fn build_pa64() -> LoopTable {
    let kernel = elementary_abelian_2(4);
    let factor = elementary_abelian_2(2);
    // phi(x_i): fixes a, b, a_i; the other two of a1,a2,a3 pick up a*b.
    let gens: Vec<F2Matrix> = (0..2)
        .map(|i| {
            let mut cols: Vec<u16> = (0..4).map(|j| 1 << j).collect();
            for j in 0..3 {
                if j != i {
                    cols[j] ^= KA ^ KB;
                }
            }
            F2Matrix { rank: 4, cols }
        })
        .collect();
    let action: Vec<Vec<u16>> = (0..4usize)
        .map(|x| {
            let mut m = F2Matrix::identity(4);
            for (i, g) in gens.iter().enumerate() {
                if x >> i & 1 == 1 {
                    m = F2Matrix { rank: 4, cols: g.cols.iter().map(|&c| m.apply(c as usize) as u16).collect() };
                }
            }
            m.to_table()
        })
        .collect();
    const A: u16 = KA;
    const B: u16 = KB;
    #[rustfmt::skip]
    let theta: [[u16; 4]; 4] = [
        [0, 0,       0,     0],
        [0, 1,       2 ^ B, 4],
        [0, A^B^2,   2,     0],
        [0, A^4,     A,     4],
    ];
    let mut cocycle = vec![0u16; 16];
    for x in 0..4 {
        for y in 0..4 {
            cocycle[x * 4 + y] = theta[x][y];
        }
    }
    let data = ExtensionData { kernel, factor, action, cocycle };
    data.extension().unwrap()
}

// ---------------------------------------------------------------------------
// Crosshomomorphisms
// ---------------------------------------------------------------------------

/// gamma(xy) == gamma(x) + phi_x(gamma(y)) over the whole domain, with
/// kernel addition being xor on indices.
pub fn is_crosshomomorphism(domain: &LoopTable, phi: &[Vec<u16>], gamma: &[u16]) -> bool {
    let n = domain.order();
    if gamma[0] != 0 {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            let lhs = gamma[domain.mul(x, y)];
            let rhs = gamma[x] ^ phi[x][gamma[y] as usize];
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Extension data over F = F1 x F2 from a map gamma: F2 -> K and a scalar
/// action psi of F1, via theta((x1,x2),(y1,y2)) = psi_{y1}(gamma(x2)).
/// The kernel is F2^rank with xor addition; phi_{(x1,x2)} = phi_{x2}.
pub fn cocycle_from_crosshom(
    kernel_rank: usize,
    f1: &LoopTable,
    f2: &LoopTable,
    psi: &[Vec<u16>],
    phi: &[Vec<u16>],
    gamma: &[u16],
) -> Result<ExtensionData> {
    let k = 1usize << kernel_rank;
    for sx in psi {
        for py in phi {
            for a in 0..k {
                if sx[py[a] as usize] != py[sx[a] as usize] {
                    return Err(Error::ActionsDoNotCommute);
                }
            }
        }
    }
    if gamma[0] != 0 {
        return Err(Error::BadCocycle("gamma(1) != 0".into()));
    }
    let n1 = f1.order();
    let n2 = f2.order();
    let f = n1 * n2;
    // (x1, x2) at index x1*|F2| + x2
    let mut raw = vec![vec![0usize; f]; f];
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            for y1 in 0..n1 {
                for y2 in 0..n2 {
                    raw[x1 * n2 + x2][y1 * n2 + y2] = f1.mul(x1, y1) * n2 + f2.mul(x2, y2);
                }
            }
        }
    }
    let factor = LoopTable::validate(&raw)?;
    let action: Vec<Vec<u16>> = (0..f).map(|x| phi[x % n2].clone()).collect();
    let mut cocycle = vec![0u16; f * f];
    for x in 0..f {
        let x2 = x % n2;
        for y in 0..f {
            let y1 = y / n2;
            cocycle[x * f + y] = psi[y1][gamma[x2] as usize];
        }
    }
    Ok(ExtensionData { kernel: elementary_abelian_2(kernel_rank), factor, action, cocycle })
}

/// The V4 action on K = F2^3 of Lemma "V4": kernel vectors (a0,a1,a2)
/// indexed a0*4 + a1*2 + a2; V4 elements b1^c1 b2^c2 indexed c1 + 2*c2.
pub fn v4_action() -> Vec<Vec<u16>> {
    (0..4usize)
        .map(|x| {
            let (c1, c2) = (x & 1, x >> 1 & 1);
            (0..8u16)
                .map(|v| {
                    let (a0, a1, a2) =
                        (v as usize >> 2 & 1, v as usize >> 1 & 1, v as usize & 1);
                    ((((a0 + c2 * a1 + c1 * a2) % 2) << 2) + (a1 << 1) + a2) as u16
                })
                .collect()
        })
        .collect()
}

/// The crosshomomorphism gamma(b1^c1 b2^c2) = (c1+c2+c1c2, c1, c2).
pub fn v4_gamma() -> Vec<u16> {
    (0..4usize)
        .map(|x| {
            let (c1, c2) = (x & 1, x >> 1 & 1);
            ((((c1 + c2 + c1 * c2) % 2) << 2) + (c1 << 1) + c2) as u16
        })
        .collect()
}

/// Scalar action of F1 = {0,1} on F2^rank: psi_0 = 0, psi_1 = id.
pub fn scalar_psi(rank: usize) -> Vec<Vec<u16>> {
    let k = 1usize << rank;
    vec![vec![0u16; k], (0..k as u16).collect()]
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

pub struct NuclearDecomposition {
    pub data: ExtensionData,
    /// kernel index -> element of the original loop
    pub kernel_elements: Vec<usize>,
    /// factor index -> chosen coset representative
    pub section: Vec<usize>,
    /// element -> factor index
    pub coset_of: Vec<usize>,
}

/// Recovers (phi, theta) from a loop with a normal abelian kernel inside the
/// nucleus, relative to a section map. With `section = None` the canonical
/// section (minimal element of each coset) is used.
pub fn decompose_nuclear(
    q: &LoopTable,
    kernel: &SubloopMask,
    section: Option<&[usize]>,
) -> Result<NuclearDecomposition> {
    if !kernel.is_subloop(q) {
        return Err(Error::KernelNotNormal);
    }
    if !q.is_normal(kernel) {
        return Err(Error::KernelNotNormal);
    }
    let kernel_elements: Vec<usize> = kernel.iter().collect();
    let kn = kernel_elements.len();
    let kindex: std::collections::HashMap<usize, usize> =
        kernel_elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // kernel must be an abelian group under the inherited product
    let mut kraw = vec![vec![0usize; kn]; kn];
    for (i, &a) in kernel_elements.iter().enumerate() {
        for (j, &b) in kernel_elements.iter().enumerate() {
            kraw[i][j] = *kindex.get(&q.mul(a, b)).ok_or(Error::KernelNotNormal)?;
        }
    }
    let ktable = LoopTable::validate(&kraw)?;
    if !ktable.is_associative() || !ktable.is_commutative() {
        return Err(Error::KernelNotNuclear);
    }
    if !in_nucleus(q, kernel) {
        return Err(Error::KernelNotNuclear);
    }
    let coset_of = q.coset_partition(kernel)?;
    let f = coset_of.iter().max().unwrap() + 1;
    let factor = q.quotient(kernel)?;
    let section: Vec<usize> = match section {
        Some(s) => {
            if s.len() != f || s[0] != 0 {
                return Err(Error::BadSection);
            }
            for (c, &rep) in s.iter().enumerate() {
                if coset_of[rep] != c {
                    return Err(Error::BadSection);
                }
            }
            s.to_vec()
        }
        None => {
            let mut s = vec![usize::MAX; f];
            for x in 0..q.order() {
                if s[coset_of[x]] == usize::MAX {
                    s[coset_of[x]] = x;
                }
            }
            s
        }
    };
    // phi_x = T_{l(x)} restricted to the kernel
    let mut action = Vec::with_capacity(f);
    for &lx in &section {
        let row: Result<Vec<u16>> = kernel_elements
            .iter()
            .map(|&b| {
                let img = q.inner_t(lx, b);
                kindex.get(&img).map(|&i| i as u16).ok_or(Error::KernelNotNormal)
            })
            .collect();
        action.push(row?);
    }
    // theta(x,y) from l(x) l(y) = theta(x,y) l(xy)
    let mut cocycle = vec![0u16; f * f];
    for x in 0..f {
        for y in 0..f {
            let prod = q.mul(section[x], section[y]);
            let theta = q.rdiv(section[factor.mul(x, y)], prod);
            cocycle[x * f + y] =
                *kindex.get(&theta).ok_or(Error::KernelNotNormal)? as u16;
        }
    }
    let data = ExtensionData { kernel: ktable, factor, action, cocycle };
    data.validate()?;
    Ok(NuclearDecomposition { data, kernel_elements, section, coset_of })
}

impl NuclearDecomposition {
    /// The explicit isomorphism u = a*l(x) -> (a,x) onto the reconstructed
    /// extension, verified to preserve all products.
    pub fn iso_to_extension(&self, q: &LoopTable) -> Vec<usize> {
        let kn = self.kernel_elements.len();
        let kindex: std::collections::HashMap<usize, usize> =
            self.kernel_elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let ext = self.data.extension().expect("validated data");
        let map: Vec<usize> = (0..q.order())
            .map(|u| {
                let x = self.coset_of[u];
                let a = q.rdiv(self.section[x], u);
                x * kn + kindex[&a]
            })
            .collect();
        for u in 0..q.order() {
            for v in 0..q.order() {
                assert_eq!(
                    map[q.mul(u, v)],
                    ext.mul(map[u], map[v]),
                    "decomposition round-trip failed to preserve products"
                );
            }
        }
        map
    }
}
