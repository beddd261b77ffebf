//! Master equation restricted to states invariant under relabelling atoms.
//!
//! If H, the set of collapse operators and ρ(0) are unchanged by every
//! permutation π of identical atoms, then ρ(t)[πa, πb] = ρ(t)[a, b] for all
//! t. Index pairs (a, b) fall into orbits under simultaneous permutation and
//! the generator is assembled as a sparse matrix acting on one complex value
//! per orbit. For three six-level atoms this is 8436 unknowns instead of
//! 46656.

use std::collections::HashMap;

use faer::Mat;

use super::generator::{MasterEquation, OdeSystem};
use crate::opalg::{CsrMatrix, Operator};
use crate::{Error, Result, C64};

/// Relative tolerance of the invariance checks.
const INVARIANCE_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct SymmetricGenerator {
    dims: Vec<usize>,
    d: usize,
    /// Orbit of the pair (a, b) at `a·d + b`.
    orbit_of: Vec<u32>,
    sizes: Vec<u32>,
    /// Stored unknown of each orbit, and whether it holds the conjugate.
    slot_of: Vec<u32>,
    conj_of: Vec<bool>,
    slots: usize,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    /// Index into `blocks`; the generator has few distinct coefficients and
    /// the compact form keeps the whole operator in cache.
    block: Vec<u16>,
    /// Row-major real 2×2 blocks.
    blocks: Vec<[f64; 4]>,
    spectral_bound: f64,
}

/// Basis-index maps of every permutation of the subsystems.
fn site_permutations(dims: &[usize]) -> Vec<Vec<usize>> {
    let n = dims.len();
    let d: usize = dims.iter().product();
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let digits = |mut i: usize| {
        let mut out = vec![0; n];
        for s in (0..n).rev() {
            out[s] = i % dims[s];
            i /= dims[s];
        }
        out
    };
    perms
        .iter()
        .map(|p| {
            (0..d)
                .map(|i| {
                    let src = digits(i);
                    p.iter().fold(0, |acc, &s| acc * dims[s] + src[s])
                })
                .collect()
        })
        .collect()
}

fn permuted(op: &CsrMatrix, map: &[usize]) -> CsrMatrix {
    let t: Vec<_> = op.iter().map(|(r, c, v)| (map[r], map[c], v)).collect();
    CsrMatrix::from_triplets(op.nrows(), op.ncols(), &t)
}

fn close(a: &CsrMatrix, b: &CsrMatrix) -> bool {
    let scale = a.iter().map(|(_, _, v)| v.norm()).fold(1.0, f64::max);
    a.add(&b.map_values(|v| -v))
        .iter()
        .all(|(_, _, v)| v.norm() <= INVARIANCE_TOL * scale)
}

pub(crate) fn max_row_abs_sum(m: &CsrMatrix) -> f64 {
    (0..m.nrows())
        .map(|r| m.row(r).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl SymmetricGenerator {
    /// `None` unless all subsystems are alike and H and the collapse set are
    /// invariant under exchanging them.
    pub fn new(h: &Operator, collapse: &[Operator]) -> Result<Option<Self>> {
        let dims = h.dims().to_vec();
        let d = h.dim();
        if dims.len() < 2 || dims.iter().any(|&x| x != dims[0]) {
            return Ok(None);
        }
        for l in collapse {
            if l.dims() != h.dims() {
                return Err(Error::DimensionMismatch {
                    context: "collapse operator",
                    expected: d,
                    found: l.dim(),
                });
            }
        }
        let hs = h.to_sparse();
        let ls: Vec<CsrMatrix> = collapse.iter().map(|l| l.to_sparse()).collect();
        let perms = site_permutations(&dims);
        for map in &perms {
            if !close(&permuted(&hs, map), &hs) {
                return Ok(None);
            }
            for l in &ls {
                let pl = permuted(l, map);
                if !ls.iter().any(|m| close(&pl, m)) {
                    return Ok(None);
                }
            }
        }

        let mut orbit_of = vec![u32::MAX; d * d];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for p in 0..d * d {
            if orbit_of[p] != u32::MAX {
                continue;
            }
            let o = reps.len() as u32;
            let (a, b) = (p / d, p % d);
            let mut size = 0;
            for map in &perms {
                let q = map[a] * d + map[b];
                if orbit_of[q] == u32::MAX {
                    orbit_of[q] = o;
                    size += 1;
                }
            }
            reps.push(p);
            sizes.push(size);
        }

        // Hermiticity pairs the orbit of (a, b) with that of (b, a); only the
        // member with the smaller id is stored.
        let mut slot_of = vec![u32::MAX; reps.len()];
        let mut conj_of = vec![false; reps.len()];
        let mut stored = Vec::new();
        for (o, &p) in reps.iter().enumerate() {
            let t = orbit_of[(p % d) * d + p / d] as usize;
            if o <= t {
                slot_of[o] = stored.len() as u32;
                stored.push(o);
            } else {
                slot_of[o] = slot_of[t];
                conj_of[o] = true;
            }
        }

        let mut gamma = CsrMatrix::zeros(d, d);
        for l in &ls {
            gamma = gamma.add(&l.adjoint().matmul(l));
        }
        let k = hs
            .map_values(|v| C64::new(0.0, -1.0) * v)
            .add(&gamma.map_values(|v| v * -0.5));
        let lrows: Vec<Vec<Vec<(usize, C64)>>> = ls
            .iter()
            .map(|l| (0..d).map(|r| l.row(r).collect()).collect())
            .collect();

        // dρ_ab = Σ_k K_ak ρ_kb + Σ_k ρ_ak conj(K_bk) + Σ_L Σ_kl L_ak ρ_kl conj(L_bl),
        // with each complex coefficient turned into a real 2×2 block acting on
        // (Re, Im) of the stored slot, conjugated where the slot stores ρ_lk.
        let zero = [0.0; 4];
        let mut acc = vec![zero; stored.len()];
        let mut touched: Vec<u32> = Vec::new();
        let add = |acc: &mut Vec<[f64; 4]>, touched: &mut Vec<u32>, q: usize, v: C64| {
            let o = orbit_of[q] as usize;
            let s = slot_of[o];
            let blk = &mut acc[s as usize];
            if *blk == zero {
                touched.push(s);
            }
            let m = if conj_of[o] {
                [v.re, v.im, v.im, -v.re]
            } else {
                [v.re, -v.im, v.im, v.re]
            };
            for (x, y) in blk.iter_mut().zip(m) {
                *x += y;
            }
        };
        let (mut row_ptr, mut col, mut block) = (vec![0], Vec::new(), Vec::new());
        let mut blocks: Vec<[f64; 4]> = Vec::new();
        let mut block_index: HashMap<[u64; 4], u16> = HashMap::new();
        for &o in &stored {
            let p = reps[o];
            let (a, b) = (p / d, p % d);
            for (kk, v) in k.row(a) {
                add(&mut acc, &mut touched, kk * d + b, v);
            }
            for (kk, v) in k.row(b) {
                add(&mut acc, &mut touched, a * d + kk, v.conj());
            }
            for rows in &lrows {
                for &(kk, x) in &rows[a] {
                    for &(ll, y) in &rows[b] {
                        add(&mut acc, &mut touched, kk * d + ll, x * y.conj());
                    }
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &s in &touched {
                let m = std::mem::replace(&mut acc[s as usize], zero);
                if m == zero {
                    continue;
                }
                let key = m.map(f64::to_bits);
                let idx = match block_index.get(&key) {
                    Some(&i) => i,
                    None => {
                        let Ok(i) = u16::try_from(blocks.len()) else {
                            return Ok(None);
                        };
                        blocks.push(m);
                        block_index.insert(key, i);
                        i
                    }
                };
                col.push(s);
                block.push(idx);
            }
            touched.clear();
            row_ptr.push(col.len());
        }

        Ok(Some(SymmetricGenerator {
            spectral_bound: 2.0 * max_row_abs_sum(&hs) + max_row_abs_sum(&gamma),
            dims,
            d,
            orbit_of,
            sizes,
            slot_of,
            conj_of,
            slots: stored.len(),
            row_ptr,
            col,
            block,
            blocks,
        }))
    }

    /// Number of stored complex unknowns.
    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Number of orbits of index pairs.
    pub fn orbits(&self) -> usize {
        self.sizes.len()
    }

    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    /// Distinct 2×2 coefficient blocks.
    pub fn distinct_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Whether ρ takes one value on every orbit.
    pub fn is_invariant(&self, rho: &Mat<C64>) -> bool {
        let d = self.d;
        if rho.nrows() != d || rho.ncols() != d {
            return false;
        }
        let scale = (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .map(|(a, b)| rho[(a, b)].norm())
            .fold(1.0, f64::max);
        let mut first = vec![None; self.orbits()];
        for a in 0..d {
            for b in 0..d {
                let o = self.orbit_of[a * d + b] as usize;
                let v = rho[(a, b)];
                match first[o] {
                    None => first[o] = Some(v),
                    Some(w) if (v - w).norm() > INVARIANCE_TOL * scale => return false,
                    Some(_) => {}
                }
            }
        }
        true
    }
}

impl OdeSystem for SymmetricGenerator {
    fn len(&self) -> usize {
        2 * self.slots
    }

    /// `y` holds interleaved (Re, Im) pairs, one per stored slot.
    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.slots;
        assert_eq!(y.len(), 2 * n);
        assert_eq!(dy.len(), 2 * n);
        let blocks = &self.blocks;
        for r in 0..n {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let cols = &self.col[lo..hi];
            let idx = &self.block[lo..hi];
            // two independent accumulators hide the add latency
            let (mut ar, mut ai, mut br, mut bi) = (0.0, 0.0, 0.0, 0.0);
            let mut e = 0;
            while e + 1 < cols.len() {
                let (c0, c1) = (2 * cols[e] as usize, 2 * cols[e + 1] as usize);
                let (m0, m1) = (blocks[idx[e] as usize], blocks[idx[e + 1] as usize]);
                ar += m0[0] * y[c0] + m0[1] * y[c0 + 1];
                ai += m0[2] * y[c0] + m0[3] * y[c0 + 1];
                br += m1[0] * y[c1] + m1[1] * y[c1 + 1];
                bi += m1[2] * y[c1] + m1[3] * y[c1 + 1];
                e += 2;
            }
            if e < cols.len() {
                let c = 2 * cols[e] as usize;
                let m = blocks[idx[e] as usize];
                ar += m[0] * y[c] + m[1] * y[c + 1];
                ai += m[2] * y[c] + m[3] * y[c + 1];
            }
            dy[2 * r] = ar + br;
            dy[2 * r + 1] = ai + bi;
        }
    }
}

impl MasterEquation for SymmetricGenerator {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn spectral_bound(&self) -> f64 {
        self.spectral_bound
    }

    /// Orbit averages of the Hermitian part of ρ.
    fn pack_state(&self, rho: &Mat<C64>) -> Vec<f64> {
        let d = self.d;
        let mut y = vec![0.0; 2 * self.slots];
        for a in 0..d {
            for b in 0..d {
                let o = self.orbit_of[a * d + b] as usize;
                let s = self.slot_of[o] as usize;
                // each slot collects its orbit and the transposed one
                let w = 0.5 / self.sizes[o] as f64;
                let v = if self.conj_of[o] {
                    rho[(a, b)].conj()
                } else {
                    rho[(a, b)]
                };
                let t = self.orbit_of[b * d + a] as usize;
                let w = if t == o { 2.0 * w } else { w };
                y[2 * s] += w * v.re;
                y[2 * s + 1] += w * v.im;
            }
        }
        y
    }

    fn unpack_state(&self, y: &[f64]) -> Mat<C64> {
        let d = self.d;
        Mat::from_fn(d, d, |a, b| {
            let o = self.orbit_of[a * d + b] as usize;
            let s = self.slot_of[o] as usize;
            let v = C64::new(y[2 * s], y[2 * s + 1]);
            if self.conj_of[o] {
                v.conj()
            } else {
                v
            }
        })
    }

    fn symmetry_reduced(&self) -> bool {
        true
    }
}
