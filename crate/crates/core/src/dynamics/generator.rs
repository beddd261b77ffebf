//! Matrix-free master-equation right-hand side.
//!
//! With K = -iH - ½Σ L†L the generator acting on a Hermitian ρ is
//! Kρ + (Kρ)† + Σ LρL†. States are held as `[Re ρ | Im ρ]`, each block D×D
//! row-major, so the integrators work on flat real vectors.
//!
//! The diagonal of K is applied elementwise, the off-diagonal part as sparse
//! rows against rows of ρ (four at a time), and the jump part as a list of
//! `out[a,b] += c·ρ[c,d]` terms merged into runs that are contiguous in both
//! indices.

use faer::Mat;

use super::symmetric::max_row_abs_sum;
use crate::model::{collapse_ops, hamiltonian, ModelSpec};
use crate::opalg::{CsrMatrix, DensityMatrix, Operator};
use crate::{Error, Result, C64};

/// A real-valued ODE y' = f(y).
pub trait OdeSystem {
    fn len(&self) -> usize;
    fn rhs(&self, y: &[f64], dy: &mut [f64]);
}

/// A master-equation generator on some real parametrization of ρ.
pub trait MasterEquation: OdeSystem {
    fn dims(&self) -> &[usize];
    /// Upper bound on the spectral radius, used by the RK4 step guard.
    fn spectral_bound(&self) -> f64;
    fn pack_state(&self, rho: &Mat<C64>) -> Vec<f64>;
    fn unpack_state(&self, y: &[f64]) -> Mat<C64>;
    /// True when only the permutation-invariant part of ρ is propagated.
    fn symmetry_reduced(&self) -> bool {
        false
    }
}

/// `out[o + k] += coef · ρ[s + k]` for `k < len`, flat row-major indices.
#[derive(Debug, Clone, Copy)]
struct JumpRun {
    out: u32,
    src: u32,
    len: u32,
    re: f64,
    im: f64,
}

const TILE: usize = 16;

#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    dims: Vec<usize>,
    d: usize,
    diag_re: Vec<f64>,
    diag_im: Vec<f64>,
    off_ptr: Vec<usize>,
    off_col: Vec<usize>,
    off_re: Vec<f64>,
    off_im: Vec<f64>,
    runs: Vec<JumpRun>,
    jump_terms: usize,
    h_row_sum: f64,
    gamma_max: f64,
    wide: bool,
}

fn jump_runs(collapse: &[CsrMatrix], d: usize) -> (Vec<JumpRun>, usize) {
    let mut terms: Vec<(usize, usize, C64)> = Vec::new();
    for ls in collapse {
        let entries: Vec<_> = ls.iter().collect();
        for &(a, c, x) in &entries {
            for &(b, dd, y) in &entries {
                terms.push((a * d + b, c * d + dd, x * y.conj()));
            }
        }
    }
    terms.sort_by_key(|t| (t.0, t.1));
    let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.0 == t.0 && last.1 == t.1 => last.2 += t.2,
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.2 != C64::new(0.0, 0.0));
    let count = merged.len();
    // terms sharing a coefficient and an out-src offset can form runs
    merged.sort_by_key(|&(o, s, c)| (c.re.to_bits(), c.im.to_bits(), o as i64 - s as i64, o));
    let mut runs: Vec<JumpRun> = Vec::new();
    for (o, s, c) in merged {
        if let Some(r) = runs.last_mut() {
            let n = r.len as usize;
            if r.out as usize + n == o && r.src as usize + n == s && r.re == c.re && r.im == c.im {
                r.len += 1;
                continue;
            }
        }
        runs.push(JumpRun {
            out: o as u32,
            src: s as u32,
            len: 1,
            re: c.re,
            im: c.im,
        });
    }
    runs.sort_by_key(|r| r.out);
    (runs, count)
}

impl LindbladGenerator {
    pub fn new(h: &Operator, collapse: &[Operator]) -> Result<Self> {
        let d = h.dim();
        for l in collapse {
            if l.dims() != h.dims() {
                return Err(Error::DimensionMismatch {
                    context: "collapse operator",
                    expected: d,
                    found: l.dim(),
                });
            }
        }
        if d * d > u32::MAX as usize {
            return Err(Error::DimensionTooLarge {
                dim: d,
                max: 1 << 16,
            });
        }
        let h_sparse = h.to_sparse();
        let ls: Vec<CsrMatrix> = collapse.iter().map(|l| l.to_sparse()).collect();
        let mut gamma = CsrMatrix::zeros(d, d);
        for l in &ls {
            gamma = gamma.add(&l.adjoint().matmul(l));
        }
        let (runs, jump_terms) = jump_runs(&ls, d);

        let k = h_sparse
            .map_values(|v| C64::new(0.0, -1.0) * v)
            .add(&gamma.map_values(|v| v * -0.5));
        let mut diag_re = vec![0.0; d];
        let mut diag_im = vec![0.0; d];
        let mut off_ptr = vec![0];
        let (mut off_col, mut off_re, mut off_im) = (Vec::new(), Vec::new(), Vec::new());
        for r in 0..d {
            for (c, v) in k.row(r) {
                if c == r {
                    diag_re[r] = v.re;
                    diag_im[r] = v.im;
                } else {
                    off_col.push(c);
                    off_re.push(v.re);
                    off_im.push(v.im);
                }
            }
            off_ptr.push(off_col.len());
        }

        let h_row_sum = max_row_abs_sum(&h_sparse);
        let gamma_max = max_row_abs_sum(&gamma);
        Ok(LindbladGenerator {
            dims: h.dims().to_vec(),
            d,
            diag_re,
            diag_im,
            off_ptr,
            off_col,
            off_re,
            off_im,
            runs,
            jump_terms,
            h_row_sum,
            gamma_max,
            wide: wide_simd_available(),
        })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        Self::new(&hamiltonian(spec)?, &collapse_ops(spec)?)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn hilbert_dim(&self) -> usize {
        self.d
    }

    /// Upper bound on the generator's spectral radius: 2·max_r Σ_c |H_rc|
    /// (commutator) plus the largest row sum of Σ L†L.
    pub fn spectral_bound(&self) -> f64 {
        2.0 * self.h_row_sum + self.gamma_max
    }

    /// Stored entries of K, diagonal included.
    pub fn nnz_k(&self) -> usize {
        self.off_col.len() + self.d
    }

    pub fn jump_terms(&self) -> usize {
        self.jump_terms
    }

    pub fn jump_runs(&self) -> usize {
        self.runs.len()
    }

    /// Flattens a Hermitian operator into `[Re | Im]` row-major blocks.
    pub fn pack(&self, rho: &Operator) -> Result<Vec<f64>> {
        if rho.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                context: "state",
                expected: self.d,
                found: rho.dim(),
            });
        }
        let m = rho.to_dense();
        Ok(pack_dense(&m))
    }

    pub fn unpack(&self, y: &[f64]) -> Mat<C64> {
        unpack_dense(y, self.d)
    }

    /// Evaluates the right-hand side on a Hermitian operator.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        let y = self.pack(rho)?;
        let mut dy = vec![0.0; y.len()];
        self.rhs(&y, &mut dy);
        Operator::from_dense(self.dims.clone(), self.unpack(&dy))
    }

    #[inline(always)]
    fn rhs_kernel(&self, y: &[f64], dy: &mut [f64]) {
        let d = self.d;
        let n = d * d;
        let (yr, yi) = y.split_at(n);
        let (or, oi) = dy.split_at_mut(n);
        or.fill(0.0);
        oi.fill(0.0);

        // M = K_off ρ, accumulating up to four source rows per pass
        for a in 0..d {
            let out_r = &mut or[a * d..(a + 1) * d];
            let out_i = &mut oi[a * d..(a + 1) * d];
            let (lo, hi) = (self.off_ptr[a], self.off_ptr[a + 1]);
            let mut p = lo;
            while p + 4 <= hi {
                let row = |q: usize| {
                    let c = self.off_col[q];
                    (&yr[c * d..(c + 1) * d], &yi[c * d..(c + 1) * d])
                };
                let (out_r, out_i) = (&mut out_r[..d], &mut out_i[..d]);
                let (x0, z0) = row(p);
                let (x1, z1) = row(p + 1);
                let (x2, z2) = row(p + 2);
                let (x3, z3) = row(p + 3);
                let (x0, z0, x1, z1) = (&x0[..d], &z0[..d], &x1[..d], &z1[..d]);
                let (x2, z2, x3, z3) = (&x2[..d], &z2[..d], &x3[..d], &z3[..d]);
                let kr = [self.off_re[p], self.off_re[p + 1], self.off_re[p + 2], self.off_re[p + 3]];
                let ki = [self.off_im[p], self.off_im[p + 1], self.off_im[p + 2], self.off_im[p + 3]];
                for b in 0..d {
                    out_r[b] += kr[0] * x0[b] - ki[0] * z0[b] + kr[1] * x1[b] - ki[1] * z1[b]
                        + kr[2] * x2[b] - ki[2] * z2[b] + kr[3] * x3[b] - ki[3] * z3[b];
                    out_i[b] += kr[0] * z0[b] + ki[0] * x0[b] + kr[1] * z1[b] + ki[1] * x1[b]
                        + kr[2] * z2[b] + ki[2] * x2[b] + kr[3] * z3[b] + ki[3] * x3[b];
                }
                p += 4;
            }
            for q in p..hi {
                let c = self.off_col[q];
                let (kr, ki) = (self.off_re[q], self.off_im[q]);
                let x = &yr[c * d..(c + 1) * d];
                let z = &yi[c * d..(c + 1) * d];
                let (out_r, out_i) = (&mut out_r[..d], &mut out_i[..d]);
                for b in 0..d {
                    out_r[b] += kr * x[b] - ki * z[b];
                    out_i[b] += kr * z[b] + ki * x[b];
                }
            }
        }

        // out = M + M† + K_d ρ + ρ K_d†, upper triangle mirrored, tiled
        for ta in (0..d).step_by(TILE) {
            for tb in (ta..d).step_by(TILE) {
                for a in ta..(ta + TILE).min(d) {
                    let (kra, kia) = (self.diag_re[a], self.diag_im[a]);
                    for b in a.max(tb)..(tb + TILE).min(d) {
                        let (ab, ba) = (a * d + b, b * d + a);
                        let cr = kra + self.diag_re[b];
                        let ci = kia - self.diag_im[b];
                        let re = or[ab] + or[ba] + cr * yr[ab] - ci * yi[ab];
                        let im = oi[ab] - oi[ba] + cr * yi[ab] + ci * yr[ab];
                        or[ab] = re;
                        or[ba] = re;
                        if a == b {
                            oi[ab] = 0.0;
                        } else {
                            oi[ab] = im;
                            oi[ba] = -im;
                        }
                    }
                }
            }
        }

        for r in &self.runs {
            let (o, s, len) = (r.out as usize, r.src as usize, r.len as usize);
            let (xr, xi) = (&yr[s..s + len], &yi[s..s + len]);
            let (tr, ti) = (&mut or[o..o + len], &mut oi[o..o + len]);
            let (xr, xi) = (&xr[..tr.len()], &xi[..tr.len()]);
            if r.im == 0.0 {
                for k in 0..len {
                    tr[k] += r.re * xr[k];
                    ti[k] += r.re * xi[k];
                }
            } else {
                for k in 0..len {
                    tr[k] += r.re * xr[k] - r.im * xi[k];
                    ti[k] += r.re * xi[k] + r.im * xr[k];
                }
            }
        }
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn rhs_wide(&self, y: &[f64], dy: &mut [f64]) {
        self.rhs_kernel(y, dy)
    }
}

// Only the vector width changes between the two code paths; no operation is
// fused or reordered, so both produce identical bits.
fn wide_simd_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("avx2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

pub(crate) fn pack_dense(m: &Mat<C64>) -> Vec<f64> {
    let d = m.nrows();
    let mut y = vec![0.0; 2 * d * d];
    let (re, im) = y.split_at_mut(d * d);
    for a in 0..d {
        for b in 0..d {
            re[a * d + b] = m[(a, b)].re;
            im[a * d + b] = m[(a, b)].im;
        }
    }
    y
}

pub(crate) fn unpack_dense(y: &[f64], d: usize) -> Mat<C64> {
    let (re, im) = y.split_at(d * d);
    Mat::from_fn(d, d, |a, b| C64::new(re[a * d + b], im[a * d + b]))
}

impl OdeSystem for LindbladGenerator {
    fn len(&self) -> usize {
        2 * self.d * self.d
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        assert_eq!(y.len(), self.len());
        assert_eq!(dy.len(), self.len());
        #[cfg(target_arch = "x86_64")]
        if self.wide {
            // SAFETY: `wide` is only set when the CPU reports AVX2.
            unsafe { self.rhs_wide(y, dy) };
            return;
        }
        self.rhs_kernel(y, dy)
    }
}

impl MasterEquation for LindbladGenerator {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn spectral_bound(&self) -> f64 {
        LindbladGenerator::spectral_bound(self)
    }

    fn pack_state(&self, rho: &Mat<C64>) -> Vec<f64> {
        pack_dense(rho)
    }

    fn unpack_state(&self, y: &[f64]) -> Mat<C64> {
        unpack_dense(y, self.d)
    }
}

/// -i[H,ρ] + Σ (LρL† - ½{L†L,ρ}), evaluated with sparse products.
pub fn lindblad_rhs(h: &Operator, collapse: &[Operator], rho: &DensityMatrix) -> Result<Operator> {
    LindbladGenerator::new(h, collapse)?.apply(rho.operator())
}
