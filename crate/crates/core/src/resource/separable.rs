//! Relative entropy of entanglement, bracketed.
//!
//! Upper side: conditional gradient over mixtures of product vectors. The
//! linear step maximises `⟨a⊗b| M |a⊗b⟩` for `M = Dlog_σ[ρ]` by alternating
//! top eigenvectors from several random starts; weights are then re-fitted
//! multiplicatively. The result is an explicit separable decomposition.
//!
//! Lower side: for convex `f(σ) = D(ρ‖σ)` and any positive definite `σ0`,
//! `min_{τ ∈ PPT} f(τ) ≥ f(σ0) − Tr[G σ0] + min_{τ ∈ PPT} Tr[G τ]` with
//! `G = ∇f(σ0)`. The last term is bounded below by
//! `λ_min(G − Y^Γ)` for any `Y ⪰ 0`, and `Y` is taken from the multiplier of
//! an ADMM solve of the PPT-constrained linear program. Since every separable
//! state is PPT this is a valid lower bound on the separable minimum.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{outer, product_vector, Bracket, FreeSetOracle, FreeWitness, Membership};
use crate::error::{Error, Result};
use crate::linalg::measures::relative_entropy_eig;
use crate::linalg::spectral::{log_derivative, trace_product_re, HermitianEigen};
use crate::linalg::tensor::partial_transpose_b;
use crate::linalg::{BipartiteState, CMatrix, CVector, DensityMatrix};

/// Largest total dimension `dA·dB` accepted.
pub const MAX_SEPARABLE_DIM: usize = 36;

/// One term `weight · |a⊗b⟩⟨a⊗b|` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub a: CVector,
    pub b: CVector,
}

impl ProductTerm {
    fn vector(&self) -> CVector {
        product_vector(&self.a, &self.b)
    }
}

pub(crate) fn assemble(terms: &[ProductTerm]) -> DensityMatrix {
    let d = terms[0].a.len() * terms[0].b.len();
    let mut m = CMatrix::zeros(d, d);
    for t in terms {
        let x = t.vector();
        m += outer(&x).scale(t.weight);
    }
    let tr: f64 = terms.iter().map(|t| t.weight).sum();
    DensityMatrix::from_trusted(crate::linalg::spectral::hermitian_part(&m).unscale(tr))
}

/// Iteration limits and tolerances for the separability bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    /// Random starts of the alternating product-vector search.
    pub restarts: usize,
    /// Alternations per start.
    pub alternations: usize,
    /// Outer conditional-gradient iterations on the separable side.
    pub max_iters: usize,
    /// Stop once the (heuristic) Frank–Wolfe gap drops below this, in bits.
    pub gap_tol: f64,
    /// Conditional-gradient iterations over the PPT set for the lower bound.
    pub ppt_iters: usize,
    /// ADMM iterations per PPT linear subproblem.
    pub admm_iters: usize,
    /// Stop refining once `upper − lower` is at most this.
    pub target_width: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            restarts: 8,
            alternations: 200,
            max_iters: 500,
            gap_tol: 1e-7,
            ppt_iters: 500,
            admm_iters: 400,
            target_width: 1e-3,
            seed: 0x5eed,
        }
    }
}

/// Free states are the separable states on `dA ⊗ dB`.
#[derive(Debug, Clone)]
pub struct SeparabilityOracle {
    d_a: usize,
    d_b: usize,
    config: SeesawConfig,
}

impl SeparabilityOracle {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        Self::with_config(d_a, d_b, SeesawConfig::default())
    }

    pub fn with_config(d_a: usize, d_b: usize, config: SeesawConfig) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(Error::OutOfRange(format!(
                "subsystem dimensions must be >= 2, got {d_a}x{d_b}"
            )));
        }
        if d_a * d_b > MAX_SEPARABLE_DIM {
            return Err(Error::DimensionBlowup {
                what: "separability oracle".into(),
                dim: d_a * d_b,
                limit: MAX_SEPARABLE_DIM,
            });
        }
        Ok(SeparabilityOracle { d_a, d_b, config })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn config(&self) -> &SeesawConfig {
        &self.config
    }

    fn bracket(&self, rho: &DensityMatrix) -> Bracket {
        let mut solver = Solver::new(rho, self.d_a, self.d_b, &self.config);
        solver.run()
    }
}

impl FreeSetOracle for SeparabilityOracle {
    fn name(&self) -> &str {
        "separability"
    }

    fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    fn closest_free(&self, rho: &DensityMatrix) -> Result<Bracket> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        if self.contains(rho) == Membership::Free {
            return Ok(Bracket {
                lower: 0.0,
                upper: 0.0,
                witness: FreeWitness::LowDimPpt {
                    d_a: self.d_a,
                    d_b: self.d_b,
                    state: rho.clone(),
                },
                converged: true,
            });
        }
        Ok(self.bracket(rho))
    }

    fn diameter_kappa(&self) -> f64 {
        (self.d_a.min(self.d_b) as f64).log2()
    }

    fn full_rank_witness(&self) -> DensityMatrix {
        DensityMatrix::maximally_mixed(self.dim())
    }

    /// PPT decides membership for 2x2 and 2x3; elsewhere only NPT is conclusive.
    fn contains(&self, rho: &DensityMatrix) -> Membership {
        let Ok(b) = BipartiteState::mixed(rho.clone(), self.d_a, self.d_b) else {
            return Membership::Unknown;
        };
        if b.ppt_min_eigenvalue() < -1e-10 {
            Membership::NotFree
        } else if self.dim() <= 6 {
            Membership::Free
        } else {
            Membership::Unknown
        }
    }
}

fn gaussian_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v.unscale(norm)
}

fn top_eigvec(m: &CMatrix) -> (f64, CVector) {
    let e = crate::linalg::spectral::hermitian_part(m).symmetric_eigen();
    let (i, &val) = e
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    (val, e.eigenvectors.column(i).into_owned())
}

/// `⟨b| M |b⟩_B`, a `dA x dA` operator.
fn contract_b(m: &CMatrix, b: &CVector, d_a: usize, d_b: usize) -> CMatrix {
    DMatrix::from_fn(d_a, d_a, |i, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d_b {
            let bj = b[j].conj();
            for l in 0..d_b {
                acc += bj * m[(i * d_b + j, k * d_b + l)] * b[l];
            }
        }
        acc
    })
}

/// `⟨a| M |a⟩_A`, a `dB x dB` operator.
fn contract_a(m: &CMatrix, a: &CVector, d_a: usize, d_b: usize) -> CMatrix {
    DMatrix::from_fn(d_b, d_b, |j, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d_a {
            let ai = a[i].conj();
            for k in 0..d_a {
                acc += ai * m[(i * d_b + j, k * d_b + l)] * a[k];
            }
        }
        acc
    })
}

/// Heuristic maximiser of `⟨a⊗b| M |a⊗b⟩` over unit product vectors.
pub(crate) fn product_lmo<R: Rng + ?Sized>(
    m: &CMatrix,
    d_a: usize,
    d_b: usize,
    restarts: usize,
    alternations: usize,
    rng: &mut R,
) -> (f64, CVector, CVector) {
    let mut best: Option<(f64, CVector, CVector)> = None;
    for _ in 0..restarts.max(1) {
        let mut b = gaussian_unit(d_b, rng);
        let mut a = CVector::zeros(d_a);
        let mut val = f64::NEG_INFINITY;
        for _ in 0..alternations.max(1) {
            let (_, a_new) = top_eigvec(&contract_b(m, &b, d_a, d_b));
            a = a_new;
            let (v, b_new) = top_eigvec(&contract_a(m, &a, d_a, d_b));
            b = b_new;
            let done = v - val < 1e-13 * v.abs().max(1.0);
            val = v;
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bv, _, _)| val > *bv) {
            best = Some((val, a, b));
        }
    }
    best.expect("at least one restart")
}

/// Euclidean projection of `v` onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// ADMM state for `min Tr[G S]` over `{S ⪰ 0, Tr S = 1, S^Γ ⪰ 0}`.
#[derive(Debug, Clone)]
struct PptLp {
    t: CMatrix,
    u: CMatrix,
}

struct PptLpResult {
    /// Rigorous lower bound on the minimum (up to eigensolver accuracy).
    bound: f64,
    /// Approximate minimiser (in the spectraplex, approximately PPT).
    primal: CMatrix,
}

impl PptLp {
    fn new(d: usize) -> Self {
        PptLp {
            t: CMatrix::identity(d, d).unscale(d as f64),
            u: CMatrix::zeros(d, d),
        }
    }

    fn solve(&mut self, g: &CMatrix, d_a: usize, d_b: usize, iters: usize) -> PptLpResult {
        let ge = HermitianEigen::new(g);
        let scale = ge.max_value().abs().max(ge.min_value().abs()).max(1e-300);
        let gn = g.unscale(scale);
        let mut best = ge.min_value() / scale;
        let mut primal = ge.map_raw(|_| 0.0);
        let mut s = primal.clone();
        let dual_bound = |u: &CMatrix, sign: f64| -> f64 {
            let y = HermitianEigen::new(&u.scale(sign)).map_raw(|x| x.max(0.0));
            HermitianEigen::new(&(&gn - partial_transpose_b(&y, d_a, d_b))).min_value()
        };
        for it in 0..iters {
            let x = partial_transpose_b(&(&self.t - &self.u), d_a, d_b) - &gn;
            let xe = HermitianEigen::new(&x);
            let p = project_simplex(&xe.values);
            let mut scaled = xe.vectors.clone();
            for (j, pj) in p.iter().enumerate() {
                for i in 0..scaled.nrows() {
                    scaled[(i, j)] *= *pj;
                }
            }
            s = &scaled * xe.vectors.adjoint();
            let sg = partial_transpose_b(&s, d_a, d_b);
            self.t = HermitianEigen::new(&(&sg + &self.u)).map_raw(|x| x.max(0.0));
            let resid = &sg - &self.t;
            self.u += &resid;
            if it % 10 == 9 || it + 1 == iters {
                for sign in [1.0, -1.0] {
                    best = best.max(dual_bound(&self.u, sign));
                }
                let pv = trace_product_re(&gn, &s);
                if pv - best < 1e-9 && resid.norm() < 1e-9 {
                    break;
                }
            }
        }
        if iters == 0 {
            s = CMatrix::identity(g.nrows(), g.nrows()).unscale(g.nrows() as f64);
        }
        primal.copy_from(&s);
        PptLpResult {
            bound: best * scale,
            primal,
        }
    }
}

/// `max_{Y ⪰ 0} λ_min(G − Y^Γ)`, approximately maximised; any returned
/// value is a valid lower bound on `min Tr[G τ]` over PPT states τ.
pub fn ppt_dual_bound(g: &CMatrix, d_a: usize, d_b: usize, iters: usize) -> f64 {
    PptLp::new(d_a * d_b).solve(g, d_a, d_b, iters).bound
}

/// Minimises a convex function on `[0, hi]`: a geometric scan locates the
/// scale of the minimiser (steps can be many orders of magnitude below `hi`
/// near singular points), then golden-section search refines it.
fn line_search<F: FnMut(f64) -> f64>(mut f: F, hi: f64) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    let mut best_k = 0;
    for k in 0..48 {
        let t = hi * 0.5f64.powi(k);
        let v = f(t);
        if v < best.1 {
            best = (t, v);
            best_k = k;
        }
    }
    let lo = hi * 0.5f64.powi(best_k + 1);
    let up = if best_k == 0 {
        hi
    } else {
        hi * 0.5f64.powi(best_k - 1)
    };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, up);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..30 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

struct Solver<'a> {
    rho: &'a DensityMatrix,
    rho_eig: HermitianEigen,
    d_a: usize,
    d_b: usize,
    cfg: &'a SeesawConfig,
    rng: ChaCha8Rng,
}

/// Bits, `+∞` outside the support.
fn rel_ent(rho_eig: &HermitianEigen, sigma: &CMatrix) -> f64 {
    relative_entropy_eig(rho_eig, &HermitianEigen::new(sigma))
}

impl<'a> Solver<'a> {
    fn new(rho: &'a DensityMatrix, d_a: usize, d_b: usize, cfg: &'a SeesawConfig) -> Self {
        Solver {
            rho,
            rho_eig: rho.eigen(),
            d_a,
            d_b,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        }
    }

    fn d(&self) -> usize {
        self.d_a * self.d_b
    }

    /// Dephasing of one side in the basis `basis` (columns), split into
    /// product terms through the spectral decomposition of each block.
    fn dephased(&self, side_a: bool, basis: &CMatrix) -> Vec<ProductTerm> {
        let (d_keep, d_other) = if side_a {
            (self.d_a, self.d_b)
        } else {
            (self.d_b, self.d_a)
        };
        let m = self.rho.matrix();
        let mut terms = Vec::new();
        for i in 0..d_keep {
            let u = basis.column(i).into_owned();
            let block = DMatrix::from_fn(d_other, d_other, |j, l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..d_keep {
                    for q in 0..d_keep {
                        let (r, c) = if side_a {
                            (p * self.d_b + j, q * self.d_b + l)
                        } else {
                            (j * self.d_b + p, l * self.d_b + q)
                        };
                        acc += u[p].conj() * m[(r, c)] * u[q];
                    }
                }
                acc
            });
            let e = HermitianEigen::new(&block);
            for (k, &w) in e.values.iter().enumerate() {
                if w > 1e-15 {
                    let v = e.vectors.column(k).into_owned();
                    let (a, b) = if side_a {
                        (u.clone(), v)
                    } else {
                        (v, u.clone())
                    };
                    terms.push(ProductTerm { weight: w, a, b });
                }
            }
        }
        normalise(&mut terms);
        terms
    }

    fn initial_candidates(&self) -> Vec<Vec<ProductTerm>> {
        let bs = BipartiteState::mixed(self.rho.clone(), self.d_a, self.d_b).expect("dims checked");
        let ra = bs.partial_trace(crate::linalg::Side::A).eigen().vectors;
        let rb = bs.partial_trace(crate::linalg::Side::B).eigen().vectors;
        vec![
            self.dephased(true, &CMatrix::identity(self.d_a, self.d_a)),
            self.dephased(false, &CMatrix::identity(self.d_b, self.d_b)),
            self.dephased(true, &ra),
            self.dephased(false, &rb),
        ]
    }

    fn basis_terms(&self) -> Vec<ProductTerm> {
        let mut terms = Vec::with_capacity(self.d());
        for i in 0..self.d_a {
            for j in 0..self.d_b {
                terms.push(ProductTerm {
                    weight: 1.0 / self.d() as f64,
                    a: unit(self.d_a, i),
                    b: unit(self.d_b, j),
                });
            }
        }
        terms
    }

    fn objective(&self, terms: &[ProductTerm]) -> f64 {
        if terms.is_empty() {
            return f64::INFINITY;
        }
        rel_ent(&self.rho_eig, assemble(terms).matrix())
    }

    /// Local refinement of a decomposition: all product factors and weights
    /// move jointly under L-BFGS on
    /// `F(σ) = Tr ρ log ρ − Tr ρ log σ + (Tr σ − 1)/ln 2` (bits), with
    /// `σ = Σ_j (u_j ⊗ v_j)(u_j ⊗ v_j)†` unnormalised. Minimising over the
    /// scale of σ recovers `D(ρ‖σ/Tr σ)`, so the constraint `Tr σ = 1` can
    /// be dropped.
    fn polish(&self, terms: &[ProductTerm], iters: usize) -> Vec<ProductTerm> {
        let (da, db) = (self.d_a, self.d_b);
        let per = 2 * (da + db);
        let mut x0 = Vec::with_capacity(per * terms.len());
        for t in terms {
            let s = t.weight.sqrt();
            for z in t.a.iter() {
                x0.push(z.re * s);
                x0.push(z.im * s);
            }
            for z in t.b.iter() {
                x0.push(z.re);
                x0.push(z.im);
            }
        }
        let unpack = |x: &[f64]| -> Vec<(CVector, CVector)> {
            x.chunks(per)
                .map(|c| {
                    let u = CVector::from_fn(da, |i, _| Complex64::new(c[2 * i], c[2 * i + 1]));
                    let v = CVector::from_fn(db, |i, _| {
                        Complex64::new(c[2 * (da + i)], c[2 * (da + i) + 1])
                    });
                    (u, v)
                })
                .collect()
        };
        let rho = self.rho.matrix();
        let rho_eig = &self.rho_eig;
        let objective = |x: &[f64]| -> (f64, Vec<f64>) {
            let fac = unpack(x);
            let ys: Vec<CVector> = fac.iter().map(|(u, v)| product_vector(u, v)).collect();
            let d = da * db;
            let mut sigma = CMatrix::zeros(d, d);
            for y in &ys {
                sigma += outer(y);
            }
            let se = HermitianEigen::new(&sigma);
            let tr = crate::linalg::spectral::trace_re(&sigma);
            let rel = crate::linalg::measures::relative_entropy_eig_raw(rho_eig, &se);
            if !rel.is_finite() || !tr.is_finite() || se.min_value() < -1e-12 {
                return (f64::INFINITY, vec![0.0; x.len()]);
            }
            let f = rel + (tr - 1.0) / LN_2;
            let h = (CMatrix::identity(d, d) - log_derivative(&se, rho, 1e-300)).unscale(LN_2);
            let mut g = Vec::with_capacity(x.len());
            for ((u, v), y) in fac.iter().zip(&ys) {
                let hy = &h * y;
                let gu = contract_vec_b(&hy, v, da, db);
                let gv = contract_vec_a(&hy, u, da, db);
                for z in gu.iter().chain(gv.iter()) {
                    g.push(2.0 * z.re);
                    g.push(2.0 * z.im);
                }
            }
            (f, g)
        };
        let x = lbfgs(objective, x0, iters);
        let mut out: Vec<ProductTerm> = unpack(&x)
            .into_iter()
            .filter_map(|(u, v)| {
                let (nu, nv) = (u.norm(), v.norm());
                let w = (nu * nv).powi(2);
                (w > 1e-300 && w.is_finite()).then(|| ProductTerm {
                    weight: w,
                    a: u.unscale(nu),
                    b: v.unscale(nv),
                })
            })
            .collect();
        if out.is_empty() {
            return terms.to_vec();
        }
        normalise(&mut out);
        out
    }

    /// Away-step conditional gradient over product mixtures, started from
    /// `terms`. Each iteration either moves toward the best product vector
    /// found by the linear step or away from the worst current term, then
    /// re-fits the weights multiplicatively.
    fn descend(&mut self, mut terms: Vec<ProductTerm>) -> (Vec<ProductTerm>, f64, bool) {
        let cap = self.d() * self.d();
        let mut f = self.objective(&terms);
        let mut converged = false;
        let mut stall = 0;
        for _ in 0..self.cfg.max_iters {
            if !f.is_finite() {
                break;
            }
            let prev = terms.clone();
            let sigma = assemble(&terms);
            let m = log_derivative(&sigma.eigen(), self.rho.matrix(), 1e-300);
            let q: Vec<f64> = terms.iter().map(|t| quad(&m, &t.vector())).collect();
            let base: f64 = terms.iter().zip(&q).map(|(t, q)| t.weight * q).sum();
            let (val, a, b) = product_lmo(
                &m,
                self.d_a,
                self.d_b,
                self.cfg.restarts,
                self.cfg.alternations,
                &mut self.rng,
            );
            let gap = (val - base) / LN_2;
            if gap < self.cfg.gap_tol {
                converged = true;
                break;
            }
            let (w, qw) = q
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(y.1))
                .map(|(i, v)| (i, *v))
                .expect("non-empty");
            let sm = sigma.matrix();
            let rho_eig = &self.rho_eig;
            let f_new;
            if val - base >= base - qw || terms.len() == 1 {
                let s = outer(&product_vector(&a, &b));
                let (g, fg) = line_search(
                    |t| rel_ent(rho_eig, &(sm.scale(1.0 - t) + s.scale(t))),
                    1.0 - 1e-9,
                );
                if !(fg < f) {
                    stall += 1;
                    if stall > 20 {
                        break;
                    }
                    continue;
                }
                for t in terms.iter_mut() {
                    t.weight *= 1.0 - g;
                }
                terms.push(ProductTerm { weight: g, a, b });
                f_new = fg;
            } else {
                let pw = terms[w].weight;
                let gmax = pw / (1.0 - pw);
                let s = outer(&terms[w].vector());
                let at = |t: f64| rel_ent(rho_eig, &(sm.scale(1.0 + t) - s.scale(t)).unscale(1.0));
                let (mut g, mut fg) = line_search(at, gmax);
                let f_drop = at(gmax);
                if f_drop <= fg {
                    g = gmax;
                    fg = f_drop;
                }
                if !(fg < f) {
                    stall += 1;
                    if stall > 20 {
                        break;
                    }
                    continue;
                }
                for t in terms.iter_mut() {
                    t.weight *= 1.0 + g;
                }
                terms[w].weight -= g;
                if g == gmax {
                    terms.remove(w);
                }
                f_new = fg;
            }
            let mut cur = f_new;
            for _ in 0..10 {
                let m = log_derivative(&assemble(&terms).eigen(), self.rho.matrix(), 1e-300);
                let mut next = terms.clone();
                for t in next.iter_mut() {
                    t.weight *= quad(&m, &t.vector()).max(0.0);
                }
                normalise(&mut next);
                let fn_ = self.objective(&next);
                if fn_ < cur {
                    terms = next;
                    cur = fn_;
                } else {
                    break;
                }
            }
            terms.retain(|t| t.weight > 1e-14);
            if terms.len() > cap {
                terms.sort_by(|x, y| y.weight.total_cmp(&x.weight));
                terms.truncate(cap);
            }
            normalise(&mut terms);
            if terms.is_empty() || terms.iter().any(|t| !t.weight.is_finite()) {
                terms = prev;
                break;
            }
            let f_next = self.objective(&terms);
            if f - f_next < 1e-14 {
                stall += 1;
                if stall > 20 {
                    break;
                }
            } else {
                stall = 0;
            }
            f = f_next;
        }
        (terms, f, converged)
    }

    /// Convexity certificate at a positive definite `sigma0`.
    fn certificate(&self, sigma0: &CMatrix, lp: &mut PptLp, iters: usize) -> (f64, CMatrix) {
        let se = HermitianEigen::new(sigma0);
        if se.min_value() <= 1e-300 {
            return (0.0, sigma0.clone());
        }
        let f0 = relative_entropy_eig(&self.rho_eig, &se);
        if !f0.is_finite() {
            return (0.0, sigma0.clone());
        }
        let g = log_derivative(&se, self.rho.matrix(), 1e-300).unscale(-LN_2);
        let g = crate::linalg::spectral::hermitian_part(&g);
        let tr_gs = trace_product_re(&g, sigma0);
        let res = lp.solve(&g, self.d_a, self.d_b, iters);
        (f0 - tr_gs + res.bound, res.primal)
    }

    fn run(&mut self) -> Bracket {
        let d = self.d();
        let mut best: Option<(Vec<ProductTerm>, f64)> = None;
        let consider =
            |terms: Vec<ProductTerm>, f: f64, best: &mut Option<(Vec<ProductTerm>, f64)>| {
                if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
                    *best = Some((terms, f));
                }
            };
        for cand in self.initial_candidates() {
            let f = self.objective(&cand);
            consider(cand, f, &mut best);
        }
        let (start, f_start) = best.clone().expect("candidates");
        if f_start <= 1e-12 {
            return self.finish(start, f_start, 0.0, true);
        }

        let polished = self.polish(&start, self.cfg.max_iters);
        let f = self.objective(&polished);
        consider(polished, f, &mut best);

        // Global moves from a full-rank start, then local refinement again.
        let (cur, _) = best.clone().expect("candidates");
        let mix = 1e-3;
        let mut terms = cur;
        for t in terms.iter_mut() {
            t.weight *= 1.0 - mix;
        }
        for mut t in self.basis_terms() {
            t.weight *= mix;
            terms.push(t);
        }
        let (terms, f, fw_converged) = self.descend(terms);
        let polished = self.polish(&terms, self.cfg.max_iters);
        consider(terms, f, &mut best);
        let f = self.objective(&polished);
        consider(polished, f, &mut best);
        let (terms, upper) = best.expect("candidates");
        let sigma = assemble(&terms).into_matrix();

        let mut lower: f64 = 0.0;
        let mut lp = PptLp::new(d);
        let eye = CMatrix::identity(d, d).unscale(d as f64);
        for eps in [0.0, 1e-4, 1e-3, 1e-2] {
            let s0 = sigma.scale(1.0 - eps) + eye.scale(eps);
            let (l, _) = self.certificate(&s0, &mut PptLp::new(d), self.cfg.admm_iters);
            lower = lower.max(l);
        }

        // Refine the lower bound by descending over the PPT set.
        if upper - lower > self.cfg.target_width {
            let mut s = sigma.scale(1.0 - 1e-3) + eye.scale(1e-3);
            let mut mark = lower;
            for it in 0..self.cfg.ppt_iters {
                let iters = if it == 0 {
                    self.cfg.admm_iters
                } else {
                    (self.cfg.admm_iters / 8).max(10)
                };
                let (l, dir) = self.certificate(&s, &mut lp, iters);
                lower = lower.max(l);
                if upper - lower <= self.cfg.target_width {
                    break;
                }
                if it % 50 == 49 {
                    if lower - mark < 1e-4 {
                        break;
                    }
                    mark = lower;
                }
                let rho_eig = &self.rho_eig;
                let cur = rel_ent(rho_eig, &s);
                let (g, fg) = line_search(
                    |t| rel_ent(rho_eig, &(s.scale(1.0 - t) + dir.scale(t))),
                    1.0 - 1e-6,
                );
                if !(fg < cur - 1e-14) {
                    break;
                }
                s = s.scale(1.0 - g) + dir.scale(g);
            }
        }
        let converged = fw_converged || upper - lower <= self.cfg.target_width;
        self.finish(terms, upper, lower, converged)
    }

    fn finish(&self, terms: Vec<ProductTerm>, upper: f64, lower: f64, converged: bool) -> Bracket {
        let upper = upper.max(0.0);
        Bracket {
            lower: lower.clamp(0.0, upper),
            upper,
            witness: FreeWitness::Product {
                d_a: self.d_a,
                d_b: self.d_b,
                terms,
            },
            converged,
        }
    }
}

/// `Re ⟨x| M |x⟩`.
fn quad(m: &CMatrix, x: &CVector) -> f64 {
    (x.adjoint() * m * x)[(0, 0)].re
}

/// `(I ⊗ ⟨v|) y`.
fn contract_vec_b(y: &CVector, v: &CVector, d_a: usize, d_b: usize) -> CVector {
    CVector::from_fn(d_a, |i, _| {
        (0..d_b).map(|j| v[j].conj() * y[i * d_b + j]).sum()
    })
}

/// `(⟨u| ⊗ I) y`.
fn contract_vec_a(y: &CVector, u: &CVector, d_a: usize, d_b: usize) -> CVector {
    CVector::from_fn(d_b, |j, _| {
        (0..d_a).map(|i| u[i].conj() * y[i * d_b + j]).sum()
    })
}

/// Limited-memory BFGS with Armijo backtracking. `f` returns the value and
/// gradient; `+∞` marks points outside the domain.
fn lbfgs<F: Fn(&[f64]) -> (f64, Vec<f64>)>(f: F, mut x: Vec<f64>, iters: usize) -> Vec<f64> {
    const MEM: usize = 12;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let (mut fx, mut g) = f(&x);
    if !fx.is_finite() {
        return x;
    }
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> =
        std::collections::VecDeque::new();
    for _ in 0..iters {
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        if slope.abs() < 1e-30 {
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let (fn_, gn) = f(&xn);
            if fn_.is_finite() && fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            hist.push_back((s, y, 1.0 / sy));
            if hist.len() > MEM {
                hist.pop_front();
            }
        }
        let decrease = fx - fn_;
        x = xn;
        fx = fn_;
        g = gn;
        if decrease < 1e-15 * fx.abs().max(1e-300) && decrease < 1e-18 {
            break;
        }
    }
    x
}

fn unit(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = Complex64::new(1.0, 0.0);
    v
}

fn normalise(terms: &mut [ProductTerm]) {
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    if total > 0.0 {
        for t in terms.iter_mut() {
            t.weight /= total;
        }
    }
}
