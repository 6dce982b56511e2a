//! Seeded random lattices for tests and verification suites.
//!
//! Lattices are orthogonal sums of normal-form blocks with random unit
//! classes, re-expressed in a random basis from GL_n(O_E) so that callers see
//! non-diagonal Gram matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::efield::{vec_add, vec_scale, Elem, EValuation, FieldConfig, Matrix, Vector};
use crate::error::{Error, Result};
use crate::hermlat::{HermLattice, HermSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockSpec {
    /// β·(p·ε₀)^b, invariant 2b+1.
    Diag { beta: i64, b: i64 },
    /// Plane with (e, f) = u^{2c−1}, invariants (2c, 2c).
    Plane { c: i64 },
}

impl BlockSpec {
    pub fn dim(&self) -> usize {
        match self {
            BlockSpec::Diag { .. } => 1,
            BlockSpec::Plane { .. } => 2,
        }
    }

    pub fn invariants(&self) -> Vec<i64> {
        match *self {
            BlockSpec::Diag { b, .. } => vec![2 * b + 1],
            BlockSpec::Plane { c } => vec![2 * c, 2 * c],
        }
    }
}

pub fn block_gram(cfg: FieldConfig, blocks: &[BlockSpec]) -> Matrix {
    let n: usize = blocks.iter().map(BlockSpec::dim).sum();
    let mut g = Matrix::zeros(cfg, n, n);
    let mut i = 0;
    for blk in blocks {
        match *blk {
            BlockSpec::Diag { beta, b } => {
                g.set(i, i, cfg.int(beta) * cfg.u_pow(2 * b));
            }
            BlockSpec::Plane { c } => {
                let x = cfg.u_pow(2 * c - 1);
                g.set(i, i + 1, x.clone());
                g.set(i + 1, i, x.conj());
            }
        }
        i += blk.dim();
    }
    g
}

/// The standard lattice of the block-diagonal space.
pub fn lattice_from_blocks(cfg: FieldConfig, blocks: &[BlockSpec]) -> Result<HermLattice> {
    Ok(HermLattice::standard(HermSpace::new(block_gram(cfg, blocks))?))
}

/// Every sorted block list of dimension n with all invariants positive,
/// val ≤ max_val and unit classes β ∈ {1, nonresidue}.
pub fn all_positive_type(cfg: FieldConfig, n: usize, max_val: i64) -> Vec<Vec<BlockSpec>> {
    let nr = FieldConfig::smallest_nonresidue(cfg.p);
    let mut kinds = Vec::new();
    for b in 0..=(max_val - 1) / 2 {
        for beta in [1, nr] {
            kinds.push(BlockSpec::Diag { beta, b });
        }
    }
    for c in 1..=max_val / 4 {
        kinds.push(BlockSpec::Plane { c });
    }
    let mut out = Vec::new();
    fn rec(kinds: &[BlockSpec], start: usize, left: usize, budget: i64, cur: &mut Vec<BlockSpec>, out: &mut Vec<Vec<BlockSpec>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for (k, blk) in kinds.iter().enumerate().skip(start) {
            let cost: i64 = blk.invariants().iter().sum();
            if blk.dim() <= left && cost <= budget {
                cur.push(*blk);
                rec(kinds, k, left - blk.dim(), budget - cost, cur, out);
                cur.pop();
            }
        }
    }
    rec(&kinds, 0, n, max_val, &mut Vec::new(), &mut out);
    out
}

pub struct Corpus {
    cfg: FieldConfig,
    rng: ChaCha8Rng,
}

const RETRIES: usize = 10_000;

impl Corpus {
    pub fn new(cfg: FieldConfig, seed: u64) -> Self {
        Self { cfg, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn cfg(&self) -> FieldConfig {
        self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn unit(&mut self) -> i64 {
        self.rng.gen_range(1..self.cfg.p as i64)
    }

    /// Random blocks of total dimension n with each invariant ≤ max_a and
    /// val ≤ max_val.
    pub fn blocks(&mut self, n: usize, max_a: i64, max_val: i64) -> Vec<BlockSpec> {
        loop {
            let mut out = Vec::new();
            let mut left = n;
            while left > 0 {
                if left >= 2 && max_a >= 0 && self.rng.gen_bool(0.3) {
                    out.push(BlockSpec::Plane { c: self.rng.gen_range(0..=max_a / 2) });
                    left -= 2;
                } else if max_a >= 1 {
                    let beta = self.unit();
                    out.push(BlockSpec::Diag { beta, b: self.rng.gen_range(0..=(max_a - 1) / 2) });
                    left -= 1;
                }
            }
            let val: i64 = out.iter().flat_map(BlockSpec::invariants).sum();
            if val <= max_val {
                return out;
            }
        }
    }

    /// Random element a + b·u with 0 ≤ a, b < p.
    pub fn small_elem(&mut self) -> Elem {
        let p = self.cfg.p as i64;
        let a = self.rng.gen_range(0..p);
        let b = self.rng.gen_range(0..p);
        self.cfg.int(a) + self.cfg.int(b) * self.cfg.u()
    }

    /// Random matrix in GL_n(O_E).
    pub fn unimodular(&mut self, n: usize) -> Matrix {
        loop {
            let rows: Vec<Vector> = (0..n).map(|_| (0..n).map(|_| self.small_elem()).collect()).collect();
            let m = Matrix::from_rows(self.cfg, rows).expect("square");
            if m.det().map(|d| d.val() == EValuation::Finite(0)).unwrap_or(false) {
                return m;
            }
        }
    }

    /// Gram matrix gᵀ·G·conj(g) of the block lattice in a random basis g.
    pub fn scrambled_gram(&mut self, blocks: &[BlockSpec]) -> Matrix {
        let g0 = block_gram(self.cfg, blocks);
        let g = self.unimodular(g0.rows());
        g.transpose().try_mul(&g0).and_then(|m| m.try_mul(&g.conj())).expect("shapes agree")
    }

    pub fn integral_lattice(&mut self, n: usize, max_a: i64, max_val: i64) -> HermLattice {
        let blocks = self.blocks(n, max_a, max_val);
        let gram = self.scrambled_gram(&blocks);
        HermLattice::standard(HermSpace::new(gram).expect("nondegenerate"))
    }

    /// Random integral lattice in a nonsplit space of even dimension n.
    pub fn nonsplit_lattice(&mut self, n: usize, max_a: i64, max_val: i64) -> Result<HermLattice> {
        if n % 2 == 1 || max_a < 1 {
            return Err(Error::Domain("nonsplit lattices need even n and max_a ≥ 1".into()));
        }
        let nr = FieldConfig::smallest_nonresidue(self.cfg.p);
        for _ in 0..RETRIES {
            let mut blocks = self.blocks(n, max_a, max_val);
            if !lattice_from_blocks(self.cfg, &blocks)?.space().is_nonsplit()? {
                // A nonsquare unit on one line flips the determinant class.
                match blocks.iter_mut().find_map(|b| match b {
                    BlockSpec::Diag { beta, .. } => Some(beta),
                    _ => None,
                }) {
                    Some(beta) => *beta = (*beta * nr).rem_euclid(self.cfg.p as i64),
                    None => continue,
                }
            }
            let gram = self.scrambled_gram(&blocks);
            return Ok(HermLattice::standard(HermSpace::new(gram)?));
        }
        Err(Error::TooLarge("no nonsplit block list found".into()))
    }

    /// Integral L♭ of rank n−1 spanning e_1..e_{n−1} of a nonsplit space
    /// diag(G♭, γ) with γ a unit; returns (L♭, e_n).
    pub fn corank_one(&mut self, n: usize, max_a: i64, max_val: i64) -> Result<(HermLattice, Vector)> {
        if n % 2 == 1 || n < 2 {
            return Err(Error::Domain("corank-one ambient dimension must be even".into()));
        }
        let blocks = self.blocks(n - 1, max_a, max_val);
        let gflat = self.scrambled_gram(&blocks);
        let nr = FieldConfig::smallest_nonresidue(self.cfg.p);
        for gamma in [1, nr] {
            let gram = Matrix::block_diag(&gflat, &Matrix::diagonal(self.cfg, &[self.cfg.int(gamma)]));
            let space = HermSpace::new(gram)?;
            if space.is_nonsplit()? {
                let basis = (0..n - 1).map(|i| space.basis_vector(i)).collect();
                let f0 = space.basis_vector(n - 1);
                return Ok((HermLattice::new(space, basis)?, f0));
            }
        }
        Err(Error::Inconsistent("neither unit class gives a nonsplit space".into()))
    }

    /// Random vector x = y + u^δ·ζ·f0 with y a small combination of a basis of
    /// L♭^∨, δ ∈ [δ_lo, δ_hi] and ζ a unit.
    pub fn transversal_vector(&mut self, lflat: &HermLattice, f0: &[Elem], deltas: (i64, i64)) -> Result<Vector> {
        let dual = lflat.dual()?;
        let mut x = lflat.space().zero_vector();
        for b in dual.basis() {
            let c = self.cfg.int(self.rng.gen_range(0..self.cfg.p as i64));
            x = vec_add(&x, &vec_scale(&c, b));
        }
        let delta = self.rng.gen_range(deltas.0..=deltas.1);
        let z = self.unit();
        let zeta = self.cfg.int(z);
        Ok(vec_add(&x, &vec_scale(&(zeta * self.cfg.u_pow(delta)), f0)))
    }

    /// The same lattice with its basis multiplied by a random GL(O_E) matrix.
    pub fn rebase(&mut self, l: &HermLattice) -> Result<HermLattice> {
        let g = self.unimodular(l.rank());
        let b = l.basis_matrix().try_mul(&g)?;
        HermLattice::new(l.space().clone(), b.columns())
    }
}
