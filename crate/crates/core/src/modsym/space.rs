//! Weight-2 modular symbols for Γ0(p), presented by Manin symbols modulo the
//! two- and three-term relations (and optionally the star involution).

use num_traits::{One, Zero};

use super::p1::{Mat2, P1};
use super::ModSymError;
use crate::algebra::field::{is_prime, Rat, Rationals};
use crate::algebra::matrix::Matrix;

/// Sparse rational combination of quotient basis vectors.
pub type SparseVec = Vec<(usize, Rat)>;

#[derive(Clone, Debug)]
pub struct ModSymSpace {
    p: u64,
    sign: i32,
    p1: P1,
    coords: Vec<SparseVec>,
    basis: Vec<usize>,
}

struct SignedUnionFind {
    parent: Vec<usize>,
    rel: Vec<i8>,
    zero: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind {
            parent: (0..n).collect(),
            rel: vec![1; n],
            zero: vec![false; n],
        }
    }

    /// Root of i and the sign s with x_i = s x_root.
    fn find(&mut self, i: usize) -> (usize, i8) {
        if self.parent[i] == i {
            return (i, 1);
        }
        let (root, s) = self.find(self.parent[i]);
        self.rel[i] *= s;
        self.parent[i] = root;
        (root, self.rel[i])
    }

    /// Imposes x_i = s x_j.
    fn union(&mut self, i: usize, j: usize, s: i8) {
        let (ri, si) = self.find(i);
        let (rj, sj) = self.find(j);
        let t = si * s * sj;
        if ri == rj {
            if t == -1 {
                self.zero[ri] = true;
            }
            return;
        }
        self.parent[ri] = rj;
        self.rel[ri] = t;
        self.zero[rj] |= self.zero[ri];
    }
}

impl ModSymSpace {
    /// Builds the space for prime p. `sign` is +1 or -1 for the quotient by
    /// `x = sign * x*`, or 0 for the full space.
    pub fn new(p: u64, sign: i32) -> Result<Self, ModSymError> {
        if p < 5 || !is_prime(p) {
            return Err(ModSymError::InvalidPrime(p));
        }
        if !(-1..=1).contains(&sign) {
            return Err(ModSymError::InvalidSign(sign));
        }
        let p1 = P1::new(p);
        let n = p1.len();
        let mut uf = SignedUnionFind::new(n);
        for i in 0..n {
            uf.union(i, p1.s(i), -1);
            if sign != 0 {
                uf.union(i, p1.star(i), sign as i8);
            }
        }
        // Free generators after the two-term relations.
        let mut gen_of_root = vec![usize::MAX; n];
        let mut gens = Vec::new();
        let mut sym_gen: Vec<Option<(usize, i8)>> = vec![None; n];
        for i in 0..n {
            let (r, s) = uf.find(i);
            if uf.zero[r] {
                continue;
            }
            if gen_of_root[r] == usize::MAX {
                gen_of_root[r] = gens.len();
                gens.push(r);
            }
            sym_gen[i] = Some((gen_of_root[r], s));
        }
        let ngens = gens.len();
        // Three-term relations, one per tau-orbit.
        let mut rows = Vec::new();
        for i in 0..n {
            let a = p1.tau(i);
            let b = p1.tau(a);
            if i > a || i > b {
                continue;
            }
            let mut row = vec![Rat::zero(); ngens];
            for s in [i, a, b] {
                if let Some((g, sg)) = sym_gen[s] {
                    row[g] += Rat::from_integer(sg.into());
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
        let rel = Matrix::from_rows(Rationals, ngens, rows)?;
        let (rref, pivots) = rel.rref();
        let mut is_pivot = vec![None; ngens];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut basis_index = vec![usize::MAX; ngens];
        let mut basis = Vec::new();
        for g in 0..ngens {
            if is_pivot[g].is_none() {
                basis_index[g] = basis.len();
                basis.push(gens[g]);
            }
        }
        let gen_coords: Vec<SparseVec> = (0..ngens)
            .map(|g| match is_pivot[g] {
                None => vec![(basis_index[g], Rat::one())],
                Some(r) => (0..ngens)
                    .filter(|&c| is_pivot[c].is_none() && !rref.get(r, c).is_zero())
                    .map(|c| (basis_index[c], -rref.get(r, c).clone()))
                    .collect(),
            })
            .collect();
        let coords = sym_gen
            .iter()
            .map(|sg| match sg {
                None => Vec::new(),
                Some((g, s)) => gen_coords[*g]
                    .iter()
                    .map(|(i, v)| (*i, if *s == 1 { v.clone() } else { -v.clone() }))
                    .collect(),
            })
            .collect();
        Ok(ModSymSpace {
            p,
            sign,
            p1,
            coords,
            basis,
        })
    }

    pub fn level(&self) -> u64 {
        self.p
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    pub fn p1(&self) -> &P1 {
        &self.p1
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Symbol index chosen to represent each quotient basis vector.
    pub fn basis_symbols(&self) -> &[usize] {
        &self.basis
    }

    /// Coordinates of the Manin symbol with the given index.
    pub fn coords(&self, sym: usize) -> &SparseVec {
        &self.coords[sym]
    }

    /// Coordinates of the symbol `(c:d)`; zero if the point is undefined.
    pub fn coords_of(&self, c: i64, d: i64) -> SparseVec {
        self.p1
            .index(c, d)
            .map(|i| self.coords[i].clone())
            .unwrap_or_default()
    }

    pub fn dense(&self, v: &SparseVec) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dimension()];
        for (i, x) in v {
            out[*i] += x;
        }
        out
    }

    /// Matrix (acting on row vectors) of the operator sending each basis
    /// symbol to a combination of symbols given by `image`.
    pub fn operator_matrix(&self, image: impl Fn(usize) -> Vec<(usize, i64)>) -> Matrix<Rationals> {
        let d = self.dimension();
        let mut m = Matrix::zero(Rationals, d, d);
        for (row, &sym) in self.basis.iter().enumerate() {
            for (target, mult) in image(sym) {
                let m_rat = Rat::from_integer(mult.into());
                for (col, v) in &self.coords[target] {
                    let cur = m.get(row, *col).clone();
                    m.set(row, *col, cur + v * &m_rat);
                }
            }
        }
        m
    }

    /// Sum of the symbol images under a list of matrices.
    pub fn act_sum(&self, sym: usize, mats: &[Mat2]) -> Vec<(usize, i64)> {
        mats.iter()
            .filter_map(|m| self.p1.act(sym, m))
            .map(|t| (t, 1))
            .collect()
    }

    /// Boundary map to the two cusps (columns: infinity, zero), on row vectors.
    pub fn boundary_matrix(&self) -> Matrix<Rationals> {
        let d = self.dimension();
        let mut m = Matrix::zero(Rationals, d, 2);
        let cusp = |u: i64| if u.rem_euclid(self.p as i64) == 0 { 0 } else { 1 };
        for (row, &sym) in self.basis.iter().enumerate() {
            let (c, dd) = self.p1.rep(sym);
            let a = cusp(c);
            let b = cusp(dd);
            if a != b {
                m.set(row, a, Rat::one());
                m.set(row, b, -Rat::one());
            }
        }
        m
    }

    /// Basis (row vectors) of the cuspidal subspace, the kernel of the boundary map.
    pub fn cuspidal_basis(&self) -> Vec<Vec<Rat>> {
        self.boundary_matrix().left_kernel()
    }

    /// Genus of X0(p) read off from the cuspidal dimension.
    pub fn genus(&self) -> usize {
        let c = self.cuspidal_basis().len();
        if self.sign == 0 {
            c / 2
        } else {
            c
        }
    }

    /// Evaluates a functional (column vector over the quotient basis) on a symbol.
    pub fn eval_functional(&self, lambda: &[Rat], sym: usize) -> Rat {
        self.coords[sym]
            .iter()
            .fold(Rat::zero(), |acc, (i, v)| acc + v * &lambda[*i])
    }
}

/// Genus of X0(p) from the Riemann–Hurwitz formula.
pub fn genus_formula(p: u64) -> i64 {
    use crate::algebra::field::legendre;
    let mu = p as i64 + 1;
    let nu2 = 1 + legendre(-1, p) as i64;
    let nu3 = 1 + legendre(-3, p) as i64;
    // 1 + mu/12 - nu2/4 - nu3/3 - 1, times 12
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 12;
    twelve_g / 12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::primes_between;

    #[test]
    fn dimensions_match_genus() {
        for p in primes_between(5, 120) {
            let g = genus_formula(p) as usize;
            let plus = ModSymSpace::new(p, 1).unwrap();
            assert_eq!(plus.dimension(), g + 1, "p = {p}");
            assert_eq!(plus.genus(), g, "p = {p}");
            let full = ModSymSpace::new(p, 0).unwrap();
            assert_eq!(full.dimension(), 2 * g + 1, "p = {p}");
            assert_eq!(full.cuspidal_basis().len(), 2 * g, "p = {p}");
        }
    }

    #[test]
    fn small_genera() {
        assert_eq!(genus_formula(11), 1);
        assert_eq!(genus_formula(23), 2);
        assert_eq!(genus_formula(67), 5);
        assert_eq!(ModSymSpace::new(67, 1).unwrap().genus(), 5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ModSymSpace::new(68, 1).is_err());
        assert!(ModSymSpace::new(3, 1).is_err());
        assert!(ModSymSpace::new(11, 2).is_err());
    }
}
