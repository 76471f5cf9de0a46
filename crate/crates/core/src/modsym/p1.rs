//! The projective line P^1(F_p), indexing Manin symbols (c:d).
//!
//! `(t:1)` has index t and `(1:0)` has index p.

#[derive(Clone, Debug)]
pub struct P1 {
    p: u64,
    inverses: Vec<u64>,
}

/// A 2x2 integer matrix `[[a, b], [c, d]]`.
pub type Mat2 = [i64; 4];

impl P1 {
    pub fn new(p: u64) -> Self {
        let mut inverses = vec![0u64; p as usize];
        for a in 1..p {
            if inverses[a as usize] == 0 {
                let (_, x, _) = crate::algebra::field::ext_gcd(a as i64, p as i64);
                let inv = x.rem_euclid(p as i64) as u64;
                inverses[a as usize] = inv;
                inverses[inv as usize] = a;
            }
        }
        P1 { p, inverses }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.p as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the point (c:d), or `None` when both coordinates vanish mod p.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let p = self.p as i64;
        let c = c.rem_euclid(p) as u64;
        let d = d.rem_euclid(p) as u64;
        if d != 0 {
            Some((c * self.inverses[d as usize] % self.p) as usize)
        } else if c != 0 {
            Some(self.p as usize)
        } else {
            None
        }
    }

    /// Normalised representative of the point with the given index.
    pub fn rep(&self, i: usize) -> (i64, i64) {
        if i == self.p as usize {
            (1, 0)
        } else {
            (i as i64, 1)
        }
    }

    /// Right action `(c:d) [[a,b],[c',d']] = (c a + d c' : c b + d d')`.
    pub fn act(&self, i: usize, m: &Mat2) -> Option<usize> {
        let (c, d) = self.rep(i);
        self.index(c * m[0] + d * m[2], c * m[1] + d * m[3])
    }

    /// `(c:d) S = (d : -c)`.
    pub fn s(&self, i: usize) -> usize {
        self.act(i, &[0, -1, 1, 0]).expect("invertible")
    }

    /// `(c:d) tau = (d : -c - d)`.
    pub fn tau(&self, i: usize) -> usize {
        self.act(i, &[0, -1, 1, -1]).expect("invertible")
    }

    /// `(c:d) -> (-c : d)`.
    pub fn star(&self, i: usize) -> usize {
        self.act(i, &[-1, 0, 0, 1]).expect("invertible")
    }
}
