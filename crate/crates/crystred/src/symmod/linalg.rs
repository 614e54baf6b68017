//! Dense linear algebra over F_p for small p.

pub fn add(p: u64, a: u64, b: u64) -> u64 {
    (a + b) % p
}

pub fn sub(p: u64, a: u64, b: u64) -> u64 {
    (a + p - b) % p
}

pub fn mul(p: u64, a: u64, b: u64) -> u64 {
    a * b % p
}

pub fn pow(p: u64, base: u64, mut e: u64) -> u64 {
    let mut acc = 1 % p;
    let mut b = base % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn inv(p: u64, a: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero in F_{p}");
    pow(p, a, p - 2)
}

/// Reduce a signed integer into [0, p).
pub fn from_i64(p: u64, x: i64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Smallest generator of F_p^x.
pub fn primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow(p, g, (p - 1) / q) != 1))
        .unwrap_or(1)
}

/// Row-reduced echelon basis of a subspace of F_p^dim.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    dim: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u64, dim: usize) -> Self {
        Echelon {
            p,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by<'a>(p: u64, dim: usize, vectors: impl IntoIterator<Item = &'a Vec<u64>>) -> Self {
        let mut e = Self::new(p, dim);
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of v after clearing every pivot column.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = out[piv];
            if c != 0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o = sub(p, *o, mul(p, c, *r));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds v to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.dim);
        let p = self.p;
        let mut red = self.reduce(v);
        let Some(piv) = red.iter().position(|&x| x != 0) else {
            return false;
        };
        let scale = inv(p, red[piv]);
        for x in red.iter_mut() {
            *x = mul(p, *x, scale);
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (o, r) in row.iter_mut().zip(&red) {
                    *o = sub(p, *o, mul(p, c, *r));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < piv);
        self.pivots.insert(at, piv);
        self.rows.insert(at, red);
        true
    }
}

/// Basis of {x : A x = 0} for A given by rows over `ncols` unknowns.
pub fn nullspace(p: u64, rows: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
    let ech = Echelon::spanned_by(p, ncols, rows.iter());
    let pivots = ech.pivots();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u64; ncols];
            x[f] = 1;
            for (row, &piv) in ech.rows().iter().zip(pivots) {
                x[piv] = sub(p, 0, row[f]);
            }
            x
        })
        .collect()
}

/// Some x with A x = b, or `None` when inconsistent.
pub fn solve(p: u64, rows: &[Vec<u64>], rhs: &[u64], ncols: usize) -> Option<Vec<u64>> {
    let augmented: Vec<Vec<u64>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let ech = Echelon::spanned_by(p, ncols + 1, augmented.iter());
    if ech.pivots().contains(&ncols) {
        return None;
    }
    let mut x = vec![0u64; ncols];
    for (row, &piv) in ech.rows().iter().zip(ech.pivots()) {
        x[piv] = row[ncols];
    }
    Some(x)
}

/// Square matrix product over F_p, row-major.
pub fn mat_mul(p: u64, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(0, |acc, k| (acc + row[k] * b[k][j]) % p))
                .collect()
        })
        .collect()
}

pub fn mat_vec(p: u64, a: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(0, |acc, (x, y)| (acc + x * y) % p))
        .collect()
}
