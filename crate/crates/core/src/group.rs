//! Finite abelian groups on element indices `0..order`.

use std::collections::VecDeque;

pub trait AbelianGroup {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn op(&self, x: usize, y: usize) -> usize;

    fn inverse(&self, x: usize) -> usize {
        let mut y = x;
        loop {
            let next = self.op(y, x);
            if next == self.identity() {
                return y;
            }
            y = next;
        }
    }

    fn pow(&self, x: usize, mut e: u64) -> usize {
        let (mut acc, mut base) = (self.identity(), x);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(acc, base);
            }
            base = self.op(base, base);
            e >>= 1;
        }
        acc
    }

    fn element_order(&self, x: usize) -> usize {
        let mut y = x;
        let mut n = 1;
        while y != self.identity() {
            y = self.op(y, x);
            n += 1;
        }
        n
    }

    /// Membership mask of the subgroup generated by `gens`.
    fn subgroup(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        mask[self.identity()] = true;
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.op(x, g);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        mask
    }

    /// Number of `x` with `x^2` in the subgroup `h` (identity when `h` is `None`).
    fn count_squares_into(&self, h: Option<&[bool]>) -> usize {
        (0..self.order())
            .filter(|&x| {
                let sq = self.op(x, x);
                match h {
                    Some(mask) => mask[sq],
                    None => sq == self.identity(),
                }
            })
            .count()
    }
}

pub fn mask_size(mask: &[bool]) -> usize {
    mask.iter().filter(|&&b| b).count()
}

/// Cayley-table group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroup {
    n: usize,
    identity: usize,
    table: Vec<u32>,
}

impl TableGroup {
    pub fn from_table(n: usize, identity: usize, table: Vec<u32>) -> Self {
        assert_eq!(table.len(), n * n);
        TableGroup { n, identity, table }
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// The quotient by the subgroup `h`: returns the quotient group and the
    /// projection of every element onto coset indices. Cosets are numbered
    /// in order of their smallest element.
    pub fn quotient(&self, h: &[bool]) -> (TableGroup, Vec<usize>) {
        let members: Vec<usize> = (0..self.n).filter(|&i| h[i]).collect();
        let mut proj = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if proj[x] != usize::MAX {
                continue;
            }
            let k = reps.len();
            reps.push(x);
            for &m in &members {
                proj[self.op(x, m)] = k;
            }
        }
        let q = reps.len();
        let mut table = vec![0u32; q * q];
        for i in 0..q {
            for j in 0..q {
                table[i * q + j] = proj[self.op(reps[i], reps[j])] as u32;
            }
        }
        (TableGroup::from_table(q, proj[self.identity], table), proj)
    }

    /// Checks closure, identity, inverses, commutativity and (exhaustive or
    /// sampled) associativity.
    pub fn check_axioms(&self, associativity_sample: Option<usize>) -> Result<(), String> {
        let n = self.n;
        for x in 0..n {
            if self.op(self.identity, x) != x {
                return Err(format!("identity fails on {x}"));
            }
            if !(0..n).any(|y| self.op(x, y) == self.identity) {
                return Err(format!("{x} has no inverse"));
            }
            for y in 0..n {
                if self.op(x, y) != self.op(y, x) {
                    return Err(format!("{x}*{y} is not commutative"));
                }
            }
        }
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = match associativity_sample {
            Some(k) if n * n * n > k => {
                let mut state = 0x9e37_79b9_7f4a_7c15u64;
                Box::new((0..k).map(move |_| {
                    let mut next = || {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                        (state % n as u64) as usize
                    };
                    (next(), next(), next())
                }))
            }
            _ => Box::new((0..n).flat_map(move |x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))),
        };
        for (x, y, z) in triples {
            if self.op(self.op(x, y), z) != self.op(x, self.op(y, z)) {
                return Err(format!("associativity fails on ({x},{y},{z})"));
            }
        }
        Ok(())
    }
}

impl AbelianGroup for TableGroup {
    fn order(&self) -> usize {
        self.n
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }
}

/// Quotient of the group on `0..n` with operation `op` by the subgroup
/// generated by `gens`, without materializing the full Cayley table.
pub fn quotient_by(
    n: usize,
    identity: usize,
    op: impl Fn(usize, usize) -> usize,
    gens: &[usize],
) -> (TableGroup, Vec<usize>) {
    let mut members = vec![identity];
    let mut mask = vec![false; n];
    mask[identity] = true;
    let mut head = 0;
    while head < members.len() {
        let x = members[head];
        head += 1;
        for &g in gens {
            let y = op(x, g);
            if !mask[y] {
                mask[y] = true;
                members.push(y);
            }
        }
    }
    let mut proj = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if proj[x] != usize::MAX {
            continue;
        }
        for &h in &members {
            proj[op(x, h)] = reps.len();
        }
        reps.push(x);
    }
    let q = reps.len();
    let mut table = vec![0u32; q * q];
    for i in 0..q {
        for j in i..q {
            let k = proj[op(reps[i], reps[j])] as u32;
            table[i * q + j] = k;
            table[j * q + i] = k;
        }
    }
    (TableGroup::from_table(q, proj[identity], table), proj)
}
