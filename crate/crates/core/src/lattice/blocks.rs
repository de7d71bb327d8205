use std::fmt;

use super::index_set::AdmissibleSet;

/// Entry shapes appearing in the block description of `G_I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    /// Diagonal entry fixed to 1.
    Identity,
    Zero,
    /// Unconstrained real entry (unipotent radical).
    Star,
    /// Entry of the `SL_{k1+k2}(ℝ)` block.
    Sl,
}

impl Cell {
    fn symbol(self) -> char {
        match self {
            Cell::Identity => '1',
            Cell::Zero => '0',
            Cell::Star => '*',
            Cell::Sl => 'S',
        }
    }
}

/// Symbolic shape of `G_I = w_I G_{I_0} w_I^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPattern {
    /// `perm[i-1] = σ_I(i)`, 1-based values.
    pub perm: Vec<usize>,
    pub k1: usize,
    pub k2: usize,
    pub pattern: Vec<Vec<Cell>>,
}

impl BlockPattern {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.pattern[row - 1][col - 1]
    }

    /// Rows/columns occupied by the `SL` block, 1-based.
    pub fn sl_support(&self) -> Vec<usize> {
        (1..=self.dim()).filter(|&i| self.cell(i, i) == Cell::Sl).collect()
    }

    pub fn is_identity_perm(&self) -> bool {
        self.perm.iter().enumerate().all(|(k, &p)| p == k + 1)
    }
}

impl fmt::Display for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.pattern {
            let line: Vec<String> = row.iter().map(|c| c.symbol().to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Shape of `G_{I_0}` for `I_0 = {m-k1+1, …, m+k2}` at position `(p, q)`
/// (1-based, in permuted coordinates).
fn standard_cell(m: usize, k1: usize, k2: usize, p: usize, q: usize) -> Cell {
    let lead = m - k1;
    let tail_start = m + k2;
    let block = |i: usize| {
        if i <= lead {
            0
        } else if i <= tail_start {
            1
        } else {
            2
        }
    };
    match (block(p), block(q)) {
        (0, 0) | (2, 2) => {
            if p == q {
                Cell::Identity
            } else {
                Cell::Zero
            }
        }
        (0, _) => Cell::Star,
        (1, 0) => Cell::Zero,
        (1, 1) => Cell::Sl,
        (1, 2) => Cell::Star,
        _ => Cell::Zero,
    }
}

/// `σ_I` (order-preserving on each of its four blocks) together with the
/// conjugated block pattern of `G_I`.
pub fn group_blocks(set: &AdmissibleSet) -> BlockPattern {
    let (m, n) = (set.m(), set.n());
    let d = m + n;
    let first = set.first_block();
    let second = set.second_block();
    let (k1, k2) = (first.len(), second.len());

    let mut perm = vec![0; d];
    let mut next = 1;
    let groups: [Vec<usize>; 4] = [
        (1..=m).filter(|i| !first.contains(*i)).collect(),
        first.indices(),
        second.indices(),
        (m + 1..=d).filter(|i| !second.contains(*i)).collect(),
    ];
    for group in groups {
        for i in group {
            perm[i - 1] = next;
            next += 1;
        }
    }

    let pattern = (1..=d)
        .map(|i| (1..=d).map(|j| standard_cell(m, k1, k2, perm[i - 1], perm[j - 1])).collect())
        .collect();
    BlockPattern { perm, k1, k2, pattern }
}
