//! Structure of the stacked repair encoder `Ξ^L = [Ξ^{q_1} | … | Ξ^{q_ℓ}]`.
//!
//! Rows of `Ξ^L` are m-subsets of `[d]`; the top rows are the ones meeting
//! `[ℓ]`. A top row `S` is labelled `⟨min S, S ∖ {min S}⟩`. Column
//! `⟨j, J⟩` is column `J` of the block `Ξ^{q_j}`, kept only when
//! `J ⊆ [j+1, d]`. The square block `Ξ̂` on these rows and columns is full
//! rank and becomes block lower-triangular once both sides are sorted by
//! `(J, j)`.

use alloc::format;
use alloc::vec::Vec;

use crate::detcode::{build_repair_encoder, EncoderMatrix, SystemParams};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::subsets::{choose, LexIndexer, Subset};

/// Column indices of `Ξ^L` kept in `Ξ̂`, with their labels `(j, J)`.
pub fn xi_index_sets(params: &SystemParams, ell: usize) -> Vec<(usize, (usize, Subset))> {
    let small = LexIndexer::new(params.d(), params.m() - 1);
    let width = small.count();
    let mut out = Vec::new();
    for j in 1..=ell.min(params.d()) {
        for (r, set) in small.iter().enumerate() {
            if set.min_elem().is_none_or(|mn| mn > j) {
                out.push(((j - 1) * width + r, (j, set)));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiAudit {
    params: SystemParams,
    set: Vec<usize>,
    xi_l: Mat,
    top: usize,
    columns: Vec<(usize, (usize, Subset))>,
    hat: Mat,
    top_rank: usize,
}

impl XiAudit {
    /// The eavesdropper set, ascending.
    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn xi_l(&self) -> &Mat {
        &self.xi_l
    }

    /// Number of top rows, `C(d, m) - C(d - ℓ, m)`; they are rows `0..top`.
    pub fn top_rows(&self) -> usize {
        self.top
    }

    /// Indices of the kept columns of `Ξ^L`.
    pub fn kept_columns(&self) -> Vec<usize> {
        self.columns.iter().map(|c| c.0).collect()
    }

    /// The square block `Ξ̂`.
    pub fn hat(&self) -> &Mat {
        &self.hat
    }

    pub fn top_rank(&self) -> usize {
        self.top_rank
    }
}

/// Builds `Ξ^L` and checks that its top rows, and the square block `Ξ̂`,
/// have rank `C(d, m) - C(d - ℓ, m)`.
pub fn xi_top_fullrank(set: &[usize], encoder: &EncoderMatrix) -> Result<(bool, XiAudit)> {
    let params = *encoder.params();
    let (d, m) = (params.d(), params.m());
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateNode(w[0]));
    }
    let ell = sorted.len();
    if ell == 0 || ell > d {
        return Err(Error::InvalidParams(format!("need 1 <= |L| <= d, got {ell}")));
    }
    let blocks = sorted
        .iter()
        .map(|&f| build_repair_encoder(f, encoder).map(|e| e.xi().clone()))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Mat> = blocks.iter().collect();
    let xi_l = Mat::hstack(&refs)?;
    let top = choose(d, m) - choose(d - ell, m);
    let rows: Vec<usize> = (0..top).collect();
    let all_cols: Vec<usize> = (0..xi_l.cols()).collect();
    let top_rank = xi_l.submatrix(&rows, &all_cols)?.rank();
    let columns = xi_index_sets(&params, ell);
    let kept: Vec<usize> = columns.iter().map(|c| c.0).collect();
    let hat = xi_l.submatrix(&rows, &kept)?;
    let ok = top_rank == top && kept.len() == top && hat.rank() == top;
    Ok((
        ok,
        XiAudit {
            params,
            set: sorted,
            xi_l,
            top,
            columns,
            hat,
            top_rank,
        },
    ))
}

/// A diagonal block: all labels sharing the same `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiGroup {
    pub label: Subset,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularReport {
    /// `Ξ̂` with rows and columns sorted by `(J, j)`.
    pub permuted: Mat,
    pub groups: Vec<XiGroup>,
    /// Every block strictly right of the diagonal is zero.
    pub upper_zero: bool,
    /// Each diagonal block is `-Ψ({q_1..q_z}, [1..z])ᵀ`.
    pub diagonal_matches: bool,
    pub diagonal_full_rank: bool,
    pub size_sum: usize,
    pub expected: usize,
}

impl TriangularReport {
    pub fn is_clean(&self) -> bool {
        self.upper_zero && self.diagonal_matches && self.diagonal_full_rank && self.size_sum == self.expected
    }
}

pub fn xi_block_triangularize(audit: &XiAudit, encoder: &EncoderMatrix) -> Result<TriangularReport> {
    let params = audit.params;
    let field = params.field();
    let ell = audit.set.len();
    let rows_idx = params.columns();

    let mut row_labels: Vec<((Subset, usize), usize)> = (0..audit.top)
        .map(|r| {
            let s = rows_idx.unrank(r)?;
            let i = s.min_elem().expect("m >= 1");
            Ok(((s.without(i), i), r))
        })
        .collect::<Result<_>>()?;
    row_labels.sort();
    let mut col_labels: Vec<((Subset, usize), usize)> = audit
        .columns
        .iter()
        .enumerate()
        .map(|(c, (_, (j, set)))| ((set.clone(), *j), c))
        .collect();
    col_labels.sort();

    let row_order: Vec<usize> = row_labels.iter().map(|x| x.1).collect();
    let col_order: Vec<usize> = col_labels.iter().map(|x| x.1).collect();
    let permuted = audit.hat.submatrix(&row_order, &col_order)?;

    let mut groups: Vec<XiGroup> = Vec::new();
    let mut group_of_row = Vec::with_capacity(row_labels.len());
    for ((label, _), _) in &row_labels {
        if groups.last().is_none_or(|g| &g.label != label) {
            groups.push(XiGroup {
                label: label.clone(),
                size: 0,
            });
        }
        groups.last_mut().unwrap().size += 1;
        group_of_row.push(groups.len() - 1);
    }
    let mut group_of_col = Vec::with_capacity(col_labels.len());
    let mut g = 0;
    for ((label, _), _) in &col_labels {
        while g < groups.len() && &groups[g].label != label {
            g += 1;
        }
        group_of_col.push(g);
    }
    let same_labels =
        row_labels.len() == col_labels.len() && row_labels.iter().zip(&col_labels).all(|(r, c)| r.0 == c.0);

    let mut upper_zero = same_labels;
    for (r, &gr) in group_of_row.iter().enumerate() {
        for (c, &gc) in group_of_col.iter().enumerate() {
            if gc > gr && !permuted.get(r, c).is_zero() {
                upper_zero = false;
            }
        }
    }

    let (mut diagonal_matches, mut diagonal_full_rank) = (same_labels, true);
    let mut start = 0;
    for grp in &groups {
        let z = grp.label.min_elem().map_or(ell, |mn| (mn - 1).min(ell));
        let idx: Vec<usize> = (start..start + grp.size).collect();
        let block = permuted.submatrix(&idx, &idx)?;
        if z != grp.size {
            diagonal_matches = false;
        } else {
            let qs = &audit.set[..z];
            let want = Mat::from_fn(field, z, z, |i, j| field.neg(encoder.entry(qs[j], i + 1)));
            if block != want {
                diagonal_matches = false;
            }
        }
        if block.rank() != grp.size {
            diagonal_full_rank = false;
        }
        start += grp.size;
    }

    Ok(TriangularReport {
        permuted,
        size_sum: groups.iter().map(|g| g.size).sum(),
        groups,
        upper_zero,
        diagonal_matches,
        diagonal_full_rank,
        expected: audit.top,
    })
}
