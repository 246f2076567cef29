//! Exact leakage auditing. Every eavesdropper view is a linear map of the
//! secret vector `S` and key vector `Q`, so entropies and mutual
//! informations reduce to ranks. All quantities are in q-ary symbols.

mod decode;
mod xi;

pub use decode::{decode_keys_type_i, decode_keys_type_ii, type_i_decode_order};
pub use xi::{xi_block_triangularize, xi_index_sets, xi_top_fullrank, TriangularReport, XiAudit, XiGroup};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::detcode::{build_repair_encoder, parity_cells, parity_sources, EncoderMatrix};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::linalg::Mat;
use crate::secure_layout::{CellRole, Scheme, SecureMessageLayout};
use crate::subsets::combinations;

/// The message matrix as a linear function of `[S | Q]`: row
/// `row * α + col` holds the coefficients of cell `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMessage {
    coeffs: Mat,
    secret_count: usize,
}

impl SymbolicMessage {
    pub fn new(layout: &SecureMessageLayout) -> Result<Self> {
        let base = *layout.base();
        let field = base.field();
        let alpha = base.alpha();
        let s = layout.secret_count();
        let width = s + layout.key_count();
        let mut coeffs = Mat::zeros(field, base.d() * alpha, width);
        for row in 0..base.d() {
            for col in 0..alpha {
                match layout.role(row, col) {
                    CellRole::Secret(i) => coeffs.set(row * alpha + col, i, Fe::ONE),
                    CellRole::Key(i) => coeffs.set(row * alpha + col, s + i, Fe::ONE),
                    CellRole::Parity => {}
                }
            }
        }
        // Parity sources are always W cells, so one pass suffices.
        let cols = base.columns();
        for (r, c) in parity_cells(&base) {
            let mut acc = vec![Fe::ZERO; width];
            for t in parity_sources(&base, r + 1, &cols.unrank(c)?)? {
                for (a, &v) in acc.iter_mut().zip(coeffs.row(t.row * alpha + t.col)) {
                    *a = if t.negate {
                        field.sub(*a, v)
                    } else {
                        field.add(*a, v)
                    };
                }
            }
            coeffs.row_mut(r * alpha + c).copy_from_slice(&acc);
        }
        Ok(SymbolicMessage {
            coeffs,
            secret_count: s,
        })
    }

    /// `(d·α) × (F_s + |Q|)`.
    pub fn coeffs(&self) -> &Mat {
        &self.coeffs
    }

    /// Coefficients of node `i`'s content: `α × (F_s + |Q|)`.
    fn node_content(&self, encoder: &EncoderMatrix, i: usize) -> Result<Mat> {
        let base = encoder.params();
        let field = base.field();
        let (alpha, width) = (base.alpha(), self.coeffs.cols());
        let psi = encoder.node_row(i)?;
        let mut out = Mat::zeros(field, alpha, width);
        for col in 0..alpha {
            let dst = out.row_mut(col);
            for (x, &w) in psi.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for (a, &v) in dst.iter_mut().zip(self.coeffs.row(x * alpha + col)) {
                    *a = field.add(*a, field.mul(w, v));
                }
            }
        }
        Ok(out)
    }
}

/// An observation `M_S · S + M_Q · Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearObservation {
    ms: Mat,
    mq: Mat,
    combined: Mat,
    pub description: String,
}

impl LinearObservation {
    pub fn new(ms: Mat, mq: Mat, description: String) -> Result<Self> {
        if ms.rows() != mq.rows() {
            return Err(Error::DimensionMismatch("M_S and M_Q row counts differ".into()));
        }
        let combined = Mat::hstack(&[&ms, &mq])?;
        Ok(LinearObservation {
            ms,
            mq,
            combined,
            description,
        })
    }

    fn from_combined(combined: Mat, secret_count: usize, description: String) -> Result<Self> {
        let rows: Vec<usize> = (0..combined.rows()).collect();
        let s: Vec<usize> = (0..secret_count).collect();
        let q: Vec<usize> = (secret_count..combined.cols()).collect();
        Ok(LinearObservation {
            ms: combined.submatrix(&rows, &s)?,
            mq: combined.submatrix(&rows, &q)?,
            combined,
            description,
        })
    }

    pub fn ms(&self) -> &Mat {
        &self.ms
    }

    pub fn mq(&self) -> &Mat {
        &self.mq
    }

    /// `[M_S | M_Q]`.
    pub fn combined(&self) -> &Mat {
        &self.combined
    }

    pub fn obs_dim(&self) -> usize {
        self.combined.rows()
    }

    /// The observed symbols for concrete `S` and `Q`.
    pub fn materialize(&self, secrets: &[Fe], keys: &[Fe]) -> Result<Vec<Fe>> {
        if secrets.len() != self.ms.cols() || keys.len() != self.mq.cols() {
            return Err(Error::WrongSymbolCount {
                expected: self.combined.cols(),
                got: secrets.len() + keys.len(),
            });
        }
        let field = self.combined.field();
        let x: Vec<Fe> = secrets.iter().chain(keys).copied().collect();
        let col = Mat::from_vec(field, x.len(), 1, x)?;
        Ok(self.combined.matmul(&col)?.data().to_vec())
    }
}

fn check_set(n: usize, set: &[usize]) -> Result<()> {
    let mut seen = vec![false; n + 1];
    for &i in set {
        if i == 0 || i > n {
            return Err(Error::OutOfRange(format!("node {i} not in [1, {n}]")));
        }
        if seen[i] {
            return Err(Error::DuplicateNode(i));
        }
        seen[i] = true;
    }
    Ok(())
}

fn empty_observation(layout: &SecureMessageLayout, description: String) -> Result<LinearObservation> {
    let f = layout.base().field();
    LinearObservation::new(
        Mat::zeros(f, 0, layout.secret_count()),
        Mat::zeros(f, 0, layout.key_count()),
        description,
    )
}

/// Stored content of every node in `set`.
pub fn observe_type_i(
    set: &[usize],
    encoder: &EncoderMatrix,
    layout: &SecureMessageLayout,
) -> Result<LinearObservation> {
    observe_type_i_with(&SymbolicMessage::new(layout)?, set, encoder, layout)
}

pub fn observe_type_i_with(
    sym: &SymbolicMessage,
    set: &[usize],
    encoder: &EncoderMatrix,
    layout: &SecureMessageLayout,
) -> Result<LinearObservation> {
    check_set(encoder.params().n(), set)?;
    let description = format!("stored content of nodes {set:?}");
    if set.is_empty() {
        return empty_observation(layout, description);
    }
    let blocks = set
        .iter()
        .map(|&i| sym.node_content(encoder, i))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Mat> = blocks.iter().collect();
    LinearObservation::from_combined(Mat::vstack(&refs)?, sym.secret_count, description)
}

/// Every repair packet `h → f` with `f ∈ set` and `h ≠ f`.
pub fn observe_type_ii(
    set: &[usize],
    encoder: &EncoderMatrix,
    layout: &SecureMessageLayout,
) -> Result<LinearObservation> {
    observe_type_ii_with(&SymbolicMessage::new(layout)?, set, encoder, layout)
}

pub fn observe_type_ii_with(
    sym: &SymbolicMessage,
    set: &[usize],
    encoder: &EncoderMatrix,
    layout: &SecureMessageLayout,
) -> Result<LinearObservation> {
    let n = encoder.params().n();
    check_set(n, set)?;
    let description = format!("repair traffic into nodes {set:?}");
    if set.is_empty() {
        return empty_observation(layout, description);
    }
    let contents = (1..=n)
        .map(|h| sym.node_content(encoder, h))
        .collect::<Result<Vec<_>>>()?;
    let mut blocks = Vec::new();
    for &f in set {
        let xi_t = build_repair_encoder(f, encoder)?.xi().transpose();
        for h in (1..=n).filter(|&h| h != f) {
            blocks.push(xi_t.matmul(&contents[h - 1])?);
        }
    }
    let refs: Vec<&Mat> = blocks.iter().collect();
    LinearObservation::from_combined(Mat::vstack(&refs)?, sym.secret_count, description)
}

/// `I(S; E) = rank[M_S | M_Q] - rank M_Q` for uniform independent `S`, `Q`.
pub fn mutual_information(obs: &LinearObservation) -> usize {
    obs.combined.rank() - obs.mq.rank()
}

/// `H(E) = rank[M_S | M_Q]`.
pub fn observation_entropy(obs: &LinearObservation) -> usize {
    obs.combined.rank()
}

/// Whether `Q` is determined by the observation once `S` is known.
pub fn keys_recoverable(obs: &LinearObservation, layout: &SecureMessageLayout) -> bool {
    obs.mq.cols() == layout.key_count() && obs.mq.rank() == layout.key_count()
}

/// One line of an audit over eavesdropper sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRow {
    pub scheme: Scheme,
    pub set: Vec<usize>,
    pub entropy: usize,
    pub leakage: usize,
    pub keys_recoverable: bool,
    pub key_count: usize,
    pub ell: usize,
}

impl AuditRow {
    /// Zero leakage and `H(E) ≤ |Q|` for `|L| ≤ ell`, and key recovery at
    /// `|L| = ell`. Larger sets are reported but carry no claim.
    pub fn passes(&self) -> bool {
        if self.set.len() > self.ell {
            return true;
        }
        self.leakage == 0
            && self.entropy <= self.key_count
            && (self.set.len() < self.ell || self.keys_recoverable)
    }

    pub fn csv_header() -> &'static str {
        "scheme,L,H(E),I(S;E),keys_recoverable,bound_Q"
    }

    pub fn to_csv(&self) -> String {
        let set: Vec<String> = self.set.iter().map(|i| format!("{i}")).collect();
        format!(
            "{},{{{}}},{},{},{},{}",
            self.scheme.name(),
            set.join(" "),
            self.entropy,
            self.leakage,
            self.keys_recoverable,
            self.key_count
        )
    }
}

/// Audits every nonempty `L ⊆ [n]` with `|L| ≤ cap`. Type-II layouts are
/// audited against repair traffic, the others against stored content.
pub fn audit(layout: &SecureMessageLayout, encoder: &EncoderMatrix, cap: usize) -> Result<Vec<AuditRow>> {
    let sym = SymbolicMessage::new(layout)?;
    let nodes: Vec<usize> = (1..=encoder.params().n()).collect();
    let mut rows = Vec::new();
    for size in 1..=cap.min(nodes.len()) {
        for set in combinations(&nodes, size) {
            let obs = match layout.scheme() {
                Scheme::TypeII => observe_type_ii_with(&sym, &set, encoder, layout)?,
                _ => observe_type_i_with(&sym, &set, encoder, layout)?,
            };
            rows.push(AuditRow {
                scheme: layout.scheme(),
                entropy: observation_entropy(&obs),
                leakage: mutual_information(&obs),
                keys_recoverable: keys_recoverable(&obs, layout),
                key_count: layout.key_count(),
                ell: layout.ell(),
                set,
            });
        }
    }
    Ok(rows)
}
