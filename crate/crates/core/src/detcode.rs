//! The non-secure determinant code: message matrix, encoding, data recovery
//! and exact repair.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::Mat;
use crate::subsets::{binom, choose, ind, LexIndexer, Subset};

/// `(n, d, m)` and the field. `k = d` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemParams {
    n: usize,
    d: usize,
    m: usize,
    field: Field,
}

impl SystemParams {
    /// Validates `1 ≤ m ≤ d ≤ n` and `q > n`. With `q = None` the smallest
    /// prime above `n` is used.
    pub fn new(n: usize, d: usize, m: usize, q: Option<u32>) -> Result<Self> {
        if d == 0 || m == 0 || m > d || d > n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= m <= d <= n, got n={n} d={d} m={m}"
            )));
        }
        if n >= 1 << 16 {
            return Err(Error::InvalidParams(format!("n = {n} is too large")));
        }
        let field = match q {
            Some(q) => {
                let f = Field::new(q)?;
                if (q as usize) <= n {
                    return Err(Error::FieldTooSmall { q, n });
                }
                f
            }
            None => Field::for_nodes(n),
        };
        Ok(SystemParams { n, d, m, field })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.modulus()
    }

    /// Symbols per node, `C(d, m)`.
    pub fn alpha(&self) -> usize {
        choose(self.d, self.m)
    }

    /// Repair symbols per helper, `C(d-1, m-1)`.
    pub fn beta(&self) -> usize {
        choose(self.d - 1, self.m - 1)
    }

    /// File size `m · C(d+1, m+1)`.
    pub fn file_size(&self) -> usize {
        self.m * choose(self.d + 1, self.m + 1)
    }

    /// Raw length of a repair packet, `C(d, m-1)`.
    pub fn repair_width(&self) -> usize {
        choose(self.d, self.m - 1)
    }

    /// Column labels of the message matrix in lex order.
    pub fn columns(&self) -> LexIndexer {
        LexIndexer::new(self.d, self.m)
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange(format!("node {i} not in [1, {}]", self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellType {
    V,
    W,
    P,
}

impl CellType {
    /// Type of cell `(x, I)`.
    pub fn classify(x: usize, set: &Subset) -> CellType {
        if set.contains(x) {
            CellType::V
        } else if set.max_elem().is_some_and(|mx| x < mx) {
            CellType::W
        } else {
            CellType::P
        }
    }
}

/// Cell positions `(row, col)`, 0-based, of every V/W cell in fill order:
/// columns in lex order, rows top to bottom.
pub fn info_cells(params: &SystemParams) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(params.file_size());
    for (col, set) in params.columns().iter().enumerate() {
        for x in 1..=params.d {
            if CellType::classify(x, &set) != CellType::P {
                out.push((x - 1, col));
            }
        }
    }
    out
}

/// Every P cell, 0-based, ordered by the lex order of its parity group.
pub fn parity_cells(params: &SystemParams) -> Vec<(usize, usize)> {
    let cols = params.columns();
    LexIndexer::new(params.d, params.m + 1)
        .iter()
        .map(|group| {
            let x = group.max_elem().expect("groups are nonempty");
            let col = cols.rank(&group.without(x)).expect("m-subset of [d]");
            (x - 1, col)
        })
        .collect()
}

/// One term of a parity expression, at a 0-based cell position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityTerm {
    pub negate: bool,
    pub row: usize,
    pub col: usize,
}

/// The W cells that determine P cell `(x, I)`, with their signs.
pub fn parity_sources(params: &SystemParams, x: usize, set: &Subset) -> Result<Vec<ParityTerm>> {
    if set.len() != params.m || set.max_elem().is_some_and(|mx| mx > params.d) {
        return Err(Error::OutOfRange(format!("{set:?} is not an m-subset of [d]")));
    }
    if x > params.d || CellType::classify(x, set) != CellType::P {
        return Err(Error::InvalidParams(format!(
            "({x}, {set:?}) is not a parity cell"
        )));
    }
    let cols = params.columns();
    let group = set.with(x);
    set.elems()
        .iter()
        .map(|&y| {
            Ok(ParityTerm {
                negate: (params.m + ind(set, y)) % 2 == 1,
                row: y - 1,
                col: cols.rank(&group.without(y))?,
            })
        })
        .collect()
}

/// A message matrix under construction; unfilled cells are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMessage {
    params: SystemParams,
    cells: Vec<Option<Fe>>,
}

impl PartialMessage {
    pub fn new(params: SystemParams) -> Self {
        PartialMessage {
            params,
            cells: vec![None; params.d * params.alpha()],
        }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn get_at(&self, row: usize, col: usize) -> Option<Fe> {
        self.cells[row * self.params.alpha() + col]
    }

    pub fn set_at(&mut self, row: usize, col: usize, v: Fe) {
        let alpha = self.params.alpha();
        self.cells[row * alpha + col] = Some(v);
    }

    /// Sets cell `(x, I)` using 1-based labels.
    pub fn set(&mut self, x: usize, set: &Subset, v: Fe) -> Result<()> {
        let col = self.params.columns().rank(set)?;
        if x == 0 || x > self.params.d {
            return Err(Error::OutOfRange(format!("row {x}")));
        }
        self.set_at(x - 1, col, v);
        Ok(())
    }

    pub fn get(&self, x: usize, set: &Subset) -> Result<Option<Fe>> {
        let col = self.params.columns().rank(set)?;
        if x == 0 || x > self.params.d {
            return Err(Error::OutOfRange(format!("row {x}")));
        }
        Ok(self.get_at(x - 1, col))
    }
}

/// Value of P cell `(x, I)` that closes the parity group `I ∪ {x}`.
pub fn parity_value(partial: &PartialMessage, x: usize, set: &Subset) -> Result<Fe> {
    let field = partial.params.field;
    let mut acc = Fe::ZERO;
    for t in parity_sources(&partial.params, x, set)? {
        let v = partial.get_at(t.row, t.col).ok_or(Error::UnfilledCell {
            row: t.row + 1,
            col: t.col,
        })?;
        acc = if t.negate {
            field.sub(acc, v)
        } else {
            field.add(acc, v)
        };
    }
    Ok(acc)
}

/// A complete `d × α` message matrix satisfying every parity equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageMatrix {
    params: SystemParams,
    mat: Mat,
}

impl MessageMatrix {
    /// Wraps a raw matrix, checking its shape and every parity group.
    pub fn from_mat(params: SystemParams, mat: Mat) -> Result<Self> {
        if mat.rows() != params.d || mat.cols() != params.alpha() || mat.field() != params.field {
            return Err(Error::DimensionMismatch(format!(
                "expected a {}x{} matrix over GF({})",
                params.d,
                params.alpha(),
                params.q()
            )));
        }
        let mm = MessageMatrix { params, mat };
        if !mm.check_parity() {
            return Err(Error::Inconsistent);
        }
        Ok(mm)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    /// Entry `M(x, I)` with 1-based row label.
    pub fn get(&self, x: usize, set: &Subset) -> Result<Fe> {
        let col = self.params.columns().rank(set)?;
        if x == 0 || x > self.params.d {
            return Err(Error::OutOfRange(format!("row {x}")));
        }
        Ok(self.mat.get(x - 1, col))
    }

    /// `Σ_{y∈J} (-1)^{ind_J(y)} M(y, J∖{y}) = 0` for every `(m+1)`-subset `J`.
    pub fn check_parity(&self) -> bool {
        let f = self.params.field;
        let cols = self.params.columns();
        LexIndexer::new(self.params.d, self.params.m + 1)
            .iter()
            .all(|group| {
                let sum = group.elems().iter().fold(Fe::ZERO, |acc, &y| {
                    let v = self.mat.get(y - 1, cols.rank(&group.without(y)).unwrap());
                    f.add(acc, f.mul(f.sign(ind(&group, y)), v))
                });
                sum.is_zero()
            })
    }

    /// The V/W symbols in fill order; inverse of [`build_message_matrix`].
    pub fn info_symbols(&self) -> Vec<Fe> {
        info_cells(&self.params)
            .into_iter()
            .map(|(r, c)| self.mat.get(r, c))
            .collect()
    }
}

/// Fills V/W cells from `info` in fill order and computes every P cell.
pub fn build_message_matrix(params: &SystemParams, info: &[Fe]) -> Result<MessageMatrix> {
    let expected = params.file_size();
    if info.len() != expected {
        return Err(Error::WrongSymbolCount {
            expected,
            got: info.len(),
        });
    }
    let mut partial = PartialMessage::new(*params);
    for (&(r, c), &v) in info_cells(params).iter().zip(info) {
        partial.set_at(r, c, params.field.elem(v.0 as u64));
    }
    let cols = params.columns();
    for (r, c) in parity_cells(params) {
        let set = cols.unrank(c)?;
        let v = parity_value(&partial, r + 1, &set)?;
        partial.set_at(r, c, v);
    }
    let data = partial
        .cells
        .into_iter()
        .map(|v| v.expect("every cell filled"))
        .collect();
    Ok(MessageMatrix {
        params: *params,
        mat: Mat::from_vec(params.field, params.d, params.alpha(), data)?,
    })
}

/// The `n × d` Vandermonde encoder `Ψ(i, j) = i^{j-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderMatrix {
    params: SystemParams,
    psi: Mat,
}

impl EncoderMatrix {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn psi(&self) -> &Mat {
        &self.psi
    }

    /// Row of node `i` (1-based).
    pub fn node_row(&self, i: usize) -> Result<&[Fe]> {
        self.params.check_node(i)?;
        Ok(self.psi.row(i - 1))
    }

    /// `Ψ(i, x)` with both labels 1-based.
    pub fn entry(&self, i: usize, x: usize) -> Fe {
        self.psi.get(i - 1, x - 1)
    }

    /// `Ψ(nodes, :)` for 1-based node ids.
    pub fn rows_of(&self, nodes: &[usize]) -> Result<Mat> {
        for &i in nodes {
            self.params.check_node(i)?;
        }
        let rows: Vec<usize> = nodes.iter().map(|i| i - 1).collect();
        let cols: Vec<usize> = (0..self.params.d).collect();
        self.psi.submatrix(&rows, &cols)
    }

    /// Every `d × d` submatrix has full rank.
    pub fn satisfies_c1(&self) -> bool {
        let nodes: Vec<usize> = (1..=self.params.n).collect();
        crate::subsets::combinations(&nodes, self.params.d)
            .iter()
            .all(|k| {
                self.rows_of(k)
                    .map(|s| s.rank() == self.params.d)
                    .unwrap_or(false)
            })
    }

    /// For every `l ≤ d`, every `l × l` submatrix of `Ψ(:, [1:l])` has full rank.
    pub fn satisfies_c2(&self) -> bool {
        let nodes: Vec<usize> = (0..self.params.n).collect();
        (1..=self.params.d).all(|l| {
            let cols: Vec<usize> = (0..l).collect();
            crate::subsets::combinations(&nodes, l)
                .iter()
                .all(|rows| self.psi.submatrix(rows, &cols).unwrap().rank() == l)
        })
    }
}

pub fn build_encoder(params: &SystemParams) -> Result<EncoderMatrix> {
    if (params.q() as usize) <= params.n {
        return Err(Error::FieldTooSmall {
            q: params.q(),
            n: params.n,
        });
    }
    let f = params.field;
    let psi = Mat::from_fn(f, params.n, params.d, |i, j| {
        f.pow(f.elem(i as u64 + 1), j as u64)
    });
    Ok(EncoderMatrix { params: *params, psi })
}

/// Content of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeShare {
    pub node: usize,
    pub symbols: Vec<Fe>,
}

/// `C = Ψ · M`; share `i` is row `i`.
pub fn encode(message: &MessageMatrix, encoder: &EncoderMatrix) -> Result<Vec<NodeShare>> {
    if message.params != encoder.params {
        return Err(Error::DimensionMismatch(
            "message and encoder parameters differ".into(),
        ));
    }
    let c = encoder.psi.matmul(&message.mat)?;
    Ok((0..c.rows())
        .map(|i| NodeShare {
            node: i + 1,
            symbols: c.row(i).to_vec(),
        })
        .collect())
}

fn distinct_nodes(params: &SystemParams, nodes: impl IntoIterator<Item = usize>) -> Result<Vec<usize>> {
    let mut seen = vec![false; params.n + 1];
    let mut out = Vec::new();
    for i in nodes {
        params.check_node(i)?;
        if seen[i] {
            return Err(Error::DuplicateNode(i));
        }
        seen[i] = true;
        out.push(i);
    }
    Ok(out)
}

/// Rebuilds `M` from the first `d` of the given shares.
pub fn recover_data(shares: &[NodeShare], encoder: &EncoderMatrix) -> Result<MessageMatrix> {
    let params = encoder.params;
    let d = params.d;
    distinct_nodes(&params, shares.iter().map(|s| s.node))?;
    if shares.len() < d {
        return Err(Error::InsufficientShares {
            needed: d,
            got: shares.len(),
        });
    }
    let used = &shares[..d];
    let alpha = params.alpha();
    if let Some(bad) = used.iter().find(|s| s.symbols.len() != alpha) {
        return Err(Error::WrongSymbolCount {
            expected: alpha,
            got: bad.symbols.len(),
        });
    }
    let nodes: Vec<usize> = used.iter().map(|s| s.node).collect();
    let psi_k = encoder.rows_of(&nodes)?;
    let data = used.iter().flat_map(|s| s.symbols.iter().copied()).collect();
    let c_k = Mat::from_vec(params.field, d, alpha, data)?;
    let m = psi_k.inverse()?.matmul(&c_k)?;
    MessageMatrix::from_mat(params, m)
}

/// `Ξ^f`, plus a column basis used to compress packets to `β` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairEncoder {
    failed: usize,
    xi: Mat,
    basis: Vec<usize>,
    expand: Mat,
}

impl RepairEncoder {
    pub fn failed(&self) -> usize {
        self.failed
    }

    /// The `α × C(d, m-1)` matrix.
    pub fn xi(&self) -> &Mat {
        &self.xi
    }

    /// The first `β` linearly independent columns of `Ξ^f`, in lex order.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// `T` with `Ξ^f(:, basis) · T = Ξ^f`.
    pub fn expansion(&self) -> &Mat {
        &self.expand
    }
}

pub fn build_repair_encoder(f: usize, encoder: &EncoderMatrix) -> Result<RepairEncoder> {
    let params = encoder.params;
    params.check_node(f)?;
    let field = params.field;
    let rows = params.columns();
    let cols = LexIndexer::new(params.d, params.m - 1);
    let mut xi = Mat::zeros(field, params.alpha(), cols.count());
    for (r, set) in rows.iter().enumerate() {
        for &x in set.elems() {
            let c = cols.rank(&set.without(x))?;
            xi.set(r, c, field.mul(field.sign(ind(&set, x)), encoder.entry(f, x)));
        }
    }
    let basis = xi.pivot_columns();
    let all_rows: Vec<usize> = (0..xi.rows()).collect();
    let expand = xi.submatrix(&all_rows, &basis)?.solve(&xi)?.x;
    Ok(RepairEncoder {
        failed: f,
        xi,
        basis,
        expand,
    })
}

/// Data sent by helper `h` to rebuild node `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPacket {
    pub helper: usize,
    pub failed: usize,
    pub payload: Vec<Fe>,
}

impl RepairPacket {
    /// The `β` coordinates actually transmitted.
    pub fn compress(&self, enc: &RepairEncoder) -> Vec<Fe> {
        enc.basis.iter().map(|&c| self.payload[c]).collect()
    }

    /// Inverse of [`RepairPacket::compress`].
    pub fn from_compressed(helper: usize, enc: &RepairEncoder, symbols: &[Fe]) -> Result<Self> {
        if symbols.len() != enc.basis.len() {
            return Err(Error::WrongSymbolCount {
                expected: enc.basis.len(),
                got: symbols.len(),
            });
        }
        Ok(RepairPacket {
            helper,
            failed: enc.failed,
            payload: enc.expand.left_mul_vec(symbols)?,
        })
    }
}

/// `R_{h→f} = N_h · Ξ^f`.
pub fn repair_data(share: &NodeShare, enc: &RepairEncoder) -> Result<RepairPacket> {
    if share.node == enc.failed {
        return Err(Error::SelfRepair(share.node));
    }
    if share.symbols.len() != enc.xi.rows() {
        return Err(Error::WrongSymbolCount {
            expected: enc.xi.rows(),
            got: share.symbols.len(),
        });
    }
    Ok(RepairPacket {
        helper: share.node,
        failed: enc.failed,
        payload: enc.xi.left_mul_vec(&share.symbols)?,
    })
}

/// Rebuilds node `f` from exactly `d` packets sent by distinct helpers.
pub fn repair_node(f: usize, packets: &[RepairPacket], encoder: &EncoderMatrix) -> Result<NodeShare> {
    let params = encoder.params;
    params.check_node(f)?;
    let d = params.d;
    if packets.len() != d {
        return Err(Error::InsufficientShares {
            needed: d,
            got: packets.len(),
        });
    }
    let helpers = distinct_nodes(&params, packets.iter().map(|p| p.helper))?;
    let width = params.repair_width();
    for p in packets {
        if p.failed != f {
            return Err(Error::WrongTarget {
                expected: f,
                got: p.failed,
            });
        }
        if p.helper == f {
            return Err(Error::SelfRepair(f));
        }
        if p.payload.len() != width {
            return Err(Error::WrongSymbolCount {
                expected: width,
                got: p.payload.len(),
            });
        }
    }
    let stacked = Mat::from_vec(
        params.field,
        d,
        width,
        packets.iter().flat_map(|p| p.payload.iter().copied()).collect(),
    )?;
    // R^f = M · Ξ^f
    let r = encoder.rows_of(&helpers)?.inverse()?.matmul(&stacked)?;
    let field = params.field;
    let small = LexIndexer::new(d, params.m - 1);
    let mut symbols = Vec::with_capacity(params.alpha());
    for set in params.columns().iter() {
        let mut acc = Fe::ZERO;
        for &x in set.elems() {
            let v = r.get(x - 1, small.rank(&set.without(x))?);
            acc = field.add(acc, field.mul(field.sign(ind(&set, x)), v));
        }
        symbols.push(acc);
    }
    Ok(NodeShare { node: f, symbols })
}

/// Rank of `[Ξ^f]_{f ∈ A}`: the information helper `u` sends when every node
/// of `A` fails at once.
pub fn multi_repair_rank(u: usize, failed: &[usize], encoder: &EncoderMatrix) -> Result<usize> {
    let params = encoder.params;
    params.check_node(u)?;
    let failed = distinct_nodes(&params, failed.iter().copied())?;
    if failed.contains(&u) {
        return Err(Error::SelfRepair(u));
    }
    if failed.is_empty() {
        return Ok(0);
    }
    let xis = failed
        .iter()
        .map(|&f| build_repair_encoder(f, encoder).map(|e| e.xi))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Mat> = xis.iter().collect();
    Ok(Mat::hstack(&refs)?.rank())
}

/// `C(d, m) - C(d - a, m)`.
pub fn multi_repair_entropy(d: usize, m: usize, a: usize) -> usize {
    (binom(d as i64, m as i64) - binom(d as i64 - a as i64, m as i64)) as usize
}
