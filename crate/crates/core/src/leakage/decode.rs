//! Key recovery from an eavesdropper's view plus the secrets. These realise
//! the claim that `|L| = ℓ` observers learn every key once `S` is known.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::xi::xi_index_sets;
use crate::detcode::{
    build_repair_encoder, parity_value, repair_node, EncoderMatrix, MessageMatrix, PartialMessage,
    RepairPacket, SystemParams,
};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::linalg::Mat;
use crate::secure_layout::{assemble, extract_keys, CellRole, Scheme, SecureMessageLayout};

fn check_eavesdroppers(layout: &SecureMessageLayout, scheme: Scheme, set: &[usize]) -> Result<()> {
    if layout.scheme() != scheme {
        return Err(Error::InvalidParams(format!(
            "layout is {:?}, not {scheme:?}",
            layout.scheme()
        )));
    }
    let ell = layout.ell();
    if ell == 0 || set.len() != ell {
        return Err(Error::InvalidParams(format!(
            "need |L| = ell = {ell} >= 1, got {}",
            set.len()
        )));
    }
    let n = layout.base().n();
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

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn range(lo: usize, hi: usize) -> Vec<usize> {
    (lo..hi).collect()
}

/// Column order of the Type-I decoder: reverse lex. Every parity cell of a
/// column only reads columns that come earlier in this order.
pub fn type_i_decode_order(params: &SystemParams) -> Vec<usize> {
    (0..params.alpha()).rev().collect()
}

/// Recovers the keys from the stored content `observed` (row `r` belongs to
/// node `set[r]`) and the secrets.
pub fn decode_keys_type_i(
    observed: &Mat,
    secrets: &[Fe],
    set: &[usize],
    encoder: &EncoderMatrix,
    layout: &SecureMessageLayout,
) -> Result<Vec<Fe>> {
    check_eavesdroppers(layout, Scheme::TypeI, set)?;
    let base = *layout.base();
    let (d, alpha, ell) = (base.d(), base.alpha(), layout.ell());
    let field = base.field();
    if (observed.rows(), observed.cols()) != (ell, alpha) {
        return Err(Error::DimensionMismatch(format!(
            "observation must be {ell}x{alpha}"
        )));
    }
    if secrets.len() != layout.secret_count() {
        return Err(Error::WrongSymbolCount {
            expected: layout.secret_count(),
            got: secrets.len(),
        });
    }
    let psi_l = encoder.rows_of(set)?;
    let top_inv = psi_l.submatrix(&all(ell), &all(ell))?.inverse()?;
    let psi_bottom = psi_l.submatrix(&all(ell), &range(ell, d))?;

    let mut partial = PartialMessage::new(base);
    let cols = base.columns();
    for col in type_i_decode_order(&base) {
        let label = cols.unrank(col)?;
        let mut bottom = Vec::with_capacity(d - ell);
        for row in ell..d {
            let v = match layout.role(row, col) {
                CellRole::Secret(i) => secrets[i],
                CellRole::Parity => parity_value(&partial, row + 1, &label)?,
                CellRole::Key(_) => unreachable!("Type-I keys live in the top rows"),
            };
            partial.set_at(row, col, v);
            bottom.push(v);
        }
        let b = Mat::from_vec(field, d - ell, 1, bottom)?;
        let e = observed.submatrix(&all(ell), &[col])?;
        let top = top_inv.matmul(&e.sub(&psi_bottom.matmul(&b)?)?)?;
        for row in 0..ell {
            partial.set_at(row, col, top.get(row, 0));
        }
    }
    let data = (0..d)
        .flat_map(|r| (0..alpha).map(move |c| (r, c)))
        .map(|(r, c)| partial.get_at(r, c).expect("every cell decoded"))
        .collect();
    let message = MessageMatrix::from_mat(base, Mat::from_vec(field, d, alpha, data)?)?;
    if psi_l.matmul(message.mat())? != *observed {
        return Err(Error::Inconsistent);
    }
    extract_keys(&message, layout)
}

/// Recovers the keys from all repair traffic into the nodes of `set` and the
/// secrets. `packets` must hold, for every `f ∈ set`, at least `d` packets
/// `h → f`, including every helper `h ≤ d` other than `f`.
pub fn decode_keys_type_ii(
    packets: &[RepairPacket],
    secrets: &[Fe],
    set: &[usize],
    encoder: &EncoderMatrix,
    layout: &SecureMessageLayout,
) -> Result<Vec<Fe>> {
    check_eavesdroppers(layout, Scheme::TypeII, set)?;
    let base = *layout.base();
    let (d, alpha, ell) = (base.d(), base.alpha(), layout.ell());
    let field = base.field();
    if secrets.len() != layout.secret_count() {
        return Err(Error::WrongSymbolCount {
            expected: layout.secret_count(),
            got: secrets.len(),
        });
    }
    let mut set = set.to_vec();
    set.sort_unstable();

    // Rebuild every observed node from its own incoming traffic.
    let mut contents = Vec::with_capacity(ell);
    for &f in &set {
        let mut incoming: Vec<RepairPacket> = packets.iter().filter(|p| p.failed == f).cloned().collect();
        incoming.sort_by_key(|p| p.helper);
        incoming.dedup_by_key(|p| p.helper);
        if incoming.len() < d {
            return Err(Error::InsufficientShares {
                needed: d,
                got: incoming.len(),
            });
        }
        contents.push(repair_node(f, &incoming[..d], encoder)?.symbols);
    }
    let observed = Mat::from_vec(field, ell, alpha, contents.concat())?;

    // X = Ψ(H,:) · M · Ξ^L with H = [d]. A helper that is itself in L never
    // sends to itself; its packet is N_h · Ξ^h from the rebuilt content.
    let encoders = set
        .iter()
        .map(|&f| build_repair_encoder(f, encoder))
        .collect::<Result<Vec<_>>>()?;
    let width = base.repair_width();
    let helpers: Vec<usize> = (1..=d).collect();
    let mut x = Vec::with_capacity(d * ell * width);
    for &h in &helpers {
        for (k, &f) in set.iter().enumerate() {
            if h == f {
                x.extend(encoders[k].xi().left_mul_vec(&contents[k])?);
            } else {
                let p = packets
                    .iter()
                    .find(|p| p.helper == h && p.failed == f)
                    .ok_or(Error::InsufficientShares { needed: d, got: 0 })?;
                if p.payload.len() != width {
                    return Err(Error::WrongSymbolCount {
                        expected: width,
                        got: p.payload.len(),
                    });
                }
                x.extend(p.payload.iter().copied());
            }
        }
    }
    let x = Mat::from_vec(field, d, ell * width, x)?;
    let psi_h = encoder.rows_of(&helpers)?;
    let y = psi_h.inverse()?.matmul(&x)?;

    let refs: Vec<&Mat> = encoders.iter().map(|e| e.xi()).collect();
    let xi_l = Mat::hstack(&refs)?;
    let split = layout.lower_block_start();
    let kept: Vec<usize> = xi_index_sets(&base, ell).into_iter().map(|c| c.0).collect();

    // D holds only secrets and parity over secrets.
    let zero_keys = vec![Fe::ZERO; layout.key_count()];
    let with_secrets = assemble(layout, secrets, &zero_keys)?;
    let block_d = with_secrets
        .mat()
        .submatrix(&range(ell, d), &range(split, alpha))?;

    let hat = xi_l.submatrix(&range(0, split), &kept)?;
    let xi_bottom = xi_l.submatrix(&range(split, alpha), &kept)?;
    let y_bottom = y.submatrix(&range(ell, d), &kept)?;
    let block_c = y_bottom
        .sub(&block_d.matmul(&xi_bottom)?)?
        .matmul(&hat.inverse()?)?;

    let psi_l = encoder.rows_of(&set)?;
    let top_inv = psi_l.submatrix(&all(ell), &all(ell))?.inverse()?;
    let psi_bottom = psi_l.submatrix(&all(ell), &range(ell, d))?;
    let e_left = observed.submatrix(&all(ell), &range(0, split))?;
    let e_right = observed.submatrix(&all(ell), &range(split, alpha))?;
    let block_a = top_inv.matmul(&e_left.sub(&psi_bottom.matmul(&block_c)?)?)?;
    let block_b = top_inv.matmul(&e_right.sub(&psi_bottom.matmul(&block_d)?)?)?;

    let top = Mat::hstack(&[&block_a, &block_b])?;
    let bottom = Mat::hstack(&[&block_c, &block_d])?;
    let message = MessageMatrix::from_mat(base, Mat::vstack(&[&top, &bottom])?)?;

    // Every packet handed in must agree with the decoded message.
    let stored = encoder.psi().matmul(message.mat())?;
    for p in packets {
        let Some(k) = set.iter().position(|&f| f == p.failed) else {
            continue;
        };
        if p.helper == 0 || p.helper > base.n() {
            return Err(Error::OutOfRange(format!("helper {}", p.helper)));
        }
        if encoders[k].xi().left_mul_vec(stored.row(p.helper - 1))? != p.payload {
            return Err(Error::Inconsistent);
        }
    }
    extract_keys(&message, layout)
}
