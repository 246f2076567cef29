//! Where secrets and keys go in the Type-I and Type-II secure layouts.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::detcode::{build_message_matrix, info_cells, CellType, MessageMatrix, SystemParams};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::subsets::{binom, choose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Plain,
    TypeI,
    TypeII,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Plain => "plain",
            Scheme::TypeI => "type1",
            Scheme::TypeII => "type2",
        }
    }

    pub fn tag(self) -> u32 {
        match self {
            Scheme::Plain => 0,
            Scheme::TypeI => 1,
            Scheme::TypeII => 2,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Scheme::Plain),
            1 => Some(Scheme::TypeI),
            2 => Some(Scheme::TypeII),
            _ => None,
        }
    }
}

impl core::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Scheme::Plain),
            "type1" => Ok(Scheme::TypeI),
            "type2" => Ok(Scheme::TypeII),
            _ => Err(Error::InvalidParams(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SecureParams {
    base: SystemParams,
    ell: usize,
    scheme: Scheme,
}

impl SecureParams {
    /// Type-I needs `ell < d`, Type-II `ell ≤ d`. `ell = 0` or
    /// [`Scheme::Plain`] give the non-secure code.
    pub fn new(base: SystemParams, ell: usize, scheme: Scheme) -> Result<Self> {
        let d = base.d();
        match scheme {
            Scheme::Plain if ell != 0 => {
                return Err(Error::InvalidParams("the plain scheme has ell = 0".into()))
            }
            Scheme::TypeI if ell >= d => {
                return Err(Error::InvalidParams(format!(
                    "Type-I needs ell < d, got ell={ell} d={d}"
                )))
            }
            Scheme::TypeII if ell > d => {
                return Err(Error::InvalidParams(format!(
                    "Type-II needs ell <= d, got ell={ell} d={d}"
                )))
            }
            _ => {}
        }
        Ok(SecureParams { base, ell, scheme })
    }

    pub fn base(&self) -> &SystemParams {
        &self.base
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Closed-form number of secret symbols.
    pub fn secret_count(&self) -> usize {
        secret_capacity(self.scheme, self.base.d(), self.ell, self.base.m())
    }

    /// Closed-form number of key symbols.
    pub fn key_count(&self) -> usize {
        self.base.file_size() - self.secret_count()
    }
}

/// `F_s` for the scheme at `(d, ell, m)`.
pub fn secret_capacity(scheme: Scheme, d: usize, ell: usize, m: usize) -> usize {
    let (d, ell, m) = (d as i64, ell as i64, m as i64);
    let v = match scheme {
        Scheme::Plain => m as u64 * binom(d + 1, m + 1),
        Scheme::TypeI => {
            // (d-ℓ)C(d,m) - C(d,m+1) + C(ℓ,m+1) is nonnegative for ℓ < d.
            ((d - ell).max(0) as u64 * binom(d, m) + binom(ell, m + 1)).saturating_sub(binom(d, m + 1))
        }
        Scheme::TypeII => m as u64 * binom(d - ell + 1, m + 1),
    };
    v as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellRole {
    Secret(usize),
    Key(usize),
    Parity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecureMessageLayout {
    params: SecureParams,
    roles: Vec<CellRole>,
    info_roles: Vec<CellRole>,
    secret_count: usize,
    key_count: usize,
}

impl SecureMessageLayout {
    pub fn params(&self) -> &SecureParams {
        &self.params
    }

    pub fn base(&self) -> &SystemParams {
        &self.params.base
    }

    pub fn scheme(&self) -> Scheme {
        self.params.scheme
    }

    pub fn ell(&self) -> usize {
        self.params.ell
    }

    /// Role of cell `(row, col)`, 0-based.
    pub fn role(&self, row: usize, col: usize) -> CellRole {
        self.roles[row * self.params.base.alpha() + col]
    }

    /// Roles of the V/W cells in fill order.
    pub fn info_roles(&self) -> &[CellRole] {
        &self.info_roles
    }

    pub fn secret_count(&self) -> usize {
        self.secret_count
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    /// Set for Type-II with `m > d - ell`, where nothing secret fits.
    pub fn no_secret_capacity(&self) -> bool {
        self.params.scheme != Scheme::Plain && self.secret_count == 0
    }

    /// Columns whose label lies inside `[ell+1, d]`: the last
    /// `C(d - ell, m)` columns.
    pub fn lower_block_start(&self) -> usize {
        let b = &self.params.base;
        b.alpha() - choose(b.d() - self.params.ell, b.m())
    }
}

pub fn layout(params: &SecureParams) -> SecureMessageLayout {
    let base = params.base;
    let alpha = base.alpha();
    let ell = params.ell;
    let mut roles = alloc::vec![CellRole::Parity; base.d() * alpha];
    let columns: Vec<_> = base.columns().iter().collect();
    let (mut s, mut k) = (0, 0);
    let mut info_roles = Vec::with_capacity(base.file_size());
    for (row, col) in info_cells(&base) {
        let x = row + 1;
        let secret = match params.scheme {
            Scheme::Plain => true,
            Scheme::TypeI => x > ell,
            Scheme::TypeII => x > ell && columns[col].min_elem().is_some_and(|mn| mn > ell),
        };
        debug_assert_ne!(CellType::classify(x, &columns[col]), CellType::P);
        let role = if secret {
            s += 1;
            CellRole::Secret(s - 1)
        } else {
            k += 1;
            CellRole::Key(k - 1)
        };
        roles[row * alpha + col] = role;
        info_roles.push(role);
    }
    SecureMessageLayout {
        params: *params,
        roles,
        info_roles,
        secret_count: s,
        key_count: k,
    }
}

/// Builds the message matrix holding `secrets` and `keys`.
pub fn assemble(layout: &SecureMessageLayout, secrets: &[Fe], keys: &[Fe]) -> Result<MessageMatrix> {
    if secrets.len() != layout.secret_count {
        return Err(Error::WrongSymbolCount {
            expected: layout.secret_count,
            got: secrets.len(),
        });
    }
    if keys.len() != layout.key_count {
        return Err(Error::WrongSymbolCount {
            expected: layout.key_count,
            got: keys.len(),
        });
    }
    let info: Vec<Fe> = layout
        .info_roles
        .iter()
        .map(|r| match *r {
            CellRole::Secret(i) => secrets[i],
            CellRole::Key(i) => keys[i],
            CellRole::Parity => unreachable!("info cells are never parity"),
        })
        .collect();
    build_message_matrix(&layout.params.base, &info)
}

fn check_matches(message: &MessageMatrix, layout: &SecureMessageLayout) -> Result<()> {
    if *message.params() != layout.params.base {
        return Err(Error::InvalidParams(
            "message and layout parameters differ".into(),
        ));
    }
    Ok(())
}

pub fn extract_secrets(message: &MessageMatrix, layout: &SecureMessageLayout) -> Result<Vec<Fe>> {
    check_matches(message, layout)?;
    Ok(message
        .info_symbols()
        .into_iter()
        .zip(&layout.info_roles)
        .filter_map(|(v, r)| matches!(r, CellRole::Secret(_)).then_some(v))
        .collect())
}

pub fn extract_keys(message: &MessageMatrix, layout: &SecureMessageLayout) -> Result<Vec<Fe>> {
    check_matches(message, layout)?;
    Ok(message
        .info_symbols()
        .into_iter()
        .zip(&layout.info_roles)
        .filter_map(|(v, r)| matches!(r, CellRole::Key(_)).then_some(v))
        .collect())
}

/// `count` uniform field elements from a ChaCha20 stream seeded by `seed`.
pub fn sample_keys(count: usize, seed: u64, field: Field) -> Vec<Fe> {
    sample_keys_stream(count, seed, 0, field)
}

/// Like [`sample_keys`] but on an independent stream of the same seed.
pub fn sample_keys_stream(count: usize, seed: u64, stream: u64, field: Field) -> Vec<Fe> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count)
        .map(|_| Fe(rng.random_range(0..field.modulus())))
        .collect()
}
