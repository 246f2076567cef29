//! The operations behind each subcommand, independent of argument parsing.

use std::collections::BTreeSet;

use detcode::leakage::{audit, AuditRow};
use detcode::secure_layout::sample_keys_stream;
use detcode::tradeoff::{emit_tradeoff_csv, pareto_count, pareto_points_bruteforce};
use detcode::{
    assemble, build_encoder, build_repair_encoder, encode, extract_secrets, layout, recover_data,
    repair_data, repair_node, EncoderMatrix, Fe, NodeShare, RepairPacket, Scheme, SecureParams, SystemParams,
};

use crate::error::CliError;
use crate::pack::{bits_per_symbol, pack, unpack, StripePlan};
use crate::shard::{Shard, ShardHeader};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub ell: usize,
    pub scheme: Scheme,
    pub q: Option<u32>,
}

impl CodeSpec {
    pub fn params(&self) -> Result<SecureParams, CliError> {
        let base = SystemParams::new(self.n, self.d, self.m, self.q)?;
        Ok(SecureParams::new(base, self.ell, self.scheme)?)
    }
}

fn to_u32(x: usize) -> u32 {
    x as u32
}

/// Splits `data` into stripes and returns one shard per node, in node order.
/// Keys of stripe `s` come from stream `s` of `seed`.
pub fn encode_bytes(
    data: &[u8],
    spec: &CodeSpec,
    seed: u64,
    seed_present: bool,
) -> Result<Vec<Shard>, CliError> {
    let params = spec.params()?;
    let base = *params.base();
    let field = base.field();
    let original_len = u32::try_from(data.len()).map_err(|_| CliError::TooLarge(data.len()))?;
    let lay = layout(&params);
    let encoder = build_encoder(&base)?;

    let w = bits_per_symbol(base.q());
    let mut symbols = pack(data, w);
    let plan = StripePlan::new(symbols.len(), lay.secret_count())?;
    symbols.resize(plan.stripe_count * plan.symbols_per_stripe, 0);

    let mut payloads = vec![Vec::with_capacity(plan.stripe_count * base.alpha()); base.n()];
    for (stripe, chunk) in symbols.chunks(plan.symbols_per_stripe).enumerate() {
        let secrets: Vec<Fe> = chunk.iter().map(|&s| Fe(s as u32)).collect();
        let keys = sample_keys_stream(lay.key_count(), seed, stripe as u64, field);
        let message = assemble(&lay, &secrets, &keys)?;
        for share in encode(&message, &encoder)? {
            payloads[share.node - 1].extend(share.symbols.iter().map(|s| s.value() as u16));
        }
    }

    Ok(payloads
        .into_iter()
        .enumerate()
        .map(|(i, payload)| Shard {
            header: ShardHeader {
                scheme: spec.scheme,
                q: base.q(),
                n: to_u32(base.n()),
                d: to_u32(base.d()),
                m: to_u32(base.m()),
                ell: to_u32(spec.ell),
                node_id: to_u32(i + 1),
                payload_symbols: to_u32(payload.len()),
                seed_present,
                original_len,
                padding_symbols: to_u32(plan.padding_symbols),
            },
            payload,
        })
        .collect())
}

fn check_group(shards: &[&Shard]) -> Result<(), CliError> {
    let mut seen = BTreeSet::new();
    for s in shards {
        shards[0].header.same_code(&s.header)?;
        if !seen.insert(s.header.node_id) {
            return Err(CliError::DuplicateNode(s.header.node_id as usize));
        }
    }
    Ok(())
}

fn stripe_share(shard: &Shard, stripe: usize, alpha: usize) -> NodeShare {
    NodeShare {
        node: shard.header.node_id as usize,
        symbols: shard.payload[stripe * alpha..(stripe + 1) * alpha]
            .iter()
            .map(|&s| Fe(s as u32))
            .collect(),
    }
}

/// Rebuilds the original file from any `d` shards (extra shards are ignored).
pub fn recover_bytes(shards: &[Shard]) -> Result<Vec<u8>, CliError> {
    let Some(first) = shards.first() else {
        return Err(CliError::InsufficientShards { needed: 1, got: 0 });
    };
    let params = first.header.params()?;
    let base = *params.base();
    if shards.len() < base.d() {
        return Err(CliError::InsufficientShards {
            needed: base.d(),
            got: shards.len(),
        });
    }
    let all: Vec<&Shard> = shards.iter().collect();
    check_group(&all)?;
    let used = &all[..base.d()];
    let lay = layout(&params);
    let encoder = build_encoder(&base)?;

    let mut symbols = Vec::with_capacity(first.header.stripe_count() * lay.secret_count());
    for stripe in 0..first.header.stripe_count() {
        let shares: Vec<NodeShare> = used
            .iter()
            .map(|s| stripe_share(s, stripe, base.alpha()))
            .collect();
        let message = recover_data(&shares, &encoder)?;
        symbols.extend(extract_secrets(&message, &lay)?.iter().map(|s| s.value() as u16));
    }
    Ok(unpack(
        &symbols,
        bits_per_symbol(base.q()),
        first.header.original_len as usize,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub shard: Shard,
    /// Symbols downloaded in total: stripes × d × β.
    pub bandwidth: usize,
}

/// Regenerates shard `failed` from exactly `d` helper shards. Each helper
/// sends only the `β` compressed repair symbols per stripe.
pub fn repair_shard(failed: usize, helpers: &[Shard]) -> Result<RepairOutcome, CliError> {
    let Some(first) = helpers.first() else {
        return Err(CliError::InsufficientShards { needed: 1, got: 0 });
    };
    let params = first.header.params()?;
    let base = *params.base();
    if failed == 0 || failed > base.n() {
        return Err(detcode::Error::OutOfRange(format!("node {failed} outside [1, {}]", base.n())).into());
    }
    if helpers.len() != base.d() {
        return Err(CliError::HelperCount {
            needed: base.d(),
            got: helpers.len(),
        });
    }
    let all: Vec<&Shard> = helpers.iter().collect();
    check_group(&all)?;
    if helpers.iter().any(|h| h.header.node_id as usize == failed) {
        return Err(CliError::FailedAmongHelpers(failed));
    }
    let encoder: EncoderMatrix = build_encoder(&base)?;
    let renc = build_repair_encoder(failed, &encoder)?;

    let stripes = first.header.stripe_count();
    let mut payload = Vec::with_capacity(stripes * base.alpha());
    let mut bandwidth = 0;
    for stripe in 0..stripes {
        let mut packets = Vec::with_capacity(base.d());
        for h in helpers {
            let full = repair_data(&stripe_share(h, stripe, base.alpha()), &renc)?;
            let sent = full.compress(&renc);
            bandwidth += sent.len();
            packets.push(RepairPacket::from_compressed(full.helper, &renc, &sent)?);
        }
        let share = repair_node(failed, &packets, &encoder)?;
        payload.extend(share.symbols.iter().map(|s| s.value() as u16));
    }
    let header = ShardHeader {
        node_id: failed as u32,
        ..first.header
    };
    Ok(RepairOutcome {
        shard: Shard { header, payload },
        bandwidth,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub pass: bool,
}

impl AuditReport {
    pub fn render(&self) -> String {
        let mut out = String::from(AuditRow::csv_header());
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        let failed = self.rows.iter().filter(|r| !r.passes()).count();
        out.push_str(&format!(
            "{}: {} sets audited, {failed} failing\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.rows.len()
        ));
        out
    }
}

/// Audits every eavesdropper set of size at most `cap` (default `ell`).
pub fn audit_code(spec: &CodeSpec, cap: Option<usize>) -> Result<AuditReport, CliError> {
    let params = spec.params()?;
    let encoder = build_encoder(params.base())?;
    let rows = audit(&layout(&params), &encoder, cap.unwrap_or(spec.ell))?;
    let pass = rows.iter().all(AuditRow::passes);
    Ok(AuditReport { rows, pass })
}

/// Parses `a..b` (inclusive), `a,b,c`, a single value or the empty string.
pub fn parse_range(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::BadRange(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect()
}

pub fn tradeoff_csv(ds: &[usize], ells: &[usize], schemes: &[Scheme], exact: bool) -> String {
    emit_tradeoff_csv(ds, ells, schemes, exact)
}

/// Pareto summary lines `d,ell,count,modes` for the given scheme.
pub fn pareto_table(ds: &[usize], ells: &[usize], scheme: Scheme) -> String {
    let mut out = String::from("scheme,d,ell,pareto_count,pareto_modes\n");
    for &d in ds {
        for &ell in ells {
            let valid = match scheme {
                Scheme::Plain => ell == 0,
                Scheme::TypeI => ell < d,
                Scheme::TypeII => ell <= d,
            };
            if d == 0 || !valid {
                continue;
            }
            let modes = pareto_points_bruteforce(d, ell, scheme);
            let count = match scheme {
                Scheme::TypeII => pareto_count(d, ell).to_string(),
                _ => modes.len().to_string(),
            };
            let list: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
            out.push_str(&format!(
                "{},{d},{ell},{count},{}\n",
                scheme.name(),
                list.join(" ")
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_range("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_range("5").unwrap(), vec![5]);
        assert_eq!(parse_range("1,4,9").unwrap(), vec![1, 4, 9]);
        assert_eq!(parse_range("").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_range("3..1").unwrap(), Vec::<usize>::new());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn one_stripe_holds_forty_symbols() {
        let spec = CodeSpec {
            n: 8,
            d: 6,
            m: 2,
            ell: 2,
            scheme: Scheme::TypeI,
            q: None,
        };
        // q = 11 packs 3 bits per symbol: 15 bytes are exactly 40 symbols.
        let shards = encode_bytes(&[0xA5; 15], &spec, 1, true).unwrap();
        assert_eq!(shards.len(), 8);
        assert!(shards
            .iter()
            .all(|s| s.header.stripe_count() == 1 && s.header.padding_symbols == 0));
        let shards = encode_bytes(&[0xA5; 16], &spec, 1, true).unwrap();
        assert_eq!(shards[0].header.stripe_count(), 2);
    }

    #[test]
    fn pareto_lines() {
        let t = pareto_table(&[10], &[2], Scheme::TypeII);
        assert!(t.contains("type2,10,2,2,1 2"));
    }
}
