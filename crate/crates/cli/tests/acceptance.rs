//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use detcode::detcode::multi_repair_entropy;
use detcode::leakage::{
    audit, decode_keys_type_i, decode_keys_type_ii, xi_block_triangularize, xi_top_fullrank,
};
use detcode::secure_layout::secret_capacity;
use detcode::subsets::combinations;
use detcode::tradeoff::{
    converse_value, cutset_bound, external_bound_check, pareto_count, pareto_points_bruteforce, point,
    scaled_family_matches, Q,
};
use detcode::{
    assemble, binom, build_encoder, build_repair_encoder, encode, layout, repair_data, sample_keys, Fe, Mat,
    NodeShare, RepairPacket, Scheme, SecureMessageLayout, SecureParams, SystemParams,
};
use detcode_cli::{encode_bytes, recover_bytes, repair_shard, CodeSpec, Shard};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn say(line: &str) {
    // Bypasses the test harness capture so the lines land in the log.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn run(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut res = f();
    let took = start.elapsed();
    if let (Ok(()), Some(limit)) = (&res, limit) {
        if took > limit {
            res = Err(format!("took {took:?}, limit {limit:?}"));
        }
    }
    match &res {
        Ok(()) => say(&format!("PASS [{id}] {name} ({:.2}s)", took.as_secs_f64())),
        Err(e) => say(&format!("FAIL [{id}] {name} ({:.2}s): {e}", took.as_secs_f64())),
    }
    res.is_ok()
}

fn secure(n: usize, d: usize, m: usize, ell: usize, scheme: Scheme, q: Option<u32>) -> SecureParams {
    SecureParams::new(SystemParams::new(n, d, m, q).unwrap(), ell, scheme).unwrap()
}

fn c1_parameters() -> Outcome {
    let base = SystemParams::new(8, 6, 2, None).map_err(|e| e.to_string())?;
    let got = (base.file_size(), base.alpha(), base.beta());
    ensure!(got == (70, 15, 5), "(F, alpha, beta) = {got:?}");
    for (scheme, want) in [(Scheme::TypeI, (40, 30)), (Scheme::TypeII, (20, 50))] {
        let p = SecureParams::new(base, 2, scheme).map_err(|e| e.to_string())?;
        let l = layout(&p);
        let got = (l.secret_count(), l.key_count());
        ensure!(got == want, "{scheme:?} (Fs, |Q|) = {got:?}");
        ensure!(
            (p.secret_count(), p.key_count()) == want,
            "{scheme:?} closed form disagrees"
        );
        let pt = point(6, 2, 2, scheme);
        ensure!(pt.fs as usize == want.0, "{scheme:?} trade-off point {pt:?}");
    }
    Ok(())
}

fn c2_functional() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let nodes: Vec<usize> = (1..=8).collect();
    for m in 1..=3 {
        for (scheme, ell) in [(Scheme::Plain, 0), (Scheme::TypeI, 2), (Scheme::TypeII, 2)] {
            let spec = CodeSpec {
                n: 8,
                d: 6,
                m,
                ell,
                scheme,
                q: Some(11),
            };
            let data: Vec<u8> = (0..300).map(|_| rng.random()).collect();
            let shards = encode_bytes(&data, &spec, rng.random(), true).map_err(|e| e.to_string())?;
            let tag = format!("m={m} {}", scheme.name());
            for subset in combinations(&nodes, 6) {
                let pick: Vec<Shard> = subset.iter().map(|&i| shards[i - 1].clone()).collect();
                let got = recover_bytes(&pick).map_err(|e| format!("{tag} {subset:?}: {e}"))?;
                ensure!(got == data, "{tag}: recovery from {subset:?} differs");
            }
            for f in 1..=8 {
                let others: Vec<usize> = nodes.iter().copied().filter(|&i| i != f).collect();
                for helpers in combinations(&others, 6) {
                    let pick: Vec<Shard> = helpers.iter().map(|&i| shards[i - 1].clone()).collect();
                    let out = repair_shard(f, &pick).map_err(|e| format!("{tag} f={f}: {e}"))?;
                    ensure!(
                        out.shard.to_bytes() == shards[f - 1].to_bytes(),
                        "{tag}: repair of {f} from {helpers:?} differs"
                    );
                    let beta = binom(5, m as i64 - 1) as usize;
                    ensure!(
                        out.bandwidth == shards[0].header.stripe_count() * 6 * beta,
                        "{tag}: bandwidth"
                    );
                }
            }
        }
    }
    Ok(())
}

/// `(d, m, ell, scheme)` covered by the security sweep.
fn sweep() -> Vec<(usize, usize, usize, Scheme)> {
    let mut out = Vec::new();
    for d in 1..=6 {
        for m in 1..=d {
            for ell in 1..=3 {
                if ell < d {
                    out.push((d, m, ell, Scheme::TypeI));
                }
                if ell <= d {
                    out.push((d, m, ell, Scheme::TypeII));
                }
            }
        }
    }
    out
}

fn c3_security() -> Outcome {
    let mut sets = 0;
    for (d, m, ell, scheme) in sweep() {
        let p = secure(d + 2, d, m, ell, scheme, None);
        let e = build_encoder(p.base()).unwrap();
        let rows = audit(&layout(&p), &e, ell).map_err(|e| e.to_string())?;
        let expected: usize = (1..=ell).map(|k| binom(d as i64 + 2, k as i64) as usize).sum();
        ensure!(
            rows.len() == expected,
            "d={d} m={m} ell={ell}: {} sets audited",
            rows.len()
        );
        if let Some(r) = rows.iter().find(|r| r.leakage != 0) {
            return Err(format!(
                "{scheme:?} d={d} m={m} ell={ell} L={:?} leaks {}",
                r.set, r.leakage
            ));
        }
        sets += rows.len();
    }
    ensure!(sets > 0, "empty sweep");
    Ok(())
}

fn stored(shares: &[NodeShare], set: &[usize], l: &SecureMessageLayout) -> Mat {
    let data: Vec<Fe> = set.iter().flat_map(|&i| shares[i - 1].symbols.clone()).collect();
    Mat::from_vec(l.base().field(), set.len(), l.base().alpha(), data).unwrap()
}

fn c4_lemmas() -> Outcome {
    let mut decoded = 0;
    for (i, (d, m, ell, scheme)) in sweep().into_iter().enumerate() {
        let n = d + 2;
        let p = secure(n, d, m, ell, scheme, None);
        let e = build_encoder(p.base()).unwrap();
        let l = layout(&p);
        let tag = format!("{scheme:?} d={d} m={m} ell={ell}");
        for r in audit(&l, &e, ell).map_err(|e| e.to_string())? {
            ensure!(
                r.entropy <= r.key_count,
                "{tag} L={:?}: H(E)={} > |Q|",
                r.set,
                r.entropy
            );
            ensure!(
                r.set.len() < ell || r.keys_recoverable,
                "{tag} L={:?}: keys not recoverable",
                r.set
            );
        }
        let field = p.base().field();
        let s = sample_keys(l.secret_count(), 7 * i as u64, field);
        let q = sample_keys(l.key_count(), 7 * i as u64 + 1, field);
        let shares = encode(&assemble(&l, &s, &q).map_err(|e| e.to_string())?, &e).unwrap();
        let nodes: Vec<usize> = (1..=n).collect();
        for set in combinations(&nodes, ell) {
            let got = match scheme {
                Scheme::TypeI => decode_keys_type_i(&stored(&shares, &set, &l), &s, &set, &e, &l),
                _ => {
                    let mut packets: Vec<RepairPacket> = Vec::new();
                    for &f in &set {
                        let renc = build_repair_encoder(f, &e).unwrap();
                        for sh in shares.iter().filter(|sh| sh.node != f) {
                            packets.push(repair_data(sh, &renc).unwrap());
                        }
                    }
                    decode_keys_type_ii(&packets, &s, &set, &e, &l)
                }
            };
            ensure!(
                got.as_ref() == Ok(&q),
                "{tag} L={set:?}: decoder returned {got:?}"
            );
            decoded += 1;
        }
    }
    ensure!(decoded > 0, "no decoder runs");
    Ok(())
}

fn c5_rank_structure() -> Outcome {
    for d in 1..=6 {
        for m in 1..=d {
            let n = d + 2;
            let base = SystemParams::new(n, d, m, None).unwrap();
            let e = build_encoder(&base).unwrap();
            for f in 1..=n {
                let r = build_repair_encoder(f, &e).unwrap().xi().rank();
                ensure!(r == base.beta(), "d={d} m={m} f={f}: rank Xi = {r}");
            }
            let nodes: Vec<usize> = (1..=n).collect();
            for size in 1..=d {
                for set in combinations(&nodes, size) {
                    let (ok, a) = xi_top_fullrank(&set, &e).map_err(|e| e.to_string())?;
                    let want = (binom(d as i64, m as i64) - binom((d - size) as i64, m as i64)) as usize;
                    ensure!(
                        ok && a.top_rank() == want,
                        "d={d} m={m} L={set:?}: top rank {}",
                        a.top_rank()
                    );
                    let rep = xi_block_triangularize(&a, &e).map_err(|e| e.to_string())?;
                    ensure!(rep.is_clean(), "d={d} m={m} L={set:?}: triangular form not clean");
                }
            }
            // Simultaneous repair of a nodes needs exactly the entropy formula.
            for a in 1..=d.min(3) {
                let failed: Vec<usize> = (1..=a).collect();
                let r = detcode::multi_repair_rank(d + 1, &failed, &e).map_err(|e| e.to_string())?;
                ensure!(
                    r == multi_repair_entropy(d, m, a),
                    "d={d} m={m} a={a}: repair rank {r}"
                );
            }
        }
    }
    let e = build_encoder(&SystemParams::new(8, 6, 3, None).unwrap()).unwrap();
    let (ok, a) = xi_top_fullrank(&[1, 2, 3], &e).map_err(|e| e.to_string())?;
    ensure!(
        ok && (a.hat().rows(), a.hat().cols()) == (19, 19),
        "19x19 instance has wrong shape"
    );
    let rep = xi_block_triangularize(&a, &e).map_err(|e| e.to_string())?;
    ensure!(rep.is_clean(), "19x19 instance not clean");
    let mut sizes: Vec<usize> = rep.groups.iter().map(|g| g.size).collect();
    sizes.sort_unstable();
    ensure!(
        sizes == [1, 1, 1, 1, 2, 2, 2, 3, 3, 3],
        "19x19 block sizes {sizes:?}"
    );
    Ok(())
}

fn c6_pareto() -> Outcome {
    ensure!(
        pareto_count(10, 2) == 2,
        "pareto_count(10, 2) = {}",
        pareto_count(10, 2)
    );
    let modes = pareto_points_bruteforce(10, 2, Scheme::TypeII);
    ensure!(modes == [1, 2], "(10, 2) Pareto modes {modes:?}");
    for d in 1..=30 {
        for ell in 1..=5 {
            let brute = pareto_points_bruteforce(d, ell, Scheme::TypeII);
            ensure!(
                brute.len() == pareto_count(d, ell),
                "d={d} ell={ell}: hull {brute:?}"
            );
        }
        for ell in 1..d {
            let single = pareto_points_bruteforce(d, ell, Scheme::TypeII).len() == 1;
            ensure!(
                single == (ell >= (d - 1).div_ceil(4)),
                "d={d} ell={ell}: single-point condition"
            );
        }
    }
    Ok(())
}

fn c7_mbr_identity() -> Outcome {
    for d in 1..=30 {
        for ell in 0..=d {
            let want = (d - ell + 1) * (d - ell) / 2;
            let f1 = secret_capacity(Scheme::TypeI, d, ell, 1);
            let f2 = secret_capacity(Scheme::TypeII, d, ell, 1);
            ensure!(
                f1 == want && f2 == want,
                "d={d} ell={ell}: {f1}, {f2}, want {want}"
            );
        }
    }
    // The layouts themselves hold that many secrets.
    for d in 1..=8 {
        for ell in 0..d {
            for scheme in [Scheme::TypeI, Scheme::TypeII] {
                let l = layout(&secure(d + 1, d, 1, ell, scheme, None));
                ensure!(
                    l.secret_count() == (d - ell + 1) * (d - ell) / 2,
                    "{scheme:?} d={d} ell={ell}"
                );
            }
        }
    }
    Ok(())
}

fn c8_bounds() -> Outcome {
    let r = |a: i128, b: i128| Q::new(a, b);
    for d in 1..=30 {
        for ell in 0..=d {
            ensure!(scaled_family_matches(d, ell), "d={d} ell={ell}: scaled family");
            for m in 1..=d {
                for c in external_bound_check(d, ell, m, None) {
                    ensure!(c.holds, "d={d} ell={ell} m={m}: {c:?}");
                }
                let alpha = binom(d as i64, m as i64);
                let beta = binom(d as i64 - 1, m as i64 - 1);
                let cut = cutset_bound(d, ell, alpha, beta);
                let f2 = secret_capacity(Scheme::TypeII, d, ell, m) as u64;
                ensure!(f2 <= cut, "d={d} ell={ell} m={m}: Type-II above cut-set");
                ensure!(
                    converse_value(d, ell, m, Scheme::TypeII) == f2,
                    "Type-II converse d={d} ell={ell} m={m}"
                );
                if ell < d {
                    let f1 = secret_capacity(Scheme::TypeI, d, ell, m) as u64;
                    ensure!(f1 <= cut, "d={d} ell={ell} m={m}: Type-I above cut-set");
                    ensure!(
                        converse_value(d, ell, m, Scheme::TypeI) == f1,
                        "Type-I converse d={d} ell={ell} m={m}"
                    );
                }
            }
        }
    }
    let eq = |d, ell, m, name: &str, scheme| {
        external_bound_check(d, ell, m, None)
            .into_iter()
            .find(|c| c.name == name && c.scheme == scheme)
            .is_some_and(|c| c.equality)
    };
    for d in 2..=30 {
        ensure!(
            eq(d, 1, 1, "type2-ell1-linear", Scheme::TypeII),
            "ell=1 m=1 equality at d={d}"
        );
    }
    for (m, want) in [
        (1, (r(1, 1), r(1, 3))),
        (2, (r(3, 5), r(2, 5))),
        (3, (r(1, 2), r(1, 2))),
    ] {
        let p = point(3, 1, m, Scheme::TypeI);
        ensure!(
            (p.alpha_norm, p.beta_norm) == (Some(want.0), Some(want.1)),
            "d=3 m={m}: {p:?}"
        );
        ensure!(
            eq(3, 1, m, "d3-ell1-capacity", Scheme::TypeI),
            "d=3 m={m}: bound not tight"
        );
    }
    for (m, want) in [(1, (r(2, 5), r(1, 15))), (2, (r(3, 8), r(1, 8)))] {
        let p = point(6, 1, m, Scheme::TypeII);
        ensure!(
            (p.alpha_norm, p.beta_norm) == (Some(want.0), Some(want.1)),
            "d=6 m={m}: {p:?}"
        );
        ensure!(p.pareto, "d=6 m={m} should be a Pareto point");
    }
    Ok(())
}

fn detcode_bin(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_detcode"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "detcode {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read_dir_bytes(dir: &Path) -> Vec<Vec<u8>> {
    (1..=8)
        .map(|i| std::fs::read(dir.join(Shard::file_name(i))).unwrap())
        .collect()
}

fn c9_end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = tmp.path().join("input.bin");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data: Vec<u8> = (0..64 * 1024).map(|_| rng.random()).collect();
    std::fs::write(&input, &data).unwrap();
    let p = |x: &Path| x.to_string_lossy().into_owned();

    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        detcode_bin(&[
            "encode",
            &p(&input),
            "--n",
            "8",
            "--d",
            "6",
            "--m",
            "2",
            "--scheme",
            "type2",
            "--ell",
            "2",
            "--seed",
            "1234",
            "--out",
            &p(&dir),
        ])?;
        runs.push(read_dir_bytes(&dir));
    }
    ensure!(runs[0] == runs[1], "same seed produced different shards");
    let originals = &runs[0];
    let dir = tmp.path().join("a");

    for f in 1..=8 {
        let lost = dir.join(Shard::file_name(f));
        std::fs::remove_file(&lost).unwrap();
        let helpers: Vec<String> = (1..=8)
            .filter(|&i| i != f)
            .take(6)
            .map(|i| p(&dir.join(Shard::file_name(i))))
            .collect();
        let mut args = vec!["repair".to_string(), "--failed".into(), f.to_string()];
        args.extend(helpers);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let msg = detcode_bin(&args)?;
        ensure!(
            std::fs::read(&lost).ok().as_ref() == Some(&originals[f - 1]),
            "repaired shard {f} differs"
        );
        let stripes = Shard::from_bytes(&originals[0]).unwrap().header.stripe_count();
        ensure!(
            msg.contains(&format!("bandwidth {} symbols", stripes * 6 * 5)),
            "bandwidth report: {msg}"
        );
    }

    let nodes: Vec<usize> = (1..=8).collect();
    let shards: Vec<Shard> = originals.iter().map(|b| Shard::from_bytes(b).unwrap()).collect();
    let mut seen = BTreeSet::new();
    for subset in combinations(&nodes, 6) {
        let pick: Vec<Shard> = subset.iter().map(|&i| shards[i - 1].clone()).collect();
        let got = recover_bytes(&pick).map_err(|e| e.to_string())?;
        ensure!(got == data, "recovery from {subset:?} differs");
        seen.insert(subset);
    }
    ensure!(seen.len() == 28, "only {} subsets", seen.len());
    let out = tmp.path().join("out.bin");
    let mut args = vec!["recover".to_string()];
    args.extend((3..=8).map(|i| p(&dir.join(Shard::file_name(i)))));
    args.extend(["--out".to_string(), p(&out)]);
    detcode_bin(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
    ensure!(std::fs::read(&out).unwrap() == data, "CLI recovery differs");
    Ok(())
}

#[test]
fn acceptance() {
    say("");
    let results = [
        run(
            1,
            "parameter reproduction at (d, m, ell) = (6, 2, 2)",
            Some(Duration::from_secs(1)),
            c1_parameters,
        ),
        run(
            2,
            "exhaustive recovery and repair at n=8, d=6, q=11",
            Some(Duration::from_secs(300)),
            c2_functional,
        ),
        run(
            3,
            "zero leakage for every |L| <= ell, d <= 6, ell <= 3",
            None,
            c3_security,
        ),
        run(
            4,
            "entropy bound, key recoverability and key decoders",
            None,
            c4_lemmas,
        ),
        run(
            5,
            "repair-encoder ranks and block-triangular structure",
            None,
            c5_rank_structure,
        ),
        run(
            6,
            "Pareto count against the exact convex-hull oracle",
            None,
            c6_pareto,
        ),
        run(7, "MBR secrecy identity for d <= 30", None, c7_mbr_identity),
        run(
            8,
            "cut-set and external bounds with equality cases",
            None,
            c8_bounds,
        ),
        run(
            9,
            "64 KiB end-to-end encode, repair, recover, determinism",
            None,
            c9_end_to_end,
        ),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    say(&format!("acceptance: {passed}/{} criteria passed", results.len()));
    assert_eq!(passed, results.len());
}
