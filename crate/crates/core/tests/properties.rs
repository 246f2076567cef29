use detcode::leakage::{mutual_information, observe_type_i, observe_type_ii};
use detcode::{
    assemble, build_encoder, build_message_matrix, build_repair_encoder, encode, extract_keys,
    extract_secrets, layout, recover_data, repair_data, repair_node, Fe, Field, Mat, Scheme, SecureParams,
    SystemParams,
};
use proptest::prelude::*;

fn mat_strategy(q: u32, max: usize) -> impl Strategy<Value = Mat> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..q, r * c).prop_map(move |v| {
            let f = Field::new(q).unwrap();
            Mat::from_vec(f, r, c, v.into_iter().map(Fe).collect()).unwrap()
        })
    })
}

fn code_strategy() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=5).prop_flat_map(|d| (d + 1..=d + 3, Just(d), 1..=d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_transpose_invariant(a in mat_strategy(7, 6)) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
        prop_assert!(a.rank() <= a.rows().min(a.cols()));
    }

    #[test]
    fn rank_is_subadditive(a in mat_strategy(5, 5), b in mat_strategy(5, 5)) {
        if a.rows() == b.rows() {
            let ab = Mat::hstack(&[&a, &b]).unwrap();
            prop_assert!(ab.rank() <= a.rank() + b.rank());
            prop_assert!(ab.rank() >= a.rank().max(b.rank()));
        }
        if a.cols() == b.rows() {
            prop_assert!(a.matmul(&b).unwrap().rank() <= a.rank().min(b.rank()));
        }
    }

    #[test]
    fn inverse_exists_iff_det_nonzero(a in mat_strategy(11, 5)) {
        if a.rows() == a.cols() {
            match a.inverse() {
                Ok(inv) => {
                    prop_assert_eq!(a.matmul(&inv).unwrap(), Mat::identity(a.field(), a.rows()));
                    prop_assert!(!a.det().unwrap().is_zero());
                }
                Err(_) => prop_assert!(a.det().unwrap().is_zero()),
            }
        }
    }

    #[test]
    fn plain_code_round_trip((n, d, m) in code_strategy(), seed in any::<u64>()) {
        let p = SystemParams::new(n, d, m, None).unwrap();
        let info = detcode::sample_keys(p.file_size(), seed, p.field());
        let msg = build_message_matrix(&p, &info).unwrap();
        prop_assert!(msg.check_parity());
        let e = build_encoder(&p).unwrap();
        let shares = encode(&msg, &e).unwrap();
        let back = recover_data(&shares[n - d..], &e).unwrap();
        prop_assert_eq!(back.info_symbols(), info);
        let f = 1 + (seed as usize) % n;
        let renc = build_repair_encoder(f, &e).unwrap();
        let packets: Vec<_> = shares
            .iter()
            .filter(|s| s.node != f)
            .take(d)
            .map(|s| repair_data(s, &renc).unwrap())
            .collect();
        prop_assert_eq!(&repair_node(f, &packets, &e).unwrap(), &shares[f - 1]);
    }

    #[test]
    fn secure_layouts_round_trip((n, d, m) in code_strategy(), ell in 0usize..4, seed in any::<u64>()) {
        let base = SystemParams::new(n, d, m, None).unwrap();
        for scheme in [Scheme::TypeI, Scheme::TypeII] {
            let Ok(p) = SecureParams::new(base, ell, scheme) else { continue };
            let l = layout(&p);
            let s = detcode::sample_keys(l.secret_count(), seed, base.field());
            let q = detcode::sample_keys(l.key_count(), seed ^ 1, base.field());
            let msg = assemble(&l, &s, &q).unwrap();
            prop_assert_eq!(extract_secrets(&msg, &l).unwrap(), s);
            prop_assert_eq!(extract_keys(&msg, &l).unwrap(), q);
            let e = build_encoder(&base).unwrap();
            let shares = encode(&msg, &e).unwrap();
            prop_assert_eq!(&recover_data(&shares[..d], &e).unwrap(), &msg);
        }
    }
}

#[test]
fn type_i_layout_leaks_to_type_ii_eavesdropper() {
    // Repair traffic reveals more than stored content.
    let base = SystemParams::new(8, 6, 2, None).unwrap();
    let l1 = layout(&SecureParams::new(base, 2, Scheme::TypeI).unwrap());
    let e = build_encoder(&base).unwrap();
    assert_eq!(mutual_information(&observe_type_i(&[1, 2], &e, &l1).unwrap()), 0);
    assert!(mutual_information(&observe_type_ii(&[1, 2], &e, &l1).unwrap()) > 0);
}

#[test]
fn plain_layout_leaks_everything_it_stores() {
    let base = SystemParams::new(8, 6, 2, None).unwrap();
    let l = layout(&SecureParams::new(base, 0, Scheme::Plain).unwrap());
    let e = build_encoder(&base).unwrap();
    let obs = observe_type_i(&[5], &e, &l).unwrap();
    assert_eq!(mutual_information(&obs), base.alpha());
    let all: Vec<usize> = (1..=6).collect();
    assert_eq!(
        mutual_information(&observe_type_i(&all, &e, &l).unwrap()),
        base.file_size()
    );
}
