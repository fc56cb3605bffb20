use pressure_lab::symbolic::*;
use proptest::prelude::*;

fn word(k: usize, max_len: usize) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(0..k as Symbol, 1..=max_len)
}

fn table(k: usize) -> impl Strategy<Value = WeightTable<f64>> {
    prop::collection::vec(-3.0..0.0f64, k * k).prop_map(move |v| WeightTable::new(k, v, -50.0, 0.0).unwrap())
}

fn family(k: usize, n0: usize) -> impl Strategy<Value = CylinderFamily> {
    prop::collection::btree_set(prop::collection::vec(0..k as Symbol, n0), 0..=k.pow(n0 as u32).min(6))
        .prop_map(move |s| CylinderFamily::from_words(n0, s.into_iter().map(SymbolWord::from_letters)).unwrap())
}

proptest! {
    #[test]
    fn weight_is_multiplicative(w in table(3), u in word(3, 6), v in word(3, 6)) {
        let uv: Vec<Symbol> = u.iter().chain(&v).copied().collect();
        let glue = w.log_j(*u.last().unwrap(), v[0]);
        let lhs = word_weight(&uv, &w);
        let rhs = word_weight(&u, &w) * glue.exp() * word_weight(&v, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn decomposition_reconstructs(fam in family(2, 2), w in prop::collection::vec(0..2 as Symbol, 2..12)) {
        let sw = SymbolWord::from_letters(w);
        let d = stopping_decomposition(&sw, &fam).unwrap();
        prop_assert_eq!(d.reconstruct(), sw);
        for c in d.c_pieces() {
            prop_assert!(fam.contains(c.letters()));
        }
    }

    #[test]
    fn sigma_is_monotone_in_tau(fam in family(2, 2), p in 2usize..9) {
        let a = Alphabet::full(2).unwrap();
        let lo = sigma_p_tau(&fam, 0.5, p, &a, 1 << 20).unwrap();
        let hi = sigma_p_tau(&fam, 0.75, p, &a, 1 << 20).unwrap();
        let one = sigma_p_tau(&fam, 1.0, p, &a, 1 << 20).unwrap();
        prop_assert!(one.is_subset(&hi) && hi.is_subset(&lo));
    }

    #[test]
    fn pressure_sum_is_additive(w in table(2), f in family(2, 3), g in family(2, 3)) {
        let g_only = CylinderFamily::from_words(3, g.iter().filter(|x| !f.contains(x.letters())).cloned()).unwrap();
        prop_assert!(f.is_disjoint(&g_only));
        let both = f.union(&g_only).unwrap();
        let lhs = pressure_sum(&both, &w, 0.5);
        let rhs = pressure_sum(&f, &w, 0.5) + pressure_sum(&g_only, &w, 0.5);
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!(pressure_sum(&f, &w, 0.5) <= lhs + 1e-15);
    }

    #[test]
    fn weight_sum_dp_matches_enumeration(w in table(2), f in family(2, 2), p in 2usize..10, t in 0usize..3) {
        let tau = [0.5, 0.75, 1.0][t];
        let a = Alphabet::full(2).unwrap();
        let fam = sigma_p_tau(&f, tau, p, &a, 1 << 20).unwrap();
        let direct = pressure_sum(&fam, &w, 0.5);
        let dp = sigma_p_tau_weight_sum(&f, tau, p, &a, &w, 0.5, 1 << 20).unwrap();
        prop_assert!((direct - dp).abs() <= 1e-12 * direct.max(1.0));
    }
}

#[test]
fn family_text_round_trip() {
    let f = CylinderFamily::from_words(3, [vec![0, 1, 2], vec![2, 2, 0]].into_iter().map(SymbolWord::from_letters)).unwrap();
    let mut buf = Vec::new();
    write_family(&mut buf, &f, 3).unwrap();
    assert_eq!(String::from_utf8(buf.clone()).unwrap(), "K=3 n=3\n0.1.2\n2.2.0\n");
    let (back, k) = read_family(buf.as_slice()).unwrap();
    assert_eq!((back, k), (f, 3));
    let err = read_family("K=2 n=2\n0.1\n0.7\n".as_bytes()).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn weight_table_json_round_trip() {
    let w = WeightTable::new(2, vec![-1.0, -2.0, -0.5, -50.0], -50.0, 0.0).unwrap();
    let s = serde_json::to_string(&w).unwrap();
    assert_eq!(s, r#"{"logJ":[-1.0,-2.0,-0.5,-50.0],"floorLog":-50.0,"capLog":0.0}"#);
    let back: WeightTable<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, w);
    assert!(serde_json::from_str::<WeightTable<f64>>(r#"{"logJ":[1.0,2.0,3.0],"floorLog":-50.0,"capLog":0.0}"#).is_err());
}
