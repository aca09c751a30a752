use ainf_cli::modelfile::{Block, Entry, FileProvenance, GroupHeader, ModelFile, Operation, FORMAT_VERSION};
use proptest::prelude::*;

fn label() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9^_]{0,4}"
}

fn model_file() -> impl Strategy<Value = ModelFile> {
    let blocks = prop::collection::vec((-40i32..5, -60i32..60, prop::collection::vec(label(), 1..4)), 1..5);
    (blocks, prop::sample::select(vec![3u32, 5, 7]), 1usize..8, any::<bool>(), any::<u64>())
        .prop_flat_map(|(blocks, prime, arity_bound, with_unit, gamma)| {
            let labels: Vec<String> = blocks.iter().flat_map(|b| b.2.clone()).collect();
            let pick = prop::sample::select(labels.clone());
            let entry = (
                prop::collection::vec(pick.clone(), 1..4),
                prop::collection::vec((pick.clone(), 1..prime), 0..3),
            )
                .prop_map(|(inputs, output)| Entry { inputs, output });
            let ops = prop::collection::vec((1usize..6, prop::collection::vec(entry, 0..5)), 0..4);
            let params = prop::collection::vec((label(), "[0-9a-z]{1,6}"), 0..4);
            (Just(blocks), Just(prime), Just(arity_bound), Just(gamma), ops, params, pick.prop_map(move |u| {
                if with_unit {
                    Some(u)
                } else {
                    None
                }
            }))
        })
        .prop_map(|(blocks, prime, arity_bound, gamma, ops, params, unit)| {
            let mut f = ModelFile {
                format_version: FORMAT_VERSION,
                prime,
                group: GroupHeader { p: prime, n: 1, q: 2, gamma },
                window: (-40, 5),
                arity_bound,
                unit,
                spaces: blocks.into_iter().map(|(s, w, labels)| Block { s, w, labels }).collect(),
                operations: ops.into_iter().map(|(arity, entries)| Operation { arity, entries }).collect(),
                provenance: FileProvenance { command: "model".into(), parameters: params, content_hash: String::new() },
            };
            f.seal();
            f
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn text_round_trip(f in model_file()) {
        let text = f.emit();
        let back = ModelFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.emit(), text);
    }

    #[test]
    fn json_round_trip(f in model_file()) {
        let back = ModelFile::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_json(), f.to_json());
    }

    /// A flipped byte either fails to parse or changes nothing the hash covers.
    #[test]
    fn corruption_is_caught(f in model_file(), pos in any::<prop::sample::Index>(), byte in 0x20u8..0x7f) {
        let mut bytes = f.emit().into_bytes();
        let i = pos.index(bytes.len());
        prop_assume!(bytes[i] != byte);
        bytes[i] = byte;
        let text = String::from_utf8(bytes).unwrap();
        if let Ok(g) = ModelFile::parse(&text) {
            prop_assert_eq!(g, f);
        }
    }
}
