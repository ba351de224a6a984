mod common;

use brickrl_core::parser::{parse_pointcloud, parse_structure, serialize_pointcloud, serialize_structure, Layout};
use common::{grid_in, structure_in, SMALL, WORLD};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn structure_roundtrip(s in structure_in(WORLD, 30, 40)) {
        for layout in [Layout::OnePerLine, Layout::CommaInline] {
            let text = serialize_structure(&s, layout);
            let (back, report) = parse_structure(&text);
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(report.parsed_ok, !s.is_empty());
            prop_assert!(report.malformed_lines.is_empty());
        }
    }

    #[test]
    fn pointcloud_roundtrip(g in grid_in(SMALL)) {
        prop_assert_eq!(parse_pointcloud(&serialize_pointcloud(&g), SMALL).unwrap(), g);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let text = String::from_utf8_lossy(&bytes);
        let (s, report) = parse_structure(&text);
        prop_assert_eq!(s.len(), report.brick_count);
        prop_assert_eq!(report.parsed_ok, report.brick_count >= 1 && report.malformed_lines.is_empty());
        if report.empty_response {
            prop_assert!(!report.parsed_ok);
        }
        let _ = parse_pointcloud(&text, WORLD);
    }

    #[test]
    fn grammar_shaped_noise_never_panics(text in "[0-9x(), \\n#-]{0,80}") {
        let _ = parse_structure(&text);
        let _ = parse_pointcloud(&text, WORLD);
    }

    #[test]
    fn appending_malformed_line_is_monotone(
        s in structure_in(WORLD, 0, 20).prop_filter("non-empty", |s| !s.is_empty()),
        junk in "[a-z ]{1,20}",
    ) {
        prop_assume!(!junk.trim().is_empty());
        let text = serialize_structure(&s, Layout::OnePerLine);
        let (_, before) = parse_structure(&text);
        prop_assert!(before.parsed_ok);
        let (after_s, after) = parse_structure(&format!("{text}\n{junk}"));
        prop_assert!(!after.parsed_ok);
        prop_assert_eq!(after_s, s);
    }
}
