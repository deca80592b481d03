use pianorbm::pianoroll::{
    augment, rasterize, read_pbm, roll_to_score, segment, transpose_roll, write_pbm, WindowSource, PITCH_ROWS,
    WINDOW_COLUMNS,
};
use pianorbm::score_io::{parse_idx, parse_midi, read_pgm, read_vlq, write_midi, write_vlq};
use pianorbm::{NoteEvent, PianoRoll, RollDataset, Score};
use proptest::prelude::*;

fn note() -> impl Strategy<Value = NoteEvent> {
    (0u8..=127, 0u64..20_000, 1u64..3_000).prop_map(|(p, o, d)| NoteEvent::new(p, o, d).unwrap())
}

fn score() -> impl Strategy<Value = Score> {
    (prop::collection::vec(note(), 0..60), 1u32..=960).prop_map(|(notes, tpq)| Score::new(notes, tpq).unwrap())
}

fn roll(measures: usize) -> impl Strategy<Value = PianoRoll> {
    let width = measures * 96;
    (prop::collection::vec(0u8..=1, PITCH_ROWS * width), 0.0f64..1.0).prop_map(move |(cells, density)| {
        // Thin the grid so both sparse and dense rolls are covered.
        let keep = (density * 8.0) as u8;
        let cells = cells
            .iter()
            .enumerate()
            .map(|(i, &c)| u8::from(c == 1 && (i as u8 % 8) <= keep))
            .collect();
        PianoRoll::from_cells(width, cells).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn midi_round_trip(s in score()) {
        let parsed = parse_midi(&write_midi(&s).unwrap()).unwrap();
        prop_assert_eq!(&parsed.notes, &s.notes);
        prop_assert_eq!(parsed.ticks_per_quarter, s.ticks_per_quarter);
    }

    #[test]
    fn vlq_round_trip(value in 0u32..=0x0FFF_FFFF) {
        let mut buf = Vec::new();
        write_vlq(value, &mut buf);
        prop_assert!(buf.len() <= 4);
        prop_assert_eq!(read_vlq(&buf).unwrap(), (value, buf.len()));
    }

    #[test]
    fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = parse_midi(&bytes);
        let _ = parse_idx(&bytes);
        let _ = read_pbm(&bytes);
        let _ = read_pgm(&bytes);
    }

    #[test]
    fn midi_parser_survives_corrupted_files(s in score(), flips in prop::collection::vec((any::<usize>(), any::<u8>()), 1..8)) {
        let mut bytes = write_midi(&s).unwrap();
        for (at, value) in flips {
            let i = at % bytes.len();
            bytes[i] = value;
        }
        let _ = parse_midi(&bytes);
        for cut in [1, bytes.len() / 2, bytes.len() - 1] {
            let _ = parse_midi(&bytes[..cut]);
        }
    }

    #[test]
    fn truncated_midi_is_an_error(s in score()) {
        let bytes = write_midi(&s).unwrap();
        // The end-of-track event is the last thing in the file.
        prop_assert!(parse_midi(&bytes[..bytes.len() - 1]).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pbm_round_trip(r in (1usize..4).prop_flat_map(roll)) {
        prop_assert_eq!(read_pbm(&write_pbm(&r)).unwrap(), r);
    }

    #[test]
    fn roll_score_round_trip(r in (1usize..3).prop_flat_map(roll)) {
        prop_assert_eq!(rasterize(&roll_to_score(&r)).unwrap(), r);
    }

    #[test]
    fn roll_survives_midi(r in roll(2)) {
        let score = parse_midi(&write_midi(&roll_to_score(&r)).unwrap()).unwrap();
        prop_assert_eq!(rasterize(&score).unwrap(), r);
    }

    #[test]
    fn transposition_inverts(r in roll(2), shift in -12i32..=12) {
        if let Some(t) = transpose_roll(&r, shift) {
            prop_assert_eq!(t.count_ones(), r.count_ones());
            prop_assert_eq!(transpose_roll(&t, -shift).unwrap(), r);
        }
    }

    #[test]
    fn segments_tile_the_strip(r in (1usize..5).prop_flat_map(roll)) {
        let windows = segment(&r).unwrap();
        prop_assert_eq!(windows.len(), r.measures() / 2);
        for (k, w) in windows.iter().enumerate() {
            prop_assert_eq!(w, &r.columns(k * WINDOW_COLUMNS, (k + 1) * WINDOW_COLUMNS));
        }
        let joined = windows.iter().skip(1).fold(windows.first().cloned(), |acc, w| acc.map(|a| a.concat(w)));
        if let Some(joined) = joined {
            prop_assert_eq!(joined, r.columns(0, WINDOW_COLUMNS * windows.len()));
        }
    }
}

/// A window whose notes span rows `top..=bottom`.
fn band(top: usize, bottom: usize) -> PianoRoll {
    let mut w = PianoRoll::empty_window();
    w.set(top, 0, true);
    w.set(bottom, 5, true);
    w
}

#[test]
fn augmentation_keeps_only_fitting_shifts() {
    let mut data = RollDataset::new();
    let cases = [(10, 20), (0, 30), (50, 71), (3, 68)];
    for (i, &(top, bottom)) in cases.iter().enumerate() {
        let source = WindowSource {
            source: format!("piece{i}"),
            measure: 0,
            shift: 0,
        };
        data.push(band(top, bottom), source).unwrap();
    }
    let shifts = [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5, 6];
    let out = augment(&data, &shifts);
    // Shifting up by s moves the top row to top - s; originals are kept.
    let expected: usize = cases
        .iter()
        .map(|&(top, bottom)| 1 + shifts.iter().filter(|&&s| top as i32 - s >= 0 && bottom as i32 - s <= 71).count())
        .sum();
    assert_eq!(out.len(), expected);
    assert_eq!(out.iter().filter(|(_, src)| src.shift == 0).count(), cases.len());
    for (w, src) in out.iter() {
        let original = data.iter().find(|(_, o)| o.source == src.source).unwrap().0;
        assert_eq!(&transpose_roll(original, src.shift).unwrap(), w);
    }
}
