mod common;

use proptest::prelude::*;
use skelevo::temporal_match::{match_all, match_pair, PixelClass};
use skelevo::{Pixel, PixelSet};

fn frame(w: u32, h: u32, index: usize, max: usize) -> impl Strategy<Value = PixelSet> {
    proptest::collection::vec((0..w, 0..h), 0..max).prop_map(move |pts| {
        PixelSet::new(w, h, index, pts.into_iter().map(|(x, y)| Pixel::new(x, y))).unwrap()
    })
}

fn pair() -> impl Strategy<Value = (PixelSet, PixelSet)> {
    (2u32..=100, 2u32..=100).prop_flat_map(|(w, h)| (frame(w, h, 0, 200), frame(w, h, 1, 200)))
}

proptest! {
    #[test]
    fn agrees_with_brute_force((prev, next) in pair()) {
        prop_assume!(!prev.is_empty() && !next.is_empty());
        let got = match_pair(&prev, &next);
        let want = common::brute_match(&prev, &next);
        prop_assert_eq!(got.forward.unwrap(), want.forward);
        prop_assert_eq!(got.backward.unwrap(), want.backward);
        prop_assert_eq!(got.classification, want.classification);
    }

    #[test]
    fn maps_are_total_and_classes_partition((prev, next) in pair()) {
        let m = match_pair(&prev, &next);
        prop_assert_eq!(m.classification.len(), next.len());
        prop_assert_eq!(m.class_counts().iter().sum::<usize>(), next.len());
        if !prev.is_empty() && !next.is_empty() {
            let fwd = m.forward.as_ref().unwrap();
            let bwd = m.backward.as_ref().unwrap();
            prop_assert_eq!(fwd.len(), prev.len());
            prop_assert_eq!(bwd.len(), next.len());
            prop_assert!(fwd.iter().all(|&q| (q as usize) < next.len()));
            prop_assert!(bwd.iter().all(|&p| (p as usize) < prev.len()));
            // nearest neighbour: no target strictly closer than the match
            for (i, p) in prev.iter().enumerate() {
                let d = p.dist2(next.pixels()[fwd[i] as usize]);
                prop_assert!(next.iter().all(|q| p.dist2(q) >= d));
            }
        } else {
            prop_assert!(m.is_degenerate());
            prop_assert!(m.classification.iter().all(|c| *c == PixelClass::Growth));
        }
    }

    #[test]
    fn identical_frames_are_known(set in frame(40, 40, 0, 150)) {
        prop_assume!(!set.is_empty());
        let m = match_pair(&set, &set.clone().with_index(1));
        prop_assert!(m.classification.iter().all(|c| *c == PixelClass::Known));
    }
}

#[test]
fn sequence_shorter_than_two_is_rejected() {
    let one = vec![PixelSet::empty(4, 4, 0)];
    assert!(match_all(&one).is_err());
    assert!(match_all(&[]).is_err());
}

#[test]
fn csv_exports() {
    let prev = PixelSet::new(8, 8, 0, [Pixel::new(1, 1), Pixel::new(2, 1)]).unwrap();
    let next = PixelSet::new(
        8,
        8,
        1,
        [Pixel::new(1, 1), Pixel::new(2, 1), Pixel::new(3, 1)],
    )
    .unwrap();
    let m = match_pair(&prev, &next);
    assert_eq!(
        m.classes_csv(&next),
        "x,y,class\n1,1,known\n2,1,growth\n3,1,growth\n"
    );
}

#[test]
fn two_claimants_of_one_prev_pixel() {
    // prev (2,0) forward-matches (2,1); (0,0) and (4,0) both backward-match it
    let prev = PixelSet::new(8, 8, 0, [Pixel::new(2, 0)]).unwrap();
    let next = PixelSet::new(
        8,
        8,
        1,
        [Pixel::new(0, 0), Pixel::new(4, 0), Pixel::new(2, 1)],
    )
    .unwrap();
    let m = match_pair(&prev, &next);
    let want = common::brute_match(&prev, &next);
    assert_eq!(m.classification, want.classification);
    assert_eq!(m.forward.unwrap(), want.forward);
    // the shared partner is over-claimed, so nobody is known
    assert!(m.classification.iter().all(|c| *c != PixelClass::Known));
}
