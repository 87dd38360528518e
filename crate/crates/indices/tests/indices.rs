use indices::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

#[test]
fn psi_order_2x2() {
    let order: Vec<usize> = CAP_2X2.iter().map(|&i| psi(i, 2)).collect();
    assert_eq!(order, vec![1, 2, 3, 4]);
    assert_eq!(psi(CapIndex::new(1, 1), 2), 1);
    assert_eq!(psi(CapIndex::new(1, 2), 2), 2);
    assert_eq!(psi(CapIndex::new(2, 1), 2), 3);
    assert_eq!(psi(CapIndex::new(2, 2), 2), 4);
}

#[test]
fn psi_order_p3_q2() {
    let expected = ["11'", "12'", "13'", "21'", "22'", "23'"];
    let got: Vec<String> = cap_indices(3, 2).iter().map(|i| i.to_string()).collect();
    assert_eq!(got, expected);
    for (k, &idx) in cap_indices(3, 2).iter().enumerate() {
        assert_eq!(psi(idx, 3), k + 1);
        assert_eq!(psi_inv(k + 1, 3), idx);
    }
}

#[test]
fn psi_first_element_any_p() {
    for p in 1..=5 {
        assert_eq!(psi(CapIndex::new(1, 1), p), 1);
    }
}

#[test]
fn psi_checked_bounds() {
    assert_eq!(psi_checked(CapIndex::new(2, 3), 2, 2), Err(IndexError::BadIndex));
    assert_eq!(psi_checked(CapIndex::new(3, 1), 2, 2), Err(IndexError::BadIndex));
    assert_eq!(psi_checked(CapIndex::new(0, 1), 2, 2), Err(IndexError::BadIndex));
    assert_eq!(psi_checked(CapIndex::new(2, 3), 3, 2), Ok(6));
}

#[test]
fn slash_golden() {
    let i12 = CapIndex::new(1, 2);
    assert_eq!(slash(i12), CapIndex::new(2, 1));
    assert_eq!(mixed_row(i12), CapIndex::new(1, 1));
    assert_eq!(mixed_col(i12), CapIndex::new(2, 2));

    let i11 = CapIndex::new(1, 1);
    assert_eq!(slash(i11), CapIndex::new(2, 2));
    assert_eq!(mixed_row(i11), CapIndex::new(1, 2));
    assert_eq!(mixed_col(i11), CapIndex::new(2, 1));
}

#[test]
fn slash_involutions_and_partition() {
    for &i in &CAP_2X2 {
        assert_eq!(slash(slash(i)), i);
        assert_eq!(mixed_row(mixed_row(i)), i);
        assert_eq!(mixed_col(mixed_col(i)), i);
        let four: BTreeSet<CapIndex> =
            [i, slash(i), mixed_row(i), mixed_col(i)].into_iter().collect();
        assert_eq!(four, CAP_2X2.iter().copied().collect());
        // the two mixed flips compose to the full flip
        assert_eq!(mixed_row(mixed_col(i)), slash(i));
    }
}

#[test]
fn slash_shape_errors() {
    let i = CapIndex::new(1, 1);
    assert_eq!(slash_checked(i, 3, 2), Err(IndexError::UnsupportedShape));
    assert_eq!(mixed_row_checked(i, 2, 3), Err(IndexError::UnsupportedShape));
    assert_eq!(mixed_col_checked(i, 1, 1), Err(IndexError::UnsupportedShape));
    assert_eq!(slash_checked(CapIndex::new(3, 1), 2, 2), Err(IndexError::BadIndex));
    assert_eq!(slash_checked(i, 2, 2), Ok(CapIndex::new(2, 2)));
}

#[test]
fn cap_index_text_roundtrip() {
    for &i in &CAP_2X2 {
        let s = i.to_string();
        assert_eq!(s.parse::<CapIndex>().unwrap(), i);
    }
    assert_eq!("12'".parse::<CapIndex>().unwrap(), CapIndex::new(1, 2));
    assert!("12".parse::<CapIndex>().is_err());
    assert!("1'".parse::<CapIndex>().is_err());
    assert!("102'".parse::<CapIndex>().is_err());
}

#[test]
fn multi_index_shift_golden() {
    let e11 = MultiIndex::unit(CapIndex::new(1, 1));
    assert_eq!(e11.0, vec![1, 0, 0, 0]);
    let bumped = mi_shift(&e11, CapIndex::new(2, 2), 1);
    assert_eq!(bumped.0, vec![1, 0, 0, 1]);
    assert_eq!(mi_weight(&bumped), 2);
    let neg = mi_shift(&e11, CapIndex::new(1, 2), -1);
    assert_eq!(neg.0, vec![1, -1, 0, 0]);
    assert!(!mi_admissible(&neg));
    assert!(mi_admissible(&bumped));
    assert_eq!(mi_weight(&MultiIndex::zero(4)), 0);
}

fn binom(n: usize, k: usize) -> usize {
    let mut acc = 1usize;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

#[test]
fn enumerate_counts() {
    assert_eq!(mi_enumerate(2, 4).len(), 10);
    for n in 0..=8 {
        let all = mi_enumerate(n, 4);
        assert_eq!(all.len(), binom(n + 3, 3));
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
        for a in &all {
            assert!(a.admissible());
            assert_eq!(a.weight(), n as i64);
        }
    }
    assert_eq!(mi_enumerate(0, 0).len(), 1);
    assert_eq!(mi_enumerate(3, 0).len(), 0);
    assert_eq!(mi_enumerate(5, 1).len(), 1);
}

proptest! {
    #[test]
    fn psi_bijective_monotone(p in 1u8..=3, q in 1u8..=3) {
        let all = cap_indices(p, q);
        let vals: Vec<usize> = all.iter().map(|&i| psi(i, p)).collect();
        let expected: Vec<usize> = (1..=(p as usize * q as usize)).collect();
        prop_assert_eq!(vals, expected);
        for &i in &all {
            prop_assert_eq!(psi_inv(psi(i, p), p), i);
        }
    }

    #[test]
    fn shift_inverse(slots in prop::collection::vec(-3i32..=3, 4), k in 0usize..4, d in -2i32..=2) {
        let a = MultiIndex(slots);
        let b = a.shifted_at(k, d).shifted_at(k, -d);
        prop_assert_eq!(a, b);
    }
}
