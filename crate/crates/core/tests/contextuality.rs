use num_bigint::BigUint;
use num_traits::One;
use qfa_core::contextuality::*;
use qfa_core::exactnum::Rational;

/// Independent χ: treat −1 entries as set bits and count parities.
fn chi_oracle(mask: u16) -> i32 {
    let neg = |cells: [u16; 3]| cells.iter().filter(|&&c| mask >> c & 1 == 1).count() % 2 == 1;
    let term = |cells| if neg(cells) { -1 } else { 1 };
    term([0, 1, 2]) + term([3, 4, 5]) + term([6, 7, 8]) + term([0, 3, 6]) + term([1, 4, 7]) - term([2, 5, 8])
}

#[test]
fn chi_matches_oracle_and_bound() {
    for mask in 0u16..512 {
        assert_eq!(chi_value(&SquareAssignment::from_mask(mask)), chi_oracle(mask), "{mask}");
    }
    assert_eq!(max_classical_chi(), 4);
    assert_eq!(chi_value(&SquareAssignment::new([1; 9]).unwrap()), 4);
    let mut flipped = [1i8; 9];
    flipped[8] = -1;
    // R3 and C3 both turn negative: 1 + 1 − 1 + 1 + 1 + 1.
    assert_eq!(chi_value(&SquareAssignment::new(flipped).unwrap()), 4);
    flipped[0] = -1;
    assert_eq!(chi_value(&SquareAssignment::new(flipped).unwrap()), 0);
    assert!(SquareAssignment::new([0; 9]).is_err());
}

#[test]
fn grid_identities_hold() {
    let grid = ObservableGrid::peres_mermin();
    let check = grid.check();
    assert!(check.all_hold(), "{check:?}");
}

#[test]
fn quantum_chi_is_six() {
    let t = quantum_chi_terms();
    for term in &t[..5] {
        assert!(term.is_one());
    }
    assert_eq!(t[5], Rational::from_integer(-1));
    assert_eq!(quantum_chi(), Rational::from_integer(6));
}

#[test]
fn quantum_game_never_loses() {
    let t = play_magic_square(&MagicStrategy::QuantumBell, 10_000, 2024).unwrap();
    assert_eq!(t.wins, 10_000);
    assert!(t.value.is_one());
    // All nine input pairs appear.
    for i in 1..=3 {
        for j in 1..=3 {
            assert!(t.rounds.iter().any(|r| r.i == i && r.j == j));
        }
    }
    // Outputs are genuinely random: several distinct Alice rows occur.
    let distinct: std::collections::BTreeSet<_> = t.rounds.iter().map(|r| r.alice).collect();
    assert_eq!(distinct.len(), 4);
    assert_eq!(play_magic_square(&MagicStrategy::QuantumBell, 50, 7).unwrap(), play_magic_square(&MagicStrategy::QuantumBell, 50, 7).unwrap());
}

#[test]
fn classical_strategies() {
    assert_eq!(alice_tables().len(), 64);
    assert_eq!(bob_tables().len(), 64);
    assert_eq!(best_classical_win_probability(), Rational::frac(8, 9));
    // Stable across runs.
    assert_eq!(best_classical_win_probability(), Rational::frac(8, 9));

    let plus = [[1i8; 3]; 3];
    let bob = [[1, 1, 1], [1, 1, 1], [1, 1, -1]];
    let t = StrategyTables { alice: plus, bob };
    t.validate().unwrap();
    assert_eq!(t.win_probability(), Rational::frac(8, 9));
    let game = play_magic_square(&MagicStrategy::ClassicalDeterministic(t), 9_000, 3).unwrap();
    assert!(game.rounds.iter().all(|r| r.win == !(r.i == 3 && r.j == 3)));

    // Against all-+1 rows, parity lets Bob disagree on at most two cells of
    // columns 1 and 2, and on all of column 3.
    let bob_bad = [[-1, -1, 1], [-1, -1, 1], [-1, -1, -1]];
    let bad = StrategyTables { alice: plus, bob: bob_bad };
    bad.validate().unwrap();
    assert!(bad.win_probability() <= Rational::frac(8, 9));
    assert_eq!(bad.win_probability(), Rational::frac(2, 9));

    let malformed = StrategyTables { alice: [[1, 1, -1], [1, 1, 1], [1, 1, 1]], bob };
    assert!(play_magic_square(&MagicStrategy::ClassicalDeterministic(malformed), 10, 0).is_err());
}

#[test]
fn memory_game_values() {
    for q in 1..=8 {
        let r = memory_game(&MemoryBob::QuantumQubit, q, 5).unwrap();
        assert_eq!(r.v, Rational::from_integer(q));
        assert_eq!(r.expected_v, Rational::from_integer(q));
        assert!(r.rounds.iter().all(|x| x.i_yes % 2 == 0 && x.i_no % 2 == 1 && x.k == 4 * x.j));
    }
    let n = BigUint::one() << 33u32;
    let r = memory_game(&MemoryBob::ClassicalBounded(n.clone()), 8, 5).unwrap();
    assert_eq!(r.expected_v, Rational::from_integer(classical_cutoff(&n, 8)));
    assert_eq!(r.expected_v, Rational::from_integer(8));
    for n_bits in [1u32, 5, 9, 12, 17, 20, 29, 40] {
        let n = BigUint::one() << n_bits;
        let r = memory_game(&MemoryBob::ClassicalBounded(n.clone()), 8, 9).unwrap();
        let cutoff = ((n_bits as i64 - 1) / 4).min(8);
        assert_eq!(r.expected_v, Rational::from_integer(cutoff), "N = 2^{n_bits}");
        for round in &r.rounds {
            if round.informed {
                assert!(round.term.is_one());
            } else {
                assert!(round.expected_term.is_zero());
            }
        }
    }
    assert!(memory_game(&MemoryBob::ClassicalBounded(BigUint::one()), 3, 0).is_err());
    assert!(memory_game(&MemoryBob::QuantumQubit, 0, 0).is_err());
}

#[test]
fn table_rows() {
    let rows = inequality_table(8, &(BigUint::one() << 17u32)).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1].exact, Some(Rational::from_integer(4)));
    assert_eq!(rows[4].exact, Some(Rational::from_integer(8)));
}
