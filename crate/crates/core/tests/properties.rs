use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tbaudit::cipher::{Round, RoundKeyTuple, TbCipher};
use tbaudit::gf2::{BitMatrix, BitVector, BrickLayout, Wall};
use tbaudit::group::{minimal_block, GeneratorSet, Perm};
use tbaudit::mixing::MixingLayer;
use tbaudit::sbox::SBox;
use tbaudit::specfile::{cipher_to_spec, parse_cipher_spec};

fn perm_table(m: usize, seed: u64) -> Vec<u16> {
    let mut t: Vec<u16> = (0..1u16 << m).collect();
    t.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    t
}

fn invertible(d: usize, seed: u64) -> BitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows = (0..d).map(|_| rand::Rng::gen::<u128>(&mut rng) & ((1 << d) - 1)).collect();
        let m = BitMatrix::from_rows(rows, d).unwrap();
        if m.is_invertible() {
            return m;
        }
    }
}

fn small_cipher(m: usize, b: usize, rounds: usize, seed: u64) -> TbCipher {
    let l = BrickLayout::new(m, b).unwrap();
    let rs = (0..rounds as u64)
        .map(|h| {
            let bricks = (0..b as u64)
                .map(|i| SBox::with_width(m, perm_table(m, seed ^ (h << 8) ^ i)).unwrap())
                .collect();
            let layer = MixingLayer::new(invertible(m * b, seed.wrapping_add(h)), l).unwrap();
            Round::new(bricks, layer).unwrap()
        })
        .collect();
    TbCipher::new(l, rs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ddt_rows_sum_to_field_size(m in 3usize..7, seed in any::<u64>()) {
        let f = SBox::with_width(m, perm_table(m, seed)).unwrap();
        let ddt = f.ddt();
        for a in 0..1usize << m {
            prop_assert_eq!(ddt.row(a).iter().sum::<u32>(), 1 << m);
            prop_assert!(ddt.row(a).iter().all(|c| c % 2 == 0));
        }
        prop_assert!(f.differential_uniformity() >= 2);
    }

    #[test]
    fn measures_ignore_the_output_shift(m in 3usize..6, seed in any::<u64>()) {
        let f = SBox::with_width(m, perm_table(m, seed)).unwrap();
        let g = f.normalize();
        prop_assert!(g.is_normalized());
        prop_assert_eq!(f.differential_uniformity(), g.differential_uniformity());
        prop_assert_eq!(f.min_derivative_image(), g.min_derivative_image());
        prop_assert_eq!(f.linearity(), g.linearity());
    }

    #[test]
    fn inverse_has_the_same_uniformity(m in 3usize..7, seed in any::<u64>()) {
        let f = SBox::with_width(m, perm_table(m, seed)).unwrap();
        let g = f.inverse();
        prop_assert_eq!(f.differential_uniformity(), g.differential_uniformity());
        for x in 0..1usize << m {
            prop_assert_eq!(g.apply(f.apply(x)), x);
        }
    }

    #[test]
    fn decrypt_inverts_encrypt(seed in any::<u64>(), rounds in 1usize..4, x in any::<u128>()) {
        let c = small_cipher(3, 3, rounds, seed);
        let keys = RoundKeyTuple::random(&c, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let p = BitVector::masked(x, c.d());
        let y = c.encrypt(&keys, &p).unwrap();
        prop_assert_eq!(c.decrypt(&keys, &y).unwrap(), p);
        let table = c.encryption_table(&keys).unwrap();
        let distinct: BTreeSet<u32> = table.iter().copied().collect();
        prop_assert_eq!(distinct.len(), table.len());
    }

    #[test]
    fn wall_images_match_the_layer(seed in any::<u64>(), bricks in 1u64..15) {
        let l = BrickLayout::new(2, 4).unwrap();
        let layer = MixingLayer::new(invertible(8, seed), l).unwrap();
        let w = Wall::new(l, bricks).unwrap();
        let image = layer.image(&w.subspace());
        prop_assert_eq!(image.dim(), w.dim());
        match layer.map_wall(&w) {
            Some(v) => prop_assert_eq!(v.subspace(), image),
            None => prop_assert!(l.as_wall(&image).is_none()),
        }
    }

    #[test]
    fn minimal_block_is_a_block_through_v(seed in any::<u64>(), v in 1u32..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<u32> = (0..12).collect();
        p.shuffle(&mut rng);
        let cycle: Vec<u32> = (0..12).map(|x| (x + 1) % 12).collect();
        let g = GeneratorSet::unlabelled(vec![
            Perm::from_images(cycle).unwrap(),
            Perm::from_images(p).unwrap(),
        ])
        .unwrap();
        let sys = minimal_block(&g, v).unwrap();
        prop_assert!(sys.is_invariant_under(&g));
        prop_assert_eq!(sys.block_of(0), sys.block_of(v));
        prop_assert_eq!(12 % sys.block_size(), 0);
    }

    #[test]
    fn perm_composition_with_inverse(seed in any::<u64>(), n in 1usize..40) {
        let mut p: Vec<u32> = (0..n as u32).collect();
        p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = Perm::from_images(p).unwrap();
        prop_assert_eq!(p.then(&p.inverse()).unwrap(), Perm::identity(n));
    }

    #[test]
    fn spec_files_round_trip(seed in any::<u64>(), rounds in 1usize..3) {
        let c = small_cipher(3, 2, rounds, seed);
        let text = cipher_to_spec(&c, None);
        prop_assert_eq!(parse_cipher_spec(&text).unwrap().cipher, c);
    }
}
