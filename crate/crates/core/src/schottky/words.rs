//! Reduced words over the Schottky generators. A Schottky group is free, so
//! the reduced words (no letter followed by its inverse) enumerate the group
//! elements without repetition; there are 1 + sum_{k<=L} 2g(2g-1)^{k-1} of
//! length at most L.

use super::{schottky_generator, MobiusMap, SchottkyConfig};

/// A reduced word; letters are +-(handle index + 1), the sign selecting the
/// generator or its inverse, with the cached matrix product.
#[derive(Clone, Debug)]
pub struct GroupWord {
    pub letters: Vec<i32>,
    pub map: MobiusMap,
}

/// Closed-form count of reduced words of length <= max_len.
pub fn word_count(genus: usize, max_len: usize) -> usize {
    let g2 = 2 * genus;
    let mut total = 1usize;
    let mut shell = g2;
    for _ in 1..=max_len {
        total += shell;
        shell *= g2 - 1;
    }
    total
}

/// All reduced words of length <= max_len, shortest first, deterministic
/// order (breadth-first, letters in the order +1, -1, +2, -2, ...).
pub fn group_words(config: &SchottkyConfig, max_len: usize) -> Vec<GroupWord> {
    let g = config.handles.len();
    let mut letters: Vec<i32> = Vec::with_capacity(2 * g);
    let mut maps: Vec<MobiusMap> = Vec::with_capacity(2 * g);
    for (i, h) in config.handles.iter().enumerate() {
        let gen = schottky_generator(h);
        letters.push(i as i32 + 1);
        maps.push(gen);
        letters.push(-(i as i32 + 1));
        maps.push(gen.inverse());
    }
    let mut out = vec![GroupWord { letters: Vec::new(), map: MobiusMap::identity() }];
    let mut frontier = 0usize;
    for _ in 1..=max_len {
        let end = out.len();
        for wi in frontier..end {
            let last = out[wi].letters.last().copied();
            for (li, &l) in letters.iter().enumerate() {
                if last == Some(-l) {
                    continue;
                }
                let mut w = out[wi].letters.clone();
                w.push(l);
                let map = out[wi].map.compose(&maps[li]);
                out.push(GroupWord { letters: w, map });
            }
        }
        frontier = end;
    }
    out
}
