//! MovieLens `u.data` parsing: tab-separated `user item rating timestamp`
//! lines with 1-based ids, mapped to dense 0-based indices, plus a
//! deterministic 80/20 train/test split.
//!
//! Split membership is a pure function of `(seed, user, item)` through a
//! stable 64-bit mix, so it does not depend on line order and is identical
//! across platforms and runs.

use std::io::BufRead;

use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingTriple {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
}

#[derive(Debug, Clone)]
pub struct MovielensData {
    pub ratings: Vec<RatingTriple>,
    pub users: usize,
    pub items: usize,
    /// Duplicate (user, item) pairs encountered; the last occurrence wins.
    pub duplicates: usize,
}

impl MovielensData {
    /// Splits ratings into (train, test) with roughly the given train
    /// fraction, deterministically under the seed.
    pub fn split(&self, train_fraction: f64, seed: u64) -> (Vec<RatingTriple>, Vec<RatingTriple>) {
        let threshold = (train_fraction.clamp(0.0, 1.0) * 100.0).round() as u64;
        let mut train = Vec::new();
        let mut test = Vec::new();
        for &triple in &self.ratings {
            let h = mix64(
                seed ^ mix64(triple.user as u64).wrapping_add(mix64((triple.item as u64) << 1)),
            );
            if h % 100 < threshold {
                train.push(triple);
            } else {
                test.push(triple);
            }
        }
        (train, test)
    }
}

/// SplitMix64 finalizer: a fixed, platform-stable 64-bit mix.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn parse_movielens(reader: impl BufRead) -> Result<MovielensData, IoError> {
    let mut seen = std::collections::HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut duplicates = 0usize;
    let mut max_user = 0usize;
    let mut max_item = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (user, item, rating) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(i), Some(r), Some(_timestamp)) => {
                let user: usize = u.parse().map_err(|e| IoError::Malformed {
                    line: idx + 1,
                    message: format!("bad user id {u:?}: {e}"),
                })?;
                let item: usize = i.parse().map_err(|e| IoError::Malformed {
                    line: idx + 1,
                    message: format!("bad item id {i:?}: {e}"),
                })?;
                let rating: f64 = r.parse().map_err(|e| IoError::Malformed {
                    line: idx + 1,
                    message: format!("bad rating {r:?}: {e}"),
                })?;
                (user, item, rating)
            }
            _ => {
                return Err(IoError::Malformed {
                    line: idx + 1,
                    message: "expected 4 tab-separated fields: user item rating timestamp".into(),
                })
            }
        };
        if user == 0 || item == 0 {
            return Err(IoError::Malformed {
                line: idx + 1,
                message: "ids are 1-based; found 0".into(),
            });
        }
        let key = (user - 1, item - 1);
        if seen.insert(key, rating).is_some() {
            duplicates += 1;
        } else {
            order.push(key);
        }
        max_user = max_user.max(user);
        max_item = max_item.max(item);
    }

    if seen.is_empty() {
        return Err(IoError::NoRatings);
    }
    let ratings = order
        .into_iter()
        .map(|(user, item)| RatingTriple { user, item, rating: seen[&(user, item)] })
        .collect();
    Ok(MovielensData { ratings, users: max_user, items: max_item, duplicates })
}

pub fn parse_movielens_path(path: &std::path::Path) -> Result<MovielensData, IoError> {
    parse_movielens(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_line_format() {
        let data = parse_movielens("196\t242\t3\t881250949\n".as_bytes()).unwrap();
        assert_eq!(
            data.ratings,
            vec![RatingTriple { user: 195, item: 241, rating: 3.0 }]
        );
        assert_eq!((data.users, data.items), (196, 242));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_movielens("".as_bytes()), Err(IoError::NoRatings)));
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let err = parse_movielens("1\t2\t3\t4\n5\t6\n".as_bytes()).unwrap_err();
        match err {
            IoError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_movielens("1\t2\tfive\t4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Malformed { line: 1, .. }));
    }

    #[test]
    fn duplicates_keep_last_and_are_counted() {
        let data =
            parse_movielens("1\t1\t3\t0\n1\t1\t5\t1\n2\t1\t4\t2\n".as_bytes()).unwrap();
        assert_eq!(data.duplicates, 1);
        assert_eq!(data.ratings.len(), 2);
        assert_eq!(data.ratings[0].rating, 5.0);
    }

    #[test]
    fn split_is_deterministic_and_order_independent() {
        let text = "1\t1\t3\t0\n1\t2\t4\t0\n2\t1\t5\t0\n2\t2\t2\t0\n3\t1\t1\t0\n";
        let data = parse_movielens(text.as_bytes()).unwrap();
        let (train_a, test_a) = data.split(0.8, 42);
        let (train_b, test_b) = data.split(0.8, 42);
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        // different seed moves entries
        let sizes: std::collections::BTreeSet<usize> = (0..50u64)
            .map(|seed| data.split(0.8, seed).0.len())
            .collect();
        assert!(sizes.len() > 1, "split should depend on the seed");
    }

    #[test]
    fn split_fractions_are_roughly_respected() {
        let mut text = String::new();
        for u in 1..=100 {
            for i in 1..=20 {
                text.push_str(&format!("{u}\t{i}\t3\t0\n"));
            }
        }
        let data = parse_movielens(text.as_bytes()).unwrap();
        let (train, test) = data.split(0.8, 7);
        let frac = train.len() as f64 / (train.len() + test.len()) as f64;
        assert!((frac - 0.8).abs() < 0.03, "train fraction {frac}");
    }
}
