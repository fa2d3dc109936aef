use std::collections::BTreeSet;

use crate::error::{Error, Result};

const FNV_OFFSET: u32 = 0x811c_9dc5;
const FNV_PRIME: u32 = 0x0100_0193;

/// 32-bit FNV-1a over the UTF-8 bytes of `text`.
pub fn fnv1a32(text: &str) -> u32 {
    text.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u32::from(b)).wrapping_mul(FNV_PRIME))
}

/// Character n-grams of `<surface>` with lengths `minn..=maxn`, plus the whole
/// bracketed word, deduplicated.
pub fn ngram_strings(surface: &str, minn: usize, maxn: usize) -> Result<BTreeSet<String>> {
    if surface.is_empty() {
        return Err(Error::Config("n-grams of an empty surface".into()));
    }
    if minn == 0 || minn > maxn {
        return Err(Error::Config(format!("invalid n-gram range {minn}..={maxn}")));
    }
    let chars: Vec<char> = format!("<{surface}>").chars().collect();
    let mut grams = BTreeSet::new();
    for start in 0..chars.len() {
        for n in minn..=maxn {
            if start + n > chars.len() {
                break;
            }
            grams.insert(chars[start..start + n].iter().collect());
        }
    }
    grams.insert(chars.iter().collect());
    Ok(grams)
}

/// Bucket ids of the surface's n-grams: FNV-1a 32 of each n-gram modulo
/// `buckets`, sorted and deduplicated. Distinct n-grams may share a bucket.
pub fn ngrams(surface: &str, minn: usize, maxn: usize, buckets: usize) -> Result<Vec<usize>> {
    if buckets == 0 {
        return Err(Error::Config("buckets must be at least 1".into()));
    }
    let mut ids: Vec<usize> = ngram_strings(surface, minn, maxn)?
        .iter()
        .map(|g| fnv1a32(g) as usize % buckets)
        .collect();
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a32(""), 0x811c9dc5);
        assert_eq!(fnv1a32("a"), 0xe40c292c);
        assert_eq!(fnv1a32("foobar"), 0xbf9cf968);
    }

    #[test]
    fn trigrams_of_cat() {
        let grams = ngram_strings("cat", 3, 3).unwrap();
        let expected: BTreeSet<String> = ["<ca", "cat", "at>", "<cat>"].iter().map(|s| s.to_string()).collect();
        assert_eq!(grams, expected);

        let mut ids: Vec<usize> = expected.iter().map(|g| fnv1a32(g) as usize % 1000).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ngrams("cat", 3, 3, 1000).unwrap(), ids);
    }

    #[test]
    fn short_word_yields_only_whole_word() {
        let grams = ngram_strings("a", 3, 3).unwrap();
        assert_eq!(grams.into_iter().collect::<Vec<_>>(), vec!["<a>".to_string()]);
    }

    #[test]
    fn single_bucket_collapses_everything() {
        assert_eq!(ngrams("walking", 3, 6, 1).unwrap(), vec![0]);
    }

    #[test]
    fn multibyte_characters_are_not_split() {
        let grams = ngram_strings("הסתכלה", 3, 3).unwrap();
        assert!(grams.contains("<הס"));
        assert!(grams.iter().all(|g| g.chars().count() == 3 || g == "<הסתכלה>"));
    }

    #[test]
    fn invalid_arguments() {
        assert!(ngrams("", 3, 6, 10).is_err());
        assert!(ngrams("a", 0, 6, 10).is_err());
        assert!(ngrams("a", 4, 3, 10).is_err());
        assert!(ngrams("a", 3, 6, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn contains_whole_word_bucket(word in "[a-zא-ת]{1,12}", minn in 1usize..4, extra in 0usize..4, buckets in 1usize..5000) {
            let ids = ngrams(&word, minn, minn + extra, buckets).unwrap();
            let whole = fnv1a32(&format!("<{word}>")) as usize % buckets;
            proptest::prop_assert!(ids.contains(&whole));
            proptest::prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
            proptest::prop_assert_eq!(ids, ngrams(&word, minn, minn + extra, buckets).unwrap());
        }
    }
}
