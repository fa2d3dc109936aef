use std::io::{BufRead, Write};
use std::path::Path;

use crate::corpus::Token;
use crate::embeddings::Model;
use crate::error::{Error, Result};
use crate::fsutil::open_buffered;
use crate::query::cosine;

/// A word with its lemma and tag, so that any property configuration can
/// compose it even when its surface is out of vocabulary.
pub type AnnotatedWord = Token;

/// `target` should be more similar to `cand_high` than to `cand_low`, with
/// confidence `weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub target: AnnotatedWord,
    pub cand_high: AnnotatedWord,
    pub cand_low: AnnotatedWord,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemanticScore {
    pub score: f64,
    pub covered: usize,
    pub skipped: usize,
}

/// Reads triples as TSV: `target  cand_high  cand_low  weight`, each word
/// written `surface|lemma|tag`. Blank lines are skipped.
pub fn parse_triples<R: BufRead>(reader: R) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |column: usize, message: String| Error::Parse {
            line: line_no,
            column,
            message,
        };
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(err(1, format!("expected 4 tab-separated columns, got {}", cols.len())));
        }
        let word = |c: usize| Token::parse(cols[c]).map_err(|m| err(c + 1, m));
        let (target, cand_high, cand_low) = (word(0)?, word(1)?, word(2)?);
        let weight: f64 = cols[3]
            .parse()
            .map_err(|_| err(4, format!("invalid weight {:?}", cols[3])))?;
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(err(4, format!("weight {weight} outside (0, 1]")));
        }
        if target.surface == cand_high.surface
            || target.surface == cand_low.surface
            || cand_high.surface == cand_low.surface
        {
            return Err(err(1, "triple words must have distinct surfaces".into()));
        }
        triples.push(Triple {
            target,
            cand_high,
            cand_low,
            weight,
        });
    }
    Ok(triples)
}

pub fn load_triples(path: impl AsRef<Path>) -> Result<Vec<Triple>> {
    parse_triples(open_buffered(path.as_ref())?)
}

pub fn write_triples<W: Write>(mut w: W, triples: &[Triple]) -> Result<()> {
    for t in triples {
        writeln!(w, "{}\t{}\t{}\t{}", t.target, t.cand_high, t.cand_low, t.weight)?;
    }
    Ok(())
}

/// Confidence-weighted ranking accuracy of `model` on `triples`.
pub fn ag_score(model: &Model, triples: &[Triple]) -> Result<SemanticScore> {
    ag_score_with(|w| model.represent(w), triples)
}

/// Confidence-weighted ranking accuracy with an arbitrary word representation.
///
/// A triple counts 1 when `cos(target, cand_high) > cos(target, cand_low)`,
/// 0.5 on an exact tie and 0 otherwise; the score is the weighted mean over
/// triples whose three words all have a (non-zero) vector. The others are
/// reported as skipped.
pub fn ag_score_with<F>(represent: F, triples: &[Triple]) -> Result<SemanticScore>
where
    F: Fn(&AnnotatedWord) -> Option<Vec<f32>>,
{
    if triples.is_empty() {
        return Err(Error::EmptySample("no triples".into()));
    }
    let (mut num, mut den) = (0.0f64, 0.0f64);
    let mut covered = 0;
    for t in triples {
        let vectors = (represent(&t.target), represent(&t.cand_high), represent(&t.cand_low));
        let (Some(target), Some(high), Some(low)) = vectors else {
            continue;
        };
        let (Ok(sim_high), Ok(sim_low)) = (cosine(&target, &high), cosine(&target, &low)) else {
            continue;
        };
        let correct = if sim_high > sim_low {
            1.0
        } else if sim_high == sim_low {
            0.5
        } else {
            0.0
        };
        num += t.weight * correct;
        den += t.weight;
        covered += 1;
    }
    if covered == 0 {
        return Err(Error::NoCoverage(triples.len()));
    }
    Ok(SemanticScore {
        score: num / den,
        covered,
        skipped: triples.len() - covered,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    fn word(s: &str) -> AnnotatedWord {
        Token::parse(&format!("{s}|{s}|T")).unwrap()
    }

    fn triple(t: &str, h: &str, l: &str, weight: f64) -> Triple {
        Triple {
            target: word(t),
            cand_high: word(h),
            cand_low: word(l),
            weight,
        }
    }

    fn table(entries: &[(&str, [f32; 2])]) -> HashMap<String, Vec<f32>> {
        entries.iter().map(|(w, v)| (w.to_string(), v.to_vec())).collect()
    }

    #[test]
    fn parses_tsv_and_validates_weight() {
        let text = "a|a|X\tb|b|X\tc|c|Y\t0.75\n\nd|d|X\te|e|X\tf|f|X\t1\n";
        let triples = parse_triples(text.as_bytes()).unwrap();
        assert_eq!(triples.len(), 2);
        assert_eq!(triples[0].weight, 0.75);
        assert_eq!(triples[1].cand_low.surface, "f");

        let err = parse_triples("a|a|X\tb|b|X\tc|c|Y\t0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_triples("a|a|X\tb|b|X\tc|c|Y\t1.5\n".as_bytes()).is_err());
        assert!(parse_triples("a|a|X\ta|a|X\tc|c|Y\t1\n".as_bytes()).is_err());
        assert!(parse_triples("a|a|X\tb|b|X\t1\n".as_bytes()).is_err());
    }

    #[test]
    fn write_then_parse() {
        let triples = vec![triple("a", "b", "c", 0.5), triple("x", "y", "z", 1.0)];
        let mut buf = Vec::new();
        write_triples(&mut buf, &triples).unwrap();
        assert_eq!(parse_triples(buf.as_slice()).unwrap(), triples);
    }

    #[test]
    fn perfect_and_inverted_rankings() {
        let vecs = table(&[("t", [1.0, 0.0]), ("h", [1.0, 0.1]), ("l", [0.0, 1.0])]);
        let rep = |w: &AnnotatedWord| vecs.get(&w.surface).cloned();
        let s = ag_score_with(rep, &[triple("t", "h", "l", 0.3)]).unwrap();
        assert_eq!(s.score, 1.0);
        let s = ag_score_with(rep, &[triple("t", "l", "h", 0.3)]).unwrap();
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn weighted_mix() {
        let vecs = table(&[("t", [1.0, 0.0]), ("h", [1.0, 0.1]), ("l", [0.0, 1.0])]);
        let rep = |w: &AnnotatedWord| vecs.get(&w.surface).cloned();
        let triples = [triple("t", "h", "l", 0.9), triple("t", "l", "h", 0.1)];
        let s = ag_score_with(rep, &triples).unwrap();
        assert!((s.score - 0.9).abs() < 1e-12);
        assert_eq!((s.covered, s.skipped), (2, 0));
    }

    #[test]
    fn exact_tie_scores_half() {
        let vecs = table(&[("t", [1.0, 0.0]), ("h", [1.0, 1.0]), ("l", [1.0, -1.0])]);
        let rep = |w: &AnnotatedWord| vecs.get(&w.surface).cloned();
        let s = ag_score_with(rep, &[triple("t", "h", "l", 1.0)]).unwrap();
        assert_eq!(s.score, 0.5);
    }

    #[test]
    fn unrepresentable_triples_are_skipped() {
        let vecs = table(&[
            ("t", [1.0, 0.0]),
            ("h", [1.0, 0.1]),
            ("l", [0.0, 1.0]),
            ("z", [0.0, 0.0]),
        ]);
        let rep = |w: &AnnotatedWord| vecs.get(&w.surface).cloned();
        let triples = [
            triple("t", "h", "l", 1.0),
            triple("t", "h", "missing", 1.0),
            triple("t", "z", "l", 1.0),
        ];
        let s = ag_score_with(rep, &triples).unwrap();
        assert_eq!((s.score, s.covered, s.skipped), (1.0, 1, 2));
        let err = ag_score_with(rep, &triples[1..]).unwrap_err();
        assert!(matches!(err, Error::NoCoverage(2)));
        assert!(ag_score_with(rep, &[]).is_err());
    }
}
