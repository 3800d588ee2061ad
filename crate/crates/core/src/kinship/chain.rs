//! Parsing possessive relation chains such as
//! `"the sister-in-law's husband of B"` or `"son of only son of my grandfather"`.

use super::graph::KinshipError;
use super::words::CanonicalRelation;

/// Who a chain is anchored at: a named puzzle person or the speaker ("my ...").
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnchorRef {
    Named(String),
    Speaker,
}

/// One step: a relation word, optionally qualified with "only".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStep {
    pub word: CanonicalRelation,
    pub only: bool,
}

/// A parsed chain; `steps` are in evaluation order walking out from the
/// anchor, so `"sister-in-law's husband of B"` is `[sister-in-law, husband]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationChain {
    pub steps: Vec<ChainStep>,
    pub anchor: AnchorRef,
}

fn strip_articles(piece: &str) -> &str {
    let p = piece.trim();
    p.strip_prefix("the ").unwrap_or(p).trim()
}

/// Parses the words of one possessive run like `"grandfather's only son"`.
fn parse_possessive_run(run: &str, out: &mut Vec<ChainStep>) -> Result<(), KinshipError> {
    for piece in run.split("'s ") {
        let piece = piece.trim();
        let piece = piece.strip_suffix("'s").unwrap_or(piece).trim();
        let piece = strip_articles(piece);
        if piece.is_empty() {
            return Err(KinshipError::MalformedPossessive(format!(
                "empty relation word in {run:?}"
            )));
        }
        let (only, word_text) = match piece.strip_prefix("only ") {
            Some(rest) => (true, rest.trim()),
            None => (false, piece),
        };
        let lowered = word_text.to_lowercase();
        let word = CanonicalRelation::from_alias(&lowered)
            .ok_or_else(|| KinshipError::UnknownRelationWord(word_text.to_string()))?;
        out.push(ChainStep { word, only });
    }
    Ok(())
}

/// Parses a relation phrase ending in `of <person>` (or `of my <chain>` for
/// speaker-anchored phrases) into a [`RelationChain`].
pub fn parse_chain(text: &str) -> Result<RelationChain, KinshipError> {
    let cleaned = text.replace('\u{2019}', "'");
    let cleaned = cleaned.trim().trim_end_matches(['.', '?', '!', ',']).trim();
    let segments: Vec<&str> = cleaned.split(" of ").collect();
    if segments.len() < 2 {
        return Err(KinshipError::MalformedPossessive(format!(
            "missing terminal \"of <person>\" in {text:?}"
        )));
    }
    let mut steps = Vec::new();
    let anchor_segment = strip_articles(segments[segments.len() - 1]);
    let anchor = if let Some(rest) = anchor_segment.strip_prefix("my ") {
        parse_possessive_run(rest, &mut steps)?;
        AnchorRef::Speaker
    } else {
        if anchor_segment.is_empty() || anchor_segment.contains("'s ") {
            return Err(KinshipError::MalformedPossessive(format!(
                "anchor must be a plain name, got {anchor_segment:?}"
            )));
        }
        if CanonicalRelation::from_alias(&anchor_segment.to_lowercase()).is_some() {
            return Err(KinshipError::MalformedPossessive(format!(
                "anchor must be a named person or \"my ...\", got {anchor_segment:?}"
            )));
        }
        AnchorRef::Named(anchor_segment.to_string())
    };
    // "son of only son of X" nests right-to-left: the segment next to the
    // anchor evaluates first.
    for segment in segments[..segments.len() - 1].iter().rev() {
        parse_possessive_run(segment, &mut steps)?;
    }
    if steps.is_empty() {
        return Err(KinshipError::MalformedPossessive(format!(
            "no relation steps in {text:?}"
        )));
    }
    Ok(RelationChain { steps, anchor })
}

/// Parses a statement of the supported template `"<X> is the <chain> of <Y>"`
/// into the subject name and the chain. Trailing question sentences after the
/// first period are ignored.
pub fn parse_statement(text: &str) -> Result<(String, RelationChain), KinshipError> {
    let first = text.split('.').next().unwrap_or("").trim();
    let (subject, rest) = first.split_once(" is ").ok_or_else(|| {
        KinshipError::MalformedPossessive(format!(
            "expected \"<X> is the <chain> of <Y>\", got {text:?}"
        ))
    })?;
    let subject = strip_articles(subject);
    if subject.is_empty() || subject.contains(' ') {
        return Err(KinshipError::MalformedPossessive(format!(
            "subject must be a single name, got {subject:?}"
        )));
    }
    let chain = parse_chain(strip_articles(rest))?;
    Ok((subject.to_string(), chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use CanonicalRelation::*;

    fn step(word: CanonicalRelation) -> ChainStep {
        ChainStep { word, only: false }
    }

    fn only(word: CanonicalRelation) -> ChainStep {
        ChainStep { word, only: true }
    }

    #[test]
    fn possessive_chain_with_named_anchor() {
        let c = parse_chain("sister-in-law's husband of B").unwrap();
        assert_eq!(c.steps, vec![step(SisterInLaw), step(Husband)]);
        assert_eq!(c.anchor, AnchorRef::Named("B".into()));
    }

    #[test]
    fn single_step_chain() {
        let c = parse_chain("father of B").unwrap();
        assert_eq!(c.steps, vec![step(Father)]);
        assert_eq!(c.anchor, AnchorRef::Named("B".into()));
    }

    #[test]
    fn only_attaches_to_its_step() {
        let c = parse_chain("greatgrandfather's only grandson of B").unwrap();
        assert_eq!(c.steps, vec![step(GreatGrandfather), only(Grandson)]);
        assert_eq!(c.anchor, AnchorRef::Named("B".into()));
    }

    #[test]
    fn of_nesting_evaluates_inside_out() {
        let c = parse_chain("son of only son of my grandfather").unwrap();
        assert_eq!(c.anchor, AnchorRef::Speaker);
        assert_eq!(c.steps, vec![step(Grandfather), only(Son), step(Son)]);
    }

    #[test]
    fn speaker_anchor_with_possessive_tail() {
        let c = parse_chain("son of only son of my greatgrandfather's only grandson").unwrap();
        assert_eq!(c.anchor, AnchorRef::Speaker);
        assert_eq!(
            c.steps,
            vec![step(GreatGrandfather), only(Grandson), only(Son), step(Son)]
        );
    }

    #[test]
    fn printed_spellings_normalize() {
        let c = parse_chain("greatgrandfather's only grand daughter inlaw's brother inlaw of B")
            .unwrap();
        assert_eq!(
            c.steps,
            vec![
                step(GreatGrandfather),
                only(GranddaughterInLaw),
                step(BrotherInLaw)
            ]
        );
    }

    #[test]
    fn articles_and_punctuation_are_tolerated() {
        let c = parse_chain("the grandfather's only son of F.").unwrap();
        assert_eq!(c.steps, vec![step(Grandfather), only(Son)]);
        assert_eq!(c.anchor, AnchorRef::Named("F".into()));
    }

    #[test]
    fn unknown_word_is_reported() {
        assert!(matches!(
            parse_chain("stepfather of B"),
            Err(KinshipError::UnknownRelationWord(w)) if w == "stepfather"
        ));
    }

    #[test]
    fn missing_anchor_is_malformed() {
        assert!(matches!(
            parse_chain("father's brother"),
            Err(KinshipError::MalformedPossessive(_))
        ));
    }

    #[test]
    fn statement_template_parses() {
        let (subject, chain) =
            parse_statement("A is the brother of B. How is A related to B?").unwrap();
        assert_eq!(subject, "A");
        assert_eq!(chain.steps, vec![step(Brother)]);
        assert_eq!(chain.anchor, AnchorRef::Named("B".into()));
    }
}
