use lscsim_core::corpus::{extract_plain_tokens, parse_str};
use lscsim_core::{AnnotatedCorpus, Pos, Sentence, Token};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = String> {
    // includes every character the format has to escape
    "[a-z|\\\\ \t%:0-9A-Z@_-]{1,8}"
}

fn token() -> impl Strategy<Value = Token> {
    let pos = prop_oneof![Just(Pos::Noun), Just(Pos::Verb), Just(Pos::Adj), Just(Pos::Adv), Just(Pos::Other)];
    (field(), prop::option::of((field(), pos, prop::option::of("[a-z%:0-9]{1,6}")))).prop_map(|(surface, rest)| {
        match rest {
            None => Token::plain(surface),
            Some((lemma, pos, None)) => Token::lemmatized(surface, lemma, pos),
            Some((lemma, pos, Some(sense))) => Token::annotated(surface, lemma, pos, sense),
        }
    })
}

fn corpus() -> impl Strategy<Value = AnnotatedCorpus> {
    prop::collection::vec(prop::collection::vec(token(), 1..8), 0..10).prop_map(|sentences| {
        let sentences = sentences
            .into_iter()
            .enumerate()
            .map(|(i, tokens)| Sentence { id: format!("d {i}|x"), tokens })
            .collect();
        AnnotatedCorpus::new(sentences).unwrap()
    })
}

proptest! {
    #[test]
    fn canonical_form_round_trips(c in corpus()) {
        let mut text = Vec::new();
        c.write_canonical(&mut text).unwrap();
        let parsed = parse_str(std::str::from_utf8(&text).unwrap()).unwrap();
        prop_assert_eq!(&parsed, &c);
        let mut again = Vec::new();
        parsed.write_canonical(&mut again).unwrap();
        prop_assert_eq!(text, again);
    }

    #[test]
    fn plain_tokens_are_clean(c in corpus()) {
        for s in c.sentences() {
            for w in extract_plain_tokens(s) {
                prop_assert!(!w.is_empty());
                prop_assert!(!w.contains('@') && !w.contains('_') && !w.chars().any(char::is_whitespace));
                prop_assert_eq!(w.to_lowercase(), w.clone());
            }
        }
    }

    #[test]
    fn index_counts_every_annotation(c in corpus()) {
        let annotated = c.sentences().iter().flat_map(|s| &s.tokens).filter(|t| t.sense.is_some()).count();
        let indexed: usize = c.lemma_index().values().map(Vec::len).sum();
        prop_assert_eq!(annotated, indexed);
        for stats in c.lemma_inventory().values() {
            prop_assert!(stats.total >= stats.annotated);
        }
    }
}
