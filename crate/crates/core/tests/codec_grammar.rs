//! Every bit string up to 16 bits, decoded and checked against a regular
//! expression for streams of code words.

use alphamachine::bits::BitString;
use alphamachine::codec::{decode_sequence, encode_tokens, CodecError};
use regex::Regex;

#[test]
fn decoder_accepts_exactly_the_code_word_language() {
    let stream = Regex::new(r"^(10+1)*$").unwrap();
    let word = Regex::new(r"10+1").unwrap();
    for len in 0..=16 {
        for n in 0..(1u32 << len) {
            let text: String = (0..len).map(|i| if n >> (len - 1 - i) & 1 == 1 { '1' } else { '0' }).collect();
            let bits: BitString = text.parse().unwrap();
            match decode_sequence(&bits) {
                Ok(tokens) => {
                    assert!(stream.is_match(&text), "{text} decoded but is not a stream");
                    // one token per code word, each re-encoding to its own bits
                    let words: Vec<&str> = word.find_iter(&text).map(|m| m.as_str()).collect();
                    assert_eq!(tokens.len(), words.len(), "{text}");
                    for (t, w) in tokens.iter().zip(&words) {
                        assert_eq!(t.bits().to_string(), *w);
                    }
                    assert_eq!(encode_tokens(&tokens), bits);
                }
                Err(e) => {
                    assert!(!stream.is_match(&text), "{text} is a stream but failed: {e}");
                    let CodecError::MalformedCode { offset, .. } = e else {
                        panic!("{text}: unexpected {e}");
                    };
                    assert!(offset <= len as usize);
                }
            }
        }
    }
}

/// No code word is a proper prefix of a parse of another: the zeros after a
/// leading 1 run to the next 1, so the first word is forced.
#[test]
fn code_words_are_prefix_free() {
    let words: Vec<String> = (1..=12).map(|k| format!("1{}1", "0".repeat(k))).collect();
    for a in &words {
        for b in &words {
            if a != b {
                assert!(!b.starts_with(a.as_str()), "{a} is a prefix of {b}");
            }
        }
    }
}
