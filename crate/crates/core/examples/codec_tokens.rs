//! Self-delimiting code words and a whole machine scheme as one bit string.

use alphamachine::bits::BitString;
use alphamachine::codec::{decode_scheme, decode_sequence, encode_scheme, encode_token, Token};
use alphamachine::turing::fixtures::fig2_scheme;

fn main() {
    for t in [Token::External(0), Token::State(0), Token::Move(alphamachine::tape::Move::Left)] {
        println!("{:<12} {}", t.to_string(), encode_token(t));
    }

    let stream: BitString = "1000000110011000001".parse().unwrap();
    println!("{stream} -> {:?}", decode_sequence(&stream).unwrap());

    let bad: BitString = "10001001".parse().unwrap();
    println!("{bad} -> {}", decode_sequence(&bad).unwrap_err());

    let scheme = fig2_scheme();
    let bits = encode_scheme(&scheme).unwrap();
    println!("stroke table: {} bits", bits.len());
    let back = decode_scheme(&bits).unwrap();
    println!("decoded back: {} states, {} transitions", back.states.len(), back.transitions.len());
}
