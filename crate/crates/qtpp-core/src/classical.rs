//! Classical XOR three-pass exchange and the eavesdropper's exact recovery:
//! XORing the three wire messages cancels both keys and yields the plaintext.
//! Kept as an executable negative result; the rotation cipher exists because
//! of it.

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorTranscript {
    /// M ^ K_A
    pub m1: Vec<bool>,
    /// M ^ K_A ^ K_B
    pub m2: Vec<bool>,
    /// M ^ K_B
    pub m3: Vec<bool>,
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| x ^ y).collect()
}

pub fn xor_three_pass(
    message: &[bool],
    k_a: &[bool],
    k_b: &[bool],
) -> Result<(XorTranscript, Vec<bool>)> {
    if message.is_empty() {
        return Err(CoreError::EmptyMessage);
    }
    for key in [k_a, k_b] {
        if key.len() != message.len() {
            return Err(CoreError::LengthMismatch(message.len(), key.len()));
        }
    }
    let m1 = xor(message, k_a);
    let m2 = xor(&m1, k_b);
    let m3 = xor(&m2, k_a);
    let bob_recovered = xor(&m3, k_b);
    Ok((XorTranscript { m1, m2, m3 }, bob_recovered))
}

/// Eve's passive break: m1 ^ m2 ^ m3 = M, with probability 1.
pub fn eve_xor_recover(t: &XorTranscript) -> Vec<bool> {
    xor(&xor(&t.m1, &t.m2), &t.m3)
}

pub fn bits_from_str(s: &str) -> Result<Vec<bool>> {
    if s.is_empty() {
        return Err(CoreError::EmptyMessage);
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CoreError::Config(format!(
                "bit strings may only contain 0 and 1, got '{other}'"
            ))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
