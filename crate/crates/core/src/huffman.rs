//! Canonical Huffman coding over the 256-symbol int8 alphabet.
//!
//! Code lengths come from the usual two-queue-free heap construction with a
//! fixed tie-break (lower frequency first, then smaller minimum symbol in the
//! subtree), after which codewords are reassigned canonically by
//! (length, symbol). Only the 256 length bytes need to be stored to rebuild
//! the decoder.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const ALPHABET: usize = 256;

#[inline]
pub fn symbol_index(s: i8) -> usize {
    (s as i16 + 128) as usize
}

#[inline]
pub fn index_symbol(i: usize) -> i8 {
    (i as i16 - 128) as i8
}

pub fn count_frequencies(symbols: &[i8]) -> [u64; ALPHABET] {
    let mut freqs = [0u64; ALPHABET];
    for &s in symbols {
        freqs[symbol_index(s)] += 1;
    }
    freqs
}

#[derive(Clone, Copy, Eq, PartialEq)]
struct HeapNode {
    freq: u64,
    min_sym: u16,
    node: u16,
}

// BinaryHeap is a max-heap; reverse so the smallest (freq, min_sym) pops first.
impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.freq, other.min_sym).cmp(&(self.freq, self.min_sym))
    }
}

impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Huffman code lengths for the given frequency table. Absent symbols get
/// length 0. A single distinct symbol gets length 1 so the stream stays
/// decodable; an all-zero table yields all-zero lengths.
pub fn code_lengths(freqs: &[u64; ALPHABET]) -> [u8; ALPHABET] {
    let mut lengths = [0u8; ALPHABET];
    let present: Vec<usize> = (0..ALPHABET).filter(|&i| freqs[i] > 0).collect();
    match present.len() {
        0 => return lengths,
        1 => {
            lengths[present[0]] = 1;
            return lengths;
        }
        _ => {}
    }

    // tree nodes: 0..ALPHABET are leaves, merged nodes appended after
    let mut parent = vec![u16::MAX; 2 * present.len()];
    let mut node_sym = Vec::with_capacity(2 * present.len());
    let mut heap = BinaryHeap::with_capacity(present.len());
    for (slot, &sym) in present.iter().enumerate() {
        node_sym.push(sym as u16);
        heap.push(HeapNode {
            freq: freqs[sym],
            min_sym: sym as u16,
            node: slot as u16,
        });
    }
    let mut next = present.len() as u16;
    while heap.len() > 1 {
        let a = heap.pop().unwrap();
        let b = heap.pop().unwrap();
        parent[a.node as usize] = next;
        parent[b.node as usize] = next;
        node_sym.push(a.min_sym.min(b.min_sym));
        heap.push(HeapNode {
            freq: a.freq + b.freq,
            min_sym: a.min_sym.min(b.min_sym),
            node: next,
        });
        next += 1;
    }

    for (slot, &sym) in present.iter().enumerate() {
        let mut depth = 0u8;
        let mut n = slot as u16;
        while parent[n as usize] != u16::MAX {
            n = parent[n as usize];
            depth += 1;
        }
        lengths[sym] = depth;
    }
    lengths
}

/// Payload size in bits of encoding `freqs` with the given code lengths.
pub fn payload_bits(freqs: &[u64; ALPHABET], lengths: &[u8; ALPHABET]) -> u64 {
    freqs
        .iter()
        .zip(lengths.iter())
        .map(|(&f, &l)| f * l as u64)
        .sum()
}

/// Canonical code table: lengths plus the codewords they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct HuffmanTable {
    pub lengths: [u8; ALPHABET],
    codes: [u64; ALPHABET],
}

impl HuffmanTable {
    /// Assign canonical codewords from a length table: symbols sorted by
    /// (length, symbol value) receive consecutive codes.
    pub fn from_lengths(lengths: [u8; ALPHABET]) -> Result<HuffmanTable> {
        let max_len = lengths.iter().copied().max().unwrap_or(0);
        if max_len > 63 {
            return Err(Error::Numerical(format!(
                "huffman code length {max_len} exceeds the 63-bit codeword limit"
            )));
        }
        let mut order: Vec<usize> = (0..ALPHABET).filter(|&i| lengths[i] > 0).collect();
        order.sort_by_key(|&i| (lengths[i], i));
        let mut codes = [0u64; ALPHABET];
        let mut code = 0u64;
        let mut prev_len = 0u8;
        for &sym in &order {
            code <<= lengths[sym] - prev_len;
            codes[sym] = code;
            code += 1;
            prev_len = lengths[sym];
        }
        let table = HuffmanTable { lengths, codes };
        if table.kraft_sum() > 1.0 + 1e-12 {
            return Err(Error::Numerical(
                "length table violates the Kraft inequality".into(),
            ));
        }
        Ok(table)
    }

    pub fn code(&self, s: i8) -> Option<(u64, u8)> {
        let i = symbol_index(s);
        if self.lengths[i] == 0 {
            None
        } else {
            Some((self.codes[i], self.lengths[i]))
        }
    }

    pub fn kraft_sum(&self) -> f64 {
        self.lengths
            .iter()
            .filter(|&&l| l > 0)
            .map(|&l| (0.5f64).powi(l as i32))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.iter().all(|&l| l == 0)
    }
}

/// MSB-first bit buffer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BitStream {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(bytes: Vec<u8>, bit_len: u64) -> Result<Self> {
        if bytes.len() as u64 != bit_len.div_ceil(8) {
            return Err(Error::Format(format!(
                "bitstream of {bit_len} bits needs {} bytes, got {}",
                bit_len.div_ceil(8),
                bytes.len()
            )));
        }
        Ok(BitStream { bytes, bit_len })
    }

    pub fn push_code(&mut self, code: u64, len: u8) {
        for shift in (0..len).rev() {
            let bit = ((code >> shift) & 1) as u8;
            let pos = (self.bit_len % 8) as u8;
            if pos == 0 {
                self.bytes.push(0);
            }
            if bit == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> pos;
            }
            self.bit_len += 1;
        }
    }

    #[inline]
    pub fn bit(&self, i: u64) -> u8 {
        (self.bytes[(i / 8) as usize] >> (7 - (i % 8))) & 1
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

/// Encode a symbol stream. Empty input yields an empty table and a 0-bit
/// stream.
pub fn encode(symbols: &[i8]) -> Result<(HuffmanTable, BitStream)> {
    let freqs = count_frequencies(symbols);
    let table = HuffmanTable::from_lengths(code_lengths(&freqs))?;
    let mut stream = BitStream::new();
    for &s in symbols {
        let (code, len) = table
            .code(s)
            .expect("every input symbol has a code by construction");
        stream.push_code(code, len);
    }
    Ok((table, stream))
}

/// Decode `count` symbols from a canonical table.
pub fn decode(table: &HuffmanTable, stream: &BitStream, count: usize) -> Result<Vec<i8>> {
    // canonical decode bookkeeping per length
    let max_len = table.lengths.iter().copied().max().unwrap_or(0) as usize;
    if count > 0 && max_len == 0 {
        return Err(Error::Format("cannot decode against an empty table".into()));
    }
    let mut sorted: Vec<usize> = (0..ALPHABET).filter(|&i| table.lengths[i] > 0).collect();
    sorted.sort_by_key(|&i| (table.lengths[i], i));
    let mut first_code = vec![0u64; max_len + 1];
    let mut first_index = vec![0usize; max_len + 1];
    let mut count_at = vec![0usize; max_len + 1];
    for (pos, &sym) in sorted.iter().enumerate() {
        let l = table.lengths[sym] as usize;
        if count_at[l] == 0 {
            first_index[l] = pos;
            first_code[l] = table.codes[sym];
        }
        count_at[l] += 1;
    }

    let mut out = Vec::with_capacity(count);
    let mut cursor = 0u64;
    for _ in 0..count {
        let mut code = 0u64;
        let mut len = 0usize;
        loop {
            if cursor >= stream.bit_len() {
                return Err(Error::Format("bitstream ended mid-codeword".into()));
            }
            code = (code << 1) | stream.bit(cursor) as u64;
            cursor += 1;
            len += 1;
            if len > max_len {
                return Err(Error::Format("invalid codeword in bitstream".into()));
            }
            if count_at[len] > 0 {
                let offset = code.wrapping_sub(first_code[len]);
                if code >= first_code[len] && (offset as usize) < count_at[len] {
                    out.push(index_symbol(sorted[first_index[len] + offset as usize]));
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Empirical entropy in bits/symbol of a frequency table.
pub fn empirical_entropy(freqs: &[u64; ALPHABET]) -> f64 {
    let total: u64 = freqs.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    freqs
        .iter()
        .filter(|&&f| f > 0)
        .map(|&f| {
            let p = f as f64 / n;
            -p * p.log2()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn empty_stream_is_zero_bits_empty_table() {
        let (table, stream) = encode(&[]).unwrap();
        assert!(table.is_empty());
        assert_eq!(stream.bit_len(), 0);
        assert_eq!(decode(&table, &stream, 0).unwrap(), Vec::<i8>::new());
    }

    #[test]
    fn single_symbol_gets_one_bit() {
        let symbols = vec![42i8; 177];
        let (table, stream) = encode(&symbols).unwrap();
        assert_eq!(table.code(42), Some((0, 1)));
        assert_eq!(stream.bit_len(), 177);
        assert_eq!(decode(&table, &stream, 177).unwrap(), symbols);
    }

    #[test]
    fn hand_built_lengths_for_skewed_frequencies() {
        // {a:2, b:1, c:1} -> lengths {a:1, b:2, c:2}, payload 6 bits
        let symbols = [3i8, 3, 5, 9];
        let freqs = count_frequencies(&symbols);
        let lengths = code_lengths(&freqs);
        assert_eq!(lengths[symbol_index(3)], 1);
        assert_eq!(lengths[symbol_index(5)], 2);
        assert_eq!(lengths[symbol_index(9)], 2);
        assert_eq!(payload_bits(&freqs, &lengths), 6);
    }

    #[test]
    fn heap_ties_break_toward_smaller_symbol() {
        // four equal-frequency symbols: all lengths 2, canonical codes in
        // symbol order
        let symbols = [1i8, 2, 3, 4];
        let (table, _) = encode(&symbols).unwrap();
        for s in 1..=4i8 {
            assert_eq!(table.code(s).unwrap().1, 2);
        }
        assert_eq!(table.code(1).unwrap().0, 0b00);
        assert_eq!(table.code(2).unwrap().0, 0b01);
        assert_eq!(table.code(3).unwrap().0, 0b10);
        assert_eq!(table.code(4).unwrap().0, 0b11);
    }

    #[test]
    fn codes_are_prefix_free_and_kraft_bounded() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(1..4000usize);
            let spread = rng.gen_range(1..=255u8) as i32;
            let symbols: Vec<i8> = (0..n)
                .map(|_| (rng.gen_range(-spread..=spread).clamp(-128, 127)) as i8)
                .collect();
            let (table, _) = encode(&symbols).unwrap();
            assert!(table.kraft_sum() <= 1.0 + 1e-12);
            let coded: Vec<(u64, u8)> = (0..ALPHABET)
                .filter_map(|i| table.code(index_symbol(i)))
                .collect();
            for (i, &(ca, la)) in coded.iter().enumerate() {
                for &(cb, lb) in coded.iter().skip(i + 1) {
                    let l = la.min(lb);
                    assert_ne!(ca >> (la - l), cb >> (lb - l), "prefix violation");
                }
            }
        }
    }

    #[test]
    fn round_trip_random_streams() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(0..2000usize);
            let symbols: Vec<i8> = (0..n).map(|_| rng.gen::<i8>()).collect();
            let (table, stream) = encode(&symbols).unwrap();
            assert_eq!(decode(&table, &stream, n).unwrap(), symbols);
        }
    }

    #[test]
    fn payload_between_entropy_and_fixed_code() {
        let mut rng = ChaCha20Rng::seed_from_u64(29);
        for _ in 0..50 {
            let n = rng.gen_range(1..5000usize);
            // biased stream so entropy is well below 8 bits
            let symbols: Vec<i8> = (0..n)
                .map(|_| if rng.gen_bool(0.7) { 0 } else { rng.gen::<i8>() })
                .collect();
            let freqs = count_frequencies(&symbols);
            let lengths = code_lengths(&freqs);
            let payload = payload_bits(&freqs, &lengths) as f64;
            let h = empirical_entropy(&freqs);
            assert!(payload <= 8.0 * n as f64 + 1e-9);
            assert!(payload >= n as f64 * h - n as f64 - 1e-9);
        }
    }

    #[test]
    fn removing_symbols_never_increases_payload() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for _ in 0..30 {
            let n = rng.gen_range(2..3000usize);
            let symbols: Vec<i8> = (0..n).map(|_| rng.gen_range(-5..=5i8)).collect();
            let cut = rng.gen_range(1..n);
            let full_freqs = count_frequencies(&symbols);
            let sub_freqs = count_frequencies(&symbols[..cut]);
            let full = payload_bits(&full_freqs, &code_lengths(&full_freqs));
            let sub = payload_bits(&sub_freqs, &code_lengths(&sub_freqs));
            assert!(sub <= full, "sub-stream payload {sub} > full payload {full}");
        }
    }

    #[test]
    fn decode_rejects_truncated_stream() {
        let symbols = [1i8, 2, 3, 4, 5, 5, 5];
        let (table, stream) = encode(&symbols).unwrap();
        assert!(decode(&table, &stream, symbols.len() + 1).is_err());
    }
}
