//! Word-level helpers for dense indicator bitmaps of subsets of F_2^n.
//!
//! Point `x` lives at bit `x & 63` of word `x >> 6`. For `n < 6` a single word
//! is used and only its low `2^n` bits are meaningful.

/// Number of 64-bit words holding an indicator of F_2^n.
#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    if n < 6 {
        1
    } else {
        1usize << (n - 6)
    }
}

/// Mask of the valid bits in the (single) word when `n < 6`.
#[inline]
pub(crate) fn tail_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

const SWAP_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Permutes the bits of `w` by `i -> i ^ lo` for `lo < 64`.
#[inline]
pub(crate) fn xor_permute_word(mut w: u64, lo: u64) -> u64 {
    for (k, &m) in SWAP_MASKS.iter().enumerate() {
        if lo >> k & 1 == 1 {
            let s = 1u32 << k;
            w = ((w & m) << s) | ((w >> s) & m);
        }
    }
    w
}

/// Writes the indicator of `src + v` into `dst` (same length as `src`).
pub(crate) fn translate_into(src: &[u64], v: u64, dst: &mut [u64]) {
    let hi = (v >> 6) as usize;
    let lo = v & 63;
    for (w, &word) in src.iter().enumerate() {
        dst[w ^ hi] = xor_permute_word(word, lo);
    }
}

/// ORs the indicator of `src + v` into `acc`.
pub(crate) fn or_translate_into(src: &[u64], v: u64, acc: &mut [u64]) {
    let hi = (v >> 6) as usize;
    let lo = v & 63;
    for (w, &word) in src.iter().enumerate() {
        if word != 0 {
            acc[w ^ hi] |= xor_permute_word(word, lo);
        }
    }
}

/// In-place unnormalized Walsh–Hadamard transform. `data.len()` must be a power of two.
pub(crate) fn fwht(data: &mut [i64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Expands a dense bitmap into a 0/1 vector of length `2^n`.
pub(crate) fn indicator(words: &[u64], n: usize) -> Vec<i64> {
    let size = 1usize << n;
    let mut out = vec![0i64; size];
    for (x, slot) in out.iter_mut().enumerate() {
        *slot = (words[x >> 6] >> (x & 63) & 1) as i64;
    }
    out
}

/// XOR-convolution `(f * g)(x) = #{(a, b) : a ^ b = x}` of two indicator bitmaps.
pub(crate) fn xor_convolution(a: &[u64], b: &[u64], n: usize) -> Vec<i64> {
    let mut fa = indicator(a, n);
    fwht(&mut fa);
    if std::ptr::eq(a, b) {
        for v in fa.iter_mut() {
            *v *= *v;
        }
    } else {
        let mut fb = indicator(b, n);
        fwht(&mut fb);
        for (x, y) in fa.iter_mut().zip(fb) {
            *x *= y;
        }
    }
    fwht(&mut fa);
    for v in fa.iter_mut() {
        *v >>= n;
    }
    fa
}

/// Deposits the low bits of `y` into the set positions of `mask` (ascending).
#[inline]
pub(crate) fn deposit(y: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    let mut bit = 1u64;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if y & bit != 0 {
            out |= low;
        }
        mask ^= low;
        bit <<= 1;
    }
    out
}

/// Gathers the bits of `x` at the set positions of `mask` into the low bits.
#[inline]
pub(crate) fn extract(x: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    let mut bit = 1u64;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if x & low != 0 {
            out |= bit;
        }
        mask ^= low;
        bit <<= 1;
    }
    out
}

/// Mask with the low `n` bits set (`n <= 64`).
#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permute_word_matches_index_xor() {
        let w = 0x0123_4567_89AB_CDEFu64;
        for lo in 0..64u64 {
            let p = xor_permute_word(w, lo);
            for i in 0..64u64 {
                assert_eq!(p >> (i ^ lo) & 1, w >> i & 1);
            }
        }
    }

    #[test]
    fn fwht_is_an_involution_up_to_scale() {
        let orig: Vec<i64> = (0..16).map(|i| (i * 7 % 5) as i64 - 2).collect();
        let mut v = orig.clone();
        fwht(&mut v);
        fwht(&mut v);
        let back: Vec<i64> = v.iter().map(|x| x / 16).collect();
        assert_eq!(back, orig);
    }

    #[test]
    fn deposit_extract_roundtrip() {
        let mask = 0b1011_0100u64;
        for y in 0..16 {
            let d = deposit(y, mask);
            assert_eq!(d & !mask, 0);
            assert_eq!(extract(d, mask), y);
        }
    }

    #[test]
    fn masked_decrement_is_deposited_predecessor() {
        let mask = 0b1101_0010u64;
        for y in 1..16u64 {
            let d = deposit(y, mask);
            assert_eq!(d.wrapping_sub(1) & mask, deposit(y - 1, mask));
        }
    }
}
