//! Philox4x32-10, a counter-based generator: output block `n` is a keyed
//! bijection of the counter `n`, so any sample can be drawn without
//! touching the others.

use rand::RngCore;

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

/// Name recorded in run metadata.
pub const ALGORITHM: &str = "philox4x32-10";

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// The raw block function.
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(W0);
            key[1] = key[1].wrapping_add(W1);
        }
        let (hi0, lo0) = mulhilo(M0, ctr[0]);
        let (hi1, lo1) = mulhilo(M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// The stream of random words belonging to one sample index under one seed.
///
/// Counter words 2 and 3 hold the sample index, word 0 the block number
/// within the sample; the seed is the key.
#[derive(Debug, Clone)]
pub struct SampleRng {
    key: [u32; 2],
    index: [u32; 2],
    block: u32,
    buf: [u32; 4],
    pos: usize,
}

impl SampleRng {
    pub fn new(seed: u64, sample: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
            index: [sample as u32, (sample >> 32) as u32],
            block: 0,
            buf: [0; 4],
            pos: 4,
        }
    }

    fn refill(&mut self) {
        self.buf = philox4x32_10([self.block, 0, self.index[0], self.index[1]], self.key);
        self.block = self.block.wrapping_add(1);
        self.pos = 0;
    }
}

impl RngCore for SampleRng {
    fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        (hi << 32) | lo
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(4) {
            let bytes = self.next_u32().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
