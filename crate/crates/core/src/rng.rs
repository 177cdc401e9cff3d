//! Counter-based random streams.
//!
//! Philox4x32-10 keyed by the user seed; the counter carries the stream
//! (sample or path) index, a purpose tag and a block number. Each sample
//! therefore owns an independent stream that can be generated on any thread
//! in any order, which keeps ensembles bit-identical across pool sizes.

use std::f64::consts::PI;

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// The Philox4x32 bijection with 10 rounds.
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

/// Separates streams drawn for different purposes from the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum StreamTag {
    Field = 1,
    Wiener = 2,
}

/// Standard-normal stream for one (seed, tag, index) triple.
#[derive(Debug, Clone)]
pub struct NormalStream {
    key: [u32; 2],
    tag: u32,
    index: u64,
    block: u32,
    buf: [u32; 4],
    pos: usize,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64, tag: StreamTag, index: u64) -> Self {
        NormalStream {
            key: [seed as u32, (seed >> 32) as u32],
            tag: tag as u32,
            index,
            block: 0,
            buf: [0; 4],
            pos: 4,
            spare: None,
        }
    }

    fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            let ctr = [self.block, self.tag, self.index as u32, (self.index >> 32) as u32];
            self.buf = philox4x32_10(ctr, self.key);
            self.block = self.block.wrapping_add(1);
            self.pos = 0;
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        let hi = u64::from(self.next_u32());
        let lo = u64::from(self.next_u32());
        let bits = ((hi << 32) | lo) >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Box–Muller; both variates of each pair are used.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.next_normal();
        }
    }
}
