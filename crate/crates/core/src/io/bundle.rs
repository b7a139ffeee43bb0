// LDCT container: fixed header, three difference planes as raw bytes, three
// carrier planes as little-endian doubles, then a CRC-32 over everything
// before it.

use std::fs;
use std::path::Path;

use crate::cipher::{CarrierPlane, CipherBundle, ROUNDS};
use crate::grid::{Matrix, Plane};
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"LDCT";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 4 + 4 + 1 + 1 + 2 * ROUNDS + 3 * ROUNDS;
const CRC_LEN: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleHeader {
    pub version: u16,
    pub width: u32,
    pub height: u32,
    pub rounds: u8,
    pub flags: u8,
    pub shifts: [u16; ROUNDS],
    pub rotations: [[u8; 3]; ROUNDS],
}

impl BundleHeader {
    fn of(b: &CipherBundle) -> Result<Self> {
        let side = u32::try_from(b.size)
            .map_err(|_| Error::InvalidParams(format!("image side {} too large", b.size)))?;
        Ok(Self {
            version: VERSION,
            width: side,
            height: side,
            rounds: ROUNDS as u8,
            flags: 0,
            shifts: b.shifts,
            rotations: b.rotations,
        })
    }

    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.push(self.rounds);
        out.push(self.flags);
        for s in self.shifts {
            out.extend_from_slice(&s.to_le_bytes());
        }
        for r in self.rotations {
            out.extend_from_slice(&r);
        }
    }

    /// Parses and validates the first `HEADER_LEN` bytes.
    pub fn parse(buf: &[u8]) -> Result<Self> {
        let bad = |msg: String| Error::MalformedBundle(msg);
        if buf.len() < HEADER_LEN {
            return Err(bad(format!(
                "{} bytes is shorter than the header",
                buf.len()
            )));
        }
        if buf[..4] != MAGIC {
            return Err(bad("bad magic".into()));
        }
        let u16_at = |i: usize| u16::from_le_bytes([buf[i], buf[i + 1]]);
        let u32_at = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().expect("4 bytes"));
        let h = Self {
            version: u16_at(4),
            width: u32_at(6),
            height: u32_at(10),
            rounds: buf[14],
            flags: buf[15],
            shifts: std::array::from_fn(|k| u16_at(16 + 2 * k)),
            rotations: std::array::from_fn(|k| {
                let at = 16 + 2 * ROUNDS + 3 * k;
                [buf[at], buf[at + 1], buf[at + 2]]
            }),
        };
        if h.version != VERSION {
            return Err(bad(format!("unsupported version {}", h.version)));
        }
        if usize::from(h.rounds) != ROUNDS {
            return Err(bad(format!("{} rounds, expected {ROUNDS}", h.rounds)));
        }
        if h.flags != 0 {
            return Err(bad(format!("unknown flags {:#04x}", h.flags)));
        }
        if h.width != h.height {
            return Err(bad(format!("non-square {}x{}", h.width, h.height)));
        }
        if let Some(r) = h.rotations.iter().flatten().find(|&&r| r >= 48) {
            return Err(bad(format!("rotation {r} out of range")));
        }
        Ok(h)
    }
}

/// Total container size for an `n x n` image.
pub fn bundle_len(n: usize) -> usize {
    HEADER_LEN + 3 * n * n + 3 * n * n * 8 + CRC_LEN
}

pub fn bundle_to_bytes(b: &CipherBundle) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(bundle_len(b.size));
    BundleHeader::of(b)?.write(&mut out);
    for p in &b.difference {
        out.extend_from_slice(p.as_slice());
    }
    for c in &b.carriers {
        for v in c.matrix().as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn bundle_from_bytes(buf: &[u8]) -> Result<CipherBundle> {
    let h = BundleHeader::parse(buf)?;
    let n =
        usize::try_from(h.width).map_err(|_| Error::MalformedBundle("side too large".into()))?;
    let expected = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_mul(27))
        .and_then(|p| p.checked_add(HEADER_LEN + CRC_LEN))
        .ok_or_else(|| Error::MalformedBundle("side too large".into()))?;
    if buf.len() != expected {
        return Err(Error::MalformedBundle(format!(
            "{} bytes, header implies {expected}",
            buf.len()
        )));
    }
    let (body, trailer) = buf.split_at(buf.len() - CRC_LEN);
    let stored = u32::from_le_bytes(trailer.try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let nn = n * n;
    let mut at = HEADER_LEN;
    let mut difference = Vec::with_capacity(3);
    for _ in 0..3 {
        difference.push(Plane::from_vec(n, n, body[at..at + nn].to_vec())?);
        at += nn;
    }
    let mut carriers = Vec::with_capacity(3);
    for _ in 0..3 {
        let vals = body[at..at + 8 * nn]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        carriers.push(CarrierPlane::new(Matrix::from_vec(n, n, vals)?)?);
        at += 8 * nn;
    }
    Ok(CipherBundle {
        size: n,
        shifts: h.shifts,
        rotations: h.rotations,
        difference: difference.try_into().expect("three planes"),
        carriers: carriers.try_into().expect("three planes"),
    })
}

pub fn write_bundle(path: impl AsRef<Path>, b: &CipherBundle) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bundle_to_bytes(b)?).map_err(Error::file(path))?;
    Ok(())
}

pub fn read_bundle(path: impl AsRef<Path>) -> Result<CipherBundle> {
    let path = path.as_ref();
    bundle_from_bytes(&fs::read(path).map_err(Error::file(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> CipherBundle {
        let plane = |k: usize| Plane::from_fn(n, n, |r, c| (r * 31 + c * 7 + k) as u8);
        let carrier = |k: usize| {
            let m = Matrix::from_fn(n, n, |r, c| {
                (r * n + c + k) as f64 * 1.5 - 0.1 / (k + 1) as f64
            });
            CarrierPlane::new(m).unwrap()
        };
        CipherBundle {
            size: n,
            shifts: [3, 7, 13],
            rotations: [[5, 11, 17], [1, 2, 3], [47, 0, 9]],
            difference: [plane(0), plane(1), plane(2)],
            carriers: [carrier(0), carrier(1), carrier(2)],
        }
    }

    #[test]
    fn header_is_31_bytes() {
        assert_eq!(HEADER_LEN, 31);
        assert_eq!(bundle_len(2), 31 + 12 + 96 + 4);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let b = sample(5);
        let bytes = bundle_to_bytes(&b).unwrap();
        assert_eq!(bytes.len(), bundle_len(5));
        let back = bundle_from_bytes(&bytes).unwrap();
        assert_eq!(back, b);
        for (x, y) in back.carriers.iter().zip(&b.carriers) {
            for (p, q) in x.matrix().as_slice().iter().zip(y.matrix().as_slice()) {
                assert_eq!(p.to_bits(), q.to_bits());
            }
        }
    }

    #[test]
    fn header_layout() {
        let bytes = bundle_to_bytes(&sample(2)).unwrap();
        assert_eq!(&bytes[..4], b"LDCT");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..10], &[2, 0, 0, 0]);
        assert_eq!(&bytes[10..14], &[2, 0, 0, 0]);
        assert_eq!(&bytes[14..16], &[3, 0]);
        assert_eq!(&bytes[16..22], &[3, 0, 7, 0, 13, 0]);
        assert_eq!(&bytes[22..31], &[5, 11, 17, 1, 2, 3, 47, 0, 9]);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = bundle_to_bytes(&sample(4)).unwrap();
        for at in [HEADER_LEN, HEADER_LEN + 50, bytes.len() - 5] {
            let mut bad = bytes.clone();
            bad[at] ^= 0x01;
            assert!(
                matches!(bundle_from_bytes(&bad), Err(Error::Checksum { .. })),
                "byte {at}"
            );
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            bundle_from_bytes(&bad),
            Err(Error::MalformedBundle(_))
        ));
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(
            bundle_from_bytes(&bad),
            Err(Error::MalformedBundle(_))
        ));
        assert!(matches!(
            bundle_from_bytes(&bytes[..bytes.len() - 1]),
            Err(Error::MalformedBundle(_))
        ));
    }
}
