use super::enclosure::{Verdict, DEFAULT_BITS, MAX_BITS};
use crate::error::Result;

/// Environment variable overriding the starting precision.
pub const PRECISION_ENV: &str = "BERTINI_PRECISION_BITS";

/// Starting precision: `BERTINI_PRECISION_BITS` when set and valid, else 64.
pub fn default_bits() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .map(|b| b.clamp(16, MAX_BITS))
        .unwrap_or(DEFAULT_BITS)
}

/// Run `check` at `start` bits, doubling while the answer is inconclusive
/// and the precision stays within `cap`. Returns the final verdict and the
/// precision it was reached at.
pub fn certify_adaptive<F>(start: u32, cap: u32, mut check: F) -> Result<(Verdict, u32)>
where
    F: FnMut(u32) -> Result<Verdict>,
{
    let mut bits = start.max(16);
    loop {
        let v = check(bits)?;
        if v != Verdict::Inconclusive || bits >= cap {
            return Ok((v, bits));
        }
        bits = (bits * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_stops_at_cap() {
        let mut seen = Vec::new();
        let (v, b) = certify_adaptive(64, 512, |bits| {
            seen.push(bits);
            Ok(Verdict::Inconclusive)
        })
        .unwrap();
        assert_eq!(v, Verdict::Inconclusive);
        assert_eq!(b, 512);
        assert_eq!(seen, vec![64, 128, 256, 512]);
        let (v, b) = certify_adaptive(64, 4096, |bits| Ok(if bits >= 256 { Verdict::Holds } else { Verdict::Inconclusive })).unwrap();
        assert_eq!((v, b), (Verdict::Holds, 256));
    }
}
