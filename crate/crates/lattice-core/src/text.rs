//! Plain-text forms used by the CLI and golden files.
//!
//! Particles: `start:bits`, e.g. `0:001` is `1{x <= -1}` plus a particle at 2.
//! Interfaces: `start:height:steps` with `+`/`-` for each increment, e.g. `0:0:` is the bare cone.

use std::fmt;
use std::str::FromStr;

use crate::{Interface, LatticeError, ParticleConfig};

fn parse_err(what: &'static str, msg: impl Into<String>) -> LatticeError {
    LatticeError::Parse { what, msg: msg.into() }
}

impl fmt::Display for ParticleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.window_start())?;
        for b in self.window() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ParticleConfig {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (start, bits) = s.trim().split_once(':').ok_or_else(|| parse_err("particles", "missing ':'"))?;
        let start: i64 = start.trim().parse().map_err(|e| parse_err("particles", format!("{e}")))?;
        let bits = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(parse_err("particles", format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParticleConfig::from_window(start, &bits))
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, _) = self.bounds();
        let h = self.heights();
        write!(f, "{}:{}:", l, h[0])?;
        for w in h.windows(2) {
            f.write_str(if w[1] > w[0] { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for Interface {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().splitn(3, ':');
        let start = parts.next().unwrap_or_default();
        let height = parts.next().ok_or_else(|| parse_err("interface", "missing height"))?;
        let steps = parts.next().ok_or_else(|| parse_err("interface", "missing steps"))?;
        let start: i64 = start.trim().parse().map_err(|e| parse_err("interface", format!("{e}")))?;
        let mut h: i64 = height.trim().parse().map_err(|e| parse_err("interface", format!("{e}")))?;
        let mut heights = vec![h];
        for c in steps.chars() {
            h += match c {
                '+' => 1,
                '-' => -1,
                other => return Err(parse_err("interface", format!("unexpected character {other:?}"))),
            };
            heights.push(h);
        }
        Interface::from_heights(start, heights)
    }
}
