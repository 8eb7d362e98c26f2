//! Parsing of `-u` arguments into a target unitary.

use std::str::FromStr;

use mcu_forge_core::Unitary2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How the target unitary was named on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySpec {
    X,
    H,
    Z,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// Row-major `[re, im]` pairs, bare or under a `"matrix"` key.
    Literal([[f64; 2]; 4]),
    /// Haar-random SU(2) element from a ChaCha8 stream seeded with this value.
    Random(u64),
}

impl UnitarySpec {
    pub fn resolve(&self) -> Result<Unitary2, String> {
        let u = match *self {
            UnitarySpec::X => Ok(Unitary2::x()),
            UnitarySpec::H => Ok(Unitary2::h()),
            UnitarySpec::Z => Ok(Unitary2::z()),
            UnitarySpec::Rx(t) => Unitary2::rx(t),
            UnitarySpec::Ry(t) => Unitary2::ry(t),
            UnitarySpec::Rz(t) => Unitary2::rz(t),
            UnitarySpec::Literal(pairs) => Unitary2::from_pairs(pairs),
            UnitarySpec::Random(seed) => {
                Ok(Unitary2::haar_su2(&mut ChaCha8Rng::seed_from_u64(seed)))
            }
        };
        u.map_err(|e| e.to_string())
    }
}

fn parse_angle(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let (scale, rest) = match text.strip_suffix("pi") {
        Some(r) => (std::f64::consts::PI, r.trim_end_matches('*')),
        None => (1.0, text),
    };
    let value = match rest {
        "" => 1.0,
        "-" => -1.0,
        r => r
            .parse::<f64>()
            .map_err(|e| format!("bad angle {text:?}: {e}"))?,
    };
    Ok(value * scale)
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum LiteralJson {
    Wrapped { matrix: [[f64; 2]; 4] },
    Bare([[f64; 2]; 4]),
}

impl FromStr for UnitarySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('{') || s.starts_with('[') {
            let lit: LiteralJson =
                serde_json::from_str(s).map_err(|e| format!("bad matrix literal: {e}"))?;
            let pairs = match lit {
                LiteralJson::Wrapped { matrix } | LiteralJson::Bare(matrix) => matrix,
            };
            return Ok(UnitarySpec::Literal(pairs));
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.to_ascii_lowercase(), Some(a)),
            None => (s.to_ascii_lowercase(), None),
        };
        let need = |arg: Option<&'_ str>| -> Result<String, String> {
            arg.map(str::to_owned)
                .ok_or_else(|| format!("{name} needs an argument, e.g. {name}:0.5"))
        };
        match name.as_str() {
            "x" => Ok(UnitarySpec::X),
            "h" => Ok(UnitarySpec::H),
            "z" => Ok(UnitarySpec::Z),
            "rx" => Ok(UnitarySpec::Rx(parse_angle(&need(arg)?)?)),
            "ry" => Ok(UnitarySpec::Ry(parse_angle(&need(arg)?)?)),
            "rz" => Ok(UnitarySpec::Rz(parse_angle(&need(arg)?)?)),
            "random" => need(arg)?
                .parse()
                .map(UnitarySpec::Random)
                .map_err(|e| format!("bad seed: {e}")),
            _ => Err(format!(
                "unknown unitary {s:?}; expected x, h, z, rx:θ, ry:θ, rz:θ, random:SEED or a JSON matrix"
            )),
        }
    }
}
