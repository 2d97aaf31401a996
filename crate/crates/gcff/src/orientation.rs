//! Four-way quantised head or body orientations.
//!
//! Some annotations only record whether a person faces the camera, away
//! from it, or to one side. With the ground plane's `y` axis pointing away
//! from the camera and `x` to the image right, the labels map to:
//!
//! | label   | radians |
//! |---------|---------|
//! | `right` | 0       |
//! | `back`  | π/2     |
//! | `left`  | π       |
//! | `front` | 3π/2    |

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facing {
    Right,
    Back,
    Left,
    Front,
}

impl Facing {
    /// Numeric codes `0..=3` in the order of the table above.
    pub fn from_code(code: u8) -> Result<Self, Error> {
        match code {
            0 => Ok(Facing::Right),
            1 => Ok(Facing::Back),
            2 => Ok(Facing::Left),
            3 => Ok(Facing::Front),
            _ => Err(Error::InvalidInput(format!("orientation code {code} is not in 0..=3"))),
        }
    }

    pub fn radians(self) -> f64 {
        let k = match self {
            Facing::Right => 0.0,
            Facing::Back => 1.0,
            Facing::Left => 2.0,
            Facing::Front => 3.0,
        };
        k * FRAC_PI_2
    }
}

impl FromStr for Facing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "right" => Ok(Facing::Right),
            "back" => Ok(Facing::Back),
            "left" => Ok(Facing::Left),
            "front" => Ok(Facing::Front),
            other => Err(Error::InvalidInput(format!("unknown orientation label `{other}`"))),
        }
    }
}
