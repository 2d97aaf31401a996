//! Named (stride, sigma) presets for the benchmark datasets.

use std::fmt;
use std::str::FromStr;

use gcff_core::Params;

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    Synthetic,
    IdiapPoster,
    CocktailParty,
    CoffeeBreak,
    Gdet,
}

impl Profile {
    pub const ALL: [Profile; 5] = [
        Profile::Synthetic,
        Profile::IdiapPoster,
        Profile::CocktailParty,
        Profile::CoffeeBreak,
        Profile::Gdet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Synthetic => "synthetic",
            Profile::IdiapPoster => "idiap_poster",
            Profile::CocktailParty => "cocktail_party",
            Profile::CoffeeBreak => "coffee_break",
            Profile::Gdet => "gdet",
        }
    }

    /// `(stride_d, sigma)` in the dataset's ground-plane units.
    pub fn values(self) -> (f64, f64) {
        match self {
            Profile::Synthetic => (30.0, 80.0),
            Profile::IdiapPoster => (20.0, 45.0),
            Profile::CocktailParty => (70.0, 170.0),
            Profile::CoffeeBreak => (30.0, 85.0),
            Profile::Gdet => (30.0, 200.0),
        }
    }

    pub fn params(self) -> Params {
        let (d, sigma) = self.values();
        Params::new(d, sigma)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Profile::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Profile::ALL.iter().map(|p| p.name()).collect();
            Error::InvalidInput(format!("unknown profile `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let got: Vec<(&str, f64, f64)> = Profile::ALL
            .iter()
            .map(|p| (p.name(), p.values().0, p.values().1))
            .collect();
        assert_eq!(
            got,
            [
                ("synthetic", 30.0, 80.0),
                ("idiap_poster", 20.0, 45.0),
                ("cocktail_party", 70.0, 170.0),
                ("coffee_break", 30.0, 85.0),
                ("gdet", 30.0, 200.0),
            ]
        );
    }

    #[test]
    fn names_round_trip_and_params_are_valid() {
        for p in Profile::ALL {
            assert_eq!(p.name().parse::<Profile>().unwrap(), p);
            let params = p.params();
            params.validate().unwrap();
            assert_eq!(params.mdl_weight, params.sigma * params.sigma);
        }
        assert!("poster".parse::<Profile>().is_err());
    }
}
