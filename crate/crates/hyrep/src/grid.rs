//! Sweep grids given on the command line as `start:stop:step` or `a,b,c`.

use std::str::FromStr;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        if s.contains(':') {
            let parts: Vec<f64> = s.split(':').map(num).collect::<Result<_, _>>()?;
            let [start, stop, step] = parts[..] else {
                return Err(format!("range {s:?} must be start:stop:step"));
            };
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(format!("range {s:?} is empty or has a non-positive step"));
            }
            // indexed so the points do not accumulate rounding
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("range {s:?} has {count} points"));
            }
            Ok(Grid((0..count).map(|i| start + i as f64 * step).collect()))
        } else {
            let v: Vec<f64> = s.split(',').map(num).collect::<Result<_, _>>()?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(format!("non-finite value in {s:?}"));
            }
            Ok(Grid(v))
        }
    }
}
