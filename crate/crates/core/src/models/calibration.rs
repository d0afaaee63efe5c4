//! Sigmoid score-to-probability calibration.
//!
//! Decision values are mapped by `p = sigmoid(slope·d + offset)` with the
//! two parameters fitted by damped Newton on smoothed cross-entropy targets.
//! The slope is floored at a small positive value so the map is always
//! monotone: a larger decision value never lowers the malware probability.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub slope: f64,
    pub offset: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Calibration {
    pub fn identity() -> Calibration {
        Calibration {
            slope: 1.0,
            offset: 0.0,
        }
    }

    pub fn probability(&self, decision: f64) -> f64 {
        sigmoid(self.slope * decision + self.offset)
    }

    /// Fit on training decision values with smoothed targets
    /// (`(N⁺+1)/(N⁺+2)` for positives, `1/(N⁻+2)` for negatives), which keeps
    /// the optimum finite even on separable data.
    pub fn fit(decisions: &[f64], malware: &[bool]) -> Calibration {
        assert_eq!(decisions.len(), malware.len());
        let n_pos = malware.iter().filter(|m| **m).count() as f64;
        let n_neg = malware.len() as f64 - n_pos;
        let t_pos = (n_pos + 1.0) / (n_pos + 2.0);
        let t_neg = 1.0 / (n_neg + 2.0);
        let targets: Vec<f64> = malware
            .iter()
            .map(|m| if *m { t_pos } else { t_neg })
            .collect();

        let loss = |a: f64, b: f64| -> f64 {
            decisions
                .iter()
                .zip(&targets)
                .map(|(d, t)| {
                    let p = sigmoid(a * d + b).clamp(1e-12, 1.0 - 1e-12);
                    -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
                })
                .sum()
        };

        let (mut a, mut b) = (1.0, 0.0);
        let mut current = loss(a, b);
        for _ in 0..100 {
            let (mut ga, mut gb) = (0.0, 0.0);
            let (mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0);
            for (d, t) in decisions.iter().zip(&targets) {
                let p = sigmoid(a * d + b);
                let r = p - t;
                let w = (p * (1.0 - p)).max(1e-12);
                ga += r * d;
                gb += r;
                haa += w * d * d;
                hab += w * d;
                hbb += w;
            }
            haa += 1e-9;
            hbb += 1e-9;
            let det = haa * hbb - hab * hab;
            if det.abs() < 1e-18 {
                break;
            }
            let step_a = (hbb * ga - hab * gb) / det;
            let step_b = (haa * gb - hab * ga) / det;
            // backtracking keeps the Newton step from overshooting
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let (na, nb) = (a - scale * step_a, b - scale * step_b);
                let next = loss(na, nb);
                if next <= current {
                    a = na;
                    b = nb;
                    improved = next < current - 1e-13;
                    current = next;
                    break;
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
        }
        Calibration {
            slope: a.max(1e-9),
            offset: b,
        }
    }
}
