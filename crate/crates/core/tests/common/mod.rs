#![allow(dead_code)]

use compcorr::Composition;
use rand::Rng;

pub fn random_values(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()
}

/// Uniform choice of each successive part among the lengths that leave a
/// composable remainder.
pub fn random_composition(rng: &mut impl Rng, n: usize, m: usize) -> Composition {
    let mut parts = Vec::new();
    let mut rem = n;
    while rem > 0 {
        let mut options: Vec<usize> = (m..=rem.saturating_sub(m)).collect();
        options.push(rem);
        let p = options[rng.gen_range(0..options.len())];
        parts.push(p);
        rem -= p;
    }
    Composition::new(parts).unwrap()
}

// Compositional correlation written out directly: part means, then deviations.
pub fn naive_comp_corr(a: &[f64], b: &[f64], c: &Composition) -> Option<f64> {
    let (mut num, mut da2, mut db2) = (0.0, 0.0, 0.0);
    let mut start = 0;
    for &len in c.parts() {
        let pa = &a[start..start + len];
        let pb = &b[start..start + len];
        let ma = pa.iter().sum::<f64>() / len as f64;
        let mb = pb.iter().sum::<f64>() / len as f64;
        for (x, y) in pa.iter().zip(pb) {
            num += (x - ma) * (y - mb);
            da2 += (x - ma) * (x - ma);
            db2 += (y - mb) * (y - mb);
        }
        start += len;
    }
    if da2 == 0.0 || db2 == 0.0 {
        None
    } else {
        Some(num / (da2 * db2).sqrt())
    }
}

pub fn textbook_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|y| y * y).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}
