use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Point;
use crate::sampler::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipResult {
    pub dip: f64,
    pub p_value: f64,
}

/// Hartigan's dip statistic of a sample (sorted internally).
pub fn dip_statistic(sample: &[f64]) -> f64 {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    dip_sorted(&x)
}

/// Dip of an ascending sample, with the minimum dip taken as 0.
///
/// Greatest convex minorant / least concave majorant cycling; arrays are
/// 1-based internally to keep the index arithmetic readable.
pub fn dip_sorted(sorted: &[f64]) -> f64 {
    DipWorkspace::default().dip(sorted)
}

/// Reusable index buffers for repeated dip computations.
#[derive(Debug, Default)]
pub(crate) struct DipWorkspace {
    mn: Vec<usize>,
    mj: Vec<usize>,
    gcm: Vec<usize>,
    lcm: Vec<usize>,
}

impl DipWorkspace {
    pub(crate) fn dip(&mut self, sorted: &[f64]) -> f64 {
        let n = sorted.len();
        if n < 2 || sorted[n - 1] == sorted[0] {
            return 0.0;
        }
        let x = |i: usize| sorted[i - 1];
        for v in [&mut self.mn, &mut self.mj, &mut self.gcm, &mut self.lcm] {
            v.resize(n + 2, 0);
        }
        let DipWorkspace { mn, mj, gcm, lcm } = self;

        mn[1] = 1;
        for j in 2..=n {
            mn[j] = j - 1;
            loop {
                let mnj = mn[j];
                let mnmnj = mn[mnj];
                if mnj == 1
                    || (x(j) - x(mnj)) * ((mnj - mnmnj) as f64)
                        < (x(mnj) - x(mnmnj)) * ((j - mnj) as f64)
                {
                    break;
                }
                mn[j] = mnmnj;
            }
        }
        mj[n] = n;
        for k in (1..n).rev() {
            mj[k] = k + 1;
            loop {
                let mjk = mj[k];
                let mjmjk = mj[mjk];
                if mjk == n
                    || (x(k) - x(mjk)) * (mjk as f64 - mjmjk as f64)
                        < (x(mjk) - x(mjmjk)) * (k as f64 - mjk as f64)
                {
                    break;
                }
                mj[k] = mjmjk;
            }
        }

        let mut low = 1usize;
        let mut high = n;
        let mut dip = 0.0f64;
        while low < high {
            gcm[1] = high;
            let mut i = 1;
            while gcm[i] > low {
                gcm[i + 1] = mn[gcm[i]];
                i += 1;
            }
            let l_gcm = i;
            let mut ig = l_gcm;
            let mut ix = ig - 1;

            lcm[1] = low;
            let mut i = 1;
            while lcm[i] < high {
                lcm[i + 1] = mj[lcm[i]];
                i += 1;
            }
            let l_lcm = i;
            let mut ih = l_lcm;
            let mut iv = 2;

            let mut d = 0.0f64;
            if l_gcm != 2 || l_lcm != 2 {
                loop {
                    let gcmix = gcm[ix];
                    let lcmiv = lcm[iv];
                    if gcmix > lcmiv {
                        let gcmi1 = gcm[ix + 1];
                        let dx = (lcmiv as f64 - gcmi1 as f64 + 1.0)
                            - (x(lcmiv) - x(gcmi1)) * (gcmix - gcmi1) as f64
                                / (x(gcmix) - x(gcmi1));
                        iv += 1;
                        if dx >= d {
                            d = dx;
                            ig = ix + 1;
                            ih = iv - 1;
                        }
                    } else {
                        let lcmiv1 = lcm[iv - 1];
                        let dx = (x(gcmix) - x(lcmiv1)) * (lcmiv - lcmiv1) as f64
                            / (x(lcmiv) - x(lcmiv1))
                            - (gcmix as f64 - lcmiv1 as f64 - 1.0);
                        ix -= 1;
                        if dx >= d {
                            d = dx;
                            ig = ix + 1;
                            ih = iv;
                        }
                    }
                    if ix < 1 {
                        ix = 1;
                    }
                    if iv > l_lcm {
                        iv = l_lcm;
                    }
                    if gcm[ix] == lcm[iv] {
                        break;
                    }
                }
            }
            if d < dip {
                break;
            }

            let mut dip_l = 0.0f64;
            for j in ig..l_gcm {
                let mut max_t = 1.0f64;
                let (jb, je) = (gcm[j + 1], gcm[j]);
                if je - jb > 1 && x(je) != x(jb) {
                    let c = (je - jb) as f64 / (x(je) - x(jb));
                    for jj in jb..=je {
                        let t = (jj - jb + 1) as f64 - (x(jj) - x(jb)) * c;
                        max_t = max_t.max(t);
                    }
                }
                dip_l = dip_l.max(max_t);
            }
            let mut dip_u = 0.0f64;
            for j in ih..l_lcm {
                let mut max_t = 1.0f64;
                let (jb, je) = (lcm[j], lcm[j + 1]);
                if je - jb > 1 && x(je) != x(jb) {
                    let c = (je - jb) as f64 / (x(je) - x(jb));
                    for jj in jb..=je {
                        let t = (x(jj) - x(jb)) * c - (jj as f64 - jb as f64 - 1.0);
                        max_t = max_t.max(t);
                    }
                }
                dip_u = dip_u.max(max_t);
            }
            dip = dip.max(dip_u.max(dip_l));

            if low == gcm[ig] && high == lcm[ih] {
                break;
            }
            low = gcm[ig];
            high = lcm[ih];
        }
        dip / (2 * n) as f64
    }
}

/// Ascending sample of `n` uniforms from normalised exponential spacings.
fn sorted_uniforms(n: usize, seed: u64, buf: &mut Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    buf.clear();
    let mut acc = 0.0;
    for _ in 0..n {
        let e: f64 = Exp1.sample(&mut rng);
        acc += e;
        buf.push(acc);
    }
    let e: f64 = Exp1.sample(&mut rng);
    let total = acc + e;
    for v in buf.iter_mut() {
        *v /= total;
    }
}

/// Bootstrap p-value: the share of `bootstrap_n` uniform samples of size `n`
/// whose dip is at least `dip`.
pub fn dip_bootstrap_pvalue(dip: f64, n: usize, bootstrap_n: usize, seed: u64) -> f64 {
    if bootstrap_n == 0 {
        return f64::NAN;
    }
    let hits: usize = (0..bootstrap_n as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), DipWorkspace::default()),
            |(buf, ws), b| {
                sorted_uniforms(n, derive_seed(seed, b), buf);
                usize::from(ws.dip(buf) >= dip)
            },
        )
        .sum();
    hits as f64 / bootstrap_n as f64
}

/// Pairwise distances of all ordered point pairs, diagonal included, row-major.
pub fn pairwise_distance_sample(coords: &[Point]) -> Vec<f64> {
    let mut out = Vec::with_capacity(coords.len() * coords.len());
    for a in coords {
        for b in coords {
            out.push((a.0 - b.0).hypot(a.1 - b.1));
        }
    }
    out
}

/// Dip test on the flattened pairwise-distance sample of `coords`. A small
/// p-value indicates multimodal distances, i.e. clusterable data.
pub fn dip_clusterability(coords: &[Point], bootstrap_n: usize, seed: u64) -> Result<DipResult> {
    if coords.len() < 4 {
        return Err(Error::TooFewPoints(coords.len()));
    }
    let sample = pairwise_distance_sample(coords);
    let dip = dip_statistic(&sample);
    let p_value = dip_bootstrap_pvalue(dip, sample.len(), bootstrap_n, seed);
    Ok(DipResult { dip, p_value })
}
