use super::kmeans::relabel;
use crate::embeddings::{dot, normalized};
use crate::error::{Error, Result};

/// Average-linkage agglomerative clustering under cosine distance, merged
/// until `k` clusters remain. Returns a cluster index per vector, labelled
/// in order of first appearance.
///
/// Each merge joins the closest pair of active clusters; equal distances
/// resolve to the lexicographically smallest `(i, j)` pair of cluster slots,
/// and the merged cluster keeps slot `i`.
pub fn agglomerative_cut<V: AsRef<[f64]>>(vectors: &[V], k: usize) -> Result<Vec<usize>> {
    let n = vectors.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "agglomerative cut needs 1 <= k <= {n}, got k = {k}"
        )));
    }
    let points = vectors
        .iter()
        .map(|v| {
            normalized(v.as_ref())
                .ok_or_else(|| Error::Degenerate("zero vector in clustering input".into()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = 1.0 - dot(&points[i], &points[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut owner: Vec<usize> = (0..n).collect();
    // nearest active neighbour of each active slot, smallest index on ties
    let mut nn = vec![0usize; n];
    let nearest = |i: usize, dist: &[f64], active: &[bool]| -> usize {
        let mut best = usize::MAX;
        for j in 0..n {
            if j != i && active[j] && (best == usize::MAX || dist[i * n + j] < dist[i * n + best]) {
                best = j;
            }
        }
        best
    };
    for (i, slot) in nn.iter_mut().enumerate() {
        *slot = nearest(i, &dist, &active);
    }

    let mut clusters = n;
    while clusters > k {
        let mut pair: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            let j = nn[i];
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let d = dist[i * n + j];
            if pair.is_none_or(|(pd, pa, pb)| d < pd || (d == pd && (a, b) < (pa, pb))) {
                pair = Some((d, a, b));
            }
        }
        let (_, a, b) = pair.expect("more than k active clusters");

        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for m in 0..n {
            if active[m] && m != a && m != b {
                let d = (sa * dist[a * n + m] + sb * dist[b * n + m]) / (sa + sb);
                dist[a * n + m] = d;
                dist[m * n + a] = d;
            }
        }
        active[b] = false;
        size[a] += size[b];
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }
        clusters -= 1;
        if clusters == 1 {
            break;
        }

        nn[a] = nearest(a, &dist, &active);
        for m in 0..n {
            if !active[m] || m == a {
                continue;
            }
            if nn[m] == a || nn[m] == b {
                nn[m] = nearest(m, &dist, &active);
            } else {
                let current = dist[m * n + nn[m]];
                let to_a = dist[m * n + a];
                if to_a < current || (to_a == current && a < nn[m]) {
                    nn[m] = a;
                }
            }
        }
    }
    Ok(relabel(&owner))
}
