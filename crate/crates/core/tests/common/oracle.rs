//! Naive recount oracles. Deliberately written without any of the
//! library's aggregation helpers.

use std::collections::BTreeSet;

use cocteau_core::domain::Mood;

pub struct LikertOracle {
    pub counts: [u64; 5],
    pub n: u64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

/// Sort, then read counts, mean and median off the sorted list.
pub fn likert(levels: &[u8]) -> LikertOracle {
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    let mut counts = [0u64; 5];
    for level in 1..=5u8 {
        counts[level as usize - 1] = sorted.iter().filter(|&&l| l == level).count() as u64;
    }
    let n = sorted.len();
    if n == 0 {
        return LikertOracle { counts, n: 0, mean: None, median: None };
    }
    let mean = sorted.iter().map(|&l| f64::from(l)).sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        f64::from(sorted[n / 2])
    } else {
        (f64::from(sorted[n / 2 - 1]) + f64::from(sorted[n / 2])) / 2.0
    };
    LikertOracle { counts, n: n as u64, mean: Some(mean), median: Some(median) }
}

/// (count, fraction) per catalog mood.
pub fn mood_shares(moods: &[Mood]) -> Vec<(Mood, u64, f64)> {
    Mood::ALL
        .iter()
        .map(|m| {
            let count = moods.iter().filter(|x| *x == m).count() as u64;
            let fraction = if moods.is_empty() { 0.0 } else { count as f64 / moods.len() as f64 };
            (*m, count, fraction)
        })
        .collect()
}

/// cells[a][g] by scanning the log once per cell.
pub fn confusion(log: &[(Mood, Mood)]) -> (Vec<Vec<u64>>, Option<f64>) {
    let cells: Vec<Vec<u64>> = Mood::ALL
        .iter()
        .map(|a| {
            Mood::ALL
                .iter()
                .map(|g| log.iter().filter(|(x, y)| x == a && y == g).count() as u64)
                .collect()
        })
        .collect();
    let exact = log.iter().filter(|(a, g)| a == g).count();
    let accuracy = if log.is_empty() { None } else { Some(exact as f64 / log.len() as f64) };
    (cells, accuracy)
}

pub fn distinct<'a>(groups: &[&[&'a str]]) -> u64 {
    groups
        .iter()
        .flat_map(|g| g.iter().copied())
        .collect::<BTreeSet<&str>>()
        .len() as u64
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}
