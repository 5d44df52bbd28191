//! Greedy hitting set over observed optimal sets.

use crate::error::{invalid, Result};
use crate::subset::Subset;

/// Repeatedly adds the arm that hits the most not-yet-hit sets (lowest arm on
/// ties) until every member of `sets` is hit.
pub fn greedy_cover(sets: &[Subset]) -> Result<Subset> {
    if sets.iter().any(Subset::is_empty) {
        return Err(invalid("cannot cover an empty optimal set"));
    }
    let k = sets
        .iter()
        .filter_map(|s| s.arms().last())
        .max()
        .map_or(0, |a| a + 1);
    let mut uncovered: Vec<&Subset> = sets.iter().collect();
    let mut cover = Subset::empty();
    let mut hits = vec![0usize; k];
    while !uncovered.is_empty() {
        hits.iter_mut().for_each(|h| *h = 0);
        for s in &uncovered {
            for &a in s.arms() {
                hits[a] += 1;
            }
        }
        let (best, _) = hits
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (a, &h)| if h > acc.1 { (a, h) } else { acc });
        cover.insert(best)?;
        uncovered.retain(|s| !s.contains(best));
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(v: &[&[usize]]) -> Vec<Subset> {
        v.iter().map(|l| Subset::from_labels(l, 10).unwrap()).collect()
    }

    #[test]
    fn examples() {
        let c = greedy_cover(&sets(&[&[1, 2], &[2, 3], &[4]])).unwrap();
        assert_eq!(c.labels(), vec![2, 4]);
        let c = greedy_cover(&sets(&[&[1], &[2], &[3]])).unwrap();
        assert_eq!(c.labels(), vec![1, 2, 3]);
        assert!(greedy_cover(&[]).unwrap().is_empty());
    }

    #[test]
    fn empty_member_is_rejected() {
        assert!(greedy_cover(&[Subset::singleton(0), Subset::empty()]).is_err());
    }

    #[test]
    fn result_hits_every_member() {
        let s = sets(&[&[1, 5], &[5, 6], &[2, 3], &[3, 7, 9], &[9], &[4]]);
        let c = greedy_cover(&s).unwrap();
        assert!(s.iter().all(|x| x.intersects(&c)));
    }
}
