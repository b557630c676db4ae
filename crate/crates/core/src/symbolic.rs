//! Admissible words, cylinder intervals and itineraries over a natural
//! partition. The follower set of a word is identified constructively with
//! the pair (last letter, image interval of the word's cylinder): for
//! piecewise-monotone maps the admissible continuations depend only on that
//! image interval.

use crate::error::{Error, Result};
use crate::maps::{NaturalPartition, PiecewiseMonotoneMap};
use crate::scalar::{Interval, Scalar};

/// Finite sequence of branch indices into a natural partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn extended(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }
}

/// A word's cylinder: the set of points following the word, together with
/// its forward image after len(word) steps.
#[derive(Clone, Debug)]
pub struct CylinderInterval {
    pub interval: Interval,
    pub image: Interval,
}

impl CylinderInterval {
    pub fn is_empty(&self) -> bool {
        self.interval.is_empty() || self.image.is_empty()
    }
}

fn check_word(partition: &NaturalPartition, word: &Word) -> Result<()> {
    for &a in &word.0 {
        if a >= partition.len() {
            return Err(Error::PartitionMismatch(a, partition.len()));
        }
    }
    Ok(())
}

/// Forward image recurrence: I_1 = f(A_0), I_{k+1} = f(I_k ∩ A_k).
/// Returns the final image; empty interval if the word dies.
fn image_chain(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    word: &Word,
) -> Result<Interval> {
    let mut img = partition.branches[word.0[0]].clone();
    for (k, &a) in word.0.iter().enumerate() {
        let cur = if k == 0 {
            img.clone()
        } else {
            img.intersect(&partition.branches[a])
        };
        if cur.is_empty() {
            return Ok(Interval::new(Scalar::one(), Scalar::zero()));
        }
        let fa = map.eval(&cur.lo)?;
        let fb = map.eval(&cur.hi)?;
        let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
        img = Interval::new(lo, hi);
    }
    Ok(img)
}

/// The cylinder ∩_k f^{-k} A_k and its f^len-image. An empty interval is the
/// distinguished empty value.
pub fn cylinder(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    word: &Word,
) -> Result<CylinderInterval> {
    if word.is_empty() {
        return Err(Error::InvalidParameter("cylinder of the empty word".into()));
    }
    check_word(partition, word)?;
    let image = image_chain(map, partition, word)?;
    if image.is_empty() {
        return Ok(CylinderInterval {
            interval: Interval::new(Scalar::one(), Scalar::zero()),
            image,
        });
    }
    // Pull the final image back through the monotone branch chain.
    let mut j = image.clone();
    for k in (0..word.len()).rev() {
        let branch = &partition.branches[word.0[k]];
        let piece = map.piece_index(&branch.midpoint())?;
        let f = &map.pieces()[piece].f;
        let a = f.invert(&j.lo, branch);
        let b = f.invert(&j.hi, branch);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        j = Interval::new(lo, hi).intersect(branch);
    }
    Ok(CylinderInterval { interval: j, image })
}

/// True iff the cylinder is nonempty with a non-degenerate image.
pub fn is_admissible(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    word: &Word,
) -> Result<bool> {
    if word.is_empty() {
        return Ok(true);
    }
    check_word(partition, word)?;
    Ok(!image_chain(map, partition, word)?.is_empty())
}

/// Image interval of the word's cylinder (the follower-set surrogate).
pub fn follower_image(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    word: &Word,
) -> Result<Interval> {
    if word.is_empty() {
        return Err(Error::InvalidParameter("follower image of the empty word".into()));
    }
    check_word(partition, word)?;
    let img = image_chain(map, partition, word)?;
    if img.is_empty() {
        return Err(Error::Inadmissible);
    }
    Ok(img)
}

/// Branch sequence of the orbit of x over n steps. Errors if the orbit
/// lands on (or within `boundary_tol` of, in float mode) a partition
/// boundary; the caller may perturb x.
pub fn itinerary(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    x: &Scalar,
    n: usize,
    boundary_tol: f64,
) -> Result<Word> {
    let mut letters = Vec::with_capacity(n);
    let mut y = x.clone();
    for _ in 0..n {
        let idx = partition
            .locate(&y)
            .ok_or_else(|| Error::BoundaryHit(y.to_f64()))?;
        if !y.is_exact() {
            let b = &partition.branches[idx];
            let yf = y.to_f64();
            if (yf - b.lo.to_f64()).abs() < boundary_tol
                || (yf - b.hi.to_f64()).abs() < boundary_tol
            {
                return Err(Error::BoundaryHit(yf));
            }
        }
        letters.push(idx);
        y = map.eval(&y)?;
    }
    Ok(Word(letters))
}

/// Finite-depth point projection: the midpoint of the word's cylinder.
pub fn project_point(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    word: &Word,
) -> Result<Scalar> {
    let cyl = cylinder(map, partition, word)?;
    if cyl.is_empty() {
        return Err(Error::Inadmissible);
    }
    Ok(cyl.interval.midpoint())
}

/// Letter projection: the last letter of a word.
pub fn project_last_letter(word: &Word) -> Result<usize> {
    word.last().ok_or(Error::Inadmissible)
}
