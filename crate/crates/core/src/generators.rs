//! Profile families: the adversarial construction against ordinal truthful
//! schemes, structured `D_k` profiles, cyclic profiles without normalization,
//! grid discretization and a seeded grid sampler.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::preference::Preference;
use crate::profile::Profile;
use crate::rational::{cube_root_floor, two_thirds_floor, Rational};

/// Sizes of the adversarial profile built by [`gen_negative`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeConstructionParams {
    pub m: usize,
    /// `⌊m^{1/3}⌋`, the largest block size.
    pub k: usize,
    /// `⌊m^{2/3}⌋`, the number of blocks (and of block voters).
    pub g_count: usize,
    /// `m - 1 + g_count`, voters before repetition.
    pub n_base: usize,
    pub repeat: usize,
}

impl NegativeConstructionParams {
    pub fn new(m: usize, repeat: usize) -> Result<Self> {
        if m < 8 {
            return Err(Error::precondition("the adversarial profile needs m >= 8"));
        }
        if repeat == 0 {
            return Err(Error::precondition("repeat must be at least 1"));
        }
        let g_count = two_thirds_floor(m);
        Ok(Self {
            m,
            k: cube_root_floor(m),
            g_count,
            n_base: m - 1 + g_count,
            repeat,
        })
    }

    pub fn n(&self) -> usize {
        self.n_base * self.repeat
    }

    /// `g_count` nearly equal blocks partitioning `1..=min(k·g, m-1)` (1-based).
    ///
    /// Capping at `m - 1` keeps the special candidate `m` out of every block when
    /// `m` is a perfect cube.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let covered = (self.k * self.g_count).min(self.m - 1);
        let base = covered / self.g_count;
        let extra = covered % self.g_count;
        let mut next = 1;
        (0..self.g_count)
            .map(|b| {
                let size = base + usize::from(b < extra);
                let block = (next..next + size).collect();
                next += size;
                block
            })
            .collect()
    }
}

/// Adversarial tie-free profile on which every `J^{1,q}` and `J^{2,q}` does badly.
///
/// Voters `1..m-1` value their own candidate at 1 and candidate `m` at 0; voter
/// `m - 1 + b` values block `b` just below 1 and candidate `m` at exactly
/// `1 - 1/m²`. Every other utility is a distinct multiple of `1/m⁴` below
/// `1/m³`, so each non-special candidate collects less than `2 + 1/m`.
/// With `repeat = r` the `m - 1 + g` voters are listed `r` times.
pub fn gen_negative(m: usize, repeat: usize) -> Result<Profile> {
    let params = NegativeConstructionParams::new(m, repeat)?;
    let cube = BigInt::from(m).pow(3);
    let fourth = BigInt::from(m).pow(4);
    let level = |t: usize| Rational::new(BigInt::from(t), fourth.clone());
    let top = |t: usize| Rational::one() - Rational::new(BigInt::from(t), cube.clone());
    let special = m - 1; // 0-based candidate m

    let mut base = Vec::with_capacity(params.n_base);
    for own in 0..m - 1 {
        let mut values = alloc::vec![Rational::zero(); m];
        values[own] = Rational::one();
        let rest: Vec<usize> = (0..m - 1).filter(|&j| j != own).collect();
        for (rank, &j) in rest.iter().enumerate() {
            values[j] = level(rest.len() - rank);
        }
        base.push(Preference::new(values)?);
    }
    for block in params.blocks() {
        let mut values = alloc::vec![Rational::zero(); m];
        for (offset, &j) in block.iter().enumerate() {
            values[j - 1] = top(offset);
        }
        values[special] = top(m);
        let rest: Vec<usize> = (0..m - 1).filter(|j| !block.contains(&(j + 1))).collect();
        for (rank, &j) in rest.iter().enumerate() {
            values[j] = level(rest.len() - 1 - rank);
        }
        base.push(Preference::new(values)?);
    }
    let mut prefs = Vec::with_capacity(params.n());
    for _ in 0..repeat {
        prefs.extend(base.iter().cloned());
    }
    Profile::new(prefs)
}

/// Which `D_k` class a generated voter belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DkClass {
    /// Top block of size at most 2 containing candidate 1.
    A,
    /// Single top candidate other than 1; candidate 1 ranked below `⌊m^{1/3}⌋`.
    B,
    /// Top block of size `⌊m^{1/3}⌋ + 1` with candidate 1 last in it.
    C,
}

/// Shape of the class-(a) voters' top blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TopShape {
    /// Size 1 or 2, chosen by the seed.
    #[default]
    Random,
    /// Always exactly `{1}`.
    Singleton,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DkParams {
    pub m: usize,
    pub k: u64,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub a_shape: TopShape,
}

impl DkParams {
    pub fn new(m: usize, k: u64, a: usize, b: usize, c: usize) -> Self {
        Self {
            m,
            k,
            a,
            b,
            c,
            a_shape: TopShape::Random,
        }
    }

    pub fn with_shape(mut self, shape: TopShape) -> Self {
        self.a_shape = shape;
        self
    }

    pub fn n(&self) -> usize {
        self.a + self.b + self.c
    }

    fn validate(&self) -> Result<()> {
        if self.m < 8 {
            return Err(Error::precondition("D_k profiles need m >= 8"));
        }
        if self.k < 4 * self.m as u64 {
            return Err(Error::precondition("D_k profiles need k >= 4m"));
        }
        if self.a + self.c == 0 {
            return Err(Error::precondition("need a + c >= 1"));
        }
        let top = cube_root_floor(self.m);
        if self.b > 0 && self.m <= top {
            return Err(Error::precondition("class (b) needs m > ⌊m^{1/3}⌋"));
        }
        if self.c > 0 && self.m < top + 1 {
            return Err(Error::precondition("class (c) needs m >= ⌊m^{1/3}⌋ + 1"));
        }
        Ok(())
    }
}

/// A two-block grid preference: ranks `1..=top` sit at `1, 1-1/k, ...`, the rest
/// at `..., 1/k, 0`. `order` lists 0-based candidates, most preferred first.
pub(crate) fn two_block_preference(order: &[usize], top: usize, k: u64) -> Preference {
    let m = order.len();
    let mut levels = alloc::vec![0u64; m];
    for (rank, &c) in order.iter().enumerate() {
        levels[c] = if rank < top {
            k - rank as u64
        } else {
            (m - 1 - rank) as u64
        };
    }
    Preference::from_levels(&levels, k).expect("two-block levels are normalized")
}

/// Profile whose first `a` voters are in `D_k^{(a)}`, next `b` in `D_k^{(b)}` and
/// last `c` in `D_k^{(c)}`; block membership and the remaining order come from `seed`.
pub fn gen_dk(params: &DkParams, seed: u64) -> Result<Profile> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = params.m;
    let top_k = cube_root_floor(m);
    let mut prefs = Vec::with_capacity(params.n());

    for _ in 0..params.a {
        let mut others: Vec<usize> = (1..m).collect();
        others.shuffle(&mut rng);
        let pair = params.a_shape == TopShape::Random && rng.gen_bool(0.5);
        let mut order = alloc::vec![0];
        order.extend(others);
        if pair && rng.gen_bool(0.5) {
            order.swap(0, 1);
        }
        prefs.push(two_block_preference(&order, if pair { 2 } else { 1 }, params.k));
    }
    for _ in 0..params.b {
        let mut others: Vec<usize> = (1..m).collect();
        others.shuffle(&mut rng);
        // candidate 1 goes to a 0-based position in top_k..m
        let position = rng.gen_range(top_k..m);
        let mut order = others;
        order.insert(position, 0);
        prefs.push(two_block_preference(&order, 1, params.k));
    }
    for _ in 0..params.c {
        let mut others: Vec<usize> = (1..m).collect();
        others.shuffle(&mut rng);
        let mut order = others;
        order.insert(top_k, 0);
        prefs.push(two_block_preference(&order, top_k + 1, params.k));
    }
    Profile::new(prefs)
}

/// `m` voters with cyclically shifted orderings; only voter `star` holds a
/// utility of 1 (on candidate `star`), everything else is a distinct value in
/// `(0, eps)`. The result is deliberately not normalized.
pub fn gen_cyclic(m: usize, star: usize, eps: &Rational) -> Result<Profile> {
    if m < 2 {
        return Err(Error::precondition("need m >= 2"));
    }
    if star == 0 || star > m {
        return Err(Error::Index {
            what: "star voter",
            index: star,
            bound: m,
        });
    }
    let m2 = BigInt::from(m * m);
    if !eps.is_positive() || *eps >= Rational::new(BigInt::one(), m2.clone()) {
        return Err(Error::precondition("eps must lie in (0, 1/m^2)"));
    }
    let scale = eps / Rational::from_integer(&m2 + 1);
    let mut prefs = Vec::with_capacity(m);
    for voter in 0..m {
        let mut values = alloc::vec![Rational::zero(); m];
        for rank in 0..m {
            let cand = (voter + rank) % m;
            values[cand] = if voter + 1 == star && rank == 0 {
                Rational::one()
            } else {
                // voter * m + rank enumerates all (voter, rank) pairs once
                &scale * Rational::from_integer(&m2 - BigInt::from(voter * m + rank))
            };
        }
        prefs.push(Preference::relaxed(values)?);
    }
    Profile::relaxed(prefs)
}

/// Snaps every voter onto the `1/k` grid.
///
/// Each output preference realizes the input's strict order (value descending,
/// lower index first among ties), attains 0 and 1, and minimizes the L1 distance
/// to the input among such grid preferences. Among several minimizers the one
/// that is lexicographically smallest by candidate index wins.
pub fn discretize(u: &Profile, k: u64) -> Result<Profile> {
    if k + 1 < u.m() as u64 {
        return Err(Error::precondition(alloc::format!(
            "k = {k} cannot host {} distinct grid values",
            u.m()
        )));
    }
    let prefs = u
        .prefs()
        .iter()
        .map(|p| discretize_pref(p, k))
        .collect::<Result<Vec<_>>>()?;
    Profile::new(prefs)
}

fn discretize_pref(u: &Preference, k: u64) -> Result<Preference> {
    let m = u.m();
    let order = u.order0();
    let targets: Vec<Rational> = order.iter().map(|&c| u.values()[c].clone() * BigInt::from(k)).collect();
    // position r (0-based in the strict order) takes an integer level in domain[r]
    let mut domain: Vec<(u64, u64)> = (0..m).map(|r| ((m - 1 - r) as u64, k - r as u64)).collect();
    domain[0] = (k, k);
    domain[m - 1] = (0, 0);
    let cost = |r: usize, y: u64| (Rational::from_integer(y.into()) - &targets[r]).abs();

    let mut levels = alloc::vec![0u64; m];
    let mut position = alloc::vec![0usize; m];
    for (r, &c) in order.iter().enumerate() {
        position[c] = r;
    }
    // fix candidates in index order, each to its smallest level in some optimum
    for cand in 0..m {
        let r = position[cand];
        let (lo, hi) = domain[r];
        let through = optimal_costs_through(&domain, r, &cost);
        let best = through.iter().min().expect("non-empty domain").clone();
        let offset = through.iter().position(|v| *v == best).expect("minimum exists");
        let y = lo + offset as u64;
        debug_assert!(y <= hi);
        domain[r] = (y, y);
        levels[cand] = y;
    }
    Preference::from_levels(&levels, k)
}

/// For each level `y` in `domain[pin]`, the least total cost of a strictly
/// decreasing assignment with position `pin` at `y`.
fn optimal_costs_through(domain: &[(u64, u64)], pin: usize, cost: &dyn Fn(usize, u64) -> Rational) -> Vec<Rational> {
    let m = domain.len();
    // forward[r][y - lo_r]: best cost of positions 0..=r with position r at y
    let mut forward: Vec<Vec<Option<Rational>>> = Vec::with_capacity(m);
    for r in 0..m {
        let (lo, hi) = domain[r];
        let row = (lo..=hi)
            .map(|y| {
                let prev = if r == 0 {
                    Some(Rational::zero())
                } else {
                    best_above(&forward[r - 1], domain[r - 1], y)
                };
                prev.map(|p| p + cost(r, y))
            })
            .collect();
        forward.push(row);
    }
    let mut backward: Vec<Vec<Option<Rational>>> = alloc::vec![Vec::new(); m];
    for r in (0..m).rev() {
        let (lo, hi) = domain[r];
        backward[r] = (lo..=hi)
            .map(|y| {
                let next = if r + 1 == m {
                    Some(Rational::zero())
                } else {
                    best_below(&backward[r + 1], domain[r + 1], y)
                };
                next.map(|p| p + cost(r, y))
            })
            .collect();
    }
    let (lo, hi) = domain[pin];
    (lo..=hi)
        .map(|y| {
            let i = (y - lo) as usize;
            match (&forward[pin][i], &backward[pin][i]) {
                (Some(f), Some(b)) => f + b - cost(pin, y),
                _ => infinite(),
            }
        })
        .collect()
}

fn infinite() -> Rational {
    Rational::from_integer(BigInt::from(u64::MAX))
}

fn best_above(row: &[Option<Rational>], (lo, _): (u64, u64), y: u64) -> Option<Rational> {
    row.iter()
        .enumerate()
        .filter(|(i, _)| lo + *i as u64 > y)
        .filter_map(|(_, v)| v.clone())
        .min()
}

fn best_below(row: &[Option<Rational>], (lo, _): (u64, u64), y: u64) -> Option<Rational> {
    row.iter()
        .enumerate()
        .filter(|(i, _)| lo + (*i as u64) < y)
        .filter_map(|(_, v)| v.clone())
        .min()
}

/// Seeded random grid profile.
///
/// Tie-free voters are uniform over tie-free `R_k`. Otherwise each voter puts 0
/// and 1 on two distinct random candidates and draws the rest uniformly from
/// the grid.
pub fn random_grid_profile(m: usize, n: usize, k: u64, tie_free: bool, seed: u64) -> Result<Profile> {
    if m < 2 || n == 0 || k == 0 {
        return Err(Error::precondition("need m >= 2, n >= 1, k >= 1"));
    }
    if tie_free && k + 1 < m as u64 {
        return Err(Error::precondition("tie-free grid needs k >= m - 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prefs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut levels: Vec<u64>;
        if tie_free {
            let interior: Vec<u64> = (1..k).collect();
            levels = interior
                .choose_multiple(&mut rng, m - 2)
                .copied()
                .collect();
            levels.push(0);
            levels.push(k);
            levels.shuffle(&mut rng);
        } else {
            levels = (0..m).map(|_| rng.gen_range(0..=k)).collect();
            let low = rng.gen_range(0..m);
            let mut high = rng.gen_range(0..m - 1);
            if high >= low {
                high += 1;
            }
            levels[low] = 0;
            levels[high] = k;
        }
        prefs.push(Preference::from_levels(&levels, k)?);
    }
    Profile::new(prefs)
}
