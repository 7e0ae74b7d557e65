//! Representation counts and generalized Frobenius quantities for concrete
//! tuples of positive integers.
//!
//! For a tuple `a` let `h(k)` be the number of nonnegative integer vectors
//! `b` with `b . a = k`. `F_{m,l}(a)` is the `l`-th largest multiple `k` of
//! `gcd(a)` with `h(k) < m` (negative multiples always qualify) and `G_m(a)`
//! counts the positive multiples with `h(k) < m`. `F = F_{1,1}`, `G = G_1`.
//!
//! Everything is computed on the gcd-reduced tuple with a capped coin DP and
//! rescaled afterwards.

use num_integer::Integer;

use crate::error::{Error, Result};

/// An ordered tuple of at least two positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuple {
    entries: Vec<u64>,
    gcd: u64,
}

impl Tuple {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::invalid("a tuple needs at least two entries"));
        }
        if entries.contains(&0) {
            return Err(Error::invalid("tuple entries must be positive"));
        }
        let gcd = entries.iter().fold(0u64, |g, &x| g.gcd(&x));
        Ok(Tuple { entries, gcd })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn gcd(&self) -> u64 {
        self.gcd
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The tuple divided by its gcd.
    pub fn reduced(&self) -> Tuple {
        Tuple {
            entries: self.entries.iter().map(|x| x / self.gcd).collect(),
            gcd: 1,
        }
    }

    pub fn scaled(&self, c: u64) -> Result<Tuple> {
        let entries = self
            .entries
            .iter()
            .map(|x| x.checked_mul(c).ok_or(Error::Overflow("tuple scaling")))
            .collect::<Result<Vec<_>>>()?;
        Tuple::new(entries)
    }

    /// The two smallest entries (with multiplicity).
    fn two_smallest(&self) -> (u64, u64) {
        let mut s = self.entries.clone();
        s.sort_unstable();
        (s[0], s[1])
    }
}

/// Memory and work budgets for the DP and the enumeration oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of DP cells a single table may allocate.
    pub max_table_cells: usize,
    /// Largest `k` accepted by [`rep_count_exact`].
    pub max_oracle_k: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_table_cells: 100_000_000,
            max_oracle_k: 10_000,
        }
    }
}

/// `min(h(k), cap)` for `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepCountTable {
    cap: u64,
    counts: Vec<u64>,
}

impl RepCountTable {
    /// Coin DP: one ascending pass per entry, saturating at `cap`.
    pub fn build(a: &Tuple, k_max: u64, cap: u64, limits: &Limits) -> Result<Self> {
        if cap == 0 {
            return Err(Error::invalid("cap must be positive"));
        }
        let cells = usize::try_from(k_max)
            .ok()
            .and_then(|k| k.checked_add(1))
            .filter(|&c| c <= limits.max_table_cells)
            .ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "table up to k = {k_max} exceeds {} cells",
                    limits.max_table_cells
                ))
            })?;
        let mut counts = vec![0u64; cells];
        counts[0] = 1;
        for &step in a.entries() {
            let step = step as usize;
            for k in step..cells {
                counts[k] = counts[k].saturating_add(counts[k - step]).min(cap);
            }
        }
        Ok(RepCountTable { cap, counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, k: u64) -> Option<u64> {
        self.counts.get(usize::try_from(k).ok()?).copied()
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn k_max(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }
}

/// Exact `h(k)` by enumerating `b_n, ..., b_2` and testing divisibility for
/// `b_1`. Oracle use only.
pub fn rep_count_exact(a: &Tuple, k: u64, limits: &Limits) -> Result<u128> {
    if k > limits.max_oracle_k {
        return Err(Error::ResourceLimit(format!(
            "exact enumeration limited to k <= {}",
            limits.max_oracle_k
        )));
    }
    fn count(entries: &[u64], rem: u64) -> Result<u128> {
        let (&last, rest) = entries.split_last().expect("nonempty");
        if rest.is_empty() {
            return Ok(u128::from(rem.is_multiple_of(last)));
        }
        let mut total: u128 = 0;
        let mut used = 0;
        while used <= rem {
            total = total
                .checked_add(count(rest, rem - used)?)
                .ok_or(Error::Overflow("representation count"))?;
            used += last;
        }
        Ok(total)
    }
    count(a.entries(), k)
}

/// `2 * x_{n-1} * floor(x_n / n) - x_n` over the distinct entries
/// `x_1 < ... < x_n`; an upper bound on `F` when `gcd = 1`.
pub fn erdos_graham_bound(a: &Tuple) -> Result<i128> {
    if a.gcd() != 1 {
        return Err(Error::GcdNotOne(a.gcd()));
    }
    let mut x: Vec<u64> = a.entries().to_vec();
    x.sort_unstable();
    x.dedup();
    let n = x.len();
    if n == 1 {
        // all entries equal 1
        return Ok(-1);
    }
    let second = i128::from(x[n - 2]);
    let largest = i128::from(x[n - 1]);
    second
        .checked_mul(2 * (largest / n as i128))
        .map(|v| v - largest)
        .ok_or(Error::Overflow("Erdos-Graham bound"))
}

/// `B` such that every multiple `k > B` of `gcd(a)` has `h(k) >= m`:
/// `g * ((m - 1) * s_1 * s_2 + EG(a / g))` with `s_1 <= s_2` the two smallest
/// reduced entries.
pub fn qualifying_bound(a: &Tuple, m: u64) -> Result<i128> {
    let r = a.reduced();
    let eg = erdos_graham_bound(&r)?;
    let (s1, s2) = r.two_smallest();
    i128::from(m.saturating_sub(1))
        .checked_mul(i128::from(s1) * i128::from(s2))
        .and_then(|v| v.checked_add(eg))
        .and_then(|v| v.checked_mul(i128::from(a.gcd())))
        .ok_or(Error::Overflow("qualifying bound"))
}

/// `(a, m, l)` for `F_{m,l}(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusInstance {
    pub tuple: Tuple,
    pub m: u64,
    pub l: u64,
}

impl FrobeniusInstance {
    pub fn new(tuple: Tuple, m: u64, l: u64) -> Result<Self> {
        if m == 0 || l == 0 {
            return Err(Error::invalid("m and l must be positive"));
        }
        Ok(FrobeniusInstance { tuple, m, l })
    }
}

/// All nonnegative multiples of `gcd(a)` with fewer than `m` representations.
///
/// One profile answers `F_{m,l}` for every `l` as well as `G_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    gcd: u64,
    m: u64,
    /// Reduced values `k / g`, ascending.
    qualifying: Vec<u64>,
}

impl Profile {
    pub fn compute(a: &Tuple, m: u64, limits: &Limits) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be positive"));
        }
        let r = a.reduced();
        let (s1, _) = r.two_smallest();
        let window = qualifying_bound(&r, m)?.max(0);
        let k_cap = u64::try_from(window).map_err(|_| Error::Overflow("search window"))?;

        // Grow the table until a run of s_1 consecutive k with h(k) >= m shows
        // up; adding s_1 never lowers h, so nothing above the run qualifies.
        let mut k_max = k_cap.min(1 << 12);
        loop {
            let table = RepCountTable::build(&r, k_max, m, limits)?;
            let counts = table.counts();
            let end = stable_start(counts, s1, m).or((k_max == k_cap).then_some(counts.len()));
            if let Some(end) = end {
                let qualifying = (0..end as u64).filter(|&k| counts[k as usize] < m).collect();
                return Ok(Profile {
                    gcd: a.gcd(),
                    m,
                    qualifying,
                });
            }
            k_max = k_cap.min(k_max.saturating_mul(2));
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `F_{m,l}`; falls back to negative multiples of `g` when fewer than `l`
    /// nonnegative multiples qualify.
    pub fn f(&self, l: u64) -> i128 {
        let n = self.qualifying.len() as u64;
        let g = i128::from(self.gcd);
        if l <= n {
            g * i128::from(self.qualifying[(n - l) as usize])
        } else {
            -g * i128::from(l - n)
        }
    }

    /// `G_m`.
    pub fn g(&self) -> u64 {
        self.qualifying.iter().filter(|&&k| k > 0).count() as u64
    }

    /// Qualifying nonnegative multiples of `g`, ascending.
    pub fn qualifying(&self) -> impl Iterator<Item = i128> + '_ {
        self.qualifying
            .iter()
            .map(move |&k| i128::from(k) * i128::from(self.gcd))
    }
}

fn stable_start(counts: &[u64], run: u64, m: u64) -> Option<usize> {
    let mut len = 0u64;
    for (k, &c) in counts.iter().enumerate() {
        if c >= m {
            len += 1;
            if len == run {
                return Some(k + 1 - run as usize);
            }
        } else {
            len = 0;
        }
    }
    None
}

pub fn frobenius_number(a: &Tuple) -> Result<i128> {
    Ok(Profile::compute(a, 1, &Limits::default())?.f(1))
}

pub fn genus(a: &Tuple) -> Result<u64> {
    Ok(Profile::compute(a, 1, &Limits::default())?.g())
}

pub fn f_ml(inst: &FrobeniusInstance) -> Result<i128> {
    Ok(Profile::compute(&inst.tuple, inst.m, &Limits::default())?.f(inst.l))
}

pub fn g_m(a: &Tuple, m: u64) -> Result<u64> {
    Ok(Profile::compute(a, m, &Limits::default())?.g())
}
