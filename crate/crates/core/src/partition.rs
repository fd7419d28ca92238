//! Overlapping partitions, restriction/prolongation maps and the interface Γ.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

const NONE: usize = usize::MAX;

/// Owned sets `W_{i,0}`, extended sets `W_{i,δ}` and the interface `Γ`.
///
/// `Γ_i` is the layer of vertices adjacent to `W_{i,δ}` but outside it: the
/// unknowns whose values enter subdomain `i`'s local problem as Dirichlet data.
/// `Γ` is their union, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapPartition {
    m: usize,
    overlap: usize,
    owned: Vec<Vec<usize>>,
    extended: Vec<Vec<usize>>,
    owner: Vec<usize>,
    /// Local positions (into `extended[i]`) of the owned unknowns.
    owned_local: Vec<Vec<usize>>,
    interface: Vec<usize>,
    /// Positions into `interface` of each `Γ_i`, ascending.
    interface_slices: Vec<Vec<usize>>,
    interface_pos: Vec<usize>,
}

impl OverlapPartition {
    /// Number of subdomains `p`.
    pub fn num_subdomains(&self) -> usize {
        self.owned.len()
    }

    /// Global dimension `m`.
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn owned(&self, i: usize) -> &[usize] {
        &self.owned[i]
    }

    pub fn owned_sets(&self) -> &[Vec<usize>] {
        &self.owned
    }

    /// `W_{i,δ}` in ascending order; doubles as the local-to-global map.
    pub fn extended(&self, i: usize) -> &[usize] {
        &self.extended[i]
    }

    /// Owning subdomain of each global row.
    pub fn owner(&self) -> &[usize] {
        &self.owner
    }

    /// Local indices (into `extended(i)`) of the rows subdomain `i` writes back.
    pub fn owned_local(&self, i: usize) -> &[usize] {
        &self.owned_local[i]
    }

    /// Global interface `Γ`, ascending.
    pub fn interface(&self) -> &[usize] {
        &self.interface
    }

    /// `n = |Γ|`.
    pub fn interface_len(&self) -> usize {
        self.interface.len()
    }

    /// Positions in `Γ` of the entries of `Γ_i`.
    pub fn interface_slice(&self, i: usize) -> &[usize] {
        &self.interface_slices[i]
    }

    /// Global indices of `Γ_i`.
    pub fn subdomain_interface(&self, i: usize) -> Vec<usize> {
        self.interface_slices[i].iter().map(|&k| self.interface[k]).collect()
    }

    /// Position of global row `g` in `Γ`, if it is an interface unknown.
    pub fn interface_position(&self, g: usize) -> Option<usize> {
        match self.interface_pos[g] {
            NONE => None,
            k => Some(k),
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: len });
        }
        Ok(())
    }

    /// `R_{i,δ} x`.
    pub fn restrict(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(self.extended[i].iter().map(|&g| x[g]).collect())
    }

    /// `R̃_{i,δ}ᵀ x_local`: scatters only the owned entries.
    pub fn prolong_restricted(&self, i: usize, x_local: &[f64]) -> Result<Vec<f64>> {
        if x_local.len() != self.extended[i].len() {
            return Err(Error::DimensionMismatch { expected: self.extended[i].len(), found: x_local.len() });
        }
        let mut y = vec![0.0; self.m];
        for &k in &self.owned_local[i] {
            y[self.extended[i][k]] = x_local[k];
        }
        Ok(y)
    }

    /// `R_{i,δ}ᵀ x_local`: scatters every extended entry.
    pub fn prolong(&self, i: usize, x_local: &[f64]) -> Result<Vec<f64>> {
        if x_local.len() != self.extended[i].len() {
            return Err(Error::DimensionMismatch { expected: self.extended[i].len(), found: x_local.len() });
        }
        let mut y = vec![0.0; self.m];
        for (&g, &v) in self.extended[i].iter().zip(x_local) {
            y[g] = v;
        }
        Ok(y)
    }

    /// `R_Γ x`.
    pub fn restrict_interface(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(self.interface.iter().map(|&g| x[g]).collect())
    }

    /// `R_Γᵀ g`.
    pub fn prolong_interface(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.interface.len() {
            return Err(Error::DimensionMismatch { expected: self.interface.len(), found: g.len() });
        }
        let mut y = vec![0.0; self.m];
        for (&k, &v) in self.interface.iter().zip(g) {
            y[k] = v;
        }
        Ok(y)
    }

    /// Writes `p m delta` followed by one line of owned indices per subdomain.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.num_subdomains(), self.m, self.overlap)?;
        for set in &self.owned {
            let line: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Reads a partition file and rebuilds the overlap against `a`.
    pub fn load<R: BufRead>(a: &SparseMatrix, reader: R) -> Result<Self> {
        let (owned, delta) = read_partition_file(reader, a.nrows())?;
        extend_overlap(a, &owned, delta)
    }
}

/// Parses a partition file, returning the owned sets and the recorded overlap.
pub fn read_partition_file<R: BufRead>(reader: R, m: usize) -> Result<(Vec<Vec<usize>>, usize)> {
    let mut lines = reader.lines().enumerate().filter(|(_, l)| match l {
        Ok(s) => !s.trim().is_empty() && !s.trim_start().starts_with('#'),
        Err(_) => true,
    });
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty partition file".into() })?;
    let header = header?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    if nums.len() != 3 {
        return Err(Error::Parse { line: 1, message: "expected 'p m delta'".into() });
    }
    let (p, mm, delta) = (nums[0], nums[1], nums[2]);
    if mm != m {
        return Err(Error::DimensionMismatch { expected: m, found: mm });
    }
    let mut owned = Vec::with_capacity(p);
    for (idx, line) in lines {
        let line = line?;
        let set: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
        owned.push(set);
    }
    if owned.len() != p {
        return Err(Error::InvalidPartition(format!("header announces {p} subdomains, found {}", owned.len())));
    }
    Ok((owned, delta))
}

/// Contiguous blocks of near-equal size (earlier blocks take the remainder).
pub fn band_partition(m: usize, p: usize) -> Result<Vec<Vec<usize>>> {
    if p == 0 || p > m {
        return Err(Error::InvalidArgument(format!("cannot split {m} rows into {p} bands")));
    }
    let base = m / p;
    let extra = m % p;
    let mut out = Vec::with_capacity(p);
    let mut start = 0;
    for i in 0..p {
        let len = base + usize::from(i < extra);
        out.push((start..start + len).collect());
        start += len;
    }
    Ok(out)
}

fn bfs_distances(adj: &[Vec<usize>], sources: &[usize], allowed: &[bool]) -> Vec<usize> {
    let mut dist = vec![NONE; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if allowed[w] && dist[w] == NONE {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Deterministic greedy graph partition (seeded BFS growth plus boundary smoothing).
///
/// Seeds are spread by repeated farthest-vertex search, parts grow one vertex
/// at a time with the currently smallest part expanding first, and a final
/// pass moves boundary vertices toward the neighbor majority when that keeps
/// sizes balanced and parts connected. Disconnected graphs are split per
/// component, with parts distributed in proportion to component size.
pub fn greedy_graph_partition(a: &SparseMatrix, p: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    let m = a.nrows();
    if p == 0 || p > m {
        return Err(Error::InvalidArgument(format!("cannot split {m} rows into {p} parts")));
    }
    let adj = a.adjacency();
    let comps = components(&adj);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Parts per component: at least one each, the rest by largest remainder.
    let mut counts = vec![0usize; comps.len()];
    let mut part_of_comp: Vec<Option<usize>> = vec![None; comps.len()];
    if p >= comps.len() {
        counts.iter_mut().for_each(|c| *c = 1);
        let mut left = p - comps.len();
        while left > 0 {
            // Give the next part to the component with the largest size per part.
            let best = (0..comps.len())
                .filter(|&c| counts[c] < comps[c].len())
                .max_by(|&x, &y| {
                    let fx = comps[x].len() as f64 / counts[x] as f64;
                    let fy = comps[y].len() as f64 / counts[y] as f64;
                    fx.total_cmp(&fy).then(y.cmp(&x))
                })
                .expect("p <= m guarantees room");
            counts[best] += 1;
            left -= 1;
        }
    } else {
        // More components than parts: pack components greedily into the lightest part.
        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_by(|&x, &y| comps[y].len().cmp(&comps[x].len()).then(x.cmp(&y)));
        let mut load = vec![0usize; p];
        for c in order {
            let target = (0..p).min_by_key(|&k| (load[k], k)).unwrap();
            load[target] += comps[c].len();
            part_of_comp[c] = Some(target);
        }
    }

    let mut part = vec![NONE; m];
    let mut next_label = 0;
    for (c, comp) in comps.iter().enumerate() {
        if let Some(target) = part_of_comp[c] {
            for &v in comp {
                part[v] = target;
            }
            continue;
        }
        let k = counts[c];
        let labels: Vec<usize> = (next_label..next_label + k).collect();
        next_label += k;
        grow_component(&adj, comp, &labels, &mut part, &mut rng);
    }

    let mut sets = vec![Vec::new(); p];
    for (v, &lbl) in part.iter().enumerate() {
        sets[lbl].push(v);
    }
    Ok(sets)
}

fn grow_component(adj: &[Vec<usize>], comp: &[usize], labels: &[usize], part: &mut [usize], rng: &mut ChaCha8Rng) {
    let k = labels.len();
    if k == 1 {
        for &v in comp {
            part[v] = labels[0];
        }
        return;
    }
    let n = adj.len();
    let mut allowed = vec![false; n];
    for &v in comp {
        allowed[v] = true;
    }

    // Seeds: start from the vertex farthest from a random one, then keep
    // adding the vertex farthest from all seeds chosen so far.
    let start = comp[rng.gen_range(0..comp.len())];
    let d0 = bfs_distances(adj, &[start], &allowed);
    let first = *comp.iter().max_by_key(|&&v| (d0[v], std::cmp::Reverse(v))).unwrap();
    let mut seeds = vec![first];
    while seeds.len() < k {
        let d = bfs_distances(adj, &seeds, &allowed);
        let next = *comp.iter().max_by_key(|&&v| (d[v], std::cmp::Reverse(v))).unwrap();
        seeds.push(next);
    }

    let mut sizes = vec![0usize; k];
    let mut frontiers: Vec<VecDeque<usize>> = vec![VecDeque::new(); k];
    for (j, &s) in seeds.iter().enumerate() {
        part[s] = labels[j];
        sizes[j] = 1;
        frontiers[j].extend(adj[s].iter().copied().filter(|&w| allowed[w]));
    }
    let mut assigned = k;
    while assigned < comp.len() {
        // Smallest part that can still grow.
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&j| (sizes[j], j));
        let mut grew = false;
        for j in order {
            while let Some(v) = frontiers[j].pop_front() {
                if part[v] != NONE {
                    continue;
                }
                part[v] = labels[j];
                sizes[j] += 1;
                assigned += 1;
                frontiers[j].extend(adj[v].iter().copied().filter(|&w| allowed[w] && part[w] == NONE));
                grew = true;
                break;
            }
            if grew {
                break;
            }
        }
        if !grew {
            break;
        }
    }

    smooth_boundaries(adj, comp, labels, part);
}

fn smooth_boundaries(adj: &[Vec<usize>], comp: &[usize], labels: &[usize], part: &mut [usize]) {
    let k = labels.len();
    let target = comp.len() as f64 / k as f64;
    let lo = (0.9 * target).floor() as usize;
    let hi = (1.1 * target).ceil() as usize;
    let slot = |lbl: usize| labels.iter().position(|&l| l == lbl).unwrap();
    let mut sizes = vec![0usize; k];
    for &v in comp {
        sizes[slot(part[v])] += 1;
    }
    for _ in 0..3 {
        let mut moved = false;
        for &v in comp {
            let from = part[v];
            let mut tally: Vec<(usize, usize)> = Vec::new();
            for &w in &adj[v] {
                let l = part[w];
                match tally.iter_mut().find(|e| e.0 == l) {
                    Some(e) => e.1 += 1,
                    None => tally.push((l, 1)),
                }
            }
            let own = tally.iter().find(|e| e.0 == from).map_or(0, |e| e.1);
            let Some(&(to, cnt)) = tally.iter().filter(|e| e.0 != from).max_by_key(|e| (e.1, std::cmp::Reverse(e.0)))
            else {
                continue;
            };
            if cnt <= own || sizes[slot(from)] <= lo || sizes[slot(to)] >= hi {
                continue;
            }
            part[v] = to;
            if !part_connected(adj, comp, part, from) {
                part[v] = from;
                continue;
            }
            sizes[slot(from)] -= 1;
            sizes[slot(to)] += 1;
            moved = true;
        }
        if !moved {
            break;
        }
    }
}

fn part_connected(adj: &[Vec<usize>], comp: &[usize], part: &[usize], label: usize) -> bool {
    let members: Vec<usize> = comp.iter().copied().filter(|&v| part[v] == label).collect();
    let Some(&start) = members.first() else { return true };
    let mut seen = std::collections::HashSet::with_capacity(members.len());
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if part[w] == label && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == members.len()
}

/// Builds `W_{i,δ}` by `delta` rounds of neighbor closure and derives `Γ`.
pub fn extend_overlap(a: &SparseMatrix, owned: &[Vec<usize>], delta: usize) -> Result<OverlapPartition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    let m = a.nrows();
    if owned.is_empty() {
        return Err(Error::InvalidPartition("no subdomains".into()));
    }
    let mut owner = vec![NONE; m];
    for (i, set) in owned.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::InvalidPartition(format!("subdomain {i} is empty")));
        }
        for &g in set {
            if g >= m {
                return Err(Error::InvalidPartition(format!("index {g} out of range in subdomain {i}")));
            }
            if owner[g] != NONE {
                return Err(Error::InvalidPartition(format!("row {g} owned by subdomains {} and {i}", owner[g])));
            }
            owner[g] = i;
        }
    }
    if let Some(g) = owner.iter().position(|&o| o == NONE) {
        return Err(Error::InvalidPartition(format!("row {g} is not owned by any subdomain")));
    }

    let adj = a.adjacency();
    let p = owned.len();
    let mut owned_sorted = Vec::with_capacity(p);
    let mut extended = Vec::with_capacity(p);
    let mut owned_local = Vec::with_capacity(p);
    let mut gamma_sets: Vec<Vec<usize>> = Vec::with_capacity(p);
    let mut mark = vec![false; m];
    for set in owned {
        let mut s = set.clone();
        s.sort_unstable();
        let mut members = s.clone();
        for &g in &members {
            mark[g] = true;
        }
        let mut layer = members.clone();
        for _ in 0..delta {
            let mut next = Vec::new();
            for &v in &layer {
                for &w in &adj[v] {
                    if !mark[w] {
                        mark[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            members.extend_from_slice(&next);
            layer = next;
        }
        // Outer layer of the extended set.
        let mut gamma = Vec::new();
        for &v in &members {
            for &w in &adj[v] {
                if !mark[w] {
                    mark[w] = true;
                    gamma.push(w);
                }
            }
        }
        for &g in members.iter().chain(&gamma) {
            mark[g] = false;
        }
        members.sort_unstable();
        gamma.sort_unstable();
        let ol: Vec<usize> = members
            .iter()
            .enumerate()
            .filter(|(_, &g)| owner[g] == owned_sorted.len())
            .map(|(k, _)| k)
            .collect();
        owned_local.push(ol);
        extended.push(members);
        owned_sorted.push(s);
        gamma_sets.push(gamma);
    }

    let mut interface: Vec<usize> = gamma_sets.iter().flatten().copied().collect();
    interface.sort_unstable();
    interface.dedup();
    let mut interface_pos = vec![NONE; m];
    for (k, &g) in interface.iter().enumerate() {
        interface_pos[g] = k;
    }
    let interface_slices = gamma_sets.iter().map(|gs| gs.iter().map(|&g| interface_pos[g]).collect()).collect();

    Ok(OverlapPartition {
        m,
        overlap: delta,
        owned: owned_sorted,
        extended,
        owner,
        owned_local,
        interface,
        interface_slices,
        interface_pos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    fn grid(nx: usize, ny: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                let k = i * ny + j;
                t.push((k, k, 4.0));
                if i > 0 {
                    t.push((k, k - ny, -1.0));
                }
                if i + 1 < nx {
                    t.push((k, k + ny, -1.0));
                }
                if j > 0 {
                    t.push((k, k - 1, -1.0));
                }
                if j + 1 < ny {
                    t.push((k, k + 1, -1.0));
                }
            }
        }
        SparseMatrix::from_triplets(nx * ny, nx * ny, &t).unwrap()
    }

    fn is_connected(a: &SparseMatrix, set: &[usize]) -> bool {
        let mut part = vec![0usize; a.nrows()];
        for &v in set {
            part[v] = 1;
        }
        part_connected(&a.adjacency(), &(0..a.nrows()).collect::<Vec<_>>(), &part, 1)
    }

    #[test]
    fn band_sizes() {
        let b = band_partition(10, 2).unwrap();
        assert_eq!(b, vec![(0..5).collect::<Vec<_>>(), (5..10).collect()]);
        let b = band_partition(9, 2).unwrap();
        assert_eq!(b[0].len(), 5);
        assert_eq!(b[1], (5..9).collect::<Vec<_>>());
        assert!(band_partition(3, 4).is_err());
    }

    #[test]
    fn path_overlap_one() {
        let a = path(10);
        let part = extend_overlap(&a, &band_partition(10, 2).unwrap(), 1).unwrap();
        assert_eq!(part.extended(0), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(part.extended(1), &[4, 5, 6, 7, 8, 9]);
        assert_eq!(part.subdomain_interface(0), vec![6]);
        assert_eq!(part.subdomain_interface(1), vec![3]);
        assert_eq!(part.interface(), &[3, 6]);
    }

    #[test]
    fn path_overlap_zero() {
        let a = path(10);
        let part = extend_overlap(&a, &band_partition(10, 2).unwrap(), 0).unwrap();
        assert_eq!(part.interface(), &[4, 5]);
        assert_eq!(part.extended(0), part.owned(0));
    }

    #[test]
    fn saturation() {
        let a = path(6);
        let part = extend_overlap(&a, &band_partition(6, 3).unwrap(), 10).unwrap();
        for i in 0..3 {
            assert_eq!(part.extended(i).len(), 6);
            assert!(part.subdomain_interface(i).is_empty());
        }
    }

    #[test]
    fn monotone_in_delta() {
        let a = grid(7, 6);
        let owned = greedy_graph_partition(&a, 3, 1).unwrap();
        for d in 0..4 {
            let p0 = extend_overlap(&a, &owned, d).unwrap();
            let p1 = extend_overlap(&a, &owned, d + 1).unwrap();
            for i in 0..3 {
                assert!(p0.extended(i).iter().all(|g| p1.extended(i).contains(g)));
                for g in p0.subdomain_interface(i) {
                    assert_ne!(p0.owner()[g], i);
                }
            }
        }
    }

    #[test]
    fn band_grid_interface_size() {
        // 10 x 12 grid points including boundary -> 8 x 10 interior, row-major.
        let (mx, my) = (10usize, 12usize);
        let a = grid(mx - 2, my - 2);
        let p = 4;
        // Band split along whole grid lines so the cuts are straight.
        let part = extend_overlap(&a, &band_partition(a.nrows(), p).unwrap(), 1).unwrap();
        assert_eq!(part.interface_len(), (my - 2) * (2 * p - 2));
    }

    #[test]
    fn maps() {
        let a = grid(5, 5);
        let part = extend_overlap(&a, &band_partition(25, 3).unwrap(), 0).unwrap();
        let g: Vec<f64> = (0..part.interface_len()).map(|k| k as f64 + 0.5).collect();
        let x = part.prolong_interface(&g).unwrap();
        assert_eq!(part.restrict_interface(&x).unwrap(), g);
        for (k, v) in x.iter().enumerate() {
            if part.interface_position(k).is_none() {
                assert_eq!(*v, 0.0);
            }
        }
        let y: Vec<f64> = (0..25).map(|k| (k * k) as f64).collect();
        let mut sum = vec![0.0; 25];
        for i in 0..3 {
            let loc = part.restrict(i, &y).unwrap();
            let back = part.prolong_restricted(i, &loc).unwrap();
            sum.iter_mut().zip(back).for_each(|(s, b)| *s += b);
        }
        assert_eq!(sum, y);
    }

    #[test]
    fn greedy_path() {
        let a = path(10);
        let parts = greedy_graph_partition(&a, 2, 0).unwrap();
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert!(is_connected(&a, p));
        }
        assert_eq!(parts[0].len() + parts[1].len(), 10);
    }

    #[test]
    fn greedy_grid() {
        let a = grid(8, 8);
        let parts = greedy_graph_partition(&a, 4, 0).unwrap();
        for p in &parts {
            assert!((14..=18).contains(&p.len()), "size {}", p.len());
            assert!(is_connected(&a, p));
        }
        assert_eq!(parts, greedy_graph_partition(&a, 4, 0).unwrap());
    }

    #[test]
    fn greedy_components() {
        let a = SparseMatrix::from_triplets(
            6,
            6,
            &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0), (3, 4, 1.0), (4, 3, 1.0), (4, 5, 1.0), (5, 4, 1.0)],
        )
        .unwrap();
        let mut parts = greedy_graph_partition(&a, 2, 3).unwrap();
        parts.sort();
        assert_eq!(parts, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn file_round_trip() {
        let a = grid(4, 4);
        let part = extend_overlap(&a, &band_partition(16, 3).unwrap(), 2).unwrap();
        let mut buf = Vec::new();
        part.save(&mut buf).unwrap();
        let back = OverlapPartition::load(&a, &buf[..]).unwrap();
        assert_eq!(back, part);
    }

    #[test]
    fn rejects_overlapping_owned_sets() {
        let a = path(4);
        assert!(extend_overlap(&a, &[vec![0, 1, 2], vec![2, 3]], 1).is_err());
        assert!(extend_overlap(&a, &[vec![0, 1], vec![3]], 1).is_err());
    }
}
