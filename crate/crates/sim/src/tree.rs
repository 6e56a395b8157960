//! Barnes-Hut quadtree for the Biot-Savart sum.
//!
//! With `z = x1 + i x2` a vortex of strength `Γ` at `z_j` induces
//! `u1 - i u2 = -i Γ / (2π (z - z_j))`. A cell with centre `c` is summarized
//! by `a_k = Σ Γ_j (z_j - c)^k`, and far away
//! `Σ Γ_j/(z - z_j) = Σ_k a_k / (z - c)^{k+1}`.
//! `order = 1` is the monopole + dipole truncation.

use num_complex::Complex64 as C64;
use vx_kernel::{biot_savart, KernelSpec, Vec2, INV_2PI};

pub const DEFAULT_ORDER: usize = 5;
/// far cells with a blob kernel must also satisfy `d ≥ BLOB_FAR·δ`
const BLOB_FAR: f64 = 100.0;
pub const MAX_ORDER: usize = 16;
const LEAF_SIZE: usize = 12;
const MAX_DEPTH: u32 = 48;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    center: C64,
    half: f64,
    start: u32,
    end: u32,
    children: [u32; 4],
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.children[0] == NONE
    }
}

#[derive(Debug, Clone)]
pub struct QuadTree {
    nodes: Vec<Node>,
    order: usize,
    coef: Vec<C64>,
    pos: Vec<Vec2>,
    gam: Vec<f64>,
}

impl QuadTree {
    pub fn build(x: &[Vec2], m: &[f64], order: usize) -> Self {
        assert_eq!(x.len(), m.len());
        assert!(order <= MAX_ORDER);
        let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in x {
            lo = Vec2::new(lo.x1.min(p.x1), lo.x2.min(p.x2));
            hi = Vec2::new(hi.x1.max(p.x1), hi.x2.max(p.x2));
        }
        let half = 0.5 * (hi.x1 - lo.x1).max(hi.x2 - lo.x2) * (1.0 + 1e-12) + 1e-300;
        let center = C64::new(0.5 * (lo.x1 + hi.x1), 0.5 * (lo.x2 + hi.x2));

        let mut idx: Vec<u32> = (0..x.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * x.len() / LEAF_SIZE + 8);
        nodes.push(Node { center, half, start: 0, end: x.len() as u32, children: [NONE; 4] });
        let mut stack = vec![(0usize, 0u32)];
        while let Some((ni, depth)) = stack.pop() {
            let Node { center, half, start, end, .. } = nodes[ni].clone();
            if (end - start) as usize <= LEAF_SIZE || depth >= MAX_DEPTH {
                continue;
            }
            let slice = &mut idx[start as usize..end as usize];
            let quad = |k: u32| {
                let p = x[k as usize];
                (p.x1 >= center.re) as usize + 2 * (p.x2 >= center.im) as usize
            };
            // stable partition into quadrants 0..4
            let mut counts = [0usize; 4];
            for &k in slice.iter() {
                counts[quad(k)] += 1;
            }
            let mut offs = [0usize; 4];
            for q in 1..4 {
                offs[q] = offs[q - 1] + counts[q - 1];
            }
            let mut tmp = vec![0u32; slice.len()];
            let mut cur = offs;
            for &k in slice.iter() {
                let q = quad(k);
                tmp[cur[q]] = k;
                cur[q] += 1;
            }
            slice.copy_from_slice(&tmp);
            let h = 0.5 * half;
            let mut children = [NONE; 4];
            for q in 0..4 {
                if counts[q] == 0 {
                    continue;
                }
                let c = center + C64::new(if q & 1 == 1 { h } else { -h }, if q & 2 == 2 { h } else { -h });
                let s = start + offs[q] as u32;
                children[q] = nodes.len() as u32;
                nodes.push(Node { center: c, half: h, start: s, end: s + counts[q] as u32, children: [NONE; 4] });
                stack.push((nodes.len() - 1, depth + 1));
            }
            nodes[ni].children = children;
        }

        let pos: Vec<Vec2> = idx.iter().map(|&k| x[k as usize]).collect();
        let gam: Vec<f64> = idx.iter().map(|&k| m[k as usize]).collect();
        let p1 = order + 1;
        let mut coef = vec![C64::new(0.0, 0.0); nodes.len() * p1];
        // children always have larger indices than their parent
        for ni in (0..nodes.len()).rev() {
            let node = &nodes[ni];
            let mut a = [C64::new(0.0, 0.0); MAX_ORDER + 1];
            if node.is_leaf() {
                for j in node.start as usize..node.end as usize {
                    let d = C64::new(pos[j].x1, pos[j].x2) - node.center;
                    let mut pw = C64::new(gam[j], 0.0);
                    for ak in a.iter_mut().take(p1) {
                        *ak += pw;
                        pw *= d;
                    }
                }
            } else {
                for &ci in node.children.iter().filter(|&&c| c != NONE) {
                    let d = nodes[ci as usize].center - node.center;
                    let child = &coef[ci as usize * p1..(ci as usize + 1) * p1];
                    // a_k += Σ_i C(k,i) child_i d^{k-i}
                    for k in 0..p1 {
                        let mut binom = 1.0;
                        let mut s = C64::new(0.0, 0.0);
                        for i in (0..=k).rev() {
                            // term with d^{k-i}; binom = C(k, i)
                            s += child[i] * d.powu((k - i) as u32) * binom;
                            binom = binom * i as f64 / (k - i + 1) as f64;
                        }
                        a[k] += s;
                    }
                }
            }
            coef[ni * p1..(ni + 1) * p1].copy_from_slice(&a[..p1]);
        }
        QuadTree { nodes, order, coef, pos, gam }
    }

    /// `Σ_j Γ_j K(z - z_j)` (not divided by N). Leaves are summed with the
    /// configured kernel; far cells use the exact-kernel expansion, which
    /// for a blob kernel is only accepted beyond `BLOB_FAR·δ`.
    pub fn velocity(&self, z: Vec2, theta: f64, kernel: KernelSpec) -> Vec2 {
        let zc = C64::new(z.x1, z.x2);
        let p1 = self.order + 1;
        let mut far = C64::new(0.0, 0.0);
        let mut near = Vec2::ZERO;
        let mut stack = [0u32; 256];
        let mut sp = 1usize;
        let blob_r2 = (BLOB_FAR * kernel.delta).powi(2);
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            let r = zc - node.center;
            let d2 = r.norm_sqr();
            let side = 2.0 * node.half;
            if side * side < theta * theta * d2 && d2 >= blob_r2 {
                let inv = r.inv();
                let a = &self.coef[stack[sp] as usize * p1..(stack[sp] as usize + 1) * p1];
                // Horner in 1/r
                let mut s = a[self.order];
                for k in (0..self.order).rev() {
                    s = s * inv + a[k];
                }
                far += s * inv;
            } else if node.is_leaf() {
                for j in node.start as usize..node.end as usize {
                    near += biot_savart(z - self.pos[j], kernel) * self.gam[j];
                }
            } else {
                for &c in node.children.iter().rev() {
                    if c != NONE {
                        stack[sp] = c;
                        sp += 1;
                    }
                }
            }
        }
        // u1 - i u2 = -i far / 2π
        let w = C64::new(0.0, -INV_2PI) * far;
        near + Vec2::new(w.re, -w.im)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}
