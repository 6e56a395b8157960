use crate::ParticleEnsemble;
use vx_kernel::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedDiagnostics {
    /// Σ M_i X_i
    pub linear_impulse: Vec2,
    /// Σ M_i |X_i|²
    pub angular_impulse: f64,
    /// -(1/4πN) Σ_{i≠j} M_i M_j log|X_i - X_j|; ±∞ if two particles coincide
    pub hamiltonian: f64,
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    fn value(self) -> f64 {
        self.s + self.c
    }
}

pub fn conserved_diagnostics(ens: &ParticleEnsemble) -> ConservedDiagnostics {
    let x = &ens.positions;
    let m = ens.circulations();
    let (mut p1, mut p2, mut ang) = (Neumaier::default(), Neumaier::default(), Neumaier::default());
    for (xi, &mi) in x.iter().zip(m) {
        p1.add(mi * xi.x1);
        p2.add(mi * xi.x2);
        ang.add(mi * xi.norm2());
    }
    let mut h = Neumaier::default();
    let mut singular = 0.0f64;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let r2 = (x[i] - x[j]).norm2();
            let w = m[i] * m[j];
            if r2 == 0.0 {
                if w != 0.0 {
                    // -w log 0 = +∞·sign(w)
                    singular += w.signum();
                }
                continue;
            }
            // pair counted twice in Σ_{i≠j}; log|r| = ½ log r²
            h.add(w * r2.ln());
        }
    }
    let n = x.len() as f64;
    let hamiltonian = if singular != 0.0 {
        f64::INFINITY * singular.signum()
    } else {
        -h.value() / (4.0 * std::f64::consts::PI * n)
    };
    ConservedDiagnostics {
        linear_impulse: Vec2::new(p1.value(), p2.value()),
        angular_impulse: ang.value(),
        hamiltonian,
    }
}
