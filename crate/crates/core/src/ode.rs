//! Dormand–Prince 8(5,3) stepper with 7th-order dense output.
//!
//! Coefficients follow Hairer & Wanner's DOP853. The right-hand side may fail
//! (for instance when a trial stage leaves the atomic disk); such a failure is
//! handled like a rejected step and the step size is halved. Right-hand sides
//! are autonomous, so the stage time nodes are not needed.

use crate::error::{DickeError, Result};

const N_STAGES: usize = 12;
const N_EXTENDED: usize = 16;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;
const MAX_STAGE_FAILURES: usize = 60;

#[rustfmt::skip]
const A: [[f64; N_EXTENDED]; N_EXTENDED] = {
    let mut a = [[0.0; N_EXTENDED]; N_EXTENDED];
    a[1][0] = 5.26001519587677318785587544488e-2;

    a[2][0] = 1.97250569845378994544595329183e-2;
    a[2][1] = 5.91751709536136983633785987549e-2;

    a[3][0] = 2.95875854768068491816892993775e-2;
    a[3][2] = 8.87627564304205475450678981324e-2;

    a[4][0] = 2.41365134159266685502369798665e-1;
    a[4][2] = -8.84549479328286085344864962717e-1;
    a[4][3] = 9.24834003261792003115737966543e-1;

    a[5][0] = 3.7037037037037037037037037037e-2;
    a[5][3] = 1.70828608729473871279604482173e-1;
    a[5][4] = 1.25467687566822425016691814123e-1;

    a[6][0] = 3.7109375e-2;
    a[6][3] = 1.70252211019544039314978060272e-1;
    a[6][4] = 6.02165389804559606850219397283e-2;
    a[6][5] = -1.7578125e-2;

    a[7][0] = 3.70920001185047927108779319836e-2;
    a[7][3] = 1.70383925712239993810214054705e-1;
    a[7][4] = 1.07262030446373284651809199168e-1;
    a[7][5] = -1.53194377486244017527936158236e-2;
    a[7][6] = 8.27378916381402288758473766002e-3;

    a[8][0] = 6.24110958716075717114429577812e-1;
    a[8][3] = -3.36089262944694129406857109825;
    a[8][4] = -8.68219346841726006818189891453e-1;
    a[8][5] = 2.75920996994467083049415600797e1;
    a[8][6] = 2.01540675504778934086186788979e1;
    a[8][7] = -4.34898841810699588477366255144e1;

    a[9][0] = 4.77662536438264365890433908527e-1;
    a[9][3] = -2.48811461997166764192642586468;
    a[9][4] = -5.90290826836842996371446475743e-1;
    a[9][5] = 2.12300514481811942347288949897e1;
    a[9][6] = 1.52792336328824235832596922938e1;
    a[9][7] = -3.32882109689848629194453265587e1;
    a[9][8] = -2.03312017085086261358222928593e-2;

    a[10][0] = -9.3714243008598732571704021658e-1;
    a[10][3] = 5.18637242884406370830023853209;
    a[10][4] = 1.09143734899672957818500254654;
    a[10][5] = -8.14978701074692612513997267357;
    a[10][6] = -1.85200656599969598641566180701e1;
    a[10][7] = 2.27394870993505042818970056734e1;
    a[10][8] = 2.49360555267965238987089396762;
    a[10][9] = -3.0467644718982195003823669022;

    a[11][0] = 2.27331014751653820792359768449;
    a[11][3] = -1.05344954667372501984066689879e1;
    a[11][4] = -2.00087205822486249909675718444;
    a[11][5] = -1.79589318631187989172765950534e1;
    a[11][6] = 2.79488845294199600508499808837e1;
    a[11][7] = -2.85899827713502369474065508674;
    a[11][8] = -8.87285693353062954433549289258;
    a[11][9] = 1.23605671757943030647266201528e1;
    a[11][10] = 6.43392746015763530355970484046e-1;

    a[12][0] = 5.42937341165687622380535766363e-2;
    a[12][5] = 4.45031289275240888144113950566;
    a[12][6] = 1.89151789931450038304281599044;
    a[12][7] = -5.8012039600105847814672114227;
    a[12][8] = 3.1116436695781989440891606237e-1;
    a[12][9] = -1.52160949662516078556178806805e-1;
    a[12][10] = 2.01365400804030348374776537501e-1;
    a[12][11] = 4.47106157277725905176885569043e-2;

    a[13][0] = 5.61675022830479523392909219681e-2;
    a[13][6] = 2.53500210216624811088794765333e-1;
    a[13][7] = -2.46239037470802489917441475441e-1;
    a[13][8] = -1.24191423263816360469010140626e-1;
    a[13][9] = 1.5329179827876569731206322685e-1;
    a[13][10] = 8.20105229563468988491666602057e-3;
    a[13][11] = 7.56789766054569976138603589584e-3;
    a[13][12] = -8.298e-3;

    a[14][0] = 3.18346481635021405060768473261e-2;
    a[14][5] = 2.83009096723667755288322961402e-2;
    a[14][6] = 5.35419883074385676223797384372e-2;
    a[14][7] = -5.49237485713909884646569340306e-2;
    a[14][10] = -1.08347328697249322858509316994e-4;
    a[14][11] = 3.82571090835658412954920192323e-4;
    a[14][12] = -3.40465008687404560802977114492e-4;
    a[14][13] = 1.41312443674632500278074618366e-1;

    a[15][0] = -4.28896301583791923408573538692e-1;
    a[15][5] = -4.69762141536116384314449447206;
    a[15][6] = 7.68342119606259904184240953878;
    a[15][7] = 4.06898981839711007970213554331;
    a[15][8] = 3.56727187455281109270669543021e-1;
    a[15][12] = -1.39902416515901462129418009734e-3;
    a[15][13] = 2.9475147891527723389556272149;
    a[15][14] = -9.15095847217987001081870187138;
    a
};

const E3_CORR: [(usize, f64); 3] = [
    (0, 0.244094488188976377952755905512),
    (8, 0.733846688281611857341361741547),
    (11, 0.220588235294117647058823529412e-1),
];

#[rustfmt::skip]
const E5: [f64; N_STAGES + 1] = [
    0.1312004499419488073250102996e-1, 0.0, 0.0, 0.0, 0.0,
    -0.1225156446376204440720569753e+1,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e+1,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-1,
    -0.2235530786388629525884427845e-1,
    0.0,
];

#[rustfmt::skip]
const D: [[f64; N_EXTENDED]; 4] = {
    let mut d = [[0.0; N_EXTENDED]; 4];
    d[0][0] = -0.84289382761090128651353491142e+1;
    d[0][5] = 0.56671495351937776962531783590;
    d[0][6] = -0.30689499459498916912797304727e+1;
    d[0][7] = 0.23846676565120698287728149680e+1;
    d[0][8] = 0.21170345824450282767155149946e+1;
    d[0][9] = -0.87139158377797299206789907490;
    d[0][10] = 0.22404374302607882758541771650e+1;
    d[0][11] = 0.63157877876946881815570249290;
    d[0][12] = -0.88990336451333310820698117400e-1;
    d[0][13] = 0.18148505520854727256656404962e+2;
    d[0][14] = -0.91946323924783554000451984436e+1;
    d[0][15] = -0.44360363875948939664310572000e+1;

    d[1][0] = 0.10427508642579134603413151009e+2;
    d[1][5] = 0.24228349177525818288430175319e+3;
    d[1][6] = 0.16520045171727028198505394887e+3;
    d[1][7] = -0.37454675472269020279518312152e+3;
    d[1][8] = -0.22113666853125306036270938578e+2;
    d[1][9] = 0.77334326684722638389603898808e+1;
    d[1][10] = -0.30674084731089398182061213626e+2;
    d[1][11] = -0.93321305264302278729567221706e+1;
    d[1][12] = 0.15697238121770843886131091075e+2;
    d[1][13] = -0.31139403219565177677282850411e+2;
    d[1][14] = -0.93529243588444783865713862664e+1;
    d[1][15] = 0.35816841486394083752465898540e+2;

    d[2][0] = 0.19985053242002433820987653617e+2;
    d[2][5] = -0.38703730874935176555105901742e+3;
    d[2][6] = -0.18917813819516756882830838328e+3;
    d[2][7] = 0.52780815920542364900561016686e+3;
    d[2][8] = -0.11573902539959630126141871134e+2;
    d[2][9] = 0.68812326946963000169666922661e+1;
    d[2][10] = -0.10006050966910838403183860980e+1;
    d[2][11] = 0.77771377980534432092869265740;
    d[2][12] = -0.27782057523535084065932004339e+1;
    d[2][13] = -0.60196695231264120758267380846e+2;
    d[2][14] = 0.84320405506677161018159903784e+2;
    d[2][15] = 0.11992291136182789328035130030e+2;

    d[3][0] = -0.25693933462703749003312586129e+2;
    d[3][5] = -0.15418974869023643374053993627e+3;
    d[3][6] = -0.23152937917604549567536039109e+3;
    d[3][7] = 0.35763911791061412378285349910e+3;
    d[3][8] = 0.93405324183624310003907691704e+2;
    d[3][9] = -0.37458323136451633156875139351e+2;
    d[3][10] = 0.10409964950896230045147246184e+3;
    d[3][11] = 0.29840293426660503123344363579e+2;
    d[3][12] = -0.43533456590011143754432175058e+2;
    d[3][13] = 0.96324553959188282948394950600e+2;
    d[3][14] = -0.39177261675615439165231486172e+2;
    d[3][15] = -0.14972683625798562581422125276e+3;
    d
};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Interpolant over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t_old: f64,
    pub t_new: f64,
    y_old: [f64; N],
    coeffs: [[f64; N]; 7],
}

impl<const N: usize> DenseStep<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t_new - self.t_old;
        let x = (t - self.t_old) / h;
        let mut y = [0.0; N];
        for (i, f) in self.coeffs.iter().rev().enumerate() {
            for k in 0..N {
                y[k] += f[k];
                y[k] *= if i % 2 == 0 { x } else { 1.0 - x };
            }
        }
        for k in 0..N {
            y[k] += self.y_old[k];
        }
        y
    }
}

/// Adaptive DOP853 integrator over `[f64; N]` states.
pub struct Dop853<F, const N: usize>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    rhs: F,
    control: StepControl,
    t: f64,
    y: [f64; N],
    f: [f64; N],
    h_abs: f64,
    k: [[f64; N]; N_EXTENDED],
    y_old: [f64; N],
    f_old: [f64; N],
    t_old: f64,
    pub rejected_steps: usize,
    pub accepted_steps: usize,
}

impl<F, const N: usize> Dop853<F, N>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], control: StepControl) -> Result<Self> {
        let f0 = rhs(&y0)?;
        let mut solver = Self {
            rhs,
            control,
            t: t0,
            y: y0,
            f: f0,
            h_abs: 0.0,
            k: [[0.0; N]; N_EXTENDED],
            y_old: y0,
            f_old: f0,
            t_old: t0,
            rejected_steps: 0,
            accepted_steps: 0,
        };
        solver.h_abs = solver.initial_step();
        Ok(solver)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Replaces the current state (e.g. after a renormalization or a noise kick).
    pub fn reset_state(&mut self, y: [f64; N]) -> Result<()> {
        self.f = (self.rhs)(&y)?;
        self.y = y;
        Ok(())
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.control.abs_tol + a.abs().max(b.abs()) * self.control.rel_tol
    }

    // Hairer's starting-step heuristic.
    fn initial_step(&mut self) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.f[i] / sc).powi(2);
        }
        d0 = (d0 / N as f64).sqrt();
        d1 = (d1 / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.control.max_step);
        let mut y1 = self.y;
        for i in 0..N {
            y1[i] += h0 * self.f[i];
        }
        let d2 = match (self.rhs)(&y1) {
            Ok(f1) => {
                let mut acc = 0.0;
                for i in 0..N {
                    acc += ((f1[i] - self.f[i]) / self.scale(self.y[i], self.y[i])).powi(2);
                }
                (acc / N as f64).sqrt() / h0
            }
            Err(_) => return h0,
        };
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(self.control.max_step)
    }

    fn stages(&mut self, h: f64) -> Result<([f64; N], [f64; N])> {
        self.k[0] = self.f;
        for s in 1..N_STAGES {
            let mut ys = self.y;
            for (j, kj) in self.k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            self.k[s] = (self.rhs)(&ys)?;
        }
        let mut y_new = self.y;
        for (j, kj) in self.k.iter().enumerate().take(N_STAGES) {
            let b = A[N_STAGES][j];
            if b != 0.0 {
                for i in 0..N {
                    y_new[i] += h * b * kj[i];
                }
            }
        }
        let f_new = (self.rhs)(&y_new)?;
        self.k[N_STAGES] = f_new;
        Ok((y_new, f_new))
    }

    fn error_norm(&self, h: f64, y_new: &[f64; N]) -> f64 {
        let mut e5n = 0.0;
        let mut e3n = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i], y_new[i]);
            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for s in 0..=N_STAGES {
                let b = if s < N_STAGES { A[N_STAGES][s] } else { 0.0 };
                e5 += E5[s] * self.k[s][i];
                e3 += b * self.k[s][i];
            }
            for &(s, c) in &E3_CORR {
                e3 -= c * self.k[s][i];
            }
            e5n += (e5 / sc).powi(2);
            e3n += (e3 / sc).powi(2);
        }
        if e5n == 0.0 && e3n == 0.0 {
            return 0.0;
        }
        h.abs() * e5n / ((e5n + 0.01 * e3n) * N as f64).sqrt()
    }

    /// Takes one accepted step, never stepping past `t_bound`.
    pub fn step(&mut self, t_bound: f64) -> Result<()> {
        let min_step = 10.0 * (self.t.abs() * f64::EPSILON).max(f64::MIN_POSITIVE);
        let mut h_abs = self.h_abs.min(self.control.max_step);
        let mut rejected = false;
        let mut failures = 0;
        loop {
            if h_abs < min_step {
                return Err(DickeError::StepFailure { t: self.t, reason: "step size underflow".into() });
            }
            let mut t_new = self.t + h_abs;
            if t_new > t_bound {
                t_new = t_bound;
            }
            let h = t_new - self.t;
            match self.stages(h) {
                Err(e) => {
                    failures += 1;
                    if failures > MAX_STAGE_FAILURES {
                        return Err(DickeError::StepFailure { t: self.t, reason: e.to_string() });
                    }
                    h_abs *= 0.5;
                    rejected = true;
                    self.rejected_steps += 1;
                }
                Ok((y_new, f_new)) => {
                    let err = self.error_norm(h, &y_new);
                    if err < 1.0 {
                        let mut factor =
                            if err == 0.0 { MAX_FACTOR } else { MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT)) };
                        if rejected {
                            factor = factor.min(1.0);
                        }
                        self.h_abs = h_abs * factor;
                        self.t_old = self.t;
                        self.y_old = self.y;
                        self.f_old = self.f;
                        self.t = t_new;
                        self.y = y_new;
                        self.f = f_new;
                        self.accepted_steps += 1;
                        return Ok(());
                    }
                    h_abs *= MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT));
                    rejected = true;
                    self.rejected_steps += 1;
                }
            }
        }
    }

    /// Dense interpolant over the last accepted step. Costs three extra
    /// right-hand-side evaluations.
    pub fn dense(&mut self) -> Result<DenseStep<N>> {
        let h = self.t - self.t_old;
        for s in (N_STAGES + 1)..N_EXTENDED {
            let mut ys = self.y_old;
            for j in 0..s {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * self.k[j][i];
                    }
                }
            }
            self.k[s] = (self.rhs)(&ys)?;
        }
        let mut coeffs = [[0.0; N]; 7];
        for i in 0..N {
            let dy = self.y[i] - self.y_old[i];
            coeffs[0][i] = dy;
            coeffs[1][i] = h * self.f_old[i] - dy;
            coeffs[2][i] = 2.0 * dy - h * (self.f[i] + self.f_old[i]);
            for (r, drow) in D.iter().enumerate() {
                let mut acc = 0.0;
                for s in 0..N_EXTENDED {
                    acc += drow[s] * self.k[s][i];
                }
                coeffs[3 + r][i] = h * acc;
            }
        }
        Ok(DenseStep { t_old: self.t_old, t_new: self.t, y_old: self.y_old, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn control(tol: f64) -> StepControl {
        StepControl { rel_tol: tol, abs_tol: tol, max_step: f64::INFINITY }
    }

    #[test]
    fn exponential_decay() {
        let mut s = Dop853::new(|y: &[f64; 1]| Ok([-y[0]]), 0.0, [1.0], control(1e-12)).unwrap();
        while s.t() < 5.0 {
            s.step(5.0).unwrap();
        }
        assert!((s.y()[0] - (-5.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn dense_output_is_accurate_inside_steps() {
        let mut s = Dop853::new(|y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [0.0, 1.0], control(1e-11)).unwrap();
        let mut worst: f64 = 0.0;
        while s.t() < 10.0 {
            s.step(10.0).unwrap();
            let d = s.dense().unwrap();
            for k in 0..=10 {
                let t = d.t_old + (d.t_new - d.t_old) * k as f64 / 10.0;
                let y = d.eval(t);
                worst = worst.max((y[0] - t.sin()).abs()).max((y[1] - t.cos()).abs());
            }
        }
        assert!(worst < 1e-9, "dense error {worst}");
    }

    #[test]
    fn rhs_failure_shrinks_step() {
        // blows up at y = 1 (t = 1); refuse evaluations beyond 0.999
        let rhs = |y: &[f64; 1]| {
            if y[0] > 0.999 {
                Err(DickeError::Singular { margin: 1.0 - y[0] })
            } else {
                Ok([1.0])
            }
        };
        let mut s = Dop853::new(rhs, 0.0, [0.0], control(1e-10)).unwrap();
        while s.t() < 0.99 {
            s.step(0.99).unwrap();
        }
        assert!((s.y()[0] - 0.99).abs() < 1e-12);
        s.step(2.0).unwrap();
        assert!(s.y()[0] <= 0.999);
        assert!(s.rejected_steps > 0);
    }
}
