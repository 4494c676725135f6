//! Zeros of analytic functions in rectangles by the argument principle.
//!
//! Boxes are subdivided until each holds at most a few zeros, which are then
//! polished by Newton's method and certified by the winding number of a
//! small isolating circle.

use crate::error::{Error, Result};
use crate::format::{pair, Header};
use crate::numeric::cauchy::derivative;
use crate::numeric::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

/// Axis-aligned rectangle `[re_min, re_max] × [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn expanded(&self, by: f64) -> Rect {
        Rect::new(self.re_min - by, self.re_max + by, self.im_min - by, self.im_max + by)
    }

    /// Counter-clockwise corners starting at the lower left.
    pub fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    /// Splits at fraction `s` of each divided side; long boxes are halved
    /// across their long side only.
    fn split(&self, s: f64) -> Vec<Rect> {
        let (w, h) = (self.width(), self.height());
        let xm = self.re_min + s * w;
        let ym = self.im_min + s * h;
        if w > 1.5 * h {
            vec![
                Rect::new(self.re_min, xm, self.im_min, self.im_max),
                Rect::new(xm, self.re_max, self.im_min, self.im_max),
            ]
        } else if h > 1.5 * w {
            vec![
                Rect::new(self.re_min, self.re_max, self.im_min, ym),
                Rect::new(self.re_min, self.re_max, ym, self.im_max),
            ]
        } else {
            vec![
                Rect::new(self.re_min, xm, self.im_min, ym),
                Rect::new(xm, self.re_max, self.im_min, ym),
                Rect::new(self.re_min, xm, ym, self.im_max),
                Rect::new(xm, self.re_max, ym, self.im_max),
            ]
        }
    }

    /// Moves edges lying within `gap` of the origin outward so that the
    /// boundary keeps a distance of at least `gap` from `z = 0`.
    pub fn notched(&self, gap: f64) -> Rect {
        let mut r = *self;
        let spans_re = r.re_min - gap <= 0.0 && 0.0 <= r.re_max + gap;
        let spans_im = r.im_min - gap <= 0.0 && 0.0 <= r.im_max + gap;
        if spans_re {
            if r.im_min.abs() < gap {
                r.im_min = if r.im_min <= 0.0 { -gap } else { gap };
            }
            if r.im_max.abs() < gap {
                r.im_max = if r.im_max >= 0.0 { gap } else { -gap };
            }
        }
        if spans_im {
            if r.re_min.abs() < gap {
                r.re_min = if r.re_min <= 0.0 { -gap } else { gap };
            }
            if r.re_max.abs() < gap {
                r.re_max = if r.re_max >= 0.0 { gap } else { -gap };
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingConfig {
    /// Initial panel length along edges before adaptive refinement.
    pub panel_len: f64,
    /// Shortest panel before the contour is declared to pass through a zero.
    pub min_panel: f64,
}

impl Default for WindingConfig {
    fn default() -> Self {
        WindingConfig {
            panel_len: 0.25,
            min_panel: 1e-9,
        }
    }
}

fn arg_step(a: C64, b: C64) -> f64 {
    (b / a).arg()
}

fn bad(v: C64) -> bool {
    !v.is_finite() || v == C64::new(0.0, 0.0)
}

fn eval_on_contour<F: Fn(C64) -> C64>(f: &F, z: C64) -> Result<C64> {
    let v = f(z);
    if bad(v) {
        return Err(Error::ContourThroughZero { near: z });
    }
    Ok(v)
}

/// Whether `log f` sampled at `a`, `m`, `b` looks smooth: each half turns by
/// at most π/4, `log|f|` bends by at most π/4, and the halves add up to the
/// principal increment of the whole.
fn smooth(fa: C64, fm: C64, fb: C64) -> Option<f64> {
    let d1 = arg_step(fa, fm);
    let d2 = arg_step(fm, fb);
    let bend = (fm.norm().ln() - 0.5 * (fa.norm().ln() + fb.norm().ln())).abs();
    let ok = d1.abs() <= FRAC_PI_4
        && d2.abs() <= FRAC_PI_4
        && bend <= FRAC_PI_4
        && (d1 + d2 - arg_step(fa, fb)).abs() < 1e-9;
    ok.then_some(d1 + d2)
}

/// Phase increment of `f` along the segment `[a, b]`. A panel is accepted
/// only when it looks smooth at both the half and the quarter points, since
/// a multiple zero close to the contour can swing the phase by a full turn
/// between samples of a single level.
fn segment_increment<F: Fn(C64) -> C64>(
    f: &F,
    (a, b): (C64, C64),
    (fa, fb): (C64, C64),
    fm: Option<C64>,
    cfg: &WindingConfig,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let fm = match fm {
        Some(v) => v,
        None => eval_on_contour(f, m)?,
    };
    let q1 = 0.5 * (a + m);
    let q3 = 0.5 * (m + b);
    let f1 = eval_on_contour(f, q1)?;
    let f3 = eval_on_contour(f, q3)?;
    if let (Some(whole), Some(left), Some(right)) = (smooth(fa, fm, fb), smooth(fa, f1, fm), smooth(fm, f3, fb)) {
        if (left + right - whole).abs() < 1e-9 {
            return Ok(left + right);
        }
    }
    if (b - a).norm() < cfg.min_panel * (1.0 + m.norm()) {
        return Err(Error::ContourThroughZero { near: m });
    }
    Ok(segment_increment(f, (a, m), (fa, fm), Some(f1), cfg)? + segment_increment(f, (m, b), (fm, fb), Some(f3), cfg)?)
}

fn polygon_winding<F: Fn(C64) -> C64>(f: &F, vertices: &[C64], cfg: &WindingConfig) -> Result<i64> {
    let mut total = 0.0;
    let n = vertices.len();
    for k in 0..n {
        let a = vertices[k];
        let b = vertices[(k + 1) % n];
        let panels = ((b - a).norm() / cfg.panel_len).ceil().max(1.0) as usize;
        let mut za = a;
        let mut fa = f(za);
        if bad(fa) {
            return Err(Error::ContourThroughZero { near: za });
        }
        for p in 1..=panels {
            let zb = a + (b - a) * (p as f64 / panels as f64);
            let fb = f(zb);
            if bad(fb) {
                return Err(Error::ContourThroughZero { near: zb });
            }
            total += segment_increment(f, (za, zb), (fa, fb), None, cfg)?;
            za = zb;
            fa = fb;
        }
    }
    let raw = total / (2.0 * PI);
    let rounded = raw.round();
    if (raw - rounded).abs() >= 0.2 {
        return Err(Error::NonIntegerWinding { raw });
    }
    Ok(rounded as i64)
}

/// Winding number of `f` around the boundary of `rect`.
pub fn winding<F: Fn(C64) -> C64>(f: &F, rect: &Rect, cfg: &WindingConfig) -> Result<i64> {
    polygon_winding(f, &rect.corners(), cfg)
}

/// Winding number of `f` around the circle `|z − center| = radius`.
pub fn winding_circle<F: Fn(C64) -> C64>(f: &F, center: C64, radius: f64, cfg: &WindingConfig) -> Result<i64> {
    let sides = 32;
    let vertices: Vec<C64> = (0..sides)
        .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / sides as f64))
        .collect();
    let local = WindingConfig {
        panel_len: cfg.panel_len.min(radius / 4.0),
        ..*cfg
    };
    polygon_winding(f, &vertices, &local)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroClass {
    Eigenvalue,
    Resonance,
    RealAxis,
}

/// Half-plane threshold used by [`classify`].
pub const CLASS_DELTA: f64 = 1e-8;

pub fn class_of(z: C64) -> ZeroClass {
    if z.im > CLASS_DELTA {
        ZeroClass::Eigenvalue
    } else if z.im < -CLASS_DELTA {
        ZeroClass::Resonance
    } else {
        ZeroClass::RealAxis
    }
}

/// Radius and winding of the circle isolating a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub radius: f64,
    pub winding: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub z: C64,
    pub multiplicity: usize,
    pub class: ZeroClass,
    pub certificate: Option<Certificate>,
}

impl Zero {
    pub fn new(z: C64, multiplicity: usize) -> Self {
        Zero {
            z,
            multiplicity,
            class: class_of(z),
            certificate: None,
        }
    }

    /// `λ = z²`.
    pub fn energy(&self) -> C64 {
        self.z * self.z
    }
}

/// Located zeros ordered by modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Zero>,
    pub rect: Option<Rect>,
    /// Winding of the full search rectangle.
    pub total_winding: Option<i64>,
    /// `ψ(0,0)`, reported separately since the origin is excluded.
    pub value_at_origin: Option<C64>,
}

impl ZeroSet {
    pub fn empty() -> Self {
        ZeroSet {
            zeros: vec![],
            rect: None,
            total_winding: None,
            value_at_origin: None,
        }
    }

    pub fn from_zeros(zeros: Vec<Zero>) -> Self {
        let mut s = ZeroSet {
            zeros,
            ..ZeroSet::empty()
        };
        s.sort();
        s
    }

    fn sort(&mut self) {
        self.zeros.sort_by(|a, b| {
            a.z.norm()
                .total_cmp(&b.z.norm())
                .then(a.z.re.total_cmp(&b.z.re))
                .then(a.z.im.total_cmp(&b.z.im))
        });
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn multiplicity_sum(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn points(&self) -> Vec<C64> {
        self.zeros.iter().map(|z| z.z).collect()
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = &Zero> {
        self.zeros.iter().filter(|z| z.class == ZeroClass::Eigenvalue)
    }

    pub fn resonances(&self) -> impl Iterator<Item = &Zero> {
        self.zeros.iter().filter(|z| z.class == ZeroClass::Resonance)
    }

    /// Largest distance from `−z̄_j` to the nearest zero, for checking the
    /// symmetry of real potentials; `None` if the set is empty.
    pub fn reflection_defect(&self) -> Option<f64> {
        self.zeros
            .iter()
            .map(|a| {
                let mirror = -a.z.conj();
                self.zeros
                    .iter()
                    .map(|b| (b.z - mirror).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(f64::max)
    }

    pub fn to_file(&self, header: Option<Header>) -> ZeroSetFile {
        ZeroSetFile {
            header,
            rect: self.rect,
            total_winding: self.total_winding,
            value_at_origin: self.value_at_origin.map(pair),
            zeros: self
                .zeros
                .iter()
                .map(|z| ZeroRecord {
                    z: pair(z.z),
                    mult: z.multiplicity,
                    class: z.class,
                    certificate: z.certificate,
                })
                .collect(),
        }
    }
}

/// Re-derives each class from the half plane of the zero.
pub fn classify(mut set: ZeroSet) -> ZeroSet {
    for z in &mut set.zeros {
        z.class = class_of(z.z);
    }
    set
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub z: [f64; 2],
    pub mult: usize,
    pub class: ZeroClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

/// JSON form of a zero set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<Header>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_winding: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_at_origin: Option<[f64; 2]>,
    pub zeros: Vec<ZeroRecord>,
}

impl ZeroSetFile {
    pub fn into_set(self) -> Result<ZeroSet> {
        let mut zeros = Vec::with_capacity(self.zeros.len());
        for (k, r) in self.zeros.iter().enumerate() {
            if r.mult == 0 {
                return Err(Error::InvalidInput(format!("zeros[{k}].mult must be positive")));
            }
            let z = C64::new(r.z[0], r.z[1]);
            if !z.is_finite() {
                return Err(Error::InvalidInput(format!("zeros[{k}].z is not finite")));
            }
            zeros.push(Zero {
                z,
                multiplicity: r.mult,
                class: class_of(z),
                certificate: r.certificate,
            });
        }
        let mut set = ZeroSet {
            zeros,
            rect: self.rect,
            total_winding: self.total_winding,
            value_at_origin: self.value_at_origin.map(|[a, b]| C64::new(a, b)),
        };
        set.sort();
        Ok(set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocateConfig {
    /// Boxes are refined once their diameter is at most this.
    pub coarse_tol: f64,
    /// Largest winding handed to Newton refinement.
    pub m_max: usize,
    pub max_depth: usize,
    pub newton_max_iter: usize,
    pub winding: WindingConfig,
}

impl Default for LocateConfig {
    fn default() -> Self {
        LocateConfig {
            coarse_tol: 0.25,
            m_max: 4,
            max_depth: 60,
            newton_max_iter: 60,
            winding: WindingConfig::default(),
        }
    }
}

/// Distance kept between the search contour and the origin.
pub const ORIGIN_NOTCH: f64 = 1e-6;

struct Task {
    rect: Rect,
    winding: i64,
    depth: usize,
}

enum Outcome {
    Done(Vec<Zero>),
    Split(Vec<Task>),
}

/// Locates all zeros of `f` inside `rect`.
pub fn locate<F>(f: &F, rect: &Rect, cfg: &LocateConfig) -> Result<ZeroSet>
where
    F: Fn(C64) -> C64 + Sync,
{
    if !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(Error::InvalidInput("search rectangle has empty interior".into()));
    }
    let mut rect = rect.notched(ORIGIN_NOTCH);
    let mut total = None;
    for attempt in 0..6 {
        match winding(f, &rect, &cfg.winding) {
            Ok(w) => {
                total = Some(w);
                break;
            }
            Err(Error::ContourThroughZero { near }) if attempt < 5 => {
                log::debug!("search contour meets a zero near {near}; enlarging");
                rect = rect.expanded(1e-7 * rect.diameter() * (1.0 + attempt as f64 * 0.618));
            }
            Err(e) => return Err(e),
        }
    }
    let total = total.expect("loop either sets the winding or returns");
    if total < 0 {
        return Err(Error::NonIntegerWinding { raw: total as f64 });
    }

    let mut found = Vec::new();
    let mut level = vec![Task {
        rect,
        winding: total,
        depth: 0,
    }];
    while !level.is_empty() {
        let outcomes: Vec<Result<Outcome>> = level.par_iter().map(|t| process(f, t, cfg)).collect();
        let mut next = Vec::new();
        for o in outcomes {
            match o? {
                Outcome::Done(z) => found.extend(z),
                Outcome::Split(children) => next.extend(children),
            }
        }
        level = next;
    }

    let mut set = ZeroSet::from_zeros(found);
    set.rect = Some(rect);
    set.total_winding = Some(total);
    let origin = f(C64::new(0.0, 0.0));
    set.value_at_origin = Some(origin);
    Ok(set)
}

fn process<F>(f: &F, task: &Task, cfg: &LocateConfig) -> Result<Outcome>
where
    F: Fn(C64) -> C64 + Sync,
{
    if task.winding == 0 {
        return Ok(Outcome::Done(vec![]));
    }
    let r = task.rect;
    if r.diameter() <= cfg.coarse_tol && task.winding as usize <= cfg.m_max {
        if let Some(z) = refine(f, &r, task.winding as usize, cfg) {
            return Ok(Outcome::Done(vec![z]));
        }
    }
    if task.depth >= cfg.max_depth {
        return Err(Error::MaxDepth {
            re_min: r.re_min,
            re_max: r.re_max,
            im_min: r.im_min,
            im_max: r.im_max,
        });
    }
    const SPLITS: [f64; 5] = [0.5, 0.5 + 0.0173, 0.5 - 0.0311, 0.5 + 0.0457, 0.5 - 0.0619];
    let mut last_err = None;
    for s in SPLITS {
        let children = r.split(s);
        let windings: Result<Vec<i64>> = children.iter().map(|c| winding(f, c, &cfg.winding)).collect();
        match windings {
            Ok(ws) if ws.iter().sum::<i64>() == task.winding && ws.iter().all(|&w| w >= 0) => {
                return Ok(Outcome::Split(
                    children
                        .into_iter()
                        .zip(ws)
                        .map(|(rect, winding)| Task {
                            rect,
                            winding,
                            depth: task.depth + 1,
                        })
                        .collect(),
                ));
            }
            Ok(ws) => {
                last_err = Some(Error::NonIntegerWinding {
                    raw: ws.iter().sum::<i64>() as f64,
                })
            }
            Err(e @ Error::ContourThroughZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one split was attempted"))
}

/// Newton polish from the box centre, then certification by the winding of
/// a circle. Returns `None` when the box should be split further.
fn refine<F: Fn(C64) -> C64>(f: &F, r: &Rect, m: usize, cfg: &LocateConfig) -> Option<Zero> {
    let diam = r.diameter();
    let limit = r.expanded(0.5 * diam);
    let mut z = r.center();
    let mut fz = f(z);
    let mut best = fz.norm();
    let mut stalls = 0;
    for _ in 0..cfg.newton_max_iter {
        if fz == C64::new(0.0, 0.0) {
            break;
        }
        let rho = (0.125 * diam).min(1e-3 * (1.0 + z.norm())).max(1e-7 * (1.0 + z.norm()));
        let d = derivative(f, z, rho, 16);
        if bad(d) {
            return None;
        }
        let step = fz / d * m as f64;
        z -= step;
        if !limit.contains(z) {
            return None;
        }
        fz = f(z);
        let a = fz.norm();
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
        if a < best {
            best = a;
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        }
    }
    // a zero outside the box belongs to a neighbour
    if !r.expanded(1e-12 * diam).contains(z) {
        return None;
    }
    // certify with the largest circle that reproduces the box winding
    for radius in [0.5 * diam, 0.25 * diam, 0.1 * diam] {
        if let Ok(w) = winding_circle(f, z, radius, &cfg.winding) {
            if w == m as i64 {
                return Some(Zero {
                    z,
                    multiplicity: m,
                    class: class_of(z),
                    certificate: Some(Certificate { radius, winding: w }),
                });
            }
        }
    }
    None
}
