//! Dormand-Prince 8(5,3) integrator on fixed-size states.
//!
//! Dense values inside the last accepted step are produced by a single
//! uncontrolled restep from the step's left end, which carries the same
//! local order as the step itself.

use crate::error::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, x: f64, y: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, x: f64, y: &[f64; N]) -> [f64; N] {
        self(x, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub safe: f64,
    pub fac1: f64,
    pub fac2: f64,
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 200_000,
            safe: 0.9,
            fac1: 0.333,
            fac2: 6.0,
        }
    }
}

const A21: f64 = 5.260_015_195_876_773_187_855_874_434_88E-2;
const A31: f64 = 1.972_505_698_453_789_945_445_953_291_83E-2;
const A32: f64 = 5.917_517_095_361_369_836_337_859_875_49E-2;
const A41: f64 = 2.958_758_547_680_684_918_168_929_937_75E-2;
const A43: f64 = 8.876_275_643_042_054_754_506_789_813_24E-2;
const A51: f64 = 2.413_651_341_592_666_855_023_697_986_65E-1;
const A53: f64 = -8.845_494_793_282_860_853_448_649_627_17E-1;
const A54: f64 = 9.248_340_032_617_920_031_157_379_665_43E-1;
const A61: f64 = 3.703_703_703_703_703_703_703_703_703_7E-2;
const A64: f64 = 1.708_286_087_294_738_712_796_044_821_73E-1;
const A65: f64 = 1.254_676_875_668_224_250_166_918_141_23E-1;
const A71: f64 = 3.710_937_5E-2;
const A74: f64 = 1.702_522_110_195_440_393_149_780_602_72E-1;
const A75: f64 = 6.021_653_898_045_596_068_502_193_972_83E-2;
const A76: f64 = -1.757_812_5E-2;
const A81: f64 = 3.709_200_011_850_479_271_087_793_198_36E-2;
const A84: f64 = 1.703_839_257_122_399_938_102_140_547_05E-1;
const A85: f64 = 1.072_620_304_463_732_846_518_091_991_68E-1;
const A86: f64 = -1.531_943_774_862_440_175_279_361_582_36E-2;
const A87: f64 = 8.273_789_163_814_022_887_584_737_660_02E-3;
const A91: f64 = 6.241_109_587_160_757_171_144_295_778_12E-1;
const A94: f64 = -3.360_892_629_446_941_294_068_571_098_25E0;
const A95: f64 = -8.682_193_468_417_260_068_181_898_914_53E-1;
const A96: f64 = 2.759_209_969_944_670_830_494_156_007_97E1;
const A97: f64 = 2.015_406_755_047_789_340_861_867_889_79E1;
const A98: f64 = -4.348_988_418_106_995_884_773_662_551_44E1;
const A101: f64 = 4.776_625_364_382_643_658_904_339_085_27E-1;
const A104: f64 = -2.488_114_619_971_667_641_926_425_864_68E0;
const A105: f64 = -5.902_908_268_368_429_963_714_464_757_43E-1;
const A106: f64 = 2.123_005_144_818_119_423_472_889_498_97E1;
const A107: f64 = 1.527_923_363_288_242_358_325_969_229_38E1;
const A108: f64 = -3.328_821_096_898_486_291_944_532_655_87E1;
const A109: f64 = -2.033_120_170_850_862_613_582_229_285_93E-2;
const A111: f64 = -9.371_424_300_859_873_257_170_402_165_8E-1;
const A114: f64 = 5.186_372_428_844_063_708_300_238_532_09E0;
const A115: f64 = 1.091_437_348_996_729_578_185_002_546_54E0;
const A116: f64 = -8.149_787_010_746_926_125_139_972_673_57E0;
const A117: f64 = -1.852_006_565_999_695_986_415_661_807_01E1;
const A118: f64 = 2.273_948_709_935_050_428_189_700_567_34E1;
const A119: f64 = 2.493_605_552_679_652_389_870_893_967_62E0;
const A1110: f64 = -3.046_764_471_898_219_500_382_366_902_2E0;
const A121: f64 = 2.273_310_147_516_538_207_923_597_684_49E0;
const A124: f64 = -1.053_449_546_673_725_019_840_666_898_79E1;
const A125: f64 = -2.000_872_058_224_862_499_096_757_184_44E0;
const A126: f64 = -1.795_893_186_311_879_891_727_659_505_34E1;
const A127: f64 = 2.794_888_452_941_996_005_084_998_088_37E1;
const A128: f64 = -2.858_998_277_135_023_694_740_655_086_74E0;
const A129: f64 = -8.872_856_933_530_629_544_335_492_892_58E0;
const A1210: f64 = 1.236_056_717_579_430_306_472_662_015_28E1;
const A1211: f64 = 6.433_927_460_157_635_303_559_704_840_46E-1;

const B1: f64 = 5.429_373_411_656_876_223_805_357_663_63E-2;
const B6: f64 = 4.450_312_892_752_408_881_441_139_505_66E0;
const B7: f64 = 1.891_517_899_314_500_383_042_815_990_44E0;
const B8: f64 = -5.801_203_960_010_584_781_467_211_422_7E0;
const B9: f64 = 3.111_643_669_578_198_944_089_160_623_7E-1;
const B10: f64 = -1.521_609_496_625_160_785_561_788_068_05E-1;
const B11: f64 = 2.013_654_008_040_303_483_747_765_375_01E-1;
const B12: f64 = 4.471_061_572_777_259_051_768_855_690_43E-2;

const BHH1: f64 = 0.244_094_488_188_976_377_952_755_905_512;
const BHH2: f64 = 0.733_846_688_281_611_857_341_361_741_547;
const BHH3: f64 = 0.220_588_235_294_117_647_058_823_529_412E-1;

const C2: f64 = 0.526_001_519_587_677_318_785_587_544_488E-1;
const C3: f64 = 0.789_002_279_381_515_978_178_381_316_732E-1;
const C4: f64 = 0.118_350_341_907_227_396_726_757_197_510;
const C5: f64 = 0.281_649_658_092_772_603_273_242_802_490;
const C6: f64 = 0.333_333_333_333_333_333_333_333_333_333;
const C7: f64 = 0.25;
const C8: f64 = 0.307_692_307_692_307_692_307_692_307_692;
const C9: f64 = 0.651_282_051_282_051_282_051_282_051_282;
const C10: f64 = 0.6;
const C11: f64 = 0.857_142_857_142_857_142_857_142_857_142;

const ER1: f64 = 0.131_200_449_941_948_807_325_010_299_6E-1;
const ER6: f64 = -0.122_515_644_637_620_444_072_056_975_3E1;
const ER7: f64 = -0.495_758_949_657_250_191_521_407_995_2;
const ER8: f64 = 0.166_437_718_245_498_653_696_153_041_5E1;
const ER9: f64 = -0.350_328_848_749_973_681_688_648_729_0;
const ER10: f64 = 0.334_179_118_713_017_479_029_731_884_1;
const ER11: f64 = 0.819_232_064_851_157_124_657_074_261_3E-1;
const ER12: f64 = -0.223_553_078_638_862_952_588_442_784_5E-1;

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let ch = c * h;
        for i in 0..N {
            out[i] += ch * k[i];
        }
    }
    out
}

struct Attempt<const N: usize> {
    y_new: [f64; N],
    err: f64,
}

fn stages<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    x: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    ctl: Option<&StepControl>,
) -> Attempt<N> {
    let k2 = sys.rhs(x + C2 * h, &comb(y, h, &[(A21, k1)]));
    let k3 = sys.rhs(x + C3 * h, &comb(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(x + C4 * h, &comb(y, h, &[(A41, k1), (A43, &k3)]));
    let k5 = sys.rhs(
        x + C5 * h,
        &comb(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]),
    );
    let k6 = sys.rhs(
        x + C6 * h,
        &comb(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]),
    );
    let k7 = sys.rhs(
        x + C7 * h,
        &comb(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
    );
    let k8 = sys.rhs(
        x + C8 * h,
        &comb(
            y,
            h,
            &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)],
        ),
    );
    let k9 = sys.rhs(
        x + C9 * h,
        &comb(
            y,
            h,
            &[
                (A91, k1),
                (A94, &k4),
                (A95, &k5),
                (A96, &k6),
                (A97, &k7),
                (A98, &k8),
            ],
        ),
    );
    let k10 = sys.rhs(
        x + C10 * h,
        &comb(
            y,
            h,
            &[
                (A101, k1),
                (A104, &k4),
                (A105, &k5),
                (A106, &k6),
                (A107, &k7),
                (A108, &k8),
                (A109, &k9),
            ],
        ),
    );
    let k11 = sys.rhs(
        x + C11 * h,
        &comb(
            y,
            h,
            &[
                (A111, k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        ),
    );
    let yy1 = comb(
        y,
        h,
        &[
            (A121, k1),
            (A124, &k4),
            (A125, &k5),
            (A126, &k6),
            (A127, &k7),
            (A128, &k8),
            (A129, &k9),
            (A1210, &k10),
            (A1211, &k11),
        ],
    );
    let k12 = sys.rhs(x + h, &yy1);
    let mut bsum = [0.0; N];
    for i in 0..N {
        bsum[i] = B1 * k1[i]
            + B6 * k6[i]
            + B7 * k7[i]
            + B8 * k8[i]
            + B9 * k9[i]
            + B10 * k10[i]
            + B11 * k11[i]
            + B12 * k12[i];
    }
    let y_new = comb(y, h, &[(1.0, &bsum)]);
    let Some(ctl) = ctl else {
        return Attempt { y_new, err: 0.0 };
    };
    let mut err = 0.0;
    let mut err2 = 0.0;
    for i in 0..N {
        let sk = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
        let e3 = bsum[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
        err2 += (e3 / sk).powi(2);
        let e5 = ER1 * k1[i]
            + ER6 * k6[i]
            + ER7 * k7[i]
            + ER8 * k8[i]
            + ER9 * k9[i]
            + ER10 * k10[i]
            + ER11 * k11[i]
            + ER12 * k12[i];
        err += (e5 / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();
    Attempt { y_new, err }
}

/// One uncontrolled DOP853 step of size `h` from `(x, y)`.
pub fn single_step<S: OdeSystem<N>, const N: usize>(sys: &S, x: f64, y: &[f64; N], h: f64) -> [f64; N] {
    if h == 0.0 {
        return *y;
    }
    let k1 = sys.rhs(x, y);
    stages(sys, x, y, &k1, h, None).y_new
}

fn rms<const N: usize>(v: &[f64; N], y: &[f64; N], ctl: &StepControl) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sk = ctl.atol + ctl.rtol * y[i].abs();
        s += (v[i] / sk).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Starting step guess following Hairer, Norsett and Wanner.
pub fn initial_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    x: f64,
    y: &[f64; N],
    dir: f64,
    ctl: &StepControl,
) -> f64 {
    let f0 = sys.rhs(x, y);
    let d0 = rms(y, y, ctl);
    let d1 = rms(&f0, y, ctl);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(ctl.h_max);
    let y1 = comb(y, dir * h0, &[(1.0, &f0)]);
    let f1 = sys.rhs(x + dir * h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms(&diff, y, ctl) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(1.0 / 8.0)
    };
    (100.0 * h0).min(h1).min(ctl.h_max)
}

/// Step-by-step driver. Each call to [`Stepper::step`] performs exactly
/// one accepted step; the previous accepted point is kept for dense
/// evaluation and event location.
pub struct Stepper<'a, S, const N: usize> {
    sys: &'a S,
    ctl: StepControl,
    pub x: f64,
    pub y: [f64; N],
    k1: [f64; N],
    h: f64,
    dir: f64,
    pub x_prev: f64,
    pub y_prev: [f64; N],
    steps: usize,
    rejected: bool,
}

impl<'a, S: OdeSystem<N>, const N: usize> Stepper<'a, S, N> {
    /// `dir` is the sign of the direction of integration.
    pub fn new(sys: &'a S, x0: f64, y0: [f64; N], dir: f64, ctl: StepControl) -> Self {
        let dir = if dir < 0.0 { -1.0 } else { 1.0 };
        let h = initial_step(sys, x0, &y0, dir, &ctl);
        Self {
            sys,
            ctl,
            x: x0,
            y: y0,
            k1: sys.rhs(x0, &y0),
            h,
            dir,
            x_prev: x0,
            y_prev: y0,
            steps: 0,
            rejected: false,
        }
    }

    /// Advance by one accepted step without passing `x_end`.
    pub fn step(&mut self, x_end: f64) -> Result<()> {
        let remaining = (x_end - self.x) * self.dir;
        if remaining <= 0.0 {
            return Ok(());
        }
        loop {
            self.steps += 1;
            if self.steps > self.ctl.max_steps {
                return Err(Error::StepUnderflow {
                    x: self.x,
                    t: self.y[0],
                });
            }
            let remaining = (x_end - self.x) * self.dir;
            let mut h = self.h.min(self.ctl.h_max);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h <= 8.0 * f64::EPSILON * self.x.abs().max(1.0) {
                return Err(Error::StepUnderflow {
                    x: self.x,
                    t: self.y[0],
                });
            }
            let hs = h * self.dir;
            let at = stages(self.sys, self.x, &self.y, &self.k1, hs, Some(&self.ctl));
            let fac11 = at.err.powf(1.0 / 8.0);
            if at.err <= 1.0 && at.y_new.iter().all(|v| v.is_finite()) {
                let fac = (fac11 / self.ctl.safe).clamp(1.0 / self.ctl.fac2, 1.0 / self.ctl.fac1);
                let mut h_new = h / fac;
                if self.rejected {
                    h_new = h_new.min(h);
                    self.rejected = false;
                }
                self.x_prev = self.x;
                self.y_prev = self.y;
                self.x = if last { x_end } else { self.x + hs };
                self.y = at.y_new;
                self.k1 = self.sys.rhs(self.x, &self.y);
                if !last || h_new > self.h {
                    self.h = h_new;
                }
                return Ok(());
            }
            let shrink = if at.err.is_finite() {
                (1.0 / self.ctl.fac1).min(fac11 / self.ctl.safe)
            } else {
                10.0
            };
            self.h = h / shrink;
            self.rejected = true;
        }
    }

    /// State at `x` inside the last accepted step.
    pub fn dense(&self, x: f64) -> [f64; N] {
        if x == self.x {
            return self.y;
        }
        single_step(self.sys, self.x_prev, &self.y_prev, x - self.x_prev)
    }

    /// Cut the last step short at `x` (inside it) with state `y`, or move
    /// the current point after an external state change.
    pub fn reset(&mut self, x: f64, y: [f64; N]) {
        self.x = x;
        self.y = y;
        self.k1 = self.sys.rhs(x, &y);
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }
}

/// Integrate from `x0` to `x1` and return the final state.
pub fn solve<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    ctl: StepControl,
) -> Result<[f64; N]> {
    let mut st = Stepper::new(sys, x0, y0, x1 - x0, ctl);
    while st.x != x1 {
        st.step(x1)?;
    }
    Ok(st.y)
}
