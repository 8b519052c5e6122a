use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::Deserialize;

use super::{dephasing_channel, detuned_rotation, ur14_phases, NoiseModel};
use crate::circuits::{rz_pulses_in_time_order, u_zz, PreparationAngles, Pulse, RzSign};
use crate::error::{invalid, Error, Result};
use crate::qsim::{QuantumState, Unitary, C64};

/// Coincidence tolerance for event times, in seconds.
const TIME_TOL: f64 = 1e-14;

/// Largest accepted |J·τ − π/2| before the coupling is recalibrated to π/(2τ).
pub const ZZ_CALIBRATION_TOL: f64 = 2e-3;

/// Gate: pulses are instantaneous. Pulse: each pulse lasts angle/Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    #[default]
    Gate,
    Pulse,
}

impl std::str::FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gate" => Ok(Fidelity::Gate),
            "pulse" => Ok(Fidelity::Pulse),
            other => Err(invalid(format!("unknown fidelity level {other:?} (expected gate or pulse)"))),
        }
    }
}

impl std::fmt::Display for Fidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Fidelity::Gate => "gate",
            Fidelity::Pulse => "pulse",
        })
    }
}

/// π-pulse train placed in the ZZ window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DdSequence {
    #[default]
    Ur14,
    /// Same pulse count, every phase 0.
    ConstantPhase,
    /// No pulses: bare ZZ evolution.
    None,
}

impl DdSequence {
    fn phase(&self, index: usize) -> f64 {
        match self {
            DdSequence::Ur14 => ur14_phases()[index % 14],
            DdSequence::ConstantPhase | DdSequence::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Ω, rad/s.
    pub rabi: f64,
    /// ZZ evolution time, s.
    pub tau: f64,
    /// J, rad/s.
    pub coupling: f64,
    /// Number of 14-pulse sets in the ZZ window.
    pub dd_sets: u32,
    pub sequence: DdSequence,
}

impl Default for PulseParams {
    fn default() -> Self {
        PulseParams {
            rabi: 2.0 * PI * 20.92e3,
            tau: 4.24e-3,
            coupling: 2.0 * PI * 59.0,
            dd_sets: 10,
            sequence: DdSequence::Ur14,
        }
    }
}

impl PulseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(Error::Schedule(format!("Rabi frequency {} must be positive", self.rabi)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Schedule(format!("ZZ time {} must be positive", self.tau)));
        }
        let angle = self.coupling * self.tau;
        if (angle - FRAC_PI_2).abs() > ZZ_CALIBRATION_TOL {
            return Err(Error::Schedule(format!("J·τ = {angle:.6} is not π/2 within {ZZ_CALIBRATION_TOL}")));
        }
        Ok(())
    }

    /// Coupling that accumulates exactly π/2 over τ.
    pub fn calibrated_coupling(&self) -> f64 {
        FRAC_PI_2 / self.tau
    }

    /// π-pulses per qubit in one ZZ window.
    pub fn window_pulses(&self) -> usize {
        match self.sequence {
            DdSequence::None => 0,
            _ => 14 * self.dd_sets as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    RfPulse {
        qubit: usize,
        angle: f64,
        phase: f64,
        start: f64,
        duration: f64,
    },
    ZzSegment {
        start: f64,
        duration: f64,
        coupling: f64,
    },
    /// One dephasing step on every qubit.
    Dephasing {
        time: f64,
    },
}

impl Event {
    pub fn start(&self) -> f64 {
        match *self {
            Event::RfPulse { start, .. } | Event::ZzSegment { start, .. } => start,
            Event::Dephasing { time } => time,
        }
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Event::RfPulse { duration, .. } | Event::ZzSegment { duration, .. } => duration,
            Event::Dephasing { .. } => 0.0,
        }
    }

    pub fn end(&self) -> f64 {
        self.start() + self.duration()
    }
}

fn overlaps(a: &Event, b: &Event) -> bool {
    a.start() < b.end() - TIME_TOL && b.start() < a.end() - TIME_TOL
}

/// Time-ordered RF pulses, ZZ segments and dephasing checkpoints on two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    rabi: f64,
    events: Vec<Event>,
}

impl PulseSchedule {
    pub fn new(rabi: f64, events: Vec<Event>) -> Result<Self> {
        let s = PulseSchedule { rabi, events };
        s.validate()?;
        Ok(s)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.events.iter().map(Event::end).fold(0.0, f64::max)
    }

    /// Σ J·duration over ZZ segments.
    pub fn total_zz_angle(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match *e {
                Event::ZzSegment { duration, coupling, .. } => duration * coupling,
                _ => 0.0,
            })
            .sum()
    }

    pub fn pulse_count(&self, qubit: usize) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::RfPulse { qubit: q, .. } if *q == qubit)).count()
    }

    /// Pulses on `qubit` with area π that start inside a ZZ window.
    pub fn window_pi_pulses(&self, qubit: usize) -> usize {
        let segments: Vec<&Event> = self.events.iter().filter(|e| matches!(e, Event::ZzSegment { .. })).collect();
        let (Some(first), Some(last)) = (segments.first(), segments.last()) else {
            return 0;
        };
        let (lo, hi) = (first.start(), last.end());
        self.events
            .iter()
            .filter(|e| match **e {
                Event::RfPulse { qubit: q, angle, start, .. } => {
                    q == qubit && (angle - PI).abs() < 1e-12 && start >= lo && start <= hi
                }
                _ => false,
            })
            .count()
    }

    /// Rejects negative times, overlapping pulses on a qubit, overlapping
    /// ZZ segments, and RF pulses during ZZ evolution.
    pub fn validate(&self) -> Result<()> {
        if !(self.rabi > 0.0) {
            return Err(Error::Schedule(format!("Rabi frequency {} must be positive", self.rabi)));
        }
        for (i, e) in self.events.iter().enumerate() {
            if !(e.start() >= 0.0 && e.duration() >= 0.0 && e.end().is_finite()) {
                return Err(Error::Schedule(format!("event {i} has invalid timing")));
            }
            if let Event::RfPulse { qubit, .. } = e {
                if *qubit > 1 {
                    return Err(Error::Schedule(format!("event {i} targets qubit {qubit}")));
                }
            }
        }
        for (i, a) in self.events.iter().enumerate() {
            for (j, b) in self.events.iter().enumerate().skip(i + 1) {
                let clash = match (a, b) {
                    (Event::RfPulse { qubit: qa, .. }, Event::RfPulse { qubit: qb, .. }) => qa == qb && overlaps(a, b),
                    (Event::ZzSegment { .. }, Event::ZzSegment { .. })
                    | (Event::RfPulse { .. }, Event::ZzSegment { .. })
                    | (Event::ZzSegment { .. }, Event::RfPulse { .. }) => overlaps(a, b),
                    _ => false,
                };
                if clash {
                    return Err(Error::Schedule(format!("events {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }
}

struct Builder {
    rabi: f64,
    fidelity: Fidelity,
    t: f64,
    events: Vec<Event>,
}

impl Builder {
    fn new(params: &PulseParams, fidelity: Fidelity) -> Self {
        Builder { rabi: params.rabi, fidelity, t: 0.0, events: Vec::new() }
    }

    fn pulse_duration(&self, angle: f64) -> f64 {
        match self.fidelity {
            Fidelity::Gate => 0.0,
            Fidelity::Pulse => angle / self.rabi,
        }
    }

    /// Pulse trains on both qubits starting together; each train runs
    /// back to back.
    fn parallel(&mut self, trains: [&[Pulse]; 2]) {
        let mut end = self.t;
        for (qubit, train) in trains.iter().enumerate() {
            let mut t = self.t;
            for p in train.iter().map(Pulse::normalized) {
                let duration = self.pulse_duration(p.angle);
                self.events.push(Event::RfPulse { qubit, angle: p.angle, phase: p.phase, start: t, duration });
                t += duration;
            }
            end = end.max(t);
        }
        self.t = end;
    }

    fn zz(&mut self, duration: f64, coupling: f64) {
        self.events.push(Event::ZzSegment { start: self.t, duration, coupling });
        self.t += duration;
    }

    /// ZZ evolution of total length τ interrupted by simultaneous π-pulses on
    /// both qubits; gaps are τ/(2n), τ/n, …, τ/n, τ/(2n).
    fn zz_window(&mut self, params: &PulseParams) {
        let coupling = params.calibrated_coupling();
        let n = params.window_pulses();
        if n == 0 {
            self.zz(params.tau, coupling);
            return;
        }
        let gap = params.tau / n as f64;
        self.zz(gap / 2.0, coupling);
        for m in 0..n {
            let pulse = Pulse::new(PI, params.sequence.phase(m));
            self.parallel([&[pulse], &[pulse]]);
            self.zz(if m + 1 < n { gap } else { gap / 2.0 }, coupling);
        }
    }

    fn dephasing(&mut self) {
        self.events.push(Event::Dephasing { time: self.t });
    }

    fn finish(self) -> Result<PulseSchedule> {
        PulseSchedule::new(self.rabi, self.events)
    }
}

/// The dephasing-free ZZ window alone, starting at t = 0.
pub fn compile_zz_window(params: &PulseParams, fidelity: Fidelity) -> Result<PulseSchedule> {
    params.validate()?;
    let mut b = Builder::new(params, fidelity);
    b.zz_window(params);
    b.finish()
}

/// U_P = R₁(θ₁, π/2) R₂(θ₂, π/2) as two simultaneous pulses.
pub fn compile_prep_schedule(
    angles: &PreparationAngles,
    params: &PulseParams,
    fidelity: Fidelity,
) -> Result<PulseSchedule> {
    params.validate()?;
    let mut b = Builder::new(params, fidelity);
    b.parallel([&[Pulse::new(angles.theta1(), FRAC_PI_2)], &[Pulse::new(angles.theta2(), FRAC_PI_2)]]);
    b.finish()
}

/// One diffusion step D as native operations: single-qubit pulses, the
/// decoupled ZZ window, a dephasing checkpoint, the composite-pulse R_z
/// rotations and the closing single-qubit pulses.
pub fn compile_diffusion_schedule(
    angles: &PreparationAngles,
    params: &PulseParams,
    fidelity: Fidelity,
) -> Result<PulseSchedule> {
    params.validate()?;
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let mut b = Builder::new(params, fidelity);
    b.parallel([&[Pulse::new(t1, FRAC_PI_2)], &[Pulse::new(-t2, FRAC_PI_2)]]);
    b.zz_window(params);
    b.dephasing();
    let mut q0: Vec<Pulse> = rz_pulses_in_time_order(RzSign::Plus).to_vec();
    q0.push(Pulse::new(t1, FRAC_PI_2));
    let mut q1: Vec<Pulse> = rz_pulses_in_time_order(RzSign::Minus).to_vec();
    q1.push(Pulse::new(t2, FRAC_PI_2));
    b.parallel([&q0, &q1]);
    b.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleOp {
    Unitary(Unitary),
    Dephase,
}

/// A schedule reduced to coherent propagators separated by dephasing steps.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledSchedule {
    ops: Vec<ScheduleOp>,
}

fn single(qubit: usize, m: &DMatrix<C64>) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(2, 2);
    if qubit == 0 {
        m.kronecker(&id)
    } else {
        id.kronecker(m)
    }
}

/// exp(i t H) for Hermitian H.
fn propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let dim = h.nrows();
    let off_diagonal = (0..dim).any(|i| (0..dim).any(|j| i != j && h[(i, j)] != C64::new(0.0, 0.0)));
    if !off_diagonal {
        let d: Vec<C64> = (0..dim).map(|i| C64::from_polar(1.0, h[(i, i)].re * t)).collect();
        return DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
    }
    let eig = h.clone().symmetric_eigen();
    let phases = eig.eigenvalues.map(|w| C64::from_polar(1.0, w * t));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

impl CompiledSchedule {
    pub fn compile(schedule: &PulseSchedule, detuning: f64) -> Result<Self> {
        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        let z1 = single(0, &z);
        let z2 = single(1, &z);
        let zz = &z1 * &z2;
        let drift = (&z1 + &z2) * C64::new(detuning * schedule.rabi() / 2.0, 0.0);

        let events = schedule.events();
        let mut bounds: Vec<f64> = events.iter().flat_map(|e| [e.start(), e.end()]).collect();
        bounds.push(0.0);
        bounds.sort_by(f64::total_cmp);
        bounds.dedup_by(|a, b| (*a - *b).abs() <= TIME_TOL);

        let instantaneous: Vec<&Event> =
            events.iter().filter(|e| matches!(e, Event::Dephasing { .. }) || e.duration() <= TIME_TOL).collect();

        let mut ops = Vec::new();
        let mut current = DMatrix::<C64>::identity(4, 4);
        for (w, &t) in bounds.iter().enumerate() {
            for e in instantaneous.iter().filter(|e| (e.start() - t).abs() <= TIME_TOL) {
                match **e {
                    Event::RfPulse { qubit, angle, phase, .. } => {
                        current = single(qubit, detuned_rotation(angle, phase, detuning).matrix()) * current;
                    }
                    Event::Dephasing { .. } => {
                        let done = std::mem::replace(&mut current, DMatrix::identity(4, 4));
                        ops.push(ScheduleOp::Unitary(Unitary::from_matrix_unchecked(done)));
                        ops.push(ScheduleOp::Dephase);
                    }
                    Event::ZzSegment { .. } => {}
                }
            }
            let Some(&next) = bounds.get(w + 1) else { break };
            let dt = next - t;
            let mut h = drift.clone();
            for e in events.iter().filter(|e| e.duration() > TIME_TOL) {
                if e.start() > t + TIME_TOL || e.end() < next - TIME_TOL {
                    continue;
                }
                match *e {
                    Event::ZzSegment { coupling, .. } => h += &zz * C64::new(coupling / 2.0, 0.0),
                    Event::RfPulse { qubit, angle, phase, duration, .. } => {
                        let rate = angle / duration;
                        let n = DMatrix::from_row_slice(
                            2,
                            2,
                            &[
                                C64::new(0.0, 0.0),
                                C64::from_polar(1.0, phase),
                                C64::from_polar(1.0, -phase),
                                C64::new(0.0, 0.0),
                            ],
                        );
                        h += single(qubit, &n) * C64::new(rate / 2.0, 0.0);
                    }
                    Event::Dephasing { .. } => {}
                }
            }
            current = propagator(&h, dt) * current;
        }
        ops.push(ScheduleOp::Unitary(Unitary::from_matrix_unchecked(current)));
        Ok(CompiledSchedule { ops })
    }

    pub fn ops(&self) -> &[ScheduleOp] {
        &self.ops
    }

    /// Overall propagator, ignoring dephasing checkpoints.
    pub fn unitary(&self) -> Unitary {
        self.ops.iter().fold(Unitary::identity(4), |acc, op| match op {
            ScheduleOp::Unitary(u) => u.mul(&acc),
            ScheduleOp::Dephase => acc,
        })
    }

    /// Dephasing of `gamma_tau` per checkpoint; zero skips the channel so pure
    /// states pass through.
    pub fn apply(&self, state: &QuantumState, gamma_tau: f64) -> Result<QuantumState> {
        let mut s = state.clone();
        for op in &self.ops {
            match op {
                ScheduleOp::Unitary(u) => s = s.evolve(u)?,
                ScheduleOp::Dephase if gamma_tau > 0.0 => {
                    for q in 0..s.n_qubits() {
                        s = dephasing_channel(&s, gamma_tau, q)?;
                    }
                }
                ScheduleOp::Dephase => {}
            }
        }
        Ok(s)
    }
}

/// Time-ordered evolution of `state` under `schedule` with the detuning and
/// dephasing of `noise`. Detection errors are not applied here.
pub fn simulate_schedule(schedule: &PulseSchedule, noise: &NoiseModel, state: &QuantumState) -> Result<QuantumState> {
    CompiledSchedule::compile(schedule, noise.detuning)?.apply(state, noise.dephasing)
}

/// Process fidelity of the ZZ window against U_ZZ(π/2) at a given detuning.
pub fn zz_window_fidelity(params: &PulseParams, fidelity: Fidelity, detuning: f64) -> Result<f64> {
    let window = compile_zz_window(params, fidelity)?;
    let u = CompiledSchedule::compile(&window, detuning)?.unitary();
    Ok(u.process_fidelity(&u_zz(FRAC_PI_2)))
}
