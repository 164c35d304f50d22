use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LinkError, MAX_FRAME_LEN};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub loss_probability: f64,
    /// Seconds added to the airtime before delivery.
    pub latency: f64,
    /// Largest fraction of any window spent transmitting.
    pub duty_cycle_max: f64,
    /// Bits per second.
    pub data_rate: f64,
    /// Sliding window for the duty-cycle budget, seconds.
    pub window: f64,
    pub seed: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self { loss_probability: 0.0, latency: 0.5, duty_cycle_max: 0.01, data_rate: 5470.0, window: 60.0, seed: 0 }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<(), LinkError> {
        if !(0.0..=1.0).contains(&self.loss_probability) {
            return Err(LinkError::InvalidConfig("loss probability outside [0, 1]"));
        }
        if !(self.latency >= 0.0 && self.latency.is_finite()) {
            return Err(LinkError::InvalidConfig("latency must be finite and non-negative"));
        }
        if !(self.duty_cycle_max > 0.0 && self.duty_cycle_max <= 1.0) {
            return Err(LinkError::InvalidConfig("duty cycle outside (0, 1]"));
        }
        if !(self.data_rate > 0.0 && self.data_rate.is_finite()) {
            return Err(LinkError::InvalidConfig("data rate must be positive"));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(LinkError::InvalidConfig("window must be positive"));
        }
        if self.airtime(MAX_FRAME_LEN) > self.budget() {
            return Err(LinkError::InvalidConfig("largest frame does not fit the duty-cycle budget"));
        }
        Ok(())
    }

    pub fn airtime(&self, len: usize) -> f64 {
        (len * 8) as f64 / self.data_rate
    }

    /// Transmit seconds allowed per window.
    pub fn budget(&self) -> f64 {
        self.duty_cycle_max * self.window
    }
}

/// Outcome of one send.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub id: u64,
    pub tx_start: f64,
    pub tx_end: f64,
    /// `None` when the channel dropped the frame.
    pub deliver_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub id: u64,
    pub at: f64,
    pub bytes: Vec<u8>,
}

/// One direction of a half-duplex, duty-cycled, lossy radio link.
#[derive(Debug, Clone)]
pub struct LinkSim {
    cfg: LinkConfig,
    rng: ChaCha8Rng,
    /// Past transmissions still inside some window, in time order.
    history: VecDeque<(f64, f64)>,
    in_flight: Vec<Delivery>,
    next_id: u64,
}

const SLACK: f64 = 1e-12;

impl LinkSim {
    pub fn new(cfg: LinkConfig) -> Result<Self, LinkError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            history: VecDeque::new(),
            in_flight: Vec::new(),
            next_id: 0,
        })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    pub fn airtime(&self, len: usize) -> f64 {
        self.cfg.airtime(len)
    }

    /// Airtime overlapping the window `(end - window, end]`.
    pub fn airtime_in_window(&self, end: f64) -> f64 {
        let lo = end - self.cfg.window;
        self.history
            .iter()
            .map(|&(s, e)| (e.min(end) - s.max(lo)).max(0.0))
            .sum()
    }

    fn busy_until(&self) -> f64 {
        self.history.back().map_or(f64::NEG_INFINITY, |&(_, e)| e)
    }

    /// Earliest instant at or after `now` a frame of `len` bytes may start
    /// without any window exceeding the budget.
    pub fn earliest_start(&self, len: usize, now: f64) -> f64 {
        let a = self.airtime(len);
        let l = self.cfg.window;
        let s = now.max(self.busy_until());
        // the window ending with this transmission is the binding one
        let mut need = self.airtime_in_window(s + a) - (self.cfg.budget() - a);
        if need <= SLACK {
            return s;
        }
        let mut lo = s + a - l;
        for &(st, en) in &self.history {
            if en <= lo {
                continue;
            }
            let from = st.max(lo);
            let avail = en - from;
            if avail >= need {
                lo = from + need;
                need = 0.0;
                break;
            }
            need -= avail;
            lo = en;
        }
        debug_assert!(need <= SLACK);
        lo - a + l
    }

    /// Queue `bytes` for transmission. One loss draw per call, so the drop
    /// pattern depends only on the seed and the number of sends.
    pub fn send(&mut self, bytes: Vec<u8>, now: f64) -> Result<Transmission, LinkError> {
        if bytes.len() > MAX_FRAME_LEN {
            return Err(LinkError::Oversize(bytes.len()));
        }
        let tx_start = self.earliest_start(bytes.len(), now);
        let tx_end = tx_start + self.airtime(bytes.len());
        let u = (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let dropped = u < self.cfg.loss_probability;
        self.history.push_back((tx_start, tx_end));
        let horizon = tx_start - self.cfg.window;
        while self.history.front().is_some_and(|&(_, e)| e <= horizon) {
            self.history.pop_front();
        }
        let id = self.next_id;
        self.next_id += 1;
        let deliver_at = (!dropped).then_some(tx_end + self.cfg.latency);
        if let Some(at) = deliver_at {
            let pos = self.in_flight.partition_point(|d| d.at <= at);
            self.in_flight.insert(pos, Delivery { id, at, bytes });
        }
        Ok(Transmission { id, tx_start, tx_end, deliver_at })
    }

    /// Frames whose delivery time is at or before `now`, in delivery order.
    pub fn poll(&mut self, now: f64) -> Vec<Delivery> {
        let n = self.in_flight.partition_point(|d| d.at <= now);
        self.in_flight.drain(..n).collect()
    }

    pub fn next_delivery_at(&self) -> Option<f64> {
        self.in_flight.first().map(|d| d.at)
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.len()
    }
}
