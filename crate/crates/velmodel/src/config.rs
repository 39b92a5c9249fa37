use crate::{GenError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    St,
    Curved,
}

impl Family {
    /// Grid shape contract per family: St 100x100, Curved 150x100.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Family::St => (100, 100),
            Family::Curved => (150, 100),
        }
    }

    pub fn tag(&self) -> u32 {
        match self {
            Family::St => 0,
            Family::Curved => 1,
        }
    }

    pub fn from_tag(tag: u32) -> Result<Self> {
        match tag {
            0 => Ok(Family::St),
            1 => Ok(Family::Curved),
            other => Err(GenError::InvalidArgument(format!("unknown family tag {other}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::St => "st",
            Family::Curved => "curved",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "st" => Ok(Family::St),
            "curved" => Ok(Family::Curved),
            other => Err(GenError::InvalidArgument(format!("unknown family \"{other}\""))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub family: Family,
    pub nz: usize,
    pub nx: usize,
    pub n_layers_range: (usize, usize),
    pub v_range: (f64, f64),
    /// Interface tilt in cells per column; one dip per model, shared by all
    /// interfaces so layers stay parallel and never cross.
    pub dip_range: (f64, f64),
    /// Layer thickness bounds in rows.
    pub thickness_range: (usize, usize),
    /// Cosine bump amplitude bounds in rows (Curved only; ignored for St).
    pub curve_amplitude_range: (f64, f64),
    pub fault_probability: f64,
    pub fault_throw_range: (usize, usize),
    pub rng_seed: u64,
}

impl GenConfig {
    pub fn st(rng_seed: u64) -> Self {
        Self {
            family: Family::St,
            nz: 100,
            nx: 100,
            n_layers_range: (2, 4),
            v_range: (1500.0, 4500.0),
            dip_range: (-0.25, 0.25),
            thickness_range: (15, 45),
            curve_amplitude_range: (0.0, 0.0),
            fault_probability: 1.0,
            fault_throw_range: (3, 10),
            rng_seed,
        }
    }

    pub fn curved(rng_seed: u64) -> Self {
        Self {
            family: Family::Curved,
            nz: 150,
            nx: 100,
            n_layers_range: (4, 7),
            v_range: (1500.0, 4500.0),
            dip_range: (-0.2, 0.2),
            thickness_range: (14, 32),
            curve_amplitude_range: (2.0, 8.0),
            fault_probability: 1.0,
            fault_throw_range: (3, 10),
            rng_seed,
        }
    }

    pub fn for_family(family: Family, rng_seed: u64) -> Self {
        match family {
            Family::St => Self::st(rng_seed),
            Family::Curved => Self::curved(rng_seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let shape = self.family.shape();
        if (self.nz, self.nx) != shape {
            return Err(GenError::InvalidConfig(format!(
                "family {:?} requires {}x{}, config says {}x{}",
                self.family, shape.0, shape.1, self.nz, self.nx
            )));
        }
        if self.n_layers_range.0 == 0 || self.n_layers_range.0 > self.n_layers_range.1 {
            return Err(GenError::InvalidConfig(format!(
                "bad layer count range {:?}",
                self.n_layers_range
            )));
        }
        if !(self.v_range.0 > 0.0 && self.v_range.0 <= self.v_range.1) {
            return Err(GenError::InvalidConfig(format!("bad velocity range {:?}", self.v_range)));
        }
        if self.dip_range.0 > self.dip_range.1
            || self.thickness_range.0 == 0
            || self.thickness_range.0 > self.thickness_range.1
            || self.curve_amplitude_range.0 > self.curve_amplitude_range.1
        {
            return Err(GenError::InvalidConfig("empty parameter range".into()));
        }
        if !(0.0..=1.0).contains(&self.fault_probability) {
            return Err(GenError::InvalidConfig(format!(
                "fault probability {} outside [0, 1]",
                self.fault_probability
            )));
        }
        if self.fault_throw_range.0 == 0 || self.fault_throw_range.0 > self.fault_throw_range.1 {
            return Err(GenError::InvalidConfig(format!(
                "bad fault throw range {:?}",
                self.fault_throw_range
            )));
        }
        Ok(())
    }
}
