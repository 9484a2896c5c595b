//! Fast double bootstrap with the outer replications spread over rayon.

use gdsur_core::bootstrap::{fdb_draw, fdb_outcome, fdb_setup, fdb_stream};
use gdsur_core::dgp::Panel;
use gdsur_core::inference::{LinearRestriction, TestOutcome};
use gdsur_core::{Error, Result, RngStream};
use rayon::prelude::*;

/// Same result as [`gdsur_core::bootstrap::fdb_test`], computed in parallel.
pub fn fdb_test_par(panel: &Panel, restr: &LinearRestriction, p: usize, b1: usize, stream: RngStream) -> Result<TestOutcome> {
    if b1 == 0 {
        return Err(Error::InvalidParams("b1 must be positive".into()));
    }
    let (w, gen) = fdb_setup(panel, restr, p)?;
    let t = panel.t();
    let draws: Vec<_> = (0..b1).into_par_iter().map(|b| fdb_draw(&gen, t, p, restr, fdb_stream(stream, b))).collect();
    fdb_outcome(w, p, draws)
}
