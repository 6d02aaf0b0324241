//! Thread-pool drivers. Each trial or pose depends only on its index, and
//! results are collected in index order, so output does not depend on the
//! thread count.

use rayon::prelude::*;
use tandemgrip_core::cam::{self, CamError, CamTrackSpec, PathReport};
use tandemgrip_core::pick::{Campaign, CampaignResult};

use crate::Error;

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Usage("--threads must be at least 1".to_string()));
        }
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))
}

/// Runs `trials` trials (at least one) on `threads` workers, or rayon's
/// default when `None`.
pub fn run_campaign(
    campaign: &Campaign,
    trials: usize,
    threads: Option<usize>,
) -> Result<CampaignResult, Error> {
    let records = pool(threads)?.install(|| {
        (0..trials.max(1) as u64)
            .into_par_iter()
            .map(|i| campaign.simulate_trial(i))
            .collect()
    });
    Ok(CampaignResult::from_records(records))
}

/// Same report as [`cam::validate_path`], with poses solved in parallel.
pub fn validate_path(
    spec: &CamTrackSpec,
    samples: usize,
    threads: Option<usize>,
) -> Result<PathReport, Error> {
    let poses = sample_poses(spec, samples, threads)?;
    Ok(cam::report_from_poses(spec, &poses))
}

pub fn sample_poses(
    spec: &CamTrackSpec,
    samples: usize,
    threads: Option<usize>,
) -> Result<Vec<cam::FingerPose>, Error> {
    if samples < 2 {
        return Err(CamError::InvalidInput("at least two samples are needed").into());
    }
    let poses = pool(threads)?.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| cam::solve_finger_pose(spec, i as f64 / (samples - 1) as f64))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(poses)
}
