//! Frame-to-frame association of nuclei.
//!
//! A current nucleus is linked to a previous one only when, across both
//! containment searches (previous bounding box holding the current centroid,
//! current bounding box holding the previous centroid), exactly one previous
//! nucleus turns up. Anything else ends the track: there is no re-entry and no
//! new track is born after the first frame.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::regions::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Live,
    Excluded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub frame: usize,
    pub region: Region,
}

/// One nucleus followed over time.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u32,
    pub history: Vec<Observation>,
    pub status: TrackStatus,
}

impl Track {
    pub fn is_live(&self) -> bool {
        self.status == TrackStatus::Live
    }

    pub fn birth_frame(&self) -> usize {
        self.history.first().map_or(0, |o| o.frame)
    }

    pub fn last(&self) -> Option<&Observation> {
        self.history.last()
    }

    /// Observation at `frame`, if the track was alive then.
    pub fn at(&self, frame: usize) -> Option<&Observation> {
        let first = self.history.first()?.frame;
        self.history
            .get(frame.checked_sub(first)?)
            .filter(|o| o.frame == frame)
    }
}

/// Links decided for one pair of consecutive frames.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrameAssociation {
    /// `(previous label, current label)`
    pub matches: Vec<(u32, u32)>,
    /// Current labels without a unique partner.
    pub exclusions: Vec<u32>,
}

/// Previous regions whose bounding box contains the centroid of `current`.
pub fn candidates_bbox_contains_centroid<'a>(
    prev_regions: &'a [Region],
    current: &Region,
) -> Vec<&'a Region> {
    prev_regions
        .iter()
        .filter(|p| p.bbox.contains(current.centroid))
        .collect()
}

/// Previous regions whose centroid lies in the bounding box of `current`.
pub fn candidates_centroid_in_bbox<'a>(
    prev_regions: &'a [Region],
    current: &Region,
) -> Vec<&'a Region> {
    prev_regions
        .iter()
        .filter(|p| current.bbox.contains(p.centroid))
        .collect()
}

fn check_unique_labels(regions: &[Region]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in regions {
        if !seen.insert(r.label) {
            return Err(Error::DuplicateLabel(r.label));
        }
    }
    Ok(())
}

/// Matches current regions to previous ones.
///
/// A previous region claimed by more than one current region voids all of
/// those claims.
pub fn associate_frame(
    prev_regions: &[Region],
    curr_regions: &[Region],
) -> Result<FrameAssociation> {
    check_unique_labels(prev_regions)?;
    check_unique_labels(curr_regions)?;

    let mut tentative: Vec<(u32, u32)> = Vec::new();
    let mut exclusions = Vec::new();
    for curr in curr_regions {
        let mut union: BTreeSet<u32> = candidates_bbox_contains_centroid(prev_regions, curr)
            .into_iter()
            .map(|r| r.label)
            .collect();
        union.extend(
            candidates_centroid_in_bbox(prev_regions, curr)
                .into_iter()
                .map(|r| r.label),
        );
        match union.len() {
            1 => tentative.push((*union.first().unwrap(), curr.label)),
            _ => exclusions.push(curr.label),
        }
    }

    let mut claims: BTreeMap<u32, usize> = BTreeMap::new();
    for &(prev, _) in &tentative {
        *claims.entry(prev).or_default() += 1;
    }
    let mut matches = Vec::new();
    for (prev, curr) in tentative {
        if claims[&prev] == 1 {
            matches.push((prev, curr));
        } else {
            exclusions.push(curr);
        }
    }
    // Keep exclusions in the order of the current region list.
    exclusions.sort_by_key(|l| curr_regions.iter().position(|r| r.label == *l));
    Ok(FrameAssociation {
        matches,
        exclusions,
    })
}

/// Advances the track list by one frame.
///
/// At frame 0 every region starts a Live track (ids from 1 in region order).
/// Afterwards matched regions extend the Live track owning the previous
/// label and every other Live track becomes Excluded.
pub fn update_tracks(
    mut tracks: Vec<Track>,
    association: &FrameAssociation,
    curr_regions: &[Region],
    frame_index: usize,
) -> Result<Vec<Track>> {
    if frame_index == 0 {
        if !tracks.is_empty() {
            return Err(Error::InvalidParameter("frame 0 must start from no tracks"));
        }
        return Ok(curr_regions
            .iter()
            .enumerate()
            .map(|(i, r)| Track {
                id: i as u32 + 1,
                history: alloc::vec![Observation {
                    frame: 0,
                    region: r.clone(),
                }],
                status: TrackStatus::Live,
            })
            .collect());
    }

    let expected = frame_index - 1;
    let mut owner: BTreeMap<u32, usize> = BTreeMap::new();
    for (i, t) in tracks.iter().enumerate().filter(|(_, t)| t.is_live()) {
        let last = t.last().expect("live track has history");
        if last.frame != expected {
            return Err(Error::FrameOrder {
                expected_after: last.frame,
                found: frame_index,
            });
        }
        owner.insert(last.region.label, i);
    }

    let mut extended = alloc::vec![false; tracks.len()];
    for &(prev, curr) in &association.matches {
        let &i = owner.get(&prev).ok_or(Error::UnknownTrack(prev))?;
        let region = curr_regions
            .iter()
            .find(|r| r.label == curr)
            .ok_or(Error::MissingLabel(curr))?;
        tracks[i].history.push(Observation {
            frame: frame_index,
            region: region.clone(),
        });
        extended[i] = true;
    }
    for (t, ext) in tracks.iter_mut().zip(extended) {
        if t.is_live() && !ext {
            t.status = TrackStatus::Excluded;
        }
    }
    Ok(tracks)
}

/// Sequential track bookkeeping over a stream of per-frame region lists.
#[derive(Debug, Clone, Default)]
pub struct Tracker {
    tracks: Vec<Track>,
    next_frame: usize,
}

impl Tracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds the regions of the next frame. Only regions carried by Live
    /// tracks take part in the search; excluded nuclei never come back.
    pub fn push_frame(&mut self, regions: &[Region]) -> Result<FrameAssociation> {
        let frame = self.next_frame;
        let association = if frame == 0 {
            FrameAssociation {
                matches: Vec::new(),
                exclusions: Vec::new(),
            }
        } else {
            let prev: Vec<Region> = self
                .tracks
                .iter()
                .filter(|t| t.is_live())
                .filter_map(|t| t.last().map(|o| o.region.clone()))
                .collect();
            associate_frame(&prev, regions)?
        };
        let tracks = core::mem::take(&mut self.tracks);
        self.tracks = update_tracks(tracks, &association, regions, frame)?;
        self.next_frame += 1;
        Ok(association)
    }

    pub fn frames_seen(&self) -> usize {
        self.next_frame
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn live_count(&self) -> usize {
        self.tracks.iter().filter(|t| t.is_live()).count()
    }

    pub fn into_tracks(self) -> Vec<Track> {
        self.tracks
    }
}
