//! Frame and group tables.
//!
//! A frame file has the header `frame_id,person_id,x,y,theta` and one row
//! per person; `theta` is in radians. A group file has the header
//! `frame_id,members` and one row per group with `;`-joined person ids. A
//! row with empty `members` records a frame without groups, so detection
//! output lists every frame it saw.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use gcff_core::synth::SweepPoint;
use gcff_core::{Group, GroupSet, Person, PersonId, Scene};

use crate::{Error, Result};

pub const FRAME_HEADER: [&str; 5] = ["frame_id", "person_id", "x", "y", "theta"];
pub const GROUP_HEADER: [&str; 2] = ["frame_id", "members"];

/// Groups of one frame, as read from or written to a group file.
pub type FrameGroups = (String, GroupSet);

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(false)
        .flexible(true)
        .from_reader(input)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn check_header(records: &mut csv::StringRecordsIter<'_, impl Read>, expected: &[&str]) -> Result<bool> {
    match records.next() {
        None => Ok(false),
        Some(record) => {
            let record = record?;
            if record.iter().eq(expected.iter().copied()) {
                Ok(true)
            } else {
                Err(Error::Parse {
                    line: line_of(&record),
                    msg: format!("expected header `{}`", expected.join(",")),
                })
            }
        }
    }
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, k: usize, name: &str) -> Result<T> {
    let raw = record.get(k).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line: line_of(record),
        msg: format!("bad {name} `{raw}`"),
    })
}

/// Reads scenes from a frame table: one scene per distinct frame id in
/// order of first appearance, persons in row order. An empty input has no
/// frames.
pub fn parse_frames<R: Read>(input: R) -> Result<Vec<Scene>> {
    let mut rdr = reader(input);
    let mut records = rdr.records();
    if !check_header(&mut records, &FRAME_HEADER)? {
        return Ok(Vec::new());
    }
    let mut order: Vec<String> = Vec::new();
    let mut persons: HashMap<String, Vec<Person>> = HashMap::new();
    for record in records {
        let record = record?;
        let line = line_of(&record);
        if record.len() != FRAME_HEADER.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", FRAME_HEADER.len(), record.len()),
            });
        }
        let frame = record[0].to_string();
        if frame.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty frame id".into(),
            });
        }
        let id: u64 = field(&record, 1, "person id")?;
        let person = Person::new(
            id,
            field(&record, 2, "x")?,
            field(&record, 3, "y")?,
            field(&record, 4, "theta")?,
        )
        .map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        let list = persons.entry(frame.clone()).or_insert_with(|| {
            order.push(frame.clone());
            Vec::new()
        });
        if list.iter().any(|p| p.id == person.id) {
            return Err(Error::Parse {
                line,
                msg: format!("person {id} appears twice in frame `{frame}`"),
            });
        }
        list.push(person);
    }
    order
        .into_iter()
        .map(|frame| {
            let list = persons.remove(&frame).unwrap_or_default();
            Ok(Scene::new(frame, list)?)
        })
        .collect()
}

/// Writes scenes in canonical form: shortest round-trip decimal floats and
/// `theta` normalised to `[0, 2π)`.
pub fn write_frames<W: Write>(output: W, scenes: &[Scene]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    wtr.write_record(FRAME_HEADER)?;
    for scene in scenes {
        for p in scene.persons() {
            wtr.write_record([
                scene.frame_id.clone(),
                p.id.0.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                p.theta().to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a group table, frames in order of first appearance.
pub fn parse_groups<R: Read>(input: R) -> Result<Vec<FrameGroups>> {
    let mut rdr = reader(input);
    let mut records = rdr.records();
    if !check_header(&mut records, &GROUP_HEADER)? {
        return Ok(Vec::new());
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<(u64, Group)>> = HashMap::new();
    for record in records {
        let record = record?;
        let line = line_of(&record);
        if record.len() != GROUP_HEADER.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", GROUP_HEADER.len(), record.len()),
            });
        }
        let frame = record[0].to_string();
        if frame.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty frame id".into(),
            });
        }
        let list = groups.entry(frame.clone()).or_insert_with(|| {
            order.push(frame.clone());
            Vec::new()
        });
        if record[1].is_empty() {
            continue;
        }
        let members = record[1]
            .split(';')
            .map(|m| {
                m.trim().parse::<u64>().map(PersonId).map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad member id `{m}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let group = Group::new(members).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        list.push((line, group));
    }
    order
        .into_iter()
        .map(|frame| {
            let list = groups.remove(&frame).unwrap_or_default();
            let last_line = list.last().map_or(0, |(l, _)| *l);
            let set = GroupSet::new(list.into_iter().map(|(_, g)| g)).map_err(|e| Error::Parse {
                line: last_line,
                msg: format!("frame `{frame}`: {e}"),
            })?;
            Ok((frame, set))
        })
        .collect()
}

/// Writes one row per group; frames without groups get a single row with
/// empty members.
pub fn write_groups<W: Write>(output: W, frames: &[FrameGroups]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    wtr.write_record(GROUP_HEADER)?;
    for (frame, set) in frames {
        if set.is_empty() {
            wtr.write_record([frame.as_str(), ""])?;
        }
        for g in set.iter() {
            let members: Vec<String> = g.members().iter().map(|m| m.0.to_string()).collect();
            wtr.write_record([frame.clone(), members.join(";")])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Sets each scene's ground truth from `groups`. Scenes with no entry get
/// an empty ground truth; groups for unknown frames or persons are errors.
pub fn attach_groups(scenes: &mut [Scene], groups: &[FrameGroups]) -> Result<()> {
    let mut by_frame: HashMap<&str, &GroupSet> = HashMap::new();
    for (frame, set) in groups {
        by_frame.insert(frame.as_str(), set);
    }
    let known: std::collections::HashSet<&str> = scenes.iter().map(|s| s.frame_id.as_str()).collect();
    let mut unknown: Vec<&str> = by_frame.keys().copied().filter(|f| !known.contains(f)).collect();
    if !unknown.is_empty() {
        unknown.sort_unstable();
        return Err(Error::UnmatchedFrames(unknown.iter().map(|s| s.to_string()).collect()));
    }
    for scene in scenes.iter_mut() {
        let set = by_frame
            .get(scene.frame_id.as_str())
            .map_or_else(GroupSet::empty, |s| (*s).clone());
        for g in set.iter() {
            if let Some(&id) = g.members().iter().find(|&&m| scene.index_of(m).is_none()) {
                return Err(Error::DanglingMember {
                    frame: scene.frame_id.clone(),
                    person: id.0,
                });
            }
        }
        scene.set_ground_truth(Some(set))?;
    }
    Ok(())
}

/// Pairs ground-truth and detected groups frame by frame, in ground-truth
/// order. Both tables must list the same frames.
pub fn align_frames(gt: &[FrameGroups], det: &[FrameGroups]) -> Result<Vec<(String, GroupSet, GroupSet)>> {
    let det_map: HashMap<&str, &GroupSet> = det.iter().map(|(f, s)| (f.as_str(), s)).collect();
    let gt_map: HashMap<&str, &GroupSet> = gt.iter().map(|(f, s)| (f.as_str(), s)).collect();
    let mut unmatched: Vec<String> = gt
        .iter()
        .filter(|(f, _)| !det_map.contains_key(f.as_str()))
        .chain(det.iter().filter(|(f, _)| !gt_map.contains_key(f.as_str())))
        .map(|(f, _)| f.clone())
        .collect();
    if !unmatched.is_empty() {
        unmatched.sort();
        unmatched.dedup();
        return Err(Error::UnmatchedFrames(unmatched));
    }
    Ok(gt
        .iter()
        .map(|(f, g)| (f.clone(), g.clone(), det_map[f.as_str()].clone()))
        .collect())
}

/// Writes a noise curve as `level,f1` rows.
pub fn write_curve<W: Write>(output: W, curve: &[SweepPoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    wtr.write_record(["level", "f1"])?;
    for point in curve {
        wtr.write_record([point.level.to_string(), point.f1.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_frames(path: &Path) -> Result<Vec<Scene>> {
    parse_frames(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn read_groups(path: &Path) -> Result<Vec<FrameGroups>> {
    parse_groups(File::open(path).map_err(|e| Error::io(path, e))?)
}
