use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::alignment::diagonal_alignment;
use crate::corpus::{load_alignment, write_alignment, AlignmentEntry, AlignmentSource, MeetingBundle, SegmentAlignment};
use crate::error::{Error, Result};
use crate::fsio;
use crate::gridsearch::AlignConfig;
use crate::metrics::annotator_score;
use crate::pipeline::align_meeting;
use crate::similarity::EmbeddingTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Open,
    Submitted,
}

/// One meeting under annotation. Sessions are immutable snapshots; every
/// accepted write replaces the whole value.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSession {
    pub meeting_id: String,
    pub pre_alignment: SegmentAlignment,
    pub working_alignment: SegmentAlignment,
    pub revision: u64,
    pub status: SessionStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SentenceView {
    pub id: usize,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptionSegmentView {
    pub id: usize,
    pub sentences: Vec<SentenceView>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSegmentView {
    pub id: usize,
    pub speaker: Option<String>,
    pub sentences: Vec<SentenceView>,
}

/// Everything needed to render a meeting side by side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeetingView {
    pub meeting_id: String,
    pub transcription: Vec<TranscriptionSegmentView>,
    pub report: Vec<ReportSegmentView>,
    pub pre_alignment: SegmentAlignment,
    pub working_alignment: SegmentAlignment,
    pub revision: u64,
    pub status: SessionStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeetingSummary {
    pub meeting_id: String,
    pub transcription_segments: usize,
    pub report_segments: usize,
    /// `None` until the meeting is first opened.
    pub status: Option<SessionStatus>,
    pub revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingProgress {
    pub meeting_id: String,
    pub annotator_score: f64,
    pub status: SessionStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub per_meeting: Vec<MeetingProgress>,
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SessionIndexEntry {
    revision: u64,
    status: SessionStatus,
}

/// Meetings, their sessions and the on-disk state directory.
///
/// The state directory holds `<id>.pre.json` and `<id>.working.json`
/// alignment files, `<id>.gold.json` once submitted, and `sessions.json`
/// mapping each meeting to its revision and status.
pub struct AnnotationStore {
    meetings: BTreeMap<String, Arc<MeetingBundle>>,
    state_dir: PathBuf,
    config: Option<AlignConfig>,
    embeddings: Option<Arc<EmbeddingTable>>,
    sessions: RwLock<BTreeMap<String, Arc<AnnotationSession>>>,
    // serializes writers; readers only take the snapshot lock briefly
    write_lock: Mutex<()>,
}

impl std::fmt::Debug for AnnotationStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnnotationStore")
            .field("meetings", &self.meetings.len())
            .field("state_dir", &self.state_dir)
            .finish()
    }
}

impl AnnotationStore {
    /// Builds a store over in-memory meetings and restores any sessions
    /// saved in `state_dir`. Pre-alignments use `config`, or the diagonal
    /// baseline without one.
    pub fn new(
        meetings: Vec<MeetingBundle>,
        state_dir: &Path,
        config: Option<AlignConfig>,
        embeddings: Option<Arc<EmbeddingTable>>,
    ) -> Result<Self> {
        if let Some(c) = &config {
            c.validate()?;
        }
        std::fs::create_dir_all(state_dir).map_err(|e| Error::io(state_dir, e))?;
        let mut by_id = BTreeMap::new();
        for m in meetings {
            if by_id.contains_key(&m.meeting_id) {
                return Err(Error::validation(format!("duplicate meeting id {}", m.meeting_id)));
            }
            by_id.insert(m.meeting_id.clone(), Arc::new(m));
        }
        let store = AnnotationStore {
            meetings: by_id,
            state_dir: state_dir.to_path_buf(),
            config,
            embeddings,
            sessions: RwLock::new(BTreeMap::new()),
            write_lock: Mutex::new(()),
        };
        store.restore()?;
        Ok(store)
    }

    /// Loads every subdirectory of `corpus_dir` holding a meeting.
    pub fn open(
        corpus_dir: &Path,
        state_dir: &Path,
        config: Option<AlignConfig>,
        embeddings: Option<Arc<EmbeddingTable>>,
    ) -> Result<Self> {
        let mut dirs: Vec<PathBuf> = std::fs::read_dir(corpus_dir)
            .map_err(|e| Error::io(corpus_dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("transcription.json").is_file() && p.join("report.json").is_file())
            .collect();
        dirs.sort();
        let meetings = dirs.iter().map(|d| MeetingBundle::load_dir(d)).collect::<Result<Vec<_>>>()?;
        AnnotationStore::new(meetings, state_dir, config, embeddings)
    }

    fn path(&self, id: &str, kind: &str) -> PathBuf {
        self.state_dir.join(format!("{id}.{kind}.json"))
    }

    fn index_path(&self) -> PathBuf {
        self.state_dir.join("sessions.json")
    }

    fn restore(&self) -> Result<()> {
        let index_path = self.index_path();
        if !index_path.exists() {
            return Ok(());
        }
        let index: BTreeMap<String, SessionIndexEntry> = fsio::read_json(&index_path)?;
        let mut sessions = self.sessions.write().expect("session lock poisoned");
        for (id, entry) in index {
            let Some(bundle) = self.meetings.get(&id) else {
                log::warn!("sessions.json lists unknown meeting {id}; skipping");
                continue;
            };
            let pre = load_alignment(&self.path(&id, "pre"))?;
            let working = load_alignment(&self.path(&id, "working"))?;
            pre.validate_against(bundle)?;
            working.validate_against(bundle)?;
            sessions.insert(
                id.clone(),
                Arc::new(AnnotationSession {
                    meeting_id: id,
                    pre_alignment: pre,
                    working_alignment: working,
                    revision: entry.revision,
                    status: entry.status,
                }),
            );
        }
        Ok(())
    }

    fn persist(&self, session: &AnnotationSession, sessions: &BTreeMap<String, Arc<AnnotationSession>>) -> Result<()> {
        let id = &session.meeting_id;
        write_alignment(&session.pre_alignment, &self.path(id, "pre"))?;
        write_alignment(&session.working_alignment, &self.path(id, "working"))?;
        if session.status == SessionStatus::Submitted {
            let gold = session.working_alignment.clone().with_source(AlignmentSource::Gold);
            write_alignment(&gold, &self.path(id, "gold"))?;
        }
        let mut index: BTreeMap<&str, SessionIndexEntry> = sessions
            .iter()
            .map(|(k, s)| (k.as_str(), SessionIndexEntry { revision: s.revision, status: s.status }))
            .collect();
        index.insert(id, SessionIndexEntry { revision: session.revision, status: session.status });
        fsio::write_json(&self.index_path(), &index)
    }

    pub fn meeting_ids(&self) -> impl Iterator<Item = &str> {
        self.meetings.keys().map(String::as_str)
    }

    pub fn bundle(&self, id: &str) -> Result<&Arc<MeetingBundle>> {
        self.meetings
            .get(id)
            .ok_or_else(|| Error::NotFound(format!("meeting {id}")))
    }

    pub fn list(&self) -> Vec<MeetingSummary> {
        let sessions = self.sessions.read().expect("session lock poisoned");
        self.meetings
            .values()
            .map(|b| {
                let s = sessions.get(&b.meeting_id);
                MeetingSummary {
                    meeting_id: b.meeting_id.clone(),
                    transcription_segments: b.transcription.num_segments(),
                    report_segments: b.report.num_segments(),
                    status: s.map(|s| s.status),
                    revision: s.map(|s| s.revision),
                }
            })
            .collect()
    }

    fn pre_align(&self, bundle: &MeetingBundle) -> Result<SegmentAlignment> {
        match &self.config {
            Some(c) => Ok(align_meeting(bundle, c, self.embeddings.as_ref())?.alignment),
            None => diagonal_alignment(bundle),
        }
    }

    /// Current session of a meeting, opening one with a fresh
    /// pre-alignment on first access.
    pub fn session(&self, id: &str) -> Result<Arc<AnnotationSession>> {
        let bundle = self.bundle(id)?;
        if let Some(s) = self.sessions.read().expect("session lock poisoned").get(id) {
            return Ok(s.clone());
        }
        let pre = self.pre_align(bundle)?;
        let _w = self.write_lock.lock().expect("write lock poisoned");
        if let Some(s) = self.sessions.read().expect("session lock poisoned").get(id) {
            return Ok(s.clone());
        }
        let session = Arc::new(AnnotationSession {
            meeting_id: id.to_string(),
            working_alignment: pre.clone(),
            pre_alignment: pre,
            revision: 0,
            status: SessionStatus::Open,
        });
        let snapshot = self.sessions.read().expect("session lock poisoned").clone();
        self.persist(&session, &snapshot)?;
        self.sessions
            .write()
            .expect("session lock poisoned")
            .insert(id.to_string(), session.clone());
        Ok(session)
    }

    pub fn view(&self, id: &str) -> Result<MeetingView> {
        let session = self.session(id)?;
        let bundle = self.bundle(id)?;
        let transcription = bundle
            .transcription
            .segments()
            .iter()
            .enumerate()
            .map(|(m, _)| TranscriptionSegmentView {
                id: m,
                sentences: bundle
                    .transcription
                    .segment_sentences(m)
                    .iter()
                    .map(|s| SentenceView { id: s.id, text: s.text.clone() })
                    .collect(),
            })
            .collect();
        let report = bundle
            .report
            .segments()
            .iter()
            .enumerate()
            .map(|(n, seg)| ReportSegmentView {
                id: n,
                speaker: seg.speaker.clone(),
                sentences: seg
                    .sentences
                    .iter()
                    .map(|s| SentenceView { id: s.id, text: s.text.clone() })
                    .collect(),
            })
            .collect();
        Ok(MeetingView {
            meeting_id: id.to_string(),
            transcription,
            report,
            pre_alignment: session.pre_alignment.clone(),
            working_alignment: session.working_alignment.clone(),
            revision: session.revision,
            status: session.status,
        })
    }

    /// Applies `mutate` to the current session if `expected_revision`
    /// matches, then persists and publishes the result.
    fn update(
        &self,
        id: &str,
        expected_revision: u64,
        mutate: impl FnOnce(&AnnotationSession) -> Result<AnnotationSession>,
    ) -> Result<Arc<AnnotationSession>> {
        self.session(id)?;
        let _w = self.write_lock.lock().expect("write lock poisoned");
        let snapshot = self.sessions.read().expect("session lock poisoned").clone();
        let current = snapshot.get(id).expect("session opened above");
        if current.status == SessionStatus::Submitted {
            return Err(Error::SessionClosed(id.to_string()));
        }
        if current.revision != expected_revision {
            return Err(Error::Conflict {
                expected: expected_revision,
                current: current.revision,
            });
        }
        let next = Arc::new(mutate(current)?);
        self.persist(&next, &snapshot)?;
        self.sessions
            .write()
            .expect("session lock poisoned")
            .insert(id.to_string(), next.clone());
        Ok(next)
    }

    /// Replaces one entry of the working alignment. Returns the new revision.
    pub fn submit_correction(&self, id: &str, entry: AlignmentEntry, expected_revision: u64) -> Result<u64> {
        let bundle = self.bundle(id)?.clone();
        let next = self.update(id, expected_revision, |s| {
            let revision = s.revision + 1;
            let working = s.working_alignment.with_entry(entry)?.with_revision(revision);
            working.validate_against(&bundle)?;
            Ok(AnnotationSession {
                working_alignment: working,
                revision,
                ..s.clone()
            })
        })?;
        Ok(next.revision)
    }

    /// Closes the session and writes the working alignment as gold.
    pub fn submit(&self, id: &str, expected_revision: Option<u64>) -> Result<Arc<AnnotationSession>> {
        let expected = match expected_revision {
            Some(r) => r,
            None => self.session(id)?.revision,
        };
        self.update(id, expected, |s| {
            let revision = s.revision + 1;
            Ok(AnnotationSession {
                working_alignment: s.working_alignment.clone().with_revision(revision),
                revision,
                status: SessionStatus::Submitted,
                ..s.clone()
            })
        })
    }

    /// Annotator scores of submitted meetings with their mean and median.
    pub fn progress(&self) -> Result<Progress> {
        let sessions = self.sessions.read().expect("session lock poisoned");
        let per_meeting = sessions
            .values()
            .filter(|s| s.status == SessionStatus::Submitted)
            .map(|s| {
                Ok(MeetingProgress {
                    meeting_id: s.meeting_id.clone(),
                    annotator_score: annotator_score(&s.pre_alignment, &s.working_alignment)?,
                    status: s.status,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut scores: Vec<f64> = per_meeting.iter().map(|p| p.annotator_score).collect();
        scores.sort_by(f64::total_cmp);
        let mean = (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64);
        let median = (!scores.is_empty()).then(|| {
            let k = scores.len();
            if k % 2 == 1 {
                scores[k / 2]
            } else {
                (scores[k / 2 - 1] + scores[k / 2]) / 2.0
            }
        });
        Ok(Progress { per_meeting, mean, median })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ReportDoc, Sentence, TranscriptionDoc};

    fn meeting(id: &str, t_segs: usize, r_segs: usize) -> MeetingBundle {
        let sentences = (0..t_segs).map(|i| Sentence::new(i, format!("phrase {i}")).unwrap()).collect();
        MeetingBundle {
            meeting_id: id.into(),
            transcription: TranscriptionDoc::new(sentences, (0..t_segs).map(|i| i..i + 1).collect()).unwrap(),
            report: ReportDoc::from_texts((0..r_segs).map(|n| (None, vec![format!("resume {n}")]))).unwrap(),
        }
    }

    fn store(dir: &Path) -> AnnotationStore {
        AnnotationStore::new(vec![meeting("a", 4, 2), meeting("b", 2, 2)], dir, None, None).unwrap()
    }

    fn entry(t_seg: usize, r_seg: usize) -> AlignmentEntry {
        AlignmentEntry { t_seg, r_seg, irrelevant: false }
    }

    #[test]
    fn fresh_session() {
        let dir = tempfile::tempdir().unwrap();
        let s = store(dir.path());
        let v = s.view("a").unwrap();
        assert_eq!(v.revision, 0);
        assert_eq!(v.pre_alignment, v.working_alignment);
        assert_eq!(v.pre_alignment.targets(), vec![0, 0, 1, 1]);
        assert!(matches!(s.view("zz"), Err(Error::NotFound(_))));
    }

    #[test]
    fn corrections_and_conflicts() {
        let dir = tempfile::tempdir().unwrap();
        let s = store(dir.path());
        assert_eq!(s.submit_correction("a", entry(1, 1), 0).unwrap(), 1);
        let v = s.view("a").unwrap();
        assert_eq!(v.working_alignment.targets(), vec![0, 1, 1, 1]);
        assert!(matches!(s.submit_correction("a", entry(2, 0), 0), Err(Error::Conflict { .. })));
        match s.submit_correction("a", entry(2, 0), 1) {
            Err(Error::Monotonicity { neighbor_t_seg, .. }) => assert_eq!(neighbor_t_seg, 1),
            other => panic!("{other:?}"),
        }
        assert!(s.submit_correction("a", entry(3, 5), 1).is_err());
        assert_eq!(s.view("a").unwrap().revision, 1);
    }

    #[test]
    fn progress_and_restore() {
        let dir = tempfile::tempdir().unwrap();
        {
            let s = store(dir.path());
            assert!(s.progress().unwrap().per_meeting.is_empty());
            s.submit("b", Some(0)).unwrap();
            let p = s.progress().unwrap();
            assert_eq!((p.mean, p.median), (Some(1.0), Some(1.0)));
            s.submit_correction("a", entry(1, 1), 0).unwrap();
            s.submit_correction("a", entry(0, 1), 1).unwrap();
            s.submit("a", None).unwrap();
            let p = s.progress().unwrap();
            assert_eq!(p.per_meeting[0].annotator_score, 0.5);
            assert_eq!((p.mean, p.median), (Some(0.75), Some(0.75)));
            assert!(matches!(s.submit_correction("a", entry(0, 0), 3), Err(Error::SessionClosed(_))));
        }
        let s = store(dir.path());
        assert_eq!(s.view("a").unwrap().revision, 3);
        assert_eq!(s.view("a").unwrap().status, SessionStatus::Submitted);
        let gold = load_alignment(&dir.path().join("a.gold.json")).unwrap();
        assert_eq!(gold.source(), AlignmentSource::Gold);
        assert_eq!(gold.targets(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn concurrent_writers_one_wins() {
        let dir = tempfile::tempdir().unwrap();
        let s = Arc::new(store(dir.path()));
        s.session("a").unwrap();
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let s = s.clone();
                std::thread::spawn(move || s.submit_correction("a", entry(1, 1), 0).is_ok())
            })
            .collect();
        let wins = handles.into_iter().map(|h| h.join().unwrap()).filter(|&ok| ok).count();
        assert_eq!(wins, 1);
        assert_eq!(s.view("a").unwrap().revision, 1);
    }
}
