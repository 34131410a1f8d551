//! Human correction of pre-alignments: a session store with optimistic
//! concurrency and its HTTP/JSON interface.

mod http;
mod store;

pub use http::{router, serve, ApiError, CorrectionRequest, CorrectionResponse, SubmitRequest, SubmitResponse};
pub use store::{
    AnnotationSession, AnnotationStore, MeetingProgress, MeetingSummary, MeetingView, Progress, ReportSegmentView,
    SentenceView, SessionStatus, TranscriptionSegmentView,
};
