use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;

use super::{RateLimiter, SourceError, SourceErrorKind};

const DEFAULT_BACKOFF: Duration = Duration::from_secs(1);

/// Paced GET requests for one source; HTTP 429 is retried once after a backoff.
#[derive(Debug)]
pub(crate) struct PacedClient {
    source_id: String,
    client: Client,
    limiter: RateLimiter,
    backoff: Duration,
}

impl PacedClient {
    pub(crate) fn new(source_id: &str, limiter: RateLimiter, timeout: Duration) -> Self {
        let client = Client::builder().timeout(timeout).build().expect("HTTP client builds");
        PacedClient { source_id: source_id.to_owned(), client, limiter, backoff: DEFAULT_BACKOFF }
    }

    pub(crate) fn set_backoff(&mut self, backoff: Duration) {
        self.backoff = backoff;
    }

    pub(crate) fn error(&self, kind: SourceErrorKind, message: impl Into<String>) -> SourceError {
        SourceError::new(&self.source_id, kind, message)
    }

    pub(crate) fn get(&self, url: &str, params: &[(&str, String)], accept: &str) -> Result<String, SourceError> {
        for attempt in 0..2 {
            self.limiter.acquire();
            let response = self
                .client
                .get(url)
                .query(params)
                .header(reqwest::header::ACCEPT, accept)
                .send()
                .map_err(|e| self.error(SourceErrorKind::Network, e.to_string()))?;
            let status = response.status();
            match status {
                s if s.is_success() => {
                    return response.text().map_err(|e| self.error(SourceErrorKind::Network, e.to_string()));
                }
                StatusCode::UNAUTHORIZED | StatusCode::FORBIDDEN => {
                    return Err(self.error(SourceErrorKind::Auth, format!("HTTP {status}")));
                }
                StatusCode::TOO_MANY_REQUESTS if attempt == 0 => {
                    log::warn!("source `{}` is rate limited, retrying in {:?}", self.source_id, self.backoff);
                    self.limiter.clock().sleep(self.backoff);
                }
                StatusCode::TOO_MANY_REQUESTS => {
                    return Err(self.error(SourceErrorKind::RateLimited, format!("HTTP {status} after retry")));
                }
                _ => return Err(self.error(SourceErrorKind::Network, format!("HTTP {status}"))),
            }
        }
        unreachable!("the second attempt always returns")
    }
}
