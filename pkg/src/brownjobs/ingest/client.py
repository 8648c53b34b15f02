"""HTTP client for a GitLab-v4-shaped CI API.

Two endpoints are consumed:

    GET /projects/:id/jobs?scope[]=success&scope[]=failed&per_page=N&page=K
    GET /projects/:id/jobs/:job_id/trace

Auth goes in the PRIVATE-TOKEN header. 429 responses are retried after
the server's Retry-After delay; transient network errors retry with
exponential backoff a bounded number of times before surfacing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional
from urllib.parse import quote

import requests

from ..errors import AuthTokenError, NetworkFailure

DEFAULT_PAGE_SIZE = 100
MAX_PAGE_SIZE = 100
MAX_ATTEMPTS = 4
BACKOFF_BASE_SECONDS = 0.5
RATE_LIMIT_DEFAULT_WAIT = 1.0


@dataclass
class JobPage:
    jobs: List[dict]
    page: int
    next_page: Optional[int]


@dataclass
class TraceResult:
    text: Optional[str]  # None when the trace endpoint 404s
    found: bool
    decode_anomaly: bool = False


@dataclass
class CiClient:
    base_url: str
    token: str = ""
    session: Optional[requests.Session] = None
    timeout: float = 30.0
    sleep: callable = field(default=time.sleep, repr=False)

    def __post_init__(self):
        self.base_url = self.base_url.rstrip("/")
        if self.session is None:
            self.session = requests.Session()

    def _headers(self) -> dict:
        return {"PRIVATE-TOKEN": self.token} if self.token else {}

    def _get(self, url: str, params: Optional[list] = None) -> requests.Response:
        last_error = None
        for attempt in range(MAX_ATTEMPTS):
            try:
                resp = self.session.get(
                    url, params=params, headers=self._headers(), timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
                if attempt + 1 < MAX_ATTEMPTS:
                    self.sleep(BACKOFF_BASE_SECONDS * (2 ** attempt))
                continue
            if resp.status_code in (401, 403):
                raise AuthTokenError(
                    f"HTTP {resp.status_code} from {url}: token lacks read access"
                )
            if resp.status_code == 429:
                retry_after = resp.headers.get("Retry-After")
                try:
                    wait = float(retry_after)
                except (TypeError, ValueError):
                    wait = RATE_LIMIT_DEFAULT_WAIT
                self.sleep(wait)
                last_error = RuntimeError(f"rate limited by {url}")
                continue
            return resp
        raise NetworkFailure(f"GET {url} failed after {MAX_ATTEMPTS} attempts: {last_error}")

    def list_jobs(self, project_id: str, page: int = 1, per_page: int = DEFAULT_PAGE_SIZE) -> JobPage:
        if not 1 <= per_page <= MAX_PAGE_SIZE:
            raise ValueError(f"per_page must be in 1..{MAX_PAGE_SIZE}, got {per_page}")
        url = f"{self.base_url}/projects/{quote(str(project_id), safe='')}/jobs"
        params = [
            ("scope[]", "success"),
            ("scope[]", "failed"),
            ("per_page", str(per_page)),
            ("page", str(page)),
        ]
        resp = self._get(url, params=params)
        if resp.status_code != 200:
            raise NetworkFailure(f"GET {url} page {page}: HTTP {resp.status_code}")
        jobs = resp.json()
        if not isinstance(jobs, list):
            raise NetworkFailure(f"GET {url} page {page}: expected a JSON array")
        next_header = resp.headers.get("X-Next-Page", "").strip()
        if next_header:
            next_page = int(next_header)
        else:
            # providers without the header: a full page implies another may follow
            next_page = page + 1 if len(jobs) == per_page else None
        return JobPage(jobs=jobs, page=page, next_page=next_page)

    def fetch_trace(self, project_id: str, job_id: int) -> TraceResult:
        url = (
            f"{self.base_url}/projects/{quote(str(project_id), safe='')}"
            f"/jobs/{int(job_id)}/trace"
        )
        resp = self._get(url)
        if resp.status_code == 404:
            return TraceResult(text=None, found=False)
        if resp.status_code != 200:
            raise NetworkFailure(f"GET {url}: HTTP {resp.status_code}")
        raw = resp.content
        try:
            return TraceResult(text=raw.decode("utf-8"), found=True)
        except UnicodeDecodeError:
            return TraceResult(
                text=raw.decode("utf-8", errors="replace"),
                found=True,
                decode_anomaly=True,
            )
