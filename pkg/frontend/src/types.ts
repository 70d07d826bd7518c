/** Wire types of the curation API; field names are the server contract. */

export type LabelState = {
  label: string;
  round: number;
  filtered_count: number;
  converged: boolean;
  version: number;
};

export type SessionInfo = {
  session_id: string;
  corpus_size: number;
  labels: LabelState[];
};

export type Candidate = {
  token: string;
  count: number;
};

export type CandidatePage = LabelState & {
  page: number;
  page_size: number;
  total: number;
  candidates: Candidate[];
};

export type KwicSnippet = {
  review_id: string;
  left: string;
  match: string;
  right: string;
  score: number;
  day: string;
};

export type PreviewRow = {
  label: string;
  n: number;
  mean_x: number | null;
  f_x10: number | null;
  f_xlt2: number | null;
  version: number;
};

export type AcceptRequest = {
  label: string;
  surfaces: string[];
  version: number;
};

export type ExportPayload = {
  vocabularies: Record<string, string>;
  versions: Record<string, number>;
};
