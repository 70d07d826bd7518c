/**
 * Full curation round-trip against the real API server: accept a token,
 * watch the version move and the filtered count shrink by exactly the
 * newly matched reviews, converge on a reject-only round, and check the
 * exported vocabulary parses back on the Python side.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { boardFromServer, buildAcceptBatch, decide } from "../src/state.js";

const PORT = 8800 + (process.pid % 800);
const BASE = `http://127.0.0.1:${PORT}`;

// Bodies are >= 75 chars. "sjw" is in the prior vocabulary, so exactly four
// reviews start filtered; exactly two of them contain "woke".
const REVIEWS = [
  "sjw pandering from the first minute to the very last one of the credits today",
  "this woke nonsense gets a zero from me, the developers should be ashamed of it",
  "woke messaging everywhere you look, impossible to escape it for even one minute",
  "a quiet tale about grief and revenge told with patience and craft throughout it",
  "the soundtrack carried me through the rough chapters of the whole long journey",
];

let server: ChildProcess | null = null;
let workDir: string;
const api = new ApiClient(BASE);

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 20_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      await api.session();
      return;
    } catch (err) {
      lastError = err;
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
  throw new Error(`curation API did not come up on ${BASE}: ${String(lastError)}`);
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "curation-ui-"));
  const corpusPath = join(workDir, "corpus.jsonl");
  const lines = REVIEWS.map((body, i) =>
    JSON.stringify({
      id: `r${String(i).padStart(6, "0")}`,
      username: `writer${i}abcd`,
      body,
      score: i % 11,
      date: "2020-06-19",
    }),
  );
  writeFileSync(corpusPath, lines.join("\n") + "\n");
  const vocabDir = join(workDir, "vocabs");
  execFileSync("mkdir", ["-p", vocabDir]);
  writeFileSync(join(vocabDir, "P.txt"), "[prior]\nsjw\n[posterior]\n");

  server = spawn(
    "python3",
    [
      "-m", "reviewforensics.cli",
      "serve", corpusPath,
      "--format", "record-lines",
      "--vocab-dir", vocabDir,
      "--port", String(PORT),
    ],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("curation round-trip", () => {
  it("accepting a token bumps the version and shrinks the filtered set exactly", async () => {
    const page = await api.candidates("P", 1, 100);
    const preview = await api.preview("P");
    let board = boardFromServer(page, preview);
    expect(board.filteredCount).toBe(4);
    expect(board.version).toBe(1);

    const index = board.cards.findIndex((c) => c.token === "woke");
    expect(index).toBeGreaterThanOrEqual(0);
    board = decide(board, index, "accept").state;

    const result = await api.accept(buildAcceptBatch(board));
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.state.version).toBe(2);
    expect(result.state.round).toBe(2);
    // exactly the two "woke" reviews left the filtered sample
    expect(result.state.filtered_count).toBe(2);
    expect(result.state.converged).toBe(false);

    const refreshed = await api.candidates("P", 1, 100);
    expect(refreshed.candidates.map((c) => c.token)).not.toContain("woke");
  });

  it("a stale client gets a conflict and can refresh", async () => {
    const result = await api.accept({ label: "P", surfaces: ["zzz"], version: 999 });
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.conflict).toBe(true);
    }
  });

  it("a reject-only round flips converged to true", async () => {
    const page = await api.candidates("P", 1, 100);
    let board = boardFromServer(page, null);
    for (let i = 0; i < Math.min(3, board.cards.length); i += 1) {
      board = decide(board, i, "reject").state;
    }
    const batch = buildAcceptBatch(board);
    expect(batch.surfaces).toEqual([]);
    const result = await api.accept(batch);
    expect(result.ok).toBe(true);
    if (result.ok) {
      expect(result.state.converged).toBe(true);
    }
  });

  it("the exported vocabulary round-trips through the Python loader", async () => {
    const exported = await api.exportVocabularies();
    expect(Object.keys(exported.vocabularies)).toContain("P");
    const text = exported.vocabularies["P"];
    expect(text).toContain("woke @round=1");
    const exportPath = join(workDir, "exported_P.txt");
    writeFileSync(exportPath, text);
    const script =
      "import sys\n" +
      "from reviewforensics.vocab import load_vocabulary\n" +
      "v = load_vocabulary(sys.argv[1], label='P')\n" +
      "entry = {e.surface: e for e in v.entries}['woke']\n" +
      "print(len(v), entry.origin, entry.added_round)\n";
    const output = execFileSync("python3", ["-c", script, exportPath]).toString().trim();
    expect(output).toBe("2 posterior 1");
  });

  it("the saved vocabulary file on disk matches the export", async () => {
    const exported = await api.exportVocabularies();
    const onDisk = execFileSync("cat", [join(workDir, "vocabs", "P.txt")]).toString();
    expect(onDisk).toBe(exported.vocabularies["P"]);
  });
});
