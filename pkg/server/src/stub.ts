import fs from "node:fs";
import path from "node:path";

import { CandidateOut, normalize } from "./protocol";

type FixtureEntry = { method: string; candidates: CandidateOut[] };

/**
 * Deterministic replay backend: canned (method -> candidates) pairs keyed by
 * whitespace-normalized method text. Unknown methods yield zero candidates.
 */
export class StubBackend {
  private table = new Map<string, CandidateOut[]>();

  constructor(entries: FixtureEntry[]) {
    for (const entry of entries) {
      this.table.set(normalize(entry.method), entry.candidates);
    }
  }

  static fromFile(fixturesPath: string): StubBackend {
    const raw = fs.readFileSync(fixturesPath, "utf-8");
    return new StubBackend(JSON.parse(raw) as FixtureEntry[]);
  }

  size(): number {
    return this.table.size;
  }

  generate(methodText: string): CandidateOut[] {
    return this.table.get(normalize(methodText)) ?? [];
  }
}

export function defaultFixturesPath(): string {
  return path.join(__dirname, "..", "fixtures", "generate.json");
}
