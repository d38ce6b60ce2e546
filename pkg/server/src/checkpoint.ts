import { spawnSync } from "node:child_process";

import { CandidateOut, GenerateRequest } from "./protocol";

/**
 * Wrapper around an external sequence-to-sequence generator. The configured
 * command receives the request as JSON on stdin and must print
 * {"candidates": [{"text": ..., "score": ...}]} on stdout; typically it wraps
 * a checkpoint behind whatever runtime the model needs. Process failures
 * surface as empty candidate lists plus a logged warning so one bad request
 * never takes the server down.
 */
export class CheckpointBackend {
  constructor(
    private readonly command: string[],
    private readonly timeoutMs: number = 120_000,
  ) {
    if (command.length === 0) {
      throw new Error("checkpoint mode needs --cmd with a wrapper command");
    }
  }

  generate(request: GenerateRequest): CandidateOut[] {
    const result = spawnSync(this.command[0], this.command.slice(1), {
      input: JSON.stringify(request),
      encoding: "utf-8",
      timeout: this.timeoutMs,
    });
    if (result.status !== 0 || result.error) {
      console.warn(
        `checkpoint wrapper failed: ${result.error ?? `exit ${result.status}`}`,
      );
      return [];
    }
    try {
      const parsed = JSON.parse(result.stdout) as { candidates: CandidateOut[] };
      return parsed.candidates.map((c) => ({
        text: String(c.text),
        score: Number(c.score ?? 0),
      }));
    } catch (err) {
      console.warn(`checkpoint wrapper returned malformed JSON: ${err}`);
      return [];
    }
  }
}
