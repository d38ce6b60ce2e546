import { z } from "zod";

/** Wire protocol for POST /v1/generate. */
export const GenerateRequestSchema = z.object({
  prompt: z.string(),
  beam_size: z.number().int().min(1).max(64),
  max_len: z.number().int().min(1).default(512),
});

export type GenerateRequest = z.infer<typeof GenerateRequestSchema>;

export type CandidateOut = { text: string; score: number };

export type GenerateResponse = { candidates: CandidateOut[] };

export const PROMPT_PREFIX = "Simplify the following java method: ";
export const PROMPT_SUFFIX = ", the simplified version is: ";

/**
 * Lenient prompt parsing: take whatever sits between the fixed prefix and
 * the last occurrence of the fixed suffix. Prompts that don't follow the
 * template are returned as-is; lookup misses simply yield no candidates.
 */
export function extractMethod(prompt: string): string {
  let body = prompt;
  if (body.startsWith(PROMPT_PREFIX)) {
    body = body.slice(PROMPT_PREFIX.length);
  }
  const suffixAt = body.lastIndexOf(PROMPT_SUFFIX);
  if (suffixAt >= 0) {
    body = body.slice(0, suffixAt);
  }
  return body;
}

/** Whitespace-insensitive key used to match prompts against fixtures. */
export function normalize(code: string): string {
  return code.replace(/\s+/g, " ").trim();
}

/** Crude output-length proxy: whitespace-delimited chunks. */
export function roughLength(code: string): number {
  const trimmed = code.trim();
  return trimmed === "" ? 0 : trimmed.split(/\s+/).length;
}

/**
 * Enforce the response invariants: at most beam_size candidates, scores
 * monotonically non-increasing, candidates over the length cap dropped.
 */
export function clampCandidates(
  candidates: CandidateOut[],
  beamSize: number,
  maxLen: number,
): CandidateOut[] {
  return candidates
    .filter((c) => roughLength(c.text) <= maxLen)
    .sort((a, b) => b.score - a.score)
    .slice(0, beamSize);
}
