import express, { Express } from "express";

import { CheckpointBackend } from "./checkpoint";
import {
  GenerateRequestSchema,
  GenerateResponse,
  clampCandidates,
  extractMethod,
} from "./protocol";
import { StubBackend, defaultFixturesPath } from "./stub";

export type ServerOptions = {
  mode: "stub" | "checkpoint";
  fixturesPath?: string;
  checkpointCmd?: string[];
};

export type AppHandle = {
  app: Express;
  markReady: () => void;
};

export function createApp(options: ServerOptions): AppHandle {
  const app = express();
  let ready = false;

  const stub =
    options.mode === "stub"
      ? StubBackend.fromFile(options.fixturesPath ?? defaultFixturesPath())
      : null;
  const checkpoint =
    options.mode === "checkpoint"
      ? new CheckpointBackend(options.checkpointCmd ?? [])
      : null;

  app.use(express.json({ limit: "4mb" }));

  app.get("/healthz", (_req, res) => {
    if (!ready) {
      res.status(503).json({ status: "starting" });
      return;
    }
    res.status(200).json({ status: "ok", mode: options.mode });
  });

  app.post("/v1/generate", (req, res) => {
    if (!ready) {
      res.status(503).json({ error: "not ready" });
      return;
    }
    const parsed = GenerateRequestSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: parsed.error.issues[0]?.message ?? "bad request" });
      return;
    }
    const request = parsed.data;
    const raw = stub
      ? stub.generate(extractMethod(request.prompt))
      : checkpoint!.generate(request);
    const body: GenerateResponse = {
      candidates: clampCandidates(raw, request.beam_size, request.max_len),
    };
    res.status(200).json(body);
  });

  // malformed JSON from express.json() lands here
  app.use(
    (err: Error, _req: express.Request, res: express.Response, next: express.NextFunction) => {
      if (err instanceof SyntaxError) {
        res.status(400).json({ error: "malformed JSON body" });
        return;
      }
      next(err);
    },
  );

  return { app, markReady: () => (ready = true) };
}

function parseArgs(argv: string[]): { options: ServerOptions; port: number } {
  let mode: "stub" | "checkpoint" = "stub";
  let port = 8601;
  let fixturesPath: string | undefined;
  const checkpointCmd: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--mode":
        mode = argv[++i] === "checkpoint" ? "checkpoint" : "stub";
        break;
      case "--port":
        port = Number(argv[++i]);
        break;
      case "--fixtures":
        fixturesPath = argv[++i];
        break;
      case "--cmd":
        checkpointCmd.push(...argv[++i].split(" "));
        break;
      default:
        throw new Error(`unknown argument: ${argv[i]}`);
    }
  }
  return { options: { mode, fixturesPath, checkpointCmd }, port };
}

export function main(argv: string[]): void {
  const { options, port } = parseArgs(argv);
  const { app, markReady } = createApp(options);
  markReady();
  app.listen(port, "127.0.0.1", () => {
    console.log(`generate server listening on 127.0.0.1:${port} (${options.mode} mode)`);
  });
}

if (require.main === module) {
  main(process.argv.slice(2));
}
