/* Drive the engine through its external interfaces: the CLI and the
 * HTTP service.  The engine package itself is never imported. */

import { ChildProcess, spawn, spawnSync } from "node:child_process";

const PYTHON = process.env.DC64_PYTHON ?? "python3";

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

export function cli(...args: string[]): CliResult {
  const result = spawnSync(PYTHON, ["-m", "dc64", ...args], { encoding: "utf8" });
  if (result.error) {
    throw new Error(`cannot run ${PYTHON}: ${result.error.message}`);
  }
  return {
    status: result.status ?? -1,
    stdout: result.stdout,
    stderr: result.stderr,
  };
}

export class ServiceProcess {
  private proc: ChildProcess | null = null;
  readonly port: number;

  constructor(port?: number) {
    this.port = port ?? 20000 + Math.floor(Math.random() * 20000);
  }

  get baseUrl(): string {
    return `http://127.0.0.1:${this.port}`;
  }

  async start(timeoutMs = 20000): Promise<void> {
    this.proc = spawn(PYTHON, ["-m", "dc64", "serve", "--port", String(this.port)], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
      try {
        const resp = await fetch(`${this.baseUrl}/health`);
        if (resp.ok) return;
      } catch {
        // not up yet
      }
      await new Promise((r) => setTimeout(r, 200));
    }
    this.stop();
    throw new Error(`service did not come up on port ${this.port}`);
  }

  stop(): void {
    if (this.proc) {
      this.proc.kill("SIGTERM");
      this.proc = null;
    }
  }

  async request(method: string, path: string, body?: unknown): Promise<Response> {
    return fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }
}
