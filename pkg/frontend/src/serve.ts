// Small static-file server that proxies the JSON API, so the browser talks
// to one origin and no CORS setup is needed. Start the backend first
// (rxstego serve), then `npm run serve` and open http://127.0.0.1:8480/.

import { createServer, type IncomingMessage, type Server, type ServerResponse } from "node:http";
import { readFile } from "node:fs/promises";
import { extname, join, normalize } from "node:path";
import process from "node:process";

const API_PREFIXES = ["/login", "/users", "/drugs", "/pharmacies", "/patients", "/prescriptions"];

const MIME: Record<string, string> = {
  ".html": "text/html; charset=utf-8",
  ".js": "text/javascript; charset=utf-8",
  ".css": "text/css; charset=utf-8",
  ".png": "image/png",
};

export function isApiPath(path: string): boolean {
  return API_PREFIXES.some(
    (prefix) =>
      path === prefix ||
      path.startsWith(prefix + "/") ||
      path.startsWith(prefix + "?"),
  );
}

function readBody(req: IncomingMessage): Promise<Buffer> {
  return new Promise((resolve, reject) => {
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk));
    req.on("end", () => resolve(Buffer.concat(chunks)));
    req.on("error", reject);
  });
}

async function proxy(req: IncomingMessage, res: ServerResponse, apiBase: string): Promise<void> {
  const headers: Record<string, string> = {};
  if (req.headers.authorization) headers["authorization"] = req.headers.authorization;
  if (req.headers["content-type"]) headers["content-type"] = String(req.headers["content-type"]);
  const body = req.method === "GET" || req.method === "HEAD" ? undefined : await readBody(req);
  try {
    const upstream = await fetch(apiBase + (req.url ?? "/"), {
      method: req.method,
      headers,
      body: body && body.length > 0 ? new Uint8Array(body) : undefined,
    });
    const payload = Buffer.from(await upstream.arrayBuffer());
    res.writeHead(upstream.status, {
      "content-type": upstream.headers.get("content-type") ?? "application/octet-stream",
    });
    res.end(payload);
  } catch {
    res.writeHead(502, { "content-type": "application/json" });
    res.end(JSON.stringify({ error: { code: "UPSTREAM_DOWN", message: "API not reachable" } }));
  }
}

async function serveStatic(path: string, root: string, res: ServerResponse): Promise<void> {
  let target = path === "/" ? "/index.html" : path;
  target = normalize(target);
  if (target.includes("..")) {
    res.writeHead(404);
    res.end("not found");
    return;
  }
  try {
    const content = await readFile(join(root, target));
    res.writeHead(200, { "content-type": MIME[extname(target)] ?? "application/octet-stream" });
    res.end(content);
  } catch {
    res.writeHead(404);
    res.end("not found");
  }
}

export function createWebServer(options: { root: string; apiBase: string }): Server {
  return createServer((req, res) => {
    const path = req.url ?? "/";
    if (isApiPath(path)) {
      void proxy(req, res, options.apiBase);
    } else {
      void serveStatic(path.split("?")[0] ?? "/", options.root, res);
    }
  });
}

// started directly, not imported
if (process.argv[1] && process.argv[1].endsWith("serve.js")) {
  const port = parseInt(process.env.PORT ?? "8480", 10);
  const apiBase = process.env.RX_API ?? "http://127.0.0.1:8470";
  const root = join(import.meta.dirname, "..");
  createWebServer({ root, apiBase }).listen(port, "127.0.0.1", () => {
    console.log(`webui on http://127.0.0.1:${port} -> API ${apiBase}`);
  });
}
