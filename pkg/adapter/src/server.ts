import { createInterface } from 'node:readline';
import type { Readable, Writable } from 'node:stream';
import type { Backend } from './backends.js';
import { normalizePose, PROTOCOL_VERSION, request, type Request } from './protocol.js';

function handle(backend: Backend, req: Request): unknown {
  switch (req.op) {
    case 'hello':
      return { protocol: PROTOCOL_VERSION, capabilities: backend.capabilities };
    case 'detect':
      return { detections: backend.detect(Buffer.from(req.image.data, 'base64')) };
    case 'estimate_pose': {
      const pose = backend.estimatePose(Buffer.from(req.image.data, 'base64'), req.mesh_ref);
      return normalizePose(pose);
    }
  }
}

/** Request loop: one JSON line in, exactly one JSON line out, until EOF.
 *
 * A malformed line produces an {"error": ...} response and the loop keeps
 * serving; only EOF on the input ends the session.
 */
export function serve(input: Readable, output: Writable, backend: Backend): Promise<void> {
  const lines = createInterface({ input, crlfDelay: Infinity });
  return new Promise((resolve) => {
    lines.on('line', (line) => {
      let response: unknown;
      try {
        const parsed = request.safeParse(JSON.parse(line));
        if (parsed.success) {
          response = handle(backend, parsed.data);
        } else {
          response = { error: `invalid request: ${parsed.error.issues[0]?.message ?? 'schema'}` };
        }
      } catch (err) {
        response = { error: `malformed JSON line: ${(err as Error).message}` };
      }
      output.write(JSON.stringify(response) + '\n');
    });
    lines.on('close', resolve);
  });
}
