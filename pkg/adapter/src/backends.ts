import { readFileSync } from 'node:fs';
import { z } from 'zod';
import type { Detection, Pose } from './protocol.js';

export interface Backend {
  readonly capabilities: string[];
  detect(image: Buffer): Detection[];
  estimatePose(image: Buffer, meshRef: string): Pose;
}

/** Always reports an empty scene and the reference orientation. */
export class NullBackend implements Backend {
  readonly capabilities = ['detect', 'estimate_pose'];

  detect(): Detection[] {
    return [];
  }

  estimatePose(): Pose {
    return { azimuth: 0, elevation: 0, inplane: 0 };
  }
}

const detectionSchema = z.object({
  label: z.string(),
  bbox: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  confidence: z.number().min(0).max(1),
});

const poseSchema = z.object({
  azimuth: z.number().finite(),
  elevation: z.number().finite(),
  inplane: z.number().finite(),
});

const fixtureConfigSchema = z.object({
  backend: z.literal('fixture'),
  detections: z.array(z.array(detectionSchema)).default([]),
  poses: z.array(poseSchema).default([]),
});

const nullConfigSchema = z.object({ backend: z.literal('null') });

const configSchema = z.discriminatedUnion('backend', [
  nullConfigSchema,
  fixtureConfigSchema,
]);

export type FixtureConfig = z.infer<typeof fixtureConfigSchema>;

/** Replays canned responses from a config file, in request order.
 *
 * Each detect request consumes the next detection list; each pose request
 * consumes the next pose. Past the end of a list the last entry repeats
 * (an empty list yields empty detections / the reference orientation).
 */
export class FixtureBackend implements Backend {
  readonly capabilities = ['detect', 'estimate_pose'];
  private detectCalls = 0;
  private poseCalls = 0;

  constructor(private readonly config: FixtureConfig) {}

  detect(): Detection[] {
    const seq = this.config.detections;
    if (seq.length === 0) return [];
    const out = seq[Math.min(this.detectCalls, seq.length - 1)]!;
    this.detectCalls += 1;
    return out;
  }

  estimatePose(): Pose {
    const seq = this.config.poses;
    if (seq.length === 0) return { azimuth: 0, elevation: 0, inplane: 0 };
    const out = seq[Math.min(this.poseCalls, seq.length - 1)]!;
    this.poseCalls += 1;
    return out;
  }
}

export function backendFromConfigFile(path: string | undefined): Backend {
  if (path === undefined) return new NullBackend();
  const config = configSchema.parse(JSON.parse(readFileSync(path, 'utf8')));
  return config.backend === 'null' ? new NullBackend() : new FixtureBackend(config);
}
