import { z } from 'zod';

export const PROTOCOL_VERSION = 1;

const imagePayload = z.object({
  format: z.literal('png-base64'),
  data: z.string().refine(
    (s) => /^[A-Za-z0-9+/]*={0,2}$/.test(s) && s.length % 4 === 0,
    'data must be base64',
  ),
});

export const helloRequest = z.object({ op: z.literal('hello') });

export const detectRequest = z.object({
  op: z.literal('detect'),
  image: imagePayload,
});

export const estimatePoseRequest = z.object({
  op: z.literal('estimate_pose'),
  image: imagePayload,
  mesh_ref: z.string(),
});

export const request = z.discriminatedUnion('op', [
  helloRequest,
  detectRequest,
  estimatePoseRequest,
]);

export type Request = z.infer<typeof request>;
export type ImagePayload = z.infer<typeof imagePayload>;

export interface Detection {
  label: string;
  bbox: [number, number, number, number];
  confidence: number;
}

export interface Pose {
  azimuth: number;
  elevation: number;
  inplane: number;
}

/** Map arbitrary finite angles into the canonical pose ranges.
 *
 * Azimuth wraps to [0, 360), in-plane to [-180, 180). Elevation is not
 * periodic; it is clamped to [-90, 90].
 */
export function normalizePose(p: Pose): Pose {
  const wrap = (x: number, lo: number, span: number) => {
    if (x >= lo && x < lo + span) return x; // avoid modulo float noise in range
    let v = (((x - lo) % span) + span) % span;
    if (v >= span) v = 0; // float wrap can land exactly on the span
    return v + lo;
  };
  return {
    azimuth: wrap(p.azimuth, 0, 360),
    elevation: Math.min(90, Math.max(-90, p.elevation)),
    inplane: wrap(p.inplane, -180, 360),
  };
}
